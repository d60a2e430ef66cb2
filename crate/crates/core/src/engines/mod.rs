//! Forward passes, readouts, the node classifier, and the margin loss.
//!
//! All engines share one parameterization: two r-by-r matrices W1 and W2,
//! a classifier vector beta, and an activation suite (phi, rho, g) with
//! declared Lipschitz constants. Embeddings start at zero, so the depth-L
//! node embedding is exactly the depth-L computation-tree function.
//!
//! Unordered sums (neighbor aggregation, sum/mean readout, the classify
//! average, directional message sums) accumulate in value-sorted order,
//! which makes them independent of node labels bit for bit.

mod directional;

pub use directional::{
    dime_forward, dime_ports_forward, edge_geometry, hdcpn_forward, GeometricFeatures,
};

use crate::error::{Error, Result};
use crate::graph::{validate_ports, Graph};
use crate::tree::ComputationTree;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Pointwise nonlinearity with a declared Lipschitz constant and, for the
/// squashing case, an output bound. All variants fix 0 at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    pub fn lipschitz(self) -> f64 {
        1.0
    }

    /// Sup-norm output bound, when one exists.
    pub fn output_bound(self) -> Option<f64> {
        match self {
            Activation::Tanh => Some(1.0),
            Activation::Identity => None,
        }
    }
}

fn apply_vec(a: Activation, v: &DVector<f64>) -> DVector<f64> {
    v.map(|x| a.apply(x))
}

/// The (phi, rho, g) triple of the update equation, with psi fixed to the
/// logistic sigmoid for classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationSuite {
    pub phi: Activation,
    pub rho: Activation,
    pub g: Activation,
}

impl Default for ActivationSuite {
    fn default() -> Self {
        Self { phi: Activation::Tanh, rho: Activation::Tanh, g: Activation::Tanh }
    }
}

impl ActivationSuite {
    pub fn c_phi(&self) -> f64 {
        self.phi.lipschitz()
    }
    pub fn c_rho(&self) -> f64 {
        self.rho.lipschitz()
    }
    pub fn c_g(&self) -> f64 {
        self.g.lipschitz()
    }
    /// Output bound b of phi.
    pub fn bound(&self) -> Option<f64> {
        self.phi.output_bound()
    }
}

/// Logistic sigmoid, the classifier squash psi.
pub fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Norm caps the random parameter draw is rescaled into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormCaps {
    pub b1: f64,
    pub b2: f64,
    pub b_beta: f64,
}

impl Default for NormCaps {
    fn default() -> Self {
        Self { b1: 1.0, b2: 1.0, b_beta: 1.0 }
    }
}

/// Shared weights of every engine. The norm fields are recomputed from the
/// matrices on construction, never trusted from input.
#[derive(Debug, Clone, PartialEq)]
pub struct GnnParams {
    w1: DMatrix<f64>,
    w2: DMatrix<f64>,
    beta: DVector<f64>,
    pub suite: ActivationSuite,
    pub layers: usize,
    b1: f64,
    b2: f64,
    b_beta: f64,
}

impl GnnParams {
    pub fn new(
        w1: DMatrix<f64>,
        w2: DMatrix<f64>,
        beta: DVector<f64>,
        suite: ActivationSuite,
        layers: usize,
    ) -> Result<Self> {
        let r = w1.nrows();
        if w1.ncols() != r || w2.nrows() != r || w2.ncols() != r || beta.len() != r {
            return Err(Error::DimensionMismatch { expected: r, got: w2.nrows() });
        }
        let b1 = spectral_norm(&w1);
        let b2 = spectral_norm(&w2);
        let b_beta = beta.norm();
        Ok(Self { w1, w2, beta, suite, layers, b1, b2, b_beta })
    }

    /// Entries i.i.d. uniform in [-1, 1], then rescaled so the spectral
    /// norms respect the caps. Deterministic per seed.
    pub fn random(
        r: usize,
        layers: usize,
        seed: u64,
        caps: &NormCaps,
        suite: ActivationSuite,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_from(&mut rng, r, layers, caps, suite)
    }

    /// Same draw from a caller-owned stream (used for independent trials).
    pub fn random_from(
        rng: &mut impl Rng,
        r: usize,
        layers: usize,
        caps: &NormCaps,
        suite: ActivationSuite,
    ) -> Self {
        let mut w1 = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..=1.0));
        let mut w2 = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..=1.0));
        let mut beta = DVector::from_fn(r, |_, _| rng.gen_range(-1.0..=1.0));
        let s1 = spectral_norm(&w1);
        if s1 > caps.b1 {
            w1 *= caps.b1 / s1;
        }
        let s2 = spectral_norm(&w2);
        if s2 > caps.b2 {
            w2 *= caps.b2 / s2;
        }
        let sb = beta.norm();
        if sb > caps.b_beta {
            beta *= caps.b_beta / sb;
        }
        Self::new(w1, w2, beta, suite, layers).expect("square by construction")
    }

    pub fn dim(&self) -> usize {
        self.w1.nrows()
    }
    pub fn w1(&self) -> &DMatrix<f64> {
        &self.w1
    }
    pub fn w2(&self) -> &DMatrix<f64> {
        &self.w2
    }
    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }
    /// Spectral norm of W1, recomputed.
    pub fn b1(&self) -> f64 {
        self.b1
    }
    /// Spectral norm of W2, recomputed.
    pub fn b2(&self) -> f64 {
        self.b2
    }
    /// Euclidean norm of beta, recomputed.
    pub fn b_beta(&self) -> f64 {
        self.b_beta
    }
}

/// Per-node embeddings at the final layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    vectors: Vec<DVector<f64>>,
}

impl EmbeddingTable {
    pub fn new(vectors: Vec<DVector<f64>>) -> Self {
        Self { vectors }
    }
    pub fn len(&self) -> usize {
        self.vectors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
    pub fn get(&self, v: usize) -> &DVector<f64> {
        &self.vectors[v]
    }
    pub fn iter(&self) -> impl Iterator<Item = &DVector<f64>> {
        self.vectors.iter()
    }
    pub fn max_abs(&self) -> f64 {
        self.vectors
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |acc, &x| acc.max(x.abs()))
    }
}

fn cmp_vectors(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = x.total_cmp(y);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

/// Sums a multiset of vectors in value-sorted order: the result depends
/// only on the multiset, never on node labels.
pub(crate) fn stable_sum(mut terms: Vec<DVector<f64>>, dim: usize) -> DVector<f64> {
    terms.sort_by(cmp_vectors);
    let mut acc = DVector::zeros(dim);
    for t in terms {
        acc += t;
    }
    acc
}

pub(crate) fn stable_scalar_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.total_cmp(b));
    terms.into_iter().sum()
}

fn check_dim(g: &Graph, p: &GnnParams) -> Result<()> {
    if g.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: g.dim() });
    }
    Ok(())
}

pub(crate) fn check_consistent_ports(g: &Graph) -> Result<()> {
    let violations = validate_ports(g)?;
    match violations.first() {
        Some(v) => Err(Error::InconsistentPorts(v.to_string())),
        None => Ok(()),
    }
}

/// Injective scalar weight for a (local port, remote port) pair:
/// 2^-(local (D+1) + remote) with D the maximum degree.
pub(crate) fn port_weight(local: usize, remote: usize, max_degree: usize) -> f64 {
    let exponent = (local * (max_degree + 1) + remote) as f64;
    (-exponent).exp2()
}

/// Locally unordered mean-field update:
/// h_v = phi(W1 x_v + W2 rho(sum_u g(h_u))), h0 = 0, for `layers` rounds.
pub fn lu_forward(g: &Graph, p: &GnnParams) -> Result<EmbeddingTable> {
    Ok(lu_forward_stats(g, p)?.0)
}

/// Same pass, also returning the largest 2-norm the post-aggregation
/// vector rho(sum g(h)) attains anywhere in the run.
pub fn lu_forward_stats(g: &Graph, p: &GnnParams) -> Result<(EmbeddingTable, f64)> {
    check_dim(g, p)?;
    let n = g.node_count();
    let r = p.dim();
    let mut h: Vec<DVector<f64>> = vec![DVector::zeros(r); n];
    let mut max_aggregate = 0.0f64;
    for _ in 0..p.layers {
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let terms: Vec<DVector<f64>> =
                g.neighbors(v).iter().map(|&u| apply_vec(p.suite.g, &h[u])).collect();
            let agg = apply_vec(p.suite.rho, &stable_sum(terms, r));
            max_aggregate = max_aggregate.max(agg.norm());
            let x = DVector::from_column_slice(g.features(v));
            let z = &p.w1 * x + &p.w2 * agg;
            next.push(apply_vec(p.suite.phi, &z));
        }
        h = next;
    }
    Ok((EmbeddingTable::new(h), max_aggregate))
}

/// Port-ordered update:
/// h_v = phi(W1 x_v + W2 sum_j omega(j, t_j) g(h_{c_v(j)})), h0 = 0,
/// where c_v(j) is the neighbor at port j and t_j its remote port.
pub fn cpn_forward(g: &Graph, p: &GnnParams) -> Result<EmbeddingTable> {
    check_dim(g, p)?;
    check_consistent_ports(g)?;
    let ports = g.ports().ok_or(Error::MissingPorts)?;
    let n = g.node_count();
    let r = p.dim();
    let dmax = g.max_degree();
    let mut h: Vec<DVector<f64>> = vec![DVector::zeros(r); n];
    for _ in 0..p.layers {
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut acc = DVector::zeros(r);
            for &(port, u, remote) in ports.node_slots(v) {
                acc += apply_vec(p.suite.g, &h[u]) * port_weight(port, remote, dmax);
            }
            let x = DVector::from_column_slice(g.features(v));
            let z = &p.w1 * x + &p.w2 * acc;
            next.push(apply_vec(p.suite.phi, &z));
        }
        h = next;
    }
    Ok(EmbeddingTable::new(h))
}

/// Permutation-invariant aggregation of node embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReadoutMode {
    Sum,
    Mean,
    Max,
}

impl std::fmt::Display for ReadoutMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReadoutMode::Sum => write!(f, "sum"),
            ReadoutMode::Mean => write!(f, "mean"),
            ReadoutMode::Max => write!(f, "max"),
        }
    }
}

pub fn readout(table: &EmbeddingTable, mode: ReadoutMode) -> Result<DVector<f64>> {
    if table.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let dim = table.get(0).len();
    match mode {
        ReadoutMode::Sum => Ok(stable_sum(table.iter().cloned().collect(), dim)),
        ReadoutMode::Mean => {
            Ok(stable_sum(table.iter().cloned().collect(), dim) / table.len() as f64)
        }
        ReadoutMode::Max => {
            let mut acc = table.get(0).clone();
            for v in table.iter().skip(1) {
                acc.zip_apply(v, |a, b| *a = a.max(b));
            }
            Ok(acc)
        }
    }
}

/// Graph probability from a finished table: the average over nodes of
/// psi(beta' h_v).
pub fn classify_table(table: &EmbeddingTable, beta: &DVector<f64>) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let scores: Vec<f64> = table.iter().map(|h| sigmoid(beta.dot(h))).collect();
    Ok(stable_scalar_sum(scores) / table.len() as f64)
}

/// f(G) for the mean-field engine; label 1 iff f(G) > 0.5.
pub fn classify(g: &Graph, p: &GnnParams) -> Result<f64> {
    classify_table(&lu_forward(g, p)?, p.beta())
}

/// Margin p(f, y) = y(2f - 1) + (1 - y)(1 - 2f) and the ramp loss
/// loss_gamma(-p): 1 when -p > 0, 1 - p/gamma when -p in [-gamma, 0],
/// 0 below.
pub fn margin_quantities(f: f64, y: bool, gamma: f64) -> Result<(f64, f64)> {
    if gamma <= 0.0 {
        return Err(Error::InvalidSpec("margin gamma must be positive".into()));
    }
    let yf = if y { 1.0 } else { 0.0 };
    let p = yf * (2.0 * f - 1.0) + (1.0 - yf) * (1.0 - 2.0 * f);
    let a = -p;
    let loss = if a > 0.0 {
        1.0
    } else if a >= -gamma {
        1.0 + a / gamma
    } else {
        0.0
    };
    Ok((p, loss))
}

/// Structural tree evaluation: every node applies
/// phi(W1 x + W2 rho(sum_children g(value))); childless nodes evaluate to
/// phi(W1 x). This is the evaluation the perturbation lemmas speak about.
pub fn eval_tree(t: &ComputationTree, p: &GnnParams) -> Result<DVector<f64>> {
    Ok(eval_tree_parts(t, p)?.0)
}

/// Structural evaluation returning (root value, root post-aggregation
/// vector rho(sum g(child values))).
pub fn eval_tree_parts(t: &ComputationTree, p: &GnnParams) -> Result<(DVector<f64>, DVector<f64>)> {
    if t.features.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: t.features.len() });
    }
    Ok(eval_structural(t, p))
}

fn eval_structural(t: &ComputationTree, p: &GnnParams) -> (DVector<f64>, DVector<f64>) {
    let r = p.dim();
    let terms: Vec<DVector<f64>> = t
        .children
        .iter()
        .map(|c| apply_vec(p.suite.g, &eval_structural(&c.tree, p).0))
        .collect();
    let agg = apply_vec(p.suite.rho, &stable_sum(terms, r));
    let x = DVector::from_column_slice(&t.features);
    let z = &p.w1 * x + &p.w2 * &agg;
    (apply_vec(p.suite.phi, &z), agg)
}

/// Budgeted tree evaluation matching the graph engines' h0 = 0 start:
/// budget 0 evaluates to the zero vector, so evaluating a depth-L unrolled
/// tree with budget L reproduces the depth-L node embedding exactly.
pub fn eval_unrolled(t: &ComputationTree, p: &GnnParams, budget: usize) -> Result<DVector<f64>> {
    if t.features.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: t.features.len() });
    }
    Ok(eval_budget(t, p, budget))
}

fn eval_budget(t: &ComputationTree, p: &GnnParams, budget: usize) -> DVector<f64> {
    let r = p.dim();
    if budget == 0 {
        return DVector::zeros(r);
    }
    let terms: Vec<DVector<f64>> = t
        .children
        .iter()
        .map(|c| apply_vec(p.suite.g, &eval_budget(&c.tree, p, budget - 1)))
        .collect();
    let agg = apply_vec(p.suite.rho, &stable_sum(terms, r));
    let x = DVector::from_column_slice(&t.features);
    let z = &p.w1 * x + &p.w2 * agg;
    apply_vec(p.suite.phi, &z)
}
