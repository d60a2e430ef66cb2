//! Undirected graphs with per-node feature vectors, optional 3D positions,
//! and an optional port numbering.
//!
//! Graphs are immutable after construction. Ports, positions, and edge
//! features are optional layers so one graph value serves every engine.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Per-node assignment of ports `1..=degree(v)` to incident edges.
///
/// Stored as raw slots so that inconsistent numberings can be represented
/// and reported by [`validate_ports`]; everything downstream assumes the
/// numbering has passed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortNumbering {
    /// `slots[v]` lists `(local_port, neighbor, remote_port)`.
    slots: Vec<Vec<(usize, usize, usize)>>,
}

impl PortNumbering {
    /// Builds a numbering from per-edge port pairs: `ports[e] = (pu, pv)`
    /// assigns port `pu` at `edges[e].0` and `pv` at `edges[e].1`.
    /// Reciprocity holds by construction; per-node bijectivity may not.
    pub fn from_edge_ports(
        node_count: usize,
        edges: &[(usize, usize)],
        ports: &[(usize, usize)],
    ) -> Result<Self> {
        if edges.len() != ports.len() {
            return Err(Error::InvalidGraph(format!(
                "{} edges but {} port pairs",
                edges.len(),
                ports.len()
            )));
        }
        let mut slots = vec![Vec::new(); node_count];
        for (&(u, v), &(pu, pv)) in edges.iter().zip(ports.iter()) {
            if u >= node_count {
                return Err(Error::NodeOutOfRange(u));
            }
            if v >= node_count {
                return Err(Error::NodeOutOfRange(v));
            }
            slots[u].push((pu, v, pv));
            slots[v].push((pv, u, pu));
        }
        for node in &mut slots {
            node.sort_unstable();
        }
        Ok(Self { slots })
    }

    /// Builds a numbering from raw slots `(local_port, neighbor,
    /// remote_port)` per node. Unlike [`Self::from_edge_ports`] this can
    /// represent non-reciprocal assignments.
    pub fn from_raw(slots: Vec<Vec<(usize, usize, usize)>>) -> Self {
        let mut slots = slots;
        for node in &mut slots {
            node.sort_unstable();
        }
        Self { slots }
    }

    pub fn node_count(&self) -> usize {
        self.slots.len()
    }

    /// `p(v, port)` as `(neighbor, remote_port)`, if the slot exists.
    pub fn lookup(&self, v: usize, port: usize) -> Option<(usize, usize)> {
        self.slots
            .get(v)?
            .iter()
            .find(|&&(p, _, _)| p == port)
            .map(|&(_, u, r)| (u, r))
    }

    /// All slots of `v` sorted by local port.
    pub fn node_slots(&self, v: usize) -> &[(usize, usize, usize)] {
        &self.slots[v]
    }

    /// Port pair `(port at u, port at v)` of edge `{u, v}`, if assigned.
    pub fn edge_ports(&self, u: usize, v: usize) -> Option<(usize, usize)> {
        self.slots
            .get(u)?
            .iter()
            .find(|&&(_, w, _)| w == v)
            .map(|&(p, _, r)| (p, r))
    }
}

/// One defect found by [`validate_ports`], anchored at `(node, port)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortViolation {
    pub node: usize,
    pub port: usize,
    pub message: String,
}

impl std::fmt::Display for PortViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(node {}, port {}): {}", self.node, self.port, self.message)
    }
}

/// Immutable undirected graph. No self-loops, no parallel edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    features: Vec<Vec<f64>>,
    positions: Option<Vec<[f64; 3]>>,
    edges: Vec<(usize, usize)>,
    edge_features: Option<Vec<Vec<f64>>>,
    ports: Option<PortNumbering>,
    feature_bound: Option<f64>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Creates a graph from per-node feature vectors and an edge list.
    /// Edges are normalized to `u < v` and sorted; duplicates and
    /// self-loops are rejected.
    pub fn new(features: Vec<Vec<f64>>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = features.len();
        let dim = features.first().map(|f| f.len()).unwrap_or(0);
        for (v, f) in features.iter().enumerate() {
            if f.len() != dim {
                return Err(Error::InvalidGraph(format!(
                    "node {v} has feature dimension {} but node 0 has {dim}",
                    f.len()
                )));
            }
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::NodeOutOfRange(u));
            }
            if v >= n {
                return Err(Error::NodeOutOfRange(v));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self {
            features,
            positions: None,
            edges: norm,
            edge_features: None,
            ports: None,
            feature_bound: None,
            adj,
        })
    }

    /// Attaches one 3D position per node.
    pub fn with_positions(mut self, positions: Vec<[f64; 3]>) -> Result<Self> {
        if positions.len() != self.node_count() {
            return Err(Error::InvalidGraph(format!(
                "{} positions for {} nodes",
                positions.len(),
                self.node_count()
            )));
        }
        self.positions = Some(positions);
        Ok(self)
    }

    /// Attaches a port numbering. Consistency is not checked here; call
    /// [`validate_ports`] (engines do so on entry).
    pub fn with_ports(mut self, ports: PortNumbering) -> Result<Self> {
        if ports.node_count() != self.node_count() {
            return Err(Error::InvalidGraph(format!(
                "port table covers {} nodes, graph has {}",
                ports.node_count(),
                self.node_count()
            )));
        }
        self.ports = Some(ports);
        Ok(self)
    }

    /// Attaches per-edge feature vectors, parallel to [`Self::edges`].
    pub fn with_edge_features(mut self, feats: Vec<Vec<f64>>) -> Result<Self> {
        if feats.len() != self.edges.len() {
            return Err(Error::InvalidGraph(format!(
                "{} edge feature vectors for {} edges",
                feats.len(),
                self.edges.len()
            )));
        }
        self.edge_features = Some(feats);
        Ok(self)
    }

    /// Declares a feature norm cap and checks every node against it.
    pub fn with_feature_bound(mut self, bound: f64) -> Result<Self> {
        for (v, f) in self.features.iter().enumerate() {
            let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > bound + 1e-12 {
                return Err(Error::InvalidGraph(format!(
                    "node {v} has feature norm {norm} above declared bound {bound}"
                )));
            }
        }
        self.feature_bound = Some(bound);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.features.len()
    }

    /// Shared feature dimension r.
    pub fn dim(&self) -> usize {
        self.features.first().map(|f| f.len()).unwrap_or(0)
    }

    pub fn features(&self, v: usize) -> &[f64] {
        &self.features[v]
    }

    pub fn all_features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    pub fn position(&self, v: usize) -> Option<[f64; 3]> {
        self.positions.as_ref().map(|p| p[v])
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_features(&self) -> Option<&[Vec<f64>]> {
        self.edge_features.as_deref()
    }

    pub fn ports(&self) -> Option<&PortNumbering> {
        self.ports.as_ref()
    }

    pub fn feature_bound(&self) -> Option<f64> {
        self.feature_bound
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|a| a.binary_search(&v).is_ok())
    }

    /// Relabels nodes by `perm` (node v becomes `perm[v]`), carrying every
    /// attached layer along. Ports are relabeled consistently.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::InvalidGraph("permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidGraph("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut features = vec![Vec::new(); n];
        for v in 0..n {
            features[perm[v]] = self.features[v].clone();
        }
        let edges: Vec<(usize, usize)> =
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        // edge features must follow the re-sorted edge order
        let mut g = Graph::new(features, &edges)?;
        if let Some(pos) = &self.positions {
            let mut p2 = vec![[0.0; 3]; n];
            for v in 0..n {
                p2[perm[v]] = pos[v];
            }
            g = g.with_positions(p2)?;
        }
        if let Some(ef) = &self.edge_features {
            let mut keyed: Vec<((usize, usize), Vec<f64>)> = self
                .edges
                .iter()
                .zip(ef.iter())
                .map(|(&(u, v), f)| {
                    let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
                    ((a, b), f.clone())
                })
                .collect();
            keyed.sort_by_key(|(k, _)| *k);
            g = g.with_edge_features(keyed.into_iter().map(|(_, f)| f).collect())?;
        }
        if let Some(ports) = &self.ports {
            let mut slots = vec![Vec::new(); n];
            for v in 0..n {
                for &(p, u, r) in ports.node_slots(v) {
                    slots[perm[v]].push((p, perm[u], r));
                }
            }
            g = g.with_ports(PortNumbering::from_raw(slots))?;
        }
        if let Some(b) = self.feature_bound {
            g = g.with_feature_bound(b)?;
        }
        Ok(g)
    }

    /// Zero-pads every feature vector to dimension `r`.
    pub fn with_feature_dim(&self, r: usize) -> Result<Self> {
        let dim = self.dim();
        if r < dim {
            return Err(Error::DimensionMismatch { expected: dim, got: r });
        }
        if r == dim {
            return Ok(self.clone());
        }
        let mut g = self.clone();
        for f in &mut g.features {
            f.resize(r, 0.0);
        }
        Ok(g)
    }

    /// Disjoint union; the nodes of `other` are shifted by `self.node_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        let off = self.node_count();
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let mut features = self.features.clone();
        features.extend(other.features.iter().cloned());
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + off, v + off)));
        let mut g = Graph::new(features, &edges)?;
        match (&self.positions, &other.positions) {
            (Some(a), Some(b)) => {
                let mut pos = a.clone();
                pos.extend(b.iter().copied());
                g = g.with_positions(pos)?;
            }
            (None, None) => {}
            _ => return Err(Error::InvalidGraph("positions present on only one operand".into())),
        }
        match (&self.ports, &other.ports) {
            (Some(a), Some(b)) => {
                let mut slots: Vec<Vec<(usize, usize, usize)>> = Vec::new();
                for v in 0..off {
                    slots.push(a.node_slots(v).to_vec());
                }
                for v in 0..other.node_count() {
                    slots.push(
                        b.node_slots(v).iter().map(|&(p, u, r)| (p, u + off, r)).collect(),
                    );
                }
                g = g.with_ports(PortNumbering::from_raw(slots))?;
            }
            (None, None) => {}
            _ => return Err(Error::InvalidGraph("ports present on only one operand".into())),
        }
        Ok(g)
    }
}

/// Checks that the attached numbering is a consistent port numbering.
/// Returns the (possibly empty) list of violations, or an error when the
/// graph carries no numbering at all.
pub fn validate_ports(g: &Graph) -> Result<Vec<PortViolation>> {
    let ports = g.ports().ok_or(Error::MissingPorts)?;
    let mut out = Vec::new();
    for v in 0..g.node_count() {
        let deg = g.degree(v);
        let slots = ports.node_slots(v);
        let mut seen_ports: BTreeMap<usize, usize> = BTreeMap::new();
        let mut seen_neighbors: BTreeMap<usize, usize> = BTreeMap::new();
        for &(p, u, _) in slots {
            *seen_ports.entry(p).or_insert(0) += 1;
            *seen_neighbors.entry(u).or_insert(0) += 1;
        }
        for (&p, &count) in &seen_ports {
            if count > 1 {
                out.push(PortViolation {
                    node: v,
                    port: p,
                    message: format!("port {p} assigned {count} times"),
                });
            }
            if p == 0 || p > deg {
                out.push(PortViolation {
                    node: v,
                    port: p,
                    message: format!("port {p} outside 1..={deg}"),
                });
            }
        }
        for i in 1..=deg {
            if !seen_ports.contains_key(&i) {
                out.push(PortViolation {
                    node: v,
                    port: i,
                    message: format!("port {i} unassigned"),
                });
            }
        }
        for (&u, &count) in &seen_neighbors {
            if !g.has_edge(v, u) {
                out.push(PortViolation {
                    node: v,
                    port: 0,
                    message: format!("slot targets non-neighbor {u}"),
                });
            } else if count > 1 {
                out.push(PortViolation {
                    node: v,
                    port: 0,
                    message: format!("edge to {u} assigned {count} ports"),
                });
            }
        }
        for u in g.neighbors(v) {
            if !seen_neighbors.contains_key(u) {
                out.push(PortViolation {
                    node: v,
                    port: 0,
                    message: format!("edge to {u} has no port"),
                });
            }
        }
    }
    // reciprocity: p(p(v, i)) = (v, i). Dangling targets are reported at
    // the slot making the claim; a round trip that merely routes through a
    // dangling slot is that same defect seen from the other end, so it is
    // not reported again.
    let mut dangling = std::collections::BTreeSet::new();
    for v in 0..g.node_count() {
        for &(p, u, r) in ports.node_slots(v) {
            if ports.lookup(u, r).is_none() {
                dangling.insert((v, p));
                out.push(PortViolation {
                    node: v,
                    port: p,
                    message: format!("target port {r} of node {u} is undefined"),
                });
            }
        }
    }
    for v in 0..g.node_count() {
        for &(p, u, r) in ports.node_slots(v) {
            if let Some((back_node, back_port)) = ports.lookup(u, r) {
                if (back_node, back_port) != (v, p) && !dangling.contains(&(u, r)) {
                    out.push(PortViolation {
                        node: v,
                        port: p,
                        message: format!(
                            "round trip via (node {u}, port {r}) lands at (node {back_node}, port {back_port})"
                        ),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Draws a consistent port numbering uniformly at random per node,
/// deterministically for a fixed seed.
///
/// Any assignment that gives each node a bijection between `1..=degree`
/// and its incident edges is consistent, so independent per-node shuffles
/// suffice.
pub fn generate_consistent_ports(g: &Graph, seed: u64) -> PortNumbering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.node_count();
    // port_at[v] maps neighbor -> local port of v
    let mut port_at: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for v in 0..n {
        let mut nbrs = g.neighbors(v).to_vec();
        nbrs.shuffle(&mut rng);
        for (i, &u) in nbrs.iter().enumerate() {
            port_at[v].insert(u, i + 1);
        }
    }
    let mut slots = vec![Vec::new(); n];
    for v in 0..n {
        for (&u, &p) in &port_at[v] {
            slots[v].push((p, u, port_at[u][&v]));
        }
    }
    PortNumbering::from_raw(slots)
}
