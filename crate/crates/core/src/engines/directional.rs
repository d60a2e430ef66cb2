//! Directional engines: edge-message passes driven by distances, angles
//! between incident edges, and (for the hybrid) dihedral angles between
//! incident planes.
//!
//! Scalar geometric features enter the r-dimensional message space through
//! four fixed orthonormal direction vectors (the first four basis
//! vectors), so the whole engine stays inside the two-matrix
//! parameterization. This is why r >= 4 is required.

use super::{
    check_consistent_ports, port_weight, stable_sum, EmbeddingTable, GnnParams,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use nalgebra::DVector;
use std::collections::BTreeMap;

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

const DEGENERATE: f64 = 1e-12;

/// Euclidean distance between two nodes.
pub fn node_distance(pos: &[[f64; 3]], u: usize, v: usize) -> f64 {
    norm3(sub(pos[u], pos[v]))
}

/// Angle wuv at u, in [0, pi]. A zero-length arm makes the angle
/// degenerate; by convention it contributes 0 (cos 1, sin 0).
pub fn angle_at(pos: &[[f64; 3]], w: usize, u: usize, v: usize) -> f64 {
    let a = sub(pos[w], pos[u]);
    let b = sub(pos[v], pos[u]);
    let (na, nb) = (norm3(a), norm3(b));
    if na < DEGENERATE || nb < DEGENERATE {
        return 0.0;
    }
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0).acos()
}

/// Unoriented angle between the planes through (w, u, v) and (u, v, z),
/// in [0, pi/2]; None when either triple is collinear (no plane).
fn plane_angle(pos: &[[f64; 3]], w: usize, u: usize, v: usize, z: usize) -> Option<f64> {
    let n1 = cross(sub(pos[u], pos[w]), sub(pos[v], pos[w]));
    let n2 = cross(sub(pos[v], pos[u]), sub(pos[z], pos[u]));
    let (l1, l2) = (norm3(n1), norm3(n2));
    if l1 < DEGENERATE || l2 < DEGENERATE {
        return None;
    }
    Some((dot(n1, n2).abs() / (l1 * l2)).clamp(0.0, 1.0).acos())
}

/// Dihedral angle multiset Phi_uv of the ordered edge (u, v): one angle
/// per (w, z) with w a neighbor of u other than v and z a neighbor of v
/// other than u, skipping degenerate planes. Sorted ascending.
pub fn dihedral_angles(g: &Graph, u: usize, v: usize) -> Result<Vec<f64>> {
    let pos = g.positions().ok_or(Error::MissingPositions)?;
    let mut out = Vec::new();
    for &w in g.neighbors(u) {
        if w == v {
            continue;
        }
        for &z in g.neighbors(v) {
            if z == u {
                continue;
            }
            if let Some(a) = plane_angle(pos, w, u, v, z) {
                out.push(a);
            }
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

/// All geometric features of the ordered edge (u, v): the distance, the
/// per-wing (angle wuv, distance wu) pairs, and the dihedral multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricFeatures {
    pub distance: f64,
    /// One entry per neighbor w of u other than v.
    pub wing: Vec<(f64, f64)>,
    pub dihedrals: Vec<f64>,
}

pub fn edge_geometry(g: &Graph, u: usize, v: usize) -> Result<GeometricFeatures> {
    let pos = g.positions().ok_or(Error::MissingPositions)?;
    let wing = g
        .neighbors(u)
        .iter()
        .filter(|&&w| w != v)
        .map(|&w| (angle_at(pos, w, u, v), node_distance(pos, w, u)))
        .collect();
    Ok(GeometricFeatures {
        distance: node_distance(pos, u, v),
        wing,
        dihedrals: dihedral_angles(g, u, v)?,
    })
}

fn check_directional(g: &Graph, p: &GnnParams) -> Result<()> {
    if g.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: g.dim() });
    }
    if p.dim() < 4 {
        return Err(Error::DimensionTooSmall(p.dim()));
    }
    if g.positions().is_none() {
        return Err(Error::MissingPositions);
    }
    Ok(())
}

fn basis(r: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(r);
    e[i] = 1.0;
    e
}

fn phi(p: &GnnParams, v: DVector<f64>) -> DVector<f64> {
    v.map(|x| p.suite.phi.apply(x))
}

struct MessageState {
    /// Ordered edges (u, v), lexicographic.
    edges: Vec<(usize, usize)>,
    index: BTreeMap<(usize, usize), usize>,
    values: Vec<DVector<f64>>,
}

impl MessageState {
    fn init(g: &Graph, p: &GnnParams) -> Self {
        let pos = g.positions().expect("checked by caller");
        let mut edges = Vec::new();
        for &(a, b) in g.edges() {
            edges.push((a, b));
            edges.push((b, a));
        }
        edges.sort_unstable();
        let index: BTreeMap<(usize, usize), usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let r = p.dim();
        let e0 = basis(r, 0);
        let values = edges
            .iter()
            .map(|&(u, v)| {
                let x = DVector::from_column_slice(g.features(u))
                    + DVector::from_column_slice(g.features(v));
                phi(p, p.w1() * x + &e0 * node_distance(pos, u, v))
            })
            .collect();
        Self { edges, index, values }
    }

    fn get(&self, u: usize, v: usize) -> &DVector<f64> {
        &self.values[self.index[&(u, v)]]
    }

    /// One directional round: m_uv <- f1(m_uv, sum_w f2(m_wu, ...)).
    fn step(&mut self, g: &Graph, p: &GnnParams) {
        let pos = g.positions().expect("checked by caller");
        let r = p.dim();
        let (e0, e1, e2, e3) = (basis(r, 0), basis(r, 1), basis(r, 2), basis(r, 3));
        let mut next = Vec::with_capacity(self.values.len());
        for &(u, v) in &self.edges {
            let e_uv = node_distance(pos, u, v);
            let terms: Vec<DVector<f64>> = g
                .neighbors(u)
                .iter()
                .filter(|&&w| w != v)
                .map(|&w| {
                    let ang = angle_at(pos, w, u, v);
                    let z = p.w2() * self.get(w, u)
                        + &e0 * e_uv
                        + &e1 * ang.cos()
                        + &e2 * ang.sin()
                        + &e3 * node_distance(pos, w, u);
                    phi(p, z)
                })
                .collect();
            let mtilde = stable_sum(terms, r);
            next.push(phi(p, p.w1() * self.get(u, v) + p.w2() * mtilde));
        }
        self.values = next;
    }
}

/// Directional message pass: after `layers` rounds the node embedding is
/// the sum of its incoming messages.
pub fn dime_forward(g: &Graph, p: &GnnParams) -> Result<EmbeddingTable> {
    check_directional(g, p)?;
    let mut state = MessageState::init(g, p);
    for _ in 0..p.layers {
        state.step(g, p);
    }
    let r = p.dim();
    let table = (0..g.node_count())
        .map(|v| {
            let incoming: Vec<DVector<f64>> =
                g.neighbors(v).iter().map(|&u| state.get(u, v).clone()).collect();
            stable_sum(incoming, r)
        })
        .collect();
    Ok(EmbeddingTable::new(table))
}

/// Dihedral refinement of a message:
/// phi(W1 m + e1 sum cos(alpha) + e2 sum sin(alpha)) over Phi_uv.
fn refine_message(
    p: &GnnParams,
    m: &DVector<f64>,
    dihedrals: &[f64],
    e1: &DVector<f64>,
    e2: &DVector<f64>,
) -> DVector<f64> {
    let cos_sum: f64 = dihedrals.iter().map(|a| a.cos()).sum();
    let sin_sum: f64 = dihedrals.iter().map(|a| a.sin()).sum();
    phi(p, p.w1() * m + e1 * cos_sum + e2 * sin_sum)
}

fn port_combined_forward(g: &Graph, p: &GnnParams, use_dihedrals: bool) -> Result<EmbeddingTable> {
    check_directional(g, p)?;
    check_consistent_ports(g)?;
    let ports = g.ports().ok_or(Error::MissingPorts)?;
    let n = g.node_count();
    let r = p.dim();
    let dmax = g.max_degree();
    let (e1, e2) = (basis(r, 1), basis(r, 2));

    let mut state = MessageState::init(g, p);
    let dihedrals: Vec<Vec<f64>> = if use_dihedrals {
        state
            .edges
            .iter()
            .map(|&(u, v)| dihedral_angles(g, u, v))
            .collect::<Result<_>>()?
    } else {
        vec![Vec::new(); state.edges.len()]
    };

    let mut h: Vec<DVector<f64>> = vec![DVector::zeros(r); n];
    for layer in 1..=p.layers {
        let refined: Vec<DVector<f64>> = state
            .values
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if use_dihedrals {
                    refine_message(p, m, &dihedrals[i], &e1, &e2)
                } else {
                    m.clone()
                }
            })
            .collect();
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut acc = DVector::zeros(r);
            for &(port, u, remote) in ports.node_slots(v) {
                let m = &refined[state.index[&(u, v)]];
                acc += m.map(|x| p.suite.g.apply(x)) * port_weight(port, remote, dmax);
            }
            next.push(phi(p, p.w1() * &h[v] + p.w2() * acc));
        }
        h = next;
        if layer < p.layers {
            state.step(g, p);
        }
    }
    Ok(EmbeddingTable::new(h))
}

/// Hybrid pass: directional messages refined by dihedral plane angles,
/// combined in port order.
pub fn hdcpn_forward(g: &Graph, p: &GnnParams) -> Result<EmbeddingTable> {
    port_combined_forward(g, p, true)
}

/// Directional messages combined in port order, without the dihedral
/// refinement. This isolates what the port numbering alone adds.
pub fn dime_ports_forward(g: &Graph, p: &GnnParams) -> Result<EmbeddingTable> {
    port_combined_forward(g, p, false)
}
