//! Exact brute-force oracles for seven graph properties: girth,
//! circumference, diameter, radius, total number of simple cycles,
//! conjoint cycle, and maximum clique.
//!
//! Everything here is exhaustive and intended for small graphs; cycle and
//! clique oracles refuse graphs above [`MAX_EXACT_NODES`] nodes.

use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::{Serialize, Serializer};
use std::collections::{BTreeSet, VecDeque};

/// Documented limit for the exhaustive oracles.
pub const MAX_EXACT_NODES: usize = 64;

/// A length or distance that may be infinite (forests, disconnected graphs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extent {
    Finite(usize),
    Infinite,
}

impl Extent {
    pub fn is_finite(self) -> bool {
        matches!(self, Extent::Finite(_))
    }
}

impl PartialOrd for Extent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Extent::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl std::fmt::Display for Extent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extent::Finite(n) => write!(f, "{n}"),
            Extent::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Extent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extent::Finite(n) => s.serialize_u64(*n as u64),
            Extent::Infinite => s.serialize_str("inf"),
        }
    }
}

/// All seven property values for one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub girth: Extent,
    pub circumference: Extent,
    pub diameter: Extent,
    pub radius: Extent,
    pub cycle_count: usize,
    pub has_conjoint_cycle: bool,
    pub max_clique: usize,
}

impl std::fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "girth = {}", self.girth)?;
        writeln!(f, "circumference = {}", self.circumference)?;
        writeln!(f, "diameter = {}", self.diameter)?;
        writeln!(f, "radius = {}", self.radius)?;
        writeln!(f, "cycle_count = {}", self.cycle_count)?;
        writeln!(f, "has_conjoint_cycle = {}", self.has_conjoint_cycle)?;
        write!(f, "max_clique = {}", self.max_clique)
    }
}

/// One simple cycle, identified by its undirected edge set (so each cycle
/// is counted once regardless of orientation or starting point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

fn check_size(g: &Graph) -> Result<()> {
    if g.node_count() > MAX_EXACT_NODES {
        return Err(Error::SizeLimit { got: g.node_count(), limit: MAX_EXACT_NODES });
    }
    Ok(())
}

fn edge_key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Enumerates every simple cycle exactly once: each cycle is produced from
/// its smallest vertex s, walking only through vertices larger than s, and
/// the two orientations are deduplicated by requiring the first step to be
/// smaller than the last.
pub fn enumerate_simple_cycles(g: &Graph) -> Result<Vec<Cycle>> {
    check_size(g)?;
    let n = g.node_count();
    let mut cycles = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    let mut on_path = vec![false; n];

    fn dfs(
        g: &Graph,
        start: usize,
        v: usize,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        cycles: &mut Vec<Cycle>,
    ) {
        for &u in g.neighbors(v) {
            if u == start && path.len() >= 3 && path[1] < *path.last().unwrap() {
                let edges = path
                    .windows(2)
                    .map(|w| edge_key(w[0], w[1]))
                    .chain(std::iter::once(edge_key(*path.last().unwrap(), start)))
                    .collect();
                cycles.push(Cycle { vertices: path.clone(), edges });
            }
            if u > start && !on_path[u] {
                path.push(u);
                on_path[u] = true;
                dfs(g, start, u, path, on_path, cycles);
                on_path[u] = false;
                path.pop();
            }
        }
    }

    for s in 0..n {
        path.clear();
        path.push(s);
        on_path[s] = true;
        dfs(g, s, s, &mut path, &mut on_path, &mut cycles);
        on_path[s] = false;
    }
    Ok(cycles)
}

/// Length of the shortest cycle, via per-edge removal plus BFS. This is
/// the polynomial route; the enumeration in [`enumerate_simple_cycles`]
/// provides the independent cross-check.
pub fn girth(g: &Graph) -> Result<Extent> {
    let mut best = Extent::Infinite;
    for &(u, v) in g.edges() {
        if let Some(d) = bfs_distance_avoiding(g, u, v, (u, v)) {
            best = best.min(Extent::Finite(d + 1));
        }
    }
    Ok(best)
}

fn bfs_distance_avoiding(
    g: &Graph,
    from: usize,
    to: usize,
    skip: (usize, usize),
) -> Option<usize> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[from] = 0;
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if edge_key(v, u) == edge_key(skip.0, skip.1) {
                continue;
            }
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                if u == to {
                    return Some(dist[u]);
                }
                queue.push_back(u);
            }
        }
    }
    None
}

/// Length of the longest simple cycle, by exhaustive enumeration.
pub fn circumference(g: &Graph) -> Result<Extent> {
    let cycles = enumerate_simple_cycles(g)?;
    Ok(cycles
        .iter()
        .map(|c| Extent::Finite(c.vertices.len()))
        .max()
        .unwrap_or(Extent::Infinite))
}

fn bfs_all(g: &Graph, from: usize) -> Vec<usize> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[from] = 0;
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Maximum distance between any node pair; infinite iff disconnected.
pub fn diameter(g: &Graph) -> Result<Extent> {
    eccentricity_extreme(g, true)
}

/// Minimum node eccentricity; infinite iff disconnected.
pub fn radius(g: &Graph) -> Result<Extent> {
    eccentricity_extreme(g, false)
}

fn eccentricity_extreme(g: &Graph, want_max: bool) -> Result<Extent> {
    let n = g.node_count();
    if n == 0 {
        return Ok(Extent::Finite(0));
    }
    let mut extreme: Option<usize> = None;
    for v in 0..n {
        let dist = bfs_all(g, v);
        if dist.iter().any(|&d| d == usize::MAX) {
            return Ok(Extent::Infinite);
        }
        let ecc = *dist.iter().max().unwrap();
        extreme = Some(match extreme {
            None => ecc,
            Some(e) if want_max => e.max(ecc),
            Some(e) => e.min(ecc),
        });
    }
    Ok(Extent::Finite(extreme.unwrap()))
}

/// Number of distinct simple cycles (a cycle is an undirected edge set).
pub fn count_cycles(g: &Graph) -> Result<usize> {
    Ok(enumerate_simple_cycles(g)?.len())
}

/// True iff two distinct simple cycles share exactly one edge and no
/// vertex beyond that edge's endpoints (the theta shape).
pub fn has_conjoint_cycle(g: &Graph) -> Result<bool> {
    let cycles = enumerate_simple_cycles(g)?;
    for i in 0..cycles.len() {
        for j in i + 1..cycles.len() {
            if is_conjoint(&cycles[i], &cycles[j]) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn is_conjoint(a: &Cycle, b: &Cycle) -> bool {
    let shared: Vec<&(usize, usize)> = a.edges.intersection(&b.edges).collect();
    if shared.len() != 1 {
        return false;
    }
    let &&(u, v) = shared.first().unwrap();
    let va: BTreeSet<usize> = a.vertices.iter().copied().collect();
    let vb: BTreeSet<usize> = b.vertices.iter().copied().collect();
    let common: BTreeSet<usize> = va.intersection(&vb).copied().collect();
    common == BTreeSet::from([u, v])
}

/// Exact maximum clique size via Bron-Kerbosch with pivoting on bitsets.
/// An edgeless nonempty graph has max clique 1; the empty graph 0.
pub fn max_clique(g: &Graph) -> Result<usize> {
    check_size(g)?;
    let n = g.node_count();
    if n == 0 {
        return Ok(0);
    }
    let mut adj = vec![0u64; n];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let all: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0usize;
    bron_kerbosch(&adj, 0, all, 0, &mut best);
    Ok(best)
}

fn bron_kerbosch(adj: &[u64], r_count: usize, mut p: u64, mut x: u64, best: &mut usize) {
    if p == 0 && x == 0 {
        *best = (*best).max(r_count);
        return;
    }
    if r_count + (p.count_ones() as usize) <= *best {
        return;
    }
    // pivot: vertex of P | X with most neighbors in P
    let pivot = {
        let mut cand = p | x;
        let mut pv = 0usize;
        let mut pv_score = -1i64;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let score = (adj[v] & p).count_ones() as i64;
            if score > pv_score {
                pv_score = score;
                pv = v;
            }
        }
        pv
    };
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        let bit = 1u64 << v;
        bron_kerbosch(adj, r_count + 1, p & adj[v], x & adj[v], best);
        p &= !bit;
        x |= bit;
    }
}

/// `max_clique(g) >= k`.
pub fn has_k_clique(g: &Graph, k: usize) -> Result<bool> {
    Ok(max_clique(g)? >= k)
}

/// Runs every oracle and assembles the report.
pub fn property_report(g: &Graph) -> Result<PropertyReport> {
    let cycles = enumerate_simple_cycles(g)?;
    let girth_value = girth(g)?;
    let circumference_value = cycles
        .iter()
        .map(|c| Extent::Finite(c.vertices.len()))
        .max()
        .unwrap_or(Extent::Infinite);
    let mut conjoint = false;
    'outer: for i in 0..cycles.len() {
        for j in i + 1..cycles.len() {
            if is_conjoint(&cycles[i], &cycles[j]) {
                conjoint = true;
                break 'outer;
            }
        }
    }
    let report = PropertyReport {
        girth: girth_value,
        circumference: circumference_value,
        diameter: diameter(g)?,
        radius: radius(g)?,
        cycle_count: cycles.len(),
        has_conjoint_cycle: conjoint,
        max_clique: max_clique(g)?,
    };
    debug_assert!(report.girth <= report.circumference);
    debug_assert!(report.radius <= report.diameter);
    debug_assert_eq!(report.cycle_count == 0, report.girth == Extent::Infinite);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_graph(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(vec![vec![0.0]; n], &edges).unwrap()
    }

    /// Conjoint-cycle graph: edges AB, BC, CD, DA, BD.
    fn g1() -> Graph {
        Graph::new(vec![vec![0.0]; 4], &[(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)]).unwrap()
    }

    /// Two squares joined by two cross edges (the conjoint-free partner).
    fn g2() -> Graph {
        Graph::new(
            vec![vec![0.0]; 8],
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (0, 3),
                (4, 5),
                (5, 6),
                (6, 7),
                (4, 7),
                (1, 7),
                (3, 5),
            ],
        )
        .unwrap()
    }

    #[test]
    fn four_cycle_has_one_cycle() {
        let g = cycle_graph(4);
        assert_eq!(girth(&g).unwrap(), Extent::Finite(4));
        assert_eq!(circumference(&g).unwrap(), Extent::Finite(4));
        assert_eq!(count_cycles(&g).unwrap(), 1);
    }

    #[test]
    fn eight_cycle_metrics() {
        let g = cycle_graph(8);
        assert_eq!(girth(&g).unwrap(), Extent::Finite(8));
        assert_eq!(circumference(&g).unwrap(), Extent::Finite(8));
        assert_eq!(diameter(&g).unwrap(), Extent::Finite(4));
        assert_eq!(radius(&g).unwrap(), Extent::Finite(4));
        assert_eq!(count_cycles(&g).unwrap(), 1);
        assert!(!has_conjoint_cycle(&g).unwrap());
    }

    #[test]
    fn disconnected_pair_has_infinite_extent() {
        let g = cycle_graph(4).disjoint_union(&cycle_graph(4)).unwrap();
        assert_eq!(diameter(&g).unwrap(), Extent::Infinite);
        assert_eq!(radius(&g).unwrap(), Extent::Infinite);
        assert_eq!(count_cycles(&g).unwrap(), 2);
    }

    #[test]
    fn single_node_graph() {
        let g = Graph::new(vec![vec![0.0]], &[]).unwrap();
        assert_eq!(diameter(&g).unwrap(), Extent::Finite(0));
        assert_eq!(radius(&g).unwrap(), Extent::Finite(0));
        assert_eq!(girth(&g).unwrap(), Extent::Infinite);
        assert_eq!(max_clique(&g).unwrap(), 1);
    }

    #[test]
    fn conjoint_graph_values() {
        let g = g1();
        assert_eq!(girth(&g).unwrap(), Extent::Finite(3));
        assert_eq!(circumference(&g).unwrap(), Extent::Finite(4));
        assert_eq!(count_cycles(&g).unwrap(), 3);
        assert!(has_conjoint_cycle(&g).unwrap());
    }

    #[test]
    fn joined_squares_have_six_cycles_none_conjoint() {
        let g = g2();
        assert_eq!(count_cycles(&g).unwrap(), 6);
        assert!(!has_conjoint_cycle(&g).unwrap());
        // every cycle pair shares zero or at least two edges
        let cycles = enumerate_simple_cycles(&g).unwrap();
        for i in 0..cycles.len() {
            for j in i + 1..cycles.len() {
                let shared = cycles[i].edges.intersection(&cycles[j].edges).count();
                assert!(shared == 0 || shared >= 2, "pair ({i},{j}) shares {shared}");
            }
        }
    }

    #[test]
    fn clique_values() {
        // conjoint graph plus the missing diagonal is a 4-clique
        let k4 = Graph::new(
            vec![vec![0.0]; 4],
            &[(0, 1), (1, 2), (2, 3), (0, 3), (1, 3), (0, 2)],
        )
        .unwrap();
        assert_eq!(max_clique(&k4).unwrap(), 4);
        assert!(has_k_clique(&k4, 4).unwrap());
        // the squares graph plus both square diagonals stays at 3
        let g = Graph::new(
            vec![vec![0.0]; 8],
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (0, 3),
                (4, 5),
                (5, 6),
                (6, 7),
                (4, 7),
                (1, 7),
                (3, 5),
                (0, 2),
                (4, 6),
            ],
        )
        .unwrap();
        assert_eq!(max_clique(&g).unwrap(), 3);
        // edgeless
        let e = Graph::new(vec![vec![0.0]; 3], &[]).unwrap();
        assert_eq!(max_clique(&e).unwrap(), 1);
    }

    #[test]
    fn girth_agrees_with_enumeration() {
        let graphs = [g1(), g2(), cycle_graph(5), cycle_graph(8)];
        for g in &graphs {
            let by_enum = enumerate_simple_cycles(g)
                .unwrap()
                .iter()
                .map(|c| Extent::Finite(c.vertices.len()))
                .min()
                .unwrap_or(Extent::Infinite);
            assert_eq!(girth(g).unwrap(), by_enum);
        }
    }

    #[test]
    fn forest_has_no_cycles() {
        let g = Graph::new(vec![vec![0.0]; 4], &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(girth(&g).unwrap(), Extent::Infinite);
        assert_eq!(circumference(&g).unwrap(), Extent::Infinite);
        assert_eq!(count_cycles(&g).unwrap(), 0);
    }

    #[test]
    fn size_limit_enforced() {
        let g = Graph::new(vec![vec![0.0]; 65], &[]).unwrap();
        assert!(matches!(count_cycles(&g), Err(Error::SizeLimit { .. })));
        assert!(matches!(max_clique(&g), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn report_on_conjoint_graph() {
        let r = property_report(&g1()).unwrap();
        assert_eq!(r.girth, Extent::Finite(3));
        assert_eq!(r.circumference, Extent::Finite(4));
        assert_eq!(r.cycle_count, 3);
        assert!(r.has_conjoint_cycle);
        assert_eq!(r.max_clique, 3);
    }

    #[test]
    fn cycle_count_additive_over_disjoint_union() {
        let a = g1();
        let b = cycle_graph(5);
        let u = a.disjoint_union(&b).unwrap();
        assert_eq!(
            count_cycles(&u).unwrap(),
            count_cycles(&a).unwrap() + count_cycles(&b).unwrap()
        );
    }
}
