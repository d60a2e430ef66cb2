//! Computation trees: depth-L unrollings of node neighborhoods, canonical
//! keys for grouping them, and the per-graph tree distribution.

use crate::error::{Error, Result};
use crate::graph::Graph;
use std::collections::BTreeMap;

/// One child edge of a computation tree node. `ports` carries
/// `(local_port, remote_port)` when the source graph is ported.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeChild {
    pub ports: Option<(usize, usize)>,
    pub tree: ComputationTree,
}

/// Depth-L unrolled neighborhood of a node.
///
/// Children follow the local port order when ports are present, ascending
/// neighbor order otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputationTree {
    pub features: Vec<f64>,
    pub children: Vec<TreeChild>,
    pub depth: usize,
}

impl ComputationTree {
    pub fn leaf(features: Vec<f64>) -> Self {
        Self { features, children: Vec::new(), depth: 0 }
    }

    /// Number of tree nodes, root included. For an unrolled tree this
    /// equals the number of walks of length <= depth from the root.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.tree.size()).sum::<usize>()
    }
}

/// Unrolls the `depth`-hop neighborhood of `root`: the children of a tree
/// node for graph node u are exactly the neighbors of u (the walk may turn
/// back), recursing to depth - 1.
pub fn unroll_tree(g: &Graph, root: usize, depth: usize) -> Result<ComputationTree> {
    if root >= g.node_count() {
        return Err(Error::NodeOutOfRange(root));
    }
    Ok(unroll(g, root, depth))
}

fn unroll(g: &Graph, v: usize, depth: usize) -> ComputationTree {
    let mut children = Vec::new();
    if depth > 0 {
        match g.ports() {
            Some(ports) => {
                for &(p, u, r) in ports.node_slots(v) {
                    children.push(TreeChild {
                        ports: Some((p, r)),
                        tree: unroll(g, u, depth - 1),
                    });
                }
            }
            None => {
                for &u in g.neighbors(v) {
                    children.push(TreeChild { ports: None, tree: unroll(g, u, depth - 1) });
                }
            }
        }
    }
    ComputationTree { features: g.features(v).to_vec(), children, depth }
}

/// Opaque canonical key: equal keys iff the trees are equal up to
/// reordering of unlabeled children. Port-labeled children are ordered by
/// local port and not otherwise reordered. Content-based, so stable across
/// runs and comparable across graphs.
pub type TreeKey = Vec<u8>;

pub fn canonical_tree_key(t: &ComputationTree) -> TreeKey {
    let mut buf = Vec::new();
    write_key(t, &mut buf);
    buf
}

fn write_key(t: &ComputationTree, buf: &mut Vec<u8>) {
    buf.extend_from_slice(&(t.features.len() as u32).to_le_bytes());
    for &x in &t.features {
        buf.extend_from_slice(&x.to_bits().to_le_bytes());
    }
    let mut labeled: Vec<(usize, usize, Vec<u8>)> = Vec::new();
    let mut unlabeled: Vec<Vec<u8>> = Vec::new();
    for child in &t.children {
        let mut k = Vec::new();
        write_key(&child.tree, &mut k);
        match child.ports {
            Some((p, r)) => labeled.push((p, r, k)),
            None => unlabeled.push(k),
        }
    }
    labeled.sort();
    unlabeled.sort();
    buf.extend_from_slice(&(t.children.len() as u32).to_le_bytes());
    for (p, r, k) in labeled {
        buf.push(1);
        buf.extend_from_slice(&(p as u32).to_le_bytes());
        buf.extend_from_slice(&(r as u32).to_le_bytes());
        buf.extend_from_slice(&(k.len() as u32).to_le_bytes());
        buf.extend_from_slice(&k);
    }
    for k in unlabeled {
        buf.push(0);
        buf.extend_from_slice(&(k.len() as u32).to_le_bytes());
        buf.extend_from_slice(&k);
    }
}

/// One equivalence class of computation trees in a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionEntry {
    pub key: TreeKey,
    pub count: usize,
    pub weight: f64,
    /// Some node whose unrolled tree realizes this class.
    pub representative: usize,
}

/// Empirical distribution of depth-L computation trees over the nodes of a
/// graph. Weights are counts over node_count and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeDistribution {
    pub entries: Vec<DistributionEntry>,
    pub depth: usize,
    pub node_count: usize,
    pub graph_id: Option<String>,
}

pub fn tree_distribution(g: &Graph, depth: usize) -> Result<TreeDistribution> {
    let n = g.node_count();
    let mut groups: BTreeMap<TreeKey, (usize, usize)> = BTreeMap::new();
    for v in 0..n {
        let key = canonical_tree_key(&unroll_tree(g, v, depth)?);
        let entry = groups.entry(key).or_insert((0, v));
        entry.0 += 1;
    }
    let entries = groups
        .into_iter()
        .map(|(key, (count, representative))| DistributionEntry {
            key,
            count,
            weight: count as f64 / n as f64,
            representative,
        })
        .collect();
    Ok(TreeDistribution { entries, depth, node_count: n, graph_id: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_consistent_ports, Graph};

    fn cycle(n: usize, features: Vec<Vec<f64>>) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(features, &edges).unwrap()
    }

    #[test]
    fn depth_zero_is_a_single_node() {
        let g = cycle(8, (0..8).map(|i| vec![i as f64]).collect());
        let t = unroll_tree(&g, 3, 0).unwrap();
        assert_eq!(t.size(), 1);
        assert_eq!(t.features, vec![3.0]);
    }

    #[test]
    fn cycle_unrolls_to_binary_branching() {
        let g = cycle(8, vec![vec![1.0]; 8]);
        let t = unroll_tree(&g, 0, 2).unwrap();
        assert_eq!(t.children.len(), 2);
        for c in &t.children {
            assert_eq!(c.tree.children.len(), 2);
        }
        // walks of length <= 2 from a cycle node: 1 + 2 + 4
        assert_eq!(t.size(), 7);
    }

    #[test]
    fn triangle_unroll_revisits_the_root() {
        let g = cycle(3, vec![vec![10.0], vec![20.0], vec![30.0]]);
        let t = unroll_tree(&g, 0, 2).unwrap();
        assert_eq!(t.children.len(), 2);
        for c in &t.children {
            assert_eq!(c.tree.children.len(), 2);
            assert!(c.tree.children.iter().any(|cc| cc.tree.features == vec![10.0]));
        }
    }

    #[test]
    fn walk_count_matches_adjacency_powers() {
        // 4-cycle plus a chord
        let g = Graph::new(vec![vec![0.0]; 4], &[(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)]).unwrap();
        let n = g.node_count();
        let mut a = vec![vec![0u64; n]; n];
        for &(u, v) in g.edges() {
            a[u][v] = 1;
            a[v][u] = 1;
        }
        let depth = 3;
        for root in 0..n {
            // walks of length <= depth from root via repeated mat-vec
            let mut vec_cur = vec![0u64; n];
            vec_cur[root] = 1;
            let mut total = 1u64;
            for _ in 0..depth {
                let mut next = vec![0u64; n];
                for i in 0..n {
                    for j in 0..n {
                        next[j] += vec_cur[i] * a[i][j];
                    }
                }
                total += next.iter().sum::<u64>();
                vec_cur = next;
            }
            let t = unroll_tree(&g, root, depth).unwrap();
            assert_eq!(t.size() as u64, total, "root {root}");
        }
    }

    #[test]
    fn unlabeled_children_compare_as_multisets() {
        let a = ComputationTree::leaf(vec![1.0]);
        let b = ComputationTree::leaf(vec![2.0]);
        let t1 = ComputationTree {
            features: vec![0.0],
            children: vec![
                TreeChild { ports: None, tree: a.clone() },
                TreeChild { ports: None, tree: b.clone() },
            ],
            depth: 1,
        };
        let t2 = ComputationTree {
            features: vec![0.0],
            children: vec![
                TreeChild { ports: None, tree: b },
                TreeChild { ports: None, tree: a },
            ],
            depth: 1,
        };
        assert_eq!(canonical_tree_key(&t1), canonical_tree_key(&t2));
    }

    #[test]
    fn labeled_children_keep_port_order() {
        let a = ComputationTree::leaf(vec![1.0]);
        let b = ComputationTree::leaf(vec![2.0]);
        let t1 = ComputationTree {
            features: vec![0.0],
            children: vec![
                TreeChild { ports: Some((1, 1)), tree: a.clone() },
                TreeChild { ports: Some((2, 1)), tree: b.clone() },
            ],
            depth: 1,
        };
        let t2 = ComputationTree {
            features: vec![0.0],
            children: vec![
                TreeChild { ports: Some((1, 1)), tree: b },
                TreeChild { ports: Some((2, 1)), tree: a },
            ],
            depth: 1,
        };
        assert_ne!(canonical_tree_key(&t1), canonical_tree_key(&t2));
    }

    #[test]
    fn equal_single_node_trees_share_a_key() {
        let a = ComputationTree::leaf(vec![0.5, -0.5]);
        let b = ComputationTree::leaf(vec![0.5, -0.5]);
        assert_eq!(canonical_tree_key(&a), canonical_tree_key(&b));
    }

    #[test]
    fn colored_eight_cycle_has_four_classes_at_depth_one() {
        // features repeat with period 4 (letter classes A, B, C, D)
        let feats: Vec<Vec<f64>> = (0..8)
            .map(|i| {
                let mut f = vec![0.0; 4];
                f[i % 4] = 1.0;
                f
            })
            .collect();
        let g = cycle(8, feats);
        let dist = tree_distribution(&g, 1).unwrap();
        assert_eq!(dist.entries.len(), 4);
        for e in &dist.entries {
            assert_eq!(e.count, 2);
            assert!((e.weight - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_cycle_has_one_class() {
        let g = cycle(8, vec![vec![1.0]; 8]);
        let dist = tree_distribution(&g, 1).unwrap();
        assert_eq!(dist.entries.len(), 1);
        assert_eq!(dist.entries[0].weight, 1.0);
    }

    #[test]
    fn two_disjoint_triangles_match_a_single_triangle() {
        let t1 = cycle(3, vec![vec![1.0]; 3]);
        let t2 = t1.disjoint_union(&t1).unwrap();
        for depth in 0..4 {
            let d1 = tree_distribution(&t1, depth).unwrap();
            let d2 = tree_distribution(&t2, depth).unwrap();
            assert_eq!(d1.entries.len(), d2.entries.len());
            for (a, b) in d1.entries.iter().zip(d2.entries.iter()) {
                assert_eq!(a.key, b.key);
                assert_eq!(a.weight, b.weight);
            }
        }
    }

    #[test]
    fn depth_zero_distribution_is_the_feature_distribution() {
        let g = Graph::new(
            vec![vec![1.0], vec![2.0], vec![1.0], vec![2.0]],
            &[(0, 1), (1, 2), (2, 3)],
        )
        .unwrap();
        let dist = tree_distribution(&g, 0).unwrap();
        assert_eq!(dist.entries.len(), 2);
        for e in &dist.entries {
            assert_eq!(e.count, 2);
        }
    }

    #[test]
    fn weights_are_multiples_of_inverse_node_count() {
        let g = cycle(6, (0..6).map(|i| vec![(i % 2) as f64]).collect());
        let dist = tree_distribution(&g, 2).unwrap();
        let total: f64 = dist.entries.iter().map(|e| e.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for e in &dist.entries {
            let scaled = e.weight * g.node_count() as f64;
            assert!((scaled - scaled.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn ported_unroll_labels_edges() {
        let g = cycle(4, vec![vec![0.0]; 4]);
        let g = g.clone().with_ports(generate_consistent_ports(&g, 0)).unwrap();
        let t = unroll_tree(&g, 0, 1).unwrap();
        assert_eq!(t.children.len(), 2);
        assert_eq!(t.children[0].ports.map(|(p, _)| p), Some(1));
        assert_eq!(t.children[1].ports.map(|(p, _)| p), Some(2));
    }
}
