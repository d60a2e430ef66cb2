//! Graph file format (JSON) and DOT export.
//!
//! The format mirrors the graph layers directly: a nodes array (id,
//! features, optional pos), an edges array (u, v, optional ports [pu, pv],
//! optional features), and an optional feature_bound. The writer emits
//! shortest round-trip float text, so write(read(write(g))) == write(g)
//! byte for byte.

use crate::error::{Error, Result};
use crate::graph::{validate_ports, Graph, PortNumbering};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    features: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pos: Option<[f64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    u: usize,
    v: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ports: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    features: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    feature_bound: Option<f64>,
}

/// Parses a graph from its JSON text. Port defects are rejected with a
/// diagnostic naming the offending (node, port).
pub fn graph_from_str(text: &str) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = file.nodes.len();
    let mut features: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut positions: Vec<Option<[f64; 3]>> = vec![None; n];
    for rec in &file.nodes {
        if rec.id >= n {
            return Err(Error::Parse(format!("node id {} outside 0..{}", rec.id, n)));
        }
        if features[rec.id].is_some() {
            return Err(Error::Parse(format!("duplicate node id {}", rec.id)));
        }
        features[rec.id] = Some(rec.features.clone());
        positions[rec.id] = rec.pos;
    }
    let features: Vec<Vec<f64>> = features
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| Error::Parse(format!("missing node id {i}"))))
        .collect::<Result<_>>()?;

    let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e.u, e.v)).collect();
    let mut g = Graph::new(features, &edges)?;

    let with_pos = positions.iter().filter(|p| p.is_some()).count();
    if with_pos > 0 {
        if with_pos != n {
            return Err(Error::Parse(format!(
                "positions on {with_pos} of {n} nodes; must be all or none"
            )));
        }
        g = g.with_positions(positions.into_iter().map(|p| p.unwrap()).collect())?;
    }

    let with_ports = file.edges.iter().filter(|e| e.ports.is_some()).count();
    if with_ports > 0 {
        if with_ports != file.edges.len() {
            return Err(Error::Parse(format!(
                "ports on {with_ports} of {} edges; must be all or none",
                file.edges.len()
            )));
        }
        let pairs: Vec<(usize, usize)> =
            file.edges.iter().map(|e| (e.ports.unwrap()[0], e.ports.unwrap()[1])).collect();
        let numbering = PortNumbering::from_edge_ports(n, &edges, &pairs)?;
        g = g.with_ports(numbering)?;
        let violations = validate_ports(&g)?;
        if let Some(v) = violations.first() {
            return Err(Error::InconsistentPorts(v.to_string()));
        }
    }

    let with_ef = file.edges.iter().filter(|e| e.features.is_some()).count();
    if with_ef > 0 {
        if with_ef != file.edges.len() {
            return Err(Error::Parse(format!(
                "edge features on {with_ef} of {} edges; must be all or none",
                file.edges.len()
            )));
        }
        // edge features follow the normalized edge order
        let mut keyed: Vec<((usize, usize), Vec<f64>)> = file
            .edges
            .iter()
            .map(|e| ((e.u.min(e.v), e.u.max(e.v)), e.features.clone().unwrap()))
            .collect();
        keyed.sort_by_key(|(k, _)| *k);
        g = g.with_edge_features(keyed.into_iter().map(|(_, f)| f).collect())?;
    }

    if let Some(b) = file.feature_bound {
        g = g.with_feature_bound(b)?;
    }
    Ok(g)
}

/// Serializes a graph to the JSON text format.
pub fn graph_to_string(g: &Graph) -> String {
    let nodes: Vec<NodeRecord> = (0..g.node_count())
        .map(|v| NodeRecord {
            id: v,
            features: g.features(v).to_vec(),
            pos: g.position(v),
        })
        .collect();
    let edges: Vec<EdgeRecord> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| EdgeRecord {
            u,
            v,
            ports: g.ports().and_then(|p| p.edge_ports(u, v)).map(|(pu, pv)| [pu, pv]),
            features: g.edge_features().map(|ef| ef[i].clone()),
        })
        .collect();
    let file = GraphFile { nodes, edges, feature_bound: g.feature_bound() };
    serde_json::to_string_pretty(&file).expect("graph serialization cannot fail")
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    graph_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_graph(g: &Graph, path: &Path) -> Result<()> {
    write_atomic(path, graph_to_string(g).as_bytes())
}

/// Writes via a temp file in the same directory plus rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// DOT rendering with port labels on the edge ends.
pub fn graph_to_dot(g: &Graph, name: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph {name} {{\n"));
    for v in 0..g.node_count() {
        let feat = g
            .features(v)
            .iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("  {v} [label=\"{v} [{feat}]\"];\n"));
    }
    for &(u, v) in g.edges() {
        match g.ports().and_then(|p| p.edge_ports(u, v)) {
            Some((pu, pv)) => out.push_str(&format!(
                "  {u} -- {v} [taillabel=\"{pu}\", headlabel=\"{pv}\"];\n"
            )),
            None => out.push_str(&format!("  {u} -- {v};\n")),
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_consistent_ports;

    fn sample() -> Graph {
        let g = Graph::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.25, -0.5]],
            &[(0, 1), (1, 2), (0, 2)],
        )
        .unwrap()
        .with_positions(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.8660254037844386, 0.0]])
        .unwrap();
        let ports = generate_consistent_ports(&g, 0);
        g.with_ports(ports).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = sample();
        let text = graph_to_string(&g);
        let g2 = graph_from_str(&text).unwrap();
        assert_eq!(graph_to_string(&g2), text);
        assert_eq!(g2, g);
    }

    #[test]
    fn rejects_duplicate_local_port() {
        let text = r#"{
            "nodes": [
                {"id": 0, "features": [0.0]},
                {"id": 1, "features": [0.0]},
                {"id": 2, "features": [0.0]}
            ],
            "edges": [
                {"u": 0, "v": 1, "ports": [1, 1]},
                {"u": 0, "v": 2, "ports": [1, 1]}
            ]
        }"#;
        let err = graph_from_str(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("node 0"), "diagnostic names the node: {msg}");
        assert!(msg.contains("port 1"), "diagnostic names the port: {msg}");
    }

    #[test]
    fn rejects_partial_ports() {
        let text = r#"{
            "nodes": [{"id": 0, "features": [0.0]}, {"id": 1, "features": [0.0]}, {"id": 2, "features": [0.0]}],
            "edges": [{"u": 0, "v": 1, "ports": [1, 1]}, {"u": 1, "v": 2}]
        }"#;
        assert!(graph_from_str(text).is_err());
    }

    #[test]
    fn rejects_out_of_range_port() {
        let text = r#"{
            "nodes": [{"id": 0, "features": [0.0]}, {"id": 1, "features": [0.0]}],
            "edges": [{"u": 0, "v": 1, "ports": [2, 1]}]
        }"#;
        let err = graph_from_str(text).unwrap_err();
        assert!(err.to_string().contains("port 2"));
    }

    #[test]
    fn dot_contains_port_labels() {
        let dot = graph_to_dot(&sample(), "g");
        assert!(dot.contains("taillabel"));
        assert!(dot.contains("headlabel"));
    }
}
