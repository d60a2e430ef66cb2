//! The construction corpus: hand-built graph pairs with declared expected
//! verdicts per model family and expected property deltas.
//!
//! Port tables are transcribed literally from the source figures; every
//! build validates the numbering and re-derives the declared property
//! values with the exact oracles, so transcription errors cannot survive a
//! build. Node features are one-hot by letter class (nodes sharing a
//! letter share a vector, distinct letters are linearly independent).

use crate::distinguish::{Model, Verdict};
use crate::error::{Error, Result};
use crate::graph::{validate_ports, Graph, PortNumbering};
use crate::properties::{property_report, Extent, PropertyReport};
use serde::Serialize;
use std::collections::BTreeMap;

/// Which property a delta talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    Girth,
    Circumference,
    Diameter,
    Radius,
    CycleCount,
    ConjointCycle,
    MaxClique,
}

impl std::fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PropertyKind::Girth => "girth",
            PropertyKind::Circumference => "circumference",
            PropertyKind::Diameter => "diameter",
            PropertyKind::Radius => "radius",
            PropertyKind::CycleCount => "cycle_count",
            PropertyKind::ConjointCycle => "has_conjoint_cycle",
            PropertyKind::MaxClique => "max_clique",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum PropValue {
    Extent(Extent),
    Count(usize),
    Flag(bool),
}

impl std::fmt::Display for PropValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PropValue::Extent(e) => write!(f, "{e}"),
            PropValue::Count(c) => write!(f, "{c}"),
            PropValue::Flag(b) => write!(f, "{b}"),
        }
    }
}

fn extract(report: &PropertyReport, kind: PropertyKind) -> PropValue {
    match kind {
        PropertyKind::Girth => PropValue::Extent(report.girth),
        PropertyKind::Circumference => PropValue::Extent(report.circumference),
        PropertyKind::Diameter => PropValue::Extent(report.diameter),
        PropertyKind::Radius => PropValue::Extent(report.radius),
        PropertyKind::CycleCount => PropValue::Count(report.cycle_count),
        PropertyKind::ConjointCycle => PropValue::Flag(report.has_conjoint_cycle),
        PropertyKind::MaxClique => PropValue::Count(report.max_clique),
    }
}

/// Declared (property, value on graph a, value on graph b) triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertyDelta {
    pub property: PropertyKind,
    pub value_a: PropValue,
    pub value_b: PropValue,
}

/// A named pair of graphs with its expected verdict map and property
/// deltas.
#[derive(Debug, Clone)]
pub struct ConstructionPair {
    pub name: &'static str,
    pub provenance: &'static str,
    pub graph_a: Graph,
    pub graph_b: Graph,
    pub names_a: Vec<&'static str>,
    pub names_b: Vec<&'static str>,
    pub expected: BTreeMap<Model, Verdict>,
    pub deltas: Vec<PropertyDelta>,
}

impl ConstructionPair {
    /// Re-derives every declared delta with the exact oracles.
    pub fn verify_deltas(&self) -> Result<()> {
        let ra = property_report(&self.graph_a)?;
        let rb = property_report(&self.graph_b)?;
        for delta in &self.deltas {
            let got_a = extract(&ra, delta.property);
            let got_b = extract(&rb, delta.property);
            if got_a != delta.value_a || got_b != delta.value_b {
                return Err(Error::InvalidGraph(format!(
                    "{}: declared {} = ({}, {}) but oracles report ({}, {})",
                    self.name, delta.property, delta.value_a, delta.value_b, got_a, got_b
                )));
            }
        }
        Ok(())
    }
}

/// Node spec: (letter class, position).
struct NodeSpec {
    letter: char,
    pos: [f64; 3],
}

/// Builds a ported, positioned graph from letter classes and
/// (u, v, port_u, port_v) edges. Features are one-hot over `letters`.
fn build_graph(
    nodes: &[NodeSpec],
    edges: &[(usize, usize, usize, usize)],
    letters: &[char],
) -> Result<Graph> {
    let dim = letters.len();
    let features: Vec<Vec<f64>> = nodes
        .iter()
        .map(|n| {
            let mut f = vec![0.0; dim];
            let idx = letters.iter().position(|&c| c == n.letter).expect("letter registered");
            f[idx] = 1.0;
            f
        })
        .collect();
    let plain: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _, _)| (u, v)).collect();
    let g = Graph::new(features, &plain)?
        .with_positions(nodes.iter().map(|n| n.pos).collect())?
        .with_feature_bound(1.0)?;
    // Graph::new normalizes edge order; feed ports through the same order
    let mut port_pairs: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
    for &(u, v) in g.edges() {
        let &(a, _, pa, pb) = edges
            .iter()
            .find(|&&(x, y, _, _)| (x.min(y), x.max(y)) == (u, v))
            .expect("edge present");
        port_pairs.push(if a == u { (pa, pb) } else { (pb, pa) });
    }
    let numbering = PortNumbering::from_edge_ports(g.node_count(), g.edges(), &port_pairs)?;
    let g = g.with_ports(numbering)?;
    let violations = validate_ports(&g)?;
    if let Some(v) = violations.first() {
        return Err(Error::InconsistentPorts(v.to_string()));
    }
    Ok(g)
}

fn node(letter: char, x: f64, y: f64, z: f64) -> NodeSpec {
    NodeSpec { letter, pos: [x, y, z] }
}

const SQRT3_2: f64 = 0.8660254037844386;

fn hexagon_nodes() -> Vec<NodeSpec> {
    let letters = ['B', 'C', 'D', 'B', 'C', 'D'];
    (0..6)
        .map(|k| {
            let t = std::f64::consts::PI / 3.0 * k as f64;
            node(letters[k], t.cos(), t.sin(), 0.0)
        })
        .collect()
}

fn triangle_nodes() -> Vec<NodeSpec> {
    vec![
        node('B', 0.5, SQRT3_2, 0.0),
        node('D', 0.0, 0.0, 0.0),
        node('C', 1.0, 0.0, 0.0),
        node('B', 5.5, SQRT3_2, 0.0),
        node('D', 5.0, 0.0, 0.0),
        node('C', 6.0, 0.0, 0.0),
    ]
}

fn fig1_deltas() -> Vec<PropertyDelta> {
    vec![
        PropertyDelta {
            property: PropertyKind::Girth,
            value_a: PropValue::Extent(Extent::Finite(3)),
            value_b: PropValue::Extent(Extent::Finite(6)),
        },
        PropertyDelta {
            property: PropertyKind::Circumference,
            value_a: PropValue::Extent(Extent::Finite(3)),
            value_b: PropValue::Extent(Extent::Finite(6)),
        },
        PropertyDelta {
            property: PropertyKind::Diameter,
            value_a: PropValue::Extent(Extent::Infinite),
            value_b: PropValue::Extent(Extent::Finite(3)),
        },
        PropertyDelta {
            property: PropertyKind::Radius,
            value_a: PropValue::Extent(Extent::Infinite),
            value_b: PropValue::Extent(Extent::Finite(3)),
        },
        PropertyDelta {
            property: PropertyKind::CycleCount,
            value_a: PropValue::Count(2),
            value_b: PropValue::Count(1),
        },
    ]
}

/// Two ported triangles vs a six-cycle. The triangles carry different
/// numberings, so one D node's port view differs between the graphs while
/// the unordered views all match.
fn fig1() -> Result<ConstructionPair> {
    let letters = ['B', 'C', 'D'];
    // nodes 0..6: B1, D1, C1, B2, D2, C2
    let a_edges = [
        (0, 1, 1, 1), // B1-D1
        (0, 2, 2, 1), // B1-C1
        (1, 2, 2, 2), // D1-C1
        (3, 4, 1, 2), // B2-D2
        (3, 5, 2, 2), // B2-C2
        (4, 5, 1, 1), // D2-C2
    ];
    // hexagon nodes 0..6: B1, C1, D1, B2, C2, D2
    let b_edges = [
        (0, 1, 2, 1), // B1-C1
        (1, 2, 2, 2), // C1-D1
        (2, 3, 1, 1), // D1-B2
        (3, 4, 2, 2), // B2-C2
        (5, 4, 2, 1), // D2-C2
        (5, 0, 1, 1), // D2-B1
    ];
    Ok(ConstructionPair {
        name: "fig1_triangles_vs_hexagon",
        provenance: "figure 1: two triangles whose numberings differ vs a six-cycle",
        graph_a: build_graph(&triangle_nodes(), &a_edges, &letters)?,
        graph_b: build_graph(&hexagon_nodes(), &b_edges, &letters)?,
        names_a: vec!["B1", "D1", "C1", "B2", "D2", "C2"],
        names_b: vec!["B1", "C1", "D1", "B2", "C2", "D2"],
        expected: BTreeMap::from([
            (Model::Lu, Verdict::Indistinguishable),
            (Model::Cpn, Verdict::Distinguishable),
            (Model::Dime, Verdict::Distinguishable),
        ]),
        deltas: fig1_deltas(),
    })
}

/// The fig1 graphs under a different consistent numbering: the second
/// triangle now repeats the first triangle's ports, and the six-cycle is
/// renumbered to present the same local views; the pair becomes
/// port-locally isomorphic.
fn fig2() -> Result<ConstructionPair> {
    let letters = ['B', 'C', 'D'];
    let a_edges = [
        (0, 1, 1, 1), // B1-D1
        (0, 2, 2, 1), // B1-C1
        (1, 2, 2, 2), // D1-C1
        (3, 4, 1, 1), // B2-D2
        (3, 5, 2, 1), // B2-C2
        (4, 5, 2, 2), // D2-C2
    ];
    let b_edges = [
        (0, 1, 2, 1), // B1-C1
        (1, 2, 2, 2), // C1-D1
        (2, 3, 1, 1), // D1-B2
        (3, 4, 2, 1), // B2-C2
        (5, 4, 2, 2), // D2-C2
        (5, 0, 1, 1), // D2-B1
    ];
    Ok(ConstructionPair {
        name: "fig2_alternate_ports",
        provenance: "figure 2: the fig1 graphs under a different consistent numbering",
        graph_a: build_graph(&triangle_nodes(), &a_edges, &letters)?,
        graph_b: build_graph(&hexagon_nodes(), &b_edges, &letters)?,
        names_a: vec!["B1", "D1", "C1", "B2", "D2", "C2"],
        names_b: vec!["B1", "C1", "D1", "B2", "C2", "D2"],
        expected: BTreeMap::from([(Model::Cpn, Verdict::Indistinguishable)]),
        deltas: fig1_deltas(),
    })
}

/// The 4-cycle port pattern A-B (1,1), B-C (2,2), C-D (1,1), D-A (2,2).
fn square_edges(offset: usize) -> [(usize, usize, usize, usize); 4] {
    [
        (offset, offset + 1, 1, 1),
        (offset + 1, offset + 2, 2, 2),
        (offset + 2, offset + 3, 1, 1),
        (offset + 3, offset, 2, 2),
    ]
}

fn square_nodes(ox: f64) -> [NodeSpec; 4] {
    [
        node('A', ox, 0.0, 0.0),
        node('B', ox + 1.0, 0.0, 0.0),
        node('C', ox + 1.0, 1.0, 0.0),
        node('D', ox, 1.0, 0.0),
    ]
}

/// The eight-cycle ported so each letter's view matches the 4-cycle's.
fn octagon_pattern() -> [(usize, usize, usize, usize); 8] {
    [
        (0, 1, 1, 1),
        (1, 2, 2, 2),
        (2, 3, 1, 1),
        (3, 4, 2, 2),
        (4, 5, 1, 1),
        (5, 6, 2, 2),
        (6, 7, 1, 1),
        (7, 0, 2, 2),
    ]
}

fn cycle_deltas(short: usize, long: usize) -> Vec<PropertyDelta> {
    vec![
        PropertyDelta {
            property: PropertyKind::Girth,
            value_a: PropValue::Extent(Extent::Finite(short)),
            value_b: PropValue::Extent(Extent::Finite(long)),
        },
        PropertyDelta {
            property: PropertyKind::Circumference,
            value_a: PropValue::Extent(Extent::Finite(short)),
            value_b: PropValue::Extent(Extent::Finite(long)),
        },
        PropertyDelta {
            property: PropertyKind::Diameter,
            value_a: PropValue::Extent(Extent::Infinite),
            value_b: PropValue::Extent(Extent::Finite(long / 2)),
        },
        PropertyDelta {
            property: PropertyKind::Radius,
            value_a: PropValue::Extent(Extent::Infinite),
            value_b: PropValue::Extent(Extent::Finite(long / 2)),
        },
        PropertyDelta {
            property: PropertyKind::CycleCount,
            value_a: PropValue::Count(2),
            value_b: PropValue::Count(1),
        },
    ]
}

fn fig3_s4s8() -> Result<ConstructionPair> {
    let letters = ['A', 'B', 'C', 'D'];
    let mut a_nodes = Vec::new();
    a_nodes.extend(square_nodes(0.0));
    a_nodes.extend(square_nodes(5.0));
    let mut a_edges = Vec::new();
    a_edges.extend(square_edges(0));
    a_edges.extend(square_edges(4));

    // regular octagon with unit sides; letters run A,B,C,D,A,B,C,D
    let r_oct = 0.5 / (std::f64::consts::PI / 8.0).sin();
    let b_nodes: Vec<NodeSpec> = (0..8)
        .map(|k| {
            let t = std::f64::consts::PI / 4.0 * k as f64;
            node(['A', 'B', 'C', 'D'][k % 4], r_oct * t.cos(), r_oct * t.sin(), 0.0)
        })
        .collect();
    Ok(ConstructionPair {
        name: "fig3_s4s4_vs_s8",
        provenance: "figure 3: two 4-cycles vs one 8-cycle, same port-ordered views",
        graph_a: build_graph(&a_nodes, &a_edges, &letters)?,
        graph_b: build_graph(&b_nodes, &octagon_pattern(), &letters)?,
        names_a: vec!["A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2"],
        names_b: vec!["A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2"],
        expected: BTreeMap::from([
            (Model::Lu, Verdict::Indistinguishable),
            (Model::Cpn, Verdict::Indistinguishable),
            (Model::Dime, Verdict::Distinguishable),
        ]),
        deltas: cycle_deltas(4, 8),
    })
}

/// One conjoint-cycle block: the ported square plus the B-D edge on port
/// 3 at both ends, and optionally the A-C diagonal (clique variant).
fn conjoint_block(offset: usize, with_ac: bool) -> Vec<(usize, usize, usize, usize)> {
    let mut edges = square_edges(offset).to_vec();
    edges.push((offset + 1, offset + 3, 3, 3)); // B-D
    if with_ac {
        edges.push((offset, offset + 2, 3, 3)); // A-C
    }
    edges
}

/// The partner graph: two squares carrying the block's numbering, with the
/// extra edges crossing between the copies, plus optional diagonals.
fn crossed_squares(with_diagonals: bool) -> (Vec<NodeSpec>, Vec<(usize, usize, usize, usize)>) {
    let mut nodes = Vec::new();
    nodes.extend(square_nodes(0.0));
    nodes.extend(square_nodes(3.0));
    let mut edges = Vec::new();
    edges.extend(square_edges(0));
    edges.extend(square_edges(4));
    edges.push((1, 7, 3, 3)); // B1-D2
    edges.push((3, 5, 3, 3)); // D1-B2
    if with_diagonals {
        edges.push((0, 2, 3, 3)); // A1-C1
        edges.push((4, 6, 3, 3)); // A2-C2
    }
    (nodes, edges)
}

fn fig3_conjoint() -> Result<ConstructionPair> {
    let letters = ['A', 'B', 'C', 'D'];
    let mut a_nodes = Vec::new();
    a_nodes.extend(square_nodes(0.0));
    a_nodes.extend(square_nodes(3.0));
    let mut a_edges = conjoint_block(0, false);
    a_edges.extend(conjoint_block(4, false));
    let (b_nodes, b_edges) = crossed_squares(false);
    Ok(ConstructionPair {
        name: "fig3_conjoint_vs_squares",
        provenance: "figure 3: two conjoint-cycle blocks vs crossed squares without one",
        graph_a: build_graph(&a_nodes, &a_edges, &letters)?,
        graph_b: build_graph(&b_nodes, &b_edges, &letters)?,
        names_a: vec!["A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2"],
        names_b: vec!["A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2"],
        expected: BTreeMap::from([
            (Model::Lu, Verdict::Indistinguishable),
            (Model::Cpn, Verdict::Indistinguishable),
        ]),
        deltas: vec![
            PropertyDelta {
                property: PropertyKind::ConjointCycle,
                value_a: PropValue::Flag(true),
                value_b: PropValue::Flag(false),
            },
            PropertyDelta {
                property: PropertyKind::Girth,
                value_a: PropValue::Extent(Extent::Finite(3)),
                value_b: PropValue::Extent(Extent::Finite(4)),
            },
            PropertyDelta {
                property: PropertyKind::Circumference,
                value_a: PropValue::Extent(Extent::Finite(4)),
                value_b: PropValue::Extent(Extent::Finite(6)),
            },
        ],
    })
}

fn appendix_4clique() -> Result<ConstructionPair> {
    let letters = ['A', 'B', 'C', 'D'];
    let mut a_nodes = Vec::new();
    a_nodes.extend(square_nodes(0.0));
    a_nodes.extend(square_nodes(3.0));
    let mut a_edges = conjoint_block(0, true);
    a_edges.extend(conjoint_block(4, true));
    let (b_nodes, b_edges) = crossed_squares(true);
    Ok(ConstructionPair {
        name: "appendix_4clique",
        provenance: "clique variant: A-C added on port 3 everywhere; one side gains a 4-clique",
        graph_a: build_graph(&a_nodes, &a_edges, &letters)?,
        graph_b: build_graph(&b_nodes, &b_edges, &letters)?,
        names_a: vec!["A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2"],
        names_b: vec!["A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2"],
        expected: BTreeMap::from([
            (Model::Lu, Verdict::Indistinguishable),
            (Model::Cpn, Verdict::Indistinguishable),
        ]),
        deltas: vec![PropertyDelta {
            property: PropertyKind::MaxClique,
            value_a: PropValue::Count(4),
            value_b: PropValue::Count(3),
        }],
    })
}

fn fig4_cubes() -> Result<ConstructionPair> {
    let letters = ['A', 'B', 'C', 'D'];
    // two unit cubes, each carrying a 4-cycle on one face
    let mut a_nodes = Vec::new();
    a_nodes.extend(square_nodes(0.0));
    a_nodes.extend(square_nodes(10.0));
    let mut a_edges = Vec::new();
    a_edges.extend(square_edges(0));
    a_edges.extend(square_edges(4));

    // the 8-cycle wound around one unit cube: every edge has length 1 and
    // every consecutive angle is a right angle
    let cube_cycle: [[f64; 3]; 8] = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 1.0, 1.0],
        [1.0, 1.0, 1.0],
        [1.0, 0.0, 1.0],
        [0.0, 0.0, 1.0],
    ];
    let b_nodes: Vec<NodeSpec> = cube_cycle
        .iter()
        .enumerate()
        .map(|(k, &[x, y, z])| node(['A', 'B', 'C', 'D'][k % 4], x, y, z))
        .collect();
    Ok(ConstructionPair {
        name: "fig4_cubes",
        provenance: "figure 4: the fig3 cycles overlaid on unit cubes; dihedral planes differ",
        graph_a: build_graph(&a_nodes, &a_edges, &letters)?,
        graph_b: build_graph(&b_nodes, &octagon_pattern(), &letters)?,
        names_a: vec!["A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2"],
        names_b: vec!["A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2"],
        expected: BTreeMap::from([
            (Model::Dime, Verdict::Indistinguishable),
            (Model::DimePorts, Verdict::Indistinguishable),
            (Model::Hdcpn, Verdict::Distinguishable),
        ]),
        deltas: cycle_deltas(4, 8),
    })
}

/// Canonical construction names in stable order, with provenance notes.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        ("fig1_triangles_vs_hexagon", "figure 1: two triangles whose numberings differ vs a six-cycle"),
        ("fig2_alternate_ports", "figure 2: the fig1 graphs under a different consistent numbering"),
        ("fig3_s4s4_vs_s8", "figure 3: two 4-cycles vs one 8-cycle, same port-ordered views"),
        ("fig3_conjoint_vs_squares", "figure 3: two conjoint-cycle blocks vs crossed squares without one"),
        ("appendix_4clique", "clique variant: A-C added on port 3 everywhere; one side gains a 4-clique"),
        ("fig4_cubes", "figure 4: the fig3 cycles overlaid on unit cubes; dihedral planes differ"),
    ]
}

fn resolve(name: &str) -> Option<&'static str> {
    match name {
        "fig1" | "fig1_triangles_vs_hexagon" => Some("fig1_triangles_vs_hexagon"),
        "fig2" | "fig2_alternate_ports" => Some("fig2_alternate_ports"),
        "fig3_s4s8" | "fig3_s4s4_vs_s8" => Some("fig3_s4s4_vs_s8"),
        "fig3_conjoint" | "fig3_conjoint_vs_squares" => Some("fig3_conjoint_vs_squares"),
        "appendix_4clique" | "4clique" => Some("appendix_4clique"),
        "fig4" | "fig4_cubes" => Some("fig4_cubes"),
        _ => None,
    }
}

/// Builds a named pair (short aliases like "fig1" or "fig3_s4s8" work).
/// Ports are validated and every declared delta is re-derived before the
/// pair is handed out.
pub fn build(name: &str) -> Result<ConstructionPair> {
    let canonical = resolve(name).ok_or_else(|| Error::UnknownConstruction(name.to_string()))?;
    let pair = match canonical {
        "fig1_triangles_vs_hexagon" => fig1()?,
        "fig2_alternate_ports" => fig2()?,
        "fig3_s4s4_vs_s8" => fig3_s4s8()?,
        "fig3_conjoint_vs_squares" => fig3_conjoint()?,
        "appendix_4clique" => appendix_4clique()?,
        "fig4_cubes" => fig4_cubes()?,
        _ => unreachable!(),
    };
    pair.verify_deltas()?;
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_ports;
    use crate::properties::property_report;

    #[test]
    fn all_constructions_build_and_validate() {
        for (name, _) in list() {
            let pair = build(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(validate_ports(&pair.graph_a).unwrap().is_empty(), "{name}: graph a ports");
            assert!(validate_ports(&pair.graph_b).unwrap().is_empty(), "{name}: graph b ports");
            assert!(!pair.expected.is_empty());
        }
    }

    #[test]
    fn aliases_resolve() {
        for alias in ["fig1", "fig2", "fig3_s4s8", "fig3_conjoint", "appendix_4clique", "fig4"] {
            assert!(build(alias).is_ok(), "{alias}");
        }
        assert!(matches!(build("nonsense"), Err(Error::UnknownConstruction(_))));
    }

    #[test]
    fn s4s8_diameter_delta() {
        let pair = build("fig3_s4s8").unwrap();
        let d = pair.deltas.iter().find(|d| d.property == PropertyKind::Diameter).unwrap();
        assert_eq!(d.value_a, PropValue::Extent(Extent::Infinite));
        assert_eq!(d.value_b, PropValue::Extent(Extent::Finite(4)));
    }

    #[test]
    fn clique_pair_values() {
        let pair = build("appendix_4clique").unwrap();
        assert_eq!(property_report(&pair.graph_a).unwrap().max_clique, 4);
        assert_eq!(property_report(&pair.graph_b).unwrap().max_clique, 3);
    }

    #[test]
    fn cube_cycle_geometry_is_unit_and_right_angled() {
        let pair = build("fig4_cubes").unwrap();
        let g = &pair.graph_b;
        let pos = g.positions().unwrap();
        for &(u, v) in g.edges() {
            let d: f64 = (0..3).map(|i| (pos[u][i] - pos[v][i]).powi(2)).sum::<f64>().sqrt();
            assert!((d - 1.0).abs() < 1e-12, "edge ({u},{v}) has length {d}");
        }
        for v in 0..g.node_count() {
            let nbrs = g.neighbors(v);
            assert_eq!(nbrs.len(), 2);
            let a: Vec<f64> = (0..3).map(|i| pos[nbrs[0]][i] - pos[v][i]).collect();
            let b: Vec<f64> = (0..3).map(|i| pos[nbrs[1]][i] - pos[v][i]).collect();
            let dot: f64 = (0..3).map(|i| a[i] * b[i]).sum();
            assert!(dot.abs() < 1e-12, "angle at {v} is not right");
        }
    }

    #[test]
    fn letter_classes_share_features() {
        let pair = build("fig3_s4s8").unwrap();
        let ga = &pair.graph_a;
        assert_eq!(ga.features(0), ga.features(4)); // both A nodes
        assert_ne!(ga.features(0), ga.features(1));
        assert_eq!(ga.dim(), 4);
    }
}
