//! Toolkit for probing what message-passing graph networks can and cannot
//! tell apart, together with a closed-form evaluator for their Rademacher
//! generalization bounds.
//!
//! The crate is organized around a small immutable [`graph::Graph`] type that
//! optionally carries node positions and a consistent port numbering, so the
//! same graph value feeds four different forward passes:
//!
//! - [`engines::lu_forward`] — locally unordered mean-field updates,
//! - [`engines::cpn_forward`] — port-ordered aggregation,
//! - [`engines::dime_forward`] — directional edge messages using distances
//!   and inter-edge angles,
//! - [`engines::hdcpn_forward`] — port-ordered combination of directional
//!   messages refined by dihedral plane angles.
//!
//! Around the engines sit exact brute-force property oracles
//! ([`properties`]), a port-aware refinement decision procedure
//! ([`isomorphism`]), a corpus of hand-built graph pairs with declared
//! expected verdicts ([`corpus`]), randomized distinguishability trials
//! ([`distinguish`]), the bound calculator and its empirical soundness
//! checks ([`bounds`]), and an exact-rational injective aggregation of
//! port-numbered messages ([`port_agg`]).

pub mod bounds;
pub mod corpus;
pub mod distinguish;
pub mod engines;
pub mod error;
pub mod graph;
pub mod io;
pub mod isomorphism;
pub mod port_agg;
pub mod properties;
pub mod reproduce;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{Graph, PortNumbering};
