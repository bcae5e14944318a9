//! Combinatorics of degenerations of Jacobians and Prym varieties of nodal
//! curves with an involution: cycle lattices, monodromy forms, Delaunay and
//! semi-Delaunay decompositions, dicing conditions and one-parameter fans.
//!
//! The guide chapters below are compiled as doctests.

pub mod curve;
pub mod homology;
pub mod lattice;
pub mod linalg;
pub mod cells;
pub mod qser;
pub mod conditions;
pub mod forms;
pub mod prym;
pub mod fans;
pub mod svg;
pub mod report;

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod guide_introduction {}
#[doc = include_str!("../../../book/src/curves.md")]
pub mod guide_curves {}
#[doc = include_str!("../../../book/src/lattices.md")]
pub mod guide_lattices {}
#[doc = include_str!("../../../book/src/decompositions.md")]
pub mod guide_decompositions {}
#[doc = include_str!("../../../book/src/conditions.md")]
pub mod guide_conditions {}
#[doc = include_str!("../../../book/src/prym.md")]
pub mod guide_prym {}
#[doc = include_str!("../../../book/src/fans.md")]
pub mod guide_fans {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod guide_cli {}
