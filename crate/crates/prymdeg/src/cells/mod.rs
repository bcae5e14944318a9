//! Cell decompositions: Delaunay, dicings and lower envelopes.

pub mod decomposition;
pub mod dicing;
pub mod enumerate;
pub mod envelope;
pub mod polytope;

pub use decomposition::{delaunay, semi_delaunay, Cell, CellError, PeriodicDecomposition};
pub use dicing::{arrangement_decomposition, dicing_check, DicingVerdict, DicingWitness};
pub use envelope::{HeightFunction, Residue};
