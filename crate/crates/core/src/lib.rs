//! Exact-arithmetic calculator for the directed graph complex `dgraphs`.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: rationals, sparse vectors and reduced row echelon bases over ℚ.
//! * [`graph`]: admissible directed graphs, canonical forms, linear combinations
//!   and the text format used for fixtures.
//! * [`operad`]: operadic insertion, the signed pre-Lie product and the Lie bracket.
//! * [`ihx`]: slice enumeration, generalized IHX relations and quotient reduction.
//! * [`gauge`]: Maurer-Cartan residuals, the gauge action and the obstruction test.
//! * [`cobar`]: the multilinear cobar complex and the gluing map to graphs.
//! * [`rep`]: the representation on `K[x_1..x_d] ⊗ Λ[p^1..p^d]`.
//! * [`verify`]: the end-to-end verification pipeline used by the CLI.

pub mod cobar;
pub mod fixtures;
pub mod gauge;
pub mod graph;
pub mod ihx;
pub mod linalg;
pub mod operad;
pub mod rep;
pub mod verify;

pub use graph::{CanonicalGraph, DirectedGraph, GraphError, GraphSum};
pub use linalg::{Rational, RowBasis, SparseVector};
