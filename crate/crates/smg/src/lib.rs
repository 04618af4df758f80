//! Spherical matchstick graphs.
//!
//! A matchstick graph on the sphere is a simple graph drawn with every edge
//! as a minor great-circle arc of one common angular length, no two edges
//! meeting outside a shared endpoint. This crate constructs the five graphs
//! of that kind whose minimum degree is 5 (the icosahedron, the snub cube,
//! the snub dodecahedron, and Robinson's 48- and 120-cap packings), verifies
//! the matchstick axioms for arbitrary embedded spherical graphs, and runs a
//! numerical charge-ledger audit over the vertices and faces of an embedding.
//!
//! The main entry points:
//!
//! * [`constructions`]: builders for the five target graphs plus the
//!   two-phase orbit solver behind the Robinson packings.
//! * [`verifier`]: edge-length, crossing, degree and separation checks with
//!   witnesses for every failure.
//! * [`discharging`]: initial charges, the piecewise transfer function, and
//!   the full ledger with equality-condition flags.
//! * [`io`]: the `smg-1` file format and OFF/SVG/CSV exporters.

pub mod constructions;
pub mod discharging;
pub mod embedding;
pub mod error;
pub mod io;
pub mod sphgeom;
pub mod symmetry;
pub mod verifier;

pub use embedding::{EmbeddedGraph, Face, FaceSet};
pub use error::Error;
pub use sphgeom::UnitVector;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
