//! Exact computations with cluster varieties: seeds and mutation, Laurent
//! expansions and valuations, tropical maps, rank-2 scattering diagrams with broken
//! lines and theta functions, polytopes, and Grassmannian Newton-Okounkov bodies.

pub mod accept;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod grassmannian;
pub mod io;
pub mod lattice;
pub mod laurent;
pub mod polytope;
pub mod scattering;
pub mod seed;
pub mod tropical;

pub use error::{Error, Result};
