//! Exact word-metric geometry on a small zoo of finitely generated groups:
//! ball enumeration, L^p isoperimetric profiles, Folner pair certification,
//! quotient/subgroup transfer of test functions, and return-probability
//! decay for random walks.
//!
//! All group arithmetic is exact (integers, Z[1/m] fractions, lamp
//! configurations over F_p). Floating point only enters in eigensolves,
//! whose results are re-certified in rational arithmetic, and in the fit
//! diagnostics.

pub mod ball;
pub mod cache;
pub mod bytes;
pub mod error;
pub mod fit;
pub mod folner;
pub mod func;
pub mod group;
pub mod extremal;
pub mod profile;
pub mod spectral;
pub mod randomwalk;
pub mod transfer;

pub use error::{Error, Result};
pub use group::{GroupSpec, Kind, ZSubgroup};
pub use group::element::Element;
