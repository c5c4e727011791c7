//! Exact Betti numbers, Poincaré polynomials and Euler characteristics of
//! hyperquot schemes over partial flag varieties.
//!
//! Two independent routes are provided: counting torus fixed points by
//! cell dimension ([`fixedpoints`]) and expanding closed-form generating
//! functions ([`genfun`]). [`identity`] checks them against each other.

pub mod cli;
pub mod error;
pub mod fixedpoints;
pub mod flagcore;
pub mod genfun;
pub mod identity;
pub mod mpoly;

pub use error::{Error, Result};
pub use fixedpoints::{betti_histogram, euler_by_count, BettiTable, FixedPoint};
pub use flagcore::{BlockPermutation, FlagShape, Multidegree};
pub use genfun::{SeriesRequest, ZCap};
pub use mpoly::SparsePoly;
