//! Vector-valued rational interpolation by the ITEA procedure, with
//! closed-form oracles and tools for measuring convergence rates.

pub mod analysis;
pub mod divided_diff;
pub mod error;
pub mod itea;
pub mod linalg;
pub mod oracles;
pub mod poly;
pub mod potential;
pub mod selftest;
pub mod types;

pub use divided_diff::{build_table, DividedDifferenceTable, SampleSet, VectorFunction};
pub use error::{Error, Result};
pub use itea::{build_interpolant, IteaConfig, IteaInterpolant};
pub use types::{inner, CVector, NodeMultiset, ScaledProduct};
