//! Small-ball probability bounds `P(‖X‖ <= t)` for random vectors under ℓ_p
//! quasi-norms, together with the numerical oracles that check them:
//! Monte Carlo estimates with exact binomial intervals, radial quadrature of
//! characteristic-function integrals, numeric Sobolev norms and a certified
//! lattice search for the least common denominator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod lcd;
pub mod models;
pub mod quadrature;
pub mod rng;
pub mod serde_ext;
pub mod special;

pub use bounds::{BoundReport, LoParams, Regime, SobolevParams, TheoremId, TieBreak};
pub use error::{Error, Result};
pub use geometry::{GaussianMeasureEstimate, QuasiNormSpec};
pub use lcd::{LcdParams, LcdResult};
pub use models::{AtomLaw, Matrix, VectorModel};
pub use quadrature::{McEstimate, QuadResult};
