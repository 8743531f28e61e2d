//! Information dynamics of stationary Gaussian AR(N) and MA(N) processes.
//!
//! Four per-sample measures are computed: the entropy rate `h`, the
//! multi-information rate `rho`, the predictive information rate `b` and the
//! erasure entropy rate `r`. Three independent routes are provided and are
//! expected to agree:
//!
//! - [`closed_form`]: formulas in the model coefficients,
//! - [`spectral`]: integrals of the power spectral density,
//! - [`oracle`]: Gaussian entropies of finite Toeplitz covariance blocks.
//!
//! [`experiments`] builds the parameter sweeps and reports on top of these.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod error;
pub mod experiments;
pub mod models;
pub mod oracle;
pub mod par;
mod poly;
pub mod rates;
pub mod spectral;

pub use error::{Error, Result};
pub use models::{
    empirical_autocov, ma_minimum_phase, ArModel, AutocovSequence, MaModel, ModelFile, ModelKind,
    PoleSet, Process, ZeroSet,
};
pub use par::Execution;
pub use rates::{InfoRates, Units};
pub use spectral::{SpectralMeans, SpectrumGrid};
