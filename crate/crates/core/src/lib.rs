//! Analysis toolkit for BB84 links driven by sub-Poissonian single-photon
//! sources: time-tag ingestion, second-order correlation, sifting and QBER
//! accounting, 2D temporal-filter optimization, and asymptotic plus
//! finite-size secret-key budgets.
//!
//! The probability arithmetic is generic over the scalar type through
//! [`Real`]; the aliases below pin the f64 instantiations the pipeline and
//! CLI work with.

pub mod config;
pub mod error;
pub mod keyrate;
pub mod model;
pub mod real;
pub mod units;

pub use error::{Error, Result};
pub use model::{AcceptanceWindow, Polarization, RunRecord, TimeTag, DT_MIN_PS};
pub use real::Real;

/// Source parameters with double-precision rates.
pub type SourceParams = model::SourceParams<f64>;
/// Receiver parameters with double-precision rates.
pub type ReceiverParams = model::ReceiverParams<f64>;
/// Channel model with double-precision loss figures.
pub type ChannelModel = model::ChannelModel<f64>;
/// Security parameters with double-precision probabilities.
pub type SecurityParams = model::SecurityParams<f64>;
/// Per-pulse link budget in double precision.
pub type LinkBudget = keyrate::LinkBudget<f64>;
/// Asymptotic key-rate result in double precision.
pub type KeyRateResult = keyrate::KeyRateResult<f64>;
/// Finite-size key result in double precision.
pub type FiniteKeyResult = keyrate::FiniteKeyResult<f64>;
/// Window metrics in double precision.
pub type WindowMetrics = keyrate::WindowMetrics<f64>;
/// Key-rate evaluation model in double precision.
pub type KeyRateModel = keyrate::KeyRateModel<f64>;
