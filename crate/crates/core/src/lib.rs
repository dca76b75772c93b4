//! Tail-weighted goodness-of-fit statistics and their risk function.
//!
//! The crate covers:
//!
//! * the lower/upper-tail family `n ∫ (F_n − F)² F^(−a) dF` with its
//!   computing formulas, Cramér–von Mises and Anderson–Darling
//!   ([`tail_gof`]), checked against an exact piecewise integration;
//! * the closed-form risk `1/((2−a)(3−a))` with pole handling ([`risk`]);
//! * the discrete distribution on `{1,…,n}` obtained from order-statistic
//!   beta ratios, with Stirling-number moments ([`osd`]);
//! * Monte Carlo estimation of the risk ([`mc`]);
//! * GPD fitting and bootstrap-based automated threshold selection
//!   ([`gpd`], [`threshold`]).
//!
//! Trial loops run on rayon when the `parallel` feature is on (default);
//! results do not depend on the worker count.

pub mod combinatorics;
pub mod edf;
pub mod error;
pub mod exec;
pub mod gpd;
pub mod mc;
pub mod numeric;
pub mod osd;
pub mod risk;
pub mod synth;
pub mod tail_gof;
pub mod threshold;

pub use edf::{to_ordered_unit, ModelCdf, OrderedUnitSample, Sample};
pub use error::{Error, Result};
pub use exec::Execution;
pub use gpd::{gpd_cdf, gpd_fit_mle, GpdFit, GpdParams};
pub use mc::{divergence_probe, simulate_risk, simulate_risk_with, McEstimate};
pub use osd::OsdParams;
pub use risk::{risk_curve, risk_lower, risk_named, risk_upper, NamedStatistic, RiskValue};
pub use tail_gof::{StatResult, StatSpec, TailSide};
pub use threshold::{select_threshold, ThresholdConfig, ThresholdScan};
