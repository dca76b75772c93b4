//! Samples, the empirical distribution function and the probability
//! integral transform onto ordered unit samples.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gpd::GpdParams;

/// Replacement for an exact zero where a downstream formula takes `ln u`
/// or `1/u`.
pub const SINGULAR_GUARD: f64 = 1e-300;

/// A non-empty collection of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData { needed: 1, have: 0 });
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(domain(format!("observation {i} is not finite ({v})")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Ascending copy of the observations. Ties are kept.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Right-continuous EDF: #{X_i ≤ x} / n.
    pub fn edf(&self, x: f64) -> f64 {
        let count = self.values.iter().filter(|&&v| v <= x).count();
        count as f64 / self.values.len() as f64
    }

    /// Observations strictly above `threshold`, shifted to excesses.
    pub fn excesses_over(&self, threshold: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .values
            .iter()
            .filter(|&&v| v > threshold)
            .map(|&v| v - threshold)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Ascending values in [0, 1], typically `F(x_(i))` for a model CDF `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedUnitSample {
    u: Vec<f64>,
}

impl OrderedUnitSample {
    /// Wraps values that are already ascending and inside [0, 1].
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::InsufficientData { needed: 1, have: 0 });
        }
        for (i, &v) in u.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(domain(format!("unit value {i} = {v} lies outside [0, 1]")));
            }
        }
        if u.windows(2).any(|w| w[0] > w[1]) {
            return Err(domain("unit sample is not in ascending order"));
        }
        Ok(Self { u })
    }

    /// Sorts and validates arbitrary values in [0, 1].
    pub fn from_unsorted(mut u: Vec<f64>) -> Result<Self> {
        u.sort_by(f64::total_cmp);
        Self::new(u)
    }

    /// Caller guarantees ascending order inside [0, 1].
    pub(crate) fn from_sorted_unchecked(u: Vec<f64>) -> Self {
        debug_assert!(u.windows(2).all(|w| w[0] <= w[1]));
        Self { u }
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// The sample `1 − u_(n+1−i)`, which is again ascending.
    pub fn reflect(&self) -> Self {
        Self {
            u: self.u.iter().rev().map(|&v| 1.0 - v).collect(),
        }
    }
}

/// A continuous model CDF used for the probability integral transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelCdf {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    Gpd(GpdParams),
    /// The data are already probability-integral transformed.
    Pit,
}

impl ModelCdf {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelCdf::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => Err(
                domain(format!("uniform model needs lo < hi, got [{lo}, {hi}]")),
            ),
            ModelCdf::Exponential { rate } if !(rate.is_finite() && rate > 0.0) => Err(domain(
                format!("exponential rate must be positive, got {rate}"),
            )),
            ModelCdf::Normal { mean, sd } if !(mean.is_finite() && sd.is_finite() && sd > 0.0) => {
                Err(domain(format!(
                    "normal model needs finite mean and sd > 0, got ({mean}, {sd})"
                )))
            }
            ModelCdf::Gpd(p) => p.validate(),
            _ => Ok(()),
        }
    }

    /// Evaluates the CDF, failing outside the model's domain.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match *self {
            ModelCdf::Uniform { lo, hi } => Ok(((x - lo) / (hi - lo)).clamp(0.0, 1.0)),
            ModelCdf::Exponential { rate } => {
                if x < 0.0 {
                    Ok(0.0)
                } else {
                    Ok(-(-rate * x).exp_m1())
                }
            }
            ModelCdf::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                Ok(0.5 * libm::erfc(-z / std::f64::consts::SQRT_2))
            }
            ModelCdf::Gpd(p) => p.cdf(x),
            ModelCdf::Pit => {
                if (0.0..=1.0).contains(&x) {
                    Ok(x)
                } else {
                    Err(domain(format!(
                        "pre-transformed value {x} lies outside [0, 1]"
                    )))
                }
            }
        }
    }
}

/// Sorts the sample and maps each order statistic through the model CDF.
pub fn to_ordered_unit(sample: &Sample, cdf: &ModelCdf) -> Result<OrderedUnitSample> {
    cdf.validate()?;
    let u = sample
        .sorted()
        .into_iter()
        .map(|x| cdf.cdf(x))
        .collect::<Result<Vec<_>>>()?;
    // a monotone CDF preserves order; guard against rounding wiggles
    OrderedUnitSample::from_unsorted(u)
}
