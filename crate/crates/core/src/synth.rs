//! Synthetic samples with a known tail threshold.

use libm::erfc;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::exec::stream_rng;
use crate::gpd::GpdParams;

/// Half-normal body spliced with a GPD tail above `threshold`.
///
/// The tail carries the half-normal mass above the threshold and its scale
/// is chosen so the density is continuous there, i.e. `σ = P(|Z| > u) / (2φ(u))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfNormalGpdSplice {
    pub threshold: f64,
    pub tail: GpdParams,
    pub tail_fraction: f64,
}

impl HalfNormalGpdSplice {
    pub fn new(threshold: f64, shape: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(domain(format!(
                "splice threshold must be positive, got {threshold}"
            )));
        }
        let tail_fraction = erfc(threshold / std::f64::consts::SQRT_2);
        let density =
            2.0 * (-0.5 * threshold * threshold).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let tail = GpdParams::new(shape, tail_fraction / density, threshold)?;
        Ok(Self {
            threshold,
            tail,
            tail_fraction,
        })
    }

    /// Draws `count` values: |Z| when it falls below the threshold, otherwise
    /// a GPD draw.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed, 0);
        (0..count)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                if z.abs() < self.threshold {
                    z.abs()
                } else {
                    self.tail.quantile(rng.random())
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuous_density_at_threshold() {
        let s = HalfNormalGpdSplice::new(2.0, 0.3).unwrap();
        assert!(
            (s.tail_fraction - 0.045_500_263_896_358_4).abs() < 1e-14,
            "{s:?}"
        );
        assert!(
            (s.tail.scale - 0.421_369_229_288_054_2).abs() < 1e-13,
            "{s:?}"
        );
        let x = s.sample(20_000, 3);
        let above = x.iter().filter(|&&v| v >= 2.0).count() as f64 / 20_000.0;
        assert!((above - s.tail_fraction).abs() < 4.0 * (0.0455f64 * 0.9545 / 20_000.0).sqrt());
        assert_eq!(x, s.sample(20_000, 3));
    }
}
