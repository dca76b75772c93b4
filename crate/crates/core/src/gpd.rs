//! Generalized Pareto distribution for threshold excesses and its maximum
//! likelihood fit.
//!
//! Parameterisation: shape ξ, scale σ > 0 and threshold (location) u, with
//! `F(x) = 1 − (1 + ξ (x − u)/σ)^(−1/ξ)` and the exponential limit at ξ = 0.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// |ξ| below this is treated as the exponential case in the CDF.
pub const XI_ZERO: f64 = 1e-12;

/// Shape bounds used by the optimiser.
pub const XI_MIN: f64 = -0.95;
pub const XI_MAX: f64 = 5.0;

/// Default minimum number of excesses for a fit.
pub const DEFAULT_MIN_COUNT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdParams {
    pub shape: f64,
    pub scale: f64,
    pub threshold: f64,
}

impl GpdParams {
    pub fn new(shape: f64, scale: f64, threshold: f64) -> Result<Self> {
        let p = Self {
            shape,
            scale,
            threshold,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shape.is_finite() && self.threshold.is_finite()) {
            return Err(domain("GPD shape and threshold must be finite"));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(domain(format!(
                "GPD scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    /// Upper end of the support (infinite for ξ ≥ 0).
    pub fn upper_endpoint(&self) -> f64 {
        if self.shape < 0.0 {
            self.threshold - self.scale / self.shape
        } else {
            f64::INFINITY
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x < self.threshold || x.is_nan() {
            return Err(domain(format!(
                "GPD CDF evaluated at {x}, below the threshold {}",
                self.threshold
            )));
        }
        let s = (x - self.threshold) / self.scale;
        if self.shape.abs() < XI_ZERO {
            return Ok(-(-s).exp_m1());
        }
        let z = self.shape * s;
        if z <= -1.0 {
            return Ok(1.0);
        }
        // 1 − exp(−ln(1+z)/ξ)
        Ok(-(-z.ln_1p() / self.shape).exp_m1())
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let tail = -(-p).ln_1p(); // −ln(1 − p)
        if self.shape.abs() < XI_ZERO {
            self.threshold + self.scale * tail
        } else {
            self.threshold + self.scale * (self.shape * tail).exp_m1() / self.shape
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count)
            .map(|_| self.quantile(rng.random::<f64>()))
            .collect()
    }
}

/// Standalone CDF entry point.
pub fn gpd_cdf(x: f64, params: &GpdParams) -> Result<f64> {
    params.validate()?;
    params.cdf(x)
}

/// Result of a maximum likelihood fit to excesses (threshold 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdFit {
    pub params: GpdParams,
    pub log_likelihood: f64,
    pub start_log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Negative log-likelihood and gradient in θ = (ξ, ln σ).
struct Objective<'a> {
    y: &'a [f64],
    y_max: f64,
}

impl Objective<'_> {
    fn feasible(&self, xi: f64, sigma: f64) -> bool {
        sigma.is_finite() && sigma > 0.0 && (xi >= 0.0 || 1.0 + xi * self.y_max / sigma > 0.0)
    }

    fn value(&self, theta: [f64; 2]) -> f64 {
        let [xi, tau] = theta;
        let sigma = tau.exp();
        if !self.feasible(xi, sigma) {
            return f64::INFINITY;
        }
        let m = self.y.len() as f64;
        let inv = 1.0 / sigma;
        let body: f64 = if xi == 0.0 {
            self.y.iter().map(|&y| y * inv).sum()
        } else {
            let sum: f64 = self.y.iter().map(|&y| (xi * y * inv).ln_1p()).sum();
            (1.0 + 1.0 / xi) * sum
        };
        m * tau + body
    }

    fn value_and_grad(&self, theta: [f64; 2]) -> (f64, [f64; 2]) {
        let [xi, tau] = theta;
        let sigma = tau.exp();
        if !self.feasible(xi, sigma) {
            return (f64::INFINITY, [0.0, 0.0]);
        }
        let m = self.y.len() as f64;
        let inv = 1.0 / sigma;
        let mut sum_log = 0.0;
        let mut sum_frac = 0.0;
        let mut series = [0.0f64; 4];
        for &y in self.y {
            let s = y * inv;
            let z = xi * s;
            sum_log += z.ln_1p();
            sum_frac += s / (1.0 + z);
            let s2 = s * s;
            series[0] += s;
            series[1] += s - 0.5 * s2;
            series[2] += s2 * s / 3.0 - 0.5 * s2;
            series[3] += s2 * s / 3.0 - 0.25 * s2 * s2;
        }
        let g_tau = m - (1.0 + xi) * sum_frac;
        let (body, g_xi) = if xi.abs() < 1e-4 {
            // expansion of (1 + 1/ξ) ln(1 + ξ s) around ξ = 0
            let body = series[0] + xi * (series[1] + xi * (series[2] + xi * series[3]));
            let g = series[1] + xi * (2.0 * series[2] + 3.0 * xi * series[3]);
            (body, g)
        } else {
            let body = (1.0 + 1.0 / xi) * sum_log;
            (body, -sum_log / (xi * xi) + (1.0 + 1.0 / xi) * sum_frac)
        };
        (m * tau + body, [g_xi, g_tau])
    }
}

fn check_excesses(excesses: &[f64], min_count: usize) -> Result<()> {
    if excesses.len() < min_count.max(2) {
        return Err(Error::InsufficientData {
            needed: min_count.max(2),
            have: excesses.len(),
        });
    }
    if let Some(&bad) = excesses.iter().find(|y| !(y.is_finite() && **y >= 0.0)) {
        return Err(domain(format!(
            "excesses must be finite and non-negative, got {bad}"
        )));
    }
    Ok(())
}

/// Method-of-moments start `ξ = (1 − mean²/var)/2`, `σ = mean (1 + mean²/var)/2`,
/// falling back to the exponential fit when it lies outside the support.
fn moment_start(y: &[f64], obj: &Objective<'_>) -> Result<[f64; 2]> {
    let m = y.len() as f64;
    let mean = y.iter().sum::<f64>() / m;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    if !(var > 0.0) || !(mean > 0.0) {
        return Err(Error::Degenerate("excesses have zero variance".into()));
    }
    let ratio = mean * mean / var;
    let xi = (0.5 * (1.0 - ratio)).clamp(XI_MIN, 0.45);
    let sigma = 0.5 * mean * (1.0 + ratio);
    if obj.feasible(xi, sigma) && sigma > 0.0 {
        Ok([xi, sigma.ln()])
    } else {
        Ok([0.0, mean.ln()])
    }
}

/// Maximum likelihood GPD fit to threshold excesses.
pub fn gpd_fit_mle(excesses: &[f64], min_count: usize) -> Result<GpdFit> {
    check_excesses(excesses, min_count)?;
    let y_max = excesses.iter().copied().fold(0.0, f64::max);
    let obj = Objective { y: excesses, y_max };
    let start = moment_start(excesses, &obj)?;
    Ok(minimize(&obj, start))
}

/// Fit started from known parameters, used for bootstrap refits.
pub(crate) fn gpd_fit_from(excesses: &[f64], start: &GpdParams) -> Result<GpdFit> {
    check_excesses(excesses, 2)?;
    let y_max = excesses.iter().copied().fold(0.0, f64::max);
    let obj = Objective { y: excesses, y_max };
    let mut theta = [start.shape.clamp(XI_MIN, XI_MAX), start.scale.ln()];
    if !obj.value(theta).is_finite() {
        theta = moment_start(excesses, &obj)?;
    }
    Ok(minimize(&obj, theta))
}

/// Projected BFGS with Armijo backtracking on θ = (ξ, ln σ), ξ ∈ [XI_MIN, XI_MAX].
fn minimize(obj: &Objective<'_>, start: [f64; 2]) -> GpdFit {
    const MAX_ITER: usize = 200;
    let m = obj.y.len() as f64;
    let grad_tol = 1e-8 * m;
    let project = |t: [f64; 2]| [t[0].clamp(XI_MIN, XI_MAX), t[1]];

    let mut theta = project(start);
    let (mut f, mut g) = obj.value_and_grad(theta);
    let start_f = f;
    // inverse Hessian approximation
    let mut h = [[1.0 / m, 0.0], [0.0, 1.0 / m]];
    let mut converged = false;
    let mut iterations = 0;

    let active = |theta: [f64; 2], g: [f64; 2]| {
        (theta[0] <= XI_MIN && g[0] > 0.0) || (theta[0] >= XI_MAX && g[0] < 0.0)
    };

    while iterations < MAX_ITER {
        let bound = active(theta, g);
        let pg = if bound { [0.0, g[1]] } else { g };
        if pg[0].abs().max(pg[1].abs()) < grad_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut dir = [
            -(h[0][0] * pg[0] + h[0][1] * pg[1]),
            -(h[1][0] * pg[0] + h[1][1] * pg[1]),
        ];
        if bound {
            dir[0] = 0.0;
        }
        if dir[0] * pg[0] + dir[1] * pg[1] >= 0.0 {
            // not a descent direction: reset to steepest descent
            h = [[1.0 / m, 0.0], [0.0, 1.0 / m]];
            dir = [-pg[0] / m, -pg[1] / m];
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = project([theta[0] + step * dir[0], theta[1] + step * dir[1]]);
            let (ft, gt) = obj.value_and_grad(trial);
            let decrease = g[0] * (trial[0] - theta[0]) + g[1] * (trial[1] - theta[1]);
            if ft.is_finite() && ft <= f + 1e-4 * decrease {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((next, f_next, g_next)) = accepted else {
            // no progress possible along the search direction
            converged = pg[0].abs().max(pg[1].abs()) < 1e3 * grad_tol;
            break;
        };

        let s = [next[0] - theta[0], next[1] - theta[1]];
        let yv = [g_next[0] - g[0], g_next[1] - g[1]];
        let sy = s[0] * yv[0] + s[1] * yv[1];
        let small_change =
            (f - f_next).abs() <= 1e-14 * f.abs().max(1.0) && s[0].abs().max(s[1].abs()) < 1e-12;
        theta = next;
        f = f_next;
        g = g_next;
        if small_change {
            converged = true;
            break;
        }
        if sy > 1e-12 {
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let hy = [
                h[0][0] * yv[0] + h[0][1] * yv[1],
                h[1][0] * yv[0] + h[1][1] * yv[1],
            ];
            let yhy = yv[0] * hy[0] + yv[1] * hy[1];
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
    }

    GpdFit {
        params: GpdParams {
            shape: theta[0],
            scale: theta[1].exp(),
            threshold: 0.0,
        },
        log_likelihood: -f,
        start_log_likelihood: -start_f,
        iterations,
        converged,
    }
}

/// GPD log-likelihood of excesses under `params` (threshold ignored).
pub fn gpd_log_likelihood(excesses: &[f64], params: &GpdParams) -> f64 {
    let y_max = excesses.iter().copied().fold(0.0, f64::max);
    let obj = Objective { y: excesses, y_max };
    -obj.value([params.shape, params.scale.ln()])
}
