//! A one-parameter discrete distribution on `{1, …, n}` built from ratios
//! of order-statistic beta functions:
//!
//! ```text
//! p_i(ν) = (ν+1)/n · B(i+ν, n−i+1) / B(i, n−i+1),   ν > −1
//! ```
//!
//! `ν = 0` is the discrete uniform law, `ν ∈ (−1, 0)` puts weight on the
//! left edge and `ν > 0` on the right edge. Raw moments have a closed form
//! in Stirling numbers of the second kind and falling factorials.
//!
//! All pmf and CDF evaluation runs in log space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    falling_factorial, ln_beta_ratio, ln_beta_unchecked, ln_gamma_ratio_unchecked,
    ln_gamma_unchecked, stirling2_row_f64,
};
use crate::error::{domain, Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Smallest admissible distance of ν from −1.
pub const NU_GUARD: f64 = 1e-9;

/// Largest moment order supported by [`osd_moment`].
pub const MAX_MOMENT_ORDER: u32 = 32;

/// Largest support size accepted by [`m_k_direct`].
pub const MAX_DIRECT_N: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OsdParams {
    n: usize,
    nu: f64,
}

impl OsdParams {
    pub fn new(n: usize, nu: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("support size n must be at least 1"));
        }
        if !nu.is_finite() || nu < -1.0 + NU_GUARD {
            return Err(domain(format!("nu must be finite and > -1, got {nu}")));
        }
        Ok(Self { n, nu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    fn check_index(&self, i: usize, what: &str) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(domain(format!("{what} = {i} outside 1..={}", self.n)));
        }
        Ok(())
    }
}

/// Probability of the value `i`.
pub fn osd_pmf(params: &OsdParams, i: usize) -> Result<f64> {
    params.check_index(i, "i")?;
    let n = params.n as f64;
    let nu = params.nu;
    let log_ratio = ln_beta_ratio(i as f64, n - i as f64 + 1.0, nu)?;
    Ok((nu + 1.0) / n * log_ratio.exp())
}

/// The same probability through `Γ(n)/Γ(i) · (ν+1) / (ν+i)^(n−i+1)`,
/// with the rising factorial expanded as a product.
pub fn osd_pmf_alt(params: &OsdParams, i: usize) -> Result<f64> {
    params.check_index(i, "i")?;
    let nu = params.nu;
    let mut log_rising = CompensatedSum::new();
    for j in 0..=(params.n - i) {
        log_rising.add((nu + (i + j) as f64).ln());
    }
    let ln_p = ln_gamma_unchecked(params.n as f64) - ln_gamma_unchecked(i as f64) + (nu + 1.0).ln()
        - log_rising.value();
    Ok(ln_p.exp())
}

/// The full probability vector `(p_1, …, p_n)`.
pub fn osd_pmf_vector(params: &OsdParams) -> Vec<f64> {
    (1..=params.n)
        .map(|i| osd_pmf(params, i).expect("index in range"))
        .collect()
}

/// Closed-form CDF `B(n, ν+1) / B(s, ν+1)`.
pub fn osd_cdf(params: &OsdParams, s: usize) -> Result<f64> {
    params.check_index(s, "s")?;
    Ok(cdf_unchecked(params, s))
}

fn cdf_unchecked(params: &OsdParams, s: usize) -> f64 {
    if s == params.n {
        return 1.0;
    }
    let d = params.nu + 1.0;
    if d.fract() == 0.0 && d <= 64.0 {
        // Γ(s+d)Γ(n) / (Γ(s)Γ(n+d)) as a finite product
        return (0..d as usize)
            .map(|j| (s + j) as f64 / (params.n + j) as f64)
            .product();
    }
    // ln B(n, d) − ln B(s, d) = [lnΓ(s+d) − lnΓ(s)] − [lnΓ(n+d) − lnΓ(n)]
    (ln_gamma_ratio_unchecked(s as f64, d) - ln_gamma_ratio_unchecked(params.n as f64, d)).exp()
}

/// k-th raw moment `E[X^k] = Σ_l S(k+1, l+1) (ν+1)/(ν+1+l) (n−1)_(l)`.
pub fn osd_moment(params: &OsdParams, k: u32) -> Result<f64> {
    if k > MAX_MOMENT_ORDER {
        return Err(Error::Range(format!(
            "moment order {k} exceeds {MAX_MOMENT_ORDER}"
        )));
    }
    let stirling = stirling2_row_f64(k + 1);
    let nu1 = params.nu + 1.0;
    let m = params.n as f64 - 1.0;
    Ok(compensated_sum((0..=k).map(|l| {
        stirling[l as usize + 1] * nu1 / (nu1 + l as f64) * falling_factorial(m, l)
    })))
}

/// `E[X] = 1 + (ν+1)/(ν+2) · (n−1)`.
pub fn osd_mean(params: &OsdParams) -> f64 {
    let nu = params.nu;
    1.0 + (nu + 1.0) / (nu + 2.0) * (params.n as f64 - 1.0)
}

/// `Var[X] = (ν+1)(ν+n+1)(n−1) / ((ν+2)²(ν+3))`.
pub fn osd_variance(params: &OsdParams) -> f64 {
    let nu = params.nu;
    let n = params.n as f64;
    (nu + 1.0) * (nu + n + 1.0) * (n - 1.0) / ((nu + 2.0) * (nu + 2.0) * (nu + 3.0))
}

/// Draws `count` values by inverse-CDF binary search. Deterministic in `seed`.
pub fn osd_sample(params: &OsdParams, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let target: f64 = rng.random();
            // smallest s with F(s) > target
            let (mut lo, mut hi) = (1usize, params.n);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if cdf_unchecked(params, mid) > target {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            lo
        })
        .collect()
}

/// Density of the i-th order statistic of n uniforms, a Beta(i, n−i+1) law.
pub fn order_stat_density(u: f64, i: usize, n: usize) -> Result<f64> {
    if i == 0 || i > n {
        return Err(domain(format!("order index {i} outside 1..={n}")));
    }
    if !(0.0..=1.0).contains(&u) {
        return Ok(0.0);
    }
    let log_pow = |x: f64, e: usize| if e == 0 { 0.0 } else { e as f64 * x.ln() };
    let ln_norm = ln_beta_unchecked(i as f64, (n - i + 1) as f64);
    Ok((log_pow(u, i - 1) + log_pow(1.0 - u, n - i) - ln_norm).exp())
}

/// `(ν+1)/n · Σ i^k B(i+ν, n−i+1)/B(i, n−i+1)` summed term by term.
pub fn m_k_direct(n: usize, nu: f64, k: u32) -> Result<f64> {
    let params = OsdParams::new(n, nu)?;
    if n > MAX_DIRECT_N {
        return Err(Error::Range(format!(
            "direct sum limited to n <= {MAX_DIRECT_N}, got {n}"
        )));
    }
    Ok(compensated_sum((1..=n).map(|i| {
        (i as f64).powi(k as i32) * osd_pmf(&params, i).expect("index in range")
    })))
}
