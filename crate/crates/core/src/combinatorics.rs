//! Special functions and combinatorial primitives.
//!
//! Log-gamma, log-beta, digamma, Stirling numbers of the second kind and
//! Pochhammer products. Everything here is a pure function over `f64` or
//! integers, with the exception of [`stirling2`] which is exact.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// ζ(k) − 1 for k = 2..=30.
const ZETA_MINUS_ONE: [f64; 29] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_1,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_961e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_429e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
];

/// Σ_{k≥2} (−1)^k (ζ(k)−1) z^k / k, valid for |z| ≤ 1/2.
fn zeta_tail_series(z: f64) -> f64 {
    // pow runs through (−z)^k = (−1)^k z^k
    let mut pow = -z;
    let mut acc = 0.0;
    for (idx, c) in ZETA_MINUS_ONE.iter().enumerate() {
        pow *= -z;
        acc += c * pow / (idx + 2) as f64;
    }
    acc
}

/// lnΓ(2 + z) for |z| ≤ 1/2.
fn ln_gamma_near_two(z: f64) -> f64 {
    z * (1.0 - EULER_GAMMA) + zeta_tail_series(z)
}

/// Stirling series remainder lnΓ(x) − [(x − ½) ln x − x + ½ ln 2π], x ≥ 10.
fn stirling_correction(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 * (1.0 / 156.0)))))))
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(format!(
            "{what} requires a finite positive argument, got {x}"
        )));
    }
    Ok(())
}

/// Natural logarithm of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive(x, "ln_gamma")?;
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // lnΓ(x) = lnΓ(x + 2) − ln(x(x + 1))
        return ln_gamma_near_two(x) - (x * (x + 1.0)).ln();
    }
    if x < 1.5 {
        // lnΓ(x) = lnΓ(x + 1) − ln x
        return ln_gamma_near_two(x - 1.0) - x.ln();
    }
    if x <= 2.5 {
        return ln_gamma_near_two(x - 2.0);
    }
    if x < 10.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        return prod.ln() + ln_gamma_near_two(y - 2.0);
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_correction(x)
}

/// lnΓ(x + d) − lnΓ(x), evaluated without forming either log-gamma value.
///
/// Requires x > 0 and x + d > 0. Accurate relative to the size of the
/// difference, which matters for beta ratios at large n.
pub fn ln_gamma_ratio(x: f64, d: f64) -> Result<f64> {
    check_positive(x, "ln_gamma_ratio")?;
    if !d.is_finite() || x + d <= 0.0 {
        return Err(domain(format!(
            "ln_gamma_ratio requires x + d > 0, got x = {x}, d = {d}"
        )));
    }
    Ok(ln_gamma_ratio_unchecked(x, d))
}

fn ln_ratio(num: f64, den: f64) -> f64 {
    // ln(num / den) with num = den + d
    let d = num - den;
    if d.abs() < 0.5 * den {
        (d / den).ln_1p()
    } else {
        num.ln() - den.ln()
    }
}

pub(crate) fn ln_gamma_ratio_unchecked(x: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    let mut x = x;
    let mut shift = 0.0;
    while x.min(x + d) < 10.0 {
        // R(x) = R(x + 1) − ln((x + d) / x)
        shift -= ln_ratio(x + d, x);
        x += 1.0;
    }
    let y = x + d;
    let main = (y - 0.5) * (d / x).ln_1p() + d * x.ln() - d;
    shift + main + (stirling_correction(y) - stirling_correction(x))
}

/// Natural logarithm of the beta function B(p, q).
pub fn ln_beta(p: f64, q: f64) -> Result<f64> {
    check_positive(p, "ln_beta")?;
    check_positive(q, "ln_beta")?;
    Ok(ln_beta_unchecked(p, q))
}

pub(crate) fn ln_beta_unchecked(p: f64, q: f64) -> f64 {
    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
    if hi < 10.0 {
        return ln_gamma_unchecked(lo) + ln_gamma_unchecked(hi) - ln_gamma_unchecked(lo + hi);
    }
    // lnΓ(lo) + lnΓ(hi) − lnΓ(hi + lo), without the large cancelling terms
    ln_gamma_unchecked(lo) - ln_gamma_ratio_unchecked(hi, lo)
}

/// ln B(p + d, q) − ln B(p, q).
pub fn ln_beta_ratio(p: f64, q: f64, d: f64) -> Result<f64> {
    check_positive(p, "ln_beta_ratio")?;
    check_positive(q, "ln_beta_ratio")?;
    if !(p + d > 0.0) {
        return Err(domain(format!(
            "ln_beta_ratio requires p + d > 0, got {}",
            p + d
        )));
    }
    Ok(ln_gamma_ratio_unchecked(p, d) - ln_gamma_ratio_unchecked(p + q, d))
}

/// Digamma function ψ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    let series = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0
                        - r2 * (1.0 / 132.0 - r2 * (691.0 / 32_760.0 - r2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 * r - series)
}

/// Largest argument for which [`stirling2`] is computed.
pub const STIRLING_MAX: u32 = 64;

/// Stirling number of the second kind S(k, l), exact.
pub fn stirling2(k: u32, l: u32) -> Result<BigUint> {
    if k > STIRLING_MAX || l > STIRLING_MAX {
        return Err(Error::Range(format!(
            "stirling2({k}, {l}) exceeds the supported bound {STIRLING_MAX}"
        )));
    }
    if l > k {
        return Ok(BigUint::zero());
    }
    Ok(stirling2_row(k).swap_remove(l as usize))
}

/// Row k of the Stirling triangle: S(k, 0..=k).
pub(crate) fn stirling2_row(k: u32) -> Vec<BigUint> {
    let k = k as usize;
    let mut row = vec![BigUint::one()];
    for m in 0..k {
        // S(m+1, l) = l S(m, l) + S(m, l−1)
        let mut next = vec![BigUint::zero(); m + 2];
        for l in 1..=m + 1 {
            let mut v = if l <= m {
                &row[l] * BigUint::from(l)
            } else {
                BigUint::zero()
            };
            v += &row[l - 1];
            next[l] = v;
        }
        row = next;
    }
    row
}

/// Row k of the Stirling triangle converted to `f64`.
pub(crate) fn stirling2_row_f64(k: u32) -> Vec<f64> {
    stirling2_row(k)
        .iter()
        .map(|v| v.to_f64().unwrap_or(f64::INFINITY))
        .collect()
}

/// Falling factorial x(x−1)…(x−l+1); 1 for l = 0.
pub fn falling_factorial(x: f64, l: u32) -> f64 {
    (0..l).fold(1.0, |acc, j| acc * (x - j as f64))
}

/// Rising factorial x(x+1)…(x+l−1); 1 for l = 0.
pub fn rising_factorial(x: f64, l: u32) -> f64 {
    (0..l).fold(1.0, |acc, j| acc * (x + j as f64))
}
