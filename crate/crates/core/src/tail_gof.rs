//! The tail-weighted family of Cramér–von Mises type statistics.
//!
//! For an ordered unit sample `u_(1) ≤ … ≤ u_(n)` the lower-tail member
//! with stress `a` is `n ∫ (F_n(t) − t)² t^(−a) dt`. Closed computing
//! formulas exist for every `a ≥ 0` except `a = 3`; the removable
//! parameter singularities at `a = 1` and `a = 2` get their own branches.
//! The upper-tail member is the lower-tail member of the reflected sample.

use serde::{Deserialize, Serialize};

use crate::edf::{OrderedUnitSample, SINGULAR_GUARD};
use crate::error::{domain, Error, Result};
use crate::numeric::CompensatedSum;

/// Tolerance used to recognise the special stress values 1, 2 and 3.
pub const BRANCH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    Lower,
    Upper,
    /// Both tails with unit stress, i.e. Anderson–Darling.
    Both,
}

/// Identifies one member of the statistic family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatSpec {
    pub side: TailSide,
    pub stress: f64,
}

impl StatSpec {
    pub fn lower(a: f64) -> Self {
        Self {
            side: TailSide::Lower,
            stress: a,
        }
    }

    pub fn upper(b: f64) -> Self {
        Self {
            side: TailSide::Upper,
            stress: b,
        }
    }

    pub fn cramer_von_mises() -> Self {
        Self::lower(0.0)
    }

    pub fn anderson_darling() -> Self {
        Self {
            side: TailSide::Both,
            stress: 1.0,
        }
    }

    /// Checks that the stress and side name an evaluable statistic.
    pub fn validate(&self) -> Result<()> {
        check_stress(self.stress)?;
        if self.side == TailSide::Both && !is_near(self.stress, 1.0) {
            return Err(Error::Unsupported(format!(
                "two-sided weights are only available for a = b = 1, got {}",
                self.stress
            )));
        }
        Ok(())
    }

    /// Evaluates the statistic on an ordered unit sample.
    pub fn evaluate(&self, u: &OrderedUnitSample) -> Result<StatResult> {
        self.validate()?;
        match self.side {
            TailSide::Lower => lower_tail_stat(u, self.stress),
            TailSide::Upper => upper_tail_stat(u, self.stress),
            TailSide::Both => ad_stat(u),
        }
    }
}

/// Which computing formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    General,
    A0Cvm,
    A1,
    A2,
    Ad,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub value: f64,
    pub n: usize,
    pub spec: StatSpec,
    pub branch: Branch,
    /// Number of exact zeros replaced by [`SINGULAR_GUARD`].
    pub clamped: usize,
}

fn is_near(a: f64, k: f64) -> bool {
    (a - k).abs() < BRANCH_TOLERANCE
}

fn check_stress(a: f64) -> Result<()> {
    if !a.is_finite() || a < 0.0 {
        return Err(domain(format!(
            "stress parameter must be finite and >= 0, got {a}"
        )));
    }
    if is_near(a, 3.0) {
        return Err(Error::DivergentStatistic(a));
    }
    Ok(())
}

/// `t^(−a) (1 − t)^(−b)` on the open unit interval.
pub fn weight(t: f64, a: f64, b: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!("weight is defined on (0, 1), got t = {t}")));
    }
    if !(a >= 0.0 && b >= 0.0) {
        return Err(domain(format!(
            "stress parameters must be >= 0, got a = {a}, b = {b}"
        )));
    }
    Ok(t.powf(-a) * (1.0 - t).powf(-b))
}

/// Lower-tail statistic with stress `a`.
pub fn lower_tail_stat(u: &OrderedUnitSample, a: f64) -> Result<StatResult> {
    check_stress(a)?;
    let n = u.len();
    let nf = n as f64;
    let singular = a > 1.0 - BRANCH_TOLERANCE;
    let mut clamped = 0usize;
    let mut guard = |v: f64| {
        if singular && v == 0.0 {
            clamped += 1;
            SINGULAR_GUARD
        } else {
            v
        }
    };
    let coef = |i: usize| (2 * i + 1) as f64 / nf;

    if a == 0.0 {
        return Ok(cvm_stat(u));
    }
    let mut acc = CompensatedSum::new();
    let branch = if is_near(a, 1.0) {
        acc.add(-1.5 * nf);
        for (i, &v) in u.values().iter().enumerate() {
            let v = guard(v);
            acc.add(2.0 * v);
            acc.add(-coef(i) * v.ln());
        }
        Branch::A1
    } else if is_near(a, 2.0) {
        for (i, &v) in u.values().iter().enumerate() {
            let v = guard(v);
            acc.add(coef(i) / v);
            acc.add(2.0 * v.ln());
        }
        Branch::A2
    } else {
        acc.add(2.0 * nf / ((1.0 - a) * (2.0 - a) * (3.0 - a)));
        let c_hi = 2.0 / (2.0 - a);
        let c_lo = 1.0 / (1.0 - a);
        for (i, &v) in u.values().iter().enumerate() {
            let v = guard(v);
            acc.add(c_hi * v.powf(2.0 - a));
            acc.add(-coef(i) * c_lo * v.powf(1.0 - a));
        }
        Branch::General
    };

    Ok(StatResult {
        value: acc.value(),
        n,
        spec: StatSpec::lower(a),
        branch,
        clamped,
    })
}

/// Upper-tail statistic with stress `b`: the lower-tail statistic of the
/// reflected sample `1 − u_(n+1−i)`.
pub fn upper_tail_stat(u: &OrderedUnitSample, b: f64) -> Result<StatResult> {
    let mut r = lower_tail_stat(&u.reflect(), b)?;
    r.spec = StatSpec::upper(b);
    Ok(r)
}

/// Cramér–von Mises `W²_n = 1/(12n) + Σ ((2i−1)/(2n) − u_(i))²`.
pub fn cvm_stat(u: &OrderedUnitSample) -> StatResult {
    let n = u.len();
    let nf = n as f64;
    let mut acc = CompensatedSum::new();
    acc.add(1.0 / (12.0 * nf));
    for (i, &v) in u.values().iter().enumerate() {
        let d = (2 * i + 1) as f64 / (2.0 * nf) - v;
        acc.add(d * d);
    }
    StatResult {
        value: acc.value(),
        n,
        spec: StatSpec::cramer_von_mises(),
        branch: Branch::A0Cvm,
        clamped: 0,
    }
}

/// Anderson–Darling as the sum of the unit-stress lower and upper members.
pub fn ad_stat(u: &OrderedUnitSample) -> Result<StatResult> {
    let lo = lower_tail_stat(u, 1.0)?;
    let hi = upper_tail_stat(u, 1.0)?;
    Ok(StatResult {
        value: lo.value + hi.value,
        n: u.len(),
        spec: StatSpec::anderson_darling(),
        branch: Branch::Ad,
        clamped: lo.clamped + hi.clamped,
    })
}

/// Classical Anderson–Darling form
/// `−n − (1/n) Σ (2i−1) [ln u_(i) + ln(1 − u_(n+1−i))]`.
pub fn ad_classical(u: &OrderedUnitSample) -> f64 {
    let v = u.values();
    let n = v.len();
    let nf = n as f64;
    let mut acc = CompensatedSum::new();
    for i in 0..n {
        let lo = v[i].max(SINGULAR_GUARD);
        let hi = (1.0 - v[n - 1 - i]).max(SINGULAR_GUARD);
        acc.add((2 * i + 1) as f64 * (lo.ln() + hi.ln()));
    }
    -nf - acc.value() / nf
}

/// `∫_lo^hi t^p dt`, stable as `p → −1`.
fn power_integral(lo: f64, hi: f64, p: f64) -> Option<f64> {
    let q = p + 1.0;
    if hi <= lo {
        return Some(0.0);
    }
    if lo == 0.0 {
        return if q > 0.0 { Some(hi.powf(q) / q) } else { None };
    }
    let log_ratio = (hi / lo).ln();
    if q == 0.0 {
        return Some(log_ratio);
    }
    Some(lo.powf(q) * (q * log_ratio).exp_m1() / q)
}

/// `n ∫_0^1 (F_n(t) − t)² t^(−a) dt`, integrating each constant piece of
/// the EDF analytically.
fn lower_weighted_integral(u: &OrderedUnitSample, a: f64) -> Result<f64> {
    let v = u.values();
    let n = v.len();
    let nf = n as f64;
    let mut acc = CompensatedSum::new();
    let mut lo = 0.0;
    for k in 0..=n {
        let hi = if k < n { v[k] } else { 1.0 };
        if hi > lo {
            let c = k as f64 / nf;
            // (c − t)² t^(−a) = c² t^(−a) − 2c t^(1−a) + t^(2−a)
            let piece = (|| {
                let mut s = power_integral(lo, hi, 2.0 - a)?;
                if c > 0.0 {
                    s += c * c * power_integral(lo, hi, -a)?;
                    s -= 2.0 * c * power_integral(lo, hi, 1.0 - a)?;
                }
                Some(s)
            })()
            .ok_or(Error::DivergentStatistic(a))?;
            acc.add(piece);
        }
        lo = hi;
    }
    Ok(nf * acc.value())
}

/// The weighted mean square error `n ∫ (F_n(t) − t)² t^(−a) (1−t)^(−b) dt`
/// computed directly from its definition.
///
/// Supports the single-tail weights (`b = 0` or `a = 0`) and the
/// Anderson–Darling weight `a = b = 1` through `1/(t(1−t)) = 1/t + 1/(1−t)`.
/// Divergent integrals are reported as [`Error::DivergentStatistic`].
pub fn quadrature_oracle(u: &OrderedUnitSample, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
        return Err(domain(format!(
            "stress parameters must be finite and >= 0, got ({a}, {b})"
        )));
    }
    if b == 0.0 {
        lower_weighted_integral(u, a)
    } else if a == 0.0 {
        lower_weighted_integral(&u.reflect(), b)
    } else if a == 1.0 && b == 1.0 {
        Ok(lower_weighted_integral(u, 1.0)? + lower_weighted_integral(&u.reflect(), 1.0)?)
    } else {
        Err(Error::Unsupported(format!(
            "mixed weight with a = {a}, b = {b} has no oracle"
        )))
    }
}
