//! Closed-form risk (expected loss) of the tail statistics.
//!
//! The expected value of the stress-`a` lower-tail statistic under the null
//! is `1/((2−a)(3−a))`, independent of the sample size. It is infinite at
//! `a = 2` and `a = 3`. The same expression holds for the upper tail.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::tail_gof::{StatSpec, TailSide, BRANCH_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum RiskValue {
    Finite(f64),
    Divergent,
}

impl RiskValue {
    pub fn is_divergent(&self) -> bool {
        matches!(self, RiskValue::Divergent)
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            RiskValue::Finite(v) => Some(v),
            RiskValue::Divergent => None,
        }
    }
}

/// Risk computed in exact rational arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactRisk {
    Finite(BigRational),
    Divergent,
}

impl ExactRisk {
    pub fn to_risk_value(&self) -> RiskValue {
        match self {
            ExactRisk::Finite(r) => RiskValue::Finite(r.to_f64().unwrap_or(f64::NAN)),
            ExactRisk::Divergent => RiskValue::Divergent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedStatistic {
    /// Cramér–von Mises, a = b = 0.
    Cvm,
    /// Anderson–Darling, a = b = 1.
    Ad,
    /// Single-tail unit-stress statistic.
    Al,
}

fn is_pole(a: f64) -> bool {
    (a - 2.0).abs() < BRANCH_TOLERANCE || (a - 3.0).abs() < BRANCH_TOLERANCE
}

/// Risk of the lower-tail statistic with stress `a`.
pub fn risk_lower(a: f64) -> Result<RiskValue> {
    if !a.is_finite() || a < 0.0 {
        return Err(domain(format!(
            "stress parameter must be finite and >= 0, got {a}"
        )));
    }
    if is_pole(a) {
        return Ok(RiskValue::Divergent);
    }
    Ok(RiskValue::Finite(1.0 / ((2.0 - a) * (3.0 - a))))
}

/// Risk of the upper-tail statistic with stress `b`.
pub fn risk_upper(b: f64) -> Result<RiskValue> {
    risk_lower(b)
}

/// Exact rational risk for a rational stress parameter.
pub fn risk_lower_exact(a: &BigRational) -> Result<ExactRisk> {
    if a.is_negative() {
        return Err(domain(format!("stress parameter must be >= 0, got {a}")));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let three = BigRational::from_integer(BigInt::from(3));
    let denom = (&two - a) * (&three - a);
    if denom.is_zero() {
        return Ok(ExactRisk::Divergent);
    }
    Ok(ExactRisk::Finite(BigRational::one() / denom))
}

pub fn risk_upper_exact(b: &BigRational) -> Result<ExactRisk> {
    risk_lower_exact(b)
}

/// Exact risk of the named classical statistics.
pub fn risk_named_exact(which: NamedStatistic) -> ExactRisk {
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let finite = |r: ExactRisk| match r {
        ExactRisk::Finite(v) => v,
        ExactRisk::Divergent => unreachable!("named statistics have finite risk"),
    };
    match which {
        NamedStatistic::Cvm => risk_lower_exact(&int(0)).expect("valid stress"),
        NamedStatistic::Al => risk_lower_exact(&int(1)).expect("valid stress"),
        NamedStatistic::Ad => {
            let lo = finite(risk_lower_exact(&int(1)).expect("valid stress"));
            let hi = finite(risk_upper_exact(&int(1)).expect("valid stress"));
            ExactRisk::Finite(lo + hi)
        }
    }
}

pub fn risk_named(which: NamedStatistic) -> RiskValue {
    risk_named_exact(which).to_risk_value()
}

/// Risk of an arbitrary statistic spec.
pub fn risk_of_spec(spec: &StatSpec) -> Result<RiskValue> {
    match spec.side {
        TailSide::Lower => risk_lower(spec.stress),
        TailSide::Upper => risk_upper(spec.stress),
        TailSide::Both => {
            spec.validate()?;
            Ok(risk_named(NamedStatistic::Ad))
        }
    }
}

/// Pointwise lower-tail risk over a grid of stress values.
pub fn risk_curve(grid: &[f64]) -> Result<Vec<(f64, RiskValue)>> {
    grid.iter().map(|&a| Ok((a, risk_lower(a)?))).collect()
}
