//! Monte Carlo estimation of the expected statistic under the uniform null.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::edf::OrderedUnitSample;
use crate::error::{domain, Result};
use crate::exec::{map_indexed, stream_rng, Execution};
use crate::numeric::mean_and_std_error;
use crate::tail_gof::{StatSpec, BRANCH_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub n: usize,
    pub spec: StatSpec,
    pub seed: u64,
    /// Set when the stress parameter sits near a pole of the risk, where the
    /// statistic is heavy-tailed and normal acceptance bands are unreliable.
    pub heavy_tailed: bool,
}

/// True for stress values in (1.9, 2.1) ∪ (2.9, 3.1).
pub fn near_pole(stress: f64) -> bool {
    (stress - 2.0).abs() < 0.1 || (stress - 3.0).abs() < 0.1
}

/// Statistic of one uniform sample of size `n` drawn from stream `trial`.
fn trial_statistic(n: usize, spec: &StatSpec, seed: u64, trial: u64) -> f64 {
    let mut rng = stream_rng(seed, trial);
    let mut u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    u.sort_by(f64::total_cmp);
    let u = OrderedUnitSample::from_sorted_unchecked(u);
    spec.evaluate(&u).expect("spec validated").value
}

fn check_inputs(n: usize, spec: &StatSpec, trials: usize) -> Result<()> {
    spec.validate()?;
    if n == 0 {
        return Err(domain("sample size n must be at least 1"));
    }
    if trials < 2 {
        return Err(domain(format!("need at least 2 trials, got {trials}")));
    }
    Ok(())
}

/// Per-trial statistic values for trials `0..trials`, in trial order.
pub fn simulate_values(
    n: usize,
    spec: &StatSpec,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    check_inputs(n, spec, trials)?;
    Ok(map_indexed(exec, trials, |t| {
        trial_statistic(n, spec, seed, t)
    }))
}

fn summarize(values: &[f64], n: usize, spec: &StatSpec, seed: u64) -> McEstimate {
    let (mean, std_error) = mean_and_std_error(values);
    McEstimate {
        mean,
        std_error,
        trials: values.len(),
        n,
        spec: *spec,
        seed,
        heavy_tailed: near_pole(spec.stress),
    }
}

/// Estimates `E[statistic]` for samples of `n` uniforms.
pub fn simulate_risk(n: usize, spec: &StatSpec, trials: usize, seed: u64) -> Result<McEstimate> {
    simulate_risk_with(n, spec, trials, seed, Execution::default())
}

pub fn simulate_risk_with(
    n: usize,
    spec: &StatSpec,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    let values = simulate_values(n, spec, trials, seed, exec)?;
    Ok(summarize(&values, n, spec, seed))
}

/// One nested trial set of a divergence probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeStep {
    pub estimate: McEstimate,
    pub max_value: f64,
}

/// Running means of the stress-2 statistic over nested trial sets.
///
/// Trial set `k` consists of trials `0..schedule[k]`, so later sets contain
/// the earlier ones. The output is descriptive only.
pub fn divergence_probe(
    a: f64,
    n: usize,
    schedule: &[usize],
    seed: u64,
    exec: Execution,
) -> Result<Vec<ProbeStep>> {
    if (a - 2.0).abs() >= BRANCH_TOLERANCE {
        return Err(domain(format!(
            "divergence probe is defined for a = 2, got {a}"
        )));
    }
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain(
            "trial schedule must be non-empty and strictly increasing",
        ));
    }
    let spec = StatSpec::lower(2.0);
    let total = *schedule.last().expect("non-empty");
    let values = simulate_values(n, &spec, total, seed, exec)?;
    Ok(schedule
        .iter()
        .map(|&t| ProbeStep {
            estimate: summarize(&values[..t], n, &spec, seed),
            max_value: values[..t]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
        })
        .collect())
}
