//! Automated threshold selection for peaks-over-threshold models.
//!
//! For each candidate threshold (ascending) the excesses are fitted with a
//! GPD, transformed through the fitted CDF and tested with a tail-weighted
//! statistic (by default the unit-stress member weighting the upper tail,
//! i.e. the large excesses). A parametric bootstrap gives one p-value per
//! candidate, and an ordered stopping rule over the p-value sequence picks
//! the first threshold above which the GPD is not rejected.

use serde::{Deserialize, Serialize};

use crate::edf::{OrderedUnitSample, Sample};
use crate::error::{domain, Error, Result};
use crate::exec::{derive_seed, map_indexed, stream_rng, Execution};
use crate::gpd::{gpd_fit_from, gpd_fit_mle, GpdParams, DEFAULT_MIN_COUNT};
use crate::risk::{risk_of_spec, RiskValue};
use crate::tail_gof::StatSpec;

/// Smallest accepted number of bootstrap replicates.
pub const MIN_BOOTSTRAP_REPS: usize = 99;

/// Statistic value and bootstrap p-value of one goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailTest {
    pub statistic: f64,
    pub p_value: f64,
    /// Bootstrap replicates whose refit failed; each counts as an exceedance.
    pub failed_refits: usize,
}

/// PIT of excesses under a fitted GPD, sorted.
pub fn pit_excesses(excesses: &[f64], fitted: &GpdParams) -> Result<OrderedUnitSample> {
    let u = excesses
        .iter()
        .map(|&y| fitted.cdf(y + fitted.threshold))
        .collect::<Result<Vec<_>>>()?;
    OrderedUnitSample::from_unsorted(u)
}

/// Bootstrap p-value `(1 + #{boot ≥ observed}) / (reps + 1)`.
pub fn bootstrap_p_value(observed: f64, boot: &[f64]) -> f64 {
    let exceed = boot.iter().filter(|&&b| !(b < observed)).count();
    (1 + exceed) as f64 / (boot.len() + 1) as f64
}

/// Tests the fitted GPD on the excesses with a parametric bootstrap.
pub fn tail_gof_pvalue(
    excesses: &[f64],
    fitted: &GpdParams,
    spec: &StatSpec,
    bootstrap_reps: usize,
    seed: u64,
    exec: Execution,
) -> Result<TailTest> {
    spec.validate()?;
    fitted.validate()?;
    if bootstrap_reps < MIN_BOOTSTRAP_REPS {
        return Err(domain(format!(
            "need at least {MIN_BOOTSTRAP_REPS} bootstrap replicates, got {bootstrap_reps}"
        )));
    }
    if excesses.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            have: excesses.len(),
        });
    }
    let fitted = GpdParams {
        threshold: 0.0,
        ..*fitted
    };
    let observed = spec.evaluate(&pit_excesses(excesses, &fitted)?)?.value;
    let m = excesses.len();

    let boot: Vec<Option<f64>> = map_indexed(exec, bootstrap_reps, |r| {
        let mut rng = stream_rng(seed, r);
        let y = fitted.sample(&mut rng, m);
        let refit = gpd_fit_from(&y, &fitted).ok()?;
        let u = pit_excesses(&y, &refit.params).ok()?;
        spec.evaluate(&u).ok().map(|s| s.value)
    });
    let failed_refits = boot.iter().filter(|b| b.is_none()).count();
    let values: Vec<f64> = boot
        .into_iter()
        .map(|b| b.unwrap_or(f64::INFINITY))
        .collect();

    Ok(TailTest {
        statistic: observed,
        p_value: bootstrap_p_value(observed, &values),
        failed_refits,
    })
}

/// Ordered-hypothesis stopping rule applied to the p-value sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StoppingRule {
    /// Reject the first `k` hypotheses for the largest `k` with
    /// `−(1/k) Σ_{i≤k} ln(1 − p_i) ≤ α`.
    #[default]
    ForwardStop,
    /// Reject the first `k` hypotheses for the largest `k` with
    /// `exp(Σ_{j≥k} ln(p_j)/j) ≤ α k / m`.
    StrongStop,
}

impl StoppingRule {
    /// Number of leading hypotheses rejected.
    pub fn rejections(&self, p_values: &[f64], alpha: f64) -> usize {
        let m = p_values.len();
        match self {
            StoppingRule::ForwardStop => {
                let mut acc = 0.0;
                let mut k_hat = 0;
                for (k, &p) in p_values.iter().enumerate() {
                    acc += -(-p).ln_1p();
                    if acc / (k + 1) as f64 <= alpha {
                        k_hat = k + 1;
                    }
                }
                k_hat
            }
            StoppingRule::StrongStop => {
                let mut tail = 0.0;
                let mut k_hat = 0;
                for k in (1..=m).rev() {
                    tail += p_values[k - 1].ln() / k as f64;
                    if tail.exp() <= alpha * k as f64 / m as f64 {
                        k_hat = k;
                        break;
                    }
                }
                k_hat
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub spec: StatSpec,
    pub alpha: f64,
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub min_count: usize,
    pub rule: StoppingRule,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            spec: StatSpec::upper(1.0),
            alpha: 0.1,
            bootstrap_reps: 199,
            seed: 0,
            min_count: DEFAULT_MIN_COUNT,
            rule: StoppingRule::ForwardStop,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub threshold: f64,
    pub excess_count: usize,
    /// `None` when there are fewer than `min_count` excesses.
    pub fit: Option<GpdParams>,
    pub converged: Option<bool>,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub config: ThresholdConfig,
    /// Risk of the chosen statistic under the null.
    pub spec_risk: RiskValue,
    pub candidates: Vec<CandidateResult>,
    /// Number of leading candidates rejected by the stopping rule.
    pub rejected: usize,
    pub selected_index: Option<usize>,
    pub selected_threshold: Option<f64>,
    pub diagnostic: Option<String>,
}

/// Scans candidate thresholds and applies the stopping rule.
pub fn select_threshold(
    sample: &Sample,
    candidates: &[f64],
    config: &ThresholdConfig,
    exec: Execution,
) -> Result<ThresholdScan> {
    config.spec.validate()?;
    if candidates.len() < 2 {
        return Err(domain("need at least two candidate thresholds"));
    }
    if candidates.iter().any(|c| !c.is_finite()) || candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain(
            "candidate thresholds must be finite and strictly ascending",
        ));
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(domain(format!(
            "alpha must lie in (0, 1), got {}",
            config.alpha
        )));
    }
    let spec_risk = risk_of_spec(&config.spec)?;

    let mut results = Vec::with_capacity(candidates.len());
    for (idx, &threshold) in candidates.iter().enumerate() {
        let excesses = sample.excesses_over(threshold);
        let count = excesses.len();
        if count < config.min_count {
            results.push(CandidateResult {
                threshold,
                excess_count: count,
                fit: None,
                converged: None,
                statistic: None,
                p_value: None,
            });
            continue;
        }
        let fit = gpd_fit_mle(&excesses, config.min_count)?;
        let test = tail_gof_pvalue(
            &excesses,
            &fit.params,
            &config.spec,
            config.bootstrap_reps,
            derive_seed(config.seed, idx as u64),
            exec,
        )?;
        results.push(CandidateResult {
            threshold,
            excess_count: count,
            fit: Some(GpdParams {
                threshold,
                ..fit.params
            }),
            converged: Some(fit.converged),
            statistic: Some(test.statistic),
            p_value: Some(test.p_value),
        });
    }

    // the stopping rule runs over the leading candidates with a p-value
    let p_values: Vec<f64> = results.iter().map_while(|r| r.p_value).collect();
    if p_values.is_empty() {
        let needed = config.min_count;
        let have = results.first().map_or(0, |r| r.excess_count);
        return Err(Error::InsufficientData { needed, have });
    }
    let rejected = config.rule.rejections(&p_values, config.alpha);
    let (selected_index, diagnostic) = if rejected < p_values.len() {
        (Some(rejected), None)
    } else {
        (
            None,
            Some(format!(
                "all {} evaluable candidates rejected at alpha = {}",
                p_values.len(),
                config.alpha
            )),
        )
    };

    Ok(ThresholdScan {
        config: *config,
        spec_risk,
        selected_threshold: selected_index.map(|i| candidates[i]),
        candidates: results,
        rejected,
        selected_index,
        diagnostic,
    })
}
