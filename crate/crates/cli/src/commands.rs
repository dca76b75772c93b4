//! Command implementations. Each returns the rendered report.

use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;
use tailstat_core::mc::{divergence_probe, near_pole, simulate_risk_with, McEstimate, ProbeStep};
use tailstat_core::osd::{osd_cdf, osd_mean, osd_moment, osd_pmf_vector, osd_sample, osd_variance};
use tailstat_core::risk::{
    risk_lower_exact, risk_named_exact, ExactRisk, NamedStatistic, RiskValue,
};
use tailstat_core::tail_gof::{Branch, StatSpec, TailSide};
use tailstat_core::threshold::{select_threshold, StoppingRule, ThresholdConfig, ThresholdScan};
use tailstat_core::{to_ordered_unit, Execution, GpdParams, ModelCdf, OsdParams, Sample};

use crate::args::{
    Cli, Command, Format, GofArgs, Model, Named, OsdArgs, RiskArgs, Rule, SelectArgs, Side,
    SimulateArgs, StatKind, WeightSide,
};
use crate::error::CliError;
use crate::input::read_values;
use crate::output::{format_g17, opt_g17, to_csv, to_json};
use crate::rational::{format_rational, parse_grid, parse_rational, to_f64};

/// A rendered report plus warnings destined for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub warnings: Vec<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Gof(args) => gof(args, cli.format),
        Command::Risk(args) => risk(args, cli.format),
        Command::Simulate(args) => simulate(args, cli.format, cli.seed),
        Command::Osd(args) => osd(args, cli.format, cli.seed),
        Command::SelectThreshold(args) => select(args, cli.format, cli.seed),
    }
}

fn input_err(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// A non-negative stress value parsed exactly.
fn parse_stress(flag: &str, s: &str) -> Result<(BigRational, f64), CliError> {
    let r = parse_rational(s).map_err(|e| input_err(format!("--{flag}: {e}")))?;
    if r.is_negative() {
        return Err(input_err(format!("--{flag}: stress must be >= 0, got {s}")));
    }
    let f = if s.contains('/') {
        to_f64(&r)
    } else {
        s.trim().parse().unwrap_or_else(|_| to_f64(&r))
    };
    Ok((r, f))
}

fn exact_text(r: &ExactRisk) -> Option<String> {
    match r {
        ExactRisk::Finite(v) => Some(format_rational(v)),
        ExactRisk::Divergent => None,
    }
}

fn risk_cells(risk: &RiskValue, exact: &Option<String>) -> [String; 3] {
    [
        opt_g17(risk.value()),
        exact.clone().unwrap_or_default(),
        risk.is_divergent().to_string(),
    ]
}

#[derive(Serialize)]
struct GofReport {
    command: &'static str,
    n: usize,
    model: ModelCdf,
    results: Vec<GofRow>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct GofRow {
    stat: StatKind,
    side: TailSide,
    stress: f64,
    stress_exact: String,
    value: f64,
    branch: Branch,
    clamped: usize,
    risk: RiskValue,
    risk_exact: Option<String>,
}

fn gof(args: &GofArgs, format: Format) -> Result<Outcome, CliError> {
    let model = match (args.pit, args.model) {
        (true, _) => ModelCdf::Pit,
        (false, Some(Model::Uniform)) => ModelCdf::Uniform {
            lo: args.lo,
            hi: args.hi,
        },
        (false, Some(Model::Exp)) => ModelCdf::Exponential { rate: args.rate },
        (false, Some(Model::Normal)) => ModelCdf::Normal {
            mean: args.mean,
            sd: args.sd,
        },
        (false, Some(Model::Gpd)) => ModelCdf::Gpd(GpdParams {
            shape: args.shape,
            scale: args.scale,
            threshold: args.threshold,
        }),
        (false, None) => return Err(input_err("one of --pit or --model is required")),
    };
    model.validate().map_err(|e| input_err(e.to_string()))?;
    let values = read_values(&args.input)?;
    let sample = Sample::new(values)?;
    let u = to_ordered_unit(&sample, &model)?;

    let mut warnings = Vec::new();
    let mut results = Vec::new();
    for &kind in &args.stat {
        let (spec, stress_exact, exact) = match kind {
            StatKind::Cvm => (
                StatSpec::cramer_von_mises(),
                "0".to_string(),
                risk_named_exact(NamedStatistic::Cvm),
            ),
            StatKind::Ad => (
                StatSpec::anderson_darling(),
                "1".to_string(),
                risk_named_exact(NamedStatistic::Ad),
            ),
            StatKind::Lower | StatKind::Upper => {
                let flag = if kind == StatKind::Lower { "a" } else { "b" };
                let raw = if kind == StatKind::Lower {
                    &args.a
                } else {
                    &args.b
                };
                let (r, f) = parse_stress(flag, raw)?;
                let spec = if kind == StatKind::Lower {
                    StatSpec::lower(f)
                } else {
                    StatSpec::upper(f)
                };
                (spec, format_rational(&r), risk_lower_exact(&r)?)
            }
        };
        let res = spec.evaluate(&u)?;
        if res.clamped > 0 {
            warnings.push(format!(
                "{} exact zero(s) replaced by the singular guard for {kind:?}",
                res.clamped
            ));
        }
        let risk = exact.to_risk_value();
        if risk.is_divergent() {
            warnings.push(format!("stress {stress_exact} has infinite risk"));
        }
        results.push(GofRow {
            stat: kind,
            side: spec.side,
            stress: spec.stress,
            stress_exact,
            value: res.value,
            branch: res.branch,
            clamped: res.clamped,
            risk,
            risk_exact: exact_text(&exact),
        });
    }

    let text = match format {
        Format::Json => to_json(&GofReport {
            command: "gof",
            n: u.len(),
            model,
            results,
            warnings: warnings.clone(),
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| {
                    let mut row = vec![
                        kind_name(r.stat).into(),
                        format_g17(r.stress),
                        format_g17(r.value),
                        r.clamped.to_string(),
                    ];
                    row.extend(risk_cells(&r.risk, &r.risk_exact));
                    row
                })
                .collect();
            to_csv(
                &[
                    "stat",
                    "stress",
                    "value",
                    "clamped",
                    "risk",
                    "risk_exact",
                    "divergent",
                ],
                &rows,
            )
        }
    };
    Ok(Outcome { text, warnings })
}

fn kind_name(k: StatKind) -> &'static str {
    match k {
        StatKind::Cvm => "cvm",
        StatKind::Ad => "ad",
        StatKind::Lower => "lower",
        StatKind::Upper => "upper",
    }
}

#[derive(Serialize)]
struct RiskReport {
    command: &'static str,
    side: Option<Side>,
    named: Option<Named>,
    rows: Vec<RiskRow>,
}

#[derive(Serialize)]
struct RiskRow {
    stress: f64,
    stress_exact: String,
    risk: RiskValue,
    risk_exact: Option<String>,
    /// Integer stress values, the marked points of the curve.
    marker: bool,
}

fn risk_row(stress: &BigRational, exact: ExactRisk) -> RiskRow {
    RiskRow {
        stress: to_f64(stress),
        stress_exact: format_rational(stress),
        risk: exact.to_risk_value(),
        risk_exact: exact_text(&exact),
        marker: stress.is_integer(),
    }
}

fn risk(args: &RiskArgs, format: Format) -> Result<Outcome, CliError> {
    let (side, named, rows) = if let Some(which) = args.named {
        let (stat, stress) = match which {
            Named::Cvm => (NamedStatistic::Cvm, 0),
            Named::Ad => (NamedStatistic::Ad, 1),
            Named::Al => (NamedStatistic::Al, 1),
        };
        let s = BigRational::from_integer(stress.into());
        (
            None,
            Some(which),
            vec![risk_row(&s, risk_named_exact(stat))],
        )
    } else {
        let grid = match (&args.a, &args.grid) {
            (Some(a), _) => vec![parse_stress("a", a)?.0],
            (None, Some(g)) => parse_grid(g).map_err(|e| input_err(format!("--grid: {e}")))?,
            (None, None) => return Err(input_err("one of --a, --grid or --named is required")),
        };
        if let Some(neg) = grid.iter().find(|r| r.is_negative()) {
            return Err(input_err(format!(
                "stress must be >= 0, got {}",
                format_rational(neg)
            )));
        }
        let rows = grid
            .iter()
            .map(|s| Ok(risk_row(s, risk_lower_exact(s)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        (Some(args.side), None, rows)
    };

    let text = match format {
        Format::Json => to_json(&RiskReport {
            command: "risk",
            side,
            named,
            rows,
        }),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![format_g17(r.stress), r.stress_exact.clone()];
                    row.extend(risk_cells(&r.risk, &r.risk_exact));
                    row.push(r.marker.to_string());
                    row
                })
                .collect();
            to_csv(
                &[
                    "stress",
                    "stress_exact",
                    "risk",
                    "risk_exact",
                    "divergent",
                    "marker",
                ],
                &body,
            )
        }
    };
    Ok(Outcome {
        text,
        warnings: Vec::new(),
    })
}

#[derive(Serialize)]
struct SimulateReport {
    command: &'static str,
    estimate: McEstimate,
    risk: RiskValue,
    risk_exact: Option<String>,
    /// (mean − risk) / std_error when the risk is finite.
    deviation_in_se: Option<f64>,
    probe: Option<Vec<ProbeStep>>,
    warnings: Vec<String>,
}

fn simulate(args: &SimulateArgs, format: Format, seed: u64) -> Result<Outcome, CliError> {
    let kind = args
        .stat
        .unwrap_or(if args.b.is_some() && args.a.is_none() {
            StatKind::Upper
        } else {
            StatKind::Lower
        });
    let (spec, exact) = match kind {
        StatKind::Cvm => (
            StatSpec::cramer_von_mises(),
            risk_named_exact(NamedStatistic::Cvm),
        ),
        StatKind::Ad => (
            StatSpec::anderson_darling(),
            risk_named_exact(NamedStatistic::Ad),
        ),
        StatKind::Lower => {
            let (r, f) = parse_stress("a", args.a.as_deref().unwrap_or("1"))?;
            (StatSpec::lower(f), risk_lower_exact(&r)?)
        }
        StatKind::Upper => {
            let (r, f) = parse_stress("b", args.b.as_deref().unwrap_or("1"))?;
            (StatSpec::upper(f), risk_lower_exact(&r)?)
        }
    };
    let n = args.n as usize;
    let trials = args.trials as usize;
    let estimate = simulate_risk_with(n, &spec, trials, seed, Execution::Parallel)?;

    let mut warnings = Vec::new();
    if near_pole(spec.stress) && spec.side != TailSide::Both {
        warnings.push(format!(
            "stress {} is near a pole of the risk; the statistic is heavy-tailed and the standard error is unreliable",
            format_g17(spec.stress)
        ));
    }
    let probe = match &args.probe {
        Some(schedule) => Some(divergence_probe(
            spec.stress,
            n,
            schedule,
            seed,
            Execution::Parallel,
        )?),
        None => None,
    };
    let risk = exact.to_risk_value();
    let deviation_in_se = risk
        .value()
        .filter(|_| estimate.std_error > 0.0)
        .map(|r| (estimate.mean - r) / estimate.std_error);

    let text = match format {
        Format::Json => to_json(&SimulateReport {
            command: "simulate",
            estimate,
            risk,
            risk_exact: exact_text(&exact),
            deviation_in_se,
            probe,
            warnings: warnings.clone(),
        }),
        Format::Csv => match &probe {
            Some(steps) => {
                let rows: Vec<Vec<String>> = steps
                    .iter()
                    .map(|s| {
                        vec![
                            s.estimate.trials.to_string(),
                            format_g17(s.estimate.mean),
                            format_g17(s.estimate.std_error),
                            format_g17(s.max_value),
                        ]
                    })
                    .collect();
                to_csv(&["trials", "mean", "std_error", "max_value"], &rows)
            }
            None => {
                let mut row = vec![
                    estimate.n.to_string(),
                    estimate.trials.to_string(),
                    format_g17(estimate.mean),
                    format_g17(estimate.std_error),
                ];
                row.extend(risk_cells(&risk, &exact_text(&exact)));
                row.push(estimate.heavy_tailed.to_string());
                to_csv(
                    &[
                        "n",
                        "trials",
                        "mean",
                        "std_error",
                        "risk",
                        "risk_exact",
                        "divergent",
                        "heavy_tailed",
                    ],
                    &[row],
                )
            }
        },
    };
    Ok(Outcome { text, warnings })
}

#[derive(Serialize)]
struct OsdReport {
    command: &'static str,
    n: usize,
    nu: f64,
    mean: f64,
    variance: f64,
    moments: Option<Vec<f64>>,
    table: Option<Vec<OsdRow>>,
    sample: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct OsdRow {
    i: usize,
    pmf: f64,
    cdf: f64,
}

fn osd(args: &OsdArgs, format: Format, seed: u64) -> Result<Outcome, CliError> {
    let n = usize::try_from(args.n).map_err(|_| input_err("--n is too large"))?;
    let params = OsdParams::new(n, args.nu).map_err(|e| input_err(e.to_string()))?;
    let moments = args
        .moments
        .map(|k| {
            (0..=k)
                .map(|j| osd_moment(&params, j))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let table = if args.table {
        let pmf = osd_pmf_vector(&params);
        let rows = pmf
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(OsdRow {
                    i: i + 1,
                    pmf: p,
                    cdf: osd_cdf(&params, i + 1)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Some(rows)
    } else {
        None
    };
    let sample = args.sample.map(|count| osd_sample(&params, count, seed));
    let report = OsdReport {
        command: "osd",
        n,
        nu: args.nu,
        mean: osd_mean(&params),
        variance: osd_variance(&params),
        moments,
        table,
        sample,
    };

    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let requested = [
                report.table.is_some(),
                report.sample.is_some(),
                report.moments.is_some(),
            ];
            if requested.iter().filter(|&&r| r).count() > 1 {
                return Err(input_err(
                    "CSV output takes only one of --table, --sample, --moments",
                ));
            }
            if let Some(rows) = &report.table {
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| vec![r.i.to_string(), format_g17(r.pmf), format_g17(r.cdf)])
                    .collect();
                to_csv(&["i", "pmf", "cdf"], &body)
            } else if let Some(draws) = &report.sample {
                let body: Vec<Vec<String>> = draws.iter().map(|d| vec![d.to_string()]).collect();
                to_csv(&["value"], &body)
            } else if let Some(m) = &report.moments {
                let body: Vec<Vec<String>> = m
                    .iter()
                    .enumerate()
                    .map(|(k, v)| vec![k.to_string(), format_g17(*v)])
                    .collect();
                to_csv(&["k", "moment"], &body)
            } else {
                to_csv(
                    &["n", "nu", "mean", "variance"],
                    &[vec![
                        n.to_string(),
                        format_g17(args.nu),
                        format_g17(report.mean),
                        format_g17(report.variance),
                    ]],
                )
            }
        }
    };
    Ok(Outcome {
        text,
        warnings: Vec::new(),
    })
}

#[derive(Serialize)]
struct SelectReport {
    command: &'static str,
    weight_side: WeightSide,
    scan: ThresholdScan,
    warnings: Vec<String>,
}

fn select(args: &SelectArgs, format: Format, seed: u64) -> Result<Outcome, CliError> {
    let candidates: Vec<f64> = match (&args.grid, &args.candidates) {
        (Some(g), _) => parse_grid(g)
            .map_err(|e| input_err(format!("--grid: {e}")))?
            .iter()
            .map(to_f64)
            .collect(),
        (None, Some(c)) => c.clone(),
        (None, None) => return Err(input_err("one of --grid or --candidates is required")),
    };
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(input_err(format!(
            "--alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    let (stress, stress_f) = parse_stress("stat-a", &args.stat_a)?;
    let spec = match args.weight_side {
        WeightSide::High => StatSpec::upper(stress_f),
        WeightSide::Low => StatSpec::lower(stress_f),
    };
    let mut warnings = Vec::new();
    if risk_lower_exact(&stress)? == ExactRisk::Divergent {
        warnings.push(format!(
            "the stress-{} statistic has divergent risk and should not be used for tail testing; proceeding",
            format_rational(&stress)
        ));
    }
    let config = ThresholdConfig {
        spec,
        alpha: args.alpha,
        bootstrap_reps: args.reps,
        seed,
        min_count: args.min_count,
        rule: match args.rule {
            Rule::ForwardStop => StoppingRule::ForwardStop,
            Rule::StrongStop => StoppingRule::StrongStop,
        },
    };
    let sample = Sample::new(read_values(&args.input)?)?;
    let scan = select_threshold(&sample, &candidates, &config, Execution::Parallel)?;
    if let Some(d) = &scan.diagnostic {
        warnings.push(d.clone());
    }

    let text = match format {
        Format::Json => to_json(&SelectReport {
            command: "select-threshold",
            weight_side: args.weight_side,
            scan,
            warnings: warnings.clone(),
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = scan
                .candidates
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    vec![
                        format_g17(c.threshold),
                        c.excess_count.to_string(),
                        opt_g17(c.fit.map(|f| f.shape)),
                        opt_g17(c.fit.map(|f| f.scale)),
                        c.converged.map(|b| b.to_string()).unwrap_or_default(),
                        opt_g17(c.statistic),
                        opt_g17(c.p_value),
                        (scan.selected_index == Some(i)).to_string(),
                    ]
                })
                .collect();
            to_csv(
                &[
                    "threshold",
                    "excess_count",
                    "shape",
                    "scale",
                    "converged",
                    "statistic",
                    "p_value",
                    "selected",
                ],
                &rows,
            )
        }
    };
    Ok(Outcome { text, warnings })
}
