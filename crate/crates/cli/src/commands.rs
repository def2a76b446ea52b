//! Command implementations. Each one reads its inputs, runs the core
//! operation, and emits a single table.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use demandkit::preference::{
    check_completeness, check_continuity, check_local_nonsatiation, check_strict_convexity,
    check_strong_monotonicity, check_transitivity,
};
use demandkit::{
    extract_value, pde_residual, solve_demand, BudgetSet, Bundle, ConsumerProblem,
    ExtractionConfig, PreferenceSpec, PriceSystem, ProblemSpec, SamplingConfig, SolveStatus,
    SolverConfig, UtilitySpec,
};

use rand::Rng;
use rand::SeedableRng;

use crate::output::{num, RunTimer, Table};

/// How a command run ended, before mapping to a process exit code.
pub enum Outcome {
    Success,
    IterationLimit,
    RowFailures,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {} file {}", what, path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {} file {}", what, path.display()))
}

/// Error text as a CSV-safe cell.
fn csv_safe(err: &dyn std::fmt::Display) -> String {
    err.to_string().replace(',', ";")
}

/// Warns on legal-but-flagged parameter regimes.
fn warn_on_flagged(spec: &UtilitySpec) {
    if let UtilitySpec::Exponential { alpha, .. } = spec {
        if *alpha < 1.0 {
            eprintln!(
                "warning: exponential base {alpha} < 1 yields a strictly decreasing utility \
                 (violates strong monotonicity)"
            );
        }
    }
}

pub fn demand(
    problem_path: &Path,
    tol: f64,
    max_iters: usize,
    out: Option<&Path>,
) -> Result<Outcome> {
    let timer = RunTimer::start();
    let spec: ProblemSpec = read_json(problem_path, "problem")?;
    warn_on_flagged(&spec.utility);
    let problem = spec.build()?;
    let cfg = SolverConfig {
        tolerance: tol,
        max_iterations: max_iters,
        ..SolverConfig::default()
    };
    let solution = solve_demand(&problem, &cfg)?;

    let n = solution.bundle.dimension();
    let mut header = vec![
        "status".to_string(),
        "v".to_string(),
        "lambda".to_string(),
        "foc_residual_norm".to_string(),
        "budget_gap".to_string(),
        "iterations".to_string(),
    ];
    header.extend((1..=n).map(|i| format!("x{i}")));
    let mut table = Table::new(header);
    let mut row = vec![
        solution.status.name().to_string(),
        num(solution.indirect_value),
        num(solution.multiplier),
        num(solution.foc_residual_norm),
        num(solution.budget_gap),
        solution.iterations.to_string(),
    ];
    row.extend(solution.bundle.coords().iter().map(|&c| num(c)));
    table.push_row(row);
    timer.emit(&table, "demand", &[problem_path], None, out)?;

    Ok(match solution.status {
        SolveStatus::Converged | SolveStatus::DegenerateFace => Outcome::Success,
        SolveStatus::IterationLimit => Outcome::IterationLimit,
    })
}

fn render_counterexample(bundles: &Option<Vec<Bundle>>) -> String {
    match bundles {
        None => String::new(),
        Some(list) => list
            .iter()
            .map(|b| {
                b.coords()
                    .iter()
                    .map(|c| format!("{c}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("|"),
    }
}

pub fn axioms(
    preference_path: &Path,
    samples: usize,
    seed: u64,
    box_upper: f64,
    epsilon: f64,
    indifference_tol: f64,
    out: Option<&Path>,
) -> Result<Outcome> {
    let timer = RunTimer::start();
    let spec: PreferenceSpec = read_json(preference_path, "preference")?;
    if let PreferenceSpec::Induced { utility } = &spec {
        warn_on_flagged(utility);
    }
    let relation = spec.build()?;
    let cfg = SamplingConfig::new(samples, box_upper, seed, epsilon, indifference_tol)
        .map_err(|msg| anyhow::anyhow!("invalid sampling config: {msg}"))?;

    let reports = [
        check_completeness(relation.as_ref(), &cfg),
        check_transitivity(relation.as_ref(), &cfg),
        check_continuity(relation.as_ref(), &cfg),
        check_strong_monotonicity(relation.as_ref(), &cfg),
        check_strict_convexity(relation.as_ref(), &cfg),
        check_local_nonsatiation(relation.as_ref(), &cfg),
    ];

    let mut table = Table::new(vec![
        "axiom",
        "verdict",
        "samples_used",
        "vacuous",
        "candidates_per_point",
        "counterexample",
    ]);
    for report in &reports {
        table.push_row(vec![
            report.axiom.name().to_string(),
            report.verdict.to_string(),
            report.samples_used.to_string(),
            report.vacuous.to_string(),
            report
                .candidates_per_point
                .map(|k| k.to_string())
                .unwrap_or_default(),
            render_counterexample(&report.counterexample),
        ]);
    }
    timer.emit(&table, "axioms", &[preference_path], Some(seed), out)?;
    // Violations are data, not errors.
    Ok(Outcome::Success)
}

#[derive(Deserialize)]
struct BundlesFile {
    bundles: Vec<Vec<f64>>,
}

pub fn extract(
    preference_path: &Path,
    bundles_path: &Path,
    tol: f64,
    max_bracket: f64,
    out: Option<&Path>,
) -> Result<Outcome> {
    let timer = RunTimer::start();
    let spec: PreferenceSpec = read_json(preference_path, "preference")?;
    let relation = spec.build()?;
    let bundles: BundlesFile = read_json(bundles_path, "bundles")?;
    if bundles.bundles.is_empty() {
        bail!("bundles file {} lists no bundles", bundles_path.display());
    }
    let cfg = ExtractionConfig::new(tol, max_bracket, 200)
        .map_err(|msg| anyhow::anyhow!("invalid extraction config: {msg}"))?;

    let mut table = Table::new(vec!["bundle", "u", "bracket_width", "error"]);
    let mut failures = false;
    for coords in &bundles.bundles {
        let label = coords
            .iter()
            .map(|c| format!("{c}"))
            .collect::<Vec<_>>()
            .join(" ");
        let bundle = match Bundle::new(coords.clone()) {
            Ok(b) => b,
            Err(err) => {
                failures = true;
                table.push_row(vec![label, String::new(), String::new(), csv_safe(&err)]);
                continue;
            }
        };
        match extract_value(relation.as_ref(), &bundle, &cfg) {
            Ok(ray) => table.push_row(vec![
                label,
                num(ray.value),
                num(ray.bracket_high - ray.bracket_low),
                String::new(),
            ]),
            Err(err) => {
                failures = true;
                table.push_row(vec![label, String::new(), String::new(), csv_safe(&err)]);
            }
        }
    }
    timer.emit(
        &table,
        "extract",
        &[preference_path, bundles_path],
        None,
        out,
    )?;
    Ok(if failures {
        Outcome::RowFailures
    } else {
        Outcome::Success
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PdeCheckFile {
    utility: UtilitySpec,
    #[serde(default)]
    p: Option<Vec<f64>>,
}

pub fn pde_check(
    utility_path: &Path,
    grid_points: usize,
    grid_low: f64,
    grid_high: f64,
    seed: u64,
    tol: f64,
    out: Option<&Path>,
) -> Result<Outcome> {
    let timer = RunTimer::start();
    let file: PdeCheckFile = read_json(utility_path, "utility")?;
    warn_on_flagged(&file.utility);
    let utility = demandkit::make_utility(&file.utility)?;
    let price_list = match (&file.p, file.utility.family_prices()) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => p.to_vec(),
        (None, None) => bail!(
            "the {} family has no embedded prices; supply `p` in {}",
            "cobb_douglas",
            utility_path.display()
        ),
    };
    let prices = PriceSystem::new(price_list)?;
    if grid_low <= 0.0 || grid_high <= grid_low {
        bail!("grid must satisfy 0 < grid_low < grid_high");
    }
    if grid_points == 0 {
        bail!("grid_points must be at least 1");
    }

    let n = utility.dimension();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    let mut sum_residual = 0.0;
    let mut max_scaled: f64 = 0.0;
    for _ in 0..grid_points {
        let coords: Vec<f64> = (0..n).map(|_| rng.gen_range(grid_low..grid_high)).collect();
        let x = Bundle::new(coords)?;
        let residual = pde_residual(utility.as_ref(), &prices, &x)?.abs();
        let grad_norm = utility
            .gradient(&x)
            .iter()
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt();
        let scale = 1.0 + grad_norm * x.norm();
        max_residual = max_residual.max(residual);
        sum_residual += residual;
        max_scaled = max_scaled.max(residual / scale);
    }
    let mean_residual = sum_residual / grid_points as f64;
    let pass = max_scaled <= tol;

    let mut table = Table::new(vec![
        "grid_points",
        "max_abs_residual",
        "mean_abs_residual",
        "max_scaled_residual",
        "threshold",
        "verdict",
    ]);
    table.push_row(vec![
        grid_points.to_string(),
        num(max_residual),
        num(mean_residual),
        num(max_scaled),
        num(tol),
        if pass { "pass" } else { "fail" }.to_string(),
    ]);
    timer.emit(&table, "pde-check", &[utility_path], Some(seed), out)?;
    Ok(Outcome::Success)
}

pub fn indirect_sweep(
    problem_path: &Path,
    param: &str,
    from: f64,
    to: f64,
    points: usize,
    tol: f64,
    out: Option<&Path>,
) -> Result<Outcome> {
    let timer = RunTimer::start();
    let spec: ProblemSpec = read_json(problem_path, "problem")?;
    warn_on_flagged(&spec.utility);
    let utility = demandkit::make_utility(&spec.utility)?;
    let n = utility.dimension();

    enum Sweep {
        Income,
        Price(usize),
    }
    let sweep = if param == "r" {
        Sweep::Income
    } else if let Some(index) = param
        .strip_prefix('p')
        .and_then(|s| s.parse::<usize>().ok())
    {
        if index == 0 || index > n {
            bail!("price index out of range: {param} (dimension {n})");
        }
        Sweep::Price(index - 1)
    } else {
        bail!("unknown sweep parameter `{param}`; use `r` or `p<i>`");
    };
    if points < 1 {
        bail!("points must be at least 1");
    }
    if from <= 0.0 && matches!(sweep, Sweep::Price(_)) {
        bail!("price sweeps need a positive range");
    }
    if from < 0.0 {
        bail!("sweep range must be nonnegative");
    }

    let cfg = SolverConfig {
        tolerance: tol,
        ..SolverConfig::default()
    };

    let mut header = vec![
        "param".to_string(),
        "value".to_string(),
        "status".to_string(),
        "v".to_string(),
    ];
    header.extend((1..=n).map(|i| format!("x{i}")));
    let mut table = Table::new(header);
    let mut worst = Outcome::Success;

    for k in 0..points {
        let value = if points == 1 {
            from
        } else {
            from + (to - from) * k as f64 / (points - 1) as f64
        };
        let (prices, income) = match sweep {
            Sweep::Income => (spec.p.clone(), value),
            Sweep::Price(i) => {
                let mut p = spec.p.clone();
                p[i] = value;
                (p, spec.r)
            }
        };
        let mut row = vec![param.to_string(), num(value)];
        let solved = PriceSystem::new(prices)
            .map_err(demandkit::DemandError::from)
            .and_then(|prices| {
                let budget = BudgetSet::new(prices, income)?;
                let problem = ConsumerProblem::new(utility.clone(), budget)?;
                solve_demand(&problem, &cfg)
            });
        match solved {
            Ok(solution) => {
                row.push(solution.status.name().to_string());
                row.push(num(solution.indirect_value));
                row.extend(solution.bundle.coords().iter().map(|&c| num(c)));
                if solution.status == SolveStatus::IterationLimit {
                    worst = Outcome::IterationLimit;
                }
            }
            Err(err) => {
                row.push(format!("error:{}", csv_safe(&err)));
                row.push(String::new());
                row.extend(std::iter::repeat_n(String::new(), n));
                worst = Outcome::IterationLimit;
            }
        }
        table.push_row(row);
    }
    timer.emit(&table, "indirect-sweep", &[problem_path], None, out)?;
    Ok(worst)
}
