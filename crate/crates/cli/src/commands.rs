//! Subcommand bodies. Each returns a [`Report`]; writing is left to the caller.

use std::path::PathBuf;

use despar::desparsify::{desparsified_lasso, DesparsifyConfig};
use despar::diagnostics::{
    compatibility_constant, error_decay_study, sparsity_profile, CompatibilityMethod, DecayMetric, DecayRow,
};
use despar::hac::{default_bandwidth, HacEstimate, DEFAULT_DELTA_Q};
use despar::inference::{infer, Restriction};
use despar::simulate::{
    default_targets, run_coverage_experiment_with_progress, run_granger_experiment_with_progress, ExperimentSettings,
    ScenarioConfig, TableRow,
};
use despar::solver::{fit_auto, fit_lasso, fit_path, information_criterion, lambda_grid, select_index};
use despar::{Criterion, Error, LambdaChoice, LassoFit};
use serde::Serialize;

use crate::args::{
    BandwidthArg, DecayArgs, DiagnoseArgs, FitArgs, InferArgs, LambdaArg, MethodArg, MetricArg, SelectionArgs,
    SimulateArgs,
};
use crate::csvio::{read_restriction, read_table, to_csv, Table};
use crate::error::{CliError, CliResult};

/// Output of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: String,
    pub csv: Option<String>,
    /// Whether standard output gets the CSV rather than the JSON.
    pub csv_to_stdout: bool,
    pub inputs: Vec<PathBuf>,
    pub seed: Option<u64>,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn lambda_choice(arg: LambdaArg, criterion: Criterion) -> LambdaChoice {
    match arg {
        LambdaArg::Auto => LambdaChoice::Auto(criterion),
        LambdaArg::Value(v) => LambdaChoice::Fixed(v),
    }
}

fn progress_printer(quiet: bool, label: String) -> impl Fn(usize, usize) + Sync {
    move |done, total| {
        let step = (total / 20).max(1);
        if !quiet && (done % step == 0 || done == total) {
            eprintln!("{label}: {done}/{total} replications");
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct IcRow {
    pub lambda: f64,
    pub df: usize,
    pub rss: f64,
    pub ic: f64,
    pub eligible: bool,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub response: String,
    pub t: usize,
    pub n: usize,
    pub selection: String,
    pub lambda: f64,
    pub selected_index: Option<usize>,
    pub intercept: f64,
    pub support: Vec<String>,
    pub coefficients: Vec<Coefficient>,
    pub rss: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub ic_table: Vec<IcRow>,
}

fn ic_row(fit: &LassoFit, criterion: Criterion, n: usize, t: usize) -> IcRow {
    IcRow {
        lambda: fit.lambda,
        df: fit.df(),
        rss: fit.rss(),
        ic: information_criterion(fit.rss(), fit.df(), criterion, n, t),
        eligible: fit.eligible,
        converged: fit.converged,
    }
}

/// IC path plus selected index; the selection matches `select_by_ic`.
fn auto_path(table: &Table, selection: &SelectionArgs, standardize: bool) -> CliResult<(Vec<LassoFit>, usize)> {
    let data = &table.data;
    let config = selection.solver(standardize);
    let grid = match lambda_grid(data, config.grid_size) {
        Ok(g) => g,
        Err(Error::DegenerateGrid) => vec![1.0 / (10.0 * data.t() as f64)],
        Err(e) => return Err(e.into()),
    };
    let path = fit_path(data, &grid, &config)?;
    let idx = select_index(&path, selection.criterion(), data.n(), data.t())?;
    Ok((path, idx))
}

pub fn fit(args: &FitArgs) -> CliResult<Report> {
    let table = read_table(&args.input)?;
    let data = &table.data;
    let criterion = args.selection.criterion();
    let (fit, selected_index, ic_table, selection) = match args.lambda {
        LambdaArg::Value(lambda) => {
            let fit = fit_lasso(data, lambda, &args.selection.solver(args.standardize), None)?;
            let row = ic_row(&fit, criterion, data.n(), data.t());
            (fit, None, vec![row], "fixed".to_string())
        }
        LambdaArg::Auto => {
            let (path, idx) = auto_path(&table, &args.selection, args.standardize)?;
            let rows = path.iter().map(|f| ic_row(f, criterion, data.n(), data.t())).collect();
            (path[idx].clone(), Some(idx), rows, criterion.to_string())
        }
    };
    fit.check_converged()?;
    let report = FitReport {
        response: table.response.clone(),
        t: data.t(),
        n: data.n(),
        selection,
        lambda: fit.lambda,
        selected_index,
        intercept: fit.intercept,
        support: fit.support.iter().map(|&j| table.regressors[j].clone()).collect(),
        coefficients: table
            .regressors
            .iter()
            .zip(fit.beta.iter())
            .map(|(name, &value)| Coefficient {
                name: name.clone(),
                value,
            })
            .collect(),
        rss: fit.rss(),
        objective: fit.objective,
        iterations: fit.iterations,
        converged: fit.converged,
        ic_table,
    };
    Ok(Report {
        json: json(&report),
        csv: Some(to_csv(&report.coefficients)?),
        csv_to_stdout: false,
        inputs: vec![args.input.clone()],
        seed: None,
    })
}

#[derive(Debug, Serialize)]
pub struct TargetRow {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub z: f64,
    pub nodewise_lambda: f64,
    pub tau_sq: f64,
}

#[derive(Debug, Serialize)]
pub struct WaldRow {
    pub columns: Vec<String>,
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

#[derive(Debug, Serialize)]
pub struct InferReport {
    pub response: String,
    pub t: usize,
    pub n: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub bandwidth: usize,
    pub targets: Vec<TargetRow>,
    pub wald: Option<WaldRow>,
}

pub fn infer_cmd(args: &InferArgs) -> CliResult<Report> {
    let table = read_table(&args.input)?;
    let data = &table.data;
    let h = args
        .targets
        .iter()
        .map(|name| table.column_index(name))
        .collect::<CliResult<Vec<usize>>>()?;
    let restriction = match &args.restrict {
        Some(path) => {
            let (names, r, q) = read_restriction(path)?;
            let cols = names
                .iter()
                .map(|name| {
                    let j = table.column_index(name)?;
                    if h.contains(&j) {
                        Ok(j)
                    } else {
                        Err(CliError::Input(format!(
                            "restricted column '{name}' is not among the targets"
                        )))
                    }
                })
                .collect::<CliResult<Vec<usize>>>()?;
            Some((names, Restriction::new(cols, r, q)?))
        }
        None => None,
    };
    let criterion = args.selection.criterion();
    let config = DesparsifyConfig {
        nodewise_lambda: lambda_choice(args.nodewise_lambda, criterion),
        solver: args.selection.solver(false),
    };
    let est = desparsified_lasso(data, lambda_choice(args.lambda, criterion), &h, &config)?;
    est.beta_init.check_converged()?;
    if let Some(f) = est.nodewise.fits.iter().find(|f| !f.converged) {
        return Err(Error::NonConvergence {
            lambda: f.lambda_j,
            iterations: config.solver.max_iter,
        }
        .into());
    }
    let q = match args.bandwidth {
        BandwidthArg::Auto => default_bandwidth(data.t(), DEFAULT_DELTA_Q),
        BandwidthArg::Fixed(q) => q,
    };
    let hac = HacEstimate::from_estimate(&est, q)?;
    let result = infer(&est, &hac, args.alpha, restriction.as_ref().map(|(_, r)| r))?;
    let targets: Vec<TargetRow> = args
        .targets
        .iter()
        .enumerate()
        .map(|(i, name)| TargetRow {
            name: name.clone(),
            estimate: result.b_h[i],
            se: result.se[i],
            ci_lower: result.ci_lower[i],
            ci_upper: result.ci_upper[i],
            z: result.z_stats[i],
            nodewise_lambda: est.nodewise.fits[i].lambda_j,
            tau_sq: est.nodewise.fits[i].tau_sq,
        })
        .collect();
    let report = InferReport {
        response: table.response.clone(),
        t: data.t(),
        n: data.n(),
        lambda: est.beta_init.lambda,
        alpha: args.alpha,
        bandwidth: result.bandwidth,
        wald: result.wald.as_ref().map(|w| WaldRow {
            columns: restriction.as_ref().map(|(n, _)| n.clone()).unwrap_or_default(),
            statistic: w.statistic,
            p_value: w.p_value,
            dof: w.dof,
        }),
        targets,
    };
    let mut inputs = vec![args.input.clone()];
    inputs.extend(args.restrict.clone());
    Ok(Report {
        json: json(&report),
        csv: Some(to_csv(&report.targets)?),
        csv_to_stdout: false,
        inputs,
        seed: None,
    })
}

#[derive(Debug, Serialize)]
pub struct SimulateReport<'a> {
    pub config: &'a ScenarioConfig,
    pub settings: &'a ExperimentSettings,
    pub rows: &'a [TableRow],
}

pub fn simulate_cmd(args: &SimulateArgs, quiet: bool) -> CliResult<Report> {
    let config = ScenarioConfig {
        kind: args.scenario,
        n: args.n,
        t: args.t,
        replications: args.reps,
        seed: args.seed,
        burn_in: args.burn_in,
    };
    config.validate()?;
    let criterion = args.selection.criterion();
    let settings = ExperimentSettings {
        criterion,
        nodewise_criterion: criterion,
        alpha: args.alpha,
        solver: args.selection.solver(false),
        ..Default::default()
    };
    let progress = progress_printer(quiet, format!("{} N={} T={}", config.kind, config.n, config.t));
    let rows: Vec<TableRow> = if config.kind.is_var() {
        let row = run_granger_experiment_with_progress(&config, &settings, Some(&progress))?;
        vec![TableRow::from(&row)]
    } else {
        let targets = args.targets.clone().unwrap_or_else(|| default_targets(config.kind));
        run_coverage_experiment_with_progress(&config, &targets, &settings, Some(&progress))?
            .iter()
            .map(TableRow::from)
            .collect()
    };
    Ok(Report {
        json: json(&SimulateReport {
            config: &config,
            settings: &settings,
            rows: &rows,
        }),
        csv: Some(to_csv(&rows)?),
        csv_to_stdout: true,
        inputs: vec![],
        seed: Some(config.seed),
    })
}

#[derive(Debug, Serialize)]
pub struct DecayReport<'a> {
    pub config: &'a ScenarioConfig,
    pub metric: MetricArg,
    pub rows: &'a [DecayRow],
}

pub fn decay_cmd(args: &DecayArgs) -> CliResult<Report> {
    let config = ScenarioConfig {
        kind: args.scenario,
        n: args.n,
        t: args.t_list.first().copied().unwrap_or(0),
        replications: args.reps,
        seed: args.seed,
        burn_in: despar::simulate::DEFAULT_BURN_IN,
    };
    for &t in &args.t_list {
        ScenarioConfig { t, ..config.clone() }.validate()?;
    }
    let settings = ExperimentSettings {
        criterion: args.selection.criterion(),
        solver: args.selection.solver(false),
        ..Default::default()
    };
    let metric = match args.metric {
        MetricArg::L1 => DecayMetric::L1Estimation,
        MetricArg::Prediction => DecayMetric::Prediction,
    };
    let rows = error_decay_study(&config, &args.t_list, metric, &settings)?;
    Ok(Report {
        json: json(&DecayReport {
            config: &config,
            metric: args.metric,
            rows: &rows,
        }),
        csv: Some(to_csv(&rows)?),
        csv_to_stdout: true,
        inputs: vec![],
        seed: Some(args.seed),
    })
}

#[derive(Debug, Serialize)]
pub struct SparsityReport {
    pub r: f64,
    pub s_r: f64,
    pub lambda: f64,
    pub s_lambda: Vec<String>,
    pub cardinality: usize,
}

#[derive(Debug, Serialize)]
pub struct CompatibilityReport {
    pub support: Vec<String>,
    pub value: f64,
    pub method: CompatibilityMethod,
    pub heuristic: bool,
    pub eigen_lower_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct DiagnoseReport {
    pub t: usize,
    pub n: usize,
    pub lambda: f64,
    pub sparsity: SparsityReport,
    pub compatibility: CompatibilityReport,
}

pub fn diagnose_cmd(args: &DiagnoseArgs) -> CliResult<Report> {
    if !(0.0..1.0).contains(&args.r) {
        return Err(CliError::Input(format!("r must lie in [0, 1), got {}", args.r)));
    }
    let table = read_table(&args.input)?;
    let data = &table.data;
    let fit = fit_auto(data, args.selection.criterion(), &args.selection.solver(false))?;
    fit.check_converged()?;
    let s = match &args.support {
        Some(names) => names
            .iter()
            .map(|n| table.column_index(n))
            .collect::<CliResult<Vec<usize>>>()?,
        None => fit.support.clone(),
    };
    let method = match args.method {
        MethodArg::Exhaustive => CompatibilityMethod::ExhaustiveSmall,
        MethodArg::Sampled => CompatibilityMethod::Sampled {
            samples: args.samples,
            seed: args.seed,
        },
    };
    let compat = compatibility_constant(&data.gram(), &s, method)?;
    let profile = sparsity_profile(fit.beta.view(), args.r, fit.lambda);
    let names = |idx: &[usize]| idx.iter().map(|&j| table.regressors[j].clone()).collect::<Vec<_>>();
    let report = DiagnoseReport {
        t: data.t(),
        n: data.n(),
        lambda: fit.lambda,
        sparsity: SparsityReport {
            r: profile.r,
            s_r: profile.s_r,
            lambda: fit.lambda,
            s_lambda: names(&profile.s_lambda),
            cardinality: profile.cardinality,
        },
        compatibility: CompatibilityReport {
            support: names(&s),
            value: compat.value,
            method: compat.method,
            heuristic: compat.heuristic,
            eigen_lower_bound: compat.eigen_lower_bound,
        },
    };
    Ok(Report {
        json: json(&report),
        csv: None,
        csv_to_stdout: false,
        inputs: vec![args.input.clone()],
        seed: matches!(args.method, MethodArg::Sampled).then_some(args.seed),
    })
}
