//! Convergence experiments: sample, build, evaluate the extended Laplacians
//! at fixed interior points, compare against the analytic limits, aggregate
//! errors and fit empirical rates.
//!
//! A cell is one (seed, n, h, lambda, kind) combination. Cells are
//! independent work units; the report is canonicalized by sorting, so the
//! output does not depend on the number of worker threads. Isolated-vertex
//! and empty-neighborhood conditions mark the affected cells failed and the
//! run continues.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::LaplacianKind;
use crate::io::write_atomic;
use crate::kernel::KernelProfile;
use crate::manifold::{Manifold, manifold_by_name};
use crate::neighborhood::NeighborhoodGraph;
use crate::numerics::{format_f64, mean, median, ols_fit};
use crate::oracle::{LimitSpec, TestFunction};

/// Environment variable capping the worker count (0 = automatic).
pub const THREADS_ENV: &str = "LAPLACE_LIMITS_THREADS";

/// Bandwidth selection: an explicit list or the shrinking schedule
/// h(n) = c (ln n / n)^{1/(m+4)}.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Bandwidth {
    Explicit(Vec<f64>),
    Schedule { c: f64 },
}

/// Where to evaluate the estimators.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum EvalPoints {
    /// The model's fixed deterministic interior grid.
    ModelGrid,
    /// The first `count` sample points of each run.
    Subsample { count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: String,
    pub kernel: String,
    pub function: String,
    pub lambdas: Vec<f64>,
    pub kinds: Vec<LaplacianKind>,
    pub ns: Vec<usize>,
    pub bandwidth: Bandwidth,
    pub eval_points: EvalPoints,
    pub boundary_margin_factor: f64,
    pub seeds: Vec<u64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.kinds.is_empty() || self.ns.is_empty() || self.seeds.is_empty()
        {
            return Err(Error::Config(
                "lambda, kinds, n and seeds must all be non-empty".into(),
            ));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 10) {
            return Err(Error::Config(format!("all n must be at least 10, got {n}")));
        }
        match &self.bandwidth {
            Bandwidth::Explicit(hs) => {
                if hs.is_empty() {
                    return Err(Error::Config("bandwidth list must be non-empty".into()));
                }
                if let Some(&h) = hs.iter().find(|&&h| h <= 0.0) {
                    return Err(Error::Config(format!("bandwidths must be positive, got {h}")));
                }
            }
            Bandwidth::Schedule { c } => {
                if *c <= 0.0 {
                    return Err(Error::Config(format!(
                        "schedule constant must be positive, got {c}"
                    )));
                }
            }
        }
        if self.boundary_margin_factor < 0.0 {
            return Err(Error::Config(format!(
                "boundary margin factor must be non-negative, got {}",
                self.boundary_margin_factor
            )));
        }
        if let EvalPoints::Subsample { count } = self.eval_points {
            if count == 0 {
                return Err(Error::Config("subsample count must be positive".into()));
            }
        }
        Ok(())
    }

    fn bandwidths_for(&self, n: usize, m: usize) -> Result<Vec<f64>> {
        match &self.bandwidth {
            Bandwidth::Explicit(hs) => Ok(hs.clone()),
            Bandwidth::Schedule { c } => Ok(vec![bandwidth_schedule(n, m, *c)?]),
        }
    }

    fn schedule_c(&self) -> Option<f64> {
        match &self.bandwidth {
            Bandwidth::Explicit(_) => None,
            Bandwidth::Schedule { c } => Some(*c),
        }
    }
}

/// h(n) = c (ln n / n)^{1/(m+4)}.
pub fn bandwidth_schedule(n: usize, m: usize, c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Config(format!(
            "schedule needs n >= 2 so that ln n > 0, got {n}"
        )));
    }
    if c <= 0.0 {
        return Err(Error::Config(format!("schedule constant must be positive, got {c}")));
    }
    if m == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    let nf = n as f64;
    Ok(c * (nf.ln() / nf).powf(1.0 / (m as f64 + 4.0)))
}

/// Keep points farther than beta * h * r_k from the boundary; boundaryless
/// models keep everything.
pub fn boundary_mask(
    model: &dyn Manifold,
    h: f64,
    beta: f64,
    r_k: f64,
    points: &[Vec<f64>],
) -> Vec<bool> {
    let margin = beta * h * r_k;
    points
        .iter()
        .map(|x| match model.boundary_distance(x) {
            None => true,
            Some(d) => d > margin,
        })
        .collect()
}

/// One evaluated (seed, n, h, lambda, kind, point) combination.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub seed: u64,
    pub n: usize,
    pub h: f64,
    pub lambda: f64,
    pub kind: LaplacianKind,
    pub point_id: usize,
    pub estimate: f64,
    pub limit: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// A cell that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub seed: u64,
    pub n: usize,
    pub h: f64,
    pub lambda: f64,
    pub kind: LaplacianKind,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<CellFailure>,
    /// Schedule constant when the bandwidth came from the schedule.
    pub schedule_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub n: usize,
    pub h: f64,
    pub lambda: f64,
    pub kind: LaplacianKind,
    pub median_abs_err: f64,
    pub mean_abs_err: f64,
    pub cells_failed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub lambda: f64,
    pub kind: LaplacianKind,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl ConvergenceReport {
    /// Per-(n, h, lambda, kind) medians and means of the absolute error,
    /// with the count of failed cells in each group.
    pub fn aggregates(&self) -> Vec<AggregateRow> {
        let mut keys: Vec<(usize, f64, f64, LaplacianKind)> = self
            .rows
            .iter()
            .map(|r| (r.n, r.h, r.lambda, r.kind))
            .chain(self.failures.iter().map(|f| (f.n, f.h, f.lambda, f.kind)))
            .collect();
        keys.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.total_cmp(&b.2))
                .then(a.3.cmp(&b.3))
        });
        keys.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1 && a.2 == b.2 && a.3 == b.3);
        keys.into_iter()
            .map(|(n, h, lambda, kind)| {
                let errs: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.n == n && r.h == h && r.lambda == lambda && r.kind == kind)
                    .map(|r| r.abs_err)
                    .collect();
                let cells_failed = self
                    .failures
                    .iter()
                    .filter(|f| f.n == n && f.h == h && f.lambda == lambda && f.kind == kind)
                    .count();
                let (med, mn) = if errs.is_empty() {
                    (f64::NAN, f64::NAN)
                } else {
                    (median(&errs), mean(&errs))
                };
                AggregateRow {
                    n,
                    h,
                    lambda,
                    kind,
                    median_abs_err: med,
                    mean_abs_err: mn,
                    cells_failed,
                }
            })
            .collect()
    }

    /// All (lambda, kind) pairs appearing in the rows, sorted.
    pub fn lambda_kind_pairs(&self) -> Vec<(f64, LaplacianKind)> {
        let mut pairs: Vec<(f64, LaplacianKind)> =
            self.rows.iter().map(|r| (r.lambda, r.kind)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        pairs.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        pairs
    }
}

/// OLS fit of ln(median abs err) against ln(n) for one (lambda, kind),
/// pooling seeds. Requires at least 3 distinct n with successful cells.
pub fn estimate_rate(
    report: &ConvergenceReport,
    lambda: f64,
    kind: LaplacianKind,
) -> Result<RateFit> {
    estimate_rate_filtered(report, lambda, kind, None)
}

/// Like [`estimate_rate`] but restricted to one seed when given.
pub fn estimate_rate_filtered(
    report: &ConvergenceReport,
    lambda: f64,
    kind: LaplacianKind,
    seed: Option<u64>,
) -> Result<RateFit> {
    let mut ns: Vec<usize> = report
        .rows
        .iter()
        .filter(|r| r.lambda == lambda && r.kind == kind && seed.is_none_or(|s| r.seed == s))
        .map(|r| r.n)
        .collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::TooFewSizes(ns.len()));
    }
    let mut xs = Vec::with_capacity(ns.len());
    let mut ys = Vec::with_capacity(ns.len());
    for n in ns {
        let errs: Vec<f64> = report
            .rows
            .iter()
            .filter(|r| {
                r.lambda == lambda && r.kind == kind && r.n == n && seed.is_none_or(|s| r.seed == s)
            })
            .map(|r| r.abs_err)
            .collect();
        xs.push((n as f64).ln());
        ys.push(median(&errs).ln());
    }
    let (slope, intercept, r2) = ols_fit(&xs, &ys);
    Ok(RateFit {
        lambda,
        kind,
        slope,
        intercept,
        r2,
    })
}

/// Run the experiment with the worker cap from `LAPLACE_LIMITS_THREADS`.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    run_convergence_with_threads(config, threads)
}

/// Run the experiment with an explicit worker cap (None or 0 = automatic).
pub fn run_convergence_with_threads(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<ConvergenceReport> {
    match threads {
        None | Some(0) => run_inner(config),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| run_inner(config))
        }
    }
}

fn run_inner(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let model = manifold_by_name(&config.model)?;
    let kernel = KernelProfile::by_name(&config.kernel)?;
    let func = TestFunction::by_name(&config.function)?;
    let m = model.intrinsic_dim();
    let moments = kernel.moments(m)?;

    let mut units: Vec<(u64, usize, f64)> = Vec::new();
    for &seed in &config.seeds {
        for &n in &config.ns {
            for h in config.bandwidths_for(n, m)? {
                units.push((seed, n, h));
            }
        }
    }

    let results: Vec<(Vec<ReportRow>, Vec<CellFailure>)> = units
        .par_iter()
        .map(|&(seed, n, h)| process_unit(config, model.as_ref(), &kernel, func, moments, seed, n, h))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        failures.extend(f);
    }
    rows.sort_by(|a, b| {
        a.seed
            .cmp(&b.seed)
            .then(a.n.cmp(&b.n))
            .then(a.h.total_cmp(&b.h))
            .then(a.lambda.total_cmp(&b.lambda))
            .then(a.kind.cmp(&b.kind))
            .then(a.point_id.cmp(&b.point_id))
    });
    failures.sort_by(|a, b| {
        a.seed
            .cmp(&b.seed)
            .then(a.n.cmp(&b.n))
            .then(a.h.total_cmp(&b.h))
            .then(a.lambda.total_cmp(&b.lambda))
            .then(a.kind.cmp(&b.kind))
    });
    Ok(ConvergenceReport {
        rows,
        failures,
        schedule_c: config.schedule_c(),
    })
}

#[allow(clippy::too_many_arguments)]
fn process_unit(
    config: &ExperimentConfig,
    model: &dyn Manifold,
    kernel: &KernelProfile,
    func: TestFunction,
    moments: crate::kernel::KernelMoments,
    seed: u64,
    n: usize,
    h: f64,
) -> Result<(Vec<ReportRow>, Vec<CellFailure>)> {
    // decouple the draws of different sample sizes: with a shared stream the
    // smaller sample would be a prefix of the larger one, correlating the
    // errors that the rate fit compares
    let sample_seed = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let points = model.sample(n, sample_seed);
    let eval_pts: Vec<Vec<f64>> = match config.eval_points {
        EvalPoints::ModelGrid => model.eval_grid(),
        EvalPoints::Subsample { count } => (0..count.min(n))
            .map(|i| points.row(i).to_vec())
            .collect(),
    };
    let mask = boundary_mask(
        model,
        h,
        config.boundary_margin_factor,
        kernel.support_radius(),
        &eval_pts,
    );

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let all_failed = |message: String| -> Vec<CellFailure> {
        let mut out = Vec::new();
        for &lambda in &config.lambdas {
            for &kind in &config.kinds {
                out.push(CellFailure {
                    seed,
                    n,
                    h,
                    lambda,
                    kind,
                    message: message.clone(),
                });
            }
        }
        out
    };

    let base = match NeighborhoodGraph::build(points, kernel.clone(), h, 0.0, model.intrinsic_dim())
    {
        Ok(g) => g,
        Err(e @ Error::IsolatedVertex { .. }) => {
            return Ok((rows, all_failed(e.to_string())));
        }
        Err(e) => return Err(e),
    };
    let f_samples: Vec<f64> = (0..base.n())
        .map(|i| func.eval(&base.points().row(i).to_vec()))
        .collect();

    for &lambda in &config.lambdas {
        let graph = base.with_lambda(lambda);
        let spec = LimitSpec {
            lambda,
            moments,
            model,
        };
        let f = |x: &[f64]| func.eval(x);
        for &kind in &config.kinds {
            let mut cell_rows = Vec::new();
            let mut failed = None;
            for (point_id, x) in eval_pts.iter().enumerate() {
                if !mask[point_id] {
                    continue;
                }
                let f_at_x = func.eval(x);
                match graph.laplacian_at(kind, x, &f_samples, f_at_x) {
                    Ok(estimate) => {
                        let limit = spec.limit(kind, &f, x)?;
                        let abs_err = (estimate - limit).abs();
                        let rel_err = if abs_err == 0.0 { 0.0 } else { abs_err / limit.abs() };
                        cell_rows.push(ReportRow {
                            seed,
                            n,
                            h,
                            lambda,
                            kind,
                            point_id,
                            estimate,
                            limit,
                            abs_err,
                            rel_err,
                        });
                    }
                    Err(e @ (Error::EmptyNeighborhood | Error::ZeroDegree(_))) => {
                        failed = Some(e.to_string());
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            match failed {
                Some(message) => failures.push(CellFailure {
                    seed,
                    n,
                    h,
                    lambda,
                    kind,
                    message,
                }),
                None => rows.extend(cell_rows),
            }
        }
    }
    Ok((rows, failures))
}

/// `seed,n,h,lambda,kind,point_id,estimate,limit,abs_err,rel_err`
pub fn write_rows_csv(path: &std::path::Path, report: &ConvergenceReport) -> Result<()> {
    let mut out = String::from("seed,n,h,lambda,kind,point_id,estimate,limit,abs_err,rel_err\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.seed,
            r.n,
            format_f64(r.h),
            format_f64(r.lambda),
            r.kind.as_str(),
            r.point_id,
            format_f64(r.estimate),
            format_f64(r.limit),
            format_f64(r.abs_err),
            format_f64(r.rel_err),
        ));
    }
    write_atomic(path, &out)
}

/// `n,h,lambda,kind,median_abs_err,mean_abs_err,cells_failed`
pub fn write_aggregates_csv(path: &std::path::Path, report: &ConvergenceReport) -> Result<()> {
    let mut out = String::from("n,h,lambda,kind,median_abs_err,mean_abs_err,cells_failed\n");
    for a in report.aggregates() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            a.n,
            format_f64(a.h),
            format_f64(a.lambda),
            a.kind.as_str(),
            format_f64(a.median_abs_err),
            format_f64(a.mean_abs_err),
            a.cells_failed,
        ));
    }
    write_atomic(path, &out)
}

/// `lambda,kind,slope,intercept,r2`; pairs with fewer than 3 sample sizes
/// are omitted.
pub fn write_rates_csv(path: &std::path::Path, report: &ConvergenceReport) -> Result<()> {
    let mut out = String::from("lambda,kind,slope,intercept,r2\n");
    for (lambda, kind) in report.lambda_kind_pairs() {
        match estimate_rate(report, lambda, kind) {
            Ok(fit) => out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_f64(lambda),
                kind.as_str(),
                format_f64(fit.slope),
                format_f64(fit.intercept),
                format_f64(fit.r2),
            )),
            Err(Error::TooFewSizes(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    write_atomic(path, &out)
}
