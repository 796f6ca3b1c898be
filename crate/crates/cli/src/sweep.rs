//! Sweep driver: evaluates every configured point and emits CSV rows.

use std::io::Write;

use rayon::prelude::*;
use ringcap::analytics::Analysis;
use ringcap::{
    estimate_utilization, exact_utilization, CapacityReport, CriticalBounds, Direction,
    Recommendation, RingTopology, SegmentId, Strategy, Threshold, TrafficModel,
};
use serde::Serialize;

use crate::config::{
    ConfigError, Engine, ExperimentConfig, SegmentSelection, StrategyChoice, SweepPoint,
};

/// Bumped whenever a column is added, removed or renamed.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// One CSV row. Every field is preformatted so that absent values are empty
/// and unbounded thresholds read `inf`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    #[serde(rename = "N")]
    pub n_nodes: String,
    #[serde(rename = "Lambda")]
    pub n_wavelengths: String,
    pub eta: String,
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
    pub fanout_preset: String,
    pub strategy: String,
    pub segment_dir: String,
    pub segment_index: String,
    pub segment_wavelength: String,
    pub util_lower: String,
    pub util_upper: String,
    pub util_approx: String,
    pub util_exact: String,
    pub util_sim: String,
    pub ci_halfwidth: String,
    pub samples: String,
    pub capacity: String,
    pub gamma_th1: String,
    pub gamma_th2: String,
    pub recommendation: String,
    pub seed: String,
    pub converged: String,
}

/// Rows in output order plus the number of rows flagged as not converged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutput {
    pub rows: Vec<Row>,
    pub flagged: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("N = {n_nodes}, beta = {beta}, gamma = {gamma}: {source}")]
    Point {
        n_nodes: usize,
        beta: f64,
        gamma: f64,
        source: ringcap::Error,
    },
    #[error("thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing CSV: {0}")]
    Io(#[from] std::io::Error),
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn fmt_threshold(t: &Threshold<f64>) -> String {
    fmt_f64(t.to_f64())
}

/// Seed used for the `index`-th sweep point.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// The traffic model at one sweep point.
pub fn build_model(p: &SweepPoint) -> Result<TrafficModel<f64>, SweepError> {
    let (mu, nu, kappa) = p.fanout.build(p.n_nodes)?;
    TrafficModel::new(p.alpha, p.beta, p.gamma, mu, nu, kappa).map_err(|e| point_err(p, e))
}

fn point_err(p: &SweepPoint, source: ringcap::Error) -> SweepError {
    SweepError::Point {
        n_nodes: p.n_nodes,
        beta: p.beta,
        gamma: p.gamma,
        source,
    }
}

/// Per-segment values produced by the configured engine for one strategy.
enum EngineResult {
    Analytic,
    Simulated(ringcap::UtilizationMatrix),
    Exact(ringcap::ExactUtilization<f64>),
}

impl EngineResult {
    fn max(&self) -> Option<(SegmentId, f64)> {
        match self {
            EngineResult::Analytic => None,
            EngineResult::Simulated(m) => m.argmax(),
            EngineResult::Exact(e) => e.max(),
        }
    }
}

struct StrategyRun {
    strategy: Strategy,
    engine: EngineResult,
    /// Maximum utilization by which the strategy is judged.
    max_util: Option<f64>,
}

struct PointAnalysis {
    topology: RingTopology,
    critical: Vec<CriticalBounds<f64>>,
    report: Option<CapacityReport<f64>>,
    th1: Threshold<f64>,
    th2: Threshold<f64>,
    recommendation: Recommendation,
    oc_bound: f64,
}

fn analyse(
    cfg: &ExperimentConfig,
    p: &SweepPoint,
) -> Result<(PointAnalysis, TrafficModel<f64>), SweepError> {
    let topology =
        RingTopology::new(p.n_nodes, cfg.topology.wavelengths).map_err(|e| point_err(p, e))?;
    let model = build_model(p)?;
    let an = Analysis::new(&topology, &model).map_err(|e| point_err(p, e))?;
    let mut critical = vec![
        an.bounds_segment_1_1(),
        an.bounds_segment_l_l(),
        an.bounds_segment_n_l(),
    ];
    // With one wavelength the first two critical segments coincide.
    critical.dedup_by(|a, b| a.segment == b.segment);
    let (th1, th2) = an.thresholds();
    let analysis = PointAnalysis {
        critical,
        report: an.max_utilization_sp().ok(),
        recommendation: an.recommend_routing(),
        oc_bound: an.oc_upper_bound(),
        th1,
        th2,
        topology,
    };
    Ok((analysis, model))
}

fn run_strategy(
    cfg: &ExperimentConfig,
    p: &SweepPoint,
    pa: &PointAnalysis,
    model: &TrafficModel<f64>,
    strategy: Strategy,
    seed: u64,
) -> Result<StrategyRun, SweepError> {
    let engine = match cfg.run.engine {
        Engine::Analytic => EngineResult::Analytic,
        Engine::Simulate => {
            let rule = cfg.stop.rule(cfg.run.threads);
            EngineResult::Simulated(
                estimate_utilization(&pa.topology, model, strategy, seed, &rule)
                    .map_err(|e| point_err(p, e))?,
            )
        }
        Engine::Oracle => EngineResult::Exact(
            exact_utilization(&pa.topology, model, strategy).map_err(|e| point_err(p, e))?,
        ),
    };
    let max_util = match (&engine, strategy) {
        (EngineResult::Analytic, Strategy::ShortestPath) => {
            pa.report.as_ref().map(|r| r.max_util_approx)
        }
        (EngineResult::Analytic, Strategy::OneCopy) => Some(pa.oc_bound),
        (other, _) => other.max().map(|(_, v)| v),
    };
    Ok(StrategyRun {
        strategy,
        engine,
        max_util,
    })
}

fn strategies_for(choice: StrategyChoice) -> &'static [Strategy] {
    match choice {
        StrategyChoice::Sp => &[Strategy::ShortestPath],
        StrategyChoice::Oc => &[Strategy::OneCopy],
        StrategyChoice::Auto | StrategyChoice::Both => &[Strategy::ShortestPath, Strategy::OneCopy],
    }
}

/// Strategy chosen by `auto` inside the indeterminate band: the one with the
/// smaller maximum utilization.
fn auto_pick(runs: &[StrategyRun]) -> Strategy {
    match (runs[0].max_util, runs[1].max_util) {
        (Some(sp), Some(oc)) if oc < sp => Strategy::OneCopy,
        _ => Strategy::ShortestPath,
    }
}

fn point_rows(
    cfg: &ExperimentConfig,
    index: usize,
    p: &SweepPoint,
) -> Result<Vec<(Row, bool)>, SweepError> {
    let seed = point_seed(cfg.run.seed, index);
    let (pa, model) = analyse(cfg, p)?;
    let wanted: &[Strategy] = match (cfg.run.strategy, pa.recommendation) {
        (StrategyChoice::Auto, Recommendation::ShortestPath) => &[Strategy::ShortestPath],
        (StrategyChoice::Auto, Recommendation::OneCopy) => &[Strategy::OneCopy],
        (choice, _) => strategies_for(choice),
    };
    let mut runs = wanted
        .iter()
        .map(|&s| run_strategy(cfg, p, &pa, &model, s, seed))
        .collect::<Result<Vec<_>, _>>()?;
    if runs.len() == 2 && cfg.run.strategy == StrategyChoice::Auto {
        let pick = auto_pick(&runs);
        runs.retain(|r| r.strategy == pick);
    }

    let fanout = p.fanout.label();
    let mut rows = Vec::new();
    for run in &runs {
        let mut segments: Vec<Option<SegmentId>> = match cfg.run.segments {
            SegmentSelection::All => pa.topology.all_segments().map(Some).collect(),
            SegmentSelection::Max => vec![match (&run.engine, run.strategy) {
                (EngineResult::Analytic, Strategy::ShortestPath) => {
                    pa.report.as_ref().map(|r| r.argmax().segment)
                }
                (engine, _) => engine.max().map(|(s, _)| s),
            }],
            SegmentSelection::Critical => {
                let mut s: Vec<SegmentId> = pa.critical.iter().map(|c| c.segment).collect();
                if let Some((argmax, _)) = run.engine.max() {
                    if !s.contains(&argmax) {
                        s.push(argmax);
                    }
                }
                s.into_iter().map(Some).collect()
            }
        };
        segments.sort_by_key(|s| {
            s.map(|s| {
                (
                    s.index,
                    s.wavelength,
                    s.direction == Direction::Counterclockwise,
                )
            })
        });

        let capacity = run.max_util.filter(|m| *m > 0.0).map(|m| 1.0 / m);
        for seg in segments {
            let bounds = pa.critical.iter().find(|c| Some(c.segment) == seg);
            let (lower, upper, approx) = match (run.strategy, bounds) {
                (Strategy::ShortestPath, Some(b)) => (Some(b.lower), Some(b.upper), Some(b.approx)),
                (Strategy::OneCopy, _) => (None, Some(pa.oc_bound), None),
                _ => (None, None, None),
            };
            let (exact, sim, ci, samples, converged) = match &run.engine {
                EngineResult::Analytic => (None, None, None, String::new(), true),
                EngineResult::Exact(e) => (
                    seg.map(|s| *e.utilization(s)),
                    None,
                    None,
                    String::new(),
                    true,
                ),
                EngineResult::Simulated(m) => (
                    None,
                    seg.map(|s| m.estimate(s)),
                    seg.map(|s| m.ci_halfwidth(s)),
                    m.samples().to_string(),
                    m.converged(),
                ),
            };
            rows.push((
                Row {
                    n_nodes: p.n_nodes.to_string(),
                    n_wavelengths: pa.topology.n_wavelengths().to_string(),
                    eta: pa.topology.nodes_per_wavelength().to_string(),
                    alpha: fmt_f64(p.alpha),
                    beta: fmt_f64(p.beta),
                    gamma: fmt_f64(p.gamma),
                    fanout_preset: fanout.clone(),
                    strategy: run.strategy.as_str().into(),
                    segment_dir: seg.map(|s| s.direction.as_str().into()).unwrap_or_default(),
                    segment_index: seg.map(|s| s.index.to_string()).unwrap_or_default(),
                    segment_wavelength: seg.map(|s| s.wavelength.to_string()).unwrap_or_default(),
                    util_lower: fmt_opt(lower),
                    util_upper: fmt_opt(upper),
                    util_approx: fmt_opt(approx),
                    util_exact: fmt_opt(exact),
                    util_sim: fmt_opt(sim),
                    ci_halfwidth: fmt_opt(ci),
                    samples,
                    capacity: fmt_opt(capacity),
                    gamma_th1: fmt_threshold(&pa.th1),
                    gamma_th2: fmt_threshold(&pa.th2),
                    recommendation: pa.recommendation.as_str().into(),
                    seed: seed.to_string(),
                    converged: converged.to_string(),
                },
                converged,
            ));
        }
    }
    Ok(rows)
}

/// Evaluates every sweep point on `cfg.run.threads` threads. Row order and
/// contents depend only on the config.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput, SweepError> {
    cfg.validate()?;
    let points = cfg.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.threads)
        .build()?;
    let per_point: Vec<Vec<(Row, bool)>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| point_rows(cfg, i, p))
            .collect::<Result<_, _>>()
    })?;
    let mut rows = Vec::new();
    let mut flagged = 0;
    for (row, converged) in per_point.into_iter().flatten() {
        flagged += usize::from(!converged);
        rows.push(row);
    }
    Ok(SweepOutput { rows, flagged })
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Column names in output order.
pub const HEADER: [&str; 24] = [
    "N",
    "Lambda",
    "eta",
    "alpha",
    "beta",
    "gamma",
    "fanout_preset",
    "strategy",
    "segment_dir",
    "segment_index",
    "segment_wavelength",
    "util_lower",
    "util_upper",
    "util_approx",
    "util_exact",
    "util_sim",
    "ci_halfwidth",
    "samples",
    "capacity",
    "gamma_th1",
    "gamma_th2",
    "recommendation",
    "seed",
    "converged",
];

pub fn to_csv_string(rows: &[Row]) -> Result<String, SweepError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
}
