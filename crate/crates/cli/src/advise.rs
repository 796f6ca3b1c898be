//! Routing advisor for a single traffic scenario.

use std::fmt;

use ringcap::analytics::Analysis;
use ringcap::{
    estimate_capacity, estimate_utilization, exact_utilization, CriticalBounds, Recommendation,
    RingTopology, Strategy, Threshold,
};

use crate::config::{ConfigError, Engine, ExperimentConfig};
use crate::sweep::{build_model, fmt_f64, SweepError};

/// `C_M` and its supporting maximum for one strategy as measured by an engine.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredCapacity {
    pub strategy: Strategy,
    pub engine: Engine,
    pub max_utilization: f64,
    pub ci_halfwidth: Option<f64>,
    pub capacity: f64,
    pub samples: Option<u64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Advice {
    pub n_nodes: usize,
    pub n_wavelengths: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub fanout: String,
    pub critical: Vec<CriticalBounds<f64>>,
    pub gamma_th1: Threshold<f64>,
    pub gamma_th2: Threshold<f64>,
    pub oc_bound: f64,
    /// Analytic `C_M` under shortest path, if any segment is used.
    pub capacity_sp: Option<f64>,
    pub half_rule: Recommendation,
    pub recommendation: Recommendation,
    pub measured: Vec<MeasuredCapacity>,
}

impl Advice {
    pub fn flagged(&self) -> bool {
        self.measured.iter().any(|m| !m.converged)
    }
}

pub fn advise(cfg: &ExperimentConfig) -> Result<Advice, SweepError> {
    cfg.validate()?;
    let points = cfg.points();
    if points.len() != 1 {
        return Err(ConfigError::Field {
            field: "topology.nodes / traffic".into(),
            message: format!(
                "advise takes a single scenario, the config describes {}",
                points.len()
            ),
        }
        .into());
    }
    let p = &points[0];
    let point_err = |source| SweepError::Point {
        n_nodes: p.n_nodes,
        beta: p.beta,
        gamma: p.gamma,
        source,
    };
    let topology = RingTopology::new(p.n_nodes, cfg.topology.wavelengths).map_err(point_err)?;
    let model = build_model(p)?;
    let an = Analysis::new(&topology, &model).map_err(point_err)?;
    let mut critical = vec![
        an.bounds_segment_1_1(),
        an.bounds_segment_l_l(),
        an.bounds_segment_n_l(),
    ];
    critical.dedup_by(|a, b| a.segment == b.segment);
    let (gamma_th1, gamma_th2) = an.thresholds();

    let mut measured = Vec::new();
    for strategy in [Strategy::ShortestPath, Strategy::OneCopy] {
        match cfg.run.engine {
            Engine::Analytic => {}
            Engine::Simulate => {
                let rule = cfg.stop.rule(cfg.run.threads);
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.run.threads)
                    .build()?;
                let m = pool
                    .install(|| {
                        estimate_utilization(&topology, &model, strategy, cfg.run.seed, &rule)
                    })
                    .map_err(point_err)?;
                let c = estimate_capacity(&m).map_err(point_err)?;
                measured.push(MeasuredCapacity {
                    strategy,
                    engine: Engine::Simulate,
                    max_utilization: c.max_utilization,
                    ci_halfwidth: Some(c.ci_halfwidth),
                    capacity: c.capacity,
                    samples: Some(m.samples()),
                    converged: m.converged(),
                });
            }
            Engine::Oracle => {
                let e = exact_utilization(&topology, &model, strategy).map_err(point_err)?;
                let (_, max) = e
                    .max()
                    .ok_or_else(|| point_err(ringcap::Error::NoUtilization))?;
                measured.push(MeasuredCapacity {
                    strategy,
                    engine: Engine::Oracle,
                    max_utilization: max,
                    ci_halfwidth: None,
                    capacity: 1.0 / max,
                    samples: None,
                    converged: true,
                });
            }
        }
    }

    Ok(Advice {
        n_nodes: p.n_nodes,
        n_wavelengths: cfg.topology.wavelengths,
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        fanout: p.fanout.label(),
        critical,
        gamma_th1,
        gamma_th2,
        oc_bound: an.oc_upper_bound(),
        capacity_sp: an.max_utilization_sp().ok().map(|r| r.capacity),
        half_rule: an.half_rule(),
        recommendation: an.recommend_routing(),
        measured,
    })
}

impl fmt::Display for Advice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eta = self.n_nodes / self.n_wavelengths;
        writeln!(
            f,
            "ring: N = {}, Lambda = {}, eta = {eta}",
            self.n_nodes, self.n_wavelengths
        )?;
        writeln!(
            f,
            "traffic: alpha = {}, beta = {}, gamma = {}, fanout = {}",
            fmt_f64(self.alpha),
            fmt_f64(self.beta),
            fmt_f64(self.gamma),
            self.fanout
        )?;
        writeln!(
            f,
            "critical segments under shortest path (lower / upper / approx):"
        )?;
        for c in &self.critical {
            writeln!(
                f,
                "  {:<10} {:.6} / {:.6} / {:.6}",
                c.segment.to_string(),
                c.lower,
                c.upper,
                c.approx
            )?;
        }
        writeln!(
            f,
            "gamma_th1 = {}, gamma_th2 = {}",
            self.gamma_th1, self.gamma_th2
        )?;
        writeln!(f, "one-copy bound on max utilization: {:.6}", self.oc_bound)?;
        match self.capacity_sp {
            Some(c) => writeln!(f, "C_M shortest path (approx): {c:.4}")?,
            None => writeln!(f, "C_M shortest path (approx): unbounded")?,
        }
        if self.oc_bound > 0.0 {
            writeln!(f, "C_M one-copy (at least): {:.4}", 1.0 / self.oc_bound)?;
        }
        for m in &self.measured {
            let ci = m
                .ci_halfwidth
                .map(|h| format!(" ± {h:.4}"))
                .unwrap_or_default();
            let samples = m
                .samples
                .map(|s| format!(", {s} packets"))
                .unwrap_or_default();
            let flag = if m.converged { "" } else { ", NOT CONVERGED" };
            writeln!(
                f,
                "C_M {} ({}): {:.4} (max utilization {:.6}{ci}{samples}{flag})",
                m.strategy.as_str(),
                m.engine,
                m.capacity,
                m.max_utilization
            )?;
        }
        writeln!(f, "half rule: {}", self.half_rule.as_str())?;
        write!(f, "recommendation: {}", self.recommendation.as_str())
    }
}
