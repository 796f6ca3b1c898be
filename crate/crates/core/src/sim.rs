//! Monte Carlo estimation of segment utilization.
//!
//! Packets are i.i.d. draws from the traffic model. Work is split into a
//! fixed number of workers, each with its own ChaCha8 stream derived from the
//! seed; results are therefore a function of `(seed, workers)` only, no matter
//! how many threads actually execute the workers.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fanout::TrafficClass;
use crate::ring::{Direction, RingTopology, SegmentId};
use crate::routing::{Packet, Router, Strategy, WavelengthRoute};
use crate::scalar::Scalar;
use crate::traffic::TrafficModel;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// When to stop sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct StopRule {
    /// Target CI half-width relative to the estimate.
    pub relative_halfwidth: f64,
    /// Segments whose estimate is below this are not checked.
    pub floor: f64,
    pub min_samples: u64,
    pub max_samples: u64,
    /// Packets drawn between two convergence checks, over all workers.
    pub batch_size: u64,
    /// Number of independent random streams.
    pub workers: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            relative_halfwidth: 0.01,
            floor: 0.01,
            min_samples: 10_000,
            max_samples: 10_000_000,
            batch_size: 100_000,
            workers: 1,
        }
    }
}

impl StopRule {
    /// Exactly `samples` packets, no convergence test.
    pub fn fixed(samples: u64) -> Self {
        StopRule {
            min_samples: samples,
            max_samples: samples,
            batch_size: samples.max(1),
            ..StopRule::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

/// Usage counts for every `(direction, segment, wavelength)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilizationMatrix {
    n_nodes: usize,
    n_wavelengths: usize,
    /// `[direction][wavelength - 1][index - 1]`.
    counts: [Vec<u64>; 2],
    samples: u64,
    converged: bool,
}

impl UtilizationMatrix {
    fn new(topology: &RingTopology) -> Self {
        let len = topology.n_nodes() * topology.n_wavelengths();
        UtilizationMatrix {
            n_nodes: topology.n_nodes(),
            n_wavelengths: topology.n_wavelengths(),
            counts: [vec![0; len], vec![0; len]],
            samples: 0,
            converged: false,
        }
    }

    fn slot(&self, segment: SegmentId) -> (usize, usize) {
        let dir = match segment.direction {
            Direction::Clockwise => 0,
            Direction::Counterclockwise => 1,
        };
        (
            dir,
            (segment.wavelength - 1) * self.n_nodes + segment.index - 1,
        )
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_wavelengths(&self) -> usize {
        self.n_wavelengths
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// `false` when sampling stopped at `max_samples` before meeting the target.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn count(&self, segment: SegmentId) -> u64 {
        let (d, i) = self.slot(segment);
        self.counts[d][i]
    }

    pub fn estimate(&self, segment: SegmentId) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        self.count(segment) as f64 / self.samples as f64
    }

    /// 99% normal-approximation half-width.
    pub fn ci_halfwidth(&self, segment: SegmentId) -> f64 {
        halfwidth(self.estimate(segment), self.samples)
    }

    pub fn segments(&self) -> impl Iterator<Item = SegmentId> + '_ {
        [Direction::Clockwise, Direction::Counterclockwise]
            .into_iter()
            .flat_map(move |direction| {
                (1..=self.n_wavelengths).flat_map(move |wavelength| {
                    (1..=self.n_nodes).map(move |index| SegmentId {
                        direction,
                        index,
                        wavelength,
                    })
                })
            })
    }

    /// Segment with the largest estimate; the first one wins ties.
    pub fn argmax(&self) -> Option<(SegmentId, f64)> {
        let mut best: Option<(SegmentId, f64)> = None;
        for s in self.segments() {
            let e = self.estimate(s);
            if best.map_or(true, |(_, b)| e > b) {
                best = Some((s, e));
            }
        }
        best
    }

    fn merge(&mut self, other: &Tally) {
        for dir in 0..2 {
            for (c, d) in self.counts[dir].iter_mut().zip(&other.counts[dir]) {
                *c += d;
            }
        }
        self.samples += other.samples;
    }

    fn meets(&self, rule: &StopRule) -> bool {
        if self.samples < rule.min_samples {
            return false;
        }
        self.counts.iter().flatten().all(|&c| {
            let p = c as f64 / self.samples as f64;
            p < rule.floor || halfwidth(p, self.samples) < rule.relative_halfwidth * p
        })
    }
}

fn halfwidth(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    Z_99 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Per-worker usage counts for one batch, accumulated with difference arrays.
#[derive(Debug)]
struct Tally {
    n_nodes: usize,
    diff: [Vec<i64>; 2],
    counts: [Vec<u64>; 2],
    samples: u64,
}

impl Tally {
    fn new(topology: &RingTopology) -> Self {
        let n = topology.n_nodes();
        let lam = topology.n_wavelengths();
        Tally {
            n_nodes: n,
            diff: [vec![0; (n + 1) * lam], vec![0; (n + 1) * lam]],
            counts: [vec![0; n * lam], vec![0; n * lam]],
            samples: 0,
        }
    }

    /// Adds one use of segments `first..first+len` (1-based, wrapping).
    fn add_run(&mut self, dir: usize, wavelength: usize, first: usize, len: usize) {
        if len == 0 {
            return;
        }
        let n = self.n_nodes;
        let base = (wavelength - 1) * (n + 1);
        let start = first - 1;
        let end = start + len;
        let diff = &mut self.diff[dir];
        if end <= n {
            diff[base + start] += 1;
            diff[base + end] -= 1;
        } else {
            diff[base + start] += 1;
            diff[base + n] -= 1;
            diff[base] += 1;
            diff[base + end - n] -= 1;
        }
    }

    fn record(&mut self, sender: usize, route: &WavelengthRoute) {
        let n = self.n_nodes;
        // Clockwise: segments S+1 ..= S+cw_hops.
        self.add_run(0, route.wavelength, sender % n + 1, route.cw_hops);
        // Counterclockwise: segments S-ccw_hops+1 ..= S.
        if route.ccw_hops > 0 {
            let first = (sender + n - route.ccw_hops) % n + 1;
            self.add_run(1, route.wavelength, first, route.ccw_hops);
        }
    }

    fn flush(&mut self) {
        let n = self.n_nodes;
        for dir in 0..2 {
            let lam = self.counts[dir].len() / n;
            for w in 0..lam {
                let mut acc = 0i64;
                for i in 0..n {
                    acc += self.diff[dir][w * (n + 1) + i];
                    self.counts[dir][w * n + i] += acc as u64;
                }
            }
            self.diff[dir].iter_mut().for_each(|d| *d = 0);
        }
    }

    fn reset(&mut self) {
        for dir in 0..2 {
            self.counts[dir].iter_mut().for_each(|c| *c = 0);
        }
        self.samples = 0;
    }
}

/// Sampling tables precomputed from a traffic model.
#[derive(Debug, Clone)]
pub(crate) struct Sampler {
    n_nodes: usize,
    class: WeightedIndex<f64>,
    fanout: [Option<WeightedIndex<f64>>; 3],
}

const CLASSES: [TrafficClass; 3] = TrafficClass::ALL;

impl Sampler {
    pub(crate) fn new<T: Scalar>(
        topology: &RingTopology,
        traffic: &TrafficModel<T>,
    ) -> Result<Self> {
        if traffic.n_nodes() != topology.n_nodes() {
            return Err(Error::InvalidTraffic(format!(
                "traffic model built for N = {}, topology has N = {}",
                traffic.n_nodes(),
                topology.n_nodes()
            )));
        }
        let weights: Vec<f64> = CLASSES
            .iter()
            .map(|&c| traffic.weight(c).to_f64_lossy())
            .collect();
        let class = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidTraffic(format!("class weights: {e}")))?;
        let n = topology.n_nodes();
        let fanout = CLASSES.map(|c| {
            let pmf = traffic.fanout(c);
            let w: Vec<f64> = (0..n).map(|l| pmf.prob(l).to_f64_lossy()).collect();
            WeightedIndex::new(&w).ok()
        });
        Ok(Sampler {
            n_nodes: n,
            class,
            fanout,
        })
    }

    /// Draws class, sender and fanout set into `fanout`; returns `(class, sender)`.
    pub(crate) fn draw<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        fanout: &mut Vec<usize>,
    ) -> (TrafficClass, usize) {
        let n = self.n_nodes;
        let ci = self.class.sample(rng);
        let class = CLASSES[ci];
        let l = self.fanout[ci]
            .as_ref()
            .expect("a class with positive weight has a fanout pmf")
            .sample(rng);
        fanout.clear();
        let sender = match class {
            TrafficClass::Uniform => {
                let s = rng.gen_range(1..=n);
                // Other nodes are s+1, ..., s+N-1 clockwise.
                for k in index::sample(rng, n - 1, l) {
                    fanout.push((s + k) % n + 1);
                }
                s
            }
            TrafficClass::HotspotDest => {
                let s = rng.gen_range(1..n);
                fanout.push(n);
                // Candidates exclude the hotspot and the sender.
                for k in index::sample(rng, n - 2, l - 1) {
                    let v = k + 1;
                    fanout.push(if v >= s { v + 1 } else { v });
                }
                s
            }
            TrafficClass::HotspotSrc => {
                for k in index::sample(rng, n - 1, l) {
                    fanout.push(k + 1);
                }
                n
            }
        };
        (class, sender)
    }
}

/// Draws one packet.
pub fn sample_packet<T: Scalar, R: Rng + ?Sized>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
    rng: &mut R,
) -> Result<Packet> {
    let sampler = Sampler::new(topology, traffic)?;
    let mut fanout_set = Vec::new();
    let (traffic_class, sender) = sampler.draw(rng, &mut fanout_set);
    fanout_set.sort_unstable();
    Ok(Packet {
        traffic_class,
        sender,
        fanout_set,
    })
}

struct Worker {
    rng: ChaCha8Rng,
    router: Router,
    tally: Tally,
    fanout: Vec<usize>,
}

impl Worker {
    fn run(
        &mut self,
        topology: &RingTopology,
        sampler: &Sampler,
        strategy: Strategy,
        packets: u64,
    ) {
        self.tally.reset();
        for _ in 0..packets {
            let (class, sender) = sampler.draw(&mut self.rng, &mut self.fanout);
            let tally = &mut self.tally;
            self.router.route(
                topology,
                strategy,
                class,
                sender,
                &self.fanout,
                &mut self.rng,
                |r| tally.record(sender, &r),
            );
        }
        self.tally.samples = packets;
        self.tally.flush();
    }
}

/// Estimates the utilization of every segment.
pub fn estimate_utilization<T: Scalar>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
    strategy: Strategy,
    seed: u64,
    rule: &StopRule,
) -> Result<UtilizationMatrix> {
    let sampler = Sampler::new(topology, traffic)?;
    let workers = rule.workers.max(1);
    let mut pool: Vec<Worker> = (0..workers)
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(w as u64);
            Worker {
                rng,
                router: Router::new(topology),
                tally: Tally::new(topology),
                fanout: Vec::with_capacity(topology.n_nodes()),
            }
        })
        .collect();

    let mut matrix = UtilizationMatrix::new(topology);
    let batch = rule.batch_size.max(1);
    while matrix.samples < rule.max_samples {
        let todo = batch.min(rule.max_samples - matrix.samples);
        let share =
            |w: usize| todo / workers as u64 + u64::from((w as u64) < todo % workers as u64);
        pool.par_iter_mut()
            .enumerate()
            .for_each(|(w, worker)| worker.run(topology, &sampler, strategy, share(w)));
        for worker in &pool {
            matrix.merge(&worker.tally);
        }
        if matrix.meets(rule) {
            matrix.converged = true;
            break;
        }
    }
    Ok(matrix)
}

/// Capacity read off a simulated utilization matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SimCapacity {
    pub segment: SegmentId,
    pub max_utilization: f64,
    pub ci_halfwidth: f64,
    /// `1 / max_utilization`.
    pub capacity: f64,
}

pub fn estimate_capacity(matrix: &UtilizationMatrix) -> Result<SimCapacity> {
    match matrix.argmax() {
        Some((segment, max)) if max > 0.0 => Ok(SimCapacity {
            segment,
            max_utilization: max,
            ci_halfwidth: matrix.ci_halfwidth(segment),
            capacity: 1.0 / max,
        }),
        _ => Err(Error::NoUtilization),
    }
}
