//! Exact segment utilization for small rings.
//!
//! Routing on wavelength `λ` depends on a packet only through the sender and
//! `F_λ`, and given the sender `F_λ` is a uniformly drawn subset of a pool of
//! home nodes whose size follows a hypergeometric mixture. The oracle
//! enumerates every `(sender, F_λ)` pair, averages over routing ties with
//! exact weights and accumulates integer counts over a common denominator
//! before converting once to the target scalar.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::binomial::Binomials;
use crate::error::{Error, Result};
use crate::fanout::{pool_count_pmf, TrafficClass};
use crate::ring::{Direction, RingTopology, SegmentId};
use crate::routing::{candidates, Strategy, WavelengthRoute};
use crate::scalar::{self, Scalar};
use crate::traffic::TrafficModel;

pub const MAX_NODES: usize = 64;
pub const MAX_NODES_PER_WAVELENGTH: usize = 16;

/// Exact utilization of every segment plus the gap statistics behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactUtilization<T> {
    topology: RingTopology,
    /// `[direction][(λ - 1) N + n - 1]`.
    util: [Vec<T>; 2],
    /// `P(G_λ = n)` at `(λ - 1) N + n - 1`; `G_λ = S` when `F_λ` is empty.
    gap_start: Vec<T>,
    /// `P(S = n)` at `n - 1`.
    sender: Vec<T>,
    /// `E|CLG_λ|` at `λ - 1`; the whole ring when `F_λ` is empty.
    expected_clg: Vec<T>,
}

impl<T: Scalar> ExactUtilization<T> {
    pub fn topology(&self) -> &RingTopology {
        &self.topology
    }

    fn idx(&self, wavelength: usize, node: usize) -> usize {
        (wavelength - 1) * self.topology.n_nodes() + node - 1
    }

    pub fn utilization(&self, segment: SegmentId) -> &T {
        let d = match segment.direction {
            Direction::Clockwise => 0,
            Direction::Counterclockwise => 1,
        };
        &self.util[d][self.idx(segment.wavelength, segment.index)]
    }

    pub fn gap_start_prob(&self, wavelength: usize, node: usize) -> &T {
        &self.gap_start[self.idx(wavelength, node)]
    }

    pub fn sender_prob(&self, node: usize) -> &T {
        &self.sender[node - 1]
    }

    pub fn expected_clg(&self, wavelength: usize) -> &T {
        &self.expected_clg[wavelength - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = SegmentId> + '_ {
        self.topology.all_segments()
    }

    /// Largest utilization over the segments accepted by `filter`; the first
    /// segment in [`RingTopology::all_segments`] order wins ties.
    pub fn max_where(&self, filter: impl Fn(&SegmentId) -> bool) -> Option<(SegmentId, T)> {
        let mut best: Option<(SegmentId, T)> = None;
        for s in self.segments().filter(|s| filter(s)) {
            let u = self.utilization(s);
            if best.as_ref().map_or(true, |(_, b)| u > b) {
                best = Some((s, u.clone()));
            }
        }
        best
    }

    pub fn max(&self) -> Option<(SegmentId, T)> {
        self.max_where(|_| true)
    }

    pub fn to_f64(&self) -> ExactUtilization<f64> {
        let conv = |v: &Vec<T>| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<f64>>();
        ExactUtilization {
            topology: self.topology,
            util: [conv(&self.util[0]), conv(&self.util[1])],
            gap_start: conv(&self.gap_start),
            sender: conv(&self.sender),
            expected_clg: conv(&self.expected_clg),
        }
    }
}

fn check_size(topology: &RingTopology) -> Result<()> {
    if topology.n_nodes() > MAX_NODES || topology.nodes_per_wavelength() > MAX_NODES_PER_WAVELENGTH
    {
        return Err(Error::InstanceTooLarge(format!(
            "N = {}, η = {} (limits N ≤ {MAX_NODES}, η ≤ {MAX_NODES_PER_WAVELENGTH})",
            topology.n_nodes(),
            topology.nodes_per_wavelength()
        )));
    }
    Ok(())
}

/// Common denominator of every tie weight: `1/t` for `t ≤ η + 1` and the
/// one-copy coin.
fn denominator(topology: &RingTopology) -> u128 {
    let lcm = (1..=topology.nodes_per_wavelength() as u128 + 1).fold(1u128, |a, b| a.lcm(&b));
    lcm.lcm(&2)
}

fn senders(topology: &RingTopology, class: TrafficClass) -> Vec<usize> {
    let n = topology.n_nodes();
    match class {
        TrafficClass::Uniform => (1..=n).collect(),
        TrafficClass::HotspotDest => (1..n).collect(),
        TrafficClass::HotspotSrc => vec![n],
    }
}

/// `(total, shift)`: destinations other than the forced hotspot are drawn as
/// `l - shift` nodes out of `total`.
fn draw_shape(topology: &RingTopology, class: TrafficClass) -> (usize, usize) {
    let n = topology.n_nodes();
    match class {
        TrafficClass::Uniform | TrafficClass::HotspotSrc => (n - 1, 0),
        TrafficClass::HotspotDest => (n - 2, 1),
    }
}

/// Home nodes of `λ` other than the sender, in clockwise order from the
/// sender, each tagged `true` when it is always a destination.
fn layout(
    topology: &RingTopology,
    class: TrafficClass,
    wavelength: usize,
    sender: usize,
) -> Vec<(usize, bool)> {
    let hot = topology.hotspot();
    let forced_hot = class == TrafficClass::HotspotDest;
    let mut nodes: Vec<(usize, bool)> = topology
        .home_nodes(wavelength)
        .filter(|&v| v != sender)
        .map(|v| (topology.cw_distance(sender, v), forced_hot && v == hot))
        .collect();
    nodes.sort_unstable();
    nodes
}

/// Integer tallies for one group of equally weighted `(sender, F_λ)` pairs.
#[derive(Debug, Clone)]
struct Acc {
    /// Difference arrays over segments `1..=N`, clockwise then counterclockwise.
    diff: [Vec<i128>; 2],
    gap_start: Vec<u128>,
    clg: u128,
}

impl Acc {
    fn new(n: usize) -> Self {
        Acc {
            diff: [vec![0; n + 1], vec![0; n + 1]],
            gap_start: vec![0; n],
            clg: 0,
        }
    }

    fn add_run(&mut self, dir: usize, n: usize, first: usize, len: usize, w: u128) {
        if len == 0 {
            return;
        }
        let w = w as i128;
        let start = first - 1;
        let end = start + len;
        let diff = &mut self.diff[dir];
        diff[start] += w;
        if end <= n {
            diff[end] -= w;
        } else {
            diff[n] -= w;
            diff[0] += w;
            diff[end - n] -= w;
        }
    }

    fn record(&mut self, n: usize, sender: usize, route: &WavelengthRoute, w: u128) {
        self.add_run(0, n, sender % n + 1, route.cw_hops, w);
        if route.ccw_hops > 0 {
            self.add_run(
                1,
                n,
                (sender + n - route.ccw_hops) % n + 1,
                route.ccw_hops,
                w,
            );
        }
        self.gap_start[route.gap_start - 1] += w;
        self.clg += w * route.gap_len as u128;
    }

    fn counts(&self, dir: usize) -> impl Iterator<Item = i128> + '_ {
        let n = self.gap_start.len();
        self.diff[dir][..n].iter().scan(0i128, |acc, d| {
            *acc += d;
            Some(*acc)
        })
    }
}

/// Calls `visit` with the sorted destination distances of every subset of
/// `m` pool nodes, forced nodes always included.
fn for_each_subset(nodes: &[(usize, bool)], m: usize, mut visit: impl FnMut(&[usize])) {
    let pool: Vec<usize> = nodes.iter().filter(|(_, f)| !f).map(|(d, _)| *d).collect();
    let forced: Vec<usize> = nodes.iter().filter(|(_, f)| *f).map(|(d, _)| *d).collect();
    let a = pool.len();
    if m > a {
        return;
    }
    let mut dists = Vec::with_capacity(nodes.len());
    let mut mask: u32 = if m == 0 { 0 } else { (1u32 << m) - 1 };
    let limit: u64 = 1u64 << a;
    loop {
        dists.clear();
        dists.extend(forced.iter().copied());
        dists.extend((0..a).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]));
        dists.sort_unstable();
        visit(&dists);
        if m == 0 {
            break;
        }
        // Next mask with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
        if u64::from(mask) >= limit {
            break;
        }
    }
}

/// Routes every subset of size `m` for one sender into `acc`.
#[allow(clippy::too_many_arguments)]
fn enumerate(
    topology: &RingTopology,
    strategy: Strategy,
    class: TrafficClass,
    wavelength: usize,
    sender: usize,
    nodes: &[(usize, bool)],
    m: usize,
    denom: u128,
    acc: &mut Acc,
) {
    let n = topology.n_nodes();
    let mut cands = Vec::new();
    for_each_subset(nodes, m, |dists| {
        if dists.is_empty() {
            acc.gap_start[sender - 1] += denom;
            acc.clg += denom * n as u128;
            return;
        }
        candidates(
            topology, strategy, class, sender, wavelength, dists, &mut cands,
        );
        let w = denom / cands.len() as u128;
        for r in &cands {
            acc.record(n, sender, r, w);
        }
    });
}

/// Exact utilization of every segment under `strategy`.
pub fn exact_utilization<T: Scalar>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
    strategy: Strategy,
) -> Result<ExactUtilization<T>> {
    check_size(topology)?;
    if traffic.n_nodes() != topology.n_nodes() {
        return Err(Error::InvalidTraffic(format!(
            "traffic model built for N = {}, topology has N = {}",
            traffic.n_nodes(),
            topology.n_nodes()
        )));
    }
    let n = topology.n_nodes();
    let lam = topology.n_wavelengths();
    let denom = denominator(topology);
    let binom = Binomials::<T>::new(n);

    let mut util = [vec![T::zero(); n * lam], vec![T::zero(); n * lam]];
    let mut gap_start = vec![T::zero(); n * lam];
    let mut expected_clg = vec![T::zero(); lam];
    let mut sender_prob = vec![T::zero(); n];

    for class in TrafficClass::ALL {
        let w_class = traffic.weight(class).clone();
        if w_class == T::zero() {
            continue;
        }
        let senders = senders(topology, class);
        let share = w_class.clone() / T::from_count(senders.len() as u128);
        for &s in &senders {
            sender_prob[s - 1] = sender_prob[s - 1].clone() + share.clone();
        }
        let (total, shift) = draw_shape(topology, class);
        let fanout = traffic.fanout(class);

        for wavelength in 1..=lam {
            let mut pool_pmfs: BTreeMap<usize, Vec<T>> = BTreeMap::new();
            let mut accs: BTreeMap<(usize, usize), Acc> = BTreeMap::new();
            for &s in &senders {
                let nodes = layout(topology, class, wavelength, s);
                let a = nodes.iter().filter(|(_, f)| !f).count();
                let pmf = pool_pmfs
                    .entry(a)
                    .or_insert_with(|| pool_count_pmf(&binom, fanout, total, a, shift));
                for (m, p) in pmf.iter().enumerate() {
                    if *p == T::zero() {
                        continue;
                    }
                    let acc = accs.entry((a, m)).or_insert_with(|| Acc::new(n));
                    enumerate(
                        topology, strategy, class, wavelength, s, &nodes, m, denom, acc,
                    );
                }
            }
            for ((a, m), acc) in &accs {
                let weight = share.clone() * pool_pmfs[a][*m].clone()
                    / (binom.choose(*a as i64, *m as i64) * T::from_count(denom));
                let base = (wavelength - 1) * n;
                for dir in 0..2 {
                    for (i, c) in acc.counts(dir).enumerate() {
                        if c != 0 {
                            let slot = &mut util[dir][base + i];
                            *slot = slot.clone() + weight.clone() * T::from_count(c as u128);
                        }
                    }
                }
                for (i, c) in acc.gap_start.iter().enumerate() {
                    if *c != 0 {
                        let slot = &mut gap_start[base + i];
                        *slot = slot.clone() + weight.clone() * T::from_count(*c);
                    }
                }
                expected_clg[wavelength - 1] =
                    expected_clg[wavelength - 1].clone() + weight.clone() * T::from_count(acc.clg);
            }
        }
    }

    Ok(ExactUtilization {
        topology: *topology,
        util,
        gap_start,
        sender: sender_prob,
        expected_clg,
    })
}

/// Senders of `class` for which `ℓ` destinations on `λ` are possible, with
/// their layouts and the number of pool nodes to draw.
fn admissible(
    topology: &RingTopology,
    class: TrafficClass,
    wavelength: usize,
    ell: usize,
) -> Result<Vec<(usize, Vec<(usize, bool)>, usize)>> {
    check_size(topology)?;
    topology.check_wavelength(wavelength)?;
    let out: Vec<_> = senders(topology, class)
        .into_iter()
        .filter_map(|s| {
            let nodes = layout(topology, class, wavelength, s);
            let forced = nodes.iter().filter(|(_, f)| *f).count();
            let a = nodes.len() - forced;
            let m = ell.checked_sub(forced)?;
            (m <= a).then_some((s, nodes, m))
        })
        .collect();
    if out.is_empty() {
        return Err(Error::Domain(format!(
            "{class} traffic cannot have {ell} destinations on wavelength {wavelength}"
        )));
    }
    Ok(out)
}

/// Shortest-path gap statistics given `|F_λ| = ℓ`: the sender is uniform
/// over the class's senders that admit `ℓ`, and `F_λ` is uniform over the
/// admissible sets of that size.
fn conditional<T: Scalar>(
    topology: &RingTopology,
    class: TrafficClass,
    wavelength: usize,
    ell: usize,
) -> Result<(Vec<T>, T)> {
    let cases = admissible(topology, class, wavelength, ell)?;
    let n = topology.n_nodes();
    let denom = denominator(topology);
    let binom = Binomials::<T>::new(n);
    let mut gap_start = vec![T::zero(); n];
    let mut clg = T::zero();
    let n_cases = T::from_count(cases.len() as u128);
    for (s, nodes, m) in &cases {
        let mut acc = Acc::new(n);
        enumerate(
            topology,
            Strategy::ShortestPath,
            class,
            wavelength,
            *s,
            nodes,
            *m,
            denom,
            &mut acc,
        );
        let a = nodes.iter().filter(|(_, f)| !f).count();
        let w =
            T::one() / (n_cases.clone() * binom.choose(a as i64, *m as i64) * T::from_count(denom));
        for (slot, c) in gap_start.iter_mut().zip(&acc.gap_start) {
            if *c != 0 {
                *slot = slot.clone() + w.clone() * T::from_count(*c);
            }
        }
        clg = clg + w * T::from_count(acc.clg);
    }
    Ok((gap_start, clg))
}

/// `P(G_λ = n)` for `n = 1..=N` (index `n - 1`) given `ℓ` destinations on
/// `λ`, the hotspot included when it is one of them.
pub fn exact_gap_start_distribution<T: Scalar>(
    topology: &RingTopology,
    traffic_class: TrafficClass,
    wavelength: usize,
    ell: usize,
) -> Result<Vec<T>> {
    Ok(conditional(topology, traffic_class, wavelength, ell)?.0)
}

/// `E|CLG_λ|` for uniform traffic given `ℓ` destinations on `λ`.
pub fn exact_expected_clg<T: Scalar>(
    topology: &RingTopology,
    wavelength: usize,
    ell: usize,
) -> Result<T> {
    Ok(conditional(topology, TrafficClass::Uniform, wavelength, ell)?.1)
}

/// Sum of clockwise utilizations on `λ`.
pub fn total_cw_utilization<T: Scalar>(exact: &ExactUtilization<T>, wavelength: usize) -> T {
    let n = exact.topology().n_nodes();
    scalar::sum((1..=n).map(|i| exact.utilization(SegmentId::cw(i, wavelength)).clone()))
}
