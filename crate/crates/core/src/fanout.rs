//! Fanout distributions: the base pmf over the number of destinations and its
//! per-wavelength projections.

use std::fmt;

use crate::binomial::Binomials;
use crate::error::{Error, Result};
use crate::ring::RingTopology;
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrafficClass {
    /// Sender uniform on all nodes, destinations uniform among the rest.
    Uniform,
    /// The hotspot is always a destination.
    HotspotDest,
    /// The hotspot is always the sender.
    HotspotSrc,
}

impl TrafficClass {
    pub const ALL: [TrafficClass; 3] = [
        TrafficClass::Uniform,
        TrafficClass::HotspotDest,
        TrafficClass::HotspotSrc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TrafficClass::Uniform => "uniform",
            TrafficClass::HotspotDest => "hotspot_dest",
            TrafficClass::HotspotSrc => "hotspot_src",
        }
    }
}

impl fmt::Display for TrafficClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pmf of the fanout `l ∈ {1, ..., N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoutPmf<T> {
    /// `probs[l]` for `l` in `0..N`; `probs[0]` is always zero.
    probs: Vec<T>,
}

impl<T: Scalar> FanoutPmf<T> {
    /// Builds a pmf from `probs[l - 1] = P(fanout = l)`, `l = 1..=N-1`.
    pub fn new(n_nodes: usize, probs: Vec<T>) -> Result<Self> {
        if probs.len() != n_nodes - 1 {
            return Err(Error::InvalidTraffic(format!(
                "fanout pmf for N = {n_nodes} needs {} entries, got {}",
                n_nodes - 1,
                probs.len()
            )));
        }
        let mut full = Vec::with_capacity(n_nodes);
        full.push(T::zero());
        full.extend(probs);
        Self::from_indexed(full)
    }

    fn from_indexed(probs: Vec<T>) -> Result<Self> {
        if probs.iter().any(|p| *p < T::zero()) {
            return Err(Error::InvalidTraffic("negative fanout probability".into()));
        }
        let total = scalar::sum(probs.iter().cloned());
        if !total.approx_eq(&T::one(), &T::normalization_tolerance()) {
            return Err(Error::InvalidTraffic(format!(
                "fanout pmf sums to {:.12}, not 1",
                total.to_f64_lossy()
            )));
        }
        Ok(FanoutPmf { probs })
    }

    /// All mass on fanout `d`.
    pub fn point(n_nodes: usize, d: usize) -> Result<Self> {
        if d == 0 || d >= n_nodes {
            return Err(Error::InvalidTraffic(format!(
                "fanout {d} outside 1..={}",
                n_nodes - 1
            )));
        }
        let mut probs = vec![T::zero(); n_nodes];
        probs[d] = T::one();
        Self::from_indexed(probs)
    }

    /// Uniform on `1..=k`.
    pub fn uniform_up_to(n_nodes: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n_nodes {
            return Err(Error::InvalidTraffic(format!(
                "fanout bound {k} outside 1..={}",
                n_nodes - 1
            )));
        }
        let mut probs = vec![T::zero(); n_nodes];
        for p in probs.iter_mut().take(k + 1).skip(1) {
            *p = T::ratio(1, k as u128);
        }
        Self::from_indexed(probs)
    }

    /// `P(l = 1) = w`, remaining mass spread evenly over `2..=N-1`.
    pub fn unicast_heavy(n_nodes: usize, unicast_num: u128, unicast_den: u128) -> Result<Self> {
        if n_nodes < 3 {
            return Err(Error::InvalidTraffic(format!(
                "mixed fanout needs N ≥ 3, got {n_nodes}"
            )));
        }
        let mut probs = vec![T::zero(); n_nodes];
        probs[1] = T::ratio(unicast_num, unicast_den);
        let rest = T::ratio(
            unicast_den - unicast_num,
            unicast_den * (n_nodes as u128 - 2),
        );
        for p in probs.iter_mut().skip(2) {
            *p = rest.clone();
        }
        Self::from_indexed(probs)
    }

    pub fn n_nodes(&self) -> usize {
        self.probs.len()
    }

    /// `P(fanout = l)`, zero outside `1..N`.
    pub fn prob(&self, l: usize) -> T {
        self.probs.get(l).cloned().unwrap_or_else(T::zero)
    }

    /// `(l, P(l))` for every fanout with non-zero probability.
    pub fn support(&self) -> impl Iterator<Item = (usize, &T)> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != T::zero())
    }

    pub fn to_f64(&self) -> FanoutPmf<f64> {
        FanoutPmf {
            probs: self.probs.iter().map(|p| p.to_f64_lossy()).collect(),
        }
    }
}

/// Named fanout distributions, expanded per ring size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FanoutPreset {
    /// `l = 1` always.
    Unicast,
    /// `P(1) = 1/2`, the rest spread evenly over `2..=N-1`.
    Mixed,
    /// Uniform on `1..=N-1`.
    Multicast,
    /// `l = N - 1` always.
    Broadcast,
    /// `P(1) = 1/4`, the rest spread evenly over `2..=N-1`.
    UnicastQuarter,
    /// `l = d` always.
    Point(usize),
    /// Uniform on `1..=k`.
    UniformUpTo(usize),
}

impl FanoutPreset {
    pub fn build<T: Scalar>(self, n_nodes: usize) -> Result<FanoutPmf<T>> {
        match self {
            FanoutPreset::Unicast => FanoutPmf::point(n_nodes, 1),
            FanoutPreset::Mixed => FanoutPmf::unicast_heavy(n_nodes, 1, 2),
            FanoutPreset::Multicast => FanoutPmf::uniform_up_to(n_nodes, n_nodes - 1),
            FanoutPreset::Broadcast => FanoutPmf::point(n_nodes, n_nodes - 1),
            FanoutPreset::UnicastQuarter => FanoutPmf::unicast_heavy(n_nodes, 1, 4),
            FanoutPreset::Point(d) => FanoutPmf::point(n_nodes, d),
            FanoutPreset::UniformUpTo(k) => FanoutPmf::uniform_up_to(n_nodes, k),
        }
    }

    /// Short label: `UC`, `MI`, `MC`, `BC`, `fig2`, `d<k>`, `u<k>`.
    pub fn label(self) -> String {
        match self {
            FanoutPreset::Unicast => "UC".into(),
            FanoutPreset::Mixed => "MI".into(),
            FanoutPreset::Multicast => "MC".into(),
            FanoutPreset::Broadcast => "BC".into(),
            FanoutPreset::UnicastQuarter => "fig2".into(),
            FanoutPreset::Point(d) => format!("d{d}"),
            FanoutPreset::UniformUpTo(k) => format!("u{k}"),
        }
    }

    /// Inverse of [`label`](Self::label); also accepts `paper-fig2`.
    pub fn parse(s: &str) -> Option<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Some(match lower.as_str() {
            "uc" | "unicast" => FanoutPreset::Unicast,
            "mi" | "mixed" => FanoutPreset::Mixed,
            "mc" | "multicast" => FanoutPreset::Multicast,
            "bc" | "broadcast" => FanoutPreset::Broadcast,
            "fig2" | "paper-fig2" => FanoutPreset::UnicastQuarter,
            other => {
                if let Some(k) = other.strip_prefix('d') {
                    FanoutPreset::Point(k.parse().ok()?)
                } else if let Some(k) = other.strip_prefix('u') {
                    FanoutPreset::UniformUpTo(k.parse().ok()?)
                } else {
                    return None;
                }
            }
        })
    }
}

/// Pmf of the number of destinations `ℓ` on one wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct WavelengthFanoutPmf<T> {
    pub wavelength: usize,
    pub traffic_class: TrafficClass,
    /// `pmf[ℓ]` for `ℓ` in `0..=η`.
    pub pmf: Vec<T>,
}

impl<T: Scalar> WavelengthFanoutPmf<T> {
    /// Probability of `ℓ` destinations; zero beyond `η`.
    pub fn prob(&self, ell: usize) -> T {
        self.pmf.get(ell).cloned().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        scalar::sum(self.pmf.iter().cloned())
    }
}

/// `Σ_l f_l · C(pool, m) C(total - pool, l - shift - m) / C(total, l - shift)`:
/// the probability that exactly `m` of the `l - shift` uniformly drawn nodes
/// fall into a designated pool, mixed over the fanout pmf.
pub(crate) fn pool_count_pmf<T: Scalar>(
    binom: &Binomials<T>,
    base: &FanoutPmf<T>,
    total: usize,
    pool: usize,
    shift: usize,
) -> Vec<T> {
    let mut out = vec![T::zero(); pool + 1];
    for (l, weight) in base.support() {
        let Some(draws) = l.checked_sub(shift) else {
            continue;
        };
        if draws > total {
            continue;
        }
        let denom = binom.choose(total as i64, draws as i64);
        for (m, slot) in out.iter_mut().enumerate() {
            let num = binom.choose(pool as i64, m as i64)
                * binom.choose((total - pool) as i64, draws as i64 - m as i64);
            if num != T::zero() {
                *slot = slot.clone() + weight.clone() * num / denom.clone();
            }
        }
    }
    out
}

/// Per-wavelength destination count pmf `μ_{λ,ℓ}`, `ν_{λ,ℓ}` or `κ_{λ,ℓ}`.
pub fn wavelength_fanout_pmf<T: Scalar>(
    topology: &RingTopology,
    wavelength: usize,
    traffic_class: TrafficClass,
    base: &FanoutPmf<T>,
) -> Result<WavelengthFanoutPmf<T>> {
    let binom = Binomials::new(topology.n_nodes());
    wavelength_fanout_pmf_with(&binom, topology, wavelength, traffic_class, base)
}

pub(crate) fn wavelength_fanout_pmf_with<T: Scalar>(
    binom: &Binomials<T>,
    topology: &RingTopology,
    wavelength: usize,
    traffic_class: TrafficClass,
    base: &FanoutPmf<T>,
) -> Result<WavelengthFanoutPmf<T>> {
    topology.check_wavelength(wavelength)?;
    let n = topology.n_nodes();
    if base.n_nodes() != n {
        return Err(Error::InvalidTraffic(format!(
            "fanout pmf built for N = {}, topology has N = {n}",
            base.n_nodes()
        )));
    }
    let eta = topology.nodes_per_wavelength() as i64;
    let n_i = n as i64;
    let hot = wavelength == topology.n_wavelengths();
    let mut pmf = vec![T::zero(); eta as usize + 1];
    for (l, weight) in base.support() {
        let l = l as i64;
        for (ell, slot) in pmf.iter_mut().enumerate() {
            let ell = ell as i64;
            let term = match (traffic_class, hot) {
                // μ_{λ,ℓ}: the fanout set is marginally a uniform l-subset of all N nodes.
                (TrafficClass::Uniform, _) => {
                    binom.choose(eta, ell) * binom.choose(n_i - eta, l - ell) / binom.choose(n_i, l)
                }
                (TrafficClass::HotspotDest, false) => {
                    binom.choose(eta, ell) * binom.choose(n_i - eta - 1, l - ell - 1)
                        / binom.choose(n_i - 1, l - 1)
                }
                (TrafficClass::HotspotDest, true) => {
                    binom.choose(eta - 1, ell - 1) * binom.choose(n_i - eta, l - ell)
                        / binom.choose(n_i - 1, l - 1)
                }
                (TrafficClass::HotspotSrc, false) => {
                    binom.choose(eta, ell) * binom.choose(n_i - 1 - eta, l - ell)
                        / binom.choose(n_i - 1, l)
                }
                (TrafficClass::HotspotSrc, true) => {
                    binom.choose(eta - 1, ell) * binom.choose(n_i - eta, l - ell)
                        / binom.choose(n_i - 1, l)
                }
            };
            if term != T::zero() {
                *slot = slot.clone() + weight.clone() * term;
            }
        }
    }
    Ok(WavelengthFanoutPmf {
        wavelength,
        traffic_class,
        pmf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn r(n: u128, d: u128) -> BigRational {
        BigRational::ratio(n, d)
    }

    #[test]
    fn unicast_uniform_on_two_wavelengths() {
        let ring = RingTopology::new(8, 2).unwrap();
        let base = FanoutPmf::<BigRational>::point(8, 1).unwrap();
        for lambda in 1..=2 {
            let w = wavelength_fanout_pmf(&ring, lambda, TrafficClass::Uniform, &base).unwrap();
            assert_eq!(w.prob(0), r(1, 2));
            assert_eq!(w.prob(1), r(1, 2));
        }
    }

    #[test]
    fn broadcast_uniform() {
        let ring = RingTopology::new(8, 2).unwrap();
        let base = FanoutPmf::<BigRational>::point(8, 7).unwrap();
        let w = wavelength_fanout_pmf(&ring, 1, TrafficClass::Uniform, &base).unwrap();
        assert_eq!(w.prob(4), r(1, 2));
        assert_eq!(w.prob(3), r(1, 2));
        assert_eq!(w.prob(2), r(0, 1));
    }

    #[test]
    fn hotspot_dest_unicast_on_hotspot_wavelength() {
        let ring = RingTopology::new(8, 2).unwrap();
        let base = FanoutPmf::<BigRational>::point(8, 1).unwrap();
        let w = wavelength_fanout_pmf(&ring, 2, TrafficClass::HotspotDest, &base).unwrap();
        assert_eq!(w.prob(1), r(1, 1));
        assert_eq!(w.prob(0), r(0, 1));
        let other = wavelength_fanout_pmf(&ring, 1, TrafficClass::HotspotDest, &base).unwrap();
        assert_eq!(other.prob(0), r(1, 1));
    }

    #[test]
    fn supports_match_class() {
        let ring = RingTopology::new(12, 3).unwrap();
        let base = FanoutPmf::<BigRational>::uniform_up_to(12, 11).unwrap();
        let eta = 4;
        let hs = wavelength_fanout_pmf(&ring, 3, TrafficClass::HotspotSrc, &base).unwrap();
        assert_eq!(hs.prob(eta), r(0, 1));
        let hd = wavelength_fanout_pmf(&ring, 3, TrafficClass::HotspotDest, &base).unwrap();
        assert_eq!(hd.prob(0), r(0, 1));
        for class in TrafficClass::ALL {
            for lambda in 1..=3 {
                let w = wavelength_fanout_pmf(&ring, lambda, class, &base).unwrap();
                assert_eq!(w.total(), r(1, 1), "{class} λ={lambda}");
            }
        }
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(FanoutPmf::<f64>::new(4, vec![0.5, 0.2, 0.2]).is_err());
        assert!(FanoutPmf::<f64>::new(4, vec![0.5, 0.5]).is_err());
        assert!(FanoutPmf::<f64>::new(4, vec![1.2, -0.2, 0.0]).is_err());
        assert!(FanoutPmf::<f64>::new(4, vec![0.5, 0.25, 0.25]).is_ok());
    }

    #[test]
    fn preset_labels_round_trip() {
        for p in [
            FanoutPreset::Unicast,
            FanoutPreset::Mixed,
            FanoutPreset::Multicast,
            FanoutPreset::Broadcast,
            FanoutPreset::UnicastQuarter,
            FanoutPreset::Point(64),
            FanoutPreset::UniformUpTo(16),
        ] {
            assert_eq!(FanoutPreset::parse(&p.label()), Some(p));
        }
        assert_eq!(
            FanoutPreset::parse("paper-fig2"),
            Some(FanoutPreset::UnicastQuarter)
        );
        assert_eq!(FanoutPreset::parse("x3"), None);
        assert_eq!(FanoutPreset::parse(""), None);
    }

    #[test]
    fn presets_match_definitions() {
        let mi = FanoutPreset::Mixed.build::<BigRational>(10).unwrap();
        assert_eq!(mi.prob(1), r(1, 2));
        assert_eq!(mi.prob(5), r(1, 16));
        let f2 = FanoutPreset::UnicastQuarter
            .build::<BigRational>(10)
            .unwrap();
        assert_eq!(f2.prob(9), r(3, 32));
        let mc = FanoutPreset::Multicast.build::<BigRational>(10).unwrap();
        assert_eq!(mc.prob(4), r(1, 9));
    }

    #[test]
    fn mismatched_ring_size_rejected() {
        let ring = RingTopology::new(8, 2).unwrap();
        let base = FanoutPmf::<f64>::point(12, 1).unwrap();
        assert!(wavelength_fanout_pmf(&ring, 1, TrafficClass::Uniform, &base).is_err());
    }
}
