//! Closed-form bounds and approximations for the three critical segments,
//! the multicast capacity under shortest-path routing, the one-copy bound and
//! the γ thresholds that decide between the two routing strategies.
//!
//! The critical segments are clockwise `1` on wavelength `1`, clockwise `Λ`
//! on `Λ` and clockwise `N` on `Λ`. By mirror symmetry their counterclockwise
//! twins carry the same load, so only clockwise segments are evaluated.

use std::fmt;

use crate::binomial::Binomials;
use crate::error::{Error, Result};
use crate::fanout::{wavelength_fanout_pmf_with, TrafficClass};
use crate::gaps::GapTable;
use crate::ring::{RingTopology, SegmentId};
use crate::scalar::{self, Scalar};
use crate::traffic::TrafficModel;

/// Lower bound, upper bound and large-ring approximation for one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalBounds<T> {
    pub segment: SegmentId,
    pub lower: T,
    pub upper: T,
    pub approx: T,
}

/// A γ threshold; [`Threshold::Unbounded`] prints as `inf`.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold<T> {
    Finite(T),
    Unbounded,
}

impl<T: Scalar> Threshold<T> {
    pub fn to_f64(&self) -> f64 {
        match self {
            Threshold::Finite(v) => v.to_f64_lossy(),
            Threshold::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Threshold::Finite(_))
    }

    /// `true` when `x ≤ self`.
    pub fn admits(&self, x: &T) -> bool {
        match self {
            Threshold::Finite(v) => x <= v,
            Threshold::Unbounded => true,
        }
    }

    fn min(self, other: Self) -> Self {
        match (self, other) {
            (Threshold::Unbounded, o) | (o, Threshold::Unbounded) => o,
            (Threshold::Finite(a), Threshold::Finite(b)) => Threshold::Finite(a.min_of(b)),
        }
    }

    fn max(self, other: Self) -> Self {
        match (self, other) {
            (Threshold::Unbounded, _) | (_, Threshold::Unbounded) => Threshold::Unbounded,
            (Threshold::Finite(a), Threshold::Finite(b)) => Threshold::Finite(a.max_of(b)),
        }
    }
}

impl<T: Scalar> fmt::Display for Threshold<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(v) => write!(f, "{}", v.to_f64_lossy()),
            Threshold::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recommendation {
    ShortestPath,
    OneCopy,
    Indeterminate,
}

impl Recommendation {
    pub fn as_str(self) -> &'static str {
        match self {
            Recommendation::ShortestPath => "shortest_path",
            Recommendation::OneCopy => "one_copy",
            Recommendation::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Recommendation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport<T> {
    /// Largest of the three approximations.
    pub max_util_approx: T,
    /// Segments `1` on `1`, `Λ` on `Λ` and `N` on `Λ`, in that order.
    pub critical_values: [CriticalBounds<T>; 3],
    /// `C_M = 1 / max_util_approx`.
    pub capacity: T,
    pub gamma_th1: Threshold<T>,
    pub gamma_th2: Threshold<T>,
    pub recommendation: Recommendation,
}

impl<T: Scalar> CapacityReport<T> {
    /// The critical segment with the largest approximation.
    pub fn argmax(&self) -> &CriticalBounds<T> {
        let mut best = &self.critical_values[0];
        for c in &self.critical_values[1..] {
            if c.approx > best.approx {
                best = c;
            }
        }
        best
    }
}

/// Per-wavelength fanout pmfs and gap means for one `(topology, traffic)`
/// pair, shared by every formula in this module.
#[derive(Debug)]
pub struct Analysis<'a, T> {
    topology: RingTopology,
    traffic: &'a TrafficModel<T>,
    mu_1: Vec<T>,
    nu_1: Vec<T>,
    kappa_1: Vec<T>,
    mu_l: Vec<T>,
    nu_l: Vec<T>,
    kappa_l: Vec<T>,
    /// `g(ℓ, η - 1)`, `g(ℓ, η)`, `g(ℓ, η + 1)` for `ℓ` in `0..=η`.
    g_minus: Vec<T>,
    g_mid: Vec<T>,
    g_plus: Vec<T>,
}

impl<'a, T: Scalar> Analysis<'a, T> {
    pub fn new(topology: &RingTopology, traffic: &'a TrafficModel<T>) -> Result<Self> {
        Self::with_table(topology, traffic, &GapTable::new())
    }

    /// Reuses a gap table across many evaluations.
    pub fn with_table(
        topology: &RingTopology,
        traffic: &'a TrafficModel<T>,
        table: &GapTable<T>,
    ) -> Result<Self> {
        if traffic.n_nodes() != topology.n_nodes() {
            return Err(Error::InvalidTraffic(format!(
                "traffic model built for N = {}, topology has N = {}",
                traffic.n_nodes(),
                topology.n_nodes()
            )));
        }
        let binom = Binomials::new(topology.n_nodes());
        let last = topology.n_wavelengths();
        let pmf = |lambda: usize, class: TrafficClass| -> Result<Vec<T>> {
            Ok(
                wavelength_fanout_pmf_with(&binom, topology, lambda, class, traffic.fanout(class))?
                    .pmf,
            )
        };
        let eta = topology.nodes_per_wavelength();
        let gaps = |n: usize| -> Vec<T> {
            (0..=eta)
                .map(|l| table.expected_largest_gap(l, n))
                .collect()
        };
        Ok(Analysis {
            topology: *topology,
            traffic,
            mu_1: pmf(1, TrafficClass::Uniform)?,
            nu_1: pmf(1, TrafficClass::HotspotDest)?,
            kappa_1: pmf(1, TrafficClass::HotspotSrc)?,
            mu_l: pmf(last, TrafficClass::Uniform)?,
            nu_l: pmf(last, TrafficClass::HotspotDest)?,
            kappa_l: pmf(last, TrafficClass::HotspotSrc)?,
            g_minus: gaps(eta - 1),
            g_mid: gaps(eta),
            g_plus: gaps(eta + 1),
        })
    }

    fn eta(&self) -> usize {
        self.topology.nodes_per_wavelength()
    }

    fn n(&self) -> usize {
        self.topology.n_nodes()
    }

    fn half() -> T {
        T::ratio(1, 2)
    }

    /// `1 + (Λ - 1) / N`.
    fn stretch(&self) -> T {
        T::one() + T::ratio(self.topology.n_wavelengths() as u128 - 1, self.n() as u128)
    }

    fn inv_eta(&self) -> T {
        T::ratio(1, self.eta() as u128)
    }

    /// `Σ_ℓ w(ℓ) v_ℓ`.
    fn weighted(v: &[T], w: impl Fn(usize) -> T) -> T {
        scalar::sum(
            v.iter()
                .enumerate()
                .filter(|(_, p)| **p != T::zero())
                .map(|(l, p)| w(l) * p.clone()),
        )
    }

    fn dot(g: &[T], v: &[T]) -> T {
        scalar::sum(g.iter().zip(v).map(|(a, b)| a.clone() * b.clone()))
    }

    /// `Σ_{ℓ≥1} ℓ/(ℓ+1) v_ℓ`.
    fn hs_sum(v: &[T]) -> T {
        Self::weighted(v, |l| T::ratio(l as u128, l as u128 + 1))
    }

    /// `Σ_{ℓ≥1} v_ℓ/(ℓ+1)`.
    fn hd_sum(v: &[T]) -> T {
        Self::weighted(v, |l| {
            if l == 0 {
                T::zero()
            } else {
                T::ratio(1, l as u128 + 1)
            }
        })
    }

    /// Segment `1` on wavelength `1`.
    pub fn bounds_segment_1_1(&self) -> CriticalBounds<T> {
        if self.topology.n_wavelengths() == 1 {
            // With one wavelength, segment 1 is the segment entering node Λ.
            let mut b = self.bounds_segment_l_l();
            b.segment = SegmentId::cw(1, 1);
            return b;
        }
        let t = self.traffic;
        let (alpha, beta, gamma) = (t.alpha.clone(), t.beta.clone(), t.gamma.clone());
        let n = self.n() as u128;
        let eta = self.eta() as u128;
        let f = T::ratio(n, n - 1);
        let fbeta = f * beta.clone();
        let inv_n1 = T::ratio(1, n - 1);
        let half = Self::half();
        let inv2eta = T::ratio(1, 2 * eta);

        let mixed = |g: &[T]| {
            alpha.clone() * Self::dot(g, &self.mu_1) + fbeta.clone() * Self::dot(g, &self.nu_1)
        };
        let hs_hd = |scale: &dyn Fn(usize) -> T| {
            gamma.clone() * Self::weighted(&self.kappa_1, scale)
                - beta.clone() * inv_n1.clone() * Self::weighted(&self.nu_1, scale)
        };

        let lower = half.clone() * (alpha.clone() + fbeta.clone())
            - inv2eta.clone() * mixed(&self.g_plus)
            + hs_hd(&|l| T::ratio(l as u128, l as u128 + 1));
        let upper = half.clone() * self.stretch() * (alpha.clone() + fbeta.clone())
            - inv2eta.clone() * mixed(&self.g_minus)
            + hs_hd(&|l| T::ratio(l as u128 * (eta + 1), (l as u128 + 1) * eta));
        let approx = half * (alpha.clone() + beta.clone())
            - inv2eta
                * (alpha * Self::dot(&self.g_mid, &self.mu_1)
                    + beta * Self::dot(&self.g_mid, &self.nu_1))
            + gamma * Self::hs_sum(&self.kappa_1);
        CriticalBounds {
            segment: SegmentId::cw(1, 1),
            lower,
            upper,
            approx,
        }
    }

    /// Uniform-traffic part shared by the `Λ` and `N` segments on `Λ`:
    /// `½α(c - (1/η) Σ g(ℓ, m) μ_{Λ,ℓ})`.
    fn alpha_part(&self, g: &[T], c: T) -> T {
        Self::half() * self.traffic.alpha.clone() * (c - self.inv_eta() * Self::dot(g, &self.mu_l))
    }

    fn alpha_approx(&self) -> T {
        T::ratio(1, 2 * self.eta() as u128)
            * self.traffic.alpha.clone()
            * Self::dot(&self.g_mid, &self.mu_l)
    }

    /// Segment `Λ` on wavelength `Λ`.
    pub fn bounds_segment_l_l(&self) -> CriticalBounds<T> {
        let t = self.traffic;
        let eta = self.eta() as u128;
        let half = Self::half();
        let hs = t.gamma.clone() * Self::hs_sum(&self.kappa_l);

        let beta_lower = Self::weighted(&self.nu_l, |l| {
            if l == 0 {
                T::zero()
            } else {
                T::ratio(2 * (eta + 1), (l as u128 + 1) * eta)
            }
        });
        let beta_upper = Self::weighted(&self.nu_l, |l| {
            if l == 0 {
                T::zero()
            } else {
                let l = l as u128;
                T::ratio(2 * (l * eta - 1), (l + 1) * l * eta)
            }
        });

        let lower = self.alpha_part(&self.g_plus, T::one())
            + half.clone() * t.beta.clone() * (T::one() - beta_lower)
            + hs.clone();
        let upper = self.alpha_part(&self.g_minus, self.stretch())
            + half.clone() * t.beta.clone() * (self.stretch() - beta_upper)
            + hs.clone();
        let approx = half * (t.alpha.clone() + t.beta.clone())
            - self.alpha_approx()
            - t.beta.clone() * Self::hd_sum(&self.nu_l)
            + hs;
        let lambda = self.topology.n_wavelengths();
        CriticalBounds {
            segment: SegmentId::cw(lambda, lambda),
            lower,
            upper,
            approx,
        }
    }

    /// Segment `N` on wavelength `Λ`.
    pub fn bounds_segment_n_l(&self) -> CriticalBounds<T> {
        let t = self.traffic;
        let half_beta = Self::half() * t.beta.clone();
        let lower = self.alpha_part(&self.g_plus, T::one()) + half_beta.clone();
        let upper = self.alpha_part(&self.g_minus, self.stretch()) + half_beta;
        let approx = Self::half() * (t.alpha.clone() + t.beta.clone()) - self.alpha_approx();
        CriticalBounds {
            segment: SegmentId::cw(self.n(), self.topology.n_wavelengths()),
            lower,
            upper,
            approx,
        }
    }

    /// `(γ_th1, γ_th2)`.
    pub fn thresholds(&self) -> (Threshold<T>, Threshold<T>) {
        let beta = self.traffic.beta.clone();
        let half = Self::half();

        let num_l = beta.clone() * Self::hd_sum(&self.nu_l);
        let den_l = Self::hs_sum(&self.kappa_l);
        let th1_l = ratio_or_unbounded(num_l.clone(), den_l.clone());
        let th2_l = if den_l > half {
            ratio_or_unbounded(num_l, den_l - half.clone())
        } else {
            Threshold::Unbounded
        };
        if self.topology.n_wavelengths() == 1 {
            return (th1_l, th2_l);
        }

        let num_1 = beta * T::ratio(1, 2 * self.eta() as u128) * Self::dot(&self.g_mid, &self.nu_1);
        let den_1 = Self::hs_sum(&self.kappa_1);
        let th1_1 = ratio_or_unbounded(num_1.clone(), den_1.clone());
        let th2_1 = if den_1 > half {
            ratio_or_unbounded(num_1, den_1 - half)
        } else {
            Threshold::Unbounded
        };
        (th1_1.min(th1_l), th2_1.max(th2_l))
    }

    /// `½(α + β + γ) - (α / 2η) Σ_{ℓ<η} g(ℓ, η) μ_{1,ℓ}`.
    pub fn oc_upper_bound(&self) -> T {
        let t = self.traffic;
        let eta = self.eta();
        let uniform = T::ratio(1, 2 * eta as u128)
            * t.alpha.clone()
            * Self::dot(&self.g_mid[..eta], &self.mu_1[..eta]);
        Self::half() * (t.alpha.clone() + t.beta.clone() + t.gamma.clone()) - uniform
    }

    pub fn recommend_routing(&self) -> Recommendation {
        let (th1, th2) = self.thresholds();
        decide(&self.traffic.gamma, &th1, &th2)
    }

    /// The coarse rule: shortest path when both the segment-`1` and
    /// segment-`Λ` approximations stay below ½, one-copy when either exceeds it.
    pub fn half_rule(&self) -> Recommendation {
        let half = Self::half();
        let a1 = self.bounds_segment_1_1().approx;
        let al = self.bounds_segment_l_l().approx;
        if a1 < half && al < half {
            Recommendation::ShortestPath
        } else if a1 > half || al > half {
            Recommendation::OneCopy
        } else {
            Recommendation::Indeterminate
        }
    }

    pub fn max_utilization_sp(&self) -> Result<CapacityReport<T>> {
        let critical_values = [
            self.bounds_segment_1_1(),
            self.bounds_segment_l_l(),
            self.bounds_segment_n_l(),
        ];
        let max_util_approx = critical_values
            .iter()
            .map(|c| c.approx.clone())
            .fold(T::zero(), T::max_of);
        if max_util_approx <= T::zero() {
            return Err(Error::NoUtilization);
        }
        let (gamma_th1, gamma_th2) = self.thresholds();
        let recommendation = decide(&self.traffic.gamma, &gamma_th1, &gamma_th2);
        Ok(CapacityReport {
            capacity: T::one() / max_util_approx.clone(),
            max_util_approx,
            critical_values,
            gamma_th1,
            gamma_th2,
            recommendation,
        })
    }
}

fn ratio_or_unbounded<T: Scalar>(num: T, den: T) -> Threshold<T> {
    if den <= T::zero() {
        Threshold::Unbounded
    } else {
        Threshold::Finite(num / den)
    }
}

fn decide<T: Scalar>(gamma: &T, th1: &Threshold<T>, th2: &Threshold<T>) -> Recommendation {
    if th1.admits(gamma) {
        Recommendation::ShortestPath
    } else if let Threshold::Finite(t2) = th2 {
        if gamma >= t2 {
            Recommendation::OneCopy
        } else {
            Recommendation::Indeterminate
        }
    } else {
        Recommendation::Indeterminate
    }
}

pub fn bounds_segment_1_1<T: Scalar>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
) -> Result<CriticalBounds<T>> {
    Ok(Analysis::new(topology, traffic)?.bounds_segment_1_1())
}

pub fn bounds_segment_l_l<T: Scalar>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
) -> Result<CriticalBounds<T>> {
    Ok(Analysis::new(topology, traffic)?.bounds_segment_l_l())
}

pub fn bounds_segment_n_l<T: Scalar>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
) -> Result<CriticalBounds<T>> {
    Ok(Analysis::new(topology, traffic)?.bounds_segment_n_l())
}

pub fn max_utilization_sp<T: Scalar>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
) -> Result<CapacityReport<T>> {
    Analysis::new(topology, traffic)?.max_utilization_sp()
}

pub fn thresholds<T: Scalar>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
) -> Result<(Threshold<T>, Threshold<T>)> {
    Ok(Analysis::new(topology, traffic)?.thresholds())
}

pub fn oc_upper_bound<T: Scalar>(topology: &RingTopology, traffic: &TrafficModel<T>) -> Result<T> {
    Ok(Analysis::new(topology, traffic)?.oc_upper_bound())
}

pub fn recommend_routing<T: Scalar>(
    topology: &RingTopology,
    traffic: &TrafficModel<T>,
) -> Result<Recommendation> {
    Ok(Analysis::new(topology, traffic)?.recommend_routing())
}
