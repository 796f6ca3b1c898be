//! Gap statistics for a single-wavelength ring with uniformly placed active nodes.
//!
//! With `l + 1` active nodes placed uniformly on a ring of `N` nodes, the ring
//! splits into `l + 1` gaps. [`gap_pmf`] is the length distribution of one
//! arbitrary gap, [`LargestGapPmf`] the distribution of the largest one, and
//! [`expected_largest_gap`] its mean `g(l, N)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::binomial::Binomials;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Probability that an arbitrary gap spans `k` hops, `p_{l,N}(k)`.
///
/// Returns zero outside the natural support (`k > N - l` for `l ≥ 1`).
pub fn gap_pmf<T: Scalar>(l: usize, n: usize, k: usize) -> Result<T> {
    check_domain(l, n)?;
    if k == 0 || k > n {
        return Err(Error::Domain(format!("gap length {k} outside 1..={n}")));
    }
    let binom = Binomials::<T>::new(n);
    Ok(gap_pmf_with(&binom, l, n, k))
}

fn gap_pmf_with<T: Scalar>(binom: &Binomials<T>, l: usize, n: usize, k: usize) -> T {
    if l == 0 {
        return if k == n { T::one() } else { T::zero() };
    }
    let (l, n, k) = (l as i64, n as i64, k as i64);
    binom.choose(n - k - 1, l - 1) / binom.choose(n - 1, l)
}

fn check_domain(l: usize, n: usize) -> Result<()> {
    if n == 0 || l >= n {
        Err(Error::Domain(format!(
            "need 0 ≤ l < N, got l = {l}, N = {n}"
        )))
    } else {
        Ok(())
    }
}

/// Distribution `q_{l,N}` of the largest gap length.
#[derive(Debug, Clone, PartialEq)]
pub struct LargestGapPmf<T> {
    n_nodes: usize,
    n_active_minus_one: usize,
    /// `pmf[k]` for `k` in `0..=N`; `pmf[0]` is always zero.
    pmf: Vec<T>,
}

impl<T: Scalar> LargestGapPmf<T> {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_active_minus_one(&self) -> usize {
        self.n_active_minus_one
    }

    /// `q_{l,N}(k)`, zero outside `1..=N`.
    pub fn prob(&self, k: usize) -> T {
        self.pmf.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.pmf
    }

    pub fn total(&self) -> T {
        crate::scalar::sum(self.pmf.iter().cloned())
    }

    pub fn mean(&self) -> T {
        crate::scalar::sum(
            self.pmf
                .iter()
                .enumerate()
                .map(|(k, p)| T::from_count(k as u128) * p.clone()),
        )
    }

    /// Smallest and largest `k` with non-zero probability.
    pub fn support(&self) -> (usize, usize) {
        let lo = self.pmf.iter().position(|p| *p != T::zero()).unwrap_or(0);
        let hi = self.pmf.iter().rposition(|p| *p != T::zero()).unwrap_or(0);
        (lo, hi)
    }
}

#[derive(Debug)]
struct Entry<T> {
    pmf: Vec<T>,
    /// `cdf[k] = Σ_{m ≤ k} pmf[m]`.
    cdf: Vec<T>,
}

#[derive(Debug)]
struct Inner<T> {
    binom: Binomials<T>,
    cache: HashMap<(usize, usize), Arc<Entry<T>>>,
}

/// Memoized evaluation of the largest-gap recursion over `(l, N)`.
///
/// Entries are computed on first use and never change afterwards; the table
/// can be shared between threads.
#[derive(Debug)]
pub struct GapTable<T> {
    inner: Mutex<Inner<T>>,
}

impl<T: Scalar> Default for GapTable<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> GapTable<T> {
    pub fn new() -> Self {
        GapTable {
            inner: Mutex::new(Inner {
                binom: Binomials::new(0),
                cache: HashMap::new(),
            }),
        }
    }

    pub fn largest_gap_pmf(&self, l: usize, n: usize) -> Result<LargestGapPmf<T>> {
        check_domain(l, n)?;
        let entry = self.entry(l, n);
        Ok(LargestGapPmf {
            n_nodes: n,
            n_active_minus_one: l,
            pmf: entry.pmf.clone(),
        })
    }

    /// `g(l, N)`: zero whenever `l ≥ N` (including `N = 0`).
    pub fn expected_largest_gap(&self, l: usize, n: usize) -> T {
        if l >= n {
            return T::zero();
        }
        if l == 0 {
            return T::from_count(n as u128);
        }
        if l + 1 == n {
            return T::one();
        }
        let entry = self.entry(l, n);
        crate::scalar::sum(
            entry
                .pmf
                .iter()
                .enumerate()
                .map(|(k, p)| T::from_count(k as u128) * p.clone()),
        )
    }

    fn lookup(&self, l: usize, n: usize) -> Option<Arc<Entry<T>>> {
        self.inner.lock().unwrap().cache.get(&(l, n)).cloned()
    }

    fn entry(&self, l: usize, n: usize) -> Arc<Entry<T>> {
        if let Some(e) = self.lookup(l, n) {
            return e;
        }
        let pmf = if l == 0 {
            delta(n, n)
        } else if l + 1 == n {
            delta(n, 1)
        } else {
            self.recurse(l, n)
        };
        let entry = Arc::new(Entry {
            cdf: cumulative(&pmf),
            pmf,
        });
        self.inner
            .lock()
            .unwrap()
            .cache
            .entry((l, n))
            .or_insert(entry)
            .clone()
    }

    /// `q_{l,N}(k) = p(k) Σ_{m≤k} q_{l-1,N-k}(m) + Σ_{m<k} p(m) q_{l-1,N-m}(k)`.
    fn recurse(&self, l: usize, n: usize) -> Vec<T> {
        let p: Vec<T> = {
            let mut inner = self.inner.lock().unwrap();
            inner.binom.ensure(n);
            (0..=n)
                .map(|k| {
                    if k == 0 {
                        T::zero()
                    } else {
                        gap_pmf_with(&inner.binom, l, n, k)
                    }
                })
                .collect()
        };
        // The first gap has at most N - l hops; the rest is a ring of N - k
        // nodes with l active nodes.
        let kmax = n - l;
        let sub: Vec<Arc<Entry<T>>> = (1..=kmax).map(|k| self.entry(l - 1, n - k)).collect();

        let mut q = vec![T::zero(); n + 1];
        for k in 1..=kmax {
            let rest = &sub[k - 1];
            let mut acc = p[k].clone() * rest.cdf[k.min(n - k)].clone();
            for m in 1..k {
                if let Some(v) = sub[m - 1].pmf.get(k) {
                    acc = acc + p[m].clone() * v.clone();
                }
            }
            q[k] = acc;
        }
        q
    }
}

fn delta<T: Scalar>(n: usize, at: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n + 1];
    v[at] = T::one();
    v
}

fn cumulative<T: Scalar>(pmf: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    pmf.iter()
        .map(|p| {
            acc = acc.clone() + p.clone();
            acc.clone()
        })
        .collect()
}

/// `q_{l,N}` computed with a fresh table.
pub fn largest_gap_pmf<T: Scalar>(l: usize, n: usize) -> Result<LargestGapPmf<T>> {
    GapTable::new().largest_gap_pmf(l, n)
}

/// `g(l, N)` computed with a fresh table.
pub fn expected_largest_gap<T: Scalar>(l: usize, n: usize) -> T {
    GapTable::new().expected_largest_gap(l, n)
}
