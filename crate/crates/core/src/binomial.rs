use crate::scalar::Scalar;

/// Pascal triangle of binomial coefficients, stored in the target scalar.
///
/// Rows are built by addition only, so entries stay exact for rationals and
/// never go through factorials in floating point.
#[derive(Debug, Clone)]
pub struct Binomials<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> Binomials<T> {
    pub fn new(max_n: usize) -> Self {
        let mut b = Binomials {
            rows: vec![vec![T::one()]],
        };
        b.ensure(max_n);
        b
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn ensure(&mut self, max_n: usize) {
        while self.rows.len() <= max_n {
            let prev = self.rows.last().expect("row 0 always present");
            let n = prev.len();
            let mut row = Vec::with_capacity(n + 1);
            row.push(T::one());
            for k in 1..n {
                row.push(prev[k - 1].clone() + prev[k].clone());
            }
            row.push(T::one());
            self.rows.push(row);
        }
    }

    /// `C(n, k)`, zero whenever `n < 0`, `k < 0` or `k > n`.
    ///
    /// Panics if `n` exceeds the table size; call [`ensure`](Self::ensure) first.
    pub fn choose(&self, n: i64, k: i64) -> T {
        if n < 0 || k < 0 || k > n {
            return T::zero();
        }
        self.rows[n as usize][k as usize].clone()
    }
}
