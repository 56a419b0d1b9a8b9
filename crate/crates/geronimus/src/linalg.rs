//! Banded matrices stored by diagonal, and exact dense linear solves.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Scalar kinds a [`BandedMatrix`] can carry (exact rationals or big floats).
pub trait Scalar:
    Clone + PartialEq + Zero + One + std::ops::Add<Output = Self> + std::ops::Mul<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone + PartialEq + Zero + One + std::ops::Add<Output = T> + std::ops::Mul<Output = T>
{
}

/// A square `n x n` matrix with lower bandwidth `lo` and upper bandwidth
/// `hi`, stored by diagonal. Entries outside the band are structurally zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    lo: usize,
    hi: usize,
    symmetric: bool,
    /// `diags[d + lo]` is the diagonal at offset `d = j - i`, length `n - |d|`.
    diags: Vec<Vec<T>>,
}

impl<T: Scalar> BandedMatrix<T> {
    /// All-zero matrix with the given bandwidths.
    pub fn zeros(n: usize, lo: usize, hi: usize) -> Self {
        let lo = lo.min(n.saturating_sub(1));
        let hi = hi.min(n.saturating_sub(1));
        let diags = (-(lo as isize)..=hi as isize)
            .map(|d| vec![T::zero(); n - d.unsigned_abs()])
            .collect();
        BandedMatrix {
            n,
            lo,
            hi,
            symmetric: false,
            diags,
        }
    }

    /// All-zero symmetric matrix with bandwidth `bw` on both sides; `set`
    /// mirrors entries across the diagonal.
    pub fn symmetric_zeros(n: usize, bw: usize) -> Self {
        let mut m = Self::zeros(n, bw, bw);
        m.symmetric = true;
        m
    }

    /// The identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        m.diags[0] = vec![T::one(); n];
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.lo
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.hi
    }

    pub fn is_symmetric_flagged(&self) -> bool {
        self.symmetric
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        let d = j as isize - i as isize;
        -(self.lo as isize) <= d && d <= self.hi as isize
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        assert!(i < self.n && j < self.n, "index out of range");
        if !self.in_band(i, j) {
            return T::zero();
        }
        let d = j as isize - i as isize;
        self.diags[(d + self.lo as isize) as usize][i.min(j)].clone()
    }

    /// Set entry `(i, j)`. Panics outside the band. On a symmetric matrix
    /// the mirrored entry is set as well.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.n && j < self.n, "index out of range");
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band ({}, {})",
            self.lo,
            self.hi
        );
        let d = j as isize - i as isize;
        self.diags[(d + self.lo as isize) as usize][i.min(j)] = v.clone();
        if self.symmetric && i != j {
            let d = i as isize - j as isize;
            self.diags[(d + self.lo as isize) as usize][i.min(j)] = v;
        }
    }

    /// Whole diagonal at offset `d = j - i`.
    pub fn diagonal(&self, d: isize) -> &[T] {
        assert!(-(self.lo as isize) <= d && d <= self.hi as isize);
        &self.diags[(d + self.lo as isize) as usize]
    }

    /// Exact banded product (correctly rounded per operation for big-float
    /// entries). Bandwidths add, clipped to `n - 1`.
    pub fn band_mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch(format!(
                "band_mul: {} vs {}",
                self.n, rhs.n
            )));
        }
        let n = self.n;
        let lo = (self.lo + rhs.lo).min(n.saturating_sub(1));
        let hi = (self.hi + rhs.hi).min(n.saturating_sub(1));
        let mut out = Self::zeros(n, lo, hi);
        for i in 0..n {
            let j_min = i.saturating_sub(lo);
            let j_max = (i + hi).min(n - 1);
            for j in j_min..=j_max {
                let k_min = i.saturating_sub(self.lo).max(j.saturating_sub(rhs.hi));
                let k_max = (i + self.hi).min(j + rhs.lo).min(n - 1);
                let mut acc = T::zero();
                let mut k = k_min;
                while k <= k_max {
                    acc = acc + self.get(i, k) * rhs.get(k, j);
                    k += 1;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n, self.hi, self.lo);
        for i in 0..self.n {
            let j_min = i.saturating_sub(self.lo);
            let j_max = (i + self.hi).min(self.n - 1);
            for j in j_min..=j_max {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Exact solution of `a x = rhs` by Gaussian elimination over the rationals,
/// pivoting on the first nonzero entry in each column.
pub fn solve_linear(a: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.len();
    if rhs.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "solve_linear: matrix {}x? with rhs {}",
            n,
            rhs.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut b: Vec<Rational> = rhs.to_vec();

    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::SingularMatrix { column: col })?;
        m.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &sub;
            }
            let sub = &factor * &b[col];
            b[r] = &b[r] - &sub;
        }
    }

    let mut x = vec![Rational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for c in row + 1..n {
            acc -= &m[row][c] * &x[c];
        }
        x[row] = acc / &m[row][row];
    }
    Ok(x)
}

/// Exact determinant of a dense rational matrix by Gaussian elimination.
pub fn det_dense(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    debug_assert!(a.iter().all(|row| row.len() == n));
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot_row != col {
            m.swap(col, pivot_row);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &sub;
            }
        }
    }
    det
}
