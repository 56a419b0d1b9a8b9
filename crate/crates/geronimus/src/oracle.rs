//! Independent brute-force verification routes.
//!
//! Nothing here shares code with the main construction: polynomials come
//! from bordered-determinant ratios instead of linear solves, determinants
//! use fraction-free Bareiss elimination instead of pivoted Gaussian
//! elimination, and matrix products are naive dense triple loops. Tests use
//! these routes to validate the main pipeline; the oracle may be slow.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::BandedMatrix;
use crate::ops::GramMatrix;
use crate::poly::Polynomial;
use crate::scalar::{format_rational, Rational};

/// Outcome of an oracle run: number of identities checked and the first
/// failure, if any. Failures are data, not errors.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub checks: usize,
    pub failure: Option<OracleFailure>,
}

/// Which identity failed first, where, and both exact values.
#[derive(Clone, Debug)]
pub struct OracleFailure {
    pub identity: String,
    pub i: usize,
    pub j: usize,
    pub left: String,
    pub right: String,
}

impl OracleReport {
    pub fn is_pass(&self) -> bool {
        self.failure.is_none()
    }
}

/// Fraction-free Bareiss determinant (exact divisions at every step).
fn bareiss_det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut prev = Rational::one();
    let mut sign = 1i32;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Rational::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Classical bordered-determinant (Heine) construction of the monic
/// orthogonal polynomial of degree `n`: the coefficient of `t^j` is the
/// signed maximal minor of the first `n` Gram rows over columns `0..=n`,
/// divided by the leading `n x n` determinant.
pub fn heine_polynomial(g: &GramMatrix, n: usize) -> Result<Polynomial> {
    if n > g.max_degree() {
        return Err(Error::DimensionMismatch(format!(
            "heine degree {n} beyond gram degree {}",
            g.max_degree()
        )));
    }
    let lead = bareiss_det(&g.leading_block(n));
    if lead.is_zero() {
        return Err(Error::NotRegular(n));
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        // Minor over rows 0..n-1, columns {0..=n} minus {j}.
        let minor: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..=n)
                    .filter(|&c| c != j)
                    .map(|c| g.entry(i, c).clone())
                    .collect()
            })
            .collect();
        let cofactor = bareiss_det(&minor);
        let signed = if (n + j).is_multiple_of(2) {
            cofactor
        } else {
            -cofactor
        };
        coeffs.push(signed / &lead);
    }
    Ok(Polynomial::from_coeffs(coeffs))
}

/// Check `form(P_n, t^k) = 0` for every `k < n` directly against the Gram
/// entries.
pub fn check_orthogonality(g: &GramMatrix, polys: &[Polynomial]) -> OracleReport {
    let mut checks = 0;
    for (n, p) in polys.iter().enumerate() {
        for k in 0..n {
            let mut acc = Rational::zero();
            for (i, c) in p.coeffs().iter().enumerate() {
                acc += c * g.entry(i, k);
            }
            checks += 1;
            if !acc.is_zero() {
                return OracleReport {
                    checks,
                    failure: Some(OracleFailure {
                        identity: "form(P_n, t^k) = 0 for k < n".into(),
                        i: n,
                        j: k,
                        left: format_rational(&acc),
                        right: "0".into(),
                    }),
                };
            }
        }
    }
    OracleReport {
        checks,
        failure: None,
    }
}

/// Norms `h_n^2 = form(P_n, P_n)` computed by the direct double sum.
pub fn direct_norms_sq(g: &GramMatrix, polys: &[Polynomial]) -> Vec<Rational> {
    polys
        .iter()
        .map(|p| {
            let mut h = Rational::zero();
            for (i, a) in p.coeffs().iter().enumerate() {
                for (j, b) in p.coeffs().iter().enumerate() {
                    h += a * b * g.entry(i, j);
                }
            }
            h
        })
        .collect()
}

/// Compare `a.band_mul(b)` against a naive dense triple-loop product,
/// entry by entry.
pub fn dense_mul_check(
    a: &BandedMatrix<Rational>,
    b: &BandedMatrix<Rational>,
) -> Result<OracleReport> {
    let product = a.band_mul(b)?;
    let n = a.size();
    let mut checks = 0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Rational::zero();
            for k in 0..n {
                acc += a.get(i, k) * b.get(k, j);
            }
            checks += 1;
            let got = product.get(i, j);
            if got != acc {
                return Ok(OracleReport {
                    checks,
                    failure: Some(OracleFailure {
                        identity: "band_mul = dense product".into(),
                        i,
                        j,
                        left: format_rational(&got),
                        right: format_rational(&acc),
                    }),
                });
            }
        }
    }
    Ok(OracleReport {
        checks,
        failure: None,
    })
}
