//! Monic orthogonal polynomials from a Gram matrix: exact orthogonality
//! solves, recurrence coefficients and norms, and the second-kind
//! polynomials `Q_n` with the values `Q_n(0)`, `Q'_n(0)`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det_dense, solve_linear};
use crate::moments::{BilinearForm, MomentFunctional};
use crate::poly::Polynomial;
use crate::scalar::Rational;

/// Exact symmetric Gram matrix of a bilinear form in the monomial basis.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    entries: Vec<Vec<Rational>>,
    source: String,
    hankel: bool,
}

impl GramMatrix {
    /// Number of rows (degree range is `0 ..= size() - 1`).
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Highest monomial degree covered.
    pub fn max_degree(&self) -> usize {
        self.size() - 1
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_hankel(&self) -> bool {
        self.hankel
    }

    /// Dense copy of the leading `k x k` block.
    pub fn leading_block(&self, k: usize) -> Vec<Vec<Rational>> {
        (0..k).map(|i| self.entries[i][..k].to_vec()).collect()
    }

    /// Exact evaluation `form(f, g)` through the Gram entries.
    pub fn apply(&self, f: &Polynomial, g: &Polynomial) -> Result<Rational> {
        let need = f.degree().max(g.degree());
        if need >= self.size() as isize {
            return Err(Error::DimensionMismatch(format!(
                "gram of degree {} applied to degree {}",
                self.max_degree(),
                need
            )));
        }
        let mut acc = Rational::zero();
        for (i, a) in f.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in g.coeffs().iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc += a * b * &self.entries[i][j];
            }
        }
        Ok(acc)
    }
}

/// Build the exact `(n+1) x (n+1)` Gram matrix of `form` in the monomial basis.
pub fn build_gram(form: &impl BilinearForm, n: usize) -> Result<GramMatrix> {
    let entries = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| form.gram_entry(i, j))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramMatrix {
        entries,
        source: form.label(),
        hankel: form.is_hankel(),
    })
}

/// Leading-principal-minor survey of a Gram matrix.
#[derive(Clone, Debug)]
pub struct RegularityReport {
    /// `minors[k-1]` is the leading `k x k` determinant, `k = 1 ..= size`.
    pub minors: Vec<Rational>,
    /// First `k` with a vanishing minor, if any.
    pub first_singular: Option<usize>,
    /// First `k` with a non-positive minor, if any.
    pub first_nonpositive: Option<usize>,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.first_singular.is_none()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.first_nonpositive.is_none()
    }
}

/// Compute every leading principal minor of `g` and report regularity and
/// positive definiteness. Failures are data here, not errors.
pub fn regularity_check(g: &GramMatrix) -> RegularityReport {
    let mut minors = Vec::with_capacity(g.size());
    let mut first_singular = None;
    let mut first_nonpositive = None;
    for k in 1..=g.size() {
        let det = det_dense(&g.leading_block(k));
        if det.is_zero() && first_singular.is_none() {
            first_singular = Some(k);
        }
        if !det.is_positive() && first_nonpositive.is_none() {
            first_nonpositive = Some(k);
        }
        minors.push(det);
    }
    RegularityReport {
        minors,
        first_singular,
        first_nonpositive,
    }
}

/// Three-term recurrence data `t P_n = P_{n+1} + b_n P_n + (c_{n-1})^2 P_{n-1}`,
/// available for Hankel (moment-functional) sources only.
#[derive(Clone, Debug)]
pub struct Recurrence {
    /// `b_0 ..= b_{N-1}`.
    pub b: Vec<Rational>,
    /// `(c_0)^2 ..= (c_{N-1})^2`, where `(c_{n-1})^2 = h_n^2 / h_{n-1}^2`.
    pub c_sq: Vec<Rational>,
}

/// Monic orthogonal polynomials of a regular bilinear form, with norms and
/// (for Hankel sources) recurrence coefficients.
#[derive(Clone, Debug)]
pub struct MonicOPS {
    polys: Vec<Polynomial>,
    norms_sq: Vec<Rational>,
    recurrence: Option<Recurrence>,
    source: String,
}

impl MonicOPS {
    /// Highest constructed degree `N`.
    pub fn max_degree(&self) -> usize {
        self.polys.len() - 1
    }

    /// `P_n`.
    pub fn poly(&self, n: usize) -> &Polynomial {
        &self.polys[n]
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// `h_n^2 = form(P_n, P_n)`.
    pub fn norm_sq(&self, n: usize) -> &Rational {
        &self.norms_sq[n]
    }

    pub fn norms_sq(&self) -> &[Rational] {
        &self.norms_sq
    }

    /// Recurrence coefficients (Hankel sources only).
    pub fn recurrence(&self) -> Option<&Recurrence> {
        self.recurrence.as_ref()
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Construct `P_0 ..= P_N` (`N = g.max_degree()`) by exact linear solves of
/// the orthogonality conditions, with monic normalization.
///
/// Fails with [`Error::NotRegular`]`(k)` at the first vanishing leading
/// minor: the `k x k` orthogonality system for `P_k` is exactly the leading
/// `k x k` Gram block.
pub fn monic_ops(g: &GramMatrix) -> Result<MonicOPS> {
    let n_max = g.max_degree();
    let mut polys = vec![Polynomial::one()];
    for n in 1..=n_max {
        // Unknowns x_0 .. x_{n-1}: form(t^n + sum x_k t^k, t^j) = 0, j < n.
        let system = g.leading_block(n);
        let rhs: Vec<Rational> = (0..n).map(|j| -g.entry(j, n)).collect();
        let coeffs = match solve_linear(&system, &rhs) {
            Ok(c) => c,
            Err(Error::SingularMatrix { .. }) => return Err(Error::NotRegular(n)),
            Err(e) => return Err(e),
        };
        let mut all = coeffs;
        all.push(Rational::one());
        polys.push(Polynomial::from_coeffs(all));
    }

    let norms_sq = polys
        .iter()
        .map(|p| g.apply(p, p))
        .collect::<Result<Vec<_>>>()?;

    let recurrence = if g.is_hankel() && n_max >= 1 {
        Some(extract_recurrence(g, &polys, &norms_sq)?)
    } else {
        None
    };

    Ok(MonicOPS {
        polys,
        norms_sq,
        recurrence,
        source: g.source().to_string(),
    })
}

/// `b_n = form(t P_n, P_n) / h_n^2` and `(c_{n-1})^2 = h_n^2 / h_{n-1}^2`,
/// verified against the recurrence residual, which must vanish identically.
fn extract_recurrence(
    g: &GramMatrix,
    polys: &[Polynomial],
    norms_sq: &[Rational],
) -> Result<Recurrence> {
    let n_max = polys.len() - 1;
    let mut b = Vec::with_capacity(n_max);
    let mut c_sq = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let shifted = polys[n].shift_up(1);
        b.push(g.apply(&shifted, &polys[n])? / &norms_sq[n]);
    }
    for n in 1..=n_max {
        c_sq.push(&norms_sq[n] / &norms_sq[n - 1]);
    }
    for n in 0..n_max {
        let mut residual = &polys[n].shift_up(1) - &polys[n + 1];
        residual = &residual - &polys[n].scale(&b[n]);
        if n > 0 {
            residual = &residual - &polys[n - 1].scale(&c_sq[n - 1]);
        }
        if !residual.is_zero() {
            return Err(Error::RouteDisagreement {
                level: n,
                detail: format!("three-term recurrence residual {residual}"),
            });
        }
    }
    Ok(Recurrence { b, c_sq })
}

/// Second-kind polynomials `Q_n` and the values `Q_n(0)`, `Q'_n(0)`.
///
/// `Q_0 = 0`; for `n >= 1`, `deg Q_n = n - 1` with leading coefficient `s_0`.
#[derive(Clone, Debug)]
pub struct SecondKindValues {
    q: Vec<Polynomial>,
    q0: Vec<Rational>,
    qp0: Vec<Rational>,
}

impl SecondKindValues {
    pub fn max_degree(&self) -> usize {
        self.q.len() - 1
    }

    /// `Q_n`.
    pub fn poly(&self, n: usize) -> &Polynomial {
        &self.q[n]
    }

    /// `Q_n(0)`.
    pub fn at_zero(&self, n: usize) -> &Rational {
        &self.q0[n]
    }

    /// `Q'_n(0)`.
    pub fn derivative_at_zero(&self, n: usize) -> &Rational {
        &self.qp0[n]
    }
}

/// Compute the second-kind values for `ops` built over `base`.
///
/// The moment sum `Q_n(x) = sum_j x^j sum_{k >= j+1} p_k s_{k-1-j}` replaces
/// the divided-difference integral exactly. `Q'_n(0)` is computed twice, by
/// formally differentiating `Q_n` and by the direct sum
/// `sum_{k >= 2} p_k s_{k-2}`; the two routes must agree.
pub fn second_kind(base: &MomentFunctional, ops: &MonicOPS) -> Result<SecondKindValues> {
    let n_max = ops.max_degree();
    let moments = if n_max == 0 {
        Vec::new()
    } else {
        base.moments_upto(n_max - 1)?
    };
    let mut q = Vec::with_capacity(n_max + 1);
    let mut q0 = Vec::with_capacity(n_max + 1);
    let mut qp0 = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let p = ops.poly(n);
        let mut coeffs = vec![Rational::zero(); n];
        for (k, pk) in p.coeffs().iter().enumerate() {
            for (j, c) in coeffs.iter_mut().enumerate().take(k) {
                *c += pk * &moments[k - 1 - j];
            }
        }
        let qn = Polynomial::from_coeffs(coeffs);
        if n >= 1 {
            if qn.degree() != n as isize - 1 {
                return Err(Error::RouteDisagreement {
                    level: n,
                    detail: format!("deg Q_{n} = {} instead of {}", qn.degree(), n - 1),
                });
            }
            debug_assert_eq!(qn.leading(), Some(&base.moment(0)?));
        }
        let value = qn.eval(&Rational::zero());
        let deriv = qn.derivative().eval(&Rational::zero());
        // Independent route for Q'_n(0): the functional applied to
        // (P_n(t) - P_n(0) - t P'_n(0)) / t^2.
        let mut direct = Rational::zero();
        for (k, pk) in p.coeffs().iter().enumerate().skip(2) {
            direct += pk * &moments[k - 2];
        }
        if direct != deriv {
            return Err(Error::RouteDisagreement {
                level: n,
                detail: format!("Q'_{n}(0): {direct} vs {deriv}"),
            });
        }
        q.push(qn);
        q0.push(value);
        qp0.push(deriv);
    }
    Ok(SecondKindValues { q, q0, qp0 })
}

/// `R_n(0; s) = s P_n(0) + Q_n(0)` and `R'_n(0; s) = s P'_n(0) + Q'_n(0)`
/// for every available `n`.
pub fn r_values(sk: &SecondKindValues, ops: &MonicOPS, s: &Rational) -> Vec<(Rational, Rational)> {
    let zero = Rational::zero();
    (0..=sk.max_degree().min(ops.max_degree()))
        .map(|n| {
            let p = ops.poly(n);
            let r = s * p.eval(&zero) + sk.at_zero(n);
            let rp = s * p.derivative().eval(&zero) + sk.derivative_at_zero(n);
            (r, rp)
        })
        .collect()
}

/// Convenience: Gram matrix to degree `n`, monic polynomials, and
/// second-kind values of a moment functional in one step.
pub fn build_chain(
    base: &MomentFunctional,
    n: usize,
) -> Result<(GramMatrix, MonicOPS, SecondKindValues)> {
    let gram = build_gram(base, n)?;
    let ops = monic_ops(&gram)?;
    let sk = second_kind(base, &ops)?;
    Ok((gram, ops, sk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{GeronimusMoments1, GeronimusMoments2};
    use crate::scalar::{rat, rat_int};

    fn laguerre(alpha: i64) -> MomentFunctional {
        MomentFunctional::laguerre(rat_int(alpha)).unwrap()
    }

    fn poly(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn gram_of_laguerre_zero() {
        let g = build_gram(&laguerre(0), 2).unwrap();
        let expect = [[1, 1, 2], [1, 2, 6], [2, 6, 24]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.entry(i, j), &rat_int(expect[i][j]));
            }
        }
        assert!(g.is_hankel());
    }

    #[test]
    fn gram_of_transformed_and_degenerate_sizes() {
        let g1 = GeronimusMoments1::new(laguerre(1), rat_int(1));
        let g = build_gram(&g1, 1).unwrap();
        assert_eq!(g.entry(0, 0), &rat_int(1));
        assert_eq!(g.entry(0, 1), &rat_int(1));
        assert_eq!(g.entry(1, 1), &rat_int(2));

        let g0 = build_gram(&laguerre(1), 0).unwrap();
        assert_eq!(g0.size(), 1);
        assert_eq!(g0.entry(0, 0), &rat_int(1));
    }

    #[test]
    fn regularity_of_laguerre_is_positive() {
        let g = build_gram(&laguerre(0), 4).unwrap();
        let report = regularity_check(&g);
        assert!(report.is_regular());
        assert!(report.is_positive_definite());
        assert_eq!(report.minors[0], rat_int(1));
        assert_eq!(report.minors[1], rat_int(1));
        assert_eq!(report.minors[2], rat_int(4));
    }

    #[test]
    fn hankel_positive_custom_sequence() {
        // (1, 1, 2, 6): leading minors 1 and det[[1,1],[1,2]] = 1.
        let base =
            MomentFunctional::custom(vec![rat_int(1), rat_int(1), rat_int(2), rat_int(6)]).unwrap();
        let report = regularity_check(&build_gram(&base, 1).unwrap());
        assert_eq!(report.minors, vec![rat_int(1), rat_int(1)]);
        assert!(report.is_positive_definite());
    }

    #[test]
    fn regularity_failures_are_located() {
        // s_0* = 0 fails at minor 1.
        let g1 = GeronimusMoments1::new(laguerre(1), rat_int(0));
        let report = regularity_check(&build_gram(&g1, 2).unwrap());
        assert_eq!(report.first_singular, Some(1));
        assert!(!report.is_regular());

        // Quasi-Hankel corner (1, 0, 0) over custom (1, 1, 2): singular at 2.
        let base = MomentFunctional::custom(vec![rat_int(1), rat_int(1), rat_int(2)]).unwrap();
        let g2 = GeronimusMoments2::new(base, rat_int(1), rat_int(0), rat_int(0));
        let report = regularity_check(&build_gram(&g2, 1).unwrap());
        assert_eq!(report.first_singular, Some(2));
    }

    #[test]
    fn monic_laguerre_families() {
        let g = build_gram(&laguerre(0), 3).unwrap();
        let ops = monic_ops(&g).unwrap();
        assert_eq!(ops.poly(0), &Polynomial::one());
        assert_eq!(ops.poly(1), &poly(&[-1, 1]));
        assert_eq!(ops.poly(2), &poly(&[2, -4, 1]));
        assert_eq!(ops.poly(3), &poly(&[-6, 18, -9, 1]));
        assert_eq!(ops.norm_sq(0), &rat_int(1));
        assert_eq!(ops.norm_sq(1), &rat_int(1));
        let rec = ops.recurrence().unwrap();
        assert_eq!(rec.b[0], rat_int(1));
        assert_eq!(rec.b[1], rat_int(3));
        assert_eq!(rec.c_sq[0], rat_int(1));

        let g = build_gram(&laguerre(1), 2).unwrap();
        let ops = monic_ops(&g).unwrap();
        assert_eq!(ops.poly(1), &poly(&[-2, 1]));
        assert_eq!(ops.norm_sq(1), &rat_int(2));
    }

    #[test]
    fn degree_zero_norm_is_corner_entry() {
        let base = MomentFunctional::custom(vec![rat(7, 3)]).unwrap();
        let g = build_gram(&base, 0).unwrap();
        let ops = monic_ops(&g).unwrap();
        assert_eq!(ops.poly(0), &Polynomial::one());
        assert_eq!(ops.norm_sq(0), &rat(7, 3));
    }

    #[test]
    fn monic_ops_rejects_singular_minor() {
        // Hankel over (1, 1, 1, 1, 1): minor 2 = 1*1 - 1*1 = 0, so the
        // orthogonality system for P_2 is singular.
        let base = MomentFunctional::custom(vec![rat_int(1); 5]).unwrap();
        let g = build_gram(&base, 2).unwrap();
        assert!(matches!(monic_ops(&g), Err(Error::NotRegular(2))));
    }

    #[test]
    fn orthogonality_holds_exactly() {
        let base = laguerre(2);
        let g = build_gram(&base, 6).unwrap();
        let ops = monic_ops(&g).unwrap();
        for n in 0..=6usize {
            for k in 0..n {
                let t_k = Polynomial::monomial(rat_int(1), k);
                assert!(g.apply(ops.poly(n), &t_k).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn second_kind_values_alpha_zero() {
        let base = laguerre(0);
        let (_, _, sk) = build_chain(&base, 3).unwrap();
        // Q_0 = 0, Q_1 = s_0 = 1, Q_2 = t - 3.
        assert!(sk.poly(0).is_zero());
        assert_eq!(sk.poly(1), &Polynomial::one());
        assert_eq!(sk.at_zero(1), &rat_int(1));
        assert_eq!(sk.poly(2), &poly(&[-3, 1]));
        assert_eq!(sk.at_zero(2), &rat_int(-3));
        assert_eq!(sk.derivative_at_zero(2), &rat_int(1));
    }

    #[test]
    fn second_kind_values_alpha_one_and_two() {
        let base = laguerre(1);
        let (_, ops, sk) = build_chain(&base, 2).unwrap();
        assert_eq!(sk.at_zero(1), &rat_int(1));
        assert_eq!(ops.poly(1).eval(&Rational::zero()), rat_int(-2));

        // alpha = 2: P_2 = t^2 - 8t + 12, Q_2 = t - 5.
        let base = laguerre(2);
        let (_, ops, sk) = build_chain(&base, 2).unwrap();
        assert_eq!(ops.poly(2), &poly(&[12, -8, 1]));
        assert_eq!(sk.poly(2), &poly(&[-5, 1]));
    }

    #[test]
    fn r_values_examples() {
        let base = laguerre(2);
        let (_, ops, sk) = build_chain(&base, 2).unwrap();
        // s = 0 degenerates to (Q_n(0), Q'_n(0)).
        let rv = r_values(&sk, &ops, &Rational::zero());
        assert_eq!(rv[2], (rat_int(-5), rat_int(1)));
        // n = 0: (s, 0) since P_0 = 1, Q_0 = 0.
        let rv = r_values(&sk, &ops, &rat(1, 2));
        assert_eq!(rv[0], (rat(1, 2), rat_int(0)));
        // n = 2, s = 1/2: R = 6 - 5 = 1, R' = -4 + 1 = -3.
        assert_eq!(rv[2], (rat_int(1), rat_int(-3)));
    }

    #[test]
    fn norm_chain_matches_recurrence() {
        let base = laguerre(1);
        let g = build_gram(&base, 5).unwrap();
        let ops = monic_ops(&g).unwrap();
        let rec = ops.recurrence().unwrap();
        for n in 1..=5usize {
            assert_eq!(
                ops.norm_sq(n),
                &(&rec.c_sq[n - 1] * ops.norm_sq(n - 1)),
                "h_{n}^2 = c_{}^2 h_{}^2",
                n - 1,
                n - 1
            );
        }
    }
}
