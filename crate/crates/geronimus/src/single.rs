//! The single Geronimus transformation: connection coefficients `A_n`,
//! transformed polynomials `P_n* = P_n + A_n P_{n-1}`, the regularity
//! certificates `d_n*`, the norm chain `(h_n*)^2`, and the mass-point
//! representation of the transformed form.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::moments::{DividedMeasure, GeronimusMoments1, MomentFunctional};
use crate::ops::{build_gram, GramMatrix, MonicOPS, SecondKindValues};
use crate::poly::Polynomial;
use crate::scalar::{format_rational, rat_int, Rational};

/// Full output of a single Geronimus step up to level `N`.
#[derive(Clone, Debug)]
pub struct SingleTransform {
    s0_star: Rational,
    /// `A_1 ..= A_N`.
    a: Vec<Rational>,
    /// `P_0* ..= P_N*`.
    p_star: Vec<Polynomial>,
    /// `d_1* ..= d_N*`, where `d_n* = s_0* P_{n-1}(0) + Q_{n-1}(0)`.
    d_star: Vec<Rational>,
    /// `(h_0*)^2 ..= (h_N*)^2`.
    h_star_sq: Vec<Rational>,
}

impl SingleTransform {
    /// Highest level `N` reached.
    pub fn n_max(&self) -> usize {
        self.a.len()
    }

    pub fn s0_star(&self) -> &Rational {
        &self.s0_star
    }

    /// `A_n`, `1 <= n <= N`.
    pub fn a(&self, n: usize) -> &Rational {
        &self.a[n - 1]
    }

    pub fn a_all(&self) -> &[Rational] {
        &self.a
    }

    /// `P_n*`, `0 <= n <= N`.
    pub fn p_star(&self, n: usize) -> &Polynomial {
        &self.p_star[n]
    }

    pub fn p_star_all(&self) -> &[Polynomial] {
        &self.p_star
    }

    /// `d_n*`, `1 <= n <= N`.
    pub fn d_star(&self, n: usize) -> &Rational {
        &self.d_star[n - 1]
    }

    pub fn d_star_all(&self) -> &[Rational] {
        &self.d_star
    }

    /// `(h_n*)^2`, `0 <= n <= N`.
    pub fn h_star_sq(&self, n: usize) -> &Rational {
        &self.h_star_sq[n]
    }

    pub fn h_star_sq_all(&self) -> &[Rational] {
        &self.h_star_sq
    }
}

/// Apply the single Geronimus transformation with parameter `s0_star` up to
/// level `n_max`.
///
/// `A_n` comes from the closed quotient over `d_n*` and is cross-checked by
/// the one-unknown orthogonality solve; every `P_n*` is re-verified
/// orthogonal against the transformed Gram matrix, and the norm chain
/// `(h_{n+1}*)^2 = A_{n+1} h_n^2` is re-verified against direct evaluation.
/// The first level with `d_n* = 0` aborts with
/// [`Error::DegenerateDenominator`]; lower levels can be recovered by
/// rerunning with a smaller `n_max`.
pub fn transform_single(
    base: &MomentFunctional,
    ops: &MonicOPS,
    sk: &SecondKindValues,
    s0_star: &Rational,
    n_max: usize,
) -> Result<SingleTransform> {
    if ops.max_degree() < n_max || sk.max_degree() < n_max {
        return Err(Error::DimensionMismatch(format!(
            "transform_single to level {n_max} needs polynomials to degree {n_max}"
        )));
    }
    let zero = Rational::zero();
    let value_at_zero =
        |n: usize| -> Rational { s0_star * ops.poly(n).eval(&zero) + sk.at_zero(n) };

    let form = GeronimusMoments1::new(base.clone(), s0_star.clone());
    let functional = form.to_functional();
    let gram_star = build_gram(&form, n_max)?;

    let mut a = Vec::with_capacity(n_max);
    let mut p_star = vec![Polynomial::one()];
    let mut d_star = Vec::with_capacity(n_max);
    let mut h_star_sq = vec![s0_star.clone()];

    for n in 1..=n_max {
        let denom = value_at_zero(n - 1);
        if denom.is_zero() {
            return Err(Error::DegenerateDenominator(n));
        }
        let a_n = -value_at_zero(n) / &denom;

        // Independent route: solve [P_n + a P_{n-1}, 1]_1 = 0 for a directly
        // from the transformed moments.
        let pair_with_one = |p: &Polynomial| -> Result<Rational> {
            let mut acc = Rational::zero();
            for (i, c) in p.coeffs().iter().enumerate() {
                acc += c * functional.moment(i)?;
            }
            Ok(acc)
        };
        let lead = pair_with_one(ops.poly(n - 1))?;
        if lead.is_zero() || -pair_with_one(ops.poly(n))? / &lead != a_n {
            return Err(Error::RouteDisagreement {
                level: n,
                detail: "A_n quotient formula vs one-unknown solve".into(),
            });
        }

        let pn_star = ops.poly(n) + &ops.poly(n - 1).scale(&a_n);
        let h_sq = &a_n * ops.norm_sq(n - 1);
        if gram_star.apply(&pn_star, &pn_star)? != h_sq {
            return Err(Error::RouteDisagreement {
                level: n,
                detail: "(h_n*)^2 chain vs direct [P_n*, P_n*]_1".into(),
            });
        }
        for k in 0..n {
            let t_k = Polynomial::monomial(rat_int(1), k);
            if !gram_star.apply(&pn_star, &t_k)?.is_zero() {
                return Err(Error::RouteDisagreement {
                    level: n,
                    detail: format!("[P_{n}*, t^{k}]_1 != 0"),
                });
            }
        }

        a.push(a_n);
        d_star.push(denom);
        p_star.push(pn_star);
        h_star_sq.push(h_sq);
    }

    Ok(SingleTransform {
        s0_star: s0_star.clone(),
        a,
        p_star,
        d_star,
        h_star_sq,
    })
}

/// Evaluate the mass-point representation of the transformed form:
/// `[f, g]_1 = integral of f g against mu_1 + (s_0* - m_0) f(0) g(0)`,
/// exactly, from the divided-measure moments.
pub fn mass_form_eval_1(
    div: &DividedMeasure,
    s0_star: &Rational,
    f: &Polynomial,
    g: &Polynomial,
) -> Result<Rational> {
    if div.order() != 1 {
        return Err(Error::Domain(format!(
            "mass-point form needs an order-1 divided measure, got order {}",
            div.order()
        )));
    }
    let product = f * g;
    let mut integral = Rational::zero();
    for (k, c) in product.coeffs().iter().enumerate() {
        if !c.is_zero() {
            integral += c * div.moment(k)?;
        }
    }
    let zero = Rational::zero();
    let mass = (s0_star - div.moment(0)?) * f.eval(&zero) * g.eval(&zero);
    Ok(integral + mass)
}

/// Assert `mass_form_eval_1(t^i, t^j) = Gram_1(i, j)` exactly for all
/// `i, j <= n`. A mismatch indicates an inconsistent head vector for `mu_1`.
pub fn verify_mass_vs_gram_1(div: &DividedMeasure, s0_star: &Rational, n: usize) -> Result<()> {
    let form = GeronimusMoments1::new(div.base().clone(), s0_star.clone());
    let gram = build_gram(&form, n)?;
    verify_mass_vs_gram_block(div, s0_star, &gram, n)
}

fn verify_mass_vs_gram_block(
    div: &DividedMeasure,
    s0_star: &Rational,
    gram: &GramMatrix,
    n: usize,
) -> Result<()> {
    for i in 0..=n {
        for j in 0..=n {
            let f = Polynomial::monomial(rat_int(1), i);
            let g = Polynomial::monomial(rat_int(1), j);
            let lhs = mass_form_eval_1(div, s0_star, &f, &g)?;
            let rhs = gram.entry(i, j);
            if &lhs != rhs {
                return Err(Error::MismatchAt {
                    i,
                    j,
                    context: "mass-point representation vs Gram".into(),
                    left: format_rational(&lhs),
                    right: format_rational(rhs),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::laguerre_divided_head;
    use crate::ops::{build_chain, monic_ops};
    use crate::oracle::check_orthogonality;
    use crate::scalar::rat;

    fn laguerre(alpha: i64) -> MomentFunctional {
        MomentFunctional::laguerre(rat_int(alpha)).unwrap()
    }

    fn poly(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn laguerre_connection_is_n() {
        // alpha = 1 with s_0* = 1: A_n = n, and P_n* is the alpha = 0 family.
        let base = laguerre(1);
        let (_, ops, sk) = build_chain(&base, 8).unwrap();
        let st = transform_single(&base, &ops, &sk, &rat_int(1), 8).unwrap();
        for n in 1..=8usize {
            assert_eq!(st.a(n), &rat_int(n as i64), "A_{n}");
        }
        let alpha0 = laguerre(0);
        let (_, target, _) = build_chain(&alpha0, 8).unwrap();
        for n in 0..=8usize {
            assert_eq!(st.p_star(n), target.poly(n), "P_{n}*");
        }
    }

    #[test]
    fn first_level_by_hand() {
        // A_1 = -(1*(-2) + 1)/(1*1 + 0) = 1, P_1* = t - 1.
        let base = laguerre(1);
        let (_, ops, sk) = build_chain(&base, 2).unwrap();
        let st = transform_single(&base, &ops, &sk, &rat_int(1), 2).unwrap();
        assert_eq!(st.a(1), &rat_int(1));
        assert_eq!(st.p_star(1), &poly(&[-1, 1]));
        assert_eq!(st.d_star(1), &rat_int(1));
    }

    #[test]
    fn degenerate_denominator_at_level_one() {
        // s_0* = 0: d_1* = s_0* P_0(0) + Q_0(0) = 0.
        let base = laguerre(1);
        let (_, ops, sk) = build_chain(&base, 3).unwrap();
        let err = transform_single(&base, &ops, &sk, &Rational::zero(), 3).unwrap_err();
        assert_eq!(err, Error::DegenerateDenominator(1));
    }

    #[test]
    fn norm_chain_and_positivity() {
        let base = laguerre(2);
        let (_, ops, sk) = build_chain(&base, 6).unwrap();
        let st = transform_single(&base, &ops, &sk, &rat(1, 2), 6).unwrap();
        assert_eq!(st.h_star_sq(0), &rat(1, 2));
        for n in 0..6usize {
            assert_eq!(
                st.h_star_sq(n + 1),
                &(st.a(n + 1) * ops.norm_sq(n)),
                "(h_{}*)^2 = A_{} h_{}^2",
                n + 1,
                n + 1,
                n
            );
            // Positive definite transformed form forces A_n > 0.
            assert!(st.a(n + 1) > &Rational::zero());
        }
    }

    #[test]
    fn determinant_form_matches_connection_shape() {
        // (1/d_n*) det [[P_n, s_0* P_n(0) + Q_n(0)], [P_{n-1}, d_n*]]
        // must equal P_n + A_n P_{n-1} coefficientwise.
        let base = laguerre(1);
        let (_, ops, sk) = build_chain(&base, 5).unwrap();
        let s0 = rat(3, 7);
        let st = transform_single(&base, &ops, &sk, &s0, 5).unwrap();
        let zero = Rational::zero();
        for n in 1..=5usize {
            let num = &s0 * ops.poly(n).eval(&zero) + sk.at_zero(n);
            let det_form = &(ops.poly(n).scale(st.d_star(n))) - &ops.poly(n - 1).scale(&num);
            let scaled = det_form.scale(&st.d_star(n).clone().recip());
            assert_eq!(&scaled, st.p_star(n), "n = {n}");
        }
    }

    #[test]
    fn transformed_family_is_orthogonal_by_oracle() {
        let base = laguerre(1);
        let (_, ops, sk) = build_chain(&base, 6).unwrap();
        let st = transform_single(&base, &ops, &sk, &rat_int(1), 6).unwrap();
        let form = GeronimusMoments1::new(base, rat_int(1));
        let gram = build_gram(&form, 6).unwrap();
        assert!(check_orthogonality(&gram, st.p_star_all()).is_pass());

        // Perturbation witness: P_n + (A_n + 1) P_{n-1} fails against the
        // transformed Gram at (n, 0).
        let n = 3usize;
        let bad = ops.poly(n) + &ops.poly(n - 1).scale(&(st.a(n) + rat_int(1)));
        let mut family = st.p_star_all()[..n].to_vec();
        family.push(bad);
        let report = check_orthogonality(&gram, &family);
        let failure = report.failure.expect("perturbed polynomial must fail");
        assert_eq!((failure.i, failure.j), (n, 0));
    }

    #[test]
    fn transformed_ops_match_direct_construction() {
        // monic_ops over the transformed Gram reproduces P_n* directly.
        let base = laguerre(1);
        let (_, ops, sk) = build_chain(&base, 6).unwrap();
        let st = transform_single(&base, &ops, &sk, &rat_int(1), 6).unwrap();
        let form = GeronimusMoments1::new(base, rat_int(1));
        let direct = monic_ops(&build_gram(&form, 6).unwrap()).unwrap();
        for n in 0..=6usize {
            assert_eq!(st.p_star(n), direct.poly(n));
            assert_eq!(st.h_star_sq(n), direct.norm_sq(n));
        }
    }

    #[test]
    fn mass_form_examples() {
        let base = laguerre(1);
        let head = laguerre_divided_head(&rat_int(1), 1).unwrap();
        let div = DividedMeasure::new(base, 1, head).unwrap();
        let s0 = rat(5, 3);
        // f = g = 1: s_0* by definition.
        assert_eq!(
            mass_form_eval_1(&div, &s0, &Polynomial::one(), &Polynomial::one()).unwrap(),
            s0
        );
        // f = t, g = 1: the mass term vanishes and m_1 = s_0.
        assert_eq!(
            mass_form_eval_1(&div, &s0, &Polynomial::x(), &Polynomial::one()).unwrap(),
            rat_int(1)
        );
        // f = g = t - 1 with s_0* = 1: m_2 - 2 m_1 + m_0 = 2 - 2 + 1 = 1.
        let f = poly(&[-1, 1]);
        assert_eq!(
            mass_form_eval_1(&div, &rat_int(1), &f, &f).unwrap(),
            rat_int(1)
        );
    }

    #[test]
    fn mass_form_matches_gram_and_is_head_invariant() {
        let base = laguerre(1);
        let s0 = rat(7, 2);
        for head in [rat_int(1), rat_int(2)] {
            let div = DividedMeasure::new(base.clone(), 1, vec![head]).unwrap();
            verify_mass_vs_gram_1(&div, &s0, 6).unwrap();
        }

        // Custom base (1, 2, 3) with head 5, s_0* = 7, up to i + j <= 2.
        let base = MomentFunctional::custom(vec![rat_int(1), rat_int(2), rat_int(3)]).unwrap();
        let div = DividedMeasure::new(base, 1, vec![rat_int(5)]).unwrap();
        verify_mass_vs_gram_1(&div, &rat_int(7), 1).unwrap();
    }

    #[test]
    fn mass_form_insufficient_moments() {
        let base = MomentFunctional::custom(vec![rat_int(1), rat_int(2)]).unwrap();
        let div = DividedMeasure::new(base, 1, vec![rat_int(1)]).unwrap();
        let f = poly(&[0, 0, 1]);
        assert!(matches!(
            mass_form_eval_1(&div, &rat_int(1), &f, &f),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}
