//! The double Geronimus transformation: coefficients `B_n`, `C_n` from the
//! 2x2 orthogonality system with the 3x3 determinant formula as the
//! verification route, transformed polynomials
//! `P_n** = P_n + B_n P_{n-1} + C_n P_{n-2}`, the norm chain `(h_n**)^2`,
//! and the Sobolev inner-product representation with a symmetric 2x2 mass
//! matrix at the origin.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::moments::{DividedMeasure, GeronimusMoments2, MomentFunctional};
use crate::ops::{build_gram, GramMatrix, MonicOPS, SecondKindValues};
use crate::poly::Polynomial;
use crate::scalar::{format_rational, rat_int, Rational};

/// Full output of a double Geronimus step up to level `N`.
#[derive(Clone, Debug)]
pub struct DoubleTransform {
    corner: (Rational, Rational, Rational),
    /// `B_1 ..= B_N`.
    b: Vec<Rational>,
    /// `C_2 ..= C_N`.
    c: Vec<Rational>,
    /// `P_0** ..= P_N**`.
    p_ss: Vec<Polynomial>,
    /// `d_1** ..= d_N**`; `d_1** = [P_0, 1]_2 = s_0**` is the denominator of
    /// the single-equation level, `d_n**` for `n >= 2` the 2x2 determinant.
    d_ss: Vec<Rational>,
    /// `(h_0**)^2 ..= (h_N**)^2`.
    h_ss_sq: Vec<Rational>,
}

impl DoubleTransform {
    /// Highest level `N` reached.
    pub fn n_max(&self) -> usize {
        self.b.len()
    }

    /// The free corner `(s_0**, s_1**, s_2**)`.
    pub fn corner(&self) -> (&Rational, &Rational, &Rational) {
        (&self.corner.0, &self.corner.1, &self.corner.2)
    }

    /// `B_n`, `1 <= n <= N`.
    pub fn b(&self, n: usize) -> &Rational {
        &self.b[n - 1]
    }

    pub fn b_all(&self) -> &[Rational] {
        &self.b
    }

    /// `C_n`, `2 <= n <= N`.
    pub fn c(&self, n: usize) -> &Rational {
        &self.c[n - 2]
    }

    pub fn c_all(&self) -> &[Rational] {
        &self.c
    }

    /// `P_n**`, `0 <= n <= N`.
    pub fn p_ss(&self, n: usize) -> &Polynomial {
        &self.p_ss[n]
    }

    pub fn p_ss_all(&self) -> &[Polynomial] {
        &self.p_ss
    }

    /// `d_n**`, `1 <= n <= N`.
    pub fn d_ss(&self, n: usize) -> &Rational {
        &self.d_ss[n - 1]
    }

    pub fn d_ss_all(&self) -> &[Rational] {
        &self.d_ss
    }

    /// `(h_n**)^2`, `0 <= n <= N`.
    pub fn h_ss_sq(&self, n: usize) -> &Rational {
        &self.h_ss_sq[n]
    }

    pub fn h_ss_sq_all(&self) -> &[Rational] {
        &self.h_ss_sq
    }
}

/// The pairings `[P_k, 1]_2` and `[P_k, t]_2` expressed through second-kind
/// values:
///
/// - `[P_k, 1]_2 = Q'_k(0) + s_0** P_k(0) + s_1** P'_k(0)`
/// - `[P_k, t]_2 = Q_k(0) + s_1** P_k(0) + (s_2** - s_0) P'_k(0)`
///
/// where `s_0` is the zeroth base moment.
fn pairings(
    base: &MomentFunctional,
    ops: &MonicOPS,
    sk: &SecondKindValues,
    corner: (&Rational, &Rational, &Rational),
    n_max: usize,
) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let (s0_ss, s1_ss, s2_ss) = corner;
    let s0 = base.moment(0)?;
    let zero = Rational::zero();
    let mut with_one = Vec::with_capacity(n_max + 1);
    let mut with_t = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        let p0 = ops.poly(k).eval(&zero);
        let dp0 = ops.poly(k).derivative().eval(&zero);
        with_one.push(sk.derivative_at_zero(k) + s0_ss * &p0 + s1_ss * &dp0);
        with_t.push(sk.at_zero(k) + s1_ss * &p0 + (s2_ss - &s0) * &dp0);
    }
    Ok((with_one, with_t))
}

/// Apply the double Geronimus transformation with corner
/// `(s0_ss, s1_ss, s2_ss)` up to level `n_max >= 2`.
///
/// `(B_n, C_n)` solve the exact 2x2 system built from `[P_k, 1]_2` and
/// `[P_k, t]_2`; `B_1` comes from the single condition
/// `[P_1 + B_1 P_0, 1]_2 = 0`. Each `P_n**` is independently recomputed from
/// the 3x3 determinant representation and must match coefficientwise; the
/// norm chain `(h_0**)^2 = s_0**`,
/// `(h_1**)^2 = s_2** + s_1** (B_1 - s_1/s_0)`,
/// `(h_{n+2}**)^2 = C_{n+2} h_n^2` is re-verified against direct Gram
/// evaluation, as is orthogonality of every `P_n**`.
pub fn transform_double(
    base: &MomentFunctional,
    ops: &MonicOPS,
    sk: &SecondKindValues,
    s0_ss: &Rational,
    s1_ss: &Rational,
    s2_ss: &Rational,
    n_max: usize,
) -> Result<DoubleTransform> {
    if n_max < 2 {
        return Err(Error::Domain(format!(
            "transform_double needs n_max >= 2, got {n_max}"
        )));
    }
    if ops.max_degree() < n_max || sk.max_degree() < n_max {
        return Err(Error::DimensionMismatch(format!(
            "transform_double to level {n_max} needs polynomials to degree {n_max}"
        )));
    }

    let (u, v) = pairings(base, ops, sk, (s0_ss, s1_ss, s2_ss), n_max)?;
    let form = GeronimusMoments2::new(base.clone(), s0_ss.clone(), s1_ss.clone(), s2_ss.clone());
    let gram_ss = build_gram(&form, n_max)?;

    // Cross-check the pairing formulas against the Gram matrix itself.
    for k in 0..=n_max.min(gram_ss.max_degree() - 1) {
        let one = Polynomial::one();
        let t = Polynomial::x();
        if gram_ss.apply(ops.poly(k), &one)? != u[k] || gram_ss.apply(ops.poly(k), &t)? != v[k] {
            return Err(Error::RouteDisagreement {
                level: k,
                detail: "[P_k, 1]_2 / [P_k, t]_2 second-kind formulas vs Gram".into(),
            });
        }
    }

    // Level 1: single orthogonality condition.
    if u[0].is_zero() {
        return Err(Error::DegenerateDeterminant(1));
    }
    let b1 = -&u[1] / &u[0];
    let mut b = vec![b1.clone()];
    let mut c = Vec::with_capacity(n_max - 1);
    let mut d_ss = vec![u[0].clone()];
    let mut p_ss = vec![Polynomial::one(), ops.poly(1) + &ops.poly(0).scale(&b1)];

    for n in 2..=n_max {
        let det = &u[n - 1] * &v[n - 2] - &u[n - 2] * &v[n - 1];
        if det.is_zero() {
            return Err(Error::DegenerateDeterminant(n));
        }
        // u_n + B u_{n-1} + C u_{n-2} = 0,  v_n + B v_{n-1} + C v_{n-2} = 0.
        let b_n = (&u[n - 2] * &v[n] - &u[n] * &v[n - 2]) / &det;
        let c_n = (&u[n] * &v[n - 1] - &u[n - 1] * &v[n]) / &det;

        let pn = ops.poly(n) + &ops.poly(n - 1).scale(&b_n);
        let pn = &pn + &ops.poly(n - 2).scale(&c_n);

        // Verification route: the 3x3 determinant representation expanded
        // along its polynomial column.
        let det_route = {
            let m_n = &u[n - 1] * &v[n - 2] - &v[n - 1] * &u[n - 2];
            let m_n1 = &u[n] * &v[n - 2] - &v[n] * &u[n - 2];
            let m_n2 = &u[n] * &v[n - 1] - &v[n] * &u[n - 1];
            let combo = &(&ops.poly(n).scale(&m_n) - &ops.poly(n - 1).scale(&m_n1))
                + &ops.poly(n - 2).scale(&m_n2);
            combo.scale(&det.clone().recip())
        };
        if det_route != pn {
            return Err(Error::RouteDisagreement {
                level: n,
                detail: "P_n** system solve vs determinant formula".into(),
            });
        }

        b.push(b_n);
        c.push(c_n);
        d_ss.push(det);
        p_ss.push(pn);
    }

    // Norm chain and exact orthogonality against the transformed Gram.
    let s0 = base.moment(0)?;
    let s1 = base.moment(1)?;
    let mut h_ss_sq = vec![s0_ss.clone(), s2_ss + s1_ss * (&b[0] - &s1 / &s0)];
    for n in 2..=n_max {
        h_ss_sq.push(&c[n - 2] * ops.norm_sq(n - 2));
    }
    for n in 0..=n_max {
        if gram_ss.apply(&p_ss[n], &p_ss[n])? != h_ss_sq[n] {
            return Err(Error::RouteDisagreement {
                level: n,
                detail: "(h_n**)^2 chain vs direct [P_n**, P_n**]_2".into(),
            });
        }
        for k in 0..n {
            let t_k = Polynomial::monomial(rat_int(1), k);
            if !gram_ss.apply(&p_ss[n], &t_k)?.is_zero() {
                return Err(Error::RouteDisagreement {
                    level: n,
                    detail: format!("[P_{n}**, t^{k}]_2 != 0"),
                });
            }
        }
    }

    Ok(DoubleTransform {
        corner: (s0_ss.clone(), s1_ss.clone(), s2_ss.clone()),
        b,
        c,
        p_ss,
        d_ss,
        h_ss_sq,
    })
}

/// The symmetric 2x2 mass matrix of the Sobolev representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SobolevMassMatrix {
    m: [[Rational; 2]; 2],
}

impl SobolevMassMatrix {
    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.m[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(Zero::is_zero)
    }

    /// `Some((lambda_1, lambda_2))` when the matrix is diagonal.
    pub fn as_diagonal(&self) -> Option<(&Rational, &Rational)> {
        if self.m[0][1].is_zero() {
            Some((&self.m[0][0], &self.m[1][1]))
        } else {
            None
        }
    }
}

/// `M = (corner) - (mu_2 moment 2x2 block)`:
/// `M = [[s_0** - m_0, s_1** - m_1], [s_1** - m_1, s_2** - m_2]]`.
pub fn sobolev_mass_matrix(
    div: &DividedMeasure,
    s0_ss: &Rational,
    s1_ss: &Rational,
    s2_ss: &Rational,
) -> Result<SobolevMassMatrix> {
    if div.order() != 2 {
        return Err(Error::Domain(format!(
            "sobolev mass matrix needs an order-2 divided measure, got order {}",
            div.order()
        )));
    }
    let m0 = div.moment(0)?;
    let m1 = div.moment(1)?;
    let m2 = div.moment(2)?;
    let off = s1_ss - &m1;
    Ok(SobolevMassMatrix {
        m: [[s0_ss - &m0, off.clone()], [off, s2_ss - &m2]],
    })
}

/// Evaluate the Sobolev representation
/// `[f, g]_2 = integral of f g against mu_2
///            + (f(0), f'(0)) M (g(0), g'(0))^T`, exactly.
pub fn sobolev_eval(
    div: &DividedMeasure,
    m: &SobolevMassMatrix,
    f: &Polynomial,
    g: &Polynomial,
) -> Result<Rational> {
    if div.order() != 2 {
        return Err(Error::Domain(format!(
            "sobolev form needs an order-2 divided measure, got order {}",
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
    let fv = [f.eval(&zero), f.derivative().eval(&zero)];
    let gv = [g.eval(&zero), g.derivative().eval(&zero)];
    let mut mass = Rational::zero();
    for i in 0..2 {
        for j in 0..2 {
            mass += &fv[i] * m.entry(i, j) * &gv[j];
        }
    }
    Ok(integral + mass)
}

/// Assert `sobolev_eval(t^i, t^j) = Gram_2(i, j)` exactly for all
/// `i, j <= n`.
pub fn verify_sobolev_vs_gram_2(
    div: &DividedMeasure,
    s0_ss: &Rational,
    s1_ss: &Rational,
    s2_ss: &Rational,
    n: usize,
) -> Result<()> {
    let m = sobolev_mass_matrix(div, s0_ss, s1_ss, s2_ss)?;
    let form = GeronimusMoments2::new(
        div.base().clone(),
        s0_ss.clone(),
        s1_ss.clone(),
        s2_ss.clone(),
    );
    let gram = build_gram(&form, n)?;
    verify_sobolev_block(div, &m, &gram, n)
}

fn verify_sobolev_block(
    div: &DividedMeasure,
    m: &SobolevMassMatrix,
    gram: &GramMatrix,
    n: usize,
) -> Result<()> {
    for i in 0..=n {
        for j in 0..=n {
            let f = Polynomial::monomial(rat_int(1), i);
            let g = Polynomial::monomial(rat_int(1), j);
            let lhs = sobolev_eval(div, m, &f, &g)?;
            let rhs = gram.entry(i, j);
            if &lhs != rhs {
                return Err(Error::MismatchAt {
                    i,
                    j,
                    context: "Sobolev representation vs Gram".into(),
                    left: format_rational(&lhs),
                    right: format_rational(rhs),
                });
            }
        }
    }
    Ok(())
}
