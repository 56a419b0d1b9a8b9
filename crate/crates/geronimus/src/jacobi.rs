//! Jacobi-matrix layer: monic tridiagonal matrices from the three-term
//! recurrence, Darboux factors `L_mon`, `U_mon` from exact connection
//! expansions, the factorization identities
//! `J_mon = U_mon L_mon`, `J*_mon = L_mon U_mon` (single step) and
//! `J_mon^2 = U_mon L_mon`, `J**_mon = L_mon U_mon` (double step), and the
//! Cholesky structure of the symmetric matrices `J*`, `J**` in big-float
//! arithmetic with exact rational side conditions.

use num_traits::{One, Signed, Zero};

use crate::double::{transform_double, DoubleTransform};
use crate::error::{Error, Result};
use crate::linalg::BandedMatrix;
use crate::moments::{GeronimusMoments1, MomentFunctional};
use crate::ops::{build_chain, build_gram, monic_ops, GramMatrix, MonicOPS};
use crate::poly::Polynomial;
use crate::scalar::{format_rational, BigFloat, Rational};
use crate::single::{transform_single, SingleTransform};

/// The `N x N` truncation of a monic tridiagonal Jacobi matrix: diagonal
/// `b_n`, subdiagonal `(c_{n-1})^2`, superdiagonal ones.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicJacobi {
    n: usize,
    b: Vec<Rational>,
    c_sq: Vec<Rational>,
}

impl MonicJacobi {
    pub fn size(&self) -> usize {
        self.n
    }

    /// Diagonal entries `b_0 ..= b_{N-1}`.
    pub fn diag(&self) -> &[Rational] {
        &self.b
    }

    /// Subdiagonal entries `(c_0)^2 ..= (c_{N-2})^2`.
    pub fn subdiag(&self) -> &[Rational] {
        &self.c_sq
    }

    /// The matrix itself.
    pub fn matrix(&self) -> BandedMatrix<Rational> {
        let mut m = BandedMatrix::zeros(self.n, 1, 1);
        for (i, b) in self.b.iter().enumerate() {
            m.set(i, i, b.clone());
        }
        for (i, c) in self.c_sq.iter().enumerate() {
            m.set(i + 1, i, c.clone());
            m.set(i, i + 1, Rational::one());
        }
        m
    }
}

/// The `N x N` truncation of `J_mon` for a family with recurrence data.
pub fn build_monic_jacobi(ops: &MonicOPS, n: usize) -> Result<MonicJacobi> {
    let rec = ops.recurrence().ok_or_else(|| {
        Error::Domain("monic Jacobi matrix needs a Hankel source with recurrence data".into())
    })?;
    if rec.b.len() < n {
        return Err(Error::DimensionMismatch(format!(
            "jacobi truncation {n} needs recurrence to level {n}, have {}",
            rec.b.len()
        )));
    }
    Ok(MonicJacobi {
        n,
        b: rec.b[..n].to_vec(),
        c_sq: rec.c_sq[..n - 1].to_vec(),
    })
}

/// Which Darboux step a factor pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Single,
    Double,
}

/// The factor pair of a Darboux step: `l_mon` is unit lower triangular with
/// the connection coefficients (`A_n`, or `B_n` and `C_n`), `u_mon` upper
/// triangular with the expansion coefficients of `t P_n` (resp. `t^2 P_n`)
/// in the transformed basis.
#[derive(Clone, Debug)]
pub struct DarbouxFactors {
    pub kind: FactorKind,
    pub l_mon: BandedMatrix<Rational>,
    pub u_mon: BandedMatrix<Rational>,
}

/// Expansion coefficients of `p` in a basis of monic polynomials with
/// `deg basis[k] = k`: plain back-substitution on leading coefficients.
fn expand_in_monic_basis(p: &Polynomial, basis: &[Polynomial]) -> Result<Vec<Rational>> {
    let deg = p.degree();
    if deg < 0 {
        return Ok(Vec::new());
    }
    let deg = deg as usize;
    if basis.len() <= deg {
        return Err(Error::DimensionMismatch(format!(
            "expansion of degree {deg} needs {} basis polynomials, have {}",
            deg + 1,
            basis.len()
        )));
    }
    let mut coeffs = vec![Rational::zero(); deg + 1];
    let mut rest = p.clone();
    for k in (0..=deg).rev() {
        let gamma = rest.coeff(k);
        if !gamma.is_zero() {
            debug_assert_eq!(basis[k].degree(), k as isize);
            rest = &rest - &basis[k].scale(&gamma);
            coeffs[k] = gamma;
        }
    }
    debug_assert!(rest.is_zero());
    Ok(coeffs)
}

/// Extract `F_{n+1}` from the exact expansion
/// `t P_n = P_{n+1}* + F_{n+1} P_n*` and assemble the `N x N` factors of the
/// single step. Requires the transform to cover level `N`.
pub fn darboux_factors_single(
    base_ops: &MonicOPS,
    st: &SingleTransform,
    n: usize,
) -> Result<DarbouxFactors> {
    if st.n_max() < n || base_ops.max_degree() + 1 < n {
        return Err(Error::DimensionMismatch(format!(
            "single factors at truncation {n} need the transform to level {n}"
        )));
    }
    let mut f = Vec::with_capacity(n);
    for k in 0..n {
        let shifted = base_ops.poly(k).shift_up(1);
        let gamma = expand_in_monic_basis(&shifted, st.p_star_all())?;
        for (j, g) in gamma.iter().enumerate().take(k) {
            if !g.is_zero() {
                return Err(Error::ExpansionResidual {
                    level: k,
                    detail: format!("t P_{k} has a P_{j}* component {}", format_rational(g)),
                });
            }
        }
        debug_assert!(gamma[k + 1].is_one());
        let f_next = gamma[k].clone();
        // Structural cross-check: F_{k+1} (h_k*)^2 = h_k^2.
        if &f_next * st.h_star_sq(k) != *base_ops.norm_sq(k) {
            return Err(Error::RouteDisagreement {
                level: k + 1,
                detail: "F_{n+1} expansion vs h_n^2 / (h_n*)^2".into(),
            });
        }
        if f_next.is_zero() {
            return Err(Error::ExpansionResidual {
                level: k,
                detail: format!("F_{} = 0", k + 1),
            });
        }
        f.push(f_next);
    }

    let mut l_mon = BandedMatrix::zeros(n, 1, 0);
    let mut u_mon = BandedMatrix::zeros(n, 0, 1);
    for i in 0..n {
        l_mon.set(i, i, Rational::one());
        u_mon.set(i, i, f[i].clone());
        if i + 1 < n {
            l_mon.set(i + 1, i, st.a(i + 1).clone());
            u_mon.set(i, i + 1, Rational::one());
        }
    }
    Ok(DarbouxFactors {
        kind: FactorKind::Single,
        l_mon,
        u_mon,
    })
}

/// Extract `D_{n+1}`, `E_{n+1}` from the exact expansion
/// `t^2 P_n = P_{n+2}** + D_{n+1} P_{n+1}** + E_{n+1} P_n**` and assemble
/// the `N x N` factors of the double step. Requires the transform to cover
/// level `N + 1`.
pub fn darboux_factors_double(
    base_ops: &MonicOPS,
    dt: &DoubleTransform,
    n: usize,
) -> Result<DarbouxFactors> {
    if dt.n_max() < n + 1 || base_ops.max_degree() + 2 < n + 1 {
        return Err(Error::DimensionMismatch(format!(
            "double factors at truncation {n} need the transform to level {}",
            n + 1
        )));
    }
    let mut d = Vec::with_capacity(n - 1);
    let mut e = Vec::with_capacity(n);
    for k in 0..n {
        let shifted = base_ops.poly(k).shift_up(2);
        let gamma = expand_in_monic_basis(&shifted, dt.p_ss_all())?;
        for (j, g) in gamma.iter().enumerate().take(k) {
            if !g.is_zero() {
                return Err(Error::ExpansionResidual {
                    level: k,
                    detail: format!("t^2 P_{k} has a P_{j}** component {}", format_rational(g)),
                });
            }
        }
        debug_assert!(gamma[k + 2].is_one());
        let e_next = gamma[k].clone();
        if e_next.is_zero() {
            return Err(Error::ZeroE(k + 1));
        }
        // Structural cross-check: E_{k+1} (h_k**)^2 = h_k^2.
        if &e_next * dt.h_ss_sq(k) != *base_ops.norm_sq(k) {
            return Err(Error::RouteDisagreement {
                level: k + 1,
                detail: "E_{n+1} expansion vs h_n^2 / (h_n**)^2".into(),
            });
        }
        if k + 1 < n {
            d.push(gamma[k + 1].clone());
        }
        e.push(e_next);
    }

    let mut l_mon = BandedMatrix::zeros(n, 2, 0);
    let mut u_mon = BandedMatrix::zeros(n, 0, 2);
    for i in 0..n {
        l_mon.set(i, i, Rational::one());
        u_mon.set(i, i, e[i].clone());
        if i + 1 < n {
            l_mon.set(i + 1, i, dt.b(i + 1).clone());
            u_mon.set(i, i + 1, d[i].clone());
        }
        if i + 2 < n {
            l_mon.set(i + 2, i, dt.c(i + 2).clone());
            u_mon.set(i, i + 2, Rational::one());
        }
    }
    Ok(DarbouxFactors {
        kind: FactorKind::Double,
        l_mon,
        u_mon,
    })
}

/// The `N x N` truncation of the matrix of `t^2`-multiplication in the monic
/// transformed basis: `t^2 P_n** = sum_k gamma_{n,k} P_k**`, exactly
/// pentadiagonal. Requires the transform to cover level `N + 1`.
pub fn t2_multiplication_matrix(dt: &DoubleTransform, n: usize) -> Result<BandedMatrix<Rational>> {
    if dt.n_max() < n + 1 {
        return Err(Error::DimensionMismatch(format!(
            "t^2 multiplication matrix at truncation {n} needs the transform to level {}",
            n + 1
        )));
    }
    let mut m = BandedMatrix::zeros(n, 2, 2);
    for row in 0..n {
        let shifted = dt.p_ss(row).shift_up(2);
        let gamma = expand_in_monic_basis(&shifted, dt.p_ss_all())?;
        for (j, g) in gamma.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            if j + 2 < row {
                return Err(Error::ExpansionResidual {
                    level: row,
                    detail: format!(
                        "t^2 P_{row}** has a P_{j}** component {}",
                        format_rational(g)
                    ),
                });
            }
            if j < n {
                m.set(row, j, g.clone());
            }
        }
    }
    Ok(m)
}

/// Outcome of a Darboux verification: which identities held, on which
/// leading block.
#[derive(Clone, Debug)]
pub struct DarbouxReport {
    pub block: usize,
    pub identities: Vec<String>,
}

fn compare_block(
    got: &BandedMatrix<Rational>,
    want: &BandedMatrix<Rational>,
    block: usize,
    context: &str,
) -> Result<()> {
    for i in 0..block {
        for j in 0..block {
            let l = got.get(i, j);
            let r = want.get(i, j);
            if l != r {
                return Err(Error::MismatchAt {
                    i,
                    j,
                    context: context.to_string(),
                    left: format_rational(&l),
                    right: format_rational(&r),
                });
            }
        }
    }
    Ok(())
}

/// Verify `J_mon = U_mon L_mon` and `J*_mon = L_mon U_mon` exactly on the
/// leading `(N-1) x (N-1)` block (the last row of a truncated product is
/// corrupted by the cut).
pub fn verify_darboux_single(
    j_mon: &MonicJacobi,
    factors: &DarbouxFactors,
    j_star_mon: &MonicJacobi,
) -> Result<DarbouxReport> {
    if factors.kind != FactorKind::Single {
        return Err(Error::Domain(
            "single verification needs single factors".into(),
        ));
    }
    let n = j_mon.size();
    if factors.l_mon.size() != n || j_star_mon.size() != n {
        return Err(Error::DimensionMismatch(
            "darboux verification needs equal truncations".into(),
        ));
    }
    let block = n - 1;
    let ul = factors.u_mon.band_mul(&factors.l_mon)?;
    compare_block(&ul, &j_mon.matrix(), block, "J_mon = U_mon L_mon")?;
    let lu = factors.l_mon.band_mul(&factors.u_mon)?;
    compare_block(&lu, &j_star_mon.matrix(), block, "J*_mon = L_mon U_mon")?;
    Ok(DarbouxReport {
        block,
        identities: vec![
            format!("J_mon = U_mon L_mon on leading {block}x{block} block"),
            format!("J*_mon = L_mon U_mon on leading {block}x{block} block"),
        ],
    })
}

/// Verify `J_mon^2 = U_mon L_mon` and `J**_mon = L_mon U_mon` exactly on the
/// leading `(N-2) x (N-2)` block.
pub fn verify_darboux_double(
    j_mon: &MonicJacobi,
    factors: &DarbouxFactors,
    jss_mon: &BandedMatrix<Rational>,
) -> Result<DarbouxReport> {
    if factors.kind != FactorKind::Double {
        return Err(Error::Domain(
            "double verification needs double factors".into(),
        ));
    }
    let n = j_mon.size();
    if factors.l_mon.size() != n || jss_mon.size() != n {
        return Err(Error::DimensionMismatch(
            "darboux verification needs equal truncations".into(),
        ));
    }
    let block = n - 2;
    let j = j_mon.matrix();
    let j_sq = j.band_mul(&j)?;
    let ul = factors.u_mon.band_mul(&factors.l_mon)?;
    compare_block(&ul, &j_sq, block, "J_mon^2 = U_mon L_mon")?;
    let lu = factors.l_mon.band_mul(&factors.u_mon)?;
    compare_block(&lu, jss_mon, block, "J**_mon = L_mon U_mon")?;
    Ok(DarbouxReport {
        block,
        identities: vec![
            format!("J_mon^2 = U_mon L_mon on leading {block}x{block} block"),
            format!("J**_mon = L_mon U_mon on leading {block}x{block} block"),
        ],
    })
}

/// Outcome of a symmetric Cholesky structure check.
#[derive(Clone, Debug)]
pub struct CholeskyReport {
    /// Largest `|J - L L^T|` entry over the compared block.
    pub max_residual: BigFloat,
    /// The tolerance `2^(-p/2)` it was held to.
    pub tolerance: BigFloat,
    /// How many exact rational identities were verified alongside.
    pub rational_identities: usize,
}

fn sqrt_of(r: &Rational, prec: u32) -> Result<BigFloat> {
    BigFloat::from_rational(r, prec).sqrt()
}

fn require_positive(values: &[Rational], what: &str) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_positive() {
            return Err(Error::Domain(format!(
                "{what} must be positive for the Cholesky check; index {i} is {}",
                format_rational(v)
            )));
        }
    }
    Ok(())
}

/// Check the Cholesky structure of the symmetric tridiagonal `J*`: build
/// `J* = diag(1/h*) ((P_i*, P_j*)_0) diag(1/h*)` and the structural factor
/// `L` with `L(n,n) = h_n / h_n*`, `L(n+1,n) = A_{n+1} h_n / h_{n+1}*`, then
/// bound `max |J* - L L^T| <= 2^(-p/2)` on the leading `(N-1)` block.
/// Every identity expressible in squared (rational) form is also asserted
/// exactly: the tridiagonal shape of `(P_i*, P_j*)_0` with its closed-form
/// entries, the diagonal equalities, the squared subdiagonal equalities, and
/// the norm chain `(h_{n+1}*)^2 = A_{n+1} h_n^2`.
pub fn cholesky_check_single(
    base_gram: &GramMatrix,
    base_ops: &MonicOPS,
    st: &SingleTransform,
    n: usize,
    prec: u32,
) -> Result<CholeskyReport> {
    if n < 2 || st.n_max() < n || base_ops.max_degree() + 1 < n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky check at truncation {n} needs the transform to level {n}"
        )));
    }
    let h_sq = &base_ops.norms_sq()[..n];
    let hst_sq = &st.h_star_sq_all()[..n];
    require_positive(h_sq, "h_n^2")?;
    require_positive(hst_sq, "(h_n*)^2")?;

    let mut rational_identities = 0;

    // Exact tridiagonal Gram of the transformed family in the base form.
    let mut star_gram = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let value = base_gram.apply(st.p_star(i), st.p_star(j))?;
            if i.abs_diff(j) > 1 && !value.is_zero() {
                return Err(Error::MismatchAt {
                    i,
                    j,
                    context: "(P_i*, P_j*)_0 tridiagonality".into(),
                    left: format_rational(&value),
                    right: "0".into(),
                });
            }
            star_gram[i][j] = value;
        }
    }

    let check = |i: usize, j: usize, left: Rational, right: Rational, what: &str| -> Result<()> {
        if left != right {
            return Err(Error::MismatchAt {
                i,
                j,
                context: what.to_string(),
                left: format_rational(&left),
                right: format_rational(&right),
            });
        }
        Ok(())
    };

    for i in 0..n {
        // (P_i*, P_i*)_0 = h_i^2 + A_i^2 h_{i-1}^2.
        let mut want = h_sq[i].clone();
        if i >= 1 {
            want += st.a(i) * st.a(i) * &h_sq[i - 1];
        }
        check(
            i,
            i,
            star_gram[i][i].clone(),
            want,
            "(P_i*, P_i*)_0 closed form",
        )?;
        rational_identities += 1;

        if i + 1 < n {
            // (P_i*, P_{i+1}*)_0 = A_{i+1} h_i^2, and the norm chain.
            let want = st.a(i + 1) * &h_sq[i];
            check(
                i,
                i + 1,
                star_gram[i][i + 1].clone(),
                want,
                "(P_i*, P_{i+1}*)_0 closed form",
            )?;
            check(
                i + 1,
                i + 1,
                hst_sq[i + 1].clone(),
                st.a(i + 1) * &h_sq[i],
                "(h_{n+1}*)^2 = A_{n+1} h_n^2",
            )?;
            rational_identities += 2;

            // Squared subdiagonal equality of J* and L L^T.
            let denom = &hst_sq[i] * &hst_sq[i + 1];
            let j_sq = &star_gram[i][i + 1] * &star_gram[i][i + 1] / &denom;
            let l_entry_sq = st.a(i + 1) * st.a(i + 1) * &h_sq[i] * &h_sq[i] / &denom;
            check(i + 1, i, l_entry_sq, j_sq, "((L L^T)(n+1,n))^2 = (c_n*)^2")?;
            rational_identities += 1;
        }

        // Diagonal equality is fully rational.
        let j_diag = &star_gram[i][i] / &hst_sq[i];
        let mut l_diag = &h_sq[i] / &hst_sq[i];
        if i >= 1 {
            l_diag += st.a(i) * st.a(i) * &h_sq[i - 1] / &hst_sq[i];
        }
        check(i, i, l_diag, j_diag, "(L L^T)(n,n) = J*(n,n)")?;
        rational_identities += 1;
    }

    // Big-float residual of the full factorization.
    let h: Vec<BigFloat> = h_sq
        .iter()
        .map(|v| sqrt_of(v, prec))
        .collect::<Result<_>>()?;
    let hst: Vec<BigFloat> = hst_sq
        .iter()
        .map(|v| sqrt_of(v, prec))
        .collect::<Result<_>>()?;
    let mut l = BandedMatrix::<BigFloat>::zeros(n, 1, 0);
    for i in 0..n {
        l.set(i, i, h[i].div(&hst[i])?);
        if i + 1 < n {
            let a = BigFloat::from_rational(st.a(i + 1), prec);
            l.set(i + 1, i, (&a * &h[i]).div(&hst[i + 1])?);
        }
    }
    let mut j_star = BandedMatrix::<BigFloat>::symmetric_zeros(n, 1);
    for i in 0..n {
        for j in i..(i + 2).min(n) {
            let num = BigFloat::from_rational(&star_gram[i][j], prec);
            j_star.set(i, j, num.div(&(&hst[i] * &hst[j]))?);
        }
    }
    let llt = l.band_mul(&l.transpose())?;
    let block = n - 1;
    let mut max_residual = BigFloat::zero_at(prec);
    for i in 0..block {
        for j in 0..block {
            let r = (&j_star.get(i, j) - &llt.get(i, j)).abs();
            if r > max_residual {
                max_residual = r;
            }
        }
    }
    let tolerance = BigFloat::power_of_two(-((prec / 2) as i64), prec);
    if max_residual > tolerance {
        return Err(Error::ToleranceExceeded {
            context: "J* = L L^T".into(),
            residual: format!("{max_residual}"),
            tolerance: format!("{tolerance}"),
        });
    }
    Ok(CholeskyReport {
        max_residual,
        tolerance,
        rational_identities,
    })
}

/// Pentadiagonal analogue of [`cholesky_check_single`] for `J**`: the factor
/// has three nonvanishing diagonals `L(n,n) = h_n / h_n**`,
/// `L(n+1,n) = B_{n+1} h_n / h_{n+1}**`, `L(n+2,n) = C_{n+2} h_n / h_{n+2}**`,
/// and the residual is bounded on the leading `(N-2)` block. The exact side
/// conditions include the pentadiagonal closed forms of `(P_i**, P_j**)_0`,
/// the chain `(h_{n+2}**)^2 = C_{n+2} h_n^2`, and the parametrization
/// `(h_1**)^2 = s_2** + s_1** (B_1 - s_1/s_0)`.
pub fn cholesky_check_double(
    base_gram: &GramMatrix,
    base_ops: &MonicOPS,
    dt: &DoubleTransform,
    n: usize,
    prec: u32,
) -> Result<CholeskyReport> {
    if n < 3 || dt.n_max() < n || base_ops.max_degree() + 1 < n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky check at truncation {n} needs the transform to level {n}"
        )));
    }
    let h_sq = &base_ops.norms_sq()[..n];
    let hss_sq = &dt.h_ss_sq_all()[..n];
    require_positive(h_sq, "h_n^2")?;
    require_positive(hss_sq, "(h_n**)^2")?;

    let mut rational_identities = 0;

    let mut ss_gram = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let value = base_gram.apply(dt.p_ss(i), dt.p_ss(j))?;
            if i.abs_diff(j) > 2 && !value.is_zero() {
                return Err(Error::MismatchAt {
                    i,
                    j,
                    context: "(P_i**, P_j**)_0 pentadiagonality".into(),
                    left: format_rational(&value),
                    right: "0".into(),
                });
            }
            ss_gram[i][j] = value;
        }
    }

    let check = |i: usize, j: usize, left: Rational, right: Rational, what: &str| -> Result<()> {
        if left != right {
            return Err(Error::MismatchAt {
                i,
                j,
                context: what.to_string(),
                left: format_rational(&left),
                right: format_rational(&right),
            });
        }
        Ok(())
    };

    // Parametrization of the first two norms by the free corner.
    let (s0_ss, s1_ss, s2_ss) = dt.corner();
    let s0 = base_gram.entry(0, 0);
    let s1 = base_gram.entry(0, 1);
    check(0, 0, hss_sq[0].clone(), s0_ss.clone(), "(h_0**)^2 = s_0**")?;
    check(
        1,
        1,
        hss_sq[1].clone(),
        s2_ss + s1_ss * (dt.b(1) - s1 / s0),
        "(h_1**)^2 = s_2** + s_1** (B_1 - s_1/s_0)",
    )?;
    rational_identities += 2;

    for i in 0..n {
        // (P_i**, P_i**)_0 = h_i^2 + B_i^2 h_{i-1}^2 + C_i^2 h_{i-2}^2.
        let mut want = h_sq[i].clone();
        if i >= 1 {
            want += dt.b(i) * dt.b(i) * &h_sq[i - 1];
        }
        if i >= 2 {
            want += dt.c(i) * dt.c(i) * &h_sq[i - 2];
        }
        check(
            i,
            i,
            ss_gram[i][i].clone(),
            want,
            "(P_i**, P_i**)_0 closed form",
        )?;
        rational_identities += 1;

        if i + 1 < n {
            // (P_{i+1}**, P_i**)_0 = B_{i+1} h_i^2 + B_i C_{i+1} h_{i-1}^2.
            let mut want = dt.b(i + 1) * &h_sq[i];
            if i >= 1 {
                want += dt.b(i) * dt.c(i + 1) * &h_sq[i - 1];
            }
            check(
                i + 1,
                i,
                ss_gram[i + 1][i].clone(),
                want,
                "(P_{i+1}**, P_i**)_0 closed form",
            )?;
            rational_identities += 1;

            // Squared first-subdiagonal equality of J** and L L^T.
            let denom = &hss_sq[i] * &hss_sq[i + 1];
            let j_sq = &ss_gram[i + 1][i] * &ss_gram[i + 1][i] / &denom;
            let mut l_entry = dt.b(i + 1) * &h_sq[i];
            if i >= 1 {
                l_entry += dt.c(i + 1) * dt.b(i) * &h_sq[i - 1];
            }
            let l_entry_sq = &l_entry * &l_entry / &denom;
            check(
                i + 1,
                i,
                l_entry_sq,
                j_sq,
                "((L L^T)(n+1,n))^2 = (J**(n+1,n))^2",
            )?;
            rational_identities += 1;
        }

        if i + 2 < n {
            // (P_{i+2}**, P_i**)_0 = C_{i+2} h_i^2 and the norm chain.
            check(
                i + 2,
                i,
                ss_gram[i + 2][i].clone(),
                dt.c(i + 2) * &h_sq[i],
                "(P_{i+2}**, P_i**)_0 closed form",
            )?;
            check(
                i + 2,
                i + 2,
                hss_sq[i + 2].clone(),
                dt.c(i + 2) * &h_sq[i],
                "(h_{n+2}**)^2 = C_{n+2} h_n^2",
            )?;
            rational_identities += 2;

            // ((L L^T)(n+2,n))^2 reduces to C_{n+2} h_n^2 / (h_n**)^2.
            let denom = &hss_sq[i] * &hss_sq[i + 2];
            let l_entry_sq = dt.c(i + 2) * dt.c(i + 2) * &h_sq[i] * &h_sq[i] / &denom;
            let reduced = dt.c(i + 2) * &h_sq[i] / &hss_sq[i];
            check(
                i + 2,
                i,
                l_entry_sq.clone(),
                reduced,
                "((L L^T)(n+2,n))^2 = C_{n+2} h_n^2 / (h_n**)^2",
            )?;
            let j_sq = &ss_gram[i + 2][i] * &ss_gram[i + 2][i] / &denom;
            check(
                i + 2,
                i,
                l_entry_sq,
                j_sq,
                "((L L^T)(n+2,n))^2 = (J**(n+2,n))^2",
            )?;
            rational_identities += 2;
        }

        // Diagonal equality is fully rational.
        let j_diag = &ss_gram[i][i] / &hss_sq[i];
        let mut l_diag = &h_sq[i] / &hss_sq[i];
        if i >= 1 {
            l_diag += dt.b(i) * dt.b(i) * &h_sq[i - 1] / &hss_sq[i];
        }
        if i >= 2 {
            l_diag += dt.c(i) * dt.c(i) * &h_sq[i - 2] / &hss_sq[i];
        }
        check(i, i, l_diag, j_diag, "(L L^T)(n,n) = J**(n,n)")?;
        rational_identities += 1;
    }

    // Big-float residual of the full factorization.
    let h: Vec<BigFloat> = h_sq
        .iter()
        .map(|v| sqrt_of(v, prec))
        .collect::<Result<_>>()?;
    let hss: Vec<BigFloat> = hss_sq
        .iter()
        .map(|v| sqrt_of(v, prec))
        .collect::<Result<_>>()?;
    let mut l = BandedMatrix::<BigFloat>::zeros(n, 2, 0);
    for i in 0..n {
        l.set(i, i, h[i].div(&hss[i])?);
        if i + 1 < n {
            let b = BigFloat::from_rational(dt.b(i + 1), prec);
            l.set(i + 1, i, (&b * &h[i]).div(&hss[i + 1])?);
        }
        if i + 2 < n {
            let c = BigFloat::from_rational(dt.c(i + 2), prec);
            l.set(i + 2, i, (&c * &h[i]).div(&hss[i + 2])?);
        }
    }
    let mut j_ss = BandedMatrix::<BigFloat>::symmetric_zeros(n, 2);
    for i in 0..n {
        for j in i..(i + 3).min(n) {
            let num = BigFloat::from_rational(&ss_gram[i][j], prec);
            j_ss.set(i, j, num.div(&(&hss[i] * &hss[j]))?);
        }
    }
    let llt = l.band_mul(&l.transpose())?;
    let block = n - 2;
    let mut max_residual = BigFloat::zero_at(prec);
    for i in 0..block {
        for j in 0..block {
            let r = (&j_ss.get(i, j) - &llt.get(i, j)).abs();
            if r > max_residual {
                max_residual = r;
            }
        }
    }
    let tolerance = BigFloat::power_of_two(-((prec / 2) as i64), prec);
    if max_residual > tolerance {
        return Err(Error::ToleranceExceeded {
            context: "J** = L L^T".into(),
            residual: format!("{max_residual}"),
            tolerance: format!("{tolerance}"),
        });
    }
    Ok(CholeskyReport {
        max_residual,
        tolerance,
        rational_identities,
    })
}

/// Check that `Psi^-1 J_mon Psi` is symmetric to `2^(-p/2)` with
/// `Psi = diag(1, c_0, c_0 c_1, ...)`, `c_k = sqrt((c_k)^2)` from the
/// subdiagonal. Returns the largest asymmetry found. Requires a positive
/// subdiagonal.
pub fn psi_similarity_check(j_mon: &MonicJacobi, prec: u32) -> Result<BigFloat> {
    let n = j_mon.size();
    require_positive(j_mon.subdiag(), "(c_n)^2")?;
    let mut psi = vec![BigFloat::from_rational(&Rational::one(), prec)];
    for c_sq in j_mon.subdiag() {
        let c = sqrt_of(c_sq, prec)?;
        psi.push(&psi[psi.len() - 1] * &c);
    }
    let m = j_mon.matrix();
    let mut max_asym = BigFloat::zero_at(prec);
    for i in 0..n {
        for j in (i + 1).min(n)..(i + 2).min(n) {
            // (Psi^-1 J Psi)(i,j) = J(i,j) psi_j / psi_i.
            let upper = (&BigFloat::from_rational(&m.get(i, j), prec) * &psi[j]).div(&psi[i])?;
            let lower = (&BigFloat::from_rational(&m.get(j, i), prec) * &psi[i]).div(&psi[j])?;
            let r = (&upper - &lower).abs();
            if r > max_asym {
                max_asym = r;
            }
        }
    }
    let tolerance = BigFloat::power_of_two(-((prec / 2) as i64), prec);
    if max_asym > tolerance {
        return Err(Error::ToleranceExceeded {
            context: "Psi^-1 J_mon Psi symmetry".into(),
            residual: format!("{max_asym}"),
            tolerance: format!("{tolerance}"),
        });
    }
    Ok(max_asym)
}

/// Everything a single-step factorization run produces.
#[derive(Clone, Debug)]
pub struct SingleFactorization {
    pub j_mon: MonicJacobi,
    pub j_star_mon: MonicJacobi,
    pub factors: DarbouxFactors,
    pub report: DarbouxReport,
}

/// Run the whole single-step pipeline at truncation `n`: base chain with a
/// guard band, transform, factors, independent `J*_mon` from the transformed
/// moments, and the exact Darboux verification.
pub fn factorize_single(
    base: &MomentFunctional,
    s0_star: &Rational,
    n: usize,
) -> Result<SingleFactorization> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "factorization needs truncation >= 3, got {n}"
        )));
    }
    let depth = n + 2;
    let (_, ops, sk) = build_chain(base, depth)?;
    let st = transform_single(base, &ops, &sk, s0_star, depth)?;
    let factors = darboux_factors_single(&ops, &st, n)?;
    let j_mon = build_monic_jacobi(&ops, n)?;
    let transformed = GeronimusMoments1::new(base.clone(), s0_star.clone()).to_functional();
    let ops_star = monic_ops(&build_gram(&transformed, n)?)?;
    let j_star_mon = build_monic_jacobi(&ops_star, n)?;
    let report = verify_darboux_single(&j_mon, &factors, &j_star_mon)?;
    Ok(SingleFactorization {
        j_mon,
        j_star_mon,
        factors,
        report,
    })
}

/// Everything a double-step factorization run produces.
#[derive(Clone, Debug)]
pub struct DoubleFactorization {
    pub j_mon: MonicJacobi,
    pub jss_mon: BandedMatrix<Rational>,
    pub factors: DarbouxFactors,
    pub report: DarbouxReport,
}

/// Run the whole double-step pipeline at truncation `n`: base chain with a
/// guard band, transform, factors, the pentadiagonal `J**_mon` from the
/// exact `t^2` expansion, and the exact Darboux verification.
pub fn factorize_double(
    base: &MomentFunctional,
    corner: (&Rational, &Rational, &Rational),
    n: usize,
) -> Result<DoubleFactorization> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "factorization needs truncation >= 3, got {n}"
        )));
    }
    let depth = n + 4;
    let (_, ops, sk) = build_chain(base, depth)?;
    let dt = transform_double(base, &ops, &sk, corner.0, corner.1, corner.2, depth)?;
    let factors = darboux_factors_double(&ops, &dt, n)?;
    let j_mon = build_monic_jacobi(&ops, n)?;
    let jss_mon = t2_multiplication_matrix(&dt, n)?;
    let report = verify_darboux_double(&j_mon, &factors, &jss_mon)?;
    Ok(DoubleFactorization {
        j_mon,
        jss_mon,
        factors,
        report,
    })
}
