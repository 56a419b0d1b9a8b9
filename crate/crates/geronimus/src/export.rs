//! Serialization of transforms, polynomials, and matrices.
//!
//! Rationals serialize as exact `"p/q"` strings (never floats) so repeated
//! runs are byte-identical and golden files diff cleanly; decimal rendering
//! at an explicit digit count is opt-in.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::double::{DoubleTransform, SobolevMassMatrix};
use crate::linalg::BandedMatrix;
use crate::poly::Polynomial;
use crate::scalar::{decimal_string, format_rational, Rational};
use crate::single::SingleTransform;

/// `"p/q"` strings for a slice of rationals.
pub fn rational_strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

/// Ascending `"p/q"` coefficient strings of a polynomial.
pub fn polynomial_strings(p: &Polynomial) -> Vec<String> {
    rational_strings(p.coeffs())
}

/// LaTeX rendering in descending powers, rational coefficients as `\frac`.
pub fn polynomial_to_latex(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for k in (0..=p.degree() as usize).rev() {
        let c = p.coeff(k);
        if c.is_zero() {
            continue;
        }
        if first {
            if c.is_negative() {
                out.push('-');
            }
            first = false;
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mag = c.abs();
        let unit = mag.is_one() && k > 0;
        if !unit {
            if mag.is_integer() {
                out.push_str(&mag.to_string());
            } else {
                out.push_str(&format!("\\frac{{{}}}{{{}}}", mag.numer(), mag.denom()));
            }
        }
        match k {
            0 => {}
            1 => out.push('t'),
            _ => out.push_str(&format!("t^{{{k}}}")),
        }
    }
    out
}

/// Serializable record of a single Geronimus step.
#[derive(Serialize)]
pub struct SingleTransformRecord {
    pub kind: &'static str,
    pub s0_star: String,
    /// `A_1 ..= A_N`.
    pub a: Vec<String>,
    /// `d_1* ..= d_N*`.
    pub d_star: Vec<String>,
    /// `(h_0*)^2 ..= (h_N*)^2`.
    pub h_star_sq: Vec<String>,
    /// Ascending coefficients of `P_0* ..= P_N*`.
    pub p_star: Vec<Vec<String>>,
}

impl SingleTransformRecord {
    pub fn new(st: &SingleTransform) -> Self {
        SingleTransformRecord {
            kind: "single",
            s0_star: format_rational(st.s0_star()),
            a: rational_strings(st.a_all()),
            d_star: rational_strings(st.d_star_all()),
            h_star_sq: rational_strings(st.h_star_sq_all()),
            p_star: st.p_star_all().iter().map(polynomial_strings).collect(),
        }
    }
}

/// Serializable record of a double Geronimus step.
#[derive(Serialize)]
pub struct DoubleTransformRecord {
    pub kind: &'static str,
    pub corner: [String; 3],
    /// `B_1 ..= B_N`.
    pub b: Vec<String>,
    /// `C_2 ..= C_N`.
    pub c: Vec<String>,
    /// `d_1** ..= d_N**`.
    pub d_ss: Vec<String>,
    /// `(h_0**)^2 ..= (h_N**)^2`.
    pub h_ss_sq: Vec<String>,
    /// Ascending coefficients of `P_0** ..= P_N**`.
    pub p_ss: Vec<Vec<String>>,
    /// The Sobolev mass matrix, when the divided-measure head is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_matrix: Option<[[String; 2]; 2]>,
}

impl DoubleTransformRecord {
    pub fn new(dt: &DoubleTransform, mass: Option<&SobolevMassMatrix>) -> Self {
        let (s0, s1, s2) = dt.corner();
        DoubleTransformRecord {
            kind: "double",
            corner: [
                format_rational(s0),
                format_rational(s1),
                format_rational(s2),
            ],
            b: rational_strings(dt.b_all()),
            c: rational_strings(dt.c_all()),
            d_ss: rational_strings(dt.d_ss_all()),
            h_ss_sq: rational_strings(dt.h_ss_sq_all()),
            p_ss: dt.p_ss_all().iter().map(polynomial_strings).collect(),
            mass_matrix: mass.map(|m| {
                [
                    [
                        format_rational(m.entry(0, 0)),
                        format_rational(m.entry(0, 1)),
                    ],
                    [
                        format_rational(m.entry(1, 0)),
                        format_rational(m.entry(1, 1)),
                    ],
                ]
            }),
        }
    }
}

/// One stored diagonal of a banded matrix.
#[derive(Serialize)]
pub struct DiagonalRecord {
    pub offset: isize,
    pub values: Vec<String>,
}

/// Banded JSON form of a matrix: size, bandwidths, and the diagonals in
/// offset order.
#[derive(Serialize)]
pub struct BandedRecord {
    pub n: usize,
    pub lo: usize,
    pub hi: usize,
    pub diagonals: Vec<DiagonalRecord>,
}

impl BandedRecord {
    pub fn new(m: &BandedMatrix<Rational>) -> Self {
        let lo = m.lower_bandwidth() as isize;
        let hi = m.upper_bandwidth() as isize;
        let diagonals = (-lo..=hi)
            .map(|d| DiagonalRecord {
                offset: d,
                values: rational_strings(m.diagonal(d)),
            })
            .collect();
        BandedRecord {
            n: m.size(),
            lo: m.lower_bandwidth(),
            hi: m.upper_bandwidth(),
            diagonals,
        }
    }
}

/// Dense CSV of a banded matrix: one row per matrix row, `"p/q"` fields, or
/// decimal at `digits` significant digits when requested. `\n` line endings,
/// no quoting needed (fields never contain separators).
pub fn matrix_to_csv(m: &BandedMatrix<Rational>, decimal: Option<usize>) -> String {
    let mut out = String::new();
    for i in 0..m.size() {
        let row: Vec<String> = (0..m.size())
            .map(|j| {
                let v = m.get(i, j);
                match decimal {
                    Some(digits) => decimal_string(&v, digits),
                    None => format_rational(&v),
                }
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// CSV table of the single-step data: `n, a_n, d_star_n, h_star_sq_n`.
pub fn single_transform_csv(st: &SingleTransform) -> String {
    let mut out = String::from("n,a_n,d_star_n,h_star_sq_n\n");
    for n in 1..=st.n_max() {
        out.push_str(&format!(
            "{n},{},{},{}\n",
            format_rational(st.a(n)),
            format_rational(st.d_star(n)),
            format_rational(st.h_star_sq(n))
        ));
    }
    out
}

/// CSV table of the double-step data: `n, b_n, c_n, d_ss_n, h_ss_sq_n`
/// (`c_1` is undefined and left empty).
pub fn double_transform_csv(dt: &DoubleTransform) -> String {
    let mut out = String::from("n,b_n,c_n,d_ss_n,h_ss_sq_n\n");
    for n in 1..=dt.n_max() {
        let c = if n >= 2 {
            format_rational(dt.c(n))
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{n},{},{c},{},{}\n",
            format_rational(dt.b(n)),
            format_rational(dt.d_ss(n)),
            format_rational(dt.h_ss_sq(n))
        ));
    }
    out
}

/// LaTeX lines for a family of polynomials, one display equation per line.
pub fn polynomials_to_latex(name: &str, polys: &[Polynomial]) -> String {
    let mut out = String::new();
    for (n, p) in polys.iter().enumerate() {
        out.push_str(&format!(
            "{name}_{{{n}}}(t) = {}\\\\\n",
            polynomial_to_latex(p)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn latex_rendering() {
        let p = Polynomial::from_coeffs(vec![rat_int(2), rat_int(-4), rat_int(1)]);
        assert_eq!(polynomial_to_latex(&p), "t^{2} - 4t + 2");
        let q = Polynomial::from_coeffs(vec![rat(1, 2), rat(-3, 4)]);
        assert_eq!(polynomial_to_latex(&q), "-\\frac{3}{4}t + \\frac{1}{2}");
        assert_eq!(polynomial_to_latex(&Polynomial::zero()), "0");
    }

    #[test]
    fn banded_record_roundtrips_diagonals() {
        let mut m: BandedMatrix<Rational> = BandedMatrix::zeros(3, 1, 0);
        for i in 0..3 {
            m.set(i, i, rat_int(i as i64 + 1));
        }
        m.set(1, 0, rat(1, 2));
        m.set(2, 1, rat(3, 2));
        let rec = BandedRecord::new(&m);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            json,
            r#"{"n":3,"lo":1,"hi":0,"diagonals":[{"offset":-1,"values":["1/2","3/2"]},{"offset":0,"values":["1","2","3"]}]}"#
        );
    }

    #[test]
    fn csv_is_plain_and_deterministic() {
        let m: BandedMatrix<Rational> = BandedMatrix::identity(2);
        assert_eq!(matrix_to_csv(&m, None), "1,0\n0,1\n");
        assert_eq!(matrix_to_csv(&m, Some(3)), "1.00e0,0\n0,1.00e0\n");
    }
}
