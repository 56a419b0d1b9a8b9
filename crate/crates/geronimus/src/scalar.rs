//! Exact rational scalars and an arbitrary-precision binary float.
//!
//! [`Rational`] carries every quantity that the theory keeps rational:
//! moments, connection coefficients, squared norms, Gram entries. The
//! [`BigFloat`] carrier exists only for square-root bearing quantities
//! (`h_n`, `c_n*`, symmetric Cholesky factors); it is a classic
//! mantissa-times-power-of-two float with round-to-nearest-even at an
//! explicit precision of at least [`MIN_PRECISION`] bits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational; always in lowest terms, denominator
/// positive, arithmetic never rounds.
pub type Rational = num_rational::BigRational;

/// Smallest precision a [`BigFloat`] may carry, in bits.
pub const MIN_PRECISION: u32 = 64;

/// Precision used when none is configured.
pub const DEFAULT_PRECISION: u32 = 256;

/// The rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The rational `n/1`.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Parse an exact rational from `"p/q"` or an integer literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Error::ParseRational(s.to_string()))
}

/// Canonical text form of a rational: `"p/q"`, or just `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Scientific-notation decimal rendering of `r` with `digits` significant
/// digits, e.g. `1/3 -> "3.333333333e-1"`. Deterministic: rounding is to
/// nearest, ties to even.
pub fn decimal_string(r: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();

    // Locate e10 with 10^e10 <= |r| < 10^(e10+1).
    let mut e10 = num.to_string().len() as i64 - den.to_string().len() as i64;
    loop {
        let (lhs, rhs) = scale_pair(&num, &den, e10);
        if lhs < rhs {
            e10 -= 1;
        } else {
            let (lhs2, rhs2) = scale_pair(&num, &den, e10 + 1);
            if lhs2 >= rhs2 {
                e10 += 1;
            } else {
                break;
            }
        }
    }

    // mantissa = round(|r| * 10^(digits-1-e10)), an integer of `digits` digits.
    let shift = digits as i64 - 1 - e10;
    let (n_scaled, d_scaled) = scale_pair(&num, &den, -shift);
    let mut mantissa = round_div_half_even(&n_scaled, &d_scaled);
    let ten_pow = BigUint::from(10u32).pow(digits as u32);
    if mantissa >= ten_pow {
        // Rounding carried into one extra digit (e.g. 0.9995 -> 1.00).
        mantissa = round_div_half_even(&mantissa, &BigUint::from(10u32));
        e10 += 1;
    }
    let m = mantissa.to_string();
    debug_assert_eq!(m.len(), digits);
    if digits == 1 {
        format!("{sign}{m}e{e10}")
    } else {
        format!("{sign}{}.{}e{e10}", &m[..1], &m[1..])
    }
}

/// Returns `(num * 10^a, den * 10^b)` with `a - b = -e10`, both nonnegative.
fn scale_pair(num: &BigUint, den: &BigUint, e10: i64) -> (BigUint, BigUint) {
    if e10 >= 0 {
        (num.clone(), den * BigUint::from(10u32).pow(e10 as u32))
    } else {
        (num * BigUint::from(10u32).pow((-e10) as u32), den.clone())
    }
}

/// `round(n / d)` to nearest integer, ties to even. `d > 0`.
fn round_div_half_even(n: &BigUint, d: &BigUint) -> BigUint {
    let (q, r) = n.div_rem(d);
    let twice = &r << 1u32;
    match twice.cmp(d) {
        Ordering::Less => q,
        Ordering::Greater => q + 1u32,
        Ordering::Equal => {
            if q.is_odd() {
                q + 1u32
            } else {
                q
            }
        }
    }
}

/// Arbitrary-precision binary floating-point number `mantissa * 2^exp`.
///
/// The mantissa is held to at most `prec` significant bits with trailing
/// zero bits stripped, so `(mantissa, exp)` is a canonical form and equality
/// is numeric equality. Every operation rounds to nearest, ties to even, at
/// the larger of the operand precisions; conversions from [`Rational`] are
/// correctly rounded.
#[derive(Clone, Debug)]
pub struct BigFloat {
    prec: u32,
    mantissa: BigInt,
    exp: i64,
}

impl BigFloat {
    /// Zero at the given precision.
    pub fn zero_at(prec: u32) -> Self {
        BigFloat {
            prec: prec.max(MIN_PRECISION),
            mantissa: BigInt::zero(),
            exp: 0,
        }
    }

    /// Exactly `2^k` at the given precision.
    pub fn power_of_two(k: i64, prec: u32) -> Self {
        BigFloat {
            prec: prec.max(MIN_PRECISION),
            mantissa: BigInt::one(),
            exp: k,
        }
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        if r.is_zero() {
            return BigFloat::zero_at(prec);
        }
        let sign = if r.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        };
        let n = r.numer().magnitude();
        let d = r.denom().magnitude();
        let db = d.bits() as i64;
        let nb = n.bits() as i64;
        let k = prec as i64 + 3 + (db - nb).max(0);
        let (q, rem) = (n << k as u64).div_rem(d);
        round_parts(prec, sign, q, -k, !rem.is_zero())
    }

    /// Exact value as a rational (`mantissa * 2^exp` is always exact).
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from(&self.mantissa << self.exp as u64)
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// The recorded precision in bits.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Absolute value (exact).
    pub fn abs(&self) -> Self {
        BigFloat {
            prec: self.prec,
            mantissa: self.mantissa.abs(),
            exp: self.exp,
        }
    }

    /// Quotient rounded to nearest at the larger operand precision.
    /// Errors on a zero divisor.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::Domain("division of BigFloat by zero".into()));
        }
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return Ok(BigFloat::zero_at(prec));
        }
        let sign = if self.is_negative() == rhs.is_negative() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let n = self.mantissa.magnitude();
        let d = rhs.mantissa.magnitude();
        let k = prec as i64 + 3 + (d.bits() as i64 - n.bits() as i64).max(0);
        let (q, rem) = (n << k as u64).div_rem(d);
        Ok(round_parts(
            prec,
            sign,
            q,
            self.exp - rhs.exp - k,
            !rem.is_zero(),
        ))
    }

    /// Square root rounded to nearest at this value's precision.
    /// Errors on negative input.
    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Domain("square root of negative BigFloat".into()));
        }
        if self.is_zero() {
            return Ok(BigFloat::zero_at(self.prec));
        }
        let mut m = self.mantissa.magnitude().clone();
        let mut e = self.exp;
        if e.rem_euclid(2) != 0 {
            m <<= 1u32;
            e -= 1;
        }
        // Boost so the integer square root carries >= prec + 2 bits.
        let need = 2 * (self.prec as i64 + 3);
        let j = ((need - m.bits() as i64).max(0) + 1) / 2;
        m <<= (2 * j) as u64;
        let s = m.sqrt();
        let rem = &m - &s * &s;
        Ok(round_parts(
            self.prec,
            Sign::Plus,
            s,
            e / 2 - j,
            !rem.is_zero(),
        ))
    }

    /// Exact three-way comparison (no rounding).
    fn cmp_exact(&self, other: &Self) -> Ordering {
        match (self.mantissa.sign(), other.mantissa.sign()) {
            (Sign::Minus, Sign::NoSign) | (Sign::Minus, Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::Minus) | (Sign::Plus, Sign::NoSign) => return Ordering::Greater,
            (Sign::NoSign, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let e = self.exp.min(other.exp);
        let a = &self.mantissa << (self.exp - e) as u64;
        let b = &other.mantissa << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

/// Round the exact value `sign * (mag + frac) * 2^exp` (with `frac` in
/// `[0, 1)`, nonzero iff `frac_nonzero`) to `prec` bits, nearest, ties to
/// even. Callers passing `frac_nonzero` guarantee `mag` carries at least
/// `prec + 2` bits.
fn round_parts(prec: u32, sign: Sign, mag: BigUint, exp: i64, frac_nonzero: bool) -> BigFloat {
    if mag.is_zero() {
        debug_assert!(!frac_nonzero);
        return BigFloat::zero_at(prec);
    }
    let bits = mag.bits();
    let (mut kept, mut exp) = if bits <= prec as u64 {
        debug_assert!(!frac_nonzero);
        (mag, exp)
    } else {
        let t = bits - prec as u64;
        let low = &mag & ((BigUint::one() << t) - 1u32);
        let mut keep = &mag >> t;
        let half = BigUint::one() << (t - 1);
        let round_up = match low.cmp(&half) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => frac_nonzero || keep.is_odd(),
        };
        let mut e = exp + t as i64;
        if round_up {
            keep += 1u32;
            if keep.bits() > prec as u64 {
                keep >>= 1u32;
                e += 1;
            }
        }
        (keep, e)
    };
    if let Some(tz) = kept.trailing_zeros() {
        if tz > 0 {
            kept >>= tz;
            exp += tz as i64;
        }
    }
    BigFloat {
        prec,
        mantissa: BigInt::from_biguint(sign, kept),
        exp,
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.mantissa == other.mantissa && (self.exp == other.exp || self.mantissa.is_zero())
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            prec: self.prec,
            mantissa: -self.mantissa.clone(),
            exp: self.exp,
        }
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        -&self
    }
}

impl Add for &BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &BigFloat) -> BigFloat {
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            let mut out = rhs.clone();
            out.prec = prec;
            return out;
        }
        if rhs.is_zero() {
            let mut out = self.clone();
            out.prec = prec;
            return out;
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mantissa << (self.exp - e) as u64;
        let b = &rhs.mantissa << (rhs.exp - e) as u64;
        let m = a + b;
        let sign = m.sign();
        round_parts(
            prec,
            if sign == Sign::NoSign {
                Sign::Plus
            } else {
                sign
            },
            m.magnitude().clone(),
            e,
            false,
        )
    }
}

impl Sub for &BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &BigFloat) -> BigFloat {
        self + &(-rhs)
    }
}

impl Mul for &BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &BigFloat) -> BigFloat {
        let prec = self.prec.max(rhs.prec);
        let m = &self.mantissa * &rhs.mantissa;
        let sign = m.sign();
        round_parts(
            prec,
            if sign == Sign::NoSign {
                Sign::Plus
            } else {
                sign
            },
            m.magnitude().clone(),
            self.exp + rhs.exp,
            false,
        )
    }
}

impl Add for BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: BigFloat) -> BigFloat {
        &self + &rhs
    }
}

impl Sub for BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: BigFloat) -> BigFloat {
        &self - &rhs
    }
}

impl Mul for BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: BigFloat) -> BigFloat {
        &self * &rhs
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        BigFloat::zero_at(MIN_PRECISION)
    }
    fn is_zero(&self) -> bool {
        BigFloat::is_zero(self)
    }
}

impl One for BigFloat {
    fn one() -> Self {
        BigFloat::power_of_two(0, MIN_PRECISION)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30);
        write!(f, "{}", decimal_string(&self.to_rational(), digits))
    }
}
