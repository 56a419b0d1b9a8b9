//! Moment functionals and the moment-level description of the transformed
//! bilinear forms.
//!
//! A [`MomentFunctional`] realizes the base form through its moments
//! `s_k = (t^k, 1)_0`. The single transformation keeps a Hankel Gram matrix
//! and is described by the spliced sequence `(s_0*, s_0, s_1, ...)`
//! ([`GeronimusMoments1`]); the double transformation frees the whole 2x2
//! top-left Gram corner and is generically only quasi-Hankel
//! ([`GeronimusMoments2`]). [`DividedMeasure`] carries the moments of the
//! divided measures `d mu = t d mu_1 = t^2 d mu_2` used by the mass-point
//! and Sobolev representations.

use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rat_int, Rational};

/// A symmetric bilinear form presented through its monomial Gram entries.
pub trait BilinearForm {
    /// `form(t^i, t^j)`, exactly.
    fn gram_entry(&self, i: usize, j: usize) -> Result<Rational>;

    /// Human-readable tag of the form.
    fn label(&self) -> String;

    /// Whether the Gram matrix is Hankel (entries depend on `i + j` only).
    fn is_hankel(&self) -> bool;
}

enum MomentKind {
    /// Probability-normalized Laguerre moments `s_k = (alpha+1)_k`.
    Laguerre { alpha: Rational },
    /// A finite explicit list; indices beyond it are an error.
    Custom { values: Vec<Rational> },
    /// `head` followed by the base sequence: `s'_k = head[k]` for
    /// `k < head.len()`, else `base.moment(k - head.len())`.
    Spliced {
        head: Vec<Rational>,
        base: MomentFunctional,
    },
}

struct Inner {
    kind: MomentKind,
    label: String,
    cache: Mutex<Vec<Rational>>,
}

/// A moment functional `k -> s_k` with lazy, thread-safe generation.
#[derive(Clone)]
pub struct MomentFunctional {
    inner: Arc<Inner>,
}

impl MomentFunctional {
    fn new(kind: MomentKind, label: String) -> Self {
        MomentFunctional {
            inner: Arc::new(Inner {
                kind,
                label,
                cache: Mutex::new(Vec::new()),
            }),
        }
    }

    /// Probability-normalized Laguerre moments: `s_k = (alpha+1)_k`
    /// (Pochhammer), so `s_0 = 1` and every moment is rational for rational
    /// `alpha`. Requires `alpha > -1`.
    pub fn laguerre(alpha: Rational) -> Result<Self> {
        if alpha <= rat_int(-1) {
            return Err(Error::Domain(format!(
                "laguerre moments require alpha > -1, got {}",
                format_rational(&alpha)
            )));
        }
        let label = format!("laguerre(alpha={})", format_rational(&alpha));
        Ok(Self::new(MomentKind::Laguerre { alpha }, label))
    }

    /// A finite moment sequence; requests beyond it fail with
    /// [`Error::IndexOutOfRange`]. Requires a non-empty list.
    pub fn custom(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("custom moments must be non-empty".into()));
        }
        let label = format!("custom({} moments)", values.len());
        Ok(Self::new(MomentKind::Custom { values }, label))
    }

    /// The sequence `head` followed by all of `base`.
    pub fn spliced(head: Vec<Rational>, base: MomentFunctional, label: String) -> Self {
        Self::new(MomentKind::Spliced { head, base }, label)
    }

    /// The moment `s_k`.
    pub fn moment(&self, k: usize) -> Result<Rational> {
        match &self.inner.kind {
            MomentKind::Custom { values } => values.get(k).cloned().ok_or(Error::IndexOutOfRange {
                index: k,
                len: values.len(),
            }),
            MomentKind::Spliced { head, base } => {
                if k < head.len() {
                    Ok(head[k].clone())
                } else {
                    base.moment(k - head.len())
                }
            }
            MomentKind::Laguerre { alpha } => {
                let mut cache = self.inner.cache.lock().expect("moment cache poisoned");
                while cache.len() <= k {
                    let next = match cache.last() {
                        None => Rational::one(),
                        Some(prev) => prev * (alpha + rat_int(cache.len() as i64)),
                    };
                    cache.push(next);
                }
                Ok(cache[k].clone())
            }
        }
    }

    /// Moments `s_0 ..= s_k`.
    pub fn moments_upto(&self, k: usize) -> Result<Vec<Rational>> {
        (0..=k).map(|i| self.moment(i)).collect()
    }

    pub fn label(&self) -> String {
        self.inner.label.clone()
    }

    /// Serialize the first `count` moments as a JSON array of `"p/q"` strings.
    pub fn to_json(&self, count: usize) -> Result<String> {
        let strings: Vec<String> = (0..count)
            .map(|k| self.moment(k).map(|r| format_rational(&r)))
            .collect::<Result<_>>()?;
        Ok(serde_json::to_string(&strings).expect("string array serializes"))
    }

    /// Parse a finite moment functional from a JSON array of `"p/q"` strings.
    pub fn custom_from_json(text: &str) -> Result<Self> {
        let strings: Vec<String> =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("moments JSON: {e}")))?;
        let values = strings
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Self::custom(values)
    }
}

impl BilinearForm for MomentFunctional {
    fn gram_entry(&self, i: usize, j: usize) -> Result<Rational> {
        self.moment(i + j)
    }

    fn label(&self) -> String {
        self.label()
    }

    fn is_hankel(&self) -> bool {
        true
    }
}

/// The single Geronimus transformation `[t f, g]_1 = (f, g)_0` at the
/// moment level: the Hankel sequence `(s_0*, s_0, s_1, ...)`.
#[derive(Clone)]
pub struct GeronimusMoments1 {
    base: MomentFunctional,
    s0_star: Rational,
}

impl GeronimusMoments1 {
    pub fn new(base: MomentFunctional, s0_star: Rational) -> Self {
        GeronimusMoments1 { base, s0_star }
    }

    pub fn base(&self) -> &MomentFunctional {
        &self.base
    }

    pub fn s0_star(&self) -> &Rational {
        &self.s0_star
    }

    /// The transformed sequence as a moment functional in its own right.
    pub fn to_functional(&self) -> MomentFunctional {
        MomentFunctional::spliced(
            vec![self.s0_star.clone()],
            self.base.clone(),
            format!(
                "geronimus1({}, s0*={})",
                self.base.label(),
                format_rational(&self.s0_star)
            ),
        )
    }
}

impl BilinearForm for GeronimusMoments1 {
    fn gram_entry(&self, i: usize, j: usize) -> Result<Rational> {
        if i + j == 0 {
            Ok(self.s0_star.clone())
        } else {
            self.base.moment(i + j - 1)
        }
    }

    fn label(&self) -> String {
        format!(
            "geronimus1({}, s0*={})",
            self.base.label(),
            format_rational(&self.s0_star)
        )
    }

    fn is_hankel(&self) -> bool {
        true
    }
}

/// The double Geronimus transformation `[t^2 f, g]_2 = (f, g)_0` at the
/// moment level: Hankel in `s_{i+j-2}` away from the free symmetric 2x2
/// corner `(s_0**, s_1**; s_1**, s_2**)`.
#[derive(Clone)]
pub struct GeronimusMoments2 {
    base: MomentFunctional,
    s0_ss: Rational,
    s1_ss: Rational,
    s2_ss: Rational,
}

impl GeronimusMoments2 {
    pub fn new(base: MomentFunctional, s0_ss: Rational, s1_ss: Rational, s2_ss: Rational) -> Self {
        GeronimusMoments2 {
            base,
            s0_ss,
            s1_ss,
            s2_ss,
        }
    }

    pub fn base(&self) -> &MomentFunctional {
        &self.base
    }

    pub fn corner(&self) -> (&Rational, &Rational, &Rational) {
        (&self.s0_ss, &self.s1_ss, &self.s2_ss)
    }
}

impl BilinearForm for GeronimusMoments2 {
    fn gram_entry(&self, i: usize, j: usize) -> Result<Rational> {
        match (i, j) {
            (0, 0) => Ok(self.s0_ss.clone()),
            (0, 1) | (1, 0) => Ok(self.s1_ss.clone()),
            (1, 1) => Ok(self.s2_ss.clone()),
            _ => self.base.moment(i + j - 2),
        }
    }

    fn label(&self) -> String {
        format!(
            "geronimus2({}, corner=({}, {}, {}))",
            self.base.label(),
            format_rational(&self.s0_ss),
            format_rational(&self.s1_ss),
            format_rational(&self.s2_ss)
        )
    }

    fn is_hankel(&self) -> bool {
        false
    }
}

/// Moments of a divided measure: `d mu = t^order d mu_order`, so
/// `m_{k+order} = s_k` while the first `order` moments are free data
/// supplied by the caller.
#[derive(Clone)]
pub struct DividedMeasure {
    order: usize,
    head: Vec<Rational>,
    base: MomentFunctional,
}

impl DividedMeasure {
    /// `order` must be 1 or 2 and `head` must supply exactly the `order`
    /// leading moments of the divided measure.
    pub fn new(base: MomentFunctional, order: usize, head: Vec<Rational>) -> Result<Self> {
        if order != 1 && order != 2 {
            return Err(Error::Domain(format!(
                "divided measure order must be 1 or 2, got {order}"
            )));
        }
        if head.len() != order {
            return Err(Error::Domain(format!(
                "divided measure of order {order} needs exactly {order} head moments, got {}",
                head.len()
            )));
        }
        Ok(DividedMeasure { order, head, base })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn head(&self) -> &[Rational] {
        &self.head
    }

    pub fn base(&self) -> &MomentFunctional {
        &self.base
    }

    /// The moment `m_k` of the divided measure.
    pub fn moment(&self, k: usize) -> Result<Rational> {
        if k < self.order {
            Ok(self.head[k].clone())
        } else {
            self.base.moment(k - self.order)
        }
    }

    /// The divided-measure moments as a functional.
    pub fn to_functional(&self) -> MomentFunctional {
        MomentFunctional::spliced(
            self.head.clone(),
            self.base.clone(),
            format!("divided(order={}, {})", self.order, self.base.label()),
        )
    }
}

/// Exact head moments of the Laguerre divided measures: for the normalized
/// base `t^alpha e^-t / Gamma(alpha+1)` and `k < order`,
/// `m_k = Gamma(alpha+1-order+k) / Gamma(alpha+1)`, a rational number.
/// Requires `alpha` to avoid `{0, ..., order-1}` so the ratios are finite.
pub fn laguerre_divided_head(alpha: &Rational, order: usize) -> Result<Vec<Rational>> {
    if order != 1 && order != 2 {
        return Err(Error::Domain(format!(
            "divided measure order must be 1 or 2, got {order}"
        )));
    }
    // m_k = 1 / ((alpha+1-order) (alpha+2-order) ... alpha), k factors fewer.
    let mut head = Vec::with_capacity(order);
    for k in 0..order {
        let mut denom = Rational::one();
        let mut factor = alpha + rat_int(1 + k as i64 - order as i64);
        for _ in 0..(order - k) {
            if factor.is_zero() {
                return Err(Error::Domain(format!(
                    "laguerre divided head undefined: alpha={} hits a pole at order {order}",
                    format_rational(alpha)
                )));
            }
            denom *= &factor;
            factor += Rational::one();
        }
        head.push(denom.recip());
    }
    Ok(head)
}
