//! Property tests for the exact-arithmetic invariants: rational round-trips,
//! banded products against the dense oracle, exact linear solves, big-float
//! conversion error bounds, and the moment-level structure of the
//! transformed bilinear forms.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use geronimus::double::{sobolev_eval, sobolev_mass_matrix};
use geronimus::linalg::{solve_linear, BandedMatrix};
use geronimus::moments::{
    BilinearForm, DividedMeasure, GeronimusMoments1, GeronimusMoments2, MomentFunctional,
};
use geronimus::ops::{build_gram, regularity_check};
use geronimus::oracle::dense_mul_check;
use geronimus::poly::Polynomial;
use geronimus::scalar::{rat, BigFloat, Rational};
use geronimus::single::mass_form_eval_1;

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-200i64..200, 1i64..40).prop_map(|(n, d)| rat(n, d))
}

fn arb_nonzero_rational() -> impl Strategy<Value = Rational> {
    arb_rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// `floor(log2 |r|)` of a nonzero rational, by bit lengths plus correction.
fn floor_log2(r: &Rational) -> i64 {
    let a = r.abs();
    let mut e = a.numer().bits() as i64 - a.denom().bits() as i64;
    let pow2 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from(BigInt::one() << k as u64)
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (-k) as u64)
        }
    };
    while pow2(e) > a {
        e -= 1;
    }
    while pow2(e + 1) <= a {
        e += 1;
    }
    e
}

/// Half an ulp at precision `p` in the binade of `x`: `2^(floor(log2|x|) - p)`.
fn half_ulp(x: &Rational, p: u32) -> Rational {
    let e = floor_log2(x) - p as i64;
    if e >= 0 {
        Rational::from(BigInt::one() << e as u64)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}

fn arb_banded(n: usize) -> impl Strategy<Value = BandedMatrix<Rational>> {
    (0..n, 0..n, proptest::collection::vec(arb_rational(), n * n)).prop_map(
        move |(lo, hi, entries)| {
            let mut m = BandedMatrix::zeros(n, lo, hi);
            let mut it = entries.into_iter();
            for i in 0..n {
                for j in i.saturating_sub(lo)..=(i + hi).min(n - 1) {
                    m.set(i, j, it.next().unwrap());
                }
            }
            m
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_addition_roundtrip(a in arb_rational(), b in arb_rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn rational_multiplication_roundtrip(a in arb_rational(), b in arb_nonzero_rational()) {
        prop_assert_eq!(&(&a * &b) / &b, a);
    }

    #[test]
    fn band_mul_matches_dense_oracle(
        (a, b) in (2usize..=12).prop_flat_map(|n| (arb_banded(n), arb_banded(n))),
    ) {
        let report = dense_mul_check(&a, &b).unwrap();
        prop_assert!(report.is_pass(), "failure: {:?}", report.failure);
    }

    #[test]
    fn solve_recovers_known_solution(
        n in 1usize..=10,
        entries in proptest::collection::vec(arb_rational(), 110),
    ) {
        let a: Vec<Vec<Rational>> = (0..n)
            .map(|i| entries[i * n..(i + 1) * n].to_vec())
            .collect();
        let x: Vec<Rational> = entries[n * n..n * n + n].to_vec();
        let rhs: Vec<Rational> = (0..n)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..n {
                    acc += &a[i][j] * &x[j];
                }
                acc
            })
            .collect();
        match solve_linear(&a, &rhs) {
            Ok(solved) => prop_assert_eq!(solved, x),
            // Random matrices are occasionally singular; that is not a
            // counterexample to the round-trip property.
            Err(geronimus::Error::SingularMatrix { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn bigfloat_conversion_bound(r in arb_nonzero_rational(), p in 64u32..=320) {
        let f = BigFloat::from_rational(&r, p).to_rational();
        let err = (&f - &r).abs();
        let bound = r.abs() / Rational::from(BigInt::one() << (p as u64 - 1));
        prop_assert!(err <= bound);
    }

    #[test]
    fn bigfloat_conversion_is_correctly_rounded(
        r in arb_nonzero_rational(),
        p in 64u32..=256,
    ) {
        // Within half an ulp of the exact value, certified rationally.
        let f = BigFloat::from_rational(&r, p).to_rational();
        prop_assert!((&f - &r).abs() <= half_ulp(&r, p));
    }

    #[test]
    fn bigfloat_division_is_correctly_rounded(
        a in arb_nonzero_rational(),
        b in arb_nonzero_rational(),
        p in 64u32..=256,
    ) {
        let fa = BigFloat::from_rational(&a, p);
        let fb = BigFloat::from_rational(&b, p);
        let q = fa.div(&fb).unwrap().to_rational();
        // Exact quotient of the already-representable operands.
        let exact = fa.to_rational() / fb.to_rational();
        prop_assert!((&q - &exact).abs() <= half_ulp(&exact, p));
    }

    #[test]
    fn bigfloat_sqrt_is_correctly_rounded(
        r in arb_nonzero_rational(),
        p in 64u32..=256,
    ) {
        // Bracket certificate: sqrt(x) must lie in [f - h, f + h] with
        // h = half an ulp of f, i.e. (f - h)^2 <= x <= (f + h)^2.
        let x = r.abs();
        let fx = BigFloat::from_rational(&x, p);
        let f = fx.sqrt().unwrap().to_rational();
        let exact = fx.to_rational();
        let h = half_ulp(&f, p);
        let lo = &f - &h;
        let hi = &f + &h;
        prop_assert!(&lo * &lo <= exact && exact <= &hi * &hi);
    }

    #[test]
    fn geronimus1_gram_is_hankel_and_satisfies_defining_relation(
        moments in proptest::collection::vec(arb_rational(), 9),
        s0_star in arb_rational(),
    ) {
        let base = MomentFunctional::custom(moments).unwrap();
        let form = GeronimusMoments1::new(base.clone(), s0_star);
        let n = 4usize;
        // Hankel: entries depend on i + j only.
        for i in 0..=n {
            for j in 0..=n {
                let e = form.gram_entry(i, j).unwrap();
                prop_assert_eq!(&e, &form.gram_entry(j, i).unwrap());
                if i < n && j >= 1 {
                    prop_assert_eq!(&e, &form.gram_entry(i + 1, j - 1).unwrap());
                }
                // Defining relation [t f, g]_1 = (f, g)_0.
                prop_assert_eq!(
                    form.gram_entry(i + 1, j).unwrap(),
                    base.gram_entry(i, j).unwrap()
                );
            }
        }
    }

    #[test]
    fn geronimus2_gram_is_quasi_hankel_and_satisfies_defining_relation(
        moments in proptest::collection::vec(arb_rational(), 11),
        corner in (arb_rational(), arb_rational(), arb_rational()),
    ) {
        let base = MomentFunctional::custom(moments).unwrap();
        let form = GeronimusMoments2::new(base.clone(), corner.0, corner.1, corner.2);
        let n = 4usize;
        for i in 0..=n {
            for j in 0..=n {
                let e = form.gram_entry(i, j).unwrap();
                prop_assert_eq!(&e, &form.gram_entry(j, i).unwrap());
                // Quasi-Hankel: anti-diagonal invariance once both index
                // pairs stay out of the free 2x2 corner.
                if i < n && j >= 1 && i.max(j) >= 2 && (i + 1).max(j - 1) >= 2 {
                    prop_assert_eq!(&e, &form.gram_entry(i + 1, j - 1).unwrap());
                }
                // Defining relation [t^2 f, g]_2 = (f, g)_0.
                prop_assert_eq!(
                    form.gram_entry(i + 2, j).unwrap(),
                    base.gram_entry(i, j).unwrap()
                );
            }
        }
    }

    #[test]
    fn representation_values_are_head_invariant(
        moments in proptest::collection::vec(arb_rational(), 10),
        s0_star in arb_rational(),
        corner in (arb_rational(), arb_rational(), arb_rational()),
        heads in proptest::collection::vec(arb_rational(), 4),
        f_coeffs in proptest::collection::vec(arb_rational(), 4),
        g_coeffs in proptest::collection::vec(arb_rational(), 4),
    ) {
        // The head moments of the divided measure cancel between the
        // integral term and the mass term, so the form values (not just the
        // Gram consistency) are independent of them.
        let base = MomentFunctional::custom(moments).unwrap();
        let f = Polynomial::from_coeffs(f_coeffs);
        let g = Polynomial::from_coeffs(g_coeffs);

        let div_a = DividedMeasure::new(base.clone(), 1, vec![heads[0].clone()]).unwrap();
        let div_b = DividedMeasure::new(base.clone(), 1, vec![heads[1].clone()]).unwrap();
        prop_assert_eq!(
            mass_form_eval_1(&div_a, &s0_star, &f, &g).unwrap(),
            mass_form_eval_1(&div_b, &s0_star, &f, &g).unwrap()
        );

        let div_a =
            DividedMeasure::new(base.clone(), 2, vec![heads[0].clone(), heads[1].clone()])
                .unwrap();
        let div_b =
            DividedMeasure::new(base, 2, vec![heads[2].clone(), heads[3].clone()]).unwrap();
        let m_a = sobolev_mass_matrix(&div_a, &corner.0, &corner.1, &corner.2).unwrap();
        let m_b = sobolev_mass_matrix(&div_b, &corner.0, &corner.1, &corner.2).unwrap();
        prop_assert_eq!(
            sobolev_eval(&div_a, &m_a, &f, &g).unwrap(),
            sobolev_eval(&div_b, &m_b, &f, &g).unwrap()
        );
    }
}

#[test]
fn laguerre_hankel_minors_are_positive() {
    for alpha in [rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1)] {
        let base = MomentFunctional::laguerre(alpha.clone()).unwrap();
        let gram = build_gram(&base, 7).unwrap();
        let report = regularity_check(&gram);
        assert!(
            report.is_positive_definite(),
            "alpha = {alpha}: minors {:?}",
            report.minors
        );
    }
}

#[test]
fn divided_measure_link_holds_everywhere() {
    let base = MomentFunctional::laguerre(rat(3, 2)).unwrap();
    for order in [1usize, 2] {
        let head = vec![rat(1, 7); order];
        let div = geronimus::moments::DividedMeasure::new(base.clone(), order, head).unwrap();
        for k in 0..12 {
            assert_eq!(div.moment(k + order).unwrap(), base.moment(k).unwrap());
        }
    }
}
