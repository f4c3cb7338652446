mod common;

use common::{int_poly, int_poly_unit_free, mahler_oracle};
use entropy_core::exact_poly::{
    content_primitive, cyclotomic, delta_sequence_exact, is_zero_mahler, reciprocal,
};
use entropy_core::mahler::{mahler_measure, mahler_measure_tol};
use entropy_core::root_solver::{classify_unit_circle, find_roots, reconstruct, DEFAULT_TOL};
use entropy_core::{EntropyValue, IntPolynomial, RatPolynomial};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

fn nonconstant(max_deg: usize, height: i64) -> impl Strategy<Value = IntPolynomial> {
    int_poly(max_deg, height).prop_filter("nonconstant", |f| f.degree() >= 1)
}

fn slack(a: &EntropyValue, b: &EntropyValue) -> f64 {
    a.error() + b.error() + 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn content_times_primitive_reconstructs(
        pairs in prop::collection::vec((-9i64..=9, 1i64..=7), 1..7)
    ) {
        let f = RatPolynomial::from_ratios(&pairs);
        prop_assume!(!f.is_zero());
        let (c, prim) = content_primitive(&f).unwrap();
        prop_assert!(prim.is_primitive());
        let back = RatPolynomial::from_int(&prim);
        let scaled: Vec<_> = back.coeffs().iter().map(|x| x * &c).collect();
        prop_assert_eq!(scaled.as_slice(), f.coeffs());
    }

    #[test]
    fn mahler_is_nonnegative(f in nonconstant(6, 3)) {
        let m = mahler_measure(&f).unwrap();
        prop_assert!(m.interval().1 >= 0.0);
        prop_assert!(m.value() >= -m.error());
    }

    #[test]
    fn mahler_is_multiplicative(f in nonconstant(6, 3), g in nonconstant(6, 3)) {
        let mf = mahler_measure(&f).unwrap();
        let mg = mahler_measure(&g).unwrap();
        let mfg = mahler_measure(&(&f * &g)).unwrap();
        let sum = mf.add(&mg);
        prop_assert!(mfg.agrees_with(&sum, slack(&mfg, &sum)), "{} vs {}", mfg, sum);
    }

    #[test]
    fn mahler_power_law(f in nonconstant(5, 3), k in 2usize..=3) {
        let m = mahler_measure(&f).unwrap();
        let mk = mahler_measure(&f.compose_power(k)).unwrap();
        prop_assert!(mk.agrees_with(&m, slack(&m, &mk)), "{} vs {}", m, mk);
    }

    #[test]
    fn mahler_reciprocal_invariance(f in int_poly_unit_free(6, 3)) {
        prop_assume!(f.degree() >= 1);
        let m = mahler_measure(&f).unwrap();
        let mr = mahler_measure(&reciprocal(&f).unwrap()).unwrap();
        prop_assert!(m.agrees_with(&mr, slack(&m, &mr)));
    }

    #[test]
    fn leading_coefficient_floor(f in nonconstant(6, 4)) {
        let prim = f.primitive_part();
        prop_assume!(prim.lead().abs() >= BigInt::from(2));
        let m = mahler_measure(&f).unwrap();
        prop_assert!(m.interval().1 >= 2f64.ln() - 1e-12);
    }

    #[test]
    fn mahler_matches_independent_roots(f in nonconstant(6, 3)) {
        prop_assume!(f.is_squarefree());
        let m = mahler_measure(&f).unwrap();
        prop_assert!((m.value() - mahler_oracle(&f)).abs() < 1e-6);
    }

    #[test]
    fn root_count_equals_degree(f in nonconstant(8, 4)) {
        let f = f.primitive_part();
        let roots = find_roots(&f, DEFAULT_TOL).unwrap();
        let total: usize = roots.iter().map(|r| r.multiplicity).sum();
        prop_assert_eq!(total, f.degree());
        let c = classify_unit_circle(&f, DEFAULT_TOL).unwrap();
        prop_assert_eq!(c.total_count(), f.degree());
    }

    #[test]
    fn simple_root_residuals(f in nonconstant(8, 4)) {
        let df = f.derivative();
        let coeffs = f.to_f64_coeffs();
        for r in find_roots(&f, DEFAULT_TOL).unwrap() {
            if r.multiplicity != 1 || r.exact.is_some() {
                continue;
            }
            let z = r.approx;
            let fz = f.eval_complex(z).norm();
            let dfz = df.eval_complex(z).norm();
            // evaluating f in double precision adds its own rounding
            let rounding: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.abs() * z.norm().powi(i as i32))
                .sum::<f64>()
                * 4.0
                * coeffs.len() as f64
                * f64::EPSILON;
            prop_assert!(fz / dfz <= 2.0 * r.radius + rounding / dfz, "{fz} {dfz} {}", r.radius);
        }
    }

    #[test]
    fn coefficients_reconstruct(f in nonconstant(8, 4)) {
        let roots = find_roots(&f, DEFAULT_TOL).unwrap();
        let lead = f.lead().to_f64().unwrap();
        let back = reconstruct(lead, &roots);
        let maxmod = roots.iter().map(|r| r.max_modulus()).fold(0.0, f64::max);
        let d = f.degree() as f64;
        let bound = d * DEFAULT_TOL * (1.0 + maxmod).powf(d) * lead.abs().max(1.0) + 1e-9;
        for (c, z) in f.to_f64_coeffs().iter().zip(&back) {
            prop_assert!((z.re - c).abs() <= bound && z.im.abs() <= bound);
        }
    }

    #[test]
    fn outside_roots_give_the_measure(f in nonconstant(8, 4)) {
        let f = f.primitive_part();
        let c = classify_unit_circle(&f, DEFAULT_TOL).unwrap();
        let lead = f.lead().to_f64().unwrap().abs();
        let from_roots = lead.ln()
            + c.outside
                .iter()
                .map(|r| r.multiplicity as f64 * r.approx.norm().ln())
                .sum::<f64>();
        let m = mahler_measure(&f).unwrap();
        prop_assert!(m.within(from_roots, 1e-9), "{m} vs {from_roots}");
    }
}

#[test]
fn cyclotomic_products_give_t_pow_minus_one() {
    for m in 1..=30u64 {
        let mut prod = IntPolynomial::from_i64(&[1]);
        for d in (1..=m).filter(|d| m % d == 0) {
            prod = &prod * &cyclotomic(d);
        }
        assert_eq!(prod, IntPolynomial::t_pow_minus_one(m as usize), "m = {m}");
        assert!(IntPolynomial::t_pow_minus_one(m as usize)
            .div_exact(&cyclotomic(m))
            .is_some());
    }
}

#[test]
fn pairs_of_cyclotomics_have_zero_measure() {
    for m1 in 1..=20 {
        for m2 in m1..=20 {
            let f = &cyclotomic(m1) * &cyclotomic(m2);
            assert!(is_zero_mahler(&f).unwrap());
            assert_eq!(mahler_measure(&f).unwrap(), EntropyValue::ExactZero);
        }
    }
}

#[test]
fn zero_measure_detection_agrees_with_mahler() {
    for coeffs in [
        [1, 0, 1],
        [1, 1, 1],
        [1, -1, 1],
        [1, 2, 1],
        [-1, -1, 1],
        [2, 0, 1],
    ] {
        let f = IntPolynomial::from_i64(&coeffs);
        let zero = is_zero_mahler(&f).unwrap();
        let m = mahler_measure(&f).unwrap();
        assert_eq!(zero, m == EntropyValue::ExactZero, "{f}");
    }
}

#[test]
fn delta_growth_matches_measure() {
    // t^2 - t - 1
    let f = IntPolynomial::from_i64(&[-1, -1, 1]);
    let deltas = delta_sequence_exact(&f, 200).unwrap();
    let last = &deltas[199];
    assert!(!last.is_zero());
    let shift = last.bits().saturating_sub(53);
    let log_delta = (last >> shift).to_f64().unwrap().ln() + shift as f64 * 2f64.ln();
    let m = mahler_measure_tol(&f, 1e-12).unwrap().value();
    assert!((log_delta / 200.0 - m).abs() <= 0.05);
}
