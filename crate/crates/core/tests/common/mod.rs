#![allow(dead_code)]

use entropy_core::linalg::{inverse_rat, RatMatrix};
use entropy_core::IntPolynomial;
use proptest::prelude::*;

/// Nonzero integer polynomials of degree at most `max_deg`.
pub fn int_poly(max_deg: usize, height: i64) -> impl Strategy<Value = IntPolynomial> {
    prop::collection::vec(-height..=height, 1..=max_deg + 1)
        .prop_map(|c| IntPolynomial::from_i64(&c))
        .prop_filter("nonzero", |f| !f.is_zero())
}

/// Nonzero polynomials whose constant term is nonzero.
pub fn int_poly_unit_free(max_deg: usize, height: i64) -> impl Strategy<Value = IntPolynomial> {
    int_poly(max_deg, height).prop_filter("nonzero constant term", |f| {
        !f.coeffs()[0].eq(&num_bigint::BigInt::from(0))
    })
}

pub fn square(n: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-bound..=bound, n), n)
}

pub fn int_matrix(max_n: usize, bound: i64) -> impl Strategy<Value = RatMatrix> {
    (1..=max_n).prop_flat_map(move |n| square(n, bound).prop_map(|rows| RatMatrix::from_i64(&rows)))
}

/// A unimodular matrix built from elementary row operations `(i, j, k)`:
/// row i += k·row j.
pub fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> RatMatrix {
    let mut rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        for c in 0..n {
            rows[i][c] += k * rows[j][c];
        }
    }
    RatMatrix::from_i64(&rows)
}

pub fn elementary_ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..5)
}

pub fn conjugate(a: &RatMatrix, p: &RatMatrix) -> RatMatrix {
    p.mul(a).mul(&inverse_rat(p).expect("unimodular"))
}

/// Roots by Durand–Kerner iteration in plain f64, independent of the
/// certified solver.
pub fn durand_kerner(coeffs: &[f64]) -> Vec<num_complex::Complex64> {
    use num_complex::Complex64;
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let prev = z.clone();
        for i in 0..d {
            let denom = (0..d)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = eval(z[i]) / denom;
            z[i] -= step;
        }
        if z.iter().zip(&prev).all(|(a, b)| (a - b).norm() < 1e-15) {
            break;
        }
    }
    z
}

/// `log |lead| + Σ log max(1, |λ|)` of the primitive part, from the
/// independent root finder.
pub fn mahler_oracle(f: &IntPolynomial) -> f64 {
    let c = f.primitive_part().to_f64_coeffs();
    let lead = c.last().unwrap().abs();
    lead.ln()
        + durand_kerner(&c)
            .iter()
            .map(|z| z.norm().max(1.0).ln())
            .sum::<f64>()
}
