//! Certified complex roots of integer polynomials.
//!
//! Roots are located by Aberth–Ehrlich iteration in double precision and
//! polished in double-double arithmetic. Each approximation is then wrapped
//! in an inclusion disk from Smith's bound: for pairwise distinct
//! approximations `zᵢ` of a degree-`n` polynomial `p` with leading
//! coefficient `s`, every root lies in some disk `D(zᵢ, n·|Wᵢ|)` where
//! `Wᵢ = p(zᵢ) / (s·∏_{j≠i}(zᵢ − zⱼ))`, and a connected union of `k` disks
//! holds exactly `k` roots. Multiplicities come from an exact square-free
//! decomposition, so every disk handed out encloses a simple root of one
//! square-free factor.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::exact_poly::{self, IntPolynomial};

pub const DEFAULT_TOL: f64 = 1e-12;

type Cdd = Complex<TwoFloat>;

const F64_ITERATIONS: usize = 2000;
const DD_ITERATIONS: usize = 60;
// unit roundoff assumed for double-double operations (deliberately pessimistic)
const DD_UNIT: f64 = 1e-30;

/// A real number with a rigorous absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedReal {
    pub value: f64,
    pub error: f64,
}

impl CertifiedReal {
    pub fn exact(value: f64) -> Self {
        CertifiedReal { value, error: 0.0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedRoot {
    #[serde(serialize_with = "ser_complex")]
    pub approx: Complex64,
    pub radius: f64,
    pub multiplicity: usize,
    /// Set when the root was verified to be this rational number exactly.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_rational"
    )]
    pub exact: Option<BigRational>,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

fn ser_opt_rational<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => crate::numeric::ser_rational(q, s),
        None => s.serialize_none(),
    }
}

impl CertifiedRoot {
    /// Lower bound on `|λ|` over the inclusion disk.
    pub fn min_modulus(&self) -> f64 {
        (self.approx.norm() - self.radius).max(0.0)
    }

    pub fn max_modulus(&self) -> f64 {
        self.approx.norm() + self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleClassification {
    pub inside: Vec<CertifiedRoot>,
    /// Cyclotomic factors `(m, multiplicity)` removed by exact division.
    pub on_circle_exact: Vec<(u64, usize)>,
    /// Unit-modulus roots of the self-inversive part, certified by the
    /// inversion argument rather than by exact factorization.
    pub on_circle_inversion: Vec<CertifiedRoot>,
    pub outside: Vec<CertifiedRoot>,
}

impl CircleClassification {
    pub fn on_circle_count(&self) -> usize {
        self.on_circle_exact
            .iter()
            .map(|&(m, k)| exact_poly::euler_phi(m) as usize * k)
            .sum::<usize>()
            + self
                .on_circle_inversion
                .iter()
                .map(|r| r.multiplicity)
                .sum::<usize>()
    }

    pub fn total_count(&self) -> usize {
        let count = |v: &[CertifiedRoot]| v.iter().map(|r| r.multiplicity).sum::<usize>();
        count(&self.inside) + count(&self.outside) + self.on_circle_count()
    }
}

/// A root of a square-free factor with its double-double center.
#[derive(Debug, Clone)]
struct Enclosed {
    center: Cdd,
    radius: f64,
    exact: Option<BigRational>,
}

impl Enclosed {
    fn modulus(&self) -> f64 {
        self.center.norm().hi()
    }

    fn to_root(&self, multiplicity: usize) -> CertifiedRoot {
        let approx = Complex64::new(self.center.re.hi(), self.center.im.hi());
        let drift = Complex64::new(self.center.re.lo(), self.center.im.lo()).norm();
        let radius = if self.exact.is_some() {
            drift
        } else {
            self.radius + drift
        };
        CertifiedRoot {
            approx,
            radius,
            multiplicity,
            exact: self.exact.clone(),
        }
    }
}

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

fn cdd(re: f64, im: f64) -> Cdd {
    Complex::new(dd(re), dd(im))
}

fn norm_f64(z: &Cdd) -> f64 {
    z.re.hi().hypot(z.im.hi())
}

/// Coefficients split into a double-double part and the residual left over
/// when the integer does not fit (only for enormous coefficients).
struct DdCoeffs {
    coeffs: Vec<TwoFloat>,
    residual: Vec<f64>,
    abs: Vec<f64>,
}

impl DdCoeffs {
    fn new(p: &IntPolynomial) -> Self {
        let mut coeffs = Vec::with_capacity(p.coeffs().len());
        let mut residual = Vec::with_capacity(p.coeffs().len());
        let mut abs = Vec::with_capacity(p.coeffs().len());
        for a in p.coeffs() {
            let hi = a.to_f64().unwrap_or(f64::INFINITY);
            let rem = a - BigInt::from_f64_exact(hi);
            let lo = rem.to_f64().unwrap_or(f64::INFINITY);
            let rem2 = rem - BigInt::from_f64_exact(lo);
            coeffs.push(TwoFloat::new_add(hi, lo));
            residual.push(rem2.to_f64().unwrap_or(f64::INFINITY).abs());
            abs.push(hi.abs());
        }
        DdCoeffs {
            coeffs,
            residual,
            abs,
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `(p(z), p'(z))` in double-double.
    fn eval_with_derivative(&self, z: Cdd) -> (Cdd, Cdd) {
        let zero = cdd(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for a in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + Complex::new(*a, dd(0.0));
        }
        (p, dp)
    }

    /// Rigorous-in-spirit bound on the evaluation error of `p(z)`.
    fn eval_error(&self, z: Cdd) -> f64 {
        let r = norm_f64(&z) * (1.0 + 1e-15);
        let mut abs_sum = 0.0;
        let mut resid_sum = 0.0;
        for (a, res) in self.abs.iter().zip(&self.residual).rev() {
            abs_sum = abs_sum * r + a;
            resid_sum = resid_sum * r + res;
        }
        let n = self.degree() as f64;
        8.0 * (n + 2.0) * DD_UNIT * abs_sum + resid_sum
    }
}

trait FromF64Exact {
    fn from_f64_exact(x: f64) -> BigInt;
}

impl FromF64Exact for BigInt {
    fn from_f64_exact(x: f64) -> BigInt {
        if !x.is_finite() {
            return BigInt::zero();
        }
        num_traits::FromPrimitive::from_f64(x.trunc()).unwrap_or_default()
    }
}

fn initial_guesses(p: &[f64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let lead = p[n];
    // Fujiwara bound
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let c = (p[n - k] / lead).abs();
        let term = if k == n { c / 2.0 } else { c };
        bound = bound.max(term.powf(1.0 / k as f64));
    }
    let radius = (2.0 * bound).max(1e-3);
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn aberth_f64(p: &[f64], z: &mut [Complex64]) {
    let n = z.len();
    let dp: Vec<f64> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| a * i as f64)
        .collect();
    for _ in 0..F64_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let zi = z[i];
            let pv = horner(p, zi);
            let dv = horner(&dp, zi);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s += Complex64::new(1.0, 0.0) / (zi - zj);
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] = zi - step;
                max_step = max_step.max(step.norm() / zi.norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
}

fn horner(p: &[f64], z: Complex64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn aberth_dd(p: &DdCoeffs, z: &mut [Cdd]) {
    let n = z.len();
    let one = cdd(1.0, 0.0);
    for _ in 0..DD_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let zi = z[i];
            let (pv, dv) = p.eval_with_derivative(zi);
            if norm_f64(&pv) == 0.0 || norm_f64(&dv) == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let mut s = cdd(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s = s + one / (zi - *zj);
                }
            }
            let step = ratio / (one - ratio * s);
            let size = norm_f64(&step);
            if size.is_finite() {
                z[i] = zi - step;
                max_step = max_step.max(size / norm_f64(&zi).max(1.0));
            }
        }
        if max_step < 1e-31 {
            break;
        }
    }
}

/// Smith inclusion radii; `None` when two approximations coincide.
fn smith_radii(p: &DdCoeffs, z: &[Cdd]) -> Option<Vec<f64>> {
    let n = z.len();
    let lead = p.coeffs[n];
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let (pv, _) = p.eval_with_derivative(z[i]);
        let mut prod = Complex::new(lead, dd(0.0));
        for (j, zj) in z.iter().enumerate() {
            if j != i {
                prod = prod * (z[i] - *zj);
            }
        }
        let denom = norm_f64(&prod) * (1.0 - 4.0 * (n as f64 + 1.0) * 1e-15);
        if denom <= 0.0 || !denom.is_finite() {
            return None;
        }
        let residual = norm_f64(&pv) * (1.0 + 1e-15) + p.eval_error(z[i]);
        radii.push(n as f64 * residual / denom * (1.0 + 1e-12));
    }
    Some(radii)
}

fn disks_disjoint(z: &[Cdd], radii: &[f64]) -> bool {
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = norm_f64(&(z[i] - z[j]));
            if d * (1.0 - 1e-14) <= radii[i] + radii[j] {
                return false;
            }
        }
    }
    true
}

fn divisors_small(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Encloses every root of a square-free primitive polynomial of degree ≥ 1.
fn enclose_squarefree(p: &IntPolynomial, tol: f64) -> Result<Vec<Enclosed>> {
    let n = p.degree();
    let coeffs = DdCoeffs::new(p);
    if n == 1 {
        // exact rational root −a₀/a₁
        let q = BigRational::new(-p.coeffs()[0].clone(), p.coeffs()[1].clone());
        let center = rational_to_dd(&q);
        return Ok(vec![Enclosed {
            center: Complex::new(center, dd(0.0)),
            radius: 0.0,
            exact: Some(q),
        }]);
    }
    let pf = p.to_f64_coeffs();
    let mut z = initial_guesses(&pf);
    aberth_f64(&pf, &mut z);
    let mut zd: Vec<Cdd> = z.iter().map(|c| cdd(c.re, c.im)).collect();
    aberth_dd(&coeffs, &mut zd);
    let radii = smith_radii(&coeffs, &zd).ok_or(Error::NoConvergence {
        max_iterations: F64_ITERATIONS + DD_ITERATIONS,
    })?;
    if !disks_disjoint(&zd, &radii) || radii.iter().any(|&r| !(r <= tol)) {
        return Err(Error::NoConvergence {
            max_iterations: F64_ITERATIONS + DD_ITERATIONS,
        });
    }
    let mut out: Vec<Enclosed> = zd
        .into_iter()
        .zip(radii)
        .map(|(center, radius)| Enclosed {
            center,
            radius,
            exact: None,
        })
        .collect();
    attach_rational_roots(p, &mut out);
    Ok(out)
}

fn rational_to_dd(q: &BigRational) -> TwoFloat {
    let num = q.numer().to_f64().unwrap_or(f64::NAN);
    let den = q.denom().to_f64().unwrap_or(f64::NAN);
    dd(num) / dd(den)
}

/// Marks disks that contain a rational root `a/b` with `b | lead`.
fn attach_rational_roots(p: &IntPolynomial, roots: &mut [Enclosed]) {
    let lead = match p.lead().abs().to_u64() {
        Some(l) if l <= 1_000_000 => l,
        _ => return,
    };
    let denominators = divisors_small(lead);
    for root in roots.iter_mut() {
        let im = root.center.im.hi();
        if im.abs() > root.radius {
            continue;
        }
        let x = root.center.re.hi();
        for &b in &denominators {
            let a = (x * b as f64).round();
            if !a.is_finite() {
                continue;
            }
            let a = BigInt::from(a as i64);
            let b_big = BigInt::from(b);
            if !a.gcd(&b_big).is_one() {
                continue;
            }
            if !p.eval_homogeneous(&a, &b_big).is_zero() {
                continue;
            }
            let q = BigRational::new(a, b_big);
            let qd = rational_to_dd(&q);
            let dist = norm_f64(&(root.center - Complex::new(qd, dd(0.0))));
            if dist <= root.radius * (1.0 + 1e-12) + 1e-300 {
                root.center = Complex::new(qd, dd(0.0));
                root.radius = 0.0;
                root.exact = Some(q);
                break;
            }
        }
    }
}

fn check_nonconstant(f: &IntPolynomial) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    Ok(())
}

/// All roots of `f` with inclusion radii at most `tol`, grouped by exact
/// multiplicity. Roots of distinct square-free factors are reported
/// separately; each reported disk holds exactly one distinct root.
pub fn find_roots(f: &IntPolynomial, tol: f64) -> Result<Vec<CertifiedRoot>> {
    check_nonconstant(f)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let (k, g) = f.strip_t_power();
    let mut out = Vec::new();
    if k > 0 {
        out.push(CertifiedRoot {
            approx: Complex64::new(0.0, 0.0),
            radius: 0.0,
            multiplicity: k,
            exact: Some(BigRational::zero()),
        });
    }
    for (piece, mult) in g.squarefree_decomposition() {
        for e in enclose_squarefree(&piece, tol)? {
            out.push(e.to_root(mult));
        }
    }
    Ok(out)
}

/// Image radius of `D(z, r)` under `z ↦ 1/z̄`.
fn inverted_radius(modulus: f64, r: f64) -> Option<f64> {
    if modulus <= r {
        None
    } else {
        Some(r / (modulus * (modulus - r)) * (1.0 + 1e-12))
    }
}

/// Splits the roots of `f` into inside, on and outside the unit circle.
///
/// Cyclotomic factors are divided out exactly first. The remaining
/// unit-modulus roots can only belong to the self-inversive part
/// `gcd(g, g*)`; those are certified by checking that the inversion image of
/// their disk meets no other disk of the same factor.
pub fn classify_unit_circle(f: &IntPolynomial, tol: f64) -> Result<CircleClassification> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let content = f.content();
    if !content.is_one() {
        return Err(Error::NotPrimitive {
            content: content.to_string(),
        });
    }
    let mut out = CircleClassification {
        inside: Vec::new(),
        on_circle_exact: Vec::new(),
        on_circle_inversion: Vec::new(),
        outside: Vec::new(),
    };
    let (k, g) = f.strip_t_power();
    if k > 0 {
        out.inside.push(CertifiedRoot {
            approx: Complex64::new(0.0, 0.0),
            radius: 0.0,
            multiplicity: k,
            exact: Some(BigRational::zero()),
        });
    }
    let (cyclo, h) = exact_poly::cyclotomic_factorization(&g);
    out.on_circle_exact = cyclo;
    for (piece, mult) in h.squarefree_decomposition() {
        let rev = piece.reversed().sign_normalized();
        let s = piece.gcd(&rev);
        let r = piece.div_exact(&s).expect("gcd divides");
        if r.degree() > 0 {
            for e in enclose_squarefree(&r, tol)? {
                classify_strict(&e, mult, &mut out)?;
            }
        }
        if s.degree() > 0 {
            let enclosed = enclose_squarefree(&s, tol)?;
            for (i, e) in enclosed.iter().enumerate() {
                let m = e.modulus();
                if m + e.radius < 1.0 || m - e.radius > 1.0 {
                    classify_strict(e, mult, &mut out)?;
                    continue;
                }
                if inversion_fixed(&enclosed, i) {
                    out.on_circle_inversion.push(e.to_root(mult));
                } else {
                    return Err(boundary_error(e));
                }
            }
        }
    }
    Ok(out)
}

fn inversion_fixed(enclosed: &[Enclosed], i: usize) -> bool {
    let e = &enclosed[i];
    let m = e.modulus();
    let Some(img_r) = inverted_radius(m, e.radius) else {
        return false;
    };
    let m2 = e.center.re * e.center.re + e.center.im * e.center.im;
    let img = Complex::new(e.center.re / m2, e.center.im / m2);
    enclosed.iter().enumerate().all(|(j, other)| {
        j == i || norm_f64(&(img - other.center)) * (1.0 - 1e-14) > img_r + other.radius
    })
}

fn boundary_error(e: &Enclosed) -> Error {
    Error::UnresolvedBoundary {
        re: e.center.re.hi(),
        im: e.center.im.hi(),
        radius: e.radius,
    }
}

fn classify_strict(e: &Enclosed, mult: usize, out: &mut CircleClassification) -> Result<()> {
    let root = e.to_root(mult);
    let m = root.approx.norm();
    if m + root.radius < 1.0 {
        out.inside.push(root);
    } else if m - root.radius > 1.0 {
        out.outside.push(root);
    } else {
        return Err(boundary_error(e));
    }
    Ok(())
}

/// Leading coefficient times `∏ (t − λ)` over the reported roots.
pub fn reconstruct(lead: f64, roots: &[CertifiedRoot]) -> Vec<Complex64> {
    let mut poly = vec![Complex64::new(lead, 0.0)];
    for root in roots {
        for _ in 0..root.multiplicity {
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * root.approx;
            }
            poly = next;
        }
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    fn sorted_real(roots: &[CertifiedRoot]) -> Vec<f64> {
        let mut v: Vec<f64> = roots.iter().map(|r| r.approx.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn sqrt_two() {
        let roots = find_roots(&p(&[-2, 0, 1]), 1e-12).unwrap();
        let re = sorted_real(&roots);
        let s = 2f64.sqrt();
        assert!((re[0] + s).abs() < 1e-12 && (re[1] - s).abs() < 1e-12);
        assert!(roots.iter().all(|r| r.radius <= 1e-12));
    }

    #[test]
    fn golden_ratio_quadratic_oracle() {
        let roots = find_roots(&p(&[-1, -1, 1]), 1e-12).unwrap();
        let re = sorted_real(&roots);
        let s5 = 5f64.sqrt();
        assert!((re[1] - (1.0 + s5) / 2.0).abs() < 1e-12);
        assert!((re[0] - (1.0 - s5) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_root_cluster() {
        let roots = find_roots(&p(&[1, -2, 1]), 1e-12).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert_eq!(roots[0].exact, Some(BigRational::one()));
    }

    #[test]
    fn zero_roots_are_exact() {
        let roots = find_roots(&p(&[0, 0, -2, 1]), 1e-12).unwrap();
        let total: usize = roots.iter().map(|r| r.multiplicity).sum();
        assert_eq!(total, 3);
        assert!(roots
            .iter()
            .any(|r| r.exact == Some(BigRational::zero()) && r.multiplicity == 2));
    }

    #[test]
    fn classify_cyclotomic_times_linear() {
        let c = classify_unit_circle(&p(&[-2, 1, -2, 1]), 1e-12).unwrap();
        assert_eq!(c.on_circle_exact, vec![(4, 1)]);
        assert!(c.inside.is_empty());
        assert_eq!(c.outside.len(), 1);
        assert_eq!(
            c.outside[0].exact,
            Some(BigRational::from_integer(2.into()))
        );
    }

    #[test]
    fn classify_lehmer() {
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let c = classify_unit_circle(&lehmer, 1e-12).unwrap();
        assert_eq!(c.outside.len(), 1);
        assert_eq!(c.inside.len(), 1);
        assert_eq!(c.on_circle_inversion.len(), 8);
        assert!(c.on_circle_exact.is_empty());
        assert!((c.outside[0].approx.re - 1.17628081826).abs() < 1e-10);
        assert!((c.inside[0].approx.re - 1.0 / c.outside[0].approx.re).abs() < 1e-12);
        assert_eq!(c.total_count(), 10);
    }

    #[test]
    fn classify_golden() {
        let c = classify_unit_circle(&p(&[-1, -1, 1]), 1e-12).unwrap();
        assert_eq!(c.outside.len(), 1);
        assert_eq!(c.inside.len(), 1);
        assert_eq!(c.on_circle_count(), 0);
    }

    #[test]
    fn classify_rejects_non_primitive() {
        assert!(matches!(
            classify_unit_circle(&p(&[2, 4]), 1e-12),
            Err(Error::NotPrimitive { .. })
        ));
    }

    #[test]
    fn reconstruction_matches_coefficients() {
        let f = p(&[3, -1, 4, 1, -5, 9, 2]);
        let roots = find_roots(&f, 1e-12).unwrap();
        let rebuilt = reconstruct(2.0, &roots);
        for (got, want) in rebuilt.iter().zip(f.to_f64_coeffs()) {
            assert!((got.re - want).abs() < 1e-9 && got.im.abs() < 1e-9);
        }
    }
}
