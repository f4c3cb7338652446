//! Exact univariate polynomials over ℤ and ℚ.
//!
//! Coefficients are stored in ascending order: `coeffs[i]` multiplies `tⁱ`.
//! The zero polynomial is representable (as `[0]`) but every measure-related
//! operation rejects it.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, Scalar};
use crate::root_solver::{self, CertifiedReal};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `tᵐ − 1`.
    pub fn t_pow_minus_one(m: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); m + 1];
        coeffs[0] = BigInt::from(-1);
        coeffs[m] = BigInt::one();
        Self::new(coeffs)
    }

    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lead(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lead().is_negative() {
            c = -c;
        }
        Self::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// Sign-normalized copy: leading coefficient made positive.
    pub fn sign_normalized(&self) -> Self {
        if self.lead().is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * k).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, a| acc * x + a)
    }

    /// `q^deg · f(p/q)`, an integer that vanishes iff `p/q` is a root.
    pub fn eval_homogeneous(&self, p: &BigInt, q: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        for a in self.coeffs.iter().rev() {
            acc = acc * p + a * &qpow;
            qpow *= q;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| {
                acc * z + Complex64::new(a.to_f64().unwrap_or(f64::NAN), 0.0)
            })
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|a| a.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn to_i64_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|a| a.to_i64()).collect()
    }

    /// Raw reversal `t^deg · f(1/t)` without sign normalization.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// `f(−t)`.
    pub fn negate_variable(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| if i % 2 == 1 { -a } else { a.clone() })
                .collect(),
        )
    }

    /// `f(tᵏ)`.
    pub fn compose_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let mut coeffs = vec![BigInt::zero(); self.degree() * k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = a.clone();
        }
        Self::new(coeffs)
    }

    /// Splits off the largest power of `t`: returns `(k, g)` with `f = tᵏ·g`.
    pub fn strip_t_power(&self) -> (usize, Self) {
        if self.is_zero() {
            return (0, self.clone());
        }
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (k, Self::new(self.coeffs[k..].to_vec()))
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::constant(BigInt::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient in ℤ[t], or `None` when `d` does not divide `self`
    /// with an integral quotient.
    pub fn div_exact(&self, d: &IntPolynomial) -> Option<IntPolynomial> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.degree();
        let m = d.degree();
        if n < m {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); n - m + 1];
        let dl = d.lead();
        for i in (0..=n - m).rev() {
            let top = &rem[i + m];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(dl);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &q * dc;
            }
            quot[i] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(Self::new(quot))
        } else {
            None
        }
    }

    /// Pseudo-remainder `lc(d)^k · self mod d`.
    fn pseudo_rem(&self, d: &IntPolynomial) -> IntPolynomial {
        let m = d.degree();
        let dl = d.lead().clone();
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= m {
            let shift = r.degree() - m;
            let rl = r.lead().clone();
            let lhs = r.scale(&dl);
            let rhs = d.shift(shift).scale(&rl);
            r = &lhs - &rhs;
        }
        r
    }

    /// Primitive gcd with positive leading coefficient (primitive PRS).
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            if b.degree() == 0 {
                return Self::constant(BigInt::one());
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Square-free decomposition (Yun): primitive pairwise coprime factors
    /// `gᵢ` with `f = ±content · ∏ gᵢ^i`. Constant input yields no factors.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPolynomial, usize)> {
        let f = self.primitive_part();
        if f.degree() == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).expect("gcd divides f");
        let c = df.div_exact(&a0).expect("gcd divides f'");
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a).expect("yun: a | b");
            let c = d.div_exact(&a).expect("yun: a | d");
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        let f = self.primitive_part();
        f.degree() == 0 || f.gcd(&f.derivative()).degree() == 0
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Neg for IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.into_iter().map(|a| -a).collect())
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, a) in rhs.coeffs.iter().enumerate() {
            out[i] += a;
        }
        IntPolynomial::new(out)
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, a) in rhs.coeffs.iter().enumerate() {
            out[i] -= a;
        }
        IntPolynomial::new(out)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

#[derive(Deserialize)]
struct PolyRepr {
    coeffs: Vec<Scalar>,
}

#[derive(Serialize)]
struct PolyReprOut {
    coeffs: Vec<String>,
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyReprOut {
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(Scalar::to_int)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        if coeffs.is_empty() {
            return Err(serde::de::Error::custom("empty coefficient list"));
        }
        Ok(IntPolynomial::new(coeffs))
    }
}

/// Polynomial with exact rational coefficients, ascending order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatPolynomial {
    coeffs: Vec<BigRational>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        RatPolynomial { coeffs }
    }

    pub fn from_int(p: &IntPolynomial) -> Self {
        Self::new(
            p.coeffs()
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn from_ratios(pairs: &[(i64, i64)]) -> Self {
        Self::new(
            pairs
                .iter()
                .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lead(&self) -> &BigRational {
        self.coeffs.last().expect("nonempty")
    }

    pub fn mul(&self, rhs: &RatPolynomial) -> RatPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return Self::new(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({})t^{i}", numeric::format_rational(c)))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Serialize for RatPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyReprOut {
            coeffs: self.coeffs.iter().map(numeric::format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(Scalar::to_rational)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        if coeffs.is_empty() {
            return Err(serde::de::Error::custom("empty coefficient list"));
        }
        Ok(RatPolynomial::new(coeffs))
    }
}

/// Writes `f = content · prim` with `prim` primitive over ℤ and positive
/// leading coefficient. `content` is positive unless `f` has a negative
/// leading coefficient, in which case it carries the sign.
pub fn content_primitive(f: &RatPolynomial) -> Result<(BigRational, IntPolynomial)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let denom_lcm = f
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| (c * BigRational::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    let ints = IntPolynomial::new(scaled);
    let prim = ints.primitive_part();
    // f = (ints / denom_lcm), ints = c · prim
    let c = &ints.coeffs()[ints.degree()] / &prim.coeffs()[prim.degree()];
    let content = BigRational::new(c, denom_lcm);
    Ok((content, prim))
}

/// Integer polynomial from a rational one with integral coefficients.
pub fn to_int_polynomial(f: &RatPolynomial) -> Result<IntPolynomial> {
    f.coeffs()
        .iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::InvalidInput(format!(
                    "coefficient {} is not an integer",
                    numeric::format_rational(c)
                )))
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(IntPolynomial::new)
}

pub fn euler_phi(m: u64) -> u64 {
    numeric::prime_factors_u64(m)
        .into_iter()
        .fold(m, |acc, p| acc / p * (p - 1))
}

fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            small.push(d);
            if d != m / d {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn cyclotomic_cache() -> &'static RwLock<HashMap<u64, IntPolynomial>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, IntPolynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The `m`-th cyclotomic polynomial, obtained by exact division of `tᵐ − 1`
/// by `Φ_d` for every proper divisor `d` of `m`.
pub fn cyclotomic(m: u64) -> IntPolynomial {
    assert!(m >= 1, "cyclotomic index must be positive");
    if let Some(p) = cyclotomic_cache().read().expect("cache poisoned").get(&m) {
        return p.clone();
    }
    let mut acc = IntPolynomial::t_pow_minus_one(m as usize);
    for d in divisors(m) {
        if d == m {
            continue;
        }
        acc = acc
            .div_exact(&cyclotomic(d))
            .expect("Φ_d divides tᵐ − 1 for d | m");
    }
    cyclotomic_cache()
        .write()
        .expect("cache poisoned")
        .insert(m, acc.clone());
    acc
}

/// All `m` with `φ(m) ≤ degree`, ordered by `(φ(m), m)`.
///
/// Uses `φ(m) ≥ √(m/2)`, so `m ≤ 2·degree²` covers every candidate.
pub fn cyclotomic_candidates(degree: usize) -> Vec<u64> {
    let bound = 2 * (degree as u64) * (degree as u64) + 2;
    let mut out: Vec<(u64, u64)> = (1..=bound)
        .map(|m| (euler_phi(m), m))
        .filter(|&(phi, _)| phi as usize <= degree)
        .collect();
    out.sort_unstable();
    out.into_iter().map(|(_, m)| m).collect()
}

/// Divides out every cyclotomic factor exactly.
///
/// Returns `(factors, cofactor)` where `factors` lists `(m, multiplicity)`
/// and `f = ∏ Φ_m^mult · cofactor`.
pub fn cyclotomic_factorization(f: &IntPolynomial) -> (Vec<(u64, usize)>, IntPolynomial) {
    let mut g = f.clone();
    let mut found = Vec::new();
    if g.is_zero() {
        return (found, g);
    }
    for m in cyclotomic_candidates(g.degree()) {
        if euler_phi(m) as usize > g.degree() {
            continue;
        }
        let phi = cyclotomic(m);
        let mut mult = 0;
        while g.degree() >= phi.degree() {
            match g.div_exact(&phi) {
                Some(q) => {
                    g = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            found.push((m, mult));
        }
        if g.degree() == 0 {
            break;
        }
    }
    (found, g)
}

/// Exact Kronecker test: `f` is ± a product of cyclotomic polynomials.
pub fn is_zero_mahler(f: &IntPolynomial) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let content = f.content();
    if !content.is_one() {
        return Err(Error::NotPrimitive {
            content: content.to_string(),
        });
    }
    if !f.lead().abs().is_one() || f.constant_term().is_zero() {
        return Ok(false);
    }
    let (_, cofactor) = cyclotomic_factorization(f);
    Ok(cofactor.degree() == 0)
}

/// `t^deg · f(1/t)`, sign-normalized to a positive leading coefficient.
pub fn reciprocal(f: &IntPolynomial) -> Result<IntPolynomial> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.constant_term().is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    Ok(f.reversed().sign_normalized())
}

fn check_delta_input(f: &IntPolynomial, horizon: usize) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let (factors, _) = cyclotomic_factorization(f);
    if let Some(m) = factors
        .iter()
        .map(|&(m, _)| m as usize)
        .filter(|&m| m <= horizon)
        .min()
    {
        return Err(Error::RootOfUnityDegeneracy { n: m });
    }
    Ok(())
}

/// `Δₙ(f) = ∏ |1 − λᵢⁿ|` for `n = 1..=horizon`, from certified roots.
///
/// Each value carries a rigorous error bound propagated from the root
/// inclusion disks.
pub fn delta_sequence(f: &IntPolynomial, horizon: usize, tol: f64) -> Result<Vec<CertifiedReal>> {
    check_delta_input(f, horizon)?;
    if f.degree() == 0 {
        return Ok(vec![CertifiedReal::exact(1.0); horizon]);
    }
    let roots = root_solver::find_roots(f, tol)?;
    let u = f64::EPSILON;
    let mut out = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let mut value = 1.0f64;
        let mut lower = 1.0f64;
        let mut upper = 1.0f64;
        for root in &roots {
            let z = root.approx;
            let zn = z.powu(n as u32);
            let modulus = z.norm();
            let v = (Complex64::new(1.0, 0.0) - zn).norm();
            // |λⁿ − zⁿ| ≤ (|z| + r)ⁿ − |z|ⁿ, plus rounding in the power itself
            let spread = (modulus + root.radius).powi(n as i32) - modulus.powi(n as i32)
                + 4.0 * (n as f64 + 2.0) * u * (modulus.powi(n as i32) + 1.0);
            for _ in 0..root.multiplicity {
                value *= v;
                lower *= (v - spread).max(0.0);
                upper *= v + spread;
            }
        }
        if lower <= 0.0 {
            return Err(Error::RootOfUnityDegeneracy { n });
        }
        let error = (upper - value).max(value - lower) * (1.0 + 8.0 * u * f.degree() as f64);
        out.push(CertifiedReal { value, error });
    }
    Ok(out)
}

/// Exact `Δₙ(f) = |Res(f, tⁿ − 1)| = |det(Cⁿ − I)|` with `C` the companion
/// matrix of the monic `f`. Independent of any root finding.
pub fn delta_sequence_exact(f: &IntPolynomial, horizon: usize) -> Result<Vec<BigInt>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let d = f.degree();
    if d == 0 {
        return Ok(vec![BigInt::one(); horizon]);
    }
    // companion matrix: subdiagonal ones, last column −a_0..−a_{d−1}
    let mut companion = vec![vec![BigInt::zero(); d]; d];
    for i in 1..d {
        companion[i][i - 1] = BigInt::one();
    }
    for (i, row) in companion.iter_mut().enumerate() {
        row[d - 1] = -f.coeffs()[i].clone();
    }
    let mut power = companion.clone();
    let mut out = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        if n > 1 {
            power = crate::linalg::int_mat_mul(&power, &companion);
        }
        let mut shifted = power.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] -= BigInt::one();
        }
        out.push(crate::linalg::det_integer(&shifted).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn content_primitive_examples() {
        let (c, prim) =
            content_primitive(&RatPolynomial::from_ratios(&[(-1, 1), (-1, 1), (1, 1)])).unwrap();
        assert!(c.is_one());
        assert_eq!(prim, p(&[-1, -1, 1]));

        let (c, prim) = content_primitive(&RatPolynomial::from_ratios(&[(-1, 2), (1, 2)])).unwrap();
        assert_eq!(c, BigRational::new(1.into(), 2.into()));
        assert_eq!(prim, p(&[-1, 1]));

        let (c, prim) = content_primitive(&RatPolynomial::from_ratios(&[(-1, 2), (1, 1)])).unwrap();
        assert_eq!(c, BigRational::new(1.into(), 2.into()));
        assert_eq!(prim, p(&[-1, 2]));

        assert_eq!(
            content_primitive(&RatPolynomial::new(vec![])),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn negative_leading_coefficient_goes_into_content() {
        let f = RatPolynomial::from_ratios(&[(1, 3), (-2, 3)]);
        let (c, prim) = content_primitive(&f).unwrap();
        assert_eq!(c, BigRational::new((-1).into(), 3.into()));
        assert_eq!(prim, p(&[-1, 2]));
        assert_eq!(
            RatPolynomial::from_int(&prim).mul(&RatPolynomial::new(vec![c])),
            f
        );
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), p(&[-1, 1]));
        assert_eq!(cyclotomic(3), p(&[1, 1, 1]));
        assert_eq!(cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), p(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic(105).degree(), 48);
    }

    #[test]
    fn cyclotomic_12_matches_division_oracle() {
        // (t¹² − 1) / (Φ₁Φ₂Φ₃Φ₄Φ₆), factors written out by hand
        let mut denom = p(&[1]);
        for f in [
            p(&[-1, 1]),
            p(&[1, 1]),
            p(&[1, 1, 1]),
            p(&[1, 0, 1]),
            p(&[1, -1, 1]),
        ] {
            denom = &denom * &f;
        }
        let q = IntPolynomial::t_pow_minus_one(12)
            .div_exact(&denom)
            .unwrap();
        assert_eq!(q, cyclotomic(12));
    }

    #[test]
    fn candidates_cover_phi_bound() {
        let c = cyclotomic_candidates(2);
        assert_eq!(c, vec![1, 2, 3, 4, 6]);
        assert!(cyclotomic_candidates(4).contains(&12));
    }

    #[test]
    fn zero_mahler_detection() {
        assert!(is_zero_mahler(&p(&[1, 1, 1])).unwrap());
        assert!(!is_zero_mahler(&p(&[-1, -1, 0, 1])).unwrap());
        assert!(!is_zero_mahler(&p(&[-1, 2])).unwrap());
        assert!(is_zero_mahler(&(&cyclotomic(5) * &cyclotomic(7))).unwrap());
        assert!(matches!(
            is_zero_mahler(&p(&[2, 4])),
            Err(Error::NotPrimitive { .. })
        ));
        assert_eq!(is_zero_mahler(&p(&[3])), Err(Error::ConstantPolynomial));
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(reciprocal(&p(&[-1, -1, 1])).unwrap(), p(&[-1, 1, 1]));
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert_eq!(reciprocal(&lehmer).unwrap(), lehmer);
        assert_eq!(reciprocal(&p(&[-1, 2])).unwrap(), p(&[-2, 1]));
        assert_eq!(reciprocal(&p(&[0, 1])), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn gcd_and_division() {
        let a = &p(&[-1, 1]) * &p(&[2, 3]);
        let b = &p(&[-1, 1]) * &p(&[5, 0, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert_eq!(a.div_exact(&p(&[2, 3])), Some(p(&[-1, 1])));
        assert_eq!(a.div_exact(&p(&[1, 1])), None);
        // divisible over ℚ but not with integral quotient
        assert_eq!(p(&[1, 1]).div_exact(&p(&[2, 2])), None);
    }

    #[test]
    fn squarefree_decomposition_reassembles() {
        let f = &(&p(&[-1, 1]).pow(3) * &p(&[2, 0, 1]).pow(2)) * &p(&[3, 1]);
        let parts = f.squarefree_decomposition();
        let mut rebuilt = p(&[1]);
        for (g, k) in &parts {
            assert!(g.is_squarefree());
            rebuilt = &rebuilt * &g.pow(*k);
        }
        assert_eq!(rebuilt.sign_normalized(), f.primitive_part());
        let mults: Vec<usize> = parts.iter().map(|(_, k)| *k).collect();
        assert_eq!(mults, vec![1, 2, 3]);
    }

    #[test]
    fn delta_examples() {
        let d = delta_sequence(&p(&[-2, 1]), 3, 1e-12).unwrap();
        for (got, want) in d.iter().zip([1.0, 3.0, 7.0]) {
            assert!((got.value - want).abs() <= got.error + 1e-12, "{got:?}");
        }
        assert_eq!(
            delta_sequence(&p(&[-1, 1]), 2, 1e-12),
            Err(Error::RootOfUnityDegeneracy { n: 1 })
        );
        let fib = delta_sequence(&p(&[-1, -1, 1]), 5, 1e-12).unwrap();
        for (got, want) in fib.iter().zip([1.0, 1.0, 4.0, 5.0, 11.0]) {
            assert!(
                (got.value - want).abs() <= got.error + 1e-9,
                "{got:?} vs {want}"
            );
        }
    }

    #[test]
    fn delta_exact_resultant() {
        let exact = delta_sequence_exact(&p(&[-1, -1, 1]), 5).unwrap();
        let want: Vec<BigInt> = [1, 1, 4, 5, 11].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(exact, want);
        let mersenne = delta_sequence_exact(&p(&[-2, 1]), 5).unwrap();
        assert_eq!(mersenne[4], BigInt::from(31));
    }

    #[test]
    fn delta_requires_monic() {
        assert_eq!(delta_sequence(&p(&[-1, 2]), 3, 1e-12), Err(Error::NotMonic));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[-1, -1, 1]).to_string(), "t^2 - t - 1");
        assert_eq!(p(&[0]).to_string(), "0");
    }

    #[test]
    fn json_form_is_ascending_strings() {
        let f = p(&[-1, 0, 2]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"coeffs":["-1","0","2"]}"#);
        let back: IntPolynomial = serde_json::from_str(r#"{"coeffs":[-1, "0", 2]}"#).unwrap();
        assert_eq!(back, f);
        let r: RatPolynomial = serde_json::from_str(r#"{"coeffs":["-1/2", "1"]}"#).unwrap();
        assert_eq!(r, RatPolynomial::from_ratios(&[(-1, 2), (1, 1)]));
    }
}
