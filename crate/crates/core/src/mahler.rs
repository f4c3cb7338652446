//! Mahler measure and the entropy value type shared by every module.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_poly::{self, IntPolynomial, RatPolynomial};
use crate::numeric;
use crate::root_solver::{self, CircleClassification, DEFAULT_TOL};

/// A non-negative extended real: exact zero, an exact rational multiple of
/// `log b`, a certified interval, or infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntropyValue {
    ExactZero,
    ExactLog {
        base: u64,
        #[serde(
            serialize_with = "numeric::ser_rational",
            deserialize_with = "numeric::de_rational"
        )]
        multiplier: BigRational,
    },
    Approx {
        value: f64,
        error: f64,
    },
    Infinite,
}

impl EntropyValue {
    /// `q · log b`, normalized so that `b` is not a perfect power.
    pub fn exact_log(base: u64, multiplier: BigRational) -> Self {
        if base <= 1 || multiplier.is_zero() {
            return EntropyValue::ExactZero;
        }
        assert!(!multiplier.is_negative(), "entropy values are non-negative");
        let (root, k) = numeric::perfect_power_root(base);
        EntropyValue::ExactLog {
            base: root,
            multiplier: multiplier * BigRational::from_integer(BigInt::from(k)),
        }
    }

    pub fn log_int(base: u64, k: u64) -> Self {
        Self::exact_log(base, BigRational::from_integer(BigInt::from(k)))
    }

    pub fn approx(value: f64, error: f64) -> Self {
        EntropyValue::Approx {
            value,
            error: error.max(0.0),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(
            self,
            EntropyValue::ExactZero | EntropyValue::ExactLog { .. }
        )
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, EntropyValue::ExactZero)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, EntropyValue::Infinite)
    }

    /// Central value as a float (`+∞` for `Infinite`).
    pub fn value(&self) -> f64 {
        match self {
            EntropyValue::ExactZero => 0.0,
            EntropyValue::ExactLog { base, multiplier } => {
                multiplier.to_f64().unwrap_or(f64::NAN) * (*base as f64).ln()
            }
            EntropyValue::Approx { value, .. } => *value,
            EntropyValue::Infinite => f64::INFINITY,
        }
    }

    /// Rigorous enclosing interval.
    pub fn interval(&self) -> (f64, f64) {
        match self {
            EntropyValue::ExactZero => (0.0, 0.0),
            EntropyValue::ExactLog { .. } => {
                let v = self.value();
                let slack = v.abs() * 4.0 * f64::EPSILON;
                (v - slack, v + slack)
            }
            EntropyValue::Approx { value, error } => (value - error, value + error),
            EntropyValue::Infinite => (f64::INFINITY, f64::INFINITY),
        }
    }

    pub fn error(&self) -> f64 {
        let (lo, hi) = self.interval();
        if lo.is_infinite() {
            0.0
        } else {
            (hi - lo) / 2.0
        }
    }

    /// True when the value lies within `tol` of `x`, counting the bound.
    pub fn within(&self, x: f64, tol: f64) -> bool {
        if self.is_infinite() {
            return x.is_infinite();
        }
        let (lo, hi) = self.interval();
        x >= lo - tol && x <= hi + tol
    }

    /// Interval overlap test with slack `tol`.
    pub fn agrees_with(&self, other: &EntropyValue, tol: f64) -> bool {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => true,
            (false, false) => {
                let (a, b) = self.interval();
                let (c, d) = other.interval();
                a <= d + tol && c <= b + tol
            }
            _ => false,
        }
    }

    pub fn add(&self, other: &EntropyValue) -> EntropyValue {
        use EntropyValue::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (ExactZero, x) | (x, ExactZero) => x.clone(),
            (
                ExactLog {
                    base: a,
                    multiplier: p,
                },
                ExactLog {
                    base: b,
                    multiplier: q,
                },
            ) => {
                if a == b {
                    return Self::exact_log(*a, p + q);
                }
                if p == q {
                    if let Some(ab) = a.checked_mul(*b) {
                        return Self::exact_log(ab, p.clone());
                    }
                }
                if p.is_integer() && q.is_integer() {
                    let combined = BigInt::from(*a)
                        .pow(p.to_integer().to_u32().unwrap_or(u32::MAX))
                        * BigInt::from(*b).pow(q.to_integer().to_u32().unwrap_or(u32::MAX));
                    if let Some(c) = combined.to_u64() {
                        return Self::log_int(c, 1);
                    }
                }
                self.add_as_interval(other)
            }
            _ => self.add_as_interval(other),
        }
    }

    fn add_as_interval(&self, other: &EntropyValue) -> EntropyValue {
        let v = self.value() + other.value();
        let e = self.error() + other.error() + v.abs() * 2.0 * f64::EPSILON;
        Self::approx(v, e)
    }

    /// `k · self` for a non-negative rational `k`.
    pub fn scale(&self, k: &BigRational) -> EntropyValue {
        use EntropyValue::*;
        if k.is_zero() {
            return match self {
                Infinite => Infinite,
                _ => ExactZero,
            };
        }
        match self {
            ExactZero => ExactZero,
            Infinite => Infinite,
            ExactLog { base, multiplier } => Self::exact_log(*base, multiplier * k),
            Approx { value, error } => {
                let kf = k.to_f64().unwrap_or(f64::NAN);
                Self::approx(
                    value * kf,
                    error * kf + (value * kf).abs() * 2.0 * f64::EPSILON,
                )
            }
        }
    }

    /// Certified comparison. Exact values are compared exactly; otherwise the
    /// intervals must be disjoint, or the result is `Incomparable`.
    pub fn compare(&self, other: &EntropyValue) -> Result<Ordering> {
        use EntropyValue::*;
        match (self, other) {
            (Infinite, Infinite) => Ok(Ordering::Equal),
            (Infinite, _) => Ok(Ordering::Greater),
            (_, Infinite) => Ok(Ordering::Less),
            (ExactZero, ExactZero) => Ok(Ordering::Equal),
            (ExactZero, ExactLog { .. }) => Ok(Ordering::Less),
            (ExactLog { .. }, ExactZero) => Ok(Ordering::Greater),
            (
                ExactLog {
                    base: a,
                    multiplier: p,
                },
                ExactLog {
                    base: b,
                    multiplier: q,
                },
            ) => compare_exact_logs(*a, p, *b, q).map_or_else(|| self.compare_intervals(other), Ok),
            _ => self.compare_intervals(other),
        }
    }

    fn compare_intervals(&self, other: &EntropyValue) -> Result<Ordering> {
        let (a, b) = self.interval();
        let (c, d) = other.interval();
        if b < c {
            Ok(Ordering::Less)
        } else if d < a {
            Ok(Ordering::Greater)
        } else if a == b && c == d && a == c {
            Ok(Ordering::Equal)
        } else {
            Err(Error::Incomparable)
        }
    }
}

/// Compares `p·log a` with `q·log b` via `a^(p_num·q_den)` vs `b^(q_num·p_den)`.
fn compare_exact_logs(a: u64, p: &BigRational, b: u64, q: &BigRational) -> Option<Ordering> {
    let e1 = (p.numer() * q.denom()).to_u32()?;
    let e2 = (q.numer() * p.denom()).to_u32()?;
    if (e1 as f64) * (a as f64).log2() > 1e6 || (e2 as f64) * (b as f64).log2() > 1e6 {
        return None;
    }
    Some(BigInt::from(a).pow(e1).cmp(&BigInt::from(b).pow(e2)))
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyValue::ExactZero => write!(f, "0 (exact)"),
            EntropyValue::ExactLog { base, multiplier } => {
                if multiplier.is_one() {
                    write!(f, "log {base} (exact) ≈ {:.12}", self.value())
                } else {
                    write!(
                        f,
                        "{}·log {base} (exact) ≈ {:.12}",
                        numeric::format_rational(multiplier),
                        self.value()
                    )
                }
            }
            EntropyValue::Approx { value, error } => write!(f, "{value:.12} ± {error:.1e}"),
            EntropyValue::Infinite => write!(f, "infinite"),
        }
    }
}

/// Mahler measure together with the root classification it came from.
#[derive(Debug, Clone, Serialize)]
pub struct MahlerReport {
    pub value: EntropyValue,
    pub primitive: IntPolynomial,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<CircleClassification>,
}

pub fn mahler_measure(f: &IntPolynomial) -> Result<EntropyValue> {
    mahler_measure_tol(f, DEFAULT_TOL)
}

pub fn mahler_measure_tol(f: &IntPolynomial, tol: f64) -> Result<EntropyValue> {
    mahler_report(f, tol).map(|r| r.value)
}

pub fn mahler_measure_rat(f: &RatPolynomial, tol: f64) -> Result<EntropyValue> {
    let (_, prim) = exact_poly::content_primitive(f)?;
    mahler_measure_tol(&prim, tol)
}

/// The measure of the minimal polynomial of an algebraic number.
/// Irreducibility is the caller's responsibility.
pub fn mahler_of_algebraic(minpoly: &IntPolynomial) -> Result<EntropyValue> {
    if !minpoly.is_zero() && minpoly.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    mahler_measure(minpoly)
}

/// `m(f) = log|s| + Σ_{|λ|>1} log|λ|` on the primitive part of `f`.
pub fn mahler_report(f: &IntPolynomial, tol: f64) -> Result<MahlerReport> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let prim = f.primitive_part();
    let (_, g) = prim.strip_t_power();
    if g.degree() == 0 {
        return Ok(MahlerReport {
            value: EntropyValue::ExactZero,
            primitive: prim,
            classification: None,
        });
    }
    let class = root_solver::classify_unit_circle(&g, tol)?;
    let lead = g.lead().abs();
    if class.outside.is_empty() && lead.is_one() {
        return Ok(MahlerReport {
            value: EntropyValue::ExactZero,
            primitive: prim,
            classification: Some(class),
        });
    }
    let value = exact_value(&lead, &class).unwrap_or_else(|| approx_value(&lead, &class));
    Ok(MahlerReport {
        value,
        primitive: prim,
        classification: Some(class),
    })
}

/// `Σ_{|λ|>1} log|λ|` over the roots of `f`, without the leading-coefficient
/// term.
pub fn log_outside_sum(f: &IntPolynomial, tol: f64) -> Result<EntropyValue> {
    let report = mahler_report(f, tol)?;
    let Some(class) = report.classification else {
        return Ok(EntropyValue::ExactZero);
    };
    if class.outside.is_empty() {
        return Ok(EntropyValue::ExactZero);
    }
    let one = BigInt::one();
    Ok(exact_value(&one, &class).unwrap_or_else(|| approx_value(&one, &class)))
}

/// `max(0, max_λ log|λ|)` over the roots of `f`.
pub fn log_max_root(f: &IntPolynomial, tol: f64) -> Result<EntropyValue> {
    let report = mahler_report(f, tol)?;
    let Some(class) = report.classification else {
        return Ok(EntropyValue::ExactZero);
    };
    let Some(top) = class
        .outside
        .iter()
        .max_by(|a, b| a.approx.norm().total_cmp(&b.approx.norm()))
    else {
        return Ok(EntropyValue::ExactZero);
    };
    if let Some(q) = &top.exact {
        let q = numeric::abs_rational(q);
        if let Some(k) = q.is_integer().then(|| q.to_integer().to_u64()).flatten() {
            return Ok(EntropyValue::log_int(k, 1));
        }
    }
    let m = top.approx.norm();
    let lo = (m - top.radius).max(1.0);
    let error =
        (m.ln() - lo.ln()).max((m + top.radius).ln() - m.ln()) + 4.0 * f64::EPSILON * m.ln();
    Ok(EntropyValue::approx(m.ln(), error))
}

/// `M(f)` as an integer when every outside root is a verified rational.
fn exact_value(lead: &BigInt, class: &CircleClassification) -> Option<EntropyValue> {
    let mut product = BigRational::from_integer(lead.clone());
    for root in &class.outside {
        let q = root.exact.as_ref()?;
        product *= numeric::abs_rational(q).pow(root.multiplicity as i32);
    }
    if !product.is_integer() {
        return None;
    }
    let base = product.to_integer().to_u64()?;
    Some(EntropyValue::log_int(base, 1))
}

fn approx_value(lead: &BigInt, class: &CircleClassification) -> EntropyValue {
    let u = f64::EPSILON;
    let lead_f = lead.to_f64().unwrap_or(f64::INFINITY);
    let mut value = lead_f.ln();
    let mut error = value.abs() * u;
    let mut terms = 1usize;
    for root in &class.outside {
        let m = root.approx.norm();
        let k = root.multiplicity as f64;
        let lo = (m - root.radius).max(1.0);
        value += k * m.ln();
        error += k * ((m.ln() - lo.ln()) + ((m + root.radius).ln() - m.ln())).max(0.0)
            + k * 4.0 * u * m.ln().abs().max(u);
        terms += root.multiplicity;
    }
    error += terms as f64 * u * value.abs();
    EntropyValue::approx(value.max(0.0), error)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn linear_is_exact_log() {
        assert_eq!(
            mahler_measure(&p(&[-2, 1])).unwrap(),
            EntropyValue::log_int(2, 1)
        );
        // 2t − 1: leading coefficient only
        assert_eq!(
            mahler_measure(&p(&[-1, 2])).unwrap(),
            EntropyValue::log_int(2, 1)
        );
        // (t − 2)³ normalizes to 3·log 2
        let cube = p(&[-2, 1]).pow(3);
        assert_eq!(mahler_measure(&cube).unwrap(), EntropyValue::log_int(2, 3));
    }

    #[test]
    fn cyclotomic_is_exact_zero() {
        assert_eq!(
            mahler_measure(&p(&[1, -1, 1])).unwrap(),
            EntropyValue::ExactZero
        );
        assert_eq!(
            mahler_of_algebraic(&p(&[1, 0, 1])).unwrap(),
            EntropyValue::ExactZero
        );
        assert_eq!(
            mahler_measure(&p(&[0, 1])).unwrap(),
            EntropyValue::ExactZero
        );
    }

    #[test]
    fn lehmer_value() {
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let m = mahler_measure(&lehmer).unwrap();
        assert!(m.within(0.162357612007738, 1e-12), "{m:?}");
        assert!(m.error() <= 1e-9);
    }

    #[test]
    fn plastic_number() {
        // real root of t³ − t − 1 by Newton iteration
        let mut x = 1.3f64;
        for _ in 0..50 {
            x -= (x * x * x - x - 1.0) / (3.0 * x * x - 1.0);
        }
        let m = mahler_measure(&p(&[-1, -1, 0, 1])).unwrap();
        assert!(m.within(x.ln(), 1e-12));
    }

    #[test]
    fn golden_ratio() {
        let m = mahler_of_algebraic(&p(&[-1, -1, 1])).unwrap();
        assert!(m.within(((1.0 + 5f64.sqrt()) / 2.0).ln(), 1e-12));
    }

    #[test]
    fn zero_rejected() {
        assert_eq!(mahler_measure(&p(&[0])), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn json_forms() {
        let v = EntropyValue::log_int(8, 1);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"kind":"exact_log","base":2,"multiplier":"3/1"}"#
        );
        assert_eq!(
            serde_json::to_string(&EntropyValue::ExactZero).unwrap(),
            r#"{"kind":"exact_zero"}"#
        );
        assert_eq!(
            serde_json::to_string(&EntropyValue::Infinite).unwrap(),
            r#"{"kind":"infinite"}"#
        );
        let back: EntropyValue =
            serde_json::from_str(r#"{"kind":"exact_log","base":2,"multiplier":"3/1"}"#).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn comparisons() {
        let l2 = EntropyValue::log_int(2, 1);
        let l3 = EntropyValue::log_int(3, 1);
        assert_eq!(l2.compare(&l3), Ok(Ordering::Less));
        assert_eq!(
            EntropyValue::log_int(4, 1).compare(&EntropyValue::log_int(2, 2)),
            Ok(Ordering::Equal)
        );
        let a = EntropyValue::approx(0.5, 0.1);
        let b = EntropyValue::approx(0.55, 0.1);
        assert_eq!(a.compare(&b), Err(Error::Incomparable));
        assert_eq!(EntropyValue::Infinite.compare(&l2), Ok(Ordering::Greater));
    }

    #[test]
    fn addition_stays_exact_when_possible() {
        let s = EntropyValue::log_int(2, 1).add(&EntropyValue::log_int(3, 1));
        assert_eq!(s, EntropyValue::log_int(6, 1));
        let t = EntropyValue::log_int(2, 1).add(&EntropyValue::log_int(2, 2));
        assert_eq!(t, EntropyValue::log_int(2, 3));
    }
}
