//! Parsing and serde helpers for exact numbers.
//!
//! Exact values travel as decimal strings (`"-3"`, `"2/25"`) so that JSON
//! consumers never see a rounded float where an exact value was meant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub fn parse_int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::InvalidInput(format!("not an integer: {s:?}")))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rational rendered as `p/q` even when `q = 1`.
pub fn format_rational_full(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// A JSON scalar that is either a number or a string holding an exact value.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            Scalar::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            Scalar::Float(v) => {
                if v.fract() == 0.0 && v.abs() < 9.0e15 {
                    Ok(BigRational::from_integer(BigInt::from(*v as i64)))
                } else {
                    Err(Error::InvalidInput(format!(
                        "non-integral float {v} given where an exact value is required; use a \"p/q\" string"
                    )))
                }
            }
            Scalar::Text(s) => parse_rational(s),
        }
    }

    pub fn to_int(&self) -> Result<BigInt> {
        let q = self.to_rational()?;
        if q.denom().is_one() {
            Ok(q.numer().clone())
        } else {
            Err(Error::InvalidInput(format!(
                "expected an integer, got {}",
                format_rational(&q)
            )))
        }
    }
}

pub fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn ser_bigint_vec<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn de_bigint<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
    let scalar = Scalar::deserialize(d)?;
    scalar.to_int().map_err(serde::de::Error::custom)
}

pub fn de_bigint_vec<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<BigInt>, D::Error> {
    let scalars = Vec::<Scalar>::deserialize(d)?;
    scalars
        .iter()
        .map(|s| s.to_int().map_err(serde::de::Error::custom))
        .collect()
}

pub fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational_full(v))
}

pub fn de_rational<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    let scalar = Scalar::deserialize(d)?;
    scalar.to_rational().map_err(serde::de::Error::custom)
}

/// Integer square root check used when normalizing logarithm bases.
pub fn perfect_power_root(n: u64) -> (u64, u32) {
    if n < 4 {
        return (n, 1);
    }
    let mut best = (n, 1u32);
    for k in 2..=63u32 {
        let r = (n as f64).powf(1.0 / k as f64).round() as u64;
        if r < 2 {
            break;
        }
        for cand in [r.saturating_sub(1), r, r + 1] {
            if cand >= 2 && cand.checked_pow(k) == Some(n) {
                best = (cand, k);
            }
        }
    }
    best
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn abs_rational(q: &BigRational) -> BigRational {
    if q.is_negative() {
        -q.clone()
    } else {
        q.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        let q = parse_rational("2/25").unwrap();
        assert_eq!(format_rational(&q), "2/25");
        assert_eq!(format_rational(&parse_rational("-4/2").unwrap()), "-2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn perfect_powers() {
        assert_eq!(perfect_power_root(8), (2, 3));
        assert_eq!(perfect_power_root(36), (6, 2));
        assert_eq!(perfect_power_root(12), (12, 1));
        assert_eq!(perfect_power_root(1 << 40), (2, 40));
    }

    #[test]
    fn primes() {
        assert!(is_prime_u64(97));
        assert!(!is_prime_u64(91));
        assert_eq!(prime_factors_u64(360), vec![2, 3, 5]);
    }
}
