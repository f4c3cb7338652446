//! Entropies of linear endomorphisms of ℤⁿ, ℚⁿ, ℝⁿ, the dual torus and of
//! scalar multiplication on ℚ_p.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_poly::{content_primitive, cyclotomic, cyclotomic_factorization, IntPolynomial};
use crate::linalg::{char_poly, kernel_subspace, restrict, span_basis, RatMatrix, RatVector};
use crate::mahler::{self, EntropyValue};
use crate::numeric::is_prime_u64;
use crate::root_solver::DEFAULT_TOL;

const DEFAULT_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Zn,
    Qn,
    Rn,
    TnDual,
}

impl FromStr for DomainTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zn" => Ok(DomainTag::Zn),
            "qn" => Ok(DomainTag::Qn),
            "rn" => Ok(DomainTag::Rn),
            "tn" | "tn_dual" => Ok(DomainTag::TnDual),
            other => Err(Error::InvalidInput(format!(
                "unknown domain {other:?} (expected zn, qn, rn or tn)"
            ))),
        }
    }
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainTag::Zn => "zn",
            DomainTag::Qn => "qn",
            DomainTag::Rn => "rn",
            DomainTag::TnDual => "tn",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinearFlow {
    Matrix {
        domain: DomainTag,
        matrix: RatMatrix,
    },
    /// Multiplication by `ξ` on ℚ_p.
    QpScalar { p: u64, xi: BigRational },
}

impl LinearFlow {
    pub fn new(domain: DomainTag, matrix: RatMatrix) -> Result<Self> {
        if matches!(domain, DomainTag::Zn | DomainTag::TnDual) && !matrix.is_integer() {
            return Err(Error::WrongDomain(format!(
                "domain {domain} needs an integer matrix"
            )));
        }
        Ok(LinearFlow::Matrix { domain, matrix })
    }

    pub fn zn(matrix: RatMatrix) -> Result<Self> {
        Self::new(DomainTag::Zn, matrix)
    }

    pub fn qn(matrix: RatMatrix) -> Self {
        LinearFlow::Matrix {
            domain: DomainTag::Qn,
            matrix,
        }
    }

    pub fn rn(matrix: RatMatrix) -> Self {
        LinearFlow::Matrix {
            domain: DomainTag::Rn,
            matrix,
        }
    }

    pub fn tn_dual(matrix: RatMatrix) -> Result<Self> {
        Self::new(DomainTag::TnDual, matrix)
    }

    pub fn qp_scalar(p: u64, xi: BigRational) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if xi.is_zero() {
            return Err(Error::InvalidInput("ξ must be nonzero".into()));
        }
        Ok(LinearFlow::QpScalar { p, xi })
    }
}

/// Primitive integer polynomial with the roots of `det(tI − A)`.
pub fn primitive_char_poly(a: &RatMatrix) -> Result<IntPolynomial> {
    Ok(content_primitive(&char_poly(a))?.1)
}

/// `v_p(x)` for nonzero rational `x`.
pub fn p_adic_valuation(x: &BigRational, p: u64) -> i64 {
    let p = BigInt::from(p);
    let val = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0i64;
        while !n.is_zero() && n.is_multiple_of(&p) {
            n /= &p;
            k += 1;
        }
        k
    };
    val(x.numer()) - val(x.denom())
}

pub fn algebraic_entropy(flow: &LinearFlow) -> Result<EntropyValue> {
    algebraic_entropy_tol(flow, DEFAULT_TOL)
}

/// `h_alg`: the Mahler measure of the characteristic polynomial on ℤⁿ and ℚⁿ,
/// the sum of `log|λ|` over expanding eigenvalues on ℝⁿ, and
/// `max(0, −v_p(ξ))·log p` on ℚ_p.
pub fn algebraic_entropy_tol(flow: &LinearFlow, tol: f64) -> Result<EntropyValue> {
    match flow {
        LinearFlow::Matrix { domain, matrix } => {
            let f = primitive_char_poly(matrix)?;
            match domain {
                DomainTag::Zn | DomainTag::Qn | DomainTag::TnDual => {
                    mahler::mahler_measure_tol(&f, tol)
                }
                DomainTag::Rn => mahler::log_outside_sum(&f, tol),
            }
        }
        LinearFlow::QpScalar { p, xi } => {
            let k = (-p_adic_valuation(xi, *p)).max(0) as u64;
            Ok(EntropyValue::log_int(*p, k))
        }
    }
}

pub fn topological_entropy(flow: &LinearFlow) -> Result<EntropyValue> {
    topological_entropy_tol(flow, DEFAULT_TOL)
}

/// `h_top` on ℝⁿ (expanding eigenvalues) and on the torus dual to an
/// integer matrix (the Mahler measure of its characteristic polynomial).
pub fn topological_entropy_tol(flow: &LinearFlow, tol: f64) -> Result<EntropyValue> {
    match flow {
        LinearFlow::Matrix {
            domain: DomainTag::Rn,
            matrix,
        } => mahler::log_outside_sum(&primitive_char_poly(matrix)?, tol),
        LinearFlow::Matrix {
            domain: DomainTag::TnDual,
            matrix,
        } => mahler::mahler_measure_tol(&primitive_char_poly(&matrix.transpose())?, tol),
        other => Err(Error::WrongDomain(format!(
            "topological entropy needs domain rn or tn, got {}",
            match other {
                LinearFlow::Matrix { domain, .. } => domain.to_string(),
                LinearFlow::QpScalar { .. } => "qp".to_string(),
            }
        ))),
    }
}

/// `max(0, max_λ log|λ|)`, a lower bound for `h_alg` on ℚⁿ and ℤⁿ.
pub fn eigenvalue_lower_bound(flow: &LinearFlow) -> Result<EntropyValue> {
    match flow {
        LinearFlow::Matrix {
            domain: DomainTag::Zn | DomainTag::Qn,
            matrix,
        } => mahler::log_max_root(&primitive_char_poly(matrix)?, DEFAULT_TOL),
        _ => Err(Error::WrongDomain(
            "eigenvalue bound needs domain zn or qn".into(),
        )),
    }
}

/// Largest `A`-invariant subspace of ℚⁿ on which `A` has zero entropy:
/// the generalized eigenspace for eigenvalue 0 and roots of unity.
pub fn pinsker_subspace(a: &RatMatrix) -> Result<Vec<RatVector>> {
    let n = a.dim();
    let f = primitive_char_poly(a)?;
    let (k, g) = f.strip_t_power();
    let (factors, _) = cyclotomic_factorization(&g);
    let mut p = IntPolynomial::monomial(BigInt::one(), k);
    for (m, mult) in factors {
        p = &p * &cyclotomic(m).pow(mult);
    }
    if p.degree() == n {
        return Ok(RatMatrix::identity(n).rows().to_vec());
    }
    Ok(span_basis(&kernel_subspace(&a.eval_poly(&p)), n))
}

fn to_i64_matrix(a: &RatMatrix) -> Result<Vec<Vec<i64>>> {
    a.to_int()?
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    x.to_i64()
                        .ok_or_else(|| Error::InvalidInput("matrix entry exceeds 64 bits".into()))
                })
                .collect()
        })
        .collect()
}

/// Exact trajectory sizes `|Tₙ(A, F)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryProfile {
    pub sizes: Vec<u64>,
    /// `log|Tₙ|/n`.
    pub slopes: Vec<f64>,
    /// `min_n log|Tₙ|/n`.
    pub estimate: f64,
}

impl TrajectoryProfile {
    /// `|T_{n+m}| ≤ |Tₙ|·|T_m|` for all indices in range.
    pub fn is_subadditive(&self) -> bool {
        let s = &self.sizes;
        (1..=s.len()).all(|n| {
            (1..=s.len() - n).all(|m| s[n + m - 1] as u128 <= s[n - 1] as u128 * s[m - 1] as u128)
        })
    }

    pub fn is_monotone(&self) -> bool {
        self.sizes.windows(2).all(|w| w[0] <= w[1])
    }

    /// `log|T_N| − log|T_{N−1}|`.
    pub fn last_increment(&self) -> Option<f64> {
        let n = self.sizes.len();
        (n >= 2).then(|| (self.sizes[n - 1] as f64).ln() - (self.sizes[n - 2] as f64).ln())
    }
}

/// Sumsets `Tₙ = F + AF + … + Aⁿ⁻¹F` by exhaustive enumeration, using
/// `Tₙ₊₁ = F + A·Tₙ`. `F` is extended by 0.
pub fn trajectory_oracle(
    a: &RatMatrix,
    f: &[Vec<i64>],
    horizon: usize,
    budget: Option<usize>,
) -> Result<TrajectoryProfile> {
    let cap = budget.unwrap_or(DEFAULT_BUDGET);
    let n = a.dim();
    let m = to_i64_matrix(a)?;
    if horizon < 2 {
        return Err(Error::InvalidInput("horizon must be at least 2".into()));
    }
    if let Some(v) = f.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} in dimension {n}",
            v.len()
        )));
    }
    let mut set: Vec<Vec<i64>> = f.to_vec();
    set.push(vec![0; n]);
    set.sort();
    set.dedup();
    let base = set.clone();
    let mut sizes = vec![set.len() as u64];
    let overflow = || Error::InvalidInput("coordinate overflow in trajectory".into());
    while sizes.len() < horizon {
        let image: Vec<Vec<i64>> = set
            .par_iter()
            .map(|v| {
                m.iter()
                    .map(|row| {
                        row.iter().zip(v).try_fold(0i64, |acc, (&x, &y)| {
                            x.checked_mul(y).and_then(|p| acc.checked_add(p))
                        })
                    })
                    .collect::<Option<Vec<i64>>>()
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(overflow)?;
        let mut next: HashSet<Vec<i64>> = HashSet::with_capacity(image.len() * 2);
        for w in &image {
            for b in &base {
                let s = w
                    .iter()
                    .zip(b)
                    .map(|(x, y)| x.checked_add(*y))
                    .collect::<Option<Vec<i64>>>()
                    .ok_or_else(overflow)?;
                next.insert(s);
            }
            if next.len() > cap {
                return Err(Error::BudgetExceeded { cap });
            }
        }
        set = next.into_iter().collect();
        set.sort_unstable();
        sizes.push(set.len() as u64);
    }
    let slopes: Vec<f64> = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| (s as f64).ln() / (i + 1) as f64)
        .collect();
    let estimate = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TrajectoryProfile {
        sizes,
        slopes,
        estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClass {
    Polynomial,
    Exponential,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthClassification {
    pub class: GrowthClass,
    /// Entropy of `A` on the invariant subspace spanned by the trajectory of F.
    pub restricted_entropy: EntropyValue,
    pub profile: Option<TrajectoryProfile>,
}

/// Polynomial or exponential growth of `|Tₙ(A, F)|`, decided by the Mahler
/// measure of `A` on the span of `⋃ AⁱF`. The sumset profile is attached when
/// it fits in the budget.
pub fn classify_growth(
    a: &RatMatrix,
    f: &[Vec<i64>],
    horizon: usize,
    budget: Option<usize>,
) -> Result<GrowthClassification> {
    let n = a.dim();
    let mut vectors: Vec<RatVector> = f
        .iter()
        .map(|v| {
            v.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let mut basis = span_basis(&vectors, n);
    loop {
        let images: Vec<RatVector> = basis.iter().map(|v| a.apply(v)).collect();
        vectors = basis.iter().cloned().chain(images).collect();
        let next = span_basis(&vectors, n);
        if next.len() == basis.len() {
            break;
        }
        basis = next;
    }
    let restricted_entropy = if basis.is_empty() {
        EntropyValue::ExactZero
    } else {
        let r = restrict(a, &basis)?;
        mahler::mahler_measure(&primitive_char_poly(&r)?)?
    };
    let class = if restricted_entropy.is_zero() {
        GrowthClass::Polynomial
    } else {
        GrowthClass::Exponential
    };
    let profile = match trajectory_oracle(a, f, horizon, budget) {
        Ok(p) => Some(p),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(GrowthClassification {
        class,
        restricted_entropy,
        profile,
    })
}
