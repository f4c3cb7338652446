//! Adjoint algebraic entropy on ℤⁿ.
//!
//! For a finite-index lattice `N` and a nonsingular integer matrix `A` the
//! cotrajectories are `C₁ = N` and `Cₙ₊₁ = N ∩ A⁻¹(Cₙ)`. They all contain
//! `e·ℤⁿ` where `e` is the exponent of `ℤⁿ/N`, so the indices are bounded and
//! `H⋆(A, N) = 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lattice_intersect, lattice_preimage, Lattice, RatMatrix};
use crate::mahler::EntropyValue;
use crate::numeric::ser_bigint_vec;

#[derive(Debug, Clone, Serialize)]
pub struct CotrajectoryReport {
    /// `[ℤⁿ : Cₙ]` for `n = 1..=horizon`.
    #[serde(serialize_with = "ser_bigint_vec")]
    pub indices: Vec<BigInt>,
    /// `αₙ = [Cₙ : Cₙ₊₁]` for `n = 1..=horizon`.
    #[serde(serialize_with = "ser_bigint_vec")]
    pub alphas: Vec<BigInt>,
    /// First `n` with `Cₙ₊₁ = Cₙ`, after which every `αₙ` is 1.
    pub stationary_at: Option<usize>,
    /// Whether every computed `Cₙ` contains `e·ℤⁿ`.
    pub certificate: bool,
    #[serde(serialize_with = "crate::numeric::ser_bigint")]
    pub exponent: BigInt,
    pub value: EntropyValue,
}

impl CotrajectoryReport {
    /// `αₙ₊₁ | αₙ` for every reported step.
    pub fn alphas_divide(&self) -> bool {
        self.alphas
            .windows(2)
            .all(|w| !w[1].is_zero() && (&w[0] % &w[1]).is_zero())
    }
}

/// Cotrajectory lattices `C₁, …, C_count`.
pub fn cotrajectories(a: &RatMatrix, n: &Lattice, count: usize) -> Result<Vec<Lattice>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    out.push(n.clone());
    while out.len() < count {
        let pre = lattice_preimage(a, out.last().unwrap())?;
        out.push(lattice_intersect(n, &pre)?);
    }
    Ok(out)
}

/// Computes `Cₙ(A, N)` until `Cₙ₊₁ = Cₙ`, which must happen within
/// `n·log₂ e + 1` strict drops, and reports the first `horizon` steps.
pub fn adjoint_entropy_at(
    a: &RatMatrix,
    n: &Lattice,
    horizon: usize,
) -> Result<CotrajectoryReport> {
    if a.dim() != n.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map of dimension {} on a lattice in dimension {}",
            a.dim(),
            n.dim()
        )));
    }
    let exponent = n.exponent();
    let floor = Lattice::scaled(n.dim(), &exponent);
    let max_drops = n.dim() * exponent.bits() as usize + 1;
    let mut chain = vec![n.clone()];
    let mut certificate = n.contains_lattice(&floor);
    let mut stationary_at = None;
    while chain.len() <= horizon || stationary_at.is_none() {
        let last = chain.last().unwrap();
        let next = lattice_intersect(n, &lattice_preimage(a, last)?)?;
        certificate &= next.contains_lattice(&floor);
        if stationary_at.is_none() && &next == last {
            stationary_at = Some(chain.len());
        }
        chain.push(next);
        if stationary_at.is_none() && chain.len() > max_drops + 1 {
            return Err(Error::NoConvergence {
                max_iterations: max_drops,
            });
        }
    }
    let idx: Vec<BigInt> = chain.iter().map(Lattice::index).collect();
    let alphas: Vec<BigInt> = idx
        .windows(2)
        .take(horizon)
        .map(|w| &w[1] / &w[0])
        .collect();
    let indices: Vec<BigInt> = idx.into_iter().take(horizon).collect();
    Ok(CotrajectoryReport {
        indices,
        alphas,
        stationary_at,
        certificate,
        exponent,
        value: EntropyValue::ExactZero,
    })
}

/// All lattices of index at most `max_index` in ℤⁿ, in lexicographic order
/// of their HNF (diagonal first, then the entries above it).
pub fn hnf_lattices(dim: usize, max_index: u64) -> Vec<Lattice> {
    let mut diagonals = Vec::new();
    let mut current = Vec::with_capacity(dim);
    fn diag(dim: usize, budget: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if current.len() == dim {
            out.push(current.clone());
            return;
        }
        for d in 1..=budget {
            current.push(d);
            diag(dim, budget / d, current, out);
            current.pop();
        }
    }
    diag(dim, max_index, &mut current, &mut diagonals);
    let mut out = Vec::new();
    for d in diagonals {
        // free entries: (i, j) with i < j, value in 0..d[i]
        let slots: Vec<(usize, usize)> =
            (0..dim).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        let mut values = vec![0u64; slots.len()];
        loop {
            let mut cols: Vec<Vec<BigInt>> = (0..dim)
                .map(|j| {
                    (0..dim)
                        .map(|i| {
                            if i == j {
                                BigInt::from(d[i])
                            } else {
                                BigInt::zero()
                            }
                        })
                        .collect()
                })
                .collect();
            for (&(i, j), &v) in slots.iter().zip(&values) {
                cols[j][i] = BigInt::from(v);
            }
            out.push(Lattice::from_columns(dim, &cols).expect("diagonal entries are positive"));
            let mut k = slots.len();
            let advanced = loop {
                if k == 0 {
                    break false;
                }
                k -= 1;
                values[k] += 1;
                if values[k] < d[slots[k].0] {
                    break true;
                }
                values[k] = 0;
            };
            if !advanced {
                break;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    AllZero {
        lattices: usize,
        max_stationary_at: usize,
    },
    InfinityWitness {
        lattice: Lattice,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    #[serde(flatten)]
    pub outcome: ProbeOutcome,
    /// Every probe carried the `e·ℤⁿ` containment certificate.
    pub certified: bool,
    /// `αₙ₊₁ | αₙ` held on every probe.
    pub divisibility: bool,
}

/// Runs [`adjoint_entropy_at`] on every lattice of index at most
/// `max_index`. On ℤⁿ the outcome is always `AllZero`.
pub fn dichotomy_probe(
    a: &RatMatrix,
    max_index: u64,
    budget: Option<usize>,
) -> Result<ProbeReport> {
    let lattices = hnf_lattices(a.dim(), max_index);
    if let Some(cap) = budget {
        if lattices.len() > cap {
            return Err(Error::BudgetExceeded { cap });
        }
    }
    // a horizon past the last possible drop makes every α visible
    let reports: Vec<CotrajectoryReport> = lattices
        .par_iter()
        .map(|l| adjoint_entropy_at(a, l, a.dim() * l.exponent().bits() as usize + 2))
        .collect::<Result<_>>()?;
    if let Some((l, _)) = lattices
        .iter()
        .zip(&reports)
        .find(|(_, r)| !r.value.is_zero())
    {
        return Ok(ProbeReport {
            outcome: ProbeOutcome::InfinityWitness { lattice: l.clone() },
            certified: false,
            divisibility: false,
        });
    }
    let max_stationary_at = reports
        .iter()
        .filter_map(|r| r.stationary_at)
        .max()
        .unwrap_or(1);
    Ok(ProbeReport {
        outcome: ProbeOutcome::AllZero {
            lattices: lattices.len(),
            max_stationary_at,
        },
        certified: reports.iter().all(|r| r.certificate),
        divisibility: reports.iter().all(CotrajectoryReport::alphas_divide),
    })
}

/// Brute-force `[ℤⁿ : Cₙ]` by counting residues modulo `m` (a multiple of
/// the exponent of `ℤⁿ/N`): `v ∈ Cₙ` iff `Aʲv ∈ N` for `j < n`.
pub fn cotrajectory_index_by_enumeration(
    a: &[Vec<i64>],
    n: &Lattice,
    steps: usize,
    modulus: u64,
) -> Result<u64> {
    let dim = n.dim();
    let total = modulus
        .checked_pow(dim as u32)
        .filter(|&t| t <= 1 << 22)
        .ok_or(Error::BudgetExceeded { cap: 1 << 22 })?;
    let m = BigInt::from(modulus);
    let mut inside = 0u64;
    for code in 0..total {
        let mut v: Vec<BigInt> = (0..dim)
            .map(|k| BigInt::from((code / modulus.pow(k as u32)) % modulus))
            .collect();
        let mut ok = true;
        for _ in 0..steps {
            if !n.contains(&v) {
                ok = false;
                break;
            }
            v = a
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&v)
                        .map(|(&x, y)| BigInt::from(x) * y)
                        .sum::<BigInt>()
                        .mod_floor(&m)
                })
                .collect();
        }
        if ok {
            inside += 1;
        }
    }
    Ok(total / inside)
}
