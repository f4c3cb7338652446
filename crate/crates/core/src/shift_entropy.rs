//! Generalized shifts `σ_λ(f) = f ∘ λ` over a finite group `K`.
//!
//! The closed forms are `h_top(σ_λ) = 𝔥(λ) log|K|` on `K^X` and
//! `h_alg(σ_λ^⊕) = 𝔥*(λ) log|K|` on `K^(X)`. For `K = ℤ/p` the trajectory
//! subgroups are `𝔽_p`-subspaces, which gives exact brute-force oracles.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mahler::EntropyValue;
use crate::numeric::is_prime_u64;
use crate::set_entropy::{Point, SetEntropyValue, SymbolicSelfMap};

const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftVariant {
    /// σ_λ on the full product `K^X`.
    Product,
    /// σ_λ^⊕ on the finitely supported functions `K^(X)`.
    DirectSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedShiftSpec {
    pub map: SymbolicSelfMap,
    pub group_order: u64,
    pub variant: ShiftVariant,
}

impl GeneralizedShiftSpec {
    pub fn new(map: SymbolicSelfMap, group_order: u64, variant: ShiftVariant) -> Result<Self> {
        if group_order < 2 {
            return Err(Error::InvalidInput(format!(
                "group order must be at least 2, got {group_order}"
            )));
        }
        Ok(GeneralizedShiftSpec {
            map,
            group_order,
            variant,
        })
    }

    fn require(&self, variant: ShiftVariant) -> Result<()> {
        if self.variant != variant {
            return Err(Error::WrongDomain(format!(
                "operation needs the {variant:?} variant, got {:?}",
                self.variant
            )));
        }
        Ok(())
    }

    fn prime(&self) -> Result<u64> {
        if !is_prime_u64(self.group_order) {
            return Err(Error::InvalidInput(format!(
                "the brute-force oracle needs a prime group order, got {}",
                self.group_order
            )));
        }
        Ok(self.group_order)
    }
}

fn log_value(order: u64, h: SetEntropyValue) -> EntropyValue {
    match h {
        SetEntropyValue::Finite(k) => EntropyValue::log_int(order, k),
        SetEntropyValue::Infinite => EntropyValue::Infinite,
    }
}

pub fn shift_topological_entropy(spec: &GeneralizedShiftSpec) -> Result<EntropyValue> {
    spec.require(ShiftVariant::Product)?;
    Ok(log_value(spec.group_order, spec.map.covariant_entropy()))
}

pub fn shift_algebraic_entropy(spec: &GeneralizedShiftSpec) -> Result<EntropyValue> {
    spec.require(ShiftVariant::DirectSum)?;
    Ok(log_value(
        spec.group_order,
        spec.map.contravariant_entropy(),
    ))
}

/// Incremental row echelon form over `𝔽_p` on sparse vectors.
struct GfEchelon {
    p: u64,
    pivots: HashMap<usize, BTreeMap<usize, u64>>,
}

impl GfEchelon {
    fn new(p: u64) -> Self {
        GfEchelon {
            p,
            pivots: HashMap::new(),
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn inverse(&self, a: u64) -> u64 {
        let (mut base, mut exp, mut acc) = (a % self.p, self.p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }

    /// Inserts `v`; returns whether the rank grew.
    fn insert(&mut self, mut v: BTreeMap<usize, u64>) -> bool {
        let p = self.p;
        v.retain(|_, x| {
            *x %= p;
            *x != 0
        });
        while let Some((&lead, &val)) = v.iter().next() {
            match self.pivots.get(&lead) {
                Some(row) => {
                    for (&c, &x) in row {
                        let e = v.entry(c).or_insert(0);
                        *e = (*e + p - val * x % p) % p;
                        if *e == 0 {
                            v.remove(&c);
                        }
                    }
                }
                None => {
                    let inv = self.inverse(val);
                    for x in v.values_mut() {
                        *x = *x * inv % p;
                    }
                    self.pivots.insert(lead, v);
                    return true;
                }
            }
        }
        false
    }
}

/// Exact dimensions of `Tₙ = G_F + σ(G_F) + … + σⁿ⁻¹(G_F)` over `𝔽_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftOracleReport {
    pub prime: u64,
    /// `dim Tₙ` for `n = 1..=horizon`; `|Tₙ| = p^dim`.
    pub dims: Vec<usize>,
}

impl ShiftOracleReport {
    pub fn sizes(&self) -> Vec<BigUint> {
        self.dims
            .iter()
            .map(|&d| BigUint::from(self.prime).pow(d as u32))
            .collect()
    }

    /// The last dimension increment, i.e. the slope in units of `log p`.
    pub fn slope(&self) -> Option<usize> {
        let n = self.dims.len();
        (n >= 2).then(|| self.dims[n - 1] - self.dims[n - 2])
    }
}

/// Brute-force trajectory of the coordinate subgroup `G_F = K^F` under
/// `σ_λ^⊕`. Since `σ(1_A) = 1_{λ⁻¹(A)}`, `Tₙ` is spanned by the indicators
/// of `λ⁻ʲ(i)` for `i ∈ F`, `j < n`.
pub fn shift_bruteforce_oracle(
    spec: &GeneralizedShiftSpec,
    f: &[Point],
    horizon: usize,
    budget: Option<usize>,
) -> Result<ShiftOracleReport> {
    spec.require(ShiftVariant::DirectSum)?;
    let p = spec.prime()?;
    let cap = budget.unwrap_or(DEFAULT_BUDGET);
    let map = &spec.map;
    let mut coords: HashMap<Point, usize> = HashMap::new();
    let mut echelon = GfEchelon::new(p);
    let mut layers: Vec<Vec<Point>> = f.iter().map(|&i| vec![i]).collect();
    let mut dims = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        for layer in &layers {
            let mut v = BTreeMap::new();
            for q in layer {
                let next = coords.len();
                let c = *coords.entry(*q).or_insert(next);
                v.insert(c, 1);
            }
            if coords.len() > cap {
                return Err(Error::BudgetExceeded { cap });
            }
            echelon.insert(v);
        }
        dims.push(echelon.rank());
        let mut total = 0;
        for layer in layers.iter_mut() {
            *layer = layer.iter().flat_map(|q| map.preimages(q)).collect();
            total += layer.len();
        }
        if total > cap {
            return Err(Error::BudgetExceeded { cap });
        }
    }
    Ok(ShiftOracleReport { prime: p, dims })
}

/// `H⋆(σ_λ^⊕, N_F) = 𝔥(λ, F) · log|K|` for the coordinate subgroup
/// `N_F = {x : xᵢ = 0 for i ∈ F}`.
pub fn adjoint_entropy_of_shift(spec: &GeneralizedShiftSpec, f: &[Point]) -> Result<EntropyValue> {
    spec.require(ShiftVariant::DirectSum)?;
    if f.is_empty() {
        return Ok(EntropyValue::ExactZero);
    }
    let h = spec.map.covariant_entropy_at(f);
    Ok(EntropyValue::log_int(spec.group_order, h))
}

/// Index exponents `e_n` with `[K^(X) : Cₙ(σ, N_F)] = p^{e_n}`, computed as
/// the rank of the functionals `x ↦ (σʲx)ᵢ` (`i ∈ F`, `j < n`) evaluated on
/// the unit vectors of a window containing every forward image.
pub fn shift_cotrajectory_exponents(
    spec: &GeneralizedShiftSpec,
    f: &[Point],
    horizon: usize,
) -> Result<Vec<usize>> {
    spec.require(ShiftVariant::DirectSum)?;
    let p = spec.prime()?;
    let map = &spec.map;
    let mut window: Vec<Point> = Vec::new();
    for &i in f {
        let mut x = i;
        for _ in 0..horizon {
            window.push(x);
            x = map.image(&x);
        }
    }
    window.sort();
    window.dedup();
    // (σʲ e_y)(i) = [i ∈ λ⁻ʲ(y)]; only points of the window can lie
    // between F and y
    let backward: Vec<Vec<Vec<Point>>> = window
        .iter()
        .map(|y| {
            let mut layers = vec![vec![*y]];
            for _ in 1..horizon {
                let next = layers
                    .last()
                    .unwrap()
                    .iter()
                    .flat_map(|q| map.preimages(q))
                    .filter(|q| window.binary_search(q).is_ok())
                    .collect();
                layers.push(next);
            }
            layers
        })
        .collect();
    let mut echelon = GfEchelon::new(p);
    let mut out = Vec::with_capacity(horizon);
    for j in 0..horizon {
        for &i in f {
            let v: BTreeMap<usize, u64> = backward
                .iter()
                .enumerate()
                .filter(|(_, layers)| layers[j].contains(&i))
                .map(|(c, _)| (c, 1))
                .collect();
            echelon.insert(v);
        }
        out.push(echelon.rank());
    }
    Ok(out)
}
