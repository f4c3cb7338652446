//! Growth functions of finitely generated groups with computable normal
//! forms, and estimators for their growth rate and polynomial degree.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

const DEFAULT_BUDGET: usize = 20_000_000;

/// A group with an exact normal form. Elements are encoded as `Vec<i64>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupFamily {
    FreeAbelian(usize),
    Free(usize),
    /// Upper unitriangular 3×3 integer matrices `(a, b, c)`.
    Heisenberg3,
    DirectProduct(Vec<GroupFamily>),
}

/// Named symmetric generating sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorChoice {
    /// The free basis (or unit vectors) and their inverses.
    Standard,
    /// For free groups: additionally the product of the first two basis
    /// elements and its inverse.
    WithProduct,
}

impl FromStr for GeneratorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(GeneratorChoice::Standard),
            "with-product" | "with_product" => Ok(GeneratorChoice::WithProduct),
            other => Err(Error::InvalidInput(format!(
                "unknown generating set {other:?} (expected standard or with-product)"
            ))),
        }
    }
}

impl FromStr for GroupFamily {
    type Err = Error;

    /// `free:k`, `abelian:d`, `heisenberg`, or factors joined by `x`
    /// (e.g. `abelian:1xheisenberg`).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('x').filter(|p| !p.is_empty()).collect();
        if parts.len() > 1 {
            return parts
                .iter()
                .map(|p| p.parse())
                .collect::<Result<Vec<_>>>()
                .map(GroupFamily::DirectProduct);
        }
        let bad = || {
            Error::InvalidInput(format!(
                "unknown group family {s:?} (expected free:k, abelian:d, heisenberg or products joined by x)"
            ))
        };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<usize>().map_err(|_| bad())?)),
            None => (s, None),
        };
        match (name, arg) {
            ("free", Some(k)) if k >= 1 => Ok(GroupFamily::Free(k)),
            ("abelian" | "free_abelian" | "z", Some(d)) => Ok(GroupFamily::FreeAbelian(d)),
            ("heisenberg", None) => Ok(GroupFamily::Heisenberg3),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupFamily::FreeAbelian(d) => write!(f, "abelian:{d}"),
            GroupFamily::Free(k) => write!(f, "free:{k}"),
            GroupFamily::Heisenberg3 => write!(f, "heisenberg"),
            GroupFamily::DirectProduct(parts) => {
                let names: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "{}", names.join("x"))
            }
        }
    }
}

type Element = Vec<i64>;

impl GroupFamily {
    pub fn identity(&self) -> Element {
        match self {
            GroupFamily::FreeAbelian(d) => vec![0; *d],
            GroupFamily::Free(_) => Vec::new(),
            GroupFamily::Heisenberg3 => vec![0; 3],
            GroupFamily::DirectProduct(parts) => {
                encode_product(&parts.iter().map(GroupFamily::identity).collect::<Vec<_>>())
            }
        }
    }

    pub fn generators(&self, choice: GeneratorChoice) -> Result<Vec<Element>> {
        let gens = match (self, choice) {
            (GroupFamily::FreeAbelian(d), GeneratorChoice::Standard) => (0..*d)
                .flat_map(|i| {
                    [1, -1].map(|s| {
                        let mut v = vec![0; *d];
                        v[i] = s;
                        v
                    })
                })
                .collect(),
            (GroupFamily::Free(k), _) => {
                let mut g: Vec<Element> =
                    (1..=*k as i64).flat_map(|i| [vec![i], vec![-i]]).collect();
                if choice == GeneratorChoice::WithProduct {
                    if *k < 2 {
                        return Err(Error::InvalidInput(
                            "the product generator needs rank at least 2".into(),
                        ));
                    }
                    g.push(vec![1, 2]);
                    g.push(vec![-2, -1]);
                }
                g
            }
            (GroupFamily::Heisenberg3, GeneratorChoice::Standard) => {
                vec![vec![1, 0, 0], vec![-1, 0, 0], vec![0, 1, 0], vec![0, -1, 0]]
            }
            (GroupFamily::DirectProduct(parts), GeneratorChoice::Standard) => {
                let ids: Vec<Element> = parts.iter().map(GroupFamily::identity).collect();
                let mut out = Vec::new();
                for (i, p) in parts.iter().enumerate() {
                    for g in p.generators(GeneratorChoice::Standard)? {
                        let mut comps = ids.clone();
                        comps[i] = g;
                        out.push(encode_product(&comps));
                    }
                }
                out
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "generating set {choice:?} is only defined for free groups"
                )))
            }
        };
        Ok(gens)
    }

    pub fn mul(&self, g: &[i64], h: &[i64]) -> Element {
        match self {
            GroupFamily::FreeAbelian(_) => g.iter().zip(h).map(|(a, b)| a + b).collect(),
            GroupFamily::Free(_) => {
                let mut w = g.to_vec();
                for &x in h {
                    if w.last() == Some(&-x) {
                        w.pop();
                    } else {
                        w.push(x);
                    }
                }
                w
            }
            GroupFamily::Heisenberg3 => vec![g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]],
            GroupFamily::DirectProduct(parts) => {
                let (a, b) = (decode_product(g), decode_product(h));
                let comps: Vec<Element> = parts
                    .iter()
                    .zip(a.iter().zip(&b))
                    .map(|(p, (x, y))| p.mul(x, y))
                    .collect();
                encode_product(&comps)
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            GroupFamily::FreeAbelian(d) | GroupFamily::Free(d) => *d == 0,
            GroupFamily::Heisenberg3 => false,
            GroupFamily::DirectProduct(parts) => parts.iter().all(GroupFamily::is_finite),
        }
    }
}

fn encode_product(parts: &[Element]) -> Element {
    let mut out = Vec::new();
    for p in parts {
        out.push(p.len() as i64);
        out.extend_from_slice(p);
    }
    out
}

fn decode_product(e: &[i64]) -> Vec<Element> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < e.len() {
        let len = e[i] as usize;
        out.push(e[i + 1..i + 1 + len].to_vec());
        i += 1 + len;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthTable {
    /// `γ_S(0), …, γ_S(n)`.
    pub gamma: Vec<u64>,
    /// `log γ(n)/n` for `n ≥ 1`.
    pub rate_estimate: Vec<f64>,
    /// `log γ(n)/log n` for `n ≥ 2`.
    pub exponent_estimate: Vec<f64>,
}

impl GrowthTable {
    pub fn from_gamma(gamma: Vec<u64>) -> Self {
        let rate_estimate = (1..gamma.len())
            .map(|n| (gamma[n] as f64).ln() / n as f64)
            .collect();
        let exponent_estimate = (2..gamma.len())
            .map(|n| (gamma[n] as f64).ln() / (n as f64).ln())
            .collect();
        GrowthTable {
            gamma,
            rate_estimate,
            exponent_estimate,
        }
    }

    pub fn horizon(&self) -> usize {
        self.gamma.len().saturating_sub(1)
    }

    /// `γ(m+n) ≤ γ(m)·γ(n)` wherever both sides are tabulated.
    pub fn is_submultiplicative(&self) -> bool {
        let g = &self.gamma;
        (0..g.len())
            .all(|m| (0..g.len() - m).all(|n| g[m + n] as u128 <= g[m] as u128 * g[n] as u128))
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.gamma.windows(2).all(|w| w[0] < w[1])
    }
}

/// Ball sizes `γ_S(0..=horizon)` by breadth-first search over normal forms.
pub fn growth_table(
    family: &GroupFamily,
    choice: GeneratorChoice,
    horizon: usize,
    budget: Option<usize>,
) -> Result<GrowthTable> {
    if horizon < 1 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    let cap = budget.unwrap_or(DEFAULT_BUDGET);
    let gens = family.generators(choice)?;
    let mut seen: HashSet<Element> = HashSet::new();
    let id = family.identity();
    seen.insert(id.clone());
    let mut frontier = vec![id];
    let mut gamma = vec![1u64];
    for _ in 0..horizon {
        let candidates: Vec<Element> = frontier
            .par_iter()
            .flat_map_iter(|g| gens.iter().map(move |s| family.mul(g, s)))
            .collect();
        let mut next = Vec::new();
        for c in candidates {
            if !seen.contains(&c) {
                seen.insert(c.clone());
                next.push(c);
            }
        }
        if seen.len() > cap {
            return Err(Error::BudgetExceeded { cap });
        }
        gamma.push(seen.len() as u64);
        frontier = next;
    }
    Ok(GrowthTable::from_gamma(gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRate {
    /// `min_n log γ(n)/n`, an upper bound for λ_S.
    pub fekete: f64,
    /// `log γ(N) − log γ(N−1)`.
    pub last_slope: f64,
}

/// Estimates of `λ_S = lim log γ(n)/n`.
pub fn growth_rate(table: &GrowthTable) -> Result<GrowthRate> {
    let n = table.horizon();
    if n < 4 {
        return Err(Error::InvalidInput(
            "growth rate needs horizon at least 4".into(),
        ));
    }
    let fekete = table
        .rate_estimate
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let last_slope = (table.gamma[n] as f64).ln() - (table.gamma[n - 1] as f64).ln();
    Ok(GrowthRate { fekete, last_slope })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentEstimate {
    Finite { value: f64 },
    Infinite { slope: f64 },
}

impl ExponentEstimate {
    pub fn value(&self) -> f64 {
        match self {
            ExponentEstimate::Finite { value } => *value,
            ExponentEstimate::Infinite { .. } => f64::INFINITY,
        }
    }
}

fn loglog_slope(gamma: &[u64], lo: usize, hi: usize) -> f64 {
    ((gamma[hi] as f64).ln() - (gamma[lo] as f64).ln()) / ((hi as f64).ln() - (lo as f64).ln())
}

/// Degree estimate from the log-log slope between `n/2` and `n`. Growth is
/// flagged infinite when that slope keeps growing roughly linearly in `n`
/// (compared with the slope between `n/4` and `n/2`).
pub fn growth_exponent(table: &GrowthTable) -> Result<ExponentEstimate> {
    let n = table.horizon();
    if n < 8 {
        return Err(Error::InvalidInput(
            "growth exponent needs horizon at least 8".into(),
        ));
    }
    let g = &table.gamma;
    let s_hi = loglog_slope(g, n / 2, n);
    let s_lo = loglog_slope(g, n / 4, n / 2);
    // exponential growth doubles the slope when n doubles; polynomial
    // growth leaves it nearly constant
    if s_hi > 1.5 * s_lo && s_hi - s_lo > 1.0 {
        Ok(ExponentEstimate::Infinite { slope: s_hi })
    } else {
        Ok(ExponentEstimate::Finite { value: s_hi })
    }
}

/// `d = Σ_m m · r₀(G_m/G_{m+1})` with weights starting at `m = 1`.
pub fn bass_guivarch(ranks: &[u64]) -> Result<u64> {
    if ranks.is_empty() {
        return Err(Error::InvalidInput("rank list must be nonempty".into()));
    }
    Ok(ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| (i as u64 + 1) * r)
        .sum())
}

/// `1 + k·((2k−1)ⁿ − 1)/(k−1)` for the free group of rank `k ≥ 2` with its
/// standard generators.
pub fn free_group_ball(k: u64, n: u32) -> u64 {
    let q = 2 * k - 1;
    if k == 1 {
        return 2 * n as u64 + 1;
    }
    1 + k * (q.pow(n) - 1) / (k - 1)
}
