//! Exhaustive searches for small positive Mahler measures and for the
//! entropy values of small integer matrices.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_poly::{cyclotomic_factorization, IntPolynomial};
use crate::mahler::{mahler_measure_tol, EntropyValue};
use crate::root_solver::DEFAULT_TOL;

const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;
const DEFAULT_MATRIX_BUDGET: u64 = 2_000_000;
/// Measures whose interval reaches below this are never ranked.
const ZERO_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchSpec {
    pub max_degree: usize,
    pub max_height: i64,
    pub monic_only: bool,
    /// Do not rank polynomials with a cyclotomic factor.
    pub skip_cyclotomic: bool,
    pub top: usize,
    pub budget: Option<u64>,
}

impl SearchSpec {
    pub fn new(max_degree: usize, max_height: i64) -> Self {
        SearchSpec {
            max_degree,
            max_height,
            monic_only: true,
            skip_cyclotomic: false,
            top: 10,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardEntry {
    /// Ascending coefficients.
    pub coeffs: Vec<i64>,
    pub value: EntropyValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub leaderboard: Vec<LeaderboardEntry>,
    /// Representatives with measure exactly zero.
    pub zero_count: u64,
    /// Symmetry-class representatives whose measure was computed.
    pub scanned_count: u64,
    /// Raw polynomials enumerated before symmetry reduction.
    pub enumerated_count: u64,
    pub cyclotomic_skipped: u64,
    /// Polynomials whose measure could not be separated from zero or whose
    /// roots could not be certified.
    pub quarantined: Vec<Vec<i64>>,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The images of `f` under `t ↦ −t`, reversal and global sign, each
/// normalized to a positive leading coefficient.
fn symmetry_orbit(f: &[i64]) -> Vec<Vec<i64>> {
    let normalize = |mut v: Vec<i64>| {
        if v.last().is_some_and(|&x| x < 0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    };
    let neg_var = |v: &[i64]| -> Vec<i64> {
        v.iter()
            .enumerate()
            .map(|(i, &x)| if i % 2 == 1 { -x } else { x })
            .collect()
    };
    let rev = |v: &[i64]| -> Vec<i64> { v.iter().rev().copied().collect() };
    let a = f.to_vec();
    let b = neg_var(f);
    vec![
        normalize(rev(&a)),
        normalize(rev(&b)),
        normalize(a),
        normalize(b),
    ]
}

fn canonical_in_family(f: &[i64], monic_only: bool) -> Vec<i64> {
    symmetry_orbit(f)
        .into_iter()
        .filter(|g| !monic_only || g.last() == Some(&1))
        .min()
        .expect("f itself lies in the family")
}

/// Calls `visit` on every coefficient vector of the given degree with
/// `|cᵢ| ≤ h`, nonzero constant term and positive leading coefficient.
fn for_each_polynomial(degree: usize, h: i64, monic: bool, mut visit: impl FnMut(&[i64])) {
    let mut c = vec![-h; degree + 1];
    c[degree] = 1;
    loop {
        if c[0] != 0 {
            visit(&c);
        }
        let mut i = 0;
        loop {
            if i == degree {
                if monic || c[degree] == h {
                    return;
                }
                c[degree] += 1;
                for x in c.iter_mut().take(degree) {
                    *x = -h;
                }
                break;
            }
            if c[i] < h {
                c[i] += 1;
                break;
            }
            c[i] = -h;
            i += 1;
        }
    }
}

fn entry_cmp(a: &LeaderboardEntry, b: &LeaderboardEntry) -> Ordering {
    a.value
        .value()
        .total_cmp(&b.value.value())
        .then_with(|| a.coeffs.len().cmp(&b.coeffs.len()))
        .then_with(|| a.coeffs.cmp(&b.coeffs))
}

enum Outcome {
    Zero,
    Positive(EntropyValue),
    Skipped,
    Quarantine,
}

fn measure_candidate(c: &[i64], skip_cyclotomic: bool) -> Outcome {
    let f = IntPolynomial::from_i64(c);
    if skip_cyclotomic {
        let (factors, _) = cyclotomic_factorization(&f);
        if !factors.is_empty() {
            return Outcome::Skipped;
        }
    }
    for tol in [DEFAULT_TOL, 1e-20] {
        match mahler_measure_tol(&f, tol) {
            Ok(v) if v.is_zero() => return Outcome::Zero,
            Ok(v) if v.interval().0 > ZERO_GUARD => return Outcome::Positive(v),
            Ok(_) => continue,
            Err(e) if e.is_certification_failure() => continue,
            Err(_) => return Outcome::Quarantine,
        }
    }
    Outcome::Quarantine
}

/// Scans all primitive polynomials of degree `1..=max_degree` and height at
/// most `max_height` up to the symmetries `f(t) ↦ ±f(±t)` and reversal, and
/// returns the `top` smallest positive measures. The output does not depend
/// on the number of threads.
pub fn lehmer_search(spec: &SearchSpec) -> Result<SearchResult> {
    if spec.max_degree == 0 || spec.max_height < 1 {
        return Err(Error::InvalidInput(
            "degree and height must be at least 1".into(),
        ));
    }
    let cap = spec.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let width = (2 * spec.max_height + 1) as f64;
    let estimate: f64 = (1..=spec.max_degree)
        .map(|d| {
            width.powi(d as i32)
                * if spec.monic_only {
                    1.0
                } else {
                    spec.max_height as f64
                }
        })
        .sum();
    if estimate > cap as f64 {
        return Err(Error::BudgetExceeded { cap: cap as usize });
    }
    let mut reps: Vec<Vec<i64>> = Vec::new();
    let mut enumerated = 0u64;
    for d in 1..=spec.max_degree {
        for_each_polynomial(d, spec.max_height, spec.monic_only, |c| {
            enumerated += 1;
            if c.iter().fold(0, |g, &x| gcd(g, x)) != 1 {
                return;
            }
            if canonical_in_family(c, spec.monic_only) == c {
                reps.push(c.to_vec());
            }
        });
    }
    let outcomes: Vec<Outcome> = reps
        .par_iter()
        .map(|c| measure_candidate(c, spec.skip_cyclotomic))
        .collect();
    let mut result = SearchResult {
        leaderboard: Vec::new(),
        zero_count: 0,
        scanned_count: reps.len() as u64,
        enumerated_count: enumerated,
        cyclotomic_skipped: 0,
        quarantined: Vec::new(),
    };
    let mut positives = Vec::new();
    for (c, o) in reps.into_iter().zip(outcomes) {
        match o {
            Outcome::Zero => result.zero_count += 1,
            Outcome::Positive(value) => positives.push(LeaderboardEntry { coeffs: c, value }),
            Outcome::Skipped => result.cyclotomic_skipped += 1,
            Outcome::Quarantine => result.quarantined.push(c),
        }
    }
    positives.sort_by(entry_cmp);
    positives.truncate(spec.top);
    result.leaderboard = positives;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumValue {
    pub value: EntropyValue,
    /// Number of matrices attaining the value.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ESpectrum {
    pub dimension: usize,
    pub entry_bound: i64,
    pub matrices: u64,
    /// Distinct values in ascending order.
    pub values: Vec<SpectrumValue>,
    pub min_positive: Option<EntropyValue>,
}

/// Ascending coefficients of `det(tI − A)` for `n ≤ 3`.
fn int_char_poly(a: &[i64], n: usize) -> Vec<i64> {
    let e = |i: usize, j: usize| a[i * n + j];
    match n {
        1 => vec![-e(0, 0), 1],
        2 => vec![
            e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
            -(e(0, 0) + e(1, 1)),
            1,
        ],
        3 => {
            let tr = e(0, 0) + e(1, 1) + e(2, 2);
            let minors = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0) + e(0, 0) * e(2, 2)
                - e(0, 2) * e(2, 0)
                + e(1, 1) * e(2, 2)
                - e(1, 2) * e(2, 1);
            let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
            vec![-det, minors, -tr, 1]
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

/// `h_alg` of every integer `n×n` matrix with entries in `[−b, b]`.
pub fn espectrum_sample(n: usize, entry_bound: i64, budget: Option<u64>) -> Result<ESpectrum> {
    if !(1..=3).contains(&n) || entry_bound < 0 {
        return Err(Error::InvalidInput(
            "dimension must be 1, 2 or 3 and the entry bound non-negative".into(),
        ));
    }
    let cap = budget.unwrap_or(DEFAULT_MATRIX_BUDGET);
    let width = (2 * entry_bound + 1) as u64;
    let total = width
        .checked_pow((n * n) as u32)
        .filter(|&t| t <= cap)
        .ok_or(Error::BudgetExceeded { cap: cap as usize })?;
    let counts: HashMap<Vec<i64>, u64> = (0..total)
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<Vec<i64>, u64>, code| {
            let mut a = vec![0i64; n * n];
            let mut c = code;
            for x in a.iter_mut() {
                *x = (c % width) as i64 - entry_bound;
                c /= width;
            }
            *acc.entry(int_char_poly(&a, n)).or_default() += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let mut polys: Vec<(Vec<i64>, u64)> = counts.into_iter().collect();
    polys.sort();
    let measured: Vec<EntropyValue> = polys
        .par_iter()
        .map(|(c, _)| crate::mahler::mahler_measure(&IntPolynomial::from_i64(c)))
        .collect::<Result<_>>()?;
    let mut pairs: Vec<(EntropyValue, u64)> = measured
        .into_iter()
        .zip(polys.iter().map(|(_, k)| *k))
        .collect();
    pairs.sort_by(|a, b| a.0.value().total_cmp(&b.0.value()));
    let mut values: Vec<SpectrumValue> = Vec::new();
    for (v, k) in pairs {
        match values.last_mut() {
            Some(last) if same_value(&last.value, &v) => last.count += k,
            _ => values.push(SpectrumValue { value: v, count: k }),
        }
    }
    let min_positive = values
        .iter()
        .find(|v| !v.value.is_zero())
        .map(|v| v.value.clone());
    Ok(ESpectrum {
        dimension: n,
        entry_bound,
        matrices: total,
        values,
        min_positive,
    })
}

fn same_value(a: &EntropyValue, b: &EntropyValue) -> bool {
    match (a.is_exact(), b.is_exact()) {
        (true, true) => a == b,
        _ => a.agrees_with(b, 1e-9),
    }
}

/// Leaderboard as a map from coefficient vector to value, for comparisons.
pub fn leaderboard_map(result: &SearchResult) -> BTreeMap<Vec<i64>, f64> {
    result
        .leaderboard
        .iter()
        .map(|e| (e.coeffs.clone(), e.value.value()))
        .collect()
}
