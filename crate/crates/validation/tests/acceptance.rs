use std::time::{Duration, Instant};

use entropy_core::adjoint::{adjoint_entropy_at, hnf_lattices};
use entropy_core::exact_poly::{cyclotomic, is_zero_mahler};
use entropy_core::growth::{
    bass_guivarch, growth_exponent, growth_rate, growth_table, GeneratorChoice, GroupFamily,
};
use entropy_core::linalg::{inverse_rat, RatMatrix};
use entropy_core::linear_entropy::{algebraic_entropy, trajectory_oracle, LinearFlow};
use entropy_core::mahler::mahler_measure;
use entropy_core::set_entropy::{catalog, Point, SetEntropyValue, SymbolicSelfMap};
use entropy_core::shift_entropy::{
    adjoint_entropy_of_shift, shift_algebraic_entropy, shift_bruteforce_oracle,
    shift_cotrajectory_exponents, GeneralizedShiftSpec, ShiftVariant,
};
use entropy_core::spectrum::{lehmer_search, SearchResult, SearchSpec};
use entropy_core::{EntropyValue, IntPolynomial};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEHMER: [i64; 11] = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1];
const LEHMER_MEASURE: f64 = 0.162_357_612_007_738_2;
const LEHMER_TOL: f64 = 1e-9;
const FIB_TOL: f64 = 1e-10;
const FEKETE_RANGE: (f64, f64) = (0.38, 0.50);
const GROWTH_RATE_TOL: f64 = 0.01;
const EXPONENT_TOL: f64 = 0.5;
const SEED: u64 = 0x5eed_e77e;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn golden_log() -> f64 {
    ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

fn lehmer_value() -> Outcome {
    let start = Instant::now();
    let m = mahler_measure(&IntPolynomial::from_i64(&LEHMER)).unwrap();
    let t = start.elapsed();
    let pass = m.error() <= LEHMER_TOL
        && (m.value() - LEHMER_MEASURE).abs() <= LEHMER_TOL
        && within(t, Duration::from_secs(1));
    outcome(
        pass,
        format!(
            "m = {:.12} ± {:.1e}, {:.1} ms (< 1 s)",
            m.value(),
            m.error(),
            t.as_secs_f64() * 1e3
        ),
    )
}

fn cyclotomic_exactness() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for a in 1..=20u64 {
        for b in a..=21 {
            for c in b..=21 {
                // index 21 stands for "no factor"
                let f = [a, b, c]
                    .iter()
                    .filter(|&&m| m <= 20)
                    .fold(IntPolynomial::from_i64(&[1]), |acc, &m| {
                        &acc * &cyclotomic(m)
                    });
                checked += 1;
                let exact = is_zero_mahler(&f).unwrap()
                    && mahler_measure(&f).unwrap() == EntropyValue::ExactZero;
                if !exact {
                    bad.push((a, b, c));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} products, {} not ExactZero", bad.len()),
    )
}

fn yuzvinski_pipeline() -> Outcome {
    let start = Instant::now();
    let fib = RatMatrix::from_i64(&[vec![0, 1], vec![1, 1]]);
    let h = algebraic_entropy(&LinearFlow::zn(fib.clone()).unwrap()).unwrap();
    let h_ok = (h.value() - golden_log()).abs() <= FIB_TOL && h.error() <= FIB_TOL;
    let profile = trajectory_oracle(&fib, &[vec![1, 0], vec![0, 1]], 18, None).unwrap();
    let t = start.elapsed();
    let fekete_ok = (FEKETE_RANGE.0..=FEKETE_RANGE.1).contains(&profile.estimate);
    let sub = profile.is_subadditive();
    let pass = h_ok && fekete_ok && sub && within(t, Duration::from_secs(30));
    outcome(
        pass,
        format!(
            "h_alg = {:.12} (log φ = {:.12}), Fekete estimate = {:.4} (want [{}, {}]), last increment = {:.4}, |T_18| = {}, subadditive = {sub}, {:.2} s (< 30 s)",
            h.value(),
            golden_log(),
            profile.estimate,
            FEKETE_RANGE.0,
            FEKETE_RANGE.1,
            profile.last_increment().unwrap(),
            profile.sizes.last().unwrap(),
            t.as_secs_f64()
        ),
    )
}

fn random_poly(rng: &mut ChaCha8Rng) -> IntPolynomial {
    loop {
        let d = rng.gen_range(1..=6);
        let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-3..=3)).collect();
        while c[d] == 0 {
            c[d] = rng.gen_range(-3..=3);
        }
        let f = IntPolynomial::from_i64(&c);
        if f.degree() >= 1 {
            return f;
        }
    }
}

fn random_square(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect()
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> RatMatrix {
    let mut rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    for _ in 0..4 {
        let (i, j, k) = (
            rng.gen_range(0..n),
            rng.gen_range(0..n),
            rng.gen_range(-2..=2i64),
        );
        if i != j {
            for c in 0..n {
                rows[i][c] += k * rows[j][c];
            }
        }
    }
    RatMatrix::from_i64(&rows)
}

fn agree(a: &EntropyValue, b: &EntropyValue) -> bool {
    a.agrees_with(b, a.error() + b.error() + 1e-12)
}

fn log_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut poly_fail = 0;
    for _ in 0..200 {
        let (f, g) = (random_poly(&mut rng), random_poly(&mut rng));
        let (mf, mg) = (mahler_measure(&f).unwrap(), mahler_measure(&g).unwrap());
        let mfg = mahler_measure(&(&f * &g)).unwrap();
        let msq = mahler_measure(&f.compose_power(2)).unwrap();
        if !agree(&mfg, &mf.add(&mg)) || !agree(&msq, &mf) {
            poly_fail += 1;
        }
    }
    let mut mat_fail = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let a = RatMatrix::from_i64(&random_square(&mut rng, n, 3));
        let p = random_unimodular(&mut rng, n);
        let conj = p.mul(&a).mul(&inverse_rat(&p).unwrap());
        let h = |m: &RatMatrix| algebraic_entropy(&LinearFlow::qn(m.clone())).unwrap();
        let base = h(&a);
        let two = base.scale(&BigInt::from(2).into());
        if !agree(&h(&a.pow(2)), &two) || !agree(&h(&conj), &base) {
            mat_fail += 1;
        }
    }
    outcome(
        poly_fail == 0 && mat_fail == 0,
        format!(
            "seed {SEED:#x}: polynomial failures {poly_fail}/200, matrix failures {mat_fail}/100"
        ),
    )
}

fn increments(sizes: &[u64]) -> Vec<u64> {
    sizes.windows(2).map(|w| w[1] - w[0]).collect()
}

fn set_catalog() -> Outcome {
    let start = Instant::now();
    let fin = SetEntropyValue::Finite;
    let (rho, sigma) = (catalog::right_shift(), catalog::left_shift());
    let mut ok = rho.covariant_entropy() == fin(1)
        && sigma.covariant_entropy() == fin(0)
        && sigma.contravariant_entropy() == fin(1)
        && rho.contravariant_entropy() == fin(0);
    for k in 1..=4u64 {
        ok &= rho.power_map(k as usize).unwrap().covariant_entropy() == fin(k);
        ok &= sigma.power_map(k as usize).unwrap().contravariant_entropy() == fin(k);
    }
    let depth = 8;
    let fan = catalog::fan(depth);
    let fan_value = fan.contravariant_entropy();
    let root = Point::Core(fan.core_index("n0").unwrap());
    let full = increments(
        &fan.full_cotrajectory_sizes(&[root], depth + 1, None)
            .unwrap(),
    );
    let diverges = full.windows(2).all(|w| w[1] > w[0]);
    let t = start.elapsed();
    let pass = ok && fan_value == fin(1) && diverges && within(t, Duration::from_secs(1));
    outcome(
        pass,
        format!(
            "catalog values and powers k ≤ 4 exact = {ok}, fan 𝔥* = {fan_value:?}, full-preimage increments {full:?}, {:.1} ms (< 1 s)",
            t.as_secs_f64() * 1e3
        ),
    )
}

fn probe_points(m: &SymbolicSelfMap) -> Vec<Vec<Point>> {
    let core: Vec<Point> = (0..m.core_len()).map(Point::Core).collect();
    let mut sets = vec![core.clone()];
    for ray in 0..m.out_rays().len() {
        sets.push(vec![Point::Ray { ray, pos: 0 }]);
    }
    for string in 0..m.in_strings().len() {
        sets.push(vec![Point::Str { string, pos: 1 }]);
    }
    let mut all = core;
    all.extend(sets.iter().skip(1).flatten().copied());
    sets.push(all);
    sets
}

fn shift_bridge() -> Outcome {
    let mut maps = 0;
    let mut bad = Vec::new();
    for (name, m) in catalog::all()
        .into_iter()
        .filter(|(_, m)| m.core_len() <= 6)
    {
        maps += 1;
        for p in [2u64, 3] {
            let s = GeneralizedShiftSpec::new(m.clone(), p, ShiftVariant::DirectSum).unwrap();
            let value = shift_algebraic_entropy(&s).unwrap();
            let slope_ok = match m.contravariant_entropy() {
                SetEntropyValue::Finite(v) => {
                    let heads: Vec<Point> = (0..m.in_strings().len())
                        .map(|string| Point::Str { string, pos: 0 })
                        .collect();
                    let r = shift_bruteforce_oracle(&s, &heads, 8, None).unwrap();
                    let slope = if v == 0 {
                        r.slope().map(|_| 0)
                    } else {
                        r.slope()
                    };
                    slope == Some(v as usize) && value == EntropyValue::log_int(p, v)
                }
                SetEntropyValue::Infinite => {
                    let b = m.in_trees()[0].branching;
                    let level: Vec<Point> = (0..b * b)
                        .map(|index| Point::Tree {
                            tree: 0,
                            level: 2,
                            index,
                        })
                        .collect();
                    let r = shift_bruteforce_oracle(&s, &level, 4, None).unwrap();
                    value.is_infinite() && r.slope() == Some(level.len())
                }
            };
            let adjoint_ok = probe_points(&m).iter().all(|f| {
                let h = m.covariant_entropy_at(f);
                let exps = shift_cotrajectory_exponents(&s, f, 30).unwrap();
                adjoint_entropy_of_shift(&s, f).unwrap() == EntropyValue::log_int(p, h)
                    && exps[29] - exps[28] == h as usize
            });
            if !(slope_ok && adjoint_ok) {
                bad.push(format!("{name}/Z{p}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{maps} catalog maps × p ∈ {{2, 3}}, mismatches {bad:?}"),
    )
}

fn adjoint_stationarity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let lattices: Vec<_> = (1..=3).map(|d| hnf_lattices(d, 8)).collect();
    let (mut matrices, mut runs, mut failures) = (0, 0, 0);
    while matrices < 50 {
        let n = rng.gen_range(1..=3);
        let a = RatMatrix::from_i64(&random_square(&mut rng, n, 3));
        if a.det().is_zero() {
            continue;
        }
        matrices += 1;
        for l in &lattices[n - 1] {
            let r = adjoint_entropy_at(&a, l, 32).unwrap();
            runs += 1;
            if !(r.alphas_divide() && r.certificate && r.value == EntropyValue::ExactZero) {
                failures += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        failures == 0 && within(t, Duration::from_secs(60)),
        format!(
            "{matrices} matrices, {runs} lattice runs, {failures} failures, {:.2} s (< 60 s)",
            t.as_secs_f64()
        ),
    )
}

fn growth() -> Outcome {
    let start = Instant::now();
    let free = growth_table(&GroupFamily::Free(2), GeneratorChoice::Standard, 12, None).unwrap();
    let free_ok = (0..=8u32).all(|n| free.gamma[n as usize] == 1 + 2 * (3u64.pow(n) - 1));
    let rate = growth_rate(&free).unwrap().last_slope;
    let plane = growth_table(
        &GroupFamily::FreeAbelian(2),
        GeneratorChoice::Standard,
        40,
        None,
    )
    .unwrap();
    let plane_ok = (0..=40u64).all(|n| plane.gamma[n as usize] == 2 * n * n + 2 * n + 1);
    let heis = growth_table(
        &GroupFamily::Heisenberg3,
        GeneratorChoice::Standard,
        25,
        None,
    )
    .unwrap();
    let exponent = growth_exponent(&heis).unwrap().value();
    let expected = bass_guivarch(&[2, 1]).unwrap() as f64;
    let t = start.elapsed();
    let pass = free_ok
        && (rate - 3f64.ln()).abs() <= GROWTH_RATE_TOL
        && plane_ok
        && (exponent - expected).abs() <= EXPONENT_TOL
        && within(t, Duration::from_secs(120));
    outcome(
        pass,
        format!(
            "Free(2) balls exact = {free_ok}, λ_S(12) = {rate:.4} (log 3 = {:.4}), Z² balls exact = {plane_ok}, Heisenberg δ(25) = {exponent:.4} (Bass–Guivarch {expected}), {:.2} s (< 120 s)",
            3f64.ln(),
            t.as_secs_f64()
        ),
    )
}

fn search_on(threads: usize) -> SearchResult {
    let spec = SearchSpec::new(10, 1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| lehmer_search(&spec))
        .unwrap()
}

/// `f(t)`, `f(−t)`, their reversals and negatives: the search keeps one of these.
fn symmetry_class(c: &[i64]) -> Vec<Vec<i64>> {
    let alt: Vec<i64> = c
        .iter()
        .enumerate()
        .map(|(i, &x)| if i % 2 == 0 { x } else { -x })
        .collect();
    let mut out = Vec::new();
    for f in [c.to_vec(), alt] {
        let rev: Vec<i64> = f.iter().rev().copied().collect();
        for g in [f, rev] {
            out.push(g.iter().map(|x| -x).collect());
            out.push(g);
        }
    }
    out
}

fn lehmer_search_check() -> Outcome {
    let start = Instant::now();
    let eight = search_on(8);
    let t = start.elapsed();
    let one = search_on(1);
    let four = search_on(4);
    let first = &eight.leaderboard[0];
    let is_lehmer = symmetry_class(&LEHMER).contains(&first.coeffs);
    let identical = one == eight && four == eight;
    let pass = is_lehmer && identical && within(t, Duration::from_secs(600));
    outcome(
        pass,
        format!(
            "first = {:?} at {:.12}, scanned {}, identical across 1/4/8 threads = {identical}, {:.2} s on 8 threads (< 600 s)",
            first.coeffs,
            first.value.value(),
            eight.scanned_count,
            t.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Lehmer value", lehmer_value),
        ("cyclotomic exactness", cyclotomic_exactness),
        ("Yuzvinski pipeline", yuzvinski_pipeline),
        ("multiplicativity and log laws", log_laws),
        ("set-theoretic catalog", set_catalog),
        ("generalized-shift bridge", shift_bridge),
        ("adjoint stationarity", adjoint_stationarity),
        ("growth", growth),
        ("Lehmer search", lehmer_search_check),
    ];
    let mut passed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        passed.push(o.pass);
    }
    // criterion 10 is a scope statement; its stand-ins are criteria 4–7
    let covered = passed[3..7].iter().all(|&p| p);
    println!(
        "criterion 10: {} out of desk scale: degree ≥ 55 frontier, Gromov's theorem, intermediate growth, infinite-dimensional dichotomies; stand-in suites 4–7 pass = {covered}",
        if covered { "PASS" } else { "FAIL" }
    );
    passed.push(covered);
    let failed = passed.iter().filter(|&&p| !p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        passed.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
