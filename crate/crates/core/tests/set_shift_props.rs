use std::collections::BTreeSet;

use entropy_core::set_entropy::{catalog, MapSpec, Point, SetEntropyValue, SymbolicSelfMap};
use entropy_core::shift_entropy::{
    adjoint_entropy_of_shift, shift_algebraic_entropy, shift_bruteforce_oracle,
    shift_cotrajectory_exponents, shift_topological_entropy, GeneralizedShiftSpec, ShiftVariant,
};
use entropy_core::EntropyValue;
use proptest::prelude::*;

type Raw = (usize, usize, Vec<usize>, Vec<usize>, Vec<(usize, u64)>);

fn build(raw: Raw) -> Option<SymbolicSelfMap> {
    let (n, r, targets, strings, trees) = raw;
    let mut spec = MapSpec::default();
    for (i, t) in targets.iter().take(n).enumerate() {
        let t = t % (n + r);
        let target = if t < n {
            format!("c{t}")
        } else {
            format!("ray:R{}", t - n)
        };
        spec = spec.node(&format!("c{i}"), &target);
    }
    for j in 0..r {
        spec = spec.ray(&format!("R{j}"));
    }
    for (k, s) in strings.iter().enumerate() {
        spec = spec.string(&format!("S{k}"), &format!("c{}", s % n));
    }
    for (k, (t, b)) in trees.iter().enumerate() {
        spec = spec.tree(&format!("T{k}"), &format!("c{}", t % n), *b);
    }
    SymbolicSelfMap::from_spec(&spec).ok()
}

/// Maps with at most six core nodes, two rays, three strings and one tree.
fn random_map() -> impl Strategy<Value = SymbolicSelfMap> {
    (
        1usize..=6,
        0usize..=2,
        prop::collection::vec(0usize..64, 6),
        prop::collection::vec(0usize..64, 0..=3),
        prop::collection::vec((0usize..64, 2u64..=3), 0..=1),
    )
        .prop_filter_map("valid presentation", build)
}

fn small_points(m: &SymbolicSelfMap) -> Vec<Point> {
    let mut pts: Vec<Point> = (0..m.core_len()).map(Point::Core).collect();
    for ray in 0..m.out_rays().len() {
        pts.extend((0..3).map(|pos| Point::Ray { ray, pos }));
    }
    for string in 0..m.in_strings().len() {
        pts.extend((0..3).map(|pos| Point::Str { string, pos }));
    }
    for (tree, t) in m.in_trees().iter().enumerate() {
        pts.extend((0..t.branching).map(|index| Point::Tree {
            tree,
            level: 1,
            index,
        }));
    }
    pts
}

fn pick(pts: &[Point], mask: &[bool]) -> Vec<Point> {
    pts.iter()
        .zip(mask.iter().cycle())
        .filter(|(_, &b)| b)
        .map(|(p, _)| *p)
        .collect()
}

/// `|D ∪ λ(D) ∪ … ∪ λⁿ⁻¹(D)|` by walking images.
fn forward_sizes(m: &SymbolicSelfMap, d: &[Point], horizon: usize) -> Vec<u64> {
    let mut seen = BTreeSet::new();
    let mut cur = d.to_vec();
    (0..horizon)
        .map(|_| {
            seen.extend(cur.iter().copied());
            cur = cur.iter().map(|p| m.image(p)).collect();
            seen.len() as u64
        })
        .collect()
}

/// `|⋃_{i<n} λ⁻ⁱ(E) ∩ sc|` by walking preimages.
fn backward_sizes(m: &SymbolicSelfMap, e: &[Point], horizon: usize) -> Vec<u64> {
    let mut seen = BTreeSet::new();
    let mut layer: Vec<Point> = e.to_vec();
    (0..horizon)
        .map(|_| {
            seen.extend(layer.iter().copied());
            layer = layer
                .iter()
                .flat_map(|p| m.preimages(p))
                .filter(|q| m.in_surjective_core(q))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            seen.len() as u64
        })
        .collect()
}

fn increments(sizes: &[u64]) -> Vec<u64> {
    sizes.windows(2).map(|w| w[1] - w[0]).collect()
}

fn times(k: u64, v: SetEntropyValue) -> SetEntropyValue {
    match v {
        SetEntropyValue::Finite(x) => SetEntropyValue::Finite(k * x),
        SetEntropyValue::Infinite => SetEntropyValue::Infinite,
    }
}

fn plus(a: SetEntropyValue, b: SetEntropyValue) -> SetEntropyValue {
    match (a, b) {
        (SetEntropyValue::Finite(x), SetEntropyValue::Finite(y)) => SetEntropyValue::Finite(x + y),
        _ => SetEntropyValue::Infinite,
    }
}

fn is_antichain(m: &SymbolicSelfMap, e: &[Point]) -> bool {
    e.iter().all(|p| {
        let mut q = *p;
        (0..64).all(|_| {
            q = m.image(&q);
            !e.contains(&q)
        })
    })
}

fn string_heads(m: &SymbolicSelfMap) -> Vec<Point> {
    (0..m.in_strings().len())
        .map(|string| Point::Str { string, pos: 0 })
        .collect()
}

fn shift(m: &SymbolicSelfMap, order: u64, variant: ShiftVariant) -> GeneralizedShiftSpec {
    GeneralizedShiftSpec::new(m.clone(), order, variant).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn zero_covariant_entropy_iff_no_wandering(m in random_map()) {
        let wan = m.qper_wan_partition().wan;
        prop_assert_eq!(wan.is_empty(), m.covariant_entropy() == SetEntropyValue::Finite(0));
    }

    #[test]
    fn addition_over_disjoint_union(m1 in random_map(), m2 in random_map()) {
        let u = catalog::disjoint_union(&[("a", &m1), ("b", &m2)]).unwrap();
        prop_assert_eq!(u.covariant_entropy(), plus(m1.covariant_entropy(), m2.covariant_entropy()));
        prop_assert_eq!(
            u.contravariant_entropy(),
            plus(m1.contravariant_entropy(), m2.contravariant_entropy())
        );
    }

    #[test]
    fn logarithmic_laws(m in random_map(), k in 2usize..=3) {
        let p = m.power_map(k).unwrap();
        prop_assert_eq!(p.covariant_entropy(), times(k as u64, m.covariant_entropy()));
        prop_assert_eq!(p.contravariant_entropy(), times(k as u64, m.contravariant_entropy()));
    }

    #[test]
    fn covariant_entropy_matches_forward_walk(m in random_map(), mask in prop::collection::vec(any::<bool>(), 1..8)) {
        let d = pick(&small_points(&m), &mask);
        prop_assume!(!d.is_empty());
        let value = m.covariant_entropy_at(&d);
        prop_assert!(value <= d.len() as u64);
        let sizes = forward_sizes(&m, &d, 40);
        prop_assert_eq!(*increments(&sizes).last().unwrap(), value);
        let profile = m.covariant_trajectory_profile(&d, 40).unwrap();
        prop_assert_eq!(profile.sizes, sizes);
        prop_assert_eq!(profile.value, value);
    }

    #[test]
    fn cotrajectory_matches_backward_walk(m in random_map(), mask in prop::collection::vec(any::<bool>(), 1..8)) {
        let e: Vec<Point> = pick(&small_points(&m), &mask)
            .into_iter()
            .filter(|p| m.in_surjective_core(p))
            .collect();
        prop_assume!(!e.is_empty());
        let horizon = 8;
        let profile = m.cotrajectory_profile(&e, horizon, None).unwrap();
        let sizes = backward_sizes(&m, &e, horizon);
        prop_assert_eq!(&profile.sizes, &sizes);
        let inc = increments(&sizes);
        match profile.value {
            SetEntropyValue::Finite(v) => prop_assert_eq!(*inc.last().unwrap(), v),
            SetEntropyValue::Infinite => prop_assert!(inc[inc.len() - 1] > inc[inc.len() - 3]),
        }
        if is_antichain(&m, &e) && e.iter().all(|p| !m.is_periodic(p)) {
            if let SetEntropyValue::Finite(v) = profile.value {
                prop_assert!(v >= e.len() as u64);
            }
            let ratios: Vec<f64> = sizes.iter().enumerate().map(|(i, &s)| s as f64 / (i + 1) as f64).collect();
            prop_assert!(ratios.windows(2).all(|w| w[1] + 1e-12 >= w[0]));
        }
    }

    #[test]
    fn contravariant_closed_form_matches_profile(m in random_map()) {
        let heads = string_heads(&m);
        match m.contravariant_entropy() {
            SetEntropyValue::Finite(0) => prop_assert!(heads.is_empty()),
            SetEntropyValue::Finite(v) => {
                let sizes = backward_sizes(&m, &heads, 10);
                prop_assert_eq!(*increments(&sizes).last().unwrap(), v);
            }
            SetEntropyValue::Infinite => {
                let root = Point::Tree { tree: 0, level: 1, index: 0 };
                let inc = increments(&backward_sizes(&m, &[root], 8));
                prop_assert!(inc.windows(2).all(|w| w[1] > w[0]));
            }
        }
    }

    #[test]
    fn shift_oracle_matches_closed_form(m in random_map(), p in prop::sample::select(vec![2u64, 3])) {
        let s = shift(&m, p, ShiftVariant::DirectSum);
        let value = shift_algebraic_entropy(&s).unwrap();
        match m.contravariant_entropy() {
            SetEntropyValue::Finite(v) => {
                prop_assert_eq!(value, EntropyValue::log_int(p, v));
                if v > 0 {
                    let r = shift_bruteforce_oracle(&s, &string_heads(&m), 8, None).unwrap();
                    prop_assert_eq!(r.slope(), Some(v as usize));
                }
            }
            SetEntropyValue::Infinite => {
                prop_assert!(value.is_infinite());
                let b = m.in_trees()[0].branching;
                let level: Vec<Point> = (0..b * b).map(|index| Point::Tree { tree: 0, level: 2, index }).collect();
                let r = shift_bruteforce_oracle(&s, &level, 4, None).unwrap();
                prop_assert_eq!(r.slope(), Some(level.len()));
            }
        }
    }

    #[test]
    fn shift_adjoint_matches_index_growth(
        m in random_map(),
        mask in prop::collection::vec(any::<bool>(), 1..8),
        p in prop::sample::select(vec![2u64, 3]),
    ) {
        let f = pick(&small_points(&m), &mask);
        prop_assume!(!f.is_empty());
        let s = shift(&m, p, ShiftVariant::DirectSum);
        let h = m.covariant_entropy_at(&f);
        prop_assert_eq!(adjoint_entropy_of_shift(&s, &f).unwrap(), EntropyValue::log_int(p, h));
        let exps = shift_cotrajectory_exponents(&s, &f, 30).unwrap();
        prop_assert_eq!(exps[29] - exps[28], h as usize);
    }
}

#[test]
fn catalog_power_laws_and_values() {
    for (name, m) in catalog::all() {
        for k in 1..=4u64 {
            let p = m.power_map(k as usize).unwrap();
            assert_eq!(
                p.covariant_entropy(),
                times(k, m.covariant_entropy()),
                "{name}^{k}"
            );
            assert_eq!(
                p.contravariant_entropy(),
                times(k, m.contravariant_entropy()),
                "{name}^{k}"
            );
        }
    }
    let fin = SetEntropyValue::Finite;
    assert_eq!(catalog::right_shift().covariant_entropy(), fin(1));
    assert_eq!(catalog::right_shift().contravariant_entropy(), fin(0));
    assert_eq!(catalog::left_shift().covariant_entropy(), fin(0));
    assert_eq!(catalog::left_shift().contravariant_entropy(), fin(1));
}

#[test]
fn catalog_shift_oracle_for_small_cores() {
    for (name, m) in catalog::all()
        .into_iter()
        .filter(|(_, m)| m.core_len() <= 6)
    {
        for p in [2u64, 3] {
            let s = shift(&m, p, ShiftVariant::DirectSum);
            match m.contravariant_entropy() {
                SetEntropyValue::Finite(v) => {
                    let r = shift_bruteforce_oracle(&s, &string_heads(&m), 8, None).unwrap();
                    let slope = if v == 0 {
                        r.slope().map(|_| 0)
                    } else {
                        r.slope()
                    };
                    assert_eq!(slope, Some(v as usize), "{name} over Z/{p}");
                    assert_eq!(
                        shift_algebraic_entropy(&s).unwrap(),
                        EntropyValue::log_int(p, v)
                    );
                }
                SetEntropyValue::Infinite => {
                    assert!(shift_algebraic_entropy(&s).unwrap().is_infinite(), "{name}");
                }
            }
        }
    }
}

#[test]
fn bernoulli_specializations_scale_with_group_order() {
    for order in 2..=5u64 {
        let rho = shift(&catalog::right_shift(), order, ShiftVariant::Product);
        assert_eq!(
            shift_topological_entropy(&rho).unwrap(),
            EntropyValue::log_int(order, 1)
        );
        let sigma = shift(&catalog::left_shift(), order, ShiftVariant::DirectSum);
        assert_eq!(
            shift_algebraic_entropy(&sigma).unwrap(),
            EntropyValue::log_int(order, 1)
        );
        let two = shift(
            &catalog::strings_into_fixed_point(2),
            order,
            ShiftVariant::DirectSum,
        );
        let v = shift_algebraic_entropy(&two).unwrap().value();
        assert!((v - 2.0 * (order as f64).ln()).abs() < 1e-12);
    }
}

#[test]
fn fan_profile_diverges_but_reduced_profile_does_not() {
    let depth = 6;
    let m = catalog::fan(depth);
    assert_eq!(m.contravariant_entropy(), SetEntropyValue::Finite(1));
    let root = Point::Core(m.core_index("n0").unwrap());
    let full = m.full_cotrajectory_sizes(&[root], depth + 1, None).unwrap();
    let inc = increments(&full);
    // step n adds the next string node and the 2(n−1) fan points above n−1
    for (n, d) in inc.iter().enumerate() {
        assert_eq!(*d, 2 * n as u64 + 1);
    }
    let head = Point::Core(m.core_index("n1").unwrap());
    let reduced = m.cotrajectory_profile(&[head], 12, None).unwrap();
    assert_eq!(reduced.value, SetEntropyValue::Finite(1));
    assert!(increments(&reduced.sizes).iter().all(|&d| d == 1));
}
