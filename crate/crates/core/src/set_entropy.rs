//! Set-theoretic entropies of self-maps of countable sets.
//!
//! A map is presented by a finite core (a functional graph on named nodes)
//! plus three kinds of infinite tails:
//!
//! * an out-ray `r₀ → r₁ → r₂ → …`, possibly fed by core nodes at `r₀`;
//! * an in-string `… → s₁ → s₀ → attach`;
//! * an in-tree, a complete backward `b`-ary tree whose level-1 nodes map to
//!   `attach`.
//!
//! The covariant entropy counts out-rays; the contravariant entropy counts
//! in-strings of the surjective core, or is infinite once an in-tree exists.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoreTarget {
    Core(usize),
    /// Entry point `r₀` of an out-ray.
    Ray(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InString {
    pub id: String,
    pub attach: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InTree {
    pub id: String,
    pub attach: usize,
    pub branching: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSelfMap {
    core_names: Vec<String>,
    core_map: Vec<CoreTarget>,
    out_rays: Vec<String>,
    in_strings: Vec<InString>,
    in_trees: Vec<InTree>,
}

/// A point of the carrier set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Core(usize),
    Ray {
        ray: usize,
        pos: u64,
    },
    Str {
        string: usize,
        pos: u64,
    },
    /// Node `index` (in `0..b^level`) at `level ≥ 1` of a tree.
    Tree {
        tree: usize,
        level: u32,
        index: u64,
    },
}

/// 𝔥 or 𝔥*: a non-negative integer or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetEntropyValue {
    Finite(u64),
    Infinite,
}

impl SetEntropyValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            SetEntropyValue::Finite(v) => Some(v),
            SetEntropyValue::Infinite => None,
        }
    }
}

impl fmt::Display for SetEntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetEntropyValue::Finite(v) => write!(f, "{v}"),
            SetEntropyValue::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for SetEntropyValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SetEntropyValue::Finite(v) => s.serialize_u64(*v),
            SetEntropyValue::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// JSON form of a map.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    #[serde(default)]
    pub core: BTreeMap<String, String>,
    #[serde(default)]
    pub out_rays: Vec<String>,
    #[serde(default)]
    pub in_strings: Vec<StringSpec>,
    #[serde(default)]
    pub in_trees: Vec<TreeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StringSpec {
    pub id: String,
    pub attach: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSpec {
    pub id: String,
    pub attach: String,
    pub branching: u64,
}

const RAY_PREFIX: &str = "ray:";

impl MapSpec {
    pub fn node(mut self, name: &str, target: &str) -> Self {
        self.core.insert(name.to_string(), target.to_string());
        self
    }

    pub fn ray(mut self, id: &str) -> Self {
        self.out_rays.push(id.to_string());
        self
    }

    pub fn string(mut self, id: &str, attach: &str) -> Self {
        self.in_strings.push(StringSpec {
            id: id.to_string(),
            attach: attach.to_string(),
        });
        self
    }

    pub fn tree(mut self, id: &str, attach: &str, branching: u64) -> Self {
        self.in_trees.push(TreeSpec {
            id: id.to_string(),
            attach: attach.to_string(),
            branching,
        });
        self
    }
}

/// Checks every structural invariant and returns all violations at once.
pub fn validate(spec: &MapSpec) -> Result<()> {
    SymbolicSelfMap::from_spec(spec).map(|_| ())
}

fn bad_name(name: &str) -> bool {
    name.is_empty() || name.starts_with(RAY_PREFIX) || name.contains(['[', ']', ',', ' '])
}

impl SymbolicSelfMap {
    pub fn from_spec(spec: &MapSpec) -> Result<Self> {
        let mut problems = Vec::new();
        let mut seen: HashSet<&str> = HashSet::new();
        let all_ids = spec
            .core
            .keys()
            .map(String::as_str)
            .chain(spec.out_rays.iter().map(String::as_str))
            .chain(spec.in_strings.iter().map(|s| s.id.as_str()))
            .chain(spec.in_trees.iter().map(|t| t.id.as_str()));
        for id in all_ids {
            if !seen.insert(id) {
                problems.push(format!("duplicate identifier {id:?}"));
            }
            if bad_name(id) {
                problems.push(format!(
                    "identifier {id:?} must be nonempty, must not start with {RAY_PREFIX:?} and must not contain brackets, commas or spaces"
                ));
            }
        }
        let core_names: Vec<String> = spec.core.keys().cloned().collect();
        let core_index: HashMap<&str, usize> = core_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let ray_index: HashMap<&str, usize> = spec
            .out_rays
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut core_map = Vec::with_capacity(core_names.len());
        for (name, target) in &spec.core {
            if let Some(ray) = target.strip_prefix(RAY_PREFIX) {
                match ray_index.get(ray) {
                    Some(&r) => core_map.push(CoreTarget::Ray(r)),
                    None => {
                        problems.push(format!(
                            "core node {name:?} maps to missing out-ray {ray:?}"
                        ));
                        core_map.push(CoreTarget::Core(0));
                    }
                }
            } else {
                match core_index.get(target.as_str()) {
                    Some(&c) => core_map.push(CoreTarget::Core(c)),
                    None => {
                        problems.push(format!(
                            "core node {name:?} maps to missing node {target:?}"
                        ));
                        core_map.push(CoreTarget::Core(0));
                    }
                }
            }
        }
        let mut in_strings = Vec::new();
        for s in &spec.in_strings {
            match core_index.get(s.attach.as_str()) {
                Some(&a) => in_strings.push(InString {
                    id: s.id.clone(),
                    attach: a,
                }),
                None => problems.push(format!(
                    "in-string {:?} attaches to missing core node {:?}",
                    s.id, s.attach
                )),
            }
        }
        let mut in_trees = Vec::new();
        for t in &spec.in_trees {
            if t.branching < 2 {
                problems.push(format!(
                    "in-tree {:?} has branching {} (must be at least 2)",
                    t.id, t.branching
                ));
            }
            match core_index.get(t.attach.as_str()) {
                Some(&a) => in_trees.push(InTree {
                    id: t.id.clone(),
                    attach: a,
                    branching: t.branching,
                }),
                None => problems.push(format!(
                    "in-tree {:?} attaches to missing core node {:?}",
                    t.id, t.attach
                )),
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidMap(problems));
        }
        let map = SymbolicSelfMap {
            core_names,
            core_map,
            out_rays: spec.out_rays.clone(),
            in_strings,
            in_trees,
        };
        let terminal_problems: Vec<String> = map
            .components()
            .iter()
            .filter(|c| c.cycle.is_empty() == c.ray.is_none())
            .map(|c| {
                format!(
                    "component containing {:?} must end in exactly one cycle or out-ray",
                    c.core
                        .first()
                        .map(|&i| map.core_names[i].as_str())
                        .unwrap_or("?")
                )
            })
            .collect();
        if !terminal_problems.is_empty() {
            return Err(Error::InvalidMap(terminal_problems));
        }
        Ok(map)
    }

    pub fn to_spec(&self) -> MapSpec {
        MapSpec {
            core: self
                .core_names
                .iter()
                .zip(&self.core_map)
                .map(|(n, t)| {
                    let target = match *t {
                        CoreTarget::Core(j) => self.core_names[j].clone(),
                        CoreTarget::Ray(r) => format!("{RAY_PREFIX}{}", self.out_rays[r]),
                    };
                    (n.clone(), target)
                })
                .collect(),
            out_rays: self.out_rays.clone(),
            in_strings: self
                .in_strings
                .iter()
                .map(|s| StringSpec {
                    id: s.id.clone(),
                    attach: self.core_names[s.attach].clone(),
                })
                .collect(),
            in_trees: self
                .in_trees
                .iter()
                .map(|t| TreeSpec {
                    id: t.id.clone(),
                    attach: self.core_names[t.attach].clone(),
                    branching: t.branching,
                })
                .collect(),
        }
    }

    pub fn core_len(&self) -> usize {
        self.core_names.len()
    }

    pub fn core_names(&self) -> &[String] {
        &self.core_names
    }

    pub fn out_rays(&self) -> &[String] {
        &self.out_rays
    }

    pub fn in_strings(&self) -> &[InString] {
        &self.in_strings
    }

    pub fn in_trees(&self) -> &[InTree] {
        &self.in_trees
    }

    pub fn core_target(&self, i: usize) -> CoreTarget {
        self.core_map[i]
    }

    pub fn core_index(&self, name: &str) -> Option<usize> {
        self.core_names.iter().position(|n| n == name)
    }

    pub fn image(&self, p: &Point) -> Point {
        match *p {
            Point::Core(i) => match self.core_map[i] {
                CoreTarget::Core(j) => Point::Core(j),
                CoreTarget::Ray(r) => Point::Ray { ray: r, pos: 0 },
            },
            Point::Ray { ray, pos } => Point::Ray { ray, pos: pos + 1 },
            Point::Str { string, pos } => {
                if pos == 0 {
                    Point::Core(self.in_strings[string].attach)
                } else {
                    Point::Str {
                        string,
                        pos: pos - 1,
                    }
                }
            }
            Point::Tree { tree, level, index } => {
                if level == 1 {
                    Point::Core(self.in_trees[tree].attach)
                } else {
                    Point::Tree {
                        tree,
                        level: level - 1,
                        index: index / self.in_trees[tree].branching,
                    }
                }
            }
        }
    }

    pub fn iterate(&self, p: &Point, n: usize) -> Point {
        (0..n).fold(*p, |x, _| self.image(&x))
    }

    /// The full (finite) preimage `λ⁻¹(p)`.
    pub fn preimages(&self, p: &Point) -> Vec<Point> {
        let mut out = Vec::new();
        match *p {
            Point::Core(i) => {
                for (j, t) in self.core_map.iter().enumerate() {
                    if *t == CoreTarget::Core(i) {
                        out.push(Point::Core(j));
                    }
                }
                for (s, st) in self.in_strings.iter().enumerate() {
                    if st.attach == i {
                        out.push(Point::Str { string: s, pos: 0 });
                    }
                }
                for (t, tr) in self.in_trees.iter().enumerate() {
                    if tr.attach == i {
                        for index in 0..tr.branching {
                            out.push(Point::Tree {
                                tree: t,
                                level: 1,
                                index,
                            });
                        }
                    }
                }
            }
            Point::Ray { ray, pos } => {
                if pos == 0 {
                    for (j, t) in self.core_map.iter().enumerate() {
                        if *t == CoreTarget::Ray(ray) {
                            out.push(Point::Core(j));
                        }
                    }
                } else {
                    out.push(Point::Ray { ray, pos: pos - 1 });
                }
            }
            Point::Str { string, pos } => out.push(Point::Str {
                string,
                pos: pos + 1,
            }),
            Point::Tree { tree, level, index } => {
                let b = self.in_trees[tree].branching;
                for c in 0..b {
                    out.push(Point::Tree {
                        tree,
                        level: level + 1,
                        index: index * b + c,
                    });
                }
            }
        }
        out
    }

    pub fn point_name(&self, p: &Point) -> String {
        match *p {
            Point::Core(i) => self.core_names[i].clone(),
            Point::Ray { ray, pos } => format!("{}[{pos}]", self.out_rays[ray]),
            Point::Str { string, pos } => format!("{}[{pos}]", self.in_strings[string].id),
            Point::Tree { tree, level, index } => {
                format!("{}[{level},{index}]", self.in_trees[tree].id)
            }
        }
    }

    /// Parses `name`, `R[pos]`, `S[pos]` or `T[level,index]`.
    pub fn parse_point(&self, text: &str) -> Result<Point> {
        let text = text.trim();
        let bad = || Error::InvalidInput(format!("unknown point {text:?}"));
        let Some((id, rest)) = text.split_once('[') else {
            return self.core_index(text).map(Point::Core).ok_or_else(bad);
        };
        let inner = rest.strip_suffix(']').ok_or_else(bad)?;
        if let Some(ray) = self.out_rays.iter().position(|r| r == id) {
            let pos = inner.trim().parse().map_err(|_| bad())?;
            return Ok(Point::Ray { ray, pos });
        }
        if let Some(string) = self.in_strings.iter().position(|s| s.id == id) {
            let pos = inner.trim().parse().map_err(|_| bad())?;
            return Ok(Point::Str { string, pos });
        }
        if let Some(tree) = self.in_trees.iter().position(|t| t.id == id) {
            let (l, i) = inner.split_once(',').ok_or_else(bad)?;
            let level: u32 = l.trim().parse().map_err(|_| bad())?;
            let index: u64 = i.trim().parse().map_err(|_| bad())?;
            let b = self.in_trees[tree].branching;
            let width = b.checked_pow(level);
            if level == 0 || width.is_some_and(|w| index >= w) {
                return Err(Error::InvalidInput(format!(
                    "tree point {text:?} out of range (levels start at 1, index < {b}^level)"
                )));
            }
            return Ok(Point::Tree { tree, level, index });
        }
        Err(bad())
    }

    /// Periodic core nodes (those lying on a cycle).
    pub fn periodic_nodes(&self) -> Vec<bool> {
        let n = self.core_len();
        (0..n)
            .map(|i| {
                let mut x = i;
                for _ in 0..n {
                    match self.core_map[x] {
                        CoreTarget::Core(j) => x = j,
                        CoreTarget::Ray(_) => return false,
                    }
                    if x == i {
                        return true;
                    }
                }
                false
            })
            .collect()
    }

    pub fn is_periodic(&self, p: &Point) -> bool {
        match p {
            Point::Core(i) => self.periodic_nodes()[*i],
            _ => false,
        }
    }

    /// Weakly connected components of the core-plus-ray graph. Tails belong
    /// to the component of their attachment node.
    pub fn components(&self) -> Vec<Component> {
        let n = self.core_len();
        let r = self.out_rays.len();
        // union-find over core nodes 0..n and rays n..n+r
        let mut parent: Vec<usize> = (0..n + r).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut y = x;
            while parent[y] != root {
                let next = parent[y];
                parent[y] = root;
                y = next;
            }
            root
        }
        for (i, t) in self.core_map.iter().enumerate() {
            let j = match *t {
                CoreTarget::Core(j) => j,
                CoreTarget::Ray(k) => n + k,
            };
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let periodic = self.periodic_nodes();
        let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
        for x in 0..n + r {
            let root = find(&mut parent, x);
            let c = groups.entry(root).or_default();
            if x < n {
                c.core.push(x);
                if periodic[x] {
                    c.cycle.push(x);
                }
            } else {
                c.ray = Some(x - n);
            }
        }
        let mut comps: Vec<Component> = groups.into_values().collect();
        for c in comps.iter_mut() {
            c.strings = (0..self.in_strings.len())
                .filter(|&s| c.core.contains(&self.in_strings[s].attach))
                .collect();
            c.trees = (0..self.in_trees.len())
                .filter(|&t| c.core.contains(&self.in_trees[t].attach))
                .collect();
        }
        comps
    }

    /// Quasi-periodic components (terminal cycle) and wandering components
    /// (terminal out-ray).
    pub fn qper_wan_partition(&self) -> Partition {
        let (wan, qper): (Vec<Component>, Vec<Component>) =
            self.components().into_iter().partition(|c| c.ray.is_some());
        Partition { qper, wan }
    }

    /// 𝔥(λ): the number of pairwise disjoint infinite forward orbits, i.e.
    /// the number of out-rays.
    pub fn covariant_entropy(&self) -> SetEntropyValue {
        SetEntropyValue::Finite(self.out_rays.len() as u64)
    }

    /// Survival masks of `⋂ λⁿ(X)`: a core node survives iff it has an
    /// infinite backward chain; a ray survives iff some surviving core node
    /// feeds it.
    fn surjective_masks(&self) -> (Vec<bool>, Vec<bool>) {
        let n = self.core_len();
        let mut alive = vec![true; n];
        let fed_by_tail: Vec<bool> = (0..n)
            .map(|i| {
                self.in_strings.iter().any(|s| s.attach == i)
                    || self.in_trees.iter().any(|t| t.attach == i)
            })
            .collect();
        loop {
            let mut changed = false;
            for i in 0..n {
                if !alive[i] || fed_by_tail[i] {
                    continue;
                }
                let fed = (0..n).any(|j| alive[j] && self.core_map[j] == CoreTarget::Core(i));
                if !fed {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let rays = (0..self.out_rays.len())
            .map(|r| (0..n).any(|j| alive[j] && self.core_map[j] == CoreTarget::Ray(r)))
            .collect();
        (alive, rays)
    }

    pub fn in_surjective_core(&self, p: &Point) -> bool {
        let (core, rays) = self.surjective_masks();
        point_in_masks(p, &core, &rays)
    }

    /// The restriction of λ to its surjective core.
    pub fn surjective_core(&self) -> SurjectiveCore {
        let (core_alive, ray_alive) = self.surjective_masks();
        let spec = self.to_spec();
        let mut restricted = MapSpec::default();
        for (i, name) in self.core_names.iter().enumerate() {
            if core_alive[i] {
                restricted
                    .core
                    .insert(name.clone(), spec.core[name].clone());
            }
        }
        for (r, id) in self.out_rays.iter().enumerate() {
            if ray_alive[r] {
                restricted.out_rays.push(id.clone());
            }
        }
        restricted.in_strings = spec.in_strings;
        restricted.in_trees = spec.in_trees;
        let map = SymbolicSelfMap::from_spec(&restricted)
            .expect("restriction of a valid map to its surjective core is valid");
        let empty = map.core_len() == 0 && map.out_rays.is_empty();
        SurjectiveCore {
            map,
            core_alive,
            ray_alive,
            empty,
        }
    }

    /// 𝔥*(λ) = 𝔥*(λ↾sc): infinite if an in-tree exists, otherwise the number
    /// of in-strings. The empty core gives 0.
    pub fn contravariant_entropy(&self) -> SetEntropyValue {
        if !self.in_trees.is_empty() {
            SetEntropyValue::Infinite
        } else {
            SetEntropyValue::Finite(self.in_strings.len() as u64)
        }
    }

    fn depth_bound(&self, points: &[Point]) -> usize {
        let tail_depth = points
            .iter()
            .map(|p| match *p {
                Point::Str { pos, .. } => pos as usize + 1,
                Point::Tree { level, .. } => level as usize,
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        let ray_pos = points
            .iter()
            .map(|p| match *p {
                Point::Ray { pos, .. } => pos as usize,
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        tail_depth + self.core_len() + ray_pos + 1
    }

    /// Forward trajectory sizes `|D ∪ λ(D) ∪ … ∪ λⁿ⁻¹(D)|` for `n = 1..=horizon`
    /// and the stabilized increment 𝔥(λ, D).
    pub fn covariant_trajectory_profile(
        &self,
        d: &[Point],
        horizon: usize,
    ) -> Result<CovariantProfile> {
        if d.is_empty() {
            return Err(Error::InvalidInput("the set D must be nonempty".into()));
        }
        let t0 = self.depth_bound(d);
        let needed = t0 + d.len() + 1;
        if horizon < needed {
            return Err(Error::HorizonTooShort { needed, horizon });
        }
        let mut seen: HashSet<Point> = HashSet::new();
        let mut current: Vec<Point> = d.to_vec();
        let mut sizes = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            for p in &current {
                seen.insert(*p);
            }
            sizes.push(seen.len() as u64);
            current = current.iter().map(|p| self.image(p)).collect();
        }
        let increments: Vec<u64> = sizes.windows(2).map(|w| w[1] - w[0]).collect();
        // increments[k] is |𝔗_{k+2}| − |𝔗_{k+1}|
        let window = &increments[t0 - 1..needed - 1];
        if window.iter().any(|&x| x != window[0]) {
            return Err(Error::HorizonTooShort { needed, horizon });
        }
        Ok(CovariantProfile {
            sizes,
            value: window[0],
            stabilized_at: t0,
        })
    }

    /// 𝔥(λ, D) in closed form: the number of distinct out-rays reached.
    pub fn covariant_entropy_at(&self, d: &[Point]) -> u64 {
        let steps = self.depth_bound(d);
        let rays: BTreeSet<usize> = d
            .iter()
            .filter_map(|p| match self.iterate(p, steps) {
                Point::Ray { ray, .. } => Some(ray),
                _ => None,
            })
            .collect();
        rays.len() as u64
    }

    /// Exact sizes of the reduced cotrajectories
    /// `⋃_{i<n} (λ⁻ⁱ(E) ∩ sc)` for `n = 1..=horizon`, with the limit
    /// 𝔥*(λ, E) from the stratified-antichain algorithm.
    pub fn cotrajectory_profile(
        &self,
        e: &[Point],
        horizon: usize,
        budget: Option<usize>,
    ) -> Result<CotrajectoryProfile> {
        let (core, rays) = self.surjective_masks();
        if let Some(p) = e.iter().find(|p| !point_in_masks(p, &core, &rays)) {
            return Err(Error::InvalidInput(format!(
                "point {} lies outside the surjective core",
                self.point_name(p)
            )));
        }
        let sizes = self.cotrajectory_sizes(e, horizon, budget, Some((&core, &rays)))?;
        let value = self.cotrajectory_value(e, &core, &rays);
        Ok(CotrajectoryProfile { sizes, value })
    }

    /// Sizes of the unreduced cotrajectories `⋃_{i<n} λ⁻ⁱ(E)`.
    pub fn full_cotrajectory_sizes(
        &self,
        e: &[Point],
        horizon: usize,
        budget: Option<usize>,
    ) -> Result<Vec<u64>> {
        self.cotrajectory_sizes(e, horizon, budget, None)
    }

    fn cotrajectory_sizes(
        &self,
        e: &[Point],
        horizon: usize,
        budget: Option<usize>,
        masks: Option<(&[bool], &[bool])>,
    ) -> Result<Vec<u64>> {
        let cap = budget.unwrap_or(DEFAULT_BUDGET);
        let keep = |p: &Point| masks.is_none_or(|(c, r)| point_in_masks(p, c, r));
        let mut seen: HashSet<Point> = HashSet::new();
        let mut level: Vec<Point> = e.iter().copied().filter(|p| keep(p)).collect();
        let mut sizes = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            seen.extend(level.iter().copied());
            if seen.len() > cap {
                return Err(Error::BudgetExceeded { cap });
            }
            sizes.push(seen.len() as u64);
            let mut next: BTreeSet<Point> = BTreeSet::new();
            for p in &level {
                for q in self.preimages(p) {
                    if keep(&q) {
                        next.insert(q);
                    }
                }
                if next.len() > cap {
                    return Err(Error::BudgetExceeded { cap });
                }
            }
            level = next.into_iter().collect();
        }
        Ok(sizes)
    }

    fn cotrajectory_value(&self, e: &[Point], core: &[bool], rays: &[bool]) -> SetEntropyValue {
        let periodic = self.periodic_nodes();
        let is_per = |p: &Point| matches!(p, Point::Core(i) if periodic[*i]);
        let sc_pre = |p: &Point| -> Vec<Point> {
            self.preimages(p)
                .into_iter()
                .filter(|q| point_in_masks(q, core, rays))
                .collect()
        };
        // periodic points contribute only through the non-periodic points
        // feeding their cycle
        let mut set: BTreeSet<Point> = BTreeSet::new();
        for p in e {
            if is_per(p) {
                let mut x = *p;
                loop {
                    for q in sc_pre(&x) {
                        if !is_per(&q) {
                            set.insert(q);
                        }
                    }
                    x = self.image(&x);
                    if x == *p {
                        break;
                    }
                }
            } else {
                set.insert(*p);
            }
        }
        let pts: Vec<Point> = set.iter().copied().collect();
        let steps = self.depth_bound(&pts);
        let minimal: Vec<Point> = pts
            .iter()
            .copied()
            .filter(|p| {
                let mut x = *p;
                for _ in 0..steps {
                    x = self.image(&x);
                    if x != *p && set.contains(&x) {
                        return false;
                    }
                }
                true
            })
            .collect();
        let mut level = minimal;
        for _ in 0..=steps + 1 {
            if level.iter().any(|p| matches!(p, Point::Tree { .. })) {
                return SetEntropyValue::Infinite;
            }
            if level.iter().all(|p| matches!(p, Point::Str { .. })) {
                return SetEntropyValue::Finite(level.len() as u64);
            }
            level = level.iter().flat_map(&sc_pre).collect();
        }
        unreachable!(
            "preimages of non-periodic surjective-core points reach tails within the depth bound"
        )
    }

    /// The presentation of `λᵏ`. Use [`SymbolicSelfMap::embed_power_point`]
    /// to map points across.
    ///
    /// The first `k` points of every tail become core nodes; each out-ray
    /// splits into `k` rays, each in-string into `k` strings, and every
    /// promoted tree node receives an in-tree of branching `bᵏ`.
    pub fn power_map(&self, k: usize) -> Result<SymbolicSelfMap> {
        if k == 0 {
            return Err(Error::InvalidInput("power must be at least 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        for t in &self.in_trees {
            if t.branching.checked_pow(k as u32).is_none() {
                return Err(Error::InvalidInput(format!(
                    "branching {}^{k} overflows",
                    t.branching
                )));
            }
        }
        let mut spec = MapSpec::default();
        // first collect every point of the extended core
        let mut extended: Vec<Point> = (0..self.core_len()).map(Point::Core).collect();
        for ray in 0..self.out_rays.len() {
            extended.extend((0..k as u64).map(|pos| Point::Ray { ray, pos }));
        }
        for string in 0..self.in_strings.len() {
            extended.extend((0..k as u64).map(|pos| Point::Str { string, pos }));
        }
        for (tree, t) in self.in_trees.iter().enumerate() {
            for level in 1..=k as u32 {
                let width = t.branching.pow(level);
                extended.extend((0..width).map(|index| Point::Tree { tree, level, index }));
            }
        }
        for id in &self.out_rays {
            spec.out_rays.extend((0..k).map(|i| format!("{id}#{i}")));
        }
        for p in &extended {
            let name = self.power_point_name(p, k);
            let target = self.embed_power_point(&self.iterate(p, k), k);
            let target_name = match target {
                Point::Ray { ray, pos: 0 } => format!("{RAY_PREFIX}{}", spec.out_rays[ray]),
                Point::Core(_) => {
                    let original = self.iterate(p, k);
                    self.power_point_name(&original, k)
                }
                other => unreachable!("extended core maps to {other:?}"),
            };
            spec.core.insert(name, target_name);
        }
        for (s, st) in self.in_strings.iter().enumerate() {
            for i in 0..k as u64 {
                spec.in_strings.push(StringSpec {
                    id: format!("{}#{i}", st.id),
                    attach: self.power_point_name(&Point::Str { string: s, pos: i }, k),
                });
            }
        }
        for (tree, t) in self.in_trees.iter().enumerate() {
            for level in 1..=k as u32 {
                for index in 0..t.branching.pow(level) {
                    spec.in_trees.push(TreeSpec {
                        id: format!("{}#{level}.{index}", t.id),
                        attach: self.power_point_name(&Point::Tree { tree, level, index }, k),
                        branching: t.branching.pow(k as u32),
                    });
                }
            }
        }
        SymbolicSelfMap::from_spec(&spec)
    }

    fn power_point_name(&self, p: &Point, k: usize) -> String {
        match *p {
            Point::Core(i) => self.core_names[i].clone(),
            Point::Ray { ray, pos } if (pos as usize) < k => {
                format!("{}@{pos}", self.out_rays[ray])
            }
            Point::Str { string, pos } if (pos as usize) < k => {
                format!("{}@{pos}", self.in_strings[string].id)
            }
            Point::Tree { tree, level, index } if (level as usize) <= k => {
                format!("{}@{level}.{index}", self.in_trees[tree].id)
            }
            _ => panic!("point is not promoted"),
        }
    }

    /// Image of a point of `λ` in the presentation returned by
    /// [`SymbolicSelfMap::power_map`], so that
    /// `embed(λᵏ(x)) = power.image(embed(x))`.
    pub fn embed_power_point(&self, p: &Point, k: usize) -> Point {
        let power = PowerIndex::new(self, k);
        power.embed(p)
    }
}

fn point_in_masks(p: &Point, core: &[bool], rays: &[bool]) -> bool {
    match *p {
        Point::Core(i) => core[i],
        Point::Ray { ray, .. } => rays[ray],
        _ => true,
    }
}

/// Name-based index translating points of `λ` into points of `λᵏ`.
struct PowerIndex<'a> {
    map: &'a SymbolicSelfMap,
    k: usize,
    core: HashMap<String, usize>,
    tree_ids: HashMap<String, usize>,
}

impl<'a> PowerIndex<'a> {
    fn new(map: &'a SymbolicSelfMap, k: usize) -> Self {
        // reproduce the sorted core ordering and tree ordering of power_map
        let mut names: Vec<String> = (0..map.core_len())
            .map(|i| map.core_names[i].clone())
            .collect();
        for r in &map.out_rays {
            names.extend((0..k).map(|pos| format!("{r}@{pos}")));
        }
        for s in &map.in_strings {
            names.extend((0..k).map(|pos| format!("{}@{pos}", s.id)));
        }
        let mut tree_ids = HashMap::new();
        let mut next_tree = 0;
        for t in &map.in_trees {
            for level in 1..=k as u32 {
                for index in 0..t.branching.pow(level) {
                    names.push(format!("{}@{level}.{index}", t.id));
                    tree_ids.insert(format!("{}#{level}.{index}", t.id), next_tree);
                    next_tree += 1;
                }
            }
        }
        names.sort();
        let core = names.into_iter().enumerate().map(|(i, n)| (n, i)).collect();
        PowerIndex {
            map,
            k,
            core,
            tree_ids,
        }
    }

    fn embed(&self, p: &Point) -> Point {
        let k = self.k as u64;
        if self.k == 1 {
            return *p;
        }
        match *p {
            Point::Core(_) => Point::Core(self.core[&self.map.power_point_name(p, self.k)]),
            Point::Ray { pos, .. } if pos < k => {
                Point::Core(self.core[&self.map.power_point_name(p, self.k)])
            }
            Point::Ray { ray, pos } => Point::Ray {
                ray: ray * self.k + ((pos - k) % k) as usize,
                pos: (pos - k) / k,
            },
            Point::Str { pos, .. } if pos < k => {
                Point::Core(self.core[&self.map.power_point_name(p, self.k)])
            }
            Point::Str { string, pos } => Point::Str {
                string: string * self.k + ((pos - k) % k) as usize,
                pos: (pos - k) / k,
            },
            Point::Tree { level, .. } if (level as usize) <= self.k => {
                Point::Core(self.core[&self.map.power_point_name(p, self.k)])
            }
            Point::Tree { tree, level, index } => {
                let b = self.map.in_trees[tree].branching;
                // level = j + m·k with 1 ≤ j ≤ k, m ≥ 1
                let j = (level as u64 - 1) % k + 1;
                let m = (level as u64 - j) / k;
                let drop = b.pow((level as u64 - j) as u32);
                let ancestor = index / drop;
                let id = format!("{}#{j}.{ancestor}", self.map.in_trees[tree].id);
                Point::Tree {
                    tree: self.tree_ids[&id],
                    level: m as u32,
                    index: index % drop,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Component {
    pub core: Vec<usize>,
    pub cycle: Vec<usize>,
    pub ray: Option<usize>,
    pub strings: Vec<usize>,
    pub trees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub qper: Vec<Component>,
    pub wan: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurjectiveCore {
    pub map: SymbolicSelfMap,
    pub core_alive: Vec<bool>,
    pub ray_alive: Vec<bool>,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CovariantProfile {
    pub sizes: Vec<u64>,
    pub value: u64,
    pub stabilized_at: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CotrajectoryProfile {
    pub sizes: Vec<u64>,
    pub value: SetEntropyValue,
}

/// Named example maps.
pub mod catalog {
    use super::*;

    fn build(spec: MapSpec) -> SymbolicSelfMap {
        SymbolicSelfMap::from_spec(&spec).expect("catalog maps are valid")
    }

    /// ρ: n ↦ n + 1 on ℕ.
    pub fn right_shift() -> SymbolicSelfMap {
        build(MapSpec::default().ray("R0"))
    }

    /// ς: n ↦ n − 1 on ℕ with 0 fixed.
    pub fn left_shift() -> SymbolicSelfMap {
        build(MapSpec::default().node("0", "0").string("S0", "0"))
    }

    /// n ↦ n + 1 on ℤ.
    pub fn two_sided_shift() -> SymbolicSelfMap {
        build(
            MapSpec::default()
                .node("0", "ray:R0")
                .ray("R0")
                .string("S0", "0"),
        )
    }

    /// Fixed point fed by a complete `b`-ary backward tree.
    pub fn tree_map(branching: u64) -> SymbolicSelfMap {
        build(MapSpec::default().node("0", "0").tree("T0", "0", branching))
    }

    /// Fixed point with `count` in-strings.
    pub fn strings_into_fixed_point(count: usize) -> SymbolicSelfMap {
        let mut spec = MapSpec::default().node("0", "0");
        for i in 0..count {
            spec = spec.string(&format!("S{i}"), "0");
        }
        build(spec)
    }

    /// `count` disjoint copies of ρ.
    pub fn rays(count: usize) -> SymbolicSelfMap {
        let mut spec = MapSpec::default();
        for i in 0..count {
            spec = spec.ray(&format!("R{i}"));
        }
        build(spec)
    }

    /// A finite cycle of the given length.
    pub fn cycle(len: usize) -> SymbolicSelfMap {
        let mut spec = MapSpec::default();
        for i in 0..len {
            spec = spec.node(&format!("c{i}"), &format!("c{}", (i + 1) % len));
        }
        build(spec)
    }

    /// The left shift on ℕ with a fan of `2n` extra points mapping onto each
    /// `n = 1..=depth`; the string continues beyond `depth`.
    pub fn fan(depth: usize) -> SymbolicSelfMap {
        let mut spec = MapSpec::default().node("n0", "n0");
        for n in 1..=depth {
            spec = spec.node(&format!("n{n}"), &format!("n{}", n - 1));
            for j in 0..2 * n {
                spec = spec.node(&format!("x{n}_{j}"), &format!("n{n}"));
            }
        }
        build(spec.string("S0", &format!("n{depth}")))
    }

    /// Disjoint union; identifiers get the given prefixes.
    pub fn disjoint_union(parts: &[(&str, &SymbolicSelfMap)]) -> Result<SymbolicSelfMap> {
        let mut spec = MapSpec::default();
        for (prefix, map) in parts {
            let s = map.to_spec();
            for (name, target) in s.core {
                let target = match target.strip_prefix(RAY_PREFIX) {
                    Some(r) => format!("{RAY_PREFIX}{prefix}{r}"),
                    None => format!("{prefix}{target}"),
                };
                spec.core.insert(format!("{prefix}{name}"), target);
            }
            spec.out_rays
                .extend(s.out_rays.iter().map(|r| format!("{prefix}{r}")));
            spec.in_strings
                .extend(s.in_strings.into_iter().map(|st| StringSpec {
                    id: format!("{prefix}{}", st.id),
                    attach: format!("{prefix}{}", st.attach),
                }));
            spec.in_trees
                .extend(s.in_trees.into_iter().map(|t| TreeSpec {
                    id: format!("{prefix}{}", t.id),
                    attach: format!("{prefix}{}", t.attach),
                    branching: t.branching,
                }));
        }
        SymbolicSelfMap::from_spec(&spec)
    }

    /// Every named example with its identifier.
    pub fn all() -> Vec<(String, SymbolicSelfMap)> {
        let rho = right_shift();
        let sigma = left_shift();
        let mut out = vec![
            ("right_shift".to_string(), rho.clone()),
            ("left_shift".to_string(), sigma.clone()),
            ("two_sided_shift".to_string(), two_sided_shift()),
            ("binary_tree".to_string(), tree_map(2)),
            ("two_strings".to_string(), strings_into_fixed_point(2)),
            ("two_rays".to_string(), rays(2)),
            ("cycle3".to_string(), cycle(3)),
            ("fan2".to_string(), fan(2)),
        ];
        out.push((
            "shift_union".to_string(),
            disjoint_union(&[("a", &rho), ("b", &sigma)]).expect("valid union"),
        ));
        out
    }
}
