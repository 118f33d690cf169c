//! Fixture instances, the exact-cover reduction, adversarial families and
//! seeded random instances.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{as_tree, Instance, InstanceBuilder, TreeInstance, Variant};
use crate::weight::Weight;

/// The five-vertex example graph, no-return variant, start `v1`.
pub fn figure1_instance<W: Weight>() -> Instance<W> {
    let w = W::of;
    InstanceBuilder::new(Variant::NoReturn, "v1")
        .vertex("v1", w(1))
        .vertex("v2", w(1))
        .vertex("v3", w(1))
        .vertex("v4", w(1))
        .vertex("v5", w(15))
        .edge("e1", "v1", "v2", w(1))
        .edge("e2", "v2", "v3", w(20))
        .edge("e3", "v1", "v4", w(1))
        .edge("e4", "v2", "v5", w(7))
        .build()
        .expect("fixture is valid")
}

/// The 14-vertex worked example tree with `N = 41`, return variant.
pub fn figure4_instance<W: Weight>() -> TreeInstance<W> {
    let w = W::of;
    let mut b = InstanceBuilder::new(Variant::Return, "vs");
    for (id, weight) in [
        ("vs", 4),
        ("v1", 5),
        ("v2", 2),
        ("v3", 1),
        ("v4", 5),
        ("v5", 1),
        ("b0", 2),
        ("b1", 3),
        ("b2", 2),
        ("b3", 2),
        ("b4", 2),
        ("b5", 9),
        ("b6", 2),
        ("b7", 1),
    ] {
        b.add_vertex(id, w(weight));
    }
    for (id, u, v, weight) in [
        ("e1", "vs", "v1", 1),
        ("e2", "vs", "b0", 4),
        ("e3", "v1", "b1", 9),
        ("e4", "vs", "v2", 7),
        ("e5", "vs", "v3", 10),
        ("e6", "v2", "b5", 6),
        ("e7", "v2", "v4", 12),
        ("e8", "v4", "b6", 1),
        ("e9", "v4", "b7", 3),
        ("e10", "v3", "b4", 3),
        ("e11", "v3", "v5", 2),
        ("e12", "v5", "b2", 1),
        ("e13", "v5", "b3", 1),
    ] {
        b.add_edge(id, u, v, w(weight));
    }
    as_tree(b.build().expect("fixture is valid")).expect("fixture is a tree")
}

/// An exact-cover instance: `3n` elements `1..=3n` and 3-element subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xc3Input {
    n: usize,
    sets: Vec<[usize; 3]>,
}

impl Xc3Input {
    pub fn new(n: usize, sets: Vec<[usize; 3]>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Xc3("the ground set is empty".into()));
        }
        if n > 21 {
            return Err(Error::Xc3("at most 63 elements are supported".into()));
        }
        if sets.len() < n {
            return Err(Error::Xc3(format!(
                "{} subsets cannot cover {} elements",
                sets.len(),
                3 * n
            )));
        }
        for (j, s) in sets.iter().enumerate() {
            if s.iter().any(|&x| x == 0 || x > 3 * n) {
                return Err(Error::Xc3(format!(
                    "subset {} has an element outside 1..={}",
                    j + 1,
                    3 * n
                )));
            }
            if s[0] == s[1] || s[1] == s[2] || s[0] == s[2] {
                return Err(Error::Xc3(format!("subset {} repeats an element", j + 1)));
            }
        }
        Ok(Self { n, sets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[[usize; 3]] {
        &self.sets
    }

    /// Exhaustive search for `n` pairwise disjoint subsets.
    pub fn exact_cover(&self) -> Option<Vec<usize>> {
        fn go(input: &Xc3Input, covered: u64, from: usize, chosen: &mut Vec<usize>) -> bool {
            if chosen.len() == input.n {
                return covered.count_ones() as usize == 3 * input.n;
            }
            for j in from..input.sets.len() {
                let mask = input.sets[j].iter().fold(0u64, |m, &x| m | 1 << x);
                if covered & mask == 0 {
                    chosen.push(j);
                    if go(input, covered | mask, j + 1, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::new();
        go(self, 0, 0, &mut chosen).then_some(chosen)
    }
}

/// The `n = 4`, `m = 6` example, covered by subsets 2, 3, 5 and 6.
pub fn figure2_input() -> Xc3Input {
    Xc3Input::new(
        4,
        vec![
            [1, 2, 3],
            [1, 2, 4],
            [3, 5, 7],
            [5, 8, 9],
            [6, 8, 10],
            [9, 11, 12],
        ],
    )
    .expect("fixture is valid")
}

/// The same ground set with the last subset changed to `{8, 11, 12}`, which
/// leaves no exact cover: 9 and 11 force subsets 4 and 6, which share 8.
pub fn figure2_no_cover_input() -> Xc3Input {
    Xc3Input::new(
        4,
        vec![
            [1, 2, 3],
            [1, 2, 4],
            [3, 5, 7],
            [5, 8, 9],
            [6, 8, 10],
            [8, 11, 12],
        ],
    )
    .expect("fixture is valid")
}

/// Number of agents that suffices exactly when an exact cover exists:
/// `3n + m + 1` without return, `3n + m` with return.
pub fn xc3_threshold(input: &Xc3Input, variant: Variant) -> u64 {
    let base = (3 * input.n + input.sets.len()) as u64;
    match variant {
        Variant::NoReturn => base + 1,
        Variant::Return => base,
    }
}

/// Sink `vs` (weight 0) joined by free edges to one vertex per subset, each
/// subset joined to its three element vertices by edges of weight
/// `m - n + 1`. The no-return variant adds a dummy vertex `d` on a free edge;
/// the return variant drops it and uses weight `m - n`. All other vertices
/// have weight 1.
pub fn xc3_reduction<W: Weight>(input: &Xc3Input, variant: Variant) -> Result<Instance<W>> {
    let (n, m) = (input.n, input.sets.len());
    let heavy = match variant {
        Variant::NoReturn => m - n + 1,
        Variant::Return => m - n,
    };
    let w = |x: usize| W::of(x as u64);
    let mut b = InstanceBuilder::new(variant, "vs");
    b.add_vertex("vs", W::zero());
    for i in 1..=3 * n {
        b.add_vertex(format!("x{i}"), W::one());
    }
    for (j, set) in input.sets.iter().enumerate() {
        let f = format!("F{}", j + 1);
        b.add_vertex(f.clone(), W::one());
        b.add_edge(format!("vs-{f}"), "vs", f.clone(), W::zero());
        for &x in set {
            b.add_edge(format!("{f}-x{x}"), f.clone(), format!("x{x}"), w(heavy));
        }
    }
    if variant == Variant::NoReturn {
        b.add_vertex("d", W::one());
        b.add_edge("vs-d", "vs", "d", W::zero());
    }
    let missing: BTreeSet<usize> = (1..=3 * n)
        .filter(|x| !input.sets.iter().any(|s| s.contains(x)))
        .collect();
    if let Some(x) = missing.first() {
        return Err(Error::Xc3(format!("element {x} lies in no subset")));
    }
    b.build()
}

/// Center `vs` (weight 0) with leaves `b1..bn` (weight 1) on edges of
/// weight `n, n-1, ..., 1`. Return variant; the optimum is `n + 1`.
pub fn star_instance<W: Weight>(n: usize) -> TreeInstance<W> {
    assert!(n >= 1, "a star needs at least one leaf");
    let mut b = InstanceBuilder::new(Variant::Return, "vs");
    b.add_vertex("vs", W::zero());
    for i in 1..=n {
        b.add_vertex(format!("b{i}"), W::one());
        b.add_edge(
            format!("e{i}"),
            "vs",
            format!("b{i}"),
            W::of((n + 1 - i) as u64),
        );
    }
    as_tree(b.build().expect("star is valid")).expect("star is a tree")
}

/// Star with leaf demand `eps` and the given edge weights. Without return
/// the leaf on the lightest edge instead demands that edge's weight.
pub fn uniform_gap_instance<W: Weight>(
    values: &[u64],
    eps: u64,
    variant: Variant,
) -> Result<TreeInstance<W>> {
    if values.is_empty() {
        return Err(Error::Format(
            "uniform-gap family needs at least one value".into(),
        ));
    }
    if eps == 0 || values.contains(&0) {
        return Err(Error::Format(
            "uniform-gap values and eps must be positive".into(),
        ));
    }
    let distinct: BTreeSet<u64> = values.iter().copied().collect();
    if distinct.len() != values.len() {
        return Err(Error::Format("uniform-gap values must be distinct".into()));
    }
    let smallest = *distinct.first().unwrap();
    let mut b = InstanceBuilder::new(variant, "vs");
    b.add_vertex("vs", W::zero());
    for (i, &x) in values.iter().enumerate() {
        let demand = if variant == Variant::NoReturn && x == smallest {
            x
        } else {
            eps
        };
        b.add_vertex(format!("b{}", i + 1), W::of(demand));
        b.add_edge(format!("e{}", i + 1), "vs", format!("b{}", i + 1), W::of(x));
    }
    as_tree(b.build()?)
}

/// Two free arms `vs - l1 - ... - lm` and `vs - r1 - ... - rm`, and `m`
/// unit leaves `p1..pm` hanging off the arm ends on edges of weight
/// `m, m-1, ..., 1`, alternating between the left and the right end. Return
/// variant; the optimum is `m + 1` but visiting the leaves in the required
/// order walks back and forth between the arm ends.
pub fn zigzag_instance<W: Weight>(m: usize) -> TreeInstance<W> {
    assert!(m >= 1, "zigzag needs at least one leaf");
    let width = m.to_string().len();
    let mut b = InstanceBuilder::new(Variant::Return, "vs");
    b.add_vertex("vs", W::zero());
    for side in ["l", "r"] {
        let mut prev = "vs".to_string();
        for i in 1..=m {
            let v = format!("{side}{i:0width$}");
            b.add_vertex(v.clone(), W::zero());
            b.add_edge(format!("a{side}{i:0width$}"), prev, v.clone(), W::zero());
            prev = v;
        }
    }
    for j in 1..=m {
        let end = if j % 2 == 1 {
            format!("l{m:0width$}")
        } else {
            format!("r{m:0width$}")
        };
        let p = format!("p{j:0width$}");
        b.add_vertex(p.clone(), W::one());
        b.add_edge(format!("e{j:0width$}"), end, p, W::of((m + 1 - j) as u64));
    }
    as_tree(b.build().expect("zigzag is valid")).expect("zigzag is a tree")
}

fn padded(prefix: &str, i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).max(1).to_string().len();
    format!("{prefix}{i:0width$}")
}

/// Uniform random recursive tree on `n` vertices with weights in
/// `0..=weight_max`, no-return variant. Vertex ids are shuffled so that id
/// order says nothing about the shape.
pub fn random_tree<W: Weight>(n: usize, seed: u64, weight_max: u64) -> TreeInstance<W> {
    assert!(n >= 1, "a tree needs a vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<usize> = (0..n).collect();
    names.shuffle(&mut rng);
    let name = |i: usize| padded("v", names[i], n);
    let mut b = InstanceBuilder::new(Variant::NoReturn, name(0));
    for i in 0..n {
        b.add_vertex(name(i), W::of(rng.gen_range(0..=weight_max)));
    }
    for i in 1..n {
        let p = rng.gen_range(0..i);
        b.add_edge(
            padded("e", i, n),
            name(p),
            name(i),
            W::of(rng.gen_range(0..=weight_max)),
        );
    }
    as_tree(b.build().expect("random tree is valid")).expect("random tree is a tree")
}

/// A random spanning tree plus every other vertex pair independently with
/// probability `edge_prob`. Connected by construction.
pub fn random_graph<W: Weight>(
    n: usize,
    edge_prob: f64,
    seed: u64,
    weight_max: u64,
) -> Instance<W> {
    assert!(n >= 1, "a graph needs a vertex");
    assert!(
        (0.0..=1.0).contains(&edge_prob),
        "edge probability must lie in [0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<usize> = (0..n).collect();
    names.shuffle(&mut rng);
    let name = |i: usize| padded("v", names[i], n);
    let mut b = InstanceBuilder::new(Variant::NoReturn, name(0));
    for i in 0..n {
        b.add_vertex(name(i), W::of(rng.gen_range(0..=weight_max)));
    }
    let mut tree_edge = vec![usize::MAX; n];
    for (i, slot) in tree_edge.iter_mut().enumerate().skip(1) {
        *slot = rng.gen_range(0..i);
    }
    let mut count = 0;
    let total_pairs = n * (n - 1) / 2;
    for (j, &up) in tree_edge.iter().enumerate().skip(1) {
        for i in 0..j {
            if up == i || rng.gen_bool(edge_prob) {
                b.add_edge(
                    padded("e", count, total_pairs),
                    name(i),
                    name(j),
                    W::of(rng.gen_range(0..=weight_max)),
                );
                count += 1;
            }
        }
    }
    b.build().expect("random graph is valid")
}
