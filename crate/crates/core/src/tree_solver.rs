//! Exact solvers on trees.
//!
//! Return variant: visit the top-level collected subtrees by decreasing
//! dominating weight, exploring each one completely before leaving it.
//!
//! No-return variant: fix the last leaf `b_t`. At every level of the
//! recursive decomposition on the way down to `b_t`, the sibling subtrees not
//! containing `b_t` are explored first, then the search descends into the one
//! that does. With `P_0 = N - demand(C)` and `P_i = P_{i-1} + y_i` over the
//! children of `C`, leaving child `i` costs `A_i = x_i + P_i` agents and
//! entering `C` costs `x_C + N - demand(C)`; the optimum over `b_t` falls out
//! of one bottom-up pass.

use serde::Serialize;

use crate::decomposition::{
    recursive_decomposition, top_decomposition, Decomposition, TopDecomposition,
};
use crate::error::{Error, Result};
use crate::instance::{TreeInstance, Variant, VertexId};
use crate::schedule::{count_resolved_as, Schedule};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    TreeReturn,
    TreeNoReturn,
    MstApprox,
    DfsBaseline,
    Oracle,
}

/// A solver result. `visit_order` lists leaves in order of first visit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution<W> {
    pub total: W,
    #[serde(rename = "end")]
    pub end_vertex: VertexId,
    #[serde(rename = "order")]
    pub visit_order: Vec<VertexId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    #[serde(skip)]
    pub method: Method,
}

impl<W: Weight> Solution<W> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Build the explicit walk. It can be quadratic in the tree size.
    pub emit_schedule: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            emit_schedule: true,
        }
    }
}

/// Counter values after one collected subtree in the return count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReturnStep<W> {
    /// Position in the top decomposition.
    pub subtree: usize,
    /// Remaining demand of the subtree itself.
    pub subtree_demand: W,
    /// Demand on the path up to the nearest already settled vertex.
    pub path_demand: W,
    /// `curr` after subtracting both demands.
    pub deducted: W,
    pub add: W,
    /// `curr` after topping up to the dominating weight.
    pub curr: W,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnCount<W> {
    pub total: W,
    pub add: W,
    pub steps: Vec<ReturnStep<W>>,
    pub decomposition: TopDecomposition<W>,
}

/// Counts the agents for visiting the top-level subtrees in order.
///
/// `curr` starts at `N`. For each subtree, its not yet settled demand and the
/// not yet settled vertices on the path back to settled territory are
/// subtracted; if fewer than the dominating weight remain, the shortfall is
/// added. A final empty group gets one extra agent.
pub fn return_count<W: Weight>(tree: &TreeInstance<W>) -> ReturnCount<W> {
    let top = top_decomposition(tree);
    let n = tree.len();
    let l = tree.layout();
    // everything below is indexed by preorder position
    let mut owner: Vec<usize> = vec![usize::MAX; n];
    let mut remaining: Vec<W> = vec![W::zero(); top.subtrees.len()];
    for (i, s) in top.subtrees.iter().enumerate() {
        let root = s.root_pos;
        for &leaf in top.positions(i) {
            let mut u = leaf;
            while owner[u] == usize::MAX {
                owner[u] = i;
                remaining[i] = remaining[i] + l.w_v[u];
                if u == root {
                    break;
                }
                u = l.up[u];
            }
        }
    }

    let mut marked = vec![false; n];
    let mut curr = tree.total_demand();
    let mut add = W::zero();
    let mut steps = Vec::with_capacity(top.subtrees.len());
    for (i, s) in top.subtrees.iter().enumerate() {
        let root = s.root_pos;
        let subtree_demand = remaining[i];
        let mut path_demand = W::zero();
        let mut u = l.up[root];
        while u != usize::MAX && !marked[u] {
            marked[u] = true;
            let w = l.w_v[u];
            let o = owner[u];
            if o != usize::MAX && o != i {
                remaining[o] = remaining[o] - w;
            }
            path_demand = path_demand + w;
            u = l.up[u];
        }
        for &leaf in top.positions(i) {
            let mut u = leaf;
            while !marked[u] && owner[u] == i {
                marked[u] = true;
                if u == root {
                    break;
                }
                u = l.up[u];
            }
        }
        curr = curr - subtree_demand - path_demand;
        let deducted = curr;
        if curr < s.x {
            add = add + (s.x - curr);
            curr = s.x;
        }
        steps.push(ReturnStep {
            subtree: i,
            subtree_demand,
            path_demand,
            deducted,
            add,
            curr,
        });
    }
    // the group comes home holding exactly `add` agents
    if add.is_zero() {
        add = W::one();
    }
    ReturnCount {
        total: tree.total_demand() + add,
        add,
        steps,
        decomposition: top,
    }
}

pub fn solve_return<W: Weight>(tree: &TreeInstance<W>) -> Solution<W> {
    solve_return_with(tree, SolveOptions::default())
}

pub fn solve_return_with<W: Weight>(tree: &TreeInstance<W>, options: SolveOptions) -> Solution<W> {
    let count = return_count(tree);
    let mut order = Vec::new();
    let mut emitter = options.emit_schedule.then(|| Emitter::new(tree));
    let top = &count.decomposition;
    for (i, s) in top.subtrees.iter().enumerate() {
        // members are already in preorder
        order.extend_from_slice(top.members(i));
        if let Some(em) = emitter.as_mut() {
            em.goto(s.root);
            em.explore(s.root, top.members(i));
        }
    }
    let schedule = emitter.map(|mut em| {
        em.goto(tree.root());
        em.finish(Variant::Return, count.total)
    });
    Solution {
        total: count.total,
        end_vertex: tree.vertex_id(tree.root()).clone(),
        visit_order: order.iter().map(|&l| tree.vertex_id(l).clone()).collect(),
        schedule,
        method: Method::TreeReturn,
    }
}

/// Agents needed to end in `leaf`, visiting everything else first.
pub fn solve_noreturn_fixed_leaf<W: Weight>(
    tree: &TreeInstance<W>,
    leaf: &str,
) -> Result<Solution<W>> {
    solve_noreturn_fixed_leaf_with(tree, leaf, SolveOptions::default())
}

pub fn solve_noreturn_fixed_leaf_with<W: Weight>(
    tree: &TreeInstance<W>,
    leaf: &str,
    options: SolveOptions,
) -> Result<Solution<W>> {
    let b = tree
        .vertex_index(leaf)
        .filter(|&b| tree.is_leaf(b))
        .ok_or_else(|| Error::NotALeaf(leaf.to_string()))?;
    let dec = recursive_decomposition(tree);
    let chain = dec.chain(b).expect("every leaf has a leaf cluster");
    let n = tree.total_demand();
    let mut total = n;
    for (level, &c) in chain.iter().enumerate() {
        let cl = dec.cluster(c);
        if level > 0 {
            total = total.max(entry(cl.x, n, cl.demand));
        }
        let Some(&next) = chain.get(level + 1) else {
            break;
        };
        let mut settled = n - cl.demand;
        for &k in dec.children(c) {
            if k == next {
                break;
            }
            settled = settled + dec.cluster(k).y;
            total = total.max(dec.cluster(k).x + settled);
        }
    }
    Ok(noreturn_solution(tree, &dec, &chain, total, options))
}

pub fn solve_noreturn<W: Weight>(tree: &TreeInstance<W>) -> Solution<W> {
    solve_noreturn_with(tree, SolveOptions::default())
}

pub fn solve_noreturn_with<W: Weight>(
    tree: &TreeInstance<W>,
    options: SolveOptions,
) -> Solution<W> {
    let dec = recursive_decomposition(tree);
    let n = tree.total_demand();
    if dec.top().is_empty() {
        return Solution {
            total: n,
            end_vertex: tree.vertex_id(tree.root()).clone(),
            visit_order: Vec::new(),
            schedule: options
                .emit_schedule
                .then(|| Schedule::new(tree.vertex_id(tree.root()).clone())),
            method: Method::TreeNoReturn,
        };
    }
    let (total, chain) = best_chain(&dec, n);
    noreturn_solution(tree, &dec, &chain, total, options)
}

/// Optimum of the return variant, without building a visit order.
pub fn return_total<W: Weight>(tree: &TreeInstance<W>) -> W {
    return_count(tree).total
}

/// Optimum of the no-return variant over all end leaves, without building a
/// visit order.
pub fn noreturn_total<W: Weight>(tree: &TreeInstance<W>) -> W {
    let dec = recursive_decomposition(tree);
    let n = tree.total_demand();
    if dec.top().is_empty() {
        return n;
    }
    best_chain(&dec, n).0
}

/// Best total over all end leaves and the cluster chain leading to the best
/// end leaf, pseudo-root first.
fn best_chain<W: Weight>(dec: &Decomposition<W>, n: W) -> (W, Vec<usize>) {
    let pseudo = dec.pseudo_root();
    // clusters are stored children first, so one forward pass suffices
    let mut g: Vec<W> = vec![W::zero(); dec.clusters().len()];
    let mut pick: Vec<usize> = vec![usize::MAX; dec.clusters().len()];
    for (c, cl) in dec.clusters().enumerate() {
        let enter = if c == pseudo {
            W::zero()
        } else {
            entry(cl.x, n, cl.demand)
        };
        if dec.children(c).is_empty() {
            g[c] = enter;
            continue;
        }
        let mut settled = n - cl.demand;
        let mut prefix = W::zero();
        let mut best: Option<(W, usize)> = None;
        for &k in dec.children(c) {
            let cand = prefix.max(g[k]);
            if best.is_none_or(|(b, _)| cand < b) {
                best = Some((cand, k));
            }
            settled = settled + dec.cluster(k).y;
            prefix = prefix.max(dec.cluster(k).x + settled);
        }
        let (b, k) = best.unwrap();
        g[c] = enter.max(b);
        pick[c] = k;
    }

    let mut chain = vec![pseudo];
    let mut c = pseudo;
    while pick[c] != usize::MAX {
        c = pick[c];
        chain.push(c);
    }
    (n.max(g[pseudo]), chain)
}

fn entry<W: Weight>(x: W, n: W, demand: W) -> W {
    x + (n - demand)
}

fn noreturn_solution<W: Weight>(
    tree: &TreeInstance<W>,
    dec: &Decomposition<W>,
    chain: &[usize],
    total: W,
    options: SolveOptions,
) -> Solution<W> {
    let pre = tree.preorder();
    let last = dec.cluster(*chain.last().unwrap()).root;
    let mut order = Vec::with_capacity(dec.members(chain[0]).len());
    let mut emitter = options.emit_schedule.then(|| Emitter::new(tree));
    let mut keyed: Vec<usize> = Vec::new();
    for pair in chain.windows(2) {
        let (c, next) = (pair[0], pair[1]);
        for &k in dec.children(c) {
            if k == next {
                continue;
            }
            keyed.clear();
            keyed.extend_from_slice(dec.member_positions(k));
            keyed.sort_unstable();
            let from = order.len();
            order.extend(keyed.iter().map(|&i| pre[i]));
            if let Some(em) = emitter.as_mut() {
                let root = dec.cluster(k).root;
                em.goto(root);
                em.explore(root, &order[from..]);
            }
        }
    }
    order.push(last);
    let schedule = emitter.map(|mut em| {
        em.goto(last);
        em.finish(Variant::NoReturn, total)
    });
    Solution {
        total,
        end_vertex: tree.vertex_id(last).clone(),
        visit_order: order.iter().map(|&l| tree.vertex_id(l).clone()).collect(),
        schedule,
        method: Method::TreeNoReturn,
    }
}

/// Solves the variant recorded in the instance.
pub fn solve_tree<W: Weight>(tree: &TreeInstance<W>, options: SolveOptions) -> Solution<W> {
    match tree.instance().variant() {
        Variant::Return => solve_return_with(tree, options),
        Variant::NoReturn => solve_noreturn_with(tree, options),
    }
}

/// Walk that visits leaves in `order` (collected subtree by collected
/// subtree), exploring each subtree by depth-first search. The walk ends at
/// the root for the return variant and at the last leaf otherwise.
pub fn emit_schedule<W: Weight>(tree: &TreeInstance<W>, order: &[VertexId]) -> Result<Schedule> {
    let mut leaves = Vec::with_capacity(order.len());
    let mut seen = vec![false; tree.len()];
    for id in order {
        let l = tree
            .vertex_index(id.as_str())
            .filter(|&l| tree.is_leaf(l))
            .ok_or_else(|| Error::InconsistentOrder(format!("`{id}` is not a leaf")))?;
        if std::mem::replace(&mut seen[l], true) {
            return Err(Error::InconsistentOrder(format!(
                "leaf `{id}` appears twice"
            )));
        }
        leaves.push(l);
    }
    if let Some(l) = tree.leaves().find(|&l| !seen[l]) {
        return Err(Error::InconsistentOrder(format!(
            "leaf `{}` is missing",
            tree.vertex_id(l)
        )));
    }
    let mut em = Emitter::new(tree);
    for &l in &leaves {
        em.goto(l);
    }
    if tree.instance().variant() == Variant::Return {
        em.goto(tree.root());
    }
    Ok(Schedule::from_indices(tree.instance(), &em.steps))
}

struct Emitter<'a, W> {
    tree: &'a TreeInstance<W>,
    at: usize,
    steps: Vec<(usize, usize)>,
    stamp: Vec<u32>,
    round: u32,
}

impl<'a, W: Weight> Emitter<'a, W> {
    fn new(tree: &'a TreeInstance<W>) -> Self {
        Self {
            tree,
            at: tree.root(),
            steps: Vec::new(),
            stamp: vec![0; tree.len()],
            round: 0,
        }
    }

    fn goto(&mut self, to: usize) {
        if to != self.at {
            self.steps.extend(self.tree.path_steps(self.at, to));
            self.at = to;
        }
    }

    /// Depth-first walk over the union of paths from `root` to `members`,
    /// starting and ending at `root`.
    fn explore(&mut self, root: usize, members: &[usize]) {
        debug_assert_eq!(self.at, root);
        self.round += 1;
        let round = self.round;
        for &leaf in members {
            let mut v = leaf;
            while v != root && self.stamp[v] != round {
                self.stamp[v] = round;
                v = self.tree.parent(v).expect("members lie below the root");
            }
        }
        let tree = self.tree;
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            let children = tree.children(v);
            match children[i..].iter().position(|&c| self.stamp[c] == round) {
                Some(off) => {
                    top.1 = i + off + 1;
                    let c = children[i + off];
                    self.steps.push((tree.parent_edge(c).unwrap(), c));
                    stack.push((c, 0));
                }
                None => {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        self.steps.push((tree.parent_edge(v).unwrap(), p));
                    }
                }
            }
        }
        self.at = root;
    }

    fn finish(self, variant: Variant, total: W) -> Schedule {
        let counted = count_resolved_as(self.tree.instance(), &self.steps, variant).total;
        assert_eq!(
            counted, total,
            "emitted walk does not realize the computed optimum"
        );
        Schedule::from_indices(self.tree.instance(), &self.steps)
    }
}
