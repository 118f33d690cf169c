//! General graphs: solve exactly on a minimum spanning tree, or walk a plain
//! depth-first traversal.

use serde::Serialize;

use crate::error::Result;
use crate::instance::{as_tree, Instance, TreeInstance, Variant};
use crate::schedule::{count_resolved, Schedule};
use crate::tree_solver::{solve_tree, Method, Solution, SolveOptions};
use crate::weight::Weight;

/// Tree solution on the minimum spanning tree together with a certified
/// lower bound on the true optimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxSolution<W> {
    #[serde(flatten)]
    pub solution: Solution<W>,
    pub lower_bound: W,
    pub ratio_certificate: f64,
}

impl<W: Weight> ApproxSolution<W> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialization cannot fail")
    }
}

struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
        true
    }
}

/// Kruskal's algorithm; equal weights are taken in edge id order.
pub fn minimum_spanning_tree<W: Weight>(instance: &Instance<W>) -> Result<TreeInstance<W>> {
    let mut order: Vec<usize> = (0..instance.edge_count()).collect();
    order.sort_by_key(|&e| (instance.edge_weight(e), e));
    let mut dsu = Dsu::new(instance.vertex_count());
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&e| {
            let edge = &instance.edges()[e];
            dsu.union(edge.u, edge.v)
        })
        .collect();
    as_tree(instance.restrict_edges(&keep)?)
}

/// Lower bound used by the approximation: `N` (plus the reporting agent
/// for the return variant) and the bottleneck spanning-tree edge.
pub fn approx_lower_bound<W: Weight>(instance: &Instance<W>, mst: &TreeInstance<W>) -> W {
    let n = instance.total_demand();
    let base = match instance.variant() {
        Variant::Return => n + W::one(),
        Variant::NoReturn => n,
    };
    base.max(mst.instance().max_edge_weight())
}

pub fn solve_mst_approx<W: Weight>(instance: &Instance<W>) -> Result<ApproxSolution<W>> {
    solve_mst_approx_with(instance, SolveOptions::default())
}

pub fn solve_mst_approx_with<W: Weight>(
    instance: &Instance<W>,
    options: SolveOptions,
) -> Result<ApproxSolution<W>> {
    let mst = minimum_spanning_tree(instance)?;
    let mut solution = solve_tree(&mst, options);
    solution.method = Method::MstApprox;
    let lower_bound = approx_lower_bound(instance, &mst);
    let ratio_certificate = if lower_bound.is_zero() {
        1.0
    } else {
        solution.total.as_u128() as f64 / lower_bound.as_u128() as f64
    };
    Ok(ApproxSolution {
        solution,
        lower_bound,
        ratio_certificate,
    })
}

/// Depth-first walk visiting neighbours in id order. Under the no-return
/// variant the walk stops at the last newly discovered vertex.
pub fn dfs_baseline<W: Weight>(instance: &Instance<W>) -> Solution<W> {
    let n = instance.vertex_count();
    let start = instance.start();
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut order = vec![start];
    let mut steps: Vec<(usize, usize)> = Vec::new();
    let mut last_new = 0;
    // (vertex, edge used to enter it, next neighbour position)
    let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(start, None, 0)];
    while let Some(top) = stack.last_mut() {
        let (v, via, i) = *top;
        let nbrs = instance.neighbors(v);
        match nbrs[i..].iter().position(|&(_, u)| !seen[u]) {
            Some(off) => {
                top.2 = i + off + 1;
                let (e, u) = nbrs[i + off];
                seen[u] = true;
                order.push(u);
                steps.push((e, u));
                last_new = steps.len();
                stack.push((u, Some(e), 0));
            }
            None => {
                stack.pop();
                if let (Some(e), Some(&(p, _, _))) = (via, stack.last()) {
                    steps.push((e, p));
                }
            }
        }
    }
    if instance.variant() == Variant::NoReturn {
        steps.truncate(last_new);
    }
    let total = count_resolved(instance, &steps).total;
    let end = steps.last().map_or(start, |&(_, v)| v);
    Solution {
        total,
        end_vertex: instance.vertex_id(end).clone(),
        visit_order: order
            .iter()
            .map(|&v| instance.vertex_id(v).clone())
            .collect(),
        schedule: Some(Schedule::from_indices(instance, &steps)),
        method: Method::DfsBaseline,
    }
}
