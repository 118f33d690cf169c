//! Dominating edges and collected subtrees.
//!
//! For a leaf `b`, the dominating edge is the heaviest edge on the path from
//! the root to `b`, taking the one nearest the root among equal maxima. All
//! leaves sharing a dominating edge form a collected subtree, rooted at the
//! lower endpoint of that edge.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::heap::{HeapRef, PairingArena};
use crate::instance::{EdgeId, Layout, TreeInstance, VertexId};
use crate::weight::Weight;

const NONE: usize = usize::MAX;

fn opt(i: usize) -> Option<usize> {
    (i != NONE).then_some(i)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatingEdge<W> {
    pub leaf: usize,
    pub edge: usize,
    /// Endpoint of `edge` nearer the leaf.
    pub lower: usize,
    pub weight: W,
}

impl<W: Weight> DominatingEdge<W> {
    pub fn edge_id<'a>(&self, tree: &'a TreeInstance<W>) -> &'a EdgeId {
        tree.instance().edge_id(self.edge)
    }

    pub fn lower_id<'a>(&self, tree: &'a TreeInstance<W>) -> &'a VertexId {
        tree.vertex_id(self.lower)
    }
}

pub fn dominating_edge<W: Weight>(
    tree: &TreeInstance<W>,
    leaf: usize,
) -> Result<DominatingEdge<W>> {
    if leaf >= tree.len() || !tree.is_leaf(leaf) {
        return Err(Error::NotALeaf(
            tree.instance()
                .vertices()
                .get(leaf)
                .map_or_else(|| leaf.to_string(), |v| v.id.to_string()),
        ));
    }
    let mut best: Option<(W, usize, usize)> = None;
    let mut v = leaf;
    while let (Some(p), Some(e)) = (tree.parent(v), tree.parent_edge(v)) {
        let w = tree.instance().edge_weight(e);
        // walking upwards, so `>=` moves ties towards the root
        if best.is_none_or(|(bw, _, _)| w >= bw) {
            best = Some((w, e, v));
        }
        v = p;
    }
    let (weight, edge, lower) = best.expect("a leaf is not the root");
    Ok(DominatingEdge {
        leaf,
        edge,
        lower,
        weight,
    })
}

/// One collected subtree of the whole tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopSubtree<W> {
    pub root: usize,
    pub edge: usize,
    pub x: W,
    pub(crate) root_pos: usize,
    // range of the member leaves in the flat member list
    start: usize,
    end: usize,
}

/// The partition of all leaves into collected subtrees, in visiting order:
/// decreasing dominating weight, ties by root index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopDecomposition<W> {
    pub subtrees: Vec<TopSubtree<W>>,
    /// Position in `subtrees` of the subtree owning each leaf.
    pub owner: Vec<Option<usize>>,
    members: Vec<usize>,
    positions: Vec<usize>,
}

impl<W> TopDecomposition<W> {
    /// Member leaves of subtree `i`, in preorder.
    pub fn members(&self, i: usize) -> &[usize] {
        let s = &self.subtrees[i];
        &self.members[s.start..s.end]
    }

    /// Preorder positions of `members(i)`.
    pub(crate) fn positions(&self, i: usize) -> &[usize] {
        let s = &self.subtrees[i];
        &self.positions[s.start..s.end]
    }
}

pub fn top_decomposition<W: Weight>(tree: &TreeInstance<W>) -> TopDecomposition<W> {
    let n = tree.len();
    let pre = tree.preorder();
    let l = tree.layout();
    // best[i] = (weight, position of lower endpoint) of the dominating edge on
    // the root path of position i
    let mut best: Vec<(W, usize)> = vec![(W::zero(), 0); n];
    let mut slot_of: Vec<usize> = vec![NONE; n];
    // (x, root, root position, leaf count) per subtree, in discovery order
    let mut found: Vec<(W, usize, usize, usize)> = Vec::new();
    let mut leaf_slot: Vec<(usize, usize)> = Vec::new();
    for i in 1..n {
        let (p, w) = (l.up[i], l.w_in[i]);
        best[i] = if p != 0 && best[p].0 >= w {
            best[p]
        } else {
            (w, i)
        };
        if l.is_leaf(i) {
            let (x, r) = best[i];
            if slot_of[r] == NONE {
                slot_of[r] = found.len();
                found.push((x, pre[r], r, 0));
            }
            found[slot_of[r]].3 += 1;
            leaf_slot.push((i, slot_of[r]));
        }
    }
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        found[b]
            .0
            .cmp(&found[a].0)
            .then(found[a].1.cmp(&found[b].1))
    });
    let mut rank = vec![0; found.len()];
    let mut subtrees = Vec::with_capacity(found.len());
    let mut at = 0;
    for (k, &s) in order.iter().enumerate() {
        rank[s] = k;
        let (x, root, root_pos, count) = found[s];
        subtrees.push(TopSubtree {
            root,
            edge: l.edge[root_pos],
            x,
            root_pos,
            start: at,
            end: at + count,
        });
        at += count;
    }
    let mut cursor: Vec<usize> = subtrees.iter().map(|s| s.start).collect();
    let mut members = vec![0; at];
    let mut positions = vec![0; at];
    let mut owner = vec![None; n];
    for (i, s) in leaf_slot {
        let k = rank[s];
        members[cursor[k]] = pre[i];
        positions[cursor[k]] = i;
        cursor[k] += 1;
        owner[pre[i]] = Some(k);
    }
    TopDecomposition {
        subtrees,
        owner,
        members,
        positions,
    }
}

/// A node of the recursive decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cluster<W> {
    pub root: usize,
    /// Incoming edge of `root`; `None` only for the pseudo-root.
    pub edge: Option<usize>,
    pub x: W,
    /// Final annotation, including demand of vertices above `root` that was
    /// attributed to this cluster after it was formed.
    pub y: W,
    /// Annotation at the moment the cluster was formed.
    pub demand: W,
    pub parent: Option<usize>,
}

/// Snapshot of a cluster at the moment it was formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formation<W> {
    pub cluster: usize,
    pub at: usize,
    pub x: W,
    pub y: W,
}

/// The recursive decomposition. Every cluster is formed at a vertex from the
/// clusters below it whose `x` does not exceed that vertex's incoming edge.
/// The last cluster is a pseudo-root with `x = 0` and `y = N` whose children
/// are the top-level collected subtrees.
///
/// Clusters are numbered in formation order, so children come before their
/// parents. Storage is one column per field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition<W> {
    root: Vec<usize>,
    // preorder position of root
    at: Vec<usize>,
    edge: Vec<usize>,
    x: Vec<W>,
    y: Vec<W>,
    demand: Vec<W>,
    parent: Vec<usize>,
    // children of c are child_list[child_start[c]..child_start[c + 1]]
    child_start: Vec<usize>,
    child_list: Vec<usize>,
    leaf_start: Vec<usize>,
    leaf_end: Vec<usize>,
    leaves: Vec<usize>,
    leaf_positions: Vec<usize>,
    leaf_cluster: Vec<usize>,
}

impl<W: Weight> Decomposition<W> {
    fn with_capacity(m: usize, n: usize) -> Self {
        let mut child_start = Vec::with_capacity(m + 1);
        child_start.push(0);
        Decomposition {
            root: Vec::with_capacity(m),
            at: Vec::with_capacity(m),
            edge: Vec::with_capacity(m),
            x: Vec::with_capacity(m),
            y: Vec::with_capacity(m),
            demand: Vec::with_capacity(m),
            parent: Vec::with_capacity(m),
            child_start,
            child_list: Vec::with_capacity(m),
            leaf_start: Vec::new(),
            leaf_end: Vec::with_capacity(m),
            leaves: Vec::new(),
            leaf_positions: Vec::new(),
            leaf_cluster: vec![NONE; n],
        }
    }

    /// Adds a cluster whose children are the entries of `child_list` pushed
    /// since the previous cluster.
    fn push(&mut self, root: usize, at: usize, edge: usize, x: W, y: W) -> usize {
        let id = self.root.len();
        let kids = &self.child_list[self.child_start[id]..];
        let mut leaves = 0;
        for &c in kids {
            self.parent[c] = id;
            leaves += self.leaf_end[c];
        }
        // leaf_end holds leaf counts until the layout pass
        self.leaf_end.push(if kids.is_empty() && edge != NONE {
            1
        } else {
            leaves
        });
        self.root.push(root);
        self.at.push(at);
        self.edge.push(edge);
        self.x.push(x);
        self.y.push(y);
        self.demand.push(y);
        self.parent.push(NONE);
        self.child_start.push(self.child_list.len());
        id
    }

    /// All clusters by index, the pseudo-root last.
    pub fn clusters(&self) -> impl ExactSizeIterator<Item = Cluster<W>> + '_ {
        (0..self.root.len()).map(|c| self.cluster(c))
    }

    pub fn cluster(&self, c: usize) -> Cluster<W> {
        Cluster {
            root: self.root[c],
            edge: opt(self.edge[c]),
            x: self.x[c],
            y: self.y[c],
            demand: self.demand[c],
            parent: opt(self.parent[c]),
        }
    }

    pub fn pseudo_root(&self) -> usize {
        self.root.len() - 1
    }

    /// Child clusters by decreasing `x`, ties by root index. Empty exactly
    /// for leaf clusters, whose `root` is the leaf itself.
    pub fn children(&self, c: usize) -> &[usize] {
        &self.child_list[self.child_start[c]..self.child_start[c + 1]]
    }

    /// Top-level collected subtrees in visiting order.
    pub fn top(&self) -> &[usize] {
        self.children(self.pseudo_root())
    }

    /// Member leaves of a cluster, in hierarchy order.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.leaves[self.leaf_start[c]..self.leaf_end[c]]
    }

    /// Preorder positions of `members(c)`.
    pub(crate) fn member_positions(&self, c: usize) -> &[usize] {
        &self.leaf_positions[self.leaf_start[c]..self.leaf_end[c]]
    }

    /// The leaf cluster of a leaf vertex.
    pub fn leaf_cluster(&self, leaf: usize) -> Option<usize> {
        self.leaf_cluster.get(leaf).copied().and_then(opt)
    }

    /// Clusters from the pseudo-root down to the leaf cluster of `leaf`.
    pub fn chain(&self, leaf: usize) -> Option<Vec<usize>> {
        let mut c = self.leaf_cluster(leaf)?;
        let mut chain = vec![c];
        while let Some(p) = opt(self.parent[c]) {
            chain.push(p);
            c = p;
        }
        chain.reverse();
        Some(chain)
    }

    /// Clusters in formation order, with their annotations at that time.
    pub fn formations(&self) -> impl ExactSizeIterator<Item = Formation<W>> + '_ {
        (0..self.len()).map(|c| Formation {
            cluster: c,
            at: self.root[c],
            x: self.x[c],
            y: self.demand[c],
        })
    }

    /// Number of clusters excluding the pseudo-root.
    pub fn len(&self) -> usize {
        self.root.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `T(<leaf,...>)^{x,y} @ <root>` lines, children indented by two spaces.
    pub fn dump(&self, tree: &TreeInstance<W>) -> String {
        let mut out = String::new();
        let mut stack: Vec<(usize, usize)> = self.top().iter().rev().map(|&c| (c, 0)).collect();
        while let Some((c, indent)) = stack.pop() {
            let names: Vec<&str> = self
                .members(c)
                .iter()
                .map(|&l| tree.vertex_id(l).as_str())
                .collect();
            let _ = writeln!(
                out,
                "{:indent$}T({})^{{{},{}}} @ {}",
                "",
                names.join(","),
                self.x[c],
                self.y[c],
                tree.vertex_id(self.root[c]),
                indent = indent
            );
            stack.extend(self.children(c).iter().rev().map(|&k| (k, indent + 2)));
        }
        out
    }

    // larger x first, ties by smaller root index
    fn outranks(&self, a: usize, b: usize) -> bool {
        self.x[a] > self.x[b] || (self.x[a] == self.x[b] && self.root[a] < self.root[b])
    }
}

/// Builds the recursive decomposition bottom-up with mergeable heaps.
///
/// A leaf starts a cluster `(x = incoming weight, y = leaf demand)`. At an
/// inner vertex the children's heaps are melded, the vertex demand is added
/// to the `y` of the highest-`x` cluster, and every cluster with `x` at most
/// the incoming edge weight is extracted into a new cluster rooted there.
pub fn recursive_decomposition<W: Weight>(tree: &TreeInstance<W>) -> Decomposition<W> {
    let n = tree.len();
    let mut d = Decomposition::with_capacity(2 * n, n);
    let mut arena: PairingArena<(W, usize), usize> = PairingArena::with_capacity(n);
    let mut taken: Vec<((W, usize), usize)> = Vec::new();

    // Work in preorder positions: a vertex's heap and best cluster are pushed
    // into its parent's slot once it is done, so the pass reads memory in order.
    let pre = tree.preorder();
    let Layout {
        up,
        w_in,
        w_v,
        edge,
        ..
    } = tree.layout();
    let mut heap: Vec<HeapRef> = vec![None; n];
    let mut best: Vec<usize> = vec![NONE; n];

    // decreasing x, ties by root index; heap keys are unique
    let by_rank = |a: &((W, usize), usize), b: &((W, usize), usize)| {
        b.0 .0.cmp(&a.0 .0).then(a.0 .1.cmp(&b.0 .1))
    };

    for i in (1..n).rev() {
        let v = pre[i];
        let w = w_in[i];
        let t = best[i];
        let (h, top) = if t == NONE {
            // nothing below a non-root vertex: it is a leaf
            let c = d.push(v, i, edge[i], w, w_v[i]);
            d.leaf_cluster[v] = c;
            (arena.singleton((w, v), c), c)
        } else {
            d.y[t] = d.y[t] + w_v[i];
            taken.clear();
            let rest = arena.pop_while(heap[i].take(), |&(x, _)| x <= w, &mut taken);
            if taken.is_empty() {
                (rest, t)
            } else {
                taken.sort_unstable_by(by_rank);
                d.child_list.extend(taken.iter().map(|&(_, c)| c));
                let y = taken.iter().map(|&(_, c)| d.y[c]).sum();
                let c = d.push(v, i, edge[i], w, y);
                // the best cluster is either still in the heap or was
                // extracted together with everything else
                let top = if d.x[t] > w { t } else { c };
                (arena.push(rest, (w, v), c), top)
            }
        };
        let p = up[i];
        heap[p] = arena.meld(heap[p], h);
        if best[p] == NONE || d.outranks(top, best[p]) {
            best[p] = top;
        }
    }
    if let Some(&t) = best.first().filter(|&&t| t != NONE) {
        d.y[t] = d.y[t] + w_v[0];
    }

    let mut top = arena.drain(heap.first_mut().and_then(Option::take));
    top.sort_unstable_by(by_rank);
    d.child_list.extend(top.iter().map(|&(_, c)| c));
    let pseudo = d.push(tree.root(), 0, NONE, W::zero(), tree.total_demand());

    // Member leaves are laid out in hierarchy order so that every cluster owns
    // a contiguous range. Leaf counts were gathered at push time; offsets go
    // backwards since children precede parents.
    let m = d.root.len();
    let mut start = vec![0usize; m];
    for c in (0..m).rev() {
        let mut at = start[c];
        for &k in &d.child_list[d.child_start[c]..d.child_start[c + 1]] {
            start[k] = at;
            at += d.leaf_end[k];
        }
    }
    let mut leaves = vec![0; d.leaf_end[pseudo]];
    let mut leaf_positions = vec![0; d.leaf_end[pseudo]];
    for c in 0..m {
        d.leaf_end[c] += start[c];
        if c != pseudo && d.child_start[c] == d.child_start[c + 1] {
            leaves[start[c]] = d.root[c];
            leaf_positions[start[c]] = d.at[c];
        }
    }
    d.leaf_start = start;
    d.leaves = leaves;
    d.leaf_positions = leaf_positions;
    d
}
