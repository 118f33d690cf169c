//! Problem instances: weighted graphs with a start vertex and a variant flag.
//!
//! Instances are canonical: vertices and edges are stored sorted by id, so
//! internal indices follow id order and every tie-break that mentions ids can
//! compare indices instead.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Vertex identifier, unique within an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(Arc<str>);

/// Edge identifier, unique within an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(Arc<str>);

macro_rules! string_id {
    ($name:ident) => {
        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into().into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.into())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s.into())
            }
        }
    };
}

string_id!(VertexId);
string_id!(EdgeId);

/// Whether a nonempty group has to report back at the start vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Return,
    NoReturn,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Return => "return",
            Variant::NoReturn => "no_return",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex<W> {
    pub id: VertexId,
    pub weight: W,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<W> {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
    pub weight: W,
}

impl<W> Edge<W> {
    /// The endpoint opposite to `from`, if `from` is an endpoint.
    pub fn other(&self, from: usize) -> Option<usize> {
        if from == self.u {
            Some(self.v)
        } else if from == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

/// Lower and upper bounds on the optimal number of agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds<W> {
    pub lower: W,
    pub upper: W,
}

/// A connected, simple, vertex- and edge-weighted graph with a start vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance<W> {
    variant: Variant,
    start: usize,
    vertices: Vec<Vertex<W>>,
    edges: Vec<Edge<W>>,
    adjacency: Vec<Vec<(usize, usize)>>,
    vertex_index: HashMap<VertexId, usize>,
    edge_index: HashMap<EdgeId, usize>,
    total_demand: W,
    max_edge: W,
}

impl<W: Weight> Instance<W> {
    /// Validates and canonicalizes an instance.
    pub fn new(
        variant: Variant,
        start: impl Into<VertexId>,
        vertices: Vec<(VertexId, W)>,
        edges: Vec<(EdgeId, VertexId, VertexId, W)>,
    ) -> Result<Self> {
        let start = start.into();
        let mut vertices = vertices;
        vertices.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in vertices.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateId {
                    kind: "vertex",
                    id: pair[0].0.to_string(),
                });
            }
        }
        let vertex_index: HashMap<VertexId, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (id.clone(), i))
            .collect();
        let start_idx = *vertex_index
            .get(&start)
            .ok_or_else(|| Error::UnknownStart(start.to_string()))?;

        let mut edges = edges;
        edges.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in edges.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateId {
                    kind: "edge",
                    id: pair[0].0.to_string(),
                });
            }
        }

        let lookup = |edge: &EdgeId, v: &VertexId| {
            vertex_index
                .get(v)
                .copied()
                .ok_or_else(|| Error::UnknownEndpoint {
                    edge: edge.to_string(),
                    vertex: v.to_string(),
                })
        };
        let mut seen_pairs: HashMap<(usize, usize), EdgeId> = HashMap::new();
        let mut built = Vec::with_capacity(edges.len());
        for (id, a, b, weight) in edges {
            let u = lookup(&id, &a)?;
            let v = lookup(&id, &b)?;
            if u == v {
                return Err(Error::SelfLoop(id.to_string()));
            }
            let key = (u.min(v), u.max(v));
            if let Some(prev) = seen_pairs.get(&key) {
                return Err(Error::MultiEdge(prev.to_string(), id.to_string()));
            }
            seen_pairs.insert(key, id.clone());
            built.push(Edge { id, u, v, weight });
        }

        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (e, edge) in built.iter().enumerate() {
            adjacency[edge.u].push((e, edge.v));
            adjacency[edge.v].push((e, edge.u));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(_, n)| n);
        }

        let mut total = W::zero();
        for (_, w) in &vertices {
            total = total.checked_add(w).ok_or(Error::Overflow)?;
        }
        let max_edge = built.iter().map(|e| e.weight).max().unwrap_or_else(W::zero);
        // Every total any solver reports is at most N + max(w_max, 1).
        total
            .checked_add(&max_edge.max(W::one()))
            .ok_or(Error::Overflow)?;

        let edge_index = built
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        let instance = Instance {
            variant,
            start: start_idx,
            vertices: vertices
                .into_iter()
                .map(|(id, weight)| Vertex { id, weight })
                .collect(),
            edges: built,
            adjacency,
            vertex_index,
            edge_index,
            total_demand: total,
            max_edge,
        };
        if let Some(v) = instance.first_unreachable() {
            return Err(Error::Disconnected(instance.vertices[v].id.to_string()));
        }
        Ok(instance)
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(v) = queue.pop_front() {
            for &(_, n) in &self.adjacency[v] {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    /// Parses the JSON instance format.
    pub fn from_json(text: &str) -> Result<Self> {
        parse_instance(text)
    }

    pub fn to_json(&self) -> String {
        let raw = SerInstance {
            variant: self.variant,
            start: self.vertices[self.start].id.as_str(),
            vertices: self
                .vertices
                .iter()
                .map(|v| SerVertex {
                    id: v.id.as_str(),
                    weight: v.weight,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| SerEdge {
                    id: e.id.as_str(),
                    u: self.vertices[e.u].id.as_str(),
                    v: self.vertices[e.v].id.as_str(),
                    weight: e.weight,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
    }

    /// The same graph under another variant.
    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// Rebuilds the instance with every vertex and edge weight transformed.
    pub fn map_weights(
        &self,
        mut vertex: impl FnMut(&Vertex<W>) -> W,
        mut edge: impl FnMut(&Edge<W>) -> W,
    ) -> Result<Self> {
        Instance::new(
            self.variant,
            self.vertices[self.start].id.clone(),
            self.vertices
                .iter()
                .map(|v| (v.id.clone(), vertex(v)))
                .collect(),
            self.edges
                .iter()
                .map(|e| {
                    (
                        e.id.clone(),
                        self.vertices[e.u].id.clone(),
                        self.vertices[e.v].id.clone(),
                        edge(e),
                    )
                })
                .collect(),
        )
    }

    /// The sub-instance on all vertices and the given edges.
    pub fn restrict_edges(&self, keep: &[usize]) -> Result<Self> {
        Instance::new(
            self.variant,
            self.vertices[self.start].id.clone(),
            self.vertices
                .iter()
                .map(|v| (v.id.clone(), v.weight))
                .collect(),
            keep.iter()
                .map(|&e| {
                    let e = &self.edges[e];
                    (
                        e.id.clone(),
                        self.vertices[e.u].id.clone(),
                        self.vertices[e.v].id.clone(),
                        e.weight,
                    )
                })
                .collect(),
        )
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn start_id(&self) -> &VertexId {
        &self.vertices[self.start].id
    }

    pub fn vertices(&self) -> &[Vertex<W>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `(edge index, neighbor index)` pairs, ordered by neighbor id.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn vertex_weight(&self, v: usize) -> W {
        self.vertices[v].weight
    }

    pub fn edge_weight(&self, e: usize) -> W {
        self.edges[e].weight
    }

    pub fn vertex_id(&self, v: usize) -> &VertexId {
        &self.vertices[v].id
    }

    pub fn edge_id(&self, e: usize) -> &EdgeId {
        &self.edges[e].id
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(&VertexId::from(id)).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_index.get(&EdgeId::from(id)).copied()
    }

    /// Total demand `N`, the sum of all vertex weights.
    pub fn total_demand(&self) -> W {
        self.total_demand
    }

    /// The heaviest edge weight, zero for an edgeless instance.
    pub fn max_edge_weight(&self) -> W {
        self.max_edge
    }

    /// `N <= optimum <= N + w_max`. The return variant always keeps one agent
    /// for reporting, so its upper bound is `N + max(w_max, 1)`.
    pub fn trivial_bounds(&self) -> Bounds<W> {
        let slack = match self.variant {
            Variant::NoReturn => self.max_edge,
            Variant::Return => self.max_edge.max(W::one()),
        };
        Bounds {
            lower: self.total_demand,
            upper: self.total_demand + slack,
        }
    }

    /// `|E| = |V| - 1` on a connected graph.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }
}

/// Parses the JSON instance format, rejecting unknown fields.
pub fn parse_instance<W: Weight>(text: &str) -> Result<Instance<W>> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let vertices = raw
        .vertices
        .into_iter()
        .map(|v| {
            let w = parse_weight(&v.weight, "vertex", &v.id)?;
            Ok((VertexId::new(v.id), w))
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = raw
        .edges
        .into_iter()
        .map(|e| {
            let w = parse_weight(&e.weight, "edge", &e.id)?;
            Ok((EdgeId::new(e.id), VertexId::new(e.u), VertexId::new(e.v), w))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(raw.variant, VertexId::new(raw.start), vertices, edges)
}

fn parse_weight<W: Weight>(n: &serde_json::Number, kind: &'static str, id: &str) -> Result<W> {
    if n.as_i64().is_some_and(|v| v < 0) || n.as_f64().is_some_and(|v| v < 0.0) {
        return Err(Error::NegativeWeight {
            kind,
            id: id.to_owned(),
        });
    }
    let value = n
        .as_u64()
        .ok_or_else(|| Error::Format(format!("weight of {kind} `{id}` is not an integer")))?;
    W::from(value).ok_or_else(|| Error::WeightRange {
        kind,
        id: id.to_owned(),
    })
}

/// Total demand `N`.
pub fn total_demand<W: Weight>(instance: &Instance<W>) -> W {
    instance.total_demand()
}

pub fn trivial_bounds<W: Weight>(instance: &Instance<W>) -> Bounds<W> {
    instance.trivial_bounds()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    variant: Variant,
    start: String,
    vertices: Vec<RawVertex>,
    edges: Vec<RawEdge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    id: String,
    weight: serde_json::Number,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: String,
    u: String,
    v: String,
    weight: serde_json::Number,
}

#[derive(Serialize)]
struct SerInstance<'a, W> {
    variant: Variant,
    start: &'a str,
    vertices: Vec<SerVertex<'a, W>>,
    edges: Vec<SerEdge<'a, W>>,
}

#[derive(Serialize)]
struct SerVertex<'a, W> {
    id: &'a str,
    weight: W,
}

#[derive(Serialize)]
struct SerEdge<'a, W> {
    id: &'a str,
    u: &'a str,
    v: &'a str,
    weight: W,
}

/// Incremental construction helper used by generators and tests.
#[derive(Debug, Clone)]
pub struct InstanceBuilder<W> {
    variant: Variant,
    start: VertexId,
    vertices: Vec<(VertexId, W)>,
    edges: Vec<(EdgeId, VertexId, VertexId, W)>,
}

impl<W: Weight> InstanceBuilder<W> {
    pub fn new(variant: Variant, start: impl Into<VertexId>) -> Self {
        Self {
            variant,
            start: start.into(),
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn vertex(mut self, id: impl Into<VertexId>, weight: W) -> Self {
        self.add_vertex(id, weight);
        self
    }

    pub fn edge(
        mut self,
        id: impl Into<EdgeId>,
        u: impl Into<VertexId>,
        v: impl Into<VertexId>,
        weight: W,
    ) -> Self {
        self.add_edge(id, u, v, weight);
        self
    }

    pub fn add_vertex(&mut self, id: impl Into<VertexId>, weight: W) {
        self.vertices.push((id.into(), weight));
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<EdgeId>,
        u: impl Into<VertexId>,
        v: impl Into<VertexId>,
        weight: W,
    ) {
        self.edges.push((id.into(), u.into(), v.into(), weight));
    }

    pub fn build(self) -> Result<Instance<W>> {
        Instance::new(self.variant, self.start, self.vertices, self.edges)
    }
}

/// An instance whose edges form a spanning tree, rooted at the start vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInstance<W> {
    instance: Instance<W>,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    preorder: Vec<usize>,
    layout: Layout<W>,
}

/// Per-vertex data indexed by preorder position, for passes that sweep the
/// tree bottom-up or top-down without chasing vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Layout<W> {
    /// Preorder position of each vertex.
    pub pos: Vec<usize>,
    /// Position of the parent; `usize::MAX` at the root.
    pub up: Vec<usize>,
    pub w_in: Vec<W>,
    pub w_v: Vec<W>,
    /// Edge to the parent; `usize::MAX` at the root.
    pub edge: Vec<usize>,
    /// One past the last position of the subtree.
    pub end: Vec<usize>,
}

impl<W: Weight> Layout<W> {
    fn new(
        instance: &Instance<W>,
        preorder: &[usize],
        parent: &[Option<usize>],
        parent_edge: &[Option<usize>],
    ) -> Self {
        let n = preorder.len();
        let mut pos = vec![0; n];
        for (i, &v) in preorder.iter().enumerate() {
            pos[v] = i;
        }
        let up: Vec<usize> = preorder
            .iter()
            .map(|&v| parent[v].map_or(usize::MAX, |p| pos[p]))
            .collect();
        let w_in = preorder
            .iter()
            .map(|&v| parent_edge[v].map_or_else(W::zero, |e| instance.edge_weight(e)))
            .collect();
        let w_v = preorder
            .iter()
            .map(|&v| instance.vertex_weight(v))
            .collect();
        let edge = preorder
            .iter()
            .map(|&v| parent_edge[v].unwrap_or(usize::MAX))
            .collect();
        let mut size = vec![1; n];
        for i in (1..n).rev() {
            size[up[i]] += size[i];
        }
        let end = size.iter().enumerate().map(|(i, s)| i + s).collect();
        Layout {
            pos,
            up,
            w_in,
            w_v,
            edge,
            end,
        }
    }

    /// Whether the vertex at position `i` is a leaf (non-root, no children).
    pub fn is_leaf(&self, i: usize) -> bool {
        i > 0 && self.end[i] == i + 1
    }
}

impl<W: Weight> TreeInstance<W> {
    /// Roots the instance at its start vertex. Children are ordered by id.
    pub fn new(instance: Instance<W>) -> Result<Self> {
        if !instance.is_tree() {
            return Err(Error::Cycle);
        }
        let n = instance.vertex_count();
        let root = instance.start();
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        let mut seen = vec![false; n];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for &(e, c) in instance.neighbors(v) {
                if !seen[c] {
                    seen[c] = true;
                    parent[c] = Some(v);
                    parent_edge[c] = Some(e);
                    depth[c] = depth[v] + 1;
                    children[v].push(c);
                }
            }
            stack.extend(children[v].iter().rev());
        }
        let layout = Layout::new(&instance, &preorder, &parent, &parent_edge);
        Ok(TreeInstance {
            instance,
            parent,
            parent_edge,
            children,
            depth,
            preorder,
            layout,
        })
    }

    pub fn instance(&self) -> &Instance<W> {
        &self.instance
    }

    pub(crate) fn layout(&self) -> &Layout<W> {
        &self.layout
    }

    pub fn into_instance(self) -> Instance<W> {
        self.instance
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.instance.variant = variant;
        self
    }

    pub fn root(&self) -> usize {
        self.instance.start()
    }

    pub fn len(&self) -> usize {
        self.instance.vertex_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        self.parent_edge[v]
    }

    /// Weight of the edge towards the parent; zero at the root.
    pub fn incoming_weight(&self, v: usize) -> W {
        self.parent_edge[v].map_or_else(W::zero, |e| self.instance.edge_weight(e))
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Vertices in depth-first preorder, children visited in id order.
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// Non-root vertices without children.
    pub fn is_leaf(&self, v: usize) -> bool {
        v != self.root() && self.children[v].is_empty()
    }

    /// Leaves in preorder.
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.preorder.iter().copied().filter(|&v| self.is_leaf(v))
    }

    pub fn vertex_weight(&self, v: usize) -> W {
        self.instance.vertex_weight(v)
    }

    pub fn vertex_id(&self, v: usize) -> &VertexId {
        self.instance.vertex_id(v)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.instance.vertex_index(id)
    }

    pub fn total_demand(&self) -> W {
        self.instance.total_demand()
    }

    /// Tree path from `from` to `to` as `(edge, arrival vertex)` steps.
    pub fn path_steps(&self, from: usize, to: usize) -> Vec<(usize, usize)> {
        let (mut a, mut b) = (from, to);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.depth[a] > self.depth[b] {
            let p = self.parent[a].expect("non-root has a parent");
            up.push((self.parent_edge[a].expect("non-root has a parent edge"), p));
            a = p;
        }
        while self.depth[b] > self.depth[a] {
            down.push((self.parent_edge[b].expect("non-root has a parent edge"), b));
            b = self.parent[b].expect("non-root has a parent");
        }
        while a != b {
            let pa = self.parent[a].expect("distinct vertices meet below the root");
            up.push((self.parent_edge[a].expect("non-root"), pa));
            a = pa;
            down.push((self.parent_edge[b].expect("non-root"), b));
            b = self.parent[b].expect("distinct vertices meet below the root");
        }
        up.extend(down.into_iter().rev());
        up
    }
}

/// Roots a tree instance at its start vertex.
pub fn as_tree<W: Weight>(instance: Instance<W>) -> Result<TreeInstance<W>> {
    TreeInstance::new(instance)
}

/// Renames every vertex and edge through the given maps. Used to check that
/// solver outputs do not depend on identifiers.
pub fn rename<W: Weight>(
    instance: &Instance<W>,
    vertex: impl Fn(&VertexId) -> VertexId,
    edge: impl Fn(&EdgeId) -> EdgeId,
) -> Result<Instance<W>> {
    let names: Vec<VertexId> = instance.vertices().iter().map(|v| vertex(&v.id)).collect();
    let distinct: HashSet<&VertexId> = names.iter().collect();
    if distinct.len() != names.len() {
        return Err(Error::Format("vertex renaming is not injective".into()));
    }
    Instance::new(
        instance.variant(),
        names[instance.start()].clone(),
        instance
            .vertices()
            .iter()
            .zip(&names)
            .map(|(v, n)| (n.clone(), v.weight))
            .collect(),
        instance
            .edges()
            .iter()
            .map(|e| {
                (
                    edge(&e.id),
                    names[e.u].clone(),
                    names[e.v].clone(),
                    e.weight,
                )
            })
            .collect(),
    )
}
