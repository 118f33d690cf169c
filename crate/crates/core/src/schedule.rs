//! Single-group walks and the agent-counting procedure over them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, Variant, VertexId};
use crate::weight::Weight;

/// One move of the group: cross `edge`, arrive at `to`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub edge: EdgeId,
    pub to: VertexId,
}

/// A walk of the single moving group, starting at the start vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub start: VertexId,
    pub steps: Vec<Step>,
}

impl Schedule {
    pub fn new(start: VertexId) -> Self {
        Self {
            start,
            steps: Vec::new(),
        }
    }

    /// Builds a schedule from `(edge index, arrival index)` pairs.
    pub fn from_indices<W: Weight>(instance: &Instance<W>, steps: &[(usize, usize)]) -> Self {
        Self {
            start: instance.start_id().clone(),
            steps: steps
                .iter()
                .map(|&(e, v)| Step {
                    edge: instance.edge_id(e).clone(),
                    to: instance.vertex_id(v).clone(),
                })
                .collect(),
        }
    }

    /// Parses a sequence of alternating vertex and edge ids, starting and
    /// ending with a vertex, e.g. `v1 e1 v2 e2 v3`.
    pub fn from_sequence<S: AsRef<str>>(sequence: &[S]) -> Result<Self> {
        if sequence.len().is_multiple_of(2) {
            return Err(Error::Format(
                "sequence must alternate vertex, edge, ..., vertex".into(),
            ));
        }
        let mut schedule = Schedule::new(VertexId::from(sequence[0].as_ref()));
        for pair in sequence[1..].chunks(2) {
            schedule.steps.push(Step {
                edge: EdgeId::from(pair[0].as_ref()),
                to: VertexId::from(pair[1].as_ref()),
            });
        }
        Ok(schedule)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization cannot fail")
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Last vertex of the walk.
    pub fn end(&self) -> &VertexId {
        self.steps.last().map_or(&self.start, |s| &s.to)
    }

    /// Resolves ids against `instance` and checks the walk property.
    pub fn resolve<W: Weight>(&self, instance: &Instance<W>) -> Result<Vec<(usize, usize)>> {
        let start = instance
            .vertex_index(self.start.as_str())
            .ok_or_else(|| Error::UnknownVertex(self.start.to_string()))?;
        if start != instance.start() {
            return Err(Error::StartMismatch {
                expected: instance.start_id().to_string(),
                found: self.start.to_string(),
            });
        }
        let mut at = start;
        let mut out = Vec::with_capacity(self.steps.len());
        for (i, step) in self.steps.iter().enumerate() {
            let invalid = |reason: String| Error::InvalidWalk {
                step: i + 1,
                reason,
            };
            let e = instance
                .edge_index(step.edge.as_str())
                .ok_or_else(|| invalid(format!("unknown edge `{}`", step.edge)))?;
            let to = instance
                .vertex_index(step.to.as_str())
                .ok_or_else(|| invalid(format!("unknown vertex `{}`", step.to)))?;
            let other = instance.edges()[e].other(at).ok_or_else(|| {
                invalid(format!(
                    "edge `{}` is not incident to `{}`",
                    step.edge,
                    instance.vertex_id(at)
                ))
            })?;
            if other != to {
                return Err(invalid(format!(
                    "edge `{}` leads from `{}` to `{}`, not `{}`",
                    step.edge,
                    instance.vertex_id(at),
                    instance.vertex_id(other),
                    step.to
                )));
            }
            out.push((e, to));
            at = to;
        }
        Ok(out)
    }
}

/// A position in the simulated sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    Vertex(usize),
    Edge(usize),
}

/// Counter values after processing one element of the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry<W> {
    pub element: Element,
    pub curr: W,
    pub add: W,
}

/// Result of counting the agents a walk needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentCount<W> {
    /// `N + add`.
    pub total: W,
    pub add: W,
    /// Agents still moving with the group at the end of the walk.
    pub final_unsettled: W,
    /// Whether an extra agent was added so that a return-variant walk ends
    /// with a nonempty reporting group.
    pub reporting_agent: bool,
    pub trace: Vec<TraceEntry<W>>,
}

/// Counts the agents a single group needs to execute `schedule`.
///
/// Starting from `curr = N, add = 0`, the start vertex is processed first and
/// then every `(edge, vertex)` step: an edge of weight `w_e` with `curr < w_e`
/// raises `add` by the shortfall, a first visit settles `w_v` agents (raising
/// `add` if fewer are available). Revisits are free. Under the return variant
/// a final shortfall below one reporting agent is also made up.
pub fn count_agents<W: Weight>(
    instance: &Instance<W>,
    schedule: &Schedule,
) -> Result<AgentCount<W>> {
    let steps = schedule.resolve(instance)?;
    Ok(count_resolved(instance, &steps))
}

pub(crate) fn count_resolved<W: Weight>(
    instance: &Instance<W>,
    steps: &[(usize, usize)],
) -> AgentCount<W> {
    count_resolved_as(instance, steps, instance.variant())
}

pub(crate) fn count_resolved_as<W: Weight>(
    instance: &Instance<W>,
    steps: &[(usize, usize)],
    variant: Variant,
) -> AgentCount<W> {
    let n = instance.total_demand();
    let mut visited = vec![false; instance.vertex_count()];
    let mut curr = n;
    let mut add = W::zero();
    let mut trace = Vec::with_capacity(2 * steps.len() + 1);

    let mut visit = |v: usize, curr: &mut W, add: &mut W| {
        if !visited[v] {
            visited[v] = true;
            let w = instance.vertex_weight(v);
            if *curr < w {
                *add = *add + (w - *curr);
                *curr = W::zero();
            } else {
                *curr = *curr - w;
            }
        }
    };

    visit(instance.start(), &mut curr, &mut add);
    trace.push(TraceEntry {
        element: Element::Vertex(instance.start()),
        curr,
        add,
    });
    for &(e, v) in steps {
        let w = instance.edge_weight(e);
        if curr < w {
            add = add + (w - curr);
            curr = w;
        }
        trace.push(TraceEntry {
            element: Element::Edge(e),
            curr,
            add,
        });
        visit(v, &mut curr, &mut add);
        trace.push(TraceEntry {
            element: Element::Vertex(v),
            curr,
            add,
        });
    }

    let mut reporting_agent = false;
    if variant == Variant::Return && curr.is_zero() {
        add = add + W::one();
        curr = W::one();
        reporting_agent = true;
    }
    AgentCount {
        total: n + add,
        add,
        final_unsettled: curr,
        reporting_agent,
        trace,
    }
}

/// Which vertices a walk covers and where it ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub covered: bool,
    pub missing: Vec<VertexId>,
    pub ends_at_start: bool,
}

impl CoverageReport {
    /// A walk is accepted when it covers every vertex and, for the return
    /// variant, ends back at the start.
    pub fn accepted(&self, variant: Variant) -> bool {
        match variant {
            Variant::NoReturn => self.covered,
            Variant::Return => self.covered && self.ends_at_start,
        }
    }
}

pub fn verify_coverage<W: Weight>(
    instance: &Instance<W>,
    schedule: &Schedule,
) -> Result<CoverageReport> {
    let steps = schedule.resolve(instance)?;
    Ok(coverage_resolved(instance, &steps))
}

pub(crate) fn coverage_resolved<W: Weight>(
    instance: &Instance<W>,
    steps: &[(usize, usize)],
) -> CoverageReport {
    let mut seen = vec![false; instance.vertex_count()];
    seen[instance.start()] = true;
    for &(_, v) in steps {
        seen[v] = true;
    }
    let missing: Vec<VertexId> = seen
        .iter()
        .enumerate()
        .filter(|(_, s)| !**s)
        .map(|(v, _)| instance.vertex_id(v).clone())
        .collect();
    let end = steps.last().map_or(instance.start(), |&(_, v)| v);
    CoverageReport {
        covered: missing.is_empty(),
        missing,
        ends_at_start: end == instance.start(),
    }
}

/// The first constraint a fixed budget fails on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation<W> {
    /// Index into the alternating sequence (0 is the start vertex).
    pub position: usize,
    pub element: Option<Element>,
    pub needed: W,
    pub available: W,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay<W> {
    pub feasible: bool,
    pub violation: Option<Violation<W>>,
}

/// Replays `schedule` with exactly `k` agents, without ever adding more.
pub fn replay_fixed<W: Weight>(
    instance: &Instance<W>,
    schedule: &Schedule,
    k: W,
) -> Result<Replay<W>> {
    let steps = schedule.resolve(instance)?;
    Ok(replay_resolved(instance, &steps, k))
}

pub(crate) fn replay_resolved<W: Weight>(
    instance: &Instance<W>,
    steps: &[(usize, usize)],
    k: W,
) -> Replay<W> {
    let mut visited = vec![false; instance.vertex_count()];
    let mut available = k;
    let fail = |position, element, needed, available| Replay {
        feasible: false,
        violation: Some(Violation {
            position,
            element: Some(element),
            needed,
            available,
        }),
    };

    let start = instance.start();
    if available < instance.vertex_weight(start) {
        return fail(
            0,
            Element::Vertex(start),
            instance.vertex_weight(start),
            available,
        );
    }
    available = available - instance.vertex_weight(start);
    visited[start] = true;
    for (i, &(e, v)) in steps.iter().enumerate() {
        let w = instance.edge_weight(e);
        if available < w {
            return fail(2 * i + 1, Element::Edge(e), w, available);
        }
        if !visited[v] {
            let w = instance.vertex_weight(v);
            if available < w {
                return fail(2 * i + 2, Element::Vertex(v), w, available);
            }
            available = available - w;
            visited[v] = true;
        }
    }
    if instance.variant() == Variant::Return && available.is_zero() {
        return Replay {
            feasible: false,
            violation: Some(Violation {
                position: 2 * steps.len() + 1,
                element: None,
                needed: W::one(),
                available,
            }),
        };
    }
    Replay {
        feasible: true,
        violation: None,
    }
}
