//! Exact exponential-time solver for small instances.
//!
//! The moving group is described by the set `S` of visited vertices and its
//! current position; the number of unsettled agents is `k - w(S)`. For a
//! budget `k >= N` a first visit can always be paid for, so only edge
//! crossings constrain the search. `arrive[S]` is the set of vertices at
//! which the group can stand right after completing `S` by a first visit.

use crate::error::{Error, Result};
use crate::instance::{Instance, Variant};
use crate::schedule::{count_resolved, replay_resolved, Schedule};
use crate::weight::Weight;

pub const DEFAULT_CAP: usize = 20;
/// Above this the state table no longer fits comfortably in memory.
pub const HARD_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport<W> {
    pub optimum: W,
    /// Budgets tried by the binary search, with their outcomes.
    pub probes: Vec<(W, bool)>,
    /// Largest number of reachable `(set, vertex)` states in one probe.
    pub max_states: usize,
}

struct Search<'a, W> {
    instance: &'a Instance<W>,
    n: usize,
    start: usize,
    full: u32,
    k: W,
    arrive: Vec<u32>,
}

impl<'a, W: Weight> Search<'a, W> {
    fn run(instance: &'a Instance<W>, k: W) -> Self {
        let n = instance.vertex_count();
        let start = instance.start();
        let full = (1u32 << n) - 1;
        let mut arrive = vec![0u32; 1usize << n];
        arrive[1usize << start] = 1 << start;
        let mut s = Search {
            instance,
            n,
            start,
            full,
            k,
            arrive,
        };
        for set in 0..=full {
            let entry = s.arrive[set as usize];
            if entry == 0 || set == full {
                continue;
            }
            let avail = s.available(set);
            let here = s.closure(set, entry, avail);
            let mut bits = here;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                for &(e, u) in instance.neighbors(v) {
                    if set & (1 << u) == 0 && instance.edge_weight(e) <= avail {
                        s.arrive[(set | (1 << u)) as usize] |= 1 << u;
                    }
                }
            }
        }
        s
    }

    fn available(&self, set: u32) -> W {
        let mut settled = W::zero();
        let mut bits = set;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            settled = settled + self.instance.vertex_weight(v);
        }
        self.k - settled
    }

    /// Vertices of `set` reachable from `from` inside `set` with `avail` agents.
    fn closure(&self, set: u32, from: u32, avail: W) -> u32 {
        let mut seen = from;
        let mut todo = from;
        while todo != 0 {
            let v = todo.trailing_zeros() as usize;
            todo &= todo - 1;
            for &(e, u) in self.instance.neighbors(v) {
                let bit = 1 << u;
                if set & bit != 0 && seen & bit == 0 && self.instance.edge_weight(e) <= avail {
                    seen |= bit;
                    todo |= bit;
                }
            }
        }
        seen
    }

    /// Shortest path inside `set` from any vertex of `from` to `to`.
    fn path_within(
        &self,
        set: u32,
        from: u32,
        to: usize,
        avail: W,
    ) -> (usize, Vec<(usize, usize)>) {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.n];
        let mut seen = from;
        let mut queue: std::collections::VecDeque<usize> =
            (0..self.n).filter(|&v| from & (1 << v) != 0).collect();
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(e, u) in self.instance.neighbors(v) {
                let bit = 1 << u;
                if set & bit != 0 && seen & bit == 0 && self.instance.edge_weight(e) <= avail {
                    seen |= bit;
                    prev[u] = Some((e, v));
                    queue.push_back(u);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = to;
        while let Some((e, p)) = prev[v] {
            path.push((e, v));
            v = p;
        }
        path.reverse();
        (v, path)
    }

    fn final_closure(&self) -> u32 {
        let entry = self.arrive[self.full as usize];
        if entry == 0 {
            return 0;
        }
        self.closure(self.full, entry, self.available(self.full))
    }

    fn states(&self) -> usize {
        self.arrive.iter().map(|a| a.count_ones() as usize).sum()
    }

    /// Walk ending at `end` after visiting everything.
    fn witness(&self, end: usize) -> Vec<(usize, usize)> {
        let mut segments: Vec<Vec<(usize, usize)>> = Vec::new();
        let avail = self.available(self.full);
        let (mut at, tail) =
            self.path_within(self.full, self.arrive[self.full as usize], end, avail);
        segments.push(tail);
        let mut set = self.full;
        while set != 1 << self.start {
            let prev = set & !(1 << at);
            let avail = self.available(prev);
            let here = self.closure(prev, self.arrive[prev as usize], avail);
            let (e, from) = self
                .instance
                .neighbors(at)
                .iter()
                .find(|&&(e, v)| here & (1 << v) != 0 && self.instance.edge_weight(e) <= avail)
                .map(|&(e, v)| (e, v))
                .expect("every arrival has a predecessor state");
            let (entry, path) = self.path_within(prev, self.arrive[prev as usize], from, avail);
            segments.push(vec![(e, at)]);
            segments.push(path);
            at = entry;
            set = prev;
        }
        segments.into_iter().rev().flatten().collect()
    }
}

fn check_cap<W: Weight>(instance: &Instance<W>, config: OracleConfig) -> Result<()> {
    let n = instance.vertex_count();
    let cap = config.cap.min(HARD_CAP);
    if n > cap {
        return Err(Error::CapExceeded { vertices: n, cap });
    }
    Ok(())
}

fn feasible<W: Weight>(instance: &Instance<W>, k: W, end: Option<usize>) -> (bool, usize) {
    if k < instance.total_demand() {
        return (false, 0);
    }
    let search = Search::run(instance, k);
    let reach = search.final_closure();
    let ok = match (instance.variant(), end) {
        (_, Some(t)) => reach & (1 << t) != 0,
        (Variant::NoReturn, None) => reach != 0,
        (Variant::Return, None) => k > instance.total_demand() && reach & (1 << search.start) != 0,
    };
    (ok, search.states())
}

fn minimize<W: Weight>(instance: &Instance<W>, end: Option<usize>) -> OracleReport<W> {
    let bounds = instance.trivial_bounds();
    let (mut lo, mut hi) = (bounds.lower, bounds.upper);
    if end.is_some() {
        hi = instance.total_demand() + instance.max_edge_weight();
    }
    let mut probes = Vec::new();
    let mut max_states = 0;
    let mut probe = |k: W, probes: &mut Vec<(W, bool)>| {
        let (ok, states) = feasible(instance, k, end);
        max_states = max_states.max(states);
        probes.push((k, ok));
        ok
    };
    assert!(
        probe(hi, &mut probes),
        "the trivial upper bound must be feasible"
    );
    while lo < hi {
        let mid = lo + (hi - lo) / (W::one() + W::one());
        if probe(mid, &mut probes) {
            hi = mid;
        } else {
            lo = mid + W::one();
        }
    }
    for a in &probes {
        for b in &probes {
            assert!(
                !(a.0 < b.0 && a.1 && !b.1),
                "feasibility must be monotone in the budget"
            );
        }
    }
    OracleReport {
        optimum: lo,
        probes,
        max_states,
    }
}

/// The minimum number of agents for the instance's variant.
pub fn exact_min_agents<W: Weight>(instance: &Instance<W>) -> Result<W> {
    exact_min_agents_report(instance, OracleConfig::default()).map(|r| r.optimum)
}

pub fn exact_min_agents_report<W: Weight>(
    instance: &Instance<W>,
    config: OracleConfig,
) -> Result<OracleReport<W>> {
    check_cap(instance, config)?;
    Ok(minimize(instance, None))
}

/// The minimum number of agents for a no-return walk that ends at `end`.
pub fn exact_min_agents_ending_at<W: Weight>(instance: &Instance<W>, end: &str) -> Result<W> {
    check_cap(instance, OracleConfig::default())?;
    let t = instance
        .vertex_index(end)
        .ok_or_else(|| Error::UnknownVertex(end.to_string()))?;
    Ok(minimize(instance, Some(t)).optimum)
}

/// A walk that succeeds with exactly `k` agents, or `None` if there is none.
pub fn exact_schedule<W: Weight>(instance: &Instance<W>, k: W) -> Result<Option<Schedule>> {
    exact_schedule_with(instance, k, OracleConfig::default())
}

pub fn exact_schedule_with<W: Weight>(
    instance: &Instance<W>,
    k: W,
    config: OracleConfig,
) -> Result<Option<Schedule>> {
    check_cap(instance, config)?;
    if !feasible(instance, k, None).0 {
        return Ok(None);
    }
    let search = Search::run(instance, k);
    let reach = search.final_closure();
    let end = match instance.variant() {
        Variant::Return => instance.start(),
        Variant::NoReturn => reach.trailing_zeros() as usize,
    };
    let steps = search.witness(end);
    debug_assert!(replay_resolved(instance, &steps, k).feasible);
    debug_assert!(count_resolved(instance, &steps).total <= k);
    Ok(Some(Schedule::from_indices(instance, &steps)))
}
