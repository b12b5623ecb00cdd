//! Independent checks on cycle words.
//!
//! [`verify_hamiltonian`] streams a walk through a bitset over perfect ranks;
//! [`brute_force_cycle`] is an exhaustive search that shares nothing with
//! the constructions, so it can serve as an oracle for them.

use std::fmt;
use std::time::{Duration, Instant};

use crate::bitset::VisitedSet;
use crate::construct::{build_hamiltonian, HamCycle};
use crate::error::{ConstructError, GroupError};
use crate::group::{identity, rank, unrank, EdgeLabel, Element, GroupParams};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Number of labels walked when the repeat was seen.
    pub step: usize,
    pub vertex: Element,
}

#[derive(Clone, Debug)]
pub struct CycleReport {
    pub valid: bool,
    pub length: u64,
    pub expected_length: u64,
    pub closed: bool,
    pub first_violation: Option<Violation>,
    pub elapsed: Duration,
    pub provenance: Option<String>,
    /// The group is G(2,2,2), which is not irreducible.
    pub reducible: bool,
    /// Bytes held by the visited set.
    pub visited_bytes: usize,
}

impl CycleReport {
    pub fn with_provenance(mut self, provenance: impl fmt::Display) -> Self {
        self.provenance = Some(provenance.to_string());
        self
    }
}

impl fmt::Display for CycleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            write!(f, "valid Hamiltonian cycle of length {}", self.length)?;
        } else {
            write!(f, "invalid:")?;
            if self.length != self.expected_length {
                write!(
                    f,
                    " length mismatch ({} labels, group order {});",
                    self.length, self.expected_length
                )?;
            }
            if !self.closed {
                write!(f, " walk does not return to the start;")?;
            }
            if let Some(v) = &self.first_violation {
                write!(f, " vertex {} repeats at step {};", v.vertex, v.step)?;
            }
        }
        if self.reducible {
            write!(f, " (reducible group)")?;
        }
        Ok(())
    }
}

/// Walks `word` from `start` and checks it is a Hamiltonian cycle.
pub fn verify_hamiltonian(
    params: &GroupParams,
    start: &Element,
    word: &[EdgeLabel],
) -> Result<CycleReport, GroupError> {
    let began = Instant::now();
    if let Some(l) = word.iter().find(|l| !l.is_available(params)) {
        return Err(GroupError::UnavailableGenerator {
            label: l.to_string(),
            group: params.to_string(),
        });
    }
    if !start.is_member(params) {
        return Err(GroupError::InvalidElement(start.to_string()));
    }
    let order = params.order();
    let mut seen = VisitedSet::new(order);
    let mut x = start.clone();
    seen.insert(rank(params, &x));
    let mut first_violation = None;
    let last = word.len().saturating_sub(1);
    for (i, &l) in word.iter().enumerate() {
        x.apply(params, l);
        // the final step must land back on the start, which is already marked
        if i == last || first_violation.is_some() {
            continue;
        }
        if !seen.insert(rank(params, &x)) {
            first_violation = Some(Violation {
                step: i + 1,
                vertex: x.clone(),
            });
        }
    }
    let closed = &x == start;
    let length = word.len() as u64;
    Ok(CycleReport {
        valid: length == order && closed && first_violation.is_none(),
        length,
        expected_length: order,
        closed,
        first_violation,
        elapsed: began.elapsed(),
        provenance: None,
        reducible: params.is_reducible(),
        visited_bytes: seen.heap_bytes(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteOutcome {
    Found(Word),
    /// The search space was exhausted: no Hamiltonian cycle exists.
    ProvenNonexistent,
    NoneWithinLimit,
}

/// Labels tried by the search, in this order: `s, t, t^-1, r_1, ..., r_{n-1}`.
pub fn search_labels(params: &GroupParams) -> Vec<EdgeLabel> {
    let mut labels = Vec::new();
    if params.has_s() {
        labels.push(EdgeLabel::S);
    }
    if params.has_t() {
        labels.push(EdgeLabel::T);
        if params.d() > 2 {
            labels.push(EdgeLabel::T_INV);
        }
    }
    labels.extend((1..params.n() as u8).map(EdgeLabel::r));
    labels
}

/// Exhaustive backtracking search for a Hamiltonian cycle.
///
/// The search decides, edge by edge, which edges of the Cayley graph the
/// cycle uses, and propagates the two local rules of a Hamiltonian cycle
/// after every decision: a vertex with two chosen edges loses the rest, a
/// vertex with only two candidate edges left must take both, and no chosen
/// edges may close a cycle short of the full vertex set. It branches on an
/// undecided edge at a vertex with the fewest candidates, taking the edge
/// first and excluding it on backtrack, so exhausting the tree proves that
/// no Hamiltonian cycle exists.
///
/// The cycle is read off from the identity, leaving along the first label of
/// [`search_labels`] whose edge was chosen.
pub fn brute_force_cycle(params: &GroupParams, time_limit: Duration) -> BruteOutcome {
    let deadline = Instant::now() + time_limit;
    let labels = search_labels(params);
    let next = cayley_table(params, &labels);
    let label_to = |u: usize, v: usize| {
        let li = next[u].iter().position(|&w| w == v).expect("adjacent");
        labels[li]
    };
    match next.len() {
        0 | 1 => return BruteOutcome::ProvenNonexistent,
        // a single edge walked out and back
        2 => {
            return match next[0].contains(&1) {
                true => BruteOutcome::Found(vec![label_to(0, 1); 2].into()),
                false => BruteOutcome::ProvenNonexistent,
            }
        }
        _ => {}
    }
    let graph = Graph::new(next.len(), next.iter().enumerate().flat_map(|(u, row)| row.iter().map(move |&v| (u, v))));
    match hamiltonian_cycle(&graph, deadline) {
        Search::Cycle(mut order) => {
            // leave the identity along the earliest label the cycle uses
            let first = next[0].iter().find(|&&v| v == order[1] || v == order[order.len() - 1]);
            if first != Some(&order[1]) {
                order[1..].reverse();
            }
            order.push(0);
            BruteOutcome::Found(order.windows(2).map(|p| label_to(p[0], p[1])).collect())
        }
        Search::Exhausted => BruteOutcome::ProvenNonexistent,
        Search::TimedOut => BruteOutcome::NoneWithinLimit,
    }
}

/// `table[v][i]` is the rank of `v` times the i-th label.
fn cayley_table(params: &GroupParams, labels: &[EdgeLabel]) -> Vec<Vec<usize>> {
    (0..params.order())
        .map(|idx| {
            let g = unrank(params, idx).expect("in range");
            labels
                .iter()
                .map(|&l| {
                    let mut x = g.clone();
                    x.apply(params, l);
                    rank(params, &x) as usize
                })
                .collect()
        })
        .collect()
}

/// A simple undirected graph.
struct Graph {
    /// Edges `(u, v)` with `u < v`.
    edges: Vec<(usize, usize)>,
    /// Incident edge ids per vertex.
    incident: Vec<Vec<usize>>,
}

impl Graph {
    /// Loops and repeated edges are dropped.
    fn new(vertex_count: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges = Vec::new();
        let mut incident = vec![Vec::new(); vertex_count];
        for (u, v) in pairs {
            let (u, v) = (u.min(v), u.max(v));
            if u != v && !incident[u].iter().any(|&e: &usize| edges[e] == (u, v)) {
                incident[u].push(edges.len());
                incident[v].push(edges.len());
                edges.push((u, v));
            }
        }
        Graph { edges, incident }
    }

    fn vertex_count(&self) -> usize {
        self.incident.len()
    }
}

enum Search {
    /// Vertices in cycle order, starting at 0.
    Cycle(Vec<usize>),
    Exhausted,
    TimedOut,
}

/// Backtracking over edge decisions with propagation; needs 3 or more vertices.
fn hamiltonian_cycle(graph: &Graph, deadline: Instant) -> Search {
    let mut solver = EdgeSolver::new(graph);
    if !solver.settle_all() {
        return Search::Exhausted;
    }
    // (trail mark, edge, edge was taken rather than excluded)
    let mut decisions: Vec<(usize, usize, bool)> = Vec::new();
    let mut steps: u64 = 0;
    loop {
        if steps % 256 == 0 && Instant::now() > deadline {
            return Search::TimedOut;
        }
        steps += 1;
        if solver.taken_count == graph.vertex_count() {
            return Search::Cycle(solver.cycle_order());
        }
        let consistent = match solver.branch_edge() {
            Some(edge) => {
                decisions.push((solver.trail.len(), edge, true));
                solver.decide(edge, EdgeState::Taken)
            }
            None => false,
        };
        if consistent {
            continue;
        }
        // backtrack to the most recent decision that still has an alternative
        loop {
            let Some((mark, edge, taken)) = decisions.pop() else {
                return Search::Exhausted;
            };
            solver.undo_to(mark);
            if taken {
                decisions.push((mark, edge, false));
                if solver.decide(edge, EdgeState::Excluded) {
                    break;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeState {
    Open,
    Taken,
    Excluded,
}

enum Change {
    Edge(usize),
    /// Previous value of `far_end[v]`.
    FarEnd(usize, usize),
}

struct EdgeSolver<'a> {
    graph: &'a Graph,
    state: Vec<EdgeState>,
    taken: Vec<u8>,
    /// Taken plus open incident edges.
    available: Vec<u8>,
    /// For a vertex ending a path of taken edges, the other end of that path.
    far_end: Vec<usize>,
    taken_count: usize,
    trail: Vec<Change>,
    queue: Vec<usize>,
}

impl<'a> EdgeSolver<'a> {
    fn new(graph: &'a Graph) -> Self {
        let order = graph.vertex_count();
        EdgeSolver {
            graph,
            state: vec![EdgeState::Open; graph.edges.len()],
            taken: vec![0; order],
            available: graph.incident.iter().map(|i| i.len() as u8).collect(),
            far_end: (0..order).collect(),
            taken_count: 0,
            trail: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn settle_all(&mut self) -> bool {
        self.queue.extend(0..self.graph.vertex_count());
        self.propagate()
    }

    fn decide(&mut self, edge: usize, state: EdgeState) -> bool {
        self.set(edge, state) && self.propagate()
    }

    fn set(&mut self, edge: usize, state: EdgeState) -> bool {
        if self.state[edge] != EdgeState::Open {
            return self.state[edge] == state;
        }
        let (u, v) = self.graph.edges[edge];
        match state {
            EdgeState::Taken => {
                if self.taken[u] == 2 || self.taken[v] == 2 {
                    return false;
                }
                let order = self.graph.vertex_count();
                let closing = self.far_end[u] == v;
                if closing && self.taken_count + 1 != order {
                    return false;
                }
                self.state[edge] = state;
                self.trail.push(Change::Edge(edge));
                self.taken[u] += 1;
                self.taken[v] += 1;
                self.taken_count += 1;
                if !closing {
                    let (a, b) = (self.far_end[u], self.far_end[v]);
                    self.trail.push(Change::FarEnd(a, self.far_end[a]));
                    self.far_end[a] = b;
                    self.trail.push(Change::FarEnd(b, self.far_end[b]));
                    self.far_end[b] = a;
                    // joining the two ends early would close a short cycle
                    if self.taken_count + 1 < order {
                        if let Some(&shortcut) = self.graph.incident[a]
                            .iter()
                            .find(|&&e| self.state[e] == EdgeState::Open && self.other(e, a) == b)
                        {
                            if !self.set(shortcut, EdgeState::Excluded) {
                                return false;
                            }
                        }
                    }
                }
            }
            EdgeState::Excluded => {
                self.state[edge] = state;
                self.trail.push(Change::Edge(edge));
                self.available[u] -= 1;
                self.available[v] -= 1;
            }
            EdgeState::Open => unreachable!("edges are only ever closed"),
        }
        self.queue.push(u);
        self.queue.push(v);
        true
    }

    fn other(&self, edge: usize, v: usize) -> usize {
        let (a, b) = self.graph.edges[edge];
        if a == v {
            b
        } else {
            a
        }
    }

    fn propagate(&mut self) -> bool {
        while let Some(v) = self.queue.pop() {
            if self.available[v] < 2 {
                self.queue.clear();
                return false;
            }
            let fill = if self.taken[v] == 2 {
                EdgeState::Excluded
            } else if self.available[v] == 2 {
                EdgeState::Taken
            } else {
                continue;
            };
            for k in 0..self.graph.incident[v].len() {
                let e = self.graph.incident[v][k];
                if self.state[e] == EdgeState::Open && !self.set(e, fill) {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("above mark") {
                Change::Edge(e) => {
                    let (u, v) = self.graph.edges[e];
                    match self.state[e] {
                        EdgeState::Taken => {
                            self.taken[u] -= 1;
                            self.taken[v] -= 1;
                            self.taken_count -= 1;
                        }
                        EdgeState::Excluded => {
                            self.available[u] += 1;
                            self.available[v] += 1;
                        }
                        EdgeState::Open => unreachable!(),
                    }
                    self.state[e] = EdgeState::Open;
                }
                Change::FarEnd(v, old) => self.far_end[v] = old,
            }
        }
        self.queue.clear();
    }

    /// An open edge at an unfinished vertex with the fewest candidates.
    fn branch_edge(&self) -> Option<usize> {
        let v = (0..self.graph.vertex_count())
            .filter(|&v| self.taken[v] < 2)
            .min_by_key(|&v| self.available[v] - self.taken[v])?;
        self.graph.incident[v]
            .iter()
            .copied()
            .find(|&e| self.state[e] == EdgeState::Open)
    }

    fn cycle_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.graph.vertex_count());
        let (mut prev, mut cur) = (usize::MAX, 0);
        while order.len() < self.graph.vertex_count() {
            order.push(cur);
            let step = self.graph.incident[cur]
                .iter()
                .map(|&e| self.other(e, cur))
                .find(|&v| v != prev && self.uses(cur, v))
                .expect("every vertex has two chosen edges");
            (prev, cur) = (cur, step);
        }
        order
    }

    fn uses(&self, u: usize, v: usize) -> bool {
        self.graph.incident[u]
            .iter()
            .any(|&e| self.state[e] == EdgeState::Taken && self.other(e, u) == v)
    }
}

/// Outcome of running the construction and the search side by side.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub constructed: HamCycle,
    pub constructed_report: CycleReport,
    pub searched: BruteOutcome,
    pub searched_report: Option<CycleReport>,
}

impl CrossCheck {
    pub fn agree(&self) -> bool {
        self.constructed_report.valid
            && self.searched_report.as_ref().is_some_and(|r| r.valid)
    }
}

pub fn cross_check(params: &GroupParams, time_limit: Duration) -> Result<CrossCheck, ConstructError> {
    let constructed = build_hamiltonian(params)?;
    let start = identity(params);
    let constructed_report = verify_hamiltonian(params, &start, &constructed.word)?
        .with_provenance(&constructed.provenance);
    let searched = brute_force_cycle(params, time_limit);
    let searched_report = match &searched {
        BruteOutcome::Found(w) => Some(verify_hamiltonian(params, &start, w)?),
        _ => None,
    };
    Ok(CrossCheck {
        constructed,
        constructed_report,
        searched,
        searched_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::generating_set;

    fn g(d: u32, e: u32, n: usize) -> GroupParams {
        GroupParams::new(d, e, n).unwrap()
    }

    const LIMIT: Duration = Duration::from_secs(20);

    fn found(p: &GroupParams) -> Word {
        match brute_force_cycle(p, LIMIT) {
            BruteOutcome::Found(w) => w,
            other => panic!("{p}: {other:?}"),
        }
    }

    #[test]
    fn accepts_constructed_cycle() {
        let p = g(3, 1, 2);
        let c = build_hamiltonian(&p).unwrap();
        let report = verify_hamiltonian(&p, &identity(&p), &c.word).unwrap();
        assert!(report.valid && report.closed);
        assert_eq!((report.length, report.expected_length), (18, 18));
        assert_eq!(report.to_string(), "valid Hamiltonian cycle of length 18");
    }

    #[test]
    fn rejects_perturbed_and_short_words() {
        let p = g(3, 1, 2);
        let mut word = build_hamiltonian(&p).unwrap().word.into_labels();
        assert_eq!(word[2], EdgeLabel::r(1));
        word[2] = EdgeLabel::T;
        let report = verify_hamiltonian(&p, &identity(&p), &word).unwrap();
        assert!(!report.valid);
        let v = report.first_violation.unwrap();
        // t t t returns to the identity after three steps
        assert_eq!(v.step, 3);
        assert!(v.vertex.is_identity());

        let short = build_hamiltonian(&p).unwrap().word.pound().unwrap();
        let report = verify_hamiltonian(&p, &identity(&p), &short).unwrap();
        assert!(!report.valid && report.first_violation.is_none());
        assert!(report.to_string().contains("length mismatch"));
    }

    #[test]
    fn rejects_foreign_labels() {
        let p = g(3, 1, 2);
        assert!(matches!(
            verify_hamiltonian(&p, &identity(&p), &[EdgeLabel::S]),
            Err(GroupError::UnavailableGenerator { .. })
        ));
        assert!(verify_hamiltonian(&p, &identity(&p), &[EdgeLabel::r(2)]).is_err());
    }

    #[test]
    fn verifies_from_any_start() {
        let p = g(2, 2, 3);
        let word = build_hamiltonian(&p).unwrap().word;
        for i in [1, 50, 191] {
            let start = unrank(&p, i).unwrap();
            assert!(verify_hamiltonian(&p, &start, &word).unwrap().valid);
        }
    }

    #[test]
    fn visited_set_is_one_bit_per_element() {
        let p = g(3, 2, 4);
        let report = verify_hamiltonian(&p, &identity(&p), &build_hamiltonian(&p).unwrap().word).unwrap();
        assert_eq!(report.visited_bytes as u64, p.order().div_ceil(64) * 8);
    }

    #[test]
    fn search_label_order() {
        assert_eq!(
            search_labels(&g(3, 2, 3)),
            [EdgeLabel::S, EdgeLabel::T, EdgeLabel::T_INV, EdgeLabel::r(1), EdgeLabel::r(2)]
        );
        assert_eq!(search_labels(&g(2, 1, 2)), [EdgeLabel::T, EdgeLabel::r(1)]);
        assert_eq!(search_labels(&g(1, 3, 3)), generating_set(&g(1, 3, 3)));
    }

    #[test]
    fn brute_force_small_groups() {
        for p in [g(2, 1, 2), g(1, 2, 2), g(2, 2, 2), g(3, 1, 2), g(1, 2, 3), g(2, 1, 1), g(5, 1, 1)] {
            let w = found(&p);
            assert!(verify_hamiltonian(&p, &identity(&p), &w).unwrap().valid, "{p}");
        }
        let w = found(&g(1, 2, 2));
        assert_eq!(w.len(), 4);
        assert!(w.windows(2).all(|pair| pair[0] != pair[1]));
        assert_eq!(found(&g(2, 1, 1)), Word::from(vec![EdgeLabel::T; 2]));
    }

    #[test]
    fn brute_force_on_the_trivial_group() {
        assert_eq!(brute_force_cycle(&g(1, 3, 1), LIMIT), BruteOutcome::ProvenNonexistent);
    }

    #[test]
    fn brute_force_is_deterministic() {
        let p = g(3, 3, 2);
        assert_eq!(found(&p), found(&p));
    }

    #[test]
    fn brute_force_times_out() {
        let p = g(2, 2, 5);
        assert_eq!(brute_force_cycle(&p, Duration::ZERO), BruteOutcome::NoneWithinLimit);
    }

    fn far_future() -> Instant {
        Instant::now() + LIMIT
    }

    #[test]
    fn solver_proves_petersen_non_hamiltonian() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let petersen = Graph::new(10, outer.chain(spokes).chain(inner));
        assert_eq!(petersen.edges.len(), 15);
        assert!(matches!(hamiltonian_cycle(&petersen, far_future()), Search::Exhausted));
    }

    #[test]
    fn solver_rejects_bipartite_graphs_with_unequal_sides() {
        // K_{2,3}
        let k23 = Graph::new(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]);
        assert!(matches!(hamiltonian_cycle(&k23, far_future()), Search::Exhausted));
    }

    #[test]
    fn solver_finds_cube_cycle() {
        let cube = Graph::new(8, (0..8).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))));
        let Search::Cycle(order) = hamiltonian_cycle(&cube, far_future()) else {
            panic!("the cube is Hamiltonian");
        };
        let mut seen = order.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..8).collect::<Vec<_>>());
        for i in 0..8 {
            let (u, v) = (order[i], order[(i + 1) % 8]);
            assert_eq!((u ^ v).count_ones(), 1);
        }
    }

    #[test]
    fn cross_checks() {
        for p in [g(1, 3, 2), g(1, 2, 3)] {
            assert!(cross_check(&p, LIMIT).unwrap().agree(), "{p}");
        }
        let c = cross_check(&g(3, 1, 2), LIMIT).unwrap();
        assert!(c.agree());
        let tt_r: Vec<EdgeLabel> = [EdgeLabel::T, EdgeLabel::T, EdgeLabel::r(1)].repeat(6);
        assert_eq!(c.constructed.word.labels(), tt_r.as_slice());
        assert_eq!(c.constructed_report.provenance.as_deref(), Some("block-d12"));
    }
}
