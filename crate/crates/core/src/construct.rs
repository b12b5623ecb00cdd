//! Hamiltonian cycles in Γ(G(de,e,n), S) for the standard generators.
//!
//! Explicit block words handle the small cases, Pósa-style flips repair a
//! Hamiltonian path into a cycle for G(de,e,2), and everything larger is
//! obtained by lifting a cycle of a subgroup across its left cosets, splicing
//! translated copies in with commutative joins.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::error::{ConstructError, JoinError};
use crate::group::{
    identity, labels_commute, rank, EdgeLabel, Element, GroupParams,
};
use crate::verify::{brute_force_cycle, verify_hamiltonian, BruteOutcome};
use crate::words::{badness, element_order, evaluate, flip, repeat, vertices, Word};

/// Which construction produced a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// n = 1: the cycle `t^d` around the cyclic group.
    Cyclic,
    /// G(d,1,2): `[t^(d-1), r1]^(2d)`.
    BlockD12,
    /// G(2e,e,2): `[(r1 s)^(e-1), r1, t]^4`.
    Block2EE2,
    /// G(e,e,2): the dihedral cycle `(s r1)^e`.
    Dihedral,
    /// G(e,e,3): `[A^e #, s]^e` with `A = [r2, s, r2, r1, r2, r1]`.
    BlockEE3,
    /// G(de,e,2), d >= 3: a coset-by-coset path repaired by two flips.
    FlippedDEE2,
    /// G(2e,e,3): chained flipped paths plus joins along `t` edges.
    Chained2EE3,
    /// G(de,e,3), d >= 3: lift of the G(de,e,2) cycle whose joins avoid the
    /// few vertices where neither incident label commutes with `r2`.
    BadnessBoundedLift,
    /// Lift of a cycle of G(de,e,n-1) across the cosets of that subgroup.
    InductiveLift(Box<Provenance>),
    /// Found by exhaustive search after a block word failed verification.
    BruteForceFallback(Box<Provenance>),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Cyclic => write!(f, "cyclic"),
            Provenance::BlockD12 => write!(f, "block-d12"),
            Provenance::Block2EE2 => write!(f, "block-2ee2"),
            Provenance::Dihedral => write!(f, "dihedral"),
            Provenance::BlockEE3 => write!(f, "block-ee3"),
            Provenance::FlippedDEE2 => write!(f, "flipped-dee2"),
            Provenance::Chained2EE3 => write!(f, "chained-2ee3"),
            Provenance::BadnessBoundedLift => write!(f, "badness-lift(flipped-dee2)"),
            Provenance::InductiveLift(base) => write!(f, "lift({base})"),
            Provenance::BruteForceFallback(tried) => write!(f, "brute-force-after({tried})"),
        }
    }
}

/// A Hamiltonian cycle of Γ(G,S) read from the identity.
#[derive(Clone, Debug)]
pub struct HamCycle {
    pub params: GroupParams,
    pub word: Word,
    pub provenance: Provenance,
}

impl HamCycle {
    pub fn start(&self) -> Element {
        identity(&self.params)
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// A left coset `gH` of the subgroup fixing the last coordinate.
///
/// `gH` is determined by the position `i` that `g` sends to `n` and by the
/// phase `a_i` there, so the id is `i * de + a_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetId(u64);

impl CosetId {
    pub fn of(params: &GroupParams, g: &Element) -> CosetId {
        let last = (params.n() - 1) as u8;
        let i = g.perm().iter().position(|&p| p == last).expect("bijection");
        CosetId(i as u64 * params.de() as u64 + g.phases()[i] as u64)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Membership in the subgroup itself.
    pub fn is_subgroup(self, params: &GroupParams) -> bool {
        self.0 == (params.n() as u64 - 1) * params.de() as u64
    }
}

/// Number of `r`-labelled edges joining each pair of distinct cosets.
pub fn connecting_edge_counts(
    params: &GroupParams,
    r: EdgeLabel,
) -> BTreeMap<(CosetId, CosetId), u64> {
    let mut counts = BTreeMap::new();
    for idx in 0..params.order() {
        let g = crate::group::unrank(params, idx).expect("in range");
        let mut gr = g.clone();
        gr.apply(params, r);
        if rank(params, &gr) <= idx {
            continue;
        }
        let (a, b) = (CosetId::of(params, &g), CosetId::of(params, &gr));
        if a != b {
            *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    counts
}

fn params(d: u32, e: u32, n: usize) -> Result<GroupParams, ConstructError> {
    Ok(GroupParams::new(d, e, n)?)
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), ConstructError> {
    if cond {
        Ok(())
    } else {
        Err(ConstructError::Invariant(what()))
    }
}

/// `[t^(d-1), r1]^(2d)` in G(d,1,2).
pub fn base_d12(d: u32) -> Result<HamCycle, ConstructError> {
    if d < 2 {
        return Err(ConstructError::Unsupported(format!("G({d},1,2)")));
    }
    let p = params(d, 1, 2)?;
    let mut block = repeat(EdgeLabel::T, d as usize - 1);
    block.push(EdgeLabel::r(1));
    Ok(HamCycle {
        params: p,
        word: block.power(2 * d as usize),
        provenance: Provenance::BlockD12,
    })
}

/// The block `[(r1 s)^(e-1), r1, t]` whose fourth power is the G(2e,e,2) cycle.
pub fn block_2ee2(e: u32) -> Word {
    let mut block = Word::new();
    for _ in 1..e {
        block.push(EdgeLabel::r(1));
        block.push(EdgeLabel::S);
    }
    block.push(EdgeLabel::r(1));
    block.push(EdgeLabel::T);
    block
}

/// `[(r1 s)^(e-1), r1, t]^4` in G(2e,e,2).
///
/// The block word is checked before it is returned; if it is not Hamiltonian
/// the cycle comes from exhaustive search instead and says so.
pub fn base_2ee2(e: u32) -> Result<HamCycle, ConstructError> {
    if e < 2 {
        return Err(ConstructError::Unsupported(format!("G({},{e},2)", 2 * e)));
    }
    let p = params(2, e, 2)?;
    let word = block_2ee2(e).power(4);
    if verify_hamiltonian(&p, &identity(&p), &word)?.valid {
        return Ok(HamCycle {
            params: p,
            word,
            provenance: Provenance::Block2EE2,
        });
    }
    match brute_force_cycle(&p, std::time::Duration::from_secs(60)) {
        BruteOutcome::Found(word) => Ok(HamCycle {
            params: p,
            word,
            provenance: Provenance::BruteForceFallback(Box::new(Provenance::Block2EE2)),
        }),
        other => Err(ConstructError::VerificationFailed(format!(
            "block word for {p} is not Hamiltonian and search gave {other:?}"
        ))),
    }
}

/// `(s r1)^e` in the dihedral group G(e,e,2).
pub fn base_dihedral(e: u32) -> Result<HamCycle, ConstructError> {
    if e < 2 {
        return Err(ConstructError::Unsupported(format!("G({e},{e},2)")));
    }
    let p = params(1, e, 2)?;
    Ok(HamCycle {
        params: p,
        word: Word::from(vec![EdgeLabel::S, EdgeLabel::r(1)]).power(e as usize),
        provenance: Provenance::Dihedral,
    })
}

/// `A = [r2, s, r2, r1, r2, r1]`.
pub fn block_ee3_a() -> Word {
    let (q, s, r) = (EdgeLabel::r(2), EdgeLabel::S, EdgeLabel::r(1));
    Word::from(vec![q, s, q, r, q, r])
}

/// `B = [A^e #, s]`.
pub fn block_ee3(e: u32) -> Word {
    let mut b = block_ee3_a()
        .power(e as usize)
        .pound()
        .expect("nonempty");
    b.push(EdgeLabel::S);
    b
}

/// `B^e` in G(e,e,3).
pub fn base_ee3(e: u32) -> Result<HamCycle, ConstructError> {
    if e < 2 {
        return Err(ConstructError::Unsupported(format!("G({e},{e},3)")));
    }
    let p = params(1, e, 3)?;
    Ok(HamCycle {
        params: p,
        word: block_ee3(e).power(e as usize),
        provenance: Provenance::BlockEE3,
    })
}

/// Endpoints recorded while building the G(de,e,2) cycle.
#[derive(Clone, Debug)]
pub struct FlipTrace {
    /// End of the coset-by-coset Hamiltonian path.
    pub path_end: Element,
    pub after_first_flip: Element,
    pub after_second_flip: Element,
}

/// G(de,e,2) with `d >= 3`, returning the intermediate endpoints as well.
pub fn base_dee2_traced(d: u32, e: u32) -> Result<(HamCycle, FlipTrace), ConstructError> {
    if d < 3 || e < 2 {
        return Err(ConstructError::Unsupported(format!("G({},{e},2) via flips", d * e)));
    }
    let p = params(d, e, 2)?;
    let id = identity(&p);
    let (t, s, r) = (EdgeLabel::T, EdgeLabel::S, EdgeLabel::r(1));

    // A spans <s, t>; B = [A#, r] steps to the next coset of it.
    let mut a_block = repeat(t, d as usize - 1);
    a_block.push(s);
    let a = a_block.power(2 * d as usize);
    let mut b = a.pound()?;
    b.push(r);
    let path = b.power(e as usize).pound()?;
    let path_end = evaluate(&p, &id, &path);
    let expected = Element::from_parts(&p, &[-(e as i64), e as i64], &[2, 1])?;
    check(path_end == expected, || {
        format!("path for {p} ends at {path_end}, expected {expected}")
    })?;

    let first = flip(&p, &id, &path, s)?;
    let after_first_flip = evaluate(&p, &id, &first.word);
    let expected = Element::from_parts(&p, &[1, e as i64 - 1], &[1, 2])?;
    check(!first.degenerate && after_first_flip == expected, || {
        format!("first flip for {p} ends at {after_first_flip}, expected {expected}")
    })?;

    let second = flip(&p, &id, &first.word, s)?;
    let after_second_flip = evaluate(&p, &id, &second.word);
    let expected = Element::from_parts(&p, &[0, 0], &[2, 1])?;
    check(!second.degenerate && after_second_flip == expected, || {
        format!("second flip for {p} ends at {after_second_flip}, expected {expected}")
    })?;

    let mut word = second.word;
    word.push(r);
    Ok((
        HamCycle {
            params: p,
            word,
            provenance: Provenance::FlippedDEE2,
        },
        FlipTrace {
            path_end,
            after_first_flip,
            after_second_flip,
        },
    ))
}

pub fn base_dee2(d: u32, e: u32) -> Result<HamCycle, ConstructError> {
    base_dee2_traced(d, e).map(|(c, _)| c)
}

/// Path from `u_{q+1}` round the cycle to `u_q`, or the reverse, omitting the
/// edge at position `q`. `from_tail` starts at `u_q` and walks backwards.
fn around_cycle_avoiding(
    params: &GroupParams,
    cycle: &[EdgeLabel],
    q: usize,
    from_tail: bool,
) -> Vec<EdgeLabel> {
    let len = cycle.len();
    if from_tail {
        (1..len)
            .map(|k| cycle[(q + len - k) % len].inverse(params))
            .collect()
    } else {
        (1..len).map(|k| cycle[(q + k) % len]).collect()
    }
}

/// Position of the undirected edge `{a, a*x}` on a cycle from `start`, and
/// whether the cycle traverses it from `a`.
fn find_edge(
    params: &GroupParams,
    start: &Element,
    cycle: &[EdgeLabel],
    a: &Element,
    x: EdgeLabel,
) -> Option<(usize, bool)> {
    let mut ax = a.clone();
    ax.apply(params, x);
    let mut u = start.clone();
    for (q, &l) in cycle.iter().enumerate() {
        let mut next = u.clone();
        next.apply(params, l);
        if &u == a && next == ax {
            return Some((q, true));
        }
        if u == ax && &next == a {
            return Some((q, false));
        }
        u = next;
    }
    None
}

/// A closed walk from an explicit start vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub start: Element,
    pub word: Word,
}

/// Splices `other` into `cycle` through the commuting square on
/// `g1, g1 s, g1 r, g1 r s`.
///
/// The edge `{g1, g1 s}` of `cycle` is replaced by `r`, the rest of `other`
/// from `g1 r` round to `g1 r s`, and `r^-1`. The start of `cycle` is kept.
pub fn commutative_join(
    params: &GroupParams,
    cycle: &Cycle,
    other: &Cycle,
    g1: &Element,
    s: EdgeLabel,
    r: EdgeLabel,
) -> Result<Cycle, JoinError> {
    if !labels_commute(params, s, r)? {
        return Err(JoinError::NotCommuting(s.to_string(), r.to_string()));
    }
    let own = vertices(params, &cycle.start, &cycle.word);
    let theirs = vertices(params, &other.start, &other.word);
    let own_ranks: std::collections::HashSet<u64> =
        own.iter().map(|v| rank(params, v)).collect();
    if theirs.iter().any(|v| own_ranks.contains(&rank(params, v))) {
        return Err(JoinError::NotDisjoint);
    }
    let (p, forward) = find_edge(params, &cycle.start, &cycle.word, g1, s).ok_or_else(|| {
        JoinError::MissingEdge {
            from: g1.to_string(),
            label: s.to_string(),
        }
    })?;
    // the cycle leaves `a` along the edge; `a` is g1 or g1 s
    let a = if forward { g1.clone() } else { evaluate(params, g1, &[s]) };
    let x = cycle.word[p];
    let a_r = evaluate(params, &a, &[r]);
    let (q, from_a_r) = find_edge(params, &other.start, &other.word, &a_r, x).ok_or_else(|| {
        JoinError::MissingEdge {
            from: a_r.to_string(),
            label: x.to_string(),
        }
    })?;
    let detour = around_cycle_avoiding(params, &other.word, q, from_a_r);
    let mut word = Vec::with_capacity(cycle.word.len() + other.word.len());
    word.extend_from_slice(&cycle.word[..p]);
    word.push(r);
    word.extend(detour);
    word.push(r.inverse(params));
    word.extend_from_slice(&cycle.word[p + 1..]);
    Ok(Cycle {
        start: cycle.start.clone(),
        word: word.into(),
    })
}

/// Joins translated copies of a subgroup cycle onto a backbone cycle until
/// every left coset of the subgroup is covered.
///
/// Edges of the backbone are scanned in order; an edge `(g, g x)` is used
/// when `x` commutes with `r` and `g r` lies in an uncovered coset. The copy
/// of the subgroup cycle placed on that coset is rotated so that its first
/// edge labelled `x` (or `x^-1`) lands on `(g r, g r x)`. Spliced-in copies
/// are scanned in turn, which is the same as rescanning from the start after
/// every join.
struct Lifter<'a> {
    params: &'a GroupParams,
    r: EdgeLabel,
    sub_cycle: &'a [EdgeLabel],
    covered: Vec<bool>,
    covered_count: u64,
    commutes: HashMap<EdgeLabel, bool>,
    detours: HashMap<EdgeLabel, Rc<[EdgeLabel]>>,
}

impl<'a> Lifter<'a> {
    fn new(params: &'a GroupParams, r: EdgeLabel, sub_cycle: &'a [EdgeLabel]) -> Self {
        Lifter {
            params,
            r,
            sub_cycle,
            covered: vec![false; params.coset_count() as usize],
            covered_count: 0,
            commutes: HashMap::new(),
            detours: HashMap::new(),
        }
    }

    fn cover(&mut self, c: CosetId) -> bool {
        let fresh = !self.covered[c.index()];
        if fresh {
            self.covered[c.index()] = true;
            self.covered_count += 1;
        }
        fresh
    }

    fn commutes(&mut self, x: EdgeLabel) -> Result<bool, ConstructError> {
        if let Some(&c) = self.commutes.get(&x) {
            return Ok(c);
        }
        let c = labels_commute(self.params, x, self.r)?;
        self.commutes.insert(x, c);
        Ok(c)
    }

    /// Hamiltonian path of a coset from `h` to `h x` for the copy whose edge
    /// `(h, h x)` is the first `x`-edge of the subgroup cycle.
    fn detour(&mut self, x: EdgeLabel) -> Result<Rc<[EdgeLabel]>, ConstructError> {
        if let Some(p) = self.detours.get(&x) {
            return Ok(p.clone());
        }
        let x_inv = x.inverse(self.params);
        let (q, from_tail) = self
            .sub_cycle
            .iter()
            .enumerate()
            .find_map(|(q, &l)| {
                if l == x {
                    Some((q, true))
                } else if l == x_inv {
                    Some((q, false))
                } else {
                    None
                }
            })
            .ok_or_else(|| {
                ConstructError::Invariant(format!("subgroup cycle has no {x} edge"))
            })?;
        let path: Rc<[EdgeLabel]> =
            around_cycle_avoiding(self.params, self.sub_cycle, q, from_tail).into();
        self.detours.insert(x, path.clone());
        Ok(path)
    }

    fn run(mut self, backbone: &[EdgeLabel]) -> Result<Word, ConstructError> {
        let total = self.params.coset_count();
        let mut cur = identity(self.params);
        for &l in backbone {
            self.cover(CosetId::of(self.params, &cur));
            cur.apply(self.params, l);
        }
        let r_inv: Rc<[EdgeLabel]> = vec![self.r.inverse(self.params)].into();
        let mut out = Vec::with_capacity(self.params.order() as usize);
        let mut stack: Vec<(Rc<[EdgeLabel]>, usize)> = vec![(backbone.into(), 0)];
        while let Some((labels, pos)) = stack.last_mut() {
            if *pos == labels.len() {
                stack.pop();
                continue;
            }
            let x = labels[*pos];
            *pos += 1;
            if self.covered_count < total && x != self.r && self.commutes(x)? {
                let mut across = cur.clone();
                across.apply(self.params, self.r);
                if self.cover(CosetId::of(self.params, &across)) {
                    let path = self.detour(x)?;
                    out.push(self.r);
                    cur = across;
                    stack.push((r_inv.clone(), 0));
                    stack.push((path, 0));
                    continue;
                }
            }
            out.push(x);
            cur.apply(self.params, x);
        }
        if self.covered_count < total {
            return Err(ConstructError::Disconnected {
                covered: self.covered_count,
                total,
            });
        }
        Ok(out.into())
    }
}

/// Lifts a Hamiltonian cycle of G(de,e,n-1) to G(de,e,n) using `r_{n-1}`.
pub fn lift_inductive(params: &GroupParams, sub: &HamCycle) -> Result<HamCycle, ConstructError> {
    let n = params.n();
    let expected_sub = params.parent_subgroup();
    if n < 3 || expected_sub.as_ref() != Some(&sub.params) {
        return Err(ConstructError::Unsupported(format!(
            "lifting a {} cycle to {params}",
            sub.params
        )));
    }
    let r = EdgeLabel::r(n as u8 - 1);
    let bad = badness(params, &sub.word, r, true)?;
    if bad != 0 {
        return Err(ConstructError::NonzeroBadness {
            label: r.to_string(),
            badness: bad,
        });
    }
    let word = Lifter::new(params, r, &sub.word).run(&sub.word)?;
    Ok(HamCycle {
        params: *params,
        word,
        provenance: Provenance::InductiveLift(Box::new(sub.provenance.clone())),
    })
}

/// G(de,e,3) with `d >= 3`, lifted from the flipped G(de,e,2) cycle.
pub fn lift_badness_bounded(d: u32, e: u32) -> Result<HamCycle, ConstructError> {
    if d < 3 || e < 2 {
        return Err(ConstructError::Unsupported(format!("G({},{e},3) via badness", d * e)));
    }
    let p = params(d, e, 3)?;
    let sub = base_dee2(d, e)?;
    let word = Lifter::new(&p, EdgeLabel::r(2), &sub.word).run(&sub.word)?;
    Ok(HamCycle {
        params: p,
        word,
        provenance: Provenance::BadnessBoundedLift,
    })
}

/// Pieces of the G(2e,e,3) construction, kept for inspection.
#[derive(Clone, Debug)]
pub struct ChainParts {
    /// The G(2e,e,2) cycle's path flipped with respect to `s`.
    pub flipped: Word,
    /// `(flipped ++ [r2])` repeated around the order of its product.
    pub backbone: Word,
    /// Cosets met by the backbone, each with its vertex count.
    pub backbone_cosets: BTreeMap<CosetId, u64>,
}

pub fn chain_parts_2ee3(e: u32) -> Result<ChainParts, ConstructError> {
    let p = params(2, e, 3)?;
    let id = identity(&p);
    let sub = base_2ee2(e)?;
    let flipped = flip(&p, &id, &sub.word.pound()?, EdgeLabel::S)?.word;
    let mut step = flipped.clone();
    step.push(EdgeLabel::r(2));
    let v = evaluate(&p, &id, &step);
    let backbone = step.power(element_order(&p, &v) as usize);
    let mut backbone_cosets = BTreeMap::new();
    let mut cur = id;
    for &l in backbone.iter() {
        *backbone_cosets.entry(CosetId::of(&p, &cur)).or_insert(0) += 1;
        cur.apply(&p, l);
    }
    Ok(ChainParts {
        flipped,
        backbone,
        backbone_cosets,
    })
}

/// G(2e,e,3): a backbone through the cosets met by powers of `t s r1 r2`,
/// completed by joining copies of the G(2e,e,2) cycle along `t` edges.
pub fn chained_2ee3(e: u32) -> Result<HamCycle, ConstructError> {
    if e < 2 {
        return Err(ConstructError::Unsupported(format!("G({},{e},3) via chaining", 2 * e)));
    }
    let p = params(2, e, 3)?;
    let sub = base_2ee2(e)?;
    let parts = chain_parts_2ee3(e)?;
    let coset_size = sub.params.order();
    check(
        parts.backbone_cosets.values().all(|&c| c == coset_size),
        || format!("backbone for {p} covers cosets only partially"),
    )?;
    let word = Lifter::new(&p, EdgeLabel::r(2), &sub.word).run(&parts.backbone)?;
    Ok(HamCycle {
        params: p,
        word,
        provenance: Provenance::Chained2EE3,
    })
}

/// Picks the construction for `(d, e, n)` and verifies the result.
pub fn build_hamiltonian(params: &GroupParams) -> Result<HamCycle, ConstructError> {
    let cycle = build_unverified(params)?;
    let report = verify_hamiltonian(params, &cycle.start(), &cycle.word)?;
    if !report.valid {
        return Err(ConstructError::VerificationFailed(format!(
            "{} for {params}: {report}",
            cycle.provenance
        )));
    }
    Ok(cycle)
}

fn build_unverified(params: &GroupParams) -> Result<HamCycle, ConstructError> {
    let (d, e, n) = (params.d(), params.e(), params.n());
    let mut cycle = match n {
        1 => {
            if d < 2 {
                return Err(ConstructError::Unsupported(format!("{params} is trivial")));
            }
            HamCycle {
                params: *params,
                word: repeat(EdgeLabel::T, params.order() as usize),
                provenance: Provenance::Cyclic,
            }
        }
        2 if e == 1 => base_d12(d)?,
        2 if d == 1 => base_dihedral(e)?,
        2 if d == 2 => base_2ee2(e)?,
        2 => base_dee2(d, e)?,
        3 if e == 1 => lift_inductive(params, &build_hamiltonian(&params.parent_subgroup().expect("n >= 2"))?)?,
        3 if d == 1 => base_ee3(e)?,
        3 if d == 2 => chained_2ee3(e)?,
        3 => lift_badness_bounded(d, e)?,
        _ => {
            let sub = build_hamiltonian(&params.parent_subgroup().expect("n >= 2"))?;
            lift_inductive(params, &sub)?
        }
    };
    cycle.params = *params;
    Ok(cycle)
}
