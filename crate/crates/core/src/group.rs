//! Arithmetic in G(de,e,n) using the tuple form `(a_1,...,a_n | σ)`.
//!
//! A phase `a_i` is an exponent of a primitive `de`-th root of unity and is
//! kept reduced into `[0, de)`. Permutations are stored in one-line notation
//! (0-based internally, printed 1-based) and compose left to right: in a
//! product `xy` the permutation of `x` is applied first.

use std::fmt;

use crate::error::GroupError;

/// Default ceiling on the group order accepted by [`GroupParams::new`].
pub const DEFAULT_ORDER_CAP: u128 = 1 << 32;

/// Which generating set the parameters select.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `e = 1`: G(d,1,n) generated by `t, r_1, ..., r_{n-1}`.
    WellGeneratedD1,
    /// `d = 1`: G(e,e,n) generated by `s, r_1, ..., r_{n-1}`.
    WellGeneratedEE,
    /// `d, e >= 2`: generated by `s, t, r_1, ..., r_{n-1}`.
    General,
}

/// The triple `(d, e, n)` naming the group G(de,e,n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupParams {
    d: u32,
    e: u32,
    n: usize,
    de: u32,
    order: u64,
}

impl GroupParams {
    pub fn new(d: u32, e: u32, n: usize) -> Result<Self, GroupError> {
        Self::with_cap(d, e, n, DEFAULT_ORDER_CAP)
    }

    /// Like [`GroupParams::new`] but with an explicit order ceiling.
    pub fn with_cap(d: u32, e: u32, n: usize, cap: u128) -> Result<Self, GroupError> {
        if d == 0 || e == 0 || n == 0 {
            return Err(GroupError::InvalidParams(format!(
                "d, e, n must be positive (got d={d} e={e} n={n})"
            )));
        }
        if n > u8::MAX as usize {
            return Err(GroupError::InvalidParams(format!("n={n} is too large")));
        }
        let de = d
            .checked_mul(e)
            .ok_or_else(|| GroupError::InvalidParams("d*e overflows".into()))?;
        if de < 2 {
            return Err(GroupError::InvalidParams(
                "de must be at least 2 (G(1,1,n) is the symmetric group)".into(),
            ));
        }
        let order = order_of(d, e, n).ok_or(GroupError::OrderCap {
            order: None,
            cap,
        })?;
        if order > cap || order > u64::MAX as u128 {
            return Err(GroupError::OrderCap {
                order: Some(order),
                cap,
            });
        }
        Ok(GroupParams {
            d,
            e,
            n,
            de,
            order: order as u64,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Modulus of the phases.
    pub fn de(&self) -> u32 {
        self.de
    }

    /// `d^n e^(n-1) n!`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn family(&self) -> Family {
        if self.e == 1 {
            Family::WellGeneratedD1
        } else if self.d == 1 {
            Family::WellGeneratedEE
        } else {
            Family::General
        }
    }

    /// G(2,2,2) is the Klein four-group and does not act irreducibly.
    pub fn is_reducible(&self) -> bool {
        self.d == 1 && self.e == 2 && self.n == 2
    }

    /// Parameters of G(de,e,n-1), embedded in the first `n-1` coordinates.
    pub fn parent_subgroup(&self) -> Option<GroupParams> {
        if self.n < 2 {
            return None;
        }
        let n = self.n - 1;
        let order = order_of(self.d, self.e, n)? as u64;
        Some(GroupParams { n, order, ..*self })
    }

    /// Number of left cosets of the embedded G(de,e,n-1), which is `d e n`.
    pub fn coset_count(&self) -> u64 {
        self.d as u64 * self.e as u64 * self.n as u64
    }

    /// Does `t` have order greater than two?
    pub(crate) fn t_is_involution(&self) -> bool {
        self.d <= 2
    }

    pub fn has_t(&self) -> bool {
        self.d >= 2
    }

    pub fn has_s(&self) -> bool {
        self.e >= 2 && self.n >= 2
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({},{},{})", self.de, self.e, self.n)
    }
}

fn order_of(d: u32, e: u32, n: usize) -> Option<u128> {
    let mut order: u128 = 1;
    for k in 1..=n as u128 {
        order = order.checked_mul(d as u128)?.checked_mul(k)?;
    }
    for _ in 1..n {
        order = order.checked_mul(e as u128)?;
    }
    Some(order)
}

/// The group element `(a_1,...,a_n | σ)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    phases: Vec<u32>,
    perm: Vec<u8>,
}

impl Element {
    /// Builds an element from signed phases and 1-based permutation images,
    /// checking the membership constraint.
    pub fn from_parts(
        params: &GroupParams,
        phases: &[i64],
        perm: &[usize],
    ) -> Result<Self, GroupError> {
        let n = params.n();
        if phases.len() != n || perm.len() != n {
            return Err(GroupError::DimensionMismatch {
                expected: n,
                found: phases.len().max(perm.len()),
            });
        }
        let de = params.de() as i64;
        let phases: Vec<u32> = phases.iter().map(|&a| a.rem_euclid(de) as u32).collect();
        let mut seen = vec![false; n];
        let mut images = Vec::with_capacity(n);
        for &p in perm {
            if p == 0 || p > n || seen[p - 1] {
                return Err(GroupError::InvalidElement(format!(
                    "{perm:?} is not a permutation of 1..={n}"
                )));
            }
            seen[p - 1] = true;
            images.push((p - 1) as u8);
        }
        let x = Element {
            phases,
            perm: images,
        };
        if !x.is_member(params) {
            return Err(GroupError::InvalidElement(format!(
                "phase sum of {x} is not divisible by e={}",
                params.e()
            )));
        }
        Ok(x)
    }

    pub fn phases(&self) -> &[u32] {
        &self.phases
    }

    /// 0-based one-line images: `perm()[i] = σ(i)`.
    pub fn perm(&self) -> &[u8] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.phases.iter().all(|&a| a == 0)
            && self.perm.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    pub fn is_member(&self, params: &GroupParams) -> bool {
        let n = params.n();
        if self.phases.len() != n || self.perm.len() != n {
            return false;
        }
        if self.phases.iter().any(|&a| a >= params.de()) {
            return false;
        }
        let mut seen = vec![false; n];
        for &p in &self.perm {
            let p = p as usize;
            if p >= n || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        let sum: u64 = self.phases.iter().map(|&a| a as u64).sum();
        sum % params.e() as u64 == 0
    }

    /// Position `i` with `σ(i) = j`.
    #[inline]
    fn preimage(&self, j: u8) -> usize {
        self.perm.iter().position(|&p| p == j).expect("perm is a bijection")
    }

    #[inline]
    fn add_phase(&mut self, i: usize, delta: u32, de: u32) {
        let a = self.phases[i] + delta;
        self.phases[i] = if a >= de { a - de } else { a };
    }

    /// In-place right multiplication by a generator, `self <- self * g`.
    ///
    /// Must agree with `multiply(self, generator_element(g))`.
    #[inline]
    pub fn apply(&mut self, params: &GroupParams, label: EdgeLabel) {
        let de = params.de();
        match label.gen {
            Generator::T => {
                let i = self.preimage(0);
                let step = params.e() % de;
                let delta = if label.inverted { de - step } else { step };
                self.add_phase(i, delta % de, de);
            }
            Generator::S => {
                // b = (-1, 1, 0, ...), τ = (1 2)
                let i0 = self.preimage(0);
                let i1 = self.preimage(1);
                self.add_phase(i0, de - 1, de);
                self.add_phase(i1, 1, de);
                self.perm[i0] = 1;
                self.perm[i1] = 0;
            }
            Generator::R(k) => {
                let a = k - 1;
                let b = k;
                let ia = self.preimage(a);
                let ib = self.preimage(b);
                self.perm[ia] = b;
                self.perm[ib] = a;
            }
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.phases.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "|")?;
        for (i, p) in self.perm.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", p + 1)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A standard generating reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    S,
    T,
    /// `r_i`, swapping coordinates `i` and `i+1` (1-based, `1 <= i < n`).
    R(u8),
}

/// A generator or, for `t` of order greater than two, its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub gen: Generator,
    pub inverted: bool,
}

impl EdgeLabel {
    pub const S: EdgeLabel = EdgeLabel {
        gen: Generator::S,
        inverted: false,
    };
    pub const T: EdgeLabel = EdgeLabel {
        gen: Generator::T,
        inverted: false,
    };
    pub const T_INV: EdgeLabel = EdgeLabel {
        gen: Generator::T,
        inverted: true,
    };

    pub const fn r(i: u8) -> EdgeLabel {
        EdgeLabel {
            gen: Generator::R(i),
            inverted: false,
        }
    }

    /// Canonical form: only `t` with `d > 2` keeps an inversion flag.
    pub fn normalized(self, params: &GroupParams) -> EdgeLabel {
        match self.gen {
            Generator::T if !params.t_is_involution() => self,
            _ => EdgeLabel {
                gen: self.gen,
                inverted: false,
            },
        }
    }

    /// Label of the reverse traversal of an edge.
    pub fn inverse(self, params: &GroupParams) -> EdgeLabel {
        EdgeLabel {
            gen: self.gen,
            inverted: !self.inverted,
        }
        .normalized(params)
    }

    pub fn is_available(self, params: &GroupParams) -> bool {
        match self.gen {
            Generator::T => params.has_t(),
            Generator::S => params.has_s(),
            Generator::R(i) => i >= 1 && (i as usize) < params.n(),
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.gen, self.inverted) {
            (Generator::T, false) => write!(f, "t"),
            (Generator::T, true) => write!(f, "t-"),
            (Generator::S, _) => write!(f, "s"),
            (Generator::R(i), _) => write!(f, "r{i}"),
        }
    }
}

pub fn identity(params: &GroupParams) -> Element {
    let n = params.n();
    Element {
        phases: vec![0; n],
        perm: (0..n as u8).collect(),
    }
}

fn check_dims(params: &GroupParams, x: &Element) -> Result<(), GroupError> {
    let n = params.n();
    if x.phases.len() != n || x.perm.len() != n {
        return Err(GroupError::DimensionMismatch {
            expected: n,
            found: x.phases.len(),
        });
    }
    Ok(())
}

/// `(a | σ)(b | τ) = (a_i + b_{σ(i)} | στ)` with `σ` applied first.
pub fn multiply(params: &GroupParams, x: &Element, y: &Element) -> Result<Element, GroupError> {
    check_dims(params, x)?;
    check_dims(params, y)?;
    let de = params.de() as u64;
    let n = params.n();
    let mut phases = Vec::with_capacity(n);
    let mut perm = Vec::with_capacity(n);
    for i in 0..n {
        let si = x.perm[i] as usize;
        phases.push(((x.phases[i] as u64 + y.phases[si] as u64) % de) as u32);
        perm.push(y.perm[si]);
    }
    Ok(Element { phases, perm })
}

pub fn inverse(params: &GroupParams, x: &Element) -> Element {
    // (a | σ)^-1 = (b | σ^-1) with b_{σ(i)} = -a_i
    let n = params.n();
    let de = params.de();
    let mut phases = vec![0; n];
    let mut perm = vec![0u8; n];
    for i in 0..n {
        let si = x.perm[i] as usize;
        perm[si] = i as u8;
        phases[si] = (de - x.phases[i] % de) % de;
    }
    Element { phases, perm }
}

/// `x^k` by repeated squaring.
pub fn power(params: &GroupParams, x: &Element, mut k: u64) -> Element {
    let mut base = x.clone();
    let mut acc = identity(params);
    while k > 0 {
        if k & 1 == 1 {
            acc = multiply(params, &acc, &base).expect("same params");
        }
        base = multiply(params, &base, &base).expect("same params");
        k >>= 1;
    }
    acc
}

pub fn generator_element(params: &GroupParams, label: EdgeLabel) -> Result<Element, GroupError> {
    if !label.is_available(params) {
        return Err(GroupError::UnavailableGenerator {
            label: label.to_string(),
            group: params.to_string(),
        });
    }
    let mut x = identity(params);
    x.apply(params, label);
    Ok(x)
}

pub fn generating_set(params: &GroupParams) -> Vec<EdgeLabel> {
    let mut gens = Vec::with_capacity(params.n() + 1);
    if params.has_s() {
        gens.push(EdgeLabel::S);
    }
    if params.has_t() {
        gens.push(EdgeLabel::T);
    }
    gens.extend((1..params.n() as u8).map(EdgeLabel::r));
    gens
}

/// Do the elements named by two labels commute?
pub fn labels_commute(params: &GroupParams, a: EdgeLabel, b: EdgeLabel) -> Result<bool, GroupError> {
    let ga = generator_element(params, a)?;
    let gb = generator_element(params, b)?;
    Ok(multiply(params, &ga, &gb)? == multiply(params, &gb, &ga)?)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn lehmer_rank(perm: &[u8]) -> u64 {
    let n = perm.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count() as u64;
        rank = rank * (n - i) as u64 + smaller;
    }
    rank
}

fn lehmer_unrank(n: usize, mut idx: u64) -> Vec<u8> {
    let mut digits = vec![0u64; n];
    for i in (0..n).rev() {
        let radix = (n - i) as u64;
        digits[i] = idx % radix;
        idx /= radix;
    }
    let mut pool: Vec<u8> = (0..n as u8).collect();
    digits
        .into_iter()
        .map(|c| pool.remove(c as usize))
        .collect()
}

/// Perfect hash of an element onto `[0, order)`.
///
/// The first `n-1` phases form a base-`de` number (most significant first);
/// the last phase is determined mod `e` by the others, leaving `d` choices.
/// The Lehmer code of the permutation is the least significant digit.
pub fn rank(params: &GroupParams, x: &Element) -> u64 {
    let n = params.n();
    let de = params.de() as u64;
    let e = params.e() as u64;
    let mut value = 0u64;
    let mut head_sum = 0u64;
    for &a in &x.phases[..n - 1] {
        value = value * de + a as u64;
        head_sum += a as u64;
    }
    let rho = (e - head_sum % e) % e;
    let last = x.phases[n - 1] as u64;
    value = value * params.d() as u64 + (last - rho) / e;
    value * factorial(n) + lehmer_rank(&x.perm)
}

pub fn unrank(params: &GroupParams, idx: u64) -> Result<Element, GroupError> {
    if idx >= params.order() {
        return Err(GroupError::RankOutOfRange {
            index: idx,
            order: params.order(),
        });
    }
    let n = params.n();
    let de = params.de() as u64;
    let e = params.e() as u64;
    let nf = factorial(n);
    let perm = lehmer_unrank(n, idx % nf);
    let mut rest = idx / nf;
    let last_step = rest % params.d() as u64;
    rest /= params.d() as u64;
    let mut phases = vec![0u32; n];
    let mut head_sum = 0u64;
    for i in (0..n - 1).rev() {
        let a = rest % de;
        phases[i] = a as u32;
        head_sum += a;
        rest /= de;
    }
    let rho = (e - head_sum % e) % e;
    phases[n - 1] = (rho + last_step * e) as u32;
    Ok(Element { phases, perm })
}

/// Outcome of evaluating one defining relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Default)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct RelationBuilder<'a> {
    params: &'a GroupParams,
    report: RelationReport,
}

impl RelationBuilder<'_> {
    fn eval(&self, word: &[EdgeLabel]) -> Element {
        let mut x = identity(self.params);
        for &l in word {
            x.apply(self.params, l);
        }
        x
    }

    fn equal(&mut self, name: String, lhs: &[EdgeLabel], rhs: &[EdgeLabel]) {
        if self.report.checks.iter().any(|c| c.name == name) {
            return;
        }
        let passed = self.eval(lhs) == self.eval(rhs);
        self.report.checks.push(RelationCheck { name, passed });
    }

    /// `g^k = 1` with `g^j != 1` for `0 < j < k`.
    fn order(&mut self, label: EdgeLabel, k: usize) {
        let g = self.eval(&[label]);
        let mut x = identity(self.params);
        let mut exact = true;
        for j in 1..=k {
            x = multiply(self.params, &x, &g).expect("same params");
            if j < k && x.is_identity() {
                exact = false;
            }
        }
        self.report.checks.push(RelationCheck {
            name: format!("{label}^{k}=1"),
            passed: exact && x.is_identity(),
        });
    }

    fn commute(&mut self, a: EdgeLabel, b: EdgeLabel) {
        self.equal(format!("{a}{b}={b}{a}"), &[a, b], &[b, a]);
    }

    fn braid(&mut self, a: EdgeLabel, b: EdgeLabel) {
        self.equal(format!("{a}{b}{a}={b}{a}{b}"), &[a, b, a], &[b, a, b]);
    }
}

fn name_of(word: &[EdgeLabel]) -> String {
    word.iter().map(|l| l.to_string()).collect()
}

/// Alternating product `first second first ...` with `len` factors.
fn alternating(first: EdgeLabel, second: EdgeLabel, len: usize) -> Vec<EdgeLabel> {
    (0..len)
        .map(|i| if i % 2 == 0 { first } else { second })
        .collect()
}

/// Evaluates the defining relations of the standard presentation.
///
/// Full presentations are used for `n <= 3`; for larger `n` the generator
/// orders, braid and commutation relations among the `r_i`, the relations
/// tying `s` and `t` to the `r_i`, and the commutation of `r_{n-1}` with every
/// generator other than `r_{n-2}` are checked.
pub fn check_relations(params: &GroupParams) -> RelationReport {
    let mut b = RelationBuilder {
        params,
        report: RelationReport::default(),
    };
    let n = params.n();
    let d = params.d() as usize;
    let e = params.e() as usize;
    let t = EdgeLabel::T;
    let s = EdgeLabel::S;
    let r = EdgeLabel::r;

    if params.has_t() {
        b.order(t, d);
    }
    if params.has_s() {
        b.order(s, 2);
    }
    for i in 1..n as u8 {
        b.order(r(i), 2);
    }
    if n == 1 {
        return b.report;
    }

    let r1 = r(1);
    match params.family() {
        Family::WellGeneratedD1 => {
            b.equal("tr1tr1=r1tr1t".into(), &[t, r1, t, r1], &[r1, t, r1, t]);
        }
        Family::WellGeneratedEE => {
            let lhs = alternating(s, r1, e);
            let rhs = alternating(r1, s, e);
            b.equal(format!("{}={}", name_of(&lhs), name_of(&rhs)), &lhs, &rhs);
        }
        Family::General => {
            b.equal("tsr1=sr1t".into(), &[t, s, r1], &[s, r1, t]);
            // r1 t s r1 s r1 ... = t s r1 s r1 s ..., e+1 factors each
            let mut lhs = vec![r1, t];
            lhs.extend(alternating(s, r1, e - 1));
            let mut rhs = vec![t];
            rhs.extend(alternating(s, r1, e));
            b.equal(format!("{}={}", name_of(&lhs), name_of(&rhs)), &lhs, &rhs);
        }
    }

    if n >= 3 {
        let r2 = r(2);
        b.braid(r1, r2);
        if params.has_s() {
            b.braid(s, r2);
            let lhs = [r2, s, r1, r2, s, r1];
            let rhs = [s, r1, r2, s, r1, r2];
            b.equal(format!("{}={}", name_of(&lhs), name_of(&rhs)), &lhs, &rhs);
        }
        if params.has_t() {
            b.commute(t, r2);
        }
    }

    if n >= 4 {
        for i in 1..n as u8 - 1 {
            b.braid(r(i), r(i + 1));
        }
        for i in 1..n as u8 {
            for j in i + 2..n as u8 {
                b.commute(r(i), r(j));
            }
        }
        for i in 3..n as u8 {
            if params.has_s() {
                b.commute(s, r(i));
            }
            if params.has_t() {
                b.commute(t, r(i));
            }
        }
        // r_{n-1} against everything but r_{n-2}
        let top = r(n as u8 - 1);
        for g in generating_set(params) {
            if g != top && g != r(n as u8 - 2) {
                b.commute(g, top);
            }
        }
        if params.has_t() {
            b.commute(t, r(2));
        }
    }
    b.report
}
