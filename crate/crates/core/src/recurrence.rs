//! Structure constants `c_{wv}^u` in `S_w S_v = Σ_u c_{wv}^u S_u`.
//!
//! For `w ≠ w_0` pick the least simple `r = r_α` with `wr > w`. Then
//!
//! * `vr > v`, `ur < u`: the constant vanishes (dc-triviality);
//! * `vr < v`, `ur < u`: `c_{wv}^u = c_{wr,vr}^u`;
//! * `vr > v`, `ur > u`: `c_{wv}^u = c_{wr,v}^{ur}`;
//! * `vr < v`, `ur > u`:
//!   `c_{wv}^u = c_{wr,v}^{ur} + c_{wr,vr}^u − (w·α) c_{w,vr}^u
//!   + Σ_{w' = w r_β ⋗ w, w' ≠ wr} ⟨α,β⟩ c_{w',vr}^u`.
//!
//! Every step raises `l(w)` or lowers `l(v)`, so the recursion bottoms out at
//! `c_{w_0,v}^{w_0} = S_v|_{w_0}`.
//!
//! The same identity with `v` renamed to `vr` reads, for `ur > u`, `vr > v`,
//! `wr > w`:
//! `c_{w,vr}^u = c_{wr,vr}^{ur} + c_{wr,v}^u − (w·α) c_{wv}^u + Σ ⟨α,β⟩ c_{w',v}^u`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;

use crate::billey::SchubertClasses;
use crate::error::{Error, Result};
use crate::gkm::SchubertExpansion;
use crate::oracle::Oracle;
use crate::polyring::{Basis, Polynomial};
use crate::rootsys::{ElementId, WeylGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstantKey {
    pub w: ElementId,
    pub v: ElementId,
    pub u: ElementId,
}

impl ConstantKey {
    pub fn new(w: ElementId, v: ElementId, u: ElementId) -> Self {
        ConstantKey { w, v, u }
    }

    fn swapped(self) -> Self {
        ConstantKey::new(self.v, self.w, self.u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Base,
    DcTrivial,
    DcCycleA,
    DcCycleB,
    Recurrence,
    DegreeZero,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Base => "base",
            Rule::DcTrivial => "dc-trivial",
            Rule::DcCycleA => "dc-cycle-A",
            Rule::DcCycleB => "dc-cycle-B",
            Rule::Recurrence => "recurrence",
            Rule::DegreeZero => "degree-zero",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EngineOptions {
    /// Return 0 at once unless `u ≥ w`, `u ≥ v` and `l(u) ≤ l(w)+l(v)`.
    pub prune_zeros: bool,
    /// Skip the `(w·α)` term when `l(u) = l(w)+l(v)`.
    pub degree_drop: bool,
    /// Share memo entries between `(w,v,u)` and `(v,w,u)`.
    pub normalize_commutative: bool,
    /// Simple index used at the top-level key instead of the least ascent.
    /// Ignored unless it is an ascent of `w`.
    pub first_r: Option<usize>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            prune_zeros: true,
            degree_drop: true,
            normalize_commutative: true,
            first_r: None,
        }
    }
}

impl EngineOptions {
    /// Every optimization off.
    pub fn plain() -> Self {
        EngineOptions {
            prune_zeros: false,
            degree_drop: false,
            normalize_commutative: false,
            first_r: None,
        }
    }
}

/// One rule application: either a final value or a weighted sum of other
/// constants.
#[derive(Clone, Debug)]
pub enum Step {
    Leaf {
        rule: Rule,
        r: Option<usize>,
        value: Polynomial,
    },
    Combine {
        rule: Rule,
        r: usize,
        terms: Vec<(Polynomial, ConstantKey)>,
    },
}

impl Step {
    pub fn rule(&self) -> Rule {
        match self {
            Step::Leaf { rule, .. } | Step::Combine { rule, .. } => *rule,
        }
    }

    pub fn r(&self) -> Option<usize> {
        match self {
            Step::Leaf { r, .. } => *r,
            Step::Combine { r, .. } => Some(*r),
        }
    }
}

#[derive(Debug)]
pub struct TraceNode {
    pub key: ConstantKey,
    pub rule: Rule,
    pub chosen_r: Option<usize>,
    pub value: Polynomial,
    pub children: Vec<(Polynomial, Arc<TraceNode>)>,
}

impl TraceNode {
    /// Recompute every value bottom-up from the leaves and the weights; fails
    /// at the first node whose stored value disagrees.
    pub fn replay(&self, classes: &SchubertClasses) -> Result<Polynomial> {
        let mut seen = HashMap::new();
        self.replay_inner(classes, &mut seen)
    }

    fn replay_inner(
        &self,
        classes: &SchubertClasses,
        seen: &mut HashMap<*const TraceNode, Polynomial>,
    ) -> Result<Polynomial> {
        if let Some(p) = seen.get(&(self as *const _)) {
            return Ok(p.clone());
        }
        let g = classes.group();
        let value = match self.rule {
            Rule::Base if self.key.u == g.longest() => classes.base_constant(self.key.v).clone(),
            Rule::Base | Rule::DcTrivial | Rule::DegreeZero => Polynomial::zero(g.rank()),
            _ => {
                let mut acc = Polynomial::zero(g.rank());
                for (weight, child) in &self.children {
                    acc += &(weight * &child.replay_inner(classes, seen)?);
                }
                acc
            }
        };
        if value != self.value {
            return Err(Error::Internal(format!(
                "trace replay disagrees at {:?}: stored {}, replayed {}",
                self.key, self.value, value
            )));
        }
        seen.insert(self as *const _, value.clone());
        Ok(value)
    }

    /// One line per rule application, children indented under their parent.
    /// A node met a second time is printed once more without its subtree.
    pub fn render(&self, group: &WeylGroup, basis: Basis) -> Vec<String> {
        let mut out = Vec::new();
        let mut done = HashSet::new();
        self.render_inner(group, basis, 0, None, &mut done, &mut out);
        out
    }

    fn render_inner(
        &self,
        group: &WeylGroup,
        basis: Basis,
        depth: usize,
        weight: Option<&Polynomial>,
        done: &mut HashSet<*const TraceNode>,
        out: &mut Vec<String>,
    ) {
        let render = |p: &Polynomial| {
            group
                .root_system()
                .render(p, basis)
                .unwrap_or_else(|_| p.render_alpha())
        };
        let mut line = "  ".repeat(depth);
        if let Some(wt) = weight.filter(|w| !w.is_one()) {
            let text = render(wt);
            if text.contains(' ') {
                line.push_str(&format!("({text}) * "));
            } else {
                line.push_str(&format!("{text} * "));
            }
        }
        line.push_str(&format_key(group, self.key, self.chosen_r));
        line.push_str(&format!(" -> {}", self.rule));
        if let Some(r) = self.chosen_r {
            line.push_str(&format!(" r={}", format_reflection(group, r)));
        }
        line.push_str(&format!(" = {}", render(&self.value)));
        let first = done.insert(self as *const _);
        if !first && !self.children.is_empty() {
            line.push_str(" (see above)");
        }
        out.push(line);
        if first {
            for (wt, child) in &self.children {
                child.render_inner(group, basis, depth + 1, Some(wt), done, out);
            }
        }
    }
}

/// `c_{w,v}^{u}`, with a bar after position `r+1` in type A.
pub fn format_key(group: &WeylGroup, key: ConstantKey, r: Option<usize>) -> String {
    let f = |x: ElementId| match (group.one_line(x), r) {
        (Some(perm), Some(r)) if perm.len() <= 9 => {
            let s: String = perm.iter().map(|d| d.to_string()).collect();
            format!("{}|{}", &s[..r + 1], &s[r + 1..])
        }
        (Some(perm), Some(r)) => {
            let join = |p: &[usize]| {
                p.iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            format!("{}|{}", join(&perm[..r + 1]), join(&perm[r + 1..]))
        }
        _ => group.format(x),
    };
    format!("c_{{{},{}}}^{{{}}}", f(key.w), f(key.v), f(key.u))
}

/// `(12)` style in type A, `s1` otherwise.
pub fn format_reflection(group: &WeylGroup, r: usize) -> String {
    if group.root_system().is_type_a() {
        if r + 2 < 10 {
            format!("({}{})", r + 1, r + 2)
        } else {
            format!("({} {})", r + 1, r + 2)
        }
    } else {
        format!("s{}", r + 1)
    }
}

pub struct Engine {
    group: Arc<WeylGroup>,
    classes: Arc<SchubertClasses>,
    options: EngineOptions,
    memo: DashMap<ConstantKey, Polynomial>,
}

impl Engine {
    pub fn new(classes: Arc<SchubertClasses>) -> Engine {
        Self::with_options(classes, EngineOptions::default())
    }

    pub fn with_options(classes: Arc<SchubertClasses>, options: EngineOptions) -> Engine {
        Engine {
            group: classes.group().clone(),
            classes,
            options,
            memo: DashMap::new(),
        }
    }

    pub fn group(&self) -> &Arc<WeylGroup> {
        &self.group
    }

    pub fn classes(&self) -> &Arc<SchubertClasses> {
        &self.classes
    }

    pub fn options(&self) -> &EngineOptions {
        &self.options
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn memo_key(&self, key: ConstantKey) -> ConstantKey {
        if self.options.normalize_commutative && key.v < key.w {
            key.swapped()
        } else {
            key
        }
    }

    fn lookup(&self, key: ConstantKey) -> Option<Polynomial> {
        self.memo.get(&self.memo_key(key)).map(|p| p.clone())
    }

    fn store(&self, key: ConstantKey, value: Polynomial) {
        self.memo.insert(self.memo_key(key), value);
    }

    fn is_fast_zero(&self, key: ConstantKey) -> bool {
        let g = &self.group;
        let ConstantKey { w, v, u } = key;
        g.length(u) > g.length(w) + g.length(v) || !g.bruhat_leq(w, u) || !g.bruhat_leq(v, u)
    }

    /// The rule applied at `key` with the least ascent of `w`.
    pub fn step(&self, key: ConstantKey) -> Step {
        self.step_with(key, None)
    }

    /// The rule applied at `key`, with `r` overriding the least ascent when it
    /// is an ascent of `w`.
    pub fn step_with(&self, key: ConstantKey, r: Option<usize>) -> Step {
        let g = &self.group;
        let rank = g.rank();
        let zero = || Polynomial::zero(rank);
        let ConstantKey { w, v, u } = key;
        if self.options.prune_zeros && self.is_fast_zero(key) {
            return Step::Leaf {
                rule: Rule::DegreeZero,
                r: None,
                value: zero(),
            };
        }
        if w == g.longest() {
            let value = if u == g.longest() {
                self.classes.base_constant(v).clone()
            } else {
                zero()
            };
            return Step::Leaf {
                rule: Rule::Base,
                r: None,
                value,
            };
        }
        let r = r
            .filter(|&i| i < rank && g.is_right_ascent(w, i))
            .or_else(|| g.first_right_ascent(w))
            .expect("w is not the longest element");
        let wr = g.right_mul_simple(w, r);
        let vr = g.right_mul_simple(v, r);
        let ur = g.right_mul_simple(u, r);
        let v_up = g.is_right_ascent(v, r);
        let u_up = g.is_right_ascent(u, r);
        let one = || Polynomial::one(rank);
        match (v_up, u_up) {
            (true, false) => Step::Leaf {
                rule: Rule::DcTrivial,
                r: Some(r),
                value: zero(),
            },
            (false, false) => Step::Combine {
                rule: Rule::DcCycleA,
                r,
                terms: vec![(one(), ConstantKey::new(wr, vr, u))],
            },
            (true, true) => Step::Combine {
                rule: Rule::DcCycleB,
                r,
                terms: vec![(one(), ConstantKey::new(wr, v, ur))],
            },
            (false, true) => {
                let mut terms = vec![
                    (one(), ConstantKey::new(wr, v, ur)),
                    (one(), ConstantKey::new(wr, vr, u)),
                ];
                let ordinary = g.length(u) == g.length(w) + g.length(v);
                if !(self.options.degree_drop && ordinary) {
                    let weight = -&g.simple_root_image(w, r).to_polynomial();
                    terms.push((weight, ConstantKey::new(w, vr, u)));
                }
                for (up, root) in g.covers(w) {
                    if up == wr {
                        continue;
                    }
                    let c = g.coeff_pairing(r, root);
                    if c != 0 {
                        terms.push((Polynomial::constant(rank, c), ConstantKey::new(up, vr, u)));
                    }
                }
                Step::Combine {
                    rule: Rule::Recurrence,
                    r,
                    terms,
                }
            }
        }
    }

    /// `c_{wv}^u`.
    pub fn structure_constant(&self, w: ElementId, v: ElementId, u: ElementId) -> Polynomial {
        self.evaluate(ConstantKey::new(w, v, u))
    }

    /// Evaluate with an explicit work stack; recursion depth is unbounded by
    /// the call stack.
    pub fn evaluate(&self, root: ConstantKey) -> Polynomial {
        if let Some(p) = self.lookup(root) {
            return p;
        }
        let rank = self.group.rank();
        let mut pending: HashMap<ConstantKey, Vec<(Polynomial, ConstantKey)>> = HashMap::new();
        let mut stack = vec![root];
        let mut result = None;
        while let Some(&key) = stack.last() {
            if self.lookup(key).is_some() {
                stack.pop();
                continue;
            }
            let terms = match pending.get(&key) {
                Some(t) => t,
                None => {
                    let r = if key == root {
                        self.options.first_r
                    } else {
                        None
                    };
                    match self.step_with(key, r) {
                        Step::Leaf { rule, value, .. } => {
                            if key == root {
                                result = Some(value.clone());
                            }
                            // fast zeros are cheaper to recompute than to store
                            if rule != Rule::DegreeZero {
                                self.store(key, value);
                            }
                            stack.pop();
                            continue;
                        }
                        Step::Combine { terms, .. } => pending.entry(key).or_insert(terms),
                    }
                }
            };
            let mut ready = true;
            let mut acc = Polynomial::zero(rank);
            let mut missing = Vec::new();
            for (weight, child) in terms {
                if self.options.prune_zeros && self.is_fast_zero(*child) {
                    continue;
                }
                match self.lookup(*child) {
                    Some(p) => acc += &(weight * &p),
                    None => {
                        ready = false;
                        missing.push(*child);
                    }
                }
            }
            if ready {
                pending.remove(&key);
                if key == root {
                    result = Some(acc.clone());
                }
                self.store(key, acc);
                stack.pop();
            } else {
                stack.extend(missing);
            }
        }
        result
            .or_else(|| self.lookup(root))
            .unwrap_or_else(|| Polynomial::zero(rank))
    }

    /// The derivation tree of `c_{wv}^u`. Identical subproblems share a node.
    pub fn trace(&self, w: ElementId, v: ElementId, u: ElementId) -> Arc<TraceNode> {
        let root = ConstantKey::new(w, v, u);
        self.evaluate(root);
        let mut built = HashMap::new();
        self.build_trace(root, self.options.first_r, &mut built)
    }

    fn build_trace(
        &self,
        key: ConstantKey,
        r: Option<usize>,
        built: &mut HashMap<ConstantKey, Arc<TraceNode>>,
    ) -> Arc<TraceNode> {
        if let Some(n) = built.get(&key) {
            return n.clone();
        }
        let step = self.step_with(key, r);
        let (rule, chosen_r) = (step.rule(), step.r());
        let children = match step {
            Step::Leaf { .. } => Vec::new(),
            Step::Combine { terms, .. } => terms
                .into_iter()
                .map(|(wt, child)| (wt, self.build_trace(child, None, built)))
                .collect(),
        };
        let node = Arc::new(TraceNode {
            key,
            rule,
            chosen_r,
            value: self.evaluate(key),
            children,
        });
        built.insert(key, node.clone());
        node
    }

    /// All nonzero `c_{wv}^u`.
    pub fn product_expansion(&self, w: ElementId, v: ElementId) -> SchubertExpansion {
        let g = &self.group;
        let mut e = SchubertExpansion::new();
        for u in g.ids() {
            if g.length(u) > g.length(w) + g.length(v) {
                break;
            }
            if g.bruhat_leq(w, u) && g.bruhat_leq(v, u) {
                e.add_term(u, &self.structure_constant(w, v, u));
            }
        }
        e
    }

    /// `c_{wvu} = c_{wv}^{w_0 u}`, defined when the lengths add up to `|Δ_+|`.
    pub fn triple_constant(&self, w: ElementId, v: ElementId, u: ElementId) -> Result<BigInt> {
        check_triple_lengths(&self.group, w, v, u)?;
        let top = self.group.multiply(self.group.longest(), u);
        integer_value(&self.structure_constant(w, v, top))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Recurrence,
    Oracle,
    Both,
}

/// `S_w S_v` in the Schubert basis. With [`EngineKind::Both`] the two engines
/// are compared coefficient by coefficient and any difference is an error.
pub fn product_expansion(
    engine: &Engine,
    oracle: &Oracle,
    w: ElementId,
    v: ElementId,
    kind: EngineKind,
) -> Result<SchubertExpansion> {
    match kind {
        EngineKind::Recurrence => Ok(engine.product_expansion(w, v)),
        EngineKind::Oracle => Ok(oracle.product_expansion(w, v)?.as_ref().clone()),
        EngineKind::Both => {
            let a = engine.product_expansion(w, v);
            let b = oracle.product_expansion(w, v)?;
            let keys: BTreeSet<ElementId> = a.iter().chain(b.iter()).map(|(u, _)| u).collect();
            let g = engine.group();
            let zero = Polynomial::zero(g.rank());
            for u in keys {
                let x = a.coefficient(u).unwrap_or(&zero);
                let y = b.coefficient(u).unwrap_or(&zero);
                if x != y {
                    return Err(Error::EngineMismatch {
                        u: g.format(u),
                        recurrence: x.to_string(),
                        oracle: y.to_string(),
                    });
                }
            }
            Ok(a)
        }
    }
}

pub(crate) fn check_triple_lengths(
    g: &WeylGroup,
    w: ElementId,
    v: ElementId,
    u: ElementId,
) -> Result<()> {
    let total = g.length(w) + g.length(v) + g.length(u);
    if total != g.num_positive_roots() {
        return Err(Error::DimensionMismatch(format!(
            "lengths add to {total}, expected {}",
            g.num_positive_roots()
        )));
    }
    Ok(())
}

pub(crate) fn integer_value(p: &Polynomial) -> Result<BigInt> {
    p.constant_value()
        .ok_or_else(|| Error::Internal(format!("expected an integer, got {p}")))
}

/// Both sides of the ordinary triple recurrence
/// `c_{w,vr,ur} = c_{wr,vr,u} + c_{wr,v,ur} + Σ_{w' = w r_β ⋗ w, w' ≠ wr} ⟨α,β⟩ c_{w',v,ur}`
/// for `ur > u`, `vr > v`, `wr > w` and `l(w)+l(v)+l(u)+2 = |Δ_+|`.
pub fn ordinary_recurrence_sides(
    group: &WeylGroup,
    r: usize,
    w: ElementId,
    v: ElementId,
    u: ElementId,
    triple: impl Fn(ElementId, ElementId, ElementId) -> Result<BigInt>,
) -> Result<(BigInt, BigInt)> {
    let g = group;
    if !(g.is_right_ascent(w, r) && g.is_right_ascent(v, r) && g.is_right_ascent(u, r)) {
        return Err(Error::Precondition(
            "r must be an ascent of u, v and w".into(),
        ));
    }
    if g.length(w) + g.length(v) + g.length(u) + 2 != g.num_positive_roots() {
        return Err(Error::Precondition(
            "need l(w) + l(v) + l(u) + 2 = |Δ+|".into(),
        ));
    }
    let (wr, vr, ur) = (
        g.right_mul_simple(w, r),
        g.right_mul_simple(v, r),
        g.right_mul_simple(u, r),
    );
    let lhs = triple(w, vr, ur)?;
    let mut rhs = triple(wr, vr, u)? + triple(wr, v, ur)?;
    for (up, root) in g.covers(w) {
        if up == wr {
            continue;
        }
        let c = g.coeff_pairing(r, root);
        if c != 0 {
            rhs += BigInt::from(c) * triple(up, v, ur)?;
        }
    }
    Ok((lhs, rhs))
}

/// Whether the ordinary triple recurrence holds at `(w, v, u, r)`.
pub fn ordinary_recurrence_check(
    group: &WeylGroup,
    r: usize,
    w: ElementId,
    v: ElementId,
    u: ElementId,
    triple: impl Fn(ElementId, ElementId, ElementId) -> Result<BigInt>,
) -> Result<bool> {
    let (lhs, rhs) = ordinary_recurrence_sides(group, r, w, v, u, triple)?;
    Ok(lhs == rhs)
}

/// Every admissible `(w, v, u, r)` for the ordinary triple recurrence.
pub fn ordinary_recurrence_instances(
    group: &WeylGroup,
) -> Vec<(usize, ElementId, ElementId, ElementId)> {
    let g = group;
    let dim = g.num_positive_roots();
    let mut out = Vec::new();
    for r in 0..g.rank() {
        let asc: Vec<ElementId> = g.ids().filter(|&x| g.is_right_ascent(x, r)).collect();
        for &w in &asc {
            for &v in &asc {
                for &u in &asc {
                    if g.length(w) + g.length(v) + g.length(u) + 2 == dim {
                        out.push((r, w, v, u));
                    }
                }
            }
        }
    }
    out
}
