//! Ground truth by elimination: a GKM class `p` is expanded in the Schubert
//! basis by walking `W` in increasing length. At the first point `w` where
//! the residual is nonzero its coefficient is `residual|_w / S_w|_w`, and
//! `coeff·S_w` is subtracted. Support of `S_w` is `{v ≥ w}`, so earlier
//! points are never disturbed.
//!
//! Nothing here goes through the recurrence engine except the sweep, which
//! compares the two.

use std::sync::Arc;
use std::time::Instant;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::billey::{bottom_restriction, restrict, SchubertClasses};
use crate::error::{Error, Result};
use crate::gkm::{GkmClass, SchubertExpansion};
use crate::polyring::Polynomial;
use crate::recurrence::{check_triple_lengths, integer_value, Engine};
use crate::rootsys::{ElementId, WeylGroup};

pub const DEFAULT_SWEEP_BOUND: usize = 120;

#[derive(Clone, Debug)]
pub struct ExpansionReport {
    pub expansion: SchubertExpansion,
    pub residual_zero: bool,
    pub steps: usize,
}

/// Expand a GKM class in the Schubert basis.
pub fn expand_in_schubert(classes: &SchubertClasses, p: &GkmClass) -> Result<ExpansionReport> {
    let g = classes.group();
    if !Arc::ptr_eq(g, p.group()) {
        return Err(Error::MixedRootSystems);
    }
    let mut residual = p.values().to_vec();
    let mut expansion = SchubertExpansion::new();
    let mut steps = 0;
    for w in g.ids() {
        if residual[w.index()].is_zero() {
            continue;
        }
        steps += 1;
        let mut coeff = residual[w.index()].clone();
        for f in classes.bottom_factors(w) {
            coeff = coeff.divide_exact(f)?;
        }
        let s = classes.schubert_class(w);
        for x in g.ids() {
            let sx = s.value(x);
            if sx.is_zero() {
                continue;
            }
            if x < w {
                return Err(Error::Internal(format!(
                    "S_{} is nonzero at {} which precedes it",
                    g.format(w),
                    g.format(x)
                )));
            }
            residual[x.index()] -= &(&coeff * sx);
        }
        if !residual[w.index()].is_zero() {
            return Err(Error::Internal(format!(
                "elimination left a residual at {}",
                g.format(w)
            )));
        }
        expansion.add_term(w, &coeff);
    }
    let residual_zero = residual.iter().all(Polynomial::is_zero);
    if !residual_zero {
        return Err(Error::Internal("nonzero final residual".into()));
    }
    Ok(ExpansionReport {
        expansion,
        residual_zero,
        steps,
    })
}

/// Products `S_w S_v` expanded by elimination, cached per ordered pair.
pub struct Oracle {
    classes: Arc<SchubertClasses>,
    products: DashMap<(ElementId, ElementId), Arc<SchubertExpansion>>,
}

impl Oracle {
    pub fn new(classes: Arc<SchubertClasses>) -> Oracle {
        Oracle {
            classes,
            products: DashMap::new(),
        }
    }

    pub fn group(&self) -> &Arc<WeylGroup> {
        self.classes.group()
    }

    pub fn classes(&self) -> &Arc<SchubertClasses> {
        &self.classes
    }

    pub fn product_expansion(&self, w: ElementId, v: ElementId) -> Result<Arc<SchubertExpansion>> {
        if let Some(e) = self.products.get(&(w, v)) {
            return Ok(e.clone());
        }
        let p = self
            .classes
            .schubert_class(w)
            .product(self.classes.schubert_class(v));
        let e = Arc::new(expand_in_schubert(&self.classes, &p)?.expansion);
        self.products.insert((w, v), e.clone());
        Ok(e)
    }

    /// The `S_u` coefficient of `S_w S_v`.
    pub fn constant(&self, w: ElementId, v: ElementId, u: ElementId) -> Result<Polynomial> {
        Ok(self
            .product_expansion(w, v)?
            .coefficient(u)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.group().rank())))
    }

    /// `c_{wvu} = c_{wv}^{w_0 u}`.
    pub fn triple_constant(&self, w: ElementId, v: ElementId, u: ElementId) -> Result<BigInt> {
        let g = self.group();
        check_triple_lengths(g, w, v, u)?;
        integer_value(&self.constant(w, v, g.multiply(g.longest(), u))?)
    }
}

/// One-off `c_{wv}^u` without a cache.
pub fn oracle_constant(
    classes: &SchubertClasses,
    w: ElementId,
    v: ElementId,
    u: ElementId,
) -> Result<Polynomial> {
    let p = classes.schubert_class(w).product(classes.schubert_class(v));
    Ok(expand_in_schubert(classes, &p)?
        .expansion
        .coefficient(u)
        .cloned()
        .unwrap_or_else(|| Polynomial::zero(classes.group().rank())))
}

#[derive(Clone, Debug)]
pub struct SweepFilters {
    pub w: Option<ElementId>,
    pub v: Option<ElementId>,
    pub u: Option<ElementId>,
    /// Refuse groups larger than this.
    pub max_order: usize,
}

impl Default for SweepFilters {
    fn default() -> Self {
        SweepFilters {
            w: None,
            v: None,
            u: None,
            max_order: DEFAULT_SWEEP_BOUND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub w: String,
    pub v: String,
    pub u: String,
    pub recurrence: String,
    pub oracle: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PositivityStats {
    /// Nonzero constants with `l(u) = l(w)+l(v)`.
    pub ordinary: usize,
    /// Ordinary constants that are not nonnegative integers.
    pub ordinary_violations: usize,
    /// Nonzero constants with `l(u) < l(w)+l(v)`.
    pub equivariant: usize,
    /// Equivariant constants with a negative simple-root coefficient.
    pub equivariant_violations: usize,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub group: String,
    pub triples: usize,
    pub nonzero: usize,
    pub mismatches: Vec<Mismatch>,
    pub max_coeff: BigInt,
    pub elapsed_ms: u128,
    pub positivity: PositivityStats,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// `{"triples", "mismatches", "max_coeff", "elapsed_ms", ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        let max: serde_json::Number = self
            .max_coeff
            .to_string()
            .parse()
            .expect("integers are valid JSON numbers");
        serde_json::json!({
            "group": self.group,
            "triples": self.triples,
            "nonzero": self.nonzero,
            "mismatches": self.mismatches,
            "max_coeff": max,
            "elapsed_ms": self.elapsed_ms as u64,
            "positivity": self.positivity,
        })
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "{}: {} triples, {} nonzero, {} mismatches, max |coeff| {}, {} ms",
            self.group,
            self.triples,
            self.nonzero,
            self.mismatches.len(),
            self.max_coeff,
            self.elapsed_ms
        )];
        let p = &self.positivity;
        out.push(format!(
            "positivity: {} ordinary ({} violations), {} equivariant ({} violations)",
            p.ordinary, p.ordinary_violations, p.equivariant, p.equivariant_violations
        ));
        for m in &self.mismatches {
            out.push(format!(
                "mismatch c_{{{},{}}}^{{{}}}: recurrence {} oracle {}",
                m.w, m.v, m.u, m.recurrence, m.oracle
            ));
        }
        out
    }
}

/// Compare the recurrence with the oracle on every triple passing `filters`.
pub fn verify_sweep(
    engine: &Engine,
    oracle: &Oracle,
    filters: &SweepFilters,
) -> Result<SweepReport> {
    let g = engine.group().clone();
    if !Arc::ptr_eq(&g, oracle.group()) {
        return Err(Error::MixedRootSystems);
    }
    if g.order() > filters.max_order {
        return Err(Error::Precondition(format!(
            "|W| = {} exceeds the sweep bound {}",
            g.order(),
            filters.max_order
        )));
    }
    let start = Instant::now();
    let keep = |f: Option<ElementId>, x: ElementId| f.is_none_or(|y| y == x);
    let pairs: Vec<(ElementId, ElementId)> = g
        .ids()
        .filter(|&w| keep(filters.w, w))
        .flat_map(|w| g.ids().map(move |v| (w, v)))
        .filter(|&(_, v)| keep(filters.v, v))
        .collect();
    let us: Vec<ElementId> = g.ids().filter(|&u| keep(filters.u, u)).collect();

    struct Partial {
        triples: usize,
        nonzero: usize,
        mismatches: Vec<Mismatch>,
        max_coeff: BigInt,
        positivity: PositivityStats,
    }
    let results: Vec<Partial> = pairs
        .par_iter()
        .map(|&(w, v)| -> Result<Partial> {
            let expected = oracle.product_expansion(w, v)?;
            let zero = Polynomial::zero(g.rank());
            let mut part = Partial {
                triples: 0,
                nonzero: 0,
                mismatches: Vec::new(),
                max_coeff: BigInt::zero(),
                positivity: PositivityStats::default(),
            };
            for &u in &us {
                part.triples += 1;
                let got = engine.structure_constant(w, v, u);
                let want = expected.coefficient(u).unwrap_or(&zero);
                if &got != want {
                    part.mismatches.push(Mismatch {
                        w: g.format(w),
                        v: g.format(v),
                        u: g.format(u),
                        recurrence: got.to_string(),
                        oracle: want.to_string(),
                    });
                }
                if want.is_zero() {
                    continue;
                }
                part.nonzero += 1;
                part.max_coeff = part.max_coeff.clone().max(want.max_abs_coefficient());
                if g.length(u) == g.length(w) + g.length(v) {
                    part.positivity.ordinary += 1;
                    let ok = want.constant_value().is_some_and(|c| c >= BigInt::zero());
                    if !ok {
                        part.positivity.ordinary_violations += 1;
                    }
                } else {
                    part.positivity.equivariant += 1;
                    if !want.has_nonnegative_coefficients() {
                        part.positivity.equivariant_violations += 1;
                    }
                }
            }
            Ok(part)
        })
        .collect::<Result<_>>()?;

    let mut report = SweepReport {
        group: g.root_system().label(),
        triples: 0,
        nonzero: 0,
        mismatches: Vec::new(),
        max_coeff: BigInt::zero(),
        elapsed_ms: 0,
        positivity: PositivityStats::default(),
    };
    for p in results {
        report.triples += p.triples;
        report.nonzero += p.nonzero;
        report.mismatches.extend(p.mismatches);
        report.max_coeff = report.max_coeff.max(p.max_coeff);
        let (a, b) = (&mut report.positivity, p.positivity);
        a.ordinary += b.ordinary;
        a.ordinary_violations += b.ordinary_violations;
        a.equivariant += b.equivariant;
        a.equivariant_violations += b.equivariant_violations;
    }
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub covers: usize,
    pub words: usize,
    pub violations: Vec<String>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every cover `w' = w r_β ⋗ w`: `S_{w'}|_{w'} = S_w|_{w'}·(w·β)`, and in
/// every reduced word of `w'` exactly one letter can be deleted to leave `w`.
pub fn cover_sweep(group: &WeylGroup) -> CoverReport {
    let g = group;
    let mut report = CoverReport::default();
    for w in g.ids() {
        for (up, root) in g.covers(w) {
            report.covers += 1;
            let beta = g.root_image(w, root).to_polynomial();
            if bottom_restriction(g, up) != &restrict(g, w, up) * &beta {
                report.violations.push(format!(
                    "restriction identity fails for {} < {}",
                    g.format(w),
                    g.format(up)
                ));
            }
            for word in g.all_reduced_words(up) {
                report.words += 1;
                let removable = (0..word.len())
                    .filter(|&b| {
                        let mut rest = word.clone();
                        rest.remove(b);
                        g.from_word(&rest).ok() == Some(w)
                    })
                    .count();
                if removable != 1 {
                    report.violations.push(format!(
                        "{removable} removable letters in {:?} for {} < {}",
                        word,
                        g.format(w),
                        g.format(up)
                    ));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkm::chern_class;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn setup(label: &str) -> (Arc<WeylGroup>, Arc<SchubertClasses>) {
        let g = WeylGroup::named(label).unwrap();
        let c = SchubertClasses::new(g.clone());
        (g, c)
    }

    fn poly(text: &str, rank: usize) -> Polynomial {
        Polynomial::parse(text, rank).unwrap()
    }

    #[test]
    fn schubert_classes_expand_to_themselves() {
        for label in ["A2", "B2", "G2"] {
            let (g, cls) = setup(label);
            for w in g.ids() {
                let rep = expand_in_schubert(&cls, cls.schubert_class(w)).unwrap();
                assert!(rep.residual_zero);
                assert_eq!(rep.steps, 1);
                assert_eq!(rep.expansion.len(), 1);
                assert!(rep.expansion.coefficient(w).unwrap().is_one());
            }
        }
    }

    #[test]
    fn small_expansions() {
        let (g, cls) = setup("A1");
        let s = g.longest();
        let sq = cls.schubert_class(s).product(cls.schubert_class(s));
        let e = expand_in_schubert(&cls, &sq).unwrap().expansion;
        assert_eq!(e.len(), 1);
        assert_eq!(e.coefficient(s), Some(&poly("a1", 1)));

        let (g, cls) = setup("A2");
        let c = chern_class(&g, 0).unwrap();
        let e = expand_in_schubert(&cls, &c.product(cls.schubert_class(g.identity())))
            .unwrap()
            .expansion;
        assert_eq!(e.coefficient(g.identity()), Some(&poly("-a1", 2)));
        assert_eq!(
            e.coefficient(g.from_word(&[0]).unwrap()),
            Some(&poly("2", 2))
        );
        assert_eq!(
            e.coefficient(g.from_word(&[1]).unwrap()),
            Some(&poly("-1", 2))
        );
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn worked_example_values() {
        let (g, cls) = setup("A2");
        let p = |t: &str| g.parse_element(t).unwrap();
        assert!(oracle_constant(&cls, g.identity(), p("213"), p("213"))
            .unwrap()
            .is_one());
        assert_eq!(
            oracle_constant(&cls, p("231"), p("213"), p("231")).unwrap(),
            poly("y2 - y1", 2)
        );
        let (g, cls) = setup("A3");
        let p = |t: &str| g.parse_element(t).unwrap();
        assert!(oracle_constant(&cls, p("1234"), p("2413"), p("2413"))
            .unwrap()
            .is_one());
    }

    #[test]
    fn non_class_input_is_rejected() {
        let (g, cls) = setup("A2");
        let mut values = vec![Polynomial::zero(2); g.order()];
        values[g.longest().index()] = Polynomial::one(2);
        let bad = GkmClass::from_values(g.clone(), values).unwrap();
        assert!(matches!(
            expand_in_schubert(&cls, &bad),
            Err(Error::NotDivisible { .. })
        ));
        let (_, other) = setup("A2");
        assert_eq!(
            expand_in_schubert(&other, cls.schubert_class(g.identity())).unwrap_err(),
            Error::MixedRootSystems
        );
    }

    #[test]
    fn rebuild_round_trip() {
        let mut rng = StdRng::seed_from_u64(7);
        for label in ["A2", "A3"] {
            let (g, cls) = setup(label);
            for _ in 0..20 {
                let mut e = SchubertExpansion::new();
                for w in g.ids() {
                    if rng.gen_bool(0.3) {
                        let mut c = Polynomial::constant(g.rank(), rng.gen_range(-4i64..=4));
                        if rng.gen_bool(0.5) {
                            c = &c * &Polynomial::var(g.rank(), rng.gen_range(0..g.rank()));
                        }
                        e.add_term(w, &c);
                    }
                }
                let class = e.rebuild(&cls);
                assert!(class.is_gkm());
                assert_eq!(expand_in_schubert(&cls, &class).unwrap().expansion, e);
            }
        }
    }

    #[test]
    fn oracle_is_symmetric() {
        for label in ["A2", "A3", "B2"] {
            let (g, cls) = setup(label);
            let o = Oracle::new(cls);
            for w in g.ids() {
                for v in g.ids() {
                    assert_eq!(
                        *o.product_expansion(w, v).unwrap(),
                        *o.product_expansion(v, w).unwrap()
                    );
                }
            }
        }
    }

    /// `S_w·r_α` from the closed form: `S_w` if `wr > w`, otherwise
    /// `S_w − (w·α) S_{wr} − Σ_{w' = wr r_β ⋗ wr} ⟨α,β⟩ S_{w'}` (the sum
    /// includes `w' = w` with weight 2).
    fn right_reflection_closed_form(g: &WeylGroup, w: ElementId, i: usize) -> SchubertExpansion {
        let rank = g.rank();
        let mut e = SchubertExpansion::new();
        e.add_term(w, &Polynomial::one(rank));
        if g.is_right_ascent(w, i) {
            return e;
        }
        let wr = g.right_mul_simple(w, i);
        e.add_term(wr, &(-&g.simple_root_image(w, i).to_polynomial()));
        for (up, root) in g.covers(wr) {
            e.add_term(up, &Polynomial::constant(rank, -g.coeff_pairing(i, root)));
        }
        e
    }

    #[test]
    fn right_reflection_identity() {
        for label in ["A2", "A3", "B2", "G2"] {
            let (g, cls) = setup(label);
            for w in g.ids() {
                for i in 0..g.rank() {
                    let r = g.from_word(&[i]).unwrap();
                    let got = expand_in_schubert(&cls, &cls.schubert_class(w).right_act(r))
                        .unwrap()
                        .expansion;
                    assert_eq!(got, right_reflection_closed_form(&g, w, i), "{label}");
                }
            }
        }
    }

    #[test]
    fn small_sweeps() {
        for (label, n) in [("A2", 216), ("B2", 512)] {
            let (_, cls) = setup(label);
            let e = Engine::new(cls.clone());
            let o = Oracle::new(cls);
            let rep = verify_sweep(&e, &o, &SweepFilters::default()).unwrap();
            assert_eq!(rep.triples, n);
            assert!(rep.passed(), "{:?}", rep.mismatches);
            assert_eq!(rep.positivity.ordinary_violations, 0);
            assert_eq!(rep.positivity.equivariant_violations, 0);
            let js = rep.to_json();
            assert_eq!(js["triples"], n);
            assert!(js["mismatches"].as_array().unwrap().is_empty());
        }
        let (g, cls) = setup("A2");
        let e = Engine::new(cls.clone());
        let o = Oracle::new(cls);
        let filters = SweepFilters {
            w: Some(g.longest()),
            ..SweepFilters::default()
        };
        assert_eq!(verify_sweep(&e, &o, &filters).unwrap().triples, 36);
        let tight = SweepFilters {
            max_order: 5,
            ..SweepFilters::default()
        };
        assert!(matches!(
            verify_sweep(&e, &o, &tight),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cover_sweeps_clean() {
        for label in ["A1", "A2", "B2", "G2"] {
            let (g, _) = setup(label);
            let rep = cover_sweep(&g);
            assert!(rep.passed(), "{:?}", rep.violations);
            assert!(rep.covers > 0);
        }
    }

    #[test]
    fn triple_constants_are_symmetric() {
        let (g, cls) = setup("A2");
        let o = Oracle::new(cls);
        let dim = g.num_positive_roots();
        for a in g.ids() {
            for b in g.ids() {
                for c in g.ids() {
                    if g.length(a) + g.length(b) + g.length(c) != dim {
                        assert!(o.triple_constant(a, b, c).is_err());
                        continue;
                    }
                    let x = o.triple_constant(a, b, c).unwrap();
                    for (p, q, r) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                        assert_eq!(o.triple_constant(p, q, r).unwrap(), x);
                    }
                }
            }
        }
    }
}
