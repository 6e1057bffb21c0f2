//! Restrictions `S_v|_w` of Schubert classes to fixed points.
//!
//! Fix a reduced word `I = (i_1, …, i_l)` for `w`. Then `S_v|_w` is the sum,
//! over reduced subwords `J ⊆ I` with product `v`, of `∏_{j∈J} π_{j−1}·α_{i_j}`
//! where `π_{j−1} = r_{i_1}⋯r_{i_{j−1}}` is the full prefix of `I`. The sum is
//! accumulated in one left-to-right pass keyed by the partial product of the
//! chosen letters, so subsets are never enumerated.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::gkm::GkmClass;
use crate::polyring::{LinearForm, Polynomial};
use crate::rootsys::{ElementId, WeylGroup};

/// Subword sums over a fixed word. With a target, only partial products
/// that are left prefixes of the target are kept.
fn subword_sums(
    group: &WeylGroup,
    word: &[usize],
    target: Option<ElementId>,
) -> BTreeMap<ElementId, Polynomial> {
    let rank = group.rank();
    let mut states: BTreeMap<ElementId, Polynomial> = BTreeMap::new();
    states.insert(group.identity(), Polynomial::one(rank));
    let mut prefix = group.identity();
    for &i in word {
        let root = group.simple_root_image(prefix, i).to_polynomial();
        let mut next = states.clone();
        for (&x, acc) in &states {
            if !group.is_right_ascent(x, i) {
                continue;
            }
            let y = group.right_mul_simple(x, i);
            if let Some(v) = target {
                let rest = group.multiply(group.inverse(y), v);
                if group.length(rest) + group.length(y) != group.length(v) {
                    continue;
                }
            }
            let term = acc * &root;
            next.entry(y).and_modify(|p| *p += &term).or_insert(term);
        }
        states = next;
        prefix = group.right_mul_simple(prefix, i);
    }
    states.retain(|_, p| !p.is_zero());
    states
}

/// `S_v|_w` computed from the given reduced word for `w`.
pub fn restrict_with_word(group: &WeylGroup, v: ElementId, word: &[usize]) -> Result<Polynomial> {
    if !group.is_reduced(word) {
        return Err(Error::Precondition(format!("word {word:?} is not reduced")));
    }
    let w = group.from_word(word)?;
    if !group.bruhat_leq(v, w) {
        return Ok(Polynomial::zero(group.rank()));
    }
    Ok(subword_sums(group, word, Some(v))
        .remove(&v)
        .unwrap_or_else(|| Polynomial::zero(group.rank())))
}

/// `S_v|_w` from the canonical reduced word of `w`.
pub fn restrict(group: &WeylGroup, v: ElementId, w: ElementId) -> Polynomial {
    restrict_with_word(group, v, group.reduced_word(w)).expect("canonical word is reduced")
}

/// All restrictions `S_v|_w` at the point `w` from one pass over `word`.
pub fn restrictions_at(group: &WeylGroup, word: &[usize]) -> Result<Vec<Polynomial>> {
    if !group.is_reduced(word) {
        return Err(Error::Precondition(format!("word {word:?} is not reduced")));
    }
    let sums = subword_sums(group, word, None);
    Ok(group
        .ids()
        .map(|v| {
            sums.get(&v)
                .cloned()
                .unwrap_or_else(|| Polynomial::zero(group.rank()))
        })
        .collect())
}

/// The positive roots `β` with `r_β·w < w`, i.e. `w⁻¹·β < 0`.
pub fn bottom_factors(group: &WeylGroup, w: ElementId) -> Vec<LinearForm> {
    let winv = group.element(group.inverse(w));
    group
        .root_system()
        .positive_roots()
        .iter()
        .filter(|b| winv.apply(&b.coords).iter().any(|&c| c < 0))
        .map(|b| b.as_linear_form())
        .collect()
}

/// `S_w|_w = ∏_{β>0, r_β w < w} β`.
pub fn bottom_restriction(group: &WeylGroup, w: ElementId) -> Polynomial {
    bottom_factors(group, w)
        .iter()
        .fold(Polynomial::one(group.rank()), |acc, f| {
            &acc * &f.to_polynomial()
        })
}

/// Memoized Schubert classes and base constants for one group.
pub struct SchubertClasses {
    group: Arc<WeylGroup>,
    classes: Vec<OnceLock<GkmClass>>,
    base: Vec<OnceLock<Polynomial>>,
    bottoms: Vec<OnceLock<Vec<LinearForm>>>,
}

impl SchubertClasses {
    pub fn new(group: Arc<WeylGroup>) -> Arc<SchubertClasses> {
        let n = group.order();
        Arc::new(SchubertClasses {
            group,
            classes: (0..n).map(|_| OnceLock::new()).collect(),
            base: (0..n).map(|_| OnceLock::new()).collect(),
            bottoms: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn group(&self) -> &Arc<WeylGroup> {
        &self.group
    }

    /// `S_w` as the list of its restrictions `S_w|_v` over all points `v`.
    pub fn schubert_class(&self, w: ElementId) -> &GkmClass {
        self.classes[w.index()].get_or_init(|| {
            let values = self
                .group
                .ids()
                .map(|v| restrict(&self.group, w, v))
                .collect();
            GkmClass::from_values(self.group.clone(), values).expect("one value per point")
        })
    }

    /// `c_{w_0,v}^{w_0} = S_v|_{w_0}`.
    pub fn base_constant(&self, v: ElementId) -> &Polynomial {
        self.base[v.index()].get_or_init(|| restrict(&self.group, v, self.group.longest()))
    }

    pub fn bottom_factors(&self, w: ElementId) -> &[LinearForm] {
        self.bottoms[w.index()].get_or_init(|| bottom_factors(&self.group, w))
    }

    pub fn bottom_restriction(&self, w: ElementId) -> Polynomial {
        self.bottom_factors(w)
            .iter()
            .fold(Polynomial::one(self.group.rank()), |acc, f| {
                &acc * &f.to_polynomial()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::act;

    fn g(label: &str) -> Arc<WeylGroup> {
        WeylGroup::named(label).unwrap()
    }

    fn y(text: &str, rank: usize) -> Polynomial {
        Polynomial::parse(text, rank).unwrap()
    }

    #[test]
    fn worked_example_two_words() {
        let g = g("A2");
        let v = g.parse_element("213").unwrap();
        // 321 = r_12 r_23 r_12 and r_23 r_12 r_23
        let a = restrict_with_word(&g, v, &[0, 1, 0]).unwrap();
        let b = restrict_with_word(&g, v, &[1, 0, 1]).unwrap();
        assert_eq!(a, y("y3 - y1", 2));
        assert_eq!(b, a);
        // the two summands of the first word
        assert_eq!(a.render_y(), "y3 - y1");
    }

    #[test]
    fn restrict_edge_cases() {
        let g = g("A2");
        for w in g.ids() {
            assert!(restrict(&g, g.identity(), w).is_one());
        }
        let w0 = g.longest();
        let s = g.parse_element("213").unwrap();
        assert!(restrict(&g, w0, s).is_zero());
        assert!(matches!(
            restrict_with_word(&g, s, &[0, 0]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bottom_restriction_values() {
        let a2 = g("A2");
        assert!(bottom_restriction(&a2, a2.identity()).is_one());
        assert_eq!(
            bottom_restriction(&a2, a2.longest()),
            &(&y("a1", 2) * &y("a2", 2)) * &y("a1 + a2", 2)
        );
        let a1 = g("A1");
        assert_eq!(bottom_restriction(&a1, a1.longest()), y("a1", 1));
    }

    #[test]
    fn schubert_class_values() {
        let g = g("A2");
        let cls = SchubertClasses::new(g.clone());
        assert!(cls
            .schubert_class(g.identity())
            .values()
            .iter()
            .all(|p| p.is_one()));
        let s1 = g.parse_element("213").unwrap();
        let c = cls.schubert_class(s1);
        assert!(c.value(g.identity()).is_zero());
        assert!(c.value(g.parse_element("132").unwrap()).is_zero());
        assert_eq!(c.value(s1), &y("a1", 2));
        assert_eq!(c.value(g.longest()), &y("y3 - y1", 2));
        let a1 = WeylGroup::named("A1").unwrap();
        let cls1 = SchubertClasses::new(a1.clone());
        let c = cls1.schubert_class(a1.longest());
        assert!(c.value(a1.identity()).is_zero());
        assert_eq!(c.value(a1.longest()), &y("a1", 1));
    }

    #[test]
    fn base_constants() {
        let g = g("A2");
        let cls = SchubertClasses::new(g.clone());
        assert!(cls.base_constant(g.identity()).is_one());
        assert_eq!(
            cls.base_constant(g.parse_element("213").unwrap()),
            &y("y3 - y1", 2)
        );
        assert_eq!(
            cls.base_constant(g.longest()),
            &bottom_restriction(&g, g.longest())
        );
    }

    #[test]
    fn reduced_word_independence_in_s4() {
        let g = g("A3");
        for w in g.ids() {
            let words = g.all_reduced_words(w);
            let reference = restrictions_at(&g, &words[0]).unwrap();
            for word in &words[1..] {
                assert_eq!(restrictions_at(&g, word).unwrap(), reference);
            }
            for v in g.ids() {
                assert_eq!(reference[v.index()], restrict(&g, v, w));
            }
        }
    }

    #[test]
    fn support_degree_and_positivity() {
        for label in ["A3", "B2", "G2"] {
            let g = g(label);
            for w in g.ids() {
                for v in g.ids() {
                    let p = restrict(&g, v, w);
                    if !p.is_zero() {
                        assert!(g.bruhat_leq(v, w));
                        assert!(p.is_homogeneous_of(g.length(v)));
                        assert!(p.has_nonnegative_coefficients(), "{label}");
                    } else {
                        assert!(!g.bruhat_leq(v, w), "{label}: zero inside the interval");
                    }
                }
                assert_eq!(restrict(&g, w, w), bottom_restriction(&g, w), "{label}");
            }
        }
    }

    #[test]
    fn cover_ratio() {
        for label in ["A3", "B2", "G2"] {
            let g = g(label);
            for w in g.ids() {
                for (up, root) in g.covers(w) {
                    let beta = g.root_image(w, root).to_polynomial();
                    assert_eq!(
                        bottom_restriction(&g, up),
                        &restrict(&g, w, up) * &beta,
                        "{label}"
                    );
                }
            }
        }
    }

    #[test]
    fn prefix_action_reading_matches_bottom_formula_under_act() {
        // Selecting every letter gives ∏ π_{j-1}·α_{i_j}; check it against act.
        let g = g("B2");
        let w0 = g.longest();
        let word = g.reduced_word(w0).to_vec();
        let mut prefix = g.identity();
        let mut prod = Polynomial::one(2);
        for &i in &word {
            let alpha = Polynomial::var(2, i);
            prod = &prod * &act(g.element(prefix), &alpha);
            prefix = g.right_mul_simple(prefix, i);
        }
        assert_eq!(prod, restrict(&g, w0, w0));
    }
}
