use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::perm::{format_perm, format_word};
use super::{is_negative, mat_mul, Root, RootSystem, WeylElement};
use crate::error::{Error, Result};
use crate::polyring::LinearForm;

pub const DEFAULT_GROUP_BOUND: usize = 50_000;
const BRUHAT_TABLE_BOUND: usize = 10_000;

/// Index of an element in the canonical enumeration of a [`WeylGroup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A fully enumerated Weyl group with multiplication tables.
///
/// Elements are ordered by length, then by their greedy reduced word, so the
/// identity is first and `w_0` is last.
pub struct WeylGroup {
    rs: Arc<RootSystem>,
    elements: Vec<WeylElement>,
    index: HashMap<Vec<i64>, ElementId>,
    words: Vec<Vec<usize>>,
    right_simple: Vec<u32>,
    left_simple: Vec<u32>,
    inverse: Vec<u32>,
    right_reflection: OnceLock<Vec<u32>>,
    left_reflection: OnceLock<Vec<u32>>,
    bruhat: OnceLock<Option<Vec<Vec<u64>>>>,
}

impl fmt::Debug for WeylGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeylGroup")
            .field("label", &self.rs.label())
            .field("order", &self.elements.len())
            .finish()
    }
}

impl WeylGroup {
    pub fn new(rs: RootSystem) -> Result<Arc<WeylGroup>> {
        Self::with_bound(Arc::new(rs), DEFAULT_GROUP_BOUND)
    }

    pub fn named(label: &str) -> Result<Arc<WeylGroup>> {
        Self::new(RootSystem::named(label)?)
    }

    pub fn with_bound(rs: Arc<RootSystem>, bound: usize) -> Result<Arc<WeylGroup>> {
        let rank = rs.rank();
        let mut elements = vec![rs.identity()];
        let mut index: HashMap<Vec<i64>, ElementId> = HashMap::new();
        index.insert(elements[0].matrix.clone(), ElementId(0));
        let mut level = vec![elements[0].clone()];
        while !level.is_empty() {
            let mut next: HashMap<Vec<i64>, WeylElement> = HashMap::new();
            for x in &level {
                for i in 0..rank {
                    if is_negative(&x.column(i).coords) {
                        continue;
                    }
                    let m = mat_mul(&x.matrix, &rs.simple_matrices[i], rank);
                    next.entry(m.clone()).or_insert_with(|| rs.element(m));
                }
            }
            if elements.len() + next.len() > bound {
                return Err(Error::GroupTooLarge { bound });
            }
            let mut batch: Vec<(Vec<usize>, WeylElement)> = next
                .into_values()
                .map(|w| (rs.reduced_word(&w).expect("same system"), w))
                .collect();
            batch.sort_by(|a, b| a.0.cmp(&b.0));
            level = Vec::with_capacity(batch.len());
            for (_, w) in batch {
                index.insert(w.matrix.clone(), ElementId(elements.len() as u32));
                elements.push(w.clone());
                level.push(w);
            }
        }

        let words: Vec<Vec<usize>> = elements
            .iter()
            .map(|w| rs.reduced_word(w).expect("same system"))
            .collect();
        let lookup = |m: &[i64]| index[m].0;
        let mut right_simple = Vec::with_capacity(elements.len() * rank);
        let mut left_simple = Vec::with_capacity(elements.len() * rank);
        for w in &elements {
            for i in 0..rank {
                right_simple.push(lookup(&mat_mul(&w.matrix, &rs.simple_matrices[i], rank)));
            }
            for i in 0..rank {
                left_simple.push(lookup(&mat_mul(&rs.simple_matrices[i], &w.matrix, rank)));
            }
        }
        let mut group = WeylGroup {
            rs,
            elements,
            index,
            words,
            right_simple,
            left_simple,
            inverse: Vec::new(),
            right_reflection: OnceLock::new(),
            left_reflection: OnceLock::new(),
            bruhat: OnceLock::new(),
        };
        group.inverse = (0..group.order())
            .map(|k| {
                let word = &group.words[k];
                group.walk(group.identity(), word.iter().rev().copied()).0
            })
            .collect();
        Ok(Arc::new(group))
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn root_system_arc(&self) -> Arc<RootSystem> {
        self.rs.clone()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = ElementId> + ExactSizeIterator {
        (0..self.elements.len() as u32).map(ElementId)
    }

    pub fn identity(&self) -> ElementId {
        ElementId(0)
    }

    pub fn longest(&self) -> ElementId {
        ElementId(self.elements.len() as u32 - 1)
    }

    pub fn element(&self, id: ElementId) -> &WeylElement {
        &self.elements[id.index()]
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn id_of(&self, w: &WeylElement) -> Result<ElementId> {
        self.rs.check_member(w)?;
        self.index
            .get(&w.matrix)
            .copied()
            .ok_or_else(|| Error::Internal("element missing from enumeration".into()))
    }

    pub fn length(&self, id: ElementId) -> usize {
        self.elements[id.index()].length
    }

    pub fn reduced_word(&self, id: ElementId) -> &[usize] {
        &self.words[id.index()]
    }

    pub fn right_mul_simple(&self, id: ElementId, i: usize) -> ElementId {
        ElementId(self.right_simple[id.index() * self.rank() + i])
    }

    pub fn left_mul_simple(&self, i: usize, id: ElementId) -> ElementId {
        ElementId(self.left_simple[id.index() * self.rank() + i])
    }

    pub fn inverse(&self, id: ElementId) -> ElementId {
        ElementId(self.inverse[id.index()])
    }

    fn walk(&self, start: ElementId, word: impl IntoIterator<Item = usize>) -> ElementId {
        word.into_iter()
            .fold(start, |acc, i| self.right_mul_simple(acc, i))
    }

    pub fn multiply(&self, a: ElementId, b: ElementId) -> ElementId {
        self.walk(a, self.words[b.index()].iter().copied())
    }

    pub fn from_word(&self, word: &[usize]) -> Result<ElementId> {
        if let Some(&i) = word.iter().find(|&&i| i >= self.rank()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                rank: self.rank(),
            });
        }
        Ok(self.walk(self.identity(), word.iter().copied()))
    }

    pub fn is_right_ascent(&self, id: ElementId, i: usize) -> bool {
        self.length(self.right_mul_simple(id, i)) > self.length(id)
    }

    pub fn is_left_ascent(&self, i: usize, id: ElementId) -> bool {
        self.length(self.left_mul_simple(i, id)) > self.length(id)
    }

    pub fn first_right_ascent(&self, id: ElementId) -> Option<usize> {
        (0..self.rank()).find(|&i| self.is_right_ascent(id, i))
    }

    pub fn num_positive_roots(&self) -> usize {
        self.rs.positive_roots.len()
    }

    fn right_reflection_table(&self) -> &[u32] {
        self.right_reflection.get_or_init(|| {
            let npos = self.num_positive_roots();
            let mut t = Vec::with_capacity(self.order() * npos);
            for w in self.ids() {
                for b in 0..npos {
                    t.push(self.walk(w, self.rs.reflection_word(b).iter().copied()).0);
                }
            }
            t
        })
    }

    fn left_reflection_table(&self) -> &[u32] {
        self.left_reflection.get_or_init(|| {
            let npos = self.num_positive_roots();
            let right = self.right_reflection_table();
            let mut t = Vec::with_capacity(self.order() * npos);
            // r_β·w = (w⁻¹·r_β)⁻¹
            for w in self.ids() {
                let winv = self.inverse(w);
                for b in 0..npos {
                    t.push(self.inverse[right[winv.index() * npos + b] as usize]);
                }
            }
            t
        })
    }

    /// `w·r_β` for the positive root with index `root`.
    pub fn right_mul_reflection(&self, id: ElementId, root: usize) -> ElementId {
        ElementId(self.right_reflection_table()[id.index() * self.num_positive_roots() + root])
    }

    /// `r_β·w` for the positive root with index `root`.
    pub fn left_mul_reflection(&self, root: usize, id: ElementId) -> ElementId {
        ElementId(self.left_reflection_table()[id.index() * self.num_positive_roots() + root])
    }

    /// Covers `w' = w·r_β ⋗ w` as `(w', root index)`, in root order.
    pub fn covers(&self, id: ElementId) -> Vec<(ElementId, usize)> {
        let l = self.length(id);
        (0..self.num_positive_roots())
            .filter_map(|b| {
                let up = self.right_mul_reflection(id, b);
                (self.length(up) == l + 1).then_some((up, b))
            })
            .collect()
    }

    /// Strong Bruhat order `v ≤ w`.
    pub fn bruhat_leq(&self, v: ElementId, w: ElementId) -> bool {
        if let Some(table) = self.bruhat_table() {
            return table[w.index()][v.index() / 64] >> (v.index() % 64) & 1 == 1;
        }
        self.bruhat_leq_lifting(v, w)
    }

    /// The lifting-property recursion, without the precomputed table.
    pub fn bruhat_leq_lifting(&self, mut v: ElementId, mut w: ElementId) -> bool {
        loop {
            if self.length(v) > self.length(w) {
                return false;
            }
            if self.length(w) == 0 {
                return self.length(v) == 0;
            }
            let s = *self.words[w.index()].last().unwrap();
            w = self.right_mul_simple(w, s);
            if !self.is_right_ascent(v, s) {
                v = self.right_mul_simple(v, s);
            }
        }
    }

    fn bruhat_table(&self) -> Option<&Vec<Vec<u64>>> {
        self.bruhat
            .get_or_init(|| {
                if self.order() > BRUHAT_TABLE_BOUND {
                    return None;
                }
                let n = self.order();
                let blocks = n.div_ceil(64);
                let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n);
                for w in self.ids() {
                    let mut row = vec![0u64; blocks];
                    if self.length(w) == 0 {
                        row[0] = 1;
                    } else {
                        let s = *self.words[w.index()].last().unwrap();
                        let ws = self.right_mul_simple(w, s);
                        let below = &rows[ws.index()];
                        for v in self.ids() {
                            let m = if self.is_right_ascent(v, s) {
                                v
                            } else {
                                self.right_mul_simple(v, s)
                            };
                            if below[m.index() / 64] >> (m.index() % 64) & 1 == 1 {
                                row[v.index() / 64] |= 1 << (v.index() % 64);
                            }
                        }
                    }
                    rows.push(row);
                }
                Some(rows)
            })
            .as_ref()
    }

    /// Coordinates of `w·β` for a positive root index.
    pub fn root_image(&self, id: ElementId, root: usize) -> LinearForm {
        LinearForm::new(self.elements[id.index()].apply(&self.rs.positive_roots[root].coords))
    }

    /// `w·α_i` as a linear form.
    pub fn simple_root_image(&self, id: ElementId, i: usize) -> LinearForm {
        self.elements[id.index()].column(i)
    }

    pub fn positive_root(&self, root: usize) -> &Root {
        &self.rs.positive_roots[root]
    }

    /// `⟨α_i, β⟩` for a positive root index.
    pub fn coeff_pairing(&self, i: usize, root: usize) -> i64 {
        self.rs
            .coeff_pairing(i, &self.rs.positive_roots[root])
            .expect("valid simple index and positive root")
    }

    pub fn parse_element(&self, text: &str) -> Result<ElementId> {
        self.id_of(&self.rs.parse_element(text)?)
    }

    pub fn format(&self, id: ElementId) -> String {
        match self.one_line(id) {
            Some(p) => format_perm(&p),
            None => format_word(self.reduced_word(id)),
        }
    }

    pub fn one_line(&self, id: ElementId) -> Option<Vec<usize>> {
        self.rs.element_to_perm(self.element(id)).ok()
    }

    /// Every reduced word of an element, in lexicographic order.
    pub fn all_reduced_words(&self, id: ElementId) -> Vec<Vec<usize>> {
        fn go(g: &WeylGroup, id: ElementId, suffix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if g.length(id) == 0 {
                out.push(suffix.iter().rev().copied().collect());
                return;
            }
            for i in 0..g.rank() {
                if !g.is_right_ascent(id, i) {
                    suffix.push(i);
                    go(g, g.right_mul_simple(id, i), suffix, out);
                    suffix.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, id, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// Whether `word` is a reduced expression (of whatever it multiplies to).
    pub fn is_reduced(&self, word: &[usize]) -> bool {
        let mut x = self.identity();
        for &i in word {
            if !self.is_right_ascent(x, i) {
                return false;
            }
            x = self.right_mul_simple(x, i);
        }
        true
    }
}
