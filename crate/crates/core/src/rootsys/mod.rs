//! Finite root systems, Weyl group elements and Bruhat order.
//!
//! Everything lives in the simple-root basis: a root is an integer coordinate
//! vector, and a Weyl group element is the integer matrix of its action on
//! that basis (column `j` is the image of the `j`-th simple root). Simple
//! indices are zero-based in the API and one-based in text (`s1`, `a1`).

mod group;
mod perm;

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};

pub use group::{ElementId, WeylGroup};

use crate::error::{Error, Result};
use crate::polyring::{Basis, LinearForm, Polynomial};

pub const DEFAULT_ROOT_BOUND: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub coords: Vec<i64>,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.coords.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0) && self.coords.iter().any(|&c| c > 0)
    }

    pub fn as_linear_form(&self) -> LinearForm {
        LinearForm::new(self.coords.clone())
    }
}

/// An element of the Weyl group, stored as its matrix on the simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    system: u64,
    rank: usize,
    matrix: Vec<i64>,
    length: usize,
}

impl WeylElement {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn matrix(&self) -> &[i64] {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.matrix[row * self.rank + col]
    }

    /// Image of the `j`-th simple root.
    pub fn column(&self, j: usize) -> LinearForm {
        LinearForm::new((0..self.rank).map(|i| self.entry(i, j)).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    pub fn apply(&self, coords: &[i64]) -> Vec<i64> {
        mat_vec(&self.matrix, self.rank, coords)
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    rank: usize,
    cartan: Vec<Vec<i64>>,
    positive_roots: Vec<Root>,
    root_index: HashMap<Vec<i64>, usize>,
    /// Matrix of `r_β` for each positive root, aligned with `positive_roots`.
    reflections: Vec<Vec<i64>>,
    /// A palindromic word `u k u⁻¹` with `β = u·α_k`, aligned likewise.
    reflection_words: Vec<Vec<usize>>,
    simple_matrices: Vec<Vec<i64>>,
    type_label: Option<String>,
    fingerprint: u64,
}

impl RootSystem {
    pub fn build(cartan: Vec<Vec<i64>>) -> Result<RootSystem> {
        Self::build_with_bound(cartan, DEFAULT_ROOT_BOUND)
    }

    pub fn build_with_bound(cartan: Vec<Vec<i64>>, bound: usize) -> Result<RootSystem> {
        validate_cartan(&cartan)?;
        let rank = cartan.len();
        let simple_matrices: Vec<Vec<i64>> = (0..rank)
            .map(|i| {
                let mut m = identity_matrix(rank);
                for j in 0..rank {
                    m[i * rank + j] -= cartan[i][j];
                }
                m
            })
            .collect();

        // Breadth-first closure; each new root remembers a word u with β = u·α_k.
        let unit = |i: usize| {
            let mut v = vec![0; rank];
            v[i] = 1;
            v
        };
        let mut seen: HashMap<Vec<i64>, (Vec<usize>, usize)> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..rank {
            seen.insert(unit(i), (Vec::new(), i));
            queue.push_back(unit(i));
        }
        while let Some(beta) = queue.pop_front() {
            for i in 0..rank {
                let pairing: i64 = (0..rank).map(|j| cartan[i][j] * beta[j]).sum();
                if pairing == 0 {
                    continue;
                }
                let mut gamma = beta.clone();
                gamma[i] -= pairing;
                if gamma.iter().any(|&c| c < 0) || seen.contains_key(&gamma) {
                    continue;
                }
                let (word, k) = seen[&beta].clone();
                let mut w = vec![i];
                w.extend(word);
                seen.insert(gamma.clone(), (w, k));
                if seen.len() > bound {
                    return Err(Error::NonFiniteType { bound });
                }
                queue.push_back(gamma);
            }
        }

        let mut coords: Vec<Vec<i64>> = seen.keys().cloned().collect();
        coords.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let mut reflections = Vec::with_capacity(coords.len());
        let mut reflection_words = Vec::with_capacity(coords.len());
        for c in &coords {
            let (u, k) = &seen[c];
            let mut word = u.clone();
            word.push(*k);
            word.extend(u.iter().rev());
            let mut m = identity_matrix(rank);
            for &i in &word {
                m = mat_mul(&m, &simple_matrices[i], rank);
            }
            reflections.push(m);
            reflection_words.push(word);
        }
        let root_index = coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();

        let mut hasher = DefaultHasher::new();
        cartan.hash(&mut hasher);
        let fingerprint = hasher.finish();

        Ok(RootSystem {
            rank,
            cartan,
            positive_roots: coords.into_iter().map(|coords| Root { coords }).collect(),
            root_index,
            reflections,
            reflection_words,
            simple_matrices,
            type_label: None,
            fingerprint,
        })
    }

    /// Build a standard type from a label such as `"A3"`, `"B_2"` or `"G2"`.
    pub fn named(label: &str) -> Result<RootSystem> {
        let cartan = named_cartan(label)?;
        let mut rs = Self::build(cartan)?;
        let norm: String = label.chars().filter(|c| *c != '_').collect();
        rs.type_label = Some(norm.to_ascii_uppercase());
        Ok(rs)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    pub fn simple_root(&self, i: usize) -> Result<Root> {
        self.check_index(i)?;
        let mut coords = vec![0; self.rank];
        coords[i] = 1;
        Ok(Root { coords })
    }

    pub fn simple_roots(&self) -> Vec<Root> {
        (0..self.rank)
            .map(|i| self.simple_root(i).unwrap())
            .collect()
    }

    pub fn root_index(&self, coords: &[i64]) -> Option<usize> {
        self.root_index.get(coords).copied()
    }

    pub fn type_label(&self) -> Option<&str> {
        self.type_label.as_deref()
    }

    pub fn label(&self) -> String {
        self.type_label
            .clone()
            .unwrap_or_else(|| format!("cartan{:?}", self.cartan))
    }

    pub(crate) fn reflection_word(&self, root: usize) -> &[usize] {
        &self.reflection_words[root]
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.rank {
            return Err(Error::IndexOutOfRange {
                index: i,
                rank: self.rank,
            });
        }
        Ok(())
    }

    fn check_member(&self, w: &WeylElement) -> Result<()> {
        if w.system != self.fingerprint || w.rank != self.rank {
            return Err(Error::MixedRootSystems);
        }
        Ok(())
    }

    fn element(&self, matrix: Vec<i64>) -> WeylElement {
        let length = self
            .positive_roots
            .iter()
            .filter(|b| is_negative(&mat_vec(&matrix, self.rank, &b.coords)))
            .count();
        WeylElement {
            system: self.fingerprint,
            rank: self.rank,
            matrix,
            length,
        }
    }

    pub fn identity(&self) -> WeylElement {
        self.element(identity_matrix(self.rank))
    }

    pub fn simple_reflection(&self, i: usize) -> Result<WeylElement> {
        self.check_index(i)?;
        Ok(self.element(self.simple_matrices[i].clone()))
    }

    /// The reflection through the positive root with the given index.
    pub fn reflection(&self, root: usize) -> WeylElement {
        self.element(self.reflections[root].clone())
    }

    pub fn multiply(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        self.check_member(a)?;
        self.check_member(b)?;
        Ok(self.element(mat_mul(&a.matrix, &b.matrix, self.rank)))
    }

    pub fn inverse(&self, a: &WeylElement) -> Result<WeylElement> {
        self.check_member(a)?;
        let mut m = identity_matrix(self.rank);
        for &i in self.reduced_word(a)?.iter().rev() {
            m = mat_mul(&m, &self.simple_matrices[i], self.rank);
        }
        Ok(self.element(m))
    }

    pub fn length(&self, a: &WeylElement) -> Result<usize> {
        self.check_member(a)?;
        Ok(a.length)
    }

    pub fn from_word(&self, word: &[usize]) -> Result<WeylElement> {
        let mut m = identity_matrix(self.rank);
        for &i in word {
            self.check_index(i)?;
            m = mat_mul(&m, &self.simple_matrices[i], self.rank);
        }
        Ok(self.element(m))
    }

    /// Apply `w` to a root or any coordinate vector.
    pub fn act_on_root(&self, w: &WeylElement, root: &Root) -> Result<Root> {
        self.check_member(w)?;
        Ok(Root {
            coords: w.apply(&root.coords),
        })
    }

    /// `l(w·r_i) > l(w)`, i.e. `w·α_i` is positive.
    pub fn right_ascent(&self, w: &WeylElement, i: usize) -> Result<bool> {
        self.check_member(w)?;
        self.check_index(i)?;
        Ok(!is_negative(&w.column(i).coords))
    }

    pub fn longest_element(&self) -> WeylElement {
        let mut w = self.identity();
        'outer: loop {
            for i in 0..self.rank {
                if !is_negative(&w.column(i).coords) {
                    w = self.element(mat_mul(&w.matrix, &self.simple_matrices[i], self.rank));
                    continue 'outer;
                }
            }
            return w;
        }
    }

    /// All `(w·r_β, β)` with `l(w·r_β) = l(w) + 1`, in root order.
    pub fn covers(&self, w: &WeylElement) -> Result<Vec<(WeylElement, Root)>> {
        self.check_member(w)?;
        Ok(self
            .reflections
            .iter()
            .zip(&self.positive_roots)
            .filter_map(|(r, beta)| {
                let up = self.element(mat_mul(&w.matrix, r, self.rank));
                (up.length == w.length + 1).then(|| (up, beta.clone()))
            })
            .collect())
    }

    /// Strong Bruhat order `v ≤ w`, by the lifting property on the least
    /// right descent of `w`.
    pub fn bruhat_leq(&self, v: &WeylElement, w: &WeylElement) -> Result<bool> {
        self.check_member(v)?;
        self.check_member(w)?;
        let mut v = v.clone();
        let mut w = w.clone();
        loop {
            if v.length > w.length {
                return Ok(false);
            }
            if w.length == 0 {
                return Ok(v.length == 0);
            }
            let s = (0..self.rank)
                .find(|&i| is_negative(&w.column(i).coords))
                .expect("nonidentity element has a right descent");
            w = self.element(mat_mul(&w.matrix, &self.simple_matrices[s], self.rank));
            if is_negative(&v.column(s).coords) {
                v = self.element(mat_mul(&v.matrix, &self.simple_matrices[s], self.rank));
            }
        }
    }

    /// Greedy reduced word: repeatedly strip the least-index right descent.
    pub fn reduced_word(&self, w: &WeylElement) -> Result<Vec<usize>> {
        self.check_member(w)?;
        let mut word = Vec::with_capacity(w.length);
        let mut m = w.matrix.clone();
        while let Some(s) = (0..self.rank).find(|&i| {
            let col: Vec<i64> = (0..self.rank).map(|r| m[r * self.rank + i]).collect();
            is_negative(&col)
        }) {
            word.push(s);
            m = mat_mul(&m, &self.simple_matrices[s], self.rank);
        }
        word.reverse();
        Ok(word)
    }

    /// The integer `c` with `α_i − r_β·α_i = c·β`.
    pub fn coeff_pairing(&self, i: usize, beta: &Root) -> Result<i64> {
        self.check_index(i)?;
        let b = self
            .root_index(&beta.coords)
            .ok_or_else(|| Error::Precondition(format!("{:?} is not a positive root", beta)))?;
        let rank = self.rank;
        let image: Vec<i64> = (0..rank)
            .map(|r| self.reflections[b][r * rank + i])
            .collect();
        let mut diff = vec![0; rank];
        diff[i] = 1;
        for (d, x) in diff.iter_mut().zip(&image) {
            *d -= x;
        }
        let k = beta.coords.iter().position(|&c| c != 0).unwrap();
        let c = diff[k] / beta.coords[k];
        if diff.iter().zip(&beta.coords).any(|(&d, &bc)| d != c * bc) {
            return Err(Error::Internal(format!(
                "α_{} − r_β α_{} is not a multiple of β",
                i + 1,
                i + 1
            )));
        }
        Ok(c)
    }

    /// Number of letters `n` if this is the Cartan matrix of `A_(n-1)`.
    pub fn type_a_degree(&self) -> Option<usize> {
        let n = self.rank;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j {
                    2
                } else if i.abs_diff(j) == 1 {
                    -1
                } else {
                    0
                };
                if self.cartan[i][j] != want {
                    return None;
                }
            }
        }
        Some(n + 1)
    }

    pub fn is_type_a(&self) -> bool {
        self.type_a_degree().is_some()
    }

    /// Render a polynomial; the y-basis is only defined for type A.
    pub fn render(&self, p: &Polynomial, basis: Basis) -> Result<String> {
        if basis == Basis::Y && !self.is_type_a() {
            return Err(Error::NotTypeA);
        }
        Ok(p.render(basis))
    }
}

fn validate_cartan(cartan: &[Vec<i64>]) -> Result<()> {
    let n = cartan.len();
    if n == 0 {
        return Err(Error::InvalidCartan("empty matrix".into()));
    }
    for (i, row) in cartan.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidCartan("matrix is not square".into()));
        }
        for (j, &a) in row.iter().enumerate() {
            if i == j && a != 2 {
                return Err(Error::InvalidCartan(format!("diagonal entry {a} at {i}")));
            }
            if i != j && a > 0 {
                return Err(Error::InvalidCartan(format!(
                    "positive off-diagonal entry at ({i},{j})"
                )));
            }
            if i != j && (a == 0) != (cartan[j][i] == 0) {
                return Err(Error::InvalidCartan(format!(
                    "zero pattern not symmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

fn named_cartan(label: &str) -> Result<Vec<Vec<i64>>> {
    let unknown = || Error::UnknownType(label.to_string());
    let norm: String = label.trim().chars().filter(|c| *c != '_').collect();
    let mut chars = norm.chars();
    let letter = chars.next().ok_or_else(unknown)?.to_ascii_uppercase();
    let n: usize = chars.as_str().parse().map_err(|_| unknown())?;
    let chain = |n: usize| -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect()
    };
    let m = match (letter, n) {
        ('A', n) if n >= 1 => chain(n),
        ('B', n) if n >= 2 => {
            let mut m = chain(n);
            m[n - 1][n - 2] = -2;
            m
        }
        ('C', n) if n >= 2 => {
            let mut m = chain(n);
            m[n - 2][n - 1] = -2;
            m
        }
        ('D', n) if n >= 3 => {
            let mut m = chain(n);
            m[n - 1][n - 2] = 0;
            m[n - 2][n - 1] = 0;
            m[n - 1][n - 3] = -1;
            m[n - 3][n - 1] = -1;
            m
        }
        ('G', 2) => vec![vec![2, -1], vec![-3, 2]],
        ('F', 4) => vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -2, 0],
            vec![0, -1, 2, -1],
            vec![0, 0, -1, 2],
        ],
        _ => return Err(unknown()),
    };
    Ok(m)
}

pub(crate) fn is_negative(coords: &[i64]) -> bool {
    coords.iter().any(|&c| c < 0)
}

fn identity_matrix(n: usize) -> Vec<i64> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

fn mat_vec(m: &[i64], n: usize, v: &[i64]) -> Vec<i64> {
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum())
        .collect()
}

/// Parse a Cartan matrix file: either `{"cartan": [[..], ..]}` or a bare
/// type label such as `B3`.
pub fn load_cartan_text(text: &str) -> Result<RootSystem> {
    #[derive(serde::Deserialize)]
    struct CartanFile {
        cartan: Vec<Vec<i64>>,
    }
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let file: CartanFile =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        RootSystem::build(file.cartan)
    } else {
        RootSystem::named(trimmed.trim_matches('"'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(label: &str) -> RootSystem {
        RootSystem::named(label).unwrap()
    }

    #[test]
    fn positive_root_counts() {
        assert_eq!(rs("A1").positive_roots().len(), 1);
        let a2 = rs("A2");
        let coords: Vec<_> = a2
            .positive_roots()
            .iter()
            .map(|r| r.coords.clone())
            .collect();
        assert_eq!(coords, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(rs("B2").positive_roots().len(), 4);
        assert_eq!(rs("C3").positive_roots().len(), 9);
        assert_eq!(rs("A3").positive_roots().len(), 6);
        assert_eq!(rs("D4").positive_roots().len(), 12);
        assert_eq!(rs("G2").positive_roots().len(), 6);
        assert_eq!(rs("F4").positive_roots().len(), 24);
    }

    #[test]
    fn longest_element_length_is_number_of_positive_roots() {
        for label in ["A1", "A3", "B3", "C2", "D4", "G2", "F4"] {
            let r = rs(label);
            assert_eq!(
                r.longest_element().length(),
                r.positive_roots().len(),
                "{label}"
            );
        }
    }

    #[test]
    fn rejects_bad_cartan() {
        assert!(matches!(
            RootSystem::build(vec![vec![2, -1], vec![-1]]),
            Err(Error::InvalidCartan(_))
        ));
        assert!(matches!(
            RootSystem::build(vec![vec![2, 1], vec![1, 2]]),
            Err(Error::InvalidCartan(_))
        ));
        assert!(matches!(
            RootSystem::build(vec![vec![2, 0], vec![-1, 2]]),
            Err(Error::InvalidCartan(_))
        ));
        // affine A1
        assert_eq!(
            RootSystem::build_with_bound(vec![vec![2, -2], vec![-2, 2]], 500).unwrap_err(),
            Error::NonFiniteType { bound: 500 }
        );
        assert!(matches!(
            RootSystem::named("E6"),
            Err(Error::UnknownType(_))
        ));
        assert!(matches!(
            RootSystem::named("B1"),
            Err(Error::UnknownType(_))
        ));
    }

    #[test]
    fn simple_reflections() {
        let a2 = rs("A2");
        let r1 = a2.simple_reflection(0).unwrap();
        assert_eq!(r1.length(), 1);
        assert_eq!(r1.apply(&[1, 0]), vec![-1, 0]);
        assert_eq!(r1.apply(&[0, 1]), vec![1, 1]);
        assert!(a2.multiply(&r1, &r1).unwrap().is_identity());
        assert!(matches!(
            a2.simple_reflection(2),
            Err(Error::IndexOutOfRange { index: 2, rank: 2 })
        ));
    }

    #[test]
    fn mixed_systems_are_rejected() {
        let a2 = rs("A2");
        let b2 = rs("B2");
        let x = a2.simple_reflection(0).unwrap();
        let y = b2.simple_reflection(0).unwrap();
        assert_eq!(a2.multiply(&x, &y), Err(Error::MixedRootSystems));
    }

    #[test]
    fn length_properties() {
        let r = rs("B3");
        let w = r.from_word(&[0, 1, 2, 1]).unwrap();
        for i in 0..3 {
            let ws = r.multiply(&w, &r.simple_reflection(i).unwrap()).unwrap();
            assert_eq!(ws.length().abs_diff(w.length()), 1);
        }
        assert_eq!(r.inverse(&w).unwrap().length(), w.length());
        assert!(r
            .multiply(&w, &r.inverse(&w).unwrap())
            .unwrap()
            .is_identity());
    }

    #[test]
    fn pairing_with_itself_is_two() {
        for label in ["A3", "B2", "G2"] {
            let r = rs(label);
            for i in 0..r.rank() {
                assert_eq!(r.coeff_pairing(i, &r.simple_root(i).unwrap()).unwrap(), 2);
            }
        }
    }

    #[test]
    fn reduced_words_multiply_back() {
        let r = rs("G2");
        let w0 = r.longest_element();
        let word = r.reduced_word(&w0).unwrap();
        assert_eq!(word.len(), 6);
        assert_eq!(r.from_word(&word).unwrap(), w0);
        assert!(r.reduced_word(&r.identity()).unwrap().is_empty());
    }

    #[test]
    fn cartan_file_forms() {
        let r = load_cartan_text(r#"{"cartan": [[2,-1],[-1,2]]}"#).unwrap();
        assert_eq!(r.positive_roots().len(), 3);
        assert!(r.is_type_a());
        let r = load_cartan_text("B2\n").unwrap();
        assert_eq!(r.positive_roots().len(), 4);
        assert!(!r.is_type_a());
    }
}
