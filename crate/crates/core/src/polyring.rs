//! Sparse integer polynomials in the simple-root variables.
//!
//! A [`Polynomial`] is a map from dense exponent vectors to nonzero
//! arbitrary-precision integer coefficients. The variables are the simple
//! roots `a1..aN`; for type A the `y1..y(N+1)` coordinates are available as a
//! display and input convention with `a_i = y_(i+1) - y_i`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rootsys::WeylElement;

pub type Exponent = SmallVec<[u16; 8]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, BigInt>,
}

/// A homogeneous degree-one form, usually a root image `w·β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    pub coords: Vec<i64>,
}

/// Variable convention used for text rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Alpha,
    Y,
}

impl LinearForm {
    pub fn new(coords: Vec<i64>) -> Self {
        LinearForm { coords }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let n = self.coords.len();
        let mut p = Polynomial::zero(n);
        for (i, &c) in self.coords.iter().enumerate() {
            if c != 0 {
                let mut e = Exponent::from_elem(0, n);
                e[i] = 1;
                p.add_term(e, BigInt::from(c));
            }
        }
        p
    }
}

impl Neg for LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm::new(self.coords.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_polynomial())
    }
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponent::from_elem(0, nvars), c.into());
        p
    }

    /// The simple-root variable `a_(index+1)`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        let mut e = Exponent::from_elem(0, nvars);
        e[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, BigInt::one());
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u16>, BigInt)>,
    {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(Error::RankMismatch(nvars, exp.len()));
            }
            p.add_term(Exponent::from_vec(exp), c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    /// The value if the polynomial is a constant (including zero).
    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Total degree of the highest term, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(total_degree).max()
    }

    /// `Some(d)` if every term has total degree `d`; zero is homogeneous of
    /// every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(total_degree);
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|e| total_degree(e) == d)
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_rank(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::RankMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_rank(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Substitute each variable `x_j` by `images[j]` and expand.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::RankMismatch(self.nvars, images.len()));
        }
        let target = images.first().map_or(0, |p| p.nvars);
        if images.iter().any(|p| p.nvars != target) {
            return Err(Error::Parse("substitution images of mixed rank".into()));
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while powers[j].len() <= k {
                    let next = &powers[j][powers[j].len() - 1] * &images[j];
                    powers[j].push(next);
                }
                term = &term * &powers[j][k];
            }
            out += &term;
        }
        Ok(out)
    }

    /// Linear change of variables `x_j ↦ Σ_i images[j]_i x_i`.
    pub fn substitute_linear(&self, images: &[LinearForm]) -> Polynomial {
        let polys: Vec<Polynomial> = images.iter().map(LinearForm::to_polynomial).collect();
        self.substitute(&polys)
            .expect("linear substitution with matching rank")
    }

    /// Exact quotient by a nonzero linear form.
    ///
    /// Division runs in the lex order that makes the first variable of `f`
    /// with a nonzero coefficient the leading one; any leading term of the
    /// remainder that is not a multiple of that variable's term proves `f`
    /// does not divide `self`.
    pub fn divide_exact(&self, f: &LinearForm) -> Result<Polynomial> {
        if f.rank() != self.nvars {
            return Err(Error::RankMismatch(self.nvars, f.rank()));
        }
        let Some(lead) = f.coords.iter().position(|&c| c != 0) else {
            return Err(Error::NotDivisible {
                divisor: "0".into(),
            });
        };
        if self.is_zero() {
            return Ok(Polynomial::zero(self.nvars));
        }
        let n = self.nvars;
        // Permuted exponent: lead variable first, others in original order.
        let to_key = |e: &Exponent| -> Exponent {
            let mut k = Exponent::with_capacity(n);
            k.push(e[lead]);
            k.extend(
                e.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != lead)
                    .map(|(_, &x)| x),
            );
            k
        };
        let from_key = |k: &Exponent| -> Exponent {
            let mut e = Exponent::with_capacity(n);
            let mut rest = k[1..].iter();
            for i in 0..n {
                e.push(if i == lead {
                    k[0]
                } else {
                    *rest.next().unwrap()
                });
            }
            e
        };
        let slot = |i: usize| {
            if i == lead {
                0
            } else if i < lead {
                i + 1
            } else {
                i
            }
        };

        let lead_coeff = BigInt::from(f.coords[lead]);
        let mut rem: BTreeMap<Exponent, BigInt> = self
            .terms
            .iter()
            .map(|(e, c)| (to_key(e), c.clone()))
            .collect();
        let mut quot = Polynomial::zero(n);
        while let Some((key, c)) = rem.pop_last() {
            if key[0] == 0 || !(&c % &lead_coeff).is_zero() {
                return Err(Error::NotDivisible {
                    divisor: f.to_string(),
                });
            }
            let q = &c / &lead_coeff;
            let mut qkey = key.clone();
            qkey[0] -= 1;
            for (i, &fc) in f.coords.iter().enumerate() {
                if fc == 0 || i == lead {
                    continue;
                }
                let mut k = qkey.clone();
                k[slot(i)] += 1;
                let entry = rem.entry(k.clone()).or_insert_with(BigInt::zero);
                *entry -= &q * fc;
                if entry.is_zero() {
                    rem.remove(&k);
                }
            }
            quot.add_term(from_key(&qkey), q);
        }
        Ok(quot)
    }

    pub fn is_divisible(&self, f: &LinearForm) -> bool {
        if f.is_zero() {
            return self.is_zero();
        }
        self.divide_exact(f).is_ok()
    }

    /// Render in the simple-root variables `a1..aN`.
    pub fn render_alpha(&self) -> String {
        let mut terms: Vec<(&Exponent, &BigInt)> = self.terms.iter().collect();
        terms
            .sort_by(|(a, _), (b, _)| total_degree(b).cmp(&total_degree(a)).then_with(|| b.cmp(a)));
        render_terms(&terms, "a")
    }

    /// Render in type-A coordinates `y1..y(N+1)`, using `a_i = y_(i+1) - y_i`.
    pub fn render_y(&self) -> String {
        let y = self.to_y_coordinates();
        let mut terms: Vec<(&Exponent, &BigInt)> = y.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            total_degree(b)
                .cmp(&total_degree(a))
                .then_with(|| cmp_reversed(b, a))
        });
        render_terms(&terms, "y")
    }

    pub fn render(&self, basis: Basis) -> String {
        match basis {
            Basis::Alpha => self.render_alpha(),
            Basis::Y => self.render_y(),
        }
    }

    /// Expand into `nvars + 1` y-variables.
    pub fn to_y_coordinates(&self) -> Polynomial {
        let ny = self.nvars + 1;
        let images: Vec<Polynomial> = (0..self.nvars)
            .map(|i| &Polynomial::var(ny, i + 1) - &Polynomial::var(ny, i))
            .collect();
        if self.nvars == 0 {
            return Polynomial {
                nvars: 1,
                terms: self
                    .terms
                    .values()
                    .map(|c| (Exponent::from_elem(0, 1), c.clone()))
                    .collect(),
            };
        }
        self.substitute(&images).expect("rank matches")
    }

    /// Inverse of [`Self::to_y_coordinates`] on the subring generated by the
    /// differences `y_j - y_i`; fails on anything outside it.
    pub fn from_y_coordinates(y: &Polynomial) -> Result<Polynomial> {
        if y.nvars == 0 {
            return Err(Error::Parse(
                "y-coordinates need at least one variable".into(),
            ));
        }
        let n = y.nvars - 1;
        // y_1 ↦ 0, y_k ↦ a_1 + ... + a_(k-1)
        let images: Vec<Polynomial> = (0..y.nvars)
            .map(|k| {
                let mut p = Polynomial::zero(n);
                for i in 0..k {
                    p += &Polynomial::var(n, i);
                }
                p
            })
            .collect();
        let p = y.substitute(&images)?;
        if &p.to_y_coordinates() != y {
            return Err(Error::Parse(
                "polynomial in y is not expressible in the simple roots".into(),
            ));
        }
        Ok(p)
    }

    /// Parse text in either variable family. `nvars` is the number of simple
    /// roots; `y` variables range over `1..=nvars+1`.
    pub fn parse(text: &str, nvars: usize) -> Result<Polynomial> {
        let (letter, raw) = parse_raw(text)?;
        match letter {
            None | Some('a') => {
                let mut p = Polynomial::zero(nvars);
                for (vars, c) in raw {
                    let mut e = Exponent::from_elem(0, nvars);
                    for (idx, k) in vars {
                        if idx == 0 || idx > nvars {
                            return Err(Error::Parse(format!("variable a{idx} out of range")));
                        }
                        e[idx - 1] += k;
                    }
                    p.add_term(e, c);
                }
                Ok(p)
            }
            Some(_) => {
                let ny = nvars + 1;
                let mut y = Polynomial::zero(ny);
                for (vars, c) in raw {
                    let mut e = Exponent::from_elem(0, ny);
                    for (idx, k) in vars {
                        if idx == 0 || idx > ny {
                            return Err(Error::Parse(format!("variable y{idx} out of range")));
                        }
                        e[idx - 1] += k;
                    }
                    y.add_term(e, c);
                }
                Polynomial::from_y_coordinates(&y)
            }
        }
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(e, c)| TermJson {
                coeff: c
                    .to_string()
                    .parse()
                    .expect("integer is a valid JSON number"),
                exp: e.to_vec(),
            })
            .collect()
    }

    pub fn from_json(nvars: usize, terms: &[TermJson]) -> Result<Polynomial> {
        let mut p = Polynomial::zero(nvars);
        for t in terms {
            if t.exp.len() != nvars {
                return Err(Error::RankMismatch(nvars, t.exp.len()));
            }
            let c: BigInt = t
                .coeff
                .to_string()
                .parse()
                .map_err(|_| Error::Parse(format!("non-integer coefficient {}", t.coeff)))?;
            p.add_term(Exponent::from_slice(&t.exp), c);
        }
        Ok(p)
    }
}

/// One term of the JSON polynomial form `{"coeff": int, "exp": [ints]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: serde_json::Number,
    pub exp: Vec<u16>,
}

/// Apply a Weyl group element to a polynomial by linear substitution.
pub fn act(w: &WeylElement, p: &Polynomial) -> Polynomial {
    if p.is_zero() || p.constant_value().is_some() {
        return p.clone();
    }
    let images: Vec<LinearForm> = (0..w.rank()).map(|j| w.column(j)).collect();
    p.substitute_linear(&images)
}

fn total_degree(e: &Exponent) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

fn cmp_reversed(a: &Exponent, b: &Exponent) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

fn render_terms(terms: &[(&Exponent, &BigInt)], letter: &str) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        let is_const = e.iter().all(|&x| x == 0);
        if !abs.is_one() || is_const {
            factors.push(abs.to_string());
        }
        for (i, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => factors.push(format!("{letter}{}", i + 1)),
                _ => factors.push(format!("{letter}{}^{x}", i + 1)),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

type RawTerm = (Vec<(usize, u16)>, BigInt);

fn parse_raw(text: &str) -> Result<(Option<char>, Vec<RawTerm>)> {
    let s: Vec<char> = text
        .chars()
        .map(|c| if c == '−' { '-' } else { c })
        .filter(|c| !c.is_whitespace())
        .collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut pos = 0;
    let mut letter: Option<char> = None;
    let mut out = Vec::new();
    let read_int = |pos: &mut usize| -> Option<String> {
        let start = *pos;
        while *pos < s.len() && s[*pos].is_ascii_digit() {
            *pos += 1;
        }
        (*pos > start).then(|| s[start..*pos].iter().collect())
    };
    let mut first = true;
    while pos < s.len() {
        let mut sign = BigInt::one();
        match s[pos] {
            '+' => pos += 1,
            '-' => {
                sign = -sign;
                pos += 1
            }
            _ if first => {}
            c => return Err(Error::Parse(format!("expected '+' or '-' before {c:?}"))),
        }
        first = false;
        let mut coeff = sign;
        let mut vars = Vec::new();
        let mut nfactors = 0;
        loop {
            if pos < s.len() && s[pos] == '*' && nfactors > 0 {
                pos += 1;
            }
            if pos >= s.len() {
                break;
            }
            let c = s[pos];
            if c.is_ascii_digit() {
                let digits = read_int(&mut pos).unwrap();
                coeff *= digits.parse::<BigInt>().expect("digits");
            } else if c == 'a' || c == 'y' {
                match letter {
                    Some(l) if l != c => {
                        return Err(Error::Parse("mixed a- and y-variables".into()))
                    }
                    _ => letter = Some(c),
                }
                pos += 1;
                let idx = read_int(&mut pos)
                    .ok_or_else(|| Error::Parse(format!("missing index after {c}")))?;
                let idx: usize = idx
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index {idx}")))?;
                let mut k = 1u16;
                if pos < s.len() && s[pos] == '^' {
                    pos += 1;
                    let p = read_int(&mut pos)
                        .ok_or_else(|| Error::Parse("missing exponent".into()))?;
                    k = p
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent {p}")))?;
                }
                vars.push((idx, k));
            } else if c == '+' || c == '-' {
                break;
            } else {
                return Err(Error::Parse(format!("unexpected character {c:?}")));
            }
            nfactors += 1;
        }
        if nfactors == 0 {
            return Err(Error::Parse("empty term".into()));
        }
        out.push((vars, coeff));
    }
    Ok((letter, out))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_alpha())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self.render_alpha())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial rank mismatch")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial rank mismatch")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial rank mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        assert_eq!(self.nvars, rhs.nvars, "polynomial rank mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        assert_eq!(self.nvars, rhs.nvars, "polynomial rank mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c);
        }
    }
}
