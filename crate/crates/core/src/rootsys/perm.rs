//! One-line permutations for type A, and element parsing/formatting.
//!
//! Convention: `α_i = y_(i+1) − y_i` and `w·y_i = y_(w(i))`, so right
//! multiplication by `r_i` swaps positions `i, i+1` of the one-line word.

use super::{mat_vec, RootSystem, WeylElement};
use crate::error::{Error, Result};

impl RootSystem {
    /// Convert a one-line permutation of `1..=n` (values one-based).
    pub fn perm_to_element(&self, oneline: &[usize]) -> Result<WeylElement> {
        let n = self.type_a_degree().ok_or(Error::NotTypeA)?;
        let bad = || Error::NotAPermutation {
            n,
            input: format!("{oneline:?}"),
        };
        if oneline.len() != n {
            return Err(bad());
        }
        let mut seen = vec![false; n + 1];
        for &x in oneline {
            if x == 0 || x > n || seen[x] {
                return Err(bad());
            }
            seen[x] = true;
        }
        let rank = n - 1;
        let mut m = vec![0i64; rank * rank];
        for j in 0..rank {
            // w·α_(j+1) = y_b − y_a
            let (a, b) = (oneline[j], oneline[j + 1]);
            let (lo, hi, sign) = if b > a { (a, b, 1) } else { (b, a, -1) };
            for i in (lo - 1)..(hi - 1) {
                m[i * rank + j] = sign;
            }
        }
        Ok(self.element(m))
    }

    /// One-line notation of a type-A element (values one-based).
    pub fn element_to_perm(&self, w: &WeylElement) -> Result<Vec<usize>> {
        let n = self.type_a_degree().ok_or(Error::NotTypeA)?;
        self.check_member(w)?;
        let rank = n - 1;
        let mut out = vec![0usize; n];
        // w·(y_k − y_1) = y_(w(k)) − y_(w(1)), with y_k − y_1 = α_1 + … + α_(k−1)
        for k in 2..=n {
            let mut v = vec![0i64; rank];
            v[..k - 1].iter_mut().for_each(|x| *x = 1);
            let img = mat_vec(&w.matrix, rank, &v);
            let y = |m: usize| -> i64 {
                let hi = if m <= rank { img[m - 1] } else { 0 };
                let lo = if m >= 2 { img[m - 2] } else { 0 };
                lo - hi
            };
            for m in 1..=n {
                match y(m) {
                    1 => out[k - 1] = m,
                    -1 => out[0] = m,
                    _ => {}
                }
            }
        }
        Ok(out)
    }

    /// Parse an element: `e`, a word such as `s1 s3 s2`, or for type A a
    /// one-line permutation (`2413`, or `10,2,...` for more than 9 letters).
    pub fn parse_element(&self, text: &str) -> Result<WeylElement> {
        let t = text.trim();
        if matches!(t, "" | "e" | "id" | "identity") {
            return Ok(self.identity());
        }
        if let Some(n) = self.type_a_degree() {
            if t.chars().all(|c| c.is_ascii_digit()) && n <= 9 {
                let perm: Vec<usize> = t.chars().map(|c| c as usize - '0' as usize).collect();
                return self.perm_to_element(&perm);
            }
            if t.contains(',')
                && t.split(',').all(|p| {
                    let p = p.trim();
                    !p.is_empty() && p.chars().all(|c| c.is_ascii_digit())
                })
            {
                let perm: Vec<usize> = t
                    .split(',')
                    .map(|p| p.trim().parse().map_err(|_| Error::Parse(p.to_string())))
                    .collect::<Result<_>>()?;
                return self.perm_to_element(&perm);
            }
        }
        let word = parse_word(t)?;
        self.from_word(&word)
    }

    /// One-line notation for type A, otherwise the greedy reduced word.
    pub fn format_element(&self, w: &WeylElement) -> String {
        if let Ok(perm) = self.element_to_perm(w) {
            return format_perm(&perm);
        }
        format_word(&self.reduced_word(w).unwrap_or_default())
    }
}

pub(crate) fn format_perm(perm: &[usize]) -> String {
    if perm.len() <= 9 {
        perm.iter().map(|x| x.to_string()).collect()
    } else {
        perm.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub(crate) fn format_word(word: &[usize]) -> String {
    if word.is_empty() {
        return "e".into();
    }
    word.iter()
        .map(|i| format!("s{}", i + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse `s1 s3 s2`, `s1s3s2` or `s1,s3,s2` into zero-based indices.
pub fn parse_word(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        if c.is_whitespace() || c == ',' || c == '.' {
            pos += 1;
            continue;
        }
        if c != 's' && c != 'r' {
            return Err(Error::Parse(format!("cannot parse element {text:?}")));
        }
        pos += 1;
        let start = pos;
        while pos < chars.len() && chars[pos].is_ascii_digit() {
            pos += 1;
        }
        let idx: usize = chars[start..pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| Error::Parse(format!("missing index in {text:?}")))?;
        if idx == 0 {
            return Err(Error::Parse("simple indices are one-based".into()));
        }
        out.push(idx - 1);
    }
    Ok(out)
}
