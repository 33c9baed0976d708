use std::fmt;

use num_integer::Integer;

use crate::alphabet::{Alphabet, Sym};
use crate::error::{Error, Result};

/// An eventually periodic configuration `...LLL C RRR...`.
///
/// The center word occupies positions `start .. start + center.len()`.
/// The left period word ends at position `start - 1` and repeats to the
/// left; the right period word begins at `start + center.len()` and repeats
/// to the right. Construction normalizes to primitive periods and a
/// minimal center.
#[derive(Clone)]
pub struct Configuration {
    left: Vec<Sym>,
    center: Vec<Sym>,
    right: Vec<Sym>,
    start: i64,
}

impl Configuration {
    pub fn new(left: Vec<Sym>, center: Vec<Sym>, right: Vec<Sym>) -> Result<Self> {
        Self::with_start(left, center, right, 0)
    }

    pub fn with_start(left: Vec<Sym>, center: Vec<Sym>, right: Vec<Sym>, start: i64) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidConfiguration(
                "period words must be non-empty".into(),
            ));
        }
        let mut c = Configuration {
            left,
            center,
            right,
            start,
        };
        c.normalize();
        Ok(c)
    }

    /// The spatially periodic configuration `...www...` with `w[0]` at
    /// position 0.
    pub fn periodic(word: Vec<Sym>) -> Result<Self> {
        Self::with_start(word.clone(), Vec::new(), word, 0)
    }

    pub fn uniform(s: Sym) -> Self {
        Configuration {
            left: vec![s],
            center: Vec::new(),
            right: vec![s],
            start: 0,
        }
    }

    /// Build from a function that is periodic with period `lp` left of
    /// `lo` and period `rp` from `hi` onward.
    pub fn from_fn(lo: i64, hi: i64, lp: usize, rp: usize, mut f: impl FnMut(i64) -> Sym) -> Self {
        assert!(lp > 0 && rp > 0 && lo <= hi);
        let left = (lo - lp as i64..lo).map(&mut f).collect();
        let center = (lo..hi).map(&mut f).collect();
        let right = (hi..hi + rp as i64).map(&mut f).collect();
        let mut c = Configuration {
            left,
            center,
            right,
            start: lo,
        };
        c.normalize();
        c
    }

    /// Parse `LEFT|CENTER|RIGHT`, optionally followed by `@start`.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let (body, start) = match text.rsplit_once('@') {
            Some((b, s)) => (
                b,
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidConfiguration(format!("bad offset {s:?}")))?,
            ),
            None => (text, 0),
        };
        let parts: Vec<&str> = body.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfiguration(format!(
                "expected LEFT|CENTER|RIGHT, got {text:?}"
            )));
        }
        let left = alphabet.parse_word(parts[0])?;
        let center = alphabet.parse_word(parts[1])?;
        let right = alphabet.parse_word(parts[2])?;
        Self::with_start(left, center, right, start)
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        let mut s = format!(
            "{}|{}|{}",
            alphabet.format_word(&self.left),
            alphabet.format_word(&self.center),
            alphabet.format_word(&self.right)
        );
        if self.start != 0 {
            s.push_str(&format!("@{}", self.start));
        }
        s
    }

    pub fn left(&self) -> &[Sym] {
        &self.left
    }

    pub fn center(&self) -> &[Sym] {
        &self.center
    }

    pub fn right(&self) -> &[Sym] {
        &self.right
    }

    /// Position of the first center symbol.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the last center position.
    pub fn end(&self) -> i64 {
        self.start + self.center.len() as i64
    }

    pub fn get(&self, i: i64) -> Sym {
        let end = self.end();
        if i < self.start {
            let ll = self.left.len() as i64;
            self.left[(i - self.start).rem_euclid(ll) as usize]
        } else if i >= end {
            let rl = self.right.len() as i64;
            self.right[(i - end).rem_euclid(rl) as usize]
        } else {
            self.center[(i - self.start) as usize]
        }
    }

    /// Symbols at positions `lo..hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Sym> {
        (lo..hi).map(|i| self.get(i)).collect()
    }

    pub fn max_symbol(&self) -> Sym {
        self.left
            .iter()
            .chain(&self.center)
            .chain(&self.right)
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        if self.max_symbol() as usize >= alphabet.len() {
            return Err(Error::AlphabetMismatch(format!(
                "configuration uses symbol index {} but the alphabet has {} symbols",
                self.max_symbol(),
                alphabet.len()
            )));
        }
        Ok(())
    }

    /// `(sigma^k x)[i] = x[i + k]`.
    pub fn shift(&self, k: i64) -> Self {
        Configuration {
            left: self.left.clone(),
            center: self.center.clone(),
            right: self.right.clone(),
            start: self.start - k,
        }
        .normalized()
    }

    /// `(R x)[i] = x[-i]`.
    pub fn reflect(&self) -> Self {
        let mut left = self.right.clone();
        left.reverse();
        let mut center = self.center.clone();
        center.reverse();
        let mut right = self.left.clone();
        right.reverse();
        Configuration {
            left,
            center,
            right,
            start: 1 - self.end(),
        }
        .normalized()
    }

    pub fn map_symbols(&self, f: impl Fn(Sym) -> Sym) -> Self {
        Configuration {
            left: self.left.iter().map(|&s| f(s)).collect(),
            center: self.center.iter().map(|&s| f(s)).collect(),
            right: self.right.iter().map(|&s| f(s)).collect(),
            start: self.start,
        }
        .normalized()
    }

    /// Pointwise combination of two configurations.
    pub fn zip(&self, other: &Configuration, f: impl Fn(Sym, Sym) -> Sym) -> Self {
        let lo = self.start.min(other.start);
        let hi = self.end().max(other.end());
        let lp = self.left.len().lcm(&other.left.len());
        let rp = self.right.len().lcm(&other.right.len());
        Configuration::from_fn(lo, hi, lp, rp, |i| f(self.get(i), other.get(i)))
    }

    /// A window `lo..hi` outside of which both configurations are periodic
    /// with period dividing the returned `(lp, rp)`.
    pub(crate) fn common_frame(&self, other: &Configuration) -> (i64, i64, usize, usize) {
        let lp = self.left.len().lcm(&other.left.len());
        let rp = self.right.len().lcm(&other.right.len());
        (
            self.start.min(other.start),
            self.end().max(other.end()),
            lp,
            rp,
        )
    }

    /// Positions where the two configurations differ, restricted to one
    /// full period block on each side of the common frame.
    pub fn disagreement_bounds(&self, other: &Configuration) -> DisagreementBounds {
        let (lo, hi, lp, rp) = self.common_frame(other);
        let left_unbounded = (lo - lp as i64..lo).any(|i| self.get(i) != other.get(i));
        let right_unbounded = (hi..hi + rp as i64).any(|i| self.get(i) != other.get(i));
        let scan_lo = lo - lp as i64;
        let scan_hi = hi + rp as i64;
        let leftmost = (scan_lo..scan_hi).find(|&i| self.get(i) != other.get(i));
        let rightmost = (scan_lo..scan_hi).rev().find(|&i| self.get(i) != other.get(i));
        DisagreementBounds {
            leftmost: if left_unbounded { None } else { leftmost },
            rightmost: if right_unbounded { None } else { rightmost },
            left_unbounded,
            right_unbounded,
            identical: leftmost.is_none(),
        }
    }

    fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    fn normalize(&mut self) {
        primitive_root(&mut self.left, true);
        primitive_root(&mut self.right, false);
        // Absorb center symbols that continue the right background.
        while let Some(&last) = self.center.last() {
            let rl = self.right.len();
            if last != self.right[rl - 1] {
                break;
            }
            self.center.pop();
            self.right.rotate_right(1);
        }
        // Absorb center symbols that continue the left background.
        let mut drop = 0;
        while drop < self.center.len() && self.center[drop] == self.left[0] {
            self.left.rotate_left(1);
            drop += 1;
        }
        if drop > 0 {
            self.center.drain(..drop);
            self.start += drop as i64;
        }
        if self.center.is_empty() {
            self.recenter_periodic();
        }
    }

    /// For a purely periodic configuration, put the cut at position 0 so
    /// equal configurations have identical representations.
    fn recenter_periodic(&mut self) {
        if self.left.len() != self.right.len() {
            return;
        }
        let p = self.left.len();
        // Left background continued rightward from `start` reads left[k mod p].
        if (0..p).any(|k| self.left[k] != self.right[k]) {
            return;
        }
        let k = (-self.start).rem_euclid(p as i64) as usize;
        self.left.rotate_left(k);
        self.right.rotate_left(k);
        self.start = 0;
    }
}

/// Reduce a period word to its primitive root. A left word is anchored at
/// its end, a right word at its start; both are cyclic so any divisor works.
fn primitive_root(w: &mut Vec<Sym>, anchored_at_end: bool) {
    let n = w.len();
    for d in 1..n {
        if n % d == 0 && (0..n).all(|k| w[k] == w[(k + d) % n]) {
            if anchored_at_end {
                w.drain(..n - d);
            } else {
                w.truncate(d);
            }
            return;
        }
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        let (lo, hi, lp, rp) = self.common_frame(other);
        (lo - lp as i64..hi + rp as i64).all(|i| self.get(i) == other.get(i))
    }
}

impl Eq for Configuration {}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Configuration({:?}|{:?}|{:?} @{})",
            self.left, self.center, self.right, self.start
        )
    }
}

/// Extent of the set where two configurations differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisagreementBounds {
    pub leftmost: Option<i64>,
    pub rightmost: Option<i64>,
    pub left_unbounded: bool,
    pub right_unbounded: bool,
    pub identical: bool,
}
