use std::fmt;
use std::sync::Arc;

use crate::alphabet::{checked_pow, Alphabet, Sym, WordOdometer};
use crate::config::Configuration;
use crate::error::{Error, Result};

/// Rule tables larger than this are not materialized.
pub const TABLE_CAP: u128 = 100_000_000;

/// Anything that acts on configurations over a fixed alphabet.
pub trait GlobalMap {
    fn alphabet(&self) -> &Alphabet;
    fn apply(&self, x: &Configuration) -> Result<Configuration>;

    fn orbit(&self, x: &Configuration, steps: usize) -> Result<Vec<Configuration>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(x.clone());
        for _ in 0..steps {
            let next = self.apply(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }
}

#[derive(Clone)]
enum Rule {
    /// Dense table indexed by the neighborhood read as a base-|A| number,
    /// leftmost cell most significant.
    Table(Arc<Vec<Sym>>),
    /// Lazy composition: stages are applied first to last.
    Chain(Arc<Vec<CellularAutomaton>>),
}

/// A one-dimensional cellular automaton with neighborhood `[m, a]`:
/// `F(x)[i] = f(x[i+m], ..., x[i+a])`.
#[derive(Clone)]
pub struct CellularAutomaton {
    alphabet: Alphabet,
    memory: i64,
    anticipation: i64,
    rule: Rule,
}

impl CellularAutomaton {
    pub fn from_table(alphabet: Alphabet, memory: i64, anticipation: i64, table: Vec<Sym>) -> Result<Self> {
        if memory > anticipation {
            return Err(Error::InvalidRule(format!(
                "memory {memory} exceeds anticipation {anticipation}"
            )));
        }
        let width = (anticipation - memory + 1) as usize;
        let expected = checked_pow(alphabet.len(), width)
            .filter(|&n| n <= TABLE_CAP)
            .ok_or_else(|| Error::cap("rule table", format!("{}^{width}", alphabet.len()), TABLE_CAP))?;
        if table.len() as u128 != expected {
            return Err(Error::InvalidRule(format!(
                "table has {} entries, expected {expected}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&s| s as usize >= alphabet.len()) {
            return Err(Error::InvalidRule(format!("table entry {bad} is not a symbol")));
        }
        Ok(CellularAutomaton {
            alphabet,
            memory,
            anticipation,
            rule: Rule::Table(Arc::new(table)),
        })
    }

    /// Tabulate a local rule given as a function of the neighborhood word.
    pub fn from_fn(alphabet: Alphabet, memory: i64, anticipation: i64, f: impl Fn(&[Sym]) -> Sym) -> Result<Self> {
        if memory > anticipation {
            return Err(Error::InvalidRule(format!(
                "memory {memory} exceeds anticipation {anticipation}"
            )));
        }
        let width = (anticipation - memory + 1) as usize;
        let n = checked_pow(alphabet.len(), width)
            .filter(|&n| n <= TABLE_CAP)
            .ok_or_else(|| Error::cap("rule table", format!("{}^{width}", alphabet.len()), TABLE_CAP))?;
        let mut table = Vec::with_capacity(n as usize);
        let mut od = WordOdometer::new(alphabet.len(), width);
        while let Some(w) = od.next_word() {
            table.push(f(w));
        }
        Self::from_table(alphabet, memory, anticipation, table)
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        Self::shift_map(alphabet, 0)
    }

    /// `sigma^k`, i.e. `F(x)[i] = x[i + k]`.
    pub fn shift_map(alphabet: Alphabet, k: i64) -> Self {
        let table = alphabet.symbols().collect();
        CellularAutomaton {
            alphabet,
            memory: k,
            anticipation: k,
            rule: Rule::Table(Arc::new(table)),
        }
    }

    /// Cellwise symbol permutation.
    pub fn symbol_map(alphabet: Alphabet, map: Vec<Sym>) -> Result<Self> {
        Self::from_table(alphabet, 0, 0, map)
    }

    pub fn memory(&self) -> i64 {
        self.memory
    }

    pub fn anticipation(&self) -> i64 {
        self.anticipation
    }

    pub fn width(&self) -> usize {
        (self.anticipation - self.memory + 1) as usize
    }

    /// How much `apply_word` shortens a word.
    pub fn shrink(&self) -> usize {
        self.width() - 1
    }

    pub fn alphabet_ref(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn table(&self) -> Option<&[Sym]> {
        match &self.rule {
            Rule::Table(t) => Some(t),
            Rule::Chain(_) => None,
        }
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.rule, Rule::Chain(_))
    }

    /// Evaluate the local rule on one neighborhood.
    pub fn local(&self, window: &[Sym]) -> Result<Sym> {
        if window.len() != self.width() {
            return Err(Error::WindowTooShort {
                need: self.width(),
                got: window.len(),
            });
        }
        Ok(self.local_unchecked(window))
    }

    pub(crate) fn local_unchecked(&self, window: &[Sym]) -> Sym {
        match &self.rule {
            Rule::Table(t) => {
                let k = self.alphabet.len();
                let mut code = 0usize;
                for &s in window {
                    code = code * k + s as usize;
                }
                t[code]
            }
            Rule::Chain(stages) => {
                let mut w = window.to_vec();
                for st in stages.iter() {
                    w = st.apply_word_unchecked(&w);
                }
                w[0]
            }
        }
    }

    /// The extended rule on finite words: the image of a word of length
    /// `L` has length `L - (a - m)`.
    pub fn apply_word(&self, word: &[Sym]) -> Result<Vec<Sym>> {
        if word.len() < self.width() {
            return Err(Error::WindowTooShort {
                need: self.width(),
                got: word.len(),
            });
        }
        if let Some(&bad) = word.iter().find(|&&s| s as usize >= self.alphabet.len()) {
            return Err(Error::AlphabetMismatch(format!(
                "symbol index {bad} not in alphabet of size {}",
                self.alphabet.len()
            )));
        }
        Ok(self.apply_word_unchecked(word))
    }

    pub(crate) fn apply_word_unchecked(&self, word: &[Sym]) -> Vec<Sym> {
        let w = self.width();
        if word.len() < w {
            return Vec::new();
        }
        match &self.rule {
            Rule::Table(t) => {
                let k = self.alphabet.len();
                let out_len = word.len() + 1 - w;
                let mut out = Vec::with_capacity(out_len);
                let top = k.pow(w as u32 - 1);
                let mut code = 0usize;
                for &s in &word[..w] {
                    code = code * k + s as usize;
                }
                out.push(t[code]);
                for j in 1..out_len {
                    code = (code - word[j - 1] as usize * top) * k + word[j + w - 1] as usize;
                    out.push(t[code]);
                }
                out
            }
            Rule::Chain(stages) => {
                let mut cur = word.to_vec();
                for st in stages.iter() {
                    cur = st.apply_word_unchecked(&cur);
                }
                cur
            }
        }
    }

    /// One step of the global map.
    pub fn step(&self, x: &Configuration) -> Result<Configuration> {
        x.check_alphabet(&self.alphabet)?;
        Ok(self.step_unchecked(x))
    }

    pub(crate) fn step_unchecked(&self, x: &Configuration) -> Configuration {
        let lo = x.start() - self.anticipation;
        let hi = x.end() - self.memory;
        let lp = x.left().len();
        let rp = x.right().len();
        // Read the whole frame once, then apply the extended rule.
        let src = x.window(lo - lp as i64 + self.memory, hi + rp as i64 + self.anticipation);
        let img = self.apply_word_unchecked(&src);
        let base = lo - lp as i64;
        Configuration::from_fn(lo, hi, lp, rp, |i| img[(i - base) as usize])
    }

    /// `F^n(x)`.
    pub fn iterate(&self, x: &Configuration, n: usize) -> Result<Configuration> {
        x.check_alphabet(&self.alphabet)?;
        let mut cur = x.clone();
        for _ in 0..n {
            cur = self.step_unchecked(&cur);
        }
        Ok(cur)
    }

    /// `self ∘ inner`: apply `inner` first. Falls back to a lazy chain when
    /// the composed table would exceed [`TABLE_CAP`].
    pub fn compose(&self, inner: &CellularAutomaton) -> Result<CellularAutomaton> {
        if self.alphabet != inner.alphabet {
            return Err(Error::AlphabetMismatch(
                "cannot compose automata over different alphabets".into(),
            ));
        }
        let memory = self.memory + inner.memory;
        let anticipation = self.anticipation + inner.anticipation;
        let width = (anticipation - memory + 1) as usize;
        let fits = checked_pow(self.alphabet.len(), width).is_some_and(|n| n <= TABLE_CAP);
        if fits {
            return Self::from_fn(self.alphabet.clone(), memory, anticipation, |w| {
                let mid = inner.apply_word_unchecked(w);
                self.local_unchecked(&mid)
            });
        }
        let mut stages = Vec::new();
        for f in [inner, self] {
            match &f.rule {
                Rule::Chain(s) => stages.extend(s.iter().cloned()),
                Rule::Table(_) => stages.push(f.clone()),
            }
        }
        Ok(CellularAutomaton {
            alphabet: self.alphabet.clone(),
            memory,
            anticipation,
            rule: Rule::Chain(Arc::new(stages)),
        })
    }

    /// `F^n` as a single automaton.
    pub fn power(&self, n: usize) -> Result<CellularAutomaton> {
        let mut acc = CellularAutomaton::identity(self.alphabet.clone());
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Cellwise product `F1 × F2` over the product alphabet.
    pub fn product(&self, other: &CellularAutomaton) -> Result<CellularAutomaton> {
        let alphabet = self.alphabet.product(&other.alphabet)?;
        let memory = self.memory.min(other.memory);
        let anticipation = self.anticipation.max(other.anticipation);
        let k2 = other.alphabet.len() as Sym;
        let (o1, o2) = (
            (self.memory - memory) as usize,
            (other.memory - memory) as usize,
        );
        let (w1, w2) = (self.width(), other.width());
        Self::from_fn(alphabet, memory, anticipation, |w| {
            let a: Vec<Sym> = w[o1..o1 + w1].iter().map(|&s| s / k2).collect();
            let b: Vec<Sym> = w[o2..o2 + w2].iter().map(|&s| s % k2).collect();
            self.local_unchecked(&a) * k2 + other.local_unchecked(&b)
        })
    }

    /// Same global map on a larger neighborhood.
    pub fn widen(&self, memory: i64, anticipation: i64) -> Result<CellularAutomaton> {
        if memory > self.memory || anticipation < self.anticipation {
            return Err(Error::arg(format!(
                "window [{memory},{anticipation}] does not contain [{},{}]",
                self.memory, self.anticipation
            )));
        }
        let off = (self.memory - memory) as usize;
        let w = self.width();
        Self::from_fn(self.alphabet.clone(), memory, anticipation, |win| {
            self.local_unchecked(&win[off..off + w])
        })
    }

    /// Drop end coordinates of the neighborhood that never influence the
    /// output. The result defines the same global map.
    pub fn trimmed(&self) -> Result<CellularAutomaton> {
        let table = match &self.rule {
            Rule::Table(t) => t.clone(),
            Rule::Chain(_) => return Ok(self.clone()),
        };
        let k = self.alphabet.len();
        let width = self.width();
        let influential = |pos: usize| -> bool {
            // Compare entries that differ only at `pos`.
            let stride = k.pow((width - 1 - pos) as u32);
            (0..table.len()).any(|code| {
                let digit = (code / stride) % k;
                digit > 0 && table[code] != table[code - digit * stride]
            })
        };
        let mut lo = 0;
        while lo + 1 < width && !influential(lo) {
            lo += 1;
        }
        let mut hi = width - 1;
        while hi > lo && !influential(hi) {
            hi -= 1;
        }
        if lo == 0 && hi == width - 1 {
            return Ok(self.clone());
        }
        let memory = self.memory + lo as i64;
        let anticipation = self.memory + hi as i64;
        let full = self.clone();
        Self::from_fn(self.alphabet.clone(), memory, anticipation, |w| {
            let mut padded = vec![0; width];
            padded[lo..=hi].copy_from_slice(w);
            full.local_unchecked(&padded)
        })
    }

    /// The conjugate `R F R` by the reflection `x ↦ (i ↦ x[-i])`.
    pub fn mirror(&self) -> Result<CellularAutomaton> {
        let me = self.clone();
        Self::from_fn(self.alphabet.clone(), -self.anticipation, -self.memory, |w| {
            let r: Vec<Sym> = w.iter().rev().copied().collect();
            me.local_unchecked(&r)
        })
    }

    /// The conjugate `π F π⁻¹` by a cellwise symbol bijection `π`.
    pub fn conjugate_by(&self, perm: &[Sym]) -> Result<CellularAutomaton> {
        let mut inv = vec![0 as Sym; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inv[p as usize] = i as Sym;
        }
        let me = self.clone();
        Self::from_fn(self.alphabet.clone(), self.memory, self.anticipation, |w| {
            let pre: Vec<Sym> = w.iter().map(|&s| inv[s as usize]).collect();
            perm[me.local_unchecked(&pre) as usize]
        })
    }

    /// True if both automata induce the same global map.
    pub fn same_map(&self, other: &CellularAutomaton) -> Result<bool> {
        if self.alphabet != other.alphabet {
            return Ok(false);
        }
        let memory = self.memory.min(other.memory);
        let anticipation = self.anticipation.max(other.anticipation);
        let width = (anticipation - memory + 1) as usize;
        checked_pow(self.alphabet.len(), width)
            .filter(|&n| n <= TABLE_CAP)
            .ok_or_else(|| Error::cap("map comparison", format!("{}^{width}", self.alphabet.len()), TABLE_CAP))?;
        let (o1, o2) = (
            (self.memory - memory) as usize,
            (other.memory - memory) as usize,
        );
        let mut od = WordOdometer::new(self.alphabet.len(), width);
        while let Some(w) = od.next_word() {
            if self.local_unchecked(&w[o1..o1 + self.width()])
                != other.local_unchecked(&w[o2..o2 + other.width()])
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Materialize a lazy automaton as a table.
    pub fn tabulated(&self) -> Result<CellularAutomaton> {
        match self.rule {
            Rule::Table(_) => Ok(self.clone()),
            Rule::Chain(_) => {
                let me = self.clone();
                Self::from_fn(self.alphabet.clone(), self.memory, self.anticipation, |w| {
                    me.local_unchecked(w)
                })
            }
        }
    }
}

impl GlobalMap for CellularAutomaton {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn apply(&self, x: &Configuration) -> Result<Configuration> {
        self.step(x)
    }
}

impl fmt::Debug for CellularAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CellularAutomaton(|A|={}, m={}, a={}, {})",
            self.alphabet.len(),
            self.memory,
            self.anticipation,
            if self.is_lazy() { "lazy" } else { "table" }
        )
    }
}
