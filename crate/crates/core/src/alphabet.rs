use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a symbol inside its alphabet.
pub type Sym = u16;

/// Largest alphabet we are willing to index with [`Sym`].
pub const MAX_ALPHABET: usize = u16::MAX as usize;

/// A finite ordered alphabet. Symbols are referred to by their index.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Arc<Vec<String>>,
    index: Arc<HashMap<String, Sym>>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        if names.len() > MAX_ALPHABET {
            return Err(Error::InvalidAlphabet(format!(
                "{} symbols exceeds the limit of {MAX_ALPHABET}",
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        let mut owned = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref();
            if n.is_empty() || n.chars().any(|c| c.is_whitespace() || c == '|') {
                return Err(Error::InvalidAlphabet(format!("bad symbol name {n:?}")));
            }
            if index.insert(n.to_string(), i as Sym).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {n:?}")));
            }
            owned.push(n.to_string());
        }
        Ok(Alphabet {
            names: Arc::new(owned),
            index: Arc::new(index),
        })
    }

    /// Alphabet `{0, 1, ..., n-1}` named by decimal digits.
    pub fn numeric(n: usize) -> Result<Self> {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::new(&names)
    }

    /// Cartesian product; the pair `(a, b)` gets index `a * |other| + b`.
    pub fn product(&self, other: &Alphabet) -> Result<Self> {
        let total = self.len().checked_mul(other.len()).unwrap_or(usize::MAX);
        if total > MAX_ALPHABET {
            return Err(Error::InvalidAlphabet(format!(
                "product alphabet has {total} symbols"
            )));
        }
        let mut names = Vec::with_capacity(total);
        for a in self.names.iter() {
            for b in other.names.iter() {
                names.push(format!("({a},{b})"));
            }
        }
        Self::new(&names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn sym(&self, name: &str) -> Result<Sym> {
        self.lookup(name)
            .ok_or_else(|| Error::AlphabetMismatch(format!("unknown symbol {name:?}")))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> {
        (0..self.len()).map(|i| i as Sym)
    }

    /// True when every symbol name is a single character.
    pub fn single_char(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Parse a word: whitespace-separated names, or one character per
    /// symbol when the input has no whitespace and the alphabet allows it.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Sym>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        if text.contains(char::is_whitespace) {
            return text.split_whitespace().map(|t| self.sym(t)).collect();
        }
        if let Some(s) = self.lookup(text) {
            return Ok(vec![s]);
        }
        if self.single_char() {
            return text
                .chars()
                .map(|c| self.sym(c.encode_utf8(&mut [0u8; 4])))
                .collect();
        }
        Err(Error::AlphabetMismatch(format!(
            "cannot split {text:?} into symbols; separate them with spaces"
        )))
    }

    pub fn format_word(&self, word: &[Sym]) -> String {
        let sep = if self.single_char() { "" } else { " " };
        word.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet{:?}", self.names)
    }
}

/// Enumerates all words of a fixed length over `k` symbols in
/// lexicographic order, first symbol most significant.
pub(crate) struct WordOdometer {
    k: Sym,
    word: Vec<Sym>,
    started: bool,
    done: bool,
}

impl WordOdometer {
    pub(crate) fn new(k: usize, len: usize) -> Self {
        WordOdometer {
            k: k as Sym,
            word: vec![0; len],
            started: false,
            done: k == 0 && len > 0,
        }
    }

    /// Advance to the next word; returns `None` after the last one.
    pub(crate) fn next_word(&mut self) -> Option<&[Sym]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.word);
        }
        for i in (0..self.word.len()).rev() {
            if self.word[i] + 1 < self.k {
                self.word[i] += 1;
                return Some(&self.word);
            }
            self.word[i] = 0;
        }
        self.done = true;
        None
    }
}

/// `base^exp` as u128, or `None` on overflow.
pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    let mut r: u128 = 1;
    for _ in 0..exp {
        r = r.checked_mul(base as u128)?;
    }
    Some(r)
}
