//! Conveyor belts: two particle tracks glued into loops, delimited by
//! `+`/`-` marks, so a single-particle dynamics runs on a full shift.

use std::collections::HashSet;

use crate::alphabet::{Alphabet, Sym};
use crate::ca::CellularAutomaton;
use crate::config::Configuration;
use crate::error::{Error, Result};

use super::particle::{is_particle, particle_step, rho, EMPTY, NAMES, WALL};

/// Position of a column relative to the particle of its belt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Delta {
    /// Left of the particle.
    Plus,
    /// Holds the particle.
    Zero,
    /// Right of the particle.
    Minus,
}

impl Delta {
    fn glyph(self) -> char {
        match self {
            Delta::Plus => '+',
            Delta::Zero => '0',
            Delta::Minus => '-',
        }
    }

    /// Does a new belt start between a column marked `self` and one
    /// marked `next`?
    pub fn starts_belt(self, next: Delta) -> bool {
        matches!(self, Delta::Minus | Delta::Zero) && matches!(next, Delta::Plus | Delta::Zero)
    }
}

/// One column: top track, bottom track and its mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Column {
    pub top: Sym,
    pub bottom: Sym,
    pub delta: Delta,
}

/// The 24-letter belt alphabet: both tracks empty-or-wall with a `+` or
/// `-` mark, or exactly one particle with mark `0`.
#[derive(Debug, Clone)]
pub struct BeltAlphabet {
    alphabet: Alphabet,
    columns: Vec<Column>,
    /// `index[top][bottom][delta]`.
    index: [[[Option<Sym>; 3]; 6]; 6],
}

fn delta_slot(d: Delta) -> usize {
    match d {
        Delta::Plus => 0,
        Delta::Zero => 1,
        Delta::Minus => 2,
    }
}

impl BeltAlphabet {
    pub fn new() -> Self {
        let sigma = [EMPTY, WALL];
        let mut columns = Vec::new();
        for &t in &sigma {
            for &b in &sigma {
                for d in [Delta::Plus, Delta::Minus] {
                    columns.push(Column { top: t, bottom: b, delta: d });
                }
            }
        }
        for q in 2..6 {
            for &s in &sigma {
                columns.push(Column { top: q, bottom: s, delta: Delta::Zero });
            }
        }
        for &s in &sigma {
            for q in 2..6 {
                columns.push(Column { top: s, bottom: q, delta: Delta::Zero });
            }
        }
        let mut index = [[[None; 3]; 6]; 6];
        for (i, c) in columns.iter().enumerate() {
            index[c.top as usize][c.bottom as usize][delta_slot(c.delta)] = Some(i as Sym);
        }
        let names: Vec<String> = columns
            .iter()
            .map(|c| format!("{}{}{}", NAMES[c.top as usize], NAMES[c.bottom as usize], c.delta.glyph()))
            .collect();
        BeltAlphabet {
            alphabet: Alphabet::new(&names).expect("distinct names"),
            columns,
            index,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, s: Sym) -> Column {
        self.columns[s as usize]
    }

    /// `None` if the triple is not a belt letter.
    pub fn encode(&self, c: Column) -> Option<Sym> {
        *self.index.get(c.top as usize)?.get(c.bottom as usize)?.get(delta_slot(c.delta))?
    }
}

impl Default for BeltAlphabet {
    fn default() -> Self {
        Self::new()
    }
}

/// One belt of a finite word with the marks removed. `split` is the
/// number of `+` columns of a belt without a particle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Belt {
    pub top: Vec<Sym>,
    pub bottom: Vec<Sym>,
    pub split: usize,
}

impl Belt {
    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    /// Column and track (`true` = bottom) of the particle.
    pub fn particle(&self) -> Option<(usize, bool)> {
        (0..self.len()).find_map(|i| {
            if is_particle(self.top[i]) {
                Some((i, false))
            } else if is_particle(self.bottom[i]) {
                Some((i, true))
            } else {
                None
            }
        })
    }

    fn marks(&self) -> Vec<Delta> {
        let cut = self.particle().map(|(i, _)| i);
        (0..self.len())
            .map(|i| match cut {
                Some(k) if i < k => Delta::Plus,
                Some(k) if i == k => Delta::Zero,
                Some(_) => Delta::Minus,
                None if i < self.split => Delta::Plus,
                None => Delta::Minus,
            })
            .collect()
    }
}

/// Split a word over the belt alphabet into maximal blocks
/// `+…+ [particle] -…-`. The first and last block may be cut off by the
/// ends of the word.
pub fn decompose(ab: &BeltAlphabet, word: &[Sym]) -> Result<Vec<Belt>> {
    let mut belts: Vec<Belt> = Vec::new();
    let mut prev: Option<Delta> = None;
    for &s in word {
        if s as usize >= ab.len() {
            return Err(Error::AlphabetMismatch(format!("{s} is not a belt letter")));
        }
        let c = ab.column(s);
        if prev.map_or(true, |p| p.starts_belt(c.delta)) {
            belts.push(Belt {
                top: Vec::new(),
                bottom: Vec::new(),
                split: 0,
            });
        }
        let b = belts.last_mut().unwrap();
        b.top.push(c.top);
        b.bottom.push(c.bottom);
        if c.delta == Delta::Plus {
            b.split += 1;
        }
        prev = Some(c.delta);
    }
    Ok(belts)
}

/// Inverse of [`decompose`].
pub fn serialize(ab: &BeltAlphabet, belts: &[Belt]) -> Result<Vec<Sym>> {
    let mut out = Vec::new();
    for b in belts {
        for (i, d) in b.marks().into_iter().enumerate() {
            let col = Column {
                top: b.top[i],
                bottom: b.bottom[i],
                delta: d,
            };
            out.push(
                ab.encode(col)
                    .ok_or_else(|| Error::InvalidConfiguration("belt column is not a belt letter".into()))?,
            );
        }
    }
    Ok(out)
}

/// How the cells of one belt are laid out on the line the particle
/// automaton runs on. Top cells keep their column; the bottom track is
/// reversed and attached at the junctions.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Unfolding {
    /// Columns `lo..lo+len`; the line is periodic with period `2 len`.
    Finite { lo: i64, len: i64 },
    /// Columns `..hi`; the bottom track continues to the right of `hi`.
    LeftInfinite { hi: i64 },
    /// Columns `lo..`; the bottom track continues to the left of `lo`.
    RightInfinite { lo: i64 },
    /// A belt without ends; only the particle's own track is visited.
    Line { bottom: bool },
}

impl Unfolding {
    fn to_line(self, col: i64, bottom: bool) -> i64 {
        match self {
            Unfolding::Finite { lo, len } => {
                if bottom {
                    2 * len - 1 - (col - lo)
                } else {
                    col - lo
                }
            }
            Unfolding::LeftInfinite { hi } => {
                if bottom {
                    2 * hi - 1 - col
                } else {
                    col
                }
            }
            Unfolding::RightInfinite { lo } => {
                if bottom {
                    2 * lo - 1 - col
                } else {
                    col
                }
            }
            Unfolding::Line { bottom: b } => {
                if b {
                    -col
                } else {
                    col
                }
            }
        }
    }

    fn from_line(self, u: i64) -> (i64, bool) {
        match self {
            Unfolding::Finite { lo, len } => {
                let u = u.rem_euclid(2 * len);
                if u < len {
                    (lo + u, false)
                } else {
                    (lo + 2 * len - 1 - u, true)
                }
            }
            Unfolding::LeftInfinite { hi } => {
                if u < hi {
                    (u, false)
                } else {
                    (2 * hi - 1 - u, true)
                }
            }
            Unfolding::RightInfinite { lo } => {
                if u >= lo {
                    (u, false)
                } else {
                    (2 * lo - 1 - u, true)
                }
            }
            Unfolding::Line { bottom } => {
                if bottom {
                    (-u, true)
                } else {
                    (u, false)
                }
            }
        }
    }

    fn period(self) -> Option<i64> {
        match self {
            Unfolding::Finite { len, .. } => Some(2 * len),
            _ => None,
        }
    }
}

/// One step of the particle on a belt. `read(col, bottom)` gives the
/// track symbol of a column. Returns the particle's new column, track and
/// (track-level) symbol.
pub(crate) fn move_on_belt(
    s: &CellularAutomaton,
    unf: Unfolding,
    col: i64,
    bottom: bool,
    p: Sym,
    read: impl Fn(i64, bool) -> Sym,
) -> Result<(i64, bool, Sym)> {
    let u0 = unf.to_line(col, bottom);
    let on_line = if bottom { rho(p) } else { p };
    let period = unf.period();
    let look = |d: i64| -> Sym {
        // Another copy of the particle's own cell reads as vacated.
        if period.is_some_and(|n| d.rem_euclid(n) == 0) {
            return EMPTY;
        }
        let (c, b) = unf.from_line(u0 + d);
        let s = read(c, b);
        if b {
            rho(s)
        } else {
            s
        }
    };
    let mut landed: HashSet<(i64, bool, Sym)> = HashSet::new();
    for (d, out) in particle_step(s, on_line, look) {
        let (c, b) = unf.from_line(u0 + d);
        landed.insert((c, b, if b { rho(out) } else { out }));
    }
    if landed.len() != 1 {
        return Err(Error::InvalidConfiguration(format!(
            "particle step on a belt produced {} particles",
            landed.len()
        )));
    }
    Ok(landed.into_iter().next().unwrap())
}

/// The belt step on a single finite belt, viewed as a loop.
pub fn step_belt(s: &CellularAutomaton, belt: &Belt) -> Result<Belt> {
    let Some((col, bottom)) = belt.particle() else {
        return Ok(belt.clone());
    };
    let len = belt.len() as i64;
    let unf = Unfolding::Finite { lo: 0, len };
    let p = if bottom { belt.bottom[col] } else { belt.top[col] };
    let read = |c: i64, b: bool| if b { belt.bottom[c as usize] } else { belt.top[c as usize] };
    let (nc, nb, np) = move_on_belt(s, unf, col as i64, bottom, p, read)?;
    let mut out = belt.clone();
    if bottom {
        out.bottom[col] = EMPTY;
    } else {
        out.top[col] = EMPTY;
    }
    if nb {
        out.bottom[nc as usize] = np;
    } else {
        out.top[nc as usize] = np;
    }
    Ok(out)
}

/// The belt step on a finite word: every belt is treated as a closed loop,
/// including the possibly cut-off first and last ones.
pub fn step_belt_word(s: &CellularAutomaton, ab: &BeltAlphabet, word: &[Sym]) -> Result<Vec<Sym>> {
    let belts = decompose(ab, word)?;
    let stepped = belts.iter().map(|b| step_belt(s, b)).collect::<Result<Vec<_>>>()?;
    serialize(ab, &stepped)
}

/// The belt step on a configuration over `belt alphabet × A2`
/// (product index `gamma * k2 + v`). The lower layer is untouched.
pub(crate) fn step_belts(s: &CellularAutomaton, ab: &BeltAlphabet, k2: usize, x: &Configuration) -> Result<Configuration> {
    let k2s = k2 as Sym;
    let col_at = |i: i64| ab.column(x.get(i) / k2s);
    let delta = |i: i64| col_at(i).delta;
    let boundary = |j: i64| delta(j - 1).starts_belt(delta(j));
    let (start, end) = (x.start(), x.end());
    let (lp, rp) = (x.left().len() as i64, x.right().len() as i64);

    // Boundaries inside a periodic background repeat with its period; if
    // there are none, the outermost belt is infinite on that side.
    let left_anchor = (start - 2 * lp..start - lp).find(|&j| boundary(j));
    let right_anchor = (end + rp..end + 2 * rp).find(|&j| boundary(j));
    let r0 = left_anchor.map_or(start - 2 * lp - 3, |j| j - lp);
    let r1 = right_anchor.map_or(end + 2 * rp + 3, |j| j + rp);

    let mut cuts: Vec<i64> = (r0 + 1..r1).filter(|&j| boundary(j)).collect();
    cuts.insert(0, r0);
    cuts.push(r1);
    let mut out: Vec<Column> = (r0..r1).map(col_at).collect();
    let at = |i: i64| (i - r0) as usize;

    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let left_open = lo == r0 && left_anchor.is_none();
        let right_open = hi == r1 && right_anchor.is_none();
        let Some(pcol) = (lo..hi).find(|&i| delta(i) == Delta::Zero) else {
            continue;
        };
        let c = col_at(pcol);
        let bottom = is_particle(c.bottom);
        let unf = match (left_open, right_open) {
            (false, false) => Unfolding::Finite { lo, len: hi - lo },
            (true, false) => Unfolding::LeftInfinite { hi },
            (false, true) => Unfolding::RightInfinite { lo },
            (true, true) => Unfolding::Line { bottom },
        };
        let p = if bottom { c.bottom } else { c.top };
        let read = |i: i64, b: bool| {
            let c = col_at(i);
            if b {
                c.bottom
            } else {
                c.top
            }
        };
        let (nc, nb, np) = move_on_belt(s, unf, pcol, bottom, p, read)?;
        if nc < r0 || nc >= r1 {
            return Err(Error::InvalidConfiguration("particle left the computed frame".into()));
        }
        if bottom {
            out[at(pcol)].bottom = EMPTY;
        } else {
            out[at(pcol)].top = EMPTY;
        }
        if nb {
            out[at(nc)].bottom = np;
        } else {
            out[at(nc)].top = np;
        }
        for i in lo..hi {
            out[at(i)].delta = match i.cmp(&nc) {
                std::cmp::Ordering::Less => Delta::Plus,
                std::cmp::Ordering::Equal => Delta::Zero,
                std::cmp::Ordering::Greater => Delta::Minus,
            };
        }
    }

    let mut syms = Vec::with_capacity(out.len());
    for (i, c) in out.iter().enumerate() {
        let g = ab
            .encode(*c)
            .ok_or_else(|| Error::InvalidConfiguration("belt step produced an invalid column".into()))?;
        syms.push(g * k2s + x.get(r0 + i as i64) % k2s);
    }
    Ok(Configuration::from_fn(r0 + lp, r1 - rp, lp as usize, rp as usize, |i| {
        syms[at(i)]
    }))
}
