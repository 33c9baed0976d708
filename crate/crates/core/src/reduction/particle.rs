//! The particle automaton: arrows that move between walls and bounce off
//! them, defined on configurations with at most one particle.

use crate::alphabet::{Alphabet, Sym};
use crate::analysis::SoficConstraint;
use crate::ca::CellularAutomaton;
use crate::config::Configuration;
use crate::error::{Error, Result};

/// Empty cell.
pub const EMPTY: Sym = 0;
/// Wall.
pub const WALL: Sym = 1;
/// Fast particle moving left.
pub const FAST_LEFT: Sym = 2;
/// Fast particle moving right.
pub const FAST_RIGHT: Sym = 3;
/// Slow particle moving left.
pub const SLOW_LEFT: Sym = 4;
/// Slow particle moving right.
pub const SLOW_RIGHT: Sym = 5;

/// Symbol names, in index order: `!` is a wall, `l` and `r` are the slow
/// particles.
pub const NAMES: [&str; 6] = ["0", "!", "<", ">", "l", "r"];

/// The six-letter particle alphabet with its particle and background parts.
#[derive(Debug, Clone)]
pub struct ParticleAlphabet {
    pub alphabet: Alphabet,
    pub particles: [Sym; 4],
    pub background: [Sym; 2],
}

impl ParticleAlphabet {
    pub fn new() -> Self {
        ParticleAlphabet {
            alphabet: Alphabet::new(&NAMES).expect("fixed names"),
            particles: [FAST_LEFT, FAST_RIGHT, SLOW_LEFT, SLOW_RIGHT],
            background: [EMPTY, WALL],
        }
    }
}

impl Default for ParticleAlphabet {
    fn default() -> Self {
        Self::new()
    }
}

pub fn is_particle(s: Sym) -> bool {
    (FAST_LEFT..=SLOW_RIGHT).contains(&s)
}

/// Reverses the direction of every particle.
pub fn rho(s: Sym) -> Sym {
    match s {
        FAST_LEFT => FAST_RIGHT,
        FAST_RIGHT => FAST_LEFT,
        SLOW_LEFT => SLOW_RIGHT,
        SLOW_RIGHT => SLOW_LEFT,
        other => other,
    }
}

pub const RHO: [Sym; 6] = [EMPTY, WALL, FAST_RIGHT, FAST_LEFT, SLOW_RIGHT, SLOW_LEFT];

type Pattern = [Option<Sym>; 5];

/// Rules for right-moving particles; the left-moving ones are their
/// mirror images. First match wins.
fn right_rules() -> Vec<(Pattern, Sym)> {
    let (z, w, f, s) = (Some(EMPTY), Some(WALL), Some(FAST_RIGHT), Some(SLOW_RIGHT));
    vec![
        ([f, z, z, None, None], FAST_RIGHT),
        ([None, f, z, w, None], FAST_LEFT),
        ([None, None, f, z, None], EMPTY),
        ([None, z, f, w, None], EMPTY),
        ([None, w, f, w, None], FAST_RIGHT),
        ([None, None, z, f, w], FAST_LEFT),
        ([None, s, z, None, None], SLOW_RIGHT),
        ([None, None, s, z, None], EMPTY),
        ([None, None, s, w, None], SLOW_LEFT),
    ]
}

fn all_rules() -> Vec<(Pattern, Sym)> {
    let right = right_rules();
    let mirrored: Vec<(Pattern, Sym)> = right
        .iter()
        .map(|(p, out)| {
            let mut q = *p;
            q.reverse();
            (q.map(|c| c.map(rho)), rho(*out))
        })
        .collect();
    right.into_iter().chain(mirrored).collect()
}

fn matches(p: &Pattern, w: &[Sym]) -> bool {
    p.iter().zip(w).all(|(c, &s)| c.map_or(true, |c| c == s))
}

/// The particle automaton `S` (memory 2, anticipation 2). Its table is
/// total, but only configurations with at most one particle are meaningful.
pub fn build_particle_ca() -> CellularAutomaton {
    let rules = all_rules();
    CellularAutomaton::from_fn(ParticleAlphabet::new().alphabet, -2, 2, |w| {
        rules
            .iter()
            .find(|(p, _)| matches(p, w))
            .map_or(w[2], |&(_, out)| out)
    })
    .expect("6^5 table fits")
}

/// Constraint for the subshift with at most one particle.
pub fn at_most_one_particle() -> SoficConstraint {
    let marked: Vec<bool> = (0..6).map(is_particle).collect();
    SoficConstraint::at_most_one(6, &marked)
}

/// Number of particles in the finite part of `x`; errors if a periodic
/// background contains one (infinitely many particles).
pub fn particle_count(x: &Configuration, layer: impl Fn(Sym) -> Sym) -> Result<usize> {
    if x.left().iter().chain(x.right()).any(|&s| is_particle(layer(s))) {
        return Err(Error::InvalidConfiguration(
            "infinitely many particles".into(),
        ));
    }
    Ok(x.center().iter().filter(|&&s| is_particle(layer(s))).count())
}

/// Moves the single particle `p` sitting at offset 0 one step. `look(d)`
/// returns the background symbol at offset `d` (never called with 0).
/// Returns every `(offset, symbol)` in `-2..=2` where the rule places a
/// particle; on a line there is exactly one.
pub(crate) fn particle_step(s: &CellularAutomaton, p: Sym, look: impl Fn(i64) -> Sym) -> Vec<(i64, Sym)> {
    let window: Vec<Sym> = (-4..=4).map(|d| if d == 0 { p } else { look(d) }).collect();
    (-2..=2i64)
        .filter_map(|d| {
            let at = (d + 2) as usize;
            let out = s.local_unchecked(&window[at..at + 5]);
            is_particle(out).then_some((d, out))
        })
        .collect()
}
