//! The front-speed experiment: a fast particle over an immortal inner
//! configuration against the same configuration without it.

use crate::alphabet::Sym;
use crate::analysis::{front_speed, Direction, FrontTrace};
use crate::ca::CellularAutomaton;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::tiles::search_local_immortality;

use super::particle::{EMPTY, FAST_RIGHT};
use super::{Column, Delta, ReductionBundle, Target};

/// Half-width of the bands around 2 and 5/3.
pub const SPEED_TOLERANCE: f64 = 0.1;

const WITNESS_PERIOD_CAP: usize = 4;
const WITNESS_TIME_CAP: usize = 64;
const C_SEARCH_MAX: usize = 6;
const C_NODE_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedClass {
    /// Slope at least `2 - tol`.
    Fast,
    /// Slope at most `5/3 + tol`.
    Slow,
    Inconclusive,
}

impl SpeedClass {
    pub fn from_slope(slope: f64) -> Self {
        if slope >= 2.0 - SPEED_TOLERANCE {
            SpeedClass::Fast
        } else if slope <= 5.0 / 3.0 + SPEED_TOLERANCE {
            SpeedClass::Slow
        } else {
            SpeedClass::Inconclusive
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpeedClass::Fast => "fast",
            SpeedClass::Slow => "slow",
            SpeedClass::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpeedReport {
    pub n: usize,
    pub trace: FrontTrace,
    pub slope: f64,
    pub class: SpeedClass,
    /// Inner configuration shared by both runs.
    pub lower: Configuration,
    /// Whether `lower` is a (1,5)-witness found by search.
    pub witness_found: bool,
    /// Smallest `N` with `C(2N)` empty, when no witness was found and the
    /// bounded search settled it.
    pub smallest_empty_c: Option<usize>,
}

/// Is there a configuration whose inner orbit satisfies
/// `G^(5i+j)(x)[i] ∈ B` for `0 <= i <= n`, `0 <= j <= 5`? Depth-first over
/// `x[0..=6n+5]`, keeping the antidiagonal `G^t(x)[k-t]`. `None` if the
/// node cap is hit.
fn c_nonempty(g: &CellularAutomaton, b: &[bool], n: usize, cap: u64) -> Option<bool> {
    let k = g.alphabet_ref().len() as Sym;
    let len = 6 * n + 6;
    let depth_t = 5 * n + 5;
    let mut nodes = 0u64;
    // diags[k][t] = G^t(x)[k - t].
    let mut diags: Vec<Vec<Sym>> = Vec::with_capacity(len);
    let mut choice: Vec<Sym> = Vec::with_capacity(len);

    fn ok(b: &[bool], kpos: usize, t: usize, v: Sym, n: usize) -> bool {
        let i = kpos - t;
        !(i <= n && 5 * i <= t && t <= 5 * i + 5) || b[v as usize]
    }

    let extend = |diags: &mut Vec<Vec<Sym>>, s: Sym| -> bool {
        let kpos = diags.len();
        let tmax = kpos.min(depth_t);
        let mut d = Vec::with_capacity(tmax + 1);
        d.push(s);
        if !ok(b, kpos, 0, s, n) {
            return false;
        }
        for t in 1..=tmax {
            let v = g.local_unchecked(&[diags[kpos - 1][t - 1], d[t - 1]]);
            if !ok(b, kpos, t, v, n) {
                return false;
            }
            d.push(v);
        }
        diags.push(d);
        true
    };

    choice.push(0);
    loop {
        nodes += 1;
        if nodes > cap {
            return None;
        }
        let s = *choice.last().unwrap();
        if s >= k {
            choice.pop();
            if choice.is_empty() {
                return Some(false);
            }
            diags.pop();
            *choice.last_mut().unwrap() += 1;
            continue;
        }
        if extend(&mut diags, s) {
            if diags.len() == len {
                return Some(true);
            }
            choice.push(0);
        } else {
            *choice.last_mut().unwrap() += 1;
        }
    }
}

/// Smallest `N` in `1..=max_n` with `C(2N)` empty, or `None` if every
/// tested set is nonempty or the search hit its cap.
pub fn smallest_empty_c(g: &CellularAutomaton, b: &[bool], max_n: usize, cap: u64) -> Option<usize> {
    for nn in 1..=max_n {
        match c_nonempty(g, b, 2 * nn, cap) {
            Some(false) => return Some(nn),
            Some(true) => {}
            None => return None,
        }
    }
    None
}

fn marker(bundle: &ReductionBundle, upper: Sym, delta: Delta) -> Sym {
    match bundle.target() {
        Target::Sofic => upper,
        Target::FullShift => bundle
            .belt_alphabet()
            .encode(Column {
                top: upper,
                bottom: EMPTY,
                delta,
            })
            .expect("valid column"),
    }
}

/// Runs the two-configuration experiment for `n >= 10` steps: a fast
/// right-moving particle at the origin versus none, over a shared inner
/// layer (a (1,5)-witness when a small one exists).
pub fn speed_dichotomy_experiment(bundle: &ReductionBundle, n: usize) -> Result<SpeedReport> {
    if n < 10 {
        return Err(Error::arg("the speed experiment needs n >= 10"));
    }
    let g = bundle.inner();
    let b = bundle.b();
    let witness = search_local_immortality(g, b, 1, 5, WITNESS_PERIOD_CAP, WITNESS_TIME_CAP)?;
    let witness_found = witness.is_some();
    let lower = witness.map_or_else(|| Configuration::uniform(0), |w| w.x);
    let smallest_empty_c = if witness_found {
        None
    } else {
        smallest_empty_c(g, b, C_SEARCH_MAX, C_NODE_CAP)
    };

    let plus = marker(bundle, EMPTY, Delta::Plus);
    let minus = marker(bundle, EMPTY, Delta::Minus);
    let arrow = marker(bundle, FAST_RIGHT, Delta::Zero);
    let without = Configuration::new(vec![plus], vec![], vec![minus])?;
    let with = Configuration::new(vec![plus], vec![arrow], vec![minus])?;
    let x = bundle.join(&without, &lower);
    let y = bundle.join(&with, &lower);

    let trace = front_speed(bundle, &x, &y, n, Direction::Right)?;
    let slope = trace.slope;
    Ok(SpeedReport {
        n,
        slope,
        class: SpeedClass::from_slope(slope),
        trace,
        lower,
        witness_found,
        smallest_empty_c,
    })
}
