#![allow(dead_code)]

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rcalab::reduction::{BeltAlphabet, EMPTY, FAST_LEFT, SLOW_RIGHT, WALL};
use rcalab::tiles::{ca_from_tileset, complete, random_two_way};
use rcalab::{Alphabet, CellularAutomaton, Configuration, Sym};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_config(rng: &mut impl Rng, k: usize, max_period: usize, max_center: usize) -> Configuration {
    let mut word = |lo: usize, hi: usize| -> Vec<Sym> {
        let len = rng.gen_range(lo..=hi);
        (0..len).map(|_| rng.gen_range(0..k) as Sym).collect()
    };
    let left = word(1, max_period);
    let center = word(0, max_center);
    let right = word(1, max_period);
    let start = rng.gen_range(-4..=4);
    Configuration::with_start(left, center, right, start).unwrap()
}

pub fn random_ca(rng: &mut impl Rng, k: usize, memory: i64, anticipation: i64) -> CellularAutomaton {
    let width = (anticipation - memory + 1) as u32;
    let table = (0..k.pow(width)).map(|_| rng.gen_range(0..k) as Sym).collect();
    CellularAutomaton::from_table(Alphabet::numeric(k).unwrap(), memory, anticipation, table).unwrap()
}

pub fn shift(k: usize) -> CellularAutomaton {
    CellularAutomaton::shift_map(Alphabet::numeric(k).unwrap(), 1)
}

pub fn and_rule() -> CellularAutomaton {
    CellularAutomaton::from_fn(Alphabet::numeric(2).unwrap(), 0, 1, |w| w[0] & w[1]).unwrap()
}

/// Strategy for a configuration over `k` symbols.
pub fn config_strategy(k: usize) -> impl Strategy<Value = Configuration> {
    let sym = 0..k as Sym;
    (
        prop::collection::vec(sym.clone(), 1..=3),
        prop::collection::vec(sym.clone(), 0..=8),
        prop::collection::vec(sym, 1..=3),
        -5i64..=5,
    )
        .prop_map(|(l, c, r, s)| Configuration::with_start(l, c, r, s).unwrap())
}

/// Strategy for a random automaton with `k` symbols and a neighborhood
/// inside `[-1, 1]`.
pub fn ca_strategy(k: usize) -> impl Strategy<Value = CellularAutomaton> {
    (-1i64..=0, 0i64..=1).prop_flat_map(move |(m, a)| {
        let width = (a - m + 1) as u32;
        prop::collection::vec(0..k as Sym, k.pow(width)).prop_map(move |table| {
            CellularAutomaton::from_table(Alphabet::numeric(k).unwrap(), m, a, table).unwrap()
        })
    })
}

/// Do two maps agree on `trials` random configurations?
pub fn agree_on_random(f: &CellularAutomaton, g: &CellularAutomaton, trials: usize, seed: u64) -> bool {
    let mut r = rng(seed);
    let k = f.alphabet_ref().len();
    (0..trials).all(|_| {
        let x = random_config(&mut r, k, 4, 12);
        f.step(&x).unwrap() == g.step(&x).unwrap()
    })
}

/// A reversible radius-1/2 automaton from a random complete tile set,
/// with a random proper nonempty `B`.
pub fn random_inner(r: &mut impl Rng) -> (CellularAutomaton, Vec<bool>) {
    let count = r.gen_range(0..=4);
    let g = ca_from_tileset(&complete(&random_two_way(r, 2, count)).unwrap()).unwrap();
    let k = g.alphabet_ref().len();
    let mut b: Vec<bool> = (0..k).map(|_| r.gen_bool(0.7)).collect();
    b[0] = true;
    b[k - 1] = false;
    (g, b)
}

pub fn background(r: &mut impl Rng, lo: usize, hi: usize) -> Vec<Sym> {
    let len = r.gen_range(lo..=hi);
    (0..len).map(|_| if r.gen_bool(0.3) { WALL } else { EMPTY }).collect()
}

/// Random configuration of the one-particle layer over `k2` inner symbols.
pub fn random_sofic(r: &mut impl Rng, k2: usize) -> Configuration {
    let left = background(r, 1, 3);
    let right = background(r, 1, 3);
    let mut center = background(r, 0, 12);
    if !center.is_empty() && r.gen_bool(0.8) {
        let at = r.gen_range(0..center.len());
        center[at] = r.gen_range(FAST_LEFT..=SLOW_RIGHT);
    }
    let upper = Configuration::with_start(left, center, right, r.gen_range(-6..=0)).unwrap();
    let lower = random_config(r, k2, 3, 14);
    upper.zip(&lower, |a, b| a * k2 as Sym + b)
}

/// Random configuration over belt letters × `k2` inner symbols.
pub fn random_belt(r: &mut impl Rng, k2: usize) -> Configuration {
    let ab = BeltAlphabet::new();
    let upper = random_config(r, ab.len(), 3, 14);
    let lower = random_config(r, k2, 3, 14);
    upper.zip(&lower, |a, b| a * k2 as Sym + b)
}
