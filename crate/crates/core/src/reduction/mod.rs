//! Executable versions of the reduction constructions: the tile-based
//! immortality automaton, the particle automaton, the two-layer reversible
//! automaton on the one-particle subshift and its conveyor-belt version on
//! a full shift, and the front-speed experiment that separates them.

mod arrows;
mod belt;
mod experiment;
mod particle;

use std::sync::OnceLock;

pub use arrows::{build_arrow_tilesets, build_immortality_ca, ArrowTileSets, ImmortalityReduction};
pub use belt::{decompose, serialize, step_belt, step_belt_word, Belt, BeltAlphabet, Column, Delta};
pub use experiment::{
    smallest_empty_c, speed_dichotomy_experiment, SpeedClass, SpeedReport, SPEED_TOLERANCE,
};
pub use particle::{
    at_most_one_particle, build_particle_ca, is_particle, particle_count, rho, ParticleAlphabet, EMPTY,
    FAST_LEFT, FAST_RIGHT, NAMES as PARTICLE_NAMES, RHO, SLOW_LEFT, SLOW_RIGHT, WALL,
};

use crate::alphabet::{Alphabet, Sym, WordOdometer};
use crate::analysis::{is_injective, Certificate, DecisionResult, Verdict};
use crate::ca::{CellularAutomaton, GlobalMap};
use crate::config::Configuration;
use crate::error::{Error, Result};

/// How many steps of the inner automaton one step of the reduction runs.
pub const INNER_STEPS: usize = 10;

/// Word width for the exhaustive involution checks run at build time.
const BUILD_SWAP_WIDTH: usize = 6;
const BUILD_BELT_SWAP_WIDTH: usize = 4;
const BUILD_BELT_LEN: usize = 5;

/// `→0 ↔ ↙‖`, the exchange performed when the inner layer leaves `B`.
pub fn swap_pair(a: Sym, b: Sym) -> Option<(Sym, Sym)> {
    match (a, b) {
        (FAST_RIGHT, EMPTY) => Some((SLOW_LEFT, WALL)),
        (SLOW_LEFT, WALL) => Some((FAST_RIGHT, EMPTY)),
        _ => None,
    }
}

/// The exchange on a finite particle word; `trig(i)` says whether the
/// inner condition fails at position `i`.
pub fn swap_word(w: &[Sym], trig: impl Fn(usize) -> bool) -> Vec<Sym> {
    let mut out = w.to_vec();
    for i in 0..w.len().saturating_sub(1) {
        if let Some((a, b)) = swap_pair(w[i], w[i + 1]) {
            if trig(i) {
                out[i] = a;
                out[i + 1] = b;
            }
        }
    }
    out
}

fn track(c: &Column, bottom: bool) -> Sym {
    if bottom {
        c.bottom
    } else {
        c.top
    }
}

fn set_track(c: &mut Column, bottom: bool, s: Sym) {
    if bottom {
        c.bottom = s;
    } else {
        c.top = s;
    }
}

/// The exchange on both tracks of a finite belt word, only where the
/// right cell of the pair is marked `-`.
pub fn swap_belt_word(ab: &BeltAlphabet, w: &[Sym], trig: impl Fn(usize) -> bool) -> Vec<Sym> {
    let cols: Vec<Column> = w.iter().map(|&s| ab.column(s)).collect();
    let mut out = cols.clone();
    for i in 0..cols.len().saturating_sub(1) {
        if cols[i + 1].delta != Delta::Minus || !trig(i) {
            continue;
        }
        for bottom in [false, true] {
            if let Some((a, b)) = swap_pair(track(&cols[i], bottom), track(&cols[i + 1], bottom)) {
                set_track(&mut out[i], bottom, a);
                set_track(&mut out[i + 1], bottom, b);
            }
        }
    }
    out.iter().map(|&c| ab.encode(c).expect("exchange keeps columns valid")).collect()
}

/// Exhaustively checks that [`swap_word`] is an involution on all words of
/// length at most `width` and all trigger patterns.
pub fn check_swap_involution(width: usize) -> bool {
    for len in 1..=width {
        let mut od = WordOdometer::new(6, len);
        while let Some(w) = od.next_word() {
            let occ: Vec<usize> = (0..len.saturating_sub(1))
                .filter(|&i| swap_pair(w[i], w[i + 1]).is_some())
                .collect();
            for mask in 0u32..1 << occ.len() {
                let trig = |i: usize| occ.iter().position(|&o| o == i).is_some_and(|k| mask >> k & 1 == 1);
                let once = swap_word(w, trig);
                if swap_word(&once, trig) != w {
                    return false;
                }
            }
        }
    }
    true
}

/// Same as [`check_swap_involution`] for [`swap_belt_word`]. Words
/// without an exchange site are skipped through a precomputed pair table;
/// every other word is checked under every trigger pattern.
pub fn check_belt_swap_involution(ab: &BeltAlphabet, width: usize) -> bool {
    let k = ab.len();
    let site: Vec<bool> = (0..k * k)
        .map(|ij| {
            let (a, b) = (ab.column((ij / k) as Sym), ab.column((ij % k) as Sym));
            b.delta == Delta::Minus
                && [false, true]
                    .iter()
                    .any(|&t| swap_pair(track(&a, t), track(&b, t)).is_some())
        })
        .collect();
    for len in 1..=width {
        let mut od = WordOdometer::new(k, len);
        let mut occ = Vec::with_capacity(len);
        while let Some(w) = od.next_word() {
            occ.clear();
            occ.extend((0..len - 1).filter(|&i| site[w[i] as usize * k + w[i + 1] as usize]));
            if occ.is_empty() {
                continue;
            }
            for mask in 0u32..1 << occ.len() {
                let trig = |i: usize| occ.iter().position(|&o| o == i).is_some_and(|j| mask >> j & 1 == 1);
                let once = swap_belt_word(ab, w, trig);
                if swap_belt_word(ab, &once, trig) != w {
                    return false;
                }
            }
        }
    }
    true
}

/// Checks that `ρ S ρ` undoes `S` on every window of width 9 with at
/// most one particle, which covers every cell of every one-particle
/// configuration.
pub fn check_particle_inverse(s: &CellularAutomaton) -> bool {
    let back = s.conjugate_by(&RHO).expect("rho is a permutation");
    let mut od = WordOdometer::new(6, 9);
    while let Some(w) = od.next_word() {
        if w.iter().filter(|&&c| is_particle(c)).count() > 1 {
            continue;
        }
        let mid = s.apply_word_unchecked(w);
        if back.apply_word_unchecked(&mid)[0] != w[4] {
            return false;
        }
    }
    true
}

/// Checks that the belt step is a bijection on closed belts of every
/// length up to `max_len`, and that it keeps each belt's shape.
pub fn check_belt_bijective(s: &CellularAutomaton, max_len: usize) -> Result<bool> {
    for len in 1..=max_len {
        let mut images = std::collections::HashSet::new();
        let mut count = 0usize;
        for col in 0..len {
            for bottom in [false, true] {
                for p in [FAST_LEFT, FAST_RIGHT, SLOW_LEFT, SLOW_RIGHT] {
                    let mut od = WordOdometer::new(2, 2 * len - 1);
                    while let Some(bits) = od.next_word() {
                        let mut cells = bits.to_vec();
                        cells.insert(if bottom { len + col } else { col }, p);
                        let belt = Belt {
                            top: cells[..len].to_vec(),
                            bottom: cells[len..].to_vec(),
                            split: 0,
                        };
                        let img = step_belt(s, &belt)?;
                        if img.particle().is_none() || img.len() != len {
                            return Ok(false);
                        }
                        images.insert((img.top, img.bottom));
                        count += 1;
                    }
                }
            }
        }
        if images.len() != count {
            return Ok(false);
        }
    }
    Ok(true)
}

fn particle_facts() -> &'static (CellularAutomaton, Verdict, bool) {
    static FACTS: OnceLock<(CellularAutomaton, Verdict, bool)> = OnceLock::new();
    FACTS.get_or_init(|| {
        let s = build_particle_ca();
        let verdict = match is_injective(&s, Some(&at_most_one_particle())) {
            Ok(r) => r.verdict,
            Err(e) => Verdict::Undecided(e.to_string()),
        };
        let inverse = check_particle_inverse(&s);
        (s, verdict, inverse)
    })
}

/// Which space the reduction acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Particle layer restricted to at most one particle.
    Sofic,
    /// Conveyor belts on the full shift.
    FullShift,
}

/// Results of the checks run when a bundle is built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildChecks {
    pub inner_injective: Verdict,
    /// Pair-graph verdict for the particle automaton on the one-particle
    /// subshift.
    pub particle_injective: Verdict,
    /// `ρ S ρ ∘ S = id` on all one-particle windows.
    pub particle_inverse: bool,
    pub swap_involution: bool,
    /// Belt step bijective on short closed belts (full shift only).
    pub belt_bijective: Option<bool>,
}

impl BuildChecks {
    pub fn all_pass(&self) -> bool {
        self.inner_injective.is_yes()
            && self.particle_injective.is_yes()
            && self.particle_inverse
            && self.swap_involution
            && self.belt_bijective != Some(false)
    }
}

/// A built reduction `F = F1 ∘ G2 ∘ F2` (or its belt version) together
/// with its ingredients.
#[derive(Clone)]
pub struct ReductionBundle {
    target: Target,
    inner: CellularAutomaton,
    b: Vec<bool>,
    particle: CellularAutomaton,
    belts: BeltAlphabet,
    alphabet: Alphabet,
    k2: usize,
    pub checks: BuildChecks,
}

/// Accepts `G` if its essential neighborhood lies inside `[0, 1]` and
/// returns it on exactly that neighborhood.
fn radius_half(g: &CellularAutomaton) -> Result<CellularAutomaton> {
    let t = g.tabulated()?.trimmed()?;
    if t.memory() < 0 || t.anticipation() > 1 {
        return Err(Error::InvalidRule("inner CA must be radius-1/2".into()));
    }
    t.widen(0, 1)
}

fn build(target: Target, g: &CellularAutomaton, b: &[bool]) -> Result<ReductionBundle> {
    let inner = radius_half(g)?;
    let k2 = inner.alphabet_ref().len();
    if b.len() != k2 {
        return Err(Error::arg(format!(
            "B must have one flag per inner symbol ({k2}), got {}",
            b.len()
        )));
    }
    let inner_injective = is_injective(&inner, None)?.verdict;
    if !inner_injective.is_yes() {
        return Err(Error::InvalidRule("inner CA must be reversible".into()));
    }
    let (particle, particle_injective, particle_inverse) = particle_facts().clone();
    let belts = BeltAlphabet::new();
    let (alphabet, swap_involution, belt_bijective) = match target {
        Target::Sofic => (
            ParticleAlphabet::new().alphabet.product(inner.alphabet_ref())?,
            check_swap_involution(BUILD_SWAP_WIDTH),
            None,
        ),
        Target::FullShift => (
            belts.alphabet().product(inner.alphabet_ref())?,
            check_belt_swap_involution(&belts, BUILD_BELT_SWAP_WIDTH),
            Some(check_belt_bijective(&particle, BUILD_BELT_LEN)?),
        ),
    };
    Ok(ReductionBundle {
        target,
        inner,
        b: b.to_vec(),
        particle,
        belts,
        alphabet,
        k2,
        checks: BuildChecks {
            inner_injective,
            particle_injective,
            particle_inverse,
            swap_involution,
            belt_bijective,
        },
    })
}

/// `F = F1 ∘ G2 ∘ F2` on (one-particle layer) × (inner layer).
pub fn build_sofic_f(g: &CellularAutomaton, b: &[bool]) -> Result<ReductionBundle> {
    build(Target::Sofic, g, b)
}

/// `F' = F1' ∘ G2' ∘ F2'` on (belt alphabet) × (inner layer).
pub fn build_fullshift_f(g: &CellularAutomaton, b: &[bool]) -> Result<ReductionBundle> {
    build(Target::FullShift, g, b)
}

impl ReductionBundle {
    pub fn target(&self) -> Target {
        self.target
    }

    /// The inner automaton on its radius-½ neighborhood.
    pub fn inner(&self) -> &CellularAutomaton {
        &self.inner
    }

    pub fn b(&self) -> &[bool] {
        &self.b
    }

    pub fn particle_ca(&self) -> &CellularAutomaton {
        &self.particle
    }

    pub fn belt_alphabet(&self) -> &BeltAlphabet {
        &self.belts
    }

    /// Size of the inner alphabet.
    pub fn inner_len(&self) -> usize {
        self.k2
    }

    /// Symbol for an upper letter (particle or belt letter) and an inner
    /// letter.
    pub fn symbol(&self, upper: Sym, lower: Sym) -> Sym {
        upper * self.k2 as Sym + lower
    }

    pub fn upper(&self, x: &Configuration) -> Configuration {
        let k2 = self.k2 as Sym;
        x.map_symbols(|s| s / k2)
    }

    pub fn lower(&self, x: &Configuration) -> Configuration {
        let k2 = self.k2 as Sym;
        x.map_symbols(|s| s % k2)
    }

    pub fn join(&self, upper: &Configuration, lower: &Configuration) -> Configuration {
        let k2 = self.k2 as Sym;
        upper.zip(lower, |a, b| a * k2 + b)
    }

    fn validate(&self, x: &Configuration) -> Result<()> {
        if x.max_symbol() as usize >= self.alphabet.len() {
            return Err(Error::AlphabetMismatch(format!(
                "symbol index {} outside an alphabet of {}",
                x.max_symbol(),
                self.alphabet.len()
            )));
        }
        if self.target == Target::Sofic {
            let k2 = self.k2 as Sym;
            if particle_count(x, |s| s / k2)? > 1 {
                return Err(Error::InvalidConfiguration(
                    "more than one particle: outside the one-particle subshift".into(),
                ));
            }
        }
        Ok(())
    }

    /// `G^0(x2), ..., G^10(x2)`.
    fn inner_orbit(&self, x2: &Configuration) -> Vec<Configuration> {
        let mut out = vec![x2.clone()];
        for _ in 0..INNER_STEPS {
            let next = self.inner.step_unchecked(out.last().unwrap());
            out.push(next);
        }
        out
    }

    /// True when the inner orbit leaves `B` near `i`: at `i` within 5
    /// steps or at `i + 1` between steps 5 and 10.
    fn triggered(&self, orbit: &[Configuration], i: i64) -> bool {
        (0..=5).any(|j| !self.b[orbit[j].get(i) as usize]) || (5..=10).any(|j| !self.b[orbit[j].get(i + 1) as usize])
    }

    /// The exchange involution.
    pub fn f2(&self, x: &Configuration) -> Result<Configuration> {
        self.validate(x)?;
        let orbit = self.inner_orbit(&self.lower(x));
        let k2 = self.k2 as Sym;
        // Output at k reads positions k-1 ..= k+11.
        let (m, a) = (-1, 1 + INNER_STEPS as i64);
        let out = match self.target {
            Target::Sofic => Configuration::from_fn(x.start() - a, x.end() - m, x.left().len(), x.right().len(), |k| {
                let up = |i: i64| x.get(i) / k2;
                let low = x.get(k) % k2;
                if let Some((s, _)) = swap_pair(up(k), up(k + 1)) {
                    if self.triggered(&orbit, k) {
                        return s * k2 + low;
                    }
                }
                if let Some((_, s)) = swap_pair(up(k - 1), up(k)) {
                    if self.triggered(&orbit, k - 1) {
                        return s * k2 + low;
                    }
                }
                x.get(k)
            }),
            Target::FullShift => {
                let ab = &self.belts;
                Configuration::from_fn(x.start() - a, x.end() - m, x.left().len(), x.right().len(), |k| {
                    let col = |i: i64| ab.column(x.get(i) / k2);
                    let (prev, here, next) = (col(k - 1), col(k), col(k + 1));
                    let mut out = here;
                    for bottom in [false, true] {
                        if next.delta == Delta::Minus {
                            if let Some((s, _)) = swap_pair(track(&here, bottom), track(&next, bottom)) {
                                if self.triggered(&orbit, k) {
                                    set_track(&mut out, bottom, s);
                                }
                            }
                        }
                        if here.delta == Delta::Minus {
                            if let Some((_, s)) = swap_pair(track(&prev, bottom), track(&here, bottom)) {
                                if self.triggered(&orbit, k - 1) {
                                    set_track(&mut out, bottom, s);
                                }
                            }
                        }
                    }
                    ab.encode(out).expect("exchange keeps columns valid") * k2 + x.get(k) % k2
                })
            }
        };
        Ok(out)
    }

    /// `G^10` on the inner layer.
    pub fn g2(&self, x: &Configuration) -> Result<Configuration> {
        self.validate(x)?;
        let lower = self.inner_orbit(&self.lower(x)).pop().unwrap();
        Ok(self.join(&self.upper(x), &lower))
    }

    /// The particle step on the upper layer.
    pub fn f1(&self, x: &Configuration) -> Result<Configuration> {
        self.validate(x)?;
        match self.target {
            Target::Sofic => {
                let upper = self.particle.step_unchecked(&self.upper(x));
                Ok(self.join(&upper, &self.lower(x)))
            }
            Target::FullShift => belt::step_belts(&self.particle, &self.belts, self.k2, x),
        }
    }

    /// Reversibility, argued factor by factor from the build-time checks.
    pub fn is_injective(&self) -> DecisionResult {
        self.factor_verdict("injective")
    }

    /// A reversible map is onto; same evidence as [`Self::is_injective`].
    pub fn is_surjective(&self) -> DecisionResult {
        self.factor_verdict("surjective")
    }

    fn factor_verdict(&self, property: &str) -> DecisionResult {
        let c = &self.checks;
        let verdict = if c.all_pass() {
            Verdict::Yes
        } else if let Verdict::Undecided(why) = &c.particle_injective {
            Verdict::Undecided(why.clone())
        } else {
            Verdict::No
        };
        let note = format!(
            "inner automaton injective: {:?}; particle automaton injective on one-particle configurations: {:?}; \
             rho-conjugate inverts it locally: {}; exchange is an involution: {}; belt step bijective on short belts: {}",
            c.inner_injective,
            c.particle_injective,
            c.particle_inverse,
            c.swap_involution,
            c.belt_bijective.map_or("n/a".to_string(), |b| b.to_string()),
        );
        DecisionResult {
            property: property.to_string(),
            verdict,
            certificate: Some(Certificate::Note(note)),
        }
    }

    /// Encodes a configuration of the one-particle system on the top track
    /// of a single belt with an empty bottom track.
    pub fn embed_top(&self, x: &Configuration) -> Result<Configuration> {
        if particle_count(x, |s| s / self.k2 as Sym)? > 1 {
            return Err(Error::InvalidConfiguration("more than one particle".into()));
        }
        let k2 = self.k2 as Sym;
        let pos = (x.start()..x.end()).find(|&i| is_particle(x.get(i) / k2)).unwrap_or(0);
        let (lo, hi) = (x.start().min(pos), x.end().max(pos + 1));
        let ab = &self.belts;
        Ok(Configuration::from_fn(lo, hi, x.left().len(), x.right().len(), |i| {
            let s = x.get(i);
            let delta = match i.cmp(&pos) {
                std::cmp::Ordering::Less => Delta::Plus,
                std::cmp::Ordering::Equal if is_particle(s / k2) => Delta::Zero,
                _ => Delta::Minus,
            };
            let c = Column {
                top: s / k2,
                bottom: EMPTY,
                delta,
            };
            ab.encode(c).expect("valid column") * k2 + s % k2
        }))
    }

    /// The top track together with the inner layer.
    pub fn top_track(&self, x: &Configuration) -> Configuration {
        let k2 = self.k2 as Sym;
        let ab = &self.belts;
        x.map_symbols(|s| ab.column(s / k2).top * k2 + s % k2)
    }
}

impl GlobalMap for ReductionBundle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn apply(&self, x: &Configuration) -> Result<Configuration> {
        let x = self.f2(x)?;
        let x = self.g2(&x)?;
        self.f1(&x)
    }
}

impl std::fmt::Debug for ReductionBundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReductionBundle")
            .field("target", &self.target)
            .field("inner", &self.inner)
            .field("b", &self.b)
            .field("checks", &self.checks)
            .finish()
    }
}
