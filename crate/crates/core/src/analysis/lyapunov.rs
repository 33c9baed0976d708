use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::alphabet::{checked_pow, Sym, WordOdometer};
use crate::ca::{CellularAutomaton, GlobalMap};
use crate::config::Configuration;
use crate::error::{Error, Result};

/// Which side perturbations come from. `Left` measures how far right
/// perturbations travel leftward (the minus exponent), `Right` the mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn sign(self) -> &'static str {
        match self {
            Direction::Left => "-",
            Direction::Right => "+",
        }
    }
}

/// Two independent ways of computing the finite-time exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMethod {
    /// Descending search over the agreement radius; every perturbation of
    /// the free cells is simulated separately with early exit.
    Enumerate,
    /// Ascending search; the set of reachable words is propagated step by
    /// step with duplicates merged.
    Propagate,
}

/// Work budget, counted in simulated words.
pub const DEFAULT_CAP: u64 = 50_000_000;

struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    fn new(cap: u64) -> Self {
        Budget { used: 0, cap }
    }

    fn spend(&mut self, n: u64) -> Result<()> {
        self.used += n;
        if self.used > self.cap {
            return Err(Error::cap("lyapunov search", self.used, self.cap));
        }
        Ok(())
    }
}

/// Geometry of the test "agreement on positions `<= s` keeps positions
/// `<= 0` fixed for `n` steps" for a left-facing neighborhood `[m, a]`.
#[derive(Clone, Copy)]
struct Frame {
    m: i64,
    n: usize,
    /// Leftmost relevant position.
    p: i64,
    s: i64,
    /// Rightmost relevant position (`n * a`).
    q: i64,
}

impl Frame {
    fn new(ca: &CellularAutomaton, n: usize, s: i64) -> Self {
        let (m, a) = (ca.memory(), ca.anticipation());
        let ni = n as i64;
        Frame {
            m,
            n,
            p: s + 1 - ni * (a - m),
            s,
            q: ni * a,
        }
    }

    fn fixed_len(&self) -> usize {
        (self.s - self.p + 1) as usize
    }

    fn free_len(&self) -> usize {
        (self.q - self.s) as usize
    }

    /// Number of leading image cells at positions `<= 0` after `i` steps.
    fn checked(&self, i: usize, len: usize) -> usize {
        let lo = self.p - i as i64 * self.m;
        ((-lo + 1).max(0) as usize).min(len)
    }
}

/// Largest `s` for which the test can fail; `None` when perturbations
/// never move left (`a <= 0`).
fn top(ca: &CellularAutomaton, n: usize) -> Option<i64> {
    let a = ca.anticipation();
    if a <= 0 || n == 0 {
        None
    } else {
        Some(n as i64 * a - 1)
    }
}

/// True if some change of the free cells alters a checked cell.
fn fails_enumerate(ca: &CellularAutomaton, fr: &Frame, fixed: &[Sym], budget: &mut Budget) -> Result<bool> {
    let k = ca.alphabet_ref().len();
    let free = fr.free_len();
    budget.spend(checked_pow(k, free).map(|v| v as u64).unwrap_or(u64::MAX))?;
    let mut reference: Option<Vec<Vec<Sym>>> = None;
    let mut word = fixed.to_vec();
    word.resize(fixed.len() + free, 0);
    let mut od = WordOdometer::new(k, free);
    while let Some(v) = od.next_word() {
        word[fixed.len()..].copy_from_slice(v);
        let mut cur = word.clone();
        let mut images = Vec::with_capacity(fr.n);
        for i in 1..=fr.n {
            cur = ca.apply_word_unchecked(&cur);
            let c = fr.checked(i, cur.len());
            match &reference {
                Some(r) if r[i - 1][..] != cur[..c] => return Ok(true),
                Some(_) => {}
                None => images.push(cur[..c].to_vec()),
            }
        }
        if reference.is_none() {
            reference = Some(images);
        }
    }
    Ok(false)
}

fn fails_propagate(ca: &CellularAutomaton, fr: &Frame, fixed: &[Sym], budget: &mut Budget) -> Result<bool> {
    let k = ca.alphabet_ref().len();
    let free = fr.free_len();
    let mut set: HashSet<Vec<Sym>> = HashSet::new();
    let mut od = WordOdometer::new(k, free);
    while let Some(v) = od.next_word() {
        let mut w = fixed.to_vec();
        w.extend_from_slice(v);
        set.insert(w);
    }
    for i in 1..=fr.n {
        budget.spend(set.len() as u64)?;
        set = set.iter().map(|w| ca.apply_word_unchecked(w)).collect();
        let mut seen: Option<&[Sym]> = None;
        for w in &set {
            let c = fr.checked(i, w.len());
            match seen {
                None => seen = Some(&w[..c]),
                Some(prev) if prev != &w[..c] => return Ok(true),
                Some(_) => {}
            }
        }
    }
    Ok(false)
}

fn lambda_left(ca: &CellularAutomaton, x: &Configuration, n: usize, method: LambdaMethod, budget: &mut Budget) -> Result<u64> {
    let Some(top) = top(ca, n) else {
        return Ok(0);
    };
    let fixed_of = |fr: &Frame| x.window(fr.p, fr.s + 1);
    match method {
        LambdaMethod::Enumerate => {
            for s in (0..=top).rev() {
                let fr = Frame::new(ca, n, s);
                if fails_enumerate(ca, &fr, &fixed_of(&fr), budget)? {
                    return Ok(s as u64 + 1);
                }
            }
            Ok(0)
        }
        LambdaMethod::Propagate => {
            for s in 0..=top {
                let fr = Frame::new(ca, n, s);
                if !fails_propagate(ca, &fr, &fixed_of(&fr), budget)? {
                    return Ok(s as u64);
                }
            }
            Ok(top as u64 + 1)
        }
    }
}

/// Orient the problem so that it is always a left-facing question.
fn oriented(ca: &CellularAutomaton, x: Option<&Configuration>, dir: Direction) -> Result<(CellularAutomaton, Option<Configuration>)> {
    let ca = ca.tabulated()?;
    if let Some(x) = x {
        x.check_alphabet(ca.alphabet_ref())?;
    }
    Ok(match dir {
        Direction::Left => (ca, x.cloned()),
        Direction::Right => (ca.mirror()?, x.map(Configuration::reflect)),
    })
}

/// The finite-time exponent: the least `s >= 0` such that agreement with
/// `x` on positions `<= s` (resp. `>= -s`) forces agreement on positions
/// `<= 0` (resp. `>= 0`) during the first `n` steps.
pub fn lambda_finite(ca: &CellularAutomaton, x: &Configuration, n: usize, dir: Direction) -> Result<u64> {
    lambda_finite_with(ca, x, n, dir, LambdaMethod::Enumerate, DEFAULT_CAP)
}

pub fn lambda_finite_with(
    ca: &CellularAutomaton,
    x: &Configuration,
    n: usize,
    dir: Direction,
    method: LambdaMethod,
    cap: u64,
) -> Result<u64> {
    let (ca, x) = oriented(ca, Some(x), dir)?;
    lambda_left(&ca, &x.unwrap(), n, method, &mut Budget::new(cap))
}

/// Range of shifts `k` for which `sigma^k x` can give distinct exponents.
fn translate_range(ca: &CellularAutomaton, x: &Configuration, n: usize) -> (i64, i64) {
    let ni = n as i64;
    let (m, a) = (ca.memory(), ca.anticipation());
    let reach = ni * (a.abs() + m.abs() + (a - m)) + 1;
    (
        x.start() - reach - x.left().len() as i64,
        x.end() + reach + x.right().len() as i64,
    )
}

/// The shift-invariant version: the supremum over all translates of `x`.
/// Returns the value and one shift `k` realizing it (for `sigma^k x`).
pub fn lambda_bar_finite(ca: &CellularAutomaton, x: &Configuration, n: usize, dir: Direction) -> Result<(u64, i64)> {
    let (ca, x) = oriented(ca, Some(x), dir)?;
    let x = x.unwrap();
    let mut budget = Budget::new(DEFAULT_CAP);
    let (lo, hi) = translate_range(&ca, &x, n);
    let mut best = (0u64, 0i64);
    let mut first = true;
    for k in lo..=hi {
        let v = lambda_left(&ca, &x.shift(k), n, LambdaMethod::Enumerate, &mut budget)?;
        if first || v > best.0 {
            best = (v, k);
            first = false;
        }
    }
    // Undo the orientation of the shift.
    if dir == Direction::Right {
        best.1 = -best.1;
    }
    Ok(best)
}

/// `max_x Λ_n(x)` with a configuration attaining it.
pub fn max_lambda_finite(ca: &CellularAutomaton, n: usize, dir: Direction, cap: u64) -> Result<(u64, Configuration)> {
    let (oca, _) = oriented(ca, None, dir)?;
    let zero = Configuration::uniform(0);
    let Some(top) = top(&oca, n) else {
        return Ok((0, zero));
    };
    let k = oca.alphabet_ref().len();
    let mut budget = Budget::new(cap);
    for s in (0..=top).rev() {
        let fr = Frame::new(&oca, n, s);
        let mut od = WordOdometer::new(k, fr.fixed_len());
        while let Some(fixed) = od.next_word() {
            if fails_enumerate(&oca, &fr, fixed, &mut budget)? {
                let w = Configuration::with_start(vec![0], fixed.to_vec(), vec![0], fr.p)?;
                let w = if dir == Direction::Right { w.reflect() } else { w };
                return Ok((s as u64 + 1, w));
            }
        }
    }
    Ok((0, zero))
}

/// Exact average of `Λ_n` under the uniform Bernoulli measure, by
/// enumerating every relevant window.
pub fn avg_lambda_bruteforce(ca: &CellularAutomaton, n: usize, dir: Direction, cap: u64) -> Result<BigRational> {
    let (oca, _) = oriented(ca, None, dir)?;
    let Some(_) = top(&oca, n) else {
        return Ok(BigRational::from_integer(0.into()));
    };
    let k = oca.alphabet_ref().len();
    let fr0 = Frame::new(&oca, n, 0);
    let width = (fr0.q - fr0.p + 1) as usize;
    let total = checked_pow(k, width)
        .filter(|&t| t <= cap as u128)
        .ok_or_else(|| Error::cap("average enumeration", format!("{k}^{width}"), cap))?;
    let mut budget = Budget::new(u64::MAX);
    let mut sum = BigInt::from(0);
    let mut od = WordOdometer::new(k, width);
    while let Some(w) = od.next_word() {
        let x = Configuration::with_start(vec![0], w.to_vec(), vec![0], fr0.p)?;
        sum += lambda_left(&oca, &x, n, LambdaMethod::Enumerate, &mut budget)?;
    }
    Ok(BigRational::new(sum, BigInt::from(total)))
}

/// Monte Carlo estimate of the average exponent: `(mean, standard error)`.
pub fn avg_lambda_sample(
    ca: &CellularAutomaton,
    n: usize,
    dir: Direction,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    let (oca, _) = oriented(ca, None, dir)?;
    if top(&oca, n).is_none() || samples == 0 {
        return Ok((0.0, 0.0));
    }
    let k = oca.alphabet_ref().len();
    let fr0 = Frame::new(&oca, n, 0);
    let width = (fr0.q - fr0.p + 1) as usize;
    let mut budget = Budget::new(u64::MAX);
    let (mut s1, mut s2) = (0f64, 0f64);
    for _ in 0..samples {
        let w: Vec<Sym> = (0..width).map(|_| rng.gen_range(0..k) as Sym).collect();
        let x = Configuration::with_start(vec![0], w, vec![0], fr0.p)?;
        let v = lambda_left(&oca, &x, n, LambdaMethod::Enumerate, &mut budget)? as f64;
        s1 += v;
        s2 += v * v;
    }
    let ns = samples as f64;
    let mean = s1 / ns;
    let var = (s2 / ns - mean * mean).max(0.0);
    Ok((mean, (var / ns).sqrt()))
}

/// Position of the extreme disagreement between two orbits over time.
#[derive(Debug, Clone)]
pub struct FrontTrace {
    pub side: Direction,
    /// `positions[t]` is the rightmost (or leftmost) differing cell at time
    /// `t`, or `None` once the orbits coincide.
    pub positions: Vec<Option<i64>>,
    /// Average speed over the second half of the run; positive means
    /// outward (rightward for `Right`, leftward for `Left`).
    pub slope: f64,
}

/// Track the front of the disagreement set of `x` and `y` for `n` steps.
pub fn front_speed(map: &dyn GlobalMap, x: &Configuration, y: &Configuration, n: usize, side: Direction) -> Result<FrontTrace> {
    let mut positions = Vec::with_capacity(n + 1);
    let (mut cx, mut cy) = (x.clone(), y.clone());
    for t in 0..=n {
        let b = cx.disagreement_bounds(&cy);
        if b.identical {
            if t == 0 {
                return Err(Error::arg("the two configurations are identical"));
            }
            positions.push(None);
        } else {
            let (unbounded, pos) = match side {
                Direction::Right => (b.right_unbounded, b.rightmost),
                Direction::Left => (b.left_unbounded, b.leftmost),
            };
            if unbounded {
                return Err(Error::UnboundedDisagreement(format!(
                    "the configurations differ on an infinite {} tail at time {t}",
                    if side == Direction::Right { "right" } else { "left" }
                )));
            }
            positions.push(pos);
        }
        if t < n {
            cx = map.apply(&cx)?;
            cy = map.apply(&cy)?;
        }
    }
    let slope = trace_slope(&positions, side);
    Ok(FrontTrace {
        side,
        positions,
        slope,
    })
}

fn trace_slope(positions: &[Option<i64>], side: Direction) -> f64 {
    let n = positions.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let t0 = n / 2;
    match (positions[t0], positions[n]) {
        (Some(a), Some(b)) if n > t0 => {
            let d = (b - a) as f64 / (n - t0) as f64;
            if side == Direction::Right {
                d
            } else {
                -d
            }
        }
        _ => 0.0,
    }
}
