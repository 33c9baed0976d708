//! Multiplication automata: `Mul_{p,n}` multiplies base-`n` expansions by
//! `p` when `p` divides `n`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::alphabet::{Alphabet, Sym};
use crate::ca::CellularAutomaton;
use crate::config::Configuration;
use crate::error::{Error, Result};

/// Exact rational number used for base conversions and averages.
pub type ExactRational = BigRational;

/// `num/den` followed by a decimal approximation.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{} ({:.6})", r.numer(), r.denom(), rational_to_f64(r))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Scale down huge operands before converting to avoid inf/inf.
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Parameters of `Mul_{p,pq}` with `p, q >= 2` coprime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultParams {
    pub p: u64,
    pub q: u64,
}

impl MultParams {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::arg(format!("need p, q >= 2, got p={p}, q={q}")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::arg(format!("p={p} and q={q} are not coprime")));
        }
        if p * q > crate::alphabet::MAX_ALPHABET as u64 {
            return Err(Error::arg("base too large"));
        }
        Ok(MultParams { p, q })
    }

    pub fn base(&self) -> u64 {
        self.p * self.q
    }
}

/// `mul_{p,n}(a1 q + a0, b1 q + b0) = a0 p + b1` with `q = n / p`.
pub fn mul_digit(p: u64, n: u64, a: u64, b: u64) -> u64 {
    let q = n / p;
    (a % q) * p + b / q
}

/// The radius-½ automaton `Mul_{p,n}` over digits `0..n`.
pub fn make_mult_ca(p: u64, n: u64) -> Result<CellularAutomaton> {
    if p < 2 {
        return Err(Error::arg(format!("multiplier must be at least 2, got {p}")));
    }
    if n % p != 0 || n == p {
        return Err(Error::arg(format!("{p} must be a proper divisor of the base {n}")));
    }
    let alphabet = Alphabet::numeric(n as usize)?;
    CellularAutomaton::from_fn(alphabet, 0, 1, |w| {
        mul_digit(p, n, w[0] as u64, w[1] as u64) as Sym
    })
}

fn big_pow(base: u64, exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

fn rat_pow(base: u64, exp: i64) -> BigRational {
    let b = BigInt::from(big_pow(base, exp.unsigned_abs()));
    if exp >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

/// The configuration whose cell `i` holds the coefficient of `n^(-i)` in
/// the base-`n` expansion of `xi`.
pub fn config_of(xi: &BigRational, n: u64) -> Result<Configuration> {
    if xi < &BigRational::zero() {
        return Err(Error::arg("only nonnegative numbers have expansions here"));
    }
    if n < 2 {
        return Err(Error::arg("base must be at least 2"));
    }
    let den = xi.denom().clone();
    // Terminating iff every prime factor of the denominator divides n.
    let nb = BigInt::from(n);
    let mut rest = den.clone();
    loop {
        let g = rest.gcd(&nb);
        if g.is_one() {
            break;
        }
        rest /= g;
    }
    if !rest.is_one() {
        return Err(Error::NonTerminating(format!("{xi} has no finite base-{n} expansion")));
    }
    let mut e = 0u64;
    let mut scale = BigInt::one();
    while !(&scale % &den).is_zero() {
        scale *= &nb;
        e += 1;
    }
    let mut int = (xi * BigRational::from_integer(scale)).to_integer();
    if int.is_zero() {
        return Ok(Configuration::uniform(0));
    }
    let mut digits = Vec::new();
    while !int.is_zero() {
        let (qt, r) = int.div_rem(&nb);
        digits.push(r.to_u64().unwrap() as Sym);
        int = qt;
    }
    digits.reverse();
    // The least significant digit (weight n^-e) sits at position e.
    let start = e as i64 - (digits.len() as i64 - 1);
    Configuration::with_start(vec![0], digits, vec![0], start)
}

/// `sum_i x[-i] n^i`, exactly. The left background must be zero; the right
/// side may be any periodic tail.
pub fn real_of(x: &Configuration, n: u64) -> Result<BigRational> {
    if x.left().iter().any(|&s| s != 0) {
        return Err(Error::arg("configuration has a nonzero left background"));
    }
    if x.max_symbol() as u64 >= n {
        return Err(Error::AlphabetMismatch(format!("digit out of range for base {n}")));
    }
    let mut sum = BigRational::zero();
    for (j, &d) in x.center().iter().enumerate() {
        if d != 0 {
            let pos = x.start() + j as i64;
            sum += BigRational::from_integer(BigInt::from(d)) * rat_pow(n, -pos);
        }
    }
    let r = x.right();
    if r.iter().any(|&s| s != 0) {
        // Tail value: V n^(1-E) / (n^r - 1), V the right word read in base n.
        let v = r.iter().fold(BigInt::zero(), |acc, &d| acc * n + d);
        let e = x.end();
        let denom = BigInt::from(big_pow(n, r.len() as u64)) - 1;
        sum += BigRational::from_integer(v) * rat_pow(n, 1 - e) / BigRational::from_integer(denom);
    }
    Ok(sum)
}

/// The integer with base-`base` digits `w`, most significant first.
pub fn integ(w: &[Sym], base: u64) -> Result<BigUint> {
    if w.is_empty() {
        return Err(Error::arg("integ is defined for nonempty words only"));
    }
    Ok(w.iter().fold(BigUint::zero(), |acc, &d| acc * base + d))
}

fn integ_u128(w: &[Sym], base: u128) -> u128 {
    w.iter().fold(0u128, |acc, &d| acc * base + d as u128)
}

/// `mul^t` on a word; the result is `t` symbols shorter.
pub fn mul_word_power(p: u64, q: u64, w: &[Sym], t: usize) -> Vec<Sym> {
    let n = p * q;
    let mut cur = w.to_vec();
    for _ in 0..t {
        if cur.len() < 2 {
            return Vec::new();
        }
        cur = cur
            .windows(2)
            .map(|ab| mul_digit(p, n, ab[0] as u64, ab[1] as u64) as Sym)
            .collect();
    }
    cur
}

fn word_of(mut v: u128, base: u128, len: usize) -> Vec<Sym> {
    let mut w = vec![0; len];
    for i in (0..len).rev() {
        w[i] = (v % base) as Sym;
        v /= base;
    }
    w
}

/// Result of the exhaustive digit-lemma check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitLemmaReport {
    pub p: u64,
    pub q: u64,
    pub k: usize,
    pub t: usize,
    pub words_checked: u64,
    pub counterexamples: Vec<String>,
    /// Lexicographic inputs verified against the odometer picture: the
    /// image under `mul^t` advances once per `q^t` inputs and wraps.
    pub odometer_verified: u64,
}

/// Default cap on the number of words for [`check_digit_lemmas`].
pub const LEMMA_CAP: u64 = 20_000_000;

/// Check both digit lemmas for every word of length `k`, with the
/// single-step lemma at exponent `t` and the `t`-step lemma.
pub fn check_digit_lemmas(p: u64, q: u64, k: usize, t: usize, cap: u64) -> Result<DigitLemmaReport> {
    let params = MultParams::new(p, q)?;
    if t == 0 {
        return Err(Error::arg("t must be positive"));
    }
    if k < 2 || k < t + 1 {
        return Err(Error::arg(format!("need k >= max(2, t + 1), got k={k}, t={t}")));
    }
    let base = params.base() as u128;
    let total = crate::alphabet::checked_pow(base as usize, k)
        .filter(|&n| n <= cap as u128)
        .ok_or_else(|| Error::cap("digit lemma check", format!("{base}^{k}"), cap))?;
    let qt = (q as u128).pow(t as u32);
    let qt1 = (q as u128).pow(t as u32 - 1);
    let mod_k1 = base.pow(k as u32 - 1);
    let mod_kt = base.pow((k - t) as u32);
    let mut bad = Vec::new();
    let mut odometer = 0u64;
    let mut note = |msg: String| {
        if bad.len() < 20 {
            bad.push(msg);
        }
    };
    for i in 0..total {
        let w1 = word_of(i, base, k);
        let w2 = word_of((i + qt) % total, base, k);
        let m1 = integ_u128(&mul_word_power(p, q, &w1, 1), base);
        let m2 = integ_u128(&mul_word_power(p, q, &w2, 1), base);
        let mt1 = integ_u128(&mul_word_power(p, q, &w1, t), base);
        let mt2 = integ_u128(&mul_word_power(p, q, &w2, t), base);
        if i < qt && m1 >= qt1 {
            note(format!("single step, part 1: w1={w1:?}"));
        }
        if (m1 + qt1) % mod_k1 != m2 % mod_k1 {
            note(format!("single step, part 2: w1={w1:?} w2={w2:?}"));
        }
        if i < qt && mt1 != 0 {
            note(format!("t steps, part 1: w1={w1:?}"));
        }
        if (mt1 + 1) % mod_kt != mt2 % mod_kt {
            note(format!("t steps, part 2: w1={w1:?} w2={w2:?}"));
        }
        if mt1 == (i / qt) % mod_kt {
            odometer += 1;
        } else {
            note(format!("odometer: input {i} maps to {mt1}, expected {}", (i / qt) % mod_kt));
        }
    }
    Ok(DigitLemmaReport {
        p,
        q,
        k,
        t,
        words_checked: total as u64,
        counterexamples: bad,
        odometer_verified: odometer,
    })
}

/// The pair `config(q^n - 1)`, `config(q^n)` together with the cells
/// `Mul^i(x)[-i]`, `Mul^i(y)[-i]` for `0 <= i <= n`.
#[derive(Debug, Clone)]
pub struct WitnessPair {
    pub x: Configuration,
    pub y: Configuration,
    pub trace: Vec<(Sym, Sym)>,
}

impl WitnessPair {
    /// True when the two orbits differ at `-i` for every `i` in the trace.
    pub fn diverges(&self) -> bool {
        self.trace.iter().all(|(a, b)| a != b)
    }
}

pub fn witness_pair(p: u64, q: u64, n: usize) -> Result<WitnessPair> {
    let params = MultParams::new(p, q)?;
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    let base = params.base();
    let qn = BigInt::from(big_pow(q, n as u64));
    let x = config_of(&BigRational::from_integer(&qn - 1), base)?;
    let y = config_of(&BigRational::from_integer(qn), base)?;
    let b = x.disagreement_bounds(&y);
    if b.leftmost != Some(0) || b.rightmost != Some(0) {
        return Err(Error::InvalidConfiguration(
            "witness configurations do not differ exactly at the origin".into(),
        ));
    }
    let ca = make_mult_ca(p, base)?;
    let mut trace = Vec::with_capacity(n + 1);
    let (mut cx, mut cy) = (x.clone(), y.clone());
    for i in 0..=n {
        trace.push((cx.get(-(i as i64)), cy.get(-(i as i64))));
        cx = ca.step(&cx)?;
        cy = ca.step(&cy)?;
    }
    let w = WitnessPair { x, y, trace };
    if !w.diverges() {
        return Err(Error::InvalidConfiguration(format!(
            "witness orbits agree somewhere on the diagonal for p={p}, q={q}, n={n}"
        )));
    }
    Ok(w)
}

/// Suffix substitution test: does some `t` in `[i, n]` and some change of
/// the last `n + 1 - i` digits alter `mul^t(w)[1]`?
fn prefix_sensitive(p: u64, q: u64, n: usize, w: &[Sym], i: usize) -> bool {
    let k = (p * q) as usize;
    let column = |word: &[Sym]| -> Vec<Sym> {
        (i..=n).map(|t| mul_word_power(p, q, &word[..t + 1], t)[0]).collect()
    };
    let reference = column(w);
    let mut alt = w.to_vec();
    let mut od = crate::alphabet::WordOdometer::new(k, n + 1 - i);
    while let Some(v) = od.next_word() {
        alt[i..].copy_from_slice(v);
        if column(&alt) != reference {
            return true;
        }
    }
    false
}

/// `Λ_n^-` on the cylinder of `w` at position 0, for `|w| = n + 1`.
pub fn lambda_minus_word(p: u64, q: u64, n: usize, w: &[Sym]) -> Result<usize> {
    check_word(p, q, n, w)?;
    for i in (0..=n).rev() {
        if prefix_sensitive(p, q, n, w, i) {
            return Ok(i);
        }
    }
    Ok(0)
}

/// Same quantity through the interval criterion: the prefix `u` of length
/// `i` qualifies iff the open interval `(integ(u)(pq)^(n+1-i),
/// (integ(u)+1)(pq)^(n+1-i))` contains a multiple of `q^n`.
pub fn lambda_minus_word_interval(p: u64, q: u64, n: usize, w: &[Sym]) -> Result<usize> {
    check_word(p, q, n, w)?;
    let qn = big_pow(q, n as u64);
    for i in (0..=n).rev() {
        let u = if i == 0 { BigUint::zero() } else { integ(&w[..i], p * q)? };
        let width = big_pow(p * q, (n + 1 - i) as u64);
        let lo = &u * &width;
        let hi = (&u + 1u32) * &width;
        // Multiples of q^n strictly between lo and hi.
        let count = (&hi - 1u32) / &qn - &lo / &qn;
        if !count.is_zero() {
            return Ok(i);
        }
    }
    Ok(0)
}

fn check_word(p: u64, q: u64, n: usize, w: &[Sym]) -> Result<()> {
    let params = MultParams::new(p, q)?;
    if n == 0 {
        return Err(Error::arg("horizon n must be positive"));
    }
    if w.len() != n + 1 {
        return Err(Error::arg(format!("word has length {}, expected n + 1 = {}", w.len(), n + 1)));
    }
    if w.iter().any(|&d| d as u64 >= params.base()) {
        return Err(Error::AlphabetMismatch("digit out of range".into()));
    }
    Ok(())
}

/// Exact partition data behind the average exponent at horizon `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AvgBreakdown {
    pub p: u64,
    pub q: u64,
    pub n: usize,
    /// `|P_n(i)|`: words of length `n + 1` with exponent exactly `i`.
    pub big_p: Vec<BigUint>,
    /// `|p_n(i)|`: words with exponent at least `i`.
    pub small_p: Vec<BigUint>,
    /// `|d_n(i)|`: prefixes of length `i` that are sensitive.
    pub d: Vec<BigUint>,
    pub kappa: usize,
    pub i_n: BigRational,
}

impl AvgBreakdown {
    pub fn normalized(&self) -> f64 {
        rational_to_f64(&self.i_n) / self.n as f64
    }

    pub fn log_pq_p(&self) -> f64 {
        (self.p as f64).ln() / ((self.p * self.q) as f64).ln()
    }

    /// Consistency of the three size families and the partition property.
    pub fn check_invariants(&self) -> Result<()> {
        let base = self.p * self.q;
        let total = big_pow(base, self.n as u64 + 1);
        let sum: BigUint = self.big_p.iter().sum();
        if sum != total {
            return Err(Error::arg("partition sizes do not sum to (pq)^(n+1)"));
        }
        for i in 0..=self.n {
            if self.small_p[i] != big_pow(base, (self.n + 1 - i) as u64) * &self.d[i] {
                return Err(Error::arg(format!("|p_n({i})| != (pq)^(n+1-i) |d_n({i})|")));
            }
            if i < self.kappa && !self.big_p[i].is_zero() {
                return Err(Error::arg(format!("|P_n({i})| is nonzero below kappa")));
            }
        }
        Ok(())
    }
}

/// Exhaustive computation of the partition sizes. A depth-first walk over
/// all words of length `n + 1` maintains the space-time triangle of `mul`
/// incrementally; each prefix learns, from its subtree, whether some
/// later cell of the column `mul^t(w)[1]` takes two values.
pub fn partition_sizes_bruteforce(p: u64, q: u64, n: usize, cap: u64, jobs: usize) -> Result<AvgBreakdown> {
    let params = MultParams::new(p, q)?;
    if n == 0 {
        return Err(Error::arg("horizon n must be positive"));
    }
    let base = params.base() as usize;
    crate::alphabet::checked_pow(base, n + 1)
        .filter(|&t| t <= cap as u128)
        .ok_or_else(|| Error::cap("partition enumeration", format!("{base}^{}", n + 1), cap))?;

    let mut table = vec![0 as Sym; base * base];
    for a in 0..base {
        for b in 0..base {
            table[a * base + b] = mul_digit(p, base as u64, a as u64, b as u64) as Sym;
        }
    }

    let jobs = jobs.clamp(1, base);
    let firsts: Vec<Vec<usize>> = (0..jobs).map(|j| (j..base).step_by(jobs).collect()).collect();
    let results: Vec<Subtree> = std::thread::scope(|s| {
        let handles: Vec<_> = firsts
            .iter()
            .map(|digits| {
                let table = &table;
                s.spawn(move || {
                    let mut acc = Subtree::new(n);
                    for &d in digits {
                        let mut walker = Walker::new(base, n, table);
                        walker.diag[1][0] = d as Sym;
                        let info = walker.visit(1).to_vec();
                        acc.absorb(&walker, &info, d as Sym);
                    }
                    acc
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    // Root node: the empty prefix.
    let mut root = Subtree::new(n);
    for r in &results {
        root.merge(r);
    }
    // Column t = 0 is the first digit itself; with base >= 2 it varies.
    let member = root.info.iter().any(|&v| v == MULTI);
    if member {
        root.d[0] += 1;
        root.hist[0] += root.hist[n + 1];
        root.hist[n + 1] = 0;
    }
    debug_assert_eq!(root.hist[n + 1], 0);

    let big_p: Vec<BigUint> = root.hist[..=n].iter().map(|&c| BigUint::from(c)).collect();
    let d: Vec<BigUint> = root.d.iter().map(|&c| BigUint::from(c)).collect();
    finish(p, q, n, big_p, Some(d))
}

const UNSET: Sym = Sym::MAX;
const MULTI: Sym = Sym::MAX - 1;

fn merge_value(a: Sym, b: Sym) -> Sym {
    if a == UNSET {
        b
    } else if a == MULTI || b == MULTI || a != b {
        if b == UNSET {
            a
        } else {
            MULTI
        }
    } else {
        a
    }
}

/// Aggregated information about the subtrees below the root.
struct Subtree {
    /// Column values `mul^t(w)[1]` for `t in 0..=n` over the subtree.
    info: Vec<Sym>,
    hist: Vec<u64>,
    d: Vec<u64>,
}

impl Subtree {
    fn new(n: usize) -> Self {
        Subtree {
            info: vec![UNSET; n + 1],
            hist: vec![0; n + 2],
            d: vec![0; n + 1],
        }
    }

    fn absorb(&mut self, walker: &Walker, child_info: &[Sym], first: Sym) {
        self.info[0] = merge_value(self.info[0], first);
        for t in 1..self.info.len() {
            self.info[t] = merge_value(self.info[t], child_info[t]);
        }
        for (a, b) in self.hist.iter_mut().zip(&walker.hist[1]) {
            *a += b;
        }
        for (a, b) in self.d.iter_mut().zip(&walker.d) {
            *a += b;
        }
    }

    fn merge(&mut self, other: &Subtree) {
        for t in 0..self.info.len() {
            self.info[t] = merge_value(self.info[t], other.info[t]);
        }
        for (a, b) in self.hist.iter_mut().zip(&other.hist) {
            *a += b;
        }
        for (a, b) in self.d.iter_mut().zip(&other.d) {
            *a += b;
        }
    }
}

struct Walker<'a> {
    k: usize,
    n: usize,
    table: &'a [Sym],
    /// `diag[L][r] = mul^r(w)[L - r]` (1-based) for the prefix of length L.
    diag: Vec<Vec<Sym>>,
    info: Vec<Vec<Sym>>,
    hist: Vec<Vec<u64>>,
    d: Vec<u64>,
}

impl<'a> Walker<'a> {
    fn new(k: usize, n: usize, table: &'a [Sym]) -> Self {
        Walker {
            k,
            n,
            table,
            diag: (0..=n + 1).map(|l| vec![0; l]).collect(),
            info: vec![vec![UNSET; n + 1]; n + 2],
            hist: vec![vec![0; n + 2]; n + 2],
            d: vec![0; n + 1],
        }
    }

    /// Process the prefix of length `l` (its diagonal already set) and
    /// return its column information for `t in l..=n`.
    fn visit(&mut self, l: usize) -> &[Sym] {
        let n = self.n;
        for t in 0..=n {
            self.info[l][t] = UNSET;
        }
        for h in self.hist[l].iter_mut() {
            *h = 0;
        }
        if l == n + 1 {
            self.hist[l][n + 1] = 1;
            return &self.info[l];
        }
        for digit in 0..self.k {
            // Extend the diagonal by one cell: the new prefix has length l+1.
            {
                let (lo, hi) = self.diag.split_at_mut(l + 1);
                let prev = &lo[l];
                let next = &mut hi[0];
                next[0] = digit as Sym;
                for r in 1..=l {
                    next[r] = self.table[prev[r - 1] as usize * self.k + next[r - 1] as usize];
                }
            }
            let c_l = self.diag[l + 1][l];
            self.info[l][l] = merge_value(self.info[l][l], c_l);
            self.visit(l + 1);
            let (lo, hi) = self.info.split_at_mut(l + 1);
            for t in l + 1..=n {
                lo[l][t] = merge_value(lo[l][t], hi[0][t]);
            }
            let (lo, hi) = self.hist.split_at_mut(l + 1);
            for (a, b) in lo[l].iter_mut().zip(&hi[0]) {
                *a += b;
            }
        }
        if self.info[l][l..=n].iter().any(|&v| v == MULTI) {
            self.d[l] += 1;
            self.hist[l][l] += self.hist[l][n + 1];
            self.hist[l][n + 1] = 0;
        }
        &self.info[l]
    }
}

/// Fill in `|p_n(i)|`, `kappa` and `I_n` from `|P_n(i)|`.
fn finish(p: u64, q: u64, n: usize, big_p: Vec<BigUint>, d: Option<Vec<BigUint>>) -> Result<AvgBreakdown> {
    let base = p * q;
    let mut small_p = vec![BigUint::zero(); n + 1];
    let mut acc = BigUint::zero();
    for i in (0..=n).rev() {
        acc += &big_p[i];
        small_p[i] = acc.clone();
    }
    let d = match d {
        Some(d) => d,
        None => (0..=n)
            .map(|i| &small_p[i] / big_pow(base, (n + 1 - i) as u64))
            .collect(),
    };
    let kappa = big_p.iter().position(|c| !c.is_zero()).unwrap_or(n);
    let weighted: BigUint = big_p.iter().enumerate().map(|(i, c)| c * BigUint::from(i)).sum();
    let i_n = BigRational::new(BigInt::from(weighted), BigInt::from(big_pow(base, n as u64 + 1)));
    Ok(AvgBreakdown {
        p,
        q,
        n,
        big_p,
        small_p,
        d,
        kappa,
        i_n,
    })
}

/// Largest `kappa` with `(pq)^(n+1-kappa) > q^n`, by integer comparison.
pub fn kappa(p: u64, q: u64, n: usize) -> usize {
    let qn = big_pow(q, n as u64);
    (0..=n)
        .rev()
        .find(|&k| big_pow(p * q, (n + 1 - k) as u64) > qn)
        .unwrap_or(0)
}

/// `|d_n(i)|` from the two counting cases.
pub fn d_closed_form(p: u64, q: u64, n: usize, i: usize) -> Result<BigUint> {
    MultParams::new(p, q)?;
    if i > n {
        return Err(Error::arg(format!("need 0 <= i <= n, got i={i}, n={n}")));
    }
    let base = p * q;
    let lhs = big_pow(base, (n + 1 - i) as u64);
    let qn = big_pow(q, n as u64);
    match lhs.cmp(&qn) {
        std::cmp::Ordering::Greater => Ok(big_pow(base, i as u64)),
        std::cmp::Ordering::Less => Ok(BigUint::from(base) * big_pow(p, n as u64) - BigUint::from(q) * big_pow(p, i as u64)),
        std::cmp::Ordering::Equal => Err(Error::BoundaryCase(format!(
            "(pq)^(n+1-i) = q^n for p={p}, q={q}, n={n}, i={i}"
        ))),
    }
}

/// Exact `I_n` from the closed form.
pub fn avg_exponent_closed(p: u64, q: u64, n: usize) -> Result<AvgBreakdown> {
    MultParams::new(p, q)?;
    if n == 0 {
        return Err(Error::arg("horizon n must be positive"));
    }
    let base = p * q;
    let kap = kappa(p, q, n);
    let d: Vec<BigUint> = (0..=n).map(|i| d_closed_form(p, q, n, i)).collect::<Result<_>>()?;
    let small_p: Vec<BigUint> = (0..=n)
        .map(|i| big_pow(base, (n + 1 - i) as u64) * &d[i])
        .collect();
    let big_p: Vec<BigUint> = (0..=n)
        .map(|i| if i == n { small_p[n].clone() } else { &small_p[i] - &small_p[i + 1] })
        .collect();
    let mut numer = BigUint::from(kap) * &small_p[kap];
    for sp in &small_p[kap + 1..] {
        numer += sp;
    }
    let i_n = BigRational::new(BigInt::from(numer), BigInt::from(big_pow(base, n as u64 + 1)));
    Ok(AvgBreakdown {
        p,
        q,
        n,
        big_p,
        small_p,
        d,
        kappa: kap,
        i_n,
    })
}

/// `|P_n(i)|` by evaluating the suffix-substitution exponent on every word.
/// Only practical for small `n`; used to cross-check the tree walk.
pub fn partition_sizes_by_words(p: u64, q: u64, n: usize, cap: u64) -> Result<AvgBreakdown> {
    let params = MultParams::new(p, q)?;
    let base = params.base() as usize;
    crate::alphabet::checked_pow(base, n + 1)
        .filter(|&t| t <= cap as u128)
        .ok_or_else(|| Error::cap("partition enumeration", format!("{base}^{}", n + 1), cap))?;
    let mut hist = vec![0u64; n + 1];
    let mut od = crate::alphabet::WordOdometer::new(base, n + 1);
    while let Some(w) = od.next_word() {
        hist[lambda_minus_word(p, q, n, w)?] += 1;
    }
    finish(p, q, n, hist.into_iter().map(BigUint::from).collect(), None)
}
