use std::collections::{HashMap, VecDeque};

use crate::alphabet::{checked_pow, Sym, WordOdometer};
use crate::ca::{CellularAutomaton, TABLE_CAP};
use crate::config::Configuration;
use crate::error::{Error, Result};

/// Outcome of a decision procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// A resource cap was hit before the question was settled.
    Undecided(String),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Two distinct configurations with the same image.
    Collision { x: Configuration, y: Configuration },
    /// A finite word with no preimage.
    Orphan(Vec<Sym>),
    /// A free-form explanation, used for composite arguments.
    Note(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionResult {
    pub property: String,
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
}

/// A deterministic automaton describing a sofic subshift: a bi-infinite
/// sequence is allowed iff it labels a bi-infinite path.
#[derive(Debug, Clone)]
pub struct SoficConstraint {
    /// `delta[state][symbol]`.
    pub delta: Vec<Vec<Option<u8>>>,
}

impl SoficConstraint {
    pub fn full(alphabet_len: usize) -> Self {
        SoficConstraint {
            delta: vec![vec![Some(0); alphabet_len]],
        }
    }

    /// Sequences containing at most one symbol from `marked`.
    pub fn at_most_one(alphabet_len: usize, marked: &[bool]) -> Self {
        let mut delta = vec![vec![None; alphabet_len]; 2];
        for s in 0..alphabet_len {
            if marked[s] {
                delta[0][s] = Some(1);
            } else {
                delta[0][s] = Some(0);
                delta[1][s] = Some(1);
            }
        }
        SoficConstraint { delta }
    }

    pub fn states(&self) -> usize {
        self.delta.len()
    }

    fn run(&self, from: u8, word: &[Sym]) -> Option<u8> {
        let mut s = from;
        for &c in word {
            s = self.delta[s as usize][c as usize]?;
        }
        Some(s)
    }
}

const NODE_CAP: usize = 20_000_000;

/// One side of the pair graph: the last `K` symbols plus a constraint state.
struct SideStates {
    words: Vec<Vec<Sym>>,
    /// `trans[p * k + c] = (next side state, output symbol)`.
    trans: Vec<Option<(u32, Sym)>>,
}

fn side_states(ca: &CellularAutomaton, constraint: &SoficConstraint) -> Result<SideStates> {
    let k = ca.alphabet_ref().len();
    let kk = ca.shrink();
    checked_pow(k, kk)
        .filter(|&n| n * constraint.states() as u128 <= NODE_CAP as u128)
        .ok_or_else(|| Error::cap("pair graph", format!("{k}^{kk} words"), NODE_CAP))?;
    let mut words = Vec::new();
    let mut states = Vec::new();
    let mut index: HashMap<(Vec<Sym>, u8), u32> = HashMap::new();
    let mut od = WordOdometer::new(k, kk);
    while let Some(w) = od.next_word() {
        for st in 0..constraint.states() as u8 {
            // Keep only pairs (word, state) that some path can produce.
            let reachable = (0..constraint.states() as u8).any(|s0| constraint.run(s0, w) == Some(st));
            if reachable {
                index.insert((w.to_vec(), st), words.len() as u32);
                words.push(w.to_vec());
                states.push(st);
            }
        }
    }
    let mut trans = vec![None; words.len() * k];
    let mut buf = Vec::with_capacity(kk + 1);
    for p in 0..words.len() {
        for c in 0..k as Sym {
            let Some(ns) = constraint.delta[states[p] as usize][c as usize] else {
                continue;
            };
            buf.clear();
            buf.extend_from_slice(&words[p]);
            buf.push(c);
            let out = ca.local_unchecked(&buf);
            if let Some(&q) = index.get(&(buf[1..].to_vec(), ns)) {
                trans[p * k + c as usize] = Some((q, out));
            }
        }
    }
    Ok(SideStates { words, trans })
}

/// Neighborhoods of width 1 give an empty node word; widen so that every
/// node remembers at least one symbol.
fn with_memory(ca: &CellularAutomaton) -> Result<CellularAutomaton> {
    if ca.width() == 1 {
        ca.widen(ca.memory(), ca.anticipation() + 1)
    } else {
        Ok(ca.clone())
    }
}

struct PairGraph {
    n1: usize,
    succ: Vec<Vec<u32>>,
}

fn pair_graph(side: &SideStates, k: usize) -> Result<PairGraph> {
    let n1 = side.words.len();
    if n1.saturating_mul(n1) > NODE_CAP {
        return Err(Error::cap("pair graph", n1 * n1, NODE_CAP));
    }
    let mut succ = vec![Vec::new(); n1 * n1];
    // Group each side's moves by output symbol.
    let mut by_out: Vec<HashMap<Sym, Vec<(Sym, u32)>>> = vec![HashMap::new(); n1];
    for p in 0..n1 {
        for c in 0..k {
            if let Some((q, o)) = side.trans[p * k + c] {
                by_out[p].entry(o).or_default().push((c as Sym, q));
            }
        }
    }
    for p in 0..n1 {
        for q in 0..n1 {
            let node = p * n1 + q;
            for (o, moves_p) in &by_out[p] {
                if let Some(moves_q) = by_out[q].get(o) {
                    for &(_, p2) in moves_p {
                        for &(_, q2) in moves_q {
                            succ[node].push(p2 * n1 as u32 + q2);
                        }
                    }
                }
            }
        }
    }
    Ok(PairGraph { n1, succ })
}

/// Remove nodes without predecessors or without successors until stable.
/// What remains is exactly the set of nodes on bi-infinite paths.
fn prune(succ: &[Vec<u32>]) -> (Vec<bool>, Vec<Vec<u32>>) {
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (u, vs) in succ.iter().enumerate() {
        for &v in vs {
            pred[v as usize].push(u as u32);
        }
    }
    let mut outdeg: Vec<usize> = succ.iter().map(Vec::len).collect();
    let mut indeg: Vec<usize> = pred.iter().map(Vec::len).collect();
    let mut alive = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&u| outdeg[u] == 0 || indeg[u] == 0).collect();
    while let Some(u) = queue.pop_front() {
        if !alive[u] {
            continue;
        }
        alive[u] = false;
        for &v in &succ[u] {
            let v = v as usize;
            indeg[v] -= 1;
            if alive[v] && indeg[v] == 0 {
                queue.push_back(v);
            }
        }
        for &w in &pred[u] {
            let w = w as usize;
            outdeg[w] -= 1;
            if alive[w] && outdeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    (alive, pred)
}

/// Decide injectivity of `F` on the full shift, or on a sofic subshift
/// when `constraint` is given. A negative answer carries two distinct
/// eventually periodic configurations with equal images.
pub fn is_injective(ca: &CellularAutomaton, constraint: Option<&SoficConstraint>) -> Result<DecisionResult> {
    let ca = with_memory(ca)?.tabulated()?;
    let k = ca.alphabet_ref().len();
    let full = SoficConstraint::full(k);
    let constraint = constraint.unwrap_or(&full);
    if constraint.delta.iter().any(|row| row.len() != k) {
        return Err(Error::AlphabetMismatch("constraint alphabet differs from automaton".into()));
    }
    let side = match side_states(&ca, constraint) {
        Ok(s) => s,
        Err(Error::CapExceeded { what, needed, cap }) => return Ok(undecided("injective", what, needed, cap)),
        Err(e) => return Err(e),
    };
    let graph = match pair_graph(&side, k) {
        Ok(g) => g,
        Err(Error::CapExceeded { what, needed, cap }) => return Ok(undecided("injective", what, needed, cap)),
        Err(e) => return Err(e),
    };
    let (alive, pred) = prune(&graph.succ);
    let n1 = graph.n1;
    let off = (0..alive.len()).find(|&v| alive[v] && side.words[v / n1] != side.words[v % n1]);
    let Some(start) = off else {
        return Ok(DecisionResult {
            property: "injective".into(),
            verdict: Verdict::Yes,
            certificate: None,
        });
    };
    let (x, y) = collision_from(&graph, &side, &pred, &alive, start)?;
    Ok(DecisionResult {
        property: "injective".into(),
        verdict: Verdict::No,
        certificate: Some(Certificate::Collision { x, y }),
    })
}

fn undecided(property: &str, what: String, needed: String, cap: String) -> DecisionResult {
    DecisionResult {
        property: property.into(),
        verdict: Verdict::Undecided(format!("cap: {what} needs {needed} > {cap}")),
        certificate: None,
    }
}

/// Walk backward and forward from an off-diagonal node until both walks
/// close a cycle. The node sequence `L^∞ T R^∞` spells two eventually
/// periodic configurations: each node contributes the last symbol of its
/// remembered word.
fn collision_from(
    graph: &PairGraph,
    side: &SideStates,
    pred: &[Vec<u32>],
    alive: &[bool],
    start: usize,
) -> Result<(Configuration, Configuration)> {
    let walk = |next: &dyn Fn(usize) -> usize| -> (Vec<usize>, usize) {
        let mut path = vec![start];
        let mut seen: HashMap<usize, usize> = HashMap::from([(start, 0)]);
        loop {
            let v = next(*path.last().unwrap());
            path.push(v);
            if let Some(&i) = seen.get(&v) {
                return (path, i);
            }
            seen.insert(v, path.len() - 1);
        }
    };
    let (back, j) = walk(&|u| pred[u].iter().map(|&p| p as usize).find(|&p| alive[p]).unwrap());
    let (fwd, l) = walk(&|u| graph.succ[u].iter().map(|&s| s as usize).find(|&s| alive[s]).unwrap());

    let r = back.len() - 1;
    let left_cycle: Vec<usize> = back[j..r].iter().rev().copied().collect();
    let mut transient: Vec<usize> = back[..j].iter().rev().copied().collect();
    let e = fwd.len() - 1;
    let right_cycle: Vec<usize> = if l == 0 {
        fwd[1..=e].to_vec()
    } else {
        transient.extend_from_slice(&fwd[1..l]);
        fwd[l..e].to_vec()
    };

    let n1 = graph.n1;
    let last = |v: usize, y: bool| -> Sym {
        let w = &side.words[if y { v % n1 } else { v / n1 }];
        *w.last().unwrap()
    };
    let spell = |y: bool| {
        Configuration::new(
            left_cycle.iter().map(|&v| last(v, y)).collect(),
            transient.iter().map(|&v| last(v, y)).collect(),
            right_cycle.iter().map(|&v| last(v, y)).collect(),
        )
    };
    Ok((spell(false)?, spell(true)?))
}

/// Decide surjectivity on the full shift through the Garden of Eden
/// theorem: `F` is onto iff no path in the pair graph leaves the diagonal
/// and comes back. A negative answer carries an orphan word.
pub fn is_surjective(ca: &CellularAutomaton, orphan_cap: usize) -> Result<DecisionResult> {
    let ca = with_memory(ca)?.tabulated()?;
    let k = ca.alphabet_ref().len();
    let full = SoficConstraint::full(k);
    let graph_or = side_states(&ca, &full).and_then(|side| pair_graph(&side, k).map(|g| (side, g)));
    let (side, graph) = match graph_or {
        Ok(v) => v,
        Err(Error::CapExceeded { what, needed, cap }) => return Ok(undecided("surjective", what, needed, cap)),
        Err(e) => return Err(e),
    };
    let n1 = graph.n1;
    let diag = |v: usize| side.words[v / n1] == side.words[v % n1];
    // Off-diagonal nodes entered directly from the diagonal.
    let mut seen = vec![false; graph.succ.len()];
    let mut queue = VecDeque::new();
    for p in 0..n1 {
        let u = p * n1 + p;
        for &v in &graph.succ[u] {
            let v = v as usize;
            if !diag(v) && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    let mut diamond = false;
    while let Some(u) = queue.pop_front() {
        for &v in &graph.succ[u] {
            let v = v as usize;
            if diag(v) {
                diamond = true;
                break;
            }
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        if diamond {
            break;
        }
    }
    if !diamond {
        return Ok(DecisionResult {
            property: "surjective".into(),
            verdict: Verdict::Yes,
            certificate: None,
        });
    }
    let certificate = find_orphan(&ca, orphan_cap)?.map(Certificate::Orphan);
    Ok(DecisionResult {
        property: "surjective".into(),
        verdict: Verdict::No,
        certificate,
    })
}

/// Breadth-first search over sets of possible preimage contexts; the empty
/// set is reached exactly by words without preimage. Returns the shortest
/// orphan, or `None` if more than `cap` subsets were visited.
pub fn find_orphan(ca: &CellularAutomaton, cap: usize) -> Result<Option<Vec<Sym>>> {
    let ca = with_memory(ca)?.tabulated()?;
    let k = ca.alphabet_ref().len();
    let side = side_states(&ca, &SoficConstraint::full(k))?;
    let n = side.words.len();
    let blocks = n.div_ceil(64);
    let mut start = vec![0u64; blocks];
    for i in 0..n {
        start[i / 64] |= 1 << (i % 64);
    }
    let mut parent: HashMap<Vec<u64>, Option<(Vec<u64>, Sym)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(set) = queue.pop_front() {
        for o in 0..k as Sym {
            let mut next = vec![0u64; blocks];
            for p in 0..n {
                if set[p / 64] >> (p % 64) & 1 == 0 {
                    continue;
                }
                for c in 0..k {
                    if let Some((q, out)) = side.trans[p * k + c] {
                        if out == o {
                            next[q as usize / 64] |= 1 << (q % 64);
                        }
                    }
                }
            }
            if parent.contains_key(&next) {
                continue;
            }
            let empty = next.iter().all(|&b| b == 0);
            parent.insert(next.clone(), Some((set.clone(), o)));
            if empty {
                let mut word = Vec::new();
                let mut cur = next;
                while let Some(Some((prev, s))) = parent.get(&cur) {
                    word.push(*s);
                    cur = prev.clone();
                }
                word.reverse();
                return Ok(Some(word));
            }
            if parent.len() > cap {
                return Ok(None);
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}

/// Number of preimages of every word of length `len`. A surjective
/// automaton gives each word exactly `|A|^(a-m)` preimages.
pub fn preimage_counts(ca: &CellularAutomaton, len: usize) -> Result<Vec<u64>> {
    let k = ca.alphabet_ref().len();
    let plen = len + ca.shrink();
    let total = checked_pow(k, plen)
        .filter(|&n| n <= TABLE_CAP)
        .ok_or_else(|| Error::cap("preimage count", format!("{k}^{plen}"), TABLE_CAP))?;
    let _ = total;
    let mut counts = vec![0u64; k.pow(len as u32)];
    let mut od = WordOdometer::new(k, plen);
    while let Some(w) = od.next_word() {
        let img = ca.apply_word_unchecked(w);
        let code = img.iter().fold(0usize, |acc, &s| acc * k + s as usize);
        counts[code] += 1;
    }
    Ok(counts)
}

/// Local rule of the inverse of an injective automaton, searching inverse
/// neighborhoods `[-r, r]` for `r = 0..=radius_cap`. The result is trimmed.
pub fn inverse(ca: &CellularAutomaton, radius_cap: usize) -> Result<CellularAutomaton> {
    let inj = is_injective(ca, None)?;
    match inj.verdict {
        Verdict::Yes => {}
        Verdict::No => return Err(Error::NotInjective),
        Verdict::Undecided(why) => return Err(Error::cap("inverse", why, "pair graph cap")),
    }
    // The preimage window must contain cell 0.
    let ca = ca.tabulated()?.widen(ca.memory().min(0), ca.anticipation().max(0))?;
    let k = ca.alphabet_ref().len();
    for r in 0..=radius_cap {
        let iw = 2 * r + 1;
        let plen = iw + ca.shrink();
        let Some(n) = checked_pow(k, plen).filter(|&n| n <= TABLE_CAP) else {
            break;
        };
        let _ = n;
        // The preimage word covers positions [-r + m, r + a]; cell 0 sits
        // at index r - m.
        let center = (r as i64 - ca.memory()) as usize;
        let mut table: Vec<Option<Sym>> = vec![None; k.pow(iw as u32)];
        let mut ok = true;
        let mut od = WordOdometer::new(k, plen);
        while let Some(w) = od.next_word() {
            let img = ca.apply_word_unchecked(w);
            let code = img.iter().fold(0usize, |acc, &s| acc * k + s as usize);
            match table[code] {
                None => table[code] = Some(w[center]),
                Some(s) if s == w[center] => {}
                Some(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let table = table.into_iter().map(|s| s.unwrap_or(0)).collect();
            let g = CellularAutomaton::from_table(ca.alphabet_ref().clone(), -(r as i64), r as i64, table)?;
            return g.trimmed();
        }
    }
    Err(Error::cap("inverse radius", format!("> {radius_cap}"), radius_cap))
}

/// Exhaustive check that `g ∘ f` fixes every configuration: compares the
/// composed local rule with the identity on all neighborhoods.
pub fn is_left_inverse(g: &CellularAutomaton, f: &CellularAutomaton) -> Result<bool> {
    let gf = g.compose(f)?;
    gf.same_map(&CellularAutomaton::identity(f.alphabet_ref().clone()))
}
