//! Wang tiles, determinism, completion and the tile-set automaton.
//!
//! Tile file format:
//!
//! ```text
//! tiles v1
//! colors a b
//! tile t0 a b a b
//! ```
//!
//! Each `tile` line lists the id and the north, east, south and west colors.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::alphabet::{Alphabet, Sym};
use crate::ca::CellularAutomaton;
use crate::config::Configuration;
use crate::error::{Error, Result};

pub type Color = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WangTile {
    pub id: String,
    pub n: Color,
    pub e: Color,
    pub s: Color,
    pub w: Color,
}

impl WangTile {
    pub fn ne(&self) -> (Color, Color) {
        (self.n, self.e)
    }

    pub fn sw(&self) -> (Color, Color) {
        (self.s, self.w)
    }
}

/// A finite set of Wang tiles over a color universe. Colors are kept in
/// lexicographic order of their names so color indices are canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileSet {
    colors: Vec<String>,
    tiles: Vec<WangTile>,
}

impl TileSet {
    /// Build from `(id, [N, E, S, W])` entries. The color universe is the
    /// union of `declared` and all colors used by tiles.
    pub fn new<S: AsRef<str>>(declared: &[S], tiles: &[(S, [S; 4])]) -> Result<Self> {
        let mut names: Vec<String> = declared.iter().map(|c| c.as_ref().to_string()).collect();
        for (_, cs) in tiles {
            names.extend(cs.iter().map(|c| c.as_ref().to_string()));
        }
        names.sort();
        names.dedup();
        let index: HashMap<&str, Color> = names.iter().enumerate().map(|(i, c)| (c.as_str(), i as Color)).collect();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(tiles.len());
        for (id, [n, e, s, w]) in tiles {
            let id = id.as_ref();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(Error::InvalidTiles(format!("bad tile id {id:?}")));
            }
            if !seen.insert(id.to_string()) {
                return Err(Error::InvalidTiles(format!("duplicate tile id {id:?}")));
            }
            out.push(WangTile {
                id: id.to_string(),
                n: index[n.as_ref()],
                e: index[e.as_ref()],
                s: index[s.as_ref()],
                w: index[w.as_ref()],
            });
        }
        Ok(TileSet { colors: names, tiles: out })
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn tiles(&self) -> &[WangTile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn color_name(&self, c: Color) -> &str {
        &self.colors[c as usize]
    }

    pub fn tile(&self, id: &str) -> Option<&WangTile> {
        self.tiles.iter().find(|t| t.id == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.tiles.iter().position(|t| t.id == id)
    }

    /// The tile ids as an alphabet, in tile order.
    pub fn alphabet(&self) -> Result<Alphabet> {
        let ids: Vec<&str> = self.tiles.iter().map(|t| t.id.as_str()).collect();
        Alphabet::new(&ids)
    }

    fn entries(&self) -> Vec<(String, [String; 4])> {
        self.tiles
            .iter()
            .map(|t| {
                (
                    t.id.clone(),
                    [t.n, t.e, t.s, t.w].map(|c| self.colors[c as usize].clone()),
                )
            })
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "tiles v1")) => {}
            Some((n, other)) => return Err(perr(n, format!("expected header 'tiles v1', got {other:?}"))),
            None => return Err(perr(0, "empty tile file".into())),
        }
        let mut colors: Vec<String> = Vec::new();
        let mut entries: Vec<(String, [String; 4])> = Vec::new();
        for (n, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts[0] {
                "colors" => colors.extend(parts[1..].iter().map(|s| s.to_string())),
                "tile" => {
                    if parts.len() != 6 {
                        return Err(perr(n, "tile lines need: tile <id> <N> <E> <S> <W>".into()));
                    }
                    entries.push((
                        parts[1].to_string(),
                        [parts[2], parts[3], parts[4], parts[5]].map(str::to_string),
                    ));
                }
                other => return Err(perr(n, format!("unknown directive {other:?}"))),
            }
        }
        TileSet::new(&colors, &entries)
    }

    pub fn write(&self) -> String {
        let mut out = String::from("tiles v1\n");
        out.push_str(&format!("colors {}\n", self.colors.join(" ")));
        for (id, [n, e, s, w]) in self.entries() {
            out.push_str(&format!("tile {id} {n} {e} {s} {w}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminismReport {
    pub ne: bool,
    pub sw: bool,
    pub two_way: bool,
    /// Two tile ids sharing their north and east colors.
    pub ne_conflict: Option<(String, String)>,
    /// Two tile ids sharing their south and west colors.
    pub sw_conflict: Option<(String, String)>,
}

fn first_conflict(ts: &TileSet, key: impl Fn(&WangTile) -> (Color, Color)) -> Option<(String, String)> {
    let mut seen: HashMap<(Color, Color), &str> = HashMap::new();
    for t in ts.tiles() {
        if let Some(prev) = seen.insert(key(t), &t.id) {
            return Some((prev.to_string(), t.id.clone()));
        }
    }
    None
}

pub fn check_determinism(ts: &TileSet) -> DeterminismReport {
    let ne_conflict = first_conflict(ts, WangTile::ne);
    let sw_conflict = first_conflict(ts, WangTile::sw);
    let (ne, sw) = (ne_conflict.is_none(), sw_conflict.is_none());
    DeterminismReport {
        ne,
        sw,
        two_way: ne && sw,
        ne_conflict,
        sw_conflict,
    }
}

/// True if every color pair is the (N,E) pair of exactly one tile and the
/// (S,W) pair of exactly one tile.
pub fn is_complete(ts: &TileSet) -> bool {
    let c = ts.colors().len();
    check_determinism(ts).two_way && ts.len() == c * c
}

/// Add tiles so that the set becomes complete. Missing (N,E) pairs and
/// missing (S,W) pairs are matched in lexicographic order.
pub fn complete(ts: &TileSet) -> Result<TileSet> {
    let det = check_determinism(ts);
    if !det.two_way {
        return Err(Error::InvalidTiles("tile set is not 2-way deterministic".into()));
    }
    let c = ts.colors().len() as Color;
    let have_ne: HashSet<_> = ts.tiles().iter().map(WangTile::ne).collect();
    let have_sw: HashSet<_> = ts.tiles().iter().map(WangTile::sw).collect();
    let all: Vec<(Color, Color)> = (0..c).flat_map(|a| (0..c).map(move |b| (a, b))).collect();
    let missing_ne: Vec<_> = all.iter().filter(|p| !have_ne.contains(p)).copied().collect();
    let missing_sw: Vec<_> = all.iter().filter(|p| !have_sw.contains(p)).copied().collect();
    debug_assert_eq!(missing_ne.len(), missing_sw.len());
    let used: HashSet<&str> = ts.tiles().iter().map(|t| t.id.as_str()).collect();
    let mut tiles = ts.tiles().to_vec();
    let mut counter = 0usize;
    for (&(n, e), &(s, w)) in missing_ne.iter().zip(&missing_sw) {
        let id = loop {
            let cand = format!("x{counter}");
            counter += 1;
            if !used.contains(cand.as_str()) {
                break cand;
            }
        };
        tiles.push(WangTile { id, n, e, s, w });
    }
    Ok(TileSet {
        colors: ts.colors().to_vec(),
        tiles,
    })
}

/// The radius-½ automaton on tiles: `f(a, b)` is the tile `c` with
/// `c_N = a_S` and `c_E = b_W`.
pub fn ca_from_tileset(ts: &TileSet) -> Result<CellularAutomaton> {
    if !is_complete(ts) {
        return Err(Error::InvalidTiles("tile set is not complete and 2-way deterministic".into()));
    }
    let by_ne: HashMap<(Color, Color), Sym> = ts
        .tiles()
        .iter()
        .enumerate()
        .map(|(i, t)| (t.ne(), i as Sym))
        .collect();
    let tiles = ts.tiles().to_vec();
    CellularAutomaton::from_fn(ts.alphabet()?, 0, 1, |w| {
        let (a, b) = (&tiles[w[0] as usize], &tiles[w[1] as usize]);
        by_ne[&(a.s, b.w)]
    })
}

/// A rectangular patch; `rows[y][x]` with `y = 0` the southernmost row.
/// Cell `(x, y)` sits at plane coordinates `anchor + (x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub anchor: (i64, i64),
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchViolation {
    pub a: (i64, i64),
    pub b: (i64, i64),
    pub detail: String,
}

pub fn check_valid_patch(ts: &TileSet, patch: &Patch) -> Result<Option<PatchViolation>> {
    let lookup = |id: &str| ts.tile(id).ok_or_else(|| Error::InvalidTiles(format!("unknown tile id {id:?}")));
    let (ax, ay) = patch.anchor;
    for row in &patch.rows {
        for id in row {
            lookup(id)?;
        }
    }
    for (y, row) in patch.rows.iter().enumerate() {
        for (x, id) in row.iter().enumerate() {
            let t = lookup(id)?;
            let here = (ax + x as i64, ay + y as i64);
            if let Some(right) = row.get(x + 1) {
                let r = lookup(right)?;
                if t.e != r.w {
                    return Ok(Some(PatchViolation {
                        a: here,
                        b: (here.0 + 1, here.1),
                        detail: format!(
                            "east color {} of {} differs from west color {} of {}",
                            ts.color_name(t.e),
                            t.id,
                            ts.color_name(r.w),
                            r.id
                        ),
                    }));
                }
            }
            if let Some(up) = patch.rows.get(y + 1).and_then(|r| r.get(x)) {
                let u = lookup(up)?;
                if t.n != u.s {
                    return Ok(Some(PatchViolation {
                        a: here,
                        b: (here.0, here.1 + 1),
                        detail: format!(
                            "north color {} of {} differs from south color {} of {}",
                            ts.color_name(t.n),
                            t.id,
                            ts.color_name(u.s),
                            u.id
                        ),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// A spatially periodic configuration whose orbit is temporally periodic
/// and satisfies the diagonal condition.
#[derive(Debug, Clone)]
pub struct ImmortalityWitness {
    pub x: Configuration,
    pub spatial_period: usize,
    pub temporal_period: usize,
}

/// Does the cycle `orbit` (spatial period `p_len`, temporal period
/// `orbit.len()`) satisfy `F^(iq+j)(x)[ip] ∈ B` for all `i` and `0 <= j <= q`?
fn cycle_satisfies(orbit: &[Vec<Sym>], b: &[bool], p: usize, q: usize) -> bool {
    let t_len = orbit.len();
    let p_len = orbit[0].len();
    let l = num_integer::lcm(t_len, p_len);
    (0..l).all(|i| (0..=q).all(|j| b[orbit[(i * q + j) % t_len][(i * p) % p_len] as usize]))
}

fn step_cyclic(ca: &CellularAutomaton, w: &[Sym]) -> Vec<Sym> {
    let len = w.len() as i64;
    let (m, a) = (ca.memory(), ca.anticipation());
    let ext: Vec<Sym> = (m..len + a).map(|i| w[i.rem_euclid(len) as usize]).collect();
    ca.apply_word_unchecked(&ext)
}

/// Bounded search for a `(p, q)`-witness among spatially periodic
/// configurations of period at most `period_cap`. Orbits are followed for at
/// most `time_cap` steps; the witness is taken on the temporal cycle so its
/// whole two-sided orbit is periodic. `None` means nothing was found within
/// the bounds, not that no witness exists.
pub fn search_local_immortality(
    ca: &CellularAutomaton,
    b: &[bool],
    p: usize,
    q: usize,
    period_cap: usize,
    time_cap: usize,
) -> Result<Option<ImmortalityWitness>> {
    let k = ca.alphabet_ref().len();
    if b.len() != k {
        return Err(Error::arg("subset B must have one flag per symbol"));
    }
    if q == 0 || period_cap == 0 || time_cap == 0 {
        return Err(Error::arg("q, period cap and time cap must be positive"));
    }
    let ca = ca.tabulated()?;
    for period in 1..=period_cap {
        let mut od = crate::alphabet::WordOdometer::new(k, period);
        while let Some(w) = od.next_word() {
            // Only cells in B can appear on the diagonal at time 0.
            if !b[w[0] as usize] {
                continue;
            }
            let mut seen: HashMap<Vec<Sym>, usize> = HashMap::new();
            let mut orbit: Vec<Vec<Sym>> = Vec::new();
            let mut cur = w.to_vec();
            for t in 0..=time_cap {
                if let Some(&t0) = seen.get(&cur) {
                    let cycle = &orbit[t0..];
                    // Try every point of the cycle as time 0.
                    for start in 0..cycle.len() {
                        let rotated: Vec<Vec<Sym>> =
                            cycle[start..].iter().chain(&cycle[..start]).cloned().collect();
                        if cycle_satisfies(&rotated, b, p, q) {
                            return Ok(Some(ImmortalityWitness {
                                x: Configuration::periodic(rotated[0].clone())?,
                                spatial_period: period,
                                temporal_period: cycle.len(),
                            }));
                        }
                    }
                    break;
                }
                seen.insert(cur.clone(), t);
                orbit.push(cur.clone());
                cur = step_cyclic(&ca, &cur);
            }
        }
    }
    Ok(None)
}

/// Check the witness condition directly on configurations for `i` in
/// `0..i_max`, using forward iterates only.
pub fn verify_witness_forward(ca: &CellularAutomaton, x: &Configuration, b: &[bool], p: usize, q: usize, i_max: usize) -> Result<bool> {
    let steps = i_max * q + q;
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(x.clone());
    for _ in 0..steps {
        let next = ca.step(orbit.last().unwrap())?;
        orbit.push(next);
    }
    Ok((0..i_max).all(|i| (0..=q).all(|j| b[orbit[i * q + j].get((i * p) as i64) as usize])))
}

/// A random 2-way deterministic tile set: a random partial injection from
/// (N,E) pairs to (S,W) pairs over `colors` colors.
pub fn random_two_way(rng: &mut impl Rng, colors: usize, tiles: usize) -> TileSet {
    let names: Vec<String> = (0..colors).map(|i| format!("c{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..colors).flat_map(|a| (0..colors).map(move |b| (a, b))).collect();
    let count = tiles.min(pairs.len());
    let ne: Vec<_> = pairs.choose_multiple(rng, count).copied().collect();
    let sw: Vec<_> = pairs.choose_multiple(rng, count).copied().collect();
    let entries: Vec<(String, [String; 4])> = ne
        .iter()
        .zip(&sw)
        .enumerate()
        .map(|(i, (&(n, e), &(s, w)))| {
            (
                format!("t{i}"),
                [n, e, s, w].map(|c| names[c].clone()),
            )
        })
        .collect();
    TileSet::new(&names, &entries).expect("generated tile set is well formed")
}
