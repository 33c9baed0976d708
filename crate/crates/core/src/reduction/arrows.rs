//! Arrow tiles and the radius-½ automaton whose local immortality encodes
//! the tiling problem of a 2-way deterministic tile set.

use crate::alphabet::{Alphabet, Sym};
use crate::ca::CellularAutomaton;
use crate::error::{Error, Result};
use crate::tiles::{ca_from_tileset, check_determinism, complete, TileSet};

/// Arrow tiles. Every edge has color `0` or `1`; `1` means an arrow
/// crosses the edge. Horizontal arrows point west and vertical arrows
/// point south, so a single flag per edge is enough for heads and tails
/// to line up.
///
/// | set | id       | N | E | S | W | picture                    |
/// |-----|----------|---|---|---|---|----------------------------|
/// | T1  | `blank`  | 0 | 0 | 0 | 0 | empty                      |
/// | T1  | `west`   | 0 | 1 | 0 | 1 | arrow east to west         |
/// | T1  | `south`  | 1 | 0 | 1 | 0 | arrow north to south       |
/// | T1  | `cross`  | 1 | 1 | 1 | 1 | both arrows                |
/// | T2  | `emit`   | 0 | 0 | 0 | 1 | arrow from center to west  |
/// | T2  | `bend`   | 0 | 1 | 1 | 1 | east to west, center south |
/// | T2  | `drop`   | 1 | 0 | 1 | 0 | arrow north to south       |
/// | T2  | `absorb` | 1 | 1 | 0 | 0 | east and north into center |
#[derive(Debug, Clone)]
pub struct ArrowTileSets {
    pub t1: TileSet,
    pub t2: TileSet,
}

impl ArrowTileSets {
    /// Id of the blank tile in `t1`.
    pub const BLANK: &'static str = "blank";
}

pub fn build_arrow_tilesets() -> ArrowTileSets {
    let t1 = TileSet::new(
        &["0", "1"],
        &[
            ("blank", ["0", "0", "0", "0"]),
            ("west", ["0", "1", "0", "1"]),
            ("south", ["1", "0", "1", "0"]),
            ("cross", ["1", "1", "1", "1"]),
        ],
    )
    .expect("fixed tiles");
    let t2 = TileSet::new(
        &["0", "1"],
        &[
            ("emit", ["0", "0", "0", "1"]),
            ("bend", ["0", "1", "1", "1"]),
            ("drop", ["1", "0", "1", "0"]),
            ("absorb", ["1", "1", "0", "0"]),
        ],
    )
    .expect("fixed tiles");
    ArrowTileSets { t1, t2 }
}

/// The automaton `F = H ∘ J ∘ G` on `A1 × {0,1,2}` together with the set
/// `B` and its ingredients.
#[derive(Debug, Clone)]
pub struct ImmortalityReduction {
    /// `(T × T1) ∪ (T^c × T2)`; tile ids are `tile.arrow`.
    pub a1: TileSet,
    /// `arrow[s]` is true for arrow tiles of `a1`.
    pub arrow: Vec<bool>,
    pub g1: CellularAutomaton,
    pub g: CellularAutomaton,
    pub j1: CellularAutomaton,
    pub j2: CellularAutomaton,
    pub h: CellularAutomaton,
    pub f: CellularAutomaton,
    /// Membership flags over the alphabet of `f`.
    pub b: Vec<bool>,
}

impl ImmortalityReduction {
    pub fn alphabet(&self) -> &Alphabet {
        self.f.alphabet_ref()
    }

    /// Symbol of `f` for tile `id` of `a1` and lower value `v`.
    pub fn symbol(&self, id: &str, v: Sym) -> Option<Sym> {
        self.a1.position(id).map(|t| t as Sym * 3 + v)
    }
}

fn j1(v: Sym) -> Sym {
    [0, 2, 1][v as usize]
}

fn j2(a: Sym, b: Sym) -> Sym {
    match (a, b) {
        (0, 2) => 1,
        (1, 2) => 0,
        _ => a,
    }
}

pub fn build_immortality_ca(t: &TileSet) -> Result<ImmortalityReduction> {
    if !check_determinism(t).two_way {
        return Err(Error::InvalidTiles("tile set is not 2-way deterministic".into()));
    }
    let arrows = build_arrow_tilesets();
    let full = complete(t)?;
    let pair = |c: &str, a: &str| format!("{c}:{a}");
    let mut declared = Vec::new();
    for c in t.colors() {
        for a in arrows.t1.colors() {
            declared.push(pair(c, a));
        }
    }
    let mut entries: Vec<(String, [String; 4])> = Vec::new();
    let mut arrow_flags = Vec::new();
    for (i, tile) in full.tiles().iter().enumerate() {
        let original = i < t.len();
        let set = if original { &arrows.t1 } else { &arrows.t2 };
        for at in set.tiles() {
            let cs = [(tile.n, at.n), (tile.e, at.e), (tile.s, at.s), (tile.w, at.w)]
                .map(|(c, a)| pair(full.color_name(c), set.color_name(a)));
            entries.push((format!("{}.{}", tile.id, at.id), cs));
            arrow_flags.push(!(original && at.id == ArrowTileSets::BLANK));
        }
    }
    let a1 = TileSet::new(&declared, &entries)?;
    let g1 = ca_from_tileset(&a1)?;
    let a1_alpha = g1.alphabet_ref().clone();
    let a2 = Alphabet::numeric(3)?;

    let id1 = CellularAutomaton::identity(a1_alpha.clone());
    let g = g1.product(&CellularAutomaton::identity(a2.clone()))?;
    let j1_ca = id1.product(&CellularAutomaton::symbol_map(a2.clone(), (0..3).map(j1).collect())?)?;
    let j2_inner = CellularAutomaton::from_fn(a2.clone(), 0, 1, |w| j2(w[0], w[1]))?;
    let j2_ca = id1.product(&j2_inner)?;
    let alphabet = g.alphabet_ref().clone();
    let n = alphabet.len();
    let h_map: Vec<Sym> = (0..n as Sym)
        .map(|s| {
            let (tile, v) = (s / 3, s % 3);
            if arrow_flags[tile as usize] && v < 2 {
                tile * 3 + (1 - v)
            } else {
                s
            }
        })
        .collect();
    let h = CellularAutomaton::symbol_map(alphabet.clone(), h_map)?;

    // F = H ∘ J ∘ G evaluated directly on the radius-½ window; the layers
    // never mix, so the composite needs no wider neighborhood.
    let f = {
        let (g1, h) = (g1.clone(), h.clone());
        CellularAutomaton::from_fn(alphabet.clone(), 0, 1, move |w| {
            let (c0, c1) = (w[0] / 3, w[1] / 3);
            let top = g1.local_unchecked(&[c0, c1]);
            let low = j2(j1(w[0] % 3), j1(w[1] % 3));
            h.local_unchecked(&[top * 3 + low])
        })?
    };

    let b = (0..n as Sym)
        .map(|s| {
            let (tile, v) = ((s / 3) as usize, s % 3);
            v == 0 && !arrow_flags[tile]
        })
        .collect();
    Ok(ImmortalityReduction {
        a1,
        arrow: arrow_flags,
        g1,
        g,
        j1: j1_ca,
        j2: j2_ca,
        h,
        f,
        b,
    })
}
