use crate::alphabet::{Alphabet, Sym};
use crate::ca::GlobalMap;
use crate::config::Configuration;
use crate::error::Result;

/// The orbit `x, F(x), ..., F^n(x)`; row `t` is time `t`.
#[derive(Debug, Clone)]
pub struct SpaceTimeDiagram {
    pub rows: Vec<Configuration>,
}

const GLYPHS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

impl SpaceTimeDiagram {
    pub fn compute(map: &dyn GlobalMap, x: &Configuration, steps: usize) -> Result<Self> {
        Ok(SpaceTimeDiagram {
            rows: map.orbit(x, steps)?,
        })
    }

    pub fn steps(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// Cell `(t, i)`.
    pub fn at(&self, t: usize, i: i64) -> Sym {
        self.rows[t].get(i)
    }

    /// One text line per time step covering positions `lo..=hi`, time
    /// flowing downward. Single-character symbol names are used as-is;
    /// otherwise symbols are drawn by index and a legend is appended.
    pub fn render(&self, alphabet: &Alphabet, lo: i64, hi: i64) -> String {
        let direct = alphabet.single_char();
        let glyph = |s: Sym| -> char {
            if direct {
                alphabet.name(s).chars().next().unwrap()
            } else {
                GLYPHS.get(s as usize).map(|&b| b as char).unwrap_or('?')
            }
        };
        let mut out = String::new();
        for (t, row) in self.rows.iter().enumerate() {
            out.push_str(&format!("{t:>4} "));
            out.extend((lo..=hi).map(|i| glyph(row.get(i))));
            out.push('\n');
        }
        if !direct {
            out.push_str("legend:");
            for s in alphabet.symbols().take(GLYPHS.len()) {
                out.push_str(&format!(" {}={}", glyph(s), alphabet.name(s)));
            }
            out.push('\n');
        }
        out
    }
}
