//! Plain-text rule files.
//!
//! ```text
//! ca v1
//! alphabet 0 1
//! memory -1
//! anticipation 1
//! 0 1 1 -> 1
//! default identity
//! ```
//!
//! `default` is either a symbol or `identity` (copy the cell at offset 0).
//! Lines starting with `#` are comments.

use std::collections::HashMap;

use crate::alphabet::{checked_pow, Alphabet, Sym, WordOdometer};
use crate::ca::{CellularAutomaton, TABLE_CAP};
use crate::error::{Error, Result};

enum Default {
    Symbol(Sym),
    Identity,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_rule_file(text: &str) -> Result<CellularAutomaton> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, "ca v1")) => {}
        Some((n, other)) => return Err(perr(n, format!("expected header 'ca v1', got {other:?}"))),
        None => return Err(perr(0, "empty rule file")),
    }

    let mut alphabet: Option<Alphabet> = None;
    let mut memory: Option<i64> = None;
    let mut anticipation: Option<i64> = None;
    let mut default: Option<Default> = None;
    let mut rules: Vec<(usize, Vec<String>, String)> = Vec::new();

    for (n, line) in lines {
        if let Some((lhs, rhs)) = line.split_once("->") {
            let lhs: Vec<String> = lhs.split_whitespace().map(str::to_string).collect();
            let rhs = rhs.trim();
            if rhs.is_empty() || rhs.contains(char::is_whitespace) {
                return Err(perr(n, "rule must map to exactly one symbol"));
            }
            rules.push((n, lhs, rhs.to_string()));
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "alphabet" => {
                let names: Vec<&str> = rest.split_whitespace().collect();
                alphabet = Some(Alphabet::new(&names).map_err(|e| perr(n, e.to_string()))?);
            }
            "memory" => memory = Some(rest.parse().map_err(|_| perr(n, "memory must be an integer"))?),
            "anticipation" => {
                anticipation = Some(rest.parse().map_err(|_| perr(n, "anticipation must be an integer"))?)
            }
            "default" => {
                default = Some(if rest == "identity" {
                    Default::Identity
                } else {
                    let a = alphabet.as_ref().ok_or_else(|| perr(n, "default before alphabet"))?;
                    Default::Symbol(a.sym(rest).map_err(|e| perr(n, e.to_string()))?)
                })
            }
            other => return Err(perr(n, format!("unknown directive {other:?}"))),
        }
    }

    let alphabet = alphabet.ok_or_else(|| perr(0, "missing 'alphabet' line"))?;
    let memory = memory.ok_or_else(|| perr(0, "missing 'memory' line"))?;
    let anticipation = anticipation.ok_or_else(|| perr(0, "missing 'anticipation' line"))?;
    if memory > anticipation {
        return Err(Error::InvalidRule(format!(
            "memory {memory} exceeds anticipation {anticipation}"
        )));
    }
    let width = (anticipation - memory + 1) as usize;
    let k = alphabet.len();
    let size = checked_pow(k, width)
        .filter(|&s| s <= TABLE_CAP)
        .ok_or_else(|| Error::cap("rule table", format!("{k}^{width}"), TABLE_CAP))?;

    let mut explicit: HashMap<usize, Sym> = HashMap::new();
    for (n, lhs, rhs) in rules {
        if lhs.len() != width {
            return Err(perr(n, format!("neighborhood has {} symbols, expected {width}", lhs.len())));
        }
        let mut code = 0usize;
        for s in &lhs {
            code = code * k + alphabet.sym(s).map_err(|e| perr(n, e.to_string()))? as usize;
        }
        let out = alphabet.sym(&rhs).map_err(|e| perr(n, e.to_string()))?;
        if let Some(prev) = explicit.insert(code, out) {
            if prev != out {
                return Err(perr(n, format!("conflicting rule for {}", lhs.join(" "))));
            }
        }
    }

    if matches!(default, Some(Default::Identity)) && !(memory <= 0 && anticipation >= 0) {
        return Err(Error::InvalidRule(
            "default identity needs offset 0 inside the neighborhood".into(),
        ));
    }
    let center = (-memory) as usize;
    let mut table = Vec::with_capacity(size as usize);
    let mut od = WordOdometer::new(k, width);
    let mut code = 0usize;
    while let Some(w) = od.next_word() {
        let v = match (explicit.get(&code), &default) {
            (Some(&v), _) => v,
            (None, Some(Default::Symbol(s))) => *s,
            (None, Some(Default::Identity)) => w[center],
            (None, None) => {
                return Err(perr(
                    text.lines().count(),
                    format!("no rule for neighborhood {} and no default", alphabet.format_word(w)),
                ))
            }
        };
        table.push(v);
        code += 1;
    }
    CellularAutomaton::from_table(alphabet, memory, anticipation, table)
}

/// Canonical serialization: every neighborhood listed in table order.
pub fn write_rule_file(ca: &CellularAutomaton) -> Result<String> {
    let ca = ca.tabulated()?;
    let a = ca.alphabet_ref();
    let mut out = String::from("ca v1\n");
    out.push_str(&format!("alphabet {}\n", a.names().join(" ")));
    out.push_str(&format!("memory {}\n", ca.memory()));
    out.push_str(&format!("anticipation {}\n", ca.anticipation()));
    let table = ca.table().expect("tabulated");
    let mut od = WordOdometer::new(a.len(), ca.width());
    let mut i = 0;
    while let Some(w) = od.next_word() {
        let lhs: Vec<&str> = w.iter().map(|&s| a.name(s)).collect();
        out.push_str(&format!("{} -> {}\n", lhs.join(" "), a.name(table[i])));
        i += 1;
    }
    Ok(out)
}
