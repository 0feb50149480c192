//! Grid encodings of domino systems. The grid forces number restrictions
//! on transitive roles, so the output is outside the decidable fragment
//! by construction.

use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

use super::kb::KbError;
use super::sexpr::{read_all, Sexpr};

/// Tile names with their horizontally and vertically compatible pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DominoSystem {
    pub tiles: Vec<String>,
    pub horizontal: Vec<(String, String)>,
    pub vertical: Vec<(String, String)>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DominoError {
    #[error("a domino system needs at least one tile")]
    NoTiles,
    #[error("unknown tile {0}")]
    UnknownTile(String),
    #[error("duplicate tile {0}")]
    DuplicateTile(String),
    #[error("{0}")]
    Parse(String),
}

impl From<KbError> for DominoError {
    fn from(e: KbError) -> Self {
        DominoError::Parse(e.to_string())
    }
}

/// Reads `(tile NAME ...)`, `(horizontal LEFT RIGHT)` and
/// `(vertical LOWER UPPER)` forms.
pub fn parse_domino_system(text: &str) -> Result<DominoSystem, DominoError> {
    let mut sys = DominoSystem::default();
    for item in read_all(text).map_err(KbError::from)? {
        let bad = || DominoError::Parse(format!("{}: expected (tile NAME ...), (horizontal A B) or (vertical A B)", item.pos()));
        let Sexpr::List(items, _) = &item else { return Err(bad()) };
        let names: Option<Vec<String>> = items.iter().map(|e| e.as_atom().map(str::to_string)).collect();
        let Some(names) = names else { return Err(bad()) };
        match names.split_first() {
            Some((head, rest)) if head == "tile" && !rest.is_empty() => sys.tiles.extend(rest.iter().cloned()),
            Some((head, [a, b])) if head == "horizontal" => sys.horizontal.push((a.clone(), b.clone())),
            Some((head, [a, b])) if head == "vertical" => sys.vertical.push((a.clone(), b.clone())),
            _ => return Err(bad()),
        }
    }
    Ok(sys)
}

fn or_text(names: &[String]) -> String {
    match names {
        [] => "bottom".to_string(),
        [one] => one.clone(),
        _ => format!("(or {})", names.join(" ")),
    }
}

/// The grid axioms over `A`, `B`, `C`, `D`, the role hierarchy with
/// transitive `Sij`, tile coverage and the tile compatibility axioms, as
/// knowledge-base text ending in `(sat A)`.
pub fn domino_gen(sys: &DominoSystem) -> Result<String, DominoError> {
    if sys.tiles.is_empty() {
        return Err(DominoError::NoTiles);
    }
    let mut seen = BTreeSet::new();
    for t in &sys.tiles {
        if !seen.insert(t.as_str()) {
            return Err(DominoError::DuplicateTile(t.clone()));
        }
        if t.starts_with('$') || t.contains(|c: char| c.is_whitespace() || c == '(' || c == ')' || c == ';') {
            return Err(DominoError::Parse(format!("tile name {t:?} is not an identifier")));
        }
    }
    for (a, b) in sys.horizontal.iter().chain(&sys.vertical) {
        for t in [a, b] {
            if !seen.contains(t.as_str()) {
                return Err(DominoError::UnknownTile(t.clone()));
            }
        }
    }
    let concept = |t: &str| format!("tile-{t}");
    let mut out = String::from("; grid\n(transitive S11 S12 S21 S22)\n");
    for (r, sups) in [("X1", ["S11", "S12"]), ("X2", ["S21", "S22"]), ("Y1", ["S11", "S21"]), ("Y2", ["S12", "S22"])] {
        for s in sups {
            let _ = writeln!(out, "(implies-role {r} {s})");
        }
    }
    let grid = [
        ("A", "X1", "B", "Y1", "C", "S11"),
        ("B", "X2", "A", "Y1", "D", "S21"),
        ("C", "X1", "D", "Y2", "A", "S12"),
        ("D", "X2", "C", "Y2", "B", "S22"),
    ];
    for (p, x, xs, y, ys, s) in grid {
        let others: Vec<String> = ["A", "B", "C", "D"]
            .iter()
            .filter(|&&q| q != p)
            .map(|q| format!("(not {q})"))
            .collect();
        let _ = writeln!(
            out,
            "(implies {p} (and {} (some {x} {xs}) (some {y} {ys}) (at-most 3 {s})))",
            others.join(" ")
        );
    }
    let all: Vec<String> = sys.tiles.iter().map(|t| concept(t)).collect();
    out.push_str("; every point carries a tile\n");
    let _ = writeln!(out, "(implies (or A B C D) {})", or_text(&all));
    out.push_str("; at most one tile per point, and neighbours must match\n");
    for t in &sys.tiles {
        let right: Vec<String> = sys.horizontal.iter().filter(|(a, _)| a == t).map(|(_, b)| concept(b)).collect();
        let up: Vec<String> = sys.vertical.iter().filter(|(a, _)| a == t).map(|(_, b)| concept(b)).collect();
        let mut parts: Vec<String> = sys.tiles.iter().filter(|u| *u != t).map(|u| format!("(not {})", concept(u))).collect();
        for x in ["X1", "X2"] {
            parts.push(format!("(all {x} {})", or_text(&right)));
        }
        for y in ["Y1", "Y2"] {
            parts.push(format!("(all {y} {})", or_text(&up)));
        }
        let _ = writeln!(out, "(implies {} (and {}))", concept(t), parts.join(" "));
    }
    out.push_str("(sat A)\n");
    Ok(out)
}
