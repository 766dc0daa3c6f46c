//! Rectangular grids over symbols, coordinates, connectivity testing and
//! the normalized cell shapes used by rewrite rules.
//!
//! Grids are value-semantic: engine operations clone and return new grids
//! rather than mutating shared state.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::symbol::Symbol;

/// A zero-based (row, col) position inside a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub fn new(row: usize, col: usize) -> Self {
        Coord { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Which neighbors count as adjacent: the four edge neighbors, or the
/// eight edge and corner neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }

    pub fn as_number(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

impl Serialize for Connectivity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_number())
    }
}

fn adjacent(a: Coord, b: Coord, connectivity: Connectivity) -> bool {
    let dr = a.row.abs_diff(b.row);
    let dc = a.col.abs_diff(b.col);
    match connectivity {
        Connectivity::Four => dr + dc == 1,
        Connectivity::Eight => dr <= 1 && dc <= 1 && (dr, dc) != (0, 0),
    }
}

/// True iff the set is empty, a singleton, or one component under the
/// chosen adjacency. The empty set counts as connected so that checks
/// stay total from the initial blank-surrounded form onward.
pub fn is_connected(coords: &BTreeSet<Coord>, connectivity: Connectivity) -> bool {
    let mut iter = coords.iter();
    let first = match iter.next() {
        Some(c) => *c,
        None => return true,
    };
    let mut seen = BTreeSet::new();
    seen.insert(first);
    let mut frontier = vec![first];
    while let Some(c) = frontier.pop() {
        for &other in coords {
            if !seen.contains(&other) && adjacent(c, other, connectivity) {
                seen.insert(other);
                frontier.push(other);
            }
        }
    }
    seen.len() == coords.len()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("grid dimensions must be at least 1x1, got {rows}x{cols}")]
    EmptyDimension { rows: usize, cols: usize },
    #[error("coordinate {coord} out of bounds for {rows}x{cols} grid")]
    OutOfBounds { coord: Coord, rows: usize, cols: usize },
    #[error("grid parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A fixed-size rectangular window of symbols. The dimensions never
/// change over the grid's lifetime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Symbol>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, fill: Symbol) -> Result<Grid, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::EmptyDimension { rows, cols });
        }
        Ok(Grid {
            rows,
            cols,
            cells: vec![fill; rows * cols],
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn in_bounds(&self, coord: Coord) -> bool {
        coord.row < self.rows && coord.col < self.cols
    }

    pub fn get(&self, coord: Coord) -> Option<Symbol> {
        if self.in_bounds(coord) {
            Some(self.cells[coord.row * self.cols + coord.col])
        } else {
            None
        }
    }

    pub fn set(&mut self, coord: Coord, symbol: Symbol) -> Result<(), GridError> {
        if !self.in_bounds(coord) {
            return Err(GridError::OutOfBounds {
                coord,
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.cells[coord.row * self.cols + coord.col] = symbol;
        Ok(())
    }

    /// Row-major iteration over every coordinate of the window.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        let cols = self.cols;
        (0..self.rows).flat_map(move |r| (0..cols).map(move |c| Coord::new(r, c)))
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Coord, Symbol)> + '_ {
        self.coords().map(|c| (c, self.get(c).unwrap()))
    }

    /// The non-blank cells: the host array whose connectivity the
    /// dynamic rewrite condition guards.
    pub fn support(&self) -> BTreeSet<Coord> {
        self.symbols()
            .filter(|(_, s)| !s.is_blank())
            .map(|(c, _)| c)
            .collect()
    }

    pub fn has_nonterminal(&self) -> bool {
        self.cells.iter().any(|s| s.is_nonterminal())
    }

    pub fn has_blank(&self) -> bool {
        self.cells.iter().any(|s| s.is_blank())
    }

    /// Parse the grid text format: one line per row, cells separated by
    /// single spaces; `#` is blank, uppercase letters are nonterminals,
    /// any other single printable character is a terminal.
    pub fn parse(text: &str) -> Result<Grid, GridError> {
        let mut rows: Vec<Vec<Symbol>> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for token in line.split(' ').filter(|t| !t.is_empty()) {
                let mut chars = token.chars();
                let ch = chars.next().unwrap();
                if chars.next().is_some() {
                    return Err(GridError::Parse {
                        line: idx + 1,
                        message: format!("cell '{token}' is not a single character"),
                    });
                }
                row.push(symbol_from_char(ch));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(GridError::Parse {
                line: 1,
                message: "empty grid".into(),
            });
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(GridError::Parse {
                line: 1,
                message: "ragged rows: all rows must have the same number of cells".into(),
            });
        }
        Ok(Grid {
            rows: rows.len(),
            cols,
            cells: rows.into_iter().flatten().collect(),
        })
    }
}

/// Character convention of the grid text format.
pub fn symbol_from_char(ch: char) -> Symbol {
    if ch == '#' {
        Symbol::Blank
    } else if ch.is_ascii_uppercase() {
        Symbol::Nonterminal(ch)
    } else {
        Symbol::Terminal(ch)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(Coord::new(r, c)).unwrap())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A nonempty, normalized set of cells: the footprint a rule side
/// occupies. Normalization keeps the minimum row and column at zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    coords: BTreeSet<Coord>,
}

impl Shape {
    pub fn new(coords: impl IntoIterator<Item = Coord>) -> Result<Shape, ShapeError> {
        let raw: BTreeSet<Coord> = coords.into_iter().collect();
        if raw.is_empty() {
            return Err(ShapeError::Empty);
        }
        let min_row = raw.iter().map(|c| c.row).min().unwrap();
        let min_col = raw.iter().map(|c| c.col).min().unwrap();
        let coords = raw
            .into_iter()
            .map(|c| Coord::new(c.row - min_row, c.col - min_col))
            .collect();
        Ok(Shape { coords })
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        self.coords.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, coord: Coord) -> bool {
        self.coords.contains(&coord)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("a shape must contain at least one cell")]
    Empty,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(pairs: &[(usize, usize)]) -> BTreeSet<Coord> {
        pairs.iter().map(|&(r, c)| Coord::new(r, c)).collect()
    }

    #[test]
    fn new_grid_fills_uniformly() {
        let g = Grid::new(1, 1, Symbol::Blank).unwrap();
        assert_eq!(g.get(Coord::new(0, 0)), Some(Symbol::Blank));

        let g = Grid::new(2, 3, Symbol::Terminal('a')).unwrap();
        assert_eq!(g.symbols().count(), 6);
        assert!(g.symbols().all(|(_, s)| s == Symbol::Terminal('a')));
    }

    #[test]
    fn new_grid_rejects_empty_dimensions() {
        assert!(matches!(
            Grid::new(0, 3, Symbol::Blank),
            Err(GridError::EmptyDimension { .. })
        ));
        assert!(matches!(
            Grid::new(3, 0, Symbol::Blank),
            Err(GridError::EmptyDimension { .. })
        ));
    }

    #[test]
    fn support_of_blank_grid_is_empty() {
        let g = Grid::new(3, 3, Symbol::Blank).unwrap();
        assert!(g.support().is_empty());
    }

    #[test]
    fn support_of_single_nonterminal() {
        let g = Grid::parse("S # #").unwrap();
        assert_eq!(g.support(), coords(&[(0, 0)]));
    }

    #[test]
    fn support_of_full_form() {
        let g = Grid::parse("b b a\nb a b\nb b A").unwrap();
        assert_eq!(g.support().len(), 9);
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&coords(&[(0, 0), (1, 1)]), Connectivity::Eight));
        assert!(!is_connected(&coords(&[(0, 0), (1, 1)]), Connectivity::Four));
        assert!(!is_connected(&coords(&[(0, 0), (0, 2)]), Connectivity::Eight));
        assert!(is_connected(&BTreeSet::new(), Connectivity::Eight));
        assert!(is_connected(&coords(&[(2, 2)]), Connectivity::Four));
    }

    #[test]
    fn grid_text_round_trip() {
        let text = "S # #\n# # #\n# # #\n";
        let g = Grid::parse(text).unwrap();
        assert_eq!(g.to_string(), text);
    }

    #[test]
    fn grid_parse_rejects_ragged_rows() {
        assert!(matches!(
            Grid::parse("a b\na"),
            Err(GridError::Parse { .. })
        ));
    }

    #[test]
    fn shape_normalizes() {
        let s = Shape::new([Coord::new(2, 3), Coord::new(2, 4)]).unwrap();
        let got: Vec<Coord> = s.coords().collect();
        assert_eq!(got, vec![Coord::new(0, 0), Coord::new(0, 1)]);
    }

    #[test]
    fn shape_rejects_empty() {
        assert_eq!(Shape::new([]), Err(ShapeError::Empty));
    }
}
