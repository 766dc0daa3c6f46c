//! Terminal-only binary windows: 1 = grain, 0 = non-grain. A pattern's
//! canonical key is its row-major base-2 encoding with cell (0,0) most
//! significant, the identity used by catalogs and censuses.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::grid::{Coord, Grid};
use crate::symbol::Symbol;

/// The largest window a key can encode (keys are u64, sign bit spared).
pub const MAX_KEY_CELLS: usize = 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern dimensions must be at least 1x1, got {rows}x{cols}")]
    EmptyDimension { rows: usize, cols: usize },
    #[error("cell {coord} holds {symbol}, not a terminal a/b symbol")]
    NonTerminalArray { coord: Coord, symbol: Symbol },
    #[error("{rows}x{cols} window exceeds the {MAX_KEY_CELLS}-cell key encoding limit")]
    EncodingOverflow { rows: usize, cols: usize },
    #[error("key {key} out of range for a {rows}x{cols} window")]
    KeyOutOfRange { key: u64, rows: usize, cols: usize },
    #[error("pattern parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A binary pattern on a fixed window.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Pattern {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Pattern, PatternError> {
        if rows == 0 || cols == 0 {
            return Err(PatternError::EmptyDimension { rows, cols });
        }
        assert_eq!(bits.len(), rows * cols, "bit vector must cover the window");
        Ok(Pattern { rows, cols, bits })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, coord: Coord) -> Option<bool> {
        if coord.row < self.rows && coord.col < self.cols {
            Some(self.bits[coord.row * self.cols + coord.col])
        } else {
            None
        }
    }

    /// Coordinates of the grain (1) cells.
    pub fn grains(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.bits[r * self.cols + c] {
                    out.insert(Coord::new(r, c));
                }
            }
        }
        out
    }

    pub fn grain_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Row-major base-2 encoding, cell (0,0) most significant.
    pub fn key(&self) -> Result<u64, PatternError> {
        if self.rows * self.cols > MAX_KEY_CELLS {
            return Err(PatternError::EncodingOverflow {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut key = 0u64;
        for &bit in &self.bits {
            key = (key << 1) | u64::from(bit);
        }
        Ok(key)
    }

    /// Inverse of [`Pattern::key`] for a given window.
    pub fn from_key(key: u64, rows: usize, cols: usize) -> Result<Pattern, PatternError> {
        if rows == 0 || cols == 0 {
            return Err(PatternError::EmptyDimension { rows, cols });
        }
        let n = rows * cols;
        if n > MAX_KEY_CELLS {
            return Err(PatternError::EncodingOverflow { rows, cols });
        }
        if key >> n != 0 {
            return Err(PatternError::KeyOutOfRange { key, rows, cols });
        }
        let bits = (0..n).map(|i| (key >> (n - 1 - i)) & 1 == 1).collect();
        Pattern::new(rows, cols, bits)
    }

    /// Map a fully terminal a/b grid to its binary pattern: a is the
    /// grain (1), b the non-grain (0).
    pub fn from_grid(grid: &Grid) -> Result<Pattern, PatternError> {
        let mut bits = Vec::with_capacity(grid.rows() * grid.cols());
        for (coord, symbol) in grid.symbols() {
            match symbol {
                Symbol::Terminal('a') => bits.push(true),
                Symbol::Terminal('b') => bits.push(false),
                other => {
                    return Err(PatternError::NonTerminalArray {
                        coord,
                        symbol: other,
                    })
                }
            }
        }
        Pattern::new(grid.rows(), grid.cols(), bits)
    }

    /// Inverse of [`Pattern::from_grid`]: 1 becomes terminal a, 0
    /// terminal b.
    pub fn to_grid(&self) -> Grid {
        let mut grid = Grid::new(self.rows, self.cols, Symbol::Terminal('b')).unwrap();
        for coord in self.grains() {
            grid.set(coord, Symbol::Terminal('a')).unwrap();
        }
        grid
    }

    /// Parse the pattern text format: one line per row, no separators,
    /// all characters from {0,1} or all from {a,b}; mixing is rejected.
    pub fn parse(text: &str) -> Result<Pattern, PatternError> {
        let mut rows: Vec<Vec<bool>> = Vec::new();
        let mut alphabet: Option<char> = None; // '0' or 'a', marks the family
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for ch in line.chars() {
                let (family, bit) = match ch {
                    '0' => ('0', false),
                    '1' => ('0', true),
                    'b' => ('a', false),
                    'a' => ('a', true),
                    other => {
                        return Err(PatternError::Parse {
                            line: idx + 1,
                            message: format!("unexpected character '{other}'"),
                        })
                    }
                };
                match alphabet {
                    None => alphabet = Some(family),
                    Some(f) if f != family => {
                        return Err(PatternError::Parse {
                            line: idx + 1,
                            message: "mixed 0/1 and a/b alphabets".into(),
                        })
                    }
                    Some(_) => {}
                }
                row.push(bit);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(PatternError::Parse {
                line: 1,
                message: "empty pattern".into(),
            });
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(PatternError::Parse {
                line: 1,
                message: "ragged rows: all rows must have the same length".into(),
            });
        }
        Pattern::new(rows.len(), cols, rows.into_iter().flatten().collect())
    }

    /// Plain PBM (P1) rendering, 1 = grain = black.
    pub fn to_pbm(&self) -> String {
        let mut out = format!("P1\n{} {}\n", self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    out.push(' ');
                }
                out.push(if self.bits[r * self.cols + c] { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", if self.bits[r * self.cols + c] { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
