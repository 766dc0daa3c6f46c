//! Rules, grammars, and static validation of the isometric rewrite
//! conditions: identical shapes (C1), a nonterminal on the left side
//! (C2), and terminal preservation (C3). Connectivity preservation (C4)
//! is dynamic and enforced by the engine at application time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::grid::{Coord, Shape, ShapeError};
use crate::symbol::Symbol;

/// One side of a rewrite rule: a symbol for every cell of its shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleSide {
    shape: Shape,
    symbols: BTreeMap<Coord, Symbol>,
}

impl RuleSide {
    /// Builds a side from its cell map, normalizing coordinates so the
    /// minimum row and column are zero.
    pub fn new(symbols: BTreeMap<Coord, Symbol>) -> Result<RuleSide, ShapeError> {
        let shape = Shape::new(symbols.keys().copied())?;
        let min_row = symbols.keys().map(|c| c.row).min().unwrap();
        let min_col = symbols.keys().map(|c| c.col).min().unwrap();
        let symbols = symbols
            .into_iter()
            .map(|(c, s)| (Coord::new(c.row - min_row, c.col - min_col), s))
            .collect();
        Ok(RuleSide { shape, symbols })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn get(&self, coord: Coord) -> Option<Symbol> {
        self.symbols.get(&coord).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = (Coord, Symbol)> + '_ {
        self.symbols.iter().map(|(&c, &s)| (c, s))
    }

    pub fn nonterminal_count(&self) -> usize {
        self.symbols.values().filter(|s| s.is_nonterminal()).count()
    }
}

impl fmt::Display for RuleSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.symbols.keys().map(|c| c.row).max().unwrap() + 1;
        let cols = self.symbols.keys().map(|c| c.col).max().unwrap() + 1;
        for r in 0..rows {
            if r > 0 {
                write!(f, " / ")?;
            }
            for c in 0..cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                match self.get(Coord::new(r, c)) {
                    Some(s) => write!(f, "{s}")?,
                    None => write!(f, ".")?,
                }
            }
        }
        Ok(())
    }
}

/// The statically checkable rule conditions plus the grammar-level
/// bookkeeping categories a validation report may cite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    Alphabet,
    Structural,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::C1 => write!(f, "C1"),
            Condition::C2 => write!(f, "C2"),
            Condition::C3 => write!(f, "C3"),
            Condition::Alphabet => write!(f, "alphabet"),
            Condition::Structural => write!(f, "structural"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("{0}")]
    Shape(#[from] ShapeError),
    #[error("rule {id} violates {condition}: {detail}")]
    Condition {
        id: String,
        condition: Condition,
        detail: String,
    },
}

/// A shaped rewrite: the cells under alpha's footprint are replaced by
/// beta's. `source_group` is informational provenance (the rule family
/// the alternative was expanded from) and is excluded from equality.
#[derive(Debug, Clone)]
pub struct Rule {
    id: String,
    alpha: RuleSide,
    beta: RuleSide,
    source_group: Option<String>,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.alpha == other.alpha && self.beta == other.beta
    }
}

impl Eq for Rule {}

/// Checks conditions 1-3 on a candidate rule pair. Empty result means
/// the pair is admissible.
pub fn rule_condition_violations(alpha: &RuleSide, beta: &RuleSide) -> Vec<(Condition, String)> {
    let mut out = Vec::new();
    if alpha.shape() != beta.shape() {
        out.push((
            Condition::C1,
            "alpha and beta shapes are not geometrically identical".to_string(),
        ));
    }
    if alpha.nonterminal_count() == 0 {
        out.push((
            Condition::C2,
            "alpha contains no nonterminal symbol".to_string(),
        ));
    }
    for (coord, symbol) in alpha.cells() {
        if symbol.is_terminal() && beta.get(coord) != Some(symbol) {
            out.push((
                Condition::C3,
                format!("terminal {symbol} at {coord} is rewritten"),
            ));
        }
    }
    out
}

impl Rule {
    /// Checked constructor: rejects any violation of conditions 1-3.
    pub fn new(
        id: impl Into<String>,
        alpha: RuleSide,
        beta: RuleSide,
        source_group: Option<String>,
    ) -> Result<Rule, RuleError> {
        let id = id.into();
        if let Some((condition, detail)) = rule_condition_violations(&alpha, &beta).into_iter().next()
        {
            return Err(RuleError::Condition {
                id,
                condition,
                detail,
            });
        }
        Ok(Rule {
            id,
            alpha,
            beta,
            source_group,
        })
    }

    /// Unchecked constructor for building deliberately malformed rules
    /// that validation is expected to report.
    pub fn new_unchecked(
        id: impl Into<String>,
        alpha: RuleSide,
        beta: RuleSide,
        source_group: Option<String>,
    ) -> Rule {
        Rule {
            id: id.into(),
            alpha,
            beta,
            source_group,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn alpha(&self) -> &RuleSide {
        &self.alpha
    }

    pub fn beta(&self) -> &RuleSide {
        &self.beta
    }

    pub fn source_group(&self) -> Option<&str> {
        self.source_group.as_deref()
    }

    /// Context-free in the array sense: alpha holds exactly one
    /// nonterminal and blanks everywhere else.
    pub fn is_context_free(&self) -> bool {
        self.alpha.nonterminal_count() == 1
            && self
                .alpha
                .cells()
                .all(|(_, s)| s.is_nonterminal() || s.is_blank())
    }
}

/// An isometric array grammar: alphabets, start symbol, and the ordered
/// expanded rule list. The blank symbol is implicit and universal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    name: String,
    nonterminals: BTreeSet<char>,
    terminals: BTreeSet<char>,
    start: char,
    rules: Vec<Rule>,
}

impl Grammar {
    /// Assembles a grammar without validating it; run
    /// [`Grammar::validate`] to obtain the full report.
    pub fn new(
        name: impl Into<String>,
        nonterminals: BTreeSet<char>,
        terminals: BTreeSet<char>,
        start: char,
        rules: Vec<Rule>,
    ) -> Grammar {
        Grammar {
            name: name.into(),
            nonterminals,
            terminals,
            start,
            rules,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nonterminals(&self) -> &BTreeSet<char> {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &BTreeSet<char> {
        &self.terminals
    }

    pub fn start(&self) -> char {
        self.start
    }

    pub fn start_symbol(&self) -> Symbol {
        Symbol::Nonterminal(self.start)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id() == id)
    }

    /// True when the named symbol is declared in N or T.
    fn declares(&self, symbol: Symbol) -> bool {
        match symbol {
            Symbol::Blank => true,
            Symbol::Terminal(c) => self.terminals.contains(&c),
            Symbol::Nonterminal(c) => self.nonterminals.contains(&c),
        }
    }

    /// Reports every statically checkable violation: conditions 1-3 per
    /// rule, alphabet disjointness, start membership, undeclared
    /// symbols, and duplicate rule ids.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let overlap: Vec<char> = self.nonterminals.intersection(&self.terminals).copied().collect();
        if !overlap.is_empty() {
            violations.push(Violation {
                rule_id: None,
                condition: Condition::Alphabet,
                detail: format!("nonterminal and terminal alphabets overlap: {overlap:?}"),
            });
        }
        if !self.nonterminals.contains(&self.start) {
            violations.push(Violation {
                rule_id: None,
                condition: Condition::Structural,
                detail: format!("start symbol '{}' is not a declared nonterminal", self.start),
            });
        }

        let mut seen_ids = BTreeSet::new();
        for rule in &self.rules {
            if !seen_ids.insert(rule.id().to_string()) {
                violations.push(Violation {
                    rule_id: Some(rule.id().to_string()),
                    condition: Condition::Structural,
                    detail: "duplicate rule id".to_string(),
                });
            }
            for (condition, detail) in rule_condition_violations(rule.alpha(), rule.beta()) {
                violations.push(Violation {
                    rule_id: Some(rule.id().to_string()),
                    condition,
                    detail,
                });
            }
            for (coord, symbol) in rule.alpha().cells().chain(rule.beta().cells()) {
                if !self.declares(symbol) {
                    violations.push(Violation {
                        rule_id: Some(rule.id().to_string()),
                        condition: Condition::Alphabet,
                        detail: format!("undeclared symbol '{symbol}' at {coord}"),
                    });
                }
            }
        }

        ValidationReport { violations }
    }

    /// Equality over alphabets, start and the expanded rule multiset,
    /// ignoring the grammar name and provenance metadata.
    pub fn structurally_equal(&self, other: &Grammar) -> bool {
        fn key(g: &Grammar) -> Vec<&Rule> {
            let mut rules: Vec<&Rule> = g.rules.iter().collect();
            rules.sort_by(|a, b| a.id().cmp(b.id()));
            rules
        }
        self.nonterminals == other.nonterminals
            && self.terminals == other.terminals
            && self.start == other.start
            && key(self) == key(other)
    }
}

/// Header every report carries: condition 4 cannot be checked
/// statically.
pub const C4_DYNAMIC_NOTE: &str =
    "condition 4 (connectivity preservation): dynamic - enforced at application time";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule_id: Option<String>,
    pub condition: Condition,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{C4_DYNAMIC_NOTE}")?;
        if self.violations.is_empty() {
            writeln!(f, "no violations")?;
        }
        for v in &self.violations {
            match &v.rule_id {
                Some(id) => writeln!(f, "{}: [{}] {}", id, v.condition, v.detail)?,
                None => writeln!(f, "grammar: [{}] {}", v.condition, v.detail)?,
            }
        }
        Ok(())
    }
}

/// Builds a rule side from row strings in the grid character
/// convention, with '.' marking cells outside the shape.
pub fn side_from_rows(rows: &[&str]) -> Result<RuleSide, ShapeError> {
    let mut symbols = BTreeMap::new();
    for (r, row) in rows.iter().enumerate() {
        for (c, token) in row.split(' ').filter(|t| !t.is_empty()).enumerate() {
            let ch = token.chars().next().unwrap();
            if ch == '.' {
                continue;
            }
            symbols.insert(Coord::new(r, c), crate::grid::symbol_from_char(ch));
        }
    }
    RuleSide::new(symbols)
}
