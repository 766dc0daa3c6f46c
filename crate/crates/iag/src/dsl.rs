//! The `.iag` grammar text format.
//!
//! Line-oriented, UTF-8; lines starting with `;` are comments. Header
//! directives declare the alphabets and start symbol:
//!
//! ```text
//! @grammar cpag
//! @nonterminals S A
//! @terminals a b
//! @start S
//! @blank #
//! ```
//!
//! Each rule is a block: an `@rule <id>` line, the alpha grid (one line
//! per row, cells separated by single spaces, `.` marking cells outside
//! the rule's shape, `#` the blank), a `=>` line, one or more beta
//! alternative blocks separated by lines containing only `/`, and a
//! terminating `@end`. Alternative k of rule id R gets expanded id
//! `R<k>` unless only one alternative exists. The `.`-masks of alpha
//! and every beta alternative must be identical; that is the textual
//! encoding of the shape-identity condition.
//!
//! Parsing is total: every failure is a positioned diagnostic, never a
//! crash.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::grammar::{Condition, Grammar, Rule, RuleError, RuleSide};
use crate::grid::Coord;
use crate::symbol::Symbol;

/// A 1-based position in the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourcePos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// What a diagnostic is about, when it maps to a named condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticTag {
    C1,
    C2,
    C3,
    Alphabet,
    Syntax,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub pos: SourcePos,
    pub severity: Severity,
    pub message: String,
    pub condition: Option<DiagnosticTag>,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}: {}", self.pos, self.message)
    }
}

/// A successfully parsed grammar plus any non-fatal warnings.
#[derive(Debug, Clone)]
pub struct ParsedGrammar {
    pub grammar: Grammar,
    pub warnings: Vec<ParseDiagnostic>,
}

struct Diagnostics {
    items: Vec<ParseDiagnostic>,
}

impl Diagnostics {
    fn new() -> Self {
        Diagnostics { items: Vec::new() }
    }

    fn error(&mut self, line: usize, col: usize, tag: Option<DiagnosticTag>, msg: impl Into<String>) {
        self.items.push(ParseDiagnostic {
            pos: SourcePos {
                line: line.max(1),
                col: col.max(1),
            },
            severity: Severity::Error,
            message: msg.into(),
            condition: tag,
        });
    }

    fn warn(&mut self, line: usize, col: usize, msg: impl Into<String>) {
        self.items.push(ParseDiagnostic {
            pos: SourcePos {
                line: line.max(1),
                col: col.max(1),
            },
            severity: Severity::Warning,
            message: msg.into(),
            condition: None,
        });
    }

    fn has_errors(&self) -> bool {
        self.items.iter().any(|d| d.severity == Severity::Error)
    }
}

/// One raw rule block before symbol resolution.
struct RawRule {
    id: String,
    line: usize,
    alpha: Vec<(usize, String)>,
    alts: Vec<Vec<(usize, String)>>,
}

/// Space-separated tokens of a line with 1-based column positions.
fn tokens(line: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    for (i, ch) in line.chars().enumerate() {
        if ch == ' ' {
            if !current.is_empty() {
                out.push((start + 1, std::mem::take(&mut current)));
            }
        } else {
            if current.is_empty() {
                start = i;
            }
            current.push(ch);
        }
    }
    if !current.is_empty() {
        out.push((start + 1, current));
    }
    out
}

/// Parses a grammar from text. On success the grammar passes static
/// validation with zero violations; on failure at least one error
/// diagnostic carries a position inside the input.
pub fn parse_grammar(text: &str) -> Result<ParsedGrammar, Vec<ParseDiagnostic>> {
    parse_grammar_with_mode(text, true)
}

/// Lenient variant for auditing: rules violating the nonterminal (C2)
/// or terminal-preservation (C3) conditions are kept in the grammar so
/// validation can report them per rule. Shape and alphabet problems are
/// still parse errors.
pub fn parse_grammar_lenient(text: &str) -> Result<ParsedGrammar, Vec<ParseDiagnostic>> {
    parse_grammar_with_mode(text, false)
}

fn parse_grammar_with_mode(text: &str, strict: bool) -> Result<ParsedGrammar, Vec<ParseDiagnostic>> {
    let mut diags = Diagnostics::new();

    let mut name: Option<String> = None;
    let mut nonterminals: BTreeSet<char> = BTreeSet::new();
    let mut terminals: BTreeSet<char> = BTreeSet::new();
    let mut start: Option<(char, usize)> = None;
    let mut nonterminal_lines: Vec<(char, usize, usize)> = Vec::new();
    let mut raw_rules: Vec<RawRule> = Vec::new();

    enum State {
        Top,
        Alpha,
        Beta,
    }
    let mut state = State::Top;

    let parse_charset = |line_no: usize,
                             rest: &str,
                             set: &mut BTreeSet<char>,
                             diags: &mut Diagnostics,
                             record: &mut dyn FnMut(char, usize, usize)| {
        for (col, token) in tokens(rest) {
            let mut chars = token.chars();
            let ch = chars.next().unwrap();
            if chars.next().is_some() {
                diags.error(
                    line_no,
                    col,
                    Some(DiagnosticTag::Syntax),
                    format!("symbol '{token}' is not a single character"),
                );
                continue;
            }
            if ch == '#' || ch == '.' {
                diags.error(
                    line_no,
                    col,
                    Some(DiagnosticTag::Alphabet),
                    format!("'{ch}' is reserved and cannot be declared"),
                );
                continue;
            }
            if !set.insert(ch) {
                diags.warn(line_no, col, format!("symbol '{ch}' declared twice"));
            }
            record(ch, line_no, col);
        }
    };

    let mut total_lines = 0;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        total_lines = line_no;
        let line = raw_line.trim_end_matches('\r').trim_end();
        if line.trim_start().starts_with(';') || line.is_empty() {
            continue;
        }

        if let Some(rest) = line.strip_prefix('@') {
            let (directive, arg) = match rest.split_once(' ') {
                Some((d, a)) => (d, a.trim()),
                None => (rest, ""),
            };
            match directive {
                "grammar" => {
                    if arg.is_empty() {
                        diags.error(line_no, 1, Some(DiagnosticTag::Syntax), "missing grammar name");
                    } else {
                        name = Some(arg.to_string());
                    }
                }
                "nonterminals" => {
                    let offset = "@nonterminals ".chars().count();
                    parse_charset(
                        line_no,
                        arg,
                        &mut nonterminals,
                        &mut diags,
                        &mut |ch, line, col| nonterminal_lines.push((ch, line, col + offset)),
                    );
                }
                "terminals" => {
                    parse_charset(line_no, arg, &mut terminals, &mut diags, &mut |_, _, _| {});
                }
                "start" => {
                    let mut chars = arg.chars();
                    match (chars.next(), chars.next()) {
                        (Some(ch), None) => start = Some((ch, line_no)),
                        _ => diags.error(
                            line_no,
                            1,
                            Some(DiagnosticTag::Syntax),
                            format!("start symbol '{arg}' is not a single character"),
                        ),
                    }
                }
                "blank" => {
                    if arg != "#" {
                        diags.error(
                            line_no,
                            1,
                            Some(DiagnosticTag::Syntax),
                            format!("the blank symbol must be '#', got '{arg}'"),
                        );
                    }
                }
                "rule" => {
                    if !matches!(state, State::Top) {
                        diags.error(
                            line_no,
                            1,
                            Some(DiagnosticTag::Syntax),
                            "previous rule block not terminated with '@end'",
                        );
                    }
                    if arg.is_empty() {
                        diags.error(line_no, 1, Some(DiagnosticTag::Syntax), "missing rule id");
                    }
                    raw_rules.push(RawRule {
                        id: arg.to_string(),
                        line: line_no,
                        alpha: Vec::new(),
                        alts: Vec::new(),
                    });
                    state = State::Alpha;
                }
                "end" => match state {
                    State::Top => diags.error(
                        line_no,
                        1,
                        Some(DiagnosticTag::Syntax),
                        "'@end' outside a rule block",
                    ),
                    State::Alpha => {
                        diags.error(
                            line_no,
                            1,
                            Some(DiagnosticTag::Syntax),
                            "rule block ended before '=>'",
                        );
                        state = State::Top;
                    }
                    State::Beta => state = State::Top,
                },
                other => {
                    diags.error(
                        line_no,
                        1,
                        Some(DiagnosticTag::Syntax),
                        format!("unknown directive '@{other}'"),
                    );
                }
            }
            continue;
        }

        match state {
            State::Top => diags.error(
                line_no,
                1,
                Some(DiagnosticTag::Syntax),
                format!("expected a directive, got '{line}'"),
            ),
            State::Alpha => {
                if line == "=>" {
                    let rule = raw_rules.last_mut().unwrap();
                    if rule.alpha.is_empty() {
                        diags.error(
                            line_no,
                            1,
                            Some(DiagnosticTag::Syntax),
                            "rule has an empty alpha block",
                        );
                    }
                    rule.alts.push(Vec::new());
                    state = State::Beta;
                } else {
                    raw_rules
                        .last_mut()
                        .unwrap()
                        .alpha
                        .push((line_no, line.to_string()));
                }
            }
            State::Beta => {
                let rule = raw_rules.last_mut().unwrap();
                if line == "/" {
                    rule.alts.push(Vec::new());
                } else {
                    rule.alts.last_mut().unwrap().push((line_no, line.to_string()));
                }
            }
        }
    }
    if !matches!(state, State::Top) {
        diags.error(
            total_lines,
            1,
            Some(DiagnosticTag::Syntax),
            "unterminated rule block at end of input",
        );
    }

    // Header-level checks.
    let name = name.unwrap_or_else(|| {
        diags.warn(1, 1, "missing '@grammar' directive; using name 'unnamed'");
        "unnamed".to_string()
    });
    let start_char = match start {
        Some((ch, line)) => {
            if !nonterminals.contains(&ch) {
                diags.error(
                    line,
                    1,
                    Some(DiagnosticTag::Alphabet),
                    format!("start symbol '{ch}' is not a declared nonterminal"),
                );
            }
            ch
        }
        None => {
            diags.error(1, 1, Some(DiagnosticTag::Syntax), "missing '@start' directive");
            'S'
        }
    };
    for ch in nonterminals.intersection(&terminals) {
        diags.error(
            1,
            1,
            Some(DiagnosticTag::Alphabet),
            format!("symbol '{ch}' declared both nonterminal and terminal"),
        );
    }
    for &(ch, line, col) in &nonterminal_lines {
        if ch.is_lowercase() {
            diags.warn(line, col, format!("nonterminal '{ch}' is lowercase"));
        }
    }
    if raw_rules.is_empty() {
        diags.warn(1, 1, "no rules");
    }

    // Resolve rule blocks into expanded rules.
    let resolve_block = |block: &[(usize, String)],
                             diags: &mut Diagnostics|
     -> (BTreeSet<Coord>, BTreeMap<Coord, Symbol>) {
        let mut mask = BTreeSet::new();
        let mut cells = BTreeMap::new();
        for (r, (line_no, row)) in block.iter().enumerate() {
            for (c, (col, token)) in tokens(row).into_iter().enumerate() {
                let mut chars = token.chars();
                let ch = chars.next().unwrap();
                if chars.next().is_some() {
                    diags.error(
                        *line_no,
                        col,
                        Some(DiagnosticTag::Syntax),
                        format!("cell '{token}' is not a single character"),
                    );
                    continue;
                }
                if ch == '.' {
                    continue;
                }
                let coord = Coord::new(r, c);
                mask.insert(coord);
                let symbol = if ch == '#' {
                    Symbol::Blank
                } else if nonterminals.contains(&ch) {
                    Symbol::Nonterminal(ch)
                } else if terminals.contains(&ch) {
                    Symbol::Terminal(ch)
                } else {
                    diags.error(
                        *line_no,
                        col,
                        Some(DiagnosticTag::Alphabet),
                        format!("undeclared symbol '{ch}'"),
                    );
                    continue;
                };
                cells.insert(coord, symbol);
            }
        }
        (mask, cells)
    };

    let mut rules: Vec<Rule> = Vec::new();
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();
    for raw in &raw_rules {
        let before_errors = diags.items.len();
        let (alpha_mask, alpha_cells) = resolve_block(&raw.alpha, &mut diags);
        if alpha_mask.is_empty() {
            diags.error(
                raw.line,
                1,
                Some(DiagnosticTag::Syntax),
                format!("rule '{}' has an empty alpha shape", raw.id),
            );
            continue;
        }
        let multi = raw.alts.len() > 1;
        for (k, alt) in raw.alts.iter().enumerate() {
            let alt_first_line = alt.first().map(|(l, _)| *l).unwrap_or(raw.line);
            let (beta_mask, beta_cells) = resolve_block(alt, &mut diags);
            if beta_mask != alpha_mask {
                diags.error(
                    alt_first_line,
                    1,
                    Some(DiagnosticTag::C1),
                    format!(
                        "beta alternative {} of rule '{}' does not occupy the same cells as alpha",
                        k + 1,
                        raw.id
                    ),
                );
                continue;
            }
            if diags.items.len() > before_errors
                && diags.items[before_errors..]
                    .iter()
                    .any(|d| d.severity == Severity::Error)
            {
                // Symbol-level errors already reported for this block;
                // don't cascade into rule construction.
                continue;
            }
            let expanded_id = if multi {
                format!("{}{}", raw.id, k + 1)
            } else {
                raw.id.clone()
            };
            if !seen_ids.insert(expanded_id.clone()) {
                diags.error(
                    raw.line,
                    1,
                    Some(DiagnosticTag::Syntax),
                    format!("duplicate rule id '{expanded_id}'"),
                );
                continue;
            }
            let alpha = match RuleSide::new(alpha_cells.clone()) {
                Ok(side) => side,
                Err(e) => {
                    diags.error(raw.line, 1, Some(DiagnosticTag::Syntax), e.to_string());
                    continue;
                }
            };
            let beta = match RuleSide::new(beta_cells) {
                Ok(side) => side,
                Err(e) => {
                    diags.error(alt_first_line, 1, Some(DiagnosticTag::Syntax), e.to_string());
                    continue;
                }
            };
            let source_group = multi.then(|| raw.id.clone());
            match Rule::new(expanded_id.clone(), alpha.clone(), beta.clone(), source_group.clone()) {
                Ok(rule) => rules.push(rule),
                Err(RuleError::Condition { condition, detail, .. }) => {
                    if !strict && matches!(condition, Condition::C2 | Condition::C3) {
                        rules.push(Rule::new_unchecked(expanded_id, alpha, beta, source_group));
                        continue;
                    }
                    let tag = match condition {
                        Condition::C1 => DiagnosticTag::C1,
                        Condition::C2 => DiagnosticTag::C2,
                        Condition::C3 => DiagnosticTag::C3,
                        _ => DiagnosticTag::Syntax,
                    };
                    diags.error(alt_first_line, 1, Some(tag), detail);
                }
                Err(e) => diags.error(raw.line, 1, Some(DiagnosticTag::Syntax), e.to_string()),
            }
        }
    }

    if diags.has_errors() {
        return Err(diags.items);
    }
    let grammar = Grammar::new(name, nonterminals, terminals, start_char, rules);
    debug_assert!(!strict || grammar.validate().is_valid());
    Ok(ParsedGrammar {
        grammar,
        warnings: diags.items,
    })
}

fn render_side(side: &RuleSide, out: &mut String) {
    let rows = side.cells().map(|(c, _)| c.row).max().unwrap() + 1;
    let cols = side.cells().map(|(c, _)| c.col).max().unwrap() + 1;
    for r in 0..rows {
        for c in 0..cols {
            if c > 0 {
                out.push(' ');
            }
            match side.get(Coord::new(r, c)) {
                Some(Symbol::Blank) => out.push('#'),
                Some(s) => out.push(s.name().unwrap()),
                None => out.push('.'),
            }
        }
        out.push('\n');
    }
}

/// Serializes a grammar so that re-parsing yields a structurally equal
/// grammar. Every expanded rule becomes its own single-alternative
/// block, keeping rule ids stable.
pub fn serialize_grammar(grammar: &Grammar) -> String {
    let mut out = String::new();
    out.push_str(&format!("@grammar {}\n", grammar.name()));
    out.push_str("@nonterminals");
    for ch in grammar.nonterminals() {
        out.push(' ');
        out.push(*ch);
    }
    out.push('\n');
    out.push_str("@terminals");
    for ch in grammar.terminals() {
        out.push(' ');
        out.push(*ch);
    }
    out.push('\n');
    out.push_str(&format!("@start {}\n", grammar.start()));
    out.push_str("@blank #\n");
    for rule in grammar.rules() {
        out.push('\n');
        out.push_str(&format!("@rule {}\n", rule.id()));
        render_side(rule.alpha(), &mut out);
        out.push_str("=>\n");
        render_side(rule.beta(), &mut out);
        out.push_str("@end\n");
    }
    out
}
