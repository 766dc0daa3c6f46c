//! Text format for derivation traces:
//!
//! ```text
//! grammar: cpag
//! window: 3x3
//! start: 0,0
//! step 1: R1b @ (0,0)
//! ...
//! final:
//! b b a
//! b a b
//! b b b
//! ```

use thiserror::Error;

use crate::engine::{DerivationTrace, Placement, StopReason};
use crate::grid::{Coord, Grid};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceParseError {
    #[error("trace parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn err(line: usize, message: impl Into<String>) -> TraceParseError {
    TraceParseError::Parse {
        line,
        message: message.into(),
    }
}

pub fn serialize_trace(trace: &DerivationTrace) -> String {
    let mut out = String::new();
    out.push_str(&format!("grammar: {}\n", trace.grammar_name));
    out.push_str(&format!("window: {}x{}\n", trace.rows, trace.cols));
    out.push_str(&format!(
        "start: {},{}\n",
        trace.start_pos.row, trace.start_pos.col
    ));
    for (i, step) in trace.steps.iter().enumerate() {
        out.push_str(&format!(
            "step {}: {} @ ({},{})\n",
            i + 1,
            step.rule_id,
            step.anchor.row,
            step.anchor.col
        ));
    }
    out.push_str("final:\n");
    out.push_str(&trace.final_grid.to_string());
    out
}

fn parse_coord_pair(text: &str, line: usize) -> Result<Coord, TraceParseError> {
    let (r, c) = text
        .split_once(',')
        .ok_or_else(|| err(line, format!("expected 'row,col', got '{text}'")))?;
    let row = r
        .trim()
        .parse()
        .map_err(|_| err(line, format!("bad row '{r}'")))?;
    let col = c
        .trim()
        .parse()
        .map_err(|_| err(line, format!("bad col '{c}'")))?;
    Ok(Coord::new(row, col))
}

pub fn parse_trace(text: &str) -> Result<DerivationTrace, TraceParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    let mut header = |name: &str| -> Result<(usize, String), TraceParseError> {
        let (n, line) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing '{name}:' header")))?;
        let value = line
            .strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(':'))
            .ok_or_else(|| err(n, format!("expected '{name}: ...'")))?;
        Ok((n, value.trim().to_string()))
    };

    let (_, grammar_name) = header("grammar")?;
    let (wline, window) = header("window")?;
    let (rows_s, cols_s) = window
        .split_once('x')
        .ok_or_else(|| err(wline, format!("expected 'RxC', got '{window}'")))?;
    let rows: usize = rows_s
        .parse()
        .map_err(|_| err(wline, format!("bad row count '{rows_s}'")))?;
    let cols: usize = cols_s
        .parse()
        .map_err(|_| err(wline, format!("bad col count '{cols_s}'")))?;
    let (sline, start) = header("start")?;
    let start_pos = parse_coord_pair(&start, sline)?;

    let mut steps = Vec::new();
    let mut final_lines = Vec::new();
    let mut in_final = false;
    let mut final_line_no = 0;
    for (n, line) in lines {
        if in_final {
            final_lines.push(line);
            continue;
        }
        if line == "final:" {
            in_final = true;
            final_line_no = n;
            continue;
        }
        let rest = line
            .strip_prefix("step ")
            .ok_or_else(|| err(n, format!("expected 'step N: ...' or 'final:', got '{line}'")))?;
        let (num, body) = rest
            .split_once(':')
            .ok_or_else(|| err(n, "expected ':' after step number"))?;
        let num: usize = num
            .trim()
            .parse()
            .map_err(|_| err(n, format!("bad step number '{num}'")))?;
        if num != steps.len() + 1 {
            return Err(err(n, format!("step {num} out of sequence")));
        }
        let (rule_id, anchor) = body
            .split_once('@')
            .ok_or_else(|| err(n, "expected '<rule_id> @ (r,c)'"))?;
        let anchor = anchor.trim();
        let anchor = anchor
            .strip_prefix('(')
            .and_then(|a| a.strip_suffix(')'))
            .ok_or_else(|| err(n, format!("expected '(r,c)', got '{anchor}'")))?;
        steps.push(Placement {
            rule_id: rule_id.trim().to_string(),
            anchor: parse_coord_pair(anchor, n)?,
        });
    }
    if !in_final {
        return Err(err(0, "missing 'final:' section"));
    }
    let final_grid = Grid::parse(&final_lines.join("\n"))
        .map_err(|e| err(final_line_no, e.to_string()))?;
    if final_grid.rows() != rows || final_grid.cols() != cols {
        return Err(err(
            final_line_no,
            format!(
                "final grid is {}x{} but the window is {rows}x{cols}",
                final_grid.rows(),
                final_grid.cols()
            ),
        ));
    }
    let reason = if final_grid.has_nonterminal() {
        StopReason::DeadEnd
    } else {
        StopReason::Terminal
    };
    Ok(DerivationTrace {
        grammar_name,
        rows,
        cols,
        start_pos,
        steps,
        final_grid,
        reason,
    })
}
