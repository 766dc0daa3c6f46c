//! Rule matching and application over sentential forms, with the
//! dynamic connectivity condition enforced on every step, plus seeded
//! random derivation and trace replay.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grammar::{Grammar, Rule};
use crate::grid::{is_connected, Connectivity, Coord, Grid};
use crate::symbol::Symbol;

/// A rule fired at an anchor: the window coordinate the rule shape's
/// normalized origin is translated to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub rule_id: String,
    pub anchor: Coord,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.rule_id, self.anchor)
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub connectivity: Connectivity,
    pub enforce_c4: bool,
    /// Step budget for random derivation; `None` means 4 * rows * cols.
    pub max_steps: Option<usize>,
    pub rng_seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            connectivity: Connectivity::Eight,
            enforce_c4: true,
            max_steps: None,
            rng_seed: 0,
        }
    }
}

impl EngineConfig {
    fn step_budget(&self, rows: usize, cols: usize) -> usize {
        self.max_steps.unwrap_or(4 * rows * cols).max(1)
    }
}

/// Why a random derivation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// No nonterminal remains in the form.
    Terminal,
    /// A nonterminal remains but no rule application is legal.
    DeadEnd,
    /// The step budget ran out.
    MaxSteps,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::Terminal => write!(f, "terminal form"),
            StopReason::DeadEnd => write!(f, "no applicable rule"),
            StopReason::MaxSteps => write!(f, "step limit reached"),
        }
    }
}

/// A replayable derivation: the initial form is determined by the
/// window, start position and grammar; `steps` applied in order must
/// reproduce `final_grid`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTrace {
    pub grammar_name: String,
    pub rows: usize,
    pub cols: usize,
    pub start_pos: Coord,
    pub steps: Vec<Placement>,
    pub final_grid: Grid,
    pub reason: StopReason,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("start position {start} out of bounds for {rows}x{cols} window")]
    StartOutOfBounds { start: Coord, rows: usize, cols: usize },
    #[error("window dimensions must be at least 1x1, got {rows}x{cols}")]
    EmptyWindow { rows: usize, cols: usize },
    #[error("unknown rule id '{0}'")]
    UnknownRule(String),
    #[error("rule {rule_id} does not match at {anchor}")]
    MatchError { rule_id: String, anchor: Coord },
    #[error("rule {rule_id} at {anchor} would disconnect the host array")]
    C4Rejection { rule_id: String, anchor: Coord },
    #[error("replay step {index} is illegal: {detail}")]
    ReplayStep { index: usize, detail: String },
    #[error("replayed final grid does not match the trace's recorded final grid")]
    ReplayFinalMismatch,
}

/// The start symbol at `start_pos`, blanks everywhere else.
pub fn initial_form(
    rows: usize,
    cols: usize,
    start_pos: Coord,
    grammar: &Grammar,
) -> Result<Grid, EngineError> {
    let mut grid =
        Grid::new(rows, cols, Symbol::Blank).map_err(|_| EngineError::EmptyWindow { rows, cols })?;
    grid.set(start_pos, grammar.start_symbol())
        .map_err(|_| EngineError::StartOutOfBounds {
            start: start_pos,
            rows,
            cols,
        })?;
    Ok(grid)
}

fn matches_at(grid: &Grid, rule: &Rule, anchor: Coord) -> bool {
    rule.alpha().cells().all(|(offset, expected)| {
        let coord = Coord::new(anchor.row + offset.row, anchor.col + offset.col);
        grid.get(coord) == Some(expected)
    })
}

/// All anchors where the rule's alpha side matches exactly (blank
/// matches only blank), in row-major anchor order. Rules must fit
/// entirely inside the window; there is no implicit blank plane outside
/// it.
pub fn matches(grid: &Grid, rule: &Rule) -> Vec<Placement> {
    grid.coords()
        .filter(|&anchor| matches_at(grid, rule, anchor))
        .map(|anchor| Placement {
            rule_id: rule.id().to_string(),
            anchor,
        })
        .collect()
}

fn apply_unchecked(grid: &Grid, rule: &Rule, anchor: Coord) -> Grid {
    let mut next = grid.clone();
    for (offset, symbol) in rule.beta().cells() {
        let coord = Coord::new(anchor.row + offset.row, anchor.col + offset.col);
        next.set(coord, symbol).expect("matched placement is in bounds");
    }
    debug_assert_eq!((next.rows(), next.cols()), (grid.rows(), grid.cols()));
    next
}

/// Applies a placement, rejecting non-matching placements and (when
/// enforcement is on) applications that disconnect the non-blank
/// support. On rejection the input grid is untouched.
pub fn apply(
    grid: &Grid,
    placement: &Placement,
    grammar: &Grammar,
    config: &EngineConfig,
) -> Result<Grid, EngineError> {
    let rule = grammar
        .rule(&placement.rule_id)
        .ok_or_else(|| EngineError::UnknownRule(placement.rule_id.clone()))?;
    if !matches_at(grid, rule, placement.anchor) {
        return Err(EngineError::MatchError {
            rule_id: placement.rule_id.clone(),
            anchor: placement.anchor,
        });
    }
    let next = apply_unchecked(grid, rule, placement.anchor);
    if config.enforce_c4 && !is_connected(&next.support(), config.connectivity) {
        return Err(EngineError::C4Rejection {
            rule_id: placement.rule_id.clone(),
            anchor: placement.anchor,
        });
    }
    Ok(next)
}

/// Every legal application together with its resulting grid, ordered by
/// (rule id, row-major anchor). Applications that would violate the
/// connectivity condition are filtered out here, so a dead end means no
/// rule matches at all.
pub fn legal_applications(
    grid: &Grid,
    grammar: &Grammar,
    config: &EngineConfig,
) -> Vec<(Placement, Grid)> {
    let mut rules: Vec<&Rule> = grammar.rules().iter().collect();
    rules.sort_by(|a, b| a.id().cmp(b.id()));
    let mut out = Vec::new();
    for rule in rules {
        for placement in matches(grid, rule) {
            let next = apply_unchecked(grid, rule, placement.anchor);
            if config.enforce_c4 && !is_connected(&next.support(), config.connectivity) {
                continue;
            }
            out.push((placement, next));
        }
    }
    out
}

/// The legal move set without result grids.
pub fn legal_moves(grid: &Grid, grammar: &Grammar, config: &EngineConfig) -> Vec<Placement> {
    legal_applications(grid, grammar, config)
        .into_iter()
        .map(|(p, _)| p)
        .collect()
}

/// Derives by repeatedly choosing uniformly (seeded) among the legal
/// applications until no nonterminal remains, no move is legal, or the
/// step budget runs out. Identical seeds give identical traces.
pub fn derive_random(
    grammar: &Grammar,
    rows: usize,
    cols: usize,
    start_pos: Coord,
    config: &EngineConfig,
) -> Result<DerivationTrace, EngineError> {
    let mut grid = initial_form(rows, cols, start_pos, grammar)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let budget = config.step_budget(rows, cols);
    let mut steps = Vec::new();
    let reason = loop {
        if !grid.has_nonterminal() {
            break StopReason::Terminal;
        }
        if steps.len() >= budget {
            break StopReason::MaxSteps;
        }
        let options = legal_applications(&grid, grammar, config);
        if options.is_empty() {
            break StopReason::DeadEnd;
        }
        let (placement, next) = options[rng.gen_range(0..options.len())].clone();
        steps.push(placement);
        grid = next;
    };
    Ok(DerivationTrace {
        grammar_name: grammar.name().to_string(),
        rows,
        cols,
        start_pos,
        steps,
        final_grid: grid,
        reason,
    })
}

/// Re-applies every step of a trace, verifying legality, and returns
/// every form from the initial one to the final one (steps + 1 grids).
/// The last form must equal the trace's recorded final grid.
pub fn replay_forms(
    grammar: &Grammar,
    trace: &DerivationTrace,
    config: &EngineConfig,
) -> Result<Vec<Grid>, EngineError> {
    let mut grid = initial_form(trace.rows, trace.cols, trace.start_pos, grammar)?;
    let mut forms = vec![grid.clone()];
    for (index, placement) in trace.steps.iter().enumerate() {
        grid = apply(&grid, placement, grammar, config).map_err(|e| EngineError::ReplayStep {
            index,
            detail: e.to_string(),
        })?;
        forms.push(grid.clone());
    }
    if grid != trace.final_grid {
        return Err(EngineError::ReplayFinalMismatch);
    }
    Ok(forms)
}

/// Replays a trace and returns the final grid.
pub fn replay(
    grammar: &Grammar,
    trace: &DerivationTrace,
    config: &EngineConfig,
) -> Result<Grid, EngineError> {
    Ok(replay_forms(grammar, trace, config)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpag::builtin_cpag;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn initial_form_examples() {
        let g = builtin_cpag();
        let grid = initial_form(3, 3, Coord::new(0, 0), &g).unwrap();
        assert_eq!(grid.to_string(), "S # #\n# # #\n# # #\n");
        let grid = initial_form(1, 1, Coord::new(0, 0), &g).unwrap();
        assert_eq!(grid.to_string(), "S\n");
        assert!(matches!(
            initial_form(3, 3, Coord::new(3, 0), &g),
            Err(EngineError::StartOutOfBounds { .. })
        ));
    }

    #[test]
    fn matches_examples() {
        let g = builtin_cpag();
        let grid = Grid::parse("S # #").unwrap();
        let placements = matches(&grid, g.rule("R1a").unwrap());
        assert_eq!(
            placements,
            vec![Placement {
                rule_id: "R1a".into(),
                anchor: Coord::new(0, 0)
            }]
        );

        let grid = Grid::parse("b A").unwrap();
        assert!(matches(&grid, g.rule("R1a").unwrap()).is_empty());

        // A at the right edge: R4a's blank cell would fall outside the window.
        let grid = Grid::parse("a A").unwrap();
        assert!(matches(&grid, g.rule("R4a").unwrap()).is_empty());
    }

    #[test]
    fn apply_first_derivation_step() {
        let g = builtin_cpag();
        let grid = initial_form(3, 3, Coord::new(0, 0), &g).unwrap();
        let next = apply(
            &grid,
            &Placement {
                rule_id: "R1b".into(),
                anchor: Coord::new(0, 0),
            },
            &g,
            &cfg(),
        )
        .unwrap();
        assert_eq!(next.to_string(), "b A #\n# # #\n# # #\n");
    }

    #[test]
    fn apply_fills_last_cell() {
        let g = builtin_cpag();
        let grid = Grid::parse("b b a\nb a b\nb A #").unwrap();
        let next = apply(
            &grid,
            &Placement {
                rule_id: "R4b".into(),
                anchor: Coord::new(2, 1),
            },
            &g,
            &cfg(),
        )
        .unwrap();
        assert_eq!(next.to_string(), "b b a\nb a b\nb b A\n");
    }

    #[test]
    fn blank_writing_rule_is_rejected_when_it_disconnects() {
        let g = builtin_cpag();
        let grid = Grid::parse("a A #").unwrap();
        let placement = Placement {
            rule_id: "R4c".into(),
            anchor: Coord::new(0, 1),
        };
        let err = apply(&grid, &placement, &g, &cfg()).unwrap_err();
        assert!(matches!(err, EngineError::C4Rejection { .. }));
        // Without enforcement the rewrite itself is fine.
        let mut relaxed = cfg();
        relaxed.enforce_c4 = false;
        let next = apply(&grid, &placement, &g, &relaxed).unwrap();
        assert_eq!(next.to_string(), "a # A\n");
    }

    #[test]
    fn non_matching_placement_is_an_error() {
        let g = builtin_cpag();
        let grid = Grid::parse("a b").unwrap();
        let err = apply(
            &grid,
            &Placement {
                rule_id: "R1a".into(),
                anchor: Coord::new(0, 0),
            },
            &g,
            &cfg(),
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::MatchError { .. }));
    }

    #[test]
    fn one_by_one_window_is_a_dead_end() {
        let g = builtin_cpag();
        let trace = derive_random(&g, 1, 1, Coord::new(0, 0), &cfg()).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.reason, StopReason::DeadEnd);
        assert_eq!(trace.reason.to_string(), "no applicable rule");
    }

    #[test]
    fn same_seed_gives_identical_traces() {
        let g = builtin_cpag();
        let mut config = cfg();
        config.rng_seed = 42;
        let t1 = derive_random(&g, 3, 3, Coord::new(0, 0), &config).unwrap();
        let t2 = derive_random(&g, 3, 3, Coord::new(0, 0), &config).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn replay_reproduces_the_final_grid() {
        let g = builtin_cpag();
        let mut config = cfg();
        config.rng_seed = 7;
        let trace = derive_random(&g, 3, 3, Coord::new(0, 0), &config).unwrap();
        let final_grid = replay(&g, &trace, &config).unwrap();
        assert_eq!(final_grid, trace.final_grid);
    }

    #[test]
    fn replay_rejects_corrupted_traces() {
        let g = builtin_cpag();
        let mut config = cfg();
        config.rng_seed = 7;
        let mut trace = derive_random(&g, 3, 3, Coord::new(0, 0), &config).unwrap();
        assert!(!trace.steps.is_empty());
        // Corrupt the first step: R1a cannot fire twice from the start form.
        trace.steps.insert(
            0,
            Placement {
                rule_id: "R8a".into(),
                anchor: Coord::new(2, 2),
            },
        );
        let err = replay(&g, &trace, &config).unwrap_err();
        assert!(matches!(err, EngineError::ReplayStep { index: 0, .. }));
    }
}
