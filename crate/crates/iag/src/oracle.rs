//! Brute-force oracles: exhaustive connected-pattern censuses on a
//! window, breadth-first enumeration of a grammar's derivable terminal
//! patterns, membership decision with a witness trace, and the coverage
//! comparison between the two.
//!
//! For a fully terminal a/b pattern, "connected" refers to its grain
//! (a) cells, with the empty grain set counting as connected; the
//! dynamic rewrite condition instead governs the non-blank support of
//! sentential forms. Both readings are stated in report output.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::engine::{legal_applications, DerivationTrace, EngineConfig, Placement, StopReason};
use crate::grammar::Grammar;
use crate::grid::{is_connected, Connectivity, Coord, Grid};
use crate::pattern::Pattern;
use crate::symbol::Symbol;

/// Exhaustive feasibility bound for censuses: 2^(rows*cols) patterns.
pub const MAX_CENSUS_CELLS: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{rows}x{cols} window exceeds the {MAX_CENSUS_CELLS}-cell census feasibility bound")]
    WindowTooLarge { rows: usize, cols: usize },
    #[error("window dimensions must be at least 1x1, got {rows}x{cols}")]
    EmptyWindow { rows: usize, cols: usize },
    #[error("target is {target_rows}x{target_cols} but the window is {rows}x{cols}")]
    TargetMismatch {
        target_rows: usize,
        target_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("target may only contain terminal or blank cells, found {symbol} at {coord}")]
    TargetNotTerminal { coord: Coord, symbol: Symbol },
    #[error("no start positions given")]
    NoStartPositions,
    #[error("start position {start} out of bounds for {rows}x{cols} window")]
    StartOutOfBounds { start: Coord, rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusQuery {
    pub rows: usize,
    pub cols: usize,
    pub connectivity: Connectivity,
    pub center_fixed: bool,
    pub grain_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub query: CensusQuery,
    pub count: u64,
    /// Sorted pattern keys, when materialization was requested.
    pub keys: Option<Vec<u64>>,
    /// Whether the all-zero pattern fell inside the query's constraints
    /// (it counts as connected by the empty-set convention).
    pub empty_pattern_counted: bool,
}

fn census_key_matches(key: u64, query: &CensusQuery, center_bit: usize) -> bool {
    let n = query.rows * query.cols;
    if query.center_fixed && (key >> (n - 1 - center_bit)) & 1 == 0 {
        return false;
    }
    if let Some(grains) = query.grain_count {
        if key.count_ones() as usize != grains {
            return false;
        }
    }
    let pattern = Pattern::from_key(key, query.rows, query.cols).unwrap();
    is_connected(&pattern.grains(), query.connectivity)
}

/// Counts (and optionally lists) every binary pattern on the window
/// that satisfies the query constraints and whose grain set is
/// connected. The key range may be partitioned across threads; the
/// result is identical for any thread count.
pub fn census(query: &CensusQuery, list_keys: bool, threads: usize) -> Result<CensusReport, OracleError> {
    if query.rows == 0 || query.cols == 0 {
        return Err(OracleError::EmptyWindow {
            rows: query.rows,
            cols: query.cols,
        });
    }
    let n = query.rows * query.cols;
    if n > MAX_CENSUS_CELLS {
        return Err(OracleError::WindowTooLarge {
            rows: query.rows,
            cols: query.cols,
        });
    }
    let center = Coord::new(query.rows / 2, query.cols / 2);
    let center_bit = center.row * query.cols + center.col;
    let total: u64 = 1 << n;
    let threads = threads.clamp(1, 64);

    let chunk = total.div_ceil(threads as u64);
    let partials: Vec<(u64, Vec<u64>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|t| {
                let lo = t * chunk;
                let hi = total.min(lo + chunk);
                scope.spawn(move || {
                    let mut count = 0u64;
                    let mut keys = Vec::new();
                    for key in lo..hi {
                        if census_key_matches(key, query, center_bit) {
                            count += 1;
                            if list_keys {
                                keys.push(key);
                            }
                        }
                    }
                    (count, keys)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let count = partials.iter().map(|(c, _)| c).sum();
    let keys = list_keys.then(|| partials.into_iter().flat_map(|(_, k)| k).collect());
    let empty_pattern_counted = census_key_matches(0, query, center_bit);
    Ok(CensusReport {
        query: query.clone(),
        count,
        keys,
        empty_pattern_counted,
    })
}

/// Every coordinate of the window, for all-starts searches.
pub fn all_starts(rows: usize, cols: usize) -> BTreeSet<Coord> {
    (0..rows)
        .flat_map(|r| (0..cols).map(move |c| Coord::new(r, c)))
        .collect()
}

/// Resource bound on breadth-first searches over sentential forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_forms: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_forms: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivableSet {
    /// Pattern keys of every reachable fully terminal (all a/b) form.
    pub keys: BTreeSet<u64>,
    pub visited_forms: usize,
    pub search_exhausted: bool,
}

fn seed_forms(
    grammar: &Grammar,
    rows: usize,
    cols: usize,
    starts: &BTreeSet<Coord>,
) -> Result<Vec<Grid>, OracleError> {
    if rows == 0 || cols == 0 {
        return Err(OracleError::EmptyWindow { rows, cols });
    }
    if starts.is_empty() {
        return Err(OracleError::NoStartPositions);
    }
    starts
        .iter()
        .map(|&start| {
            crate::engine::initial_form(rows, cols, start, grammar)
                .map_err(|_| OracleError::StartOutOfBounds { start, rows, cols })
        })
        .collect()
}

/// Breadth-first closure over legal applications from every initial
/// form, deduplicating sentential forms exactly, collecting the pattern
/// keys of all reachable fully terminal forms.
pub fn derivable_set(
    grammar: &Grammar,
    rows: usize,
    cols: usize,
    starts: &BTreeSet<Coord>,
    config: &EngineConfig,
    limits: SearchLimits,
) -> Result<DerivableSet, OracleError> {
    let seeds = seed_forms(grammar, rows, cols, starts)?;
    let mut visited: std::collections::HashSet<Grid> = std::collections::HashSet::new();
    let mut queue: VecDeque<Grid> = VecDeque::new();
    for seed in seeds {
        if visited.insert(seed.clone()) {
            queue.push_back(seed);
        }
    }
    let mut keys = BTreeSet::new();
    let mut search_exhausted = true;
    while let Some(form) = queue.pop_front() {
        if !form.has_nonterminal() {
            if !form.has_blank() {
                if let Ok(pattern) = Pattern::from_grid(&form) {
                    if let Ok(key) = pattern.key() {
                        keys.insert(key);
                    }
                }
            }
            continue;
        }
        for (_, next) in legal_applications(&form, grammar, config) {
            if visited.len() >= limits.max_forms {
                search_exhausted = false;
                break;
            }
            if visited.insert(next.clone()) {
                queue.push_back(next);
            }
        }
        if !search_exhausted {
            break;
        }
    }
    Ok(DerivableSet {
        keys,
        visited_forms: visited.len(),
        search_exhausted,
    })
}

/// Outcome of a membership search. A capped search that found nothing
/// is inconclusive, never a definite no.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Derivable(DerivationTrace),
    NotDerivable,
    Inconclusive { visited_forms: usize },
}

/// Searches for a derivation from some allowed start that reaches the
/// target grid exactly. Target cells must be terminals or blanks. With
/// pruning enabled, any sentential form holding a terminal that
/// contradicts the target is dropped; terminals are never rewritten, so
/// this cannot lose witnesses.
pub fn is_derivable(
    grammar: &Grammar,
    target: &Grid,
    starts: &BTreeSet<Coord>,
    config: &EngineConfig,
    limits: SearchLimits,
    prune: bool,
) -> Result<Membership, OracleError> {
    for (coord, symbol) in target.symbols() {
        if symbol.is_nonterminal() {
            return Err(OracleError::TargetNotTerminal { coord, symbol });
        }
    }
    let rows = target.rows();
    let cols = target.cols();
    let seeds = seed_forms(grammar, rows, cols, starts)?;

    let contradicts = |form: &Grid| {
        prune
            && form.symbols().any(|(coord, symbol)| {
                symbol.is_terminal() && target.get(coord) != Some(symbol)
            })
    };

    // Parent-indexed arena so a witness trace can be reconstructed.
    let mut nodes: Vec<(Grid, Option<(usize, Placement)>)> = Vec::new();
    let mut visited: HashMap<Grid, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for seed in seeds {
        if contradicts(&seed) {
            continue;
        }
        if !visited.contains_key(&seed) {
            let idx = nodes.len();
            visited.insert(seed.clone(), idx);
            nodes.push((seed, None));
            queue.push_back(idx);
        }
    }

    let witness = |nodes: &[(Grid, Option<(usize, Placement)>)], mut idx: usize| {
        let mut steps = Vec::new();
        let final_grid = nodes[idx].0.clone();
        while let Some((parent, placement)) = nodes[idx].1.clone() {
            steps.push(placement);
            idx = parent;
        }
        steps.reverse();
        let start_pos = nodes[idx]
            .0
            .symbols()
            .find(|(_, s)| s.is_nonterminal())
            .map(|(c, _)| c)
            .expect("initial form holds the start symbol");
        DerivationTrace {
            grammar_name: grammar.name().to_string(),
            rows,
            cols,
            start_pos,
            steps,
            final_grid,
            reason: StopReason::Terminal,
        }
    };

    let mut capped = false;
    while let Some(idx) = queue.pop_front() {
        let form = nodes[idx].0.clone();
        if &form == target {
            return Ok(Membership::Derivable(witness(&nodes, idx)));
        }
        if !form.has_nonterminal() {
            continue;
        }
        for (placement, next) in legal_applications(&form, grammar, config) {
            if contradicts(&next) || visited.contains_key(&next) {
                continue;
            }
            if visited.len() >= limits.max_forms {
                capped = true;
                break;
            }
            let next_idx = nodes.len();
            visited.insert(next.clone(), next_idx);
            nodes.push((next, Some((idx, placement))));
            queue.push_back(next_idx);
        }
        if capped {
            break;
        }
    }
    if capped {
        Ok(Membership::Inconclusive {
            visited_forms: visited.len(),
        })
    } else {
        Ok(Membership::NotDerivable)
    }
}

/// Membership for a fully terminal binary pattern (1 = a, 0 = b).
pub fn is_derivable_pattern(
    grammar: &Grammar,
    target: &Pattern,
    starts: &BTreeSet<Coord>,
    config: &EngineConfig,
    limits: SearchLimits,
) -> Result<Membership, OracleError> {
    is_derivable(grammar, &target.to_grid(), starts, config, limits, true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub rows: usize,
    pub cols: usize,
    pub connectivity: Connectivity,
    pub derivable_count: usize,
    pub connected_count: usize,
    /// Derivable patterns whose grain set is disconnected.
    pub derivable_not_connected: Vec<u64>,
    /// Grain-connected patterns (empty set included) the grammar cannot
    /// derive.
    pub connected_not_derivable: Vec<u64>,
    pub search_exhausted: bool,
    pub visited_forms: usize,
}

/// Compares the grammar's derivable pattern set against the census of
/// grain-connected patterns on the same window.
pub fn coverage_report(
    grammar: &Grammar,
    rows: usize,
    cols: usize,
    connectivity: Connectivity,
    starts: &BTreeSet<Coord>,
    config: &EngineConfig,
    limits: SearchLimits,
) -> Result<CoverageReport, OracleError> {
    let derivable = derivable_set(grammar, rows, cols, starts, config, limits)?;
    let census_report = census(
        &CensusQuery {
            rows,
            cols,
            connectivity,
            center_fixed: false,
            grain_count: None,
        },
        true,
        1,
    )?;
    let connected: BTreeSet<u64> = census_report.keys.unwrap().into_iter().collect();
    Ok(CoverageReport {
        rows,
        cols,
        connectivity,
        derivable_count: derivable.keys.len(),
        connected_count: connected.len(),
        derivable_not_connected: derivable.keys.difference(&connected).copied().collect(),
        connected_not_derivable: connected.difference(&derivable.keys).copied().collect(),
        search_exhausted: derivable.search_exhausted,
        visited_forms: derivable.visited_forms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpag::builtin_cpag;
    use crate::engine::replay;
    use crate::grammar::{side_from_rows, Rule};

    fn query(connectivity: Connectivity, center_fixed: bool, grains: Option<usize>) -> CensusQuery {
        CensusQuery {
            rows: 3,
            cols: 3,
            connectivity,
            center_fixed,
            grain_count: grains,
        }
    }

    #[test]
    fn census_counts_from_the_counting_procedure() {
        let r = census(&query(Connectivity::Eight, true, Some(2)), false, 1).unwrap();
        assert_eq!(r.count, 8);
        let r = census(&query(Connectivity::Eight, true, Some(3)), false, 1).unwrap();
        assert_eq!(r.count, 28);
        let r = census(&query(Connectivity::Eight, true, None), false, 1).unwrap();
        assert_eq!(r.count, 256);
        let r = census(&query(Connectivity::Four, true, Some(2)), false, 1).unwrap();
        assert_eq!(r.count, 4);
    }

    #[test]
    fn census_grain_counts_sum_to_the_unconstrained_total() {
        let total: u64 = (0..=9)
            .map(|g| {
                census(&query(Connectivity::Eight, true, Some(g)), false, 1)
                    .unwrap()
                    .count
            })
            .sum();
        assert_eq!(total, 256);
    }

    #[test]
    fn census_is_thread_count_invariant() {
        for threads in [1, 2, 3, 8] {
            let r = census(&query(Connectivity::Eight, true, Some(3)), true, threads).unwrap();
            assert_eq!(r.count, 28);
            assert_eq!(r.keys.as_ref().unwrap().len(), 28);
            assert!(r.keys.unwrap().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn census_rejects_oversized_windows() {
        let q = CensusQuery {
            rows: 6,
            cols: 6,
            connectivity: Connectivity::Eight,
            center_fixed: false,
            grain_count: None,
        };
        assert!(matches!(
            census(&q, false, 1),
            Err(OracleError::WindowTooLarge { .. })
        ));
    }

    #[test]
    fn empty_pattern_is_counted_and_flagged() {
        let q = CensusQuery {
            rows: 1,
            cols: 2,
            connectivity: Connectivity::Eight,
            center_fixed: false,
            grain_count: None,
        };
        let r = census(&q, true, 1).unwrap();
        assert_eq!(r.count, 4);
        assert!(r.empty_pattern_counted);
        assert!(r.keys.unwrap().contains(&0));
    }

    #[test]
    fn cpag_derivable_set_on_1x2_is_all_four_patterns() {
        let g = builtin_cpag();
        let result = derivable_set(
            &g,
            1,
            2,
            &all_starts(1, 2),
            &EngineConfig::default(),
            SearchLimits::default(),
        )
        .unwrap();
        assert!(result.search_exhausted);
        assert_eq!(result.keys, [0u64, 1, 2, 3].into());
    }

    #[test]
    fn cpag_derivable_set_on_1x1_is_empty() {
        let g = builtin_cpag();
        let result = derivable_set(
            &g,
            1,
            1,
            &all_starts(1, 1),
            &EngineConfig::default(),
            SearchLimits::default(),
        )
        .unwrap();
        assert!(result.search_exhausted);
        assert!(result.keys.is_empty());
    }

    #[test]
    fn rule_free_grammar_derives_nothing() {
        let g = crate::grammar::Grammar::new("empty", ['S'].into(), ['a', 'b'].into(), 'S', vec![]);
        let result = derivable_set(
            &g,
            2,
            2,
            &all_starts(2, 2),
            &EngineConfig::default(),
            SearchLimits::default(),
        )
        .unwrap();
        assert!(result.keys.is_empty());
    }

    #[test]
    fn witness_replays_to_the_target() {
        let g = builtin_cpag();
        let target = Pattern::parse("001\n010\n000").unwrap();
        let config = EngineConfig::default();
        let verdict = is_derivable_pattern(
            &g,
            &target,
            &all_starts(3, 3),
            &config,
            SearchLimits::default(),
        )
        .unwrap();
        let Membership::Derivable(trace) = verdict else {
            panic!("expected a witness");
        };
        let final_grid = replay(&g, &trace, &config).unwrap();
        assert_eq!(final_grid.to_string(), "b b a\nb a b\nb b b\n");
    }

    #[test]
    fn disconnected_support_target_is_a_definite_no() {
        let g = builtin_cpag();
        let target = Grid::parse("a # a").unwrap();
        let verdict = is_derivable(
            &g,
            &target,
            &all_starts(1, 3),
            &EngineConfig::default(),
            SearchLimits::default(),
            true,
        )
        .unwrap();
        assert_eq!(verdict, Membership::NotDerivable);
    }

    #[test]
    fn capped_search_is_inconclusive_not_no() {
        let g = builtin_cpag();
        let target = Pattern::parse("000\n010\n000").unwrap();
        let verdict = is_derivable_pattern(
            &g,
            &target,
            &all_starts(3, 3),
            &EngineConfig::default(),
            SearchLimits { max_forms: 5 },
        )
        .unwrap();
        assert!(matches!(verdict, Membership::Inconclusive { .. }));
    }

    #[test]
    fn coverage_on_1x2_fragment_grammar() {
        let g = builtin_cpag();
        let fragment = crate::grammar::Grammar::new(
            "fragment",
            g.nonterminals().clone(),
            g.terminals().clone(),
            'S',
            vec![g.rule("R1a").unwrap().clone(), g.rule("R8a").unwrap().clone()],
        );
        let report = coverage_report(
            &fragment,
            1,
            2,
            Connectivity::Eight,
            &all_starts(1, 2),
            &EngineConfig::default(),
            SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(report.derivable_count, 1);
        assert_eq!(report.connected_not_derivable, vec![0, 1, 2]);
        assert!(report.derivable_not_connected.is_empty());
    }

    #[test]
    fn rule_construction_helper_sanity() {
        // derivable_set must also see rules built outside the builtin.
        let rule = Rule::new(
            "only",
            side_from_rows(&["S"]).unwrap(),
            side_from_rows(&["a"]).unwrap(),
            None,
        )
        .unwrap();
        let g = crate::grammar::Grammar::new("one", ['S'].into(), ['a', 'b'].into(), 'S', vec![rule]);
        let result = derivable_set(
            &g,
            1,
            1,
            &all_starts(1, 1),
            &EngineConfig::default(),
            SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(result.keys, [1u64].into());
    }
}
