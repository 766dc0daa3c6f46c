//! Isometric array grammars in two dimensions.
//!
//! An isometric array grammar rewrites a shaped region of a fixed-size
//! window in place: the two sides of every rule occupy geometrically
//! identical shapes, the left side holds a nonterminal, terminals are
//! never rewritten, and every application must keep the non-blank cells
//! of the window connected. This crate provides:
//!
//! - grids, symbols, connectivity testing, and binary patterns with
//!   canonical integer keys ([`grid`], [`pattern`]);
//! - rules and grammars with static validation and context-free
//!   classification, plus the built-in connected pattern grammar
//!   ([`grammar`], [`cpag`]);
//! - a line-oriented `.iag` text format with positioned diagnostics
//!   ([`dsl`]);
//! - a derivation engine with seeded random derivation and replayable
//!   traces ([`engine`], [`trace`]);
//! - brute-force oracles: connected-pattern censuses, exhaustive
//!   enumeration of derivable patterns, membership search with witness
//!   traces, and coverage comparison ([`oracle`]).

pub mod cpag;
pub mod dsl;
pub mod engine;
pub mod grammar;
pub mod grid;
pub mod oracle;
pub mod pattern;
pub mod symbol;
pub mod trace;

pub use cpag::builtin_cpag;
pub use dsl::{
    parse_grammar, parse_grammar_lenient, serialize_grammar, ParseDiagnostic, ParsedGrammar,
};
pub use engine::{
    apply, derive_random, initial_form, legal_moves, matches, replay, replay_forms,
    DerivationTrace, EngineConfig, EngineError, Placement, StopReason,
};
pub use grammar::{Condition, Grammar, Rule, RuleSide, ValidationReport};
pub use grid::{is_connected, Connectivity, Coord, Grid, Shape};
pub use oracle::{
    all_starts, census, coverage_report, derivable_set, is_derivable, is_derivable_pattern,
    CensusQuery, CensusReport, CoverageReport, DerivableSet, Membership, SearchLimits,
};
pub use pattern::Pattern;
pub use symbol::Symbol;
pub use trace::{parse_trace, serialize_trace, TraceParseError};
