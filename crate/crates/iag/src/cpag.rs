//! The built-in connected pattern array grammar: N = {S, A}, T = {a, b},
//! start S, and 23 expanded rule alternatives. Horizontal rule sides are
//! written left-to-right, vertical sides top-to-bottom, and each
//! alternative carries a stable id of the form R<family><letter>.

use crate::grammar::{side_from_rows, Grammar, Rule};

/// The expanded inventory as (id, family, alpha rows, beta rows).
const RULES: &[(&str, &str, &[&str], &[&str])] = &[
    // R1: S with a blank to its right.
    ("R1a", "R1", &["S #"], &["a A"]),
    ("R1b", "R1", &["S #"], &["b A"]),
    // R2: S with a blank below.
    ("R2a", "R2", &["S", "#"], &["a", "A"]),
    ("R2b", "R2", &["S", "#"], &["A", "a"]),
    ("R2c", "R2", &["S", "#"], &["b", "A"]),
    ("R2d", "R2", &["S", "#"], &["A", "b"]),
    // R4: A with a blank to its right.
    ("R4a", "R4", &["A #"], &["a A"]),
    ("R4b", "R4", &["A #"], &["b A"]),
    ("R4c", "R4", &["A #"], &["# A"]),
    // R5: A with a blank below.
    ("R5a", "R5", &["A", "#"], &["a", "A"]),
    ("R5b", "R5", &["A", "#"], &["A", "a"]),
    ("R5c", "R5", &["A", "#"], &["b", "A"]),
    ("R5d", "R5", &["A", "#"], &["A", "b"]),
    ("R5e", "R5", &["A", "#"], &["#", "A"]),
    // R6: A with a blank above.
    ("R6a", "R6", &["#", "A"], &["A", "a"]),
    ("R6b", "R6", &["#", "A"], &["A", "b"]),
    // R7: A with a blank to its left.
    ("R7a", "R7", &["# A"], &["A a"]),
    ("R7b", "R7", &["# A"], &["A #"]),
    ("R7c", "R7", &["# A"], &["a A"]),
    ("R7d", "R7", &["# A"], &["b A"]),
    ("R7e", "R7", &["# A"], &["A b"]),
    // R8: a lone A resolves to a terminal.
    ("R8a", "R8", &["A"], &["a"]),
    ("R8b", "R8", &["A"], &["b"]),
];

/// The canonical expanded CPAG.
pub fn builtin_cpag() -> Grammar {
    let rules = RULES
        .iter()
        .map(|(id, family, alpha, beta)| {
            Rule::new(
                *id,
                side_from_rows(alpha).unwrap(),
                side_from_rows(beta).unwrap(),
                Some((*family).to_string()),
            )
            .expect("built-in rule satisfies conditions 1-3")
        })
        .collect();
    Grammar::new(
        "cpag",
        ['S', 'A'].into(),
        ['a', 'b'].into(),
        'S',
        rules,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn has_23_expanded_rules() {
        assert_eq!(builtin_cpag().rules().len(), 23);
    }

    #[test]
    fn passes_validation() {
        let report = builtin_cpag().validate();
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn every_rule_is_context_free() {
        assert!(builtin_cpag().rules().iter().all(|r| r.is_context_free()));
    }

    #[test]
    fn rule_ids_are_unique_and_stable() {
        let g = builtin_cpag();
        assert!(g.rule("R4c").is_some());
        assert!(g.rule("R7b").is_some());
        let mut ids: Vec<&str> = g.rules().iter().map(|r| r.id()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 23);
    }
}
