#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Strict and lenient parsing must never panic, and anything the
    // strict parser accepts must serialize and re-parse to an
    // equivalent grammar with a clean validation report.
    let _ = iag::parse_grammar_lenient(text);
    if let Ok(parsed) = iag::parse_grammar(text) {
        assert!(parsed.grammar.validate().is_valid());
        let round = iag::parse_grammar(&iag::serialize_grammar(&parsed.grammar))
            .expect("serialized grammar re-parses");
        assert!(round.grammar.structurally_equal(&parsed.grammar));
    }
});
