#![no_main]

use libfuzzer_sys::fuzz_target;
use rac_core::io::{parse_strategy, strategy_to_json};

fuzz_target!(|data: &str| {
    if let Ok((inst, s)) = parse_strategy(data) {
        let again = parse_strategy(&strategy_to_json(&inst, &s)).expect("serialized strategy parses");
        assert_eq!(again.1.dim_a, s.dim_a);
        assert_eq!(again.1.dim_b, s.dim_b);
    }
});
