#![no_main]

use libfuzzer_sys::fuzz_target;
use rac_core::io::{parse_protocol, protocol_to_json};

fuzz_target!(|data: &str| {
    if let Ok(p) = parse_protocol(data) {
        parse_protocol(&protocol_to_json(&p)).expect("serialized protocol parses");
    }
});
