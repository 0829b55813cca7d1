#![no_main]

use libfuzzer_sys::fuzz_target;
use rac_core::io::parse_report;

fuzz_target!(|data: &str| {
    if let Ok(r) = parse_report(data) {
        parse_report(&r.to_json()).expect("serialized report parses");
    }
});
