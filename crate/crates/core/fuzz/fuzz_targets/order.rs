#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let space = coarsepu::metric::interval(5).unwrap();
    let _ = coarsepu::json::parse_order(text, &space);
});
