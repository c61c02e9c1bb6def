#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = coarsepu::json::parse_level_schedule(text);
    let _ = coarsepu::json::parse_continuity_schedule(text);
});
