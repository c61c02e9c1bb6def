#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(space) = coarsepu::json::parse_space(text) {
        // anything accepted is a valid space and survives a round trip
        assert!(space.check_axioms().is_ok());
        let again = coarsepu::json::parse_space(&coarsepu::json::space_to_json(&space).to_string()).unwrap();
        assert_eq!(again.ids(), space.ids());
    }
});
