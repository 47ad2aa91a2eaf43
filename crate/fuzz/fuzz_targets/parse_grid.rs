#![no_main]
use fracbdi_cli::grid::{format_grid, parse_grid, MAX_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(times) = parse_grid(s) else { return };
    assert!(!times.is_empty() && times.len() <= MAX_POINTS + 1);
    assert!(times.iter().all(|t| t.is_finite() && *t >= 0.0));
    assert_eq!(parse_grid(&format_grid(&times)).unwrap(), times);
});
