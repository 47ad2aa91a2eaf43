#![no_main]
use fracbdi_cli::manifest::parse_manifest;
use fracbdi_cli::run::Run;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_manifest(s) else { return };
    let p = m.params;
    if [p.alpha, p.lambda, p.mu, p.nu].iter().all(|x| x.is_finite()) {
        assert_eq!(parse_manifest(&m.to_json()).unwrap(), m);
    }
    // decoding into a run validates but never executes
    let _ = Run::from_manifest(&m);
});
