#![no_main]

use bpz_core::evalconfig::PointConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = PointConfig::from_json(text) else { return };
    for n in 1..=3 {
        // Evaluation on a validated config may fail (coincidences are
        // caught by validate) but must never panic.
        let _ = cfg.evaluate_p(n);
    }
    // serde roundtrip stability
    let json = serde_json::to_string(&cfg).expect("serialize");
    let back: PointConfig = serde_json::from_str(&json).expect("reparse own output");
    assert_eq!(serde_json::to_string(&back).unwrap(), json);
});
