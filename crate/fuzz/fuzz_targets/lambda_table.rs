#![no_main]

use bpz_core::termalg::{LinComb, LinCombEntry};
use libfuzzer_sys::fuzz_target;

// Rendered coefficient tables are re-read as test fixtures; rebuilding a
// combination from entries must never panic and must re-render stably.
fuzz_target!(|data: &[u8]| {
    let Ok(entries) = serde_json::from_slice::<Vec<LinCombEntry>>(data) else { return };
    if entries.len() > 64
        || entries
            .iter()
            .any(|e| e.p.len() > 16 || e.q.len() > 16 || e.lambda.len() > 4096)
    {
        return;
    }
    let Ok(table) = LinComb::from_json_entries(&entries) else { return };
    let rendered = table.to_json_entries();
    let back = LinComb::from_json_entries(&rendered).expect("own rendering must parse");
    assert_eq!(back, table, "rendering changed the combination");
});
