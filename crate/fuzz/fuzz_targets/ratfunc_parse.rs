#![no_main]

use bpz_core::ratfunc::RatFunc;
use libfuzzer_sys::fuzz_target;

// The rational-function text parser must never panic, and anything it
// accepts must survive a render/reparse roundtrip in canonical form.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(value) = text.parse::<RatFunc>() else { return };
    assert!(value.is_reduced(), "parser produced a non-canonical value");
    let rendered = value.to_string();
    let back: RatFunc = rendered
        .parse()
        .unwrap_or_else(|e| panic!("rendered form {rendered:?} failed to reparse: {e}"));
    assert_eq!(back, value, "roundtrip through {rendered:?} changed the value");
});
