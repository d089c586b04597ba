#![no_main]

use bpz_core::oracle_coulomb::{integrand, CoulombConfig};
use libfuzzer_sys::fuzz_target;

// Config files come from users: parsing plus validation must never panic,
// and a validated config must be safe to evaluate at an interior point.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = CoulombConfig::from_json(text) else { return };
    // Keep the follow-on work bounded; validation already passed.
    if cfg.r > 6 || cfg.l > 3 || cfg.t_points.iter().any(|t| !t.is_finite()) {
        return;
    }
    let n = cfg.n_insertions();
    let (a, b) = (cfg.t_points[n - 2], cfg.t_points[n - 1]);
    let mid: Vec<f64> = (0..cfg.l)
        .map(|s| a + (b - a) * (s as f64 + 1.0) / (cfg.l as f64 + 1.0))
        .collect();
    let _ = integrand(&cfg, &mid);
});
