//! Floating-point oracle: evaluates screened power-product integrals with
//! purely imaginary coupling and weights, applies the full order-r operator
//! to the integrand analytically (complex-coefficient jets in the insertion
//! coordinates; nothing is ever differentiated in the screening variables),
//! and checks that the integral of the result vanishes to tolerance.

use crate::bsa::{bsa_coefficient, compositions, BsaError};
use crate::jet::{Jet, JetError, JetSpace};
use crate::lowering::LoweringOps;
use crate::quadrature::{integrate_simplex_vec, QuadratureError};
use crate::ratfunc::ChiMode;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoulombError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("screening coordinates must satisfy t_(N-1) < x_1 < ... < x_l < t_N")]
    OrderingViolation,
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Bsa(#[from] BsaError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

fn default_quad_tol() -> f64 {
    1e-10
}
fn default_max_segments() -> usize {
    1 << 14
}
fn default_bpz_tol() -> f64 {
    1e-6
}

/// Geometry and parameters of one verification run. The coupling is
/// gamma = i*g and the insertion weights are alpha_j = i*a_j, all purely
/// imaginary so every screening-dependent exponent is real.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoulombConfig {
    pub r: u32,
    pub chi_mode: ChiMode,
    /// Number of screening variables.
    pub l: usize,
    /// Degenerate location; must sit left of every insertion.
    pub t: f64,
    /// Insertion locations t_1 < ... < t_N.
    pub t_points: Vec<f64>,
    /// gamma = i*g, g > 0.
    pub g: f64,
    /// alpha_j = i*a_j, one positive entry per insertion.
    pub a: Vec<f64>,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default = "default_max_segments")]
    pub max_segments: usize,
    #[serde(default = "default_bpz_tol")]
    pub bpz_tol: f64,
}

impl CoulombConfig {
    pub fn n_insertions(&self) -> usize {
        self.t_points.len()
    }

    // Negated comparisons are deliberate: they reject NaN coordinates too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), CoulombError> {
        let n = self.n_insertions();
        let fail = |msg: String| Err(CoulombError::InvalidConfig(msg));
        if self.r < 1 {
            return fail("r must be >= 1".into());
        }
        if n < 2 {
            return fail("need at least two insertions".into());
        }
        if n + 1 > 8 {
            return fail("at most 7 insertions supported".into());
        }
        if self.a.len() != n {
            return fail(format!("got {} weights for {} insertions", self.a.len(), n));
        }
        if !(self.g > 0.0) || self.a.iter().any(|&a| !(a > 0.0)) {
            return fail("g and all weights a_j must be positive".into());
        }
        let mut prev = self.t;
        for &tp in &self.t_points {
            if !(prev < tp) {
                return fail("locations must satisfy t < t_1 < ... < t_N".into());
            }
            prev = tp;
        }
        if self.l > 0 {
            // Endpoint vanishing of order >= r keeps every boundary term of
            // the differentiated integral at zero; reject rather than
            // attempt singular quadrature.
            let vanish = 0.5 * self.g * self.a[n - 2].min(self.a[n - 1]);
            if vanish + 1e-12 < self.r as f64 {
                return fail(format!(
                    "endpoint vanishing order {:.3} is below r = {}; raise a_(N-1), a_N or g",
                    vanish, self.r
                ));
            }
        }
        if !(self.quad_tol > 0.0) || !(self.bpz_tol > 0.0) {
            return fail("tolerances must be positive".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<CoulombConfig, CoulombError> {
        let cfg: CoulombConfig = serde_json::from_str(text)
            .map_err(|e| CoulombError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::new(0.0, self.g)
    }

    pub fn chi(&self) -> Complex64 {
        match self.chi_mode {
            ChiMode::GammaHalf => self.gamma() * 0.5,
            ChiMode::TwoOverGamma => Complex64::new(2.0, 0.0) / self.gamma(),
        }
    }

    /// Weight of coordinate i with the degenerate charge at slot 0.
    fn weight(&self, i: usize) -> Complex64 {
        if i == 0 {
            -self.chi() * (self.r as f64 - 1.0)
        } else {
            Complex64::new(0.0, self.a[i - 1])
        }
    }

    fn coord(&self, i: usize) -> f64 {
        if i == 0 {
            self.t
        } else {
            self.t_points[i - 1]
        }
    }
}

/// Real-base complex power with the branch convention (-1)^a = e^(i pi a).
pub fn complex_power(base: f64, expo: Complex64) -> Complex64 {
    if base > 0.0 {
        (expo * base.ln()).exp()
    } else if base < 0.0 {
        (expo * Complex64::new((-base).ln(), std::f64::consts::PI)).exp()
    } else if expo.re > 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(f64::NAN, f64::NAN)
    }
}

/// Integrand value at one screening configuration, including the
/// location-only prefactor.
pub fn integrand(cfg: &CoulombConfig, x: &[f64]) -> Result<Complex64, CoulombError> {
    check_ordering(cfg, x)?;
    Ok(prefactor(cfg) * screened_part(cfg, x))
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_ordering(cfg: &CoulombConfig, x: &[f64]) -> Result<(), CoulombError> {
    if x.len() != cfg.l {
        return Err(CoulombError::OrderingViolation);
    }
    let n = cfg.n_insertions();
    let mut prev = cfg.t_points[n - 2];
    for &xi in x {
        if !(prev < xi) {
            return Err(CoulombError::OrderingViolation);
        }
        prev = xi;
    }
    if !(prev < cfg.t_points[n - 1]) {
        return Err(CoulombError::OrderingViolation);
    }
    Ok(())
}

/// Product over location pairs (t_j - t_i)^(-a_i a_j / 2), x-independent.
fn prefactor(cfg: &CoulombConfig) -> Complex64 {
    let n = cfg.n_insertions();
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..=n {
        for j in (i + 1)..=n {
            let base = cfg.coord(j) - cfg.coord(i);
            let expo = -0.5 * cfg.weight(i) * cfg.weight(j);
            acc *= complex_power(base, expo);
        }
    }
    acc
}

/// The screening-dependent factors of the integrand.
fn screened_part(cfg: &CoulombConfig, x: &[f64]) -> Complex64 {
    let n = cfg.n_insertions();
    let gamma = cfg.gamma();
    let mut acc = Complex64::new(1.0, 0.0);
    for &xs in x {
        for i in 0..=n {
            let expo = -0.5 * gamma * cfg.weight(i);
            acc *= complex_power(xs - cfg.coord(i), expo);
        }
    }
    for s in 0..x.len() {
        for sp in 0..s {
            let expo = -0.5 * gamma * gamma;
            acc *= complex_power(x[s] - x[sp], expo);
        }
    }
    acc
}

/// Operator jets at the configured location for one screening configuration.
/// The x-independent parts are prepared once; only the screening-interaction
/// corrections are rebuilt per node.
pub struct CoulombJets {
    cfg: CoulombConfig,
    space: std::sync::Arc<JetSpace>,
    order: u32,
    /// (t_l - t)^(-m), l = 1..=N, m = 0..=r.
    recip_pow: std::sync::Arc<Vec<Vec<Jet<Complex64>>>>,
    /// x-independent part of d/dt_l log f (slot 0 is the t derivative).
    base_log: Vec<Jet<Complex64>>,
    /// x-independent weight parts of each operator: sum_l Delta_l (n-1)
    /// (t_l - t)^(-n), n = 1..=r (slot 0 unused; slot 1 zero).
    weight_ops: Vec<Jet<Complex64>>,
}

impl CoulombJets {
    pub fn build(cfg: &CoulombConfig) -> Result<CoulombJets, CoulombError> {
        cfg.validate()?;
        let n = cfg.n_insertions();
        let order = cfg.r.saturating_sub(1);
        let space = std::sync::Arc::new(JetSpace::new(n + 1, order)?);
        let q_charge = cfg.gamma() * 0.5 + Complex64::new(2.0, 0.0) / cfg.gamma();

        let diff = |a: usize, b: usize| -> Jet<Complex64> {
            let va = space.variable(a, Complex64::new(cfg.coord(a), 0.0), order);
            let vb = space.variable(b, Complex64::new(cfg.coord(b), 0.0), order);
            space.sub(&va, &vb).expect("same order")
        };

        let mut recip_pow = Vec::with_capacity(n + 1);
        recip_pow.push(Vec::new());
        for l in 1..=n {
            let rec = space.recip(&diff(l, 0))?;
            let mut powers = Vec::with_capacity(cfg.r as usize + 1);
            powers.push(space.constant(order, Complex64::new(1.0, 0.0)));
            for m in 1..=cfg.r {
                let prev = &powers[(m - 1) as usize];
                powers.push(space.mul(prev, &rec, None));
            }
            recip_pow.push(powers);
        }

        // d/dt_i log f restricted to the location factors:
        // sum_{j != i} (-w_i w_j / 2) / (t_i - t_j).
        let mut base_log = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut acc = space.constant(order, Complex64::new(0.0, 0.0));
            for j in 0..=n {
                if j == i {
                    continue;
                }
                let rec = space.recip(&diff(i, j))?;
                let w = -0.5 * cfg.weight(i) * cfg.weight(j);
                acc = space.add(&acc, &space.scale(&rec, &w)).expect("same order");
            }
            base_log.push(acc);
        }

        let mut weight_ops = Vec::with_capacity(cfg.r as usize + 1);
        weight_ops.push(space.constant(order, Complex64::new(0.0, 0.0)));
        weight_ops.push(space.constant(order, Complex64::new(0.0, 0.0)));
        for op_n in 2..=cfg.r {
            let mut acc = space.constant(order, Complex64::new(0.0, 0.0));
            for l in 1..=n {
                let alpha = cfg.weight(l);
                let delta = 0.5 * alpha * (q_charge - 0.5 * alpha);
                let w = delta * (op_n as f64 - 1.0);
                acc = space
                    .add(&acc, &space.scale(&recip_pow[l][op_n as usize], &w))
                    .expect("same order");
            }
            weight_ops.push(acc);
        }

        Ok(CoulombJets {
            cfg: cfg.clone(),
            space,
            order,
            recip_pow: std::sync::Arc::new(recip_pow),
            base_log,
            weight_ops,
        })
    }

    /// 1/(x - t_i) as a jet in coordinate i alone, expanded at the base.
    fn screening_recip(&self, xs: f64, i: usize) -> Jet<Complex64> {
        let base = Complex64::new(xs - self.cfg.coord(i), 0.0);
        let mut jet = self.space.constant(self.order, base);
        // d(x - t_i)/dt_i = -1
        jet = {
            let v = self.space.variable(i, Complex64::new(0.0, 0.0), self.order);
            self.space.sub(&jet, &v).expect("same order")
        };
        self.space.recip(&jet).expect("base point is off the screening line")
    }

    /// Assemble the operator set at a fixed screening configuration.
    fn ops_at(&self, x: &[f64]) -> LoweringOps<Complex64> {
        let n = self.cfg.n_insertions();
        let gamma = self.cfg.gamma();

        // Full log-derivatives including screening interactions:
        // d/dt_i log f += sum_s (gamma w_i / 2) / (x_s - t_i).
        let mut full_log = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut acc = self.base_log[i].clone();
            if !x.is_empty() {
                let w = 0.5 * gamma * self.cfg.weight(i);
                for &xs in x {
                    let rec = self.screening_recip(xs, i);
                    acc = self
                        .space
                        .add(&acc, &self.space.scale(&rec, &w))
                        .expect("same order");
                }
            }
            full_log.push(acc);
        }

        let mut ops = Vec::with_capacity(self.cfg.r as usize + 1);
        ops.push(self.space.constant(self.order, Complex64::new(0.0, 0.0)));
        ops.push(full_log[0].clone());
        for op_n in 2..=self.cfg.r {
            let mut acc = self.weight_ops[op_n as usize].clone();
            for l in 1..=n {
                let lead = self
                    .space
                    .mul(&self.recip_pow[l][(op_n - 1) as usize], &full_log[l], None);
                acc = self.space.add(&acc, &self.space.neg(&lead)).expect("same order");
            }
            ops.push(acc);
        }

        LoweringOps {
            space: self.space.clone(),
            r: self.cfg.r,
            n_insertions: n,
            ops,
            recip_pow: self.recip_pow.clone(),
        }
    }

    /// Per-composition values of (word applied to f)/f at the configured
    /// location, for a fixed screening configuration.
    pub fn word_values_at(&self, x: &[f64]) -> Result<Vec<(Vec<u32>, Complex64)>, CoulombError> {
        let ops = self.ops_at(x);
        Ok(ops.word_values()?)
    }
}

/// Value of the full operator applied to the integrand at one screening
/// configuration (differentiation only in the insertion coordinates).
pub fn apply_dr_integrand(cfg: &CoulombConfig, x: &[f64]) -> Result<Complex64, CoulombError> {
    check_ordering(cfg, x)?;
    let jets = CoulombJets::build(cfg)?;
    let f = integrand(cfg, x)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (word, value) in jets.word_values_at(x)? {
        let coeff = eval_coefficient(&word, cfg)?;
        total += coeff * value;
    }
    Ok(total * f)
}

fn eval_coefficient(word: &[u32], cfg: &CoulombConfig) -> Result<Complex64, CoulombError> {
    let rf = bsa_coefficient(word, cfg.r, cfg.chi_mode)?;
    rf.eval_complex(cfg.gamma())
        .map_err(|e| CoulombError::InvalidConfig(format!("coefficient evaluation: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoulombStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoulombReport {
    pub r: u32,
    pub chi_mode: ChiMode,
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Value of the screened integral (or the bare prefactor when l = 0).
    pub c_value: [f64; 2],
    /// |integral of the operator applied to the integrand|.
    pub residual: f64,
    /// Largest single composition contribution; the scale that makes the
    /// residual meaningful.
    pub normalization: f64,
    pub normalized_residual: f64,
    pub tolerance: f64,
    pub quad_error: f64,
    pub status: CoulombStatus,
}

impl CoulombReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Full verification run for one configuration. Quadrature failure yields
/// an inconclusive status carrying the best estimate, distinct from a
/// mathematical fail.
pub fn verify_coulomb_bpz(cfg: &CoulombConfig) -> Result<CoulombReport, CoulombError> {
    cfg.validate()?;
    let jets = CoulombJets::build(cfg)?;
    let comps = compositions(cfg.r)?;
    let coeffs: Vec<Complex64> = comps
        .iter()
        .map(|c| eval_coefficient(c, cfg))
        .collect::<Result<_, _>>()?;
    let dim = comps.len() + 1;
    let pref = prefactor(cfg);

    let (values, quad_error) = if cfg.l == 0 {
        let mut vals = vec![Complex64::new(0.0, 0.0); dim];
        vals[0] = pref;
        for (i, (word, v)) in jets.word_values_at(&[])?.iter().enumerate() {
            debug_assert_eq!(word, &comps[i]);
            vals[i + 1] = coeffs[i] * v * pref;
        }
        (vals, 0.0)
    } else {
        let n = cfg.n_insertions();
        let bounds = (cfg.t_points[n - 2], cfg.t_points[n - 1]);
        let h = |x: &[f64]| -> Result<Vec<Complex64>, QuadratureError> {
            let f = pref * screened_part(cfg, x);
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            out[0] = f;
            let words = jets
                .word_values_at(x)
                .map_err(|e| QuadratureError::Evaluation(e.to_string()))?;
            for (i, (_, v)) in words.iter().enumerate() {
                out[i + 1] = coeffs[i] * v * f;
            }
            Ok(out)
        };
        match integrate_simplex_vec(&h, cfg.l, bounds, dim, cfg.quad_tol, cfg.max_segments) {
            Ok(res) => res,
            Err(QuadratureError::NoConvergence { value, error, .. }) => {
                let mut report = summarize(cfg, &value, error);
                report.status = CoulombStatus::Inconclusive;
                return Ok(report);
            }
            Err(e) => return Err(e.into()),
        }
    };

    Ok(summarize(cfg, &values, quad_error))
}

fn summarize(cfg: &CoulombConfig, values: &[Complex64], quad_error: f64) -> CoulombReport {
    let c_value = values[0];
    let contributions = &values[1..];
    let total: Complex64 = contributions.iter().sum();
    let residual = total.norm();
    let normalization = contributions.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let normalized_residual = if normalization > f64::MIN_POSITIVE {
        residual / normalization
    } else if residual == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let status = if normalized_residual <= cfg.bpz_tol {
        CoulombStatus::Pass
    } else {
        CoulombStatus::Fail
    };
    CoulombReport {
        r: cfg.r,
        chi_mode: cfg.chi_mode,
        l: cfg.l,
        n: cfg.n_insertions(),
        c_value: [c_value.re, c_value.im],
        residual,
        normalization,
        normalized_residual,
        tolerance: cfg.bpz_tol,
        quad_error,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_r2l1() -> CoulombConfig {
        CoulombConfig {
            r: 2,
            chi_mode: ChiMode::GammaHalf,
            l: 1,
            t: 0.0,
            t_points: vec![1.0, 2.0],
            g: 1.0,
            a: vec![4.0, 4.0],
            quad_tol: 1e-10,
            max_segments: 1 << 14,
            bpz_tol: 1e-6,
        }
    }

    #[test]
    fn branch_convention_on_negative_base() {
        // (-2)^(1/2) = e^(i pi / 2) sqrt(2) = i sqrt(2)
        let v = complex_power(-2.0, Complex64::new(0.5, 0.0));
        assert!((v.re - 0.0).abs() < 1e-12);
        assert!((v.im - 2.0f64.sqrt()).abs() < 1e-12);
        // integer exponents coincide with real arithmetic
        let v = complex_power(-3.0, Complex64::new(2.0, 0.0));
        assert!((v.re - 9.0).abs() < 1e-9 && v.im.abs() < 1e-9);
    }

    #[test]
    fn integrand_vanishes_at_chamber_endpoints() {
        let cfg = config_r2l1();
        let near_left = integrand(&cfg, &[1.0 + 1e-9]).unwrap();
        let near_right = integrand(&cfg, &[2.0 - 1e-9]).unwrap();
        let mid = integrand(&cfg, &[1.5]).unwrap();
        // vanishing order g a / 2 = 2 at both endpoints
        assert!(near_left.norm() < 1e-15 * mid.norm().max(1.0));
        assert!(near_right.norm() < 1e-15 * mid.norm().max(1.0));
    }

    #[test]
    fn ordering_violation_is_an_error() {
        let cfg = config_r2l1();
        assert!(matches!(integrand(&cfg, &[0.5]), Err(CoulombError::OrderingViolation)));
        assert!(matches!(integrand(&cfg, &[2.5]), Err(CoulombError::OrderingViolation)));
        let mut cfg2 = cfg;
        cfg2.l = 2;
        assert!(matches!(
            integrand(&cfg2, &[1.8, 1.2]),
            Err(CoulombError::OrderingViolation)
        ));
    }

    #[test]
    fn endpoint_condition_enforced() {
        let mut cfg = config_r2l1();
        cfg.a = vec![4.0, 1.0];
        assert!(matches!(cfg.validate(), Err(CoulombError::InvalidConfig(_))));
    }

    #[test]
    fn l0_operator_annihilates_bare_integrand() {
        for mode in ChiMode::BOTH {
            let mut cfg = config_r2l1();
            cfg.chi_mode = mode;
            cfg.l = 0;
            let report = verify_coulomb_bpz(&cfg).unwrap();
            assert_eq!(report.status, CoulombStatus::Pass);
            assert!(
                report.normalized_residual <= 1e-12,
                "mode {mode}: {}",
                report.normalized_residual
            );
        }
    }

    #[test]
    fn r1_is_exactly_zero() {
        let mut cfg = config_r2l1();
        cfg.r = 1;
        cfg.l = 0;
        let report = verify_coulomb_bpz(&cfg).unwrap();
        // D_1 = d/dt and the degenerate weight vanishes at r = 1, so the
        // single contribution is identically zero.
        assert_eq!(report.residual, 0.0);
    }

    #[test]
    fn config_json_roundtrip_and_validation() {
        let text = r#"{
            "r": 2, "chi_mode": "gamma/2", "l": 1,
            "t": 0.0, "t_points": [1.0, 2.0],
            "g": 1.0, "a": [4.0, 4.0]
        }"#;
        let cfg = CoulombConfig::from_json(text).unwrap();
        assert_eq!(cfg.quad_tol, 1e-10);
        assert_eq!(cfg.max_segments, 1 << 14);
        assert!(CoulombConfig::from_json("{\"r\": 2}").is_err());
        let bad = r#"{
            "r": 2, "chi_mode": "gamma/2", "l": 1,
            "t": 5.0, "t_points": [1.0, 2.0],
            "g": 1.0, "a": [4.0, 4.0]
        }"#;
        assert!(CoulombConfig::from_json(bad).is_err());
    }

    #[test]
    fn l0_agreement_on_random_configs() {
        // The floating-point value of the operator applied to the bare
        // prefactor agrees with the exact-zero statement to 1e-10 at 50
        // random configurations.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let r = rng.random_range(2..=4u32);
            let n = rng.random_range(r.max(2)..=5u32) as usize;
            let mut t_points = Vec::with_capacity(n);
            let mut prev = 0.0f64;
            for _ in 0..n {
                prev += rng.random_range(0.3..=2.0f64);
                t_points.push(prev);
            }
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=8.0f64)).collect();
            let mode = if rng.random_bool(0.5) { ChiMode::GammaHalf } else { ChiMode::TwoOverGamma };
            let cfg = CoulombConfig {
                r,
                chi_mode: mode,
                l: 0,
                t: -rng.random_range(0.1..=1.0f64),
                t_points,
                g: rng.random_range(0.4..=2.0f64),
                a,
                quad_tol: 1e-10,
                max_segments: 1 << 14,
                bpz_tol: 1e-6,
            };
            let report = verify_coulomb_bpz(&cfg).unwrap();
            assert!(
                report.normalized_residual <= 1e-10,
                "trial {trial}: residual {} at {:?}",
                report.normalized_residual,
                cfg
            );
        }
    }

    #[test]
    fn residual_stable_under_tighter_quadrature() {
        // Halving the quadrature tolerance must not push the normalized
        // residual above its own error allowance.
        let mut cfg = config_r2l1();
        let loose = verify_coulomb_bpz(&cfg).unwrap();
        cfg.quad_tol *= 0.5;
        let tight = verify_coulomb_bpz(&cfg).unwrap();
        assert_eq!(tight.status, CoulombStatus::Pass);
        let allowance = (loose.quad_error + tight.quad_error) / loose.normalization.max(1e-300);
        assert!(
            tight.normalized_residual <= loose.normalized_residual + allowance.max(1e-12),
            "loose {} tight {} allowance {}",
            loose.normalized_residual,
            tight.normalized_residual,
            allowance
        );
    }

    #[test]
    fn quadrature_residual_r2_l1() {
        for mode in ChiMode::BOTH {
            let mut cfg = config_r2l1();
            cfg.chi_mode = mode;
            let report = verify_coulomb_bpz(&cfg).unwrap();
            assert_eq!(report.status, CoulombStatus::Pass, "mode {mode}: {report:?}");
            assert!(report.normalized_residual <= 1e-6);
            assert!(report.c_value[0].abs() > 0.0);
        }
    }
}
