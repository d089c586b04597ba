//! Adaptive Gauss-Kronrod (7-15) quadrature for complex vector-valued
//! integrands, and nested integration over the ordered chamber
//! a < x_1 < ... < x_l < b. Segment subdivision picks the worst segment by
//! its largest per-component error; the final sum runs over segments sorted
//! by position, so results do not depend on evaluation scheduling.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum QuadratureError {
    #[error("quadrature failed to converge within {max_segments} segments (best error {error:.3e})")]
    NoConvergence {
        value: Vec<Complex64>,
        error: f64,
        max_segments: usize,
    },
    #[error("simplex dimension must be >= 1")]
    InvalidDimension,
    #[error("integrand evaluation failed: {0}")]
    Evaluation(String),
}

// 15-point Kronrod abscissae (positive half), 15-point Kronrod weights and
// embedded 7-point Gauss weights, to QUADPACK precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

type VecIntegrand<'a> = dyn Fn(f64) -> Result<Vec<Complex64>, QuadratureError> + 'a;

/// Chamber integrand: full coordinate vector in, component vector out.
pub type ChamberIntegrand = dyn Fn(&[f64]) -> Result<Vec<Complex64>, QuadratureError> + Sync;

struct Segment {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    /// Per-component error estimate.
    err: Vec<f64>,
}

/// QUADPACK-style error rescale against the deviation integral.
fn rescale_error(raw: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = raw;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// One 15-point Kronrod rule application with the embedded Gauss estimate.
fn qk15(
    f: &VecIntegrand,
    a: f64,
    b: f64,
    dim: usize,
) -> Result<(Vec<Complex64>, Vec<f64>), QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    // Node values: index 0..7 holds f(center - half*XGK[i]) for i = 0..7,
    // index 8..15 the mirrored nodes (index 7 is the center, stored once).
    let mut nodes = Vec::with_capacity(15);
    let f_center = f(center)?;
    if f_center.len() != dim {
        return Err(QuadratureError::Evaluation("integrand dimension changed".into()));
    }
    let mut lows = Vec::with_capacity(7);
    let mut highs = Vec::with_capacity(7);
    for i in 0..7 {
        let dx = half * XGK[i];
        lows.push(f(center - dx)?);
        highs.push(f(center + dx)?);
    }
    nodes.push(f_center);

    let mut value = vec![Complex64::new(0.0, 0.0); dim];
    let mut err = vec![0.0f64; dim];
    for c in 0..dim {
        let fc = nodes[0][c];
        let mut kronrod = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut res_abs = WGK[7] * fc.norm();
        for i in 0..7 {
            let s = lows[i][c] + highs[i][c];
            kronrod += WGK[i] * s;
            res_abs += WGK[i] * (lows[i][c].norm() + highs[i][c].norm());
            if i % 2 == 1 {
                gauss += WG[i / 2] * s;
            }
        }
        let mean = kronrod * 0.5;
        let mut res_asc = WGK[7] * (fc - mean).norm();
        for i in 0..7 {
            res_asc += WGK[i] * ((lows[i][c] - mean).norm() + (highs[i][c] - mean).norm());
        }
        let habs = half.abs();
        value[c] = kronrod * half;
        let raw = ((kronrod - gauss) * half).norm();
        err[c] = rescale_error(raw, res_abs * habs, res_asc * habs);
    }
    Ok((value, err))
}

/// Adaptive integration of a vector-valued integrand over [a, b]. Converges
/// when every component's accumulated error is at most
/// tol * (1 + |component value|).
pub fn integrate_adaptive_vec(
    f: &VecIntegrand,
    a: f64,
    b: f64,
    dim: usize,
    tol: f64,
    max_segments: usize,
) -> Result<(Vec<Complex64>, f64), QuadratureError> {
    let (value, err) = qk15(f, a, b, dim)?;
    let mut segments = vec![Segment { a, b, value, err }];

    loop {
        let mut total = vec![Complex64::new(0.0, 0.0); dim];
        let mut total_err = vec![0.0f64; dim];
        for s in &segments {
            for c in 0..dim {
                total[c] += s.value[c];
                total_err[c] += s.err[c];
            }
        }
        let converged = (0..dim).all(|c| total_err[c] <= tol * (1.0 + total[c].norm()));
        if converged {
            let mut order: Vec<usize> = (0..segments.len()).collect();
            order.sort_by(|&i, &j| segments[i].a.total_cmp(&segments[j].a));
            let mut value = vec![Complex64::new(0.0, 0.0); dim];
            let mut worst = 0.0f64;
            for idx in order {
                for c in 0..dim {
                    value[c] += segments[idx].value[c];
                }
                worst += segments[idx].err.iter().fold(0.0f64, |m, &e| m.max(e));
            }
            return Ok((value, worst));
        }
        if segments.len() >= max_segments {
            let error = total_err.iter().fold(0.0f64, |m, &e| m.max(e));
            return Err(QuadratureError::NoConvergence {
                value: total,
                error,
                max_segments,
            });
        }
        // Split the segment with the largest single-component error; ties
        // break on the left endpoint so the refinement path is reproducible.
        let (widx, _) = segments
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.err.iter().fold(0.0f64, |m, &e| m.max(e))))
            .max_by(|(i, ei), (j, ej)| {
                ei.total_cmp(ej)
                    .then_with(|| segments[*j].a.total_cmp(&segments[*i].a))
            })
            .expect("nonempty segment list");
        let seg = segments.swap_remove(widx);
        let mid = 0.5 * (seg.a + seg.b);
        if !(seg.a < mid && mid < seg.b) {
            // Interval too small to split further.
            let error = seg.err.iter().fold(0.0f64, |m, &e| m.max(e));
            return Err(QuadratureError::NoConvergence {
                value: seg.value,
                error,
                max_segments,
            });
        }
        let (lv, le) = qk15(f, seg.a, mid, dim)?;
        let (rv, re) = qk15(f, mid, seg.b, dim)?;
        segments.push(Segment { a: seg.a, b: mid, value: lv, err: le });
        segments.push(Segment { a: mid, b: seg.b, value: rv, err: re });
    }
}

/// Scalar complex adaptive integration over [a, b].
pub fn integrate_complex(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    max_segments: usize,
) -> Result<(Complex64, f64), QuadratureError> {
    let wrapped: &VecIntegrand = &|x| Ok(vec![f(x)]);
    let (v, e) = integrate_adaptive_vec(wrapped, a, b, 1, tol, max_segments)?;
    Ok((v[0], e))
}

/// Nested adaptive integration of a vector-valued integrand over the ordered
/// chamber a < x_1 < ... < x_l < b. The innermost variable is x_1.
pub fn integrate_simplex_vec(
    h: &ChamberIntegrand,
    l: usize,
    bounds: (f64, f64),
    dim: usize,
    tol: f64,
    max_segments: usize,
) -> Result<(Vec<Complex64>, f64), QuadratureError> {
    if l == 0 {
        return Err(QuadratureError::InvalidDimension);
    }
    let (a, b) = bounds;
    struct Nest {
        a: f64,
        dim: usize,
        max_segments: usize,
    }
    // Inner levels run at a modestly tighter tolerance; their errors
    // accumulate into the outer estimate through the integrand values.
    fn rec(
        h: &ChamberIntegrand,
        nest: &Nest,
        depth: usize,
        upper: f64,
        outer: &[f64],
        tol: f64,
    ) -> Result<(Vec<Complex64>, f64), QuadratureError> {
        if depth == 1 {
            let f: &VecIntegrand = &|x| {
                let mut point = Vec::with_capacity(outer.len() + 1);
                point.push(x);
                point.extend(outer.iter().rev());
                h(&point)
            };
            return integrate_adaptive_vec(f, nest.a, upper, nest.dim, tol, nest.max_segments);
        }
        let inner_tol = tol * 0.25;
        let f: &VecIntegrand = &|x| {
            let mut outer_next = outer.to_vec();
            outer_next.push(x);
            let (v, _) = rec(h, nest, depth - 1, x, &outer_next, inner_tol)?;
            Ok(v)
        };
        integrate_adaptive_vec(f, nest.a, upper, nest.dim, tol, nest.max_segments)
    }
    let nest = Nest { a, dim, max_segments };
    rec(h, &nest, l, b, &[], tol)
}

/// Scalar form of the ordered-chamber integral, with the documented
/// a-posteriori contract: on success the error estimate is at most
/// tol * (1 + |value|).
pub fn integrate_simplex(
    h: &(dyn Fn(&[f64]) -> Complex64 + Sync),
    l: usize,
    bounds: (f64, f64),
    tol: f64,
    max_segments: usize,
) -> Result<(Complex64, f64), QuadratureError> {
    let wrapped = move |point: &[f64]| -> Result<Vec<Complex64>, QuadratureError> {
        Ok(vec![h(point)])
    };
    let (v, e) = integrate_simplex_vec(&wrapped, l, bounds, 1, tol, max_segments)?;
    Ok((v[0], e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn interval_length() {
        let (v, e) = integrate_simplex(&|_| c(1.0), 1, (1.0, 2.0), 1e-12, 1 << 14).unwrap();
        assert!((v.re - 1.0).abs() <= 1e-12, "got {} err {}", v.re, e);
    }

    #[test]
    fn simplex_volume() {
        let (v, _) = integrate_simplex(&|_| c(1.0), 2, (1.0, 2.0), 1e-12, 1 << 14).unwrap();
        assert!((v.re - 0.5).abs() <= 1e-12, "got {}", v.re);
    }

    #[test]
    fn beta_three_three() {
        // int_1^2 (x-1)^2 (2-x)^2 dx = B(3,3) = 1/30
        let h = |p: &[f64]| {
            let x = p[0];
            c((x - 1.0).powi(2) * (2.0 - x).powi(2))
        };
        let (v, _) = integrate_simplex(&h, 1, (1.0, 2.0), 1e-12, 1 << 14).unwrap();
        assert!((v.re - 1.0 / 30.0).abs() <= 1e-12, "got {}", v.re);
    }

    #[test]
    fn ordered_chamber_matches_closed_form() {
        // int_{0 < x1 < x2 < 1} x1 x2 = 1/8
        let h = |p: &[f64]| c(p[0] * p[1]);
        let (v, _) = integrate_simplex(&h, 2, (0.0, 1.0), 1e-11, 1 << 14).unwrap();
        assert!((v.re - 0.125).abs() <= 1e-10, "got {}", v.re);
    }

    #[test]
    fn chamber_ordering_is_respected() {
        // The integrand sees x1 < x2 everywhere.
        let h = |p: &[f64]| {
            assert!(p[0] <= p[1]);
            c(1.0)
        };
        integrate_simplex(&h, 2, (0.0, 1.0), 1e-9, 1 << 14).unwrap();
    }

    #[test]
    fn sqrt_endpoint_converges() {
        // int_0^1 sqrt(x) dx = 2/3; endpoint cusp exercises subdivision.
        let (v, _) =
            integrate_simplex(&|p| c(p[0].sqrt()), 1, (0.0, 1.0), 1e-10, 1 << 14).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() <= 1e-9, "got {}", v.re);
    }

    #[test]
    fn non_convergence_carries_best_estimate() {
        // A hard singular integrand with a starved segment budget.
        let h = |p: &[f64]| c(1.0 / (p[0] + 1e-12).sqrt());
        let err = integrate_simplex(&h, 1, (0.0, 1.0), 1e-13, 4).unwrap_err();
        match err {
            QuadratureError::NoConvergence { value, error, .. } => {
                assert!(value[0].re > 0.0);
                assert!(error > 0.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn oscillatory_integral() {
        // int_0^pi sin(x) dx = 2
        let (v, _) =
            integrate_simplex(&|p| c(p[0].sin()), 1, (0.0, std::f64::consts::PI), 1e-12, 1 << 14)
                .unwrap();
        assert!((v.re - 2.0).abs() <= 1e-12);
    }
}
