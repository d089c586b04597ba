//! Concrete point-configuration rendering of the abstract P symbols, for
//! sphere and boundary geometries. A boundary configuration behaves exactly
//! like the sphere configuration whose insertion list is the bulk points,
//! their mirror images, and the boundary points; that equivalence is the
//! structural content of the boundary case and is pinned by a test. This
//! module is demonstrational: plain double-precision complex arithmetic.

use crate::ratfunc::RatFuncError;
use crate::termalg::LinComb;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("configuration points must be pairwise distinct and distinct from the degenerate point")]
    CoincidentPoints,
    #[error("bulk points must have positive imaginary part; boundary points are real")]
    BadGeometry,
    #[error("no q-value supplied for q-part {0:?}")]
    MissingQValue(Vec<u32>),
    #[error("coefficient evaluation failed: {0}")]
    Coefficient(#[from] RatFuncError),
    #[error("invalid configuration file: {0}")]
    BadJson(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SphereInsertion {
    pub location: [f64; 2],
    pub weight: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundaryInsertion {
    pub location: f64,
    pub weight: [f64; 2],
}

/// Point data for one geometry. Bulk insertions on the boundary geometry
/// contribute their mirror image with the same weight.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "geometry", rename_all = "lowercase")]
pub enum PointConfig {
    Sphere {
        degenerate: [f64; 2],
        insertions: Vec<SphereInsertion>,
    },
    Boundary {
        degenerate: [f64; 2],
        bulk: Vec<SphereInsertion>,
        boundary: Vec<BoundaryInsertion>,
    },
}

fn cx(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

impl PointConfig {
    pub fn from_json(text: &str) -> Result<PointConfig, EvalError> {
        let cfg: PointConfig =
            serde_json::from_str(text).map_err(|e| EvalError::BadJson(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn degenerate(&self) -> Complex64 {
        match self {
            PointConfig::Sphere { degenerate, .. } => cx(*degenerate),
            PointConfig::Boundary { degenerate, .. } => cx(*degenerate),
        }
    }

    /// Effective (location, weight) list: boundary configurations expand
    /// into bulk points, their mirrors, and the boundary points.
    pub fn effective_insertions(&self) -> Vec<(Complex64, Complex64)> {
        match self {
            PointConfig::Sphere { insertions, .. } => {
                insertions.iter().map(|i| (cx(i.location), cx(i.weight))).collect()
            }
            PointConfig::Boundary { bulk, boundary, .. } => {
                let mut out = Vec::with_capacity(2 * bulk.len() + boundary.len());
                for i in bulk {
                    let z = cx(i.location);
                    let w = cx(i.weight);
                    out.push((z, w));
                    out.push((z.conj(), w));
                }
                for b in boundary {
                    out.push((Complex64::new(b.location, 0.0), cx(b.weight)));
                }
                out
            }
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if let PointConfig::Boundary { bulk, .. } = self {
            if bulk.iter().any(|i| i.location[1] <= 0.0) {
                return Err(EvalError::BadGeometry);
            }
        }
        let z = self.degenerate();
        let pts = self.effective_insertions();
        for (i, (zi, _)) in pts.iter().enumerate() {
            if *zi == z {
                return Err(EvalError::CoincidentPoints);
            }
            for (zj, _) in pts.iter().take(i) {
                if zi == zj {
                    return Err(EvalError::CoincidentPoints);
                }
            }
        }
        Ok(())
    }

    /// The weighted power sum sum_l w_l / (2 (z_l - z)^n) at the degenerate
    /// point, over the geometry's effective insertions.
    pub fn evaluate_p(&self, n: u32) -> Result<Complex64, EvalError> {
        self.validate()?;
        let z = self.degenerate();
        let mut acc = Complex64::new(0.0, 0.0);
        for (zl, wl) in self.effective_insertions() {
            acc += wl / (2.0 * (zl - z).powi(n as i32));
        }
        Ok(acc)
    }
}

/// Numeric rendering of a linear combination: coefficients evaluated at
/// gamma0, P factors from the configuration, q-symbols supplied externally
/// since their integrals are not computed here.
pub fn evaluate_lincomb(
    cfg: &PointConfig,
    v: &LinComb,
    q_values: &BTreeMap<Vec<u32>, Complex64>,
    gamma0: Complex64,
) -> Result<Complex64, EvalError> {
    let mut total = Complex64::new(0.0, 0.0);
    for (key, coeff) in v.iter() {
        let qv = q_values
            .get(key.q_part())
            .ok_or_else(|| EvalError::MissingQValue(key.q_part().to_vec()))?;
        let mut term = coeff.eval_complex(gamma0)? * qv;
        for &n in key.p_part() {
            term *= cfg.evaluate_p(n)?;
        }
        total += term;
    }
    Ok(total)
}
