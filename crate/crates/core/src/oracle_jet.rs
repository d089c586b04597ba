//! Independent verification that the full order-r operator annihilates the
//! plain power-product integrand, computed without the rewrite rule: the raw
//! differential operators act through truncated-Taylor arithmetic at a
//! random rational base point, with coefficients in the nilpotent quotient
//! where every insertion weight squares to zero. Every pass/fail is an
//! exact rational-arithmetic statement; a nonzero coefficient anywhere
//! would fail a random trial with overwhelming probability.

use crate::bsa::{bsa_coefficient, compositions, BsaError};
use crate::jet::{Coeff, Jet, JetError, JetSpace};
use crate::lowering::LoweringOps;
use crate::nilpotent::NilCoeff;
use crate::ratfunc::{chi, q_charge, ChiMode, RatFunc};
use num_integer::Integer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("the oracle requires N >= r, got N = {n}, r = {r}")]
    InsertionsBelowOrder { n: usize, r: u32 },
    #[error("at most 7 insertions are supported by the jet encoding, got {0}")]
    TooManyInsertions(usize),
    #[error("need at least one trial")]
    NoTrials,
    #[error("base point coordinates must be pairwise distinct")]
    CoincidentPoints,
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Bsa(#[from] BsaError),
}

/// Exact rational base point: coordinate 0 is the degenerate location t,
/// coordinates 1..=N are the insertion locations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePoint {
    coords: Vec<(i64, i64)>,
}

impl BasePoint {
    pub fn new(coords: Vec<(i64, i64)>) -> Result<BasePoint, OracleError> {
        let reduced: Vec<(i64, i64)> = coords.iter().map(|&(n, d)| reduce_fraction(n, d)).collect();
        for i in 0..reduced.len() {
            for j in 0..i {
                if reduced[i] == reduced[j] {
                    return Err(OracleError::CoincidentPoints);
                }
            }
        }
        Ok(BasePoint { coords: reduced })
    }

    pub fn coords(&self) -> &[(i64, i64)] {
        &self.coords
    }

    fn coord_ratfunc(&self, i: usize) -> RatFunc {
        RatFunc::from_fraction(self.coords[i].0, self.coords[i].1)
    }

    pub fn render(&self) -> Vec<String> {
        self.coords
            .iter()
            .map(|&(n, d)| if d == 1 { n.to_string() } else { format!("{}/{}", n, d) })
            .collect()
    }
}

fn reduce_fraction(n: i64, d: i64) -> (i64, i64) {
    assert!(d != 0);
    let g = n.gcd(&d);
    let (mut n, mut d) = if g == 0 { (0, 1) } else { (n / g, d / g) };
    if d < 0 {
        n = -n;
        d = -d;
    }
    (n, d)
}

/// Precomputed operator jets for one (r, mode, base point) configuration.
pub struct IntegrandJets {
    lowering: LoweringOps<NilCoeff>,
    mode: ChiMode,
    /// d/dt_l of log f, one jet per insertion.
    log_derivs: Vec<Jet<NilCoeff>>,
    /// d/dt of log f.
    log_deriv_t: Jet<NilCoeff>,
}

impl IntegrandJets {
    pub fn build(r: u32, mode: ChiMode, base: &BasePoint) -> Result<IntegrandJets, OracleError> {
        let n_insertions = base.coords.len() - 1;
        if n_insertions + 1 > 8 {
            return Err(OracleError::TooManyInsertions(n_insertions));
        }
        let order = r.saturating_sub(1);
        let space = std::sync::Arc::new(JetSpace::new(n_insertions + 1, order)?);
        let nil = |c: RatFunc| NilCoeff::scalar(c);
        let half = RatFunc::from_fraction(1, 2);
        let rm1_chi = &RatFunc::from_int(i64::from(r) - 1) * &chi(mode);

        // Linear jets of coordinate differences and their reciprocals.
        let diff = |a: usize, b: usize| -> Jet<NilCoeff> {
            let va = space.variable(a, nil(base.coord_ratfunc(a)), order);
            let vb = space.variable(b, nil(base.coord_ratfunc(b)), order);
            space.sub(&va, &vb).expect("same order")
        };

        let mut recip_pow = Vec::with_capacity(n_insertions + 1);
        recip_pow.push(Vec::new()); // slot 0 unused
        for l in 1..=n_insertions {
            let rec = space.recip(&diff(l, 0))?;
            let mut powers = Vec::with_capacity(r as usize + 1);
            powers.push(space.constant(order, NilCoeff::one()));
            for m in 1..=r {
                let prev = &powers[(m - 1) as usize];
                powers.push(space.mul(prev, &rec, None));
            }
            recip_pow.push(powers);
        }

        // d/dt_l log f = sum_{j != l} (-a_l a_j / 2) / (t_l - t_j)
        //               + (r-1) chi a_l / (2 (t_l - t))
        let mut log_derivs = Vec::with_capacity(n_insertions + 1);
        log_derivs.push(space.constant(order, NilCoeff::zero())); // slot 0 unused
        for l in 1..=n_insertions {
            let mut acc = space.constant(order, NilCoeff::zero());
            for j in 1..=n_insertions {
                if j == l {
                    continue;
                }
                let rec = space.recip(&diff(l, j))?;
                let w = NilCoeff::alpha(l)
                    .mul(&NilCoeff::alpha(j))
                    .scale(&-&half);
                acc = space.add(&acc, &space.scale(&rec, &w)).expect("same order");
            }
            let w = NilCoeff::alpha(l).scale(&(&rm1_chi * &half));
            acc = space
                .add(&acc, &space.scale(&recip_pow[l][1], &w))
                .expect("same order");
            log_derivs.push(acc);
        }

        // d/dt log f = -(r-1) chi sum_i a_i / (2 (t_i - t))
        let mut log_deriv_t = space.constant(order, NilCoeff::zero());
        for i in 1..=n_insertions {
            let w = NilCoeff::alpha(i).scale(&-&(&rm1_chi * &half));
            log_deriv_t = space
                .add(&log_deriv_t, &space.scale(&recip_pow[i][1], &w))
                .expect("same order");
        }

        // In the quotient the conformal weight collapses to a_l Q / 2.
        let q_half = &q_charge() * &half;
        let mut ops = Vec::with_capacity(r as usize + 1);
        ops.push(space.constant(order, NilCoeff::zero())); // slot 0 unused
        ops.push(log_deriv_t.clone()); // index 1 acts as d/dt
        for n in 2..=r {
            let mut acc = space.constant(order, NilCoeff::zero());
            for l in 1..=n_insertions {
                let lead = space.mul(&recip_pow[l][(n - 1) as usize], &log_derivs[l], None);
                acc = space.add(&acc, &space.neg(&lead)).expect("same order");
                let w = NilCoeff::alpha(l).scale(&(&RatFunc::from_int(i64::from(n) - 1) * &q_half));
                acc = space
                    .add(&acc, &space.scale(&recip_pow[l][n as usize], &w))
                    .expect("same order");
            }
            ops.push(acc);
        }

        Ok(IntegrandJets {
            lowering: LoweringOps {
                space,
                r,
                n_insertions,
                ops,
                recip_pow: std::sync::Arc::new(recip_pow),
            },
            mode,
            log_derivs,
            log_deriv_t,
        })
    }

    pub fn space(&self) -> &JetSpace {
        &self.lowering.space
    }

    /// d/dt_l log f as a jet (l = 0 is the degenerate coordinate t).
    pub fn log_derivative(&self, l: usize) -> &Jet<NilCoeff> {
        if l == 0 {
            &self.log_deriv_t
        } else {
            &self.log_derivs[l]
        }
    }

    pub fn unit(&self) -> Jet<NilCoeff> {
        self.space().constant(self.space().max_order(), NilCoeff::one())
    }

    /// Apply the index-n lowering operator to a tracked prefactor g (the
    /// represented function is g * f). Consumes one order of g.
    pub fn apply_lowering(&self, n: u32, g: &Jet<NilCoeff>) -> Result<Jet<NilCoeff>, OracleError> {
        Ok(self.lowering.apply(n, g)?)
    }

    /// Constant-term value of every composition word applied to g = 1,
    /// sharing partial applications across words with a common tail.
    /// Returned in the same order as `compositions(r)`.
    pub fn word_values(&self) -> Result<Vec<(Vec<u32>, NilCoeff)>, OracleError> {
        Ok(self.lowering.word_values()?)
    }

    /// The full operator value: sum of composition coefficients times word
    /// values. Identically zero when the theorem holds.
    pub fn total(&self) -> Result<NilCoeff, OracleError> {
        let words = self.word_values()?;
        debug_assert_eq!(words.len(), compositions(self.lowering.r)?.len());
        let mut total = NilCoeff::new();
        for (word, value) in &words {
            let coeff = bsa_coefficient(word, self.lowering.r, self.mode)?;
            total = total.add(&value.scale(&coeff));
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct JetTrial {
    pub point: Vec<String>,
    pub zero: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct JetOracleReport {
    pub r: u32,
    pub mode: ChiMode,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub trials: Vec<JetTrial>,
    pub all_zero: bool,
}

impl JetOracleReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Draw pairwise-distinct small rationals: numerators within +/-100,
/// denominators up to 16.
pub fn sample_base_point(rng: &mut ChaCha8Rng, n_coords: usize) -> BasePoint {
    let mut coords: Vec<(i64, i64)> = Vec::with_capacity(n_coords);
    while coords.len() < n_coords {
        let num = rng.random_range(-100..=100i64);
        let den = rng.random_range(1..=16i64);
        let c = reduce_fraction(num, den);
        if !coords.contains(&c) {
            coords.push(c);
        }
    }
    BasePoint::new(coords).expect("sampled coordinates are distinct")
}

/// Run seeded random-point trials of the order-r identity on the integrand,
/// requiring N >= r insertions.
pub fn verify_integrand_bpz(
    r: u32,
    mode: ChiMode,
    n_insertions: usize,
    trials: u32,
    seed: u64,
) -> Result<JetOracleReport, OracleError> {
    if (n_insertions as u64) < u64::from(r) {
        return Err(OracleError::InsertionsBelowOrder { n: n_insertions, r });
    }
    if n_insertions + 1 > 8 {
        return Err(OracleError::TooManyInsertions(n_insertions));
    }
    if trials == 0 {
        return Err(OracleError::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<BasePoint> = (0..trials)
        .map(|_| sample_base_point(&mut rng, n_insertions + 1))
        .collect();

    use rayon::prelude::*;
    let results: Result<Vec<JetTrial>, OracleError> = points
        .par_iter()
        .map(|point| {
            let ctx = IntegrandJets::build(r, mode, point)?;
            let total = ctx.total()?;
            Ok(JetTrial { point: point.render(), zero: total.is_empty() })
        })
        .collect();
    let trials = results?;
    let all_zero = trials.iter().all(|t| t.zero);
    Ok(JetOracleReport { r, mode, n: n_insertions, seed, trials, all_zero })
}
