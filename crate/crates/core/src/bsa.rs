//! Construction of the order-r operator as a weighted sum over integer
//! compositions of r, expansion of its action on Q_0 in the term algebra,
//! and the exact zero-verification of the resulting coefficient table.

use crate::ratfunc::{chi, ChiMode, RatFunc};
use crate::termalg::{LinComb, TermKey};
use crate::virasoro::{apply_word_with_order, RuleError, RuleFault, RuleParams, WordOrder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BsaError {
    #[error("order must be >= {min}, got {got}")]
    OrderTooSmall { min: u32, got: u32 },
    #[error("composition {composition:?} does not sum to {r}")]
    SumMismatch { composition: Vec<u32>, r: u32 },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// All compositions of r, ordered by length and then lexicographically;
/// there are exactly 2^(r-1) of them.
pub fn compositions(r: u32) -> Result<Vec<Vec<u32>>, BsaError> {
    if r < 1 {
        return Err(BsaError::OrderTooSmall { min: 1, got: r });
    }
    let mut out = Vec::with_capacity(1 << (r - 1).min(20));
    let mut current = Vec::new();
    fn rec(remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in 1..=remaining {
            current.push(part);
            rec(remaining - part, current, out);
            current.pop();
        }
    }
    rec(r, &mut current, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Coefficient of one composition: (chi^2)^(r-k) over the product of
/// partial-sum pairs s_j (r - s_j), j = 1..k-1.
pub fn bsa_coefficient(composition: &[u32], r: u32, mode: ChiMode) -> Result<RatFunc, BsaError> {
    let sum: u32 = composition.iter().sum();
    if sum != r || composition.contains(&0) {
        return Err(BsaError::SumMismatch { composition: composition.to_vec(), r });
    }
    let k = composition.len() as u32;
    let chi_sq = {
        let x = chi(mode);
        &x * &x
    };
    let mut denom: i64 = 1;
    let mut partial: i64 = 0;
    for &n in &composition[..composition.len() - 1] {
        partial += i64::from(n);
        denom *= partial * (i64::from(r) - partial);
    }
    let num = chi_sq.pow((r - k) as i32).expect("nonnegative power");
    Ok(num
        .checked_div(&RatFunc::from_int(denom))
        .expect("partial sums are positive"))
}

/// Expand the full operator applied to Q_0. Every surviving key has degree
/// r by the grading; the theorem says none survive.
pub fn expand_dr(r: u32, mode: ChiMode) -> Result<LinComb, BsaError> {
    expand_dr_with(r, mode, None, WordOrder::RightmostFirst)
}

pub fn expand_dr_with(
    r: u32,
    mode: ChiMode,
    fault: Option<RuleFault>,
    order: WordOrder,
) -> Result<LinComb, BsaError> {
    if r < 2 {
        return Err(BsaError::OrderTooSmall { min: 2, got: r });
    }
    let comps = compositions(r)?;
    let mut params = RuleParams::full(r, mode);
    params.fault = fault;
    let start = LinComb::single(TermKey::q0(), RatFunc::one());

    // One task per composition; the merge is associative and performed in
    // the fixed enumeration order so the result is schedule-independent.
    let partials: Result<Vec<LinComb>, BsaError> = comps
        .par_iter()
        .map(|c| {
            let coeff = bsa_coefficient(c, r, mode)?;
            let term = apply_word_with_order(c, &start, &params, order)?;
            Ok(term.scaled(&coeff))
        })
        .collect();
    let partials = partials?;
    let mut total = LinComb::new();
    for p in &partials {
        total.add_scaled(&RatFunc::one(), p);
    }
    Ok(total)
}

/// One rendered row of the lambda table.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LambdaEntry {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VerificationReport {
    pub r: u32,
    pub chi_mode: ChiMode,
    pub all_zero: bool,
    pub lambda: Vec<LambdaEntry>,
    pub n_compositions: usize,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// CSV rendering of the lambda table: columns p, q, value, with the
    /// multiset entries space-separated.
    pub fn lambda_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["p", "q", "value"]).expect("csv header");
        for e in &self.lambda {
            let join = |v: &[u32]| {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
            };
            wtr.write_record([join(&e.p), join(&e.q), e.value.clone()])
                .expect("csv row");
        }
        String::from_utf8(wtr.into_inner().expect("csv flush")).expect("csv utf8")
    }
}

fn lambda_table(table: &LinComb) -> Vec<LambdaEntry> {
    table
        .iter()
        .map(|(k, c)| LambdaEntry {
            p: k.p_part().to_vec(),
            q: k.q_part().to_vec(),
            value: c.to_string(),
        })
        .collect()
}

/// Run the zero-verification for one order and mode. A nonzero table is a
/// mathematical finding reported through `all_zero`, not an error.
pub fn verify_bpz(r: u32, mode: ChiMode) -> Result<VerificationReport, BsaError> {
    verify_bpz_with_fault(r, mode, None)
}

pub fn verify_bpz_with_fault(
    r: u32,
    mode: ChiMode,
    fault: Option<RuleFault>,
) -> Result<VerificationReport, BsaError> {
    let started = std::time::Instant::now();
    let table = expand_dr_with(r, mode, fault, WordOrder::RightmostFirst)?;
    let n_compositions = 1usize << (r - 1);
    Ok(VerificationReport {
        r,
        chi_mode: mode,
        all_zero: table.is_empty(),
        lambda: lambda_table(&table),
        n_compositions,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termalg::canonicalize;
    use crate::virasoro::apply_word;

    #[test]
    fn compositions_enumeration() {
        assert_eq!(
            compositions(3).unwrap(),
            vec![vec![3], vec![1, 2], vec![2, 1], vec![1, 1, 1]]
        );
        assert_eq!(compositions(1).unwrap(), vec![vec![1]]);
        assert_eq!(compositions(6).unwrap().len(), 32);
        assert!(compositions(0).is_err());
    }

    #[test]
    fn coefficients_order_two_and_three() {
        for mode in ChiMode::BOTH {
            let x = chi(mode);
            let x2 = &x * &x;
            let x4 = &x2 * &x2;
            assert_eq!(bsa_coefficient(&[2], 2, mode).unwrap(), x2);
            assert_eq!(bsa_coefficient(&[1, 1], 2, mode).unwrap(), RatFunc::one());
            assert_eq!(bsa_coefficient(&[3], 3, mode).unwrap(), x4);
            let half = RatFunc::from_fraction(1, 2);
            assert_eq!(bsa_coefficient(&[1, 2], 3, mode).unwrap(), &x2 * &half);
            assert_eq!(bsa_coefficient(&[2, 1], 3, mode).unwrap(), &x2 * &half);
            assert_eq!(
                bsa_coefficient(&[1, 1, 1], 3, mode).unwrap(),
                RatFunc::from_fraction(1, 4)
            );
        }
    }

    #[test]
    fn coefficient_sum_mismatch_is_error() {
        assert!(bsa_coefficient(&[2, 2], 3, ChiMode::GammaHalf).is_err());
    }

    #[test]
    fn coefficient_reversal_symmetry_small() {
        for r in 2..=8u32 {
            for c in compositions(r).unwrap() {
                let mut rev = c.clone();
                rev.reverse();
                assert_eq!(
                    bsa_coefficient(&c, r, ChiMode::GammaHalf).unwrap(),
                    bsa_coefficient(&rev, r, ChiMode::GammaHalf).unwrap()
                );
            }
        }
    }

    #[test]
    fn order_two_expansion_is_empty() {
        for mode in ChiMode::BOTH {
            assert!(expand_dr(2, mode).unwrap().is_empty());
        }
    }

    #[test]
    fn order_three_partial_sum_matches_golden() {
        // chi^2 L_{-2} Q_0 + (1/4) L_{-1}^2 Q_0
        //   = (chi/2 - chi^3) P_2 Q_0 + (chi^3 - chi/2) Q_2   at r = 3
        for mode in ChiMode::BOTH {
            let params = RuleParams::full(3, mode);
            let start = LinComb::single(TermKey::q0(), RatFunc::one());
            let x = chi(mode);
            let x2 = &x * &x;
            let quarter = RatFunc::from_fraction(1, 4);

            let mut acc = apply_word(&[2], &start, &params).unwrap().scaled(&x2);
            acc.add_scaled(&quarter, &apply_word(&[1, 1], &start, &params).unwrap());

            let x3 = &x2 * &x;
            let half_x = &x * &RatFunc::from_fraction(1, 2);
            let p2 = canonicalize(&[2], &[]).unwrap();
            let q2 = canonicalize(&[], &[2]).unwrap();
            assert_eq!(acc.len(), 2, "mode {}: {:?}", mode, acc);
            assert_eq!(acc.coeff(&p2), Some(&(&half_x - &x3)));
            assert_eq!(acc.coeff(&q2), Some(&(&x3 - &half_x)));
        }
    }

    #[test]
    fn verify_order_three() {
        for mode in ChiMode::BOTH {
            let report = verify_bpz(3, mode).unwrap();
            assert!(report.all_zero);
            assert!(report.lambda.is_empty());
            assert_eq!(report.n_compositions, 4);
        }
    }

    #[test]
    fn word_order_convention_is_immaterial() {
        for mode in ChiMode::BOTH {
            let right = expand_dr_with(4, mode, None, WordOrder::RightmostFirst).unwrap();
            let left = expand_dr_with(4, mode, None, WordOrder::LeftmostFirst).unwrap();
            assert_eq!(right, left);
            assert!(right.is_empty());
        }
    }

    #[test]
    fn expand_rejects_r_below_two() {
        assert!(expand_dr(1, ChiMode::GammaHalf).is_err());
    }

    #[test]
    fn report_csv_has_header_even_when_empty() {
        let report = verify_bpz(2, ChiMode::GammaHalf).unwrap();
        let csv = report.lambda_csv();
        assert!(csv.starts_with("p,q,value"));
    }

    #[test]
    fn faulted_expansion_is_nonzero() {
        let table =
            expand_dr_with(3, ChiMode::GammaHalf, Some(RuleFault::NewQ), WordOrder::RightmostFirst)
                .unwrap();
        assert!(!table.is_empty());
    }
}
