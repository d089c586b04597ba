//! The lowering-operator rewrite action on basis keys. `Full` implements the
//! complete recursion on P/Q keys inside its validity range
//! n + |p| + |q| <= r; `Integrand` implements the Q-free projection used for
//! plain integrand verification. The n = 1 case falls out of the same
//! formula with all internal sums empty.

use crate::ratfunc::{chi, q_charge, ChiMode, RatFunc};
use crate::termalg::{LinComb, TermKey};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("lowering index must be >= 1, got {0}")]
    BadIndex(i64),
    #[error("degree budget exceeded: n + |p| + |q| = {actual} > r = {r}")]
    DegreeBudget { actual: u32, r: u32 },
    #[error("integrand rule applies only to keys with empty q-part")]
    NonEmptyQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Full,
    Integrand,
}

/// Identifies one coefficient group of the rewrite rule for fault injection.
/// The regression sentinel bumps a single group by +1 and checks that the
/// downstream zero-verification catches it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFault {
    ReplaceP,
    PairP,
    WeightP,
    PNewQ,
    NewQ,
    TwoNewQ,
    PRaiseQ,
    RaiseQ,
    NewQRaiseQ,
    PairRaiseQ,
}

impl RuleFault {
    pub const ALL: [RuleFault; 10] = [
        RuleFault::ReplaceP,
        RuleFault::PairP,
        RuleFault::WeightP,
        RuleFault::PNewQ,
        RuleFault::NewQ,
        RuleFault::TwoNewQ,
        RuleFault::PRaiseQ,
        RuleFault::RaiseQ,
        RuleFault::NewQRaiseQ,
        RuleFault::PairRaiseQ,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleParams {
    pub r: u32,
    pub mode: ChiMode,
    pub kind: RuleKind,
    pub fault: Option<RuleFault>,
}

impl RuleParams {
    pub fn new(r: u32, mode: ChiMode, kind: RuleKind) -> RuleParams {
        RuleParams { r, mode, kind, fault: None }
    }

    pub fn full(r: u32, mode: ChiMode) -> RuleParams {
        RuleParams::new(r, mode, RuleKind::Full)
    }

    pub fn integrand(r: u32, mode: ChiMode) -> RuleParams {
        RuleParams::new(r, mode, RuleKind::Integrand)
    }

    pub fn with_fault(mut self, fault: RuleFault) -> RuleParams {
        self.fault = Some(fault);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordOrder {
    /// The rightmost operator of the word acts first (operator composition).
    RightmostFirst,
    /// Reversed reading; must give the same summed operator by the reversal
    /// symmetry of the composition coefficients.
    LeftmostFirst,
}

struct GroupCoeffs {
    pair_p: RatFunc,
    weight_p: RatFunc,
    p_new_q: RatFunc,
    new_q: RatFunc,
    two_new_q: RatFunc,
    p_raise_q: RatFunc,
    raise_q_base: RatFunc,
    new_q_raise_q: RatFunc,
    pair_raise_q: RatFunc,
    replace_bump: bool,
}

impl GroupCoeffs {
    fn build(n: u32, params: &RuleParams) -> GroupCoeffs {
        let gamma = RatFunc::gamma();
        let chi_v = chi(params.mode);
        let q_v = q_charge();
        let nm1 = RatFunc::from_int(i64::from(n) - 1);
        let rm1_chi = &RatFunc::from_int(i64::from(params.r) - 1) * &chi_v;
        let half = RatFunc::from_fraction(1, 2);

        let bump = |fault: RuleFault, v: RatFunc| -> RatFunc {
            if params.fault == Some(fault) {
                &v + &RatFunc::one()
            } else {
                v
            }
        };

        let two_nm1_over_gamma = (&RatFunc::from_int(2) * &nm1)
            .checked_div(&gamma)
            .expect("gamma is nonzero");
        let gamma_sq_quarter = &(&gamma * &gamma) * &RatFunc::from_fraction(1, 4);

        GroupCoeffs {
            pair_p: bump(RuleFault::PairP, RatFunc::from_int(-1)),
            weight_p: bump(RuleFault::WeightP, &(&nm1 * &q_v) - &rm1_chi),
            p_new_q: bump(RuleFault::PNewQ, RatFunc::from_int(2)),
            new_q: bump(RuleFault::NewQ, &rm1_chi - &two_nm1_over_gamma),
            two_new_q: bump(RuleFault::TwoNewQ, RatFunc::from_int(-1)),
            p_raise_q: bump(RuleFault::PRaiseQ, -&gamma),
            raise_q_base: bump(
                RuleFault::RaiseQ,
                &(&(&nm1 * &q_v) * &(&gamma * &half)) - &(&rm1_chi * &(&gamma * &half)),
            ),
            new_q_raise_q: bump(RuleFault::NewQRaiseQ, gamma.clone()),
            pair_raise_q: bump(RuleFault::PairRaiseQ, -&gamma_sq_quarter),
            replace_bump: params.fault == Some(RuleFault::ReplaceP),
        }
    }
}

/// Apply the lowering operator of index n to a single basis key, producing
/// the exact linear combination of keys of degree total_degree(key) + n.
pub fn apply_l(n: u32, key: &TermKey, params: &RuleParams) -> Result<LinComb, RuleError> {
    if n < 1 {
        return Err(RuleError::BadIndex(i64::from(n)));
    }
    match params.kind {
        RuleKind::Full => {
            let actual = n + key.total_degree();
            if actual > params.r {
                return Err(RuleError::DegreeBudget { actual, r: params.r });
            }
        }
        RuleKind::Integrand => {
            if !key.q_part().is_empty() {
                return Err(RuleError::NonEmptyQ);
            }
        }
    }

    let coeffs = GroupCoeffs::build(n, params);
    let p = key.p_part();
    let q = key.q_part();
    let mut out = LinComb::new();

    let with_p = |extra: &[u32]| -> Vec<u32> {
        let mut v = p.to_vec();
        v.extend_from_slice(extra);
        v
    };
    let with_q = |extra: &[u32]| -> Vec<u32> {
        let mut v = q.to_vec();
        v.extend_from_slice(extra);
        v
    };

    // Replace one P factor: P_{n_i} -> P_{n_i + n} with weight n_i.
    for (idx, &ni) in p.iter().enumerate() {
        let mut newp = p.to_vec();
        newp[idx] = ni + n;
        let mut c = RatFunc::from_int(i64::from(ni));
        if coeffs.replace_bump {
            c = &c + &RatFunc::one();
        }
        out.add_term(TermKey::from_parts(newp, q.to_vec()), c);
    }

    // Create a P_i P_{n-i} pair.
    for i in 1..n {
        out.add_term(
            TermKey::from_parts(with_p(&[i, n - i]), q.to_vec()),
            coeffs.pair_p.clone(),
        );
    }

    // Weight term on P_n.
    out.add_term(TermKey::from_parts(with_p(&[n]), q.to_vec()), coeffs.weight_p.clone());

    if params.kind == RuleKind::Integrand {
        return Ok(out);
    }

    // P_i plus a fresh q-entry n - i.
    for i in 1..n {
        out.add_term(
            TermKey::from_parts(with_p(&[i]), with_q(&[n - i])),
            coeffs.p_new_q.clone(),
        );
    }

    // Fresh q-entry n.
    out.add_term(TermKey::from_parts(p.to_vec(), with_q(&[n])), coeffs.new_q.clone());

    // Two fresh q-entries i and n - i.
    for i in 1..n {
        out.add_term(
            TermKey::from_parts(p.to_vec(), with_q(&[i, n - i])),
            coeffs.two_new_q.clone(),
        );
    }

    // Actions on each existing q-entry, iterated with multiplicity.
    for (j, &qj) in q.iter().enumerate() {
        // P_i while raising entry j by n - i.
        for i in 1..n {
            let mut newq = q.to_vec();
            newq[j] += n - i;
            out.add_term(
                TermKey::from_parts(with_p(&[i]), newq),
                coeffs.p_raise_q.clone(),
            );
        }

        // Raise entry j by n, coefficient carries the current value q_j.
        let mut newq = q.to_vec();
        newq[j] += n;
        out.add_term(
            TermKey::from_parts(p.to_vec(), newq),
            &coeffs.raise_q_base + &RatFunc::from_int(i64::from(qj)),
        );

        // Fresh q-entry n - i while raising entry j by i.
        for i in 1..n {
            let mut newq = q.to_vec();
            newq[j] += i;
            newq.push(n - i);
            out.add_term(
                TermKey::from_parts(p.to_vec(), newq),
                coeffs.new_q_raise_q.clone(),
            );
        }

        // Raise entry j by i and entry j' by n - i, over every entry j'.
        for jp in 0..q.len() {
            for i in 1..n {
                let mut newq = q.to_vec();
                newq[j] += i;
                newq[jp] += n - i;
                out.add_term(
                    TermKey::from_parts(p.to_vec(), newq),
                    coeffs.pair_raise_q.clone(),
                );
            }
        }
    }

    Ok(out)
}

/// RatFunc-linear extension of `apply_l` to linear combinations.
pub fn apply_l_lincomb(
    n: u32,
    v: &LinComb,
    params: &RuleParams,
) -> Result<LinComb, RuleError> {
    let mut out = LinComb::new();
    for (key, coeff) in v.iter() {
        out.add_scaled(coeff, &apply_l(n, key, params)?);
    }
    Ok(out)
}

/// Apply a word of lowering operators to a starting combination. By the
/// standard composition convention the rightmost entry acts first.
pub fn apply_word(
    word: &[u32],
    start: &LinComb,
    params: &RuleParams,
) -> Result<LinComb, RuleError> {
    apply_word_with_order(word, start, params, WordOrder::RightmostFirst)
}

pub fn apply_word_with_order(
    word: &[u32],
    start: &LinComb,
    params: &RuleParams,
    order: WordOrder,
) -> Result<LinComb, RuleError> {
    let mut acc = start.clone();
    let apply_all = |acc: LinComb, n: u32| apply_l_lincomb(n, &acc, params);
    match order {
        WordOrder::RightmostFirst => {
            for &n in word.iter().rev() {
                acc = apply_all(acc, n)?;
            }
        }
        WordOrder::LeftmostFirst => {
            for &n in word.iter() {
                acc = apply_all(acc, n)?;
            }
        }
    }
    Ok(acc)
}

/// Check [L_{-n}, L_{-m}] = (m - n) L_{-(n+m)} on a single key, exactly.
pub fn check_commutator(
    n: u32,
    m: u32,
    key: &TermKey,
    params: &RuleParams,
) -> Result<bool, RuleError> {
    let nm = apply_l_lincomb(n, &apply_l(m, key, params)?, params)?;
    let mn = apply_l_lincomb(m, &apply_l(n, key, params)?, params)?;
    let rhs = apply_l(n + m, key, params)?
        .scaled(&RatFunc::from_int(i64::from(m) - i64::from(n)));
    let mut lhs = nm;
    lhs.add_scaled(&RatFunc::from_int(-1), &mn);
    Ok(lhs == rhs)
}
