//! The commutative basis algebra: keys P_n Q_q indexed by a pair of
//! multisets, and finite linear combinations of keys with RatFunc
//! coefficients. The empty/empty key is the bare correlation symbol Q_0.

use crate::ratfunc::RatFunc;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("multiset entries must be >= 1, found {0}")]
    NonPositiveEntry(i64),
}

/// Basis element identifier: the multiset of P-factor exponents and the
/// multiset of Q indices. Both are stored sorted descending, so equality of
/// keys is equality of the canonical forms. Keys order lexicographically on
/// (p_part, q_part), which fixes the iteration order of every report.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    p_part: Vec<u32>,
    q_part: Vec<u32>,
}

impl TermKey {
    /// The bare correlation symbol Q_0.
    pub fn q0() -> TermKey {
        TermKey { p_part: Vec::new(), q_part: Vec::new() }
    }

    pub fn p_part(&self) -> &[u32] {
        &self.p_part
    }

    pub fn q_part(&self) -> &[u32] {
        &self.q_part
    }

    /// The grading |n| + |q|.
    pub fn total_degree(&self) -> u32 {
        self.p_part.iter().sum::<u32>() + self.q_part.iter().sum::<u32>()
    }

    /// Internal constructor for already-positive entries.
    pub(crate) fn from_parts(mut p: Vec<u32>, mut q: Vec<u32>) -> TermKey {
        debug_assert!(p.iter().all(|&e| e >= 1) && q.iter().all(|&e| e >= 1));
        p.sort_unstable_by(|a, b| b.cmp(a));
        q.sort_unstable_by(|a, b| b.cmp(a));
        TermKey { p_part: p, q_part: q }
    }
}

/// Sorted-descending canonical key; input order is irrelevant.
pub fn canonicalize(p_raw: &[i64], q_raw: &[i64]) -> Result<TermKey, TermError> {
    let check = |xs: &[i64]| -> Result<Vec<u32>, TermError> {
        xs.iter()
            .map(|&x| {
                if x >= 1 && x <= u32::MAX as i64 {
                    Ok(x as u32)
                } else {
                    Err(TermError::NonPositiveEntry(x))
                }
            })
            .collect()
    };
    Ok(TermKey::from_parts(check(p_raw)?, check(q_raw)?))
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{:?}Q{:?}", self.p_part, self.q_part)
    }
}

/// Finite map key -> coefficient with zero coefficients pruned on write.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinComb {
    terms: BTreeMap<TermKey, RatFunc>,
}

impl LinComb {
    pub fn new() -> LinComb {
        LinComb::default()
    }

    pub fn single(key: TermKey, coeff: RatFunc) -> LinComb {
        let mut v = LinComb::new();
        v.add_term(key, coeff);
        v
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, key: &TermKey) -> Option<&RatFunc> {
        self.terms.get(key)
    }

    /// Deterministic iteration in canonical key order.
    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &RatFunc)> {
        self.terms.iter()
    }

    /// self[key] += coeff, pruning an entry that cancels to zero.
    pub fn add_term(&mut self, key: TermKey, coeff: RatFunc) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// self += c * v. The associative merge used by every parallel reduction.
    pub fn add_scaled(&mut self, c: &RatFunc, v: &LinComb) {
        if c.is_zero() {
            return;
        }
        for (key, coeff) in v.iter() {
            self.add_term(key.clone(), c * coeff);
        }
    }

    pub fn scaled(&self, c: &RatFunc) -> LinComb {
        let mut out = LinComb::new();
        out.add_scaled(c, self);
        out
    }

    /// Entries rendered for JSON reports, sorted by key.
    pub fn to_json_entries(&self) -> Vec<LinCombEntry> {
        self.iter()
            .map(|(k, c)| LinCombEntry {
                p: k.p_part.clone(),
                q: k.q_part.clone(),
                lambda: c.to_string(),
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_entries()).expect("lincomb serialization")
    }

    /// Rebuild from rendered entries; accumulates duplicates.
    pub fn from_json_entries(entries: &[LinCombEntry]) -> Result<LinComb, crate::ratfunc::RatFuncError> {
        let mut out = LinComb::new();
        for e in entries {
            let p: Vec<i64> = e.p.iter().map(|&x| x as i64).collect();
            let q: Vec<i64> = e.q.iter().map(|&x| x as i64).collect();
            let key = canonicalize(&p, &q)
                .map_err(|err| crate::ratfunc::RatFuncError::Parse(err.to_string()))?;
            out.add_term(key, e.lambda.parse()?);
        }
        Ok(out)
    }
}

/// One rendered term of a linear combination.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LinCombEntry {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub lambda: String,
}
