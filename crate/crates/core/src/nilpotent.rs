//! Coefficients in the nilpotent quotient: the commutative algebra over
//! Q(g) generated by the insertion weights a_1..a_N subject to a_i^2 = 0.
//! An element is stored as its multilinear expansion, a sparse map from
//! generator subsets (bitmask) to RatFunc coefficients; products that would
//! repeat a generator are annihilated by the disjointness check.

use crate::jet::Coeff;
use crate::ratfunc::RatFunc;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NilCoeff {
    terms: BTreeMap<u64, RatFunc>,
}

impl NilCoeff {
    pub fn new() -> NilCoeff {
        NilCoeff::default()
    }

    pub fn scalar(c: RatFunc) -> NilCoeff {
        let mut out = NilCoeff::new();
        out.insert(0, c);
        out
    }

    /// The generator a_i (1-based index).
    pub fn alpha(i: usize) -> NilCoeff {
        assert!((1..=64).contains(&i));
        let mut out = NilCoeff::new();
        out.insert(1u64 << (i - 1), RatFunc::one());
        out
    }

    pub fn insert(&mut self, mask: u64, coeff: RatFunc) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mask) {
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

    /// Coefficient of the product of generators in `mask` (empty mask is the
    /// pure scalar part).
    pub fn coeff(&self, mask: u64) -> RatFunc {
        self.terms.get(&mask).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &RatFunc)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &RatFunc) -> NilCoeff {
        if c.is_zero() {
            return NilCoeff::new();
        }
        let mut out = NilCoeff::new();
        for (&m, f) in &self.terms {
            out.insert(m, f * c);
        }
        out
    }
}

impl Coeff for NilCoeff {
    fn zero() -> Self {
        NilCoeff::new()
    }

    fn one() -> Self {
        NilCoeff::scalar(RatFunc::one())
    }

    fn from_int(n: i64) -> Self {
        NilCoeff::scalar(RatFunc::from_int(n))
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, f) in &other.terms {
            out.insert(m, f.clone());
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, f) in &other.terms {
            out.insert(m, -f);
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = NilCoeff::new();
        out.mul_add_assign(self, other);
        out
    }

    fn neg(&self) -> Self {
        let mut out = NilCoeff::new();
        for (&m, f) in &self.terms {
            out.insert(m, -f);
        }
        out
    }

    /// Invertible iff the scalar part is nonzero; the nilpotent remainder is
    /// handled by a finite geometric series (it dies after at most 64 powers,
    /// in practice after the generator count).
    fn inv(&self) -> Option<Self> {
        let s = self.terms.get(&0)?;
        let s_inv = s.inverse().ok()?;
        let mut n = self.clone();
        n.terms.remove(&0);
        if n.is_empty() {
            return Some(NilCoeff::scalar(s_inv));
        }
        // 1/(s + n) = (1/s) * sum_k (-n/s)^k
        let step = n.scale(&-&s_inv);
        let mut acc = NilCoeff::one();
        let mut pow = step.clone();
        while !pow.is_empty() {
            acc = acc.add(&pow);
            pow = pow.mul(&step);
        }
        Some(acc.scale(&s_inv))
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        for (&ma, fa) in &a.terms {
            for (&mb, fb) in &b.terms {
                if ma & mb != 0 {
                    continue;
                }
                self.insert(ma | mb, fa * fb);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_square_to_zero() {
        let a1 = NilCoeff::alpha(1);
        assert!(a1.mul(&a1).is_empty());
        let mixed = a1.add(&NilCoeff::scalar(RatFunc::from_int(2)));
        // (2 + a1)(2 + a1) = 4 + 4 a1
        let sq = mixed.mul(&mixed);
        assert_eq!(sq.coeff(0), RatFunc::from_int(4));
        assert_eq!(sq.coeff(1), RatFunc::from_int(4));
    }

    #[test]
    fn repeated_index_annihilates_in_products() {
        let a1 = NilCoeff::alpha(1);
        let a2 = NilCoeff::alpha(2);
        let x = a1.mul(&a2); // a1 a2
        assert_eq!(x.coeff(0b11), RatFunc::one());
        assert!(x.mul(&a1).is_empty());
        assert!(x.mul(&a2).is_empty());
        let a3 = NilCoeff::alpha(3);
        assert_eq!(x.mul(&a3).coeff(0b111), RatFunc::one());
    }

    #[test]
    fn inverse_of_unit_with_nilpotent_part() {
        // (c + a1 + a1 a2)^-1 computed by the geometric series; check by
        // multiplying back.
        let c = NilCoeff::scalar(RatFunc::from_fraction(3, 2));
        let mut x = c.add(&NilCoeff::alpha(1));
        x = x.add(&NilCoeff::alpha(1).mul(&NilCoeff::alpha(2)));
        let inv = x.inv().unwrap();
        let prod = x.mul(&inv);
        assert_eq!(prod, NilCoeff::one());
    }

    #[test]
    fn pure_nilpotent_is_not_invertible() {
        assert!(NilCoeff::alpha(1).inv().is_none());
        assert!(NilCoeff::new().inv().is_none());
    }
}
