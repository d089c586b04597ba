//! Truncated multivariate Taylor arithmetic ("jets") over a pluggable
//! coefficient ring. A `JetSpace` fixes the variable count and the maximum
//! truncation order and precomputes the multi-index tables; jets are dense
//! coefficient vectors against that space, valid up to their own order.
//!
//! A jet of order m carries exact Taylor coefficients through total degree
//! m. Multiplication preserves the smaller operand order; differentiation
//! loses one order. Jets are meaningful only relative to the context (base
//! point) that produced their coefficients; contexts in this crate each own
//! a single base point, which is what makes mixed-base arithmetic
//! unrepresentable.

use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("jet orders differ ({0} vs {1})")]
    OrderMismatch(u32, u32),
    #[error("constant term is not invertible")]
    NonInvertibleConstant,
    #[error("jet order exhausted: one more derivative than the truncation supports")]
    OrderExhausted,
    #[error("at most 8 jet variables are supported, got {0}")]
    TooManyVariables(usize),
}

/// Coefficient ring interface. `inv` returns None for non-units.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;

    /// self += a * b; the hot path of jet multiplication.
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = self.add(&a.mul(b));
    }
}

impl Coeff for num_complex::Complex64 {
    fn zero() -> Self {
        num_complex::Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        num_complex::Complex64::new(1.0, 0.0)
    }
    fn from_int(n: i64) -> Self {
        num_complex::Complex64::new(n as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(num_complex::Complex64::new(1.0, 0.0) / self)
        }
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Coeff for crate::ratfunc::RatFunc {
    fn zero() -> Self {
        crate::ratfunc::RatFunc::zero()
    }
    fn one() -> Self {
        crate::ratfunc::RatFunc::one()
    }
    fn from_int(n: i64) -> Self {
        crate::ratfunc::RatFunc::from_int(n)
    }
    fn is_zero(&self) -> bool {
        crate::ratfunc::RatFunc::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

/// Precomputed tables for a fixed variable count and maximum order.
/// Multi-index keys pack one byte per variable into a u64, so index
/// addition is plain integer addition.
pub struct JetSpace {
    nvars: usize,
    max_order: u32,
    rank_of: HashMap<u64, u32>,
    /// Number of ranks with degree <= d, for d = 0..=max_order.
    len_by_order: Vec<usize>,
    /// mult[i] lists (j, k) with rank_k = rank_i + rank_j, sorted by k.
    mult: Vec<Vec<(u32, u32)>>,
    /// deriv[v] lists (target, source, factor): d/dx_v moves source -> target.
    deriv: Vec<Vec<(u32, u32, u32)>>,
}

impl JetSpace {
    pub fn new(nvars: usize, max_order: u32) -> Result<JetSpace, JetError> {
        if nvars > 8 {
            return Err(JetError::TooManyVariables(nvars));
        }
        let mut ranks = Vec::new();
        let mut idx = vec![0u8; nvars.max(1)];
        fn gen(v: usize, remaining: u32, idx: &mut [u8], acc: &mut Vec<(u32, u64)>, deg: u32) {
            if v == idx.len() {
                let mut key = 0u64;
                for (i, &e) in idx.iter().enumerate() {
                    key |= (e as u64) << (8 * i);
                }
                acc.push((deg, key));
                return;
            }
            for e in 0..=remaining {
                idx[v] = e as u8;
                gen(v + 1, remaining - e, idx, acc, deg + e);
            }
            idx[v] = 0;
        }
        let mut acc: Vec<(u32, u64)> = Vec::new();
        if nvars == 0 {
            acc.push((0, 0));
        } else {
            gen(0, max_order, &mut idx, &mut acc, 0);
        }
        acc.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut degs: Vec<u32> = Vec::with_capacity(acc.len());
        for (d, key) in &acc {
            degs.push(*d);
            ranks.push(*key);
        }
        let rank_of: HashMap<u64, u32> =
            ranks.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
        let mut len_by_order = vec![0usize; (max_order + 2) as usize];
        for d in 0..=max_order {
            len_by_order[d as usize] = degs.iter().take_while(|&&dd| dd <= d).count();
        }
        len_by_order[(max_order + 1) as usize] = ranks.len();

        let mut mult = vec![Vec::new(); ranks.len()];
        for (i, &ki) in ranks.iter().enumerate() {
            let di = degs[i];
            for (j, &kj) in ranks.iter().enumerate() {
                if di + degs[j] > max_order {
                    continue;
                }
                let k = rank_of[&(ki + kj)];
                mult[i].push((j as u32, k));
            }
            mult[i].sort_by_key(|&(_, k)| k);
        }

        let mut deriv = vec![Vec::new(); nvars];
        for (v, table) in deriv.iter_mut().enumerate() {
            for (t, &kt) in ranks.iter().enumerate() {
                if degs[t] + 1 > max_order {
                    continue;
                }
                let src_key = kt + (1u64 << (8 * v));
                let s = rank_of[&src_key];
                let factor = ((kt >> (8 * v)) & 0xff) as u32 + 1;
                table.push((t as u32, s, factor));
            }
        }

        Ok(JetSpace { nvars, max_order, rank_of, len_by_order, mult, deriv })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn len_at(&self, order: u32) -> usize {
        self.len_by_order[order.min(self.max_order) as usize]
    }

    pub fn rank(&self, exponents: &[u8]) -> u32 {
        let mut key = 0u64;
        for (i, &e) in exponents.iter().enumerate() {
            key |= (e as u64) << (8 * i);
        }
        self.rank_of[&key]
    }

    pub fn constant<C: Coeff>(&self, order: u32, c: C) -> Jet<C> {
        let mut coeffs = vec![C::zero(); self.len_at(order)];
        coeffs[0] = c;
        Jet { order: order.min(self.max_order), coeffs }
    }

    /// base + (x_v - base): constant term plus a unit linear coefficient.
    pub fn variable<C: Coeff>(&self, v: usize, base: C, order: u32) -> Jet<C> {
        let mut jet = self.constant(order, base);
        if order >= 1 {
            let r = self.rank_of[&(1u64 << (8 * v))] as usize;
            jet.coeffs[r] = C::one();
        }
        jet
    }

    pub fn add<C: Coeff>(&self, a: &Jet<C>, b: &Jet<C>) -> Result<Jet<C>, JetError> {
        if a.order != b.order {
            return Err(JetError::OrderMismatch(a.order, b.order));
        }
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x.add(y))
            .collect();
        Ok(Jet { order: a.order, coeffs })
    }

    pub fn sub<C: Coeff>(&self, a: &Jet<C>, b: &Jet<C>) -> Result<Jet<C>, JetError> {
        if a.order != b.order {
            return Err(JetError::OrderMismatch(a.order, b.order));
        }
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x.sub(y))
            .collect();
        Ok(Jet { order: a.order, coeffs })
    }

    /// Accumulate a += b for equal orders (internal).
    fn add_assign<C: Coeff>(&self, a: &mut Jet<C>, b: &Jet<C>) {
        debug_assert_eq!(a.order, b.order);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.add(y);
        }
    }

    /// Product truncated to min(a.order, b.order, cap).
    pub fn mul<C: Coeff>(&self, a: &Jet<C>, b: &Jet<C>, cap: Option<u32>) -> Jet<C> {
        let order = a.order.min(b.order).min(cap.unwrap_or(self.max_order));
        let out_len = self.len_at(order);
        let mut out = vec![C::zero(); out_len];
        let a_len = self.len_at(order).min(a.coeffs.len());
        for i in 0..a_len {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for &(j, k) in &self.mult[i] {
                let k = k as usize;
                if k >= out_len {
                    break;
                }
                let j = j as usize;
                if j >= b.coeffs.len() || b.coeffs[j].is_zero() {
                    continue;
                }
                out[k].mul_add_assign(&a.coeffs[i], &b.coeffs[j]);
            }
        }
        Jet { order, coeffs: out }
    }

    pub fn scale<C: Coeff>(&self, a: &Jet<C>, c: &C) -> Jet<C> {
        Jet { order: a.order, coeffs: a.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn neg<C: Coeff>(&self, a: &Jet<C>) -> Jet<C> {
        Jet { order: a.order, coeffs: a.coeffs.iter().map(Coeff::neg).collect() }
    }

    pub fn truncate<C: Coeff>(&self, a: &Jet<C>, order: u32) -> Jet<C> {
        if order >= a.order {
            return a.clone();
        }
        Jet { order, coeffs: a.coeffs[..self.len_at(order)].to_vec() }
    }

    /// Formal partial derivative in variable v; output order drops by one.
    pub fn partial<C: Coeff>(&self, v: usize, a: &Jet<C>) -> Jet<C> {
        assert!(a.order >= 1, "derivative of an order-0 jet");
        let order = a.order - 1;
        let mut out = vec![C::zero(); self.len_at(order)];
        for &(t, s, factor) in &self.deriv[v] {
            let (t, s) = (t as usize, s as usize);
            if t >= out.len() || s >= a.coeffs.len() {
                continue;
            }
            if a.coeffs[s].is_zero() {
                continue;
            }
            out[t] = a.coeffs[s].mul(&C::from_int(i64::from(factor)));
        }
        Jet { order, coeffs: out }
    }

    /// Reciprocal by finite geometric expansion. The constant term must be
    /// invertible; the higher part is nilpotent in the truncated ring, so
    /// the series stops after `order` terms.
    pub fn recip<C: Coeff>(&self, a: &Jet<C>) -> Result<Jet<C>, JetError> {
        let c0 = a.coeffs[0].inv().ok_or(JetError::NonInvertibleConstant)?;
        let order = a.order;
        // u = 1 - a/c0 has zero constant term.
        let mut u = self.scale(a, &c0.neg());
        u.coeffs[0] = u.coeffs[0].add(&C::one());
        let mut acc = self.constant(order, C::one());
        let mut pow = u.clone();
        for _ in 1..=order {
            self.add_assign(&mut acc, &pow);
            pow = self.mul(&pow, &u, None);
        }
        Ok(self.scale(&acc, &c0))
    }

    /// Integer power via repeated multiplication at the jet's own order.
    pub fn powi<C: Coeff>(&self, a: &Jet<C>, e: u32) -> Jet<C> {
        let mut acc = self.constant(a.order, C::one());
        for _ in 0..e {
            acc = self.mul(&acc, a, None);
        }
        acc
    }
}

/// Dense truncated Taylor expansion relative to a `JetSpace`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<C: Coeff> {
    order: u32,
    coeffs: Vec<C>,
}

impl<C: Coeff> Jet<C> {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn constant_term(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn coeff_at(&self, rank: u32) -> &C {
        &self.coeffs[rank as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::RatFunc;

    fn space(nvars: usize, order: u32) -> JetSpace {
        JetSpace::new(nvars, order).unwrap()
    }

    #[test]
    fn one_plus_u_times_one_minus_u() {
        let sp = space(1, 2);
        let u = sp.variable::<RatFunc>(0, RatFunc::zero(), 2);
        let one = sp.constant(2, RatFunc::one());
        let a = sp.add(&one, &u).unwrap();
        let b = sp.sub(&one, &u).unwrap();
        let prod = sp.mul(&a, &b, None);
        // 1 - u^2
        assert_eq!(prod.coeff_at(0), &RatFunc::one());
        assert_eq!(prod.coeff_at(1), &RatFunc::zero());
        assert_eq!(prod.coeff_at(2), &RatFunc::from_int(-1));
    }

    #[test]
    fn recip_is_geometric_series() {
        let sp = space(1, 2);
        // c + u with c = 3: recip = 1/3 - u/9 + u^2/27
        let a = sp.variable::<RatFunc>(0, RatFunc::from_int(3), 2);
        let r = sp.recip(&a).unwrap();
        assert_eq!(r.coeff_at(0), &RatFunc::from_fraction(1, 3));
        assert_eq!(r.coeff_at(1), &RatFunc::from_fraction(-1, 9));
        assert_eq!(r.coeff_at(2), &RatFunc::from_fraction(1, 27));
        // recip(a) * a == 1 at the working order
        let prod = sp.mul(&r, &a, None);
        let one = sp.constant(2, RatFunc::one());
        assert_eq!(prod, one);
    }

    #[test]
    fn recip_requires_invertible_constant() {
        let sp = space(1, 2);
        let u = sp.variable::<RatFunc>(0, RatFunc::zero(), 2);
        assert_eq!(sp.recip(&u), Err(JetError::NonInvertibleConstant));
    }

    #[test]
    fn partial_derivative_basics() {
        let sp = space(2, 3);
        // f = u^2 => df/du = 2u
        let u = sp.variable::<RatFunc>(0, RatFunc::zero(), 3);
        let u2 = sp.mul(&u, &u, None);
        let d = sp.partial(0, &u2);
        assert_eq!(d.order(), 2);
        let lin = sp.rank(&[1, 0]);
        assert_eq!(d.coeff_at(lin), &RatFunc::from_int(2));
        // derivative in the absent variable vanishes
        let dv = sp.partial(1, &u2);
        assert!(dv.is_zero());
    }

    #[test]
    fn partial_commutes_with_addition() {
        let sp = space(2, 3);
        let u = sp.variable::<RatFunc>(0, RatFunc::from_int(2), 3);
        let v = sp.variable::<RatFunc>(1, RatFunc::from_int(5), 3);
        let uv = sp.mul(&u, &v, None);
        let sum = sp.add(&uv, &v).unwrap();
        let left = sp.partial(1, &sum);
        let right = sp
            .add(&sp.partial(1, &uv), &sp.partial(1, &v))
            .unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn order_mismatch_is_error() {
        let sp = space(1, 3);
        let a = sp.constant(3, RatFunc::one());
        let b = sp.constant(2, RatFunc::one());
        assert!(matches!(sp.add(&a, &b), Err(JetError::OrderMismatch(3, 2))));
    }

    #[test]
    fn mul_truncates_to_smaller_order() {
        let sp = space(1, 3);
        let a = sp.variable::<RatFunc>(0, RatFunc::one(), 3);
        let b = sp.truncate(&a, 1);
        let prod = sp.mul(&a, &b, None);
        assert_eq!(prod.order(), 1);
    }

    #[test]
    fn too_many_variables_rejected() {
        assert!(matches!(JetSpace::new(9, 2), Err(JetError::TooManyVariables(9))));
    }
}
