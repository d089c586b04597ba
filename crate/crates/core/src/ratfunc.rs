//! Exact arithmetic in the field Q(g) of rational functions of the coupling
//! variable g, with integer-coefficient polynomials kept fully reduced in a
//! canonical form. This is the coefficient field for the whole engine: a
//! vanishing coefficient is a proof-grade statement, so there is no floating
//! point anywhere in this module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatFuncError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero cannot be raised to a negative power")]
    NegativePowerOfZero,
    #[error("evaluation point is a pole of the denominator")]
    Pole,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Dense integer polynomial in g, coefficients stored low to high with no
/// trailing zeros. The zero polynomial is an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Poly(pub(crate) Vec<BigInt>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![BigInt::one()])
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly(vec![c])
        }
    }

    /// c * g^k
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Poly(v)
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree of a nonzero polynomial.
    pub fn degree(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.0.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    /// Number of nonzero coefficients equals one.
    pub fn is_monomial(&self) -> bool {
        !self.is_zero() && self.0.iter().filter(|c| !c.is_zero()).count() == 1
    }

    /// Largest k with g^k dividing self (valuation). Zero polynomial has none.
    pub fn valuation(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.0.iter().position(|c| !c.is_zero()).unwrap()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(BigInt::zero);
            let b = other.0.get(i).cloned().unwrap_or_else(BigInt::zero);
            out.push(a + b);
        }
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(BigInt::zero);
            let b = other.0.get(i).cloned().unwrap_or_else(BigInt::zero);
            out.push(a - b);
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    /// gcd of all coefficients, nonnegative. Content of zero is zero.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn scale_div_exact(&self, d: &BigInt) -> Poly {
        debug_assert!(!d.is_zero());
        Poly(
            self.0
                .iter()
                .map(|c| {
                    let (q, r) = c.div_rem(d);
                    debug_assert!(r.is_zero());
                    q
                })
                .collect(),
        )
    }

    /// Exact polynomial division; the divisor must divide exactly.
    pub fn div_exact(&self, den: &Poly) -> Poly {
        debug_assert!(!den.is_zero());
        if self.is_zero() {
            return Poly::zero();
        }
        if den.is_one() {
            return self.clone();
        }
        let mut rem = self.0.clone();
        let db = den.degree();
        let lb = den.leading();
        assert!(rem.len() > db, "inexact polynomial division");
        let mut quot = vec![BigInt::zero(); rem.len() - db];
        for k in (0..quot.len()).rev() {
            let top = rem[k + db].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lb);
            assert!(r.is_zero(), "inexact polynomial division");
            for (i, c) in den.0.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
        }
        debug_assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
        Poly::from_coeffs(quot)
    }

    /// Pseudo-remainder of self by other (deg other <= deg self).
    fn pseudo_rem(&self, other: &Poly) -> Poly {
        let mut rem = self.clone();
        let db = other.degree();
        let lb = other.leading();
        while !rem.is_zero() && rem.degree() >= db {
            let shift = rem.degree() - db;
            let lr = rem.leading().clone();
            let mut scaled = Poly(rem.0.iter().map(|c| c * lb).collect());
            for (i, c) in other.0.iter().enumerate() {
                scaled.0[shift + i] -= &lr * c;
            }
            scaled.trim();
            rem = scaled;
        }
        rem
    }

    /// Canonical gcd: positive leading coefficient, content included.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.canonical_sign();
        }
        if other.is_zero() {
            return self.canonical_sign();
        }
        let ca = self.content();
        let cb = other.content();
        let cg = ca.gcd(&cb);
        let pa = self.scale_div_exact(&ca);
        let pb = other.scale_div_exact(&cb);
        let pp = Poly::primitive_gcd(pa, pb);
        let mut out = Poly(pp.0.iter().map(|c| c * &cg).collect());
        out = out.canonical_sign();
        out
    }

    /// gcd of two primitive polynomials via the primitive PRS, with a fast
    /// path when one side is a monomial.
    fn primitive_gcd(a: Poly, b: Poly) -> Poly {
        if a.is_monomial() || b.is_monomial() {
            let k = if a.is_monomial() {
                a.valuation().min(b.valuation())
            } else {
                b.valuation().min(a.valuation())
            };
            return Poly::monomial(BigInt::one(), k);
        }
        let (mut a, mut b) = if a.degree() >= b.degree() { (a, b) } else { (b, a) };
        loop {
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                return b.canonical_sign();
            }
            if r.degree() == 0 {
                return Poly::one();
            }
            let c = r.content();
            a = b;
            b = r.scale_div_exact(&c);
        }
    }

    fn canonical_sign(&self) -> Poly {
        if !self.is_zero() && self.leading().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval_complex(&self, z: num_complex::Complex64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * z + bigint_to_f64(c);
        }
        acc
    }
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().unwrap_or(f64::NAN)
}

/// Reduced ratio of integer polynomials in g. Canonical form: denominator
/// nonzero with positive leading coefficient, gcd(num, den) = 1, and zero is
/// 0/1, so equal values have identical representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    fn make(num: Poly, den: Poly) -> Result<RatFunc, RatFuncError> {
        if den.is_zero() {
            return Err(RatFuncError::ZeroDenominator);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> RatFunc {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RatFunc { num: Poly::zero(), den: Poly::one() };
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        if den.leading().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        let out = RatFunc { num, den };
        debug_assert!(out.is_reduced(), "non-canonical rational function");
        out
    }

    /// Canonical-form check: used by debug assertions after every operation.
    pub fn is_reduced(&self) -> bool {
        if self.den.is_zero() {
            return false;
        }
        if self.num.is_zero() {
            return self.den.is_one();
        }
        if self.den.leading().is_negative() {
            return false;
        }
        self.num.gcd(&self.den).is_one()
    }

    pub fn zero() -> RatFunc {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFunc {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> RatFunc {
        RatFunc { num: Poly::constant(BigInt::from(n)), den: Poly::one() }
    }

    /// n/d as a constant rational function.
    pub fn from_fraction(n: i64, d: i64) -> RatFunc {
        assert!(d != 0, "zero denominator");
        Self::reduced(Poly::constant(BigInt::from(n)), Poly::constant(BigInt::from(d)))
    }

    /// The formal variable g itself.
    pub fn gamma() -> RatFunc {
        RatFunc { num: Poly::monomial(BigInt::one(), 1), den: Poly::one() }
    }

    /// Polynomial from i64 coefficients, low degree first.
    pub fn from_poly_coeffs(coeffs: &[i64]) -> RatFunc {
        RatFunc {
            num: Poly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect()),
            den: Poly::one(),
        }
    }

    pub fn ratio_of_coeffs(num: &[i64], den: &[i64]) -> Result<RatFunc, RatFuncError> {
        Self::make(
            Poly::from_coeffs(num.iter().map(|&c| BigInt::from(c)).collect()),
            Poly::from_coeffs(den.iter().map(|&c| BigInt::from(c)).collect()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<RatFunc, RatFuncError> {
        if rhs.is_zero() {
            return Err(RatFuncError::DivisionByZero);
        }
        Ok(RatFunc::reduced(self.num.mul(&rhs.den), self.den.mul(&rhs.num)))
    }

    pub fn inverse(&self) -> Result<RatFunc, RatFuncError> {
        if self.is_zero() {
            return Err(RatFuncError::DivisionByZero);
        }
        Ok(RatFunc::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i32) -> Result<RatFunc, RatFuncError> {
        if e >= 0 {
            Ok(RatFunc {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            })
        } else {
            if self.is_zero() {
                return Err(RatFuncError::NegativePowerOfZero);
            }
            Ok(RatFunc::reduced(self.den.pow((-e) as u32), self.num.pow((-e) as u32)))
        }
    }

    /// Evaluate at a complex point; the point must not be a pole.
    pub fn eval_complex(
        &self,
        z: num_complex::Complex64,
    ) -> Result<num_complex::Complex64, RatFuncError> {
        let d = self.den.eval_complex(z);
        if d.norm() == 0.0 {
            return Err(RatFuncError::Pole);
        }
        Ok(self.num.eval_complex(z) / d)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        RatFunc::reduced(num, self.den.mul(&rhs.den))
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        let num = self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den));
        RatFunc::reduced(num, self.den.mul(&rhs.den))
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::reduced(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        (&self).add(&rhs)
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        (&self).sub(&rhs)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        (&self).mul(&rhs)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        (&self).neg()
    }
}

/// Which of the two degenerate-weight branches is substituted for chi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ChiMode {
    #[serde(rename = "gamma/2")]
    GammaHalf,
    #[serde(rename = "2/gamma")]
    TwoOverGamma,
}

impl ChiMode {
    pub const BOTH: [ChiMode; 2] = [ChiMode::GammaHalf, ChiMode::TwoOverGamma];

    pub fn label(self) -> &'static str {
        match self {
            ChiMode::GammaHalf => "gamma/2",
            ChiMode::TwoOverGamma => "2/gamma",
        }
    }
}

impl fmt::Display for ChiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// chi = g/2 or 2/g.
pub fn chi(mode: ChiMode) -> RatFunc {
    match mode {
        ChiMode::GammaHalf => RatFunc::reduced(Poly::monomial(BigInt::one(), 1), Poly::constant(BigInt::from(2))),
        ChiMode::TwoOverGamma => RatFunc::reduced(Poly::constant(BigInt::from(2)), Poly::monomial(BigInt::one(), 1)),
    }
}

/// Background charge Q = g/2 + 2/g.
pub fn q_charge() -> RatFunc {
    &chi(ChiMode::GammaHalf) + &chi(ChiMode::TwoOverGamma)
}

/// Conformal weight (a/2)(Q - a/2).
pub fn conformal_weight(alpha: &RatFunc) -> RatFunc {
    let half = alpha.checked_div(&RatFunc::from_int(2)).expect("2 is nonzero");
    &half * &(&q_charge() - &half)
}

/// The degenerate insertion weight -(r-1) chi.
pub fn degenerate_weight(r: u32, mode: ChiMode) -> RatFunc {
    &RatFunc::from_int(-(i64::from(r) - 1)) * &chi(mode)
}

// ---------------------------------------------------------------------------
// Text rendering and parsing: "num / den" with explicit integer coefficients.
// ---------------------------------------------------------------------------

fn poly_to_string(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, c) in p.0.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let unit = abs.is_one();
        match (k, unit) {
            (0, _) => out.push_str(&abs.to_string()),
            (1, true) => out.push('g'),
            (1, false) => out.push_str(&format!("{}*g", abs)),
            (_, true) => out.push_str(&format!("g^{}", k)),
            (_, false) => out.push_str(&format!("{}*g^{}", abs, k)),
        }
    }
    out
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |s: String| if s.contains(' ') { format!("({})", s) } else { s };
        if self.den.is_one() {
            f.write_str(&poly_to_string(&self.num))
        } else {
            write!(
                f,
                "{} / {}",
                wrap(poly_to_string(&self.num)),
                wrap(poly_to_string(&self.den))
            )
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { s: s.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), RatFuncError> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            got => Err(RatFuncError::Parse(format!(
                "expected '{}', found {:?} at byte {}",
                c as char,
                got.map(|b| b as char),
                self.pos
            ))),
        }
    }

    fn integer(&mut self) -> Result<BigInt, RatFuncError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(RatFuncError::Parse(format!("expected integer at byte {}", start)));
        }
        // Cap digit count so hostile inputs cannot allocate unbounded bigints.
        if self.pos - start > 4096 {
            return Err(RatFuncError::Parse("integer literal too long".into()));
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        text.parse::<BigInt>().map_err(|e| RatFuncError::Parse(e.to_string()))
    }

    /// g power with optional exponent: g, g^3.
    fn gamma_power(&mut self) -> Result<usize, RatFuncError> {
        self.expect(b'g')?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.integer()?;
            use num_traits::ToPrimitive;
            let e = e.to_usize().filter(|&e| e <= 512).ok_or_else(|| {
                RatFuncError::Parse("exponent out of range".into())
            })?;
            Ok(e)
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<(BigInt, usize), RatFuncError> {
        match self.peek() {
            Some(b'g') => Ok((BigInt::one(), self.gamma_power()?)),
            Some(c) if c.is_ascii_digit() => {
                let coeff = self.integer()?;
                match self.peek() {
                    Some(b'*') => {
                        self.bump();
                        Ok((coeff, self.gamma_power()?))
                    }
                    Some(b'g') => Ok((coeff, self.gamma_power()?)),
                    _ => Ok((coeff, 0)),
                }
            }
            got => Err(RatFuncError::Parse(format!(
                "expected term, found {:?} at byte {}",
                got.map(|b| b as char),
                self.pos
            ))),
        }
    }

    fn sum(&mut self) -> Result<Poly, RatFuncError> {
        let mut acc = Poly::zero();
        let mut sign = match self.peek() {
            Some(b'+') => {
                self.bump();
                false
            }
            Some(b'-') => {
                self.bump();
                true
            }
            _ => false,
        };
        loop {
            let (c, k) = self.term()?;
            let c = if sign { -c } else { c };
            acc = acc.add(&Poly::monomial(c, k));
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    sign = false;
                }
                Some(b'-') => {
                    self.bump();
                    sign = true;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn poly(&mut self) -> Result<Poly, RatFuncError> {
        if self.peek() == Some(b'(') {
            self.bump();
            let p = self.sum()?;
            self.expect(b')')?;
            Ok(p)
        } else {
            self.sum()
        }
    }

    fn ratfunc(&mut self) -> Result<RatFunc, RatFuncError> {
        let num = self.poly()?;
        let den = if self.peek() == Some(b'/') {
            self.bump();
            self.poly()?
        } else {
            Poly::one()
        };
        self.skip_ws();
        if self.pos != self.s.len() {
            return Err(RatFuncError::Parse(format!("trailing input at byte {}", self.pos)));
        }
        RatFunc::make(num, den)
    }
}

impl std::str::FromStr for RatFunc {
    type Err = RatFuncError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s).ratfunc()
    }
}
