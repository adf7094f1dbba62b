//! Exact integer polynomials.
//!
//! The cyclotomic families, good Frobenius lifts with integer uniformizer and
//! the tower minimal polynomials all have exact integer coefficients, and the
//! quotient-order oracle wants exact resultants. Keeping this layer over
//! `BigInt` avoids p-adic precision loss in the one place exactness is free.

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicScalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense polynomial with `BigInt` coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: BigInt, deg: usize) -> Self {
        let mut v = vec![BigInt::zero(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            v[i] += c;
        }
        Self::new(v)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        Self::new(v)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Division with remainder by a monic divisor (exact over `Z`).
    pub fn div_rem_monic(&self, d: &Self) -> (Self, Self) {
        assert!(d.is_monic(), "divisor must be monic");
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quo = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let q = rem[i].clone();
            if q.is_zero() {
                continue;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                let t = &q * c;
                rem[i - dd + j] -= t;
            }
            quo[i - dd] = q;
        }
        rem.truncate(dd.max(1));
        (Self::new(quo), Self::new(rem))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact_monic(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem_monic(d);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InvalidInput("polynomial division is not exact".into()))
        }
    }

    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner);
            acc = acc.add(&Self::constant(c.clone()));
        }
        acc
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `(1 + X)^n - 1`, exact binomials.
    pub fn one_plus_x_pow_minus_one(n: u64) -> Self {
        let mut v = vec![BigInt::zero(); n as usize + 1];
        let mut c = BigInt::one();
        for k in 1..=n {
            c = c * BigInt::from(n - k + 1) / BigInt::from(k);
            v[k as usize] = c.clone();
        }
        Self::new(v)
    }

    /// p-adic valuation of the content (minimum over coefficient valuations).
    pub fn content_valuation(&self, p: u64) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let p = BigInt::from(p);
        let mut best: Option<u64> = None;
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            let mut v = 0u64;
            let mut a = c.abs();
            while (&a % &p).is_zero() {
                a /= &p;
                v += 1;
                if best.map_or(false, |b| v >= b) {
                    break;
                }
            }
            best = Some(best.map_or(v, |b| b.min(v)));
            if best == Some(0) {
                return Some(0);
            }
        }
        best
    }

    /// Reduce into a bounded-precision context, one scalar per coefficient.
    pub fn to_scalars(&self, ctx: PadicContext) -> Vec<PadicScalar> {
        self.coeffs.iter().map(|c| PadicScalar::from_bigint(ctx, c)).collect()
    }
}

/// p-adic valuation of an exact integer (`None` for zero).
pub fn int_valuation(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut a = n.abs();
    while (&a % &p).is_zero() {
        a /= &p;
        v += 1;
    }
    Some(v)
}

/// Resultant of two integer polynomials, exact.
///
/// Primitive pseudo-remainder sequence: each step uses
/// `Res(a,b) = (-1)^(da db) Res(b,a)`, `Res(b, c r) = c^db Res(b,r)` and
/// `lc(b)^(e db) Res(b,a) = lc(b)^(da-dr) Res(b, prem(a,b))` with
/// `e = da-db+1`; remainders are stripped to their primitive part so the
/// coefficients stay small. Returns zero iff the inputs share a factor.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    fn content(p: &IntPoly) -> BigInt {
        let mut c = BigInt::zero();
        for a in p.coeffs() {
            c = c.gcd(a);
            if c.is_one() {
                break;
            }
        }
        c
    }
    fn go(a: &IntPoly, b: &IntPoly) -> BigInt {
        if a.is_zero() || b.is_zero() {
            return BigInt::zero();
        }
        if a.degree() == 0 {
            return a.coeff(0).pow(b.degree() as u32);
        }
        if b.degree() == 0 {
            return b.coeff(0).pow(a.degree() as u32);
        }
        let (da, db) = (a.degree(), b.degree());
        if da < db {
            let s = go(b, a);
            return if da * db % 2 == 1 { -s } else { s };
        }
        let r = pseudo_rem(a, b);
        if r.is_zero() {
            return BigInt::zero();
        }
        let dr = r.degree();
        let c = content(&r);
        let r1 = IntPoly::new(r.coeffs().iter().map(|x| x / &c).collect());
        let e = da - db + 1;
        let num = c.pow(db as u32) * go(b, &r1);
        let num = if da * db % 2 == 1 { -num } else { num };
        let denom = b.leading().pow((e * db - da + dr) as u32);
        let (q, rem) = num.div_rem(&denom);
        assert!(rem.is_zero(), "resultant bookkeeping must divide exactly");
        q
    }
    go(f, g)
}

/// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a  mod  b`.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let da = a.degree();
    let db = b.degree();
    assert!(db <= da && db >= 1);
    let lb = b.leading().clone();
    let mut r = a.clone();
    let mut e = da - db + 1;
    while !r.is_zero() && r.degree() >= db {
        let dr = r.degree();
        let lead = r.leading().clone();
        let mut v: Vec<BigInt> = r.coeffs().iter().map(|c| c * &lb).collect();
        for (j, c) in b.coeffs().iter().enumerate() {
            let t = &lead * c;
            v[dr - db + j] -= t;
        }
        r = IntPoly::new(v);
        e -= 1;
    }
    if e > 0 {
        r = r.scale(&lb.pow(e as u32));
    }
    r
}
