//! Bounded-precision arithmetic in `Z_p` and `Q_p` with valuation tracking.
//!
//! A scalar is `p^val * unit` where the unit part is known modulo
//! `p^digits` for some `1 <= digits <= N`. Exact zero is a distinguished
//! marker; a residue that merely vanishes modulo everything we know is kept
//! as a separate "zero to precision" state so that no valuation is ever
//! reported without a certificate.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

/// Shared parameters of one computation: an odd prime `p` and the number of
/// `p`-adic digits `N` carried by every unit part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    digits: u32,
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PadicContext {
    /// `p` must be an odd prime and `p^digits` must fit in a `u64` with room
    /// for products (we require `p^digits < 2^62`).
    pub fn new(p: u64, digits: u32) -> Result<Self> {
        if p < 3 || !is_small_prime(p) {
            return Err(Error::InvalidInput(format!("p = {p} is not an odd prime")));
        }
        if digits == 0 {
            return Err(Error::InvalidInput("precision must be at least 1 digit".into()));
        }
        let mut m: u128 = 1;
        for _ in 0..digits {
            m *= p as u128;
            if m >= (1u128 << 62) {
                return Err(Error::InvalidInput(format!(
                    "p^N = {p}^{digits} does not fit the 64-bit unit representation"
                )));
            }
        }
        Ok(PadicContext { p, digits })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `p^k` for `k <= digits`.
    pub fn pow_p(&self, k: u32) -> u64 {
        debug_assert!(k <= self.digits);
        let mut m: u64 = 1;
        for _ in 0..k {
            m *= self.p;
        }
        m
    }

    /// Same prime, at least `extra` more digits (for internal headroom).
    /// Falls back to the largest representable precision if the request
    /// overflows the 64-bit unit storage.
    pub fn lifted(&self, extra: u32) -> PadicContext {
        let mut d = self.digits + extra;
        while d > self.digits {
            if let Ok(ctx) = PadicContext::new(self.p, d) {
                return ctx;
            }
            d -= 1;
        }
        *self
    }

    pub fn same(&self, other: &PadicContext) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!(
                "(p={}, N={}) vs (p={}, N={})",
                self.p, self.digits, other.p, other.digits
            )))
        }
    }
}

/// Exact p-adic valuation, or `+∞` for exact zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }

    pub fn at_least(&self, t: i64) -> bool {
        match self {
            Valuation::Finite(v) => *v >= t,
            Valuation::Infinite => true,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Repr {
    ExactZero,
    /// Congruent to 0 modulo `p^abs`; the true valuation is only known to be `>= abs`.
    ZeroToPrec { abs: i64 },
    /// `p^val * unit` with `unit` coprime to `p`, known modulo `p^digits`.
    Unit { val: i64, unit: u64, digits: u32 },
}

/// An element of `Q_p` carried at finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicScalar {
    ctx: PadicContext,
    repr: Repr,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `a` modulo `m` (`m` a prime power, `a` coprime to the prime).
fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inv_mod of a non-unit");
    (t.rem_euclid(m as i128)) as u64
}

impl PadicScalar {
    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn exact_zero(ctx: PadicContext) -> Self {
        PadicScalar { ctx, repr: Repr::ExactZero }
    }

    pub fn one(ctx: PadicContext) -> Self {
        PadicScalar { ctx, repr: Repr::Unit { val: 0, unit: 1, digits: ctx.digits } }
    }

    /// Build from a residue `r` known modulo `p^known` sitting at valuation
    /// offset `val` (the represented value is `p^val * r`, known modulo
    /// `p^(val + known)`). This is where trailing `p`-powers are stripped and
    /// unmarked all-zero residues become `ZeroToPrec`.
    pub fn from_residue(ctx: PadicContext, val: i64, r: u64, known: u32) -> Self {
        let known = known.min(ctx.digits);
        if known == 0 {
            return PadicScalar { ctx, repr: Repr::ZeroToPrec { abs: val } };
        }
        let m = ctx.pow_p(known);
        let mut r = r % m;
        if r == 0 {
            return PadicScalar { ctx, repr: Repr::ZeroToPrec { abs: val + known as i64 } };
        }
        let mut t = 0u32;
        while r % ctx.p == 0 {
            r /= ctx.p;
            t += 1;
        }
        let digits = known - t;
        PadicScalar {
            ctx,
            repr: Repr::Unit { val: val + t as i64, unit: r % ctx.pow_p(digits), digits },
        }
    }

    /// An exact integer, reduced into the context (full `N` digits of the unit part).
    pub fn from_i64(ctx: PadicContext, n: i64) -> Self {
        if n == 0 {
            return Self::exact_zero(ctx);
        }
        let neg = n < 0;
        let mut a = n.unsigned_abs();
        let mut val = 0i64;
        while a % ctx.p == 0 {
            a /= ctx.p;
            val += 1;
        }
        let m = ctx.pow_p(ctx.digits);
        let mut u = a % m;
        if neg {
            u = (m - u) % m;
        }
        // The remaining factor is a unit, so u mod p != 0 even after reduction.
        PadicScalar { ctx, repr: Repr::Unit { val, unit: u, digits: ctx.digits } }
    }

    pub fn from_biguint(ctx: PadicContext, n: &BigUint) -> Self {
        if n.is_zero() {
            return Self::exact_zero(ctx);
        }
        let p = BigUint::from(ctx.p);
        let mut a = n.clone();
        let mut val = 0i64;
        while (&a % &p).is_zero() {
            a /= &p;
            val += 1;
        }
        let m = BigUint::from(ctx.pow_p(ctx.digits));
        let u = (&a % &m).to_u64().unwrap();
        PadicScalar { ctx, repr: Repr::Unit { val, unit: u, digits: ctx.digits } }
    }

    pub fn from_bigint(ctx: PadicContext, n: &num_bigint::BigInt) -> Self {
        let s = Self::from_biguint(ctx, n.magnitude());
        if n.sign() == num_bigint::Sign::Minus {
            s.neg()
        } else {
            s
        }
    }

    /// Exact rational `num/den`, with denominators handled in `Q_p` semantics.
    pub fn from_ratio(ctx: PadicContext, num: i64, den: i64) -> Result<Self> {
        Self::from_i64(ctx, num).mul(&Self::from_i64(ctx, den).qp_inv()?)
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    /// True when the value is indistinguishable from zero at its precision
    /// (exact zero included).
    pub fn is_zero_to_precision(&self) -> bool {
        matches!(self.repr, Repr::ExactZero | Repr::ZeroToPrec { .. })
    }

    /// Exact valuation if representable; `PrecisionExhausted` for an
    /// unmarked all-zero residue.
    pub fn valuation(&self) -> Result<Valuation> {
        match self.repr {
            Repr::ExactZero => Ok(Valuation::Infinite),
            Repr::ZeroToPrec { abs } => Err(Error::PrecisionExhausted(format!(
                "residue vanishes mod p^{abs} but is not marked exact zero"
            ))),
            Repr::Unit { val, .. } => Ok(Valuation::Finite(val)),
        }
    }

    /// Certified lower bound on the valuation (always available).
    pub fn valuation_lower_bound(&self) -> Valuation {
        match self.repr {
            Repr::ExactZero => Valuation::Infinite,
            Repr::ZeroToPrec { abs } => Valuation::Finite(abs),
            Repr::Unit { val, .. } => Valuation::Finite(val),
        }
    }

    /// Absolute precision: the value is known modulo `p^(this)`.
    pub fn abs_precision(&self) -> Valuation {
        match self.repr {
            Repr::ExactZero => Valuation::Infinite,
            Repr::ZeroToPrec { abs } => Valuation::Finite(abs),
            Repr::Unit { val, digits, .. } => Valuation::Finite(val + digits as i64),
        }
    }

    /// Number of known digits of the unit part (`None` for the zero states).
    pub fn known_digits(&self) -> Option<u32> {
        match self.repr {
            Repr::Unit { digits, .. } => Some(digits),
            _ => None,
        }
    }

    /// The unit part reduced modulo `p^digits`, when there is one.
    pub fn unit_part(&self) -> Option<u64> {
        match self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.ctx.same(&rhs.ctx)?;
        Ok(self.add(rhs))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch in add");
        let ctx = self.ctx;
        match (self.repr, rhs.repr) {
            (Repr::ExactZero, _) => *rhs,
            (_, Repr::ExactZero) => *self,
            (Repr::ZeroToPrec { abs: a1 }, Repr::ZeroToPrec { abs: a2 }) => {
                PadicScalar { ctx, repr: Repr::ZeroToPrec { abs: a1.min(a2) } }
            }
            (Repr::ZeroToPrec { abs }, Repr::Unit { val, unit, digits })
            | (Repr::Unit { val, unit, digits }, Repr::ZeroToPrec { abs }) => {
                let a = abs.min(val + digits as i64);
                if val < a {
                    PadicScalar::from_residue(ctx, val, unit, (a - val) as u32)
                } else {
                    PadicScalar { ctx, repr: Repr::ZeroToPrec { abs: a } }
                }
            }
            (
                Repr::Unit { val: v1, unit: u1, digits: d1 },
                Repr::Unit { val: v2, unit: u2, digits: d2 },
            ) => {
                let a = (v1 + d1 as i64).min(v2 + d2 as i64);
                let m = v1.min(v2);
                if a <= m {
                    return PadicScalar { ctx, repr: Repr::ZeroToPrec { abs: a } };
                }
                let k = (a - m) as u32;
                debug_assert!(k <= ctx.digits);
                let modulus = ctx.pow_p(k);
                let mut s: u64 = 0;
                for (v, u) in [(v1, u1), (v2, u2)] {
                    let sh = (v - m) as u32;
                    if sh < k {
                        let term = mul_mod(u % modulus, ctx.pow_p(sh), modulus);
                        s = (s + term) % modulus;
                    }
                }
                PadicScalar::from_residue(ctx, m, s, k)
            }
        }
    }

    pub fn neg(&self) -> Self {
        match self.repr {
            Repr::Unit { val, unit, digits } => {
                let m = self.ctx.pow_p(digits);
                PadicScalar { ctx: self.ctx, repr: Repr::Unit { val, unit: (m - unit) % m, digits } }
            }
            _ => *self,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.ctx.same(&rhs.ctx)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs)
    }

    pub fn mul_unchecked(&self, rhs: &Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch in mul");
        let ctx = self.ctx;
        match (self.repr, rhs.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => PadicScalar::exact_zero(ctx),
            (Repr::ZeroToPrec { abs: a1 }, Repr::ZeroToPrec { abs: a2 }) => {
                PadicScalar { ctx, repr: Repr::ZeroToPrec { abs: a1 + a2 } }
            }
            (Repr::ZeroToPrec { abs }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::ZeroToPrec { abs }) => {
                PadicScalar { ctx, repr: Repr::ZeroToPrec { abs: abs + val } }
            }
            (
                Repr::Unit { val: v1, unit: u1, digits: d1 },
                Repr::Unit { val: v2, unit: u2, digits: d2 },
            ) => {
                let digits = d1.min(d2);
                let m = ctx.pow_p(digits);
                PadicScalar {
                    ctx,
                    repr: Repr::Unit { val: v1 + v2, unit: mul_mod(u1 % m, u2 % m, m), digits },
                }
            }
        }
    }

    /// Inverse of a unit of `Z_p` (valuation exactly 0); `a * inv(a) ≡ 1 mod p^digits`.
    pub fn mul_inv(&self) -> Result<Self> {
        match self.repr {
            Repr::Unit { val: 0, .. } => self.qp_inv(),
            Repr::Unit { val, .. } => {
                Err(Error::NotAUnit(format!("valuation {val} != 0")))
            }
            Repr::ExactZero => Err(Error::NotAUnit("exact zero".into())),
            Repr::ZeroToPrec { abs } => {
                Err(Error::NotAUnit(format!("zero to precision p^{abs}")))
            }
        }
    }

    /// Inverse in `Q_p` semantics: any element with a certified valuation.
    pub fn qp_inv(&self) -> Result<Self> {
        match self.repr {
            Repr::Unit { val, unit, digits } => {
                let m = self.ctx.pow_p(digits);
                Ok(PadicScalar {
                    ctx: self.ctx,
                    repr: Repr::Unit { val: -val, unit: inv_mod(unit, m), digits },
                })
            }
            Repr::ExactZero => Err(Error::NotAUnit("exact zero".into())),
            Repr::ZeroToPrec { abs } => Err(Error::PrecisionExhausted(format!(
                "cannot invert: zero to precision p^{abs}"
            ))),
        }
    }

    /// Multiply by `p^k` (`k` may be negative): the explicit valuation shift
    /// that realizes division by powers of `p`.
    pub fn shift_val(&self, k: i64) -> Self {
        match self.repr {
            Repr::ExactZero => *self,
            Repr::ZeroToPrec { abs } => {
                PadicScalar { ctx: self.ctx, repr: Repr::ZeroToPrec { abs: abs + k } }
            }
            Repr::Unit { val, unit, digits } => {
                PadicScalar { ctx: self.ctx, repr: Repr::Unit { val: val + k, unit, digits } }
            }
        }
    }

    /// Exact division: `self / rhs` in `Q_p` semantics.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.mul(&rhs.qp_inv()?)
    }

    pub fn pow_u(&self, e: u64) -> Self {
        let mut acc = PadicScalar::one(self.ctx);
        let mut base = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// True when `self` is certified to satisfy `v(self) >= t`.
    pub fn val_at_least(&self, t: i64) -> bool {
        match self.valuation_lower_bound() {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= t,
        }
    }

    /// Residual valuation of `self - rhs`, as a certified lower bound.
    pub fn agreement(&self, rhs: &Self) -> Valuation {
        self.sub(rhs).valuation_lower_bound()
    }

    /// Cap the absolute precision at `p^abs`: anything the caller cannot
    /// actually certify (e.g. series-truncation tails) is discarded from the
    /// precision bookkeeping.
    pub fn truncate_abs_precision(&self, abs: i64) -> Self {
        match self.repr {
            Repr::ExactZero => PadicScalar { ctx: self.ctx, repr: Repr::ZeroToPrec { abs } },
            Repr::ZeroToPrec { abs: a } => {
                PadicScalar { ctx: self.ctx, repr: Repr::ZeroToPrec { abs: a.min(abs) } }
            }
            Repr::Unit { val, unit, digits } => {
                if abs <= val {
                    PadicScalar { ctx: self.ctx, repr: Repr::ZeroToPrec { abs: abs.min(val) } }
                } else {
                    let d = (digits as i64).min(abs - val) as u32;
                    PadicScalar::from_residue(self.ctx, val, unit % self.ctx.pow_p(d), d)
                }
            }
        }
    }

    /// Drop the unit part to at most `digits` known digits (used when
    /// re-expressing internally lifted computations in the caller context).
    pub fn truncate_digits(&self, digits: u32) -> Self {
        match self.repr {
            Repr::Unit { val, unit, digits: d } if d > digits => {
                PadicScalar::from_residue(self.ctx, val, unit, digits)
            }
            _ => *self,
        }
    }

    /// Reinterpret in another context with the same prime. Precision can only
    /// shrink: known digits are capped by the target context.
    pub fn in_context(&self, ctx: PadicContext) -> Result<Self> {
        if ctx.p != self.ctx.p {
            return Err(Error::ContextMismatch(format!(
                "prime {} vs {}",
                self.ctx.p, ctx.p
            )));
        }
        Ok(match self.repr {
            Repr::ExactZero => PadicScalar::exact_zero(ctx),
            Repr::ZeroToPrec { abs } => PadicScalar { ctx, repr: Repr::ZeroToPrec { abs } },
            Repr::Unit { val, unit, digits } => {
                PadicScalar::from_residue(ctx, val, unit % ctx.pow_p(digits.min(ctx.digits)), digits.min(ctx.digits))
            }
        })
    }

    /// Teichmüller lift: the unique `(p-1)`-st root of unity congruent to `a`
    /// modulo `p`, computed by iterating `x -> x^p` to its fixed point.
    pub fn teichmuller(ctx: PadicContext, a: u64) -> Result<Self> {
        if a % ctx.p == 0 {
            return Err(Error::ZeroResidue);
        }
        let m = ctx.pow_p(ctx.digits);
        let mut x = a % m;
        for _ in 0..(ctx.digits + 2) {
            let mut y = x;
            for _ in 0..(ctx.p - 1) {
                y = mul_mod(y, x, m);
            }
            if y == x {
                return Ok(PadicScalar { ctx, repr: Repr::Unit { val: 0, unit: x, digits: ctx.digits } });
            }
            x = y;
        }
        Err(Error::ConvergenceGuard("Teichmüller iteration did not stabilize".into()))
    }

    /// Decimal unit string and valuation for the JSON wire format.
    pub fn to_json_parts(&self) -> (String, i64) {
        match self.repr {
            Repr::ExactZero => ("0".into(), 0),
            Repr::ZeroToPrec { abs } => ("0".into(), abs),
            Repr::Unit { val, unit, .. } => (unit.to_string(), val),
        }
    }

    /// Parse the JSON wire format; `u = "0"` with `v = 0` is exact zero.
    pub fn from_json_parts(ctx: PadicContext, u: &str, v: i64) -> Result<Self> {
        let n: BigUint = u
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad unit string {u:?}")))?;
        if n.is_zero() {
            if v == 0 {
                return Ok(Self::exact_zero(ctx));
            }
            return Ok(PadicScalar { ctx, repr: Repr::ZeroToPrec { abs: v } });
        }
        Ok(Self::from_biguint(ctx, &n).shift_val(v))
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::ExactZero => write!(f, "0"),
            Repr::ZeroToPrec { abs } => write!(f, "O(p^{abs})"),
            Repr::Unit { val, unit, digits } => {
                if val == 0 {
                    write!(f, "{unit} + O(p^{digits})")
                } else {
                    write!(f, "{unit}*p^{val} + O(p^{})", val + digits as i64)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32) -> PadicContext {
        PadicContext::new(p, n).unwrap()
    }

    #[test]
    fn add_tracks_valuation() {
        let c = ctx(3, 4);
        let a = PadicScalar::from_i64(c, 5);
        let b = PadicScalar::from_i64(c, 4);
        let s = a.add(&b);
        assert_eq!(s.valuation().unwrap(), Valuation::Finite(2));
        assert_eq!(s.unit_part(), Some(1));
    }

    #[test]
    fn add_identity_and_cancellation() {
        let c = ctx(3, 4);
        let x = PadicScalar::from_i64(c, 7);
        assert_eq!(x.add(&PadicScalar::exact_zero(c)), x);
        let z = x.add(&x.neg());
        assert!(z.is_zero_to_precision());
        // 5 + (-5) from exact integers: the cancellation is seen mod p^N only.
        let five = PadicScalar::from_i64(c, 5);
        let s = five.add(&PadicScalar::from_i64(c, -5));
        assert!(s.is_zero_to_precision());
    }

    #[test]
    fn valuation_of_examples() {
        let c = ctx(3, 4);
        assert_eq!(
            PadicScalar::from_i64(c, 18).valuation().unwrap(),
            Valuation::Finite(2)
        );
        assert_eq!(
            PadicScalar::exact_zero(c).valuation().unwrap(),
            Valuation::Infinite
        );
        let c2 = ctx(3, 2);
        let unmarked = PadicScalar::from_residue(c2, 0, 9, 2);
        assert!(matches!(unmarked.valuation(), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn inversion() {
        let c = ctx(3, 2);
        let two = PadicScalar::from_i64(c, 2);
        let inv = two.mul_inv().unwrap();
        assert_eq!(inv.unit_part(), Some(5));
        assert_eq!(
            PadicScalar::one(c).mul_inv().unwrap().unit_part(),
            Some(1)
        );
        assert!(matches!(
            PadicScalar::from_i64(c, 3).mul_inv(),
            Err(Error::NotAUnit(_))
        ));
        // two-sided inverse to working precision
        let c8 = ctx(5, 8);
        for n in [2i64, 7, 11, -4] {
            let x = PadicScalar::from_i64(c8, n);
            let prod = x.mul(&x.mul_inv().unwrap()).unwrap();
            assert_eq!(prod.sub(&PadicScalar::one(c8)).valuation_lower_bound(), Valuation::Finite(8));
        }
    }

    #[test]
    fn teichmuller_examples() {
        let c = ctx(3, 4);
        assert_eq!(PadicScalar::teichmuller(c, 1).unwrap().unit_part(), Some(1));
        assert_eq!(PadicScalar::teichmuller(c, 2).unwrap().unit_part(), Some(80));
        let c5 = ctx(5, 3);
        let t = PadicScalar::teichmuller(c5, 2).unwrap();
        let u = t.unit_part().unwrap();
        assert_eq!(u % 5, 2);
        // x^4 ≡ 1 mod 125, checked by direct exponentiation
        let m = 125u64;
        let mut y = 1u64;
        for _ in 0..4 {
            y = y * u % m;
        }
        assert_eq!(y, 1);
        assert!(matches!(PadicScalar::teichmuller(c, 3), Err(Error::ZeroResidue)));
    }

    #[test]
    fn teichmuller_power_identity() {
        for (p, n) in [(3u64, 6u32), (5, 5), (7, 5)] {
            let c = ctx(p, n);
            for a in 1..p {
                let t = PadicScalar::teichmuller(c, a).unwrap();
                let pw = t.pow_u(p - 1);
                assert_eq!(pw.unit_part(), Some(1), "p={p} a={a}");
            }
        }
    }

    #[test]
    fn valuations_multiply_and_ultrametric() {
        let c = ctx(3, 6);
        let a = PadicScalar::from_i64(c, 6);
        let b = PadicScalar::from_i64(c, 15);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.valuation().unwrap(), Valuation::Finite(2));
        // v(a+b) = min when valuations differ
        let x = PadicScalar::from_i64(c, 9);
        let y = PadicScalar::from_i64(c, 2);
        assert_eq!(x.add(&y).valuation().unwrap(), Valuation::Finite(0));
    }

    #[test]
    fn qp_division_shifts_precision() {
        let c = ctx(3, 6);
        let x = PadicScalar::from_i64(c, 2).shift_val(-2); // 2/9
        assert_eq!(x.valuation().unwrap(), Valuation::Finite(-2));
        assert_eq!(x.abs_precision(), Valuation::Finite(4));
        let back = x.shift_val(2);
        assert_eq!(back.valuation().unwrap(), Valuation::Finite(0));
    }

    #[test]
    fn json_roundtrip() {
        let c = ctx(3, 6);
        for s in [
            PadicScalar::from_i64(c, 10).shift_val(-1),
            PadicScalar::exact_zero(c),
            PadicScalar::from_i64(c, -7),
        ] {
            let (u, v) = s.to_json_parts();
            let t = PadicScalar::from_json_parts(c, &u, v).unwrap();
            assert!(s.sub(&t).is_zero_to_precision() || s == t);
        }
    }
}
