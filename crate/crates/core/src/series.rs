//! Truncated polynomial and power-series arithmetic over p-adic scalars.
//!
//! `IwasawaSeries` is the computational stand-in for an element of
//! `Λ = Z_p[[X]]` (or of `Q_p[[X]]`, since coefficients carry their own
//! valuation): coefficients up to a truncation degree `D`, each valid to its
//! recorded precision. A series may additionally be flagged polynomial-exact,
//! in which case its degree is exact rather than truncated.

use crate::error::{Error, Result};
use crate::intpoly::IntPoly;
use crate::padic::{PadicContext, PadicScalar, Valuation};
use serde_json::{json, Value};

#[derive(Debug, Clone)]
pub struct IwasawaSeries {
    ctx: PadicContext,
    coeffs: Vec<PadicScalar>,
    poly_exact: bool,
}

impl IwasawaSeries {
    pub fn new(ctx: PadicContext, mut coeffs: Vec<PadicScalar>, poly_exact: bool) -> Self {
        if coeffs.is_empty() {
            coeffs.push(PadicScalar::exact_zero(ctx));
        }
        IwasawaSeries { ctx, coeffs, poly_exact }
    }

    pub fn zero(ctx: PadicContext, d: usize) -> Self {
        Self::new(ctx, vec![PadicScalar::exact_zero(ctx); d + 1], true)
    }

    pub fn one(ctx: PadicContext, d: usize) -> Self {
        let mut s = Self::zero(ctx, d);
        s.coeffs[0] = PadicScalar::one(ctx);
        s
    }

    pub fn x(ctx: PadicContext, d: usize) -> Self {
        let mut s = Self::zero(ctx, d);
        if d >= 1 {
            s.coeffs[1] = PadicScalar::one(ctx);
        }
        s
    }

    pub fn monomial(ctx: PadicContext, c: PadicScalar, deg: usize, d: usize) -> Self {
        let mut s = Self::zero(ctx, d.max(deg));
        s.coeffs[deg] = c;
        s
    }

    /// Exact integer polynomial reduced into the context; polynomial-exact
    /// whenever the truncation keeps the full degree.
    pub fn from_intpoly(ctx: PadicContext, p: &IntPoly, d: usize) -> Self {
        let mut coeffs = Vec::with_capacity(d + 1);
        for i in 0..=d {
            if i <= p.degree() {
                coeffs.push(PadicScalar::from_bigint(ctx, &p.coeff(i)));
            } else {
                coeffs.push(PadicScalar::exact_zero(ctx));
            }
        }
        IwasawaSeries { ctx, coeffs, poly_exact: d >= p.degree() }
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    /// Truncation degree `D`.
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_poly_exact(&self) -> bool {
        self.poly_exact
    }

    pub fn coeff(&self, i: usize) -> PadicScalar {
        if i < self.coeffs.len() {
            self.coeffs[i]
        } else {
            // beyond the truncation: exactly zero for a polynomial, unknown otherwise
            if self.poly_exact {
                PadicScalar::exact_zero(self.ctx)
            } else {
                PadicScalar::from_json_parts(self.ctx, "0", 0)
                    .expect("zero-to-precision marker")
            }
        }
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn coeff_mut(&mut self, i: usize) -> &mut PadicScalar {
        &mut self.coeffs[i]
    }

    /// Exact degree when polynomial-exact and some coefficient is certified nonzero.
    pub fn exact_degree(&self) -> Option<usize> {
        if !self.poly_exact {
            return None;
        }
        for i in (0..self.coeffs.len()).rev() {
            if !self.coeffs[i].is_zero_to_precision() {
                return Some(i);
            }
        }
        Some(0)
    }

    /// Change the truncation degree. Extending a non-exact series pads with
    /// no-information coefficients, which downstream certifications treat
    /// honestly (they will refuse to certify anything that depends on them).
    pub fn resized(&self, d: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if d + 1 <= coeffs.len() {
            coeffs.truncate(d + 1);
            return IwasawaSeries { ctx: self.ctx, coeffs, poly_exact: self.poly_exact };
        }
        while coeffs.len() < d + 1 {
            coeffs.push(self.coeff(coeffs.len()));
        }
        IwasawaSeries { ctx: self.ctx, coeffs, poly_exact: self.poly_exact }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.ctx.same(&rhs.ctx)?;
        if self.degree_bound() != rhs.degree_bound() {
            return Err(Error::ContextMismatch(format!(
                "truncation degrees differ: {} vs {}",
                self.degree_bound(),
                rhs.degree_bound()
            )));
        }
        Ok(self.add(rhs))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.ctx.same(&rhs.ctx)?;
        if self.degree_bound() != rhs.degree_bound() {
            return Err(Error::ContextMismatch(format!(
                "truncation degrees differ: {} vs {}",
                self.degree_bound(),
                rhs.degree_bound()
            )));
        }
        Ok(self.mul(rhs))
    }

    /// Sum, truncated at the smaller degree bound.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch in series add");
        let d = self.degree_bound().min(rhs.degree_bound());
        let both_poly = self.poly_exact
            && rhs.poly_exact
            && self.exact_degree().map_or(true, |e| e <= d)
            && rhs.exact_degree().map_or(true, |e| e <= d);
        let coeffs = (0..=d).map(|i| self.coeff(i).add(&rhs.coeff(i))).collect();
        IwasawaSeries { ctx: self.ctx, coeffs, poly_exact: both_poly }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        IwasawaSeries {
            ctx: self.ctx,
            coeffs: self.coeffs.iter().map(PadicScalar::neg).collect(),
            poly_exact: self.poly_exact,
        }
    }

    pub fn scalar_mul(&self, c: &PadicScalar) -> Self {
        IwasawaSeries {
            ctx: self.ctx,
            coeffs: self.coeffs.iter().map(|a| a.mul_unchecked(c)).collect(),
            poly_exact: self.poly_exact,
        }
    }

    /// Product, truncated at the smaller degree bound. The result is flagged
    /// polynomial-exact only when no nonzero term was cut off.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch in series mul");
        let d = self.degree_bound().min(rhs.degree_bound());
        let mut coeffs = vec![PadicScalar::exact_zero(self.ctx); d + 1];
        for i in 0..=self.degree_bound().min(d) {
            let a = self.coeff(i);
            if a.is_exact_zero() {
                continue;
            }
            for j in 0..=(d - i).min(rhs.degree_bound()) {
                let b = rhs.coeff(j);
                if b.is_exact_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul_unchecked(&b));
            }
        }
        let poly = self.poly_exact
            && rhs.poly_exact
            && match (self.exact_degree(), rhs.exact_degree()) {
                (Some(a), Some(b)) => a + b <= d,
                _ => true,
            };
        IwasawaSeries { ctx: self.ctx, coeffs, poly_exact: poly }
    }

    pub fn pow_u(&self, e: usize) -> Self {
        let d = self.degree_bound();
        let mut acc = Self::one(self.ctx, d);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply every coefficient by `p^k` (valuation shift; `Q_p` semantics).
    pub fn shift_val(&self, k: i64) -> Self {
        IwasawaSeries {
            ctx: self.ctx,
            coeffs: self.coeffs.iter().map(|c| c.shift_val(k)).collect(),
            poly_exact: self.poly_exact,
        }
    }

    /// Composition `outer ∘ inner`, truncated at the smaller degree bound.
    /// The inner series must vanish at 0.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        assert_eq!(self.ctx, inner.ctx, "context mismatch in compose");
        if !inner.coeff(0).is_zero_to_precision() {
            return Err(Error::NonzeroConstantTerm);
        }
        let d = self.degree_bound().min(inner.degree_bound());
        let inner = inner.resized(d);
        let mut acc = Self::zero(self.ctx, d);
        for i in (0..=self.degree_bound()).rev() {
            acc = acc.mul(&inner);
            let c = self.coeff(i);
            acc.coeffs[0] = acc.coeffs[0].add(&c);
        }
        acc.poly_exact = self.poly_exact
            && inner.poly_exact
            && match (self.exact_degree(), inner.exact_degree()) {
                (Some(a), Some(b)) => a * b <= d,
                _ => true,
            };
        Ok(acc)
    }

    /// Multiplicative inverse of a series whose constant term is invertible.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff(0).qp_inv()?;
        let d = self.degree_bound();
        let mut inv = Self::zero(self.ctx, d);
        inv.coeffs[0] = c0;
        // Newton: y <- y (2 - a y), doubling the accurate degree each pass
        let two = Self::one(self.ctx, d).scalar_mul(&PadicScalar::from_i64(self.ctx, 2));
        let mut reach = 1usize;
        while reach <= d {
            let t = two.sub(&self.mul(&inv));
            inv = inv.mul(&t);
            reach *= 2;
        }
        inv.poly_exact = false;
        Ok(inv)
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree_bound();
        let mut coeffs = Vec::with_capacity(d.max(1));
        for i in 1..=d {
            coeffs.push(self.coeff(i).mul_unchecked(&PadicScalar::from_i64(self.ctx, i as i64)));
        }
        if coeffs.is_empty() {
            coeffs.push(PadicScalar::exact_zero(self.ctx));
        }
        IwasawaSeries { ctx: self.ctx, coeffs, poly_exact: self.poly_exact }
    }

    /// Compositional inverse: `compose(self, result) = X` to the reported
    /// precision. Requires `s(0) = 0` and an invertible linear coefficient
    /// (possibly of nonzero valuation, in `Q_p` semantics).
    pub fn reversion(&self) -> Result<Self> {
        if !self.coeff(0).is_zero_to_precision() {
            return Err(Error::NonzeroConstantTerm);
        }
        let s1 = self.coeff(1);
        let s1_inv = s1.qp_inv().map_err(|_| {
            Error::NonUnitLinearTerm(format!("linear coefficient {}", self.coeff(1)))
        })?;
        let d = self.degree_bound();
        let mut r = Self::x(self.ctx, d).scalar_mul(&s1_inv);
        if d == 0 {
            return Ok(r);
        }
        // Newton on composition: r <- r - (s∘r - X)/(s'∘r)
        let ds = self.derivative().resized(d);
        let x = Self::x(self.ctx, d);
        let max_iter = (usize::BITS - d.leading_zeros()) as usize + 3;
        for _ in 0..max_iter {
            let sr = self.compose(&r)?;
            let res = sr.sub(&x);
            if res.coeffs.iter().all(|c| c.is_zero_to_precision()) {
                return Ok(r);
            }
            let dsr = ds.compose(&r)?;
            let corr = res.mul(&dsr.inverse()?);
            r = r.sub(&corr);
        }
        // Accept the final iterate if the defect now only lives below precision.
        let res = self.compose(&r)?.sub(&x);
        if res.coeffs.iter().all(|c| c.is_zero_to_precision()) {
            Ok(r)
        } else {
            Err(Error::ConvergenceGuard(
                "reversion did not reach a fixed point".into(),
            ))
        }
    }

    /// μ (minimal coefficient valuation) and λ (least index attaining it).
    pub fn mu_lambda(&self) -> Result<(i64, usize)> {
        let mut mu: Option<i64> = None;
        for c in &self.coeffs {
            if let Ok(Valuation::Finite(v)) = c.valuation() {
                mu = Some(mu.map_or(v, |m| m.min(v)));
            }
        }
        let mu = mu.ok_or_else(|| {
            Error::ZeroToPrecision("series vanishes to working precision; μ/λ uncertifiable".into())
        })?;
        for (i, c) in self.coeffs.iter().enumerate() {
            match c.valuation() {
                Ok(Valuation::Finite(v)) if v == mu => return Ok((mu, i)),
                Ok(_) => {}
                Err(_) => {
                    // an uncertified coefficient below the current μ could hide
                    // a smaller λ
                    if let Valuation::Finite(lb) = c.valuation_lower_bound() {
                        if lb <= mu {
                            return Err(Error::PrecisionExhausted(format!(
                                "coefficient {i} is only known mod p^{lb}, cannot certify λ"
                            )));
                        }
                    }
                }
            }
        }
        unreachable!("a coefficient of valuation μ exists")
    }

    /// Horner evaluation at a scalar. No tail bound is applied: the caller is
    /// responsible for the truncation error unless the series is
    /// polynomial-exact.
    pub fn eval(&self, x: &PadicScalar) -> PadicScalar {
        let mut acc = PadicScalar::exact_zero(self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_unchecked(x).add(c);
        }
        acc
    }

    /// Worst-case guaranteed absolute precision over all coefficients.
    pub fn guaranteed_precision(&self) -> Valuation {
        let mut best = Valuation::Infinite;
        for c in &self.coeffs {
            best = best.min(c.abs_precision());
        }
        best
    }

    /// Certified lower bound on the valuation of `self - rhs`, coefficientwise.
    pub fn agreement(&self, rhs: &Self) -> Valuation {
        let mut best = Valuation::Infinite;
        let d = self.degree_bound().min(rhs.degree_bound());
        for i in 0..=d {
            best = best.min(self.coeff(i).agreement(&rhs.coeff(i)));
        }
        best
    }

    /// All coefficients certified to have valuation at least `t`.
    pub fn val_at_least(&self, t: i64) -> bool {
        self.coeffs.iter().all(|c| c.val_at_least(t))
    }

    pub fn truncate_digits(&self, digits: u32) -> Self {
        IwasawaSeries {
            ctx: self.ctx,
            coeffs: self.coeffs.iter().map(|c| c.truncate_digits(digits)).collect(),
            poly_exact: self.poly_exact,
        }
    }

    pub fn in_context(&self, ctx: PadicContext) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.in_context(ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(IwasawaSeries { ctx, coeffs, poly_exact: self.poly_exact })
    }

    /// JSON wire format `{ "p", "N", "D", "coeffs": [{"u","v"},...] }`.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|c| {
                let (u, v) = c.to_json_parts();
                json!({ "u": u, "v": v })
            })
            .collect();
        json!({
            "p": self.ctx.p(),
            "N": self.ctx.digits(),
            "D": self.degree_bound(),
            "coeffs": coeffs,
        })
    }

    pub fn from_json(value: &Value, poly_exact: bool) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidInput("series JSON must be an object".into()))?;
        let p = obj
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidInput("missing p".into()))?;
        let n = obj
            .get("N")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidInput("missing N".into()))?;
        let d = obj
            .get("D")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidInput("missing D".into()))? as usize;
        let ctx = PadicContext::new(p, n as u32)?;
        let arr = obj
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("missing coeffs".into()))?;
        let mut coeffs = Vec::with_capacity(d + 1);
        for item in arr.iter().take(d + 1) {
            let u = item
                .get("u")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::InvalidInput("coefficient missing \"u\"".into()))?;
            let v = item
                .get("v")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::InvalidInput("coefficient missing \"v\"".into()))?;
            coeffs.push(PadicScalar::from_json_parts(ctx, u, v)?);
        }
        while coeffs.len() < d + 1 {
            coeffs.push(PadicScalar::exact_zero(ctx));
        }
        Ok(IwasawaSeries { ctx, coeffs, poly_exact })
    }
}

/// Two-variable series truncated at a total degree.
#[derive(Debug, Clone)]
pub struct BivariateSeries {
    ctx: PadicContext,
    d: usize,
    /// coefficient of X^i Y^j at `offset(i+j) + j`
    coeffs: Vec<PadicScalar>,
}

fn tri_len(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

fn tri_offset(t: usize) -> usize {
    t * (t + 1) / 2
}

impl BivariateSeries {
    pub fn zero(ctx: PadicContext, d: usize) -> Self {
        BivariateSeries { ctx, d, coeffs: vec![PadicScalar::exact_zero(ctx); tri_len(d)] }
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn total_degree_bound(&self) -> usize {
        self.d
    }

    pub fn coeff(&self, i: usize, j: usize) -> PadicScalar {
        if i + j > self.d {
            PadicScalar::exact_zero(self.ctx)
        } else {
            self.coeffs[tri_offset(i + j) + j]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: PadicScalar) {
        assert!(i + j <= self.d);
        self.coeffs[tri_offset(i + j) + j] = c;
    }

    /// Iterate over (i, j, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, PadicScalar)> + '_ {
        (0..=self.d).flat_map(move |t| {
            (0..=t).map(move |j| (t - j, j, self.coeffs[tri_offset(t) + j]))
        })
    }

    /// Embed a univariate series as a series in X (swap = false) or Y (swap = true).
    pub fn from_univariate(s: &IwasawaSeries, d: usize, in_y: bool) -> Self {
        let mut b = Self::zero(s.context(), d);
        for i in 0..=d.min(s.degree_bound()) {
            let c = s.coeff(i);
            if in_y {
                b.set_coeff(0, i, c);
            } else {
                b.set_coeff(i, 0, c);
            }
        }
        b
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx);
        let d = self.d.min(rhs.d);
        let mut out = Self::zero(self.ctx, d);
        for t in 0..=d {
            for j in 0..=t {
                out.coeffs[tri_offset(t) + j] =
                    self.coeff(t - j, j).add(&rhs.coeff(t - j, j));
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        BivariateSeries {
            ctx: self.ctx,
            d: self.d,
            coeffs: self.coeffs.iter().map(PadicScalar::neg).collect(),
        }
    }

    pub fn scalar_mul(&self, c: &PadicScalar) -> Self {
        BivariateSeries {
            ctx: self.ctx,
            d: self.d,
            coeffs: self.coeffs.iter().map(|a| a.mul_unchecked(c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx);
        let d = self.d.min(rhs.d);
        let mut out = Self::zero(self.ctx, d);
        for (i1, j1, a) in self.terms() {
            if a.is_exact_zero() || i1 + j1 > d {
                continue;
            }
            for (i2, j2, b) in rhs.terms() {
                if i1 + j1 + i2 + j2 > d {
                    continue;
                }
                if b.is_exact_zero() {
                    continue;
                }
                let idx = tri_offset(i1 + i2 + j1 + j2) + j1 + j2;
                out.coeffs[idx] = out.coeffs[idx].add(&a.mul_unchecked(&b));
            }
        }
        out
    }

    /// `outer(arg)` for a univariate `outer` and bivariate `arg` with zero
    /// constant term, truncated at `arg`'s total degree.
    pub fn compose_univariate(outer: &IwasawaSeries, arg: &Self) -> Result<Self> {
        if !arg.coeff(0, 0).is_zero_to_precision() {
            return Err(Error::NonzeroConstantTerm);
        }
        let d = arg.d;
        let mut acc = Self::zero(outer.context(), d);
        for i in (0..=outer.degree_bound()).rev() {
            acc = acc.mul(arg);
            let idx = 0;
            acc.coeffs[idx] = acc.coeffs[idx].add(&outer.coeff(i));
        }
        Ok(acc)
    }

    /// Evaluate at two univariate series in the *same* variable:
    /// `self(u(X), v(X))`, truncated at the smaller degree bound. Both
    /// arguments must vanish at 0.
    pub fn eval_two_univariate(&self, u: &IwasawaSeries, v: &IwasawaSeries) -> Result<IwasawaSeries> {
        if !u.coeff(0).is_zero_to_precision() || !v.coeff(0).is_zero_to_precision() {
            return Err(Error::NonzeroConstantTerm);
        }
        let d = u.degree_bound().min(v.degree_bound());
        let u = u.resized(d);
        let v = v.resized(d);
        // v powers once, then Horner over u
        let mut v_pows = Vec::with_capacity(self.d + 1);
        v_pows.push(IwasawaSeries::one(self.ctx, d));
        for j in 1..=self.d {
            v_pows.push(v_pows[j - 1].mul(&v));
        }
        let mut acc = IwasawaSeries::zero(self.ctx, d);
        for i in (0..=self.d).rev() {
            acc = acc.mul(&u);
            for j in 0..=(self.d - i) {
                let c = self.coeff(i, j);
                if !c.is_exact_zero() {
                    acc = acc.add(&v_pows[j].scalar_mul(&c));
                }
            }
        }
        Ok(acc)
    }

    /// Substitute univariate series for both variables:
    /// `self(sx(X), sy(Y))`, truncated at total degree `d`.
    pub fn substitute(&self, sx: &IwasawaSeries, sy: &IwasawaSeries, d: usize) -> Result<Self> {
        if !sx.coeff(0).is_zero_to_precision() || !sy.coeff(0).is_zero_to_precision() {
            return Err(Error::NonzeroConstantTerm);
        }
        let a = Self::from_univariate(sx, d, false);
        let b = Self::from_univariate(sy, d, true);
        // powers of b up to d
        let mut b_pows = Vec::with_capacity(self.d + 1);
        let mut cur = {
            let mut one = Self::zero(self.ctx, d);
            one.set_coeff(0, 0, PadicScalar::one(self.ctx));
            one
        };
        b_pows.push(cur.clone());
        for _ in 1..=self.d {
            cur = cur.mul(&b);
            b_pows.push(cur.clone());
        }
        // rows G_i = sum_j c_{ij} b^j, then Horner over a
        let mut acc = Self::zero(self.ctx, d);
        for i in (0..=self.d).rev() {
            acc = acc.mul(&a);
            for j in 0..=(self.d - i) {
                let c = self.coeff(i, j);
                if !c.is_exact_zero() {
                    acc = acc.add(&b_pows[j].scalar_mul(&c));
                }
            }
        }
        Ok(acc)
    }

    pub fn agreement(&self, rhs: &Self) -> Valuation {
        let mut best = Valuation::Infinite;
        let d = self.d.min(rhs.d);
        for t in 0..=d {
            for j in 0..=t {
                best = best.min(self.coeff(t - j, j).agreement(&rhs.coeff(t - j, j)));
            }
        }
        best
    }

    pub fn val_at_least(&self, t: i64) -> bool {
        self.coeffs.iter().all(|c| c.val_at_least(t))
    }

    /// Swap the two variables.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.ctx, self.d);
        for (i, j, c) in self.terms() {
            out.set_coeff(j, i, c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32) -> PadicContext {
        PadicContext::new(p, n).unwrap()
    }

    fn poly(c: PadicContext, coeffs: &[i64], d: usize) -> IwasawaSeries {
        IwasawaSeries::from_intpoly(c, &IntPoly::from_i64(coeffs), d)
    }

    #[test]
    fn mul_examples() {
        let c = ctx(3, 6);
        // (1+X)(1-X) = 1 - X^2
        let a = poly(c, &[1, 1], 4);
        let b = poly(c, &[1, -1], 4);
        let prod = a.mul(&b);
        assert!(prod.agreement(&poly(c, &[1, 0, -1], 4)).at_least(6));
        // a·1 = a
        assert!(a.mul(&IwasawaSeries::one(c, 4)).agreement(&a).at_least(6));
        // (1+3X)^2 = 1 + 6X + 9X^2 at p=3, D=2
        let s = poly(c, &[1, 3], 2);
        let sq = s.mul(&s);
        assert!(sq.agreement(&poly(c, &[1, 6, 9], 2)).at_least(6));
    }

    #[test]
    fn compose_examples() {
        let c = ctx(3, 6);
        // (X + X^2)^2 = X^2 + 2X^3 + X^4
        let outer = poly(c, &[0, 0, 1], 4);
        let inner = poly(c, &[0, 1, 1], 4);
        let comp = outer.compose(&inner).unwrap();
        assert!(comp.agreement(&poly(c, &[0, 0, 1, 2, 1], 4)).at_least(6));
        // compose(f, X) = f
        let f = poly(c, &[0, 2, 5, 1], 4);
        assert!(f.compose(&IwasawaSeries::x(c, 4)).unwrap().agreement(&f).at_least(6));
        // f = (1+X)^3 - 1; f∘f = (1+X)^9 - 1 truncated
        let f3 = IwasawaSeries::from_intpoly(c, &IntPoly::one_plus_x_pow_minus_one(3), 6);
        let ff = f3.compose(&f3).unwrap();
        let f9 = IwasawaSeries::from_intpoly(c, &IntPoly::one_plus_x_pow_minus_one(9), 6);
        assert!(ff.agreement(&f9).at_least(6));
        // nonzero constant -> error
        assert!(matches!(
            f3.compose(&IwasawaSeries::one(c, 6)),
            Err(Error::NonzeroConstantTerm)
        ));
    }

    #[test]
    fn reversion_examples() {
        let c = ctx(5, 8);
        let x = IwasawaSeries::x(c, 6);
        assert!(x.reversion().unwrap().agreement(&x).at_least(8));
        // reversion(X + X^2) has alternating Catalan-style coefficients 1, -1, 2, -5, 14 ...
        let s = poly(c, &[0, 1, 1], 6);
        let r = s.reversion().unwrap();
        let expected = poly(c, &[0, 1, -1, 2, -5, 14, -42], 6);
        assert!(r.agreement(&expected).at_least(8));
        // X^2 has no reversion
        assert!(matches!(
            poly(c, &[0, 0, 1], 6).reversion(),
            Err(Error::NonUnitLinearTerm(_))
        ));
    }

    #[test]
    fn reversion_composes_to_identity() {
        let c = ctx(3, 8);
        let s = poly(c, &[0, 2, 7, 1, 5], 10);
        let r = s.reversion().unwrap();
        let comp = s.compose(&r).unwrap();
        let x = IwasawaSeries::x(c, 10);
        assert!(comp.agreement(&x).at_least(8));
    }

    #[test]
    fn mu_lambda_examples() {
        let c = ctx(3, 6);
        assert_eq!(poly(c, &[0, 3, 0, 1], 5).mu_lambda().unwrap(), (0, 3));
        // p(1+X): mu = 1, lambda = 0
        assert_eq!(poly(c, &[3, 3], 5).mu_lambda().unwrap(), (1, 0));
        // X^2 + 3X + 3: mu = 0, lambda = 2
        assert_eq!(poly(c, &[3, 3, 1], 5).mu_lambda().unwrap(), (0, 2));
        assert!(matches!(
            IwasawaSeries::zero(c, 5).mu_lambda(),
            Err(Error::ZeroToPrecision(_))
        ));
    }

    #[test]
    fn series_inverse() {
        let c = ctx(3, 8);
        let s = poly(c, &[1, 4, 2, 8], 8);
        let inv = s.inverse().unwrap();
        let prod = s.mul(&inv);
        let one = IwasawaSeries::one(c, 8);
        assert!(prod.agreement(&one).at_least(8));
    }

    #[test]
    fn bivariate_mul_and_substitute() {
        let c = ctx(3, 6);
        // F = X + Y + XY
        let mut f = BivariateSeries::zero(c, 6);
        f.set_coeff(1, 0, PadicScalar::one(c));
        f.set_coeff(0, 1, PadicScalar::one(c));
        f.set_coeff(1, 1, PadicScalar::one(c));
        // F(X, 0) embeds back
        let sq = f.mul(&f);
        // coefficient of X^2 is 1, of X^2 Y is 2, of X^2Y^2 is 3... check one
        assert_eq!(sq.coeff(2, 0).unit_part(), Some(1));
        assert_eq!(sq.coeff(1, 1).unit_part(), Some(2));
        // substitute X -> 2X, Y -> Y: F(2X, Y) = 2X + Y + 2XY
        let two_x = poly(c, &[0, 2], 6);
        let y = poly(c, &[0, 1], 6);
        let g = f.substitute(&two_x, &y, 6).unwrap();
        assert_eq!(g.coeff(1, 0).unit_part(), Some(2));
        assert_eq!(g.coeff(0, 1).unit_part(), Some(1));
        assert_eq!(g.coeff(1, 1).unit_part(), Some(2));
    }

    #[test]
    fn json_roundtrip() {
        let c = ctx(3, 8);
        let s = poly(c, &[1, -2, 9], 4).shift_val(-1);
        let j = s.to_json();
        let t = IwasawaSeries::from_json(&j, false).unwrap();
        assert!(s.agreement(&t).at_least(7));
    }
}
