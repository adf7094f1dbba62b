//! The supersingular elliptic formal group through its Honda logarithm.
//!
//! `ℓ(X) = Σ (-1)^k f^(2k)(X)/p^k` for a good lift `f`; the group law is
//! `G(X,Y) = ℓ^{-1}(ℓ(X) + ℓ(Y))`, integral by Honda's theorem (re-checked on
//! every constructed prefix), and the distinguished point `ε` solves
//! `ℓ(ε) = p/(p+1)`. Division points of `f` joined with `ε` produce the
//! point sequences whose formal-group traces satisfy the alternating
//! relations checked in the verification suite; the `ℓ`-coordinate route is
//! exact on division points because `f(e_1) = 0` truncates the logarithm to a
//! finite sum.

use crate::error::{Error, Result};
use crate::lubin_tate::{FormalGroupLaw, FrobeniusLift};
use crate::padic::{PadicContext, PadicScalar, Valuation};
use crate::series::{BivariateSeries, IwasawaSeries};
use crate::tower::{gamma_reps, teichmuller_reps, TowerElement, TowerRing};

/// Whether the π-sequence starts with `e_0 = 0` (so `c_0 = ε`) or with a
/// primitive `π`-division point `e_0` (so every `e_k` lives one level higher).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiBase {
    Zero,
    Primitive,
}

/// The Honda formal group of a good lift: logarithm, exponential and law.
#[derive(Debug, Clone)]
pub struct HondaGroup {
    lift: FrobeniusLift,
    group: FormalGroupLaw,
}

impl HondaGroup {
    pub fn lift(&self) -> &FrobeniusLift {
        &self.lift
    }

    pub fn log(&self) -> &IwasawaSeries {
        self.group.log()
    }

    pub fn exp(&self) -> &IwasawaSeries {
        self.group.exp()
    }

    pub fn law(&self) -> &BivariateSeries {
        self.group.law()
    }

    pub fn context(&self) -> PadicContext {
        self.lift.context()
    }

    pub fn degree_bound(&self) -> usize {
        self.group.degree_bound()
    }
}

/// Build the Honda group to truncation degree `d`.
///
/// The logarithm sum stops when the next term vanishes to working precision
/// below degree `d` (hard-capped); the linear coefficient is checked against
/// `p/(p+π²)` and the law prefix against integrality.
pub fn honda_group(f: &FrobeniusLift, d: usize) -> Result<HondaGroup> {
    let ctx = f.context();
    let p = ctx.p();
    let fs = f.series(d);
    let f2 = fs.compose(&fs)?; // f^(2)
    let p_inv = PadicScalar::from_i64(ctx, p as i64).qp_inv()?;
    // iterate f^(2k) unscaled; the (-1/p)^k factor is applied per term
    let mut iterate = IwasawaSeries::x(ctx, d);
    let mut scale = PadicScalar::one(ctx);
    let mut acc = iterate.clone();
    let log_p_d = (1..).take_while(|&k| (p as u128).pow(k) <= d as u128).count();
    let cap = ctx.digits() as usize + log_p_d + 4;
    let mut converged = false;
    for _ in 0..cap {
        iterate = f2.compose(&iterate)?;
        scale = scale.mul_unchecked(&p_inv).neg();
        let term = iterate.scalar_mul(&scale);
        // the term vanishes to working precision: every coefficient ≡ 0 mod p^N
        if term.val_at_least(ctx.digits() as i64) {
            converged = true;
            break;
        }
        acc = acc.add(&term);
    }
    if !converged {
        return Err(Error::ConvergenceGuard(format!(
            "logarithm terms still visible after {cap} summands"
        )));
    }
    // ℓ'(0) = p/(p+π²)
    let lin = acc.coeff(1);
    let pi2 = PadicScalar::from_i64(ctx, f.pi()).pow_u(2);
    let denom = PadicScalar::from_i64(ctx, p as i64).add(&pi2);
    let want = PadicScalar::from_i64(ctx, p as i64).div(&denom)?;
    if !lin.sub(&want).is_zero_to_precision() {
        return Err(Error::ConvergenceGuard(format!(
            "logarithm linear coefficient {lin} is not p/(p+π²) = {want}"
        )));
    }
    let group = FormalGroupLaw::from_logarithm(acc)?;
    // Honda integrality of the law prefix: a certified negative valuation is a bug
    for (i, j, c) in group.law().terms() {
        if let Ok(Valuation::Finite(v)) = c.valuation() {
            if v < 0 {
                return Err(Error::ConvergenceGuard(format!(
                    "law coefficient ({i},{j}) has negative valuation {v}"
                )));
            }
        }
    }
    Ok(HondaGroup { lift: f.clone(), group })
}

/// `ℓ` at a scalar of positive valuation: `Σ (-1)^k f^(2k)(x)/p^k` with the
/// exact polynomial iterated on scalars; the term valuations grow by one
/// digit per summand, so the cutoff is certified.
pub fn ell_scalar(f: &FrobeniusLift, x: &PadicScalar) -> Result<PadicScalar> {
    let ctx = f.context();
    if !x.val_at_least(1) {
        return Err(Error::ConvergenceGuard(
            "ℓ at a scalar needs valuation >= 1".into(),
        ));
    }
    let fp = f.poly().to_scalars(ctx);
    let eval = |y: &PadicScalar| -> PadicScalar {
        let mut acc = PadicScalar::exact_zero(ctx);
        for c in fp.iter().rev() {
            acc = acc.mul_unchecked(y).add(c);
        }
        acc
    };
    let mut y = *x;
    let mut acc = PadicScalar::exact_zero(ctx);
    let mut sign = false;
    let mut k = 0i64;
    loop {
        // term = ± y / p^k, with v(y) >= v(x) + 2k
        let term = y.shift_val(-k);
        let term = if sign { term.neg() } else { term };
        if term.is_zero_to_precision() && k > 0 {
            return Ok(acc);
        }
        acc = acc.add(&term);
        y = eval(&eval(&y));
        sign = !sign;
        k += 1;
        if k > ctx.digits() as i64 + 4 {
            return Err(Error::ConvergenceGuard("scalar ℓ did not converge".into()));
        }
    }
}

/// `ℓ'` at a scalar of positive valuation (for the Newton solve).
fn ell_scalar_derivative(f: &FrobeniusLift, x: &PadicScalar) -> Result<PadicScalar> {
    let ctx = f.context();
    let fp = f.poly().to_scalars(ctx);
    let eval = |y: &PadicScalar| -> PadicScalar {
        let mut acc = PadicScalar::exact_zero(ctx);
        for c in fp.iter().rev() {
            acc = acc.mul_unchecked(y).add(c);
        }
        acc
    };
    let dv: Vec<PadicScalar> = (1..fp.len())
        .map(|i| fp[i].mul_unchecked(&PadicScalar::from_i64(ctx, i as i64)))
        .collect();
    let evald = |y: &PadicScalar| -> PadicScalar {
        let mut acc = PadicScalar::exact_zero(ctx);
        for c in dv.iter().rev() {
            acc = acc.mul_unchecked(y).add(c);
        }
        acc
    };
    // (f^(2k))'(x) = prod of f'(f^(j)(x)); term k: /p^k
    let mut acc = PadicScalar::exact_zero(ctx);
    let mut chain = PadicScalar::one(ctx);
    let mut y = *x;
    let mut sign = false;
    let mut k = 0i64;
    loop {
        let term = chain.shift_val(-k);
        let term = if sign { term.neg() } else { term };
        if term.is_zero_to_precision() && k > 0 {
            return Ok(acc);
        }
        acc = acc.add(&term);
        // extend the chain across two more iterates
        chain = chain.mul_unchecked(&evald(&y));
        y = eval(&y);
        chain = chain.mul_unchecked(&evald(&y));
        y = eval(&y);
        sign = !sign;
        k += 1;
        if k > ctx.digits() as i64 + 4 {
            return Err(Error::ConvergenceGuard("scalar ℓ' did not converge".into()));
        }
    }
}

/// The distinguished point `ε ∈ pZ_p` with `ℓ(ε) = p/(p+1)`, found by a
/// Newton solve on scalars and certified by the round trip.
pub fn epsilon_point(h: &HondaGroup) -> Result<PadicScalar> {
    let f = &h.lift;
    let ctx = f.context();
    let p = ctx.p() as i64;
    let target = PadicScalar::from_ratio(ctx, p, p + 1)?;
    // first-order seed: x = target / ℓ'(0) = target (p+π²)/p
    let pi2 = PadicScalar::from_i64(ctx, f.pi()).pow_u(2);
    let lin = PadicScalar::from_i64(ctx, p).div(&PadicScalar::from_i64(ctx, p).add(&pi2))?;
    let mut x = target.div(&lin)?;
    for _ in 0..(ctx.digits() + 4) {
        let res = ell_scalar(f, &x)?.sub(&target);
        if res.is_zero_to_precision() {
            if !x.val_at_least(1) || x.val_at_least(2) {
                return Err(Error::ConvergenceGuard(format!("ε has valuation != 1: {x}")));
            }
            return Ok(x);
        }
        let d = ell_scalar_derivative(f, &x)?;
        x = x.sub(&res.div(&d)?);
    }
    Err(Error::ConvergenceGuard("Newton solve for ε did not settle".into()))
}

/// A point of the formal group in a tower ring: an element of the maximal
/// ideal (certified positive valuation).
#[derive(Debug, Clone)]
pub struct FormalPoint {
    value: TowerElement,
}

impl FormalPoint {
    pub fn new(value: TowerElement) -> Result<Self> {
        match value.pi_val_lower_bound() {
            None => Ok(FormalPoint { value }),
            Some(v) if v >= 1 => Ok(FormalPoint { value }),
            Some(v) => Err(Error::InvalidInput(format!(
                "formal point needs positive valuation, lower bound {v}"
            ))),
        }
    }

    pub fn value(&self) -> &TowerElement {
        &self.value
    }

    pub fn ring(&self) -> &TowerRing {
        self.value.ring()
    }
}

/// Formal sum `G(x, y)` of two points, certified to absolute precision
/// `p^target_abs`: the law prefix must be long enough for the truncation tail
/// `(D+1)·min(v(x), v(y))` to fall below the target.
pub fn g_add(
    h: &HondaGroup,
    x: &FormalPoint,
    y: &FormalPoint,
    target_abs: i64,
) -> Result<FormalPoint> {
    let ring = x.ring().clone();
    let e = ring.ram_index() as i64;
    let vx = x.value.pi_val_lower_bound();
    let vy = y.value.pi_val_lower_bound();
    let vmin = match (vx, vy) {
        (None, _) => return Ok(y.clone()),
        (_, None) => return Ok(x.clone()),
        (Some(a), Some(b)) => a.min(b),
    };
    let d = h.degree_bound() as i64;
    let tail_pi = (d + 1) * vmin;
    if tail_pi < e * target_abs {
        return Err(Error::ConvergenceGuard(format!(
            "law degree {d} gives tail valuation {tail_pi}/{e}, below target {target_abs}; \
             rebuild the group at degree >= {}",
            (e * target_abs) / vmin
        )));
    }
    // Σ g_ij x^i y^j with precomputed powers
    let dmax = d as usize;
    let mut xp = Vec::with_capacity(dmax + 1);
    let mut yp = Vec::with_capacity(dmax + 1);
    xp.push(ring.one());
    yp.push(ring.one());
    for i in 1..=dmax {
        xp.push(xp[i - 1].mul(&x.value));
        yp.push(yp[i - 1].mul(&y.value));
    }
    let mut acc = ring.zero();
    for (i, j, c) in h.law().terms() {
        if c.is_exact_zero() {
            continue;
        }
        let t = xp[i].mul(&yp[j]).scalar_mul(&c);
        acc = acc.add(&t);
    }
    let acc = acc.truncate_abs_precision(tail_pi.div_euclid(e));
    FormalPoint::new(acc)
}

/// `[-1]` of a point: `exp(-log x)` evaluated with the same tail policy.
pub fn g_neg(h: &HondaGroup, x: &FormalPoint, target_abs: i64) -> Result<FormalPoint> {
    let ring = x.ring().clone();
    let e = ring.ram_index() as i64;
    let vx = match x.value.pi_val_lower_bound() {
        None => return Ok(x.clone()),
        Some(v) => v,
    };
    let d = h.degree_bound() as i64;
    let tail_pi = (d + 1) * vx;
    if tail_pi < e * target_abs {
        return Err(Error::ConvergenceGuard(format!(
            "law degree {d} insufficient for negation at target {target_abs}"
        )));
    }
    let minus = h.group.mult_by_int(-1)?;
    let val = ring.eval_series_integral(&minus, &x.value)?;
    FormalPoint::new(val.truncate_abs_precision(tail_pi.div_euclid(e)))
}

/// `c_k = e_k [+] ε` inside a ring of level `>= k` (`>= k+1` for the
/// primitive base convention). Under the zero-base convention `c_0 = ε`.
pub fn c_point(
    h: &HondaGroup,
    ring: &TowerRing,
    k: usize,
    base: PiBase,
    target_abs: i64,
) -> Result<FormalPoint> {
    let eps = epsilon_point(h)?;
    let e_k = division_point_for(ring, k, base)?;
    let eps_pt = FormalPoint::new(ring.from_scalar(eps))?;
    if e_k.is_exact_zero() {
        return Ok(eps_pt);
    }
    let ek_pt = FormalPoint::new(e_k)?;
    g_add(h, &ek_pt, &eps_pt, target_abs)
}

/// The π-sequence member `e_k` under the chosen convention.
pub fn division_point_for(ring: &TowerRing, k: usize, base: PiBase) -> Result<TowerElement> {
    match base {
        PiBase::Zero => ring.division_point(k),
        PiBase::Primitive => ring.division_point(k + 1),
    }
}

/// `ℓ(e_k)` as the exact finite sum `Σ (-1)^j e_(k-2j)/p^j` (the iterates of
/// `f` kill `e_0`, so the logarithm truncates exactly on division points).
pub fn ell_of_division_point(ring: &TowerRing, k: usize, base: PiBase) -> Result<TowerElement> {
    let mut acc = ring.zero();
    let mut j = 0usize;
    loop {
        if 2 * j > k {
            break;
        }
        let term = division_point_for(ring, k - 2 * j, base)?.shift_p(-(j as i64));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        j += 1;
    }
    // primitive base has one extra live index at e'_0
    if base == PiBase::Primitive && k % 2 == 1 {
        // indices k, k-2, ..., 1 were summed; nothing further survives
    }
    Ok(acc)
}

/// `ℓ(c_k) = p/(p+1) + ℓ(e_k)`.
pub fn ell_of_c(ring: &TowerRing, k: usize, base: PiBase) -> Result<TowerElement> {
    let ctx = ring.context();
    let p = ctx.p() as i64;
    let t = PadicScalar::from_ratio(ctx, p, p + 1)?;
    Ok(ell_of_division_point(ring, k, base)?.add(&ring.from_scalar(t)))
}

/// `ℓ(d_k)`: the Δ-trace (over the `p-1` Teichmüller conjugates) of
/// `ℓ(c_(k+1))`, computed inside a ring of ambient level `>= k+1`.
pub fn ell_of_d(ring: &TowerRing, k: usize, base: PiBase) -> Result<TowerElement> {
    let ctx = ring.context();
    let ell_c = ell_of_c(ring, k + 1, base)?;
    let mut acc = ring.zero();
    for delta in teichmuller_reps(ctx, ring.level())? {
        acc = acc.add(&ell_c.galois_apply(delta)?);
    }
    Ok(acc)
}

/// `ℓ` at an arbitrary point of positive valuation by exact `f`-iteration,
/// with a certified Newton-polygon cutoff.
pub fn ell_at(f: &FrobeniusLift, x: &TowerElement) -> Result<TowerElement> {
    let ring = x.ring().clone();
    let e = ring.ram_index() as i64;
    let vx = match x.pi_val_lower_bound() {
        None => return Ok(ring.zero()),
        Some(v) if v >= 1 => v,
        Some(v) => {
            return Err(Error::ConvergenceGuard(format!(
                "ℓ needs positive valuation, lower bound {v}"
            )))
        }
    };
    let p = ring.context().p() as i64;
    let target_pi = e * (ring.context().digits() as i64 + 1);
    let mut acc = ring.zero();
    let mut y = x.clone();
    let mut bound = vx;
    let mut k = 0i64;
    loop {
        let term = y.shift_p(-k);
        acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        // advance two f-iterations and the valuation bound
        for _ in 0..2 {
            y = ring.eval_intpoly(f.poly(), &y);
            bound = (e + bound).min(p * bound);
        }
        k += 1;
        // once bound - k·e is past the target and the growth is linear, stop
        if bound - k * e >= target_pi && bound >= e {
            return Ok(acc);
        }
        if k > 4 * (ring.context().digits() as i64 + e) {
            return Err(Error::ConvergenceGuard("ℓ at point did not converge".into()));
        }
    }
}

/// Formal-group trace: the `G`-sum of the Galois conjugates over
/// `Gal(k_n/k_m)`, folded in label order.
pub fn formal_trace(
    h: &HondaGroup,
    x: &FormalPoint,
    m: usize,
    target_abs: i64,
) -> Result<FormalPoint> {
    let ring = x.ring().clone();
    let n = ring.level();
    assert!(m <= n);
    if m == n {
        return Ok(x.clone());
    }
    let reps = crate::tower::galois_reps(ring.context().p(), n, m);
    g_fold(h, x, &reps, target_abs)
}

/// `G`-sum over the Δ-conjugates: the formal trace from `k_(n)` to the
/// subfield fixed by the torsion part, producing the `d`-points.
pub fn d_point(h: &HondaGroup, ring: &TowerRing, k: usize, base: PiBase, target_abs: i64) -> Result<FormalPoint> {
    let c = c_point(h, ring, k + 1, base, target_abs)?;
    let reps = teichmuller_reps(ring.context(), ring.level())?;
    let pt = g_fold(h, &c, &reps, target_abs)?;
    // Δ-invariance of the result
    for delta in teichmuller_reps(ring.context(), ring.level())? {
        let img = pt.value().galois_apply(delta)?;
        let diff = img.sub(pt.value());
        if !diff.is_zero_to_precision() && diff.pi_valuation().is_ok() {
            return Err(Error::PrecisionExhausted(format!(
                "d-point is not Δ-invariant: residual {:?}",
                diff.pi_valuation()
            )));
        }
    }
    Ok(pt)
}

fn g_fold(h: &HondaGroup, x: &FormalPoint, reps: &[u64], target_abs: i64) -> Result<FormalPoint> {
    let mut acc: Option<FormalPoint> = None;
    for &u in reps {
        let conj = FormalPoint::new(x.value().galois_apply(u)?)?;
        acc = Some(match acc {
            None => conj,
            Some(a) => g_add(h, &a, &conj, target_abs)?,
        });
    }
    Ok(acc.expect("at least one conjugate"))
}

/// Trace over `Gal(L_n/L_m)` for points of the `Γ`-tower levels, inside an
/// ambient ring of level `> n`.
pub fn formal_gamma_trace(
    h: &HondaGroup,
    x: &FormalPoint,
    level_from: usize,
    level_to: usize,
    target_abs: i64,
) -> Result<FormalPoint> {
    let ring = x.ring().clone();
    let reps = gamma_reps(ring.context().p(), ring.level(), level_from, level_to);
    g_fold(h, x, &reps, target_abs)
}

/// Plus/minus membership: the trace conditions `Tr^n_m(P) ∈ Ê(L_(m-1))` for
/// all `1 <= m <= n` of the selected parity (odd for `+`, even for `-`).
/// A certified violation returns `false`; an undecidable residual errors.
pub fn pm_membership(
    h: &HondaGroup,
    x: &FormalPoint,
    level: usize,
    plus: bool,
    target_abs: i64,
) -> Result<bool> {
    let ring = x.ring().clone();
    let p = ring.context().p();
    let pn = {
        let mut m = 1u64;
        for _ in 0..ring.level() {
            m *= p;
        }
        m
    };
    for m in 1..=level {
        if (m % 2 == 1) != plus {
            continue;
        }
        let tr = if m == level {
            x.clone()
        } else {
            formal_gamma_trace(h, x, level, m, target_abs)?
        };
        // membership in L_(m-1): invariance under Gal(L_m/L_(m-1))
        let gen = (1 + pow_u(p, m as u32)) % pn;
        let img = tr.value().galois_apply(gen)?;
        let diff = img.sub(tr.value());
        if diff.is_zero_to_precision() {
            continue;
        }
        if diff.pi_valuation().is_ok() {
            return Ok(false);
        }
        return Err(Error::PrecisionExhausted(format!(
            "membership at m = {m} undecidable at working precision"
        )));
    }
    Ok(true)
}

fn pow_u(p: u64, k: u32) -> u64 {
    (0..k).fold(1u64, |m, _| m * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn ctx(p: u64, n: u32) -> PadicContext {
        PadicContext::new(p, n).unwrap()
    }

    fn group(p: u64, digits: u32, d: usize) -> HondaGroup {
        let c = ctx(p, digits);
        let f = FrobeniusLift::good(c, p as i64).unwrap();
        honda_group(&f, d).unwrap()
    }

    #[test]
    fn log_linear_coefficient() {
        // ℓ'(0) = p/(p+π²) = 1/(1+p) for π = p
        let h = group(3, 8, 12);
        let lin = h.log().coeff(1);
        let want = PadicScalar::from_ratio(ctx(3, 8), 1, 4).unwrap();
        assert!(lin.sub(&want).is_zero_to_precision());
        assert!(h.log().coeff(0).is_zero_to_precision());
    }

    #[test]
    fn law_is_multiplicative_mod_p_and_integral() {
        let h = group(3, 8, 10);
        for (i, j, c) in h.law().terms() {
            let want: i64 = matches!((i, j), (1, 0) | (0, 1) | (1, 1)) as i64;
            let diff = c.sub(&PadicScalar::from_i64(ctx(3, 8), want));
            assert!(diff.val_at_least(1), "({i},{j}): {c}");
        }
    }

    #[test]
    fn log_homomorphism() {
        let h = group(3, 9, 10);
        let lhs = BivariateSeries::compose_univariate(h.log(), h.law()).unwrap();
        let rhs = BivariateSeries::from_univariate(h.log(), 10, false)
            .add(&BivariateSeries::from_univariate(h.log(), 10, true));
        assert!(lhs.agreement(&rhs).at_least(4));
    }

    #[test]
    fn epsilon_examples() {
        for p in [3u64, 5] {
            let h = group(p, 9, 10);
            let eps = epsilon_point(&h).unwrap();
            assert_eq!(eps.valuation().unwrap(), Valuation::Finite(1), "p = {p}");
            // round trip
            let t = PadicScalar::from_ratio(ctx(p, 9), p as i64, p as i64 + 1).unwrap();
            let back = ell_scalar(h.lift(), &eps).unwrap();
            assert!(back.sub(&t).is_zero_to_precision(), "p = {p}");
        }
    }

    #[test]
    fn ell_scalar_agrees_with_series() {
        let h = group(3, 10, 30);
        let x = PadicScalar::from_i64(ctx(3, 10), 6);
        let direct = ell_scalar(h.lift(), &x).unwrap();
        // series evaluation with tail: v(term_k) >= k·v(x) - small, degree 30 is plenty
        let via_series = h.log().eval(&x);
        assert!(direct.sub(&via_series).valuation_lower_bound().at_least(8));
    }

    #[test]
    fn ell_of_division_points_is_exact_sum() {
        let c = ctx(3, 9);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let ring = TowerRing::build(&f, 2).unwrap();
        // ℓ(e_2) = e_2 - e_0/p = e_2 exactly under the zero-base convention
        let l2 = ell_of_division_point(&ring, 2, PiBase::Zero).unwrap();
        assert!(l2.sub(&ring.uniformizer()).is_exact_zero());
        // cross-check with the generic evaluator
        let generic = ell_at(&f, &ring.uniformizer()).unwrap();
        assert!(l2.sub(&generic).is_zero_to_precision());
    }

    #[test]
    fn ell_at_matches_finite_sum_level3() {
        let c = ctx(3, 8);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let ring = TowerRing::build(&f, 3).unwrap();
        let l3 = ell_of_division_point(&ring, 3, PiBase::Zero).unwrap();
        // ℓ(e_3) = e_3 - e_1/p
        let want = ring
            .division_point(3)
            .unwrap()
            .sub(&ring.division_point(1).unwrap().shift_p(-1));
        assert!(l3.sub(&want).is_exact_zero());
        let generic = ell_at(&f, &ring.uniformizer()).unwrap();
        let diff = l3.sub(&generic);
        assert!(diff.is_zero_to_precision(), "{:?}", diff.pi_val_lower_bound());
    }

    #[test]
    fn c_point_valuation_and_log() {
        let c = ctx(3, 9);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let h = honda_group(&f, 40).unwrap();
        let ring = TowerRing::build(&f, 1).unwrap();
        let c1 = c_point(&h, &ring, 1, PiBase::Zero, 5).unwrap();
        // v(c_1) = v(e_1) = 1/2
        assert_eq!(c1.value().pi_valuation().unwrap(), Some(1));
        // ℓ(c_1) = ℓ(e_1) + p/(p+1), via the certified pointwise evaluator
        let direct = ell_at(&f, c1.value()).unwrap();
        let expect = ell_of_c(&ring, 1, PiBase::Zero).unwrap();
        let diff = direct.sub(&expect);
        assert!(
            diff.pi_val_lower_bound().map_or(true, |v| v >= 8),
            "residual {:?}",
            diff.pi_val_lower_bound()
        );
    }

    #[test]
    fn formal_trace_matches_field_trace_through_log() {
        // ℓ(formal trace) = field trace(ℓ) on c_2 from level 2 to level 1
        let c = ctx(3, 9);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let h = honda_group(&f, 60).unwrap();
        let ring = TowerRing::build(&f, 2).unwrap();
        let c2 = c_point(&h, &ring, 2, PiBase::Zero, 5).unwrap();
        let tr = formal_trace(&h, &c2, 1, 4).unwrap();
        let lhs = ell_at(&f, tr.value()).unwrap();
        let rhs = crate::tower::field_trace(&ell_at(&f, c2.value()).unwrap(), 1).unwrap();
        let diff = lhs.sub(&rhs);
        let e = ring.ram_index() as i64;
        assert!(
            diff.pi_val_lower_bound().map_or(true, |v| v >= 3 * e),
            "residual {:?}",
            diff.pi_val_lower_bound()
        );
    }

    #[test]
    fn trace_relation_level2_in_log_coordinates() {
        // Tr(ℓ(c_2)) = -ℓ(c_0) with c_0 = ε under the zero-base convention
        let c = ctx(3, 10);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let ring = TowerRing::build(&f, 2).unwrap();
        let lc2 = ell_of_c(&ring, 2, PiBase::Zero).unwrap();
        let tr = crate::tower::field_trace(&lc2, 1).unwrap();
        let lc0 = ell_of_c(&ring, 0, PiBase::Zero).unwrap();
        let diff = tr.add(&lc0);
        assert!(diff.is_zero_to_precision(), "{:?}", diff.pi_val_lower_bound());
    }

    #[test]
    fn trace_relation_level1_unit() {
        // Tr(ℓ(c_1)) = u·ℓ(c_0) with u = -2
        let c = ctx(3, 10);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let ring = TowerRing::build(&f, 1).unwrap();
        let lc1 = ell_of_c(&ring, 1, PiBase::Zero).unwrap();
        let tr = crate::tower::field_trace(&lc1, 0).unwrap();
        let lc0 = ell_of_c(&ring, 0, PiBase::Zero).unwrap();
        let u = tr.coords()[0].div(&lc0.coords()[0]).unwrap();
        assert_eq!(u.valuation().unwrap(), Valuation::Finite(0));
        let diff = u.sub(&PadicScalar::from_i64(c, -2));
        assert!(diff.is_zero_to_precision(), "u = {u}");
    }

    #[test]
    fn primitive_base_breaks_level1_relation() {
        // under the primitive convention c_0 has an e_0 component outside Q_p,
        // so the level-1 trace is no longer a unit multiple of ℓ(c_0)
        let c = ctx(3, 10);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let ring = TowerRing::build(&f, 2).unwrap();
        // "level 1" in the primitive convention sits inside k_2
        let lc1 = ell_of_c(&ring, 1, PiBase::Primitive).unwrap();
        let tr = crate::tower::field_trace(&lc1, 1).unwrap();
        let lc0 = ell_of_c(&ring, 0, PiBase::Primitive).unwrap();
        // a unit multiple would force Tr - u·ℓ(c_0) ≈ 0 with scalar u; the
        // ℓ(c_0) value has a genuine e_0-component, so no scalar works: check
        // that the two are not proportional by comparing the ratio of the
        // uniformizer coordinate with the ratio of the constant coordinate
        let r_const = tr.coords()[0].div(&lc0.coords()[0]).unwrap();
        let prod = lc0.scalar_mul(&r_const);
        let diff = tr.sub(&prod);
        assert!(diff.pi_valuation().unwrap().is_some(), "difference vanished");
    }

    #[test]
    fn d_point_delta_invariant_and_relation() {
        let c = ctx(3, 9);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let h = honda_group(&f, 60).unwrap();
        let ring = TowerRing::build(&f, 1).unwrap();
        // d_0 = Δ-trace of c_1 inside k_1
        let d0 = d_point(&h, &ring, 0, PiBase::Zero, 4).unwrap();
        // Δ-invariance puts it in Q_p: non-constant coordinate vanishes
        for c in &d0.value().coords()[1..] {
            assert!(c.is_zero_to_precision(), "{c}");
        }
        // in ℓ-coordinates: ℓ(d_0) = -2p/(p+1)
        let l = ell_at(&f, d0.value()).unwrap();
        let want = PadicScalar::from_ratio(ctx(3, 9), -6, 4).unwrap();
        let diff = l.coords()[0].sub(&want);
        assert!(diff.valuation_lower_bound().at_least(4), "{}", l.coords()[0]);
    }

    #[test]
    fn pm_membership_examples() {
        let c = ctx(3, 9);
        let f = FrobeniusLift::good(c, 3).unwrap();
        let h = honda_group(&f, 80).unwrap();
        let ring2 = TowerRing::build(&f, 2).unwrap();
        // base-field points are in both
        let eps = epsilon_point(&h).unwrap();
        let base = FormalPoint::new(ring2.from_scalar(eps)).unwrap();
        assert!(pm_membership(&h, &base, 1, true, 3).unwrap());
        assert!(pm_membership(&h, &base, 1, false, 3).unwrap());
    }

    #[test]
    fn fractional_valuation_of_epsilon_in_ring() {
        let h = group(3, 9, 10);
        let eps = epsilon_point(&h).unwrap();
        let f = FrobeniusLift::good(ctx(3, 9), 3).unwrap();
        let ring = TowerRing::build(&f, 1).unwrap();
        let v = ring.from_scalar(eps).fractional_valuation().unwrap();
        assert_eq!(v, Some(Ratio::new(1, 1)));
    }
}
