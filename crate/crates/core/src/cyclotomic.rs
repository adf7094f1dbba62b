//! The plus/minus cyclotomic polynomial calculus and evaluation at `ζ_n - 1`.
//!
//! All family members are exact integer polynomials: `Φ_n`, `ξ_n = Φ_n(1+X)`,
//! `ω_n = (1+X)^(p^n) - 1`, the parity products `ω̃_n^±` and
//! `ω_n^± = X·ω̃_n^±`. Evaluation of an Iwasawa series at `ζ_n - 1` happens
//! in the totally ramified quotient ring `Z_p[X]/ξ_n`, which is the level-`n`
//! tower ring of the multiplicative lift, so the Galois action and fractional
//! valuations come from [`crate::tower`].

use crate::error::{Error, Result};
use crate::intpoly::{int_valuation, resultant, IntPoly};
use crate::lubin_tate::FrobeniusLift;
use crate::padic::PadicContext;
use crate::series::IwasawaSeries;
use crate::tower::{TowerElement, TowerRing};
use num_bigint::BigInt;
use num_rational::Ratio;

/// Members of the cyclotomic family at level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycloPoly {
    Phi,
    Xi,
    Omega,
    OmegaTildePlus,
    OmegaTildeMinus,
    OmegaPlus,
    OmegaMinus,
}

fn pow_usize(p: u64, k: usize) -> usize {
    (0..k).fold(1usize, |m, _| m * p as usize)
}

/// Exact integer polynomial for one family member.
/// Level 0: `Φ_0` is not defined, `ω_0 = X`, `ω̃_0^± = 1` (empty products).
pub fn cyclo_family(p: u64, n: usize, which: CycloPoly) -> IntPoly {
    match which {
        CycloPoly::Phi => {
            assert!(n >= 1, "Φ_n needs n >= 1");
            let step = pow_usize(p, n - 1);
            let mut v = vec![BigInt::from(0); (p as usize - 1) * step + 1];
            for i in 0..p as usize {
                v[i * step] = BigInt::from(1);
            }
            IntPoly::new(v)
        }
        CycloPoly::Xi => {
            assert!(n >= 1, "ξ_n needs n >= 1");
            let a = IntPoly::one_plus_x_pow_minus_one(pow_usize(p, n) as u64);
            let b = IntPoly::one_plus_x_pow_minus_one(pow_usize(p, n - 1) as u64);
            a.div_exact_monic(&b).expect("layer polynomial division is exact")
        }
        CycloPoly::Omega => IntPoly::one_plus_x_pow_minus_one(pow_usize(p, n) as u64),
        CycloPoly::OmegaTildePlus => {
            let mut acc = IntPoly::one();
            let mut m = 2;
            while m <= n {
                acc = acc.mul(&cyclo_family(p, m, CycloPoly::Xi));
                m += 2;
            }
            acc
        }
        CycloPoly::OmegaTildeMinus => {
            let mut acc = IntPoly::one();
            let mut m = 1;
            while m <= n {
                acc = acc.mul(&cyclo_family(p, m, CycloPoly::Xi));
                m += 2;
            }
            acc
        }
        CycloPoly::OmegaPlus => IntPoly::x().mul(&cyclo_family(p, n, CycloPoly::OmegaTildePlus)),
        CycloPoly::OmegaMinus => IntPoly::x().mul(&cyclo_family(p, n, CycloPoly::OmegaTildeMinus)),
    }
}

/// Family member as a polynomial-exact series.
pub fn cyclo_series(ctx: PadicContext, n: usize, which: CycloPoly, d: usize) -> IwasawaSeries {
    IwasawaSeries::from_intpoly(ctx, &cyclo_family(ctx.p(), n, which), d)
}

/// `q_n`: the alternating p-power sum governing trace cokernels,
/// `p^(n-1) - p^(n-2) + ... + p - 1` for even `n` and
/// `p^(n-1) - p^(n-2) + ... + p^2 - p` for odd `n` (empty sums are 0).
pub fn q_value(p: u64, n: usize) -> i64 {
    let lowest = if n % 2 == 0 { 0 } else { 1 };
    let mut q: i64 = 0;
    let mut sign = 1i64;
    let mut i = n as i64 - 1;
    while i >= lowest {
        q += sign * (p as i64).pow(i as u32);
        sign = -sign;
        i -= 1;
    }
    q
}

/// `Σ_{k=0}^n q_k`.
pub fn q_sum(p: u64, n: usize) -> i64 {
    (0..=n).map(|k| q_value(p, k)).sum()
}

/// Degrees of the parity products: `deg ω̃_n^+` and `deg ω̃_n^-`.
pub fn deg_omega_tilde(p: u64, n: usize, plus: bool) -> usize {
    let start = if plus { 2 } else { 1 };
    let mut d = 0usize;
    let mut m = start;
    while m <= n {
        d += pow_usize(p, m) - pow_usize(p, m - 1);
        m += 2;
    }
    d
}

/// The level-`n` cyclotomic quotient `Z_p[X]/ξ_n ≅ Z_p[μ_(p^n)]`, carrying
/// the exact Galois action of the multiplicative lift.
pub fn cyclotomic_ring(ctx: PadicContext, n: usize) -> Result<TowerRing> {
    assert!(n >= 1);
    let f = FrobeniusLift::good(ctx, ctx.p() as i64)?;
    let ring = TowerRing::build(&f, n)?;
    debug_assert_eq!(ring.modulus(), &cyclo_family(ctx.p(), n, CycloPoly::Xi));
    Ok(ring)
}

/// Reduce a polynomial-exact series modulo `ξ_n`, i.e. evaluate at
/// `π̂ = ζ_n - 1`.
pub fn eval_at_zeta(g: &IwasawaSeries, ring: &TowerRing) -> Result<TowerElement> {
    if !g.is_poly_exact() {
        return Err(Error::PrecisionExhausted(
            "evaluation at ζ_n - 1 needs a polynomial-exact series (truncated tails are unbounded)"
                .into(),
        ));
    }
    let mut acc = ring.zero();
    let t = ring.uniformizer();
    for i in (0..=g.degree_bound()).rev() {
        acc = acc.mul(&t);
        let mut c0 = acc.coords()[0];
        c0 = c0.add(&g.coeff(i));
        let mut coords = acc.coords().to_vec();
        coords[0] = c0;
        acc = ring.from_coords(coords);
    }
    Ok(acc)
}

/// Evaluate an exact integer polynomial at `ζ_n - 1`.
pub fn eval_intpoly_at_zeta(g: &IntPoly, ring: &TowerRing) -> TowerElement {
    ring.eval_intpoly(g, &ring.uniformizer())
}

/// `ord_p` of a nonzero element of `Z_p[μ_(p^n)]`: the π̂-valuation divided by
/// the ramification index `e = p^n - p^(n-1)` (so `ord_p(p) = 1`).
pub fn ordp_fractional(x: &TowerElement) -> Result<Ratio<i64>> {
    match x.fractional_valuation()? {
        Some(v) => Ok(v),
        None => Err(Error::NotFinite("ord_p of exact zero".into())),
    }
}

/// `ord_p #(Z_p[X]/(f, g))` through the exact integer resultant.
/// Errors with `NotFinite` when the resultant vanishes (shared factor).
pub fn quotient_order_resultant(p: u64, f: &IntPoly, g: &IntPoly) -> Result<i64> {
    let r = resultant(f, g);
    match int_valuation(&r, p) {
        None => Err(Error::NotFinite("resultant is zero: the quotient is infinite".into())),
        Some(v) => Ok(v as i64),
    }
}

/// Rows `(n, q_n, Σ q_k, deg ω̃_n^+, deg ω̃_n^-)` for table emitters.
pub fn q_table(p: u64, n_max: usize) -> Vec<(usize, i64, i64, usize, usize)> {
    (0..=n_max)
        .map(|n| {
            (
                n,
                q_value(p, n),
                q_sum(p, n),
                deg_omega_tilde(p, n, true),
                deg_omega_tilde(p, n, false),
            )
        })
        .collect()
}
