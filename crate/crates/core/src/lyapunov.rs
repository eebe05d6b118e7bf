//! Lyapunov functionals `V1..V4` and the sandwich bounds relating `V2` to
//! the squared distance.
//!
//! `V2(Jx, ξ) = ||Jx||²_* - 2<Jx, ξ> + ||ξ||²` is evaluated as
//! `(||x|| - ||ξ||)² + 2 (||x|| ||ξ|| - <Jx, ξ>)`. The second bracket is a
//! Hölder gap and lies in `[0, 2||x|| ||ξ||]`; clamping it there keeps the
//! bracketing bounds exact in floating point.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lp_geometry::{
    dot, duality_raw, gauge_raw, mean_square_scale, modulus_convexity_lower,
    modulus_smoothness_upper, pnorm, DualVec, GeometryConstants, LpSpace, PrimalVec,
};

/// A value of `V2` together with its bracketing bounds
/// `(||x|| - ||ξ||)² ≤ V2 ≤ (||x|| + ||ξ||)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovValue {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

fn check2(x: &PrimalVec, xi: &PrimalVec, s: &LpSpace) -> Result<()> {
    s.check_len(x.dim())?;
    s.check_len(xi.dim())
}

/// `V1(x, ξ) = ||x - ξ||²`.
pub fn v1(x: &PrimalVec, xi: &PrimalVec, s: &LpSpace) -> Result<f64> {
    check2(x, xi, s)?;
    let d = pnorm(x.sub(xi).as_slice(), s.p());
    Ok(d * d)
}

/// Evaluates `||a||² - 2 pairing + ||b||²` given the two norms and the
/// pairing, using the clamped Hölder-gap form.
pub(crate) fn bregman_form(na: f64, nb: f64, pairing: f64) -> f64 {
    let gap = (na * nb - pairing).clamp(0.0, 2.0 * na * nb);
    (na - nb) * (na - nb) + 2.0 * gap
}

pub(crate) fn v2_raw(x: &[f64], jx: &[f64], nx: f64, xi: &[f64], p: f64) -> f64 {
    if x == xi {
        return 0.0;
    }
    bregman_form(nx, pnorm(xi, p), dot(jx, xi))
}

/// `V2(Jx, ξ)` with `||Jx||_*` taken as `||x||` exactly.
pub fn v2(x: &PrimalVec, xi: &PrimalVec, s: &LpSpace) -> Result<LyapunovValue> {
    check2(x, xi, s)?;
    let p = s.p();
    let nx = pnorm(x.as_slice(), p);
    let nxi = pnorm(xi.as_slice(), p);
    let jx = duality_raw(x.as_slice(), p);
    let value = if x == xi {
        0.0
    } else {
        bregman_form(nx, nxi, dot(&jx, xi.as_slice()))
    };
    Ok(LyapunovValue {
        value,
        lower_bound: (nx - nxi) * (nx - nxi),
        upper_bound: (nx + nxi) * (nx + nxi),
    })
}

/// `grad_ξ V2(Jx, ξ) = 2(Jξ - Jx)`.
pub fn v2_grad_xi(x: &PrimalVec, xi: &PrimalVec, s: &LpSpace) -> Result<DualVec> {
    check2(x, xi, s)?;
    let p = s.p();
    let jx = duality_raw(x.as_slice(), p);
    let jxi = duality_raw(xi.as_slice(), p);
    Ok(DualVec::new(
        jxi.iter().zip(&jx).map(|(a, b)| 2.0 * (a - b)).collect(),
    ))
}

/// `V3(J^μ x, ξ) = q^{-1}||J^μ x||^q_* - <J^μ x, ξ> + p^{-1}||ξ||^p` with
/// gauge `t^{p-1}`.
pub fn v3(x: &PrimalVec, xi: &PrimalVec, s: &LpSpace) -> Result<f64> {
    check2(x, xi, s)?;
    if x == xi {
        return Ok(0.0);
    }
    let (p, q) = (s.p(), s.q());
    let nx = pnorm(x.as_slice(), p);
    let nxi = pnorm(xi.as_slice(), p);
    let g = gauge_raw(x.as_slice(), p);
    // ||J^μ x||_*^q = ||x||^p and ||J^μ x||_* = ||x||^{p-1}
    let holder = nx.powf(p - 1.0) * nxi;
    let young = (nx.powf(p) / q + nxi.powf(p) / p - holder).max(0.0);
    let gap = (holder - dot(&g, xi.as_slice())).max(0.0);
    Ok(young + gap)
}

/// `V4(φ, ξ) = ||φ||²_* - 2<φ, ξ> + ||ξ||²`.
pub fn v4(phi: &DualVec, xi: &PrimalVec, s: &LpSpace) -> Result<f64> {
    s.check_len(phi.dim())?;
    s.check_len(xi.dim())?;
    let nphi = pnorm(phi.as_slice(), s.q());
    let nxi = pnorm(xi.as_slice(), s.p());
    Ok(bregman_form(nphi, nxi, phi.pair(xi)))
}

/// `grad_φ V4(φ, ξ) = 2(J*φ - ξ)`; at `φ = Jx` this is `2(x - ξ)`.
pub fn v4_grad_phi(phi: &DualVec, xi: &PrimalVec, s: &LpSpace) -> Result<PrimalVec> {
    s.check_len(phi.dim())?;
    s.check_len(xi.dim())?;
    let xs = duality_raw(phi.as_slice(), s.q());
    Ok(PrimalVec::new(
        xs.iter()
            .zip(xi.as_slice())
            .map(|(a, b)| 2.0 * (a - b))
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichMargins {
    pub v2: f64,
    /// `V2 - 2L^{-1} δ(||x-ξ|| / 2C)`; certified nonnegative.
    pub lower_margin: f64,
    /// `L^{-1} ρ(8LC ||x-ξ||) - V2`; informational.
    pub upper_margin: f64,
}

/// Evaluates both sides of
/// `2L^{-1} δ(||x-ξ||/2C) ≤ V2(Jx, ξ) ≤ L^{-1} ρ(8LC||x-ξ||)`,
/// `C = 2 max{1, sqrt((||x||² + ||ξ||²)/2)}`.
pub fn lemma_s2_sandwich(
    x: &PrimalVec,
    xi: &PrimalVec,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<SandwichMargins> {
    let val = v2(x, xi, s)?.value;
    let p = s.p();
    let cc = mean_square_scale(pnorm(x.as_slice(), p), pnorm(xi.as_slice(), p));
    let dist = pnorm(x.sub(xi).as_slice(), p);
    let l = c.figiel_l;
    let lower = 2.0 / l * modulus_convexity_lower((dist / (2.0 * cc)).min(2.0), s)?;
    let upper = modulus_smoothness_upper(8.0 * l * cc * dist, s)? / l;
    Ok(SandwichMargins {
        v2: val,
        lower_margin: val - lower,
        upper_margin: upper - val,
    })
}
