//! The projection operators `P`, `Π` and `π`, and margin checks for the
//! inequalities they satisfy.
//!
//! Every check returns signed margins keyed by property label; a margin is
//! nonnegative exactly when the inequality holds at the supplied points.
//! Quantified statements ("for all ξ ∈ Ω") are evaluated on a finite test
//! set, see [`vp_test_points`].

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex_sets::{
    generalized_project_dual, metric_project, ProjectionResult, SetDescriptor,
};
use crate::error::{Error, Result};
use crate::lp_geometry::{
    convexity_lower_unchecked, convexity_ratio_inverse, dot, duality_raw,
    modulus_convexity_lower_inverse, modulus_smoothness_upper, pnorm, DualVec, GeometryConstants,
    LpSpace, PrimalVec,
};
use crate::lyapunov::bregman_form;

/// Membership tolerance, relative to `max(1, ||ξ||)`, for points handed to
/// the checks as projections.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Signed margins keyed by property label.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PropertyMargins(BTreeMap<String, f64>);

impl PropertyMargins {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: &str, margin: f64) {
        self.0.insert(label.to_string(), margin);
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.0.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Smallest margin and its label.
    pub fn worst(&self) -> Option<(&str, f64)> {
        self.iter().min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn extend(&mut self, other: PropertyMargins) {
        self.0.extend(other.0);
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn require_member(omega: &SetDescriptor, pt: &PrimalVec, s: &LpSpace) -> Result<()> {
    let v = omega.violation(pt, s)?;
    if v > MEMBERSHIP_TOL * pnorm(pt.as_slice(), s.p()).max(1.0) {
        return Err(Error::NotInSet { violation: v });
    }
    Ok(())
}

fn min_over<F: FnMut(&[f64]) -> f64>(points: &[PrimalVec], mut f: F) -> f64 {
    points
        .iter()
        .map(|xi| f(xi.as_slice()))
        .fold(f64::INFINITY, f64::min)
}

/// Test points for the variational inequalities at a feasible `anchor`:
/// the anchor, the exact maximizer of `<direction, ·>` when the set is
/// bounded, and the structural and random samples of
/// [`SetDescriptor::sample_points`].
pub fn vp_test_points(
    omega: &SetDescriptor,
    anchor: &PrimalVec,
    direction: Option<&DualVec>,
    s: &LpSpace,
    seed: u64,
    count: usize,
) -> Vec<PrimalVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![anchor.clone()];
    if let Some(g) = direction {
        if let Some(m) = omega.maximize_linear(g, s) {
            pts.push(m);
        }
    }
    pts.extend(omega.sample_points(anchor, s, &mut rng, count));
    pts
}

pub fn project_metric(
    x: &PrimalVec,
    omega: &SetDescriptor,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<ProjectionResult> {
    metric_project(omega, x, s, c)
}

/// `Π_Ω x = π_Ω(Jx)`: the minimizer of `V2(Jx, ·)` over `Ω`.
pub fn project_generalized_big_pi(
    x: &PrimalVec,
    omega: &SetDescriptor,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<ProjectionResult> {
    s.check_len(x.dim())?;
    let jx = DualVec::new(duality_raw(x.as_slice(), s.p()));
    generalized_project_dual(omega, &jx, s, c)
}

/// `π_Ω φ`, cross-checked against `Π_Ω(J*φ)`.
pub fn project_generalized_pi(
    phi: &DualVec,
    omega: &SetDescriptor,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<ProjectionResult> {
    let r = generalized_project_dual(omega, phi, s, c)?;
    let x = PrimalVec::new(duality_raw(phi.as_slice(), s.q()));
    let back = project_generalized_big_pi(&x, omega, s, c)?;
    let gap = r.point.max_abs_diff(&back.point);
    if gap > 1e-8 * pnorm(r.point.as_slice(), s.p()).max(1.0) {
        return Err(Error::RoundTrip(gap));
    }
    Ok(r)
}

/// Margins for the metric projection `x̄` of `x`:
///
/// * `5.c`: `min_ξ <J(x - x̄), x̄ - ξ>`
/// * `f52`: `min_ξ <J(x - x̄), x - ξ> - ||x - x̄||²`
/// * `5.e`: `min_ξ <J(x - x̄), x - ξ>`
/// * `5.i` (with `pair = (y, ȳ)`): `<J(x - x̄) - J(y - ȳ), x̄ - ȳ>`
pub fn check_metric_vp(
    x: &PrimalVec,
    xbar: &PrimalVec,
    omega: &SetDescriptor,
    s: &LpSpace,
    points: &[PrimalVec],
    pair: Option<(&PrimalVec, &PrimalVec)>,
) -> Result<PropertyMargins> {
    s.check_len(x.dim())?;
    require_member(omega, xbar, s)?;
    let p = s.p();
    let r = sub(x.as_slice(), xbar.as_slice());
    let g = duality_raw(&r, p);
    let nr = pnorm(&r, p);
    let mut m = PropertyMargins::new();
    m.insert(
        "5.c",
        min_over(points, |xi| dot(&g, &sub(xbar.as_slice(), xi))),
    );
    let e = min_over(points, |xi| dot(&g, &sub(x.as_slice(), xi)));
    m.insert("5.e", e);
    m.insert("f52", e - nr * nr);
    if let Some((y, ybar)) = pair {
        s.check_len(y.dim())?;
        require_member(omega, ybar, s)?;
        let gy = duality_raw(&sub(y.as_slice(), ybar.as_slice()), p);
        m.insert(
            "5.i",
            dot(&sub(&g, &gy), &sub(xbar.as_slice(), ybar.as_slice())),
        );
    }
    Ok(m)
}

/// Margins for the generalized projection `x̂ = Π_Ω x`:
///
/// * `7.c`: `min_ξ <Jx - Jx̂, x̂ - ξ>`
/// * `7.d`: `min_ξ <Jx - Jξ, x̂ - ξ>`
/// * `7.e`: `min_ξ <Jx - Jx̂, x - ξ>`
/// * `7.h`: `min_ξ V2(Jx, ξ) - V2(Jx, x̂) - V2(Jx̂, ξ)`
///
/// and with `pair = (y, ŷ)`:
///
/// * `7.b`: `<Jx - Jy, x̂ - ŷ>`
/// * `7.g`: `<Jx - Jy, x̂ - ŷ> - (2L)^{-1} δ(||x̂ - ŷ||/C)`, `C = 2 max{1, ||x̂||, ||ŷ||}`
/// * `7.i`: `<(Jx - Jx̂) - (Jy - Jŷ), x̂ - ŷ>`
pub fn check_generalized_vp(
    x: &PrimalVec,
    xhat: &PrimalVec,
    omega: &SetDescriptor,
    s: &LpSpace,
    c: &GeometryConstants,
    points: &[PrimalVec],
    pair: Option<(&PrimalVec, &PrimalVec)>,
) -> Result<PropertyMargins> {
    s.check_len(x.dim())?;
    require_member(omega, xhat, s)?;
    let p = s.p();
    let (xs, hs) = (x.as_slice(), xhat.as_slice());
    let jx = duality_raw(xs, p);
    let jh = duality_raw(hs, p);
    let (nx, nh) = (pnorm(xs, p), pnorm(hs, p));
    let g = sub(&jx, &jh);
    let v2_x_h = if xs == hs {
        0.0
    } else {
        bregman_form(nx, nh, dot(&jx, hs))
    };
    let mut m = PropertyMargins::new();
    m.insert("7.c", min_over(points, |xi| dot(&g, &sub(hs, xi))));
    m.insert(
        "7.d",
        min_over(points, |xi| {
            dot(&sub(&jx, &duality_raw(xi, p)), &sub(hs, xi))
        }),
    );
    m.insert("7.e", min_over(points, |xi| dot(&g, &sub(xs, xi))));
    m.insert(
        "7.h",
        min_over(points, |xi| {
            let nxi = pnorm(xi, p);
            let v_x = if xs == xi {
                0.0
            } else {
                bregman_form(nx, nxi, dot(&jx, xi))
            };
            let v_h = if hs == xi {
                0.0
            } else {
                bregman_form(nh, nxi, dot(&jh, xi))
            };
            v_x - v2_x_h - v_h
        }),
    );
    if let Some((y, yhat)) = pair {
        s.check_len(y.dim())?;
        require_member(omega, yhat, s)?;
        let jy = duality_raw(y.as_slice(), p);
        let jyh = duality_raw(yhat.as_slice(), p);
        let dh = sub(hs, yhat.as_slice());
        let b = dot(&sub(&jx, &jy), &dh);
        m.insert("7.b", b);
        let cc = 2.0 * 1f64.max(nh).max(pnorm(yhat.as_slice(), p));
        let eps = (pnorm(&dh, p) / cc).min(2.0);
        m.insert(
            "7.g",
            b - convexity_lower_unchecked(eps, p) / (2.0 * c.figiel_l),
        );
        m.insert("7.i", dot(&sub(&g, &sub(&jy, &jyh)), &dh));
    }
    Ok(m)
}

/// Margins for the dual generalized projection `φ̃ = π_Ω φ`:
///
/// * `8.c`: `min_ξ <φ - Jφ̃, φ̃ - ξ>`
/// * `8.d`: `min_ξ <φ - Jξ, φ̃ - ξ>`
/// * `8.e`: `min_ξ <φ - Jφ̃, J*φ - ξ>`
/// * `8.h`: `min_ξ V4(φ, ξ) - V4(φ, φ̃) - V4(Jφ̃, ξ)`
///
/// and with `pair = (φ₂, φ̃₂)`:
///
/// * `8.b`: `<φ - φ₂, φ̃ - φ̃₂>`
/// * `8.g`: `<φ - φ₂, φ̃ - φ̃₂> - (2L)^{-1} δ(||φ̃ - φ̃₂||/C)`, `C = 2 max{1, ||φ̃||, ||φ̃₂||}`
/// * `8.i`: `<(φ - Jφ̃) - (φ₂ - Jφ̃₂), φ̃ - φ̃₂>`
pub fn check_dual_vp(
    phi: &DualVec,
    phit: &PrimalVec,
    omega: &SetDescriptor,
    s: &LpSpace,
    c: &GeometryConstants,
    points: &[PrimalVec],
    pair: Option<(&DualVec, &PrimalVec)>,
) -> Result<PropertyMargins> {
    s.check_len(phi.dim())?;
    require_member(omega, phit, s)?;
    let (p, q) = (s.p(), s.q());
    let (ph, ts) = (phi.as_slice(), phit.as_slice());
    let jt = duality_raw(ts, p);
    let g = sub(ph, &jt);
    let x = duality_raw(ph, q);
    let (nphi, nt) = (pnorm(ph, q), pnorm(ts, p));
    let v4_phi_t = bregman_form(nphi, nt, dot(ph, ts));
    let mut m = PropertyMargins::new();
    m.insert("8.c", min_over(points, |xi| dot(&g, &sub(ts, xi))));
    m.insert(
        "8.d",
        min_over(points, |xi| {
            dot(&sub(ph, &duality_raw(xi, p)), &sub(ts, xi))
        }),
    );
    m.insert("8.e", min_over(points, |xi| dot(&g, &sub(&x, xi))));
    m.insert(
        "8.h",
        min_over(points, |xi| {
            let nxi = pnorm(xi, p);
            let v_phi = bregman_form(nphi, nxi, dot(ph, xi));
            let v_t = if ts == xi {
                0.0
            } else {
                bregman_form(nt, nxi, dot(&jt, xi))
            };
            v_phi - v4_phi_t - v_t
        }),
    );
    if let Some((phi2, phit2)) = pair {
        s.check_len(phi2.dim())?;
        require_member(omega, phit2, s)?;
        let (ph2, ts2) = (phi2.as_slice(), phit2.as_slice());
        let dt = sub(ts, ts2);
        let b = dot(&sub(ph, ph2), &dt);
        m.insert("8.b", b);
        let cc = 2.0 * 1f64.max(nt).max(pnorm(ts2, p));
        let eps = (pnorm(&dt, p) / cc).min(2.0);
        m.insert(
            "8.g",
            b - convexity_lower_unchecked(eps, p) / (2.0 * c.figiel_l),
        );
        let g2 = sub(ph2, &duality_raw(ts2, p));
        m.insert("8.i", dot(&sub(&g, &g2), &dt));
    }
    Ok(m)
}

/// Strong-uniqueness margins for a metric projection `x̄` of `x` at `ξ ∈ Ω`:
///
/// * `f177` (p ≥ 2): `||x-ξ||^p - 2^{1-p}||x̄-ξ||^p - ||x-x̄||^p`
/// * `f161` (p ≤ 2): `||x-ξ||² - (p-1)||x̄-ξ||² - ||x-x̄||²`
/// * `s-thm` (given `r ≥ p ≥ 2`): `||x-ξ||^r - 2^{1-r}||x̄-ξ||^r - ||x-x̄||^r`
/// * `4.h` (p = 2): `||x-ξ||² - ||x̄-ξ||² - ||x-x̄||²`
pub fn check_strong_uniqueness(
    x: &PrimalVec,
    xbar: &PrimalVec,
    xi: &PrimalVec,
    s: &LpSpace,
    order: Option<f64>,
) -> Result<PropertyMargins> {
    for v in [x, xbar, xi] {
        s.check_len(v.dim())?;
    }
    let p = s.p();
    let a = pnorm(&sub(x.as_slice(), xi.as_slice()), p);
    let b = pnorm(&sub(xbar.as_slice(), xi.as_slice()), p);
    let d = pnorm(&sub(x.as_slice(), xbar.as_slice()), p);
    let power = |r: f64| a.powf(r) - 2f64.powf(1.0 - r) * b.powf(r) - d.powf(r);
    let mut m = PropertyMargins::new();
    if p >= 2.0 {
        m.insert("f177", power(p));
    }
    if p <= 2.0 {
        m.insert("f161", a * a - (p - 1.0) * b * b - d * d);
    }
    if p == 2.0 {
        m.insert("4.h", a * a - b * b - d * d);
    }
    if let Some(r) = order {
        if !(p >= 2.0 && r >= p) {
            return Err(Error::InapplicableExponent {
                p,
                requirement: "r >= p >= 2",
            });
        }
        m.insert("s-thm", power(r));
    }
    Ok(m)
}

/// Uniform-continuity bounds, each reported as `bound - distance`:
///
/// * `f55`: `C g⁻¹(2LC² g*⁻¹(2CL||x-y||)) - ||x̄-ȳ||`, `C = 2 max{1, ||x-ȳ||, ||y-x̄||}`
/// * `f59`: `C δ⁻¹(ρ(8CL||x-y||)) - ||x̄-ȳ||`, same `C`
/// * `7.f`: `C g⁻¹(2LC² g*⁻¹(2LC||x-y||)) - ||x̂-ŷ||`, `C = 2 max{1, ||x||, ||y||, ||x̂||, ||ŷ||}`
/// * `8.f`: `C g⁻¹(2LC||Jx-Jy||_*) - ||x̂-ŷ||`, `C = 2 max{1, ||x̂||, ||ŷ||}`
///
/// The moduli enter through one-sided estimates whose inverses dominate
/// the true ones, so each bound is valid whenever the exact one is.
pub fn check_uniform_continuity(
    x: &PrimalVec,
    y: &PrimalVec,
    omega: &SetDescriptor,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<PropertyMargins> {
    let p = s.p();
    let dual = s.dual();
    let l = c.figiel_l;
    let norm = |v: &[f64]| pnorm(v, p);
    let xbar = metric_project(omega, x, s, c)?.point;
    let ybar = metric_project(omega, y, s, c)?.point;
    let xhat = project_generalized_big_pi(x, omega, s, c)?.point;
    let yhat = project_generalized_big_pi(y, omega, s, c)?.point;
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let dxy = norm(&sub(xs, ys));

    let mut m = PropertyMargins::new();
    let dist_bar = norm(&sub(xbar.as_slice(), ybar.as_slice()));
    let cc = 2.0
        * 1f64
            .max(norm(&sub(xs, ybar.as_slice())))
            .max(norm(&sub(ys, xbar.as_slice())));
    let inner = convexity_ratio_inverse(2.0 * cc * l * dxy, &dual);
    let f55 = cc * convexity_ratio_inverse(2.0 * l * cc * cc * inner, s);
    m.insert("f55", f55 - dist_bar);
    let rho = modulus_smoothness_upper(8.0 * cc * l * dxy, s)?;
    m.insert(
        "f59",
        cc * modulus_convexity_lower_inverse(rho, s) - dist_bar,
    );

    let dist_hat = norm(&sub(xhat.as_slice(), yhat.as_slice()));
    let (nxh, nyh) = (norm(xhat.as_slice()), norm(yhat.as_slice()));
    let cc = 2.0 * 1f64.max(norm(xs)).max(norm(ys)).max(nxh).max(nyh);
    let inner = convexity_ratio_inverse(2.0 * l * cc * dxy, &dual);
    m.insert(
        "7.f",
        cc * convexity_ratio_inverse(2.0 * l * cc * cc * inner, s) - dist_hat,
    );
    let dphi = pnorm(&sub(&duality_raw(xs, p), &duality_raw(ys, p)), s.q());
    let cc = 2.0 * 1f64.max(nxh).max(nyh);
    m.insert(
        "8.f",
        cc * convexity_ratio_inverse(2.0 * l * cc * dphi, s) - dist_hat,
    );
    Ok(m)
}

/// Points entering a Hilbert-property margin; `y` pairs a second point
/// with its projection.
#[derive(Debug, Clone, Copy)]
pub struct HilbertInstance<'a> {
    pub x: &'a PrimalVec,
    pub xbar: &'a PrimalVec,
    pub y: Option<(&'a PrimalVec, &'a PrimalVec)>,
    pub xi: Option<&'a PrimalVec>,
}

pub const HILBERT_LABELS: [&str; 8] = ["4.b", "4.c", "4.d", "4.e", "4.f", "4.g", "4.h", "4.i"];

/// Hilbert-space properties of the metric projection, written with the
/// duality map in place of the inner product. At `p = 2` they hold; for
/// other `p` the ones marked absent in Banach space can fail:
///
/// * `4.b`: `<J(x-y), x̄-ȳ>`
/// * `4.c`: `<J(x-x̄), x̄-ξ>`
/// * `4.d`: `<J(x-ξ), x̄-ξ>`
/// * `4.e`: `<J(x-x̄), x-ξ>`
/// * `4.f`: `||x-y|| - ||x̄-ȳ||`
/// * `4.g`: `<J(x-y), x̄-ȳ> - ||x̄-ȳ||²`
/// * `4.h`: `||x-ξ||² - ||x-x̄||² - ||x̄-ξ||²`
/// * `4.i`: `<J((x-x̄) - (y-ȳ)), x̄-ȳ>`
pub fn hilbert_property_margin(label: &str, inst: HilbertInstance<'_>, s: &LpSpace) -> Result<f64> {
    let p = s.p();
    let x = inst.x.as_slice();
    let xb = inst.xbar.as_slice();
    let need_pair = || {
        inst.y
            .map(|(y, yb)| (y.as_slice(), yb.as_slice()))
            .ok_or_else(|| Error::Precondition(format!("{label} needs a second point")))
    };
    let need_xi = || {
        inst.xi
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Precondition(format!("{label} needs a test point")))
    };
    let j = |v: &[f64]| duality_raw(v, p);
    Ok(match label {
        "4.b" => {
            let (y, yb) = need_pair()?;
            dot(&j(&sub(x, y)), &sub(xb, yb))
        }
        "4.c" => {
            let xi = need_xi()?;
            dot(&j(&sub(x, xb)), &sub(xb, xi))
        }
        "4.d" => {
            let xi = need_xi()?;
            dot(&j(&sub(x, xi)), &sub(xb, xi))
        }
        "4.e" => {
            let xi = need_xi()?;
            dot(&j(&sub(x, xb)), &sub(x, xi))
        }
        "4.f" => {
            let (y, yb) = need_pair()?;
            pnorm(&sub(x, y), p) - pnorm(&sub(xb, yb), p)
        }
        "4.g" => {
            let (y, yb) = need_pair()?;
            let d = pnorm(&sub(xb, yb), p);
            dot(&j(&sub(x, y)), &sub(xb, yb)) - d * d
        }
        "4.h" => {
            let xi = need_xi()?;
            let a = pnorm(&sub(x, xi), p);
            let b = pnorm(&sub(x, xb), p);
            let d = pnorm(&sub(xb, xi), p);
            a * a - b * b - d * d
        }
        "4.i" => {
            let (y, yb) = need_pair()?;
            let r = sub(&sub(x, xb), &sub(y, yb));
            dot(&j(&r), &sub(xb, yb))
        }
        _ => return Err(Error::UnknownCheck(label.to_string())),
    })
}

/// All Hilbert margins at `p = 2`, minimized over `points` where a test
/// point enters.
pub fn check_hilbert_vp(
    x: &PrimalVec,
    xbar: &PrimalVec,
    omega: &SetDescriptor,
    s: &LpSpace,
    points: &[PrimalVec],
    pair: Option<(&PrimalVec, &PrimalVec)>,
) -> Result<PropertyMargins> {
    if !s.is_hilbert() {
        return Err(Error::InapplicableExponent {
            p: s.p(),
            requirement: "p = 2",
        });
    }
    s.check_len(x.dim())?;
    require_member(omega, xbar, s)?;
    let mut m = PropertyMargins::new();
    for label in HILBERT_LABELS {
        let pairwise = matches!(label, "4.b" | "4.f" | "4.g" | "4.i");
        if pairwise {
            if pair.is_some() {
                let inst = HilbertInstance {
                    x,
                    xbar,
                    y: pair,
                    xi: None,
                };
                m.insert(label, hilbert_property_margin(label, inst, s)?);
            }
        } else {
            let mut worst = f64::INFINITY;
            for xi in points {
                let inst = HilbertInstance {
                    x,
                    xbar,
                    y: None,
                    xi: Some(xi),
                };
                worst = worst.min(hilbert_property_margin(label, inst, s)?);
            }
            m.insert(label, worst);
        }
    }
    Ok(m)
}

/// A pinned instance on which a Hilbert property of the metric projection
/// fails in `l^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub label: String,
    pub p: f64,
    pub set: SetDescriptor,
    pub x: PrimalVec,
    pub y: Option<PrimalVec>,
    pub xi: Option<PrimalVec>,
    pub margin: f64,
}

impl Counterexample {
    /// Recomputes the margin from scratch, projecting again.
    pub fn replay(&self, c: &GeometryConstants) -> Result<f64> {
        let s = LpSpace::new(self.p, self.x.dim())?;
        let xbar = metric_project(&self.set, &self.x, &s, c)?.point;
        let ybar = match &self.y {
            Some(y) => Some(metric_project(&self.set, y, &s, c)?.point),
            None => None,
        };
        let inst = HilbertInstance {
            x: &self.x,
            xbar: &xbar,
            y: self.y.as_ref().zip(ybar.as_ref()),
            xi: self.xi.as_ref(),
        };
        hilbert_property_margin(&self.label, inst, &s)
    }
}

/// Random search over halfspaces and points in `[-2, 2]^dim` for the most
/// negative margin of a Hilbert property of `P_Ω`. Returns `None` when no
/// margin below `-1e-9` turns up.
pub fn find_counterexample(
    label: &str,
    s: &LpSpace,
    seed: u64,
    attempts: usize,
    c: &GeometryConstants,
) -> Result<Option<Counterexample>> {
    use rand::Rng;
    if !HILBERT_LABELS.contains(&label) {
        return Err(Error::UnknownCheck(label.to_string()));
    }
    let pairwise = matches!(label, "4.b" | "4.f" | "4.g" | "4.i");
    let dim = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw =
        |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect() };
    let mut best: Option<Counterexample> = None;
    for _ in 0..attempts {
        let normal = draw(&mut rng);
        if normal.iter().all(|v| *v == 0.0) {
            continue;
        }
        let offset = rng.gen_range(-1.0..1.0);
        let set = SetDescriptor::halfspace(normal, offset)?;
        let x = PrimalVec::new(draw(&mut rng));
        let xbar = metric_project(&set, &x, s, c)?.point;
        let (y, xi) = if pairwise {
            (Some(PrimalVec::new(draw(&mut rng))), None)
        } else {
            let pts = set.sample_points(&xbar, s, &mut rng, 1);
            (None, pts.into_iter().last())
        };
        let ybar = match &y {
            Some(y) => Some(metric_project(&set, y, s, c)?.point),
            None => None,
        };
        let inst = HilbertInstance {
            x: &x,
            xbar: &xbar,
            y: y.as_ref().zip(ybar.as_ref()),
            xi: xi.as_ref(),
        };
        let margin = hilbert_property_margin(label, inst, s)?;
        if margin < best.as_ref().map_or(-1e-9, |b| b.margin) {
            best = Some(Counterexample {
                label: label.to_string(),
                p: s.p(),
                set,
                x,
                y,
                xi,
                margin,
            });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sp(p: f64) -> LpSpace {
        LpSpace::new(p, 2).unwrap()
    }

    fn pv(v: &[f64]) -> PrimalVec {
        PrimalVec::new(v.to_vec())
    }

    fn dv(v: &[f64]) -> DualVec {
        DualVec::new(v.to_vec())
    }

    fn c() -> GeometryConstants {
        GeometryConstants::default()
    }

    fn first_le_zero() -> SetDescriptor {
        SetDescriptor::halfspace(vec![1.0, 0.0], 0.0).unwrap()
    }

    #[test]
    fn metric_wrapper_examples() {
        let x = pv(&[-1.0, 3.0]);
        assert_eq!(
            project_metric(&x, &first_le_zero(), &sp(3.0), &c())
                .unwrap()
                .point,
            x
        );
        let r = project_metric(&pv(&[1.0, 2.0]), &first_le_zero(), &sp(2.0), &c()).unwrap();
        assert_eq!(r.point.as_slice(), &[0.0, 2.0]);
        let b = SetDescriptor::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let r = project_metric(&pv(&[0.5, 3.0]), &b, &sp(4.0), &c()).unwrap();
        assert_eq!(r.point.as_slice(), &[0.5, 1.0]);
    }

    #[test]
    fn generalized_wrapper_examples() {
        let h = 2f64.powf(-0.5);
        let r =
            project_generalized_big_pi(&pv(&[1.0, 1.0]), &first_le_zero(), &sp(4.0), &c()).unwrap();
        assert!(r.point[0].abs() < 1e-12);
        assert_relative_eq!(r.point[1], h, epsilon = 1e-12);

        let r = project_generalized_pi(&dv(&[h, h]), &first_le_zero(), &sp(4.0), &c()).unwrap();
        assert!(r.point[0].abs() < 1e-12);
        assert_relative_eq!(r.point[1], h, epsilon = 1e-12);

        let set = SetDescriptor::halfspace(vec![1.0, 0.0], -1.0).unwrap();
        let r = project_generalized_pi(&dv(&[0.0, 0.0]), &set, &sp(2.0), &c()).unwrap();
        assert_relative_eq!(r.point[0], -1.0, epsilon = 1e-14);
        assert_eq!(r.point[1], 0.0);

        let x = pv(&[-0.5, 0.25]);
        assert_eq!(
            project_generalized_big_pi(&x, &first_le_zero(), &sp(3.0), &c())
                .unwrap()
                .point,
            x
        );
    }

    #[test]
    fn metric_vp_examples() {
        let s = sp(2.0);
        let omega = first_le_zero();
        let x = pv(&[-0.5, 1.0]);
        let pts = vp_test_points(&omega, &x, None, &s, 1, 20);
        let m = check_metric_vp(&x, &x, &omega, &s, &pts, None).unwrap();
        assert_eq!(m.get("5.c"), Some(0.0));
        assert_eq!(m.get("f52"), Some(0.0));

        let x = pv(&[1.0, 2.0]);
        let xbar = pv(&[0.0, 2.0]);
        let pts = vp_test_points(&omega, &xbar, None, &s, 1, 50);
        let m = check_metric_vp(&x, &xbar, &omega, &s, &pts, None).unwrap();
        assert!(m.get("5.c").unwrap() >= 0.0);
        assert!(m.get("f52").unwrap() >= -1e-15);

        let wrong = pv(&[-1.0, 2.0]);
        let m = check_metric_vp(&x, &wrong, &omega, &s, &[pv(&[0.0, 2.0])], None).unwrap();
        assert!(m.get("5.c").unwrap() < 0.0);

        assert!(matches!(
            check_metric_vp(&x, &x, &omega, &s, &pts, None),
            Err(Error::NotInSet { .. })
        ));
    }

    #[test]
    fn generalized_vp_example() {
        let s = sp(4.0);
        let omega = first_le_zero();
        let x = pv(&[1.0, 1.0]);
        let xhat = pv(&[0.0, 2f64.powf(-0.5)]);
        let m =
            check_generalized_vp(&x, &xhat, &omega, &s, &c(), &[pv(&[-1.0, 0.0])], None).unwrap();
        for (k, v) in m.iter() {
            assert!(v >= -1e-12, "{k} {v}");
        }
        let y = pv(&[-1.0, 0.5]);
        let pts = vp_test_points(&omega, &xhat, None, &s, 3, 40);
        let m = check_generalized_vp(&x, &xhat, &omega, &s, &c(), &pts, Some((&y, &y))).unwrap();
        for (k, v) in m.iter() {
            assert!(v >= -1e-12, "{k} {v}");
        }
        assert_eq!(m.len(), 7);

        let z = pv(&[-0.3, 0.4]);
        let m = check_generalized_vp(&z, &z, &omega, &s, &c(), &pts, None).unwrap();
        assert_eq!(m.get("7.c"), Some(0.0));
        assert_eq!(m.get("7.e"), Some(0.0));
    }

    #[test]
    fn dual_vp_examples() {
        let s = sp(2.0);
        let omega = first_le_zero();
        let phi = dv(&[1.0, 2.0]);
        let phit = pv(&[0.0, 2.0]);
        let m = check_dual_vp(&phi, &phit, &omega, &s, &c(), &[pv(&[0.0, 0.0])], None).unwrap();
        assert_eq!(m.get("8.c"), Some(0.0));

        let (p1, p2) = (dv(&[1.0, 0.0]), dv(&[2.0, 0.0]));
        let t1 = project_generalized_pi(&p1, &omega, &s, &c()).unwrap().point;
        let t2 = project_generalized_pi(&p2, &omega, &s, &c()).unwrap().point;
        assert_eq!(t1.as_slice(), &[0.0, 0.0]);
        let m = check_dual_vp(&p1, &t1, &omega, &s, &c(), &[t1.clone()], Some((&p2, &t2))).unwrap();
        assert_eq!(m.get("8.b"), Some(0.0));

        let xi = pv(&[-0.2, 0.7]);
        let jxi = dv(xi.as_slice());
        let m = check_dual_vp(&jxi, &xi, &omega, &s, &c(), &[xi.clone()], None).unwrap();
        assert_eq!(m.get("8.c"), Some(0.0));
    }

    #[test]
    fn strong_uniqueness_examples() {
        let m = check_strong_uniqueness(
            &pv(&[1.0, 2.0]),
            &pv(&[0.0, 2.0]),
            &pv(&[0.0, 0.0]),
            &sp(2.0),
            None,
        )
        .unwrap();
        assert!(m.get("4.h").unwrap().abs() < 1e-14);
        assert!(m.get("f161").unwrap().abs() < 1e-14);

        let m = check_strong_uniqueness(
            &pv(&[1.0, 1.0]),
            &pv(&[0.0, 1.0]),
            &pv(&[0.0, 0.0]),
            &sp(4.0),
            None,
        )
        .unwrap();
        assert_relative_eq!(m.get("f177").unwrap(), 0.875, epsilon = 1e-14);
        assert!(m.get("f161").is_none());

        let x = pv(&[1.0, 1.0]);
        let xb = pv(&[0.0, 1.0]);
        let m = check_strong_uniqueness(&x, &xb, &xb, &sp(3.0), Some(4.0)).unwrap();
        assert!(m.get("f177").unwrap().abs() < 1e-14);
        assert!(m.get("s-thm").unwrap().abs() < 1e-14);
        assert!(check_strong_uniqueness(&x, &xb, &xb, &sp(3.0), Some(2.5)).is_err());
    }

    #[test]
    fn uniform_continuity_examples() {
        let omega = first_le_zero();
        let x = pv(&[0.4, -1.0]);
        let m = check_uniform_continuity(&x, &x, &omega, &sp(3.0), &c()).unwrap();
        for (_, v) in m.iter() {
            assert_eq!(v, 0.0);
        }
        let eps = 1e-3;
        let m =
            check_uniform_continuity(&pv(&[1.0, 0.0]), &pv(&[1.0, eps]), &omega, &sp(2.0), &c())
                .unwrap();
        for (k, v) in m.iter() {
            assert!(v >= 0.0, "{k}");
        }
        let m = check_uniform_continuity(
            &pv(&[1.0, 1.0]),
            &pv(&[1.01, 1.0]),
            &SetDescriptor::halfspace(vec![1.0, 1.0], 0.5).unwrap(),
            &sp(3.0),
            &c(),
        )
        .unwrap();
        assert_eq!(m.len(), 4);
        for (k, v) in m.iter() {
            assert!(v >= 0.0, "{k}");
        }
    }

    #[test]
    fn hilbert_margins_hold_at_two() {
        let s = sp(2.0);
        let omega = SetDescriptor::halfspace(vec![1.0, -2.0], 0.3).unwrap();
        let (x, y) = (pv(&[1.5, -1.0]), pv(&[-0.2, -1.7]));
        let xb = project_metric(&x, &omega, &s, &c()).unwrap().point;
        let yb = project_metric(&y, &omega, &s, &c()).unwrap().point;
        let pts = vp_test_points(&omega, &xb, None, &s, 5, 30);
        let m = check_hilbert_vp(&x, &xb, &omega, &s, &pts, Some((&y, &yb))).unwrap();
        assert_eq!(m.len(), 8);
        for (k, v) in m.iter() {
            assert!(v >= -1e-12, "{k} {v}");
        }
        assert!(check_hilbert_vp(&x, &xb, &omega, &sp(3.0), &pts, None).is_err());
    }

    #[test]
    fn nonexpansiveness_fails_at_four() {
        let s = sp(4.0);
        let ce = find_counterexample("4.f", &s, 7, 2000, &c())
            .unwrap()
            .unwrap();
        assert!(ce.margin < 0.0);
        assert_relative_eq!(ce.replay(&c()).unwrap(), ce.margin, epsilon = 1e-12);
        assert!(find_counterexample("4.f", &sp(2.0), 7, 500, &c())
            .unwrap()
            .is_none());
        assert!(find_counterexample("5.c", &s, 7, 1, &c()).is_err());
    }
}
