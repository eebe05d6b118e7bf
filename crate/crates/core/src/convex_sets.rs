//! Closed convex sets with analytic projection subproblems.
//!
//! Every projection is reduced to its KKT system. Halfspaces and hyperplanes
//! need at most one scalar multiplier, balls are radial, and boxes become a
//! scalar equation in the norm of the solution because the coordinates
//! decouple once that norm is fixed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp_geometry::{
    dot, duality_raw, gauge_raw, pnorm, DualVec, GeometryConstants, LpSpace, PrimalVec,
};
use crate::roots::{expand_bracket, solve_bracketed};

/// `{ξ : <n, ξ> ≤ c}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: DualVec,
    pub offset: f64,
}

/// `{ξ : <n, ξ> = c}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: DualVec,
    pub offset: f64,
}

/// `{ξ : lo ≤ ξ ≤ hi}` componentwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSet {
    pub lo: PrimalVec,
    pub hi: PrimalVec,
}

/// `{ξ : ||ξ||_p ≤ r}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBall {
    pub radius: f64,
}

fn check_normal(normal: &DualVec, offset: f64) -> Result<()> {
    if normal.is_zero() || !normal.is_finite() || !offset.is_finite() {
        return Err(Error::InvalidSet(
            "normal must be finite and nonzero".into(),
        ));
    }
    Ok(())
}

impl Halfspace {
    pub fn new(normal: DualVec, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self { normal, offset })
    }
}

impl Hyperplane {
    pub fn new(normal: DualVec, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self { normal, offset })
    }
}

impl BoxSet {
    pub fn new(lo: PrimalVec, hi: PrimalVec) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                found: hi.dim(),
            });
        }
        let ok = lo
            .as_slice()
            .iter()
            .zip(hi.as_slice())
            .all(|(a, b)| a.is_finite() && b.is_finite() && a <= b);
        if !ok {
            return Err(Error::InvalidSet("box needs finite lo <= hi".into()));
        }
        Ok(Self { lo, hi })
    }

    fn clamp(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.lo.as_slice().iter().zip(self.hi.as_slice()))
            .map(|(&t, (&l, &h))| t.clamp(l, h))
            .collect()
    }
}

impl NormBall {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSet("radius must be positive".into()));
        }
        Ok(Self { radius })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDescriptor {
    Halfspace(Halfspace),
    Hyperplane(Hyperplane),
    Box(BoxSet),
    Ball(NormBall),
}

impl From<Halfspace> for SetDescriptor {
    fn from(h: Halfspace) -> Self {
        SetDescriptor::Halfspace(h)
    }
}

impl From<Hyperplane> for SetDescriptor {
    fn from(h: Hyperplane) -> Self {
        SetDescriptor::Hyperplane(h)
    }
}

impl From<BoxSet> for SetDescriptor {
    fn from(b: BoxSet) -> Self {
        SetDescriptor::Box(b)
    }
}

impl From<NormBall> for SetDescriptor {
    fn from(b: NormBall) -> Self {
        SetDescriptor::Ball(b)
    }
}

impl SetDescriptor {
    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        Halfspace::new(DualVec::new(normal), offset).map(Into::into)
    }

    pub fn hyperplane(normal: Vec<f64>, offset: f64) -> Result<Self> {
        Hyperplane::new(DualVec::new(normal), offset).map(Into::into)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        BoxSet::new(PrimalVec::new(lo), PrimalVec::new(hi)).map(Into::into)
    }

    pub fn ball(radius: f64) -> Result<Self> {
        NormBall::new(radius).map(Into::into)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SetDescriptor::Halfspace(_) => "halfspace",
            SetDescriptor::Hyperplane(_) => "hyperplane",
            SetDescriptor::Box(_) => "box",
            SetDescriptor::Ball(_) => "ball",
        }
    }

    /// Dimension fixed by the descriptor, if any (balls fit every dimension).
    pub fn dim(&self) -> Option<usize> {
        match self {
            SetDescriptor::Halfspace(h) => Some(h.normal.dim()),
            SetDescriptor::Hyperplane(h) => Some(h.normal.dim()),
            SetDescriptor::Box(b) => Some(b.lo.dim()),
            SetDescriptor::Ball(_) => None,
        }
    }

    pub(crate) fn check_space(&self, s: &LpSpace) -> Result<()> {
        match self.dim() {
            Some(d) => s.check_len(d),
            None => Ok(()),
        }
    }

    /// Amount by which `x` violates the constraint, in the units of the
    /// constraint functional (0 inside).
    pub fn violation(&self, x: &PrimalVec, s: &LpSpace) -> Result<f64> {
        self.check_space(s)?;
        s.check_len(x.dim())?;
        Ok(self.violation_raw(x.as_slice(), s.p()))
    }

    pub(crate) fn violation_raw(&self, x: &[f64], p: f64) -> f64 {
        match self {
            SetDescriptor::Halfspace(h) => (dot(h.normal.as_slice(), x) - h.offset).max(0.0),
            SetDescriptor::Hyperplane(h) => (dot(h.normal.as_slice(), x) - h.offset).abs(),
            SetDescriptor::Box(b) => x
                .iter()
                .zip(b.lo.as_slice().iter().zip(b.hi.as_slice()))
                .fold(0.0_f64, |m, (&t, (&l, &h))| m.max(l - t).max(t - h)),
            SetDescriptor::Ball(b) => (pnorm(x, p) - b.radius).max(0.0),
        }
    }

    /// Maximizer of `<g, ξ>` over the set when the supremum is finite and the
    /// set is bounded (boxes and balls).
    pub fn maximize_linear(&self, g: &DualVec, s: &LpSpace) -> Option<PrimalVec> {
        match self {
            SetDescriptor::Box(b) => Some(PrimalVec::new(
                g.as_slice()
                    .iter()
                    .zip(b.lo.as_slice().iter().zip(b.hi.as_slice()))
                    .map(|(&gi, (&l, &h))| if gi >= 0.0 { h } else { l })
                    .collect(),
            )),
            SetDescriptor::Ball(b) => {
                let z = duality_raw(g.as_slice(), s.q());
                let nz = pnorm(&z, s.p());
                if nz == 0.0 {
                    return Some(PrimalVec::zeros(g.dim()));
                }
                Some(PrimalVec::new(
                    z.iter().map(|v| v * b.radius / nz).collect(),
                ))
            }
            _ => None,
        }
    }

    /// KKT residual of the variational inequality `<g, pt - ξ> ≥ 0 ∀ξ ∈ Ω`
    /// at a feasible `pt`. Exact supremum for boxes and balls; for
    /// halfspaces and hyperplanes, the deviation of `g` from a valid
    /// multiple of the normal plus the complementarity gap.
    pub(crate) fn vi_violation(&self, g: &[f64], pt: &[f64], s: &LpSpace) -> f64 {
        match self {
            SetDescriptor::Box(b) => {
                let sup: f64 = g
                    .iter()
                    .zip(b.lo.as_slice().iter().zip(b.hi.as_slice()))
                    .map(|(&gi, (&l, &h))| (gi * l).max(gi * h))
                    .sum();
                (sup - dot(g, pt)).max(0.0)
            }
            SetDescriptor::Ball(b) => (b.radius * pnorm(g, s.q()) - dot(g, pt)).max(0.0),
            SetDescriptor::Halfspace(h) => {
                let (mu, rest) = split_along(g, h.normal.as_slice());
                let slack = h.offset - dot(h.normal.as_slice(), pt);
                rest + (-mu).max(0.0) * euclid(h.normal.as_slice()) + (mu * slack).abs()
            }
            SetDescriptor::Hyperplane(h) => {
                let (mu, rest) = split_along(g, h.normal.as_slice());
                let slack = h.offset - dot(h.normal.as_slice(), pt);
                rest + (mu * slack).abs()
            }
        }
    }

    /// Deterministic-given-`rng` collection of feasible points used to test
    /// variational inequalities: structural points (vertices, tangent and
    /// inward moves from `anchor`, axis points on the sphere) plus `count`
    /// random feasible samples. `anchor` must be feasible.
    pub fn sample_points<R: Rng>(
        &self,
        anchor: &PrimalVec,
        s: &LpSpace,
        rng: &mut R,
        count: usize,
    ) -> Vec<PrimalVec> {
        let dim = anchor.dim();
        let a = anchor.as_slice();
        let mut out = Vec::new();
        match self {
            SetDescriptor::Halfspace(Halfspace { normal, .. })
            | SetDescriptor::Hyperplane(Hyperplane { normal, .. }) => {
                let inward = matches!(self, SetDescriptor::Halfspace(_));
                let n = normal.as_slice();
                let k = (0..dim)
                    .max_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs()))
                    .unwrap_or(0);
                let tangent = |j: usize| -> Vec<f64> {
                    let mut v = vec![0.0; dim];
                    v[j] = 1.0;
                    v[k] = -n[j] / n[k];
                    v
                };
                let push = |out: &mut Vec<PrimalVec>, v: &[f64], t: f64| {
                    out.push(PrimalVec::new(
                        a.iter().zip(v).map(|(x, d)| x + t * d).collect(),
                    ));
                };
                for j in (0..dim).filter(|&j| j != k) {
                    let v = tangent(j);
                    for &t in &[-2.0, -0.5, 0.5, 2.0] {
                        push(&mut out, &v, t);
                    }
                }
                let mut e = vec![0.0; dim];
                e[k] = -n[k].signum();
                if inward {
                    for &t in &[0.5, 2.0] {
                        push(&mut out, &e, t);
                    }
                }
                for _ in 0..count {
                    let mut v = vec![0.0; dim];
                    for j in (0..dim).filter(|&j| j != k) {
                        let w: f64 = rng.gen_range(-2.0..2.0);
                        let tj = tangent(j);
                        for (vi, ti) in v.iter_mut().zip(&tj) {
                            *vi += w * ti;
                        }
                    }
                    if inward {
                        let t: f64 = rng.gen_range(0.0..2.0);
                        v[k] += t * e[k];
                    }
                    push(&mut out, &v, 1.0);
                }
            }
            SetDescriptor::Box(b) => {
                let (lo, hi) = (b.lo.as_slice(), b.hi.as_slice());
                if dim <= 10 {
                    for mask in 0u32..(1u32 << dim) {
                        out.push(PrimalVec::new(
                            (0..dim)
                                .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                                .collect(),
                        ));
                    }
                } else {
                    for _ in 0..count {
                        out.push(PrimalVec::new(
                            (0..dim)
                                .map(|i| if rng.gen_bool(0.5) { hi[i] } else { lo[i] })
                                .collect(),
                        ));
                    }
                }
                for _ in 0..count {
                    out.push(PrimalVec::new(
                        (0..dim)
                            .map(|i| lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>())
                            .collect(),
                    ));
                }
            }
            SetDescriptor::Ball(b) => {
                let r = b.radius;
                for j in 0..dim {
                    for sign in [-1.0, 1.0] {
                        let mut v = vec![0.0; dim];
                        v[j] = sign * r;
                        out.push(PrimalVec::new(v));
                    }
                }
                for i in 0..count {
                    let u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let nu = pnorm(&u, s.p());
                    if nu == 0.0 {
                        continue;
                    }
                    // alternate boundary and interior samples
                    let rad = if i % 2 == 0 { r } else { r * rng.gen::<f64>() };
                    out.push(PrimalVec::new(u.iter().map(|v| v * rad / nu).collect()));
                }
            }
        }
        out
    }
}

fn euclid(v: &[f64]) -> f64 {
    pnorm(v, 2.0)
}

/// Writes `g = μ n + r` with `r ⟂ n` (Euclidean coordinates) and returns
/// `(μ, ||r||_2)`.
fn split_along(g: &[f64], n: &[f64]) -> (f64, f64) {
    let nn = dot(n, n);
    let mu = dot(g, n) / nn;
    let r: Vec<f64> = g.iter().zip(n).map(|(gi, ni)| gi - mu * ni).collect();
    (mu, euclid(&r))
}

pub fn contains(omega: &SetDescriptor, x: &PrimalVec, s: &LpSpace, tol: f64) -> Result<bool> {
    Ok(omega.violation(x, s)? <= tol)
}

/// Output of a projection subproblem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub point: PrimalVec,
    /// KKT multiplier of the active constraint, 0 when inactive and for boxes.
    pub multiplier: f64,
    /// Violation of the variational principle characterizing the projection.
    pub vp_residual: f64,
    pub inner_iterations: usize,
}

/// Metric projection: the nearest point of `Ω` in the `l^p` norm.
pub fn metric_project(
    omega: &SetDescriptor,
    x: &PrimalVec,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<ProjectionResult> {
    let _ = c;
    omega.check_space(s)?;
    s.check_len(x.dim())?;
    let (p, q) = (s.p(), s.q());
    let xs = x.as_slice();
    let (point, multiplier) = match omega {
        SetDescriptor::Box(b) => (b.clamp(xs), 0.0),
        SetDescriptor::Ball(b) => {
            let nx = pnorm(xs, p);
            if nx <= b.radius {
                (xs.to_vec(), 0.0)
            } else {
                let t = b.radius / nx;
                (
                    xs.iter().map(|v| v * t).collect(),
                    ((nx - b.radius) / b.radius).powf(p - 1.0),
                )
            }
        }
        SetDescriptor::Halfspace(Halfspace { normal, offset })
        | SetDescriptor::Hyperplane(Hyperplane { normal, offset }) => {
            let n = normal.as_slice();
            let excess = dot(n, xs) - offset;
            if excess <= 0.0 && matches!(omega, SetDescriptor::Halfspace(_)) || excess == 0.0 {
                (xs.to_vec(), 0.0)
            } else {
                // J^μ(x - ξ) = λ n  ⇒  x - ξ = t · J^μ_q(n), t = sign(λ)|λ|^{q-1}
                let d = gauge_raw(n, q);
                let t = excess / dot(n, &d);
                (
                    xs.iter().zip(&d).map(|(xi, di)| xi - t * di).collect(),
                    t.abs().powf(p - 1.0),
                )
            }
        }
    };
    let residual: Vec<f64> = xs.iter().zip(&point).map(|(a, b)| a - b).collect();
    let g = duality_raw(&residual, p);
    let vp_residual = omega.vi_violation(&g, &point, s);
    Ok(ProjectionResult {
        point: PrimalVec::new(point),
        multiplier,
        vp_residual,
        inner_iterations: 0,
    })
}

/// Generalized projection of a dual point: the minimizer over `Ω` of
/// `V4(φ, ξ) = ||φ||²_* - 2<φ, ξ> + ||ξ||²`.
pub fn generalized_project_dual(
    omega: &SetDescriptor,
    phi: &DualVec,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<ProjectionResult> {
    let _ = c;
    omega.check_space(s)?;
    s.check_len(phi.dim())?;
    let (p, q) = (s.p(), s.q());
    let ph = phi.as_slice();
    let free = duality_raw(ph, q);
    let (point, multiplier, iterations) = if omega.violation_raw(&free, p) == 0.0 {
        (free, 0.0, 0)
    } else {
        match omega {
            SetDescriptor::Ball(b) => {
                let nz = pnorm(&free, p);
                let t = b.radius / nz;
                (free.iter().map(|v| v * t).collect(), nz / b.radius - 1.0, 0)
            }
            SetDescriptor::Halfspace(Halfspace { normal, offset })
            | SetDescriptor::Hyperplane(Hyperplane { normal, offset }) => {
                dual_affine_projection(ph, normal.as_slice(), *offset, q)?
            }
            SetDescriptor::Box(b) => dual_box_projection(ph, b, p, q)?,
        }
    };
    let jx = duality_raw(&point, p);
    let g: Vec<f64> = ph.iter().zip(&jx).map(|(a, b)| a - b).collect();
    let vp_residual = omega.vi_violation(&g, &point, s);
    Ok(ProjectionResult {
        point: PrimalVec::new(point),
        multiplier,
        vp_residual,
        inner_iterations: iterations,
    })
}

/// Solves `Jξ = φ - μ n`, `<n, ξ> = c` for the scalar `μ`. The map
/// `μ ↦ <n, J*(φ - μ n)>` is nonincreasing by monotonicity of `J*`.
fn dual_affine_projection(
    phi: &[f64],
    n: &[f64],
    offset: f64,
    q: f64,
) -> Result<(Vec<f64>, f64, usize)> {
    let xi_of = |mu: f64| -> Vec<f64> {
        let shifted: Vec<f64> = phi.iter().zip(n).map(|(a, b)| a - mu * b).collect();
        duality_raw(&shifted, q)
    };
    let h = |mu: f64| dot(n, &xi_of(mu)) - offset;
    let h0 = h(0.0);
    let nq = pnorm(n, q);
    let step0 = (pnorm(phi, q) / nq).max(h0.abs() / (nq * nq)).max(1e-300);
    let r = if h0 > 0.0 {
        let (pos, fp, neg, fneg) = expand_bracket(h, 0.0, h0, step0)?;
        solve_bracketed(h, pos, fp, neg, fneg, 0.0)?
    } else {
        // hyperplane approached from the other side: μ < 0
        let minus_h = |mu: f64| -h(mu);
        let (pos, fp, neg, fneg) = expand_bracket(minus_h, 0.0, -h0, -step0)?;
        solve_bracketed(minus_h, pos, fp, neg, fneg, 0.0)?
    };
    let mu = r.best();
    // For p > 2, ξ is only Hölder in μ, so a coordinate that should vanish
    // can be off by ~ulp^(q-1). Snapping onto the plane along J*_q(n)
    // removes that while moving Jξ by O(ulp).
    let mut xi = xi_of(mu);
    let d = gauge_raw(n, q);
    let t = (dot(n, &xi) - offset) / dot(n, &d);
    for (x, di) in xi.iter_mut().zip(&d) {
        *x -= t * di;
    }
    Ok((xi, mu.abs(), r.iterations))
}

/// Box case. With `N = ||ξ||` fixed the KKT system separates:
/// `ξ_i = clamp(N^β · J^μ_q(φ)_i)`, `β = (p-2)/(p-1)`, and `N` solves
/// `||ξ(N)|| = N` on `[||clamp(0)||, ||max(|lo|,|hi|)||]`. For `p > 2` with
/// `0` in the box, `N = 0` also solves it and is skipped.
fn dual_box_projection(phi: &[f64], b: &BoxSet, p: f64, q: f64) -> Result<(Vec<f64>, f64, usize)> {
    let w = gauge_raw(phi, q);
    let beta = (p - 2.0) / (p - 1.0);
    let lo = b.lo.as_slice();
    let hi = b.hi.as_slice();
    let xi_of = |n: f64| -> Vec<f64> {
        let scale = if beta == 0.0 { 1.0 } else { n.powf(beta) };
        w.iter()
            .zip(lo.iter().zip(hi))
            .map(|(&wi, (&l, &h))| {
                let v = if wi == 0.0 { 0.0 } else { scale * wi };
                v.clamp(l, h)
            })
            .collect()
    };
    if beta == 0.0 {
        return Ok((xi_of(1.0), 0.0, 0));
    }
    let h = |n: f64| pnorm(&xi_of(n), p) - n;
    let n_min = pnorm(&b.clamp(&vec![0.0; lo.len()]), p);
    let far: Vec<f64> = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| l.abs().max(h.abs()))
        .collect();
    let n_max = pnorm(&far, p);
    let f_max = h(n_max);
    if f_max >= 0.0 {
        return Ok((xi_of(n_max), 0.0, 0));
    }
    let (mut n_lo, mut f_lo) = (n_min, h(n_min));
    if beta > 0.0 && n_min == 0.0 {
        // N = 0 is a spurious root here; walk down to a positive N with h > 0
        n_lo = n_max;
        loop {
            n_lo *= 0.5;
            if n_lo == 0.0 {
                return Ok((xi_of(0.0), 0.0, 0));
            }
            f_lo = h(n_lo);
            if f_lo > 0.0 {
                break;
            }
        }
    }
    if f_lo <= 0.0 {
        return Ok((xi_of(n_lo), 0.0, 0));
    }
    let r = solve_bracketed(h, n_lo, f_lo, n_max, f_max, 0.0)?;
    Ok((xi_of(r.best()), 0.0, r.iterations))
}

/// Hausdorff distance between two parallel halfspaces
/// `{<n, ξ> ≤ c₁}` and `{<k n, ξ> ≤ c₂}`, `k > 0`: `|c₁ - c₂/k| / ||n||_*`.
pub fn hausdorff_parallel_halfspaces(h1: &Halfspace, h2: &Halfspace, s: &LpSpace) -> Result<f64> {
    s.check_len(h1.normal.dim())?;
    s.check_len(h2.normal.dim())?;
    let n1 = h1.normal.as_slice();
    let n2 = h2.normal.as_slice();
    let k = dot(n1, n2) / dot(n1, n1);
    let off = n1
        .iter()
        .zip(n2)
        .fold(0.0_f64, |m, (a, b)| m.max((b - k * a).abs()));
    if !(k > 0.0) || off > 1e-12 * euclid(n2) {
        return Err(Error::NonParallel);
    }
    Ok((h1.offset - h2.offset / k).abs() / pnorm(n1, s.q()))
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
    fn constructors_validate() {
        assert!(SetDescriptor::halfspace(vec![0.0, 0.0], 1.0).is_err());
        assert!(SetDescriptor::hyperplane(vec![f64::NAN, 1.0], 1.0).is_err());
        assert!(SetDescriptor::boxed(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(SetDescriptor::boxed(vec![0.0], vec![0.0, 1.0]).is_err());
        assert!(SetDescriptor::ball(0.0).is_err());
        assert!(SetDescriptor::ball(-1.0).is_err());
    }

    #[test]
    fn membership() {
        let s = sp(2.0);
        assert!(contains(&first_le_zero(), &pv(&[0.0, 5.0]), &s, 1e-9).unwrap());
        let unit_box = SetDescriptor::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(!contains(&unit_box, &pv(&[2.0, 0.0]), &s, 1e-9).unwrap());
        let ball = SetDescriptor::ball(1.0).unwrap();
        assert!(contains(&ball, &pv(&[0.6, 0.8]), &s, 1e-9).unwrap());
        assert!(contains(&ball, &pv(&[0.6]), &s, 1e-9).is_err());
    }

    #[test]
    fn metric_projection_examples() {
        let unit_box = SetDescriptor::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        for &p in &[1.5, 2.0, 4.0] {
            let r = metric_project(&unit_box, &pv(&[2.0, -3.0]), &sp(p), &c()).unwrap();
            assert_eq!(r.point.as_slice(), &[1.0, 0.0]);
        }
        let r = metric_project(&first_le_zero(), &pv(&[1.0, 1.0]), &sp(4.0), &c()).unwrap();
        assert_relative_eq!(r.point[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(r.point[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.multiplier, 1.0, epsilon = 1e-12);

        let ball = SetDescriptor::ball(1.0).unwrap();
        let r = metric_project(&ball, &pv(&[2.0, 2.0]), &sp(3.0), &c()).unwrap();
        let v = 2.0 / 2f64.powf(4.0 / 3.0);
        assert_relative_eq!(r.point[0], v, epsilon = 1e-14);
        assert_relative_eq!(r.point[1], v, epsilon = 1e-14);
        assert!((v - 0.7937).abs() < 1e-4);
    }

    #[test]
    fn metric_projection_fixes_members() {
        let s = sp(3.0);
        for set in [
            first_le_zero(),
            SetDescriptor::hyperplane(vec![1.0, 2.0], 1.0).unwrap(),
            SetDescriptor::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
            SetDescriptor::ball(2.0).unwrap(),
        ] {
            let x = match &set {
                SetDescriptor::Hyperplane(_) => pv(&[1.0, 0.0]),
                _ => pv(&[-0.5, 0.25]),
            };
            let r = metric_project(&set, &x, &s, &c()).unwrap();
            assert_eq!(r.point, x, "{}", set.kind());
            assert_eq!(r.multiplier, 0.0);
        }
    }

    #[test]
    fn hyperplane_metric_projection_lands_on_plane() {
        let s = sp(4.0);
        let h = SetDescriptor::hyperplane(vec![1.0, 2.0], 1.0).unwrap();
        for x in [pv(&[3.0, 3.0]), pv(&[-2.0, -1.0])] {
            let r = metric_project(&h, &x, &s, &c()).unwrap();
            assert!(h.violation(&r.point, &s).unwrap() < 1e-14);
            assert!(r.vp_residual < 1e-12);
        }
    }

    #[test]
    fn generalized_projection_examples() {
        let r =
            generalized_project_dual(&first_le_zero(), &dv(&[1.0, 2.0]), &sp(2.0), &c()).unwrap();
        assert_relative_eq!(r.point[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(r.point[1], 2.0, epsilon = 1e-14);

        let h = 2f64.powf(-0.5);
        let r = generalized_project_dual(&first_le_zero(), &dv(&[h, h]), &sp(4.0), &c()).unwrap();
        assert_relative_eq!(r.point[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(r.point[1], h, epsilon = 1e-12);
        assert_relative_eq!(r.multiplier, h, epsilon = 1e-12);
        assert!(r.point[0] <= 0.0);
    }

    #[test]
    fn generalized_projection_is_j_fixed() {
        let sets = [
            first_le_zero(),
            SetDescriptor::hyperplane(vec![1.0, -1.0], 0.5).unwrap(),
            SetDescriptor::boxed(vec![-1.0, 0.0], vec![0.0, 2.0]).unwrap(),
            SetDescriptor::ball(1.5).unwrap(),
        ];
        let z = [
            pv(&[-0.3, 1.1]),
            pv(&[0.75, 0.25]),
            pv(&[-0.5, 1.0]),
            pv(&[0.5, -0.9]),
        ];
        for &p in &[1.5, 2.0, 3.0, 4.0] {
            let s = sp(p);
            for (set, z) in sets.iter().zip(&z) {
                let phi = crate::lp_geometry::duality_map(z, &s).unwrap();
                let r = generalized_project_dual(set, &phi, &s, &c()).unwrap();
                assert!(r.point.max_abs_diff(z) < 1e-12, "{} p={p}", set.kind());
            }
        }
    }

    #[test]
    fn min_norm_point_of_halfspace() {
        let set = SetDescriptor::halfspace(vec![1.0, 0.0], -1.0).unwrap();
        let r = generalized_project_dual(&set, &DualVec::zeros(2), &sp(2.0), &c()).unwrap();
        assert_relative_eq!(r.point[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(r.point[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn box_generalized_projection_satisfies_kkt() {
        let set = SetDescriptor::boxed(vec![0.2, -1.0, 0.0], vec![1.0, 1.0, 0.1]).unwrap();
        for &p in &[1.5, 3.0, 4.0] {
            let s = LpSpace::new(p, 3).unwrap();
            let phi = dv(&[-1.0, 0.7, 2.0]);
            let r = generalized_project_dual(&set, &phi, &s, &c()).unwrap();
            assert!(r.vp_residual < 1e-12, "p={p} res={}", r.vp_residual);
            assert_eq!(set.violation(&r.point, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn hyperplane_generalized_projection_both_sides() {
        let set = SetDescriptor::hyperplane(vec![1.0, 1.0], 1.0).unwrap();
        let s = sp(3.0);
        for phi in [dv(&[3.0, 0.5]), dv(&[-2.0, 0.1])] {
            let r = generalized_project_dual(&set, &phi, &s, &c()).unwrap();
            assert!(set.violation(&r.point, &s).unwrap() < 1e-13);
            assert!(r.vp_residual < 1e-12);
            assert!(r.multiplier >= 0.0);
        }
    }

    #[test]
    fn scalar_kkt_map_is_nonincreasing() {
        let n = [1.0, -2.0, 0.5];
        let phi = [0.3, 1.0, -0.7];
        for &q in &[1.25, 1.5, 2.0, 3.0] {
            let mut prev = f64::INFINITY;
            for k in -50..=50 {
                let mu = k as f64 * 0.1;
                let shifted: Vec<f64> = phi.iter().zip(&n).map(|(a, b)| a - mu * b).collect();
                let v = dot(&n, &duality_raw(&shifted, q));
                assert!(v <= prev + 1e-12);
                prev = v;
            }
        }
    }

    #[test]
    fn hausdorff_examples() {
        let s = sp(2.0);
        let sigma = 0.3;
        let h1 = Halfspace::new(dv(&[1.0, 0.0]), 0.0).unwrap();
        let h2 = Halfspace::new(dv(&[1.0, 0.0]), -sigma).unwrap();
        assert_relative_eq!(hausdorff_parallel_halfspaces(&h1, &h2, &s).unwrap(), sigma);
        let h3 = Halfspace::new(dv(&[2.0, 0.0]), 0.0).unwrap();
        let h4 = Halfspace::new(dv(&[2.0, 0.0]), 1.0).unwrap();
        assert_relative_eq!(hausdorff_parallel_halfspaces(&h3, &h4, &s).unwrap(), 0.5);
        assert_eq!(hausdorff_parallel_halfspaces(&h1, &h1, &s).unwrap(), 0.0);
        let h5 = Halfspace::new(dv(&[1.0, 1.0]), 0.0).unwrap();
        assert!(matches!(
            hausdorff_parallel_halfspaces(&h1, &h5, &s),
            Err(Error::NonParallel)
        ));
    }

    #[test]
    fn maximize_linear_is_exact() {
        let s = sp(3.0);
        let ball = SetDescriptor::ball(2.0).unwrap();
        let g = dv(&[1.0, -2.0]);
        let m = ball.maximize_linear(&g, &s).unwrap();
        assert_relative_eq!(
            g.pair(&m),
            2.0 * pnorm(g.as_slice(), s.q()),
            epsilon = 1e-12
        );
        let b = SetDescriptor::boxed(vec![-1.0, 0.0], vec![1.0, 3.0]).unwrap();
        let m = b.maximize_linear(&g, &s).unwrap();
        assert_eq!(m.as_slice(), &[1.0, 0.0]);
        assert!(first_le_zero().maximize_linear(&g, &s).is_none());
    }

    #[test]
    fn serde_tagging() {
        let set = SetDescriptor::ball(1.5).unwrap();
        let j = serde_json::to_string(&set).unwrap();
        assert_eq!(j, r#"{"kind":"ball","radius":1.5}"#);
        let back: SetDescriptor = serde_json::from_str(&j).unwrap();
        assert_eq!(back, set);
    }
}
