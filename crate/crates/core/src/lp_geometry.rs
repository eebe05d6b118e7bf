//! Geometry of the sequence spaces `l^p_n`, `1 < p < ∞`.
//!
//! Primal vectors live in `l^p`, dual vectors in `l^q` with `1/p + 1/q = 1`,
//! and the pairing `<φ, x>` is the coordinate dot product. The normalized
//! duality mapping `J` sends `x` to the unique functional with
//! `<Jx, x> = ||x||^2` and `||Jx||_q = ||x||_p`; its inverse `J*` is the
//! normalized duality mapping of the dual space.
//!
//! The moduli of convexity and smoothness are only available as one-sided
//! estimates here. Every inequality check therefore returns a signed margin
//! computed with the estimate that keeps the check valid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient space `l^p_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct LpSpace {
    p: f64,
    q: f64,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    p: f64,
    dim: usize,
}

impl TryFrom<SpaceRepr> for LpSpace {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        LpSpace::new(r.p, r.dim)
    }
}

impl From<LpSpace> for SpaceRepr {
    fn from(s: LpSpace) -> Self {
        SpaceRepr { p: s.p, dim: s.dim }
    }
}

impl LpSpace {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            p,
            q: p / (p - 1.0),
            dim,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The dual space `l^q_n`, whose own dual is `self` again.
    pub fn dual(&self) -> LpSpace {
        LpSpace {
            p: self.q,
            q: self.p,
            dim: self.dim,
        }
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }
}

macro_rules! coord_vec {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(coords: Vec<f64>) -> Self {
                Self(coords)
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![0.0; dim])
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn as_mut_slice(&mut self) -> &mut [f64] {
                &mut self.0
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&v| v == 0.0)
            }

            pub fn add(&self, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
            }

            pub fn scale(&self, t: f64) -> Self {
                Self(self.0.iter().map(|a| a * t).collect())
            }

            /// `self + t * other`
            pub fn axpy(&self, t: f64, other: &Self) -> Self {
                Self(
                    self.0
                        .iter()
                        .zip(&other.0)
                        .map(|(a, b)| a + t * b)
                        .collect(),
                )
            }

            /// Largest absolute coordinate difference.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.0
                    .iter()
                    .zip(&other.0)
                    .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }
    };
}

coord_vec!(PrimalVec);
coord_vec!(DualVec);

impl DualVec {
    /// The pairing `<φ, x>`.
    pub fn pair(&self, x: &PrimalVec) -> f64 {
        dot(&self.0, &x.0)
    }
}

/// Figiel's constant and working tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConstants {
    pub figiel_l: f64,
    pub tol_identity: f64,
    pub tol_kkt: f64,
}

impl Default for GeometryConstants {
    fn default() -> Self {
        Self {
            figiel_l: 3.18,
            tol_identity: 1e-10,
            tol_kkt: 1e-10,
        }
    }
}

impl GeometryConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.figiel_l > 1.0) || !(self.tol_identity > 0.0) || !(self.tol_kkt > 0.0) {
            return Err(Error::Precondition(format!(
                "invalid geometry constants {self:?}"
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Slice kernels. Callers are responsible for matching lengths.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(Σ|v_i|^p)^{1/p}`, scaled by the largest entry so that neither tiny nor
/// huge coordinates underflow or overflow.
pub(crate) fn pnorm(v: &[f64], p: f64) -> f64 {
    let m = v.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    if p == 2.0 {
        let s: f64 = v.iter().map(|&t| (t / m) * (t / m)).sum();
        return m * s.sqrt();
    }
    let s: f64 = v.iter().map(|&t| (t.abs() / m).powf(p)).sum();
    m * s.powf(p.recip())
}

/// Normalized duality mapping of `l^p`:
/// `(Jv)_i = ||v||^{2-p} |v_i|^{p-2} v_i`, written as
/// `||v|| * sign(v_i) * (|v_i| / ||v||)^{p-1}`. Zero coordinates map to zero.
pub(crate) fn duality_raw(v: &[f64], p: f64) -> Vec<f64> {
    if p == 2.0 {
        return v.to_vec();
    }
    let n = pnorm(v, p);
    if n == 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter()
        .map(|&t| {
            if t == 0.0 {
                0.0
            } else {
                (n * (t.abs() / n).powf(p - 1.0)).copysign(t)
            }
        })
        .collect()
}

/// Duality mapping with gauge `t^{p-1}`: `|v_i|^{p-2} v_i`.
pub(crate) fn gauge_raw(v: &[f64], p: f64) -> Vec<f64> {
    if p == 2.0 {
        return v.to_vec();
    }
    v.iter()
        .map(|&t| {
            if t == 0.0 {
                0.0
            } else {
                t.abs().powf(p - 1.0).copysign(t)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Norms and duality mappings.

pub fn lp_norm(x: &PrimalVec, s: &LpSpace) -> Result<f64> {
    s.check_len(x.dim())?;
    Ok(pnorm(x.as_slice(), s.p))
}

/// The `B*` norm, i.e. the `l^q` norm.
pub fn dual_norm(phi: &DualVec, s: &LpSpace) -> Result<f64> {
    s.check_len(phi.dim())?;
    Ok(pnorm(phi.as_slice(), s.q))
}

/// Normalized duality mapping `J : l^p → l^q`.
pub fn duality_map(x: &PrimalVec, s: &LpSpace) -> Result<DualVec> {
    s.check_len(x.dim())?;
    Ok(DualVec(duality_raw(x.as_slice(), s.p)))
}

/// Gauge duality mapping `J^μ x = grad ||x||^p / p`.
///
/// Only the natural gauge `gauge_p == s.p()` is supported.
pub fn gauge_duality_map(x: &PrimalVec, s: &LpSpace, gauge_p: f64) -> Result<DualVec> {
    s.check_len(x.dim())?;
    if gauge_p != s.p {
        return Err(Error::Precondition(format!(
            "gauge exponent {gauge_p} must equal the space exponent {}",
            s.p
        )));
    }
    Ok(DualVec(gauge_raw(x.as_slice(), s.p)))
}

/// `J* = J^{-1}`, the normalized duality mapping of `l^q`.
pub fn inverse_duality_map(phi: &DualVec, s: &LpSpace) -> Result<PrimalVec> {
    s.check_len(phi.dim())?;
    Ok(PrimalVec(duality_raw(phi.as_slice(), s.q)))
}

// ---------------------------------------------------------------------------
// Moduli estimates.

/// Certified lower estimate of the modulus of convexity `δ(ε)`:
/// `(p-1)ε²/8` for `p ≤ 2` and `ε^p / (p 2^p)` for `p ≥ 2`.
pub fn modulus_convexity_lower(eps: f64, s: &LpSpace) -> Result<f64> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::OutOfDomain {
            value: eps,
            domain: "[0, 2]",
        });
    }
    Ok(convexity_lower_unchecked(eps, s.p))
}

pub(crate) fn convexity_lower_unchecked(eps: f64, p: f64) -> f64 {
    if p <= 2.0 {
        (p - 1.0) * eps * eps / 8.0
    } else {
        eps.powf(p) / (p * 2f64.powf(p))
    }
}

/// Certified upper estimate of the modulus of smoothness `ρ(τ)`:
/// `τ^p / p` for `p ≤ 2` and `(p-1)τ²/2` for `p ≥ 2`.
pub fn modulus_smoothness_upper(tau: f64, s: &LpSpace) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::OutOfDomain {
            value: tau,
            domain: "[0, inf)",
        });
    }
    let p = s.p;
    Ok(if p <= 2.0 {
        tau.powf(p) / p
    } else {
        (p - 1.0) * tau * tau / 2.0
    })
}

/// Inverse of the lower convexity estimate, extended past `ε = 2` by the
/// same formula.
///
/// Since the true modulus dominates the estimate, this over-estimates the
/// true `δ^{-1}`, so bounds of the form `C δ^{-1}(·)` stay valid.
pub fn modulus_convexity_lower_inverse(t: f64, s: &LpSpace) -> f64 {
    let p = s.p;
    let t = t.max(0.0);
    if p <= 2.0 {
        (8.0 * t / (p - 1.0)).sqrt()
    } else {
        (p * 2f64.powf(p) * t).powf(p.recip())
    }
}

/// Inverse of `g(ε) = δ(ε)/ε` built from the lower convexity estimate.
pub fn convexity_ratio_inverse(t: f64, s: &LpSpace) -> f64 {
    let p = s.p;
    let t = t.max(0.0);
    if p <= 2.0 {
        8.0 * t / (p - 1.0)
    } else {
        (p * 2f64.powf(p) * t).powf((p - 1.0).recip())
    }
}

/// `2 max{1, sqrt((a² + b²)/2)}`.
pub(crate) fn mean_square_scale(a: f64, b: f64) -> f64 {
    2.0 * ((a * a + b * b) / 2.0).sqrt().max(1.0)
}

// ---------------------------------------------------------------------------
// Inequality checks.

/// Clarkson's inequality for `p ≥ 2`. Returns `RHS - LHS` of
/// `||x+y||^p ≤ 2^{p-1}||x||^p + 2^{p-1}||y||^p - ||x-y||^p`.
pub fn check_clarkson(x: &PrimalVec, y: &PrimalVec, s: &LpSpace) -> Result<f64> {
    check_clarkson_order(x, y, s, s.p)
}

/// Clarkson-type inequality of order `r ≥ p ≥ 2`.
pub fn check_clarkson_order(x: &PrimalVec, y: &PrimalVec, s: &LpSpace, r: f64) -> Result<f64> {
    if s.p < 2.0 || r < s.p {
        return Err(Error::InapplicableExponent {
            p: s.p,
            requirement: "r >= p >= 2",
        });
    }
    s.check_len(x.dim())?;
    s.check_len(y.dim())?;
    let p = s.p;
    let nx = pnorm(x.as_slice(), p);
    let ny = pnorm(y.as_slice(), p);
    let sum = pnorm(x.add(y).as_slice(), p);
    let diff = pnorm(x.sub(y).as_slice(), p);
    let c = 2f64.powf(r - 1.0);
    Ok(c * nx.powf(r) + c * ny.powf(r) - diff.powf(r) - sum.powf(r))
}

/// Lower parallelogram inequality
/// `2||x||² + 2||y||² - ||x+y||² ≥ L^{-1} δ(||x-y|| / C₂)`.
pub fn check_parallelogram_lower(
    x: &PrimalVec,
    y: &PrimalVec,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<f64> {
    s.check_len(x.dim())?;
    s.check_len(y.dim())?;
    let p = s.p;
    let nx = pnorm(x.as_slice(), p);
    let ny = pnorm(y.as_slice(), p);
    let sum = pnorm(x.add(y).as_slice(), p);
    let diff = pnorm(x.sub(y).as_slice(), p);
    let lhs = 2.0 * nx * nx + 2.0 * ny * ny - sum * sum;
    let c2 = mean_square_scale(nx, ny);
    let bound = convexity_lower_unchecked((diff / c2).min(2.0), p) / c.figiel_l;
    Ok(lhs - bound)
}

/// Two-sided estimate of the monotonicity of `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityMargins {
    /// `<Jx - Jy, x - y>`
    pub pairing: f64,
    /// `pairing - (2L)^{-1} δ(||x-y|| / C₂)`
    pub lower_margin: f64,
    /// `(2L)^{-1} ρ(8 C₂ L ||x-y||) - pairing`
    pub upper_margin: f64,
}

pub fn check_duality_monotonicity(
    x: &PrimalVec,
    y: &PrimalVec,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<MonotonicityMargins> {
    s.check_len(x.dim())?;
    s.check_len(y.dim())?;
    let p = s.p;
    let jx = duality_raw(x.as_slice(), p);
    let jy = duality_raw(y.as_slice(), p);
    let dj: Vec<f64> = jx.iter().zip(&jy).map(|(a, b)| a - b).collect();
    let d = x.sub(y);
    let pairing = dot(&dj, d.as_slice());
    let dist = pnorm(d.as_slice(), p);
    let c2 = mean_square_scale(pnorm(x.as_slice(), p), pnorm(y.as_slice(), p));
    let l = c.figiel_l;
    let lower = convexity_lower_unchecked((dist / c2).min(2.0), p) / (2.0 * l);
    let upper = modulus_smoothness_upper(8.0 * c2 * l * dist, s)? / (2.0 * l);
    Ok(MonotonicityMargins {
        pairing,
        lower_margin: pairing - lower,
        upper_margin: upper - pairing,
    })
}
