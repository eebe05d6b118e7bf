//! Seeded instance generators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{rng_from, stream_seed, uniform_vec};
use crate::convex_sets::{Halfspace, SetDescriptor};
use crate::error::{Error, Result};
use crate::lp_geometry::{
    dot, dual_norm, inverse_duality_map, DualVec, GeometryConstants, LpSpace, PrimalVec,
};
use crate::solvers::{stability_experiment, MonotoneOperator, StabilityReport, VIProblem};

/// Halfspaces `{<nᵢ, ξ> ≤ cᵢ}` sharing the point `witness`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityInstance {
    pub sets: Vec<SetDescriptor>,
    pub witness: PrimalVec,
}

/// Draws a witness in `[-1, 1]^dim` and `m` halfspaces with normals in
/// `[-1, 1]^dim` and `cᵢ = <nᵢ, z> + slackᵢ`, where each slack is 0 or
/// uniform in `(0, 1)` with equal probability.
pub fn generate_feasibility_instance(
    seed: u64,
    m: usize,
    dim: usize,
    s: &LpSpace,
) -> Result<FeasibilityInstance> {
    if m == 0 {
        return Err(Error::Precondition("need at least one halfspace".into()));
    }
    s.check_len(dim)?;
    let mut rng = rng_from(stream_seed(seed, "feasibility"));
    let witness = uniform_vec(&mut rng, dim, -1.0, 1.0);
    let mut sets = Vec::with_capacity(m);
    while sets.len() < m {
        let normal = uniform_vec(&mut rng, dim, -1.0, 1.0);
        if normal.iter().all(|v| *v == 0.0) {
            continue;
        }
        let slack = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.0..1.0)
        };
        let offset = dot(&normal, &witness) + slack;
        sets.push(SetDescriptor::halfspace(normal, offset)?);
    }
    Ok(FeasibilityInstance {
        sets,
        witness: PrimalVec::new(witness),
    })
}

/// A starting point in `[-2, 2]^dim` for the given seed.
pub fn generate_start(seed: u64, dim: usize) -> PrimalVec {
    let mut rng = rng_from(stream_seed(seed, "start"));
    PrimalVec::new(uniform_vec(&mut rng, dim, -2.0, 2.0))
}

/// A monotone VI on a random box `Π [loᵢ, hiᵢ]` with `loᵢ ∈ [-1.5, -0.5]`,
/// `hiᵢ ∈ [0.5, 1.5]`.
///
/// With `identity_shift` the operator is `x ↦ x + b`; in `l²` the solution
/// is then `P_box(f - b)`, returned as the reference. Otherwise
/// `M = QᵀQ + (S - Sᵀ)` with `Q`, `S` entries uniform in `[-1, 1]/√dim`,
/// and no reference is returned.
pub fn generate_monotone_vi_instance(
    seed: u64,
    dim: usize,
    s: &LpSpace,
    identity_shift: bool,
) -> Result<(VIProblem, Option<PrimalVec>)> {
    s.check_len(dim)?;
    let mut rng = rng_from(stream_seed(seed, "vi"));
    let lo = uniform_vec(&mut rng, dim, -1.5, -0.5);
    let hi = uniform_vec(&mut rng, dim, 0.5, 1.5);
    let b = uniform_vec(&mut rng, dim, -1.0, 1.0);
    let f = uniform_vec(&mut rng, dim, -2.0, 2.0);
    let omega = SetDescriptor::boxed(lo.clone(), hi.clone())?;
    let matrix: Vec<Vec<f64>> = if identity_shift {
        (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    } else {
        let scale = 1.0 / (dim as f64).sqrt();
        let q: Vec<Vec<f64>> = (0..dim)
            .map(|_| uniform_vec(&mut rng, dim, -scale, scale))
            .collect();
        let sk: Vec<Vec<f64>> = (0..dim)
            .map(|_| uniform_vec(&mut rng, dim, -scale, scale))
            .collect();
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let gram: f64 = (0..dim).map(|k| q[k][i] * q[k][j]).sum();
                        gram + sk[i][j] - sk[j][i]
                    })
                    .collect()
            })
            .collect()
    };
    let operator = MonotoneOperator::affine(matrix, DualVec::new(b.clone()))?;
    let prob = VIProblem::new(operator, DualVec::new(f.clone()), Some(omega))?;
    let reference = (identity_shift && s.is_hilbert()).then(|| {
        PrimalVec::new(
            (0..dim)
                .map(|i| (f[i] - b[i]).clamp(lo[i], hi[i]))
                .collect(),
        )
    });
    Ok((prob, reference))
}

/// Projects one point with `Π` onto a random halfspace `<n, ξ> ≤ c` and
/// onto each shift `<n, ξ> ≤ c + σ||n||_*`, which lies at Hausdorff
/// distance `σ`. The point starts at distance `1 + max σ` outside the
/// original halfspace.
pub fn stability_sweep(
    seed: u64,
    sigmas: &[f64],
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<Vec<StabilityReport>> {
    if sigmas.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Precondition(
            "sigma values must be finite and nonnegative".into(),
        ));
    }
    let dim = s.dim();
    let mut rng = rng_from(stream_seed(seed, "stability"));
    let normal = loop {
        let n = uniform_vec(&mut rng, dim, -1.0, 1.0);
        if n.iter().any(|v| *v != 0.0) {
            break DualVec::new(n);
        }
    };
    let nq = dual_norm(&normal, s)?;
    let offset = rng.gen_range(-1.0..1.0);
    let base = PrimalVec::new(uniform_vec(&mut rng, dim, -1.0, 1.0));
    // <n, J*(n / ||n||_*)> = ||n||_*
    let dir = inverse_duality_map(&normal.scale(1.0 / nq), s)?;
    let excess = normal.pair(&base) - offset;
    let top = sigmas.iter().copied().fold(0.0, f64::max);
    let x = base.axpy(((top + 1.0) * nq - excess).max(0.0) / nq, &dir);
    let h1 = Halfspace::new(normal.clone(), offset)?;
    sigmas
        .iter()
        .map(|&sigma| {
            let h2 = Halfspace::new(normal.clone(), offset + sigma * nq)?;
            stability_experiment(&h1, &h2, &x, s, c)
        })
        .collect()
}
