//! Iterative schemes built on the projections: successive generalized
//! projections for convex feasibility, projection iterations for monotone
//! variational inequalities, the unconstrained duality iteration, three
//! subgradient schemes, and a set-perturbation stability experiment.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::convex_sets::{generalized_project_dual, metric_project, Halfspace, SetDescriptor};
use crate::error::{Error, Result};
use crate::lp_geometry::{
    dot, duality_raw, modulus_convexity_lower_inverse, pnorm, DualVec, GeometryConstants, LpSpace,
    PrimalVec,
};
use crate::lyapunov::v2_raw;
use crate::projections::{project_generalized_big_pi, PropertyMargins};

/// Tolerance on the smallest eigenvalue of the symmetric part of `M`.
pub const MONOTONICITY_TOL: f64 = 1e-10;

/// Monotone operators `A: B → B*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneOperator {
    /// `x ↦ Mx + b`, rows of `M` stored in `matrix`.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: DualVec,
    },
    /// The duality map `J` itself.
    Duality,
}

impl MonotoneOperator {
    /// Builds `x ↦ Mx + b`, rejecting `M` whose symmetric part has an
    /// eigenvalue below `-1e-10`.
    pub fn affine(matrix: Vec<Vec<f64>>, offset: DualVec) -> Result<Self> {
        let n = offset.dim();
        if matrix.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        let min = min_symmetric_eigenvalue(&matrix);
        if !(min >= -MONOTONICITY_TOL) {
            return Err(Error::NotMonotone(min));
        }
        Ok(MonotoneOperator::Affine { matrix, offset })
    }

    pub fn identity(dim: usize) -> Self {
        let matrix = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        MonotoneOperator::Affine {
            matrix,
            offset: DualVec::zeros(dim),
        }
    }

    pub fn apply(&self, x: &[f64], p: f64) -> Vec<f64> {
        match self {
            MonotoneOperator::Affine { matrix, offset } => matrix
                .iter()
                .zip(offset.as_slice())
                .map(|(row, b)| dot(row, x) + b)
                .collect(),
            MonotoneOperator::Duality => duality_raw(x, p),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            MonotoneOperator::Affine { offset, .. } => Some(offset.dim()),
            MonotoneOperator::Duality => None,
        }
    }
}

/// Smallest eigenvalue of `(M + Mᵀ)/2`.
pub fn min_symmetric_eigenvalue(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    if n == 0 {
        return 0.0;
    }
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (matrix[i][j] + matrix[j][i]));
    SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Find `x ∈ Ω` with `<Ax - f, ξ - x> ≥ 0` for all `ξ ∈ Ω`; `Ω = None` is
/// the whole space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VIProblem {
    pub operator: MonotoneOperator,
    pub target: DualVec,
    pub feasible_set: Option<SetDescriptor>,
}

impl VIProblem {
    pub fn new(
        operator: MonotoneOperator,
        target: DualVec,
        feasible_set: Option<SetDescriptor>,
    ) -> Result<Self> {
        let n = target.dim();
        if let Some(d) = operator.dim() {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d,
                });
            }
        }
        if let Some(d) = feasible_set.as_ref().and_then(|o| o.dim()) {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d,
                });
            }
        }
        Ok(Self {
            operator,
            target,
            feasible_set,
        })
    }

    /// `Ax - f`
    pub fn residual(&self, x: &[f64], p: f64) -> Vec<f64> {
        self.operator
            .apply(x, p)
            .iter()
            .zip(self.target.as_slice())
            .map(|(a, f)| a - f)
            .collect()
    }

    /// `min_{ξ ∈ Ω} <Ax - f, ξ - x>` for boxes and balls; for affine sets the
    /// negated KKT residual. Nonnegative exactly at solutions.
    pub fn vi_residual(&self, x: &[f64], s: &LpSpace) -> f64 {
        let g = self.residual(x, s.p());
        match &self.feasible_set {
            Some(omega) => {
                let neg: Vec<f64> = g.iter().map(|v| -v).collect();
                -omega.vi_violation(&neg, x, s)
            }
            None => -pnorm(&g, s.q()),
        }
    }

    fn check(&self, s: &LpSpace) -> Result<()> {
        s.check_len(self.target.dim())?;
        if let Some(o) = &self.feasible_set {
            o.check_space(s)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    pub kind: ScheduleKind,
    pub alpha0: f64,
}

impl StepSchedule {
    pub fn new(kind: ScheduleKind, alpha0: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(Error::Precondition(format!(
                "alpha0 must be positive, got {alpha0}"
            )));
        }
        Ok(Self { kind, alpha0 })
    }

    pub fn constant(alpha0: f64) -> Result<Self> {
        Self::new(ScheduleKind::Constant, alpha0)
    }

    pub fn harmonic(alpha0: f64) -> Result<Self> {
        Self::new(ScheduleKind::Harmonic, alpha0)
    }

    pub fn alpha(&self, n: usize) -> f64 {
        match self.kind {
            ScheduleKind::Constant => self.alpha0,
            ScheduleKind::Harmonic => self.alpha0 / (n as f64 + 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Divergence is declared once `||x_n|| > factor · (1 + ||x_0||)`.
    pub divergence_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-10,
            divergence_factor: 1e6,
        }
    }
}

impl SolverOptions {
    pub fn new(max_iter: usize, tol: f64) -> Self {
        Self {
            max_iter,
            tol,
            ..Self::default()
        }
    }
}

/// One iterate `x_n` and the quantities monitored at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub n: usize,
    pub x: PrimalVec,
    /// `||x_n - x_{n+1}||`
    pub step_norm: f64,
    /// `V2(Jx_n, ξ_ref)`
    pub v2_to_ref: Option<f64>,
    pub fixed_point_residual: Option<f64>,
    pub vi_residual: Option<f64>,
    /// `u(x_n) - u*` (or `u(x_n)` without `u*`) for the subgradient schemes.
    pub objective: Option<f64>,
}

/// Where an iteration left the divergence bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEvent {
    pub iteration: usize,
    pub norm: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterTrace {
    pub records: Vec<TraceRecord>,
    pub converged: bool,
    pub divergence: Option<DivergenceEvent>,
    pub iterations: usize,
    /// Last iterate produced (the image of the last recorded point).
    pub solution: PrimalVec,
    /// `V2(Jx_k, x_{k+1})` for every elementary projection of the
    /// alternating scheme, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elementary_gaps: Vec<f64>,
}

impl IterTrace {
    fn new(x0: &PrimalVec) -> Self {
        Self {
            records: Vec::new(),
            converged: false,
            divergence: None,
            iterations: 0,
            solution: x0.clone(),
            elementary_gaps: Vec::new(),
        }
    }

    fn finish(mut self, solution: Vec<f64>) -> Self {
        self.iterations = self.records.len();
        self.solution = PrimalVec::new(solution);
        self
    }

    /// Turns a diverged run into [`Error::Divergence`].
    pub fn check_divergence(&self) -> Result<()> {
        match self.divergence {
            None => Ok(()),
            Some(e) => Err(Error::Divergence {
                iteration: e.iteration,
                norm: e.norm,
                bound: e.bound,
            }),
        }
    }
}

fn dist(a: &[f64], b: &[f64], p: f64) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    pnorm(&d, p)
}

fn v2_at(x: &[f64], xi: &[f64], p: f64) -> f64 {
    v2_raw(x, &duality_raw(x, p), pnorm(x, p), xi, p)
}

struct DivergenceGuard {
    bound: f64,
    p: f64,
}

impl DivergenceGuard {
    fn new(x0: &PrimalVec, s: &LpSpace, opts: &SolverOptions) -> Self {
        Self {
            bound: opts.divergence_factor * (1.0 + pnorm(x0.as_slice(), s.p())),
            p: s.p(),
        }
    }

    fn check(&self, x: &[f64], iteration: usize) -> Option<DivergenceEvent> {
        let norm = pnorm(x, self.p);
        (!(norm <= self.bound)).then_some(DivergenceEvent {
            iteration,
            norm,
            bound: self.bound,
        })
    }
}

/// Successive generalized projections `x_{n+1} = Π_1 Π_2 ⋯ Π_m x_n`,
/// applying `Π_m` first.
///
/// With a `reference` point of the intersection, records `V2(Jx_n, ξ_ref)`
/// and fails with [`Error::InfeasibleInstance`] if it increases by more
/// than `1e-10 · max(1, V2)` over a sweep. Stops once
/// `||x_n - x_{n+1}|| ≤ tol`.
pub fn alternating_generalized_projections(
    sets: &[SetDescriptor],
    x0: &PrimalVec,
    reference: Option<&PrimalVec>,
    s: &LpSpace,
    c: &GeometryConstants,
    opts: &SolverOptions,
) -> Result<IterTrace> {
    if sets.is_empty() {
        return Err(Error::Precondition("need at least one set".into()));
    }
    s.check_len(x0.dim())?;
    for o in sets {
        o.check_space(s)?;
    }
    if let Some(r) = reference {
        s.check_len(r.dim())?;
    }
    let p = s.p();
    let mut trace = IterTrace::new(x0);
    let guard = DivergenceGuard::new(x0, s, opts);
    let mut x = x0.as_slice().to_vec();
    let v2_ref = |x: &[f64]| reference.map(|r| v2_at(x, r.as_slice(), p));
    let mut v_prev = v2_ref(&x);
    for n in 0..opts.max_iter {
        let mut y = x.clone();
        for omega in sets.iter().rev() {
            let jy = DualVec::new(duality_raw(&y, p));
            let next = generalized_project_dual(omega, &jy, s, c)?
                .point
                .into_inner();
            trace.elementary_gaps.push(v2_at(&y, &next, p));
            y = next;
        }
        let step = dist(&x, &y, p);
        trace.records.push(TraceRecord {
            n,
            x: PrimalVec::new(x.clone()),
            step_norm: step,
            v2_to_ref: v_prev,
            fixed_point_residual: Some(step),
            vi_residual: None,
            objective: None,
        });
        let v_next = v2_ref(&y);
        if let (Some(a), Some(b)) = (v_prev, v_next) {
            if b > a + 1e-10 * a.max(1.0) {
                return Err(Error::InfeasibleInstance {
                    sweep: n,
                    increase: b - a,
                });
            }
        }
        v_prev = v_next;
        x = y;
        trace.divergence = guard.check(&x, n + 1);
        if trace.divergence.is_some() {
            break;
        }
        if step <= opts.tol {
            trace.converged = true;
            break;
        }
    }
    Ok(trace.finish(x))
}

/// Shared driver for the one-step iterations `x_{n+1} = T_α(x_n)`.
fn run_fixed_point<T>(
    prob: &VIProblem,
    x0: &PrimalVec,
    sched: &StepSchedule,
    reference: Option<&PrimalVec>,
    s: &LpSpace,
    opts: &SolverOptions,
    mut step_map: T,
) -> Result<IterTrace>
where
    T: FnMut(&[f64], f64) -> Result<Vec<f64>>,
{
    prob.check(s)?;
    s.check_len(x0.dim())?;
    let p = s.p();
    let mut trace = IterTrace::new(x0);
    let guard = DivergenceGuard::new(x0, s, opts);
    let mut x = x0.as_slice().to_vec();
    for n in 0..opts.max_iter {
        let alpha = sched.alpha(n);
        let next = step_map(&x, alpha)?;
        let step = dist(&x, &next, p);
        let fpr = if alpha == sched.alpha0 {
            step
        } else {
            dist(&x, &step_map(&x, sched.alpha0)?, p)
        };
        trace.records.push(TraceRecord {
            n,
            x: PrimalVec::new(x.clone()),
            step_norm: step,
            v2_to_ref: reference.map(|r| v2_at(&x, r.as_slice(), p)),
            fixed_point_residual: Some(fpr),
            vi_residual: Some(prob.vi_residual(&x, s)),
            objective: None,
        });
        if fpr <= opts.tol {
            trace.converged = true;
            break;
        }
        x = next;
        trace.divergence = guard.check(&x, n + 1);
        if trace.divergence.is_some() {
            break;
        }
    }
    Ok(trace.finish(x))
}

fn require_set(prob: &VIProblem) -> Result<&SetDescriptor> {
    prob.feasible_set
        .as_ref()
        .ok_or_else(|| Error::Precondition("the iteration needs a feasible set".into()))
}

/// `x_{n+1} = π_Ω(Jx_n - α_n (Ax_n - f))`.
///
/// The fixed-point residual is `||x_n - π_Ω(Jx_n - α_0(Ax_n - f))||`; a
/// run converges once it drops to `tol`.
pub fn vi_iterate_generalized(
    prob: &VIProblem,
    x0: &PrimalVec,
    sched: &StepSchedule,
    reference: Option<&PrimalVec>,
    s: &LpSpace,
    c: &GeometryConstants,
    opts: &SolverOptions,
) -> Result<IterTrace> {
    let omega = require_set(prob)?;
    let p = s.p();
    run_fixed_point(prob, x0, sched, reference, s, opts, |x, alpha| {
        let jx = duality_raw(x, p);
        let r = prob.residual(x, p);
        let phi: Vec<f64> = jx.iter().zip(&r).map(|(a, b)| a - alpha * b).collect();
        Ok(generalized_project_dual(omega, &DualVec::new(phi), s, c)?
            .point
            .into_inner())
    })
}

/// `x_{n+1} = P_Ω(x_n - α_n J*(Ax_n - f))`. No convergence is claimed for
/// `p ≠ 2`; the run is data.
pub fn vi_iterate_metric(
    prob: &VIProblem,
    x0: &PrimalVec,
    sched: &StepSchedule,
    reference: Option<&PrimalVec>,
    s: &LpSpace,
    c: &GeometryConstants,
    opts: &SolverOptions,
) -> Result<IterTrace> {
    let omega = require_set(prob)?;
    let (p, q) = (s.p(), s.q());
    run_fixed_point(prob, x0, sched, reference, s, opts, |x, alpha| {
        let r = duality_raw(&prob.residual(x, p), q);
        let y: Vec<f64> = x.iter().zip(&r).map(|(a, b)| a - alpha * b).collect();
        Ok(metric_project(omega, &PrimalVec::new(y), s, c)?
            .point
            .into_inner())
    })
}

/// `Jx_{n+1} = Jx_n - α_n (Ax_n - f)` on the whole space.
pub fn unconstrained_duality_iteration(
    prob: &VIProblem,
    x0: &PrimalVec,
    sched: &StepSchedule,
    reference: Option<&PrimalVec>,
    s: &LpSpace,
    opts: &SolverOptions,
) -> Result<IterTrace> {
    if prob.feasible_set.is_some() {
        return Err(Error::Precondition(
            "the unconstrained iteration needs the whole space".into(),
        ));
    }
    let (p, q) = (s.p(), s.q());
    run_fixed_point(prob, x0, sched, reference, s, opts, |x, alpha| {
        let jx = duality_raw(x, p);
        let r = prob.residual(x, p);
        let phi: Vec<f64> = jx.iter().zip(&r).map(|(a, b)| a - alpha * b).collect();
        Ok(duality_raw(&phi, q))
    })
}

/// A convex functional with a subgradient oracle; subgradients are dual
/// elements.
pub trait ConvexFunctional {
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
}

/// `u(x) = ||x - z||²₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistance {
    pub center: Vec<f64>,
}

impl ConvexFunctional for SquaredDistance {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .map(|(a, b)| 2.0 * (a - b))
            .collect()
    }
}

/// `u(x) = max_i x_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxCoordinate;

impl ConvexFunctional for MaxCoordinate {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let k = (0..x.len())
            .max_by(|&i, &j| x[i].total_cmp(&x[j]))
            .unwrap_or(0);
        let mut g = vec![0.0; x.len()];
        if !g.is_empty() {
            g[k] = 1.0;
        }
        g
    }
}

/// `u(x) = ||x - z||₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Distance {
    pub center: Vec<f64>,
}

impl ConvexFunctional for L1Distance {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, b)| (a - b).abs()).sum()
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .map(|(a, b)| {
                let d = a - b;
                if d == 0.0 {
                    0.0
                } else {
                    d.signum()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgradientScheme {
    /// `π_Ω(Jx - α (Ax - f)/||Ax - f||_*)` with `A = ∂u`, `f = 0`.
    NormalizedResidual,
    /// `π_Ω(Jx - α ∂u(x)/||∂u(x)||_*)`.
    NormalizedSubgradient,
    /// `π_Ω(Jx - α (u(x) - u*) ∂u(x)/||∂u(x)||²_*)`.
    Polyak,
}

/// Minimizes `u` over `Ω` with one of the subgradient schemes.
///
/// A zero subgradient stops the run as converged. With `u_star` known the
/// run also stops once `u(x_n) - u* ≤ tol`, and that gap is reported as the
/// fixed-point residual; otherwise the step norm is.
#[allow(clippy::too_many_arguments)]
pub fn subgradient_minimize<U: ConvexFunctional + ?Sized>(
    u: &U,
    u_star: Option<f64>,
    scheme: SubgradientScheme,
    omega: &SetDescriptor,
    x0: &PrimalVec,
    sched: &StepSchedule,
    s: &LpSpace,
    c: &GeometryConstants,
    opts: &SolverOptions,
) -> Result<IterTrace> {
    if scheme == SubgradientScheme::Polyak && u_star.is_none() {
        return Err(Error::Precondition("the Polyak step needs u*".into()));
    }
    omega.check_space(s)?;
    s.check_len(x0.dim())?;
    let (p, q) = (s.p(), s.q());
    let mut trace = IterTrace::new(x0);
    let guard = DivergenceGuard::new(x0, s, opts);
    let mut x = x0.as_slice().to_vec();
    for n in 0..opts.max_iter {
        let val = u.value(&x);
        let gap = u_star.map(|us| val - us);
        let g = u.subgradient(&x);
        let gn = pnorm(&g, q);
        let alpha = sched.alpha(n);
        let weight = match scheme {
            _ if gn == 0.0 => 0.0,
            SubgradientScheme::NormalizedResidual | SubgradientScheme::NormalizedSubgradient => {
                alpha / gn
            }
            SubgradientScheme::Polyak => alpha * gap.unwrap_or(0.0).max(0.0) / (gn * gn),
        };
        let next = if weight == 0.0 {
            x.clone()
        } else {
            let jx = duality_raw(&x, p);
            let phi: Vec<f64> = jx.iter().zip(&g).map(|(a, b)| a - weight * b).collect();
            generalized_project_dual(omega, &DualVec::new(phi), s, c)?
                .point
                .into_inner()
        };
        let step = dist(&x, &next, p);
        let done = gn == 0.0 || gap.map_or(step <= opts.tol, |d| d <= opts.tol);
        trace.records.push(TraceRecord {
            n,
            x: PrimalVec::new(x.clone()),
            step_norm: step,
            v2_to_ref: None,
            fixed_point_residual: Some(gap.unwrap_or(step)),
            vi_residual: None,
            objective: Some(gap.unwrap_or(val)),
        });
        if done {
            trace.converged = true;
            break;
        }
        x = next;
        trace.divergence = guard.check(&x, n + 1);
        if trace.divergence.is_some() {
            break;
        }
    }
    Ok(trace.finish(x))
}

/// Result of perturbing a halfspace to a parallel one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Hausdorff distance between the two sets.
    pub sigma: f64,
    /// `||x̂₁ - x̂₂||`
    pub distance: f64,
    /// `C₁ δ⁻¹(4L C₂ σ)`
    pub bound: f64,
    pub margin: f64,
    /// `distance / σ`; absent at `σ = 0`.
    pub ratio: Option<f64>,
}

impl StabilityReport {
    pub fn margins(&self) -> PropertyMargins {
        let mut m = PropertyMargins::new();
        m.insert("g6", self.margin);
        m
    }
}

/// Projects `x` onto both halfspaces with `Π` and compares the distance of
/// the results to `C₁ δ⁻¹(4L C₂ σ)` with `C₁ = 2 max{1, ||x̂₁||, ||x̂₂||}`,
/// `C₂ = 2 max{||Jx - Jx̂₁||_*, ||Jx - Jx̂₂||_*}`.
pub fn stability_experiment(
    h1: &Halfspace,
    h2: &Halfspace,
    x: &PrimalVec,
    s: &LpSpace,
    c: &GeometryConstants,
) -> Result<StabilityReport> {
    let sigma = crate::convex_sets::hausdorff_parallel_halfspaces(h1, h2, s)?;
    let (p, q) = (s.p(), s.q());
    let o1 = SetDescriptor::Halfspace(h1.clone());
    let o2 = SetDescriptor::Halfspace(h2.clone());
    let a = project_generalized_big_pi(x, &o1, s, c)?.point;
    let b = project_generalized_big_pi(x, &o2, s, c)?.point;
    let distance = dist(a.as_slice(), b.as_slice(), p);
    let jx = duality_raw(x.as_slice(), p);
    let dual_gap = |v: &PrimalVec| dist(&jx, &duality_raw(v.as_slice(), p), q);
    let c1 = 2.0 * 1f64.max(pnorm(a.as_slice(), p)).max(pnorm(b.as_slice(), p));
    let c2 = 2.0 * dual_gap(&a).max(dual_gap(&b));
    let bound = c1 * modulus_convexity_lower_inverse(4.0 * c.figiel_l * c2 * sigma, s);
    Ok(StabilityReport {
        sigma,
        distance,
        bound,
        margin: bound - distance,
        ratio: (sigma > 0.0).then(|| distance / sigma),
    })
}
