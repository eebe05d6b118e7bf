//! Inequality sweeps: sample inputs per check label, evaluate the margin of
//! the corresponding property and keep the worst case.
//!
//! Every reported margin is normalized by a scale of the inputs, so
//! `-1e-10` means a relative violation of `1e-10`. Identity checks report
//! minus their relative error.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::generate_feasibility_instance;
use super::report::{ExperimentConfig, ReportRecord};
use super::rng::{rng_from, sample_seed, stream_seed, uniform_vec};
use crate::convex_sets::{generalized_project_dual, metric_project, Halfspace, SetDescriptor};
use crate::error::{Error, Result};
use crate::lp_geometry::{
    check_clarkson, check_duality_monotonicity, check_parallelogram_lower, dot, duality_raw,
    pnorm, DualVec, GeometryConstants, LpSpace, PrimalVec,
};
use crate::lyapunov::{lemma_s2_sandwich, v2, v4, v4_grad_phi, v2_grad_xi};
use crate::projections::{
    check_dual_vp, check_generalized_vp, check_hilbert_vp, check_metric_vp,
    check_strong_uniqueness, check_uniform_continuity, project_generalized_big_pi,
    vp_test_points, PropertyMargins,
};
use crate::solvers::{alternating_generalized_projections, stability_experiment, SolverOptions};

/// Every label accepted by [`run_inequality_sweep`].
pub const CHECK_LABELS: &[&str] = &[
    "duality.pairing",
    "duality.norm",
    "duality.inverse",
    "v2.zero",
    "v2.nonneg",
    "v2.bracket",
    "v2.grad",
    "v4.grad",
    "v2.convex",
    "v2.v4",
    "clarkson",
    "parallelogram",
    "s2",
    "monotonicity",
    "5.c",
    "5.e",
    "f52",
    "5.i",
    "7.b",
    "7.c",
    "7.d",
    "7.e",
    "7.g",
    "7.h",
    "7.i",
    "8.b",
    "8.c",
    "8.d",
    "8.e",
    "8.g",
    "8.h",
    "8.i",
    "f177",
    "f161",
    "s-thm",
    "f55",
    "f59",
    "7.f",
    "8.f",
    "4.b",
    "4.c",
    "4.d",
    "4.e",
    "4.f",
    "4.g",
    "4.h",
    "4.i",
    "g6",
    "g4.1",
    "g4.4",
];

const BOUNDARY_CASES: u64 = 6;
const TEST_POINTS: usize = 8;
const FD_STEP: f64 = 1e-6;
/// Coordinates below this magnitude are moved away from zero before a
/// finite-difference check.
const FD_FLOOR: f64 = 1e-2;
const G4_SWEEPS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    DualityPairing,
    DualityNorm,
    DualityInverse,
    V2Zero,
    V2Nonneg,
    V2Bracket,
    V2Grad,
    V4Grad,
    V2Convex,
    V2V4,
    Clarkson,
    Parallelogram,
    S2,
    Monotonicity,
    Metric,
    Generalized,
    Dual,
    Strong,
    Continuity,
    Hilbert,
    G6,
    G4,
}

fn family(label: &str) -> Result<Family> {
    use Family::*;
    Ok(match label {
        "duality.pairing" => DualityPairing,
        "duality.norm" => DualityNorm,
        "duality.inverse" => DualityInverse,
        "v2.zero" => V2Zero,
        "v2.nonneg" => V2Nonneg,
        "v2.bracket" => V2Bracket,
        "v2.grad" => V2Grad,
        "v4.grad" => V4Grad,
        "v2.convex" => V2Convex,
        "v2.v4" => V2V4,
        "clarkson" => Clarkson,
        "parallelogram" => Parallelogram,
        "s2" => S2,
        "monotonicity" => Monotonicity,
        "5.c" | "5.e" | "f52" | "5.i" => Metric,
        "7.b" | "7.c" | "7.d" | "7.e" | "7.g" | "7.h" | "7.i" => Generalized,
        "8.b" | "8.c" | "8.d" | "8.e" | "8.g" | "8.h" | "8.i" => Dual,
        "f177" | "f161" | "s-thm" => Strong,
        "f55" | "f59" | "7.f" | "8.f" => Continuity,
        "4.b" | "4.c" | "4.d" | "4.e" | "4.f" | "4.g" | "4.h" | "4.i" => Hilbert,
        "g6" => G6,
        "g4.1" | "g4.4" => G4,
        _ => return Err(Error::UnknownCheck(label.to_string())),
    })
}

fn inapplicable(p: f64, requirement: &'static str) -> Error {
    Error::InapplicableExponent { p, requirement }
}

fn check_applicable(label: &str, p: f64) -> Result<()> {
    match label {
        "clarkson" | "f177" | "s-thm" if p < 2.0 => Err(inapplicable(p, "p >= 2")),
        "f161" if p > 2.0 => Err(inapplicable(p, "p <= 2")),
        _ if family(label)? == Family::Hilbert && p != 2.0 => Err(inapplicable(p, "p = 2")),
        _ => Ok(()),
    }
}

/// A sampled input; serialized into [`ReportRecord::worst_case_seed_state`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleInput {
    pub label: String,
    pub p: f64,
    pub dim: usize,
    /// Seed of this sample's own stream.
    pub seed: u64,
    pub x: PrimalVec,
    pub y: PrimalVec,
    pub z: PrimalVec,
    pub t: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<SetDescriptor>,
}

fn random_set<R: Rng>(rng: &mut R, kind: u64, dim: usize) -> Result<SetDescriptor> {
    let nonzero = |rng: &mut R| loop {
        let n = uniform_vec(rng, dim, -2.0, 2.0);
        if n.iter().any(|v| *v != 0.0) {
            break n;
        }
    };
    match kind % 4 {
        0 => SetDescriptor::halfspace(nonzero(rng), rng.gen_range(-1.0..1.0)),
        1 => SetDescriptor::hyperplane(nonzero(rng), rng.gen_range(-1.0..1.0)),
        2 => {
            let lo = uniform_vec(rng, dim, -1.5, 0.5);
            let hi = lo.iter().map(|l| l + rng.gen_range(0.1..2.0)).collect();
            SetDescriptor::boxed(lo, hi)
        }
        _ => SetDescriptor::ball(rng.gen_range(0.2..2.0)),
    }
}

fn single_coordinate<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[rng.gen_range(0..dim)] = rng.gen_range(-2.0..2.0);
    v
}

fn off_zero(v: &mut [f64]) {
    for c in v {
        *c = if *c < 0.0 { *c - FD_FLOOR } else { *c + FD_FLOOR };
    }
}

/// Draws the `index`-th input of `label` under the master `seed`.
pub fn draw_sample(label: &str, p: f64, dim: usize, seed: u64, index: u64) -> Result<SampleInput> {
    let fam = family(label)?;
    let s = LpSpace::new(p, dim)?;
    let own = sample_seed(stream_seed(seed, label), index);
    let mut rng = rng_from(own);
    let mut x = uniform_vec(&mut rng, dim, -2.0, 2.0);
    let mut y = uniform_vec(&mut rng, dim, -2.0, 2.0);
    let mut z = uniform_vec(&mut rng, dim, -2.0, 2.0);
    let t: f64 = rng.gen();
    let mut sets = Vec::new();
    match fam {
        Family::G4 => {
            let m = [2, 3, 5][(index % 3) as usize];
            let inst = generate_feasibility_instance(own, m, dim, &s)?;
            sets = inst.sets;
            z = inst.witness.into_inner();
        }
        Family::G6 => {
            let n = loop {
                let n = uniform_vec(&mut rng, dim, -2.0, 2.0);
                if n.iter().any(|v| *v != 0.0) {
                    break n;
                }
            };
            let c1 = rng.gen_range(-1.0..1.0);
            let sigma = 10f64.powf(-3.0 * t);
            let c2 = c1 + sigma * pnorm(&n, s.q());
            sets = vec![
                SetDescriptor::halfspace(n.clone(), c1)?,
                SetDescriptor::halfspace(n, c2)?,
            ];
        }
        _ => {
            match index {
                0 => {
                    x = vec![0.0; dim];
                    y = vec![0.0; dim];
                }
                1 => x = vec![0.0; dim],
                2 => {
                    x = single_coordinate(&mut rng, dim);
                    y = single_coordinate(&mut rng, dim);
                }
                3 => {
                    y = x.iter().map(|v| v + 1e-9 * rng.gen_range(-1.0..1.0)).collect();
                }
                4 => y = x.clone(),
                5 => x = single_coordinate(&mut rng, dim),
                _ => {}
            }
            debug_assert!(BOUNDARY_CASES == 6);
            if matches!(fam, Family::V2Grad | Family::V4Grad) {
                off_zero(&mut x);
                off_zero(&mut y);
                off_zero(&mut z);
            }
            if matches!(
                fam,
                Family::Metric
                    | Family::Generalized
                    | Family::Dual
                    | Family::Strong
                    | Family::Continuity
                    | Family::Hilbert
            ) {
                sets.push(random_set(&mut rng, index, dim)?);
            }
        }
    }
    Ok(SampleInput {
        label: label.to_string(),
        p,
        dim,
        seed: own,
        x: PrimalVec::new(x),
        y: PrimalVec::new(y),
        z: PrimalVec::new(z),
        t,
        sets,
    })
}

fn max_norm<'a, I: IntoIterator<Item = &'a PrimalVec>>(vs: I, p: f64) -> f64 {
    vs.into_iter()
        .map(|v| pnorm(v.as_slice(), p))
        .fold(1.0, f64::max)
}

fn pick(m: &PropertyMargins, label: &str) -> Result<f64> {
    m.get(label)
        .ok_or_else(|| Error::UnknownCheck(label.to_string()))
}

fn central_difference<F: Fn(&[f64]) -> Result<f64>>(f: F, at: &[f64]) -> Result<Vec<f64>> {
    let mut w = at.to_vec();
    let mut g = Vec::with_capacity(at.len());
    for i in 0..at.len() {
        let h = FD_STEP * at[i].abs().max(1.0);
        w[i] = at[i] + h;
        let up = f(&w)?;
        w[i] = at[i] - h;
        let down = f(&w)?;
        w[i] = at[i];
        g.push((up - down) / (2.0 * h));
    }
    Ok(g)
}

fn rel_inf_error(a: &[f64], b: &[f64]) -> f64 {
    let err = a
        .iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);
    let scale = b.iter().map(|v| v.abs()).fold(1.0, f64::max);
    err / scale
}

fn set_of(input: &SampleInput) -> Result<&SetDescriptor> {
    input
        .sets
        .first()
        .ok_or_else(|| Error::Precondition("sample has no set".into()))
}

/// Normalized margin of `input`'s property; nonnegative when it holds.
pub fn evaluate(input: &SampleInput, c: &GeometryConstants) -> Result<f64> {
    let label = input.label.as_str();
    let fam = family(label)?;
    check_applicable(label, input.p)?;
    let s = LpSpace::new(input.p, input.dim)?;
    let (p, q) = (s.p(), s.q());
    let (x, y, z) = (&input.x, &input.y, &input.z);
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let nx = pnorm(xs, p);
    let ny = pnorm(ys, p);
    let jx = duality_raw(xs, p);
    Ok(match fam {
        Family::DualityPairing => -(dot(&jx, xs) - nx * nx).abs() / (nx * nx).max(1.0),
        Family::DualityNorm => -(pnorm(&jx, q) - nx).abs() / nx.max(1.0),
        Family::DualityInverse => {
            let back = duality_raw(&jx, q);
            -pnorm(&PrimalVec::new(back).sub(x).into_inner(), p) / nx.max(1.0)
        }
        Family::V2Zero => -v2(x, x, &s)?.value,
        Family::V2Nonneg => {
            let v = v2(x, y, &s)?;
            v.value / v.upper_bound.max(1.0)
        }
        Family::V2Bracket => {
            let v = v2(x, y, &s)?;
            (v.value - v.lower_bound).min(v.upper_bound - v.value) / v.upper_bound.max(1.0)
        }
        Family::V2Grad => {
            let g = v2_grad_xi(x, y, &s)?.into_inner();
            let fd = central_difference(|w| Ok(v2(x, &PrimalVec::new(w.to_vec()), &s)?.value), ys)?;
            -rel_inf_error(&fd, &g)
        }
        Family::V4Grad => {
            let phi = DualVec::new(ys.to_vec());
            let g = v4_grad_phi(&phi, z, &s)?.into_inner();
            let fd = central_difference(|w| v4(&DualVec::new(w.to_vec()), z, &s), ys)?;
            -rel_inf_error(&fd, &g)
        }
        Family::V2Convex => {
            let t = input.t;
            let mid = y.scale(t).add(&z.scale(1.0 - t));
            let lhs = v2(x, &mid, &s)?.value;
            let rhs = t * v2(x, y, &s)?.value + (1.0 - t) * v2(x, z, &s)?.value;
            (rhs - lhs) / rhs.max(1.0)
        }
        Family::V2V4 => {
            let a = v2(x, y, &s)?.value;
            let b = v4(&DualVec::new(jx.clone()), y, &s)?;
            -(a - b).abs() / a.max(1.0)
        }
        Family::Clarkson => {
            let scale = 2f64.powf(p - 1.0) * (nx.powf(p) + ny.powf(p));
            check_clarkson(x, y, &s)? / scale.max(1.0)
        }
        Family::Parallelogram => {
            check_parallelogram_lower(x, y, &s, c)? / (2.0 * nx * nx + 2.0 * ny * ny).max(1.0)
        }
        Family::S2 => lemma_s2_sandwich(x, y, &s, c)?.lower_margin / ((nx + ny) * (nx + ny)).max(1.0),
        Family::Monotonicity => {
            check_duality_monotonicity(x, y, &s, c)?.lower_margin
                / ((nx + ny) * (nx + ny)).max(1.0)
        }
        Family::Metric | Family::Strong | Family::Hilbert => {
            let omega = set_of(input)?;
            let xbar = metric_project(omega, x, &s, c)?.point;
            let dir = DualVec::new(duality_raw(xbar.sub(x).scale(-1.0).as_slice(), p));
            let pts = vp_test_points(omega, &xbar, Some(&dir), &s, input.seed, TEST_POINTS);
            let m = max_norm(pts.iter().chain([x, y, &xbar]), p);
            match fam {
                Family::Strong => {
                    let order = (label == "s-thm").then_some(p + 1.0);
                    let mut worst = f64::INFINITY;
                    for xi in &pts {
                        let v = pick(&check_strong_uniqueness(x, &xbar, xi, &s, order)?, label)?;
                        worst = worst.min(v);
                    }
                    worst / m.powf(order.unwrap_or(p).max(2.0))
                }
                _ => {
                    let ybar = metric_project(omega, y, &s, c)?.point;
                    let m = m.max(pnorm(ybar.as_slice(), p));
                    let margins = if fam == Family::Metric {
                        check_metric_vp(x, &xbar, omega, &s, &pts, Some((y, &ybar)))?
                    } else {
                        check_hilbert_vp(x, &xbar, omega, &s, &pts, Some((y, &ybar)))?
                    };
                    let scale = if label == "4.f" { m } else { m * m };
                    pick(&margins, label)? / scale
                }
            }
        }
        Family::Generalized => {
            let omega = set_of(input)?;
            let xhat = project_generalized_big_pi(x, omega, &s, c)?.point;
            let yhat = project_generalized_big_pi(y, omega, &s, c)?.point;
            let jh = duality_raw(xhat.as_slice(), p);
            let dir = DualVec::new(jx.iter().zip(&jh).map(|(a, b)| a - b).collect());
            let pts = vp_test_points(omega, &xhat, Some(&dir), &s, input.seed, TEST_POINTS);
            let m = max_norm(pts.iter().chain([x, y, &xhat, &yhat]), p);
            let margins = check_generalized_vp(x, &xhat, omega, &s, c, &pts, Some((y, &yhat)))?;
            pick(&margins, label)? / (m * m)
        }
        Family::Dual => {
            let omega = set_of(input)?;
            let phi = DualVec::new(xs.to_vec());
            let phi2 = DualVec::new(ys.to_vec());
            let t1 = generalized_project_dual(omega, &phi, &s, c)?.point;
            let t2 = generalized_project_dual(omega, &phi2, &s, c)?.point;
            let jt = duality_raw(t1.as_slice(), p);
            let dir = DualVec::new(xs.iter().zip(&jt).map(|(a, b)| a - b).collect());
            let pts = vp_test_points(omega, &t1, Some(&dir), &s, input.seed, TEST_POINTS);
            let m = max_norm(pts.iter().chain([&t1, &t2]), p)
                .max(pnorm(xs, q))
                .max(pnorm(ys, q));
            let margins = check_dual_vp(&phi, &t1, omega, &s, c, &pts, Some((&phi2, &t2)))?;
            pick(&margins, label)? / (m * m)
        }
        Family::Continuity => {
            let omega = set_of(input)?;
            let m = max_norm([x, y], p);
            pick(&check_uniform_continuity(x, y, omega, &s, c)?, label)? / m
        }
        Family::G6 => {
            let hs: Vec<Halfspace> = input
                .sets
                .iter()
                .filter_map(|o| match o {
                    SetDescriptor::Halfspace(h) => Some(h.clone()),
                    _ => None,
                })
                .collect();
            if hs.len() != 2 {
                return Err(Error::Precondition("g6 needs two halfspaces".into()));
            }
            stability_experiment(&hs[0], &hs[1], x, &s, c)?.margin / nx.max(1.0)
        }
        Family::G4 => {
            let v0 = v2(x, z, &s)?.value;
            let opts = SolverOptions::new(G4_SWEEPS, 1e-12);
            match alternating_generalized_projections(&input.sets, x, Some(z), &s, c, &opts) {
                Err(Error::InfeasibleInstance { increase, .. }) => -increase / v0.max(1.0),
                Err(e) => return Err(e),
                Ok(trace) => {
                    if label == "g4.1" {
                        let vals: Vec<f64> =
                            trace.records.iter().filter_map(|r| r.v2_to_ref).collect();
                        vals.windows(2)
                            .map(|w| w[0] - w[1])
                            .fold(0.0, f64::min)
                            / v0.max(1.0)
                    } else {
                        let total: f64 = trace.elementary_gaps.iter().sum();
                        (v0 - total) / v0.max(1.0)
                    }
                }
            }
        }
    })
}

/// Re-evaluates a serialized worst case.
pub fn replay(state: &serde_json::Value, c: &GeometryConstants) -> Result<f64> {
    let input: SampleInput = serde_json::from_value(state.clone())?;
    evaluate(&input, c)
}

/// Runs one check over `cfg.num_samples` inputs. The first
/// `min(6, num_samples)` inputs of the vector checks are boundary cases:
/// zero vectors, single-coordinate vectors, near-duplicate and equal pairs.
pub fn run_check(label: &str, cfg: &ExperimentConfig, c: &GeometryConstants) -> Result<ReportRecord> {
    cfg.validate()?;
    family(label)?;
    check_applicable(label, cfg.p)?;
    let results: Vec<Result<(f64, SampleInput)>> = (0..cfg.num_samples as u64)
        .into_par_iter()
        .map(|i| {
            let input = draw_sample(label, cfg.p, cfg.dim, cfg.seed, i)?;
            let m = evaluate(&input, c)?;
            // a NaN margin is a failure, never a silent pass
            Ok((if m.is_nan() { f64::NEG_INFINITY } else { m }, input))
        })
        .collect();
    let mut worst: Option<(f64, SampleInput)> = None;
    for r in results {
        let (m, input) = r?;
        if worst.as_ref().is_none_or(|(w, _)| m < *w) {
            worst = Some((m, input));
        }
    }
    let (worst_margin, input) = worst.expect("num_samples >= 1");
    Ok(ReportRecord {
        check_label: label.to_string(),
        samples: cfg.num_samples,
        worst_margin,
        worst_case_seed_state: serde_json::to_value(&input)?,
        passed: worst_margin >= -cfg.tol,
    })
}

pub fn run_inequality_sweep(cfg: &ExperimentConfig, checks: &[&str]) -> Result<Vec<ReportRecord>> {
    cfg.validate()?;
    for l in checks {
        family(l)?;
    }
    let c = GeometryConstants::default();
    checks.iter().map(|l| run_check(l, cfg, &c)).collect()
}
