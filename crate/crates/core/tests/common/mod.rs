//! Brute-force projection oracle for the plane: a dense grid to locate the
//! minimizer, then bisection on the sign of a directional derivative.
//! Shares no code with the library's projection routines.
#![allow(dead_code)]

use genproj::convex_sets::SetDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `Σ |ξᵢ - xᵢ|^p`, the p-th power of the distance.
    Metric,
    /// `||ξ||² - 2<Jx, ξ>`.
    Generalized,
}

pub fn norm(v: &[f64], p: f64) -> f64 {
    v.iter().map(|a| a.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `J v = ||v||^{2-p} (|vᵢ|^{p-1} sign vᵢ)`.
pub fn jmap(v: &[f64], p: f64) -> Vec<f64> {
    let n = norm(v, p);
    if n == 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter()
        .map(|a| n.powf(2.0 - p) * a.abs().powf(p - 1.0) * a.signum())
        .collect()
}

pub fn value(obj: Objective, x: &[f64], xi: &[f64], p: f64) -> f64 {
    match obj {
        Objective::Metric => x.iter().zip(xi).map(|(a, b)| (b - a).abs().powf(p)).sum(),
        Objective::Generalized => {
            let jx = jmap(x, p);
            let n = norm(xi, p);
            n * n - 2.0 * jx.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>()
        }
    }
}

pub fn gradient(obj: Objective, x: &[f64], xi: &[f64], p: f64) -> Vec<f64> {
    match obj {
        Objective::Metric => x
            .iter()
            .zip(xi)
            .map(|(a, b)| p * (b - a).abs().powf(p - 1.0) * (b - a).signum())
            .collect(),
        Objective::Generalized => {
            let jx = jmap(x, p);
            jmap(xi, p)
                .iter()
                .zip(&jx)
                .map(|(a, b)| 2.0 * (a - b))
                .collect()
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Root of a nondecreasing `d` on `[lo, hi]`, clamped to the ends.
fn bisect<F: Fn(f64) -> f64>(d: F, mut lo: f64, mut hi: f64) -> f64 {
    if d(lo) >= 0.0 {
        return lo;
    }
    if d(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if d(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn grid_argmin<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> usize {
    (0..=n)
        .map(|k| f(lo + (hi - lo) * k as f64 / n as f64))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
        .unwrap()
}

fn on_line(n: &[f64], c: f64, x: &[f64], p: f64, obj: Objective) -> Vec<f64> {
    let nn = dot(n, n);
    let base = [c * n[0] / nn, c * n[1] / nn];
    let len = nn.sqrt();
    let v = [-n[1] / len, n[0] / len];
    let at = |t: f64| [base[0] + t * v[0], base[1] + t * v[1]];
    let span = 8.0 * (norm(x, 2.0) + norm(&base, 2.0) + 1.0);
    let f = |t: f64| value(obj, x, &at(t), p);
    let cells = 2000;
    let k = grid_argmin(f, -span, span, cells);
    let h = 2.0 * span / cells as f64;
    let t0 = -span + h * k as f64;
    let d = |t: f64| dot(&gradient(obj, x, &at(t), p), &v);
    at(bisect(d, t0 - h, t0 + h)).to_vec()
}

fn in_box(lo: &[f64], hi: &[f64], x: &[f64], p: f64, obj: Objective) -> Vec<f64> {
    let inner = |a: f64| -> f64 {
        bisect(|b| gradient(obj, x, &[a, b], p)[1], lo[1], hi[1])
    };
    let a = bisect(|a| gradient(obj, x, &[a, inner(a)], p)[0], lo[0], hi[0]);
    vec![a, inner(a)]
}

fn on_sphere(r: f64, x: &[f64], p: f64, obj: Objective) -> Vec<f64> {
    let at = |th: f64| {
        let u = [th.cos(), th.sin()];
        let s = r / norm(&u, p);
        [s * u[0], s * u[1]]
    };
    let tau = std::f64::consts::TAU;
    let cells = 3600;
    let h = tau / cells as f64;
    let k = grid_argmin(|th| value(obj, x, &at(th), p), 0.0, tau, cells);
    let t0 = h * k as f64;
    let d = |th: f64| {
        let e = 1e-7;
        let (a, b) = (at(th + e), at(th - e));
        let tangent = [(a[0] - b[0]) / (2.0 * e), (a[1] - b[1]) / (2.0 * e)];
        dot(&gradient(obj, x, &at(th), p), &tangent)
    };
    at(bisect(d, t0 - h, t0 + h)).to_vec()
}

fn member(set: &SetDescriptor, x: &[f64], p: f64) -> bool {
    match set {
        SetDescriptor::Halfspace(h) => dot(h.normal.as_slice(), x) <= h.offset,
        SetDescriptor::Hyperplane(h) => dot(h.normal.as_slice(), x) == h.offset,
        SetDescriptor::Box(b) => x
            .iter()
            .enumerate()
            .all(|(i, v)| *v >= b.lo.as_slice()[i] && *v <= b.hi.as_slice()[i]),
        SetDescriptor::Ball(b) => norm(x, p) <= b.radius,
    }
}

/// Minimizer of `obj` over `set` in the plane.
pub fn project(set: &SetDescriptor, x: &[f64], p: f64, obj: Objective) -> Vec<f64> {
    assert_eq!(x.len(), 2);
    if member(set, x, p) {
        return x.to_vec();
    }
    match set {
        SetDescriptor::Halfspace(h) => on_line(h.normal.as_slice(), h.offset, x, p, obj),
        SetDescriptor::Hyperplane(h) => on_line(h.normal.as_slice(), h.offset, x, p, obj),
        SetDescriptor::Box(b) => in_box(b.lo.as_slice(), b.hi.as_slice(), x, p, obj),
        SetDescriptor::Ball(b) => on_sphere(b.radius, x, p, obj),
    }
}

/// A random set of the given kind (0 halfspace, 1 hyperplane, 2 box,
/// 3 ball) and a point, all with coordinates of order one.
pub fn random_instance<R: rand::Rng>(rng: &mut R, kind: usize) -> (SetDescriptor, Vec<f64>) {
    let mut draw = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    let normal = loop {
        let n = vec![draw(-2.0, 2.0), draw(-2.0, 2.0)];
        if norm(&n, 2.0) > 0.1 {
            break n;
        }
    };
    let set = match kind {
        0 => SetDescriptor::halfspace(normal, draw(-1.0, 1.0)),
        1 => SetDescriptor::hyperplane(normal, draw(-1.0, 1.0)),
        2 => {
            let lo = vec![draw(-1.5, 0.5), draw(-1.5, 0.5)];
            let hi = vec![lo[0] + draw(0.1, 2.0), lo[1] + draw(0.1, 2.0)];
            SetDescriptor::boxed(lo, hi)
        }
        _ => SetDescriptor::ball(draw(0.2, 2.0)),
    }
    .unwrap();
    let x = vec![draw(-3.0, 3.0), draw(-3.0, 3.0)];
    (set, x)
}
