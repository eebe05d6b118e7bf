//! Bracketed scalar root finding: Illinois regula falsi with a bisection
//! step every fourth iteration.

use crate::error::{Error, Result};

pub(crate) const MAX_ROOT_ITERATIONS: usize = 200;

/// Final bracket of a sign change. `pos` has `f ≥ 0`, `neg` has `f ≤ 0`;
/// an exact zero found during the search lands on `neg`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RootBracket {
    pub pos: f64,
    pub f_pos: f64,
    pub neg: f64,
    pub f_neg: f64,
    pub iterations: usize,
}

impl RootBracket {
    /// The endpoint with the smaller residual.
    pub fn best(&self) -> f64 {
        if self.f_pos.abs() <= self.f_neg.abs() {
            self.pos
        } else {
            self.neg
        }
    }
}

/// Shrinks a bracket with `f(pos) ≥ 0 ≥ f(neg)` until `|f| ≤ f_tol` at an
/// endpoint or the bracket is a few ulps wide.
pub(crate) fn solve_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    pos: f64,
    f_pos: f64,
    neg: f64,
    f_neg: f64,
    f_tol: f64,
) -> Result<RootBracket> {
    let mut b = RootBracket {
        pos,
        f_pos,
        neg,
        f_neg,
        iterations: 0,
    };
    if !(f_pos >= 0.0 && f_neg <= 0.0) {
        return Err(Error::RootFind {
            iterations: 0,
            lo: pos.min(neg),
            hi: pos.max(neg),
            residual: f_pos.min(-f_neg),
        });
    }
    if f_pos <= f_tol || -f_neg <= f_tol {
        return Ok(b);
    }
    // scaled copies used only for interpolation
    let (mut sp, mut sn) = (f_pos, f_neg);
    let mut side = 0i8;
    while b.iterations < MAX_ROOT_ITERATIONS {
        b.iterations += 1;
        let (lo, hi) = (b.pos.min(b.neg), b.pos.max(b.neg));
        let mut c = (sp * b.neg - sn * b.pos) / (sp - sn);
        if !(c > lo && c < hi) || b.iterations % 4 == 0 {
            c = 0.5 * (lo + hi);
        }
        if !(c > lo && c < hi) {
            // no representable point strictly inside
            return Ok(b);
        }
        let fc = f(c);
        if fc.is_nan() {
            return Err(Error::RootFind {
                iterations: b.iterations,
                lo,
                hi,
                residual: fc,
            });
        }
        if fc > 0.0 {
            b.pos = c;
            b.f_pos = fc;
            sp = fc;
            if side == 1 {
                sn *= 0.5;
            }
            side = 1;
        } else {
            b.neg = c;
            b.f_neg = fc;
            sn = fc;
            if side == -1 {
                sp *= 0.5;
            }
            side = -1;
        }
        if fc.abs() <= f_tol {
            return Ok(b);
        }
        let w = (b.pos - b.neg).abs();
        if w <= 4.0 * f64::EPSILON * b.pos.abs().max(b.neg.abs()) || w == 0.0 {
            return Ok(b);
        }
    }
    Err(Error::RootFind {
        iterations: b.iterations,
        lo: b.pos.min(b.neg),
        hi: b.pos.max(b.neg),
        residual: b.f_pos.min(-b.f_neg),
    })
}

/// For a nonincreasing `f` with `f(start) > 0`, walks `start + step·2^k`
/// until the sign flips and returns `(pos, f_pos, neg, f_neg)`.
pub(crate) fn expand_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    start: f64,
    f_start: f64,
    mut step: f64,
) -> Result<(f64, f64, f64, f64)> {
    let (mut pos, mut f_pos) = (start, f_start);
    for k in 0..MAX_ROOT_ITERATIONS {
        let t = start + step;
        let ft = f(t);
        if ft.is_nan() {
            break;
        }
        if ft <= 0.0 {
            return Ok((pos, f_pos, t, ft));
        }
        pos = t;
        f_pos = ft;
        step *= 2.0;
        if k > 0 && !t.is_finite() {
            break;
        }
    }
    Err(Error::RootFind {
        iterations: MAX_ROOT_ITERATIONS,
        lo: start.min(pos),
        hi: start.max(pos),
        residual: f_pos,
    })
}
