//! Roots of strictly increasing scalar functions on the positive half line.

use crate::error::{Error, Result};

const MAX_BRACKET_STEPS: usize = 2100;
const MAX_ITER: usize = 400;

/// Solves `f(s) = target` for `s > 0`, where `f` is strictly increasing and
/// `df` returns `(f(s), f'(s))`.
///
/// The initial bracket `[lo, hi]` is grown geometrically until it encloses the
/// root, then refined by Newton steps that fall back to bisection whenever a
/// step would leave the current bracket.
pub fn solve_increasing<F>(df: F, target: f64, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    if !(target.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidInput(format!(
            "bad root-finding setup: target {target}, bracket [{lo}, {hi}]"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut steps = 0;
    while df(lo).0 > target {
        lo *= 0.5;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || lo == 0.0 {
            return Err(Error::Numerical("could not bracket root from below".into()));
        }
    }
    while df(hi).0 < target {
        hi *= 2.0;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
            return Err(Error::Numerical("could not bracket root from above".into()));
        }
    }
    let mut x = if df(lo).0 == target {
        return Ok(lo);
    } else if df(hi).0 == target {
        return Ok(hi);
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..MAX_ITER {
        let (fx, dfx) = df(x);
        let r = fx - target;
        if r == 0.0 {
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - r / dfx;
        let next = if dfx > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x || hi - lo <= 2.0 * f64::EPSILON * x {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
