//! One-dimensional maximization used for attack sizing and as the numeric
//! side of the closed-form checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const UNIMODAL_PROBES: usize = 65;
const DENSE_POINTS: usize = 10_001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
}

fn eval<F: Fn(f64) -> f64>(f: &F, z: f64) -> Result<f64> {
    let v = f(z);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("objective is {v} at {z}")))
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`. Endpoints are compared against the
/// interior result so boundary maxima are returned exactly.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Maximum> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Numeric(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(&f, c)?;
    let mut fd = eval(&f, d)?;
    let tol = tol.max(f64::EPSILON * (lo.abs() + hi.abs()));
    let mut iterations = 0;
    while b - a > tol && iterations < 400 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(&f, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(&f, d)?;
        }
        iterations += 1;
    }
    let mut best = if fc >= fd {
        Maximum { argmax: c, value: fc }
    } else {
        Maximum { argmax: d, value: fd }
    };
    for edge in [lo, hi] {
        let v = eval(&f, edge)?;
        if v >= best.value {
            best = Maximum { argmax: edge, value: v };
        }
    }
    Ok(best)
}

/// Coarse check that `f` rises then falls (or is monotone) on `[lo, hi]`.
pub fn looks_unimodal<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<bool> {
    let step = (hi - lo) / (UNIMODAL_PROBES - 1) as f64;
    let mut prev = eval(f, lo)?;
    let mut descending = false;
    for i in 1..UNIMODAL_PROBES {
        let v = eval(f, lo + step * i as f64)?;
        if v < prev {
            descending = true;
        } else if v > prev && descending {
            return Ok(false);
        }
        prev = v;
    }
    Ok(true)
}

/// Maximize on a bracket with argument tolerance `1e-10 * width`. Falls back
/// to a dense scan plus local refinement when the coarse unimodality probe
/// fails.
pub fn maximize_on_bracket<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Maximum> {
    let tol = 1e-10 * (hi - lo);
    if looks_unimodal(&f, lo, hi)? {
        return golden_section_max(&f, lo, hi, tol);
    }
    let step = (hi - lo) / (DENSE_POINTS - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..DENSE_POINTS {
        let v = eval(&f, lo + step * i as f64)?;
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    golden_section_max(&f, a, b, tol)
}

/// Point where `g` changes from positive to non-positive on `[lo, hi]`,
/// bisected down to adjacent floats. Requires `g(lo) > 0 >= g(hi)`.
pub fn bisect_sign_change<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (g_lo, g_hi) = (eval(&g, lo)?, eval(&g, hi)?);
    if !(g_lo > 0.0 && g_hi <= 0.0) {
        return Err(Error::Numeric(format!("no sign change on [{lo}, {hi}]: {g_lo}, {g_hi}")));
    }
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(&g, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximize a function on `[0, inf)` that is unimodal and eventually
/// decreasing. The bracket grows geometrically from `1e-12 * scale` until the
/// maximum is interior. Returns `argmax = 0` when `f` does not rise above
/// `f(0)`.
pub fn maximize_from_zero<F: Fn(f64) -> f64>(f: F, scale: f64) -> Result<Maximum> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Numeric(format!("scale must be positive, got {scale}")));
    }
    let f0 = eval(&f, 0.0)?;
    let mut b = 1e-12 * scale;
    let mut fb = eval(&f, b)?;
    if fb <= f0 {
        let m = golden_section_max(&f, 0.0, b, 1e-10 * b)?;
        return Ok(if m.value > f0 { m } else { Maximum { argmax: 0.0, value: f0 } });
    }
    let mut doublings = 0;
    loop {
        let f2b = eval(&f, 2.0 * b)?;
        if f2b <= fb {
            break;
        }
        b *= 2.0;
        fb = f2b;
        doublings += 1;
        if doublings > 1100 {
            return Err(Error::Numeric("objective keeps increasing; no interior maximum".into()));
        }
    }
    let lo = if doublings == 0 { 0.0 } else { 0.5 * b };
    maximize_on_bracket(&f, lo, 2.0 * b)
}
