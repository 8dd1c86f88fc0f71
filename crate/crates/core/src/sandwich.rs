//! Sandwich-attack profitability and size limits on the attackable pool.
//!
//! The attacker front-runs the victim's X->Y swap with `a` X-tokens, lets the
//! victim execute at the worse price, then sells the Y bought in the
//! front-run back into the pool. Fees are charged on the input of every leg,
//! including the back-run.

use serde::{Deserialize, Serialize};

use crate::cpmm::{swap_x_for_y, PoolState};
use crate::error::{domain, Error, Result};
use crate::optimize::{bisect_sign_change, Maximum};

/// A victim order in Pool W together with the pool it targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackParams {
    pub victim_input: f64,
    pub s: f64,
    pub pool_w: PoolState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    /// X-tokens spent in the front-run.
    pub attack_input: f64,
    /// X-tokens recovered by the back-run.
    pub attack_output: f64,
    /// `attack_output - attack_input`.
    pub profit: f64,
    /// Y-tokens the victim actually receives.
    pub victim_output: f64,
    /// Y-tokens the victim expected at submission.
    pub victim_expected: f64,
    pub executed: bool,
}

impl AttackParams {
    pub fn new(victim_input: f64, s: f64, pool_w: PoolState) -> Result<Self> {
        pool_w.validate()?;
        if !(victim_input.is_finite() && victim_input >= 0.0) {
            return Err(domain(format!("victim input must be non-negative, got {victim_input}")));
        }
        if !(0.0..1.0).contains(&s) {
            return Err(domain(format!("slippage tolerance must lie in [0, 1), got {s}")));
        }
        Ok(Self {
            victim_input,
            s,
            pool_w,
        })
    }
}

/// Attacker profit (in X) for a front-run of `attack_input` X-tokens.
pub fn attack_profit_closed_form(params: &AttackParams, attack_input: f64) -> f64 {
    debug_assert!(attack_input >= 0.0);
    let a = attack_input;
    let d = params.victim_input;
    let x = params.pool_w.x;
    let b = 1.0 - params.pool_w.fee;
    let after = x + b * (a + d);
    let numerator = b * b * a * after * after;
    let denominator = x * x + (1.0 + b) * b * x * a + b * b * b * a * (a + d);
    numerator / denominator - a
}

/// Smallest victim size for which a front-run of `attack_input` is profitable.
/// With `attack_input = 0` this is the fee-dependent floor `f X / (1-f)^2`.
pub fn min_victim_size(pool_w: &PoolState, attack_input: f64) -> f64 {
    let f = pool_w.fee;
    f * (pool_w.x + attack_input * (1.0 - f)) / ((1.0 - f) * (1.0 - f))
}

/// Largest front-run that still lets the victim's trade clear its slippage
/// limit; at this size the victim receives exactly `(1 - s)` of the expected
/// output.
pub fn max_attack_input(params: &AttackParams) -> f64 {
    let x = params.pool_w.x;
    let b = 1.0 - params.pool_w.fee;
    let d = params.victim_input;
    let radicand = d * d * b * b + 4.0 * x * (x + d * b) / (1.0 - params.s);
    let a = 0.5 * (radicand.sqrt() / b - 2.0 * x / b - d);
    // s = 0 cancels exactly in real arithmetic
    if params.s == 0.0 {
        0.0
    } else {
        a.max(0.0)
    }
}

/// Derivative of `attack_profit_closed_form` in the front-run size.
pub fn attack_profit_slope(params: &AttackParams, attack_input: f64) -> f64 {
    let a = attack_input;
    let d = params.victim_input;
    let x = params.pool_w.x;
    let b = 1.0 - params.pool_w.fee;
    let after = x + b * (a + d);
    let numerator = b * b * a * after * after;
    let d_numerator = b * b * after * after + 2.0 * b * b * b * a * after;
    let denominator = x * x + (1.0 + b) * b * x * a + b * b * b * a * (a + d);
    let d_denominator = (1.0 + b) * b * x + b * b * b * (2.0 * a + d);
    (d_numerator * denominator - numerator * d_denominator) / (denominator * denominator) - 1.0
}

/// Unconstrained profit-maximizing front-run size, ignoring the victim's
/// slippage limit. Profit is unimodal in the front-run size, so the maximum
/// is where the slope changes sign; the bracket starts at `[0, search_bound]`
/// and doubles until the slope turns negative. Locating the sign change
/// rather than comparing profit values keeps the result accurate when profit
/// is small next to the front-run.
pub fn profit_maximizing_attack(params: &AttackParams, search_bound: f64) -> Result<Maximum> {
    if !(search_bound.is_finite() && search_bound > 0.0) {
        return Err(domain(format!("search bound must be positive, got {search_bound}")));
    }
    let slope = |a: f64| attack_profit_slope(params, a);
    if !(slope(0.0) > 0.0) {
        return Ok(Maximum { argmax: 0.0, value: 0.0 });
    }
    let mut lo = 0.0;
    let mut hi = search_bound;
    while slope(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numeric("profit-maximizing attack did not converge".into()));
        }
    }
    let argmax = bisect_sign_change(slope, lo, hi)?;
    Ok(Maximum {
        argmax,
        value: attack_profit_closed_form(params, argmax),
    })
}

/// Victim output after a front-run of `attack_input`.
fn victim_output_after(params: &AttackParams, attack_input: f64) -> Result<f64> {
    let front = swap_x_for_y(&params.pool_w, attack_input)?;
    Ok(swap_x_for_y(&front.new_pool, params.victim_input)?.output)
}

/// Attack rule: front-run with `min(a_s, a*)` when that is strictly
/// profitable, otherwise leave the victim alone.
pub fn decide_attack(params: &AttackParams) -> Result<AttackOutcome> {
    let expected = swap_x_for_y(&params.pool_w, params.victim_input)?.output;
    let idle = AttackOutcome {
        attack_input: 0.0,
        attack_output: 0.0,
        profit: 0.0,
        victim_output: expected,
        victim_expected: expected,
        executed: false,
    };
    let slippage_limited = max_attack_input(params);
    if params.victim_input == 0.0 || slippage_limited <= 0.0 {
        return Ok(idle);
    }
    let best = profit_maximizing_attack(params, params.pool_w.x)?;
    let size = slippage_limited.min(best.argmax);
    let profit = attack_profit_closed_form(params, size);
    if !(profit > 0.0) {
        return Ok(idle);
    }
    Ok(AttackOutcome {
        attack_input: size,
        attack_output: size + profit,
        profit,
        victim_output: victim_output_after(params, size)?,
        victim_expected: expected,
        executed: true,
    })
}
