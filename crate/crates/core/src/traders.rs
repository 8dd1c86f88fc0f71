//! Trader utilities and optimal order sizes across the two pools.
//!
//! Utilities are denominated in Y-tokens: the benefit `(1 + alpha)` times the
//! Y received, minus the X paid valued at the fair price `y / x`.
//! Sophisticated traders assume every Pool W order is sandwiched down to its
//! slippage limit and value that leg at `(1 - s)` of the quoted output.
//! Retail traders ignore attacks.

use serde::{Deserialize, Serialize};

use crate::cpmm::{swap_x_for_y, PoolState};
use crate::error::{domain, Result};
use crate::market::MarketConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraderKind {
    Sophisticated,
    Retail,
}

/// Relative benefit and slippage tolerance shared by a trader cohort.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraderParams {
    pub alpha: f64,
    pub s: f64,
}

impl TraderParams {
    pub fn new(alpha: f64, s: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(0.0..1.0).contains(&s) {
            return Err(domain(format!("slippage tolerance must lie in [0, 1), got {s}")));
        }
        Ok(Self { alpha, s })
    }
}

/// X-token inputs into each pool.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TradePlan {
    pub input_n: f64,
    pub input_w: f64,
}

fn check_fee(f: f64) -> Result<()> {
    if !(f > 0.0 && f < 1.0) {
        return Err(domain(format!("fee must lie in (0, 1), got {f}")));
    }
    Ok(())
}

/// Benefit below which nobody trades in Pool N: `f / (1 - f)`.
pub fn alpha_min_n(f: f64) -> Result<f64> {
    check_fee(f)?;
    Ok(f / (1.0 - f))
}

/// Benefit below which sophisticated traders stay out of Pool W:
/// `(f + s - s f) / ((1 - f)(1 - s))`.
pub fn alpha_min_w(f: f64, s: f64) -> Result<f64> {
    check_fee(f)?;
    if !(0.0..1.0).contains(&s) {
        return Err(domain(format!("slippage tolerance must lie in [0, 1), got {s}")));
    }
    Ok((f + s - s * f) / ((1.0 - f) * (1.0 - s)))
}

/// Utility-maximizing input into a pool with X-reserve `reserve_x`, where the
/// trader keeps `keep` of the quoted output.
fn optimal_input(reserve_x: f64, f: f64, alpha: f64, keep: f64) -> f64 {
    let root = ((1.0 + alpha) * keep * (1.0 - f)).sqrt();
    (reserve_x * (root - 1.0) / (1.0 - f)).max(0.0)
}

pub fn optimal_trade_sophisticated(params: &TraderParams, market: &MarketConfig) -> TradePlan {
    TradePlan {
        input_n: optimal_input(market.p * market.x, market.fee, params.alpha, 1.0),
        input_w: optimal_input((1.0 - market.p) * market.x, market.fee, params.alpha, 1.0 - params.s),
    }
}

pub fn optimal_trade_retail(params: &TraderParams, market: &MarketConfig) -> TradePlan {
    TradePlan {
        input_n: optimal_input(market.p * market.x, market.fee, params.alpha, 1.0),
        input_w: optimal_input((1.0 - market.p) * market.x, market.fee, params.alpha, 1.0),
    }
}

pub fn optimal_trade(kind: TraderKind, params: &TraderParams, market: &MarketConfig) -> TradePlan {
    match kind {
        TraderKind::Sophisticated => optimal_trade_sophisticated(params, market),
        TraderKind::Retail => optimal_trade_retail(params, market),
    }
}

/// Utility of one pool leg; an empty pool yields nothing.
fn leg_utility(pool: Option<PoolState>, input: f64, alpha: f64, keep: f64, price: f64) -> Result<f64> {
    let received = match pool {
        Some(pool) => swap_x_for_y(&pool, input)?.output,
        None if input >= 0.0 => 0.0,
        None => return Err(domain(format!("trade input must be non-negative, got {input}"))),
    };
    Ok((1.0 + alpha) * keep * received - price * input)
}

pub fn utility_sophisticated(plan: &TradePlan, params: &TraderParams, market: &MarketConfig) -> Result<f64> {
    let price = market.price();
    Ok(leg_utility(market.pool_n(), plan.input_n, params.alpha, 1.0, price)?
        + leg_utility(market.pool_w(), plan.input_w, params.alpha, 1.0 - params.s, price)?)
}

pub fn utility_retail(plan: &TradePlan, params: &TraderParams, market: &MarketConfig) -> Result<f64> {
    let price = market.price();
    Ok(leg_utility(market.pool_n(), plan.input_n, params.alpha, 1.0, price)?
        + leg_utility(market.pool_w(), plan.input_w, params.alpha, 1.0, price)?)
}

pub fn utility(kind: TraderKind, plan: &TradePlan, params: &TraderParams, market: &MarketConfig) -> Result<f64> {
    match kind {
        TraderKind::Sophisticated => utility_sophisticated(plan, params, market),
        TraderKind::Retail => utility_retail(plan, params, market),
    }
}
