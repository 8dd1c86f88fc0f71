//! Constant-product swap mechanics for a single pool within one price tick.
//!
//! Reserves are real-valued. Fees are charged on the input side and held
//! outside the reserves, so every swap preserves `x * y` exactly (up to
//! rounding).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Reserves and fee of one constant-product pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolState {
    /// X-token reserve.
    pub x: f64,
    /// Y-token reserve.
    pub y: f64,
    /// Fee fraction charged on the input amount.
    pub fee: f64,
}

/// Outcome of a single swap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapResult {
    /// Tokens received by the trader (in the output token).
    pub output: f64,
    /// Fee retained, denominated in the input token.
    pub fee_paid: f64,
    /// Pool after execution.
    pub new_pool: PoolState,
}

impl PoolState {
    pub fn new(x: f64, y: f64, fee: f64) -> Result<Self> {
        let pool = Self { x, y, fee };
        pool.validate()?;
        Ok(pool)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.x > 0.0) {
            return Err(domain(format!("x reserve must be positive, got {}", self.x)));
        }
        if !(self.y.is_finite() && self.y > 0.0) {
            return Err(domain(format!("y reserve must be positive, got {}", self.y)));
        }
        if !(self.fee > 0.0 && self.fee < 1.0) {
            return Err(domain(format!("fee must lie in (0, 1), got {}", self.fee)));
        }
        Ok(())
    }

    /// Price of one X-token in Y-tokens.
    pub fn marginal_price(&self) -> f64 {
        self.y / self.x
    }

    /// Constant product `k = x * y`.
    pub fn invariant(&self) -> f64 {
        self.x * self.y
    }

    /// Liquidity `L = sqrt(x * y)`.
    pub fn liquidity(&self) -> f64 {
        self.invariant().sqrt()
    }

    /// Same pool with a different fee. Used by the fee-equivalence checks.
    pub fn with_fee(&self, fee: f64) -> Self {
        Self { fee, ..*self }
    }

    /// Reserves multiplied by `c`, fee unchanged.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            x: self.x * c,
            y: self.y * c,
            fee: self.fee,
        }
    }
}

fn check_input(amount: f64, what: &str) -> Result<()> {
    if !(amount.is_finite() && amount >= 0.0) {
        return Err(domain(format!("{what} must be finite and non-negative, got {amount}")));
    }
    Ok(())
}

/// Output of selling `input` into a reserve pair `(reserve_in, reserve_out)`.
fn amount_out(reserve_in: f64, reserve_out: f64, fee: f64, input: f64) -> f64 {
    let effective = (1.0 - fee) * input;
    reserve_out * effective / (reserve_in + effective)
}

/// Sell `delta_x` X-tokens for Y-tokens.
pub fn swap_x_for_y(pool: &PoolState, delta_x: f64) -> Result<SwapResult> {
    pool.validate()?;
    check_input(delta_x, "delta_x")?;
    if delta_x == 0.0 {
        return Ok(SwapResult {
            output: 0.0,
            fee_paid: 0.0,
            new_pool: *pool,
        });
    }
    let output = amount_out(pool.x, pool.y, pool.fee, delta_x);
    Ok(SwapResult {
        output,
        fee_paid: pool.fee * delta_x,
        new_pool: PoolState {
            x: pool.x + (1.0 - pool.fee) * delta_x,
            y: pool.y - output,
            fee: pool.fee,
        },
    })
}

/// Sell `delta_y` Y-tokens for X-tokens. `fee_paid` is in Y-tokens.
pub fn swap_y_for_x(pool: &PoolState, delta_y: f64) -> Result<SwapResult> {
    pool.validate()?;
    check_input(delta_y, "delta_y")?;
    if delta_y == 0.0 {
        return Ok(SwapResult {
            output: 0.0,
            fee_paid: 0.0,
            new_pool: *pool,
        });
    }
    let output = amount_out(pool.y, pool.x, pool.fee, delta_y);
    Ok(SwapResult {
        output,
        fee_paid: pool.fee * delta_y,
        new_pool: PoolState {
            x: pool.x - output,
            y: pool.y + (1.0 - pool.fee) * delta_y,
            fee: pool.fee,
        },
    })
}

/// Y-output the trader expects when nothing executes ahead of them.
pub fn expected_output_no_interference(pool: &PoolState, delta_x: f64) -> Result<f64> {
    swap_x_for_y(pool, delta_x).map(|r| r.output)
}

/// Smallest output a trade with slippage tolerance `s` accepts.
pub fn min_acceptable_output(expected: f64, s: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(domain(format!("slippage tolerance must lie in [0, 1), got {s}")));
    }
    Ok((1.0 - s) * expected)
}
