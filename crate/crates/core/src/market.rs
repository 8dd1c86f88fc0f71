use serde::{Deserialize, Serialize};

use crate::cpmm::PoolState;
use crate::error::{domain, Result};

/// Game parameters shared by both pools.
///
/// `p` is the fraction of total liquidity placed in the protected pool
/// (Pool N); the rest sits in the attackable pool (Pool W). `omega` is the
/// retail share of order flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    pub x: f64,
    pub y: f64,
    pub fee: f64,
    pub p: f64,
    pub omega: f64,
}

impl MarketConfig {
    pub fn new(x: f64, y: f64, fee: f64, p: f64, omega: f64) -> Result<Self> {
        let m = Self { x, y, fee, p, omega };
        m.validate()?;
        Ok(m)
    }

    /// The reference configuration used throughout the figures: 5M/5M reserves, 0.3 % fee.
    pub fn reference(p: f64, omega: f64) -> Self {
        Self {
            x: 5_000_000.0,
            y: 5_000_000.0,
            fee: 0.003,
            p,
            omega,
        }
    }

    pub fn validate(&self) -> Result<()> {
        PoolState::new(self.x, self.y, self.fee)?;
        if !(0.0..=1.0).contains(&self.p) {
            return Err(domain(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(domain(format!("omega must lie in [0, 1], got {}", self.omega)));
        }
        Ok(())
    }

    pub fn with_split(&self, p: f64) -> Self {
        Self { p, ..*self }
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        Self { omega, ..*self }
    }

    /// Fair price of X in Y; both pools start at this price.
    pub fn price(&self) -> f64 {
        self.y / self.x
    }

    /// Both pools merged, i.e. the whole liquidity in one pool.
    pub fn total_pool(&self) -> PoolState {
        PoolState {
            x: self.x,
            y: self.y,
            fee: self.fee,
        }
    }

    /// Pool N, or `None` when it holds no liquidity.
    pub fn pool_n(&self) -> Option<PoolState> {
        (self.p > 0.0).then(|| self.total_pool().scaled(self.p))
    }

    /// Pool W, or `None` when it holds no liquidity.
    pub fn pool_w(&self) -> Option<PoolState> {
        (self.p < 1.0).then(|| self.total_pool().scaled(1.0 - self.p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools_split_reserves_at_a_common_price() {
        let m = MarketConfig::new(10.0, 30.0, 0.01, 0.25, 0.5).unwrap();
        let n = m.pool_n().unwrap();
        let w = m.pool_w().unwrap();
        assert_eq!((n.x, n.y), (2.5, 7.5));
        assert_eq!((w.x, w.y), (7.5, 22.5));
        assert_eq!(n.marginal_price(), m.price());
        assert_eq!(w.marginal_price(), m.price());
        assert!(m.with_split(1.0).pool_w().is_none());
        assert!(m.with_split(0.0).pool_n().is_none());
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(MarketConfig::new(1.0, 1.0, 0.003, 1.5, 0.0).is_err());
        assert!(MarketConfig::new(1.0, 1.0, 0.003, 0.5, -0.1).is_err());
        assert!(MarketConfig::new(1.0, 1.0, 1.2, 0.5, 0.1).is_err());
    }
}
