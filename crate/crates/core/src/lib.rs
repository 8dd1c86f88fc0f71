//! Sandwich attacks on constant-product pools as a game between traders,
//! attackers and liquidity providers choosing between a protected and an
//! unprotected pool.

pub mod cpmm;
pub mod equilibrium;
pub mod error;
pub mod fee_model;
pub mod market;
pub mod optimize;
pub mod oracle;
pub mod sandwich;
pub mod sweep;
pub mod traders;
pub mod verify;

pub use error::{Error, Result};
