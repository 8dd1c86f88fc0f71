//! Where liquidity providers end up: Nash location, the relative fee gradient
//! and epsilon-equilibrium checks, for homogeneous and discrete heterogeneous
//! trader populations.
//!
//! Total fees are affine in the split `p`, so an LP's best response is always
//! a corner (`p = 0` or `p = 1`) unless the gradient vanishes.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fee_model::{total_fee, validate_positions, LpPosition};
use crate::market::MarketConfig;
use crate::traders::TraderParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NashLocation {
    /// All liquidity in the protected pool (`p = 1`).
    PoolN,
    /// All liquidity in the attackable pool (`p = 0`).
    PoolW,
    /// Fees do not depend on `p`; every split is an equilibrium.
    All,
}

impl NashLocation {
    pub fn label(&self) -> &'static str {
        match self {
            NashLocation::PoolN => "PoolN",
            NashLocation::PoolW => "PoolW",
            NashLocation::All => "All",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumVerdict {
    pub nash: NashLocation,
    /// `grad_f / min(f0, f1)`; infinite (signed) when the smaller corner fee is zero.
    pub delta_f: f64,
    /// `f1 - f0`, the slope of the fee in `p`.
    pub grad_f: f64,
    pub f0: f64,
    pub f1: f64,
}

impl EquilibriumVerdict {
    pub fn from_corner_fees(f0: f64, f1: f64) -> Self {
        let grad_f = f1 - f0;
        let flat = grad_f.abs() <= 1e-12 * f0.max(f1).max(1.0);
        let nash = if flat {
            NashLocation::All
        } else if grad_f > 0.0 {
            NashLocation::PoolN
        } else {
            NashLocation::PoolW
        };
        let f_min = f0.min(f1);
        let delta_f = if grad_f == 0.0 {
            0.0
        } else if f_min > 0.0 {
            grad_f / f_min
        } else {
            f64::INFINITY.copysign(grad_f)
        };
        Self {
            nash,
            delta_f,
            grad_f,
            f0,
            f1,
        }
    }

    pub fn f_min(&self) -> f64 {
        self.f0.min(self.f1)
    }

    /// True when `delta_f` is infinite because the smaller corner earns nothing.
    pub fn is_clamped(&self) -> bool {
        self.delta_f.is_infinite()
    }
}

/// Nash location for a homogeneous trader population. `market.p` is ignored.
pub fn classify_nash(market: &MarketConfig, trader: &TraderParams) -> Result<EquilibriumVerdict> {
    let f0 = total_fee(&market.with_split(0.0), trader)?;
    let f1 = total_fee(&market.with_split(1.0), trader)?;
    Ok(EquilibriumVerdict::from_corner_fees(f0, f1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub index: usize,
    /// Best corner fee over the LP's current fee; infinite when the LP
    /// currently earns nothing but a corner earns something.
    pub improvement_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCheck {
    pub is_equilibrium: bool,
    /// The LP with the largest improvement ratio.
    pub worst: Option<Offender>,
}

/// Epsilon-equilibrium test against an arbitrary fee-versus-split function.
/// An LP moves only when a corner pays more than `1 + epsilon` times what it
/// earns now; a gain of exactly `epsilon` does not move it.
pub fn epsilon_check_with<F>(positions: &[LpPosition], epsilon: f64, fee_at: F) -> Result<EpsilonCheck>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(epsilon >= 0.0) {
        return Err(domain(format!("epsilon must be non-negative, got {epsilon}")));
    }
    validate_positions(positions)?;
    let best_corner = fee_at(0.0)?.max(fee_at(1.0)?);
    let mut worst: Option<Offender> = None;
    for (index, lp) in positions.iter().enumerate() {
        let current = fee_at(lp.p)?;
        let improvement_ratio = if current > 0.0 {
            best_corner / current
        } else if best_corner > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        if worst.is_none_or(|w| improvement_ratio > w.improvement_ratio) {
            worst = Some(Offender { index, improvement_ratio });
        }
    }
    Ok(EpsilonCheck {
        is_equilibrium: worst.is_none_or(|w| w.improvement_ratio - 1.0 <= epsilon),
        worst,
    })
}

pub fn is_epsilon_equilibrium(
    positions: &[LpPosition],
    market: &MarketConfig,
    trader: &TraderParams,
    epsilon: f64,
) -> Result<EpsilonCheck> {
    epsilon_check_with(positions, epsilon, |p| total_fee(&market.with_split(p), trader))
}

/// Point mass of the relative-benefit distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub mass: f64,
}

/// Discrete distribution of trader relative benefit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaDistribution {
    support: Vec<AlphaPoint>,
}

impl AlphaDistribution {
    pub fn new(support: Vec<AlphaPoint>) -> Result<Self> {
        if support.is_empty() {
            return Err(domain("distribution needs at least one support point"));
        }
        for pt in &support {
            if !(pt.alpha.is_finite() && pt.alpha > 0.0) {
                return Err(domain(format!("alpha must be positive, got {}", pt.alpha)));
            }
            if !(pt.mass > 0.0) {
                return Err(domain(format!("probability mass must be positive, got {}", pt.mass)));
            }
        }
        let total: f64 = support.iter().map(|pt| pt.mass).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("probability masses must sum to 1, got {total}")));
        }
        Ok(Self { support })
    }

    pub fn one_point(alpha: f64) -> Result<Self> {
        Self::new(vec![AlphaPoint { alpha, mass: 1.0 }])
    }

    /// Equal masses at `(1 - 1/k) mean` and `(1 + 1/k) mean`; needs `k > 1`.
    pub fn two_point(mean: f64, k: f64) -> Result<Self> {
        if !(k > 1.0) {
            return Err(domain(format!("two-point spread k must exceed 1, got {k}")));
        }
        Self::new(vec![
            AlphaPoint {
                alpha: (1.0 - 1.0 / k) * mean,
                mass: 0.5,
            },
            AlphaPoint {
                alpha: (1.0 + 1.0 / k) * mean,
                mass: 0.5,
            },
        ])
    }

    pub fn support(&self) -> &[AlphaPoint] {
        &self.support
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|pt| pt.alpha * pt.mass).sum()
    }
}

/// Probability-weighted total fee at the market's split `p`.
pub fn expected_fee(market: &MarketConfig, dist: &AlphaDistribution, s: f64) -> Result<f64> {
    dist.support.iter().try_fold(0.0, |acc, pt| {
        Ok(acc + pt.mass * total_fee(market, &TraderParams::new(pt.alpha, s)?)?)
    })
}

/// Nash location under a heterogeneous population. `market.p` is ignored.
pub fn classify_nash_heterogeneous(
    market: &MarketConfig,
    dist: &AlphaDistribution,
    s: f64,
) -> Result<EquilibriumVerdict> {
    let f0 = expected_fee(&market.with_split(0.0), dist, s)?;
    let f1 = expected_fee(&market.with_split(1.0), dist, s)?;
    Ok(EquilibriumVerdict::from_corner_fees(f0, f1))
}

pub fn is_epsilon_equilibrium_heterogeneous(
    positions: &[LpPosition],
    market: &MarketConfig,
    dist: &AlphaDistribution,
    s: f64,
    epsilon: f64,
) -> Result<EpsilonCheck> {
    epsilon_check_with(positions, epsilon, |p| expected_fee(&market.with_split(p), dist, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fee_model::fee_constructive;
    use proptest::prelude::*;

    fn market(omega: f64) -> MarketConfig {
        MarketConfig::reference(0.5, omega)
    }

    fn trader(alpha: f64, s: f64) -> TraderParams {
        TraderParams::new(alpha, s).unwrap()
    }

    fn single(p: f64) -> Vec<LpPosition> {
        vec![LpPosition::new(1.0, p).unwrap()]
    }

    #[test]
    fn retail_only_market_prefers_attackable_pool() {
        let t = trader(0.1, 0.01);
        let b = fee_constructive(&market(1.0), &t).unwrap();
        assert!(b.attack_retail);
        assert_eq!(classify_nash(&market(1.0), &t).unwrap().nash, NashLocation::PoolW);
    }

    #[test]
    fn sophisticated_only_market_prefers_protected_pool() {
        for (alpha, s) in [(0.1, 0.01), (0.05, 0.001), (0.01, 0.05)] {
            assert_eq!(classify_nash(&market(0.0), &trader(alpha, s)).unwrap().nash, NashLocation::PoolN);
        }
    }

    #[test]
    fn no_trading_means_indifference() {
        let v = classify_nash(&market(0.3), &trader(0.001, 0.01)).unwrap();
        assert_eq!(v.nash, NashLocation::All);
        assert_eq!(v.delta_f, 0.0);
        assert!(!v.is_clamped());
    }

    #[test]
    fn sign_of_delta_follows_gradient() {
        let v = EquilibriumVerdict::from_corner_fees(2.0, 3.0);
        assert_eq!((v.nash, v.delta_f, v.grad_f), (NashLocation::PoolN, 0.5, 1.0));
        let v = EquilibriumVerdict::from_corner_fees(3.0, 2.0);
        assert_eq!((v.nash, v.delta_f), (NashLocation::PoolW, -0.5));
        let v = EquilibriumVerdict::from_corner_fees(0.0, 2.0);
        assert_eq!(v.delta_f, f64::INFINITY);
        assert!(v.is_clamped());
    }

    #[test]
    fn corner_at_nash_is_an_exact_equilibrium() {
        let m = market(0.0);
        let t = trader(0.1, 0.01);
        assert_eq!(classify_nash(&m, &t).unwrap().nash, NashLocation::PoolN);
        let check = is_epsilon_equilibrium(&single(1.0), &m, &t, 0.0).unwrap();
        assert!(check.is_equilibrium);
        assert_eq!(check.worst.unwrap().improvement_ratio, 1.0);
    }

    #[test]
    fn lp_in_the_wrong_corner_moves() {
        let m = market(0.01);
        let t = trader(0.02, 0.02);
        let v = classify_nash(&m, &t).unwrap();
        assert_eq!(v.nash, NashLocation::PoolN);
        assert!(v.delta_f.is_finite() && v.delta_f > 0.02, "{}", v.delta_f);
        let check = is_epsilon_equilibrium(&single(0.0), &m, &t, 0.02).unwrap();
        assert!(!check.is_equilibrium);
        let ratio = check.worst.unwrap().improvement_ratio;
        assert!((ratio - (1.0 + v.delta_f)).abs() <= 1e-12 * ratio);
        assert!(is_epsilon_equilibrium(&single(0.0), &m, &t, v.delta_f * 1.000001).unwrap().is_equilibrium);
    }

    #[test]
    fn zero_fee_position_with_paying_corner_never_equilibrates() {
        let positions = single(0.0);
        let check = epsilon_check_with(&positions, 1e9, Ok).unwrap();
        assert!(!check.is_equilibrium);
        assert_eq!(check.worst.unwrap().improvement_ratio, f64::INFINITY);
        assert!(epsilon_check_with(&positions, 0.0, |_| Ok(0.0)).unwrap().is_equilibrium);
        assert!(epsilon_check_with(&positions, -1.0, |_| Ok(1.0)).is_err());
    }

    #[test]
    fn worst_offender_is_reported() {
        let lps = vec![
            LpPosition::new(0.5, 0.9).unwrap(),
            LpPosition::new(0.3, 0.1).unwrap(),
            LpPosition::new(0.2, 0.5).unwrap(),
        ];
        let check = epsilon_check_with(&lps, 0.0, |p| Ok(1.0 + p)).unwrap();
        assert_eq!(check.worst.unwrap().index, 1);
        assert!(!check.is_equilibrium);
    }

    #[test]
    fn one_point_distribution_reduces_to_homogeneous() {
        let m = market(0.01);
        for (alpha, s) in [(0.02, 0.02), (0.15, 0.01), (0.001, 0.01)] {
            let dist = AlphaDistribution::one_point(alpha).unwrap();
            assert_eq!(
                classify_nash_heterogeneous(&m, &dist, s).unwrap(),
                classify_nash(&m, &trader(alpha, s)).unwrap()
            );
            assert_eq!(expected_fee(&m, &dist, s).unwrap(), total_fee(&m, &trader(alpha, s)).unwrap());
        }
    }

    #[test]
    fn two_point_converges_to_one_point() {
        let m = market(0.01);
        let (mu, s) = (0.08, 0.01);
        let target = total_fee(&m, &trader(mu, s)).unwrap();
        let gaps: Vec<f64> = [3.0, 10.0, 100.0, 1000.0]
            .iter()
            .map(|&k| (expected_fee(&m, &AlphaDistribution::two_point(mu, k).unwrap(), s).unwrap() - target).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }

    #[test]
    fn expected_fee_is_affine_in_p() {
        let dist = AlphaDistribution::two_point(0.06, 3.0).unwrap();
        let f = |p: f64| expected_fee(&market(0.05).with_split(p), &dist, 0.01).unwrap();
        assert!((f(0.25) - (0.75 * f(0.0) + 0.25 * f(1.0))).abs() <= 1e-9 * f(0.25));
    }

    #[test]
    fn distribution_validation() {
        assert!(AlphaDistribution::new(vec![]).is_err());
        assert!(AlphaDistribution::new(vec![AlphaPoint { alpha: 0.1, mass: 0.6 }]).is_err());
        assert!(AlphaDistribution::new(vec![AlphaPoint { alpha: -0.1, mass: 1.0 }]).is_err());
        assert!(AlphaDistribution::two_point(0.1, 1.0).is_err());
        let d = AlphaDistribution::two_point(0.1, 4.0).unwrap();
        assert!((d.mean() - 0.1).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn epsilon_monotone(alpha in 0.004f64..0.2, s in 0.001f64..0.1, omega in 0.0f64..1.0, p in 0.0f64..1.0, e1 in 0.0f64..0.2, extra in 0.0f64..0.2) {
            let m = market(omega);
            let t = trader(alpha, s);
            let positions = single(p);
            let a = is_epsilon_equilibrium(&positions, &m, &t, e1).unwrap();
            let b = is_epsilon_equilibrium(&positions, &m, &t, e1 + extra).unwrap();
            prop_assert!(!a.is_equilibrium || b.is_equilibrium);
        }
    }
}
