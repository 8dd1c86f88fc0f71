//! Liquidity-provider fee revenue per unit of order flow.
//!
//! Each order is followed by an arbitrageur that brings the pool back to the
//! fair price, so revenue per order does not depend on history. Fees are
//! reported in Y-tokens; X-denominated fees are converted at `y / x`.
//!
//! The arbitrage leg is sized at the Y-amount the preceding sequence removed
//! from the pool, and pays `f` on that size. In an attacked sequence the
//! back-run and the arbitrage together have that size, so the Pool W revenue
//! of an attacked order equals that of a single order of `victim + front-run`.

use serde::{Deserialize, Serialize};

use crate::cpmm::{swap_x_for_y, PoolState};
use crate::error::{domain, Result};
use crate::market::MarketConfig;
use crate::sandwich::{decide_attack, AttackOutcome, AttackParams};
use crate::traders::{optimal_trade_retail, optimal_trade_sophisticated, TraderParams};

/// Which piece of the piecewise fee function applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `alpha <= f / (1 - f)`: no trades anywhere.
    NoTrading,
    /// Sophisticated flow only in Pool N; retail Pool W orders are not attacked.
    SophPoolNOnly,
    /// Sophisticated flow only in Pool N; retail Pool W orders are attacked.
    SophPoolNOnlyRetailAttacked,
    /// Both flows trade in both pools, nobody is attacked.
    NoAttack,
    /// Both flows trade in both pools, only retail orders are attacked.
    RetailAttacked,
    /// Both flows trade in both pools and both are attacked.
    BothAttacked,
    /// Sophisticated orders attacked while retail orders are not. Outside the
    /// piecewise table; retail orders are never smaller, so this is not
    /// expected to occur.
    SophAttackedOnly,
}

impl Regime {
    pub fn from_flags(trades: bool, soph_in_w: bool, soph_attacked: bool, retail_attacked: bool) -> Self {
        match (trades, soph_in_w, soph_attacked, retail_attacked) {
            (false, ..) => Regime::NoTrading,
            (true, false, _, false) => Regime::SophPoolNOnly,
            (true, false, _, true) => Regime::SophPoolNOnlyRetailAttacked,
            (true, true, false, false) => Regime::NoAttack,
            (true, true, false, true) => Regime::RetailAttacked,
            (true, true, true, true) => Regime::BothAttacked,
            (true, true, true, false) => Regime::SophAttackedOnly,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::NoTrading => "no_trading",
            Regime::SophPoolNOnly => "soph_pool_n_only",
            Regime::SophPoolNOnlyRetailAttacked => "soph_pool_n_only_retail_attacked",
            Regime::NoAttack => "no_attack",
            Regime::RetailAttacked => "retail_attacked",
            Regime::BothAttacked => "both_attacked",
            Regime::SophAttackedOnly => "soph_attacked_only",
        }
    }

    /// Regimes where no retail order is attacked; the closed forms there carry
    /// no attack-size algebra.
    pub fn is_attack_free(&self) -> bool {
        matches!(self, Regime::NoTrading | Regime::SophPoolNOnly | Regime::NoAttack)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeeBreakdown {
    pub regime: Regime,
    /// Pool N fees per order (identical for both flows).
    pub fee_n: f64,
    /// Pool W fees per sophisticated order.
    pub fee_w_soph: f64,
    /// Pool W fees per retail order.
    pub fee_w_retail: f64,
    /// `fee_n + (1 - omega) fee_w_soph + omega fee_w_retail`.
    pub total: f64,
    pub attack_soph: bool,
    pub attack_retail: bool,
}

impl FeeBreakdown {
    fn assemble(regime: Regime, omega: f64, fee_n: f64, fee_w_soph: f64, fee_w_retail: f64) -> Self {
        Self {
            regime,
            fee_n,
            fee_w_soph,
            fee_w_retail,
            total: fee_n + (1.0 - omega) * fee_w_soph + omega * fee_w_retail,
            attack_soph: matches!(regime, Regime::BothAttacked | Regime::SophAttackedOnly),
            attack_retail: matches!(
                regime,
                Regime::SophPoolNOnlyRetailAttacked | Regime::RetailAttacked | Regime::BothAttacked
            ),
        }
    }
}

/// Attack decisions for both flows, made on the merged pool. Order sizes and
/// attack sizes are proportional to Pool W's reserves, so the decision does
/// not depend on `p`; attack sizes here are scaled by `1 - p` when applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub regime: Regime,
    pub soph: AttackOutcome,
    pub retail: AttackOutcome,
}

pub fn classify(market: &MarketConfig, trader: &TraderParams) -> Result<Classification> {
    market.validate()?;
    let merged = market.with_split(0.0);
    let pool = merged.total_pool();
    let soph_w = optimal_trade_sophisticated(trader, &merged).input_w;
    let retail_w = optimal_trade_retail(trader, &merged).input_w;
    let soph = decide_attack(&AttackParams::new(soph_w, trader.s, pool)?)?;
    let retail = decide_attack(&AttackParams::new(retail_w, trader.s, pool)?)?;
    Ok(Classification {
        regime: Regime::from_flags(retail_w > 0.0, soph_w > 0.0, soph.executed, retail.executed),
        soph,
        retail,
    })
}

/// Fees (in Y) from one order of `input` X-tokens plus the arbitrage that
/// follows it.
fn order_fee(pool: &PoolState, input: f64, price: f64) -> Result<f64> {
    if input == 0.0 {
        return Ok(0.0);
    }
    let removed = swap_x_for_y(pool, input)?.output;
    Ok(pool.fee * input * price + pool.fee * removed)
}

/// Fees assembled from the swap primitives, the optimal order sizes and the
/// attack rule. This is the authoritative fee value.
pub fn fee_constructive(market: &MarketConfig, trader: &TraderParams) -> Result<FeeBreakdown> {
    let cls = classify(market, trader)?;
    let price = market.price();
    let soph = optimal_trade_sophisticated(trader, market);
    let retail = optimal_trade_retail(trader, market);
    let w_scale = 1.0 - market.p;

    let fee_n = match market.pool_n() {
        Some(pool) => order_fee(&pool, soph.input_n, price)?,
        None => 0.0,
    };
    let (fee_w_soph, fee_w_retail) = match market.pool_w() {
        Some(pool) => (
            order_fee(&pool, soph.input_w + w_scale * cls.soph.attack_input, price)?,
            order_fee(&pool, retail.input_w + w_scale * cls.retail.attack_input, price)?,
        ),
        None => (0.0, 0.0),
    };
    Ok(FeeBreakdown::assemble(cls.regime, market.omega, fee_n, fee_w_soph, fee_w_retail))
}

/// Total LP fee revenue per unit of order flow at the market's split `p`.
pub fn total_fee(market: &MarketConfig, trader: &TraderParams) -> Result<f64> {
    Ok(fee_constructive(market, trader)?.total)
}

/// How the closed-form expressions are transcribed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transcription {
    /// Algebraically re-derived expressions; these agree with
    /// [`fee_constructive`].
    Corrected,
    /// The expressions exactly as published. Two of them differ from the
    /// derivation: the unattacked retail Pool W term (`1 - alpha` where
    /// `1 + alpha` belongs, and opposite sign) and the attacked sophisticated
    /// Pool W term (denominator factor 1 instead of 2).
    AsPublished,
}

/// `sqrt((1 + alpha)(1 - s)(1 - f))`
pub fn n1(f: f64, alpha: f64, s: f64) -> f64 {
    ((1.0 + alpha) * (1.0 - s) * (1.0 - f)).sqrt()
}

/// Square-root term of the attacked sophisticated Pool W fee.
pub fn n2(f: f64, alpha: f64, s: f64) -> f64 {
    let m = n1(f, alpha, s);
    ((2.0 * m * (1.0 + s) + (1.0 - s) * (2.0 + alpha * (1.0 - s) - s) - (1.0 + alpha) * f * (1.0 - s).powi(2))
        / (1.0 - s))
        .sqrt()
}

/// Post-attack reserve growth ratio of the attacked retail order.
pub fn n3(f: f64, alpha: f64, s: f64) -> f64 {
    let r = ((1.0 + alpha) * (1.0 - f)).sqrt();
    (r - 3.0 + ((r - 1.0).powi(2) + 4.0 * r / (1.0 - s)).sqrt()) / 2.0
}

/// Pool N fee per order per unit of Pool N Y-reserve.
fn unit_fee_n(f: f64, alpha: f64) -> f64 {
    f * (alpha / ((1.0 + alpha) * (1.0 - f)).sqrt() - f / (1.0 - f))
}

fn unit_fee_w_soph_unattacked(f: f64, alpha: f64, s: f64) -> f64 {
    let m = n1(f, alpha, s);
    f * (m - 1.0) * (1.0 - f + m) / ((1.0 - f) * m)
}

fn unit_fee_w_soph_attacked(f: f64, alpha: f64, s: f64, t: Transcription) -> f64 {
    let m = n1(f, alpha, s);
    let r = n2(f, alpha, s);
    let lead = match t {
        Transcription::Corrected => 2.0,
        Transcription::AsPublished => 1.0,
    };
    f * (m - 3.0 + r) * (m + 1.0 - 2.0 * f + r) / (lead * (1.0 - f) * (m - 1.0 + r))
}

fn unit_fee_w_retail_unattacked(f: f64, alpha: f64, t: Transcription) -> f64 {
    match t {
        Transcription::Corrected => unit_fee_n(f, alpha),
        Transcription::AsPublished => {
            f * (f + f * alpha - alpha * ((1.0 - f) * (1.0 - alpha)).sqrt()) / ((1.0 - f) * (1.0 - alpha))
        }
    }
}

fn unit_fee_w_retail_attacked(f: f64, alpha: f64, s: f64) -> f64 {
    let m = n3(f, alpha, s);
    f * (m / (1.0 - f) + m / (1.0 + m))
}

/// Evaluates the piecewise closed-form fee expressions. The regime (including
/// which flows are attacked) comes from the same attack rule as
/// [`fee_constructive`]; the attacked expressions assume the slippage-limited
/// front-run size.
pub fn fee_closed_form_with(market: &MarketConfig, trader: &TraderParams, t: Transcription) -> Result<FeeBreakdown> {
    let cls = classify(market, trader)?;
    let (f, alpha, s) = (market.fee, trader.alpha, trader.s);
    let y_n = market.p * market.y;
    let y_w = (1.0 - market.p) * market.y;
    let regime = cls.regime;
    let trades = regime != Regime::NoTrading;
    let soph_in_w = matches!(
        regime,
        Regime::NoAttack | Regime::RetailAttacked | Regime::BothAttacked | Regime::SophAttackedOnly
    );

    let fee_n = if trades { y_n * unit_fee_n(f, alpha) } else { 0.0 };
    let fee_w_soph = match (soph_in_w, cls.soph.executed) {
        (false, _) => 0.0,
        (true, false) => y_w * unit_fee_w_soph_unattacked(f, alpha, s),
        (true, true) => y_w * unit_fee_w_soph_attacked(f, alpha, s, t),
    };
    let fee_w_retail = match (trades, cls.retail.executed) {
        (false, _) => 0.0,
        (true, false) => y_w * unit_fee_w_retail_unattacked(f, alpha, t),
        (true, true) => y_w * unit_fee_w_retail_attacked(f, alpha, s),
    };
    Ok(FeeBreakdown::assemble(regime, market.omega, fee_n, fee_w_soph, fee_w_retail))
}

pub fn fee_closed_form(market: &MarketConfig, trader: &TraderParams) -> Result<FeeBreakdown> {
    fee_closed_form_with(market, trader, Transcription::Corrected)
}

/// Difference between two fee evaluations, component by component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub fee_n: f64,
    pub fee_w_soph: f64,
    pub fee_w_retail: f64,
    pub total: f64,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

impl Divergence {
    pub fn between(a: &FeeBreakdown, b: &FeeBreakdown) -> Self {
        Self {
            fee_n: rel_diff(a.fee_n, b.fee_n),
            fee_w_soph: rel_diff(a.fee_w_soph, b.fee_w_soph),
            fee_w_retail: rel_diff(a.fee_w_retail, b.fee_w_retail),
            total: rel_diff(a.total, b.total),
        }
    }

    pub fn max(&self) -> f64 {
        self.fee_n.max(self.fee_w_soph).max(self.fee_w_retail).max(self.total)
    }
}

/// One LP's liquidity share and its own split toward Pool N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpPosition {
    pub share: f64,
    pub p: f64,
}

impl LpPosition {
    pub fn new(share: f64, p: f64) -> Result<Self> {
        if !(share > 0.0 && share <= 1.0) {
            return Err(domain(format!("liquidity share must lie in (0, 1], got {share}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("split must lie in [0, 1], got {p}")));
        }
        Ok(Self { share, p })
    }
}

/// Checks that the shares of all LPs add up to one.
pub fn validate_positions(positions: &[LpPosition]) -> Result<()> {
    let total: f64 = positions.iter().map(|lp| lp.share).sum();
    if positions.is_empty() || (total - 1.0).abs() > 1e-12 {
        return Err(domain(format!("liquidity shares must sum to 1, got {total}")));
    }
    Ok(())
}

/// Fees earned by one LP: its share times the total fee at its own split.
/// `market.p` is ignored.
pub fn lp_fee(position: &LpPosition, market: &MarketConfig, trader: &TraderParams) -> Result<f64> {
    Ok(position.share * total_fee(&market.with_split(position.p), trader)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traders::{alpha_min_n, alpha_min_w};
    use proptest::prelude::*;

    fn market(p: f64, omega: f64) -> MarketConfig {
        MarketConfig::reference(p, omega)
    }

    fn trader(alpha: f64, s: f64) -> TraderParams {
        TraderParams::new(alpha, s).unwrap()
    }

    #[test]
    fn no_trading_below_pool_n_threshold() {
        let t = trader(0.002, 0.01);
        for p in [0.0, 0.3, 1.0] {
            let c = fee_constructive(&market(p, 0.5), &t).unwrap();
            assert_eq!(c.regime, Regime::NoTrading);
            assert_eq!(c.total, 0.0);
            assert_eq!(fee_closed_form(&market(p, 0.5), &t).unwrap().total, 0.0);
        }
    }

    #[test]
    fn all_in_pool_n_leaves_pool_w_empty() {
        let b = fee_constructive(&market(1.0, 0.3), &trader(0.05, 0.01)).unwrap();
        assert_eq!((b.fee_w_soph, b.fee_w_retail), (0.0, 0.0));
        assert!(b.fee_n > 0.0);
    }

    #[test]
    fn sophisticated_flow_between_thresholds_only_pays_in_pool_n() {
        let s = 0.02;
        let lo = alpha_min_n(0.003).unwrap();
        let hi = alpha_min_w(0.003, s).unwrap();
        let t = trader(0.5 * (lo + hi), s);
        let b = fee_constructive(&market(0.4, 0.0), &t).unwrap();
        assert!(matches!(b.regime, Regime::SophPoolNOnly | Regime::SophPoolNOnlyRetailAttacked));
        assert_eq!(b.fee_w_soph, 0.0);
        assert_eq!(b.total, b.fee_n);
    }

    #[test]
    fn pool_n_closed_form_vanishes_at_threshold() {
        let f = 0.003;
        assert!(unit_fee_n(f, alpha_min_n(f).unwrap()).abs() < 1e-18);
    }

    #[test]
    fn unattacked_closed_form_matches_constructive() {
        // s = 0 disables attacks entirely
        for alpha in [0.01, 0.05, 0.2] {
            let m = market(0.35, 0.2);
            let t = trader(alpha, 0.0);
            let c = fee_constructive(&m, &t).unwrap();
            let k = fee_closed_form(&m, &t).unwrap();
            assert_eq!(c.regime, Regime::NoAttack);
            assert!(Divergence::between(&c, &k).max() < 1e-9);
        }
    }

    #[test]
    fn attacked_closed_forms_match_constructive() {
        let m = market(0.35, 0.2);
        let t = trader(0.15, 0.01);
        let c = fee_constructive(&m, &t).unwrap();
        assert_eq!(c.regime, Regime::BothAttacked);
        let k = fee_closed_form(&m, &t).unwrap();
        assert!(Divergence::between(&c, &k).max() < 1e-9);
        let published = fee_closed_form_with(&m, &t, Transcription::AsPublished).unwrap();
        // published attacked sophisticated term is twice the derived one
        assert!((published.fee_w_soph / k.fee_w_soph - 2.0).abs() < 1e-12);
    }

    #[test]
    fn published_retail_unattacked_term_differs() {
        let m = market(0.5, 1.0);
        let t = trader(0.05, 0.0);
        let k = fee_closed_form(&m, &t).unwrap();
        let published = fee_closed_form_with(&m, &t, Transcription::AsPublished).unwrap();
        assert!(Divergence::between(&k, &published).fee_w_retail > 1e-3);
    }

    #[test]
    fn affine_in_p() {
        let t = trader(0.08, 0.01);
        let f = |p: f64| total_fee(&market(p, 0.01), &t).unwrap();
        let mid = f(0.5);
        assert!((mid - 0.5 * (f(0.0) + f(1.0))).abs() <= 1e-9 * mid);
    }

    #[test]
    fn retail_only_without_slippage_is_split_invariant() {
        let t = trader(0.1, 0.0);
        let f0 = total_fee(&market(0.0, 1.0), &t).unwrap();
        let f1 = total_fee(&market(1.0, 1.0), &t).unwrap();
        assert!((f0 - f1).abs() <= 1e-12 * f0);
    }

    #[test]
    fn lp_fee_scales_with_share() {
        let t = trader(0.08, 0.01);
        let m = market(0.9, 0.05);
        let full = lp_fee(&LpPosition::new(1.0, 0.3).unwrap(), &m, &t).unwrap();
        assert_eq!(full, total_fee(&m.with_split(0.3), &t).unwrap());
        let quarter = lp_fee(&LpPosition::new(0.25, 0.0).unwrap(), &m, &t).unwrap();
        assert_eq!(quarter, 0.25 * total_fee(&m.with_split(0.0), &t).unwrap());
        let lps = [0.1, 0.2, 0.3, 0.4].map(|share| LpPosition::new(share, 0.6).unwrap());
        validate_positions(&lps).unwrap();
        let sum: f64 = lps.iter().map(|lp| lp_fee(lp, &m, &t).unwrap()).sum();
        assert!((sum - total_fee(&m.with_split(0.6), &t).unwrap()).abs() <= 1e-12 * sum);
        assert!(validate_positions(&[LpPosition::new(0.5, 0.0).unwrap()]).is_err());
        assert!(LpPosition::new(0.0, 0.5).is_err());
    }

    #[test]
    fn continuity_at_thresholds() {
        let s = 0.01;
        let m = market(0.3, 0.01);
        for threshold in [alpha_min_n(0.003).unwrap(), alpha_min_w(0.003, s).unwrap()] {
            let below = total_fee(&m, &trader(threshold * (1.0 - 1e-12), s)).unwrap();
            let above = total_fee(&m, &trader(threshold * (1.0 + 1e-12), s)).unwrap();
            assert!((below - above).abs() < 1e-8, "{below} {above}");
        }
    }

    proptest! {
        #[test]
        fn sixteen_point_affinity(alpha in 0.004f64..0.3, s in 0.0f64..0.1, omega in 0.0f64..1.0) {
            let t = trader(alpha, s);
            let f0 = total_fee(&market(0.0, omega), &t).unwrap();
            let f1 = total_fee(&market(1.0, omega), &t).unwrap();
            for i in 0..=15 {
                let p = i as f64 / 15.0;
                let fp = total_fee(&market(p, omega), &t).unwrap();
                let line = f0 + p * (f1 - f0);
                prop_assert!((fp - line).abs() <= 1e-9 * f0.abs().max(f1.abs()).max(1e-300));
            }
        }
    }
}
