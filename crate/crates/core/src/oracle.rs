//! Brute-force reference engine. Every order is replayed swap by swap through
//! the pool primitives, attack sizes come from bisection on the replayed
//! slippage guard, and optimal order sizes from numeric maximization of the
//! replayed utility. Nothing here evaluates the closed forms of the attack,
//! sizing or fee modules, so agreement with them is a real check.

use serde::{Deserialize, Serialize};

use crate::cpmm::{swap_x_for_y, swap_y_for_x, PoolState};
use crate::error::{domain, Error, Result};
use crate::fee_model::{FeeBreakdown, Regime};
use crate::market::MarketConfig;
use crate::optimize::{bisect_sign_change, maximize_from_zero, maximize_on_bracket, Maximum};
use crate::sandwich::AttackOutcome;
use crate::traders::{TradePlan, TraderKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegKind {
    FrontRun,
    Victim,
    BackRun,
    Arbitrage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    XForY,
    YForX,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub kind: LegKind,
    pub direction: Direction,
    pub input: f64,
    pub output: f64,
    /// Fee in the input token.
    pub fee_paid: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeSequence {
    pub initial: PoolState,
    pub legs: Vec<Leg>,
    pub final_pool: PoolState,
}

impl TradeSequence {
    fn start(pool: PoolState) -> Self {
        Self {
            initial: pool,
            legs: Vec::new(),
            final_pool: pool,
        }
    }

    fn push(&mut self, kind: LegKind, direction: Direction, input: f64) -> Result<f64> {
        let r = match direction {
            Direction::XForY => swap_x_for_y(&self.final_pool, input)?,
            Direction::YForX => swap_y_for_x(&self.final_pool, input)?,
        };
        self.legs.push(Leg {
            kind,
            direction,
            input,
            output: r.output,
            fee_paid: r.fee_paid,
        });
        self.final_pool = r.new_pool;
        Ok(r.output)
    }

    /// Total fees in Y, converting X-denominated fees at `price`.
    pub fn fees_in_y(&self, price: f64) -> f64 {
        self.legs
            .iter()
            .map(|leg| match leg.direction {
                Direction::XForY => leg.fee_paid * price,
                Direction::YForX => leg.fee_paid,
            })
            .sum()
    }

    /// Relative gap between the final and initial marginal price.
    pub fn price_residual(&self) -> f64 {
        let p0 = self.initial.marginal_price();
        (self.final_pool.marginal_price() - p0).abs() / p0
    }

    /// Net Y-tokens taken out of the pool by traders: Y received in X->Y legs
    /// minus Y paid into Y->X legs.
    fn net_y_removed(&self) -> f64 {
        self.legs
            .iter()
            .map(|leg| match leg.direction {
                Direction::XForY => leg.output,
                Direction::YForX => -leg.input,
            })
            .sum()
    }
}

/// How the closing arbitrage trade is sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArbitrageMode {
    /// The Y-amount removed by the preceding legs. With input-side fees this
    /// leaves the pool short of its starting Y reserve by the fee.
    PrintedSize,
    /// Whatever Y input returns the Y reserve exactly to its starting level.
    ExactRestoration,
}

fn arbitrage(seq: &mut TradeSequence, mode: ArbitrageMode) -> Result<()> {
    let size = match mode {
        ArbitrageMode::PrintedSize => seq.net_y_removed(),
        ArbitrageMode::ExactRestoration => (seq.initial.y - seq.final_pool.y) / (1.0 - seq.initial.fee),
    };
    if size > 0.0 {
        seq.push(LegKind::Arbitrage, Direction::YForX, size)?;
    }
    Ok(())
}

/// Value with its derivative along one input, for replaying a swap sequence
/// and its sensitivity together.
#[derive(Debug, Clone, Copy)]
struct Dual {
    v: f64,
    d: f64,
}

impl Dual {
    fn constant(v: f64) -> Self {
        Self { v, d: 0.0 }
    }

    fn variable(v: f64) -> Self {
        Self { v, d: 1.0 }
    }

    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: self.d + o.d }
    }

    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d: self.d - o.d }
    }

    fn scale(self, c: f64) -> Self {
        Self { v: self.v * c, d: self.d * c }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }

    fn div(self, o: Self) -> Self {
        Self {
            v: self.v / o.v,
            d: (self.d * o.v - self.v * o.d) / (o.v * o.v),
        }
    }
}

/// Output of one swap, input-side fee, on dual numbers.
fn dual_swap(reserve_in: Dual, reserve_out: Dual, fee: f64, input: Dual) -> Dual {
    let effective = input.scale(1.0 - fee);
    reserve_out.mul(effective).div(reserve_in.add(effective))
}

/// Derivative of replayed sandwich profit in the front-run size.
fn replayed_profit_slope(pool: &PoolState, victim_input: f64, attack_input: f64) -> f64 {
    let f = pool.fee;
    let (x, y) = (Dual::constant(pool.x), Dual::constant(pool.y));
    let a = Dual::variable(attack_input);
    let victim = Dual::constant(victim_input);
    let bought = dual_swap(x, y, f, a);
    let (x1, y1) = (x.add(a.scale(1.0 - f)), y.sub(bought));
    let victim_out = dual_swap(x1, y1, f, victim);
    let (x2, y2) = (x1.add(victim.scale(1.0 - f)), y1.sub(victim_out));
    dual_swap(y2, x2, f, bought).d - 1.0
}

/// Derivative of replayed single-pool utility in the order size.
fn replayed_marginal_utility(pool: &PoolState, input: f64, alpha: f64, keep: f64, price: f64) -> f64 {
    let out = dual_swap(Dual::constant(pool.x), Dual::constant(pool.y), pool.fee, Dual::variable(input));
    (1.0 + alpha) * keep * out.d - price
}

/// Front-run, victim and back-run replayed without any slippage guard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReplay {
    /// X recovered by the back-run minus X spent in the front-run.
    pub profit: f64,
    pub victim_output: f64,
    pub victim_expected: f64,
    pub sequence: TradeSequence,
}

pub fn replay_sandwich(pool: &PoolState, victim_input: f64, attack_input: f64) -> Result<SandwichReplay> {
    let victim_expected = swap_x_for_y(pool, victim_input)?.output;
    let mut seq = TradeSequence::start(*pool);
    let bought = seq.push(LegKind::FrontRun, Direction::XForY, attack_input)?;
    let victim_output = seq.push(LegKind::Victim, Direction::XForY, victim_input)?;
    let recovered = seq.push(LegKind::BackRun, Direction::YForX, bought)?;
    Ok(SandwichReplay {
        profit: recovered - attack_input,
        victim_output,
        victim_expected,
        sequence: seq,
    })
}

fn victim_output_after(pool: &PoolState, victim_input: f64, attack_input: f64) -> Result<f64> {
    let front = swap_x_for_y(pool, attack_input)?;
    Ok(swap_x_for_y(&front.new_pool, victim_input)?.output)
}

/// Largest front-run that still lets the victim's slippage guard pass, by
/// bisection on the replayed victim output.
pub fn slippage_limit_by_bisection(pool: &PoolState, victim_input: f64, s: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(domain(format!("slippage tolerance must lie in [0, 1), got {s}")));
    }
    if s == 0.0 || victim_input == 0.0 {
        return Ok(0.0);
    }
    let floor = (1.0 - s) * swap_x_for_y(pool, victim_input)?.output;
    let passes = |a: f64| victim_output_after(pool, victim_input, a).map(|out| out >= floor);
    let mut lo = 0.0;
    let mut hi = pool.x * 1e-12;
    while passes(hi)? {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numeric("slippage limit bracket diverged".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Attack decision from replays only: the front-run maximizes replayed
/// profit within the slippage limit and executes if that profit is positive.
/// The maximum is located where the replayed profit slope changes sign.
pub fn replay_attack_decision(pool: &PoolState, victim_input: f64, s: f64) -> Result<AttackOutcome> {
    let victim_expected = swap_x_for_y(pool, victim_input)?.output;
    let idle = AttackOutcome {
        attack_input: 0.0,
        attack_output: 0.0,
        profit: 0.0,
        victim_output: victim_expected,
        victim_expected,
        executed: false,
    };
    let limit = slippage_limit_by_bisection(pool, victim_input, s)?;
    if limit <= 0.0 {
        return Ok(idle);
    }
    let slope = |a: f64| replayed_profit_slope(pool, victim_input, a);
    let size = if slope(limit) > 0.0 {
        limit
    } else if !(slope(0.0) > 0.0) {
        0.0
    } else {
        bisect_sign_change(slope, 0.0, limit)?
    };
    let replay = replay_sandwich(pool, victim_input, size)?;
    if !(replay.profit > 0.0) {
        return Ok(idle);
    }
    Ok(AttackOutcome {
        attack_input: size,
        attack_output: size + replay.profit,
        profit: replay.profit,
        victim_output: replay.victim_output,
        victim_expected,
        executed: true,
    })
}

/// One order and its arbitrage in Pool N.
fn replay_plain_order(pool: &PoolState, input: f64, mode: ArbitrageMode) -> Result<TradeSequence> {
    let mut seq = TradeSequence::start(*pool);
    seq.push(LegKind::Victim, Direction::XForY, input)?;
    arbitrage(&mut seq, mode)?;
    Ok(seq)
}

/// One Pool W order: optional sandwich, the order itself, and the arbitrage.
fn replay_w_order(
    pool: &PoolState,
    input: f64,
    s: f64,
    with_attack: bool,
    mode: ArbitrageMode,
) -> Result<(AttackOutcome, TradeSequence)> {
    let decision = if with_attack && input > 0.0 {
        replay_attack_decision(pool, input, s)?
    } else {
        let expected = swap_x_for_y(pool, input)?.output;
        AttackOutcome {
            attack_input: 0.0,
            attack_output: 0.0,
            profit: 0.0,
            victim_output: expected,
            victim_expected: expected,
            executed: false,
        }
    };
    let mut seq = TradeSequence::start(*pool);
    if decision.executed {
        let bought = seq.push(LegKind::FrontRun, Direction::XForY, decision.attack_input)?;
        seq.push(LegKind::Victim, Direction::XForY, input)?;
        seq.push(LegKind::BackRun, Direction::YForX, bought)?;
    } else {
        seq.push(LegKind::Victim, Direction::XForY, input)?;
    }
    arbitrage(&mut seq, mode)?;
    Ok((decision, seq))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub fees: FeeBreakdown,
    pub soph_attack: AttackOutcome,
    pub retail_attack: AttackOutcome,
    /// Pool N order, sophisticated Pool W order, retail Pool W order; a
    /// sequence is absent when its pool is empty.
    pub pool_n: Option<TradeSequence>,
    pub pool_w_soph: Option<TradeSequence>,
    pub pool_w_retail: Option<TradeSequence>,
}

impl ReplayReport {
    pub fn sequences(&self) -> impl Iterator<Item = &TradeSequence> {
        [&self.pool_n, &self.pool_w_soph, &self.pool_w_retail]
            .into_iter()
            .flatten()
    }

    pub fn max_price_residual(&self) -> f64 {
        self.sequences().map(TradeSequence::price_residual).fold(0.0, f64::max)
    }
}

/// Replay one sophisticated and one retail order through both pools at the
/// market's split. Order sizes are supplied by the caller. Pool N orders use
/// the sophisticated plan's Pool N input (both cohorts send the same amount
/// there). The regime label reflects what the replay observed.
pub fn replay_sequence(
    market: &MarketConfig,
    s: f64,
    soph: &TradePlan,
    retail: &TradePlan,
    with_attack: bool,
    mode: ArbitrageMode,
) -> Result<ReplayReport> {
    market.validate()?;
    let price = market.price();
    let pool_n = match market.pool_n() {
        Some(pool) => Some(replay_plain_order(&pool, soph.input_n, mode)?),
        None => None,
    };
    let idle = AttackOutcome {
        attack_input: 0.0,
        attack_output: 0.0,
        profit: 0.0,
        victim_output: 0.0,
        victim_expected: 0.0,
        executed: false,
    };
    let (soph_attack, pool_w_soph, retail_attack, pool_w_retail) = match market.pool_w() {
        Some(pool) => {
            let (sa, ss) = replay_w_order(&pool, soph.input_w, s, with_attack, mode)?;
            let (ra, rs) = replay_w_order(&pool, retail.input_w, s, with_attack, mode)?;
            (sa, Some(ss), ra, Some(rs))
        }
        None => (idle, None, idle, None),
    };
    let fee_of = |seq: &Option<TradeSequence>| seq.as_ref().map_or(0.0, |q| q.fees_in_y(price));
    let fee_n = fee_of(&pool_n);
    let fee_w_soph = fee_of(&pool_w_soph);
    let fee_w_retail = fee_of(&pool_w_retail);
    let trades = soph.input_n > 0.0 || retail.input_n > 0.0 || retail.input_w > 0.0;
    let regime = Regime::from_flags(trades, soph.input_w > 0.0, soph_attack.executed, retail_attack.executed);
    Ok(ReplayReport {
        fees: FeeBreakdown {
            regime,
            fee_n,
            fee_w_soph,
            fee_w_retail,
            total: fee_n + (1.0 - market.omega) * fee_w_soph + market.omega * fee_w_retail,
            attack_soph: soph_attack.executed,
            attack_retail: retail_attack.executed,
        },
        soph_attack,
        retail_attack,
        pool_n,
        pool_w_soph,
        pool_w_retail,
    })
}

/// Golden-section maximization with a dense-scan fallback on `[lo, hi]`.
pub fn numeric_max_utility<F: Fn(f64) -> f64>(utility: F, lo: f64, hi: f64) -> Result<Maximum> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(domain(format!("bracket must satisfy lo < hi, got [{lo}, {hi}]")));
    }
    maximize_on_bracket(utility, lo, hi)
}

/// Utility of one leg from a replayed swap: benefit on the Y kept minus the
/// X paid at the fair price.
fn replayed_leg_utility(pool: Option<PoolState>, input: f64, alpha: f64, keep: f64, price: f64) -> f64 {
    match pool {
        Some(pool) => swap_x_for_y(&pool, input).map_or(f64::NAN, |r| (1.0 + alpha) * keep * r.output - price * input),
        None => 0.0,
    }
}

/// Order sizes found by maximizing replayed utility in each pool separately.
/// Golden-section search brackets the optimum; the bracket is then narrowed to
/// where the replayed marginal utility changes sign, since comparing utility
/// values cannot resolve the optimum of a small order much better than
/// `sqrt(machine epsilon * reserve / order)`.
pub fn numeric_optimal_plan(kind: TraderKind, alpha: f64, s: f64, market: &MarketConfig) -> Result<TradePlan> {
    market.validate()?;
    let price = market.price();
    let keep_w = match kind {
        TraderKind::Sophisticated => 1.0 - s,
        TraderKind::Retail => 1.0,
    };
    let best = |pool: Option<PoolState>, keep: f64| -> Result<f64> {
        let Some(pool) = pool else { return Ok(0.0) };
        let coarse = maximize_from_zero(|d| replayed_leg_utility(Some(pool), d, alpha, keep, price), pool.x)?;
        let marginal = |d: f64| replayed_marginal_utility(&pool, d, alpha, keep, price);
        if !(marginal(0.0) > 0.0) {
            return Ok(0.0);
        }
        let mut lo = 0.5 * coarse.argmax;
        let mut hi = 2.0 * coarse.argmax.max(1e-12 * pool.x);
        while !(marginal(lo) > 0.0) {
            lo *= 0.5;
            if lo < 1e-300 {
                lo = 0.0;
                break;
            }
        }
        while marginal(hi) > 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Numeric("marginal utility stays positive".into()));
            }
        }
        bisect_sign_change(marginal, lo, hi)
    };
    Ok(TradePlan {
        input_n: best(market.pool_n(), 1.0)?,
        input_w: best(market.pool_w(), keep_w)?,
    })
}
