//! Optimal order sizes for attack-aware and attack-oblivious traders.

use sandwich_game::market::MarketConfig;
use sandwich_game::oracle::numeric_optimal_plan;
use sandwich_game::traders::{alpha_min_n, alpha_min_w, optimal_trade, TraderKind, TraderParams};

fn main() -> sandwich_game::Result<()> {
    let market = MarketConfig::reference(0.5, 0.1);
    let s = 0.01;
    println!(
        "no trade below alpha = {:.5}; attack-aware traders skip Pool W below alpha = {:.5}",
        alpha_min_n(market.fee)?,
        alpha_min_w(market.fee, s)?
    );

    for alpha in [0.002, 0.01, 0.05, 0.15] {
        let trader = TraderParams::new(alpha, s)?;
        for kind in [TraderKind::Sophisticated, TraderKind::Retail] {
            let plan = optimal_trade(kind, &trader, &market);
            let numeric = numeric_optimal_plan(kind, alpha, s, &market)?;
            println!(
                "alpha {alpha:<5} {:<13} pool N {:>10.1}  pool W {:>10.1}  (numeric {:>10.1} / {:>10.1})",
                format!("{kind:?}"),
                plan.input_n,
                plan.input_w, numeric.input_n, numeric.input_w
            );
        }
    }
    Ok(())
}
