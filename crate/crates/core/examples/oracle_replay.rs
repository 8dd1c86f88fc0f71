//! Replaying every order of one configuration swap by swap.

use sandwich_game::market::MarketConfig;
use sandwich_game::oracle::{replay_sequence, ArbitrageMode};
use sandwich_game::traders::{optimal_trade_retail, optimal_trade_sophisticated, TraderParams};

fn main() -> sandwich_game::Result<()> {
    let market = MarketConfig::reference(0.5, 0.1);
    let trader = TraderParams::new(0.05, 0.01)?;
    let soph = optimal_trade_sophisticated(&trader, &market);
    let retail = optimal_trade_retail(&trader, &market);

    for mode in [ArbitrageMode::PrintedSize, ArbitrageMode::ExactRestoration] {
        let report = replay_sequence(&market, trader.s, &soph, &retail, true, mode)?;
        println!(
            "{mode:?}: regime {}  F {:.4}  price residual {:.2e}",
            report.fees.regime.label(),
            report.fees.total,
            report.max_price_residual()
        );
    }

    let report = replay_sequence(&market, trader.s, &soph, &retail, true, ArbitrageMode::PrintedSize)?;
    let Some(retail_w) = &report.pool_w_retail else { return Ok(()) };
    println!("retail order in Pool W:");
    for leg in &retail_w.legs {
        println!(
            "  {:<11} {:<7} in {:>12.3} out {:>12.3} fee {:>9.3}",
            format!("{:?}", leg.kind),
            format!("{:?}", leg.direction), leg.input, leg.output, leg.fee_paid
        );
    }
    Ok(())
}
