//! LP fee per order across the regimes of the fee function.

use sandwich_game::fee_model::{fee_closed_form, fee_closed_form_with, fee_constructive, Divergence, Transcription};
use sandwich_game::market::MarketConfig;
use sandwich_game::traders::TraderParams;

fn main() -> sandwich_game::Result<()> {
    let market = MarketConfig::reference(0.5, 0.1);
    for (alpha, s) in [(0.002, 0.01), (0.01, 0.05), (0.03, 0.001), (0.05, 0.05), (0.15, 0.01)] {
        let trader = TraderParams::new(alpha, s)?;
        let built = fee_constructive(&market, &trader)?;
        let closed = fee_closed_form(&market, &trader)?;
        let printed = fee_closed_form_with(&market, &trader, Transcription::AsPublished)?;
        println!(
            "alpha {alpha:<5} s {s:<5} {:<34} F {:>11.3}  N {:>10.3}  W/soph {:>10.3}  W/retail {:>10.3}",
            built.regime.label(),
            built.total,
            built.fee_n,
            built.fee_w_soph,
            built.fee_w_retail
        );
        println!(
            "    closed form gap {:.1e}, literal transcription gap {:.1e}",
            Divergence::between(&built, &closed).max(),
            Divergence::between(&built, &printed).max()
        );
    }
    Ok(())
}
