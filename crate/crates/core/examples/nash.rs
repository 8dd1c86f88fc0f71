//! Where liquidity settles, and how far from indifference LPs are.

use sandwich_game::equilibrium::{classify_nash, is_epsilon_equilibrium};
use sandwich_game::fee_model::LpPosition;
use sandwich_game::market::MarketConfig;
use sandwich_game::traders::TraderParams;

fn main() -> sandwich_game::Result<()> {
    let trader = TraderParams::new(0.05, 0.01)?;
    for omega in [0.0, 0.01, 0.1, 0.5, 1.0] {
        let market = MarketConfig::reference(0.5, omega);
        let v = classify_nash(&market, &trader)?;
        println!(
            "omega {omega:<4} F(0) {:>9.2}  F(1) {:>9.2}  delta_F {:>+8.4}  nash {}",
            v.f0,
            v.f1,
            v.delta_f,
            v.nash.label()
        );
    }

    let market = MarketConfig::reference(0.5, 0.01);
    let positions = [LpPosition::new(0.6, 1.0)?, LpPosition::new(0.4, 0.3)?];
    for eps in [0.0, 0.01, 0.1] {
        let check = is_epsilon_equilibrium(&positions, &market, &trader, eps)?;
        match check.worst {
            Some(w) if !check.is_equilibrium => {
                println!("eps {eps:<4} no: LP {} gains a factor {:.4}", w.index, w.improvement_ratio)
            }
            _ => println!("eps {eps:<4} yes"),
        }
    }
    Ok(())
}
