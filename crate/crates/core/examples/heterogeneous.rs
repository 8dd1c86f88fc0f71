//! Traders with a spread of benefits instead of one common alpha.

use sandwich_game::equilibrium::{classify_nash, classify_nash_heterogeneous, expected_fee, AlphaDistribution};
use sandwich_game::market::MarketConfig;
use sandwich_game::traders::TraderParams;

fn main() -> sandwich_game::Result<()> {
    let market = MarketConfig::reference(0.5, 0.01);
    let (mean, s) = (0.03, 0.01);
    let homogeneous = classify_nash(&market, &TraderParams::new(mean, s)?)?;
    println!("single alpha {mean}: {} (delta_F {:+.4})", homogeneous.nash.label(), homogeneous.delta_f);

    for k in [1000.0, 10.0, 3.0, 1.5] {
        let dist = AlphaDistribution::two_point(mean, k)?;
        let support: Vec<String> = dist.support().iter().map(|p| format!("{:.4}", p.alpha)).collect();
        let v = classify_nash_heterogeneous(&market, &dist, s)?;
        println!(
            "k {k:<6} support [{}]  expected F {:>9.2}  {} (delta_F {:+.4})",
            support.join(", "),
            expected_fee(&market, &dist, s)?,
            v.nash.label(),
            v.delta_f
        );
    }
    Ok(())
}
