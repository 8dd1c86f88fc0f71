//! Single swaps on a constant-product pool.

use sandwich_game::cpmm::{expected_output_no_interference, min_acceptable_output, swap_x_for_y, swap_y_for_x, PoolState};

fn main() -> sandwich_game::Result<()> {
    let pool = PoolState::new(5_000_000.0, 5_000_000.0, 0.003)?;
    println!("price {:.6}  k {:.3e}", pool.marginal_price(), pool.invariant());

    for dx in [1_000.0, 50_000.0, 500_000.0] {
        let out = swap_x_for_y(&pool, dx)?;
        let impact = 1.0 - out.output / (dx * pool.marginal_price());
        println!(
            "sell {dx:>9.0} X -> {:>12.3} Y  fee {:>8.2} X  price after {:.6}  shortfall {:.4}",
            out.output,
            out.fee_paid,
            out.new_pool.marginal_price(),
            impact
        );
    }

    let there = swap_x_for_y(&pool, 100_000.0)?;
    let back = swap_y_for_x(&there.new_pool, there.output)?;
    println!("round trip of 100,000 X returns {:.3} X", back.output);

    let expected = expected_output_no_interference(&pool, 100_000.0)?;
    println!("with s = 1 % the order accepts at least {:.3} Y", min_acceptable_output(expected, 0.01)?);
    Ok(())
}
