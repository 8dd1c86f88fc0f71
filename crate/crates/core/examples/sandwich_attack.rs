//! How much a front-runner can take from one victim order.

use sandwich_game::cpmm::PoolState;
use sandwich_game::sandwich::{
    attack_profit_closed_form, decide_attack, max_attack_input, min_victim_size, profit_maximizing_attack, AttackParams,
};

fn main() -> sandwich_game::Result<()> {
    let pool = PoolState::new(5_000_000.0, 5_000_000.0, 0.003)?;
    println!("smallest victim worth attacking: {:.1} X", min_victim_size(&pool, 0.0));

    println!("{:>9} {:>6} {:>12} {:>12} {:>12} {:>10}", "victim", "s", "a_s", "a*", "profit", "executed");
    for victim in [10_000.0, 20_000.0, 100_000.0, 500_000.0] {
        for s in [0.005, 0.02] {
            let params = AttackParams::new(victim, s, pool)?;
            let best = profit_maximizing_attack(&params, pool.x)?;
            let outcome = decide_attack(&params)?;
            println!(
                "{victim:>9.0} {s:>6} {:>12.1} {:>12.1} {:>12.3} {:>10}",
                max_attack_input(&params),
                best.argmax,
                outcome.profit,
                outcome.executed
            );
        }
    }

    let params = AttackParams::new(100_000.0, 0.01, pool)?;
    let a = max_attack_input(&params);
    let outcome = decide_attack(&params)?;
    println!(
        "victim keeps {:.4} of the quote; attacker nets {:.3} X (closed form {:.3})",
        outcome.victim_output / outcome.victim_expected,
        outcome.profit,
        attack_profit_closed_form(&params, a)
    );
    Ok(())
}
