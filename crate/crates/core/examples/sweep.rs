//! A small (alpha, s) sweep written as CSV, plus a text map of the verdicts.

use sandwich_game::equilibrium::NashLocation;
use sandwich_game::sweep::{run_sweep, write_csv, SweepSpec};

fn main() -> sandwich_game::Result<()> {
    let spec = SweepSpec::from_toml_str(
        r#"
        omega = 0.01
        epsilon = [0.01]

        [alpha]
        min = 0.005
        max = 0.2
        steps = 40

        [s]
        min = 0.0025
        max = 0.1
        steps = 40
        "#,
    )?;
    let records = run_sweep(&spec)?;

    // rows: alpha from high to low, columns: s from low to high
    let cols = spec.s.steps;
    for row in records.chunks(cols).rev() {
        let line: String = row
            .iter()
            .map(|r| match r.nash {
                NashLocation::PoolN => 'N',
                NashLocation::PoolW => 'W',
                NashLocation::All => '.',
            })
            .collect();
        println!("{:.3} {line}", row[0].alpha);
    }

    let path = std::env::temp_dir().join("sandwich_sweep.csv");
    write_csv(&records, std::fs::File::create(&path).expect("temp file"))?;
    println!("{} rows written to {}", records.len(), path.display());
    Ok(())
}
