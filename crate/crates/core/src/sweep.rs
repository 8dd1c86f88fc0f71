//! Parameter sweeps over `(alpha, s)` grids, CSV output, and single-point
//! reports.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    classify_nash, classify_nash_heterogeneous, is_epsilon_equilibrium, AlphaDistribution, EquilibriumVerdict,
    NashLocation,
};
use crate::error::{config, domain, Error, Result};
use crate::fee_model::{
    classify, fee_closed_form, fee_closed_form_with, fee_constructive, Divergence, FeeBreakdown, LpPosition, Regime,
    Transcription,
};
use crate::market::MarketConfig;
use crate::oracle::{replay_sequence, ArbitrageMode};
use crate::sandwich::AttackOutcome;
use crate::traders::{optimal_trade_retail, optimal_trade_sophisticated, TraderParams};

pub const CSV_HEADER: [&str; 12] = [
    "alpha", "s", "omega", "F0", "F1", "grad_f", "delta_f", "clamped", "nash", "regime", "attack_soph", "attack_retail",
];

/// Relative gap above which two fee evaluations are reported as diverging.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-9;

/// Linear grid from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    /// `steps` evenly spaced points on `(0, max]`.
    pub fn half_open(max: f64, steps: usize) -> Self {
        Self {
            min: max / steps as f64,
            max,
            steps,
        }
    }

    fn validate(&self, path: &str) -> Result<()> {
        if self.steps == 0 {
            return Err(config(format!("{path}.steps"), "must be at least 1"));
        }
        if !(self.min.is_finite() && self.min > 0.0) {
            return Err(config(format!("{path}.min"), format!("must be positive, got {}", self.min)));
        }
        if !(self.max.is_finite() && self.max >= self.min) {
            return Err(config(format!("{path}.max"), format!("must be at least min, got {}", self.max)));
        }
        if self.steps == 1 && self.max != self.min {
            return Err(config(format!("{path}.steps"), "a single step needs min == max"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaSpec {
    One(f64),
    Many(Vec<f64>),
}

impl OmegaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OmegaSpec::One(w) => vec![*w],
            OmegaSpec::Many(ws) => ws.clone(),
        }
    }
}

/// Two-point benefit distribution centred on each grid `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPointSpec {
    pub k: f64,
}

fn default_reserve() -> f64 {
    5_000_000.0
}

fn default_fee() -> f64 {
    0.003
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub alpha: GridAxis,
    pub s: GridAxis,
    pub omega: OmegaSpec,
    #[serde(default = "default_reserve")]
    pub x: f64,
    #[serde(default = "default_reserve")]
    pub y: f64,
    #[serde(default = "default_fee")]
    pub fee: f64,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub distribution: Option<TwoPointSpec>,
}

impl SweepSpec {
    /// The figure grid: `alpha` in (0, 0.2], `s` in (0, 0.1], reference market.
    pub fn canonical(omega: f64, alpha_steps: usize, s_steps: usize) -> Self {
        Self {
            alpha: GridAxis::half_open(0.2, alpha_steps),
            s: GridAxis::half_open(0.1, s_steps),
            omega: OmegaSpec::One(omega),
            x: default_reserve(),
            y: default_reserve(),
            fee: default_fee(),
            epsilon: Vec::new(),
            distribution: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| config("(document)", e.message().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.validate("alpha")?;
        self.s.validate("s")?;
        if self.s.max >= 1.0 {
            return Err(config("s.max", format!("must be below 1, got {}", self.s.max)));
        }
        let omegas = self.omega.values();
        if omegas.is_empty() {
            return Err(config("omega", "needs at least one value"));
        }
        for (i, w) in omegas.iter().enumerate() {
            if !(0.0..=1.0).contains(w) {
                return Err(config(format!("omega[{i}]"), format!("must lie in [0, 1], got {w}")));
            }
        }
        for (field, v) in [("x", self.x), ("y", self.y)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config(field, format!("must be positive, got {v}")));
            }
        }
        if !(self.fee > 0.0 && self.fee < 1.0) {
            return Err(config("fee", format!("must lie in (0, 1), got {}", self.fee)));
        }
        for (i, e) in self.epsilon.iter().enumerate() {
            if !(e.is_finite() && *e >= 0.0) {
                return Err(config(format!("epsilon[{i}]"), format!("must be non-negative, got {e}")));
            }
        }
        if let Some(d) = self.distribution {
            if !(d.k > 1.0) {
                return Err(config("distribution.k", format!("must exceed 1, got {}", d.k)));
            }
        }
        Ok(())
    }

    pub fn market(&self, omega: f64) -> Result<MarketConfig> {
        MarketConfig::new(self.x, self.y, self.fee, 0.0, omega)
    }

    pub fn point_count(&self) -> usize {
        self.alpha.steps * self.s.steps * self.omega.values().len()
    }
}

/// The canonical figure sweeps, keyed by output file stem. The two Nash-region
/// figures and the two gradient figures share a grid and differ only in how
/// they are rendered.
pub fn figure_specs(alpha_steps: usize, s_steps: usize) -> Vec<(&'static str, SweepSpec)> {
    let base = |omega: f64| SweepSpec::canonical(omega, alpha_steps, s_steps);
    let two_point = |k: f64| SweepSpec {
        distribution: Some(TwoPointSpec { k }),
        ..base(0.01)
    };
    vec![
        ("fig2a", base(0.01)),
        ("fig2b", base(0.1)),
        ("fig3a", base(0.01)),
        ("fig3b", base(0.1)),
        ("appendixA_k10", two_point(10.0)),
        ("appendixA_k3", two_point(3.0)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub s: f64,
    pub omega: f64,
    pub f0: f64,
    pub f1: f64,
    pub grad_f: f64,
    pub delta_f: f64,
    pub clamped: bool,
    pub nash: NashLocation,
    pub regime: Regime,
    pub attack_soph: bool,
    pub attack_retail: bool,
}

impl SweepRecord {
    fn from_verdict(alpha: f64, s: f64, omega: f64, v: &EquilibriumVerdict, regime: Regime, soph: bool, retail: bool) -> Self {
        Self {
            alpha,
            s,
            omega,
            f0: v.f0,
            f1: v.f1,
            grad_f: v.grad_f,
            delta_f: v.delta_f,
            clamped: v.is_clamped(),
            nash: v.nash,
            regime,
            attack_soph: soph,
            attack_retail: retail,
        }
    }

    /// Fields in `CSV_HEADER` order; infinities print as `inf` / `-inf`.
    pub fn csv_fields(&self) -> [String; 12] {
        [
            self.alpha.to_string(),
            self.s.to_string(),
            self.omega.to_string(),
            self.f0.to_string(),
            self.f1.to_string(),
            self.grad_f.to_string(),
            self.delta_f.to_string(),
            self.clamped.to_string(),
            self.nash.label().to_string(),
            self.regime.label().to_string(),
            self.attack_soph.to_string(),
            self.attack_retail.to_string(),
        ]
    }
}

/// One grid point. Under a two-point distribution the regime is that of the
/// mean trader and an attack flag is set if any support point is attacked.
pub fn evaluate_point(
    market: &MarketConfig,
    alpha: f64,
    s: f64,
    distribution: Option<TwoPointSpec>,
) -> Result<SweepRecord> {
    let trader = TraderParams::new(alpha, s)?;
    match distribution {
        None => {
            let v = classify_nash(market, &trader)?;
            let c = classify(market, &trader)?;
            Ok(SweepRecord::from_verdict(alpha, s, market.omega, &v, c.regime, c.soph.executed, c.retail.executed))
        }
        Some(d) => {
            let dist = AlphaDistribution::two_point(alpha, d.k)?;
            let v = classify_nash_heterogeneous(market, &dist, s)?;
            let regime = classify(market, &trader)?.regime;
            let (mut soph, mut retail) = (false, false);
            for pt in dist.support() {
                let c = classify(market, &TraderParams::new(pt.alpha, s)?)?;
                soph |= c.soph.executed;
                retail |= c.retail.executed;
            }
            Ok(SweepRecord::from_verdict(alpha, s, market.omega, &v, regime, soph, retail))
        }
    }
}

/// Evaluate every grid point; ordered by omega, then alpha, then s.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let alphas = spec.alpha.points();
    let ss = spec.s.points();
    let mut records = Vec::with_capacity(spec.point_count());
    for omega in spec.omega.values() {
        let market = spec.market(omega)?;
        let chunk: Result<Vec<SweepRecord>> = (0..alphas.len() * ss.len())
            .into_par_iter()
            .map(|i| evaluate_point(&market, alphas[i / ss.len()], ss[i % ss.len()], spec.distribution))
            .collect();
        records.extend(chunk?);
    }
    Ok(records)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Numeric(format!("csv output failed: {e}"))
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record(r.csv_fields()).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Numeric(format!("csv output failed: {e}")))
}

/// Share of records, per epsilon, where every liquidity split is an
/// epsilon-equilibrium (`|delta_f| <= epsilon`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    pub points: usize,
    pub indifferent: usize,
}

pub fn epsilon_summary(records: &[SweepRecord], epsilons: &[f64]) -> Vec<EpsilonSummary> {
    epsilons
        .iter()
        .map(|&epsilon| EpsilonSummary {
            epsilon,
            points: records.len(),
            indifferent: records.iter().filter(|r| r.delta_f.abs() <= epsilon).count(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonVerdict {
    pub epsilon: f64,
    pub is_equilibrium: bool,
    pub improvement_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub market: MarketConfig,
    pub trader: TraderParams,
    pub constructive: FeeBreakdown,
    pub closed_form: FeeBreakdown,
    pub as_published: FeeBreakdown,
    pub oracle: FeeBreakdown,
    pub closed_form_divergence: f64,
    pub diverges: bool,
    pub as_published_divergence: f64,
    pub oracle_divergence: f64,
    pub oracle_agrees: bool,
    /// Largest relative price gap left by the arbitrage leg as sized in the model.
    pub arbitrage_price_residual: f64,
    pub soph_attack: AttackOutcome,
    pub retail_attack: AttackOutcome,
    pub verdict: EquilibriumVerdict,
    /// One LP holding everything at `market.p`.
    pub epsilon: Vec<EpsilonVerdict>,
}

/// Every evaluation path at one `(market, trader)` point.
pub fn run_point(market: &MarketConfig, trader: &TraderParams, epsilons: &[f64]) -> Result<PointReport> {
    market.validate()?;
    let constructive = fee_constructive(market, trader)?;
    let closed_form = fee_closed_form(market, trader)?;
    let as_published = fee_closed_form_with(market, trader, Transcription::AsPublished)?;
    let soph = optimal_trade_sophisticated(trader, market);
    let retail = optimal_trade_retail(trader, market);
    let replay = replay_sequence(market, trader.s, &soph, &retail, true, ArbitrageMode::PrintedSize)?;
    let cls = classify(market, trader)?;
    let closed_form_divergence = Divergence::between(&constructive, &closed_form).max();
    let oracle_divergence = Divergence::between(&constructive, &replay.fees).max();
    let position = [LpPosition::new(1.0, market.p)?];
    let epsilon = epsilons
        .iter()
        .map(|&e| {
            if !(e.is_finite() && e >= 0.0) {
                return Err(domain(format!("epsilon must be non-negative, got {e}")));
            }
            let check = is_epsilon_equilibrium(&position, market, trader, e)?;
            Ok(EpsilonVerdict {
                epsilon: e,
                is_equilibrium: check.is_equilibrium,
                improvement_ratio: check.worst.map_or(1.0, |w| w.improvement_ratio),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointReport {
        market: *market,
        trader: *trader,
        constructive,
        closed_form,
        as_published,
        oracle: replay.fees,
        closed_form_divergence,
        diverges: closed_form_divergence > DIVERGENCE_TOLERANCE,
        as_published_divergence: Divergence::between(&constructive, &as_published).max(),
        oracle_divergence,
        oracle_agrees: oracle_divergence <= DIVERGENCE_TOLERANCE,
        arbitrage_price_residual: replay.max_price_residual(),
        soph_attack: cls.soph,
        retail_attack: cls.retail,
        verdict: classify_nash(market, trader)?,
        epsilon,
    })
}

impl std::fmt::Display for PointReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m = &self.market;
        writeln!(f, "market   x={} y={} fee={} p={} omega={}", m.x, m.y, m.fee, m.p, m.omega)?;
        writeln!(f, "trader   alpha={} s={}", self.trader.alpha, self.trader.s)?;
        writeln!(f, "regime   {}", self.constructive.regime.label())?;
        writeln!(f, "fees     {:<14} {:>16} {:>16} {:>16} {:>16}", "", "pool_n", "w_soph", "w_retail", "total")?;
        for (name, b) in [
            ("constructive", &self.constructive),
            ("closed_form", &self.closed_form),
            ("as_published", &self.as_published),
            ("oracle", &self.oracle),
        ] {
            writeln!(
                f,
                "         {:<14} {:>16.6} {:>16.6} {:>16.6} {:>16.6}",
                name, b.fee_n, b.fee_w_soph, b.fee_w_retail, b.total
            )?;
        }
        writeln!(
            f,
            "checks   closed_form {:.3e}{}  as_published {:.3e}  oracle {:.3e} ({})",
            self.closed_form_divergence,
            if self.diverges { " DIVERGES" } else { "" },
            self.as_published_divergence,
            self.oracle_divergence,
            if self.oracle_agrees { "agrees" } else { "DISAGREES" }
        )?;
        writeln!(f, "residual arbitrage leaves price off by {:.3e}", self.arbitrage_price_residual)?;
        for (name, a) in [("soph", &self.soph_attack), ("retail", &self.retail_attack)] {
            writeln!(
                f,
                "attack   {:<6} executed={} input={:.6} profit={:.6}",
                name, a.executed, a.attack_input, a.profit
            )?;
        }
        let v = &self.verdict;
        writeln!(f, "nash     {}  F0={:.6} F1={:.6} delta_f={}", v.nash.label(), v.f0, v.f1, v.delta_f)?;
        for e in &self.epsilon {
            writeln!(
                f,
                "epsilon  {} equilibrium={} ratio={}",
                e.epsilon, e.is_equilibrium, e.improvement_ratio
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            omega: OmegaSpec::Many(vec![0.0, 0.01]),
            ..SweepSpec::canonical(0.0, 4, 3)
        }
    }

    #[test]
    fn half_open_axis() {
        let axis = GridAxis::half_open(0.2, 4);
        assert_eq!(axis.points(), vec![0.05, 0.1, 0.15000000000000002, 0.2]);
        assert_eq!(GridAxis { min: 0.3, max: 0.3, steps: 1 }.points(), vec![0.3]);
    }

    #[test]
    fn single_point_sweep_equals_direct_call() {
        let spec = SweepSpec {
            alpha: GridAxis { min: 0.05, max: 0.05, steps: 1 },
            s: GridAxis { min: 0.01, max: 0.01, steps: 1 },
            ..SweepSpec::canonical(0.01, 1, 1)
        };
        let records = run_sweep(&spec).unwrap();
        assert_eq!(records.len(), 1);
        let direct = classify_nash(&MarketConfig::reference(0.0, 0.01), &TraderParams::new(0.05, 0.01).unwrap()).unwrap();
        assert_eq!((records[0].f0, records[0].f1, records[0].nash), (direct.f0, direct.f1, direct.nash));
    }

    #[test]
    fn ordering_and_count() {
        let spec = small_spec();
        let records = run_sweep(&spec).unwrap();
        assert_eq!(records.len(), spec.point_count());
        let keys: Vec<_> = records.iter().map(|r| (r.omega, r.alpha, r.s)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
    }

    #[test]
    fn nash_label_agrees_with_gradient_sign() {
        for r in run_sweep(&small_spec()).unwrap() {
            match r.nash {
                NashLocation::PoolN => assert!(r.grad_f > 0.0),
                NashLocation::PoolW => assert!(r.grad_f < 0.0),
                NashLocation::All => assert!(r.grad_f.abs() <= 1e-12 * r.f0.max(r.f1).max(1.0)),
            }
        }
    }

    #[test]
    fn csv_is_deterministic_and_has_the_header() {
        let spec = small_spec();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_sweep(&spec).unwrap(), &mut a).unwrap();
        write_csv(&run_sweep(&spec).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(text.lines().count(), spec.point_count() + 1);
    }

    #[test]
    fn infinite_delta_prints_as_inf() {
        let v = EquilibriumVerdict::from_corner_fees(0.0, 1.0);
        let r = SweepRecord::from_verdict(0.1, 0.01, 0.0, &v, Regime::NoAttack, false, false);
        let fields = r.csv_fields();
        assert_eq!((fields[6].as_str(), fields[7].as_str()), ("inf", "true"));
        let v = EquilibriumVerdict::from_corner_fees(1.0, 0.0);
        let r = SweepRecord::from_verdict(0.1, 0.01, 0.0, &v, Regime::NoAttack, false, false);
        assert_eq!(r.csv_fields()[6], "-inf");
    }

    #[test]
    fn toml_spec_parses_with_defaults() {
        let spec = SweepSpec::from_toml_str(
            r#"
            omega = [0.01, 0.1]
            epsilon = [0.02]
            alpha = { min = 0.002, max = 0.2, steps = 100 }
            s = { min = 0.001, max = 0.1, steps = 100 }
            [distribution]
            k = 10
            "#,
        )
        .unwrap();
        assert_eq!(spec.x, 5_000_000.0);
        assert_eq!(spec.fee, 0.003);
        assert_eq!(spec.distribution, Some(TwoPointSpec { k: 10.0 }));
        assert_eq!(spec.point_count(), 20_000);
    }

    #[test]
    fn config_errors_name_the_field() {
        let path_of = |text: &str| match SweepSpec::from_toml_str(text) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected config error, got {other:?}"),
        };
        let grid = "alpha = { min = 0.01, max = 0.2, steps = 10 }\ns = { min = 0.01, max = 0.1, steps = 10 }\n";
        assert_eq!(path_of(&format!("{grid}omega = 1.5")), "omega[0]");
        assert_eq!(path_of(&format!("{grid}omega = 0.1\nfee = 0")), "fee");
        assert_eq!(path_of(&format!("{grid}omega = 0.1\nepsilon = [-1]")), "epsilon[0]");
        assert_eq!(path_of(&format!("{grid}omega = 0.1\n[distribution]\nk = 1")), "distribution.k");
        assert_eq!(
            path_of("alpha = { min = 0.01, max = 0.2, steps = 0 }\ns = { min = 0.01, max = 0.1, steps = 1 }\nomega = 0"),
            "alpha.steps"
        );
        assert_eq!(
            path_of("alpha = { min = 0, max = 0.2, steps = 3 }\ns = { min = 0.01, max = 0.1, steps = 2 }\nomega = 0"),
            "alpha.min"
        );
        assert_eq!(path_of("omega = 0.1"), "(document)");
    }

    #[test]
    fn point_report_corner_fees_match_sweep() {
        let m = MarketConfig::reference(0.35, 0.01);
        let t = TraderParams::new(0.05, 0.01).unwrap();
        let report = run_point(&m, &t, &[0.0, 0.02]).unwrap();
        let rec = evaluate_point(&m, 0.05, 0.01, None).unwrap();
        assert_eq!((report.verdict.f0, report.verdict.f1), (rec.f0, rec.f1));
        assert!(report.oracle_agrees, "{}", report.oracle_divergence);
        assert!(!report.diverges);
        assert_eq!(report.epsilon.len(), 2);
        assert!(report.to_string().contains("nash"));
    }

    #[test]
    fn no_trading_point_reports_zeros() {
        let report = run_point(&MarketConfig::reference(0.5, 0.3), &TraderParams::new(0.001, 0.01).unwrap(), &[]).unwrap();
        for b in [&report.constructive, &report.closed_form, &report.oracle] {
            assert_eq!((b.fee_n, b.fee_w_soph, b.fee_w_retail, b.total), (0.0, 0.0, 0.0, 0.0));
        }
        assert_eq!(report.verdict.nash, NashLocation::All);
    }
}
