//! Experiment driver for the jamgame solvers.
//!
//! Every subcommand resolves one [`config::Config`], validates it up front
//! (reporting every offending field at once), runs the requested computation
//! and writes a single CSV or JSON artifact to `--out` or stdout. Artifacts
//! carry the config hash and solver tolerances in their header and are
//! byte-identical across reruns with the same config.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use config::Config;
use jamgame::channel::FadingModel;
use jamgame::frame_solver::{peak_game_solve, required_tx_power_curve, PowerCurve};
use jamgame::mixed_equilibrium::{
    equilibrium_strategies, nocsi_closed_form, solve_general_game, Branch, MixedStrategy,
    MonotoneCurve,
};
use jamgame::montecarlo::{estimate_outage, OutageScenario};
use jamgame::pure_strategies::{
    maximin_outage, minimax_outage, nonintelligent_outage, peak_outage, MinimaxSearch,
    OutageReport, Regime,
};

#[derive(Parser)]
#[command(
    name = "jamgame",
    version,
    about = "Fixed-rate transmitter-vs-jammer power-control experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` config file ('#' comments allowed).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one config key (repeatable), e.g. --set p_bar=45.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Simulation seed (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Simulation sample count (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    samples: Option<u64>,

    /// Minimax search resolution (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    resolution: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Required transmit power versus jamming power (CSV).
    Curve,
    /// Outage probability per regime across a transmit-budget sweep (CSV).
    OutageSweep,
    /// Outage probability per regime across a rate sweep (CSV).
    RateSweep,
    /// Mixed-strategy equilibrium of the inter-frame game (JSON).
    Equilibrium,
    /// Monte-Carlo check of one regime against its analytic outage (JSON).
    Simulate,
    /// Full-CSI versus no-CSI equilibrium outage across a budget sweep (CSV).
    CompareCsi,
}

/// CLI-level failure: validation exits 2, runtime exits 1, both with a JSON
/// object on stderr.
enum Failure {
    Validation(Vec<String>),
    Runtime(String),
}

impl From<jamgame::Error> for Failure {
    fn from(e: jamgame::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let obj = serde_json::json!({ "error": "usage", "message": e.render().to_string() });
            eprintln!("{obj}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(fields)) => {
            let obj = serde_json::json!({ "error": "validation", "fields": fields });
            eprintln!("{obj}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(message)) => {
            let obj = serde_json::json!({ "error": "runtime", "message": message });
            eprintln!("{obj}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = Config::default();
    let mut errors = Vec::new();
    if let Some(path) = &cli.config {
        match std::fs::read_to_string(path) {
            Ok(text) => cfg.apply_file(&text, &mut errors),
            Err(e) => errors.push(format!("config: cannot read {}: {e}", path.display())),
        }
    }
    cfg.apply_overrides(&cli.set, &mut errors);
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = cli.samples {
        cfg.samples = samples;
    }
    if let Some(resolution) = cli.resolution {
        cfg.resolution = resolution;
    }
    // Run field validation even when parsing already failed so one pass
    // reports every offending field.
    let model = match cfg.validate() {
        Ok(model) if errors.is_empty() => model,
        Ok(_) => return Err(Failure::Validation(errors)),
        Err(more) => {
            errors.extend(more);
            return Err(Failure::Validation(errors));
        }
    };

    let artifact = match cli.command {
        Command::Curve => cmd_curve(&cfg, &model)?,
        Command::OutageSweep => cmd_outage_sweep(&cfg, &model)?,
        Command::RateSweep => cmd_rate_sweep(&cfg, &model)?,
        Command::Equilibrium => cmd_equilibrium(&cfg, &model)?,
        Command::Simulate => cmd_simulate(&cfg, &model)?,
        Command::CompareCsi => cmd_compare_csi(&cfg, &model)?,
    };

    match &cli.out {
        Some(path) => std::fs::write(path, artifact)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(artifact.as_bytes())
            .map_err(|e| Failure::Runtime(format!("cannot write stdout: {e}")))?,
    }
    Ok(())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Sample the required-power curve on `[0, curve_max_jam]` with the final
/// secant extended past the last knot.
fn build_curve(cfg: &Config, model: &FadingModel, rate: f64) -> jamgame::Result<PowerCurve> {
    let grid = linspace(0.0, cfg.curve_max_jam, cfg.curve_points);
    Ok(required_tx_power_curve(model, rate, cfg.sigma2, &grid)?.with_extension(true))
}

fn needs_curve(regimes: &[Regime]) -> bool {
    regimes
        .iter()
        .any(|r| matches!(r, Regime::Maximin | Regime::Minimax | Regime::Mixed))
}

/// Outage of one regime at explicit `(rate, p_bar)`; `curve` must be sampled
/// at `rate` and is only consulted by the regimes that need it.
fn regime_report(
    regime: Regime,
    cfg: &Config,
    model: &FadingModel,
    curve: Option<&PowerCurve>,
    rate: f64,
    p_bar: f64,
) -> jamgame::Result<OutageReport> {
    let curve = |what: &str| {
        curve.ok_or_else(|| {
            jamgame::Error::Argument(format!("{what} regime needs a required-power curve"))
        })
    };
    match regime {
        Regime::Peak => {
            let solution = peak_game_solve(model, cfg.sigma2, p_bar, cfg.j_bar)?;
            Ok(peak_outage(solution.capacity, rate))
        }
        Regime::Maximin => maximin_outage(curve("maximin")?, p_bar, cfg.j_bar),
        Regime::Minimax => {
            let search = MinimaxSearch { resolution: cfg.resolution, epsilon: cfg.epsilon };
            minimax_outage(curve("minimax")?, p_bar, cfg.j_bar, &search)
        }
        Regime::Nonintelligent => nonintelligent_outage(model, rate, cfg.sigma2, p_bar, cfg.j_bar),
        Regime::Mixed => {
            let g = MonotoneCurve::sampled(curve("mixed")?.clone());
            let eq = solve_general_game(&g, p_bar, cfg.j_bar, cfg.tol)?;
            let (tx, jam) = equilibrium_strategies(&g, &eq);
            Ok(OutageReport {
                regime: Regime::Mixed,
                p_out: eq.outage(),
                p_t: 1.0 - tx.zero_atom_mass(),
                p_j: 1.0 - jam.zero_atom_mass(),
                chosen_p_m: None,
            })
        }
    }
}

fn render_sweep(header: &str, rows: &[(f64, OutageReport)]) -> String {
    let mut out = String::from(header);
    out.push_str("sweep_value,p_out,p_t,p_j,chosen_P_M,regime\n");
    for (sweep_value, r) in rows {
        let chosen = r.chosen_p_m.map(|p| format!("{p:.16e}")).unwrap_or_default();
        out.push_str(&format!(
            "{sweep_value:.16e},{:.16e},{:.16e},{:.16e},{chosen},{}\n",
            r.p_out,
            r.p_t,
            r.p_j,
            r.regime.as_str()
        ));
    }
    out
}

fn cmd_curve(cfg: &Config, model: &FadingModel) -> jamgame::Result<String> {
    let curve = build_curve(cfg, model, cfg.rate)?;
    let mut out = cfg.header("curve");
    out.push_str(&curve.to_csv());
    Ok(out)
}

fn cmd_outage_sweep(cfg: &Config, model: &FadingModel) -> jamgame::Result<String> {
    let curve =
        if needs_curve(&cfg.regimes) { Some(build_curve(cfg, model, cfg.rate)?) } else { None };
    let rows: Vec<Vec<(f64, OutageReport)>> = linspace(cfg.sweep_lo, cfg.sweep_hi, cfg.sweep_points)
        .par_iter()
        .map(|&p_bar| {
            cfg.regimes
                .iter()
                .map(|&regime| {
                    regime_report(regime, cfg, model, curve.as_ref(), cfg.rate, p_bar)
                        .map(|r| (p_bar, r))
                        .map_err(|e| e.context(format!("outage sweep at P = {p_bar}")))
                })
                .collect()
        })
        .collect::<jamgame::Result<_>>()?;
    let rows: Vec<(f64, OutageReport)> = rows.into_iter().flatten().collect();
    Ok(render_sweep(&cfg.header("outage-sweep"), &rows))
}

fn cmd_rate_sweep(cfg: &Config, model: &FadingModel) -> jamgame::Result<String> {
    // The peak game does not involve the rate; solve it once and reuse the
    // capacity across the sweep.
    let peak_capacity = if cfg.regimes.contains(&Regime::Peak) {
        Some(peak_game_solve(model, cfg.sigma2, cfg.p_bar, cfg.j_bar)?.capacity)
    } else {
        None
    };
    let rows: Vec<Vec<(f64, OutageReport)>> = linspace(cfg.sweep_lo, cfg.sweep_hi, cfg.sweep_points)
        .par_iter()
        .map(|&rate| {
            let curve = if needs_curve(&cfg.regimes) {
                Some(build_curve(cfg, model, rate)?)
            } else {
                None
            };
            cfg.regimes
                .iter()
                .map(|&regime| {
                    let report = match (regime, peak_capacity) {
                        (Regime::Peak, Some(capacity)) => Ok(peak_outage(capacity, rate)),
                        _ => regime_report(regime, cfg, model, curve.as_ref(), rate, cfg.p_bar),
                    };
                    report
                        .map(|r| (rate, r))
                        .map_err(|e| e.context(format!("rate sweep at R = {rate}")))
                })
                .collect()
        })
        .collect::<jamgame::Result<_>>()?;
    let rows: Vec<(f64, OutageReport)> = rows.into_iter().flatten().collect();
    Ok(render_sweep(&cfg.header("rate-sweep"), &rows))
}

fn strategy_json(s: &MixedStrategy) -> jamgame::Result<serde_json::Value> {
    Ok(serde_json::json!({
        "bound": s.bound(),
        "mixture_mass": s.mixture_mass(),
        "zero_atom_mass": s.zero_atom_mass(),
        "mean": s.mean()?,
    }))
}

fn to_pretty(doc: &serde_json::Value) -> jamgame::Result<String> {
    let text = serde_json::to_string_pretty(doc)
        .map_err(|e| jamgame::Error::Parse(format!("serialise artifact: {e}")))?;
    Ok(text + "\n")
}

fn cmd_equilibrium(cfg: &Config, model: &FadingModel) -> jamgame::Result<String> {
    let curve = build_curve(cfg, model, cfg.rate)?;
    let g = MonotoneCurve::sampled(curve);
    let eq = solve_general_game(&g, cfg.p_bar, cfg.j_bar, cfg.tol)?;
    let (tx, jam) = equilibrium_strategies(&g, &eq);
    let mut doc = cfg.json_meta("equilibrium");
    doc["equilibrium"] = serde_json::to_value(eq.record(g.digest()))
        .map_err(|e| jamgame::Error::Parse(format!("serialise equilibrium: {e}")))?;
    doc["p_out"] = eq.outage().into();
    doc["strategies"] = serde_json::json!({
        "transmit": strategy_json(&tx)?,
        "jam": strategy_json(&jam)?,
    });
    if eq.branch != Branch::Degenerate {
        let [balance, budget_x, budget_y] = eq.residuals(&g)?;
        doc["residuals"] = serde_json::json!({
            "balance": balance,
            "budget_x": budget_x,
            "budget_y": budget_y,
        });
    }
    to_pretty(&doc)
}

fn cmd_simulate(cfg: &Config, model: &FadingModel) -> jamgame::Result<String> {
    let curve_for = |cfg: &Config| build_curve(cfg, model, cfg.rate);
    let (scenario, analytic) = match cfg.regime {
        Regime::Peak => {
            let report = regime_report(Regime::Peak, cfg, model, None, cfg.rate, cfg.p_bar)?;
            let capacity = peak_game_solve(model, cfg.sigma2, cfg.p_bar, cfg.j_bar)?.capacity;
            (OutageScenario::Peak { capacity, rate: cfg.rate }, report.p_out)
        }
        Regime::Maximin => {
            let report = maximin_outage(&curve_for(cfg)?, cfg.p_bar, cfg.j_bar)?;
            (OutageScenario::Maximin { p_t: report.p_t }, report.p_out)
        }
        Regime::Minimax => {
            let search = MinimaxSearch { resolution: cfg.resolution, epsilon: cfg.epsilon };
            let report = minimax_outage(&curve_for(cfg)?, cfg.p_bar, cfg.j_bar, &search)?;
            (OutageScenario::Minimax { p_t: report.p_t, p_j: report.p_j }, report.p_out)
        }
        Regime::Nonintelligent => {
            let report = nonintelligent_outage(model, cfg.rate, cfg.sigma2, cfg.p_bar, cfg.j_bar)?;
            (OutageScenario::Nonintelligent { p_t: report.p_t }, report.p_out)
        }
        Regime::Mixed => {
            let g = MonotoneCurve::sampled(curve_for(cfg)?);
            let eq = solve_general_game(&g, cfg.p_bar, cfg.j_bar, cfg.tol)?;
            let (tx, jam) = equilibrium_strategies(&g, &eq);
            (OutageScenario::Mixed { g, tx, jam }, eq.outage())
        }
    };
    let report = estimate_outage(&scenario, cfg.samples, cfg.seed)?.with_target(analytic);
    let mut doc = cfg.json_meta("simulate");
    doc["regime"] = cfg.regime.as_str().into();
    doc["report"] = serde_json::to_value(&report)
        .map_err(|e| jamgame::Error::Parse(format!("serialise report: {e}")))?;
    to_pretty(&doc)
}

fn cmd_compare_csi(cfg: &Config, model: &FadingModel) -> jamgame::Result<String> {
    let curve = build_curve(cfg, model, cfg.rate)?;
    let g = MonotoneCurve::sampled(curve);
    let mu_prime = jamgame::frame_solver::nocsi_mu_prime(model, cfg.rate)?;
    let rows: Vec<(f64, f64, f64)> = linspace(cfg.sweep_lo, cfg.sweep_hi, cfg.sweep_points)
        .par_iter()
        .map(|&p_bar| {
            let full = solve_general_game(&g, p_bar, cfg.j_bar, cfg.tol)
                .map_err(|e| e.context(format!("full-CSI equilibrium at P = {p_bar}")))?
                .outage();
            let nocsi = nocsi_closed_form(p_bar, cfg.j_bar, mu_prime, cfg.sigma2)
                .map_err(|e| e.context(format!("no-CSI equilibrium at P = {p_bar}")))?
                .outage();
            Ok((p_bar, full, nocsi))
        })
        .collect::<jamgame::Result<_>>()?;
    let mut out = cfg.header("compare-csi");
    out.push_str("p_bar,p_out_full,p_out_nocsi,gap\n");
    for (p_bar, full, nocsi) in rows {
        out.push_str(&format!(
            "{p_bar:.16e},{full:.16e},{nocsi:.16e},{:.16e}\n",
            nocsi - full
        ));
    }
    Ok(out)
}
