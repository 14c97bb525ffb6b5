//! Acceptance suite: twelve independent criteria, each printed as a single
//! `ACCEPTANCE nn PASS/FAIL: name` line. The fixtures use the standard
//! experiment preset — exponential gains with mean 6, noise 10, rate 2 nats
//! per use — shared across criteria through `OnceLock`.

use std::sync::OnceLock;
use std::time::Instant;

use jamgame::channel::FadingModel;
use jamgame::frame_solver::{
    ergodic_capacity, peak_game_solve, required_jam_power, required_tx_power_curve,
    solve_problem1, solve_problem1_discrete, nocsi_mu_prime, PowerCurve,
};
use jamgame::mixed_equilibrium::{
    fullcsi_equilibrium, hughes_narayan_closed_form, nocsi_closed_form, solve_general_game,
    MixedEquilibrium, MonotoneCurve,
};
use jamgame::montecarlo::{
    deviation_test, estimate_outage, estimate_payoff, OutageScenario, PayoffConvention, Sampler,
    SplitMix64,
};
use jamgame::pure_strategies::{maximin_outage, minimax_outage, MinimaxSearch};

const RATE: f64 = 2.0;
const SIGMA2: f64 = 10.0;
const JAM: f64 = 10.0;

fn preset() -> &'static FadingModel {
    static MODEL: OnceLock<FadingModel> = OnceLock::new();
    MODEL.get_or_init(|| FadingModel::exponential(1.0 / 6.0).expect("preset model"))
}

/// Required-power curve of the preset, sampled on 50 points of `[0, 60]`.
fn preset_curve() -> &'static PowerCurve {
    static CURVE: OnceLock<PowerCurve> = OnceLock::new();
    CURVE.get_or_init(|| {
        let grid: Vec<f64> = (0..50).map(|i| 60.0 * i as f64 / 49.0).collect();
        required_tx_power_curve(preset(), RATE, SIGMA2, &grid)
            .expect("preset curve")
            .with_extension(true)
    })
}

fn preset_game() -> &'static MonotoneCurve {
    static GAME: OnceLock<MonotoneCurve> = OnceLock::new();
    GAME.get_or_init(|| MonotoneCurve::sampled(preset_curve().clone()))
}

fn criterion(number: u32, name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("ACCEPTANCE {number:02} PASS: {name}"),
        Err(msg) => {
            println!("ACCEPTANCE {number:02} FAIL: {name} — {msg}");
            panic!("acceptance criterion {number:02} ({name}) failed: {msg}");
        }
    }
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, want {want} (tol {tol:e})"))
    }
}

fn close_rel(label: &str, got: f64, want: f64, rel: f64) -> Result<(), String> {
    close(label, got, want, rel * want.abs().max(1e-12))
}

fn lib(e: jamgame::Error) -> String {
    e.to_string()
}

fn eq_components(
    label: &str,
    got: &MixedEquilibrium,
    want: &MixedEquilibrium,
    tol: f64,
) -> Result<(), String> {
    close(&format!("{label} v"), got.v, want.v, tol)?;
    close(&format!("{label} k_x"), got.k_x, want.k_x, tol)?;
    close(&format!("{label} k_y"), got.k_y, want.k_y, tol)?;
    close(&format!("{label} payoff"), got.payoff, want.payoff, tol)
}

#[test]
fn acceptance_01_unit_identity_game() {
    criterion(1, "unit budgets on the identity curve", || {
        let eq = solve_general_game(&MonotoneCurve::identity(), 1.0, 1.0, 1e-10).map_err(lib)?;
        close("payoff", eq.payoff, 0.5, 1e-9)?;
        close("v", eq.v, 1.0, 1e-9)?;
        close("k_x", eq.k_x, 1.0, 1e-9)?;
        close("k_y", eq.k_y, 1.0, 1e-9)
    });
}

#[test]
fn acceptance_02_affine_closed_form_equivalence() {
    criterion(2, "generic solver matches the affine closed form", || {
        for (a, b, c) in [(2.0, 1.0, 1.0), (1.0, 2.0, 0.0), (1.0, 1.0, 0.0), (3.0, 1.0, 0.5)] {
            let g = MonotoneCurve::affine(1.0, c).map_err(lib)?;
            let got = solve_general_game(&g, a, b, 1e-8).map_err(lib)?;
            let want = hughes_narayan_closed_form(a, b, c).map_err(lib)?;
            eq_components(&format!("({a},{b},{c})"), &got, &want, 1e-6)?;
        }
        Ok(())
    });
}

#[test]
fn acceptance_03_no_csi_closed_form_equivalence() {
    criterion(3, "generic solver matches the no-CSI closed form", || {
        let mu_prime = nocsi_mu_prime(preset(), RATE).map_err(lib)?;
        let g = MonotoneCurve::affine(mu_prime, mu_prime * SIGMA2).map_err(lib)?;
        for p_bar in [15.0, 30.0, 45.0] {
            let got = solve_general_game(&g, p_bar, JAM, 1e-8).map_err(lib)?;
            let want = nocsi_closed_form(p_bar, JAM, mu_prime, SIGMA2).map_err(lib)?;
            eq_components(&format!("P={p_bar}"), &got, &want, 1e-6)?;
        }
        Ok(())
    });
}

#[test]
fn acceptance_04_duality_round_trip() {
    criterion(4, "jamming budget round-trips through the power duel", || {
        for j in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
            let p = solve_problem1(preset(), RATE, SIGMA2, j).map_err(lib)?.tx_budget;
            let j_back = required_jam_power(preset(), RATE, SIGMA2, p).map_err(lib)?;
            close_rel(&format!("J={j}"), j_back, j, 1e-5)?;
        }
        Ok(())
    });
}

#[test]
fn acceptance_05_frame_solution_structure() {
    criterion(5, "frame solutions keep their structural identities", || {
        let mut rng = SplitMix64::new(0x05ACCE);
        for trial in 0..20 {
            let rate = 0.5 + 2.0 * rng.next_f64();
            let sigma2 = 1.0 + 14.0 * rng.next_f64();
            let jam = 0.2 + 25.0 * rng.next_f64();
            let tag = |s: &str| format!("trial {trial} (R={rate:.3}, s2={sigma2:.3}, J={jam:.3}): {s}");
            let sol = solve_problem1(preset(), rate, sigma2, jam)
                .map_err(|e| tag(&e.to_string()))?;
            let onset = sol.jam_threshold.ok_or_else(|| tag("no jammer onset"))?;
            let mu = sol.jam_multiplier;
            // The transmit threshold is the jammer onset squeezed by the
            // power ratio, and effective noise is continuous there.
            close_rel(&tag("tx threshold"), sol.tx_threshold, onset / (1.0 + mu * onset), 1e-8)?;
            close_rel(&tag("noise at onset"), sol.jam_noise(onset), sigma2, 1e-8)?;
            // On the jammed region the transmit profile is the fixed multiple
            // of the effective noise.
            for k in 1..=8 {
                let h = onset * (1.0 + k as f64);
                close_rel(&tag("profile ratio"), sol.tx_power(h), mu * sol.jam_noise(h), 1e-10)?;
            }
            let capacity = ergodic_capacity(
                preset(),
                &|h| sol.tx_power(h),
                &|h| sol.jam_power(h),
                sigma2,
            )
            .map_err(|e| tag(&e.to_string()))?;
            close_rel(&tag("capacity"), capacity, rate, 1e-6)?;
            let spent = preset()
                .expectation_full(&|h| sol.jam_power(h))
                .map_err(|e| tag(&e.to_string()))?;
            close_rel(&tag("jam budget"), spent, jam, 1e-6)?;
            close_rel(&tag("recorded tx budget"), sol.tx_budget, {
                preset().expectation_full(&|h| sol.tx_power(h)).map_err(|e| tag(&e.to_string()))?
            }, 1e-6)?;
        }
        Ok(())
    });
}

#[test]
fn acceptance_06_curve_monotone_and_concave() {
    criterion(6, "required power grows and stays concave", || {
        let curve = preset_curve();
        let samples: Vec<(f64, f64)> = curve.samples().collect();
        if samples.len() != 50 {
            return Err(format!("expected 50 samples, got {}", samples.len()));
        }
        for pair in samples.windows(2) {
            if !(pair[1].1 > pair[0].1) {
                return Err(format!("not strictly increasing: {pair:?}"));
            }
        }
        let worst = curve
            .second_divided_differences()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        if worst <= 1e-8 {
            Ok(())
        } else {
            Err(format!("second divided differences reach {worst:e} > 1e-8"))
        }
    });
}

#[test]
fn acceptance_07_discrete_solver_converges() {
    criterion(7, "discretised duel converges to the continuous one", || {
        let exact = solve_problem1(preset(), RATE, SIGMA2, JAM).map_err(lib)?.tx_budget;
        let mut errors = Vec::new();
        for q in [0.1, 0.05, 0.025] {
            let law = preset().discretize(q, 120.0).map_err(lib)?;
            let approx = solve_problem1_discrete(&law, RATE, SIGMA2, JAM).map_err(lib)?.tx_budget;
            errors.push(((approx - exact) / exact).abs());
        }
        if !(errors[0] > errors[1] && errors[1] > errors[2]) {
            return Err(format!("errors not decreasing: {errors:?}"));
        }
        if errors[2] <= 0.01 {
            Ok(())
        } else {
            Err(format!("finest grid error {:.4e} above 1%", errors[2]))
        }
    });
}

#[test]
fn acceptance_08_simulation_reproduces_the_value() {
    criterion(8, "simulated equilibrium payoff matches the solved value", || {
        let (eq, tx, jam) = fullcsi_equilibrium(preset_curve(), 30.0, JAM).map_err(lib)?;
        let start = Instant::now();
        let report = estimate_payoff(
            preset_game(),
            &Sampler::Strategy(tx),
            &Sampler::Strategy(jam),
            PayoffConvention::Physical,
            1_000_000,
            0x08ACCE,
        )
        .map_err(lib)?
        .with_target(eq.payoff);
        let elapsed = start.elapsed();
        if !report.within(3.0) {
            return Err(format!(
                "estimate {} vs value {} is {:.2} standard errors away",
                report.estimate,
                eq.payoff,
                report.z_score.unwrap_or(f64::NAN)
            ));
        }
        if elapsed.as_secs_f64() > 10.0 {
            return Err(format!("simulation took {elapsed:?} (> 10 s)"));
        }
        Ok(())
    });
}

#[test]
fn acceptance_09_deviations_respect_the_security_levels() {
    criterion(9, "standard deviations never beat the security levels", || {
        let (eq, _, _) = fullcsi_equilibrium(preset_curve(), 30.0, JAM).map_err(lib)?;
        let reports = deviation_test(preset_game(), &eq, 1_000_000, 0x09ACCE).map_err(lib)?;
        if reports.len() != 8 {
            return Err(format!("expected 8 probes, got {}", reports.len()));
        }
        for r in &reports {
            if !r.within_bound {
                return Err(format!(
                    "{} deviation `{}` broke its bound: estimate {} vs bound {} (stderr {})",
                    r.deviator, r.label, r.simulation.estimate, r.bound, r.simulation.stderr
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_10_regime_ordering_across_the_sweep() {
    criterion(10, "maximin ≤ mixed ≤ minimax across the budget sweep", || {
        let curve = preset_curve();
        let game = preset_game();
        let search = MinimaxSearch::default();
        let mut last_peak = 1.0f64;
        for i in 0..12 {
            let p_bar = 5.0 + 55.0 * i as f64 / 11.0;
            let maximin = maximin_outage(curve, p_bar, JAM).map_err(lib)?.p_out;
            let minimax = minimax_outage(curve, p_bar, JAM, &search).map_err(lib)?.p_out;
            let mixed = solve_general_game(game, p_bar, JAM, 1e-8).map_err(lib)?.outage();
            if !(maximin <= mixed + 1e-9 && mixed <= minimax + 1e-9) {
                return Err(format!(
                    "ordering broken at P={p_bar}: maximin {maximin}, mixed {mixed}, minimax {minimax}"
                ));
            }
            let capacity = peak_game_solve(preset(), SIGMA2, p_bar, JAM).map_err(lib)?.capacity;
            let peak = if capacity < RATE { 1.0 } else { 0.0 };
            if peak > last_peak {
                return Err(format!("peak outage increased along the sweep at P={p_bar}"));
            }
            if peak == 0.0 && maximin > 1e-12 {
                return Err(format!(
                    "peak-feasible point P={p_bar} (C*={capacity}) still has maximin outage {maximin}"
                ));
            }
            last_peak = peak;
        }
        Ok(())
    });
}

#[test]
fn acceptance_11_csi_gap_is_small() {
    criterion(11, "knowing the fading state is worth little here", || {
        let mu_prime = nocsi_mu_prime(preset(), RATE).map_err(lib)?;
        // The blind transmitter needs at least the informed one's power at
        // every sampled jamming level.
        for (j, p) in preset_curve().samples() {
            let blind = mu_prime * (SIGMA2 + j);
            if blind < p * (1.0 - 1e-9) {
                return Err(format!("blind requirement {blind} below informed {p} at J={j}"));
            }
        }
        let game = preset_game();
        for i in 0..12 {
            let p_bar = 5.0 + 55.0 * i as f64 / 11.0;
            let full = solve_general_game(game, p_bar, JAM, 1e-8).map_err(lib)?.outage();
            let blind = nocsi_closed_form(p_bar, JAM, mu_prime, SIGMA2).map_err(lib)?.outage();
            let gap = blind - full;
            if !(-1e-6..0.05).contains(&gap) {
                return Err(format!("outage gap {gap} at P={p_bar} (full {full}, blind {blind})"));
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_12_byte_identical_reruns() {
    criterion(12, "same seed, same bytes", || {
        let (_, tx, jam) = fullcsi_equilibrium(preset_curve(), 30.0, JAM).map_err(lib)?;
        let scenario = OutageScenario::Mixed { g: preset_game().clone(), tx, jam };
        let once = estimate_outage(&scenario, 200_000, 0x12ACCE).map_err(lib)?;
        let twice = estimate_outage(&scenario, 200_000, 0x12ACCE).map_err(lib)?;
        if once.estimate.to_bits() != twice.estimate.to_bits() {
            return Err(format!("estimates differ: {} vs {}", once.estimate, twice.estimate));
        }
        let json_once = serde_json::to_string(&once).map_err(|e| e.to_string())?;
        let json_twice = serde_json::to_string(&twice).map_err(|e| e.to_string())?;
        if json_once != json_twice {
            return Err("serialized reports differ".into());
        }

        // A small analytic sweep rendered twice must also agree to the byte.
        let render = || -> Result<String, String> {
            let mut out = String::new();
            for p_bar in [10.0, 30.0, 50.0] {
                let maximin = maximin_outage(preset_curve(), p_bar, JAM).map_err(lib)?;
                let mixed = solve_general_game(preset_game(), p_bar, JAM, 1e-8).map_err(lib)?;
                out.push_str(&format!(
                    "{p_bar:.16e},{:.16e},{:.16e}\n",
                    maximin.p_out,
                    mixed.outage()
                ));
            }
            Ok(out)
        };
        if render()? != render()? {
            return Err("sweep renders differ".into());
        }
        Ok(())
    });
}
