//! Monte-Carlo verification of solver outputs.
//!
//! Everything here is deterministic given `(n, seed)`: samples are produced
//! in fixed-size blocks, each block seeds its own generator from the block
//! index alone, and per-block tallies are folded in block order. Thread
//! count therefore never affects a result, only wall time.
//!
//! # Random source
//!
//! The generator is fully specified by its update function so that any
//! implementation reproduces the streams bit-exactly. State is one 64-bit
//! word; each draw performs
//!
//! ```text
//! state := state + 0x9E3779B97F4A7C15            (mod 2^64)
//! z := state
//! z := (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9    (mod 2^64)
//! z := (z XOR (z >> 27)) * 0x94D049BB133111EB    (mod 2^64)
//! output := z XOR (z >> 31)
//! ```
//!
//! and a unit float is `(output >> 11) * 2^-53`, uniform on `[0, 1)`.
//! A run of `n` samples is split into blocks of `2^16`; block `b` of a run
//! with master seed `s` starts from state `mix(s XOR mix(b + 0x9E3779B97F4A7C15))`,
//! where `mix` is the three-line finaliser above. Any block is addressable
//! in O(1), so shard layouts can change freely without changing results.

use rayon::prelude::*;

use crate::mixed_equilibrium::{
    equilibrium_strategies, MixedEquilibrium, MixedStrategy, MonotoneCurve,
};
use crate::{Error, Result};

/// Samples per RNG block. Each block is an independent stream, so estimates
/// are bit-stable under any parallel schedule.
pub const BLOCK_SAMPLES: u64 = 1 << 16;

/// 64-bit finaliser used both as the generator's output stage and to derive
/// per-block seeds.
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator (see the module docs for the exact update function).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    /// Uniform draw on `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

/// Seed of block `b` of a run with master seed `seed`.
fn block_seed(seed: u64, block: u64) -> u64 {
    mix64(seed ^ mix64(block.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

/// Run `n` samples of `eval` across seeded blocks; returns total successes
/// and the total of the per-sample weights. `eval` receives the global
/// sample index for error reporting.
fn simulate<F>(n: u64, seed: u64, eval: F) -> Result<(u64, f64)>
where
    F: Fn(&mut SplitMix64, u64) -> Result<(bool, f64)> + Sync,
{
    if n == 0 {
        return Err(Error::argument("sample count must be positive"));
    }
    let blocks = n.div_ceil(BLOCK_SAMPLES);
    let tallies = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = SplitMix64::new(block_seed(seed, b));
            let start = b * BLOCK_SAMPLES;
            let count = (n - start).min(BLOCK_SAMPLES);
            let mut successes = 0u64;
            let mut weight = 0.0f64;
            for i in 0..count {
                let (ok, w) = eval(&mut rng, start + i)?;
                if ok {
                    successes += 1;
                }
                weight += w;
            }
            Ok((successes, weight))
        })
        .collect::<Result<Vec<_>>>()?;
    // Sequential fold in block order keeps the f64 total bit-stable.
    let mut successes = 0u64;
    let mut weight = 0.0f64;
    for (s, w) in tallies {
        successes += s;
        weight += w;
    }
    Ok((successes, weight))
}

/// Outcome of a Monte-Carlo estimate of a probability.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SimulationReport {
    pub estimate: f64,
    /// Binomial standard error `sqrt(p(1-p)/n)`.
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub successes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
}

impl SimulationReport {
    fn new(successes: u64, n: u64, seed: u64) -> Self {
        let p = successes as f64 / n as f64;
        SimulationReport {
            estimate: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
            n,
            seed,
            successes,
            target: None,
            z_score: None,
        }
    }

    /// Attach a theoretical value and its z-score.
    pub fn with_target(mut self, target: f64) -> Self {
        let diff = self.estimate - target;
        self.target = Some(target);
        self.z_score = Some(if diff == 0.0 { 0.0 } else { diff / self.stderr });
        self
    }

    /// Whether the estimate sits within `z` standard errors of the target.
    pub fn within(&self, z: f64) -> bool {
        matches!(self.z_score, Some(s) if s.abs() <= z)
    }
}

/// How the success indicator treats zero jamming.
///
/// The game curve has `g(0) = 0`, so read literally the payoff
/// `Pr{X >= g(Y)}` lets a silent transmitter win against a silent jammer —
/// that is `Abstract`. Physically a zero-power frame is always in outage:
/// against `Y = 0` the transmitter must still cover the jump `g(0⁺)`, which
/// is `Physical`. At an equilibrium the two estimates differ by exactly the
/// product of the two players' zero atoms, and it is the `Physical` reading
/// whose mean reproduces the solved game value and both security levels;
/// neither source text reconciles the conventions, so both are exposed and
/// the gap is measurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffConvention {
    Abstract,
    Physical,
}

fn survives(x: f64, y: f64, g: &MonotoneCurve, convention: PayoffConvention) -> Result<bool> {
    let required = if y <= 0.0 {
        match convention {
            PayoffConvention::Abstract => 0.0,
            PayoffConvention::Physical => g.jump_at_zero(),
        }
    } else {
        g.forward(y)?
    };
    Ok(x >= required)
}

/// A budget-respecting single-player power distribution.
#[derive(Debug, Clone)]
pub enum Sampler {
    /// Spend exactly this much on every frame.
    Constant(f64),
    /// Uniform on `[0, hi]`.
    Uniform { hi: f64 },
    /// `hi` with probability `p_hi`, else `lo`.
    TwoPoint { lo: f64, hi: f64, p_hi: f64 },
    /// Draw from a solved mixed strategy.
    Strategy(MixedStrategy),
}

impl Sampler {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            Sampler::Constant(v) => v.is_finite() && *v >= 0.0,
            Sampler::Uniform { hi } => hi.is_finite() && *hi >= 0.0,
            Sampler::TwoPoint { lo, hi, p_hi } => {
                lo.is_finite()
                    && hi.is_finite()
                    && *lo >= 0.0
                    && *hi >= *lo
                    && (0.0..=1.0).contains(p_hi)
            }
            Sampler::Strategy(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::argument(format!("invalid sampler parameters: {self:?}")))
        }
    }

    pub fn draw(&self, rng: &mut SplitMix64) -> Result<f64> {
        match self {
            Sampler::Constant(v) => Ok(*v),
            Sampler::Uniform { hi } => Ok(rng.next_f64() * hi),
            Sampler::TwoPoint { lo, hi, p_hi } => {
                Ok(if rng.next_f64() < *p_hi { *hi } else { *lo })
            }
            Sampler::Strategy(s) => s.sample(rng),
        }
    }

    pub fn mean(&self) -> Result<f64> {
        match self {
            Sampler::Constant(v) => Ok(*v),
            Sampler::Uniform { hi } => Ok(0.5 * hi),
            Sampler::TwoPoint { lo, hi, p_hi } => Ok(lo + (hi - lo) * p_hi),
            Sampler::Strategy(s) => s.mean(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Sampler::Constant(v) => format!("constant({v})"),
            Sampler::Uniform { hi } => format!("uniform(0,{hi})"),
            Sampler::TwoPoint { lo, hi, p_hi } => format!("two_point({lo},{hi};p={p_hi})"),
            Sampler::Strategy(_) => "mixed_strategy".to_string(),
        }
    }
}

/// Estimate `Pr{X >= g(Y)}` for independent draws from the two samplers.
pub fn estimate_payoff(
    g: &MonotoneCurve,
    sampler_x: &Sampler,
    sampler_y: &Sampler,
    convention: PayoffConvention,
    n: u64,
    seed: u64,
) -> Result<SimulationReport> {
    sampler_x.validate()?;
    sampler_y.validate()?;
    let (successes, _) = simulate(n, seed, |rng, idx| {
        let x = sampler_x.draw(rng).map_err(|e| e.context(format!("transmit draw {idx}")))?;
        let y = sampler_y.draw(rng).map_err(|e| e.context(format!("jamming draw {idx}")))?;
        Ok((survives(x, y, g, convention)?, 0.0))
    })?;
    Ok(SimulationReport::new(successes, n, seed))
}

/// The usual probes for a budget `m`: spend it flat, spread it uniformly,
/// gamble it all-in on half the frames, or stay silent.
pub fn standard_deviation_family(budget: f64) -> Vec<Sampler> {
    vec![
        Sampler::Constant(budget),
        Sampler::Uniform { hi: 2.0 * budget },
        Sampler::TwoPoint { lo: 0.0, hi: 2.0 * budget, p_hi: 0.5 },
        Sampler::Constant(0.0),
    ]
}

/// Which player abandons the equilibrium in a deviation probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deviator {
    Transmitter,
    Jammer,
}

/// Result of pitting one deviating player against the other's equilibrium
/// strategy.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DeviationReport {
    pub label: String,
    pub deviator: &'static str,
    /// Empirical mean spend of the deviator.
    pub measured_mean: f64,
    /// The deviator's power budget.
    pub budget: f64,
    /// Security level the estimate is compared against.
    pub bound: f64,
    pub simulation: SimulationReport,
    /// True when the deviation failed to beat the bound (within 3 standard
    /// errors), i.e. the equilibrium held.
    pub within_bound: bool,
}

/// Play `n` frames of the deviator's `alternative` against the opponent's
/// equilibrium strategy and compare the payoff with the security level.
///
/// The equilibrium transmitter guarantees payoff at least `k_x(1 − b/2v)`
/// against any jammer on budget; the equilibrium jammer caps it at
/// `1 − k_y(1 − a/g(2v))`. Both guarantees are statements about the game in
/// which a zero-power frame is lost, so the indicator here is the
/// [`PayoffConvention::Physical`] one (under the abstract reading a
/// transmitter could collect the mutual-silence freebie and sail over the
/// cap). Alternatives whose empirical mean overspends the budget by more
/// than 0.1% relative are rejected rather than scored.
pub fn deviation_probe(
    g: &MonotoneCurve,
    eq: &MixedEquilibrium,
    deviator: Deviator,
    alternative: &Sampler,
    n: u64,
    seed: u64,
) -> Result<DeviationReport> {
    alternative.validate()?;
    let (tx_eq, jam_eq) = equilibrium_strategies(g, eq);
    let (successes, spent) = simulate(n, seed, |rng, idx| {
        let pair = match deviator {
            Deviator::Jammer => {
                let x = tx_eq.sample(rng)?;
                let y = alternative.draw(rng)?;
                (x, y)
            }
            Deviator::Transmitter => {
                let x = alternative.draw(rng)?;
                let y = jam_eq.sample(rng)?;
                (x, y)
            }
        };
        let (x, y) = pair;
        let spend = if deviator == Deviator::Jammer { y } else { x };
        survives(x, y, g, PayoffConvention::Physical)
            .map(|ok| (ok, spend))
            .map_err(|e| e.context(format!("frame {idx}")))
    })?;

    let measured_mean = spent / n as f64;
    let budget = match deviator {
        Deviator::Transmitter => eq.a,
        Deviator::Jammer => eq.b,
    };
    if measured_mean > budget * (1.0 + 1e-3) {
        return Err(Error::argument(format!(
            "deviation '{}' violates the {} budget: empirical mean {measured_mean:.6e} \
             exceeds {budget:.6e}",
            alternative.label(),
            match deviator {
                Deviator::Transmitter => "transmit",
                Deviator::Jammer => "jamming",
            },
        )));
    }

    let simulation = SimulationReport::new(successes, n, seed);
    let (bound, within_bound) = match deviator {
        // The equilibrium transmitter keeps the payoff at or above its
        // security level no matter what the jammer tries.
        Deviator::Jammer => {
            let bound = eq.security_level_p1();
            (bound, simulation.estimate >= bound - 3.0 * simulation.stderr)
        }
        // No transmitter strategy beats the jammer-side cap.
        Deviator::Transmitter => {
            let bound = eq.security_level_p2();
            (bound, simulation.estimate <= bound + 3.0 * simulation.stderr)
        }
    };

    Ok(DeviationReport {
        label: alternative.label(),
        deviator: match deviator {
            Deviator::Transmitter => "transmitter",
            Deviator::Jammer => "jammer",
        },
        measured_mean,
        budget,
        bound,
        simulation,
        within_bound,
    })
}

/// Run the standard deviation family for both players against the
/// equilibrium, one report per probe, with per-probe seeds derived from
/// `seed`.
pub fn deviation_test(
    g: &MonotoneCurve,
    eq: &MixedEquilibrium,
    n: u64,
    seed: u64,
) -> Result<Vec<DeviationReport>> {
    let mut reports = Vec::new();
    let mut probe_seed = seed;
    for (deviator, budget) in
        [(Deviator::Transmitter, eq.a), (Deviator::Jammer, eq.b)]
    {
        for alternative in standard_deviation_family(budget) {
            reports.push(deviation_probe(g, eq, deviator, &alternative, n, probe_seed)?);
            probe_seed = probe_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        }
    }
    Ok(reports)
}

/// A per-frame outage experiment for one of the solved operating points.
///
/// The pure-strategy scenarios are Bernoulli games over the on/off frame
/// decisions (a frame is on when `u < p`, with `u` uniform on `[0,1)`).
/// A frame is in outage exactly when the transmitter spends less than the
/// requirement for the jamming it receives; in particular zero-power frames
/// are always in outage.
#[derive(Debug, Clone)]
pub enum OutageScenario {
    /// Both players always on at their peak powers: outage is deterministic,
    /// `1` exactly when the achieved capacity falls short of the rate.
    Peak { capacity: f64, rate: f64 },
    /// Transmitter on a fraction `p_t` of frames against constant jamming;
    /// on-frames always survive.
    Maximin { p_t: f64 },
    /// Transmitter on with probability `p_t`; an on-frame is lost when the
    /// jammer's independent coin (probability `p_j`) lands on it.
    Minimax { p_t: f64, p_j: f64 },
    /// Same one-sided structure as `Maximin`, against a jammer that spreads
    /// without listening.
    Nonintelligent { p_t: f64 },
    /// Both players draw from mixed strategies on the curve `g`.
    Mixed { g: MonotoneCurve, tx: MixedStrategy, jam: MixedStrategy },
}

/// Estimate the outage probability of a scenario.
pub fn estimate_outage(scenario: &OutageScenario, n: u64, seed: u64) -> Result<SimulationReport> {
    let check_prob = |p: f64, what: &str| -> Result<()> {
        if (0.0..=1.0).contains(&p) {
            Ok(())
        } else {
            Err(Error::argument(format!("{what} must lie in [0, 1], got {p}")))
        }
    };
    match scenario {
        OutageScenario::Maximin { p_t } | OutageScenario::Nonintelligent { p_t } => {
            check_prob(*p_t, "transmit duty cycle")?
        }
        OutageScenario::Minimax { p_t, p_j } => {
            check_prob(*p_t, "transmit duty cycle")?;
            check_prob(*p_j, "jamming duty cycle")?;
        }
        _ => {}
    }
    let (outages, _) = simulate(n, seed, |rng, idx| {
        let outage = match scenario {
            OutageScenario::Peak { capacity, rate } => capacity < rate,
            OutageScenario::Maximin { p_t } | OutageScenario::Nonintelligent { p_t } => {
                !(rng.next_f64() < *p_t)
            }
            OutageScenario::Minimax { p_t, p_j } => {
                let on = rng.next_f64() < *p_t;
                let jammed = rng.next_f64() < *p_j;
                !on || jammed
            }
            OutageScenario::Mixed { g, tx, jam } => {
                let x = tx.sample(rng)?;
                let y = jam.sample(rng)?;
                !survives(x, y, g, PayoffConvention::Physical)
                    .map_err(|e| e.context(format!("frame {idx}")))?
            }
        };
        Ok((outage, 0.0))
    })?;
    Ok(SimulationReport::new(outages, n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed_equilibrium::solve_general_game;

    #[test]
    fn splitmix_matches_reference_sequence() {
        // First outputs of the reference update function seeded with 0.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn unit_floats_cover_the_interval() {
        let mut rng = SplitMix64::new(42);
        let mut min = 1.0f64;
        let mut max = 0.0f64;
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
            min = min.min(u);
            max = max.max(u);
        }
        assert!(min < 0.01 && max > 0.99);
    }

    fn unit_game() -> (MonotoneCurve, MixedEquilibrium) {
        let g = MonotoneCurve::identity();
        let eq = solve_general_game(&g, 1.0, 1.0, 1e-8).unwrap();
        (g, eq)
    }

    fn strategy_samplers(g: &MonotoneCurve, eq: &MixedEquilibrium) -> (Sampler, Sampler) {
        let (tx, jam) = equilibrium_strategies(g, eq);
        (Sampler::Strategy(tx), Sampler::Strategy(jam))
    }

    #[test]
    fn payoff_estimates_are_bit_deterministic() {
        let (g, eq) = unit_game();
        let (tx, jam) = strategy_samplers(&g, &eq);
        let conv = PayoffConvention::Physical;
        let a = estimate_payoff(&g, &tx, &jam, conv, 150_000, 9).unwrap();
        let b = estimate_payoff(&g, &tx, &jam, conv, 150_000, 9).unwrap();
        assert_eq!(a.successes, b.successes);
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        let c = estimate_payoff(&g, &tx, &jam, conv, 150_000, 10).unwrap();
        assert_ne!(a.successes, c.successes);
    }

    #[test]
    fn deterministic_payoff_when_outcome_is_forced() {
        let g = MonotoneCurve::identity();
        let always = estimate_payoff(
            &g,
            &Sampler::Constant(1.0),
            &Sampler::Constant(0.0),
            PayoffConvention::Physical,
            10_000,
            1,
        )
        .unwrap();
        assert_eq!(always.estimate, 1.0);
        assert_eq!(always.stderr, 0.0);
        let never = estimate_payoff(
            &g,
            &Sampler::Constant(0.5),
            &Sampler::Constant(1.0),
            PayoffConvention::Physical,
            10_000,
            1,
        )
        .unwrap();
        assert_eq!(never.estimate, 0.0);
    }

    #[test]
    fn uniform_against_uniform_is_even() {
        let g = MonotoneCurve::identity();
        let report = estimate_payoff(
            &g,
            &Sampler::Uniform { hi: 2.0 },
            &Sampler::Uniform { hi: 2.0 },
            PayoffConvention::Physical,
            400_000,
            2,
        )
        .unwrap()
        .with_target(0.5);
        assert!(report.within(3.5), "estimate {}", report.estimate);
    }

    #[test]
    fn unit_game_payoff_is_half() {
        let (g, eq) = unit_game();
        let (tx, jam) = strategy_samplers(&g, &eq);
        let report =
            estimate_payoff(&g, &tx, &jam, PayoffConvention::Physical, 400_000, 1)
                .unwrap()
                .with_target(eq.payoff);
        assert!(report.within(3.5), "estimate {} vs {}", report.estimate, eq.payoff);
    }

    #[test]
    fn stderr_shrinks_with_root_n() {
        let (g, eq) = unit_game();
        let (tx, jam) = strategy_samplers(&g, &eq);
        let conv = PayoffConvention::Physical;
        let small = estimate_payoff(&g, &tx, &jam, conv, 50_000, 3).unwrap();
        let large = estimate_payoff(&g, &tx, &jam, conv, 200_000, 3).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn equilibrium_estimate_matches_value_under_physical() {
        // A curve with a jump, so the conventions genuinely differ.
        let g = MonotoneCurve::affine(1.0, 1.0).unwrap();
        let eq = solve_general_game(&g, 2.0, 1.0, 1e-8).unwrap();
        let (tx, jam) = strategy_samplers(&g, &eq);
        let report =
            estimate_payoff(&g, &tx, &jam, PayoffConvention::Physical, 400_000, 7)
                .unwrap()
                .with_target(eq.payoff);
        assert!(report.within(3.5), "estimate {} vs value {}", report.estimate, eq.payoff);
    }

    #[test]
    fn conventions_differ_by_the_zero_atom_product() {
        let g = MonotoneCurve::affine(1.0, 1.0).unwrap();
        let eq = solve_general_game(&g, 2.0, 1.0, 1e-8).unwrap();
        assert!(eq.k_x < 1.0);
        let (tx, jam) = equilibrium_strategies(&g, &eq);
        let gap = tx.zero_atom_mass() * jam.zero_atom_mass();
        assert!(gap > 0.01);
        let (sx, sy) = (Sampler::Strategy(tx), Sampler::Strategy(jam));
        let n = 400_000;
        let abs = estimate_payoff(&g, &sx, &sy, PayoffConvention::Abstract, n, 5).unwrap();
        let phys = estimate_payoff(&g, &sx, &sy, PayoffConvention::Physical, n, 5).unwrap();
        // Shared seed: the indicators differ exactly on mutual-silence
        // frames, so the estimate gap is itself a binomial estimate of the
        // atom product.
        let diff = abs.estimate - phys.estimate;
        assert!(diff >= 0.0);
        let sigma = (gap * (1.0 - gap) / n as f64).sqrt();
        assert!((diff - gap).abs() < 4.0 * sigma, "diff {diff} vs gap {gap}");
    }

    #[test]
    fn outage_scenarios_hit_their_probabilities() {
        let peak =
            estimate_outage(&OutageScenario::Peak { capacity: 2.0, rate: 2.0 }, 1000, 1).unwrap();
        assert_eq!(peak.estimate, 0.0);
        let peak_bad =
            estimate_outage(&OutageScenario::Peak { capacity: 1.9, rate: 2.0 }, 1000, 1).unwrap();
        assert_eq!(peak_bad.estimate, 1.0);

        let n = 300_000;
        let m = estimate_outage(&OutageScenario::Maximin { p_t: 0.7 }, n, 2)
            .unwrap()
            .with_target(0.3);
        assert!(m.within(3.5), "maximin estimate {}", m.estimate);

        let mm = estimate_outage(&OutageScenario::Minimax { p_t: 0.8, p_j: 0.25 }, n, 3)
            .unwrap()
            .with_target(1.0 - 0.8 + 0.8 * 0.25);
        assert!(mm.within(3.5), "minimax estimate {}", mm.estimate);

        let degenerate = estimate_outage(&OutageScenario::Maximin { p_t: 1.0 }, 1000, 4).unwrap();
        assert_eq!(degenerate.estimate, 0.0);
        assert!(estimate_outage(&OutageScenario::Maximin { p_t: 1.2 }, 10, 0).is_err());
    }

    #[test]
    fn mixed_outage_complements_the_payoff() {
        let g = MonotoneCurve::affine(1.0, 1.0).unwrap();
        let eq = solve_general_game(&g, 2.0, 1.0, 1e-8).unwrap();
        let (tx, jam) = equilibrium_strategies(&g, &eq);
        let scenario = OutageScenario::Mixed { g: g.clone(), tx, jam };
        let report = estimate_outage(&scenario, 400_000, 11)
            .unwrap()
            .with_target(1.0 - eq.payoff);
        assert!(report.within(3.5), "outage {} vs {}", report.estimate, 1.0 - eq.payoff);
    }

    #[test]
    fn sampler_means_and_ranges() {
        let mut rng = SplitMix64::new(8);
        let samplers = standard_deviation_family(10.0);
        assert_eq!(samplers.len(), 4);
        for s in &samplers {
            let mut sum = 0.0;
            let n = 100_000;
            for _ in 0..n {
                let v = s.draw(&mut rng).unwrap();
                assert!((0.0..=20.0).contains(&v), "{} produced {v}", s.label());
                sum += v;
            }
            let mean = s.mean().unwrap();
            assert!(
                (sum / n as f64 - mean).abs() < 0.1,
                "{}: empirical {} vs {}",
                s.label(),
                sum / n as f64,
                mean
            );
            assert!(mean <= 10.0 + 1e-12);
        }
        assert!(Sampler::TwoPoint { lo: -1.0, hi: 1.0, p_hi: 0.5 }.validate().is_err());
    }

    #[test]
    fn overspending_deviation_is_rejected() {
        let (g, eq) = unit_game();
        let err =
            deviation_probe(&g, &eq, Deviator::Jammer, &Sampler::Constant(1.2), 20_000, 1);
        assert!(matches!(err, Err(Error::Argument(_))), "{err:?}");
    }

    #[test]
    fn equilibrium_holds_against_standard_deviations() {
        let g = MonotoneCurve::affine(1.0, 1.0).unwrap();
        let eq = solve_general_game(&g, 2.0, 1.0, 1e-8).unwrap();
        let reports = deviation_test(&g, &eq, 1_000_000, 33).unwrap();
        assert_eq!(reports.len(), 8);
        for r in &reports {
            assert!(
                r.within_bound,
                "{} '{}' broke its bound: payoff {} vs {}",
                r.deviator, r.label, r.simulation.estimate, r.bound
            );
            assert!(r.measured_mean <= r.budget * (1.0 + 1e-3));
        }
        // The all-in jamming atom saturates the transmitter's security level
        // (equality case), so the estimate must also sit close from above.
        let atom = &reports[4];
        assert_eq!(atom.label, "constant(1)");
        assert!(
            (atom.simulation.estimate - atom.bound).abs() < 4.0 * atom.simulation.stderr,
            "tight deviation drifted: {} vs {}",
            atom.simulation.estimate,
            atom.bound
        );
    }

    #[test]
    fn zero_budget_jammer_deviation_measures_the_transmit_mass() {
        let g = MonotoneCurve::affine(1.0, 1.0).unwrap();
        let eq = solve_general_game(&g, 2.0, 1.0, 1e-8).unwrap();
        let r = deviation_probe(&g, &eq, Deviator::Jammer, &Sampler::Constant(0.0), 400_000, 3)
            .unwrap();
        // Against a silent jammer the payoff is the probability the
        // transmitter covers the jump, i.e. its non-atom mass.
        let sim = r.simulation.with_target(eq.k_x);
        assert!(sim.within(3.5), "estimate {} vs k_x {}", sim.estimate, eq.k_x);
    }
}
