//! Per-frame power duels at a fixed coding rate.
//!
//! The central object is the required-power map: for a jamming budget
//! `J_M`, the least average transmit power `P_M` that keeps the ergodic
//! capacity of the fading channel at the target rate when the jammer spends
//! `J_M` adversarially. [`solve_problem1`] computes one point of that map
//! from the first-order structure of the underlying min-max problem,
//! [`solve_problem1_discrete`] recomputes it on a gridded gain law by a
//! completely independent search (used to cross-check the continuous
//! solver), and [`required_tx_power_curve`] tabulates the map into a
//! [`PowerCurve`]. [`peak_game_solve`] solves the complementary two-sided
//! game in which both players are average-power constrained inside the frame
//! and capacity itself is the payoff.

use rayon::prelude::*;

use crate::channel::FadingModel;
use crate::numeric::{self, Bisection};
use crate::{Error, Result};

/// Default relative residual target for the solver bisections in this module.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Bracket a root of an increasing function, growing geometrically from the
/// seed interval in whichever direction is needed.
fn bracket_increasing<F>(
    mut f: F,
    seed_lo: f64,
    seed_hi: f64,
    floor: f64,
    cap: f64,
    what: &str,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let flo = f(seed_lo)?;
    if flo == 0.0 {
        return Ok((seed_lo, seed_lo));
    }
    if flo > 0.0 {
        return numeric::grow_downward(&mut f, 0.25 * seed_lo, seed_lo, 4.0, floor, what);
    }
    let fhi = f(seed_hi)?;
    if fhi >= 0.0 {
        return Ok((seed_lo, seed_hi));
    }
    numeric::grow_upward(&mut f, seed_hi, 4.0 * seed_hi, 4.0, cap, what)
}

/// Same as [`bracket_increasing`] for a decreasing function.
fn bracket_decreasing<F>(
    mut f: F,
    seed_lo: f64,
    seed_hi: f64,
    floor: f64,
    cap: f64,
    what: &str,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let flo = f(seed_lo)?;
    if flo == 0.0 {
        return Ok((seed_lo, seed_lo));
    }
    if flo < 0.0 {
        return numeric::grow_downward(&mut f, 0.25 * seed_lo, seed_lo, 4.0, floor, what);
    }
    let fhi = f(seed_hi)?;
    if fhi <= 0.0 {
        return Ok((seed_lo, seed_hi));
    }
    numeric::grow_upward(&mut f, seed_hi, 4.0 * seed_hi, 4.0, cap, what)
}

/// Ergodic capacity `E[ln(1 + h·tx(h)/(noise_floor + jam(h)))]` in nats per
/// channel use. `tx` and `jam` are power profiles over the gain and must be
/// non-negative wherever the law puts mass.
pub fn ergodic_capacity(
    model: &FadingModel,
    tx: &dyn Fn(f64) -> f64,
    jam: &dyn Fn(f64) -> f64,
    noise_floor: f64,
) -> Result<f64> {
    if !(noise_floor.is_finite() && noise_floor > 0.0) {
        return Err(Error::argument(format!("noise floor must be positive, got {noise_floor}")));
    }
    // Spot-check the profiles for negativity on a quantile sweep before
    // handing them to the quadrature.
    for i in 0..64 {
        let u = (i as f64 + 0.5) / 64.0;
        let h = model.quantile(u)?;
        if tx(h) < 0.0 {
            return Err(Error::argument(format!("transmit profile negative at h = {h:e}")));
        }
        if jam(h) < 0.0 {
            return Err(Error::argument(format!("jamming profile negative at h = {h:e}")));
        }
    }
    model.expectation_full(&|h| (h * tx(h) / (noise_floor + jam(h))).ln_1p())
}

/// Rate-targeting water-filling against a fixed noise level `floor`:
/// returns `(water_level, avg_power)` with the profile
/// `P(h) = max(water_level - floor/h, 0)` sized so the ergodic capacity
/// equals `rate`.
pub fn waterfill_power(model: &FadingModel, floor: f64, rate: f64) -> Result<(f64, f64)> {
    if !(floor.is_finite() && floor > 0.0) {
        return Err(Error::argument(format!("noise level must be positive, got {floor}")));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::argument(format!("rate must be non-negative, got {rate}")));
    }
    if rate == 0.0 {
        return Ok((0.0, 0.0));
    }
    let h_max = model.support_max();
    let resid = |level: f64| -> Result<f64> {
        let on = (floor / level).min(h_max);
        Ok(model.expectation(&|h| (level * h / floor).ln().max(0.0), on, f64::INFINITY)? - rate)
    };
    let lo0 = floor / h_max;
    let (lo, hi) = bracket_increasing(&resid, lo0, 4.0 * lo0, 1e-300, 1e15 * floor.max(1.0), "water level")?;
    let root = numeric::bisect(
        &resid,
        lo,
        hi,
        Bisection::residual(RESIDUAL_TOL * rate.max(1.0)),
        "water level",
    )?;
    let level = root.x;
    let power = model.expectation(
        &|h| (level - floor / h).max(0.0),
        (floor / level).min(h_max),
        f64::INFINITY,
    )?;
    Ok((level, power))
}

/// One point of the required-power trade-off together with the optimal
/// profiles, in parametric form.
///
/// The transmit profile is `0` below `tx_threshold`, the water-filling shape
/// `water_level - noise_floor/h` between the thresholds, and
/// `jam_multiplier · jam_noise(h)` above `jam_threshold`. The effective noise
/// `jam_noise(h)` sits at `noise_floor` below `jam_threshold` and at
/// `water_level·h/(1 + jam_multiplier·h)` above it.
#[derive(Debug, Clone)]
pub struct FrameSolution {
    /// Gain below which the transmitter is silent (`noise_floor/water_level`).
    pub tx_threshold: f64,
    /// Gain at and above which the jammer is active; `None` when the jamming
    /// budget is zero and the solution degenerates to plain water-filling.
    pub jam_threshold: Option<f64>,
    /// Ratio of transmit power to effective noise on the jammed region; zero
    /// when the jammer is absent.
    pub jam_multiplier: f64,
    /// Water level of the transmit profile.
    pub water_level: f64,
    /// Average transmit power spent by the profile.
    pub tx_budget: f64,
    /// Average jamming power the profile defends against.
    pub jam_budget: f64,
    pub noise_floor: f64,
    pub rate: f64,
}

impl FrameSolution {
    /// Transmit power at gain `h`.
    pub fn tx_power(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        match self.jam_threshold {
            Some(onset) if h >= onset => self.jam_multiplier * self.jam_noise(h),
            _ => {
                if self.water_level == 0.0 {
                    0.0
                } else {
                    (self.water_level - self.noise_floor / h).max(0.0)
                }
            }
        }
    }

    /// Effective noise (ambient plus jamming) at gain `h`.
    pub fn jam_noise(&self, h: f64) -> f64 {
        match self.jam_threshold {
            Some(onset) if h >= onset => self.water_level * h / (1.0 + self.jam_multiplier * h),
            _ => self.noise_floor,
        }
    }

    /// Jamming power at gain `h`.
    pub fn jam_power(&self, h: f64) -> f64 {
        (self.jam_noise(h) - self.noise_floor).max(0.0)
    }
}

fn validate_problem1_args(rate: f64, noise_floor: f64, jam_budget: f64) -> Result<()> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::argument(format!("rate must be non-negative, got {rate}")));
    }
    if !(noise_floor.is_finite() && noise_floor > 0.0) {
        return Err(Error::argument(format!("noise floor must be positive, got {noise_floor}")));
    }
    if !(jam_budget.is_finite() && jam_budget >= 0.0) {
        return Err(Error::argument(format!(
            "jamming budget must be non-negative, got {jam_budget}"
        )));
    }
    Ok(())
}

fn waterfill_solution(model: &FadingModel, rate: f64, noise_floor: f64) -> Result<FrameSolution> {
    let (level, power) = waterfill_power(model, noise_floor, rate)?;
    Ok(FrameSolution {
        tx_threshold: if level > 0.0 { noise_floor / level } else { f64::INFINITY },
        jam_threshold: None,
        jam_multiplier: 0.0,
        water_level: level,
        tx_budget: power,
        jam_budget: 0.0,
        noise_floor,
        rate,
    })
}

/// A tabulated law whose mass sits on one positive gain behaves exactly like
/// a point mass.
fn single_atom(model: &FadingModel) -> Option<f64> {
    use crate::channel::GainLaw;
    match model.law() {
        GainLaw::PointMass { gain } => Some(*gain),
        GainLaw::Tabulated { step, masses } => {
            let mut atom = None;
            for (k, m) in masses.iter().enumerate() {
                if *m > 0.0 {
                    if atom.is_some() {
                        return None;
                    }
                    atom = Some(k as f64 * step);
                }
            }
            atom.filter(|h| *h > 0.0)
        }
        _ => None,
    }
}

/// Minimum average transmit power sustaining `rate` against the worst-case
/// jammer of average power `jam_budget`, with both optimal profiles.
///
/// Budgets below `1e-9` fall back to the plain water-filling solution.
/// Single-atom laws are solved in closed form and tabulated laws are routed
/// through [`solve_problem1_discrete`].
pub fn solve_problem1(
    model: &FadingModel,
    rate: f64,
    noise_floor: f64,
    jam_budget: f64,
) -> Result<FrameSolution> {
    validate_problem1_args(rate, noise_floor, jam_budget)?;
    if rate == 0.0 {
        return Ok(FrameSolution {
            tx_threshold: f64::INFINITY,
            jam_threshold: None,
            jam_multiplier: 0.0,
            water_level: 0.0,
            tx_budget: 0.0,
            jam_budget,
            noise_floor,
            rate,
        });
    }
    if jam_budget < 1e-9 {
        return waterfill_solution(model, rate, noise_floor);
    }
    if let Some(gain) = single_atom(model) {
        // One channel state: the jammer spreads evenly and the transmitter
        // needs exactly the rate-matching SNR on top of it.
        let mul = (rate.exp() - 1.0) / gain;
        let noise = noise_floor + jam_budget;
        let level = noise * rate.exp() / gain;
        return Ok(FrameSolution {
            tx_threshold: noise_floor / level,
            jam_threshold: Some(gain),
            jam_multiplier: mul,
            water_level: level,
            tx_budget: mul * noise,
            jam_budget,
            noise_floor,
            rate,
        });
    }
    if model.tabulated_parts().is_some() {
        return solve_problem1_discrete(model, rate, noise_floor, jam_budget);
    }
    solve_problem1_continuous(model, rate, noise_floor, jam_budget)
}

fn solve_problem1_continuous(
    model: &FadingModel,
    rate: f64,
    noise_floor: f64,
    jam_budget: f64,
) -> Result<FrameSolution> {
    let h_max = model.support_max();
    let sigma2 = noise_floor;

    // Capacity-pinning inner solve: given the jammer-onset gain, find the
    // multiplier at which the profile pair delivers exactly `rate`. The
    // capacity is strictly increasing in the multiplier.
    let mul_for_onset = |onset: f64| -> Result<f64> {
        let cap = |mul: f64| -> Result<f64> {
            let h0 = onset / (1.0 + mul * onset);
            let low = model.expectation(&|h| (h / h0).ln(), h0, onset)?;
            let high = model.expectation(&|h| (mul * h).ln_1p(), onset, f64::INFINITY)?;
            Ok(low + high - rate)
        };
        let (lo, hi) = bracket_increasing(&cap, 0.0, 1.0, 1e-300, 1e18, "rate multiplier")?;
        let root = numeric::bisect(
            &cap,
            lo,
            hi,
            Bisection::residual(RESIDUAL_TOL * rate.max(1.0)),
            "rate multiplier",
        )?;
        Ok(root.x)
    };

    // Average jamming power spent by the capacity-pinned profile at a given
    // onset; strictly decreasing in the onset.
    let budget_gap = |onset: f64| -> Result<f64> {
        let mul = mul_for_onset(onset)?;
        let tail = model.expectation(&|h| (h - onset) / (1.0 + mul * h), onset, f64::INFINITY)?;
        Ok(sigma2 * tail / onset - jam_budget)
    };

    // Outer bracket. Above `onset_hi` even a zero multiplier cannot spend the
    // budget, so the root must sit below it.
    let spend_cap = |onset: f64| -> Result<f64> {
        let tail = model.expectation(&|h| h - onset, onset, f64::INFINITY)?;
        Ok(sigma2 * tail / onset - jam_budget)
    };
    let scale_h = model.quantile(0.5)?.max(h_max * 1e-6);
    let (lo_cap, hi_cap) = numeric::grow_downward(
        &spend_cap,
        scale_h,
        h_max * (1.0 - 1e-9),
        4.0,
        1e-15 * scale_h,
        "jammer onset ceiling",
    )?;
    let onset_hi = numeric::bisect(
        &spend_cap,
        lo_cap,
        hi_cap,
        Bisection::residual(RESIDUAL_TOL * jam_budget.max(1.0)),
        "jammer onset ceiling",
    )?
    .x;
    let (onset_lo, onset_hi) = numeric::grow_downward(
        &budget_gap,
        onset_hi * 0.5,
        onset_hi,
        4.0,
        1e-15 * scale_h,
        "jammer onset",
    )?;
    let onset = numeric::bisect(
        &budget_gap,
        onset_lo,
        onset_hi,
        Bisection::residual(RESIDUAL_TOL * jam_budget.max(1e-3 * sigma2)),
        "jammer onset",
    )?
    .x;

    let mul = mul_for_onset(onset)?;
    let level = sigma2 * (1.0 + mul * onset) / onset;
    let h0 = sigma2 / level;
    let tx_budget = model.expectation(&|h| (level - sigma2 / h).max(0.0), h0, onset)?
        + model.expectation(&|h| level * mul * h / (1.0 + mul * h), onset, f64::INFINITY)?;
    Ok(FrameSolution {
        tx_threshold: h0,
        jam_threshold: Some(onset),
        jam_multiplier: mul,
        water_level: level,
        tx_budget,
        jam_budget,
        noise_floor: sigma2,
        rate,
    })
}

/// Independent re-derivation of [`solve_problem1`] on a tabulated law: the
/// jammer-onset point is located by a feasibility search over the grid and
/// certified by the discrete optimality sandwich instead of the continuous
/// boundary conditions.
pub fn solve_problem1_discrete(
    model: &FadingModel,
    rate: f64,
    noise_floor: f64,
    jam_budget: f64,
) -> Result<FrameSolution> {
    validate_problem1_args(rate, noise_floor, jam_budget)?;
    let Some((step, masses)) = model.tabulated_parts() else {
        return Err(Error::argument("discrete solver needs a tabulated law"));
    };
    if rate == 0.0 || jam_budget < 1e-9 || single_atom(model).is_some() {
        return solve_problem1(model, rate, noise_floor, jam_budget);
    }
    let sigma2 = noise_floor;
    let support: Vec<(f64, f64)> = masses
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 0.0)
        .map(|(k, m)| (k as f64 * step, *m))
        .collect();
    let candidates: Vec<usize> = (0..support.len()).filter(|i| support[*i].0 > 0.0).collect();
    if candidates.is_empty() {
        return Err(Error::argument("law has no mass on positive gains"));
    }

    struct Pinned {
        mul: f64,
        level: f64,
    }
    // Pin the multiplier by capacity at a candidate onset (an index into
    // `candidates`); the jamming budget is absorbed into the level
    // normalisation, so it is met exactly by construction.
    let pin = |ci: usize| -> Result<Option<Pinned>> {
        let onset_idx = candidates[ci];
        let tail_mass: f64 = support[onset_idx..].iter().map(|(_, m)| m).sum();
        let level_at = |mul: f64| -> f64 {
            let s: f64 = support[onset_idx..]
                .iter()
                .map(|(h, m)| h / (1.0 + mul * h) * m)
                .sum();
            (jam_budget + sigma2 * tail_mass) / s
        };
        let cap_gap = |mul: f64| -> Result<f64> {
            let level = level_at(mul);
            let mut c = 0.0;
            for (h, m) in &support[..onset_idx] {
                if *h > 0.0 && level * h > sigma2 {
                    c += (level * h / sigma2).ln() * m;
                }
            }
            for (h, m) in &support[onset_idx..] {
                c += (mul * h).ln_1p() * m;
            }
            Ok(c - rate)
        };
        if cap_gap(0.0)? > 0.0 {
            // The budget normalisation alone already overshoots the rate:
            // this onset is too far out for a non-negative multiplier.
            return Ok(None);
        }
        let (lo, hi) = bracket_increasing(&cap_gap, 0.0, 1.0, 1e-300, 1e18, "grid rate multiplier")?;
        let root = numeric::bisect(
            &cap_gap,
            lo,
            hi,
            Bisection::residual(RESIDUAL_TOL * rate.max(1.0)),
            "grid rate multiplier",
        )?;
        let mul = root.x;
        Ok(Some(Pinned { mul, level: level_at(mul) }))
    };

    let noise_at = |p: &Pinned, h: f64| p.level * h / (1.0 + p.mul * h);
    // True once the pinned profile's effective noise at the onset covers the
    // ambient floor — i.e. once the candidate sits at or beyond the optimum.
    // The threshold-uniqueness property of the gridded system makes this
    // predicate monotone over the candidates; the sandwich is re-verified at
    // the located boundary.
    let beyond = |ci: usize| -> Result<bool> {
        match pin(ci)? {
            None => Ok(true),
            Some(p) => Ok(noise_at(&p, support[candidates[ci]].0) >= sigma2),
        }
    };

    let n = candidates.len();
    if !beyond(n - 1)? {
        return Err(Error::Resolution(
            "no feasible jammer onset on this grid; extend or refine it".into(),
        ));
    }
    let mut hi = n - 1;
    if beyond(0)? {
        hi = 0;
    } else {
        let mut lo = 0usize;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if beyond(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let ci = hi;
    let onset = support[candidates[ci]].0;
    let pinned = pin(ci)?.ok_or_else(|| {
        Error::Resolution(format!("onset candidate h = {onset:e} infeasible; refine the grid step"))
    })?;

    // Discrete optimality sandwich: ambient noise is covered at the onset but
    // would not be at the previous positive-mass gain.
    let fuzz = 1e-9 * sigma2;
    if noise_at(&pinned, onset) < sigma2 - fuzz {
        return Err(Error::Resolution(format!(
            "effective noise below ambient at onset h = {onset:e}; refine the grid step"
        )));
    }
    if ci > 0 {
        let prev = support[candidates[ci - 1]].0;
        if noise_at(&pinned, prev) >= sigma2 + fuzz {
            return Err(Error::Resolution(format!(
                "onset not separated at step {step:e}; refine the grid step"
            )));
        }
    }

    let onset_idx = candidates[ci];
    let mut tx_budget = 0.0;
    for (h, m) in &support[..onset_idx] {
        if *h > 0.0 {
            tx_budget += (pinned.level - sigma2 / h).max(0.0) * m;
        }
    }
    for (h, m) in &support[onset_idx..] {
        tx_budget += pinned.mul * noise_at(&pinned, *h) * m;
    }
    Ok(FrameSolution {
        tx_threshold: sigma2 / pinned.level,
        jam_threshold: Some(onset),
        jam_multiplier: pinned.mul,
        water_level: pinned.level,
        tx_budget,
        jam_budget,
        noise_floor: sigma2,
        rate,
    })
}

/// Metadata stamped onto emitted curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMeta {
    pub rate: f64,
    pub noise_floor: f64,
    pub model: String,
    pub residual_tol: f64,
    pub quad_rel_tol: f64,
}

impl CurveMeta {
    pub fn new(model: &FadingModel, rate: f64, noise_floor: f64) -> Self {
        CurveMeta {
            rate,
            noise_floor,
            model: model.describe(),
            residual_tol: RESIDUAL_TOL,
            quad_rel_tol: model.quadrature().rel_tol,
        }
    }

    pub fn unknown() -> Self {
        CurveMeta {
            rate: f64::NAN,
            noise_floor: f64::NAN,
            model: "unknown".into(),
            residual_tol: RESIDUAL_TOL,
            quad_rel_tol: f64::NAN,
        }
    }
}

/// Piecewise-linear, strictly increasing map from jamming budget to required
/// transmit power, anchored at `(0, P_WF)`.
///
/// Queries beyond the last sample follow the final secant — an approximation
/// — and are only answered when extension is switched on.
#[derive(Debug, Clone)]
pub struct PowerCurve {
    jam: Vec<f64>,
    power: Vec<f64>,
    /// `prefix[i]` = integral of the interpolant over `[0, jam[i]]`.
    prefix: Vec<f64>,
    allow_extension: bool,
    meta: CurveMeta,
}

impl PowerCurve {
    pub fn from_samples(samples: &[(f64, f64)], meta: CurveMeta) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::argument("curve needs at least two samples"));
        }
        if samples[0].0 != 0.0 {
            return Err(Error::argument("curve must start at zero jamming power"));
        }
        if samples.iter().any(|(j, p)| !j.is_finite() || !p.is_finite() || *p <= 0.0) {
            return Err(Error::argument("curve samples must be finite with positive power"));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1) {
                return Err(Error::argument(format!(
                    "curve samples must be strictly increasing: ({:e},{:e}) then ({:e},{:e})",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        let jam: Vec<f64> = samples.iter().map(|(j, _)| *j).collect();
        let power: Vec<f64> = samples.iter().map(|(_, p)| *p).collect();
        let mut prefix = Vec::with_capacity(jam.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for i in 1..jam.len() {
            acc += 0.5 * (power[i] + power[i - 1]) * (jam[i] - jam[i - 1]);
            prefix.push(acc);
        }
        Ok(PowerCurve { jam, power, prefix, allow_extension: false, meta })
    }

    pub fn with_extension(mut self, on: bool) -> Self {
        self.allow_extension = on;
        self
    }

    pub fn extension_enabled(&self) -> bool {
        self.allow_extension
    }

    pub fn meta(&self) -> &CurveMeta {
        &self.meta
    }

    /// Required power with no jammer (`P_WF`).
    pub fn power_at_zero(&self) -> f64 {
        self.power[0]
    }

    /// Largest sampled jamming budget.
    pub fn max_jam(&self) -> f64 {
        *self.jam.last().unwrap()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.jam.iter().copied().zip(self.power.iter().copied())
    }

    /// Whether a query at jamming budget `j` would use the secant extension.
    pub fn extrapolates_at(&self, j: f64) -> bool {
        j > self.max_jam()
    }

    fn segment(&self, j: f64) -> usize {
        match self.jam.binary_search_by(|x| x.partial_cmp(&j).unwrap()) {
            Ok(i) => i.min(self.jam.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.jam.len() - 2),
        }
    }

    fn last_slope(&self) -> f64 {
        let n = self.jam.len();
        (self.power[n - 1] - self.power[n - 2]) / (self.jam[n - 1] - self.jam[n - 2])
    }

    /// Required transmit power at jamming budget `j`.
    pub fn power_at(&self, j: f64) -> Result<f64> {
        if !(j >= 0.0) {
            return Err(Error::argument(format!("jamming budget must be non-negative, got {j}")));
        }
        let n = self.jam.len();
        if j > self.jam[n - 1] {
            if !self.allow_extension {
                return Err(Error::Range(format!(
                    "jamming budget {j:e} beyond sampled {:e} (extension disabled)",
                    self.jam[n - 1]
                )));
            }
            return Ok(self.power[n - 1] + self.last_slope() * (j - self.jam[n - 1]));
        }
        let i = self.segment(j);
        let t = (j - self.jam[i]) / (self.jam[i + 1] - self.jam[i]);
        Ok(self.power[i] + t * (self.power[i + 1] - self.power[i]))
    }

    /// Largest jamming budget survivable at transmit power `p` (the inverse
    /// map); `0` for `p` at or below the no-jammer requirement.
    pub fn jam_at(&self, p: f64) -> Result<f64> {
        if !p.is_finite() {
            return Err(Error::argument(format!("power must be finite, got {p}")));
        }
        let n = self.power.len();
        if p <= self.power[0] {
            return Ok(0.0);
        }
        if p > self.power[n - 1] {
            if !self.allow_extension {
                return Err(Error::Range(format!(
                    "power {p:e} beyond sampled {:e} (extension disabled)",
                    self.power[n - 1]
                )));
            }
            return Ok(self.jam[n - 1] + (p - self.power[n - 1]) / self.last_slope());
        }
        let i = match self.power.binary_search_by(|x| x.partial_cmp(&p).unwrap()) {
            Ok(i) => return Ok(self.jam[i]),
            Err(i) => i - 1,
        };
        let t = (p - self.power[i]) / (self.power[i + 1] - self.power[i]);
        Ok(self.jam[i] + t * (self.jam[i + 1] - self.jam[i]))
    }

    /// Integral of the interpolant over `[0, t]` (exact for the piecewise
    /// linear curve; extended quadratically past the last sample).
    pub fn integral_power(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::argument(format!("integral bound must be non-negative, got {t}")));
        }
        let n = self.jam.len();
        if t > self.jam[n - 1] {
            if !self.allow_extension {
                return Err(Error::Range(format!(
                    "integral bound {t:e} beyond sampled {:e} (extension disabled)",
                    self.jam[n - 1]
                )));
            }
            let d = t - self.jam[n - 1];
            return Ok(self.prefix[n - 1] + self.power[n - 1] * d + 0.5 * self.last_slope() * d * d);
        }
        let i = self.segment(t);
        let p_t = self.power_at(t)?;
        Ok(self.prefix[i] + 0.5 * (self.power[i] + p_t) * (t - self.jam[i]))
    }

    /// Second divided differences of the samples; all of them at or below a
    /// small positive fuzz certifies concavity.
    pub fn second_divided_differences(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 1..self.jam.len() - 1 {
            let s1 = (self.power[i] - self.power[i - 1]) / (self.jam[i] - self.jam[i - 1]);
            let s2 = (self.power[i + 1] - self.power[i]) / (self.jam[i + 1] - self.jam[i]);
            out.push((s2 - s1) / (self.jam[i + 1] - self.jam[i - 1]));
        }
        out
    }

    /// Serialise as commented CSV (`j_m,p_m`, 17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# required transmit power vs jamming power\n");
        out.push_str(&format!(
            "# model: {} rate: {:e} noise_floor: {:e}\n",
            self.meta.model, self.meta.rate, self.meta.noise_floor
        ));
        out.push_str(&format!(
            "# residual_tol: {:e} quad_rel_tol: {:e}\n",
            self.meta.residual_tol, self.meta.quad_rel_tol
        ));
        out.push_str("j_m,p_m\n");
        for (j, p) in self.samples() {
            out.push_str(&format!("{j:.16e},{p:.16e}\n"));
        }
        out
    }

    /// Parse the output of [`Self::to_csv`]; header comments are ignored.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if rows.is_empty() && line.replace(' ', "") == "j_m,p_m" {
                continue;
            }
            let mut parts = line.split(',');
            let j: f64 = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing jamming power", i + 1)))?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            let p: f64 = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing power", i + 1)))?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            rows.push((j, p));
        }
        PowerCurve::from_samples(&rows, CurveMeta::unknown())
    }
}

/// Tabulate the required-power map on `jam_grid` (a zero budget is prepended
/// when missing so the curve is anchored at `(0, P_WF)`).
pub fn required_tx_power_curve(
    model: &FadingModel,
    rate: f64,
    noise_floor: f64,
    jam_grid: &[f64],
) -> Result<PowerCurve> {
    if jam_grid.is_empty() {
        return Err(Error::argument("empty jamming-budget grid"));
    }
    let mut grid: Vec<f64> = Vec::with_capacity(jam_grid.len() + 1);
    if jam_grid[0] != 0.0 {
        grid.push(0.0);
    }
    grid.extend_from_slice(jam_grid);
    if grid.iter().any(|j| !j.is_finite() || *j < 0.0) {
        return Err(Error::argument("jamming-budget grid must be finite and non-negative"));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::argument("jamming-budget grid must be strictly increasing"));
        }
    }
    let samples: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&j| {
            solve_problem1(model, rate, noise_floor, j)
                .map(|s| (j, s.tx_budget))
                .map_err(|e| e.context(format!("at jamming budget {j:e}")))
        })
        .collect::<Result<_>>()?;
    PowerCurve::from_samples(&samples, CurveMeta::new(model, rate, noise_floor))
}

/// Largest jamming budget survivable at transmit power `power` — the exact
/// inverse of [`solve_problem1`], found by re-solving rather than by
/// interpolating a sampled curve. Returns 0 for powers at or below the
/// no-jammer requirement.
pub fn required_jam_power(
    model: &FadingModel,
    rate: f64,
    noise_floor: f64,
    power: f64,
) -> Result<f64> {
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::argument(format!("power must be non-negative, got {power}")));
    }
    let (_, p_wf) = waterfill_power(model, noise_floor, rate)?;
    if power <= p_wf {
        return Ok(0.0);
    }
    let gap =
        |j: f64| -> Result<f64> { Ok(solve_problem1(model, rate, noise_floor, j)?.tx_budget - power) };
    let (lo, hi) = bracket_increasing(
        &gap,
        0.0,
        power.max(noise_floor),
        1e-300,
        1e12 * (power + noise_floor),
        "jam budget",
    )?;
    let root = numeric::bisect(&gap, lo, hi, Bisection::residual(1e-8 * power.max(1.0)), "jam budget")?;
    Ok(root.x)
}

/// Saddle point of the capacity game in which the transmitter and the jammer
/// are both average-power constrained inside the frame.
///
/// Below `jam_threshold` the transmitter water-fills against ambient noise
/// alone; at and above it both players are active. The game value is
/// `capacity`.
#[derive(Debug, Clone)]
pub struct PeakGameSolution {
    /// Marginal value of transmit power (water-filling dual variable).
    pub tx_multiplier: f64,
    /// Marginal value of jamming power; `None` when the jamming budget is 0.
    pub jam_multiplier: Option<f64>,
    /// Gain at which the jammer switches on; `None` when the budget is 0.
    pub jam_threshold: Option<f64>,
    pub tx_budget: f64,
    pub jam_budget: f64,
    /// Saddle-point ergodic capacity.
    pub capacity: f64,
    pub noise_floor: f64,
}

impl PeakGameSolution {
    pub fn tx_power(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        let lam = self.tx_multiplier;
        match (self.jam_multiplier, self.jam_threshold) {
            (Some(nu), Some(onset)) if h >= onset => h / (lam * (h + lam / nu)),
            _ => (1.0 / lam - self.noise_floor / h).max(0.0),
        }
    }

    pub fn jam_power(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        let lam = self.tx_multiplier;
        match (self.jam_multiplier, self.jam_threshold) {
            (Some(nu), Some(onset)) if h >= onset => (h / (nu * h + lam) - self.noise_floor).max(0.0),
            _ => 0.0,
        }
    }
}

/// Solve the two-sided average-power capacity game.
pub fn peak_game_solve(
    model: &FadingModel,
    noise_floor: f64,
    tx_budget: f64,
    jam_budget: f64,
) -> Result<PeakGameSolution> {
    if !(noise_floor.is_finite() && noise_floor > 0.0) {
        return Err(Error::argument(format!("noise floor must be positive, got {noise_floor}")));
    }
    if !(tx_budget.is_finite() && tx_budget > 0.0) {
        return Err(Error::argument(format!("transmit budget must be positive, got {tx_budget}")));
    }
    if !(jam_budget.is_finite() && jam_budget >= 0.0) {
        return Err(Error::argument(format!(
            "jamming budget must be non-negative, got {jam_budget}"
        )));
    }
    let sigma2 = noise_floor;
    let h_max = model.support_max();

    if jam_budget == 0.0 {
        // Capacity-maximising water-filling under the transmit budget alone.
        let spend = |lam: f64| -> Result<f64> {
            let on = (sigma2 * lam).min(h_max);
            Ok(model.expectation(&|h| (1.0 / lam - sigma2 / h).max(0.0), on, f64::INFINITY)?
                - tx_budget)
        };
        let (lo, hi) = bracket_decreasing(&spend, 1e-9, 1e3, 1e-300, 1e300, "capacity water level")?;
        let lam = numeric::bisect(
            &spend,
            lo,
            hi,
            Bisection::residual(RESIDUAL_TOL * tx_budget.max(1.0)),
            "capacity water level",
        )?
        .x;
        let capacity = model.expectation(
            &|h| (h / (sigma2 * lam)).ln().max(0.0),
            (sigma2 * lam).min(h_max),
            f64::INFINITY,
        )?;
        return Ok(PeakGameSolution {
            tx_multiplier: lam,
            jam_multiplier: None,
            jam_threshold: None,
            tx_budget,
            jam_budget,
            capacity,
            noise_floor: sigma2,
        });
    }

    // Inner solve: transmit level matching the budget at a fixed jammer
    // multiplier; spending is strictly decreasing in the level multiplier.
    let lam_for = |nu: f64| -> Result<f64> {
        let spend = |lam: f64| -> Result<f64> {
            let onset = sigma2 * lam / (1.0 - sigma2 * nu);
            let wf_on = (sigma2 * lam).min(h_max);
            let wf_off = onset.min(h_max);
            let low = model.expectation(&|h| (1.0 / lam - sigma2 / h).max(0.0), wf_on, wf_off)?;
            let high = model.expectation(&|h| h / (lam * (h + lam / nu)), wf_off, f64::INFINITY)?;
            Ok(low + high - tx_budget)
        };
        let (lo, hi) = bracket_decreasing(&spend, 1e-9, 1e3, 1e-300, 1e300, "transmit multiplier")?;
        Ok(numeric::bisect(
            &spend,
            lo,
            hi,
            Bisection::residual(RESIDUAL_TOL * tx_budget.max(1.0)),
            "transmit multiplier",
        )?
        .x)
    };
    let jam_spend = |nu: f64| -> Result<f64> {
        let lam = lam_for(nu)?;
        let onset = (sigma2 * lam / (1.0 - sigma2 * nu)).min(h_max);
        Ok(model.expectation(&|h| (h / (nu * h + lam) - sigma2).max(0.0), onset, f64::INFINITY)?
            - jam_budget)
    };
    // The jammer multiplier lives in (0, 1/σ²): spending explodes as it
    // drops toward zero and vanishes at the ceiling.
    let nu_ceiling = (1.0 - 1e-9) / sigma2;
    let (nu_lo, nu_hi) = numeric::grow_downward(
        &jam_spend,
        0.5 / sigma2,
        nu_ceiling,
        4.0,
        1e-18 / sigma2,
        "jammer multiplier",
    )?;
    let nu = numeric::bisect(
        &jam_spend,
        nu_lo,
        nu_hi,
        Bisection::residual(RESIDUAL_TOL * jam_budget.max(1.0)),
        "jammer multiplier",
    )?
    .x;
    let lam = lam_for(nu)?;
    let onset = sigma2 * lam / (1.0 - sigma2 * nu);
    let capacity = model.expectation(
        &|h| (h / (sigma2 * lam)).ln().max(0.0),
        (sigma2 * lam).min(h_max),
        onset.min(h_max),
    )? + model.expectation(&|h| (nu * h / lam).ln_1p(), onset.min(h_max), f64::INFINITY)?;
    Ok(PeakGameSolution {
        tx_multiplier: lam,
        jam_multiplier: Some(nu),
        jam_threshold: Some(onset),
        tx_budget,
        jam_budget,
        capacity,
        noise_floor: sigma2,
    })
}

/// Frame profiles under belief-consistent provisioning: the transmitter
/// defends against the jamming budget it can actually survive at its own
/// power, the jammer allocates against the transmit power matching its own
/// budget. Both sides come out of the two-sided capacity game.
#[derive(Debug, Clone)]
pub struct BayesProfiles {
    /// Game solved from the transmitter's standpoint.
    pub tx_game: PeakGameSolution,
    /// Game solved from the jammer's standpoint.
    pub jam_game: PeakGameSolution,
}

impl BayesProfiles {
    pub fn tx_power(&self, h: f64) -> f64 {
        self.tx_game.tx_power(h)
    }

    pub fn jam_power(&self, h: f64) -> f64 {
        self.jam_game.jam_power(h)
    }
}

/// Build the belief-consistent frame profiles for actual budgets
/// `(tx_budget, jam_budget)` at the given rate.
pub fn bayes_frame_profiles(
    model: &FadingModel,
    rate: f64,
    noise_floor: f64,
    tx_budget: f64,
    jam_budget: f64,
) -> Result<BayesProfiles> {
    let tx_belief = required_jam_power(model, rate, noise_floor, tx_budget)?;
    let jam_belief = solve_problem1(model, rate, noise_floor, jam_budget)?.tx_budget;
    let tx_game = peak_game_solve(model, noise_floor, tx_budget, tx_belief)?;
    let jam_game = peak_game_solve(model, noise_floor, jam_belief, jam_budget)?;
    Ok(BayesProfiles { tx_game, jam_game })
}

/// Rate-matching SNR multiplier when the transmitter gets no channel-state
/// feedback: the unique root of `E[ln(1 + mul·h)] = rate`.
pub fn nocsi_mu_prime(model: &FadingModel, rate: f64) -> Result<f64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::argument(format!("rate must be positive, got {rate}")));
    }
    let gap = |mul: f64| -> Result<f64> { Ok(model.expectation_full(&|h| (mul * h).ln_1p())? - rate) };
    let (lo, hi) = bracket_increasing(&gap, 1e-9, 1e-8, 1e-300, 1e18, "no-CSI multiplier")?;
    Ok(numeric::bisect(
        &gap,
        lo,
        hi,
        Bisection::residual(RESIDUAL_TOL * rate.max(1.0)),
        "no-CSI multiplier",
    )?
    .x)
}

/// Required-power line without channel-state feedback:
/// `P_M = mu_prime·(J_M + noise_floor)`, materialised as a two-sample curve
/// with extension enabled (the line is exact, so the secant is too).
pub fn nocsi_curve(
    mu_prime: f64,
    noise_floor: f64,
    jam_max: f64,
    meta: CurveMeta,
) -> Result<PowerCurve> {
    if !(mu_prime.is_finite() && mu_prime > 0.0) {
        return Err(Error::argument(format!("multiplier must be positive, got {mu_prime}")));
    }
    if !(jam_max.is_finite() && jam_max > 0.0) {
        return Err(Error::argument(format!("curve end must be positive, got {jam_max}")));
    }
    let samples =
        [(0.0, mu_prime * noise_floor), (jam_max, mu_prime * (jam_max + noise_floor))];
    Ok(PowerCurve::from_samples(&samples, meta)?.with_extension(true))
}
