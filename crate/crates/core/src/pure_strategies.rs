//! Outage probabilities of the non-mixed inter-frame regimes.
//!
//! Each regime fixes who commits first and what the jammer can observe, and
//! reduces to an on/off frame allocation on top of the per-frame
//! required-power curve: the transmitter closes a frame by spending the
//! requirement for the jamming that frame actually receives, and splits its
//! long-run budget across as many frames as it can afford.

use crate::channel::FadingModel;
use crate::frame_solver::{waterfill_power, PowerCurve};
use crate::{Error, Result};

/// Which commitment structure produced an outage figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Peak,
    Maximin,
    Minimax,
    Nonintelligent,
    Mixed,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Peak => "peak",
            Regime::Maximin => "maximin",
            Regime::Minimax => "minimax",
            Regime::Nonintelligent => "nonintelligent",
            Regime::Mixed => "mixed",
        }
    }
}

/// Outage probability of a regime together with the frame duty cycles that
/// produce it.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OutageReport {
    pub regime: Regime,
    pub p_out: f64,
    /// Fraction of frames the transmitter is on.
    pub p_t: f64,
    /// Fraction of (on-)frames the jammer hits.
    pub p_j: f64,
    /// Per-frame transmit power selected by the minimax search, when the
    /// regime involves one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_p_m: Option<f64>,
}

fn validate_budgets(p_bar: f64, j_bar: f64) -> Result<()> {
    if !(p_bar.is_finite() && p_bar > 0.0) {
        return Err(Error::argument(format!("transmit budget must be positive, got {p_bar}")));
    }
    if !(j_bar.is_finite() && j_bar >= 0.0) {
        return Err(Error::argument(format!("jamming budget must be non-negative, got {j_bar}")));
    }
    Ok(())
}

/// Outage under peak (per-frame) power constraints: both players are always
/// on, so the frame either supports the rate or it never does.
pub fn peak_outage(capacity: f64, rate: f64) -> OutageReport {
    OutageReport {
        regime: Regime::Peak,
        p_out: if capacity < rate { 1.0 } else { 0.0 },
        p_t: 1.0,
        p_j: 1.0,
        chosen_p_m: None,
    }
}

/// Jammer commits first and spreads its whole budget on every frame; the
/// transmitter then closes a `min(1, P/g(J))` fraction of frames.
pub fn maximin_outage(curve: &PowerCurve, p_bar: f64, j_bar: f64) -> Result<OutageReport> {
    validate_budgets(p_bar, j_bar)?;
    let required = curve.power_at(j_bar)?;
    let p_t = (p_bar / required).min(1.0);
    Ok(OutageReport {
        regime: Regime::Maximin,
        p_out: 1.0 - p_t,
        p_t,
        p_j: if j_bar > 0.0 { 1.0 } else { 0.0 },
        chosen_p_m: None,
    })
}

/// Knobs of the minimax grid search.
#[derive(Debug, Clone, Copy)]
pub struct MinimaxSearch {
    /// Geometric grid points per search range.
    pub resolution: usize,
    /// The upper end of the range is grown until the outage there exceeds
    /// `1 - epsilon`.
    pub epsilon: f64,
}

impl Default for MinimaxSearch {
    fn default() -> Self {
        MinimaxSearch { resolution: 2000, epsilon: 1e-3 }
    }
}

/// Transmitter commits first to a flat per-frame power `P_m`, the jammer
/// observes it and concentrates on as many active frames as its budget
/// kills. The search minimises the resulting outage over `P_m`.
///
/// For a given `P_m`, the transmitter runs `p_t = min(1, P/P_m)` of the
/// frames; a frame is dead outright when `P_m` is below the zero-jamming
/// requirement, and otherwise the jammer needs `g⁻¹(P_m)` per hit, so it hits
/// a `min(1, J/(p_t·g⁻¹(P_m)))` fraction of the active ones.
pub fn minimax_outage(
    curve: &PowerCurve,
    p_bar: f64,
    j_bar: f64,
    search: &MinimaxSearch,
) -> Result<OutageReport> {
    validate_budgets(p_bar, j_bar)?;
    if search.resolution < 2 || !(search.epsilon > 0.0 && search.epsilon < 1.0) {
        return Err(Error::argument(format!(
            "invalid search parameters: resolution {}, epsilon {}",
            search.resolution, search.epsilon
        )));
    }
    let p_wf = curve.power_at_zero();
    let eval = |p_m: f64| -> Result<(f64, f64, f64)> {
        if p_m < p_wf * (1.0 - 1e-12) {
            // Not enough even on a quiet frame.
            return Ok((1.0, (p_bar / p_m).min(1.0), if j_bar > 0.0 { 1.0 } else { 0.0 }));
        }
        let p_t = (p_bar / p_m).min(1.0);
        let p_j = if j_bar == 0.0 {
            0.0
        } else {
            let jam_req = curve.jam_at(p_m)?;
            if jam_req <= 0.0 {
                1.0
            } else {
                (j_bar / (p_t * jam_req)).min(1.0)
            }
        };
        Ok(((1.0 - p_t) + p_t * p_j, p_t, p_j))
    };

    // Grow the search range until playing higher is clearly pointless.
    let lo = p_bar.min(p_wf);
    let mut hi = 2.0 * p_bar.max(p_wf);
    for _ in 0..64 {
        if eval(hi)?.0 > 1.0 - search.epsilon {
            break;
        }
        hi *= 2.0;
    }

    // Geometric grid plus the structural kinks of the objective.
    let ratio = (hi / lo).powf(1.0 / (search.resolution - 1) as f64);
    let mut candidates: Vec<f64> = (0..search.resolution)
        .map(|i| lo * ratio.powi(i as i32))
        .collect();
    for anchor in [p_wf, p_bar] {
        if (lo..=hi).contains(&anchor) {
            candidates.push(anchor);
        }
    }
    candidates.sort_by(|x, y| x.total_cmp(y));
    candidates.dedup();

    let mut best: Option<(f64, f64, f64, f64)> = None;
    for p_m in candidates {
        let (p_out, p_t, p_j) = eval(p_m)?;
        if best.map_or(true, |(b, ..)| p_out < b) {
            best = Some((p_out, p_m, p_t, p_j));
        }
    }
    let (p_out, chosen, p_t, p_j) =
        best.ok_or_else(|| Error::Resolution("empty minimax search grid".into()))?;
    Ok(OutageReport {
        regime: Regime::Minimax,
        p_out,
        p_t,
        p_j,
        chosen_p_m: Some(chosen),
    })
}

/// Jammer spreads its budget flat over all frames without listening, raising
/// the noise floor to `sigma2 + J`; the transmitter water-fills against it
/// frame by frame.
pub fn nonintelligent_outage(
    model: &FadingModel,
    rate: f64,
    sigma2: f64,
    p_bar: f64,
    j_bar: f64,
) -> Result<OutageReport> {
    validate_budgets(p_bar, j_bar)?;
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::argument(format!("noise power must be positive, got {sigma2}")));
    }
    let (_, required) = waterfill_power(model, sigma2 + j_bar, rate)?;
    let p_t = if required > 0.0 { (p_bar / required).min(1.0) } else { 1.0 };
    Ok(OutageReport {
        regime: Regime::Nonintelligent,
        p_out: 1.0 - p_t,
        p_t,
        p_j: if j_bar > 0.0 { 1.0 } else { 0.0 },
        chosen_p_m: None,
    })
}
