//! Fading-gain distributions and expectations over them.
//!
//! A [`FadingModel`] is the single object the solvers consume: it knows how to
//! take expectations of arbitrary functions of the gain, answer quantile
//! queries, and discretise itself onto a uniform grid. Continuous laws are
//! integrated by adaptive quadrature on `[0, H_max]` where `H_max` is the
//! truncation quantile of the law; discrete laws use exact sums.

use crate::numeric;
use crate::{Error, Result};

/// Law of the fading gain.
#[derive(Debug, Clone, PartialEq)]
pub enum GainLaw {
    /// Exponential with the given *rate* (mean `1/rate`).
    Exponential { rate: f64 },
    /// All mass at a single gain (a non-fading channel).
    PointMass { gain: f64 },
    /// Probability masses on the uniform grid `0, step, 2·step, ...`.
    Tabulated { step: f64, masses: Vec<f64> },
}

/// Controls for the adaptive quadrature behind [`FadingModel::expectation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance; must lie in `(0, 1e-3]`.
    pub rel_tol: f64,
    /// Maximum subdivision depth per panel.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-11, max_depth: 48 }
    }
}

/// A fading-gain distribution plus the numeric policy used to integrate
/// against it.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingModel {
    law: GainLaw,
    truncation_quantile: f64,
    quad: QuadratureSpec,
}

impl FadingModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::argument(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(FadingModel::new(GainLaw::Exponential { rate }))
    }

    pub fn point_mass(gain: f64) -> Result<Self> {
        if !gain.is_finite() || gain <= 0.0 {
            return Err(Error::argument(format!("point-mass gain must be positive, got {gain}")));
        }
        Ok(FadingModel::new(GainLaw::PointMass { gain }))
    }

    /// Masses are normalised to total 1; they must be non-negative, finite,
    /// and have a positive sum.
    pub fn tabulated(step: f64, masses: Vec<f64>) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::argument(format!("grid step must be positive, got {step}")));
        }
        if masses.is_empty() {
            return Err(Error::argument("tabulated law needs at least one mass"));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::argument("masses must be finite and non-negative"));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::argument("masses must not all be zero"));
        }
        let masses = masses.into_iter().map(|m| m / total).collect();
        Ok(FadingModel::new(GainLaw::Tabulated { step, masses }))
    }

    fn new(law: GainLaw) -> Self {
        FadingModel {
            law,
            truncation_quantile: 1.0 - 1e-12,
            quad: QuadratureSpec::default(),
        }
    }

    /// Replace the tail-truncation quantile (continuous laws only care).
    pub fn with_truncation_quantile(mut self, q: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&q) {
            return Err(Error::argument(format!("truncation quantile must be in [0.5, 1), got {q}")));
        }
        self.truncation_quantile = q;
        Ok(self)
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Result<Self> {
        if !(quad.rel_tol > 0.0 && quad.rel_tol <= 1e-3) {
            return Err(Error::argument(format!(
                "quadrature tolerance must be in (0, 1e-3], got {}",
                quad.rel_tol
            )));
        }
        if quad.max_depth < 4 {
            return Err(Error::argument("quadrature depth must be at least 4"));
        }
        self.quad = quad;
        Ok(self)
    }

    pub fn law(&self) -> &GainLaw {
        &self.law
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.quad
    }

    /// Grid step and masses when the law is tabulated.
    pub fn tabulated_parts(&self) -> Option<(f64, &[f64])> {
        match &self.law {
            GainLaw::Tabulated { step, masses } => Some((*step, masses)),
            _ => None,
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self.law, GainLaw::Exponential { .. })
    }

    /// `P(h <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.law {
            GainLaw::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            GainLaw::PointMass { gain } => {
                if x >= *gain {
                    1.0
                } else {
                    0.0
                }
            }
            GainLaw::Tabulated { step, masses } => {
                let mut acc = 0.0;
                for (k, m) in masses.iter().enumerate() {
                    if k as f64 * step <= x {
                        acc += m;
                    } else {
                        break;
                    }
                }
                acc.min(1.0)
            }
        }
    }

    /// `P(h < x)` — needed to carve half-open bins out of laws with atoms.
    fn cdf_left(&self, x: f64) -> f64 {
        match &self.law {
            GainLaw::Exponential { .. } => self.cdf(x),
            GainLaw::PointMass { gain } => {
                if x > *gain {
                    1.0
                } else {
                    0.0
                }
            }
            GainLaw::Tabulated { step, masses } => {
                let mut acc = 0.0;
                for (k, m) in masses.iter().enumerate() {
                    if (k as f64) * step < x {
                        acc += m;
                    } else {
                        break;
                    }
                }
                acc.min(1.0)
            }
        }
    }

    /// Smallest `h >= 0` with `CDF(h) >= u`; `u` must lie in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::argument(format!("quantile argument must be in [0, 1), got {u}")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(match &self.law {
            GainLaw::Exponential { rate } => -(-u).ln_1p() / rate,
            GainLaw::PointMass { gain } => *gain,
            GainLaw::Tabulated { step, masses } => {
                let mut acc = 0.0;
                let mut last = 0.0;
                for (k, m) in masses.iter().enumerate() {
                    acc += m;
                    last = k as f64 * step;
                    if acc >= u {
                        return Ok(last);
                    }
                }
                last
            }
        })
    }

    /// Upper end of the (possibly truncated) support actually used by the
    /// numerics.
    pub fn support_max(&self) -> f64 {
        match &self.law {
            GainLaw::Exponential { rate } => -(-self.truncation_quantile).ln_1p() / rate,
            GainLaw::PointMass { gain } => *gain,
            GainLaw::Tabulated { step, masses } => step * (masses.len() - 1) as f64,
        }
    }

    /// `E[f(h); lo <= h <= hi]`. `hi` may be `f64::INFINITY`, which means the
    /// truncated support end for continuous laws. The integrand must be
    /// finite wherever the law puts mass.
    pub fn expectation(&self, f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::argument(format!("bad expectation interval [{lo}, {hi}]")));
        }
        let lo = lo.max(0.0);
        match &self.law {
            GainLaw::Exponential { rate } => {
                let rate = *rate;
                let hi = hi.min(self.support_max());
                if hi <= lo {
                    return Ok(0.0);
                }
                let g = move |h: f64| f(h) * rate * (-rate * h).exp();
                numeric::integrate(&g, lo, hi, self.quad.rel_tol, self.quad.max_depth)
            }
            GainLaw::PointMass { gain } => {
                if *gain < lo || *gain > hi {
                    return Ok(0.0);
                }
                let v = f(*gain);
                if !v.is_finite() {
                    return Err(Error::Integration(format!("integrand non-finite at h = {gain:e}")));
                }
                Ok(v)
            }
            GainLaw::Tabulated { step, masses } => {
                let mut acc = 0.0;
                for (k, m) in masses.iter().enumerate() {
                    if *m == 0.0 {
                        continue;
                    }
                    let h = k as f64 * step;
                    if h < lo || h > hi {
                        continue;
                    }
                    let v = f(h);
                    if !v.is_finite() {
                        return Err(Error::Integration(format!("integrand non-finite at h = {h:e}")));
                    }
                    acc += v * m;
                }
                Ok(acc)
            }
        }
    }

    /// `E[f(h)]` over the whole support.
    pub fn expectation_full(&self, f: &dyn Fn(f64) -> f64) -> Result<f64> {
        self.expectation(f, 0.0, f64::INFINITY)
    }

    /// Bin this law onto the grid `0, q, ..., h_max`: the mass at `k·q` is
    /// `P(k·q <= h < (k+1)·q)`, and everything at or beyond `h_max` is folded
    /// into the final grid point. `h_max` must be an integer multiple of `q`.
    pub fn discretize(&self, q: f64, h_max: f64) -> Result<FadingModel> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::argument(format!("grid step must be positive, got {q}")));
        }
        if !h_max.is_finite() || h_max <= 0.0 {
            return Err(Error::argument(format!("grid end must be positive, got {h_max}")));
        }
        let bins = h_max / q;
        let k = bins.round();
        if (bins - k).abs() > 1e-6 {
            return Err(Error::argument(format!(
                "grid end {h_max} is not an integer multiple of step {q}"
            )));
        }
        let k = k as usize;
        let mut masses = Vec::with_capacity(k + 1);
        for i in 0..k {
            let a = i as f64 * q;
            let b = (i + 1) as f64 * q;
            masses.push((self.cdf_left(b) - self.cdf_left(a)).max(0.0));
        }
        masses.push((1.0 - self.cdf_left(h_max)).max(0.0));
        let mut out = FadingModel::tabulated(q, masses)?;
        out.quad = self.quad;
        out.truncation_quantile = self.truncation_quantile;
        Ok(out)
    }

    /// Serialise a tabulated law as `h,mass` CSV rows.
    pub fn to_csv(&self) -> Result<String> {
        let (step, masses) = self
            .tabulated_parts()
            .ok_or_else(|| Error::argument("only tabulated laws serialise to CSV"))?;
        let mut out = String::from("h,mass\n");
        for (k, m) in masses.iter().enumerate() {
            out.push_str(&format!("{:.16e},{:.16e}\n", k as f64 * step, m));
        }
        Ok(out)
    }

    /// Parse a tabulated law from `h,mass` CSV (inverse of [`Self::to_csv`]).
    /// The gain column must be a uniform grid starting at 0.
    pub fn from_csv(text: &str) -> Result<FadingModel> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if rows.is_empty() && line.replace(' ', "") == "h,mass" {
                continue;
            }
            let mut parts = line.split(',');
            let h: f64 = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing gain", i + 1)))?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: bad gain: {e}", i + 1)))?;
            let m: f64 = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing mass", i + 1)))?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: bad mass: {e}", i + 1)))?;
            if parts.next().is_some() {
                return Err(Error::Parse(format!("line {}: expected two columns", i + 1)));
            }
            rows.push((h, m));
        }
        if rows.len() < 2 {
            return Err(Error::Parse("need at least two grid rows".into()));
        }
        let step = rows[1].0 - rows[0].0;
        if step <= 0.0 {
            return Err(Error::Parse("gain column must be strictly increasing".into()));
        }
        if rows[0].0.abs() > 1e-9 * step {
            return Err(Error::Parse("gain grid must start at 0".into()));
        }
        for (k, (h, _)) in rows.iter().enumerate() {
            if (h - k as f64 * step).abs() > 1e-9 * step.max(1.0) {
                return Err(Error::Parse(format!("gain grid not uniform at row {}", k + 1)));
            }
        }
        FadingModel::tabulated(step, rows.into_iter().map(|(_, m)| m).collect())
    }

    /// Short human/header description of the law.
    pub fn describe(&self) -> String {
        match &self.law {
            GainLaw::Exponential { rate } => format!("exponential(rate={rate})"),
            GainLaw::PointMass { gain } => format!("point(gain={gain})"),
            GainLaw::Tabulated { step, masses } => {
                format!("tabulated(step={step},bins={})", masses.len())
            }
        }
    }
}
