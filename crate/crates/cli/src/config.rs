//! Flat key-value experiment configuration.
//!
//! Precedence, lowest to highest: built-in defaults, `--config` file,
//! repeated `--set KEY=VALUE` flags, then the dedicated flags
//! (`--seed`, `--samples`, `--resolution`). Every artifact embeds the
//! canonical form of the resolved config and its FNV-1a hash so a run can be
//! reproduced from the file header alone.

use jamgame::channel::FadingModel;
use jamgame::numeric::fnv1a64;
use jamgame::pure_strategies::Regime;

/// Resolved experiment parameters.
#[derive(Debug, Clone)]
pub struct Config {
    /// Target rate in nats per channel use.
    pub rate: f64,
    /// Receiver noise power.
    pub sigma2: f64,
    /// Channel spec: `exponential:RATE`, `point:GAIN`, or `table:PATH`.
    pub channel: String,
    /// Average transmit-power budget.
    pub p_bar: f64,
    /// Average jamming-power budget.
    pub j_bar: f64,
    /// Sweep range (transmit budget for outage-sweep/compare-csi, rate for
    /// rate-sweep).
    pub sweep_lo: f64,
    pub sweep_hi: f64,
    pub sweep_points: usize,
    /// Regimes included in sweeps, in output order.
    pub regimes: Vec<Regime>,
    /// Regime simulated by `simulate`.
    pub regime: Regime,
    /// Samples of the required-power curve (including the zero endpoint).
    pub curve_points: usize,
    /// Largest jamming power the curve is sampled at; queries beyond it
    /// follow the final secant.
    pub curve_max_jam: f64,
    /// Consistency tolerance for the mixed-equilibrium cross-checks.
    pub tol: f64,
    /// Minimax search grid size.
    pub resolution: usize,
    /// Minimax search stopping margin.
    pub epsilon: f64,
    pub seed: u64,
    pub samples: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            rate: 2.0,
            sigma2: 10.0,
            channel: "exponential:1/6".into(),
            p_bar: 30.0,
            j_bar: 10.0,
            sweep_lo: 5.0,
            sweep_hi: 60.0,
            sweep_points: 12,
            regimes: vec![
                Regime::Peak,
                Regime::Maximin,
                Regime::Minimax,
                Regime::Nonintelligent,
                Regime::Mixed,
            ],
            regime: Regime::Mixed,
            curve_points: 48,
            curve_max_jam: 60.0,
            tol: 1e-8,
            resolution: 2000,
            epsilon: 1e-3,
            seed: 424242,
            samples: 1_000_000,
        }
    }
}

/// Parse a float, accepting a single `a/b` fraction so rates like `1/6` stay
/// exact in config files.
fn parse_number(raw: &str) -> Result<f64, String> {
    let raw = raw.trim();
    if let Some((num, den)) = raw.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|e| format!("{e}"))?;
        let d: f64 = den.trim().parse().map_err(|e| format!("{e}"))?;
        if d == 0.0 {
            return Err("fraction has zero denominator".into());
        }
        return Ok(n / d);
    }
    raw.parse().map_err(|e| format!("{e}"))
}

fn parse_regime(raw: &str) -> Result<Regime, String> {
    match raw.trim() {
        "peak" => Ok(Regime::Peak),
        "maximin" => Ok(Regime::Maximin),
        "minimax" => Ok(Regime::Minimax),
        "nonintelligent" => Ok(Regime::Nonintelligent),
        "mixed" => Ok(Regime::Mixed),
        other => Err(format!(
            "unknown regime '{other}' (expected peak, maximin, minimax, nonintelligent or mixed)"
        )),
    }
}

impl Config {
    /// Apply one `key = value` assignment. Errors are `"key: message"`.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), String> {
        let key = key.trim();
        let raw = raw.trim();
        let tag = |e: String| format!("{key}: {e}");
        match key {
            "rate" => self.rate = parse_number(raw).map_err(tag)?,
            "sigma2" => self.sigma2 = parse_number(raw).map_err(tag)?,
            "channel" => self.channel = raw.to_string(),
            "p_bar" => self.p_bar = parse_number(raw).map_err(tag)?,
            "j_bar" => self.j_bar = parse_number(raw).map_err(tag)?,
            "sweep_lo" => self.sweep_lo = parse_number(raw).map_err(tag)?,
            "sweep_hi" => self.sweep_hi = parse_number(raw).map_err(tag)?,
            "sweep_points" => self.sweep_points = raw.parse().map_err(|e| tag(format!("{e}")))?,
            "regimes" => {
                let mut parsed = Vec::new();
                for part in raw.split(',') {
                    parsed.push(parse_regime(part).map_err(tag)?);
                }
                if parsed.is_empty() {
                    return Err(tag("empty regime list".into()));
                }
                self.regimes = parsed;
            }
            "regime" => self.regime = parse_regime(raw).map_err(tag)?,
            "curve_points" => self.curve_points = raw.parse().map_err(|e| tag(format!("{e}")))?,
            "curve_max_jam" => self.curve_max_jam = parse_number(raw).map_err(tag)?,
            "tol" => self.tol = parse_number(raw).map_err(tag)?,
            "resolution" => self.resolution = raw.parse().map_err(|e| tag(format!("{e}")))?,
            "epsilon" => self.epsilon = parse_number(raw).map_err(tag)?,
            "seed" => self.seed = raw.parse().map_err(|e| tag(format!("{e}")))?,
            "samples" => self.samples = raw.parse().map_err(|e| tag(format!("{e}")))?,
            _ => return Err(format!("{key}: unknown key")),
        }
        Ok(())
    }

    /// Apply a config file body; malformed lines and bad values are collected
    /// into `errors` rather than aborting at the first one.
    pub fn apply_file(&mut self, text: &str, errors: &mut Vec<String>) {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once('=') {
                Some((key, value)) => {
                    if let Err(e) = self.set(key, value) {
                        errors.push(format!("line {}: {e}", i + 1));
                    }
                }
                None => errors.push(format!("line {}: expected `key = value`, got `{line}`", i + 1)),
            }
        }
    }

    /// Apply repeated `--set KEY=VALUE` flags, collecting errors.
    pub fn apply_overrides(&mut self, sets: &[String], errors: &mut Vec<String>) {
        for entry in sets {
            match entry.split_once('=') {
                Some((key, value)) => {
                    if let Err(e) = self.set(key, value) {
                        errors.push(e);
                    }
                }
                None => errors.push(format!("--set {entry}: expected KEY=VALUE")),
            }
        }
    }

    /// Build the fading model named by the channel spec.
    pub fn fading_model(&self) -> Result<FadingModel, String> {
        let spec = self.channel.trim();
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| "expected KIND:ARG, e.g. exponential:1/6 or point:1".to_string())?;
        match kind.trim() {
            "exponential" => {
                let rate = parse_number(arg)?;
                FadingModel::exponential(rate).map_err(|e| e.to_string())
            }
            "point" => {
                let gain = parse_number(arg)?;
                FadingModel::point_mass(gain).map_err(|e| e.to_string())
            }
            "table" => {
                let text = std::fs::read_to_string(arg.trim())
                    .map_err(|e| format!("cannot read {}: {e}", arg.trim()))?;
                FadingModel::from_csv(&text).map_err(|e| e.to_string())
            }
            other => Err(format!("unknown channel kind '{other}'")),
        }
    }

    /// Check every field, returning the built fading model on success and the
    /// full list of offending fields otherwise.
    pub fn validate(&self) -> Result<FadingModel, Vec<String>> {
        let mut errors = Vec::new();
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rate) {
            errors.push(format!("rate: must be positive and finite, got {}", self.rate));
        }
        if !positive(self.sigma2) {
            errors.push(format!("sigma2: must be positive and finite, got {}", self.sigma2));
        }
        if !positive(self.p_bar) {
            errors.push(format!("p_bar: must be positive and finite, got {}", self.p_bar));
        }
        if !(self.j_bar.is_finite() && self.j_bar >= 0.0) {
            errors.push(format!("j_bar: must be non-negative and finite, got {}", self.j_bar));
        }
        if !positive(self.sweep_lo) {
            errors.push(format!("sweep_lo: must be positive and finite, got {}", self.sweep_lo));
        }
        if !self.sweep_hi.is_finite() {
            errors.push(format!("sweep_hi: must be finite, got {}", self.sweep_hi));
        }
        if self.sweep_points == 0 {
            errors.push("sweep_points: must be at least 1".into());
        } else if self.sweep_points == 1 {
            if self.sweep_hi < self.sweep_lo {
                errors.push(format!(
                    "sweep_hi: must be at least sweep_lo, got {} < {}",
                    self.sweep_hi, self.sweep_lo
                ));
            }
        } else if !(self.sweep_hi > self.sweep_lo) {
            errors.push(format!(
                "sweep_hi: must exceed sweep_lo for a multi-point sweep, got {} vs {}",
                self.sweep_hi, self.sweep_lo
            ));
        }
        if self.curve_points < 2 {
            errors.push(format!("curve_points: must be at least 2, got {}", self.curve_points));
        }
        if !positive(self.curve_max_jam) {
            errors.push(format!(
                "curve_max_jam: must be positive and finite, got {}",
                self.curve_max_jam
            ));
        }
        if !positive(self.tol) {
            errors.push(format!("tol: must be positive and finite, got {}", self.tol));
        }
        if self.resolution < 2 {
            errors.push(format!("resolution: must be at least 2, got {}", self.resolution));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            errors.push(format!("epsilon: must lie in (0, 1), got {}", self.epsilon));
        }
        if self.samples == 0 {
            errors.push("samples: must be at least 1".into());
        }
        let model = match self.fading_model() {
            Ok(m) => Some(m),
            Err(e) => {
                errors.push(format!("channel: {e}"));
                None
            }
        };
        match (model, errors.is_empty()) {
            (Some(m), true) => Ok(m),
            _ => Err(errors),
        }
    }

    /// Canonical `key=value` lines, sorted by key; the hashing and echo base.
    pub fn canonical(&self) -> String {
        let regimes: Vec<&str> = self.regimes.iter().map(|r| r.as_str()).collect();
        let pairs = [
            ("channel", self.channel.clone()),
            ("curve_max_jam", format!("{}", self.curve_max_jam)),
            ("curve_points", format!("{}", self.curve_points)),
            ("epsilon", format!("{}", self.epsilon)),
            ("j_bar", format!("{}", self.j_bar)),
            ("p_bar", format!("{}", self.p_bar)),
            ("rate", format!("{}", self.rate)),
            ("regime", self.regime.as_str().to_string()),
            ("regimes", regimes.join(",")),
            ("resolution", format!("{}", self.resolution)),
            ("samples", format!("{}", self.samples)),
            ("seed", format!("{}", self.seed)),
            ("sigma2", format!("{}", self.sigma2)),
            ("sweep_hi", format!("{}", self.sweep_hi)),
            ("sweep_lo", format!("{}", self.sweep_lo)),
            ("sweep_points", format!("{}", self.sweep_points)),
            ("tol", format!("{}", self.tol)),
        ];
        pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join("\n")
    }

    pub fn hash(&self) -> u64 {
        fnv1a64(self.canonical().as_bytes())
    }

    /// Header comment block stamped onto CSV artifacts.
    pub fn header(&self, artifact: &str) -> String {
        format!(
            "# jamgame {artifact} v1\n# config_hash: {:016x}\n# config: {}\n\
             # tolerances: residual_tol={:e} consistency_tol={:e} minimax_epsilon={:e}\n",
            self.hash(),
            self.canonical().replace('\n', "; "),
            jamgame::frame_solver::RESIDUAL_TOL,
            self.tol,
            self.epsilon,
        )
    }

    /// Shared metadata object embedded in JSON artifacts.
    pub fn json_meta(&self, artifact: &str) -> serde_json::Value {
        let mut config = serde_json::Map::new();
        for line in self.canonical().lines() {
            let (k, v) = line.split_once('=').expect("canonical lines are key=value");
            config.insert(k.to_string(), serde_json::Value::String(v.to_string()));
        }
        serde_json::json!({
            "artifact": artifact,
            "version": 1,
            "config_hash": format!("{:016x}", self.hash()),
            "config": config,
            "tolerances": {
                "residual_tol": jamgame::frame_solver::RESIDUAL_TOL,
                "consistency_tol": self.tol,
                "minimax_epsilon": self.epsilon,
            },
        })
    }
}
