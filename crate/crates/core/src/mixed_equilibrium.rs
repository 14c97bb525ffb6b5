//! Mixed-strategy equilibria for the inter-frame power game.
//!
//! The underlying abstraction is a two-player zero-sum game on the
//! non-negative reals: Player 1 picks a random `X` with `E[X] <= a`, Player 2
//! a random `Y` with `E[Y] <= b`, and the payoff (to Player 1) is
//! `Pr{X >= g(Y)}` for a monotone increasing curve `g` with `g(0) = 0`.
//! Specialised to frame powers, `X` is the transmitter's per-frame power,
//! `Y` the jammer's, and `g` the required-power curve — a frame survives
//! exactly when the transmitter spends at least the requirement for the
//! jamming it actually receives.
//!
//! [`solve_general_game`] computes the unique equilibrium by the pivot /
//! branch procedure; [`hughes_narayan_closed_form`] and
//! [`nocsi_closed_form`] are independent closed forms for affine curves used
//! to cross-check it; [`fullcsi_equilibrium`] runs the solver on a sampled
//! required-power curve and packages the optimal strategies for sampling.

use crate::frame_solver::PowerCurve;
use crate::montecarlo::SplitMix64;
use crate::numeric::{self, Bisection};
use crate::{Error, Result};

/// Default residual tolerance for the internal consistency checks.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// The curve `g` of the abstract game: monotone increasing on `(0, ∞)` with
/// `g(0) = 0` and an allowed jump at the origin up to `g(0⁺)`.
///
/// The inverse uses the matching conventions: `g⁻¹(x) = 0` across the jump
/// (for `x <= g(0⁺)`) and the ordinary inverse elsewhere.
#[derive(Debug, Clone)]
pub enum MonotoneCurve {
    /// `g(y) = slope·y + intercept` for `y > 0`; the intercept is the jump.
    Affine { slope: f64, intercept: f64 },
    /// Piecewise-linear curve sampled on the jamming axis; the jump at 0 is
    /// the curve's value at zero jamming.
    Sampled(PowerCurve),
}

impl MonotoneCurve {
    pub fn affine(slope: f64, intercept: f64) -> Result<Self> {
        if !(slope.is_finite() && slope > 0.0) {
            return Err(Error::argument(format!("curve slope must be positive, got {slope}")));
        }
        if !(intercept.is_finite() && intercept >= 0.0) {
            return Err(Error::argument(format!(
                "curve intercept must be non-negative, got {intercept}"
            )));
        }
        Ok(MonotoneCurve::Affine { slope, intercept })
    }

    /// The identity map `g(y) = y`.
    pub fn identity() -> Self {
        MonotoneCurve::Affine { slope: 1.0, intercept: 0.0 }
    }

    pub fn sampled(curve: PowerCurve) -> Self {
        MonotoneCurve::Sampled(curve)
    }

    /// Right-limit `g(0⁺)`, i.e. the height of the jump at the origin.
    pub fn jump_at_zero(&self) -> f64 {
        match self {
            MonotoneCurve::Affine { intercept, .. } => *intercept,
            MonotoneCurve::Sampled(c) => c.power_at_zero(),
        }
    }

    /// Whether queries beyond the sampled data are answerable.
    pub fn unbounded(&self) -> bool {
        match self {
            MonotoneCurve::Affine { .. } => true,
            MonotoneCurve::Sampled(c) => c.extension_enabled(),
        }
    }

    /// `g(y)`; zero at and below the origin.
    pub fn forward(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::argument(format!("curve argument must be finite, got {y}")));
        }
        if y <= 0.0 {
            return Ok(0.0);
        }
        match self {
            MonotoneCurve::Affine { slope, intercept } => Ok(slope * y + intercept),
            MonotoneCurve::Sampled(c) => c.power_at(y),
        }
    }

    /// `g⁻¹(x)`: zero across the jump, ordinary inverse above it.
    pub fn inverse(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::argument(format!("curve argument must be finite, got {x}")));
        }
        if x <= self.jump_at_zero() {
            return Ok(0.0);
        }
        match self {
            MonotoneCurve::Affine { slope, intercept } => Ok((x - intercept) / slope),
            MonotoneCurve::Sampled(c) => c.jam_at(x),
        }
    }

    /// `∫₀ᵗ g(y) dy` (the jump at the origin has measure zero).
    pub fn integral_forward(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::argument(format!("integral bound must be non-negative, got {t}")));
        }
        match self {
            MonotoneCurve::Affine { slope, intercept } => {
                Ok(0.5 * slope * t * t + intercept * t)
            }
            MonotoneCurve::Sampled(c) => c.integral_power(t),
        }
    }

    /// `∫₀ˣ g⁻¹(u) du`, computed from the inverse directly (exactly for the
    /// piecewise-linear case) so it can cross-check the complement identity
    /// against [`Self::integral_forward`].
    pub fn integral_inverse(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::argument(format!("integral bound must be non-negative, got {x}")));
        }
        let jump = self.jump_at_zero();
        if x <= jump {
            return Ok(0.0);
        }
        match self {
            MonotoneCurve::Affine { slope, .. } => Ok(0.5 * (x - jump) * (x - jump) / slope),
            MonotoneCurve::Sampled(c) => {
                // Trapezoids between the inverse's knots (the power samples),
                // which is exact because the inverse is piecewise linear.
                let mut acc = 0.0;
                let mut prev = (jump, 0.0);
                for (j, p) in c.samples().skip(1) {
                    if p >= x {
                        break;
                    }
                    acc += 0.5 * (prev.1 + j) * (p - prev.0);
                    prev = (p, j);
                }
                let y_end = self.inverse(x)?;
                acc += 0.5 * (prev.1 + y_end) * (x - prev.0);
                Ok(acc)
            }
        }
    }

    /// Stable fingerprint of the curve, stamped into equilibrium records.
    pub fn digest(&self) -> u64 {
        match self {
            MonotoneCurve::Affine { slope, intercept } => numeric::fnv1a64(
                format!("affine slope={slope:.16e} intercept={intercept:.16e}").as_bytes(),
            ),
            MonotoneCurve::Sampled(c) => numeric::fnv1a64(c.to_csv().as_bytes()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            MonotoneCurve::Affine { slope, intercept } => {
                format!("affine(slope={slope},intercept={intercept})")
            }
            MonotoneCurve::Sampled(c) => format!(
                "sampled(points={},max_jam={})",
                c.samples().count(),
                c.max_jam()
            ),
        }
    }
}

/// Which bisection branch produced the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Pivot discriminant negative: Player 1 mixes with full mass.
    SNegative,
    /// Pivot discriminant zero: both players mix with full mass.
    SZero,
    /// Pivot discriminant positive: Player 2 mixes with full mass.
    SPositive,
    /// Degenerate game bypass (zero Player-2 budget).
    Degenerate,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::SNegative => "S_negative",
            Branch::SZero => "S_zero",
            Branch::SPositive => "S_positive",
            Branch::Degenerate => "degenerate",
        }
    }
}

/// Equilibrium of the abstract game.
///
/// Player 1's optimal `X` equals `g(Y')` for `Y' ~ k_x·U[0,2v] + (1−k_x)·δ₀`
/// (the uniform's bottom edge maps onto the jump `g(0⁺)`, the atom onto
/// zero), Player 2's optimal `Y` equals `g⁻¹(X')` for
/// `X' ~ k_y·U[0,g(2v)] + (1−k_y)·δ₀`. `payoff` is the game value
/// `Pr{X ≥ g(Y)}`, which both players' security levels equal at the saddle
/// point; sampling reproduces it when zero-power frames count as losses for
/// Player 1 (simulating instead with the literal `g(0) = 0` indicator comes
/// out higher by the product of the two zero atoms).
#[derive(Debug, Clone)]
pub struct MixedEquilibrium {
    pub v: f64,
    pub k_x: f64,
    pub k_y: f64,
    /// Game value `Pr{X ≥ g(Y)}`.
    pub payoff: f64,
    pub branch: Branch,
    /// Pivot point of the branch decision.
    pub v0: f64,
    /// Branch discriminant `S(v0) = ∫₀^{2v0} g − 2v0·a`.
    pub s_v0: f64,
    /// Player-1 budget the equilibrium was solved for.
    pub a: f64,
    /// Player-2 budget the equilibrium was solved for.
    pub b: f64,
    /// `g(2v)`, the top of Player 1's support.
    pub x_bound: f64,
}

impl MixedEquilibrium {
    /// Outage probability at the equilibrium, `1 − payoff`.
    pub fn outage(&self) -> f64 {
        1.0 - self.payoff
    }

    /// Payoff Player 1 can guarantee against any budget-respecting opponent:
    /// `k_x(1 − b/2v)`.
    pub fn security_level_p1(&self) -> f64 {
        if self.branch == Branch::Degenerate || self.v == 0.0 {
            return self.payoff;
        }
        self.k_x * (1.0 - self.b / (2.0 * self.v))
    }

    /// Payoff Player 2 can force the game below against any budget-respecting
    /// opponent: `1 − k_y(1 − a/g(2v))`.
    pub fn security_level_p2(&self) -> f64 {
        if self.branch == Branch::Degenerate || self.x_bound == 0.0 {
            return self.payoff;
        }
        1.0 - self.k_y * (1.0 - self.a / self.x_bound)
    }

    /// Residuals of the three equilibrium equations (saddle balance and the
    /// two budget-equality conditions), in that order.
    pub fn residuals(&self, g: &MonotoneCurve) -> Result<[f64; 3]> {
        if self.branch == Branch::Degenerate {
            return Err(Error::argument("degenerate equilibrium has no residual system"));
        }
        let int_g = g.integral_forward(2.0 * self.v)?;
        let int_ginv = g.integral_inverse(self.x_bound)?;
        let balance = self.security_level_p1() - self.security_level_p2();
        let budget_x = self.k_x - 2.0 * self.v * self.a / int_g;
        let budget_y = self.k_y - self.x_bound * self.b / int_ginv;
        Ok([balance, budget_x, budget_y])
    }

    pub fn record(&self, curve_digest: u64) -> EquilibriumRecord {
        EquilibriumRecord {
            v: self.v,
            k_x: self.k_x,
            k_y: self.k_y,
            payoff: self.payoff,
            branch: self.branch.as_str(),
            v0: self.v0,
            s_v0: self.s_v0,
            curve_digest: format!("{curve_digest:016x}"),
        }
    }
}

/// JSON-serialisable equilibrium summary.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EquilibriumRecord {
    pub v: f64,
    pub k_x: f64,
    pub k_y: f64,
    pub payoff: f64,
    pub branch: &'static str,
    pub v0: f64,
    #[serde(rename = "S_v0")]
    pub s_v0: f64,
    pub curve_digest: String,
}

fn clamp_unit(value: f64, what: &str) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NoEquilibrium(format!("{what} is not finite: {value}")));
    }
    if value < -1e-9 || value > 1.0 + 1e-9 {
        return Err(Error::NoEquilibrium(format!("{what} = {value} outside [0, 1]")));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Solve the abstract game for budgets `(a, b)` on the curve `g`.
///
/// Implements the pivot procedure: locate `v0` on the strictly increasing
/// pivot map `(g(2v)−a)(2v−b) = ab`, classify by the sign of
/// `S(v0) = ∫₀^{2v0}g − 2v0·a`, then solve the selected branch residual for
/// `v` (increasing for the Player-1-saturated branch, decreasing for the
/// Player-2-saturated one). The two payoff expressions are cross-checked
/// against each other within `tol`, as is the area-complement identity
/// between the forward and inverse integrals.
///
/// Budgets with `a` at or below the jump `g(0⁺)` force the
/// Player-2-saturated branch (the discriminant is provably positive there),
/// so the branch decision is bypassed. `b = 0` is a degenerate game: Player 2
/// is pinned at zero and Player 1 simply covers the jump with probability
/// `min(1, a/g(0⁺))`, which is returned as the payoff.
pub fn solve_general_game(
    g: &MonotoneCurve,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<MixedEquilibrium> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::argument(format!("player-1 budget must be positive, got {a}")));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::argument(format!("player-2 budget must be non-negative, got {b}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::argument(format!("tolerance must be positive, got {tol}")));
    }
    let jump = g.jump_at_zero();
    if b == 0.0 {
        let k_x = if jump > 0.0 { (a / jump).min(1.0) } else { 1.0 };
        return Ok(MixedEquilibrium {
            v: 0.0,
            k_x,
            k_y: 1.0,
            payoff: k_x,
            branch: Branch::Degenerate,
            v0: 0.0,
            s_v0: 0.0,
            a,
            b,
            x_bound: jump,
        });
    }

    // Existence condition: the area under g up to b must be beatable by the
    // inverse's tail. Unbounded curves satisfy it automatically; a truncated
    // sampled curve is checked on its available range.
    if !g.unbounded() {
        let lhs = g.integral_forward(b)?;
        let x_end = g.forward(match g {
            MonotoneCurve::Sampled(c) => c.max_jam(),
            MonotoneCurve::Affine { .. } => unreachable!("affine curves are unbounded"),
        })?;
        let rhs = g.integral_inverse(x_end)? - g.integral_inverse(g.forward(b)?)?;
        if !(lhs < rhs) {
            return Err(Error::NoEquilibrium(format!(
                "existence condition not certifiable on the sampled range \
                 (∫₀^b g = {lhs:e} vs available inverse tail {rhs:e}); extend the curve"
            )));
        }
    }

    let v_floor = (0.5 * b).max(0.5 * g.inverse(a)?);

    // Step 1: the pivot v0. The map grows strictly from 0 at the floor.
    let pivot = |v: f64| -> Result<f64> {
        Ok((g.forward(2.0 * v)? - a) * (2.0 * v - b) - a * b)
    };
    let seed_hi = v_floor + 0.5 * (a + b) + 1.0;
    let (lo, hi) = numeric::grow_upward(
        &pivot,
        v_floor,
        seed_hi,
        4.0,
        1e12 * seed_hi,
        "equilibrium pivot",
    )?;
    let v0 = numeric::bisect(
        &pivot,
        lo,
        hi,
        Bisection::residual(1e-12 * (a * b).max(1.0)),
        "equilibrium pivot",
    )?
    .x;

    // Step 2: branch discriminant.
    let s_v0 = g.integral_forward(2.0 * v0)? - 2.0 * v0 * a;
    let s_scale = (2.0 * v0 * a).max(1e-12);

    // Budgets inside the jump make S(v0) > 0 automatically (g exceeds the
    // jump everywhere, so its average exceeds a); skip the sign decision to
    // keep the branch stable right at a = g(0⁺).
    let branch = if a <= jump {
        Branch::SPositive
    } else if s_v0.abs() <= 1e-9 * s_scale {
        Branch::SZero
    } else if s_v0 < 0.0 {
        Branch::SNegative
    } else {
        Branch::SPositive
    };

    // Steps 3–5: solve the branch residual for v, then fill in the masses.
    let (v, k_x, k_y) = match branch {
        Branch::SZero => (v0, 1.0, 1.0),
        Branch::SNegative => {
            // Player 1 saturates: ∫₀^{2v} g = 2v·a, increasing in v.
            let resid = |v: f64| -> Result<f64> { Ok(g.integral_forward(2.0 * v)? - 2.0 * v * a) };
            let (lo, hi) =
                numeric::grow_upward(&resid, v0, 2.0 * v0, 4.0, 1e12 * v0.max(1.0), "mixing width")?;
            let v = numeric::bisect(
                &resid,
                lo,
                hi,
                Bisection::residual(1e-12 * s_scale),
                "mixing width",
            )?
            .x;
            let g2v = g.forward(2.0 * v)?;
            let k_y = b * g2v / (2.0 * v * (g2v - a));
            (v, 1.0, clamp_unit(k_y, "player-2 mixing mass")?)
        }
        Branch::SPositive => {
            // Player 2 saturates: ∫₀^{2v} g = g(2v)(2v − b), decreasing in v.
            let resid = |v: f64| -> Result<f64> {
                Ok(g.integral_forward(2.0 * v)? - g.forward(2.0 * v)? * (2.0 * v - b))
            };
            let (lo, hi) =
                numeric::grow_upward(&resid, v0, 2.0 * v0, 4.0, 1e12 * v0.max(1.0), "mixing width")?;
            let v = numeric::bisect(
                &resid,
                lo,
                hi,
                Bisection::residual(1e-12 * s_scale),
                "mixing width",
            )?
            .x;
            let g2v = g.forward(2.0 * v)?;
            let k_x = 2.0 * v * a / (g2v * (2.0 * v - b));
            (v, clamp_unit(k_x, "player-1 mixing mass")?, 1.0)
        }
        Branch::Degenerate => unreachable!("degenerate handled above"),
    };

    let x_bound = g.forward(2.0 * v)?;
    let int_g = g.integral_forward(2.0 * v)?;
    let int_ginv = g.integral_inverse(x_bound)?;

    // Area-complement identity between the two integrals.
    let identity_gap = int_g - (2.0 * v * x_bound - int_ginv);
    if identity_gap.abs() > CONSISTENCY_TOL * int_g.max(1.0) {
        return Err(Error::Convergence {
            what: format!("forward/inverse integral identity violated by {identity_gap:e}"),
            residual: identity_gap,
            iterations: 0,
        });
    }

    // The two payoff expressions must agree.
    let payoff_left = a * (2.0 * v - b) / int_g;
    let payoff_right = 1.0 - b * (x_bound - a) / int_ginv;
    if (payoff_left - payoff_right).abs() > tol {
        return Err(Error::Convergence {
            what: format!(
                "payoff expressions disagree: {payoff_left:.12e} vs {payoff_right:.12e}"
            ),
            residual: payoff_left - payoff_right,
            iterations: 0,
        });
    }

    Ok(MixedEquilibrium {
        v,
        k_x,
        k_y,
        payoff: clamp_unit(0.5 * (payoff_left + payoff_right), "payoff")?,
        branch,
        v0,
        s_v0,
        a,
        b,
        x_bound,
    })
}

/// Closed-form equilibrium for the affine curve `g(y) = y + c` with the
/// forced jump at the origin (the historical special case of the game).
pub fn hughes_narayan_closed_form(a: f64, b: f64, c: f64) -> Result<MixedEquilibrium> {
    if !(a.is_finite() && a > 0.0) || !(b.is_finite() && b > 0.0) {
        return Err(Error::argument(format!("budgets must be positive, got a={a}, b={b}")));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::argument(format!("offset must be non-negative, got {c}")));
    }
    // Pivot and discriminant from the quadratic t² + (c−a−b)t − cb = 0
    // (t = 2v0), kept for the record and for branch cross-checks.
    let bq = c - a - b;
    let t = 0.5 * (-bq + (bq * bq + 4.0 * c * b).sqrt());
    let v0 = 0.5 * t;
    let s_v0 = t * (0.5 * t + c - a);

    let root = (1.0 + 2.0 * c / b).sqrt();
    let threshold = c + 0.5 * b * (1.0 + root);
    if a <= threshold {
        // Player-2-saturated branch.
        let v = 0.5 * b * (1.0 + root);
        let g2v = 2.0 * v + c;
        let k_x = clamp_unit(2.0 * v * a / (g2v * (2.0 * v - b)), "player-1 mixing mass")?;
        let branch = if (a - threshold).abs() <= 1e-12 * threshold.max(1.0) {
            Branch::SZero
        } else {
            Branch::SPositive
        };
        Ok(MixedEquilibrium {
            v,
            k_x,
            k_y: 1.0,
            payoff: a / g2v,
            branch,
            v0,
            s_v0,
            a,
            b,
            x_bound: g2v,
        })
    } else {
        // Player-1-saturated branch: v + c = a.
        let v = a - c;
        let g2v = 2.0 * v + c;
        let k_y = clamp_unit(b * g2v / (2.0 * v * (g2v - a)), "player-2 mixing mass")?;
        Ok(MixedEquilibrium {
            v,
            k_x: 1.0,
            k_y,
            payoff: 1.0 - b / (2.0 * v),
            branch: Branch::SNegative,
            v0,
            s_v0,
            a,
            b,
            x_bound: g2v,
        })
    }
}

/// Closed-form equilibrium of the no-feedback game on the affine
/// required-power line `P = mu_prime·(J + sigma2)`.
pub fn nocsi_closed_form(
    p_bar: f64,
    j_bar: f64,
    mu_prime: f64,
    sigma2: f64,
) -> Result<MixedEquilibrium> {
    if !(p_bar.is_finite() && p_bar > 0.0) || !(j_bar.is_finite() && j_bar > 0.0) {
        return Err(Error::argument(format!(
            "budgets must be positive, got P={p_bar}, J={j_bar}"
        )));
    }
    if !(mu_prime.is_finite() && mu_prime > 0.0) {
        return Err(Error::argument(format!("multiplier must be positive, got {mu_prime}")));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::argument(format!("noise power must be positive, got {sigma2}")));
    }
    // Pivot from mu'·t² + (mu'·sigma2 − P − mu'·J)t − mu'·sigma2·J = 0.
    let bq = mu_prime * sigma2 - p_bar - mu_prime * j_bar;
    let t = (-bq + (bq * bq + 4.0 * mu_prime * mu_prime * sigma2 * j_bar).sqrt())
        / (2.0 * mu_prime);
    let v0 = 0.5 * t;
    let s_v0 = t * (0.5 * mu_prime * t + mu_prime * sigma2 - p_bar);

    let root = (1.0 + 2.0 * sigma2 / j_bar).sqrt();
    let threshold = mu_prime * sigma2 + 0.5 * mu_prime * j_bar * (1.0 + root);
    if p_bar >= threshold {
        // Transmitter mixes with full mass.
        let v = (p_bar - mu_prime * sigma2) / mu_prime;
        let k_j = clamp_unit(
            mu_prime * j_bar * (2.0 * p_bar - mu_prime * sigma2)
                / (2.0 * (p_bar - mu_prime * sigma2) * (p_bar - mu_prime * sigma2)),
            "jammer mixing mass",
        )?;
        let branch = if (p_bar - threshold).abs() <= 1e-12 * threshold.max(1.0) {
            Branch::SZero
        } else {
            Branch::SNegative
        };
        Ok(MixedEquilibrium {
            v,
            k_x: 1.0,
            k_y: k_j,
            payoff: 1.0 - j_bar / (2.0 * v),
            branch,
            v0,
            s_v0,
            a: p_bar,
            b: j_bar,
            x_bound: mu_prime * (2.0 * v + sigma2),
        })
    } else {
        // Jammer mixes with full mass.
        let v = 0.5 * j_bar * (1.0 + root);
        let x_bound = mu_prime * (2.0 * v + sigma2);
        let k_p = clamp_unit(
            2.0 * v * p_bar / (mu_prime * (2.0 * v + sigma2) * (2.0 * v - j_bar)),
            "transmitter mixing mass",
        )?;
        Ok(MixedEquilibrium {
            v,
            k_x: k_p,
            k_y: 1.0,
            payoff: p_bar / x_bound,
            branch: Branch::SPositive,
            v0,
            s_v0,
            a: p_bar,
            b: j_bar,
            x_bound,
        })
    }
}

/// Which player's power axis a [`MixedStrategy`] lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyAxis {
    /// Player 1: powers are produced through the forward curve.
    Transmit,
    /// Player 2: powers are produced through the inverse curve.
    Jam,
}

/// A sampleable equilibrium strategy: a uniform mixture of mass `k` on
/// `[0, bound]` (transported through the curve) plus an atom at zero power.
#[derive(Debug, Clone)]
pub struct MixedStrategy {
    curve: MonotoneCurve,
    axis: StrategyAxis,
    /// Top of the uniform support on this strategy's transport axis:
    /// `2v` for the transmitter, `g(2v)` for the jammer.
    bound: f64,
    /// Mass of the uniform (non-atom) component.
    k: f64,
}

impl MixedStrategy {
    pub fn axis(&self) -> StrategyAxis {
        self.axis
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Mass of the transported-uniform component.
    pub fn mixture_mass(&self) -> f64 {
        self.k
    }

    pub fn curve(&self) -> &MonotoneCurve {
        &self.curve
    }

    /// Draw one power value.
    pub fn sample(&self, rng: &mut SplitMix64) -> Result<f64> {
        if rng.next_f64() >= self.k {
            return Ok(0.0);
        }
        let w = rng.next_f64() * self.bound;
        match self.axis {
            // The uniform lives on the jamming axis; a draw at the very
            // bottom sits on the jump and maps to its right-limit.
            StrategyAxis::Transmit => {
                if w == 0.0 {
                    Ok(self.curve.jump_at_zero())
                } else {
                    self.curve.forward(w)
                }
            }
            StrategyAxis::Jam => self.curve.inverse(w),
        }
    }

    /// Total probability of emitting exactly zero power. For the jammer this
    /// includes the part of the uniform that the inverse squashes onto the
    /// jump.
    pub fn zero_atom_mass(&self) -> f64 {
        match self.axis {
            StrategyAxis::Transmit => 1.0 - self.k,
            StrategyAxis::Jam => {
                if self.bound <= 0.0 {
                    1.0
                } else {
                    (1.0 - self.k)
                        + self.k * (self.curve.jump_at_zero() / self.bound).min(1.0)
                }
            }
        }
    }

    /// Exact mean power of the mixture; equals the player's budget at
    /// equilibrium.
    pub fn mean(&self) -> Result<f64> {
        if self.bound == 0.0 {
            return Ok(match self.axis {
                StrategyAxis::Transmit => self.k * self.curve.jump_at_zero(),
                StrategyAxis::Jam => 0.0,
            });
        }
        match self.axis {
            StrategyAxis::Transmit => {
                Ok(self.k * self.curve.integral_forward(self.bound)? / self.bound)
            }
            StrategyAxis::Jam => {
                Ok(self.k * self.curve.integral_inverse(self.bound)? / self.bound)
            }
        }
    }
}

/// Materialise the two optimal strategies of an equilibrium on its curve.
pub fn equilibrium_strategies(
    g: &MonotoneCurve,
    eq: &MixedEquilibrium,
) -> (MixedStrategy, MixedStrategy) {
    if eq.branch == Branch::Degenerate {
        return (
            MixedStrategy {
                curve: g.clone(),
                axis: StrategyAxis::Transmit,
                bound: 0.0,
                k: eq.k_x,
            },
            MixedStrategy { curve: g.clone(), axis: StrategyAxis::Jam, bound: 0.0, k: 0.0 },
        );
    }
    (
        MixedStrategy {
            curve: g.clone(),
            axis: StrategyAxis::Transmit,
            bound: 2.0 * eq.v,
            k: eq.k_x,
        },
        MixedStrategy { curve: g.clone(), axis: StrategyAxis::Jam, bound: eq.x_bound, k: eq.k_y },
    )
}

/// Equilibrium of the inter-frame game on a sampled required-power curve,
/// with the optimal strategies ready for simulation.
///
/// A zero jamming budget bypasses the solver: the transmitter covers the
/// no-jamming requirement `g(0⁺)` on as many frames as its budget allows and
/// the outage probability is `max(0, 1 − P/g(0⁺))`.
pub fn fullcsi_equilibrium(
    curve: &PowerCurve,
    p_bar: f64,
    j_bar: f64,
) -> Result<(MixedEquilibrium, MixedStrategy, MixedStrategy)> {
    let g = MonotoneCurve::sampled(curve.clone());
    let eq = solve_general_game(&g, p_bar, j_bar, CONSISTENCY_TOL)?;
    let (tx, jam) = equilibrium_strategies(&g, &eq);
    Ok((eq, tx, jam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame_solver::CurveMeta;

    fn sampled_line(slope: f64, intercept: f64, j_end: f64, n: usize) -> MonotoneCurve {
        let samples: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let j = j_end * i as f64 / n as f64;
                (j, intercept + slope * j)
            })
            .collect();
        MonotoneCurve::sampled(
            PowerCurve::from_samples(&samples, CurveMeta::unknown())
                .unwrap()
                .with_extension(true),
        )
    }

    #[test]
    fn unit_identity_game_value() {
        let eq = solve_general_game(&MonotoneCurve::identity(), 1.0, 1.0, 1e-8).unwrap();
        assert!((eq.payoff - 0.5).abs() < 1e-9, "payoff {}", eq.payoff);
        assert!((eq.v - 1.0).abs() < 1e-9, "v {}", eq.v);
        assert!((eq.k_x - 1.0).abs() < 1e-9);
        assert!((eq.k_y - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linear_curve_doubles() {
        // g(y) = 2y, a = b = 1: pivot 3/4, S-positive, v = 1, payoff 1/4.
        let g = MonotoneCurve::affine(2.0, 0.0).unwrap();
        let eq = solve_general_game(&g, 1.0, 1.0, 1e-8).unwrap();
        assert_eq!(eq.branch, Branch::SPositive);
        assert!((eq.v0 - 0.75).abs() < 1e-9, "v0 {}", eq.v0);
        assert!((eq.s_v0 - 0.75).abs() < 1e-8, "S {}", eq.s_v0);
        assert!((eq.v - 1.0).abs() < 1e-9, "v {}", eq.v);
        assert!((eq.k_x - 0.5).abs() < 1e-9, "k_x {}", eq.k_x);
        assert!((eq.k_y - 1.0).abs() < 1e-12);
        assert!((eq.payoff - 0.25).abs() < 1e-9);
    }

    #[test]
    fn affine_closed_form_cases() {
        // Saturated-jammer case.
        let eq = hughes_narayan_closed_form(2.0, 1.0, 1.0).unwrap();
        assert_eq!(eq.branch, Branch::SPositive);
        assert!((eq.v - 0.5 * (1.0 + 3f64.sqrt())).abs() < 1e-12);
        assert!((eq.payoff - 2.0 / (2.0 + 3f64.sqrt())).abs() < 1e-12);
        // Saturated-transmitter case.
        let eq = hughes_narayan_closed_form(3.0, 1.0, 0.5).unwrap();
        assert_eq!(eq.branch, Branch::SNegative);
        assert!((eq.v - 2.5).abs() < 1e-12);
        assert!((eq.payoff - 0.8).abs() < 1e-12);
        assert!((eq.k_y - 0.44).abs() < 1e-12, "k_y {}", eq.k_y);
        // Zero offset collapses to the symmetric game.
        let eq = hughes_narayan_closed_form(1.0, 1.0, 0.0).unwrap();
        assert!((eq.payoff - 0.5).abs() < 1e-12);
    }

    #[test]
    fn generic_solver_matches_affine_closed_form() {
        for (a, b, c) in [(2.0, 1.0, 1.0), (1.0, 2.0, 0.0), (1.0, 1.0, 0.0), (3.0, 1.0, 0.5)] {
            let closed = hughes_narayan_closed_form(a, b, c).unwrap();
            let g = MonotoneCurve::affine(1.0, c).unwrap();
            let solved = solve_general_game(&g, a, b, 1e-8).unwrap();
            assert!((closed.v - solved.v).abs() < 1e-6, "v: {} vs {}", closed.v, solved.v);
            assert!((closed.k_x - solved.k_x).abs() < 1e-6);
            assert!((closed.k_y - solved.k_y).abs() < 1e-6);
            assert!((closed.payoff - solved.payoff).abs() < 1e-6);
        }
    }

    #[test]
    fn generic_solver_matches_nocsi_closed_form() {
        let mu = 1.6;
        let sigma2 = 10.0;
        for p in [15.0, 30.0, 45.0, 80.0] {
            let closed = nocsi_closed_form(p, 10.0, mu, sigma2).unwrap();
            let g = MonotoneCurve::affine(mu, mu * sigma2).unwrap();
            let solved = solve_general_game(&g, p, 10.0, 1e-8).unwrap();
            assert!((closed.v - solved.v).abs() < 1e-6, "P={p}: v {} vs {}", closed.v, solved.v);
            assert!((closed.k_x - solved.k_x).abs() < 1e-6, "P={p}");
            assert!((closed.k_y - solved.k_y).abs() < 1e-6, "P={p}");
            assert!((closed.payoff - solved.payoff).abs() < 1e-6, "P={p}");
        }
    }

    #[test]
    fn nocsi_branch_boundary_is_continuous() {
        let mu = 1.6f64;
        let sigma2 = 10.0f64;
        let j = 10.0f64;
        let threshold = mu * sigma2 + 0.5 * mu * j * (1.0 + (1.0 + 2.0 * sigma2 / j).sqrt());
        let low = nocsi_closed_form(threshold * (1.0 - 1e-12), j, mu, sigma2).unwrap();
        let high = nocsi_closed_form(threshold * (1.0 + 1e-12), j, mu, sigma2).unwrap();
        assert!((low.v - high.v).abs() < 1e-8 * high.v);
        assert!((low.k_x - high.k_x).abs() < 1e-8);
        assert!((low.k_y - high.k_y).abs() < 1e-8);
        assert!((low.payoff - high.payoff).abs() < 1e-10);
    }

    #[test]
    fn sampled_line_matches_affine() {
        let g_exact = MonotoneCurve::affine(1.6, 16.0).unwrap();
        let g_grid = sampled_line(1.6, 16.0, 80.0, 400);
        let exact = solve_general_game(&g_exact, 30.0, 10.0, 1e-8).unwrap();
        let grid = solve_general_game(&g_grid, 30.0, 10.0, 1e-8).unwrap();
        assert!((exact.v - grid.v).abs() < 1e-8 * exact.v, "{} vs {}", exact.v, grid.v);
        assert!((exact.payoff - grid.payoff).abs() < 1e-9);
    }

    #[test]
    fn residual_system_holds() {
        let g = MonotoneCurve::affine(1.6, 16.0).unwrap();
        for p in [15.0, 30.0, 45.0] {
            let eq = solve_general_game(&g, p, 10.0, 1e-8).unwrap();
            let r = eq.residuals(&g).unwrap();
            for (i, x) in r.iter().enumerate() {
                assert!(x.abs() < 1e-8, "P={p}: residual {i} = {x:e}");
            }
            // Security levels agree with the payoff at equilibrium.
            assert!((eq.security_level_p1() - eq.payoff).abs() < 1e-9);
            assert!((eq.security_level_p2() - eq.payoff).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_below_jump_forces_saturated_jammer() {
        let g = MonotoneCurve::affine(1.0, 10.0).unwrap();
        let eq = solve_general_game(&g, 5.0, 10.0, 1e-8).unwrap();
        assert_eq!(eq.branch, Branch::SPositive);
        assert!(eq.s_v0 > 0.0);
        // Matches the closed form in the same regime.
        let closed = hughes_narayan_closed_form(5.0, 10.0, 10.0).unwrap();
        assert!((eq.v - closed.v).abs() < 1e-6);
        assert!((eq.payoff - closed.payoff).abs() < 1e-8);
        // Payoff is linear in the budget in this branch.
        let eq2 = solve_general_game(&g, 10.0, 10.0, 1e-8).unwrap();
        assert!((eq2.payoff - 2.0 * eq.payoff).abs() < 1e-9);
    }

    #[test]
    fn zero_jammer_budget_degenerates() {
        let g = MonotoneCurve::affine(1.0, 10.0).unwrap();
        let eq = solve_general_game(&g, 5.0, 0.0, 1e-8).unwrap();
        assert_eq!(eq.branch, Branch::Degenerate);
        assert!((eq.payoff - 0.5).abs() < 1e-15);
        let full = solve_general_game(&g, 20.0, 0.0, 1e-8).unwrap();
        assert_eq!(full.payoff, 1.0);
    }

    #[test]
    fn strategies_meet_budgets_exactly() {
        let g = MonotoneCurve::affine(1.6, 16.0).unwrap();
        let eq = solve_general_game(&g, 30.0, 10.0, 1e-8).unwrap();
        let (tx, jam) = equilibrium_strategies(&g, &eq);
        assert!((tx.mean().unwrap() - 30.0).abs() < 1e-9 * 30.0, "tx mean {:?}", tx.mean());
        assert!((jam.mean().unwrap() - 10.0).abs() < 1e-9 * 10.0, "jam mean {:?}", jam.mean());
        // Zero atoms: transmitter from its mixing mass, jammer from the
        // mixing mass plus the squashed jump.
        assert!((tx.zero_atom_mass() - (1.0 - eq.k_x)).abs() < 1e-15);
        let expected_jam_zero =
            (1.0 - eq.k_y) + eq.k_y * g.jump_at_zero() / eq.x_bound;
        assert!((jam.zero_atom_mass() - expected_jam_zero).abs() < 1e-12);
    }

    #[test]
    fn strategy_sampling_tracks_the_mixture() {
        let g = MonotoneCurve::affine(1.0, 1.0).unwrap();
        let eq = solve_general_game(&g, 2.0, 1.0, 1e-8).unwrap();
        let (tx, jam) = equilibrium_strategies(&g, &eq);
        let mut rng = SplitMix64::new(7);
        let n = 200_000;
        let (mut sum_x, mut zeros_x, mut sum_y, mut zeros_y) = (0.0, 0u64, 0.0, 0u64);
        for _ in 0..n {
            let x = tx.sample(&mut rng).unwrap();
            let y = jam.sample(&mut rng).unwrap();
            sum_x += x;
            sum_y += y;
            if x == 0.0 {
                zeros_x += 1;
            }
            if y == 0.0 {
                zeros_y += 1;
            }
        }
        let nf = n as f64;
        assert!((sum_x / nf - 2.0).abs() < 0.02, "tx mean {}", sum_x / nf);
        assert!((sum_y / nf - 1.0).abs() < 0.02, "jam mean {}", sum_y / nf);
        assert!((zeros_x as f64 / nf - tx.zero_atom_mass()).abs() < 0.01);
        assert!((zeros_y as f64 / nf - jam.zero_atom_mass()).abs() < 0.01);
    }

    #[test]
    fn inverse_integral_complement_identity() {
        let g = sampled_line(2.0, 5.0, 20.0, 37);
        for t in [0.5, 3.0, 11.7, 19.9, 28.0] {
            let x = g.forward(t).unwrap();
            let lhs = g.integral_forward(t).unwrap();
            let rhs = t * x - g.integral_inverse(x).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * lhs.max(1.0), "t={t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn jump_conventions() {
        let g = MonotoneCurve::affine(2.0, 3.0).unwrap();
        assert_eq!(g.forward(0.0).unwrap(), 0.0);
        assert_eq!(g.jump_at_zero(), 3.0);
        assert_eq!(g.inverse(1.5).unwrap(), 0.0);
        assert_eq!(g.inverse(3.0).unwrap(), 0.0);
        assert!((g.inverse(7.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(g.integral_inverse(3.0).unwrap(), 0.0);
        assert!((g.integral_inverse(7.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_curve_without_extension_is_rejected() {
        let samples = [(0.0, 10.0), (1.0, 11.0), (2.0, 12.0)];
        let curve = PowerCurve::from_samples(&samples, CurveMeta::unknown()).unwrap();
        let g = MonotoneCurve::sampled(curve);
        let e = solve_general_game(&g, 30.0, 10.0, 1e-8);
        assert!(matches!(e, Err(Error::NoEquilibrium(_)) | Err(Error::Range(_))), "{e:?}");
    }

    #[test]
    fn record_serialises_expected_fields() {
        let eq = hughes_narayan_closed_form(2.0, 1.0, 1.0).unwrap();
        let rec = eq.record(0xdeadbeef);
        let json = serde_json::to_string(&rec).unwrap();
        for key in ["\"v\"", "\"k_x\"", "\"k_y\"", "\"payoff\"", "\"branch\"", "\"v0\"", "\"S_v0\"", "\"curve_digest\""] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        assert!(json.contains("00000000deadbeef"));
    }
}
