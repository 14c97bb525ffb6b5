//! Shared numeric kernel: adaptive Simpson quadrature, bracketed bisection,
//! bracket growth, and a tiny stable digest for artifact headers.
//!
//! Everything here is deliberately hand-rolled and branch-stable so that the
//! same inputs produce bit-identical outputs on every run and platform that
//! implements IEEE-754 doubles.

use crate::{Error, Result};

/// Hard cap on integrand evaluations per call, defence against runaway
/// subdivision on hostile integrands.
const MAX_QUAD_EVALS: usize = 4_000_000;

struct QuadCtx<'a> {
    f: &'a dyn Fn(f64) -> f64,
    evals: usize,
    eps_floor: f64,
}

impl QuadCtx<'_> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evals += 1;
        if self.evals > MAX_QUAD_EVALS {
            return Err(Error::Integration(format!(
                "eval budget exhausted near x = {x:e}"
            )));
        }
        let y = (self.f)(x);
        if !y.is_finite() {
            return Err(Error::Integration(format!(
                "integrand non-finite at x = {x:e}"
            )));
        }
        Ok(y)
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    (fa + 4.0 * fm + fb) * h / 6.0
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    ctx: &mut QuadCtx,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = ctx.eval(lm)?;
    let frm = ctx.eval(rm)?;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps || (b - a) <= f64::EPSILON * (a.abs() + b.abs() + 1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Integration(format!(
            "max subdivision depth reached on [{a:e}, {b:e}]"
        )));
    }
    let eps_half = (0.5 * eps).max(ctx.eps_floor);
    let l = adapt(ctx, a, m, fa, flm, fm, left, eps_half, depth - 1)?;
    let r = adapt(ctx, m, b, fm, frm, fb, right, eps_half, depth - 1)?;
    Ok(l + r)
}

/// Integrate `f` over `[a, b]` to roughly `rel_tol` relative accuracy with at
/// most `max_depth` levels of adaptive subdivision.
///
/// The integrand must be finite everywhere it is sampled; a NaN or infinity
/// aborts with [`Error::Integration`].
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, max_depth: u32) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::argument("integration bounds must be finite"));
    }
    if a > b {
        return Err(Error::argument(format!("integration bounds reversed: {a} > {b}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut ctx = QuadCtx { f, evals: 0, eps_floor: 0.0 };
    // Coarse composite pass to set the absolute tolerance scale.
    let n = 32usize;
    let h = (b - a) / n as f64;
    let mut coarse = 0.0;
    let mut cache = Vec::with_capacity(2 * n + 1);
    for i in 0..=2 * n {
        cache.push(ctx.eval(a + 0.5 * h * i as f64)?);
    }
    for i in 0..n {
        coarse += simpson(cache[2 * i], cache[2 * i + 1], cache[2 * i + 2], h);
    }
    let scale = coarse.abs().max(1e-300);
    let eps = rel_tol * scale;
    ctx.eps_floor = eps * 1e-3;
    let panel_eps = (eps / n as f64).max(ctx.eps_floor);
    let mut total = 0.0;
    for i in 0..n {
        let lo = a + h * i as f64;
        let hi = lo + h;
        let whole = simpson(cache[2 * i], cache[2 * i + 1], cache[2 * i + 2], h);
        total += adapt(
            &mut ctx,
            lo,
            hi,
            cache[2 * i],
            cache[2 * i + 1],
            cache[2 * i + 2],
            whole,
            panel_eps,
            max_depth,
        )?;
    }
    Ok(total)
}

/// Converged root returned by [`bisect`].
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    /// Residual `f(x)` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection stopping policy. `residual_tol` is absolute — callers scale it
/// by the natural magnitude of the residual they are driving to zero.
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Bisection {
    pub fn residual(residual_tol: f64) -> Self {
        Bisection { residual_tol, max_iter: 200 }
    }
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection { residual_tol: 1e-10, max_iter: 200 }
    }
}

/// Find a zero of `f` in `[lo, hi]` given that the endpoint values have
/// opposite signs. Stops on the residual target, or once the interval has
/// collapsed to machine width (whichever comes first).
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, opts: Bisection, what: &str) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo > hi {
        return Err(Error::argument(format!("{what}: empty bracket [{lo:e}, {hi:e}]")));
    }
    if lo == hi {
        let f0 = f(lo)?;
        if f0.abs() <= opts.residual_tol {
            return Ok(Root { x: lo, residual: f0, iterations: 0 });
        }
        return Err(Error::Convergence {
            what: format!("{what}: degenerate bracket at {lo:e}"),
            residual: f0,
            iterations: 0,
        });
    }
    let mut lo = lo;
    let mut hi = hi;
    let flo = f(lo)?;
    if flo.abs() <= opts.residual_tol {
        return Ok(Root { x: lo, residual: flo, iterations: 0 });
    }
    let fhi = f(hi)?;
    if fhi.abs() <= opts.residual_tol {
        return Ok(Root { x: hi, residual: fhi, iterations: 0 });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Convergence {
            what: format!("{what}: no sign change on [{lo:e}, {hi:e}]"),
            residual: flo.abs().min(fhi.abs()),
            iterations: 0,
        });
    }
    let sign_lo = flo.signum();
    let mut best = Root { x: lo, residual: flo, iterations: 0 };
    if fhi.abs() < flo.abs() {
        best = Root { x: hi, residual: fhi, iterations: 0 };
    }
    for it in 1..=opts.max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval collapsed to adjacent doubles; residual is now limited
            // by the accuracy of `f` itself.
            if best.residual.abs() <= opts.residual_tol.max(1e-300) * 1e4 {
                return Ok(best);
            }
            return Err(Error::Convergence {
                what: format!("{what}: interval collapsed at x = {mid:e}"),
                residual: best.residual,
                iterations: it,
            });
        }
        let fm = f(mid)?;
        if fm.abs() < best.residual.abs() {
            best = Root { x: mid, residual: fm, iterations: it };
        }
        if fm.abs() <= opts.residual_tol {
            return Ok(Root { x: mid, residual: fm, iterations: it });
        }
        if fm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.residual.abs() <= opts.residual_tol * 1e4 {
        return Ok(best);
    }
    Err(Error::Convergence {
        what: what.to_string(),
        residual: best.residual,
        iterations: opts.max_iter,
    })
}

/// Grow the upper end of a bracket geometrically until `f` changes sign.
/// Returns `(lo, hi)` with `f(lo)` and `f(hi)` of opposite signs.
pub fn grow_upward<F>(mut f: F, lo: f64, hi0: f64, factor: f64, cap: f64, what: &str) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let flo = f(lo)?;
    if flo == 0.0 {
        return Ok((lo, lo));
    }
    let mut prev = lo;
    let mut hi = hi0;
    loop {
        let fhi = f(hi)?;
        if fhi == 0.0 || fhi.signum() != flo.signum() {
            return Ok((prev, hi));
        }
        prev = hi;
        hi *= factor;
        if hi > cap {
            return Err(Error::Convergence {
                what: format!("{what}: bracket grew past cap {cap:e}"),
                residual: fhi,
                iterations: 0,
            });
        }
    }
}

/// Shrink the lower end of a bracket geometrically toward zero until `f`
/// changes sign relative to `f(hi)`.
pub fn grow_downward<F>(mut f: F, lo0: f64, hi: f64, factor: f64, floor: f64, what: &str) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fhi = f(hi)?;
    if fhi == 0.0 {
        return Ok((hi, hi));
    }
    let mut prev = hi;
    let mut lo = lo0;
    loop {
        let flo = f(lo)?;
        if flo == 0.0 || flo.signum() != fhi.signum() {
            return Ok((lo, prev));
        }
        prev = lo;
        lo /= factor;
        if lo < floor {
            return Err(Error::Convergence {
                what: format!("{what}: bracket shrank past floor {floor:e}"),
                residual: flo,
                iterations: 0,
            });
        }
    }
}

/// FNV-1a 64-bit digest; used to stamp emitted artifacts with a stable,
/// dependency-free fingerprint.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
