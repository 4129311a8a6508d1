//! Upper bounds on what any parameter choice can achieve, from explicit
//! hard instances, plus the grid maximizer that locates the best such
//! parameters.
//!
//! Where the LPs of [`crate::frlp`] certify "at least this good on every
//! distribution", the surfaces here certify "no better than this on *some*
//! distribution": each formula is the limiting ratio of a concrete rule on a
//! concrete nemesis (a high-value spike for the observe-and-accept rule, a
//! two-level instance for the two-threshold rule). Maximizing a surface over
//! its parameter box therefore upper-bounds the whole approach, and its
//! value must sandwich the LP lower bound from above — a cross-check the
//! tests lean on.

use crate::exec;
use crate::{Error, Result};
use serde::Serialize;

/// Composite adaptive Simpson quadrature on `[a, b]` with absolute
/// tolerance `tol`: panels split until the Richardson error estimate
/// `|S_fine − S_coarse|/15` is below the panel's tolerance share.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol || depth == 0 {
            left + right + err / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `∫_ρ¹ e^{−ct}/t dt`, the observation-phase weight in the high-value
/// hard-instance bound. Equals `E₁(cρ) − E₁(c)` in terms of the exponential
/// integral; evaluated by [`adaptive_simpson`] at absolute tolerance 1e-12.
pub fn exp_integral(c: f64, rho: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain(format!("rate c = {c} must be positive")));
    }
    if !(rho.is_finite() && rho > 0.0 && rho <= 1.0) {
        return Err(Error::domain(format!(
            "rho = {rho} must lie in (0, 1] (the integrand blows up at 0)"
        )));
    }
    if rho == 1.0 {
        return Ok(0.0);
    }
    Ok(adaptive_simpson(|t| (-c * t).exp() / t, rho, 1.0, 1e-12))
}

/// Upper bound for the observe-and-accept rule at `(c, ρ)`, from the
/// high-value spike instance in its `M → ∞, ε → 0` limit:
///
/// `min{ 1 − ρe^{−c},  (1−e^{−cρ})/c + ρ·∫_ρ¹ e^{−ct}/t dt }`.
///
/// The first branch caps the point-mass-like instance, the second the
/// spike's arrival analysis; the true ratio can't beat either.
pub fn ub_observe_accept(c: f64, rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0 && rho < 1.0) {
        return Err(Error::domain(format!("rho = {rho} must lie in (0, 1)")));
    }
    let spike = -(-c * rho).exp_m1() / c + rho * exp_integral(c, rho)?;
    Ok((1.0 - rho * (-c).exp()).min(spike))
}

/// Upper bound for the two-threshold rule at `(c₁, c₂, ρ)`: the least of
/// three hard-instance caps —
///
/// * `UB₁ = (1−e^{−ρc₁})/c₁ + e^{−ρc₁}(1−e^{−(1−ρ)c₂})/c₂` (high-value spike),
/// * `UB₂ = 1 − e^{−ρc₁−(1−ρ)c₂}` (point-like instance: must accept at all),
/// * `UB₃ = min_{c ∈ (c₁,c₂)} (A + Bc)/(1−e^{−c})` with `A = 1−e^{−ρc₁}`,
///   `B = e^{−ρc₁}(1−e^{−(1−ρ)c₂})/c₂` (two-level instance at level rate `c`,
///   minimized over `c_grid` interior samples).
pub fn ub_two_threshold(c1: f64, c2: f64, rho: f64, c_grid: usize) -> Result<f64> {
    if !(c1.is_finite() && c2.is_finite() && 0.0 < c1 && c1 < c2) {
        return Err(Error::domain(format!("rates must satisfy 0 < c1 < c2, got ({c1}, {c2})")));
    }
    if !(rho.is_finite() && 0.0 < rho && rho < 1.0) {
        return Err(Error::domain(format!("rho = {rho} must lie in (0, 1)")));
    }
    if c_grid == 0 {
        return Err(Error::domain("c_grid must be ≥ 1"));
    }
    let a = -(-rho * c1).exp_m1();
    let tail2 = (-rho * c1).exp() * -(-(1.0 - rho) * c2).exp_m1();
    let ub1 = a / c1 + tail2 / c2;
    let ub2 = -(-rho * c1 - (1.0 - rho) * c2).exp_m1();
    let ub3 = two_level_cap(a, tail2 / c2, c1, c2, c_grid);
    Ok(ub1.min(ub2).min(ub3))
}

/// `min (A + Bc)/(1 − e^{−c})` over `c_grid` interior samples of `(c1, c2)`.
/// The exponential walks incrementally — one multiply per sample — so the
/// dense default grid (2000 points) stays cheap inside the maximizer's loop.
fn two_level_cap(a: f64, b: f64, c1: f64, c2: f64, c_grid: usize) -> f64 {
    let step = (c2 - c1) / (c_grid + 1) as f64;
    let factor = (-step).exp();
    let mut q = (-c1).exp(); // e^{−c} at the walking sample
    let mut c = c1;
    let mut best = f64::INFINITY;
    for _ in 0..c_grid {
        c += step;
        q *= factor;
        let v = (a + b * c) / (1.0 - q);
        if v < best {
            best = v;
        }
    }
    best
}

/// Which family of rules a bound surface caps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    TwoThreshold,
    ObserveAccept,
}

/// A bound formula over a parameter box, ready for [`grid_maximize`].
/// Points where the formula is undefined (e.g. `c1 ≥ c2` inside the
/// rectangular box) evaluate to `−∞` and never win.
pub struct BoundSurface {
    pub kind: BoundKind,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    eval: Box<dyn Fn(&[f64]) -> f64 + Sync + Send>,
    /// Cheap upper estimate of `eval`, used to skip expensive evaluations
    /// that cannot beat the incumbent. Must never under-estimate.
    screen: Option<Box<dyn Fn(&[f64]) -> f64 + Sync + Send>>,
}

impl BoundSurface {
    pub fn value(&self, point: &[f64]) -> f64 {
        (self.eval)(point)
    }
}

/// The two-threshold bound over `c₁ ∈ (0, 2], c₂ ∈ (0, 30], ρ ∈ (0, 1)`,
/// with `c_grid` inner samples for the two-level cap.
pub fn two_threshold_surface(c_grid: usize) -> BoundSurface {
    BoundSurface {
        kind: BoundKind::TwoThreshold,
        lo: vec![0.0, 0.0, 0.0],
        hi: vec![2.0, 30.0, 1.0],
        eval: Box::new(move |p| {
            ub_two_threshold(p[0], p[1], p[2], c_grid).unwrap_or(f64::NEG_INFINITY)
        }),
        screen: Some(Box::new(|p| {
            let (c1, c2, rho) = (p[0], p[1], p[2]);
            if c1 >= c2 {
                return f64::NEG_INFINITY;
            }
            let a = -(-rho * c1).exp_m1();
            let tail2 = (-rho * c1).exp() * -(-(1.0 - rho) * c2).exp_m1();
            (a / c1 + tail2 / c2).min(-(-rho * c1 - (1.0 - rho) * c2).exp_m1())
        })),
    }
}

/// The observe-and-accept bound over `c ∈ (0, 1], ρ ∈ (0, 1)` (beyond
/// `c = 1` the bound is already below the single-threshold baseline).
pub fn observe_accept_surface() -> BoundSurface {
    BoundSurface {
        kind: BoundKind::ObserveAccept,
        lo: vec![0.0, 0.0],
        hi: vec![1.0, 1.0],
        eval: Box::new(|p| ub_observe_accept(p[0], p[1]).unwrap_or(f64::NEG_INFINITY)),
        screen: Some(Box::new(|p| 1.0 - p[1] * (-p[0]).exp())),
    }
}

/// Result of a grid maximization: the incumbent point, its value (exactly
/// `surface.value(argmax)`), and the search geometry that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMaxResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub resolution: usize,
    pub refine_rounds: usize,
}

/// Maximize a surface by cell-center grid search plus local refinement:
/// a `resolution`-per-axis grid over the box, then `refine_rounds` passes
/// that shrink the box tenfold around the incumbent (clipped to the original
/// box) and re-grid. Rows along the first axis run in parallel; the scan
/// order is lexicographic and ties keep the lexicographically smallest
/// point, so the result is identical under any thread count.
///
/// The result is a certified *lower* bound on the true maximum (it is an
/// evaluated point); how close depends on the surface's smoothness.
pub fn grid_maximize(
    surface: &BoundSurface,
    resolution: usize,
    refine_rounds: usize,
) -> Result<GridMaxResult> {
    if resolution < 2 {
        return Err(Error::domain(format!("resolution = {resolution} must be ≥ 2")));
    }
    let dims = surface.lo.len();
    if dims == 0 || surface.hi.len() != dims {
        return Err(Error::model("surface box is empty or mismatched"));
    }
    if surface
        .lo
        .iter()
        .zip(&surface.hi)
        .any(|(l, h)| !(l.is_finite() && h.is_finite() && l < h))
    {
        return Err(Error::model("surface box must be finite with lo < hi"));
    }

    let mut box_lo = surface.lo.clone();
    let mut box_hi = surface.hi.clone();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for _round in 0..=refine_rounds {
        let axes: Vec<Vec<f64>> = (0..dims)
            .map(|a| {
                let w = (box_hi[a] - box_lo[a]) / resolution as f64;
                (0..resolution).map(|t| box_lo[a] + w * (t as f64 + 0.5)).collect()
            })
            .collect();
        let rest: usize = axes[1..].iter().map(Vec::len).product();

        let rows = exec::map_indexed(resolution, |i0| {
            let mut local: Option<(f64, Vec<f64>)> = None;
            let mut point = vec![0.0; dims];
            point[0] = axes[0][i0];
            for code in 0..rest {
                let mut rem = code;
                for a in (1..dims).rev() {
                    point[a] = axes[a][rem % resolution];
                    rem /= resolution;
                }
                if let (Some(screen), Some((incumbent, _))) = (&surface.screen, &local) {
                    if screen(&point) <= *incumbent {
                        continue;
                    }
                }
                let v = (surface.eval)(&point);
                if v.is_finite() && local.as_ref().is_none_or(|(b, _)| v > *b) {
                    local = Some((v, point.clone()));
                }
            }
            local
        });

        for row in rows.into_iter().flatten() {
            if best.as_ref().is_none_or(|(b, _)| row.0 > *b) {
                best = Some(row);
            }
        }

        if let Some((_, ref center)) = best {
            for a in 0..dims {
                let half = 0.05 * (box_hi[a] - box_lo[a]);
                box_lo[a] = (center[a] - half).max(surface.lo[a]);
                box_hi[a] = (center[a] + half).min(surface.hi[a]);
            }
        }
    }

    let (value, argmax) =
        best.ok_or_else(|| Error::model("surface has no finite value on its box"))?;
    Ok(GridMaxResult { argmax, value, resolution, refine_rounds })
}
