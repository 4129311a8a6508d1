//! The gambler's decision rules and their exact finite-n payoff formulas.
//!
//! All four rules are **online**: they scan the realizations in arrival
//! order, accept at most one, and never look past the index they accept at.
//! They differ in what they know beforehand:
//!
//! * [`PolicySpec::SecretaryZeroQuery`] — nothing. Watch `⌊n/e⌋` values,
//!   then take the first strict record.
//! * [`PolicySpec::SingleThreshold`] / [`PolicySpec::KThreshold`] — one or
//!   `k` quantile answers. Accept the first value over `v(1 − c/n)`, with
//!   the k-phase variant lowering the bar on a fixed schedule.
//! * [`PolicySpec::ObserveAndAccept`] — one quantile answer plus the running
//!   observation: phase one uses `v(1 − c/n)`, and if nothing clears it, the
//!   observed phase-one maximum becomes the phase-two bar.
//!
//! The two blind threshold rules admit exact expected-payoff formulas
//! ([`closed_form_single`], [`closed_form_k_threshold`]): acceptance times
//! are geometric with per-draw rate `c_ℓ/n`, and the value collected
//! decomposes as `θ_ℓ + Δ(c_ℓ)/c_ℓ` per acceptance. The other two rules
//! condition on realized observations, so their payoff is estimated by
//! simulation ([`crate::sim`]) or bounded by LPs ([`crate::frlp`]); their
//! [`capability`](PolicySpec::capability) says so.

use crate::dist::Distribution;
use crate::num::{one_minus_pow, pow_frac};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance for phase fractions summing to one.
pub const RHO_SUM_TOL: f64 = 1e-12;

/// A decision rule, serializable as tagged JSON, e.g.
/// `{"variant":"k_threshold","c":[0.7,1.8],"rho":[0.62,0.38]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    /// Observe `⌊n/e⌋` values, then accept the first strict record.
    SecretaryZeroQuery,
    /// Accept the first value `≥ v(1 − c/n)`.
    SingleThreshold { c: f64 },
    /// Phase `ℓ` (length `⌊ρ_ℓ n⌋`, remainder absorbed by the last phase)
    /// accepts values `≥ v(1 − c_ℓ/n)`; rates must be strictly increasing.
    KThreshold { c: Vec<f64>, rho: Vec<f64> },
    /// Threshold `v(1 − c/n)` for the first `⌊ρn⌋` values; afterwards the
    /// maximum observed so far becomes the threshold.
    ObserveAndAccept { c: f64, rho: f64 },
}

/// What happened on one sequence: `tau` is the 1-based acceptance index
/// (`n + 1` when nothing was accepted) and `value` the payoff (0 when
/// nothing was accepted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub tau: usize,
    pub value: f64,
}

/// Whether a rule's expected payoff has an exact finite-n formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capability {
    /// `true` for the blind threshold rules. The observe-and-accept rule's
    /// second threshold and the secretary rule's record bar are random
    /// variables (functions of the realized prefix), so no closed form is
    /// available here — estimate by Monte Carlo or bound via the LPs.
    pub analytic: bool,
}

impl PolicySpec {
    /// Validate against a horizon of `n` values.
    pub fn validate(&self, n: u32) -> Result<()> {
        let nf = f64::from(n);
        if n == 0 {
            return Err(Error::domain("horizon n must be ≥ 1"));
        }
        match self {
            PolicySpec::SecretaryZeroQuery => Ok(()),
            PolicySpec::SingleThreshold { c } => check_rate(*c, nf),
            PolicySpec::KThreshold { c, rho } => {
                if c.is_empty() {
                    return Err(Error::domain("k_threshold needs at least one phase"));
                }
                if c.len() != rho.len() {
                    return Err(Error::domain(format!(
                        "k_threshold has {} rates but {} phase fractions",
                        c.len(),
                        rho.len()
                    )));
                }
                for &ci in c {
                    check_rate(ci, nf)?;
                }
                if c.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::domain("k_threshold rates must be strictly increasing"));
                }
                check_fractions(rho)
            }
            PolicySpec::ObserveAndAccept { c, rho } => {
                check_rate(*c, nf)?;
                if !(rho.is_finite() && *rho > 0.0 && *rho < 1.0) {
                    return Err(Error::domain(format!(
                        "observe_and_accept fraction rho = {rho} must lie in (0, 1)"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Whether [`closed_form_k_threshold`] applies to this rule.
    pub fn capability(&self) -> Capability {
        Capability {
            analytic: matches!(
                self,
                PolicySpec::SingleThreshold { .. } | PolicySpec::KThreshold { .. }
            ),
        }
    }
}

fn check_rate(c: f64, nf: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0 && c <= nf) {
        return Err(Error::domain(format!("rate c = {c} must lie in (0, n] with n = {nf}")));
    }
    Ok(())
}

fn check_fractions(rho: &[f64]) -> Result<()> {
    if rho.iter().any(|r| !(r.is_finite() && *r > 0.0 && *r <= 1.0)) {
        return Err(Error::domain("phase fractions must lie in (0, 1]"));
    }
    let total: f64 = rho.iter().sum();
    if (total - 1.0).abs() > RHO_SUM_TOL {
        return Err(Error::domain(format!(
            "phase fractions sum to {total}, expected 1 within {RHO_SUM_TOL:e}"
        )));
    }
    Ok(())
}

/// `⌊r·n⌋` with a one-ulp-scale forgiveness so that fractions meant to be
/// exact (0.71 · 1000) don't round down through float dirt.
fn floor_frac(r: f64, n: u32) -> usize {
    ((r * f64::from(n)) + 1e-9).floor() as usize
}

/// Phase lengths: `⌊ρ_ℓ n⌋` each, remainder into the last phase.
fn phase_sizes(rho: &[f64], n: u32) -> Vec<usize> {
    let k = rho.len();
    let mut sizes: Vec<usize> = rho.iter().map(|&r| floor_frac(r, n)).collect();
    let used: usize = sizes[..k - 1].iter().sum();
    sizes[k - 1] = n as usize - used;
    sizes
}

/// A rule bound to a distribution and horizon: thresholds resolved, phase
/// lengths fixed. This is what the simulator runs millions of times.
pub(crate) enum Compiled {
    Secretary { observe: usize },
    Thresholds { thetas: Vec<f64>, sizes: Vec<usize> },
    ObserveAccept { theta1: f64, observe: usize },
}

impl Compiled {
    pub(crate) fn new(spec: &PolicySpec, dist: &Distribution, n: u32) -> Result<Compiled> {
        spec.validate(n)?;
        let nf = f64::from(n);
        Ok(match spec {
            PolicySpec::SecretaryZeroQuery => Compiled::Secretary {
                observe: floor_frac(1.0 / std::f64::consts::E, n),
            },
            PolicySpec::SingleThreshold { c } => Compiled::Thresholds {
                thetas: vec![dist.quantile_unchecked(1.0 - c / nf)],
                sizes: vec![n as usize],
            },
            PolicySpec::KThreshold { c, rho } => {
                let sizes = phase_sizes(rho, n);
                if sizes.iter().any(|&s| s == 0) {
                    return Err(Error::domain(format!(
                        "a phase fraction in {rho:?} yields zero variables at n = {n}"
                    )));
                }
                Compiled::Thresholds {
                    thetas: c.iter().map(|ci| dist.quantile_unchecked(1.0 - ci / nf)).collect(),
                    sizes,
                }
            }
            PolicySpec::ObserveAndAccept { c, rho } => {
                let observe = floor_frac(*rho, n);
                if observe == 0 {
                    return Err(Error::domain(format!(
                        "observe_and_accept with rho = {rho} observes zero values at n = {n}"
                    )));
                }
                Compiled::ObserveAccept {
                    theta1: dist.quantile_unchecked(1.0 - c / nf),
                    observe,
                }
            }
        })
    }

    /// Play one sequence. `fetch(i)` reveals the 0-based `i`-th value; it is
    /// called for `i = 0, 1, …` strictly in order and never past the
    /// acceptance index, so a lazy sampler can feed it draw by draw.
    pub(crate) fn run<F: FnMut(usize) -> f64>(&self, n: usize, mut fetch: F) -> Outcome {
        match self {
            Compiled::Secretary { observe } => {
                let mut best = f64::NEG_INFINITY;
                for i in 0..*observe {
                    best = best.max(fetch(i));
                }
                for i in *observe..n {
                    let x = fetch(i);
                    if x > best {
                        return Outcome { tau: i + 1, value: x };
                    }
                }
                Outcome { tau: n + 1, value: 0.0 }
            }
            Compiled::Thresholds { thetas, sizes } => {
                let mut i = 0;
                for (theta, &len) in thetas.iter().zip(sizes) {
                    for _ in 0..len {
                        let x = fetch(i);
                        i += 1;
                        if x >= *theta {
                            return Outcome { tau: i, value: x };
                        }
                    }
                }
                Outcome { tau: n + 1, value: 0.0 }
            }
            Compiled::ObserveAccept { theta1, observe } => {
                let mut best = f64::NEG_INFINITY;
                for i in 0..*observe {
                    let x = fetch(i);
                    if x >= *theta1 {
                        return Outcome { tau: i + 1, value: x };
                    }
                    best = best.max(x);
                }
                for i in *observe..n {
                    let x = fetch(i);
                    if x >= best {
                        return Outcome { tau: i + 1, value: x };
                    }
                }
                Outcome { tau: n + 1, value: 0.0 }
            }
        }
    }
}

/// Play `spec` on one explicit sequence of realizations.
pub fn run(spec: &PolicySpec, dist: &Distribution, realizations: &[f64]) -> Result<Outcome> {
    if realizations.is_empty() {
        return Err(Error::domain("realization sequence is empty"));
    }
    if realizations.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::domain("realizations must be finite and nonnegative"));
    }
    let n = u32::try_from(realizations.len())
        .map_err(|_| Error::domain("more than 2^32 realizations"))?;
    let compiled = Compiled::new(spec, dist, n)?;
    Ok(compiled.run(realizations.len(), |i| realizations[i]))
}

/// Exact expected payoff of the single-threshold rule:
///
/// `(1 − (1 − c/n)ⁿ) · (θ + Δ(c)/c)` with `θ = v(1 − c/n)`.
///
/// The acceptance time is geometric at rate `c/n`; conditioned on accepting,
/// the value splits into the threshold plus the mean overshoot `Δ(c)/c`.
pub fn closed_form_single(dist: &Distribution, n: u32, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("horizon n must be ≥ 1"));
    }
    let nf = f64::from(n);
    check_rate(c, nf)?;
    let q = 1.0 - c / nf;
    let theta = dist.quantile_unchecked(q);
    let delta = dist.delta(c, n)?;
    Ok(one_minus_pow(q, n) * (theta + delta / c))
}

/// Exact expected payoff of a multi-phase threshold rule:
///
/// `Σ_ℓ (Π_{z<ℓ} F_z^{m_z}) · (1 − F_ℓ^{m_ℓ}) · (θ_ℓ + Δ(c_ℓ)/c_ℓ)`
///
/// with `F_ℓ = 1 − c_ℓ/n` and phase lengths `m_ℓ` as in the runner. Unlike
/// [`PolicySpec::validate`] this accepts *non-decreasing* (not necessarily
/// strictly increasing) rates — handy for degeneracy checks — but still
/// requires every phase to contain at least one value. Accepts
/// [`PolicySpec::SingleThreshold`] too; the other rules have no closed form
/// (see [`PolicySpec::capability`]) and yield a domain error.
pub fn closed_form_k_threshold(dist: &Distribution, n: u32, spec: &PolicySpec) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("horizon n must be ≥ 1"));
    }
    let nf = f64::from(n);
    let (c, rho): (&[f64], &[f64]) = match spec {
        PolicySpec::SingleThreshold { c } => return closed_form_single(dist, n, *c),
        PolicySpec::KThreshold { c, rho } => (c, rho),
        other => {
            return Err(Error::domain(format!(
                "no closed form for {other:?}; estimate by simulation"
            )))
        }
    };
    if c.is_empty() || c.len() != rho.len() {
        return Err(Error::domain("rate and fraction lists must be non-empty and equal-length"));
    }
    for &ci in c {
        check_rate(ci, nf)?;
    }
    if c.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("rates must be non-decreasing"));
    }
    check_fractions(rho)?;
    if rho.iter().any(|&r| floor_frac(r, n) == 0) {
        return Err(Error::domain(format!("a phase fraction in {rho:?} yields zero variables at n = {n}")));
    }
    let sizes = phase_sizes(rho, n);
    let mut value = 0.0;
    let mut prefix = 1.0; // probability all earlier phases rejected everything
    for (&cl, &ml) in c.iter().zip(&sizes) {
        let q = 1.0 - cl / nf;
        let theta = dist.quantile_unchecked(q);
        let delta = dist.delta(cl, n)?;
        let m = u32::try_from(ml).expect("phase fits u32");
        value += prefix * one_minus_pow(q, m) * (theta + delta / cl);
        prefix *= pow_frac(q, m);
    }
    Ok(value)
}
