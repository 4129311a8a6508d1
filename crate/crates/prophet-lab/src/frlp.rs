//! Factor-revealing LPs: each model's optimum is a competitive-ratio lower
//! bound valid for *every* distribution, because any distribution plugs into
//! the variables as a feasible point whose objective is (asymptotically) the
//! rule's ratio on that distribution.
//!
//! Three families share one anatomy. Normalizing OPT = 1, the variables are
//! the thresholds (as values), the overshoot masses `Δ`, and the slices
//! `δ_ℓ = ∫ Pr[max ≥ t] dt` between consecutive thresholds. The objective is
//! the rule's expected payoff; the constraints are the facts every
//! distribution obeys:
//!
//! * the prophet's payoff decomposes below the lowest threshold, across the
//!   gaps, and into the top overshoot — the "OPT row";
//! * each slice is at most its gap width times the top acceptance
//!   probability, and at most the overshoot difference across the gap;
//! * a one-parameter family of sharper cuts indexed by `ζ` inside each gap,
//!   linearizing the trade-off between the two (sampled on a finite grid —
//!   see [`induced_point`] for why any finite subset stays sound).
//!
//! [`build_k_threshold`] covers the blind multi-phase rule (and its `k = 2`
//! special case [`build_two_threshold`], the headline bound);
//! [`build_observe_accept`] covers the rule whose second phase uses the
//! observed maximum, with a geometric ladder `β_i = ratio^i · c` splitting
//! the top of the distribution.

use crate::dist::Distribution;
use crate::lp::{LpModel, Relation};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default interior-`ζ` samples per gap for the small-`k` families.
pub const DEFAULT_ZETA_GRID: usize = 200;

/// Default interior-`ζ` samples per gap for the observe-and-accept family,
/// whose gaps are numerous and narrow (the ladder grows by 3% per rung).
pub const DEFAULT_OA_ZETA_GRID: usize = 3;

fn default_zeta() -> usize {
    DEFAULT_ZETA_GRID
}

fn default_oa_zeta() -> usize {
    DEFAULT_OA_ZETA_GRID
}

/// Parameters of the two-threshold LP: acceptance rates `c1 < c2`, phase
/// split `rho`, and the interior sample count for the `ζ` cut family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoThresholdLpParams {
    pub c1: f64,
    pub c2: f64,
    pub rho: f64,
    #[serde(default = "default_zeta")]
    pub zeta_grid: usize,
}

/// Parameters of the k-phase threshold LP: strictly increasing rates and
/// positive phase fractions summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KThresholdLpParams {
    pub c: Vec<f64>,
    pub rho: Vec<f64>,
    #[serde(default = "default_zeta")]
    pub zeta_grid: usize,
}

/// Parameters of the observe-and-accept LP: base rate `c`, observation
/// fraction `rho`, ladder length `k`, and the geometric growth factor of the
/// ladder `β_i = beta_ratio^i · c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserveAcceptLpParams {
    pub c: f64,
    pub rho: f64,
    pub k: usize,
    pub beta_ratio: f64,
    #[serde(default = "default_oa_zeta")]
    pub zeta_grid: usize,
}

/// Any of the three LP families, tagged for JSON configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrlpParams {
    TwoThreshold(TwoThresholdLpParams),
    KThreshold(KThresholdLpParams),
    ObserveAccept(ObserveAcceptLpParams),
}

impl TwoThresholdLpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1.is_finite() && self.c2.is_finite() && 0.0 < self.c1 && self.c1 < self.c2) {
            return Err(Error::domain(format!(
                "rates must satisfy 0 < c1 < c2, got ({}, {})",
                self.c1, self.c2
            )));
        }
        if !(self.rho.is_finite() && 0.0 < self.rho && self.rho < 1.0) {
            return Err(Error::domain(format!("rho = {} must lie in (0, 1)", self.rho)));
        }
        check_zeta(self.zeta_grid)
    }
}

impl KThresholdLpParams {
    pub fn validate(&self) -> Result<()> {
        if self.c.is_empty() {
            return Err(Error::domain("need at least one rate"));
        }
        if self.c.len() != self.rho.len() {
            return Err(Error::domain(format!(
                "{} rates but {} phase fractions",
                self.c.len(),
                self.rho.len()
            )));
        }
        if self.c.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::domain("rates must be positive and finite"));
        }
        if self.c.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("rates must be strictly increasing"));
        }
        if self.rho.iter().any(|r| !(r.is_finite() && *r > 0.0 && *r <= 1.0)) {
            return Err(Error::domain("phase fractions must lie in (0, 1]"));
        }
        let total: f64 = self.rho.iter().sum();
        if (total - 1.0).abs() > crate::policy::RHO_SUM_TOL {
            return Err(Error::domain(format!("phase fractions sum to {total}, expected 1")));
        }
        if self.c.len() >= 2 {
            check_zeta(self.zeta_grid)?;
        }
        Ok(())
    }
}

impl ObserveAcceptLpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::domain(format!("rate c = {} must be positive", self.c)));
        }
        if !(self.rho.is_finite() && 0.0 < self.rho && self.rho < 1.0) {
            return Err(Error::domain(format!("rho = {} must lie in (0, 1)", self.rho)));
        }
        if self.k == 0 {
            return Err(Error::domain("ladder length k must be ≥ 1"));
        }
        if !(self.beta_ratio.is_finite() && self.beta_ratio > 1.0) {
            return Err(Error::domain(format!(
                "beta_ratio = {} must exceed 1 (the ladder must strictly grow)",
                self.beta_ratio
            )));
        }
        check_zeta(self.zeta_grid)
    }

    /// The ladder `β_0 .. β_k`.
    pub fn betas(&self) -> Vec<f64> {
        (0..=self.k).map(|i| self.beta_ratio.powi(i as i32) * self.c).collect()
    }
}

fn check_zeta(zeta_grid: usize) -> Result<()> {
    if zeta_grid < 2 {
        return Err(Error::domain(format!("zeta_grid = {zeta_grid} must be ≥ 2")));
    }
    Ok(())
}

impl FrlpParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            FrlpParams::TwoThreshold(p) => p.validate(),
            FrlpParams::KThreshold(p) => p.validate(),
            FrlpParams::ObserveAccept(p) => p.validate(),
        }
    }

    pub fn build(&self) -> Result<LpModel> {
        match self {
            FrlpParams::TwoThreshold(p) => build_two_threshold(p),
            FrlpParams::KThreshold(p) => build_k_threshold(p),
            FrlpParams::ObserveAccept(p) => build_observe_accept(p),
        }
    }
}

/// Interior `ζ` samples for one gap: `z` evenly spaced points strictly
/// inside `(lo, hi)`. Both endpoints are excluded — at `lo` the cut is
/// dominated by the plain gap cuts, and at `hi` the `γ` denominator
/// vanishes.
fn zeta_samples(lo: f64, hi: f64, z: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (z + 1) as f64;
    (1..=z).map(move |t| lo + step * t as f64)
}

/// Append the three-cut family for one gap: slice variable `d`, value drop
/// `hi_var − lo_var` (upper threshold minus lower), overshoot rise
/// `up_delta − lo_delta`, over the rate interval `(c_lo, c_hi)`.
///
/// Cuts: `δ ≤ drop·(1 − e^{−c_hi})`, `δ ≤ rise`, and for each sampled `ζ`:
/// `γδ ≤ rise − (c_lo − γ(1 − e^{−ζ}))·drop` with
/// `γ = (ζ − c_lo)/(e^{−ζ} − e^{−c_hi})`.
#[allow(clippy::too_many_arguments)]
fn push_gap_cuts(
    model: &mut LpModel,
    n_vars: usize,
    d: usize,
    theta_hi: usize,
    theta_lo: usize,
    delta_lo: usize,
    delta_hi: usize,
    c_lo: f64,
    c_hi: f64,
    z: usize,
) {
    let mut row = vec![0.0; n_vars];
    row[d] = 1.0;
    row[theta_hi] = -(-(-c_hi).exp_m1()); // −(1 − e^{−c_hi})
    row[theta_lo] = -row[theta_hi];
    model.push(row, Relation::Le, 0.0);

    let mut row = vec![0.0; n_vars];
    row[d] = 1.0;
    row[delta_hi] = -1.0;
    row[delta_lo] = 1.0;
    model.push(row, Relation::Le, 0.0);

    for zeta in zeta_samples(c_lo, c_hi, z) {
        let gamma = (zeta - c_lo) / ((-zeta).exp() - (-c_hi).exp());
        let drop_coeff = c_lo - gamma * (-(-zeta).exp_m1());
        let mut row = vec![0.0; n_vars];
        row[d] = gamma;
        row[delta_hi] = -1.0;
        row[delta_lo] = 1.0;
        row[theta_hi] = drop_coeff;
        row[theta_lo] = -drop_coeff;
        model.push(row, Relation::Le, 0.0);
    }
}

/// The two-threshold LP — the `k = 2` instance of [`build_k_threshold`],
/// spelled out: minimize
/// `(1−e^{−ρc₁})(θ₁+Δ₁/c₁) + e^{−ρc₁}(1−e^{−(1−ρ)c₂})(θ₂+Δ₂/c₂)` over
/// `θ₁ ≥ θ₂ ≥ 0` subject to the OPT row `θ₂ + δ + Δ₁ ≥ 1` and the gap cuts.
pub fn build_two_threshold(p: &TwoThresholdLpParams) -> Result<LpModel> {
    p.validate()?;
    build_k_threshold(&KThresholdLpParams {
        c: vec![p.c1, p.c2],
        rho: vec![p.rho, 1.0 - p.rho],
        zeta_grid: p.zeta_grid,
    })
}

/// The k-phase threshold LP. Variables `θ_1..θ_k, Δ_1..Δ_k, δ_1..δ_{k−1}`;
/// minimize `Σ_ℓ e^{−Σ_{z<ℓ}ρ_z c_z}(1−e^{−ρ_ℓ c_ℓ})(θ_ℓ + Δ_ℓ/c_ℓ)`
/// subject to the threshold chain, the OPT row `θ_k + Σδ_ℓ + Δ_1 ≥ 1`, and
/// per-gap cuts. With `k = 1` this degenerates to
/// `min (1−e^{−c})(θ + Δ/c)` s.t. `θ + Δ ≥ 1`, whose optimum is
/// `(1−e^{−c})·min(1, 1/c)`.
pub fn build_k_threshold(p: &KThresholdLpParams) -> Result<LpModel> {
    p.validate()?;
    let k = p.c.len();
    let nv = 3 * k - 1;
    let theta = |l: usize| l; // 0-based phase index
    let delta_up = |l: usize| k + l;
    let slice = |l: usize| 2 * k + l;

    let mut names: Vec<String> = (1..=k).map(|l| format!("theta{l}")).collect();
    names.extend((1..=k).map(|l| format!("Delta{l}")));
    names.extend((1..k).map(|l| format!("delta{l}")));
    let mut model = LpModel::new(names);

    let mut objective = vec![0.0; nv];
    let mut spent = 0.0_f64; // Σ_{z<ℓ} ρ_z c_z
    for l in 0..k {
        let reach = (-spent).exp();
        let accept = -(-(p.rho[l] * p.c[l])).exp_m1();
        objective[theta(l)] = reach * accept;
        objective[delta_up(l)] = reach * accept / p.c[l];
        spent += p.rho[l] * p.c[l];
    }
    model.minimize(objective);

    for l in 0..k - 1 {
        let mut row = vec![0.0; nv];
        row[theta(l)] = 1.0;
        row[theta(l + 1)] = -1.0;
        model.push(row, Relation::Ge, 0.0);
    }

    let mut opt_row = vec![0.0; nv];
    opt_row[theta(k - 1)] = 1.0;
    opt_row[delta_up(0)] = 1.0;
    for l in 0..k - 1 {
        opt_row[slice(l)] = 1.0;
    }
    model.push(opt_row, Relation::Ge, 1.0);

    for l in 0..k - 1 {
        push_gap_cuts(
            &mut model,
            nv,
            slice(l),
            theta(l),
            theta(l + 1),
            delta_up(l),
            delta_up(l + 1),
            p.c[l],
            p.c[l + 1],
            p.zeta_grid,
        );
    }
    Ok(model)
}

/// The observe-and-accept LP over the ladder `β_i = beta_ratio^i · c`.
///
/// Variables `Λ₁, Λ₂, v_0..v_k, Δ_0..Δ_k, δ_0..δ_{k−1}`; minimize `Λ₁+Λ₂`
/// where the two payoff rows charge the quantile phase
/// (`Λ₁ ≥ (1−e^{−β₀ρ})(v₀+Δ₀/β₀)`) and the observation phase
/// (`Λ₂ ≥ Σ_{i=1}^k (e^{−β_{i−1}ρ}−e^{−β_iρ})(1−e^{−β_i(1−ρ)})
/// ((β_{i−1}/β_i)v_i + Δ_{i−1}/β_i)`), subject to the value chain, the OPT
/// row `v_k + Σδ_i + Δ₀ ≥ 1`, and the same gap cuts as the threshold family
/// over each `(β_i, β_{i+1})`.
pub fn build_observe_accept(p: &ObserveAcceptLpParams) -> Result<LpModel> {
    p.validate()?;
    let k = p.k;
    let betas = p.betas();
    let nv = 3 * k + 4;
    let (lam1, lam2) = (0usize, 1usize);
    let v = |i: usize| 2 + i;
    let delta_up = |i: usize| 2 + (k + 1) + i;
    let slice = |i: usize| 2 + 2 * (k + 1) + i;

    let mut names = vec!["Lambda1".to_string(), "Lambda2".to_string()];
    names.extend((0..=k).map(|i| format!("v{i}")));
    names.extend((0..=k).map(|i| format!("Delta{i}")));
    names.extend((0..k).map(|i| format!("delta{i}")));
    let mut model = LpModel::new(names);

    let mut objective = vec![0.0; nv];
    objective[lam1] = 1.0;
    objective[lam2] = 1.0;
    model.minimize(objective);

    // Λ₁ covers the quantile phase's payoff.
    let a0 = -(-(betas[0] * p.rho)).exp_m1();
    let mut row = vec![0.0; nv];
    row[lam1] = 1.0;
    row[v(0)] = -a0;
    row[delta_up(0)] = -a0 / betas[0];
    model.push(row, Relation::Ge, 0.0);

    // Λ₂ covers the observation phase, split by which ladder rung the
    // observed maximum landed on.
    let mut row = vec![0.0; nv];
    row[lam2] = 1.0;
    for i in 1..=k {
        let land = (-(betas[i - 1] * p.rho)).exp() - (-(betas[i] * p.rho)).exp();
        let accept = -(-(betas[i] * (1.0 - p.rho))).exp_m1();
        let w = land * accept;
        row[v(i)] -= w * betas[i - 1] / betas[i];
        row[delta_up(i - 1)] -= w / betas[i];
    }
    model.push(row, Relation::Ge, 0.0);

    for i in 0..k {
        let mut row = vec![0.0; nv];
        row[v(i)] = 1.0;
        row[v(i + 1)] = -1.0;
        model.push(row, Relation::Ge, 0.0);
    }

    let mut opt_row = vec![0.0; nv];
    opt_row[v(k)] = 1.0;
    opt_row[delta_up(0)] = 1.0;
    for i in 0..k {
        opt_row[slice(i)] = 1.0;
    }
    model.push(opt_row, Relation::Ge, 1.0);

    for i in 0..k {
        push_gap_cuts(
            &mut model,
            nv,
            slice(i),
            v(i),
            v(i + 1),
            delta_up(i),
            delta_up(i + 1),
            betas[i],
            betas[i + 1],
            p.zeta_grid,
        );
    }
    Ok(model)
}

/// The feasible point a concrete distribution induces in an LP family at
/// horizon `n`, normalized so OPT = 1:
///
/// * thresholds/values — the quantiles `v(1 − rate/n)`,
/// * `Δ` — the exact overshoot masses [`Distribution::delta`],
/// * slices — exact integrals of `Pr[max ≥ t]` across each gap,
/// * `Λ₁, Λ₂` (observe-and-accept only) — their constraint rows evaluated
///   at the induced values, i.e. set tight.
///
/// Everything is divided by `expected_max(n)`. The point is exactly feasible
/// for the OPT row and chains at any `n`; the exponential-coefficient cuts
/// hold up to `O(1/n)` effects, comfortably inside the solver's feasibility
/// tolerance from `n ≈ 10⁴` on.
pub fn induced_point(dist: &Distribution, n: u32, params: &FrlpParams) -> Result<Vec<f64>> {
    params.validate()?;
    match params {
        FrlpParams::TwoThreshold(p) => induced_threshold_point(dist, n, &[p.c1, p.c2]),
        FrlpParams::KThreshold(p) => induced_threshold_point(dist, n, &p.c),
        FrlpParams::ObserveAccept(p) => {
            let betas = p.betas();
            let (values, overshoots, slices) = induced_raw(dist, n, &betas)?;
            let opt = dist.expected_max(n);
            let k = p.k;
            let mut point = Vec::with_capacity(3 * k + 4);
            let a0 = -(-(betas[0] * p.rho)).exp_m1();
            let lam1 = a0 * (values[0] + overshoots[0] / betas[0]);
            let mut lam2 = 0.0;
            for i in 1..=k {
                let land = (-(betas[i - 1] * p.rho)).exp() - (-(betas[i] * p.rho)).exp();
                let accept = -(-(betas[i] * (1.0 - p.rho))).exp_m1();
                lam2 += land
                    * accept
                    * (betas[i - 1] / betas[i] * values[i] + overshoots[i - 1] / betas[i]);
            }
            point.push(lam1 / opt);
            point.push(lam2 / opt);
            point.extend(values.iter().map(|x| x / opt));
            point.extend(overshoots.iter().map(|x| x / opt));
            point.extend(slices.iter().map(|x| x / opt));
            Ok(point)
        }
    }
}

fn induced_threshold_point(dist: &Distribution, n: u32, c: &[f64]) -> Result<Vec<f64>> {
    let (values, overshoots, slices) = induced_raw(dist, n, c)?;
    let opt = dist.expected_max(n);
    let mut point = Vec::with_capacity(3 * c.len() - 1);
    point.extend(values.iter().map(|x| x / opt));
    point.extend(overshoots.iter().map(|x| x / opt));
    point.extend(slices.iter().map(|x| x / opt));
    Ok(point)
}

/// Unnormalized quantiles, overshoot masses, and inter-threshold slices of
/// `Pr[max of n ≥ t]` for a ladder of rates.
fn induced_raw(
    dist: &Distribution,
    n: u32,
    rates: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let nf = f64::from(n);
    if let Some(bad) = rates.iter().find(|r| **r > nf) {
        return Err(Error::domain(format!(
            "rate {bad} exceeds n = {n}; the quantile 1 − rate/n is undefined"
        )));
    }
    let values: Vec<f64> = rates.iter().map(|r| dist.quantile_unchecked(1.0 - r / nf)).collect();
    let overshoots: Vec<f64> =
        rates.iter().map(|r| dist.delta(*r, n)).collect::<Result<_>>()?;
    let slices: Vec<f64> = values
        .windows(2)
        .map(|w| dist.upper_tail_integral(n, w[1], w[0]))
        .collect();
    Ok((values, overshoots, slices))
}
