//! The check suites behind `prophet-lab check`: ten numbered end-to-end
//! checks, each pinning one headline number or cross-cutting guarantee to
//! an explicit window. Every check returns a [`CheckOutcome`] instead of
//! panicking so callers can print a full scoreboard before deciding an
//! exit code; the `acceptance` test target asserts on the same outcomes.
//!
//! The windows are deliberately honest: where a measured value genuinely
//! misses its window, the check reports FAIL with the measurement rather
//! than widening the window to suit.

use std::time::Instant;

use prophet_lab::bounds::{
    adaptive_simpson, grid_maximize, observe_accept_surface, two_threshold_surface,
};
use prophet_lab::dist::{builtin_zoo, Component, Distribution};
use prophet_lab::fmt::sig;
use prophet_lab::frlp::{
    induced_point, FrlpParams, KThresholdLpParams, ObserveAcceptLpParams, TwoThresholdLpParams,
};
use prophet_lab::lp::{check_feasible, solve, LpStatus};
use prophet_lab::policy::{closed_form_k_threshold, PolicySpec};
use prophet_lab::sim::{estimate, estimate_select_max_probability};
use prophet_lab::tune::sweep_c;

/// Result of one numbered check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: usize,
    pub label: &'static str,
    pub pass: bool,
    /// Measured values next to their pinned windows, one line.
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    /// One scoreboard line, e.g. `check  1 PASS  two-threshold LP … [0.02 s]`.
    pub fn line(&self) -> String {
        format!(
            "check {:2} {}  {} — {} [{} s]",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.label,
            self.detail,
            sig(self.seconds, 3),
        )
    }
}

/// Checks 1–6: the headline reproductions (LP optima, bound-surface maxima,
/// sweep crossings).
pub fn reproduce_suite() -> Vec<CheckOutcome> {
    vec![check_1(), check_2(), check_3(), check_4(), check_5(), check_6()]
}

/// Checks 7–10: cross-validation of independent code paths against each
/// other (simulation vs. closed forms, induced points vs. LP feasibility,
/// the secretary baseline, closed form vs. direct integration).
pub fn soundness_suite() -> Vec<CheckOutcome> {
    vec![check_7(), check_8(), check_9(), check_10()]
}

fn outcome(id: usize, label: &'static str, t: Instant, pass: bool, detail: String) -> CheckOutcome {
    CheckOutcome { id, label, pass, detail, seconds: t.elapsed().as_secs_f64() }
}

fn error_outcome(id: usize, label: &'static str, t: Instant, err: String) -> CheckOutcome {
    outcome(id, label, t, false, format!("error: {err}"))
}

fn solved_optimum(params: &FrlpParams) -> Result<f64, String> {
    let model = params.build().map_err(|e| e.to_string())?;
    let sol = solve(&model).map_err(|e| e.to_string())?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        other => Err(format!("solver finished {other:?}")),
    }
}

/// Two-threshold LP at its published parameters: optimum in
/// [0.6786, 0.690] within 5 s.
pub fn check_1() -> CheckOutcome {
    const LABEL: &str = "two-threshold LP at the headline parameters";
    let t = Instant::now();
    let params = FrlpParams::TwoThreshold(TwoThresholdLpParams {
        c1: 0.7067,
        c2: 1.8353,
        rho: 0.6204,
        zeta_grid: 200,
    });
    let value = match solved_optimum(&params) {
        Ok(v) => v,
        Err(e) => return error_outcome(1, LABEL, t, e),
    };
    let seconds = t.elapsed().as_secs_f64();
    let pass = (0.6786..=0.690).contains(&value) && seconds < 5.0;
    outcome(1, LABEL, t, pass, format!("optimum {} vs [0.6786, 0.690], limit 5 s", sig(value, 6)))
}

/// The k-threshold ladder at its published parameters: optima within 1e-3
/// of {0.6786, 0.6883, 0.6946, 0.7004} for k = 2..5, within 30 s total.
pub fn check_2() -> CheckOutcome {
    const LABEL: &str = "k-threshold LP ladder k = 2..5";
    let t = Instant::now();
    let table: [(&[f64], &[f64], f64); 4] = [
        (&[0.7067, 1.8353], &[0.6204, 0.3796], 0.6786),
        (&[0.7204, 1.7551, 3.2857], &[0.71, 0.195, 0.095], 0.6883),
        (&[0.6857, 1.4367, 2.4417, 3.9036], &[0.65, 0.19, 0.10, 0.06], 0.6946),
        (&[0.6561, 1.4082, 2.2735, 3.4423, 4.4783], &[0.64, 0.17, 0.11, 0.06, 0.02], 0.7004),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (c, rho, floor) in table {
        let params = FrlpParams::KThreshold(KThresholdLpParams {
            c: c.to_vec(),
            rho: rho.to_vec(),
            zeta_grid: 200,
        });
        let value = match solved_optimum(&params) {
            Ok(v) => v,
            Err(e) => return error_outcome(2, LABEL, t, e),
        };
        pass &= value >= floor - 1e-3;
        parts.push(format!("k={} {} (floor {})", c.len(), sig(value, 6), floor));
    }
    let seconds = t.elapsed().as_secs_f64();
    pass &= seconds < 30.0;
    outcome(2, LABEL, t, pass, format!("{}; floors − 1e-3, limit 30 s", parts.join(", ")))
}

/// Observe-and-accept LP at its published parameters: optimum within 5e-4
/// of 0.6718, within 120 s.
pub fn check_3() -> CheckOutcome {
    const LABEL: &str = "observe-and-accept LP at the headline parameters";
    let t = Instant::now();
    let params = FrlpParams::ObserveAccept(ObserveAcceptLpParams {
        c: 0.72941,
        rho: 0.64863,
        k: 100,
        beta_ratio: 1.03,
        zeta_grid: 3,
    });
    let value = match solved_optimum(&params) {
        Ok(v) => v,
        Err(e) => return error_outcome(3, LABEL, t, e),
    };
    let seconds = t.elapsed().as_secs_f64();
    let pass = value >= 0.6718 - 5e-4 && seconds < 120.0;
    outcome(3, LABEL, t, pass, format!("optimum {} vs floor 0.6718 − 5e-4, limit 120 s", sig(value, 6)))
}

/// Maximum of the two-threshold upper-bound surface: value in
/// [0.7079, 0.7081] with the argmax within 1e-2 per axis of
/// (0.51904, 2.32059, 0.60473), within 60 s.
pub fn check_4() -> CheckOutcome {
    const LABEL: &str = "two-threshold bound surface maximum";
    let t = Instant::now();
    let r = match grid_maximize(&two_threshold_surface(2000), 200, 3) {
        Ok(r) => r,
        Err(e) => return error_outcome(4, LABEL, t, e.to_string()),
    };
    let seconds = t.elapsed().as_secs_f64();
    let target = [0.51904, 2.32059, 0.60473];
    let close = r.argmax.iter().zip(&target).all(|(a, b)| (a - b).abs() <= 1e-2);
    let pass = (0.7079..=0.7081).contains(&r.value) && close && seconds < 60.0;
    outcome(
        4,
        LABEL,
        t,
        pass,
        format!(
            "value {} vs [0.7079, 0.7081]; argmax ({}, {}, {}) vs (0.51904, 2.32059, 0.60473) ± 0.01, limit 60 s",
            sig(r.value, 6),
            sig(r.argmax[0], 6),
            sig(r.argmax[1], 6),
            sig(r.argmax[2], 6),
        ),
    )
}

/// Maximum of the observe-and-accept upper-bound surface against the quoted
/// window [0.69195, 0.69210] and argmax (0.37476, 0.44799) ± 1e-2, within
/// 10 s. The min of the surface's two caps genuinely tops out at ≈ 0.691445
/// (the quoted 0.69204 is the no-acceptance cap alone at that point), so the
/// value clause reports FAIL with the measurement; the argmax clause holds.
pub fn check_5() -> CheckOutcome {
    const LABEL: &str = "observe-and-accept bound surface maximum";
    let t = Instant::now();
    let r = match grid_maximize(&observe_accept_surface(), 200, 3) {
        Ok(r) => r,
        Err(e) => return error_outcome(5, LABEL, t, e.to_string()),
    };
    let seconds = t.elapsed().as_secs_f64();
    let target = [0.37476, 0.44799];
    let close = r.argmax.iter().zip(&target).all(|(a, b)| (a - b).abs() <= 1e-2);
    let in_window = (0.69195..=0.69210).contains(&r.value);
    let pass = in_window && close && seconds < 10.0;
    let mut detail = format!(
        "value {} vs [0.69195, 0.69210]; argmax ({}, {}) vs (0.37476, 0.44799) ± 0.01, limit 10 s",
        sig(r.value, 6),
        sig(r.argmax[0], 6),
        sig(r.argmax[1], 6),
    );
    if !in_window {
        detail.push_str(
            "; the min of the no-acceptance and rare-spike caps peaks below the window \
             (0.692027 at the quoted argmax is the no-acceptance cap alone)",
        );
    }
    outcome(5, LABEL, t, pass, detail)
}

/// Rate sweep at k = 100, β = 1.03 over c ∈ {0.1, …, 3.0}: ratio above
/// 1 − 1/e on [0.5, 1.0], above 1/e on [0.1, 2.5], and best_rho = 1 beyond
/// c = 1. Three rates sit on or past their lines, so this check reports
/// their measured gaps as FAILs rather than papering over them:
///
/// * c = 1 — the best grid row is the degenerate ρ = 1, whose LP value is
///   1 − 1/e to the last bit at every ζ resolution, so a strict `>` is an
///   exact tie;
/// * c = 2.5 — the ρ = 1 value (1 − e^{−2.5})/2.5 ≈ 0.367166 is already
///   below 1/e ≈ 0.367879 (the crossing sits near c ≈ 2.49);
/// * c = 0.1 — the LP tops out near 0.2349 (ζ-independent: the threshold
///   ladder 1.03^i · c only reaches β ≈ 1.92 while the observation-phase
///   maximum concentrates around β ≈ 1/ρ ≈ 2, so most of its value lies
///   below the lowest modeled threshold and the bound collapses).
pub fn check_6() -> CheckOutcome {
    const LABEL: &str = "rate-sweep crossings at k = 100";
    let t = Instant::now();
    let cs: Vec<f64> = (1..=30).map(|i| f64::from(i) / 10.0).collect();
    let rows = match sweep_c(&cs, 100, 1.03, 101, 3) {
        Ok(r) => r,
        Err(e) => return error_outcome(6, LABEL, t, e.to_string()),
    };
    let one_over_e = (-1.0f64).exp();
    let baseline = 1.0 - one_over_e;
    let mut fails = Vec::new();
    for row in &rows {
        if (0.5..=1.0).contains(&row.c) && !(row.ratio > baseline) {
            let gap = if row.ratio == baseline {
                "exact tie".to_string()
            } else {
                format!("short by {}", sig(baseline - row.ratio, 3))
            };
            fails.push(format!(
                "c {}: ratio {} ≤ 1 − 1/e ({gap})",
                sig(row.c, 3),
                sig(row.ratio, 9),
            ));
        }
        if (0.1..=2.5).contains(&row.c) && !(row.ratio > one_over_e) {
            fails.push(format!(
                "c {}: ratio {} ≤ 1/e (short by {})",
                sig(row.c, 3),
                sig(row.ratio, 9),
                sig(one_over_e - row.ratio, 3),
            ));
        }
        if row.c > 1.0 && row.best_rho != 1.0 {
            fails.push(format!("c {}: best_rho {} ≠ 1", sig(row.c, 3), sig(row.best_rho, 6)));
        }
    }
    let pass = fails.is_empty();
    let detail = if pass {
        "ratio > 1 − 1/e on [0.5, 1.0], > 1/e on [0.1, 2.5], best_rho = 1 beyond c = 1".to_string()
    } else {
        format!("violations: {}", fails.join("; "))
    };
    outcome(6, LABEL, t, pass, detail)
}

/// Ten (policy, distribution) pairs with closed forms: the Monte Carlo mean
/// at 10⁶ trials, n = 1000 must sit within four standard errors of the
/// closed-form value.
pub fn check_7() -> CheckOutcome {
    const LABEL: &str = "simulation matches closed forms on ten pairs";
    let t = Instant::now();
    const N: u32 = 1000;
    const TRIALS: u64 = 1_000_000;
    let dists = match pair_distributions(N) {
        Ok(d) => d,
        Err(e) => return error_outcome(7, LABEL, t, e),
    };
    let [uniform, stairs, d1, d2, d3] = &dists;
    let single = |c: f64| PolicySpec::SingleThreshold { c };
    let k2 = PolicySpec::KThreshold { c: vec![0.7067, 1.8353], rho: vec![0.6204, 0.3796] };
    let k3 =
        PolicySpec::KThreshold { c: vec![0.7204, 1.7551, 3.2857], rho: vec![0.71, 0.195, 0.095] };
    let k2_wide = PolicySpec::KThreshold { c: vec![1.0, 2.0], rho: vec![0.5, 0.5] };
    let pairs: [(&str, PolicySpec, &Distribution); 10] = [
        ("single c=1/uniform", single(1.0), uniform),
        ("single c=0.5/uniform", single(0.5), uniform),
        ("single c=2/stairs", single(2.0), stairs),
        ("single c=1/high-value", single(1.0), d1),
        ("single c=0.8/point-like", single(0.8), d2),
        ("two-phase/uniform", k2.clone(), uniform),
        ("two-phase wide/stairs", k2_wide, stairs),
        ("three-phase/high-value", k3.clone(), d1),
        ("two-phase/two-level", k2, d3),
        ("three-phase/stairs", k3, stairs),
    ];
    let mut worst_sigmas = 0.0f64;
    let mut fails = Vec::new();
    for (i, (name, spec, dist)) in pairs.iter().enumerate() {
        let closed = match closed_form_k_threshold(dist, N, spec) {
            Ok(v) => v,
            Err(e) => return error_outcome(7, LABEL, t, format!("{name}: {e}")),
        };
        let seed = 7101 + i as u64;
        let rep = match estimate(spec, dist, N, TRIALS, seed) {
            Ok(r) => r,
            Err(e) => return error_outcome(7, LABEL, t, format!("{name}: {e}")),
        };
        let sigmas = (rep.alg_mean - closed).abs() / rep.alg_stderr;
        worst_sigmas = worst_sigmas.max(sigmas);
        if sigmas > 4.0 {
            fails.push(format!(
                "{name}: mean {} vs closed {} ({} σ)",
                sig(rep.alg_mean, 9),
                sig(closed, 9),
                sig(sigmas, 3),
            ));
        }
    }
    let pass = fails.is_empty();
    let detail = if pass {
        format!("10 pairs within 4 standard errors (worst {} σ)", sig(worst_sigmas, 3))
    } else {
        format!("violations: {}", fails.join("; "))
    };
    outcome(7, LABEL, t, pass, detail)
}

/// The distributions check 7 pairs with policies. The high-value instance
/// uses a deliberately small spike (M = 50, not the default 10⁶): the spike
/// then lands ≈ 700 times per 10⁶ trials instead of ≈ every 10⁹ trials, so
/// a million-trial mean actually resolves the closed form it is compared to.
fn pair_distributions(n: u32) -> Result<[Distribution; 5], String> {
    let stairs = Distribution::mixture(vec![
        Component { w: 0.5, lo: 0.0, hi: 1.0 },
        Component { w: 0.3, lo: 1.5, hi: 2.0 },
        Component { w: 0.2, lo: 3.0, hi: 3.5 },
    ]);
    let all = [
        Distribution::uniform(0.0, 1.0),
        stairs,
        Distribution::high_value(n, 50.0, 1e-6),
        Distribution::point_like(1e-6),
        Distribution::two_level(n, 1.2, 1e-6),
    ];
    let mut out = Vec::new();
    for d in all {
        out.push(d.map_err(|e| e.to_string())?);
    }
    Ok(out.try_into().expect("five distributions"))
}

/// Every zoo distribution against every LP family at n = 10⁴: the induced
/// point must be feasible and its objective must not undercut the LP
/// optimum (beyond 1e-6).
pub fn check_8() -> CheckOutcome {
    const LABEL: &str = "induced points are feasible across the zoo";
    let t = Instant::now();
    const N: u32 = 10_000;
    let families: [(&str, FrlpParams); 3] = [
        (
            "two-threshold",
            FrlpParams::TwoThreshold(TwoThresholdLpParams {
                c1: 0.7067,
                c2: 1.8353,
                rho: 0.6204,
                zeta_grid: 200,
            }),
        ),
        (
            "k-threshold",
            FrlpParams::KThreshold(KThresholdLpParams {
                c: vec![0.7204, 1.7551, 3.2857],
                rho: vec![0.71, 0.195, 0.095],
                zeta_grid: 120,
            }),
        ),
        (
            "observe-accept",
            FrlpParams::ObserveAccept(ObserveAcceptLpParams {
                c: 0.72941,
                rho: 0.64863,
                k: 10,
                beta_ratio: 1.03,
                zeta_grid: 2,
            }),
        ),
    ];
    let mut fails = Vec::new();
    let mut combos = 0;
    let mut min_margin = f64::INFINITY;
    for (family, params) in &families {
        let model = match params.build() {
            Ok(m) => m,
            Err(e) => return error_outcome(8, LABEL, t, e.to_string()),
        };
        let optimum = match solved_optimum(params) {
            Ok(v) => v,
            Err(e) => return error_outcome(8, LABEL, t, e),
        };
        for (name, dist) in builtin_zoo(N) {
            combos += 1;
            let point = match induced_point(&dist, N, params) {
                Ok(p) => p,
                Err(e) => return error_outcome(8, LABEL, t, format!("{family}/{name}: {e}")),
            };
            let violations = match check_feasible(&model, &point) {
                Ok(v) => v,
                Err(e) => return error_outcome(8, LABEL, t, format!("{family}/{name}: {e}")),
            };
            if let Some(worst) = violations.iter().map(|v| v.slack).reduce(f64::min) {
                fails.push(format!(
                    "{family}/{name}: {} rows violated (worst slack {})",
                    violations.len(),
                    sig(worst, 3),
                ));
            }
            let margin = model.objective_value(&point) - optimum;
            min_margin = min_margin.min(margin);
            if margin < -1e-6 {
                fails.push(format!(
                    "{family}/{name}: objective undercuts the optimum by {}",
                    sig(-margin, 3),
                ));
            }
        }
    }
    let pass = fails.is_empty();
    let detail = if pass {
        format!("{combos} family × distribution combos feasible; min objective margin {}", sig(min_margin, 3))
    } else {
        format!("violations: {}", fails.join("; "))
    };
    outcome(8, LABEL, t, pass, detail)
}

/// The zero-query secretary baseline: Pr[pick the overall max] at n = 200
/// over 10⁶ trials stays within 0.01 of 1/e.
pub fn check_9() -> CheckOutcome {
    const LABEL: &str = "secretary rule picks the maximum often enough";
    let t = Instant::now();
    let dist = match Distribution::uniform(0.0, 1.0) {
        Ok(d) => d,
        Err(e) => return error_outcome(9, LABEL, t, e.to_string()),
    };
    let rep = match estimate_select_max_probability(
        &PolicySpec::SecretaryZeroQuery,
        &dist,
        200,
        1_000_000,
        9001,
    ) {
        Ok(r) => r,
        Err(e) => return error_outcome(9, LABEL, t, e.to_string()),
    };
    let floor = (-1.0f64).exp() - 0.01;
    let pass = rep.p >= floor;
    outcome(
        9,
        LABEL,
        t,
        pass,
        format!("Pr[pick max] {} vs floor 1/e − 0.01 = {} (stderr {})", sig(rep.p, 6), sig(floor, 6), sig(rep.stderr, 3)),
    )
}

/// The closed form against a direct quadrature computation of the same
/// expectation for n ≤ 5 on a two-component mixture: relative gap ≤ 1e-6.
pub fn check_10() -> CheckOutcome {
    const LABEL: &str = "closed form agrees with direct integration";
    let t = Instant::now();
    // Two well-separated pieces, so thresholds land inside both.
    let dist = match Distribution::mixture(vec![
        Component { w: 0.6, lo: 0.0, hi: 0.5 },
        Component { w: 0.4, lo: 0.8, hi: 1.6 },
    ]) {
        Ok(d) => d,
        Err(e) => return error_outcome(10, LABEL, t, e.to_string()),
    };
    let mut worst_rel = 0.0f64;
    for n in 1..=5u32 {
        // A one-value phase breaks the two-phase split at n = 1, so that
        // horizon runs the single-rate rule instead.
        let spec = if n == 1 {
            PolicySpec::KThreshold { c: vec![0.7], rho: vec![1.0] }
        } else {
            PolicySpec::KThreshold { c: vec![0.7, 1.6], rho: vec![0.5, 0.5] }
        };
        let closed = match closed_form_k_threshold(&dist, n, &spec) {
            Ok(v) => v,
            Err(e) => return error_outcome(10, LABEL, t, format!("n={n}: {e}")),
        };
        let direct = match direct_expectation(&dist, n, &spec) {
            Ok(v) => v,
            Err(e) => return error_outcome(10, LABEL, t, format!("n={n}: {e}")),
        };
        worst_rel = worst_rel.max((closed - direct).abs() / direct.abs());
    }
    let pass = worst_rel <= 1e-6;
    outcome(10, LABEL, t, pass, format!("worst relative gap {} over n = 1..5, tolerance 1e-6", sig(worst_rel, 3)))
}

/// The same expectation as the closed form, but from first principles: the
/// value accepted at index `i` contributes `(Π_{j<i} F(θ_{phase(j)})) ·
/// T(θ_{phase(i)})`, with the CDF `F` and the upper partial mean
/// `T(θ) = E[x·1{x ≥ θ}]` both evaluated by quadrature over the density.
/// Phase lengths follow the documented layout: `⌊ρ_ℓ n⌋` each (with the
/// same one-ulp forgiveness), remainder into the last phase.
fn direct_expectation(dist: &Distribution, n: u32, spec: &PolicySpec) -> Result<f64, String> {
    let (c, rho) = match spec {
        PolicySpec::KThreshold { c, rho } => (c, rho),
        other => return Err(format!("no direct form for {other:?}")),
    };
    let k = c.len();
    let mut sizes: Vec<usize> =
        rho.iter().map(|&r| ((r * f64::from(n)) + 1e-9).floor() as usize).collect();
    sizes[k - 1] = n as usize - sizes[..k - 1].iter().sum::<usize>();
    let mut thetas = Vec::with_capacity(k);
    for &cl in c {
        thetas.push(dist.quantile(1.0 - cl / f64::from(n)).map_err(|e| e.to_string())?);
    }

    let cdf_at = |theta: f64| -> f64 {
        dist.components()
            .iter()
            .map(|comp| {
                let hi = comp.hi.min(theta);
                if hi <= comp.lo {
                    0.0
                } else {
                    adaptive_simpson(|x| dist.pdf(x), comp.lo, hi, 1e-12)
                }
            })
            .sum()
    };
    let upper_mean = |theta: f64| -> f64 {
        dist.components()
            .iter()
            .map(|comp| {
                let lo = comp.lo.max(theta);
                if comp.hi <= lo {
                    0.0
                } else {
                    adaptive_simpson(|x| x * dist.pdf(x), lo, comp.hi, 1e-12)
                }
            })
            .sum()
    };

    let mut expectation = 0.0;
    let mut keep_going = 1.0; // probability every earlier index was rejected
    let mut index = 0usize;
    for (phase, &m) in sizes.iter().enumerate() {
        for _ in 0..m {
            expectation += keep_going * upper_mean(thetas[phase]);
            keep_going *= cdf_at(thetas[phase]);
            index += 1;
        }
    }
    debug_assert_eq!(index, n as usize);
    Ok(expectation)
}
