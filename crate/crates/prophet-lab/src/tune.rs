//! Parameter search on top of the factor-revealing LPs: coordinate descent
//! for polishing a parameter vector, and the `c`-sweep that traces the
//! observe-and-accept guarantee as a curve in the query rate.
//!
//! Every evaluation is a full build-and-solve of the corresponding LP, so a
//! search result is exactly reproducible: same seed, same config, same
//! numbers, regardless of thread count.

use crate::exec;
use crate::frlp::{FrlpParams, KThresholdLpParams, ObserveAcceptLpParams};
use crate::lp::{solve, LpStatus};
use crate::{fmt, Error, Result};
use serde::{Deserialize, Serialize};

/// Minimum gain for a step to count as an improvement; below this the
/// descent treats values as tied and stays put.
const IMPROVE_TOL: f64 = 1e-12;

/// Coordinate-descent schedule: try `±step` on every coordinate until a
/// full sweep stalls, then halve the step, `halvings` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub initial_step: f64,
    pub halvings: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { initial_step: 0.1, halvings: 5 }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) {
            return Err(Error::domain(format!(
                "initial_step = {} must be positive",
                self.initial_step
            )));
        }
        Ok(())
    }
}

/// One point of the guarantee-vs-rate curve: the best observation fraction
/// found for this `c` and the LP value there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub best_rho: f64,
    pub ratio: f64,
    pub k: usize,
    pub beta_ratio: f64,
}

/// Render sweep rows as CSV with the fixed header
/// `c,best_rho,ratio,k,beta_ratio`, numbers at 6 significant digits.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("c,best_rho,ratio,k,beta_ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt::sig(r.c, 6),
            fmt::sig(r.best_rho, 6),
            fmt::sig(r.ratio, 6),
            r.k,
            fmt::sig(r.beta_ratio, 6)
        ));
    }
    out
}

/// The free coordinates of a parameter vector. For the k-phase family the
/// last phase fraction is not free — it absorbs `1 − Σ` of the others.
fn coordinate_count(params: &FrlpParams) -> usize {
    match params {
        FrlpParams::TwoThreshold(_) => 3,
        FrlpParams::KThreshold(p) => 2 * p.c.len() - 1,
        FrlpParams::ObserveAccept(_) => 2,
    }
}

/// `params` with coordinate `coord` moved by `delta`; `None` if the move is
/// structurally impossible (it may still fail validation, which the caller
/// checks).
fn perturbed(params: &FrlpParams, coord: usize, delta: f64) -> Option<FrlpParams> {
    let mut next = params.clone();
    match &mut next {
        FrlpParams::TwoThreshold(p) => match coord {
            0 => p.c1 += delta,
            1 => p.c2 += delta,
            2 => p.rho += delta,
            _ => return None,
        },
        FrlpParams::KThreshold(p) => {
            let k = p.c.len();
            if coord < k {
                p.c[coord] += delta;
            } else if coord < 2 * k - 1 {
                p.rho[coord - k] += delta;
                let used: f64 = p.rho[..k - 1].iter().sum();
                p.rho[k - 1] = 1.0 - used;
            } else {
                return None;
            }
        }
        FrlpParams::ObserveAccept(p) => match coord {
            0 => p.c += delta,
            1 => p.rho += delta,
            _ => return None,
        },
    }
    Some(next)
}

/// Build and solve; `None` when the parameters don't form a solvable model
/// (invalid combination reached by a step, or a non-optimal status).
fn try_value(params: &FrlpParams) -> Option<f64> {
    let model = params.build().ok()?;
    let sol = solve(&model).ok()?;
    (sol.status == LpStatus::Optimal).then_some(sol.value)
}

/// Polish a parameter vector by coordinate descent on the LP value.
///
/// Starting from `seed` (which must be valid — its value is the floor of
/// the result), each sweep tries `±step` on every free coordinate, keeping
/// strict improvements; when a sweep stalls the step halves. Invalid
/// parameter combinations encountered on the way are skipped, not errors.
pub fn optimize_params(seed: &FrlpParams, search: &SearchConfig) -> Result<(FrlpParams, f64)> {
    search.validate()?;
    seed.validate()?;
    let mut best_value = try_value(seed)
        .ok_or_else(|| Error::model("seed parameters do not yield a solvable model"))?;
    let mut best = seed.clone();
    let coords = coordinate_count(&best);
    let mut step = search.initial_step;
    for _ in 0..=search.halvings {
        loop {
            let mut improved = false;
            for coord in 0..coords {
                for dir in [1.0, -1.0] {
                    let Some(cand) = perturbed(&best, coord, dir * step) else { continue };
                    if cand.validate().is_err() {
                        continue;
                    }
                    let Some(value) = try_value(&cand) else { continue };
                    if value > best_value + IMPROVE_TOL {
                        best_value = value;
                        best = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        step *= 0.5;
    }
    Ok((best, best_value))
}

/// Trace the observe-and-accept guarantee over a list of rates.
///
/// For each `c`, the LP value is maximized over a `rho_grid`-point grid on
/// `[0.01, 1]`. The last grid point is exactly `ρ = 1`, where the rule
/// degenerates to a single quantile threshold: that point is scored by the
/// `k = 1` threshold LP instead of the observe-and-accept builder (whose
/// `ρ < 1` requirement it violates). Ties go to the larger `ρ`. All
/// `(c, ρ)` cells are solved in parallel; rows come back in input order.
pub fn sweep_c(
    c_values: &[f64],
    k: usize,
    beta_ratio: f64,
    rho_grid: usize,
    zeta_grid: usize,
) -> Result<Vec<SweepRow>> {
    if c_values.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::domain("every swept c must be positive and finite"));
    }
    if rho_grid < 2 {
        return Err(Error::domain(format!("rho_grid = {rho_grid} must be ≥ 2")));
    }
    // Validate the family parameters once via a representative build.
    if let Some(&c0) = c_values.first() {
        ObserveAcceptLpParams { c: c0, rho: 0.5, k, beta_ratio, zeta_grid }.validate()?;
    }
    let rho_at = |t: usize| {
        if t == rho_grid - 1 {
            1.0
        } else {
            0.01 + 0.99 * t as f64 / (rho_grid - 1) as f64
        }
    };
    let cells = exec::map_indexed(c_values.len() * rho_grid, |idx| {
        let c = c_values[idx / rho_grid];
        let rho = rho_at(idx % rho_grid);
        let value = if rho == 1.0 {
            try_value(&FrlpParams::KThreshold(KThresholdLpParams {
                c: vec![c],
                rho: vec![1.0],
                zeta_grid: 2,
            }))
        } else {
            try_value(&FrlpParams::ObserveAccept(ObserveAcceptLpParams {
                c,
                rho,
                k,
                beta_ratio,
                zeta_grid,
            }))
        };
        value.unwrap_or(f64::NEG_INFINITY)
    });
    Ok(c_values
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut best_rho = rho_at(0);
            let mut ratio = cells[i * rho_grid];
            for t in 1..rho_grid {
                let v = cells[i * rho_grid + t];
                if v >= ratio {
                    ratio = v;
                    best_rho = rho_at(t);
                }
            }
            SweepRow { c, best_rho, ratio, k, beta_ratio }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frlp::TwoThresholdLpParams;

    fn headline_seed() -> FrlpParams {
        FrlpParams::TwoThreshold(TwoThresholdLpParams {
            c1: 0.7,
            c2: 1.8,
            rho: 0.62,
            zeta_grid: 200,
        })
    }

    #[test]
    fn descent_from_a_rounded_seed_reaches_the_headline_level() {
        let seed = headline_seed();
        let seed_value = try_value(&seed).unwrap();
        // The optimum sits on a curved ridge: with the default schedule the
        // axis-aligned lattice stalls at 0.678594, six millionths shy of the
        // 0.6786 headline (which the LP does reach when evaluated directly
        // at (0.7067, 1.8353, 0.6204)). Three more halvings let the lattice
        // hug the ridge and clear the headline with room to spare.
        let (_, coarse) = optimize_params(&seed, &SearchConfig::default()).unwrap();
        assert!(coarse >= seed_value, "descent lost ground: {coarse} < {seed_value}");
        assert!((coarse - 0.6786).abs() <= 1e-4, "value {coarse}");
        let fine = SearchConfig { initial_step: 0.1, halvings: 8 };
        let (best, value) = optimize_params(&seed, &fine).unwrap();
        assert!(value >= coarse);
        assert!(value >= 0.6786, "value {value}");
        // The polished parameters stay in the same basin.
        if let FrlpParams::TwoThreshold(p) = best {
            assert!((p.c1 - 0.7067).abs() <= 0.1, "{p:?}");
            assert!((p.c2 - 1.8353).abs() <= 0.2, "{p:?}");
            assert!((p.rho - 0.6204).abs() <= 0.1, "{p:?}");
        } else {
            unreachable!("descent changed the family");
        }
    }

    #[test]
    fn single_phase_descent_converges_to_unit_rate() {
        for seed_c in [0.5, 1.6] {
            let seed = FrlpParams::KThreshold(KThresholdLpParams {
                c: vec![seed_c],
                rho: vec![1.0],
                zeta_grid: 2,
            });
            let (best, value) = optimize_params(&seed, &SearchConfig::default()).unwrap();
            let FrlpParams::KThreshold(p) = best else { unreachable!() };
            assert!((p.c[0] - 1.0).abs() <= 0.01, "from {seed_c}: landed at {}", p.c[0]);
            assert!((value - (1.0 - (-1.0f64).exp())).abs() <= 1e-4, "value {value}");
        }
    }

    #[test]
    fn three_phase_descent_holds_the_published_level() {
        let seed = FrlpParams::KThreshold(KThresholdLpParams {
            c: vec![0.7204, 1.7551, 3.2857],
            rho: vec![0.71, 0.195, 0.095],
            zeta_grid: 120,
        });
        let seed_value = try_value(&seed).unwrap();
        // A short schedule keeps this quick; the floor property is what
        // matters.
        let (_, value) =
            optimize_params(&seed, &SearchConfig { initial_step: 0.02, halvings: 2 }).unwrap();
        assert!(value >= seed_value);
        assert!(value >= 0.6883 - 1e-3, "value {value}");
    }

    #[test]
    fn descent_is_reproducible() {
        let seed = FrlpParams::ObserveAccept(ObserveAcceptLpParams {
            c: 0.72941,
            rho: 0.64863,
            k: 5,
            beta_ratio: 1.03,
            zeta_grid: 2,
        });
        let cfg = SearchConfig { initial_step: 0.05, halvings: 2 };
        let (p1, v1) = optimize_params(&seed, &cfg).unwrap();
        let (p2, v2) = optimize_params(&seed, &cfg).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(v1.to_bits(), v2.to_bits());
        assert!(v1 >= try_value(&seed).unwrap());
    }

    #[test]
    fn sweep_scores_large_rates_with_the_degenerate_phase() {
        // β = 1.35 stretches the 8-rung ladder far enough past the base
        // rate for the second phase to matter below c = 1. (At β = 1.03 an
        // 8-rung ladder tops out at 1.27·c and the bound never beats the
        // single threshold, so every row would degenerate to ρ = 1.)
        let rows = sweep_c(&[0.5, 0.72941, 1.5], 8, 1.35, 21, 2).unwrap();
        assert_eq!(rows.len(), 3);
        assert!((rows[0].c - 0.5).abs() <= 1e-15);
        assert!((rows[2].c - 1.5).abs() <= 1e-15);
        // Beyond c = 1 the observation phase only hurts: the best fraction
        // is exactly the ρ = 1 endpoint, scored as a single threshold.
        assert_eq!(rows[2].best_rho, 1.0);
        let single = -(-1.5f64).exp_m1() / 1.5;
        assert!((rows[2].ratio - single).abs() <= 1e-9, "{} vs {single}", rows[2].ratio);
        // Below c = 1 a genuine observation phase wins, and by a margin.
        assert!(rows[1].best_rho < 1.0, "{:?}", rows[1]);
        assert!((rows[1].best_rho - 0.65).abs() <= 0.1, "{:?}", rows[1]);
        let single_there = -(-0.72941f64).exp_m1();
        assert!(rows[1].ratio > single_there, "{:?} vs single {single_there}", rows[1]);
        for r in &rows {
            assert!(r.ratio > 0.4 && r.ratio < 0.75, "{r:?}");
        }
    }

    #[test]
    fn sweep_is_continuous_and_reproducible() {
        let cs: Vec<f64> = (0..7).map(|i| 0.6 + 0.05 * i as f64).collect();
        let rows = sweep_c(&cs, 8, 1.35, 21, 2).unwrap();
        for w in rows.windows(2) {
            assert!(
                (w[1].ratio - w[0].ratio).abs() <= 0.05,
                "jump between {:?} and {:?}",
                w[0],
                w[1]
            );
        }
        let again = sweep_c(&cs, 8, 1.35, 21, 2).unwrap();
        assert_eq!(rows, again);
        assert_eq!(sweep_to_csv(&rows), sweep_to_csv(&again));
    }

    #[test]
    fn sweep_csv_format_is_stable() {
        let rows = vec![SweepRow { c: 0.5, best_rho: 1.0, ratio: 0.517913, k: 8, beta_ratio: 1.03 }];
        assert_eq!(
            sweep_to_csv(&rows),
            "c,best_rho,ratio,k,beta_ratio\n0.500000,1.00000,0.517913,8,1.03000\n"
        );
    }

    #[test]
    fn search_inputs_are_validated() {
        assert!(optimize_params(
            &headline_seed(),
            &SearchConfig { initial_step: 0.0, halvings: 1 }
        )
        .is_err());
        let bad_seed = FrlpParams::TwoThreshold(TwoThresholdLpParams {
            c1: 2.0,
            c2: 1.0,
            rho: 0.5,
            zeta_grid: 10,
        });
        assert!(optimize_params(&bad_seed, &SearchConfig::default()).is_err());
        assert!(sweep_c(&[-1.0], 8, 1.03, 21, 2).is_err());
        assert!(sweep_c(&[1.0], 8, 1.03, 1, 2).is_err());
        assert!(sweep_c(&[1.0], 0, 1.03, 21, 2).is_err());
        assert!(sweep_c(&[], 8, 1.03, 21, 2).unwrap().is_empty());
    }
}
