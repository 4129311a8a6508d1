//! Dense two-phase primal simplex with deterministic pivoting.
//!
//! The factor-revealing programs this crate builds are small (hundreds of
//! rows) but numerically nasty: secant-slope coefficients spanning eleven
//! orders of magnitude share rows with probabilities near one. The solver
//! therefore keeps the whole tableau dense, equilibrates every row by its
//! largest structural coefficient, enters the most-negative-reduced-cost
//! column with a Bland fallback after degenerate runs (the phase driver
//! explains why this cannot cycle), and breaks near-ties in the ratio test
//! toward the largest pivot element so no row is ever divided by a
//! coefficient at the edge of the pivot tolerance. Every choice is a pure
//! function of the model, so a solve is reproducible to the bit across
//! runs, thread counts, and machines with the same floating-point behavior.
//!
//! Duals come for free: the phase-2 cost row is carried through every pivot
//! with artificial columns kept at cost zero, so at optimality the reduced
//! cost of each row's auxiliary column reads off that row's multiplier.

use crate::{Error, Result};
use serde::Serialize;

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

/// One linear constraint `coeffs · x  rel  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

/// A minimization LP over named variables with per-variable lower bounds
/// (zero by default; no upper bounds — the models that need them encode them
/// as rows).
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub names: Vec<String>,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<f64>,
}

impl LpModel {
    pub fn new(names: Vec<String>) -> Self {
        let n = names.len();
        LpModel { names, objective: vec![0.0; n], constraints: Vec::new(), lower_bounds: vec![0.0; n] }
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn minimize(&mut self, objective: Vec<f64>) {
        self.objective = objective;
    }

    pub fn push(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    /// `objective · point` (no lower-bound shift — point is in original
    /// coordinates).
    pub fn objective_value(&self, point: &[f64]) -> f64 {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if n == 0 {
            return Err(Error::model("model has no variables"));
        }
        if self.objective.len() != n || self.lower_bounds.len() != n {
            return Err(Error::model(format!(
                "objective/bounds length {}/{} != {} variables",
                self.objective.len(),
                self.lower_bounds.len(),
                n
            )));
        }
        let mut sorted = self.names.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::model("duplicate variable names"));
        }
        if !self.objective.iter().chain(&self.lower_bounds).all(|v| v.is_finite()) {
            return Err(Error::model("non-finite objective or bound"));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::model(format!("constraint {i} has {} coefficients, expected {n}", c.coeffs.len())));
            }
            if !c.coeffs.iter().all(|v| v.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::model(format!("constraint {i} has a non-finite entry")));
            }
        }
        Ok(())
    }

    /// Plain-text rendering: header with variable names, the objective, one
    /// constraint per line, and any nonzero lower bounds. Coefficients print
    /// with shortest-round-trip formatting so the dump can be diffed against
    /// an external solver's input exactly.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str("vars:");
        for n in &self.names {
            out.push(' ');
            out.push_str(n);
        }
        out.push('\n');
        out.push_str("min ");
        out.push_str(&linear_expr(&self.objective, &self.names));
        out.push('\n');
        for c in &self.constraints {
            out.push_str(&linear_expr(&c.coeffs, &self.names));
            out.push(' ');
            out.push_str(c.rel.symbol());
            out.push(' ');
            out.push_str(&format!("{}\n", c.rhs));
        }
        for (j, &l) in self.lower_bounds.iter().enumerate() {
            if l != 0.0 {
                out.push_str(&format!("{} >= {}\n", self.names[j], l));
            }
        }
        out
    }
}

fn linear_expr(coeffs: &[f64], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if *c == 0.0 {
            continue;
        }
        if out.is_empty() {
            out.push_str(&format!("{c}*{name}"));
        } else if *c < 0.0 {
            out.push_str(&format!(" - {}*{name}", -c));
        } else {
            out.push_str(&format!(" + {c}*{name}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Solve outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver result. `value` is `+∞` for infeasible and `-∞` for unbounded
/// models (the conventions that make "add a constraint never decreases the
/// optimum" hold unconditionally). `dual` holds one multiplier per
/// constraint row: `value = Σ dual[i]·rhs[i]` at optimality (for models with
/// zero lower bounds), with `≥` rows yielding nonnegative and `≤` rows
/// nonpositive multipliers under minimization.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub point: Vec<f64>,
    pub dual: Vec<f64>,
    pub iterations: usize,
}

/// Entering threshold and smallest admissible pivot element.
pub const PIVOT_TOL: f64 = 1e-10;
/// Constraint satisfaction tolerance (scaled rows inside the solver,
/// absolute in [`check_feasible`]).
pub const FEAS_TOL: f64 = 1e-8;

enum Aux {
    Slack(usize),
    Surplus(usize, usize), // surplus column, artificial column
    Artificial(usize),
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    cost1: Vec<f64>,
    cost2: Vec<f64>,
    basis: Vec<usize>,
    rhs_col: usize,
    iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, jc: usize) {
        let mut pr = std::mem::take(&mut self.rows[r]);
        let inv = 1.0 / pr[jc];
        for v in pr.iter_mut() {
            *v *= inv;
        }
        pr[jc] = 1.0;
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[jc];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pr) {
                    *x -= f * p;
                }
                row[jc] = 0.0;
            }
        }
        for cost in [&mut self.cost1, &mut self.cost2] {
            let f = cost[jc];
            if f != 0.0 {
                for (x, p) in cost.iter_mut().zip(&pr) {
                    *x -= f * p;
                }
                cost[jc] = 0.0;
            }
        }
        self.rows[r] = pr;
        self.basis[r] = jc;
        self.iterations += 1;
    }

    /// Run one phase to optimality. Returns `false` if an unbounded
    /// direction was found instead.
    ///
    /// Column choice is a deterministic hybrid. Dantzig's rule (most
    /// negative reduced cost) makes fast progress but can cycle on the
    /// degenerate vertices these LPs are full of; Bland's rule cannot
    /// cycle but creeps through low-index columns — on the larger
    /// observe-and-accept models it needs upwards of 10⁵ pivots. So the
    /// phase takes Dantzig steps while the objective moves and switches to
    /// Bland's rule after a run of degenerate (zero-step) pivots, returning
    /// to Dantzig once the objective moves again. Any infinite tail would
    /// have to be all-degenerate, hence eventually all-Bland, which cannot
    /// cycle — termination stays guaranteed, and both rules are
    /// deterministic, so a given model still sees a bit-identical pivot
    /// sequence.
    fn run_phase(&mut self, phase_one: bool, enter_limit: usize, max_iter: usize) -> Result<bool> {
        let stall_limit = self.rows.len().max(16);
        let mut stalled = 0usize;
        loop {
            let bland = stalled >= stall_limit;
            let cost = if phase_one { &self.cost1 } else { &self.cost2 };
            let jc = if bland {
                (0..enter_limit).find(|&j| cost[j] < -PIVOT_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..enter_limit {
                    if cost[j] < -PIVOT_TOL && best.is_none_or(|(_, c)| cost[j] < c) {
                        best = Some((j, cost[j]));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(jc) = jc else {
                return Ok(true);
            };
            // Ratio test. Float dirt can push a basic rhs a hair negative;
            // clamping it to zero turns what would be a tiny *negative*
            // step (and a slow corruption of the tableau) into a plain
            // degenerate pivot.
            let ratio_of = |row: &[f64]| row[self.rhs_col].max(0.0) / row[jc];
            let mut min_ratio = f64::INFINITY;
            for row in &self.rows {
                if row[jc] > PIVOT_TOL {
                    min_ratio = min_ratio.min(ratio_of(row));
                }
            }
            if min_ratio.is_infinite() {
                return Ok(false);
            }
            // Among the rows at the minimum ratio, prefer the largest pivot
            // element — dividing a row by a near-tolerance pivot amplifies
            // noise by ten orders of magnitude and wrecks the tableau. In
            // Bland mode the tie must instead go to the smallest basic
            // variable, which is what makes cycling impossible; stability
            // is the normal mode's job.
            let slack = if bland { 0.0 } else { 1e-9 * (1.0 + min_ratio) };
            let mut r_best: Option<usize> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[jc] > PIVOT_TOL && ratio_of(row) <= min_ratio + slack {
                    let better = match r_best {
                        None => true,
                        Some(rb) => {
                            if bland {
                                self.basis[i] < self.basis[rb]
                            } else {
                                let prev = self.rows[rb][jc];
                                row[jc] > prev
                                    || (row[jc] == prev && self.basis[i] < self.basis[rb])
                            }
                        }
                    };
                    if better {
                        r_best = Some(i);
                    }
                }
            }
            let r = r_best.expect("a row attains the minimum ratio");
            let step = ratio_of(&self.rows[r]);
            self.pivot(r, jc);
            stalled = if step > 0.0 { 0 } else { stalled + 1 };
            if self.iterations > max_iter {
                return Err(Error::model(format!(
                    "simplex exceeded {max_iter} pivots; model may be numerically degenerate"
                )));
            }
        }
    }
}

/// Minimize the model. See [`LpSolution`] for conventions.
pub fn solve(model: &LpModel) -> Result<LpSolution> {
    model.validate()?;
    let n = model.n_vars();
    let m = model.constraints.len();
    let shift_const: f64 = model
        .objective
        .iter()
        .zip(&model.lower_bounds)
        .map(|(c, l)| c * l)
        .sum();

    // Standardize: substitute x = lb + x̂ (x̂ ≥ 0), force b ≥ 0, turn
    // `≥ 0` rows into `≤ 0`, and equilibrate each row by its largest
    // structural coefficient. `sign` and `scale` undo this for the duals.
    struct StdRow {
        a: Vec<f64>,
        rel: Relation,
        b: f64,
        sign: f64,
        scale: f64,
    }
    let mut std_rows: Vec<StdRow> = Vec::with_capacity(m);
    for c in &model.constraints {
        let mut a = c.coeffs.clone();
        let mut b = c.rhs
            - a.iter()
                .zip(&model.lower_bounds)
                .map(|(v, l)| v * l)
                .sum::<f64>();
        let mut rel = c.rel;
        let mut sign = 1.0;
        let flip = |rel: Relation| match rel {
            Relation::Ge => Relation::Le,
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
        };
        if b < 0.0 {
            sign = -1.0;
            b = -b;
            rel = flip(rel);
        }
        if rel == Relation::Ge && b == 0.0 {
            // A homogeneous ≥ row needs no artificial once written as ≤.
            sign = -sign;
            rel = Relation::Le;
        }
        if sign < 0.0 {
            for v in a.iter_mut() {
                *v = -*v;
            }
        }
        let amax = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let scale = if amax > 0.0 { amax } else { 1.0 };
        for v in a.iter_mut() {
            *v /= scale;
        }
        b /= scale;
        std_rows.push(StdRow { a, rel, b, sign, scale });
    }

    // Column layout: structural, then one slack/surplus per row in row
    // order, then artificials last so phase 2 can simply refuse to let them
    // re-enter.
    let mut aux: Vec<Aux> = Vec::with_capacity(m);
    let mut next = n;
    for r in &std_rows {
        match r.rel {
            Relation::Le | Relation::Ge => {
                aux.push(if r.rel == Relation::Le {
                    Aux::Slack(next)
                } else {
                    Aux::Surplus(next, usize::MAX) // artificial assigned below
                });
                next += 1;
            }
            Relation::Eq => aux.push(Aux::Artificial(usize::MAX)),
        }
    }
    let enter_limit = next;
    for a in aux.iter_mut() {
        match a {
            Aux::Surplus(_, art) | Aux::Artificial(art) => {
                *art = next;
                next += 1;
            }
            Aux::Slack(_) => {}
        }
    }
    let ncols = next;
    let n_art = ncols - enter_limit;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        cost1: vec![0.0; ncols + 1],
        cost2: vec![0.0; ncols + 1],
        basis: vec![0; m],
        rhs_col: ncols,
        iterations: 0,
    };
    for (i, r) in std_rows.iter().enumerate() {
        let mut row = vec![0.0; ncols + 1];
        row[..n].copy_from_slice(&r.a);
        row[ncols] = r.b;
        match aux[i] {
            Aux::Slack(s) => {
                row[s] = 1.0;
                tab.basis[i] = s;
            }
            Aux::Surplus(s, art) => {
                row[s] = -1.0;
                row[art] = 1.0;
                tab.basis[i] = art;
            }
            Aux::Artificial(art) => {
                row[art] = 1.0;
                tab.basis[i] = art;
            }
        }
        tab.rows.push(row);
    }
    tab.cost2[..n].copy_from_slice(&model.objective);
    for a in &aux {
        if let Aux::Surplus(_, art) | Aux::Artificial(art) = a {
            tab.cost1[*art] = 1.0;
        }
    }
    // Reduce the phase-1 cost row against the initial basis (artificials are
    // basic with cost one; slacks cost nothing).
    for (i, a) in aux.iter().enumerate() {
        if matches!(a, Aux::Surplus(..) | Aux::Artificial(..)) {
            let row = tab.rows[i].clone();
            for (x, p) in tab.cost1.iter_mut().zip(&row) {
                *x -= p;
            }
        }
    }

    let max_iter = 1000 + 100 * (m + ncols);
    if n_art > 0 {
        if !tab.run_phase(true, enter_limit, max_iter)? {
            return Err(Error::model("phase-1 objective unbounded (cannot happen on a well-posed tableau)"));
        }
        let infeas = -tab.cost1[ncols];
        if infeas > FEAS_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: f64::INFINITY,
                point: Vec::new(),
                dual: Vec::new(),
                iterations: tab.iterations,
            });
        }
    }
    if !tab.run_phase(false, enter_limit, max_iter)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: f64::NEG_INFINITY,
            point: Vec::new(),
            dual: Vec::new(),
            iterations: tab.iterations,
        });
    }

    // Read out the primal point …
    let mut xhat = vec![0.0; ncols];
    for (i, &bv) in tab.basis.iter().enumerate() {
        xhat[bv] = tab.rows[i][ncols];
    }
    let point: Vec<f64> = (0..n).map(|j| model.lower_bounds[j] + xhat[j]).collect();
    let value = -tab.cost2[ncols] + shift_const;

    // … and the duals from the auxiliary columns' reduced costs.
    let dual: Vec<f64> = (0..m)
        .map(|i| {
            let ybar = match aux[i] {
                Aux::Slack(s) => -tab.cost2[s],
                Aux::Surplus(s, _) => tab.cost2[s],
                Aux::Artificial(art) => -tab.cost2[art],
            };
            std_rows[i].sign * ybar / std_rows[i].scale
        })
        .collect();

    // The pivot arithmetic is trusted but verified: the claimed point must
    // satisfy every equilibrated row, where absolute and relative tolerance
    // coincide by construction.
    for (i, r) in std_rows.iter().enumerate() {
        let lhs: f64 = r.a.iter().zip(&xhat[..n]).map(|(a, x)| a * x).sum();
        let tol = FEAS_TOL * (1.0 + r.b.abs());
        let ok = match r.rel {
            Relation::Le => lhs <= r.b + tol,
            Relation::Ge => lhs >= r.b - tol,
            Relation::Eq => (lhs - r.b).abs() <= tol,
        };
        if !ok {
            return Err(Error::model(format!(
                "solver lost feasibility on row {i}: lhs {lhs} vs rhs {} ({})",
                r.b,
                r.rel.symbol()
            )));
        }
    }

    Ok(LpSolution { status: LpStatus::Optimal, value, point, dual, iterations: tab.iterations })
}

/// One violated condition from [`check_feasible`].
#[derive(Debug, Clone)]
pub struct Violation {
    /// Constraint index, or `n_constraints + j` for variable bound `j`.
    pub index: usize,
    /// Signed slack: negative means violated by that amount.
    pub slack: f64,
    pub description: String,
}

/// Evaluate `point` against every constraint and lower bound. Empty result
/// ⟺ feasible within [`FEAS_TOL`] (boundary points are feasible).
pub fn check_feasible(model: &LpModel, point: &[f64]) -> Result<Vec<Violation>> {
    model.validate()?;
    if point.len() != model.n_vars() {
        return Err(Error::model(format!(
            "point has {} coordinates, model has {} variables",
            point.len(),
            model.n_vars()
        )));
    }
    let mut out = Vec::new();
    for (i, c) in model.constraints.iter().enumerate() {
        let lhs: f64 = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
        let slack = match c.rel {
            Relation::Ge => lhs - c.rhs,
            Relation::Le => c.rhs - lhs,
            Relation::Eq => -(lhs - c.rhs).abs(),
        };
        if slack < -FEAS_TOL {
            out.push(Violation {
                index: i,
                slack,
                description: format!(
                    "constraint {i}: lhs {lhs} {} rhs {} violated by {}",
                    c.rel.symbol(),
                    c.rhs,
                    -slack
                ),
            });
        }
    }
    for (j, (&l, &x)) in model.lower_bounds.iter().zip(point).enumerate() {
        let slack = x - l;
        if slack < -FEAS_TOL {
            out.push(Violation {
                index: model.constraints.len() + j,
                slack,
                description: format!("bound: {} = {x} below lower bound {l}", model.names[j]),
            });
        }
    }
    Ok(out)
}
