//! Value distributions with exact quantile-oracle semantics.
//!
//! Everything downstream (threshold policies, Monte Carlo, LP soundness
//! checks) needs four quantities to near machine precision: the CDF `F`, the
//! quantile `v(q) = F⁻¹(q)`, the scaled overshoot `Δ(c) = n·E[(x −
//! v(1−c/n))⁺]`, and the expected maximum of `n` i.i.d. draws. Restricting
//! the model to finite mixtures of disjoint uniform intervals keeps all four
//! in closed form: `F` is piecewise linear, so quantiles invert exactly and
//! the integrals reduce to per-component polynomials — no quadrature anywhere
//! in the production path.
//!
//! The same family expresses the adversarial instances that make the upper
//! bounds bite: [`Distribution::high_value`] (almost-worthless mass plus a
//! sliver at magnitude `M`), [`Distribution::point_like`] (a near-point mass
//! at one), and [`Distribution::two_level`] (mass `c/n` at the level that
//! equalizes a single-threshold gambler against the prophet). Each is the
//! exact-arithmetic stand-in for a limit instance, evaluated at finite
//! widths `ε` rather than extrapolated.

use crate::num::{int_one_minus_pow, one_minus_pow};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default half-width for the near-point-mass components of hard instances.
pub const DEFAULT_EPS: f64 = 1e-6;
/// Default magnitude of the rare component in the high-value instance.
pub const DEFAULT_M: f64 = 1e6;
/// Mixture weights must sum to one within this tolerance.
pub const WEIGHT_TOL: f64 = 1e-12;

/// One weighted uniform interval of a mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    /// Mixture weight, strictly positive.
    pub w: f64,
    /// Left endpoint, nonnegative.
    pub lo: f64,
    /// Right endpoint, strictly greater than `lo`.
    pub hi: f64,
}

impl Component {
    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A finite mixture of disjoint uniform intervals on the nonnegative line.
///
/// Components are kept sorted by position; `cum[j]` is the total weight of
/// components `0..=j`, with the last entry pinned to exactly `1.0` so that
/// `quantile(1.0)` returns the top of the support without fuss. Weights are
/// renormalized on construction (after validating they already sum to one
/// within [`WEIGHT_TOL`]), which keeps the CDF consistent to the last ulp.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    components: Vec<Component>,
    cum: Vec<f64>,
}

impl Distribution {
    /// Single uniform interval `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::mixture(vec![Component { w: 1.0, lo, hi }])
    }

    /// General mixture. Components may arrive in any order but must be
    /// disjoint (touching endpoints are fine), positive-width, nonnegative,
    /// and carry weights summing to one within [`WEIGHT_TOL`].
    pub fn mixture(mut components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("mixture needs at least one component"));
        }
        for (j, c) in components.iter().enumerate() {
            if !(c.w.is_finite() && c.lo.is_finite() && c.hi.is_finite()) {
                return Err(Error::domain(format!("component {j} has a non-finite field")));
            }
            if c.w <= 0.0 {
                return Err(Error::domain(format!("component {j} weight {} must be > 0", c.w)));
            }
            if c.lo < 0.0 {
                return Err(Error::domain(format!(
                    "component {j} starts at {} but values must be nonnegative",
                    c.lo
                )));
            }
            if c.hi <= c.lo {
                return Err(Error::domain(format!(
                    "component {j} interval [{}, {}] has no width",
                    c.lo, c.hi
                )));
            }
        }
        components.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for pair in components.windows(2) {
            if pair[0].hi > pair[1].lo {
                return Err(Error::domain(format!(
                    "components [{}, {}] and [{}, {}] overlap",
                    pair[0].lo, pair[0].hi, pair[1].lo, pair[1].hi
                )));
            }
        }
        let total: f64 = components.iter().map(|c| c.w).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::domain(format!(
                "mixture weights sum to {total}, expected 1 within {WEIGHT_TOL:e}"
            )));
        }
        let mut cum = Vec::with_capacity(components.len());
        let mut acc = 0.0;
        for c in &mut components {
            c.w /= total;
            acc += c.w;
            cum.push(acc);
        }
        *cum.last_mut().expect("non-empty") = 1.0;
        Ok(Distribution { components, cum })
    }

    /// Hard instance: worthless mass except for a `1/(nM)` sliver of value
    /// `≈ M`. The prophet almost surely sees one high draw once `n` is in the
    /// game, while any near-top quantile query still lands in the cheap part.
    pub fn high_value(n: u32, m: f64, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("high_value needs n ≥ 1"));
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::domain(format!("high_value magnitude M = {m} must be positive")));
        }
        if !(eps > 0.0 && eps <= m / 4.0) {
            return Err(Error::domain(format!(
                "high_value needs 0 < eps ≤ M/4, got eps = {eps}, M = {m}"
            )));
        }
        let rare = 1.0 / (f64::from(n) * m);
        if rare >= 1.0 {
            return Err(Error::domain(format!("high_value needs n·M > 1, got {}", f64::from(n) * m)));
        }
        Self::mixture(vec![
            Component { w: 1.0 - rare, lo: 0.0, hi: eps },
            Component { w: rare, lo: m - eps, hi: m + eps },
        ])
    }

    /// Hard instance: all mass within `ε` of one. Any sensible rule gets
    /// ≈ 1, but an observe-then-beat-the-record rule can still strand itself.
    pub fn point_like(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::domain(format!("point_like needs 0 < eps ≤ 1, got {eps}")));
        }
        Self::mixture(vec![Component { w: 1.0, lo: 1.0 - eps, hi: 1.0 + eps }])
    }

    /// Hard instance: mass `c/n` at height `h = 1/(1−e^{−c})` and the rest
    /// near zero. `h` is calibrated so that a single-threshold gambler who
    /// accepts the high level scores exactly the prophet's payoff rate.
    pub fn two_level(n: u32, c: f64, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("two_level needs n ≥ 1"));
        }
        if !(c.is_finite() && c > 0.0 && c < f64::from(n)) {
            return Err(Error::domain(format!("two_level needs 0 < c < n, got c = {c}, n = {n}")));
        }
        let h = 1.0 / -(-c).exp_m1();
        if !(eps > 0.0 && eps <= h / 4.0) {
            return Err(Error::domain(format!(
                "two_level needs 0 < eps ≤ h/4, got eps = {eps}, h = {h}"
            )));
        }
        let rare = c / f64::from(n);
        Self::mixture(vec![
            Component { w: 1.0 - rare, lo: 0.0, hi: eps },
            Component { w: rare, lo: h - eps, hi: h + eps },
        ])
    }

    /// The components, sorted by position, weights renormalized.
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `(inf, sup)` of the support.
    pub fn support(&self) -> (f64, f64) {
        (self.components[0].lo, self.components[self.components.len() - 1].hi)
    }

    /// Mean value.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.w * 0.5 * (c.lo + c.hi)).sum()
    }

    /// CDF `F(x) = Pr[value ≤ x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        // Index of the last component starting at or before x.
        let idx = self.components.partition_point(|c| c.lo <= x);
        if idx == 0 {
            return 0.0;
        }
        let j = idx - 1;
        let c = &self.components[j];
        let below = self.cum[j] - c.w;
        if x >= c.hi {
            self.cum[j]
        } else {
            below + c.w * (x - c.lo) / c.width()
        }
    }

    /// Survival `G(x) = 1 − F(x)`.
    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Density (piecewise constant; zero in gaps and outside the support).
    pub fn pdf(&self, x: f64) -> f64 {
        let idx = self.components.partition_point(|c| c.lo <= x);
        if idx == 0 {
            return 0.0;
        }
        let c = &self.components[idx - 1];
        if x <= c.hi {
            c.w / c.width()
        } else {
            0.0
        }
    }

    /// Quantile `v(q) = F⁻¹(q)` for `q ∈ [0, 1]`.
    ///
    /// At a flat stretch of `F` (a gap between components, where a whole
    /// interval of values shares one CDF level) the right-continuous inverse
    /// is used: `q` exactly at a component boundary returns the *next*
    /// component's left endpoint, and `v(1)` is the top of the support.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("quantile level {q} outside [0, 1]")));
        }
        Ok(self.quantile_unchecked(q))
    }

    pub(crate) fn quantile_unchecked(&self, q: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&q));
        if q >= 1.0 {
            return self.support().1;
        }
        // First component whose cumulative weight exceeds q; exists because
        // the last cumulative weight is pinned to exactly 1 > q.
        let j = self.cum.partition_point(|&t| t <= q);
        let c = &self.components[j];
        let below = self.cum[j] - c.w;
        if q <= below {
            return c.lo;
        }
        c.lo + (q - below) * c.width() / c.w
    }

    /// Scaled overshoot `Δ(c) = n·E[(x − v(1 − c/n))⁺]` for `c ∈ [0, n]`.
    ///
    /// This is the expected surplus above the threshold that survives at rate
    /// `c/n`, scaled to the full horizon: the "collect the tail" half of every
    /// threshold policy's payoff.
    pub fn delta(&self, c: f64, n: u32) -> Result<f64> {
        assert!(n >= 1, "delta needs n ≥ 1");
        let nf = f64::from(n);
        if !(c.is_finite() && (0.0..=nf).contains(&c)) {
            return Err(Error::domain(format!("delta rate c = {c} outside [0, n] with n = {n}")));
        }
        let theta = self.quantile_unchecked(1.0 - c / nf);
        Ok(nf * self.mean_above(theta))
    }

    /// `E[(x − θ)⁺]` via the per-component closed form.
    pub(crate) fn mean_above(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for c in &self.components {
            if theta >= c.hi {
                continue;
            }
            if theta <= c.lo {
                acc += c.w * (0.5 * (c.lo + c.hi) - theta);
            } else {
                let over = c.hi - theta;
                acc += c.w * over * over / (2.0 * c.width());
            }
        }
        acc
    }

    /// Expected maximum of `n` i.i.d. draws: `∫_0^∞ (1 − F(t)ⁿ) dt`.
    pub fn expected_max(&self, n: u32) -> f64 {
        assert!(n >= 1, "expected_max needs n ≥ 1");
        self.upper_tail_integral(n, 0.0, self.support().1)
    }

    /// `∫_a^b (1 − F(t)ⁿ) dt`, exact per segment.
    ///
    /// Gaps (including `[0, lo₀)`) contribute `len·(1 − Wⁿ)` at their flat
    /// CDF level `W`; a component stretch maps affinely onto CDF space where
    /// `∫(1 − uⁿ)` has the cancellation-free form in [`crate::num`].
    pub(crate) fn upper_tail_integral(&self, n: u32, a: f64, b: f64) -> f64 {
        debug_assert!(n >= 1);
        let a = a.max(0.0);
        if b <= a {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut flat_from = 0.0_f64; // left edge of the current flat stretch
        let mut level = 0.0; // CDF level on that stretch
        for (j, c) in self.components.iter().enumerate() {
            // Flat stretch [flat_from, c.lo) at CDF value `level`.
            let len = (c.lo.min(b) - flat_from.max(a)).max(0.0);
            if len > 0.0 && level < 1.0 {
                acc += len * one_minus_pow(level, n);
            }
            // Component stretch [c.lo, c.hi].
            let x0 = c.lo.max(a);
            let x1 = c.hi.min(b);
            if x1 > x0 {
                let below = self.cum[j] - c.w;
                let u0 = below + c.w * (x0 - c.lo) / c.width();
                let u1 = below + c.w * (x1 - c.lo) / c.width();
                acc += int_one_minus_pow(u0.clamp(0.0, 1.0), u1.clamp(0.0, 1.0), n)
                    * (c.width() / c.w);
            }
            flat_from = c.hi;
            level = self.cum[j];
        }
        // Beyond the support F = 1, contributing nothing.
        acc
    }

    /// Draw one value. Uses a single uniform variate through the quantile
    /// transform, so a sampler consumes exactly one RNG output per draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile_unchecked(rng.gen::<f64>())
    }
}

/// Serializable recipe for a [`Distribution`]: either explicit mixture
/// components or one of the named hard-instance families.
///
/// ```json
/// {"kind": "mixture", "components": [{"w": 1.0, "lo": 0.0, "hi": 1.0}]}
/// {"kind": "d1", "n": 1000, "M": 1e6, "eps": 1e-6}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum DistSpec {
    /// Explicit component list.
    #[serde(rename = "mixture")]
    Mixture { components: Vec<Component> },
    /// Single uniform interval.
    #[serde(rename = "uniform")]
    Uniform { lo: f64, hi: f64 },
    /// High-value hard instance (rare huge prize).
    #[serde(rename = "d1")]
    HighValue {
        n: u32,
        #[serde(rename = "M", default = "default_m")]
        m: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// Near-point mass at one.
    #[serde(rename = "d2")]
    PointLike {
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// Two-level instance calibrated to rate `c`.
    #[serde(rename = "d3")]
    TwoLevel {
        n: u32,
        c: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
}

fn default_m() -> f64 {
    DEFAULT_M
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

impl DistSpec {
    /// Materialize the distribution, validating all parameters.
    pub fn build(&self) -> Result<Distribution> {
        match self {
            DistSpec::Mixture { components } => Distribution::mixture(components.clone()),
            DistSpec::Uniform { lo, hi } => Distribution::uniform(*lo, *hi),
            DistSpec::HighValue { n, m, eps } => Distribution::high_value(*n, *m, *eps),
            DistSpec::PointLike { eps } => Distribution::point_like(*eps),
            DistSpec::TwoLevel { n, c, eps } => Distribution::two_level(*n, *c, *eps),
        }
    }
}

/// The distributions every cross-cutting check runs against: a bland uniform,
/// a generic three-piece mixture, and the three hard-instance families at
/// their default widths (`d3` at rate 1.2, comfortably interior to the
/// threshold ranges the LPs probe).
pub fn builtin_zoo(n: u32) -> Vec<(&'static str, Distribution)> {
    vec![
        ("uniform01", Distribution::uniform(0.0, 1.0).expect("valid")),
        (
            "staircase",
            Distribution::mixture(vec![
                Component { w: 0.5, lo: 0.0, hi: 1.0 },
                Component { w: 0.3, lo: 1.5, hi: 2.0 },
                Component { w: 0.2, lo: 3.0, hi: 3.5 },
            ])
            .expect("valid"),
        ),
        ("d1-high-value", Distribution::high_value(n, DEFAULT_M, DEFAULT_EPS).expect("valid")),
        ("d2-point-like", Distribution::point_like(DEFAULT_EPS).expect("valid")),
        ("d3-two-level", Distribution::two_level(n, 1.2, DEFAULT_EPS).expect("valid")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Composite Simpson with `panels` even subdivisions — the test-only
    /// quadrature oracle for cross-checking the closed forms.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: u32) -> f64 {
        assert!(panels % 2 == 0);
        let h = (b - a) / f64::from(panels);
        let mut acc = f(a) + f(b);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + f64::from(i) * h);
        }
        acc * h / 3.0
    }

    /// ∫ f from 0 to the support top, split per component so the integrand
    /// is smooth on every panel.
    fn integrate_over_segments(d: &Distribution, f: impl Fn(f64) -> f64, panels: u32) -> f64 {
        let mut acc = 0.0;
        let mut prev = 0.0;
        for c in d.components() {
            acc += simpson(&f, prev, c.lo, panels);
            acc += simpson(&f, c.lo, c.hi, panels);
            prev = c.hi;
        }
        acc
    }

    /// ∫_a^b f with the partition refined at component edges, for integrands
    /// smooth between edges (CDF, survival, tail moments).
    fn integrate_clipped(d: &Distribution, a: f64, b: f64, f: impl Fn(f64) -> f64, panels: u32) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut cuts = vec![a, b];
        for c in d.components() {
            for edge in [c.lo, c.hi] {
                if edge > a && edge < b {
                    cuts.push(edge);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2).map(|w| simpson(&f, w[0], w[1], panels)).sum()
    }

    fn uniform01() -> Distribution {
        Distribution::uniform(0.0, 1.0).unwrap()
    }

    fn staircase() -> Distribution {
        Distribution::mixture(vec![
            Component { w: 0.5, lo: 0.0, hi: 1.0 },
            Component { w: 0.3, lo: 1.5, hi: 2.0 },
            Component { w: 0.2, lo: 3.0, hi: 3.5 },
        ])
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_mixtures() {
        assert!(Distribution::mixture(vec![]).is_err());
        assert!(Distribution::uniform(0.5, 0.5).is_err());
        assert!(Distribution::uniform(-0.1, 1.0).is_err());
        assert!(Distribution::mixture(vec![Component { w: 0.9, lo: 0.0, hi: 1.0 }]).is_err());
        // Overlap.
        assert!(Distribution::mixture(vec![
            Component { w: 0.5, lo: 0.0, hi: 1.0 },
            Component { w: 0.5, lo: 0.5, hi: 2.0 },
        ])
        .is_err());
        // Touching endpoints are fine.
        assert!(Distribution::mixture(vec![
            Component { w: 0.5, lo: 0.0, hi: 1.0 },
            Component { w: 0.5, lo: 1.0, hi: 2.0 },
        ])
        .is_ok());
        // Out-of-order input is sorted, not rejected.
        let d = Distribution::mixture(vec![
            Component { w: 0.5, lo: 3.0, hi: 4.0 },
            Component { w: 0.5, lo: 0.0, hi: 1.0 },
        ])
        .unwrap();
        assert_eq!(d.components()[0].lo, 0.0);
    }

    #[test]
    fn quantile_is_affine_within_a_component() {
        let d = uniform01();
        assert_eq!(d.quantile(0.0).unwrap(), 0.0);
        assert_eq!(d.quantile(0.5).unwrap(), 0.5);
        assert_eq!(d.quantile(1.0).unwrap(), 1.0);
        let d = Distribution::uniform(2.0, 6.0).unwrap();
        assert_eq!(d.quantile(0.25).unwrap(), 3.0);
    }

    #[test]
    fn quantile_at_component_boundary_takes_the_next_component() {
        let d = staircase();
        // Exactly at the first component's cumulative weight: the gap's flat
        // CDF level maps to the next component's left endpoint.
        assert_eq!(d.quantile(0.5).unwrap(), 1.5);
        assert_eq!(d.quantile(0.8).unwrap(), 3.0);
        assert_eq!(d.quantile(1.0).unwrap(), 3.5);
    }

    #[test]
    fn quantile_domain_errors() {
        let d = uniform01();
        assert!(d.quantile(-0.1).is_err());
        assert!(d.quantile(1.1).is_err());
        assert!(d.quantile(f64::NAN).is_err());
    }

    #[test]
    fn high_value_quantile_at_rare_boundary() {
        // Querying exactly at the bulk/sliver boundary must land on the
        // sliver: this is the query a high-quantile threshold policy makes.
        let n = 1000;
        let d = Distribution::high_value(n, DEFAULT_M, DEFAULT_EPS).unwrap();
        let rare = 1.0 / (1000.0 * DEFAULT_M);
        let v = d.quantile(1.0 - rare).unwrap();
        assert_eq!(v, DEFAULT_M - DEFAULT_EPS);
    }

    #[test]
    fn cdf_quantile_round_trip() {
        let d = staircase();
        for i in 0..=1000 {
            let q = f64::from(i) / 1000.0;
            let x = d.quantile(q).unwrap();
            let back = d.cdf(x);
            assert!(
                (back - q).abs() <= 1e-9,
                "q = {q}: v(q) = {x}, F(v(q)) = {back}"
            );
        }
        // Interior points round-trip the other way.
        for x in [0.25, 0.75, 1.6, 1.99, 3.2] {
            let q = d.cdf(x);
            assert!((d.quantile(q).unwrap() - x).abs() <= 1e-12);
        }
    }

    #[test]
    fn cdf_levels_in_gaps_and_outside_support() {
        let d = staircase();
        assert_eq!(d.cdf(-1.0), 0.0);
        assert_eq!(d.cdf(1.2), 0.5); // gap keeps the flat level
        assert_eq!(d.cdf(2.5), 0.8);
        assert_eq!(d.cdf(10.0), 1.0);
        assert_eq!(d.survival(1.2), 0.5);
        assert_eq!(d.pdf(1.2), 0.0);
        assert_eq!(d.pdf(0.5), 0.5);
    }

    #[test]
    fn delta_on_uniform_is_c_squared_over_2n() {
        // θ = 1 - c/n and E[(x-θ)⁺] = (c/n)²/2, so Δ(c) = c²/(2n).
        let d = uniform01();
        for &(c, n) in &[(1.0, 100u32), (0.5, 10), (2.0, 1000)] {
            let exact = c * c / (2.0 * f64::from(n));
            assert!((d.delta(c, n).unwrap() - exact).abs() <= 1e-15 * f64::from(n));
        }
        assert_eq!(d.delta(0.0, 100).unwrap(), 0.0);
    }

    #[test]
    fn delta_at_c_equals_n_is_n_times_mean() {
        // θ = v(0) = inf support, so Δ(n) = n·E[x - lo] = n·(mean - lo).
        let d = staircase();
        let n = 7u32;
        let expect = f64::from(n) * d.mean();
        assert!((d.delta(f64::from(n), n).unwrap() - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn delta_matches_quadrature_oracle() {
        let d = staircase();
        let n = 100u32;
        for c in [0.3, 1.0, 2.7, 15.0] {
            let theta = d.quantile(1.0 - c / f64::from(n)).unwrap();
            let top = d.support().1;
            let oracle = f64::from(n)
                * integrate_clipped(&d, theta, top, |t| (t - theta) * d.pdf(t), 512);
            let v = d.delta(c, n).unwrap();
            assert!(
                (v - oracle).abs() <= 1e-9 * oracle.max(1.0),
                "c = {c}: Δ = {v}, oracle = {oracle}"
            );
        }
    }

    #[test]
    fn delta_on_high_value_sees_the_rare_prize() {
        // With θ in the bulk, Δ(c) ≈ n·(1/(nM))·M = 1 regardless of scale.
        let d = Distribution::high_value(100, DEFAULT_M, DEFAULT_EPS).unwrap();
        let v = d.delta(1.0, 100).unwrap();
        assert!((v - 1.0).abs() <= 1e-3, "Δ = {v}");
    }

    #[test]
    fn expected_max_of_uniforms_is_n_over_n_plus_one() {
        let d = uniform01();
        assert!((d.expected_max(1) - 0.5).abs() <= 1e-15);
        assert!((d.expected_max(10) - 10.0 / 11.0).abs() <= 1e-12);
        assert!((d.expected_max(1000) - 1000.0 / 1001.0).abs() <= 1e-12);
    }

    #[test]
    fn expected_max_matches_quadrature_oracle() {
        for (name, d) in [("staircase", staircase()), ("shifted", Distribution::uniform(2.0, 6.0).unwrap())]
        {
            for n in [1u32, 3, 17, 200] {
                // The segment walk starts at 0, so the constant-1 stretch
                // below the support is already included.
                let f = |t: f64| 1.0 - d.cdf(t).powi(n as i32);
                let oracle = integrate_over_segments(&d, f, 4096);
                let v = d.expected_max(n);
                assert!(
                    (v - oracle).abs() <= 1e-9 * oracle.max(1.0),
                    "{name}, n = {n}: got {v}, oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn expected_max_of_high_value_approaches_the_prize() {
        // The sliver has weight 1/(nM); over n draws the prophet collects M
        // with probability ≈ 1/M, i.e. expected value ≈ 1.
        let d = Distribution::high_value(100, DEFAULT_M, DEFAULT_EPS).unwrap();
        let v = d.expected_max(100);
        assert!((v - 1.0).abs() <= 1e-4, "E[max] = {v}");
    }

    #[test]
    fn expected_max_of_point_like_is_one() {
        let d = Distribution::point_like(DEFAULT_EPS).unwrap();
        let v = d.expected_max(50);
        assert!((v - 1.0).abs() <= 2.0 * DEFAULT_EPS);
    }

    #[test]
    fn two_level_height_matches_rate() {
        let n = 1000;
        let c = 1.2;
        let d = Distribution::two_level(n, c, DEFAULT_EPS).unwrap();
        let h = 1.0 / -(-c as f64).exp_m1();
        let top = d.support().1;
        assert!((top - (h + DEFAULT_EPS)).abs() <= 1e-12 * h);
        // Mass above the gap is exactly c/n.
        assert!((d.survival(1.0) - c / f64::from(n)).abs() <= 1e-15);
    }

    #[test]
    fn sampling_matches_cdf_by_ks_distance() {
        // Empirical CDF at 10⁶ draws should be within 0.002 of F everywhere
        // (the 1e-6 KS quantile is ≈ 0.00186 at this sample size).
        for (name, d) in [("uniform01", uniform01()), ("staircase", staircase())] {
            let trials = 1_000_000usize;
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut xs: Vec<f64> = (0..trials).map(|_| d.sample(&mut rng)).collect();
            xs.sort_by(f64::total_cmp);
            let mut ks: f64 = 0.0;
            for (i, &x) in xs.iter().enumerate() {
                let f = d.cdf(x);
                let lo = i as f64 / trials as f64;
                let hi = (i + 1) as f64 / trials as f64;
                ks = ks.max((f - lo).abs()).max((f - hi).abs());
            }
            assert!(ks <= 0.002, "{name}: KS distance {ks}");
        }
    }

    #[test]
    fn sampling_is_deterministic_for_a_seed() {
        let d = staircase();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            assert_eq!(d.sample(&mut a).to_bits(), d.sample(&mut b).to_bits());
        }
    }

    #[test]
    fn dist_spec_round_trips_and_builds() {
        let json = r#"{"kind":"mixture","components":[{"w":0.5,"lo":0.0,"hi":1.0},{"w":0.5,"lo":2.0,"hi":3.0}]}"#;
        let spec: DistSpec = serde_json::from_str(json).unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.components().len(), 2);
        let back = serde_json::to_string(&spec).unwrap();
        let spec2: DistSpec = serde_json::from_str(&back).unwrap();
        assert_eq!(spec, spec2);

        let spec: DistSpec = serde_json::from_str(r#"{"kind":"d1","n":1000}"#).unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.support().1, DEFAULT_M + DEFAULT_EPS);

        let spec: DistSpec = serde_json::from_str(r#"{"kind":"d3","n":100,"c":1.2}"#).unwrap();
        assert!(spec.build().is_ok());

        // Unknown keys are rejected.
        assert!(serde_json::from_str::<DistSpec>(r#"{"kind":"d2","eps":1e-6,"bogus":1}"#).is_err());
    }

    #[test]
    fn zoo_members_all_build() {
        let zoo = builtin_zoo(10_000);
        assert_eq!(zoo.len(), 5);
        for (name, d) in &zoo {
            assert!(d.expected_max(10) > 0.0, "{name}");
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Random small mixtures with moderate scales: up to 4 components,
        /// widths and gaps in [1e-3, 2], weights bounded away from zero.
        fn arb_distribution() -> impl Strategy<Value = Distribution> {
            let comp = (0.05f64..1.0, 1e-3f64..2.0, 0.0f64..2.0);
            proptest::collection::vec(comp, 1..=4).prop_map(|parts| {
                let mut lo = 0.0;
                let total: f64 = parts.iter().map(|p| p.0).sum();
                let mut comps = Vec::new();
                for (w, width, gap) in parts {
                    lo += gap;
                    comps.push(Component { w: w / total, lo, hi: lo + width });
                    lo += width;
                }
                Distribution::mixture(comps).expect("constructed valid")
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn quantile_is_strictly_increasing(d in arb_distribution(), q1 in 0.0f64..0.999, gap in 1e-6f64..0.3) {
                let q2 = (q1 + gap).min(1.0);
                let v1 = d.quantile(q1).unwrap();
                let v2 = d.quantile(q2).unwrap();
                prop_assert!(v1 < v2, "v({q1}) = {v1} !< v({q2}) = {v2}");
            }

            #[test]
            fn cdf_inverts_quantile(d in arb_distribution(), q in 0.0f64..=1.0) {
                let x = d.quantile(q).unwrap();
                prop_assert!((d.cdf(x) - q).abs() <= 1e-9);
            }

            #[test]
            fn delta_is_nondecreasing_in_c(d in arb_distribution(), c1 in 0.0f64..50.0, bump in 0.0f64..50.0) {
                let n = 100u32;
                let d1 = d.delta(c1, n).unwrap();
                let d2 = d.delta((c1 + bump).min(100.0), n).unwrap();
                prop_assert!(d2 >= d1 - 1e-12);
            }

            #[test]
            fn delta_increment_is_integral_of_survival(d in arb_distribution(), c1 in 0.1f64..40.0, bump in 0.1f64..40.0) {
                // Δ(c₂) − Δ(c₁) = n ∫_{θ₂}^{θ₁} G(t) dt where θᵢ = v(1 − cᵢ/n):
                // both sides measure the same slab of tail mass.
                let n = 100u32;
                let c2 = (c1 + bump).min(99.0);
                let nf = f64::from(n);
                let th1 = d.quantile(1.0 - c1 / nf).unwrap();
                let th2 = d.quantile(1.0 - c2 / nf).unwrap();
                let lhs = d.delta(c2, n).unwrap() - d.delta(c1, n).unwrap();
                let rhs = nf * integrate_clipped(&d, th2, th1, |t| d.survival(t), 256);
                prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()), "lhs {lhs} rhs {rhs}");
            }

            #[test]
            fn expected_max_is_bounded_by_threshold_plus_delta(d in arb_distribution(), c in 0.05f64..10.0) {
                // E[max] ≤ v(1 − c/n) + Δ(c): prophet value decomposes below
                // and above any threshold.
                let n = 50u32;
                let theta = d.quantile(1.0 - c / f64::from(n)).unwrap();
                let bound = theta + d.delta(c, n).unwrap();
                prop_assert!(d.expected_max(n) <= bound + 1e-9);
            }

            #[test]
            fn expected_max_is_nondecreasing_in_n(d in arb_distribution(), n in 1u32..200) {
                prop_assert!(d.expected_max(n + 1) >= d.expected_max(n) - 1e-12);
            }

            #[test]
            fn mean_above_zero_threshold_is_mean(d in arb_distribution()) {
                prop_assert!((d.mean_above(0.0) - d.mean()).abs() <= 1e-12);
            }
        }
    }
}
