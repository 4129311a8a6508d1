//! Cancellation-free kernels for probabilities raised to large powers.
//!
//! The recurring quantity is `1 - p^m` with `p = 1 - c/n` extremely close to
//! one and `m` up to `n`. Computing `p^m` by repeated multiplication and
//! subtracting would lose every significant digit of the survival
//! probability, so both the power and its complement go through
//! `ln_1p`/`exp_m1`.

/// `p^m` for `p ∈ [0, 1]`, accurate for `p` near one.
pub(crate) fn pow_frac(p: f64, m: u32) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if m == 0 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    (f64::from(m) * (p - 1.0).ln_1p()).exp()
}

/// `1 - p^m` for `p ∈ [0, 1]`, accurate for `p` near one.
pub(crate) fn one_minus_pow(p: f64, m: u32) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if m == 0 {
        return 0.0;
    }
    if p <= 0.0 {
        return 1.0;
    }
    -(f64::from(m) * (p - 1.0).ln_1p()).exp_m1()
}

/// `∫_a^b (1 - u^n) du` for `0 ≤ a ≤ b ≤ 1`, as a positive sum.
///
/// The antiderivative `u - u^{n+1}/(n+1)` cancels catastrophically when both
/// endpoints are near one, which is exactly where the expected-maximum
/// integral lives. Factoring the difference of powers instead gives
///
/// `∫_a^b (1 - u^n) du = (b - a)/(n + 1) · Σ_{i=0}^{n} (1 - a^i b^{n-i})`
///
/// where every term is nonnegative and computed via `exp_m1`/`ln_1p`.
pub(crate) fn int_one_minus_pow(a: f64, b: f64, n: u32) -> f64 {
    debug_assert!(0.0 <= a && a <= b && b <= 1.0);
    if a >= b {
        return 0.0;
    }
    let la = if a > 0.0 {
        (a - 1.0).ln_1p()
    } else {
        f64::NEG_INFINITY
    };
    let lb = if b > 0.0 {
        (b - 1.0).ln_1p()
    } else {
        f64::NEG_INFINITY
    };
    let mut acc = 0.0;
    for i in 0..=n {
        // ln(a^i b^{n-i}), guarding 0 · (-inf) when an exponent is zero.
        let l = if i == 0 {
            f64::from(n) * lb
        } else if i == n {
            f64::from(n) * la
        } else {
            f64::from(i) * la + f64::from(n - i) * lb
        };
        acc += -l.exp_m1();
    }
    acc * (b - a) / (f64::from(n) + 1.0)
}
