//! Numeric formatting for the text outputs (CSV rows, report tables).

/// Format `x` with `digits` significant digits.
///
/// Values in a comfortable decimal range render as plain decimals; anything
/// tiny or huge switches to scientific notation so the digit budget is never
/// wasted on zeros.
pub fn sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs();
    if (1e-4..1e7).contains(&mag) {
        let order = mag.log10().floor() as i32;
        let decimals = (digits as i32 - 1 - order).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}
