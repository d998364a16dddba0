//! Small shared helpers.

/// Format a float with 17 significant digits, enough for an exact
/// parse-back of any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Binomial coefficient C(n, k) in u64 arithmetic (safe for n <= 62).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}
