//! Smooth cutoff `ψ`: even, `[0, 1]`-valued, `≡ 1` on `[−1, 1]`, supported in `(−2, 2)`.

fn smooth_step_base(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `ψ(t)`, built from `e^{−1/x}` as `g(2−|t|) / (g(2−|t|) + g(|t|−1))`.
pub fn bump(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let inner = smooth_step_base(2.0 - a);
    inner / (inner + smooth_step_base(a - 1.0))
}

/// Samples of `ψ_δ(t) = ψ(t/δ)`.
pub fn bump_window(delta: f64, times: &[f64]) -> Vec<f64> {
    times.iter().map(|&t| bump(t / delta)).collect()
}
