use super::quantities::DiagnosticsRow;
use crate::error::{KlsError, Result};

/// Envelope `c_front · exp(c_rate · t · M^{4m−2}) · baseline`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthBound {
    pub c_rate: f64,
    pub c_front: f64,
    /// `max(‖n₀‖_{H^{1/2}} + ‖n₁‖_{H^{−1/2}}, ‖u₀‖^{2m})`.
    pub baseline: f64,
}

impl GrowthBound {
    pub fn from_initial(first: &DiagnosticsRow, mass_u0: f64, m: f64, c_front: f64, c_rate: f64) -> Self {
        Self { c_rate, c_front, baseline: first.wave_size().max(mass_u0.powf(2.0 * m)) }
    }

    pub fn value(&self, t: f64, mass_u0: f64, m: f64) -> f64 {
        self.c_front * (self.c_rate * t.abs() * mass_u0.powf(4.0 * m - 2.0)).exp() * self.baseline
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    /// Envelope of the supplied bound at each row.
    pub bound_values: Vec<f64>,
    /// Rows where the supplied bound is violated.
    pub violations: Vec<usize>,
    /// Lexicographically smallest `(c_front, c_rate)` on the search grid that covers the history.
    pub fitted: Option<(f64, f64)>,
}

impl GrowthReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `c_front ∈ 2^{i/16}` for `i = 0..=64`.
fn front_grid() -> impl Iterator<Item = f64> {
    (0..=64).map(|i| 2f64.powf(i as f64 / 16.0))
}

/// `c_rate ∈ 10^{−4 + i/8}` for `i = 0..=48`.
fn rate_grid() -> impl Iterator<Item = f64> + Clone {
    (0..=48).map(|i| 10f64.powf(-4.0 + i as f64 / 8.0))
}

fn covers(history: &[DiagnosticsRow], bound: &GrowthBound, mass_u0: f64, m: f64) -> bool {
    history.iter().all(|r| r.wave_size() <= bound.value(r.time, mass_u0, m))
}

pub fn growth_bound_check(
    history: &[DiagnosticsRow],
    bound: &GrowthBound,
    mass_u0: f64,
    m: f64,
) -> Result<GrowthReport> {
    if history.is_empty() {
        return Err(KlsError::InvalidParameter("empty history".into()));
    }
    if let Some(i) = history.windows(2).position(|w| w[1].time < w[0].time) {
        return Err(KlsError::UnsortedHistory(i + 1));
    }
    let bound_values: Vec<f64> = history.iter().map(|r| bound.value(r.time, mass_u0, m)).collect();
    let violations = history
        .iter()
        .zip(&bound_values)
        .enumerate()
        .filter(|(_, (r, b))| r.wave_size() > **b)
        .map(|(i, _)| i)
        .collect();
    let fitted = front_grid().find_map(|c_front| {
        rate_grid()
            .find(|&c_rate| covers(history, &GrowthBound { c_rate, c_front, baseline: bound.baseline }, mass_u0, m))
            .map(|c_rate| (c_front, c_rate))
    });
    Ok(GrowthReport { bound_values, violations, fitted })
}

/// Sets `doubled` where the wave size first reaches twice the value at the last
/// doubling (initially the first row). Returns `(time, value)` per event.
pub fn mark_doublings(rows: &mut [DiagnosticsRow]) -> Vec<(f64, f64)> {
    let mut events = Vec::new();
    let Some(first) = rows.first() else { return events };
    let mut reference = first.wave_size();
    for r in rows.iter_mut() {
        r.doubled = false;
        let v = r.wave_size();
        if reference > 0.0 && v >= 2.0 * reference {
            r.doubled = true;
            events.push((r.time, v));
            reference = v;
        }
    }
    events
}
