//! Local window size and doubling forecast.
//!
//! Every local condition has the form `δ^{gap}·Q ≲ 1` with `gap = 1/2`, so each
//! one bounds `δ ≤ (c·Q)^{−1/gap}`.

use super::bourgain::ExponentSet;
use super::rational::to_f64;
use crate::error::{KlsError, Result};

/// Which local condition fixed `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binding {
    /// `δ^{1/2}‖u₀‖^{2m−1} ≲ 1`.
    MassPower,
    /// `δ^{1/2}‖u₀‖^{2m−2}‖n±(0)‖ ≲ 1`.
    Mixed,
    /// `δ^{1/2}‖u₀‖^{2m} ≲ ‖n±(0)‖`.
    WaveDominance,
    /// No condition was binding below the cap `δ = 1`.
    Cap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalDelta {
    pub delta: f64,
    pub binding: Binding,
}

fn validate(mass_u0: f64, n_half_norm: f64, c_local: f64) -> Result<()> {
    if !(mass_u0.is_finite() && mass_u0 >= 0.0) {
        return Err(KlsError::InvalidParameter(format!("mass must be finite and >= 0, got {mass_u0}")));
    }
    if !(n_half_norm.is_finite() && n_half_norm >= 0.0) {
        return Err(KlsError::InvalidParameter(format!("n norm must be finite and >= 0, got {n_half_norm}")));
    }
    if !(c_local.is_finite() && c_local > 0.0) {
        return Err(KlsError::InvalidParameter(format!("c_local must be positive, got {c_local}")));
    }
    Ok(())
}

fn pick(candidates: &[(f64, Binding)], gap: f64, c_local: f64) -> LocalDelta {
    let mut best = LocalDelta { delta: 1.0, binding: Binding::Cap };
    for &(q, binding) in candidates {
        if q > 0.0 {
            let d = (c_local * q).powf(-1.0 / gap);
            if d < best.delta {
                best = LocalDelta { delta: d, binding };
            }
        }
    }
    best
}

/// Minimum over the three local conditions, capped at 1.
pub fn local_delta(mass_u0: f64, n_half_norm: f64, exps: &ExponentSet, c_local: f64) -> Result<LocalDelta> {
    validate(mass_u0, n_half_norm, c_local)?;
    let m = exps.m_f64();
    let gap = to_f64(exps.gap());
    if n_half_norm == 0.0 {
        return local_delta_mass_only(mass_u0, exps, c_local);
    }
    let candidates = [
        (mass_u0.powf(2.0 * m - 1.0), Binding::MassPower),
        (mass_u0.powf(2.0 * m - 2.0) * n_half_norm, Binding::Mixed),
        (mass_u0.powf(2.0 * m) / n_half_norm, Binding::WaveDominance),
    ];
    // ‖u₀‖^{0} = 1 would make the mixed condition bind with zero mass; u ≡ 0 is free.
    if mass_u0 == 0.0 {
        return Ok(LocalDelta { delta: 1.0, binding: Binding::Cap });
    }
    Ok(pick(&candidates, gap, c_local))
}

/// Only the mass-power condition (used when `‖n±‖ < ‖u₀‖^{2m}`).
pub fn local_delta_mass_only(mass_u0: f64, exps: &ExponentSet, c_local: f64) -> Result<LocalDelta> {
    validate(mass_u0, 0.0, c_local)?;
    let m = exps.m_f64();
    let gap = to_f64(exps.gap());
    Ok(pick(&[(mass_u0.powf(2.0 * m - 1.0), Binding::MassPower)], gap, c_local))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DoublingForecast {
    /// `u ≡ 0`: the fields decouple and `‖n±‖` never grows.
    FreeWave,
    /// `‖n±(0)‖ < ‖u₀‖^{2m}`: outside the regime of the doubling argument.
    NotApplicable { n_half_norm: f64, mass_power: f64 },
    Forecast {
        delta: f64,
        binding: Binding,
        iterations: u64,
        /// `N·δ`, time advanced before `‖n±‖` can double.
        advance: f64,
        /// `advance · ‖u₀‖^{4m−2}`.
        normalized: f64,
        /// Reported band constant `C* = max(c, 2/c)`.
        c_star: f64,
        within_band: bool,
    },
}

impl DoublingForecast {
    pub fn advance(&self) -> Option<f64> {
        match self {
            Self::FreeWave => Some(f64::INFINITY),
            Self::NotApplicable { .. } => None,
            Self::Forecast { advance, .. } => Some(*advance),
        }
    }

    pub fn iterations(&self) -> Option<u64> {
        match self {
            Self::Forecast { iterations, .. } => Some(*iterations),
            _ => None,
        }
    }
}

/// `C*` such that `N·δ·‖u₀‖^{4m−2} ∈ [1/C*, C*]` whenever the mixed condition binds.
pub fn band_constant(c_local: f64) -> f64 {
    c_local.max(2.0 / c_local)
}

pub fn doubling_forecast(
    mass_u0: f64,
    n_half_norm: f64,
    exps: &ExponentSet,
    c_local: f64,
) -> Result<DoublingForecast> {
    validate(mass_u0, n_half_norm, c_local)?;
    if mass_u0 == 0.0 {
        return Ok(DoublingForecast::FreeWave);
    }
    let m = exps.m_f64();
    let mass_power = mass_u0.powf(2.0 * m);
    if n_half_norm < mass_power {
        return Ok(DoublingForecast::NotApplicable { n_half_norm, mass_power });
    }
    let local = local_delta(mass_u0, n_half_norm, exps, c_local)?;
    let gap = to_f64(exps.gap());
    let growth_per_step = local.delta.powf(gap) * mass_power;
    let iterations = (n_half_norm / growth_per_step).ceil().max(1.0) as u64;
    let advance = iterations as f64 * local.delta;
    let normalized = advance * mass_u0.powf(4.0 * m - 2.0);
    let c_star = band_constant(c_local);
    Ok(DoublingForecast::Forecast {
        delta: local.delta,
        binding: local.binding,
        iterations,
        advance,
        normalized,
        c_star,
        within_band: normalized >= 1.0 / c_star && normalized <= c_star,
    })
}
