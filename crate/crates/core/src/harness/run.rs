//! The global driver: local windows sized by the local conditions, each
//! integrated by splitting, with diagnostics and doubling bookkeeping.

use std::fs;
use std::path::Path;

use super::checkpoint::Checkpoint;
use super::config::RunConfig;
use super::ic::initial_state;
use crate::diagnostics::{
    growth_bound_check, mark_doublings, n_pm_half_norm, row_for_state, DiagnosticsRow, GrowthBound, GrowthReport,
    CSV_HEADER,
};
use crate::error::{KlsError, Result};
use crate::evolve::{integrate, Coupling};
use crate::exponents::{doubling_forecast, local_delta, local_delta_mass_only, Binding, DoublingForecast, ExponentSet};
use crate::fieldcore::SimState;

/// Which branch of the local conditions sized a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `‖n±‖_{H^{1/2}} >= ‖u‖^{2m}`: all three conditions.
    WaveDominant,
    /// `‖n±‖_{H^{1/2}} < ‖u‖^{2m}`: mass-power condition only.
    MassOnly,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Self::WaveDominant => "wave_dominant",
            Self::MassOnly => "mass_only",
        }
    }
}

fn binding_tag(b: Binding) -> &'static str {
    match b {
        Binding::MassPower => "mass_power",
        Binding::Mixed => "mixed",
        Binding::WaveDominance => "wave_dominance",
        Binding::Cap => "cap",
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleEntry {
    pub time: f64,
    pub mass: f64,
    pub n_pm_half: f64,
    pub delta: f64,
    pub binding: Binding,
    pub regime: Regime,
    pub forecast: DoublingForecast,
    /// Length actually integrated (the last window is cut at `T`).
    pub window: f64,
    pub dt_eff: f64,
    pub steps: usize,
}

pub const SCHEDULE_HEADER: &str = "t,mass,n_pm_half,delta,binding,regime,iterations,advance,window,dt_eff,steps";

impl ScheduleEntry {
    pub fn to_csv(&self) -> String {
        let iterations = self.forecast.iterations().map_or(String::new(), |n| n.to_string());
        let advance = self.forecast.advance().map_or(String::new(), |a| format!("{a:e}"));
        format!(
            "{:e},{:e},{:e},{:e},{},{},{},{},{:e},{:e},{}",
            self.time,
            self.mass,
            self.n_pm_half,
            self.delta,
            binding_tag(self.binding),
            self.regime.tag(),
            iterations,
            advance,
            self.window,
            self.dt_eff,
            self.steps
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    Halted { time: f64, reason: String },
}

impl RunStatus {
    /// Process exit status: 0 completed, 2 halted.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Completed => 0,
            Self::Halted { .. } => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunHistory {
    pub rows: Vec<DiagnosticsRow>,
    pub doubling_events: Vec<(f64, f64)>,
    pub schedule_log: Vec<ScheduleEntry>,
    /// `(time, new regime)` whenever the regime differs from the previous window.
    pub regime_switches: Vec<(f64, Regime)>,
    pub growth: GrowthReport,
    pub bound: GrowthBound,
    pub status: RunStatus,
    pub final_state: SimState,
}

impl RunHistory {
    pub fn diagnostics_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }

    pub fn schedule_csv(&self) -> String {
        let mut s = String::from(SCHEDULE_HEADER);
        s.push('\n');
        for e in &self.schedule_log {
            s.push_str(&e.to_csv());
            s.push('\n');
        }
        s
    }

    /// Largest `|mass(t) − mass(0)| / mass(0)` over the rows (absolute when `mass(0) = 0`).
    pub fn relative_mass_drift(&self) -> f64 {
        relative_drift(&self.rows, |r| r.mass)
    }

    /// Largest `|E(t) − E(0)| / max(|E(0)|, 1e-300)` over the rows.
    pub fn relative_energy_drift(&self) -> f64 {
        relative_drift(&self.rows, |r| r.energy)
    }
}

fn relative_drift(rows: &[DiagnosticsRow], f: impl Fn(&DiagnosticsRow) -> f64) -> f64 {
    let Some(first) = rows.first() else { return 0.0 };
    let base = f(first);
    let scale = if base == 0.0 { 1.0 } else { base.abs() };
    rows.iter().map(|r| (f(r) - base).abs() / scale).fold(0.0, f64::max)
}

/// Local window for `state` and the doubling forecast at its start.
pub fn schedule_window(state: &SimState, exps: &ExponentSet, c_local: f64) -> Result<(f64, Binding, Regime, DoublingForecast, f64, f64)> {
    let m = exps.m_f64();
    let mass = state.u.l2_norm();
    let n_half = n_pm_half_norm(state);
    let (local, regime) = if mass > 0.0 && n_half < mass.powf(2.0 * m) {
        (local_delta_mass_only(mass, exps, c_local)?, Regime::MassOnly)
    } else {
        (local_delta(mass, n_half, exps, c_local)?, Regime::WaveDominant)
    };
    let forecast = doubling_forecast(mass, n_half, exps, c_local)?;
    Ok((local.delta, local.binding, regime, forecast, mass, n_half))
}

fn is_blowup(err: &KlsError) -> bool {
    matches!(err, KlsError::NonFinite { .. } | KlsError::NotReal { .. })
}

pub fn run_global(cfg: &RunConfig) -> Result<RunHistory> {
    cfg.validate()?;
    let exps = cfg.exponent_set()?;
    let m = cfg.m_f64();
    let coupling = Coupling::new(m).with_dealias(cfg.dealias);
    let mut state = initial_state(cfg)?;
    state.check_finite()?;

    let mut rows = vec![row_for_state(&state, m)?];
    let mut schedule_log = Vec::new();
    let mut regime_switches: Vec<(f64, Regime)> = Vec::new();
    let mut status = RunStatus::Completed;
    let t_end = cfg.t_final;
    let tiny = 1e-12 * t_end.max(1.0);

    'windows: while t_end - state.time > tiny {
        let (delta, binding, regime, forecast, mass, n_pm_half) = schedule_window(&state, &exps, cfg.c_local)?;
        if regime_switches.last().map(|r| r.1) != Some(regime) {
            regime_switches.push((state.time, regime));
        }
        let window = delta.min(t_end - state.time);
        let h = cfg.dt.min(delta / 16.0);
        let steps = ((window / h) - 1e-9).ceil().max(1.0) as usize;
        let dt_eff = window / steps as f64;
        schedule_log.push(ScheduleEntry {
            time: state.time,
            mass,
            n_pm_half,
            delta,
            binding,
            regime,
            forecast,
            window,
            dt_eff,
            steps,
        });

        let t_window = state.time;
        let chunks = cfg.rows_per_window.min(steps);
        let mut done = 0;
        for c in 1..=chunks {
            let target = steps * c / chunks;
            let next = match integrate(&state, dt_eff, target - done, &coupling) {
                Ok(s) => s,
                Err(e) if is_blowup(&e) => {
                    status = RunStatus::Halted { time: state.time, reason: e.to_string() };
                    break 'windows;
                }
                Err(e) => return Err(e),
            };
            done = target;
            // Pin the clock to the window grid to avoid accumulating round-off.
            state = SimState { time: if c == chunks { t_window + window } else { next.time }, ..next };
            let peak = state.max_abs();
            if !peak.is_finite() || peak > cfg.blowup_threshold {
                status = RunStatus::Halted { time: state.time, reason: format!("max |field| = {peak:e}") };
                break 'windows;
            }
            match row_for_state(&state, m) {
                Ok(r) if r.is_finite() => rows.push(r),
                Ok(_) => {
                    status = RunStatus::Halted { time: state.time, reason: "non-finite diagnostics".into() };
                    break 'windows;
                }
                Err(e) if is_blowup(&e) => {
                    status = RunStatus::Halted { time: state.time, reason: e.to_string() };
                    break 'windows;
                }
                Err(e) => return Err(e),
            }
        }
    }

    let doubling_events = mark_doublings(&mut rows);
    let mass0 = rows[0].mass;
    let bound = GrowthBound::from_initial(&rows[0], mass0, m, cfg.bound_c_front, cfg.bound_c_rate);
    let growth = growth_bound_check(&rows, &bound, mass0, m)?;
    for (r, b) in rows.iter_mut().zip(&growth.bound_values) {
        r.bound_value = *b;
    }
    let history = RunHistory {
        rows,
        doubling_events,
        schedule_log,
        regime_switches,
        growth,
        bound,
        status,
        final_state: state,
    };
    if let Some(dir) = &cfg.out_dir {
        write_outputs(dir, cfg, &history)?;
    }
    Ok(history)
}

/// `config.txt`, `diagnostics.csv`, `schedule.csv` and `final.ckpt` under `dir`.
pub fn write_outputs(dir: &Path, cfg: &RunConfig, history: &RunHistory) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.txt"), cfg.to_text())?;
    fs::write(dir.join("diagnostics.csv"), history.diagnostics_csv())?;
    fs::write(dir.join("schedule.csv"), history.schedule_csv())?;
    Checkpoint { m: cfg.m_f64(), state: history.final_state.clone() }.save(&dir.join("final.ckpt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(extra: &[(&str, &str)]) -> RunConfig {
        let mut pairs: Vec<(String, String)> =
            [("grid_points", "64"), ("domain_length", "20"), ("dt", "0.01"), ("T", "1")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect();
        pairs.extend(extra.iter().map(|(a, b)| (a.to_string(), b.to_string())));
        RunConfig::layered(None, &pairs).unwrap()
    }

    #[test]
    fn all_zero_data() {
        let cfg = quick(&[("ic.amplitude", "0"), ("ic.n_amplitude", "0")]);
        let h = run_global(&cfg).unwrap();
        assert_eq!(h.status, RunStatus::Completed);
        assert!(h.rows.iter().all(|r| r.mass == 0.0 && r.energy == 0.0 && r.n_half == 0.0));
        assert!(h.schedule_log.iter().all(|e| e.delta == 1.0));
        assert!(h.doubling_events.is_empty());
    }

    #[test]
    fn free_wave_keeps_half_wave_norms() {
        let cfg = quick(&[("ic.amplitude", "0"), ("ic.n_amplitude", "1.5"), ("T", "10"), ("rows_per_window", "4")]);
        let h = run_global(&cfg).unwrap();
        assert!(h.rows.iter().all(|r| r.mass == 0.0));
        let n0 = h.schedule_log[0].n_pm_half;
        for e in &h.schedule_log {
            assert!((e.n_pm_half - n0).abs() < 1e-10 * n0);
            assert!(matches!(e.forecast, DoublingForecast::FreeWave));
        }
        assert!(h.doubling_events.is_empty());
        assert!(h.growth.fitted.is_some_and(|(front, _)| front <= 2f64.sqrt() + 0.1));
    }

    #[test]
    fn last_window_ends_at_t() {
        let cfg = quick(&[("T", "2.3")]);
        let h = run_global(&cfg).unwrap();
        assert_eq!(h.final_state.time, 2.3);
        assert_eq!(h.rows.last().unwrap().time, 2.3);
        assert!(h.rows.windows(2).all(|w| w[0].time < w[1].time));
        assert!(h.schedule_log.iter().all(|e| e.dt_eff <= 0.01 + 1e-15 && e.dt_eff <= e.delta / 16.0 + 1e-15));
    }

    #[test]
    fn mass_only_regime_is_logged() {
        let cfg = quick(&[("ic.amplitude", "1.5"), ("ic.n_amplitude", "0.01"), ("c_local", "2")]);
        let h = run_global(&cfg).unwrap();
        assert_eq!(h.regime_switches[0].1, Regime::MassOnly);
        assert!(h.schedule_log.iter().all(|e| e.regime == Regime::MassOnly || e.n_pm_half >= e.mass.powi(2)));
    }

    #[test]
    fn blowup_threshold_halts() {
        let cfg = quick(&[("blowup_threshold", "0.1")]);
        let h = run_global(&cfg).unwrap();
        assert!(matches!(h.status, RunStatus::Halted { .. }));
        assert_eq!(h.status.exit_code(), 2);
    }
}
