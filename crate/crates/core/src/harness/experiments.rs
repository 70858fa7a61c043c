//! Contraction ladder, parameter sweeps and region polylines.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use super::ic::initial_state;
use super::run::{run_global, RunStatus};
use crate::error::{KlsError, Result};
use crate::evolve::{integrate, picard_local_solve, Coupling, PicardConfig, Quadrature};
use crate::exponents::{admissible_region, local_delta, rational, Q};
use crate::fieldcore::SimState;
use crate::par::{self, Exec};

/// Multiples of the local `δ` tried by [`run_picard_experiment`].
pub const DELTA_LADDER: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Solver settings shared by every rung of the ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardSettings {
    pub quad_points: usize,
    pub max_iters: usize,
    pub fp_tolerance: f64,
    pub quadrature: Quadrature,
    pub exec: Exec,
}

impl Default for PicardSettings {
    fn default() -> Self {
        Self { quad_points: 33, max_iters: 60, fp_tolerance: 1e-10, quadrature: Quadrature::Simpson, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionRow {
    pub factor: f64,
    pub delta: f64,
    pub compliant: bool,
    pub converged: bool,
    pub iterations: usize,
    /// Largest measured ratio of successive iterate distances.
    pub max_ratio: f64,
    /// `Σ‖Δ‖ / Σ‖ref‖` over `(u, n₊, n₋)` against splitting at the configured `dt`.
    pub endpoint_error: Option<f64>,
    pub splitting_dt: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    pub base_delta: f64,
    pub rows: Vec<ContractionRow>,
}

impl ContractionReport {
    pub const CSV_HEADER: &'static str =
        "factor,delta,compliant,converged,iterations,max_ratio,endpoint_error,splitting_dt";

    /// Whether the measured ratio is non-decreasing along the ladder.
    pub fn ratios_sorted(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].max_ratio <= w[1].max_ratio)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:e},{},{},{},{:e},{},{:e}\n",
                r.factor,
                r.delta,
                u8::from(r.compliant),
                u8::from(r.converged),
                r.iterations,
                r.max_ratio,
                r.endpoint_error.map_or(String::new(), |e| format!("{e:e}")),
                r.splitting_dt
            ));
        }
        s
    }
}

fn relative_state_error(a: &SimState, b: &SimState) -> Result<f64> {
    let num = a.u.sub(&b.u)?.l2_norm() + a.n_plus.sub(&b.n_plus)?.l2_norm() + a.n_minus.sub(&b.n_minus)?.l2_norm();
    let den = b.u.l2_norm() + b.n_plus.l2_norm() + b.n_minus.l2_norm();
    Ok(if den == 0.0 { num } else { num / den })
}

/// Picard solves at `δ·{1/4, 1/2, 1, 2, 4}`, `δ` from the local conditions with `c_local`.
pub fn run_picard_experiment(cfg: &RunConfig, settings: &PicardSettings) -> Result<ContractionReport> {
    cfg.validate()?;
    let exps = cfg.exponent_set()?;
    let m = cfg.m_f64();
    let coupling = Coupling::new(m).with_dealias(cfg.dealias);
    let state = initial_state(cfg)?;
    let mass = state.u.l2_norm();
    let n_half = crate::diagnostics::n_pm_half_norm(&state);
    let base_delta = local_delta(mass, n_half, &exps, cfg.c_local)?.delta;

    let mut rows = Vec::new();
    for factor in DELTA_LADDER {
        let delta = factor * base_delta;
        let pc = PicardConfig {
            delta,
            quad_points: settings.quad_points,
            max_iters: settings.max_iters,
            fp_tolerance: settings.fp_tolerance,
            norm_exponents: exps.clone(),
            quadrature: settings.quadrature,
            c_local: cfg.c_local,
            exec: settings.exec,
        };
        let steps = (delta / cfg.dt.min(delta / 16.0) - 1e-9).ceil().max(1.0) as usize;
        let splitting_dt = delta / steps as f64;
        let row = match picard_local_solve(&state, &pc, &coupling) {
            Ok(out) => {
                let reference = integrate(&state, splitting_dt, steps, &coupling)?;
                ContractionRow {
                    factor,
                    delta,
                    compliant: out.compliant,
                    converged: true,
                    iterations: out.log.len(),
                    max_ratio: out.max_ratio,
                    endpoint_error: Some(relative_state_error(&out.state, &reference)?),
                    splitting_dt,
                }
            }
            Err(KlsError::NoConvergence { iterations, ratios }) => ContractionRow {
                factor,
                delta,
                compliant: delta <= base_delta,
                converged: false,
                iterations,
                max_ratio: ratios.iter().fold(0.0, |a: f64, &r| if r.is_nan() { f64::INFINITY } else { a.max(r) }),
                endpoint_error: None,
                splitting_dt,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(ContractionReport { base_delta, rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub status: String,
    pub t_end: f64,
    pub rows: usize,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub max_wave_size: f64,
    pub doublings: usize,
    pub fitted: Option<(f64, f64)>,
    pub first_delta: f64,
    /// `N·δ` of the first window when the doubling forecast applies.
    pub first_advance: Option<f64>,
    pub witness: Option<(Q, Q)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub label: String,
    pub outcome: std::result::Result<SweepSummary, String>,
}

pub const SWEEP_HEADER: &str = "label,status,t_end,rows,mass_drift,energy_drift,max_wave_size,doublings,fitted_c_front,fitted_c_rate,first_delta,first_advance,witness_theta,witness_epsilon,error";

impl SweepCell {
    pub fn to_csv(&self) -> String {
        match &self.outcome {
            Ok(s) => {
                let (front, rate) = s.fitted.map_or((String::new(), String::new()), |(a, b)| (format!("{a:e}"), format!("{b:e}")));
                let (th, ep) = s.witness.map_or((String::new(), String::new()), |(a, b)| (rational::render(a), rational::render(b)));
                format!(
                    "{},{},{:e},{},{:e},{:e},{:e},{},{},{},{:e},{},{},{},",
                    self.label,
                    s.status,
                    s.t_end,
                    s.rows,
                    s.mass_drift,
                    s.energy_drift,
                    s.max_wave_size,
                    s.doublings,
                    front,
                    rate,
                    s.first_delta,
                    s.first_advance.map_or(String::new(), |a| format!("{a:e}")),
                    th,
                    ep
                )
            }
            Err(e) => format!("{},failed,,,,,,,,,,,,,{}", self.label, e.replace([',', '\n'], ";")),
        }
    }
}

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for c in cells {
        s.push_str(&c.to_csv());
        s.push('\n');
    }
    s
}

/// Cartesian product of `axes` layered over `base`. Labels are `key=value;...`.
pub fn sweep_grid(base: &RunConfig, axes: &[(String, Vec<String>)]) -> Result<Vec<(String, RunConfig)>> {
    let mut cells = vec![(String::new(), base.clone())];
    for (key, values) in axes {
        let mut next = Vec::with_capacity(cells.len() * values.len());
        for (label, cfg) in &cells {
            for v in values {
                let mut c = cfg.clone();
                c.set(key, v)?;
                let l = if label.is_empty() { format!("{key}={v}") } else { format!("{label};{key}={v}") };
                next.push((l, c));
            }
        }
        cells = next;
    }
    for (_, c) in &cells {
        c.validate()?;
    }
    Ok(cells)
}

fn sanitize(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

fn summarize(cfg: &RunConfig) -> Result<SweepSummary> {
    let h = run_global(cfg)?;
    let witness = admissible_region(cfg.m).witness;
    Ok(SweepSummary {
        status: match &h.status {
            RunStatus::Completed => "completed".into(),
            RunStatus::Halted { .. } => "halted".into(),
        },
        t_end: h.final_state.time,
        rows: h.rows.len(),
        mass_drift: h.relative_mass_drift(),
        energy_drift: h.relative_energy_drift(),
        max_wave_size: h.rows.iter().map(|r| r.wave_size()).fold(0.0, f64::max),
        doublings: h.doubling_events.len(),
        fitted: h.growth.fitted,
        first_delta: h.schedule_log.first().map_or(f64::NAN, |e| e.delta),
        first_advance: h.schedule_log.first().and_then(|e| e.forecast.advance()).filter(|a| a.is_finite()),
        witness,
    })
}

/// Runs every cell (in parallel under [`Exec::Parallel`]); results are sorted by label.
///
/// With `out` set, each cell writes into its own subdirectory and the merged
/// summary goes to `out/sweep.csv`.
pub fn sweep(cells: &[(String, RunConfig)], exec: Exec, out: Option<&Path>) -> Result<Vec<SweepCell>> {
    let mut results = par::map(exec, cells, |(label, cfg)| {
        let mut cfg = cfg.clone();
        if let Some(dir) = out {
            cfg.out_dir = Some(dir.join(sanitize(label)));
        }
        SweepCell { label: label.clone(), outcome: summarize(&cfg).map_err(|e| e.to_string()) }
    });
    results.sort_by(|a, b| a.label.cmp(&b.label));
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("sweep.csv"), sweep_csv(&results))?;
    }
    Ok(results)
}

pub const REGION_HEADER: &str = "m,theta,epsilon,vertex_index";

#[derive(Clone, Debug, PartialEq)]
pub struct RegionFigure {
    pub m: Q,
    pub feasible: bool,
    /// Closed polyline; the first vertex is repeated at the end. An infeasible
    /// region has only the header followed by `# infeasible`.
    pub csv: String,
}

impl RegionFigure {
    pub fn file_name(&self) -> String {
        format!("region_m_{}.csv", rational::render(self.m).replace('/', "_"))
    }
}

/// Interior representatives of `[1, 1+√2/2]`, `[1+√2/2, 1+√3/2]`, `[1+√3/2, 2)`: midpoints rounded to `1/10000`.
pub fn caption_representatives() -> [Q; 3] {
    let r2 = std::f64::consts::SQRT_2;
    let r3 = 3f64.sqrt();
    let round = |x: f64| Q::new((x * 10000.0).round() as i128, 10000);
    [round(1.0 + r2 / 4.0), round(1.0 + (r2 + r3) / 4.0), round(1.5 + r3 / 4.0)]
}

pub fn region_figure(m: Q) -> RegionFigure {
    let report = admissible_region(m);
    let mut csv = format!("{REGION_HEADER}\n");
    let mr = rational::render(m);
    if report.feasible {
        let n = report.vertices.len();
        for i in 0..=n {
            let v = &report.vertices[i % n];
            csv.push_str(&format!("{mr},{},{},{i}\n", rational::render(v.theta), rational::render(v.epsilon)));
        }
    } else {
        csv.push_str("# infeasible\n");
    }
    RegionFigure { m, feasible: report.feasible, csv }
}

/// Polylines for each `m` in `ms` plus the three caption representatives, written to `dir` when given.
pub fn emit_region_figures(ms: &[Q], dir: Option<&Path>) -> Result<Vec<(RegionFigure, Option<PathBuf>)>> {
    let mut all: Vec<Q> = ms.to_vec();
    for r in caption_representatives() {
        if !all.contains(&r) {
            all.push(r);
        }
    }
    let mut out = Vec::with_capacity(all.len());
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    for m in all {
        let fig = region_figure(m);
        let path = match dir {
            Some(d) => {
                let p = d.join(fig.file_name());
                fs::write(&p, &fig.csv)?;
                Some(p)
            }
            None => None,
        };
        out.push((fig, path));
    }
    Ok(out)
}
