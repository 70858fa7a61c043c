//! Picard iteration of the Duhamel formulation on a local window `[0, δ]`.
//!
//! ```text
//! u(t)  = U(t)u₀ + i m ∫₀ᵗ U(t−s)[(n₊+n₋)|u|^{2(m−1)}u](s) ds
//! n±(t) = W±(t)n±(0) ∓ (i/2) ∫₀ᵗ W±(t−s) A⁻¹|u|^{2m}(s) ds
//! ```
//!
//! The integrals are evaluated mode-wise in the interaction picture on uniform
//! time nodes. Iterates are compared in the proxy norm
//! `‖Δu‖_{X^{0,b₁}} + ‖Δn₊‖_{X^{1/2,b₂}_+} + ‖Δn₋‖_{X^{1/2,b₂}_−}`, evaluated on
//! the even reflection of the window (a continuous periodic extension).

use num_complex::Complex64;

use super::splitting::Coupling;
use crate::error::{KlsError, Result};
use crate::exponents::{local_delta, ExponentSet};
use crate::fieldcore::{bracket, fft, SimState, SpectralField};
use crate::par::{self, Exec};
use crate::xsb::{xsb_norm, DispersionSymbol, SpaceTimeField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quadrature {
    /// Composite Simpson on node pairs; odd nodes use the matching three-point partial rule.
    Simpson,
    /// Two-point Gauss–Legendre on each sub-interval applied to the local cubic interpolant.
    GaussLegendre,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PicardConfig {
    pub delta: f64,
    pub quad_points: usize,
    pub max_iters: usize,
    /// Relative to the proxy norm of the free evolution.
    pub fp_tolerance: f64,
    pub norm_exponents: ExponentSet,
    pub quadrature: Quadrature,
    /// Constant used only for the compliance report against the local conditions.
    pub c_local: f64,
    pub exec: Exec,
}

impl PicardConfig {
    pub fn new(delta: f64, norm_exponents: ExponentSet) -> Self {
        Self {
            delta,
            quad_points: 33,
            max_iters: 60,
            fp_tolerance: 1e-10,
            norm_exponents,
            quadrature: Quadrature::Simpson,
            c_local: 1.0,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(KlsError::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        if self.quad_points < 8 {
            return Err(KlsError::InvalidParameter("quad_points must be >= 8".into()));
        }
        if self.quadrature == Quadrature::Simpson && self.quad_points % 2 == 0 {
            return Err(KlsError::InvalidParameter("Simpson quadrature needs an odd number of nodes".into()));
        }
        if !(self.fp_tolerance.is_finite() && self.fp_tolerance > 0.0) {
            return Err(KlsError::InvalidParameter("fp_tolerance must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(KlsError::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }

    pub fn node_spacing(&self) -> f64 {
        self.delta / (self.quad_points - 1) as f64
    }
}

/// Fields on the nodes `t_j = t₀ + j·δ/(Q−1)`, `j = 0..Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub spacing: f64,
    pub u: Vec<SpectralField>,
    pub n_plus: Vec<SpectralField>,
    pub n_minus: Vec<SpectralField>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `(u, n₊, n₋)` as space-time fields on the evenly reflected window.
    pub fn space_time(&self) -> Result<[SpaceTimeField; 3]> {
        Ok([reflect(&self.u, self.t0, self.spacing)?, reflect(&self.n_plus, self.t0, self.spacing)?, reflect(
            &self.n_minus,
            self.t0,
            self.spacing,
        )?])
    }

    fn endpoint(&self, time: f64) -> SimState {
        SimState {
            u: self.u.last().expect("nonempty").clone(),
            n_plus: self.n_plus.last().expect("nonempty").clone(),
            n_minus: self.n_minus.last().expect("nonempty").clone(),
            time,
        }
    }
}

fn reflect(slices: &[SpectralField], t0: f64, dt: f64) -> Result<SpaceTimeField> {
    let mut all: Vec<SpectralField> = slices.to_vec();
    all.extend(slices[1..slices.len() - 1].iter().rev().cloned());
    SpaceTimeField::from_slices(t0, dt, &all)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Proxy-norm distance between iterate `k+1` and iterate `k`.
    pub distance: f64,
    /// `distance_k / distance_{k−1}`.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PicardOutcome {
    pub state: SimState,
    pub trajectory: Trajectory,
    pub log: Vec<IterationRecord>,
    /// Largest measured contraction ratio (0 when the first map already fixed the iterate).
    pub max_ratio: f64,
    /// `δ` allowed by the local conditions with `c_local` from the config.
    pub delta_bound: f64,
    pub compliant: bool,
}

struct Window<'a> {
    state: &'a SimState,
    cfg: &'a PicardConfig,
    coupling: &'a Coupling,
    times: Vec<f64>,
}

impl Window<'_> {
    /// Free evolution on all nodes.
    fn free(&self) -> Trajectory {
        let zero = vec![vec![Complex64::new(0.0, 0.0); self.state.grid().num_points()]; self.times.len()];
        self.assemble(&zero, &zero, &zero)
    }

    /// Builds the trajectory from the cumulative interaction-picture integrals.
    fn assemble(&self, iu: &[Vec<Complex64>], ip: &[Vec<Complex64>], iq: &[Vec<Complex64>]) -> Trajectory {
        let grid = self.state.grid();
        let k = grid.wavenumbers();
        let m = self.coupling.m;
        let g = self.coupling.strength;
        let u0 = self.state.u.spectrum();
        let p0 = self.state.n_plus.spectrum();
        let q0 = self.state.n_minus.spectrum();
        let i = Complex64::new(0.0, 1.0);
        let slices = par::map_range(self.cfg.exec, self.times.len(), |j| {
            let t = self.times[j];
            let mut su = Vec::with_capacity(k.len());
            let mut sp = Vec::with_capacity(k.len());
            let mut sq = Vec::with_capacity(k.len());
            for (idx, &kk) in k.iter().enumerate() {
                let w = bracket(kk);
                su.push(Complex64::from_polar(1.0, -kk * kk * t) * (u0[idx] + i * m * g * iu[j][idx]));
                sp.push(Complex64::from_polar(1.0, w * t) * (p0[idx] - 0.5 * i * g * ip[j][idx]));
                sq.push(Complex64::from_polar(1.0, -w * t) * (q0[idx] + 0.5 * i * g * iq[j][idx]));
            }
            let mk = |s| SpectralField::from_spectrum(grid, s).expect("length matches grid");
            (mk(su), mk(sp), mk(sq))
        });
        let mut traj = Trajectory {
            t0: self.state.time,
            spacing: self.cfg.node_spacing(),
            u: Vec::with_capacity(slices.len()),
            n_plus: Vec::with_capacity(slices.len()),
            n_minus: Vec::with_capacity(slices.len()),
        };
        for (a, b, c) in slices {
            traj.u.push(a);
            traj.n_plus.push(b);
            traj.n_minus.push(c);
        }
        traj
    }

    /// One application of the Duhamel map.
    fn apply(&self, x: &Trajectory) -> Trajectory {
        let grid = self.state.grid();
        let k = grid.wavenumbers();
        let m = self.coupling.m;
        let dealias = self.coupling.dealias;
        let cutoff = grid.dealias_cutoff() as i64;
        let n = grid.num_points();
        let keep = |idx: usize| !dealias || crate::fieldcore::signed_index(idx, n).abs() <= cutoff && idx != n / 2;

        // Interaction-picture integrands on every node.
        let integrands = par::map_range(self.cfg.exec, self.times.len(), |j| {
            let t = self.times[j];
            let mut f: Vec<Complex64> = x.u[j]
                .values()
                .iter()
                .zip(x.n_plus[j].values())
                .zip(x.n_minus[j].values())
                .map(|((&u, &p), &q)| (p + q) * u * self.coupling.modulus_power(u))
                .collect();
            let mut s: Vec<Complex64> =
                x.u[j].values().iter().map(|u| Complex64::new(u.norm_sqr().powf(m), 0.0)).collect();
            fft::forward_in_place(&mut f);
            fft::forward_in_place(&mut s);
            let mut gu = Vec::with_capacity(n);
            let mut gp = Vec::with_capacity(n);
            let mut gq = Vec::with_capacity(n);
            for (idx, &kk) in k.iter().enumerate() {
                if !keep(idx) {
                    gu.push(Complex64::new(0.0, 0.0));
                    gp.push(Complex64::new(0.0, 0.0));
                    gq.push(Complex64::new(0.0, 0.0));
                    continue;
                }
                let w = bracket(kk);
                let src = s[idx] / w;
                gu.push(Complex64::from_polar(1.0, kk * kk * t) * f[idx]);
                gp.push(Complex64::from_polar(1.0, -w * t) * src);
                gq.push(Complex64::from_polar(1.0, w * t) * src);
            }
            (gu, gp, gq)
        });
        let (mut gu, mut gp, mut gq) = (Vec::new(), Vec::new(), Vec::new());
        for (a, b, c) in integrands {
            gu.push(a);
            gp.push(b);
            gq.push(c);
        }
        let h = self.cfg.node_spacing();
        let rule = self.cfg.quadrature;
        self.assemble(&cumulative(&gu, h, rule), &cumulative(&gp, h, rule), &cumulative(&gq, h, rule))
    }

    fn distance(&self, a: &Trajectory, b: &Trajectory) -> Result<f64> {
        let diff = |x: &[SpectralField], y: &[SpectralField]| -> Result<Vec<SpectralField>> {
            x.iter().zip(y).map(|(p, q)| p.sub(q)).collect()
        };
        let d = Trajectory {
            t0: a.t0,
            spacing: a.spacing,
            u: diff(&a.u, &b.u)?,
            n_plus: diff(&a.n_plus, &b.n_plus)?,
            n_minus: diff(&a.n_minus, &b.n_minus)?,
        };
        proxy_norm(&d, &self.cfg.norm_exponents)
    }
}

/// `‖u‖_{X^{0,b₁}} + ‖n₊‖_{X^{1/2,b₂}_+} + ‖n₋‖_{X^{1/2,b₂}_−}` on the reflected window.
pub fn proxy_norm(traj: &Trajectory, exps: &ExponentSet) -> Result<f64> {
    let [u, p, q] = traj.space_time()?;
    let b1 = exps.b1_f64();
    let b2 = crate::exponents::rational::to_f64(exps.b2);
    Ok(xsb_norm(&u, 0.0, b1, DispersionSymbol::Schrodinger)?
        + xsb_norm(&p, 0.5, b2, DispersionSymbol::Plus)?
        + xsb_norm(&q, 0.5, b2, DispersionSymbol::Minus)?)
}

/// Cumulative integrals `∫_{t₀}^{t_j} g` on uniform nodes, vectorized over modes.
pub fn cumulative(g: &[Vec<Complex64>], h: f64, rule: Quadrature) -> Vec<Vec<Complex64>> {
    let nodes = g.len();
    let width = g.first().map_or(0, Vec::len);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); width]; nodes];
    let combo = |out_row: &mut Vec<Complex64>, base: &Vec<Complex64>, terms: &[(f64, usize)]| {
        for (idx, o) in out_row.iter_mut().enumerate() {
            let mut acc = base[idx];
            for &(w, j) in terms {
                acc += g[j][idx] * (w * h);
            }
            *o = acc;
        }
    };
    match rule {
        Quadrature::Simpson => {
            for j in 1..nodes {
                let (done, rest) = out.split_at_mut(j);
                if j % 2 == 0 {
                    combo(&mut rest[0], &done[j - 2], &[(1.0 / 3.0, j - 2), (4.0 / 3.0, j - 1), (1.0 / 3.0, j)]);
                } else {
                    combo(&mut rest[0], &done[j - 1], &[(5.0 / 12.0, j - 1), (8.0 / 12.0, j), (-1.0 / 12.0, j + 1)]);
                }
            }
        }
        Quadrature::GaussLegendre => {
            for j in 1..nodes {
                let (done, rest) = out.split_at_mut(j);
                let a = j - 1;
                let terms: [(f64, usize); 4] = if a == 0 {
                    [(9.0 / 24.0, 0), (19.0 / 24.0, 1), (-5.0 / 24.0, 2), (1.0 / 24.0, 3)]
                } else if a + 2 >= nodes {
                    [(1.0 / 24.0, a - 2), (-5.0 / 24.0, a - 1), (19.0 / 24.0, a), (9.0 / 24.0, a + 1)]
                } else {
                    [(-1.0 / 24.0, a - 1), (13.0 / 24.0, a), (13.0 / 24.0, a + 1), (-1.0 / 24.0, a + 2)]
                };
                combo(&mut rest[0], &done[a], &terms);
            }
        }
    }
    out
}

pub fn picard_local_solve(state: &SimState, cfg: &PicardConfig, coupling: &Coupling) -> Result<PicardOutcome> {
    cfg.validate()?;
    coupling.validate()?;
    state.check_finite()?;
    let h = cfg.node_spacing();
    let window = Window {
        state,
        cfg,
        coupling,
        times: (0..cfg.quad_points).map(|j| j as f64 * h).collect(),
    };

    let mass = state.u.l2_norm();
    let n_half = crate::diagnostics::n_pm_half_norm(state);
    let delta_bound = local_delta(mass, n_half, &cfg.norm_exponents, cfg.c_local)?.delta;

    let mut current = window.free();
    let scale = proxy_norm(&current, &cfg.norm_exponents)?;
    let mut log: Vec<IterationRecord> = Vec::new();
    for iteration in 0..cfg.max_iters {
        let next = window.apply(&current);
        let distance = window.distance(&next, &current)?;
        let ratio = log.last().map(|prev| if prev.distance > 0.0 { distance / prev.distance } else { 0.0 });
        log.push(IterationRecord { iteration, distance, ratio });
        current = next;
        if !distance.is_finite() {
            break;
        }
        if distance <= cfg.fp_tolerance * scale {
            let max_ratio = log.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
            return Ok(PicardOutcome {
                state: current.endpoint(state.time + cfg.delta),
                trajectory: current,
                log,
                max_ratio,
                delta_bound,
                compliant: cfg.delta <= delta_bound,
            });
        }
    }
    Err(KlsError::NoConvergence { iterations: log.len(), ratios: log.iter().filter_map(|r| r.ratio).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_rule(rule: Quadrature, degree: i32) {
        let nodes = 17;
        let h = 0.125;
        let g: Vec<Vec<Complex64>> = (0..nodes)
            .map(|j| {
                let t = j as f64 * h;
                vec![Complex64::new(t.powi(degree), 1.0 - t)]
            })
            .collect();
        let out = cumulative(&g, h, rule);
        for (j, row) in out.iter().enumerate() {
            let t = j as f64 * h;
            let exact = Complex64::new(t.powi(degree + 1) / (degree + 1) as f64, t - 0.5 * t * t);
            assert!((row[0] - exact).norm() < 1e-13, "{rule:?} node {j}");
        }
    }

    #[test]
    fn simpson_is_exact_for_quadratics() {
        check_rule(Quadrature::Simpson, 2);
    }

    #[test]
    fn four_point_rule_is_exact_for_cubics() {
        check_rule(Quadrature::GaussLegendre, 3);
    }

    #[test]
    fn config_validation() {
        let exps = crate::exponents::auto_exponents(crate::exponents::rational::q(1, 1)).unwrap();
        let mut cfg = PicardConfig::new(0.5, exps);
        cfg.validate().unwrap();
        cfg.quad_points = 32;
        assert!(cfg.validate().is_err());
        cfg.quadrature = Quadrature::GaussLegendre;
        cfg.validate().unwrap();
        cfg.quad_points = 4;
        assert!(cfg.validate().is_err());
    }
}
