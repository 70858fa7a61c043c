//! Strang splitting of the reduced system into its linear part and its
//! nonlinear part, each solved exactly.

use num_complex::Complex64;

use super::propagator::Propagator;
use crate::error::{KlsError, Result};
use crate::fieldcore::{bracket, SimState, SpectralField};
use crate::xsb::DispersionSymbol;

/// Relative tolerance for `n₋ = conj(n₊)` at entry to a nonlinear substep.
pub const SUBSTEP_REALITY_TOL: f64 = 1e-8;

/// Nonlinear coupling of the system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    /// Power `m` of the Yukawa coupling, `1 <= m`.
    pub m: f64,
    /// Multiplies both nonlinear terms; `1` is the physical system and `0` decouples it.
    pub strength: f64,
    /// Apply the 2/3-rule filter after every nonlinear substep.
    pub dealias: bool,
}

impl Coupling {
    pub fn new(m: f64) -> Self {
        Self { m, strength: 1.0, dealias: true }
    }

    /// Same `m`, nonlinearity switched off.
    pub fn decoupled(m: f64) -> Self {
        Self { m, strength: 0.0, dealias: true }
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m >= 1.0) {
            return Err(KlsError::InvalidParameter(format!("m must be >= 1, got {}", self.m)));
        }
        if !self.strength.is_finite() {
            return Err(KlsError::InvalidParameter("coupling strength must be finite".into()));
        }
        Ok(())
    }

    /// `(|u|²)^{m−1}`; equals 1 at `u = 0` when `m = 1` and 0 otherwise.
    #[inline]
    pub fn modulus_power(&self, u: Complex64) -> f64 {
        u.norm_sqr().powf(self.m - 1.0)
    }

    /// `A⁻¹(|u|^{2m})`.
    pub fn wave_source(&self, u: &SpectralField) -> SpectralField {
        let m = self.m;
        u.map_values(|v| Complex64::new(v.norm_sqr().powf(m), 0.0))
            .map_spectrum(|k, c| c / bracket(k))
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() {
        Ok(())
    } else {
        Err(KlsError::InvalidParameter(format!("dt must be finite, got {dt}")))
    }
}

/// Free flow of all three fields over `dt` (negative `dt` runs backwards).
pub fn linear_step(state: &SimState, dt: f64) -> Result<SimState> {
    check_dt(dt)?;
    state.check_finite()?;
    Ok(SimState {
        u: Propagator::new(DispersionSymbol::Schrodinger, dt).apply(&state.u),
        n_plus: Propagator::new(DispersionSymbol::Plus, dt).apply(&state.n_plus),
        n_minus: Propagator::new(DispersionSymbol::Minus, dt).apply(&state.n_minus),
        time: state.time + dt,
    })
}

/// Exact flow of the nonlinear terms alone.
///
/// `|u|` and `n = n₊ + n₋` are constant along this flow, so
/// `u ← u·exp(i m n |u|^{2(m−1)} dt)` and `n± ← n± ∓ (i/2) dt A⁻¹|u|^{2m}`.
pub fn nonlinear_substep(state: &SimState, dt: f64, coupling: &Coupling) -> Result<SimState> {
    coupling.validate()?;
    check_dt(dt)?;
    state.check_finite()?;
    let defect = state.reality_defect();
    if defect > SUBSTEP_REALITY_TOL {
        return Err(KlsError::NotReal { what: "n_plus + n_minus", residual: defect });
    }
    let g = coupling.strength;
    if g == 0.0 || dt == 0.0 {
        return Ok(SimState { time: state.time + dt, ..state.clone() });
    }
    let m = coupling.m;

    let rotated: Vec<Complex64> = state
        .u
        .values()
        .iter()
        .zip(state.n_plus.values())
        .zip(state.n_minus.values())
        .map(|((&u, &p), &q)| {
            let n = (p + q).re;
            u * Complex64::from_polar(1.0, g * m * n * coupling.modulus_power(u) * dt)
        })
        .collect();
    let u = SpectralField::from_values(state.grid(), rotated)?;

    let source = coupling.wave_source(&state.u);
    let kick = Complex64::new(0.0, 0.5 * g * dt);
    let n_plus = state.n_plus.combine(&source, |a, s| a - kick * s)?;
    let n_minus = state.n_minus.combine(&source, |a, s| a + kick * s)?;

    let next = if coupling.dealias {
        SimState { u: u.dealiased(), n_plus: n_plus.dealiased(), n_minus: n_minus.dealiased(), time: state.time + dt }
    } else {
        SimState { u, n_plus, n_minus, time: state.time + dt }
    };
    Ok(next)
}

/// `L(dt/2) ∘ N(dt) ∘ L(dt/2)`.
pub fn strang_step(state: &SimState, dt: f64, coupling: &Coupling) -> Result<SimState> {
    let half = linear_step(state, 0.5 * dt)?;
    let kicked = nonlinear_substep(&half, dt, coupling)?;
    let mut out = linear_step(&kicked, 0.5 * dt)?;
    out.time = state.time + dt;
    Ok(out)
}

/// `steps` Strang steps of size `dt`.
pub fn integrate(state: &SimState, dt: f64, steps: usize, coupling: &Coupling) -> Result<SimState> {
    let mut s = state.clone();
    for _ in 0..steps {
        s = strang_step(&s, dt, coupling)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldcore::{sobolev_multiplier, Grid};

    fn gaussian_state(grid: &Grid) -> SimState {
        let u0 = SpectralField::from_fn(grid, |x| Complex64::from_polar((-x * x / 4.0).exp(), 0.7 * x));
        let n0 = SpectralField::from_fn(grid, |x| Complex64::new(0.5 * (-(x - 1.0).powi(2) / 3.0).exp(), 0.0));
        let n1 = SpectralField::from_fn(grid, |x| Complex64::new(0.2 * x * (-x * x / 2.0).exp(), 0.0));
        SimState::from_initial(u0, &n0, &n1).unwrap()
    }

    fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.sub(b).unwrap().l2_norm() / b.l2_norm().max(1e-300)
    }

    #[test]
    fn zero_dt_linear_is_identity() {
        let g = Grid::new(64, 40.0).unwrap();
        let s = gaussian_state(&g);
        assert_eq!(linear_step(&s, 0.0).unwrap(), s);
    }

    #[test]
    fn linear_group_property_and_isometry() {
        let g = Grid::new(64, 40.0).unwrap();
        let s = gaussian_state(&g);
        let f = linear_step(&s, 0.731).unwrap();
        let back = linear_step(&f, -0.731).unwrap();
        assert!(rel_diff(&back.u, &s.u) < 1e-12);
        assert!(rel_diff(&back.n_plus, &s.n_plus) < 1e-12);
        for sob in [-0.5, 0.0, 0.5, 1.0] {
            for (a, b) in [(&f.u, &s.u), (&f.n_plus, &s.n_plus), (&f.n_minus, &s.n_minus)] {
                let na = sobolev_multiplier(a, sob).unwrap().l2_norm();
                let nb = sobolev_multiplier(b, sob).unwrap().l2_norm();
                assert!((na / nb - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_u_source_is_inert() {
        let g = Grid::new(32, 20.0).unwrap();
        let mut s = gaussian_state(&g);
        s.u = SpectralField::zeros(&g);
        let out = nonlinear_substep(&s, 0.1, &Coupling::new(1.0).with_dealias(false)).unwrap();
        assert_eq!(out.u.max_abs(), 0.0);
        assert!(rel_diff(&out.n_plus, &s.n_plus) < 1e-15);
    }

    #[test]
    fn zero_n_kicks_waves_only() {
        let g = Grid::new(32, 20.0).unwrap();
        let mut s = gaussian_state(&g);
        s.n_plus = SpectralField::zeros(&g);
        s.n_minus = SpectralField::zeros(&g);
        let dt = 0.05;
        let c = Coupling::new(1.0).with_dealias(false);
        let out = nonlinear_substep(&s, dt, &c).unwrap();
        assert!(rel_diff(&out.u, &s.u) < 1e-15);
        let src = c.wave_source(&s.u);
        let expected_plus = src.scale(Complex64::new(0.0, -0.5 * dt));
        assert!(rel_diff(&out.n_plus, &expected_plus) < 1e-14);
        assert!(rel_diff(&out.n_minus, &expected_plus.scale(Complex64::new(-1.0, 0.0))) < 1e-14);
    }

    #[test]
    fn substep_preserves_modulus_and_n() {
        let g = Grid::new(64, 30.0).unwrap();
        let s = gaussian_state(&g);
        for m in [1.0, 1.5, 1.9] {
            let out = nonlinear_substep(&s, 0.01, &Coupling::new(m).with_dealias(false)).unwrap();
            for (a, b) in out.u.values().iter().zip(s.u.values()) {
                assert!((a.norm() - b.norm()).abs() <= 1e-13);
            }
            let (n_before, nt_before) = s.n_and_nt().unwrap();
            let (n_after, nt_after) = out.n_and_nt().unwrap();
            assert!(rel_diff(&n_after, &n_before) < 1e-14);
            // n_t gains dt·|u|^{2m}.
            let expected = nt_before
                .zip_with(&s.u, |nt, u| nt + Complex64::new(0.01 * u.norm_sqr().powf(m), 0.0))
                .unwrap();
            assert!(rel_diff(&nt_after, &expected) < 1e-12, "{m} {}", rel_diff(&nt_after, &expected));
            assert!(out.reality_defect() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Grid::new(32, 20.0).unwrap();
        let s = gaussian_state(&g);
        assert!(nonlinear_substep(&s, 0.1, &Coupling::new(0.5)).is_err());
        assert!(linear_step(&s, f64::NAN).is_err());
        let mut bad = s.clone();
        bad.n_minus = s.n_plus.clone();
        assert!(nonlinear_substep(&bad, 0.1, &Coupling::new(1.0)).is_err());
    }

    #[test]
    fn decoupled_strang_is_linear_flow() {
        let g = Grid::new(64, 40.0).unwrap();
        let s = gaussian_state(&g);
        let a = strang_step(&s, 0.02, &Coupling::decoupled(1.0)).unwrap();
        let b = linear_step(&s, 0.02).unwrap();
        assert!(rel_diff(&a.u, &b.u) < 1e-12);
        assert!(rel_diff(&a.n_plus, &b.n_plus) < 1e-12);
    }

    #[test]
    fn strang_time_reversal() {
        let g = Grid::new(64, 40.0).unwrap();
        let s = gaussian_state(&g);
        let c = Coupling::new(1.3).with_dealias(false);
        let f = strang_step(&s, 1e-2, &c).unwrap();
        let back = strang_step(&f, -1e-2, &c).unwrap();
        assert!(rel_diff(&back.u, &s.u) < 1e-10);
        assert!(rel_diff(&back.n_plus, &s.n_plus) < 1e-10);
    }
}
