use std::fmt::Write as _;

use crate::error::Result;
use crate::fieldcore::{bracket, derivative, SimState, SpectralField};

/// Relative tolerance on `max |Im|` for the fields handed to [`energy`].
pub const ENERGY_REAL_TOL: f64 = 1e-8;

pub const CSV_HEADER: &str = "t,mass,energy,n_half,nt_minus_half,bound_value,doubled";

/// `‖u‖_{L²}`.
pub fn mass(u: &SpectralField) -> f64 {
    sobolev_norm(u, 0.0)
}

/// `‖⟨k⟩^s û‖` under the Plancherel normalization.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    if s == 0.0 {
        return field.weighted_norm(|_| 1.0);
    }
    field.weighted_norm(|k| (1.0 + k * k).powf(s))
}

/// `‖u_x‖² + ½(‖An‖² + ‖n_t‖²) − ∫|u|^{2m} n dx`.
pub fn energy(u: &SpectralField, n: &SpectralField, n_t: &SpectralField, m: f64) -> Result<f64> {
    u.grid().check_same(n.grid())?;
    u.grid().check_same(n_t.grid())?;
    n.check_real("n", ENERGY_REAL_TOL)?;
    n_t.check_real("n_t", ENERGY_REAL_TOL)?;
    let kinetic = derivative(u).l2_norm().powi(2);
    let wave = 0.5 * (sobolev_norm(n, 1.0).powi(2) + n_t.l2_norm().powi(2));
    let coupling = u
        .values()
        .iter()
        .zip(n.values())
        .map(|(v, w)| v.norm_sqr().powf(m) * w.re)
        .sum::<f64>()
        * u.grid().dx();
    Ok(kinetic + wave - coupling)
}

pub fn state_energy(state: &SimState, m: f64) -> Result<f64> {
    let (n, n_t) = state.n_and_nt()?;
    energy(&state.u, &n, &n_t, m)
}

/// `max(‖n₊‖_{H^{1/2}}, ‖n₋‖_{H^{1/2}})`; the two agree for real `n`.
pub fn n_pm_half_norm(state: &SimState) -> f64 {
    sobolev_norm(&state.n_plus, 0.5).max(sobolev_norm(&state.n_minus, 0.5))
}

/// One line of a run history.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub time: f64,
    pub mass: f64,
    pub energy: f64,
    pub n_half: f64,
    pub nt_minus_half: f64,
    pub bound_value: f64,
    pub doubled: bool,
}

impl DiagnosticsRow {
    /// `‖n‖_{H^{1/2}} + ‖n_t‖_{H^{−1/2}}`.
    pub fn wave_size(&self) -> f64 {
        self.n_half + self.nt_minus_half
    }

    pub fn is_finite(&self) -> bool {
        [self.time, self.mass, self.energy, self.n_half, self.nt_minus_half, self.bound_value]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Columns in [`CSV_HEADER`] order; floats use Rust's shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{:e},{:e},{:e},{:e},{:e},{:e},{}",
            self.time,
            self.mass,
            self.energy,
            self.n_half,
            self.nt_minus_half,
            self.bound_value,
            u8::from(self.doubled)
        );
        s
    }
}

/// Row for `state` with `bound_value = 0` and `doubled = false`.
pub fn row_for_state(state: &SimState, m: f64) -> Result<DiagnosticsRow> {
    let (n, n_t) = state.n_and_nt()?;
    Ok(DiagnosticsRow {
        time: state.time,
        mass: mass(&state.u),
        energy: energy(&state.u, &n, &n_t, m)?,
        n_half: sobolev_norm(&n, 0.5),
        nt_minus_half: n_t.weighted_norm(|k| 1.0 / bracket(k)),
        bound_value: 0.0,
        doubled: false,
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::fieldcore::Grid;

    #[test]
    fn plane_wave_norms() {
        let g = Grid::new(64, 10.0).unwrap();
        let a = 1.7;
        let f = SpectralField::plane_wave(&g, 3, Complex64::new(a, 0.0));
        let k = 2.0 * std::f64::consts::PI * 3.0 / 10.0;
        assert!((mass(&f) - a * 10f64.sqrt()).abs() < 1e-12);
        let expect = a * 10f64.sqrt() * (1.0 + k * k).powf(0.35);
        assert!((sobolev_norm(&f, 0.7) - expect).abs() < 1e-12 * expect);
        assert_eq!(mass(&SpectralField::zeros(&g)), 0.0);
    }

    #[test]
    fn zero_energy_and_wave_quadratic_form() {
        let g = Grid::new(64, 10.0).unwrap();
        let z = SpectralField::zeros(&g);
        assert_eq!(energy(&z, &z, &z, 1.0).unwrap(), 0.0);
        let k0 = 2.0 * std::f64::consts::PI * 2.0 / 10.0;
        let n = SpectralField::from_fn(&g, |x| Complex64::new((k0 * x).cos(), 0.0));
        let n = n.scale(Complex64::new(1.0 / n.l2_norm(), 0.0));
        let e = energy(&z, &n, &z, 1.5).unwrap();
        assert!((e - 0.5 * (1.0 + k0 * k0)).abs() < 1e-12);
    }

    #[test]
    fn energy_rejects_complex_n() {
        let g = Grid::new(32, 10.0).unwrap();
        let z = SpectralField::zeros(&g);
        let n = SpectralField::plane_wave(&g, 1, Complex64::new(1.0, 0.0));
        assert!(energy(&z, &n, &z, 1.0).is_err());
    }

    #[test]
    fn csv_row_column_count() {
        let r = DiagnosticsRow {
            time: 0.5,
            mass: 1.0,
            energy: -0.25,
            n_half: 2.0,
            nt_minus_half: 0.0,
            bound_value: 3.0,
            doubled: true,
        };
        assert_eq!(r.to_csv().split(',').count(), CSV_HEADER.split(',').count());
        assert!(r.to_csv().ends_with(",1"));
    }
}
