use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::checkpoint::Checkpoint;
use super::config::{Preset, RunConfig};
use crate::error::{KlsError, Result};
use crate::fieldcore::{Grid, SimState, SpectralField};

/// Highest signed mode of the `ic.noise` perturbation.
const NOISE_MODES: i64 = 8;

fn gaussian(x: f64, center: f64, width: f64) -> f64 {
    (-((x - center) / width).powi(2)).exp()
}

fn noise(grid: &Grid, amplitude: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.num_points();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for j in -NOISE_MODES..=NOISE_MODES {
        let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        spectrum[grid.mode_index(j)] = c;
    }
    let f = SpectralField::from_spectrum(grid, spectrum).expect("grid length");
    let peak = f.max_abs().max(f64::MIN_POSITIVE);
    f.scale(Complex64::new(amplitude / peak, 0.0))
}

/// Initial state for `cfg`. Checkpoints bring their own grid and time.
pub fn initial_state(cfg: &RunConfig) -> Result<SimState> {
    let p = &cfg.ic_params;
    if cfg.ic == Preset::FromCheckpoint {
        let path = p.path.as_ref().ok_or_else(|| KlsError::Config("from-checkpoint needs ic.path".into()))?;
        let ck = Checkpoint::load(path)?;
        if (ck.m - cfg.m_f64()).abs() > 1e-12 {
            return Err(KlsError::Config(format!("checkpoint was written with m = {}, config has {}", ck.m, cfg.m_f64())));
        }
        return Ok(ck.state);
    }
    let grid = Grid::new(cfg.num_points, cfg.domain_length)?;
    let (u0, n0, n1) = match cfg.ic {
        Preset::Gaussian => (
            SpectralField::from_fn(&grid, |x| Complex64::from_polar(p.amplitude * gaussian(x, p.center, p.width), p.velocity * x)),
            SpectralField::from_fn(&grid, |x| Complex64::new(p.n_amplitude * gaussian(x, p.n_center, p.n_width), 0.0)),
            SpectralField::from_fn(&grid, |x| Complex64::new(p.nt_amplitude * gaussian(x, p.n_center, p.n_width), 0.0)),
        ),
        Preset::PlaneWave => {
            let kn = 2.0 * std::f64::consts::PI * p.n_mode as f64 / grid.domain_length();
            (
                SpectralField::plane_wave(&grid, p.mode, Complex64::new(p.amplitude, 0.0)),
                SpectralField::from_fn(&grid, |x| Complex64::new(p.n_amplitude * (kn * x).cos(), 0.0)),
                SpectralField::zeros(&grid),
            )
        }
        Preset::TwoBump => {
            let half = 0.5 * p.separation;
            (
                SpectralField::from_fn(&grid, |x| {
                    Complex64::from_polar(p.amplitude * gaussian(x, -half, p.width), p.velocity * x)
                        + Complex64::from_polar(p.amplitude * gaussian(x, half, p.width), -p.velocity * x)
                }),
                SpectralField::from_fn(&grid, |x| Complex64::new(p.n_amplitude * gaussian(x, p.n_center, p.n_width), 0.0)),
                SpectralField::from_fn(&grid, |x| Complex64::new(p.nt_amplitude * gaussian(x, p.n_center, p.n_width), 0.0)),
            )
        }
        Preset::FromCheckpoint => unreachable!("handled above"),
    };
    let u0 = if p.noise > 0.0 { u0.add(&noise(&grid, p.noise, cfg.seed))? } else { u0 };
    SimState::from_initial(u0, &n0, &n1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build_real_wave_fields() {
        for preset in ["gaussian", "plane-wave", "two-bump"] {
            let mut cfg = RunConfig::default();
            cfg.set("ic", preset).unwrap();
            cfg.set("ic.noise", "0.05").unwrap();
            let s = initial_state(&cfg).unwrap();
            assert!(s.reality_defect() < 1e-12, "{preset}");
            assert!(s.u.l2_norm() > 0.0);
        }
    }

    #[test]
    fn noise_is_seeded() {
        let g = Grid::new(64, 10.0).unwrap();
        assert_eq!(noise(&g, 0.1, 7), noise(&g, 0.1, 7));
        assert_ne!(noise(&g, 0.1, 7), noise(&g, 0.1, 8));
        assert!((noise(&g, 0.1, 7).max_abs() - 0.1).abs() < 1e-15);
    }
}
