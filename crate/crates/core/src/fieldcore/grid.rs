use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{KlsError, Result};

/// Uniform periodic grid on `[-L/2, L/2)` with `num_points` samples.
///
/// Wavenumbers are stored in FFT order: `k_j = 2πj/L` for `j = 0..N/2-1`,
/// then `j = -N/2..-1`. Index `N/2` is the unpaired Nyquist mode.
#[derive(Clone, Debug)]
pub struct Grid {
    num_points: usize,
    domain_length: f64,
    wavenumbers: Arc<[f64]>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.num_points == other.num_points && self.domain_length == other.domain_length
    }
}

impl Grid {
    pub fn new(num_points: usize, domain_length: f64) -> Result<Self> {
        if num_points < 8 || num_points % 2 != 0 {
            return Err(KlsError::InvalidParameter(format!(
                "num_points must be even and >= 8, got {num_points}"
            )));
        }
        if !(domain_length.is_finite() && domain_length > 0.0) {
            return Err(KlsError::InvalidParameter(format!(
                "domain_length must be positive and finite, got {domain_length}"
            )));
        }
        let wavenumbers = (0..num_points)
            .map(|j| 2.0 * PI * signed_index(j, num_points) as f64 / domain_length)
            .collect();
        Ok(Self { num_points, domain_length, wavenumbers })
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn dx(&self) -> f64 {
        self.domain_length / self.num_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.domain_length + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.num_points).map(|j| self.x(j)).collect()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn nyquist_index(&self) -> usize {
        self.num_points / 2
    }

    /// Storage index of the signed mode number `j` (`-N/2 <= j < N/2`).
    pub fn mode_index(&self, j: i64) -> usize {
        j.rem_euclid(self.num_points as i64) as usize
    }

    /// 2/3-rule: modes with `|j| > N/3` are removed by the dealias filter.
    pub fn dealias_cutoff(&self) -> usize {
        self.num_points / 3
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(KlsError::GridMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.num_points, self.domain_length, other.num_points, other.domain_length
            )))
        }
    }
}

/// Signed mode number of storage index `j`.
pub fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(9, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, f64::NAN).is_err());
    }

    #[test]
    fn wavenumbers_antisymmetric_except_nyquist() {
        let g = Grid::new(16, 10.0).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k.len(), 16);
        assert_eq!(k[0], 0.0);
        for j in 1..8 {
            assert!((k[j] + k[16 - j]).abs() < 1e-15);
        }
        assert!((k[8] + 2.0 * PI * 8.0 / 10.0).abs() < 1e-12);
        assert_eq!(g.mode_index(-1), 15);
        assert_eq!(g.mode_index(3), 3);
    }
}
