use super::field::SpectralField;
use super::grid::Grid;
use super::reduction::{decompose_n, reconstruct_n};
use crate::error::Result;

/// Relative tolerance for `n₋ = conj(n₊)`.
pub const REALITY_TOL: f64 = 1e-10;

/// Full state `(u, n₊, n₋)` of the reduced first-order system at `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub u: SpectralField,
    pub n_plus: SpectralField,
    pub n_minus: SpectralField,
    pub time: f64,
}

impl SimState {
    /// Builds the reduced state from `(u₀, n₀, n₁)` with real `n₀`, `n₁`.
    pub fn from_initial(u0: SpectralField, n0: &SpectralField, n1: &SpectralField) -> Result<Self> {
        u0.grid().check_same(n0.grid())?;
        let (n_plus, n_minus) = decompose_n(n0, n1)?;
        Ok(Self { u: u0, n_plus, n_minus, time: 0.0 })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let z = SpectralField::zeros(grid);
        Self { u: z.clone(), n_plus: z.clone(), n_minus: z, time: 0.0 }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// `(n, n_t)` recovered from `(n₊, n₋)`.
    pub fn n_and_nt(&self) -> Result<(SpectralField, SpectralField)> {
        reconstruct_n(&self.n_plus, &self.n_minus)
    }

    /// Maximum of `|n₋ − conj(n₊)|` relative to `max |n₊|`.
    pub fn reality_defect(&self) -> f64 {
        let scale = self.n_plus.max_abs().max(f64::MIN_POSITIVE);
        let defect = self
            .n_plus
            .values()
            .iter()
            .zip(self.n_minus.values())
            .map(|(p, m)| (p.conj() - m).norm())
            .fold(0.0, f64::max);
        if self.n_plus.max_abs() == 0.0 && self.n_minus.max_abs() == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        self.u.check_finite("u")?;
        self.n_plus.check_finite("n_plus")?;
        self.n_minus.check_finite("n_minus")
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.n_plus.max_abs()).max(self.n_minus.max_abs())
    }
}
