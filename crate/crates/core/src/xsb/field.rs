use num_complex::Complex64;

use crate::error::{KlsError, Result};
use crate::fieldcore::{bracket, Grid, SpectralField};

/// Dispersion relation `φ(k)` of the three linear flows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DispersionSymbol {
    /// `φ(k) = −k²`.
    Schrodinger,
    /// `φ(k) = +<k>`.
    Plus,
    /// `φ(k) = −<k>`.
    Minus,
}

impl DispersionSymbol {
    pub fn phi(self, k: f64) -> f64 {
        match self {
            Self::Schrodinger => -k * k,
            Self::Plus => bracket(k),
            Self::Minus => -bracket(k),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::Schrodinger => "schrodinger",
            Self::Plus => "plus",
            Self::Minus => "minus",
        }
    }
}

pub const MIN_TIMES: usize = 16;

/// Complex samples `f(x_i, t_j)` on a periodic `(x, t)` rectangle.
///
/// Times are `t_j = t0 + j·(t1 − t0)/num_times`; the right end is excluded, so
/// the time direction is periodic with period `t1 − t0`. Storage is
/// time-major: `values[j * N + i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid,
    num_times: usize,
    t_span: (f64, f64),
    values: Vec<Complex64>,
}

impl SpaceTimeField {
    pub fn new(grid: &Grid, t_span: (f64, f64), num_times: usize, values: Vec<Complex64>) -> Result<Self> {
        if num_times < MIN_TIMES {
            return Err(KlsError::InvalidParameter(format!("num_times must be >= {MIN_TIMES}, got {num_times}")));
        }
        if !(t_span.0.is_finite() && t_span.1.is_finite() && t_span.1 > t_span.0) {
            return Err(KlsError::InvalidParameter(format!("bad time span {t_span:?}")));
        }
        if values.len() != num_times * grid.num_points() {
            return Err(KlsError::GridMismatch(format!(
                "{} samples for {} x {} rectangle",
                values.len(),
                num_times,
                grid.num_points()
            )));
        }
        if let Some(index) = values.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(KlsError::NonFinite { what: "space-time field", index });
        }
        Ok(Self { grid: grid.clone(), num_times, t_span, values })
    }

    pub fn from_fn(
        grid: &Grid,
        t_span: (f64, f64),
        num_times: usize,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let dt = (t_span.1 - t_span.0) / num_times as f64;
        let xs = grid.points();
        let mut values = Vec::with_capacity(num_times * xs.len());
        for j in 0..num_times {
            let t = t_span.0 + j as f64 * dt;
            values.extend(xs.iter().map(|&x| f(x, t)));
        }
        Self::new(grid, t_span, num_times, values)
    }

    /// Stacks time slices `t0 + j·dt`; the span is `(t0, t0 + len·dt)`.
    pub fn from_slices(t0: f64, dt: f64, slices: &[SpectralField]) -> Result<Self> {
        let grid = slices
            .first()
            .ok_or_else(|| KlsError::InvalidParameter("no time slices".into()))?
            .grid()
            .clone();
        let mut values = Vec::with_capacity(slices.len() * grid.num_points());
        for s in slices {
            grid.check_same(s.grid())?;
            values.extend_from_slice(s.values());
        }
        Self::new(&grid, (t0, t0 + slices.len() as f64 * dt), slices.len(), values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn num_times(&self) -> usize {
        self.num_times
    }

    pub fn t_span(&self) -> (f64, f64) {
        self.t_span
    }

    pub fn period(&self) -> f64 {
        self.t_span.1 - self.t_span.0
    }

    pub fn dt(&self) -> f64 {
        self.period() / self.num_times as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.num_times).map(|j| self.t_span.0 + j as f64 * self.dt()).collect()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        let n = self.grid.num_points();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn slice(&self, j: usize) -> SpectralField {
        SpectralField::from_values(&self.grid, self.row(j).to_vec()).expect("row length matches grid")
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if self.num_times != other.num_times || self.t_span != other.t_span {
            return Err(KlsError::GridMismatch("space-time rectangles differ".into()));
        }
        Ok(Self { values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(), ..self.clone() })
    }

    /// Multiplies every time row by `w(t_j)`.
    pub fn windowed(&self, w: impl Fn(f64) -> f64) -> Self {
        let n = self.grid.num_points();
        let times = self.times();
        let mut values = self.values.clone();
        for (j, chunk) in values.chunks_mut(n).enumerate() {
            let wj = w(times[j]);
            chunk.iter_mut().for_each(|v| *v *= wj);
        }
        Self { values, ..self.clone() }
    }

    /// Treats the samples as the closed interval `[t0, t0 + (J−1)·dt]` and extends
    /// evenly about the right end, giving a continuous periodic function with
    /// `2(J−1)` samples on a span twice as long.
    pub fn even_reflection(&self) -> Self {
        let n = self.grid.num_points();
        let nt = self.num_times;
        let mut values = self.values.clone();
        for j in (1..nt - 1).rev() {
            values.extend_from_slice(&self.values[j * n..(j + 1) * n]);
        }
        let dt = self.dt();
        let len = 2 * (nt - 1);
        Self { grid: self.grid.clone(), num_times: len, t_span: (self.t_span.0, self.t_span.0 + len as f64 * dt), values }
    }
}
