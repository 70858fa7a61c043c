//! Seeded random ensembles of band-limited, `ψ_δ`-windowed space-time fields.
//!
//! Two families: free packets sitting on the characteristic `τ = φ(k)` and
//! "white" fields with random temporal frequencies off it. Each member is a
//! fixed continuous function, so resampling on a refined grid reproduces the
//! same member.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{DispersionSymbol, SpaceTimeField};
use super::window::bump;
use crate::error::Result;
use crate::fieldcore::{fft, Grid};
use crate::par::Exec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    FreePacket,
    White,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Self::FreePacket => "free_packet",
            Self::White => "white",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub seed: u64,
    /// Members per family.
    pub size: usize,
    pub num_points: usize,
    pub domain_length: f64,
    pub num_times: usize,
    /// Time span is `(−half_span, half_span)`.
    pub half_span: f64,
    /// Window scale of `ψ_δ`; must satisfy `2δ <= half_span`.
    pub delta: f64,
    /// Spatial band limit `|j| <= max_mode`.
    pub max_mode: i64,
    /// Largest temporal frequency in the white family.
    pub white_max_freq: f64,
    /// Also evaluate every member on a grid refined 2× in `x` and `t`.
    pub refine: bool,
    pub exec: Exec,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            seed: 0x5eed_2008,
            size: 12,
            num_points: 64,
            domain_length: 8.0 * std::f64::consts::PI,
            num_times: 128,
            half_span: 4.0,
            delta: 1.0,
            max_mode: 8,
            white_max_freq: 6.0,
            refine: true,
            exec: Exec::default(),
        }
    }
}

const WHITE_FREQS: i64 = 4;

/// One ensemble member: its family, index and coefficient seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Member {
    pub family: Family,
    pub index: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn members(&self) -> Vec<Member> {
        let mut out = Vec::with_capacity(2 * self.size);
        for family in [Family::FreePacket, Family::White] {
            for index in 0..self.size {
                out.push(Member { family, index, seed: self.member_seed(family, index) });
            }
        }
        out
    }

    fn member_seed(&self, family: Family, index: usize) -> u64 {
        let tag = match family {
            Family::FreePacket => 0x9e37_79b9_7f4a_7c15u64,
            Family::White => 0xc2b2_ae3d_27d4_eb4fu64,
        };
        self.seed.wrapping_mul(0x100_0000_01b3).wrapping_add(tag).wrapping_add(index as u64 * 0x5851_f42d)
    }

    pub fn grid(&self, refined: bool) -> Result<Grid> {
        Grid::new(if refined { 2 * self.num_points } else { self.num_points }, self.domain_length)
    }

    pub fn times(&self, refined: bool) -> usize {
        if refined {
            2 * self.num_times
        } else {
            self.num_times
        }
    }

    /// Samples member `member` (with sub-stream `role`) for dispersion `phi`.
    pub fn sample(&self, member: Member, role: u64, phi: DispersionSymbol, refined: bool) -> Result<SpaceTimeField> {
        let grid = self.grid(refined)?;
        let nt = self.times(refined);
        let mut rng = ChaCha8Rng::seed_from_u64(member.seed ^ role.wrapping_mul(0xff51_afd7_ed55_8ccd));
        let modes: Vec<i64> = (-self.max_mode..=self.max_mode).collect();
        let mut draw = |scale: f64| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;

        // coefficients[mode][freq]: temporal frequency list per spatial mode.
        let two_pi_over_l = 2.0 * std::f64::consts::PI / self.domain_length;
        let terms: Vec<Vec<(f64, Complex64)>> = match member.family {
            Family::FreePacket => modes
                .iter()
                .map(|&j| {
                    let k = two_pi_over_l * j as f64;
                    vec![(phi.phi(k), draw(1.0 / (1.0 + j.abs() as f64)))]
                })
                .collect(),
            Family::White => modes
                .iter()
                .map(|&j| {
                    (-WHITE_FREQS..=WHITE_FREQS)
                        .map(|l| {
                            let w = self.white_max_freq * l as f64 / WHITE_FREQS as f64;
                            (w, draw(1.0 / (1.0 + j.abs() as f64)))
                        })
                        .collect()
                })
                .collect(),
        };

        let n = grid.num_points();
        let period = 2.0 * self.half_span;
        let dt = period / nt as f64;
        let mut values = Vec::with_capacity(n * nt);
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        for jt in 0..nt {
            let t = -self.half_span + jt as f64 * dt;
            let w = bump(t / self.delta);
            row.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            if w > 0.0 {
                for (&j, list) in modes.iter().zip(&terms) {
                    // Phase referenced to the left end x = −L/2 so the function is grid-independent.
                    let c: Complex64 = list.iter().map(|&(freq, a)| a * Complex64::from_polar(1.0, freq * t)).sum();
                    row[grid.mode_index(j)] += c * w;
                }
                fft::inverse_in_place(&mut row);
            }
            values.extend_from_slice(&row);
        }
        SpaceTimeField::new(&grid, (-self.half_span, self.half_span), nt, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xsb::norm::xsb_norm;

    #[test]
    fn members_are_deterministic_and_distinct() {
        let spec = EnsembleSpec { size: 3, ..Default::default() };
        let ms = spec.members();
        assert_eq!(ms.len(), 6);
        let a = spec.sample(ms[0], 0, DispersionSymbol::Schrodinger, false).unwrap();
        let b = spec.sample(ms[0], 0, DispersionSymbol::Schrodinger, false).unwrap();
        let c = spec.sample(ms[1], 0, DispersionSymbol::Schrodinger, false).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // Doubling the ensemble keeps the first members.
        let bigger = EnsembleSpec { size: 6, ..spec.clone() };
        assert_eq!(bigger.members()[..3], ms[..3]);
    }

    #[test]
    fn refined_sampling_is_the_same_function() {
        let spec = EnsembleSpec { size: 1, ..Default::default() };
        let m = spec.members()[1];
        let coarse = spec.sample(m, 0, DispersionSymbol::Plus, false).unwrap();
        let fine = spec.sample(m, 0, DispersionSymbol::Plus, true).unwrap();
        // Every other spatial point at every other time coincides.
        let n = coarse.grid().num_points();
        for j in 0..coarse.num_times() {
            for i in 0..n {
                let a = coarse.values()[j * n + i];
                let b = fine.values()[(2 * j) * 2 * n + 2 * i];
                assert!((a - b).norm() < 1e-11);
            }
        }
        let na = xsb_norm(&coarse, 0.0, 0.3, DispersionSymbol::Plus).unwrap();
        let nb = xsb_norm(&fine, 0.0, 0.3, DispersionSymbol::Plus).unwrap();
        assert!((na / nb - 1.0).abs() < 1e-3);
    }
}
