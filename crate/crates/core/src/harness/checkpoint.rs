//! Binary checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"KLSMCKPT"  magic (8 bytes)
//! u32          version (1)
//! u64          num_points N
//! f64          domain_length L
//! f64          m
//! f64          time
//! 3 × N × (f64 re, f64 im)   physical samples of u, n₊, n₋
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{KlsError, Result};
use crate::fieldcore::{Grid, SimState, SpectralField};

pub const MAGIC: &[u8; 8] = b"KLSMCKPT";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 8 + 8 + 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub m: f64,
    pub state: SimState,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let grid = self.state.grid();
        let n = grid.num_points();
        let mut out = Vec::with_capacity(HEADER_LEN + 48 * n);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());
        out.extend_from_slice(&grid.domain_length().to_le_bytes());
        out.extend_from_slice(&self.m.to_le_bytes());
        out.extend_from_slice(&self.state.time.to_le_bytes());
        for field in [&self.state.u, &self.state.n_plus, &self.state.n_minus] {
            for c in field.values() {
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| KlsError::Checkpoint(msg.to_string());
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(bad("missing magic header"));
        }
        let mut cursor = 8;
        let mut take = |len: usize| {
            let s = &bytes[cursor..cursor + len];
            cursor += len;
            s
        };
        let version = u32::from_le_bytes(take(4).try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(KlsError::Checkpoint(format!("unsupported version {version}")));
        }
        let n = u64::from_le_bytes(take(8).try_into().expect("8 bytes"));
        let length = f64::from_le_bytes(take(8).try_into().expect("8 bytes"));
        let m = f64::from_le_bytes(take(8).try_into().expect("8 bytes"));
        let time = f64::from_le_bytes(take(8).try_into().expect("8 bytes"));
        let n = usize::try_from(n).map_err(|_| bad("grid size overflows usize"))?;
        let expected = n.checked_mul(48).and_then(|b| b.checked_add(HEADER_LEN));
        if expected != Some(bytes.len()) {
            return Err(KlsError::Checkpoint(format!(
                "expected {} bytes for N = {n}, found {}",
                expected.map_or("overflowing".into(), |e| e.to_string()),
                bytes.len()
            )));
        }
        let grid = Grid::new(n, length).map_err(|e| KlsError::Checkpoint(e.to_string()))?;
        let body = &bytes[HEADER_LEN..];
        let read = |which: usize| -> Result<SpectralField> {
            let values = body[which * 16 * n..(which + 1) * 16 * n]
                .chunks_exact(16)
                .map(|c| {
                    Complex64::new(
                        f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                        f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                    )
                })
                .collect();
            SpectralField::from_values(&grid, values)
        };
        let state = SimState { u: read(0)?, n_plus: read(1)?, n_minus: read(2)?, time };
        state.check_finite()?;
        Ok(Self { m, state })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_and_round_trip() {
        let g = Grid::new(16, 7.5).unwrap();
        let u = SpectralField::from_fn(&g, |x| Complex64::new(x.sin(), x.cos() / 3.0));
        let p = SpectralField::from_fn(&g, |x| Complex64::new(x * 0.1, -x));
        let state = SimState { u, n_plus: p.clone(), n_minus: p.conj(), time: 1.25 };
        let ck = Checkpoint { m: 1.5, state };
        let bytes = ck.to_bytes();
        assert_eq!(&bytes[..8], b"KLSMCKPT");
        assert_eq!(bytes.len(), HEADER_LEN + 48 * 16);
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back.state.u.values(), ck.state.u.values());
        assert_eq!(back.state.time, 1.25);
        assert_eq!(back.m, 1.5);
    }

    #[test]
    fn corrupt_input_is_rejected() {
        assert!(Checkpoint::from_bytes(b"nonsense").is_err());
        let g = Grid::new(8, 1.0).unwrap();
        let mut bytes = Checkpoint { m: 1.0, state: SimState::zeros(&g) }.to_bytes();
        bytes.pop();
        assert!(Checkpoint::from_bytes(&bytes).is_err());
    }
}
