//! Critical Sobolev indices of the four truncated dilation symmetries.

use std::fmt;
use std::str::FromStr;

use super::rational::Q;
use crate::error::{KlsError, Result};

/// Which term of the scale-invariant model system is dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalingCase {
    /// No `∂²_x u`: `u_λ = λ^{3/(4m−2)} u(λt, λx)`.
    DropLaplacianU,
    /// No `i∂_t u`.
    DropDtU,
    /// No `±(−∂²_x)^{1/2} n±`: parabolic scaling `(λ²t, λx)`.
    DropHalfwaveN,
    /// No `i∂_t n±`.
    DropDtN,
}

impl ScalingCase {
    pub const ALL: [ScalingCase; 4] =
        [Self::DropLaplacianU, Self::DropDtU, Self::DropHalfwaveN, Self::DropDtN];

    pub fn tag(self) -> &'static str {
        match self {
            Self::DropLaplacianU => "drop_laplacian_u",
            Self::DropDtU => "drop_dt_u",
            Self::DropHalfwaveN => "drop_halfwave_n",
            Self::DropDtN => "drop_dt_n",
        }
    }
}

impl fmt::Display for ScalingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ScalingCase {
    type Err = KlsError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| KlsError::InvalidParameter(format!("unknown scaling case {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CriticalIndices {
    /// Critical index for `u`.
    pub k: Q,
    /// Critical index for `n±`.
    pub l: Q,
    pub case: ScalingCase,
}

pub fn critical_indices(m: Q, d: u32, case: ScalingCase) -> Result<CriticalIndices> {
    if m < Q::from_integer(1) {
        return Err(KlsError::InvalidParameter(format!("m must be >= 1, got {m}")));
    }
    if d == 0 {
        return Err(KlsError::InvalidParameter("dimension must be positive".into()));
    }
    let one = Q::from_integer(1);
    let two = Q::from_integer(2);
    let half_d = Q::new(d as i128, 2);
    let (k, l) = match case {
        ScalingCase::DropLaplacianU => (
            half_d - Q::from_integer(3) / (Q::from_integer(4) * m - two),
            half_d - (two - m) / (two * m - one),
        ),
        ScalingCase::DropDtU | ScalingCase::DropDtN => {
            let v = half_d - two / (two * m - one);
            (v, v)
        }
        ScalingCase::DropHalfwaveN => (
            half_d - Q::from_integer(5) / (Q::from_integer(4) * m - two),
            half_d - (Q::from_integer(3) - m) / (two * m - one),
        ),
    };
    Ok(CriticalIndices { k, l, case })
}
