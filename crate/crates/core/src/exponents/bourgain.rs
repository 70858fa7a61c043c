use num_traits::{Signed, Zero};

use super::rational::{render, to_f64, Q};
use super::region::{admissible_region, constraints, ConstraintId};
use crate::error::{KlsError, Result};

/// Bourgain exponents `(b₁, b₂, b₁′, b₂′)` together with the `(m, ε, θ)` they derive from.
///
/// `b₁ = b₂ = (2m−1)/(4m) + ε` and `b₁′ = b₂′ = −1/2 + 2mε`, exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentSet {
    pub m: Q,
    pub epsilon: Q,
    pub theta: Q,
    pub b1: Q,
    pub b2: Q,
    pub b1p: Q,
    pub b2p: Q,
}

fn half() -> Q {
    Q::new(1, 2)
}

impl ExponentSet {
    /// Full validation of `(m, ε, θ)` against every admissibility constraint.
    pub fn new(m: Q, epsilon: Q, theta: Q) -> Result<Self> {
        check_epsilon(m, epsilon)?;
        for c in constraints(m) {
            if !c.holds(theta, epsilon) {
                return Err(KlsError::Constraint(format!(
                    "{} fails at theta={}, epsilon={}, m={}",
                    c.id.name(),
                    render(theta),
                    render(epsilon),
                    render(m)
                )));
            }
        }
        let two = Q::from_integer(2);
        let four = Q::from_integer(4);
        let b = (two * m - Q::from_integer(1)) / (four * m) + epsilon;
        let bp = -half() + two * m * epsilon;
        let set = Self { m, epsilon, theta, b1: b, b2: b, b1p: bp, b2p: bp };
        debug_assert!(set.b1.is_positive() && set.b1 <= half());
        debug_assert!(set.b1p > -half() && set.b1p <= Q::zero());
        Ok(set)
    }

    /// `m + 1/2 + b₂′ − (2m−1)b₁ − b₂`, the exponent in condition (3.2).
    pub fn gap(&self) -> Q {
        let one = Q::from_integer(1);
        let two = Q::from_integer(2);
        self.m + half() + self.b2p - (two * self.m - one) * self.b1 - self.b2
    }

    /// The three local-condition exponents; each equals 1/2 for a valid set.
    pub fn gap_values(&self) -> [Q; 3] {
        let one = Q::from_integer(1);
        let two = Q::from_integer(2);
        let m = self.m;
        [
            m + half() + self.b2p - (two * m - one) * self.b1 - self.b2,
            m + half() + self.b1p - (two * m - one) * self.b1 - self.b2,
            m + half() + self.b2p - two * m * self.b1,
        ]
    }

    /// `2m + b₁′ + b₂′ == (4m−1)b₁ + b₂`.
    pub fn balance_holds(&self) -> bool {
        let two = Q::from_integer(2);
        let lhs = two * self.m + self.b1p + self.b2p;
        let rhs = (Q::from_integer(4) * self.m - Q::from_integer(1)) * self.b1 + self.b2;
        lhs == rhs
    }

    /// `ε = 1/(4m)`, i.e. `b′ = 0` and `b = 1/2`. Accepted but flagged.
    pub fn is_dual_endpoint(&self) -> bool {
        self.b1p.is_zero()
    }

    pub fn m_f64(&self) -> f64 {
        to_f64(self.m)
    }

    pub fn b1_f64(&self) -> f64 {
        to_f64(self.b1)
    }

    pub fn b1p_f64(&self) -> f64 {
        to_f64(self.b1p)
    }
}

fn check_epsilon(m: Q, epsilon: Q) -> Result<()> {
    let one = Q::from_integer(1);
    if m < one || m >= Q::from_integer(2) {
        return Err(KlsError::Constraint(format!("1 <= m < 2 required, got m={}", render(m))));
    }
    for c in constraints(m) {
        let eps_only = matches!(
            c.id,
            ConstraintId::EpsilonPositive | ConstraintId::EpsilonBelowCap | ConstraintId::DualNonPositive
        );
        if eps_only && !c.holds(Q::zero(), epsilon) {
            return Err(KlsError::Constraint(format!(
                "{} fails at epsilon={}, m={}",
                c.id.name(),
                render(epsilon),
                render(m)
            )));
        }
    }
    Ok(())
}

/// Largest `θ` bound for a given `ε`: `θ < min(2−m−2ε, m+1/(2m)−2+4mε)`.
pub fn theta_upper(m: Q, epsilon: Q) -> Q {
    let two = Q::from_integer(2);
    let holder = two - m - two * epsilon;
    let gap = m + Q::from_integer(1) / (two * m) - two + Q::from_integer(4) * m * epsilon;
    holder.min(gap)
}

/// Exponent set for `(m, ε)` with `θ` picked at the midpoint of its admissible interval.
pub fn bourgain_exponents(m: Q, epsilon: Q) -> Result<ExponentSet> {
    check_epsilon(m, epsilon)?;
    let upper = theta_upper(m, epsilon);
    if !upper.is_positive() {
        return Err(KlsError::Constraint(format!(
            "no theta > 0 satisfies the nonlinear-estimate constraints at epsilon={}, m={}",
            render(epsilon),
            render(m)
        )));
    }
    ExponentSet::new(m, epsilon, upper / Q::from_integer(2))
}

/// `(m, auto)`: uses the region witness.
pub fn auto_exponents(m: Q) -> Result<ExponentSet> {
    let region = admissible_region(m);
    match region.witness {
        Some((theta, epsilon)) => ExponentSet::new(m, epsilon, theta),
        None => Err(KlsError::Constraint(format!("admissible region is empty at m={}", render(m)))),
    }
}

/// `count` evenly spaced admissible `ε` values for `m`, strictly inside the projection
/// of the region onto the `ε` axis.
pub fn epsilon_lattice(m: Q, count: usize) -> Vec<Q> {
    let region = admissible_region(m);
    if !region.feasible {
        return Vec::new();
    }
    let lo = region.vertices.iter().map(|v| v.epsilon).min().expect("feasible region has vertices");
    let hi = region.vertices.iter().map(|v| v.epsilon).max().expect("feasible region has vertices");
    let steps = Q::from_integer(count as i128 + 1);
    (1..=count as i128).map(|j| lo + (hi - lo) * Q::from_integer(j) / steps).collect()
}
