//! The admissible `(θ, ε)` region of the nonlinear estimates.
//!
//! Six linear constraints in the plane; the closure is a convex polygon whose
//! vertices are enumerated exactly. The open region is nonempty iff the
//! closure has positive area.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::rational::{render, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintId {
    ThetaPositive,
    EpsilonPositive,
    EpsilonBelowCap,
    DualNonPositive,
    HolderSum,
    StrichartzGap,
}

impl ConstraintId {
    pub fn name(self) -> &'static str {
        match self {
            Self::ThetaPositive => "theta > 0",
            Self::EpsilonPositive => "epsilon > 0",
            Self::EpsilonBelowCap => "epsilon < 1 - m/2",
            Self::DualNonPositive => "epsilon <= 1/(4m)",
            Self::HolderSum => "theta + 2 epsilon < 2 - m",
            Self::StrichartzGap => "theta - 4m epsilon < m + 1/(2m) - 2",
        }
    }
}

/// `a·θ + b·ε  (< or <=)  c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub id: ConstraintId,
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub strict: bool,
}

impl Constraint {
    pub fn lhs(&self, theta: Q, epsilon: Q) -> Q {
        self.a * theta + self.b * epsilon
    }

    pub fn holds(&self, theta: Q, epsilon: Q) -> bool {
        let lhs = self.lhs(theta, epsilon);
        if self.strict {
            lhs < self.c
        } else {
            lhs <= self.c
        }
    }

    pub fn holds_closed(&self, theta: Q, epsilon: Q) -> bool {
        self.lhs(theta, epsilon) <= self.c
    }

    pub fn is_tight(&self, theta: Q, epsilon: Q) -> bool {
        self.lhs(theta, epsilon) == self.c
    }
}

pub fn constraints(m: Q) -> Vec<Constraint> {
    let zero = Q::zero();
    let one = Q::from_integer(1);
    let two = Q::from_integer(2);
    let four = Q::from_integer(4);
    vec![
        Constraint { id: ConstraintId::ThetaPositive, a: -one, b: zero, c: zero, strict: true },
        Constraint { id: ConstraintId::EpsilonPositive, a: zero, b: -one, c: zero, strict: true },
        Constraint { id: ConstraintId::EpsilonBelowCap, a: zero, b: one, c: one - m / two, strict: true },
        Constraint { id: ConstraintId::DualNonPositive, a: zero, b: one, c: one / (four * m), strict: false },
        Constraint { id: ConstraintId::HolderSum, a: one, b: two, c: two - m, strict: true },
        Constraint {
            id: ConstraintId::StrichartzGap,
            a: one,
            b: -four * m,
            c: m + one / (two * m) - two,
            strict: true,
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub theta: Q,
    pub epsilon: Q,
    /// Every constraint tight at this vertex.
    pub active: BTreeSet<ConstraintId>,
}

#[derive(Clone, Debug)]
pub struct RegionReport {
    pub m: Q,
    pub constraints: Vec<Constraint>,
    /// Vertices of the closed region, counter-clockwise.
    pub vertices: Vec<Vertex>,
    pub feasible: bool,
    /// Strictly interior point (vertex centroid) when feasible.
    pub witness: Option<(Q, Q)>,
}

impl RegionReport {
    /// Constraints that are tight at some vertex of the closure.
    pub fn active_structure(&self) -> BTreeSet<ConstraintId> {
        self.vertices.iter().flat_map(|v| v.active.iter().copied()).collect()
    }

    pub fn violated(&self, theta: Q, epsilon: Q) -> Vec<ConstraintId> {
        self.constraints.iter().filter(|c| !c.holds(theta, epsilon)).map(|c| c.id).collect()
    }

    pub fn contains(&self, theta: Q, epsilon: Q) -> bool {
        self.violated(theta, epsilon).is_empty()
    }

    pub fn describe(&self) -> String {
        let verts: Vec<String> =
            self.vertices.iter().map(|v| format!("({}, {})", render(v.theta), render(v.epsilon))).collect();
        format!("m={} feasible={} vertices=[{}]", render(self.m), self.feasible, verts.join(", "))
    }
}

pub fn admissible_region(m: Q) -> RegionReport {
    let cons = constraints(m);
    let mut points: Vec<(Q, Q)> = Vec::new();
    for i in 0..cons.len() {
        for j in i + 1..cons.len() {
            let (p, r) = (&cons[i], &cons[j]);
            let det = p.a * r.b - p.b * r.a;
            if det.is_zero() {
                continue;
            }
            let theta = (p.c * r.b - p.b * r.c) / det;
            let epsilon = (p.a * r.c - p.c * r.a) / det;
            if cons.iter().all(|c| c.holds_closed(theta, epsilon)) && !points.contains(&(theta, epsilon)) {
                points.push((theta, epsilon));
            }
        }
    }
    sort_ccw(&mut points);
    let vertices: Vec<Vertex> = points
        .iter()
        .map(|&(theta, epsilon)| Vertex {
            theta,
            epsilon,
            active: cons.iter().filter(|c| c.is_tight(theta, epsilon)).map(|c| c.id).collect(),
        })
        .collect();

    let witness = if has_area(&points) {
        let n = Q::from_integer(points.len() as i128);
        let theta = points.iter().map(|p| p.0).sum::<Q>() / n;
        let epsilon = points.iter().map(|p| p.1).sum::<Q>() / n;
        Some((theta, epsilon))
    } else {
        None
    };
    let feasible = witness.is_some_and(|(t, e)| cons.iter().all(|c| c.holds(t, e)));
    RegionReport { m, constraints: cons, vertices, feasible, witness: witness.filter(|_| feasible) }
}

fn cross(o: (Q, Q), a: (Q, Q), b: (Q, Q)) -> Q {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn has_area(points: &[(Q, Q)]) -> bool {
    if points.len() < 3 {
        return false;
    }
    let o = points[0];
    points.iter().skip(1).any(|&a| points.iter().any(|&b| !cross(o, a, b).is_zero()))
}

/// Exact counter-clockwise ordering around the vertex centroid.
fn sort_ccw(points: &mut [(Q, Q)]) {
    if points.len() < 3 {
        points.sort();
        return;
    }
    let n = Q::from_integer(points.len() as i128);
    let c = (points.iter().map(|p| p.0).sum::<Q>() / n, points.iter().map(|p| p.1).sum::<Q>() / n);
    // Upper half-plane (angle in [0, π)) first, then by cross-product sign.
    let half = |p: (Q, Q)| {
        let (dx, dy) = (p.0 - c.0, p.1 - c.1);
        if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
            0
        } else {
            1
        }
    };
    points.sort_by(|&a, &b| {
        half(a).cmp(&half(b)).then_with(|| {
            let s = cross(c, a, b);
            if s.is_positive() {
                Ordering::Less
            } else if s.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::rational::q;

    #[test]
    fn m_one_contains_reference_witness() {
        let r = admissible_region(q(1, 1));
        assert!(r.feasible);
        assert!(r.contains(q(1, 10), q(1, 5)));
        assert!(r.vertices.len() >= 3);
        for v in &r.vertices {
            assert!(r.constraints.iter().all(|c| c.holds_closed(v.theta, v.epsilon)));
            assert!(v.active.len() >= 2);
        }
    }

    #[test]
    fn endpoint_is_infeasible() {
        let r = admissible_region(q(2, 1));
        assert!(!r.feasible);
        assert!(r.witness.is_none());
        // Closure collapses to the origin.
        assert_eq!(r.vertices.len(), 1);
        assert_eq!((r.vertices[0].theta, r.vertices[0].epsilon), (q(0, 1), q(0, 1)));
        assert!(admissible_region(q(5, 2)).vertices.is_empty());
    }

    #[test]
    fn witness_is_strictly_interior_on_a_lattice() {
        for num in 20..40 {
            let m = q(num, 20);
            let r = admissible_region(m);
            assert!(r.feasible, "m = {m}");
            let (t, e) = r.witness.unwrap();
            assert!(r.contains(t, e));
        }
    }

    #[test]
    fn vertices_are_counter_clockwise() {
        let r = admissible_region(q(3, 2));
        let p: Vec<_> = r.vertices.iter().map(|v| (v.theta, v.epsilon)).collect();
        for i in 0..p.len() {
            let (a, b, c) = (p[i], p[(i + 1) % p.len()], p[(i + 2) % p.len()]);
            assert!(cross(a, b, c).is_positive());
        }
    }

    #[test]
    fn structure_changes_at_breakpoints() {
        // 1 + √2/2 ≈ 1.70711 and 1 + √3/2 ≈ 1.86603.
        let below_2 = admissible_region(q(1707, 1000)).active_structure();
        let above_2 = admissible_region(q(1708, 1000)).active_structure();
        assert_ne!(below_2, above_2);
        let below_3 = admissible_region(q(1866, 1000)).active_structure();
        let above_3 = admissible_region(q(1867, 1000)).active_structure();
        assert_ne!(below_3, above_3);
        // Within a caption range the structure is stable.
        assert_eq!(admissible_region(q(11, 10)).active_structure(), admissible_region(q(3, 2)).active_structure());
    }

    #[test]
    fn regions_are_not_nested_in_m() {
        // θ − 4mε < m + 1/(2m) − 2 loosens as m grows, so a larger m can admit
        // points a smaller m rejects.
        let (theta, eps) = (q(1, 100), q(1, 20));
        assert!(!admissible_region(q(1, 1)).contains(theta, eps));
        assert!(admissible_region(q(3, 2)).contains(theta, eps));
        assert!(!admissible_region(q(3, 2)).contains(q(1, 10), q(1, 5)));
        assert!(admissible_region(q(1, 1)).contains(q(1, 10), q(1, 5)));
    }
}
