//! Empirical ratio checks for the linear and nonlinear space-time estimates.

use std::fmt::Write as _;

use super::ensemble::{EnsembleSpec, Family, Member};
use super::field::{DispersionSymbol, SpaceTimeField};
use super::norm::{lp_hs_norm, mixed_norm, xsb_norm};
use crate::error::{KlsError, Result};
use crate::exponents::ExponentSet;
use crate::par;

/// Linear estimates of the form `‖u‖_{mixed} <= c ‖u‖_{X^{s,b}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinearEstimate {
    /// `‖u‖_{L^q_t L^r_x} <= c ‖u‖_{X^{s,b}}` with `s = 1/2 − 1/r − 2/q`, `b > 1/2`.
    SchrodingerStrichartz { q: f64, r: f64, b: f64 },
    /// `‖u‖_{L^q_t L^r_x} <= c ‖u‖_{X^{0,b}}` for `b > 1/2 − 1/q + (1/2 − 1/r)/2`.
    SchrodingerInterpolated { q: f64, r: f64, b: f64 },
    /// `‖n‖_{L^p_t H^s_x} <= c ‖n‖_{X^{s,b}_+}` for `2 < p < ∞`, `b > 1/2 − 1/p`.
    KleinGordon { p: f64, s: f64, b: f64 },
}

fn inv(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

impl LinearEstimate {
    pub fn id(&self) -> &'static str {
        match self {
            Self::SchrodingerStrichartz { .. } => "schrodinger_strichartz",
            Self::SchrodingerInterpolated { .. } => "schrodinger_l2_interpolated",
            Self::KleinGordon { .. } => "klein_gordon_lp_hs",
        }
    }

    pub fn symbol(&self) -> DispersionSymbol {
        match self {
            Self::KleinGordon { .. } => DispersionSymbol::Plus,
            _ => DispersionSymbol::Schrodinger,
        }
    }

    /// Sobolev index on the right-hand side.
    pub fn s(&self) -> f64 {
        match *self {
            Self::SchrodingerStrichartz { q, r, .. } => 0.5 - inv(r) - 2.0 * inv(q),
            Self::SchrodingerInterpolated { .. } => 0.0,
            Self::KleinGordon { s, .. } => s,
        }
    }

    pub fn b(&self) -> f64 {
        match *self {
            Self::SchrodingerStrichartz { b, .. }
            | Self::SchrodingerInterpolated { b, .. }
            | Self::KleinGordon { b, .. } => b,
        }
    }

    /// Checks the admissibility conditions; the error names the first violated one.
    pub fn validate(&self) -> Result<()> {
        let fail = |cond: &str| Err(KlsError::Inadmissible(format!("{}: {cond}", self.id())));
        match *self {
            Self::SchrodingerStrichartz { q, r, b } => {
                if !(4.0..=f64::INFINITY).contains(&q) {
                    return fail("4 <= q <= inf");
                }
                if !(2.0..=f64::INFINITY).contains(&r) {
                    return fail("2 <= r <= inf");
                }
                if 2.0 * inv(q) > 0.5 - inv(r) {
                    return fail("0 <= 2/q <= 1/2 - 1/r");
                }
                if b <= 0.5 {
                    return fail("b > 1/2");
                }
            }
            Self::SchrodingerInterpolated { q, r, b } => {
                let (iq, ir) = (inv(q), inv(r));
                if !(ir > 0.0 && ir <= 0.5) {
                    return fail("0 < 1/r <= 1/2");
                }
                if !(0.5 - ir <= 2.0 * iq && 2.0 * iq < 0.5 + ir) {
                    return fail("1/2 - 1/r <= 2/q < 1/2 + 1/r");
                }
                if b <= 0.5 - iq + 0.5 * (0.5 - ir) {
                    return fail("b > 1/2 - 1/q + (1/2)(1/2 - 1/r)");
                }
            }
            Self::KleinGordon { p, b, s } => {
                if !(p > 2.0 && p.is_finite()) {
                    return fail("2 < p < inf");
                }
                if b <= 0.5 - 1.0 / p {
                    return fail("b > 1/2 - 1/p");
                }
                if !s.is_finite() {
                    return fail("finite s");
                }
            }
        }
        Ok(())
    }

    pub fn ratio(&self, f: &SpaceTimeField) -> Result<f64> {
        let lhs = match *self {
            Self::SchrodingerStrichartz { q, r, .. } | Self::SchrodingerInterpolated { q, r, .. } => {
                mixed_norm(f, q, r)
            }
            Self::KleinGordon { p, s, .. } => lp_hs_norm(f, p, s),
        };
        let rhs = xsb_norm(f, self.s(), self.b(), self.symbol())?;
        Ok(safe_ratio(lhs, rhs))
    }
}

fn safe_ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemberRatio {
    pub family: Family,
    pub index: usize,
    pub seed: u64,
    pub ratio: f64,
    pub refined_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub estimate_id: String,
    pub ensemble_size: usize,
    pub seed: u64,
    pub members: Vec<MemberRatio>,
    pub worst_ratio: f64,
    /// `(quantile, value)` for 0.5, 0.9 and 1.0.
    pub ratio_quantiles: Vec<(f64, f64)>,
    pub refined_worst_ratio: Option<f64>,
    /// `refined_worst / worst`.
    pub grid_refinement_trend: Option<f64>,
}

impl EstimateReport {
    fn from_members(estimate_id: &str, spec: &EnsembleSpec, members: Vec<MemberRatio>) -> Self {
        let mut sorted: Vec<f64> = members.iter().map(|m| m.ratio).collect();
        sorted.sort_by(f64::total_cmp);
        let worst = sorted.last().copied().unwrap_or(0.0);
        let quantile = |p: f64| {
            if sorted.is_empty() {
                0.0
            } else {
                sorted[((p * (sorted.len() - 1) as f64).round() as usize).min(sorted.len() - 1)]
            }
        };
        let refined_worst_ratio = if spec.refine {
            members.iter().filter_map(|m| m.refined_ratio).reduce(f64::max)
        } else {
            None
        };
        Self {
            estimate_id: estimate_id.to_string(),
            ensemble_size: members.len(),
            seed: spec.seed,
            ratio_quantiles: vec![(0.5, quantile(0.5)), (0.9, quantile(0.9)), (1.0, worst)],
            grid_refinement_trend: refined_worst_ratio.map(|r| safe_ratio(r, worst)),
            refined_worst_ratio,
            worst_ratio: worst,
            members,
        }
    }

    pub const CSV_HEADER: &'static str = "estimate_id,row,family,member,seed,ratio,refined_ratio";

    /// One row per member plus a `summary` row (`ratio` = worst, `refined_ratio` = refined worst).
    pub fn to_csv(&self, with_header: bool) -> String {
        let mut s = String::new();
        if with_header {
            s.push_str(Self::CSV_HEADER);
            s.push('\n');
        }
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for m in &self.members {
            let _ = writeln!(
                s,
                "{},member,{},{},{},{:e},{}",
                self.estimate_id,
                m.family.tag(),
                m.index,
                m.seed,
                m.ratio,
                opt(m.refined_ratio)
            );
        }
        let _ = writeln!(
            s,
            "{},summary,all,{},{},{:e},{}",
            self.estimate_id,
            self.ensemble_size,
            self.seed,
            self.worst_ratio,
            opt(self.refined_worst_ratio)
        );
        s
    }
}

fn evaluate(
    spec: &EnsembleSpec,
    member_ratio: impl Fn(Member, bool) -> Result<f64> + Sync + Send,
) -> Result<Vec<MemberRatio>> {
    let members = spec.members();
    par::map(spec.exec, &members, |&m| -> Result<MemberRatio> {
        let ratio = member_ratio(m, false)?;
        let refined_ratio = if spec.refine { Some(member_ratio(m, true)?) } else { None };
        Ok(MemberRatio { family: m.family, index: m.index, seed: m.seed, ratio, refined_ratio })
    })
    .into_iter()
    .collect()
}

pub fn strichartz_check(estimate: LinearEstimate, spec: &EnsembleSpec) -> Result<EstimateReport> {
    estimate.validate()?;
    let phi = estimate.symbol();
    let members = evaluate(spec, |m, refined| estimate.ratio(&spec.sample(m, 0, phi, refined)?))?;
    Ok(EstimateReport::from_members(estimate.id(), spec, members))
}

/// LHS/RHS of both nonlinear estimates for one `(u, n)` pair, with the
/// modulation exponents given explicitly (`b` on the right, `b′` on the left).
pub fn nonlinear_ratios(u: &SpaceTimeField, n: &SpaceTimeField, m: f64, b: f64, bp: f64) -> Result<(f64, f64)> {
    let schr = DispersionSymbol::Schrodinger;
    let plus = DispersionSymbol::Plus;
    let u_norm = xsb_norm(u, 0.0, b, schr)?;

    let source = n.zip_with(u, |nv, uv| nv * uv * uv.norm_sqr().powf(m - 1.0))?;
    let lhs_a = xsb_norm(&source, 0.0, bp, schr)?;
    let rhs_a = xsb_norm(n, 0.5, b, plus)? * u_norm.powf(2.0 * m - 1.0);

    let density = u.map(|uv| num_complex::Complex64::new(uv.norm_sqr().powf(m), 0.0));
    let lhs_b = xsb_norm(&density, -0.5, bp, plus)?;
    let rhs_b = u_norm.powf(2.0 * m);
    Ok((safe_ratio(lhs_a, rhs_a), safe_ratio(lhs_b, rhs_b)))
}

pub const NONLINEAR_SCHRODINGER_ID: &str = "nonlinear_schrodinger_source";
pub const NONLINEAR_WAVE_ID: &str = "nonlinear_wave_source";

/// Worst measured ratios for the Schrödinger-source and wave-source nonlinear estimates.
pub fn nonlinear_estimate_check(exps: &ExponentSet, spec: &EnsembleSpec) -> Result<(EstimateReport, EstimateReport)> {
    let m = exps.m_f64();
    let (b, bp) = (exps.b1_f64(), exps.b1p_f64());
    let members = spec.members();
    let pairs = par::map(spec.exec, &members, |&mem| -> Result<(MemberRatio, MemberRatio)> {
        let at = |refined: bool| -> Result<(f64, f64)> {
            let u = spec.sample(mem, 1, DispersionSymbol::Schrodinger, refined)?;
            let n = spec.sample(mem, 2, DispersionSymbol::Plus, refined)?;
            nonlinear_ratios(&u, &n, m, b, bp)
        };
        let (a, w) = at(false)?;
        let refined = if spec.refine { Some(at(true)?) } else { None };
        let mk = |ratio, refined_ratio| MemberRatio {
            family: mem.family,
            index: mem.index,
            seed: mem.seed,
            ratio,
            refined_ratio,
        };
        Ok((mk(a, refined.map(|r| r.0)), mk(w, refined.map(|r| r.1))))
    });
    let mut schr = Vec::with_capacity(pairs.len());
    let mut wave = Vec::with_capacity(pairs.len());
    for p in pairs {
        let (a, w) = p?;
        schr.push(a);
        wave.push(w);
    }
    Ok((
        EstimateReport::from_members(NONLINEAR_SCHRODINGER_ID, spec, schr),
        EstimateReport::from_members(NONLINEAR_WAVE_ID, spec, wave),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{bourgain_exponents, rational::q};
    use crate::fieldcore::Grid;

    fn small_spec() -> EnsembleSpec {
        EnsembleSpec { size: 3, num_points: 32, num_times: 64, max_mode: 5, ..Default::default() }
    }

    #[test]
    fn admissibility_rejections() {
        let bad_b = 0.5 - 0.25 + 0.5 * (0.5 - 0.25) - 0.1;
        let e = LinearEstimate::SchrodingerInterpolated { q: 4.0, r: 4.0, b: bad_b };
        let err = strichartz_check(e, &small_spec()).unwrap_err();
        assert!(err.to_string().contains("b > 1/2 - 1/q"), "{err}");
        assert!(LinearEstimate::SchrodingerStrichartz { q: 2.0, r: 2.0, b: 0.6 }.validate().is_err());
        assert!(LinearEstimate::SchrodingerStrichartz { q: 4.0, r: f64::INFINITY, b: 0.5 }.validate().is_err());
        assert!(LinearEstimate::KleinGordon { p: 2.0, s: 0.0, b: 0.6 }.validate().is_err());
        assert!(LinearEstimate::KleinGordon { p: 4.0, s: 0.0, b: 0.2 }.validate().is_err());
    }

    #[test]
    fn endpoint_strichartz_pair_is_admissible_with_zero_s() {
        let e = LinearEstimate::SchrodingerStrichartz { q: 4.0, r: f64::INFINITY, b: 0.51 };
        e.validate().unwrap();
        assert_eq!(e.s(), 0.0);
        let report = strichartz_check(e, &small_spec()).unwrap();
        assert_eq!(report.ensemble_size, 6);
        assert!(report.worst_ratio.is_finite() && report.worst_ratio > 0.0);
        for &(_, v) in &report.ratio_quantiles {
            assert!(v <= report.worst_ratio);
        }
    }

    #[test]
    fn zero_u_gives_zero_ratios() {
        let g = Grid::new(16, 10.0).unwrap();
        let z = SpaceTimeField::from_fn(&g, (-2.0, 2.0), 32, |_, _| num_complex::Complex64::new(0.0, 0.0)).unwrap();
        let n = SpaceTimeField::from_fn(&g, (-2.0, 2.0), 32, |x, _| num_complex::Complex64::new(x.cos(), 0.0)).unwrap();
        assert_eq!(nonlinear_ratios(&z, &n, 1.0, 0.45, -0.1).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn larger_b_never_increases_ratio() {
        let spec = small_spec();
        let mem = spec.members()[0];
        let u = spec.sample(mem, 1, DispersionSymbol::Schrodinger, false).unwrap();
        let n = spec.sample(mem, 2, DispersionSymbol::Plus, false).unwrap();
        let e = bourgain_exponents(q(1, 1), q(1, 5)).unwrap();
        let (bp, b) = (e.b1p_f64(), e.b1_f64());
        let lo = nonlinear_ratios(&u, &n, 1.0, b, bp).unwrap();
        let hi = nonlinear_ratios(&u, &n, 1.0, b + 0.04, bp).unwrap();
        assert!(hi.0 <= lo.0 && hi.1 <= lo.1);
    }

    #[test]
    fn csv_has_member_and_summary_rows() {
        let e = LinearEstimate::KleinGordon { p: 8.0, s: 0.5, b: 0.45 };
        let spec = EnsembleSpec { refine: false, ..small_spec() };
        let csv = strichartz_check(e, &spec).unwrap().to_csv(true);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], EstimateReport::CSV_HEADER);
        assert_eq!(lines.len(), 1 + 6 + 1);
        assert!(lines.last().unwrap().starts_with("klein_gordon_lp_hs,summary,all,6,"));
    }
}
