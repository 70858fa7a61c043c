//! Run configuration.
//!
//! Files are flat `key = value` text; `#` starts a comment. Keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `m` | coupling power, rational in `[1, 2)` | `1` |
//! | `grid_points` | even, `>= 8` | `256` |
//! | `domain_length` | period `L` | `50` |
//! | `dt` | splitting step (clamped to `δ/16`) | `1e-3` |
//! | `T` | final time | `10` |
//! | `ic` | `gaussian`, `plane-wave`, `two-bump`, `from-checkpoint` | `gaussian` |
//! | `epsilon`, `theta` | rationals or `auto` | `auto` |
//! | `c_local` | constant in the local conditions | `1` |
//! | `seed` | seed for `ic.noise` | `0` |
//! | `out` | output directory (none: no files) | |
//! | `dealias` | `true`/`false` | `true` |
//! | `blowup_threshold` | halt when any `|field| >` this | `1e8` |
//! | `bound_c_front`, `bound_c_rate` | fixed pair checked against the envelope | `4`, `1` |
//! | `rows_per_window` | diagnostics rows per local window | `1` |
//! | `ic.*` | preset parameters, see [`IcParams`] | |

use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{KlsError, Result};
use crate::exponents::{auto_exponents, bourgain_exponents, rational, ExponentSet, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Gaussian,
    PlaneWave,
    TwoBump,
    FromCheckpoint,
}

impl Preset {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::PlaneWave => "plane-wave",
            Self::TwoBump => "two-bump",
            Self::FromCheckpoint => "from-checkpoint",
        }
    }
}

impl FromStr for Preset {
    type Err = KlsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "plane-wave" => Ok(Self::PlaneWave),
            "two-bump" => Ok(Self::TwoBump),
            "from-checkpoint" => Ok(Self::FromCheckpoint),
            other => Err(KlsError::Config(format!(
                "unknown initial condition {other:?} (expected gaussian, plane-wave, two-bump, from-checkpoint)"
            ))),
        }
    }
}

/// Preset parameters. Each preset reads the subset it needs.
///
/// * `gaussian`: `u₀ = a e^{−((x−c)/w)²} e^{ivx}`, `n₀ = a_n e^{−((x−c_n)/w_n)²}`,
///   `n₁ = a_t e^{−((x−c_n)/w_n)²}`.
/// * `plane-wave`: `u₀ = a e^{ik_j x}`, `n₀ = a_n cos(k_{j_n} x)`, `n₁ = 0`.
/// * `two-bump`: Gaussians at `±s/2` with velocities `∓v`, `n₀` as for `gaussian` centred at 0.
/// * `from-checkpoint`: state and time read from `ic.path`.
///
/// `ic.noise > 0` adds seeded band-limited noise of that amplitude to `u₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct IcParams {
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    pub velocity: f64,
    pub n_amplitude: f64,
    pub n_width: f64,
    pub n_center: f64,
    pub nt_amplitude: f64,
    pub mode: i64,
    pub n_mode: i64,
    pub separation: f64,
    pub noise: f64,
    pub path: Option<PathBuf>,
}

impl Default for IcParams {
    fn default() -> Self {
        Self {
            amplitude: 0.5,
            width: 2.0,
            center: 0.0,
            velocity: 0.5,
            n_amplitude: 0.5,
            n_width: 3.0,
            n_center: 0.0,
            nt_amplitude: 0.0,
            mode: 1,
            n_mode: 1,
            separation: 10.0,
            noise: 0.0,
            path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExponentChoice {
    /// Region witness.
    Auto,
    /// `θ` defaults to half its upper bound when absent.
    Explicit { epsilon: Q, theta: Option<Q> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub m: Q,
    pub num_points: usize,
    pub domain_length: f64,
    pub dt: f64,
    pub t_final: f64,
    pub ic: Preset,
    pub ic_params: IcParams,
    pub exponents: ExponentChoice,
    pub c_local: f64,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
    pub dealias: bool,
    pub blowup_threshold: f64,
    pub bound_c_front: f64,
    pub bound_c_rate: f64,
    pub rows_per_window: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m: rational::q(1, 1),
            num_points: 256,
            domain_length: 50.0,
            dt: 1e-3,
            t_final: 10.0,
            ic: Preset::Gaussian,
            ic_params: IcParams::default(),
            exponents: ExponentChoice::Auto,
            c_local: 1.0,
            out_dir: None,
            seed: 0,
            dealias: true,
            blowup_threshold: 1e8,
            bound_c_front: 4.0,
            bound_c_rate: 1.0,
            rows_per_window: 1,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| KlsError::Config(format!("{key}: cannot parse {value:?}")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(KlsError::Config(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

fn ratio(key: &str, value: &str) -> Result<Q> {
    rational::parse(value).map_err(|e| KlsError::Config(format!("{key}: {e}")))
}

impl RunConfig {
    /// Sets one key. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let p = &mut self.ic_params;
        match key.trim() {
            "m" => self.m = ratio(key, value)?,
            "grid_points" => self.num_points = num(key, value)?,
            "domain_length" => self.domain_length = num(key, value)?,
            "dt" => self.dt = num(key, value)?,
            "T" => self.t_final = num(key, value)?,
            "ic" => self.ic = value.parse()?,
            "epsilon" => {
                self.exponents = if value == "auto" {
                    ExponentChoice::Auto
                } else {
                    let theta = match &self.exponents {
                        ExponentChoice::Explicit { theta, .. } => *theta,
                        ExponentChoice::Auto => None,
                    };
                    ExponentChoice::Explicit { epsilon: ratio(key, value)?, theta }
                }
            }
            "theta" => match &mut self.exponents {
                ExponentChoice::Explicit { theta, .. } => {
                    *theta = if value == "auto" { None } else { Some(ratio(key, value)?) }
                }
                ExponentChoice::Auto if value == "auto" => {}
                ExponentChoice::Auto => {
                    return Err(KlsError::Config("theta needs an explicit epsilon (set epsilon first)".into()))
                }
            },
            "c_local" => self.c_local = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            "dealias" => self.dealias = flag(key, value)?,
            "blowup_threshold" => self.blowup_threshold = num(key, value)?,
            "bound_c_front" => self.bound_c_front = num(key, value)?,
            "bound_c_rate" => self.bound_c_rate = num(key, value)?,
            "rows_per_window" => self.rows_per_window = num(key, value)?,
            "ic.amplitude" => p.amplitude = num(key, value)?,
            "ic.width" => p.width = num(key, value)?,
            "ic.center" => p.center = num(key, value)?,
            "ic.velocity" => p.velocity = num(key, value)?,
            "ic.n_amplitude" => p.n_amplitude = num(key, value)?,
            "ic.n_width" => p.n_width = num(key, value)?,
            "ic.n_center" => p.n_center = num(key, value)?,
            "ic.nt_amplitude" => p.nt_amplitude = num(key, value)?,
            "ic.mode" => p.mode = num(key, value)?,
            "ic.n_mode" => p.n_mode = num(key, value)?,
            "ic.separation" => p.separation = num(key, value)?,
            "ic.noise" => p.noise = num(key, value)?,
            "ic.path" => p.path = Some(PathBuf::from(value)),
            other => return Err(KlsError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` in order.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| KlsError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k, v).map_err(|e| KlsError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults, then `file` (if any), then `overrides` in order.
    pub fn layered(file: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(text) = file {
            cfg.apply_text(text)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(KlsError::Config(msg));
        if self.m < rational::q(1, 1) || self.m >= rational::q(2, 1) {
            return err(format!("m must lie in [1, 2), got {}", rational::render(self.m)));
        }
        if self.num_points < 8 || self.num_points % 2 != 0 {
            return err(format!("grid_points must be even and >= 8, got {}", self.num_points));
        }
        let reals = [
            ("domain_length", self.domain_length),
            ("dt", self.dt),
            ("c_local", self.c_local),
            ("blowup_threshold", self.blowup_threshold),
            ("bound_c_front", self.bound_c_front),
            ("bound_c_rate", self.bound_c_rate),
        ];
        for (name, v) in reals {
            if !(v.is_finite() && v > 0.0) {
                return err(format!("{name} must be finite and positive, got {v}"));
            }
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return err(format!("T must be finite and >= 0, got {}", self.t_final));
        }
        if self.rows_per_window == 0 {
            return err("rows_per_window must be >= 1".into());
        }
        let p = &self.ic_params;
        let params = [
            ("ic.amplitude", p.amplitude),
            ("ic.center", p.center),
            ("ic.velocity", p.velocity),
            ("ic.n_amplitude", p.n_amplitude),
            ("ic.n_center", p.n_center),
            ("ic.nt_amplitude", p.nt_amplitude),
            ("ic.separation", p.separation),
            ("ic.noise", p.noise),
        ];
        for (name, v) in params {
            if !v.is_finite() {
                return err(format!("{name} must be finite"));
            }
        }
        if !(p.width > 0.0 && p.n_width > 0.0 && p.width.is_finite() && p.n_width.is_finite()) {
            return err("ic.width and ic.n_width must be positive".into());
        }
        if self.ic == Preset::FromCheckpoint && p.path.is_none() {
            return err("from-checkpoint needs ic.path".into());
        }
        self.exponent_set().map(|_| ())
    }

    pub fn m_f64(&self) -> f64 {
        rational::to_f64(self.m)
    }

    pub fn exponent_set(&self) -> Result<ExponentSet> {
        let r = match &self.exponents {
            ExponentChoice::Auto => auto_exponents(self.m),
            ExponentChoice::Explicit { epsilon, theta: None } => bourgain_exponents(self.m, *epsilon),
            ExponentChoice::Explicit { epsilon, theta: Some(theta) } => ExponentSet::new(self.m, *epsilon, *theta),
        };
        r.map_err(|e| KlsError::Config(e.to_string()))
    }

    /// Canonical `key = value` form; [`RunConfig::from_text`] reads it back to an equal config.
    pub fn to_text(&self) -> String {
        let p = &self.ic_params;
        let mut lines = vec![
            format!("m = {}", rational::render(self.m)),
            format!("grid_points = {}", self.num_points),
            format!("domain_length = {:?}", self.domain_length),
            format!("dt = {:?}", self.dt),
            format!("T = {:?}", self.t_final),
            format!("ic = {}", self.ic.tag()),
        ];
        match &self.exponents {
            ExponentChoice::Auto => lines.push("epsilon = auto".into()),
            ExponentChoice::Explicit { epsilon, theta } => {
                lines.push(format!("epsilon = {}", rational::render(*epsilon)));
                lines.push(format!("theta = {}", theta.map_or("auto".into(), rational::render)));
            }
        }
        lines.extend([
            format!("c_local = {:?}", self.c_local),
            format!("seed = {}", self.seed),
            format!("dealias = {}", self.dealias),
            format!("blowup_threshold = {:?}", self.blowup_threshold),
            format!("bound_c_front = {:?}", self.bound_c_front),
            format!("bound_c_rate = {:?}", self.bound_c_rate),
            format!("rows_per_window = {}", self.rows_per_window),
            format!("ic.amplitude = {:?}", p.amplitude),
            format!("ic.width = {:?}", p.width),
            format!("ic.center = {:?}", p.center),
            format!("ic.velocity = {:?}", p.velocity),
            format!("ic.n_amplitude = {:?}", p.n_amplitude),
            format!("ic.n_width = {:?}", p.n_width),
            format!("ic.n_center = {:?}", p.n_center),
            format!("ic.nt_amplitude = {:?}", p.nt_amplitude),
            format!("ic.mode = {}", p.mode),
            format!("ic.n_mode = {}", p.n_mode),
            format!("ic.separation = {:?}", p.separation),
            format!("ic.noise = {:?}", p.noise),
        ]);
        if let Some(path) = &p.path {
            lines.push(format!("ic.path = {}", path.display()));
        }
        if let Some(out) = &self.out_dir {
            lines.push(format!("out = {}", out.display()));
        }
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("m", "5/4").unwrap();
        cfg.set("epsilon", "1/10").unwrap();
        cfg.set("theta", "1/20").unwrap();
        cfg.set("ic.noise", "0.01").unwrap();
        cfg.set("dt", "0.0025").unwrap();
        assert_eq!(RunConfig::from_text(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(RunConfig::from_text(&RunConfig::default().to_text()).unwrap(), RunConfig::default());
    }

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let file = "dt = 0.01\nT = 3 # comment\n";
        let cfg = RunConfig::layered(Some(file), &[("T".into(), "5".into())]).unwrap();
        assert_eq!(cfg.dt, 0.01);
        assert_eq!(cfg.t_final, 5.0);
        assert_eq!(cfg.num_points, 256);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for (k, v) in [("m", "2"), ("m", "1/2"), ("grid_points", "7"), ("dt", "nan"), ("ic", "soliton"), ("bogus", "1")]
        {
            let r = RunConfig::layered(None, &[(k.into(), v.into())]);
            assert!(matches!(r, Err(KlsError::Config(_))), "{k}={v}");
        }
        assert!(RunConfig::layered(None, &[("ic".into(), "from-checkpoint".into())]).is_err());
        assert!(RunConfig::layered(None, &[("theta".into(), "1/10".into())]).is_err());
        let bad_eps = [("m".to_string(), "1".to_string()), ("epsilon".into(), "1/16".into())];
        assert!(RunConfig::layered(None, &bad_eps).is_err());
    }
}
