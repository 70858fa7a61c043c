use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kls_core::diagnostics::n_pm_half_norm;
use kls_core::evolve::Quadrature;
use kls_core::exponents::{
    admissible_region, critical_indices, doubling_forecast, local_delta, rational, ScalingCase,
};
use kls_core::harness::{
    emit_region_figures, initial_state, run_global, run_picard_experiment, sweep, sweep_csv, sweep_grid,
    PicardSettings, RunConfig, RunStatus, EXIT_INVALID_CONFIG,
};
use kls_core::par::Exec;
use kls_core::xsb::{nonlinear_estimate_check, strichartz_check, EnsembleSpec, LinearEstimate};
use kls_core::KlsError;

#[derive(Parser)]
#[command(name = "kls", version, about = "Klein-Gordon-Schrodinger (higher-order Yukawa) simulation and verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the windowed global integration and write diagnostics.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Measure Picard contraction on the local-window ladder.
    Picard {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 33)]
        quad_points: usize,
        #[arg(long, default_value_t = 60)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        fp_tolerance: f64,
        #[arg(long, value_enum, default_value_t = QuadratureArg::Simpson)]
        quadrature: QuadratureArg,
        #[arg(long)]
        sequential: bool,
    },
    /// Admissible (theta, epsilon) regions and their polylines.
    Region {
        #[command(flatten)]
        common: Common,
        /// Values of m (rationals); defaults to 1, 3/2, 19/10, 2.
        values: Vec<String>,
    },
    /// Exponent set, critical indices and the first local window for the configured data.
    Exponents {
        #[command(flatten)]
        common: Common,
    },
    /// Ensemble ratio checks for the linear and nonlinear estimates.
    CheckEstimates {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 12)]
        ensemble_size: usize,
        #[arg(long)]
        no_refine: bool,
        #[arg(long)]
        sequential: bool,
    },
    /// Run a Cartesian grid of configurations.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `KEY=V1,V2,...`; repeat for more axes.
        #[arg(long = "vary", value_name = "KEY=VALUES")]
        vary: Vec<String>,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QuadratureArg {
    Simpson,
    GaussLegendre,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    domain_length: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    ic: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    c_local: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    no_dealias: bool,
    /// Any other config key, e.g. `--set ic.amplitude=0.8`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn overrides(&self) -> Result<Vec<(String, String)>, KlsError> {
        let mut o: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push((k.to_string(), v));
            }
        };
        push("m", self.m.clone());
        push("grid_points", self.grid_points.map(|v| v.to_string()));
        push("domain_length", self.domain_length.map(|v| v.to_string()));
        push("dt", self.dt.map(|v| v.to_string()));
        push("T", self.t_final.map(|v| v.to_string()));
        push("ic", self.ic.clone());
        push("epsilon", self.epsilon.clone());
        push("theta", self.theta.clone());
        push("c_local", self.c_local.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        if self.no_dealias {
            push("dealias", Some("false".into()));
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| KlsError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            o.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(o)
    }

    fn config(&self) -> Result<RunConfig, KlsError> {
        let text = match &self.config {
            Some(p) => Some(fs::read_to_string(p).map_err(|e| KlsError::Config(format!("{}: {e}", p.display())))?),
            None => None,
        };
        RunConfig::layered(text.as_deref(), &self.overrides()?)
    }
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), KlsError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn simulate(common: &Common) -> Result<i32, KlsError> {
    let cfg = common.config()?;
    let h = run_global(&cfg)?;
    for (t, regime) in &h.regime_switches {
        eprintln!("t={t:.6}: regime {}", regime.tag());
    }
    let last = h.rows.last().expect("at least the initial row");
    println!("status: {}", match &h.status {
        RunStatus::Completed => "completed".to_string(),
        RunStatus::Halted { time, reason } => format!("halted at t={time} ({reason})"),
    });
    println!("windows: {}  rows: {}  doublings: {}", h.schedule_log.len(), h.rows.len(), h.doubling_events.len());
    println!("t_end: {}  mass: {:e}  energy: {:e}", last.time, last.mass, last.energy);
    println!("relative drift: mass {:e}  energy {:e}", h.relative_mass_drift(), h.relative_energy_drift());
    match h.growth.fitted {
        Some((front, rate)) => println!("fitted envelope: c_front={front:.4} c_rate={rate:.4e}"),
        None => println!("fitted envelope: none on the search grid"),
    }
    println!(
        "fixed envelope (c_front={}, c_rate={}): {}",
        h.bound.c_front,
        h.bound.c_rate,
        if h.growth.holds() { "holds".to_string() } else { format!("violated at {} rows", h.growth.violations.len()) }
    );
    if cfg.out_dir.is_none() {
        print!("{}", h.diagnostics_csv());
    }
    Ok(h.status.exit_code())
}

fn picard(common: &Common, settings: PicardSettings) -> Result<i32, KlsError> {
    let cfg = common.config()?;
    let report = run_picard_experiment(&cfg, &settings)?;
    println!("# base delta {:e}", report.base_delta);
    let csv = report.to_csv();
    print!("{csv}");
    if let Some(dir) = &cfg.out_dir {
        write_file(dir, "contraction.csv", &csv)?;
    }
    Ok(0)
}

fn region(common: &Common, values: &[String]) -> Result<i32, KlsError> {
    let ms = if values.is_empty() {
        vec![rational::q(1, 1), rational::q(3, 2), rational::q(19, 10), rational::q(2, 1)]
    } else {
        values.iter().map(|v| rational::parse(v)).collect::<Result<Vec<_>, _>>()?
    };
    let figures = emit_region_figures(&ms, common.out.as_deref())?;
    for (fig, path) in figures {
        let report = admissible_region(fig.m);
        println!("{}", report.describe());
        if let Some((t, e)) = report.witness {
            println!("  witness theta={} epsilon={}", rational::render(t), rational::render(e));
        }
        if let Some(p) = path {
            println!("  wrote {}", p.display());
        }
    }
    Ok(0)
}

fn exponents(common: &Common) -> Result<i32, KlsError> {
    let cfg = common.config()?;
    let e = cfg.exponent_set()?;
    let r = rational::render;
    println!("m={} epsilon={} theta={}", r(e.m), r(e.epsilon), r(e.theta));
    println!("b1={} b2={} b1'={} b2'={}", r(e.b1), r(e.b2), r(e.b1p), r(e.b2p));
    println!("gap={} balance={} dual_endpoint={}", r(e.gap()), e.balance_holds(), e.is_dual_endpoint());
    for case in [ScalingCase::DropLaplacianU, ScalingCase::DropDtU, ScalingCase::DropHalfwaveN, ScalingCase::DropDtN] {
        let c = critical_indices(cfg.m, 1, case)?;
        println!("critical {}: k={} l={}", case.tag(), r(c.k), r(c.l));
    }
    let state = initial_state(&cfg)?;
    let mass = state.u.l2_norm();
    let n_half = n_pm_half_norm(&state);
    let d = local_delta(mass, n_half, &e, cfg.c_local)?;
    println!("data: |u0|={mass:e} |n+-(0)|_H1/2={n_half:e}");
    println!("local delta={:e} binding={:?}", d.delta, d.binding);
    println!("forecast: {:?}", doubling_forecast(mass, n_half, &e, cfg.c_local)?);
    Ok(0)
}

fn check_estimates(common: &Common, size: usize, refine: bool, exec: Exec) -> Result<i32, KlsError> {
    let cfg = common.config()?;
    let exps = cfg.exponent_set()?;
    let mut spec = EnsembleSpec { size, refine, exec, ..EnsembleSpec::default() };
    if common.seed.is_some() {
        spec.seed = cfg.seed;
    }
    let b = exps.b1_f64();
    let estimates = [
        LinearEstimate::SchrodingerStrichartz { q: f64::INFINITY, r: 2.0, b: 0.6 },
        LinearEstimate::SchrodingerStrichartz { q: 4.0, r: f64::INFINITY, b: 0.6 },
        LinearEstimate::SchrodingerInterpolated { q: 4.0, r: 4.0, b: b.max(0.4) },
        LinearEstimate::KleinGordon { p: 8.0, s: 0.5, b: 0.4 },
    ];
    let mut csv = String::new();
    let mut first = true;
    for est in estimates {
        let rep = strichartz_check(est, &spec)?;
        println!("{}: worst={:e} trend={:?}", rep.estimate_id, rep.worst_ratio, rep.grid_refinement_trend);
        csv.push_str(&rep.to_csv(first));
        first = false;
    }
    let (a, c) = nonlinear_estimate_check(&exps, &spec)?;
    for rep in [a, c] {
        println!("{}: worst={:e} trend={:?}", rep.estimate_id, rep.worst_ratio, rep.grid_refinement_trend);
        csv.push_str(&rep.to_csv(false));
    }
    match &cfg.out_dir {
        Some(dir) => write_file(dir, "estimates.csv", &csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn run_sweep(common: &Common, vary: &[String], exec: Exec) -> Result<i32, KlsError> {
    let base = common.config()?;
    let axes = vary
        .iter()
        .map(|spec| {
            let (k, vs) = spec
                .split_once('=')
                .ok_or_else(|| KlsError::Config(format!("--vary expects KEY=V1,V2,..., got {spec:?}")))?;
            Ok((k.trim().to_string(), vs.split(',').map(|v| v.trim().to_string()).collect()))
        })
        .collect::<Result<Vec<_>, KlsError>>()?;
    let mut base_no_out = base.clone();
    base_no_out.out_dir = None;
    let cells = sweep_grid(&base_no_out, &axes)?;
    let results = sweep(&cells, exec, base.out_dir.as_deref())?;
    print!("{}", sweep_csv(&results));
    Ok(0)
}

fn run(cli: Cli) -> Result<i32, KlsError> {
    match cli.command {
        Command::Simulate { common } => simulate(&common),
        Command::Picard { common, quad_points, max_iters, fp_tolerance, quadrature, sequential } => {
            let settings = PicardSettings {
                quad_points,
                max_iters,
                fp_tolerance,
                quadrature: match quadrature {
                    QuadratureArg::Simpson => Quadrature::Simpson,
                    QuadratureArg::GaussLegendre => Quadrature::GaussLegendre,
                },
                exec: exec(sequential),
            };
            picard(&common, settings)
        }
        Command::Region { common, values } => region(&common, &values),
        Command::Exponents { common } => exponents(&common),
        Command::CheckEstimates { common, ensemble_size, no_refine, sequential } => {
            check_estimates(&common, ensemble_size, !no_refine, exec(sequential))
        }
        Command::Sweep { common, vary, sequential } => run_sweep(&common, &vary, exec(sequential)),
    }
}

fn is_config_error(e: &KlsError) -> bool {
    matches!(
        e,
        KlsError::Config(_) | KlsError::InvalidParameter(_) | KlsError::Constraint(_) | KlsError::Inadmissible(_)
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { EXIT_INVALID_CONFIG as u8 } else { 1 })
        }
    }
}
