use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use levyk::bounds::{
    dichotomy_experiment, verify_min_form, verify_theorem_12, verify_theorem_13, verify_theorem_14, BoundOptions,
    DichotomySetup, DEFAULT_CRITICAL, DEFAULT_SUBCRITICAL,
};
use levyk::convolution::{check_condition_31, check_condition_c, check_condition_p, classify_f, conv_power, TruncatedMeasure};
use levyk::density::{default_grid, density_fourier, density_split, require_condition_e};
use levyk::exponent::{check_condition_21, check_condition_e, check_weak_scaling, ExponentTable};
use levyk::grid::{log_space, Grid1};
use levyk::io::{self, Series};
use levyk::profiles::LevyModel;
use levyk::verdict::{ConditionReport, Verdict};
use levyk::LevyError;

const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

#[derive(Parser)]
#[command(name = "levyk", version, about = "Transition densities and small-time bound diagnostics for radial Levy models")]
struct Cli {
    /// Model configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Output kinds to write.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv,json")]
    emit: Vec<Emit>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Condition {
    C,
    P,
    E,
    F,
    #[value(name = "21")]
    TwoOne,
    #[value(name = "31")]
    ThreeOne,
    Scaling,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    T12,
    T13,
    T14,
    Minform,
    Dichotomy,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fourier,
    Split,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate Re Φ, Ψ and the time scale h(t).
    Exponent {
        #[arg(long, default_value_t = 1e-3)]
        rho_min: f64,
        #[arg(long, default_value_t = 1e9)]
        rho_max: f64,
        #[arg(long, default_value_t = 1e-4)]
        t_min: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
    },
    /// Evidence for one structural condition.
    Check {
        #[arg(value_enum, ignore_case = true)]
        condition: Condition,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        /// Lower end of the scaling window.
        #[arg(long, default_value_t = 1.0)]
        s0: f64,
    },
    /// Transition density on a grid.
    Density {
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "split")]
        method: MethodArg,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        dx: Option<f64>,
        /// Splitting radius (split method).
        #[arg(long)]
        r: Option<f64>,
        /// Compute even if condition (E) is not PASS.
        #[arg(long)]
        force: bool,
    },
    /// Grid evidence for a bound.
    Verify {
        #[arg(value_enum, ignore_case = true)]
        theorem: Theorem,
        /// Time for the dichotomy run.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        r0: Option<f64>,
    },
    /// n-fold convolution power of the large-jump measure.
    Convolve {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 40.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.01)]
        dx: f64,
    },
}

enum Failure {
    Usage(String),
    Core(LevyError),
}

impl From<LevyError> for Failure {
    fn from(e: LevyError) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<u8, Failure>;

struct Out {
    dir: PathBuf,
    emit: Vec<Emit>,
}

impl Out {
    fn wants(&self, e: Emit) -> bool {
        self.emit.contains(&e)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn text(&self, name: &str, body: &str) -> Result<(), Failure> {
        fs::write(self.path(name), body).map_err(|e| Failure::Core(LevyError::Io(format!("{name}: {e}"))))
    }

    fn json<T: serde::Serialize>(&self, name: &str, v: &T) -> Result<(), Failure> {
        if self.wants(Emit::Json) {
            self.text(name, &io::to_json(v)?)?;
        }
        Ok(())
    }

    fn csv(&self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> levyk::Result<()>) -> Result<(), Failure> {
        if self.wants(Emit::Csv) {
            let mut buf = Vec::new();
            f(&mut buf)?;
            fs::write(self.path(name), buf).map_err(|e| Failure::Core(LevyError::Io(format!("{name}: {e}"))))?;
        }
        Ok(())
    }

    fn svg(&self, name: &str, body: impl FnOnce() -> String) -> Result<(), Failure> {
        if self.wants(Emit::Svg) {
            self.text(name, &body())?;
        }
        Ok(())
    }
}

fn load_model(path: Option<&Path>) -> Result<LevyModel, Failure> {
    let path = path.ok_or_else(|| Failure::Usage("--config <path> is required for this command".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: not valid JSON: {e}", path.display())))?;
    for field in ["d", "kappa", "kappa.variant", "m", "beta", "delta"] {
        let mut v = Some(&value);
        for key in field.split('.') {
            v = v.and_then(|v| v.get(key));
        }
        if v.is_none() {
            return Err(Failure::Usage(format!("config {}: missing field `{field}`", path.display())));
        }
    }
    LevyModel::from_json(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

fn cap_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("LEVYK_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Failure::Usage(format!("LEVYK_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                LevyError::InvalidParameter { .. } | LevyError::OutOfRange { .. } | LevyError::Unsupported(_) => EXIT_USAGE,
                LevyError::Precondition { .. } => EXIT_PRECONDITION,
                _ => EXIT_INCONCLUSIVE,
            })
        }
    }
}

fn run(cli: Cli) -> Outcome {
    cap_threads()?;
    fs::create_dir_all(&cli.out).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", cli.out.display())))?;
    let out = Out {
        dir: cli.out.clone(),
        emit: cli.emit.clone(),
    };
    let config = cli.config.as_deref();
    match cli.cmd {
        Command::Exponent {
            rho_min,
            rho_max,
            t_min,
            t_max,
        } => cmd_exponent(&load_model(config)?, &out, rho_min, rho_max, t_min, t_max),
        Command::Check { condition, r0, s0 } => cmd_check(&load_model(config)?, &out, condition, r0, s0),
        Command::Density {
            t,
            method,
            x_max,
            dx,
            r,
            force,
        } => cmd_density(&load_model(config)?, &out, t, method, x_max, dx, r, force),
        Command::Verify {
            theorem: Theorem::Dichotomy,
            t,
            ..
        } => {
            let model = config.map(|p| load_model(Some(p))).transpose()?;
            cmd_dichotomy(model.as_ref(), &out, t)
        }
        Command::Verify {
            theorem,
            t_grid,
            theta,
            r0,
            ..
        } => cmd_verify(&load_model(config)?, &out, theorem, BoundOptions { t_grid, theta, far_probes: None, r0 }),
        Command::Convolve { r, n, x_max, dx } => cmd_convolve(&load_model(config)?, &out, r, n, x_max, dx),
    }
}

fn cmd_exponent(model: &LevyModel, out: &Out, rho_min: f64, rho_max: f64, t_min: f64, t_max: f64) -> Outcome {
    let (lo, hi) = (1e-3, 1e9);
    if !(rho_min >= lo && rho_max <= hi && rho_min < rho_max) {
        return Err(Failure::Usage(format!(
            "rho range [{rho_min:e}, {rho_max:e}] must lie inside the table range [{lo:e}, {hi:e}]"
        )));
    }
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(Failure::Usage("need 0 < t_min < t_max".into()));
    }
    let table = ExponentTable::with_range(model, rho_min, rho_max)?;
    let mut scales = Vec::new();
    for t in log_space(t_min, t_max, 41) {
        match table.h_of_t(t) {
            Ok(s) => scales.push(s),
            Err(LevyError::OutOfRange { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    out.csv("exponent.csv", |w| io::write_exponent_csv(&table, w))?;
    out.csv("timescale.csv", |w| io::write_timescale_csv(&scales, w))?;
    out.svg("exponent.svg", || {
        let re: Vec<(f64, f64)> = table.radii().iter().copied().zip(table.re_phi_values().iter().copied()).collect();
        let psi: Vec<(f64, f64)> = table.radii().iter().copied().zip(table.psi_values().iter().copied()).collect();
        io::svg_loglog(
            "characteristic exponent",
            "rho",
            "value",
            &[Series { label: "Re phi", points: &re }, Series { label: "Psi", points: &psi }],
        )
    })?;
    println!(
        "exponent: {} nodes on [{rho_min:e}, {rho_max:e}], {} time scales",
        table.radii().len(),
        scales.len()
    );
    Ok(0)
}

fn emit_condition(out: &Out, r: &ConditionReport) -> Outcome {
    let stem = format!("check_{}", r.condition);
    out.json(&format!("{stem}.json"), r)?;
    out.csv(&format!("{stem}.csv"), |w| io::write_ratio_csv(&r.grid, w))?;
    out.svg(&format!("{stem}.svg"), || {
        let pts: Vec<(f64, f64)> = r.grid.iter().map(|p| (p.x, p.ratio)).collect();
        io::svg_loglog(&format!("condition {}", r.condition), "x", "ratio", &[Series { label: "ratio", points: &pts }])
    })?;
    match &r.reason {
        Some(reason) => println!("check {}: {} ({reason})", r.condition, r.verdict),
        None => println!("check {}: {} (sup ratio {:.6e})", r.condition, r.verdict, r.sup_ratio),
    }
    Ok(r.verdict.exit_code() as u8)
}

fn cmd_check(model: &LevyModel, out: &Out, cond: Condition, r0: f64, s0: f64) -> Outcome {
    if !(r0 > 0.0) {
        return Err(Failure::Usage(format!("--r0 must be positive, got {r0}")));
    }
    let report = match cond {
        Condition::F => {
            let s = model.profile().spec();
            classify_f(model.dim(), s.m, s.beta, s.delta)?.report()
        }
        Condition::ThreeOne => check_condition_31(model, r0, None)?,
        other => {
            let table = ExponentTable::for_model(model)?;
            match other {
                Condition::C => check_condition_c(model, &table, r0, None, None)?,
                Condition::P => check_condition_p(model, &table, r0, None, None)?,
                Condition::E => check_condition_e(model, &table, None)?,
                Condition::TwoOne => check_condition_21(model, &table, r0)?,
                Condition::Scaling => check_weak_scaling(&table, s0)?.2,
                Condition::F | Condition::ThreeOne => unreachable!(),
            }
        }
    };
    emit_condition(out, &report)
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    model: &LevyModel,
    out: &Out,
    t: f64,
    method: MethodArg,
    x_max: Option<f64>,
    dx: Option<f64>,
    r: Option<f64>,
    force: bool,
) -> Outcome {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Failure::Usage(format!("--t must be positive, got {t}")));
    }
    let table = ExponentTable::for_model(model)?;
    match require_condition_e(model, &table) {
        Ok(()) => {}
        Err(e @ LevyError::Precondition { .. }) if force => log::warn!("{e}; continuing because of --force"),
        Err(e) => return Err(e.into()),
    }
    let base = default_grid(model, &table, t)?;
    let grid = Grid1::covering(dx.unwrap_or(base.dx), x_max.unwrap_or(base.x_max()))?;
    let p = match method {
        MethodArg::Fourier => density_fourier(model, &table, t, &grid)?,
        MethodArg::Split => density_split(model, &table, t, &grid, r)?,
    };
    let meta = io::DensityMeta::of(&p);
    out.csv("density.csv", |w| io::write_density_csv(&p, w))?;
    out.json("density.json", &meta)?;
    out.svg("density.svg", || {
        let pts: Vec<(f64, f64)> = (p.grid.half + 1..p.grid.len())
            .filter(|&j| !p.err_flags[j])
            .map(|j| (p.grid.x(j), p.values[j]))
            .collect();
        io::svg_loglog(&format!("density at t = {t}"), "x", "p", &[Series { label: p.method.name(), points: &pts }])
    })?;
    println!(
        "density: t = {t}, method {}, {} points, mass {:.9}, {} flagged",
        p.method.name(),
        meta.points,
        meta.mass,
        meta.flagged
    );
    Ok(0)
}

fn cmd_verify(model: &LevyModel, out: &Out, theorem: Theorem, opts: BoundOptions) -> Outcome {
    let table = ExponentTable::for_model(model)?;
    let r = match theorem {
        Theorem::T12 => verify_theorem_12(model, &table, &opts)?,
        Theorem::T13 => verify_theorem_13(model, &table, &opts)?,
        Theorem::T14 => verify_theorem_14(model, &table, &opts)?,
        Theorem::Minform => verify_min_form(model, &table, &opts)?,
        Theorem::Dichotomy => unreachable!(),
    };
    let stem = format!("verify_{}", r.theorem);
    out.json(&format!("{stem}.json"), &r)?;
    out.csv(&format!("{stem}.csv"), |w| io::write_bound_curves_csv(&r, w))?;
    out.svg(&format!("{stem}.svg"), || {
        let curves: Vec<(String, Vec<(f64, f64)>)> = r
            .slices
            .iter()
            .map(|s| {
                let pts = s.near.iter().chain(&s.far).chain(&s.min_form).map(|p| (p.x, p.ratio)).collect();
                (format!("t = {:.3e}", s.t), pts)
            })
            .collect();
        let series: Vec<Series> = curves.iter().map(|(l, p)| Series { label: l, points: p }).collect();
        io::svg_loglog(&format!("{} ratio curves", r.theorem), "x", "ratio", &series)
    })?;
    let fmt = |v: Option<Verdict>| v.map_or("-".to_string(), |v| v.name().to_string());
    println!(
        "verify {}: {} (near {}, far {}, coverage {:.2})",
        r.theorem,
        r.verdict,
        fmt(r.near_verdict),
        fmt(r.far_verdict),
        r.coverage
    );
    Ok(r.verdict.exit_code() as u8)
}

fn cmd_dichotomy(model: Option<&LevyModel>, out: &Out, t: Option<f64>) -> Outcome {
    let mut setup = DichotomySetup::default();
    if let Some(m) = model {
        let s = m.profile().spec();
        setup.kappa = s.kappa;
        setup.d = m.dim();
        setup.m = s.m;
    }
    if let Some(t) = t {
        setup.t = t;
    }
    let r = dichotomy_experiment(&setup, DEFAULT_CRITICAL, DEFAULT_SUBCRITICAL)?;
    out.json("verify_dichotomy.json", &r)?;
    out.csv("verify_dichotomy.csv", |w| io::write_dichotomy_csv(&r, w))?;
    out.svg("verify_dichotomy.svg", || {
        let c: Vec<(f64, f64)> = r.critical.curve.iter().map(|p| (p.x, p.ratio)).collect();
        let s: Vec<(f64, f64)> = r.subcritical.curve.iter().map(|p| (p.x, p.ratio)).collect();
        io::svg_loglog(
            "far-field ratio",
            "x",
            "p/(t g)",
            &[Series { label: "critical", points: &c }, Series { label: "subcritical", points: &s }],
        )
    })?;
    println!(
        "verify dichotomy: {} (growth {:.4} vs {:.4}, ratio {:.3}, margin {})",
        r.verdict.name(),
        r.critical.growth_factor,
        r.subcritical.growth_factor,
        r.factor_ratio,
        r.margin
    );
    Ok(r.verdict.exit_code() as u8)
}

fn cmd_convolve(model: &LevyModel, out: &Out, r: f64, n: usize, x_max: f64, dx: f64) -> Outcome {
    let grid = Grid1::covering(dx, x_max)?;
    let measure = TruncatedMeasure::new(model, r, grid)?;
    let c = conv_power(&measure, n)?;
    let meta = io::ConvPowerMeta {
        n,
        r,
        dx: grid.dx,
        x_max: grid.x_max(),
        mass: c.mass(),
        expected_mass: measure.exact_mass.powi(n as i32),
        leaked: c.leaked,
    };
    out.csv("conv_power.csv", |w| io::write_conv_power_csv(&c, w))?;
    out.json("conv_power.json", &meta)?;
    out.svg("conv_power.svg", || {
        let pts: Vec<(f64, f64)> = (grid.half + 1..grid.len()).map(|j| (grid.x(j), c.values[j] / grid.dx)).collect();
        io::svg_loglog(&format!("convolution power n = {n}"), "x", "density", &[Series { label: "power", points: &pts }])
    })?;
    let rel = (meta.mass - meta.expected_mass).abs() / meta.expected_mass;
    println!("convolve: n = {n}, r = {r}, mass {:.9e} (expected {:.9e}, rel {rel:.2e})", meta.mass, meta.expected_mass);
    Ok(0)
}
