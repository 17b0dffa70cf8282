//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::doppler::{self, DopplerConfig};
use crate::error::{Error, Result};
use crate::figures::{self, Figure};
use crate::io::{self, Format, RunConfig};
use crate::params::{ModelParams, ShiftMode, SigmaMapping, VelocityClass};
use crate::response::{self, transparency_width_analytic};
use crate::sensitivity::{self, MultiphotonInputs, OperatingPoint};
use crate::stats;
use crate::sweep::{self, Axis, Observable, Scale, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "eit-faraday", version, about = "Intracavity-EIT Faraday magnetometer model")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dot-path override, e.g. `model.delta=0.02`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file (directory for `reproduce`); stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_name = "csv|json")]
    format: Option<Format>,
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
    #[arg(long, global = true, value_name = "copropagating|probe-only")]
    shift_mode: Option<ShiftMode>,
    #[arg(long, global = true, value_name = "as_written|swapped")]
    sigma_mapping: Option<SigmaMapping>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct PointArgs {
    /// fig2, fig3, fig4, base, improved or bare.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta_p: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmission, phases and outcome probabilities at one point.
    Response(PointArgs),
    /// One-axis sweep written as CSV (or JSON).
    Sweep(SweepArgs),
    /// Fisher information with and without Doppler averaging.
    Fisher {
        #[command(flatten)]
        point: PointArgs,
        /// Also report the Doppler-averaged values.
        #[arg(long)]
        doppler: bool,
        /// Atomic temperature for the Doppler width, K.
        #[arg(long)]
        temperature: Option<f64>,
    },
    /// Single- and multi-photon field sensitivity report.
    Sensitivity(SensitivityArgs),
    /// Regenerates a figure dataset.
    Reproduce {
        #[arg(value_name = "fig2|fig3|fig4")]
        figure: Figure,
    },
    /// SI bridge constants and conventions.
    Constants,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    axis: Option<Axis>,
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    log: bool,
    /// Comma-separated observables.
    #[arg(long, value_delimiter = ',')]
    observables: Vec<Observable>,
    /// Doppler-average the probabilities and Fisher information.
    #[arg(long)]
    doppler: bool,
}

#[derive(Debug, Args)]
struct SensitivityArgs {
    #[arg(long)]
    preset: Option<String>,
    /// Input probe power, W.
    #[arg(long, default_value_t = 1e-3)]
    power: f64,
    /// Temperature, K (detection noise and, with --doppler, the Doppler width).
    #[arg(long, default_value_t = 1e-3)]
    temperature: f64,
    /// Fixed operating δ in γ units; Fisher-optimal when absent.
    #[arg(long)]
    delta: Option<f64>,
    /// Probe repetitions per second for the single-photon figure.
    #[arg(long)]
    rate: Option<f64>,
    /// Single-photon sensitivity (T/√Hz) to calibrate the repetition rate against.
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    doppler: bool,
}

struct Context {
    cfg: RunConfig,
    global: Global,
}

impl Context {
    fn doppler(&self, temperature: Option<f64>) -> DopplerConfig {
        let mut d = self.cfg.doppler.unwrap_or_else(|| self.cfg.constants.doppler_config());
        if let Some(t) = temperature {
            d.temperature = t;
        }
        if let Some(n) = self.global.quadrature_order {
            d.quadrature_order = n;
        }
        if let Some(m) = self.global.shift_mode {
            d.shift_mode = m;
        }
        d
    }

    fn format(&self, default: Format) -> Format {
        self.global
            .format
            .or_else(|| self.cfg.output.as_ref().and_then(|o| o.format))
            .unwrap_or(default)
    }

    fn output(&self) -> Option<PathBuf> {
        self.global
            .output
            .clone()
            .or_else(|| self.cfg.output.as_ref().and_then(|o| o.path.clone()))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match self.output() {
            Some(path) => io::write_text(&path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<()> {
        if self.format(Format::Json) != Format::Json {
            return Err(Error::Config("this command only writes JSON".into()));
        }
        self.emit(&io::render_json(value)?)
    }
}

fn preset(name: &str) -> Result<ModelParams> {
    ModelParams::named(name).ok_or_else(|| {
        Error::Config(format!("unknown preset `{name}` (fig2|fig3|fig4|base|improved|bare)"))
    })
}

fn load_config(global: &Global, preset_name: Option<&str>) -> Result<RunConfig> {
    let mut base = RunConfig::default();
    if let Some(p) = preset_name {
        base.model = preset(p)?;
    }
    let mut value = serde_json::to_value(&base).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(path) = &global.config {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let source = path.display().to_string();
        // strict parse first so unknown keys are reported with their position
        io::parse_config(&text, &source)?;
        let file = io::parse_value(&text, &source)?;
        if preset_name.is_some() {
            if let Some(obj) = value.get_mut("model") {
                if let Some(m) = file.get("model") {
                    io::merge_values(obj, m.clone());
                }
            }
            let mut rest = file;
            if let Some(o) = rest.as_object_mut() {
                o.remove("model");
            }
            io::merge_values(&mut value, rest);
        } else {
            io::merge_values(&mut value, file);
        }
    }
    for s in &global.set {
        io::apply_override(&mut value, s)?;
    }
    if let Some(m) = global.sigma_mapping {
        io::apply_override(&mut value, &format!("model.sigma_mapping={}", m.as_str()))?;
    }
    let cfg = io::config_from_value(value)?;
    cfg.validate()?;
    Ok(cfg)
}

fn point_model(cfg: &RunConfig, args: &PointArgs) -> ModelParams {
    let mut p = cfg.model;
    if let Some(d) = args.delta {
        p.delta = d;
    }
    if let Some(d) = args.delta_p {
        p.delta_p = d;
    }
    p
}

fn conventions(p: &ModelParams, d: Option<&DopplerConfig>) -> Value {
    json!({
        "sigma_mapping": p.sigma_mapping.as_str(),
        "shift_mode": d.map(|d| d.shift_mode.as_str()),
        "fisher_average": d.map(|d| d.fisher_average.as_str()),
        "units": "rates and detunings in gamma",
        "version": crate::VERSION,
    })
}

fn cmd_response(ctx: &Context, args: &PointArgs) -> Result<()> {
    let p = point_model(&ctx.cfg, args);
    p.validate()?;
    let r = response::response(&p)?;
    let o = stats::outcome_probabilities(&p, VelocityClass::AT_REST)?;
    ctx.emit_json(&json!({
        "model": p,
        "response": r,
        "transmissions": [r.t_plus * r.t_plus, r.t_minus * r.t_minus],
        "outcomes": o,
        "conventions": conventions(&p, None),
    }))
}

fn cmd_fisher(ctx: &Context, point: &PointArgs, with_doppler: bool, temperature: Option<f64>) -> Result<()> {
    let p = point_model(&ctx.cfg, point);
    p.validate()?;
    let free = stats::fisher_information(&p, VelocityClass::AT_REST)?;
    let d = (with_doppler || ctx.cfg.doppler.is_some()).then(|| ctx.doppler(temperature));
    let averaged = match &d {
        Some(cfg) => Some(doppler::averaged_fisher(&p, cfg, ctx.cfg.constants.gamma_si)?),
        None => None,
    };
    for f in std::iter::once(&free).chain(averaged.as_ref()) {
        if f.singular {
            eprintln!("warning: Fisher information is singular at this point and was capped");
        }
    }
    let width = match &d {
        Some(cfg) => Some(cfg.width_in_gamma(ctx.cfg.constants.gamma_si)?),
        None => None,
    };
    ctx.emit_json(&json!({
        "model": p,
        "fisher": free,
        "fisher_doppler": averaged,
        "doppler": d,
        "doppler_width_gamma": width,
        "conventions": conventions(&p, d.as_ref()),
    }))
}

fn cmd_sweep(ctx: &Context, args: &SweepArgs) -> Result<()> {
    let mut spec = match (&ctx.cfg.sweep, args.axis) {
        (_, Some(axis)) => {
            let (Some(start), Some(stop)) = (args.start, args.stop) else {
                return Err(Error::Config("--axis needs --start and --stop".into()));
            };
            let observables = if args.observables.is_empty() {
                vec![Observable::T2Plus, Observable::T2Minus]
            } else {
                args.observables.clone()
            };
            SweepSpec::new(axis, start, stop, args.points.unwrap_or(figures::FIGURE_POINTS), observables)
        }
        (Some(s), None) => s.clone(),
        (None, None) => return Err(Error::Config("no sweep given: use --axis/--start/--stop or a config `sweep`".into())),
    };
    if args.log {
        spec.scale = Scale::Log;
    }
    if args.axis.is_none() {
        if let Some(n) = args.points {
            spec.points = n;
        }
        if !args.observables.is_empty() {
            spec.observables = args.observables.clone();
        }
    }
    if args.doppler || spec.doppler.is_some() || ctx.cfg.doppler.is_some() {
        let mut d = spec.doppler.unwrap_or_else(|| ctx.doppler(None));
        if let Some(n) = ctx.global.quadrature_order {
            d.quadrature_order = n;
        }
        if let Some(m) = ctx.global.shift_mode {
            d.shift_mode = m;
        }
        spec.doppler = Some(d);
    }
    let table = sweep::run_sweep(&spec, &ctx.cfg.model, &ctx.cfg.constants)?;
    for f in &table.flags {
        eprintln!("warning: row {} column {}: {}", f.row, f.column, f.message);
    }
    match ctx.format(Format::Csv) {
        Format::Csv => ctx.emit(&io::render_csv(&table)?),
        Format::Json => ctx.emit(&io::render_json(&table)?),
    }
}

fn cmd_sensitivity(ctx: &Context, args: &SensitivityArgs) -> Result<()> {
    let p = ctx.cfg.model;
    let d = (args.doppler || ctx.cfg.doppler.is_some()).then(|| ctx.doppler(Some(args.temperature)));
    let inputs = MultiphotonInputs {
        operating: args.delta.map_or(OperatingPoint::FisherOptimal, OperatingPoint::Fixed),
        repetitions_per_second: args.rate,
        calibration_target: args.target,
        ..MultiphotonInputs::new(args.temperature, args.power)
    };
    let report = sensitivity::multiphoton_sensitivity(&p, d.as_ref(), &ctx.cfg.constants, &inputs)?;
    for f in &report.flags {
        eprintln!("warning: {f}");
    }
    ctx.emit_json(&report)
}

fn cmd_reproduce(ctx: &Context, fig: Figure) -> Result<()> {
    let dir = ctx.output().unwrap_or_else(|| PathBuf::from("."));
    let d = ctx.doppler(None);
    let written = figures::write_figure(fig, &dir, &ctx.cfg.model, &d, &ctx.cfg.constants)?;
    for w in written {
        println!("{}", w.display());
    }
    Ok(())
}

fn cmd_constants(ctx: &Context) -> Result<()> {
    let c = &ctx.cfg.constants;
    let d = ctx.doppler(None);
    let p = &ctx.cfg.model;
    ctx.emit_json(&json!({
        "constants": c,
        "shift_per_tesla_gamma": c.shift_per_tesla(),
        "doppler": d,
        "doppler_width_rad_per_s": doppler::doppler_width(&d)?,
        "doppler_width_gamma": d.width_in_gamma(c.gamma_si)?,
        "transparency_width_gamma": transparency_width_analytic(p).ok(),
        "assumptions": c.assumptions(),
        "conventions": conventions(p, Some(&d)),
    }))
}

fn execute(cli: Cli) -> Result<()> {
    let preset_name = match &cli.command {
        Command::Response(a) | Command::Fisher { point: a, .. } => a.preset.clone(),
        Command::Sweep(a) => a.preset.clone(),
        Command::Sensitivity(a) => a.preset.clone(),
        Command::Reproduce { .. } | Command::Constants => None,
    };
    let cfg = load_config(&cli.global, preset_name.as_deref())?;
    let ctx = Context { cfg, global: cli.global };
    match &cli.command {
        Command::Response(a) => cmd_response(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Fisher {
            point,
            doppler,
            temperature,
        } => cmd_fisher(&ctx, point, *doppler, *temperature),
        Command::Sensitivity(a) => cmd_sensitivity(&ctx, a),
        Command::Reproduce { figure } => cmd_reproduce(&ctx, *figure),
        Command::Constants => cmd_constants(&ctx),
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let workers = cli.global.workers;
    let go = move || match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            }
        }
    };
    match workers {
        Some(0) => {
            eprintln!("error: --workers must be at least 1");
            EXIT_CONFIG
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(go),
            Err(e) => {
                eprintln!("error: cannot start {n} workers: {e}");
                EXIT_CONFIG
            }
        },
        None => go(),
    }
}
