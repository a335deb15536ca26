//! Command-line front-end over the `mageo` library. Every subcommand reads an
//! optional config file, applies flag overrides and writes CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod json;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Format, NullRoot, RunConfig};
pub use error::{exit, CliError};

#[derive(Parser, Debug)]
#[command(name = "mageo", version, about = "Monge-Ampere geometry toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// TOML or JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// File holding a generating-function record.
    #[arg(long = "gf")]
    pub gf_file: Option<PathBuf>,
    /// Chart of the generating function: P, R, S or T.
    #[arg(long)]
    pub chart: Option<String>,
    #[arg(long)]
    pub potential: Option<String>,
    /// Product eps * q_g as a rational literal.
    #[arg(long = "eps-q")]
    pub eps_q: Option<String>,
    /// Chart point `a,b,c`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct TraceArgs {
    /// Initial chart point `a,b,c`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    /// Initial covector `a,b,c`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Option<Vec<f64>>,
    /// Solve this covector component from the null condition.
    #[arg(long)]
    pub null_free: Option<usize>,
    #[arg(long, value_enum)]
    pub null_root: Option<NullRoot>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct VerifyArgs {
    /// Print the criteria without running them.
    #[arg(long)]
    pub list: bool,
    /// Scale the `T_ZZ` term of the example residual by `1 + 1e-3`.
    #[arg(long)]
    pub perturb: bool,
}

#[derive(Args, Debug, Default, Clone)]
pub struct WindArgs {
    /// Rossby number as a rational literal.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// `convex` or a fiber index.
    #[arg(long)]
    pub branch: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct FamilyArgs {
    /// TOML or JSON family specification.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Signature of the pull-back metric at a point or over a grid.
    Classify(#[command(flatten)] Common),
    /// Integrate a bicharacteristic.
    Trace {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: TraceArgs,
    },
    /// Run the reproduction of the fold example.
    VerifyPaper {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: VerifyArgs,
    },
    /// Symbolic Monge-Ampere residual, optionally evaluated at a point.
    Residual(#[command(flatten)] Common),
    /// Singular-locus polynomial, optionally evaluated at a point.
    Singular(#[command(flatten)] Common),
    /// Caustic samples over a slice grid.
    Caustic(#[command(flatten)] Common),
    /// Preimages of base points with their geopotential values.
    Fiber(#[command(flatten)] Common),
    /// Build a polynomial solution from cubic coefficients.
    Family {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: FamilyArgs,
    },
    /// Semigeostrophic state and wind over a section.
    Wind {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: WindArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::Trace { .. } => "trace",
            Command::VerifyPaper { .. } => "verify-paper",
            Command::Residual(_) => "residual",
            Command::Singular(_) => "singular",
            Command::Caustic(_) => "caustic",
            Command::Fiber(_) => "fiber",
            Command::Family { .. } => "family",
            Command::Wind { .. } => "wind",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Classify(c)
            | Command::Residual(c)
            | Command::Singular(c)
            | Command::Caustic(c)
            | Command::Fiber(c)
            | Command::Trace { common: c, .. }
            | Command::VerifyPaper { common: c, .. }
            | Command::Family { common: c, .. }
            | Command::Wind { common: c, .. } => c,
        }
    }
}

/// Parses arguments, runs the subcommand and returns the exit status. Output
/// goes to `out` unless redirected to a file; error records go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return exit::OK;
            }
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&msg).trim_start_matches("error: ");
            return report(&CliError::Config(first.to_string()), err);
        }
    };
    match execute(&cli.command) {
        Ok(done) => finish(done, out, err),
        Err(e) => report(&e, err),
    }
}

fn report(e: &CliError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "{}", e.record());
    e.exit_code()
}

/// Text produced by a subcommand and where it should go.
pub struct Done {
    pub text: String,
    pub output: Option<PathBuf>,
    /// Set when the command succeeded but a verification failed.
    pub failure: Option<CliError>,
}

fn finish(done: Done, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let written = match &done.output {
        Some(path) => std::fs::write(path, &done.text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(done.text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    };
    if let Err(e) = written {
        return report(&e, err);
    }
    match done.failure {
        Some(f) => report(&f, err),
        None => exit::OK,
    }
}

/// Loads the config file, merges flags and dispatches.
pub fn execute(cmd: &Command) -> Result<Done, CliError> {
    let common = cmd.common();
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &cfg.command {
        if c != cmd.name() {
            return Err(CliError::Config(format!("config is for `{c}`, not `{}`", cmd.name())));
        }
    }
    apply_common(&mut cfg, common)?;
    match cmd {
        Command::Trace { args: t, .. } => apply_trace(&mut cfg, t)?,
        Command::VerifyPaper { args: v, .. } if v.perturb => cfg.perturb = Some(true),
        Command::Wind { args: w, .. } => apply_wind(&mut cfg, w)?,
        Command::Family { args: f, .. } => {
            if let Some(p) = &f.spec {
                cfg.family = Some(config::parse_file(p)?);
            }
        }
        _ => {}
    }
    cfg.validate()?;
    let text = match cmd {
        Command::Classify(_) => commands::classify(&cfg)?,
        Command::Trace { .. } => commands::trace(&cfg)?,
        Command::VerifyPaper { args: v, .. } if v.list => commands::verify_list(&cfg)?,
        Command::VerifyPaper { .. } => {
            let (text, failure) = commands::verify_paper(&cfg)?;
            return Ok(Done { text, output: cfg.output.clone(), failure });
        }
        Command::Residual(_) => commands::residual(&cfg)?,
        Command::Singular(_) => commands::singular(&cfg)?,
        Command::Caustic(_) => commands::caustic(&cfg)?,
        Command::Fiber(_) => commands::fiber(&cfg)?,
        Command::Family { .. } => commands::family(&cfg)?,
        Command::Wind { .. } => commands::wind(&cfg)?,
    };
    Ok(Done { text, output: cfg.output.clone(), failure: None })
}

fn triple(name: &str, v: &[f64]) -> Result<[f64; 3], CliError> {
    v.try_into()
        .map_err(|_| CliError::Config(format!("--{name} takes exactly three comma-separated numbers, got {}", v.len())))
}

fn apply_common(cfg: &mut RunConfig, c: &Common) -> Result<(), CliError> {
    if let Some(f) = &c.gf_file {
        cfg.gf_file = Some(f.clone());
        cfg.gf = None;
    }
    if c.chart.is_some() || c.potential.is_some() || c.eps_q.is_some() {
        let base = match (&cfg.gf, &cfg.gf_file) {
            (Some(g), _) => g.clone(),
            (None, Some(f)) => config::parse_file(f)?,
            (None, None) => mageo::fold_example().to_record(),
        };
        let potential_given = c.potential.is_some();
        let chart = c.chart.clone().unwrap_or(base.chart.clone());
        if chart != base.chart && !potential_given {
            return Err(CliError::Config("--chart needs a --potential over the new chart's variables".into()));
        }
        cfg.gf = Some(mageo::chart::GfRecord {
            chart,
            potential: c.potential.clone().unwrap_or(base.potential),
            eps_q: c.eps_q.clone().unwrap_or(base.eps_q),
        });
        cfg.gf_file = None;
    }
    if let Some(p) = &c.point {
        cfg.point = Some(triple("point", p)?);
    }
    if c.tol.is_some() {
        cfg.tol = c.tol;
    }
    if c.output.is_some() {
        cfg.output = c.output.clone();
    }
    if c.format.is_some() {
        cfg.format = c.format;
    }
    Ok(())
}

fn apply_trace(cfg: &mut RunConfig, t: &TraceArgs) -> Result<(), CliError> {
    let tc = cfg.trace.get_or_insert_with(Default::default);
    if let Some(q) = &t.q {
        tc.q = Some(triple("q", q)?);
    }
    if let Some(p) = &t.p {
        tc.p = Some(triple("p", p)?);
    }
    if t.null_free.is_some() {
        tc.null_free = t.null_free;
    }
    if t.null_root.is_some() {
        tc.null_root = t.null_root;
    }
    if t.step.is_some() {
        tc.step = t.step;
    }
    if t.max_steps.is_some() {
        tc.max_steps = t.max_steps;
    }
    Ok(())
}

fn apply_wind(cfg: &mut RunConfig, w: &WindArgs) -> Result<(), CliError> {
    let sg = cfg.sg.get_or_insert_with(Default::default);
    if let Some(e) = &w.epsilon {
        sg.epsilon = Some(e.clone());
    }
    if let Some(b) = &w.branch {
        sg.branch = Some(match b.as_str() {
            "convex" => mageo::sg::Branch::Convex,
            s => mageo::sg::Branch::Index(
                s.parse().map_err(|_| CliError::Config(format!("--branch takes `convex` or an index, got `{s}`")))?,
            ),
        });
    }
    Ok(())
}
