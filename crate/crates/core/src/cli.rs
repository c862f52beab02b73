//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymptotics::{fit_profile_asymptotics, limit_bowl, limit_catenoid, limit_grim_reaper, LimitReport};
use crate::error::{Error, Result};
use crate::families::grim::GrimOptions;
use crate::families::helicoid::HelicoidOptions;
use crate::families::mesh::SweepSpec;
use crate::families::rotational::BowlOptions;
use crate::families::{
    planar_grim_reaper, slab, solve_bowl, solve_catenoid, solve_grim_reaper, solve_helicoid, sweep_surface,
    CatenoidOptions, Group, GrimReaperParams, HelicoidParams, ProfileCurve,
};
use crate::io::{write_csv, write_json, write_obj, write_profile_json};
use crate::ode::OdeOptions;
use crate::verify::{run_suite, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Obj,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Core,
    Asymptotics,
    Limits,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Core => Suite::Core,
            SuiteArg::Asymptotics => Suite::Asymptotics,
            SuiteArg::Limits => Suite::Limits,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tilted grim reaper over its slab
    Grim,
    /// Rotational entire graph
    Bowl,
    /// Translating catenoid
    Catenoid,
    /// Helicoidal translator
    Helicoid,
    /// Euclidean grim reaper translating along (a1, a2)
    PlanarGrim,
    /// Distances to the limit surfaces as lambda grows
    Limits,
    /// Run a verification suite
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "nil3", version, about = "Invariant vertical translators in Nil3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Slope of the translation group (grim)
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    /// Neck radius (catenoid)
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub f0: f64,
    /// Pitch of the helicoidal motion
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub pitch: f64,
    /// Initial distance from the axis (helicoid)
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub r0: f64,
    /// Direction components (planar-grim)
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a1: f64,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub a2: f64,
    /// grim: margin to the slab ends; bowl and catenoid: r_max; helicoid: half arc length
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub span: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rtol: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub atol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
}

/// Validated parameters of one invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub lambda: f64,
    pub c: f64,
    pub f0: f64,
    pub pitch: f64,
    pub r0: f64,
    pub a: (f64, f64),
    pub span: f64,
    pub tolerances: Option<(f64, f64)>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub suite: Suite,
}

fn usage(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(usage(format!("--{name} must be positive and finite, got {v}")))
            }
        };
        let needs_lambda = !matches!(cli.command, Command::PlanarGrim | Command::Limits | Command::Verify);
        if needs_lambda {
            pos("lambda", cli.lambda)?;
        }
        let default_span = match cli.command {
            Command::Grim => 1e-6,
            Command::Bowl | Command::Catenoid => 200.0,
            Command::Helicoid => 50.0,
            Command::PlanarGrim => 0.01,
            Command::Limits | Command::Verify => 0.0,
        };
        let span = match cli.span {
            Some(s) => pos("span", s)?,
            None => default_span,
        };
        match cli.command {
            Command::Grim if !(cli.c >= 0.0 && cli.c.is_finite()) => {
                return Err(usage(format!("--c must be non-negative, got {}", cli.c)));
            }
            Command::Catenoid => {
                pos("f0", cli.f0)?;
            }
            Command::Helicoid => {
                if !(cli.pitch != 0.0 && cli.pitch.is_finite()) {
                    return Err(usage("--pitch must be non-zero".into()));
                }
                if !(cli.r0 >= 0.0 && cli.r0.is_finite()) {
                    return Err(usage(format!("--r0 must be non-negative, got {}", cli.r0)));
                }
            }
            Command::PlanarGrim => {
                if !(cli.a1.hypot(cli.a2) > 0.0) {
                    return Err(usage("--a1, --a2 must not both vanish".into()));
                }
            }
            _ => {}
        }
        let tolerances = match (cli.rtol, cli.atol) {
            (None, None) => None,
            (r, a) => {
                let r = pos("rtol", r.unwrap_or(1e-10))?;
                let a = pos("atol", a.unwrap_or(1e-12))?;
                Some((r, a))
            }
        };
        if cli.format == Format::Obj && matches!(cli.command, Command::PlanarGrim | Command::Limits | Command::Verify) {
            return Err(usage("OBJ output needs a surface family".into()));
        }
        Ok(RunConfig {
            command: cli.command,
            lambda: cli.lambda,
            c: cli.c,
            f0: cli.f0,
            pitch: cli.pitch,
            r0: cli.r0,
            a: (cli.a1, cli.a2),
            span,
            tolerances,
            format: cli.format,
            out: cli.out,
            suite: cli.suite.into(),
        })
    }

    fn ode(&self, default: OdeOptions) -> OdeOptions {
        match self.tolerances {
            Some((r, a)) => OdeOptions { rtol: r, atol: a, ..default },
            None => default,
        }
    }
}

/// Writes through `--out` or to stdout.
fn emit(cfg: &RunConfig, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            let io = |source| Error::Io { path: path.clone(), source };
            let file = std::fs::File::create(path).map_err(io)?;
            let mut w = std::io::BufWriter::new(file);
            f(&mut w).map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
    }
}

fn family_profile(cfg: &RunConfig) -> Result<ProfileCurve> {
    match cfg.command {
        Command::Grim => {
            let params = GrimReaperParams::new(cfg.lambda, cfg.c)?;
            let mut prof = solve_grim_reaper(&params, &GrimOptions { ode: cfg.ode(GrimOptions::default().ode), ..Default::default() })?;
            let s = slab(cfg.lambda, cfg.c);
            prof.rows.retain(|r| r[0] > s.a + cfg.span && r[0] < s.b - cfg.span);
            Ok(prof)
        }
        Command::Bowl => solve_bowl(cfg.lambda, cfg.span, &BowlOptions { ode: cfg.ode(BowlOptions::default().ode), ..Default::default() }),
        Command::Catenoid => solve_catenoid(
            cfg.lambda,
            cfg.f0,
            &CatenoidOptions { ode: cfg.ode(CatenoidOptions::default().ode), r_max: cfg.span, ..Default::default() },
        ),
        Command::Helicoid => {
            let params = HelicoidParams::new(cfg.lambda, cfg.pitch, cfg.r0)?;
            let defaults = HelicoidOptions::default();
            solve_helicoid(&params, cfg.span, &HelicoidOptions { ode: cfg.ode(defaults.ode.clone()), ..defaults })
        }
        Command::PlanarGrim => planar_grim_reaper(cfg.a.0, cfg.a.1, 2001, cfg.span),
        Command::Limits | Command::Verify => unreachable!("not a family command"),
    }
}

fn summarize(profile: &ProfileCurve) -> String {
    let mut s = format!("{}: {} samples", profile.family.name(), profile.len());
    if let Some(r) = profile.sup_abs("residual") {
        s.push_str(&format!(", sup |residual| = {r:.3e}"));
    }
    if let Ok(fits) = fit_profile_asymptotics(profile) {
        for f in fits {
            s.push_str(&format!(", tail {} = {:.6} (expected {:.6})", f.quantity, f.fitted, f.expected));
        }
    }
    s
}

fn run_family(cfg: &RunConfig) -> Result<()> {
    let profile = family_profile(cfg)?;
    match cfg.format {
        Format::Csv => emit(cfg, |w| write_csv(&profile, w))?,
        Format::Json => emit(cfg, |w| write_profile_json(&profile, w))?,
        Format::Obj => {
            let group = Group::for_family(&profile.family)
                .ok_or_else(|| Error::FamilyMismatch { found: profile.family.name().into(), group: "any".into() })?;
            let mesh = sweep_surface(&profile, group, &SweepSpec::default_for(&group))?;
            emit(cfg, |w| write_obj(&mesh, w))?;
        }
    }
    eprintln!("{}", summarize(&profile));
    Ok(())
}

#[derive(Serialize)]
struct LimitsDoc {
    schema: &'static str,
    reports: Vec<LimitReport>,
}

fn run_limits(cfg: &RunConfig) -> Result<()> {
    let doc = LimitsDoc {
        schema: crate::report::SCHEMA_VERSION,
        reports: vec![
            limit_grim_reaper(cfg.c, &[10.0, 1e2, 1e3, 1e4], (-1.0, 1.0))?,
            limit_catenoid(cfg.f0, &[1e3, 4e3, 1.6e4, 6.4e4], (-2.0, 2.0))?,
            limit_bowl(&[10.0, 1e2, 1e3], 2.0)?,
        ],
    };
    emit(cfg, |w| write_json(&doc, w))?;
    for r in &doc.reports {
        let errs: Vec<String> = r.errors.iter().map(|e| e.map_or("undefined".into(), |v| format!("{v:.3e}"))).collect();
        eprintln!("{:<9} {}", r.family, errs.join(" "));
    }
    Ok(())
}

/// Returns whether every check passed.
fn run_verify(cfg: &RunConfig) -> Result<bool> {
    let report = run_suite(cfg.suite)?;
    emit(cfg, |w| write_json(&report, w))?;
    let table = report.table();
    if cfg.out.is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    Ok(report.passed)
}

/// Runs the command line `argv` (program name first) and returns the exit status:
/// 0 on success, 1 on failed verification or runtime error, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = match cfg.command {
        Command::Limits => run_limits(&cfg).map(|_| true),
        Command::Verify => run_verify(&cfg),
        _ => run_family(&cfg).map(|_| true),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::InvalidParameter(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> Result<RunConfig> {
        let mut argv = vec!["nil3"];
        argv.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(argv).expect("parses"))
    }

    #[test]
    fn defaults_per_family() {
        assert_eq!(cfg(&["bowl"]).unwrap().span, 200.0);
        assert_eq!(cfg(&["helicoid"]).unwrap().span, 50.0);
        assert_eq!(cfg(&["grim"]).unwrap().span, 1e-6);
        assert_eq!(cfg(&["verify", "--suite", "core"]).unwrap().suite, Suite::Core);
    }

    #[test]
    fn invalid_parameters_are_usage_errors() {
        assert!(cfg(&["grim", "--lambda", "0"]).is_err());
        assert!(cfg(&["grim", "--c", "-1"]).is_err());
        assert!(cfg(&["helicoid", "--pitch", "0"]).is_err());
        assert!(cfg(&["catenoid", "--f0", "-2"]).is_err());
        assert!(cfg(&["planar-grim", "--a2", "0"]).is_err());
        assert!(cfg(&["verify", "--format", "obj"]).is_err());
        assert_eq!(run(["nil3", "grim", "--lambda", "-1"]), 2);
        assert_eq!(run(["nil3", "nonsense"]), 2);
        assert_eq!(run(["nil3", "verify", "--suite", "bogus"]), 2);
    }
}
