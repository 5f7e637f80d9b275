//! The `g2` command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::figures::Figure;
use crate::g2::g2_from_overlaps;
use crate::output::{format_number, replay, write_datasets, Dataset};
use crate::overlap::{compute_overlap_set, Method};
use crate::spectral::Model;
use crate::sweep::{analyze_extrema, detect_bunching, Axis, SweepGrid, SweepRecord};
use crate::validate::{run_validation, ValidationOptions};

#[derive(Debug, Parser)]
#[command(name = "g2", version, about = "Second-order coherence of two-photon states under spectral mismatch")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate g² and the six overlaps for one scenario.
    Eval(CommonArgs),
    /// Regenerate the datasets of one reference figure.
    Figure(FigureArgs),
    /// Sweep one parameter and write a CSV dataset.
    Sweep(SweepArgs),
    /// Cross-check closed forms, quadrature and the Fock oracle.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat JSON object with run settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Photon center frequency, s⁻¹.
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    /// Photon bandwidth, s⁻¹.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Photon separation, s.
    #[arg(long, allow_hyphen_values = true)]
    pub taup: Option<f64>,
    /// Detector center frequency, s⁻¹.
    #[arg(long, allow_hyphen_values = true)]
    pub omegad: Option<f64>,
    /// Detector bandwidth, s⁻¹.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Detection delay, s.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// gaussian or lorentzian.
    #[arg(long)]
    pub model: Option<Model>,
    /// closed_form or quadrature.
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long = "relative_tolerance", alias = "relative-tolerance")]
    pub relative_tolerance: Option<f64>,
    #[arg(long = "initial_half_width_multiplier", alias = "initial-half-width-multiplier")]
    pub initial_half_width_multiplier: Option<f64>,
    #[arg(long = "max_domain_doublings", alias = "max-domain-doublings")]
    pub max_domain_doublings: Option<u32>,
    /// Worker threads; 0 uses the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let overrides = Overrides {
            omega0: self.omega0,
            delta: self.delta,
            omegad: self.omegad,
            gamma: self.gamma,
            taup: self.taup,
            tau: self.tau,
            model: self.model,
            method: self.method,
            relative_tolerance: self.relative_tolerance,
            initial_half_width_multiplier: self.initial_half_width_multiplier,
            max_domain_doublings: self.max_domain_doublings,
            workers: self.workers,
            out: self.out.clone(),
        };
        RunConfig::resolve(self.config.as_deref(), &overrides)
    }
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// 1a, 1b, 2, 3, 4, 5, 6 or 7.
    pub which: Figure,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// tau, gamma, taup or omegad.
    #[arg(long, required_unless_present = "replay")]
    pub axis: Option<Axis>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "replay")]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "replay")]
    pub stop: Option<f64>,
    #[arg(long, required_unless_present = "replay")]
    pub points: Option<usize>,
    /// Regenerate the datasets described by a metadata sidecar.
    #[arg(long, conflicts_with_all = ["axis", "start", "stop", "points"])]
    pub replay: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Modes of the Fock-oracle grid.
    #[arg(long = "n", alias = "modes", default_value_t = 512)]
    pub modes: usize,
    /// Random scenarios per model on top of the fixed corpus.
    #[arg(long, default_value_t = 10)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, hide = true)]
    pub corrupt_closed_form: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command_line = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match dispatch(cli.command, &command_line) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, command_line: &str) -> Result<i32> {
    let mut stdout = std::io::stdout().lock();
    match command {
        Command::Eval(common) => cmd_eval(&common.resolve()?, &mut stdout),
        Command::Figure(args) => cmd_figure(args.which, &args.common.resolve()?, command_line, &mut stdout),
        Command::Sweep(args) => cmd_sweep(&args, command_line, &mut stdout),
        Command::Validate(args) => cmd_validate(&args, &mut stdout),
    }
}

pub fn cmd_eval(config: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let s = config.scenario();
    let overlaps = compute_overlap_set(&s, config.method, &config.quadrature())?;
    let r = g2_from_overlaps(&overlaps)?;
    writeln!(out, "model = {}", s.photon_model)?;
    writeln!(out, "g2 = {}", format_number(r.value))?;
    writeln!(out, "numerator = {}", format_number(r.numerator))?;
    writeln!(out, "denominator = {}", format_number(r.denominator))?;
    for (k, m) in overlaps.magnitudes().iter().enumerate() {
        writeln!(out, "absJ{} = {}", k + 1, format_number(*m))?;
    }
    let flags = r.flags.label();
    writeln!(out, "flags = {}", if flags.is_empty() { "none" } else { &flags })?;
    Ok(0)
}

fn summarize(out: &mut impl Write, datasets: &[Dataset], records: &[Vec<SweepRecord>]) -> Result<()> {
    for (d, recs) in datasets.iter().zip(records) {
        let flagged = recs.iter().filter(|r| r.is_flagged()).count();
        let (bunching, max_g2, _) = detect_bunching(recs);
        let oscillations = analyze_extrema(recs)
            .map(|r| r.oscillation_count.to_string())
            .unwrap_or_else(|_| "-".into());
        writeln!(
            out,
            "{}: {} points, {} flagged, max g2 {}, bunching {}, maxima {}",
            d.file,
            recs.len(),
            flagged,
            format_number(max_g2),
            bunching,
            oscillations
        )?;
    }
    Ok(())
}

pub fn cmd_figure(which: Figure, config: &RunConfig, command_line: &str, out: &mut impl Write) -> Result<i32> {
    let datasets = which.datasets(config);
    let records = write_datasets(
        &config.out,
        &which.sidecar(),
        command_line,
        config,
        which.notes(config),
        which.display_offsets(),
        datasets.clone(),
    )?;
    summarize(out, &datasets, &records)?;
    writeln!(out, "wrote {}", config.out.join(which.sidecar()).display())?;
    Ok(0)
}

fn cmd_sweep(args: &SweepArgs, command_line: &str, out: &mut impl Write) -> Result<i32> {
    let config = args.common.resolve()?;
    if let Some(sidecar) = &args.replay {
        let meta = crate::output::Metadata::load(sidecar)?;
        let records = replay(sidecar, &config.out)?;
        summarize(out, &meta.datasets, &records)?;
        return Ok(0);
    }
    let (Some(axis), Some(start), Some(stop), Some(points)) = (args.axis, args.start, args.stop, args.points) else {
        return Err(Error::Config("sweep needs --axis, --start, --stop and --points".into()));
    };
    let mut grid = SweepGrid::new(config.scenario(), axis, start, stop, points);
    grid.method = config.method;
    grid.quadrature = config.quadrature();
    grid.validate().map_err(|e| match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    })?;
    let datasets = vec![Dataset {
        file: format!("sweep_{}.csv", axis.name()),
        grid,
    }];
    let records = write_datasets(
        &config.out,
        &format!("sweep_{}.meta.json", axis.name()),
        command_line,
        &config,
        vec![format!("photon bandwidth delta = {} s^-1", config.delta)],
        Vec::new(),
        datasets.clone(),
    )?;
    summarize(out, &datasets, &records)?;
    Ok(0)
}

fn cmd_validate(args: &ValidateArgs, out: &mut impl Write) -> Result<i32> {
    let config = args.common.resolve()?;
    let report = run_validation(&ValidationOptions {
        modes: args.modes,
        draws: args.draws,
        seed: args.seed,
        quadrature: config.quadrature(),
        corrupt_closed_form: args.corrupt_closed_form,
    })?;
    writeln!(out, "{report}")?;
    if let Some(check) = report.worst_failure() {
        eprintln!("offending scenario ({}):", check.name);
        if let Some(s) = &check.worst {
            eprintln!("{}", serde_json::to_string_pretty(s)?);
        }
        return Ok(Error::Validation(String::new()).exit_code());
    }
    Ok(0)
}
