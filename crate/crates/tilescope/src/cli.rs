use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::commands::{self, *};
use crate::report::ReportDocument;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Fusion tiling toolkit: builds supertiles and checks their combinatorics.
#[derive(Parser, Debug)]
#[command(name = "tilescope", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timing in the report
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Materialize a supertile and count its tiles
    Build(BuildArgs),
    /// Check that children tile their parent exactly at every level
    Validate(ValidateArgs),
    /// Exact supertile dimensions, gcds and residues
    Sizes(SizesArgs),
    /// Substitution matrix, eigenvalues and first cohomology of a 1D substitution
    Cohomology(CohomologyArgs),
    /// Growth of the wide-supertile discrepancy along fault lines
    Discrepancy(DiscrepancyArgs),
    /// Offsets between wide supertiles facing each other across fault lines
    Offsets(OffsetsArgs),
    /// Certify offsets by finding junctions whose windows are all legal
    ShearWitness(ShearWitnessArgs),
    /// Scan the return-vector exponential sums for surviving frequencies
    Spectrum(SpectrumArgs),
    /// Alignment graph connectivity and a path between two supertiles
    Align(AlignArgs),
    /// Render a supertile to SVG
    Render(RenderArgs),
    /// Run every acceptance criterion
    ReportAll(ReportAllArgs),
}

/// Runs one command; `Ok((report, svg))` where `svg` is set for a render
/// without an SVG destination.
pub fn execute(cli: &Cli) -> Result<(ReportDocument, Option<String>)> {
    let start = Instant::now();
    let (mut report, svg) = match &cli.command {
        Command::Build(a) => (commands::build(a)?, None),
        Command::Validate(a) => (validate(a)?, None),
        Command::Sizes(a) => (sizes(a)?, None),
        Command::Cohomology(a) => (cohomology(a)?, None),
        Command::Discrepancy(a) => (discrepancy_cmd(a)?, None),
        Command::Offsets(a) => (offsets_cmd(a)?, None),
        Command::ShearWitness(a) => (shear_witness_cmd(a)?, None),
        Command::Spectrum(a) => (spectrum(a)?, None),
        Command::Align(a) => (align(a)?, None),
        Command::Render(a) => {
            let (svg, report) = render_patch(a)?;
            match &a.svg {
                Some(path) => {
                    std::fs::write(path, &svg).with_context(|| format!("cannot write {}", path.display()))?;
                    (report, None)
                }
                None => (report, Some(svg)),
            }
        }
        Command::ReportAll(a) => (report_all(a, cli.timing)?, None),
    };
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_millis());
    }
    Ok((report, svg))
}

fn emit(cli: &Cli, report: &ReportDocument, svg: Option<String>) -> Result<()> {
    let json = report.to_json();
    let mut stdout = std::io::stdout().lock();
    if let Some(svg) = svg {
        stdout.write_all(svg.as_bytes())?;
        if let Some(path) = &cli.out {
            std::fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?;
        }
        return Ok(());
    }
    match &cli.out {
        Some(path) => std::fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?,
        None => stdout.write_all(json.as_bytes())?,
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let outcome = execute(&cli).and_then(|(report, svg)| {
        emit(&cli, &report, svg)?;
        Ok(report)
    });
    match outcome {
        Ok(report) if report.passed => EXIT_OK,
        Ok(report) => {
            for v in &report.violations {
                eprintln!("violated: {v}");
            }
            EXIT_VERIFICATION
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}
