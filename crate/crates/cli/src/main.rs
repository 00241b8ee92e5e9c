use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dpc_core::census::{
    run_census, two_phase_census, CensusOptions, CensusReport, Executor, LocusFilter, SearchSpace,
    DEFAULT_EXTREMAL_CAP,
};
use dpc_core::claims::{registry, verify_claim, ClaimOutcome, RuntimeClass, VerifyOptions};
use dpc_core::families::{reduced_family, CountMode};
use dpc_core::gf::Field;
use dpc_core::io::{family_by_id, load_surface, save_report, ReportFile, Timestamps};
use dpc_core::picard::{
    candidate_fields, exceptional_classes, fibers, filter_rows, parse_table, urabe_f, PicClass,
};
use dpc_core::smooth::{is_smooth_up_to, DEFAULT_BOUND};

/// Point-count censuses of del Pezzo surfaces over small finite fields.
#[derive(Parser)]
#[command(name = "dpc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Histogram of point counts over a coefficient space.
    Census(CensusArgs),
    /// Check registered claims.
    Verify(VerifyArgs),
    /// Jacobian-criterion smoothness over extensions of the base field.
    Smooth(SmoothArgs),
    /// Point counts of the fibres of the anticanonical pencil.
    Fibers(SurfaceArgs),
    /// Exceptional classes of the plane blown up in r points.
    ExcCurves {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fields admitting a degree-d surface with the given point count.
    Weil {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        target_points: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rows of a conjugacy-class table compatible with a point count.
    Urabe {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        q: i64,
        #[arg(long, default_value_t = 1)]
        target: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Image of an E_7 row in the E_8 table.
    UrabeF {
        #[arg(long)]
        i: u32,
    },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    family: String,
    /// Field literal such as 2, 4 or 3^2.
    #[arg(long)]
    field: String,
    /// Census the exponent-reduced family.
    #[arg(long)]
    reduced: bool,
    /// Pin a slot (key like 0.6.0.0, or index) to an element literal.
    #[arg(long = "pin", value_name = "SLOT=VALUE")]
    pins: Vec<String>,
    #[arg(long, default_value = "projective")]
    mode: CountMode,
    #[arg(long)]
    early_exit: Option<u64>,
    /// Run a phase-1 filter on this locus first, e.g. "x=0,y!=0".
    #[arg(long)]
    locus: Option<String>,
    #[arg(long, default_value_t = DEFAULT_EXTREMAL_CAP)]
    extremal_cap: usize,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "all", required_unless_present_any = ["all", "list"])]
    claim: Option<String>,
    #[arg(long)]
    all: bool,
    /// Also run claims whose runtime class is "hours".
    #[arg(long)]
    include_slow: bool,
    /// Print the registry and exit.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    checkpoint_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SmoothArgs {
    #[arg(long)]
    surface: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    max_ext: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long)]
    surface: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CensusPayload {
    report: CensusReport,
    /// Phase-1 survivors as slot → element maps.
    #[serde(skip_serializing_if = "Option::is_none")]
    survivors: Option<Vec<BTreeMap<String, String>>>,
}

fn executor(workers: Option<usize>) -> Executor {
    workers.map_or_else(Executor::default, Executor::with_workers)
}

/// Writes the envelope to `out` if given, otherwise the payload to stdout.
fn emit<T: Serialize>(payload: T, inputs: &[&Path], out: Option<&Path>, started: u128) -> Result<()> {
    let Some(out) = out else {
        println!("{}", serde_json::to_string_pretty(&payload)?);
        return Ok(());
    };
    let mut rep = ReportFile::new(std::env::args().collect(), payload, started);
    for p in inputs {
        rep = rep.with_input(p)?;
    }
    save_report(&rep, out).with_context(|| format!("writing {}", out.display()))
}

fn census(a: CensusArgs, started: u128) -> Result<ExitCode> {
    let field = Field::parse(&a.field)?;
    let mut family = family_by_id(&a.family, &field)?;
    if a.reduced {
        family = reduced_family(&family, &field);
    }
    let mut space = SearchSpace::new(family.clone(), field.clone());
    for pin in &a.pins {
        let (slot, value) = pin.split_once('=').with_context(|| format!("pin {pin:?} is not SLOT=VALUE"))?;
        let slot = family.parse_slot(slot.trim())?;
        space = space.pin(slot, field.parse_element(value.trim())?)?;
    }
    let opts = CensusOptions {
        mode: a.mode,
        early_exit: a.early_exit,
        executor: executor(a.workers),
        checkpoint: a.checkpoint.clone(),
        extremal_cap: Some(a.extremal_cap),
        ..Default::default()
    };
    let (report, survivors) = match &a.locus {
        None => (run_census(&space, &opts)?, None),
        Some(locus) => {
            let filter = LocusFilter::parse(&family, &field, locus)?;
            let (p1, report) = two_phase_census(&space, &filter, &opts)?;
            let maps = p1
                .survivors
                .iter()
                .map(|s| p1.filter_keys.iter().cloned().zip(s.iter().map(|&e| field.format(e))).collect())
                .collect();
            (report, Some(maps))
        }
    };
    println!(
        "{} surfaces, min count {:?}, histogram {:?}",
        report.scanned, report.min_count, report.histogram
    );
    emit(CensusPayload { report, survivors }, &[], Some(&a.out), started)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs, started: u128) -> Result<ExitCode> {
    if a.list {
        for c in registry() {
            println!("{:<24} {:<8} {}", c.id, format!("{:?}", c.runtime).to_lowercase(), c.description);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let ids: Vec<&str> = match &a.claim {
        Some(id) => vec![dpc_core::claims::find_claim(id)?.id],
        None => registry()
            .iter()
            .filter(|c| a.include_slow || c.runtime != RuntimeClass::Hours)
            .map(|c| c.id)
            .collect(),
    };
    let opts = VerifyOptions { executor: executor(a.workers), checkpoint_dir: a.checkpoint_dir.clone() };
    let mut outcomes: Vec<ClaimOutcome> = Vec::new();
    for id in ids {
        let out = verify_claim(id, &opts)?;
        println!("{} {:<24} {}", if out.pass { "PASS" } else { "FAIL" }, out.id, out.observed);
        outcomes.push(out);
    }
    let all_pass = outcomes.iter().all(|o| o.pass);
    if let Some(out) = &a.out {
        emit(&outcomes, &[], Some(out), started)?;
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let started = Timestamps::now();
    match cli.command {
        Command::Census(a) => return census(a, started),
        Command::Verify(a) => return verify(a, started),
        Command::Smooth(a) => {
            let s = load_surface(&a.surface)?;
            let verdict = is_smooth_up_to(&s, a.max_ext)?;
            emit(&verdict, &[&a.surface], a.out.as_deref(), started)?;
        }
        Command::Fibers(a) => {
            let s = load_surface(&a.surface)?;
            emit(fibers(&s)?, &[&a.surface], a.out.as_deref(), started)?;
        }
        Command::ExcCurves { r, out } => {
            let classes: Vec<PicClass> = exceptional_classes(r)?;
            println!("{} exceptional classes", classes.len());
            emit(&classes, &[], out.as_deref(), started)?;
        }
        Command::Weil { degree, target_points, out } => {
            emit(candidate_fields(degree, target_points)?, &[], out.as_deref(), started)?;
        }
        Command::Urabe { table, q, target, out } => {
            let rows = parse_table(&table)?;
            emit(filter_rows(&rows, q, target), &[&table], out.as_deref(), started)?;
        }
        Command::UrabeF { i } => println!("{}", urabe_f(i)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
