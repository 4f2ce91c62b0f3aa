//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mutalm_core::factory::{canonicalize, GenerateError, GenerateOptions, MutantSet};
use mutalm_core::interp::DEFAULT_FUEL;
use mutalm_core::kill::{KillError, KillMatrix};
use mutalm_core::lang::{parse, render, validate, SourceUnit};
use mutalm_core::predict::{StubPredictor, DEFAULT_K, DEFAULT_MAX_IN_FLIGHT, DEFAULT_TIMEOUT_MS};
use mutalm_core::sim::{CampaignResult, EffortCap, DEFAULT_REPETITIONS};
use mutalm_core::stats::{detection_overlap, summarize_pair, Overlap, PairedSample, Threshold};
use mutalm_core::targets::DEFAULT_WINDOW;

use crate::formats::{self, ComparisonReport, FormatError, PairReport, RegionReport};
use crate::pipeline;
use crate::remote::{resolve_endpoint, RemotePredictor};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PREDICTOR: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "mutalm", version, about = "Mutation testing for MiniJ with a masked language model")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Seed for mutant ordering and simulated sessions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate mutants of a MiniJ program.
    Mutate(MutateArgs),
    /// Run a test suite against a mutant set and write the kill matrix.
    Execute(ExecuteArgs),
    /// Simulate developer sessions over one kill matrix.
    Simulate(SimulateArgs),
    /// Compare approaches over several bugs.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Stub,
    Remote,
}

#[derive(Debug, Args)]
struct MutateArgs {
    /// MiniJ source file.
    input: PathBuf,
    /// Keep at most this many mutants.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    quota: Option<u64>,
    /// Predictions requested per mask.
    #[arg(long, default_value_t = DEFAULT_K as u64, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, value_enum, default_value_t = Mode::Stub)]
    predictor_mode: Mode,
    /// Fill-mask service base URL (overridden by MUTALM_PREDICTOR_URL).
    #[arg(long)]
    predictor_url: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_MS)]
    timeout_ms: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_IN_FLIGHT as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_in_flight: u64,
    /// Context window in tokens.
    #[arg(long, default_value_t = DEFAULT_WINDOW as u64, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    /// Only first-order mutants.
    #[arg(long)]
    no_seeding: bool,
}

#[derive(Debug, Args)]
struct ExecuteArgs {
    #[arg(long)]
    mutants: PathBuf,
    #[arg(long)]
    suite: PathBuf,
    /// Buggy version used to find the bug-revealing tests.
    #[arg(long)]
    buggy: Option<PathBuf>,
    /// Original program; defaults to the path recorded in the mutant set.
    #[arg(long)]
    program: Option<PathBuf>,
    #[arg(long, default_value = "mutalm")]
    approach: String,
    #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Bug id; defaults to the matrix file stem.
    #[arg(long)]
    bug: Option<String>,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    repetitions: u64,
    /// `auto`, `all` or a positive number of analysed mutants.
    #[arg(long, default_value = "all", value_parser = parse_cap)]
    effort_cap: EffortCap,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// `BUG=PATH` or `BUG:LABEL=PATH`; repeat for every bug and approach.
    /// The label defaults to the matrix's approach name.
    #[arg(long = "matrix", required = true, value_parser = parse_bug_matrix)]
    matrices: Vec<MatrixArg>,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    repetitions: u64,
    #[arg(long, default_value = "auto", value_parser = parse_cap)]
    effort_cap: EffortCap,
}

fn parse_cap(s: &str) -> Result<EffortCap, String> {
    match s {
        "auto" => Ok(EffortCap::Auto),
        "all" => Ok(EffortCap::All),
        n => match n.parse::<usize>() {
            Ok(v) if v > 0 => Ok(EffortCap::Fixed(v)),
            _ => Err(format!("expected auto, all or a positive integer, got {n:?}")),
        },
    }
}

#[derive(Debug, Clone)]
struct MatrixArg {
    bug: String,
    label: Option<String>,
    path: PathBuf,
}

fn parse_bug_matrix(s: &str) -> Result<MatrixArg, String> {
    let bad = || format!("expected BUG=PATH or BUG:LABEL=PATH, got {s:?}");
    let (key, path) = s.split_once('=').ok_or_else(bad)?;
    let (bug, label) = match key.split_once(':') {
        Some((b, l)) => (b, Some(l)),
        None => (key, None),
    };
    if bug.is_empty() || path.is_empty() || label.is_some_and(str::is_empty) {
        return Err(bad());
    }
    Ok(MatrixArg {
        bug: bug.to_string(),
        label: label.map(str::to_string),
        path: PathBuf::from(path),
    })
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        fail(EXIT_INPUT, e.to_string())
    }
}

/// Parse arguments, run the subcommand and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let jobs = cli.jobs.map(|j| j as usize);
    let result = pipeline::with_jobs(jobs, || {
        let mut buf = Vec::new();
        let r = match &cli.cmd {
            Command::Mutate(a) => mutate(&cli, a, &mut buf),
            Command::Execute(a) => execute(&cli, a, &mut buf),
            Command::Simulate(a) => simulate(&cli, a, &mut buf),
            Command::Compare(a) => compare(&cli, a, &mut buf),
        };
        (r, buf)
    });
    let _ = out.write_all(&result.1);
    match result.0 {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_program(path: &Path) -> Result<SourceUnit, Failure> {
    let text = formats::read_text(path)?;
    let unit = parse(&text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let report = validate(&unit);
    if !report.ok {
        let first = report
            .diagnostics
            .first()
            .map(|d| format!("{d:?}"))
            .unwrap_or_default();
        return Err(fail(EXIT_INPUT, format!("{}: invalid program: {first}", path.display())));
    }
    Ok(unit)
}

/// Text every stored mutant diff is relative to.
pub fn canonical_text(unit: &SourceUnit) -> String {
    render(&canonicalize(unit))
}

fn mutate(cli: &Cli, a: &MutateArgs, out: &mut Vec<u8>) -> Result<(), Failure> {
    let unit = load_program(&a.input)?;
    let program = a.input.display().to_string();
    let opts = GenerateOptions {
        k: a.k as usize,
        window: a.window as usize,
        quota: a.quota.map(|q| q as usize),
        seed: cli.seed,
        seeding: !a.no_seeding,
    };
    let set = match a.predictor_mode {
        Mode::Stub => pipeline::generate(&unit, &program, &StubPredictor, &opts),
        Mode::Remote => {
            let endpoint = resolve_endpoint(a.predictor_url.as_deref()).ok_or_else(|| {
                fail(EXIT_USAGE, "remote mode needs --predictor-url or MUTALM_PREDICTOR_URL")
            })?;
            let p = RemotePredictor::new(&endpoint, a.timeout_ms, a.max_in_flight as usize);
            pipeline::generate(&unit, &program, &p, &opts)
        }
    }
    .map_err(|e| match e {
        GenerateError::Predictor(_) | GenerateError::AllPredictionsFailed => {
            fail(EXIT_PREDICTOR, e.to_string())
        }
        other => fail(EXIT_INPUT, other.to_string()),
    })?;
    let canonical = canonical_text(&unit);
    formats::write_text(
        &cli.out.join("mutants.json"),
        &formats::mutant_set_to_json(&set, &program, &canonical),
    )?;
    formats::write_text(&cli.out.join("mutants.diff"), &formats::diff_listing(&set, &canonical))?;
    write_mutate_summary(&set, out);
    Ok(())
}

fn write_mutate_summary(set: &MutantSet, out: &mut Vec<u8>) {
    let _ = writeln!(out, "mutants: {}", set.mutants.len());
    for (name, s) in [("first", &set.stats.first), ("second", &set.stats.second)] {
        let _ = writeln!(
            out,
            "{name}-order: predicted {} exact {} duplicate {} non-compilable {} emitted {} beyond-quota {} failed {}",
            s.predicted, s.exact, s.duplicate, s.non_compilable, s.emitted, s.beyond_quota, s.prediction_failed
        );
    }
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    for m in &set.mutants {
        *kinds.entry(m.kind.as_str().to_string()).or_insert(0) += 1;
    }
    for (k, n) in kinds {
        let _ = writeln!(out, "  {k}: {n}");
    }
}

fn execute(cli: &Cli, a: &ExecuteArgs, out: &mut Vec<u8>) -> Result<(), Failure> {
    let text = formats::read_text(&a.mutants)?;
    let header = formats::parse_mutant_set(&text, &a.mutants.display().to_string(), None)?;
    let program_path = a.program.clone().unwrap_or_else(|| PathBuf::from(&header.program));
    let unit = load_program(&program_path)?;
    let canonical = canonical_text(&unit);
    let loaded =
        formats::parse_mutant_set(&text, &a.mutants.display().to_string(), Some(&canonical))?;
    let suite = formats::load_suite(&a.suite)?;
    let buggy = a.buggy.as_deref().map(load_program).transpose()?;
    let matrix = pipeline::build_kill_matrix(
        &canonicalize(&unit),
        &loaded.set,
        &suite,
        buggy.as_ref(),
        a.fuel,
        &a.approach,
    )
    .map_err(|e| match e {
        KillError::SuiteInvalid { .. } | KillError::MutantInvalid(_) | KillError::BuggyInvalid => {
            fail(EXIT_INPUT, e.to_string())
        }
        KillError::Malformed(_) => fail(EXIT_INPUT, e.to_string()),
    })?;
    formats::save_kill_matrix(&matrix, &cli.out.join("kill_matrix.json"))?;
    match matrix.mutation_score() {
        Some(s) => {
            let _ = writeln!(out, "mutation score: {s:.6}");
        }
        None => {
            let _ = writeln!(out, "mutation score: n/a");
        }
    }
    let _ = writeln!(
        out,
        "mutants: {} tests: {} revealing: {}",
        matrix.mutant_ids.len(),
        matrix.test_names.len(),
        matrix.revealing_tests.join(",")
    );
    Ok(())
}

fn simulate(cli: &Cli, a: &SimulateArgs, out: &mut Vec<u8>) -> Result<(), Failure> {
    if a.effort_cap == EffortCap::Auto {
        return Err(fail(
            EXIT_USAGE,
            "--effort-cap auto needs several approaches; use compare or give a number",
        ));
    }
    let matrix = formats::load_kill_matrix(&a.matrix)?;
    let bug = a.bug.clone().unwrap_or_else(|| {
        a.matrix
            .file_stem()
            .map_or_else(|| "bug".into(), |s| s.to_string_lossy().into_owned())
    });
    let cap = a.effort_cap.resolve(&matrix, None);
    let result = pipeline::run_campaign(&bug, &matrix, a.repetitions as usize, cap, cli.seed);
    formats::write_text(&cli.out.join("campaign.json"), &formats::campaign_to_json(&result))?;
    formats::write_text(
        &cli.out.join("curve.csv"),
        &formats::curves_csv(std::slice::from_ref(&result)),
    )?;
    let _ = writeln!(
        out,
        "bug {} approach {}: detection ratio {:.4} over {} sessions, effort cap {}",
        result.bug_id, result.approach, result.detection_ratio, result.repetitions, result.effort_cap
    );
    Ok(())
}

fn compare(cli: &Cli, a: &CompareArgs, out: &mut Vec<u8>) -> Result<(), Failure> {
    let mut by_bug: BTreeMap<String, BTreeMap<String, KillMatrix>> = BTreeMap::new();
    for arg in &a.matrices {
        let mut m = formats::load_kill_matrix(&arg.path)?;
        if let Some(l) = &arg.label {
            m.approach = l.clone();
        }
        let (bug, approach) = (&arg.bug, m.approach.clone());
        if by_bug.entry(bug.clone()).or_default().insert(approach.clone(), m).is_some() {
            return Err(fail(
                EXIT_INPUT,
                format!("bug {bug} has two matrices for approach {approach:?}"),
            ));
        }
    }
    if let Some((bug, _)) = by_bug.iter().find(|(_, ms)| ms.len() < 2) {
        return Err(fail(
            EXIT_USAGE,
            format!("bug {bug} needs at least two approaches to compare"),
        ));
    }
    let reps = a.repetitions as usize;
    let report = compare_matrices(&by_bug, reps, a.effort_cap, cli.seed)?;
    formats::write_text(&cli.out.join("report.json"), &formats::to_json(&report.0))?;
    let table = formats::comparison_table(&report.0);
    formats::write_text(&cli.out.join("report.txt"), &table)?;
    formats::write_text(&cli.out.join("curves.csv"), &formats::curves_csv(&report.1))?;
    let _ = out.write_all(table.as_bytes());
    Ok(())
}

fn compare_matrices(
    by_bug: &BTreeMap<String, BTreeMap<String, KillMatrix>>,
    reps: usize,
    cap: EffortCap,
    seed: u64,
) -> Result<(ComparisonReport, Vec<CampaignResult>), Failure> {
    let approaches: Vec<String> = by_bug
        .values()
        .next()
        .map(|m| m.keys().cloned().collect())
        .unwrap_or_default();
    for (bug, ms) in by_bug {
        if !ms.keys().eq(approaches.iter()) {
            return Err(fail(
                EXIT_INPUT,
                format!("bug {bug} is not covered by the same approaches as the others"),
            ));
        }
    }
    let mut campaigns = Vec::new();
    let mut caps = BTreeMap::new();
    let mut ratios: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for (bug, ms) in by_bug {
        let all: Vec<&KillMatrix> = ms.values().collect();
        let common = (cap == EffortCap::Auto).then(|| pipeline::common_effort_cap(&all, reps, seed));
        let bug_cap = match cap {
            EffortCap::All => all.iter().map(|m| cap.resolve(m, None)).max().unwrap_or(1),
            _ => cap.resolve(all[0], common),
        };
        caps.insert(bug.clone(), bug_cap);
        for (approach, m) in ms {
            let c = pipeline::run_campaign(bug, m, reps, bug_cap, seed);
            ratios
                .entry(approach.clone())
                .or_default()
                .insert(bug.clone(), c.detection_ratio);
            campaigns.push(c);
        }
    }
    let bugs: Vec<String> = by_bug.keys().cloned().collect();
    let mut pairs = Vec::new();
    for a in &approaches {
        for b in &approaches {
            if a == b {
                continue;
            }
            let sample = PairedSample {
                labels: bugs.clone(),
                x: bugs.iter().map(|g| ratios[a][g]).collect(),
                y: bugs.iter().map(|g| ratios[b][g]).collect(),
            };
            let s = summarize_pair(&sample).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            pairs.push(PairReport {
                a: a.clone(),
                b: b.clone(),
                mean_a: mean(&sample.x),
                mean_b: mean(&sample.y),
                p_value: s.p_value,
                a12: s.a12,
                n_effective: s.n_effective,
            });
        }
    }
    let regions = |t: Threshold| -> Result<Vec<RegionReport>, Failure> {
        let o: Overlap = detection_overlap(&ratios, t).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
        Ok(o.regions
            .into_iter()
            .map(|(set, bugs)| RegionReport {
                approaches: set.into_iter().collect(),
                bugs,
            })
            .collect())
    };
    let report = ComparisonReport {
        approaches,
        bugs,
        effort_caps: caps,
        campaigns: campaigns.iter().map(formats::CampaignFile::from).collect(),
        pairs,
        overlap_detected: regions(Threshold::Positive)?,
        overlap_detected_90: regions(Threshold::AtLeast(0.9))?,
    };
    Ok((report, campaigns))
}
