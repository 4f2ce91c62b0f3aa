//! Parallel versions of the core stages. Work is split with rayon and
//! merged in input order, so results do not depend on the thread count.

use mutalm_core::factory::{
    assemble, plan, produce_candidates, GenerateError, GenerateOptions, MutantSet,
};
use mutalm_core::interp::TestCase;
use mutalm_core::kill::{
    check_suite, kill_row, parse_valid, revealing_tests, run_suite, KillError, KillMatrix,
};
use mutalm_core::lang::{validate, SourceUnit};
use mutalm_core::predict::{predict_with_retry, Predictor};
use mutalm_core::sim::{session_seed, simulate_session, summarize, CampaignResult, SessionTrace};
use rayon::prelude::*;

/// Run `f` on a pool of `jobs` threads (all cores when `None`).
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n.max(1));
    }
    b.build().expect("thread pool").install(f)
}

pub fn generate(
    unit: &SourceUnit,
    program_id: &str,
    predictor: &dyn Predictor,
    opts: &GenerateOptions,
) -> Result<MutantSet, GenerateError> {
    let plan = plan(unit, opts.window, opts.seeding)?;
    let all = plan
        .sequences
        .par_iter()
        .map(|seq| {
            predict_with_retry(predictor, seq, opts.k)
                .map(|p| p.map(|p| produce_candidates(&plan, seq, &p)))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(GenerateError::Predictor)?;
    assemble(&plan, program_id, all, opts.quota, opts.seed)
}

pub fn build_kill_matrix(
    original: &SourceUnit,
    mutants: &MutantSet,
    suite: &[TestCase],
    buggy: Option<&SourceUnit>,
    fuel: u64,
    approach: &str,
) -> Result<KillMatrix, KillError> {
    check_suite(original, suite)?;
    let base = run_suite(original, suite, fuel);
    let kills = mutants
        .mutants
        .par_iter()
        .map(|m| {
            parse_valid(&m.rendered_source)
                .map(|u| kill_row(&u, suite, &base, fuel))
                .ok_or_else(|| KillError::MutantInvalid(m.id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let revealing = match buggy {
        Some(b) => {
            if !validate(b).ok {
                return Err(KillError::BuggyInvalid);
            }
            check_suite(b, suite)?;
            revealing_tests(b, suite, fuel)
        }
        None => Vec::new(),
    };
    Ok(KillMatrix {
        approach: approach.into(),
        mutant_ids: mutants.mutants.iter().map(|m| m.id.clone()).collect(),
        test_names: suite.iter().map(|t| t.name.clone()).collect(),
        kills,
        revealing_tests: revealing,
    })
}

fn sessions(matrix: &KillMatrix, repetitions: usize, cap: usize, base_seed: u64) -> Vec<SessionTrace> {
    (0..repetitions)
        .into_par_iter()
        .map(|i| simulate_session(matrix, session_seed(base_seed, i), cap))
        .collect()
}

pub fn run_campaign(
    bug_id: &str,
    matrix: &KillMatrix,
    repetitions: usize,
    effort_cap: usize,
    base_seed: u64,
) -> CampaignResult {
    let traces = sessions(matrix, repetitions, effort_cap, base_seed);
    summarize(bug_id, &matrix.approach, &traces, effort_cap)
}

pub fn mean_total_effort(matrix: &KillMatrix, repetitions: usize, base_seed: u64) -> f64 {
    let traces = sessions(matrix, repetitions.max(1), usize::MAX, base_seed);
    traces.iter().map(|t| t.total_effort as f64).sum::<f64>() / traces.len() as f64
}

/// Smallest rounded mean full-analysis effort over `matrices`, at least 1.
pub fn common_effort_cap(matrices: &[&KillMatrix], repetitions: usize, base_seed: u64) -> usize {
    let min = matrices
        .iter()
        .map(|m| mean_total_effort(m, repetitions, base_seed))
        .fold(f64::INFINITY, f64::min);
    if min.is_finite() {
        (min.round() as usize).max(1)
    } else {
        1
    }
}
