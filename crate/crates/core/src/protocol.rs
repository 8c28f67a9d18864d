//! The Q-score protocol: β(N), C_max, per-size aggregation and sweeps.
//!
//! For each size `N`, `M` instances of `G(N, 1/2)` are generated from seeds
//! `seed_base + 0 .. seed_base + M - 1` and solved independently. The mean
//! best cut `C(N)` is turned into
//!
//! ```text
//! β(N) = (C(N) - baseline(N)) / (C_max(N) - baseline(N))
//! ```
//!
//! with `baseline(N) = N²/8` by default. An instance that returns no cut
//! contributes exactly `baseline(N)`, i.e. a random-cut score of 0.
//!
//! A sweep evaluates `start, start + step, ...` until β drops to `β*` or
//! below, the mean runtime passes a hard cap, or the size limit is hit.
//! The Q-score is the largest evaluated `N` with `β(N) > β*` whose mean
//! runtime is within the per-instance wall-clock budget.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate_er_graph, EdgeProbability};
use crate::solvers::{solve, RunStatus, Solver, SolverBudget};

pub const DEFAULT_BETA_STAR: f64 = 0.2;
pub const DEFAULT_INSTANCES: usize = 100;
/// Mean runtime above which a sweep stops.
pub const DEFAULT_TIME_CAP_MS: f64 = 100_000.0;
/// Protocol time limit per instance.
pub const PROTOCOL_BUDGET_MS: u64 = 60_000;

/// `N²/8 + 0.178·N^{3/2}`, the fitted estimate of the optimal cut of
/// `G(N, 1/2)`.
pub fn cmax_approx(n: usize) -> f64 {
    let n = n as f64;
    n * n / 8.0 + 0.178 * n.powf(1.5)
}

/// Normalized solution quality: 0 at the baseline, 1 at `cmax`.
pub fn beta(n: usize, mean_cut: f64, cmax: f64, baseline: f64) -> Result<f64> {
    let denominator = cmax - baseline;
    if !(denominator > 0.0) || !denominator.is_finite() {
        return Err(Error::Scoring {
            n,
            message: format!("C_max {cmax} does not exceed the random baseline {baseline}"),
        });
    }
    Ok((mean_cut - baseline) / denominator)
}

/// Expected cost of a random cut.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// `N²/8`, the convention of the β definition.
    #[default]
    QuarterSquare,
    /// `N(N-1)/8`, the exact expectation on `G(N, 1/2)`.
    Exact,
}

impl Baseline {
    pub fn value(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Baseline::QuarterSquare => n * n / 8.0,
            Baseline::Exact => n * (n - 1.0) / 8.0,
        }
    }
}

impl std::str::FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n2/8" | "quarter_square" => Ok(Baseline::QuarterSquare),
            "n(n-1)/8" | "exact" => Ok(Baseline::Exact),
            other => Err(Error::config(format!("unknown baseline {other:?}"))),
        }
    }
}

/// Where `C_max(N)` comes from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmaxMode {
    #[default]
    Approximation,
    Oracle(OracleTable),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub beta_star: f64,
    pub m_instances: usize,
    pub cmax_mode: CmaxMode,
    pub baseline: Baseline,
}

impl Default for BetaParams {
    fn default() -> Self {
        BetaParams {
            beta_star: DEFAULT_BETA_STAR,
            m_instances: DEFAULT_INSTANCES,
            cmax_mode: CmaxMode::Approximation,
            baseline: Baseline::QuarterSquare,
        }
    }
}

impl BetaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_star > 0.0 && self.beta_star < 1.0) {
            return Err(Error::config(format!(
                "beta_star must lie in (0, 1), got {}",
                self.beta_star
            )));
        }
        if self.m_instances == 0 {
            return Err(Error::config("m_instances must be at least 1"));
        }
        Ok(())
    }

    /// `C_max(n)` for the instance set `(seed_base, m_instances)`.
    pub fn cmax(&self, n: usize, seed_base: u64) -> Result<f64> {
        match &self.cmax_mode {
            CmaxMode::Approximation => Ok(cmax_approx(n)),
            CmaxMode::Oracle(table) => table.lookup(n, seed_base, self.m_instances),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleMeta {
    /// Solver fingerprint per size.
    pub solvers: BTreeMap<usize, String>,
    pub seed_base: u64,
    pub m_instances: usize,
    pub budget: Option<SolverBudget>,
}

/// Best-known mean cut per size for one instance set, used as `C_max`.
///
/// JSON form: `{"meta": {...}, "cmax": {"<n>": number}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    pub meta: OracleMeta,
    pub cmax: BTreeMap<usize, f64>,
}

impl OracleTable {
    /// Uses the mean cuts of already evaluated records as the oracle.
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a SizeRecord>,
        seed_base: u64,
        budget: Option<SolverBudget>,
    ) -> Result<Self> {
        let mut solvers = BTreeMap::new();
        let mut cmax = BTreeMap::new();
        let mut m = None;
        for r in records {
            if *m.get_or_insert(r.m) != r.m {
                return Err(Error::Oracle("records use different instance counts".into()));
            }
            solvers.insert(r.n, r.solver_id.clone());
            cmax.insert(r.n, r.mean_cut);
        }
        Ok(OracleTable {
            meta: OracleMeta {
                solvers,
                seed_base,
                m_instances: m.unwrap_or(0),
                budget,
            },
            cmax,
        })
    }

    pub fn lookup(&self, n: usize, seed_base: u64, m_instances: usize) -> Result<f64> {
        if self.meta.seed_base != seed_base || self.meta.m_instances != m_instances {
            return Err(Error::Oracle(format!(
                "table was built for seed_base={} m={}, requested seed_base={seed_base} m={m_instances}",
                self.meta.seed_base, self.meta.m_instances
            )));
        }
        self.cmax
            .get(&n)
            .copied()
            .ok_or_else(|| Error::Oracle(format!("no entry for n={n}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("oracle tables serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One solved instance inside a [`SizeRecord`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub seed: u64,
    pub best_cut: u64,
    pub status: RunStatus,
    /// Wall time; absent under deterministic budgets so that reports are
    /// reproducible byte for byte.
    pub elapsed_ms: Option<f64>,
    pub iterations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Aggregate over the `m` instances of one size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeRecord {
    pub n: usize,
    pub m: usize,
    pub solver_id: String,
    /// `C(N)`, with no-result instances counted at the baseline.
    pub mean_cut: f64,
    /// Sample standard deviation of the per-instance cuts.
    pub std_cut: f64,
    pub baseline: f64,
    /// `C_max` of the selected mode.
    pub cmax: f64,
    pub beta: f64,
    /// `std_cut / sqrt(m)` scaled by the β denominator.
    pub beta_stderr: f64,
    /// β under the `N²/8 + 0.178·N^{3/2}` approximation, whatever the mode.
    pub beta_approx: f64,
    pub mean_time_ms: Option<f64>,
    pub min_time_ms: Option<f64>,
    pub max_time_ms: Option<f64>,
    pub mean_iterations: f64,
    pub no_result_count: usize,
    pub instances: Vec<InstanceResult>,
}

impl SizeRecord {
    fn aggregate(
        n: usize,
        solver_id: String,
        instances: Vec<InstanceResult>,
        params: &BetaParams,
        seed_base: u64,
    ) -> Result<Self> {
        let m = instances.len();
        let baseline = params.baseline.value(n);
        let cuts: Vec<f64> = instances
            .iter()
            .map(|r| {
                if r.status == RunStatus::NoResult {
                    baseline
                } else {
                    r.best_cut as f64
                }
            })
            .collect();
        let mean_cut = cuts.iter().sum::<f64>() / m as f64;
        let std_cut = if m > 1 {
            (cuts.iter().map(|c| (c - mean_cut).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
        } else {
            0.0
        };
        let times: Option<Vec<f64>> = instances.iter().map(|r| r.elapsed_ms).collect();
        let (mean_time_ms, min_time_ms, max_time_ms) = match &times {
            Some(t) if !t.is_empty() => (
                Some(t.iter().sum::<f64>() / t.len() as f64),
                t.iter().copied().reduce(f64::min),
                t.iter().copied().reduce(f64::max),
            ),
            _ => (None, None, None),
        };
        let mut record = SizeRecord {
            n,
            m,
            solver_id,
            mean_cut,
            std_cut,
            baseline,
            cmax: 0.0,
            beta: 0.0,
            beta_stderr: 0.0,
            beta_approx: 0.0,
            mean_time_ms,
            min_time_ms,
            max_time_ms,
            mean_iterations: instances.iter().map(|r| r.iterations as f64).sum::<f64>() / m as f64,
            no_result_count: instances
                .iter()
                .filter(|r| r.status == RunStatus::NoResult)
                .count(),
            instances,
        };
        record.score(params, seed_base)?;
        Ok(record)
    }

    fn score(&mut self, params: &BetaParams, seed_base: u64) -> Result<()> {
        let n = self.n;
        self.baseline = params.baseline.value(n);
        self.cmax = params.cmax(n, seed_base)?;
        self.beta = beta(n, self.mean_cut, self.cmax, self.baseline)?;
        self.beta_stderr = self.std_cut / (self.m as f64).sqrt() / (self.cmax - self.baseline);
        self.beta_approx = beta(n, self.mean_cut, cmax_approx(n), self.baseline)?;
        Ok(())
    }

    /// The same measurements scored under different parameters.
    pub fn rescored(&self, params: &BetaParams, seed_base: u64) -> Result<SizeRecord> {
        let mut r = self.clone();
        r.score(params, seed_base)?;
        Ok(r)
    }
}

/// Solves `m_instances` graphs of size `n` and aggregates the results.
///
/// Instances are handed to `workers` threads; the aggregate does not
/// depend on the worker count. Instance generation is not timed.
pub fn evaluate_size(
    solver: &dyn Solver,
    n: usize,
    params: &BetaParams,
    budget: SolverBudget,
    seed_base: u64,
    workers: usize,
) -> Result<SizeRecord> {
    params.validate()?;
    solver.validate_budget(&budget)?;
    if n == 0 {
        return Err(Error::input("graph size must be at least 1"));
    }
    // Fail before spending solver time on an unusable oracle.
    params.cmax(n, seed_base)?;

    let m = params.m_instances;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<InstanceResult>>> = Mutex::new(vec![None; m]);
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let deterministic = budget.is_deterministic();
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, m) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= m {
                    break;
                }
                let seed = seed_base.wrapping_add(k as u64);
                let graph = match generate_er_graph(n, EdgeProbability::HALF, seed) {
                    Ok(g) => g,
                    Err(e) => {
                        *failure.lock().unwrap() = Some(e);
                        break;
                    }
                };
                let run = solve(solver, &graph, budget.with_seed(budget.seed().wrapping_add(seed)));
                drop(graph);
                let result = InstanceResult {
                    seed,
                    best_cut: run.best_cut,
                    status: run.status,
                    elapsed_ms: (!deterministic).then_some(run.elapsed_ms),
                    iterations: run.iterations,
                    reason: run.reason,
                };
                slots.lock().unwrap()[k] = Some(result);
            });
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let instances: Vec<InstanceResult> = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every instance was solved"))
        .collect();
    SizeRecord::aggregate(n, solver.id(), instances, params, seed_base)
}

/// Runs a solver over `sizes` and stores its mean best cut per size.
///
/// `solver_for` picks the solver for each size, see
/// [`default_oracle_solver`].
pub fn build_oracle(
    solver_for: &dyn Fn(usize) -> Box<dyn Solver>,
    sizes: &[usize],
    m_instances: usize,
    budget: SolverBudget,
    seed_base: u64,
    workers: usize,
) -> Result<OracleTable> {
    let params = BetaParams {
        m_instances,
        ..BetaParams::default()
    };
    let mut records = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let solver = solver_for(n);
        records.push(evaluate_size(solver.as_ref(), n, &params, budget, seed_base, workers)?);
    }
    OracleTable::from_records(&records, seed_base, Some(budget))
}

/// Exhaustive search up to `n = 24`, simulated annealing above.
pub fn default_oracle_solver(n: usize) -> Box<dyn Solver> {
    if n <= 24 {
        Box::new(crate::solvers::ExactSolver)
    } else {
        Box::new(crate::solvers::AnnealingSolver::default())
    }
}

/// Sizes `start, start + step, ...` up to `max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub start: usize,
    pub step: usize,
    pub max: usize,
}

impl Schedule {
    pub fn new(start: usize, step: usize, max: usize) -> Result<Self> {
        let s = Schedule { start, step, max };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start == 0 {
            return Err(Error::config("schedule start must be at least 1"));
        }
        if self.step == 0 {
            return Err(Error::config("schedule step must be at least 1"));
        }
        if self.max < self.start {
            return Err(Error::config("schedule max must not be below start"));
        }
        Ok(())
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> {
        let s = *self;
        (0..)
            .map(move |k| s.start + k * s.step)
            .take_while(move |&n| n <= s.max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BetaBelowThreshold,
    MeanTimeExceeded,
    SizeLimit,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::BetaBelowThreshold => "beta at or below threshold",
            StopReason::MeanTimeExceeded => "mean runtime above cap",
            StopReason::SizeLimit => "size limit reached",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QScore {
    Size(usize),
    /// No evaluated size qualified; the value is the schedule start.
    BelowStart(usize),
}

impl QScore {
    pub fn size(self) -> Option<usize> {
        match self {
            QScore::Size(n) => Some(n),
            QScore::BelowStart(_) => None,
        }
    }
}

impl fmt::Display for QScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QScore::Size(n) => write!(f, "{n}"),
            QScore::BelowStart(start) => write!(f, "below start n ({start})"),
        }
    }
}

/// Host description stored with every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineInfo {
    pub cpu: String,
    pub logical_cpus: usize,
    pub os: String,
    pub arch: String,
}

impl MachineInfo {
    pub fn detect() -> Self {
        let cpu = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|text| {
                text.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split_once(':'))
                    .map(|(_, v)| v.trim().to_string())
            })
            .unwrap_or_else(|| "unknown".to_string());
        MachineInfo {
            cpu,
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Worker threads per size. Wall-clock runs should keep this at 1 or
    /// at most the number of idle cores.
    pub workers: usize,
    /// Stop once a size's mean runtime exceeds this many milliseconds.
    pub time_cap_ms: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            workers: 1,
            time_cap_ms: DEFAULT_TIME_CAP_MS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub solver_id: String,
    pub params: BetaParams,
    pub budget: SolverBudget,
    pub schedule: Schedule,
    pub seed_base: u64,
    pub options: SweepOptions,
    pub machine: MachineInfo,
    /// Effective run configuration as `key = value` pairs, when the sweep
    /// was started from one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<BTreeMap<String, String>>,
    pub records: Vec<SizeRecord>,
    pub qscore: QScore,
    pub stop_reason: StopReason,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Does `record` count toward the Q-score?
pub fn qualifies(record: &SizeRecord, params: &BetaParams, budget: &SolverBudget) -> bool {
    let fast_enough = match (budget.wall_clock_ms(), record.mean_time_ms) {
        (Some(limit), Some(mean)) => mean <= limit as f64,
        _ => true,
    };
    record.beta > params.beta_star && fast_enough
}

/// Evaluates growing sizes until a stopping rule fires.
pub fn run_sweep(
    solver: &dyn Solver,
    schedule: Schedule,
    params: &BetaParams,
    budget: SolverBudget,
    seed_base: u64,
    options: &SweepOptions,
    mut progress: Option<&mut dyn FnMut(&SizeRecord)>,
) -> Result<SweepReport> {
    schedule.validate()?;
    params.validate()?;
    solver.validate_budget(&budget)?;
    if options.workers == 0 {
        return Err(Error::config("workers must be at least 1"));
    }

    let mut records = Vec::new();
    let mut stop_reason = StopReason::SizeLimit;
    for n in schedule.sizes() {
        let record = evaluate_size(solver, n, params, budget, seed_base, options.workers)?;
        if let Some(p) = progress.as_mut() {
            p(&record);
        }
        let beta_low = record.beta <= params.beta_star;
        let too_slow = record.mean_time_ms.is_some_and(|t| t > options.time_cap_ms);
        records.push(record);
        if beta_low {
            stop_reason = StopReason::BetaBelowThreshold;
            break;
        }
        if too_slow {
            stop_reason = StopReason::MeanTimeExceeded;
            break;
        }
    }

    let qscore = records
        .iter()
        .filter(|r| qualifies(r, params, &budget))
        .map(|r| r.n)
        .max()
        .map_or(QScore::BelowStart(schedule.start), QScore::Size);
    Ok(SweepReport {
        solver_id: solver.id(),
        params: params.clone(),
        budget,
        schedule,
        seed_base,
        options: options.clone(),
        machine: MachineInfo::detect(),
        config: None,
        records,
        qscore,
        stop_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Qubo;
    use crate::solvers::{ExactSolver, RandomSolver, SolveContext, SolverOutcome};

    struct NeverAnswers;

    impl Solver for NeverAnswers {
        fn name(&self) -> &'static str {
            "never"
        }
        fn params(&self) -> Vec<(String, String)> {
            Vec::new()
        }
        fn solve_qubo(&self, _: &Qubo<i64>, _: &mut SolveContext<'_>) -> SolverOutcome {
            SolverOutcome::no_result("refuses")
        }
    }

    fn det(quota: u64) -> SolverBudget {
        SolverBudget::deterministic(quota, 0).unwrap()
    }

    #[test]
    fn cmax_approx_examples() {
        assert_eq!(cmax_approx(100), 1428.0);
        assert!((cmax_approx(4) - 3.424).abs() < 1e-12);
        assert!((cmax_approx(40) - 245.03).abs() < 0.01);
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(10, 5.0, 5.0, 2.0).unwrap(), 1.0);
        assert_eq!(beta(10, 2.0, 5.0, 2.0).unwrap(), 0.0);
        let b = beta(100, 1400.0, 1428.0, 1250.0).unwrap();
        assert!((b - 150.0 / 178.0).abs() < 1e-12);
        assert!((b - 0.8427).abs() < 1e-4);
        assert!(matches!(beta(7, 1.0, 2.0, 2.0), Err(Error::Scoring { n: 7, .. })));
    }

    #[test]
    fn baselines() {
        assert_eq!(Baseline::QuarterSquare.value(200), 5000.0);
        assert_eq!(Baseline::Exact.value(200), 4975.0);
    }

    #[test]
    fn params_validation() {
        let mut p = BetaParams::default();
        p.beta_star = 1.0;
        assert!(p.validate().is_err());
        p.beta_star = 0.2;
        p.m_instances = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn no_result_everywhere_scores_zero() {
        let params = BetaParams {
            m_instances: 5,
            ..Default::default()
        };
        let r = evaluate_size(&NeverAnswers, 30, &params, det(1), 0, 1).unwrap();
        assert_eq!(r.beta, 0.0);
        assert_eq!(r.no_result_count, 5);
        assert_eq!(r.instances[0].reason.as_deref(), Some("refuses"));
    }

    #[test]
    fn exact_solver_against_its_own_oracle_is_one() {
        let params = BetaParams {
            m_instances: 20,
            ..Default::default()
        };
        let table = build_oracle(&|_| Box::new(ExactSolver), &[10], 20, det(u64::MAX), 3, 1).unwrap();
        let params = BetaParams {
            cmax_mode: CmaxMode::Oracle(table),
            ..params
        };
        let r = evaluate_size(&ExactSolver, 10, &params, det(u64::MAX), 3, 1).unwrap();
        assert_eq!(r.beta, 1.0);
    }

    #[test]
    fn oracle_table_is_keyed_by_instance_set() {
        let table = build_oracle(&|_| Box::new(ExactSolver), &[8, 9], 4, det(u64::MAX), 11, 1).unwrap();
        assert!(table.lookup(8, 11, 4).is_ok());
        assert!(table.lookup(8, 12, 4).is_err());
        assert!(table.lookup(8, 11, 5).is_err());
        assert!(table.lookup(10, 11, 4).is_err());
        let text = table.to_json();
        assert!(text.contains("\"cmax\""));
        assert!(text.contains("\"8\""));
        assert_eq!(OracleTable::from_json(&text).unwrap(), table);
    }

    #[test]
    fn worker_count_does_not_change_the_record() {
        let params = BetaParams {
            m_instances: 9,
            ..Default::default()
        };
        let a = evaluate_size(&RandomSolver, 40, &params, det(1), 5, 1).unwrap();
        let b = evaluate_size(&RandomSolver, 40, &params, det(1), 5, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_instance_has_zero_spread() {
        let params = BetaParams {
            m_instances: 1,
            ..Default::default()
        };
        let r = evaluate_size(&RandomSolver, 20, &params, det(1), 0, 1).unwrap();
        assert_eq!(r.std_cut, 0.0);
        assert_eq!(r.beta_stderr, 0.0);
    }

    #[test]
    fn random_sweep_stops_immediately() {
        let params = BetaParams {
            m_instances: 10,
            ..Default::default()
        };
        let report = run_sweep(
            &RandomSolver,
            Schedule::new(20, 10, 200).unwrap(),
            &params,
            det(1),
            0,
            &SweepOptions::default(),
            None,
        )
        .unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.qscore, QScore::BelowStart(20));
        assert_eq!(report.stop_reason, StopReason::BetaBelowThreshold);
    }

    #[test]
    fn schedule_validation_and_sizes() {
        assert!(Schedule::new(5, 0, 10).is_err());
        assert!(Schedule::new(0, 5, 10).is_err());
        assert_eq!(Schedule::new(5, 5, 22).unwrap().sizes().collect::<Vec<_>>(), vec![5, 10, 15, 20]);
    }

    #[test]
    fn slow_sizes_do_not_qualify() {
        let params = BetaParams::default();
        let budget = SolverBudget::wall_clock(1_000, 0).unwrap();
        let record = SizeRecord {
            n: 10,
            m: 1,
            solver_id: "x".into(),
            mean_cut: 0.0,
            std_cut: 0.0,
            baseline: 0.0,
            cmax: 1.0,
            beta: 0.9,
            beta_stderr: 0.0,
            beta_approx: 0.9,
            mean_time_ms: Some(1_000.5),
            min_time_ms: Some(1_000.5),
            max_time_ms: Some(1_000.5),
            mean_iterations: 1.0,
            no_result_count: 0,
            instances: Vec::new(),
        };
        assert!(!qualifies(&record, &params, &budget));
        let quick = SizeRecord {
            mean_time_ms: Some(999.0),
            ..record
        };
        assert!(qualifies(&quick, &params, &budget));
    }
}
