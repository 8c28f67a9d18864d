//! Time-budgeted Max-Cut solvers.
//!
//! Every solver works on the QUBO form of the instance and is driven by
//! [`solve`], which owns the clock: timing starts before the Max-Cut to
//! QUBO conversion and stops when the solver returns. Solvers poll the
//! budget only at their documented loop boundaries, so a wall-clock run
//! can overshoot by at most one loop; the overshoot is reported as
//! measured.

mod annealing;
mod exact;
mod random;
mod tabu;

use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::graph::{cut_cost, GraphInstance};
use crate::qubo::{maxcut_to_qubo, Qubo};

pub use annealing::{AnnealingSolver, InitialTemperature};
pub use exact::ExactSolver;
pub use random::RandomSolver;
pub use tabu::TabuDecompositionSolver;

/// How long a solver may run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BudgetMode {
    /// Wall-clock limit in milliseconds.
    WallClock { ms: u64 },
    /// Fixed number of solver loop iterations (sweeps, passes, ...),
    /// independent of machine speed.
    Deterministic { quota: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverBudget {
    #[serde(flatten)]
    mode: BudgetMode,
    seed: u64,
}

impl SolverBudget {
    pub fn wall_clock(ms: u64, seed: u64) -> Result<Self> {
        if ms == 0 {
            return Err(Error::input("wall-clock budget must be positive"));
        }
        Ok(SolverBudget {
            mode: BudgetMode::WallClock { ms },
            seed,
        })
    }

    pub fn deterministic(quota: u64, seed: u64) -> Result<Self> {
        if quota == 0 {
            return Err(Error::input("iteration quota must be positive"));
        }
        Ok(SolverBudget {
            mode: BudgetMode::Deterministic { quota },
            seed,
        })
    }

    pub fn mode(&self) -> BudgetMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SolverBudget { seed, ..self }
    }

    pub fn wall_clock_ms(&self) -> Option<u64> {
        match self.mode {
            BudgetMode::WallClock { ms } => Some(ms),
            BudgetMode::Deterministic { .. } => None,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.mode, BudgetMode::Deterministic { .. })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self.mode {
            BudgetMode::WallClock { ms: 0 } => Err(Error::input("wall-clock budget must be positive")),
            BudgetMode::Deterministic { quota: 0 } => {
                Err(Error::input("iteration quota must be positive"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SolverBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            BudgetMode::WallClock { ms } => write!(f, "wall_clock={ms}ms seed={}", self.seed),
            BudgetMode::Deterministic { quota } => {
                write!(f, "deterministic={quota} seed={}", self.seed)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// The solver stopped by its own rule (enumeration complete, schedule
    /// finished, no improving pass).
    Solved,
    /// The budget ran out; the incumbent is returned.
    BudgetExceededWithResult,
    /// No cut was produced. Scored as a random cut.
    NoResult,
}

/// Outcome of one solver execution on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    pub best_assignment: Option<Assignment>,
    pub best_cut: u64,
    pub elapsed_ms: f64,
    pub status: RunStatus,
    pub solver_id: String,
    pub iterations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SolverRun {
    pub fn has_result(&self) -> bool {
        self.status != RunStatus::NoResult
    }
}

/// Progress notifications, in the order they happen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceEvent {
    /// A new best energy was found (cut = `-energy` for Max-Cut QUBOs).
    Incumbent { iteration: u64, energy: i64 },
    /// End of one outer iteration with the energy of the current state.
    Iteration { iteration: u64, energy: i64 },
}

/// What a solver hands back to [`solve`].
#[derive(Clone, Debug, Default)]
pub struct SolverOutcome {
    pub best: Option<Assignment>,
    /// `true` when the solver stopped by its own rule rather than the budget.
    pub completed: bool,
    pub reason: Option<String>,
}

impl SolverOutcome {
    pub fn completed(best: Assignment) -> Self {
        SolverOutcome {
            best: Some(best),
            completed: true,
            reason: None,
        }
    }

    pub fn interrupted(best: Assignment) -> Self {
        SolverOutcome {
            best: Some(best),
            completed: false,
            reason: None,
        }
    }

    pub fn no_result(reason: impl Into<String>) -> Self {
        SolverOutcome {
            best: None,
            completed: false,
            reason: Some(reason.into()),
        }
    }
}

/// Budget bookkeeping and tracing for one run.
pub struct SolveContext<'t> {
    start: Instant,
    budget: SolverBudget,
    iterations: u64,
    trace: Option<&'t mut dyn FnMut(TraceEvent)>,
}

impl<'t> SolveContext<'t> {
    pub fn new(budget: SolverBudget, trace: Option<&'t mut dyn FnMut(TraceEvent)>) -> Self {
        SolveContext {
            start: Instant::now(),
            budget,
            iterations: 0,
            trace,
        }
    }

    pub fn budget(&self) -> &SolverBudget {
        &self.budget
    }

    /// The run's random stream: ChaCha8 on stream 1, so it never coincides
    /// with an instance generated from the same seed.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.budget.seed);
        rng.set_stream(1);
        rng
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// Records `count` finished iterations and reports whether the budget
    /// still allows another loop.
    ///
    /// With `lookahead`, a wall-clock run also stops when the next loop is
    /// predicted (by its given duration) to end past the limit.
    pub fn advance(&mut self, count: u64, lookahead: Option<Duration>) -> bool {
        self.iterations += count;
        match self.budget.mode {
            BudgetMode::Deterministic { quota } => self.iterations < quota,
            BudgetMode::WallClock { ms } => {
                let limit = Duration::from_millis(ms);
                self.elapsed() + lookahead.unwrap_or_default() < limit
            }
        }
    }

    /// Remaining quota in deterministic mode.
    pub fn remaining_quota(&self) -> Option<u64> {
        match self.budget.mode {
            BudgetMode::Deterministic { quota } => Some(quota.saturating_sub(self.iterations)),
            BudgetMode::WallClock { .. } => None,
        }
    }

    pub fn emit(&mut self, event: TraceEvent) {
        if let Some(trace) = self.trace.as_mut() {
            trace(event);
        }
    }

    pub fn incumbent(&mut self, energy: i64) {
        let iteration = self.iterations;
        self.emit(TraceEvent::Incumbent { iteration, energy });
    }
}

/// A Max-Cut / QUBO solver usable by the benchmark harness.
pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Effective parameters, including defaults, as `key=value` pairs.
    fn params(&self) -> Vec<(String, String)>;

    /// Name plus parameter fingerprint, e.g. `sa(cooling=0.99,...)`.
    fn id(&self) -> String {
        let params: Vec<String> = self
            .params()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{}({})", self.name(), params.join(","))
    }

    /// Rejects budgets this solver cannot honor.
    fn validate_budget(&self, budget: &SolverBudget) -> Result<()> {
        budget.validate()
    }

    fn solve_qubo(&self, qubo: &Qubo<i64>, ctx: &mut SolveContext<'_>) -> SolverOutcome;
}

/// Runs `solver` on a Max-Cut instance.
pub fn solve(solver: &dyn Solver, graph: &GraphInstance, budget: SolverBudget) -> SolverRun {
    run(solver, graph, budget, None)
}

/// [`solve`] with a trace callback.
pub fn solve_traced(
    solver: &dyn Solver,
    graph: &GraphInstance,
    budget: SolverBudget,
    trace: &mut dyn FnMut(TraceEvent),
) -> SolverRun {
    run(solver, graph, budget, Some(trace))
}

fn run(
    solver: &dyn Solver,
    graph: &GraphInstance,
    budget: SolverBudget,
    trace: Option<&mut dyn FnMut(TraceEvent)>,
) -> SolverRun {
    let mut ctx = SolveContext::new(budget, trace);
    let qubo = maxcut_to_qubo(graph);
    let outcome = solver.solve_qubo(&qubo, &mut ctx);
    let elapsed_ms = ctx.elapsed().as_secs_f64() * 1e3;
    let iterations = ctx.iterations();
    drop(qubo);

    let solver_id = solver.id();
    let no_result = |reason: Option<String>| SolverRun {
        best_assignment: None,
        best_cut: 0,
        elapsed_ms,
        status: RunStatus::NoResult,
        solver_id: solver_id.clone(),
        iterations,
        reason,
    };
    let Some(best) = outcome.best else {
        return no_result(outcome.reason);
    };
    match cut_cost(graph, &best) {
        Ok(cut) => SolverRun {
            best_assignment: Some(best),
            best_cut: cut,
            elapsed_ms,
            status: if outcome.completed {
                RunStatus::Solved
            } else {
                RunStatus::BudgetExceededWithResult
            },
            solver_id,
            iterations,
            reason: outcome.reason,
        },
        Err(e) => no_result(Some(format!("invalid assignment: {e}"))),
    }
}

/// Result of running a solver directly on a QUBO.
#[derive(Clone, Debug)]
pub struct QuboRun {
    pub best: Option<Assignment>,
    pub energy: Option<i64>,
    pub completed: bool,
    pub iterations: u64,
    pub elapsed_ms: f64,
    pub reason: Option<String>,
}

/// Runs `solver` on an arbitrary integer QUBO, e.g. behind a solver service.
pub fn solve_qubo(solver: &dyn Solver, qubo: &Qubo<i64>, budget: SolverBudget) -> QuboRun {
    let mut ctx = SolveContext::new(budget, None);
    let outcome = solver.solve_qubo(qubo, &mut ctx);
    let energy = outcome.best.as_ref().and_then(|b| qubo.energy(b).ok());
    QuboRun {
        best: outcome.best,
        energy,
        completed: outcome.completed,
        iterations: ctx.iterations(),
        elapsed_ms: ctx.elapsed().as_secs_f64() * 1e3,
        reason: outcome.reason,
    }
}

/// Builds a named solver from `key=value` parameter overrides.
///
/// Known names: `exact`, `random`, `sa`, `tabu`. Remote solvers are built
/// through [`crate::remote::RemoteSolver`].
pub fn build_solver(name: &str, params: &[(String, String)]) -> Result<Box<dyn Solver>> {
    match name {
        "exact" => {
            reject_params(name, params)?;
            Ok(Box::new(ExactSolver))
        }
        "random" => {
            reject_params(name, params)?;
            Ok(Box::new(RandomSolver))
        }
        "sa" | "annealing" => Ok(Box::new(AnnealingSolver::from_params(params)?)),
        "tabu" => Ok(Box::new(TabuDecompositionSolver::from_params(params)?)),
        other => Err(Error::config(format!("unknown solver {other:?}"))),
    }
}

fn reject_params(name: &str, params: &[(String, String)]) -> Result<()> {
    match params.first() {
        Some((k, _)) => Err(Error::config(format!("solver {name} takes no parameter {k:?}"))),
        None => Ok(()),
    }
}

pub(crate) fn parse_param<T: std::str::FromStr>(solver: &str, key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("solver {solver}: bad value {value:?} for {key}")))
}
