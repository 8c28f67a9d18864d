use std::cmp::Reverse;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::neighborhood::{NeighborhoodCache, QuboAdjacency};
use crate::qubo::Qubo;

use super::{parse_param, SolveContext, Solver, SolverOutcome, TraceEvent};

/// Decomposition solver in the style of qbsolv.
///
/// An outer pass ranks all variables by `|flip_delta|` (largest first,
/// ties by index), cuts the ranking into chunks of `subproblem_size`,
/// and for each chunk clamps every other variable, extracts the
/// sub-QUBO and improves it with single-flip tabu search started from the
/// current values. Improvements are written back immediately. Passes
/// repeat until one improves the energy by no more than
/// `min_improvement`. When `n <= subproblem_size` a pass is one tabu
/// search over the whole problem.
///
/// One iteration is one outer pass; the budget is checked at the end of
/// every pass, so a long pass overshoots a wall-clock limit.
#[derive(Clone, Debug, PartialEq)]
pub struct TabuDecompositionSolver {
    pub subproblem_size: usize,
    pub tenure: usize,
    /// Tabu iterations per subproblem; `None` means `50 * subproblem size`.
    pub inner_iterations: Option<usize>,
    pub min_improvement: i64,
}

impl Default for TabuDecompositionSolver {
    fn default() -> Self {
        TabuDecompositionSolver {
            subproblem_size: 48,
            tenure: 10,
            inner_iterations: None,
            min_improvement: 0,
        }
    }
}

impl TabuDecompositionSolver {
    pub fn from_params(params: &[(String, String)]) -> Result<Self> {
        let mut s = TabuDecompositionSolver::default();
        for (key, value) in params {
            match key.as_str() {
                "sub_size" => s.subproblem_size = parse_param("tabu", key, value)?,
                "tenure" => s.tenure = parse_param("tabu", key, value)?,
                "inner" => {
                    s.inner_iterations = if value.trim() == "auto" {
                        None
                    } else {
                        Some(parse_param("tabu", key, value)?)
                    }
                }
                "min_improvement" => s.min_improvement = parse_param("tabu", key, value)?,
                other => {
                    return Err(Error::config(format!("solver tabu: unknown parameter {other:?}")))
                }
            }
        }
        if s.subproblem_size == 0 {
            return Err(Error::config("solver tabu: sub_size must be positive"));
        }
        if s.min_improvement < 0 {
            return Err(Error::config("solver tabu: min_improvement must be non-negative"));
        }
        Ok(s)
    }

    fn inner_iterations(&self, size: usize) -> usize {
        self.inner_iterations.unwrap_or(50 * size)
    }
}

impl Solver for TabuDecompositionSolver {
    fn name(&self) -> &'static str {
        "tabu"
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("sub_size".into(), self.subproblem_size.to_string()),
            ("tenure".into(), self.tenure.to_string()),
            (
                "inner".into(),
                self.inner_iterations
                    .map_or_else(|| "auto".to_string(), |v| v.to_string()),
            ),
            ("min_improvement".into(), self.min_improvement.to_string()),
        ]
    }

    fn solve_qubo(&self, qubo: &Qubo<i64>, ctx: &mut SolveContext<'_>) -> SolverOutcome {
        let n = qubo.n();
        let mut rng = ctx.rng();
        let adjacency = QuboAdjacency::new(qubo);
        let mut cache = NeighborhoodCache::new(&adjacency, Assignment::random(n, &mut rng))
            .expect("assignment length matches");
        let mut best_energy = cache.energy();
        ctx.incumbent(best_energy);

        let mut position = vec![u32::MAX; n];
        let mut order: Vec<usize> = (0..n).collect();
        loop {
            let pass_start = cache.energy();
            if n <= self.subproblem_size {
                let start = cache.assignment().clone();
                let (improved, energy) = tabu_search(
                    &adjacency,
                    start,
                    self.inner_iterations(n),
                    self.tenure,
                    best_energy,
                );
                if energy < cache.energy() {
                    write_back(&mut cache, &(0..n).collect::<Vec<_>>(), &improved);
                }
            } else {
                order.sort_by_key(|&i| (Reverse(cache.flip_delta(i).unsigned_abs()), i));
                for chunk in order.chunks(self.subproblem_size) {
                    let sub = adjacency.extract_with_cache(&cache, chunk, &mut position);
                    let sub_adjacency = QuboAdjacency::new(&sub);
                    let start = Assignment::from_bits(
                        chunk.iter().map(|&v| cache.assignment().get(v)).collect(),
                    );
                    let (improved, energy) = tabu_search(
                        &sub_adjacency,
                        start,
                        self.inner_iterations(chunk.len()),
                        self.tenure,
                        best_energy,
                    );
                    if energy < cache.energy() {
                        write_back(&mut cache, chunk, &improved);
                        debug_assert_eq!(cache.energy(), energy);
                    }
                    if cache.energy() < best_energy {
                        best_energy = cache.energy();
                        ctx.incumbent(best_energy);
                    }
                }
            }
            if cache.energy() < best_energy {
                best_energy = cache.energy();
                ctx.incumbent(best_energy);
            }
            let iteration = ctx.iterations() + 1;
            ctx.emit(TraceEvent::Iteration {
                iteration,
                energy: cache.energy(),
            });
            let improved = pass_start - cache.energy() > self.min_improvement;
            let in_budget = ctx.advance(1, None);
            // The current state never gets worse, so it is the incumbent.
            let best = cache.assignment().clone();
            if !improved {
                return SolverOutcome::completed(best);
            }
            if !in_budget {
                return SolverOutcome::interrupted(best);
            }
        }
    }
}

fn write_back(cache: &mut NeighborhoodCache<'_, i64>, vars: &[usize], values: &Assignment) {
    for (k, &v) in vars.iter().enumerate() {
        if cache.assignment().get(v) != values.get(k) {
            cache.flip(v);
        }
    }
}

/// Single-flip tabu search from `start`.
///
/// Each iteration makes the best allowed move, even if it worsens the
/// energy. A variable flipped at iteration `t` is tabu through iteration
/// `t + tenure`; a tabu move is still allowed when it reaches an energy
/// below `aspiration` and below the best seen in this search. Tenure is
/// capped at `max(1, n / 4)` so small problems keep most moves open. Ties
/// go to the lowest index. Returns the best assignment seen and its energy.
pub(crate) fn tabu_search(
    adjacency: &QuboAdjacency<i64>,
    start: Assignment,
    iterations: usize,
    tenure: usize,
    aspiration: i64,
) -> (Assignment, i64) {
    let n = adjacency.n();
    let mut cache = NeighborhoodCache::new(adjacency, start).expect("assignment length matches");
    let mut best = cache.assignment().clone();
    let mut best_energy = cache.energy();
    if n == 0 {
        return (best, best_energy);
    }
    let tenure = tenure.min((n / 4).max(1)).min(n - 1);
    let mut released_at = vec![0usize; n];
    for it in 1..=iterations {
        let current = cache.energy();
        let threshold = aspiration.min(best_energy);
        let mut chosen: Option<(usize, i64)> = None;
        for i in 0..n {
            let delta = cache.flip_delta(i);
            let allowed = released_at[i] < it || current + delta < threshold;
            if allowed && chosen.is_none_or(|(_, d)| delta < d) {
                chosen = Some((i, delta));
            }
        }
        let Some((i, _)) = chosen else { break };
        cache.flip(i);
        released_at[i] = it + tenure;
        if cache.energy() < best_energy {
            best_energy = cache.energy();
            best.clone_from(cache.assignment());
        }
    }
    (best, best_energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cut_cost, generate_er_graph, EdgeProbability, GraphInstance};
    use crate::qubo::maxcut_to_qubo;
    use crate::solvers::{solve, ExactSolver, RunStatus, SolverBudget};

    #[test]
    fn empty_graph_finishes_immediately() {
        let g = GraphInstance::from_edges(5, []).unwrap();
        let run = solve(
            &TabuDecompositionSolver::default(),
            &g,
            SolverBudget::wall_clock(1_000, 0).unwrap(),
        );
        assert_eq!((run.best_cut, run.status), (0, RunStatus::Solved));
        assert_eq!(run.iterations, 1);
    }

    #[test]
    fn pure_tabu_finds_small_optima() {
        let solver = TabuDecompositionSolver {
            subproblem_size: 12,
            ..Default::default()
        };
        let generous = SolverBudget::wall_clock(1_000, 0).unwrap();
        let hits = (0..100)
            .filter(|&seed| {
                let g = generate_er_graph(12, EdgeProbability::HALF, seed).unwrap();
                let budget = generous.with_seed(seed);
                solve(&solver, &g, budget).best_cut == solve(&ExactSolver, &g, budget).best_cut
            })
            .count();
        assert!(hits >= 95, "hits {hits}");
    }

    #[test]
    fn both_paths_return_valid_cuts() {
        for seed in 0..20 {
            let g = generate_er_graph(12, EdgeProbability::HALF, seed).unwrap();
            for size in [12, 6] {
                let solver = TabuDecompositionSolver {
                    subproblem_size: size,
                    ..Default::default()
                };
                let run = solve(&solver, &g, SolverBudget::wall_clock(1_000, seed).unwrap());
                let x = run.best_assignment.as_ref().unwrap();
                assert_eq!(x.len(), 12);
                assert_eq!(cut_cost(&g, x).unwrap(), run.best_cut);
            }
        }
    }

    #[test]
    fn decomposition_improves_on_random_start() {
        let g = generate_er_graph(300, EdgeProbability::HALF, 1).unwrap();
        let run = solve(
            &TabuDecompositionSolver::default(),
            &g,
            SolverBudget::deterministic(1_000, 1).unwrap(),
        );
        assert_eq!(run.status, RunStatus::Solved);
        // A random cut averages m / 2; a local search lands well above it.
        assert!(run.best_cut as f64 > g.edge_count() as f64 / 2.0 + 500.0);
    }

    #[test]
    fn tabu_search_never_returns_worse_than_start() {
        let g = generate_er_graph(20, EdgeProbability::HALF, 4).unwrap();
        let adj = QuboAdjacency::new(&maxcut_to_qubo(&g));
        let start = Assignment::zeros(20);
        let (_, e) = tabu_search(&adj, start, 200, 10, 0);
        assert!(e <= 0);
        let (_, e1) = tabu_search(&adj, Assignment::zeros(20), 1, 25, i64::MIN);
        assert!(e1 <= 0);
    }

    #[test]
    fn params_are_echoed() {
        let s = TabuDecompositionSolver::from_params(&[("sub_size".into(), "32".into())]).unwrap();
        assert_eq!(s.id(), "tabu(sub_size=32,tenure=10,inner=auto,min_improvement=0)");
        assert!(TabuDecompositionSolver::from_params(&[("sub_size".into(), "0".into())]).is_err());
    }
}
