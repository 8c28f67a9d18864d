use std::time::Instant;

use crate::assignment::Assignment;
use crate::neighborhood::{NeighborhoodCache, QuboAdjacency};
use crate::qubo::Qubo;

use super::{SolveContext, Solver, SolverOutcome};

/// Assignments scored between two budget checks.
const BLOCK: u64 = 1 << 12;

/// Brute-force enumeration in Gray-code order.
///
/// Variable 0 is held at 0: Max-Cut energies are invariant under a global
/// flip, so this halves the space. Each step flips one variable through
/// the neighborhood cache. One iteration is one scored assignment.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactSolver;

impl Solver for ExactSolver {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn params(&self) -> Vec<(String, String)> {
        Vec::new()
    }

    fn solve_qubo(&self, qubo: &Qubo<i64>, ctx: &mut SolveContext<'_>) -> SolverOutcome {
        let n = qubo.n();
        let adjacency = QuboAdjacency::new(qubo);
        let mut cache = NeighborhoodCache::new(&adjacency, Assignment::zeros(n))
            .expect("assignment length matches");
        let mut best = cache.assignment().clone();
        let mut best_energy = cache.energy();
        ctx.incumbent(best_energy);

        // Steps after the all-zero assignment: 2^(n-1) - 1.
        let total: u64 = if n >= 65 { u64::MAX } else { (1u64 << (n - 1)) - 1 };
        let mut step: u64 = 0;
        let mut scored: u64 = 1;
        loop {
            if step >= total {
                ctx.advance(scored, None);
                return SolverOutcome::completed(best);
            }
            let block_start = Instant::now();
            let mut block = BLOCK.min(total - step);
            if let Some(left) = ctx.remaining_quota() {
                if left <= scored {
                    ctx.advance(scored, None);
                    return SolverOutcome::interrupted(best);
                }
                block = block.min(left - scored);
            }
            for _ in 0..block {
                step += 1;
                let var = 1 + step.trailing_zeros() as usize;
                cache.flip(var);
                if cache.energy() < best_energy {
                    best_energy = cache.energy();
                    best.clone_from(cache.assignment());
                    ctx.incumbent(best_energy);
                }
            }
            scored += block;
            if step >= total {
                ctx.advance(scored, None);
                return SolverOutcome::completed(best);
            }
            let keep_going = ctx.advance(scored, Some(block_start.elapsed()));
            scored = 0;
            if !keep_going {
                return SolverOutcome::interrupted(best);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cut_cost, generate_er_graph, EdgeProbability, GraphInstance};
    use crate::solvers::{solve, RunStatus, SolverBudget};

    fn generous() -> SolverBudget {
        SolverBudget::wall_clock(60_000, 0).unwrap()
    }

    // Independent oracle: all 2^n assignments, no symmetry reduction.
    fn full_enumeration(g: &GraphInstance) -> u64 {
        (0..1u64 << g.n())
            .map(|code| cut_cost(g, &Assignment::from_index(g.n(), code)).unwrap())
            .max()
            .unwrap()
    }

    #[test]
    fn small_known_optima() {
        let run = solve(&ExactSolver, &GraphInstance::complete(3).unwrap(), generous());
        assert_eq!((run.best_cut, run.status), (2, RunStatus::Solved));
        let run = solve(&ExactSolver, &GraphInstance::complete(4).unwrap(), generous());
        assert_eq!(run.best_cut, 4);
        let run = solve(&ExactSolver, &GraphInstance::from_edges(6, []).unwrap(), generous());
        assert_eq!((run.best_cut, run.status), (0, RunStatus::Solved));
        let run = solve(&ExactSolver, &GraphInstance::from_edges(1, []).unwrap(), generous());
        assert_eq!((run.best_cut, run.status), (0, RunStatus::Solved));
        assert_eq!(run.iterations, 1);
    }

    #[test]
    fn matches_full_enumeration() {
        for seed in 0..20 {
            let g = generate_er_graph(10, EdgeProbability::HALF, seed).unwrap();
            let run = solve(&ExactSolver, &g, generous());
            assert_eq!(run.status, RunStatus::Solved);
            assert_eq!(run.best_cut, full_enumeration(&g), "seed {seed}");
            assert_eq!(run.iterations, 1 << 9);
        }
    }

    #[test]
    fn tiny_budget_stops_early() {
        let g = generate_er_graph(40, EdgeProbability::HALF, 3).unwrap();
        let run = solve(&ExactSolver, &g, SolverBudget::wall_clock(1, 0).unwrap());
        assert_ne!(run.status, RunStatus::Solved);
        assert!(run.elapsed_ms < 1_000.0, "elapsed {}", run.elapsed_ms);
        if let Some(x) = &run.best_assignment {
            assert_eq!(cut_cost(&g, x).unwrap(), run.best_cut);
        }
    }

    #[test]
    fn deterministic_quota_is_respected() {
        let g = generate_er_graph(20, EdgeProbability::HALF, 3).unwrap();
        let run = solve(&ExactSolver, &g, SolverBudget::deterministic(5_000, 0).unwrap());
        assert_eq!(run.status, RunStatus::BudgetExceededWithResult);
        assert_eq!(run.iterations, 5_000);
        let again = solve(&ExactSolver, &g, SolverBudget::deterministic(5_000, 0).unwrap());
        assert_eq!(again.best_assignment, run.best_assignment);
    }
}
