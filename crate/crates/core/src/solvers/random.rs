use crate::assignment::Assignment;
use crate::qubo::Qubo;

use super::{SolveContext, Solver, SolverOutcome};

/// One uniformly random cut: the baseline that scores β ≈ 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandomSolver;

impl Solver for RandomSolver {
    fn name(&self) -> &'static str {
        "random"
    }

    fn params(&self) -> Vec<(String, String)> {
        Vec::new()
    }

    fn solve_qubo(&self, qubo: &Qubo<i64>, ctx: &mut SolveContext<'_>) -> SolverOutcome {
        let mut rng = ctx.rng();
        let x = Assignment::random(qubo.n(), &mut rng);
        ctx.advance(1, None);
        if let Ok(e) = qubo.energy(&x) {
            ctx.incumbent(e);
        }
        SolverOutcome::completed(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er_graph, EdgeProbability, GraphInstance};
    use crate::solvers::{solve, RunStatus, SolverBudget};

    #[test]
    fn empty_graph_cut_is_zero() {
        let g = GraphInstance::from_edges(7, []).unwrap();
        let run = solve(&RandomSolver, &g, SolverBudget::deterministic(1, 4).unwrap());
        assert_eq!((run.best_cut, run.status), (0, RunStatus::Solved));
    }

    #[test]
    fn single_edge_is_cut_half_the_time() {
        let g = GraphInstance::from_edges(2, [(0, 1)]).unwrap();
        let total: u64 = (0..1000)
            .map(|s| solve(&RandomSolver, &g, SolverBudget::deterministic(1, s).unwrap()).best_cut)
            .sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 0.5).abs() <= 0.05, "mean {mean}");
    }

    #[test]
    fn mean_cut_is_a_quarter_of_pairs() {
        let n = 200usize;
        let cuts: Vec<f64> = (0..100)
            .map(|s| {
                let g = generate_er_graph(n, EdgeProbability::HALF, s).unwrap();
                solve(&RandomSolver, &g, SolverBudget::deterministic(1, s).unwrap()).best_cut as f64
            })
            .collect();
        let m = cuts.len() as f64;
        let mean = cuts.iter().sum::<f64>() / m;
        let var = cuts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let expected = (n * (n - 1)) as f64 / 8.0;
        assert_eq!(expected, 4975.0);
        assert!((mean - expected).abs() < 3.0 * (var / m).sqrt(), "mean {mean}");
    }
}
