use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::neighborhood::{NeighborhoodCache, QuboAdjacency};
use crate::qubo::Qubo;

use super::{parse_param, SolveContext, Solver, SolverOutcome, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialTemperature {
    /// Largest `|delta|` over this many random single-flip probes of the
    /// starting assignment, floored at 1.
    Auto { probes: usize },
    Fixed(f64),
}

impl fmt::Display for InitialTemperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialTemperature::Auto { .. } => f.write_str("auto"),
            InitialTemperature::Fixed(t) => write!(f, "{t}"),
        }
    }
}

/// Metropolis single-flip simulated annealing with geometric cooling.
///
/// A sweep is `n` proposals of a uniformly chosen variable. A move with
/// delta `d` is accepted when `d <= 0`, otherwise with probability
/// `exp(-d / T)`. After every `sweeps_per_temperature` sweeps `T` is
/// multiplied by `cooling_ratio`; the schedule ends once `T` drops below
/// `min_temperature`. With `restart` the search then starts over from a
/// fresh random assignment while budget remains, keeping the global best.
///
/// One iteration is one sweep. The budget is checked after every sweep;
/// in wall-clock mode the run also ends when the next sweep, estimated by
/// the duration of the last one, would finish past the limit.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnealingSolver {
    pub initial_temperature: InitialTemperature,
    pub cooling_ratio: f64,
    pub sweeps_per_temperature: u32,
    pub min_temperature: f64,
    pub restart: bool,
}

impl Default for AnnealingSolver {
    fn default() -> Self {
        AnnealingSolver {
            initial_temperature: InitialTemperature::Auto { probes: 1000 },
            cooling_ratio: 0.99,
            sweeps_per_temperature: 1,
            min_temperature: 0.01,
            restart: true,
        }
    }
}

impl AnnealingSolver {
    pub fn from_params(params: &[(String, String)]) -> Result<Self> {
        let mut s = AnnealingSolver::default();
        let mut probes = 1000usize;
        let mut fixed = None;
        for (key, value) in params {
            match key.as_str() {
                "t0" => {
                    if value.trim() != "auto" {
                        fixed = Some(parse_param::<f64>("sa", key, value)?);
                    }
                }
                "probes" => probes = parse_param("sa", key, value)?,
                "cooling" => s.cooling_ratio = parse_param("sa", key, value)?,
                "sweeps_per_temp" => s.sweeps_per_temperature = parse_param("sa", key, value)?,
                "t_min" => s.min_temperature = parse_param("sa", key, value)?,
                "restart" => s.restart = parse_param("sa", key, value)?,
                other => return Err(Error::config(format!("solver sa: unknown parameter {other:?}"))),
            }
        }
        s.initial_temperature = match fixed {
            Some(t) => InitialTemperature::Fixed(t),
            None => InitialTemperature::Auto { probes },
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::config(format!("solver sa: {m}")));
        if !(self.cooling_ratio > 0.0 && self.cooling_ratio < 1.0) {
            return bad("cooling must lie in (0, 1)");
        }
        if self.sweeps_per_temperature == 0 {
            return bad("sweeps_per_temp must be positive");
        }
        if !(self.min_temperature > 0.0 && self.min_temperature.is_finite()) {
            return bad("t_min must be positive");
        }
        match self.initial_temperature {
            InitialTemperature::Auto { probes: 0 } => bad("probes must be positive"),
            InitialTemperature::Fixed(t) if !(t > 0.0) => bad("t0 must be positive"),
            _ => Ok(()),
        }
    }

    fn initial_temperature(&self, cache: &NeighborhoodCache<'_, i64>, rng: &mut impl Rng) -> f64 {
        match self.initial_temperature {
            InitialTemperature::Fixed(t) => t,
            InitialTemperature::Auto { probes } => {
                let n = cache.assignment().len();
                let max = (0..probes)
                    .map(|_| cache.flip_delta(rng.gen_range(0..n)).unsigned_abs())
                    .max()
                    .unwrap_or(0);
                (max as f64).max(1.0)
            }
        }
    }
}

impl Solver for AnnealingSolver {
    fn name(&self) -> &'static str {
        "sa"
    }

    fn params(&self) -> Vec<(String, String)> {
        let mut p = vec![("t0".to_string(), self.initial_temperature.to_string())];
        if let InitialTemperature::Auto { probes } = self.initial_temperature {
            p.push(("probes".into(), probes.to_string()));
        }
        p.extend([
            ("cooling".into(), self.cooling_ratio.to_string()),
            ("sweeps_per_temp".into(), self.sweeps_per_temperature.to_string()),
            ("t_min".into(), self.min_temperature.to_string()),
            ("restart".into(), self.restart.to_string()),
        ]);
        p
    }

    fn solve_qubo(&self, qubo: &Qubo<i64>, ctx: &mut SolveContext<'_>) -> SolverOutcome {
        let n = qubo.n();
        let mut rng = ctx.rng();
        let adjacency = QuboAdjacency::new(qubo);
        let started = Instant::now();
        let mut cache = NeighborhoodCache::new(&adjacency, Assignment::random(n, &mut rng))
            .expect("assignment length matches");
        // Rebuilding the fields for a restart, and freeing the adjacency at
        // the end, each cost about as much as this.
        let mut restart_time = started.elapsed();
        let teardown = restart_time;
        let mut best = cache.assignment().clone();
        let mut best_energy = cache.energy();
        ctx.incumbent(best_energy);

        let t0 = self.initial_temperature(&cache, &mut rng);
        // Hot sweeps accept most flips and cost far more than cold ones, so
        // the stopping check predicts with the longest sweep seen.
        let mut longest_sweep = Duration::ZERO;
        loop {
            let mut temperature = t0;
            let mut sweeps_done = 0u64;
            while temperature >= self.min_temperature {
                for _ in 0..self.sweeps_per_temperature {
                    let started = Instant::now();
                    for _ in 0..n {
                        let i = rng.gen_range(0..n);
                        let delta = cache.flip_delta(i);
                        if delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / temperature).exp() {
                            cache.flip(i);
                            if cache.energy() < best_energy {
                                best_energy = cache.energy();
                                best.clone_from(cache.assignment());
                                ctx.incumbent(best_energy);
                            }
                        }
                    }
                    sweeps_done += 1;
                    longest_sweep = longest_sweep.max(started.elapsed());
                    let iteration = ctx.iterations() + 1;
                    ctx.emit(TraceEvent::Iteration {
                        iteration,
                        energy: cache.energy(),
                    });
                    if !ctx.advance(1, Some(longest_sweep + teardown)) {
                        return SolverOutcome::interrupted(best);
                    }
                }
                temperature *= self.cooling_ratio;
            }
            if !self.restart || sweeps_done == 0 {
                return SolverOutcome::completed(best);
            }
            if !ctx.advance(0, Some(restart_time + longest_sweep + teardown)) {
                return SolverOutcome::interrupted(best);
            }
            let started = Instant::now();
            cache
                .reset(Assignment::random(n, &mut rng))
                .expect("assignment length matches");
            restart_time = restart_time.max(started.elapsed());
            if cache.energy() < best_energy {
                best_energy = cache.energy();
                best.clone_from(cache.assignment());
                ctx.incumbent(best_energy);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er_graph, EdgeProbability, GraphInstance};
    use crate::solvers::{solve, solve_traced, RandomSolver, RunStatus, SolverBudget};

    #[test]
    fn k4_is_solved_reliably() {
        let k4 = GraphInstance::complete(4).unwrap();
        let solver = AnnealingSolver::default();
        let hits = (0..100)
            .filter(|&s| solve(&solver, &k4, SolverBudget::wall_clock(100, s).unwrap()).best_cut == 4)
            .count();
        assert!(hits >= 99, "hits {hits}");
    }

    #[test]
    fn zero_length_schedule_returns_the_random_start() {
        let solver = AnnealingSolver {
            initial_temperature: InitialTemperature::Fixed(0.001),
            restart: false,
            ..AnnealingSolver::default()
        };
        for seed in 0..20 {
            let g = generate_er_graph(30, EdgeProbability::HALF, seed).unwrap();
            let budget = SolverBudget::deterministic(10, seed).unwrap();
            let sa = solve(&solver, &g, budget);
            let random = solve(&RandomSolver, &g, budget);
            assert_eq!(sa.status, RunStatus::Solved);
            assert_eq!(sa.iterations, 0);
            assert_eq!(sa.best_assignment, random.best_assignment);
        }
    }

    #[test]
    fn incumbent_trace_is_monotone() {
        let g = generate_er_graph(60, EdgeProbability::HALF, 9).unwrap();
        let mut last = i64::MAX;
        let mut events = 0;
        let run = solve_traced(
            &AnnealingSolver::default(),
            &g,
            SolverBudget::deterministic(300, 1).unwrap(),
            &mut |e| {
                if let TraceEvent::Incumbent { energy, .. } = e {
                    assert!(energy < last);
                    last = energy;
                    events += 1;
                }
            },
        );
        assert!(events > 1);
        assert_eq!(run.best_cut as i64, -last);
    }

    #[test]
    fn infinite_temperature_is_an_unbiased_walk() {
        let n = 40;
        let g = generate_er_graph(n, EdgeProbability::HALF, 17).unwrap();
        let solver = AnnealingSolver {
            initial_temperature: InitialTemperature::Fixed(1e300),
            ..AnnealingSolver::default()
        };
        let mut visited = Vec::new();
        solve_traced(&solver, &g, SolverBudget::deterministic(4000, 5).unwrap(), &mut |e| {
            if let TraceEvent::Iteration { energy, .. } = e {
                visited.push(-energy as f64);
            }
        });
        let m = visited.len() as f64;
        let mean = visited.iter().sum::<f64>() / m;
        // Each edge is cut with probability 1/2 under a uniform assignment.
        let expected = g.edge_count() as f64 / 2.0;
        // Consecutive sweep-end states are correlated; count a quarter of
        // them as independent samples.
        let sd = (g.edge_count() as f64 / 4.0).sqrt();
        let tolerance = 5.0 * sd / (m / 4.0).sqrt();
        assert!((mean - expected).abs() < tolerance, "mean {mean}, expected {expected}");
    }

    #[test]
    fn deterministic_runs_repeat_exactly() {
        let g = generate_er_graph(50, EdgeProbability::HALF, 2).unwrap();
        let budget = SolverBudget::deterministic(500, 8).unwrap();
        let a = solve(&AnnealingSolver::default(), &g, budget);
        let b = solve(&AnnealingSolver::default(), &g, budget);
        assert_eq!(a.best_assignment, b.best_assignment);
        assert_eq!(a.iterations, 500);
    }

    #[test]
    fn longer_quota_never_hurts() {
        let g = generate_er_graph(50, EdgeProbability::HALF, 4).unwrap();
        let short = solve(&AnnealingSolver::default(), &g, SolverBudget::deterministic(50, 3).unwrap());
        let long = solve(&AnnealingSolver::default(), &g, SolverBudget::deterministic(400, 3).unwrap());
        assert!(long.best_cut >= short.best_cut);
    }

    #[test]
    fn params_round_trip_through_id() {
        let params = vec![
            ("cooling".to_string(), "0.95".to_string()),
            ("restart".to_string(), "false".to_string()),
        ];
        let s = AnnealingSolver::from_params(&params).unwrap();
        assert_eq!(
            s.id(),
            "sa(t0=auto,probes=1000,cooling=0.95,sweeps_per_temp=1,t_min=0.01,restart=false)"
        );
        assert!(AnnealingSolver::from_params(&[("cooling".into(), "1.5".into())]).is_err());
        assert!(AnnealingSolver::from_params(&[("speed".into(), "1".into())]).is_err());
    }
}
