//! Q-score benchmarking for Max-Cut / QUBO solvers.
//!
//! The Q-score of a solver is the largest graph size `N` at which its
//! average best cut on random `G(N, 1/2)` graphs stays clearly above a
//! random cut:
//!
//! ```text
//! β(N) = (C(N) - N²/8) / (C_max(N) - N²/8)  >  β* = 0.2
//! ```
//!
//! where `C(N)` is the mean best cut over `M` instances and `C_max(N)` is
//! either the fit `N²/8 + 0.178·N^{3/2}` or a table of best-known cuts.
//!
//! ```
//! use qscore::graph::{generate_er_graph, EdgeProbability};
//! use qscore::solvers::{solve, ExactSolver, SolverBudget};
//!
//! let g = generate_er_graph(12, EdgeProbability::HALF, 7)?;
//! let run = solve(&ExactSolver, &g, SolverBudget::wall_clock(10_000, 0)?);
//! assert!(run.best_cut as f64 > g.edge_count() as f64 / 2.0);
//! # Ok::<(), qscore::Error>(())
//! ```

pub mod assignment;
pub mod config;
pub mod error;
pub mod graph;
pub mod neighborhood;
pub mod protocol;
pub mod qubo;
pub mod remote;
pub mod report;
pub mod solvers;

pub use assignment::Assignment;
pub use error::{Error, Result};
pub use graph::{cut_cost, generate_er_graph, Cut, EdgeProbability, GraphInstance};
pub use qubo::{extract_subqubo, maxcut_to_qubo, Qubo};
