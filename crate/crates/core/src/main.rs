use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qscore::config::RunConfig;
use qscore::protocol::{build_oracle, default_oracle_solver, Schedule};
use qscore::report::{read_report, write_plotdata};
use qscore::solvers::{solve, Solver};
use qscore::{generate_er_graph, EdgeProbability, Error, GraphInstance, Result};

#[derive(Parser)]
#[command(name = "qscore", version, about = "Q-score benchmarking for Max-Cut / QUBO solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an Erdős–Rényi G(n, p) instance
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/2")]
        p: EdgeProbability,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one solver on one graph file and print the run as JSON
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sweep sizes and compute the Q-score
    Sweep {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Build a C_max oracle table for an instance set
    Oracle {
        /// Output file for the table
        #[arg(long)]
        table: PathBuf,
        /// Keep the configured solver for every size instead of exact
        /// search up to n=24 and annealing above
        #[arg(long)]
        use_solver: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-emit beta.tsv and time.tsv from a saved report.json
    Plotdata {
        #[arg(long)]
        report: PathBuf,
        /// Defaults to the report's directory
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// Flags mirroring the config keys; flags override the config file.
#[derive(Args)]
struct RunArgs {
    /// Config file in `key = value` form
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    solver: Option<String>,
    /// Solver parameter as key=value, repeatable
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    step: Option<String>,
    #[arg(long)]
    max: Option<String>,
    /// Instances per size
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    beta_star: Option<String>,
    /// `approx` or `oracle:<path>`
    #[arg(long)]
    cmax: Option<String>,
    /// `n2/8` or `exact`
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long, conflicts_with = "quota")]
    budget_ms: Option<String>,
    /// Deterministic iteration quota instead of a wall-clock budget
    #[arg(long)]
    quota: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    seed_base: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    time_cap_ms: Option<String>,
    /// Root directory for run directories
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    remote_url: Option<String>,
    #[arg(long)]
    remote_timeout_ms: Option<String>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        let flags = [
            ("solver", &self.solver),
            ("start", &self.start),
            ("step", &self.step),
            ("max", &self.max),
            ("m", &self.m),
            ("beta_star", &self.beta_star),
            ("cmax", &self.cmax),
            ("baseline", &self.baseline),
            ("budget_ms", &self.budget_ms),
            ("quota", &self.quota),
            ("seed", &self.seed),
            ("seed_base", &self.seed_base),
            ("workers", &self.workers),
            ("time_cap_ms", &self.time_cap_ms),
            ("out", &self.out),
            ("remote.url", &self.remote_url),
            ("remote.timeout_ms", &self.remote_timeout_ms),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        for p in &self.params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::config(format!("--param expects key=value, got {p:?}")))?;
            config.set(&format!("param.{}", k.trim()), v.trim())?;
        }
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { n, p, seed, out } => {
            let graph = generate_er_graph(n, p, seed)?;
            match out {
                Some(path) => fs::write(&path, graph.to_text()).map_err(|e| Error::file(&path, e))?,
                None => print!("{}", graph.to_text()),
            }
        }
        Command::Solve { graph, run } => {
            let config = run.load()?;
            let text = fs::read_to_string(&graph).map_err(|e| Error::file(&graph, e))?;
            let instance = GraphInstance::parse(&text)?;
            let solver = config.build_solver()?;
            let budget = config.budget()?;
            solver.validate_budget(&budget)?;
            let result = solve(solver.as_ref(), &instance, budget);
            println!("{}", serde_json::to_string_pretty(&result)?);
        }
        Command::Sweep { run } => {
            let config = run.load()?;
            let mut progress = |r: &qscore::protocol::SizeRecord| {
                eprintln!(
                    "n={:<6} beta={:.4} mean_cut={:.2} no_result={}",
                    r.n, r.beta, r.mean_cut, r.no_result_count
                );
            };
            let (report, dir) = config.run(Some(&mut progress))?;
            println!("Q-score: {}", report.qscore);
            println!("stop reason: {}", report.stop_reason);
            println!("report: {}", dir.display());
        }
        Command::Oracle {
            table,
            use_solver,
            run,
        } => {
            let config = run.load()?;
            let schedule: Schedule = config.schedule()?;
            let budget = config.budget()?;
            let sizes: Vec<usize> = schedule.sizes().collect();
            // Built up front so configuration errors surface before any work.
            let configured = config.build_solver()?;
            configured.validate_budget(&budget)?;
            let pick = |n: usize| -> Box<dyn Solver> {
                if use_solver {
                    config.build_solver().expect("validated above")
                } else {
                    default_oracle_solver(n)
                }
            };
            let oracle = build_oracle(
                &pick,
                &sizes,
                config.m_instances,
                budget,
                config.seed_base,
                config.workers,
            )?;
            fs::write(&table, oracle.to_json()).map_err(|e| Error::file(&table, e))?;
            for (n, c) in &oracle.cmax {
                println!("{n}\t{c}");
            }
        }
        Command::Plotdata { report, out_dir } => {
            let loaded = read_report(&report)?;
            let dir = out_dir
                .or_else(|| report.parent().map(PathBuf::from))
                .unwrap_or_default();
            fs::create_dir_all(&dir).map_err(|e| Error::file(&dir, e))?;
            write_plotdata(&loaded, &dir)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
