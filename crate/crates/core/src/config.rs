//! Run configuration in a flat `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! solver = sa
//! param.cooling = 0.99       # solver parameter overrides
//! start = 100
//! step = 100
//! max = 10000
//! m = 100                    # instances per size
//! beta_star = 0.2
//! cmax = approx              # or oracle:<path to oracle table>
//! baseline = n2/8            # or exact, i.e. n(n-1)/8
//! budget_ms = 60000          # wall-clock budget per instance ...
//! # quota = 1000             # ... or a deterministic iteration quota
//! seed = 0                   # solver seed
//! seed_base = 0              # instance seeds are seed_base + index
//! workers = 1
//! time_cap_ms = 100000
//! out = runs
//! remote.url = http://127.0.0.1:8080/solve
//! remote.timeout_ms = 65000
//! ```
//!
//! Unknown keys are rejected. The remote bearer token is read from the
//! `QSCORE_REMOTE_TOKEN` environment variable only.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::protocol::{
    run_sweep, BetaParams, Baseline, CmaxMode, OracleTable, Schedule, SizeRecord, SweepOptions,
    SweepReport, DEFAULT_TIME_CAP_MS, PROTOCOL_BUDGET_MS,
};
use crate::report::{run_directory, write_report};
use crate::remote::{RemoteSolver, RemoteSolverEndpoint};
use crate::solvers::{build_solver, Solver, SolverBudget};

pub const TOKEN_ENV: &str = "QSCORE_REMOTE_TOKEN";

#[derive(Clone, Debug, PartialEq)]
pub enum CmaxSource {
    Approximation,
    Oracle(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum BudgetSpec {
    WallClockMs(u64),
    Quota(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub solver: String,
    pub solver_params: Vec<(String, String)>,
    pub start: usize,
    pub step: usize,
    pub max: usize,
    pub m_instances: usize,
    pub beta_star: f64,
    pub cmax: CmaxSource,
    pub baseline: Baseline,
    pub budget: BudgetSpec,
    pub seed: u64,
    pub seed_base: u64,
    pub workers: usize,
    pub time_cap_ms: f64,
    pub out: PathBuf,
    pub remote_url: Option<String>,
    pub remote_timeout_ms: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            solver: "sa".into(),
            solver_params: Vec::new(),
            start: 100,
            step: 100,
            max: 100_000,
            m_instances: 100,
            beta_star: 0.2,
            cmax: CmaxSource::Approximation,
            baseline: Baseline::QuarterSquare,
            budget: BudgetSpec::WallClockMs(PROTOCOL_BUDGET_MS),
            seed: 0,
            seed_base: 0,
            workers: 1,
            time_cap_ms: DEFAULT_TIME_CAP_MS,
            out: PathBuf::from("runs"),
            remote_url: None,
            remote_timeout_ms: None,
        }
    }
}

fn value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::config(format!("bad value {raw:?} for {key}")))
}

impl RunConfig {
    /// Parses a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(idx + 1, format!("expected key = value, got {line:?}")))?;
            config
                .set(key.trim(), val.trim())
                .map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        }
        Ok(config)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        if let Some(param) = key.strip_prefix("param.") {
            self.solver_params.retain(|(k, _)| k != param);
            self.solver_params.push((param.to_string(), raw.to_string()));
            return Ok(());
        }
        match key {
            "solver" => self.solver = raw.to_string(),
            "start" => self.start = value(key, raw)?,
            "step" => self.step = value(key, raw)?,
            "max" => self.max = value(key, raw)?,
            "m" => self.m_instances = value(key, raw)?,
            "beta_star" => self.beta_star = value(key, raw)?,
            "cmax" => {
                self.cmax = match raw {
                    "approx" | "approximation" => CmaxSource::Approximation,
                    other => match other.strip_prefix("oracle:") {
                        Some(path) if !path.is_empty() => CmaxSource::Oracle(PathBuf::from(path)),
                        _ => return Err(Error::config(format!("bad cmax {other:?}"))),
                    },
                }
            }
            "baseline" => self.baseline = raw.parse()?,
            "budget_ms" => self.budget = BudgetSpec::WallClockMs(value(key, raw)?),
            "quota" => self.budget = BudgetSpec::Quota(value(key, raw)?),
            "seed" => self.seed = value(key, raw)?,
            "seed_base" => self.seed_base = value(key, raw)?,
            "workers" => self.workers = value(key, raw)?,
            "time_cap_ms" => self.time_cap_ms = value(key, raw)?,
            "out" => self.out = PathBuf::from(raw),
            "remote.url" => self.remote_url = Some(raw.to_string()),
            "remote.timeout_ms" => self.remote_timeout_ms = Some(value(key, raw)?),
            other => return Err(Error::config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Effective settings, defaults included, solver defaults expanded.
    pub fn to_map(&self) -> Result<BTreeMap<String, String>> {
        let mut map = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            map.insert(k.to_string(), v);
        };
        put("solver", self.solver.clone());
        put("start", self.start.to_string());
        put("step", self.step.to_string());
        put("max", self.max.to_string());
        put("m", self.m_instances.to_string());
        put("beta_star", self.beta_star.to_string());
        put(
            "cmax",
            match &self.cmax {
                CmaxSource::Approximation => "approx".into(),
                CmaxSource::Oracle(p) => format!("oracle:{}", p.display()),
            },
        );
        put(
            "baseline",
            match self.baseline {
                Baseline::QuarterSquare => "n2/8".into(),
                Baseline::Exact => "exact".into(),
            },
        );
        match self.budget {
            BudgetSpec::WallClockMs(ms) => put("budget_ms", ms.to_string()),
            BudgetSpec::Quota(q) => put("quota", q.to_string()),
        }
        put("seed", self.seed.to_string());
        put("seed_base", self.seed_base.to_string());
        put("workers", self.workers.to_string());
        put("time_cap_ms", self.time_cap_ms.to_string());
        put("out", self.out.display().to_string());
        if let Some(url) = &self.remote_url {
            put("remote.url", url.clone());
        }
        if let Some(t) = self.remote_timeout_ms {
            put("remote.timeout_ms", t.to_string());
        }
        for (k, v) in self.build_solver()?.params() {
            map.insert(format!("param.{k}"), v);
        }
        Ok(map)
    }

    pub fn to_text(&self) -> Result<String> {
        Ok(self
            .to_map()?
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect())
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule()?;
        self.beta_params_without_oracle().validate()?;
        self.budget()?;
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        if !(self.time_cap_ms > 0.0) {
            return Err(Error::config("time_cap_ms must be positive"));
        }
        let solver = self.build_solver()?;
        solver.validate_budget(&self.budget()?)
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::new(self.start, self.step, self.max)
    }

    pub fn budget(&self) -> Result<SolverBudget> {
        match self.budget {
            BudgetSpec::WallClockMs(ms) => SolverBudget::wall_clock(ms, self.seed),
            BudgetSpec::Quota(q) => SolverBudget::deterministic(q, self.seed),
        }
        .map_err(|e| Error::config(e.to_string()))
    }

    fn beta_params_without_oracle(&self) -> BetaParams {
        BetaParams {
            beta_star: self.beta_star,
            m_instances: self.m_instances,
            cmax_mode: CmaxMode::Approximation,
            baseline: self.baseline,
        }
    }

    /// β parameters, loading the oracle table if one is configured.
    pub fn beta_params(&self) -> Result<BetaParams> {
        let mut params = self.beta_params_without_oracle();
        if let CmaxSource::Oracle(path) = &self.cmax {
            let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
            params.cmax_mode = CmaxMode::Oracle(OracleTable::from_json(&text)?);
        }
        Ok(params)
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            workers: self.workers,
            time_cap_ms: self.time_cap_ms,
        }
    }

    /// Runs the configured sweep and writes its report into a fresh run
    /// directory under `out`. Returns the report and that directory.
    pub fn run(
        &self,
        progress: Option<&mut dyn FnMut(&SizeRecord)>,
    ) -> Result<(SweepReport, PathBuf)> {
        self.validate()?;
        let params = self.beta_params()?;
        let solver = self.build_solver()?;
        let mut report = run_sweep(
            solver.as_ref(),
            self.schedule()?,
            &params,
            self.budget()?,
            self.seed_base,
            &self.sweep_options(),
            progress,
        )?;
        let config = self.to_map()?;
        let text = self.to_text()?;
        report.config = Some(config);
        let dir = run_directory(&self.out, &text)?;
        std::fs::write(dir.join("config.txt"), &text).map_err(|e| Error::file(dir.join("config.txt"), e))?;
        write_report(&report, &dir)?;
        Ok((report, dir))
    }

    pub fn build_solver(&self) -> Result<Box<dyn Solver>> {
        if self.solver == "remote" {
            let url = self
                .remote_url
                .clone()
                .ok_or_else(|| Error::config("solver remote needs remote.url"))?;
            let budget_ms = match self.budget {
                BudgetSpec::WallClockMs(ms) => ms,
                BudgetSpec::Quota(_) => 0,
            };
            let timeout_ms = self
                .remote_timeout_ms
                .unwrap_or(budget_ms + RemoteSolverEndpoint::MIN_MARGIN_MS);
            let endpoint = RemoteSolverEndpoint {
                url,
                token: std::env::var(TOKEN_ENV).ok(),
                timeout_ms,
            };
            if let Some((k, _)) = self.solver_params.first() {
                return Err(Error::config(format!("solver remote takes no parameter {k:?}")));
            }
            return Ok(Box::new(RemoteSolver::new(endpoint)));
        }
        build_solver(&self.solver, &self.solver_params)
    }
}
