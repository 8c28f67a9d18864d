//! Client for solvers running behind a JSON-over-HTTP endpoint.
//!
//! One `POST <base>/solve` per instance. The body is the QUBO JSON form
//! (`{"n", "constant", "terms"}`) plus:
//!
//! - `time_limit_ms`: the per-instance budget,
//! - `seed`: the run seed,
//! - `iteration_quota`: present only for deterministic budgets.
//!
//! The server answers `{"assignment": [0, 1, ...], "energy": e}` or
//! `{"status": "no_result", "reason": "..."}`. Every returned assignment is
//! re-evaluated locally; nothing the server claims reaches a report unchecked.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::qubo::{Qubo, QuboJson};
use crate::solvers::{BudgetMode, SolveContext, Solver, SolverBudget, SolverOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemoteSolverEndpoint {
    pub url: String,
    pub token: Option<String>,
    pub timeout_ms: u64,
}

impl RemoteSolverEndpoint {
    /// Slack between the solver budget and the HTTP timeout.
    pub const MIN_MARGIN_MS: u64 = 1000;

    pub fn new(url: impl Into<String>, timeout_ms: u64) -> Self {
        RemoteSolverEndpoint {
            url: url.into(),
            token: None,
            timeout_ms,
        }
    }

    pub fn solve_url(&self) -> String {
        format!("{}/solve", self.url.trim_end_matches('/'))
    }

    /// Time limit sent to the server for `budget`.
    pub fn time_limit_ms(&self, budget: &SolverBudget) -> u64 {
        budget
            .wall_clock_ms()
            .unwrap_or(self.timeout_ms.saturating_sub(Self::MIN_MARGIN_MS).max(1))
    }
}

/// Request body of the wire protocol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveRequest {
    #[serde(flatten)]
    pub qubo: QuboJson<i64>,
    pub time_limit_ms: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration_quota: Option<u64>,
}

impl SolveRequest {
    /// The budget a server should apply when it runs a local solver.
    pub fn budget(&self) -> Result<SolverBudget> {
        match self.iteration_quota {
            Some(q) => SolverBudget::deterministic(q, self.seed),
            None => SolverBudget::wall_clock(self.time_limit_ms, self.seed),
        }
    }
}

/// Successful response body.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResponse {
    pub assignment: Assignment,
    pub energy: f64,
}

pub struct RemoteSolver {
    endpoint: RemoteSolverEndpoint,
    agent: ureq::Agent,
}

impl RemoteSolver {
    pub fn new(endpoint: RemoteSolverEndpoint) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(endpoint.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteSolver { endpoint, agent }
    }

    pub fn endpoint(&self) -> &RemoteSolverEndpoint {
        &self.endpoint
    }

    fn call(&self, request: &SolveRequest) -> std::result::Result<Value, String> {
        let mut post = self
            .agent
            .post(&self.endpoint.solve_url())
            .header("Content-Type", "application/json");
        if let Some(token) = &self.endpoint.token {
            post = post.header("Authorization", format!("Bearer {token}"));
        }
        let mut response = post.send_json(request).map_err(describe)?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(format!("transport: http status {status}"));
        }
        response
            .body_mut()
            .read_json::<Value>()
            .map_err(|e| match describe(e) {
                r if r.starts_with("timeout") => r,
                r => format!("malformed response: {r}"),
            })
    }
}

fn describe(e: ureq::Error) -> String {
    match e {
        ureq::Error::Timeout(t) => format!("timeout: {t}"),
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => {
            format!("timeout: {io}")
        }
        other => format!("transport: {other}"),
    }
}

/// Checks a response against the QUBO it answers.
pub fn validate_response(qubo: &Qubo<i64>, body: Value) -> SolverOutcome {
    if body.get("status").and_then(Value::as_str) == Some("no_result") {
        let reason = body
            .get("reason")
            .and_then(Value::as_str)
            .unwrap_or("unspecified");
        return SolverOutcome::no_result(format!("remote: {reason}"));
    }
    let response: SolveResponse = match serde_json::from_value(body) {
        Ok(r) => r,
        Err(e) => return SolverOutcome::no_result(format!("malformed response: {e}")),
    };
    if response.assignment.len() != qubo.n() {
        return SolverOutcome::no_result(format!(
            "malformed response: assignment length {} for n={}",
            response.assignment.len(),
            qubo.n()
        ));
    }
    let local = match qubo.energy(&response.assignment) {
        Ok(e) => e as f64,
        Err(e) => return SolverOutcome::no_result(format!("malformed response: {e}")),
    };
    if (local - response.energy).abs() > 1e-6 * local.abs().max(1.0) {
        return SolverOutcome::no_result(format!(
            "energy mismatch: claimed {}, recomputed {local}",
            response.energy
        ));
    }
    // The server decides when it is done; a valid answer counts as completed.
    SolverOutcome::completed(response.assignment)
}

impl Solver for RemoteSolver {
    fn name(&self) -> &'static str {
        "remote"
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("url".into(), self.endpoint.url.clone()),
            ("timeout_ms".into(), self.endpoint.timeout_ms.to_string()),
        ]
    }

    fn validate_budget(&self, budget: &SolverBudget) -> Result<()> {
        budget.validate()?;
        let needed = budget.wall_clock_ms().unwrap_or(0) + RemoteSolverEndpoint::MIN_MARGIN_MS;
        if self.endpoint.timeout_ms < needed {
            return Err(Error::config(format!(
                "remote timeout {} ms is below budget plus margin ({needed} ms)",
                self.endpoint.timeout_ms
            )));
        }
        Ok(())
    }

    fn solve_qubo(&self, qubo: &Qubo<i64>, ctx: &mut SolveContext<'_>) -> SolverOutcome {
        let budget = *ctx.budget();
        let request = SolveRequest {
            qubo: qubo.to_json(),
            time_limit_ms: self.endpoint.time_limit_ms(&budget),
            seed: budget.seed(),
            iteration_quota: match budget.mode() {
                BudgetMode::Deterministic { quota } => Some(quota),
                BudgetMode::WallClock { .. } => None,
            },
        };
        match self.call(&request) {
            Ok(body) => validate_response(qubo, body),
            Err(reason) => SolverOutcome::no_result(reason),
        }
    }
}
