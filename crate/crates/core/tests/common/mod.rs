//! A minimal HTTP solver service on loopback for exercising the remote client.

#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;
use std::time::Duration;

use qscore::remote::SolveRequest;
use qscore::solvers::{solve_qubo, AnnealingSolver};
use qscore::Qubo;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug)]
pub enum Behavior {
    /// Runs in-process simulated annealing and answers truthfully.
    Honest,
    /// Answers with a correct assignment but an energy off by one.
    WrongEnergy,
    /// Sleeps this long before answering honestly.
    Slow(Duration),
    /// Answers `no_result`.
    Refuse,
}

pub struct LoopbackServer {
    pub url: String,
}

/// Starts a server thread that lives until the test process exits.
pub fn spawn(behavior: Behavior) -> LoopbackServer {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
    let url = format!("http://{}", listener.local_addr().unwrap());
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { continue };
            thread::spawn(move || {
                let _ = handle(stream, behavior);
            });
        }
    });
    LoopbackServer { url }
}

/// A port with nothing listening on it.
pub fn closed_port_url() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    drop(listener);
    url
}

fn handle(stream: TcpStream, behavior: Behavior) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut length = 0usize;
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let post_solve = line.starts_with("POST /solve ");
    loop {
        line.clear();
        reader.read_line(&mut line)?;
        let header = line.trim_end();
        if header.is_empty() {
            break;
        }
        if let Some((k, v)) = header.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; length];
    reader.read_exact(&mut body)?;

    let (status, reply) = if post_solve {
        (200, answer(&body, behavior))
    } else {
        (404, json!({"error": "not found"}))
    };
    let text = reply.to_string();
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {status} OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
        text.len()
    )?;
    stream.flush()
}

fn answer(body: &[u8], behavior: Behavior) -> Value {
    let request: SolveRequest = match serde_json::from_slice(body) {
        Ok(r) => r,
        Err(e) => return json!({"status": "no_result", "reason": format!("bad request: {e}")}),
    };
    match behavior {
        Behavior::Refuse => return json!({"status": "no_result", "reason": "refused"}),
        Behavior::Slow(d) => thread::sleep(d),
        Behavior::Honest | Behavior::WrongEnergy => {}
    }
    let qubo = match Qubo::from_json(request.qubo.clone()) {
        Ok(q) => q,
        Err(e) => return json!({"status": "no_result", "reason": e.to_string()}),
    };
    let budget = match request.budget() {
        Ok(b) => b,
        Err(e) => return json!({"status": "no_result", "reason": e.to_string()}),
    };
    let run = solve_qubo(&AnnealingSolver::default(), &qubo, budget);
    match (run.best, run.energy) {
        (Some(best), Some(energy)) => {
            let claimed = match behavior {
                Behavior::WrongEnergy => energy - 1,
                _ => energy,
            };
            json!({"assignment": best, "energy": claimed})
        }
        _ => json!({"status": "no_result", "reason": run.reason.unwrap_or_default()}),
    }
}
