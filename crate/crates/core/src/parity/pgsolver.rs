//! PGSolver text format: a `parity <max-id>;` header followed by one line
//! `<id> <priority> <owner> <succ,...> "<label>";` per state. Owner 0 is the
//! even player (player 1 here).

use std::fmt::Write as _;

use thiserror::Error;

use super::{ParityGame, StateId};
use crate::model::Player;

pub fn write_pgsolver(g: &ParityGame, label: impl Fn(StateId) -> String) -> String {
    let mut out = String::new();
    let max_id = g.len().saturating_sub(1);
    writeln!(out, "parity {max_id};").unwrap();
    for s in 0..g.len() as StateId {
        let succ: Vec<String> = g.succ(s).iter().map(|t| t.to_string()).collect();
        let label = label(s).replace('\\', "\\\\").replace('"', "\\\"");
        writeln!(
            out,
            "{} {} {} {} \"{}\";",
            s,
            g.priority[s as usize],
            g.owner[s as usize].index(),
            succ.join(","),
            label
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct PgSolverError {
    pub line: usize,
    pub message: String,
}

/// Reads a game written by [`write_pgsolver`] (or any PGSolver file whose
/// ids are `0..=max-id`). Returns the game and the state labels.
pub fn read_pgsolver(text: &str) -> Result<(ParityGame, Vec<String>), PgSolverError> {
    let err = |line: usize, message: &str| PgSolverError {
        line,
        message: message.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let max_id: usize = header
        .trim()
        .strip_prefix("parity")
        .and_then(|r| r.trim().strip_suffix(';'))
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| err(hl + 1, "expected 'parity <max-id>;'"))?;
    let n = max_id + 1;
    let mut owner = vec![None; n];
    let mut priority = vec![0; n];
    let mut succ = vec![Vec::new(); n];
    let mut labels = vec![String::new(); n];
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        let body = line
            .strip_suffix(';')
            .ok_or_else(|| err(lineno, "missing ';'"))?;
        let (fields, label) = match body.find('"') {
            Some(q) => {
                let raw = body[q..]
                    .strip_prefix('"')
                    .and_then(|r| r.strip_suffix('"'))
                    .ok_or_else(|| err(lineno, "unterminated label"))?;
                (&body[..q], raw.replace("\\\"", "\"").replace("\\\\", "\\"))
            }
            None => (body, String::new()),
        };
        let parts: Vec<&str> = fields.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(err(
                lineno,
                "expected '<id> <priority> <owner> <successors>'",
            ));
        }
        let id: usize = parts[0].parse().map_err(|_| err(lineno, "bad state id"))?;
        if id >= n {
            return Err(err(lineno, "state id exceeds header"));
        }
        if owner[id].is_some() {
            return Err(err(lineno, "duplicate state id"));
        }
        priority[id] = parts[1].parse().map_err(|_| err(lineno, "bad priority"))?;
        owner[id] = Some(match parts[2] {
            "0" => Player::One,
            "1" => Player::Two,
            _ => return Err(err(lineno, "owner must be 0 or 1")),
        });
        succ[id] = parts[3]
            .split(',')
            .map(|t| t.parse::<StateId>().ok().filter(|&t| (t as usize) < n))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| err(lineno, "bad successor list"))?;
        labels[id] = label;
    }
    let owner = owner
        .into_iter()
        .enumerate()
        .map(|(i, o)| o.ok_or_else(|| err(0, &format!("state {i} is never defined"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((ParityGame::from_lists(owner, priority, &succ), labels))
}
