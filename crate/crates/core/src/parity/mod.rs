//! Finite turn-based parity games under the max-parity convention: player 1
//! wins a play when the largest priority seen infinitely often is even.

mod attractor;
pub mod pgsolver;
mod scc;
mod spm;
mod verify;
mod zielonka;

use thiserror::Error;

use crate::model::Player;

pub use attractor::attractor;
pub use spm::{solve_spm, solve_spm_one_sided};
pub use verify::{verify_strategy, StrategyViolation};
pub use zielonka::solve_zielonka;

pub type StateId = u32;

/// Sentinel for "no strategy choice".
pub const NO_MOVE: StateId = StateId::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParityError {
    #[error("state {0} has no successor")]
    MalformedGame(StateId),
}

/// Game graph in compressed adjacency form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    offsets: Vec<u32>,
    targets: Vec<StateId>,
}

impl ParityGame {
    pub fn new() -> ParityGame {
        ParityGame {
            offsets: vec![0],
            ..Default::default()
        }
    }

    pub fn from_lists(owner: Vec<Player>, priority: Vec<u32>, succ: &[Vec<StateId>]) -> ParityGame {
        assert_eq!(owner.len(), priority.len());
        assert_eq!(owner.len(), succ.len());
        let mut g = ParityGame::new();
        for (i, s) in succ.iter().enumerate() {
            g.push_state(owner[i], priority[i], s);
        }
        g
    }

    /// Appends a state; successor ids may refer to states added later.
    pub fn push_state(&mut self, owner: Player, priority: u32, succ: &[StateId]) -> StateId {
        let id = self.owner.len() as StateId;
        self.owner.push(owner);
        self.priority.push(priority);
        self.targets.extend_from_slice(succ);
        self.offsets.push(self.targets.len() as u32);
        id
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn succ(&self, s: StateId) -> &[StateId] {
        let s = s as usize;
        &self.targets[self.offsets[s] as usize..self.offsets[s + 1] as usize]
    }

    pub fn max_priority(&self) -> u32 {
        self.priority.iter().copied().max().unwrap_or(0)
    }

    /// Distinct priorities in use, ascending.
    pub fn priorities(&self) -> Vec<u32> {
        let mut p = self.priority.clone();
        p.sort_unstable();
        p.dedup();
        p
    }

    pub fn check(&self) -> Result<(), ParityError> {
        for s in 0..self.len() as StateId {
            if self.succ(s).is_empty() {
                return Err(ParityError::MalformedGame(s));
            }
            debug_assert!(self.succ(s).iter().all(|&t| (t as usize) < self.len()));
        }
        Ok(())
    }

    /// Predecessor lists in compressed form `(offsets, sources)`.
    pub(crate) fn reverse(&self) -> (Vec<u32>, Vec<StateId>) {
        let n = self.len();
        let mut count = vec![0u32; n + 1];
        for &t in &self.targets {
            count[t as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut sources = vec![0; self.targets.len()];
        for s in 0..n as StateId {
            for &t in self.succ(s) {
                sources[fill[t as usize] as usize] = s;
                fill[t as usize] += 1;
            }
        }
        (count, sources)
    }

    /// Same graph with every priority shifted by `delta`.
    pub fn shifted(&self, delta: u32) -> ParityGame {
        let mut g = self.clone();
        for p in &mut g.priority {
            *p += delta;
        }
        g
    }

    /// Whether every edge connects states of different owners, ignoring the
    /// states listed in `exempt` (and edges into them).
    pub fn is_bipartite_except(&self, exempt: &[StateId]) -> bool {
        (0..self.len() as StateId)
            .filter(|s| !exempt.contains(s))
            .all(|s| {
                self.succ(s)
                    .iter()
                    .filter(|t| !exempt.contains(t))
                    .all(|&t| self.owner[t as usize] != self.owner[s as usize])
            })
    }
}

/// Winner of every state and positional strategies for both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// Chosen successor at states owned by the winning player, `NO_MOVE` elsewhere.
    pub strategy: Vec<StateId>,
}

impl Solution {
    pub fn win(&self, p: Player) -> impl Iterator<Item = StateId> + '_ {
        self.winner
            .iter()
            .enumerate()
            .filter(move |(_, w)| **w == p)
            .map(|(s, _)| s as StateId)
    }

    pub fn win1(&self) -> Vec<StateId> {
        self.win(Player::One).collect()
    }

    pub fn win2(&self) -> Vec<StateId> {
        self.win(Player::Two).collect()
    }

    /// Strategy choice at `s`, if `s` is won by its owner.
    pub fn choice(&self, s: StateId) -> Option<StateId> {
        let t = self.strategy[s as usize];
        (t != NO_MOVE).then_some(t)
    }
}

/// Solver selection for callers that want to plug in an algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Zielonka,
    SmallProgressMeasures,
}

/// Winning sets of player 1 as a boolean mask, from the chosen algorithm.
pub fn solve_win1(g: &ParityGame, algo: Algorithm) -> Result<Vec<bool>, ParityError> {
    match algo {
        Algorithm::Zielonka => Ok(solve_zielonka(g)?
            .winner
            .iter()
            .map(|w| *w == Player::One)
            .collect()),
        Algorithm::SmallProgressMeasures => solve_spm(g),
    }
}
