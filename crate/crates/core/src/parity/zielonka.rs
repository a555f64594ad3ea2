use super::attractor::Arena;
use super::{ParityError, ParityGame, Solution, StateId, NO_MOVE};
use crate::model::Player;

/// Zielonka's recursive algorithm with positional strategies for both
/// players. The second recursive call of the textbook version is unrolled
/// into a loop, so recursion depth is bounded by the number of priorities.
pub fn solve_zielonka(g: &ParityGame) -> Result<Solution, ParityError> {
    g.check()?;
    let mut solver = Zielonka {
        arena: Arena::new(g),
        winner: vec![Player::One; g.len()],
        strategy: vec![NO_MOVE; g.len()],
    };
    let all: Vec<StateId> = (0..g.len() as StateId).collect();
    solver.solve(all);
    let Zielonka {
        winner,
        mut strategy,
        ..
    } = solver;
    // keep choices only where the owner wins
    for s in 0..g.len() {
        if g.owner[s] != winner[s] {
            strategy[s] = NO_MOVE;
        }
    }
    Ok(Solution { winner, strategy })
}

struct Zielonka<'g> {
    arena: Arena<'g>,
    winner: Vec<Player>,
    strategy: Vec<StateId>,
}

impl Zielonka<'_> {
    /// Solves the subgame induced by `states`, which must be closed under
    /// "some successor stays inside" for every state.
    fn solve(&mut self, mut states: Vec<StateId>) {
        let g = self.arena.g;
        let token = self.arena.fresh_token();
        while !states.is_empty() {
            self.arena.stamp_all(&states, token);
            let top = states
                .iter()
                .map(|&s| g.priority[s as usize])
                .max()
                .unwrap();
            let alpha = Player::from_parity(top);
            let beta = alpha.opponent();
            let top_states: Vec<StateId> = states
                .iter()
                .copied()
                .filter(|&s| g.priority[s as usize] == top)
                .collect();
            let attr = self
                .arena
                .attract(token, alpha, &top_states, &mut self.strategy);
            let attr_token = self.arena.fresh_token();
            self.arena.stamp_all(&attr, attr_token);
            let rest: Vec<StateId> = states
                .iter()
                .copied()
                .filter(|&s| self.arena.stamp[s as usize] == token)
                .collect();
            self.solve(rest.clone());
            self.arena.stamp_all(&states, token);
            let beta_won: Vec<StateId> = rest
                .iter()
                .copied()
                .filter(|&s| self.winner[s as usize] == beta)
                .collect();
            if beta_won.is_empty() {
                for &s in &top_states {
                    if g.owner[s as usize] == alpha {
                        let inside = g
                            .succ(s)
                            .iter()
                            .copied()
                            .find(|&t| self.arena.stamp[t as usize] == token)
                            .expect("subgame state without successor inside");
                        self.strategy[s as usize] = inside;
                    }
                }
                for &s in &states {
                    self.winner[s as usize] = alpha;
                }
                return;
            }
            let lost = self
                .arena
                .attract(token, beta, &beta_won, &mut self.strategy);
            let lost_token = self.arena.fresh_token();
            for &s in &lost {
                self.winner[s as usize] = beta;
                self.arena.stamp[s as usize] = lost_token;
            }
            states.retain(|&s| self.arena.stamp[s as usize] == token);
        }
    }
}
