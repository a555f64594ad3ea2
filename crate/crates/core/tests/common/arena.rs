//! Random parity games.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use timed_parity::model::Player;
use timed_parity::parity::{ParityGame, StateId};

/// A game with at most `max_states` states, priorities below `priorities`
/// and one to three successors per state.
pub fn random_parity_game(rng: &mut ChaCha8Rng, max_states: usize, priorities: u32) -> ParityGame {
    let n = rng.random_range(1..=max_states);
    let mut owner = Vec::new();
    let mut prio = Vec::new();
    let mut succ = Vec::new();
    for _ in 0..n {
        owner.push(if rng.random_bool(0.5) {
            Player::One
        } else {
            Player::Two
        });
        prio.push(rng.random_range(0..priorities));
        let k = rng.random_range(1..=3.min(n));
        let mut s: Vec<StateId> = (0..k).map(|_| rng.random_range(0..n) as StateId).collect();
        s.sort_unstable();
        s.dedup();
        succ.push(s);
    }
    ParityGame::from_lists(owner, prio, &succ)
}
