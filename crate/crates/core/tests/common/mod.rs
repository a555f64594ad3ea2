//! Random small games shared by the integration tests.

#![allow(dead_code)]

pub mod arena;
pub mod lasso;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timed_parity::model::{Atom, Constraint, Edge, Game, Location, Player, Q};
use timed_parity::robust::StartState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of the generated games.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_locations: usize,
    pub max_clocks: usize,
    pub max_constant: i64,
    /// Only strict comparisons, so every guard and invariant is open.
    pub open: bool,
}

pub const SMALL: Shape = Shape {
    max_locations: 3,
    max_clocks: 2,
    max_constant: 2,
    open: false,
};

pub const SMALL_OPEN: Shape = Shape {
    open: true,
    ..SMALL
};

fn atom(rng: &mut ChaCha8Rng, clocks: usize, shape: Shape) -> Constraint {
    let x = rng.random_range(0..clocks);
    let d = Q::from_integer(rng.random_range(0..=shape.max_constant));
    let kinds: &[u8] = if shape.open { &[2, 3] } else { &[0, 1, 2, 3] };
    let a = match kinds.choose(rng).unwrap() {
        0 => Atom::Le(x, d),
        1 => Atom::Ge(x, d),
        2 => Atom::Lt(x, d),
        _ => Atom::Gt(x, d),
    };
    a.into_constraint()
}

fn conjunction(rng: &mut ChaCha8Rng, clocks: usize, shape: Shape, max_atoms: usize) -> Constraint {
    let n = rng.random_range(0..=max_atoms);
    Constraint::all((0..n).map(|_| atom(rng, clocks, shape)))
}

/// An upper bound or nothing: invariants that cannot trap the start state.
fn invariant(rng: &mut ChaCha8Rng, clocks: usize, shape: Shape) -> Constraint {
    if rng.random_bool(0.7) {
        return Constraint::True;
    }
    let x = rng.random_range(0..clocks);
    let d = rng.random_range(1..=shape.max_constant);
    if shape.open || rng.random_bool(0.5) {
        Constraint::lt(x, d)
    } else {
        Constraint::le(x, d)
    }
}

/// A random game with conjunctive guards and invariants, and a start state
/// satisfying the start location's invariant.
pub fn random_game(rng: &mut ChaCha8Rng, shape: Shape) -> (Game, StartState) {
    let nc = rng.random_range(1..=shape.max_clocks);
    let nl = rng.random_range(1..=shape.max_locations);
    let clocks: Vec<String> = ["x", "y", "w"][..nc]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let locations: Vec<Location> = (0..nl)
        .map(|i| Location {
            name: format!("l{i}"),
            invariant: if i == 0 {
                Constraint::True
            } else {
                invariant(rng, nc, shape)
            },
            priority: rng.random_range(0..=2),
        })
        .collect();
    let mut edges = Vec::new();
    for from in 0..nl {
        for player in [Player::One, Player::Two] {
            for _ in 0..rng.random_range(0..=2) {
                let mut resets: Vec<usize> = (0..nc).filter(|_| rng.random_bool(0.4)).collect();
                let to = rng.random_range(0..nl);
                // well-formedness is the caller's promise: an edge that is
                // enabled always lands inside the target invariant
                for (x, _) in locations[to].invariant.atoms() {
                    if !resets.contains(&x) {
                        resets.push(x);
                    }
                }
                resets.sort_unstable();
                edges.push(Edge {
                    action: format!("a{}", edges.len()),
                    player,
                    from,
                    to,
                    guard: conjunction(rng, nc, shape, 2),
                    resets,
                });
            }
        }
    }
    let halves = [0, 1, 2, 3, 4, 5];
    let valuation = (0..nc)
        .map(|_| Q::new(*halves.choose(rng).unwrap(), 2))
        .collect();
    let g = Game {
        clocks,
        locations,
        edges,
    };
    (
        g,
        StartState {
            location: 0,
            valuation,
        },
    )
}
