use std::collections::{HashMap, VecDeque};
use std::fmt;

use petgraph::algo::kosaraju_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{ParityGame, Solution, StateId};
use crate::model::Player;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyViolation {
    /// A state won by `player` whose strategy choice is missing or invalid.
    MissingChoice { player: Player, state: StateId },
    /// A play consistent with the strategy leaves the winning region.
    Escapes {
        player: Player,
        from: StateId,
        to: StateId,
    },
    /// A cycle consistent with the strategy whose maximal priority has the
    /// wrong parity for `player`.
    LosingCycle { player: Player, cycle: Vec<StateId> },
}

impl fmt::Display for StrategyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyViolation::MissingChoice { player, state } => {
                write!(f, "player {player} has no valid choice at state {state}")
            }
            StrategyViolation::Escapes { player, from, to } => {
                write!(
                    f,
                    "winning region of player {player} is left via {from} -> {to}"
                )
            }
            StrategyViolation::LosingCycle { player, cycle } => {
                write!(f, "player {player} loses on cycle {cycle:?}")
            }
        }
    }
}

/// Independent certificate check for a solution: the partition is a
/// partition, both strategies stay in their winning regions, and every
/// cycle they allow is won by the right player.
pub fn verify_strategy(g: &ParityGame, sol: &Solution) -> Result<(), StrategyViolation> {
    for player in [Player::One, Player::Two] {
        verify_player(g, sol, player)?;
    }
    Ok(())
}

fn verify_player(g: &ParityGame, sol: &Solution, player: Player) -> Result<(), StrategyViolation> {
    let won = |s: StateId| sol.winner[s as usize] == player;
    // edges of the strategy-restricted graph inside the winning region
    let mut graph: DiGraph<StateId, ()> = DiGraph::new();
    let mut node: HashMap<StateId, NodeIndex> = HashMap::new();
    for s in 0..g.len() as StateId {
        if won(s) {
            node.insert(s, graph.add_node(s));
        }
    }
    let mut restricted: Vec<(StateId, StateId)> = Vec::new();
    for s in 0..g.len() as StateId {
        if !won(s) {
            continue;
        }
        if g.owner[s as usize] == player {
            let t = sol.strategy[s as usize];
            if !g.succ(s).contains(&t) {
                return Err(StrategyViolation::MissingChoice { player, state: s });
            }
            if !won(t) {
                return Err(StrategyViolation::Escapes {
                    player,
                    from: s,
                    to: t,
                });
            }
            restricted.push((s, t));
        } else {
            for &t in g.succ(s) {
                if !won(t) {
                    return Err(StrategyViolation::Escapes {
                        player,
                        from: s,
                        to: t,
                    });
                }
                restricted.push((s, t));
            }
        }
    }
    // a cycle with the opponent's parity as maximum exists iff, for some
    // priority p of that parity, the subgraph of states with priority <= p
    // has a strongly connected component with an internal edge through a
    // state of priority p
    let bad_parity = match player {
        Player::One => 1,
        Player::Two => 0,
    };
    for p in g
        .priorities()
        .into_iter()
        .rev()
        .filter(|p| p % 2 == bad_parity)
    {
        let mut sub = graph.clone();
        sub.clear_edges();
        for &(s, t) in &restricted {
            if g.priority[s as usize] <= p && g.priority[t as usize] <= p {
                sub.add_edge(node[&s], node[&t], ());
            }
        }
        for comp in kosaraju_scc(&sub) {
            let has_cycle = comp.len() > 1 || sub.contains_edge(comp[0], comp[0]);
            if !has_cycle {
                continue;
            }
            if let Some(&start) = comp.iter().find(|&&n| g.priority[sub[n] as usize] == p) {
                let cycle = cycle_through(&sub, start, &comp);
                return Err(StrategyViolation::LosingCycle {
                    player,
                    cycle: cycle.into_iter().map(|n| sub[n]).collect(),
                });
            }
        }
    }
    Ok(())
}

/// A simple cycle through `start` inside the component `comp`.
fn cycle_through(g: &DiGraph<StateId, ()>, start: NodeIndex, comp: &[NodeIndex]) -> Vec<NodeIndex> {
    let inside: std::collections::HashSet<NodeIndex> = comp.iter().copied().collect();
    let mut parent: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut queue = VecDeque::new();
    for n in g.neighbors(start) {
        if n == start {
            return vec![start];
        }
        if inside.contains(&n) && !parent.contains_key(&n) {
            parent.insert(n, start);
            queue.push_back(n);
        }
    }
    while let Some(u) = queue.pop_front() {
        for n in g.neighbors(u) {
            if n == start {
                let mut path = vec![u];
                let mut cur = u;
                while parent[&cur] != start {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.push(start);
                path.reverse();
                return path;
            }
            if inside.contains(&n) && !parent.contains_key(&n) {
                parent.insert(n, u);
                queue.push_back(n);
            }
        }
    }
    unreachable!("component without a cycle through its member")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parity::{solve_zielonka, NO_MOVE};

    #[test]
    fn mutated_strategy_is_caught() {
        let g = ParityGame::from_lists(
            vec![Player::One, Player::Two, Player::Two],
            vec![0, 1, 2],
            &[vec![1, 2], vec![0], vec![0]],
        );
        let mut sol = solve_zielonka(&g).unwrap();
        assert_eq!(sol.win1(), vec![0, 1, 2]);
        assert_eq!(verify_strategy(&g, &sol), Ok(()));
        assert_eq!(sol.choice(0), Some(2));
        sol.strategy[0] = 1;
        assert!(matches!(
            verify_strategy(&g, &sol),
            Err(StrategyViolation::LosingCycle { cycle, .. }) if cycle == vec![1, 0]
        ));
        sol.strategy[0] = NO_MOVE;
        assert!(verify_strategy(&g, &sol).is_err());
    }

    #[test]
    fn empty_region_is_vacuous() {
        let g = ParityGame::from_lists(vec![Player::Two], vec![1], &[vec![0]]);
        let sol = solve_zielonka(&g).unwrap();
        assert!(sol.win1().is_empty());
        assert_eq!(verify_strategy(&g, &sol), Ok(()));
    }
}
