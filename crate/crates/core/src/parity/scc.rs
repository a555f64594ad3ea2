//! Strongly connected components of (sub)graphs of a game, listed sinks first.

use petgraph::algo::kosaraju_scc;
use petgraph::visit::{
    GraphBase, GraphRef, IntoNeighbors, IntoNeighborsDirected, IntoNodeIdentifiers, VisitMap,
    Visitable,
};
use petgraph::Direction;

use super::{ParityGame, StateId};

/// The game restricted to `nodes` (those for which `keep` holds).
#[derive(Clone, Copy)]
pub(crate) struct Subgraph<'a> {
    pub g: &'a ParityGame,
    pub pred_off: &'a [u32],
    pub preds: &'a [StateId],
    pub nodes: &'a [StateId],
    /// Position of each node in `nodes`, indexed by state.
    pub pos: &'a [u32],
    pub keep: &'a dyn Fn(StateId) -> bool,
}

pub(crate) struct Marks<'a> {
    pos: &'a [u32],
    seen: Vec<bool>,
}

impl VisitMap<StateId> for Marks<'_> {
    fn visit(&mut self, a: StateId) -> bool {
        !std::mem::replace(&mut self.seen[self.pos[a as usize] as usize], true)
    }

    fn is_visited(&self, a: &StateId) -> bool {
        self.seen[self.pos[*a as usize] as usize]
    }

    fn unvisit(&mut self, a: StateId) -> bool {
        std::mem::replace(&mut self.seen[self.pos[a as usize] as usize], false)
    }
}

pub(crate) struct Kept<'a> {
    inner: std::slice::Iter<'a, StateId>,
    keep: &'a dyn Fn(StateId) -> bool,
}

impl Iterator for Kept<'_> {
    type Item = StateId;

    fn next(&mut self) -> Option<StateId> {
        self.inner.by_ref().copied().find(|&t| (self.keep)(t))
    }
}

impl GraphBase for Subgraph<'_> {
    type NodeId = StateId;
    type EdgeId = (StateId, StateId);
}

impl GraphRef for Subgraph<'_> {}

impl<'a> IntoNeighbors for Subgraph<'a> {
    type Neighbors = Kept<'a>;

    fn neighbors(self, a: StateId) -> Kept<'a> {
        Kept {
            inner: self.g.succ(a).iter(),
            keep: self.keep,
        }
    }
}

impl<'a> IntoNeighborsDirected for Subgraph<'a> {
    type NeighborsDirected = Kept<'a>;

    fn neighbors_directed(self, a: StateId, d: Direction) -> Kept<'a> {
        let inner = match d {
            Direction::Outgoing => self.g.succ(a).iter(),
            Direction::Incoming => {
                let a = a as usize;
                self.preds[self.pred_off[a] as usize..self.pred_off[a + 1] as usize].iter()
            }
        };
        Kept {
            inner,
            keep: self.keep,
        }
    }
}

impl<'a> IntoNodeIdentifiers for Subgraph<'a> {
    type NodeIdentifiers = std::iter::Copied<std::slice::Iter<'a, StateId>>;

    fn node_identifiers(self) -> Self::NodeIdentifiers {
        self.nodes.iter().copied()
    }
}

impl<'a> Visitable for Subgraph<'a> {
    type Map = Marks<'a>;

    fn visit_map(&self) -> Marks<'a> {
        Marks {
            pos: self.pos,
            seen: vec![false; self.nodes.len()],
        }
    }

    fn reset_map(&self, map: &mut Marks<'a>) {
        map.seen.clear();
        map.seen.resize(self.nodes.len(), false);
    }
}

/// Components in reverse topological order: every edge leaving a component
/// points into one listed earlier.
pub(crate) fn components(sub: Subgraph<'_>) -> Vec<Vec<StateId>> {
    kosaraju_scc(sub)
}
