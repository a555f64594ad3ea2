use std::collections::VecDeque;

use super::{ParityGame, StateId, NO_MOVE};
use crate::model::Player;

/// Shared scratch space for attractor computations inside subgames.
/// A state belongs to the current subgame when `stamp[s] == token`.
pub(crate) struct Arena<'g> {
    pub g: &'g ParityGame,
    pred_off: Vec<u32>,
    preds: Vec<StateId>,
    pub stamp: Vec<u32>,
    next_token: u32,
    in_attr: Vec<u32>,
    attr_token: u32,
    count: Vec<u32>,
    count_mark: Vec<u32>,
}

impl<'g> Arena<'g> {
    pub fn new(g: &'g ParityGame) -> Arena<'g> {
        let (pred_off, preds) = g.reverse();
        Arena {
            g,
            pred_off,
            preds,
            stamp: vec![0; g.len()],
            next_token: 1,
            in_attr: vec![0; g.len()],
            attr_token: 0,
            count: vec![0; g.len()],
            count_mark: vec![0; g.len()],
        }
    }

    pub fn fresh_token(&mut self) -> u32 {
        let t = self.next_token;
        self.next_token += 1;
        t
    }

    pub fn stamp_all(&mut self, states: &[StateId], token: u32) {
        for &s in states {
            self.stamp[s as usize] = token;
        }
    }

    /// Attractor of `target` for `player` within the subgame `token`.
    /// Returns the attractor as a list (target first) and records, for
    /// `player`'s states pulled in, the successor that leads inside.
    pub fn attract(
        &mut self,
        token: u32,
        player: Player,
        target: &[StateId],
        strategy: &mut [StateId],
    ) -> Vec<StateId> {
        self.attr_token += 1;
        let mark = self.attr_token;
        let mut out = Vec::with_capacity(target.len());
        let mut queue = VecDeque::new();
        for &s in target {
            if self.in_attr[s as usize] != mark {
                self.in_attr[s as usize] = mark;
                out.push(s);
                queue.push_back(s);
            }
        }
        while let Some(t) = queue.pop_front() {
            for i in self.pred_off[t as usize]..self.pred_off[t as usize + 1] {
                let s = self.preds[i as usize];
                let su = s as usize;
                if self.stamp[su] != token || self.in_attr[su] == mark {
                    continue;
                }
                let pull = if self.g.owner[su] == player {
                    strategy[su] = t;
                    true
                } else {
                    // successors of an opponent state inside the subgame that
                    // are not attracted yet
                    if self.count_mark[su] != mark {
                        self.count_mark[su] = mark;
                        self.count[su] = self
                            .g
                            .succ(s)
                            .iter()
                            .filter(|&&u| self.stamp[u as usize] == token)
                            .count() as u32;
                    }
                    self.count[su] -= 1;
                    self.count[su] == 0
                };
                if pull {
                    self.in_attr[su] = mark;
                    out.push(s);
                    queue.push_back(s);
                }
            }
        }
        out
    }
}

/// Attractor of `target` for `player` in the whole game, as a membership mask.
pub fn attractor(g: &ParityGame, player: Player, target: &[StateId]) -> Vec<bool> {
    let mut arena = Arena::new(g);
    let token = arena.fresh_token();
    let all: Vec<StateId> = (0..g.len() as StateId).collect();
    arena.stamp_all(&all, token);
    let mut strategy = vec![NO_MOVE; g.len()];
    let mut mask = vec![false; g.len()];
    for s in arena.attract(token, player, target, &mut strategy) {
        mask[s as usize] = true;
    }
    mask
}
