use std::cmp::Ordering;
use std::collections::VecDeque;

use super::scc::{self, Subgraph};
use super::{ParityError, ParityGame, StateId};
use crate::model::Player;

/// Lifts done by one side before the other gets its turn.
const BATCH: usize = 4096;

/// Jurdziński's small progress measures for the max-parity condition.
///
/// Each player gets its own measures: one component per priority of the
/// opposite parity, the highest priority most significant. The owner of the
/// measures minimises, the opponent maximises, and the owner wins exactly the
/// states whose least fixpoint measure is not top. Both fixpoints are lifted
/// in alternating batches and the first one reached decides, since lifting
/// towards top across the loser's region can take very long on either side.
///
/// Lifting towards top is what takes long, so every so often each side looks
/// for the largest set of its non-top states whose current measures already
/// satisfy the progress conditions inside the set. Such a set is won by the
/// measures' owner whatever the remaining lifts do, so the other side may set
/// it to top at once: that stays below its least fixpoint, and lifting from
/// below the least fixpoint still ends exactly there.
///
/// Strongly connected components are solved sinks first. Exits into solved
/// components count as the zero measure when won by the measures' owner and
/// as top otherwise.
///
/// The bound of the measure component for a priority `p` is the largest number
/// of priority-`p` states on one path of the component restricted to
/// priorities at most `p`. Between two visits above `p`, a play won by the
/// owner visits each priority-`p` state at most once, and all of them lie on
/// such a path.
pub fn solve_spm(g: &ParityGame) -> Result<Vec<bool>, ParityError> {
    lift(g, &[Player::One, Player::Two], BATCH)
}

/// Player 1's winning states from the progress measures of `owner` alone.
pub fn solve_spm_one_sided(g: &ParityGame, owner: Player) -> Result<Vec<bool>, ParityError> {
    lift(g, &[owner], BATCH)
}

fn lift(g: &ParityGame, owners: &[Player], batch: usize) -> Result<Vec<bool>, ParityError> {
    g.check()?;
    let n = g.len();
    let (pred_off, preds) = g.reverse();
    let all: Vec<StateId> = (0..n as StateId).collect();
    let mut pos: Vec<u32> = (0..n as u32).collect();
    let comps = scc::components(Subgraph {
        g,
        pred_off: &pred_off,
        preds: &preds,
        nodes: &all,
        pos: &pos,
        keep: &|_| true,
    });
    drop(all);

    let mut comp_of = vec![usize::MAX; n];
    let mut win1 = vec![false; n];
    let mut sides: Vec<Lifter> = owners.iter().map(|&o| Lifter::new(g, o)).collect();
    for (ci, comp) in comps.into_iter().enumerate() {
        for (i, &s) in comp.iter().enumerate() {
            comp_of[s as usize] = ci;
            pos[s as usize] = i as u32;
        }
        for side in &mut sides {
            side.start(g, &pred_off, &preds, &comp, &pos, &comp_of);
        }
        let mut since_check = 0;
        let decided = 'lift: loop {
            for (i, side) in sides.iter_mut().enumerate() {
                if side.run(g, &pred_off, &preds, &comp_of, ci, &win1, batch) {
                    break 'lift i;
                }
            }
            since_check += batch;
            if sides.len() == 2 && since_check >= 4 * comp.len() {
                since_check = 0;
                for i in 0..2 {
                    let won =
                        sides[i].certify(g, &pred_off, &preds, &comp, &pos, &comp_of, ci, &win1);
                    sides[1 - i].give_up(&won, &pred_off, &preds, &comp_of, ci);
                }
            }
        };
        for &s in &comp {
            let won = !sides[decided].top[s as usize];
            win1[s as usize] = won == (sides[decided].me == Player::One);
        }
        for side in &mut sides {
            side.finish(&comp);
        }
    }
    Ok(win1)
}

/// Progress measures of one player.
struct Lifter {
    me: Player,
    /// Priorities counted by the measures, most significant first.
    bad: Vec<u32>,
    top: Vec<bool>,
    rho: Vec<u32>,
    queued: Vec<bool>,
    queue: VecDeque<StateId>,
    limit: Vec<u32>,
    zero: Vec<u32>,
    scratch: Vec<u32>,
    best: Vec<u32>,
    new: Vec<u32>,
}

impl Lifter {
    fn new(g: &ParityGame, me: Player) -> Lifter {
        let bad_parity = u32::from(me == Player::One);
        let bad: Vec<u32> = (0..=g.max_priority())
            .rev()
            .filter(|p| p % 2 == bad_parity)
            .collect();
        let k = bad.len();
        Lifter {
            me,
            bad,
            top: vec![false; g.len()],
            rho: vec![0; g.len() * k],
            queued: vec![false; g.len()],
            queue: VecDeque::new(),
            limit: vec![0; k],
            zero: vec![0; k],
            scratch: vec![0; k],
            best: vec![0; k],
            new: vec![0; k],
        }
    }

    fn is_bad(&self, p: u32) -> bool {
        (p % 2 == 1) == (self.me == Player::One)
    }

    /// Number of components that priority `p` looks at.
    fn width(&self, p: u32) -> usize {
        self.bad.iter().take_while(|&&q| q >= p).count()
    }

    fn start(
        &mut self,
        g: &ParityGame,
        pred_off: &[u32],
        preds: &[StateId],
        comp: &[StateId],
        pos: &[u32],
        comp_of: &[usize],
    ) {
        for &s in comp {
            self.queued[s as usize] = true;
            self.queue.push_back(s);
        }
        for (i, &p) in self.bad.iter().enumerate() {
            self.limit[i] = path_limit(g, pred_off, preds, comp, pos, comp_of, p);
        }
    }

    /// Drops what is left of an unfinished run over `comp`.
    fn finish(&mut self, comp: &[StateId]) {
        for &s in comp {
            self.queued[s as usize] = false;
        }
        self.queue.clear();
    }

    /// Measure of successor `w` as seen from component `ci`; `None` is top.
    fn measure<'a>(
        &'a self,
        w: usize,
        comp_of: &[usize],
        ci: usize,
        win1: &[bool],
    ) -> Option<&'a [u32]> {
        let k = self.bad.len();
        if comp_of[w] == ci {
            (!self.top[w]).then(|| &self.rho[w * k..w * k + k])
        } else {
            (win1[w] == (self.me == Player::One)).then_some(&self.zero[..])
        }
    }

    /// Largest set of non-top states of `comp` on which the current measures
    /// are a progress measure of the game restricted to the set (plus won
    /// exits). All of it is won by the measures' owner.
    #[allow(clippy::too_many_arguments)]
    fn certify(
        &mut self,
        g: &ParityGame,
        pred_off: &[u32],
        preds: &[StateId],
        comp: &[StateId],
        pos: &[u32],
        comp_of: &[usize],
        ci: usize,
        win1: &[bool],
    ) -> Vec<StateId> {
        let mut scratch = std::mem::take(&mut self.scratch);
        let mut inside: Vec<bool> = comp.iter().map(|&s| !self.top[s as usize]).collect();
        // justified successors of each state, and how many it needs
        let mut have = vec![0u32; comp.len()];
        let mut need = vec![0u32; comp.len()];
        let mut out: Vec<StateId> = Vec::new();
        for (i, &v) in comp.iter().enumerate() {
            if !inside[i] {
                continue;
            }
            for &w in g.succ(v) {
                have[i] += u32::from(self.justifies(g, v, w, comp_of, ci, win1, &mut scratch));
            }
            need[i] = if g.owner[v as usize] == self.me {
                1
            } else {
                g.succ(v).len() as u32
            };
            if have[i] < need[i] {
                out.push(v);
            }
        }
        // drop states that lack justified successors until none does
        while let Some(v) = out.pop() {
            let vi = pos[v as usize] as usize;
            if !std::mem::replace(&mut inside[vi], false) {
                continue;
            }
            for j in pred_off[v as usize]..pred_off[v as usize + 1] {
                let u = preds[j as usize];
                if comp_of[u as usize] != ci {
                    continue;
                }
                let ui = pos[u as usize] as usize;
                if inside[ui] && self.justifies(g, u, v, comp_of, ci, win1, &mut scratch) {
                    have[ui] -= 1;
                    if have[ui] < need[ui] {
                        out.push(u);
                    }
                }
            }
        }
        self.scratch = scratch;
        comp.iter()
            .zip(&inside)
            .filter(|(_, &k)| k)
            .map(|(&s, _)| s)
            .collect()
    }

    /// Whether the measure of `v` is justified by its successor `w`.
    #[allow(clippy::too_many_arguments)]
    fn justifies(
        &self,
        g: &ParityGame,
        v: StateId,
        w: StateId,
        comp_of: &[usize],
        ci: usize,
        win1: &[bool],
        scratch: &mut [u32],
    ) -> bool {
        let k = self.bad.len();
        let vu = v as usize;
        let p = g.priority[vu];
        let wdt = self.width(p);
        match self.measure(w as usize, comp_of, ci, win1) {
            None => false,
            Some(m) => {
                progress(m, wdt, self.is_bad(p), &self.limit, scratch)
                    && scratch[..wdt] <= self.rho[vu * k..vu * k + wdt]
            }
        }
    }

    /// Marks `lost` as top and requeues what may now lift.
    fn give_up(
        &mut self,
        lost: &[StateId],
        pred_off: &[u32],
        preds: &[StateId],
        comp_of: &[usize],
        ci: usize,
    ) {
        for &s in lost {
            let su = s as usize;
            if std::mem::replace(&mut self.top[su], true) {
                continue;
            }
            for i in pred_off[su]..pred_off[su + 1] {
                let u = preds[i as usize] as usize;
                if comp_of[u] == ci && !self.queued[u] && !self.top[u] {
                    self.queued[u] = true;
                    self.queue.push_back(u as StateId);
                }
            }
        }
    }

    /// Lifts at most `budget` states; true once the fixpoint is reached.
    #[allow(clippy::too_many_arguments)]
    fn run(
        &mut self,
        g: &ParityGame,
        pred_off: &[u32],
        preds: &[StateId],
        comp_of: &[usize],
        ci: usize,
        win1: &[bool],
        budget: usize,
    ) -> bool {
        let k = self.bad.len();
        let mut scratch = std::mem::take(&mut self.scratch);
        for _ in 0..budget {
            let Some(v) = self.queue.pop_front() else {
                break;
            };
            let vu = v as usize;
            self.queued[vu] = false;
            if self.top[vu] {
                continue;
            }
            let p = g.priority[vu];
            let wdt = self.width(p);
            let strict = self.is_bad(p);
            let minimise = g.owner[vu] == self.me;
            let mut best_top = false;
            let mut have = false;
            for &w in g.succ(v) {
                let wu = w as usize;
                let cand_top = match self.measure(wu, comp_of, ci, win1) {
                    None => true,
                    Some(m) => !progress(m, wdt, strict, &self.limit, &mut scratch),
                };
                let better = if !have {
                    true
                } else {
                    let ord = compare(cand_top, &scratch[..wdt], best_top, &self.best[..wdt]);
                    if minimise {
                        ord == Ordering::Less
                    } else {
                        ord == Ordering::Greater
                    }
                };
                if better {
                    have = true;
                    best_top = cand_top;
                    if !cand_top {
                        self.best[..wdt].copy_from_slice(&scratch[..wdt]);
                    }
                }
            }
            let changed = if best_top {
                self.top[vu] = true;
                true
            } else {
                // new measure: best on the first `wdt` components, zero below
                self.new.iter_mut().for_each(|c| *c = 0);
                self.new[..wdt].copy_from_slice(&self.best[..wdt]);
                let current = &mut self.rho[vu * k..vu * k + k];
                if self.new[..] > current[..] {
                    current.copy_from_slice(&self.new);
                    true
                } else {
                    false
                }
            };
            if changed {
                for i in pred_off[vu]..pred_off[vu + 1] {
                    let u = preds[i as usize] as usize;
                    if comp_of[u] == ci && !self.queued[u] && !self.top[u] {
                        self.queued[u] = true;
                        self.queue.push_back(u as StateId);
                    }
                }
            }
        }
        self.scratch = scratch;
        self.queue.is_empty()
    }
}

/// Most priority-`p` states on one path of `comp` restricted to states of
/// priority at most `p`.
fn path_limit(
    g: &ParityGame,
    pred_off: &[u32],
    preds: &[StateId],
    comp: &[StateId],
    pos: &[u32],
    comp_of: &[usize],
    p: u32,
) -> u32 {
    let hits = |s: StateId| u32::from(g.priority[s as usize] == p);
    if comp.len() == 1 {
        return hits(comp[0]);
    }
    let ci = comp_of[comp[0] as usize];
    let keep = |t: StateId| comp_of[t as usize] == ci && g.priority[t as usize] <= p;
    let parts = scc::components(Subgraph {
        g,
        pred_off,
        preds,
        nodes: comp,
        pos,
        keep: &keep,
    });
    // parts come sinks first, so successors are final before their sources
    let mut part_of = vec![0u32; comp.len()];
    let mut heaviest = vec![0u32; parts.len()];
    let mut overall = 0;
    for (j, part) in parts.iter().enumerate() {
        for &s in part {
            part_of[pos[s as usize] as usize] = j as u32;
        }
        let mut after = 0;
        for &s in part {
            for &t in g.succ(s) {
                if keep(t) {
                    let tj = part_of[pos[t as usize] as usize] as usize;
                    if tj != j {
                        after = after.max(heaviest[tj]);
                    }
                }
            }
        }
        heaviest[j] = part.iter().map(|&s| hits(s)).sum::<u32>() + after;
        overall = overall.max(heaviest[j]);
    }
    overall
}

/// Least measure that agrees with `m` on the first `wdt` components
/// (strictly greater there when `strict`). Writes it into `out[..wdt]`;
/// returns false on overflow to top.
fn progress(m: &[u32], wdt: usize, strict: bool, limit: &[u32], out: &mut [u32]) -> bool {
    out[..wdt].copy_from_slice(&m[..wdt]);
    if !strict {
        return true;
    }
    for i in (0..wdt).rev() {
        if out[i] < limit[i] {
            out[i] += 1;
            return true;
        }
        out[i] = 0;
    }
    false
}

fn compare(a_top: bool, a: &[u32], b_top: bool, b: &[u32]) -> Ordering {
    match (a_top, b_top) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => a.cmp(b),
    }
}
