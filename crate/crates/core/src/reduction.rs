//! The finite turn-based parity game over regions. Player-1 states are
//! regions of the enlarged game; player-2 states record player 1's proposal
//! (a time successor and an edge, or relinquishing) and player 2 answers with
//! a time successor of its own, possibly followed by one of its edges.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;
use std::fmt;

use thiserror::Error;

use crate::model::{EdgeId, Game, LocId, Player, Q};
use crate::parity::pgsolver::write_pgsolver;
use crate::parity::{
    solve_spm, solve_zielonka, verify_strategy, ParityGame, Solution, StateId, StrategyViolation,
};
use crate::regions::{ClockRegion, Region, RegionSpace, SuccessorParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Player-1 discrete moves must land in open regions; a closed one is
    /// routed to a losing sink.
    LimitRobust,
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub mode: Mode,
    /// Abort once the game has more states than this.
    pub max_states: usize,
    /// Abort once the game has more edges than this.
    pub max_edges: usize,
    /// Per-edge forced value of `bl1` when that edge's jump is taken.
    pub blame: Vec<Option<bool>>,
    /// Region bounds to use instead of the ones computed from the syntax.
    pub bounds: Option<Vec<u32>>,
}

impl BuildOptions {
    pub fn new(mode: Mode) -> BuildOptions {
        BuildOptions {
            mode,
            max_states: 20_000_000,
            max_edges: 200_000_000,
            blame: Vec::new(),
            bounds: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("finite game exceeds the limit of {limit} {what}")]
    ResourceLimit { what: &'static str, limit: usize },
    #[error("initial state violates the invariant of location '{0}'")]
    InitialInvariant(String),
}

/// A region state: the region plus the largest location priority seen since
/// the last tick (exclusive of this state).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionNode {
    pub region: Region,
    pub carry: u32,
}

/// Player-2 state: player 1's pending proposal from region state `source`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleState {
    pub source: StateId,
    /// Index of player 1's intermediate region among the time successors of
    /// the source region (0 when relinquishing).
    pub succ_index: u32,
    pub params: SuccessorParams,
    /// Player-1 edge to take; `None` when relinquishing.
    pub edge: Option<EdgeId>,
    /// Player 1 relinquished the move to player 2.
    pub tev: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Region(RegionNode),
    Tuple(TupleState),
    Sink,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BuildStats {
    pub region_states: usize,
    pub tuple_states: usize,
    pub distinct_regions: usize,
    /// Largest number of distinct time successors of any region state.
    pub max_time_successors: usize,
}

/// Priority of a region state: ticks carry the largest location priority seen
/// in the window since the previous tick, shifted by two; between ticks the
/// blame flag decides.
pub fn lifted_priority(tick: bool, bl1: bool, omega: u32, carry: u32) -> u32 {
    if tick {
        omega.max(carry) + 2
    } else if bl1 {
        1
    } else {
        0
    }
}

/// Carry of any successor of a region state.
pub fn next_carry(tick: bool, omega: u32, carry: u32) -> u32 {
    if tick {
        0
    } else {
        omega.max(carry)
    }
}

pub struct FiniteGame {
    pub source: Game,
    pub space: RegionSpace,
    pub mode: Mode,
    pub graph: ParityGame,
    pub payload: Vec<Payload>,
    pub initial: Vec<StateId>,
    pub sink: Option<StateId>,
    pub stats: BuildStats,
    index: FxHashMap<RegionNode, StateId>,
}

struct Builder<'a> {
    g: &'a Game,
    space: RegionSpace,
    opts: &'a BuildOptions,
    owner: Vec<Player>,
    priority: Vec<u32>,
    payload: Vec<Payload>,
    /// Successor list of every state as a range of `arena`.
    succ: Vec<(usize, usize)>,
    arena: Vec<StateId>,
    index: FxHashMap<RegionNode, StateId>,
    queue: std::collections::VecDeque<StateId>,
    sink: Option<StateId>,
    /// Position in the current player-2 prefix, valid where `stamp` matches.
    stamp: Vec<u32>,
    prefix_pos: Vec<u32>,
    stamp_token: u32,
    stats: BuildStats,
}

impl Builder<'_> {
    fn add_state(
        &mut self,
        owner: Player,
        priority: u32,
        payload: Payload,
    ) -> Result<StateId, BuildError> {
        if self.owner.len() >= self.opts.max_states {
            return Err(BuildError::ResourceLimit {
                what: "states",
                limit: self.opts.max_states,
            });
        }
        let id = self.owner.len() as StateId;
        self.owner.push(owner);
        self.priority.push(priority);
        self.payload.push(payload);
        self.succ.push((0, 0));
        self.stamp.push(0);
        self.prefix_pos.push(0);
        Ok(id)
    }

    fn region_state(&mut self, region: Region, carry: u32) -> Result<StateId, BuildError> {
        let node = RegionNode { region, carry };
        if let Some(&id) = self.index.get(&node) {
            return Ok(id);
        }
        let omega = self.g.locations[node.region.location].priority;
        let p = lifted_priority(node.region.tick, node.region.bl1, omega, carry);
        let id = self.add_state(Player::One, p, Payload::Region(node.clone()))?;
        self.index.insert(node, id);
        self.queue.push_back(id);
        self.stats.region_states += 1;
        Ok(id)
    }

    fn sink(&mut self) -> Result<StateId, BuildError> {
        if let Some(s) = self.sink {
            return Ok(s);
        }
        let s = self.add_state(Player::Two, 1, Payload::Sink)?;
        self.set_succ(s, &[s]);
        self.sink = Some(s);
        Ok(s)
    }

    fn blame_for(&self, e: EdgeId, default: bool) -> bool {
        self.opts.blame.get(e).copied().flatten().unwrap_or(default)
    }

    fn expand(&mut self, sx: StateId) -> Result<(), BuildError> {
        let Payload::Region(node) = &self.payload[sx as usize] else {
            unreachable!()
        };
        let node = node.clone();
        let x = &node.region;
        let loc = x.location;
        let g = self.g;
        let omega = g.locations[loc].priority;
        let carry = next_carry(x.tick, omega, node.carry);
        let succs = self.space.time_successors(x);
        self.stats.max_time_successors = self.stats.max_time_successors.max(succs.len());
        let inv = &g.locations[loc].invariant;
        let valid = succs
            .iter()
            .take_while(|(_, y)| self.space.satisfies(y, inv))
            .count();

        // player 2's outcomes up to each valid successor index, without
        // repetitions: outcomes for index j are prefix[..prefix_len[j]]
        self.stamp_token += 1;
        let token = self.stamp_token;
        let mut prefix: Vec<StateId> = Vec::new();
        let mut prefix_len: Vec<usize> = Vec::with_capacity(valid);
        for (_, y) in &succs[..valid] {
            let mut outs = vec![self.region_state(y.with_flags(y.tick, false), carry)?];
            for (e, edge) in g.edges_from(loc).filter(|(_, e)| e.player == Player::Two) {
                if !self.space.satisfies(y, &edge.guard) {
                    continue;
                }
                let target = self.space.jump(y, edge.to, &edge.resets);
                if !self
                    .space
                    .satisfies(&target, &g.locations[edge.to].invariant)
                {
                    continue;
                }
                let bl1 = self.blame_for(e, false);
                outs.push(self.region_state(target.with_flags(y.tick, bl1), carry)?);
            }
            for s in outs {
                if self.stamp[s as usize] != token {
                    self.stamp[s as usize] = token;
                    self.prefix_pos[s as usize] = prefix.len() as u32;
                    prefix.push(s);
                }
            }
            prefix_len.push(prefix.len());
        }

        // player 1's proposals, resolved before any tuple state is created
        let mut proposals = Vec::new();
        for (j, (p, y)) in succs[..valid].iter().enumerate() {
            for (e, edge) in g.edges_from(loc).filter(|(_, e)| e.player == Player::One) {
                if !self.space.satisfies(y, &edge.guard) {
                    continue;
                }
                let target = self.space.jump(y, edge.to, &edge.resets);
                if !self
                    .space
                    .satisfies(&target, &g.locations[edge.to].invariant)
                {
                    continue;
                }
                let p1_out = if self.opts.mode == Mode::LimitRobust && !y.is_open() {
                    self.sink()?
                } else {
                    let bl1 = self.blame_for(e, true);
                    self.region_state(target.with_flags(y.tick, bl1), carry)?
                };
                proposals.push((j, *p, e, p1_out));
            }
        }

        let prio = self.priority[sx as usize];
        let mut tuples = Vec::with_capacity(proposals.len() + 1);
        let relinquish = TupleState {
            source: sx,
            succ_index: 0,
            params: SuccessorParams::ZERO,
            edge: None,
            tev: true,
        };
        let z = self.add_state(Player::Two, prio, Payload::Tuple(relinquish))?;
        self.set_succ(z, &prefix);
        tuples.push(z);
        for (j, params, e, p1_out) in proposals {
            let t = TupleState {
                source: sx,
                succ_index: j as u32,
                params,
                edge: Some(e),
                tev: false,
            };
            let z = self.add_state(Player::Two, prio, Payload::Tuple(t))?;
            let len = prefix_len[j];
            let start = self.arena.len();
            self.arena.extend_from_slice(&prefix[..len]);
            let seen = self.stamp[p1_out as usize] == token
                && (self.prefix_pos[p1_out as usize] as usize) < len;
            if !seen {
                self.arena.push(p1_out);
            }
            self.succ[z as usize] = (start, self.arena.len());
            tuples.push(z);
        }
        self.stats.tuple_states += tuples.len();
        self.set_succ(sx, &tuples);
        self.check_edges()
    }

    fn check_edges(&self) -> Result<(), BuildError> {
        if self.arena.len() > self.opts.max_edges {
            return Err(BuildError::ResourceLimit {
                what: "edges",
                limit: self.opts.max_edges,
            });
        }
        Ok(())
    }

    fn set_succ(&mut self, s: StateId, list: &[StateId]) {
        let start = self.arena.len();
        self.arena.extend_from_slice(list);
        self.succ[s as usize] = (start, self.arena.len());
    }
}

/// Builds the part of the finite game reachable from the given initial
/// regions (carry 0).
pub fn build_finite_game(
    g: &Game,
    initial: &[Region],
    opts: &BuildOptions,
) -> Result<FiniteGame, BuildError> {
    let space = match &opts.bounds {
        Some(b) => RegionSpace::with_bounds(g, b.clone()),
        None => RegionSpace::for_game(g),
    };
    let mut b = Builder {
        g,
        space,
        opts,
        owner: Vec::new(),
        priority: Vec::new(),
        payload: Vec::new(),
        succ: Vec::new(),
        arena: Vec::new(),
        index: FxHashMap::default(),
        queue: Default::default(),
        sink: None,
        stamp: Vec::new(),
        prefix_pos: Vec::new(),
        stamp_token: 0,
        stats: BuildStats::default(),
    };
    let mut init_ids = Vec::new();
    for r in initial {
        if !b.space.satisfies(r, &g.locations[r.location].invariant) {
            return Err(BuildError::InitialInvariant(
                g.locations[r.location].name.clone(),
            ));
        }
        init_ids.push(b.region_state(r.clone(), 0)?);
    }
    while let Some(s) = b.queue.pop_front() {
        b.expand(s)?;
    }
    let mut graph = ParityGame::new();
    for (i, &(lo, hi)) in b.succ.iter().enumerate() {
        graph.push_state(b.owner[i], b.priority[i], &b.arena[lo..hi]);
    }
    drop(b.arena);
    let mut regions: Vec<&Region> = b.index.keys().map(|n| &n.region).collect();
    regions.sort();
    regions.dedup();
    b.stats.distinct_regions = regions.len();
    Ok(FiniteGame {
        source: g.clone(),
        space: b.space,
        mode: opts.mode,
        graph,
        payload: b.payload,
        initial: init_ids,
        sink: b.sink,
        stats: b.stats,
        index: b.index,
    })
}

/// Counting bounds on the size of a built game, next to the actual sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureCheck {
    /// Every edge joins states of different owners, the sink aside.
    pub bipartite: bool,
    pub states: usize,
    /// `|region states|·(1 + (M+1)·(|C|+2)·2·(a+1))`, `a` the most
    /// player-1 edges leaving one location.
    pub state_bound: u128,
    pub max_time_successors: usize,
    /// `4·Σ(c_x+1)` over the declared clocks and the tick clock.
    pub time_successor_bound: u128,
    pub distinct_regions: usize,
    /// `16·|L|·∏(c_x+1)·(|C|+1)!·2^(|C|+1)` over the declared clocks.
    pub region_bound: u128,
}

impl StructureCheck {
    pub fn holds(&self) -> bool {
        self.bipartite
            && self.states as u128 <= self.state_bound
            && self.max_time_successors as u128 <= self.time_successor_bound
            && self.distinct_regions as u128 <= self.region_bound
    }
}

impl FiniteGame {
    pub fn structure_check(&self) -> StructureCheck {
        let declared = &self.space.bounds[..self.space.dim() - 1];
        let c = declared.len() as u128;
        let m = declared.iter().copied().max().unwrap_or(0) as u128;
        let a = (0..self.source.locations.len())
            .map(|l| {
                self.source
                    .edges_from(l)
                    .filter(|(_, e)| e.player == Player::One)
                    .count()
            })
            .max()
            .unwrap_or(0) as u128;
        let per_region = 1 + (m + 1) * (c + 2) * 2 * (a + 1);
        let sum: u128 = self.space.bounds.iter().map(|&b| b as u128 + 1).sum();
        let product: u128 = declared.iter().map(|&b| b as u128 + 1).product();
        let factorial: u128 = (1..=c + 1).product();
        let exempt: Vec<StateId> = self.sink.into_iter().collect();
        StructureCheck {
            bipartite: self.graph.is_bipartite_except(&exempt),
            states: self.graph.len(),
            state_bound: self.stats.region_states as u128 * per_region,
            max_time_successors: self.stats.max_time_successors,
            time_successor_bound: 4 * sum,
            distinct_regions: self.stats.distinct_regions,
            region_bound: 16
                * self.source.locations.len() as u128
                * product
                * factorial
                * (1u128 << (c + 1)),
        }
    }
}

/// Solution of a finite game together with the solver cross-check.
pub struct Solved {
    pub solution: Solution,
    /// Small progress measures found the same player-1 winning set.
    pub solvers_agree: bool,
    /// States the two solvers give to different players.
    pub disagreements: Vec<StateId>,
    pub certificate: Result<(), StrategyViolation>,
}

impl FiniteGame {
    /// Region of a concrete state with the tick clock at 0 and both flags
    /// cleared, the designated start of a play.
    pub fn start_region(space: &RegionSpace, location: LocId, valuation: &[Q]) -> Region {
        let mut v = valuation.to_vec();
        v.push(Q::from_integer(0));
        space.region_of(location, &v, false, false)
    }

    pub fn state_of(&self, r: &Region, carry: u32) -> Option<StateId> {
        self.index
            .get(&RegionNode {
                region: r.clone(),
                carry,
            })
            .copied()
    }

    pub fn solve(&self) -> Solved {
        let solution =
            solve_zielonka(&self.graph).expect("every constructed state has a successor");
        let spm = solve_spm(&self.graph).expect("every constructed state has a successor");
        let disagreements: Vec<StateId> = solution
            .winner
            .iter()
            .zip(&spm)
            .enumerate()
            .filter(|(_, (w, s))| (**w == Player::One) != **s)
            .map(|(i, _)| i as StateId)
            .collect();
        let solvers_agree = disagreements.is_empty();
        let certificate = verify_strategy(&self.graph, &solution);
        Solved {
            solution,
            solvers_agree,
            disagreements,
            certificate,
        }
    }

    /// Region payloads of the player-1 states in `states`.
    pub fn regstates(&self, states: impl IntoIterator<Item = StateId>) -> Vec<Region> {
        let mut out: Vec<Region> = states
            .into_iter()
            .filter_map(|s| match &self.payload[s as usize] {
                Payload::Region(n) => Some(n.region.clone()),
                _ => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Winner of every clock region met in the game. Region states that
    /// differ only in the tick clock, the flags or the carried priority must
    /// agree; the first disagreement is returned as an error.
    pub fn clock_region_winners(
        &self,
        sol: &Solution,
    ) -> Result<BTreeMap<ClockRegion, bool>, ClockRegion> {
        let mut out: BTreeMap<ClockRegion, bool> = BTreeMap::new();
        for (s, p) in self.payload.iter().enumerate() {
            let Payload::Region(n) = p else { continue };
            let key = self.space.clock_region(&n.region);
            let w = sol.winner[s] == Player::One;
            match out.get(&key) {
                Some(&prev) if prev != w => return Err(key),
                _ => {
                    out.insert(key, w);
                }
            }
        }
        Ok(out)
    }

    /// Clock regions won by player 1.
    pub fn winning_clock_regions(&self, sol: &Solution) -> BTreeSet<ClockRegion> {
        self.clock_region_winners(sol)
            .unwrap_or_else(|k| {
                panic!(
                    "winner depends on more than the clock region at {}",
                    self.space.display_clock_region(&k)
                )
            })
            .into_iter()
            .filter(|(_, w)| *w)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn label(&self, s: StateId) -> String {
        match &self.payload[s as usize] {
            Payload::Region(n) => format!("{} | carry={}", self.space.display(&n.region), n.carry),
            Payload::Tuple(t) => {
                let action = match t.edge {
                    Some(e) => self.source.edges[e].action.as_str(),
                    None => "relinquish",
                };
                format!(
                    "from {} | succ {} {} | {} | tev={}",
                    t.source,
                    t.succ_index,
                    t.params,
                    action,
                    u8::from(t.tev)
                )
            }
            Payload::Sink => "sink".to_string(),
        }
    }

    /// The game in PGSolver format, states in construction order.
    pub fn to_pgsolver(&self) -> String {
        write_pgsolver(&self.graph, |s| self.label(s))
    }

    /// Player 1's move at a region state as chosen by the strategy.
    pub fn describe_choice(&self, sol: &Solution, s: StateId) -> Option<MoveDescription> {
        let z = sol.choice(s)?;
        let Payload::Tuple(t) = &self.payload[z as usize] else {
            return None;
        };
        let Payload::Region(src) = &self.payload[s as usize] else {
            return None;
        };
        Some(match t.edge {
            None => MoveDescription::Relinquish,
            Some(e) => MoveDescription::Act {
                wait_to: self.space.second_region(&src.region, t.params),
                action: self.source.edges[e].action.clone(),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveDescription {
    Relinquish,
    Act { wait_to: Region, action: String },
}

impl fmt::Display for MoveDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveDescription::Relinquish => write!(f, "relinquish"),
            MoveDescription::Act { action, .. } => write!(f, "take {action}"),
        }
    }
}
