//! Robust winning. Limit-robust play forbids player-1 discrete moves into
//! closed regions. Bounded-robust play (jitter `ε`, response `ρ`) is decided
//! on a transformed automaton where each player-1 move first enters an
//! intermediate location and the actual jump may happen anywhere in a window
//! of length `ε`, at player 2's discretion.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::model::{
    rescale_constants, tighten_upper, Atom, ClockId, Constraint, Edge, EdgeId, Game, LocId,
    Location, Player, TightenError, Q,
};
use crate::parity::StateId;
use crate::reduction::{
    build_finite_game, BuildError, BuildOptions, BuildStats, FiniteGame, Mode, Solved,
};
use crate::regions::{ClockRegion, RegionSpace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RobustError {
    #[error(transparent)]
    Tighten(#[from] TightenError),
    #[error("jitter and response must be nonnegative")]
    NegativeParameter,
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("the two parity solvers disagree on {count} states; first ones:\n{dump}")]
    SolverDisagreement { count: usize, dump: String },
    #[error("strategy certificate failed: {0}")]
    Certificate(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundedRobustParams {
    pub jitter: Q,
    pub response: Q,
}

/// A concrete starting state of the original game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StartState {
    pub location: LocId,
    pub valuation: Vec<Q>,
}

/// The transformed game together with everything needed to read results
/// back on the original game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedRobustGame {
    /// Integer-constant transformed game.
    pub game: Game,
    /// Forced `bl1` value per transformed edge.
    pub blame: Vec<Option<bool>>,
    /// The clock measuring time since the last discrete move.
    pub fresh: ClockId,
    /// Every constant was multiplied by this.
    pub factor: i64,
    /// Original location of each transformed location; `None` for the
    /// intermediate locations.
    pub origin: Vec<Option<LocId>>,
    /// Region bounds for the transformed game: the original clocks keep
    /// `factor·c_x` so that regions project exactly onto the rescaled grid.
    pub bounds: Vec<u32>,
    /// A strict lower bound went through the jitter tightening unchanged.
    pub strict_lower_bound_kept: bool,
}

fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn has_strict_lower_bound(c: &Constraint) -> bool {
    c.conjuncts()
        .is_some_and(|atoms| atoms.iter().any(|a| matches!(a, Atom::Gt(..))))
}

/// Builds the jitter/response automaton. Player-1 guards and the invariants
/// of locations with player-1 edges must be conjunctions of atoms.
pub fn build_bounded_robust(
    g: &Game,
    p: BoundedRobustParams,
) -> Result<BoundedRobustGame, RobustError> {
    let (eps, rho) = (p.jitter, p.response);
    if eps < Q::zero() || rho < Q::zero() {
        return Err(RobustError::NegativeParameter);
    }
    let mut clocks = g.clocks.clone();
    let u = clocks.len();
    clocks.push(fresh_name(&g.clocks, "u"));
    let elide = eps.is_zero();

    let mut locations = Vec::new();
    let mut origin = Vec::new();
    let mut image = vec![0; g.locations.len()];
    // intermediate location per player-1 edge
    let mut intermediate: BTreeMap<EdgeId, LocId> = BTreeMap::new();
    let mut names: Vec<String> = g.locations.iter().map(|l| l.name.clone()).collect();
    for (l, loc) in g.locations.iter().enumerate() {
        image[l] = locations.len();
        locations.push(loc.clone());
        origin.push(Some(l));
        if elide {
            continue;
        }
        for (e, edge) in g.edges_from(l).filter(|(_, e)| e.player == Player::One) {
            let name = fresh_name(&names, &format!("{}_{}", loc.name, edge.action));
            names.push(name.clone());
            intermediate.insert(e, locations.len());
            locations.push(Location {
                name,
                invariant: Constraint::Le(u, eps),
                priority: loc.priority,
            });
            origin.push(None);
        }
    }

    let mut edges = Vec::new();
    let mut blame = Vec::new();
    let mut strict_lower_bound_kept = false;
    let with_u = |resets: &[ClockId]| {
        let mut r = resets.to_vec();
        r.push(u);
        r
    };
    for (l, loc) in g.locations.iter().enumerate() {
        for (e, edge) in g.edges_from(l) {
            match edge.player {
                Player::Two => {
                    edges.push(Edge {
                        from: image[l],
                        to: image[edge.to],
                        resets: with_u(&edge.resets),
                        ..edge.clone()
                    });
                    blame.push(None);
                }
                Player::One => {
                    strict_lower_bound_kept |= has_strict_lower_bound(&edge.guard) && !elide;
                    let entry = Constraint::all([
                        tighten_upper(&loc.invariant, eps)?,
                        Constraint::Ge(u, rho),
                        tighten_upper(&edge.guard, eps)?,
                    ]);
                    if elide {
                        edges.push(Edge {
                            action: edge.action.clone(),
                            player: Player::One,
                            from: image[l],
                            to: image[edge.to],
                            guard: entry,
                            resets: with_u(&edge.resets),
                        });
                        blame.push(None);
                        continue;
                    }
                    let mid = intermediate[&e];
                    edges.push(Edge {
                        action: edge.action.clone(),
                        player: Player::One,
                        from: image[l],
                        to: mid,
                        guard: entry,
                        resets: vec![u],
                    });
                    blame.push(Some(false));
                    let p2_actions: Vec<String> = g
                        .edges_from(l)
                        .filter(|(_, e)| e.player == Player::Two)
                        .map(|(_, e)| e.action.clone())
                        .collect();
                    let fire = fresh_name(&p2_actions, &format!("{}_fire", edge.action));
                    edges.push(Edge {
                        action: fire,
                        player: Player::Two,
                        from: mid,
                        to: image[edge.to],
                        guard: edge.guard.clone(),
                        resets: with_u(&edge.resets),
                    });
                    blame.push(Some(true));
                    for (_, e2) in g.edges_from(l).filter(|(_, e)| e.player == Player::Two) {
                        edges.push(Edge {
                            from: mid,
                            to: image[e2.to],
                            resets: with_u(&e2.resets),
                            ..e2.clone()
                        });
                        blame.push(Some(false));
                    }
                }
            }
        }
    }
    let transformed = Game {
        clocks,
        locations,
        edges,
    };
    let (game, factor) = rescale_constants(&transformed, &[eps, rho]);
    let mut bounds = game.clock_bounds();
    for (x, c) in g.clock_bounds().into_iter().enumerate() {
        bounds[x] = bounds[x].max(c * factor as u32);
    }
    Ok(BoundedRobustGame {
        game,
        blame,
        fresh: u,
        factor,
        origin,
        bounds,
        strict_lower_bound_kept,
    })
}

impl BoundedRobustGame {
    /// Region space of the transformed game.
    pub fn space(&self) -> RegionSpace {
        RegionSpace::with_bounds(&self.game, self.bounds.clone())
    }

    /// Projects a transformed clock region onto the rescaled original game:
    /// keeps only non-intermediate locations where the fresh clock is 0.
    pub fn jstate(&self, r: &ClockRegion) -> Option<ClockRegion> {
        let l = self.origin[r.location]?;
        if r.class[self.fresh] != 0 || r.h[self.fresh] != 0 {
            return None;
        }
        let keep: Vec<ClockId> = (0..self.game.clocks.len())
            .filter(|&x| x != self.fresh)
            .collect();
        // the fresh clock sat in class 0, so positive classes stay contiguous
        Some(ClockRegion {
            location: l,
            h: keep.iter().map(|&x| r.h[x]).collect(),
            class: keep.iter().map(|&x| r.class[x]).collect(),
        })
    }

    /// Images of `regions` under [`Self::jstate`].
    pub fn jstates<'a>(
        &self,
        regions: impl IntoIterator<Item = &'a ClockRegion>,
    ) -> BTreeSet<ClockRegion> {
        regions.into_iter().filter_map(|r| self.jstate(r)).collect()
    }

    /// Region space of the original game rescaled by `factor`.
    pub fn original_space(&self, original: &Game) -> RegionSpace {
        let bounds: Vec<u32> = original
            .clock_bounds()
            .into_iter()
            .map(|c| c * self.factor as u32)
            .collect();
        RegionSpace::with_bounds(original, bounds)
    }
}

fn checked_solve(fg: &FiniteGame) -> Result<Solved, RobustError> {
    let solved = fg.solve();
    if !solved.solvers_agree {
        let dump = solved
            .disagreements
            .iter()
            .take(20)
            .map(|&s| {
                let zielonka = solved.solution.winner[s as usize];
                format!("  state {s} ({}): zielonka says {zielonka:?}", fg.label(s))
            })
            .collect::<Vec<_>>()
            .join("\n");
        return Err(RobustError::SolverDisagreement {
            count: solved.disagreements.len(),
            dump,
        });
    }
    if let Err(v) = &solved.certificate {
        return Err(RobustError::Certificate(v.to_string()));
    }
    Ok(solved)
}

/// Result of one winning-set computation.
pub struct ModeResult {
    pub game: FiniteGame,
    pub solved: Solved,
    /// Whether the start state is winning for player 1.
    pub member: bool,
    /// Clock regions won by player 1, over the grid of the game solved.
    pub winning: BTreeSet<ClockRegion>,
    /// Every clock region met, with its winner.
    pub winners: BTreeMap<ClockRegion, bool>,
}

fn run(
    g: &Game,
    starts: &[StartState],
    opts: &BuildOptions,
    space: &RegionSpace,
) -> Result<ModeResult, RobustError> {
    let initial: Vec<_> = starts
        .iter()
        .map(|s| FiniteGame::start_region(space, s.location, &s.valuation))
        .collect();
    let game = build_finite_game(g, &initial, opts)?;
    let solved = checked_solve(&game)?;
    let winners = game.clock_region_winners(&solved.solution).map_err(|k| {
        RobustError::Certificate(format!(
            "winner depends on more than the clock region at {}",
            game.space.display_clock_region(&k)
        ))
    })?;
    let member = solved.solution.winner[game.initial[0] as usize] == Player::One;
    let winning = winners
        .iter()
        .filter(|(_, w)| **w)
        .map(|(k, _)| k.clone())
        .collect();
    Ok(ModeResult {
        game,
        solved,
        member,
        winning,
        winners,
    })
}

/// Exact winning from the given start states (the first one decides `member`).
pub fn solve_exact(g: &Game, starts: &[StartState]) -> Result<ModeResult, RobustError> {
    run(
        g,
        starts,
        &BuildOptions::new(Mode::Exact),
        &RegionSpace::for_game(g),
    )
}

/// Limit-robust winning from the given start states.
pub fn solve_limit_robust(g: &Game, starts: &[StartState]) -> Result<ModeResult, RobustError> {
    run(
        g,
        starts,
        &BuildOptions::new(Mode::LimitRobust),
        &RegionSpace::for_game(g),
    )
}

pub struct BoundedResult {
    pub transformed: BoundedRobustGame,
    pub result: ModeResult,
    /// Projection of the winning regions with fresh clock 0, over the
    /// original game rescaled by `transformed.factor`.
    pub winning: BTreeSet<ClockRegion>,
    /// Projection of every region met with fresh clock 0, with its winner.
    pub winners: BTreeMap<ClockRegion, bool>,
}

/// Bounded-robust winning from the given start states of the original game.
pub fn solve_bounded_robust(
    g: &Game,
    p: BoundedRobustParams,
    starts: &[StartState],
) -> Result<BoundedResult, RobustError> {
    let t = build_bounded_robust(g, p)?;
    let f = Q::from_integer(t.factor);
    let image_loc = |l: LocId| t.origin.iter().position(|o| *o == Some(l)).unwrap();
    let scaled: Vec<StartState> = starts
        .iter()
        .map(|s| {
            let mut v: Vec<Q> = s.valuation.iter().map(|&x| x * f).collect();
            v.push(Q::zero());
            StartState {
                location: image_loc(s.location),
                valuation: v,
            }
        })
        .collect();
    let mut opts = BuildOptions::new(Mode::Exact);
    opts.blame = t.blame.clone();
    opts.bounds = Some(t.bounds.clone());
    let result = run(&t.game, &scaled, &opts, &t.space())?;
    let mut winners = BTreeMap::new();
    for (k, w) in &result.winners {
        if let Some(j) = t.jstate(k) {
            winners.insert(j, *w);
        }
    }
    let winning = winners
        .iter()
        .filter(|(_, w)| **w)
        .map(|(k, _)| k.clone())
        .collect();
    Ok(BoundedResult {
        transformed: t,
        result,
        winning,
        winners,
    })
}

/// Outcome of the three-way comparison.
pub struct InclusionReport {
    pub exact: ModeResult,
    pub limit_robust: ModeResult,
    pub bounded: BoundedResult,
    /// Bounded-robust winning regions whose original region is not
    /// limit-robust winning (should be empty).
    pub bounded_not_in_limit: Vec<ClockRegion>,
    /// Limit-robust winning regions not exactly winning (should be empty).
    pub limit_not_in_exact: Vec<ClockRegion>,
    /// Original regions limit-robust winning that contain a bounded-robust
    /// losing region.
    pub witnesses_bounded_strict: Vec<ClockRegion>,
    /// Regions exactly winning but limit-robust losing.
    pub witnesses_limit_strict: Vec<ClockRegion>,
}

impl InclusionReport {
    pub fn chain_holds(&self) -> bool {
        self.bounded_not_in_limit.is_empty() && self.limit_not_in_exact.is_empty()
    }
}

/// Region of the original game containing a region of the rescaled game.
fn coarsen(
    fine_space: &RegionSpace,
    coarse_space: &RegionSpace,
    factor: i64,
    r: &ClockRegion,
) -> ClockRegion {
    let v: Vec<Q> = fine_space
        .clock_representative(r)
        .into_iter()
        .map(|x| x / Q::from_integer(factor))
        .collect();
    coarse_space.clock_region_of(r.location, &v)
}

pub fn compare_modes(
    g: &Game,
    start: &StartState,
    p: BoundedRobustParams,
) -> Result<InclusionReport, RobustError> {
    let bounded = solve_bounded_robust(g, p, std::slice::from_ref(start))?;
    let coarse_space = RegionSpace::for_game(g);
    let fine_space = bounded.transformed.original_space(g);
    let factor = bounded.transformed.factor;
    let coarse = |r: &ClockRegion| coarsen(&fine_space, &coarse_space, factor, r);
    // start the other two games from every region the bounded game reached,
    // so each bounded verdict can be compared
    let mut starts = vec![start.clone()];
    let mut seen = BTreeSet::new();
    for r in bounded.winners.keys() {
        let c = coarse(r);
        if seen.insert(c.clone()) {
            starts.push(StartState {
                location: c.location,
                valuation: coarse_space.clock_representative(&c),
            });
        }
    }
    let exact = solve_exact(g, &starts)?;
    let limit = solve_limit_robust(g, &starts)?;

    let bounded_not_in_limit: Vec<ClockRegion> = bounded
        .winning
        .iter()
        .map(coarse)
        .filter(|c| !limit.winning.contains(c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let limit_not_in_exact: Vec<ClockRegion> =
        limit.winning.difference(&exact.winning).cloned().collect();
    let witnesses_bounded_strict: Vec<ClockRegion> = bounded
        .winners
        .iter()
        .filter(|(_, w)| !**w)
        .map(|(r, _)| coarse(r))
        .filter(|c| limit.winning.contains(c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let witnesses_limit_strict: Vec<ClockRegion> = exact
        .winning
        .iter()
        .filter(|r| limit.winners.get(*r) == Some(&false))
        .cloned()
        .collect();
    Ok(InclusionReport {
        exact,
        limit_robust: limit,
        bounded,
        bounded_not_in_limit,
        limit_not_in_exact,
        witnesses_bounded_strict,
        witnesses_limit_strict,
    })
}

/// Statistics line for a built game.
pub fn describe_stats(s: &BuildStats) -> String {
    format!(
        "region_states={} tuple_states={} distinct_regions={} max_time_successors={}",
        s.region_states, s.tuple_states, s.distinct_regions, s.max_time_successors
    )
}

/// State of a start region in a solved game.
pub fn start_state_id(r: &ModeResult) -> StateId {
    r.game.initial[0]
}
