mod common;

use common::{random_game, rng, SMALL, SMALL_OPEN};
use num_traits::Zero;
use rand::Rng;
use timed_parity::gamefile::{load_game, parse_game, write_game, GameSpec};
use timed_parity::model::{Constraint, Game, Player, TightenError, Q};
use timed_parity::robust::{
    build_bounded_robust, compare_modes, solve_bounded_robust, solve_exact, solve_limit_robust,
    BoundedRobustParams, RobustError, StartState,
};

fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn deadlines() -> Game {
    load_game(fixture_path("deadlines.game")).unwrap().game
}

fn params(jitter: Q, response: Q) -> BoundedRobustParams {
    BoundedRobustParams { jitter, response }
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Whether `c` holds at `v + δ` for every δ in `[0, eps]`, by evaluating at
/// every point where an atom can change truth and between any two of them.
fn holds_throughout(c: &Constraint, v: &[Q], eps: Q) -> bool {
    let mut points = vec![Q::zero(), eps];
    for (x, d) in c.atoms() {
        let t = d - v[x];
        if t > Q::zero() && t < eps {
            points.push(t);
        }
    }
    points.sort();
    points.dedup();
    let mut samples = points.clone();
    for w in points.windows(2) {
        samples.push((w[0] + w[1]) / 2);
    }
    samples.iter().all(|&t| {
        let shifted: Vec<Q> = v.iter().map(|&x| x + t).collect();
        c.eval(&shifted)
    })
}

#[test]
fn transformed_fixture_matches_golden_file() {
    let g = deadlines();
    let t = build_bounded_robust(&g, params(q(1, 10), Q::zero())).unwrap();
    assert_eq!(t.factor, 10);
    let text = write_game(&GameSpec {
        game: t.game.clone(),
        initial_location: 0,
        initial_valuation: vec![Q::zero(); 3],
    });
    let golden =
        std::fs::read_to_string(fixture_path("golden/deadlines_bounded_jitter_1_10.game")).unwrap();
    assert_eq!(text, golden);
    // the written form reads back to the same game
    assert_eq!(parse_game(&text).unwrap().game, t.game);
    // y > 1 keeps its definitional form and is flagged
    assert!(t.strict_lower_bound_kept);
}

#[test]
fn each_location_gets_one_intermediate_per_player1_edge() {
    let g = deadlines();
    let t = build_bounded_robust(&g, params(q(1, 10), Q::zero())).unwrap();
    for (l, _) in g.locations.iter().enumerate() {
        let m = g
            .edges_from(l)
            .filter(|(_, e)| e.player == Player::One)
            .count();
        let image = t.origin.iter().position(|o| *o == Some(l)).unwrap();
        // intermediate locations follow their location directly
        let block = t.origin[image + 1..]
            .iter()
            .take_while(|o| o.is_none())
            .count();
        assert_eq!(block + 1, m + 1, "location {}", g.locations[l].name);
    }
    assert_eq!(t.game.locations.len(), g.locations.len() + 4);
}

#[test]
fn entry_guards_require_the_whole_jitter_window() {
    let mut r = rng(21);
    for case in 0..60 {
        let (g, _) = random_game(&mut r, SMALL);
        let eps = q(1, r.random_range(1..=4));
        let rho = q(r.random_range(0..=2), 2);
        let t = build_bounded_robust(&g, params(eps, rho)).unwrap();
        let f = Q::from_integer(t.factor);
        let u = t.fresh;
        for (l, loc) in g.locations.iter().enumerate() {
            for (_, e) in g.edges_from(l).filter(|(_, e)| e.player == Player::One) {
                let image = t.origin.iter().position(|o| *o == Some(l)).unwrap();
                let entry = t
                    .game
                    .edges
                    .iter()
                    .find(|te| te.from == image && te.action == e.action)
                    .unwrap();
                assert_eq!(entry.player, Player::One);
                assert_eq!(entry.resets, vec![u], "case {case}");
                for _ in 0..40 {
                    let v: Vec<Q> = (0..g.clocks.len())
                        .map(|_| q(r.random_range(0..=30), 8))
                        .collect();
                    let uv = q(r.random_range(0..=12), 8);
                    let expected = holds_throughout(&loc.invariant, &v, eps)
                        && uv >= rho
                        && holds_throughout(&e.guard, &v, eps);
                    let mut scaled: Vec<Q> = v.iter().map(|&x| x * f).collect();
                    scaled.push(uv * f);
                    assert_eq!(
                        entry.guard.eval(&scaled),
                        expected,
                        "case {case} v={v:?} u={uv}"
                    );
                }
            }
        }
    }
}

#[test]
fn zero_jitter_keeps_locations_and_guards() {
    let mut r = rng(5);
    for _ in 0..40 {
        let (g, _) = random_game(&mut r, SMALL);
        let t = build_bounded_robust(&g, params(Q::zero(), Q::zero())).unwrap();
        assert_eq!(t.factor, 1);
        assert_eq!(t.game.locations.len(), g.locations.len());
        assert_eq!(t.game.edges.len(), g.edges.len());
        assert!(t.blame.iter().all(Option::is_none));
        for (e, te) in g.edges.iter().zip(&t.game.edges) {
            assert_eq!((e.from, e.to, &e.action), (te.from, te.to, &te.action));
            for _ in 0..20 {
                let mut v: Vec<Q> = (0..g.clocks.len())
                    .map(|_| q(r.random_range(0..=12), 4))
                    .collect();
                let inside = g.locations[e.from].invariant.eval(&v);
                let before = e.guard.eval(&v);
                v.push(q(r.random_range(0..=8), 4));
                // at the source location the invariant already holds
                if inside {
                    assert_eq!(te.guard.eval(&v), before);
                }
            }
        }
    }
}

#[test]
fn zero_jitter_and_response_agree_with_exact_winning() {
    let mut r = rng(8);
    for case in 0..40 {
        let (g, start) = random_game(&mut r, SMALL);
        let exact = solve_exact(&g, std::slice::from_ref(&start)).unwrap();
        let bounded = solve_bounded_robust(
            &g,
            params(Q::zero(), Q::zero()),
            std::slice::from_ref(&start),
        )
        .unwrap();
        assert_eq!(bounded.result.member, exact.member, "case {case}");
        for (k, w) in &bounded.winners {
            if let Some(e) = exact.winners.get(k) {
                assert_eq!(w, e, "case {case}");
            }
        }
    }
}

#[test]
fn more_jitter_never_helps_player_one() {
    let mut r = rng(13);
    let mut strict = 0;
    for case in 0..60 {
        let (g, start) = random_game(&mut r, SMALL);
        let rho = q(r.random_range(0..=1), 2);
        let coarse =
            solve_bounded_robust(&g, params(Q::zero(), rho), std::slice::from_ref(&start)).unwrap();
        let fine =
            solve_bounded_robust(&g, params(q(1, 2), rho), std::slice::from_ref(&start)).unwrap();
        if fine.result.member {
            assert!(coarse.result.member, "case {case}");
        }
        strict += usize::from(coarse.result.member && !fine.result.member);
    }
    assert!(strict > 0, "no case separates the two jitters");
}

#[test]
fn blame_overrides_do_not_matter_with_positive_response() {
    use timed_parity::reduction::{build_finite_game, BuildOptions, FiniteGame, Mode};
    let mut r = rng(17);
    for case in 0..30 {
        let (g, start) = random_game(&mut r, SMALL);
        let t = build_bounded_robust(&g, params(q(1, 2), q(1, 2))).unwrap();
        let space = t.space();
        let mut v: Vec<Q> = start
            .valuation
            .iter()
            .map(|&x| x * Q::from_integer(t.factor))
            .collect();
        v.push(Q::zero());
        let r0 = FiniteGame::start_region(&space, 0, &v);
        let solve = |blame: Vec<Option<bool>>| {
            let mut opts = BuildOptions::new(Mode::Exact);
            opts.blame = blame;
            opts.bounds = Some(t.bounds.clone());
            let fg = build_finite_game(&t.game, std::slice::from_ref(&r0), &opts).unwrap();
            let sol = fg.solve().solution;
            fg.clock_region_winners(&sol).unwrap()
        };
        let with = solve(t.blame.clone());
        let without = solve(Vec::new());
        for (k, w) in &with {
            if let Some(o) = without.get(k) {
                assert_eq!(w, o, "case {case}");
            }
        }
    }
}

#[test]
fn inclusion_chain_on_random_games() {
    let mut r = rng(29);
    for case in 0..25 {
        let (g, start) = random_game(&mut r, SMALL);
        let eps = q(1, r.random_range(2..=3));
        let rho = q(r.random_range(0..=1), 2);
        let report = compare_modes(&g, &start, params(eps, rho)).unwrap();
        assert!(
            report.chain_holds(),
            "case {case}: {:?} {:?}",
            report.bounded_not_in_limit,
            report.limit_not_in_exact
        );
        if report.bounded.result.member {
            assert!(report.limit_robust.member, "case {case}");
        }
        if report.limit_robust.member {
            assert!(report.exact.member, "case {case}");
        }
    }
}

#[test]
fn open_games_lose_nothing_to_limit_robustness() {
    let mut r = rng(31);
    for case in 0..20 {
        let (g, start) = random_game(&mut r, SMALL_OPEN);
        assert!(g.is_open());
        let exact = solve_exact(&g, std::slice::from_ref(&start)).unwrap();
        let starts: Vec<StartState> = exact
            .winners
            .keys()
            .map(|k| StartState {
                location: k.location,
                valuation: exact.game.space.clock_representative(k),
            })
            .collect();
        let exact = solve_exact(&g, &starts).unwrap();
        let limit = solve_limit_robust(&g, &starts).unwrap();
        assert_eq!(exact.winning, limit.winning, "case {case}");
    }
}

#[test]
fn fixture_memberships_exact_and_limit_robust() {
    let g = deadlines();
    let at = |v: i64| StartState {
        location: 0,
        valuation: vec![Q::from_integer(v); 2],
    };
    assert!(solve_exact(&g, &[at(0)]).unwrap().member);
    assert!(solve_exact(&g, &[at(1)]).unwrap().member);
    assert!(solve_limit_robust(&g, &[at(0)]).unwrap().member);
    assert!(!solve_limit_robust(&g, &[at(1)]).unwrap().member);
}

#[test]
fn non_conjunctive_player1_guard_is_rejected() {
    let mut g = deadlines();
    g.edges[0].guard = Constraint::Not(Box::new(Constraint::le(0, 1).and(Constraint::ge(1, 1))));
    assert_eq!(
        build_bounded_robust(&g, params(q(1, 10), Q::zero())),
        Err(RobustError::Tighten(TightenError::NonConjunctiveGuard))
    );
    assert_eq!(
        build_bounded_robust(&deadlines(), params(q(-1, 10), Q::zero())),
        Err(RobustError::NegativeParameter)
    );
}
