//! Report text: a human-readable part followed by a `key=value` block.
//! Everything here is a pure function of its inputs, so reports are
//! byte-identical across runs.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::Path;

use timed_parity::gamefile::GameSpec;
use timed_parity::reduction::FiniteGame;
use timed_parity::regions::{ClockRegion, RegionSpace};
use timed_parity::robust::{BoundedResult, BoundedRobustParams, InclusionReport, ModeResult};

/// `key=value` lines, written after the human-readable part.
#[derive(Default)]
struct Machine(String);

impl Machine {
    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.0, "{key}={value}").unwrap();
    }

    fn regions(&mut self, key: &str, space: &RegionSpace, regions: &BTreeSet<ClockRegion>) {
        self.put(&format!("{key}_count"), regions.len());
        for (i, r) in regions.iter().enumerate() {
            self.put(&format!("{key}.{i}"), space.display_clock_region(r));
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn start_text(spec: &GameSpec) -> String {
    let loc = &spec.game.locations[spec.initial_location].name;
    let vals: Vec<String> = spec
        .game
        .clocks
        .iter()
        .zip(&spec.initial_valuation)
        .map(|(c, v)| format!("{c}={v}"))
        .collect();
    format!("{loc} {}", vals.join(" ")).trim_end().to_string()
}

fn list_regions(
    out: &mut String,
    title: &str,
    space: &RegionSpace,
    regions: &BTreeSet<ClockRegion>,
) {
    writeln!(out, "{title}: {}", regions.len()).unwrap();
    for r in regions {
        writeln!(out, "  {}", space.display_clock_region(r)).unwrap();
    }
}

fn priorities(fg: &FiniteGame) -> String {
    fg.graph
        .priorities()
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn game_stats(out: &mut String, m: &mut Machine, prefix: &str, r: &ModeResult) {
    let fg = &r.game;
    writeln!(
        out,
        "finite game: {} states ({} region, {} move), {} edges, priorities {}",
        fg.graph.len(),
        fg.stats.region_states,
        fg.stats.tuple_states,
        fg.graph.edge_count(),
        priorities(fg)
    )
    .unwrap();
    writeln!(
        out,
        "solvers agree: {}; strategy certificate: {}",
        yes(r.solved.solvers_agree),
        if r.solved.certificate.is_ok() {
            "valid"
        } else {
            "invalid"
        }
    )
    .unwrap();
    m.put(&format!("{prefix}states"), fg.graph.len());
    m.put(&format!("{prefix}region_states"), fg.stats.region_states);
    m.put(&format!("{prefix}move_states"), fg.stats.tuple_states);
    m.put(&format!("{prefix}edges"), fg.graph.edge_count());
    m.put(&format!("{prefix}priorities"), priorities(fg));
    m.put(
        &format!("{prefix}distinct_regions"),
        fg.stats.distinct_regions,
    );
    m.put(
        &format!("{prefix}max_time_successors"),
        fg.stats.max_time_successors,
    );
    m.put(&format!("{prefix}solvers_agree"), r.solved.solvers_agree);
    m.put(
        &format!("{prefix}certificate_valid"),
        r.solved.certificate.is_ok(),
    );
}

fn finish(mut out: String, m: Machine) -> String {
    writeln!(out).unwrap();
    writeln!(out, "[machine]").unwrap();
    out.push_str(&m.0);
    out
}

/// Report of an exact or limit-robust solve.
pub fn mode(path: &Path, spec: &GameSpec, name: &str, r: &ModeResult) -> String {
    let mut out = String::new();
    let mut m = Machine::default();
    let space = &r.game.space;
    writeln!(out, "game: {}", path.display()).unwrap();
    writeln!(out, "mode: {name}").unwrap();
    writeln!(out, "start: {}", start_text(spec)).unwrap();
    writeln!(out, "player 1 wins from the start: {}", yes(r.member)).unwrap();
    list_regions(&mut out, "winning clock regions", space, &r.winning);
    game_stats(&mut out, &mut m, "", r);
    let mut head = Machine::default();
    head.put("mode", name);
    head.put("member", r.member);
    head.regions("winning_region", space, &r.winning);
    head.0.push_str(&m.0);
    finish(out, head)
}

/// Report of a bounded-robust solve.
pub fn bounded(path: &Path, spec: &GameSpec, p: BoundedRobustParams, r: &BoundedResult) -> String {
    let mut out = String::new();
    let mut m = Machine::default();
    let t = &r.transformed;
    let space = t.original_space(&spec.game);
    writeln!(out, "game: {}", path.display()).unwrap();
    writeln!(
        out,
        "mode: bounded-robust (jitter {}, response {})",
        p.jitter, p.response
    )
    .unwrap();
    writeln!(out, "start: {}", start_text(spec)).unwrap();
    writeln!(
        out,
        "player 1 wins from the start: {}",
        yes(r.result.member)
    )
    .unwrap();
    writeln!(
        out,
        "transformed game: {} locations, {} edges, fresh clock {}, constants scaled by {}",
        t.game.locations.len(),
        t.game.edges.len(),
        t.game.clocks[t.fresh],
        t.factor
    )
    .unwrap();
    if t.strict_lower_bound_kept {
        writeln!(
            out,
            "note: strict lower bounds keep their form under the jitter tightening"
        )
        .unwrap();
    }
    list_regions(
        &mut out,
        "winning clock regions (scaled grid)",
        &space,
        &r.winning,
    );
    game_stats(&mut out, &mut m, "", &r.result);
    let mut head = Machine::default();
    head.put("mode", "bounded-robust");
    head.put("jitter", p.jitter);
    head.put("response", p.response);
    head.put("member", r.result.member);
    head.put("scale_factor", t.factor);
    head.put("transformed_locations", t.game.locations.len());
    head.put("transformed_edges", t.game.edges.len());
    head.put("strict_lower_bound_kept", t.strict_lower_bound_kept);
    head.regions("winning_region", &space, &r.winning);
    head.0.push_str(&m.0);
    finish(out, head)
}

/// Summary of an export.
pub fn export(path: &Path, out_path: &Path, fg: &FiniteGame) -> String {
    let mut out = String::new();
    let mut m = Machine::default();
    writeln!(out, "game: {}", path.display()).unwrap();
    writeln!(
        out,
        "wrote the exact-mode finite game to {}: {} states, {} edges, priorities {}",
        out_path.display(),
        fg.graph.len(),
        fg.graph.edge_count(),
        priorities(fg)
    )
    .unwrap();
    m.put("output", out_path.display());
    m.put("states", fg.graph.len());
    m.put("max_id", fg.graph.len().saturating_sub(1));
    m.put("edges", fg.graph.edge_count());
    m.put("priorities", priorities(fg));
    finish(out, m)
}

/// Report of the three-way comparison.
pub fn compare(
    path: &Path,
    spec: &GameSpec,
    p: BoundedRobustParams,
    r: &InclusionReport,
) -> String {
    let mut out = String::new();
    let mut m = Machine::default();
    let space = RegionSpace::for_game(&spec.game);
    let exact_equals_limit = r.exact.winning == r.limit_robust.winning;
    writeln!(out, "game: {}", path.display()).unwrap();
    writeln!(out, "jitter: {}, response: {}", p.jitter, p.response).unwrap();
    writeln!(out, "start: {}", start_text(spec)).unwrap();
    writeln!(
        out,
        "bounded-robust winning from the start: {}",
        yes(r.bounded.result.member)
    )
    .unwrap();
    writeln!(
        out,
        "limit-robust winning from the start: {}",
        yes(r.limit_robust.member)
    )
    .unwrap();
    writeln!(out, "exact winning from the start: {}", yes(r.exact.member)).unwrap();
    writeln!(
        out,
        "chain bounded-robust <= limit-robust <= exact: {}",
        if r.chain_holds() { "holds" } else { "VIOLATED" }
    )
    .unwrap();
    let set = |v: &[ClockRegion]| v.iter().cloned().collect::<BTreeSet<_>>();
    list_regions(
        &mut out,
        "bounded-robust regions not limit-robust winning",
        &space,
        &set(&r.bounded_not_in_limit),
    );
    list_regions(
        &mut out,
        "limit-robust regions not exactly winning",
        &space,
        &set(&r.limit_not_in_exact),
    );
    list_regions(
        &mut out,
        "witnesses bounded-robust < limit-robust",
        &space,
        &set(&r.witnesses_bounded_strict),
    );
    list_regions(
        &mut out,
        "witnesses limit-robust < exact",
        &space,
        &set(&r.witnesses_limit_strict),
    );
    writeln!(
        out,
        "exact and limit-robust winning regions equal: {}",
        yes(exact_equals_limit)
    )
    .unwrap();

    m.put("jitter", p.jitter);
    m.put("response", p.response);
    m.put("bounded_member", r.bounded.result.member);
    m.put("limit_robust_member", r.limit_robust.member);
    m.put("exact_member", r.exact.member);
    m.put("chain_holds", r.chain_holds());
    m.regions(
        "bounded_not_in_limit",
        &space,
        &set(&r.bounded_not_in_limit),
    );
    m.regions("limit_not_in_exact", &space, &set(&r.limit_not_in_exact));
    m.regions(
        "witness_bounded_strict",
        &space,
        &set(&r.witnesses_bounded_strict),
    );
    m.regions(
        "witness_limit_strict",
        &space,
        &set(&r.witnesses_limit_strict),
    );
    m.put("exact_equals_limit_robust", exact_equals_limit);
    for (name, prefix, res) in [
        ("exact", "exact.", &r.exact),
        ("limit-robust", "limit_robust.", &r.limit_robust),
        ("bounded-robust", "bounded.", &r.bounded.result),
    ] {
        write!(out, "{name} ").unwrap();
        game_stats(&mut out, &mut m, prefix, res);
    }
    finish(out, m)
}
