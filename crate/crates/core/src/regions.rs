//! Clock regions of the enlarged game: every declared clock plus the tick
//! clock `z`, which wraps at 1 and is never saturated.

use std::fmt;

use num_traits::Zero;
use rustc_hash::FxHashSet;
use smallvec::SmallVec;

use crate::model::{ClockId, Constraint, Game, LocId, Q};

/// Class index of a clock whose value exceeds its maximal constant.
pub const SATURATED: i8 = -1;

/// Per-clock storage of a region, inline for the usual handful of clocks.
pub type Cells<T> = SmallVec<[T; 8]>;

/// A clock region together with the `tick` and `bl1` flags.
///
/// `class[x]` is `-1` for clocks above their bound, `0` for clocks with zero
/// fractional part and `1..=n` for the remaining clocks ordered by
/// increasing fractional part. The last clock is the tick clock.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    pub location: LocId,
    pub tick: bool,
    pub bl1: bool,
    pub h: Cells<u16>,
    pub class: Cells<i8>,
}

impl Region {
    /// Highest fractional class index in use (0 if only `C₀` is populated).
    pub fn max_class(&self) -> i8 {
        self.class.iter().copied().max().unwrap_or(0).max(0)
    }

    /// No clock, the tick clock included, has an integral value.
    pub fn is_open(&self) -> bool {
        !self.class.contains(&0)
    }

    pub fn with_flags(&self, tick: bool, bl1: bool) -> Region {
        Region {
            tick,
            bl1,
            ..self.clone()
        }
    }

    fn compact(&mut self) {
        let used = self
            .class
            .iter()
            .filter(|&&c| c > 0)
            .fold(0u128, |m, &c| m | 1 << c);
        for c in self.class.iter_mut() {
            if *c > 0 {
                *c = (used & ((1u128 << *c) - 1)).count_ones() as i8 + 1;
            }
        }
    }
}

/// Shift parameters of a time successor: `k` whole time units, `w` classes
/// wrapped past an integer, and `om` for the open interval right after.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuccessorParams {
    pub k: u32,
    pub w: u32,
    pub om: bool,
}

impl SuccessorParams {
    pub const ZERO: SuccessorParams = SuccessorParams {
        k: 0,
        w: 0,
        om: false,
    };
}

impl fmt::Display for SuccessorParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.k, self.w, u8::from(self.om))
    }
}

/// Region geometry for a fixed clock set and per-clock bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionSpace {
    /// Declared clock names followed by the tick clock's display name.
    pub clock_names: Vec<String>,
    /// Per-clock maximal constant, the tick clock last with bound 1.
    pub bounds: Vec<u32>,
    pub location_names: Vec<String>,
}

impl RegionSpace {
    pub fn for_game(g: &Game) -> RegionSpace {
        RegionSpace::with_bounds(g, g.clock_bounds())
    }

    /// Uses `bounds` instead of the bounds computed from the syntax. Each
    /// entry must be at least the largest constant compared with that clock.
    pub fn with_bounds(g: &Game, bounds: Vec<u32>) -> RegionSpace {
        assert_eq!(bounds.len(), g.clocks.len());
        let mut tick_name = "z".to_string();
        while g.clocks.contains(&tick_name) {
            tick_name.push('\'');
        }
        let mut clock_names = g.clocks.clone();
        clock_names.push(tick_name);
        let mut bounds = bounds;
        bounds.push(1);
        RegionSpace {
            clock_names,
            bounds,
            location_names: g.locations.iter().map(|l| l.name.clone()).collect(),
        }
    }

    /// Number of clocks including the tick clock.
    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn tick_clock(&self) -> ClockId {
        self.bounds.len() - 1
    }

    /// `M`: the largest bound over all clocks.
    pub fn max_constant(&self) -> u32 {
        self.bounds.iter().copied().max().unwrap_or(1)
    }

    /// Region of a concrete valuation. `v` lists every clock, the tick clock
    /// last, which must lie in `[0, 1)`.
    pub fn region_of(&self, location: LocId, v: &[Q], tick: bool, bl1: bool) -> Region {
        assert_eq!(v.len(), self.dim());
        let z = self.tick_clock();
        assert!(
            v[z] >= Q::zero() && v[z] < Q::from_integer(1),
            "tick clock out of [0,1)"
        );
        let mut h = vec![0u16; self.dim()];
        let mut class = vec![0i8; self.dim()];
        let mut fracs: Vec<Q> = Vec::new();
        for x in 0..self.dim() {
            let c = Q::from_integer(self.bounds[x] as i64);
            if x != z && v[x] > c {
                h[x] = self.bounds[x] as u16;
                class[x] = SATURATED;
                continue;
            }
            h[x] = v[x].floor().to_integer() as u16;
            let frac = v[x] - v[x].floor();
            if !frac.is_zero() {
                fracs.push(frac);
            }
        }
        fracs.sort();
        fracs.dedup();
        for x in 0..self.dim() {
            if class[x] == SATURATED {
                continue;
            }
            let frac = v[x] - v[x].floor();
            if !frac.is_zero() {
                class[x] = fracs.binary_search(&frac).unwrap() as i8 + 1;
            }
        }
        Region {
            location,
            tick,
            bl1,
            h: h.into(),
            class: class.into(),
        }
    }

    /// Canonical member: `h + i/(n+2)` for class `i ≥ 0`, `c + 1/2` when saturated.
    pub fn representative(&self, r: &Region) -> Vec<Q> {
        let denom = r.max_class() as i64 + 2;
        (0..self.dim())
            .map(|x| {
                if r.class[x] == SATURATED {
                    Q::from_integer(self.bounds[x] as i64) + Q::new(1, 2)
                } else {
                    Q::from_integer(r.h[x] as i64) + Q::new(r.class[x] as i64, denom)
                }
            })
            .collect()
    }

    /// Whether every member of `r` satisfies `c`. Constants in `c` must be
    /// integers not exceeding the bound of their clock.
    pub fn satisfies(&self, r: &Region, c: &Constraint) -> bool {
        match c {
            Constraint::True => true,
            Constraint::Le(x, d) => {
                let d = integral(d);
                match r.class[*x] {
                    SATURATED => false,
                    0 => r.h[*x] as i64 <= d,
                    _ => (r.h[*x] as i64) < d,
                }
            }
            Constraint::Ge(x, d) => {
                let d = integral(d);
                r.class[*x] == SATURATED || r.h[*x] as i64 >= d
            }
            Constraint::Not(inner) => !self.satisfies(r, inner),
            Constraint::And(a, b) => self.satisfies(r, a) && self.satisfies(r, b),
        }
    }

    /// The time successor of `src` described by `p`. Flags: `bl1` is kept,
    /// `tick` records whether the tick clock passed an integer.
    pub fn second_region(&self, src: &Region, p: SuccessorParams) -> Region {
        let n = src.max_class() as u32;
        let z = self.tick_clock();
        let mut out = src.clone();
        for x in 0..self.dim() {
            let j = src.class[x];
            if j == SATURATED {
                continue;
            }
            let j = j as u32;
            let crosses = j + p.w > n;
            let hmax = src.h[x] as u32 + p.k + u32::from(crosses);
            let pos = (j + p.w) % (n + 1) + u32::from(p.om);
            if x == z {
                out.h[x] = 0;
                out.class[x] = pos as i8;
                continue;
            }
            let c = self.bounds[x];
            let saturate = if pos == 0 { hmax > c } else { hmax >= c };
            if saturate {
                out.h[x] = c as u16;
                out.class[x] = SATURATED;
            } else {
                out.h[x] = hmax as u16;
                out.class[x] = pos as i8;
            }
        }
        out.compact();
        let zc = src.class[z] as u32;
        out.tick = p.k > 0 || p.w > n - zc;
        out
    }

    /// All parameter triples in canonical (lexicographic) order. `k` runs up
    /// to `M + 1`: after every clock has saturated, the tick clock still needs
    /// one more unit to come back to an integer.
    pub fn successor_params(&self, src: &Region) -> impl Iterator<Item = SuccessorParams> {
        let n = src.max_class() as u32;
        let m = self.max_constant() + 1;
        (0..=m).flat_map(move |k| {
            (0..=n).flat_map(move |w| {
                [false, true]
                    .into_iter()
                    .map(move |om| SuccessorParams { k, w, om })
            })
        })
    }

    /// Distinct time successors of `src` in order of first occurrence; the
    /// first entry is `src` itself (with `tick` cleared).
    pub fn time_successors(&self, src: &Region) -> Vec<(SuccessorParams, Region)> {
        let mut seen = FxHashSet::default();
        let mut out = Vec::new();
        for p in self.successor_params(src) {
            let r = self.second_region(src, p);
            if out.last().is_some_and(|(_, last)| *last == r) {
                continue;
            }
            if seen.insert(r.clone()) {
                out.push((p, r));
            }
        }
        out
    }

    /// Moves to `target`, resetting `resets` to 0.
    pub fn jump(&self, r: &Region, target: LocId, resets: &[ClockId]) -> Region {
        let mut out = r.clone();
        out.location = target;
        for &x in resets {
            out.h[x] = 0;
            out.class[x] = 0;
        }
        out.compact();
        out
    }

    /// Checks the structural invariants of a region.
    pub fn check(&self, r: &Region) -> Result<(), String> {
        if r.h.len() != self.dim() || r.class.len() != self.dim() {
            return Err("dimension mismatch".into());
        }
        let z = self.tick_clock();
        if r.class[z] == SATURATED || r.h[z] != 0 {
            return Err("tick clock must stay in [0,1)".into());
        }
        let n = r.max_class();
        for i in 1..=n {
            if !r.class.contains(&i) {
                return Err(format!("class {i} is empty"));
            }
        }
        for x in 0..self.dim() {
            if r.class[x] < SATURATED {
                return Err("invalid class index".into());
            }
            if r.class[x] == SATURATED && r.h[x] as u32 != self.bounds[x] {
                return Err(format!(
                    "saturated clock {} has h below its bound",
                    self.clock_names[x]
                ));
            }
            if r.class[x] != SATURATED && r.h[x] as u32 > self.bounds[x] {
                return Err(format!("clock {} exceeds its bound", self.clock_names[x]));
            }
            if r.class[x] > 0 && r.h[x] as u32 == self.bounds[x] {
                return Err(format!(
                    "clock {} above its bound is not saturated",
                    self.clock_names[x]
                ));
            }
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, r: &'a Region) -> RegionDisplay<'a> {
        RegionDisplay {
            space: self,
            region: r,
        }
    }
}

/// Region of the declared clocks only: the tick clock (and any other
/// dropped clock) projected away. Winning is decided per clock region.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockRegion {
    pub location: LocId,
    pub h: Cells<u16>,
    pub class: Cells<i8>,
}

impl ClockRegion {
    pub fn is_open(&self) -> bool {
        !self.class.contains(&0)
    }
}

impl RegionSpace {
    /// Keeps the clocks listed in `keep` (in that order), relabelling the
    /// location with `location`.
    pub fn project(&self, r: &Region, keep: &[ClockId], location: LocId) -> ClockRegion {
        let mut out = Region {
            location,
            tick: false,
            bl1: false,
            h: keep.iter().map(|&x| r.h[x]).collect(),
            class: keep.iter().map(|&x| r.class[x]).collect(),
        };
        out.compact();
        ClockRegion {
            location: out.location,
            h: out.h,
            class: out.class,
        }
    }

    /// Projection onto the declared clocks.
    pub fn clock_region(&self, r: &Region) -> ClockRegion {
        let keep: Vec<ClockId> = (0..self.tick_clock()).collect();
        self.project(r, &keep, r.location)
    }

    /// Region of a valuation of the declared clocks.
    pub fn clock_region_of(&self, location: LocId, v: &[Q]) -> ClockRegion {
        let mut full = v.to_vec();
        full.push(Q::zero());
        self.clock_region(&self.region_of(location, &full, false, false))
    }

    /// A valuation of the declared clocks inside `r`.
    pub fn clock_representative(&self, r: &ClockRegion) -> Vec<Q> {
        let n = r.class.iter().copied().max().unwrap_or(0).max(0) as i64;
        (0..r.h.len())
            .map(|x| match r.class[x] {
                SATURATED => Q::from_integer(self.bounds[x] as i64) + Q::new(1, 2),
                i => Q::from_integer(r.h[x] as i64) + Q::new(i as i64, n + 2),
            })
            .collect()
    }

    pub fn display_clock_region<'a>(&'a self, r: &'a ClockRegion) -> ClockRegionDisplay<'a> {
        ClockRegionDisplay {
            space: self,
            region: r,
        }
    }
}

pub struct ClockRegionDisplay<'a> {
    space: &'a RegionSpace,
    region: &'a ClockRegion,
}

impl fmt::Display for ClockRegionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.region;
        let s = self.space;
        let loc = s
            .location_names
            .get(r.location)
            .map(String::as_str)
            .unwrap_or("?");
        write!(f, "{loc} | h:")?;
        for x in 0..r.h.len() {
            write!(f, " {}={}", s.clock_names[x], r.h[x])?;
        }
        write!(f, " |")?;
        if r.h.is_empty() {
            return Ok(());
        }
        write!(f, " ")?;
        let block = |f: &mut fmt::Formatter<'_>, i: i8| -> fmt::Result {
            let names: Vec<&str> = (0..r.h.len())
                .filter(|&x| r.class[x] == i)
                .map(|x| s.clock_names[x].as_str())
                .collect();
            write!(f, "{{{}}}", names.join(","))
        };
        if r.class.contains(&SATURATED) {
            write!(f, ">")?;
            block(f, SATURATED)?;
            write!(f, " ")?;
        }
        let n = r.class.iter().copied().max().unwrap_or(0).max(0);
        for i in 0..=n {
            block(f, i)?;
        }
        Ok(())
    }
}

fn integral(d: &Q) -> i64 {
    debug_assert!(d.is_integer(), "region constraints need integral constants");
    d.to_integer()
}

pub struct RegionDisplay<'a> {
    space: &'a RegionSpace,
    region: &'a Region,
}

impl fmt::Display for RegionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.region;
        let s = self.space;
        let loc = s
            .location_names
            .get(r.location)
            .map(String::as_str)
            .unwrap_or("?");
        write!(f, "{loc} | h:")?;
        for x in 0..s.dim() {
            write!(f, " {}={}", s.clock_names[x], r.h[x])?;
        }
        write!(f, " | ")?;
        let block = |f: &mut fmt::Formatter<'_>, i: i8| -> fmt::Result {
            let names: Vec<&str> = (0..s.dim())
                .filter(|&x| r.class[x] == i)
                .map(|x| s.clock_names[x].as_str())
                .collect();
            write!(f, "{{{}}}", names.join(","))
        };
        if r.class.contains(&SATURATED) {
            write!(f, ">")?;
            block(f, SATURATED)?;
            write!(f, " ")?;
        }
        for i in 0..=r.max_class() {
            block(f, i)?;
        }
        write!(f, " | tick={} bl1={}", u8::from(r.tick), u8::from(r.bl1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{q, Edge, Location, Player};

    fn game(clocks: &[&str], guard: Constraint) -> Game {
        Game {
            clocks: clocks.iter().map(|s| s.to_string()).collect(),
            locations: vec![Location {
                name: "l0".into(),
                invariant: Constraint::True,
                priority: 0,
            }],
            edges: vec![Edge {
                action: "a".into(),
                player: Player::One,
                from: 0,
                to: 0,
                guard,
                resets: vec![],
            }],
        }
    }

    fn xy_space() -> RegionSpace {
        let g = game(&["x", "y"], Constraint::le(0, 2).and(Constraint::le(1, 2)));
        RegionSpace::for_game(&g)
    }

    #[test]
    fn classifies_valuations() {
        let s = xy_space();
        let r = s.region_of(0, &[Q::zero(), Q::zero(), Q::zero()], false, false);
        assert_eq!(&*r.class, &[0, 0, 0]);
        assert_eq!(&*r.h, &[0, 0, 0]);

        let r = s.region_of(0, &[q(6, 5), q(7, 10), q(1, 5)], false, false);
        assert_eq!(&*r.h, &[1, 0, 0]);
        assert_eq!(&*r.class, &[1, 2, 1]);
        assert!(r.is_open());

        let r = s.region_of(0, &[q(7, 2), Q::zero(), Q::zero()], false, false);
        assert_eq!(r.class[0], SATURATED);
        assert_eq!(r.h[0], 2);
    }

    #[test]
    fn representatives_follow_the_formula() {
        let s = xy_space();
        let r = s.region_of(0, &[q(1, 3), q(2, 3), Q::zero()], false, false);
        assert_eq!(s.representative(&r), vec![q(1, 4), q(2, 4), Q::zero()]);
        let r = s.region_of(0, &[q(7, 2), Q::zero(), Q::zero()], false, false);
        assert_eq!(s.representative(&r)[0], q(5, 2));
    }

    #[test]
    fn region_evaluation() {
        let s = xy_space();
        let half = s.region_of(0, &[q(1, 2), Q::zero(), Q::zero()], false, false);
        assert!(s.satisfies(&half, &Constraint::le(0, 1)));
        let one = s.region_of(0, &[Q::from_integer(1), Q::zero(), Q::zero()], false, false);
        assert!(!s.satisfies(&one, &Constraint::gt(0, 1)));
        assert!(s.satisfies(&one, &Constraint::ge(0, 1)));
        assert!(!s.satisfies(&half, &Constraint::ge(0, 1)));
    }

    #[test]
    fn second_region_examples() {
        let s = RegionSpace::for_game(&game(&["x"], Constraint::le(0, 1)));
        let src = s.region_of(0, &[Q::zero(), Q::zero()], false, false);
        let open = s.second_region(
            &src,
            SuccessorParams {
                k: 0,
                w: 0,
                om: true,
            },
        );
        assert_eq!(&*open.class, &[1, 1]);
        assert!(!open.tick);
        let unit = s.second_region(
            &src,
            SuccessorParams {
                k: 1,
                w: 0,
                om: false,
            },
        );
        assert_eq!(&*unit.h, &[1, 0]);
        assert_eq!(&*unit.class, &[0, 0]);
        assert!(unit.tick);
        assert_eq!(s.second_region(&src, SuccessorParams::ZERO), src);
    }

    #[test]
    fn one_clock_successor_sequence() {
        let s = RegionSpace::for_game(&game(&["x"], Constraint::le(0, 1)));
        let src = s.region_of(0, &[Q::zero(), Q::zero()], false, false);
        let succ: Vec<String> = s
            .time_successors(&src)
            .iter()
            .map(|(_, r)| s.display(r).to_string())
            .collect();
        assert_eq!(
            succ,
            vec![
                "l0 | h: x=0 z=0 | {x,z} | tick=0 bl1=0",
                "l0 | h: x=0 z=0 | {}{x,z} | tick=0 bl1=0",
                "l0 | h: x=1 z=0 | {x,z} | tick=1 bl1=0",
                "l0 | h: x=1 z=0 | >{x} {}{z} | tick=1 bl1=0",
                "l0 | h: x=1 z=0 | >{x} {z} | tick=1 bl1=0",
            ]
        );
    }

    #[test]
    fn jump_resets_and_compacts() {
        let s = xy_space();
        let r = s.region_of(0, &[q(1, 2), q(1, 2), q(1, 4)], false, false);
        assert_eq!(&*r.class, &[2, 2, 1]);
        let j = s.jump(&r, 0, &[0]);
        assert_eq!(&*j.class, &[0, 2, 1]);
        let r = s.region_of(0, &[q(1, 2), q(1, 2), Q::zero()], false, false);
        let j = s.jump(&r, 0, &[0]);
        assert_eq!(&*j.class, &[0, 1, 0]);
        assert_eq!(s.jump(&r, 0, &[]), r);
    }

    #[test]
    fn display_format() {
        let s = xy_space();
        let r = s.region_of(0, &[Q::from_integer(1), q(1, 2), Q::zero()], false, false);
        assert_eq!(
            s.display(&r).to_string(),
            "l0 | h: x=1 y=0 z=0 | {x,z}{y} | tick=0 bl1=0"
        );
    }
}
