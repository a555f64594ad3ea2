//! Timed automaton games: clock constraints, locations, edges and the
//! syntactic transformations (guard tightening, constant rescaling) used by
//! the robust pipelines.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

/// Exact rational used for clock values and (pre-rescaling) constants.
pub type Q = num_rational::Ratio<i64>;

pub type ClockId = usize;
pub type LocId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Index used in the PGSolver owner column (0 = even/player 1).
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn from_parity(priority: u32) -> Player {
        if priority.is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::One => write!(f, "1"),
            Player::Two => write!(f, "2"),
        }
    }
}

/// Clock constraint over the grammar `x <= d | d <= x | !c | c && c`, plus a
/// dedicated always-true leaf. Strict comparisons are negations:
/// `x < d` is `!(d <= x)` and `x > d` is `!(x <= d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    True,
    /// `x <= d`
    Le(ClockId, Q),
    /// `d <= x`
    Ge(ClockId, Q),
    Not(Box<Constraint>),
    And(Box<Constraint>, Box<Constraint>),
}

impl Constraint {
    pub fn le(x: ClockId, d: i64) -> Self {
        Constraint::Le(x, Q::from_integer(d))
    }

    pub fn ge(x: ClockId, d: i64) -> Self {
        Constraint::Ge(x, Q::from_integer(d))
    }

    /// `x < d`
    pub fn lt(x: ClockId, d: i64) -> Self {
        Constraint::Not(Box::new(Constraint::ge(x, d)))
    }

    /// `x > d`
    pub fn gt(x: ClockId, d: i64) -> Self {
        Constraint::Not(Box::new(Constraint::le(x, d)))
    }

    pub fn falsum() -> Self {
        Constraint::Not(Box::new(Constraint::True))
    }

    pub fn and(self, other: Constraint) -> Self {
        Constraint::And(Box::new(self), Box::new(other))
    }

    /// Conjunction of `parts`, leaving out `true` operands; `True` when none remain.
    pub fn all(parts: impl IntoIterator<Item = Constraint>) -> Self {
        let mut iter = parts.into_iter().filter(|c| *c != Constraint::True);
        match iter.next() {
            None => Constraint::True,
            Some(first) => iter.fold(first, Constraint::and),
        }
    }

    pub fn eval(&self, v: &[Q]) -> bool {
        match self {
            Constraint::True => true,
            Constraint::Le(x, d) => v[*x] <= *d,
            Constraint::Ge(x, d) => *d <= v[*x],
            Constraint::Not(c) => !c.eval(v),
            Constraint::And(a, b) => a.eval(v) && b.eval(v),
        }
    }

    /// Visits every atom as `(clock, constant)`.
    pub fn atoms(&self) -> Vec<(ClockId, Q)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<(ClockId, Q)>) {
        match self {
            Constraint::True => {}
            Constraint::Le(x, d) | Constraint::Ge(x, d) => out.push((*x, *d)),
            Constraint::Not(c) => c.collect_atoms(out),
            Constraint::And(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn map_constants(&self, f: &impl Fn(Q) -> Q) -> Constraint {
        match self {
            Constraint::True => Constraint::True,
            Constraint::Le(x, d) => Constraint::Le(*x, f(*d)),
            Constraint::Ge(x, d) => Constraint::Ge(*x, f(*d)),
            Constraint::Not(c) => Constraint::Not(Box::new(c.map_constants(f))),
            Constraint::And(a, b) => {
                Constraint::And(Box::new(a.map_constants(f)), Box::new(b.map_constants(f)))
            }
        }
    }

    /// True when the constraint denotes an open set of valuations.
    pub fn is_open(&self) -> bool {
        self.open_under(true)
    }

    fn open_under(&self, positive: bool) -> bool {
        match self {
            Constraint::True => true,
            // x <= d is closed; its negation x > d is open
            Constraint::Le(_, _) => !positive,
            // d <= x is closed unless d = 0; its negation x < d is open
            Constraint::Ge(_, d) => !positive || d.is_zero(),
            Constraint::Not(c) => c.open_under(!positive),
            Constraint::And(a, b) => a.open_under(positive) && b.open_under(positive),
        }
    }

    /// Splits a constraint of the conjunctive fragment into atoms.
    /// Returns `None` when a negation wraps anything other than an atom or `true`.
    pub fn conjuncts(&self) -> Option<Vec<Atom>> {
        let mut out = Vec::new();
        if self.push_conjuncts(&mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn push_conjuncts(&self, out: &mut Vec<Atom>) -> bool {
        match self {
            Constraint::True => true,
            Constraint::Le(x, d) => {
                out.push(Atom::Le(*x, *d));
                true
            }
            Constraint::Ge(x, d) => {
                out.push(Atom::Ge(*x, *d));
                true
            }
            Constraint::Not(inner) => match inner.as_ref() {
                Constraint::Le(x, d) => {
                    out.push(Atom::Gt(*x, *d));
                    true
                }
                Constraint::Ge(x, d) => {
                    out.push(Atom::Lt(*x, *d));
                    true
                }
                Constraint::True => {
                    out.push(Atom::False);
                    true
                }
                _ => false,
            },
            Constraint::And(a, b) => a.push_conjuncts(out) && b.push_conjuncts(out),
        }
    }

    pub fn display<'a>(&'a self, clocks: &'a [String]) -> ConstraintDisplay<'a> {
        ConstraintDisplay {
            constraint: self,
            clocks,
        }
    }
}

/// Atom of the conjunctive fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    Le(ClockId, Q),
    Ge(ClockId, Q),
    Lt(ClockId, Q),
    Gt(ClockId, Q),
    False,
}

impl Atom {
    pub fn into_constraint(self) -> Constraint {
        match self {
            Atom::Le(x, d) => Constraint::Le(x, d),
            Atom::Ge(x, d) => Constraint::Ge(x, d),
            Atom::Lt(x, d) => Constraint::Not(Box::new(Constraint::Ge(x, d))),
            Atom::Gt(x, d) => Constraint::Not(Box::new(Constraint::Le(x, d))),
            Atom::False => Constraint::falsum(),
        }
    }
}

fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub struct ConstraintDisplay<'a> {
    constraint: &'a Constraint,
    clocks: &'a [String],
}

impl ConstraintDisplay<'_> {
    fn write(&self, c: &Constraint, nested_and: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |x: &ClockId| self.clocks[*x].as_str();
        match c {
            Constraint::True => write!(f, "true"),
            Constraint::Le(x, d) => write!(f, "{} <= {}", name(x), fmt_q(d)),
            Constraint::Ge(x, d) => write!(f, "{} >= {}", name(x), fmt_q(d)),
            Constraint::Not(inner) => match inner.as_ref() {
                Constraint::Le(x, d) => write!(f, "{} > {}", name(x), fmt_q(d)),
                Constraint::Ge(x, d) => write!(f, "{} < {}", name(x), fmt_q(d)),
                Constraint::True => write!(f, "!true"),
                other => {
                    write!(f, "!(")?;
                    self.write(other, false, f)?;
                    write!(f, ")")
                }
            },
            Constraint::And(a, b) => {
                if nested_and {
                    write!(f, "(")?;
                }
                self.write(a, false, f)?;
                write!(f, " && ")?;
                // right-nested conjunctions need parentheses to survive a
                // left-associative re-parse
                self.write(b, matches!(b.as_ref(), Constraint::And(..)), f)?;
                if nested_and {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ConstraintDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.constraint, false, f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{message} at offset {offset}")]
pub struct ConstraintParseError {
    pub offset: usize,
    pub message: String,
}

/// Parses the textual constraint syntax: comparisons `<=`, `<`, `>=`, `>`
/// between a declared clock and a natural constant (either side), `!`,
/// `&&`, parentheses and `true`.
pub fn parse_constraint(text: &str, clocks: &[String]) -> Result<Constraint, ConstraintParseError> {
    let mut p = ConstraintParser {
        src: text.as_bytes(),
        pos: 0,
        clocks,
    };
    let c = p.conjunction()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(c)
}

struct ConstraintParser<'a> {
    src: &'a [u8],
    pos: usize,
    clocks: &'a [String],
}

#[derive(Clone, Copy, PartialEq)]
enum Cmp {
    Le,
    Lt,
    Ge,
    Gt,
}

impl ConstraintParser<'_> {
    fn error(&self, message: impl Into<String>) -> ConstraintParseError {
        ConstraintParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn conjunction(&mut self) -> Result<Constraint, ConstraintParseError> {
        let mut acc = self.unary()?;
        while self.eat("&&") {
            let rhs = self.unary()?;
            acc = acc.and(rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Constraint, ConstraintParseError> {
        self.skip_ws();
        if self.eat("!") {
            let inner = self.unary()?;
            return Ok(Constraint::Not(Box::new(inner)));
        }
        if self.eat("(") {
            let inner = self.conjunction()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(inner);
        }
        self.comparison()
    }

    fn cmp(&mut self) -> Option<Cmp> {
        if self.eat("<=") {
            Some(Cmp::Le)
        } else if self.eat(">=") {
            Some(Cmp::Ge)
        } else if self.eat("<") {
            Some(Cmp::Lt)
        } else if self.eat(">") {
            Some(Cmp::Gt)
        } else {
            None
        }
    }

    fn comparison(&mut self) -> Result<Constraint, ConstraintParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(first) = self.token() else {
            return Err(self.error("expected a clock, a constant or 'true'"));
        };
        if first == "true" {
            return Ok(Constraint::True);
        }
        let cmp_pos = self.pos;
        let Some(op) = self.cmp() else {
            self.pos = cmp_pos;
            return Err(self.error("expected a comparison operator"));
        };
        self.skip_ws();
        let second_pos = self.pos;
        let Some(second) = self.token() else {
            return Err(self.error("expected a clock or a constant"));
        };
        let first_is_clock = first
            .chars()
            .next()
            .is_some_and(|c| c.is_alphabetic() || c == '_');
        let (clock, clock_pos, constant, constant_pos, op) = if first_is_clock {
            (first, start, second, second_pos, op)
        } else {
            // `d op x` is `x op' d` with the comparison mirrored
            let mirrored = match op {
                Cmp::Le => Cmp::Ge,
                Cmp::Lt => Cmp::Gt,
                Cmp::Ge => Cmp::Le,
                Cmp::Gt => Cmp::Lt,
            };
            (second, second_pos, first, start, mirrored)
        };
        let Some(x) = self.clocks.iter().position(|c| c == &clock) else {
            return Err(ConstraintParseError {
                offset: clock_pos,
                message: format!("undeclared clock '{clock}'"),
            });
        };
        let d: i64 = if !constant.is_empty() && constant.bytes().all(|b| b.is_ascii_digit()) {
            constant.parse().map_err(|_| ConstraintParseError {
                offset: constant_pos,
                message: format!("constant '{constant}' out of range"),
            })?
        } else {
            return Err(ConstraintParseError {
                offset: constant_pos,
                message: format!("expected a nonnegative integer constant, found '{constant}'"),
            });
        };
        Ok(match op {
            Cmp::Le => Constraint::le(x, d),
            Cmp::Ge => Constraint::ge(x, d),
            Cmp::Lt => Constraint::lt(x, d),
            Cmp::Gt => Constraint::gt(x, d),
        })
    }

    /// Identifier or number token; a leading '-' or '.' is kept so that bad
    /// constants are reported as such rather than as syntax errors.
    fn token(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let b = self.src[self.pos];
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || b == b'.' || b == b'/' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            None
        } else {
            Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TightenError {
    #[error(
        "guard is not a conjunction of atoms; jitter tightening needs the conjunctive fragment"
    )]
    NonConjunctiveGuard,
}

/// Quantifier-free form of "the constraint holds at every `x + δ`, `δ ∈ [0, eps]`"
/// on the conjunctive fragment. Upper bounds shrink by `eps`; lower bounds are
/// binding at `δ = 0` and stay put.
pub fn tighten_upper(c: &Constraint, eps: Q) -> Result<Constraint, TightenError> {
    let atoms = c.conjuncts().ok_or(TightenError::NonConjunctiveGuard)?;
    let tightened = atoms.into_iter().map(|atom| match atom {
        Atom::Le(x, d) => {
            let b = d - eps;
            if b < Q::zero() {
                Atom::False
            } else {
                Atom::Le(x, b)
            }
        }
        Atom::Lt(x, d) => {
            let b = d - eps;
            if b <= Q::zero() {
                Atom::False
            } else {
                Atom::Lt(x, b)
            }
        }
        other => other,
    });
    // an atom list that was just `true` stays `true`
    Ok(Constraint::all(tightened.map(Atom::into_constraint)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub invariant: Constraint,
    pub priority: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Action label; unique among the edges leaving `from`.
    pub action: String,
    pub player: Player,
    pub from: LocId,
    pub to: LocId,
    pub guard: Constraint,
    /// Sorted, deduplicated.
    pub resets: Vec<ClockId>,
}

/// A timed automaton game with a location parity index function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub clocks: Vec<String>,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
}

impl Game {
    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name)
    }

    pub fn location_id(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn edges_from(&self, l: LocId) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.from == l)
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.locations
            .iter()
            .map(|l| &l.invariant)
            .chain(self.edges.iter().map(|e| &e.guard))
    }

    /// Largest constant each clock is compared against; 1 when a clock is
    /// never compared (or only against 0). Constants must be integral.
    pub fn clock_bounds(&self) -> Vec<u32> {
        let mut bounds = vec![1u32; self.clocks.len()];
        for c in self.constraints() {
            for (x, d) in c.atoms() {
                let v = d.ceil().to_integer().max(0) as u32;
                bounds[x] = bounds[x].max(v);
            }
        }
        bounds
    }

    pub fn max_constant(&self) -> u32 {
        self.clock_bounds().into_iter().max().unwrap_or(1)
    }

    /// Number of priorities `d` (Ω maps into `{0, …, d-1}`).
    pub fn order(&self) -> u32 {
        self.locations
            .iter()
            .map(|l| l.priority + 1)
            .max()
            .unwrap_or(1)
    }

    pub fn has_integral_constants(&self) -> bool {
        self.constraints()
            .all(|c| c.atoms().iter().all(|(_, d)| d.is_integer()))
    }

    pub fn is_open(&self) -> bool {
        self.constraints().all(Constraint::is_open)
    }

    pub fn player_edge_count(&self, p: Player) -> usize {
        self.edges.iter().filter(|e| e.player == p).count()
    }
}

/// Multiplies every constant by the lcm of all denominators in the game and
/// in `extra`, returning the integer-constant game and the factor.
/// A state `⟨l, κ⟩` of `g` corresponds to `⟨l, factor·κ⟩` of the result.
pub fn rescale_constants(g: &Game, extra: &[Q]) -> (Game, i64) {
    let mut factor: i64 = 1;
    for c in g.constraints() {
        for (_, d) in c.atoms() {
            factor = factor.lcm(d.denom());
        }
    }
    for q in extra {
        factor = factor.lcm(q.denom());
    }
    if factor == 1 {
        return (g.clone(), 1);
    }
    let scale = Q::from_integer(factor);
    let f = |d: Q| d * scale;
    let mut out = g.clone();
    for l in &mut out.locations {
        l.invariant = l.invariant.map_constants(&f);
    }
    for e in &mut out.edges {
        e.guard = e.guard.map_constants(&f);
    }
    (out, factor)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    /// Pairs `(location, action)` labelling more than one outgoing edge.
    pub duplicate_actions: Vec<(LocId, String)>,
    /// Every guard and invariant denotes an open set.
    pub open: bool,
    /// Per-clock maximal constant `c_x`.
    pub bounds: Vec<u32>,
    /// Priorities are not a prefix `{0, …, d-1}`.
    pub priority_gaps: Vec<u32>,
    pub non_integral_constants: bool,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    /// Structural problems that make the game unusable for the reduction.
    pub fn is_clean(&self) -> bool {
        self.duplicate_actions.is_empty() && !self.non_integral_constants
    }
}

pub fn validate_game(g: &Game) -> ValidationReport {
    let mut seen = BTreeSet::new();
    let mut dups = BTreeSet::new();
    for e in &g.edges {
        if !seen.insert((e.from, e.action.clone())) {
            dups.insert((e.from, e.action.clone()));
        }
    }
    let used: BTreeSet<u32> = g.locations.iter().map(|l| l.priority).collect();
    let priority_gaps = (0..g.order()).filter(|p| !used.contains(p)).collect();
    ValidationReport {
        duplicate_actions: dups.into_iter().collect(),
        open: g.is_open(),
        bounds: g.clock_bounds(),
        priority_gaps,
        non_integral_constants: !g.has_integral_constants(),
        warnings: vec![
            "receptiveness (well-formedness) of the game is assumed, not checked".to_string(),
        ],
    }
}

/// Least common multiple of the denominators of `qs`.
pub fn lcm_of_denominators(qs: &[Q]) -> i64 {
    qs.iter().fold(1i64, |acc, q| acc.lcm(q.denom()))
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn xy() -> Vec<String> {
        vec!["x".to_string(), "y".to_string()]
    }

    #[test]
    fn parses_atoms_and_desugars_strict() {
        let clocks = xy();
        assert_eq!(
            parse_constraint("x <= 1", &clocks).unwrap(),
            Constraint::le(0, 1)
        );
        assert_eq!(
            parse_constraint("x > 1", &clocks).unwrap(),
            Constraint::gt(0, 1)
        );
        assert_eq!(
            parse_constraint("x <= 1 && !(y <= 2)", &clocks).unwrap(),
            Constraint::le(0, 1).and(Constraint::Not(Box::new(Constraint::le(1, 2))))
        );
        assert_eq!(
            parse_constraint("2 <= y", &clocks).unwrap(),
            Constraint::ge(1, 2)
        );
        assert_eq!(
            parse_constraint("3 > x", &clocks).unwrap(),
            Constraint::lt(0, 3)
        );
        assert_eq!(
            parse_constraint(" true ", &clocks).unwrap(),
            Constraint::True
        );
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let clocks = xy();
        let e = parse_constraint("x <= 1 && w < 2", &clocks).unwrap_err();
        assert_eq!(e.offset, 10);
        assert!(e.message.contains("undeclared clock 'w'"));
        let e = parse_constraint("x <= -1", &clocks).unwrap_err();
        assert!(e.message.contains("nonnegative integer"));
        let e = parse_constraint("x <= 1/2", &clocks).unwrap_err();
        assert!(e.message.contains("nonnegative integer"));
        let e = parse_constraint("x <= 1 &&", &clocks).unwrap_err();
        assert_eq!(e.offset, 9);
        assert!(parse_constraint("x 1", &clocks).is_err());
        assert!(parse_constraint("(x <= 1", &clocks).is_err());
    }

    #[test]
    fn evaluation_is_exact() {
        let clocks = xy();
        let c = parse_constraint("x <= 1", &clocks).unwrap();
        assert!(c.eval(&[q(1, 2), Q::zero()]));
        let c = parse_constraint("x > 1", &clocks).unwrap();
        assert!(!c.eval(&[Q::from_integer(1), Q::zero()]));
        let c = parse_constraint("x <= 1 && 1 <= y", &clocks).unwrap();
        assert!(!c.eval(&[q(6, 5), Q::from_integer(2)]));
    }

    #[test]
    fn tightening_shrinks_upper_bounds_only() {
        let eps = q(1, 10);
        assert_eq!(
            tighten_upper(&Constraint::le(0, 1), eps).unwrap(),
            Constraint::Le(0, q(9, 10))
        );
        assert_eq!(
            tighten_upper(&Constraint::ge(0, 2), eps).unwrap(),
            Constraint::ge(0, 2)
        );
        let c = Constraint::lt(0, 3).and(Constraint::ge(1, 1));
        assert_eq!(
            tighten_upper(&c, q(1, 2)).unwrap(),
            Constraint::Not(Box::new(Constraint::Ge(0, q(5, 2)))).and(Constraint::ge(1, 1))
        );
        // strict lower bound is left alone
        assert_eq!(
            tighten_upper(&Constraint::gt(1, 1), eps).unwrap(),
            Constraint::gt(1, 1)
        );
        assert_eq!(
            tighten_upper(&Constraint::True, eps).unwrap(),
            Constraint::True
        );
    }

    #[test]
    fn tightening_below_zero_is_unsatisfiable() {
        let c = tighten_upper(&Constraint::le(0, 0), q(1, 10)).unwrap();
        assert_eq!(c, Constraint::falsum());
        assert!(!c.eval(&[Q::zero(), Q::zero()]));
        let c = tighten_upper(&Constraint::lt(0, 1), Q::one()).unwrap();
        assert_eq!(c, Constraint::falsum());
    }

    #[test]
    fn tightening_rejects_disjunctions() {
        let c = Constraint::Not(Box::new(Constraint::gt(0, 1).and(Constraint::lt(0, 2))));
        assert_eq!(
            tighten_upper(&c, q(1, 10)),
            Err(TightenError::NonConjunctiveGuard)
        );
    }

    fn one_clock_game(guard: Constraint) -> Game {
        Game {
            clocks: vec!["x".into()],
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

    #[test]
    fn rescaling_uses_lcm_of_denominators() {
        let g = one_clock_game(Constraint::le(0, 1));
        let (h, f) = rescale_constants(&g, &[q(1, 10), Q::zero()]);
        assert_eq!(f, 10);
        assert_eq!(h.edges[0].guard, Constraint::le(0, 10));
        let (h, f) = rescale_constants(&g, &[]);
        assert_eq!(f, 1);
        assert_eq!(h, g);
        let (_, f) = rescale_constants(&g, &[q(1, 10), q(1, 4)]);
        assert_eq!(f, 20);
    }

    #[test]
    fn validation_reports_determinism_and_openness() {
        let mut g = one_clock_game(Constraint::le(0, 1));
        let r = validate_game(&g);
        assert!(!r.open);
        assert!(r.duplicate_actions.is_empty());
        assert_eq!(r.bounds, vec![1]);

        g.edges[0].guard = Constraint::lt(0, 2).and(Constraint::gt(0, 1));
        assert!(validate_game(&g).open);

        g.edges.push(g.edges[0].clone());
        let r = validate_game(&g);
        assert_eq!(r.duplicate_actions, vec![(0, "a".to_string())]);
        assert!(!r.is_clean());
    }

    #[test]
    fn unconstrained_clock_gets_bound_one() {
        let mut g = one_clock_game(Constraint::True);
        g.clocks.push("y".into());
        g.edges[0].resets = vec![1];
        assert_eq!(g.clock_bounds(), vec![1, 1]);
    }

    #[test]
    fn printing_uses_surface_syntax() {
        let clocks = xy();
        let c = Constraint::gt(0, 1).and(Constraint::Not(Box::new(
            Constraint::le(0, 1).and(Constraint::ge(1, 2)),
        )));
        assert_eq!(
            c.display(&clocks).to_string(),
            "x > 1 && !(x <= 1 && y >= 2)"
        );
        assert_eq!(
            Constraint::Le(0, q(9, 10)).display(&clocks).to_string(),
            "x <= 9/10"
        );
    }
}
