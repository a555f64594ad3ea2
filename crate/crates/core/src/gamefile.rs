//! Text format for timed automaton games.
//!
//! ```text
//! clocks x, y;
//! location l0 { invariant: "true"; priority: 0; initial: x=0, y=0; }
//! edge a1 { player: 1; from: l0; to: l1; guard: "x <= 1"; reset: [x]; }
//! ```
//!
//! `#` starts a comment. Exactly one location carries `initial:`; clocks it
//! does not mention start at 0.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::model::{
    parse_constraint, validate_game, Constraint, Edge, Game, LocId, Location, Player, Q,
};

#[derive(Debug, Error)]
pub enum GameFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: {message}")]
    Invalid {
        line: usize,
        column: usize,
        message: String,
    },
}

/// One `clock=value` entry of `initial:`, with its line and column.
type InitialEntry = (String, Q, usize, usize);

/// A game with its designated initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSpec {
    pub game: Game,
    pub initial_location: LocId,
    pub initial_valuation: Vec<Q>,
}

pub fn load_game(path: impl AsRef<Path>) -> Result<GameSpec, GameFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GameFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_game(&text)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Nat(String),
    Str(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, GameFileError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let at = |tok| Token {
                tok,
                line: li + 1,
                column,
            };
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push(at(Tok::Ident(chars[start..i].iter().collect())));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(at(Tok::Nat(chars[start..i].iter().collect())));
            } else if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(GameFileError::Syntax {
                        line: li + 1,
                        column,
                        message: "unterminated string".into(),
                    });
                }
                out.push(at(Tok::Str(chars[start..i].iter().collect())));
                i += 1;
            } else if "{};:,[]=/-".contains(c) {
                out.push(at(Tok::Punct(c)));
                i += 1;
            } else {
                return Err(GameFileError::Syntax {
                    line: li + 1,
                    column,
                    message: format!("unexpected character '{c}'"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.end)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, GameFileError> {
        let (line, column) = self.here();
        Err(GameFileError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn describe(&self) -> String {
        match self.toks.get(self.pos).map(|t| &t.tok) {
            None => "end of input".into(),
            Some(Tok::Ident(s)) => format!("'{s}'"),
            Some(Tok::Nat(s)) => format!("'{s}'"),
            Some(Tok::Str(s)) => format!("\"{s}\""),
            Some(Tok::Punct(c)) => format!("'{c}'"),
        }
    }

    fn punct(&mut self, c: char) -> Result<(), GameFileError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Punct(d), ..
            }) if *d == c => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax(format!("expected '{c}', found {}", self.describe())),
        }
    }

    fn peek_punct(&self, c: char) -> bool {
        matches!(self.toks.get(self.pos), Some(Token { tok: Tok::Punct(d), .. }) if *d == c)
    }

    fn ident(&mut self) -> Result<(String, usize, usize), GameFileError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Ident(s),
                line,
                column,
            }) => {
                let r = (s.clone(), *line, *column);
                self.pos += 1;
                Ok(r)
            }
            _ => self.syntax(format!("expected an identifier, found {}", self.describe())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), GameFileError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Ident(s), ..
            }) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax(format!("expected '{kw}', found {}", self.describe())),
        }
    }

    fn field(&mut self, name: &str) -> Result<(), GameFileError> {
        self.keyword(name)?;
        self.punct(':')
    }

    fn nat(&mut self) -> Result<u64, GameFileError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Nat(s), ..
            }) => {
                let v = s.parse().or_else(|_| self.syntax("number out of range"))?;
                self.pos += 1;
                Ok(v)
            }
            _ => self.syntax(format!(
                "expected a natural number, found {}",
                self.describe()
            )),
        }
    }

    fn rational(&mut self) -> Result<Q, GameFileError> {
        if self.peek_punct('-') {
            return self.syntax("clock values must be nonnegative");
        }
        let n = self.nat()?;
        let d = if self.peek_punct('/') {
            self.pos += 1;
            let (line, column) = self.here();
            let d = self.nat()?;
            if d == 0 {
                return Err(GameFileError::Syntax {
                    line,
                    column,
                    message: "zero denominator".into(),
                });
            }
            d
        } else {
            1
        };
        Ok(Q::new(n as i64, d as i64))
    }

    fn string(&mut self) -> Result<(String, usize, usize), GameFileError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Str(s),
                line,
                column,
            }) => {
                let r = (s.clone(), *line, *column);
                self.pos += 1;
                Ok(r)
            }
            _ => self.syntax(format!(
                "expected a quoted constraint, found {}",
                self.describe()
            )),
        }
    }

    fn constraint(&mut self, clocks: &[String]) -> Result<Constraint, GameFileError> {
        let (text, line, column) = self.string()?;
        parse_constraint(&text, clocks).map_err(|e| GameFileError::Syntax {
            line,
            // the opening quote occupies `column`
            column: column + 1 + text[..e.offset.min(text.len())].chars().count(),
            message: e.message,
        })
    }
}

struct PendingEdge {
    edge: Edge,
    from: (String, usize, usize),
    to: (String, usize, usize),
    at: (usize, usize),
}

pub fn parse_game(text: &str) -> Result<GameSpec, GameFileError> {
    let toks = lex(text)?;
    let end = (
        text.lines().count().max(1),
        text.lines().last().map_or(1, |l| l.len() + 1),
    );
    let mut p = Parser { toks, pos: 0, end };
    let mut clocks: Vec<String> = Vec::new();
    let mut locations: Vec<Location> = Vec::new();
    let mut loc_pos: Vec<(usize, usize)> = Vec::new();
    let mut initial: Option<(LocId, Vec<InitialEntry>)> = None;
    let mut pending: Vec<PendingEdge> = Vec::new();

    if p.toks.is_empty() {
        return p.syntax("empty game file");
    }
    while p.pos < p.toks.len() {
        let (kw, line, column) = p.ident()?;
        match kw.as_str() {
            "clocks" => loop {
                let (name, l, c) = p.ident()?;
                if clocks.contains(&name) {
                    return Err(GameFileError::Invalid {
                        line: l,
                        column: c,
                        message: format!("clock '{name}' declared twice"),
                    });
                }
                clocks.push(name);
                if p.peek_punct(',') {
                    p.pos += 1;
                } else {
                    p.punct(';')?;
                    break;
                }
            },
            "location" => {
                let (name, l, c) = p.ident()?;
                if locations.iter().any(|loc| loc.name == name) {
                    return Err(GameFileError::Invalid {
                        line: l,
                        column: c,
                        message: format!("location '{name}' declared twice"),
                    });
                }
                p.punct('{')?;
                p.field("invariant")?;
                let invariant = p.constraint(&clocks)?;
                p.punct(';')?;
                p.field("priority")?;
                let priority = p.nat()?;
                let priority =
                    u32::try_from(priority).or_else(|_| p.syntax("priority out of range"))?;
                p.punct(';')?;
                if !p.peek_punct('}') {
                    let (il, ic) = p.here();
                    p.field("initial")?;
                    if initial.is_some() {
                        return Err(GameFileError::Invalid {
                            line: il,
                            column: ic,
                            message: "more than one initial location".into(),
                        });
                    }
                    let mut vals = Vec::new();
                    loop {
                        let (clock, cl, cc) = p.ident()?;
                        p.punct('=')?;
                        let v = p.rational()?;
                        vals.push((clock, v, cl, cc));
                        if p.peek_punct(',') {
                            p.pos += 1;
                        } else {
                            break;
                        }
                    }
                    p.punct(';')?;
                    initial = Some((locations.len(), vals));
                }
                p.punct('}')?;
                locations.push(Location {
                    name,
                    invariant,
                    priority,
                });
                loc_pos.push((l, c));
            }
            "edge" => {
                let (action, _, _) = p.ident()?;
                p.punct('{')?;
                p.field("player")?;
                let player = match p.nat()? {
                    1 => Player::One,
                    2 => Player::Two,
                    _ => {
                        p.pos -= 1;
                        return p.syntax("player must be 1 or 2");
                    }
                };
                p.punct(';')?;
                p.field("from")?;
                let from = p.ident()?;
                p.punct(';')?;
                p.field("to")?;
                let to = p.ident()?;
                p.punct(';')?;
                p.field("guard")?;
                let guard = p.constraint(&clocks)?;
                p.punct(';')?;
                p.field("reset")?;
                p.punct('[')?;
                let mut resets = Vec::new();
                if !p.peek_punct(']') {
                    loop {
                        let (clock, cl, cc) = p.ident()?;
                        let Some(x) = clocks.iter().position(|c| *c == clock) else {
                            return Err(GameFileError::Invalid {
                                line: cl,
                                column: cc,
                                message: format!("undeclared clock '{clock}'"),
                            });
                        };
                        resets.push(x);
                        if p.peek_punct(',') {
                            p.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                p.punct(']')?;
                p.punct(';')?;
                p.punct('}')?;
                resets.sort_unstable();
                resets.dedup();
                pending.push(PendingEdge {
                    edge: Edge {
                        action,
                        player,
                        from: 0,
                        to: 0,
                        guard,
                        resets,
                    },
                    from,
                    to,
                    at: (line, column),
                });
            }
            other => {
                return Err(GameFileError::Syntax {
                    line,
                    column,
                    message: format!("expected 'clocks', 'location' or 'edge', found '{other}'"),
                })
            }
        }
    }

    let loc_ids: HashMap<&str, LocId> = locations
        .iter()
        .enumerate()
        .map(|(i, l)| (l.name.as_str(), i))
        .collect();
    let resolve = |(name, line, column): &(String, usize, usize)| {
        loc_ids
            .get(name.as_str())
            .copied()
            .ok_or_else(|| GameFileError::Invalid {
                line: *line,
                column: *column,
                message: format!("unknown location '{name}'"),
            })
    };
    let mut edges = Vec::new();
    let mut edge_pos = Vec::new();
    for pe in &pending {
        let mut e = pe.edge.clone();
        e.from = resolve(&pe.from)?;
        e.to = resolve(&pe.to)?;
        edges.push(e);
        edge_pos.push(pe.at);
    }
    let game = Game {
        clocks,
        locations,
        edges,
    };

    let Some((initial_location, vals)) = initial else {
        let (line, column) = p.end;
        return Err(GameFileError::Invalid {
            line,
            column,
            message: "no location is marked initial".into(),
        });
    };
    let mut valuation = vec![Q::from_integer(0); game.clocks.len()];
    for (clock, v, line, column) in vals {
        let Some(x) = game.clock_id(&clock) else {
            return Err(GameFileError::Invalid {
                line,
                column,
                message: format!("undeclared clock '{clock}'"),
            });
        };
        valuation[x] = v;
    }

    let report = validate_game(&game);
    if let Some((loc, action)) = report.duplicate_actions.first() {
        let i = game
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.from == *loc && e.action == *action)
            .nth(1)
            .unwrap()
            .0;
        let (line, column) = edge_pos[i];
        return Err(GameFileError::Invalid {
            line,
            column,
            message: format!(
                "action '{action}' labels two edges leaving location '{}'",
                game.locations[*loc].name
            ),
        });
    }
    if !game.locations[initial_location].invariant.eval(&valuation) {
        let (line, column) = loc_pos[initial_location];
        return Err(GameFileError::Invalid {
            line,
            column,
            message: "initial valuation violates the location invariant".into(),
        });
    }
    Ok(GameSpec {
        game,
        initial_location,
        initial_valuation: valuation,
    })
}

fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Writes a game in the text format; `parse_game` reads it back unchanged.
/// Constants must be integers.
pub fn write_game(spec: &GameSpec) -> String {
    let g = &spec.game;
    let mut out = String::new();
    if !g.clocks.is_empty() {
        writeln!(out, "clocks {};", g.clocks.join(", ")).unwrap();
    }
    for (i, l) in g.locations.iter().enumerate() {
        write!(
            out,
            "location {} {{ invariant: \"{}\"; priority: {};",
            l.name,
            l.invariant.display(&g.clocks),
            l.priority
        )
        .unwrap();
        if i == spec.initial_location {
            let vals: Vec<String> = g
                .clocks
                .iter()
                .zip(&spec.initial_valuation)
                .map(|(c, v)| format!("{c}={}", fmt_q(v)))
                .collect();
            write!(out, " initial: {};", vals.join(", ")).unwrap();
        }
        writeln!(out, " }}").unwrap();
    }
    for e in &g.edges {
        let resets: Vec<&str> = e.resets.iter().map(|&x| g.clocks[x].as_str()).collect();
        writeln!(
            out,
            "edge {} {{ player: {}; from: {}; to: {}; guard: \"{}\"; reset: [{}]; }}",
            e.action,
            e.player,
            g.locations[e.from].name,
            g.locations[e.to].name,
            e.guard.display(&g.clocks),
            resets.join(", ")
        )
        .unwrap();
    }
    out
}
