use std::fmt;

use super::{Expr, FormulaError, Interval};

/// How interval bounds in the formula text are expressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeUnits {
    Samples,
    /// Bounds are seconds; each bound must be an exact multiple of the sampling period.
    Seconds {
        delta_t: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Arrow,
    OrSym,
    AndSym,
    Bang,
    Diamond,
    Boxed,
    PastDiamond,
    PastBox,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::Number(s) => s.as_str(),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Arrow => "->",
            Tok::OrSym => "\\/",
            Tok::AndSym => "/\\",
            Tok::Bang => "!",
            Tok::Diamond => "<>",
            Tok::Boxed => "[]",
            Tok::PastDiamond => "<*>",
            Tok::PastBox => "[*]",
        };
        f.write_str(s)
    }
}

const KEYWORDS: &[&str] = &[
    "not",
    "and",
    "or",
    "U",
    "until",
    "S",
    "since",
    "eventually",
    "always",
    "once",
    "historically",
    "next",
    "prev",
    "true",
    "false",
    "inf",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let rest = &text[i..];
        let fixed: Option<(usize, Tok)> = if rest.starts_with("->") {
            Some((2, Tok::Arrow))
        } else if rest.starts_with("\\/") {
            Some((2, Tok::OrSym))
        } else if rest.starts_with("/\\") {
            Some((2, Tok::AndSym))
        } else if rest.starts_with("<>") {
            Some((2, Tok::Diamond))
        } else if rest.starts_with("<*>") {
            Some((3, Tok::PastDiamond))
        } else if rest.starts_with("[]") {
            Some((2, Tok::Boxed))
        } else if rest.starts_with("[*]") {
            Some((3, Tok::PastBox))
        } else {
            match c {
                b'(' => Some((1, Tok::LParen)),
                b')' => Some((1, Tok::RParen)),
                b'[' => Some((1, Tok::LBracket)),
                b']' => Some((1, Tok::RBracket)),
                b',' => Some((1, Tok::Comma)),
                b'!' => Some((1, Tok::Bang)),
                _ => None,
            }
        };
        if let Some((len, tok)) = fixed {
            out.push((start, tok));
            i += len;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            out.push((start, Tok::Number(text[start..i].to_string())));
        } else {
            let ch = rest.chars().next().unwrap_or('?');
            return Err(FormulaError::Syntax {
                pos: start,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    units: TimeUnits,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn is_kw(&self, words: &[&str]) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if words.contains(&s.as_str()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => self.error(format!("expected `{tok}`, found `{t}`")),
            None => self.error(format!("expected `{tok}`, found end of input")),
        }
    }

    fn implies(&mut self) -> Result<Expr, FormulaError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::OrSym) || self.is_kw(&["or"]) {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.binary()?;
        while self.peek() == Some(&Tok::AndSym) || self.is_kw(&["and"]) {
            self.pos += 1;
            let rhs = self.binary()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn binary(&mut self) -> Result<Expr, FormulaError> {
        let lhs = self.unary()?;
        if self.is_kw(&["U", "until"]) {
            self.pos += 1;
            let iv = self.interval(true)?;
            let rhs = self.unary()?;
            return Ok(Expr::Until(Box::new(lhs), Box::new(rhs), iv));
        }
        if self.is_kw(&["S", "since"]) {
            self.pos += 1;
            let iv = self.interval(false)?;
            let rhs = self.unary()?;
            return Ok(Expr::Since(Box::new(lhs), Box::new(rhs), iv));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, FormulaError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.error("unexpected end of input"),
        };
        let boxed = |e: Expr| Box::new(e);
        match tok {
            Tok::Bang => {
                self.pos += 1;
                Ok(Expr::Not(boxed(self.unary()?)))
            }
            Tok::Diamond => {
                self.pos += 1;
                let iv = self.interval(true)?;
                Ok(Expr::Eventually(iv, boxed(self.unary()?)))
            }
            Tok::Boxed => {
                self.pos += 1;
                let iv = self.interval(true)?;
                Ok(Expr::Always(iv, boxed(self.unary()?)))
            }
            Tok::PastDiamond => {
                self.pos += 1;
                let iv = self.interval(false)?;
                Ok(Expr::Once(iv, boxed(self.unary()?)))
            }
            Tok::PastBox => {
                self.pos += 1;
                let iv = self.interval(false)?;
                Ok(Expr::Historically(iv, boxed(self.unary()?)))
            }
            Tok::Ident(word) => match word.as_str() {
                "not" => {
                    self.pos += 1;
                    Ok(Expr::Not(boxed(self.unary()?)))
                }
                "eventually" => {
                    self.pos += 1;
                    let iv = self.interval(true)?;
                    Ok(Expr::Eventually(iv, boxed(self.unary()?)))
                }
                "always" => {
                    self.pos += 1;
                    let iv = self.interval(true)?;
                    Ok(Expr::Always(iv, boxed(self.unary()?)))
                }
                "once" => {
                    self.pos += 1;
                    let iv = self.interval(false)?;
                    Ok(Expr::Once(iv, boxed(self.unary()?)))
                }
                "historically" => {
                    self.pos += 1;
                    let iv = self.interval(false)?;
                    Ok(Expr::Historically(iv, boxed(self.unary()?)))
                }
                "next" => {
                    self.pos += 1;
                    Ok(Expr::Next(boxed(self.unary()?)))
                }
                "prev" => {
                    self.pos += 1;
                    Ok(Expr::Prev(boxed(self.unary()?)))
                }
                _ => self.primary(),
            },
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.implies()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(word)) => match word.as_str() {
                "true" => {
                    self.pos += 1;
                    Ok(Expr::True)
                }
                "false" => {
                    self.pos += 1;
                    Ok(Expr::False)
                }
                w if is_keyword(w) => self.error(format!("unexpected keyword `{w}`")),
                _ => {
                    self.pos += 1;
                    Ok(Expr::Atom(word))
                }
            },
            Some(t) => self.error(format!("unexpected `{t}`")),
            None => self.error("unexpected end of input"),
        }
    }

    fn bound(&mut self) -> Result<usize, FormulaError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Number(s)) => self.convert(&s, at),
            Some(t) => Err(FormulaError::Syntax {
                pos: at,
                msg: format!("expected interval bound, found `{t}`"),
            }),
            None => Err(FormulaError::Syntax {
                pos: at,
                msg: "expected interval bound, found end of input".into(),
            }),
        }
    }

    fn convert(&self, s: &str, at: usize) -> Result<usize, FormulaError> {
        match self.units {
            TimeUnits::Samples => s.parse::<usize>().map_err(|_| FormulaError::Syntax {
                pos: at,
                msg: format!("interval bound `{s}` is not a natural number"),
            }),
            TimeUnits::Seconds { delta_t } => {
                let secs: f64 = s.parse().map_err(|_| FormulaError::Syntax {
                    pos: at,
                    msg: format!("invalid number `{s}`"),
                })?;
                seconds_to_samples(secs, delta_t)
            }
        }
    }

    fn interval(&mut self, future: bool) -> Result<Interval, FormulaError> {
        let start = self.offset();
        self.expect(Tok::LBracket)?;
        let lower = self.bound()?;
        self.expect(Tok::Comma)?;
        let upper = if self.is_kw(&["inf"]) {
            self.pos += 1;
            self.expect(Tok::RParen)?;
            None
        } else {
            let u = self.bound()?;
            self.expect(Tok::RBracket)?;
            Some(u)
        };
        if future && upper.is_none() {
            return Err(FormulaError::UnboundedFuture { pos: start });
        }
        if let Some(u) = upper {
            if lower > u {
                return Err(FormulaError::EmptyInterval { pos: start });
            }
        }
        Ok(Interval { lower, upper })
    }
}

/// Converts a duration in seconds into a sample count, rejecting durations that
/// are not an exact multiple of `delta_t`.
pub fn seconds_to_samples(secs: f64, delta_t: f64) -> Result<usize, FormulaError> {
    if delta_t.is_nan() || delta_t <= 0.0 || !secs.is_finite() || secs < 0.0 {
        return Err(FormulaError::NotDivisible { secs, delta_t });
    }
    let ratio = secs / delta_t;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(FormulaError::NotDivisible { secs, delta_t });
    }
    Ok(rounded as usize)
}

pub(super) fn parse_with(text: &str, units: TimeUnits) -> Result<Expr, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        units,
    };
    let e = p.implies()?;
    if p.pos < p.toks.len() {
        let t = p.toks[p.pos].1.clone();
        return p.error(format!("unexpected trailing `{t}`"));
    }
    Ok(e)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) => write!(f, "[{},{}]", self.lower, u),
            None => write!(f, "[{},inf)", self.lower),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::True => f.write_str("true"),
            Expr::False => f.write_str("false"),
            Expr::Atom(name) => f.write_str(name),
            Expr::Not(e) => write!(f, "(not {e})"),
            Expr::And(a, b) => write!(f, "({a} and {b})"),
            Expr::Or(a, b) => write!(f, "({a} or {b})"),
            Expr::Implies(a, b) => write!(f, "({a} -> {b})"),
            Expr::Until(a, b, iv) => write!(f, "({a} U{iv} {b})"),
            Expr::Since(a, b, iv) => write!(f, "({a} S{iv} {b})"),
            Expr::Eventually(iv, e) => write!(f, "(eventually{iv} {e})"),
            Expr::Always(iv, e) => write!(f, "(always{iv} {e})"),
            Expr::Once(iv, e) => write!(f, "(once{iv} {e})"),
            Expr::Historically(iv, e) => write!(f, "(historically{iv} {e})"),
            Expr::Next(e) => write!(f, "(next {e})"),
            Expr::Prev(e) => write!(f, "(prev {e})"),
        }
    }
}
