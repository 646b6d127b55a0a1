//! Text format for graph sums.
//!
//! ```text
//! # comment
//! 1/2*G(n=2; I=1; e=[(i1->1),(i1->2)]) - 1/12*G(n=1; I=1; e=[(i1--1)])
//! ```
//!
//! `a--b` stands for the sum over both directions; `(a,b)` is accepted for `a->b`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{DirectedGraph, GraphError, GraphSum, Violation};
use crate::linalg::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("term {term} ({text}) is invalid: {source}")]
    Term { term: usize, text: String, source: GraphError },
    #[error("term {term} ({text}) has no admissible orientation: {violation}")]
    NoAdmissibleOrientation { term: usize, text: String, violation: Violation },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arrow {
    Directed,
    Undirected,
}

struct RawGraph {
    n: usize,
    m: usize,
    edges: Vec<(usize, usize, Arrow)>,
    text: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| match l.find('#') {
            Some(i) => format!("{}{}", &l[..i], " ".repeat(l.len() - i)),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        let v = self.int()?;
        usize::try_from(v).or_else(|_| {
            self.pos = start;
            self.err("integer too large")
        })
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let num = self.int()?;
        if self.eat("/") {
            let den = self.int()?;
            if den.is_zero() {
                return self.err("zero denominator");
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    fn vertex(&mut self, n: usize, m: usize) -> Result<usize, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let internal = self.eat("i");
        let k = self.small()?;
        let ok = k >= 1 && if internal { k <= m } else { k <= n };
        if !ok {
            self.pos = start;
            return self.err(format!("vertex {}{k} out of range", if internal { "i" } else { "" }));
        }
        Ok(if internal { n + k - 1 } else { k - 1 })
    }

    fn graph(&mut self) -> Result<RawGraph, ParseError> {
        self.skip_ws();
        let start = self.pos;
        self.expect("G(")?;
        self.expect("n=")?;
        let n = self.small()?;
        self.expect(";")?;
        self.expect("I=")?;
        let m = self.small()?;
        self.expect(";")?;
        self.expect("e=[")?;
        let mut edges = Vec::new();
        if !self.eat("]") {
            loop {
                self.expect("(")?;
                let a = self.vertex(n, m)?;
                let arrow = if self.eat("->") || self.eat(",") {
                    Arrow::Directed
                } else if self.eat("--") {
                    Arrow::Undirected
                } else {
                    return self.err("expected `->` or `--`");
                };
                let b = self.vertex(n, m)?;
                self.expect(")")?;
                edges.push((a, b, arrow));
                if self.eat("]") {
                    break;
                }
                self.expect(",")?;
            }
        }
        self.expect(")")?;
        let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        Ok(RawGraph { n, m, edges, text })
    }

    /// `[rational '*'] graph`, or a bare `0`.
    fn term(&mut self) -> Result<(Rational, Option<RawGraph>), ParseError> {
        let mut coeff = Rational::one();
        if self.eat("-") {
            coeff = -coeff;
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let save = self.pos;
            let q = self.rational()?;
            if self.eat("*") {
                coeff *= q;
            } else if q.is_zero() {
                return Ok((Rational::zero(), None));
            } else {
                self.pos = save;
                return self.err("expected `*` after coefficient");
            }
        }
        Ok((coeff, Some(self.graph()?)))
    }
}

/// All orientations of a raw graph, with `--` edges expanded.
fn orientations(raw: &RawGraph) -> Vec<DirectedGraph> {
    let undirected: Vec<usize> =
        raw.edges.iter().enumerate().filter(|(_, e)| e.2 == Arrow::Undirected).map(|(k, _)| k).collect();
    (0..1usize << undirected.len())
        .map(|mask| {
            let edges = raw
                .edges
                .iter()
                .enumerate()
                .map(|(k, &(a, b, _))| match undirected.iter().position(|&u| u == k) {
                    Some(bit) if mask >> bit & 1 == 1 => (b, a),
                    _ => (a, b),
                })
                .collect();
            DirectedGraph::from_parts(raw.n, raw.m, edges)
        })
        .collect()
}

fn add_raw(sum: &mut GraphSum, term: usize, coeff: &Rational, raw: &RawGraph) -> Result<(), ParseError> {
    let all = orientations(raw);
    if all.len() == 1 {
        return sum
            .add_graph(&all[0], coeff)
            .map_err(|source| ParseError::Term { term, text: raw.text.clone(), source });
    }
    let mut first_violation = None;
    let mut any = false;
    for g in &all {
        match g.check_admissible() {
            Ok(()) => {
                any = true;
                sum.add_admissible(g, coeff);
            }
            Err(v) => {
                first_violation.get_or_insert(v);
            }
        }
    }
    if !any {
        return Err(ParseError::NoAdmissibleOrientation {
            term,
            text: raw.text.clone(),
            violation: first_violation.unwrap(),
        });
    }
    Ok(())
}

/// Parses a sum of graphs; `--` edges expand to both directions and
/// inadmissible orientations of such edges are dropped.
pub fn parse_sum(text: &str) -> Result<GraphSum, ParseError> {
    let cleaned = strip_comments(text);
    let mut p = Parser { src: cleaned.as_bytes(), pos: 0 };
    let mut sum = GraphSum::zero();
    if p.peek().is_none() {
        return p.err("empty input");
    }
    let mut term_no = 1;
    let mut sign = Rational::one();
    loop {
        let (c, raw) = p.term()?;
        if let Some(raw) = raw {
            add_raw(&mut sum, term_no, &(sign * c), &raw)?;
        }
        match p.peek() {
            None => break,
            Some(b'+') => sign = Rational::one(),
            Some(b'-') => sign = -Rational::one(),
            Some(_) => return p.err("expected `+`, `-` or end of input"),
        }
        p.pos += 1;
        term_no += 1;
    }
    Ok(sum)
}

/// Parses a single graph with directed edges only, without canonicalizing it.
pub fn parse_graph(text: &str) -> Result<DirectedGraph, ParseError> {
    let cleaned = strip_comments(text);
    let mut p = Parser { src: cleaned.as_bytes(), pos: 0 };
    let raw = p.graph()?;
    if p.peek().is_some() {
        return p.err("trailing input after graph");
    }
    if raw.edges.iter().any(|e| e.2 == Arrow::Undirected) {
        return Err(ParseError::Syntax { position: 0, message: "undirected edge in a single graph".into() });
    }
    Ok(DirectedGraph::from_parts(raw.n, raw.m, raw.edges.iter().map(|&(a, b, _)| (a, b)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn wedge_with_comma_arrows() {
        let g = parse_graph("G(n=2; I=1; e=[(i1,1),(i1,2)])").unwrap();
        assert_eq!(g.edges(), &[(2, 0), (2, 1)]);
    }

    #[test]
    fn undirected_edge_expands() {
        let s = parse_sum("G(n=2; I=0; e=[(1--2)])").unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|(_, c)| *c == rat(1, 1)));
    }

    #[test]
    fn rational_coefficients_and_signs() {
        let s = parse_sum("1/2*G(n=2;I=1;e=[(i1->1),(i1->2)]) + -1/12*G(n=2;I=0;e=[])\n - G(n=2;I=0;e=[]) # tail").unwrap();
        let vals: Vec<Rational> = s.iter().map(|(_, c)| c.clone()).collect();
        assert!(vals.contains(&rat(1, 2)));
        assert!(vals.contains(&rat(-13, 12)));
    }

    #[test]
    fn round_trip() {
        let s = parse_sum("G(n=1;I=1;e=[(i1--1)]) - 3/4*G(n=2;I=1;e=[(i1->2),(i1->1)])").unwrap();
        assert_eq!(parse_sum(&s.to_dsl()).unwrap(), s);
    }

    #[test]
    fn syntax_error_reports_position() {
        match parse_sum("G(n=2; I=1; e=[(i1=>1)])") {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 18),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inadmissible_term_is_named() {
        match parse_sum("G(n=1;I=0;e=[]) + G(n=2;I=1;e=[(1->i1),(2->i1)])") {
            Err(ParseError::Term { term, .. }) => assert_eq!(term, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_range_vertex() {
        assert!(matches!(parse_sum("G(n=1;I=0;e=[(1->2)])"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn zero_literal() {
        assert!(parse_sum("0").unwrap().is_zero());
    }
}
