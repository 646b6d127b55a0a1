//! `K[x_1..x_d] ⊗ Λ[p^1..p^d]` with exact coefficients.
//!
//! A monomial is `x^a · p^{i_1} ⋯ p^{i_r}` with `i_1 < … < i_r`; the odd part
//! is a bitmask. Derivatives in `p` act from the left.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{fmt_rational, int, Rational, SparseVector};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    x: Vec<u16>,
    p: u32,
}

pub type Poly = SparseVector<Monomial>;

fn sign_of(flip: bool) -> i64 {
    if flip { -1 } else { 1 }
}

impl Monomial {
    pub fn one(d: usize) -> Self {
        Self { x: vec![0; d], p: 0 }
    }

    pub fn x(d: usize, i: usize) -> Self {
        let mut m = Self::one(d);
        m.x[i] += 1;
        m
    }

    pub fn p(d: usize, i: usize) -> Self {
        let mut m = Self::one(d);
        m.p = 1 << i;
        m
    }

    pub fn from_parts(x: Vec<u16>, p: u32) -> Self {
        Self { x, p }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x_exponents(&self) -> &[u16] {
        &self.x
    }

    pub fn p_mask(&self) -> u32 {
        self.p
    }

    /// Number of odd generators.
    pub fn odd_degree(&self) -> u32 {
        self.p.count_ones()
    }

    /// Product with its sign, or `None` when an odd generator repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i64)> {
        if self.p & other.p != 0 {
            return None;
        }
        // pairs (a in self, b in other) with a > b must be swapped
        let mut swaps = 0u32;
        let mut rest = other.p;
        while rest != 0 {
            let b = rest.trailing_zeros();
            swaps += (self.p >> b >> 1).count_ones();
            rest &= rest - 1;
        }
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect();
        Some((Monomial { x, p: self.p | other.p }, sign_of(swaps % 2 == 1)))
    }

    /// `∂/∂x_l`: new monomial and multiplicity.
    pub fn dx(&self, l: usize) -> Option<(Monomial, u16)> {
        let e = self.x[l];
        if e == 0 {
            return None;
        }
        let mut m = self.clone();
        m.x[l] -= 1;
        Some((m, e))
    }

    /// Left `∂/∂p^l`: new monomial and sign.
    pub fn dp(&self, l: usize) -> Option<(Monomial, i64)> {
        if self.p >> l & 1 == 0 {
            return None;
        }
        let before = (self.p & ((1u32 << l) - 1)).count_ones();
        Some((Monomial { x: self.x.clone(), p: self.p & !(1 << l) }, sign_of(before % 2 == 1)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &e) in self.x.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("x_{}", i + 1)),
                _ => parts.push(format!("x_{}^{}", i + 1, e)),
            }
        }
        for i in 0..32 {
            if self.p >> i & 1 == 1 {
                parts.push(format!("p_{}", i + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a.iter() {
        for (mb, cb) in b.iter() {
            if let Some((m, s)) = ma.mul(mb) {
                out.add_term(m, ca * cb * int(s));
            }
        }
    }
    out
}

pub fn poly_dx(a: &Poly, l: usize) -> Poly {
    let mut out = Poly::new();
    for (m, c) in a.iter() {
        if let Some((m2, e)) = m.dx(l) {
            out.add_term(m2, c * int(e as i64));
        }
    }
    out
}

pub fn poly_dp(a: &Poly, l: usize) -> Poly {
    let mut out = Poly::new();
    for (m, c) in a.iter() {
        if let Some((m2, s)) = m.dp(l) {
            out.add_term(m2, c * int(s));
        }
    }
    out
}

pub fn format_poly(a: &Poly) -> String {
    if a.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in a.iter().enumerate() {
        let neg = c.is_negative();
        if k > 0 {
            out.push_str(if neg { " - " } else { " + " });
        } else if neg {
            out.push('-');
        }
        let abs = c.abs();
        let is_unit = m.odd_degree() == 0 && m.x.iter().all(|&e| e == 0);
        if !abs.is_one() || is_unit {
            out.push_str(&fmt_rational(&abs));
            if !is_unit {
                out.push('*');
            }
        }
        if !is_unit {
            out.push_str(&m.to_string());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("polynomial syntax error at byte {position}: {message}")]
pub struct PolyParseError {
    pub position: usize,
    pub message: String,
}

/// Parses e.g. `x_1*x_2 - 3/2*p_1*x_3^2 + 1`; `p^i` is accepted for `p_i`.
/// Odd factors are multiplied in the order written.
pub fn parse_poly(text: &str, d: usize) -> Result<Poly, PolyParseError> {
    let s: Vec<char> = text.chars().collect();
    let mut pos = 0usize;
    let err = |pos: usize, m: &str| PolyParseError { position: pos, message: m.to_string() };
    let skip = |pos: &mut usize| {
        while *pos < s.len() && s[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let number = |pos: &mut usize| -> Option<u64> {
        let start = *pos;
        while *pos < s.len() && s[*pos].is_ascii_digit() {
            *pos += 1;
        }
        s[start..*pos].iter().collect::<String>().parse().ok()
    };
    let mut out = Poly::new();
    let mut sign = Rational::one();
    skip(&mut pos);
    if pos < s.len() && s[pos] == '-' {
        sign = -sign;
        pos += 1;
    }
    loop {
        let mut coeff = sign.clone();
        let mut mono = Monomial::one(d);
        loop {
            skip(&mut pos);
            let start = pos;
            match s.get(pos) {
                Some(c) if c.is_ascii_digit() => {
                    let num = number(&mut pos).ok_or_else(|| err(start, "bad number"))?;
                    let mut q = int(num as i64);
                    if s.get(pos) == Some(&'/') {
                        pos += 1;
                        let den = number(&mut pos).filter(|&v| v != 0).ok_or_else(|| err(pos, "bad denominator"))?;
                        q /= int(den as i64);
                    }
                    coeff *= q;
                }
                Some(&v) if v == 'x' || v == 'p' => {
                    pos += 1;
                    if matches!(s.get(pos), Some('_') | Some('^')) {
                        pos += 1;
                    }
                    let i = number(&mut pos).ok_or_else(|| err(pos, "expected variable index"))? as usize;
                    if i == 0 || i > d {
                        return Err(err(start, "variable index out of range"));
                    }
                    let mut e = 1u64;
                    if s.get(pos) == Some(&'^') {
                        pos += 1;
                        e = number(&mut pos).ok_or_else(|| err(pos, "expected exponent"))?;
                    }
                    for _ in 0..e {
                        let g = if v == 'x' { Monomial::x(d, i - 1) } else { Monomial::p(d, i - 1) };
                        match mono.mul(&g) {
                            Some((m, sg)) => {
                                mono = m;
                                coeff *= int(sg);
                            }
                            None => coeff = Rational::zero(),
                        }
                    }
                }
                _ => return Err(err(pos, "expected factor")),
            }
            skip(&mut pos);
            if s.get(pos) == Some(&'*') {
                pos += 1;
            } else {
                break;
            }
        }
        if !coeff.is_zero() {
            out.add_term(mono, coeff);
        }
        skip(&mut pos);
        match s.get(pos) {
            None => break,
            Some('+') => sign = Rational::one(),
            Some('-') => sign = -Rational::one(),
            Some(_) => return Err(err(pos, "expected `+`, `-` or end")),
        }
        pos += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_generators_anticommute() {
        let a = parse_poly("p_2*p_1", 3).unwrap();
        let b = parse_poly("-p_1*p_2", 3).unwrap();
        assert_eq!(a, b);
        assert!(parse_poly("p_1*p_1", 3).unwrap().is_zero());
    }

    #[test]
    fn left_derivative_sign() {
        let a = parse_poly("p_1*p_2", 2).unwrap();
        assert_eq!(poly_dp(&a, 1), parse_poly("-p_1", 2).unwrap());
        assert_eq!(poly_dp(&a, 0), parse_poly("p_2", 2).unwrap());
    }

    #[test]
    fn x_derivative_multiplicity() {
        let a = parse_poly("x_1^3*x_2", 2).unwrap();
        assert_eq!(poly_dx(&a, 0), parse_poly("3*x_1^2*x_2", 2).unwrap());
    }

    #[test]
    fn format_round_trip() {
        let a = parse_poly("x_1^2 - 1/2*x_2*p_1 + 3", 2).unwrap();
        assert_eq!(parse_poly(&format_poly(&a), 2).unwrap(), a);
    }
}
