//! The representation `Γ ↦ B_Γ` of graphs as multilinear operators on
//! `A = K[x_1..x_d] ⊗ Λ[p^1..p^d]` built from a Lie algebra.
//!
//! Tensor factors are ordered with one copy of `π` per internal vertex first,
//! then the arguments. Each edge `u → v` contributes
//! `τ_{uv} = Σ_l ∂/∂p^l (on u) ⊗ ∂/∂x_l (on v)`.

mod lie;
mod poly;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{DirectedGraph, GraphSum};
use crate::linalg::{int, Rational, SparseVector};
use crate::operad::{insert, star_sign};

pub use lie::{LieData, LieError};
pub use poly::{format_poly, parse_poly, poly_dp, poly_dx, poly_mul, Monomial, Poly, PolyParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("graph has arity {graph} but {given} arguments were given")]
    ArityMismatch { graph: usize, given: usize },
    #[error("tensor factor index {index} out of range for {len} factors")]
    FactorOutOfRange { index: usize, len: usize },
    #[error("argument {0} is not homogeneous in the odd variables")]
    Inhomogeneous(usize),
}

/// Order in which the edge operators act.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeOrder {
    /// `τ_{e_1}` acts first: the product is `τ_{e_N} ∘ ⋯ ∘ τ_{e_1}`.
    FirstEdgeFirst,
    /// `τ_{e_N}` acts first: the product is `τ_{e_1} ∘ ⋯ ∘ τ_{e_N}`.
    LastEdgeFirst,
}

pub type Tensor = SparseVector<Vec<Monomial>>;

/// `π = Σ_{i,j,k} c_{ij}^k x_k p^i p^j`.
pub fn make_pi(lie: &LieData) -> Poly {
    let d = lie.dim();
    let mut out = Poly::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let c = lie.c(i, j, k);
                if c.is_zero() {
                    continue;
                }
                let pp = Monomial::p(d, i).mul(&Monomial::p(d, j));
                if let Some((m, s)) = pp {
                    let (m, s2) = m.mul(&Monomial::x(d, k)).unwrap();
                    out.add_term(m, c * int(s * s2));
                }
            }
        }
    }
    out
}

/// `τ` acting with `∂_p` on factor `i` and `∂_x` on factor `j`, with the
/// Koszul sign from moving `∂_p` past the factors before `i`.
pub fn tau_apply(t: &Tensor, i: usize, j: usize, d: usize) -> Result<Tensor, RepError> {
    let mut out = Tensor::new();
    for (factors, c) in t.iter() {
        for index in [i, j] {
            if index >= factors.len() {
                return Err(RepError::FactorOutOfRange { index, len: factors.len() });
            }
        }
        let before: u32 = factors[..i].iter().map(Monomial::odd_degree).sum();
        let koszul = if before % 2 == 1 { -1 } else { 1 };
        for l in 0..d {
            let Some((pi, s)) = factors[i].dp(l) else { continue };
            let Some((xj, e)) = factors[j].dx(l) else { continue };
            let mut f = factors.clone();
            f[i] = pi;
            f[j] = xj;
            out.add_term(f, c * int(s * koszul * e as i64));
        }
    }
    Ok(out)
}

fn multiply_out(t: &Tensor, d: usize) -> Poly {
    let mut out = Poly::new();
    'terms: for (factors, c) in t.iter() {
        let mut acc = Monomial::one(d);
        let mut sign = 1;
        for f in factors {
            match acc.mul(f) {
                Some((m, s)) => {
                    acc = m;
                    sign *= s;
                }
                None => continue 'terms,
            }
        }
        out.add_term(acc, c * int(sign));
    }
    out
}

/// Odd degree of a homogeneous polynomial.
pub fn odd_degree(f: &Poly) -> Option<u32> {
    let mut it = f.keys().map(Monomial::odd_degree);
    let first = it.next().unwrap_or(0);
    it.all(|x| x == first).then_some(first)
}

#[derive(Debug, Clone)]
pub struct Representation {
    lie: LieData,
    pi: Poly,
    order: EdgeOrder,
}

impl Representation {
    pub fn new(lie: LieData) -> Self {
        Self::with_order(lie, EdgeOrder::LastEdgeFirst)
    }

    pub fn with_order(lie: LieData, order: EdgeOrder) -> Self {
        let pi = make_pi(&lie);
        Self { lie, pi, order }
    }

    pub fn lie(&self) -> &LieData {
        &self.lie
    }

    pub fn pi(&self) -> &Poly {
        &self.pi
    }

    pub fn dim(&self) -> usize {
        self.lie.dim()
    }

    pub fn order(&self) -> EdgeOrder {
        self.order
    }

    /// `B_Γ(f_1 ⊗ ⋯ ⊗ f_n)`.
    pub fn eval_graph(&self, g: &DirectedGraph, args: &[Poly]) -> Result<Poly, RepError> {
        let n = g.n_external();
        let m = g.n_internal();
        if args.len() != n {
            return Err(RepError::ArityMismatch { graph: n, given: args.len() });
        }
        let d = self.dim();
        let factor = |v: usize| if v < n { m + v } else { v - n };
        let mut t = Tensor::new();
        t.add_term(Vec::with_capacity(m + n), Rational::one());
        let inputs = std::iter::repeat(&self.pi).take(m).chain(args.iter());
        for f in inputs {
            let mut next = Tensor::new();
            for (prefix, c) in t.iter() {
                for (mono, cf) in f.iter() {
                    let mut v = prefix.clone();
                    v.push(mono.clone());
                    next.add_term(v, c * cf);
                }
            }
            t = next;
        }
        let edges: Vec<_> = match self.order {
            EdgeOrder::FirstEdgeFirst => g.edges().to_vec(),
            EdgeOrder::LastEdgeFirst => g.edges().iter().rev().copied().collect(),
        };
        for (a, b) in edges {
            t = tau_apply(&t, factor(a), factor(b), d)?;
            if t.is_zero() {
                break;
            }
        }
        Ok(multiply_out(&t, d))
    }

    /// `Σ c_Γ B_Γ(args)` over the terms of `x` whose arity matches.
    pub fn eval_sum(&self, x: &GraphSum, args: &[Poly]) -> Poly {
        let mut out = Poly::new();
        for (g, c) in x.iter() {
            if g.n_external() == args.len() {
                out.add_scaled(&self.eval_graph(g, args).expect("arity checked"), c);
            }
        }
        out
    }

    /// `B_{a1}(f)`, the Chevalley–Eilenberg type differential.
    pub fn ce_differential(&self, f: &Poly) -> Poly {
        let mut out = Poly::new();
        for l in 0..self.dim() {
            out += &poly_mul(&poly_dp(&self.pi, l), &poly_dx(f, l));
            out += &poly_mul(&poly_dp(f, l), &poly_dx(&self.pi, l));
        }
        out
    }

    /// `Σ_m (∂π/∂x_m)(∂π/∂p^m)`, which vanishes iff the Jacobi identity holds.
    pub fn jacobi_poly(&self) -> Poly {
        let mut out = Poly::new();
        for m in 0..self.dim() {
            out += &poly_mul(&poly_dx(&self.pi, m), &poly_dp(&self.pi, m));
        }
        out
    }

    /// The arity-2 part of `alpha` evaluated on `(f, g)`.
    pub fn star_product(&self, alpha: &GraphSum, f: &Poly, g: &Poly) -> Poly {
        self.eval_sum(alpha, &[f.clone(), g.clone()])
    }

    /// `(B_{Γ1} ∘_i B_{Γ2})(args)` with the Koszul sign `(−1)^{|Γ2|·Σ_{r<i}|f_r|}`.
    pub fn compose_eval(&self, g1: &DirectedGraph, i: usize, g2: &DirectedGraph, args: &[Poly]) -> Result<Poly, RepError> {
        let s = g2.n_external();
        let expected = g1.n_external() + s - 1;
        if args.len() != expected {
            return Err(RepError::ArityMismatch { graph: expected, given: args.len() });
        }
        let mut before = 0u32;
        for (r, f) in args[..i - 1].iter().enumerate() {
            before += odd_degree(f).ok_or(RepError::Inhomogeneous(r + 1))?;
        }
        let inner = self.eval_graph(g2, &args[i - 1..i - 1 + s])?;
        let mut outer_args = args[..i - 1].to_vec();
        outer_args.push(inner);
        outer_args.extend_from_slice(&args[i - 1 + s..]);
        let out = self.eval_graph(g1, &outer_args)?;
        let odd = (g2.degree().rem_euclid(2) as u32 * before) % 2 == 1;
        Ok(if odd { -&out } else { out })
    }

    /// `B(Γ1 ∘_i Γ2) − B(Γ1) ∘_i B(Γ2)` on the given arguments.
    pub fn morphism_defect(&self, g1: &DirectedGraph, i: usize, g2: &DirectedGraph, args: &[Poly]) -> Result<Poly, RepError> {
        let lhs = self.eval_sum(&insert(g1, i, g2).expect("position in range"), args);
        let rhs = self.compose_eval(g1, i, g2, args)?;
        Ok(&lhs - &rhs)
    }

    /// Operator-level `α ⋆ α` restricted to pairs of terms with second gradings
    /// summing to `grading`, evaluated on `args`.
    pub fn star_square_eval(&self, alpha: &GraphSum, grading: usize, args: &[Poly]) -> Result<Poly, RepError> {
        let big_n = args.len();
        let mut out = Poly::new();
        for (g1, c1) in alpha.iter() {
            for (g2, c2) in alpha.iter() {
                if g1.second_grading() + g2.second_grading() != grading || g1.n_external() + g2.n_external() != big_n + 1 {
                    continue;
                }
                let n = g1.n_external();
                for i in 1..=n {
                    let v = self.compose_eval(g1, i, g2, args)?;
                    out.add_scaled(&v, &(c1 * c2 * int(star_sign(n, i, g2))));
                }
            }
        }
        Ok(out)
    }
}

/// Operator-level residual of `α ⋆ α` at one grading.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorResidual {
    pub grading: usize,
    pub evaluations: usize,
    pub nonzero: usize,
    /// First argument tuple with a nonzero value, and that value.
    pub witness: Option<(Vec<String>, String)>,
}

impl OperatorResidual {
    pub fn vanishes(&self) -> bool {
        self.nonzero == 0
    }
}

/// Argument tuples for residual checks: every tuple of even monomials of degree 1..=2 in
/// arities 1..=3, followed by `random` seeded tuples that may contain odd generators.
pub fn residual_arguments(d: usize, random: usize, seed: u64) -> Vec<Vec<Poly>> {
    let mut monos = Vec::new();
    for i in 0..d {
        monos.push(Monomial::x(d, i));
        for j in i..d {
            let (m, _) = Monomial::x(d, i).mul(&Monomial::x(d, j)).unwrap();
            monos.push(m);
        }
    }
    let polys: Vec<Poly> = monos.into_iter().map(|m| Poly::singleton(m, Rational::one())).collect();
    let mut out: Vec<Vec<Poly>> = Vec::new();
    let mut tuples: Vec<Vec<Poly>> = vec![vec![]];
    for _ in 0..3 {
        tuples = tuples
            .iter()
            .flat_map(|t| polys.iter().map(move |p| {
                let mut t = t.clone();
                t.push(p.clone());
                t
            }))
            .collect();
        out.extend(tuples.iter().cloned());
    }
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    for k in 0..random {
        let arity = 1 + k % 3;
        out.push((0..arity).map(|_| random_monomial(&mut rng, d, 3, 2)).collect());
    }
    out
}

impl Representation {
    /// Evaluates `α ⋆ α` as operators at each grading `2..=cap` on the given argument tuples.
    pub fn associativity_to_order(&self, alpha: &GraphSum, cap: usize, args: &[Vec<Poly>]) -> Vec<OperatorResidual> {
        (2..=cap)
            .map(|grading| {
                let mut r = OperatorResidual { grading, evaluations: 0, nonzero: 0, witness: None };
                for a in args {
                    let v = self.star_square_eval(alpha, grading, a).expect("arguments are homogeneous");
                    r.evaluations += 1;
                    if !v.is_zero() {
                        r.nonzero += 1;
                        r.witness.get_or_insert_with(|| (a.iter().map(format_poly).collect(), format_poly(&v)));
                    }
                }
                r
            })
            .collect()
    }
}

/// A random monomial with total degree at most `max_degree` and at most `max_odd` odd generators.
pub fn random_monomial<R: Rng>(rng: &mut R, d: usize, max_degree: usize, max_odd: usize) -> Poly {
    let deg = rng.gen_range(0..=max_degree);
    let odd = rng.gen_range(0..=max_odd.min(deg).min(d));
    let mut idx: Vec<usize> = (0..d).collect();
    idx.shuffle(rng);
    let mut x = vec![0u16; d];
    for _ in 0..deg - odd {
        x[rng.gen_range(0..d)] += 1;
    }
    let p = idx[..odd].iter().fold(0u32, |a, &i| a | 1 << i);
    let mut out = Poly::new();
    out.add_term(Monomial::from_parts(x, p), Rational::one());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn poly(s: &str) -> Poly {
        parse_poly(s, 3).unwrap()
    }

    #[test]
    fn pi_presets() {
        assert!(make_pi(&LieData::abelian(3)).is_zero());
        assert_eq!(make_pi(&LieData::heisenberg()), poly("2*x_3*p_1*p_2"));
        assert_eq!(make_pi(&LieData::so3()).len(), 3);
    }

    #[test]
    fn tau_on_simple_tensors() {
        let d = 3;
        let mut t = Tensor::new();
        t.add_term(vec![Monomial::p(d, 0), Monomial::x(d, 0)], Rational::one());
        let r = tau_apply(&t, 0, 1, d).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.keys().next().unwrap(), &vec![Monomial::one(d), Monomial::one(d)]);
        let mut t2 = Tensor::new();
        t2.add_term(vec![Monomial::x(d, 0), Monomial::x(d, 0)], Rational::one());
        assert!(tau_apply(&t2, 0, 1, d).unwrap().is_zero());
    }

    #[test]
    fn bare_product() {
        let r = Representation::new(LieData::so3());
        let a2 = parse_graph("G(n=2;I=0;e=[])").unwrap();
        assert_eq!(r.eval_graph(&a2, &[poly("x_1"), poly("p_2")]).unwrap(), poly("x_1*p_2"));
    }

    #[test]
    fn arity_mismatch() {
        let r = Representation::new(LieData::so3());
        let a2 = parse_graph("G(n=2;I=0;e=[])").unwrap();
        assert!(matches!(r.eval_graph(&a2, &[poly("x_1")]), Err(RepError::ArityMismatch { .. })));
    }

    #[test]
    fn jacobi_poly_vanishes_for_presets() {
        for l in [LieData::so3(), LieData::sl2(), LieData::heisenberg()] {
            assert!(Representation::new(l).jacobi_poly().is_zero());
        }
    }
}
