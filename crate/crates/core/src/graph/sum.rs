use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Deref, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use super::{CanonicalGraph, DirectedGraph, GraphError, Slice};
use crate::linalg::{fmt_rational, Rational, SparseVector};

/// A finite rational combination of canonical graphs, possibly of mixed arity.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct GraphSum(SparseVector<CanonicalGraph>);

impl GraphSum {
    pub fn zero() -> Self {
        Self::default()
    }

    /// A single admissible graph with coefficient one (zero if it has an odd automorphism).
    pub fn from_graph(g: &DirectedGraph) -> Result<Self, GraphError> {
        let mut s = Self::zero();
        s.add_graph(g, &Rational::one())?;
        Ok(s)
    }

    pub fn from_vector(v: SparseVector<CanonicalGraph>) -> Self {
        Self(v)
    }

    pub fn into_vector(self) -> SparseVector<CanonicalGraph> {
        self.0
    }

    pub fn vector(&self) -> &SparseVector<CanonicalGraph> {
        &self.0
    }

    /// Adds `coeff · g`, canonicalizing `g` first.
    pub fn add_graph(&mut self, g: &DirectedGraph, coeff: &Rational) -> Result<(), GraphError> {
        if let Some((c, s)) = g.canonicalize()? {
            self.0.add_term(c, if s < 0 { -coeff } else { coeff.clone() });
        }
        Ok(())
    }

    /// Adds `coeff · g` for a graph known to be admissible.
    pub(crate) fn add_admissible(&mut self, g: &DirectedGraph, coeff: &Rational) {
        debug_assert!(g.is_admissible(), "{g}");
        if let Some((c, s)) = g.canonical_form() {
            self.0.add_term(CanonicalGraph::new_unchecked(c), if s < 0 { -coeff } else { coeff.clone() });
        }
    }

    pub fn add_canonical(&mut self, g: CanonicalGraph, coeff: Rational) {
        self.0.add_term(g, coeff);
    }

    pub fn add_scaled(&mut self, other: &GraphSum, factor: &Rational) {
        self.0.add_scaled(&other.0, factor);
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Self(self.0.scaled(factor))
    }

    pub fn filter(&self, keep: impl FnMut(&CanonicalGraph) -> bool) -> Self {
        Self(self.0.filter(keep))
    }

    /// Terms with second grading at most `cap`.
    pub fn truncate(&self, cap: usize) -> Self {
        self.filter(|g| g.second_grading() <= cap)
    }

    /// Homogeneous component of the given second grading.
    pub fn grading_component(&self, grading: usize) -> Self {
        self.filter(|g| g.second_grading() == grading)
    }

    pub fn arity_component(&self, n: usize) -> Self {
        self.filter(|g| g.arity() == n)
    }

    /// Splits into components by `(n, m, e)` slice.
    pub fn by_slice(&self) -> BTreeMap<Slice, GraphSum> {
        let mut out: BTreeMap<Slice, GraphSum> = BTreeMap::new();
        for (g, c) in self.0.iter() {
            out.entry(g.slice()).or_default().0.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn slices(&self) -> Vec<Slice> {
        let mut v: Vec<Slice> = self.0.keys().map(|g| g.slice()).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    }

    pub fn max_second_grading(&self) -> Option<usize> {
        self.0.keys().map(|g| g.second_grading()).max()
    }

    /// The common Lie degree of all terms, if there is one.
    pub fn homogeneous_lie_degree(&self) -> Option<i64> {
        let mut it = self.0.keys().map(|g| g.lie_degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Splits into components of constant Lie degree.
    pub fn by_lie_degree(&self) -> BTreeMap<i64, GraphSum> {
        let mut out: BTreeMap<i64, GraphSum> = BTreeMap::new();
        for (g, c) in self.0.iter() {
            out.entry(g.lie_degree()).or_default().0.add_term(g.clone(), c.clone());
        }
        out
    }

    /// Serializes in the graph DSL; parsing the result gives back `self`.
    pub fn to_dsl(&self) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (g, c)) in self.0.iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let a = c.abs();
            if !a.is_one() {
                out.push_str(&fmt_rational(&a));
                out.push('*');
            }
            out.push_str(&g.to_string());
        }
        out
    }
}

impl Deref for GraphSum {
    type Target = SparseVector<CanonicalGraph>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl fmt::Display for GraphSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

impl fmt::Debug for GraphSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

impl AddAssign<&GraphSum> for GraphSum {
    fn add_assign(&mut self, rhs: &GraphSum) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&GraphSum> for GraphSum {
    fn sub_assign(&mut self, rhs: &GraphSum) {
        self.0 -= &rhs.0;
    }
}

impl Add for &GraphSum {
    type Output = GraphSum;
    fn add(self, rhs: &GraphSum) -> GraphSum {
        GraphSum(&self.0 + &rhs.0)
    }
}

impl Sub for &GraphSum {
    type Output = GraphSum;
    fn sub(self, rhs: &GraphSum) -> GraphSum {
        GraphSum(&self.0 - &rhs.0)
    }
}

impl Neg for &GraphSum {
    type Output = GraphSum;
    fn neg(self) -> GraphSum {
        GraphSum(-&self.0)
    }
}

impl FromIterator<(CanonicalGraph, Rational)> for GraphSum {
    fn from_iter<T: IntoIterator<Item = (CanonicalGraph, Rational)>>(iter: T) -> Self {
        Self(iter.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }
}
