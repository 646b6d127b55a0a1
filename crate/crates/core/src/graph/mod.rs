//! Admissible directed graphs, their canonical forms and linear combinations.
//!
//! Vertex ids `0..n` are the external vertices (printed `1..n`), ids
//! `n..n+m` are the internal ones (printed `i1..im`). The position of an
//! edge in [`DirectedGraph::edges`] is its place in the linear edge order;
//! permuting edges multiplies the graph by the sign of the permutation.

mod canon;
mod dsl;
mod sum;

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use canon::{parity, permutations};
pub use dsl::{parse_graph, parse_sum, ParseError};
pub use sum::GraphSum;

pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex id {vertex} out of range for a graph with {n_external} external and {n_internal} internal vertices")]
    VertexOutOfRange { vertex: usize, n_external: usize, n_internal: usize },
    #[error("graph {graph} is not admissible: {violation}")]
    Inadmissible { graph: String, violation: Violation },
    #[error("insertion position {position} out of range 1..={arity}")]
    PositionOutOfRange { position: usize, arity: usize },
}

/// The first admissibility clause a graph violates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    SimpleLoop { edge: usize },
    DoubleEdge { first: usize, second: usize },
    InternalValence { vertex: usize, valence: usize },
    InternalInDegree { vertex: usize, in_degree: usize },
    InternalOutDegree { vertex: usize, out_degree: usize },
    Disconnected { vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SimpleLoop { edge } => write!(f, "edge {} is a simple loop", edge + 1),
            Violation::DoubleEdge { first, second } => {
                write!(f, "edges {} and {} are parallel", first + 1, second + 1)
            }
            Violation::InternalValence { vertex, valence } => {
                write!(f, "internal vertex #{vertex} has valence {valence} > 3")
            }
            Violation::InternalInDegree { vertex, in_degree } => {
                write!(f, "internal vertex #{vertex} has {in_degree} incoming edges")
            }
            Violation::InternalOutDegree { vertex, out_degree } => {
                write!(f, "internal vertex #{vertex} has {out_degree} outgoing edges")
            }
            Violation::Disconnected { vertex } => {
                write!(f, "internal vertex #{vertex} is not connected to an external vertex")
            }
        }
    }
}

/// Bidegree slice: arity, internal vertices, edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Slice {
    pub n: usize,
    pub m: usize,
    pub e: usize,
}

impl Slice {
    pub fn new(n: usize, m: usize, e: usize) -> Self {
        Self { n, m, e }
    }

    pub fn degree(&self) -> i64 {
        2 * self.m as i64 - self.e as i64
    }

    pub fn lie_degree(&self) -> i64 {
        self.degree() + self.n as i64 - 1
    }

    pub fn second_grading(&self) -> usize {
        self.m + self.n - 1
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, m={}, e={})", self.n, self.m, self.e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedGraph {
    n_external: usize,
    n_internal: usize,
    edges: Vec<Edge>,
}

impl DirectedGraph {
    pub fn new(n_external: usize, n_internal: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let total = n_external + n_internal;
        for &(a, b) in &edges {
            for v in [a, b] {
                if v >= total {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n_external, n_internal });
                }
            }
        }
        Ok(Self { n_external, n_internal, edges })
    }

    /// Builds a graph from ids that are known to be in range.
    pub(crate) fn from_parts(n_external: usize, n_internal: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.iter().all(|&(a, b)| a.max(b) < n_external + n_internal));
        Self { n_external, n_internal, edges }
    }

    pub fn n_external(&self) -> usize {
        self.n_external
    }

    pub fn n_internal(&self) -> usize {
        self.n_internal
    }

    pub fn arity(&self) -> usize {
        self.n_external
    }

    pub fn n_vertices(&self) -> usize {
        self.n_external + self.n_internal
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_external(&self, v: usize) -> bool {
        v < self.n_external
    }

    pub fn slice(&self) -> Slice {
        Slice::new(self.n_external, self.n_internal, self.edges.len())
    }

    /// `2·#internal − #edges`.
    pub fn degree(&self) -> i64 {
        self.slice().degree()
    }

    /// Degree after the `s^{-n+1}` shift: `degree + n − 1`.
    pub fn lie_degree(&self) -> i64 {
        self.slice().lie_degree()
    }

    /// `#internal + #external − 1`.
    pub fn second_grading(&self) -> usize {
        self.slice().second_grading()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.in_degree(v) + self.out_degree(v)
    }

    /// The same graph with its edge list permuted: new edge `k` is old edge `order[k]`.
    pub fn with_edge_order(&self, order: &[usize]) -> Self {
        Self::from_parts(self.n_external, self.n_internal, order.iter().map(|&k| self.edges[k]).collect())
    }

    /// Relabels internal vertex `n + k` as `n + perm[k]`.
    pub fn relabel_internal(&self, perm: &[usize]) -> Self {
        let n = self.n_external;
        let f = |v: usize| if v < n { v } else { n + perm[v - n] };
        Self::from_parts(n, self.n_internal, self.edges.iter().map(|&(a, b)| (f(a), f(b))).collect())
    }

    /// Relabels external vertex `k` as `perm[k]`.
    pub fn relabel_external(&self, perm: &[usize]) -> Self {
        let n = self.n_external;
        let f = |v: usize| if v < n { perm[v] } else { v };
        Self::from_parts(n, self.n_internal, self.edges.iter().map(|&(a, b)| (f(a), f(b))).collect())
    }

    /// Checks the admissibility clauses in order and reports the first failure.
    ///
    /// Parallel edges are only banned when they point the same way; a 2-cycle
    /// `u→v, v→u` is admissible.
    pub fn check_admissible(&self) -> Result<(), Violation> {
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if a == b {
                return Err(Violation::SimpleLoop { edge: k });
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            if let Some(j) = self.edges[..k].iter().position(|f| f == e) {
                return Err(Violation::DoubleEdge { first: j, second: k });
            }
        }
        self.check_internal_vertices(2)?;
        self.check_connected()
    }

    pub fn is_admissible(&self) -> bool {
        self.check_admissible().is_ok()
    }

    /// Valence and direction constraints on internal vertices, with `max_out`
    /// outgoing edges allowed (2 for admissible graphs, 3 for transient IHX parents).
    pub(crate) fn check_internal_vertices(&self, max_out: usize) -> Result<(), Violation> {
        for v in self.n_external..self.n_vertices() {
            let (i, o) = (self.in_degree(v), self.out_degree(v));
            if i + o > max_out + 1 {
                return Err(Violation::InternalValence { vertex: v, valence: i + o });
            }
            if i > 1 {
                return Err(Violation::InternalInDegree { vertex: v, in_degree: i });
            }
            if o > max_out {
                return Err(Violation::InternalOutDegree { vertex: v, out_degree: o });
            }
        }
        Ok(())
    }

    /// Every internal vertex reaches an external one, ignoring edge directions.
    pub(crate) fn check_connected(&self) -> Result<(), Violation> {
        let total = self.n_vertices();
        let mut seen = vec![false; total];
        let mut queue: VecDeque<usize> = (0..self.n_external).collect();
        for v in 0..self.n_external {
            seen[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &(a, b) in &self.edges {
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(Violation::Disconnected { vertex: v }),
            None => Ok(()),
        }
    }

    pub fn vertex_name(&self, v: usize) -> String {
        if v < self.n_external {
            (v + 1).to_string()
        } else {
            format!("i{}", v - self.n_external + 1)
        }
    }

    /// Canonical representative and the sign relating `self` to it, or
    /// `None` when the graph has an automorphism inducing an odd edge permutation.
    pub fn canonicalize(&self) -> Result<Option<(CanonicalGraph, i64)>, GraphError> {
        if let Err(violation) = self.check_admissible() {
            return Err(GraphError::Inadmissible { graph: self.to_string(), violation });
        }
        Ok(self.canonical_form().map(|(g, s)| (CanonicalGraph(g), s)))
    }

    /// Canonicalization without the admissibility check.
    pub(crate) fn canonical_form(&self) -> Option<(DirectedGraph, i64)> {
        canon::canonical_form(self)
    }

    /// Minimal relabeling with the edge order forgotten, defined even when
    /// the graph vanishes by an odd automorphism.
    pub fn isomorphism_class(&self) -> DirectedGraph {
        canon::canonical_form_raw(self).0
    }

    /// Whether some relabeling of internal vertices fixing the externals
    /// maps the graph to itself with an odd permutation of its edges.
    pub fn has_odd_automorphism(&self) -> bool {
        canon::canonical_form_raw(self).2
    }
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G(n={}; I={}; e=[", self.n_external, self.n_internal)?;
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({}->{})", self.vertex_name(a), self.vertex_name(b))?;
        }
        write!(f, "])")
    }
}

/// An admissible graph in canonical form with no odd automorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalGraph(DirectedGraph);

impl CanonicalGraph {
    pub fn graph(&self) -> &DirectedGraph {
        &self.0
    }

    /// Serialized canonical form, usable as an opaque basis label.
    pub fn key(&self) -> String {
        self.0.to_string()
    }

    pub(crate) fn new_unchecked(g: DirectedGraph) -> Self {
        Self(g)
    }
}

impl std::ops::Deref for CanonicalGraph {
    type Target = DirectedGraph;
    fn deref(&self) -> &DirectedGraph {
        &self.0
    }
}

impl fmt::Display for CanonicalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
