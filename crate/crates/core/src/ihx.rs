//! Slice enumeration, generalized IHX relations and reduction modulo them.
//!
//! Relations are homogeneous in `(n, m, e)`, so the quotient is computed one
//! slice at a time. A relation in slice `(n, m, e)` comes from a parent in
//! `(n, m − 1, e − 1)` whose internal vertex `v` is split into `v → w`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{CanonicalGraph, DirectedGraph, GraphSum, Slice};
use crate::linalg::{Rational, RowBasis, SparseVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IhxError {
    #[error("term in slice {slice} lies outside the bounds {bounds}")]
    OutOfBounds { slice: Slice, bounds: Bounds },
}

/// Which graphs an enumeration produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Admissible,
    /// Admissible except for exactly one internal vertex with one incoming and three outgoing edges.
    Transient,
}

/// Limits on the slices the quotient is allowed to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_arity: usize,
    pub max_internal: usize,
    pub max_edges: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self { max_arity: 6, max_internal: 4, max_edges: 10 }
    }
}

impl Bounds {
    pub fn contains(&self, s: Slice) -> bool {
        s.n <= self.max_arity && s.m <= self.max_internal && s.e <= self.max_edges
    }
}

impl std::fmt::Display for Bounds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n≤{}, m≤{}, e≤{}", self.max_arity, self.max_internal, self.max_edges)
    }
}

/// One representative per isomorphism class of graphs in the exact slice
/// `(n, m, e)` obeying `rule`, in increasing order. Classes with an odd
/// automorphism are included.
pub fn enumerate_slice(s: Slice, rule: Rule) -> Vec<DirectedGraph> {
    let Slice { n, m, e } = s;
    if rule == Rule::Transient && m == 0 {
        return Vec::new();
    }
    let total = n + m;
    let pairs: Vec<(usize, usize)> =
        (0..total).flat_map(|a| (0..total).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let max_out = if rule == Rule::Transient { 3 } else { 2 };
    let mut found = BTreeSet::new();
    let mut st = Search { n, e, pairs: &pairs, max_out, indeg: vec![0; total], outdeg: vec![0; total], chosen: Vec::new() };
    st.run(0, &mut |edges: &[(usize, usize)]| {
        let g = DirectedGraph::from_parts(n, m, edges.to_vec());
        if !fits_rule(&g, rule) {
            return;
        }
        found.insert(g.isomorphism_class());
    });
    found.into_iter().collect()
}

/// Admissible canonical nonzero graphs of a slice.
pub fn enumerate_graphs(n: usize, m: usize, e: usize) -> Vec<CanonicalGraph> {
    enumerate_slice(Slice::new(n, m, e), Rule::Admissible)
        .into_iter()
        .filter(|g| !g.has_odd_automorphism())
        .map(CanonicalGraph::new_unchecked)
        .collect()
}

fn fits_rule(g: &DirectedGraph, rule: Rule) -> bool {
    match rule {
        Rule::Admissible => g.is_admissible(),
        Rule::Transient => {
            let heavy = (g.n_external()..g.n_vertices()).filter(|&v| g.out_degree(v) == 3).count();
            heavy == 1 && g.check_internal_vertices(3).is_ok() && g.check_connected().is_ok()
        }
    }
}

struct Search<'a> {
    n: usize,
    e: usize,
    pairs: &'a [(usize, usize)],
    max_out: usize,
    indeg: Vec<usize>,
    outdeg: Vec<usize>,
    chosen: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn allowed(&self, a: usize, b: usize) -> bool {
        let n = self.n;
        let src_ok = a < n || (self.outdeg[a] < self.max_out && self.outdeg[a] + self.indeg[a] < self.max_out + 1);
        let dst_ok = b < n || (self.indeg[b] == 0 && self.outdeg[b] + self.indeg[b] < self.max_out + 1);
        src_ok && dst_ok
    }

    fn run(&mut self, from: usize, visit: &mut impl FnMut(&[(usize, usize)])) {
        if self.chosen.len() == self.e {
            visit(&self.chosen);
            return;
        }
        let remaining = self.e - self.chosen.len();
        for k in from..self.pairs.len() {
            if self.pairs.len() - k < remaining {
                break;
            }
            let (a, b) = self.pairs[k];
            if !self.allowed(a, b) {
                continue;
            }
            self.outdeg[a] += 1;
            self.indeg[b] += 1;
            self.chosen.push((a, b));
            self.run(k + 1, visit);
            self.chosen.pop();
            self.outdeg[a] -= 1;
            self.indeg[b] -= 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SplitKind {
    /// Split of an internal vertex of an admissible graph.
    Ordinary,
    /// Split of the one-in/three-out vertex of a transient parent.
    FourValent,
}

#[derive(Debug, Clone)]
pub struct IhxRelation {
    pub parent: DirectedGraph,
    pub vertex: usize,
    pub kind: SplitKind,
    pub relation: GraphSum,
}

impl IhxRelation {
    /// True when the split vertex was univalent in its parent.
    pub fn from_univalent(&self) -> bool {
        self.parent.valence(self.vertex) == 1
    }
}

/// Replaces internal vertex `v` by `v → w` (`w` new and last, the new edge last)
/// and sums the admissible reconnections.
pub fn split_vertex(parent: &DirectedGraph, v: usize) -> GraphSum {
    let n = parent.n_external();
    let m = parent.n_internal();
    let w = n + m;
    let incident: Vec<(usize, bool)> = parent
        .edges()
        .iter()
        .enumerate()
        .filter_map(|(k, &(a, b))| {
            if a == v {
                Some((k, true))
            } else if b == v {
                Some((k, false))
            } else {
                None
            }
        })
        .collect();
    let mut out = GraphSum::zero();
    let one = Rational::one();
    for mask in 0..1usize << incident.len() {
        let mut edges = parent.edges().to_vec();
        for (bit, &(k, src)) in incident.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                if src {
                    edges[k].0 = w;
                } else {
                    edges[k].1 = w;
                }
            }
        }
        edges.push((v, w));
        let g = DirectedGraph::from_parts(n, m + 1, edges);
        if g.is_admissible() {
            out.add_admissible(&g, &one);
        }
    }
    out
}

/// All nonzero relations landing in slice `s`.
pub fn generate_ihx(s: Slice) -> Vec<IhxRelation> {
    if s.m == 0 || s.e == 0 {
        return Vec::new();
    }
    let parent_slice = Slice::new(s.n, s.m - 1, s.e - 1);
    let mut out = Vec::new();
    for parent in enumerate_slice(parent_slice, Rule::Admissible) {
        for v in parent.n_external()..parent.n_vertices() {
            let relation = split_vertex(&parent, v);
            if !relation.is_zero() {
                out.push(IhxRelation { parent: parent.clone(), vertex: v, kind: SplitKind::Ordinary, relation });
            }
        }
    }
    for parent in enumerate_slice(parent_slice, Rule::Transient) {
        let v = (parent.n_external()..parent.n_vertices()).find(|&v| parent.out_degree(v) == 3).unwrap();
        let relation = split_vertex(&parent, v);
        if !relation.is_zero() {
            out.push(IhxRelation { parent, vertex: v, kind: SplitKind::FourValent, relation });
        }
    }
    out
}

/// `dgr` modulo IHX restricted to one slice.
#[derive(Debug)]
pub struct QuotientSpace {
    pub slice: Slice,
    pub basis: Vec<CanonicalGraph>,
    pub relations: Vec<IhxRelation>,
    pub span: RowBasis<CanonicalGraph>,
    /// Rank contributed before univalent splits are added.
    pub rank_without_univalent: usize,
}

impl QuotientSpace {
    pub fn build(s: Slice) -> Self {
        let basis = enumerate_graphs(s.n, s.m, s.e);
        let mut relations = generate_ihx(s);
        relations.sort_by_key(|r| r.from_univalent());
        let mut span = RowBasis::new();
        let mut rank_without_univalent = 0;
        for r in &relations {
            span.insert(r.relation.vector().clone());
            if !r.from_univalent() {
                rank_without_univalent = span.rank();
            }
        }
        Self { slice: s, basis, relations, span, rank_without_univalent }
    }

    pub fn dim_graphs(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    pub fn dim_quotient(&self) -> usize {
        self.dim_graphs() - self.rank()
    }

    pub fn univalent_relation_count(&self) -> usize {
        self.relations.iter().filter(|r| r.from_univalent()).count()
    }

    /// Normal form of a vector supported in this slice.
    pub fn reduce(&self, x: &SparseVector<CanonicalGraph>) -> SparseVector<CanonicalGraph> {
        debug_assert!(x.keys().all(|g| g.slice() == self.slice));
        self.span.reduce(x)
    }

    /// Basis graphs that are not pivots, i.e. a basis of the quotient.
    pub fn quotient_basis(&self) -> Vec<CanonicalGraph> {
        self.basis.iter().filter(|g| !self.span.is_pivot(g)).cloned().collect()
    }
}

/// A lazily built family of slice quotients.
#[derive(Debug, Default)]
pub struct IhxQuotient {
    bounds: Bounds,
    cache: Mutex<HashMap<Slice, Arc<QuotientSpace>>>,
}

impl IhxQuotient {
    pub fn new(bounds: Bounds) -> Self {
        Self { bounds, cache: Mutex::new(HashMap::new()) }
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn slice(&self, s: Slice) -> Result<Arc<QuotientSpace>, IhxError> {
        if !self.bounds.contains(s) {
            return Err(IhxError::OutOfBounds { slice: s, bounds: self.bounds });
        }
        if let Some(q) = self.cache.lock().unwrap().get(&s) {
            return Ok(q.clone());
        }
        let q = Arc::new(QuotientSpace::build(s));
        Ok(self.cache.lock().unwrap().entry(s).or_insert(q).clone())
    }

    /// Normal form modulo IHX, slice by slice.
    pub fn reduce(&self, x: &GraphSum) -> Result<GraphSum, IhxError> {
        let mut out = GraphSum::zero();
        for (s, part) in x.by_slice() {
            let q = self.slice(s)?;
            out += &GraphSum::from_vector(q.reduce(part.vector()));
        }
        Ok(out)
    }

    pub fn is_zero(&self, x: &GraphSum) -> Result<bool, IhxError> {
        for (s, part) in x.by_slice() {
            if !self.slice(s)?.reduce(part.vector()).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `x` and `y` agree modulo IHX.
    pub fn equal(&self, x: &GraphSum, y: &GraphSum) -> Result<bool, IhxError> {
        self.is_zero(&(x - y))
    }

    /// Built slices with their statistics, sorted by slice.
    pub fn built(&self) -> BTreeMap<Slice, Arc<QuotientSpace>> {
        self.cache.lock().unwrap().iter().map(|(k, v)| (*k, v.clone())).collect()
    }
}

pub fn is_zero_mod_ihx(x: &GraphSum, q: &IhxQuotient) -> Result<bool, IhxError> {
    q.is_zero(x)
}
