//! The multilinear part of the cobar complex of `K[t_1..t_n]` and its
//! identification with graphs under `ad_{a2}`.
//!
//! A basis element `s⁻¹t_{B_1} ⊗ … ⊗ s⁻¹t_{B_k}` is an ordered set
//! composition of `{1..n}`; blocks are stored as bitmasks over `0..n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{parity, permutations, CanonicalGraph, DirectedGraph, GraphSum, Slice};
use crate::ihx::{enumerate_graphs, IhxError, IhxQuotient};
use crate::linalg::{row_reduce, sign_pow, Rational, RowBasis, SparseVector};
use crate::operad::bracket;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobarError {
    #[error("external vertex {vertex} of the core has valence {valence}, expected 1")]
    NotUnivalent { vertex: usize, valence: usize },
    #[error("external vertex {vertex} of the core is joined to another external vertex")]
    ExternalToExternal { vertex: usize },
    #[error("composition is on {composition} letters but the core has {core} external vertices")]
    SizeMismatch { composition: usize, core: usize },
    #[error(transparent)]
    Ihx(#[from] IhxError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetComposition {
    n: usize,
    blocks: Vec<u32>,
}

impl SetComposition {
    /// Blocks given as lists of 1-based letters.
    pub fn from_blocks(n: usize, blocks: &[&[usize]]) -> Option<Self> {
        let mut seen = 0u32;
        let mut out = Vec::new();
        for b in blocks {
            let mut mask = 0u32;
            for &x in *b {
                if x == 0 || x > n || (seen | mask) >> (x - 1) & 1 == 1 {
                    return None;
                }
                mask |= 1 << (x - 1);
            }
            if mask == 0 {
                return None;
            }
            seen |= mask;
            out.push(mask);
        }
        (seen == full(n)).then_some(Self { n, blocks: out })
    }

    pub fn from_masks(n: usize, blocks: Vec<u32>) -> Self {
        debug_assert_eq!(blocks.iter().fold(0, |a, b| a | b), full(n));
        Self { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block containing letter `x` (0-based).
    pub fn block_of(&self, x: usize) -> usize {
        self.blocks.iter().position(|b| b >> x & 1 == 1).expect("letter in some block")
    }

    /// Renames letter `x` to `perm[x]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|&b| (0..self.n).filter(|&x| b >> x & 1 == 1).fold(0u32, |acc, x| acc | 1 << perm[x]))
            .collect();
        Self { n: self.n, blocks }
    }
}

impl fmt::Display for SetComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "⊗")?;
            }
            write!(f, "t")?;
            for x in 0..self.n {
                if b >> x & 1 == 1 {
                    write!(f, "{}", x + 1)?;
                }
            }
        }
        Ok(())
    }
}

fn full(n: usize) -> u32 {
    if n == 0 { 0 } else { (1u32 << n) - 1 }
}

pub type CobarElement = SparseVector<SetComposition>;

/// All ordered set compositions of `{1..n}` into `k` blocks.
pub fn compositions(n: usize, k: usize) -> Vec<SetComposition> {
    fn go(rest: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // enumerate nonempty submasks of rest
        let mut sub = rest;
        while sub != 0 {
            if k > 1 || sub == rest {
                cur.push(sub);
                go(rest & !sub, k - 1, cur, out);
                cur.pop();
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut out = Vec::new();
    go(full(n), k, &mut Vec::new(), &mut out);
    let mut v: Vec<SetComposition> = out.into_iter().map(|blocks| SetComposition { n, blocks }).collect();
    v.sort();
    v
}

/// `d = Σ_{i=1..k} (−1)^i d_i`, each `d_i` splitting block `i` into two nonempty parts.
pub fn cobar_d(x: &CobarElement) -> CobarElement {
    let mut out = CobarElement::new();
    for (c, coeff) in x.iter() {
        for (i, &b) in c.blocks.iter().enumerate() {
            let sign = if (i + 1) % 2 == 0 { coeff.clone() } else { -coeff };
            let mut a = (b - 1) & b;
            while a != 0 {
                let mut blocks = Vec::with_capacity(c.blocks.len() + 1);
                blocks.extend_from_slice(&c.blocks[..i]);
                blocks.push(a);
                blocks.push(b & !a);
                blocks.extend_from_slice(&c.blocks[i + 1..]);
                out.add_term(SetComposition { n: c.n, blocks }, sign.clone());
                a = (a - 1) & b;
            }
        }
    }
    out
}

/// `(1/n!) Σ_σ sign(σ) t_{σ(1)} ⊗ … ⊗ t_{σ(n)}`.
pub fn omega(n: usize) -> CobarElement {
    let perms = permutations(n);
    let w = Rational::new(1.into(), (1..=n as u64).product::<u64>().into());
    perms
        .iter()
        .map(|p| {
            let c = SetComposition { n, blocks: p.iter().map(|&x| 1u32 << x).collect() };
            (c, w.clone() * Rational::from_integer(parity(p).into()))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CobarCohomology {
    pub n: usize,
    /// `dims[k-1]` is the dimension of the degree-`k` chains.
    pub chain_dims: Vec<usize>,
    /// `ranks[k-1]` is the rank of `d` leaving degree `k`.
    pub ranks: Vec<usize>,
    pub cohomology: Vec<usize>,
    /// Whether `ω_n` is closed and not exact.
    pub omega_represents_top: bool,
}

impl CobarCohomology {
    pub fn euler_characteristic(&self) -> i64 {
        self.cohomology.iter().enumerate().map(|(i, &d)| sign_pow(i as i64 + 1) * d as i64).sum()
    }
}

/// Rank of `d` from degree `k` to `k + 1`.
fn d_rank(n: usize, k: usize) -> usize {
    let mut basis: RowBasis<SetComposition> = RowBasis::new();
    for c in compositions(n, k) {
        basis.insert(cobar_d(&SparseVector::singleton(c, Rational::one())));
    }
    basis.rank()
}

pub fn cobar_cohomology(n: usize) -> CobarCohomology {
    let chain_dims: Vec<usize> = (1..=n).map(|k| compositions(n, k).len()).collect();
    let ranks: Vec<usize> = (1..=n).map(|k| if k == n { 0 } else { d_rank(n, k) }).collect();
    let cohomology = (0..n).map(|i| chain_dims[i] - ranks[i] - if i > 0 { ranks[i - 1] } else { 0 }).collect();
    let w = omega(n);
    let closed = cobar_d(&w).is_zero();
    let exact = n > 1 && {
        let image = row_reduce(compositions(n, n - 1).into_iter().map(|c| cobar_d(&SparseVector::singleton(c, Rational::one()))));
        image.contains(&w)
    };
    CobarCohomology { n, chain_dims, ranks, cohomology, omega_represents_top: closed && !exact }
}

/// Number of ordered set compositions of `n` with `k` blocks, by inclusion–exclusion.
pub fn count_compositions(n: usize, k: usize) -> u64 {
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for j in 0..=k {
        let term = binom * (k as i128 - j as i128).pow(n as u32);
        total += if j % 2 == 0 { term } else { -term };
        binom = binom * (k as i128 - j as i128) / (j as i128 + 1);
    }
    total as u64
}

/// Checks that a core has only univalent externals, each joined to an internal vertex.
pub fn check_core(core: &DirectedGraph) -> Result<(), CobarError> {
    for v in 0..core.n_external() {
        let valence = core.valence(v);
        if valence != 1 {
            return Err(CobarError::NotUnivalent { vertex: v + 1, valence });
        }
        if core.edges().iter().any(|&(a, b)| (a == v && b < core.n_external()) || (b == v && a < core.n_external())) {
            return Err(CobarError::ExternalToExternal { vertex: v + 1 });
        }
    }
    Ok(())
}

/// Sign making gluing a chain map from `1 ⊗ d` to `ad_{a2}`.
pub fn glue_sign(core_degree: i64, k: usize) -> i64 {
    let k = k as i64;
    sign_pow((k - 1) * core_degree + (k - 1) * (k - 2) / 2)
}

/// The unsigned glued graph: leg `x` of the core is attached to external vertex `block_of(x)`.
pub fn glue_graph(core: &DirectedGraph, comp: &SetComposition) -> Result<DirectedGraph, CobarError> {
    check_core(core)?;
    let n = core.n_external();
    if comp.n() != n {
        return Err(CobarError::SizeMismatch { composition: comp.n(), core: n });
    }
    let k = comp.len();
    let f = |v: usize| if v < n { comp.block_of(v) } else { k + v - n };
    let edges = core.edges().iter().map(|&(a, b)| (f(a), f(b))).collect();
    Ok(DirectedGraph::new(k, core.n_internal(), edges).expect("ids in range"))
}

/// `core ⊗ comp ↦ ±` glued graph; zero when gluing creates parallel edges.
pub fn glue(core: &DirectedGraph, comp: &SetComposition) -> Result<GraphSum, CobarError> {
    let g = glue_graph(core, comp)?;
    let mut out = GraphSum::zero();
    if g.is_admissible() {
        out.add_admissible(&g, &Rational::from_integer(glue_sign(core.degree(), comp.len()).into()));
    }
    Ok(out)
}

/// Linear extension of [`glue`] in the composition argument.
pub fn glue_element(core: &DirectedGraph, x: &CobarElement) -> Result<GraphSum, CobarError> {
    let mut out = GraphSum::zero();
    for (c, coeff) in x.iter() {
        out.add_scaled(&glue(core, c)?, coeff);
    }
    Ok(out)
}

/// Inverse of gluing up to the `S_n` action: legs are numbered by walking the
/// externals in order and their edges in edge order.
pub fn unglue(g: &DirectedGraph) -> Option<(DirectedGraph, SetComposition)> {
    let k = g.n_external();
    if !is_good(g) {
        return None;
    }
    let mut leg_of_edge = vec![None; g.n_edges()];
    let mut blocks = vec![0u32; k];
    let mut next = 0usize;
    for (j, block) in blocks.iter_mut().enumerate() {
        for (idx, &(a, b)) in g.edges().iter().enumerate() {
            if a == j || b == j {
                leg_of_edge[idx] = Some(next);
                *block |= 1 << next;
                next += 1;
            }
        }
    }
    let n = next;
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            let remap = |v: usize| if v < k { leg_of_edge[idx].unwrap() } else { n + v - k };
            (remap(a), remap(b))
        })
        .collect();
    Some((DirectedGraph::new(n, g.n_internal(), edges).ok()?, SetComposition { n, blocks }))
}

/// No external–external edges and no isolated externals.
pub fn is_good(g: &DirectedGraph) -> bool {
    let k = g.n_external();
    g.edges().iter().all(|&(a, b)| a >= k || b >= k) && (0..k).all(|v| g.valence(v) > 0)
}

/// Number of edges meeting the external vertices.
pub fn leg_count(g: &DirectedGraph) -> usize {
    let k = g.n_external();
    g.edges().iter().filter(|&&(a, b)| a < k || b < k).count()
}

/// Good canonical graphs with `k` externals, `n` legs, `m` internals and `e` edges.
pub fn good_graphs(k: usize, n: usize, m: usize, e: usize) -> Vec<CanonicalGraph> {
    enumerate_graphs(k, m, e).into_iter().filter(|g| is_good(g) && leg_count(g) == n).collect()
}

/// Cores for `n` legs: univalent externals, each on an internal vertex.
pub fn cores(n: usize, m: usize, e: usize) -> Vec<CanonicalGraph> {
    enumerate_graphs(n, m, e).into_iter().filter(|g| check_core(g).is_ok()).collect()
}

/// Representative of the `S_n` orbit of `(core, comp)`.
pub fn orbit_key(core: &DirectedGraph, comp: &SetComposition) -> (DirectedGraph, SetComposition) {
    let n = core.n_external();
    permutations(n)
        .iter()
        .map(|p| (core.relabel_external(p).isomorphism_class(), comp.permute(p)))
        .min()
        .expect("at least one permutation")
}

#[derive(Debug, Clone, Serialize)]
pub struct GlueBijection {
    pub slice: (usize, usize, usize),
    pub orbits: usize,
    pub targets: usize,
    pub round_trips: bool,
}

/// Compares `S_n` orbits of `(core, composition)` pairs with nonzero image
/// against the good graphs with `n` legs, `m` internals and `e` edges.
pub fn glue_bijection(n: usize, m: usize, e: usize) -> GlueBijection {
    let mut orbits = BTreeSet::new();
    let mut images = BTreeSet::new();
    let all_cores: Vec<DirectedGraph> = enumerate_slice_cores(n, m, e);
    for core in &all_cores {
        for k in 1..=n {
            for comp in compositions(n, k) {
                let g = glue_graph(core, &comp).expect("core in domain");
                if g.is_admissible() && !g.has_odd_automorphism() {
                    orbits.insert(orbit_key(core, &comp));
                    images.insert(g.isomorphism_class());
                }
            }
        }
    }
    let mut targets = 0;
    let mut round_trips = true;
    for k in 1..=n {
        for g in good_graphs(k, n, m, e) {
            targets += 1;
            let (core, comp) = unglue(&g).expect("good graph");
            let back = glue_graph(&core, &comp).expect("core in domain");
            round_trips &= back.isomorphism_class() == g.isomorphism_class() && images.contains(g.graph());
        }
    }
    GlueBijection { slice: (n, m, e), orbits: orbits.len(), targets, round_trips }
}

/// All cores, including ones vanishing by an odd automorphism.
fn enumerate_slice_cores(n: usize, m: usize, e: usize) -> Vec<DirectedGraph> {
    crate::ihx::enumerate_slice(Slice::new(n, m, e), crate::ihx::Rule::Admissible)
        .into_iter()
        .filter(|g| check_core(g).is_ok())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceComparison {
    pub legs: usize,
    pub internal: usize,
    pub edges: usize,
    /// Cohomology of the good graphs under `ad_{a2}` modulo IHX, indexed by arity `1..=legs`.
    pub graph_cohomology: Vec<usize>,
    /// Dimension of the antisymmetrized cores modulo IHX.
    pub antisymmetric_cores: usize,
    pub agrees: bool,
}

/// Quotient of the good subspace of a slice by the IHX relations living in it.
struct GoodSpace {
    basis: Vec<CanonicalGraph>,
    relations: RowBasis<CanonicalGraph>,
}

fn good_space(k: usize, n: usize, m: usize, e: usize, q: &IhxQuotient) -> Result<GoodSpace, CobarError> {
    let basis = good_graphs(k, n, m, e);
    let mut relations = RowBasis::new();
    if !basis.is_empty() {
        let qs = q.slice(Slice::new(k, m, e))?;
        for r in &qs.relations {
            if r.relation.keys().all(|g| is_good(g) && leg_count(g) == n) {
                relations.insert(r.relation.vector().clone());
            }
        }
    }
    Ok(GoodSpace { basis, relations })
}

/// Cohomology of `ad_{a2}` on good graphs with fixed legs, internals and edges,
/// compared with the antisymmetric part of the cores.
pub fn slice_cohomology_vs_corollary(n: usize, m: usize, e: usize, q: &IhxQuotient) -> Result<SliceComparison, CobarError> {
    let a2 = GraphSum::from_graph(&DirectedGraph::new(2, 0, vec![]).unwrap()).unwrap();
    let spaces: Vec<GoodSpace> = (1..=n).map(|k| good_space(k, n, m, e, q)).collect::<Result<_, _>>()?;
    let dims: Vec<usize> = spaces.iter().map(|s| s.basis.len() - s.relations.rank()).collect();
    let mut ranks = vec![0usize; n];
    for k in 1..n {
        let target = &spaces[k];
        let mut span = target.relations.clone();
        let base = span.rank();
        for g in &spaces[k - 1].basis {
            let mut x = GraphSum::zero();
            x.add_canonical(g.clone(), Rational::one());
            let image = bracket(&a2, &x);
            debug_assert!(image.keys().all(|t| is_good(t) && leg_count(t) == n), "{image}");
            span.insert(image.into_vector());
        }
        ranks[k - 1] = span.rank() - base;
    }
    let graph_cohomology: Vec<usize> =
        (0..n).map(|i| dims[i] - ranks[i] - if i > 0 { ranks[i - 1] } else { 0 }).collect();

    let top = &spaces[n - 1];
    let mut anti = top.relations.clone();
    let base = anti.rank();
    for g in &top.basis {
        let mut sym = GraphSum::zero();
        for p in permutations(n) {
            let s = Rational::from_integer(parity(p).into());
            sym.add_admissible(&g.relabel_external(p), &s);
        }
        anti.insert(sym.into_vector());
    }
    let antisymmetric_cores = anti.rank() - base;
    let agrees = graph_cohomology[..n - 1].iter().all(|&d| d == 0) && graph_cohomology[n - 1] == antisymmetric_cores;
    Ok(SliceComparison { legs: n, internal: m, edges: e, graph_cohomology, antisymmetric_cores, agrees })
}

/// `glue(core, d c) = ad_{a2}(glue(core, c))` for one composition.
pub fn chain_map_holds(core: &DirectedGraph, comp: &SetComposition) -> Result<bool, CobarError> {
    let a2 = GraphSum::from_graph(&DirectedGraph::new(2, 0, vec![]).unwrap()).unwrap();
    let lhs = glue_element(core, &cobar_d(&SparseVector::singleton(comp.clone(), Rational::one())))?;
    let rhs = bracket(&a2, &glue(core, comp)?);
    Ok(lhs == rhs)
}

/// Per-degree chain dimensions as a map, for reporting.
pub fn chain_table(n: usize) -> BTreeMap<usize, usize> {
    (1..=n).map(|k| (k, compositions(n, k).len())).collect()
}
