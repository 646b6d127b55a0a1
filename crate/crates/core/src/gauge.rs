//! Maurer-Cartan residuals, the truncated gauge action and the obstruction test.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{CanonicalGraph, GraphSum, Slice};
use crate::ihx::{enumerate_graphs, IhxError, IhxQuotient};
use crate::linalg::{rat, Rational, RowBasis, SparseVector};
use crate::operad::bracket_truncated;

#[derive(Debug, Error)]
pub enum GaugeError {
    #[error(transparent)]
    Ihx(#[from] IhxError),
    #[error("expected Lie degree {expected}, found a term of degree {found}")]
    Degree { expected: i64, found: i64 },
    #[error("the leading part is not Maurer-Cartan: residual at grading {grading} is {residual}")]
    NotMaurerCartan { grading: usize, residual: String },
}

/// Cap on the second grading `#internal + #external − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruncationPolicy {
    pub max_second_grading: usize,
}

impl TruncationPolicy {
    pub fn new(max_second_grading: usize) -> Self {
        Self { max_second_grading }
    }
}

fn check_degree(x: &GraphSum, expected: i64) -> Result<(), GaugeError> {
    match x.keys().map(|g| g.lie_degree()).find(|&d| d != expected) {
        Some(found) => Err(GaugeError::Degree { expected, found }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradingResidual {
    pub grading: usize,
    /// Normal form of the component of `½[α,α]` modulo IHX.
    #[serde(serialize_with = "ser_sum")]
    pub reduced: GraphSum,
    pub raw_terms: usize,
    /// False when the component depends on terms of `α` above its known part.
    pub determined: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub cap: usize,
    pub residuals: Vec<GradingResidual>,
}

impl McReport {
    /// True iff every determined residual vanishes.
    pub fn passes(&self) -> bool {
        self.residuals.iter().filter(|r| r.determined).all(|r| r.reduced.is_zero())
    }

    pub fn failing_gradings(&self) -> Vec<usize> {
        self.residuals.iter().filter(|r| r.determined && !r.reduced.is_zero()).map(|r| r.grading).collect()
    }
}

pub(crate) fn ser_sum<S: serde::Serializer>(x: &GraphSum, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_dsl())
}

/// Components of `½[α, α]` up to the cap, reduced modulo IHX.
///
/// `known_to` is the largest grading up to which `α` is given completely
/// (`None` when `α` is exact). The grading-`k` residual is marked determined
/// when it only involves components of `α` of grading ≤ `known_to`.
pub fn mc_check(
    alpha: &GraphSum,
    known_to: Option<usize>,
    q: &IhxQuotient,
    trunc: TruncationPolicy,
) -> Result<McReport, GaugeError> {
    check_degree(alpha, 1)?;
    let cap = trunc.max_second_grading;
    let half = rat(1, 2);
    let sq = bracket_truncated(alpha, alpha, Some(cap)).scaled(&half);
    let min_grading = alpha.keys().map(|g| g.second_grading()).min().unwrap_or(0);
    let mut residuals = Vec::new();
    for k in 0..=cap {
        let part = sq.grading_component(k);
        let determined = match known_to {
            None => true,
            Some(t) => k <= t + min_grading,
        };
        residuals.push(GradingResidual { grading: k, raw_terms: part.len(), reduced: q.reduce(&part)?, determined });
    }
    Ok(McReport { cap, residuals })
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeResult {
    pub cap: usize,
    #[serde(serialize_with = "ser_sum")]
    pub raw: GraphSum,
    #[serde(serialize_with = "ser_sum")]
    pub reduced: GraphSum,
}

/// `exp(ad_ξ) α` truncated at the cap.
pub fn gauge_act(xi: &GraphSum, alpha: &GraphSum, q: &IhxQuotient, trunc: TruncationPolicy) -> Result<GaugeResult, GaugeError> {
    let cap = trunc.max_second_grading;
    let raw = exp_ad(xi, alpha, cap);
    let reduced = q.reduce(&raw)?;
    Ok(GaugeResult { cap, raw, reduced })
}

/// `Σ_k ad_ξ^k(α)/k!` with every term above the cap dropped.
pub fn exp_ad(xi: &GraphSum, alpha: &GraphSum, cap: usize) -> GraphSum {
    let xi = xi.truncate(cap);
    let mut term = alpha.truncate(cap);
    let mut out = term.clone();
    let mut k = 1i64;
    while !term.is_zero() {
        term = bracket_truncated(&xi, &term, Some(cap)).scaled(&rat(1, k));
        out += &term;
        k += 1;
    }
    out
}

/// Linear functional vanishing on a span but not on a target vector.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub source_slices: Vec<Slice>,
    pub target_slices: Vec<Slice>,
    pub source_dim: usize,
    pub relation_count: usize,
    pub span_rank: usize,
    /// Target minus its projection onto the span; nonzero.
    #[serde(serialize_with = "ser_sum")]
    pub reduced_target: GraphSum,
    /// Coefficients `φ(Γ)`; `φ` kills every image and relation.
    #[serde(serialize_with = "ser_functional")]
    pub functional: SparseVector<CanonicalGraph>,
    #[serde(serialize_with = "ser_rational")]
    pub functional_on_target: Rational,
}

fn ser_functional<S: serde::Serializer>(x: &SparseVector<CanonicalGraph>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&GraphSum::from_vector(x.clone()).to_dsl())
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::linalg::fmt_rational(x))
}

#[derive(Debug, Clone, Serialize)]
pub enum Obstruction {
    Obstructed(Box<Certificate>),
    /// `[α⁽¹⁾, η] ≡ α⁽ᵏ⁾` modulo IHX.
    Unobstructed {
        #[serde(serialize_with = "ser_sum")]
        eta: GraphSum,
    },
}

impl Obstruction {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, Obstruction::Obstructed(_))
    }
}

/// Slices of given Lie degree and second grading.
pub fn slices_of(lie_degree: i64, grading: usize) -> Vec<Slice> {
    (1..=grading + 1)
        .filter_map(|n| {
            let m = grading + 1 - n;
            let e = 2 * m as i64 + n as i64 - 1 - lie_degree;
            (e >= 0).then(|| Slice::new(n, m, e as usize))
        })
        .collect()
}

pub fn dot(phi: &SparseVector<CanonicalGraph>, v: &SparseVector<CanonicalGraph>) -> Rational {
    let mut acc = Rational::zero();
    for (k, c) in v.iter() {
        if let Some(p) = phi.get(k) {
            acc += p * c;
        }
    }
    acc
}

/// Decides whether `alpha_k` (grading `k`, degree 1) is exact for `[α⁽¹⁾, −]`
/// modulo IHX, searching all degree-0 graphs of grading `k − 1`.
pub fn obstruction_test(alpha1: &GraphSum, alpha_k: &GraphSum, k: usize, q: &IhxQuotient) -> Result<Obstruction, GaugeError> {
    check_degree(alpha1, 1)?;
    check_degree(alpha_k, 1)?;
    let mc = mc_check(alpha1, None, q, TruncationPolicy::new(2))?;
    if let Some(r) = mc.residuals.iter().find(|r| !r.reduced.is_zero()) {
        return Err(GaugeError::NotMaurerCartan { grading: r.grading, residual: r.reduced.to_dsl() });
    }
    if alpha_k.is_zero() {
        return Ok(Obstruction::Unobstructed { eta: GraphSum::zero() });
    }
    let source_slices = slices_of(0, k - 1);
    let target_slices = slices_of(1, k);
    let source: Vec<CanonicalGraph> = source_slices.iter().flat_map(|s| enumerate_graphs(s.n, s.m, s.e)).collect();

    let mut span: RowBasis<CanonicalGraph> = RowBasis::tracked();
    let mut generators = Vec::new();
    for g in &source {
        let mut one = GraphSum::zero();
        one.add_canonical(g.clone(), Rational::one());
        let image = bracket_truncated(alpha1, &one, None).filter(|t| t.second_grading() == k);
        generators.push(image.vector().clone());
        span.insert(image.into_vector());
    }
    let mut relation_count = 0;
    for s in &target_slices {
        for r in &q.slice(*s)?.relations {
            relation_count += 1;
            generators.push(r.relation.vector().clone());
            span.insert(r.relation.vector().clone());
        }
    }
    let target = alpha_k.vector();
    if let Some(coeffs) = span.express(target) {
        let mut eta = GraphSum::zero();
        for (idx, c) in coeffs.iter() {
            if *idx < source.len() {
                eta.add_canonical(source[*idx].clone(), c.clone());
            }
        }
        return Ok(Obstruction::Unobstructed { eta });
    }
    let reduced = span.reduce(target);
    let (kappa, _) = reduced.leading().expect("nonzero remainder");
    let kappa = kappa.clone();
    let mut functional = SparseVector::singleton(kappa.clone(), Rational::one());
    for row in span.rows() {
        let c = row.coeff(&kappa);
        if !c.is_zero() {
            let (p, _) = row.leading().unwrap();
            functional.add_term(p.clone(), -c);
        }
    }
    debug_assert!(generators.iter().all(|g| dot(&functional, g).is_zero()));
    let value = dot(&functional, target);
    Ok(Obstruction::Obstructed(Box::new(Certificate {
        source_slices,
        target_slices,
        source_dim: source.len(),
        relation_count,
        span_rank: span.rank(),
        reduced_target: GraphSum::from_vector(reduced),
        functional,
        functional_on_target: value,
    })))
}

/// Checks that every generator of the span is killed by the certificate and the target is not.
pub fn verify_certificate(
    cert: &Certificate,
    alpha1: &GraphSum,
    alpha_k: &GraphSum,
    q: &IhxQuotient,
) -> Result<bool, GaugeError> {
    let k = cert.target_slices.first().map(|s| s.second_grading()).unwrap_or(0);
    for s in &cert.source_slices {
        for g in enumerate_graphs(s.n, s.m, s.e) {
            let mut one = GraphSum::zero();
            one.add_canonical(g, Rational::one());
            let image = bracket_truncated(alpha1, &one, None).filter(|t| t.second_grading() == k);
            if !dot(&cert.functional, image.vector()).is_zero() {
                return Ok(false);
            }
        }
    }
    for s in &cert.target_slices {
        for r in &q.slice(*s)?.relations {
            if !dot(&cert.functional, r.relation.vector()).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(!dot(&cert.functional, alpha_k.vector()).is_zero())
}

/// `[α⁽¹⁾, x] ≡ 0` modulo IHX.
pub fn closedness_check(x: &GraphSum, alpha1: &GraphSum, q: &IhxQuotient) -> Result<bool, GaugeError> {
    Ok(q.is_zero(&bracket_truncated(alpha1, x, None))?)
}

/// Components by grading, for reporting.
pub fn by_grading(x: &GraphSum) -> BTreeMap<usize, GraphSum> {
    let mut out: BTreeMap<usize, GraphSum> = BTreeMap::new();
    for (g, c) in x.iter() {
        out.entry(g.second_grading()).or_default().add_canonical(g.clone(), c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_sum;
    use crate::ihx::Bounds;

    #[test]
    fn slices_for_degree_zero_grading_two() {
        assert_eq!(slices_of(0, 2), vec![Slice::new(1, 2, 4), Slice::new(2, 1, 3), Slice::new(3, 0, 2)]);
        assert_eq!(slices_of(1, 3), vec![
            Slice::new(1, 3, 5),
            Slice::new(2, 2, 4),
            Slice::new(3, 1, 3),
            Slice::new(4, 0, 2)
        ]);
    }

    #[test]
    fn a2_alone_is_mc() {
        let q = IhxQuotient::new(Bounds::default());
        let a2 = parse_sum("G(n=2;I=0;e=[])").unwrap();
        assert!(mc_check(&a2, None, &q, TruncationPolicy::new(3)).unwrap().passes());
    }

    #[test]
    fn zero_gauge_is_identity() {
        let a = parse_sum("G(n=2;I=0;e=[]) + G(n=1;I=1;e=[(i1--1)])").unwrap();
        assert_eq!(exp_ad(&GraphSum::zero(), &a, 4), a);
    }

    #[test]
    fn wrong_degree_rejected() {
        let q = IhxQuotient::new(Bounds::default());
        let x = parse_sum("G(n=2;I=0;e=[(1->2)])").unwrap();
        assert!(matches!(mc_check(&x, None, &q, TruncationPolicy::new(2)), Err(GaugeError::Degree { .. })));
    }
}
