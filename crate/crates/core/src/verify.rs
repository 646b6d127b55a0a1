//! The end-to-end verification pipeline.
//!
//! Ten checks run concurrently against one shared IHX cache; the report lists
//! them in a fixed order so identical inputs give identical reports.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cobar::{self, cobar_cohomology, cobar_d, compositions, cores, glue_bijection};
use crate::fixtures::FixtureSet;
use crate::gauge::{self, gauge_act, mc_check, obstruction_test, verify_certificate, GaugeError, Obstruction, TruncationPolicy};
use crate::graph::{GraphSum, Slice};
use crate::ihx::{generate_ihx, Bounds, IhxError, IhxQuotient};
use crate::linalg::{fmt_rational, int, rat, Rational, SparseVector};
use crate::operad::bracket_truncated;
use crate::rep::{random_monomial, LieData, Poly, Representation};

pub const REPORT_SCHEMA: &str = "graphmc-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    /// Worst of two statuses, with failure dominating.
    pub fn combine(self, other: Status) -> Status {
        self.max(other)
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub status: Status,
    pub summary: String,
    /// First offending graph term (or composition) in text form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offender: Option<String>,
    pub details: Value,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub cap: usize,
    pub bounds: Bounds,
    /// Lie algebra for the representation check.
    pub lie: LieData,
    pub cobar_max_n: usize,
    pub glue_max_n: usize,
    pub glue_max_internal: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            cap: 4,
            bounds: Bounds::default(),
            lie: LieData::so3(),
            cobar_max_n: 4,
            glue_max_n: 4,
            glue_max_internal: 2,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub schema: &'static str,
    pub cap: usize,
    pub bounds: String,
    pub lie: String,
    pub fixtures: BTreeMap<String, String>,
    pub checks: Vec<CheckOutcome>,
    pub status: Status,
}

impl PipelineReport {
    pub fn check(&self, id: usize) -> &CheckOutcome {
        &self.checks[id - 1]
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("cap {} | bounds {} | lie {}\n", self.cap, self.bounds, self.lie);
        for c in &self.checks {
            out.push_str(&format!("[{:>2}] {:<12} {}: {}\n", c.id, c.status.to_string(), c.name, c.summary));
            if let Some(o) = &c.offender {
                out.push_str(&format!("     first offending term: {o}\n"));
            }
        }
        out.push_str(&format!("overall: {}\n", self.status));
        out
    }
}

/// Names and expected (Lie degree, second grading) of the elementary fixtures.
pub const FIXTURE_DEGREES: &[(&str, i64, usize)] = &[
    ("a1", 1, 1),
    ("a2", 1, 1),
    ("a3", 1, 2),
    ("a4", 1, 3),
    ("a5", 1, 3),
    ("a6", 1, 3),
    ("b", 1, 3),
    ("b1", 1, 3),
    ("b2", 1, 3),
    ("b3", 1, 3),
    ("b_prime", 1, 3),
    ("q", 1, 3),
    ("c", 0, 2),
    ("xi1", 0, 1),
    ("xi2", 0, 2),
    ("xi3", 0, 2),
];

/// `(label, x, y, right-hand side)` for `[x, y] ≡ rhs`; `x` may be nested.
pub struct BracketIdentity {
    pub label: &'static str,
    pub outer: &'static str,
    pub inner: &'static [&'static str],
    pub rhs: &'static [(i64, &'static str)],
}

pub const BRACKET_IDENTITIES: &[BracketIdentity] = &[
    BracketIdentity { label: "[xi1,a1] = 2 a3", outer: "xi1", inner: &["a1"], rhs: &[(2, "a3")] },
    BracketIdentity { label: "[xi1,a2] = 0", outer: "xi1", inner: &["a2"], rhs: &[] },
    BracketIdentity { label: "[xi1,a3] = Q", outer: "xi1", inner: &["a3"], rhs: &[(1, "q")] },
    BracketIdentity { label: "[xi1,[xi1,a1]] = 2 Q", outer: "xi1", inner: &["xi1", "a1"], rhs: &[(2, "q")] },
    BracketIdentity { label: "[xi2,a1] = -a4 + 2 a5", outer: "xi2", inner: &["a1"], rhs: &[(-1, "a4"), (2, "a5")] },
    BracketIdentity { label: "[xi2,a2] = -Q - b1 - b3", outer: "xi2", inner: &["a2"], rhs: &[(-1, "q"), (-1, "b1"), (-1, "b3")] },
    BracketIdentity { label: "[xi3,a1] = -2 a6 + a4", outer: "xi3", inner: &["a1"], rhs: &[(-2, "a6"), (1, "a4")] },
    BracketIdentity { label: "[xi3,a2] = -b1 + 2 b2 - b3", outer: "xi3", inner: &["a2"], rhs: &[(-1, "b1"), (2, "b2"), (-1, "b3")] },
];

impl BracketIdentity {
    pub fn lhs(&self, f: &FixtureSet) -> GraphSum {
        let mut acc = f.value(self.inner.last().expect("nonempty")).clone();
        for name in self.inner.iter().rev().skip(1) {
            acc = bracket_truncated(f.value(name), &acc, None);
        }
        bracket_truncated(f.value(self.outer), &acc, None)
    }

    pub fn rhs(&self, f: &FixtureSet) -> GraphSum {
        let mut out = GraphSum::zero();
        for (c, name) in self.rhs {
            out.add_scaled(f.value(name), &int(*c));
        }
        out
    }
}

enum Failure {
    Ihx(IhxError),
    Other(String),
}

impl From<IhxError> for Failure {
    fn from(e: IhxError) -> Self {
        Failure::Ihx(e)
    }
}

impl From<GaugeError> for Failure {
    fn from(e: GaugeError) -> Self {
        match e {
            GaugeError::Ihx(e) => Failure::Ihx(e),
            e => Failure::Other(e.to_string()),
        }
    }
}

impl From<cobar::CobarError> for Failure {
    fn from(e: cobar::CobarError) -> Self {
        match e {
            cobar::CobarError::Ihx(e) => Failure::Ihx(e),
            e => Failure::Other(e.to_string()),
        }
    }
}

struct Ctx<'a> {
    f: &'a FixtureSet,
    cfg: &'a VerifyConfig,
    q: &'a IhxQuotient,
}

type Body = fn(&Ctx) -> Result<Verdict, Failure>;

struct Verdict {
    ok: bool,
    summary: String,
    offender: Option<String>,
    details: Value,
}

impl Verdict {
    fn new(ok: bool, summary: impl Into<String>, details: Value) -> Self {
        Self { ok, summary: summary.into(), offender: None, details }
    }

    fn offending(mut self, x: &GraphSum) -> Self {
        if !self.ok {
            self.offender = first_term(x);
        }
        self
    }
}

fn first_term(x: &GraphSum) -> Option<String> {
    x.iter().next().map(|(g, c)| format!("{}*{}", fmt_rational(c), g.graph()))
}

/// `(id, name, minimum second-grading cap, body)`.
const CHECKS: &[(usize, &str, usize, Body)] = &[
    (1, "fixtures admissible with expected degrees", 0, check_fixtures),
    (2, "bracket identities", 3, check_brackets),
    (3, "gauge action on alpha_Duf", 3, check_gauge),
    (4, "Maurer-Cartan residuals of alpha_0", 2, check_mc),
    (5, "closedness of b", 4, check_closed),
    (6, "b + b' - [a1+a2, c] = 0", 3, check_b_prime),
    (7, "obstruction at k = 3", 3, check_obstruction),
    (8, "IHX relations vanish under B", 0, check_representation),
    (9, "cobar cohomology", 0, check_cobar),
    (10, "gluing is a chain map", 0, check_gluing),
];

pub fn check_names() -> Vec<(usize, &'static str)> {
    CHECKS.iter().map(|c| (c.0, c.1)).collect()
}

fn run_one(ctx: &Ctx, id: usize, name: &'static str, needs: usize, body: Body) -> CheckOutcome {
    if ctx.cfg.cap < needs {
        return CheckOutcome {
            id,
            name,
            status: Status::Inconclusive,
            summary: format!("inconclusive: widen bounds (needs second-grading cap >= {needs}, have {})", ctx.cfg.cap),
            offender: None,
            details: json!({ "required_cap": needs }),
        };
    }
    match body(ctx) {
        Ok(v) => CheckOutcome {
            id,
            name,
            status: if v.ok { Status::Pass } else { Status::Fail },
            summary: v.summary,
            offender: v.offender,
            details: v.details,
        },
        Err(Failure::Ihx(e)) => CheckOutcome {
            id,
            name,
            status: Status::Inconclusive,
            summary: format!("inconclusive: widen bounds ({e})"),
            offender: None,
            details: Value::Null,
        },
        Err(Failure::Other(e)) => CheckOutcome { id, name, status: Status::Fail, summary: e, offender: None, details: Value::Null },
    }
}

/// Runs the checks in `only` (all when empty).
pub fn verify_paper(f: &FixtureSet, cfg: &VerifyConfig, only: &[usize]) -> PipelineReport {
    let q = IhxQuotient::new(cfg.bounds);
    let ctx = Ctx { f, cfg, q: &q };
    let selected: Vec<_> = CHECKS.iter().filter(|c| only.is_empty() || only.contains(&c.0)).collect();
    let checks: Vec<CheckOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&&(id, name, needs, body)| {
                let ctx = &ctx;
                s.spawn(move || run_one(ctx, id, name, needs, body))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
    });
    let status = checks.iter().fold(Status::Pass, |acc, c| acc.combine(c.status));
    PipelineReport {
        schema: REPORT_SCHEMA,
        cap: cfg.cap,
        bounds: cfg.bounds.to_string(),
        lie: cfg.lie.name().to_string(),
        fixtures: f.hashes(),
        checks,
        status,
    }
}

fn check_fixtures(ctx: &Ctx) -> Result<Verdict, Failure> {
    let mut table = serde_json::Map::new();
    let mut bad = None;
    for &(name, lie, grading) in FIXTURE_DEGREES {
        let v = ctx.f.value(name);
        let gradings: Vec<usize> = gauge::by_grading(v).into_keys().collect();
        let ok = !v.is_zero()
            && v.keys().all(|g| g.is_admissible())
            && v.homogeneous_lie_degree() == Some(lie)
            && gradings == [grading];
        table.insert(name.into(), json!({ "lie_degree": v.homogeneous_lie_degree(), "gradings": gradings, "terms": v.len(), "ok": ok }));
        if !ok && bad.is_none() {
            bad = Some((name, v.clone()));
        }
    }
    let ok = bad.is_none();
    let summary = match &bad {
        None => format!("{} fixtures parsed, admissible and homogeneous", FIXTURE_DEGREES.len()),
        Some((n, _)) => format!("fixture {n} has unexpected degree or grading"),
    };
    let v = Verdict::new(ok, summary, Value::Object(table));
    Ok(match bad {
        Some((_, x)) => v.offending(&x),
        None => v,
    })
}

fn check_brackets(ctx: &Ctx) -> Result<Verdict, Failure> {
    let mut rows = Vec::new();
    let mut first_bad: Option<(&str, GraphSum)> = None;
    for id in BRACKET_IDENTITIES {
        let lhs = id.lhs(ctx.f);
        let diff = ctx.q.reduce(&(&lhs - &id.rhs(ctx.f)))?;
        let raw_equal = lhs == id.rhs(ctx.f);
        rows.push(json!({ "identity": id.label, "holds": diff.is_zero(), "equal_before_reduction": raw_equal, "residual": diff.to_dsl() }));
        if !diff.is_zero() && first_bad.is_none() {
            first_bad = Some((id.label, diff));
        }
    }
    let holding = rows.iter().filter(|r| r["holds"] == true).count();
    let summary = match &first_bad {
        None => format!("all {holding} identities hold modulo IHX"),
        Some((l, _)) => format!("{holding}/{} hold; {l} fails", BRACKET_IDENTITIES.len()),
    };
    let v = Verdict::new(first_bad.is_none(), summary, Value::Array(rows));
    Ok(match first_bad {
        Some((_, d)) => v.offending(&d),
        None => v,
    })
}

fn check_gauge(ctx: &Ctx) -> Result<Verdict, Failure> {
    let r = gauge_act(ctx.f.value("xi"), ctx.f.value("alpha_duf"), ctx.q, TruncationPolicy::new(3))?;
    let diff = ctx.q.reduce(&(&r.reduced - ctx.f.value("alpha_duf_prime")))?;
    let ok = diff.is_zero();
    let summary = if ok {
        "exp(ad xi) alpha_Duf = a1 + a2 + 1/24 b modulo IHX through grading 3".to_string()
    } else {
        format!("difference from a1 + a2 + 1/24 b has {} terms", diff.len())
    };
    let details = json!({ "cap": r.cap, "raw_terms": r.raw.len(), "reduced": r.reduced.to_dsl(), "difference": diff.to_dsl() });
    Ok(Verdict::new(ok, summary, details).offending(&diff))
}

fn check_mc(ctx: &Ctx) -> Result<Verdict, Failure> {
    let a1 = ctx.f.value("a1");
    let a1a1 = bracket_truncated(a1, a1, None);
    let a1a1_zero = ctx.q.is_zero(&a1a1)?;
    let report = mc_check(ctx.f.value("alpha_0"), None, ctx.q, TruncationPolicy::new(ctx.cfg.cap))?;
    let ok = report.passes() && a1a1_zero && !a1a1.is_zero();
    let summary = format!(
        "residuals vanish at gradings 0..={}: {}; [a1,a1] has {} raw terms and is {} modulo IHX",
        ctx.cfg.cap,
        report.passes(),
        a1a1.len(),
        if a1a1_zero { "zero" } else { "nonzero" }
    );
    let offender = report.residuals.iter().find(|r| !r.reduced.is_zero()).map(|r| r.reduced.clone()).unwrap_or_default();
    let details = json!({
        "residuals": report.residuals.iter().map(|r| json!({ "grading": r.grading, "raw_terms": r.raw_terms, "reduced": r.reduced.to_dsl() })).collect::<Vec<_>>(),
        "a1_a1_raw_terms": a1a1.len(),
    });
    Ok(Verdict::new(ok, summary, details).offending(&offender))
}

fn check_closed(ctx: &Ctx) -> Result<Verdict, Failure> {
    let x = bracket_truncated(ctx.f.value("alpha_0"), ctx.f.value("b"), None);
    let reduced = ctx.q.reduce(&x)?;
    let c_image = ctx.q.reduce(&bracket_truncated(ctx.f.value("alpha_0"), ctx.f.value("c"), None))?;
    let ok = reduced.is_zero();
    let summary = format!("[a1+a2, b] has {} raw terms and reduces to {}", x.len(), if ok { "0" } else { "a nonzero class" });
    Ok(Verdict::new(ok, summary, json!({ "reduced": reduced.to_dsl(), "c_closed": c_image.is_zero() })).offending(&reduced))
}

fn check_b_prime(ctx: &Ctx) -> Result<Verdict, Failure> {
    let image = bracket_truncated(ctx.f.value("alpha_0"), ctx.f.value("c"), None);
    let x = &(ctx.f.value("b") + ctx.f.value("b_prime")) - &image;
    let reduced = ctx.q.reduce(&x)?;
    let ok = reduced.is_zero();
    let summary = if ok { "b + b' - [a1+a2, c] = 0 modulo IHX".to_string() } else { format!("residual has {} terms", reduced.len()) };
    Ok(Verdict::new(ok, summary, json!({ "raw_terms": x.len(), "reduced": reduced.to_dsl() })).offending(&reduced))
}

fn check_obstruction(ctx: &Ctx) -> Result<Verdict, Failure> {
    let prime = ctx.f.value("alpha_duf_prime");
    let alpha1 = prime.grading_component(1);
    let alpha3 = prime.grading_component(3);
    let lower = prime.grading_component(2);
    if !ctx.q.is_zero(&lower)? {
        return Ok(Verdict::new(false, "grading-2 part of alpha'_Duf is not zero modulo IHX", json!({ "grading_2": lower.to_dsl() }))
            .offending(&lower));
    }
    match obstruction_test(&alpha1, &alpha3, 3, ctx.q)? {
        Obstruction::Obstructed(cert) => {
            let verified = verify_certificate(&cert, &alpha1, &alpha3, ctx.q)?;
            let summary = format!(
                "obstructed: functional takes {} on the target and kills {} images and {} relations (span rank {}); certificate {}",
                fmt_rational(&cert.functional_on_target),
                cert.source_dim,
                cert.relation_count,
                cert.span_rank,
                if verified { "verified" } else { "REJECTED" }
            );
            Ok(Verdict::new(verified, summary, serde_json::to_value(&*cert).unwrap_or(Value::Null)))
        }
        Obstruction::Unobstructed { eta } => {
            let v = Verdict::new(false, "unobstructed: the grading-3 term is exact", json!({ "eta": eta.to_dsl() }));
            Ok(v.offending(&alpha3))
        }
    }
}

/// Every IHX relation with two internal vertices and arity at most `max_arity`.
/// Relations need at least two internal vertices, so this covers all with at most two.
pub fn small_relations(max_arity: usize) -> Vec<(Slice, GraphSum)> {
    let mut out = Vec::new();
    for n in 1..=max_arity {
        for e in 0..=(n * (n - 1) + 6) {
            let s = Slice::new(n, 2, e);
            out.extend(generate_ihx(s).into_iter().map(|r| (s, r.relation)));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentationCheck {
    pub lie: String,
    pub relations: usize,
    pub evaluations: usize,
    pub failures: usize,
    pub offender: Option<String>,
    pub jacobi_polynomial_vanishes: bool,
}

impl RepresentationCheck {
    pub fn passes(&self) -> bool {
        self.failures == 0 && self.jacobi_polynomial_vanishes
    }
}

/// `B(r) = 0` on seeded arguments for the small IHX relations, and the Jacobi polynomial identity.
pub fn representation_check(lie: &LieData, max_arity: usize, seed: u64) -> RepresentationCheck {
    let rep = Representation::new(lie.clone());
    let d = lie.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let relations = small_relations(max_arity);
    let mut out = RepresentationCheck {
        lie: lie.name().to_string(),
        relations: relations.len(),
        evaluations: 0,
        failures: 0,
        offender: None,
        jacobi_polynomial_vanishes: rep.jacobi_poly().is_zero(),
    };
    for (s, r) in &relations {
        for max_odd in [0, 2] {
            let args: Vec<Poly> = (0..s.n).map(|_| random_monomial(&mut rng, d, 3, max_odd)).collect();
            out.evaluations += 1;
            if !rep.eval_sum(r, &args).is_zero() {
                out.failures += 1;
                out.offender.get_or_insert_with(|| r.to_dsl());
            }
        }
    }
    out
}

fn check_representation(ctx: &Ctx) -> Result<Verdict, Failure> {
    let r = representation_check(&ctx.cfg.lie, 3, ctx.cfg.seed);
    let summary = format!(
        "{} on {} relations ({} evaluations); Jacobi polynomial {}",
        if r.failures == 0 { "B(r) = 0".to_string() } else { format!("B(r) != 0 in {} evaluations", r.failures) },
        r.relations,
        r.evaluations,
        if r.jacobi_polynomial_vanishes { "vanishes" } else { "does not vanish" }
    );
    let mut v = Verdict::new(r.passes(), summary, serde_json::to_value(&r).unwrap_or(Value::Null));
    v.offender = r.offender;
    Ok(v)
}

fn check_cobar(ctx: &Ctx) -> Result<Verdict, Failure> {
    let mut rows = Vec::new();
    let mut bad = None;
    for n in 1..=ctx.cfg.cobar_max_n {
        let h = cobar_cohomology(n);
        let mut top = vec![0; n];
        top[n - 1] = 1;
        let mut d2_ok = true;
        for k in 1..=n {
            for c in compositions(n, k) {
                if !cobar_d(&cobar_d(&SparseVector::singleton(c.clone(), Rational::from_integer(1.into())))).is_zero() {
                    d2_ok = false;
                    bad.get_or_insert_with(|| format!("d^2 != 0 on {c}"));
                }
            }
        }
        let ok = h.cohomology == top && h.omega_represents_top && d2_ok;
        if !ok {
            bad.get_or_insert_with(|| format!("n = {n}: cohomology {:?}", h.cohomology));
        }
        rows.push(json!({ "n": n, "chains": h.chain_dims, "cohomology": h.cohomology, "omega_represents_top": h.omega_represents_top, "d_squared_zero": d2_ok }));
    }
    let ok = bad.is_none();
    let summary = if ok {
        format!("for n = 1..={} cohomology is one-dimensional in degree n, spanned by omega_n, and d^2 = 0", ctx.cfg.cobar_max_n)
    } else {
        bad.clone().unwrap_or_default()
    };
    let mut v = Verdict::new(ok, summary, Value::Array(rows));
    v.offender = bad;
    Ok(v)
}

fn check_gluing(ctx: &Ctx) -> Result<Verdict, Failure> {
    let mut checked = 0usize;
    let mut bad = None;
    let mut bijections = Vec::new();
    let mut bijective = true;
    for n in 1..=ctx.cfg.glue_max_n {
        for m in 1..=ctx.cfg.glue_max_internal {
            for e in 0..=(n + 3 * m) {
                let cs = cores(n, m, e);
                if cs.is_empty() {
                    continue;
                }
                for core in &cs {
                    for k in 1..=n {
                        for comp in compositions(n, k) {
                            checked += 1;
                            if !cobar::chain_map_holds(core.graph(), &comp)? {
                                bad.get_or_insert_with(|| format!("core {} with composition {comp}", core.graph()));
                            }
                        }
                    }
                }
                let b = glue_bijection(n, m, e);
                bijective &= b.orbits == b.targets && b.round_trips;
                bijections.push(b);
            }
        }
    }
    let ok = bad.is_none() && bijective;
    let summary = format!(
        "chain-map identity on {checked} (core, composition) pairs: {}; bijection on {} slices: {}",
        if bad.is_none() { "holds" } else { "fails" },
        bijections.len(),
        if bijective { "holds" } else { "fails" }
    );
    let mut v = Verdict::new(ok, summary, json!({ "pairs": checked, "bijections": bijections }));
    v.offender = bad;
    Ok(v)
}

/// The α_Duf coefficients, for negative controls.
pub const ALPHA_DUF_TERMS: &[(&str, i64, i64)] = &[("a1", 1, 1), ("a2", 1, 1), ("a3", 1, 2), ("a4", -1, 12), ("a5", 1, 8), ("a6", 1, 24)];

/// α_Duf with the coefficient of `name` replaced by `value`.
pub fn alpha_duf_with(f: &FixtureSet, name: &str, value: Rational) -> GraphSum {
    let mut out = GraphSum::zero();
    for &(n, p, q) in ALPHA_DUF_TERMS {
        let c = if n == name { value.clone() } else { rat(p, q) };
        out.add_scaled(f.value(n), &c);
    }
    out
}

pub fn gauge_holds_for(f: &FixtureSet, alpha: &GraphSum, q: &IhxQuotient) -> Result<bool, GaugeError> {
    let r = gauge_act(f.value("xi"), alpha, q, TruncationPolicy::new(3))?;
    Ok(q.equal(&r.reduced, f.value("alpha_duf_prime"))?)
}
