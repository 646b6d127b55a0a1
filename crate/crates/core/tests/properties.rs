mod common;

use common::*;
use graphmc::cobar::{cobar_d, compositions, CobarElement};
use graphmc::fixtures::FixtureSet;
use graphmc::graph::{parse_sum, Slice};
use graphmc::ihx::{enumerate_graphs, Bounds, IhxQuotient, QuotientSpace};
use graphmc::linalg::{int, rat, sign_pow};
use graphmc::operad::{bracket, star};
use graphmc::rep::{poly_dp, poly_dx, poly_mul, Monomial, Poly};
use graphmc::{CanonicalGraph, GraphSum};
use proptest::prelude::*;
use proptest::sample::{select, subsequence, Index};
use std::sync::OnceLock;

fn pool() -> &'static Vec<CanonicalGraph> {
    static POOL: OnceLock<Vec<CanonicalGraph>> = OnceLock::new();
    POOL.get_or_init(|| {
        [(1, 1, 1), (2, 1, 2), (2, 1, 3), (1, 2, 2), (1, 2, 3), (2, 2, 4), (3, 2, 4), (3, 2, 5), (2, 2, 3)]
            .iter()
            .flat_map(|&(n, m, e)| enumerate_graphs(n, m, e))
            .collect()
    })
}

fn quotient() -> &'static IhxQuotient {
    static Q: OnceLock<IhxQuotient> = OnceLock::new();
    Q.get_or_init(|| IhxQuotient::new(Bounds::default()))
}

fn fixtures() -> &'static FixtureSet {
    static F: OnceLock<FixtureSet> = OnceLock::new();
    F.get_or_init(FixtureSet::embedded)
}

fn shuffled(k: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..k).collect::<Vec<_>>()).prop_shuffle()
}

fn graph_and_perms() -> impl Strategy<Value = (CanonicalGraph, Vec<usize>, Vec<usize>)> {
    select(pool().clone()).prop_flat_map(|g| {
        let (e, m) = (g.n_edges(), g.n_internal());
        (Just(g), shuffled(e), shuffled(m))
    })
}

fn small_coeff() -> impl Strategy<Value = i64> {
    (-3i64..=3).prop_filter("nonzero", |c| *c != 0)
}

fn slice_sum(s: Slice) -> impl Strategy<Value = GraphSum> {
    let graphs = enumerate_graphs(s.n, s.m, s.e);
    let k = graphs.len();
    (subsequence(graphs, 1..=k.min(4)), proptest::collection::vec(small_coeff(), 4)).prop_map(|(gs, cs)| {
        gs.into_iter().zip(cs).map(|(g, c)| (g, int(c))).collect()
    })
}

fn signed_graph(g: &CanonicalGraph) -> GraphSum {
    GraphSum::from_graph(g.graph()).unwrap()
}

fn lie_degree(x: &GraphSum) -> i64 {
    x.homogeneous_lie_degree().unwrap()
}

fn monomial() -> impl Strategy<Value = Poly> {
    (proptest::collection::vec(0u16..=2, 3), 0u32..8, small_coeff())
        .prop_map(|(xs, mask, c)| Poly::singleton(Monomial::from_parts(xs, mask), int(c)))
}

fn odd(p: &Poly) -> i64 {
    p.iter().next().map_or(0, |(m, _)| m.odd_degree() as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent((g, _, _) in graph_and_perms()) {
        let (again, sign) = g.graph().canonicalize().unwrap().unwrap();
        prop_assert_eq!(again, g);
        prop_assert_eq!(sign, 1);
    }

    #[test]
    fn edge_permutation_changes_sign_by_parity((g, perm, _) in graph_and_perms()) {
        let (c, sign) = g.graph().with_edge_order(&perm).canonicalize().unwrap().unwrap();
        prop_assert_eq!(&c, &g);
        prop_assert_eq!(sign, sign_of_permutation(&perm));
    }

    #[test]
    fn internal_relabeling_is_invisible((g, _, relabel) in graph_and_perms()) {
        let (c, sign) = g.graph().relabel_internal(&relabel).canonicalize().unwrap().unwrap();
        prop_assert_eq!(c, g);
        prop_assert_eq!(sign, 1);
    }

    #[test]
    fn dsl_round_trip(x in slice_sum(Slice::new(2, 2, 4)), y in slice_sum(Slice::new(1, 2, 3))) {
        let sum = &x + &y.scaled(&rat(-2, 3));
        prop_assert_eq!(parse_sum(&sum.to_dsl()).unwrap(), sum);
    }

    #[test]
    fn reduction_is_a_linear_projection(x in slice_sum(Slice::new(2, 2, 3)), y in slice_sum(Slice::new(2, 2, 3)), c in small_coeff()) {
        let q = quotient();
        let rx = q.reduce(&x).unwrap();
        prop_assert_eq!(q.reduce(&rx).unwrap(), rx.clone());
        let lhs = q.reduce(&(&x + &y.scaled(&int(c)))).unwrap();
        let rhs = &rx + &q.reduce(&y).unwrap().scaled(&int(c));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_graded_antisymmetric(i in any::<Index>(), j in any::<Index>()) {
        let g = signed_graph(i.get(pool()));
        let h = signed_graph(j.get(pool()));
        let sign = sign_pow(lie_degree(&g) * lie_degree(&h));
        prop_assert_eq!(bracket(&g, &h), bracket(&h, &g).scaled(&int(-sign)));
    }

    #[test]
    fn star_is_right_pre_lie(i in any::<Index>(), j in any::<Index>(), k in any::<Index>()) {
        let small: Vec<_> = pool().iter().filter(|g| g.n_internal() <= 1).cloned().collect();
        let (x, y, z) = (signed_graph(i.get(&small)), signed_graph(j.get(&small)), signed_graph(k.get(&small)));
        let assoc = |a: &GraphSum, b: &GraphSum, c: &GraphSum| &star(&star(a, b), c) - &star(a, &star(b, c));
        let sign = sign_pow(lie_degree(&y) * lie_degree(&z));
        prop_assert_eq!(assoc(&x, &y, &z), assoc(&x, &z, &y).scaled(&int(sign)));
    }

    #[test]
    fn cobar_differential_squares_to_zero(n in 2usize..=6, k in 1usize..=4, picks in proptest::collection::vec((any::<Index>(), small_coeff()), 1..5)) {
        let comps = compositions(n, k.min(n));
        let x: CobarElement = picks.iter().map(|(i, c)| (i.get(&comps).clone(), int(*c))).collect();
        prop_assert!(cobar_d(&cobar_d(&x)).is_zero());
    }

    #[test]
    fn polynomials_commute_up_to_sign(a in monomial(), b in monomial()) {
        let sign = sign_pow(odd(&a) * odd(&b));
        prop_assert_eq!(poly_mul(&a, &b), poly_mul(&b, &a).scaled(&int(sign)));
    }

    #[test]
    fn odd_derivative_is_a_left_derivation(a in monomial(), b in monomial(), l in 0usize..3) {
        let lhs = poly_dp(&poly_mul(&a, &b), l);
        let mut rhs = poly_mul(&poly_dp(&a, l), &b);
        rhs.add_scaled(&poly_mul(&a, &poly_dp(&b, l)), &int(sign_pow(odd(&a))));
        prop_assert_eq!(lhs, rhs);
        let lhs = poly_dx(&poly_mul(&a, &b), l);
        let rhs = &poly_mul(&poly_dx(&a, l), &b) + &poly_mul(&a, &poly_dx(&b, l));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn relations_reduce_to_zero() {
    for s in [Slice::new(2, 2, 3), Slice::new(1, 2, 3), Slice::new(3, 2, 4), Slice::new(2, 3, 5)] {
        let q = QuotientSpace::build(s);
        for r in &q.relations {
            assert!(q.reduce(r.relation.vector()).is_zero(), "{s}");
        }
    }
}

#[test]
fn jacobi_on_fixture_triples() {
    let f = fixtures();
    let q = quotient();
    let names = ["a1", "a2", "xi1", "xi2", "c", "a3"];
    for x in names {
        for y in names {
            for z in names {
                let (gx, gy, gz) = (f.value(x), f.value(y), f.value(z));
                let grading = [gx, gy, gz].iter().map(|g| g.max_second_grading().unwrap()).sum::<usize>();
                if grading > 4 {
                    continue;
                }
                let sign = sign_pow(lie_degree(gx) * lie_degree(gy));
                let lhs = bracket(gx, &bracket(gy, gz));
                let rhs = &bracket(&bracket(gx, gy), gz) + &bracket(gy, &bracket(gx, gz)).scaled(&int(sign));
                assert!(q.is_zero(&(&lhs - &rhs)).unwrap(), "[{x}, [{y}, {z}]]");
            }
        }
    }
}

#[test]
fn normal_forms_survive_wider_bounds() {
    let f = fixtures();
    let wide = IhxQuotient::new(Bounds { max_arity: 7, max_internal: 5, max_edges: 12 });
    let mut elements: Vec<GraphSum> = graphmc::verify::BRACKET_IDENTITIES.iter().map(|id| id.lhs(f)).collect();
    elements.push(bracket(f.value("a1"), f.value("a1")));
    elements.push(bracket(f.value("alpha_0"), f.value("b")));
    elements.push(&(f.value("b") + f.value("b_prime")) - &bracket(f.value("alpha_0"), f.value("c")));
    for x in &elements {
        assert_eq!(quotient().reduce(x).unwrap(), wide.reduce(x).unwrap());
    }
}
