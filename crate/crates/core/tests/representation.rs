mod common;

use common::*;
use graphmc::fixtures::FixtureSet;
use graphmc::graph::{parse_graph, parse_sum};
use graphmc::ihx::enumerate_graphs;
use graphmc::linalg::{int, rat};
use graphmc::rep::*;
use graphmc::verify::{representation_check, ALPHA_DUF_TERMS};
use graphmc::GraphSum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn presets() -> Vec<LieData> {
    vec![LieData::abelian(3), LieData::heisenberg(), LieData::so3(), LieData::sl2()]
}

fn gamma_one() -> graphmc::DirectedGraph {
    parse_graph("G(n=2; I=2; e=[(i2->1),(i2->i1),(i1->1),(i1->2)])").unwrap()
}

fn gamma_two() -> graphmc::DirectedGraph {
    parse_graph("G(n=3; I=1; e=[(1->i1),(i1->2),(i1->3)])").unwrap()
}

#[test]
fn pi_for_presets() {
    assert!(make_pi(&LieData::abelian(3)).is_zero());
    assert_eq!(make_pi(&LieData::heisenberg()), parse_poly("2*x_3*p_1*p_2", 3).unwrap());
    assert_eq!(make_pi(&LieData::so3()), parse_poly("2*x_3*p_1*p_2 + 2*x_1*p_2*p_3 + 2*x_2*p_3*p_1", 3).unwrap());
}

#[test]
fn tau_operators_anticommute() {
    let d = 3;
    let pi = make_pi(&LieData::so3());
    let f = parse_poly("x_1*x_2", d).unwrap();
    let g = parse_poly("x_2*x_3 + x_1^2", d).unwrap();
    let mut t = Tensor::new();
    for (a, ca) in pi.iter() {
        for (b, cb) in f.iter() {
            for (c, cc) in g.iter() {
                t.add_term(vec![a.clone(), b.clone(), c.clone()], ca * cb * cc);
            }
        }
    }
    let one = tau_apply(&tau_apply(&t, 0, 1, d).unwrap(), 0, 2, d).unwrap();
    let two = tau_apply(&tau_apply(&t, 0, 2, d).unwrap(), 0, 1, d).unwrap();
    assert!(!one.is_zero());
    assert_eq!(one, -&two);
}

#[test]
fn two_vertex_closed_form() {
    let lie = LieData::so3();
    let r = Representation::new(lie.clone());
    let g = gamma_one();
    for a in 0..3 {
        for b in a..3 {
            for c in 0..3 {
                let f1 = poly_mul(&x(3, a), &x(3, b));
                let f2 = x(3, c);
                let expected = closed_form_two_vertices(&lie, &f1, &f2).scaled(&int(4));
                assert_eq!(r.eval_graph(&g, &[f1.clone(), f2.clone()]).unwrap(), expected);
            }
        }
    }
}

#[test]
fn one_vertex_closed_form_and_edge_order() {
    for lie in presets() {
        let last = Representation::new(lie.clone());
        let first = Representation::with_order(lie.clone(), EdgeOrder::FirstEdgeFirst);
        let g = gamma_two();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let args: Vec<Poly> = (0..3).map(|_| random_monomial(&mut rng, 3, 3, 2)).collect();
            let oracle = closed_form_one_vertex(&lie, &args[0], &args[1], &args[2]);
            let even_tail = odd_degree(&args[1]) == Some(0) && odd_degree(&args[2]) == Some(0);
            if even_tail {
                assert_eq!(first.eval_graph(&g, &args).unwrap(), oracle.scaled(&int(2)));
                assert_eq!(last.eval_graph(&g, &args).unwrap(), oracle.scaled(&int(-2)));
            }
        }
    }
    let so3 = Representation::with_order(LieData::so3(), EdgeOrder::FirstEdgeFirst);
    let v = so3.eval_graph(&gamma_two(), &[p(3, 0), x(3, 1), x(3, 2)]).unwrap();
    assert_eq!(v, constant(3, int(2)));
}

#[test]
fn edge_order_covariance() {
    let r = Representation::new(LieData::so3());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in enumerate_graphs(2, 2, 4).iter().take(40) {
        let args: Vec<Poly> = (0..2).map(|_| random_monomial(&mut rng, 3, 3, 1)).collect();
        let base = r.eval_graph(g.graph(), &args).unwrap();
        for perm in all_permutations(g.n_edges()) {
            let permuted = g.graph().with_edge_order(&perm);
            let expected = base.scaled(&int(sign_of_permutation(&perm)));
            assert_eq!(r.eval_graph(&permuted, &args).unwrap(), expected);
        }
    }
}

#[test]
fn labeling_independence() {
    let r = Representation::new(LieData::sl2());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for g in enumerate_graphs(2, 2, 3).iter().chain(enumerate_graphs(1, 2, 3).iter()) {
        let args: Vec<Poly> = (0..g.n_external()).map(|_| random_monomial(&mut rng, 3, 3, 1)).collect();
        let base = r.eval_graph(g.graph(), &args).unwrap();
        let swapped = g.graph().relabel_internal(&[1, 0]);
        assert_eq!(r.eval_graph(&swapped, &args).unwrap(), base);
    }
}

#[test]
fn multilinearity() {
    let r = Representation::new(LieData::so3());
    let g = gamma_one();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let (a, b, c) = (random_monomial(&mut rng, 3, 3, 0), random_monomial(&mut rng, 3, 3, 0), random_monomial(&mut rng, 3, 3, 0));
        let lhs = r.eval_graph(&g, &[&a.scaled(&rat(3, 2)) + &b, c.clone()]).unwrap();
        let rhs = &r.eval_graph(&g, &[a, c.clone()]).unwrap().scaled(&rat(3, 2)) + &r.eval_graph(&g, &[b, c]).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn operad_morphism_on_random_pairs() {
    let pool: Vec<_> = [(1, 1, 1), (2, 0, 0), (2, 0, 1), (2, 1, 2), (1, 2, 2), (3, 1, 3), (2, 1, 3)]
        .iter()
        .flat_map(|&(n, m, e)| enumerate_graphs(n, m, e))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for lie in [LieData::so3(), LieData::heisenberg(), LieData::sl2()] {
        let r = Representation::new(lie);
        for _ in 0..60 {
            let g1 = &pool[rng.gen_range(0..pool.len())];
            let g2 = &pool[rng.gen_range(0..pool.len())];
            let i = rng.gen_range(1..=g1.n_external());
            let arity = g1.n_external() + g2.n_external() - 1;
            let args: Vec<Poly> = (0..arity).map(|_| random_monomial(&mut rng, 3, 3, 2)).collect();
            let defect = r.morphism_defect(g1.graph(), i, g2.graph(), &args).unwrap();
            assert!(defect.is_zero(), "{} o_{i} {}", g1.graph(), g2.graph());
        }
    }
}

#[test]
fn ihx_relations_vanish_for_every_preset() {
    for lie in presets() {
        let r = representation_check(&lie, 3, 9);
        assert!(r.passes(), "{}: {:?}", lie.name(), r.offender);
        assert!(r.relations > 1000);
    }
}

#[test]
fn corrupted_structure_constant_is_detected() {
    let bad = LieData::so3().with_constant_unchecked(0, 1, 0, int(1));
    let r = representation_check(&bad, 2, 9);
    assert!(!r.jacobi_polynomial_vanishes);
    assert!(r.failures > 0);
}

#[test]
fn chevalley_eilenberg_basis_formulas() {
    let f = FixtureSet::embedded();
    for lie in presets() {
        let r = Representation::new(lie.clone());
        let d = lie.dim();
        for m in 0..d {
            let mut dx = Poly::new();
            let mut dp = Poly::new();
            for i in 0..d {
                for k in 0..d {
                    dx.add_scaled(&poly_mul(&x(d, k), &p(d, i)), &(lie.c(i, m, k) * int(-2)));
                }
                for j in 0..d {
                    dp.add_scaled(&poly_mul(&p(d, i), &p(d, j)), lie.c(i, j, m));
                }
            }
            assert_eq!(r.ce_differential(&x(d, m)), dx);
            assert_eq!(r.ce_differential(&p(d, m)), dp);
        }
        for mono in basis_monomials(d, 3) {
            assert_eq!(r.eval_sum(f.value("a1"), &[mono.clone()]), r.ce_differential(&mono));
            assert!(r.ce_differential(&r.ce_differential(&mono)).is_zero(), "{}", format_poly(&mono));
        }
    }
    let h = Representation::new(LieData::heisenberg());
    assert!(h.ce_differential(&x(3, 2)).is_zero());
    assert_eq!(h.ce_differential(&p(3, 2)), parse_poly("2*p_1*p_2", 3).unwrap());
}

#[test]
fn jacobi_polynomial() {
    for lie in presets() {
        assert!(Representation::new(lie).jacobi_poly().is_zero());
    }
    let bad = LieData::so3().with_constant_unchecked(0, 1, 0, int(1));
    assert!(!Representation::new(bad).jacobi_poly().is_zero());
}

fn one_vertex_truncation(f: &FixtureSet) -> GraphSum {
    let mut out = f.value("a2").clone();
    out.add_scaled(f.value("a3"), &rat(1, 2));
    out
}

#[test]
fn star_commutator_is_the_poisson_bracket() {
    let f = FixtureSet::embedded();
    let alpha = one_vertex_truncation(&f);
    for lie in presets() {
        let d = lie.dim();
        for (order, sign) in [(EdgeOrder::FirstEdgeFirst, 1), (EdgeOrder::LastEdgeFirst, -1)] {
            let r = Representation::with_order(lie.clone(), order);
            for i in 0..d {
                for j in 0..d {
                    let comm = &r.star_product(&alpha, &x(d, i), &x(d, j)) - &r.star_product(&alpha, &x(d, j), &x(d, i));
                    let expected = lie_poisson(&lie, &x(d, i), &x(d, j)).scaled(&int(2 * sign));
                    assert_eq!(comm, expected, "{} {order:?} ({i},{j})", lie.name());
                }
            }
        }
    }
}

#[test]
fn star_unit_and_abelian_collapse() {
    let f = FixtureSet::embedded();
    let alpha = f.value("alpha_duf");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for lie in presets() {
        let r = Representation::new(lie);
        for _ in 0..10 {
            let g = random_monomial(&mut rng, 3, 3, 2);
            let one = constant(3, int(1));
            assert_eq!(r.star_product(alpha, &one, &g), g);
            assert_eq!(r.star_product(alpha, &g, &one), g);
        }
    }
    let r = Representation::new(LieData::abelian(3));
    for _ in 0..20 {
        let (a, b) = (random_monomial(&mut rng, 3, 3, 2), random_monomial(&mut rng, 3, 3, 2));
        assert_eq!(r.star_product(alpha, &a, &b), poly_mul(&a, &b));
    }
}

#[test]
fn operator_residuals_follow_the_graph_residuals() {
    let f = FixtureSet::embedded();
    let r = Representation::new(LieData::so3());
    let args = residual_arguments(3, 60, 1);
    for res in r.associativity_to_order(f.value("alpha_duf"), 4, &args) {
        assert!(res.vanishes(), "grading {}: {:?}", res.grading, res.witness);
    }
    let mut bad = GraphSum::zero();
    for &(name, p, q) in ALPHA_DUF_TERMS {
        let c = if name == "a5" { rat(1, 7) } else { rat(p, q) };
        bad.add_scaled(f.value(name), &c);
    }
    let residuals = r.associativity_to_order(&bad, 4, &args);
    assert!(residuals.iter().any(|res| !res.vanishes()));
    let abelian = Representation::new(LieData::abelian(3));
    assert!(abelian.associativity_to_order(&bad, 4, &args).iter().all(|res| res.vanishes()));
}

#[test]
fn arity_mismatch_is_an_error() {
    let r = Representation::new(LieData::so3());
    let g = parse_sum("G(n=2; I=0; e=[])").unwrap();
    let g = g.keys().next().unwrap().graph().clone();
    assert!(matches!(r.eval_graph(&g, &[x(3, 0)]), Err(RepError::ArityMismatch { .. })));
}
