//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_traits::Zero;

use graphmc::graph::Edge;
use graphmc::linalg::{int, Rational};
use graphmc::rep::{poly_dp, poly_dx, poly_mul, LieData, Monomial, Poly};
use graphmc::{DirectedGraph, GraphSum};

pub fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

pub fn sign_of_permutation(p: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1 } else { -1 }
}

/// Admissibility written out directly from the definition.
pub fn admissible(n: usize, m: usize, edges: &[Edge]) -> bool {
    let total = n + m;
    let set: BTreeSet<Edge> = edges.iter().copied().collect();
    if set.len() != edges.len() || edges.iter().any(|&(a, b)| a == b) {
        return false;
    }
    for v in n..total {
        let inn = edges.iter().filter(|e| e.1 == v).count();
        let out = edges.iter().filter(|e| e.0 == v).count();
        if inn > 1 || out > 2 || inn + out > 3 {
            return false;
        }
    }
    // flood from the externals, ignoring direction
    let mut seen: Vec<bool> = (0..total).map(|v| v < n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            if seen[a] != seen[b] {
                seen[a] = true;
                seen[b] = true;
                changed = true;
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn relabel(n: usize, edges: &[Edge], perm: &[usize]) -> Vec<Edge> {
    let f = |v: usize| if v < n { v } else { n + perm[v - n] };
    edges.iter().map(|&(a, b)| (f(a), f(b))).collect()
}

/// Isomorphism class key: minimum sorted edge set over internal relabelings.
pub fn class_key(n: usize, m: usize, edges: &[Edge]) -> Vec<Edge> {
    all_permutations(m)
        .iter()
        .map(|p| {
            let mut e = relabel(n, edges, p);
            e.sort();
            e
        })
        .min()
        .unwrap()
}

/// Whether some internal relabeling fixes the edge set while permuting edges oddly.
pub fn odd_automorphism(n: usize, m: usize, edges: &[Edge]) -> bool {
    all_permutations(m).iter().any(|p| {
        let image = relabel(n, edges, p);
        let positions: Option<Vec<usize>> = image.iter().map(|e| edges.iter().position(|f| f == e)).collect();
        matches!(positions, Some(pos) if sign_of_permutation(&pos) == -1)
    })
}

fn subsets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = subsets(&items[1..], k - 1);
    for s in out.iter_mut() {
        s.insert(0, items[0].clone());
    }
    out.extend(subsets(&items[1..], k));
    out
}

/// `(classes, classes without odd automorphism)` of admissible graphs in a slice.
pub fn naive_slice_counts(n: usize, m: usize, e: usize) -> (usize, usize) {
    let total = n + m;
    let pairs: Vec<Edge> = (0..total).flat_map(|a| (0..total).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let mut classes = BTreeSet::new();
    let mut nonzero = BTreeSet::new();
    for edges in subsets(&pairs, e) {
        if !admissible(n, m, &edges) {
            continue;
        }
        let key = class_key(n, m, &edges);
        if !odd_automorphism(n, m, &edges) {
            nonzero.insert(key.clone());
        }
        classes.insert(key);
    }
    (classes.len(), nonzero.len())
}

/// `Γ1 ∘_j Γ2` by trying every reattachment of every loose edge end.
pub fn brute_insert(g1: &DirectedGraph, j: usize, g2: &DirectedGraph) -> GraphSum {
    let (n1, m1) = (g1.n_external(), g1.n_internal());
    let (n2, m2) = (g2.n_external(), g2.n_internal());
    let n = n1 + n2 - 1;
    let slot = j - 1;
    let map1 = |v: usize| -> Option<usize> {
        if v < slot {
            Some(v)
        } else if v == slot {
            None
        } else if v < n1 {
            Some(v + n2 - 1)
        } else {
            Some(n + (v - n1))
        }
    };
    let map2 = |v: usize| if v < n2 { slot + v } else { n + m1 + (v - n2) };
    let targets: Vec<usize> = (0..n2 + m2).map(map2).collect();
    let loose: usize = g1.edges().iter().map(|&(a, b)| (a == slot) as usize + (b == slot) as usize).sum();
    let mut out = GraphSum::zero();
    let mut choice = vec![0usize; loose];
    loop {
        let mut k = 0;
        let mut edges = Vec::new();
        for &(a, b) in g1.edges() {
            let mut end = |v: usize| {
                map1(v).unwrap_or_else(|| {
                    let t = targets[choice[k]];
                    k += 1;
                    t
                })
            };
            let a2 = end(a);
            let b2 = end(b);
            edges.push((a2, b2));
        }
        edges.extend(g2.edges().iter().map(|&(a, b)| (map2(a), map2(b))));
        if admissible(n, m1 + m2, &edges) {
            out.add_graph(&DirectedGraph::new(n, m1 + m2, edges).unwrap(), &int(1)).unwrap();
        }
        let mut i = 0;
        while i < loose && choice[i] + 1 == targets.len() {
            choice[i] = 0;
            i += 1;
        }
        if i == loose {
            break;
        }
        choice[i] += 1;
    }
    out
}

/// Rank of a dense rational matrix by plain Gaussian elimination.
pub fn dense_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &rows[rank][c];
                for k in 0..cols {
                    let v = &rows[rank][k] * &f;
                    rows[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn x(d: usize, i: usize) -> Poly {
    Poly::singleton(Monomial::x(d, i), int(1))
}

pub fn p(d: usize, i: usize) -> Poly {
    Poly::singleton(Monomial::p(d, i), int(1))
}

pub fn constant(d: usize, c: Rational) -> Poly {
    Poly::singleton(Monomial::one(d), c)
}

/// `c_{i1 i2}^j x_j c_{i3 i4}^{i2} ∂²f1/∂x_{i1}∂x_{i3} ∂f2/∂x_{i4}`.
pub fn closed_form_two_vertices(lie: &LieData, f1: &Poly, f2: &Poly) -> Poly {
    let d = lie.dim();
    let mut out = Poly::new();
    for i1 in 0..d {
        for i2 in 0..d {
            for i3 in 0..d {
                for i4 in 0..d {
                    let mut coeff = Poly::new();
                    for j in 0..d {
                        let c = lie.c(i1, i2, j) * lie.c(i3, i4, i2);
                        if !c.is_zero() {
                            coeff.add_scaled(&x(d, j), &c);
                        }
                    }
                    if coeff.is_zero() {
                        continue;
                    }
                    let t = poly_mul(&poly_mul(&coeff, &poly_dx(&poly_dx(f1, i1), i3)), &poly_dx(f2, i4));
                    out += &t;
                }
            }
        }
    }
    out
}

/// `c_{i2 i3}^{i1} ∂f1/∂p^{i1} ∂f2/∂x_{i2} ∂f3/∂x_{i3}`.
pub fn closed_form_one_vertex(lie: &LieData, f1: &Poly, f2: &Poly, f3: &Poly) -> Poly {
    let d = lie.dim();
    let mut out = Poly::new();
    for i1 in 0..d {
        for i2 in 0..d {
            for i3 in 0..d {
                let c = lie.c(i2, i3, i1);
                if c.is_zero() {
                    continue;
                }
                let t = poly_mul(&poly_mul(&poly_dp(f1, i1), &poly_dx(f2, i2)), &poly_dx(f3, i3));
                out.add_scaled(&t, c);
            }
        }
    }
    out
}

/// Linear Poisson bracket `{f, g} = c_{ij}^k x_k ∂f/∂x_i ∂g/∂x_j` on even polynomials.
pub fn lie_poisson(lie: &LieData, f: &Poly, g: &Poly) -> Poly {
    let d = lie.dim();
    let mut out = Poly::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let c = lie.c(i, j, k);
                if !c.is_zero() {
                    out.add_scaled(&poly_mul(&poly_mul(&x(d, k), &poly_dx(f, i)), &poly_dx(g, j)), c);
                }
            }
        }
    }
    out
}

/// All monomials of total degree `1..=max` in `d` even and odd variables.
pub fn basis_monomials(d: usize, max: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut rec = |exps: Vec<u16>| {
        let deg: usize = exps.iter().map(|&e| e as usize).sum();
        for mask in 0u32..(1 << d) {
            let total = deg + mask.count_ones() as usize;
            if (1..=max).contains(&total) {
                out.push(Poly::singleton(Monomial::from_parts(exps.clone(), mask), int(1)));
            }
        }
    };
    let mut stack = vec![vec![]];
    while let Some(e) = stack.pop() {
        if e.len() == d {
            rec(e);
            continue;
        }
        let used: u16 = e.iter().sum();
        for k in 0..=(max as u16 - used.min(max as u16)) {
            let mut next = e.clone();
            next.push(k);
            stack.push(next);
        }
    }
    out
}
