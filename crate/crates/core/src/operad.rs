//! Operadic insertion, the signed pre-Lie product and the Lie bracket on graph sums.

use num_traits::One;

use crate::graph::{CanonicalGraph, DirectedGraph, GraphError, GraphSum};
use crate::linalg::{sign_pow, Rational};

/// `g1 ∘_j g2`: replace external vertex `j` (1-based) of `g1` by `g2` and
/// reconnect every loose edge endpoint to each vertex of `g2` in turn.
///
/// External labels of `g2` take positions `j..j+s-1`; internal vertices of
/// `g1` come before those of `g2`, and so do its edges.
pub fn insert(g1: &DirectedGraph, j: usize, g2: &DirectedGraph) -> Result<GraphSum, GraphError> {
    let mut out = GraphSum::zero();
    for g in insertion_terms(g1, j, g2)? {
        out.add_admissible(&g, &Rational::one());
    }
    Ok(out)
}

/// The admissible graphs of `g1 ∘_j g2` before canonicalization.
pub fn insertion_terms(g1: &DirectedGraph, j: usize, g2: &DirectedGraph) -> Result<Vec<DirectedGraph>, GraphError> {
    let r = g1.n_external();
    if j == 0 || j > r {
        return Err(GraphError::PositionOutOfRange { position: j, arity: r });
    }
    let s = g2.n_external();
    let (m1, m2) = (g1.n_internal(), g2.n_internal());
    let n = r + s - 1;
    let hole = j - 1;
    let map1 = |v: usize| -> usize {
        if v < hole {
            v
        } else if v < r {
            v + s - 1
        } else {
            n + (v - r)
        }
    };
    let map2 = |v: usize| -> usize {
        if v < s {
            hole + v
        } else {
            n + m1 + (v - s)
        }
    };
    let targets: Vec<usize> = (0..g2.n_vertices()).map(map2).collect();
    let tail: Vec<(usize, usize)> = g2.edges().iter().map(|&(a, b)| (map2(a), map2(b))).collect();

    // loose endpoints: (edge index, is source)
    let mut loose = Vec::new();
    let mut head: Vec<(usize, usize)> = Vec::with_capacity(g1.n_edges());
    for (k, &(a, b)) in g1.edges().iter().enumerate() {
        if a == hole {
            loose.push((k, true));
        }
        if b == hole {
            loose.push((k, false));
        }
        head.push((if a == hole { usize::MAX } else { map1(a) }, if b == hole { usize::MAX } else { map1(b) }));
    }
    if !loose.is_empty() && targets.is_empty() {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    let mut choice = vec![0usize; loose.len()];
    loop {
        let mut edges = head.clone();
        for (&(k, src), &c) in loose.iter().zip(&choice) {
            if src {
                edges[k].0 = targets[c];
            } else {
                edges[k].1 = targets[c];
            }
        }
        edges.extend_from_slice(&tail);
        let g = DirectedGraph::new(n, m1 + m2, edges).expect("insertion keeps ids in range");
        if g.is_admissible() {
            out.push(g);
        }
        // odometer over reattachment maps
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < targets.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            break;
        }
    }
    Ok(out)
}

/// Sign of the `i`-th insertion in `Γ1 ⋆ Γ2`, where `n` is the arity of `Γ1`.
pub fn star_sign(n: usize, i: usize, g2: &DirectedGraph) -> i64 {
    let m = g2.n_external() as i64;
    sign_pow(g2.degree() * (1 - n as i64) + (i as i64 + 1) * (m - 1))
}

/// `Γ1 ⋆ Γ2 = Σ_i ± Γ1 ∘_i Γ2`.
pub fn star_graphs(g1: &CanonicalGraph, g2: &CanonicalGraph) -> GraphSum {
    let n = g1.n_external();
    let mut out = GraphSum::zero();
    for i in 1..=n {
        let sign = Rational::from_integer(star_sign(n, i, g2).into());
        for g in insertion_terms(g1, i, g2).expect("position in range") {
            out.add_admissible(&g, &sign);
        }
    }
    out
}

/// Bilinear extension of [`star_graphs`].
pub fn star(x: &GraphSum, y: &GraphSum) -> GraphSum {
    star_capped(x, y, None)
}

fn star_capped(x: &GraphSum, y: &GraphSum, cap: Option<usize>) -> GraphSum {
    let mut out = GraphSum::zero();
    for (g1, c1) in x.iter() {
        for (g2, c2) in y.iter() {
            if cap.is_some_and(|c| g1.second_grading() + g2.second_grading() > c) {
                continue;
            }
            out.add_scaled(&star_graphs(g1, g2), &(c1 * c2));
        }
    }
    out
}

/// `[x, y] = x⋆y − (−1)^{|x||y|} y⋆x` in the Lie degree, termwise.
pub fn bracket(x: &GraphSum, y: &GraphSum) -> GraphSum {
    bracket_truncated(x, y, None)
}

/// The bracket restricted to pairs of terms whose second gradings sum to at most `cap`.
pub fn bracket_truncated(x: &GraphSum, y: &GraphSum, cap: Option<usize>) -> GraphSum {
    let mut out = GraphSum::zero();
    for (g1, c1) in x.iter() {
        for (g2, c2) in y.iter() {
            if cap.is_some_and(|c| g1.second_grading() + g2.second_grading() > c) {
                continue;
            }
            let c = c1 * c2;
            out.add_scaled(&star_graphs(g1, g2), &c);
            let sign = sign_pow(g1.lie_degree() * g2.lie_degree());
            out.add_scaled(&star_graphs(g2, g1), &(-c * Rational::from_integer(sign.into())));
        }
    }
    out
}

/// `ad_ξ^k(α)`.
pub fn ad_pow(xi: &GraphSum, alpha: &GraphSum, k: usize) -> GraphSum {
    ad_pow_truncated(xi, alpha, k, None)
}

pub fn ad_pow_truncated(xi: &GraphSum, alpha: &GraphSum, k: usize, cap: Option<usize>) -> GraphSum {
    let mut cur = alpha.clone();
    for _ in 0..k {
        cur = bracket_truncated(xi, &cur, cap);
    }
    cur
}

/// Truncated `x ⋆ y`.
pub fn star_truncated(x: &GraphSum, y: &GraphSum, cap: Option<usize>) -> GraphSum {
    star_capped(x, y, cap)
}
