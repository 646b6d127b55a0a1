use std::sync::OnceLock;

use super::{DirectedGraph, Edge};

const MAX_CACHED: usize = 8;

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> &'static [Vec<usize>] {
    static CACHE: [OnceLock<Vec<Vec<usize>>>; MAX_CACHED + 1] = [const { OnceLock::new() }; MAX_CACHED + 1];
    assert!(m <= MAX_CACHED, "permutations of more than {MAX_CACHED} elements are not supported");
    CACHE[m].get_or_init(|| {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..m).collect();
        loop {
            out.push(cur.clone());
            // next lexicographic permutation
            let Some(i) = (1..m).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..m).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    })
}

/// Parity of a sequence of distinct integers as a sign `±1`.
pub fn parity(seq: &[usize]) -> i64 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 { 1 } else { -1 }
}

pub(super) fn canonical_form(g: &DirectedGraph) -> Option<(DirectedGraph, i64)> {
    let (c, sign, zero) = canonical_form_raw(g);
    (!zero).then_some((c, sign))
}

/// Minimal representative, its sign and whether an odd automorphism exists.
pub(super) fn canonical_form_raw(g: &DirectedGraph) -> (DirectedGraph, i64, bool) {
    let n = g.n_external;
    let mut best: Option<Vec<Edge>> = None;
    let mut best_sign = 0i64;
    let mut zero = false;
    let mut tagged: Vec<(usize, usize, usize)> = Vec::with_capacity(g.edges.len());
    let mut order: Vec<usize> = Vec::with_capacity(g.edges.len());
    for perm in permutations(g.n_internal) {
        let f = |v: usize| if v < n { v } else { n + perm[v - n] };
        tagged.clear();
        tagged.extend(g.edges.iter().enumerate().map(|(k, &(a, b))| (f(a), f(b), k)));
        tagged.sort_unstable();
        let cmp = match &best {
            None => std::cmp::Ordering::Less,
            Some(b) => tagged.iter().map(|t| (t.0, t.1)).cmp(b.iter().copied()),
        };
        if cmp == std::cmp::Ordering::Greater {
            continue;
        }
        order.clear();
        order.extend(tagged.iter().map(|t| t.2));
        let sign = parity(&order);
        if cmp == std::cmp::Ordering::Less {
            best = Some(tagged.iter().map(|t| (t.0, t.1)).collect());
            best_sign = sign;
            zero = false;
        } else if sign != best_sign {
            zero = true;
        }
    }
    let edges = best.unwrap_or_default();
    (DirectedGraph::from_parts(n, g.n_internal, edges), best_sign, zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(5).len(), 120);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
    }

    #[test]
    fn parity_of_transposition() {
        assert_eq!(parity(&[1, 0, 2]), -1);
        assert_eq!(parity(&[2, 0, 1]), 1);
    }

    #[test]
    fn swapped_edges_give_negative_sign() {
        let g = DirectedGraph::new(2, 1, vec![(2, 1), (2, 0)]).unwrap();
        let (c, s) = g.canonicalize().unwrap().unwrap();
        assert_eq!(c.edges(), &[(2, 0), (2, 1)]);
        assert_eq!(s, -1);
    }

    #[test]
    fn odd_automorphism_is_zero() {
        // two internals each pointing at external 1; swapping them swaps the two edges
        let g = DirectedGraph::new(1, 2, vec![(1, 0), (2, 0)]).unwrap();
        assert!(g.canonicalize().unwrap().is_none());
    }

    #[test]
    fn rigid_graph_survives() {
        // a6 has no automorphism fixing the externals
        let g = DirectedGraph::new(2, 2, vec![(2, 0), (2, 3), (3, 2), (3, 1)]).unwrap();
        assert!(g.canonicalize().unwrap().is_some());
    }
}
