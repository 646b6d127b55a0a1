//! Exact linear algebra over ℚ.
//!
//! Vectors are sparse maps from an ordered basis label to a nonzero rational.
//! Row reduction produces the reduced row echelon form with respect to the
//! label order, so pivots (and therefore normal forms) are reproducible and
//! independent of the order in which vectors were inserted.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `(-1)^e` for any integer exponent.
pub fn sign_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A finite linear combination of basis labels with rational coefficients.
///
/// No zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseVector<K: Ord> {
    entries: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for SparseVector<K> {
    fn default() -> Self {
        Self { entries: BTreeMap::new() }
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for SparseVector<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(k, v)| (k, fmt_rational(v))))
            .finish()
    }
}

impl<K: Ord + Clone> SparseVector<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(key: K, coeff: Rational) -> Self {
        let mut v = Self::new();
        v.add_term(key, coeff);
        v
    }

    pub fn add_term(&mut self, key: K, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.entries.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &SparseVector<K>, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (k, c) in &other.entries {
            self.add_term(k.clone(), c * factor);
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::new();
        }
        Self {
            entries: self
                .entries
                .iter()
                .map(|(k, c)| (k.clone(), c * factor))
                .collect(),
        }
    }

    pub fn scale_in_place(&mut self, factor: &Rational) {
        if factor.is_zero() {
            self.entries.clear();
            return;
        }
        for c in self.entries.values_mut() {
            *c *= factor;
        }
    }

    pub fn get(&self, key: &K) -> Option<&Rational> {
        self.entries.get(key)
    }

    pub fn coeff(&self, key: &K) -> Rational {
        self.entries.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn remove(&mut self, key: &K) -> Option<Rational> {
        self.entries.remove(key)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    /// Smallest label with a nonzero coefficient.
    pub fn leading(&self) -> Option<(&K, &Rational)> {
        self.entries.iter().next()
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Relabels every key; colliding images are summed.
    pub fn map_keys<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> SparseVector<J> {
        let mut out = SparseVector::new();
        for (k, c) in &self.entries {
            out.add_term(f(k), c.clone());
        }
        out
    }

    /// Largest absolute numerator or denominator, a crude size measure for reports.
    pub fn height(&self) -> BigInt {
        self.entries
            .values()
            .map(|c| c.numer().abs().max(c.denom().clone()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for SparseVector<K> {
    fn from_iter<T: IntoIterator<Item = (K, Rational)>>(iter: T) -> Self {
        let mut v = Self::new();
        for (k, c) in iter {
            v.add_term(k, c);
        }
        v
    }
}

impl<K: Ord + Clone> IntoIterator for SparseVector<K> {
    type Item = (K, Rational);
    type IntoIter = std::collections::btree_map::IntoIter<K, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}

impl<K: Ord + Clone> AddAssign<&SparseVector<K>> for SparseVector<K> {
    fn add_assign(&mut self, rhs: &SparseVector<K>) {
        self.add_scaled(rhs, &Rational::one());
    }
}

impl<K: Ord + Clone> SubAssign<&SparseVector<K>> for SparseVector<K> {
    fn sub_assign(&mut self, rhs: &SparseVector<K>) {
        self.add_scaled(rhs, &-Rational::one());
    }
}

impl<K: Ord + Clone> Add for &SparseVector<K> {
    type Output = SparseVector<K>;
    fn add(self, rhs: Self) -> SparseVector<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<K: Ord + Clone> Sub for &SparseVector<K> {
    type Output = SparseVector<K>;
    fn sub(self, rhs: Self) -> SparseVector<K> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<K: Ord + Clone> Neg for &SparseVector<K> {
    type Output = SparseVector<K>;
    fn neg(self) -> SparseVector<K> {
        self.scaled(&-Rational::one())
    }
}

/// Reduced row echelon basis of a subspace.
///
/// Every row has leading coefficient 1 at its pivot label, and each pivot
/// label is absent from every other row.
#[derive(Clone, Debug)]
pub struct RowBasis<K: Ord> {
    rows: Vec<SparseVector<K>>,
    pivots: BTreeMap<K, usize>,
    // Per row, its expression in terms of inserted vectors (by insertion index).
    origins: Option<Vec<SparseVector<usize>>>,
    inserted: usize,
}

impl<K: Ord + Clone> Default for RowBasis<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> RowBasis<K> {
    pub fn new() -> Self {
        Self { rows: Vec::new(), pivots: BTreeMap::new(), origins: None, inserted: 0 }
    }

    /// A basis that remembers how each row was built from the inserted vectors.
    pub fn tracked() -> Self {
        Self { origins: Some(Vec::new()), ..Self::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVector<K>] {
        &self.rows
    }

    pub fn pivots(&self) -> impl Iterator<Item = (&K, usize)> {
        self.pivots.iter().map(|(k, &i)| (k, i))
    }

    pub fn is_pivot(&self, key: &K) -> bool {
        self.pivots.contains_key(key)
    }

    /// Number of vectors offered to [`RowBasis::insert`] so far.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Normal form of `v` together with the combination of inserted vectors
    /// that was subtracted (only meaningful for tracked bases).
    fn reduce_inner(&self, v: &SparseVector<K>) -> (SparseVector<K>, SparseVector<usize>) {
        let hits: Vec<(usize, Rational)> = v
            .iter()
            .filter_map(|(k, c)| self.pivots.get(k).map(|&r| (r, c.clone())))
            .collect();
        let mut nf = v.clone();
        let mut used = SparseVector::new();
        for (r, c) in hits {
            nf.add_scaled(&self.rows[r], &-c.clone());
            if let Some(origins) = &self.origins {
                used.add_scaled(&origins[r], &c);
            }
        }
        (nf, used)
    }

    /// Adds `v` to the spanning set. Returns `true` when the rank grew.
    pub fn insert(&mut self, v: SparseVector<K>) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (mut nf, used) = self.reduce_inner(&v);
        let Some((lead, lead_coeff)) = nf.leading().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lead_coeff.recip();
        nf.scale_in_place(&inv);
        let mut combo = SparseVector::singleton(id, Rational::one());
        combo -= &used;
        combo.scale_in_place(&inv);

        for r in 0..self.rows.len() {
            if let Some(c) = self.rows[r].get(&lead).cloned() {
                self.rows[r].add_scaled(&nf, &-c.clone());
                if let Some(origins) = &mut self.origins {
                    origins[r].add_scaled(&combo, &-c);
                }
            }
        }
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(nf);
        if let Some(origins) = &mut self.origins {
            origins.push(combo);
        }
        true
    }

    /// Unique representative of `v` modulo the span: zero at every pivot label.
    pub fn reduce(&self, v: &SparseVector<K>) -> SparseVector<K> {
        self.reduce_inner(v).0
    }

    pub fn contains(&self, v: &SparseVector<K>) -> bool {
        self.reduce(v).is_zero()
    }

    /// If `v` lies in the span, its coefficients with respect to [`RowBasis::rows`].
    pub fn in_span(&self, v: &SparseVector<K>) -> Option<Vec<Rational>> {
        if !self.contains(v) {
            return None;
        }
        let mut w = vec![Rational::zero(); self.rows.len()];
        for (k, c) in v.iter() {
            if let Some(&r) = self.pivots.get(k) {
                w[r] = c.clone();
            }
        }
        Some(w)
    }

    /// For tracked bases: coefficients `a_i` with `v = Σ a_i · inserted_i`, if `v` is in the span.
    pub fn express(&self, v: &SparseVector<K>) -> Option<SparseVector<usize>> {
        assert!(self.origins.is_some(), "express requires a tracked basis");
        let (nf, used) = self.reduce_inner(v);
        nf.is_zero().then_some(used)
    }
}

pub fn row_reduce<K: Ord + Clone>(vectors: impl IntoIterator<Item = SparseVector<K>>) -> RowBasis<K> {
    let mut basis = RowBasis::new();
    for v in vectors {
        basis.insert(v);
    }
    basis
}

/// Membership test with witness coefficients over the rows of `basis`.
pub fn in_span<K: Ord + Clone>(v: &SparseVector<K>, basis: &RowBasis<K>) -> Option<Vec<Rational>> {
    basis.in_span(v)
}

/// Rebuilds `Σ w_r · row_r`.
pub fn combine<K: Ord + Clone>(basis: &RowBasis<K>, witness: &[Rational]) -> SparseVector<K> {
    let mut out = SparseVector::new();
    for (row, c) in basis.rows().iter().zip(witness) {
        out.add_scaled(row, c);
    }
    out
}
