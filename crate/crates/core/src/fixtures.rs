//! Named graph sums used by the verification pipeline.
//!
//! Elementary fixtures live as text files under `fixtures/` and are embedded
//! at compile time; a directory with files of the same names can replace them
//! at run time. Composite fixtures are linear combinations of elementary ones.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_traits::{One, Signed};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{parse_sum, GraphSum, ParseError};
use crate::ihx::{IhxError, IhxQuotient};
use crate::linalg::{fmt_rational, rat, Rational, RowBasis};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture {name}: {source}")]
    Parse { name: String, source: ParseError },
    #[error("fixture {name}: {source}")]
    Io { name: String, source: std::io::Error },
    #[error("unknown fixture {0}")]
    Unknown(String),
}

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../../fixtures/", $name, ".g")))),*]
    };
}

const ELEMENTARY: &[(&str, &str)] = embedded!(
    "a1", "a2", "a3", "a4", "a5", "a6", "xi1", "xi2", "xi3", "b", "b1", "b2", "b3", "b_prime", "c", "q",
);

/// Composite fixtures as `(name, [(coefficient numerator, denominator, component)])`.
const COMPOSITES: &[(&str, &[(i64, i64, &str)])] = &[
    ("alpha_0", &[(1, 1, "a1"), (1, 1, "a2")]),
    ("alpha_duf", &[(1, 1, "a1"), (1, 1, "a2"), (1, 2, "a3"), (-1, 12, "a4"), (1, 8, "a5"), (1, 24, "a6")]),
    ("xi", &[(-1, 4, "xi1"), (-1, 16, "xi2"), (1, 48, "xi3")]),
    ("alpha_duf_prime", &[(1, 1, "a1"), (1, 1, "a2"), (1, 24, "b")]),
];

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub value: GraphSum,
    /// Source text for elementary fixtures; empty for composites.
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct FixtureSet {
    fixtures: BTreeMap<String, Fixture>,
}

impl FixtureSet {
    pub fn embedded() -> Self {
        let texts = ELEMENTARY.iter().map(|&(n, t)| (n.to_string(), t.to_string())).collect();
        Self::from_texts(texts).expect("embedded fixtures parse")
    }

    /// Embedded fixtures, with any `<name>.g` present in `dir` taking precedence.
    pub fn with_overrides(dir: &Path) -> Result<Self, FixtureError> {
        let mut texts: BTreeMap<String, String> =
            ELEMENTARY.iter().map(|&(n, t)| (n.to_string(), t.to_string())).collect();
        for (name, text) in texts.iter_mut() {
            let path = dir.join(format!("{name}.g"));
            if path.exists() {
                *text = std::fs::read_to_string(&path).map_err(|source| FixtureError::Io { name: name.clone(), source })?;
            }
        }
        Self::from_texts(texts)
    }

    fn from_texts(texts: BTreeMap<String, String>) -> Result<Self, FixtureError> {
        let mut fixtures = BTreeMap::new();
        for (name, text) in texts {
            let value = parse_sum(&text).map_err(|source| FixtureError::Parse { name: name.clone(), source })?;
            let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
            fixtures.insert(name.clone(), Fixture { name, value, source: text, sha256 });
        }
        let mut set = Self { fixtures };
        set.rebuild_composites();
        Ok(set)
    }

    fn rebuild_composites(&mut self) {
        for &(name, parts) in COMPOSITES {
            let mut value = GraphSum::zero();
            let mut hasher = Sha256::new();
            for &(p, q, part) in parts {
                let f = &self.fixtures[part];
                value.add_scaled(&f.value, &rat(p, q));
                hasher.update(format!("{p}/{q}*{}:{};", part, f.sha256));
            }
            let sha256 = hex::encode(hasher.finalize());
            self.fixtures.insert(name.to_string(), Fixture { name: name.to_string(), value, source: String::new(), sha256 });
        }
    }

    pub fn get(&self, name: &str) -> Result<&GraphSum, FixtureError> {
        self.fixtures.get(name).map(|f| &f.value).ok_or_else(|| FixtureError::Unknown(name.to_string()))
    }

    /// Shorthand for fixtures known to exist.
    pub fn value(&self, name: &str) -> &GraphSum {
        self.get(name).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn fixture(&self, name: &str) -> Option<&Fixture> {
        self.fixtures.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.fixtures.keys().map(String::as_str)
    }

    pub fn hashes(&self) -> BTreeMap<String, String> {
        self.fixtures.iter().map(|(k, f)| (k.clone(), f.sha256.clone())).collect()
    }

    /// Perturbs one elementary fixture by scaling its first term by 2, so that
    /// checks depending on it must fail.
    pub fn corrupt(&mut self, name: &str) -> Result<(), FixtureError> {
        if COMPOSITES.iter().any(|c| c.0 == name) {
            return Err(FixtureError::Unknown(format!("{name} (composite fixtures cannot be corrupted directly)")));
        }
        let f = self.fixtures.get_mut(name).ok_or_else(|| FixtureError::Unknown(name.to_string()))?;
        let first = f.value.iter().next().map(|(g, c)| (g.clone(), c.clone()));
        if let Some((g, c)) = first {
            f.value.add_canonical(g, c);
        }
        f.sha256 = format!("corrupted:{}", f.sha256);
        self.rebuild_composites();
        Ok(())
    }

    /// Writes `x` modulo IHX as a combination of elementary fixtures of matching
    /// degree and grading, smaller fixtures preferred; `None` if impossible.
    pub fn name_in_fixtures(&self, x: &GraphSum, q: &IhxQuotient) -> Result<Option<Vec<(Rational, String)>>, IhxError> {
        let target = q.reduce(x)?;
        if target.is_zero() {
            return Ok(Some(Vec::new()));
        }
        let gradings: BTreeSet<usize> = target.keys().map(|g| g.second_grading()).collect();
        let lie = target.homogeneous_lie_degree();
        let mut candidates: Vec<&Fixture> = ELEMENTARY
            .iter()
            .map(|(n, _)| &self.fixtures[*n])
            .filter(|f| f.value.homogeneous_lie_degree() == lie && f.value.keys().all(|g| gradings.contains(&g.second_grading())))
            .collect();
        candidates.sort_by_key(|f| (f.value.len(), f.name.clone()));
        let mut basis = RowBasis::tracked();
        for f in &candidates {
            basis.insert(q.reduce(&f.value)?.into_vector());
        }
        Ok(basis.express(target.vector()).map(|coeffs| {
            let mut parts: Vec<(Rational, String)> = coeffs.iter().map(|(i, c)| (c.clone(), candidates[*i].name.clone())).collect();
            parts.sort_by(|a, b| a.1.cmp(&b.1));
            parts
        }))
    }

    /// Text form `2 * a3 - b1`, or `0`.
    pub fn format_combination(parts: &[(Rational, String)]) -> String {
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (c, name)) in parts.iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let a = c.abs();
            if !a.is_one() {
                out.push_str(&format!("{} * ", fmt_rational(&a)));
            }
            out.push_str(name);
        }
        out
    }

    /// `Σ cᵢ·fixtureᵢ`.
    pub fn combination(&self, parts: &[(Rational, &str)]) -> Result<GraphSum, FixtureError> {
        let mut out = GraphSum::zero();
        for (c, name) in parts {
            out.add_scaled(self.get(name)?, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_fixtures_parse() {
        let f = FixtureSet::embedded();
        assert_eq!(f.value("a1").len(), 2);
        assert_eq!(f.value("b").len(), 3);
        assert_eq!(f.value("b_prime").len(), 8);
        assert_eq!(f.value("c").len(), 4);
        assert_eq!(f.value("q").len(), 10);
    }

    #[test]
    fn b_is_sum_of_its_parts() {
        let f = FixtureSet::embedded();
        let parts = f.combination(&[(rat(1, 1), "b1"), (rat(1, 1), "b2"), (rat(1, 1), "b3")]).unwrap();
        assert_eq!(&parts, f.value("b"));
    }

    #[test]
    fn corruption_changes_hash_and_value() {
        let mut f = FixtureSet::embedded();
        let before = f.value("alpha_duf").clone();
        let h = f.hashes()["alpha_duf"].clone();
        f.corrupt("a3").unwrap();
        assert_ne!(f.value("alpha_duf"), &before);
        assert_ne!(f.hashes()["alpha_duf"], h);
    }

    #[test]
    fn names_a_bracket() {
        let f = FixtureSet::embedded();
        let q = IhxQuotient::new(Default::default());
        let x = crate::operad::bracket(f.value("xi1"), f.value("a1"));
        let parts = f.name_in_fixtures(&x, &q).unwrap().unwrap();
        assert_eq!(FixtureSet::format_combination(&parts), "2 * a3");
        let y = crate::operad::bracket(f.value("xi2"), f.value("a2"));
        let parts = f.name_in_fixtures(&y, &q).unwrap().unwrap();
        assert!(q.equal(&y, &f.combination(&parts.iter().map(|(c, n)| (c.clone(), n.as_str())).collect::<Vec<_>>()).unwrap()).unwrap());
    }
}
