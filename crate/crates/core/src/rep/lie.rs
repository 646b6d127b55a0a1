//! Finite-dimensional Lie algebras given by structure constants.

use num_traits::Zero;
use serde::Deserialize;
use thiserror::Error;

use crate::linalg::{fmt_rational, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("entries for [x{i}, x{j}] and [x{j}, x{i}] at x{k} are not opposite")]
    NotAntisymmetric { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails at (i, j, k, l) = ({i}, {j}, {k}, {l}): sum is {value}")]
    Jacobi { i: usize, j: usize, k: usize, l: usize, value: String },
    #[error("bad coefficient {0}")]
    Coefficient(String),
    #[error("config: {0}")]
    Config(String),
    #[error("unknown preset {0}")]
    UnknownPreset(String),
}

/// `[x_i, x_j] = Σ_k c_{ij}^k x_k`, indices 0-based internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieData {
    dim: usize,
    name: String,
    c: Vec<Rational>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coeff {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct Config {
    dim: usize,
    #[serde(default)]
    name: Option<String>,
    entries: Vec<(usize, usize, usize, Coeff)>,
}

impl LieData {
    /// Builds from 1-based entries `(i, j, k, c_{ij}^k)`, completing antisymmetrically
    /// and checking the Jacobi identity.
    pub fn from_entries(dim: usize, name: &str, entries: &[(usize, usize, usize, Rational)]) -> Result<Self, LieError> {
        let mut c = vec![None::<Rational>; dim * dim * dim];
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for (i, j, k, v) in entries {
            for &index in [i, j, k] {
                if index == 0 || index > dim {
                    return Err(LieError::IndexOutOfRange { index, dim });
                }
            }
            let (a, b, t) = (i - 1, j - 1, k - 1);
            for (slot, val) in [(idx(a, b, t), v.clone()), (idx(b, a, t), -v.clone())] {
                match &c[slot] {
                    Some(old) if *old != val => return Err(LieError::NotAntisymmetric { i: *i, j: *j, k: *k }),
                    _ => c[slot] = Some(val),
                }
            }
        }
        let data = Self { dim, name: name.to_string(), c: c.into_iter().map(Option::unwrap_or_default).collect() };
        data.check_jacobi()?;
        Ok(data)
    }

    /// Parses `{ dim, entries: [[i, j, k, value], …] }` as TOML or JSON.
    pub fn from_config(text: &str) -> Result<Self, LieError> {
        let cfg: Config = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| LieError::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| LieError::Config(e.to_string()))?
        };
        let entries = cfg
            .entries
            .into_iter()
            .map(|(i, j, k, v)| {
                let q = match v {
                    Coeff::Int(n) => int(n),
                    Coeff::Text(s) => s.trim().parse::<Rational>().map_err(|_| LieError::Coefficient(s))?,
                };
                Ok((i, j, k, q))
            })
            .collect::<Result<Vec<_>, LieError>>()?;
        Self::from_entries(cfg.dim, cfg.name.as_deref().unwrap_or("custom"), &entries)
    }

    pub fn preset(name: &str) -> Result<Self, LieError> {
        match name {
            "so3" | "so(3)" => Ok(Self::so3()),
            "heisenberg" => Ok(Self::heisenberg()),
            "sl2" | "sl(2)" => Ok(Self::sl2()),
            _ => match name.strip_prefix("abelian") {
                Some(d) => d
                    .trim_matches(|c| c == '(' || c == ')')
                    .parse()
                    .map(Self::abelian)
                    .map_err(|_| LieError::UnknownPreset(name.to_string())),
                None => Err(LieError::UnknownPreset(name.to_string())),
            },
        }
    }

    pub fn abelian(dim: usize) -> Self {
        Self { dim, name: format!("abelian({dim})"), c: vec![Rational::zero(); dim * dim * dim] }
    }

    /// `[x1, x2] = x3`, `x3` central.
    pub fn heisenberg() -> Self {
        Self::from_entries(3, "heisenberg", &[(1, 2, 3, int(1))]).expect("valid preset")
    }

    /// `[x_i, x_j] = ε_{ijk} x_k`.
    pub fn so3() -> Self {
        Self::from_entries(3, "so3", &[(1, 2, 3, int(1)), (2, 3, 1, int(1)), (3, 1, 2, int(1))]).expect("valid preset")
    }

    /// Basis `e, h, f` with `[h, e] = 2e`, `[h, f] = −2f`, `[e, f] = h`.
    pub fn sl2() -> Self {
        Self::from_entries(3, "sl2", &[(2, 1, 1, int(2)), (2, 3, 3, int(-2)), (1, 3, 2, int(1))]).expect("valid preset")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `c_{ij}^k`, 0-based.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// `Σ_m (c_{im}^l c_{jk}^m + c_{jm}^l c_{ki}^m + c_{km}^l c_{ij}^m)`.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize, l: usize) -> Rational {
        let mut s = Rational::zero();
        for m in 0..self.dim {
            s += self.c(i, m, l) * self.c(j, k, m) + self.c(j, m, l) * self.c(k, i, m) + self.c(k, m, l) * self.c(i, j, m);
        }
        s
    }

    pub fn check_jacobi(&self) -> Result<(), LieError> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = self.jacobiator(i, j, k, l);
                        if !v.is_zero() {
                            return Err(LieError::Jacobi { i: i + 1, j: j + 1, k: k + 1, l: l + 1, value: fmt_rational(&v) });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Copy with `c_{ij}^k = value` and `c_{ji}^k = −value`, 0-based, skipping the
    /// Jacobi check; for negative controls.
    pub fn with_constant_unchecked(&self, i: usize, j: usize, k: usize, value: Rational) -> Self {
        let mut out = self.clone();
        let d = self.dim;
        out.c[(j * d + i) * d + k] = -value.clone();
        out.c[(i * d + j) * d + k] = value;
        out.name = format!("{}*", self.name);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_satisfy_jacobi() {
        for l in [LieData::so3(), LieData::heisenberg(), LieData::sl2(), LieData::abelian(2)] {
            assert!(l.check_jacobi().is_ok(), "{}", l.name());
        }
    }

    #[test]
    fn antisymmetric_completion() {
        let l = LieData::heisenberg();
        assert_eq!(l.c(1, 0, 2), &int(-1));
    }

    #[test]
    fn jacobi_violation_is_named() {
        let bad = LieData::from_entries(3, "bad", &[(1, 2, 3, int(1)), (2, 3, 1, int(1)), (3, 1, 2, int(1)), (1, 2, 1, int(1))]);
        assert!(matches!(bad, Err(LieError::Jacobi { .. })));
    }

    #[test]
    fn corrupted_constant_breaks_jacobi() {
        let bad = LieData::so3().with_constant_unchecked(0, 1, 0, int(1));
        assert_eq!(bad.c(1, 0, 0), &int(-1));
        assert!(bad.check_jacobi().is_err());
    }

    #[test]
    fn config_formats() {
        let t = LieData::from_config("dim = 3\nentries = [[1, 2, 3, 1]]\n").unwrap();
        assert_eq!(t, LieData::heisenberg().clone().renamed("custom"));
        let j = LieData::from_config(r#"{"dim": 3, "entries": [[1, 2, 3, "1/2"]]}"#).unwrap();
        assert_eq!(j.c(0, 1, 2), &crate::linalg::rat(1, 2));
    }

    impl LieData {
        fn renamed(mut self, n: &str) -> Self {
            self.name = n.to_string();
            self
        }
    }
}
