//! Difference sets `D` of positive integers and the distance graphs they define.
//!
//! The distance graph `G(D)` has the natural numbers as vertices and joins `i` and
//! `i + d` for every `d` in `D`. Every kind here has exact membership and an exact
//! complement, so both `T(n, D)` and `T(n, complement of D)` can be studied side by side.
//!
//! Text grammar (round-trips through [`std::fmt::Display`] and [`std::str::FromStr`]):
//!
//! ```text
//! finite:1,3          the set {1, 3}
//! cofinite:1          every positive integer except 1
//! residue:2:0         d with d mod 2 in {0}, i.e. the even numbers
//! valuation:1:2       d with ex(d) mod 2 in {0}, ex = 2-adic valuation
//! complement(<spec>)  the complement of any other spec
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of positive integers with decidable membership.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistanceSet {
    /// Exactly the listed values (sorted, distinct, positive).
    Finite(Vec<u64>),
    /// Every positive integer except the listed ones.
    Cofinite(Vec<u64>),
    /// `d` such that `d mod modulus` is one of `allowed`.
    Residue { modulus: u64, allowed: Vec<u64> },
    /// `d` such that `ex(d) mod q < p`. With `(1, 2)` this is the set of numbers
    /// whose 2-adic valuation is even.
    Valuation { p: u32, q: u32 },
    /// Lazy complement of another set.
    Complement(Box<DistanceSet>),
}

/// Largest `s` with `2^s` dividing `m`.
pub fn ex_valuation(m: u64) -> Result<u32> {
    if m == 0 {
        return Err(Error::ZeroValuation);
    }
    Ok(m.trailing_zeros())
}

fn normalized(mut values: Vec<u64>, what: &str) -> Result<Vec<u64>> {
    if values.contains(&0) {
        return Err(Error::InvalidDistanceSet(format!(
            "{what} lists must contain positive integers only"
        )));
    }
    values.sort_unstable();
    values.dedup();
    Ok(values)
}

impl DistanceSet {
    pub fn finite(values: impl Into<Vec<u64>>) -> Result<Self> {
        Ok(Self::Finite(normalized(values.into(), "finite")?))
    }

    pub fn cofinite(excluded: impl Into<Vec<u64>>) -> Result<Self> {
        Ok(Self::Cofinite(normalized(excluded.into(), "cofinite")?))
    }

    pub fn residue(modulus: u64, allowed: impl Into<Vec<u64>>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidDistanceSet(format!(
                "residue modulus must be at least 2, got {modulus}"
            )));
        }
        let mut allowed = allowed.into();
        if let Some(bad) = allowed.iter().find(|&&a| a >= modulus) {
            return Err(Error::InvalidDistanceSet(format!(
                "residue {bad} is not below the modulus {modulus}"
            )));
        }
        allowed.sort_unstable();
        allowed.dedup();
        Ok(Self::Residue { modulus, allowed })
    }

    pub fn valuation(p: u32, q: u32) -> Result<Self> {
        if p == 0 || p >= q {
            return Err(Error::InvalidDistanceSet(format!(
                "valuation parameters need 1 <= p < q, got ({p}, {q})"
            )));
        }
        Ok(Self::Valuation { p, q })
    }

    /// `{d}`.
    pub fn single(d: u64) -> Result<Self> {
        Self::finite(vec![d])
    }

    /// The even numbers `2N`.
    pub fn evens() -> Self {
        Self::Residue {
            modulus: 2,
            allowed: vec![0],
        }
    }

    /// The set `E` of numbers with even 2-adic valuation.
    pub fn even_valuation() -> Self {
        Self::Valuation { p: 1, q: 2 }
    }

    pub fn complement(&self) -> Self {
        Self::Complement(Box::new(self.clone()))
    }

    /// Membership test. `d = 0` is rejected: equal entries never witness a difference.
    pub fn contains(&self, d: u64) -> Result<bool> {
        if d == 0 {
            return Err(Error::InvalidDifference(0));
        }
        Ok(self.contains_positive(d))
    }

    /// Signed variant of [`Self::contains`] for callers holding raw differences.
    pub fn contains_signed(&self, d: i64) -> Result<bool> {
        if d <= 0 {
            return Err(Error::InvalidDifference(d));
        }
        Ok(self.contains_positive(d as u64))
    }

    pub(crate) fn contains_positive(&self, d: u64) -> bool {
        debug_assert!(d > 0);
        match self {
            Self::Finite(v) => v.binary_search(&d).is_ok(),
            Self::Cofinite(v) => v.binary_search(&d).is_err(),
            Self::Residue { modulus, allowed } => allowed.binary_search(&(d % modulus)).is_ok(),
            Self::Valuation { p, q } => d.trailing_zeros() % q < *p,
            Self::Complement(inner) => !inner.contains_positive(d),
        }
    }

    /// Membership of `1..=max_d` as a lookup table indexed by difference; entry 0 is false.
    pub fn difference_mask(&self, max_d: usize) -> Vec<bool> {
        let mut mask = vec![false; max_d + 1];
        for (d, slot) in mask.iter_mut().enumerate().skip(1) {
            *slot = self.contains_positive(d as u64);
        }
        mask
    }

    /// The graph `G(D)` induces on `[n]`.
    pub fn induced_graph(&self, n: usize) -> Result<InducedGraph> {
        if n == 0 {
            return Err(Error::Parameter("induced graph needs n >= 1".into()));
        }
        let mask = self.difference_mask(n);
        let mut adjacency = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                adjacency[a * n + b] = mask[a.abs_diff(b)];
            }
        }
        Ok(InducedGraph { n, adjacency })
    }
}

impl fmt::Display for DistanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, v: &[u64]) -> fmt::Result {
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            Self::Finite(v) => {
                f.write_str("finite:")?;
                list(f, v)
            }
            Self::Cofinite(v) => {
                f.write_str("cofinite:")?;
                list(f, v)
            }
            Self::Residue { modulus, allowed } => {
                write!(f, "residue:{modulus}:")?;
                list(f, allowed)
            }
            Self::Valuation { p, q } => write!(f, "valuation:{p}:{q}"),
            Self::Complement(inner) => write!(f, "complement({inner})"),
        }
    }
}

impl FromStr for DistanceSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let syntax = |reason: &str| Error::DistanceSetSyntax {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let parse_list = |body: &str| -> Result<Vec<u64>> {
            if body.is_empty() {
                return Ok(Vec::new());
            }
            body.split(',')
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| syntax(&format!("`{t}` is not a non-negative integer")))
                })
                .collect()
        };

        let s_trim = s.trim();
        if let Some(rest) = s_trim.strip_prefix("complement(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| syntax("missing closing parenthesis"))?;
            return Ok(Self::Complement(Box::new(inner.parse()?)));
        }
        let (kind, body) = s_trim
            .split_once(':')
            .ok_or_else(|| syntax("expected `<kind>:<parameters>`"))?;
        match kind {
            "finite" => Self::finite(parse_list(body)?),
            "cofinite" => Self::cofinite(parse_list(body)?),
            "residue" => {
                let (m, allowed) = body
                    .split_once(':')
                    .ok_or_else(|| syntax("expected `residue:<modulus>:<residues>`"))?;
                let m = m
                    .parse::<u64>()
                    .map_err(|_| syntax("modulus is not an integer"))?;
                Self::residue(m, parse_list(allowed)?)
            }
            "valuation" => {
                let (p, q) = body
                    .split_once(':')
                    .ok_or_else(|| syntax("expected `valuation:<p>:<q>`"))?;
                let p = p.parse().map_err(|_| syntax("p is not an integer"))?;
                let q = q.parse().map_err(|_| syntax("q is not an integer"))?;
                Self::valuation(p, q)
            }
            other => Err(syntax(&format!("unknown kind `{other}`"))),
        }
    }
}

impl TryFrom<String> for DistanceSet {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistanceSet> for String {
    fn from(d: DistanceSet) -> String {
        d.to_string()
    }
}

/// A distance graph restricted to `[n]`. Vertices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedGraph {
    n: usize,
    adjacency: Vec<bool>,
}

impl InducedGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        assert!((1..=self.n).contains(&a) && (1..=self.n).contains(&b));
        self.adjacency[(a - 1) * self.n + (b - 1)]
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 1..=self.n {
            for b in a + 1..=self.n {
                if self.is_adjacent(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}
