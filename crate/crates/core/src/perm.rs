//! Permutations of `[n]`, the G-different relation and family verification.
//!
//! Positions and values are 1-based. Two permutations `x` and `y` are
//! G-different when some position `i` puts an edge of `G` on `{x_i, y_i}`.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::QuotientGraph;
use crate::distance_sets::DistanceSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    /// Checks that `entries` is a bijection of `[n]`, `n = entries.len()`.
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n + 1];
        for &v in &entries {
            let idx = v as usize;
            if idx == 0 || idx > n {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("value {v} is outside [1, {n}]"),
                });
            }
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("value {v} repeats"),
                });
            }
        }
        Ok(Self(entries))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<u32>) -> Self {
        debug_assert!(Self::new(entries.clone()).is_ok());
        Self(entries)
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.0
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    /// 1-based position of value `v`.
    pub fn position_of(&self, v: u32) -> Option<usize> {
        self.0.iter().position(|&x| x == v).map(|p| p + 1)
    }

    /// Rotates the sequence by `k` places to the right: `((3,1,2), 1) -> (2,3,1)`.
    pub fn cyclic_shift(&self, k: i64) -> Self {
        let n = self.0.len();
        if n == 0 {
            return self.clone();
        }
        let k = k.rem_euclid(n as i64) as usize;
        let mut out = self.0.clone();
        out.rotate_right(k);
        Self(out)
    }

    /// Exchanges the values `i` and `j` wherever they stand.
    pub fn sigma_swap(&self, i: u32, j: u32) -> Result<Self> {
        let n = self.0.len();
        for v in [i, j] {
            if v == 0 || v as usize > n {
                return Err(Error::ValueOutOfRange { value: v as i64, n });
            }
        }
        let out = self
            .0
            .iter()
            .map(|&x| {
                if x == i {
                    j
                } else if x == j {
                    i
                } else {
                    x
                }
            })
            .collect();
        Ok(Self(out))
    }

    /// Lexicographic rank among all permutations of `[n]` (0-based).
    pub fn lex_rank(&self) -> usize {
        lex_rank(&self.0)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::FamilyFormat(format!("`{t}` is not an entry")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

/// Lexicographic rank of a sequence of distinct values `1..=n`.
pub fn lex_rank(seq: &[u32]) -> usize {
    let n = seq.len();
    let mut used = vec![false; n + 1];
    let mut fact = vec![1usize; n + 1];
    for k in 1..=n {
        fact[k] = fact[k - 1].saturating_mul(k);
    }
    let mut rank = 0usize;
    for (i, &v) in seq.iter().enumerate() {
        let smaller = (1..v as usize).filter(|&u| !used[u]).count();
        rank += smaller * fact[n - 1 - i];
        used[v as usize] = true;
    }
    rank
}

/// Steps `a` to its lexicographic successor; returns false at the last permutation.
pub fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let Some(i) = (0..a.len() - 1).rfind(|&i| a[i] < a[i + 1]) else {
        return false;
    };
    let j = a.iter().rposition(|x| *x > a[i]).expect("successor exists");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// All permutations of `[n]` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<u32> = (1..=n as u32).collect();
    let mut out = vec![Permutation(cur.clone())];
    while next_permutation(&mut cur) {
        out.push(Permutation(cur.clone()));
    }
    out
}

/// `Psi^j`: put `n` first, copy `pi` into the remaining slots and place `n - 1`
/// at position `j`.
///
/// `r_1 = n`, `r_i = pi_{i-1}` for `1 < i < j`, `r_j = n - 1`, `r_i = pi_{i-2}` for `j < i <= n`.
pub fn psi_insert(pi: &Permutation, j: usize, n: usize) -> Result<Permutation> {
    if n < 2 || pi.len() != n - 2 {
        return Err(Error::Parameter(format!(
            "psi_insert needs a permutation of [n-2] = [{}], got length {}",
            n.saturating_sub(2),
            pi.len()
        )));
    }
    if !(2..=n).contains(&j) {
        return Err(Error::PositionOutOfRange {
            position: j,
            lo: 2,
            hi: n,
        });
    }
    let mut out = Vec::with_capacity(n);
    out.push(n as u32);
    out.extend_from_slice(&pi.0[..j - 2]);
    out.push(n as u32 - 1);
    out.extend_from_slice(&pi.0[j - 2..]);
    Ok(Permutation(out))
}

/// A symbol of `A = odds ∪ {⋆}` as used by the hookup construction. `Star` sorts last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Value(u32),
    Star,
}

/// Parity of the arrangement `xs` relative to the sorted order of its symbols.
pub fn is_even_permutation<T: Ord>(xs: &[T]) -> Result<bool> {
    let mut inversions = 0usize;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            match xs[i].cmp(&xs[j]) {
                std::cmp::Ordering::Equal => return Err(Error::RepeatedSymbol),
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Ok(inversions.is_multiple_of(2))
}

/// The adjacency rule of an infinite graph on the natural numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Relation {
    /// Distance graph `G(D)`.
    Distance(DistanceSet),
    /// Residue graph over a finite quotient.
    Quotient(QuotientGraph),
}

impl Relation {
    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        match self {
            Self::Distance(d) => a != b && d.contains_positive(a.abs_diff(b) as u64),
            Self::Quotient(m) => m.numbers_adjacent(a as u64, b as u64),
        }
    }

    /// Adjacency among values `0..=n` as a flat `(n+1) x (n+1)` table.
    pub fn value_table(&self, n: usize) -> ValueTable {
        let w = n + 1;
        let mut cells = vec![false; w * w];
        match self {
            Self::Distance(d) => {
                let mask = d.difference_mask(n);
                for a in 0..w {
                    for b in 0..w {
                        cells[a * w + b] = mask[a.abs_diff(b)];
                    }
                }
            }
            Self::Quotient(_) => {
                for a in 0..w {
                    for b in 0..w {
                        cells[a * w + b] = self.adjacent(a as u32, b as u32);
                    }
                }
            }
        }
        ValueTable { width: w, cells }
    }
}

impl From<DistanceSet> for Relation {
    fn from(d: DistanceSet) -> Self {
        Self::Distance(d)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Distance(d) => write!(f, "{d}"),
            Self::Quotient(m) => write!(f, "quotient({m})"),
        }
    }
}

impl FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("quotient(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::QuotientGraph(format!("missing `)` in `{s}`")))?;
            return Ok(Self::Quotient(inner.parse()?));
        }
        Ok(Self::Distance(s.parse()?))
    }
}

impl TryFrom<String> for Relation {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Relation> for String {
    fn from(r: Relation) -> String {
        r.to_string()
    }
}

/// Precomputed value adjacency for the verification inner loops.
#[derive(Debug, Clone)]
pub struct ValueTable {
    width: usize,
    cells: Vec<bool>,
}

impl ValueTable {
    #[inline]
    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        self.cells[a as usize * self.width + b as usize]
    }

    #[inline]
    pub fn differs(&self, x: &[u32], y: &[u32]) -> bool {
        x.iter().zip(y).any(|(&a, &b)| self.adjacent(a, b))
    }
}

/// True iff some position carries a difference in `d`.
pub fn g_different(x: &Permutation, y: &Permutation, d: &DistanceSet) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.0
        .iter()
        .zip(&y.0)
        .any(|(&a, &b)| a != b && d.contains_positive(a.abs_diff(b) as u64)))
}

/// A deduplicated set of permutations of `[n]` in canonical (sorted) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermFamily {
    n: usize,
    members: Vec<Permutation>,
    relation: Relation,
    provenance: String,
}

impl PermFamily {
    pub fn new(
        n: usize,
        mut members: Vec<Permutation>,
        relation: impl Into<Relation>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let provenance = provenance.into();
        if provenance.is_empty() || provenance.chars().any(char::is_whitespace) {
            return Err(Error::FamilyFormat(format!(
                "provenance label `{provenance}` must be non-empty without whitespace"
            )));
        }
        if let Some(bad) = members.iter().find(|m| m.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: bad.len(),
            });
        }
        members.par_sort_unstable();
        members.dedup();
        Ok(Self {
            n,
            members,
            relation: relation.into(),
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Permutation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn claimed_size(&self) -> BigUint {
        BigUint::from(self.members.len())
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.members.binary_search(p).is_ok()
    }

    /// Writes the family file: one header line, then one permutation per line.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "n={} D={} provenance={} size={}",
            self.n,
            self.relation,
            self.provenance,
            self.members.len()
        )?;
        for m in &self.members {
            writeln!(w, "{m}")?;
        }
        Ok(())
    }

    pub fn to_file_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("family files are ASCII")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::FamilyFormat("empty input".into()))?
            .map_err(|e| Error::FamilyFormat(e.to_string()))?;
        let mut n = None;
        let mut relation = None;
        let mut provenance = None;
        let mut size = None;
        for field in header.split(' ') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::FamilyFormat(format!("bad header field `{field}`")))?;
            match key {
                "n" => n = value.parse::<usize>().ok(),
                "D" => relation = Some(value.parse::<Relation>()?),
                "provenance" => provenance = Some(value.to_string()),
                "size" => size = value.parse::<usize>().ok(),
                other => return Err(Error::FamilyFormat(format!("unknown header key `{other}`"))),
            }
        }
        let (Some(n), Some(relation), Some(provenance), Some(size)) =
            (n, relation, provenance, size)
        else {
            return Err(Error::FamilyFormat(
                "header must carry n=, D=, provenance= and size=".into(),
            ));
        };
        let mut members = Vec::with_capacity(size);
        for line in lines {
            let line = line.map_err(|e| Error::FamilyFormat(e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            members.push(line.parse::<Permutation>()?);
        }
        if members.len() != size {
            return Err(Error::FamilyFormat(format!(
                "header claims size={size} but {} permutations follow",
                members.len()
            )));
        }
        let family = Self::new(n, members, relation, provenance)?;
        if family.len() != size {
            return Err(Error::FamilyFormat("duplicate permutations in file".into()));
        }
        Ok(family)
    }

    /// Members flattened into one contiguous buffer, `n` entries per member.
    pub(crate) fn flat(&self) -> Vec<u32> {
        let mut buf = Vec::with_capacity(self.members.len() * self.n);
        for m in &self.members {
            buf.extend_from_slice(&m.0);
        }
        buf
    }
}

impl FromStr for PermFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::read_from(s.as_bytes())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    /// `pairs` uniformly random unordered pairs drawn with a seeded generator.
    Sampled {
        pairs: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyStatus {
    AllPairsValid,
    FailureWitness,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub status: VerifyStatus,
    pub witness: Option<(Permutation, Permutation)>,
    pub pairs_checked: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.status != VerifyStatus::FailureWitness
    }
}

/// Checks that the members of `family` are pairwise different under `relation`.
///
/// Exhaustive mode reports the lexicographically first failing pair, so the result
/// does not depend on how rows are scheduled across threads.
pub fn verify_family(family: &PermFamily, relation: &Relation, mode: VerifyMode) -> VerifyReport {
    let m = family.len();
    let n = family.n();
    if m < 2 {
        return VerifyReport {
            status: VerifyStatus::AllPairsValid,
            witness: None,
            pairs_checked: 0,
        };
    }
    let table = relation.value_table(n);
    let flat = family.flat();
    let row = |i: usize| &flat[i * n..(i + 1) * n];
    let total = (m as u64) * (m as u64 - 1) / 2;

    match mode {
        VerifyMode::Exhaustive => {
            let failure = (0..m).into_par_iter().find_map_first(|i| {
                let x = row(i);
                (i + 1..m)
                    .find(|&j| !table.differs(x, row(j)))
                    .map(|j| (i, j))
            });
            match failure {
                None => VerifyReport {
                    status: VerifyStatus::AllPairsValid,
                    witness: None,
                    pairs_checked: total,
                },
                Some((i, j)) => {
                    let (i64_, j64) = (i as u64, j as u64);
                    let before = i64_ * (m as u64) - i64_ * (i64_ + 1) / 2;
                    VerifyReport {
                        status: VerifyStatus::FailureWitness,
                        witness: Some((family.members[i].clone(), family.members[j].clone())),
                        pairs_checked: before + (j64 - i64_),
                    }
                }
            }
        }
        VerifyMode::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for k in 0..pairs {
                let i = rng.gen_range(0..m);
                let mut j = rng.gen_range(0..m - 1);
                if j >= i {
                    j += 1;
                }
                if !table.differs(row(i), row(j)) {
                    let (a, b) = (i.min(j), i.max(j));
                    return VerifyReport {
                        status: VerifyStatus::FailureWitness,
                        witness: Some((family.members[a].clone(), family.members[b].clone())),
                        pairs_checked: k + 1,
                    };
                }
            }
            VerifyReport {
                status: VerifyStatus::Sampled,
                witness: None,
                pairs_checked: pairs,
            }
        }
    }
}

/// A pair of members and a position whose difference falls outside `{0} ∪ D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateViolation {
    pub left: Permutation,
    pub right: Permutation,
    pub position: usize,
    pub difference: u32,
}

/// Finds a violation of the positionwise property: every pair of members differs
/// at every position by 0 or by an element of `d`.
///
/// Runs per column: the property holds iff, at each position, any two distinct values
/// that occur there (in any members) differ by an element of `d`.
pub fn strong_certificate_violation(
    family: &PermFamily,
    d: &DistanceSet,
) -> Option<CertificateViolation> {
    let n = family.n();
    let mask = d.difference_mask(n);
    for pos in 0..n {
        // first member index carrying each value at this position
        let mut first = vec![usize::MAX; n + 1];
        for (idx, m) in family.members.iter().enumerate() {
            let v = m.0[pos] as usize;
            if first[v] == usize::MAX {
                first[v] = idx;
            }
        }
        let present: Vec<usize> = (1..=n).filter(|&v| first[v] != usize::MAX).collect();
        for (k, &a) in present.iter().enumerate() {
            for &b in &present[k + 1..] {
                if !mask[b - a] {
                    let (i, j) = (first[a].min(first[b]), first[a].max(first[b]));
                    return Some(CertificateViolation {
                        left: family.members[i].clone(),
                        right: family.members[j].clone(),
                        position: pos + 1,
                        difference: (b - a) as u32,
                    });
                }
            }
        }
    }
    None
}

pub fn verify_strong_certificate(family: &PermFamily, d: &DistanceSet) -> bool {
    strong_certificate_violation(family, d).is_none()
}
