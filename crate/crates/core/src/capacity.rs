//! Residue graphs and capacity within a type.
//!
//! A residue graph on the natural numbers joins `a` and `b` exactly when their
//! residues mod `r` are joined in a finite quotient graph `M` on `{0, ..., r-1}`.
//! Cliques of `M^n` restricted to the type `Q_n` realized by the residues of
//! `1..=n` lift to permutation families and back.

use std::fmt;
use std::str::FromStr;

use crate::arith::{log2_big, multinomial};
use crate::distance_sets::DistanceSet;
use crate::error::{Error, Result};
use crate::perm::{next_permutation, PermFamily, Permutation, Relation};
use crate::solver::{max_clique, Budget, ConflictGraph, GraphLabel, SolveResult};

/// `(1/2) log2 5`, the Shannon capacity of the pentagon.
pub const PENTAGON_CAPACITY_REFERENCE: f64 = 1.160_964_047_443_681;

/// Default cap on the number of sequences enumerated for a clique search.
pub const DEFAULT_MAX_SEQUENCES: u64 = 40_320;

/// A finite simple graph on `{0, ..., r-1}`, `r >= 2`.
///
/// Grammar: `cycle:5`, `path:4`, `complete:3`, `empty:2`, `edges:4:0-1,2-3`.
/// Display always uses the `edges:` form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientGraph {
    r: usize,
    adj: Vec<bool>,
}

impl QuotientGraph {
    pub fn from_edges(r: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if r < 2 {
            return Err(Error::QuotientGraph(format!(
                "modulus must be at least 2, got {r}"
            )));
        }
        let mut adj = vec![false; r * r];
        for &(a, b) in edges {
            if a >= r || b >= r {
                return Err(Error::QuotientGraph(format!(
                    "edge {a}-{b} leaves {{0..{}}}",
                    r - 1
                )));
            }
            if a == b {
                return Err(Error::QuotientGraph(format!("loop at {a}")));
            }
            adj[a * r + b] = true;
            adj[b * r + a] = true;
        }
        Ok(Self { r, adj })
    }

    pub fn cycle(r: usize) -> Result<Self> {
        if r < 3 {
            return Err(Error::QuotientGraph(
                "cycles need at least 3 vertices".into(),
            ));
        }
        let edges: Vec<_> = (0..r).map(|a| (a, (a + 1) % r)).collect();
        Self::from_edges(r, &edges)
    }

    pub fn path(r: usize) -> Result<Self> {
        let edges: Vec<_> = (1..r).map(|a| (a - 1, a)).collect();
        Self::from_edges(r, &edges)
    }

    pub fn complete(r: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for a in 0..r {
            for b in a + 1..r {
                edges.push((a, b));
            }
        }
        Self::from_edges(r, &edges)
    }

    pub fn empty(r: usize) -> Result<Self> {
        Self::from_edges(r, &[])
    }

    /// The modulus `r`.
    pub fn order(&self) -> usize {
        self.r
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.r + b]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.r {
            for b in a + 1..self.r {
                if self.is_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Adjacency of the natural numbers `a` and `b` in the residue graph.
    pub fn numbers_adjacent(&self, a: u64, b: u64) -> bool {
        let r = self.r as u64;
        self.is_edge((a % r) as usize, (b % r) as usize)
    }

    /// True iff `x` and `y` carry an edge of `M` at some coordinate.
    pub fn sequences_different(&self, x: &[u32], y: &[u32]) -> bool {
        x.iter()
            .zip(y)
            .any(|(&a, &b)| self.is_edge(a as usize, b as usize))
    }

    /// If adjacency depends only on the difference mod `r`, the residue graph is the
    /// distance graph of the returned residue set.
    pub fn as_distance_set(&self) -> Option<DistanceSet> {
        let r = self.r;
        let allowed: Vec<u64> = (1..r)
            .filter(|&d| self.is_edge(0, d))
            .map(|d| d as u64)
            .collect();
        for a in 0..r {
            for b in 0..r {
                let d = (b + r - a) % r;
                if self.is_edge(a, b) != (d != 0 && self.is_edge(0, d)) {
                    return None;
                }
            }
        }
        DistanceSet::residue(r as u64, allowed).ok()
    }

    /// Connected and 2-regular on five vertices.
    pub fn is_pentagon(&self) -> bool {
        if self.r != 5 || (0..5).any(|a| (0..5).filter(|&b| self.is_edge(a, b)).count() != 2) {
            return false;
        }
        let mut seen = [false; 5];
        let mut stack = vec![0];
        while let Some(a) = stack.pop() {
            if std::mem::replace(&mut seen[a], true) {
                continue;
            }
            stack.extend((0..5).filter(|&b| self.is_edge(a, b) && !seen[b]));
        }
        seen.iter().all(|&s| s)
    }

    /// Replaces vertex `a` by an independent set of `weights[a]` copies.
    pub fn blow_up(&self, weights: &[usize]) -> Result<Self> {
        if weights.len() != self.r || weights.contains(&0) {
            return Err(Error::QuotientGraph(
                "blow-up needs one positive weight per vertex".into(),
            ));
        }
        let owner: Vec<usize> = weights
            .iter()
            .enumerate()
            .flat_map(|(a, &w)| std::iter::repeat_n(a, w))
            .collect();
        let mut edges = Vec::new();
        for i in 0..owner.len() {
            for j in i + 1..owner.len() {
                if self.is_edge(owner[i], owner[j]) {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(owner.len(), &edges)
    }
}

/// Co-normal product: `(x1, y1) ~ (x2, y2)` iff `x1 ~ x2` in `a` or `y1 ~ y2` in `b`.
/// Vertex `(x, y)` gets index `x * |b| + y`.
pub fn conormal_product(a: &QuotientGraph, b: &QuotientGraph) -> QuotientGraph {
    let (ra, rb) = (a.order(), b.order());
    let r = ra * rb;
    let mut adj = vec![false; r * r];
    for u in 0..r {
        for v in 0..r {
            let (x1, y1, x2, y2) = (u / rb, u % rb, v / rb, v % rb);
            adj[u * r + v] = a.is_edge(x1, x2) || b.is_edge(y1, y2);
        }
    }
    QuotientGraph { r, adj }
}

impl fmt::Display for QuotientGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "edges:{}:", self.r)?;
        for (k, (a, b)) in self.edges().iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

impl FromStr for QuotientGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::QuotientGraph(format!("cannot parse `{s}`: {why}"));
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| bad("expected `<kind>:<args>`"))?;
        let size = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| bad("size is not an integer"))
        };
        match kind {
            "cycle" => Self::cycle(size(body)?),
            "path" => Self::path(size(body)?),
            "complete" => Self::complete(size(body)?),
            "empty" => Self::empty(size(body)?),
            "edges" => {
                let (r, list) = body.split_once(':').unwrap_or((body, ""));
                let r = size(r)?;
                let edges = list
                    .split(',')
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        let (a, b) = t.split_once('-').ok_or_else(|| bad("edge is not `a-b`"))?;
                        Ok((size(a)?, size(b)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_edges(r, &edges)
            }
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }
}

/// Symbol counts of a sequence over `{0, ..., r-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeVector {
    pub counts: Vec<usize>,
}

impl TypeVector {
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn frequency(&self, a: usize) -> f64 {
        self.counts[a] as f64 / self.n() as f64
    }
}

pub fn type_of(x: &[u32], r: usize) -> Result<TypeVector> {
    let mut counts = vec![0; r];
    for &a in x {
        *counts
            .get_mut(a as usize)
            .ok_or_else(|| Error::Parameter(format!("symbol {a} outside 0..{r}")))? += 1;
    }
    Ok(TypeVector { counts })
}

/// `Q_n`: the type of the residues of `1, ..., n` mod `r`.
pub fn residue_type(r: usize, n: usize) -> TypeVector {
    let mut counts = vec![0; r];
    for i in 1..=n {
        counts[i % r] += 1;
    }
    TypeVector { counts }
}

/// Residues of `1..=n` in order.
pub fn residues_of_range(r: usize, n: usize) -> Vec<u32> {
    (1..=n).map(|i| (i % r) as u32).collect()
}

/// All length-`n` sequences of type `Q_n`, in lexicographic order.
pub fn typed_vertex_set(m: &QuotientGraph, n: usize, cap: u64) -> Result<Vec<Vec<u32>>> {
    let q = residue_type(m.order(), n);
    let parts: Vec<u64> = q.counts.iter().map(|&c| c as u64).collect();
    let size = multinomial(&parts);
    if size > cap.into() {
        return Err(Error::CapExceeded {
            what: format!("sequences of type Q_{n} over {} symbols", m.order()),
            needed: size.to_string(),
            cap,
        });
    }
    let mut cur = residues_of_range(m.order(), n);
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    Ok(out)
}

/// All `r^n` sequences, in lexicographic order.
pub fn all_sequences(r: usize, n: usize, cap: u64) -> Result<Vec<Vec<u32>>> {
    let total = (r as u64).checked_pow(n as u32);
    if total.is_none_or(|t| t > cap) {
        return Err(Error::CapExceeded {
            what: format!("all sequences of length {n} over {r} symbols"),
            needed: format!("{r}^{n}"),
            cap,
        });
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        out.push(cur.clone());
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            cur[k] += 1;
            if (cur[k] as usize) < r {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Graph of `M`-different sequences on the given vertex set.
pub fn sequence_graph(m: &QuotientGraph, n: usize, vertices: Vec<Vec<u32>>) -> ConflictGraph {
    let description = format!("{m}");
    ConflictGraph::from_sequences(
        vertices,
        GraphLabel::Sequences { description, n },
        |x, y| m.sequences_different(x, y),
    )
}

/// A clique search over sequences together with its graph.
#[derive(Debug, Clone)]
pub struct SequenceClique {
    pub graph: ConflictGraph,
    pub result: SolveResult,
}

impl SequenceClique {
    pub fn sequences(&self) -> Vec<Vec<u32>> {
        self.result
            .witness_sequences(&self.graph)
            .into_iter()
            .map(<[u32]>::to_vec)
            .collect()
    }
}

/// Maximum clique of `M^n` restricted to sequences of type `Q_n`.
pub fn typed_max_clique(m: &QuotientGraph, n: usize, budget: Budget) -> Result<SequenceClique> {
    let graph = sequence_graph(m, n, typed_vertex_set(m, n, DEFAULT_MAX_SEQUENCES)?);
    let result = max_clique(&graph, budget);
    Ok(SequenceClique { graph, result })
}

/// Maximum clique of the full co-normal power `M^n`.
pub fn power_max_clique(m: &QuotientGraph, n: usize, budget: Budget) -> Result<SequenceClique> {
    let graph = sequence_graph(m, n, all_sequences(m.order(), n, DEFAULT_MAX_SEQUENCES)?);
    let result = max_clique(&graph, budget);
    Ok(SequenceClique { graph, result })
}

/// Replaces the occurrences of each residue `a` by the numbers `≡ a (mod r)` in `[n]`,
/// left to right in increasing order.
pub fn lift_sequence(x: &[u32], r: usize) -> Result<Permutation> {
    let n = x.len();
    let expected = residue_type(r, n);
    if type_of(x, r)? != expected {
        return Err(Error::WrongType {
            sequence: x.to_vec(),
            expected: expected.counts,
        });
    }
    let mut next: Vec<u32> = (0..r)
        .map(|a| if a == 0 { r as u32 } else { a as u32 })
        .collect();
    let entries = x
        .iter()
        .map(|&a| {
            let v = next[a as usize];
            next[a as usize] += r as u32;
            v
        })
        .collect();
    Permutation::new(entries)
}

pub fn lift_to_permutations(
    clique: &[Vec<u32>],
    m: &QuotientGraph,
    n: usize,
) -> Result<PermFamily> {
    let members = clique
        .iter()
        .map(|x| {
            if x.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: x.len(),
                });
            }
            lift_sequence(x, m.order())
        })
        .collect::<Result<Vec<_>>>()?;
    PermFamily::new(n, members, Relation::Quotient(m.clone()), "typed-lift")
}

/// Replaces every value by its residue mod `r`.
pub fn project_to_residues(family: &PermFamily, m: &QuotientGraph) -> Vec<Vec<u32>> {
    let r = m.order() as u32;
    family
        .members()
        .iter()
        .map(|p| p.entries().iter().map(|&v| v % r).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub n: usize,
    pub omega: usize,
    pub exact: bool,
    pub proof_bound: usize,
    /// `(1/n) log2 omega`.
    pub rate: f64,
    /// `log2 chi(M)`, the per-coordinate ceiling on any rate.
    pub chromatic_ceiling: f64,
    /// Literature capacity when `M` is the pentagon.
    pub reference: Option<f64>,
}

pub fn capacity_profile(
    m: &QuotientGraph,
    ns: &[usize],
    budget: Budget,
) -> Result<Vec<ProfileRow>> {
    let chi = crate::bounds::chromatic_number(m)?;
    let reference = m.is_pentagon().then_some(PENTAGON_CAPACITY_REFERENCE);
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::Parameter("profile lengths must be positive".into()));
            }
            let c = typed_max_clique(m, n, budget)?;
            let omega = c.result.clique_size;
            Ok(ProfileRow {
                n,
                omega,
                exact: c.result.exact,
                proof_bound: c.result.proof_bound,
                rate: log2_big(&omega.into()) / n as f64,
                chromatic_ceiling: (chi as f64).log2(),
                reference,
            })
        })
        .collect()
}
