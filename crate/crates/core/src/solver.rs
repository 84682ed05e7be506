//! Exact maximum-clique search on conflict graphs.
//!
//! A conflict graph has sequences as vertices (permutations of `[n]`, or residue
//! sequences of a fixed type) and joins two of them when they are different under
//! the chosen relation. Its clique number is `T(n, D)` for permutations.
//!
//! The search is a bitset branch and bound in the style of MCQ/BBMC: candidates are
//! greedily colored in a fixed degree-descending order and a branch is cut as soon
//! as the current clique plus the color bound cannot beat the incumbent.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::CosetPartition;
use crate::distance_sets::DistanceSet;
use crate::error::{Error, Result};
use crate::perm::{all_permutations, PermFamily, Permutation, Relation};

/// Default cap on conflict-graph vertices (8! permutations).
pub const DEFAULT_MAX_VERTICES: usize = 40_320;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphLabel {
    Permutations { n: usize, relation: Relation },
    Sequences { description: String, n: usize },
}

#[derive(Debug, Clone)]
pub struct ConflictGraph {
    vertices: Vec<Vec<u32>>,
    words: usize,
    rows: Vec<u64>,
    label: GraphLabel,
    index: HashMap<Vec<u32>, usize>,
}

impl ConflictGraph {
    /// Builds a graph on `vertices` with `adjacent(u, v)` evaluated for every pair.
    pub fn from_sequences<F>(vertices: Vec<Vec<u32>>, label: GraphLabel, adjacent: F) -> Self
    where
        F: Fn(&[u32], &[u32]) -> bool + Sync,
    {
        let nv = vertices.len();
        let words = nv.div_ceil(64).max(1);
        let mut rows = vec![0u64; nv * words];
        rows.par_chunks_mut(words).enumerate().for_each(|(u, row)| {
            for v in 0..nv {
                if u != v && adjacent(&vertices[u], &vertices[v]) {
                    row[v / 64] |= 1 << (v % 64);
                }
            }
        });
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Self {
            vertices,
            words,
            rows,
            label,
            index,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &[u32] {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vec<u32>] {
        &self.vertices
    }

    pub fn label(&self) -> &GraphLabel {
        &self.label
    }

    pub fn index_of(&self, seq: &[u32]) -> Option<usize> {
        self.index.get(seq).copied()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count())
            .map(|u| self.degree(u))
            .sum::<usize>()
            / 2
    }

    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(k, &u)| {
            vs[k + 1..]
                .iter()
                .all(|&v| u != v && self.is_adjacent(u, v))
        })
    }

    pub fn complement(&self) -> Self {
        let nv = self.vertex_count();
        let mut rows = vec![0u64; self.rows.len()];
        for u in 0..nv {
            for v in 0..nv {
                if u != v && !self.is_adjacent(u, v) {
                    rows[u * self.words + v / 64] |= 1 << (v % 64);
                }
            }
        }
        Self {
            vertices: self.vertices.clone(),
            words: self.words,
            rows,
            label: self.label.clone(),
            index: self.index.clone(),
        }
    }

    /// The same graph with vertex `i` moved to slot `order[i]`.
    pub fn relabeled(&self, order: &[usize]) -> Self {
        let nv = self.vertex_count();
        assert_eq!(order.len(), nv);
        let mut vertices = vec![Vec::new(); nv];
        for (i, &slot) in order.iter().enumerate() {
            vertices[slot] = self.vertices[i].clone();
        }
        let mut rows = vec![0u64; self.rows.len()];
        for u in 0..nv {
            for v in 0..nv {
                if self.is_adjacent(u, v) {
                    let (a, b) = (order[u], order[v]);
                    rows[a * self.words + b / 64] |= 1 << (b % 64);
                }
            }
        }
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Self {
            vertices,
            words: self.words,
            rows,
            label: self.label.clone(),
            index,
        }
    }
}

/// `H_D(n)`: all permutations of `[n]` in lexicographic order, joined when different.
pub fn build_conflict_graph(
    n: usize,
    relation: &Relation,
    max_vertices: usize,
) -> Result<ConflictGraph> {
    let count = (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k));
    match count {
        Some(c) if c <= max_vertices => {}
        _ => {
            return Err(Error::CapExceeded {
                what: format!("conflict graph on the permutations of [{n}]"),
                needed: format!("{n}!"),
                cap: max_vertices as u64,
            })
        }
    }
    let table = relation.value_table(n);
    let vertices: Vec<Vec<u32>> = all_permutations(n)
        .into_iter()
        .map(Permutation::into_entries)
        .collect();
    Ok(ConflictGraph::from_sequences(
        vertices,
        GraphLabel::Permutations {
            n,
            relation: relation.clone(),
        },
        |x, y| table.differs(x, y),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_nodes: 100_000_000,
            max_time: Duration::from_secs(300),
        }
    }
}

impl Budget {
    pub fn nodes(max_nodes: u64) -> Self {
        Self {
            max_nodes,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// The search ran to completion.
    ExhaustedSearch,
    /// A supplied proper coloring; its class count was met by the clique.
    Coloring,
    /// Greedy coloring of the whole graph (search incomplete).
    GreedyColoring,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub clique_size: usize,
    /// Vertex indices, ascending.
    pub clique_witness: Vec<usize>,
    pub proof_bound: usize,
    pub bound_source: BoundSource,
    pub exact: bool,
    pub nodes: u64,
}

impl SolveResult {
    pub fn witness_sequences<'g>(&self, g: &'g ConflictGraph) -> Vec<&'g [u32]> {
        self.clique_witness.iter().map(|&i| g.vertex(i)).collect()
    }

    /// The witness of a permutation conflict graph as a family.
    pub fn witness_family(&self, g: &ConflictGraph, provenance: &str) -> Result<PermFamily> {
        let GraphLabel::Permutations { n, relation } = g.label() else {
            return Err(Error::Parameter(
                "witness family needs a permutation conflict graph".into(),
            ));
        };
        let members = self
            .clique_witness
            .iter()
            .map(|&i| Permutation::new(g.vertex(i).to_vec()))
            .collect::<Result<Vec<_>>>()?;
        PermFamily::new(*n, members, relation.clone(), provenance)
    }
}

struct Bits<'a> {
    words: usize,
    rows: &'a [u64],
}

impl Bits<'_> {
    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }
}

fn is_empty(set: &[u64]) -> bool {
    set.iter().all(|&w| w == 0)
}

fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

/// Greedy sequential coloring of `cands`, lowest index first. Returns vertices in
/// color order with their colors; vertices colored below `kmin` are left out.
fn color_sort(bits: &Bits<'_>, cands: &[u64], kmin: usize) -> (Vec<usize>, Vec<usize>) {
    let mut uncolored = cands.to_vec();
    let mut order = Vec::new();
    let mut colors = Vec::new();
    let mut q = vec![0u64; cands.len()];
    let mut k = 1;
    while !is_empty(&uncolored) {
        q.copy_from_slice(&uncolored);
        while let Some(v) = first_bit(&q) {
            uncolored[v / 64] &= !(1 << (v % 64));
            q[v / 64] &= !(1 << (v % 64));
            for (qw, nw) in q.iter_mut().zip(bits.row(v)) {
                *qw &= !nw;
            }
            if k >= kmin {
                order.push(v);
                colors.push(k);
            }
        }
        k += 1;
    }
    (order, colors)
}

struct Shared {
    best: AtomicUsize,
    witness: Mutex<Vec<usize>>,
    stop: AtomicBool,
    aborted: AtomicBool,
    nodes: AtomicU64,
    target: usize,
    budget: Budget,
    start: Instant,
}

impl Shared {
    fn offer(&self, clique: &[usize]) {
        let mut w = self.witness.lock().expect("witness lock");
        if clique.len() > w.len() {
            *w = clique.to_vec();
            self.best.store(clique.len(), Ordering::SeqCst);
            if clique.len() >= self.target {
                self.stop.store(true, Ordering::SeqCst);
            }
        }
    }

    fn tick(&self) -> bool {
        let nodes = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if nodes > self.budget.max_nodes
            || (nodes.is_multiple_of(1024) && self.start.elapsed() > self.budget.max_time)
        {
            self.aborted.store(true, Ordering::SeqCst);
            self.stop.store(true, Ordering::SeqCst);
        }
        self.stop.load(Ordering::Relaxed)
    }
}

fn expand(bits: &Bits<'_>, shared: &Shared, clique: &mut Vec<usize>, mut cands: Vec<u64>) {
    if shared.tick() {
        return;
    }
    let best = shared.best.load(Ordering::Relaxed);
    let kmin = (best + 1).saturating_sub(clique.len()).max(1);
    let (order, colors) = color_sort(bits, &cands, kmin);
    for idx in (0..order.len()).rev() {
        if clique.len() + colors[idx] <= shared.best.load(Ordering::Relaxed)
            || shared.stop.load(Ordering::Relaxed)
        {
            return;
        }
        let v = order[idx];
        clique.push(v);
        let next: Vec<u64> = cands.iter().zip(bits.row(v)).map(|(a, b)| a & b).collect();
        if is_empty(&next) {
            shared.offer(clique);
        } else {
            expand(bits, shared, clique, next);
        }
        clique.pop();
        cands[v / 64] &= !(1 << (v % 64));
    }
}

/// Options beyond the budget: worker count and an optional known upper bound that
/// lets the search stop as soon as a clique reaches it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: Budget,
    pub workers: usize,
    pub upper_bound: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: Budget::default(),
            workers: 1,
            upper_bound: None,
        }
    }
}

/// Maximum clique by branch and bound. Always returns a valid clique; `exact` is
/// false only when the budget ran out.
pub fn max_clique(g: &ConflictGraph, budget: Budget) -> SolveResult {
    max_clique_with(
        g,
        SearchOptions {
            budget,
            ..SearchOptions::default()
        },
    )
}

pub fn max_clique_with(g: &ConflictGraph, opts: SearchOptions) -> SolveResult {
    let nv = g.vertex_count();
    if nv == 0 {
        return SolveResult {
            clique_size: 0,
            clique_witness: Vec::new(),
            proof_bound: 0,
            bound_source: BoundSource::ExhaustedSearch,
            exact: true,
            nodes: 0,
        };
    }

    // Relabel so that local index order is degree-descending, ties by index.
    let mut order: Vec<usize> = (0..nv).collect();
    let degrees: Vec<usize> = (0..nv).map(|u| g.degree(u)).collect();
    order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
    let words = g.words;
    let mut rows = vec![0u64; nv * words];
    let mut local_of = vec![0usize; nv];
    for (l, &u) in order.iter().enumerate() {
        local_of[u] = l;
    }
    for (l, &u) in order.iter().enumerate() {
        for v in 0..nv {
            if g.is_adjacent(u, v) {
                let lv = local_of[v];
                rows[l * words + lv / 64] |= 1 << (lv % 64);
            }
        }
    }
    let bits = Bits { words, rows: &rows };

    // Greedy initial clique along the ordering.
    let mut greedy: Vec<usize> = Vec::new();
    for l in 0..nv {
        if greedy
            .iter()
            .all(|&c| bits.row(c)[l / 64] >> (l % 64) & 1 == 1)
        {
            greedy.push(l);
        }
    }

    let mut all = vec![0u64; words];
    for l in 0..nv {
        all[l / 64] |= 1 << (l % 64);
    }
    let (_, full_colors) = color_sort(&bits, &all, 1);
    let greedy_bound = full_colors.iter().copied().max().unwrap_or(0);
    let target = opts.upper_bound.unwrap_or(usize::MAX).min(greedy_bound);

    let shared = Shared {
        best: AtomicUsize::new(0),
        witness: Mutex::new(Vec::new()),
        stop: AtomicBool::new(false),
        aborted: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
        target,
        budget: opts.budget,
        start: Instant::now(),
    };
    shared.offer(&greedy);

    if !shared.stop.load(Ordering::SeqCst) {
        if opts.workers <= 1 {
            expand(&bits, &shared, &mut Vec::new(), all);
        } else {
            shared.tick();
            let (root_order, root_colors) = color_sort(&bits, &all, 1);
            // Candidate set of root branch idx: all vertices not yet branched on.
            let mut tasks = Vec::with_capacity(root_order.len());
            let mut remaining = all.clone();
            for idx in (0..root_order.len()).rev() {
                let v = root_order[idx];
                let next: Vec<u64> = remaining
                    .iter()
                    .zip(bits.row(v))
                    .map(|(a, b)| a & b)
                    .collect();
                tasks.push((v, root_colors[idx], next));
                remaining[v / 64] &= !(1 << (v % 64));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(opts.workers)
                .build()
                .expect("thread pool");
            pool.install(|| {
                tasks.into_par_iter().for_each(|(v, color, next)| {
                    if color <= shared.best.load(Ordering::Relaxed)
                        || shared.stop.load(Ordering::Relaxed)
                    {
                        return;
                    }
                    let mut clique = vec![v];
                    if is_empty(&next) {
                        shared.offer(&clique);
                    } else {
                        expand(&bits, &shared, &mut clique, next);
                    }
                });
            });
        }
    }

    let aborted = shared.aborted.load(Ordering::SeqCst);
    let mut witness: Vec<usize> = shared
        .witness
        .into_inner()
        .expect("witness lock")
        .into_iter()
        .map(|l| order[l])
        .collect();
    witness.sort_unstable();
    let size = witness.len();
    let reached_target = size >= target;
    let (exact, bound, source) = if reached_target {
        let source = if opts.upper_bound == Some(size) {
            BoundSource::Coloring
        } else if size == greedy_bound {
            BoundSource::GreedyColoring
        } else {
            BoundSource::ExhaustedSearch
        };
        (true, size, source)
    } else if !aborted {
        (true, size, BoundSource::ExhaustedSearch)
    } else {
        match opts.upper_bound {
            Some(u) if u < greedy_bound => (false, u, BoundSource::Coloring),
            _ => (false, greedy_bound, BoundSource::GreedyColoring),
        }
    };
    SolveResult {
        clique_size: size,
        clique_witness: witness,
        proof_bound: bound,
        bound_source: source,
        exact,
        nodes: shared.nodes.load(Ordering::SeqCst),
    }
}

/// Max clique seeded with a proper coloring given as vertex-index classes.
///
/// The classes must cover every vertex exactly once and each must be independent;
/// their count is then an upper bound and the search stops once a clique meets it.
pub fn max_clique_with_classes(
    g: &ConflictGraph,
    classes: &[Vec<usize>],
    budget: Budget,
) -> Result<SolveResult> {
    let mut seen = vec![false; g.vertex_count()];
    for (b, class) in classes.iter().enumerate() {
        for (k, &u) in class.iter().enumerate() {
            if u >= seen.len() || std::mem::replace(&mut seen[u], true) {
                return Err(Error::Parameter(format!(
                    "coloring class {b} repeats or misplaces vertex {u}"
                )));
            }
            if let Some(&v) = class[k + 1..].iter().find(|&&v| g.is_adjacent(u, v)) {
                return Err(Error::InvalidColoring { block: b, u, v });
            }
        }
    }
    if let Some(u) = seen.iter().position(|s| !s) {
        return Err(Error::Parameter(format!("coloring misses vertex {u}")));
    }
    Ok(max_clique_with(
        g,
        SearchOptions {
            budget,
            workers: 1,
            upper_bound: Some(classes.len()),
        },
    ))
}

/// Max clique seeded with the coset coloring of the same `n`.
pub fn max_clique_with_coloring_bound(
    g: &ConflictGraph,
    coloring: &CosetPartition,
    budget: Budget,
) -> Result<SolveResult> {
    let classes = coloring
        .blocks()
        .iter()
        .map(|block| {
            block
                .iter()
                .map(|p| {
                    g.index_of(p.entries()).ok_or_else(|| {
                        Error::Parameter(format!("coloring vertex {p} is not in the graph"))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    max_clique_with_classes(g, &classes, budget)
}

/// Independence number as the clique number of the complement.
pub fn independence_number(g: &ConflictGraph, budget: Budget) -> SolveResult {
    max_clique(&g.complement(), budget)
}

/// Exact `T(n, D)` with a witness family; fails if the search does not finish.
pub fn exact_family(n: usize, d: &DistanceSet, budget: Budget) -> Result<PermFamily> {
    let g = build_conflict_graph(n, &d.clone().into(), DEFAULT_MAX_VERTICES)?;
    let r = max_clique(&g, budget);
    if !r.exact {
        return Err(Error::Parameter(format!(
            "search for T({n}, {d}) did not finish within the budget"
        )));
    }
    r.witness_family(&g, "solver")
}
