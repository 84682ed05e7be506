//! Explicit families of pairwise different permutations.
//!
//! Every construction returns a [`PermFamily`] whose size is known in closed form
//! (see [`crate::bounds`]) and whose pairwise property can be checked independently
//! with [`crate::perm::verify_family`].

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::arith;
use crate::bounds;
use crate::distance_sets::DistanceSet;
use crate::error::{Error, Result};
use crate::perm::{
    all_permutations, is_even_permutation, next_permutation, psi_insert, verify_family, PermFamily,
    Permutation, Relation, Symbol, VerifyMode,
};

/// Families larger than this are refused; counting functions remain available.
pub const DEFAULT_MAX_MEMBERS: u64 = 2_000_000;

/// Largest `n` for which [`coset_partition`] materializes `S_n`.
pub const MAX_COSET_N: usize = 8;

fn check_cap(what: &str, size: &BigUint, cap: u64) -> Result<()> {
    if *size > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            what: what.to_string(),
            needed: size.to_string(),
            cap,
        });
    }
    Ok(())
}

fn not_one() -> DistanceSet {
    DistanceSet::Complement(Box::new(DistanceSet::Finite(vec![1])))
}

/// All sequences obtained by filling each position block with one of its options.
///
/// `factors[k] = (positions, options)`: every option lists values for `positions`
/// in order. Together the blocks must cover `0..n` exactly once.
fn fill_product(n: usize, factors: &[(Vec<usize>, Vec<Vec<u32>>)]) -> Vec<Permutation> {
    if factors.iter().any(|(_, opts)| opts.is_empty()) {
        return Vec::new();
    }
    let total: usize = factors.iter().map(|(_, o)| o.len()).product();
    let mut out = Vec::with_capacity(total);
    let mut counter = vec![0usize; factors.len()];
    let mut buf = vec![0u32; n];
    loop {
        for (k, (positions, opts)) in factors.iter().enumerate() {
            for (&pos, &v) in positions.iter().zip(&opts[counter[k]]) {
                buf[pos] = v;
            }
        }
        out.push(Permutation::from_vec_unchecked(buf.clone()));
        // odometer, last factor fastest
        let mut k = factors.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            counter[k] += 1;
            if counter[k] < factors[k].1.len() {
                break;
            }
            counter[k] = 0;
        }
    }
}

/// `A_n` and `B_n` for odd `n`: `B_n` is closed under cyclic shifts and every
/// member of `A_n` starts with `n`.
fn odd_layers(n: usize) -> (Vec<Permutation>, Vec<Permutation>) {
    debug_assert!(n % 2 == 1);
    if n == 1 {
        let base = vec![Permutation::identity(1)];
        return (base.clone(), base);
    }
    let (_, prev) = odd_layers(n - 2);
    let marker = (n - 2) as u32;
    let mut a = Vec::new();
    for j in 2..=n {
        for pi in &prev {
            let cand = psi_insert(pi, j, n).expect("valid Psi^j arguments");
            if cand.position_of(marker).expect("n-2 present") < j {
                a.push(cand);
            }
        }
    }
    let mut b = Vec::with_capacity(a.len() * n);
    for x in &a {
        for k in 0..n as i64 {
            b.push(x.cyclic_shift(k));
        }
    }
    (a, b)
}

/// `A_n` for odd `n` (members start with `n`).
pub fn theorem1_leading_layer(n: usize) -> Result<Vec<Permutation>> {
    if n.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "A_n is defined for odd n, got {n}"
        )));
    }
    Ok(odd_layers(n).0)
}

/// A maximum family of permutations pairwise differing somewhere by at least 2,
/// of size `n! / 2^floor(n/2)`.
pub fn construct_theorem1(n: usize) -> Result<PermFamily> {
    construct_theorem1_capped(n, DEFAULT_MAX_MEMBERS)
}

pub fn construct_theorem1_capped(n: usize, cap: u64) -> Result<PermFamily> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    check_cap(
        &format!("coset product family for n = {n}"),
        &bounds::formula_theorem1(n as u64),
        cap,
    )?;
    let members = theorem1_members(n);
    PermFamily::new(n, members, not_one(), "theorem1")
}

fn theorem1_members(n: usize) -> Vec<Permutation> {
    if n == 0 {
        return vec![Permutation::identity(0)];
    }
    if n % 2 == 1 {
        odd_layers(n).1
    } else {
        odd_layers(n + 1)
            .0
            .into_iter()
            .map(|x| Permutation::from_vec_unchecked(x.entries()[1..].to_vec()))
            .collect()
    }
}

/// The partition of `S_n` into blocks `C(pi)` generated by the value swaps
/// `(1 2), (3 4), ..., (k k+1)` with `k = 2 floor(n/2) - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetPartition {
    n: usize,
    blocks: Vec<Vec<Permutation>>,
}

impl CosetPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<Permutation>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

/// Canonical member of `C(pi)`: in every swap pair the smaller value comes first.
pub fn coset_representative(pi: &Permutation) -> Permutation {
    let n = pi.len() as u32;
    let mut entries = pi.entries().to_vec();
    let pos_of = |e: &[u32], v: u32| e.iter().position(|&x| x == v).expect("value present");
    let mut lo = 1;
    while lo < n {
        let (a, b) = (pos_of(&entries, lo), pos_of(&entries, lo + 1));
        if a > b {
            entries.swap(a, b);
        }
        lo += 2;
    }
    Permutation::from_vec_unchecked(entries)
}

/// All `2^floor(n/2)` members of `C(pi)`.
pub fn coset_block(pi: &Permutation) -> Vec<Permutation> {
    let pairs = pi.len() / 2;
    let mut out = Vec::with_capacity(1 << pairs);
    for mask in 0u32..(1 << pairs) {
        let mut x = pi.clone();
        for k in 0..pairs {
            if mask >> k & 1 == 1 {
                let lo = 2 * k as u32 + 1;
                x = x.sigma_swap(lo, lo + 1).expect("values in range");
            }
        }
        out.push(x);
    }
    out.sort();
    out
}

pub fn coset_partition(n: usize) -> Result<CosetPartition> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if n > MAX_COSET_N {
        return Err(Error::CapExceeded {
            what: format!("coset partition of S_{n}"),
            needed: format!("{n}!"),
            cap: MAX_COSET_N as u64,
        });
    }
    let mut groups: BTreeMap<Permutation, Vec<Permutation>> = BTreeMap::new();
    for pi in all_permutations(n) {
        groups
            .entry(coset_representative(&pi))
            .or_default()
            .push(pi);
    }
    Ok(CosetPartition {
        n,
        blocks: groups.into_values().collect(),
    })
}

/// A family for `complement of {q}` meeting the exact value of `T(n, complement of {q})`.
///
/// Positions are split by the residue pattern of their values; inside one pattern,
/// each residue class carries an order-isomorphic copy of the coset product family on
/// its own positions, and the classes are combined in all ways.
pub fn construct_corollary(n: usize, q: usize) -> Result<PermFamily> {
    construct_corollary_capped(n, q, DEFAULT_MAX_MEMBERS)
}

pub fn construct_corollary_capped(n: usize, q: usize, cap: u64) -> Result<PermFamily> {
    if n == 0 || q == 0 {
        return Err(Error::Parameter("n and q must be at least 1".into()));
    }
    check_cap(
        &format!("corollary family for n = {n}, q = {q}"),
        &bounds::formula_corollary(n as u64, q as u64),
        cap,
    )?;
    let residue = |v: usize| v % q;
    let classes: Vec<Vec<u32>> = (0..q)
        .map(|k| {
            (1..=n)
                .filter(|&v| residue(v) == k)
                .map(|v| v as u32)
                .collect()
        })
        .collect();
    let mut sub_families: BTreeMap<usize, Vec<Permutation>> = BTreeMap::new();
    for c in &classes {
        sub_families
            .entry(c.len())
            .or_insert_with(|| theorem1_members(c.len()));
    }

    let mut pattern: Vec<usize> = (1..=n).map(residue).collect();
    pattern.sort_unstable();
    let mut members = Vec::new();
    loop {
        let factors: Vec<(Vec<usize>, Vec<Vec<u32>>)> = (0..q)
            .filter(|&k| !classes[k].is_empty())
            .map(|k| {
                let positions: Vec<usize> = (0..n).filter(|&i| pattern[i] == k).collect();
                let options = sub_families[&classes[k].len()]
                    .iter()
                    .map(|tau| {
                        tau.entries()
                            .iter()
                            .map(|&t| classes[k][t as usize - 1])
                            .collect()
                    })
                    .collect();
                (positions, options)
            })
            .collect();
        members.extend(fill_product(n, &factors));
        if !next_permutation(&mut pattern) {
            break;
        }
    }
    let d = DistanceSet::Complement(Box::new(DistanceSet::Finite(vec![q as u64])));
    PermFamily::new(n, members, d, "corollary")
}

/// One permutation per placement of the even values: a maximum family for odd
/// differences, of size `C(n, floor(n/2))`.
pub fn construct_even_positions(n: usize) -> Result<PermFamily> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let k = n / 2;
    let mut members = Vec::new();
    // slot mask: true where an even value goes
    let mut slots: Vec<bool> = (0..n).map(|i| i >= n - k).collect();
    loop {
        let mut evens = (1..=k as u32).map(|i| 2 * i);
        let mut odds = (0..(n - k) as u32).map(|i| 2 * i + 1);
        let entries = slots
            .iter()
            .map(|&even| {
                if even {
                    evens.next().expect("enough evens")
                } else {
                    odds.next().expect("enough odds")
                }
            })
            .collect();
        members.push(Permutation::from_vec_unchecked(entries));
        if !next_permutation(&mut slots) {
            break;
        }
    }
    PermFamily::new(
        n,
        members,
        DistanceSet::evens().complement(),
        "even-positions",
    )
}

/// `x ⇀ y`: replace the star of `x` by `y_1` and append `y_2 ... y_k`.
pub fn hook_up(x: &[Symbol], y: &[u32]) -> Result<Vec<u32>> {
    let (first, rest) = y
        .split_first()
        .ok_or_else(|| Error::Parameter("cannot hook up an empty sequence".into()))?;
    let mut out: Vec<u32> = x
        .iter()
        .map(|s| match s {
            Symbol::Value(v) => *v,
            Symbol::Star => *first,
        })
        .collect();
    out.extend_from_slice(rest);
    Ok(out)
}

/// Permutations differing pairwise somewhere by an even number, of size
/// `(ceil(n/2)+1)! floor(n/2)! / 2`.
pub fn construct_hookup(n: usize) -> Result<PermFamily> {
    construct_hookup_capped(n, DEFAULT_MAX_MEMBERS)
}

pub fn construct_hookup_capped(n: usize, cap: u64) -> Result<PermFamily> {
    if n < 2 {
        return Err(Error::Parameter("hookup needs n >= 2".into()));
    }
    check_cap(
        &format!("hookup family for n = {n}"),
        &bounds::hookup_size(n as u64),
        cap,
    )?;
    let mut a: Vec<Symbol> = (1..=n as u32)
        .filter(|v| v % 2 == 1)
        .map(Symbol::Value)
        .collect();
    a.push(Symbol::Star);
    let mut even_arrangements = Vec::new();
    loop {
        if is_even_permutation(&a)? {
            even_arrangements.push(a.clone());
        }
        if !next_permutation(&mut a) {
            break;
        }
    }
    let mut b: Vec<u32> = (1..=n as u32).filter(|v| v % 2 == 0).collect();
    let mut b_arrangements = Vec::new();
    loop {
        b_arrangements.push(b.clone());
        if !next_permutation(&mut b) {
            break;
        }
    }
    let mut members = Vec::with_capacity(even_arrangements.len() * b_arrangements.len());
    for x in &even_arrangements {
        for y in &b_arrangements {
            members.push(Permutation::from_vec_unchecked(hook_up(x, y)?));
        }
    }
    PermFamily::new(n, members, DistanceSet::evens(), "hookup")
}

/// Bit layout of the valuation construction on `{0, ..., n-1}`, `n = 2^(q t')`.
///
/// Values are grouped by their bits at exponents `b` with `b mod q >= p`; the
/// remaining bits vary freely inside a group. Two values of one group first differ
/// at a free bit, so their difference has valuation `≡ 0..p-1 (mod q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationLayout {
    pub n: u64,
    pub p: u32,
    pub q: u32,
    pub key_mask: u64,
    /// Groups ordered by key, each sorted ascending; 0-based values.
    pub groups: Vec<Vec<u64>>,
}

/// Checks `n = 2^(q t')` with `t' >= 1` and returns the bit count `t`.
pub fn valuation_bits(n: u64, p: u32, q: u32) -> Result<u32> {
    if p == 0 || p >= q {
        return Err(Error::InvalidDistanceSet(format!(
            "valuation parameters need 1 <= p < q, got ({p}, {q})"
        )));
    }
    let bad = Error::InadmissibleValuationSize { n, p, q };
    if !n.is_power_of_two() {
        return Err(bad);
    }
    let t = n.trailing_zeros();
    if t == 0 || !t.is_multiple_of(q) {
        return Err(bad);
    }
    Ok(t)
}

pub fn valuation_layout(n: u64, p: u32, q: u32) -> Result<ValuationLayout> {
    let t = valuation_bits(n, p, q)?;
    let key_mask = (0..t).filter(|b| b % q >= p).fold(0u64, |m, b| m | 1 << b);
    let mut by_key: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for v in 0..n {
        by_key.entry(v & key_mask).or_default().push(v);
    }
    Ok(ValuationLayout {
        n,
        p,
        q,
        key_mask,
        groups: by_key.into_values().collect(),
    })
}

/// All cross-group combinations of within-group permutations, each group in its own
/// consecutive block of positions (groups ordered by key). Values are emitted on `[n]`.
pub fn construct_valuation(n: usize, p: u32, q: u32) -> Result<PermFamily> {
    construct_valuation_capped(n, p, q, DEFAULT_MAX_MEMBERS)
}

pub fn construct_valuation_capped(n: usize, p: u32, q: u32, cap: u64) -> Result<PermFamily> {
    let layout = valuation_layout(n as u64, p, q)?;
    let size = bounds::valuation_lower(n as u64, p, q)?;
    check_cap(&format!("valuation family for n = {n}"), &size, cap)?;
    let mut factors = Vec::with_capacity(layout.groups.len());
    let mut next_pos = 0usize;
    for group in &layout.groups {
        let positions: Vec<usize> = (next_pos..next_pos + group.len()).collect();
        next_pos += group.len();
        let mut arrangement: Vec<u32> = group.iter().map(|&v| v as u32 + 1).collect();
        let mut options = Vec::new();
        loop {
            options.push(arrangement.clone());
            if !next_permutation(&mut arrangement) {
                break;
            }
        }
        factors.push((positions, options));
    }
    let members = fill_product(n, &factors);
    PermFamily::new(n, members, DistanceSet::valuation(p, q)?, "valuation")
}

/// Structural check of a valuation family: each group's position block holds exactly
/// that group's values in every member, every group's values pairwise differ by an
/// element of `E_(p/q)`, and every arrangement of each block occurs.
pub fn verify_valuation_structure(family: &PermFamily, p: u32, q: u32) -> Result<bool> {
    let layout = valuation_layout(family.n() as u64, p, q)?;
    let d = DistanceSet::valuation(p, q)?;
    let mut start = 0usize;
    for group in &layout.groups {
        let len = group.len();
        let mut expected: Vec<u32> = group.iter().map(|&v| v as u32 + 1).collect();
        expected.sort_unstable();
        for (i, &a) in group.iter().enumerate() {
            for &b in &group[i + 1..] {
                if !d.contains_positive(a.abs_diff(b)) {
                    return Ok(false);
                }
            }
        }
        let mut blocks = std::collections::BTreeSet::new();
        for m in family.members() {
            let block = &m.entries()[start..start + len];
            let mut sorted = block.to_vec();
            sorted.sort_unstable();
            if sorted != expected {
                return Ok(false);
            }
            blocks.insert(block.to_vec());
        }
        if BigUint::from(blocks.len()) != arith::factorial(len as u64) {
            return Ok(false);
        }
        start += len;
    }
    Ok(true)
}

/// A family for `{q}`: each residue class mod `q` carries an order-isomorphic copy of
/// a `{1}`-different family from `base`, in its own block of positions.
///
/// Blocks are ordered by residue `0, 1, ..., q-1`. Each base family is checked to be
/// pairwise `{1}`-different before use.
pub fn construct_residue_concat<F>(n: usize, q: usize, base: F) -> Result<PermFamily>
where
    F: Fn(usize) -> Result<PermFamily>,
{
    if n == 0 || q == 0 {
        return Err(Error::Parameter("n and q must be at least 1".into()));
    }
    let one: Relation = DistanceSet::Finite(vec![1]).into();
    let mut factors = Vec::new();
    let mut next_pos = 0usize;
    for m in 0..q {
        let class: Vec<u32> = (1..=n as u32).filter(|v| *v as usize % q == m).collect();
        if class.is_empty() {
            continue;
        }
        let fam = base(class.len())?;
        if fam.n() != class.len() {
            return Err(Error::Parameter(format!(
                "base family for size {} has n = {}",
                class.len(),
                fam.n()
            )));
        }
        let report = verify_family(&fam, &one, VerifyMode::Exhaustive);
        if !report.passed() {
            return Err(Error::Parameter(format!(
                "base family for size {} is not pairwise {{1}}-different",
                class.len()
            )));
        }
        let positions: Vec<usize> = (next_pos..next_pos + class.len()).collect();
        next_pos += class.len();
        let options = fam
            .members()
            .iter()
            .map(|tau| {
                tau.entries()
                    .iter()
                    .map(|&t| class[t as usize - 1])
                    .collect()
            })
            .collect();
        factors.push((positions, options));
    }
    let members = fill_product(n, &factors);
    PermFamily::new(
        n,
        members,
        DistanceSet::Finite(vec![q as u64]),
        "residue-concat",
    )
}
