//! Invariant checks. Each returns `Err` with the minimal failing input.
//!
//! Randomized checks use proptest with a fixed seed and no failure persistence, so
//! every run explores the same cases.

use num_bigint::BigUint;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use permdiff::arith::factorial;
use permdiff::bounds::{
    certificate_upper_bound, chromatic_number, formula_corollary, formula_theorem1,
    hookup_lower_expression, hookup_size, valuation_bounds, valuation_log_ratio,
};
use permdiff::capacity::{
    capacity_profile, conormal_product, lift_sequence, lift_to_permutations, project_to_residues,
    residue_type, residues_of_range, type_of, typed_max_clique, QuotientGraph,
};
use permdiff::constructions::{
    construct_corollary, construct_even_positions, construct_hookup, construct_theorem1,
    construct_valuation_capped, coset_partition, theorem1_leading_layer, DEFAULT_MAX_MEMBERS,
};
use permdiff::perm::{g_different, verify_family, verify_strong_certificate};
use permdiff::solver::{build_conflict_graph, max_clique, Budget, DEFAULT_MAX_VERTICES};
use permdiff::{DistanceSet, PermFamily, Permutation, Relation, VerifyMode};

use super::oracle;

pub type Outcome = Result<(), String>;

pub const SEED: u64 = 0x7065_726d_6469_6666;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

fn run<S, F>(cases: u32, strategy: S, test: F) -> Outcome
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    TestRunner::new(config(cases))
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn distance_set() -> impl Strategy<Value = DistanceSet> {
    let leaf = prop_oneof![
        vec(1u64..40, 0..5).prop_map(|v| DistanceSet::finite(v).unwrap()),
        vec(1u64..40, 0..5).prop_map(|v| DistanceSet::cofinite(v).unwrap()),
        (2u64..9)
            .prop_flat_map(|r| (Just(r), vec(0..r, 0..r as usize)))
            .prop_map(|(r, a)| DistanceSet::residue(r, a).unwrap()),
        (2u32..6)
            .prop_flat_map(|q| (1..q, Just(q)))
            .prop_map(|(p, q)| DistanceSet::valuation(p, q).unwrap()),
    ];
    leaf.prop_recursive(2, 4, 1, |inner| inner.prop_map(|d| d.complement()))
}

pub fn permutation(n: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle()
}

fn perm(v: Vec<u32>) -> Permutation {
    Permutation::new(v).unwrap()
}

fn entries(f: &PermFamily) -> Vec<Vec<u32>> {
    f.members().iter().map(|p| p.entries().to_vec()).collect()
}

// ---------------------------------------------------------------- distance sets

pub fn complement_is_exclusive() -> Outcome {
    const LIMIT: usize = 1_000_000;
    run(24, distance_set(), |d| {
        let c = d.complement();
        let (dm, cm) = (d.difference_mask(LIMIT), c.difference_mask(LIMIT));
        for x in 1..=LIMIT {
            prop_assert!(dm[x] ^ cm[x], "{d} and its complement agree at {x}");
        }
        let cc = c.complement();
        for x in 1..=2_000u64 {
            prop_assert_eq!(
                d.contains(x).unwrap(),
                oracle::member(&d, x),
                "{} at {}",
                d,
                x
            );
            prop_assert_eq!(cc.contains(x).unwrap(), d.contains(x).unwrap());
        }
        Ok(())
    })
}

pub fn induced_graph_nests() -> Outcome {
    run(64, (distance_set(), 1usize..40), |(d, n)| {
        let small = d.induced_graph(n).unwrap();
        let big = d.induced_graph(n + 1).unwrap();
        for a in 1..=n {
            prop_assert!(!small.is_adjacent(a, a));
            for b in a + 1..=n {
                let expect = oracle::member(&d, (b - a) as u64);
                prop_assert_eq!(small.is_adjacent(a, b), expect);
                prop_assert_eq!(small.is_adjacent(b, a), expect);
                prop_assert_eq!(big.is_adjacent(a, b), expect);
            }
        }
        Ok(())
    })
}

pub fn valuation_depends_on_ex_mod_q() -> Outcome {
    let strategy = (2u32..7)
        .prop_flat_map(|q| (1..q, Just(q)))
        .prop_flat_map(|(p, q)| {
            (
                Just(p),
                Just(q),
                0u32..20,
                0u32..3,
                (0u64..500).prop_map(|k| 2 * k + 1),
                (0u64..500).prop_map(|k| 2 * k + 1),
            )
        });
    run(256, strategy, |(p, q, e, k, odd1, odd2)| {
        let d = DistanceSet::valuation(p, q).unwrap();
        let x = odd1 << e;
        let y = odd2 << (e + k * q);
        prop_assert_eq!(d.contains(x).unwrap(), d.contains(y).unwrap());
        prop_assert_eq!(d.contains(x).unwrap(), e % q < p);
        Ok(())
    })
}

// ---------------------------------------------------------------- permutations

pub fn g_different_is_symmetric() -> Outcome {
    let strategy = (1usize..10).prop_flat_map(|n| (permutation(n), permutation(n), distance_set()));
    run(256, strategy, |(x, y, d)| {
        let (px, py) = (perm(x.clone()), perm(y.clone()));
        let forward = g_different(&px, &py, &d).unwrap();
        prop_assert_eq!(forward, g_different(&py, &px, &d).unwrap());
        prop_assert_eq!(forward, oracle::differ(&x, &y, &d));
        Ok(())
    })
}

fn certificate_matches_complement(members: &[Vec<u32>], d: &DistanceSet) -> Result<bool, String> {
    let n = members[0].len();
    let fam = PermFamily::new(
        n,
        members.iter().cloned().map(perm).collect(),
        d.clone(),
        "test",
    )
    .map_err(|e| e.to_string())?;
    let strong = verify_strong_certificate(&fam, d);
    let dm = entries(&fam);
    let expect = oracle::strong(&dm, d);
    let none_different = oracle::pairwise(&dm, |x, y| !oracle::differ(x, y, &d.complement()));
    if strong != expect || strong != none_different {
        return Err(format!(
            "certificate for {d} on {members:?}: library {strong}, oracle {expect}, complement scan {none_different}"
        ));
    }
    if strong && fam.len() >= 2 {
        let r = verify_family(&fam, &d.complement().into(), VerifyMode::Exhaustive);
        if r.passed() {
            return Err(format!(
                "strong family for {d} has a complement-different pair"
            ));
        }
    }
    Ok(strong)
}

pub fn strong_certificate_against_complement() -> Outcome {
    // random families are rarely certificates; coset blocks always are for {1}
    let strategy = (2usize..6).prop_flat_map(|n| (vec(permutation(n), 1..7), distance_set()));
    run(128, strategy, |(members, d)| {
        certificate_matches_complement(&members, &d).map_err(TestCaseError::fail)?;
        Ok(())
    })?;
    let one = DistanceSet::single(1).unwrap();
    for n in 2..=6 {
        for block in coset_partition(n).unwrap().blocks() {
            let members: Vec<_> = block.iter().map(|p| p.entries().to_vec()).collect();
            ensure(certificate_matches_complement(&members, &one)?, || {
                format!("coset block {members:?} is not a certificate for {{1}}")
            })?;
        }
    }
    Ok(())
}

pub fn shifts_of_leading_layer() -> Outcome {
    for n in [1usize, 3, 5, 7, 9] {
        let a = theorem1_leading_layer(n).map_err(|e| e.to_string())?;
        ensure(a.iter().all(|p| p.at(1) == n as u32), || {
            format!("a leading-layer member for n={n} does not start with {n}")
        })?;
        let mut shifted: Vec<Permutation> = a
            .iter()
            .flat_map(|p| (0..n as i64).map(move |k| p.cyclic_shift(k)))
            .collect();
        shifted.sort();
        shifted.dedup();
        ensure(shifted.len() == n * a.len(), || {
            format!("n={n}: {} shifts of {} members", shifted.len(), a.len())
        })?;
        let b = construct_theorem1(n).map_err(|e| e.to_string())?;
        ensure(b.members() == shifted.as_slice(), || {
            format!("n={n}: family differs from the shifts of its leading layer")
        })?;
    }
    let strategy =
        prop_oneof![Just(3usize), Just(5), Just(7)].prop_flat_map(|n| (Just(n), -20i64..20));
    run(32, strategy, |(n, k)| {
        let b = construct_theorem1(n).unwrap();
        let mut image: Vec<Permutation> = b.members().iter().map(|p| p.cyclic_shift(k)).collect();
        image.sort();
        prop_assert_eq!(image.as_slice(), b.members());
        Ok(())
    })
}

pub fn disjoint_swaps_commute() -> Outcome {
    let strategy = (4usize..12).prop_flat_map(|n| {
        (
            permutation(n),
            Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle(),
        )
    });
    run(256, strategy, |(x, order)| {
        let (i, j, k, l) = (order[0], order[1], order[2], order[3]);
        let x = perm(x);
        let a = x.sigma_swap(i, j).unwrap().sigma_swap(k, l).unwrap();
        let b = x.sigma_swap(k, l).unwrap().sigma_swap(i, j).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(
            x.sigma_swap(i, j).unwrap().sigma_swap(i, j).unwrap(),
            x.clone()
        );
        let c = x.sigma_swap(1, 2).unwrap().sigma_swap(3, 4).unwrap();
        prop_assert_eq!(c, x.sigma_swap(3, 4).unwrap().sigma_swap(1, 2).unwrap());
        Ok(())
    })
}

// ---------------------------------------------------------------- constructions

fn theorem1_size(n: u64) -> u128 {
    oracle::factorial(n) >> (n / 2)
}

pub fn theorem1_sizes() -> Outcome {
    for n in 1..=9u64 {
        let fam = construct_theorem1(n as usize).map_err(|e| e.to_string())?;
        let expect = BigUint::from(theorem1_size(n));
        ensure(
            fam.claimed_size() == expect && formula_theorem1(n) == expect,
            || {
                format!(
                    "n={n}: built {}, formula {}, expected {expect}",
                    fam.len(),
                    formula_theorem1(n)
                )
            },
        )?;
    }
    Ok(())
}

pub fn theorem1_pairs() -> Outcome {
    let d = DistanceSet::single(1).unwrap().complement();
    for n in 1..=8 {
        let fam = construct_theorem1(n).map_err(|e| e.to_string())?;
        let r = verify_family(&fam, &d.clone().into(), VerifyMode::Exhaustive);
        ensure(r.passed(), || format!("n={n}: {:?}", r.witness))?;
        if n <= 6 {
            ensure(
                oracle::pairwise(&entries(&fam), |x, y| oracle::differ(x, y, &d)),
                || format!("n={n}: oracle found a colliding pair"),
            )?;
        }
    }
    Ok(())
}

pub fn coset_blocks_are_color_classes() -> Outcome {
    let d = DistanceSet::single(1).unwrap().complement();
    for n in 1..=8usize {
        let part = coset_partition(n).map_err(|e| e.to_string())?;
        let size = 1usize << (n / 2);
        let mut all: Vec<&Permutation> = part.blocks().iter().flatten().collect();
        let total = all.len();
        all.sort();
        all.dedup();
        ensure(
            all.len() == total && total as u128 == oracle::factorial(n as u64),
            || format!("n={n}: blocks do not partition the {total} permutations"),
        )?;
        ensure(
            BigUint::from(part.block_count()) == formula_theorem1(n as u64),
            || format!("n={n}: {} blocks", part.block_count()),
        )?;
        for block in part.blocks() {
            ensure(block.len() == size, || {
                format!("n={n}: block of size {}", block.len())
            })?;
            let rows: Vec<Vec<u32>> = block.iter().map(|p| p.entries().to_vec()).collect();
            ensure(
                oracle::pairwise(&rows, |x, y| !oracle::differ(x, y, &d)),
                || format!("n={n}: block {rows:?} contains an edge"),
            )?;
        }
    }
    Ok(())
}

/// Size formula evaluated independently in machine integers.
pub fn corollary_size(n: u64, q: u64) -> u128 {
    let (a, m) = (n / q, n % q);
    let div = (a / 2) * (q - m) + a.div_ceil(2) * m;
    oracle::factorial(n) >> div
}

pub fn corollary_sizes() -> Outcome {
    for n in 1..=8u64 {
        for q in 1..=4u64 {
            let expect = BigUint::from(corollary_size(n, q));
            let fam = construct_corollary(n as usize, q as usize).map_err(|e| e.to_string())?;
            ensure(
                fam.claimed_size() == expect && formula_corollary(n, q) == expect,
                || format!("({n},{q}): built {}, expected {expect}", fam.len()),
            )?;
            if fam.len() <= 5000 {
                let d = DistanceSet::single(q).unwrap().complement();
                let r = verify_family(&fam, &d.into(), VerifyMode::Exhaustive);
                ensure(r.passed(), || format!("({n},{q}): {:?}", r.witness))?;
            }
        }
    }
    Ok(())
}

/// Admissible `(n, p, q)` with `n <= limit`.
pub fn admissible(limit: u64) -> Vec<(u64, u32, u32)> {
    let mut out = Vec::new();
    for q in 2..=20u32 {
        for p in 1..q {
            let mut bits = q;
            while bits < 64 && (1u64 << bits) <= limit {
                out.push((1u64 << bits, p, q));
                bits += q;
            }
        }
    }
    out.sort();
    out
}

pub fn valuation_families_are_certificates() -> Outcome {
    for (n, p, q) in admissible(16) {
        let (bound, _) = valuation_bounds(n, p, q).map_err(|e| e.to_string())?;
        if bound.lower.value > BigUint::from(DEFAULT_MAX_MEMBERS) {
            continue;
        }
        let fam = construct_valuation_capped(n as usize, p, q, DEFAULT_MAX_MEMBERS)
            .map_err(|e| e.to_string())?;
        let d = DistanceSet::valuation(p, q).unwrap();
        ensure(fam.claimed_size() == bound.lower.value, || {
            format!("({n},{p},{q}): size {}", fam.len())
        })?;
        ensure(verify_strong_certificate(&fam, &d), || {
            format!("({n},{p},{q}): not a positionwise certificate")
        })?;
        if fam.len() <= 1000 {
            ensure(oracle::strong(&entries(&fam), &d), || {
                format!("({n},{p},{q}): oracle rejects the certificate")
            })?;
        }
        if fam.len() >= 2 {
            let r = verify_family(
                &fam,
                &d.into(),
                VerifyMode::Sampled {
                    pairs: 10_000,
                    seed: SEED,
                },
            );
            ensure(r.passed(), || format!("({n},{p},{q}): {:?}", r.witness))?;
        }
    }
    Ok(())
}

pub fn hookup_pairs() -> Outcome {
    let evens = DistanceSet::evens();
    for n in 2..=10usize {
        let fam = construct_hookup(n).map_err(|e| e.to_string())?;
        let r = verify_family(&fam, &evens.clone().into(), VerifyMode::Exhaustive);
        ensure(r.passed(), || format!("n={n}: {:?}", r.witness))?;
        if n <= 6 {
            ensure(
                oracle::pairwise(&entries(&fam), |x, y| oracle::differ(x, y, &evens)),
                || format!("n={n}: oracle found a pair without an even difference"),
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- solver

pub fn witnesses_verify() -> Outcome {
    let strategy = (1usize..6, distance_set());
    run(24, strategy, |(n, d)| {
        let rel: Relation = d.clone().into();
        let g = build_conflict_graph(n, &rel, DEFAULT_MAX_VERTICES).unwrap();
        let r = max_clique(&g, Budget::default());
        prop_assert!(r.exact);
        let fam = r.witness_family(&g, "solver").unwrap();
        prop_assert_eq!(fam.len(), r.clique_size);
        prop_assert!(verify_family(&fam, &rel, VerifyMode::Exhaustive).passed());
        prop_assert!(oracle::pairwise(&entries(&fam), |x, y| oracle::differ(
            x, y, &d
        )));
        if n <= 4 {
            prop_assert_eq!(r.clique_size, oracle::t_value(n, &d));
        }
        Ok(())
    })
}

pub fn relabeling_invariance() -> Outcome {
    let strategy = (3usize..6, distance_set()).prop_flat_map(|(n, d)| {
        let count = (1..=n).product::<usize>();
        (
            Just(n),
            Just(d),
            Just((0..count).collect::<Vec<_>>()).prop_shuffle(),
        )
    });
    run(16, strategy, |(n, d, order)| {
        let g = build_conflict_graph(n, &d.into(), DEFAULT_MAX_VERTICES).unwrap();
        let h = g.relabeled(&order);
        let (a, b) = (
            max_clique(&g, Budget::default()),
            max_clique(&h, Budget::default()),
        );
        prop_assert!(a.exact && b.exact);
        prop_assert_eq!(a.clique_size, b.clique_size);
        prop_assert!(h.is_clique(&b.clique_witness));
        Ok(())
    })
}

fn solve(n: usize, d: &DistanceSet) -> Result<usize, String> {
    let g = build_conflict_graph(n, &d.clone().into(), DEFAULT_MAX_VERTICES)
        .map_err(|e| e.to_string())?;
    let r = max_clique(&g, Budget::default());
    ensure(r.exact, || format!("T({n}, {d}) not exact"))?;
    Ok(r.clique_size)
}

pub fn solver_matches_formulas() -> Outcome {
    let not_one = DistanceSet::single(1).unwrap().complement();
    let odd = DistanceSet::evens().complement();
    let not_two = DistanceSet::single(2).unwrap().complement();
    for n in 1..=5u64 {
        let got = solve(n as usize, &not_one)?;
        ensure(got as u128 == theorem1_size(n), || {
            format!("T({n}, not 1) = {got}")
        })?;
        let got = solve(n as usize, &odd)?;
        ensure(got as u128 == oracle::binomial(n, n / 2), || {
            format!("T({n}, odd) = {got}")
        })?;
    }
    for n in [4u64, 5] {
        let got = solve(n as usize, &not_two)?;
        ensure(got as u128 == corollary_size(n, 2), || {
            format!("T({n}, not 2) = {got}")
        })?;
    }
    Ok(())
}

pub fn single_distance_below_one() -> Outcome {
    for n in 1..=5usize {
        let one = solve(n, &DistanceSet::single(1).unwrap())?;
        for q in 2..=5u64 {
            let tq = solve(n, &DistanceSet::single(q).unwrap())?;
            ensure(tq <= one, || {
                format!("T({n},{{{q}}}) = {tq} > T({n},{{1}}) = {one}")
            })?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- bounds

pub fn hookup_expressions_agree() -> Outcome {
    for n in 2..=30u64 {
        let (up, down) = (n.div_ceil(2), n / 2);
        let direct = oracle::factorial(up + 1) * oracle::factorial(down) / 2;
        let displayed = oracle::factorial(n) * (up as u128 + 1) / (2 * oracle::binomial(n, down));
        ensure(direct == displayed, || {
            format!("n={n}: oracle forms differ")
        })?;
        let expect = Some(BigUint::from(direct));
        ensure(
            hookup_lower_expression(n) == expect && Some(hookup_size(n)) == expect,
            || format!("n={n}: {:?} vs {:?}", hookup_lower_expression(n), expect),
        )?;
    }
    Ok(())
}

pub fn valuation_bounds_consistent() -> Outcome {
    let mut cache: Vec<(u64, BigUint)> = Vec::new();
    for (n, p, q) in admissible(1 << 20) {
        let (d, c) = valuation_bounds(n, p, q).map_err(|e| e.to_string())?;
        ensure(
            d.lower.value <= d.upper.value && c.lower.value <= c.upper.value,
            || format!("({n},{p},{q}): lower above upper"),
        )?;
        let nf = match cache.iter().find(|(k, _)| *k == n) {
            Some((_, v)) => v.clone(),
            None => {
                let v = factorial(n);
                cache.push((n, v.clone()));
                v
            }
        };
        ensure(&d.lower.value * &c.lower.value <= nf, || {
            format!("({n},{p},{q}): product of lower bounds exceeds n!")
        })?;
    }
    Ok(())
}

pub fn certificate_sandwich() -> Outcome {
    for (n, p, q) in admissible(16) {
        let (bound, comp) = valuation_bounds(n, p, q).map_err(|e| e.to_string())?;
        if bound.lower.value > BigUint::from(DEFAULT_MAX_MEMBERS) {
            continue;
        }
        let fam = construct_valuation_capped(n as usize, p, q, DEFAULT_MAX_MEMBERS)
            .map_err(|e| e.to_string())?;
        let d = DistanceSet::valuation(p, q).unwrap().complement();
        let bound = certificate_upper_bound(&fam, &d).map_err(|e| e.to_string())?;
        ensure(
            bound >= comp.lower.value && bound == comp.upper.value,
            || {
                format!(
                    "({n},{p},{q}): certificate {bound} vs [{}, {}]",
                    comp.lower.value, comp.upper.value
                )
            },
        )?;
    }
    Ok(())
}

/// The ratio `log2 lower / log2 n!` at `n = 2^12`, `(p, q) = (1, 2)`.
pub fn log_ratio_at_4096() -> f64 {
    valuation_log_ratio(1 << 12, 1, 2).unwrap()
}

pub fn log_ratio_near_alpha() -> Outcome {
    let ratio = log_ratio_at_4096();
    ensure((ratio - 0.5).abs() <= 0.05, || {
        format!("log2 lower / log2 n! = {ratio:.4} at n = 4096, outside 0.5 +- 0.05")
    })
}

// ---------------------------------------------------------------- capacity

pub fn lift_then_project() -> Outcome {
    let strategy = (2usize..7, 1usize..13)
        .prop_flat_map(|(r, n)| (Just(r), Just(residues_of_range(r, n)).prop_shuffle()));
    run(256, strategy, |(r, x)| {
        let n = x.len();
        let m = QuotientGraph::empty(r).unwrap();
        let fam = lift_to_permutations(std::slice::from_ref(&x), &m, n).unwrap();
        prop_assert_eq!(project_to_residues(&fam, &m), vec![x.clone()]);
        let p = lift_sequence(&x, r).unwrap();
        // left to right increasing inside each residue class
        for a in 0..r as u32 {
            let vals: Vec<u32> = (0..n)
                .filter(|&i| x[i] == a)
                .map(|i| p.entries()[i])
                .collect();
            prop_assert!(vals.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(vals.iter().all(|v| v % r as u32 == a));
        }
        Ok(())
    })
}

fn circulants() -> Vec<QuotientGraph> {
    vec![
        QuotientGraph::cycle(5).unwrap(),
        QuotientGraph::cycle(4).unwrap(),
        QuotientGraph::complete(3).unwrap(),
        QuotientGraph::complete(2).unwrap(),
    ]
}

pub fn lifted_cliques_verify() -> Outcome {
    for m in circulants() {
        let d = m
            .as_distance_set()
            .ok_or("circulant without a distance set")?;
        for n in 1..=5 {
            let c = typed_max_clique(&m, n, Budget::default()).map_err(|e| e.to_string())?;
            ensure(c.result.exact, || format!("{m}, n={n}: not exact"))?;
            let seqs = c.sequences();
            let fam = lift_to_permutations(&seqs, &m, n).map_err(|e| e.to_string())?;
            ensure(fam.len() == seqs.len(), || {
                format!("{m}, n={n}: lift lost members")
            })?;
            for rel in [Relation::Quotient(m.clone()), Relation::Distance(d.clone())] {
                let r = verify_family(&fam, &rel, VerifyMode::Exhaustive);
                ensure(r.passed(), || format!("{m}, n={n}, {rel}: {:?}", r.witness))?;
            }
            ensure(
                oracle::pairwise(&entries(&fam), |x, y| oracle::differ(x, y, &d)),
                || format!("{m}, n={n}: oracle rejects the lift"),
            )?;
            let mut back = project_to_residues(&fam, &m);
            let mut orig = seqs.clone();
            back.sort();
            orig.sort();
            ensure(back == orig, || {
                format!("{m}, n={n}: project does not invert lift")
            })?;
        }
    }
    Ok(())
}

pub fn projected_even_positions_form_a_clique() -> Outcome {
    let m = QuotientGraph::complete(2).unwrap();
    for n in 1..=8 {
        let fam = construct_even_positions(n).map_err(|e| e.to_string())?;
        let mut seqs = project_to_residues(&fam, &m);
        let expect = residue_type(2, n);
        for s in &seqs {
            ensure(type_of(s, 2).map_err(|e| e.to_string())? == expect, || {
                format!("n={n}: {s:?} has the wrong type")
            })?;
        }
        ensure(
            oracle::pairwise(&seqs, |x, y| m.sequences_different(x, y)),
            || format!("n={n}: projected sequences are not pairwise different"),
        )?;
        let len = seqs.len();
        seqs.sort();
        seqs.dedup();
        ensure(seqs.len() == len, || {
            format!("n={n}: projection merged members")
        })?;
    }
    Ok(())
}

fn quotient_adjacency(m: &QuotientGraph) -> Vec<Vec<bool>> {
    let r = m.order();
    (0..r)
        .map(|a| (0..r).map(|b| m.is_edge(a, b)).collect())
        .collect()
}

/// Product of factors with `chi = omega`: complete graphs and bipartite graphs with an edge.
pub fn conormal_products_multiply() -> Outcome {
    let factor = prop_oneof![
        Just(QuotientGraph::empty(2).unwrap()),
        (2usize..5).prop_map(|k| QuotientGraph::complete(k).unwrap()),
        (2usize..5).prop_map(|k| QuotientGraph::path(k).unwrap()),
        Just(QuotientGraph::cycle(4).unwrap()),
    ];
    run(48, vec(factor, 2..4), |fs| {
        let omegas: Vec<usize> = fs
            .iter()
            .map(|f| oracle::max_clique(&quotient_adjacency(f)).len())
            .collect();
        for (f, w) in fs.iter().zip(&omegas) {
            prop_assert_eq!(chromatic_number(f).unwrap(), *w);
        }
        let mut prod = fs[0].clone();
        for f in &fs[1..] {
            prod = conormal_product(&prod, f);
        }
        prop_assume!(prod.order() <= 128);
        let omega = oracle::max_clique(&quotient_adjacency(&prod)).len();
        prop_assert_eq!(omega, omegas.iter().product::<usize>());
        Ok(())
    })
}

pub fn rates_below_chromatic_ceiling() -> Outcome {
    let graphs = [
        QuotientGraph::cycle(5).unwrap(),
        QuotientGraph::path(3).unwrap(),
        QuotientGraph::complete(3).unwrap(),
        QuotientGraph::complete(2).unwrap(),
        QuotientGraph::empty(2).unwrap(),
    ];
    for m in graphs {
        let chi = chromatic_number(&m).map_err(|e| e.to_string())?;
        let rows =
            capacity_profile(&m, &[1, 2, 3, 4, 5], Budget::default()).map_err(|e| e.to_string())?;
        for row in rows {
            ensure(row.rate <= (chi as f64).log2() + 1e-12, || {
                format!(
                    "{m}, n={}: rate {} above log2 chi = {}",
                    row.n,
                    row.rate,
                    (chi as f64).log2()
                )
            })?;
        }
    }
    Ok(())
}

/// Every invariant, in module order.
pub fn all() -> Vec<(&'static str, fn() -> Outcome)> {
    vec![
        (
            "distance_sets: complement is exclusive on [1, 10^6]",
            complement_is_exclusive,
        ),
        ("distance_sets: induced graphs nest", induced_graph_nests),
        (
            "distance_sets: valuation membership depends on ex mod q",
            valuation_depends_on_ex_mod_q,
        ),
        (
            "perm_core: g_different is symmetric",
            g_different_is_symmetric,
        ),
        (
            "perm_core: strong certificate vs complement",
            strong_certificate_against_complement,
        ),
        (
            "perm_core: cyclic shifts of the leading layer",
            shifts_of_leading_layer,
        ),
        ("perm_core: disjoint swaps commute", disjoint_swaps_commute),
        (
            "constructions: coset product sizes for n <= 9",
            theorem1_sizes,
        ),
        (
            "constructions: coset product pairs for n <= 8",
            theorem1_pairs,
        ),
        (
            "constructions: coset blocks are color classes",
            coset_blocks_are_color_classes,
        ),
        (
            "constructions: corollary sizes for n <= 8, q <= 4",
            corollary_sizes,
        ),
        (
            "constructions: valuation families are certificates",
            valuation_families_are_certificates,
        ),
        ("constructions: hookup pairs for n <= 10", hookup_pairs),
        ("solver: witnesses verify", witnesses_verify),
        ("solver: relabeling invariance", relabeling_invariance),
        ("solver: values match closed forms", solver_matches_formulas),
        ("solver: T(n,{q}) <= T(n,{1})", single_distance_below_one),
        (
            "bounds: hookup expressions agree for n <= 30",
            hookup_expressions_agree,
        ),
        (
            "bounds: valuation bounds consistent up to 2^20",
            valuation_bounds_consistent,
        ),
        ("bounds: certificate sandwich", certificate_sandwich),
        (
            "bounds: log ratio within 0.05 of alpha at n = 2^12",
            log_ratio_near_alpha,
        ),
        (
            "capacity: lift then project is the identity",
            lift_then_project,
        ),
        ("capacity: lifted cliques verify", lifted_cliques_verify),
        (
            "capacity: projected even-position families are cliques",
            projected_even_positions_form_a_clique,
        ),
        (
            "capacity: co-normal products multiply clique numbers",
            conormal_products_multiply,
        ),
        (
            "capacity: typed rates below log2 chi",
            rates_below_chromatic_ceiling,
        ),
    ]
}
