//! Brute-force reference implementations. Nothing here calls into the library's
//! algorithms; only the data types are shared.

use permdiff::distance_sets::DistanceSet;

pub fn two_adic(mut m: u64) -> u32 {
    assert!(m > 0);
    let mut s = 0;
    while m.is_multiple_of(2) {
        m /= 2;
        s += 1;
    }
    s
}

pub fn member(d: &DistanceSet, x: u64) -> bool {
    match d {
        DistanceSet::Finite(v) => v.contains(&x),
        DistanceSet::Cofinite(v) => !v.contains(&x),
        DistanceSet::Residue { modulus, allowed } => allowed.contains(&(x % modulus)),
        DistanceSet::Valuation { p, q } => two_adic(x) % q < *p,
        DistanceSet::Complement(inner) => !member(inner, x),
    }
}

pub fn differ(x: &[u32], y: &[u32], d: &DistanceSet) -> bool {
    x.iter()
        .zip(y)
        .any(|(&a, &b)| a != b && member(d, a.abs_diff(b) as u64))
}

/// Every position of every pair differs by 0 or by an element of `d`.
pub fn strong(members: &[Vec<u32>], d: &DistanceSet) -> bool {
    members.iter().enumerate().all(|(i, x)| {
        members[i + 1..].iter().all(|y| {
            x.iter()
                .zip(y)
                .all(|(&a, &b)| a == b || member(d, a.abs_diff(b) as u64))
        })
    })
}

pub fn pairwise<F: Fn(&[u32], &[u32]) -> bool>(members: &[Vec<u32>], rel: F) -> bool {
    members
        .iter()
        .enumerate()
        .all(|(i, x)| members[i + 1..].iter().all(|y| rel(x, y)))
}

/// All permutations of `[n]`, in no particular order.
pub fn perms(n: usize) -> Vec<Vec<u32>> {
    fn rec(n: usize, cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                cur.push(v as u32);
                rec(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n + 1], &mut out);
    out
}

/// All words of length `n` over `0..r`.
pub fn words(r: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..r).map(move |a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn graph<F: Fn(&[u32], &[u32]) -> bool>(vs: &[Vec<u32>], adj: F) -> Vec<Vec<bool>> {
    vs.iter()
        .map(|x| vs.iter().map(|y| x != y && adj(x, y)).collect())
        .collect()
}

/// A maximum clique, found as a maximum independent set of the complement by
/// branching (take or drop a vertex of largest degree; vertices of degree at most
/// one are always taken), pruned by a greedy clique cover of the complement.
/// At most 128 vertices.
pub fn max_clique(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    assert!(n <= 128, "oracle handles at most 128 vertices");
    let non: Vec<u128> = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && !adj[u][v])
                .fold(0u128, |m, v| m | 1 << v)
        })
        .collect();
    let all = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    let mut best = Vec::new();
    mis(&non, all, &mut Vec::new(), &mut best);
    best
}

fn cover_size(non: &[u128], mut avail: u128) -> usize {
    let mut count = 0;
    while avail != 0 {
        let v = avail.trailing_zeros() as usize;
        let mut cand = avail & non[v];
        avail &= !(1u128 << v);
        while cand != 0 {
            let w = cand.trailing_zeros() as usize;
            avail &= !(1u128 << w);
            cand &= non[w];
        }
        count += 1;
    }
    count
}

fn mis(non: &[u128], avail: u128, cur: &mut Vec<usize>, best: &mut Vec<usize>) {
    if cur.len() + avail.count_ones() as usize <= best.len() {
        return;
    }
    if avail == 0 {
        *best = cur.clone();
        return;
    }
    if cur.len() + cover_size(non, avail) <= best.len() {
        return;
    }
    let (mut low, mut high) = ((u32::MAX, 0), (0, 0));
    let mut bits = avail;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let d = (non[v] & avail).count_ones();
        if d < low.0 {
            low = (d, v);
        }
        if d >= high.0 {
            high = (d, v);
        }
    }
    let take = |v: usize, cur: &mut Vec<usize>, best: &mut Vec<usize>| {
        cur.push(v);
        mis(non, avail & !non[v] & !(1u128 << v), cur, best);
        cur.pop();
    };
    if low.0 <= 1 {
        take(low.1, cur, best);
        return;
    }
    take(high.1, cur, best);
    mis(non, avail & !(1u128 << high.1), cur, best);
}

/// `T(n, D)` by brute force over all permutations.
pub fn t_value(n: usize, d: &DistanceSet) -> usize {
    let vs = perms(n);
    max_clique(&graph(&vs, |x, y| differ(x, y, d))).len()
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: u64, k: u64) -> u128 {
    (0..k as u128).fold(1, |acc, i| acc * (n as u128 - i) / (i + 1))
}
