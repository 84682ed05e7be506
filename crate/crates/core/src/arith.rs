//! Exact big-integer helpers shared by the formula and construction code.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Product of all integers in `lo..=hi`, by binary splitting.
fn range_product(lo: u64, hi: u64) -> BigUint {
    if lo > hi {
        return BigUint::one();
    }
    if hi - lo < 16 {
        let mut acc = BigUint::one();
        for k in lo..=hi {
            acc *= k;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    range_product(lo, mid) * range_product(mid + 1, hi)
}

pub fn factorial(n: u64) -> BigUint {
    range_product(2, n)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    range_product(n - k + 1, n) / factorial(k)
}

/// n! / (k_1! k_2! ... k_r!) where the k_i sum to n, assembled from prime exponents.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let n: u64 = parts.iter().sum();
    let mut sorted = parts.to_vec();
    sorted.sort_unstable();
    // (part size, multiplicity)
    let mut groups: Vec<(u64, u64)> = Vec::new();
    for k in sorted {
        match groups.last_mut() {
            Some((v, c)) if *v == k => *c += 1,
            _ => groups.push((k, 1)),
        }
    }
    let factors: Vec<BigUint> = primes_up_to(n)
        .into_iter()
        .filter_map(|p| {
            let below: u64 = groups.iter().map(|&(k, c)| c * legendre(k, p)).sum();
            let e = legendre(n, p) - below;
            (e > 0).then(|| num_traits::pow(BigUint::from(p), e as usize))
        })
        .collect();
    product(&factors)
}

/// Exponent of the prime `p` in `n!`.
fn legendre(mut n: u64, p: u64) -> u64 {
    let mut e = 0;
    while n > 0 {
        n /= p;
        e += n;
    }
    e
}

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
    }
    out
}

fn product(xs: &[BigUint]) -> BigUint {
    match xs {
        [] => BigUint::one(),
        [x] => x.clone(),
        _ => {
            let (a, b) = xs.split_at(xs.len() / 2);
            product(a) * product(b)
        }
    }
}

pub fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// Base-2 logarithm of a positive big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::log2).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.log2() + shift as f64
}

/// log2(n!) computed from the exact integer for small n and by summation otherwise.
pub fn log2_factorial(n: u64) -> f64 {
    if n <= 4096 {
        log2_big(&factorial(n))
    } else {
        (2..=n).map(|k| (k as f64).log2()).sum()
    }
}

pub fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}
