//! Closed-form values and bounds on `T(n, D)`, evaluated exactly.
//!
//! Logarithms are base 2 and are always taken of the exact integers.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::{binomial, factorial, log2_big, log2_factorial, multinomial, pow2};
use crate::capacity::QuotientGraph;
use crate::constructions::valuation_bits;
use crate::distance_sets::DistanceSet;
use crate::error::{Error, Result};
use crate::perm::{strong_certificate_violation, PermFamily};

/// Literature interval for the split strength of `{1}` and its complement.
pub const COLLIDING_SPLIT_REFERENCE: (f64, f64) = (0.33, 0.5);

/// Largest graph accepted by [`chromatic_number`].
pub const MAX_CHROMATIC_VERTICES: usize = 16;

/// `n! / 2^floor(n/2)`.
pub fn formula_theorem1(n: u64) -> BigUint {
    factorial(n) >> (n / 2)
}

/// `n! / ((2^floor(a/2))^(q-m) (2^floor((a+1)/2))^m)` with `n = aq + m`.
pub fn formula_corollary(n: u64, q: u64) -> BigUint {
    assert!(q >= 1, "q must be positive");
    let (a, m) = (n / q, n % q);
    let shift = (a / 2) * (q - m) + a.div_ceil(2) * m;
    factorial(n) >> shift
}

/// `C(n, floor(n/2))`.
pub fn formula_binomial_middle(n: u64) -> BigUint {
    binomial(n, n / 2)
}

/// Size of the hookup family: `(ceil(n/2)+1)! floor(n/2)! / 2`.
pub fn hookup_size(n: u64) -> BigUint {
    let (c, k) = (n.div_ceil(2), n / 2);
    factorial(c + 1) * factorial(k) / 2u32
}

/// The lower bound in its displayed form `n! (ceil(n/2)+1) / (2 C(n, floor(n/2)))`.
/// Returns `None` if the division is not exact.
pub fn hookup_lower_expression(n: u64) -> Option<BigUint> {
    let num = factorial(n) * (n.div_ceil(2) + 1);
    let den = formula_binomial_middle(n) * 2u32;
    (&num % &den).is_zero().then(|| num / den)
}

/// `(n^a)!^(n^(1-a))` with `a = p/q`: the size of the valuation family.
pub fn valuation_lower(n: u64, p: u32, q: u32) -> Result<BigUint> {
    let t = valuation_bits(n, p, q)?;
    let inner = t / q * p;
    Ok(factorial_power(inner, t - inner))
}

/// `(2^(e+f))! / (2^e)!^(2^f)`.
fn factorial_quotient(e: u32, f: u32) -> BigUint {
    multinomial(&vec![1u64 << e; 1usize << f])
}

/// `(2^e)!^(2^f)`.
fn factorial_power(e: u32, f: u32) -> BigUint {
    num_traits::pow(factorial(1u64 << e), 1usize << f)
}

/// `n! / (n^(1-a))!^(n^a)`.
pub fn valuation_upper(n: u64, p: u32, q: u32) -> Result<BigUint> {
    let t = valuation_bits(n, p, q)?;
    let inner = t / q * p;
    Ok(factorial_quotient(t - inner, inner))
}

/// Ceiling of `10^((n-4)/4)`, at least 1.
pub fn kms_lower(n: u64) -> BigUint {
    if n <= 4 {
        return BigUint::one();
    }
    let target = num_traits::pow(BigUint::from(10u32), (n - 4) as usize);
    let mut root = target.nth_root(4);
    if num_traits::pow(root.clone(), 4) < target {
        root += 1u32;
    }
    root
}

/// Where a bound comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Size of an explicit, verified construction.
    Construction(&'static str),
    /// Closed-form value or bound.
    Formula(&'static str),
    /// Constant quoted from the literature.
    Literature(&'static str),
    /// Exact solver result.
    Solver,
    /// `n! / |C|` for an independent certificate `C`.
    Certificate,
    /// Coloring argument.
    Coloring(&'static str),
    /// 1 and `n!`.
    Trivial,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Construction(s) => write!(f, "construction:{s}"),
            Self::Formula(s) => write!(f, "formula:{s}"),
            Self::Literature(s) => write!(f, "literature:{s}"),
            Self::Solver => f.write_str("solver"),
            Self::Certificate => f.write_str("certificate"),
            Self::Coloring(s) => write!(f, "coloring:{s}"),
            Self::Trivial => f.write_str("trivial"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValue {
    pub value: BigUint,
    pub provenance: Provenance,
}

impl BoundValue {
    pub fn new(value: BigUint, provenance: Provenance) -> Self {
        Self { value, provenance }
    }

    pub fn log2(&self) -> f64 {
        log2_big(&self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: u64,
    pub d: DistanceSet,
    pub lower: BoundValue,
    pub upper: BoundValue,
}

impl BoundReport {
    pub fn is_consistent(&self) -> bool {
        self.lower.value <= self.upper.value
    }

    pub fn is_exact(&self) -> bool {
        self.lower.value == self.upper.value
    }
}

/// Prop-2 style sandwich for `D = 2N`.
pub fn hookup_bounds(n: u64) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::Parameter("hookup bounds need n >= 2".into()));
    }
    Ok(BoundReport {
        n,
        d: DistanceSet::evens(),
        lower: BoundValue::new(hookup_size(n), Provenance::Construction("hookup")),
        upper: BoundValue::new(formula_theorem1(n), Provenance::Formula("n!/2^floor(n/2)")),
    })
}

/// Bounds for `E_(p/q)` and for its complement at an admissible `n`.
pub fn valuation_bounds(n: u64, p: u32, q: u32) -> Result<(BoundReport, BoundReport)> {
    let t = valuation_bits(n, p, q)?;
    let inner = t / q * p;
    let small = factorial_power(inner, t - inner); // (n^a)!^(n^(1-a))
    let large = factorial_power(t - inner, inner); // (n^(1-a))!^(n^a)
    let d = DistanceSet::valuation(p, q)?;
    let for_d = BoundReport {
        n,
        d: d.clone(),
        lower: BoundValue::new(small.clone(), Provenance::Construction("valuation")),
        upper: BoundValue::new(
            factorial_quotient(t - inner, inner),
            Provenance::Certificate,
        ),
    };
    let for_complement = BoundReport {
        n,
        d: d.complement(),
        lower: BoundValue::new(large, Provenance::Construction("valuation-complement")),
        upper: BoundValue::new(
            factorial_quotient(inner, t - inner),
            Provenance::Certificate,
        ),
    };
    Ok((for_d, for_complement))
}

/// `log2 lower(E_(p/q)) / log2 n!` from exact integers.
pub fn valuation_log_ratio(n: u64, p: u32, q: u32) -> Result<f64> {
    let lower = valuation_lower(n, p, q)?;
    Ok(log2_big(&lower) / log2_big(&factorial(n)))
}

/// Exact chromatic number by trying `k = 1, 2, ...` colorings with backtracking.
pub fn chromatic_number(m: &QuotientGraph) -> Result<usize> {
    let r = m.order();
    if r > MAX_CHROMATIC_VERTICES {
        return Err(Error::CapExceeded {
            what: "exact chromatic number".into(),
            needed: format!("{r} vertices"),
            cap: MAX_CHROMATIC_VERTICES as u64,
        });
    }
    fn colorable(m: &QuotientGraph, k: usize, v: usize, colors: &mut Vec<usize>) -> bool {
        if v == m.order() {
            return true;
        }
        // symmetry breaking: vertex v may use at most one new color
        let used = colors[..v].iter().copied().max().map_or(0, |c| c + 1);
        for c in 0..k.min(used + 1) {
            if (0..v).all(|u| !m.is_edge(u, v) || colors[u] != c) {
                colors[v] = c;
                if colorable(m, k, v + 1, colors) {
                    return true;
                }
            }
        }
        false
    }
    let mut colors = vec![0; r];
    Ok((1..=r)
        .find(|&k| colorable(m, k, 0, &mut colors))
        .unwrap_or(r))
}

/// `chi(M)^n`: the residue coloring lifts to the infinite graph, and sequences with the
/// same color pattern are never different.
pub fn chromatic_power_bound(m: &QuotientGraph, n: u64) -> Result<BigUint> {
    let chi = chromatic_number(m)?;
    Ok(num_traits::pow(BigUint::from(chi), n as usize))
}

/// `n! / |C|` for a family `C` that is independent in `H_D(n)`, i.e. all positionwise
/// differences lie in `{0}` and the complement of `D`.
pub fn certificate_upper_bound(c: &PermFamily, d: &DistanceSet) -> Result<BigUint> {
    if c.is_empty() {
        return Err(Error::Parameter("empty certificate".into()));
    }
    if let Some(v) = strong_certificate_violation(c, &d.complement()) {
        return Err(Error::InvalidCertificate {
            left: v.left.into_entries(),
            right: v.right.into_entries(),
            position: v.position,
            difference: v.difference,
        });
    }
    Ok(factorial(c.n() as u64) / BigUint::from(c.len()))
}

/// Lower bound `prod_m T(floor((n-m)/q), {1})` with `T(., {1})` supplied by the caller.
pub fn residue_concat_lower_expression<F>(n: u64, q: u64, colliding: F) -> BigUint
where
    F: Fn(u64) -> BigUint,
{
    (0..q)
        .map(|m| colliding(n.saturating_sub(m) / q))
        .fold(BigUint::one(), |acc, x| acc * x)
}

fn singleton_complement(d: &DistanceSet) -> Option<u64> {
    match d {
        DistanceSet::Complement(inner) => match inner.as_ref() {
            DistanceSet::Finite(v) if v.len() == 1 => Some(v[0]),
            _ => None,
        },
        DistanceSet::Cofinite(v) if v.len() == 1 => Some(v[0]),
        _ => None,
    }
}

fn is_evens(d: &DistanceSet) -> bool {
    match d {
        DistanceSet::Residue { modulus, allowed } => *modulus == 2 && allowed == &[0],
        _ => false,
    }
}

/// Best known bounds for `T(n, d)` from the closed forms this crate knows about,
/// falling back to `[1, n!]`.
pub fn report_for(n: u64, d: &DistanceSet) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let nf = factorial(n);
    let exact = |v: BigUint, what: &'static str| BoundReport {
        n,
        d: d.clone(),
        lower: BoundValue::new(v.clone(), Provenance::Formula(what)),
        upper: BoundValue::new(v, Provenance::Formula(what)),
    };
    if let Some(q) = singleton_complement(d) {
        return Ok(if q == 1 {
            exact(formula_theorem1(n), "n!/2^floor(n/2)")
        } else {
            exact(formula_corollary(n, q), "corollary")
        });
    }
    if let DistanceSet::Complement(inner) = d {
        if is_evens(inner) {
            return Ok(exact(formula_binomial_middle(n), "binomial"));
        }
        if let DistanceSet::Valuation { p, q } = inner.as_ref() {
            if valuation_bits(n, *p, *q).is_ok() {
                return Ok(valuation_bounds(n, *p, *q)?.1);
            }
        }
    }
    if is_evens(d) && n >= 2 {
        return hookup_bounds(n);
    }
    if let DistanceSet::Valuation { p, q } = d {
        if valuation_bits(n, *p, *q).is_ok() {
            return Ok(valuation_bounds(n, *p, *q)?.0);
        }
    }
    if let DistanceSet::Finite(v) = d {
        if v.len() == 1 {
            let q = v[0];
            let upper = pow2(n).min(nf.clone());
            let lower = if q == 1 {
                kms_lower(n)
            } else {
                // class sizes of the residues mod q inside [n]
                (0..q)
                    .map(|m| {
                        let size = (1..=n).filter(|x| x % q == m).count() as u64;
                        kms_lower(size)
                    })
                    .fold(BigUint::one(), |a, b| a * b)
            };
            return Ok(BoundReport {
                n,
                d: d.clone(),
                lower: BoundValue::new(lower, Provenance::Literature("10^((n-4)/4)")),
                upper: BoundValue::new(upper, Provenance::Literature("2^n")),
            });
        }
    }
    Ok(BoundReport {
        n,
        d: d.clone(),
        lower: BoundValue::new(BigUint::one(), Provenance::Trivial),
        upper: BoundValue::new(nf, Provenance::Trivial),
    })
}

/// Finite-`n` interval for `(1/n) log2(T(n,D) T(n,complement of D) / n!)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitStrengthEstimate {
    pub n: u64,
    pub d: DistanceSet,
    pub lo: f64,
    pub hi: f64,
}

impl SplitStrengthEstimate {
    pub const LABEL: &'static str = "finite-n estimate";

    pub fn contains(&self, x: f64) -> bool {
        self.lo - 1e-12 <= x && x <= self.hi + 1e-12
    }
}

pub fn split_strength(
    n: u64,
    report: &BoundReport,
    complement: &BoundReport,
) -> Result<SplitStrengthEstimate> {
    if report.n != n || complement.n != n {
        return Err(Error::Parameter("reports must be for the same n".into()));
    }
    let lnf = log2_factorial(n);
    let lo = (report.lower.log2() + complement.lower.log2() - lnf) / n as f64;
    let hi = (report.upper.log2() + complement.upper.log2() - lnf) / n as f64;
    Ok(SplitStrengthEstimate {
        n,
        d: report.d.clone(),
        lo,
        hi,
    })
}

/// Split-strength interval for `{1}` and its complement from the literature bounds on
/// `T(n, {1})` and the exact complement value.
pub fn colliding_split_interval(n: u64) -> Result<SplitStrengthEstimate> {
    let d = DistanceSet::Finite(vec![1]);
    split_strength(n, &report_for(n, &d)?, &report_for(n, &d.complement())?)
}
