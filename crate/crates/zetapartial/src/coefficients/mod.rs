//! Ideal-counting coefficients of the partial Dedekind zeta function and the
//! combinatorics around them.
//!
//! Three integer tables are exposed, all indexed 1..=floor(X):
//!
//! * kind `a`: a(n) = number of integral ideals of norm n in Q(zeta_q),
//!   multiplicative, built by a linear smallest-prime-factor sieve;
//! * kind `b`: coefficients of the finite Euler product over the primes
//!   dividing q (the ramified part), supported on products of the ramified
//!   prime-ideal norms;
//! * kind `c`: the quotient a / b as Dirichlet series (exact integer
//!   division, valid because b(1) = 1); c(p) = phi(q) exactly when
//!   p = 1 (mod q) and 0 at every other prime.
//!
//! Also here: the squarefree "restricted prime" set B(q, y) behind the
//! Brun-sieve bound, divisor counts, the powerful-times-squarefree
//! decomposition, and the Landau-type density ratio.

mod builders;

pub use builders::{
    build_b_table, build_c_table, build_coefficient_table, builder_for, builder_named,
    table_builders, TableBuilder,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{factorize, CyclotomicField};
use crate::error::{Error, Result};

/// Tables larger than this many entries are refused; roughly 1.2 GB of
/// working memory at the default. Override per call for bigger machines.
pub const DEFAULT_TABLE_CAP: u64 = 100_000_000;

/// Which coefficient series a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientKind {
    A,
    B,
    C,
}

impl CoefficientKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CoefficientKind::A => "a",
            CoefficientKind::B => "b",
            CoefficientKind::C => "c",
        }
    }
}

impl fmt::Display for CoefficientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoefficientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(CoefficientKind::A),
            "b" => Ok(CoefficientKind::B),
            "c" => Ok(CoefficientKind::C),
            other => Err(Error::domain(format!(
                "unknown coefficient kind {other:?}; expected a, b, or c"
            ))),
        }
    }
}

/// Dense table of coefficient values for 1 <= n <= floor(X).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    q: u64,
    x: f64,
    kind: CoefficientKind,
    /// values[n] for n in 1..=len; values[0] is unused and zero.
    values: Vec<u64>,
}

impl CoefficientTable {
    pub(crate) fn from_values(q: u64, x: f64, kind: CoefficientKind, values: Vec<u64>) -> Self {
        debug_assert!(values.len() >= 2);
        debug_assert_eq!(values[1], 1);
        CoefficientTable { q, x, kind, values }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn kind(&self) -> CoefficientKind {
        self.kind
    }

    /// Largest index in the table, floor(X).
    pub fn len(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient at n; panics if n is 0 or past floor(X).
    pub fn value(&self, n: u64) -> u64 {
        assert!(
            n >= 1 && n <= self.len(),
            "index {n} outside table range 1..={}",
            self.len()
        );
        self.values[n as usize]
    }

    pub fn values(&self) -> &[u64] {
        &self.values[1..]
    }

    /// (n, value) pairs with value != 0, ascending in n.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &v)| v != 0)
            .map(|(n, &v)| (n as u64, v))
    }
}

/// Number of ideal-norm contributions p^k can receive from a prime with
/// residue degree f and g primes above it: the number of multisets of the g
/// primes with total degree k, which is C(k/f + g - 1, g - 1) when f | k and
/// 0 otherwise. Panics on u64 overflow (checked variant used by sieves).
pub fn local_coefficient(f: u64, g: u64, k: u64) -> u64 {
    checked_local_coefficient(f, g, k).expect("local coefficient overflows u64")
}

pub(crate) fn checked_local_coefficient(f: u64, g: u64, k: u64) -> Option<u64> {
    assert!(f >= 1 && g >= 1, "splitting data requires f, g >= 1");
    if !k.is_multiple_of(f) {
        return Some(0);
    }
    binomial(k / f + g - 1, g - 1)
}

fn binomial(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 1..=r {
        acc = acc.checked_mul((n - r + i) as u128)? / i as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Count of 1 <= n <= x with a nonzero table entry. `x` may sit below the
/// table's range but not above it.
pub fn count_nonzero_coefficients(table: &CoefficientTable, x: f64) -> Result<u64> {
    if x.is_nan() || x < 1.0 {
        return Err(Error::domain(format!("count_nonzero requires x >= 1, got {x}")));
    }
    if x > table.x() {
        return Err(Error::range(format!(
            "count up to x = {x} requested from a table built for X = {}",
            table.x()
        )));
    }
    let limit = (x.floor() as u64).min(table.len());
    Ok(table.values[1..=limit as usize]
        .iter()
        .filter(|&&v| v != 0)
        .count() as u64)
}

/// Nonzero-coefficient density against the Landau-type scale
/// x * (log log x / log x)^(1 - 1/phi(q)). Requires x >= 16 so the inner
/// logarithm is safely positive.
pub fn density_ratio(field: &CyclotomicField, x: f64) -> Result<f64> {
    let table = build_coefficient_table(field, x)?;
    density_ratio_from_table(&table, x)
}

/// Same ratio from a prebuilt kind-`a` table (the grid path builds one table
/// at the largest x and reuses it for every smaller abscissa).
pub fn density_ratio_from_table(table: &CoefficientTable, x: f64) -> Result<f64> {
    if x.is_nan() || x < 16.0 {
        return Err(Error::domain(format!("density_ratio requires x >= 16, got {x}")));
    }
    let count = count_nonzero_coefficients(table, x)?;
    let phi = crate::cyclotomic::euler_phi(table.q());
    Ok(count as f64 / density_scale(x, phi))
}

/// The scale x * (log log x / log x)^(1 - 1/phi). Callers guarantee
/// log log x > 0 (x >= 16 is ample); phi = 1 collapses the power to 1.
pub(crate) fn density_scale(x: f64, phi: u64) -> f64 {
    let exponent = 1.0 - 1.0 / phi as f64;
    x * (x.ln().ln() / x.ln()).powf(exponent)
}

/// |B(q, y)|: squarefree n <= y all of whose prime factors are = 1 (mod q).
/// n = 1 belongs to the set vacuously, so the count is 0 only for y < 1.
pub fn brun_set_count(q: u64, y: f64) -> Result<u64> {
    let mut count = 0u64;
    walk_brun_set(q, y, &mut |_| count += 1)?;
    Ok(count)
}

/// The members of B(q, y), ascending.
pub fn brun_set_members(q: u64, y: f64) -> Result<Vec<u64>> {
    let mut members = Vec::new();
    walk_brun_set(q, y, &mut |n| members.push(n))?;
    members.sort_unstable();
    Ok(members)
}

/// Enumerates B(q, y) as products of distinct primes = 1 (mod q); the
/// visitor sees each member exactly once, in no particular order.
fn walk_brun_set(q: u64, y: f64, visit: &mut impl FnMut(u64)) -> Result<()> {
    if q < 2 {
        return Err(Error::domain(format!("brun_set requires q >= 2, got {q}")));
    }
    if !y.is_finite() {
        return Err(Error::domain(format!("brun_set requires finite y, got {y}")));
    }
    if y < 1.0 {
        return Ok(());
    }
    let limit = y.floor() as u64;
    if limit > DEFAULT_TABLE_CAP {
        return Err(Error::Capacity {
            requested: limit,
            cap: DEFAULT_TABLE_CAP,
        });
    }
    let primes: Vec<u64> = primes_up_to(limit)
        .into_iter()
        .filter(|&p| p % q == 1)
        .collect();
    fn dfs(primes: &[u64], limit: u64, start: usize, prod: u64, visit: &mut impl FnMut(u64)) {
        visit(prod);
        for j in start..primes.len() {
            if prod > limit / primes[j] {
                break;
            }
            dfs(primes, limit, j + 1, prod * primes[j], visit);
        }
    }
    dfs(&primes, limit, 0, 1, visit);
    Ok(())
}

/// d(n), the number of divisors.
pub fn divisor_count(n: u64) -> u64 {
    assert!(n >= 1, "divisor_count requires n >= 1");
    factorize(n)
        .into_iter()
        .fold(1u64, |acc, (_, a)| acc * (a as u64 + 1))
}

/// n = A * B with A powerful (every prime exponent >= 2), B squarefree, and
/// gcd(A, B) = 1. Returns (A, B).
pub fn powerful_squarefree_decomposition(n: u64) -> (u64, u64) {
    assert!(n >= 1, "decomposition requires n >= 1");
    let mut a = 1u64;
    let mut b = 1u64;
    for (p, e) in factorize(n) {
        if e >= 2 {
            a *= p.pow(e);
        } else {
            b *= p;
        }
    }
    (a, b)
}

/// Simple Eratosthenes sieve; ascending primes <= n.
pub(crate) fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Smallest prime factor for every index 2..=len by linear sieve;
/// spf[0] = spf[1] = 0.
pub(crate) fn smallest_prime_factors(len: u64) -> Vec<u32> {
    let len = len as usize;
    let mut spf = vec![0u32; len + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=len {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let p = p as usize;
            if p > spf[i] as usize || i > len / p {
                break;
            }
            spf[i * p] = p as u32;
        }
    }
    spf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{gcd, CyclotomicField};

    #[test]
    fn kind_parsing_round_trips() {
        for kind in [CoefficientKind::A, CoefficientKind::B, CoefficientKind::C] {
            assert_eq!(kind.as_str().parse::<CoefficientKind>().unwrap(), kind);
        }
        assert!("z".parse::<CoefficientKind>().is_err());
    }

    #[test]
    fn local_coefficient_examples() {
        // Split prime in a quadratic field (f = 1, g = 2): k + 1 ideals.
        assert_eq!(local_coefficient(1, 2, 2), 3);
        assert_eq!(local_coefficient(1, 2, 0), 1);
        // Inert prime (f = 2, g = 1): only even k contribute.
        assert_eq!(local_coefficient(2, 1, 3), 0);
        assert_eq!(local_coefficient(2, 1, 4), 1);
        // Totally split in a quartic field: C(k + 3, 3).
        assert_eq!(local_coefficient(1, 4, 2), 10);
    }

    #[test]
    fn binomial_is_exact() {
        assert_eq!(binomial(10, 3), Some(120));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(66, 33), Some(7_219_428_434_016_265_740));
        assert_eq!(binomial(500, 250), None);
    }

    #[test]
    fn divisor_count_small() {
        assert_eq!(divisor_count(1), 1);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(divisor_count(97), 2);
        assert_eq!(divisor_count(64), 7);
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(powerful_squarefree_decomposition(12), (4, 3));
        assert_eq!(powerful_squarefree_decomposition(8), (8, 1));
        assert_eq!(powerful_squarefree_decomposition(1), (1, 1));
        assert_eq!(powerful_squarefree_decomposition(30), (1, 30));
    }

    #[test]
    fn decomposition_recombines() {
        for n in 1..=20_000u64 {
            let (a, b) = powerful_squarefree_decomposition(n);
            assert_eq!(a * b, n);
            assert_eq!(gcd(a, b), 1);
            // B squarefree: no square divides it.
            for p in [2u64, 3, 5, 7, 11, 13] {
                assert!(b % (p * p) != 0, "b = {b} not squarefree at n = {n}");
            }
            // A powerful: every prime dividing it does so at least twice.
            for (p, e) in crate::cyclotomic::factorize(a) {
                assert!(e >= 2, "a = {a} has single factor {p} at n = {n}");
            }
        }
    }

    #[test]
    fn brun_set_examples() {
        assert_eq!(brun_set_count(4, 30.0).unwrap(), 5);
        assert_eq!(brun_set_members(4, 30.0).unwrap(), vec![1, 5, 13, 17, 29]);
        assert_eq!(brun_set_count(3, 20.0).unwrap(), 4);
        assert_eq!(brun_set_members(3, 20.0).unwrap(), vec![1, 7, 13, 19]);
        assert_eq!(brun_set_count(7, 0.5).unwrap(), 0);
        assert_eq!(brun_set_count(5, 1.0).unwrap(), 1);
    }

    #[test]
    fn brun_set_monotone_in_y() {
        let mut prev = 0;
        for y in [1.0, 10.0, 100.0, 1_000.0, 10_000.0] {
            let c = brun_set_count(4, y).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn brun_set_rejects_bad_q() {
        assert!(brun_set_count(1, 10.0).is_err());
        assert!(brun_set_count(0, 10.0).is_err());
    }

    #[test]
    fn density_ratio_is_count_over_scale_for_rationals() {
        // q = 2: every a(n) = 1, the exponent vanishes, so the ratio is
        // floor(x)/x.
        let field = CyclotomicField::new(2).unwrap();
        let r = density_ratio(&field, 100.0).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let r = density_ratio(&field, 100.5).unwrap();
        assert!((r - 100.0 / 100.5).abs() < 1e-12);
    }

    #[test]
    fn density_ratio_rejects_small_x() {
        let field = CyclotomicField::new(4).unwrap();
        assert!(density_ratio(&field, 15.0).is_err());
    }

    #[test]
    fn primes_sieve_agrees_with_trial_division() {
        let primes = primes_up_to(1_000);
        assert_eq!(primes.len(), 168);
        for &p in &primes {
            assert!(crate::cyclotomic::is_prime(p));
        }
    }

    #[test]
    fn spf_sieve_marks_smallest_factor() {
        let spf = smallest_prime_factors(10_000);
        for n in 2..=10_000u64 {
            let s = spf[n as usize] as u64;
            assert!(n % s == 0);
            assert!(crate::cyclotomic::is_prime(s));
            // No prime below s divides n.
            for p in [2u64, 3, 5, 7] {
                if p < s {
                    assert!(n % p != 0, "n = {n}, spf = {s}");
                }
            }
        }
    }
}
