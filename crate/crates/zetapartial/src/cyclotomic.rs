//! Arithmetic of the cyclotomic field Q(zeta_q): Euler's totient,
//! multiplicative orders, and the splitting type (e, f, g) of a rational
//! prime p. Everything here is exact integer arithmetic; factoring is plain
//! trial division, which is the right tool for the desk-scale moduli
//! (q up to ~1e4) this crate targets.
//!
//! The splitting law: for p not dividing q, p is unramified with residue
//! degree f = ord_q(p) and g = phi(q)/f primes above it. For p | q write
//! q = p^a * m with p not dividing m; then e = phi(p^a), f = ord_m(p),
//! g = phi(m)/f. In both cases e*f*g = phi(q). The q = 2 case degenerates
//! gracefully (phi(2) = 1, the field is Q itself).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler's totient. `m` must be at least 1.
pub fn euler_phi(m: u64) -> u64 {
    assert!(m >= 1, "euler_phi requires m >= 1");
    factorize(m)
        .into_iter()
        .fold(1u64, |acc, (p, a)| acc * p.pow(a - 1) * (p - 1))
}

/// Least k >= 1 with a^k = 1 (mod m). `a` and `m` must be coprime;
/// ord(a, 1) = 1 for every a.
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("multiplicative_order requires m >= 1"));
    }
    if m == 1 {
        return Ok(1);
    }
    let a = a % m;
    if gcd(a, m) != 1 {
        return Err(Error::domain(format!(
            "multiplicative_order: {a} and {m} are not coprime"
        )));
    }
    let mut cur = a;
    let mut k = 1u64;
    while cur != 1 {
        cur = mul_mod(cur, a, m);
        k += 1;
    }
    Ok(k)
}

/// Splitting data of a rational prime in Q(zeta_q): ramification index `e`,
/// residue degree `f`, and the number `g` of primes above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingType {
    pub e: u64,
    pub f: u64,
    pub g: u64,
}

/// A prime divisor of q together with its splitting data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamifiedPrime {
    pub p: u64,
    pub e: u64,
    pub f: u64,
    pub g: u64,
}

/// The cyclotomic field Q(zeta_q), q >= 2. `n0` is the degree phi(q);
/// `ramified` lists the distinct prime divisors of q in ascending order
/// with their splitting data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicField {
    q: u64,
    n0: u64,
    ramified: Vec<RamifiedPrime>,
}

impl CyclotomicField {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::domain(format!(
                "cyclotomic field requires q >= 2, got {q}"
            )));
        }
        let factors = factorize(q);
        let n0 = factors
            .iter()
            .fold(1u64, |acc, &(p, a)| acc * p.pow(a - 1) * (p - 1));
        let mut ramified = Vec::with_capacity(factors.len());
        for &(p, _) in &factors {
            let s = splitting_of_divisor(q, p);
            debug_assert_eq!(s.e * s.f * s.g, n0);
            ramified.push(RamifiedPrime {
                p,
                e: s.e,
                f: s.f,
                g: s.g,
            });
        }
        Ok(CyclotomicField { q, n0, ramified })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Degree of the field, phi(q).
    pub fn n0(&self) -> u64 {
        self.n0
    }

    /// Prime divisors of q, ascending, with splitting data.
    pub fn ramified(&self) -> &[RamifiedPrime] {
        &self.ramified
    }

    /// Splitting type of a rational prime p. Rejects composite p.
    pub fn splitting_type(&self, p: u64) -> Result<SplittingType> {
        if !is_prime(p) {
            return Err(Error::domain(format!("splitting_type: {p} is not prime")));
        }
        Ok(self.splitting_unchecked(p))
    }

    /// Splitting type assuming p is prime; hot path for sieves that
    /// enumerate primes themselves.
    pub(crate) fn splitting_unchecked(&self, p: u64) -> SplittingType {
        if self.q.is_multiple_of(p) {
            let r = self
                .ramified
                .iter()
                .find(|r| r.p == p)
                .expect("prime divisor present in ramified list");
            SplittingType {
                e: r.e,
                f: r.f,
                g: r.g,
            }
        } else {
            let f = multiplicative_order(p % self.q, self.q)
                .expect("p coprime to q by construction");
            SplittingType {
                e: 1,
                f,
                g: self.n0 / f,
            }
        }
    }
}

/// Splitting data for a prime divisor p of q.
fn splitting_of_divisor(q: u64, p: u64) -> SplittingType {
    let mut m = q;
    let mut pa = 1u64;
    while m.is_multiple_of(p) {
        m /= p;
        pa *= p;
    }
    let e = euler_phi(pa);
    let f = multiplicative_order(p % m.max(1), m).expect("p coprime to cofactor");
    let g = euler_phi(m) / f;
    SplittingType { e, f, g }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Trial-division factorization, factors ascending as (prime, exponent).
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut a = 0u32;
            while n.is_multiple_of(d) {
                n /= d;
                a += 1;
            }
            out.push((d, a));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_small_values() {
        let table = [
            (1, 1),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 4),
            (6, 2),
            (8, 4),
            (12, 4),
            (100, 40),
        ];
        for (m, want) in table {
            assert_eq!(euler_phi(m), want, "phi({m})");
        }
    }

    #[test]
    fn phi_matches_coprime_count() {
        for m in 1..=500u64 {
            let direct = (1..=m).filter(|&k| gcd(k, m) == 1).count() as u64;
            assert_eq!(euler_phi(m), direct, "phi({m})");
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(3, 4).unwrap(), 2);
        assert_eq!(multiplicative_order(2, 7).unwrap(), 3);
        assert_eq!(multiplicative_order(7, 1).unwrap(), 1);
        assert_eq!(multiplicative_order(1, 9).unwrap(), 1);
    }

    #[test]
    fn order_rejects_non_coprime() {
        assert!(multiplicative_order(2, 4).is_err());
        assert!(multiplicative_order(0, 5).is_err());
    }

    #[test]
    fn order_divides_phi() {
        for m in 2..=120u64 {
            let phi = euler_phi(m);
            for a in 1..m {
                if gcd(a, m) == 1 {
                    let k = multiplicative_order(a, m).unwrap();
                    assert_eq!(phi % k, 0, "ord({a}, {m}) = {k} must divide phi = {phi}");
                    assert_eq!(mod_pow(a, k, m), 1);
                }
            }
        }
    }

    #[test]
    fn field_rejects_tiny_q() {
        assert!(CyclotomicField::new(0).is_err());
        assert!(CyclotomicField::new(1).is_err());
        assert!(CyclotomicField::new(2).is_ok());
    }

    #[test]
    fn splitting_examples_q4() {
        let k = CyclotomicField::new(4).unwrap();
        assert_eq!(k.n0(), 2);
        assert_eq!(
            k.splitting_type(5).unwrap(),
            SplittingType { e: 1, f: 1, g: 2 }
        );
        assert_eq!(
            k.splitting_type(2).unwrap(),
            SplittingType { e: 2, f: 1, g: 1 }
        );
        assert_eq!(
            k.splitting_type(3).unwrap(),
            SplittingType { e: 1, f: 2, g: 1 }
        );
    }

    #[test]
    fn splitting_ramified_q3() {
        let k = CyclotomicField::new(3).unwrap();
        assert_eq!(
            k.splitting_type(3).unwrap(),
            SplittingType { e: 2, f: 1, g: 1 }
        );
    }

    #[test]
    fn splitting_rejects_composite() {
        let k = CyclotomicField::new(4).unwrap();
        assert!(k.splitting_type(6).is_err());
        assert!(k.splitting_type(1).is_err());
        assert!(k.splitting_type(0).is_err());
    }

    #[test]
    fn ramified_list_is_ascending_and_complete() {
        let k = CyclotomicField::new(12).unwrap();
        let ps: Vec<u64> = k.ramified().iter().map(|r| r.p).collect();
        assert_eq!(ps, vec![2, 3]);
        // q = 12: p = 2 has e = phi(4) = 2, f = ord_3(2) = 2, g = 1;
        // p = 3 has e = phi(3) = 2, f = ord_4(3) = 2, g = 1.
        assert_eq!(k.ramified()[0].e * k.ramified()[0].f * k.ramified()[0].g, 4);
        assert_eq!(k.ramified()[1].e * k.ramified()[1].f * k.ramified()[1].g, 4);
    }

    #[test]
    fn efg_product_sweep() {
        let primes: Vec<u64> = (2..10_000u64).filter(|&n| is_prime(n)).collect();
        for q in 2..=200u64 {
            let k = CyclotomicField::new(q).unwrap();
            for &p in primes.iter().take(300) {
                let s = k.splitting_unchecked(p);
                assert_eq!(
                    s.e * s.f * s.g,
                    k.n0(),
                    "e*f*g != phi({q}) at p = {p}: {s:?}"
                );
            }
        }
    }

    #[test]
    fn q_twice_odd_matches_odd_part_for_odd_primes() {
        // Q(zeta_q) = Q(zeta_{q/2}) for q = 2 mod 4; odd primes must split
        // identically in both presentations.
        for half in (3..100u64).step_by(2) {
            let k2 = CyclotomicField::new(2 * half).unwrap();
            let k1 = CyclotomicField::new(half).unwrap();
            for p in [3u64, 5, 7, 11, 13, 97, 101, 997] {
                if !is_prime(p) {
                    continue;
                }
                assert_eq!(
                    k2.splitting_unchecked(p),
                    k1.splitting_unchecked(p),
                    "q = {}, p = {p}",
                    2 * half
                );
            }
        }
    }

    fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
        let mut acc = 1u64;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc as u128 * b as u128 % m as u128) as u64;
            }
            b = (b as u128 * b as u128 % m as u128) as u64;
            e >>= 1;
        }
        acc
    }
}
