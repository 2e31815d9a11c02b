//! Table-building strategies. Each coefficient kind is one strategy behind
//! the `TableBuilder` trait, registered under its series name so the CLI can
//! select a builder at runtime (`coeffs --kind {a,b,c}`).
//!
//! Kinds `a` and `b` share the multiplicative sieve driver and differ only in
//! their prime-local rule; kind `c` divides the other two series exactly.

use crate::cyclotomic::{multiplicative_order, CyclotomicField};
use crate::error::{Error, Result};

use super::{
    checked_local_coefficient, smallest_prime_factors, CoefficientKind, CoefficientTable,
    DEFAULT_TABLE_CAP,
};

/// One strategy for producing a coefficient table.
pub trait TableBuilder: Sync {
    /// Registry name; also the series name used by the CLI.
    fn name(&self) -> &'static str;

    fn kind(&self) -> CoefficientKind;

    /// One-line description for help output.
    fn describe(&self) -> &'static str;

    /// Build values for 1..=floor(x); `cap` bounds the table length.
    fn build(&self, field: &CyclotomicField, x: f64, cap: u64) -> Result<CoefficientTable>;
}

struct SplittingSieve;
struct RamifiedEuler;
struct SeriesQuotient;

static BUILDERS: [&dyn TableBuilder; 3] = [&SplittingSieve, &RamifiedEuler, &SeriesQuotient];

/// All registered builders, in registry order (a, b, c).
pub fn table_builders() -> &'static [&'static dyn TableBuilder] {
    &BUILDERS
}

/// The builder registered for a kind.
pub fn builder_for(kind: CoefficientKind) -> &'static dyn TableBuilder {
    BUILDERS
        .iter()
        .copied()
        .find(|b| b.kind() == kind)
        .expect("every kind has a registered builder")
}

/// Look a builder up by its registry name.
pub fn builder_named(name: &str) -> Option<&'static dyn TableBuilder> {
    BUILDERS.iter().copied().find(|b| b.name() == name)
}

/// Ideal-count coefficients a(n) up to floor(x), default cap.
pub fn build_coefficient_table(field: &CyclotomicField, x: f64) -> Result<CoefficientTable> {
    builder_for(CoefficientKind::A).build(field, x, DEFAULT_TABLE_CAP)
}

/// Ramified-part coefficients b(n) up to floor(x), default cap.
pub fn build_b_table(field: &CyclotomicField, x: f64) -> Result<CoefficientTable> {
    builder_for(CoefficientKind::B).build(field, x, DEFAULT_TABLE_CAP)
}

/// Quotient coefficients c(n) = (a/b)(n) up to floor(x), default cap.
pub fn build_c_table(field: &CyclotomicField, x: f64) -> Result<CoefficientTable> {
    builder_for(CoefficientKind::C).build(field, x, DEFAULT_TABLE_CAP)
}

impl TableBuilder for SplittingSieve {
    fn name(&self) -> &'static str {
        "a"
    }

    fn kind(&self) -> CoefficientKind {
        CoefficientKind::A
    }

    fn describe(&self) -> &'static str {
        "ideal counts a(n) from prime splitting, linear multiplicative sieve"
    }

    fn build(&self, field: &CyclotomicField, x: f64, cap: u64) -> Result<CoefficientTable> {
        let rule = LocalRule::new(field, false);
        let values = multiplicative_table(x, cap, &rule)?;
        Ok(CoefficientTable::from_values(
            field.q(),
            x,
            CoefficientKind::A,
            values,
        ))
    }
}

impl TableBuilder for RamifiedEuler {
    fn name(&self) -> &'static str {
        "b"
    }

    fn kind(&self) -> CoefficientKind {
        CoefficientKind::B
    }

    fn describe(&self) -> &'static str {
        "ramified Euler factors b(n), supported on ramified prime-ideal norms"
    }

    fn build(&self, field: &CyclotomicField, x: f64, cap: u64) -> Result<CoefficientTable> {
        let rule = LocalRule::new(field, true);
        let values = multiplicative_table(x, cap, &rule)?;
        Ok(CoefficientTable::from_values(
            field.q(),
            x,
            CoefficientKind::B,
            values,
        ))
    }
}

impl TableBuilder for SeriesQuotient {
    fn name(&self) -> &'static str {
        "c"
    }

    fn kind(&self) -> CoefficientKind {
        CoefficientKind::C
    }

    fn describe(&self) -> &'static str {
        "quotient c(n) = (a/b)(n) by exact Dirichlet-series division"
    }

    fn build(&self, field: &CyclotomicField, x: f64, cap: u64) -> Result<CoefficientTable> {
        let a = builder_for(CoefficientKind::A).build(field, x, cap)?;
        let b = builder_for(CoefficientKind::B).build(field, x, cap)?;
        let len = a.len() as usize;

        // b(1) = 1, so c(n) = a(n) - sum over divisors d > 1 of n with
        // b(d) != 0 of b(d) * c(n/d); ascending n makes every c(n/d) final
        // before it is read. The support of b is tiny (products of ramified
        // norms), so the divisor scan runs over that list only.
        let support: Vec<(u64, u64)> = b.nonzero().filter(|&(d, _)| d >= 2).collect();
        let mut values = vec![0u64; len + 1];
        values[1] = 1;
        for n in 2..=len as u64 {
            let mut acc = a.value(n) as i128;
            for &(d, bd) in &support {
                if d > n {
                    break;
                }
                if n % d == 0 {
                    acc -= bd as i128 * values[(n / d) as usize] as i128;
                }
            }
            if acc < 0 {
                return Err(Error::numerical(format!(
                    "series division produced a negative coefficient at n = {n}"
                )));
            }
            if acc > u64::MAX as i128 {
                return Err(Error::Overflow(format!("c({n}) exceeds u64")));
            }
            values[n as usize] = acc as u64;
        }
        Ok(CoefficientTable::from_values(
            field.q(),
            x,
            CoefficientKind::C,
            values,
        ))
    }
}

/// Per-field prime-local data: residue degree and prime count by residue
/// class for the unramified primes, explicit entries for the finitely many
/// ramified ones. Restricting to ramified primes yields the b-series rule.
struct LocalRule {
    q: u64,
    by_class: Vec<Option<(u64, u64)>>,
    ramified: Vec<(u64, u64, u64)>,
    ramified_only: bool,
}

impl LocalRule {
    fn new(field: &CyclotomicField, ramified_only: bool) -> Self {
        let q = field.q();
        let n0 = field.n0();
        let mut by_class: Vec<Option<(u64, u64)>> = vec![None; q as usize];
        for r in 0..q {
            if crate::cyclotomic::gcd(r, q) == 1 {
                let f = multiplicative_order(r, q).expect("r coprime to q");
                by_class[r as usize] = Some((f, n0 / f));
            }
        }
        let ramified = field.ramified().iter().map(|r| (r.p, r.f, r.g)).collect();
        LocalRule {
            q,
            by_class,
            ramified,
            ramified_only,
        }
    }

    /// Coefficient contribution of the full p-power p^k.
    fn value(&self, p: u64, k: u64) -> Result<u64> {
        let (f, g) = if self.q.is_multiple_of(p) {
            let &(_, f, g) = self
                .ramified
                .iter()
                .find(|&&(rp, _, _)| rp == p)
                .expect("prime divisor of q is listed");
            (f, g)
        } else if self.ramified_only {
            return Ok(0);
        } else {
            self.by_class[(p % self.q) as usize].expect("unramified prime is coprime to q")
        };
        checked_local_coefficient(f, g, k)
            .ok_or_else(|| Error::Overflow(format!("coefficient at p = {p}, k = {k} exceeds u64")))
    }
}

/// Shared sieve driver: extends a prime-local rule multiplicatively to all
/// n <= floor(x) via smallest prime factors.
fn multiplicative_table(x: f64, cap: u64, rule: &LocalRule) -> Result<Vec<u64>> {
    if !x.is_finite() || x < 1.0 {
        return Err(Error::domain(format!(
            "coefficient table requires finite x >= 1, got {x}"
        )));
    }
    let len = x.floor() as u64;
    if len > cap {
        return Err(Error::Capacity {
            requested: len,
            cap,
        });
    }
    let spf = smallest_prime_factors(len);
    let mut values = vec![0u64; len as usize + 1];
    values[1] = 1;
    for n in 2..=len {
        let p = spf[n as usize] as u64;
        let mut m = n;
        let mut k = 0u64;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let local = rule.value(p, k)?;
        let rest = values[m as usize];
        values[n as usize] = local.checked_mul(rest).ok_or_else(|| {
            Error::Overflow(format!("coefficient at n = {n} exceeds u64"))
        })?;
    }
    Ok(values)
}
