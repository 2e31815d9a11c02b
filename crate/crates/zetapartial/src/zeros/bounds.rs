//! Zero-free strip bounds.
//!
//! All zeros of the partial sum lie strictly between `alpha` and `beta`:
//! to the right of `beta` the n = 1 term dominates the rest of the series,
//! and to the left of `alpha` the leading term a(N) N^{-s} does. Each bound
//! solves a dominance-breakeven equation that is strictly monotone in the
//! real variable, so bisection pins it down to the requested width.

use crate::dirichlet::PartialSum;
use crate::error::{Error, Result};
use crate::numerics::{bisect, KahanSum};
use crate::zeros::StripBounds;

/// Default slack parameter in the closed-form left bound.
pub const DEFAULT_DELTA0: f64 = 0.1;

/// Right edge of the zero strip: the unique real solution of
/// sum_{2 <= n <= X} a(n) n^{-beta} = 1. For Re s > beta the n = 1 term
/// strictly dominates, so the sum cannot vanish.
pub fn beta_bound(sum: &PartialSum, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let tail = tail_terms(sum)?;

    // f is strictly decreasing with f(0) >= 0 (each coefficient is >= 1)
    // and f -> -1 as beta -> infinity.
    let f = |beta: f64| {
        let mut acc = KahanSum::new();
        for &(log_n, a) in &tail {
            acc.add(a * (-beta * log_n).exp());
        }
        acc.value() - 1.0
    };

    let lo = 0.0;
    if f(lo) <= 0.0 {
        // Happens only when the whole tail is a single unit coefficient
        // (e.g. 1 + 2^{-s}): the balance point is exactly 0.
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut guard = 0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 120 {
            return Err(Error::numerical(
                "failed to bracket the right strip bound".to_string(),
            ));
        }
    }
    Ok(bisect(f, lo, hi, tol))
}

/// Left edge of the zero strip: the unique real solution of
/// a(N) N^{-alpha} = sum_{n < N} a(n) n^{-alpha}, where N is the leading
/// index. For Re s < alpha the leading term strictly dominates.
///
/// Internally the equation is rewritten as
/// sum_{n < N} (a(n)/a(N)) (N/n)^{alpha} = 1, whose left side is strictly
/// increasing in alpha because N/n > 1 for every retained n.
pub fn alpha_bound(sum: &PartialSum, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if sum.term_count() < 2 {
        return Err(Error::ConstantPolynomial);
    }
    let terms = sum.terms();
    let (last, rest) = terms.split_last().expect("at least two terms");
    let log_big = last.log_n;
    let a_big = last.a as f64;
    // (log N - log n, a(n)/a(N)) for n < N; every gap is positive.
    let gaps: Vec<(f64, f64)> = rest
        .iter()
        .map(|t| (log_big - t.log_n, t.a as f64 / a_big))
        .collect();

    let h = |alpha: f64| {
        let mut acc = KahanSum::new();
        for &(gap, ratio) in &gaps {
            acc.add(ratio * (alpha * gap).exp());
        }
        acc.value() - 1.0
    };

    // Bracket the root: h is strictly increasing, h -> -1 as alpha -> -inf
    // and h -> +inf as alpha -> +inf.
    let (mut lo, mut hi);
    if h(0.0) >= 0.0 {
        hi = 0.0;
        lo = -1.0;
        let mut guard = 0;
        while h(lo) > 0.0 {
            lo *= 2.0;
            guard += 1;
            if guard > 120 {
                return Err(Error::numerical(
                    "failed to bracket the left strip bound".to_string(),
                ));
            }
        }
    } else {
        lo = 0.0;
        hi = 1.0;
        let mut guard = 0;
        while h(hi) < 0.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 120 {
                return Err(Error::numerical(
                    "failed to bracket the left strip bound".to_string(),
                ));
            }
        }
    }
    Ok(bisect(h, lo, hi, tol))
}

/// Closed-form left bound -3 (delta0 + log 2) n0 N log N / log log N.
/// Requires N >= 3 so that log log N > 0, and delta0 >= 0.
pub fn alpha_paper(n: u64, n0: u64, delta0: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(format!(
            "closed-form left bound needs leading index >= 3 (log log N must be positive), got N = {n}"
        )));
    }
    if n0 == 0 {
        return Err(Error::domain("field degree must be positive".to_string()));
    }
    if !(delta0.is_finite() && delta0 >= 0.0) {
        return Err(Error::domain(format!(
            "delta0 must be finite and nonnegative, got {delta0}"
        )));
    }
    let nf = n as f64;
    let log_n = nf.ln();
    Ok(-3.0 * (delta0 + std::f64::consts::LN_2) * (n0 as f64) * nf * log_n / log_n.ln())
}

/// Both sharp strip bounds plus the closed-form left bound when the leading
/// index admits it (N >= 3).
pub fn strip_bounds(sum: &PartialSum, n0: u64, delta0: f64, tol: f64) -> Result<StripBounds> {
    let beta = beta_bound(sum, tol)?;
    let alpha = alpha_bound(sum, tol)?;
    let n = sum.leading_index();
    let alpha_paper = if n >= 3 {
        Some(alpha_paper(n, n0, delta0)?)
    } else {
        None
    };
    Ok(StripBounds {
        alpha,
        beta,
        alpha_paper,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::domain(format!(
            "bisection tolerance must be positive and finite, got {tol}"
        )));
    }
    Ok(())
}

/// (log n, a(n)) for the terms with n >= 2; errors if there are none.
fn tail_terms(sum: &PartialSum) -> Result<Vec<(f64, f64)>> {
    if sum.term_count() < 2 {
        return Err(Error::ConstantPolynomial);
    }
    Ok(sum
        .terms()
        .iter()
        .skip(1)
        .map(|t| (t.log_n, t.a as f64))
        .collect())
}
