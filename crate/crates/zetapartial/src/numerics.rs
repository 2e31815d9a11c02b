//! Small floating-point utilities: compensated summation, extended-precision
//! phase products, and a bisection driver for strictly monotone functions.

/// Compensated accumulator (Kahan–Babuška/Neumaier variant). The correction
/// term also captures the case where the incoming term dominates the running
/// sum, which plain Kahan loses.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    err: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.err += (self.sum - t) + value;
        } else {
            self.err += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.err
    }
}

/// Exact product split: returns (p, e) with p = fl(a*b) and a*b = p + e.
#[inline]
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = f64::mul_add(a, b, -p);
    (p, e)
}

/// Phases above this magnitude get the explicit extended-precision
/// correction; below it the correction term is negligible but harmless,
/// so it is applied unconditionally (one fused multiply-add per term).
pub const PHASE_EXTENDED_THRESHOLD: f64 = 1.125899906842624e15; // 2^50

/// sin/cos of t*log_n, with the rounding error of the product folded back in
/// to first order. libm range-reduces the high part exactly; the low part of
/// the product is the dominant error source for large t*log_n. Fails (returns
/// None) when the product's low part is itself too large for the first-order
/// correction to mean anything.
#[inline]
pub fn phase_sin_cos(t: f64, log_n: f64) -> Option<(f64, f64)> {
    let (p, e) = two_product(t, log_n);
    if !p.is_finite() || e.abs() > 1e-2 {
        return None;
    }
    let (s, c) = p.sin_cos();
    Some((f64::mul_add(e, c, s), f64::mul_add(-e, s, c)))
}

/// Bisection on a strictly monotone function. `f(lo)` and `f(hi)` must
/// bracket zero (allowing equality at an endpoint). Converges to absolute
/// width `tol` on the abscissa and returns the midpoint.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    debug_assert!(lo <= hi);
    let mut flo = f(lo);
    // Orient so the sign convention below is uniform.
    let rising = flo <= 0.0;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        let below = if rising { fm <= 0.0 } else { fm >= 0.0 };
        if below {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let _ = flo;
    0.5 * (lo + hi)
}
