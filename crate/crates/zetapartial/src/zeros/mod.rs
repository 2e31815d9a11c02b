//! Zero machinery for the partial sum: the containment strip, winding-number
//! counting over rectangles, zero localization, and the counting checks
//! against the (T/2pi)*log N main term.

mod bounds;
mod engine;

pub use bounds::{alpha_bound, alpha_paper, beta_bound, strip_bounds, DEFAULT_DELTA0};
pub use engine::ZeroEngine;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances threaded through the zero engine. Defaults are the
/// shipped values; the CLI can override each from flags or environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bisection width for the strip-bound equations.
    pub bisection: f64,
    /// Largest envelope-relative residual |zeta_{K,X}(rho)| / sum a(n) n^(-Re rho)
    /// accepted for a located zero (a backward-error measure; the raw |f|
    /// scales with the envelope and is not comparable across the strip).
    pub residual: f64,
    /// Boundary-zero trigger as a fraction of the magnitude envelope.
    pub boundary: f64,
    /// Newton step size that counts as converged.
    pub newton: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            bisection: 1e-12,
            residual: 1e-9,
            boundary: 1e-10,
            newton: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("bisection", self.bisection),
            ("residual", self.residual),
            ("boundary", self.boundary),
            ("newton", self.newton),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "tolerance {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Zero-containment strip: all zeros have alpha < Re s < beta. `alpha` and
/// `beta` solve the sharp dominance equations; `alpha_paper` is the coarser
/// closed-form left edge, defined only for leading index N >= 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripBounds {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_paper: Option<f64>,
}

/// Axis-aligned rectangle in the s-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rectangle {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        let r = Rectangle {
            sigma_lo,
            sigma_hi,
            t_lo,
            t_hi,
        };
        for v in [sigma_lo, sigma_hi, t_lo, t_hi] {
            if !v.is_finite() {
                return Err(Error::domain(format!("rectangle has non-finite corner: {r:?}")));
            }
        }
        if sigma_lo >= sigma_hi || t_lo >= t_hi {
            return Err(Error::domain(format!(
                "rectangle must have positive extent: {r:?}"
            )));
        }
        Ok(r)
    }

    pub fn width(&self) -> f64 {
        self.sigma_hi - self.sigma_lo
    }

    pub fn height(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.sigma_lo + self.sigma_hi),
            0.5 * (self.t_lo + self.t_hi),
        )
    }

    pub fn contains(&self, s: Complex64, slack: f64) -> bool {
        s.re >= self.sigma_lo - slack
            && s.re <= self.sigma_hi + slack
            && s.im >= self.t_lo - slack
            && s.im <= self.t_hi + slack
    }
}

/// Outcome of counting zeros up to height T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCountResult {
    #[serde(rename = "T")]
    pub t: f64,
    pub count: u64,
    /// Leading index N (largest n <= X with a(n) != 0).
    #[serde(rename = "N")]
    pub n: u64,
    /// Main term (T/2pi) log N.
    pub predicted: f64,
    /// count - predicted.
    pub discrepancy: f64,
    #[serde(rename = "X")]
    pub x: f64,
    /// X*(log log X / log X)^(1 - 1/phi(q)); None when log log X <= 0.
    pub density_scale: Option<f64>,
}

/// A located zero: position, envelope-relative residual
/// |zeta_{K,X}| / sum a(n) n^(-Re rho) there, and the leaf rectangle that
/// isolated it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub enclosure: Rectangle,
}

impl ZeroRecord {
    pub fn s(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Result of the top-edge sign-change check: the number of zeros of
/// Im zeta_{K,X}(sigma + iT) found on the interval against the bound, the
/// number of terms with a(n) sin(T log n) != 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescartesCheck {
    pub zeros_of_im: u64,
    pub nonzero_terms: u64,
}

impl DescartesCheck {
    pub fn passes(&self) -> bool {
        self.zeros_of_im <= self.nonzero_terms
    }
}

/// Counting verdict for one (X, T): the count against both main terms, the
/// X/2 bound, and the density scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountCheck {
    pub q: u64,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub count: u64,
    /// (T/2pi) log N.
    pub predicted: f64,
    /// count - (T/2pi) log N.
    pub discrepancy: f64,
    /// (T/2pi) log floor(X).
    pub predicted_floor_x: f64,
    /// count - (T/2pi) log floor(X).
    pub discrepancy_floor_x: f64,
    /// X/2.
    pub lrz2_bound: f64,
    /// |discrepancy_floor_x| <= X/2.
    pub lrz2_pass: bool,
    /// |discrepancy| (against log N).
    pub theorem1_residual: f64,
    /// theorem1_residual <= X/2.
    pub theorem1_pass: bool,
    pub density_scale: Option<f64>,
}

/// Main term of the zero count: (T/2pi) log N.
pub fn predicted_count(t: f64, n: u64) -> f64 {
    assert!(n >= 1, "leading index must be at least 1");
    t / (2.0 * std::f64::consts::PI) * (n as f64).ln()
}
