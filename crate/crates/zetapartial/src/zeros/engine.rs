//! Contour engine: argument-principle winding numbers over rectangles,
//! zero counting up to a height, zero localization by quadrisection plus
//! Newton polish, and the sign-change check on a horizontal slice.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::coefficients::build_coefficient_table;
use crate::cyclotomic::CyclotomicField;
use crate::dirichlet::PartialSum;
use crate::error::{Error, Result};
use crate::numerics::KahanSum;
use crate::zeros::{
    alpha_bound, beta_bound, predicted_count, CountCheck, DescartesCheck, Rectangle, Tolerances,
    ZeroCountResult, ZeroRecord,
};

/// Recursion cap for phase-step subdivision along one contour segment.
const MAX_SEGMENT_DEPTH: usize = 48;
/// Recursion cap for rectangle quadrisection during localization.
const MAX_QUAD_DEPTH: usize = 64;
/// A single tracked phase step must stay below this (pi/2) or the segment
/// is split.
const PHASE_STEP_CAP: f64 = FRAC_PI_2;
/// Target phase advance per seed sample (pi/4).
const SEED_PHASE_TARGET: f64 = FRAC_PI_4;
/// Hard cap on seed samples per edge; adaptivity covers the rest.
const MAX_EDGE_SEEDS: u64 = 1 << 26;
/// The accumulated contour argument must land within this of a multiple
/// of 2*pi.
const WINDING_INTEGER_TOL: f64 = 1e-3;
/// First nudge applied to the top edge when it hits a boundary zero; each
/// retry doubles it.
const NUDGE_EPS: f64 = 1e-6;
/// Number of nudged retries after the initial attempt.
const NUDGE_TRIES: usize = 10;
/// Counting rectangles extend this far beyond the strip on each side, so
/// their vertical edges are provably at least this far from any zero.
const STRIP_MARGIN: f64 = 1.0;
/// Newton iteration budget when polishing a localized zero.
const MAX_NEWTON_ITERS: usize = 50;
/// Slack allowed when checking that a polished zero lies in its leaf.
const CONTAINMENT_SLACK: f64 = 1e-9;
/// Split fractions tried in order when a quadrisection line lands on a
/// zero; all are comfortably interior so children stay balanced.
const JITTER_FRACTIONS: [(f64, f64); 6] = [
    (0.5, 0.5),
    (0.53125, 0.46875),
    (0.46875, 0.53125),
    (0.5625, 0.4375),
    (0.4375, 0.5625),
    (0.59375, 0.40625),
];

/// Argument-principle machinery for one tolerance configuration.
#[derive(Debug, Clone)]
pub struct ZeroEngine {
    tol: Tolerances,
}

impl ZeroEngine {
    pub fn new(tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        Ok(ZeroEngine { tol })
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// Number of zeros (with multiplicity) strictly inside the rectangle,
    /// by tracking the argument counterclockwise around the boundary.
    ///
    /// Fails with a boundary-zero error if any contour sample falls below
    /// the boundary tolerance (relative to the magnitude envelope) or the
    /// phase cannot be resolved at the subdivision depth cap; callers retry
    /// with a perturbed rectangle.
    pub fn winding_number(&self, sum: &PartialSum, rect: &Rectangle) -> Result<i64> {
        Rectangle::new(rect.sigma_lo, rect.sigma_hi, rect.t_lo, rect.t_hi)?;
        let bl = Complex64::new(rect.sigma_lo, rect.t_lo);
        let br = Complex64::new(rect.sigma_hi, rect.t_lo);
        let tr = Complex64::new(rect.sigma_hi, rect.t_hi);
        let tl = Complex64::new(rect.sigma_lo, rect.t_hi);

        let mut total = KahanSum::new();
        // On the real axis every term is real and positive, so the sum is
        // bounded below by 1 and the phase is identically zero there.
        if rect.t_lo != 0.0 {
            total.add(self.edge_arg_change(sum, bl, br)?);
        }
        total.add(self.edge_arg_change(sum, br, tr)?);
        total.add(self.edge_arg_change(sum, tr, tl)?);
        total.add(self.edge_arg_change(sum, tl, bl)?);

        let turns = total.value() / (2.0 * PI);
        let rounded = turns.round();
        if (turns - rounded).abs() > WINDING_INTEGER_TOL {
            return Err(Error::numerical(format!(
                "contour argument did not close up to an integer: {turns} turns around {rect:?}"
            )));
        }
        Ok(rounded as i64)
    }

    /// Zeros with 0 < Im s <= T (numerically: inside the counting rectangle
    /// with the top edge nudged up past any boundary zero), together with
    /// the (T/2pi) log N main term. Requires X >= 2 and T >= 0.
    pub fn count_zeros_to_height(
        &self,
        field: &CyclotomicField,
        x: f64,
        t: f64,
    ) -> Result<ZeroCountResult> {
        if !(x.is_finite() && x >= 2.0) {
            return Err(Error::domain(format!(
                "zero counting needs a cutoff X >= 2, got {x}"
            )));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::domain(format!(
                "zero counting needs a height T >= 0, got {t}"
            )));
        }
        let table = build_coefficient_table(field, x)?;
        let sum = PartialSum::from_table(&table);
        let n = sum.leading_index();
        let density_scale = density_scale_opt(x, field.n0());
        let predicted = predicted_count(t, n);
        if n == 1 || t == 0.0 {
            // A constant sum has no zeros; a zero-height window is empty.
            return Ok(ZeroCountResult {
                t,
                count: 0,
                n,
                predicted,
                discrepancy: 0.0 - predicted,
                x,
                density_scale,
            });
        }
        let alpha = alpha_bound(&sum, self.tol.bisection)?;
        let beta = beta_bound(&sum, self.tol.bisection)?;
        let count = self.count_in_band(&sum, alpha - STRIP_MARGIN, beta + STRIP_MARGIN, t)?;
        Ok(ZeroCountResult {
            t,
            count,
            n,
            predicted,
            discrepancy: count as f64 - predicted,
            x,
            density_scale,
        })
    }

    /// Locates all zeros with 0 < Im s <= T, using the same counting band
    /// and top-edge nudge protocol as `count_zeros_to_height`, so the two
    /// operations agree on which boundary-straddling zeros are included.
    pub fn locate_zeros_to_height(
        &self,
        field: &CyclotomicField,
        x: f64,
        t: f64,
    ) -> Result<Vec<ZeroRecord>> {
        if !(x.is_finite() && x >= 2.0) {
            return Err(Error::domain(format!(
                "zero location needs a cutoff X >= 2, got {x}"
            )));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::domain(format!(
                "zero location needs a height T >= 0, got {t}"
            )));
        }
        let table = build_coefficient_table(field, x)?;
        let sum = PartialSum::from_table(&table);
        if sum.leading_index() == 1 || t == 0.0 {
            return Ok(Vec::new());
        }
        let alpha = alpha_bound(&sum, self.tol.bisection)?;
        let beta = beta_bound(&sum, self.tol.bisection)?;
        let sigma_lo = alpha - STRIP_MARGIN;
        let sigma_hi = beta + STRIP_MARGIN;
        let mut t_eff = t;
        let mut eps = NUDGE_EPS;
        let mut boundary_err = None;
        for _ in 0..=NUDGE_TRIES {
            let rect = Rectangle::new(sigma_lo, sigma_hi, 0.0, t_eff)?;
            match self.locate_zeros(&sum, &rect) {
                Ok(zeros) => return Ok(zeros),
                Err(e @ Error::BoundaryZero { .. }) => {
                    boundary_err = Some(e);
                    t_eff = t + eps;
                    eps *= 2.0;
                }
                Err(e) => return Err(e),
            }
        }
        Err(boundary_err.expect("loop exits early unless a boundary zero was seen"))
    }

    /// Locates every zero inside the rectangle: quadrisect until each piece
    /// holds at most one zero, then polish with Newton and keep the point
    /// only if the residual clears the tolerance and it stayed in its leaf.
    /// Returned records are sorted by height, then by real part.
    pub fn locate_zeros(&self, sum: &PartialSum, rect: &Rectangle) -> Result<Vec<ZeroRecord>> {
        Rectangle::new(rect.sigma_lo, rect.sigma_hi, rect.t_lo, rect.t_hi)?;
        let mut found = Vec::new();
        if sum.term_count() < 2 {
            return Ok(found);
        }
        self.resolve_rectangle(sum, rect, 0, &mut found)?;
        found.sort_by(|a, b| {
            (a.im, a.re)
                .partial_cmp(&(b.im, b.re))
                .expect("zero coordinates are finite")
        });
        Ok(found)
    }

    /// Counts zeros of Im zeta_{K,X}(sigma + iT) for sigma in the interval,
    /// by a dense sign scan refined with bisection, and reports it against
    /// the number of terms with a(n) sin(T log n) != 0 (term n = 1
    /// contributes sin(0) = 0 and is excluded automatically).
    pub fn descartes_check(
        &self,
        sum: &PartialSum,
        t: f64,
        sigma_lo: f64,
        sigma_hi: f64,
    ) -> Result<DescartesCheck> {
        if !t.is_finite() || t == 0.0 {
            return Err(Error::domain(
                "the imaginary part vanishes identically at height 0".to_string(),
            ));
        }
        if !(sigma_lo.is_finite() && sigma_hi.is_finite() && sigma_lo < sigma_hi) {
            return Err(Error::domain(format!(
                "bad sigma interval [{sigma_lo}, {sigma_hi}]"
            )));
        }

        let mut nonzero_terms = 0u64;
        for term in sum.terms() {
            let (sin_phase, _) = crate::numerics::phase_sin_cos(t, term.log_n).ok_or_else(|| {
                Error::numerical(format!(
                    "phase T*log n at n = {} is too large to reduce accurately",
                    term.n
                ))
            })?;
            if term.a as f64 * sin_phase != 0.0 {
                nonzero_terms += 1;
            }
        }

        let cells = (32 * sum.term_count()).max(256);
        let mut zeros_of_im = 0u64;
        // Last strictly nonzero sample; an exact zero sample is itself
        // counted and resets this so the flip is not counted twice.
        let mut last: Option<(f64, f64)> = None;
        for i in 0..=cells {
            let frac = i as f64 / cells as f64;
            let sigma = sigma_lo + frac * (sigma_hi - sigma_lo);
            let h = sum.imag_on_horizontal(sigma, t)?;
            if h == 0.0 {
                zeros_of_im += 1;
                last = None;
                continue;
            }
            if let Some((sigma_prev, h_prev)) = last {
                if (h > 0.0) != (h_prev > 0.0) {
                    self.refine_im_zero(sum, t, sigma_prev, h_prev, sigma)?;
                    zeros_of_im += 1;
                }
            }
            last = Some((sigma, h));
        }
        Ok(DescartesCheck {
            zeros_of_im,
            nonzero_terms,
        })
    }

    /// Counts zeros up to height T and checks the discrepancy against the
    /// X/2 bound, both with the leading-index main term (T/2pi) log N and
    /// with the floor(X) variant. Requires X >= 3 and T >= 3.
    pub fn verify_counting(&self, field: &CyclotomicField, x: f64, t: f64) -> Result<CountCheck> {
        if !(x.is_finite() && x >= 3.0) {
            return Err(Error::domain(format!(
                "the counting check needs X >= 3, got {x}"
            )));
        }
        if !(t.is_finite() && t >= 3.0) {
            return Err(Error::domain(format!(
                "the counting check needs T >= 3, got {t}"
            )));
        }
        self.count_check(field, x, t)
    }

    /// The counting check without the X, T >= 3 gate of `verify_counting`;
    /// experiment cells go down to the X >= 2 domain of the counter.
    pub(crate) fn count_check(&self, field: &CyclotomicField, x: f64, t: f64) -> Result<CountCheck> {
        let res = self.count_zeros_to_height(field, x, t)?;
        let predicted_floor_x = t / (2.0 * PI) * x.floor().ln();
        let discrepancy_floor_x = res.count as f64 - predicted_floor_x;
        let lrz2_bound = x / 2.0;
        let theorem1_residual = res.discrepancy.abs();
        Ok(CountCheck {
            q: field.q(),
            x,
            t,
            n: res.n,
            count: res.count,
            predicted: res.predicted,
            discrepancy: res.discrepancy,
            predicted_floor_x,
            discrepancy_floor_x,
            lrz2_bound,
            lrz2_pass: discrepancy_floor_x.abs() <= lrz2_bound,
            theorem1_residual,
            theorem1_pass: theorem1_residual <= lrz2_bound,
            density_scale: res.density_scale,
        })
    }

    /// Winding over [sigma_lo, sigma_hi] x [0, T], retrying with the top
    /// edge nudged upward whenever it lands on a zero. The band must
    /// enclose the whole zero strip so the verticals stay zero-free.
    fn count_in_band(&self, sum: &PartialSum, sigma_lo: f64, sigma_hi: f64, t: f64) -> Result<u64> {
        let mut t_eff = t;
        let mut eps = NUDGE_EPS;
        let mut boundary_err = None;
        for _ in 0..=NUDGE_TRIES {
            let rect = Rectangle::new(sigma_lo, sigma_hi, 0.0, t_eff)?;
            match self.winding_number(sum, &rect) {
                Ok(w) => {
                    if w < 0 {
                        return Err(Error::numerical(format!(
                            "negative winding number {w} over {rect:?}"
                        )));
                    }
                    return Ok(w as u64);
                }
                Err(e @ Error::BoundaryZero { .. }) => {
                    boundary_err = Some(e);
                    t_eff = t + eps;
                    eps *= 2.0;
                }
                Err(e) => return Err(e),
            }
        }
        Err(boundary_err.expect("loop exits early unless a boundary zero was seen"))
    }

    /// Continuous argument change along the straight edge from s0 to s1.
    fn edge_arg_change(&self, sum: &PartialSum, s0: Complex64, s1: Complex64) -> Result<f64> {
        let delta = s1 - s0;
        let len = delta.norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        // Seed densely enough that the dominant phase drift t*log N moves
        // by about pi/4 per step. On a vertical edge where one term
        // dominates the rest, |f'/f| has a rigorous bound that may allow
        // far coarser seeding (the tall outer edges of counting
        // rectangles); the adaptive splitting below covers everything the
        // seeding misses.
        let heuristic = sum
            .terms()
            .last()
            .map(|term| term.log_n)
            .unwrap_or(0.0)
            .max(1.0);
        let speed = if s0.re == s1.re {
            match vertical_speed_bound(sum, s0.re) {
                Some(bound) => bound.min(heuristic),
                None => heuristic,
            }
        } else {
            heuristic
        };
        let raw = (len * speed / SEED_PHASE_TARGET).ceil();
        let seeds = if raw.is_finite() && raw >= 1.0 {
            (raw as u64).min(MAX_EDGE_SEEDS)
        } else {
            1
        };

        let mut prev_s = s0;
        let mut prev_u = self.sample(sum, s0)?;
        let mut total = KahanSum::new();
        for i in 1..=seeds {
            let s = if i == seeds {
                s1
            } else {
                s0 + delta * (i as f64 / seeds as f64)
            };
            let u = self.sample(sum, s)?;
            total.add(self.segment_arg(sum, prev_s, prev_u, s, u, 0)?);
            prev_s = s;
            prev_u = u;
        }
        Ok(total.value())
    }

    /// Phase step between two contour samples, splitting the segment until
    /// each step is below pi/2 so the principal value is unambiguous.
    fn segment_arg(
        &self,
        sum: &PartialSum,
        s0: Complex64,
        u0: Complex64,
        s1: Complex64,
        u1: Complex64,
        depth: usize,
    ) -> Result<f64> {
        let dphi = (u1 * u0.conj()).arg();
        if dphi.abs() < PHASE_STEP_CAP {
            return Ok(dphi);
        }
        let mid = 0.5 * (s0 + s1);
        if depth >= MAX_SEGMENT_DEPTH {
            // The phase refuses to settle on an interval too short to
            // matter: the only plausible cause is a zero on or next to the
            // contour, so report it as one and let the caller perturb.
            return Err(Error::BoundaryZero {
                re: mid.re,
                im: mid.im,
            });
        }
        let um = self.sample(sum, mid)?;
        let left = self.segment_arg(sum, s0, u0, mid, um, depth + 1)?;
        let right = self.segment_arg(sum, mid, um, s1, u1, depth + 1)?;
        Ok(left + right)
    }

    /// Evaluates the sum at a contour point and returns its direction
    /// (unit modulus). Magnitudes below the boundary tolerance, relative
    /// to the term-magnitude envelope, are boundary zeros.
    fn sample(&self, sum: &PartialSum, s: Complex64) -> Result<Complex64> {
        let (value, envelope) = sum.evaluate_with_scale(s)?;
        let norm = value.norm();
        if norm <= self.tol.boundary * envelope {
            return Err(Error::BoundaryZero { re: s.re, im: s.im });
        }
        Ok(value / norm)
    }

    fn resolve_rectangle(
        &self,
        sum: &PartialSum,
        rect: &Rectangle,
        depth: usize,
        out: &mut Vec<ZeroRecord>,
    ) -> Result<()> {
        let w = self.winding_number(sum, rect)?;
        if w < 0 {
            return Err(Error::numerical(format!(
                "negative winding number {w} over {rect:?}"
            )));
        }
        if w == 0 {
            return Ok(());
        }
        if w == 1 {
            if let Some(record) = self.newton_refine(sum, rect)? {
                out.push(record);
                return Ok(());
            }
        }
        self.subdivide(sum, rect, depth, w, out)
    }

    fn subdivide(
        &self,
        sum: &PartialSum,
        rect: &Rectangle,
        depth: usize,
        expected: i64,
        out: &mut Vec<ZeroRecord>,
    ) -> Result<()> {
        if depth >= MAX_QUAD_DEPTH {
            return Err(Error::numerical(format!(
                "zero refinement stalled at depth {depth} in {rect:?}"
            )));
        }
        'jitter: for &(fx, fy) in &JITTER_FRACTIONS {
            let split_sigma = rect.sigma_lo + fx * rect.width();
            let split_t = rect.t_lo + fy * rect.height();
            let children = [
                Rectangle {
                    sigma_lo: rect.sigma_lo,
                    sigma_hi: split_sigma,
                    t_lo: rect.t_lo,
                    t_hi: split_t,
                },
                Rectangle {
                    sigma_lo: split_sigma,
                    sigma_hi: rect.sigma_hi,
                    t_lo: rect.t_lo,
                    t_hi: split_t,
                },
                Rectangle {
                    sigma_lo: rect.sigma_lo,
                    sigma_hi: split_sigma,
                    t_lo: split_t,
                    t_hi: rect.t_hi,
                },
                Rectangle {
                    sigma_lo: split_sigma,
                    sigma_hi: rect.sigma_hi,
                    t_lo: split_t,
                    t_hi: rect.t_hi,
                },
            ];
            let mut collected = Vec::new();
            for child in &children {
                match self.resolve_rectangle(sum, child, depth + 1, &mut collected) {
                    Ok(()) => {}
                    // A zero sits on this split line (or a descendant's);
                    // move the lines and try again.
                    Err(Error::BoundaryZero { .. }) => continue 'jitter,
                    Err(e) => return Err(e),
                }
            }
            if collected.len() as i64 != expected {
                return Err(Error::numerical(format!(
                    "winding additivity violated in {rect:?}: parent holds {expected}, children yielded {}",
                    collected.len()
                )));
            }
            out.append(&mut collected);
            return Ok(());
        }
        Err(Error::numerical(format!(
            "no zero-free quadrisection line found for {rect:?}"
        )))
    }

    /// Newton iteration from the rectangle center. Returns None (caller
    /// subdivides further) when the iteration leaves the rectangle, stalls,
    /// or converges to a point that fails the residual or containment
    /// checks.
    fn newton_refine(&self, sum: &PartialSum, rect: &Rectangle) -> Result<Option<ZeroRecord>> {
        let wander = rect.width().max(rect.height());
        let mut s = rect.center();
        for _ in 0..MAX_NEWTON_ITERS {
            let value = match sum.evaluate(s) {
                Ok(v) => v,
                Err(_) => return Ok(None),
            };
            let derivative = match sum.evaluate_derivative(s) {
                Ok(v) => v,
                Err(_) => return Ok(None),
            };
            if derivative.norm() == 0.0 {
                return Ok(None);
            }
            let step = value / derivative;
            if !step.re.is_finite() || !step.im.is_finite() {
                return Ok(None);
            }
            s -= step;
            if !s.re.is_finite() || !s.im.is_finite() || !rect.contains(s, wander) {
                return Ok(None);
            }
            if step.norm() < self.tol.newton {
                // Residual relative to the envelope sum |a(n)| n^(-sigma):
                // term magnitudes grow like N^|sigma| on the left of the
                // strip, so an absolute |f| threshold is unreachable there
                // while the backward error stays near machine precision.
                let residual = match sum.evaluate_with_scale(s) {
                    Ok((v, envelope)) => v.norm() / envelope,
                    Err(_) => return Ok(None),
                };
                if residual <= self.tol.residual && rect.contains(s, CONTAINMENT_SLACK) {
                    return Ok(Some(ZeroRecord {
                        re: s.re,
                        im: s.im,
                        residual,
                        enclosure: *rect,
                    }));
                }
                return Ok(None);
            }
        }
        Ok(None)
    }

    /// Bisects a sign-change bracket of the horizontal-slice imaginary part
    /// down to the bisection tolerance (localization only; the count does
    /// not depend on it).
    fn refine_im_zero(
        &self,
        sum: &PartialSum,
        t: f64,
        mut lo: f64,
        mut h_lo: f64,
        mut hi: f64,
    ) -> Result<f64> {
        while hi - lo > self.tol.bisection {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let h_mid = sum.imag_on_horizontal(mid, t)?;
            if h_mid == 0.0 {
                return Ok(mid);
            }
            if (h_mid > 0.0) == (h_lo > 0.0) {
                lo = mid;
                h_lo = h_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Rigorous bound on the phase speed |d/dt arg f| along a vertical line,
/// valid whenever a single term dominates the rest there: either the n = 1
/// term (right of the strip) or the leading term (left of it). Returns None
/// when no dominance holds, i.e. inside or near the strip.
fn vertical_speed_bound(sum: &PartialSum, sigma: f64) -> Option<f64> {
    let terms = sum.terms();
    let mut envelope = KahanSum::new();
    let mut derivative = KahanSum::new();
    for term in terms {
        let mag = term.a as f64 * (-sigma * term.log_n).exp();
        if !mag.is_finite() {
            return None;
        }
        envelope.add(mag);
        derivative.add(mag * term.log_n);
    }
    let envelope = envelope.value();
    let derivative = derivative.value();
    if !envelope.is_finite() || !derivative.is_finite() {
        return None;
    }
    let lead = terms
        .last()
        .map(|term| term.a as f64 * (-sigma * term.log_n).exp())?;
    // |f| >= dominant term minus the rest = 2*dominant - envelope; the
    // n = 1 term has magnitude exactly 1.
    let floor = (2.0 * lead - envelope).max(2.0 - envelope);
    if floor > 0.0 {
        Some(derivative / floor)
    } else {
        None
    }
}

/// X * (log log X / log X)^(1 - 1/phi), or None when log log X <= 0.
fn density_scale_opt(x: f64, phi: u64) -> Option<f64> {
    if x.ln().ln() > 0.0 {
        Some(crate::coefficients::density_scale(x, phi))
    } else {
        None
    }
}
