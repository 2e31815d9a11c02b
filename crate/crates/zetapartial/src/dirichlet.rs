//! The partial sum as a Dirichlet polynomial: evaluation, derivative, and
//! the imaginary part along a horizontal line.
//!
//! zeta_{K,X}(s) = sum over n <= X with a(n) != 0 of a(n) * n^{-s}. Terms are
//! stored with precomputed logarithms; n^{-s} is computed as
//! exp(-sigma*log n) * (cos(t*log n) - i*sin(t*log n)). Real and imaginary
//! parts accumulate through compensated summation, and the phase t*log n is
//! formed with an exact product split so its rounding error is folded back
//! into the sine and cosine (the error would otherwise dominate once
//! t*log n grows past ~2^50).

use num_complex::Complex64;

use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::numerics::{phase_sin_cos, KahanSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Term {
    pub(crate) n: u64,
    pub(crate) a: u64,
    pub(crate) log_n: f64,
}

/// A truncated Dedekind zeta sum with nonzero terms only, ascending in n.
/// The first term is always (1, 1, 0); the last index is the leading index N
/// that drives the zero-counting main term.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSum {
    terms: Vec<Term>,
    x: f64,
}

impl PartialSum {
    /// Drops zero coefficients and freezes logarithms. Any table kind is
    /// accepted; the zero-counting pipeline builds kind-`a` tables.
    pub fn from_table(table: &CoefficientTable) -> Self {
        let terms: Vec<Term> = table
            .nonzero()
            .map(|(n, a)| Term {
                n,
                a,
                log_n: (n as f64).ln(),
            })
            .collect();
        debug_assert!(!terms.is_empty() && terms[0].n == 1);
        PartialSum {
            terms,
            x: table.x(),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// Largest n <= X with a nonzero coefficient.
    pub fn leading_index(&self) -> u64 {
        self.terms.last().expect("terms nonempty").n
    }

    /// Number of surviving (nonzero) terms, the n = 1 term included.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// (n, a(n)) pairs, ascending.
    pub fn term_pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.terms.iter().map(|t| (t.n, t.a))
    }

    pub(crate) fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// zeta_{K,X}(s).
    pub fn evaluate(&self, s: Complex64) -> Result<Complex64> {
        Ok(evaluate_terms(&self.terms, s, Weight::Value)?.0)
    }

    /// d/ds zeta_{K,X}(s) = -sum a(n) log(n) n^{-s}.
    pub fn evaluate_derivative(&self, s: Complex64) -> Result<Complex64> {
        Ok(evaluate_terms(&self.terms, s, Weight::Derivative)?.0)
    }

    /// Value together with the magnitude envelope sum |a(n)| n^{-sigma},
    /// which calibrates boundary-zero tolerances on contours.
    pub(crate) fn evaluate_with_scale(&self, s: Complex64) -> Result<(Complex64, f64)> {
        evaluate_terms(&self.terms, s, Weight::Value)
    }

    /// Im zeta_{K,X}(sigma + iT) = -sum a(n) sin(T log n) / n^sigma.
    pub fn imag_on_horizontal(&self, sigma: f64, t: f64) -> Result<f64> {
        let mut im = KahanSum::new();
        for term in &self.terms {
            let mag = term.a as f64 * (-sigma * term.log_n).exp();
            if !mag.is_finite() {
                return Err(range_overflow(sigma, term));
            }
            let (sin_phase, _) = phase_sin_cos(t, term.log_n)
                .ok_or_else(|| phase_failure(t, term))?;
            im.add(-mag * sin_phase);
        }
        Ok(im.value())
    }
}

#[derive(Clone, Copy)]
enum Weight {
    Value,
    Derivative,
}

fn evaluate_terms(terms: &[Term], s: Complex64, weight: Weight) -> Result<(Complex64, f64)> {
    let sigma = s.re;
    let t = s.im;
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    let mut env = KahanSum::new();
    for term in terms {
        let w = match weight {
            Weight::Value => term.a as f64,
            Weight::Derivative => -(term.a as f64) * term.log_n,
        };
        let mag = w * (-sigma * term.log_n).exp();
        if !mag.is_finite() {
            return Err(range_overflow(sigma, term));
        }
        let (sin_phase, cos_phase) =
            phase_sin_cos(t, term.log_n).ok_or_else(|| phase_failure(t, term))?;
        re.add(mag * cos_phase);
        im.add(-mag * sin_phase);
        env.add(mag.abs());
    }
    let value = Complex64::new(re.value(), im.value());
    if !value.re.is_finite() || !value.im.is_finite() || !env.value().is_finite() {
        return Err(Error::range(
            "partial sum overflowed the floating range".to_string(),
        ));
    }
    Ok((value, env.value()))
}

fn range_overflow(sigma: f64, term: &Term) -> Error {
    Error::range(format!(
        "term n = {} overflows at sigma = {sigma} (sigma*log n = {})",
        term.n,
        sigma * term.log_n
    ))
}

fn phase_failure(t: f64, term: &Term) -> Error {
    Error::numerical(format!(
        "phase t*log n = {} at n = {} is too large to reduce accurately",
        t * term.log_n,
        term.n
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::build_coefficient_table;
    use crate::cyclotomic::CyclotomicField;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn sum(q: u64, x: f64) -> PartialSum {
        let field = CyclotomicField::new(q).unwrap();
        PartialSum::from_table(&build_coefficient_table(&field, x).unwrap())
    }

    #[test]
    fn from_table_drops_zeros_and_finds_leading_index() {
        let p = sum(4, 7.0);
        let ns: Vec<u64> = p.term_pairs().map(|(n, _)| n).collect();
        assert_eq!(ns, vec![1, 2, 4, 5]);
        assert_eq!(p.leading_index(), 5);
        assert_eq!(p.term_count(), 4);

        assert_eq!(sum(2, 7.9).leading_index(), 7);
        assert_eq!(sum(4, 4.0).leading_index(), 4);
    }

    #[test]
    fn evaluate_at_zero_is_coefficient_sum() {
        let p = sum(4, 7.0);
        let v = p.evaluate(Complex64::new(0.0, 0.0)).unwrap();
        assert!((v.re - 5.0).abs() < 1e-14);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn evaluate_known_zero_of_two_term_sum() {
        // 1 + 2^{-s} vanishes at s = i*pi/log 2.
        let p = sum(4, 2.0);
        let s = Complex64::new(0.0, std::f64::consts::PI / std::f64::consts::LN_2);
        let v = p.evaluate(s).unwrap();
        assert!(v.norm() < 1e-12, "got {v}");
        let one_half = p.evaluate(Complex64::new(1.0, 0.0)).unwrap();
        assert!((one_half.re - 1.5).abs() < 1e-14);
        assert!(one_half.im.abs() < 1e-15);
    }

    #[test]
    fn derivative_at_origin() {
        let p = sum(4, 2.0);
        let d = p.evaluate_derivative(Complex64::new(0.0, 0.0)).unwrap();
        assert!((d.re + std::f64::consts::LN_2).abs() < 1e-14);
        assert!(d.im.abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = sum(4, 50.0);
        let h = 1e-6;
        for (sigma, t) in [(0.5, 13.0), (-2.0, 77.3), (3.0, 400.0), (-4.5, 9.1)] {
            let s = Complex64::new(sigma, t);
            let d = p.evaluate_derivative(s).unwrap();
            let fd = (p.evaluate(s + Complex64::new(h, 0.0)).unwrap()
                - p.evaluate(s - Complex64::new(h, 0.0)).unwrap())
                / (2.0 * h);
            assert!(
                (fd - d).norm() <= 1e-6 * d.norm().max(1e-6),
                "at s = {s}: derivative {d}, difference {fd}"
            );
        }
    }

    #[test]
    fn imag_on_horizontal_matches_evaluate() {
        let p = sum(4, 30.0);
        for (sigma, t) in [(0.0, 0.0), (1.3, 17.0), (-2.0, 251.7), (0.4, 9_999.5)] {
            let direct = p.imag_on_horizontal(sigma, t).unwrap();
            let via_eval = p.evaluate(Complex64::new(sigma, t)).unwrap().im;
            assert!(
                (direct - via_eval).abs() <= 1e-12 * (1.0 + via_eval.abs()),
                "sigma = {sigma}, t = {t}: {direct} vs {via_eval}"
            );
        }
        assert_eq!(sum(4, 30.0).imag_on_horizontal(0.7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn conjugate_symmetry() {
        let p = sum(3, 40.0);
        for (sigma, t) in [(0.3, 5.0), (-1.2, 44.4), (2.0, 123.0)] {
            let v = p.evaluate(Complex64::new(sigma, t)).unwrap();
            let w = p.evaluate(Complex64::new(sigma, -t)).unwrap();
            let scale = p.evaluate_with_scale(Complex64::new(sigma, t)).unwrap().1;
            assert!((v.re - w.re).abs() <= 1e-15 * scale);
            assert!((v.im + w.im).abs() <= 1e-15 * scale);
        }
    }

    #[test]
    fn extremely_negative_sigma_is_a_range_error() {
        let p = sum(4, 2.0);
        let err = p.evaluate(Complex64::new(-2_000.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::Range(_)));
    }

    #[test]
    fn summation_is_stable_under_term_permutation() {
        // ~24k nonzero terms at X = 1e5; the compensated sum should make the
        // result order-independent to near machine precision.
        let p = sum(4, 100_000.0);
        let s = Complex64::new(1.2, 1_000.0);
        let (reference, env) = evaluate_terms(p.terms(), s, Weight::Value).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut shuffled = p.terms().to_vec();
        for _ in 0..3 {
            shuffled.shuffle(&mut rng);
            let v = evaluate_terms(&shuffled, s, Weight::Value).unwrap().0;
            assert!(
                (v - reference).norm() <= 1e-13 * env.max(1.0),
                "permuted sum drifted: {v} vs {reference} (envelope {env})"
            );
        }
    }

    #[test]
    fn envelope_bounds_the_value() {
        let p = sum(4, 500.0);
        for (sigma, t) in [(0.0, 3.0), (-1.5, 88.0), (2.5, 7.7)] {
            let (v, env) = p.evaluate_with_scale(Complex64::new(sigma, t)).unwrap();
            assert!(v.norm() <= env * (1.0 + 1e-12));
            assert!(env >= 1.0); // the n = 1 term alone contributes 1
        }
    }
}
