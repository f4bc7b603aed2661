//! Exponential sums `f(p) = sum_j c_j exp(beta_j p)` with positive integer
//! coefficients.
//!
//! For a vector `v`, taking `beta_j = ln |v_j|` over the non-zero coordinates
//! gives `||v||_p = exp(ln f(p) / p)`. Everything here evaluates `f` with the
//! dominant term factored out, so `|Re(beta_j p)|` up to about 700 never
//! overflows an intermediate.

mod contour;
mod zeros;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::vectors::RealVector;

pub use contour::{count_zeros, winding_number, Rectangle, DEFAULT_QUAD_TOL};
pub use zeros::{find_zeros, zero_multiset_equal, Zero, ZeroSearchOptions, ZeroSet};

/// Absolute tolerance on `beta` below which two exponents are merged.
pub const DEFAULT_MERGE_TOL: f64 = 1e-12;

/// `|f(p)|` relative to `sum_j c_j |exp(beta_j p)|` below which `log f` is
/// treated as undefined.
pub const SINGULAR_REL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub exponent: f64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

/// `f(p) = exp(shift) * sum`, `f'(p) = exp(shift) * dsum`, with every term of
/// `sum` bounded in modulus by its multiplicity.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Shifted {
    pub shift: Complex64,
    pub sum: Complex64,
    pub dsum: Complex64,
    pub abs_sum: f64,
}

impl Shifted {
    /// `|f| / sum_j c_j |exp(beta_j p)|`, in [0, 1].
    pub fn relative_magnitude(&self) -> f64 {
        self.sum.norm() / self.abs_sum
    }
}

fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

impl ExpPoly {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("exponential sum has no terms".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            if !t.exponent.is_finite() {
                return Err(Error::InvalidInput(format!("exponent {i} is not finite")));
            }
            if t.multiplicity == 0 {
                return Err(Error::InvalidInput(format!("multiplicity {i} is zero")));
            }
        }
        if terms.windows(2).any(|w| w[0].exponent >= w[1].exponent) {
            return Err(Error::InvalidInput(
                "exponents must be strictly increasing".into(),
            ));
        }
        Ok(Self { terms })
    }

    /// Convenience constructor from `(exponent, multiplicity)` pairs.
    pub fn from_pairs(pairs: &[(f64, u32)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(exponent, multiplicity)| Term {
                    exponent,
                    multiplicity,
                })
                .collect(),
        )
    }

    /// Builds `f` for `v`: one term per non-zero coordinate, exponents within
    /// `merge_tol` of the first exponent of a run collapsed into one term.
    pub fn from_vector(v: &RealVector, merge_tol: f64) -> Result<Self> {
        if !(merge_tol >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "merge tolerance {merge_tol} must be >= 0"
            )));
        }
        let mut betas: Vec<f64> = v.nonzero_magnitudes().map(f64::ln).collect();
        if betas.is_empty() {
            return Err(Error::InvalidInput("zero vector".into()));
        }
        betas.sort_by(f64::total_cmp);
        let mut terms: Vec<Term> = Vec::new();
        let mut run_start = f64::NAN;
        for b in betas {
            match terms.last_mut() {
                Some(t) if b - run_start <= merge_tol => t.multiplicity += 1,
                _ => {
                    run_start = b;
                    terms.push(Term {
                        exponent: b,
                        multiplicity: 1,
                    });
                }
            }
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Total degree `sum_j c_j`, which is also `f(0)`.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.multiplicity).sum()
    }

    pub fn min_exponent(&self) -> f64 {
        self.terms[0].exponent
    }

    pub fn max_exponent(&self) -> f64 {
        self.terms[self.terms.len() - 1].exponent
    }

    /// Width of the exponent range; sets the density of zeros along the
    /// imaginary direction.
    pub fn spread(&self) -> f64 {
        self.max_exponent() - self.min_exponent()
    }

    pub(crate) fn shifted(&self, p: Complex64) -> Shifted {
        // max over j of beta_j * Re p is attained at one of the end terms.
        let dom = if p.re >= 0.0 {
            self.max_exponent()
        } else {
            self.min_exponent()
        };
        let mut sum = Complex64::new(0.0, 0.0);
        let mut dsum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for t in &self.terms {
            let c = f64::from(t.multiplicity);
            let e = ((t.exponent - dom) * p).exp() * c;
            sum += e;
            dsum += e * t.exponent;
            abs_sum += e.norm();
        }
        Shifted {
            shift: dom * p,
            sum,
            dsum,
            abs_sum,
        }
    }

    pub fn evaluate(&self, p: Complex64) -> Complex64 {
        let s = self.shifted(p);
        s.shift.exp() * s.sum
    }

    /// `f(p)` for real `p`; always strictly positive.
    pub fn evaluate_real(&self, p: f64) -> f64 {
        self.evaluate(Complex64::new(p, 0.0)).re
    }

    /// Principal logarithm of `f(p)`, imaginary part in (-pi, pi].
    pub fn evaluate_log(&self, p: Complex64) -> Result<Complex64> {
        let s = self.shifted(p);
        if s.relative_magnitude() < SINGULAR_REL {
            return Err(Error::AtSingularity { p });
        }
        Ok(Complex64::new(
            s.shift.re + s.sum.norm().ln(),
            wrap_angle(s.shift.im + s.sum.arg()),
        ))
    }

    /// `ln f(p)` for real `p`.
    pub fn evaluate_log_real(&self, p: f64) -> f64 {
        let s = self.shifted(Complex64::new(p, 0.0));
        s.shift.re + s.sum.re.ln()
    }

    pub fn derivative_value(&self, p: Complex64) -> Complex64 {
        let s = self.shifted(p);
        s.shift.exp() * s.dsum
    }

    /// `f'(p) / f(p)`; unbounded at zeros of `f`.
    pub fn log_derivative(&self, p: Complex64) -> Complex64 {
        let s = self.shifted(p);
        s.dsum / s.sum
    }

    /// `sum_j c_j exp(beta_j Re p)`, the natural magnitude scale for `f` near `p`.
    pub fn term_scale(&self, p: Complex64) -> f64 {
        let s = self.shifted(p);
        s.shift.re.exp() * s.abs_sum
    }

    /// `|f(p)|` divided by [`term_scale`](Self::term_scale).
    pub fn relative_magnitude(&self, p: Complex64) -> f64 {
        self.shifted(p).relative_magnitude()
    }

    /// The sum with every exponent shifted by `delta`, i.e. `exp(delta p) f(p)`.
    pub fn shifted_by(&self, delta: f64) -> Result<Self> {
        Self::new(
            self.terms
                .iter()
                .map(|t| Term {
                    exponent: t.exponent + delta,
                    multiplicity: t.multiplicity,
                })
                .collect(),
        )
    }
}

/// Fit of `f(p) ~ a exp(beta p) g(p)` on real samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioFit {
    pub a: f64,
    pub beta: f64,
    /// `max_p |f(p) - a exp(beta p) g(p)| / max(1, |f(p)|)` over the samples.
    pub residual: f64,
}

impl RatioFit {
    /// Whether the fit says `f` and `g` share their zeros with `a = 1`.
    pub fn is_pure_shift(&self, tol: f64) -> bool {
        (self.a - 1.0).abs() <= tol && self.residual <= tol
    }
}

/// Sample abscissae used by [`ratio_factor`] when the caller has no
/// preference: 17 equispaced points on [-4, 4].
pub fn default_ratio_samples() -> Vec<f64> {
    (0..17).map(|i| -4.0 + 0.5 * f64::from(i)).collect()
}

pub fn ratio_factor(f: &ExpPoly, g: &ExpPoly, sample_ps: &[f64]) -> Result<RatioFit> {
    if let Some(p) = sample_ps.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("sample {p} is not finite")));
    }
    let mut distinct = sample_ps.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidInput(
            "ratio fit needs at least two distinct samples".into(),
        ));
    }

    let a = f64::from(f.degree()) / f64::from(g.degree());
    let ln_a = a.ln();
    let logs: Vec<(f64, f64, f64)> = sample_ps
        .iter()
        .map(|&p| (p, f.evaluate_log_real(p), g.evaluate_log_real(p)))
        .collect();

    let n = logs.len() as f64;
    let mean_p = logs.iter().map(|l| l.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|l| l.1 - l.2 - ln_a).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(p, lf, lg) in &logs {
        let dx = p - mean_p;
        sxy += dx * (lf - lg - ln_a - mean_y);
        sxx += dx * dx;
    }
    let beta = sxy / sxx;

    // |f - r| / max(1, |f|) = min(f, 1) |1 - r/f|, evaluated in log space.
    let residual = logs
        .iter()
        .map(|&(p, lf, lg)| {
            let lr = ln_a + beta * p + lg;
            lf.exp().min(1.0) * (lr - lf).exp_m1().abs()
        })
        .fold(0.0, f64::max);

    Ok(RatioFit { a, beta, residual })
}
