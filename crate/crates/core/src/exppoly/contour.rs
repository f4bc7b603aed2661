//! Argument-principle counting on rectangles.
//!
//! The winding integral `(1/2 pi i) \oint p^k f'/f dp` is computed edge by
//! edge with adaptive Gauss-Kronrod (7, 15) panels. A count is accepted only
//! when the result sits within `quad_tol` of an integer and a second pass
//! with every panel halved agrees to `1e-4`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::ExpPoly;
use crate::error::{Error, Result};

pub const DEFAULT_QUAD_TOL: f64 = 1e-3;

/// Minimum of `|f| / term scale` tolerated on a counting contour.
pub(crate) const BOUNDARY_REL: f64 = 1e-8;

/// Suggested growth factor for a rectangle whose boundary is too close to a zero.
pub(crate) const INFLATION: f64 = 1.0 + 1.0 / 32.0;

const HALVING_TOL: f64 = 1e-4;
const MAX_PANELS_PER_EDGE: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let all_finite = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite());
        if !all_finite || !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidInput(format!(
                "degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// Default zero window: upper half of the strip `|Re p| <= 1`. Zeros of
    /// real-coefficient sums come in conjugate pairs, so the lower half is
    /// its mirror image.
    pub fn default_window() -> Self {
        Self {
            re_min: -1.0,
            re_max: 1.0,
            im_min: 0.5,
            im_max: 40.0,
        }
    }

    /// Counter-clockwise corners starting at the lower left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Grows both half-widths by `factor` about the center.
    pub fn inflate(&self, factor: f64) -> Self {
        let c = self.center();
        let hw = 0.5 * self.width() * factor;
        let hh = 0.5 * self.height() * factor;
        Self {
            re_min: c.re - hw,
            re_max: c.re + hw,
            im_min: c.im - hh,
            im_max: c.im + hh,
        }
    }

    /// Splits at fractional positions `(fx, fy)` into four children ordered
    /// lower-left, lower-right, upper-left, upper-right.
    pub fn split(&self, fx: f64, fy: f64) -> [Self; 4] {
        let x = self.re_min + fx * self.width();
        let y = self.im_min + fy * self.height();
        [
            Self { re_max: x, im_max: y, ..*self },
            Self { re_min: x, im_max: y, ..*self },
            Self { re_max: x, im_min: y, ..*self },
            Self { re_min: x, im_min: y, ..*self },
        ]
    }
}

// Gauss-Kronrod (7, 15) abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod and Gauss estimates of `\int_a^b h(p) dp` along a straight
/// segment, plus the rounding noise carried by the Kronrod sum. `h` returns
/// the integrand value and an estimate of its absolute rounding error.
fn gk15<H: Fn(Complex64) -> (Complex64, f64)>(
    h: &H,
    a: Complex64,
    b: Complex64,
) -> (Complex64, Complex64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (fc, nc) = h(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut noise = nc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, nlo) = h(mid - dx);
        let (hi, nhi) = h(mid + dx);
        let pair = lo + hi;
        kron += pair * WGK[j];
        noise += (nlo + nhi) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kron * half, gauss * half, noise * half.norm())
}

/// Adaptive integral along `a -> b`. Returns the accepted composite estimate
/// and the same composite with every accepted panel halved.
fn edge_integral<H: Fn(Complex64) -> (Complex64, f64)>(
    h: &H,
    a: Complex64,
    b: Complex64,
    tol: f64,
    min_panels: usize,
) -> Result<(Complex64, Complex64)> {
    let point = |t: f64| a + (b - a) * t;
    let mut pending: Vec<(f64, f64)> = (0..min_panels)
        .rev()
        .map(|i| (i as f64 / min_panels as f64, (i + 1) as f64 / min_panels as f64))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut halved = Complex64::new(0.0, 0.0);
    let mut accepted = 0usize;
    while let Some((t0, t1)) = pending.pop() {
        let (k, g, noise) = gk15(h, point(t0), point(t1));
        let width = t1 - t0;
        if !(k.re.is_finite() && k.im.is_finite()) {
            return Err(Error::QuadratureNonConvergence(format!(
                "non-finite integrand near p = {}",
                point(0.5 * (t0 + t1))
            )));
        }
        // Near a multiple zero the integrand is only known to `noise`; asking
        // for more than that would subdivide forever.
        if (k - g).norm() <= (tol * width).max(16.0 * noise) || width < 1e-13 {
            let tm = 0.5 * (t0 + t1);
            let (k1, _, _) = gk15(h, point(t0), point(tm));
            let (k2, _, _) = gk15(h, point(tm), point(t1));
            total += k;
            halved += k1 + k2;
            accepted += 1;
        } else {
            let tm = 0.5 * (t0 + t1);
            // Left half on top of the stack so panels are summed left to right.
            pending.push((tm, t1));
            pending.push((t0, tm));
        }
        if accepted + pending.len() > MAX_PANELS_PER_EDGE {
            return Err(Error::QuadratureNonConvergence(format!(
                "panel budget exhausted on edge {a} -> {b}"
            )));
        }
    }
    Ok((total, halved))
}

fn min_panels(f: &ExpPoly, a: Complex64, b: Complex64) -> usize {
    // Zeros are spaced roughly 2 pi / spread apart along the imaginary axis.
    let len = (b - a).norm();
    let density = f.spread().max(0.25);
    ((len * density * 2.0 / PI).ceil() as usize).clamp(4, 4096)
}

/// Smallest `|f| / term scale` over a dense sample of the rectangle boundary.
pub(crate) fn boundary_clearance(f: &ExpPoly, rect: &Rectangle) -> f64 {
    let corners = rect.corners();
    let mut min_rel = f64::INFINITY;
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        min_rel = min_rel.min(segment_clearance(f, a, b));
    }
    min_rel
}

pub(crate) fn segment_clearance(f: &ExpPoly, a: Complex64, b: Complex64) -> f64 {
    let len = (b - a).norm();
    let n = ((len * f.spread().max(0.25) * 8.0).ceil() as usize).clamp(64, 20_000);
    let at = |t: f64| f.relative_magnitude(a + (b - a) * t);
    let samples: Vec<f64> = (0..=n).map(|j| at(j as f64 / n as f64)).collect();
    let mut min_rel = samples.iter().copied().fold(f64::INFINITY, f64::min);
    // A zero sitting on the segment between samples only shows up as a dip;
    // golden-section search each dip down to the bottom.
    for j in 0..=n {
        let left = if j == 0 { f64::INFINITY } else { samples[j - 1] };
        let right = if j == n { f64::INFINITY } else { samples[j + 1] };
        if samples[j] > left || samples[j] > right {
            continue;
        }
        let (mut lo, mut hi) = ((j.max(1) - 1) as f64 / n as f64, ((j + 1).min(n)) as f64 / n as f64);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let (mut x1, mut x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
        let (mut f1, mut f2) = (at(x1), at(x2));
        for _ in 0..80 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = at(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = at(x2);
            }
            if hi - lo < 1e-17 {
                break;
            }
        }
        min_rel = min_rel.min(f1).min(f2);
    }
    min_rel
}

/// `(1/2 pi i) \oint_{rect} p^moment f'(p)/f(p) dp` with its halved-panel
/// companion. `tol` is absolute on the result.
pub(crate) fn contour_moment(
    f: &ExpPoly,
    rect: &Rectangle,
    moment: u32,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    let h = |p: Complex64| {
        let s = f.shifted(p);
        let v = s.dsum / s.sum * p.powu(moment);
        (v, 4.0 * f64::EPSILON * v.norm() / s.relative_magnitude())
    };
    let corners = rect.corners();
    let perimeter = 2.0 * (rect.width() + rect.height());
    let mut total = Complex64::new(0.0, 0.0);
    let mut halved = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let share = (b - a).norm() / perimeter;
        let (t, hv) = edge_integral(&h, a, b, 2.0 * PI * tol * share, min_panels(f, a, b))?;
        total += t;
        halved += hv;
    }
    let scale = Complex64::new(0.0, 2.0 * PI);
    Ok((total / scale, halved / scale))
}

/// Raw (unrounded) winding number of `f` around `rect`.
pub fn winding_number(f: &ExpPoly, rect: &Rectangle) -> Result<Complex64> {
    check_boundary(f, rect)?;
    Ok(contour_moment(f, rect, 0, 1e-8)?.0)
}

fn check_boundary(f: &ExpPoly, rect: &Rectangle) -> Result<()> {
    let clearance = boundary_clearance(f, rect);
    if clearance < BOUNDARY_REL {
        return Err(Error::BoundaryTooClose {
            min_ratio: clearance,
            suggested_inflation: INFLATION,
        });
    }
    Ok(())
}

/// Number of zeros of `f` inside `rect`, counted with multiplicity.
pub fn count_zeros(f: &ExpPoly, rect: &Rectangle, quad_tol: f64) -> Result<usize> {
    if !(quad_tol > 0.0 && quad_tol < 0.5) {
        return Err(Error::InvalidInput(format!(
            "quadrature tolerance {quad_tol} must lie in (0, 0.5)"
        )));
    }
    if f.terms().len() == 1 {
        return Ok(0);
    }
    check_boundary(f, rect)?;

    let mut tol = 1e-7;
    let mut last = Complex64::new(f64::NAN, f64::NAN);
    for _ in 0..4 {
        let (w, w_half) = contour_moment(f, rect, 0, tol)?;
        let nearest = w.re.round();
        let settled = (w - w_half).norm() < HALVING_TOL;
        let integral = (w.re - nearest).abs() <= quad_tol && w.im.abs() <= quad_tol;
        if settled && integral && nearest >= 0.0 {
            return Ok(nearest as usize);
        }
        last = w;
        tol *= 1e-2;
    }
    Err(Error::QuadratureNonConvergence(format!(
        "winding integral {last} is not within {quad_tol} of a non-negative integer"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term() -> ExpPoly {
        ExpPoly::from_pairs(&[(0.0, 1), (1.0, 1)]).unwrap()
    }

    #[test]
    fn rectangle_validation() {
        assert!(Rectangle::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, f64::NAN, 0.0, 1.0).is_err());
        let r = Rectangle::new(-1.0, 1.0, 2.0, 4.0).unwrap();
        let kids = r.split(0.5, 0.5);
        let area: f64 = kids.iter().map(|k| k.width() * k.height()).sum();
        assert!((area - 4.0).abs() < 1e-15);
        let big = r.inflate(2.0);
        assert_eq!(big, Rectangle::new(-2.0, 2.0, 1.0, 5.0).unwrap());
    }

    #[test]
    fn count_examples() {
        let f = two_term();
        let r = Rectangle::new(-1.0, 1.0, 2.0, 4.0).unwrap();
        assert_eq!(count_zeros(&f, &r, DEFAULT_QUAD_TOL).unwrap(), 1);
        let r = Rectangle::new(-1.0, 1.0, 2.0, 10.0).unwrap();
        assert_eq!(count_zeros(&f, &r, DEFAULT_QUAD_TOL).unwrap(), 2);
        let g = ExpPoly::from_pairs(&[(0.0, 2)]).unwrap();
        assert_eq!(count_zeros(&g, &r, DEFAULT_QUAD_TOL).unwrap(), 0);
    }

    #[test]
    fn winding_is_nearly_integral() {
        let f = ExpPoly::from_pairs(&[(-0.7, 2), (0.4, 1), (1.3, 3)]).unwrap();
        let r = Rectangle::new(-1.3, 1.1, 0.5, 25.0).unwrap();
        let w = winding_number(&f, &r).unwrap();
        assert!((w.re - w.re.round()).abs() < 1e-6, "{w}");
        assert!(w.im.abs() < 1e-6);
    }

    #[test]
    fn boundary_through_zero_is_refused() {
        let f = two_term();
        // Bottom edge passes through i pi.
        let r = Rectangle::new(-1.0, 1.0, PI, 5.0).unwrap();
        match count_zeros(&f, &r, DEFAULT_QUAD_TOL) {
            Err(Error::BoundaryTooClose {
                suggested_inflation,
                ..
            }) => assert_eq!(suggested_inflation, INFLATION),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let r = Rectangle::default_window();
        assert!(count_zeros(&two_term(), &r, 0.0).is_err());
        assert!(count_zeros(&two_term(), &r, 0.7).is_err());
    }

    #[test]
    fn first_moment_locates_zero() {
        let f = two_term();
        let r = Rectangle::new(-1.0, 1.0, 2.0, 4.0).unwrap();
        let (s1, _) = contour_moment(&f, &r, 1, 1e-10).unwrap();
        assert!((s1 - Complex64::new(0.0, PI)).norm() < 1e-8, "{s1}");
    }
}
