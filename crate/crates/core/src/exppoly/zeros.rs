//! Zero isolation by recursive quadrisection.
//!
//! A box holding a single zero is located by its first contour moment and
//! polished with Newton's method. Boxes holding several zeros are split;
//! once a box is smaller than `min_box_diameter` its contents are reported
//! as one cluster with the summed multiplicity.

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;

use super::contour::{boundary_clearance, contour_moment, segment_clearance, BOUNDARY_REL, INFLATION};
use super::{count_zeros, ExpPoly, Rectangle, DEFAULT_QUAD_TOL};
use crate::error::{Error, Result};

/// Split positions tried in order. None of them is exactly 1/2, so a box
/// symmetric about a line of zeros is not cut along that line.
const SPLITS: [(f64, f64); 6] = [
    (0.561_8, 0.538_2),
    (0.427_1, 0.591_1),
    (0.627_3, 0.395_1),
    (0.345_9, 0.367_3),
    (0.701_3, 0.678_9),
    (0.291_7, 0.731_3),
];

#[derive(Debug, Clone, Copy)]
pub struct ZeroSearchOptions {
    pub quad_tol: f64,
    /// Boxes below this diameter are reported as a single cluster.
    pub min_box_diameter: f64,
    /// Retries with the window grown by `1 + 2^-5` when its boundary is
    /// too close to a zero.
    pub max_inflations: u32,
    /// Newton stops once `|f(z)| <= newton_tol * sum_j c_j |exp(beta_j z)|`.
    pub newton_tol: f64,
    pub max_newton_iter: usize,
}

impl Default for ZeroSearchOptions {
    fn default() -> Self {
        Self {
            quad_tol: DEFAULT_QUAD_TOL,
            min_box_diameter: 1e-6,
            max_inflations: 8,
            newton_tol: 1e-12,
            max_newton_iter: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub z: Complex64,
    pub multiplicity: u32,
    /// False when Newton polishing failed or the zero is an unresolved
    /// cluster; `z` is then the contour-moment estimate.
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    /// Sorted by `(Re z, Im z)`.
    pub zeros: Vec<Zero>,
    /// The rectangle actually searched (after any inflation).
    pub window: Rectangle,
    pub inflations: u32,
    /// Argument-principle count over `window`.
    pub total: usize,
}

impl ZeroSet {
    pub fn multiplicity_sum(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity as usize).sum()
    }
}

fn cmp_lex(a: &Zero, b: &Zero) -> Ordering {
    a.z.re
        .total_cmp(&b.z.re)
        .then(a.z.im.total_cmp(&b.z.im))
}

pub fn find_zeros(f: &ExpPoly, rect: &Rectangle, opts: &ZeroSearchOptions) -> Result<ZeroSet> {
    let mut window = *rect;
    let mut inflations = 0;
    let total = loop {
        match count_zeros(f, &window, opts.quad_tol) {
            Ok(n) => break n,
            Err(Error::BoundaryTooClose { .. }) if inflations < opts.max_inflations => {
                window = window.inflate(INFLATION);
                inflations += 1;
            }
            Err(e) => return Err(e),
        }
    };

    let mut zeros = search(f, &window, total, opts)?;
    zeros.sort_by(cmp_lex);
    let set = ZeroSet {
        zeros,
        window,
        inflations,
        total,
    };
    debug_assert_eq!(set.multiplicity_sum(), total);
    Ok(set)
}

fn search(f: &ExpPoly, rect: &Rectangle, count: usize, opts: &ZeroSearchOptions) -> Result<Vec<Zero>> {
    match count {
        0 => return Ok(Vec::new()),
        1 => return locate_simple(f, rect, opts).map(|z| vec![z]),
        _ => {}
    }
    if rect.diameter() <= opts.min_box_diameter {
        return cluster(f, rect, count);
    }

    let mut mismatch = None;
    for &(fx, fy) in &SPLITS {
        if !split_is_admissible(f, rect, fx, fy) {
            continue;
        }
        let children = rect.split(fx, fy);
        let counts: Vec<Result<usize>> = children
            .par_iter()
            .map(|c| count_zeros(f, c, opts.quad_tol))
            .collect();
        let counts: Vec<usize> = match counts.into_iter().collect::<Result<Vec<_>>>() {
            Ok(c) => c,
            Err(Error::BoundaryTooClose { .. }) => continue,
            Err(e) => return Err(e),
        };
        let sum: usize = counts.iter().sum();
        if sum != count {
            mismatch = Some(sum);
            continue;
        }
        let found: Vec<Vec<Zero>> = children
            .par_iter()
            .zip(counts.par_iter())
            .map(|(c, &n)| search(f, c, n, opts))
            .collect::<Result<_>>()?;
        return Ok(found.into_iter().flatten().collect());
    }

    match mismatch {
        Some(sum) => Err(Error::QuadratureNonConvergence(format!(
            "sub-box counts sum to {sum}, parent box counts {count}"
        ))),
        // Every split line runs into the zeros: treat them as one cluster.
        None => cluster(f, rect, count),
    }
}

fn split_is_admissible(f: &ExpPoly, rect: &Rectangle, fx: f64, fy: f64) -> bool {
    let x = rect.re_min + fx * rect.width();
    let y = rect.im_min + fy * rect.height();
    let vertical = segment_clearance(
        f,
        Complex64::new(x, rect.im_min),
        Complex64::new(x, rect.im_max),
    );
    let horizontal = segment_clearance(
        f,
        Complex64::new(rect.re_min, y),
        Complex64::new(rect.re_max, y),
    );
    vertical.min(horizontal) >= BOUNDARY_REL
}

fn moment_tol(rect: &Rectangle) -> f64 {
    1e-10 * rect.center().norm().max(rect.diameter()).max(1.0)
}

fn cluster(f: &ExpPoly, rect: &Rectangle, count: usize) -> Result<Vec<Zero>> {
    let z = if boundary_clearance(f, rect) >= BOUNDARY_REL {
        contour_moment(f, rect, 1, moment_tol(rect))?.0 / count as f64
    } else {
        rect.center()
    };
    Ok(vec![Zero {
        z,
        multiplicity: count as u32,
        refined: false,
    }])
}

fn locate_simple(f: &ExpPoly, rect: &Rectangle, opts: &ZeroSearchOptions) -> Result<Zero> {
    let (estimate, _) = contour_moment(f, rect, 1, moment_tol(rect))?;
    let slack = 1e-9 * rect.diameter() + 1e-12;
    let inside = |z: Complex64| {
        z.re >= rect.re_min - slack
            && z.re <= rect.re_max + slack
            && z.im >= rect.im_min - slack
            && z.im <= rect.im_max + slack
    };
    match newton(f, estimate, opts) {
        Some(z) if inside(z) => Ok(Zero {
            z,
            multiplicity: 1,
            refined: true,
        }),
        _ => Ok(Zero {
            z: estimate,
            multiplicity: 1,
            refined: false,
        }),
    }
}

/// Newton iteration on `f`; the dominant exponential cancels in `f/f'`.
fn newton(f: &ExpPoly, start: Complex64, opts: &ZeroSearchOptions) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..opts.max_newton_iter {
        let s = f.shifted(z);
        let small = s.sum.norm() <= opts.newton_tol * s.abs_sum;
        if s.dsum.norm() == 0.0 {
            return small.then_some(z);
        }
        let step = s.sum / s.dsum;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        z -= step;
        if small && step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
            return Some(z);
        }
    }
    let s = f.shifted(z);
    (s.sum.norm() <= opts.newton_tol * s.abs_sum).then_some(z)
}

/// Multiset comparison of the zeros of `f` and `g` on `rect`: greedy
/// nearest pairing, each pair within `match_tol` with equal multiplicity.
pub fn zero_multiset_equal(
    f: &ExpPoly,
    g: &ExpPoly,
    rect: &Rectangle,
    match_tol: f64,
    opts: &ZeroSearchOptions,
) -> Result<bool> {
    let zf = find_zeros(f, rect, opts)?;
    let zg = find_zeros(g, rect, opts)?;
    Ok(multisets_match(&zf.zeros, &zg.zeros, match_tol))
}

pub(crate) fn multisets_match(a: &[Zero], b: &[Zero], match_tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let d = (x.z - y.z).norm();
            if d <= match_tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut matched = 0;
    for (_, i, j) in pairs {
        if used_a[i] || used_b[j] || a[i].multiplicity != b[j].multiplicity {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        matched += 1;
    }
    matched == a.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppoly::DEFAULT_MERGE_TOL;
    use crate::vectors::RealVector;
    use std::f64::consts::{E, PI};

    fn from(v: &[f64]) -> ExpPoly {
        ExpPoly::from_vector(&RealVector::new(v.to_vec()).unwrap(), DEFAULT_MERGE_TOL).unwrap()
    }

    fn assert_zeros(set: &ZeroSet, expected: &[Complex64], tol: f64) {
        assert_eq!(set.zeros.len(), expected.len(), "{set:?}");
        for e in expected {
            assert!(
                set.zeros.iter().any(|z| (z.z - e).norm() <= tol && z.multiplicity == 1),
                "missing {e} in {set:?}"
            );
        }
    }

    #[test]
    fn two_term_examples() {
        let opts = ZeroSearchOptions::default();
        let f = ExpPoly::from_pairs(&[(0.0, 1), (1.0, 1)]).unwrap();
        let r = Rectangle::new(-1.0, 1.0, 1.0, 10.0).unwrap();
        let set = find_zeros(&f, &r, &opts).unwrap();
        assert_zeros(&set, &[Complex64::new(0.0, PI), Complex64::new(0.0, 3.0 * PI)], 1e-9);
        assert_eq!(set.total, 2);
        assert!(set.zeros.iter().all(|z| z.refined));

        let f = from(&[E * E, 1.0]);
        let r = Rectangle::new(-1.0, 1.0, 1.0, 2.0).unwrap();
        let set = find_zeros(&f, &r, &opts).unwrap();
        assert_zeros(&set, &[Complex64::new(0.0, PI / 2.0)], 1e-9);

        let f = ExpPoly::from_pairs(&[(0.0, 2)]).unwrap();
        let set = find_zeros(&f, &Rectangle::default_window(), &opts).unwrap();
        assert!(set.zeros.is_empty());
        assert_eq!(set.total, 0);
    }

    #[test]
    fn window_is_inflated_when_edge_hits_zero() {
        let f = ExpPoly::from_pairs(&[(0.0, 1), (1.0, 1)]).unwrap();
        let r = Rectangle::new(-1.0, 1.0, PI, 8.0).unwrap();
        let set = find_zeros(&f, &r, &ZeroSearchOptions::default()).unwrap();
        assert!(set.inflations >= 1);
        assert_eq!(set.total, set.multiplicity_sum());
        assert!(set.window.contains(Complex64::new(0.0, PI)));
        assert_eq!(set.total, 1);
    }

    #[test]
    fn double_zero_reported_as_cluster() {
        // (1 + e^p)^2 = 1 + 2 e^p + e^{2p} has double zeros at (2k+1) i pi.
        let f = ExpPoly::from_pairs(&[(0.0, 1), (1.0, 2), (2.0, 1)]).unwrap();
        let r = Rectangle::new(-1.0, 1.0, 2.0, 4.0).unwrap();
        let set = find_zeros(&f, &r, &ZeroSearchOptions::default()).unwrap();
        assert_eq!(set.total, 2);
        assert_eq!(set.zeros.len(), 1);
        assert_eq!(set.zeros[0].multiplicity, 2);
        assert!((set.zeros[0].z - Complex64::new(0.0, PI)).norm() < 1e-5);
    }

    #[test]
    fn multiset_examples() {
        let opts = ZeroSearchOptions::default();
        let r = Rectangle::new(-1.0, 1.0, 1.0, 10.0).unwrap();
        let f = from(&[E, 1.0]);
        let g = from(&[0.0, -2.0, 2.0 * E]);
        assert!(zero_multiset_equal(&f, &g, &r, 1e-6, &opts).unwrap());
        let h = from(&[E * E, 1.0]);
        assert!(!zero_multiset_equal(&f, &h, &r, 1e-6, &opts).unwrap());
        assert!(zero_multiset_equal(&h, &h, &r, 1e-6, &opts).unwrap());
    }

    #[test]
    fn multiset_matching_respects_multiplicity() {
        let z = |re: f64, im: f64, m: u32| Zero {
            z: Complex64::new(re, im),
            multiplicity: m,
            refined: true,
        };
        assert!(multisets_match(&[z(0.0, 1.0, 1), z(0.0, 2.0, 1)], &[z(0.0, 2.0, 1), z(0.0, 1.0, 1)], 1e-9));
        assert!(!multisets_match(&[z(0.0, 1.0, 2)], &[z(0.0, 1.0, 1)], 1e-9));
        assert!(!multisets_match(&[z(0.0, 1.0, 1)], &[z(0.0, 1.1, 1)], 1e-2));
        assert!(!multisets_match(&[z(0.0, 1.0, 1)], &[], 1e-2));
    }
}
