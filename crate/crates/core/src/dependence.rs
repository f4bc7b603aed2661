//! Numerical certification that the only linear relations among sampled
//! norm curves are the ones forced by equivalence classes.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::continuation::pnorm_at;
use crate::error::{Error, Result};
use crate::exppoly::{
    default_ratio_samples, ratio_factor, zero_multiset_equal, ExpPoly, RatioFit, Rectangle,
    ZeroSearchOptions, DEFAULT_MERGE_TOL,
};
use crate::json::extended_f64;
use crate::vectors::{partition, trivial_null_basis, EquivalencePartition, RealVector, DEFAULT_EQUIV_TOL};

/// Width of the finite sampling window; norm curves are nearly flat beyond it.
pub const MAX_SPAN: f64 = 39.0;
pub const DEFAULT_GAP_THRESHOLD: f64 = 1e6;
/// Floor on `sigma_r / sigma_1` for a singular value to count towards the rank.
pub const RELATIVE_FLOOR: f64 = 1e-10;
pub const DEFAULT_ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleGrid {
    pub a: f64,
    #[serde(serialize_with = "extended_f64")]
    pub b: f64,
    /// Finite sample exponents, strictly increasing.
    pub points: Vec<f64>,
    /// Whether the max-norm (`p = inf`) is sampled as an extra row.
    pub includes_infinity: bool,
}

impl SampleGrid {
    pub fn count(&self) -> usize {
        self.points.len() + usize::from(self.includes_infinity)
    }

    /// All sample exponents, `f64::INFINITY` last when present.
    pub fn exponents(&self) -> Vec<f64> {
        let mut ps = self.points.clone();
        if self.includes_infinity {
            ps.push(f64::INFINITY);
        }
        ps
    }
}

/// Chebyshev-Lobatto points on `[a, min(b, a + 39)]`; for `b = inf` one of
/// the `count` samples is the exact max-norm.
pub fn make_grid(a: f64, b: f64, count: usize) -> Result<SampleGrid> {
    if !(a >= 1.0 && a.is_finite() && b > a) {
        return Err(Error::InvalidInterval { a, b });
    }
    if count < 2 {
        return Err(Error::InvalidInput(format!("grid needs at least 2 samples, got {count}")));
    }
    let includes_infinity = b == f64::INFINITY;
    let n = if includes_infinity { count - 1 } else { count };
    let hi = b.min(a + MAX_SPAN);
    let points = if n == 1 {
        vec![a]
    } else {
        let (mid, half) = (0.5 * (a + hi), 0.5 * (hi - a));
        let mut pts: Vec<f64> = (0..n)
            .map(|k| mid - half * (PI * k as f64 / (n - 1) as f64).cos())
            .collect();
        pts[0] = a;
        pts[n - 1] = hi;
        pts
    };
    Ok(SampleGrid {
        a,
        b,
        points,
        includes_infinity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormMatrix {
    /// `entries[(i, k)] = ||v_k||_{p_i}`.
    pub entries: DMatrix<f64>,
    /// Euclidean length of each column of `entries`.
    pub column_scales: Vec<f64>,
    pub warnings: Vec<String>,
}

impl NormMatrix {
    /// Entries with every column divided by its scale.
    pub fn scaled(&self) -> DMatrix<f64> {
        let mut m = self.entries.clone();
        for (k, s) in self.column_scales.iter().enumerate() {
            m.column_mut(k).unscale_mut(*s);
        }
        m
    }
}

pub fn build_matrix(vs: &[RealVector], grid: &SampleGrid) -> Result<NormMatrix> {
    if vs.is_empty() {
        return Err(Error::InvalidInput("no vectors".into()));
    }
    let ps = grid.exponents();
    let columns: Vec<Vec<f64>> = vs
        .par_iter()
        .map(|v| ps.iter().map(|&p| pnorm_at(v, p)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let entries = DMatrix::from_fn(ps.len(), vs.len(), |i, k| columns[k][i]);
    let column_scales = entries.column_iter().map(|c| c.norm()).collect();
    let mut warnings = Vec::new();
    if ps.len() < 2 * vs.len() {
        warnings.push(format!(
            "{} samples for {} vectors; at least {} recommended",
            ps.len(),
            vs.len(),
            2 * vs.len()
        ));
    }
    Ok(NormMatrix {
        entries,
        column_scales,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    /// Singular values of the column-scaled matrix, non-increasing.
    pub singular_values: Vec<f64>,
    /// `sigma_r / sigma_{r+1}`, infinite when `r` is the column count.
    pub rank_gap: f64,
    /// False when no index satisfies both the gap and the floor; `rank` is
    /// then just the count of singular values above the floor.
    pub gap_found: bool,
    /// Right singular vectors (columns) matching `singular_values`.
    right_vectors: DMatrix<f64>,
}

pub fn numeric_rank(m: &NormMatrix, gap_threshold: f64) -> Result<RankInfo> {
    let (rows, cols) = m.entries.shape();
    if cols == 0 || rows < cols {
        return Err(Error::DegenerateShape { rows, cols });
    }
    let svd = m.scaled().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or(Error::DegenerateShape { rows, cols })?;
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let right_vectors = DMatrix::from_fn(cols, cols, |r, c| v_t[(order[c], r)]);

    let ratio = |r: usize| {
        // sigma_r / sigma_{r+1}, 1-based r.
        let next = sigma.get(r).copied().unwrap_or(0.0);
        if next == 0.0 {
            f64::INFINITY
        } else {
            sigma[r - 1] / next
        }
    };
    let chosen = (1..=cols)
        .rev()
        .find(|&r| ratio(r) >= gap_threshold && sigma[r - 1] / sigma[0] >= RELATIVE_FLOOR);
    let (rank, gap_found) = match chosen {
        Some(r) => (r, true),
        None => (
            sigma.iter().filter(|s| **s / sigma[0] >= RELATIVE_FLOOR).count().max(1),
            false,
        ),
    };
    Ok(RankInfo {
        rank,
        rank_gap: ratio(rank),
        singular_values: sigma,
        gap_found,
        right_vectors,
    })
}

/// Largest principal angle between the column spans of `a` and `b`; pi/2
/// when the dimensions differ.
pub fn largest_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return PI / 2.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let qa = orthonormal_basis(a);
    let qb = orthonormal_basis(b);
    if qa.ncols() != qb.ncols() {
        return PI / 2.0;
    }
    let residual = &qb - &qa * (qa.transpose() * &qb);
    let sine = residual.singular_values().max();
    sine.min(1.0).asin()
}

fn orthonormal_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-12 * smax)
        .collect();
    DMatrix::from_fn(a.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ConsistentWithTheorem,
    UnexpectedDependence,
    IllConditioned,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRatio {
    pub i: usize,
    pub j: usize,
    pub equivalent: bool,
    pub fit: RatioFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairZeros {
    pub i: usize,
    pub j: usize,
    pub equivalent: bool,
    pub same_zeros: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependenceReport {
    pub grid: SampleGrid,
    pub column_scales: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub numeric_rank: usize,
    #[serde(serialize_with = "extended_f64")]
    pub rank_gap: f64,
    /// Coefficient vectors in the original (unscaled) coordinates.
    pub null_basis: Vec<Vec<f64>>,
    pub partition: EquivalencePartition,
    pub trivial_basis: Vec<Vec<f64>>,
    /// Largest principal angle between the computed and trivial null
    /// spaces, measured in column-scaled coordinates.
    pub principal_angle: f64,
    pub classification: Classification,
    pub ratio_fits: Vec<PairRatio>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub zero_comparisons: Vec<PairZeros>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Defaults to `max(16, 4 n)`.
    pub grid_count: Option<usize>,
    pub gap_threshold: f64,
    pub equiv_tol: f64,
    pub angle_tol: f64,
    /// Also compare zero multisets pairwise on `zero_window`.
    pub compare_zeros: bool,
    pub zero_window: Rectangle,
    pub zero_match_tol: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            grid_count: None,
            gap_threshold: DEFAULT_GAP_THRESHOLD,
            equiv_tol: DEFAULT_EQUIV_TOL,
            angle_tol: DEFAULT_ANGLE_TOL,
            compare_zeros: false,
            zero_window: Rectangle::default_window(),
            zero_match_tol: 1e-6,
        }
    }
}

/// Rescales `alpha` so its largest-magnitude entry is `+1`.
fn normalize_sign(alpha: &mut [f64]) {
    let pivot = alpha
        .iter()
        .copied()
        .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot != 0.0 {
        alpha.iter_mut().for_each(|x| *x /= pivot);
    }
}

pub fn analyze(vs: &[RealVector], a: f64, b: f64, opts: &AnalyzeOptions) -> Result<DependenceReport> {
    let n = vs.len();
    let part = partition(vs, opts.equiv_tol)?;
    let grid = make_grid(a, b, opts.grid_count.unwrap_or((4 * n).max(16)))?;
    let matrix = build_matrix(vs, &grid)?;
    let rank = numeric_rank(&matrix, opts.gap_threshold)?;
    let mut diagnostics = matrix.warnings.clone();

    let scales = &matrix.column_scales;
    let null_scaled = rank.right_vectors.columns(rank.rank, n - rank.rank).into_owned();
    let null_basis: Vec<Vec<f64>> = null_scaled
        .column_iter()
        .map(|y| {
            let mut alpha: Vec<f64> = y.iter().zip(scales).map(|(yk, s)| yk / s).collect();
            normalize_sign(&mut alpha);
            alpha
        })
        .collect();

    let trivial_basis = trivial_null_basis(&part);
    let trivial_scaled = DMatrix::from_fn(n, trivial_basis.len(), |k, c| trivial_basis[c][k] * scales[k]);
    let principal_angle = largest_principal_angle(&null_scaled, &trivial_scaled);

    let classification = if !rank.gap_found {
        diagnostics.push(format!(
            "no singular value gap of at least {:e} above the relative floor {:e}",
            opts.gap_threshold, RELATIVE_FLOOR
        ));
        Classification::IllConditioned
    } else if rank.rank != part.class_count() {
        diagnostics.push(format!(
            "numeric rank {} differs from the number of equivalence classes {}",
            rank.rank,
            part.class_count()
        ));
        Classification::UnexpectedDependence
    } else if principal_angle > opts.angle_tol {
        diagnostics.push(format!(
            "null space deviates from the trivial relations by {principal_angle:e} rad"
        ));
        Classification::UnexpectedDependence
    } else {
        Classification::ConsistentWithTheorem
    };

    let polys: Vec<ExpPoly> = vs
        .iter()
        .map(|v| ExpPoly::from_vector(v, DEFAULT_MERGE_TOL))
        .collect::<Result<_>>()?;
    let samples = default_ratio_samples();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let same_class = |i: usize, j: usize| part.class_of(i) == part.class_of(j);
    let ratio_fits = pairs
        .iter()
        .map(|&(i, j)| {
            Ok(PairRatio {
                i,
                j,
                equivalent: same_class(i, j),
                fit: ratio_factor(&polys[i], &polys[j], &samples)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let zero_comparisons = if opts.compare_zeros {
        let zopts = ZeroSearchOptions::default();
        pairs
            .par_iter()
            .map(|&(i, j)| {
                Ok(PairZeros {
                    i,
                    j,
                    equivalent: same_class(i, j),
                    same_zeros: zero_multiset_equal(
                        &polys[i],
                        &polys[j],
                        &opts.zero_window,
                        opts.zero_match_tol,
                        &zopts,
                    )?,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    for z in &zero_comparisons {
        if z.equivalent != z.same_zeros {
            diagnostics.push(format!(
                "vectors {} and {}: equivalence {} but zero multisets equal {}",
                z.i, z.j, z.equivalent, z.same_zeros
            ));
        }
    }

    Ok(DependenceReport {
        grid,
        column_scales: matrix.column_scales.clone(),
        singular_values: rank.singular_values,
        numeric_rank: rank.rank,
        rank_gap: rank.rank_gap,
        null_basis,
        partition: part,
        trivial_basis,
        principal_angle,
        classification,
        ratio_fits,
        zero_comparisons,
        diagnostics,
    })
}

/// `max_p |sum_k alpha_k ||v_k||_p| / sum_k |alpha_k| ||v_k||_p` over `ps`.
pub fn relation_residual(vs: &[RealVector], alpha: &[f64], ps: &[f64]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &p in ps {
        let norms = DVector::from_iterator(
            vs.len(),
            vs.iter().map(|v| pnorm_at(v, p)).collect::<Result<Vec<_>>>()?,
        );
        let num: f64 = alpha.iter().zip(norms.iter()).map(|(a, x)| a * x).sum();
        let den: f64 = alpha.iter().zip(norms.iter()).map(|(a, x)| a.abs() * x).sum();
        if den > 0.0 {
            worst = worst.max(num.abs() / den);
        }
    }
    Ok(worst)
}

impl Serialize for NormMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<Vec<f64>> = self
            .entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        let mut st = s.serialize_struct("NormMatrix", 3)?;
        st.serialize_field("entries", &rows)?;
        st.serialize_field("column_scales", &self.column_scales)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(x: &[f64]) -> RealVector {
        RealVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = make_grid(1.0, 4.0, 2).unwrap();
        assert_eq!(g.exponents(), vec![1.0, 4.0]);
        let g = make_grid(1.0, f64::INFINITY, 9).unwrap();
        assert_eq!(g.points.len(), 8);
        assert_eq!(g.points[0], 1.0);
        assert_eq!(g.points[7], 40.0);
        assert!(g.includes_infinity);
        assert_eq!(g.count(), 9);
        assert!(g.points.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(make_grid(2.0, 2.0, 5), Err(Error::InvalidInterval { .. })));
        assert!(make_grid(0.5, 2.0, 5).is_err());
        assert!(make_grid(1.0, 2.0, 1).is_err());
        let g = make_grid(1.0, 100.0, 5).unwrap();
        assert_eq!(*g.points.last().unwrap(), 40.0);
    }

    #[test]
    fn matrix_examples() {
        let g = make_grid(1.0, 3.0, 3).unwrap();
        let m = build_matrix(&[rv(&[1.0])], &g).unwrap();
        assert!(m.entries.iter().all(|x| *x == 1.0));

        let g = make_grid(1.0, 2.0, 2).unwrap();
        let m = build_matrix(&[rv(&[1.0, 1.0])], &g).unwrap();
        assert_eq!(m.entries[(0, 0)], 2.0);
        assert!((m.entries[(1, 0)] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.warnings.len(), 0);

        let g = SampleGrid {
            a: 1.0,
            b: f64::INFINITY,
            points: vec![],
            includes_infinity: true,
        };
        let m = build_matrix(&[rv(&[3.0, 4.0])], &g).unwrap();
        assert_eq!(m.entries[(0, 0)], 4.0);
        let scaled = m.scaled();
        assert!((scaled.column(0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_examples() {
        let g = make_grid(1.0, 4.0, 8).unwrap();
        let m = build_matrix(&[rv(&[1.0]), rv(&[2.0])], &g).unwrap();
        assert_eq!(numeric_rank(&m, DEFAULT_GAP_THRESHOLD).unwrap().rank, 1);
        let m = build_matrix(&[rv(&[1.0, 0.0]), rv(&[1.0, 1.0])], &g).unwrap();
        let r = numeric_rank(&m, DEFAULT_GAP_THRESHOLD).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.rank_gap, f64::INFINITY);
        let m = build_matrix(&[rv(&[5.0, 1.0])], &g).unwrap();
        assert_eq!(numeric_rank(&m, DEFAULT_GAP_THRESHOLD).unwrap().rank, 1);

        let g = make_grid(1.0, 4.0, 2).unwrap();
        let m = build_matrix(&[rv(&[1.0]), rv(&[1.0, 1.0]), rv(&[1.0, 2.0])], &g).unwrap();
        assert!(matches!(
            numeric_rank(&m, DEFAULT_GAP_THRESHOLD),
            Err(Error::DegenerateShape { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn principal_angles() {
        let e1 = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let tilted = DMatrix::from_column_slice(3, 1, &[1.0, 1e-3, 0.0]);
        assert!((largest_principal_angle(&e1, &tilted) - 1e-3f64.atan()).abs() < 1e-12);
        assert_eq!(largest_principal_angle(&e1, &e1), 0.0);
        let empty = DMatrix::<f64>::zeros(3, 0);
        assert_eq!(largest_principal_angle(&empty, &empty), 0.0);
        assert_eq!(largest_principal_angle(&e1, &empty), PI / 2.0);
    }

    #[test]
    fn analyze_examples() {
        let opts = AnalyzeOptions::default();
        let r = analyze(&[rv(&[1.0, 0.0]), rv(&[0.0, 1.0]), rv(&[1.0, 1.0])], 1.0, 4.0, &opts).unwrap();
        assert_eq!(r.numeric_rank, 2);
        assert_eq!(r.classification, Classification::ConsistentWithTheorem);
        assert_eq!(r.null_basis.len(), 1);
        let alpha = &r.null_basis[0];
        assert!((alpha[0] - 1.0).abs() < 1e-9 && (alpha[1] + 1.0).abs() < 1e-9 && alpha[2].abs() < 1e-9);

        let r = analyze(&[rv(&[2.0]), rv(&[1.0])], 1.0, f64::INFINITY, &opts).unwrap();
        assert_eq!(r.numeric_rank, 1);
        assert_eq!(r.classification, Classification::ConsistentWithTheorem);
        let alpha = &r.null_basis[0];
        assert!((alpha[1] / alpha[0] + 2.0).abs() < 1e-9);

        let r = analyze(&[rv(&[1.0])], 1.0, 2.0, &opts).unwrap();
        assert_eq!(r.numeric_rank, 1);
        assert!(r.null_basis.is_empty());
        assert_eq!(r.classification, Classification::ConsistentWithTheorem);
    }

    #[test]
    fn report_serializes_infinite_values() {
        let r = analyze(&[rv(&[1.0])], 1.0, f64::INFINITY, &AnalyzeOptions::default()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"rank_gap\":\"inf\""));
        assert!(json.contains("\"b\":\"inf\""));
        assert!(json.contains("\"consistent-with-theorem\""));
    }
}
