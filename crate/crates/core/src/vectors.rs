//! Input vectors and the equivalence relation on them.
//!
//! Two vectors are equivalent when one is obtained from the other by adding
//! zero coordinates, permuting or negating coordinates, and rescaling by a
//! positive factor. Equivalent vectors have proportional norm curves
//! `p -> ||v||_p`, so every linear relation supported inside one class is
//! trivial.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative per-weight tolerance used when none is supplied.
pub const DEFAULT_EQUIV_TOL: f64 = 1e-9;

/// A finite, non-zero real vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RealVector {
    coords: Vec<f64>,
}

impl RealVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("vector has no coordinates".into()));
        }
        if let Some(j) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coordinate {j} is not finite ({})",
                coords[j]
            )));
        }
        if coords.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidInput("zero vector".into()));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Absolute values of the non-zero coordinates, in input order.
    pub fn nonzero_magnitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.coords.iter().filter(|x| **x != 0.0).map(|x| x.abs())
    }

    pub fn nonzero_count(&self) -> usize {
        self.nonzero_magnitudes().count()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.coords.iter().map(|x| c * x).collect())
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

/// Representative of an equivalence class: sorted relative magnitudes plus
/// the scale that was divided out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalForm {
    /// Non-increasing, in (0, 1], first entry exactly 1.
    pub weights: Vec<f64>,
    /// Largest absolute coordinate.
    pub scale: f64,
}

impl CanonicalForm {
    /// Recovers the multiset of non-zero magnitudes, largest first.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w * self.scale).collect()
    }

    /// Elementwise relative comparison of weights. Equal magnitudes are kept
    /// as separate entries, so the lengths must agree exactly.
    pub fn same_shape(&self, other: &CanonicalForm, tol: f64) -> bool {
        self.weights.len() == other.weights.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (a - b).abs() <= tol * a.max(*b))
    }
}

pub fn canonicalize(v: &RealVector) -> CanonicalForm {
    let scale = v.max_abs();
    let mut weights: Vec<f64> = v.nonzero_magnitudes().map(|x| x / scale).collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    // x / x is exactly 1 in IEEE arithmetic, so weights[0] == 1 already.
    CanonicalForm { weights, scale }
}

/// Outcome of a pairwise equivalence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// `scale(u) / scale(v)` when equivalent, so `||u||_p = ratio * ||v||_p`.
    pub ratio: Option<f64>,
}

pub fn equivalent(u: &RealVector, v: &RealVector, tol: f64) -> Equivalence {
    let cu = canonicalize(u);
    let cv = canonicalize(v);
    if cu.same_shape(&cv, tol) {
        Equivalence {
            equivalent: true,
            ratio: Some(cu.scale / cv.scale),
        }
    } else {
        Equivalence {
            equivalent: false,
            ratio: None,
        }
    }
}

/// Grouping of vector indices into equivalence classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalencePartition {
    /// Each class lists member indices in increasing order; classes are
    /// ordered by their smallest member.
    pub classes: Vec<Vec<usize>>,
    /// `scales[k]` is the scale of vector `k` relative to the first member
    /// of its class.
    pub scales: Vec<f64>,
}

impl EquivalencePartition {
    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Index of the class containing vector `k`.
    pub fn class_of(&self, k: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&k))
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Transitive closure of [`equivalent`] over `vs`.
pub fn partition(vs: &[RealVector], tol: f64) -> Result<EquivalencePartition> {
    if vs.is_empty() {
        return Err(Error::InvalidInput("no vectors to partition".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be >= 0")));
    }
    let forms: Vec<CanonicalForm> = vs.iter().map(canonicalize).collect();
    let n = vs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if forms[i].same_shape(&forms[j], tol) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of_root = vec![usize::MAX; n];
    for k in 0..n {
        let r = find(&mut parent, k);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[class_of_root[r]].push(k);
    }

    let mut scales = vec![0.0; n];
    for class in &classes {
        let rep = forms[class[0]].scale;
        for &k in class {
            scales[k] = forms[k].scale / rep;
        }
    }
    Ok(EquivalencePartition { classes, scales })
}

/// Coefficient vectors spanning all relations that hold within classes.
///
/// For a class `(k_0, ..., k_s)` with scales `(l_0, ..., l_s)` this emits,
/// for each `i >= 1`, the vector with `l_i` at `k_0` and `-l_0` at `k_i`.
pub fn trivial_null_basis(part: &EquivalencePartition) -> Vec<Vec<f64>> {
    let n = part.len();
    let mut basis = Vec::new();
    for class in &part.classes {
        let k0 = class[0];
        for &ki in &class[1..] {
            let mut alpha = vec![0.0; n];
            alpha[k0] = part.scales[ki];
            alpha[ki] = -part.scales[k0];
            basis.push(alpha);
        }
    }
    basis
}
