use std::collections::HashSet;

use crate::error::PuError;
use crate::ext_real::{within, ExtReal, TOL};
use crate::metric::{FiniteSpace, PointSet};

/// Sparse nonnegative vector keyed by label index, sorted by key.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec(Vec<(usize, f64)>);

impl SparseVec {
    /// Sorts by key, sums repeated keys and drops zero entries.
    pub fn new<I: IntoIterator<Item = (usize, f64)>>(entries: I) -> Self {
        let mut v: Vec<(usize, f64)> = entries.into_iter().collect();
        v.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(v.len());
        for (k, w) in v {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 += w,
                _ => out.push((k, w)),
            }
        }
        out.retain(|e| e.1 != 0.0);
        SparseVec(out)
    }

    pub fn unit(key: usize) -> Self {
        SparseVec(vec![(key, 1.0)])
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, key: usize) -> f64 {
        self.0.binary_search_by_key(&key, |e| e.0).map(|i| self.0[i].1).unwrap_or(0.0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|e| e.1.abs()).sum()
    }

    /// `‖self − other‖₁` by a merge over both supports.
    pub fn l1_distance(&self, other: &SparseVec) -> f64 {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        let mut total = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    total += a[i].1.abs();
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    total += b[j].1.abs();
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    total += (a[i].1 - b[j].1).abs();
                    i += 1;
                    j += 1;
                }
            }
        }
        total += a[i..].iter().map(|e| e.1.abs()).sum::<f64>();
        total += b[j..].iter().map(|e| e.1.abs()).sum::<f64>();
        total
    }

    pub fn scale(&self, factor: f64) -> SparseVec {
        SparseVec::new(self.0.iter().map(|&(k, w)| (k, w * factor)))
    }
}

/// Projection of a nonnegative vector onto the unit sphere of ℓ¹: `x / |x|`.
pub fn l1_normalize(x: &SparseVec) -> Result<SparseVec, PuError> {
    if let Some(&(_, w)) = x.entries().iter().find(|e| !(e.1.is_finite() && e.1 >= 0.0)) {
        return Err(PuError::BadParameter(format!("negative or non-finite coordinate {w}")));
    }
    let norm = x.l1_norm();
    if norm == 0.0 {
        return Err(PuError::ZeroVector);
    }
    Ok(SparseVec(x.entries().iter().map(|&(k, w)| (k, w / norm)).collect()))
}

/// A partition of unity on a subset of a finite space.
///
/// Weights are stored per point as sparse vectors over `labels`; only
/// strictly positive weights are kept, so the stratum of a label is exactly
/// the set of points where it appears.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionOfUnity {
    n_points: usize,
    labels: Vec<String>,
    weights: Vec<Option<SparseVec>>,
}

impl PartitionOfUnity {
    /// Checks nonnegativity and that weights sum to 1 within [`TOL`] at
    /// every listed point.
    pub fn new(n_points: usize, labels: Vec<String>, entries: Vec<(usize, SparseVec)>) -> Result<Self, PuError> {
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(PuError::DuplicateLabel(dup.clone()));
        }
        let mut weights = vec![None; n_points];
        for (x, w) in entries {
            if x >= n_points {
                return Err(PuError::PointOutOfRange(x));
            }
            if weights[x].is_some() {
                return Err(PuError::DuplicatePoint(format!("#{x}")));
            }
            let mut sum = 0.0;
            for &(k, v) in w.entries() {
                if k >= labels.len() {
                    return Err(PuError::UnknownLabel(format!("#{k}")));
                }
                if !(v.is_finite() && v >= 0.0) {
                    return Err(PuError::BadWeight { point: format!("#{x}"), weight: v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > TOL {
                return Err(PuError::BadSum { point: format!("#{x}"), sum });
            }
            weights[x] = Some(w);
        }
        Ok(PartitionOfUnity { n_points, labels, weights })
    }

    /// The partition with a single label, weight 1 on all of `domain`.
    pub fn trivial(n_points: usize, domain: &PointSet, label: impl Into<String>) -> Self {
        let mut weights = vec![None; n_points];
        for x in domain.iter() {
            weights[x] = Some(SparseVec::unit(0));
        }
        PartitionOfUnity { n_points, labels: vec![label.into()], weights }
    }

    pub(crate) fn from_parts_unchecked(n_points: usize, labels: Vec<String>, weights: Vec<Option<SparseVec>>) -> Self {
        debug_assert_eq!(weights.len(), n_points);
        PartitionOfUnity { n_points, labels, weights }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_trivial(&self) -> bool {
        self.labels.len() == 1
    }

    pub fn domain(&self) -> PointSet {
        PointSet::new((0..self.n_points).filter(|&x| self.weights[x].is_some()))
    }

    pub fn in_domain(&self, x: usize) -> bool {
        self.weights.get(x).is_some_and(|w| w.is_some())
    }

    pub fn weights_at(&self, x: usize) -> Option<&SparseVec> {
        self.weights.get(x).and_then(|w| w.as_ref())
    }

    /// Weight of label `k` at `x`; zero outside the domain.
    pub fn weight(&self, x: usize, k: usize) -> f64 {
        self.weights_at(x).map_or(0.0, |w| w.get(k))
    }

    /// `{ x : weight_k(x) > 0 }`.
    pub fn stratum(&self, k: usize) -> PointSet {
        PointSet::new((0..self.n_points).filter(|&x| self.weight(x, k) > 0.0))
    }

    /// Renames labels; fails if the new names collide.
    pub fn relabel<F: FnMut(&str) -> String>(self, mut f: F) -> Result<Self, PuError> {
        let labels: Vec<String> = self.labels.iter().map(|l| f(l)).collect();
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(PuError::DuplicateLabel(dup.clone()));
        }
        Ok(PartitionOfUnity { labels, ..self })
    }

    /// Largest deviation of a weight sum from 1 over the domain.
    pub fn max_sum_error(&self) -> f64 {
        self.weights
            .iter()
            .flatten()
            .map(|w| (w.entries().iter().map(|e| e.1).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Largest ℓ¹ gap `‖φ(x) − φ(y)‖₁` over domain pairs with `d(x, y) ≤ R`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    pub r: ExtReal,
    pub modulus: f64,
    /// Lexicographically smallest pair attaining the modulus; `None` when no
    /// two distinct domain points are within `R`.
    pub witness: Option<(usize, usize)>,
}

impl ContinuityReport {
    /// Whether the partition is `(ε, R)`-continuous.
    pub fn is_continuous(&self, eps: f64) -> bool {
        self.modulus <= eps + TOL
    }
}

/// Exhaustive modulus of continuity at scale `r` over the partition's domain.
pub fn continuity_modulus(space: &FiniteSpace, pu: &PartitionOfUnity, r: ExtReal) -> ContinuityReport {
    let domain = pu.domain();
    let pts = domain.as_slice();
    let mut modulus = 0.0;
    let mut witness = None;
    for (i, &x) in pts.iter().enumerate() {
        let row = space.row(x);
        let wx = pu.weights_at(x).expect("domain point");
        for &y in &pts[i + 1..] {
            if !within(row[y], r.value()) {
                continue;
            }
            let gap = wx.l1_distance(pu.weights_at(y).expect("domain point"));
            if witness.is_none() || gap > modulus {
                modulus = gap;
                witness = Some((x, y));
            }
        }
    }
    ContinuityReport { r, modulus, witness }
}
