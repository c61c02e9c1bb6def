//! Finite ∞-pseudo-metric spaces and subsets of them.
//!
//! Points carry opaque string ids and are stored in a canonical order (natural
//! sort of the ids, digit runs compared numerically). Every other module refers
//! to points by their position in that order.

mod generate;

use std::cmp::Ordering;
use std::collections::HashMap;

pub use generate::{generate, graph, grid, interval, random_graph, MetricSpec, SpaceSpec};

use crate::error::MetricError;
use crate::ext_real::{exceeds, within, ExtReal, TOL};

/// A set of points, stored as sorted distinct indices into a [`FiniteSpace`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(Vec<usize>);

impl PointSet {
    pub fn new<I: IntoIterator<Item = usize>>(points: I) -> Self {
        let mut v: Vec<usize> = points.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        PointSet(v)
    }

    pub fn empty() -> Self {
        PointSet(Vec::new())
    }

    pub fn singleton(x: usize) -> Self {
        PointSet(vec![x])
    }

    /// Contiguous index range `lo..hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        PointSet((lo..hi).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.len() <= other.len() && self.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.iter().all(|x| !other.contains(x))
    }

    /// Membership mask of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for x in self.iter() {
            m[x] = true;
        }
        m
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a PointSet>>(sets: I) -> PointSet {
        PointSet::new(sets.into_iter().flat_map(|s| s.0.iter().copied()))
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        PointSet::new(iter)
    }
}

/// Natural ordering of point ids: digit runs compare numerically, everything
/// else byte-wise, so `"2" < "10"` and `"0,9" < "0,10"`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        if ab[i].is_ascii_digit() && bb[j].is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let da = a[si..i].trim_start_matches('0');
            let db = b[sj..j].trim_start_matches('0');
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            let ord = ab[i].cmp(&bb[j]);
            if ord != Ordering::Equal {
                return ord;
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j)).then_with(|| a.len().cmp(&b.len())).then_with(|| a.cmp(b))
}

/// A finite set with a symmetric extended-real distance.
#[derive(Clone, Debug)]
pub struct FiniteSpace {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    dist: Vec<f64>,
}

impl FiniteSpace {
    /// Reorders `ids`/`dist` (row-major in `ids` order) into canonical order.
    /// No axiom checks.
    pub(crate) fn assemble(ids: Vec<String>, dist: Vec<f64>) -> Result<Self, MetricError> {
        let n = ids.len();
        debug_assert_eq!(dist.len(), n * n);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| natural_cmp(&ids[a], &ids[b]));
        let mut index = HashMap::with_capacity(n);
        let mut sorted_ids = Vec::with_capacity(n);
        for (pos, &old) in order.iter().enumerate() {
            if index.insert(ids[old].clone(), pos).is_some() {
                return Err(MetricError::DuplicatePoint(ids[old].clone()));
            }
            sorted_ids.push(ids[old].clone());
        }
        let identity = order.iter().enumerate().all(|(p, &o)| p == o);
        let dist = if identity {
            dist
        } else {
            let mut d = vec![0.0; n * n];
            for (i, &oi) in order.iter().enumerate() {
                for (j, &oj) in order.iter().enumerate() {
                    d[i * n + j] = dist[oi * n + oj];
                }
            }
            d
        };
        Ok(FiniteSpace { ids: sorted_ids, index, dist })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn dist(&self, x: usize, y: usize) -> ExtReal {
        ExtReal::new(self.dist[x * self.len() + y]).expect("stored distances are valid")
    }

    #[inline]
    pub(crate) fn d(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.ids.len() + y]
    }

    #[inline]
    pub(crate) fn row(&self, x: usize) -> &[f64] {
        let n = self.ids.len();
        &self.dist[x * n..(x + 1) * n]
    }

    pub fn all(&self) -> PointSet {
        PointSet::range(0, self.len())
    }

    /// Resolves ids into a point set.
    pub fn point_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<PointSet, MetricError> {
        ids.iter()
            .map(|s| self.index_of(s.as_ref()).ok_or_else(|| MetricError::UnknownPoint(s.as_ref().to_string())))
            .collect()
    }

    pub fn ids_of(&self, set: &PointSet) -> Vec<String> {
        set.iter().map(|x| self.ids[x].clone()).collect()
    }

    /// Closed ball `B(A, r) = { y : d(a, y) ≤ r for some a ∈ A }`.
    ///
    /// `r = ∞` reaches every point, including points at infinite distance.
    pub fn ball(&self, a: &PointSet, r: ExtReal) -> PointSet {
        self.ball_within(a, r, None)
    }

    /// Closed ball restricted to `within` (the whole space when `None`).
    pub fn ball_within(&self, a: &PointSet, r: ExtReal, within_set: Option<&PointSet>) -> PointSet {
        if a.is_empty() {
            return PointSet::empty();
        }
        let candidates: Vec<usize> = match within_set {
            Some(w) => w.iter().collect(),
            None => (0..self.len()).collect(),
        };
        if r.is_inf() {
            return PointSet(candidates);
        }
        let r = r.value();
        PointSet(
            candidates.into_iter().filter(|&y| a.contains(y) || a.iter().any(|x| within(self.d(x, y), r))).collect(),
        )
    }

    /// Largest pairwise distance within `a`; zero for empty sets and singletons.
    pub fn diameter(&self, a: &PointSet) -> ExtReal {
        let pts = a.as_slice();
        let mut best = 0.0f64;
        for (i, &x) in pts.iter().enumerate() {
            let row = self.row(x);
            for &y in &pts[i + 1..] {
                if row[y] > best {
                    best = row[y];
                }
            }
        }
        ExtReal::new(best).expect("distances are nonnegative")
    }

    /// Smallest distance between a point of `a` and a point of `b`
    /// (`∞` when either is empty).
    pub fn set_distance(&self, a: &PointSet, b: &PointSet) -> ExtReal {
        let mut best = f64::INFINITY;
        for x in a.iter() {
            let row = self.row(x);
            for y in b.iter() {
                best = best.min(row[y]);
            }
        }
        ExtReal::new(best).expect("distances are nonnegative")
    }

    /// True iff any two distinct members are more than `r` apart at every
    /// cross pair of points. Singleton and empty families are always disjoint.
    pub fn is_r_disjoint(&self, family: &[PointSet], r: ExtReal) -> bool {
        self.r_disjoint_witness(family, r).is_none()
    }

    /// First pair of member indices `(i, j)` violating `r`-disjointness.
    pub fn r_disjoint_witness(&self, family: &[PointSet], r: ExtReal) -> Option<(usize, usize)> {
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                for x in family[i].iter() {
                    let row = self.row(x);
                    if family[j].iter().any(|y| !exceeds(row[y], r.value())) {
                        return Some((i, j));
                    }
                }
            }
        }
        None
    }

    /// Adjacency of the graph on `domain` with edges `d ≤ r`, indexed by point.
    /// Rows of points outside `domain` are empty.
    pub fn neighbors(&self, domain: &PointSet, r: f64) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        let pts = domain.as_slice();
        for (i, &x) in pts.iter().enumerate() {
            let row = self.row(x);
            for &y in &pts[i + 1..] {
                if within(row[y], r) {
                    adj[x].push(y);
                    adj[y].push(x);
                }
            }
        }
        adj
    }

    /// Re-checks the three axioms on the stored matrix.
    pub fn check_axioms(&self) -> Result<(), MetricError> {
        check_axioms(&self.ids, &self.dist)
    }
}

fn check_axioms(ids: &[String], dist: &[f64]) -> Result<(), MetricError> {
    let n = ids.len();
    for x in 0..n {
        let dxx = dist[x * n + x];
        if dxx != 0.0 {
            return Err(MetricError::NonzeroDiagonal(ids[x].clone(), dxx));
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            let (dxy, dyx) = (dist[x * n + y], dist[y * n + x]);
            if dxy.is_nan() || dxy < 0.0 || dyx.is_nan() || dyx < 0.0 || (dxy - dyx).abs() > TOL {
                return Err(MetricError::Asymmetric { x: ids[x].clone(), y: ids[y].clone(), dxy, dyx });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let dxy = dist[x * n + y];
            if dxy == 0.0 {
                continue;
            }
            for z in 0..n {
                let (dxz, dzy) = (dist[x * n + z], dist[z * n + y]);
                // only finite legs constrain d(x, y)
                if dxz.is_finite() && dzy.is_finite() && exceeds(dxy, dxz + dzy) {
                    return Err(MetricError::Triangle {
                        x: ids[x].clone(),
                        y: ids[y].clone(),
                        z: ids[z].clone(),
                        dxy,
                        via: dxz + dzy,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Builds a space from a candidate matrix, rows and columns in `ids` order.
///
/// Returns the first violated axiom (scanning in canonical point order) with
/// its witnesses.
pub fn validate_space(ids: Vec<String>, matrix: Vec<Vec<ExtReal>>) -> Result<FiniteSpace, MetricError> {
    let n = ids.len();
    if matrix.len() != n {
        return Err(MetricError::NotSquare { rows: matrix.len(), points: n });
    }
    let mut dist = Vec::with_capacity(n * n);
    for row in &matrix {
        if row.len() != n {
            return Err(MetricError::NotSquare { rows: matrix.len(), points: n });
        }
        dist.extend(row.iter().map(|d| d.value()));
    }
    let space = FiniteSpace::assemble(ids, dist)?;
    space.check_axioms()?;
    Ok(space)
}

/// Wedge of pointed spaces: disjoint union with all basepoints identified.
///
/// Distances inside a factor are kept; across factors they are
/// `d_s(a, x_s) + d_t(x_t, b)`. The shared basepoint gets id `"*"`, every
/// other point `"<factor>:<id>"`.
pub fn wedge<S: AsRef<str>>(spaces: &[FiniteSpace], basepoints: &[S]) -> Result<FiniteSpace, MetricError> {
    if spaces.len() != basepoints.len() || spaces.is_empty() {
        return Err(MetricError::BasepointCount { spaces: spaces.len(), basepoints: basepoints.len() });
    }
    let bases: Vec<usize> = spaces
        .iter()
        .zip(basepoints)
        .map(|(sp, b)| sp.index_of(b.as_ref()).ok_or_else(|| MetricError::UnknownPoint(b.as_ref().to_string())))
        .collect::<Result<_, _>>()?;

    // (factor, local index) per wedge point; the basepoint is listed once.
    let mut members: Vec<(usize, usize)> = vec![(0, bases[0])];
    let mut ids = vec!["*".to_string()];
    for (s, sp) in spaces.iter().enumerate() {
        for p in 0..sp.len() {
            if p != bases[s] {
                members.push((s, p));
                ids.push(format!("{s}:{}", sp.id(p)));
            }
        }
    }
    let n = members.len();
    let mut dist = vec![0.0; n * n];
    for (i, &(s, a)) in members.iter().enumerate() {
        for (j, &(t, b)) in members.iter().enumerate() {
            dist[i * n + j] = if i == 0 && j == 0 {
                0.0
            } else if i == 0 {
                spaces[t].d(bases[t], b)
            } else if j == 0 {
                spaces[s].d(a, bases[s])
            } else if s == t {
                spaces[s].d(a, b)
            } else {
                spaces[s].d(a, bases[s]) + spaces[t].d(bases[t], b)
            };
        }
    }
    FiniteSpace::assemble(ids, dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Vec<Vec<ExtReal>> {
        rows.iter().map(|r| r.iter().map(|&v| ExtReal::new(v).unwrap()).collect()).collect()
    }

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn one_point_space_is_valid() {
        assert!(validate_space(ids(1), m(&[&[0.0]])).is_ok());
    }

    #[test]
    fn triangle_violation_reports_witness() {
        let err = validate_space(ids(3), m(&[&[0.0, 1.0, 5.0], &[1.0, 0.0, 1.0], &[5.0, 1.0, 0.0]])).unwrap_err();
        match err {
            MetricError::Triangle { x, y, z, .. } => assert_eq!((x.as_str(), y.as_str(), z.as_str()), ("0", "2", "1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infinite_legs_are_exempt() {
        let inf = f64::INFINITY;
        let space = validate_space(ids(3), m(&[&[0.0, inf, 1.0], &[inf, 0.0, inf], &[1.0, inf, 0.0]]));
        assert!(space.is_ok());
        // d(0,1) = inf with finite legs would violate; here the legs through 2 are infinite
        let bad = validate_space(ids(3), m(&[&[0.0, inf, 1.0], &[inf, 0.0, 1.0], &[1.0, 1.0, 0.0]]));
        assert!(matches!(bad, Err(MetricError::Triangle { .. })));
    }

    #[test]
    fn other_axioms() {
        assert!(matches!(
            validate_space(ids(2), m(&[&[1.0, 1.0], &[1.0, 0.0]])),
            Err(MetricError::NonzeroDiagonal(..))
        ));
        assert!(matches!(validate_space(ids(2), m(&[&[0.0, 1.0], &[2.0, 0.0]])), Err(MetricError::Asymmetric { .. })));
        assert!(matches!(validate_space(ids(2), m(&[&[0.0, 1.0]])), Err(MetricError::NotSquare { .. })));
        assert!(matches!(
            validate_space(vec!["a".into(), "a".into()], m(&[&[0.0, 1.0], &[1.0, 0.0]])),
            Err(MetricError::DuplicatePoint(_))
        ));
    }

    #[test]
    fn canonical_order_is_natural() {
        let ids = vec!["10".to_string(), "2".to_string(), "1".to_string()];
        let sp = validate_space(ids, m(&[&[0.0, 8.0, 9.0], &[8.0, 0.0, 1.0], &[9.0, 1.0, 0.0]])).unwrap();
        assert_eq!(sp.ids(), &["1", "2", "10"]);
        assert_eq!(sp.dist(0, 2).value(), 9.0);
        assert_eq!(natural_cmp("0,9", "0,10"), Ordering::Less);
        assert_eq!(natural_cmp("a", "a1"), Ordering::Less);
        assert_eq!(natural_cmp("007", "7"), Ordering::Greater);
    }

    #[test]
    fn balls_and_diameters_on_a_line() {
        let sp = generate::interval(10).unwrap();
        let ball = sp.ball(&PointSet::singleton(4), ExtReal::finite(1.0));
        assert_eq!(ball, PointSet::new([3, 4, 5]));
        assert!(sp.ball(&PointSet::empty(), ExtReal::INF).is_empty());
        assert_eq!(sp.diameter(&PointSet::singleton(7)), ExtReal::ZERO);
        assert_eq!(sp.diameter(&PointSet::new([2, 5])).value(), 3.0);
        assert_eq!(sp.diameter(&PointSet::empty()), ExtReal::ZERO);
    }

    #[test]
    fn infinite_radius_reaches_other_components() {
        let spec: SpaceSpec =
            serde_json::from_str(r#"{"points":["a","b","c"],"metric":{"kind":"graph","edges":[["a","b",1]]}}"#)
                .unwrap();
        let sp = generate(&spec).unwrap();
        let a = PointSet::singleton(sp.index_of("a").unwrap());
        assert_eq!(sp.ball(&a, ExtReal::finite(1e12)).len(), 2);
        assert_eq!(sp.ball(&a, ExtReal::INF).len(), 3);
        assert!(sp.diameter(&sp.all()).is_inf());
    }

    #[test]
    fn r_disjointness_is_strict() {
        let sp = generate::interval(10).unwrap();
        let fam = [PointSet::singleton(0), PointSet::singleton(3)];
        assert!(sp.is_r_disjoint(&fam, ExtReal::finite(2.0)));
        assert!(!sp.is_r_disjoint(&fam, ExtReal::finite(3.0)));
        assert!(sp.is_r_disjoint(&fam[..1], ExtReal::INF));
    }

    #[test]
    fn wedge_of_two_unit_intervals() {
        let seg = generate::interval(2).unwrap();
        let w = wedge(&[seg.clone(), seg], &["0", "0"]).unwrap();
        assert_eq!(w.len(), 3);
        let a = w.index_of("0:1").unwrap();
        let b = w.index_of("1:1").unwrap();
        assert_eq!(w.dist(a, b).value(), 2.0);
        assert_eq!(w.dist(a, w.index_of("*").unwrap()).value(), 1.0);
    }

    #[test]
    fn wedge_of_one_space_is_a_copy() {
        let sp = generate::interval(4).unwrap();
        let w = wedge(std::slice::from_ref(&sp), &["2"]).unwrap();
        assert_eq!(w.len(), 4);
        for x in 0..4 {
            for y in 0..4 {
                let wx = if x == 2 { "*".to_string() } else { format!("0:{x}") };
                let wy = if y == 2 { "*".to_string() } else { format!("0:{y}") };
                assert_eq!(w.dist(w.index_of(&wx).unwrap(), w.index_of(&wy).unwrap()), sp.dist(x, y));
            }
        }
    }

    #[test]
    fn wedge_of_three_intervals_is_a_metric() {
        let seg = generate::interval(2).unwrap();
        let w = wedge(&[seg.clone(), seg.clone(), seg], &["0", "0", "0"]).unwrap();
        assert!(w.check_axioms().is_ok());
        for s in 0..3 {
            for t in 0..3 {
                if s != t {
                    let a = w.index_of(&format!("{s}:1")).unwrap();
                    let b = w.index_of(&format!("{t}:1")).unwrap();
                    assert_eq!(w.dist(a, b).value(), 2.0);
                }
            }
        }
    }

    #[test]
    fn wedge_rejects_foreign_basepoint() {
        let seg = generate::interval(2).unwrap();
        assert!(matches!(wedge(&[seg], &["7"]), Err(MetricError::UnknownPoint(_))));
    }
}
