use std::collections::{HashSet, VecDeque};

use crate::error::PuError;
use crate::ext_real::{exceeds, ExtReal};
use crate::metric::{FiniteSpace, PointSet};

/// An indexed family of subsets whose union is exactly its domain.
///
/// The domain is the whole space for covers built with [`Cover::new`]; covers
/// of a subspace (used when building partitions on a stratum) come from
/// [`Cover::on`]. Distances are always those of the ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    domain: PointSet,
    labels: Vec<String>,
    elements: Vec<PointSet>,
}

impl Cover {
    pub fn new(space: &FiniteSpace, labels: Vec<String>, elements: Vec<PointSet>) -> Result<Self, PuError> {
        Cover::on(space, space.all(), labels, elements)
    }

    /// Elements labelled `"0"`, `"1"`, ... in order.
    pub fn indexed(space: &FiniteSpace, elements: Vec<PointSet>) -> Result<Self, PuError> {
        let labels = (0..elements.len()).map(|i| i.to_string()).collect();
        Cover::new(space, labels, elements)
    }

    /// A cover of the subspace `domain`.
    pub fn on(
        space: &FiniteSpace,
        domain: PointSet,
        labels: Vec<String>,
        elements: Vec<PointSet>,
    ) -> Result<Self, PuError> {
        if labels.len() != elements.len() {
            return Err(PuError::DomainMismatch(format!("{} labels for {} elements", labels.len(), elements.len())));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(PuError::DuplicateLabel(dup.clone()));
        }
        if let Some(&bad) = domain.as_slice().last() {
            if bad >= space.len() {
                return Err(PuError::PointOutOfRange(bad));
            }
        }
        let inside = domain.mask(space.len());
        let mut covered = vec![false; space.len()];
        for (label, el) in labels.iter().zip(&elements) {
            for x in el.iter() {
                if x >= space.len() {
                    return Err(PuError::PointOutOfRange(x));
                }
                if !inside[x] {
                    return Err(PuError::OutsideDomain { label: label.clone(), point: space.id(x).to_string() });
                }
                covered[x] = true;
            }
        }
        if let Some(x) = domain.iter().find(|&x| !covered[x]) {
            return Err(PuError::NotCovered(space.id(x).to_string()));
        }
        Ok(Cover { domain, labels, elements })
    }

    pub fn domain(&self) -> &PointSet {
        &self.domain
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> &[PointSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Largest number of elements containing a single point.
pub fn multiplicity(cover: &Cover) -> usize {
    let mut count = std::collections::HashMap::<usize, usize>::new();
    for el in cover.elements() {
        for x in el.iter() {
            *count.entry(x).or_default() += 1;
        }
    }
    count.into_values().max().unwrap_or(0)
}

/// Lebesgue number over the cover's domain.
///
/// The largest `L`, among `0` and the distances realized in the domain, such
/// that every closed ball `B(x, L)` (taken in the domain) lies inside some
/// element. It is `∞` when every point has an element containing everything
/// at finite distance from it.
pub fn lebesgue_number(space: &FiniteSpace, cover: &Cover) -> ExtReal {
    let domain = cover.domain().as_slice();
    // best[x] = max over elements V ∋ x of d(x, domain \ V)
    let mut best = vec![0.0f64; space.len()];
    for el in cover.elements() {
        let inside = el.mask(space.len());
        let outside: Vec<usize> = domain.iter().copied().filter(|&y| !inside[y]).collect();
        for x in el.iter() {
            let row = space.row(x);
            let gap = outside.iter().map(|&y| row[y]).fold(f64::INFINITY, f64::min);
            if gap > best[x] {
                best[x] = gap;
            }
        }
    }
    let threshold = domain.iter().map(|&x| best[x]).fold(f64::INFINITY, f64::min);
    if threshold.is_infinite() {
        return ExtReal::INF;
    }
    let mut lebesgue = 0.0f64;
    for (i, &x) in domain.iter().enumerate() {
        let row = space.row(x);
        for &y in &domain[i + 1..] {
            let d = row[y];
            if d > lebesgue && exceeds(threshold, d) {
                lebesgue = d;
            }
        }
    }
    ExtReal::finite(lebesgue)
}

/// Chain index `i_R(x, V)`: the fewest hops of length at most `R` needed to
/// leave `V` starting from `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChainIndex {
    Finite(usize),
    Infinite,
}

impl ChainIndex {
    pub fn finite(self) -> Option<usize> {
        match self {
            ChainIndex::Finite(k) => Some(k),
            ChainIndex::Infinite => None,
        }
    }
}

/// `i_R(x, V)` with chains ranging over the whole space.
pub fn index(space: &FiniteSpace, x: usize, v: &PointSet, r: ExtReal) -> ChainIndex {
    let all = space.all();
    let adj = space.neighbors(&all, r.value());
    hop_indices(&adj, &all, v)[x]
}

/// Chain indices of every domain point in `v`, for chains inside `domain`.
///
/// `adj` is the `d ≤ R` graph on `domain` (see `FiniteSpace::neighbors`).
/// Multi-source BFS from `domain \ v`; entries for points outside `domain`
/// are meaningless.
pub fn hop_indices(adj: &[Vec<usize>], domain: &PointSet, v: &PointSet) -> Vec<ChainIndex> {
    let mut out = vec![ChainIndex::Infinite; adj.len()];
    let mut queue = VecDeque::new();
    for x in domain.iter() {
        if !v.contains(x) {
            out[x] = ChainIndex::Finite(0);
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        let ChainIndex::Finite(k) = out[x] else { unreachable!() };
        for &y in &adj[x] {
            if out[y] == ChainIndex::Infinite {
                out[y] = ChainIndex::Finite(k + 1);
                queue.push_back(y);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::interval;

    fn line_cover() -> (FiniteSpace, Cover) {
        let sp = interval(10).unwrap();
        let cover = Cover::indexed(&sp, vec![PointSet::range(0, 6), PointSet::range(4, 10)]).unwrap();
        (sp, cover)
    }

    #[test]
    fn multiplicity_examples() {
        let (sp, cover) = line_cover();
        assert_eq!(multiplicity(&cover), 2);
        let singletons = Cover::indexed(&sp, (0..10).map(PointSet::singleton).collect()).unwrap();
        assert_eq!(multiplicity(&singletons), 1);
        let whole = Cover::indexed(&sp, vec![sp.all()]).unwrap();
        assert_eq!(multiplicity(&whole), 1);
    }

    #[test]
    fn lebesgue_examples() {
        let (sp, cover) = line_cover();
        assert_eq!(lebesgue_number(&sp, &cover).value(), 1.0);
        let whole = Cover::indexed(&sp, vec![sp.all()]).unwrap();
        assert!(lebesgue_number(&sp, &whole).is_inf());
        let singletons = Cover::indexed(&sp, (0..10).map(PointSet::singleton).collect()).unwrap();
        assert_eq!(lebesgue_number(&sp, &singletons).value(), 0.0);
    }

    /// Exhaustive oracle: try every realized radius and every point.
    fn lebesgue_brute(sp: &FiniteSpace, cover: &Cover) -> f64 {
        let fits = |x: usize, l: ExtReal| {
            let ball = sp.ball(&PointSet::singleton(x), l);
            cover.elements().iter().any(|v| ball.is_subset(v))
        };
        if (0..sp.len()).all(|x| fits(x, ExtReal::INF)) {
            return f64::INFINITY;
        }
        let mut radii: Vec<f64> = vec![0.0];
        for x in 0..sp.len() {
            for y in 0..sp.len() {
                if sp.dist(x, y).is_finite() {
                    radii.push(sp.dist(x, y).value());
                }
            }
        }
        radii.into_iter().filter(|&l| (0..sp.len()).all(|x| fits(x, ExtReal::finite(l)))).fold(0.0, f64::max)
    }

    #[test]
    fn lebesgue_matches_brute_force_on_interval_covers() {
        let sp = interval(12).unwrap();
        for a in 1..11 {
            for overlap in 0..4 {
                let hi = (a + overlap).min(12);
                let cover = Cover::indexed(&sp, vec![PointSet::range(0, hi), PointSet::range(a, 12)]).unwrap();
                assert_eq!(
                    lebesgue_number(&sp, &cover).value(),
                    lebesgue_brute(&sp, &cover),
                    "a={a} overlap={overlap}"
                );
            }
        }
    }

    #[test]
    fn partial_family_is_rejected() {
        let sp = interval(4).unwrap();
        let err = Cover::indexed(&sp, vec![PointSet::range(0, 2)]).unwrap_err();
        assert_eq!(err, PuError::NotCovered("2".into()));
    }

    #[test]
    fn index_examples() {
        let sp = interval(4).unwrap();
        let v = PointSet::range(0, 3);
        assert_eq!(index(&sp, 3, &v, ExtReal::finite(1.0)), ChainIndex::Finite(0));
        assert_eq!(index(&sp, 0, &v, ExtReal::finite(1.0)), ChainIndex::Finite(3));
        assert_eq!(index(&sp, 0, &v, ExtReal::finite(2.0)), ChainIndex::Finite(2));
        for x in 0..4 {
            assert_eq!(index(&sp, x, &sp.all(), ExtReal::finite(3.0)), ChainIndex::Infinite);
        }
    }
}
