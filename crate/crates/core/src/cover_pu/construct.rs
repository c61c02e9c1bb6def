use std::collections::BTreeMap;

use super::cover::{hop_indices, ChainIndex, Cover};
use super::partition::{PartitionOfUnity, SparseVec};
use crate::error::PuError;
use crate::ext_real::ExtReal;
use crate::metric::{FiniteSpace, PointSet};

/// The natural partition of unity `φ_R` of a cover.
///
/// `φ_s(x) = i_R(x, V_s) / Σ_t i_R(x, V_t)`, with chains inside the cover's
/// domain. If `k > 0` of the indices at `x` are infinite, each of those gets
/// `1/k` and the rest get 0.
pub fn natural_pu(space: &FiniteSpace, cover: &Cover, r: ExtReal) -> Result<PartitionOfUnity, PuError> {
    let domain = cover.domain();
    let adj = space.neighbors(domain, r.value());
    let indices: Vec<Vec<ChainIndex>> = cover.elements().iter().map(|v| hop_indices(&adj, domain, v)).collect();

    let mut weights = vec![None; space.len()];
    for x in domain.iter() {
        let infinite: Vec<usize> = (0..indices.len()).filter(|&s| indices[s][x] == ChainIndex::Infinite).collect();
        let w = if !infinite.is_empty() {
            let share = 1.0 / infinite.len() as f64;
            SparseVec::new(infinite.into_iter().map(|s| (s, share)))
        } else {
            let total: usize = indices.iter().filter_map(|ix| ix[x].finite()).sum();
            if total == 0 {
                return Err(PuError::NotCovered(space.id(x).to_string()));
            }
            let total = total as f64;
            SparseVec::new(
                indices.iter().enumerate().filter_map(|(s, ix)| ix[x].finite().map(|k| (s, k as f64 / total))),
            )
        };
        weights[x] = Some(w);
    }
    Ok(PartitionOfUnity::from_parts_unchecked(space.len(), cover.labels().to_vec(), weights))
}

/// Normalized sum of the characteristic functions of `B(X_j, R)`.
///
/// Labels are the positions `"0"`, `"1"`, ... of the family members.
pub fn characteristic_pu(space: &FiniteSpace, family: &[PointSet], r: ExtReal) -> Result<PartitionOfUnity, PuError> {
    let enlarged: Vec<PointSet> = family.iter().map(|a| space.ball(a, r)).collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); space.len()];
    for (j, b) in enlarged.iter().enumerate() {
        for x in b.iter() {
            members[x].push(j);
        }
    }
    let mut weights = Vec::with_capacity(space.len());
    for (x, js) in members.into_iter().enumerate() {
        if js.is_empty() {
            return Err(PuError::NotCovered(space.id(x).to_string()));
        }
        let share = 1.0 / js.len() as f64;
        weights.push(Some(SparseVec::new(js.into_iter().map(|j| (j, share)))));
    }
    let labels = (0..family.len()).map(|j| j.to_string()).collect();
    Ok(PartitionOfUnity::from_parts_unchecked(space.len(), labels, weights))
}

/// `f(x) = Σ_s φ_s(x) · f_s(x)` over the disjoint union of the parts' labels.
///
/// `parts[s]` must be a partition of unity on exactly the stratum of `s`;
/// labels with empty strata may be omitted.
pub fn mix(phi: &PartitionOfUnity, parts: &BTreeMap<String, PartitionOfUnity>) -> Result<PartitionOfUnity, PuError> {
    if let Some(extra) = parts.keys().find(|k| phi.label_index(k).is_none()) {
        return Err(PuError::UnknownLabel(extra.clone()));
    }
    let mut labels = Vec::new();
    let mut offsets = Vec::with_capacity(phi.labels().len());
    let mut seen = std::collections::HashSet::new();
    for (s, label) in phi.labels().iter().enumerate() {
        offsets.push(labels.len());
        let stratum = phi.stratum(s);
        match parts.get(label) {
            Some(part) => {
                if part.n_points() != phi.n_points() {
                    return Err(PuError::SpaceMismatch(part.n_points(), phi.n_points()));
                }
                if part.domain() != stratum {
                    return Err(PuError::DomainMismatch(format!(
                        "part {label:?} has {} points, the stratum has {}",
                        part.domain().len(),
                        stratum.len()
                    )));
                }
                for l in part.labels() {
                    if !seen.insert(l.clone()) {
                        return Err(PuError::LabelCollision(l.clone()));
                    }
                    labels.push(l.clone());
                }
            }
            None if stratum.is_empty() => {}
            None => return Err(PuError::DomainMismatch(format!("no part for nonempty stratum {label:?}"))),
        }
    }
    let mut weights = vec![None; phi.n_points()];
    for x in phi.domain().iter() {
        let mut entries = Vec::new();
        for &(s, w) in phi.weights_at(x).expect("domain point").entries() {
            let part = &parts[&phi.labels()[s]];
            let inner = part.weights_at(x).expect("stratum point lies in the part's domain");
            entries.extend(inner.entries().iter().map(|&(c, v)| (offsets[s] + c, w * v)));
        }
        weights[x] = Some(SparseVec::new(entries));
    }
    Ok(PartitionOfUnity::from_parts_unchecked(phi.n_points(), labels, weights))
}

/// `(1 − ε/4)·φ + (ε/4)·ψ` over the disjoint union of the label sets.
///
/// `eps` must lie in `[0, 4)`; at 0 the result is `φ` with `ψ`'s labels
/// carrying zero weight.
pub fn blend(phi: &PartitionOfUnity, psi: &PartitionOfUnity, eps: f64) -> Result<PartitionOfUnity, PuError> {
    if !(0.0..4.0).contains(&eps) {
        return Err(PuError::BadParameter(format!("blend needs 0 <= eps < 4, got {eps}")));
    }
    if phi.n_points() != psi.n_points() {
        return Err(PuError::SpaceMismatch(phi.n_points(), psi.n_points()));
    }
    if phi.domain() != psi.domain() {
        return Err(PuError::DomainMismatch("blended partitions must share a domain".into()));
    }
    if let Some(l) = psi.labels().iter().find(|l| phi.label_index(l).is_some()) {
        return Err(PuError::LabelCollision(l.clone()));
    }
    let (a, b) = (1.0 - eps / 4.0, eps / 4.0);
    let offset = phi.labels().len();
    let labels: Vec<String> = phi.labels().iter().chain(psi.labels()).cloned().collect();
    let mut weights = vec![None; phi.n_points()];
    for x in phi.domain().iter() {
        let p = phi.weights_at(x).expect("domain point");
        let q = psi.weights_at(x).expect("domain point");
        let entries =
            p.entries().iter().map(|&(k, w)| (k, a * w)).chain(q.entries().iter().map(|&(k, w)| (offset + k, b * w)));
        weights[x] = Some(SparseVec::new(entries));
    }
    Ok(PartitionOfUnity::from_parts_unchecked(phi.n_points(), labels, weights))
}

/// Trims every weight vector to a shortest prefix (largest weights first,
/// ties by label position) whose mass exceeds `1 − ε/8`, and moves the
/// dropped mass onto the largest retained weight.
pub fn trim(phi: &PartitionOfUnity, eps: f64) -> Result<PartitionOfUnity, PuError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(PuError::BadParameter(format!("trim needs eps > 0, got {eps}")));
    }
    let threshold = 1.0 - eps / 8.0;
    let mut weights = vec![None; phi.n_points()];
    for x in phi.domain().iter() {
        let mut entries = phi.weights_at(x).expect("domain point").entries().to_vec();
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut kept = 0.0;
        let mut keep = 0;
        while keep < entries.len() {
            kept += entries[keep].1;
            keep += 1;
            if kept > threshold {
                break;
            }
        }
        let dropped: f64 = entries[keep..].iter().map(|e| e.1).sum();
        entries.truncate(keep);
        entries[0].1 += dropped;
        weights[x] = Some(SparseVec::new(entries));
    }
    Ok(PartitionOfUnity::from_parts_unchecked(phi.n_points(), phi.labels().to_vec(), weights))
}
