use super::DecompTree;
use crate::error::DecompError;
use crate::ext_real::{exceeds, ExtReal};
use crate::metric::{FiniteSpace, PointSet};

/// Repeated greedy `R`-separated nets.
///
/// The first class is built by scanning `order` (canonical order when
/// `None`) and keeping each point farther than `R` from everything kept so
/// far; later classes repeat the scan on what is left. The classes partition
/// the space and each is an `R`-disjoint family of singletons.
pub fn greedy_nets(space: &FiniteSpace, r: ExtReal, order: Option<&[usize]>) -> Result<Vec<PointSet>, DecompError> {
    let mut residual: Vec<usize> = match order {
        Some(o) => {
            let mut seen = vec![false; space.len()];
            for &x in o {
                if x >= space.len() || std::mem::replace(&mut seen[x], true) {
                    return Err(DecompError::BadParameter(format!("order repeats or overruns at index {x}")));
                }
            }
            if o.len() != space.len() {
                return Err(DecompError::BadParameter(format!("order lists {} of {} points", o.len(), space.len())));
            }
            o.to_vec()
        }
        None => (0..space.len()).collect(),
    };
    let mut classes = Vec::new();
    while !residual.is_empty() {
        let mut class: Vec<usize> = Vec::new();
        let mut rest = Vec::new();
        for x in residual {
            let row = space.row(x);
            if class.iter().all(|&y| exceeds(row[y], r.value())) {
                class.push(x);
            } else {
                rest.push(x);
            }
        }
        classes.push(PointSet::new(class));
        residual = rest;
    }
    Ok(classes)
}

/// Decomposition tree by annuli around `x0`.
///
/// Annulus `A_n` holds the points with `(n − 1)·R1 < d(x, x0) ≤ n·R1`
/// (with `A_1` also holding distance 0), so points on a shared boundary go
/// to the lower-numbered annulus. The root's children are the union of the
/// odd-numbered annuli and the union of the even-numbered ones (empty unions
/// are left out); below them sit the individual annuli. When `leaf_builder`
/// is given, the tree it returns for an annulus replaces that annulus node,
/// so its root set must be the annulus itself.
pub fn annuli_tree(
    space: &FiniteSpace,
    x0: usize,
    r1: ExtReal,
    leaf_builder: Option<&dyn Fn(&PointSet) -> DecompTree>,
) -> Result<DecompTree, DecompError> {
    if x0 >= space.len() {
        return Err(DecompError::BadParameter(format!("center index {x0} is out of range")));
    }
    if r1.value() <= 0.0 {
        return Err(DecompError::BadParameter("annulus width must be positive".into()));
    }
    let row = space.row(x0);
    if let Some(x) = (0..space.len()).find(|&x| row[x].is_infinite()) {
        return Err(DecompError::UnreachablePoints(space.id(x).to_string()));
    }
    let number = |d: f64| -> usize {
        if r1.is_inf() {
            return 1;
        }
        ((d / r1.value() - 1e-9).ceil() as usize).max(1)
    };
    let mut annuli: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut numbered: Vec<(usize, usize)> = (0..space.len()).map(|x| (number(row[x]), x)).collect();
    numbered.sort_unstable();
    for (n, x) in numbered {
        match annuli.last_mut() {
            Some((m, pts)) if *m == n => pts.push(x),
            _ => annuli.push((n, vec![x])),
        }
    }

    let mut parity_nodes = Vec::new();
    for parity in [1, 0] {
        let members: Vec<(usize, PointSet)> = annuli
            .iter()
            .filter(|(n, _)| n % 2 == parity)
            .map(|(n, pts)| (*n, PointSet::new(pts.iter().copied())))
            .collect();
        if members.is_empty() {
            continue;
        }
        let family: Vec<PointSet> = members.iter().map(|m| m.1.clone()).collect();
        if let Some((a, b)) = space.r_disjoint_witness(&family, r1) {
            return Err(DecompError::AnnuliOverlap { a: members[a].0, b: members[b].0, r: r1.value() });
        }
        let union = PointSet::union_all(&family);
        let mut children = Vec::with_capacity(members.len());
        for (n, set) in members {
            let node = match leaf_builder {
                Some(build) => {
                    let sub = build(&set);
                    if sub.set != set {
                        return Err(DecompError::InvalidTree(format!(
                            "subtree for annulus {n} has a different root set"
                        )));
                    }
                    sub
                }
                None => DecompTree::leaf(set),
            };
            children.push(node);
        }
        parity_nodes.push(DecompTree::new(union, children));
    }
    Ok(DecompTree::new(space.all(), parity_nodes))
}
