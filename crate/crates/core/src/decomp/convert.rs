use std::collections::BTreeMap;

use super::{
    levels_needed, path_name, validate_decomp_tree, ContinuitySchedule, DecompCondition, DecompTree, LevelSchedule,
};
use crate::cover_pu::{natural_pu, Cover, PartitionOfUnity};
use crate::error::DecompError;
use crate::ext_real::ExtReal;
use crate::metric::{FiniteSpace, PointSet};
use crate::pu_tree::PuTree;

/// Ball enlargement in steps.
///
/// Step `j` (1-based, radius `radii[j-1]`) replaces every node at depth
/// `≥ j` by its `radii[j-1]`-ball taken inside the set its depth-`(j−1)`
/// ancestor holds after step `j − 1`. Unions and inclusions survive every
/// step; odd-depth siblings must stay pairwise disjoint, which fails only
/// when the input separation was too small.
pub fn enlarge_tree(space: &FiniteSpace, tree: &DecompTree, radii: &[ExtReal]) -> Result<DecompTree, DecompError> {
    fn grow(space: &FiniteSpace, node: &mut DecompTree, r: ExtReal, within: &PointSet) {
        node.set = space.ball_within(&node.set, r, Some(within));
        for c in &mut node.children {
            grow(space, c, r, within);
        }
    }
    fn step(space: &FiniteSpace, node: &mut DecompTree, depth: usize, j: usize, r: ExtReal) {
        if depth + 1 == j {
            let within = node.set.clone();
            for c in &mut node.children {
                grow(space, c, r, &within);
            }
        } else {
            for c in &mut node.children {
                step(space, c, depth + 1, j, r);
            }
        }
    }

    let mut out = tree.clone();
    for (i, &r) in radii.iter().enumerate() {
        if r.value() > 0.0 {
            step(space, &mut out, 0, i + 1, r);
        }
    }

    let mut collision = None;
    out.visit(&mut |path, node| {
        if collision.is_some() || path.len() % 2 == 0 {
            return;
        }
        let mut owner = vec![usize::MAX; space.len()];
        for (i, c) in node.children.iter().enumerate() {
            for x in c.set.iter() {
                if owner[x] != usize::MAX {
                    collision = Some(DecompError::EnlargementCollision { node: path_name(path), a: owner[x], b: i });
                    return;
                }
                owner[x] = i;
            }
        }
    });
    match collision {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Result of converting a decomposition tree into a tree of partitions of unity.
#[derive(Clone, Debug, PartialEq)]
pub struct Conversion {
    pub pu_tree: PuTree,
    /// The tree after ball enlargement.
    pub enlarged: DecompTree,
    /// Enlargement radius per step (step `j` at index `j − 1`).
    pub radii: Vec<ExtReal>,
    /// Per level `k`: the fan-out `n_k` read off the tree.
    pub fan_outs: Vec<usize>,
    /// Per level `k`: the enlargement radius `r_k = 4 n_k R_k / ε_k`.
    pub level_radii: Vec<f64>,
    /// Per level `k`: `S_k = Σ_{l ≤ k} 8 n_l R_l / ε_l`.
    pub separations: Vec<f64>,
}

impl Conversion {
    /// Total enlargement a leaf can receive, `Σ_k r_k`.
    pub fn total_enlargement(&self) -> f64 {
        self.level_radii.iter().sum()
    }
}

/// Converts a decomposition tree into a tree of partitions of unity.
///
/// Level `k` reads `n_k` off the tree (largest fan-out at depth `2k − 2`)
/// and enlarges the children of union nodes by `r_k = 4 n_k R_k / ε_k`.
/// Siblings at depth `2k − 1` must be more than `S_k + R_k` apart so that
/// they stay `R_k`-disjoint after enlargement. Each non-leaf then carries the
/// natural partition of its (enlarged) children at scale `R_k`, restricted to
/// the stratum it receives from its parent. Child labels are the child
/// positions `"0"`, `"1"`, ...; leaves carry the trivial partition labelled
/// `"leaf"`.
pub fn decomp_to_pu_tree(
    space: &FiniteSpace,
    tree: &DecompTree,
    schedule: &ContinuitySchedule,
) -> Result<Conversion, DecompError> {
    schedule.check()?;
    let height = tree.height();
    let levels = levels_needed(height);
    if schedule.len() < levels {
        return Err(DecompError::ScheduleTooShort { given: schedule.len(), needed: levels });
    }

    let mut fan_outs = Vec::with_capacity(levels);
    let mut level_radii = Vec::with_capacity(levels);
    let mut separations = Vec::with_capacity(levels);
    let mut s = 0.0;
    for k in 0..levels {
        let (eps, r) = schedule.pairs[k];
        let n = tree.max_fan_out(2 * k).max(1);
        let rk = 4.0 * n as f64 * r.value() / eps;
        s += 2.0 * rk;
        fan_outs.push(n);
        level_radii.push(rk);
        separations.push(s);
    }

    let required = LevelSchedule {
        pairs: (0..levels)
            .map(|k| (ExtReal::new(separations[k] + schedule.pairs[k].1.value()).expect("nonnegative"), fan_outs[k]))
            .collect(),
    };
    let report = validate_decomp_tree(space, tree, &required);
    if let Some(v) = report.violations.first() {
        if v.condition == DecompCondition::DisjointLevel {
            if let Some((a, b)) = v.witness {
                let k = v.depth / 2;
                let node = find(tree, &v.node);
                return Err(DecompError::InsufficientSeparation {
                    level: k + 1,
                    depth: v.depth,
                    node: v.node.clone(),
                    found: space.set_distance(&node.children[a].set, &node.children[b].set).value(),
                    required: required.pairs[k].0.value(),
                    s_k: separations[k],
                    r_k: schedule.pairs[k].1.value(),
                });
            }
        }
        return Err(DecompError::InvalidTree(v.to_string()));
    }

    let radii: Vec<ExtReal> = (1..=height)
        .map(|j| if j % 2 == 1 { ExtReal::new(level_radii[j / 2]).expect("nonnegative") } else { ExtReal::ZERO })
        .collect();
    let enlarged = enlarge_tree(space, tree, &radii)?;

    fn build(
        space: &FiniteSpace,
        node: &DecompTree,
        domain: PointSet,
        depth: usize,
        schedule: &ContinuitySchedule,
    ) -> Result<PuTree, DecompError> {
        if node.is_leaf() {
            return Ok(PuTree::leaf(PartitionOfUnity::trivial(space.len(), &domain, "leaf")));
        }
        let r = schedule.pairs[depth / 2].1;
        let labels: Vec<String> = (0..node.children.len()).map(|i| i.to_string()).collect();
        let elements = node.children.iter().map(|c| c.set.intersection(&domain)).collect();
        let cover = Cover::on(space, domain, labels.clone(), elements)?;
        let pu = natural_pu(space, &cover, r)?;
        let mut children = BTreeMap::new();
        for (i, (label, child)) in labels.into_iter().zip(&node.children).enumerate() {
            let sub = build(space, child, pu.stratum(i), depth + 1, schedule)?;
            children.insert(label, sub);
        }
        Ok(PuTree::new(pu, children))
    }
    let pu_tree = build(space, &enlarged, enlarged.set.clone(), 0, schedule)?;
    Ok(Conversion { pu_tree, enlarged, radii, fan_outs, level_radii, separations })
}

fn find<'a>(tree: &'a DecompTree, name: &str) -> &'a DecompTree {
    if name == "root" {
        return tree;
    }
    name.split('/').fold(tree, |node, i| &node.children[i.parse::<usize>().expect("path name")])
}
