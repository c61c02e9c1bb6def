//! Decomposition trees, layered decompositions and their conversions.
//!
//! Depth parity: the root sits at depth 0. Schedule entry `k` (1-based)
//! governs the union level at depth `2k − 2`, where a node has at most `n_k`
//! children, and the disjoint level at depth `2k − 1`, where the children are
//! an `R_k`-disjoint cover of the node.

mod convert;
mod nets;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use convert::{decomp_to_pu_tree, enlarge_tree, Conversion};
pub use nets::{annuli_tree, greedy_nets};

use crate::cover_pu::Cover;
use crate::error::DecompError;
use crate::ext_real::ExtReal;
use crate::metric::{FiniteSpace, PointSet};

/// Pairs `(R_k, n_k)`: disjointness scale and fan-out bound per level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSchedule {
    pub pairs: Vec<(ExtReal, usize)>,
}

impl LevelSchedule {
    pub fn new(pairs: Vec<(ExtReal, usize)>) -> Result<Self, DecompError> {
        let s = LevelSchedule { pairs };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<(), DecompError> {
        match self.pairs.iter().position(|p| p.1 == 0) {
            Some(k) => Err(DecompError::BadParameter(format!("n_{} must be at least 1", k + 1))),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Pairs `(ε_k, R_k)`: the continuity target per level of a conversion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuitySchedule {
    pub pairs: Vec<(f64, ExtReal)>,
}

impl ContinuitySchedule {
    pub fn new(pairs: Vec<(f64, ExtReal)>) -> Result<Self, DecompError> {
        let s = ContinuitySchedule { pairs };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<(), DecompError> {
        match self.pairs.iter().position(|p| !(p.0.is_finite() && p.0 > 0.0)) {
            Some(k) => Err(DecompError::BadParameter(format!("eps_{} must be positive", k + 1))),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn eps_sum(&self) -> f64 {
        self.pairs.iter().map(|p| p.0).sum()
    }

    pub fn min_r(&self) -> ExtReal {
        self.pairs.iter().map(|p| p.1).fold(ExtReal::INF, ExtReal::min)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompTree {
    pub set: PointSet,
    pub children: Vec<DecompTree>,
}

impl DecompTree {
    pub fn leaf(set: PointSet) -> Self {
        DecompTree { set, children: Vec::new() }
    }

    pub fn new(set: PointSet, children: Vec<DecompTree>) -> Self {
        DecompTree { set, children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(DecompTree::node_count).sum::<usize>()
    }

    pub fn leaves(&self) -> Vec<&DecompTree> {
        let mut out = Vec::new();
        self.visit(&mut |_, node| {
            if node.is_leaf() {
                out.push(node);
            }
        });
        out
    }

    /// Pre-order visit with the path of child positions.
    pub fn visit<'a, F: FnMut(&[usize], &'a DecompTree)>(&'a self, f: &mut F) {
        fn go<'a, F: FnMut(&[usize], &'a DecompTree)>(node: &'a DecompTree, path: &mut Vec<usize>, f: &mut F) {
            f(path, node);
            for (i, c) in node.children.iter().enumerate() {
                path.push(i);
                go(c, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f);
    }

    /// Largest number of children among non-leaves at `depth`.
    pub fn max_fan_out(&self, depth: usize) -> usize {
        let mut best = 0;
        self.visit(&mut |path, node| {
            if path.len() == depth {
                best = best.max(node.children.len());
            }
        });
        best
    }
}

/// Levels a tree of this height consumes from a schedule.
pub(crate) fn levels_needed(height: usize) -> usize {
    if height == 0 {
        0
    } else {
        (height - 1) / 2 + 1
    }
}

pub(crate) fn path_name(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(usize::to_string).collect::<Vec<_>>().join("/")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DecompCondition {
    /// The root is the whole space.
    Root = 1,
    /// Every child is a subset of its parent.
    ChildSubset = 2,
    /// Union level: at most `n_k` children, covering the node.
    UnionLevel = 3,
    /// Disjoint level: children are an `R_k`-disjoint cover of the node.
    DisjointLevel = 4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompViolation {
    pub condition: DecompCondition,
    pub node: String,
    pub depth: usize,
    /// Child positions or points involved, depending on the condition.
    pub witness: Option<(usize, usize)>,
    pub detail: String,
}

impl fmt::Display for DecompViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} at node {} (depth {}): {}", self.condition as u8, self.node, self.depth, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecompReport {
    pub violations: Vec<DecompViolation>,
    /// Set when the schedule has fewer levels than the tree needs; the
    /// missing levels are not checked.
    pub schedule_short: Option<(usize, usize)>,
}

impl DecompReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.schedule_short.is_none()
    }

    pub fn failing(&self, condition: DecompCondition) -> impl Iterator<Item = &DecompViolation> {
        self.violations.iter().filter(move |v| v.condition == condition)
    }
}

/// Checks the four defining conditions against `schedule`.
pub fn validate_decomp_tree(space: &FiniteSpace, tree: &DecompTree, schedule: &LevelSchedule) -> DecompReport {
    let mut violations = Vec::new();
    let needed = levels_needed(tree.height());
    let schedule_short = (schedule.len() < needed).then_some((schedule.len(), needed));

    if tree.set != space.all() {
        let missing = (0..space.len()).find(|&x| !tree.set.contains(x));
        violations.push(DecompViolation {
            condition: DecompCondition::Root,
            node: "root".into(),
            depth: 0,
            witness: missing.map(|x| (x, x)),
            detail: match missing {
                Some(x) => format!("root misses point {:?}", space.id(x)),
                None => "root has points outside the space".into(),
            },
        });
    }

    tree.visit(&mut |path, node| {
        if node.is_leaf() {
            return;
        }
        let depth = path.len();
        let name = path_name(path);
        for (i, c) in node.children.iter().enumerate() {
            if let Some(x) = c.set.iter().find(|&x| !node.set.contains(x)) {
                violations.push(DecompViolation {
                    condition: DecompCondition::ChildSubset,
                    node: name.clone(),
                    depth,
                    witness: Some((i, x)),
                    detail: format!("child {i} contains {:?}, which is not in the node", space.id(x)),
                });
            }
        }
        let Some(&(r, n)) = schedule.pairs.get(depth / 2) else { return };
        let union = PointSet::union_all(node.children.iter().map(|c| &c.set));
        let condition = if depth % 2 == 0 { DecompCondition::UnionLevel } else { DecompCondition::DisjointLevel };
        if let Some(x) = node.set.iter().find(|&x| !union.contains(x)) {
            violations.push(DecompViolation {
                condition,
                node: name.clone(),
                depth,
                witness: None,
                detail: format!("children do not cover {:?}", space.id(x)),
            });
        }
        if depth % 2 == 0 {
            if node.children.len() > n {
                violations.push(DecompViolation {
                    condition,
                    node: name,
                    depth,
                    witness: None,
                    detail: format!("{} children, at most {n} allowed", node.children.len()),
                });
            }
        } else {
            let family: Vec<PointSet> = node.children.iter().map(|c| c.set.clone()).collect();
            if let Some((a, b)) = space.r_disjoint_witness(&family, r) {
                let gap = space.set_distance(&family[a], &family[b]);
                violations.push(DecompViolation {
                    condition,
                    node: name,
                    depth,
                    witness: Some((a, b)),
                    detail: format!("children {a} and {b} are at distance {gap}, not more than {r}"),
                });
            }
        }
    });
    DecompReport { violations, schedule_short }
}

/// A finitely checkable predicate on families of subsets.
pub trait PropertyPredicate {
    fn name(&self) -> String;
    fn holds(&self, space: &FiniteSpace, family: &[PointSet]) -> bool;
}

/// Every member has diameter at most the bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformlyBounded(pub ExtReal);

impl PropertyPredicate for UniformlyBounded {
    fn name(&self) -> String {
        format!("uniformly bounded by {}", self.0)
    }

    fn holds(&self, space: &FiniteSpace, family: &[PointSet]) -> bool {
        family.iter().all(|a| space.diameter(a).le_tol(self.0))
    }
}

/// A user predicate given as a closure.
pub struct FnPredicate<F> {
    name: String,
    f: F,
}

impl<F: Fn(&FiniteSpace, &[PointSet]) -> bool> FnPredicate<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnPredicate { name: name.into(), f }
    }
}

impl<F: Fn(&FiniteSpace, &[PointSet]) -> bool> PropertyPredicate for FnPredicate<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn holds(&self, space: &FiniteSpace, family: &[PointSet]) -> bool {
        (self.f)(space, family)
    }
}

/// Layers of subsets; layer `i` should be `R_i`-disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub layers: Vec<Vec<PointSet>>,
}

impl Decomposition {
    pub fn members(&self) -> impl Iterator<Item = &PointSet> {
        self.layers.iter().flatten()
    }
}

/// Why `decomp` is not an `(m, {R_i}, P)`-decomposition, if it is not.
pub fn decomposition_failure(
    space: &FiniteSpace,
    decomp: &Decomposition,
    m: usize,
    rs: &[ExtReal],
    p: &dyn PropertyPredicate,
) -> Option<String> {
    if decomp.layers.len() != m {
        return Some(format!("{} layers, expected {m}", decomp.layers.len()));
    }
    if rs.len() != m {
        return Some(format!("{} scales for {m} layers", rs.len()));
    }
    if let Some(&bad) = decomp.members().flat_map(|a| a.as_slice().last()).max() {
        if bad >= space.len() {
            return Some(format!("point index {bad} is out of range"));
        }
    }
    let union = PointSet::union_all(decomp.members());
    if let Some(x) = (0..space.len()).find(|&x| !union.contains(x)) {
        return Some(format!("point {:?} is in no layer", space.id(x)));
    }
    for (i, (layer, &r)) in decomp.layers.iter().zip(rs).enumerate() {
        if let Some((a, b)) = space.r_disjoint_witness(layer, r) {
            return Some(format!("layer {i}: members {a} and {b} are not {r}-disjoint"));
        }
    }
    let family: Vec<PointSet> = decomp.members().cloned().collect();
    if !p.holds(space, &family) {
        return Some(format!("members fail {}", p.name()));
    }
    None
}

/// True iff the layers cover the space, layer `i` is `rs[i]`-disjoint, and
/// `p` holds on the family of all members.
pub fn check_decomposition(
    space: &FiniteSpace,
    decomp: &Decomposition,
    m: usize,
    rs: &[ExtReal],
    p: &dyn PropertyPredicate,
) -> bool {
    decomposition_failure(space, decomp, m, rs, p).is_none()
}

/// The cover by `r`-balls around every member of every layer.
///
/// Enlarged members of one layer must stay pairwise disjoint; that keeps the
/// multiplicity at most the number of layers. Empty members are dropped.
/// Labels are `"{layer}.{member}"`.
pub fn cover_from_decomposition(space: &FiniteSpace, decomp: &Decomposition, r: ExtReal) -> Result<Cover, DecompError> {
    let mut labels = Vec::new();
    let mut elements = Vec::new();
    for (i, layer) in decomp.layers.iter().enumerate() {
        let enlarged: Vec<(usize, PointSet)> =
            layer.iter().enumerate().filter(|(_, a)| !a.is_empty()).map(|(j, a)| (j, space.ball(a, r))).collect();
        let mut owner = vec![usize::MAX; space.len()];
        for (j, b) in &enlarged {
            for x in b.iter() {
                if owner[x] != usize::MAX {
                    return Err(DecompError::LayerCollision { layer: i, a: owner[x], b: *j });
                }
                owner[x] = *j;
            }
        }
        for (j, b) in enlarged {
            labels.push(format!("{i}.{j}"));
            elements.push(b);
        }
    }
    Ok(Cover::new(space, labels, elements)?)
}
