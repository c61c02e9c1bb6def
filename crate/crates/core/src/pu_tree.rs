//! Trees of partitions of unity.
//!
//! Each node carries a (possibly partial) partition of unity; the edge from a
//! node to a child is the parent's label that the child refines, so a
//! non-leaf node's labels are exactly its children's keys. The partition a
//! tree induces is indexed by leaf paths (edge labels joined by `/`).

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::cover_pu::{continuity_modulus, PartitionOfUnity, SparseVec};
use crate::error::PuError;
use crate::ext_real::{ExtReal, TOL};
use crate::metric::FiniteSpace;

#[derive(Clone, Debug, PartialEq)]
pub struct PuTree {
    pub pu: PartitionOfUnity,
    pub children: BTreeMap<String, PuTree>,
}

impl PuTree {
    pub fn leaf(pu: PartitionOfUnity) -> Self {
        PuTree { pu, children: BTreeMap::new() }
    }

    pub fn new(pu: PartitionOfUnity, children: BTreeMap<String, PuTree>) -> Self {
        PuTree { pu, children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.children.values().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.values().map(PuTree::node_count).sum::<usize>()
    }

    /// Pre-order visit with the path of edge labels and the depth.
    pub fn visit<'a, F: FnMut(&[&'a str], &'a PuTree)>(&'a self, f: &mut F) {
        fn go<'a, F: FnMut(&[&'a str], &'a PuTree)>(node: &'a PuTree, path: &mut Vec<&'a str>, f: &mut F) {
            f(path, node);
            for (key, child) in &node.children {
                path.push(key);
                go(child, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f);
    }
}

/// The five defining conditions, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreeCondition {
    /// The root's domain is the whole space.
    RootDomain = 1,
    /// A child's domain is the stratum of its edge label in the parent.
    ChildDomain = 2,
    /// A non-leaf is indexed exactly by its children.
    Indexing = 3,
    /// Leaves are trivial.
    TrivialLeaf = 4,
    /// Leaf path products sum to 1 at every point.
    ProbabilityTree = 5,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeViolation {
    pub condition: TreeCondition,
    /// Path of edge labels, `/`-joined; empty for the root.
    pub node: String,
    pub point: Option<usize>,
    pub detail: String,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} at node {:?}", self.condition as u8, self.node)?;
        if let Some(x) = self.point {
            write!(f, ", point #{x}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TreeReport {
    pub violations: Vec<TreeViolation>,
}

impl TreeReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn failing(&self, condition: TreeCondition) -> impl Iterator<Item = &TreeViolation> {
        self.violations.iter().filter(move |v| v.condition == condition)
    }
}

/// Checks every node against the five conditions and reports each violation.
pub fn validate_pu_tree(space: &FiniteSpace, tree: &PuTree) -> TreeReport {
    let n = space.len();
    let mut violations = Vec::new();

    tree.visit(&mut |path, node| {
        let name = path.join("/");
        if node.pu.n_points() != n {
            violations.push(TreeViolation {
                condition: if path.is_empty() { TreeCondition::RootDomain } else { TreeCondition::ChildDomain },
                node: name.clone(),
                point: None,
                detail: format!("partition lives on {} points, the space has {n}", node.pu.n_points()),
            });
            return;
        }
        if path.is_empty() {
            if let Some(x) = (0..n).find(|&x| !node.pu.in_domain(x)) {
                violations.push(TreeViolation {
                    condition: TreeCondition::RootDomain,
                    node: name.clone(),
                    point: Some(x),
                    detail: format!("root partition misses point {:?}", space.id(x)),
                });
            }
        }
        if node.is_leaf() {
            if !node.pu.is_trivial() {
                violations.push(TreeViolation {
                    condition: TreeCondition::TrivialLeaf,
                    node: name,
                    point: None,
                    detail: format!("leaf has {} labels", node.pu.labels().len()),
                });
            }
            return;
        }
        let labels: HashSet<&str> = node.pu.labels().iter().map(String::as_str).collect();
        for l in node.pu.labels() {
            if !node.children.contains_key(l) {
                violations.push(TreeViolation {
                    condition: TreeCondition::Indexing,
                    node: name.clone(),
                    point: None,
                    detail: format!("label {l:?} has no child"),
                });
            }
        }
        for (key, child) in &node.children {
            if !labels.contains(key.as_str()) {
                violations.push(TreeViolation {
                    condition: TreeCondition::Indexing,
                    node: name.clone(),
                    point: None,
                    detail: format!("child {key:?} is not a label of the parent"),
                });
                continue;
            }
            if child.pu.n_points() != n {
                continue;
            }
            let k = node.pu.label_index(key).expect("checked above");
            let stratum = node.pu.stratum(k);
            let domain = child.pu.domain();
            if stratum != domain {
                let x = stratum
                    .iter()
                    .find(|&x| !domain.contains(x))
                    .or_else(|| domain.iter().find(|&x| !stratum.contains(x)));
                let child_name = if name.is_empty() { key.clone() } else { format!("{name}/{key}") };
                violations.push(TreeViolation {
                    condition: TreeCondition::ChildDomain,
                    node: child_name,
                    point: x,
                    detail: format!(
                        "domain has {} points, the parent's stratum {key:?} has {}",
                        domain.len(),
                        stratum.len()
                    ),
                });
            }
        }
    });

    // Probability-tree condition: at x, only nodes whose domain contains x count.
    fn leaf_mass(node: &PuTree, x: usize) -> f64 {
        if !node.pu.in_domain(x) {
            return 0.0;
        }
        if node.is_leaf() {
            return 1.0;
        }
        let mut total = 0.0;
        for (key, child) in &node.children {
            if let Some(k) = node.pu.label_index(key) {
                let w = node.pu.weight(x, k);
                if w > 0.0 && child.pu.n_points() == node.pu.n_points() {
                    total += w * leaf_mass(child, x);
                }
            }
        }
        total
    }
    if tree.pu.n_points() == n {
        for x in (0..n).filter(|&x| tree.pu.in_domain(x)) {
            let mass = leaf_mass(tree, x);
            if (mass - 1.0).abs() > TOL {
                violations.push(TreeViolation {
                    condition: TreeCondition::ProbabilityTree,
                    node: String::new(),
                    point: Some(x),
                    detail: format!("leaf probabilities at {:?} sum to {mass}", space.id(x)),
                });
            }
        }
    }
    TreeReport { violations }
}

/// Partition indexed by leaves: the weight of a leaf at `x` is the product
/// of the edge values along its root path (0 once `x` leaves a domain).
pub fn induced_pu(space: &FiniteSpace, tree: &PuTree) -> Result<PartitionOfUnity, PuError> {
    let report = validate_pu_tree(space, tree);
    if let Some(v) = report.violations.first() {
        return Err(PuError::InvalidTree(v.to_string()));
    }
    let n = space.len();
    let mut labels = Vec::new();
    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];

    fn go(
        node: &PuTree,
        path: &mut Vec<String>,
        mass: Vec<f64>,
        labels: &mut Vec<String>,
        entries: &mut [Vec<(usize, f64)>],
    ) {
        if node.is_leaf() {
            let id = labels.len();
            labels.push(if path.is_empty() { node.pu.labels()[0].clone() } else { path.join("/") });
            for (x, &m) in mass.iter().enumerate() {
                if m > 0.0 {
                    entries[x].push((id, m));
                }
            }
            return;
        }
        for (key, child) in &node.children {
            let k = node.pu.label_index(key).expect("validated");
            let child_mass: Vec<f64> =
                mass.iter().enumerate().map(|(x, &m)| if m > 0.0 { m * node.pu.weight(x, k) } else { 0.0 }).collect();
            path.push(key.clone());
            go(child, path, child_mass, labels, entries);
            path.pop();
        }
    }
    let root_mass: Vec<f64> = (0..n).map(|x| if tree.pu.in_domain(x) { 1.0 } else { 0.0 }).collect();
    go(tree, &mut Vec::new(), root_mass, &mut labels, &mut entries);

    let weights = entries.into_iter().map(SparseVec::new).enumerate().collect();
    PartitionOfUnity::new(n, labels, weights)
}

/// Per-depth maxima of node moduli at one scale; each node is measured over
/// pairs inside its own domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusProfile {
    pub r: ExtReal,
    pub per_depth: Vec<f64>,
}

impl ModulusProfile {
    pub fn total(&self) -> f64 {
        self.per_depth.iter().sum()
    }
}

pub fn modulus_profile(space: &FiniteSpace, tree: &PuTree, r: ExtReal) -> ModulusProfile {
    let mut per_depth = vec![0.0f64; tree.height() + 1];
    tree.visit(&mut |path, node| {
        let m = continuity_modulus(space, &node.pu, r).modulus;
        let slot = &mut per_depth[path.len()];
        *slot = slot.max(m);
    });
    ModulusProfile { r, per_depth }
}

/// Replaces every non-leaf at depth `n` by the trivial partition on its
/// domain and drops its descendants. The new leaf's label is its edge label
/// (`"root"` at depth 0).
pub fn truncate_at_depth(tree: &PuTree, n: usize) -> PuTree {
    fn go(node: &PuTree, label: &str, depth: usize, n: usize) -> PuTree {
        if node.is_leaf() {
            return node.clone();
        }
        if depth == n {
            return PuTree::leaf(PartitionOfUnity::trivial(node.pu.n_points(), &node.pu.domain(), label));
        }
        let children = node.children.iter().map(|(k, c)| (k.clone(), go(c, k, depth + 1, n))).collect();
        PuTree::new(node.pu.clone(), children)
    }
    go(tree, "root", 0, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover_pu::{mix, natural_pu, Cover};
    use crate::metric::{interval, PointSet};

    fn two_cover_tree() -> (FiniteSpace, PuTree) {
        let sp = interval(6).unwrap();
        let cover =
            Cover::new(&sp, vec!["a".into(), "b".into()], vec![PointSet::range(0, 4), PointSet::range(2, 6)]).unwrap();
        let root = natural_pu(&sp, &cover, ExtReal::finite(1.0)).unwrap();
        let children = (0..2)
            .map(|k| {
                let l = root.labels()[k].clone();
                let leaf = PartitionOfUnity::trivial(6, &root.stratum(k), format!("{l}-leaf"));
                (l, PuTree::leaf(leaf))
            })
            .collect();
        (sp, PuTree::new(root, children))
    }

    #[test]
    fn height_one_tree_is_valid_and_induces_the_root() {
        let (sp, tree) = two_cover_tree();
        assert!(validate_pu_tree(&sp, &tree).is_valid());
        let induced = induced_pu(&sp, &tree).unwrap();
        assert_eq!(induced, tree.pu);
        assert_eq!(modulus_profile(&sp, &tree, ExtReal::finite(1.0)).per_depth.len(), 2);
    }

    #[test]
    fn non_trivial_leaf_violates_condition_four() {
        let (sp, mut tree) = two_cover_tree();
        let bad = tree.pu.clone();
        let stratum = bad.stratum(0);
        // a leaf on the right domain that is not trivial
        let cover =
            Cover::on(&sp, stratum.clone(), vec!["x".into(), "y".into()], vec![stratum.clone(), stratum]).unwrap();
        let leaf = natural_pu(&sp, &cover, ExtReal::finite(1.0)).unwrap();
        tree.children.insert("a".into(), PuTree::leaf(leaf));
        let report = validate_pu_tree(&sp, &tree);
        assert_eq!(report.failing(TreeCondition::TrivialLeaf).count(), 1);
    }

    #[test]
    fn shrunken_child_violates_condition_two() {
        let (sp, mut tree) = two_cover_tree();
        let stratum = tree.pu.stratum(1);
        let smaller = PointSet::new(stratum.iter().skip(1));
        tree.children.insert("b".into(), PuTree::leaf(PartitionOfUnity::trivial(6, &smaller, "b-leaf")));
        let report = validate_pu_tree(&sp, &tree);
        assert!(report.failing(TreeCondition::ChildDomain).count() >= 1);
        assert!(report.failing(TreeCondition::ProbabilityTree).count() >= 1);
        assert!(induced_pu(&sp, &tree).is_err());
    }

    #[test]
    fn missing_child_violates_indexing() {
        let (sp, mut tree) = two_cover_tree();
        tree.children.remove("b");
        let report = validate_pu_tree(&sp, &tree);
        assert_eq!(report.failing(TreeCondition::Indexing).count(), 1);
    }

    #[test]
    fn root_must_cover_the_space() {
        let sp = interval(3).unwrap();
        let tree = PuTree::leaf(PartitionOfUnity::trivial(3, &PointSet::range(0, 2), "r"));
        assert_eq!(validate_pu_tree(&sp, &tree).failing(TreeCondition::RootDomain).count(), 1);
    }

    #[test]
    fn one_point_products() {
        let sp = interval(1).unwrap();
        let all = sp.all();
        let root =
            PartitionOfUnity::new(1, vec!["s".into(), "t".into()], vec![(0, SparseVec::new([(0, 0.5), (1, 0.5)]))])
                .unwrap();
        let split =
            PartitionOfUnity::new(1, vec!["u".into(), "v".into()], vec![(0, SparseVec::new([(0, 0.4), (1, 0.6)]))])
                .unwrap();
        let mut t_children = BTreeMap::new();
        t_children.insert("u".to_string(), PuTree::leaf(PartitionOfUnity::trivial(1, &all, "u")));
        t_children.insert("v".to_string(), PuTree::leaf(PartitionOfUnity::trivial(1, &all, "v")));
        let mut children = BTreeMap::new();
        children.insert("s".to_string(), PuTree::leaf(PartitionOfUnity::trivial(1, &all, "s")));
        children.insert("t".to_string(), PuTree::new(split, t_children));
        let tree = PuTree::new(root, children);
        let induced = induced_pu(&sp, &tree).unwrap();
        assert_eq!(induced.labels(), &["s", "t/u", "t/v"]);
        let w: Vec<f64> = (0..3).map(|k| induced.weight(0, k)).collect();
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.2).abs() < 1e-15 && (w[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn induced_agrees_with_mix_on_two_levels() {
        let sp = interval(8).unwrap();
        let r = ExtReal::finite(1.0);
        let root_cover =
            Cover::new(&sp, vec!["a".into(), "b".into()], vec![PointSet::range(0, 5), PointSet::range(3, 8)]).unwrap();
        let root = natural_pu(&sp, &root_cover, r).unwrap();
        let mut parts = BTreeMap::new();
        let mut children = BTreeMap::new();
        for (k, l) in root.labels().iter().enumerate() {
            let s = root.stratum(k);
            let pts: Vec<usize> = s.iter().collect();
            let mid = pts.len() / 2;
            let halves = vec![PointSet::new(pts[..=mid].iter().copied()), PointSet::new(pts[mid..].iter().copied())];
            let cover = Cover::on(&sp, s.clone(), vec![format!("{l}0"), format!("{l}1")], halves).unwrap();
            let part = natural_pu(&sp, &cover, r).unwrap();
            let grand = (0..2)
                .map(|j| {
                    let gl = part.labels()[j].clone();
                    (gl.clone(), PuTree::leaf(PartitionOfUnity::trivial(8, &part.stratum(j), gl)))
                })
                .collect();
            children.insert(l.clone(), PuTree::new(part.clone(), grand));
            parts.insert(l.clone(), part);
        }
        let tree = PuTree::new(root.clone(), children);
        let induced = induced_pu(&sp, &tree).unwrap();
        let mixed = mix(&root, &parts).unwrap();
        let relabeled = mixed.relabel(|l| format!("{}/{}", &l[..1], l)).unwrap();
        assert_eq!(induced.labels(), relabeled.labels());
        for x in 0..8 {
            for k in 0..induced.labels().len() {
                assert!((induced.weight(x, k) - relabeled.weight(x, k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncation() {
        let (sp, tree) = two_cover_tree();
        assert_eq!(truncate_at_depth(&tree, 5), tree);
        let root_only = truncate_at_depth(&tree, 0);
        assert!(root_only.is_leaf() && root_only.pu.is_trivial());
        assert_eq!(root_only.pu.domain(), sp.all());
        assert!(validate_pu_tree(&sp, &root_only).is_valid());
    }

    #[test]
    fn trivial_tree_profile_is_zero() {
        let sp = interval(5).unwrap();
        let tree = PuTree::leaf(PartitionOfUnity::trivial(5, &sp.all(), "r"));
        let p = modulus_profile(&sp, &tree, ExtReal::finite(2.0));
        assert_eq!(p.per_depth, vec![0.0]);
    }
}
