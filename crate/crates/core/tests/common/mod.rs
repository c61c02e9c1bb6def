//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use coarsepu::metric::{grid, interval, random_graph};
use coarsepu::{natural_pu, ChainIndex, Cover, DecompTree, ExtReal, FiniteSpace, PartitionOfUnity, PointSet, PuTree};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn ext(v: f64) -> ExtReal {
    ExtReal::finite(v)
}

/// Index by direct expansion of the set reachable from `x` in `k` hops.
/// Independent of the library's multi-source search: it grows forward from
/// `x` and stops at the first hop count whose reachable set leaves `v`.
pub fn index_oracle(space: &FiniteSpace, x: usize, v: &PointSet, r: f64, max_len: usize) -> ChainIndex {
    let n = space.len();
    let mut reach = vec![false; n];
    reach[x] = true;
    for k in 0..=max_len {
        if (0..n).any(|y| reach[y] && !v.contains(y)) {
            return ChainIndex::Finite(k);
        }
        let prev = reach.clone();
        for (y, _) in prev.iter().enumerate().filter(|(_, &on)| on) {
            for (z, slot) in reach.iter_mut().enumerate() {
                if space.dist(y, z).value() <= r + 1e-9 {
                    *slot = true;
                }
            }
        }
        if reach == prev {
            break;
        }
    }
    ChainIndex::Infinite
}

/// Leaf weights by walking every root-to-leaf path, one point at a time.
pub fn path_products(tree: &PuTree, x: usize) -> BTreeMap<String, f64> {
    fn go(node: &PuTree, x: usize, path: &mut Vec<String>, mass: f64, out: &mut BTreeMap<String, f64>) {
        if !node.pu.in_domain(x) || mass == 0.0 {
            return;
        }
        if node.is_leaf() {
            let label = if path.is_empty() { node.pu.labels()[0].clone() } else { path.join("/") };
            out.insert(label, mass);
            return;
        }
        for (key, child) in &node.children {
            let k = node.pu.label_index(key).unwrap();
            path.push(key.clone());
            go(child, x, path, mass * node.pu.weight(x, k), out);
            path.pop();
        }
    }
    let mut out = BTreeMap::new();
    go(tree, x, &mut Vec::new(), 1.0, &mut out);
    out
}

/// Random cover of `domain`: every point lands in one random element, then
/// most elements absorb the `spread`-ball of their points.
pub fn random_cover_on<R: Rng>(
    rng: &mut R,
    space: &FiniteSpace,
    domain: &PointSet,
    k: usize,
    spread: f64,
    prefix: &str,
) -> Cover {
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
    for x in domain.iter() {
        parts[rng.gen_range(0..k)].push(x);
    }
    let mut elements: Vec<PointSet> = Vec::new();
    for p in parts.into_iter().filter(|p| !p.is_empty()) {
        let set = PointSet::new(p);
        let grown = if rng.gen_bool(0.6) { space.ball_within(&set, ext(spread), Some(domain)) } else { set };
        elements.push(grown);
    }
    let labels = (0..elements.len()).map(|i| format!("{prefix}{i}")).collect();
    Cover::on(space, domain.clone(), labels, elements).unwrap()
}

/// Random cover of an interval by runs of consecutive points.
pub fn interval_runs<R: Rng>(
    rng: &mut R,
    space: &FiniteSpace,
    domain: &PointSet,
    max_run: usize,
    overlap: usize,
    prefix: &str,
) -> Cover {
    let pts = domain.as_slice();
    let mut elements = Vec::new();
    let mut start = 0;
    while start < pts.len() {
        let len = rng.gen_range(1..=max_run).min(pts.len() - start);
        let end = (start + len + overlap).min(pts.len());
        elements.push(PointSet::new(pts[start..end].iter().copied()));
        start += len;
    }
    let labels = (0..elements.len()).map(|i| format!("{prefix}{i}")).collect();
    Cover::on(space, domain.clone(), labels, elements).unwrap()
}

/// Random valid tree of partitions of unity, natural partitions at each
/// non-leaf, depth at most `max_depth`.
pub fn random_pu_tree<R: Rng>(rng: &mut R, space: &FiniteSpace, max_depth: usize, r: f64) -> PuTree {
    fn build<R: Rng>(
        rng: &mut R,
        space: &FiniteSpace,
        domain: PointSet,
        depth: usize,
        max_depth: usize,
        r: f64,
        label: &str,
    ) -> PuTree {
        let stop = depth == max_depth || domain.len() < 2 || (depth > 0 && rng.gen_bool(0.25));
        if stop {
            return PuTree::leaf(PartitionOfUnity::trivial(space.len(), &domain, label));
        }
        let k = rng.gen_range(2..=4);
        let spread = rng.gen_range(0..=3) as f64;
        let prefix = format!("d{depth}n");
        let cover = random_cover_on(rng, space, &domain, k, spread, &prefix);
        let pu = natural_pu(space, &cover, ext(r)).unwrap();
        let mut children = BTreeMap::new();
        for (i, l) in pu.labels().to_vec().into_iter().enumerate() {
            let child = build(rng, space, pu.stratum(i), depth + 1, max_depth, r, &l);
            children.insert(l, child);
        }
        PuTree::new(pu, children)
    }
    build(rng, space, space.all(), 0, max_depth, r, "root")
}

/// Small random space: interval, grid, or graph metric.
pub fn random_space<R: Rng>(rng: &mut R, max_points: usize) -> FiniteSpace {
    match rng.gen_range(0..3) {
        0 => interval(rng.gen_range(2..=max_points)).unwrap(),
        1 => {
            let a = rng.gen_range(1..=((max_points as f64).sqrt() as usize).max(1));
            let b = rng.gen_range(1..=(max_points / a).max(1));
            grid(&[a, b]).unwrap()
        }
        _ => {
            let n = rng.gen_range(2..=max_points);
            random_graph(rng, n, 3.0, 3).1
        }
    }
}

/// Coordinate `axis` of an interval or grid point id ("12" or "12,3").
pub fn position(space: &FiniteSpace, x: usize, axis: usize) -> usize {
    space.id(x).split(',').nth(axis).unwrap().parse().unwrap()
}

/// One level of a striped decomposition tree.
#[derive(Clone, Copy, Debug)]
pub struct Level {
    /// Coordinate the blocks are cut along.
    pub axis: usize,
    /// Block width along `axis`.
    pub width: usize,
    /// Number of disjoint-level classes the blocks are dealt into.
    pub classes: usize,
}

/// Decomposition tree by stripes: at each level the node is cut into blocks
/// of consecutive coordinates along the level's axis, blocks are dealt round-robin into
/// `classes` disjoint-level nodes, and every block recurses. When `tail` is
/// set the final blocks are split once more into two overlapping halves,
/// which adds a union level with leaves at odd depth.
pub fn striped_tree(space: &FiniteSpace, levels: &[Level], tail: bool) -> DecompTree {
    fn build(space: &FiniteSpace, set: PointSet, levels: &[Level], tail: bool) -> DecompTree {
        let Some((lv, rest)) = levels.split_first() else {
            if !tail {
                return DecompTree::leaf(set);
            }
            let lo = set.iter().map(|x| position(space, x, 0)).min().unwrap();
            let hi = set.iter().map(|x| position(space, x, 0)).max().unwrap();
            let mid = (lo + hi) / 2;
            let left = PointSet::new(set.iter().filter(|&x| position(space, x, 0) <= mid + 1));
            let right = PointSet::new(set.iter().filter(|&x| position(space, x, 0) >= mid));
            return DecompTree::new(set, vec![DecompTree::leaf(left), DecompTree::leaf(right)]);
        };
        let pos = |x: usize| position(space, x, lv.axis);
        let lo = set.iter().map(pos).min().unwrap();
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in set.iter() {
            blocks.entry((pos(x) - lo) / lv.width).or_default().push(x);
        }
        let mut classes: Vec<Vec<DecompTree>> = vec![Vec::new(); lv.classes];
        for (b, pts) in blocks {
            classes[b % lv.classes].push(build(space, PointSet::new(pts), rest, tail));
        }
        let children = classes
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|c| DecompTree::new(PointSet::union_all(c.iter().map(|n| &n.set)), c))
            .collect();
        DecompTree::new(set, children)
    }
    build(space, space.all(), levels, tail)
}

pub fn shuffled<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}
