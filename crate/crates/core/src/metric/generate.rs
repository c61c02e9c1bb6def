//! Space generators and the JSON space description.

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::FiniteSpace;
use crate::error::MetricError;
use crate::ext_real::ExtReal;

/// `{"points": [...], "metric": {"kind": ..., ...}}`.
///
/// `points` may be omitted for `grid` and `interval`, whose ids are derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    pub metric: MetricSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricSpec {
    /// Rows and columns in `points` order.
    Matrix { dist: Vec<Vec<ExtReal>> },
    /// Shortest-path metric; disconnected pairs are at distance `∞`.
    Graph { edges: Vec<(String, String, ExtReal)> },
    /// ℓ¹ metric on `{0..s_1} × … × {0..s_k}`; ids are comma-joined coordinates.
    Grid { sides: Vec<usize> },
    /// `{0, …, length-1}` with `d(i, j) = |i - j|`.
    Interval { length: usize },
}

/// Builds the space a spec describes. Matrices are checked against the
/// axioms; the other kinds are metrics by construction.
pub fn generate(spec: &SpaceSpec) -> Result<FiniteSpace, MetricError> {
    match &spec.metric {
        MetricSpec::Matrix { dist } => {
            let points =
                spec.points.clone().ok_or_else(|| MetricError::BadParams("matrix spaces need \"points\"".into()))?;
            super::validate_space(points, dist.clone())
        }
        MetricSpec::Graph { edges } => {
            let points =
                spec.points.clone().ok_or_else(|| MetricError::BadParams("graph spaces need \"points\"".into()))?;
            graph(points, edges)
        }
        MetricSpec::Grid { sides } => check_ids(grid(sides)?, spec.points.as_deref()),
        MetricSpec::Interval { length } => check_ids(interval(*length)?, spec.points.as_deref()),
    }
}

fn check_ids(space: FiniteSpace, points: Option<&[String]>) -> Result<FiniteSpace, MetricError> {
    if let Some(points) = points {
        if points.len() != space.len() {
            return Err(MetricError::BadParams(format!(
                "{} points listed, the generator produces {}",
                points.len(),
                space.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| space.index_of(p).is_none()) {
            return Err(MetricError::UnknownPoint(p.clone()));
        }
    }
    Ok(space)
}

pub fn interval(length: usize) -> Result<FiniteSpace, MetricError> {
    grid(&[length])
}

pub fn grid(sides: &[usize]) -> Result<FiniteSpace, MetricError> {
    if sides.is_empty() || sides.contains(&0) {
        return Err(MetricError::BadParams(format!("grid sides must be positive, got {sides:?}")));
    }
    let n: usize = sides.iter().product();
    if n > 20_000 {
        return Err(MetricError::BadParams(format!("grid with {n} points is too large")));
    }
    let coords: Vec<Vec<usize>> = (0..n)
        .map(|mut k| {
            let mut c = vec![0; sides.len()];
            for (slot, &s) in c.iter_mut().zip(sides).rev() {
                *slot = k % s;
                k /= s;
            }
            c
        })
        .collect();
    let ids = coords.iter().map(|c| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")).collect();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d: usize = coords[i].iter().zip(&coords[j]).map(|(a, b)| a.abs_diff(*b)).sum();
            dist[i * n + j] = d as f64;
            dist[j * n + i] = d as f64;
        }
    }
    FiniteSpace::assemble(ids, dist)
}

/// Shortest-path metric of an undirected weighted graph. Edges of weight
/// `∞` are ignored.
pub fn graph(points: Vec<String>, edges: &[(String, String, ExtReal)]) -> Result<FiniteSpace, MetricError> {
    let n = points.len();
    let lookup: std::collections::HashMap<&str, usize> =
        points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    if lookup.len() != n {
        let mut seen = std::collections::HashSet::new();
        let dup = points.iter().find(|p| !seen.insert(p.as_str())).cloned().unwrap_or_default();
        return Err(MetricError::DuplicatePoint(dup));
    }
    let mut g = UnGraph::<(), f64>::with_capacity(n, edges.len());
    for _ in 0..n {
        g.add_node(());
    }
    for (a, b, w) in edges {
        let ia = *lookup.get(a.as_str()).ok_or_else(|| MetricError::UnknownPoint(a.clone()))?;
        let ib = *lookup.get(b.as_str()).ok_or_else(|| MetricError::UnknownPoint(b.clone()))?;
        if w.is_finite() && ia != ib {
            g.add_edge(NodeIndex::new(ia), NodeIndex::new(ib), w.value());
        }
    }
    let mut dist = vec![f64::INFINITY; n * n];
    for s in 0..n {
        for (node, d) in dijkstra(&g, NodeIndex::new(s), None, |e| *e.weight()) {
            dist[s * n + node.index()] = d;
        }
        dist[s * n + s] = 0.0;
    }
    // dijkstra is exact per source; force bitwise symmetry for float weights
    for i in 0..n {
        for j in i + 1..n {
            let v = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    FiniteSpace::assemble(points, dist)
}

/// Random graph metric with integer weights in `1..=max_weight`.
///
/// Points get `avg_degree / 2` random edges each on average; a few isolated
/// components are likely for small degrees, giving infinite distances.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, avg_degree: f64, max_weight: u32) -> (SpaceSpec, FiniteSpace) {
    let points: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let target = ((n as f64) * avg_degree / 2.0).round() as usize;
    let mut edges = Vec::with_capacity(target);
    if n >= 2 {
        for _ in 0..target {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let w = rng.gen_range(1..=max_weight.max(1));
            edges.push((points[a].clone(), points[b].clone(), ExtReal::from(w)));
        }
    }
    let spec = SpaceSpec { points: Some(points), metric: MetricSpec::Graph { edges } };
    let space = generate(&spec).expect("generated graphs are well formed");
    (spec, space)
}
