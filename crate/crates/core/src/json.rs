//! JSON formats for spaces, covers, partitions, trees and schedules.
//!
//! Points are referred to by id everywhere. Readers resolve ids against a
//! space and report unknown ids as malformed input; writers emit ids and
//! labels in canonical order so output is byte-stable.

use std::collections::{BTreeMap, HashSet};

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::cover_pu::{Cover, PartitionOfUnity, SparseVec};
use crate::decomp::{ContinuitySchedule, DecompTree, Decomposition, LevelSchedule};
use crate::error::{FormatError, MetricError, PuError};
use crate::ext_real::ExtReal;
use crate::metric::{generate, natural_cmp, FiniteSpace, PointSet, SpaceSpec};
use crate::pu_tree::PuTree;

fn shape(msg: impl Into<String>) -> FormatError {
    FormatError::Shape(msg.into())
}

fn sorted_labels<I: IntoIterator<Item = String>>(labels: I) -> Vec<String> {
    let mut v: Vec<String> = labels.into_iter().collect();
    v.sort_by(|a, b| natural_cmp(a, b));
    v.dedup();
    v
}

/// Resolves ids, rejecting repeats.
fn resolve(space: &FiniteSpace, ids: &[String]) -> Result<PointSet, FormatError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(MetricError::DuplicatePoint(id.clone()).into());
        }
    }
    Ok(space.point_set(ids)?)
}

pub fn parse_space(text: &str) -> Result<FiniteSpace, FormatError> {
    let spec: SpaceSpec = serde_json::from_str(text)?;
    Ok(generate(&spec)?)
}

/// The space as an explicit matrix.
pub fn space_to_json(space: &FiniteSpace) -> Value {
    let n = space.len();
    let dist: Vec<Vec<ExtReal>> = (0..n).map(|x| (0..n).map(|y| space.dist(x, y)).collect()).collect();
    json!({ "points": space.ids(), "metric": { "kind": "matrix", "dist": dist } })
}

/// Where a cover file says its space lives.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(SpaceSpec),
}

/// `{"space": <path or inline space, optional>, "elements": {"label": [ids]}}`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    #[serde(default)]
    pub space: Option<SpaceRef>,
    pub elements: BTreeMap<String, Vec<String>>,
}

impl CoverDoc {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Labels are taken in natural order.
    pub fn resolve(&self, space: &FiniteSpace) -> Result<Cover, FormatError> {
        let labels = sorted_labels(self.elements.keys().cloned());
        let elements = labels.iter().map(|l| resolve(space, &self.elements[l])).collect::<Result<Vec<_>, _>>()?;
        Ok(Cover::new(space, labels, elements)?)
    }
}

pub fn parse_cover(text: &str, space: &FiniteSpace) -> Result<Cover, FormatError> {
    CoverDoc::parse(text)?.resolve(space)
}

pub fn cover_to_json(space: &FiniteSpace, cover: &Cover) -> Value {
    let elements: Map<String, Value> =
        cover.labels().iter().zip(cover.elements()).map(|(l, e)| (l.clone(), json!(space.ids_of(e)))).collect();
    json!({ "elements": elements })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionDoc {
    #[serde(default)]
    domain: Option<Vec<String>>,
    weights: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

fn partition_from_value(value: Value, space: &FiniteSpace) -> Result<PartitionOfUnity, FormatError> {
    let doc: PartitionDoc = serde_json::from_value(value)?;
    let labels = match doc.labels {
        Some(ls) => {
            let mut seen = HashSet::new();
            if let Some(dup) = ls.iter().find(|l| !seen.insert(l.as_str())) {
                return Err(shape(format!("label {dup:?} listed twice")));
            }
            ls
        }
        None => sorted_labels(doc.weights.values().flat_map(|w| w.keys().cloned())),
    };
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut entries = Vec::with_capacity(doc.weights.len());
    for (id, w) in &doc.weights {
        let x = space.index_of(id).ok_or_else(|| MetricError::UnknownPoint(id.clone()))?;
        let mut v = Vec::with_capacity(w.len());
        for (l, &value) in w {
            let &k = index.get(l.as_str()).ok_or_else(|| PuError::UnknownLabel(l.clone()))?;
            v.push((k, value));
        }
        if let Some(&(_, bad)) = v.iter().find(|e| !(e.1.is_finite() && e.1 >= 0.0)) {
            return Err(PuError::BadWeight { point: id.clone(), weight: bad }.into());
        }
        entries.push((x, SparseVec::new(v)));
    }
    if let Some(domain) = doc.domain {
        let listed = resolve(space, &domain)?;
        let weighted = PointSet::new(entries.iter().map(|e| e.0));
        if listed != weighted {
            return Err(shape("\"domain\" differs from the points that carry weights"));
        }
    }
    PartitionOfUnity::new(space.len(), labels, entries).map_err(|e| match e {
        PuError::BadSum { point, sum } => {
            let id = point.trim_start_matches('#').parse::<usize>().map(|x| space.id(x).to_string()).unwrap_or(point);
            PuError::BadSum { point: id, sum }.into()
        }
        e => e.into(),
    })
}

/// `{"domain": [ids], "labels": [...], "weights": {"id": {"label": w}}}`.
///
/// `domain` and `labels` are optional; without `labels` the label set is
/// every label that carries a weight, in natural order.
pub fn parse_partition(text: &str, space: &FiniteSpace) -> Result<PartitionOfUnity, FormatError> {
    partition_from_value(serde_json::from_str(text)?, space)
}

pub fn partition_to_json(space: &FiniteSpace, pu: &PartitionOfUnity) -> Value {
    let domain = pu.domain();
    let mut weights = Map::new();
    for x in domain.iter() {
        let w: Map<String, Value> = pu
            .weights_at(x)
            .expect("domain point")
            .entries()
            .iter()
            .map(|&(k, v)| (pu.labels()[k].clone(), json!(v)))
            .collect();
        weights.insert(space.id(x).to_string(), Value::Object(w));
    }
    json!({ "domain": space.ids_of(&domain), "labels": pu.labels(), "weights": weights })
}

/// Nested `{"pu": <partition>, "children": {"label": <subtree>}}`.
pub fn parse_pu_tree(text: &str, space: &FiniteSpace) -> Result<PuTree, FormatError> {
    fn go(value: Value, space: &FiniteSpace) -> Result<PuTree, FormatError> {
        let Value::Object(mut obj) = value else { return Err(shape("tree node must be an object")) };
        if let Some(k) = obj.keys().find(|k| *k != "pu" && *k != "children") {
            return Err(shape(format!("unknown field {k:?} in tree node")));
        }
        let pu = partition_from_value(obj.remove("pu").ok_or_else(|| shape("tree node without \"pu\""))?, space)?;
        let mut children = BTreeMap::new();
        match obj.remove("children") {
            None | Some(Value::Null) => {}
            Some(Value::Object(cs)) => {
                for (k, v) in cs {
                    children.insert(k, go(v, space)?);
                }
            }
            Some(_) => return Err(shape("\"children\" must be an object keyed by label")),
        }
        Ok(PuTree::new(pu, children))
    }
    go(serde_json::from_str(text)?, space)
}

pub fn pu_tree_to_json(space: &FiniteSpace, tree: &PuTree) -> Value {
    let children: Map<String, Value> =
        tree.children.iter().map(|(k, c)| (k.clone(), pu_tree_to_json(space, c))).collect();
    json!({ "pu": partition_to_json(space, &tree.pu), "children": children })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompDoc {
    set: Vec<String>,
    #[serde(default)]
    children: Vec<DecompDoc>,
}

/// Nested `{"set": [ids], "children": [...]}`.
pub fn parse_decomp_tree(text: &str, space: &FiniteSpace) -> Result<DecompTree, FormatError> {
    fn go(doc: &DecompDoc, space: &FiniteSpace) -> Result<DecompTree, FormatError> {
        let set = resolve(space, &doc.set)?;
        let children = doc.children.iter().map(|c| go(c, space)).collect::<Result<_, _>>()?;
        Ok(DecompTree::new(set, children))
    }
    let doc: DecompDoc = serde_json::from_str(text)?;
    go(&doc, space)
}

pub fn decomp_tree_to_json(space: &FiniteSpace, tree: &DecompTree) -> Value {
    let children: Vec<Value> = tree.children.iter().map(|c| decomp_tree_to_json(space, c)).collect();
    json!({ "set": space.ids_of(&tree.set), "children": children })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionDoc {
    layers: Vec<Vec<Vec<String>>>,
}

/// `{"layers": [[[ids], ...], ...]}`.
pub fn parse_decomposition(text: &str, space: &FiniteSpace) -> Result<Decomposition, FormatError> {
    let doc: DecompositionDoc = serde_json::from_str(text)?;
    let layers = doc
        .layers
        .iter()
        .map(|layer| layer.iter().map(|m| resolve(space, m)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    Ok(Decomposition { layers })
}

pub fn decomposition_to_json(space: &FiniteSpace, decomp: &Decomposition) -> Value {
    let layers: Vec<Vec<Vec<String>>> =
        decomp.layers.iter().map(|layer| layer.iter().map(|m| space.ids_of(m)).collect()).collect();
    json!({ "layers": layers })
}

/// `{"pairs": [[R, n], ...]}`.
pub fn parse_level_schedule(text: &str) -> Result<LevelSchedule, FormatError> {
    let s: LevelSchedule = serde_json::from_str(text)?;
    s.check().map_err(|e| shape(e.to_string()))?;
    Ok(s)
}

/// `{"pairs": [[eps, R], ...]}`.
pub fn parse_continuity_schedule(text: &str) -> Result<ContinuitySchedule, FormatError> {
    let s: ContinuitySchedule = serde_json::from_str(text)?;
    s.check().map_err(|e| shape(e.to_string()))?;
    Ok(s)
}

/// A JSON list naming every point exactly once.
pub fn parse_order(text: &str, space: &FiniteSpace) -> Result<Vec<usize>, FormatError> {
    let ids: Vec<String> = serde_json::from_str(text)?;
    let mut seen = vec![false; space.len()];
    let mut order = Vec::with_capacity(ids.len());
    for id in &ids {
        let x = space.index_of(id).ok_or_else(|| MetricError::UnknownPoint(id.clone()))?;
        if std::mem::replace(&mut seen[x], true) {
            return Err(MetricError::DuplicatePoint(id.clone()).into());
        }
        order.push(x);
    }
    if order.len() != space.len() {
        return Err(shape(format!("order names {} of {} points", order.len(), space.len())));
    }
    Ok(order)
}
