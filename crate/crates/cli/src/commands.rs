use std::path::{Path, PathBuf};

use coarsepu::cover_pu::PartitionOfUnity;
use coarsepu::decomp::{greedy_nets, DecompCondition, Decomposition};
use coarsepu::json::{self, CoverDoc, SpaceRef};
use coarsepu::metric::{generate, FiniteSpace, PointSet, SpaceSpec};
use coarsepu::pu_tree::TreeCondition;
use coarsepu::{
    continuity_modulus, decomp_to_pu_tree, induced_pu, lebesgue_number, multiplicity, natural_pu, validate_decomp_tree,
    validate_pu_tree, DecompError, ExtReal, FormatError, TOL,
};
use serde_json::{json, Value};

use crate::report::{malformed, Check, Failure, Inputs, Outcome};

type Result<T> = std::result::Result<T, Failure>;

fn ids(space: &FiniteSpace, pair: Option<(usize, usize)>) -> Value {
    match pair {
        Some((x, y)) => json!([space.id(x), space.id(y)]),
        None => Value::Null,
    }
}

fn ext(v: ExtReal) -> Value {
    serde_json::to_value(v).expect("extended reals serialize")
}

fn load_space(inputs: &mut Inputs, path: &Path) -> Result<FiniteSpace> {
    Ok(json::parse_space(&inputs.read(path)?)?)
}

/// The space named by `--space`, or else by the cover file's own `space`
/// field (paths relative to the cover file).
fn cover_space(inputs: &mut Inputs, flag: Option<&PathBuf>, cover_path: &Path, doc: &CoverDoc) -> Result<FiniteSpace> {
    if let Some(p) = flag {
        return load_space(inputs, p);
    }
    match &doc.space {
        Some(SpaceRef::Path(p)) => {
            let base = cover_path.parent().unwrap_or(Path::new("."));
            load_space(inputs, &base.join(p))
        }
        Some(SpaceRef::Inline(spec)) => Ok(generate(spec).map_err(FormatError::from)?),
        None => Err(malformed("no space given: pass --space or set \"space\" in the cover file")),
    }
}

fn require<'a>(flag: Option<&'a PathBuf>, what: &str) -> Result<&'a PathBuf> {
    flag.ok_or_else(|| malformed(format!("--{what} is required for this kind")))
}

fn sum_check(pu: &PartitionOfUnity) -> Check {
    let err = pu.max_sum_error();
    Check::new("weights sum to 1", err <= TOL, err, TOL, Value::Null)
}

fn modulus_check(space: &FiniteSpace, pu: &PartitionOfUnity, r: ExtReal, eps: Option<f64>) -> Check {
    let rep = continuity_modulus(space, pu, r);
    let pass = eps.is_none_or(|e| rep.is_continuous(e));
    Check::new(
        format!("modulus at R = {r}"),
        pass,
        rep.modulus,
        eps.map_or(Value::Null, |e| json!(e)),
        ids(space, rep.witness),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Space,
    Cover,
    Pu,
    Putree,
    Decomptree,
    Decomposition,
}

pub struct ValidateArgs<'a> {
    pub path: &'a Path,
    pub kind: Kind,
    pub space: Option<&'a PathBuf>,
    pub schedule: Option<&'a PathBuf>,
    pub r: Option<ExtReal>,
}

pub fn validate(inputs: &mut Inputs, a: ValidateArgs<'_>) -> Result<Outcome> {
    let text = inputs.read(a.path)?;
    let mut checks = Vec::new();
    let summary = match a.kind {
        Kind::Space => {
            let space = json::parse_space(&text)?;
            checks.push(Check::new("metric axioms", true, Value::Null, Value::Null, Value::Null));
            json!({ "points": space.len(), "diameter": ext(space.diameter(&space.all())) })
        }
        Kind::Cover => {
            let doc = CoverDoc::parse(&text)?;
            let space = cover_space(inputs, a.space, a.path, &doc)?;
            let cover = match doc.resolve(&space) {
                Ok(c) => c,
                Err(FormatError::Pu(e)) => {
                    return Err(Failure::Check(Box::new(Check::fail(
                        "covers the space",
                        Value::Null,
                        Value::Null,
                        json!(e.to_string()),
                    ))))
                }
                Err(e) => return Err(e.into()),
            };
            checks.push(Check::new("covers the space", true, Value::Null, Value::Null, Value::Null));
            json!({
                "elements": cover.len(),
                "multiplicity": multiplicity(&cover),
                "lebesgue_number": ext(lebesgue_number(&space, &cover)),
            })
        }
        Kind::Pu => {
            let space = load_space(inputs, require(a.space, "space")?)?;
            let pu = json::parse_partition(&text, &space)?;
            checks.push(sum_check(&pu));
            json!({ "labels": pu.labels().len(), "domain": pu.domain().len() })
        }
        Kind::Putree => {
            let space = load_space(inputs, require(a.space, "space")?)?;
            let tree = json::parse_pu_tree(&text, &space)?;
            let report = validate_pu_tree(&space, &tree);
            for (cond, name) in [
                (TreeCondition::RootDomain, "root domain is the space"),
                (TreeCondition::ChildDomain, "child domains are parent strata"),
                (TreeCondition::Indexing, "children index the parent labels"),
                (TreeCondition::TrivialLeaf, "leaves are trivial"),
                (TreeCondition::ProbabilityTree, "leaf probabilities sum to 1"),
            ] {
                let failing: Vec<_> = report.failing(cond).collect();
                let witness = failing.first().map_or(Value::Null, |v| json!(v.to_string()));
                checks.push(Check::new(name, failing.is_empty(), failing.len(), 0, witness));
            }
            json!({ "height": tree.height(), "nodes": tree.node_count() })
        }
        Kind::Decomptree => {
            let space = load_space(inputs, require(a.space, "space")?)?;
            let schedule = json::parse_level_schedule(&inputs.read(require(a.schedule, "schedule")?)?)?;
            let tree = json::parse_decomp_tree(&text, &space)?;
            let report = validate_decomp_tree(&space, &tree, &schedule);
            if let Some((given, needed)) = report.schedule_short {
                checks.push(Check::fail("schedule covers every level", json!(given), json!(needed), Value::Null));
            }
            for (cond, name) in [
                (DecompCondition::Root, "root is the space"),
                (DecompCondition::ChildSubset, "children lie in their parent"),
                (DecompCondition::UnionLevel, "union levels: bounded fan-out cover"),
                (DecompCondition::DisjointLevel, "disjoint levels: R-disjoint cover"),
            ] {
                let failing: Vec<_> = report.failing(cond).collect();
                let witness = failing.first().map_or(Value::Null, |v| json!(v.to_string()));
                checks.push(Check::new(name, failing.is_empty(), failing.len(), 0, witness));
            }
            json!({ "height": tree.height(), "nodes": tree.node_count() })
        }
        Kind::Decomposition => {
            let space = load_space(inputs, require(a.space, "space")?)?;
            let d = json::parse_decomposition(&text, &space)?;
            let union = PointSet::union_all(d.members());
            let missing = (0..space.len()).find(|&x| !union.contains(x));
            checks.push(Check::new(
                "layers cover the space",
                missing.is_none(),
                union.len(),
                space.len(),
                missing.map_or(Value::Null, |x| json!(space.id(x))),
            ));
            if let Some(r) = a.r {
                for (i, layer) in d.layers.iter().enumerate() {
                    let w = space.r_disjoint_witness(layer, r);
                    let witness = w.map_or(Value::Null, |(a, b)| json!([a, b]));
                    checks.push(Check::new(
                        format!("layer {i} is {r}-disjoint"),
                        w.is_none(),
                        Value::Null,
                        ext(r),
                        witness,
                    ));
                }
            }
            json!({ "layers": d.layers.len(), "members": d.members().count() })
        }
    };
    Ok(Outcome { checks, summary: Some(summary), artifact: None })
}

pub fn build_pu(
    inputs: &mut Inputs,
    space_path: Option<&PathBuf>,
    cover_path: &Path,
    r: ExtReal,
    eps: f64,
) -> Result<Outcome> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(malformed("--eps must be positive"));
    }
    let doc = CoverDoc::parse(&inputs.read(cover_path)?)?;
    let space = cover_space(inputs, space_path, cover_path, &doc)?;
    let cover = match doc.resolve(&space) {
        Ok(c) => c,
        Err(FormatError::Pu(e)) => {
            return Err(Failure::Check(Box::new(Check::fail(
                "covers the space",
                Value::Null,
                Value::Null,
                json!(e.to_string()),
            ))))
        }
        Err(e) => return Err(e.into()),
    };
    let m = multiplicity(&cover);
    let lebesgue = lebesgue_number(&space, &cover);
    let needed = 4.0 * m as f64 * r.value() / eps;
    let precondition = lebesgue.is_inf() || lebesgue.value() + TOL >= needed;
    let pu = natural_pu(&space, &cover, r).map_err(FormatError::from)?;
    let rep = continuity_modulus(&space, &pu, r);

    let mut checks = vec![
        Check::new("lebesgue number >= 4mR/eps", precondition, ext(lebesgue), json!(needed), Value::Null),
        sum_check(&pu),
    ];
    if precondition {
        checks.push(Check::new(
            format!("modulus at R = {r}"),
            rep.is_continuous(eps),
            rep.modulus,
            eps,
            ids(&space, rep.witness),
        ));
    }
    let summary = json!({
        "multiplicity": m,
        "lebesgue_number": ext(lebesgue),
        "modulus": rep.modulus,
        "modulus_witness": ids(&space, rep.witness),
        "precondition_holds": precondition,
    });
    Ok(Outcome { checks, summary: Some(summary), artifact: Some(json::partition_to_json(&space, &pu)) })
}

pub fn convert(inputs: &mut Inputs, space_path: &Path, tree_path: &Path, schedule_path: &Path) -> Result<Outcome> {
    let space = load_space(inputs, space_path)?;
    let tree = json::parse_decomp_tree(&inputs.read(tree_path)?, &space)?;
    let schedule = json::parse_continuity_schedule(&inputs.read(schedule_path)?)?;

    let conv = match decomp_to_pu_tree(&space, &tree, &schedule) {
        Ok(c) => c,
        Err(DecompError::InsufficientSeparation { level, depth, node, found, required, s_k, r_k }) => {
            return Err(Failure::Check(Box::new(Check::fail(
                "separation precondition",
                json!(found),
                json!(required),
                json!({ "level": level, "depth": depth, "node": node, "S_k": s_k, "R_k": r_k }),
            ))))
        }
        Err(e) => {
            return Err(Failure::Check(Box::new(Check::fail(
                "conversion precondition",
                Value::Null,
                Value::Null,
                json!(e.to_string()),
            ))))
        }
    };
    let levels = conv.fan_outs.len();
    let mut checks = Vec::new();

    let report = validate_pu_tree(&space, &conv.pu_tree);
    let first = report.violations.first().map_or(Value::Null, |v| json!(v.to_string()));
    checks.push(Check::new("output is a valid tree", report.is_valid(), report.violations.len(), 0, first));

    // per-depth moduli, each depth at its own level's scale
    let height = conv.pu_tree.height();
    let mut profile = vec![(0.0f64, None); height + 1];
    conv.pu_tree.visit(&mut |path, node| {
        let d = path.len();
        if d / 2 >= levels {
            return;
        }
        let rep = continuity_modulus(&space, &node.pu, schedule.pairs[d / 2].1);
        let slot = &mut profile[d];
        if rep.witness.is_some() && (slot.1.is_none() || rep.modulus > slot.0) {
            *slot = (rep.modulus, rep.witness);
        }
    });
    for (d, &(m, w)) in profile.iter().enumerate().take(height) {
        let (eps, r) = schedule.pairs[d / 2];
        checks.push(Check::new(format!("depth {d} modulus at R = {r}"), m <= eps + TOL, m, eps, ids(&space, w)));
    }

    let induced = induced_pu(&space, &conv.pu_tree).map_err(FormatError::from)?;
    let eps_sum: f64 = schedule.pairs[..levels].iter().map(|p| p.0).sum();
    let min_r = schedule.pairs[..levels].iter().map(|p| p.1).fold(ExtReal::INF, ExtReal::min);
    if levels > 0 {
        let rep = continuity_modulus(&space, &induced, min_r);
        checks.push(Check::new(
            format!("induced modulus at R = {min_r}"),
            rep.is_continuous(eps_sum),
            rep.modulus,
            eps_sum,
            ids(&space, rep.witness),
        ));
    }

    let (excess, leaf) = leaf_growth(&space, &tree, &induced);
    let allowed = 2.0 * conv.total_enlargement();
    checks.push(Check::new("leaf strata diameter growth", excess <= allowed + TOL, excess, allowed, json!(leaf)));

    let summary = json!({
        "fan_outs": conv.fan_outs,
        "level_radii": conv.level_radii,
        "separations": conv.separations,
        "modulus_profile": profile.iter().map(|p| p.0).collect::<Vec<_>>(),
        "induced_labels": induced.labels().len(),
    });
    Ok(Outcome { checks, summary: Some(summary), artifact: Some(json::pu_tree_to_json(&space, &conv.pu_tree)) })
}

/// Largest `diam(stratum) − diam(leaf)` over the induced strata, with the
/// leaf path attaining it. Induced labels are leaf paths of child positions.
fn leaf_growth(space: &FiniteSpace, tree: &coarsepu::DecompTree, induced: &PartitionOfUnity) -> (f64, String) {
    let mut best = (0.0f64, String::new());
    for (k, label) in induced.labels().iter().enumerate() {
        let leaf = if tree.is_leaf() {
            tree
        } else {
            label.split('/').fold(tree, |node, i| &node.children[i.parse::<usize>().expect("position label")])
        };
        let grown = space.diameter(&induced.stratum(k)).value() - space.diameter(&leaf.set).value();
        if grown > best.0 || best.1.is_empty() {
            best = (grown.max(best.0), label.clone());
        }
    }
    best
}

pub fn nets(inputs: &mut Inputs, space_path: &Path, r: ExtReal, order_path: Option<&PathBuf>) -> Result<Outcome> {
    let space = load_space(inputs, space_path)?;
    let order = match order_path {
        Some(p) => Some(json::parse_order(&inputs.read(p)?, &space)?),
        None => None,
    };
    let classes = greedy_nets(&space, r, order.as_deref()).map_err(|e| malformed(e.to_string()))?;

    let union = PointSet::union_all(&classes);
    let total: usize = classes.iter().map(PointSet::len).sum();
    let partitions = union == space.all() && total == space.len();
    let mut checks = vec![Check::new("classes partition the space", partitions, total, space.len(), Value::Null)];

    let mut bad = None;
    for (i, c) in classes.iter().enumerate() {
        let singletons: Vec<PointSet> = c.iter().map(PointSet::singleton).collect();
        if let Some((a, b)) = space.r_disjoint_witness(&singletons, r) {
            bad = Some((i, c.as_slice()[a], c.as_slice()[b]));
            break;
        }
    }
    checks.push(Check::new(
        format!("classes are {r}-separated"),
        bad.is_none(),
        Value::Null,
        ext(r),
        bad.map_or(Value::Null, |(i, x, y)| json!({ "class": i, "points": [space.id(x), space.id(y)] })),
    ));

    let two_r = ExtReal::new(2.0 * r.value()).expect("nonnegative");
    let (ball_max, center) = (0..space.len())
        .map(|x| (space.ball(&PointSet::singleton(x), two_r).len(), x))
        .max_by_key(|&(n, x)| (n, std::cmp::Reverse(x)))
        .unwrap_or((0, 0));
    checks.push(Check::new(
        "class count <= max |B(x, 2R)|",
        classes.len() <= ball_max,
        classes.len(),
        ball_max,
        if space.is_empty() { Value::Null } else { json!(space.id(center)) },
    ));

    let layers = classes.iter().map(|c| c.iter().map(PointSet::singleton).collect()).collect();
    let decomposition = Decomposition { layers };
    let summary = json!({ "classes": classes.len(), "max_ball_2r": ball_max });
    Ok(Outcome { checks, summary: Some(summary), artifact: Some(json::decomposition_to_json(&space, &decomposition)) })
}

pub fn gen(inputs: &mut Inputs, spec: SpaceSpec) -> Result<Outcome> {
    inputs.note(&serde_json::to_string(&spec).expect("spec serializes"));
    let space = generate(&spec).map_err(|e| malformed(e.to_string()))?;
    let axioms = space.check_axioms();
    let checks = vec![Check::new(
        "metric axioms",
        axioms.is_ok(),
        Value::Null,
        Value::Null,
        axioms.err().map_or(Value::Null, |e| json!(e.to_string())),
    )];
    let summary = json!({ "points": space.len(), "diameter": ext(space.diameter(&space.all())) });
    Ok(Outcome {
        checks,
        summary: Some(summary),
        artifact: Some(serde_json::to_value(&spec).expect("spec serializes")),
    })
}

pub fn modulus(
    inputs: &mut Inputs,
    space_path: &Path,
    pu_path: &Path,
    r: ExtReal,
    eps: Option<f64>,
) -> Result<Outcome> {
    let space = load_space(inputs, space_path)?;
    let pu = json::parse_partition(&inputs.read(pu_path)?, &space)?;
    let checks = vec![sum_check(&pu), modulus_check(&space, &pu, r, eps)];
    Ok(Outcome { checks, summary: None, artifact: None })
}
