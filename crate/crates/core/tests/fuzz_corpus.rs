//! Replays the checked-in fuzz seeds through the parsers they target.

use std::fs;
use std::path::Path;

use coarsepu::json;
use coarsepu::metric::interval;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

fn outcomes<T, E>(target: &str, parse: impl Fn(&str) -> Result<T, E>) -> Vec<(String, bool)> {
    seeds(target).into_iter().map(|(name, text)| (name, parse(&text).is_ok())).collect()
}

fn ok(pairs: &[(&str, bool)]) -> Vec<(String, bool)> {
    pairs.iter().map(|&(n, b)| (n.to_string(), b)).collect()
}

#[test]
fn seeds_parse_as_labelled() {
    let line = interval(5).unwrap();
    assert_eq!(
        outcomes("space", json::parse_space),
        ok(&[
            ("graph.json", true),
            ("grid.json", true),
            ("interval.json", true),
            ("matrix_inf.json", true),
            ("triangle_broken.json", false)
        ])
    );
    assert_eq!(
        outcomes("cover", |t| json::parse_cover(t, &line)),
        ok(&[("inline_space.json", true), ("partial.json", false), ("two.json", true)])
    );
    assert_eq!(
        outcomes("partition", |t| json::parse_partition(t, &line)),
        ok(&[("bad_sum.json", false), ("full.json", true), ("partial_domain.json", true)])
    );
    assert_eq!(
        outcomes("putree", |t| json::parse_pu_tree(t, &line)),
        ok(&[("leaf.json", true), ("two_level.json", true)])
    );
    assert_eq!(
        outcomes("decomptree", |t| json::parse_decomp_tree(t, &line)),
        ok(&[("leaf.json", true), ("nested.json", true)])
    );
    assert_eq!(
        outcomes("decomposition", |t| json::parse_decomposition(t, &line)),
        ok(&[("empty.json", true), ("nets.json", true)])
    );
    assert_eq!(
        outcomes("schedules", json::parse_level_schedule),
        ok(&[("continuity.json", true), ("levels.json", true), ("zero.json", true)])
    );
    assert_eq!(
        outcomes("schedules", json::parse_continuity_schedule),
        ok(&[("continuity.json", true), ("levels.json", false), ("zero.json", false)])
    );
    assert_eq!(
        outcomes("order", |t| json::parse_order(t, &line)),
        ok(&[("repeated.json", false), ("reversed.json", true)])
    );
}
