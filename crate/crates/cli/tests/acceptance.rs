//! Determinism gate: the same seeded suite run twice must emit identical
//! reports, with the wall-clock field as the only tolerated difference.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn run_suite(dir: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_gmtlab"))
        .args(["all", "--seed", "42", "--csv", "--out"])
        .arg(dir)
        .status()
        .expect("failed to launch the suite");
    assert!(status.success(), "suite run exited nonzero");
}

fn scrub_wall_clock(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            if let Some(w) = map.get_mut("wall_clock_ms") {
                *w = serde_json::Value::from(0);
            }
            for val in map.values_mut() {
                scrub_wall_clock(val);
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(scrub_wall_clock),
        _ => {}
    }
}

fn canonical(path: &Path) -> serde_json::Value {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"));
    let mut v: serde_json::Value = serde_json::from_str(&text).expect("report is valid json");
    scrub_wall_clock(&mut v);
    v
}

fn sorted_files(dir: &Path, ext: &str) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(ext))
        .collect();
    names.sort();
    names
}

#[test]
fn criterion_9_repeated_seeded_runs_are_identical() {
    let t0 = Instant::now();
    let base = std::env::temp_dir().join(format!("gmtlab-determinism-{}", std::process::id()));
    let first = base.join("first");
    let second = base.join("second");
    for dir in [&first, &second] {
        fs::create_dir_all(dir).unwrap();
        run_suite(dir);
    }

    let jsons = sorted_files(&first, ".json");
    assert_eq!(
        jsons.len(),
        8,
        "expected seven experiment reports plus a summary, found {jsons:?}"
    );
    assert_eq!(jsons, sorted_files(&second, ".json"));
    for name in &jsons {
        assert_eq!(
            canonical(&first.join(name)),
            canonical(&second.join(name)),
            "{name} differs between identically seeded runs"
        );
    }

    let csvs = sorted_files(&first, ".csv");
    assert_eq!(csvs.len(), 7, "one csv per experiment, found {csvs:?}");
    for name in &csvs {
        assert_eq!(
            fs::read(first.join(name)).unwrap(),
            fs::read(second.join(name)).unwrap(),
            "{name} differs between identically seeded runs"
        );
    }

    fs::remove_dir_all(&base).ok();
    println!(
        "criterion 9 (repeated seeded suite runs emit identical reports): PASS ({:.1} s)",
        t0.elapsed().as_secs_f64()
    );
}
