use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_iris-hmd");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn iris-hmd")
}

fn ok(args: &[&str]) -> Output {
    let o = run(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Prepared {
    _dir: TempDir,
    data: PathBuf,
    out: PathBuf,
}

/// Four identities, 24 frames, seed 1: includes several blink frames.
fn prepared() -> &'static Prepared {
    static P: OnceLock<Prepared> = OnceLock::new();
    P.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let data = dir.path().join("data");
        let out = dir.path().join("out");
        ok(&["synth", "--out", s(&data), "--identities", "4", "--frames", "24", "--seed", "1"]);
        ok(&["prepare", "--dataset", s(&data), "--out", s(&out)]);
        ok(&["verify", "--dataset", s(&data), "--out", s(&out)]);
        Prepared { _dir: dir, data, out }
    })
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let h = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (h, rows)
}

#[test]
fn prepare_records_failed_geometry_as_zero_imr() {
    let p = prepared();
    let (h, rows) = read_csv(&p.out.join("metadata.csv"));
    assert_eq!(h[0], "identity_id");
    assert_eq!(rows.len(), 96);
    let err = h.iter().position(|c| c == "error").unwrap();
    let imr = h.iter().position(|c| c == "imr").unwrap();
    let failed: Vec<_> = rows.iter().filter(|r| !r[err].is_empty()).collect();
    assert!(!failed.is_empty(), "blink frames expected");
    for r in &failed {
        assert!(r[err] == "NoPupil" || r[err] == "NoIris", "{}", r[err]);
        assert_eq!(r[imr].parse::<f64>().unwrap(), 0.0);
    }
    for r in rows.iter().filter(|r| r[err].is_empty()) {
        let q: f64 = r[imr].parse().unwrap();
        assert!((0.0..=1.0).contains(&q));
    }
}

#[test]
fn verify_writes_every_setting_and_threshold() {
    let p = prepared();
    let stems = ["LG-HD", "LG-SHD", "DCT-HD", "DCT-SHD", "CSBCA-HD"];
    for stem in stems {
        for th in ["0.00", "0.70"] {
            let m = p.out.join(format!("metrics/{stem}-imr{th}.json"));
            let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
            let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
            let want: BTreeSet<&str> = [
                "encoder",
                "distance_kind",
                "imr_threshold",
                "eer",
                "eer_threshold",
                "fmr10",
                "auc",
                "n_genuine",
                "n_impostor",
            ]
            .into();
            assert_eq!(keys, want, "{stem}");
            for k in ["eer", "fmr10", "auc"] {
                let x = v[k].as_f64().unwrap();
                assert!((0.0..=1.0).contains(&x), "{stem} {k} = {x}");
            }
            assert!(p.out.join(format!("scores/{stem}-imr{th}.csv")).is_file());
            assert!(p.out.join(format!("roc/{stem}-imr{th}.csv")).is_file());
        }
    }
    assert_eq!(std::fs::read_dir(p.out.join("metrics")).unwrap().count(), 10);
}

#[test]
fn score_dump_columns_and_genuine_flags() {
    let p = prepared();
    let (h, rows) = read_csv(&p.out.join("scores/LG-SHD-imr0.00.csv"));
    assert_eq!(
        h,
        [
            "probe_id",
            "reference_id",
            "encoder",
            "distance",
            "similarity",
            "shift_used",
            "overlap_bits",
            "genuine_flag"
        ]
    );
    for r in &rows {
        let same = r[0].split('/').next() == r[1].split('/').next();
        assert_eq!(r[7] == "1", same);
        let d: f64 = r[3].parse().unwrap();
        let sim: f64 = r[4].parse().unwrap();
        assert!((d + sim - 1.0).abs() < 1e-12);
        assert!(r[5].parse::<i32>().unwrap().abs() <= 8);
    }
}

#[test]
fn stricter_imr_threshold_keeps_a_subset_of_probes() {
    let p = prepared();
    let probes = |th: &str| -> BTreeSet<String> {
        read_csv(&p.out.join(format!("scores/DCT-HD-imr{th}.csv")))
            .1
            .into_iter()
            .map(|r| r[0].clone())
            .collect()
    };
    let loose = probes("0.00");
    let strict = probes("0.70");
    assert!(strict.is_subset(&loose));
    assert!(strict.len() < loose.len());
    let (_, gaps) = read_csv(&p.out.join("gaps.csv"));
    assert_eq!(gaps.len(), 2);
    // with no filtering every accepted probe sits in the smallest bin
    assert_eq!(gaps[0][6], "0");
}

#[test]
fn reruns_are_byte_identical() {
    let p = prepared();
    let dir = TempDir::new().unwrap();
    let out2 = dir.path().join("out");
    ok(&["prepare", "--dataset", s(&p.data), "--out", s(&out2)]);
    ok(&["verify", "--dataset", s(&p.data), "--out", s(&out2)]);
    for rel in [
        "metadata.csv",
        "splits.json",
        "gaps.csv",
        "scores/LG-SHD-imr0.70.csv",
        "metrics/CSBCA-HD-imr0.00.json",
        "roc/DCT-SHD-imr0.70.csv",
        "normalized/id02/000007.png",
        "masks/id02/000007.png",
    ] {
        let a = std::fs::read(p.out.join(rel)).unwrap();
        let b = std::fs::read(out2.join(rel)).unwrap();
        assert!(a == b, "{rel} differs between runs");
    }
}

#[test]
fn trust_sessions_table_layout() {
    let p = prepared();
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    // copy verification outputs so this test does not race with the shared dir
    for rel in ["metadata.csv", "splits.json"] {
        std::fs::create_dir_all(out.join(rel).parent().unwrap()).unwrap();
        std::fs::copy(p.out.join(rel), out.join(rel)).unwrap();
    }
    for sub in ["scores", "metrics"] {
        std::fs::create_dir_all(out.join(sub)).unwrap();
        for e in std::fs::read_dir(p.out.join(sub)).unwrap() {
            let e = e.unwrap();
            std::fs::copy(e.path(), out.join(sub).join(e.file_name())).unwrap();
        }
    }
    std::fs::write(
        &cfg,
        r#"{"trust": {"alpha": 0.05, "lockout_enabled": true}, "write_trajectories": true}"#,
    )
    .unwrap();
    ok(&["trust", "--config", s(&cfg), "--out", s(&out)]);
    let (h, rows) = read_csv(&out.join("trust/sessions.csv"));
    assert_eq!(
        h,
        [
            "identity",
            "Gen-IMR0.0",
            "Gen-IMR0.7",
            "Imp-IMR0.0",
            "Imp-IMR0.7",
            "TTL-Gen-IMR0.0",
            "TTL-Gen-IMR0.7",
            "TTL-Imp-IMR0.0",
            "TTL-Imp-IMR0.7"
        ]
    );
    assert_eq!(rows.len(), 4);
    for r in &rows {
        for c in &r[1..5] {
            let v: f64 = c.parse().unwrap();
            assert!((0.0..=100.0).contains(&v));
        }
        // impostor sessions start at T and fall on the first low score
        assert!(!r[7].is_empty(), "impostor never locked out: {r:?}");
    }
    let traj = out.join("trust/trajectories/id00-Gen-imr0.00.csv");
    let (th, trows) = read_csv(&traj);
    assert_eq!(th, ["frame_index", "tv", "probe_id"]);
    for r in &trows {
        let tv: f64 = r[1].parse().unwrap();
        assert!((-1.0..=1.0).contains(&tv));
    }
    let t: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("trust/thresholds.json")).unwrap()).unwrap();
    assert_eq!(t.as_array().unwrap().len(), 2);
}

#[test]
fn single_identity_warns_and_leaves_impostor_cells_blank() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data");
    let out = dir.path().join("out");
    ok(&["synth", "--out", s(&data), "--identities", "1", "--frames", "22", "--seed", "5"]);
    ok(&["prepare", "--dataset", s(&data), "--out", s(&out), "--encoder", "CSBCA", "--distance", "HD"]);
    let v = ok(&["verify", "--dataset", s(&data), "--out", s(&out), "--encoder", "CSBCA", "--distance", "HD"]);
    assert!(String::from_utf8_lossy(&v.stderr).contains("warning"));
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"trust_setting": {"encoder": "CSBCA", "distance": "HD"}}"#).unwrap();
    let t = run(&["trust", "--config", s(&cfg), "--out", s(&out), "--encoder", "CSBCA", "--distance", "HD"]);
    assert!(t.status.success(), "{}", String::from_utf8_lossy(&t.stderr));
    assert!(String::from_utf8_lossy(&t.stderr).contains("single identity"));
    let (_, rows) = read_csv(&out.join("trust/sessions.csv"));
    assert_eq!(rows.len(), 1);
    assert!(!rows[0][1].is_empty());
    assert!(rows[0][3].is_empty() && rows[0][4].is_empty());
}

#[test]
fn bench_and_report() {
    let p = prepared();
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    std::fs::create_dir_all(&out).unwrap();
    for e in walk(&p.out) {
        let rel = e.strip_prefix(&p.out).unwrap();
        if rel.starts_with("templates") {
            continue;
        }
        std::fs::create_dir_all(out.join(rel).parent().unwrap()).unwrap();
        std::fs::copy(&e, out.join(rel)).unwrap();
    }
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"bench_iterations": 5}"#).unwrap();
    ok(&["bench", "--config", s(&cfg), "--out", s(&out)]);
    let b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("bench.json")).unwrap()).unwrap();
    let sizes = b["templates"].as_array().unwrap();
    let bits: Vec<u64> = sizes.iter().map(|t| t["bits"].as_u64().unwrap()).collect();
    assert_eq!(bits, [16384, 2048, 2048]);
    let r = ok(&["report", "--out", s(&out)]);
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("| LG-SHD |"));
    assert!(text.contains("## Sample gaps"));
    assert!(text.contains("## Timing and template size"));
    assert_eq!(std::fs::read_to_string(out.join("report.md")).unwrap(), text);
}

fn walk(root: &Path) -> Vec<PathBuf> {
    let mut v = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                v.push(p);
            }
        }
    }
    v
}

#[test]
fn missing_dataset_exits_2() {
    let dir = TempDir::new().unwrap();
    let o = run(&["prepare", "--dataset", s(dir.path()), "--out", s(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--out", s(&dir.path().join("nothing"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_configuration_exits_1() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"no_such_key": 3}"#).unwrap();
    assert_eq!(run(&["verify", "--config", s(&cfg)]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--imr-th", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--encoder", "SIFT"]).status.code(), Some(1));
    std::fs::write(&cfg, r#"{"trust": {"alpha": -1}}"#).unwrap();
    assert_eq!(run(&["verify", "--config", s(&cfg)]).status.code(), Some(1));
}
