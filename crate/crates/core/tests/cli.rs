use std::path::Path;
use std::process::Command;

fn genproj(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_genproj"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn altproj_matches_golden_file() {
    let (code, out) = genproj(&["altproj", "--p", "2", "--dim", "2", "--sets", "3", "--seed", "42"]);
    assert_eq!(code, 0);
    assert_eq!(out, fixture("altproj_seed42_p2.csv"));
}

#[test]
fn output_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let p = path.to_str().unwrap();
    let (code, out) = genproj(&[
        "altproj", "--p", "2", "--dim", "2", "--sets", "3", "--seed", "42", "--output", p,
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), fixture("altproj_seed42_p2.csv"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: [&[&str]; 6] = [
        &["altproj", "--p", "3", "--dim", "10", "--sets", "5", "--seed", "9"],
        &["vi", "--p", "1.5", "--dim", "4", "--seed", "2", "--schedule", "harmonic"],
        &["vi", "--p", "3", "--dim", "3", "--method", "metric", "--max-iter", "200"],
        &["minimize", "--p", "3", "--dim", "3", "--scheme", "normsub", "--max-iter", "300"],
        &["verify", "--p", "4", "--dim", "3", "--samples", "100", "--checks", "clarkson,7.h,8.c"],
        &["stability", "--p", "3", "--dim", "2", "--sigma-sweep", "0.1,0.01,0.001"],
    ];
    for args in runs {
        for format in ["csv", "json"] {
            let mut a = args.to_vec();
            a.extend(["--format", format]);
            let first = genproj(&a);
            let second = genproj(&a);
            assert_eq!(first, second, "{a:?}");
            assert!(!first.1.is_empty());
            assert!(!first.1.contains('\r'));
        }
    }
}

#[test]
fn json_trace_has_the_frozen_shape() {
    let (code, out) = genproj(&[
        "vi", "--p", "2", "--dim", "3", "--seed", "3", "--identity-shift", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["summary"]["converged"], true);
    assert!(v["summary"]["iterations"].as_u64().unwrap() > 0);
    assert_eq!(v["config"]["p"], 2.0);
    let rec = &v["records"][0];
    for key in ["n", "step_norm", "v2_to_ref", "fixed_point_residual", "vi_residual"] {
        assert!(rec.get(key).is_some(), "{key}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(genproj(&["verify", "--p", "3", "--checks", "nope"]).0, 2);
    assert_eq!(genproj(&["vi", "--p", "0.5"]).0, 2);
    assert_eq!(genproj(&["altproj", "--p", "2", "--bogus"]).0, 2);
    assert_eq!(genproj(&["altproj", "--p", "2", "--sets", "0"]).0, 2);
    assert_eq!(genproj(&["verify", "--p", "3", "--checks", "clarkson", "--samples", "0"]).0, 2);
    assert_eq!(genproj(&["verify", "--p", "1.5", "--checks", "clarkson"]).0, 2);
    // margins of order 1e-16 fail a tolerance of 1e-30
    assert_eq!(
        genproj(&["verify", "--p", "3", "--checks", "7.h", "--samples", "50", "--tol", "1e-30"]).0,
        1
    );
    assert_eq!(
        genproj(&["verify", "--p", "3", "--checks", "7.h", "--samples", "50"]).0,
        0
    );
    assert_eq!(
        genproj(&[
            "vi", "--p", "2", "--method", "unconstrained", "--identity-shift", "--alpha", "100",
        ])
        .0,
        3
    );
    assert_eq!(genproj(&["vi", "--p", "3", "--method", "metric", "--max-iter", "50"]).0, 1);
    assert_eq!(genproj(&["minimize", "--p", "2", "--scheme", "polyak"]).0, 0);
}

#[test]
fn verify_csv_embeds_replayable_worst_cases() {
    let (code, out) = genproj(&[
        "verify", "--p", "4", "--dim", "2", "--samples", "64", "--checks", "f177,s-thm", "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let c = genproj::GeometryConstants::default();
    for r in v["records"].as_array().unwrap() {
        let margin = genproj::harness::sweep::replay(&r["worst_case_seed_state"], &c).unwrap();
        assert_eq!(margin, r["worst_margin"].as_f64().unwrap());
    }
}

#[test]
fn stability_output_columns() {
    let (code, out) = genproj(&["stability", "--p", "2", "--dim", "3", "--sigma-sweep", "0.1,0.01"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("sigma,distance,bound,margin,ratio"));
    assert_eq!(lines.count(), 2);
}
