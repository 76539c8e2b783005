use std::fs;
use std::process::{Command, Output};

fn levin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn verify_prints_summary() {
    let o = levin(&["verify", "lemma7", "--max-t", "8", "--max-kl", "16"]);
    assert_eq!(o.status.code(), Some(0));
    // (8+1) · 17 · 17
    assert_eq!(stdout(&o), "identities checked: 2601, failures: 0\n");
}

#[test]
fn verify_defaults_cover_full_domains() {
    for (name, count) in [("lemma3", 257 * 257), ("lemma4", 6)] {
        let o = levin(&["verify", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(stdout(&o), format!("identities checked: {count}, failures: 0\n"));
    }
    for name in ["corollary1", "lemma1", "lemma2", "lemma5", "lemma6", "prop1", "schmidt"] {
        let o = levin(&["verify", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).ends_with(", failures: 0\n"));
    }
}

#[test]
fn verify_writes_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lemma6.json");
    let o = levin(&["verify", "lemma6", "--m", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["name"], "lemma6");
    assert_eq!(doc["failures"], 0);
}

#[test]
fn growth_csv_has_enclosures_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = levin(&["growth", "--n-min", "1024", "--n-max", "4096", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,ND_N_num,ND_N_den,log2N_sq,ratio,precision,ND_N_lower_num,ND_N_lower_den,ND_N_upper_num,ND_N_upper_den"
    );
    let ns: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["1024", "2048", "4096"]);
}

#[test]
fn digits_dump_format() {
    let o = levin(&["digits", "--count", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let bytes = o.stdout;
    assert_eq!(&bytes[..8], &12u64.to_le_bytes());
    // 0,0,1,1,1,0,0,1 then the first four digits of n = 0 in block 2
    assert_eq!(bytes[8], 0b0011_1001);
    assert_eq!(bytes.len(), 8 + 2);
    assert_eq!(bytes[9] & 0x0f, 0);
}

#[test]
fn point_matches_leading_digits() {
    let o = levin(&["point", "--n", "0", "--precision", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,numerator,precision\n0,57,8\n");
}

#[test]
fn discrepancy_of_van_der_corput() {
    let o = levin(&["discrepancy", "--n-max", "4", "--precision", "2", "--source", "van-der-corput", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // {0, 1/2, 1/4, 3/4}: star 1/4, extreme 1/4
    assert_eq!(doc["star"]["num"], "1");
    assert_eq!(doc["star"]["den"], "4");
    assert_eq!(doc["extreme"]["den"], "4");
}

#[test]
fn reduced_construction_report() {
    let run = || levin(&["construct", "--m", "4", "--M", "1", "--w0", "11", "--step", "8", "--format", "json"]);
    let o = run();
    // the chain cannot sit inside an exception-free window at these widths
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("J inside Z"), "{stderr}");
    assert_eq!(stderr.lines().count(), 1);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["params"]["widths"], serde_json::json!([11, 3]));
    let blocks = doc["block_inequalities"].as_array().unwrap();
    assert_eq!(blocks.len(), 2);
    for b in blocks {
        assert_eq!(b["holds"], true);
        assert!(!b["surplus"]["num"].as_str().unwrap().starts_with('-'));
    }
    assert_eq!(o.stdout, run().stdout);
}

#[test]
fn construct_text_has_level_sections() {
    let o = levin(&["construct", "--m", "4", "--M", "0", "--w0", "9", "--format", "text"]);
    let text = stdout(&o);
    assert!(text.contains("[params]"));
    assert!(text.contains("[block_inequalities.0]"));
}

#[test]
fn surplus_reports_links() {
    let o = levin(&["surplus", "--m", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["surplus_bound"]["proviso"], false);
    assert_eq!(doc["surplus_bound"]["ones_cover_target"], false);
    assert_eq!(doc["surplus_bound"]["a_sum_covers_ones"], true);
    let o = levin(&["surplus", "--m", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["surplus_bound"]["ones_cover_target"], true);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "lemma1", "--m", "9"][..],
        &["verify", "lemma8"],
        &["frobnicate"],
        &["growth", "--n-max", "4096", "--budget-points", "100"],
        &["construct", "--m", "4", "--M", "1"],
        &["point", "--n", "0", "--precision", "65"],
    ] {
        let o = levin(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = levin(&["verify", "lemma1", "--m", "9"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--m must lie in 1..=5"));
}

#[test]
fn budget_checked_before_work() {
    let o = levin(&["construct", "--m", "5", "--M", "1", "--w0", "11", "--budget-points", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--budget-points"));
    assert!(o.stdout.is_empty());
}
