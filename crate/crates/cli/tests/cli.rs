use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use subtag::adversary::AttackReport;
use subtag::params::ParamsFile;
use subtag_cli::reports::{
    schema, AnalyzeReport, AttackCampaign, EcClass, EcCodeReport, SchemaKind, SimulateReport,
};
use tempfile::TempDir;

fn subtag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subtag")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = subtag(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn setup(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["setup"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    ok(&full);
    path
}

fn rs63(dir: &TempDir) -> PathBuf {
    setup(dir, "rs.json", &["--q", "5", "--l", "3", "--n", "2", "--M", "2", "--code", "rs", "--v", "6", "--kdim", "3"])
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn attack(params: &Path, extra: &[&str]) -> AttackCampaign {
    let mut args = vec!["attack", "--params", s(params), "--seed", "11"];
    args.extend_from_slice(extra);
    serde_json::from_str(&ok(&args)).unwrap()
}

#[test]
fn setup_writes_a_reloadable_file() {
    let dir = TempDir::new().unwrap();
    let path = rs63(&dir);
    let text = fs::read_to_string(&path).unwrap();
    let file = ParamsFile::from_json(&text).unwrap();
    let loaded = file.load().unwrap();
    assert_eq!(loaded.params.packet_len(), 13);
    assert_eq!(ParamsFile::new(&loaded.params, loaded.spec).to_json(), text);
}

#[test]
fn setup_names_violated_constraints() {
    let out = subtag(&["setup", "--q", "5", "--l", "3", "--n", "4", "--code", "rs", "--v", "6", "--kdim", "3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("n <= l"));
    let out = subtag(&["setup", "--q", "5", "--l", "3", "--n", "2", "--M", "1", "--code", "rs", "--v", "6", "--kdim", "3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("M >= n"));
}

#[test]
fn setup_requires_security_sizes() {
    assert!(!subtag(&["setup", "--q", "5", "--n", "2", "--code", "rs", "--v", "6", "--kdim", "3"]).status.success());
    let out = subtag(&["setup", "--q", "5", "--l", "3", "--n", "2", "--code", "rs", "--v", "6"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--kdim"));
}

#[test]
fn honest_simulation_is_clean_and_repeatable() {
    let dir = TempDir::new().unwrap();
    let params = rs63(&dir);
    let packets = dir.path().join("packets.txt");
    let args = ["simulate", "--params", s(&params), "--seed", "5", "--packets", s(&packets)];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let report: SimulateReport = serde_json::from_str(&first).unwrap();
    assert!(report.all_verifiers_accept && report.all_sinks_recover);
    assert!(fs::read_to_string(&packets).unwrap().starts_with("subtag-packets text q=5 l=3 kdim=3 M=2 V=6"));
    let random: SimulateReport =
        serde_json::from_str(&ok(&["simulate", "--params", s(&params), "--seed", "5", "--topology", "random-dag"])).unwrap();
    assert!(random.all_verifiers_accept);
}

#[test]
fn injected_packet_is_rejected_downstream() {
    let dir = TempDir::new().unwrap();
    let params = rs63(&dir);
    let report: SimulateReport =
        serde_json::from_str(&ok(&["simulate", "--params", s(&params), "--seed", "5", "--inject", "a"])).unwrap();
    assert!(!report.all_verifiers_accept);
    let d = report.nodes.iter().find(|n| n.name == "d").unwrap();
    assert_eq!((d.accepted, d.rejected), (Some(0), Some(1)));
}

#[test]
fn rank_deficient_sink_is_flagged() {
    let dir = TempDir::new().unwrap();
    let params = rs63(&dir);
    let topo = dir.path().join("line.topo");
    fs::write(&topo, "node s source\nnode a verifier 1\nnode t sink\nedge s a\nedge a t\nkernel s 1 1\nkernel a 1\n").unwrap();
    let report: SimulateReport =
        serde_json::from_str(&ok(&["simulate", "--params", s(&params), "--seed", "1", "--topology", s(&topo)])).unwrap();
    let t = report.nodes.iter().find(|n| n.name == "t").unwrap();
    assert!(t.rank_deficient);
    assert_eq!(t.decoded_dimension, Some(1));
    assert_eq!(t.recovered, Some(false));
    assert!(report.all_verifiers_accept);
}

#[test]
fn qualified_coalition_forges() {
    let dir = TempDir::new().unwrap();
    let params = rs63(&dir);
    let campaign = attack(&params, &["--coalition", "1,2,3", "--coalition", "1,2", "--target", "4", "--mode", "deterministic"]);
    let [forged, refused]: [AttackReport; 2] = campaign.reports.try_into().unwrap();
    assert_eq!(forged.outcome, "forged");
    assert_eq!(forged.target_accepts, Some(true));
    assert_eq!((forged.k0, forged.r0, forged.measured_keys.as_str()), (3, 2, "1"));
    assert_eq!(refused.outcome, "not-qualified");
    assert_eq!(refused.predicted_keys, "125");
    assert!(!refused.qualified);
}

#[test]
fn guessing_matches_field_size() {
    let dir = TempDir::new().unwrap();
    let params = rs63(&dir);
    let args = ["--coalition", "1,2", "--target", "4", "--mode", "guess", "--trials", "4000"];
    let campaign = attack(&params, &args);
    let stats = campaign.reports[0].acceptance.as_ref().unwrap();
    // 4000 / 125 = 32, sd about 5.6
    assert!((15..=49).contains(&stats.accepted), "{stats:?}");
    assert_eq!(campaign, attack(&params, &args));
}

#[test]
fn hexacode_histogram_is_uniform() {
    let dir = TempDir::new().unwrap();
    let params = setup(
        &dir,
        "hex.json",
        &["--q", "2", "--l", "2", "--n", "1", "--M", "2", "--code", "generator", "--generator", "1,0,0,1,2,2;0,1,0,2,1,2;0,0,1,2,2,1"],
    );
    for target in ["3", "6"] {
        let campaign = attack(&params, &["--coalition", "1,2", "--target", target, "--mode", "histogram"]);
        let h = campaign.reports[0].histogram.as_ref().unwrap();
        assert!(h.uniform);
        assert_eq!(h.counts, vec![4; 4]);
    }
    let out = subtag(&["attack", "--params", s(&params), "--seed", "1", "--coalition", "1,2", "--target", "2", "--mode", "histogram"]);
    assert!(!out.status.success());
}

#[test]
fn analyze_reports_threshold_and_access_structures() {
    let dir = TempDir::new().unwrap();
    let report: AnalyzeReport = serde_json::from_str(&ok(&["analyze", "--params", s(&rs63(&dir))])).unwrap();
    assert_eq!((report.dual_distance, report.mds, report.threshold), (4, true, Some(3)));
    assert_eq!(report.targets[3].access_structure.len(), 10);

    let even = setup(&dir, "even.json", &["--q", "2", "--l", "1", "--n", "1", "--code", "generator", "--generator", "1,1,0;0,1,1"]);
    let report: AnalyzeReport = serde_json::from_str(&ok(&["analyze", "--params", s(&even), "--target", "1"])).unwrap();
    assert_eq!(report.targets[0].access_structure, vec![vec![2, 3]]);
    assert_eq!(report.threshold, None);
}

#[test]
fn ec_table_matches_span_test_and_attack() {
    let report: EcCodeReport =
        serde_json::from_str(&ok(&["ec-code", "--q", "5", "--l", "2", "--a", "1", "--b", "1", "--v", "6", "--deg", "2"]))
            .unwrap();
    assert!(report.table.all_agree);
    let (n, k) = (report.table.n, report.table.k);
    let zero = report
        .table
        .rows
        .iter()
        .find(|r| r.coalition.len() == n - k && r.rest_sums_to_zero)
        .expect("some coalition leaves a pair summing to O");
    assert_eq!(zero.class, EcClass::NotForgeable);

    let dir = TempDir::new().unwrap();
    let params = setup(&dir, "ec.json", &["--q", "5", "--l", "2", "--n", "1", "--code", "ec", "--a", "1", "--b", "1", "--v", "6", "--deg", "2"]);
    let coalition: Vec<String> = zero.coalition.iter().map(|j| j.to_string()).collect();
    let coalition = coalition.join(",");
    let target = zero.target.to_string();
    let campaign = attack(&params, &["--coalition", &coalition, "--target", &target, "--mode", "deterministic"]);
    assert_eq!(campaign.reports[0].outcome, "not-qualified");

    let analysis: AnalyzeReport = serde_json::from_str(&ok(&["analyze", "--params", s(&params)])).unwrap();
    assert!(analysis.ec.unwrap().all_agree);
}

#[test]
fn bad_coalitions_fail() {
    let dir = TempDir::new().unwrap();
    let params = rs63(&dir);
    for (coalition, target) in [("1,4", "4"), ("1,1", "4"), ("1,9", "4"), ("1,2", "0")] {
        let out = subtag(&["attack", "--params", s(&params), "--seed", "1", "--coalition", coalition, "--target", target, "--mode", "guess"]);
        assert!(!out.status.success(), "{coalition} -> {target}");
    }
}

#[test]
fn published_schemas_are_current() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas");
    for (kind, name) in [
        (SchemaKind::Params, "params"),
        (SchemaKind::Simulate, "simulate"),
        (SchemaKind::Attack, "attack"),
        (SchemaKind::Analyze, "analyze"),
        (SchemaKind::EcCode, "ec-code"),
    ] {
        let stored: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.schema.json"))).unwrap()).unwrap();
        assert_eq!(stored, schema(kind), "{name} schema is stale");
    }
}
