mod common;

use common::{code, p, path, run, stdout, write_fixtures};
use mpcap::channels::{action_distance, KrausChannel};
use mpcap::codec::{channel_from_json, channel_to_json, report_from_json, state_from_json, state_to_json};
use mpcap::paperlab::{closed_form_choi, closed_form_mixture_choi, swap_pairs, PaperChannel};
use mpcap::states::{max_entangled_on, random, PartySystem};
use rand::SeedableRng;
use serde_json::Value;
use tempfile::TempDir;

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    dir
}

fn json(out: &std::process::Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("json report")
}

fn choi_file(dir: &TempDir, channel: &str, name: &str) -> std::path::PathBuf {
    let out_path = path(dir.path(), name);
    let out = run(&[
        "choi",
        p(&path(dir.path(), channel)),
        "--order",
        "A1,B,A2,C",
        "--out",
        p(&out_path),
    ]);
    assert_eq!(code(&out), 0);
    out_path
}

#[test]
fn verify_bundled_and_broken_channels() {
    let dir = setup();
    let e1 = path(dir.path(), "e1.json");
    assert_eq!(code(&run(&["verify", p(&e1)])), 0);

    let text = std::fs::read_to_string(&e1).unwrap();
    let truncated = path(dir.path(), "truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&run(&["verify", p(&truncated)])), 2);

    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["kraus"].as_array_mut().unwrap().pop();
    let missing = path(dir.path(), "missing.json");
    std::fs::write(&missing, doc.to_string()).unwrap();
    let out = run(&["verify", p(&missing), "--format", "json"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    assert_eq!(report["overall"], "fail");
    let defect = report["entries"][0]["numbers"]["completeness_defect"].as_f64().unwrap();
    assert!(defect > 0.0);
}

#[test]
fn choi_matches_closed_forms() {
    let dir = setup();
    let c1 = state_from_json(&std::fs::read_to_string(choi_file(&dir, "e1.json", "c1.json")).unwrap()).unwrap();
    let d = c1
        .matrix()
        .frobenius_distance(closed_form_choi(PaperChannel::E1).matrix())
        .unwrap();
    assert!(d <= 1e-12);

    let c2 = state_from_json(&std::fs::read_to_string(choi_file(&dir, "e2.json", "c2.json")).unwrap()).unwrap();
    let c3 = state_from_json(&std::fs::read_to_string(choi_file(&dir, "e3.json", "c3.json")).unwrap()).unwrap();
    let swapped = swap_pairs(&c2).unwrap();
    assert!(c3.matrix().frobenius_distance(swapped.matrix()).unwrap() <= 1e-12);
}

#[test]
fn choi_of_identity_is_bell_state() {
    let dir = setup();
    let id = KrausChannel::identity(PartySystem::qubits(["A"]).unwrap(), PartySystem::qubits(["B"]).unwrap()).unwrap();
    let file = path(dir.path(), "id.json");
    std::fs::write(&file, channel_to_json(&id)).unwrap();
    let out_path = path(dir.path(), "id_choi.json");
    assert_eq!(code(&run(&["choi", p(&file), "--out", p(&out_path)])), 0);
    let state = state_from_json(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    let bell = max_entangled_on(2, "A", "B").unwrap().density();
    assert!(state.matrix().frobenius_distance(bell.matrix()).unwrap() < 1e-15);
}

#[test]
fn choi_bad_order_is_usage_error() {
    let dir = setup();
    let out = run(&["choi", p(&path(dir.path(), "e1.json")), "--order", "A1,B,Z,C"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn classify_mixture_and_e1() {
    let dir = setup();
    let mixed = path(dir.path(), "mix.json");
    let files: Vec<_> = ["e1.json", "e2.json", "e3.json"]
        .iter()
        .map(|f| path(dir.path(), f))
        .collect();
    let out = run(&["mix", p(&files[0]), p(&files[1]), p(&files[2]), "--out", p(&mixed)]);
    assert_eq!(code(&out), 0);
    let choi_mix = choi_file(&dir, "mix.json", "choi_mix.json");

    let out = run(&["classify", p(&choi_mix), "--groups", "A1+A2,B,C", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    let status = |id: &str| {
        r["entries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["id"] == id)
            .unwrap_or_else(|| panic!("missing {id}"))["status"]
            .clone()
    };
    for cut in ["cut:A1,A2|B,C", "cut:B|A1,A2,C", "cut:A1,B,A2|C"] {
        assert_eq!(status(cut), "npt", "{cut}");
    }
    assert_eq!(status("pair:A1+A2|B"), "distillable");
    assert_eq!(status("pair:A1+A2|C"), "distillable");

    let c1 = choi_file(&dir, "e1.json", "c1.json");
    let r = json(&run(&["classify", p(&c1), "--groups", "A1+A2,B,C", "--format", "json"]));
    let entries = r["entries"].as_array().unwrap();
    let get = |id: &str| entries.iter().find(|e| e["id"] == id).unwrap()["status"].clone();
    assert_eq!(get("cut:B|A1,A2,C"), "ppt");
    assert_eq!(get("cut:A1,B,A2|C"), "ppt");
    assert_eq!(get("pair:A1+A2|B"), "blocked");
    assert_eq!(get("pair:A1+A2|C"), "blocked");
}

#[test]
fn classify_random_state_falls_back() {
    let dir = setup();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let rho = random::density(&PartySystem::qubits(["A", "B", "C"]).unwrap(), &mut rng);
    let file = path(dir.path(), "rand.json");
    std::fs::write(&file, state_to_json(&rho)).unwrap();
    let out = run(&["classify", p(&file), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert!(!r["warnings"].as_array().unwrap().is_empty());
    let ids: Vec<&str> = r["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids.len(), 3);
    assert!(ids.iter().all(|id| id.starts_with("cut:")));
}

#[test]
fn mix_examples() {
    let dir = setup();
    let e1 = path(dir.path(), "e1.json");
    let e2 = path(dir.path(), "e2.json");
    let e3 = path(dir.path(), "e3.json");
    let mixed = path(dir.path(), "mix.json");
    assert_eq!(code(&run(&["mix", p(&e1), p(&e2), p(&e3), "--out", p(&mixed)])), 0);
    let choi_mix = choi_file(&dir, "mix.json", "choi_mix.json");
    let state = state_from_json(&std::fs::read_to_string(choi_mix).unwrap()).unwrap();
    assert!(
        state
            .matrix()
            .frobenius_distance(closed_form_mixture_choi().matrix())
            .unwrap()
            <= 1e-12
    );

    let single = path(dir.path(), "single.json");
    assert_eq!(code(&run(&["mix", p(&e1), "--weights", "1", "--out", p(&single)])), 0);
    let a = channel_from_json(&std::fs::read_to_string(&e1).unwrap()).unwrap();
    let b = channel_from_json(&std::fs::read_to_string(&single).unwrap()).unwrap();
    assert!(action_distance(&a, &b).unwrap() < 1e-15);

    assert_eq!(code(&run(&["mix", p(&e1), p(&e2), "--weights", "0.5,0.6"])), 2);

    let id = KrausChannel::identity(PartySystem::qubits(["A"]).unwrap(), PartySystem::qubits(["B"]).unwrap()).unwrap();
    let other = path(dir.path(), "id.json");
    std::fs::write(&other, channel_to_json(&id)).unwrap();
    assert_eq!(code(&run(&["mix", p(&e1), p(&other)])), 2);
}

#[test]
fn reproduce_reports() {
    let out = run(&["reproduce"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("non-additivity witnessed"));

    let out = run(&["reproduce", "--claims", "pt-E1-B", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let r = report_from_json(&stdout(&out)).unwrap();
    assert_eq!(r.entries.len(), 1);
    assert_eq!(r.entries[0].id, "pt-E1-B");

    let a = run(&["reproduce", "--format", "json"]);
    let b = run(&["reproduce", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let r = report_from_json(&stdout(&a)).unwrap();
    assert_eq!(r.headline.as_deref(), Some("non-additivity witnessed"));
    assert_eq!(r.exit_code, 0);
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    for key in ["tool_version", "command", "entries", "overall", "exit_code"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(code(&run(&["reproduce", "--claims", "no-such-claim"])), 2);
}

#[test]
fn tolerance_is_echoed_and_validated() {
    let dir = setup();
    let e1 = path(dir.path(), "e1.json");
    let r = json(&run(&["verify", p(&e1), "--tolerance", "1e-6", "--format", "json"]));
    assert_eq!(r["tolerance"].as_f64(), Some(1e-6));
    assert_eq!(code(&run(&["verify", p(&e1), "--tolerance", "-1"])), 2);
}

#[test]
fn out_writes_report_for_verify() {
    let dir = setup();
    let e1 = path(dir.path(), "e1.json");
    let report = path(dir.path(), "report.json");
    assert_eq!(code(&run(&["verify", p(&e1), "--out", p(&report)])), 0);
    let r = report_from_json(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r.overall, "pass");
}

#[test]
fn missing_file_and_unknown_group() {
    let dir = setup();
    assert_eq!(code(&run(&["verify", p(&path(dir.path(), "nope.json"))])), 2);
    let ghz = path(dir.path(), "ghz3.json");
    assert_eq!(code(&run(&["classify", p(&ghz), "--groups", "A,Z"])), 2);
}
