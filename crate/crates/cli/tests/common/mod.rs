#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mpcap::codec::{channel_to_json, state_to_json};
use mpcap::paperlab::{build_paper_channel, PaperChannel};
use mpcap::states::{ghz_basis_state, GhzSign, PartySystem};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mpcap"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

/// Writes e1.json, e2.json, e3.json and ghz3.json from the builders.
pub fn write_fixtures(dir: &Path) {
    for c in PaperChannel::ALL {
        let path = dir.join(format!("{}.json", c.name().to_lowercase()));
        std::fs::write(path, channel_to_json(&build_paper_channel(c))).unwrap();
    }
    let sys = PartySystem::qubits(["A", "B1", "B2"]).unwrap();
    let ghz = ghz_basis_state(&sys, 0, GhzSign::Plus).unwrap().density();
    std::fs::write(dir.join("ghz3.json"), state_to_json(&ghz)).unwrap();
}

pub fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}
