//! Writes e1.json, e2.json, e3.json and ghz3.json into the given directory
//! (default `fixtures/`).

use std::path::PathBuf;

use mpcap::codec::{channel_to_json, state_to_json};
use mpcap::paperlab::{build_paper_channel, PaperChannel};
use mpcap::states::{ghz_basis_state, GhzSign, PartySystem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    for c in PaperChannel::ALL {
        let path = dir.join(format!("{}.json", c.name().to_lowercase()));
        std::fs::write(&path, channel_to_json(&build_paper_channel(c)))?;
        println!("wrote {}", path.display());
    }
    let sys = PartySystem::qubits(["A", "B1", "B2"])?;
    let ghz = ghz_basis_state(&sys, 0, GhzSign::Plus)?.density();
    let path = dir.join("ghz3.json");
    std::fs::write(&path, state_to_json(&ghz))?;
    println!("wrote {}", path.display());
    Ok(())
}
