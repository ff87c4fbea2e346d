//! Fixed-width text tables.

use std::fmt::Write;

use mpcap::codec::Report;
use mpcap::entanglement::Classification;
use mpcap::paperlab::ReproductionReport;
use mpcap::states::{format_ghz_index, MultipartiteState};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn entries(title: &str, report: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    let w = report.entries.iter().map(|e| e.id.len()).max().unwrap_or(2).max(2);
    writeln!(out, "{:<w$}  {:<6}  VALUES", "ID", "STATUS").unwrap();
    for e in &report.entries {
        let values: Vec<String> = e.numbers.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        writeln!(out, "{:<w$}  {:<6}  {}", e.id, e.status, values.join("  ")).unwrap();
    }
    writeln!(out, "overall: {}", report.overall).unwrap();
    out
}

pub fn reproduction(r: &ReproductionReport) -> String {
    let mut out = String::new();
    let w = r.entries.iter().map(|e| e.id.len()).max().unwrap_or(2).max(2);
    writeln!(
        out,
        "{:<w$}  {:<6}  {:>14}  {:<24}  CLAIM",
        "ID", "STATUS", "COMPUTED", "EXPECTED"
    )
    .unwrap();
    for e in &r.entries {
        let note = if e.negative_control {
            " [control, must fail]"
        } else {
            ""
        };
        writeln!(
            out,
            "{:<w$}  {:<6}  {:>14}  {:<24}  {}{}",
            e.id,
            e.status(),
            e.computed.to_string(),
            e.expected.to_string(),
            e.description,
            note
        )
        .unwrap();
    }
    let verdict = if r.pass() { "pass" } else { "fail" };
    match &r.headline {
        Some(h) => writeln!(out, "overall: {verdict} ({h})").unwrap(),
        None => writeln!(out, "overall: {verdict}").unwrap(),
    }
    out
}

pub fn classification(state: &MultipartiteState, c: &Classification) -> String {
    let sys = state.system();
    let mut out = String::new();
    writeln!(out, "state on {sys}").unwrap();
    if let Some(k) = &c.coefficients {
        writeln!(
            out,
            "GHZ-diagonal: residual {:.3e}  delta {:.6e}  lambda0+ {:.6e}  lambda0- {:.6e}  asymmetric {}",
            k.offdiagonal_residual,
            k.delta,
            k.lambda0_plus,
            k.lambda0_minus,
            yes_no(k.asymmetry_flag)
        )
        .unwrap();
        let jw = sys.len() - 1;
        writeln!(out, "{:<jw$}  LAMBDA", "J", jw = jw.max(1)).unwrap();
        for (&j, &l) in &k.lambdas {
            writeln!(
                out,
                "{:<jw$}  {:.6e}",
                format_ghz_index(j, sys.len()),
                l,
                jw = jw.max(1)
            )
            .unwrap();
        }
    }

    let cw = c
        .cuts
        .iter()
        .map(|x| x.eigen.cut.to_string().len())
        .max()
        .unwrap_or(3)
        .max(3);
    writeln!(
        out,
        "{:<cw$}  {:>5}  {:>14}  {:<6}  {:<9}  VERDICT",
        "CUT", "J", "PT MIN EIG", "EIGEN", "CRITERION"
    )
    .unwrap();
    for x in &c.cuts {
        let j = x
            .ghz_index
            .map(|j| format_ghz_index(j, sys.len()))
            .unwrap_or_else(|| "-".into());
        let crit = match x.criterion_npt {
            Some(true) => "NPT",
            Some(false) => "PPT",
            None => "-",
        };
        let verdict = match x.separable {
            Some(true) => "separable",
            Some(false) => "entangled",
            None if !x.eigen.is_ppt => "entangled",
            None => "undecided",
        };
        writeln!(
            out,
            "{:<cw$}  {:>5}  {:>14.6e}  {:<6}  {:<9}  {}",
            x.eigen.cut.to_string(),
            j,
            x.eigen.min_eigenvalue,
            if x.eigen.is_ppt { "PPT" } else { "NPT" },
            crit,
            verdict
        )
        .unwrap();
    }

    if !c.pairs.is_empty() {
        let label = |g: &[String]| g.join("+");
        let pw = c
            .pairs
            .iter()
            .map(|p| label(&p.group_one).len() + label(&p.group_two).len() + 3)
            .max()
            .unwrap_or(4)
            .max(4);
        writeln!(out, "{:<pw$}  {:<11}  BLOCKING CUTS", "PAIR", "DISTILLABLE").unwrap();
        for p in &c.pairs {
            let blocking: Vec<String> = p.blocking_cuts.iter().map(|b| b.to_string()).collect();
            let name = format!("{} - {}", label(&p.group_one), label(&p.group_two));
            let shown = if blocking.is_empty() {
                "-".to_string()
            } else {
                blocking.join("; ")
            };
            writeln!(out, "{:<pw$}  {:<11}  {}", name, yes_no(p.distillable), shown).unwrap();
        }
    }
    out
}
