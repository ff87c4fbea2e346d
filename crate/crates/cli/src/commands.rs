use std::fs;
use std::path::{Path, PathBuf};

use mpcap::channels::{choi, choi_operator, mix, verify_cptp, KrausChannel, COMPLETENESS_TOL};
use mpcap::codec::{
    channel_from_json, channel_to_json, entries_from_reproduction, report_to_json, state_from_json, state_to_json,
    Report,
};
use mpcap::entanglement::classify;
use mpcap::linalg::{ComplexMatrix, POSITIVITY_TOL};
use mpcap::paperlab::reproduce_all;
use mpcap::states::{format_ghz_index, MultipartiteState, TRACE_TOL};
use thiserror::Error;

use crate::render;
use crate::{Cli, Command, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(#[from] mpcap::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Every input or usage problem exits with 2.
    pub const EXIT_CODE: u8 = 2;
}

pub struct Outcome {
    pub report: Report,
    pub human: String,
    /// State or channel JSON produced by the command.
    pub artifact: Option<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_channel(path: &Path) -> Result<KrausChannel, CliError> {
    Ok(channel_from_json(&read(path)?)?)
}

fn load_state(path: &Path) -> Result<MultipartiteState, CliError> {
    Ok(state_from_json(&read(path)?)?)
}

fn tolerance(cli: &Cli) -> Result<f64, CliError> {
    match cli.tolerance {
        Some(t) if !(t.is_finite() && t >= 0.0) => Err(CliError::Usage(format!("invalid tolerance {t}"))),
        Some(t) => Ok(t),
        None => Ok(POSITIVITY_TOL),
    }
}

pub fn run(cli: &Cli, echo: Vec<String>) -> Result<Outcome, CliError> {
    let tol = tolerance(cli)?;
    let mut report = Report::new(echo);
    report.tolerance = Some(tol);
    match &cli.command {
        Command::Verify { file } => verify(report, file, tol),
        Command::Choi { file, order } => choi_cmd(report, file, order.as_deref(), tol),
        Command::Classify { file, groups } => classify_cmd(report, file, groups.as_deref(), tol),
        Command::Mix { files, weights } => mix_cmd(report, files, weights.as_deref()),
        Command::Reproduce { claims } => reproduce(report, claims.as_deref()),
    }
}

/// Prints the outcome, writes `--out`, and returns the exit code.
pub fn emit(cli: &Cli, outcome: Outcome) -> Result<u8, CliError> {
    let json = report_to_json(&outcome.report);
    if let Some(path) = &cli.out {
        write(path, outcome.artifact.as_deref().unwrap_or(&json))?;
    }
    match cli.format {
        Format::Json => println!("{json}"),
        Format::Human => {
            print!("{}", outcome.human);
            for w in &outcome.report.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(outcome.report.exit_code as u8)
}

fn verify(mut report: Report, file: &Path, tol: f64) -> Result<Outcome, CliError> {
    let ch = load_channel(file)?;
    let cptp = verify_cptp(&ch)?;
    let tp = cptp.trace_preserving_defect <= COMPLETENESS_TOL;
    let cp = cptp.choi_min_eigenvalue >= -tol;
    report.push(
        "trace-preserving",
        tp,
        [
            ("completeness_defect".to_string(), cptp.trace_preserving_defect),
            ("kraus_count".to_string(), ch.kraus().len() as f64),
        ],
    );
    report.push(
        "completely-positive",
        cp,
        [("choi_min_eigenvalue".to_string(), cptp.choi_min_eigenvalue)],
    );
    report.finish(tp && cp);
    let human = render::entries(
        &format!("channel {} : {} -> {}", ch.name(), ch.input(), ch.output()),
        &report,
    );
    Ok(Outcome {
        report,
        human,
        artifact: None,
    })
}

fn choi_cmd(mut report: Report, file: &Path, order: Option<&[String]>, tol: f64) -> Result<Outcome, CliError> {
    let ch = load_channel(file)?;
    let state = choi(&ch, order)?;
    let trace = state.matrix().trace()?.re;
    let min = state.min_eigenvalue();
    let trace_ok = (trace - 1.0).abs() <= TRACE_TOL;
    report.push("choi-trace", trace_ok, [("trace".to_string(), trace)]);
    report.push("choi-psd", min >= -tol, [("min_eigenvalue".to_string(), min)]);
    report.finish(trace_ok && min >= -tol);
    let mut human = render::entries(&format!("Choi state of {} on {}", ch.name(), state.system()), &report);
    if cli_hint_needed(&report) {
        human.push_str("(pass --out <path> to write the state)\n");
    }
    Ok(Outcome {
        report,
        human,
        artifact: Some(state_to_json(&state)),
    })
}

fn cli_hint_needed(report: &Report) -> bool {
    !report.command.iter().any(|a| a == "--out" || a.starts_with("--out="))
}

fn parse_groups(spec: Option<&str>, state: &MultipartiteState) -> Result<Vec<Vec<String>>, CliError> {
    let sys = state.system();
    let groups: Vec<Vec<String>> = match spec {
        None => sys.labels().iter().map(|l| vec![l.clone()]).collect(),
        Some(s) => s
            .split(',')
            .map(|g| g.split('+').map(|p| p.trim().to_string()).collect())
            .collect(),
    };
    for g in &groups {
        for p in g {
            sys.position(p)?;
        }
    }
    Ok(groups)
}

fn classify_cmd(mut report: Report, file: &Path, groups: Option<&str>, tol: f64) -> Result<Outcome, CliError> {
    let state = load_state(file)?;
    let groups = parse_groups(groups, &state)?;
    let c = classify(&state, &groups, tol)?;
    let sys = state.system();

    if let Some(k) = &c.coefficients {
        let mut numbers = vec![
            ("delta".to_string(), k.delta),
            ("lambda0_plus".to_string(), k.lambda0_plus),
            ("lambda0_minus".to_string(), k.lambda0_minus),
            ("offdiagonal_residual".to_string(), k.offdiagonal_residual),
            ("normalization".to_string(), k.normalization()),
        ];
        for (&j, &l) in &k.lambdas {
            numbers.push((format!("lambda_{}", format_ghz_index(j, sys.len())), l));
        }
        report.push("ghz-coefficients", true, numbers);
    }
    for cut in &c.cuts {
        let mut numbers = vec![("min_eigenvalue".to_string(), cut.eigen.min_eigenvalue)];
        if let Some(npt) = cut.criterion_npt {
            numbers.push(("criterion_npt".to_string(), f64::from(u8::from(npt))));
        }
        let status = if cut.eigen.is_ppt { "ppt" } else { "npt" };
        report
            .entries
            .push(entry(format!("cut:{}", cut.eigen.cut), status, numbers));
    }
    for p in &c.pairs {
        let status = if p.distillable { "distillable" } else { "blocked" };
        report.entries.push(entry(
            format!("pair:{}|{}", p.group_one.join("+"), p.group_two.join("+")),
            status,
            vec![
                ("separating_cuts".to_string(), p.separating_cuts.len() as f64),
                ("blocking_cuts".to_string(), p.blocking_cuts.len() as f64),
            ],
        ));
    }
    report.warnings = c.warnings.clone();
    report.finish(true);
    let human = render::classification(&state, &c);
    Ok(Outcome {
        report,
        human,
        artifact: None,
    })
}

fn entry(id: String, status: &str, numbers: Vec<(String, f64)>) -> mpcap::codec::ReportEntry {
    mpcap::codec::ReportEntry {
        id,
        status: status.to_string(),
        description: String::new(),
        negative_control: false,
        numbers: numbers.into_iter().filter(|(_, v)| v.is_finite()).collect(),
    }
}

fn mix_cmd(mut report: Report, files: &[PathBuf], weights: Option<&[f64]>) -> Result<Outcome, CliError> {
    let channels = files.iter().map(|f| load_channel(f)).collect::<Result<Vec<_>, _>>()?;
    let weights = match weights {
        Some(w) => w.to_vec(),
        None => vec![1.0 / channels.len() as f64; channels.len()],
    };
    let mixed = mix(&channels, &weights)?;
    let (_, j) = choi_operator(&mixed);
    let mut expected = ComplexMatrix::zeros(j.rows(), j.cols());
    for (ch, w) in channels.iter().zip(&weights) {
        expected = &expected + &choi_operator(ch).1.scale_real(*w);
    }
    let linearity = j.frobenius_distance(&expected)?;
    let linear_ok = linearity <= 1e-12;
    let defect = mixed.completeness_defect();
    let tp = defect <= COMPLETENESS_TOL;
    report.push("choi-linearity", linear_ok, [("distance".to_string(), linearity)]);
    report.push("trace-preserving", tp, [("completeness_defect".to_string(), defect)]);
    report.finish(linear_ok && tp);
    let mut human = render::entries(
        &format!("{} ({} Kraus operators)", mixed.name(), mixed.kraus().len()),
        &report,
    );
    if cli_hint_needed(&report) {
        human.push_str("(pass --out <path> to write the channel)\n");
    }
    Ok(Outcome {
        report,
        human,
        artifact: Some(channel_to_json(&mixed)),
    })
}

fn reproduce(mut report: Report, claims: Option<&[String]>) -> Result<Outcome, CliError> {
    let mut r = reproduce_all();
    if let Some(ids) = claims {
        r = r.filtered(ids)?;
    }
    report.entries = entries_from_reproduction(&r);
    report.headline = r.headline.clone();
    report.finish(r.pass());
    let human = render::reproduction(&r);
    Ok(Outcome {
        report,
        human,
        artifact: None,
    })
}
