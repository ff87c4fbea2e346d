//! Quantum channels in Kraus form and the Choi isomorphism.
//!
//! The Choi state of a channel with input parties `I₁…I_k` and output parties
//! `O₁…O_m` lives on `I₁…I_k O₁…O_m`: the reference half of the maximally
//! entangled input keeps the input labels. It is normalized to unit trace,
//! so for input dimension `d` it equals `(1/d) Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64, POSITIVITY_TOL};
use crate::states::{partial_trace_operator, permute_operator, MultipartiteState, PartySystem};

/// Allowed `‖Σ A_k†A_k − I‖_F` for a trace-preserving channel.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Kraus operators whose Choi eigenvalue falls below this are dropped.
pub const KRAUS_RANK_CUTOFF: f64 = 1e-11;

/// The reference marginal of a trace-preserving Choi state must be `I/d`
/// within this.
pub const CHOI_MARGINAL_TOL: f64 = 1e-8;

/// Weights passed to [`mix`] must sum to one within this.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    name: String,
    input: PartySystem,
    output: PartySystem,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Checks shapes only. Completeness is reported by [`verify_cptp`] so that
    /// broken channels can still be loaded and diagnosed.
    pub fn new(
        name: impl Into<String>,
        input: PartySystem,
        output: PartySystem,
        kraus: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::DimensionMismatch(
                "channel needs at least one Kraus operator".into(),
            ));
        }
        let (din, dout) = (input.total_dim(), output.total_dim());
        for (k, a) in kraus.iter().enumerate() {
            if a.rows() != dout || a.cols() != din {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {k} is {}x{}, expected {dout}x{din}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        if let Some(l) = input.labels().iter().find(|l| output.labels().contains(l)) {
            return Err(Error::InvalidSystem(format!(
                "label `{l}` used for both input and output"
            )));
        }
        Ok(Self {
            name: name.into(),
            input,
            output,
            kraus,
        })
    }

    /// `ρ ↦ ρ`, relabelled from `input` to `output`.
    pub fn identity(input: PartySystem, output: PartySystem) -> Result<Self> {
        if input.total_dim() != output.total_dim() {
            return Err(Error::DimensionMismatch(
                "identity channel needs equal dimensions".into(),
            ));
        }
        let d = input.total_dim();
        Self::new("identity", input, output, vec![ComplexMatrix::identity(d)])
    }

    /// `ρ ↦ tr(ρ) I/d` via the `d²` Weyl operators `XᵃZᵇ/d`.
    pub fn completely_depolarizing(input: PartySystem, output: PartySystem) -> Result<Self> {
        if input.total_dim() != output.total_dim() {
            return Err(Error::DimensionMismatch(
                "depolarizing channel needs equal dimensions".into(),
            ));
        }
        let d = input.total_dim();
        let omega = 2.0 * std::f64::consts::PI / d as f64;
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let mut w = ComplexMatrix::zeros(d, d);
                for k in 0..d {
                    // X^a Z^b |k⟩ = ω^{bk} |k + a⟩
                    w[((k + a) % d, k)] = C64::from_polar(1.0 / d as f64, omega * (b * k) as f64);
                }
                kraus.push(w);
            }
        }
        Self::new("depolarizing", input, output, kraus)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn input(&self) -> &PartySystem {
        &self.input
    }

    pub fn output(&self) -> &PartySystem {
        &self.output
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ A_k† A_k`.
    pub fn completeness(&self) -> ComplexMatrix {
        let d = self.input.total_dim();
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, a| &acc + &(&a.dagger() * a))
    }

    /// `‖Σ A_k† A_k − I‖_F`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.input.total_dim();
        (&self.completeness() - &ComplexMatrix::identity(d)).frobenius_norm()
    }

    /// Same channel with every Kraus operator replaced by `f(A_k)`.
    pub fn map_kraus(&self, name: impl Into<String>, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        Self::new(
            name,
            self.input.clone(),
            self.output.clone(),
            self.kraus.iter().map(f).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CptpReport {
    pub trace_preserving_defect: f64,
    pub choi_min_eigenvalue: f64,
    pub pass: bool,
    pub reasons: Vec<String>,
}

pub fn verify_cptp(ch: &KrausChannel) -> Result<CptpReport> {
    let defect = ch.completeness_defect();
    let (_, choi) = choi_operator(ch);
    let min = hermitian_eig(&choi)?.eigenvalues[0];
    let mut reasons = Vec::new();
    if defect > COMPLETENESS_TOL {
        reasons.push(format!("Σ A†A deviates from identity by {defect:e}"));
    }
    if min < -POSITIVITY_TOL {
        reasons.push(format!("Choi matrix has negative eigenvalue {min:e}"));
    }
    Ok(CptpReport {
        trace_preserving_defect: defect,
        choi_min_eigenvalue: min,
        pass: reasons.is_empty(),
        reasons,
    })
}

/// `Σ A_k M A_k†` for an arbitrary operator `M` on the input space.
pub fn apply_operator(ch: &KrausChannel, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = ch.input.total_dim();
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, channel input dimension {d}",
            m.rows(),
            m.cols()
        )));
    }
    let dout = ch.output.total_dim();
    let mut acc = ComplexMatrix::zeros(dout, dout);
    for a in &ch.kraus {
        acc = &acc + &(&(a * m) * &a.dagger());
    }
    Ok(acc)
}

pub fn apply(ch: &KrausChannel, rho: &MultipartiteState) -> Result<MultipartiteState> {
    if rho.system().dims() != ch.input.dims() {
        return Err(Error::DimensionMismatch(format!(
            "state on {} but channel input is {}",
            rho.system(),
            ch.input
        )));
    }
    let out = apply_operator(ch, rho.matrix())?;
    MultipartiteState::new(ch.output.clone(), out)
}

/// Choi operator in the default order (input labels, then output labels),
/// without any trace check.
pub fn choi_operator(ch: &KrausChannel) -> (PartySystem, ComplexMatrix) {
    let din = ch.input.total_dim();
    let dout = ch.output.total_dim();
    let n = din * dout;
    let norm = 1.0 / din as f64;
    let mut acc = ComplexMatrix::zeros(n, n);
    // (I ⊗ A)|Φ⟩ has amplitude A[o][i]/√d at |i⟩|o⟩.
    for a in &ch.kraus {
        let v: Vec<C64> = (0..din)
            .flat_map(|i| (0..dout).map(move |o| (i, o)))
            .map(|(i, o)| a[(o, i)])
            .collect();
        for r in 0..n {
            if v[r] == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..n {
                acc[(r, c)] += v[r] * v[c].conj() * norm;
            }
        }
    }
    let mut labels: Vec<String> = ch.input.labels().to_vec();
    labels.extend(ch.output.labels().iter().cloned());
    let mut dims = ch.input.dims().to_vec();
    dims.extend_from_slice(ch.output.dims());
    let system = PartySystem::new(labels, dims).expect("input and output labels are disjoint");
    (system, acc)
}

/// Choi state `(id ⊗ E)|Φ⟩⟨Φ|`, with parties reordered to `order` when given.
pub fn choi<S: AsRef<str>>(ch: &KrausChannel, order: Option<&[S]>) -> Result<MultipartiteState> {
    let defect = ch.completeness_defect();
    if defect > COMPLETENESS_TOL {
        return Err(Error::NotTracePreserving(defect));
    }
    let (system, m) = choi_operator(ch);
    let state = MultipartiteState::new_unchecked(system, m);
    match order {
        Some(order) => state.permuted(order),
        None => Ok(state),
    }
}

/// Classical mixture: Kraus lists concatenated with prefactors `√w_a`.
pub fn mix(channels: &[KrausChannel], weights: &[f64]) -> Result<KrausChannel> {
    let first = channels
        .first()
        .ok_or_else(|| Error::BadWeights("no channels to mix".into()))?;
    if weights.len() != channels.len() {
        return Err(Error::BadWeights(format!(
            "{} weights for {} channels",
            weights.len(),
            channels.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::BadWeights(format!("weight {w} is not a probability")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    for ch in &channels[1..] {
        if ch.input != first.input || ch.output != first.output {
            return Err(Error::SystemMismatch(format!(
                "`{}` maps {} → {}, `{}` maps {} → {}",
                first.name, first.input, first.output, ch.name, ch.input, ch.output
            )));
        }
    }
    let kraus = channels
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .flat_map(|(ch, &w)| ch.kraus.iter().map(move |a| a.scale_real(w.sqrt())))
        .collect();
    let name = format!(
        "mix({})",
        channels.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",")
    );
    KrausChannel::new(name, first.input.clone(), first.output.clone(), kraus)
}

/// The channel followed by a partial trace over `traced_outputs`.
pub fn reduced_channel<S: AsRef<str>>(ch: &KrausChannel, traced_outputs: &[S]) -> Result<KrausChannel> {
    let mut gone = Vec::new();
    for l in traced_outputs {
        let p = ch.output.position(l.as_ref())?;
        if !gone.contains(&p) {
            gone.push(p);
        }
    }
    gone.sort_unstable();
    let kept: Vec<usize> = (0..ch.output.len()).filter(|p| !gone.contains(p)).collect();
    if kept.is_empty() {
        return Err(Error::NothingLeft);
    }
    let kept_sys = ch.output.select(&kept);
    let gone_sys = ch.output.select(&gone);
    let din = ch.input.total_dim();
    let mut kraus = Vec::with_capacity(ch.kraus.len() * gone_sys.total_dim());
    let mut digits = vec![0; ch.output.len()];
    for a in &ch.kraus {
        // (I_kept ⊗ ⟨m|_gone) A for each basis state m of the traced parties
        for g in 0..gone_sys.total_dim() {
            for (&p, &x) in gone.iter().zip(&gone_sys.digits(g)) {
                digits[p] = x;
            }
            let mut b = ComplexMatrix::zeros(kept_sys.total_dim(), din);
            for r in 0..kept_sys.total_dim() {
                for (&p, &x) in kept.iter().zip(&kept_sys.digits(r)) {
                    digits[p] = x;
                }
                let src = ch.output.compose(&digits);
                for c in 0..din {
                    b[(r, c)] = a[(src, c)];
                }
            }
            if b.frobenius_norm() > 0.0 {
                kraus.push(b);
            }
        }
    }
    if kraus.is_empty() {
        kraus.push(ComplexMatrix::zeros(kept_sys.total_dim(), din));
    }
    KrausChannel::new(format!("{}|reduced", ch.name), ch.input.clone(), kept_sys, kraus)
}

/// Recovers Kraus operators from a Choi state whose `reference` parties play
/// the role of the channel input; the remaining parties (in the state's
/// order) are the output.
pub fn kraus_from_choi<S: AsRef<str>>(choi_state: &MultipartiteState, reference: &[S]) -> Result<KrausChannel> {
    let sys = choi_state.system();
    let reference: Vec<String> = reference.iter().map(|s| s.as_ref().to_string()).collect();
    for l in &reference {
        sys.position(l)?;
    }
    let outputs: Vec<String> = sys
        .labels()
        .iter()
        .filter(|l| !reference.contains(l))
        .cloned()
        .collect();
    if reference.is_empty() || outputs.is_empty() {
        return Err(Error::InvalidCut("need both reference and output parties".into()));
    }
    let order: Vec<String> = reference.iter().chain(&outputs).cloned().collect();
    let (ordered_sys, m) = permute_operator(choi_state.matrix(), sys, &order)?;
    let k = reference.len();
    let input = ordered_sys.select(&(0..k).collect::<Vec<_>>());
    let output = ordered_sys.select(&(k..ordered_sys.len()).collect::<Vec<_>>());
    let (din, dout) = (input.total_dim(), output.total_dim());

    let (_, marginal) = partial_trace_operator(&m, &ordered_sys, &outputs)?;
    let off = marginal.frobenius_distance(&ComplexMatrix::identity(din).scale_real(1.0 / din as f64))?;
    if off > CHOI_MARGINAL_TOL {
        return Err(Error::NotTracePreserving(off));
    }

    let eig = hermitian_eig(&m)?;
    if eig.eigenvalues[0] < -POSITIVITY_TOL {
        return Err(Error::NotPsd(eig.eigenvalues[0]));
    }
    let mut kraus = Vec::new();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate().rev() {
        if lambda < KRAUS_RANK_CUTOFF {
            continue;
        }
        let scale = (din as f64 * lambda).sqrt();
        let mut a = ComplexMatrix::zeros(dout, din);
        for i in 0..din {
            for o in 0..dout {
                a[(o, i)] = eig.eigenvectors[(i * dout + o, idx)] * scale;
            }
        }
        kraus.push(a);
    }
    KrausChannel::new("from-choi", input, output, kraus)
}

/// Largest Frobenius deviation between the two channels' outputs over the
/// matrix-unit basis `|i⟩⟨j|` of the input space.
pub fn action_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    let d = a.input.total_dim();
    if b.input.total_dim() != d || a.output.total_dim() != b.output.total_dim() {
        return Err(Error::DimensionMismatch(
            "channels have different input/output dimensions".into(),
        ));
    }
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let e = ComplexMatrix::matrix_unit(d, i, j);
            worst = worst.max(apply_operator(a, &e)?.frobenius_distance(&apply_operator(b, &e)?)?);
        }
    }
    Ok(worst)
}
