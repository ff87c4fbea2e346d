//! Entanglement diagnostics: partial-transpose tests, the GHZ-diagonal
//! classifier, pairwise distillability verdicts, and the constructive
//! localization of a Schmidt-rank-2 state onto one sender and one receiver.
//!
//! # GHZ-diagonal states
//!
//! For N qubits the GHZ basis is `|Ψ_j^±⟩ = (|j,0⟩ ± |j̄,1⟩)/√2` where `j`
//! ranges over the first N−1 qubits and the last qubit is the reference bit.
//! A state diagonal in this basis with `λ_j⁺ = λ_j⁻ =: λ_j` for `j ≠ 0` is
//! fingerprinted by `Δ = |λ₀⁺ − λ₀⁻|` and the `λ_j`. The bipartition whose
//! index is `j` (bit i set iff party i sits opposite the last party) has
//! partial-transpose spectrum
//!
//! ```text
//! {(λ₀⁺+λ₀⁻)/2 (×2), λ_j ± Δ/2, λ_k (×2) for k ∉ {0, j}}
//! ```
//!
//! so it is NPT iff `2λ_j < Δ`. Within this class a PPT cut is separable and
//! two groups are distillable when every cut separating them is NPT.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64, POSITIVITY_TOL};
use crate::states::{
    all_cuts, ghz_basis_state, partial_trace, partial_transpose, permute_vector, random, schmidt_decomposition,
    BipartiteCut, GhzSign, MultipartiteState, PartySystem, PureState, SCHMIDT_RANK_TOL,
};

/// GHZ-diagonal criterion verdicts need an off-diagonal residual below this.
pub const GHZ_RESIDUAL_TOL: f64 = 1e-8;

/// `|λ_j⁺ − λ_j⁻|` above this sets the asymmetry flag.
pub const ASYMMETRY_TOL: f64 = 1e-10;

/// Strict margin in `2λ_j < Δ − margin`; equality counts as PPT.
pub const CRITERION_MARGIN: f64 = 1e-12;

/// Bystander marginals must have purity at least `1 − PURITY_TOL`.
pub const PURITY_TOL: f64 = 1e-10;

/// Projected branches count as distinct when `|⟨ã₀|ã₁⟩| < 1 − DISTINCTNESS_TOL`.
pub const DISTINCTNESS_TOL: f64 = 1e-9;

/// Haar-random projector attempts after the deterministic candidates.
pub const MAX_RANDOM_PROJECTORS: usize = 64;

const PROJECTOR_SEED: u64 = 0x5eed_1e44a;

#[derive(Debug, Clone, PartialEq)]
pub struct PtVerdict {
    pub cut: BipartiteCut,
    pub min_eigenvalue: f64,
    pub is_ppt: bool,
}

pub fn ppt_check(state: &MultipartiteState, cut: &BipartiteCut) -> Result<PtVerdict> {
    ppt_check_with_threshold(state, cut, POSITIVITY_TOL)
}

/// PPT iff the partial transpose has minimum eigenvalue `≥ −threshold`.
pub fn ppt_check_with_threshold(state: &MultipartiteState, cut: &BipartiteCut, threshold: f64) -> Result<PtVerdict> {
    let pt = partial_transpose(state, cut)?;
    let min_eigenvalue = hermitian_eig(&pt)?.eigenvalues[0];
    Ok(PtVerdict {
        cut: cut.clone(),
        min_eigenvalue,
        is_ppt: min_eigenvalue >= -threshold,
    })
}

/// Separability of a two-qubit state, which coincides with PPT in 2⊗2.
pub fn two_qubit_separability(state: &MultipartiteState) -> Result<bool> {
    let sys = state.system();
    if sys.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!("expected two qubits, got {sys}")));
    }
    let cut = BipartiteCut::new(sys, &sys.labels()[..1])?;
    Ok(ppt_check(state, &cut)?.is_ppt)
}

/// `(Δ, λ_j)` fingerprint of an N-qubit state read in the GHZ basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzDiagonalCoefficients {
    pub system: PartySystem,
    pub lambda0_plus: f64,
    pub lambda0_minus: f64,
    /// Symmetrized pair weights `λ_j = (λ_j⁺ + λ_j⁻)/2`, keyed by `j ≥ 1`.
    pub lambdas: BTreeMap<usize, f64>,
    pub delta: f64,
    pub asymmetry_flag: bool,
    pub offdiagonal_residual: f64,
    /// Raw `⟨Ψ_j^±|ρ|Ψ_j^±⟩`, indexed by `j`.
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl GhzDiagonalCoefficients {
    pub fn lambda(&self, j: usize) -> f64 {
        self.lambdas.get(&j).copied().unwrap_or(f64::NAN)
    }

    /// `λ₀⁺ + λ₀⁻ + 2 Σ λ_j`.
    pub fn normalization(&self) -> f64 {
        self.lambda0_plus + self.lambda0_minus + 2.0 * self.lambdas.values().sum::<f64>()
    }

    pub fn is_ghz_diagonal(&self) -> bool {
        self.offdiagonal_residual <= GHZ_RESIDUAL_TOL
    }

    /// Partial-transpose spectrum across `cut` implied by the symmetrized
    /// coefficients, ascending.
    pub fn pt_spectrum(&self, cut: &BipartiteCut) -> Result<Vec<f64>> {
        let k = cut_to_index(cut, &self.system)?;
        let avg0 = 0.5 * (self.lambda0_plus + self.lambda0_minus);
        let mut spec = vec![avg0, avg0];
        for (&j, &l) in &self.lambdas {
            if j == k {
                spec.push(l - 0.5 * self.delta);
                spec.push(l + 0.5 * self.delta);
            } else {
                spec.push(l);
                spec.push(l);
            }
        }
        spec.sort_by(f64::total_cmp);
        Ok(spec)
    }

    /// Smallest partial-transpose eigenvalue across `cut` from the coefficients.
    pub fn pt_min_eigenvalue(&self, cut: &BipartiteCut) -> Result<f64> {
        Ok(self.pt_spectrum(cut)?[0])
    }
}

pub fn ghz_diagonal_coefficients(state: &MultipartiteState) -> Result<GhzDiagonalCoefficients> {
    let sys = state.system();
    if !sys.is_qubits() || sys.len() < 2 {
        return Err(Error::NotQubits);
    }
    let half = 1usize << (sys.len() - 1);
    let rho = state.matrix();
    let mut plus = Vec::with_capacity(half);
    let mut minus = Vec::with_capacity(half);
    let mut diagonal_part = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for j in 0..half {
        for (sign, store) in [(GhzSign::Plus, &mut plus), (GhzSign::Minus, &mut minus)] {
            let psi = ghz_basis_state(sys, j, sign)?;
            let weight = psi.vector().inner(&(rho * psi.vector()))?.re;
            store.push(weight);
            diagonal_part = &diagonal_part + &psi.vector().outer_self().scale_real(weight);
        }
    }
    let offdiagonal_residual = rho.frobenius_distance(&diagonal_part)?;
    let lambdas: BTreeMap<usize, f64> = (1..half).map(|j| (j, 0.5 * (plus[j] + minus[j]))).collect();
    let asymmetry_flag = (1..half).any(|j| (plus[j] - minus[j]).abs() > ASYMMETRY_TOL);
    Ok(GhzDiagonalCoefficients {
        system: sys.clone(),
        lambda0_plus: plus[0],
        lambda0_minus: minus[0],
        lambdas,
        delta: (plus[0] - minus[0]).abs(),
        asymmetry_flag,
        offdiagonal_residual,
        plus,
        minus,
    })
}

/// `Σ_j (plus[j] |Ψ_j⁺⟩⟨Ψ_j⁺| + minus[j] |Ψ_j⁻⟩⟨Ψ_j⁻|)`.
pub fn ghz_diagonal_state(system: &PartySystem, plus: &[f64], minus: &[f64]) -> Result<MultipartiteState> {
    if !system.is_qubits() || system.len() < 2 {
        return Err(Error::NotQubits);
    }
    let half = 1usize << (system.len() - 1);
    if plus.len() != half || minus.len() != half {
        return Err(Error::DimensionMismatch(format!("need {half} weights per sign")));
    }
    let n = system.total_dim();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..half {
        for (sign, w) in [(GhzSign::Plus, plus[j]), (GhzSign::Minus, minus[j])] {
            m = &m + &ghz_basis_state(system, j, sign)?.vector().outer_self().scale_real(w);
        }
    }
    MultipartiteState::new(system.clone(), m)
}

/// Bit i of the (N−1)-bit index is 1 iff party i lies on the side not
/// containing the last party. Bit 0 of the string is the most significant.
pub fn cut_to_index(cut: &BipartiteCut, system: &PartySystem) -> Result<usize> {
    if !system.is_qubits() {
        return Err(Error::NotQubits);
    }
    cut.validate(system)?;
    let n = system.len();
    let last = &system.labels()[n - 1];
    let last_side_is_one = cut.contains(last);
    let mut j = 0;
    for label in &system.labels()[..n - 1] {
        let opposite = cut.contains(label) != last_side_is_one;
        j = (j << 1) | usize::from(opposite);
    }
    Ok(j)
}

/// The cut whose `side_one` omits the last party, matching [`all_cuts`].
pub fn canonical_cut(system: &PartySystem, side: &[String]) -> Result<BipartiteCut> {
    let cut = BipartiteCut::new(system, side)?;
    let last = &system.labels()[system.len() - 1];
    Ok(if cut.contains(last) { cut.swapped() } else { cut })
}

/// NPT across `cut` by the coefficient rule `2λ_j < Δ`.
pub fn npt_criterion(coeffs: &GhzDiagonalCoefficients, cut: &BipartiteCut) -> Result<bool> {
    if !coeffs.is_ghz_diagonal() {
        return Err(Error::NotGhzDiagonal(coeffs.offdiagonal_residual));
    }
    let j = cut_to_index(cut, &coeffs.system)?;
    Ok(2.0 * coeffs.lambda(j) < coeffs.delta - CRITERION_MARGIN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistillabilityVerdict {
    pub group_one: Vec<String>,
    pub group_two: Vec<String>,
    pub separating_cuts: Vec<BipartiteCut>,
    pub distillable: bool,
    /// Separating cuts that are PPT.
    pub blocking_cuts: Vec<BipartiteCut>,
}

/// Distillable iff every bipartition with the two groups on opposite sides
/// is NPT.
pub fn pairwise_distillability<S: AsRef<str>>(
    coeffs: &GhzDiagonalCoefficients,
    group_one: &[S],
    group_two: &[S],
) -> Result<DistillabilityVerdict> {
    let sys = &coeffs.system;
    let g1: Vec<String> = group_one.iter().map(|s| s.as_ref().to_string()).collect();
    let g2: Vec<String> = group_two.iter().map(|s| s.as_ref().to_string()).collect();
    if g1.is_empty() || g2.is_empty() {
        return Err(Error::InvalidCut("groups must be nonempty".into()));
    }
    for l in g1.iter().chain(&g2) {
        sys.position(l)?;
    }
    if let Some(l) = g1.iter().find(|l| g2.contains(l)) {
        return Err(Error::OverlappingGroups(l.clone()));
    }
    let free: Vec<&String> = sys
        .labels()
        .iter()
        .filter(|l| !g1.contains(l) && !g2.contains(l))
        .collect();
    let mut separating_cuts = Vec::new();
    for mask in 0..(1usize << free.len()) {
        let mut side = g1.clone();
        side.extend(
            free.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, l)| (*l).clone()),
        );
        separating_cuts.push(canonical_cut(sys, &side)?);
    }
    separating_cuts.sort_by_key(|c| cut_to_index(c, sys).unwrap_or(0));
    let mut blocking_cuts = Vec::new();
    for cut in &separating_cuts {
        if !npt_criterion(coeffs, cut)? {
            blocking_cuts.push(cut.clone());
        }
    }
    Ok(DistillabilityVerdict {
        group_one: g1,
        group_two: g2,
        separating_cuts,
        distillable: blocking_cuts.is_empty(),
        blocking_cuts,
    })
}

/// Everything the classifier can say about one bipartition.
#[derive(Debug, Clone, PartialEq)]
pub struct CutAnalysis {
    pub eigen: PtVerdict,
    pub ghz_index: Option<usize>,
    /// Coefficient rule, present only for GHZ-diagonal states.
    pub criterion_npt: Option<bool>,
    /// Class-based verdict, present only for GHZ-diagonal states.
    pub separable: Option<bool>,
}

impl CutAnalysis {
    pub fn methods_agree(&self) -> Option<bool> {
        self.criterion_npt.map(|npt| npt != self.eigen.is_ppt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub cuts: Vec<CutAnalysis>,
    pub coefficients: Option<GhzDiagonalCoefficients>,
    pub pairs: Vec<DistillabilityVerdict>,
    pub warnings: Vec<String>,
}

/// Full scan of a state: PT facts for every bipartition, plus class-based
/// verdicts when the state is a qubit GHZ-diagonal state. `groups` lists the
/// parties treated as one player in the pairwise table (every pair of groups
/// is reported).
pub fn classify(state: &MultipartiteState, groups: &[Vec<String>], threshold: f64) -> Result<Classification> {
    let sys = state.system();
    let mut warnings = Vec::new();
    let coefficients = if sys.is_qubits() {
        let c = ghz_diagonal_coefficients(state)?;
        if !c.is_ghz_diagonal() {
            warnings.push(format!(
                "state is not GHZ-diagonal (residual {:e}); reporting partial-transpose facts only",
                c.offdiagonal_residual
            ));
            None
        } else {
            if c.asymmetry_flag {
                warnings.push("λ_j⁺ ≠ λ_j⁻ for some j; coefficients were symmetrized".into());
            }
            Some(c)
        }
    } else {
        warnings.push("not an all-qubit system; reporting partial-transpose facts only".into());
        None
    };

    let mut cuts = Vec::new();
    for cut in all_cuts(sys) {
        let eigen = ppt_check_with_threshold(state, &cut, threshold)?;
        let (ghz_index, criterion_npt, separable) = match &coefficients {
            Some(c) => {
                let npt = npt_criterion(c, &cut)?;
                (Some(cut_to_index(&cut, sys)?), Some(npt), Some(!npt))
            }
            None => (None, None, None),
        };
        cuts.push(CutAnalysis {
            eigen,
            ghz_index,
            criterion_npt,
            separable,
        });
    }
    if cuts.iter().any(|c| c.methods_agree() == Some(false)) {
        warnings.push("eigensolver and coefficient criterion disagree on some cut".into());
    }

    let mut pairs = Vec::new();
    if let Some(c) = &coefficients {
        for (i, a) in groups.iter().enumerate() {
            for b in &groups[i + 1..] {
                pairs.push(pairwise_distillability(c, a, b)?);
            }
        }
    }
    Ok(Classification {
        cuts,
        coefficients,
        pairs,
        warnings,
    })
}

/// One recorded step of [`localize_entanglement`].
#[derive(Debug, Clone, PartialEq)]
pub enum LocalizationStep {
    /// Rank-one projection `|φ⟩⟨φ|` on `party`, outcome probability attached.
    Project {
        party: String,
        vector: ComplexMatrix,
        probability: f64,
    },
    /// Condition (i) held at `keeper`: the listed parties already share a
    /// common product state with the rest and are dropped.
    FactorOut {
        keeper: String,
        parties: Vec<String>,
        state: ComplexMatrix,
    },
    /// Local filter `diag(c₂/c₁, 1)` in the Schmidt basis of `party`.
    Filter { party: String, probability: f64 },
}

#[derive(Debug, Clone)]
pub struct LocalizationOutcome {
    pub steps: Vec<LocalizationStep>,
    pub sender: String,
    pub receiver: String,
    /// Two-party state before filtering.
    pub unfiltered: PureState,
    /// Balanced two-party state after filtering.
    pub state: PureState,
    pub projection_probability: f64,
    pub filter_probability: f64,
    /// Single-party marginal purities of every party outside the final pair,
    /// computed from the globally projected state.
    pub bystander_purities: Vec<(String, f64)>,
}

impl LocalizationOutcome {
    pub fn success_probability(&self) -> f64 {
        self.projection_probability * self.filter_probability
    }
}

/// Contracts `parties` of `state` with `⟨bra|`, returning the unnormalized
/// remainder on the other parties (in system order).
fn contract(state: &PureState, parties: &[String], bra: &ComplexMatrix) -> Result<(PartySystem, ComplexMatrix)> {
    let sys = state.system();
    let rest: Vec<String> = sys.labels().iter().filter(|l| !parties.contains(l)).cloned().collect();
    let order: Vec<String> = parties.iter().chain(&rest).cloned().collect();
    let (ordered, v) = permute_vector(state.vector(), sys, &order)?;
    let k = parties.len();
    let head = ordered.select(&(0..k).collect::<Vec<_>>());
    let tail = ordered.select(&(k..ordered.len()).collect::<Vec<_>>());
    let (dh, dt) = (head.total_dim(), tail.total_dim());
    if bra.rows() != dh {
        return Err(Error::DimensionMismatch("contraction vector has wrong length".into()));
    }
    let mut out = ComplexMatrix::zeros(dt, 1);
    for h in 0..dh {
        let b = bra[(h, 0)].conj();
        if b == C64::new(0.0, 0.0) {
            continue;
        }
        for t in 0..dt {
            out[(t, 0)] += b * v[(h * dt + t, 0)];
        }
    }
    Ok((tail, out))
}

/// Applies `|φ⟩⟨φ|` on `party` of the full state and renormalizes.
fn project_in_place(state: &PureState, party: &str, phi: &ComplexMatrix) -> Result<PureState> {
    let sys = state.system();
    let p = sys.position(party)?;
    let n = sys.total_dim();
    let mut out = ComplexMatrix::zeros(n, 1);
    for idx in 0..n {
        let digits = sys.digits(idx);
        let mut overlap = C64::new(0.0, 0.0);
        let mut src = digits.clone();
        for k in 0..sys.dims()[p] {
            src[p] = k;
            overlap += phi[(k, 0)].conj() * state.vector()[(sys.compose(&src), 0)];
        }
        out[(idx, 0)] = phi[(digits[p], 0)] * overlap;
    }
    PureState::normalized(sys.clone(), out)
}

fn candidate_projectors(dim: usize) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = (0..dim).map(|k| ComplexMatrix::basis_ket(dim, k)).collect();
    let amp = 1.0 / (dim as f64).sqrt();
    out.push(ComplexMatrix::column(vec![C64::new(amp, 0.0); dim]));
    out.push(ComplexMatrix::column(
        (0..dim).map(|k| C64::new(0.0, 1.0).powu(k as u32) * amp).collect(),
    ));
    out
}

/// Marginal of a column vector on `system` after tracing `traced`.
fn vector_marginal(system: &PartySystem, v: &ComplexMatrix, traced: &[String]) -> Result<ComplexMatrix> {
    let (_, m) = crate::states::partial_trace_operator(&v.outer_self(), system, traced)?;
    Ok(m)
}

fn purity(m: &ComplexMatrix) -> f64 {
    m.data().iter().map(|z| z.norm_sqr()).sum()
}

/// Whether `a0` and `a1` are nonzero and not proportional.
fn branches_distinct(a0: &ComplexMatrix, a1: &ComplexMatrix) -> bool {
    let (n0, n1) = (a0.frobenius_norm(), a1.frobenius_norm());
    if n0 < SCHMIDT_RANK_TOL || n1 < SCHMIDT_RANK_TOL {
        return false;
    }
    let ov = a0.inner(a1).expect("equal lengths").norm() / (n0 * n1);
    // Gram determinant relative to the diagonal product: 1 − |overlap|².
    let gram_rel_det = 1.0 - ov * ov;
    ov < 1.0 - DISTINCTNESS_TOL && gram_rel_det > 1e-12
}

struct Localizer {
    current: PureState,
    full: PureState,
    steps: Vec<LocalizationStep>,
    probability: f64,
    rng: ChaCha8Rng,
}

impl Localizer {
    /// Shrinks `side` to a single party, keeping Schmidt rank 2 against `other`.
    fn reduce(&mut self, side: &mut Vec<String>) -> Result<()> {
        while side.len() > 1 {
            let sys = self.current.system().clone();
            let cut = BipartiteCut::new(&sys, side)?;
            let sd = schmidt_decomposition(&self.current, &cut)?;
            if sd.rank() != 2 {
                return Err(Error::NotSchmidtRank2(sd.rank()));
            }
            let branch_sys = sd.left_system.clone();
            let (chi0, chi1) = (&sd.left[0], &sd.left[1]);
            let p = side[0].clone();
            let rest: Vec<String> = branch_sys.labels().iter().filter(|l| **l != p).cloned().collect();

            // Condition (i): both branches equal φ_k ⊗ Φ₀ with a common Φ₀.
            let m0 = vector_marginal(&branch_sys, chi0, std::slice::from_ref(&p))?;
            let m1 = vector_marginal(&branch_sys, chi1, std::slice::from_ref(&p))?;
            if purity(&m0) >= 1.0 - PURITY_TOL
                && purity(&m1) >= 1.0 - PURITY_TOL
                && m0.frobenius_distance(&m1)? < DISTINCTNESS_TOL
            {
                let eig = hermitian_eig(&m0)?;
                let common = eig.eigenvectors.column_at(eig.eigenvectors.cols() - 1);
                let (rest_sys, v) = contract(&self.current, &rest, &common)?;
                self.current = PureState::normalized(rest_sys, v)?;
                self.steps.push(LocalizationStep::FactorOut {
                    keeper: p.clone(),
                    parties: rest,
                    state: common,
                });
                side.retain(|l| *l == p);
                return Ok(());
            }

            let dim = sys.dim_of(&p)?;
            let chosen = self.find_projector(&branch_sys, &p, chi0, chi1, dim)?;
            let (rest_sys, v) = contract(&self.current, std::slice::from_ref(&p), &chosen)?;
            let prob = v.frobenius_norm().powi(2);
            self.current = PureState::normalized(rest_sys, v)?;
            self.full = project_in_place(&self.full, &p, &chosen)?;
            self.probability *= prob;
            self.steps.push(LocalizationStep::Project {
                party: p.clone(),
                vector: chosen,
                probability: prob,
            });
            side.remove(0);
        }
        Ok(())
    }

    fn find_projector(
        &mut self,
        branch_sys: &PartySystem,
        party: &str,
        chi0: &ComplexMatrix,
        chi1: &ComplexMatrix,
        dim: usize,
    ) -> Result<ComplexMatrix> {
        let b0 = PureState::new(branch_sys.clone(), chi0.clone())?;
        let b1 = PureState::new(branch_sys.clone(), chi1.clone())?;
        let party = [party.to_string()];
        let deterministic = candidate_projectors(dim);
        let mut random = (0..MAX_RANDOM_PROJECTORS).map(|_| random::unit_vector(dim, &mut self.rng));
        for phi in deterministic.into_iter().chain(&mut random) {
            let (_, a0) = contract(&b0, &party, &phi)?;
            let (_, a1) = contract(&b1, &party, &phi)?;
            if branches_distinct(&a0, &a1) {
                return Ok(phi);
            }
        }
        Err(Error::LocalizationFailed(party[0].clone()))
    }
}

/// Turns a state of Schmidt rank 2 across `senders | receivers` into a
/// maximally entangled pair shared by one sender and one receiver using
/// rank-one local projections followed by a local filter.
///
/// Parties are reduced senders first, then receivers, each in the given
/// order; the last surviving party of each group forms the pair.
pub fn localize_entanglement<S: AsRef<str>>(
    phi: &PureState,
    senders: &[S],
    receivers: &[S],
) -> Result<LocalizationOutcome> {
    let sys = phi.system();
    let mut senders: Vec<String> = senders.iter().map(|s| s.as_ref().to_string()).collect();
    let mut receivers: Vec<String> = receivers.iter().map(|s| s.as_ref().to_string()).collect();
    if let Some(l) = senders.iter().find(|l| receivers.contains(l)) {
        return Err(Error::OverlappingGroups(l.clone()));
    }
    let cut = BipartiteCut::from_sides(sys, &senders, &receivers)?;
    let rank = schmidt_decomposition(phi, &cut)?.rank();
    if rank != 2 {
        return Err(Error::NotSchmidtRank2(rank));
    }

    let mut loc = Localizer {
        current: phi.clone(),
        full: phi.clone(),
        steps: Vec::new(),
        probability: 1.0,
        rng: ChaCha8Rng::seed_from_u64(PROJECTOR_SEED),
    };
    loc.reduce(&mut senders)?;
    loc.reduce(&mut receivers)?;

    let (sender, receiver) = (senders.remove(0), receivers.remove(0));
    let unfiltered = loc.current.permuted(&[&sender, &receiver])?;
    let (state, filter_probability) = filter_to_maximally_entangled(&unfiltered)?;
    loc.steps.push(LocalizationStep::Filter {
        party: sender.clone(),
        probability: filter_probability,
    });

    let full_rho = loc.full.density();
    let mut bystander_purities = Vec::new();
    for l in sys.labels().iter().filter(|l| **l != sender && **l != receiver) {
        let others: Vec<&String> = sys.labels().iter().filter(|o| *o != l).collect();
        let marginal = partial_trace(&full_rho, &others)?;
        let p = marginal.purity();
        if p < 1.0 - PURITY_TOL {
            return Err(Error::LocalizationFailed(format!("{l} left entangled (purity {p})")));
        }
        bystander_purities.push((l.clone(), p));
    }

    Ok(LocalizationOutcome {
        steps: loc.steps,
        sender,
        receiver,
        unfiltered,
        state,
        projection_probability: loc.probability,
        filter_probability,
        bystander_purities,
    })
}

/// Local filter that equalizes the two Schmidt coefficients of a rank-2
/// two-party state. Returns the balanced state and the success probability
/// `2c₂²`.
pub fn filter_to_maximally_entangled(phi: &PureState) -> Result<(PureState, f64)> {
    let sys = phi.system();
    if sys.len() != 2 {
        return Err(Error::DimensionMismatch(format!("expected two parties, got {sys}")));
    }
    let cut = BipartiteCut::new(sys, &sys.labels()[..1])?;
    let sd = schmidt_decomposition(phi, &cut)?;
    if sd.rank() != 2 {
        return Err(Error::NotRank2(sd.rank()));
    }
    let (c1, c2) = (sd.coefficients[0], sd.coefficients[1]);
    // F = (c₂/c₁)|u₁⟩⟨u₁| + (I − |u₁⟩⟨u₁|) on the first party.
    let d = sys.dims()[0];
    let u1 = &sd.left[0];
    let filter = &ComplexMatrix::identity(d) - &u1.outer_self().scale_real(1.0 - c2 / c1);
    let op = filter.kron(&ComplexMatrix::identity(sys.dims()[1]));
    let out = &op * phi.vector();
    let probability = out.frobenius_norm().powi(2);
    Ok((PureState::normalized(sys.clone(), out)?, probability))
}

/// For a maximally entangled two-qubit state, the receiver unitary `U` with
/// `(I ⊗ U)|φ⟩ = |Φ⁺⟩`, together with the rotated state.
pub fn align_to_phi_plus(phi: &PureState) -> Result<(ComplexMatrix, PureState)> {
    let sys = phi.system();
    if sys.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!("expected two qubits, got {sys}")));
    }
    let cut = BipartiteCut::new(sys, &sys.labels()[..1])?;
    let sd = schmidt_decomposition(phi, &cut)?;
    if sd.rank() != 2 {
        return Err(Error::NotRank2(sd.rank()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    if sd.coefficients.iter().any(|c| (c - h).abs() > 1e-9) {
        return Err(Error::InvalidState("state is not maximally entangled".into()));
    }
    // U = Σ_k |u_k*⟩⟨v_k|, using Σ_k |u_k⟩|u_k*⟩ = Σ_i |i⟩|i⟩.
    let mut u = ComplexMatrix::zeros(2, 2);
    for k in 0..2 {
        u = &u + &(&sd.left[k].conj() * &sd.right[k].dagger());
    }
    let rotated = &ComplexMatrix::identity(2).kron(&u) * phi.vector();
    Ok((u, PureState::normalized(sys.clone(), rotated)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use crate::states::{basis_projector, max_entangled_on};

    fn four() -> PartySystem {
        PartySystem::qubits(["A1", "B", "A2", "C"]).unwrap()
    }

    fn cut(side: &[&str]) -> BipartiteCut {
        BipartiteCut::new(&four(), side).unwrap()
    }

    #[test]
    fn cut_index_convention() {
        let s = four();
        assert_eq!(cut_to_index(&cut(&["A1", "A2"]), &s).unwrap(), 0b101);
        assert_eq!(cut_to_index(&cut(&["B", "C"]), &s).unwrap(), 0b101);
        assert_eq!(cut_to_index(&cut(&["B"]), &s).unwrap(), 0b010);
        assert_eq!(cut_to_index(&cut(&["C"]), &s).unwrap(), 0b111);
        let mut seen: Vec<usize> = all_cuts(&s).iter().map(|c| cut_to_index(c, &s).unwrap()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (1..8).collect::<Vec<_>>());
    }

    #[test]
    fn two_qubit_examples() {
        let s = PartySystem::qubits(["A", "B"]).unwrap();
        let classical = MultipartiteState::new(
            s.clone(),
            (&basis_projector(&s, "00").unwrap() + &basis_projector(&s, "11").unwrap()).scale_real(0.5),
        )
        .unwrap();
        assert!(two_qubit_separability(&classical).unwrap());
        let bell = max_entangled_on(2, "A", "B").unwrap().density();
        assert!(!two_qubit_separability(&bell).unwrap());
        // Werner-type mixture: ½ I/4 + ½ |Φ⁺⟩⟨Φ⁺| has PT eigenvalue 1/8 − 1/4.
        let werner = MultipartiteState::new(
            s.clone(),
            &ComplexMatrix::identity(4).scale_real(0.125) + &bell.matrix().scale_real(0.5),
        )
        .unwrap();
        let v = ppt_check(&werner, &BipartiteCut::new(&s, &["A"]).unwrap()).unwrap();
        assert!((v.min_eigenvalue - (0.125 - 0.25)).abs() < 1e-14);
        assert!(!two_qubit_separability(&werner).unwrap());
        let three = MultipartiteState::maximally_mixed(PartySystem::qubits(["A", "B", "C"]).unwrap());
        assert!(matches!(
            two_qubit_separability(&three),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pure_ghz_coefficients() {
        let s = four();
        let psi = ghz_basis_state(&s, 0, GhzSign::Plus).unwrap().density();
        let c = ghz_diagonal_coefficients(&psi).unwrap();
        assert!((c.lambda0_plus - 1.0).abs() < 1e-15);
        assert!(c.lambda0_minus.abs() < 1e-15);
        assert!((c.delta - 1.0).abs() < 1e-15);
        assert!(c.lambdas.values().all(|l| l.abs() < 1e-15));
        assert!((c.normalization() - 1.0).abs() < 1e-12);
        assert!(c.offdiagonal_residual < 1e-14);
    }

    #[test]
    fn non_qubit_rejected() {
        let s = PartySystem::new(["A", "B"], vec![2, 3]).unwrap();
        let rho = MultipartiteState::maximally_mixed(s);
        assert!(matches!(ghz_diagonal_coefficients(&rho), Err(Error::NotQubits)));
    }

    #[test]
    fn criterion_requires_ghz_diagonal() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random::density(&four(), &mut rng);
        let c = ghz_diagonal_coefficients(&rho).unwrap();
        assert!(c.offdiagonal_residual > GHZ_RESIDUAL_TOL);
        assert!(matches!(npt_criterion(&c, &cut(&["B"])), Err(Error::NotGhzDiagonal(_))));
        let report = classify(&rho, &[], POSITIVITY_TOL).unwrap();
        assert!(report.coefficients.is_none());
        assert!(report.cuts.iter().all(|c| c.separable.is_none()));
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn pt_spectrum_formula_matches_eigensolver() {
        let s = four();
        let mut plus = vec![0.3, 0.05, 0.02, 0.04, 0.01, 0.06, 0.03, 0.02];
        let mut minus = plus.clone();
        minus[0] = 0.08;
        let total: f64 = plus.iter().sum::<f64>() + minus.iter().sum::<f64>();
        plus.iter_mut().chain(minus.iter_mut()).for_each(|w| *w /= total);
        let rho = ghz_diagonal_state(&s, &plus, &minus).unwrap();
        let c = ghz_diagonal_coefficients(&rho).unwrap();
        for k in all_cuts(&s) {
            let predicted = c.pt_spectrum(&k).unwrap();
            let actual = hermitian_eig(&partial_transpose(&rho, &k).unwrap())
                .unwrap()
                .eigenvalues;
            for (a, b) in predicted.iter().zip(&actual) {
                assert!((a - b).abs() < 1e-13, "cut {k}: {predicted:?} vs {actual:?}");
            }
        }
    }

    #[test]
    fn overlapping_groups_rejected() {
        let s = four();
        let psi = ghz_basis_state(&s, 0, GhzSign::Plus).unwrap().density();
        let c = ghz_diagonal_coefficients(&psi).unwrap();
        assert!(matches!(
            pairwise_distillability(&c, &["A1", "B"], &["B"]),
            Err(Error::OverlappingGroups(_))
        ));
    }

    #[test]
    fn filter_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = max_entangled_on(2, "A", "B").unwrap();
        let (out, p) = filter_to_maximally_entangled(&bell).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
        assert!((out.overlap(&bell).unwrap() - 1.0).abs() < 1e-14);

        let s = PartySystem::qubits(["A", "B"]).unwrap();
        let skew = PureState::new(
            s.clone(),
            ComplexMatrix::column(vec![
                c64(0.9f64.sqrt(), 0.0),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(0.1f64.sqrt(), 0.0),
            ]),
        )
        .unwrap();
        let (out, p) = filter_to_maximally_entangled(&skew).unwrap();
        // Direct arithmetic: diag(√(0.1/0.9), 1) on A gives amplitudes √0.1, √0.1.
        assert!((p - 0.2).abs() < 1e-14);
        assert!((out.amplitudes()[0].re - h).abs() < 1e-14 && (out.amplitudes()[3].re - h).abs() < 1e-14);

        let product = PureState::new(s, ComplexMatrix::basis_ket(4, 0)).unwrap();
        assert!(matches!(
            filter_to_maximally_entangled(&product),
            Err(Error::NotRank2(1))
        ));
    }

    #[test]
    fn ghz_localizes_with_plus_projection() {
        let s = PartySystem::qubits(["A", "B1", "B2"]).unwrap();
        let ghz = ghz_basis_state(&s, 0, GhzSign::Plus).unwrap();
        let out = localize_entanglement(&ghz, &["A"], &["B1", "B2"]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match &out.steps[0] {
            LocalizationStep::Project {
                party,
                vector,
                probability,
            } => {
                assert_eq!(party, "B1");
                let plus = ComplexMatrix::column(vec![c64(h, 0.0), c64(h, 0.0)]);
                assert!(vector.frobenius_distance(&plus).unwrap() < 1e-15);
                assert!((probability - 0.5).abs() < 1e-14);
            }
            other => panic!("unexpected step {other:?}"),
        }
        assert_eq!((out.sender.as_str(), out.receiver.as_str()), ("A", "B2"));
        assert!((out.filter_probability - 1.0).abs() < 1e-12);
        let bell = max_entangled_on(2, "A", "B2").unwrap();
        assert!((out.state.overlap(&bell).unwrap() - 1.0).abs() < 1e-12);
        assert!(out.bystander_purities.iter().all(|(_, p)| *p >= 1.0 - PURITY_TOL));
    }

    #[test]
    fn product_state_is_not_rank_two() {
        let s = PartySystem::qubits(["A", "B"]).unwrap();
        let product = PureState::new(s, ComplexMatrix::basis_ket(4, 0)).unwrap();
        assert!(matches!(
            localize_entanglement(&product, &["A"], &["B"]),
            Err(Error::NotSchmidtRank2(1))
        ));
    }

    #[test]
    fn condition_i_factors_out_spectators() {
        // |χ_k⟩ = |k⟩_A1 ⊗ |+⟩_A2, so A1 keeps the information.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = PartySystem::qubits(["A1", "A2", "B"]).unwrap();
        let mut v = ComplexMatrix::zeros(8, 1);
        // (|0⟩|+⟩|0⟩ + |1⟩|+⟩|1⟩)/√2
        for (a1, b) in [(0usize, 0usize), (1, 1)] {
            for a2 in 0..2 {
                v[((a1 << 2) | (a2 << 1) | b, 0)] = c64(0.5 * h * 2f64.sqrt() * h, 0.0);
            }
        }
        let phi = PureState::normalized(s, v).unwrap();
        let out = localize_entanglement(&phi, &["A1", "A2"], &["B"]).unwrap();
        assert!(matches!(&out.steps[0], LocalizationStep::FactorOut { keeper, .. } if keeper == "A1"));
        assert_eq!(out.sender, "A1");
        assert!((out.projection_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn align_rotates_onto_phi_plus() {
        let s = PartySystem::qubits(["A", "B"]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // (|01⟩ − i|10⟩)/√2
        let psi = PureState::new(
            s,
            ComplexMatrix::column(vec![c64(0.0, 0.0), c64(h, 0.0), c64(0.0, -h), c64(0.0, 0.0)]),
        )
        .unwrap();
        let (u, aligned) = align_to_phi_plus(&psi).unwrap();
        assert!(
            (&u * &u.dagger())
                .frobenius_distance(&ComplexMatrix::identity(2))
                .unwrap()
                < 1e-14
        );
        let bell = max_entangled_on(2, "A", "B").unwrap();
        assert!((aligned.overlap(&bell).unwrap() - 1.0).abs() < 1e-14);
        assert!(aligned.vector().inner(bell.vector()).unwrap().re > 1.0 - 1e-14);
    }
}
