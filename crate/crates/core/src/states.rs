//! Multipartite density operators and pure states with party bookkeeping.
//!
//! Basis indices are big-endian: the first party in a [`PartySystem`] is the
//! most significant digit. All index juggling (partial trace, partial
//! transpose, party permutation) goes through [`PartySystem::digits`] and
//! [`PartySystem::compose`].

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, svd, ComplexMatrix, C64, HERMITICITY_TOL, POSITIVITY_TOL};

/// Trace of a density operator must be 1 within this.
pub const TRACE_TOL: f64 = 1e-10;

/// Unit-norm tolerance for pure state vectors.
pub const NORM_TOL: f64 = 1e-12;

/// Schmidt coefficients at or below this count as zero.
pub const SCHMIDT_RANK_TOL: f64 = 1e-9;

/// Ordered party labels with their local dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartySystem {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl PartySystem {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, dims: Vec<usize>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSystem("no parties".into()));
        }
        if labels.len() != dims.len() {
            return Err(Error::InvalidSystem(format!(
                "{} labels but {} dimensions",
                labels.len(),
                dims.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if l.is_empty() {
                return Err(Error::InvalidSystem("empty party label".into()));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSystem(format!("duplicate label `{l}`")));
            }
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSystem(format!("local dimension {d} < 2")));
        }
        Ok(Self { labels, dims })
    }

    /// All-qubit system.
    pub fn qubits<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        Self::new(labels, vec![2; n])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownParty(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Big-endian digits of a flat basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn compose(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Sub-system made of the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> PartySystem {
        PartySystem {
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
            dims: positions.iter().map(|&p| self.dims[p]).collect(),
        }
    }

    /// Positions of `order` labels; errors unless `order` is a permutation.
    pub fn permutation_of(&self, order: &[String]) -> Result<Vec<usize>> {
        if order.len() != self.len() {
            return Err(Error::BadPermutation(format!(
                "expected {} labels, got {}",
                self.len(),
                order.len()
            )));
        }
        let mut seen = BTreeSet::new();
        order
            .iter()
            .map(|l| {
                if !seen.insert(l.as_str()) {
                    return Err(Error::BadPermutation(format!("label `{l}` repeated")));
                }
                self.position(l)
                    .map_err(|_| Error::BadPermutation(format!("unknown label `{l}`")))
            })
            .collect()
    }

    fn positions_of(&self, labels: &[String]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.position(l)).collect()
    }
}

impl fmt::Display for PartySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.dims)
            .map(|(l, d)| format!("{l}:{d}"))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Two-block partition of a party set. Partial transposition acts on
/// `side_one`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BipartiteCut {
    pub side_one: Vec<String>,
    pub side_two: Vec<String>,
}

impl BipartiteCut {
    /// Cut with `side_one` as given and `side_two` its complement; both sides
    /// listed in system order.
    pub fn new<S: AsRef<str>>(system: &PartySystem, side_one: &[S]) -> Result<Self> {
        let mut chosen = BTreeSet::new();
        for l in side_one {
            let l = l.as_ref();
            system.position(l)?;
            if !chosen.insert(l.to_string()) {
                return Err(Error::InvalidCut(format!("label `{l}` repeated")));
            }
        }
        let (one, two): (Vec<String>, Vec<String>) = system.labels.iter().cloned().partition(|l| chosen.contains(l));
        if one.is_empty() || two.is_empty() {
            return Err(Error::InvalidCut("both sides must be nonempty".into()));
        }
        Ok(Self {
            side_one: one,
            side_two: two,
        })
    }

    /// Cut from both sides explicitly; they must be disjoint and cover the system.
    pub fn from_sides<S: AsRef<str>>(system: &PartySystem, side_one: &[S], side_two: &[S]) -> Result<Self> {
        let cut = Self::new(system, side_one)?;
        let two: BTreeSet<&str> = side_two.iter().map(AsRef::as_ref).collect();
        let expected: BTreeSet<&str> = cut.side_two.iter().map(String::as_str).collect();
        if two != expected || two.len() != side_two.len() {
            return Err(Error::InvalidCut("sides must be disjoint and cover all parties".into()));
        }
        Ok(cut)
    }

    pub fn swapped(&self) -> BipartiteCut {
        BipartiteCut {
            side_one: self.side_two.clone(),
            side_two: self.side_one.clone(),
        }
    }

    pub fn contains(&self, label: &str) -> bool {
        self.side_one.iter().any(|l| l == label)
    }

    pub fn validate(&self, system: &PartySystem) -> Result<()> {
        Self::from_sides(system, &self.side_one, &self.side_two).map(|_| ())
    }
}

impl fmt::Display for BipartiteCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.side_one.join(","), self.side_two.join(","))
    }
}

/// All `2^(N−1) − 1` bipartitions, each with `side_one` the block that does
/// not contain the last party, in increasing order of that block's bit mask.
pub fn all_cuts(system: &PartySystem) -> Vec<BipartiteCut> {
    let n = system.len();
    if n < 2 {
        return Vec::new();
    }
    (1..(1usize << (n - 1)))
        .map(|mask| {
            let side: Vec<&String> = (0..n - 1)
                .filter(|&i| mask >> (n - 2 - i) & 1 == 1)
                .map(|i| &system.labels[i])
                .collect();
            BipartiteCut::new(system, &side).expect("mask yields a proper cut")
        })
        .collect()
}

/// Reorders the parties of an operator on `system` into `order`.
pub fn permute_operator(
    m: &ComplexMatrix,
    system: &PartySystem,
    order: &[String],
) -> Result<(PartySystem, ComplexMatrix)> {
    let perm = system.permutation_of(order)?;
    let target = system.select(&perm);
    let n = system.total_dim();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, system dimension {n}",
            m.rows(),
            m.cols()
        )));
    }
    let map = index_map(system, &target, &perm);
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(r, c)] = m[(map[r], map[c])];
        }
    }
    Ok((target, out))
}

/// Reorders the parties of a column vector on `system` into `order`.
pub fn permute_vector(
    v: &ComplexMatrix,
    system: &PartySystem,
    order: &[String],
) -> Result<(PartySystem, ComplexMatrix)> {
    let perm = system.permutation_of(order)?;
    let target = system.select(&perm);
    let n = system.total_dim();
    if v.rows() != n || v.cols() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} vs system dimension {n}",
            v.rows()
        )));
    }
    let map = index_map(system, &target, &perm);
    Ok((target, ComplexMatrix::column(map.iter().map(|&k| v[(k, 0)]).collect())))
}

/// For each flat index of `target`, the flat index of `source` holding the
/// same basis state (`target` party k is `source` party `perm[k]`).
fn index_map(source: &PartySystem, target: &PartySystem, perm: &[usize]) -> Vec<usize> {
    (0..target.total_dim())
        .map(|t| {
            let td = target.digits(t);
            let mut sd = vec![0; perm.len()];
            for (k, &p) in perm.iter().enumerate() {
                sd[p] = td[k];
            }
            source.compose(&sd)
        })
        .collect()
}

/// Partial trace of an arbitrary operator (not necessarily a state).
pub fn partial_trace_operator<S: AsRef<str>>(
    m: &ComplexMatrix,
    system: &PartySystem,
    traced: &[S],
) -> Result<(PartySystem, ComplexMatrix)> {
    let mut traced_pos = BTreeSet::new();
    for l in traced {
        traced_pos.insert(system.position(l.as_ref())?);
    }
    let kept: Vec<usize> = (0..system.len()).filter(|p| !traced_pos.contains(p)).collect();
    if kept.is_empty() {
        return Err(Error::NothingLeft);
    }
    let gone: Vec<usize> = traced_pos.into_iter().collect();
    let kept_sys = system.select(&kept);
    let gone_sys = system.select(&gone);
    let dk = kept_sys.total_dim();
    let mut out = ComplexMatrix::zeros(dk, dk);
    let mut digits = vec![0; system.len()];
    for r in 0..dk {
        let rd = kept_sys.digits(r);
        for c in 0..dk {
            let cd = kept_sys.digits(c);
            let mut acc = C64::new(0.0, 0.0);
            for g in 0..gone_sys.total_dim() {
                let gd = gone_sys.digits(g);
                for (&p, &x) in gone.iter().zip(&gd) {
                    digits[p] = x;
                }
                for (&p, &x) in kept.iter().zip(&rd) {
                    digits[p] = x;
                }
                let ri = system.compose(&digits);
                for (&p, &x) in kept.iter().zip(&cd) {
                    digits[p] = x;
                }
                let ci = system.compose(&digits);
                acc += m[(ri, ci)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok((kept_sys, out))
}

/// Partial transpose of an arbitrary operator on the parties in `side`.
pub fn partial_transpose_operator(m: &ComplexMatrix, system: &PartySystem, side: &[String]) -> Result<ComplexMatrix> {
    let pos = system.positions_of(side)?;
    let n = system.total_dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let rd = system.digits(r);
        for c in 0..n {
            let cd = system.digits(c);
            let (mut nr, mut nc) = (rd.clone(), cd.clone());
            for &p in &pos {
                nr[p] = cd[p];
                nc[p] = rd[p];
            }
            out[(system.compose(&nr), system.compose(&nc))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// A density operator on a labelled multipartite system.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteState {
    system: PartySystem,
    matrix: ComplexMatrix,
}

impl MultipartiteState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(system: PartySystem, matrix: ComplexMatrix) -> Result<Self> {
        let n = system.total_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but system {system} has dimension {n}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect()?;
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace()?;
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {} + {}i", tr.re, tr.im)));
        }
        let min = hermitian_eig(&matrix)?.eigenvalues[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("min eigenvalue {min:e}")));
        }
        Ok(Self { system, matrix })
    }

    /// Skips validation; callers guarantee a density operator.
    pub(crate) fn new_unchecked(system: PartySystem, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), system.total_dim());
        Self { system, matrix }
    }

    pub fn from_pure(phi: &PureState) -> Self {
        Self::new_unchecked(phi.system.clone(), phi.vector.outer_self())
    }

    pub fn maximally_mixed(system: PartySystem) -> Self {
        let n = system.total_dim();
        Self::new_unchecked(system, ComplexMatrix::identity(n).scale_real(1.0 / n as f64))
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_parts(self) -> (PartySystem, ComplexMatrix) {
        (self.system, self.matrix)
    }

    /// Same state with parties reordered to `order`.
    pub fn permuted<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let order: Vec<String> = order.iter().map(|s| s.as_ref().to_string()).collect();
        let (system, matrix) = permute_operator(&self.matrix, &self.system, &order)?;
        Ok(Self::new_unchecked(system, matrix))
    }

    /// Same state with party labels renamed (order and dims unchanged).
    pub fn relabeled<S: Into<String>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let system = PartySystem::new(labels, self.system.dims.clone())?;
        Ok(Self::new_unchecked(system, self.matrix.clone()))
    }

    pub fn partial_transpose(&self, cut: &BipartiteCut) -> Result<ComplexMatrix> {
        partial_transpose(self, cut)
    }

    pub fn partial_trace<S: AsRef<str>>(&self, traced: &[S]) -> Result<MultipartiteState> {
        partial_trace(self, traced)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig(&self.matrix)
            .expect("stored states are Hermitian")
            .eigenvalues[0]
    }
}

/// A normalized state vector on a labelled system.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    system: PartySystem,
    vector: ComplexMatrix,
}

impl PureState {
    pub fn new(system: PartySystem, vector: ComplexMatrix) -> Result<Self> {
        if vector.cols() != 1 || vector.rows() != system.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector is {}x{}, system {system} has dimension {}",
                vector.rows(),
                vector.cols(),
                system.total_dim()
            )));
        }
        let norm = vector.frobenius_norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("vector norm {norm}")));
        }
        Ok(Self { system, vector })
    }

    /// Normalizes `vector`; errors on a (numerically) zero vector.
    pub fn normalized(system: PartySystem, vector: ComplexMatrix) -> Result<Self> {
        let norm = vector.frobenius_norm();
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(system, vector.scale_real(1.0 / norm))
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn vector(&self) -> &ComplexMatrix {
        &self.vector
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.vector.data()
    }

    pub fn density(&self) -> MultipartiteState {
        MultipartiteState::from_pure(self)
    }

    pub fn permuted<S: AsRef<str>>(&self, order: &[S]) -> Result<PureState> {
        let order: Vec<String> = order.iter().map(|s| s.as_ref().to_string()).collect();
        let (system, vector) = permute_vector(&self.vector, &self.system, &order)?;
        Ok(PureState { system, vector })
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        Ok(self.vector.inner(&other.vector)?.norm())
    }

    /// Product state `|self⟩ ⊗ |other⟩` on the concatenated system.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut labels = self.system.labels.clone();
        labels.extend(other.system.labels.iter().cloned());
        let mut dims = self.system.dims.clone();
        dims.extend(other.system.dims.iter().copied());
        let system = PartySystem::new(labels, dims)?;
        Ok(PureState {
            system,
            vector: self.vector.kron(&other.vector),
        })
    }
}

/// Sign of a GHZ basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GhzSign {
    Plus,
    Minus,
}

impl GhzSign {
    pub fn factor(self) -> f64 {
        match self {
            GhzSign::Plus => 1.0,
            GhzSign::Minus => -1.0,
        }
    }
}

/// Flat basis index for a digit string such as `"1010"` (one digit per party).
pub fn basis_index(system: &PartySystem, bits: &str) -> Result<usize> {
    let digits: Vec<usize> = bits
        .chars()
        .map(|ch| {
            ch.to_digit(36)
                .map(|d| d as usize)
                .ok_or_else(|| Error::IndexOutOfRange(format!("bad digit `{ch}` in `{bits}`")))
        })
        .collect::<Result<_>>()?;
    if digits.len() != system.len() {
        return Err(Error::IndexOutOfRange(format!(
            "`{bits}` has {} digits for {} parties",
            digits.len(),
            system.len()
        )));
    }
    if let Some((i, (&x, &d))) = digits.iter().zip(&system.dims).enumerate().find(|(_, (&x, &d))| x >= d) {
        return Err(Error::IndexOutOfRange(format!(
            "digit {x} for party `{}` with dimension {d}",
            system.labels[i]
        )));
    }
    Ok(system.compose(&digits))
}

/// Rank-one projector `|bits⟩⟨bits|`.
pub fn basis_projector(system: &PartySystem, bits: &str) -> Result<ComplexMatrix> {
    let k = basis_index(system, bits)?;
    Ok(ComplexMatrix::matrix_unit(system.total_dim(), k, k))
}

/// Parses an (N−1)-bit GHZ index such as `"101"` into an integer.
pub fn parse_ghz_index(bits: &str, n_parties: usize) -> Result<usize> {
    if bits.len() + 1 != n_parties || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::IndexOutOfRange(format!(
            "GHZ index `{bits}` must be {} bits",
            n_parties.saturating_sub(1)
        )));
    }
    Ok(usize::from_str_radix(bits, 2).expect("validated binary string"))
}

pub fn format_ghz_index(j: usize, n_parties: usize) -> String {
    format!("{:0width$b}", j, width = n_parties - 1)
}

/// `|Ψ_j^±⟩ = (|j,0⟩ ± |j̄,1⟩)/√2`, with the last party as reference bit.
pub fn ghz_basis_state(system: &PartySystem, j: usize, sign: GhzSign) -> Result<PureState> {
    if !system.is_qubits() {
        return Err(Error::DimensionMismatch("GHZ basis needs qubits".into()));
    }
    if system.len() < 2 {
        return Err(Error::DimensionMismatch("GHZ basis needs at least two qubits".into()));
    }
    let mask = (1usize << (system.len() - 1)) - 1;
    if j > mask {
        return Err(Error::IndexOutOfRange(format!("GHZ index {j} exceeds {mask}")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = ComplexMatrix::zeros(system.total_dim(), 1);
    v[(j << 1, 0)] = C64::new(h, 0.0);
    v[(((!j & mask) << 1) | 1, 0)] = C64::new(sign.factor() * h, 0.0);
    Ok(PureState {
        system: system.clone(),
        vector: v,
    })
}

/// `Σ_k |k⟩_A|k⟩_B / √d` on parties `A`, `B`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    max_entangled_on(d, "A", "B")
}

pub fn max_entangled_on(d: usize, left: &str, right: &str) -> Result<PureState> {
    let system = PartySystem::new([left, right], vec![d, d])?;
    let mut v = ComplexMatrix::zeros(d * d, 1);
    let amp = if d == 2 {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        1.0 / (d as f64).sqrt()
    };
    for k in 0..d {
        v[(k * d + k, 0)] = C64::new(amp, 0.0);
    }
    Ok(PureState { system, vector: v })
}

/// Transposes the indices of `cut.side_one`.
pub fn partial_transpose(state: &MultipartiteState, cut: &BipartiteCut) -> Result<ComplexMatrix> {
    cut.validate(&state.system)?;
    partial_transpose_operator(&state.matrix, &state.system, &cut.side_one)
}

pub fn partial_trace<S: AsRef<str>>(state: &MultipartiteState, traced: &[S]) -> Result<MultipartiteState> {
    let (system, matrix) = partial_trace_operator(&state.matrix, &state.system, traced)?;
    Ok(MultipartiteState::new_unchecked(system, matrix))
}

/// `⟨φ|ρ|φ⟩`.
pub fn fidelity(phi: &PureState, rho: &MultipartiteState) -> Result<f64> {
    if phi.system.total_dim() != rho.system.total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "pure state dimension {} vs density dimension {}",
            phi.system.total_dim(),
            rho.system.total_dim()
        )));
    }
    let rv = rho.matrix.matmul(&phi.vector)?;
    Ok(phi.vector.inner(&rv)?.re)
}

/// Schmidt form `Σ_k c_k |left_k⟩|right_k⟩` across a cut.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Descending, `min(d_one, d_two)` entries including zeros.
    pub coefficients: Vec<f64>,
    pub left: Vec<ComplexMatrix>,
    pub right: Vec<ComplexMatrix>,
    pub left_system: PartySystem,
    pub right_system: PartySystem,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&c| c > SCHMIDT_RANK_TOL).count()
    }

    /// `Σ_k c_k |left_k⟩ ⊗ |right_k⟩` over `left_system ++ right_system`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.left_system.total_dim() * self.right_system.total_dim();
        let mut acc = ComplexMatrix::zeros(n, 1);
        for ((c, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            acc = &acc + &l.kron(r).scale_real(*c);
        }
        acc
    }
}

/// Amplitude matrix `M[a][b] = ⟨a|⟨b|φ⟩` with rows over `cut.side_one`.
pub fn amplitude_matrix(phi: &PureState, cut: &BipartiteCut) -> Result<(PartySystem, PartySystem, ComplexMatrix)> {
    cut.validate(&phi.system)?;
    let order: Vec<String> = cut.side_one.iter().chain(&cut.side_two).cloned().collect();
    let (sys, v) = permute_vector(&phi.vector, &phi.system, &order)?;
    let k = cut.side_one.len();
    let left = sys.select(&(0..k).collect::<Vec<_>>());
    let right = sys.select(&(k..sys.len()).collect::<Vec<_>>());
    let m = ComplexMatrix::new(left.total_dim(), right.total_dim(), v.into_data())?;
    Ok((left, right, m))
}

pub fn schmidt_decomposition(phi: &PureState, cut: &BipartiteCut) -> Result<SchmidtDecomposition> {
    let (left_system, right_system, m) = amplitude_matrix(phi, cut)?;
    let s = svd(&m);
    let k = m.rows().min(m.cols());
    Ok(SchmidtDecomposition {
        coefficients: s.singular_values[..k].to_vec(),
        left: (0..k).map(|i| s.u.column_at(i)).collect(),
        // M = U Σ V†, so φ = Σ σ_k u_k ⊗ conj(v_k).
        right: (0..k).map(|i| s.v.column_at(i).conj()).collect(),
        left_system,
        right_system,
    })
}

/// Fixed-seed random states for property checks and test fixtures.
pub mod random {
    use rand::Rng;
    use rand_distr::StandardNormal;

    use super::{MultipartiteState, PartySystem, PureState};
    use crate::linalg::{ComplexMatrix, C64};

    pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
        let data = (0..rows * cols)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        ComplexMatrix::new(rows, cols, data).expect("finite gaussian samples")
    }

    /// Haar-random unit vector.
    pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
        let g = gaussian_matrix(dim, 1, rng);
        let n = g.frobenius_norm();
        g.scale_real(1.0 / n)
    }

    pub fn pure_state<R: Rng + ?Sized>(system: &PartySystem, rng: &mut R) -> PureState {
        PureState::new(system.clone(), unit_vector(system.total_dim(), rng)).expect("unit vector")
    }

    /// `G G† / tr(G G†)` with standard normal complex `G`.
    pub fn density<R: Rng + ?Sized>(system: &PartySystem, rng: &mut R) -> MultipartiteState {
        let n = system.total_dim();
        let g = gaussian_matrix(n, n, rng);
        let gg = &g * &g.dagger();
        let tr = gg.trace().expect("square").re;
        let m = gg.scale_real(1.0 / tr);
        // Symmetrize away round-off.
        let m = (&m + &m.dagger()).scale_real(0.5);
        MultipartiteState::new_unchecked(system.clone(), m)
    }
}
