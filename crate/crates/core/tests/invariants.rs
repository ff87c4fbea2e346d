use mpcap::channels::{action_distance, apply_operator, choi, choi_operator, kraus_from_choi, mix, KrausChannel};
use mpcap::codec::{channel_from_json, channel_to_json, state_from_json, state_to_json};
use mpcap::entanglement::{
    ghz_diagonal_coefficients, ghz_diagonal_state, localize_entanglement, npt_criterion, ppt_check, PURITY_TOL,
};
use mpcap::linalg::{hermitian_eig, ComplexMatrix, C64};
use mpcap::states::{
    all_cuts, partial_trace, partial_transpose_operator, random, schmidt_decomposition, BipartiteCut,
    MultipartiteState, PartySystem, PureState,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn hermitian(n: usize, r: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = random::gaussian_matrix(n, n, r);
    (&g + &g.dagger()).scale_real(0.5)
}

/// Isometry `V (V†V)^{-1/2}` cut into `k` Kraus blocks of shape `dout × din`.
fn random_channel(input: PartySystem, output: PartySystem, k: usize, r: &mut ChaCha8Rng) -> KrausChannel {
    let (din, dout) = (input.total_dim(), output.total_dim());
    let v = random::gaussian_matrix(k * dout, din, r);
    let eig = hermitian_eig(&(&v.dagger() * &v)).unwrap();
    let inv_sqrt = eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()).collect::<Vec<_>>();
    let s = &(&eig.eigenvectors * &ComplexMatrix::from_real_diagonal(&inv_sqrt)) * &eig.eigenvectors.dagger();
    let w = &v * &s;
    let kraus = (0..k)
        .map(|m| {
            let rows: Vec<Vec<C64>> = (0..dout)
                .map(|o| (0..din).map(|i| w[(m * dout + o, i)]).collect())
                .collect();
            ComplexMatrix::from_rows(&rows).unwrap()
        })
        .collect();
    KrausChannel::new("random", input, output, kraus).unwrap()
}

fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.frobenius_distance(b).unwrap() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random::gaussian_matrix(2, 3, &mut r);
        let b = random::gaussian_matrix(3, 2, &mut r);
        let c = random::gaussian_matrix(3, 2, &mut r);
        let d = random::gaussian_matrix(2, 4, &mut r);
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..=12) {
        let mut r = rng(seed);
        let m = hermitian(n, &mut r);
        let eig = hermitian_eig(&m).unwrap();
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = eig.eigenvalues.iter().sum();
        prop_assert!((tr - m.trace().unwrap().re).abs() < 1e-10);
        prop_assert!(close(&eig.reconstruct(), &m, 1e-10 * (1.0 + m.frobenius_norm())));
        let gram = &eig.eigenvectors.dagger() * &eig.eigenvectors;
        prop_assert!(close(&gram, &ComplexMatrix::identity(n), 1e-10));
    }

    #[test]
    fn partial_transpose_is_involutive_and_complement_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = PartySystem::new(["A", "B", "C"], vec![2, 3, 2]).unwrap();
        let rho = random::density(&sys, &mut r);
        for cut in all_cuts(&sys) {
            let once = partial_transpose_operator(rho.matrix(), &sys, &cut.side_one).unwrap();
            let twice = partial_transpose_operator(&once, &sys, &cut.side_one).unwrap();
            prop_assert!(close(&twice, rho.matrix(), 0.0));
            let a = ppt_check(&rho, &cut).unwrap().min_eigenvalue;
            let b = ppt_check(&rho, &cut.swapped()).unwrap().min_eigenvalue;
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_traces_commute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = PartySystem::new(["A", "B", "C"], vec![2, 3, 2]).unwrap();
        let rho = random::density(&sys, &mut r);
        let ab = partial_trace(&partial_trace(&rho, &["A"]).unwrap(), &["B"]).unwrap();
        let ba = partial_trace(&partial_trace(&rho, &["B"]).unwrap(), &["A"]).unwrap();
        let both = partial_trace(&rho, &["A", "B"]).unwrap();
        prop_assert!(close(ab.matrix(), ba.matrix(), 1e-14));
        prop_assert!(close(ab.matrix(), both.matrix(), 1e-14));
        prop_assert!((both.matrix().trace().unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_squares_are_reduced_spectrum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = PartySystem::new(["A", "B", "C"], vec![2, 2, 3]).unwrap();
        let phi = random::pure_state(&sys, &mut r);
        let cut = BipartiteCut::new(&sys, &["A", "C"]).unwrap();
        let sd = schmidt_decomposition(&phi, &cut).unwrap();
        prop_assert!(close(&sd.reconstruct(), phi.permuted(&["A", "C", "B"]).unwrap().vector(), 1e-12));
        let reduced = partial_trace(&phi.density(), &["B"]).unwrap();
        let mut spec = hermitian_eig(reduced.matrix()).unwrap().eigenvalues;
        spec.reverse();
        for (k, c) in sd.coefficients.iter().enumerate() {
            prop_assert!((c * c - spec[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_equals_choi_contraction(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = random_channel(
            PartySystem::qubits(["X"]).unwrap(),
            PartySystem::new(["Y"], vec![3]).unwrap(),
            3,
            &mut r,
        );
        let rho = random::density(ch.input(), &mut r);
        let (_, j) = choi_operator(&ch);
        let (din, dout) = (2, 3);
        let mut via_choi = ComplexMatrix::zeros(dout, dout);
        for i in 0..din {
            for k in 0..din {
                for o in 0..dout {
                    for p in 0..dout {
                        via_choi[(o, p)] += rho.matrix()[(i, k)] * j[(i * dout + o, k * dout + p)] * din as f64;
                    }
                }
            }
        }
        prop_assert!(close(&apply_operator(&ch, rho.matrix()).unwrap(), &via_choi, 1e-12));
    }

    #[test]
    fn kraus_choi_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = random_channel(
            PartySystem::qubits(["X1", "X2"]).unwrap(),
            PartySystem::qubits(["Y"]).unwrap(),
            2,
            &mut r,
        );
        let j = choi(&ch, None::<&[&str]>).unwrap();
        let back = kraus_from_choi(&j, &["X1", "X2"]).unwrap();
        prop_assert!(action_distance(&ch, &back).unwrap() < 1e-9);
        prop_assert!(back.kraus().len() <= 2);
    }

    #[test]
    fn mixture_choi_is_linear(seed in any::<u64>(), w in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = random_channel(PartySystem::qubits(["X"]).unwrap(), PartySystem::qubits(["Y"]).unwrap(), 2, &mut r);
        let b = random_channel(PartySystem::qubits(["X"]).unwrap(), PartySystem::qubits(["Y"]).unwrap(), 3, &mut r);
        let m = mix(&[a.clone(), b.clone()], &[w, 1.0 - w]).unwrap();
        let none = None::<&[&str]>;
        let expect = &choi(&a, none).unwrap().matrix().scale_real(w) + &choi(&b, none).unwrap().matrix().scale_real(1.0 - w);
        prop_assert!(close(choi(&m, none).unwrap().matrix(), &expect, 1e-12));
    }

    #[test]
    fn codecs_round_trip_bit_exactly(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = PartySystem::new(["A", "B"], vec![2, 3]).unwrap();
        let rho = random::density(&sys, &mut r);
        prop_assert_eq!(state_from_json(&state_to_json(&rho)).unwrap(), rho);
        let ch = random_channel(PartySystem::qubits(["X"]).unwrap(), sys, 2, &mut r);
        prop_assert_eq!(channel_from_json(&channel_to_json(&ch)).unwrap(), ch);
    }

    #[test]
    fn ghz_classifier_normalized_and_matches_eigensolver(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let labels: Vec<String> = (0..n).map(|k| format!("Q{k}")).collect();
        let sys = PartySystem::qubits(labels).unwrap();
        let half = 1 << (n - 1);
        let mut plus: Vec<f64> = (0..half).map(|_| r.random::<f64>()).collect();
        let mut minus: Vec<f64> = (0..half).map(|_| r.random::<f64>()).collect();
        minus[1..half].copy_from_slice(&plus[1..half]);
        plus[0] *= 4.0;
        let total: f64 = plus.iter().chain(&minus).sum();
        plus.iter_mut().chain(minus.iter_mut()).for_each(|x| *x /= total);
        let rho = ghz_diagonal_state(&sys, &plus, &minus).unwrap();
        let c = ghz_diagonal_coefficients(&rho).unwrap();
        prop_assert!((c.normalization() - 1.0).abs() < 1e-10);
        prop_assert!(c.lambdas.values().all(|l| *l >= -1e-12));
        prop_assert!(!c.asymmetry_flag);
        for cut in all_cuts(&sys) {
            let npt = npt_criterion(&c, &cut).unwrap();
            prop_assert_eq!(npt, !ppt_check(&rho, &cut).unwrap().is_ppt);
        }
    }

    #[test]
    fn localization_balances_random_rank_two(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = PartySystem::qubits(["A1", "A2", "B1", "B2"]).unwrap();
        let x = random::gaussian_matrix(4, 2, &mut r);
        let y = random::gaussian_matrix(2, 4, &mut r);
        let m = &x * &y;
        let phi = PureState::normalized(sys, ComplexMatrix::column(m.data().to_vec())).unwrap();
        let out = localize_entanglement(&phi, &["A1", "A2"], &["B1", "B2"]).unwrap();
        let pair_sys = out.state.system().clone();
        let sd = schmidt_decomposition(&out.state, &BipartiteCut::new(&pair_sys, &pair_sys.labels()[..1]).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        prop_assert!((sd.coefficients[0] - h).abs() < 1e-9 && (sd.coefficients[1] - h).abs() < 1e-9);
        prop_assert!(out.bystander_purities.iter().all(|(_, p)| *p >= 1.0 - PURITY_TOL));
        prop_assert!(out.success_probability() > 0.0 && out.success_probability() <= 1.0 + 1e-12);
    }
}

#[test]
fn separable_mixtures_are_ppt() {
    let mut r = rng(7);
    let a = PartySystem::qubits(["A"]).unwrap();
    let b = PartySystem::new(["B"], vec![3]).unwrap();
    let sys = PartySystem::new(["A", "B"], vec![2, 3]).unwrap();
    let mut m = ComplexMatrix::zeros(6, 6);
    for _ in 0..5 {
        let p = random::density(&a, &mut r)
            .matrix()
            .kron(random::density(&b, &mut r).matrix());
        m = &m + &p.scale_real(0.2);
    }
    let rho = MultipartiteState::new(sys.clone(), m).unwrap();
    assert!(
        ppt_check(&rho, &BipartiteCut::new(&sys, &["A"]).unwrap())
            .unwrap()
            .is_ppt
    );
}
