use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entmeter::invariants::{expectation_dense, expectation_mixed, ObservableSpec};
use entmeter::mixedbounds::{
    concurrence_lower_bound, generic_bound, purity_deficit, v_operator, BoundCandidate, BoundConfig,
};
use entmeter::monotones::{concurrence_pure, g_concurrence_3x3, homogeneous, tangle_pure};
use entmeter::oracles::wootters_concurrence;
use entmeter::source_sim::{apply_storage, effective_density, prepare_copies, LocalNoise, SourceModel, StorageChannel};
use entmeter::tensorkit::{
    apply_to_legs, haar_random_unitary, identity, kron, partial_trace, permute_legs, random_density, random_state,
    schmidt_coefficients, CMatrix, DensityOperator, LegLayout, StateVector,
};

type PureMonotone = fn(&StateVector) -> entmeter::Result<f64>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `u₁ ⊗ u₂ ⊗ … ` applied leg by leg.
fn local_unitary_state(psi: &StateVector, rng: &mut ChaCha8Rng) -> StateVector {
    let mut out = psi.clone();
    for (leg, &d) in psi.layout().dims().iter().enumerate() {
        out = apply_to_legs(&haar_random_unitary(d, rng), &[leg], &out).unwrap();
    }
    out
}

fn local_unitary_density(rho: &DensityOperator, rng: &mut ChaCha8Rng) -> DensityOperator {
    let mut u = CMatrix::identity(1, 1);
    for &d in &rho.layout().dims() {
        u = kron(&u, &haar_random_unitary(d, rng));
    }
    DensityOperator::new(&u * rho.matrix() * u.adjoint(), rho.layout().clone()).unwrap()
}

fn bipartite_dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 3))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn copy_permutations_compose(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let single = LegLayout::bipartite(2, 2).unwrap();
        let psi = random_state(&single.replicate(n).unwrap(), &mut r);
        let mut p1: Vec<usize> = (0..n).collect();
        let mut p2: Vec<usize> = (0..n).collect();
        p1.shuffle(&mut r);
        p2.shuffle(&mut r);
        let composed: Vec<usize> = (0..n).map(|c| p2[p1[c]]).collect();
        let twice = permute_legs(&permute_legs(&psi, &p1).unwrap(), &p2).unwrap();
        let once = permute_legs(&psi, &composed).unwrap();
        prop_assert!((twice.amplitudes() - once.amplitudes()).norm() < 1e-14);

        let mut inverse = vec![0; n];
        for (c, &p) in p1.iter().enumerate() {
            inverse[p] = c;
        }
        let back = permute_legs(&permute_legs(&psi, &p1).unwrap(), &inverse).unwrap();
        prop_assert!((back.amplitudes() - psi.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn leg_application_matches_dense(seed in any::<u64>(), leg in 0usize..3) {
        let mut r = rng(seed);
        let layout = LegLayout::subsystems(&[("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let dims = layout.dims();
        let psi = random_state(&layout, &mut r);
        let op = haar_random_unitary(dims[leg], &mut r) + haar_random_unitary(dims[leg], &mut r);
        let mut full = CMatrix::identity(1, 1);
        for (i, &d) in dims.iter().enumerate() {
            full = kron(&full, &if i == leg { op.clone() } else { identity(d) });
        }
        let fast = apply_to_legs(&op, &[leg], &psi).unwrap();
        prop_assert!((fast.amplitudes() - full * psi.amplitudes()).norm() < 1e-13);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), (a, b) in bipartite_dims()) {
        let mut r = rng(seed);
        let ra = random_density(&LegLayout::subsystems(&[("A", a)]).unwrap(), a, &mut r).unwrap();
        let rb = random_density(&LegLayout::subsystems(&[("B", b)]).unwrap(), 1, &mut r).unwrap();
        let joint = DensityOperator::new(kron(ra.matrix(), rb.matrix()), LegLayout::bipartite(a, b).unwrap()).unwrap();
        let ta = partial_trace(&joint, &[0]).unwrap();
        let tb = partial_trace(&joint, &[1]).unwrap();
        prop_assert!((ta.matrix() - ra.matrix()).norm() < 1e-14);
        prop_assert!((tb.matrix() - rb.matrix()).norm() < 1e-14);
    }

    #[test]
    fn schmidt_spectrum_is_local_unitary_invariant(seed in any::<u64>(), (a, b) in bipartite_dims()) {
        let mut r = rng(seed);
        let psi = random_state(&LegLayout::bipartite(a, b).unwrap(), &mut r);
        let moved = local_unitary_state(&psi, &mut r);
        let s1 = schmidt_coefficients(&psi, &[0]).unwrap();
        let s2 = schmidt_coefficients(&moved, &[0]).unwrap();
        for (x, y) in s1.iter().zip(&s2) {
            prop_assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn monotones_are_local_unitary_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let two = random_state(&LegLayout::bipartite(2, 2).unwrap(), &mut r);
        let three = random_state(&LegLayout::qubits(3).unwrap(), &mut r);
        let qutrits = random_state(&LegLayout::bipartite(3, 3).unwrap(), &mut r);
        let pairs: [(PureMonotone, &StateVector); 3] =
            [(concurrence_pure, &two), (tangle_pure, &three), (g_concurrence_3x3, &qutrits)];
        for (m, psi) in pairs {
            let moved = local_unitary_state(psi, &mut r);
            prop_assert!((m(psi).unwrap() - m(&moved).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn monotones_scale_with_weight(seed in any::<u64>(), p in 0.01f64..1.0) {
        let mut r = rng(seed);
        let psi = random_state(&LegLayout::bipartite(2, 2).unwrap(), &mut r);
        let c = concurrence_pure(&psi).unwrap();
        let scaled = homogeneous(concurrence_pure, &psi.scaled(p.sqrt())).unwrap();
        prop_assert!((scaled - p * c).abs() < 1e-13);
    }

    #[test]
    fn bound_is_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..=4, alpha1 in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let rho = random_density(&LegLayout::bipartite(2, 2).unwrap(), rank, &mut r).unwrap();
        let moved = local_unitary_density(&rho, &mut r);
        let cfg = BoundConfig::new(alpha1).unwrap();
        let b1 = concurrence_lower_bound(&rho, &cfg).unwrap();
        let b2 = concurrence_lower_bound(&moved, &cfg).unwrap();
        prop_assert!((b1.raw_trace - b2.raw_trace).abs() < 1e-10);
        prop_assert!((b1.bound - b2.bound).abs() < 1e-10 || b1.raw_trace.abs() < 1e-12);
    }

    #[test]
    fn bound_never_exceeds_closed_form(seed in any::<u64>(), rank in 1usize..=4, alpha1 in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let rho = random_density(&LegLayout::bipartite(2, 2).unwrap(), rank, &mut r).unwrap();
        let b = concurrence_lower_bound(&rho, &BoundConfig::new(alpha1).unwrap()).unwrap().bound;
        prop_assert!(b <= wootters_concurrence(&rho).unwrap() + 1e-9);
    }

    #[test]
    fn purity_identity(seed in any::<u64>(), (a, b) in bipartite_dims()) {
        let mut r = rng(seed);
        let rank = r.random_range(1..=a * b);
        let rho = random_density(&LegLayout::bipartite(a, b).unwrap(), rank, &mut r).unwrap();
        let want = (rho.trace().powi(2) - rho.purity()) / 2.0;
        prop_assert!((purity_deficit(&rho).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn matrix_free_and_dense_expectations_agree(seed in any::<u64>(), alpha1 in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let l = LegLayout::bipartite(2, 3).unwrap();
        let r1 = random_density(&l, 2, &mut r).unwrap();
        let r2 = random_density(&l, 6, &mut r).unwrap();
        let v = v_operator(&BoundConfig::new(alpha1).unwrap()).unwrap();
        let a = expectation_mixed(&v, &[&r1, &r2]).unwrap();
        let b = expectation_dense(&v, &[&r1, &r2]).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn local_noise_never_increases_concurrence(seed in any::<u64>(), q in 0.0f64..=1.0, steps in 1usize..4, dephase in any::<bool>()) {
        let mut r = rng(seed);
        let rank = r.random_range(1..=4);
        let rho = random_density(&LegLayout::bipartite(2, 2).unwrap(), rank, &mut r).unwrap();
        let noise = if dephase { LocalNoise::dephasing(q).unwrap() } else { LocalNoise::depolarizing(q).unwrap() };
        let out = apply_storage(&rho, &noise, steps).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        prop_assert!(wootters_concurrence(&out).unwrap() <= wootters_concurrence(&rho).unwrap() + 1e-10);
    }

    #[test]
    fn storage_chain_ordering(seed in any::<u64>(), q in 0.0f64..=1.0, alpha1 in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let rank = r.random_range(1..=4);
        let rho = random_density(&LegLayout::bipartite(2, 2).unwrap(), rank, &mut r).unwrap();
        let copies = prepare_copies(&rho, &StorageChannel::depolarizing(q).unwrap(), 2).unwrap();
        let v = v_operator(&BoundConfig::new(alpha1).unwrap()).unwrap();
        let c = wootters_concurrence(&rho).unwrap();
        let product = wootters_concurrence(&copies[0]).unwrap() * wootters_concurrence(&copies[1]).unwrap();
        let trace = expectation_mixed(&v, &[&copies[0], &copies[1]]).unwrap();
        prop_assert!(c * c >= product - 1e-10);
        prop_assert!(product >= trace - 1e-10);
    }

    #[test]
    fn identity_storage_reduces_to_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = LegLayout::bipartite(2, 2).unwrap();
        let source = SourceModel::new(
            vec![(0.6, random_state(&l, &mut r)), (0.4, random_state(&l, &mut r))],
            "pair",
        ).unwrap();
        let rho = effective_density(&source).unwrap();
        let copies = prepare_copies(&rho, &StorageChannel::identity(), 2).unwrap();
        prop_assert_eq!(&copies[0], &rho);
        let v = v_operator(&BoundConfig::default()).unwrap();
        let g = generic_bound(&copies[0], &BoundCandidate::uncertified(v)).unwrap();
        let c = concurrence_lower_bound(&rho, &BoundConfig::default()).unwrap();
        prop_assert!((g.value - c.bound).abs() < 1e-15);
    }

    #[test]
    fn spec_json_round_trip(alpha1 in 0.0f64..=1.0) {
        let v = v_operator(&BoundConfig::new(alpha1).unwrap()).unwrap();
        prop_assert_eq!(ObservableSpec::from_json(&v.to_json().unwrap()).unwrap(), v);
    }
}
