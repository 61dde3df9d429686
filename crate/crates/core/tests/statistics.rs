use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entmeter::invariants::ObservableSpec;
use entmeter::mixedbounds::{v_operator, BoundConfig};
use entmeter::source_sim::{run_experiment, sample_expectation, ExperimentConfig, SourceSpec, StateRef};
use entmeter::tensorkit::{named, DensityOperator};

fn singlet() -> DensityOperator {
    DensityOperator::from_pure(&named::singlet())
}

#[test]
fn singlet_estimates_stay_within_five_sigma() {
    // each shot reads 4 with probability 1/4 and 0 otherwise: mean 1, variance 3
    let v = v_operator(&BoundConfig::default()).unwrap();
    let rho = singlet();
    let shots = 400;
    let sigma = (3.0 / shots as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let runs = 200;
    let inside = (0..runs)
        .filter(|_| {
            let e = sample_expectation(&v, &[&rho, &rho], shots, &mut rng).unwrap();
            (e.estimate - 1.0).abs() <= 5.0 * sigma
        })
        .count();
    assert!(inside as f64 >= 0.99 * runs as f64, "{inside}/{runs}");
}

#[test]
fn standard_error_halves_with_four_times_the_shots() {
    let v = v_operator(&BoundConfig::default()).unwrap();
    let rho = singlet();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mean_se = |shots: usize, rng: &mut ChaCha8Rng| {
        (0..20).map(|_| sample_expectation(&v, &[&rho, &rho], shots, rng).unwrap().standard_error).sum::<f64>() / 20.0
    };
    let ratio = mean_se(2000, &mut rng) / mean_se(8000, &mut rng);
    assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn identity_observable_has_no_shot_noise() {
    let id = ObservableSpec::identity(2).unwrap();
    let rho = named::werner(0.4).unwrap();
    let e = sample_expectation(&id, &[&rho, &rho], 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert!((e.estimate - 1.0).abs() < 1e-12);
    assert_eq!(e.standard_error, 0.0);
}

#[test]
fn experiments_are_reproducible_from_seed() {
    let mut cfg = ExperimentConfig::new(SourceSpec::State(StateRef::Named("werner:0.9".into())), 3000);
    cfg.seed = 11;
    cfg.audit_trials = 50;
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a, b);
    cfg.seed = 12;
    assert_ne!(run_experiment(&cfg).unwrap().raw_trace, a.raw_trace);
    assert!((a.exact_trace.unwrap() - 0.715).abs() < 1e-12);
}
