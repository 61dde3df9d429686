use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::channel::{prepare_copies, StorageChannel};
use super::sampling::sample_expectation;
use super::{effective_density, SourceModel};
use crate::error::{ensure, Error, Result};
use crate::invariants::{expectation_mixed, ObservableSpec};
use crate::mixedbounds::{inequality_audit, root_of, v_operator, BoundConfig};
use crate::monotones::concurrence_pure;
use crate::oracles::wootters_concurrence;
use crate::report::BoundReport;
use crate::tensorkit::io::{load_state, LoadedState, StateFile};
use crate::tensorkit::LegLayout;

/// Slack in the geometric-mean chain check.
const CHAIN_TOL: f64 = 1e-9;

/// A state given by built-in name, file path, or inline state file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateRef {
    Named(String),
    Inline(StateFile),
}

impl StateRef {
    pub fn resolve(&self) -> Result<LoadedState> {
        match self {
            StateRef::Named(s) => load_state(s),
            StateRef::Inline(f) => f.clone().into_state(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntry {
    pub p: f64,
    pub state: StateRef,
}

/// Either an explicit ensemble or a single state. A mixed state stands for
/// its eigen-ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceSpec {
    Ensemble {
        #[serde(default)]
        label: Option<String>,
        ensemble: Vec<EnsembleEntry>,
    },
    State(StateRef),
}

impl SourceSpec {
    pub fn resolve(&self) -> Result<SourceModel> {
        match self {
            SourceSpec::State(r) => {
                let label = match r {
                    StateRef::Named(s) => s.clone(),
                    StateRef::Inline(_) => "inline".into(),
                };
                match r.resolve()? {
                    LoadedState::Pure(psi) => SourceModel::pure(psi.normalized()?, label),
                    LoadedState::Density(rho) => SourceModel::from_density(&rho, label),
                }
            }
            SourceSpec::Ensemble { label, ensemble } => {
                let mut parts = Vec::new();
                for e in ensemble {
                    match e.state.resolve()? {
                        LoadedState::Pure(psi) => parts.push((e.p, psi)),
                        LoadedState::Density(rho) => {
                            let sub = SourceModel::from_density(&rho, "")?;
                            parts.extend(sub.ensemble().iter().map(|(q, psi)| (e.p * q, psi.clone())));
                        }
                    }
                }
                SourceModel::new(parts, label.clone().unwrap_or_else(|| "ensemble".into()))
            }
        }
    }
}

fn default_copies() -> usize {
    2
}
fn default_alpha1() -> f64 {
    0.5
}
fn default_audit_trials() -> usize {
    1000
}

/// Simulated experiment: a source, storage noise, an `n`-copy observable
/// (the concurrence bound operator for `alpha1` unless given) and a shot
/// budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: SourceSpec,
    #[serde(default)]
    pub channel: StorageChannel,
    #[serde(default = "default_copies")]
    pub n_copies: usize,
    #[serde(default)]
    pub observable: Option<ObservableSpec>,
    #[serde(default = "default_alpha1")]
    pub alpha1: f64,
    pub shots: usize,
    #[serde(default)]
    pub seed: u64,
    /// Random tuples used to certify the observable against the concurrence.
    #[serde(default = "default_audit_trials")]
    pub audit_trials: usize,
}

impl ExperimentConfig {
    pub fn new(source: SourceSpec, shots: usize) -> Self {
        ExperimentConfig {
            source,
            channel: StorageChannel::identity(),
            n_copies: 2,
            observable: None,
            alpha1: 0.5,
            shots,
            seed: 0,
            audit_trials: default_audit_trials(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn observable(&self) -> Result<ObservableSpec> {
        ensure!(self.shots >= 1, Error::InvalidParameter("shots must be >= 1".into()));
        let spec = match &self.observable {
            Some(s) => s.clone(),
            None => v_operator(&BoundConfig::new(self.alpha1)?)?,
        };
        ensure!(
            spec.n_copies() == self.n_copies,
            Error::CopyMismatch { expected: self.n_copies, got: spec.n_copies() }
        );
        Ok(spec)
    }
}

/// Runs the full protocol and reports the shot estimate, the exact trace,
/// the bound, and (for two qubits) closed-form concurrences of the source
/// and of every stored copy.
pub fn run_experiment(config: &ExperimentConfig) -> Result<BoundReport> {
    let spec = config.observable()?;
    let n = config.n_copies;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let source = config.source.resolve()?;
    let mut rho = effective_density(&source)?;
    let dims = rho.layout().dims();
    if config.observable.is_none() {
        ensure!(dims.len() == 2, Error::Layout("the default observable needs a bipartite source".into()));
        rho = rho.relabel(LegLayout::bipartite(dims[0], dims[1])?)?;
    }
    let copies = prepare_copies(&rho, &config.channel, n)?;
    let refs: Vec<_> = copies.iter().collect();

    let sample = sample_expectation(&spec, &refs, config.shots, &mut rng)?;
    let exact = expectation_mixed(&spec, &refs)?;
    let bound = root_of(sample.estimate, n, true);
    let bound_se =
        (sample.estimate > 0.0).then(|| sample.estimate.powf(1.0 / n as f64 - 1.0) / n as f64 * sample.standard_error);

    let (certified, violations) = if dims.len() == 2 && config.audit_trials > 0 {
        let audit = inequality_audit(&spec, rho.layout(), concurrence_pure, config.audit_trials, &mut rng)?;
        (audit.certified, audit.violations)
    } else {
        (false, 0)
    };

    let mut report = BoundReport {
        bound,
        raw_trace: sample.estimate,
        alpha1: config.alpha1,
        oracle: None,
        certified,
        violations,
        standard_error: Some(sample.standard_error),
        bound_standard_error: bound_se,
        exact_trace: Some(exact),
        exact_bound: Some(root_of(exact, n, true)),
        shots: Some(config.shots),
        copy_oracles: None,
        geometric_mean_ok: None,
    };
    if dims == [2, 2] {
        let c = wootters_concurrence(&rho)?;
        let per_copy = copies.iter().map(wootters_concurrence).collect::<Result<Vec<_>>>()?;
        let product: f64 = per_copy.iter().product();
        report.oracle = Some(c);
        report.geometric_mean_ok = Some(c.powi(n as i32) >= product - CHAIN_TOL && product >= exact - CHAIN_TOL);
        report.copy_oracles = Some(per_copy);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source_sim::LocalNoise;

    #[test]
    fn config_json_forms() {
        let c = ExperimentConfig::from_json(r#"{"source": "singlet", "shots": 10}"#).unwrap();
        assert_eq!(c.n_copies, 2);
        assert_eq!(c.alpha1, 0.5);
        let c = ExperimentConfig::from_json(
            r#"{"source": {"label": "flawed", "ensemble": [{"p": 0.9, "state": "singlet"}, {"p": 0.1, "state": "product:2x2"}]},
                "channel": {"noise": {"kind": "dephasing", "q": 0.05}},
                "shots": 100, "seed": 3}"#,
        )
        .unwrap();
        let s = c.source.resolve().unwrap();
        assert_eq!(s.ensemble().len(), 2);
        assert_eq!(c.channel.noise, LocalNoise::Dephasing { q: 0.05 });
        assert!(ExperimentConfig::from_json(r#"{"source": "singlet", "shots": 10, "bogus": 1}"#).is_err());
    }

    #[test]
    fn copy_count_must_match_observable() {
        let mut c = ExperimentConfig::new(SourceSpec::State(StateRef::Named("singlet".into())), 10);
        c.n_copies = 3;
        assert!(run_experiment(&c).is_err());
        c.n_copies = 2;
        c.shots = 0;
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn pristine_singlet() {
        let mut c = ExperimentConfig::new(SourceSpec::State(StateRef::Named("singlet".into())), 20_000);
        c.seed = 5;
        let r = run_experiment(&c).unwrap();
        assert!((r.exact_bound.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.bound - 1.0).abs() < 5.0 * r.bound_standard_error.unwrap());
        assert!(r.certified);
        assert_eq!(r.geometric_mean_ok, Some(true));
    }

    #[test]
    fn fully_depolarized_clamps() {
        let mut c = ExperimentConfig::new(SourceSpec::State(StateRef::Named("singlet".into())), 1000);
        c.channel = StorageChannel::depolarizing(1.0).unwrap().with_schedule(super::super::StorageSchedule::Uniform(1));
        let r = run_experiment(&c).unwrap();
        assert!(r.exact_trace.unwrap() < 0.0);
        assert_eq!(r.exact_bound, Some(0.0));
        assert_eq!(r.copy_oracles, Some(vec![0.0, 0.0]));
    }

    #[test]
    fn deterministic_given_seed() {
        let c = ExperimentConfig::from_json(r#"{"source": "werner:0.8", "shots": 500, "seed": 9}"#).unwrap();
        assert_eq!(run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
    }
}
