//! Simulated imperfect multi-copy preparation, local storage noise and
//! shot-based collective measurements.

mod channel;
mod experiment;
mod sampling;

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::tensorkit::{CMatrix, DensityOperator, LegLayout, StateVector};

pub use channel::{apply_storage, prepare_copies, LocalNoise, StorageChannel, StorageSchedule};
pub use experiment::{run_experiment, EnsembleEntry, ExperimentConfig, SourceSpec, StateRef};
pub use sampling::{sample_expectation, SampleEstimate};

const PROB_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

/// A source that emits `ψᵢ` with probability `pᵢ`, independently per copy.
#[derive(Clone, Debug, Serialize)]
pub struct SourceModel {
    #[serde(skip)]
    ensemble: Vec<(f64, StateVector)>,
    pub label: String,
}

impl SourceModel {
    pub fn new(ensemble: Vec<(f64, StateVector)>, label: impl Into<String>) -> Result<Self> {
        ensure!(!ensemble.is_empty(), Error::InvalidState("empty ensemble".into()));
        let layout = ensemble[0].1.layout().clone();
        let mut total = 0.0;
        for (p, psi) in &ensemble {
            ensure!(
                p.is_finite() && *p >= 0.0,
                Error::InvalidParameter(format!("probability {p} is not a valid weight"))
            );
            ensure!(psi.layout() == &layout, Error::Layout("ensemble states differ in layout".into()));
            ensure!(
                (psi.norm() - 1.0).abs() <= NORM_TOL,
                Error::InvalidState(format!("ensemble state has norm {}", psi.norm()))
            );
            total += p;
        }
        ensure!((total - 1.0).abs() <= PROB_TOL, Error::InvalidParameter(format!("probabilities sum to {total}")));
        Ok(SourceModel { ensemble, label: label.into() })
    }

    pub fn pure(psi: StateVector, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![(1.0, psi)], label)
    }

    /// The eigen-ensemble of `ρ` (weights below 1e-15 dropped, rest renormalized).
    pub fn from_density(rho: &DensityOperator, label: impl Into<String>) -> Result<Self> {
        let (vals, vecs) = rho.eigensystem()?;
        let kept: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 1e-15).collect();
        let total: f64 = kept.iter().map(|&k| vals[k]).sum();
        let ensemble = kept
            .into_iter()
            .map(|k| Ok((vals[k] / total, StateVector::new(vecs.column(k).into_owned(), rho.layout().clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ensemble, label)
    }

    pub fn ensemble(&self) -> &[(f64, StateVector)] {
        &self.ensemble
    }

    pub fn layout(&self) -> &LegLayout {
        self.ensemble[0].1.layout()
    }
}

/// `Σ pᵢ |ψᵢ⟩⟨ψᵢ|`.
pub fn effective_density(source: &SourceModel) -> Result<DensityOperator> {
    let parts: Vec<(f64, &StateVector)> = source.ensemble.iter().map(|(p, s)| (*p, s)).collect();
    DensityOperator::mixture(&parts)
}

/// `Σ_{i₁…iₙ} p_{i₁}⋯p_{iₙ} |ψ_{i₁}…ψ_{iₙ}⟩⟨ψ_{i₁}…ψ_{iₙ}|`, the state of `n`
/// emissions averaged over every emission string.
pub fn ensemble_average_power(source: &SourceModel, n: usize) -> Result<CMatrix> {
    ensure!(n >= 1, Error::InvalidParameter("copy count must be >= 1".into()));
    let k = source.ensemble.len();
    let d = source.layout().total_dim().pow(n as u32);
    let mut out = CMatrix::zeros(d, d);
    let mut idx = vec![0usize; n];
    loop {
        let mut weight = 1.0;
        let mut string = source.ensemble[idx[0]].1.clone();
        weight *= source.ensemble[idx[0]].0;
        for &i in &idx[1..] {
            weight *= source.ensemble[i].0;
            string = string.tensor(&source.ensemble[i].1)?;
        }
        out += string.projector().scale(weight);
        // odometer over emission strings
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < k {
                break;
            }
            idx[pos] = 0;
        }
    }
}
