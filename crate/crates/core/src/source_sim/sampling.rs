use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::invariants::{expectation_mixed, realize, FactorKind, ObservableSpec, ProjectorFactor};
use crate::tensorkit::{hermitian_eigensystem, DensityOperator};

/// Probabilities this far below zero are round-off; anything lower is an error.
const PROB_FLOOR: f64 = -1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleEstimate {
    pub estimate: f64,
    /// Sample standard deviation over `√shots`.
    pub standard_error: f64,
    pub shots: usize,
}

/// Outcome distribution of a projective measurement whose outcome `k`
/// carries the value `values[k]`.
struct Measurement {
    probabilities: Vec<f64>,
    values: Vec<f64>,
}

/// Two-copy swap measurements on `(subsystem, copy pair)` slots.
fn slots(spec: &ObservableSpec) -> Vec<(String, Vec<usize>)> {
    let mut out: Vec<(String, Vec<usize>)> = Vec::new();
    for t in spec.terms() {
        for f in &t.factors {
            if f.kind == FactorKind::Identity {
                continue;
            }
            let mut c = f.copies.clone();
            c.sort_unstable();
            let slot = (f.subsystem.clone(), c);
            if !out.contains(&slot) {
                out.push(slot);
            }
        }
    }
    out
}

fn slots_disjoint(slots: &[(String, Vec<usize>)]) -> bool {
    let mut legs: Vec<(&str, usize)> = Vec::new();
    for (sub, copies) in slots {
        for &c in copies {
            if legs.contains(&(sub.as_str(), c)) {
                return false;
            }
            legs.push((sub.as_str(), c));
        }
    }
    true
}

/// Every slot measured as a binary `P₊`/`P₋` outcome; all slots commute, so
/// they are measured jointly and each term is a product of indicators.
fn factorized(
    spec: &ObservableSpec,
    slots: &[(String, Vec<usize>)],
    copies: &[&DensityOperator],
) -> Result<Measurement> {
    let k = slots.len();
    let mut probabilities = Vec::with_capacity(1 << k);
    let mut values = Vec::with_capacity(1 << k);
    for mask in 0usize..(1 << k) {
        let antisym = |s: usize| mask >> s & 1 == 1;
        let factors: Vec<ProjectorFactor> = slots
            .iter()
            .enumerate()
            .map(|(s, (sub, c))| {
                if antisym(s) {
                    ProjectorFactor::antisym(sub, c[0], c[1])
                } else {
                    ProjectorFactor::sym(sub, c[0], c[1])
                }
            })
            .collect();
        let proj = ObservableSpec::product(spec.n_copies(), 1.0, factors)?;
        probabilities.push(expectation_mixed(&proj, copies)?);

        let mut value = 0.0;
        for t in spec.terms() {
            let hit = t.factors.iter().all(|f| {
                if f.kind == FactorKind::Identity {
                    return true;
                }
                let mut c = f.copies.clone();
                c.sort_unstable();
                let s = slots.iter().position(|(sub, cc)| *sub == f.subsystem && *cc == c).expect("slot listed");
                antisym(s) == (f.kind == FactorKind::Antisym)
            });
            if hit {
                value += t.coeff;
            }
        }
        values.push(value);
    }
    Ok(Measurement { probabilities, values })
}

/// Eigenbasis measurement of the realized operator.
fn dense(spec: &ObservableSpec, copies: &[&DensityOperator]) -> Result<Measurement> {
    let single = copies[0].layout().with_copy(0);
    let a = realize(spec, &single)?;
    let (values, vecs) = hermitian_eigensystem(&a)?;
    let mut state = copies[0].matrix().clone();
    for r in &copies[1..] {
        state = state.kronecker(r.matrix());
    }
    let probabilities = (0..values.len())
        .map(|k| {
            let v = vecs.column(k);
            (v.adjoint() * &state * v)[(0, 0)].re
        })
        .collect();
    Ok(Measurement { probabilities, values })
}

/// Shot-noise estimate of `Tr(ρ₁ ⊗ … ⊗ ρₙ A)`.
///
/// Specs whose two-copy factors sit on disjoint slots are measured factor by
/// factor; others fall back to the eigenbasis of the dense operator (subject
/// to the dense size cap).
pub fn sample_expectation<R: Rng + ?Sized>(
    spec: &ObservableSpec,
    copies: &[&DensityOperator],
    shots: usize,
    rng: &mut R,
) -> Result<SampleEstimate> {
    ensure!(shots >= 1, Error::InvalidParameter("shots must be >= 1".into()));
    ensure!(copies.len() == spec.n_copies(), Error::CopyMismatch { expected: spec.n_copies(), got: copies.len() });
    let s = slots(spec);
    let m = if slots_disjoint(&s) { factorized(spec, &s, copies)? } else { dense(spec, copies)? };

    let total: f64 = m.probabilities.iter().sum();
    ensure!(
        m.probabilities.iter().all(|&p| p >= PROB_FLOOR * total.abs().max(1.0)) && total > 0.0,
        Error::InvalidState("copies do not define a probability distribution".into())
    );
    let weights: Vec<f64> = m.probabilities.iter().map(|p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidState(e.to_string()))?;

    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..shots {
        let v = m.values[dist.sample(rng)];
        sum += v;
        sum_sq += v * v;
    }
    let n = shots as f64;
    let mean = sum / n;
    let var = if shots > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(SampleEstimate { estimate: mean, standard_error: (var / n).sqrt(), shots })
}
