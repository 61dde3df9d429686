//! Pure-state entanglement monotones written as `n`-copy invariant
//! observables, `M(ψ) = s · ⟨ψ|^{⊗n} A_n |ψ⟩^{⊗n}^{1/n}`.
//!
//! The scale `s` of each monotone is fixed once by evaluating the observable
//! on an anchor state whose closed-form value is known (singlet, GHZ,
//! maximally entangled `d × d` state) and dividing the oracle value by the
//! raw root. Random-state agreement is then a test, not an assumption.
//!
//! Observed relations (after calibration):
//! - concurrence: `s = 2`, equals the Wootters concurrence on pure states.
//! - tangle: `s = 4`, equals `√τ` where `τ` is the three-tangle from the
//!   hyperdeterminant; the raw expectation is `τ² / 256`.
//! - G-concurrence (`d = 3, 4`): `s = d`, equals `d (∏ μᵢ)^{1/d}` with `μᵢ`
//!   the eigenvalues of the reduced density operator; the raw expectation is
//!   exactly `∏ μᵢ`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::invariants::{expectation_power_pure, ObservableSpec, ProjectorFactor, Term};
use crate::tensorkit::{named, LegLayout, StateVector};

/// Expectations down to this negative value are treated as round-off and
/// clamped to zero before the root is taken.
pub const NEGATIVE_CLAMP: f64 = -1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotoneKind {
    Concurrence,
    Tangle,
    #[serde(rename = "gconc3")]
    GConcurrence3,
    #[serde(rename = "gconc4")]
    GConcurrence4,
}

impl MonotoneKind {
    pub const ALL: [MonotoneKind; 4] =
        [MonotoneKind::Concurrence, MonotoneKind::Tangle, MonotoneKind::GConcurrence3, MonotoneKind::GConcurrence4];

    pub fn name(self) -> &'static str {
        match self {
            MonotoneKind::Concurrence => "concurrence",
            MonotoneKind::Tangle => "tangle",
            MonotoneKind::GConcurrence3 => "gconc3",
            MonotoneKind::GConcurrence4 => "gconc4",
        }
    }

    /// Subsystem dimensions the monotone is defined on; `None` entries accept
    /// any dimension.
    fn shape(self) -> &'static [Option<usize>] {
        match self {
            MonotoneKind::Concurrence => &[None, None],
            MonotoneKind::Tangle => &[Some(2), Some(2), Some(2)],
            MonotoneKind::GConcurrence3 => &[Some(3), Some(3)],
            MonotoneKind::GConcurrence4 => &[Some(4), Some(4)],
        }
    }

    /// The uncalibrated invariant observable.
    pub fn observable(self) -> ObservableSpec {
        use ProjectorFactor as F;
        let spec = match self {
            MonotoneKind::Concurrence => {
                ObservableSpec::product(2, 1.0, vec![F::antisym("A", 0, 1), F::antisym("B", 0, 1)])
            }
            MonotoneKind::Tangle => ObservableSpec::product(
                4,
                1.0,
                vec![
                    F::antisym("A", 0, 1),
                    F::antisym("A", 2, 3),
                    F::antisym("B", 0, 2),
                    F::antisym("B", 1, 3),
                    F::antisym("C", 0, 1),
                    F::antisym("C", 2, 3),
                ],
            ),
            MonotoneKind::GConcurrence3 => ObservableSpec::new(
                3,
                vec![
                    Term::new(
                        1.0,
                        vec![F::identity("A", 0), F::antisym("A", 1, 2), F::antisym("B", 0, 1), F::identity("B", 2)],
                    ),
                    Term::new(
                        -1.0 / 3.0,
                        vec![F::identity("A", 0), F::sym("A", 1, 2), F::antisym("B", 0, 1), F::identity("B", 2)],
                    ),
                ],
            ),
            // The second subsystem carries two antisymmetric factors, on
            // copies (1,3) and (2,4).
            MonotoneKind::GConcurrence4 => ObservableSpec::new(
                4,
                vec![
                    Term::new(
                        1.0,
                        vec![
                            F::antisym("A", 0, 1),
                            F::antisym("A", 2, 3),
                            F::antisym("B", 0, 2),
                            F::antisym("B", 1, 3),
                        ],
                    ),
                    Term::new(
                        -1.0 / 3.0,
                        vec![F::sym("A", 0, 1), F::sym("A", 2, 3), F::antisym("B", 0, 2), F::antisym("B", 1, 3)],
                    ),
                ],
            ),
        };
        spec.expect("static observable is well formed")
    }

    /// Anchor state used for calibration.
    pub fn anchor(self) -> StateVector {
        match self {
            MonotoneKind::Concurrence => named::singlet(),
            MonotoneKind::Tangle => named::ghz(),
            MonotoneKind::GConcurrence3 => named::max_entangled(3).unwrap(),
            MonotoneKind::GConcurrence4 => named::max_entangled(4).unwrap(),
        }
    }

    /// Value of every anchor: the singlet, GHZ and maximally entangled
    /// states are the maximally entangled members of their families.
    pub const ANCHOR_VALUE: f64 = 1.0;

    /// Closed-form oracle value of the anchor, in floating point.
    #[cfg(test)]
    fn anchor_oracle(self) -> f64 {
        use crate::oracles::{ckw_tangle, schmidt_g_concurrence, wootters_concurrence, GConvention};
        use crate::tensorkit::DensityOperator;
        let a = self.anchor();
        match self {
            MonotoneKind::Concurrence => wootters_concurrence(&DensityOperator::from_pure(&a)),
            MonotoneKind::Tangle => ckw_tangle(&a),
            MonotoneKind::GConcurrence3 | MonotoneKind::GConcurrence4 => {
                schmidt_g_concurrence(&a, GConvention::Normalized)
            }
        }
        .expect("anchor states fit their oracles")
    }

    /// Reject states the monotone is not defined on, and relabel the rest to
    /// the canonical subsystem labels `A, B, C`.
    fn canonical(self, psi: &StateVector) -> Result<StateVector> {
        let layout = psi.layout();
        ensure!(layout.is_single_copy(), Error::Layout("monotones take a single-copy state".into()));
        let shape = self.shape();
        ensure!(
            layout.len() == shape.len(),
            Error::Layout(format!("{} needs {} subsystems, state has {}", self.name(), shape.len(), layout.len()))
        );
        for (leg, want) in layout.legs().iter().zip(shape) {
            if let Some(d) = want {
                ensure!(
                    leg.dim == *d,
                    Error::Layout(format!(
                        "{} needs subsystem dimensions {:?}, got {:?}",
                        self.name(),
                        shape.iter().map(|d| d.unwrap_or(0)).collect::<Vec<_>>(),
                        layout.dims()
                    ))
                );
            }
        }
        let norm = psi.norm();
        ensure!(
            (norm - 1.0).abs() <= 1e-10,
            Error::InvalidState(format!("monotones take normalized states (norm {norm})"))
        );
        let labels = ["A", "B", "C"];
        let parts: Vec<(&str, usize)> = labels.iter().copied().zip(layout.dims()).collect();
        StateVector::new(psi.amplitudes().clone(), LegLayout::subsystems(&parts)?)
    }
}

impl fmt::Display for MonotoneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MonotoneKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MonotoneKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown monotone '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Scaled so the anchor state matches its closed-form value.
    #[default]
    Calibrated,
    /// Plain `⟨A_n⟩^{1/n}`, no scale factor.
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneDefinition {
    pub kind: MonotoneKind,
    pub spec: ObservableSpec,
    pub calibration: f64,
}

impl MonotoneDefinition {
    pub fn n_copies(&self) -> usize {
        self.spec.n_copies()
    }

    pub fn root_exponent(&self) -> f64 {
        1.0 / self.n_copies() as f64
    }
}

fn rooted(expectation: f64, n: usize) -> Result<f64> {
    ensure!(expectation >= NEGATIVE_CLAMP, Error::NegativeExpectation(expectation));
    Ok(expectation.max(0.0).powf(1.0 / n as f64))
}

fn calibrate(kind: MonotoneKind) -> MonotoneDefinition {
    let spec = kind.observable();
    let anchor = kind.anchor();
    // divide out the round-off in the anchor's norm
    let raw = expectation_power_pure(&spec, &anchor).expect("anchor evaluation")
        / anchor.norm_sqr().powi(spec.n_copies() as i32);
    let root = rooted(raw, spec.n_copies()).expect("anchor expectation is positive");
    MonotoneDefinition { kind, spec, calibration: MonotoneKind::ANCHOR_VALUE / root }
}

/// Calibrated definition, computed on first use.
pub fn definition(kind: MonotoneKind) -> &'static MonotoneDefinition {
    static CELLS: [OnceLock<MonotoneDefinition>; 4] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = MonotoneKind::ALL.iter().position(|&k| k == kind).unwrap();
    CELLS[i].get_or_init(|| calibrate(kind))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonotoneEvaluation {
    pub value: f64,
    pub raw_expectation: f64,
}

/// `calibration · max(0, ⟨A_n⟩)^{1/n}` (or without the calibration under
/// [`Normalization::Raw`]).
pub fn evaluate_monotone(
    defn: &MonotoneDefinition,
    psi: &StateVector,
    normalization: Normalization,
) -> Result<MonotoneEvaluation> {
    let psi = defn.kind.canonical(psi)?;
    let raw = expectation_power_pure(&defn.spec, &psi)?;
    let root = rooted(raw, defn.n_copies())?;
    let scale = match normalization {
        Normalization::Calibrated => defn.calibration,
        Normalization::Raw => 1.0,
    };
    Ok(MonotoneEvaluation { value: scale * root, raw_expectation: raw })
}

pub fn pure_monotone(kind: MonotoneKind, psi: &StateVector) -> Result<f64> {
    Ok(evaluate_monotone(definition(kind), psi, Normalization::Calibrated)?.value)
}

/// Concurrence of a normalized bipartite pure state (any local dimensions).
pub fn concurrence_pure(psi: &StateVector) -> Result<f64> {
    pure_monotone(MonotoneKind::Concurrence, psi)
}

/// `√τ` of a normalized three-qubit state, from four copies.
pub fn tangle_pure(psi: &StateVector) -> Result<f64> {
    pure_monotone(MonotoneKind::Tangle, psi)
}

pub fn g_concurrence_3x3(psi: &StateVector) -> Result<f64> {
    pure_monotone(MonotoneKind::GConcurrence3, psi)
}

/// Evaluated on 65536-dimensional four-copy vectors without any dense operator.
pub fn g_concurrence_4x4(psi: &StateVector) -> Result<f64> {
    pure_monotone(MonotoneKind::GConcurrence4, psi)
}

/// `M(ψ)` for a subnormalized `ψ`, using homogeneity `M(√p Ψ) = p M(Ψ)`.
pub fn homogeneous<F>(monotone: F, psi: &StateVector) -> Result<f64>
where
    F: Fn(&StateVector) -> Result<f64>,
{
    let w = psi.norm_sqr();
    if w == 0.0 {
        return Ok(0.0);
    }
    Ok(w * monotone(&psi.normalized()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::realize;
    use crate::tensorkit::{random_state, StateVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn calibration_constants() {
        assert!((definition(MonotoneKind::Concurrence).calibration - 2.0).abs() < 1e-12);
        assert!((definition(MonotoneKind::Tangle).calibration - 4.0).abs() < 1e-12);
        assert!((definition(MonotoneKind::GConcurrence3).calibration - 3.0).abs() < 1e-12);
        assert!((definition(MonotoneKind::GConcurrence4).calibration - 4.0).abs() < 1e-12);
        for k in MonotoneKind::ALL {
            assert!((k.anchor_oracle() - MonotoneKind::ANCHOR_VALUE).abs() < 1e-12, "{k}");
        }
    }

    #[test]
    fn singlet_raw_value_is_half() {
        let e =
            evaluate_monotone(definition(MonotoneKind::Concurrence), &named::singlet(), Normalization::Raw).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);
        assert!((concurrence_pure(&named::singlet()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_states_vanish() {
        assert_eq!(concurrence_pure(&named::product(&[2, 2]).unwrap()).unwrap(), 0.0);
        assert_eq!(tangle_pure(&named::product(&[2, 2, 2]).unwrap()).unwrap(), 0.0);
        assert_eq!(g_concurrence_3x3(&named::product(&[3, 3]).unwrap()).unwrap(), 0.0);
        assert_eq!(g_concurrence_4x4(&named::product(&[4, 4]).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn anchors() {
        assert!((tangle_pure(&named::ghz()).unwrap() - 1.0).abs() < 1e-12);
        assert!(tangle_pure(&named::w_state()).unwrap() <= 1e-8);
        assert!((g_concurrence_3x3(&named::max_entangled(3).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!((g_concurrence_4x4(&named::max_entangled(4).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_rank_two_in_three_levels_vanishes() {
        let mut a = [0.0; 9];
        a[0] = 1.0;
        a[4] = 1.0;
        let psi = StateVector::from_real(&a, LegLayout::bipartite(3, 3).unwrap()).unwrap();
        assert!(g_concurrence_3x3(&psi).unwrap() < 1e-10);
    }

    #[test]
    fn wrong_shapes_rejected() {
        assert!(concurrence_pure(&named::ghz()).is_err());
        assert!(tangle_pure(&named::singlet()).is_err());
        assert!(g_concurrence_3x3(&named::max_entangled(4).unwrap()).is_err());
        assert!(g_concurrence_4x4(&named::max_entangled(3).unwrap()).is_err());
        assert!(concurrence_pure(&named::singlet().scaled(0.5)).is_err());
    }

    #[test]
    fn four_level_observable_has_no_dense_path() {
        let spec = MonotoneKind::GConcurrence4.observable();
        assert!(matches!(realize(&spec, &LegLayout::bipartite(4, 4).unwrap()), Err(Error::DenseCap { .. })));
    }

    #[test]
    fn clamp_edges() {
        assert_eq!(rooted(0.0, 3).unwrap(), 0.0);
        assert_eq!(rooted(-5e-11, 2).unwrap(), 0.0);
        assert!(matches!(rooted(-1e-9, 2), Err(Error::NegativeExpectation(_))));
    }

    #[test]
    fn labels_do_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let psi = random_state(&LegLayout::bipartite(2, 2).unwrap(), &mut rng);
        let relabelled =
            StateVector::new(psi.amplitudes().clone(), LegLayout::subsystems(&[("alice", 2), ("bob", 2)]).unwrap())
                .unwrap();
        assert_eq!(concurrence_pure(&psi).unwrap(), concurrence_pure(&relabelled).unwrap());
    }

    #[test]
    fn kind_names_parse() {
        for k in MonotoneKind::ALL {
            assert_eq!(k.name().parse::<MonotoneKind>().unwrap(), k);
        }
        assert!("entropy".parse::<MonotoneKind>().is_err());
    }
}
