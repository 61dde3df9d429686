//! Measurable lower bounds on mixed-state entanglement.
//!
//! For a pure-state monotone `M` on `n` copies and an observable `V_n` with
//! `∏ M(ψᵢ) ≥ ⟨⊗ψᵢ| V_n |⊗ψᵢ⟩` for all subnormalized `ψᵢ`, every
//! decomposition `ρ = Σ |ψᵢ⟩⟨ψᵢ|` gives `M(ρ)ⁿ ≥ Tr ρ^{⊗n} V_n`, so the
//! `n`-th root of a single expectation value bounds the convex roof.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::invariants::{expectation_mixed, expectation_pure, ObservableSpec, ProjectorFactor, Term};
use crate::monotones::{definition, homogeneous, MonotoneKind, Normalization};
use crate::oracles::wootters_concurrence;
use crate::tensorkit::{named, random_state, CVector, DensityOperator, LegLayout, StateVector};

/// Margins below this count as violations of the product inequality.
pub const VIOLATION_TOL: f64 = -1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub alpha1: f64,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default = "default_clamp")]
    pub clamp: bool,
}

fn default_clamp() -> bool {
    true
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig { alpha1: 0.5, normalization: Normalization::Calibrated, clamp: true }
    }
}

impl BoundConfig {
    pub fn new(alpha1: f64) -> Result<Self> {
        let c = BoundConfig { alpha1, ..Default::default() };
        c.validate()?;
        Ok(c)
    }

    pub fn alpha2(&self) -> f64 {
        1.0 - self.alpha1
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            (0.0..=1.0).contains(&self.alpha1),
            Error::InvalidParameter(format!("alpha1 = {} outside [0, 1]", self.alpha1))
        );
        Ok(())
    }
}

/// `s² (P₋^A P₋^B − α₁ P₋^A P₊^B − α₂ P₊^A P₋^B)` on two copies of `(A, B)`,
/// with `s` the concurrence calibration (1 under raw normalization).
/// Terms with a zero weight are left out.
pub fn v_operator(config: &BoundConfig) -> Result<ObservableSpec> {
    config.validate()?;
    let s = match config.normalization {
        Normalization::Calibrated => definition(MonotoneKind::Concurrence).calibration,
        Normalization::Raw => 1.0,
    };
    let s2 = s * s;
    type F = ProjectorFactor;
    let mut terms = vec![Term::new(s2, vec![F::antisym("A", 0, 1), F::antisym("B", 0, 1)])];
    if config.alpha1 != 0.0 {
        terms.push(Term::new(-s2 * config.alpha1, vec![F::antisym("A", 0, 1), F::sym("B", 0, 1)]));
    }
    if config.alpha2() != 0.0 {
        terms.push(Term::new(-s2 * config.alpha2(), vec![F::sym("A", 0, 1), F::antisym("B", 0, 1)]));
    }
    ObservableSpec::new(2, terms)
}

/// Root of an expectation: clamped `max(0, x)^{1/n}`, or the signed root
/// `sign(x) |x|^{1/n}` when clamping is off.
pub fn root_of(raw: f64, n: usize, clamp: bool) -> f64 {
    let e = 1.0 / n as f64;
    if clamp {
        raw.max(0.0).powf(e)
    } else {
        raw.signum() * raw.abs().powf(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub bound: f64,
    pub raw_trace: f64,
}

/// Bipartite density operator relabelled to subsystems `A`, `B`.
fn canonical_bipartite(rho: &DensityOperator) -> Result<DensityOperator> {
    let l = rho.layout();
    ensure!(
        l.is_single_copy() && l.len() == 2,
        Error::Layout(format!("bipartite state required, got {} legs", l.len()))
    );
    let dims = l.dims();
    rho.relabel(LegLayout::bipartite(dims[0], dims[1])?)
}

/// `√(Tr ρ⊗ρ V)`, a lower bound on the concurrence of `ρ`.
pub fn concurrence_lower_bound(rho: &DensityOperator, config: &BoundConfig) -> Result<LowerBound> {
    let rho = canonical_bipartite(rho)?;
    let v = v_operator(config)?;
    let raw = expectation_mixed(&v, &[&rho, &rho])?;
    Ok(LowerBound { bound: root_of(raw, 2, config.clamp), raw_trace: raw })
}

/// `Σ` over sign patterns with an odd number of `P₋`, which equals
/// `(1 − Π)/2` with `Π` the full swap of two copies.
fn odd_pattern_spec(layout: &LegLayout) -> Result<ObservableSpec> {
    let labels = layout.subsystem_labels();
    let k = labels.len();
    let mut terms = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() % 2 == 1 {
            let factors = labels
                .iter()
                .enumerate()
                .map(|(i, lab)| {
                    if mask >> i & 1 == 1 {
                        ProjectorFactor::antisym(lab, 0, 1)
                    } else {
                        ProjectorFactor::sym(lab, 0, 1)
                    }
                })
                .collect();
            terms.push(Term::new(1.0, factors));
        }
    }
    ObservableSpec::new(2, terms)
}

/// `Tr ρ⊗ρ Σ_odd P^{±}⊗…`, equal to `((Tr ρ)² − Tr ρ²) / 2`; zero exactly
/// on pure states.
pub fn purity_deficit(rho: &DensityOperator) -> Result<f64> {
    ensure!(rho.layout().is_single_copy(), Error::Layout("single-copy state required".into()));
    let spec = odd_pattern_spec(rho.layout())?;
    expectation_mixed(&spec, &[rho, rho])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificationStatus {
    Certified,
    Uncertified,
}

/// An `n`-copy observable proposed as `V_n`, with the audit that certifies
/// it (if any).
#[derive(Clone, Debug)]
pub struct BoundCandidate {
    pub spec: ObservableSpec,
    pub certificate: Option<AuditReport>,
}

impl BoundCandidate {
    pub fn uncertified(spec: ObservableSpec) -> Self {
        BoundCandidate { spec, certificate: None }
    }

    pub fn status(&self) -> CertificationStatus {
        match &self.certificate {
            Some(a) if a.certified => CertificationStatus::Certified,
            _ => CertificationStatus::Uncertified,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenericBound {
    pub value: f64,
    pub raw_trace: f64,
    pub status: CertificationStatus,
}

/// `max(0, Tr ρ^{⊗n} V_n)^{1/n}`. Only a certified candidate makes this a
/// bound; otherwise the status says so.
pub fn generic_bound(rho: &DensityOperator, candidate: &BoundCandidate) -> Result<GenericBound> {
    let n = candidate.spec.n_copies();
    let copies = vec![rho; n];
    let raw = expectation_mixed(&candidate.spec, &copies)?;
    Ok(GenericBound { value: root_of(raw, n, true), raw_trace: raw, status: candidate.status() })
}

/// `max(0, Tr(ρ₁ ⊗ … ⊗ ρₙ V_n))^{1/n}` for copies that differ.
pub fn geometric_mean_bound(rhos: &[&DensityOperator], spec: &ObservableSpec) -> Result<f64> {
    ensure!(rhos.len() == spec.n_copies(), Error::CopyMismatch { expected: spec.n_copies(), got: rhos.len() });
    let first = rhos[0].layout();
    ensure!(rhos.iter().all(|r| r.layout() == first), Error::Layout("copies have different layouts".into()));
    let raw = expectation_mixed(spec, rhos)?;
    Ok(root_of(raw, rhos.len(), true))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub trials: usize,
    pub violations: usize,
    /// Smallest `∏ M(ψᵢ) − ⟨⊗ψᵢ|V|⊗ψᵢ⟩` seen.
    pub worst_margin: f64,
    pub certified: bool,
}

fn random_product_state<R: Rng + ?Sized>(layout: &LegLayout, rng: &mut R) -> Result<StateVector> {
    let mut amps = CVector::from_element(1, Complex64::new(1.0, 0.0));
    for &d in &layout.dims() {
        let leg = LegLayout::subsystems(&[("X", d)])?;
        amps = amps.kronecker(random_state(&leg, rng).amplitudes());
    }
    StateVector::new(amps, layout.clone())
}

/// Checks `∏ M(ψᵢ) ≥ ⟨⊗ψᵢ| V |⊗ψᵢ⟩` on random tuples of subnormalized pure
/// states (every fourth tuple built from product states).
///
/// `monotone` takes a normalized state; it is extended to subnormalized ones
/// by homogeneity.
pub fn inequality_audit<F, R>(
    spec: &ObservableSpec,
    layout: &LegLayout,
    monotone: F,
    n_trials: usize,
    rng: &mut R,
) -> Result<AuditReport>
where
    F: Fn(&StateVector) -> Result<f64>,
    R: Rng + ?Sized,
{
    ensure!(n_trials >= 1, Error::InvalidParameter("n_trials must be >= 1".into()));
    spec.check_layout(layout)?;
    let n = spec.n_copies();
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for trial in 0..n_trials {
        let mut tuple = Vec::with_capacity(n);
        for _ in 0..n {
            let psi = if trial % 4 == 3 { random_product_state(layout, rng)? } else { random_state(layout, rng) };
            let w: f64 = rng.random_range(0.0..1.0);
            tuple.push(psi.scaled((1.0 - w).sqrt()));
        }
        let refs: Vec<&StateVector> = tuple.iter().collect();
        let rhs = expectation_pure(spec, &refs)?;
        let mut lhs = 1.0;
        for psi in &tuple {
            lhs *= homogeneous(&monotone, psi)?;
        }
        let margin = lhs - rhs;
        if margin < VIOLATION_TOL {
            violations += 1;
        }
        worst = worst.min(margin);
    }
    Ok(AuditReport { trials: n_trials, violations, worst_margin: worst, certified: violations == 0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WernerRow {
    pub p: f64,
    pub bound: f64,
    pub wootters: f64,
    pub gap: f64,
}

/// Bound and closed-form concurrence on `points` equally spaced Werner
/// parameters in `[0, 1]`.
pub fn werner_sweep(points: usize, config: &BoundConfig) -> Result<Vec<WernerRow>> {
    ensure!(points >= 2, Error::InvalidParameter("need at least 2 grid points".into()));
    (0..points)
        .map(|i| {
            let p = i as f64 / (points - 1) as f64;
            let rho = named::werner(p)?;
            let bound = concurrence_lower_bound(&rho, config)?.bound;
            let wootters = wootters_concurrence(&rho)?;
            Ok(WernerRow { p, bound, wootters, gap: wootters - bound })
        })
        .collect()
}
