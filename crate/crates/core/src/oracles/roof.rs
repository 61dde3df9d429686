use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure, Error, Result};
use crate::monotones::homogeneous;
use crate::tensorkit::{haar_random_unitary, CMatrix, DensityOperator, StateVector};

const RANK_CUTOFF: f64 = 1e-14;

/// Search settings for [`convex_roof_search`].
#[derive(Clone, Copy, Debug)]
pub struct RoofSearch {
    /// Number of pure states in the decomposition; `None` means `rank + 2`.
    pub ensemble_size: Option<usize>,
    pub iterations: usize,
    /// Iterations between random restarts.
    pub restart_period: usize,
}

impl Default for RoofSearch {
    fn default() -> Self {
        RoofSearch { ensemble_size: None, iterations: 10_000, restart_period: 2_500 }
    }
}

/// Pure-state decomposition `ψᵢ = Σⱼ Uᵢⱼ √μⱼ |eⱼ⟩` of `ρ`, parametrized by
/// an `m × r` isometry `U`. Every isometry yields `Σ |ψᵢ⟩⟨ψᵢ| = ρ`.
#[derive(Clone, Debug)]
pub struct DecompositionCandidate {
    base: CMatrix,
    mixing: CMatrix,
    layout: crate::tensorkit::LegLayout,
}

impl DecompositionCandidate {
    fn new(rho: &DensityOperator, mixing: CMatrix) -> Result<Self> {
        let base = weighted_eigenvectors(rho)?;
        ensure!(
            mixing.ncols() == base.ncols() && mixing.nrows() >= base.ncols(),
            Error::InvalidParameter(format!("mixing matrix must be m x {} with m >= {}", base.ncols(), base.ncols()))
        );
        Ok(DecompositionCandidate { base, mixing, layout: rho.layout().clone() })
    }

    /// Subnormalized members `ψᵢ`; `Σ ‖ψᵢ‖² = Tr ρ`.
    pub fn ensemble(&self) -> Vec<StateVector> {
        let psi = &self.base * self.mixing.transpose();
        psi.column_iter()
            .map(|c| StateVector::new(c.into_owned(), self.layout.clone()).expect("layout matches"))
            .collect()
    }

    /// Average `Σ ‖ψᵢ‖² M(ψᵢ/‖ψᵢ‖)`.
    pub fn average<F>(&self, monotone: &F) -> Result<f64>
    where
        F: Fn(&StateVector) -> Result<f64>,
    {
        self.ensemble().iter().map(|psi| homogeneous(monotone, psi)).sum()
    }
}

/// Columns `√μⱼ |eⱼ⟩` over the support of `ρ`.
fn weighted_eigenvectors(rho: &DensityOperator) -> Result<CMatrix> {
    let (vals, vecs) = rho.eigensystem()?;
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > RANK_CUTOFF).collect();
    ensure!(!keep.is_empty(), Error::InvalidState("zero density operator".into()));
    let mut base = CMatrix::zeros(rho.dim(), keep.len());
    for (c, &j) in keep.iter().enumerate() {
        base.set_column(c, &vecs.column(j).scale(vals[j].sqrt()));
    }
    Ok(base)
}

/// Closest isometry `W V†` from the polar decomposition of `m`.
fn orthonormalize(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    svd.u.expect("requested") * svd.v_t.expect("requested")
}

fn random_isometry<R: Rng + ?Sized>(m: usize, r: usize, rng: &mut R) -> CMatrix {
    haar_random_unitary(m, rng).columns(0, r).into_owned()
}

fn perturbation<R: Rng + ?Sized>(m: usize, r: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(m, r, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Upper bound on the convex roof `min Σ pᵢ M(ψᵢ)` over pure decompositions of `ρ`.
///
/// Random local search over isometries with periodic restarts. The returned
/// value is the best average seen, so for a fixed RNG seed it never
/// increases with `iterations`.
pub fn convex_roof_search<F, R>(
    rho: &DensityOperator,
    monotone: F,
    settings: RoofSearch,
    rng: &mut R,
) -> Result<(f64, DecompositionCandidate)>
where
    F: Fn(&StateVector) -> Result<f64>,
    R: Rng + ?Sized,
{
    let rank = weighted_eigenvectors(rho)?.ncols();
    let m = settings.ensemble_size.unwrap_or(rank + 2);
    ensure!(m >= rank, Error::InvalidParameter(format!("ensemble size {m} below rank {rank}")));
    ensure!(settings.restart_period >= 1, Error::InvalidParameter("restart period must be >= 1".into()));

    let mut current = DecompositionCandidate::new(rho, random_isometry(m, rank, rng))?;
    let mut current_val = current.average(&monotone)?;
    let mut best = current.clone();
    let mut best_val = current_val;
    let mut step = 0.3;

    for it in 1..settings.iterations.max(1) {
        if it % settings.restart_period == 0 {
            current.mixing = random_isometry(m, rank, rng);
            current_val = current.average(&monotone)?;
            step = 0.3;
        } else {
            let proposal = &current.mixing + perturbation(m, rank, rng).scale(step);
            let trial = DecompositionCandidate { mixing: orthonormalize(&proposal), ..current.clone() };
            let val = trial.average(&monotone)?;
            if val < current_val {
                current = trial;
                current_val = val;
                step = (step * 1.5).min(1.0);
            } else {
                step = (step * 0.95).max(1e-9);
            }
        }
        if current_val < best_val {
            best_val = current_val;
            best = current.clone();
        }
    }
    Ok((best_val, best))
}
