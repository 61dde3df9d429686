//! Statistical certification of local-unitary invariance by Haar sampling.

use num_complex::Complex64;
use rand::Rng;

use super::eval::{realize, CompiledSpec};
use super::spec::ObservableSpec;
use crate::error::{ensure, Error, Result};
use crate::tensorkit::{apply_amplitudes, haar_random_unitary, inf_norm, CMatrix, CVector, LegLayout};

/// Above this `n`-copy dimension the check runs matrix-free on random probes.
pub const TWIRL_DENSE_MAX: usize = 256;

/// One Haar unitary per subsystem label, keyed by label.
fn sample_local_unitaries<R: Rng + ?Sized>(layout: &LegLayout, rng: &mut R) -> Vec<(String, CMatrix)> {
    let mut out: Vec<(String, CMatrix)> = Vec::new();
    for leg in layout.legs() {
        if !out.iter().any(|(s, _)| s == &leg.subsystem) {
            out.push((leg.subsystem.clone(), haar_random_unitary(leg.dim, rng)));
        }
    }
    out
}

fn unitary_for<'a>(us: &'a [(String, CMatrix)], subsystem: &str) -> &'a CMatrix {
    &us.iter().find(|(s, _)| s == subsystem).expect("sampled per label").1
}

/// Dense `U = ⊗_legs u_{subsystem(leg)}` on a multi-copy layout.
fn dense_local(us: &[(String, CMatrix)], layout: &LegLayout) -> CMatrix {
    let mut u = CMatrix::identity(1, 1);
    for leg in layout.legs() {
        u = u.kronecker(unitary_for(us, &leg.subsystem));
    }
    u
}

/// Apply `⊗_legs u` (or its adjoint) to a vector, leg by leg.
fn apply_local(
    us: &[(String, CMatrix)],
    layout: &LegLayout,
    x: Vec<Complex64>,
    adjoint: bool,
) -> Result<Vec<Complex64>> {
    let dims = layout.dims();
    let mut cur = x;
    for (pos, leg) in layout.legs().iter().enumerate() {
        let u = unitary_for(us, &leg.subsystem);
        let op = if adjoint { u.adjoint() } else { u.clone() };
        cur = apply_amplitudes(&op, &[pos], &dims, &cur)?;
    }
    Ok(cur)
}

/// `max_k ‖U_k A U_k† − A‖_∞` for a dense operator on a multi-copy layout,
/// with `U_k = ⊗ u_s^{⊗n}` Haar-sampled per subsystem.
pub fn twirl_deviation_dense<R: Rng + ?Sized>(
    op: &CMatrix,
    layout: &LegLayout,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    ensure!(n_samples >= 1, Error::InvalidParameter("n_samples must be >= 1".into()));
    ensure!(
        op.nrows() == layout.total_dim(),
        Error::DimensionMismatch { expected: layout.total_dim(), got: op.nrows() }
    );
    let mut worst = 0.0f64;
    for _ in 0..n_samples {
        let us = sample_local_unitaries(layout, rng);
        let u = dense_local(&us, layout);
        worst = worst.max(inf_norm(&(&u * op * u.adjoint() - op)));
    }
    Ok(worst)
}

/// Largest deviation of `A` from its local-unitary conjugates over
/// `n_samples` Haar draws.
///
/// Up to [`TWIRL_DENSE_MAX`] the exact `‖U A U† − A‖_∞` is returned. Larger
/// spaces use one random unit probe `x` per sample and report
/// `‖(U A U† − A) x‖₂`, which never forms `A`.
pub fn twirl_invariance_check<R: Rng + ?Sized>(
    spec: &ObservableSpec,
    single: &LegLayout,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    ensure!(n_samples >= 1, Error::InvalidParameter("n_samples must be >= 1".into()));
    let multi = single.replicate(spec.n_copies())?;
    if multi.total_dim() <= TWIRL_DENSE_MAX {
        let a = realize(spec, single)?;
        return twirl_deviation_dense(&a, &multi, n_samples, rng);
    }
    let compiled = CompiledSpec::<Complex64>::new(spec, single)?;
    let mut worst = 0.0f64;
    for _ in 0..n_samples {
        let us = sample_local_unitaries(&multi, rng);
        let probe = crate::tensorkit::random_state(&multi, rng);
        let x: Vec<Complex64> = probe.amplitudes().iter().copied().collect();
        let direct = compiled.apply(&x);
        let twirled = apply_local(&us, &multi, compiled.apply(&apply_local(&us, &multi, x, true)?), false)?;
        let diff = CVector::from_vec(twirled) - CVector::from_vec(direct);
        worst = worst.max(diff.norm());
    }
    Ok(worst)
}
