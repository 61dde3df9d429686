//! Closed-form and brute-force reference values, independent of the
//! invariant-observable machinery.

mod roof;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::tensorkit::{
    hermitian_eigensystem, partial_transpose, psd_sqrt, schmidt_coefficients, CMatrix, DensityOperator, StateVector,
};

pub use roof::{convex_roof_search, DecompositionCandidate, RoofSearch};

fn two_qubit_check(rho: &DensityOperator) -> Result<()> {
    ensure!(
        rho.layout().dims() == [2, 2],
        Error::Layout(format!("two-qubit state required, got dims {:?}", rho.layout().dims()))
    );
    Ok(())
}

/// `σy ⊗ σy`.
fn spin_flip() -> CMatrix {
    let mut y = CMatrix::zeros(4, 4);
    y[(0, 3)] = Complex64::new(-1.0, 0.0);
    y[(1, 2)] = Complex64::new(1.0, 0.0);
    y[(2, 1)] = Complex64::new(1.0, 0.0);
    y[(3, 0)] = Complex64::new(-1.0, 0.0);
    y
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)` of a two-qubit state.
///
/// The `λᵢ` are the singular values of `√ρ (σy⊗σy) √ρ*`, i.e. the square
/// roots of the eigenvalues of `√ρ ρ̃ √ρ`. Taking them as singular values
/// keeps them accurate to round-off even when they vanish.
pub fn wootters_concurrence(rho: &DensityOperator) -> Result<f64> {
    two_qubit_check(rho)?;
    let s = psd_sqrt(rho.matrix())?;
    let x = &s * spin_flip() * s.map(|z| z.conj());
    let mut lambda: Vec<f64> = x.singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

/// Three-tangle `4 |Det|` of a three-qubit pure state, with `Det` Cayley's
/// hyperdeterminant of the 2×2×2 amplitude tensor.
pub fn ckw_tangle(psi: &StateVector) -> Result<f64> {
    ensure!(
        psi.layout().dims() == [2, 2, 2],
        Error::Layout(format!("three-qubit state required, got dims {:?}", psi.layout().dims()))
    );
    let a = |i: usize, j: usize, k: usize| psi.amplitudes()[4 * i + 2 * j + k];
    let d1 = a(0, 0, 0).powi(2) * a(1, 1, 1).powi(2)
        + a(0, 0, 1).powi(2) * a(1, 1, 0).powi(2)
        + a(0, 1, 0).powi(2) * a(1, 0, 1).powi(2)
        + a(1, 0, 0).powi(2) * a(0, 1, 1).powi(2);
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1) + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    Ok(4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm())
}

/// Convention for the G-concurrence geometric mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GConvention {
    /// `d (∏ μᵢ)^{1/d}` with `μᵢ` the reduced-state eigenvalues (squared
    /// Schmidt coefficients); the maximally entangled state gives 1.
    #[default]
    Normalized,
    /// `(∏ λᵢ)^{1/d}` with `λᵢ` the Schmidt coefficients themselves.
    SchmidtProduct,
}

/// G-concurrence of a `d × d` pure state from its Schmidt coefficients.
pub fn schmidt_g_concurrence(psi: &StateVector, convention: GConvention) -> Result<f64> {
    let dims = psi.layout().dims();
    ensure!(
        dims.len() == 2 && dims[0] == dims[1],
        Error::Layout(format!("square bipartite state required, got dims {dims:?}"))
    );
    let d = dims[0] as f64;
    let lambda = schmidt_coefficients(psi, &[0])?;
    let prod: f64 = lambda.iter().product();
    Ok(match convention {
        GConvention::Normalized => d * (prod * prod).powf(1.0 / d),
        GConvention::SchmidtProduct => prod.powf(1.0 / d),
    })
}

/// Sum of the absolute values of the negative eigenvalues of `ρ^{T_B}`, with
/// `B` the legs not in `first_block`.
pub fn negativity(rho: &DensityOperator, first_block: &[usize]) -> Result<f64> {
    let n = rho.layout().len();
    let second: Vec<usize> = (0..n).filter(|l| !first_block.contains(l)).collect();
    ensure!(
        !first_block.is_empty() && !second.is_empty() && first_block.iter().all(|&l| l < n),
        Error::InvalidParameter("bipartition needs two nonempty blocks".into())
    );
    let pt = partial_transpose(rho, &second)?;
    let (vals, _) = hermitian_eigensystem(&pt)?;
    Ok(vals.iter().filter(|&&v| v < 0.0).map(|v| -v).sum())
}

/// Von Neumann entropy `−Tr ρ_r ln ρ_r` of the reduced state of a pure state.
pub fn reduced_entropy(psi: &StateVector, first_block: &[usize]) -> Result<f64> {
    let lambda = schmidt_coefficients(psi, first_block)?;
    Ok(lambda.iter().map(|l| l * l).filter(|&mu| mu > 0.0).map(|mu| -mu * mu.ln()).sum::<f64>().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorkit::{named, random_state, LegLayout};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wootters_reference_points() {
        let singlet = DensityOperator::from_pure(&named::singlet());
        assert!((wootters_concurrence(&singlet).unwrap() - 1.0).abs() < 1e-12);
        let mixed = named::maximally_mixed(&LegLayout::bipartite(2, 2).unwrap());
        assert!(wootters_concurrence(&mixed).unwrap() < 1e-12);
        let three = DensityOperator::from_pure(&named::max_entangled(3).unwrap());
        assert!(wootters_concurrence(&three).is_err());
    }

    #[test]
    fn wootters_on_werner_family() {
        // λ = ((1+3p)/4, (1-p)/4, (1-p)/4, (1-p)/4), so C = max(0, (3p-1)/2)
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let c = wootters_concurrence(&named::werner(p).unwrap()).unwrap();
            let expect = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((c - expect).abs() < 1e-12, "p={p}: {c} vs {expect}");
        }
    }

    #[test]
    fn tangle_reference_points() {
        assert!((ckw_tangle(&named::ghz()).unwrap() - 1.0).abs() < 1e-14);
        assert!(ckw_tangle(&named::w_state()).unwrap() < 1e-15);
        assert_eq!(ckw_tangle(&named::product(&[2, 2, 2]).unwrap()).unwrap(), 0.0);
        assert!(ckw_tangle(&named::singlet()).is_err());
    }

    #[test]
    fn g_concurrence_conventions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3, 4] {
            let me = named::max_entangled(d).unwrap();
            assert!((schmidt_g_concurrence(&me, GConvention::Normalized).unwrap() - 1.0).abs() < 1e-12);
            let psi = random_state(&LegLayout::bipartite(d, d).unwrap(), &mut rng);
            let norm = schmidt_g_concurrence(&psi, GConvention::Normalized).unwrap();
            let product = schmidt_g_concurrence(&psi, GConvention::SchmidtProduct).unwrap();
            assert!((product - (norm / d as f64).sqrt()).abs() < 1e-12);
        }
        let mut a = [0.0; 9];
        a[0] = 1.0;
        a[4] = 1.0;
        let r2 = StateVector::from_real(&a, LegLayout::bipartite(3, 3).unwrap()).unwrap();
        assert_eq!(schmidt_g_concurrence(&r2, GConvention::Normalized).unwrap(), 0.0);
        let rect = random_state(&LegLayout::bipartite(2, 3).unwrap(), &mut rng);
        assert!(schmidt_g_concurrence(&rect, GConvention::Normalized).is_err());
    }

    #[test]
    fn negativity_reference_points() {
        let singlet = DensityOperator::from_pure(&named::singlet());
        assert!((negativity(&singlet, &[0]).unwrap() - 0.5).abs() < 1e-14);
        let prod = DensityOperator::from_pure(&named::product(&[2, 2]).unwrap());
        assert!(negativity(&prod, &[0]).unwrap() < 1e-15);
        let mixed = named::maximally_mixed(&LegLayout::bipartite(2, 2).unwrap());
        assert!(negativity(&mixed, &[0]).unwrap() < 1e-15);
        assert!(negativity(&mixed, &[]).is_err());
    }

    #[test]
    fn entropy_reference_points() {
        let ln2 = 2f64.ln();
        assert!((reduced_entropy(&named::bell_phi_plus(), &[0]).unwrap() - ln2).abs() < 1e-14);
        assert!(reduced_entropy(&named::product(&[2, 2]).unwrap(), &[0]).unwrap().abs() < 1e-15);
        let me3 = named::max_entangled(3).unwrap();
        assert!((reduced_entropy(&me3, &[0]).unwrap() - 3f64.ln()).abs() < 1e-14);
    }
}
