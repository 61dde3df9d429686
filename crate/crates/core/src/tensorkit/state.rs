use num_complex::Complex64;

use super::layout::LegLayout;
use super::linalg::{hermitian_eigensystem, max_hermitian_defect};
use super::{CMatrix, CVector};
use crate::error::{ensure, Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const EIGEN_FLOOR: f64 = -1e-10;
const NORM_TOL: f64 = 1e-10;

/// Amplitude vector over a composite space.
///
/// Construction only checks shape and finiteness; operators applied through
/// [`apply_to_legs`](super::apply_to_legs) may leave the physical range.
/// [`StateVector::check_physical`] enforces `0 < ‖ψ‖ ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    layout: LegLayout,
}

impl StateVector {
    pub fn new(amplitudes: CVector, layout: LegLayout) -> Result<Self> {
        ensure!(
            amplitudes.len() == layout.total_dim(),
            Error::DimensionMismatch { expected: layout.total_dim(), got: amplitudes.len() }
        );
        ensure!(
            amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            Error::InvalidState("non-finite amplitude".into())
        );
        Ok(StateVector { amplitudes, layout })
    }

    pub fn from_slice(amps: &[Complex64], layout: LegLayout) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps), layout)
    }

    /// Normalized state from real amplitudes (rescaled to unit norm).
    pub fn from_real(amps: &[f64], layout: LegLayout) -> Result<Self> {
        let v: Vec<Complex64> = amps.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        Self::from_slice(&v, layout)?.normalized()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn layout(&self) -> &LegLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn check_physical(&self) -> Result<()> {
        let n = self.norm();
        ensure!(n > 0.0 && n <= 1.0 + NORM_TOL, Error::InvalidState(format!("norm {n} outside (0, 1]")));
        Ok(())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        ensure!(n > 0.0, Error::InvalidState("zero vector".into()));
        Ok(StateVector { amplitudes: self.amplitudes.unscale(n), layout: self.layout.clone() })
    }

    pub fn scaled(&self, factor: f64) -> StateVector {
        StateVector { amplitudes: self.amplitudes.scale(factor), layout: self.layout.clone() }
    }

    /// `|self⟩ ⊗ |other⟩`; the copies of `other` are renumbered after those
    /// of `self`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let layout = self.layout.concat(&other.layout)?;
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        StateVector::new(amplitudes, layout)
    }

    /// `|ψ⟩^{⊗n}` with copies 0..n.
    pub fn power(&self, n: usize) -> Result<StateVector> {
        ensure!(n >= 1, Error::InvalidParameter("copy count must be >= 1".into()));
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|ψ⟩⟨ψ|` (trace equals `‖ψ‖²`).
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Density operator with leg metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    layout: LegLayout,
}

impl DensityOperator {
    /// Validates Hermiticity (1e-12), eigenvalues (≥ −1e-10) and trace in (0, 1].
    pub fn new(matrix: CMatrix, layout: LegLayout) -> Result<Self> {
        let rho = Self::new_unchecked(matrix, layout)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(matrix: CMatrix, layout: LegLayout) -> Result<Self> {
        let d = layout.total_dim();
        ensure!(
            matrix.nrows() == d && matrix.ncols() == d,
            Error::DimensionMismatch { expected: d, got: matrix.nrows() }
        );
        Ok(DensityOperator { matrix, layout })
    }

    fn validate(&self) -> Result<()> {
        let scale = self.matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = max_hermitian_defect(&self.matrix);
        ensure!(defect <= HERMITIAN_TOL * scale, Error::NotHermitian(defect));
        let tr = self.trace();
        ensure!(tr > 0.0 && tr <= 1.0 + NORM_TOL, Error::InvalidState(format!("trace {tr} outside (0, 1]")));
        let (evals, _) = hermitian_eigensystem(&self.matrix)?;
        ensure!(evals[0] >= EIGEN_FLOOR, Error::NotPositive(evals[0]));
        Ok(())
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        DensityOperator { matrix: psi.projector(), layout: psi.layout().clone() }
    }

    /// `Σ pᵢ |ψᵢ⟩⟨ψᵢ|`.
    pub fn mixture(parts: &[(f64, &StateVector)]) -> Result<Self> {
        ensure!(!parts.is_empty(), Error::InvalidState("empty mixture".into()));
        let layout = parts[0].1.layout().clone();
        let d = layout.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for (p, psi) in parts {
            ensure!(psi.layout() == &layout, Error::Layout("mixture components have different layouts".into()));
            m += psi.projector().scale(*p);
        }
        Self::new(m, layout)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &LegLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigensystem(&self) -> Result<(Vec<f64>, CMatrix)> {
        hermitian_eigensystem(&self.matrix)
    }

    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(self.eigensystem()?.0.iter().filter(|&&e| e > tol).count())
    }

    /// `ρ ⊗ σ`, with copies of `other` renumbered after those of `self`.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let layout = self.layout.concat(&other.layout)?;
        Self::new_unchecked(self.matrix.kronecker(&other.matrix), layout)
    }

    /// Conjugation `U ρ U†` by a unitary on the full space.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityOperator> {
        ensure!(u.nrows() == self.dim(), Error::DimensionMismatch { expected: self.dim(), got: u.nrows() });
        Self::new_unchecked(u * &self.matrix * u.adjoint(), self.layout.clone())
    }

    /// Same matrix, different layout of equal total dimension.
    pub fn relabel(&self, layout: LegLayout) -> Result<DensityOperator> {
        Self::new_unchecked(self.matrix.clone(), layout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrong_length_rejected() {
        let l = LegLayout::qubits(2).unwrap();
        assert!(StateVector::from_real(&[1.0, 0.0], l).is_err());
    }

    #[test]
    fn power_builds_copies() {
        let l = LegLayout::bipartite(2, 2).unwrap();
        let psi = StateVector::from_real(&[1.0, 0.0, 0.0, 1.0], l).unwrap();
        let p3 = psi.power(3).unwrap();
        assert_eq!(p3.dim(), 64);
        assert_eq!(p3.layout().n_copies(), 3);
        assert!((p3.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_density_rejected() {
        let l = LegLayout::subsystems(&[("A", 2)]).unwrap();
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0), Complex64::new(0.5, 0.0)],
        );
        assert!(matches!(DensityOperator::new(m, l), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn negative_density_rejected() {
        let l = LegLayout::subsystems(&[("A", 2)]).unwrap();
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![Complex64::new(1.2, 0.0), Complex64::new(-0.2, 0.0)]));
        assert!(matches!(DensityOperator::new(m, l), Err(Error::NotPositive(_))));
    }

    #[test]
    fn subnormalized_states_are_physical() {
        let l = LegLayout::subsystems(&[("A", 2)]).unwrap();
        let psi = StateVector::from_real(&[1.0, 1.0], l).unwrap().scaled(0.5);
        assert!(psi.check_physical().is_ok());
        assert!(psi.scaled(3.0).check_physical().is_err());
    }
}
