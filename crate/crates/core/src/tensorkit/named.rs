//! Built-in reference states.

use super::layout::LegLayout;
use super::state::{DensityOperator, StateVector};
use super::CMatrix;
use crate::error::{ensure, Error, Result};

/// `(|01⟩ − |10⟩)/√2`.
pub fn singlet() -> StateVector {
    StateVector::from_real(&[0.0, 1.0, -1.0, 0.0], LegLayout::bipartite(2, 2).unwrap()).unwrap()
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> StateVector {
    StateVector::from_real(&[1.0, 0.0, 0.0, 1.0], LegLayout::bipartite(2, 2).unwrap()).unwrap()
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz() -> StateVector {
    let mut a = [0.0; 8];
    a[0] = 1.0;
    a[7] = 1.0;
    StateVector::from_real(&a, LegLayout::qubits(3).unwrap()).unwrap()
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w_state() -> StateVector {
    let mut a = [0.0; 8];
    a[1] = 1.0;
    a[2] = 1.0;
    a[4] = 1.0;
    StateVector::from_real(&a, LegLayout::qubits(3).unwrap()).unwrap()
}

/// `Σᵢ |ii⟩ / √d` on a `d × d` system.
pub fn max_entangled(d: usize) -> Result<StateVector> {
    let layout = LegLayout::bipartite(d, d)?;
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        a[i * d + i] = 1.0;
    }
    StateVector::from_real(&a, layout)
}

/// `|0…0⟩` on subsystems of the given dimensions.
pub fn product(dims: &[usize]) -> Result<StateVector> {
    ensure!(!dims.is_empty(), Error::InvalidParameter("no subsystems".into()));
    let labels: Vec<String> = (0..dims.len()).map(super::layout::subsystem_label).collect();
    let parts: Vec<(&str, usize)> = labels.iter().map(|s| s.as_str()).zip(dims.iter().copied()).collect();
    let layout = LegLayout::subsystems(&parts)?;
    let mut a = vec![0.0; layout.total_dim()];
    a[0] = 1.0;
    StateVector::from_real(&a, layout)
}

/// Werner state `p |ψ⁻⟩⟨ψ⁻| + (1 − p) 1/4`.
pub fn werner(p: f64) -> Result<DensityOperator> {
    ensure!((0.0..=1.0).contains(&p), Error::InvalidParameter(format!("Werner weight {p} outside [0, 1]")));
    let s = singlet();
    let m = s.projector().scale(p) + CMatrix::identity(4, 4).scale((1.0 - p) / 4.0);
    DensityOperator::new(m, s.layout().clone())
}

/// Maximally mixed state on a layout.
pub fn maximally_mixed(layout: &LegLayout) -> DensityOperator {
    let d = layout.total_dim();
    DensityOperator::new(CMatrix::identity(d, d).unscale(d as f64), layout.clone()).unwrap()
}
