use num_complex::Complex64;

use super::layout::LegLayout;
use super::legs::{apply_amplitudes, permute_axes};
use super::state::{DensityOperator, StateVector};
use super::{CMatrix, CVector};
use crate::error::{ensure, Error, Result};

/// Hermiticity tolerance for eigensolver input.
pub const EIGEN_HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below this are rejected by [`psd_sqrt`]; those above are clamped to 0.
pub const PSD_FLOOR: f64 = -1e-8;

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub(crate) fn max_hermitian_defect(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (as columns).
pub fn hermitian_eigensystem(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    ensure!(h.is_square(), Error::DimensionMismatch { expected: h.nrows(), got: h.ncols() });
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = max_hermitian_defect(h);
    ensure!(defect <= EIGEN_HERMITIAN_TOL * scale, Error::NotHermitian(defect));
    // symmetrize away the tolerated defect before handing to the solver
    let sym = (h + h.adjoint()).unscale(2.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors =
        CMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    Ok((values, vectors))
}

/// Principal square root of a positive semidefinite operator.
pub fn psd_sqrt(rho: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigensystem(rho)?;
    ensure!(values[0] >= PSD_FLOOR, Error::NotPositive(values[0]));
    let roots = CVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v.max(0.0).sqrt(), 0.0)));
    Ok(&vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint())
}

fn row_major(m: &CMatrix) -> Vec<Complex64> {
    let (r, c) = m.shape();
    (0..r).flat_map(|i| (0..c).map(move |j| m[(i, j)])).collect()
}

fn check_leg_subset(layout: &LegLayout, legs: &[usize]) -> Result<()> {
    for (i, &l) in legs.iter().enumerate() {
        ensure!(l < layout.len(), Error::Layout(format!("leg {l} out of range")));
        ensure!(!legs[..i].contains(&l), Error::Layout(format!("leg {l} listed twice")));
    }
    Ok(())
}

/// Trace out every leg not in `keep`. Kept legs retain their layout order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    ensure!(!keep.is_empty(), Error::InvalidParameter("empty keep set".into()));
    let layout = rho.layout();
    check_leg_subset(layout, keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..layout.len()).filter(|l| !kept.contains(l)).collect();
    let dims = layout.dims();
    let n = dims.len();
    let k_dim: usize = kept.iter().map(|&l| dims[l]).product();
    let t_dim: usize = traced.iter().map(|&l| dims[l]).product();

    // rows legs 0..n, column legs n..2n
    let doubled: Vec<usize> = dims.iter().chain(dims.iter()).copied().collect();
    let axis_perm: Vec<usize> =
        kept.iter().chain(traced.iter()).copied().chain(kept.iter().chain(traced.iter()).map(|&l| l + n)).collect();
    let flat = permute_axes(&row_major(rho.matrix()), &doubled, &axis_perm);

    let mut out = CMatrix::zeros(k_dim, k_dim);
    for a in 0..k_dim {
        for b in 0..k_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..t_dim {
                acc += flat[((a * t_dim + t) * k_dim + b) * t_dim + t];
            }
            out[(a, b)] = acc;
        }
    }
    DensityOperator::new_unchecked(out, layout.select(&kept)?)
}

/// Partial transpose on the listed legs.
pub fn partial_transpose(rho: &DensityOperator, legs: &[usize]) -> Result<CMatrix> {
    let layout = rho.layout();
    check_leg_subset(layout, legs)?;
    let dims = layout.dims();
    let n = dims.len();
    let doubled: Vec<usize> = dims.iter().chain(dims.iter()).copied().collect();
    let axis_perm: Vec<usize> = (0..2 * n)
        .map(|a| {
            let leg = a % n;
            if legs.contains(&leg) {
                if a < n {
                    a + n
                } else {
                    a - n
                }
            } else {
                a
            }
        })
        .collect();
    let flat = permute_axes(&row_major(rho.matrix()), &doubled, &axis_perm);
    let d = rho.dim();
    Ok(CMatrix::from_row_slice(d, d, &flat))
}

/// Validate that `first_block` and its complement split the legs into two
/// nonempty blocks.
pub(crate) fn bipartition(layout: &LegLayout, first_block: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    check_leg_subset(layout, first_block)?;
    let mut a = first_block.to_vec();
    a.sort_unstable();
    let b: Vec<usize> = (0..layout.len()).filter(|l| !a.contains(l)).collect();
    ensure!(!a.is_empty() && !b.is_empty(), Error::InvalidParameter("bipartition needs two nonempty blocks".into()));
    Ok((a, b))
}

/// Amplitude matrix `M[a, b]` of `ψ` across the bipartition.
pub(crate) fn amplitude_matrix(psi: &StateVector, first_block: &[usize]) -> Result<CMatrix> {
    let layout = psi.layout();
    let (a, b) = bipartition(layout, first_block)?;
    let dims = layout.dims();
    let perm: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    let flat = permute_axes(psi.amplitudes().as_slice(), &dims, &perm);
    let rows: usize = a.iter().map(|&l| dims[l]).product();
    let cols: usize = b.iter().map(|&l| dims[l]).product();
    Ok(CMatrix::from_row_slice(rows, cols, &flat))
}

/// Schmidt coefficients (singular values of the amplitude matrix), descending.
///
/// Their squares sum to `‖ψ‖²`; there are `min(d_first, d_rest)` of them.
pub fn schmidt_coefficients(psi: &StateVector, first_block: &[usize]) -> Result<Vec<f64>> {
    let m = amplitude_matrix(psi, first_block)?;
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `(K on leg ⊗ 1) ρ (K on leg ⊗ 1)†` for a full matrix ρ.
pub(crate) fn conjugate_on_legs(k: &CMatrix, legs: &[usize], dims: &[usize], rho: &CMatrix) -> Result<CMatrix> {
    let d = rho.nrows();
    let left = apply_columns(k, legs, dims, rho)?;
    let right = apply_columns(k, legs, dims, &left.adjoint())?;
    debug_assert_eq!(right.nrows(), d);
    Ok(right.adjoint())
}

fn apply_columns(k: &CMatrix, legs: &[usize], dims: &[usize], m: &CMatrix) -> Result<CMatrix> {
    let cols = (0..m.ncols())
        .map(|j| {
            let col: Vec<Complex64> = m.column(j).iter().copied().collect();
            apply_amplitudes(k, legs, dims, &col).map(CVector::from_vec)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_columns(&cols))
}

/// Computational basis state `|digits⟩`.
pub fn basis_state(layout: &LegLayout, digits: &[usize]) -> Result<StateVector> {
    let dims = layout.dims();
    ensure!(
        digits.len() == dims.len() && digits.iter().zip(&dims).all(|(d, n)| d < n),
        Error::InvalidParameter(format!("basis digits {digits:?} do not fit layout"))
    );
    let mut idx = 0;
    for (d, n) in digits.iter().zip(&dims) {
        idx = idx * n + d;
    }
    let mut v = CVector::zeros(layout.total_dim());
    v[idx] = Complex64::new(1.0, 0.0);
    StateVector::new(v, layout.clone())
}

/// Largest absolute row sum, `‖M‖_∞`.
pub fn inf_norm(m: &CMatrix) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorkit::named;

    fn real_diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0))))
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        assert_eq!(kron(&identity(2), &identity(3)).nrows(), 6);
    }

    #[test]
    fn eigen_of_diag_and_sigma_x() {
        let (v, _) = hermitian_eigensystem(&real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
        let x = CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|r| Complex64::new(r, 0.0)));
        let (v, _) = hermitian_eigensystem(&x).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0].map(|r| Complex64::new(r, 0.0)));
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sqrt_of_diag() {
        assert!((psd_sqrt(&identity(3)).unwrap() - identity(3)).norm() < 1e-14);
        let r = psd_sqrt(&real_diag(&[4.0, 9.0])).unwrap();
        assert!((r - real_diag(&[2.0, 3.0])).norm() < 1e-14);
        assert!(matches!(psd_sqrt(&real_diag(&[1.0, -1e-6])), Err(Error::NotPositive(_))));
        assert!(psd_sqrt(&real_diag(&[1.0, -1e-9])).is_ok());
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let rho = DensityOperator::from_pure(&named::bell_phi_plus());
        let ra = partial_trace(&rho, &[0]).unwrap();
        assert!((ra.matrix() - identity(2).scale(0.5)).norm() < 1e-15);
        assert!(partial_trace(&rho, &[]).is_err());
    }

    #[test]
    fn partial_trace_keeps_second_leg() {
        let l = LegLayout::bipartite(2, 3).unwrap();
        let ra = real_diag(&[0.25, 0.75]);
        let rb = real_diag(&[0.5, 0.3, 0.2]);
        let rho = DensityOperator::new(kron(&ra, &rb), l).unwrap();
        let got = partial_trace(&rho, &[1]).unwrap();
        assert!((got.matrix() - rb).norm() < 1e-15);
        assert_eq!(got.layout().legs()[0].subsystem, "B");
    }

    #[test]
    fn schmidt_of_bell_and_product() {
        let s = schmidt_coefficients(&named::bell_phi_plus(), &[0]).unwrap();
        assert!(s.iter().all(|x| (x - 0.5f64.sqrt()).abs() < 1e-15));
        let p = named::product(&[2, 2]).unwrap();
        assert_eq!(schmidt_coefficients(&p, &[0]).unwrap(), vec![1.0, 0.0]);
        assert!(schmidt_coefficients(&p, &[0, 1]).is_err());
        assert!(schmidt_coefficients(&p, &[]).is_err());
    }

    #[test]
    fn singlet_partial_transpose_spectrum() {
        let rho = DensityOperator::from_pure(&named::singlet());
        let pt = partial_transpose(&rho, &[1]).unwrap();
        let (v, _) = hermitian_eigensystem(&pt).unwrap();
        assert!((v[0] + 0.5).abs() < 1e-14);
        for x in &v[1..] {
            assert!((x - 0.5).abs() < 1e-14);
        }
    }
}
