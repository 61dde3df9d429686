use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::layout::LegLayout;
use super::state::{DensityOperator, StateVector};
use super::{CMatrix, CVector};
use crate::error::{ensure, Error, Result};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for x in q.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    q
}

/// Haar-random normalized pure state.
pub fn random_state<R: Rng + ?Sized>(layout: &LegLayout, rng: &mut R) -> StateVector {
    let d = layout.total_dim();
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    StateVector::new(v.unscale(n), layout.clone()).expect("layout-sized vector")
}

/// Random normalized `d_A × d_B` state on subsystems `A`, `B` with exactly
/// `rank` nonzero Schmidt coefficients: amplitude matrix `G H` with Gaussian
/// `G` (`d_A × rank`) and `H` (`rank × d_B`).
pub fn random_schmidt_rank_state<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    rng: &mut R,
) -> Result<StateVector> {
    ensure!(
        (1..=dim_a.min(dim_b)).contains(&rank),
        Error::InvalidParameter(format!("Schmidt rank {rank} outside 1..={}", dim_a.min(dim_b)))
    );
    let m = ginibre(dim_a, rank, rng) * ginibre(rank, dim_b, rng);
    // row-major flattening of m is the column-major storage of mᵀ
    let v = CVector::from_column_slice(m.transpose().as_slice());
    StateVector::new(v, LegLayout::bipartite(dim_a, dim_b)?)?.normalized()
}

/// Random unit-trace density operator of the requested rank (`G G† / Tr`,
/// with `G` a `dim × rank` Gaussian matrix).
pub fn random_density<R: Rng + ?Sized>(layout: &LegLayout, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    let d = layout.total_dim();
    ensure!((1..=d).contains(&rank), Error::InvalidParameter(format!("rank {rank} outside 1..={d}")));
    let g = ginibre(d, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    let m = (&m + m.adjoint()).unscale(2.0);
    DensityOperator::new(m, layout.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schmidt_rank_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let psi = random_schmidt_rank_state(3, 4, 2, &mut rng).unwrap();
        let sv = crate::tensorkit::schmidt_coefficients(&psi, &[0]).unwrap();
        assert!(sv[1] > 1e-3 && sv[2] < 1e-14, "{sv:?}");
        assert!((psi.norm() - 1.0).abs() < 1e-14);
        assert!(random_schmidt_rank_state(3, 4, 4, &mut rng).is_err());
    }

    #[test]
    fn unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..6 {
            let u = haar_random_unitary(d, &mut rng);
            let defect = (&u * u.adjoint() - CMatrix::identity(d, d)).camax();
            assert!(defect <= 1e-12, "d={d} defect {defect}");
        }
        let u = haar_random_unitary(1, &mut rng);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_density_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = LegLayout::bipartite(2, 2).unwrap();
        let rho = random_density(&l, 1, &mut rng).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let full = random_density(&l, 4, &mut rng).unwrap();
        assert!(full.eigensystem().unwrap().0.iter().all(|&e| e > 0.0));
        assert!(random_density(&l, 0, &mut rng).is_err());
        assert!(random_density(&l, 5, &mut rng).is_err());
    }

    #[test]
    fn seeded_output_is_deterministic() {
        let l = LegLayout::bipartite(3, 3).unwrap();
        let a = random_state(&l, &mut ChaCha8Rng::seed_from_u64(9));
        let b = random_state(&l, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        let ra = random_density(&l, 2, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let rb = random_density(&l, 2, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(ra, rb);
    }
}
