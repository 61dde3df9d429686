use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::tensorkit::CMatrix;

/// Operator on `h^{⊗n}` (`dim h = d`) moving the factor in slot `k` to slot
/// `perm[k]`; for `n = 3` the cyclic `perm = [1, 2, 0]` sends `ψ⊗φ⊗ξ` to
/// `ξ⊗ψ⊗φ`.
pub fn permutation_operator(perm: &[usize], d: usize, n: usize) -> Result<CMatrix> {
    ensure!(d >= 1, Error::InvalidParameter("local dimension must be >= 1".into()));
    ensure!(
        perm.len() == n && {
            let mut s = perm.to_vec();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &p)| i == p)
        },
        Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{n}"))
    );
    let total = d.pow(n as u32);
    let mut op = CMatrix::zeros(total, total);
    let mut digits = vec![0usize; n];
    let mut out_digits = vec![0usize; n];
    for col in 0..total {
        let mut rem = col;
        for k in (0..n).rev() {
            digits[k] = rem % d;
            rem /= d;
        }
        for k in 0..n {
            out_digits[perm[k]] = digits[k];
        }
        let row = out_digits.iter().fold(0, |acc, &x| acc * d + x);
        op[(row, col)] = Complex64::new(1.0, 0.0);
    }
    Ok(op)
}

/// Swap of the two factors of `h ⊗ h`.
pub fn swap_operator(d: usize) -> CMatrix {
    permutation_operator(&[1, 0], d, 2).expect("valid transposition")
}

fn check_dim(d: usize) -> Result<()> {
    ensure!(d >= 2, Error::InvalidParameter(format!("projector dimension {d} < 2")));
    Ok(())
}

/// Projector onto the symmetric subspace of `h ⊗ h`, `(Π + Π²)/2`.
pub fn sym_projector(d: usize) -> Result<CMatrix> {
    check_dim(d)?;
    let swap = swap_operator(d);
    let sq = &swap * &swap;
    Ok((swap + sq).unscale(2.0))
}

/// Projector onto the antisymmetric subspace of `h ⊗ h`, `(Π² − Π)/2`.
pub fn antisym_projector(d: usize) -> Result<CMatrix> {
    check_dim(d)?;
    let swap = swap_operator(d);
    let sq = &swap * &swap;
    Ok((sq - swap).unscale(2.0))
}
