//! Matrix-free application of operators to selected tensor legs, and leg
//! permutations.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use super::dd::DdComplex;
use super::layout::{strides, LegLayout};
use super::state::StateVector;
use super::{CMatrix, CVector};
use crate::error::{ensure, Error, Result};

/// Scalar type a leg kernel can run on.
pub trait Amplitude: Copy + Add<Output = Self> + Mul<Output = Self> + Send + Sync {
    const ZERO: Self;
    fn from_c64(z: Complex64) -> Self;
}

impl Amplitude for Complex64 {
    const ZERO: Self = Complex64 { re: 0.0, im: 0.0 };
    fn from_c64(z: Complex64) -> Self {
        z
    }
}

impl Amplitude for DdComplex {
    const ZERO: Self = DdComplex::ZERO;
    fn from_c64(z: Complex64) -> Self {
        DdComplex::from(z)
    }
}

/// Operator on a group of legs, stored as sparse rows.
#[derive(Clone, Debug)]
pub(crate) struct LegOperator<T> {
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Amplitude> LegOperator<T> {
    pub(crate) fn from_matrix(op: &CMatrix) -> Self {
        let rows = (0..op.nrows())
            .map(|r| {
                (0..op.ncols())
                    .filter(|&c| op[(r, c)] != Complex64::ZERO)
                    .map(|c| (c, T::from_c64(op[(r, c)])))
                    .collect()
            })
            .collect();
        LegOperator { rows }
    }

    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Precomputed index offsets for acting on `targets` within `dims`.
#[derive(Clone, Debug)]
pub(crate) struct LegPlan {
    target_offsets: Vec<usize>,
    base_offsets: Vec<usize>,
}

impl LegPlan {
    pub(crate) fn new(dims: &[usize], targets: &[usize]) -> Result<Self> {
        for (i, &t) in targets.iter().enumerate() {
            ensure!(t < dims.len(), Error::Layout(format!("target leg {t} out of range ({} legs)", dims.len())));
            ensure!(!targets[..i].contains(&t), Error::Layout(format!("target leg {t} listed twice")));
        }
        let st = strides(dims);
        let target_dims: Vec<usize> = targets.iter().map(|&t| dims[t]).collect();
        let target_offsets = offsets(&target_dims, &targets.iter().map(|&t| st[t]).collect::<Vec<_>>());
        let rest: Vec<usize> = (0..dims.len()).filter(|i| !targets.contains(i)).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&r| dims[r]).collect();
        let base_offsets = offsets(&rest_dims, &rest.iter().map(|&r| st[r]).collect::<Vec<_>>());
        Ok(LegPlan { target_offsets, base_offsets })
    }

    pub(crate) fn block(&self) -> usize {
        self.target_offsets.len()
    }
}

/// All flat offsets `Σ digit_i * stride_i`, enumerated row-major over `dims`.
fn offsets(dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for (&d, &s) in dims.iter().zip(strides) {
        let mut next = Vec::with_capacity(out.len() * d);
        for &o in &out {
            for k in 0..d {
                next.push(o + k * s);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn apply_planned<T: Amplitude>(op: &LegOperator<T>, plan: &LegPlan, input: &[T], out: &mut [T]) {
    let offs = &plan.target_offsets;
    for &base in &plan.base_offsets {
        for (s, row) in op.rows.iter().enumerate() {
            let mut acc = T::ZERO;
            for &(t, v) in row {
                acc = acc + v * input[base + offs[t]];
            }
            out[base + offs[s]] = acc;
        }
    }
}

/// Apply `op` to the legs at `targets` of a flat amplitude vector with leg
/// dimensions `dims`; identity on every other leg.
pub(crate) fn apply_amplitudes<T: Amplitude>(
    op: &CMatrix,
    targets: &[usize],
    dims: &[usize],
    input: &[T],
) -> Result<Vec<T>> {
    let plan = LegPlan::new(dims, targets)?;
    ensure!(
        op.nrows() == plan.block() && op.ncols() == plan.block(),
        Error::DimensionMismatch { expected: plan.block(), got: op.nrows() }
    );
    let total: usize = dims.iter().product();
    ensure!(input.len() == total, Error::DimensionMismatch { expected: total, got: input.len() });
    let lop = LegOperator::<T>::from_matrix(op);
    let mut out = vec![T::ZERO; input.len()];
    apply_planned(&lop, &plan, input, &mut out);
    Ok(out)
}

/// `(op on targets ⊗ 1 elsewhere) |state⟩`, evaluated without forming the
/// full operator.
pub fn apply_to_legs(op: &CMatrix, targets: &[usize], state: &StateVector) -> Result<StateVector> {
    let dims = state.layout().dims();
    let out = apply_amplitudes(op, targets, &dims, state.amplitudes().as_slice())?;
    StateVector::new(CVector::from_vec(out), state.layout().clone())
}

/// Reorder tensor axes: output axis `j` is input axis `axis_perm[j]`.
pub(crate) fn permute_axes<T: Copy>(input: &[T], dims: &[usize], axis_perm: &[usize]) -> Vec<T> {
    let n = dims.len();
    let in_strides = strides(dims);
    let out_dims: Vec<usize> = axis_perm.iter().map(|&a| dims[a]).collect();
    let src_strides: Vec<usize> = axis_perm.iter().map(|&a| in_strides[a]).collect();
    let total = input.len();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; n];
    let mut src = 0usize;
    for _ in 0..total {
        out.push(input[src]);
        for j in (0..n).rev() {
            digits[j] += 1;
            src += src_strides[j];
            if digits[j] < out_dims[j] {
                break;
            }
            src -= src_strides[j] * out_dims[j];
            digits[j] = 0;
        }
    }
    out
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    ensure!(perm.len() == n, Error::InvalidParameter(format!("permutation has {} entries, expected {n}", perm.len())));
    let mut seen = vec![false; n];
    for &p in perm {
        ensure!(p < n && !seen[p], Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{n}")));
        seen[p] = true;
    }
    Ok(())
}

/// Move the content of copy `c` to copy slot `perm[c]`. Copies are indexed
/// by order of appearance in the layout.
///
/// With `perm = [1, 2, 0]` this maps `ψ⊗φ⊗ξ` to `ξ⊗ψ⊗φ`.
pub fn permute_legs(state: &StateVector, perm: &[usize]) -> Result<StateVector> {
    let layout = state.layout();
    let copies = layout.copies();
    check_permutation(perm, copies.len())?;
    ensure!(layout.copies_uniform(), Error::Layout("copies have mismatched subsystem structure".into()));
    let mut inverse = vec![0; perm.len()];
    for (c, &p) in perm.iter().enumerate() {
        inverse[p] = c;
    }
    let axis_perm = copy_axis_permutation(layout, &copies, &inverse)?;
    let out = permute_axes(state.amplitudes().as_slice(), &layout.dims(), &axis_perm);
    StateVector::new(CVector::from_vec(out), layout.clone())
}

pub(crate) fn copy_axis_permutation(layout: &LegLayout, copies: &[usize], inverse: &[usize]) -> Result<Vec<usize>> {
    layout
        .legs()
        .iter()
        .map(|leg| {
            let slot = copies.iter().position(|&c| c == leg.copy).unwrap();
            let src_copy = copies[inverse[slot]];
            layout
                .position(src_copy, &leg.subsystem)
                .ok_or_else(|| Error::Layout(format!("copy {src_copy} lacks {}", leg.subsystem)))
        })
        .collect()
}
