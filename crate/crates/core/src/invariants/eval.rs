//! Dense realization and matrix-free evaluation of observable specs.

use num_complex::Complex64;

use super::projector::{antisym_projector, sym_projector};
use super::spec::{FactorKind, ObservableSpec};
use crate::error::{ensure, Error, Result};
use crate::tensorkit::dd::{Dd, DdComplex};
use crate::tensorkit::{
    apply_planned, Amplitude, CMatrix, CVector, DensityOperator, LegLayout, LegOperator, LegPlan, StateVector,
    DENSE_CAP,
};

/// Spectral weights below this are dropped when expanding density operators.
const SPECTRAL_CUTOFF: f64 = 1e-15;

struct CompiledTerm<T> {
    coeff: f64,
    factors: Vec<(LegOperator<T>, LegPlan)>,
}

/// A spec bound to the `n`-copy replica of a single-copy layout.
pub(crate) struct CompiledSpec<T> {
    dims: Vec<usize>,
    terms: Vec<CompiledTerm<T>>,
}

impl<T: Amplitude> CompiledSpec<T> {
    pub(crate) fn new(spec: &ObservableSpec, single: &LegLayout) -> Result<Self> {
        spec.check_layout(single)?;
        let multi = single.replicate(spec.n_copies())?;
        let dims = multi.dims();
        let mut terms = Vec::with_capacity(spec.terms().len());
        for term in spec.terms() {
            let mut factors = Vec::new();
            for f in &term.factors {
                let d = single.dim_of(&f.subsystem).expect("checked above");
                let op = match f.kind {
                    FactorKind::Identity => continue,
                    FactorKind::Sym => sym_projector(d)?,
                    FactorKind::Antisym => antisym_projector(d)?,
                };
                let targets: Vec<usize> =
                    f.copies.iter().map(|&c| multi.position(c, &f.subsystem).expect("replicated layout")).collect();
                factors.push((LegOperator::from_matrix(&op), LegPlan::new(&dims, &targets)?));
            }
            terms.push(CompiledTerm { coeff: term.coeff, factors });
        }
        Ok(CompiledSpec { dims, terms })
    }

    pub(crate) fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// `Q_t x` for the projector product of term `t`.
    fn apply_term(&self, t: usize, x: &[T]) -> Vec<T> {
        let mut cur = x.to_vec();
        let mut next = vec![T::ZERO; x.len()];
        for (op, plan) in &self.terms[t].factors {
            debug_assert_eq!(op.dim(), plan.block());
            apply_planned(op, plan, &cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }
}

impl CompiledSpec<Complex64> {
    /// `A x`.
    pub(crate) fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; x.len()];
        for (t, term) in self.terms.iter().enumerate() {
            let y = self.apply_term(t, x);
            for (o, v) in out.iter_mut().zip(y) {
                *o += v * term.coeff;
            }
        }
        out
    }
}

impl CompiledSpec<DdComplex> {
    /// `⟨Φ|A|Φ⟩ = Σ_t c_t ‖Q_t Φ‖²`, accumulated in double-double.
    fn expectation_dd(&self, phi: &[DdComplex]) -> Dd {
        let coeffs: Vec<f64> = self.terms.iter().map(|t| t.coeff).collect();
        let (scaled, denom) = rational_coefficients(&coeffs);
        let mut total = Dd::ZERO;
        for (t, term) in self.terms.iter().enumerate() {
            let y = if term.factors.is_empty() { phi.to_vec() } else { self.apply_term(t, phi) };
            let norm = y.iter().fold(Dd::ZERO, |acc, z| acc + z.norm_sqr());
            total = total + Dd::from_f64(scaled[t]) * norm;
        }
        total.div_f64(denom)
    }
}

/// Coefficients like `-1/3` are not exact in binary. When every coefficient
/// is a ratio with a small common denominator `q`, returns the integer
/// numerators and `q`, so that cancellations between terms stay exact.
fn rational_coefficients(coeffs: &[f64]) -> (Vec<f64>, f64) {
    for q in 1..=64u32 {
        let q = f64::from(q);
        let exact = coeffs.iter().all(|&c| {
            let x = c * q;
            x.abs() < 1e15 && (x - x.round()).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0)
        });
        if exact {
            return (coeffs.iter().map(|&c| (c * q).round()).collect(), q);
        }
    }
    (coeffs.to_vec(), 1.0)
}

fn product_vector_dd(parts: &[&CVector]) -> Vec<DdComplex> {
    let mut out = vec![DdComplex::from(Complex64::new(1.0, 0.0))];
    for v in parts {
        let w: Vec<DdComplex> = v.iter().map(|&z| DdComplex::from(z)).collect();
        let mut next = Vec::with_capacity(out.len() * w.len());
        for &a in &out {
            for &b in &w {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

fn common_single_layout<'a>(mut layouts: impl Iterator<Item = &'a LegLayout>) -> Result<LegLayout> {
    let first = layouts.next().ok_or_else(|| Error::InvalidParameter("no copies supplied".into()))?.with_copy(0);
    ensure!(first.is_single_copy(), Error::Layout("each copy must be a single-copy state".into()));
    for l in layouts {
        ensure!(l.with_copy(0) == first, Error::Layout("copies have different layouts".into()));
    }
    Ok(first)
}

/// `(⊗ᵢ⟨ψᵢ|) A (⊗ᵢ|ψᵢ⟩)` for one state per copy, matrix-free.
pub fn expectation_pure(spec: &ObservableSpec, copies: &[&StateVector]) -> Result<f64> {
    ensure!(copies.len() == spec.n_copies(), Error::CopyMismatch { expected: spec.n_copies(), got: copies.len() });
    let single = common_single_layout(copies.iter().map(|s| s.layout()))?;
    let compiled = CompiledSpec::<DdComplex>::new(spec, &single)?;
    let vecs: Vec<&CVector> = copies.iter().map(|s| s.amplitudes()).collect();
    Ok(compiled.expectation_dd(&product_vector_dd(&vecs)).to_f64())
}

/// `⟨ψ|^{⊗n} A |ψ⟩^{⊗n}`.
pub fn expectation_power_pure(spec: &ObservableSpec, psi: &StateVector) -> Result<f64> {
    let copies = vec![psi; spec.n_copies()];
    expectation_pure(spec, &copies)
}

/// `Tr A (ρ₁ ⊗ … ⊗ ρₙ)`, matrix-free.
///
/// Each `ρᵢ` is expanded in its eigenbasis and the expectation is summed over
/// eigenvector tuples, so no operator on the `n`-copy space is formed.
pub fn expectation_mixed(spec: &ObservableSpec, copies: &[&DensityOperator]) -> Result<f64> {
    ensure!(copies.len() == spec.n_copies(), Error::CopyMismatch { expected: spec.n_copies(), got: copies.len() });
    let single = common_single_layout(copies.iter().map(|r| r.layout()))?;
    let compiled = CompiledSpec::<DdComplex>::new(spec, &single)?;

    let mut spectra: Vec<Vec<(f64, CVector)>> = Vec::with_capacity(copies.len());
    for rho in copies {
        let (vals, vecs) = rho.eigensystem()?;
        spectra.push(
            vals.iter()
                .enumerate()
                .filter(|(_, v)| v.abs() > SPECTRAL_CUTOFF)
                .map(|(k, &v)| (v, vecs.column(k).into_owned()))
                .collect(),
        );
    }
    if spectra.iter().any(|s| s.is_empty()) {
        return Ok(0.0);
    }

    let n = copies.len();
    let mut idx = vec![0usize; n];
    let mut total = Dd::ZERO;
    loop {
        let weight = idx.iter().enumerate().fold(Dd::from_f64(1.0), |w, (i, &k)| w * Dd::from_f64(spectra[i][k].0));
        let vecs: Vec<&CVector> = idx.iter().enumerate().map(|(i, &k)| &spectra[i][k].1).collect();
        total = total + weight * compiled.expectation_dd(&product_vector_dd(&vecs));

        let mut i = n;
        loop {
            if i == 0 {
                return Ok(total.to_f64());
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < spectra[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// `Tr A ρ^{⊗n}`.
pub fn expectation_power_mixed(spec: &ObservableSpec, rho: &DensityOperator) -> Result<f64> {
    let copies = vec![rho; spec.n_copies()];
    expectation_mixed(spec, &copies)
}

/// `A x` on the `n`-copy space of `single`, matrix-free.
pub fn apply_spec(spec: &ObservableSpec, single: &LegLayout, x: &CVector) -> Result<CVector> {
    let compiled = CompiledSpec::<Complex64>::new(spec, single)?;
    ensure!(x.len() == compiled.total_dim(), Error::DimensionMismatch { expected: compiled.total_dim(), got: x.len() });
    Ok(CVector::from_vec(compiled.apply(x.as_slice())))
}

/// Dense operator on the `n`-copy space of a single-copy layout.
pub fn realize(spec: &ObservableSpec, single: &LegLayout) -> Result<CMatrix> {
    spec.check_layout(single)?;
    let dim = single.total_dim().pow(spec.n_copies() as u32);
    ensure!(dim <= DENSE_CAP, Error::DenseCap { dim, cap: DENSE_CAP });
    let compiled = CompiledSpec::<Complex64>::new(spec, single)?;
    let mut m = CMatrix::zeros(dim, dim);
    let mut e = vec![Complex64::ZERO; dim];
    for j in 0..dim {
        e[j] = Complex64::new(1.0, 0.0);
        let col = compiled.apply(&e);
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
        e[j] = Complex64::ZERO;
    }
    Ok(m)
}

/// `Tr(realize(spec) · ρ₁ ⊗ … ⊗ ρₙ)` through dense matrices.
pub fn expectation_dense(spec: &ObservableSpec, copies: &[&DensityOperator]) -> Result<f64> {
    ensure!(copies.len() == spec.n_copies(), Error::CopyMismatch { expected: spec.n_copies(), got: copies.len() });
    let single = common_single_layout(copies.iter().map(|r| r.layout()))?;
    let a = realize(spec, &single)?;
    let mut big = copies[0].matrix().clone();
    for r in &copies[1..] {
        big = big.kronecker(r.matrix());
    }
    Ok((a * big).trace().re)
}
