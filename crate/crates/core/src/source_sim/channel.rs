use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::tensorkit::{conjugate_on_legs, CMatrix, DensityOperator};

/// Single-subsystem noise applied at every storage step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LocalNoise {
    #[default]
    Identity,
    /// `ρ ↦ (1 − q) ρ + q Tr(ρ) 1/d`.
    Depolarizing { q: f64 },
    /// `ρ ↦ (1 − q) ρ + q diag(ρ)`.
    Dephasing { q: f64 },
}

impl LocalNoise {
    pub fn depolarizing(q: f64) -> Result<Self> {
        let n = LocalNoise::Depolarizing { q };
        n.validate()?;
        Ok(n)
    }

    pub fn dephasing(q: f64) -> Result<Self> {
        let n = LocalNoise::Dephasing { q };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        if let LocalNoise::Depolarizing { q } | LocalNoise::Dephasing { q } = *self {
            ensure!((0.0..=1.0).contains(&q), Error::InvalidParameter(format!("noise strength {q} outside [0, 1]")));
        }
        Ok(())
    }

    /// Kraus operators on a `d`-level subsystem.
    ///
    /// Depolarizing uses the `d²` Weyl operators `XᵃZᵇ` (Paulis for `d = 2`).
    pub fn kraus(&self, d: usize) -> Vec<CMatrix> {
        match *self {
            LocalNoise::Identity => vec![CMatrix::identity(d, d)],
            LocalNoise::Depolarizing { q } => {
                let d2 = (d * d) as f64;
                let mut ops = Vec::with_capacity(d * d);
                for a in 0..d {
                    for b in 0..d {
                        let w = if a == 0 && b == 0 { 1.0 - q + q / d2 } else { q / d2 };
                        if w > 0.0 {
                            ops.push(weyl(d, a, b).scale(w.sqrt()));
                        }
                    }
                }
                ops
            }
            LocalNoise::Dephasing { q } => {
                let mut ops = vec![CMatrix::identity(d, d).scale((1.0 - q).sqrt())];
                if q > 0.0 {
                    for k in 0..d {
                        let mut p = CMatrix::zeros(d, d);
                        p[(k, k)] = Complex64::new(q.sqrt(), 0.0);
                        ops.push(p);
                    }
                }
                ops
            }
        }
    }
}

/// `XᵃZᵇ` with `X|j⟩ = |j+1⟩` and `Z|j⟩ = ωʲ|j⟩`.
fn weyl(d: usize, a: usize, b: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        let phase = 2.0 * std::f64::consts::PI * (b * j) as f64 / d as f64;
        m[((j + a) % d, j)] = Complex64::from_polar(1.0, phase);
    }
    m
}

/// How many storage steps each copy waits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageSchedule {
    /// Copies prepared one after another: of `n` copies, copy `i`
    /// (0-based) waits `n − 1 − i` steps.
    #[default]
    Sequential,
    /// Every copy waits the same number of steps.
    Uniform(usize),
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageChannel {
    #[serde(default)]
    pub noise: LocalNoise,
    #[serde(default)]
    pub schedule: StorageSchedule,
}

impl StorageChannel {
    pub fn identity() -> Self {
        StorageChannel::default()
    }

    pub fn depolarizing(q: f64) -> Result<Self> {
        Ok(StorageChannel { noise: LocalNoise::depolarizing(q)?, schedule: StorageSchedule::Sequential })
    }

    pub fn dephasing(q: f64) -> Result<Self> {
        Ok(StorageChannel { noise: LocalNoise::dephasing(q)?, schedule: StorageSchedule::Sequential })
    }

    pub fn with_schedule(mut self, schedule: StorageSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    /// Storage steps for each of `n` copies.
    pub fn steps(&self, n: usize) -> Result<Vec<usize>> {
        Ok(match &self.schedule {
            StorageSchedule::Sequential => (0..n).map(|i| n - 1 - i).collect(),
            StorageSchedule::Uniform(k) => vec![*k; n],
            StorageSchedule::Explicit(v) => {
                ensure!(v.len() == n, Error::CopyMismatch { expected: n, got: v.len() });
                v.clone()
            }
        })
    }

    /// `‖Σ K†K − 1‖` (Frobenius) for a `d`-level subsystem.
    pub fn completeness_defect(&self, d: usize) -> f64 {
        let sum = self.noise.kraus(d).iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        (sum - CMatrix::identity(d, d)).norm()
    }
}

/// Applies the noise `steps` times to every subsystem of `ρ`, one subsystem
/// at a time.
pub fn apply_storage(rho: &DensityOperator, noise: &LocalNoise, steps: usize) -> Result<DensityOperator> {
    noise.validate()?;
    if steps == 0 || *noise == LocalNoise::Identity {
        return Ok(rho.clone());
    }
    let dims = rho.layout().dims();
    let kraus: Vec<Vec<CMatrix>> = dims.iter().map(|&d| noise.kraus(d)).collect();
    let mut m = rho.matrix().clone();
    for _ in 0..steps {
        for (leg, ops) in kraus.iter().enumerate() {
            let mut next = CMatrix::zeros(m.nrows(), m.ncols());
            for k in ops {
                next += conjugate_on_legs(k, &[leg], &dims, &m)?;
            }
            m = next;
        }
    }
    // keep exact Hermiticity
    let m = (&m + m.adjoint()).scale(0.5);
    DensityOperator::new(m, rho.layout().clone())
}

/// `n` copies of `ρ`, each stored for its scheduled number of steps.
pub fn prepare_copies(rho: &DensityOperator, channel: &StorageChannel, n: usize) -> Result<Vec<DensityOperator>> {
    ensure!(n >= 1, Error::InvalidParameter("copy count must be >= 1".into()));
    channel.steps(n)?.into_iter().map(|s| apply_storage(rho, &channel.noise, s)).collect()
}
