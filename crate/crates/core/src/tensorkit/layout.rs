use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// One tensor leg: a single subsystem of a single copy.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leg {
    pub copy: usize,
    pub subsystem: String,
    pub dim: usize,
}

/// Ordered list of legs describing a composite Hilbert space.
///
/// Amplitudes are flattened row-major in declared leg order: the first leg is
/// the slowest-varying index. Every module shares this convention.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Leg>", into = "Vec<Leg>")]
pub struct LegLayout {
    legs: Vec<Leg>,
}

impl TryFrom<Vec<Leg>> for LegLayout {
    type Error = Error;

    fn try_from(legs: Vec<Leg>) -> Result<Self> {
        LegLayout::new(legs)
    }
}

impl From<LegLayout> for Vec<Leg> {
    fn from(layout: LegLayout) -> Self {
        layout.legs
    }
}

impl LegLayout {
    pub fn new(legs: Vec<Leg>) -> Result<Self> {
        ensure!(!legs.is_empty(), Error::Layout("no legs".into()));
        for (i, leg) in legs.iter().enumerate() {
            ensure!(
                leg.dim >= 2,
                Error::Layout(format!("leg ({}, {}) has dimension {} < 2", leg.copy, leg.subsystem, leg.dim))
            );
            ensure!(
                !legs[..i].iter().any(|l| l.copy == leg.copy && l.subsystem == leg.subsystem),
                Error::Layout(format!("duplicate leg ({}, {})", leg.copy, leg.subsystem))
            );
        }
        Ok(LegLayout { legs })
    }

    /// Single-copy layout from `(label, dim)` pairs.
    pub fn subsystems(parts: &[(&str, usize)]) -> Result<Self> {
        Self::new(parts.iter().map(|&(s, dim)| Leg { copy: 0, subsystem: s.to_string(), dim }).collect())
    }

    /// Single-copy `A ⊗ B` layout.
    pub fn bipartite(dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::subsystems(&[("A", dim_a), ("B", dim_b)])
    }

    /// `n` qubits labelled A, B, C, ...
    pub fn qubits(n: usize) -> Result<Self> {
        let labels: Vec<String> = (0..n).map(subsystem_label).collect();
        Self::new(labels.into_iter().map(|subsystem| Leg { copy: 0, subsystem, dim: 2 }).collect())
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn len(&self) -> usize {
        self.legs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.legs.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.legs.iter().map(|l| l.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.legs.iter().map(|l| l.dim).product()
    }

    pub fn position(&self, copy: usize, subsystem: &str) -> Option<usize> {
        self.legs.iter().position(|l| l.copy == copy && l.subsystem == subsystem)
    }

    /// Distinct copy indices in order of first appearance.
    pub fn copies(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for leg in &self.legs {
            if !out.contains(&leg.copy) {
                out.push(leg.copy);
            }
        }
        out
    }

    pub fn n_copies(&self) -> usize {
        self.copies().len()
    }

    /// Subsystem labels of the first copy, in leg order.
    pub fn subsystem_labels(&self) -> Vec<&str> {
        let first = self.legs[0].copy;
        self.legs.iter().filter(|l| l.copy == first).map(|l| l.subsystem.as_str()).collect()
    }

    pub fn dim_of(&self, subsystem: &str) -> Option<usize> {
        self.legs.iter().find(|l| l.subsystem == subsystem).map(|l| l.dim)
    }

    pub fn is_single_copy(&self) -> bool {
        self.n_copies() == 1
    }

    /// Same layout with every copy index replaced by `copy`.
    pub fn with_copy(&self, copy: usize) -> LegLayout {
        LegLayout { legs: self.legs.iter().map(|l| Leg { copy, ..l.clone() }).collect() }
    }

    /// `n` copies of a single-copy layout, copy-major: all legs of copy 0,
    /// then all legs of copy 1, and so on.
    pub fn replicate(&self, n: usize) -> Result<LegLayout> {
        ensure!(self.is_single_copy(), Error::Layout("replicate expects a single-copy layout".into()));
        ensure!(n >= 1, Error::InvalidParameter("copy count must be >= 1".into()));
        let mut legs = Vec::with_capacity(self.len() * n);
        for c in 0..n {
            legs.extend(self.with_copy(c).legs);
        }
        Ok(LegLayout { legs })
    }

    /// Concatenate two layouts, shifting the copy indices of `other` past
    /// those of `self`.
    pub fn concat(&self, other: &LegLayout) -> Result<LegLayout> {
        let offset = self.legs.iter().map(|l| l.copy + 1).max().unwrap_or(0);
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().map(|l| Leg { copy: l.copy + offset, ..l.clone() }));
        LegLayout::new(legs)
    }

    /// Sub-layout made of the listed leg positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Result<LegLayout> {
        let mut legs = Vec::with_capacity(positions.len());
        for &p in positions {
            let leg = self.legs.get(p).ok_or_else(|| Error::Layout(format!("leg position {p} out of range")))?;
            legs.push(leg.clone());
        }
        LegLayout::new(legs)
    }

    /// True when every copy carries the same subsystem labels and dimensions
    /// in the same order.
    pub fn copies_uniform(&self) -> bool {
        let copies = self.copies();
        let pattern = |c: usize| -> Vec<(&str, usize)> {
            self.legs.iter().filter(|l| l.copy == c).map(|l| (l.subsystem.as_str(), l.dim)).collect()
        };
        let first = pattern(copies[0]);
        copies.iter().all(|&c| pattern(c) == first)
    }

    /// Layout of one copy (copy index preserved).
    pub fn copy_layout(&self, copy: usize) -> Result<LegLayout> {
        LegLayout::new(self.legs.iter().filter(|l| l.copy == copy).cloned().collect())
    }
}

pub(crate) fn subsystem_label(i: usize) -> String {
    let mut s = String::new();
    let mut k = i;
    loop {
        s.insert(0, (b'A' + (k % 26) as u8) as char);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    s
}

/// Row-major strides for the given dimensions.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_dim_is_product() {
        let l = LegLayout::subsystems(&[("A", 2), ("B", 3)]).unwrap();
        assert_eq!(l.total_dim(), 6);
        assert_eq!(l.replicate(3).unwrap().total_dim(), 216);
    }

    #[test]
    fn duplicate_leg_rejected() {
        let legs = vec![Leg { copy: 0, subsystem: "A".into(), dim: 2 }, Leg { copy: 0, subsystem: "A".into(), dim: 2 }];
        assert!(LegLayout::new(legs).is_err());
    }

    #[test]
    fn small_dims_rejected() {
        assert!(LegLayout::subsystems(&[("A", 1)]).is_err());
    }

    #[test]
    fn replicate_is_copy_major() {
        let l = LegLayout::bipartite(2, 3).unwrap().replicate(2).unwrap();
        assert_eq!(l.position(0, "A"), Some(0));
        assert_eq!(l.position(0, "B"), Some(1));
        assert_eq!(l.position(1, "A"), Some(2));
        assert_eq!(l.position(1, "B"), Some(3));
        assert!(l.copies_uniform());
    }

    #[test]
    fn labels() {
        assert_eq!(subsystem_label(0), "A");
        assert_eq!(subsystem_label(2), "C");
        assert_eq!(subsystem_label(26), "AA");
    }

    #[test]
    fn strides_row_major() {
        assert_eq!(strides(&[2, 3, 4]), vec![12, 4, 1]);
    }
}
