use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::tensorkit::LegLayout;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FactorKind {
    Sym,
    Antisym,
    Identity,
}

/// `P₊`, `P₋` on one subsystem of two copies, or `1` on one subsystem of one copy.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorFactor {
    pub kind: FactorKind,
    pub subsystem: String,
    pub copies: Vec<usize>,
}

impl ProjectorFactor {
    pub fn sym(subsystem: &str, a: usize, b: usize) -> Self {
        ProjectorFactor { kind: FactorKind::Sym, subsystem: subsystem.into(), copies: vec![a, b] }
    }

    pub fn antisym(subsystem: &str, a: usize, b: usize) -> Self {
        ProjectorFactor { kind: FactorKind::Antisym, subsystem: subsystem.into(), copies: vec![a, b] }
    }

    pub fn identity(subsystem: &str, copy: usize) -> Self {
        ProjectorFactor { kind: FactorKind::Identity, subsystem: subsystem.into(), copies: vec![copy] }
    }

    fn check(&self, n_copies: usize) -> Result<()> {
        let want = if self.kind == FactorKind::Identity { 1 } else { 2 };
        ensure!(self.copies.len() == want, Error::InvalidParameter(format!("{self} must name {want} copies")));
        ensure!(
            self.copies.iter().all(|&c| c < n_copies),
            Error::InvalidParameter(format!("{self} refers to a copy >= {n_copies}"))
        );
        ensure!(
            want == 1 || self.copies[0] != self.copies[1],
            Error::InvalidParameter(format!("{self} pairs a copy with itself"))
        );
        Ok(())
    }

    /// `(subsystem, copy)` legs this factor occupies.
    pub fn legs(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.copies.iter().map(move |&c| (self.subsystem.as_str(), c))
    }
}

impl fmt::Display for ProjectorFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.kind {
            FactorKind::Sym => "P+",
            FactorKind::Antisym => "P-",
            FactorKind::Identity => "1",
        };
        let copies: Vec<String> = self.copies.iter().map(|c| (c + 1).to_string()).collect();
        write!(f, "{sym}^{}{}", self.subsystem, copies.join(""))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    #[serde(rename = "coeff")]
    pub coeff: f64,
    pub factors: Vec<ProjectorFactor>,
}

impl Term {
    pub fn new(coeff: f64, factors: Vec<ProjectorFactor>) -> Self {
        Term { coeff, factors }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    n_copies: usize,
    terms: Vec<Term>,
}

/// Weighted sum of products of projector factors on disjoint legs of an
/// `n`-copy space. Uncovered legs carry an implicit identity.
///
/// Every term is a product of commuting Hermitian projectors, so the
/// realized operator is Hermitian and invariant under `u₁^{⊗n} ⊗ u₂^{⊗n} ⊗ …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ObservableSpec {
    n_copies: usize,
    terms: Vec<Term>,
}

impl TryFrom<RawSpec> for ObservableSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        ObservableSpec::new(raw.n_copies, raw.terms)
    }
}

impl ObservableSpec {
    pub fn new(n_copies: usize, terms: Vec<Term>) -> Result<Self> {
        ensure!(n_copies >= 1, Error::InvalidParameter("n_copies must be >= 1".into()));
        for term in &terms {
            ensure!(term.coeff.is_finite(), Error::InvalidParameter("non-finite coefficient".into()));
            let mut seen: Vec<(&str, usize)> = Vec::new();
            for f in &term.factors {
                f.check(n_copies)?;
                for leg in f.legs() {
                    ensure!(
                        !seen.contains(&leg),
                        Error::InvalidParameter(format!("leg ({}, copy {}) covered twice in one term", leg.0, leg.1))
                    );
                    seen.push(leg);
                }
            }
        }
        Ok(ObservableSpec { n_copies, terms })
    }

    /// Identity on `n` copies.
    pub fn identity(n_copies: usize) -> Result<Self> {
        Self::new(n_copies, vec![Term::new(1.0, vec![])])
    }

    /// Single-term product of factors.
    pub fn product(n_copies: usize, coeff: f64, factors: Vec<ProjectorFactor>) -> Result<Self> {
        Self::new(n_copies, vec![Term::new(coeff, factors)])
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Same factors, every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> ObservableSpec {
        ObservableSpec {
            n_copies: self.n_copies,
            terms: self.terms.iter().map(|t| Term::new(t.coeff * factor, t.factors.clone())).collect(),
        }
    }

    /// Check that every referenced subsystem exists in a single-copy layout.
    pub fn check_layout(&self, single: &LegLayout) -> Result<()> {
        ensure!(single.is_single_copy(), Error::Layout("observables are placed on a single-copy layout".into()));
        for t in &self.terms {
            for f in &t.factors {
                ensure!(
                    single.dim_of(&f.subsystem).is_some(),
                    Error::Layout(format!("subsystem '{}' not in layout", f.subsystem))
                );
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coeff)?;
            for fac in &t.factors {
                write!(f, " {fac}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_factors_rejected() {
        let t = Term::new(1.0, vec![ProjectorFactor::antisym("A", 0, 1), ProjectorFactor::sym("A", 1, 2)]);
        assert!(ObservableSpec::new(3, vec![t]).is_err());
    }

    #[test]
    fn bad_copies_rejected() {
        assert!(ObservableSpec::product(2, 1.0, vec![ProjectorFactor::antisym("A", 0, 0)]).is_err());
        assert!(ObservableSpec::product(2, 1.0, vec![ProjectorFactor::antisym("A", 0, 2)]).is_err());
        let wrong = ProjectorFactor { kind: FactorKind::Identity, subsystem: "A".into(), copies: vec![0, 1] };
        assert!(ObservableSpec::product(2, 1.0, vec![wrong]).is_err());
    }

    #[test]
    fn json_shape() {
        let s = ObservableSpec::product(
            2,
            1.0,
            vec![ProjectorFactor::antisym("A", 0, 1), ProjectorFactor::identity("B", 1)],
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(v["n_copies"], 2);
        assert_eq!(v["terms"][0]["coeff"], 1.0);
        assert_eq!(v["terms"][0]["factors"][0]["kind"], "ANTISYM");
        assert_eq!(v["terms"][0]["factors"][0]["copies"], serde_json::json!([0, 1]));
        assert_eq!(v["terms"][0]["factors"][1]["kind"], "IDENTITY");
        assert_eq!(ObservableSpec::from_json(&s.to_json().unwrap()).unwrap(), s);
    }

    #[test]
    fn json_validation_applies() {
        let bad = r#"{"n_copies": 2, "terms": [{"coeff": 1.0, "factors": [{"kind": "SYM", "subsystem": "A", "copies": [0, 5]}]}]}"#;
        assert!(ObservableSpec::from_json(bad).is_err());
    }

    #[test]
    fn unknown_subsystem_detected() {
        let s = ObservableSpec::product(2, 1.0, vec![ProjectorFactor::antisym("Z", 0, 1)]).unwrap();
        assert!(s.check_layout(&LegLayout::bipartite(2, 2).unwrap()).is_err());
    }
}
