//! JSON state files and named-state resolution.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::layout::{Leg, LegLayout};
use super::named;
use super::state::{DensityOperator, StateVector};
use super::{CMatrix, CVector};
use crate::error::{ensure, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

/// On-disk state: `{"kind", "legs", "re", "im"}`, matrices row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: StateKind,
    pub legs: Vec<Leg>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoadedState {
    Pure(StateVector),
    Density(DensityOperator),
}

impl LoadedState {
    pub fn layout(&self) -> &LegLayout {
        match self {
            LoadedState::Pure(p) => p.layout(),
            LoadedState::Density(d) => d.layout(),
        }
    }

    /// Density operator view (pure states become projectors).
    pub fn to_density(&self) -> DensityOperator {
        match self {
            LoadedState::Pure(p) => DensityOperator::from_pure(p),
            LoadedState::Density(d) => d.clone(),
        }
    }
}

impl StateFile {
    pub fn from_pure(psi: &StateVector) -> Self {
        StateFile {
            kind: StateKind::Pure,
            legs: psi.layout().legs().to_vec(),
            re: psi.amplitudes().iter().map(|z| z.re).collect(),
            im: psi.amplitudes().iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        let m = rho.matrix();
        let d = rho.dim();
        let flat: Vec<Complex64> = (0..d).flat_map(|i| (0..d).map(move |j| m[(i, j)])).collect();
        StateFile {
            kind: StateKind::Density,
            legs: rho.layout().legs().to_vec(),
            re: flat.iter().map(|z| z.re).collect(),
            im: flat.iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_loaded(state: &LoadedState) -> Self {
        match state {
            LoadedState::Pure(p) => Self::from_pure(p),
            LoadedState::Density(d) => Self::from_density(d),
        }
    }

    pub fn into_state(self) -> Result<LoadedState> {
        let layout = LegLayout::new(self.legs)?;
        ensure!(
            self.re.len() == self.im.len(),
            Error::Format(format!("re has {} entries, im has {}", self.re.len(), self.im.len()))
        );
        let values: Vec<Complex64> = self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        let d = layout.total_dim();
        match self.kind {
            StateKind::Pure => {
                let psi = StateVector::new(CVector::from_vec(values), layout)?;
                psi.check_physical()?;
                Ok(LoadedState::Pure(psi))
            }
            StateKind::Density => {
                ensure!(values.len() == d * d, Error::DimensionMismatch { expected: d * d, got: values.len() });
                let m = CMatrix::from_row_slice(d, d, &values);
                Ok(LoadedState::Density(DensityOperator::new(m, layout)?))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Resolve a built-in state name: `singlet`, `bell`, `ghz`, `w`, `maxent3`,
/// `maxent4`, `maxent:<d>`, `werner:<p>`, `product:<d>x<d>[x…]`.
pub fn named_state(name: &str) -> Result<LoadedState> {
    let unknown = || Error::Format(format!("unknown state name '{name}'"));
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let parse_f = |a: Option<&str>| -> Result<f64> {
        a.ok_or_else(unknown)?.parse::<f64>().map_err(|e| Error::Format(format!("bad parameter in '{name}': {e}")))
    };
    Ok(match (head, arg) {
        ("singlet", None) => LoadedState::Pure(named::singlet()),
        ("bell", None) => LoadedState::Pure(named::bell_phi_plus()),
        ("ghz", None) => LoadedState::Pure(named::ghz()),
        ("w", None) => LoadedState::Pure(named::w_state()),
        ("maxent3", None) => LoadedState::Pure(named::max_entangled(3)?),
        ("maxent4", None) => LoadedState::Pure(named::max_entangled(4)?),
        ("maxent", Some(_)) => {
            let d = parse_f(arg)?;
            ensure!(d.fract() == 0.0 && d >= 2.0, unknown());
            LoadedState::Pure(named::max_entangled(d as usize)?)
        }
        ("werner", Some(_)) => LoadedState::Density(named::werner(parse_f(arg)?)?),
        ("product", Some(spec)) => {
            let dims =
                spec.split('x').map(|s| s.parse::<usize>().map_err(|_| unknown())).collect::<Result<Vec<_>>>()?;
            LoadedState::Pure(named::product(&dims)?)
        }
        _ => return Err(unknown()),
    })
}

/// Load a state from a file path, falling back to a built-in name when no
/// such file exists.
pub fn load_state(arg: &str) -> Result<LoadedState> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        StateFile::from_json(&text)?.into_state()
    } else {
        named_state(arg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_states_resolve() {
        for n in ["singlet", "bell", "ghz", "w", "maxent3", "maxent4", "maxent:5", "werner:0.3", "product:2x3"] {
            assert!(named_state(n).is_ok(), "{n}");
        }
        for n in ["nope", "werner", "werner:x", "werner:1.5", "product:2x1", "maxent:2.5"] {
            assert!(named_state(n).is_err(), "{n}");
        }
    }

    #[test]
    fn pure_file_round_trip() {
        let s = named::w_state();
        let f = StateFile::from_pure(&s);
        let back = StateFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.into_state().unwrap(), LoadedState::Pure(s));
    }

    #[test]
    fn density_file_round_trip() {
        let rho = named::werner(0.37).unwrap();
        let f = StateFile::from_density(&rho);
        let back = StateFile::from_json(&f.to_json().unwrap()).unwrap().into_state().unwrap();
        assert_eq!(back, LoadedState::Density(rho));
    }

    #[test]
    fn malformed_files_rejected() {
        let bad_len = r#"{"kind":"pure","legs":[{"copy":0,"subsystem":"A","dim":2}],"re":[1.0],"im":[0.0]}"#;
        assert!(StateFile::from_json(bad_len).unwrap().into_state().is_err());
        let extra = r#"{"kind":"pure","legs":[],"re":[],"im":[],"x":1}"#;
        assert!(StateFile::from_json(extra).is_err());
        let unnormalized =
            r#"{"kind":"pure","legs":[{"copy":0,"subsystem":"A","dim":2}],"re":[1.0,1.0],"im":[0.0,0.0]}"#;
        assert!(StateFile::from_json(unnormalized).unwrap().into_state().is_err());
    }
}
