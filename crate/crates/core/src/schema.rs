//! The JSON chain file.
//!
//! ```json
//! {
//!   "field_tesla": 6.58,
//!   "coupling": { "anchor_energy_joules": 1e-23, "c": 1.0, "cutoff": "all" },
//!   "nuclei": [
//!     { "label": "P0", "z": 15, "gamma_rad_per_s_per_t": 1.0829e8, "position_nm": [0.0, 0.0] }
//!   ]
//! }
//! ```
//!
//! `cutoff` is `"all"`, `"nn"` or a radius in nm. Exactly one of
//! `anchor_energy_joules` and `v_prefactor` must be given; an anchor
//! calibrates `V` so that the first two nuclei (their geometric-mean `Z`)
//! at one magnetic length couple with `anchor/ħ`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::{ChainSpec, CouplingCutoff};
use crate::physics::{calibrate_prefactor_with_decay, CouplingParams, NucleusSpec};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffName {
    #[serde(rename = "all")]
    All,
    #[serde(rename = "nn")]
    Nn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CutoffFile {
    Named(CutoffName),
    RadiusNm(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_energy_joules: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_prefactor: Option<f64>,
    pub c: f64,
    pub cutoff: CutoffFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NucleusFile {
    pub label: String,
    pub z: u32,
    pub gamma_rad_per_s_per_t: f64,
    pub position_nm: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpecFile {
    pub field_tesla: f64,
    pub coupling: CouplingFile,
    pub nuclei: Vec<NucleusFile>,
}

impl ChainSpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| domain(format!("invalid chain file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain file serializes")
    }

    /// Builds and validates the chain, calibrating `V` when an anchor is given.
    pub fn to_spec<T: Real>(&self) -> Result<ChainSpec<T>> {
        let field = T::lit(self.field_tesla);
        let c = T::lit(self.coupling.c);
        let coupling = match (
            self.coupling.anchor_energy_joules,
            self.coupling.v_prefactor,
        ) {
            (Some(e), None) => {
                let z_ref = match self.nuclei.as_slice() {
                    [] => return Err(domain("chain file lists no nuclei")),
                    [a] => f64::from(a.z),
                    [a, b, ..] => (f64::from(a.z) * f64::from(b.z)).sqrt(),
                };
                calibrate_prefactor_with_decay(T::lit(e), T::lit(z_ref), field, c)?
            }
            (None, Some(v)) => CouplingParams::new(T::lit(v), c)?,
            _ => {
                return Err(domain(
                    "coupling needs exactly one of anchor_energy_joules and v_prefactor",
                ))
            }
        };
        let cutoff = match self.coupling.cutoff {
            CutoffFile::Named(CutoffName::All) => CouplingCutoff::AllPairs,
            CutoffFile::Named(CutoffName::Nn) => CouplingCutoff::NearestNeighbor,
            CutoffFile::RadiusNm(r) => CouplingCutoff::Radius(T::lit(r)),
        };
        let nuclei = self
            .nuclei
            .iter()
            .map(|n| NucleusSpec::new(n.label.clone(), n.z, T::lit(n.gamma_rad_per_s_per_t)))
            .collect();
        let positions = self
            .nuclei
            .iter()
            .map(|n| [T::lit(n.position_nm[0]), T::lit(n.position_nm[1])])
            .collect();
        ChainSpec::new(nuclei, positions, field, coupling, cutoff)
    }

    /// The file form of `spec`, with `V` given explicitly and the replica
    /// coupling scale folded into it.
    pub fn from_spec<T: Real>(spec: &ChainSpec<T>) -> Self {
        let cutoff = match spec.cutoff {
            CouplingCutoff::AllPairs => CutoffFile::Named(CutoffName::All),
            CouplingCutoff::NearestNeighbor => CutoffFile::Named(CutoffName::Nn),
            CouplingCutoff::Radius(r) => CutoffFile::RadiusNm(r.as_f64()),
        };
        Self {
            field_tesla: spec.field.as_f64(),
            coupling: CouplingFile {
                anchor_energy_joules: None,
                v_prefactor: Some((spec.coupling.v_prefactor * spec.coupling_scale).as_f64()),
                c: spec.coupling.c_dimensionless.as_f64(),
                cutoff,
            },
            nuclei: spec
                .nuclei
                .iter()
                .zip(&spec.positions)
                .map(|(n, p)| NucleusFile {
                    label: n.label.clone(),
                    z: n.atomic_number,
                    gamma_rad_per_s_per_t: n.gyromagnetic_ratio.as_f64(),
                    position_nm: [p[0].as_f64(), p[1].as_f64()],
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{magnetic_length, HBAR_SI};

    const DEMO: &str = r#"{
        "field_tesla": 6.58,
        "coupling": {"anchor_energy_joules": 1e-23, "c": 1.0, "cutoff": "all"},
        "nuclei": [
            {"label": "a", "z": 1, "gamma_rad_per_s_per_t": 2.675e8, "position_nm": [0.0, 0.0]},
            {"label": "b", "z": 1, "gamma_rad_per_s_per_t": 2.675e8, "position_nm": [10.001610482381212, 0.0]}
        ]
    }"#;

    #[test]
    fn anchor_file_calibrates() {
        let spec: ChainSpec<f64> = ChainSpecFile::from_json(DEMO).unwrap().to_spec().unwrap();
        let ell = magnetic_length(6.58).unwrap();
        assert!((spec.separation(0, 1) - ell).abs() < 1e-12);
        let j = spec.pair_coupling(0, 1).unwrap();
        let expected = 1e-23 / HBAR_SI;
        assert!(((j - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn cutoff_forms() {
        for (text, expected) in [
            (r#""nn""#, CutoffFile::Named(CutoffName::Nn)),
            (r#""all""#, CutoffFile::Named(CutoffName::All)),
            ("12.5", CutoffFile::RadiusNm(12.5)),
        ] {
            assert_eq!(serde_json::from_str::<CutoffFile>(text).unwrap(), expected);
        }
        assert!(serde_json::from_str::<CutoffFile>(r#""near""#).is_err());
    }

    #[test]
    fn strictness() {
        let typo = DEMO.replace("field_tesla", "field_tesl");
        assert!(ChainSpecFile::from_json(&typo).is_err());
        let nested = DEMO.replace(r#""label": "a","#, r#""label": "a", "spin": 0.5,"#);
        assert!(ChainSpecFile::from_json(&nested).is_err());
        let both = DEMO.replace(r#""c": 1.0"#, r#""v_prefactor": 1.0, "c": 1.0"#);
        let file = ChainSpecFile::from_json(&both).unwrap();
        assert!(file.to_spec::<f64>().is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec: ChainSpec<f64> = ChainSpecFile::from_json(DEMO).unwrap().to_spec().unwrap();
        let again: ChainSpec<f64> =
            ChainSpecFile::from_json(&ChainSpecFile::from_spec(&spec).to_json())
                .unwrap()
                .to_spec()
                .unwrap();
        assert_eq!(again, spec);
    }
}
