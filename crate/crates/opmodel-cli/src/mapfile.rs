//! JSON input formats for user-supplied statistics maps and qubit effects.

use opmodel::maps::{AffineStateMap, FiniteModelSpec};
use opmodel::qubit_cayley::CayleyEffect;
use serde::Deserialize;

pub const SCHEMA: &str = "opmodel/1";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub schema: String,
    pub source: ModelSpecIn,
    pub target: ModelSpecIn,
    /// Row-major matrix acting on source state coordinates.
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpecIn {
    Classical { size: usize },
    Qubit,
    Qudit { dim: usize },
}

impl ModelSpecIn {
    fn build(&self) -> Result<FiniteModelSpec, String> {
        match self {
            ModelSpecIn::Classical { size } => {
                FiniteModelSpec::classical(*size).map_err(|e| e.to_string())
            }
            ModelSpecIn::Qubit => Ok(FiniteModelSpec::qubit()),
            ModelSpecIn::Qudit { dim } => FiniteModelSpec::qudit(*dim).map_err(|e| e.to_string()),
        }
    }
}

/// Reads a map description from `path` and materializes it, validating that
/// it carries states to states.  All failures are reported as input errors.
pub fn load_map(path: &std::path::Path) -> Result<AffineStateMap, String> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: MapFile =
        serde_json::from_str(&raw).map_err(|e| format!("{}: {e}", path.display()))?;
    if file.schema != SCHEMA {
        return Err(format!(
            "{}: unsupported schema {:?} (expected {:?})",
            path.display(),
            file.schema,
            SCHEMA
        ));
    }
    let source = file.source.build()?;
    let target = file.target.build()?;
    AffineStateMap::from_rows(source, target, &file.matrix)
        .map_err(|e| format!("{}: {e}", path.display()))
}

/// A qubit effect in four-vector coordinates: ½(a₀·I + **a**·σ).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectFile {
    pub schema: String,
    pub a0: f64,
    pub a: [f64; 3],
}

/// Reads a qubit effect from `path`, validating the effect inequalities.
pub fn load_effect(path: &std::path::Path) -> Result<CayleyEffect, String> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: EffectFile =
        serde_json::from_str(&raw).map_err(|e| format!("{}: {e}", path.display()))?;
    if file.schema != SCHEMA {
        return Err(format!(
            "{}: unsupported schema {:?} (expected {:?})",
            path.display(),
            file.schema,
            SCHEMA
        ));
    }
    CayleyEffect::new(file.a0, file.a).map_err(|e| format!("{}: {e}", path.display()))
}
