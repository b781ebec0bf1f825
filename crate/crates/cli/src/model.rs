use std::path::Path;

use blaschke::{AtomicSingular, Factor, FiniteBlaschke, InnerModel, TruncatedBlaschke, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A function model as read from or written to a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    Finite(FiniteBlaschke),
    Sequence(TruncatedBlaschke),
    Singular(AtomicSingular),
    Inner(InnerModel),
}

impl ModelSpec {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn to_inner(&self) -> InnerModel {
        match self {
            Self::Finite(b) => b.clone().into(),
            Self::Sequence(t) => t.clone().into(),
            Self::Singular(s) => (*s).into(),
            Self::Inner(m) => m.clone(),
        }
    }

    /// The model as a finite product, if it is one.
    pub fn as_finite(&self) -> Result<Option<FiniteBlaschke>, CliError> {
        match self {
            Self::Finite(b) => Ok(Some(b.clone())),
            Self::Inner(m) => finite_model(m),
            _ => Ok(None),
        }
    }
}

fn finite_model(model: &InnerModel) -> Result<Option<FiniteBlaschke>, CliError> {
    let mut eta = C64::new(1.0, 0.0);
    let mut zeros = Vec::new();
    for factor in model.factors() {
        match factor {
            Factor::Finite(b) => {
                eta *= b.eta();
                zeros.extend_from_slice(b.zeros());
            }
            _ => return Ok(None),
        }
    }
    let product = FiniteBlaschke::new(eta, zeros)?;
    Ok(Some(match model.post() {
        Some(t) => product.post_compose(t)?,
        None => product,
    }))
}
