//! Versioned JSON persistence.
//!
//! A saved object is `{format_version, kind, params, status,
//! fitted_params}`. Loading rebuilds the kind through the registry from its
//! parameters, then restores the fitted state. Floats round-trip exactly.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{AnyEstimator, FitStatus};
use crate::mathobj::Distribution;
use crate::params::ParamMap;
use crate::registry::{KindDescriptor, Registry};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedObject {
    pub format_version: u32,
    pub kind: String,
    pub params: ParamMap,
    pub status: FitStatus,
    pub fitted_params: ParamMap,
}

impl SavedObject {
    pub fn of_estimator(e: &AnyEstimator) -> SavedObject {
        let state = e.fit_state();
        SavedObject {
            format_version: FORMAT_VERSION,
            kind: e.kind().to_string(),
            params: e.get_params(false),
            status: state.status,
            fitted_params: state.fitted_params,
        }
    }

    /// Value objects have no fitted state and save as `unfitted`.
    pub fn of_distribution(d: &dyn Distribution) -> SavedObject {
        SavedObject {
            format_version: FORMAT_VERSION,
            kind: d.kind().to_string(),
            params: d.params(),
            status: FitStatus::Unfitted,
            fitted_params: ParamMap::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<SavedObject> {
        let doc: SavedObject = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        Ok(doc)
    }
}

pub fn to_json(e: &AnyEstimator) -> Result<String> {
    SavedObject::of_estimator(e).to_json()
}

pub fn save(e: &AnyEstimator, mut sink: impl Write) -> Result<()> {
    sink.write_all(to_json(e)?.as_bytes())
        .map_err(|err| Error::Serialization(err.to_string()))
}

pub fn from_json(registry: &Registry, text: &str) -> Result<AnyEstimator> {
    let doc = SavedObject::from_json(text)?;
    match registry.get(&doc.kind) {
        Ok(KindDescriptor::Estimator(_)) => {}
        Ok(KindDescriptor::Value(_)) => {
            return Err(Error::Serialization(format!("`{}` is not an estimator kind", doc.kind)))
        }
        Err(_) => return Err(Error::UnknownKindOnLoad(doc.kind)),
    }
    let mut e = registry.create(&doc.kind, &doc.params)?;
    if doc.status == FitStatus::Fitted {
        e.as_estimator_mut().restore_fitted(&doc.fitted_params)?;
    }
    Ok(e)
}

pub fn load(registry: &Registry, mut source: impl Read) -> Result<AnyEstimator> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|err| Error::Serialization(err.to_string()))?;
    from_json(registry, &text)
}

pub fn distribution_to_json(d: &dyn Distribution) -> Result<String> {
    SavedObject::of_distribution(d).to_json()
}

pub fn distribution_from_json(registry: &Registry, text: &str) -> Result<Box<dyn Distribution>> {
    let doc = SavedObject::from_json(text)?;
    match registry.get(&doc.kind) {
        Ok(KindDescriptor::Value(_)) => registry.create_distribution(&doc.kind, &doc.params),
        Ok(KindDescriptor::Estimator(_)) => Err(Error::Serialization(format!("`{}` is not a distribution kind", doc.kind))),
        Err(_) => Err(Error::UnknownKindOnLoad(doc.kind)),
    }
}
