use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DkoModel, FnnModel, KidmModel, Objective, Observer};
use crate::data::{ChannelSpec, Standardizer};
use crate::nn::{Matrix, Mlp, MlpDocument};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Dko,
    Kidm,
    Ae,
    Kidmae,
    Fnn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [Self::Dko, Self::Kidm, Self::Ae, Self::Kidmae, Self::Fnn];

    pub fn name(self) -> &'static str {
        match self {
            Self::Dko => "dko",
            Self::Kidm => "kidm",
            Self::Ae => "ae",
            Self::Kidmae => "kidmae",
            Self::Fnn => "fnn",
        }
    }

    /// Label used in reports: `DKO+LR`, `FNN`, ...
    pub fn report_label(self) -> &'static str {
        match self {
            Self::Dko => "DKO+LR",
            Self::Kidm => "KIDM+LR",
            Self::Ae => "AE+LR",
            Self::Kidmae => "KIDMAE+LR",
            Self::Fnn => "FNN",
        }
    }

    pub fn objective(self) -> Objective {
        match self {
            Self::Dko | Self::Kidm => Objective::Full,
            _ => Objective::ReconstructionOnly,
        }
    }

    /// Whether current is fed as a separate control vector.
    pub fn is_controlled(self) -> bool {
        matches!(self, Self::Kidm | Self::Kidmae)
    }

    /// Battery channel layout for this kind of model.
    pub fn battery_channels(self) -> ChannelSpec {
        if self.is_controlled() {
            ChannelSpec::battery_controlled()
        } else {
            ChannelSpec::battery_uncontrolled()
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown model kind '{s}' (expected dko|kidm|ae|kidmae|fnn)")))
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A trained network set of any kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Dko(DkoModel),
    Kidm(KidmModel),
    Fnn(FnnModel),
}

impl Model {
    pub fn observer(&self) -> Option<&dyn Observer> {
        match self {
            Model::Dko(m) => Some(m),
            Model::Kidm(m) => Some(m),
            Model::Fnn(_) => None,
        }
    }
}

/// Serialised model with everything needed to apply it to raw recordings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub kind: ModelKind,
    pub observable_dim: usize,
    pub horizon: usize,
    pub normalization: Standardizer,
    pub channels: ChannelSpec,
    pub window_size: usize,
    pub seed: u64,
    pub networks: BTreeMap<String, MlpDocument>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub koopman: Option<Vec<Vec<f64>>>,
}

impl ModelBundle {
    pub fn new(
        kind: ModelKind,
        model: &Model,
        normalization: Standardizer,
        channels: ChannelSpec,
        window_size: usize,
        seed: u64,
    ) -> Self {
        let mut networks = BTreeMap::new();
        let (observable_dim, horizon, koopman) = match model {
            Model::Dko(m) => {
                networks.insert("encoder".to_string(), m.encoder.to_document());
                networks.insert("decoder".to_string(), m.decoder.to_document());
                let k = &m.koopman;
                let rows = (0..k.rows()).map(|i| k.row(i).to_vec()).collect();
                (k.rows(), m.horizon, Some(rows))
            }
            Model::Kidm(m) => {
                networks.insert("encoder".to_string(), m.encoder.to_document());
                networks.insert("operator".to_string(), m.operator_net.to_document());
                networks.insert("decoder".to_string(), m.decoder.to_document());
                (m.observable_dim(), m.horizon, None)
            }
            Model::Fnn(m) => {
                networks.insert("regressor".to_string(), m.net.to_document());
                (0, 0, None)
            }
        };
        Self {
            kind,
            observable_dim,
            horizon,
            normalization,
            channels,
            window_size,
            seed,
            networks,
            koopman,
        }
    }

    fn network(&self, name: &str) -> Result<Mlp> {
        let doc = self
            .networks
            .get(name)
            .ok_or_else(|| Error::Config(format!("bundle lacks network '{name}'")))?;
        Mlp::from_document(doc)
    }

    pub fn model(&self) -> Result<Model> {
        Ok(match self.kind {
            ModelKind::Dko | ModelKind::Ae => {
                let rows = self
                    .koopman
                    .as_ref()
                    .ok_or_else(|| Error::Config("dko bundle lacks koopman matrix".into()))?;
                Model::Dko(DkoModel::from_parts(
                    self.network("encoder")?,
                    self.network("decoder")?,
                    Matrix::from_rows(rows)?,
                    self.horizon,
                )?)
            }
            ModelKind::Kidm | ModelKind::Kidmae => Model::Kidm(KidmModel::from_parts(
                self.network("encoder")?,
                self.network("operator")?,
                self.network("decoder")?,
                self.horizon,
            )?),
            ModelKind::Fnn => Model::Fnn(FnnModel {
                net: self.network("regressor")?,
            }),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string(self)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}
