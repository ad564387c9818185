use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

/// The six memory models implemented as rule catalogs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Sc,
    Tso,
    Pso,
    Wmm,
    WmmD,
    WmmS,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::Sc,
        Model::Tso,
        Model::Pso,
        Model::Wmm,
        Model::WmmD,
        Model::WmmS,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Sc => "sc",
            Model::Tso => "tso",
            Model::Pso => "pso",
            Model::Wmm => "wmm",
            Model::WmmD => "wmm-d",
            Model::WmmS => "wmm-s",
        }
    }

    /// Prefix used when printing rule names, e.g. `WMM-D` in `WMM-D-LdIb`.
    pub fn rule_prefix(self) -> &'static str {
        match self {
            Model::Sc => "SC",
            Model::Tso => "TSO",
            Model::Pso => "PSO",
            Model::Wmm => "WMM",
            Model::WmmD => "WMM-D",
            Model::WmmS => "WMM-S",
        }
    }

    /// Models with an invalidation buffer.
    pub fn is_wmm_family(self) -> bool {
        matches!(self, Model::Wmm | Model::WmmD | Model::WmmS)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown model `{0}` (expected one of sc, tso, pso, wmm, wmm-d, wmm-s)")]
pub struct UnknownModel(pub String);

impl FromStr for Model {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sc" => Ok(Model::Sc),
            "tso" => Ok(Model::Tso),
            "pso" => Ok(Model::Pso),
            "wmm" => Ok(Model::Wmm),
            "wmm-d" | "wmmd" => Ok(Model::WmmD),
            "wmm-s" | "wmms" => Ok(Model::WmmS),
            _ => Err(UnknownModel(s.to_string())),
        }
    }
}

impl Serialize for Model {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}
