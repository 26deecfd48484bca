//! Channel file format.
//!
//! ```json
//! { "dim": 2, "kraus": [ [[[1,0],[0,0]], [[0,0],[0.8,0]]], ... ] }
//! { "standard": "amplitude_damping", "param": 0.36 }
//! ```
//!
//! Each Kraus operator is a list of rows; each entry is `[re, im]`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{standard_channel, KrausChannel, StandardKind};
use crate::error::{Error, Result};
use crate::matkernel::ComplexMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Explicit { dim: usize, kraus: Vec<ComplexMatrix> },
    Standard { standard: StandardKind, param: f64 },
}

impl ChannelSpec {
    /// Interprets a parsed JSON object, reporting which shape was expected.
    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Format("channel must be a JSON object".into()))?;
        if obj.contains_key("standard") {
            let kind = obj["standard"]
                .as_str()
                .ok_or_else(|| Error::Format("\"standard\" must be a string".into()))?
                .parse::<StandardKind>()?;
            let param = obj
                .get("param")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Format("standard channel needs a numeric \"param\"".into()))?;
            return Ok(ChannelSpec::Standard {
                standard: kind,
                param,
            });
        }
        if obj.contains_key("kraus") {
            let dim = obj
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Format("explicit channel needs a positive integer \"dim\"".into()))?
                as usize;
            let kraus: Vec<ComplexMatrix> = serde_json::from_value(obj["kraus"].clone())
                .map_err(|e| Error::Format(format!("bad \"kraus\" list: {e}")))?;
            return Ok(ChannelSpec::Explicit { dim, kraus });
        }
        Err(Error::Format(
            "channel object needs either \"kraus\" or \"standard\"".into(),
        ))
    }

    /// Builds the channel. Shape problems are format errors; trace
    /// preservation is not checked here.
    pub fn to_channel(&self) -> Result<KrausChannel> {
        match self {
            ChannelSpec::Explicit { dim, kraus } => {
                if kraus.is_empty() {
                    return Err(Error::Format("\"kraus\" list is empty".into()));
                }
                if let Some((k, m)) = kraus
                    .iter()
                    .enumerate()
                    .find(|(_, m)| m.rows() != *dim || m.cols() != *dim)
                {
                    return Err(Error::Format(format!(
                        "Kraus operator {k} is {}x{}, but \"dim\" is {dim}",
                        m.rows(),
                        m.cols()
                    )));
                }
                KrausChannel::new(kraus.clone())
            }
            ChannelSpec::Standard { standard, param } => standard_channel(*standard, *param)
                .map_err(|e| Error::Format(e.to_string())),
        }
    }
}

impl From<&KrausChannel> for ChannelSpec {
    fn from(ch: &KrausChannel) -> Self {
        ChannelSpec::Explicit {
            dim: ch.dim(),
            kraus: ch.ops().to_vec(),
        }
    }
}

/// Parses JSON text, attaching the offending line to syntax errors.
pub fn parse_json_with_context(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        let line = e.line();
        let snippet = text.lines().nth(line.saturating_sub(1)).unwrap_or("").trim_end();
        Error::Format(format!(
            "line {line}, column {}: {e}\n  {line:>4} | {snippet}",
            e.column()
        ))
    })
}

/// Reads a channel from its JSON text.
pub fn parse_channel_json(text: &str) -> Result<KrausChannel> {
    let value = parse_json_with_context(text)?;
    ChannelSpec::from_value(&value)?.to_channel()
}
