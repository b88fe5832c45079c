//! JSON model configuration: either a physical block (`body`, `fields`,
//! `trap`) or a `dimensionless` block, never both.

use crate::error::{Error, Result};
use crate::model::{to_dimensionless, BodySpec, DimlessParams, ModelParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsSpec {
    #[serde(rename = "B_Y")]
    pub b_y: f64,
    #[serde(rename = "B_Z", default)]
    pub b_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSpec {
    pub u1: f64,
    pub u2: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<FieldsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap: Option<TrapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensionless: Option<DimlessParams>,
}

/// A validated model. `physical` is present when the config was dimensionful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedModel {
    pub physical: Option<ModelParams>,
    pub dimless: DimlessParams,
}

impl ModelConfig {
    pub fn dimensionless(p: DimlessParams) -> Self {
        Self { dimensionless: Some(p), ..Self::default() }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_none() && self.fields.is_none() && self.trap.is_none() && self.dimensionless.is_none()
    }

    pub fn resolve(&self) -> Result<ResolvedModel> {
        let physical_keys = [self.body.is_some(), self.fields.is_some(), self.trap.is_some()];
        match (&self.dimensionless, physical_keys.iter().any(|k| *k)) {
            (Some(_), true) => Err(Error::Config("give either `dimensionless` or `body`/`fields`/`trap`, not both".into())),
            (Some(d), false) => {
                d.validate().map_err(|e| Error::Config(format!("dimensionless: {e}")))?;
                Ok(ResolvedModel { physical: None, dimless: *d })
            }
            (None, false) => Err(Error::Config("no model: need a `dimensionless` block or `body`, `fields` and `trap`".into())),
            (None, true) => {
                let missing: Vec<&str> = ["body", "fields", "trap"]
                    .iter()
                    .zip(physical_keys)
                    .filter(|(_, present)| !present)
                    .map(|(k, _)| *k)
                    .collect();
                if !missing.is_empty() {
                    return Err(Error::Config(format!("missing key(s): {}", missing.join(", "))));
                }
                let (body, f, t) = (self.body.as_ref().unwrap(), self.fields.unwrap(), self.trap.unwrap());
                let p = ModelParams::from_body(body, t.u1, t.u2, f.b_y, f.b_z)?;
                Ok(ResolvedModel { physical: Some(p), dimless: to_dimensionless(&p)? })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensionless_block() {
        let c = ModelConfig::from_json_str(r#"{"dimensionless": {"mu": 1, "nu": 1, "eta": 1, "q": 10}}"#).unwrap();
        let r = c.resolve().unwrap();
        assert_eq!(r.dimless, DimlessParams::symmetric(10.0).unwrap());
        assert!(r.physical.is_none());
    }

    #[test]
    fn physical_block() {
        let text = r#"{
            "body": {"point_masses": [{"mass": 1.0, "position": [1, 0, 0]}, {"mass": 1.0, "position": [-1, 0, 0]},
                                      {"mass": 1.0, "position": [0, 1, 0]}, {"mass": 1.0, "position": [0, -1, 0]}],
                     "point_charges": [{"charge": 1.0, "position": [1, 0, 0]}, {"charge": 1.0, "position": [-1, 0, 0]},
                                       {"charge": 1.0, "position": [0, 1, 0]}, {"charge": 1.0, "position": [0, -1, 0]}]},
            "fields": {"B_Y": 10.0, "B_Z": 1.0},
            "trap": {"u1": 2.0, "u2": 2.0}
        }"#;
        let r = ModelConfig::from_json_str(text).unwrap().resolve().unwrap();
        let p = r.physical.unwrap();
        assert_eq!(p.m3, 4.0);
        assert_eq!(p.m1, 2.0);
        assert!((r.dimless.a - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(ModelConfig::from_json_str(r#"{"dimensionless": {"mu": 1, "nu": 1, "eta": 1, "q": 10, "zeta": 2}}"#), Err(Error::Config(_))));
        assert!(matches!(ModelConfig::from_json_str(r#"{"extra": 1}"#), Err(Error::Config(_))));
        let both = ModelConfig {
            dimensionless: Some(DimlessParams::symmetric(2.0).unwrap()),
            trap: Some(TrapSpec { u1: 1.0, u2: 1.0 }),
            ..ModelConfig::default()
        };
        assert!(matches!(both.resolve(), Err(Error::Config(_))));
        let partial = ModelConfig { trap: Some(TrapSpec { u1: 1.0, u2: 1.0 }), ..ModelConfig::default() };
        match partial.resolve() {
            Err(Error::Config(m)) => assert!(m.contains("body") && m.contains("fields")),
            other => panic!("{other:?}"),
        }
        assert!(ModelConfig::default().resolve().is_err());
        let e = ModelConfig::from_json_str("{\n  \"dimensionless\": 3\n}").unwrap_err();
        assert!(e.to_string().contains("line 2"));
    }
}
