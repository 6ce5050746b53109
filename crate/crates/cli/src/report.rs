//! Report records. Everything here is deterministic: no wall-clock data, keys in
//! sorted order, floats in shortest round-trip form. Timings go to a sidecar.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Acceptance criterion identifiers.
pub mod criteria {
    pub const THETA0: &str = "C1-theta0";
    pub const SOLVER_1D: &str = "C2-solver1d";
    pub const COST: &str = "C3-cost-positivity";
    pub const CURVATURE: &str = "C4-curvature-continuity";
    pub const DISC_ENERGY: &str = "C5-disc-energy";
    pub const DOMAIN_ENERGY: &str = "C6-domain-energy";
    pub const DENSITY: &str = "C7-density";
    pub const WINDING: &str = "C8-winding";
    pub const INVARIANCE: &str = "C9-invariance";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub criteria: Vec<String>,
    pub config_hash: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
    pub error: Option<String>,
    /// Exit code contribution of this record.
    #[serde(skip)]
    pub code: i32,
}

impl Record {
    pub fn new(id: impl Into<String>, criteria: &[&str], config_hash: &str) -> Self {
        Self {
            id: id.into(),
            criteria: criteria.iter().map(|s| s.to_string()).collect(),
            config_hash: config_hash.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            residuals: BTreeMap::new(),
            pass: true,
            error: None,
            code: 0,
        }
    }

    pub fn input(mut self, key: &str, v: impl Serialize) -> Self {
        self.inputs.insert(key.into(), serde_json::to_value(v).expect("serializable"));
        self
    }

    pub fn output(&mut self, key: &str, v: impl Serialize) {
        self.outputs.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn residual(&mut self, key: &str, v: f64) {
        self.residuals.insert(key.into(), v);
    }

    /// Records a check; the record fails if any check fails.
    pub fn check(&mut self, key: &str, ok: bool) {
        self.outputs.insert(format!("check.{key}"), Value::Bool(ok));
        if !ok {
            self.pass = false;
            self.code = self.code.max(crate::error::exit::CRITERION_FAILURE);
        }
    }

    pub fn fail(&mut self, err: &CliError) {
        self.pass = false;
        self.error = Some(err.to_string());
        self.code = self.code.max(err.exit_code());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    pub pass: bool,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: &str, config_hash: &str, records: Vec<Record>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config_hash: config_hash.into(),
            pass: records.iter().all(|r| r.pass),
            records,
        }
    }

    /// 0 when every record passed, otherwise the most severe record code.
    pub fn exit_code(&self) -> i32 {
        self.records.iter().map(|r| if r.pass { 0 } else { r.code.max(1) }).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::write(dir.join(format!("{}.report.json", self.command)), self.to_json())?;
        Ok(())
    }
}

/// Wall-clock timings, kept out of the report so reports stay byte-identical.
#[derive(Debug, Default, Serialize)]
pub struct Timings(pub BTreeMap<String, f64>);

impl Timings {
    pub fn write(&self, dir: &Path, command: &str) -> Result<(), CliError> {
        fs::write(
            dir.join(format!("{command}.timings.json")),
            serde_json::to_string_pretty(&self.0).expect("timings serialize"),
        )?;
        Ok(())
    }
}
