//! JSON instance files and reports.
//!
//! ```json
//! {
//!   "format_version": "1.0",
//!   "name": "example 4.2",
//!   "order": 3,
//!   "dim": 2,
//!   "A1": [1, 0, 0, 0, -1, 0, 0, 1],
//!   "A2": [1, 0, 0, 0, -1, -1, 0, 1],
//!   "q1": [-1, -1],
//!   "q2": [-4, -2]
//! }
//! ```
//!
//! Tensor entries are flat and row-major. Numbers are written with shortest round-trip
//! formatting, so saving and loading reproduces every finite double bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classes::TensorPair;
use crate::error::{Result, VtcpError};
use crate::solvers::VtcpInstance;
use crate::tensor::DenseTensor;

pub const FORMAT_VERSION: &str = "1.0";
const SUPPORTED_MAJOR: &str = "1";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    format_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    order: usize,
    dim: usize,
    #[serde(rename = "A1")]
    a1: Vec<f64>,
    #[serde(rename = "A2")]
    a2: Vec<f64>,
    q1: Vec<f64>,
    q2: Vec<f64>,
}

fn field_error(field: &str, reason: impl Into<String>) -> VtcpError {
    VtcpError::InvalidField {
        field: field.into(),
        reason: reason.into(),
    }
}

impl InstanceFile {
    fn into_instance(self) -> Result<(VtcpInstance, InstanceMeta)> {
        let major = self.format_version.split('.').next().unwrap_or("");
        if major != SUPPORTED_MAJOR {
            return Err(VtcpError::FormatVersion(self.format_version));
        }
        if self.order < 2 {
            return Err(field_error("order", format!("must be at least 2, got {}", self.order)));
        }
        if self.dim == 0 {
            return Err(field_error("dim", "must be positive"));
        }
        let len = self
            .dim
            .checked_pow(self.order as u32)
            .ok_or_else(|| field_error("order", "dim^order overflows"))?;
        for (name, v, expected) in [
            ("A1", &self.a1, len),
            ("A2", &self.a2, len),
            ("q1", &self.q1, self.dim),
            ("q2", &self.q2, self.dim),
        ] {
            if v.len() != expected {
                return Err(field_error(name, format!("expected {expected} entries, got {}", v.len())));
            }
            if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
                return Err(field_error(name, format!("entry {pos} is not finite")));
            }
        }
        let a1 = DenseTensor::new(self.order, self.dim, self.a1).map_err(|e| field_error("A1", e.to_string()))?;
        let a2 = DenseTensor::new(self.order, self.dim, self.a2).map_err(|e| field_error("A2", e.to_string()))?;
        let inst = VtcpInstance::new(TensorPair::new(a1, a2)?, self.q1, self.q2)?;
        let meta = InstanceMeta {
            name: self.name,
            source: self.source,
        };
        Ok((inst, meta))
    }
}

/// Parses instance JSON, reporting syntax errors by line and column and shape errors by
/// field name.
pub fn parse_instance(text: &str) -> Result<(VtcpInstance, InstanceMeta)> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| VtcpError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_instance()
}

pub fn instance_to_json(inst: &VtcpInstance, meta: &InstanceMeta) -> String {
    let file = InstanceFile {
        format_version: FORMAT_VERSION.into(),
        name: meta.name.clone(),
        source: meta.source.clone(),
        order: inst.order(),
        dim: inst.dim(),
        a1: inst.pair().a1.entries().to_vec(),
        a2: inst.pair().a2.entries().to_vec(),
        q1: inst.q1().to_vec(),
        q2: inst.q2().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("instance serialization")
}

fn io_error(path: &Path, e: std::io::Error) -> VtcpError {
    VtcpError::Io(format!("{}: {e}", path.display()))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<(VtcpInstance, InstanceMeta)> {
    let path = path.as_ref();
    parse_instance(&fs::read_to_string(path).map_err(|e| io_error(path, e))?)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<VtcpInstance> {
    read_instance(path).map(|(inst, _)| inst)
}

pub fn save_instance(inst: &VtcpInstance, meta: &InstanceMeta, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(inst, meta) + "\n").map_err(|e| io_error(path, e))?;
    Ok(())
}

/// Writes any report (solve report, class verdicts, reproduction) as pretty JSON.
pub fn save_report<T: Serialize + ?Sized>(report: &T, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| VtcpError::Io(e.to_string()))?;
    let path = path.as_ref();
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::registry;

    #[test]
    fn round_trip_is_exact() {
        let inst = registry::instance("4.2").unwrap();
        let meta = InstanceMeta {
            name: Some("example 4.2".into()),
            source: None,
        };
        let (back, m) = parse_instance(&instance_to_json(&inst, &meta)).unwrap();
        assert_eq!(back, inst);
        assert_eq!(m, meta);

        let tricky = VtcpInstance::new(
            inst.pair().clone(),
            vec![0.1 + 0.2, -1.0 / 3.0],
            vec![f64::MIN_POSITIVE, -1e300],
        )
        .unwrap();
        let back = parse_instance(&instance_to_json(&tricky, &InstanceMeta::default())).unwrap().0;
        for (a, b) in back.q1().iter().chain(back.q2()).zip(tricky.q1().iter().chain(tricky.q2())) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    fn text(a1: &str) -> String {
        format!(
            r#"{{"format_version": "1.0", "order": 3, "dim": 2,
"A1": {a1}, "A2": [1,0,0,0,-1,-1,0,1], "q1": [-1,-1], "q2": [-4,-2]}}"#
        )
    }

    #[test]
    fn wrong_length_names_the_field() {
        match parse_instance(&text("[1,0,0]")) {
            Err(VtcpError::InvalidField { field, .. }) => assert_eq!(field, "A1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nan_and_syntax_errors_are_rejected() {
        assert!(matches!(
            parse_instance(&text("[NaN,0,0,0,-1,0,0,1]")),
            Err(VtcpError::Parse { line: 2, .. })
        ));
        assert!(parse_instance(&text("[1e999,0,0,0,-1,0,0,1]")).is_err());
        assert!(matches!(parse_instance("{"), Err(VtcpError::Parse { .. })));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let t = text("[1,0,0,0,-1,0,0,1]").replace("\"order\"", "\"ordre\": 3, \"order\"");
        assert!(matches!(parse_instance(&t), Err(VtcpError::Parse { .. })));
    }

    #[test]
    fn unknown_major_version_is_rejected() {
        let t = text("[1,0,0,0,-1,0,0,1]").replace("\"1.0\"", "\"2.0\"");
        assert!(matches!(parse_instance(&t), Err(VtcpError::FormatVersion(_))));
        let t = text("[1,0,0,0,-1,0,0,1]").replace("\"1.0\"", "\"1.3\"");
        assert!(parse_instance(&t).is_ok());
    }

    #[test]
    fn files_and_reports() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("inst.json");
        let inst = registry::instance("4.1").unwrap();
        save_instance(&inst, &InstanceMeta::default(), &p).unwrap();
        assert_eq!(load_instance(&p).unwrap(), inst);
        assert!(matches!(load_instance(dir.path().join("missing.json")), Err(VtcpError::Io(_))));

        let r = crate::solvers::solve_newton(&inst, &[1.0, 1.0], &Default::default()).unwrap();
        let rp = dir.path().join("report.json");
        save_report(&r, &rp).unwrap();
        let s = fs::read_to_string(&rp).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["method"], "newton");
        assert_eq!(v["x"][0].as_f64().unwrap().to_bits(), r.x[0].to_bits());
    }
}
