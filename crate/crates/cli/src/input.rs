//! The JSON instance file.
//!
//! ```json
//! {
//!   "mode": "additive",
//!   "classes": [
//!     { "eigenvalues": [ { "re": "1/2", "im": "0", "blocks": [2, 1] } ] }
//!   ]
//! }
//! ```
//!
//! Numbers are exact rational strings; JSON numbers are rejected so that no
//! floating-point value can slip into the exact layer.

use std::fmt;
use std::path::Path;

use dsp_core::classes::{format_rational, parse_rational};
use dsp_core::partitions::{Jnf, Partition};
use dsp_core::{ClassSpec, Error, GaussianRational, Instance, Mode};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub mode: Mode,
    pub classes: Vec<ClassEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub eigenvalues: Vec<EigenvalueEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenvalueEntry {
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
    pub blocks: Vec<usize>,
}

fn zero_string() -> String {
    "0".into()
}

/// A parse or validation failure, with a position when the JSON itself is bad.
#[derive(Debug)]
pub struct InputError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for InputError {}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError {
            line: None,
            column: None,
            message: e.to_string(),
        }
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| {
            let mut message = e.to_string();
            // serde_json appends its own position; we report it separately
            if let Some(at) = message.rfind(" at line ") {
                message.truncate(at);
            }
            if message.contains("floating point") || message.contains("integer") {
                message.push_str(" (write numbers as exact strings such as \"1/2\")");
            }
            InputError {
                line: Some(e.line()),
                column: Some(e.column()),
                message,
            }
        })
    }

    pub fn read(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError {
            line: None,
            column: None,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn to_instance(&self) -> Result<Instance, InputError> {
        let mut classes = Vec::with_capacity(self.classes.len());
        for (j, class) in self.classes.iter().enumerate() {
            let at = |msg: String| InputError {
                line: None,
                column: None,
                message: format!("class {}: {msg}", j + 1),
            };
            let mut slots = Vec::new();
            let mut values = Vec::new();
            for (k, ev) in class.eigenvalues.iter().enumerate() {
                if ev.blocks.is_empty() || ev.blocks.contains(&0) {
                    return Err(at(format!("eigenvalue {}: blocks must be positive integers", k + 1)));
                }
                let re = parse_rational(&ev.re).map_err(|e| at(e.to_string()))?;
                let im = parse_rational(&ev.im).map_err(|e| at(e.to_string()))?;
                values.push(GaussianRational::new(re, im));
                slots.push(Partition::new(ev.blocks.clone()));
            }
            let jnf = Jnf::try_new(slots).map_err(|e| at(e.to_string()))?;
            classes.push(ClassSpec::new(self.mode, jnf, values).map_err(|e| at(e.to_string()))?);
        }
        Ok(Instance::new(self.mode, classes)?)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            mode: inst.mode(),
            classes: inst
                .classes()
                .iter()
                .map(|c| ClassEntry {
                    eigenvalues: c
                        .eigenvalues()
                        .iter()
                        .zip(c.jnf().slots())
                        .map(|(v, p)| EigenvalueEntry {
                            re: format_rational(&v.re),
                            im: format_rational(&v.im),
                            blocks: p.parts().to_vec(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

pub fn load_instance(path: &Path) -> Result<Instance, InputError> {
    InstanceFile::read(path)?.to_instance()
}

#[cfg(test)]
mod tests {
    use super::*;

    const N2: &str = r#"{
  "mode": "additive",
  "classes": [
    {"eigenvalues": [{"re": "0", "blocks": [1]}, {"re": "1/3", "blocks": [1]}]},
    {"eigenvalues": [{"re": "0", "blocks": [1]}, {"re": "-1/2", "blocks": [1]}]},
    {"eigenvalues": [{"re": "1/4", "blocks": [1]}, {"re": "-1/12", "blocks": [1]}]}
  ]
}"#;

    #[test]
    fn parses_a_small_file() {
        let inst = InstanceFile::parse(N2).unwrap().to_instance().unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.p(), 2);
        assert!(inst.trace_sum().is_zero());
    }

    #[test]
    fn round_trip() {
        let file = InstanceFile::parse(N2).unwrap();
        let again = InstanceFile::parse(&file.to_json()).unwrap();
        assert_eq!(again.to_instance().unwrap(), file.to_instance().unwrap());
        let from = InstanceFile::from_instance(&file.to_instance().unwrap());
        assert_eq!(InstanceFile::parse(&from.to_json()).unwrap(), from);
    }

    #[test]
    fn float_literal_has_a_position() {
        let bad = "{\n  \"mode\": \"additive\",\n  \"classes\": [{\"eigenvalues\": [{\"re\": 0.5, \"blocks\": [1]}]}]\n}";
        let err = InstanceFile::parse(bad).unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains("exact strings"), "{err}");
    }

    #[test]
    fn decimal_strings_are_rejected() {
        let bad = r#"{"mode": "additive", "classes": [{"eigenvalues": [{"re": "0.5", "blocks": [1]}]}]}"#;
        assert!(InstanceFile::parse(bad).unwrap().to_instance().is_err());
    }

    #[test]
    fn duplicate_eigenvalue_is_a_validation_error() {
        let bad = r#"{"mode": "additive", "classes": [
            {"eigenvalues": [{"re": "1", "blocks": [1]}, {"re": "1", "blocks": [1]}]},
            {"eigenvalues": [{"re": "-1", "blocks": [2]}]}]}"#;
        let err = InstanceFile::parse(bad).unwrap().to_instance().unwrap_err();
        assert!(err.message.contains("class 1"), "{err}");
    }

    #[test]
    fn zero_block_is_rejected() {
        let bad = r#"{"mode": "additive", "classes": [{"eigenvalues": [{"re": "1", "blocks": [0]}]}]}"#;
        assert!(InstanceFile::parse(bad).unwrap().to_instance().is_err());
    }
}
