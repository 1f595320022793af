use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algcore::SymmetryType;
use crate::exactla::Rational;

pub const SCHEMA_VERSION: &str = "operformal/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operad {
    Ass,
    Lie,
}

impl Operad {
    pub fn symmetry(self) -> SymmetryType {
        match self {
            Operad::Ass => SymmetryType::Planar,
            Operad::Lie => SymmetryType::Symmetric,
        }
    }

    pub fn from_symmetry(s: SymmetryType) -> Self {
        match s {
            SymmetryType::Planar => Operad::Ass,
            SymmetryType::Symmetric => Operad::Lie,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
}

/// One operation value `m_{w+1}(inputs) = Σ c · name`, classical conventions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationRecord {
    pub weight: usize,
    pub inputs: Vec<String>,
    pub output: BTreeMap<String, Rational>,
}

/// A minimal A∞ (`ass`) or L∞ (`lie`) structure in classical conventions:
/// the weight-`w` operation has arity `w + 1` and degree `1 − w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema: String,
    pub operad: Operad,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub operations: Vec<OperationRecord>,
    pub max_weight: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductRecord {
    pub inputs: [String; 2],
    pub output: BTreeMap<String, Rational>,
}

/// A strict dg associative algebra: differential of degree +1 and a product of degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgAlgebraSpec {
    pub schema: String,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub differential: BTreeMap<String, BTreeMap<String, Rational>>,
    #[serde(default)]
    pub product: Vec<ProductRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_weight: Option<usize>,
}
