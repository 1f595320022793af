use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One basis vector of a graded space, with its classical degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
}

/// The suspension convention used everywhere inside the engine: a basis
/// element of classical degree `d` sits in degree `d - 1` of the suspension.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShiftConvention;

impl ShiftConvention {
    pub const fn shifted(classical: i64) -> i64 {
        classical - 1
    }

    pub const fn classical(shifted: i64) -> i64 {
        shifted + 1
    }
}

/// Which operad the operations belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryType {
    /// Associative: operations on ordered tuples.
    Planar,
    /// Lie: graded-symmetric operations on the suspension.
    Symmetric,
}

impl SymmetryType {
    pub fn operad_name(self) -> &'static str {
        match self {
            SymmetryType::Planar => "ass",
            SymmetryType::Symmetric => "lie",
        }
    }
}

impl fmt::Display for SymmetryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.operad_name())
    }
}

/// A finite-dimensional graded vector space with an ordered, named basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    basis: Vec<BasisElement>,
    shifted: Vec<i64>,
    index: HashMap<String, usize>,
}

impl GradedSpace {
    pub fn new<I, S>(basis: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let basis: Vec<BasisElement> =
            basis.into_iter().map(|(name, degree)| BasisElement { name: name.into(), degree }).collect();
        if basis.is_empty() {
            return Err(Error::schema("basis", "the graded space must have dimension at least 1"));
        }
        let mut index = HashMap::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            if b.name.is_empty() {
                return Err(Error::schema(format!("basis[{i}]"), "empty basis name"));
            }
            if index.insert(b.name.clone(), i).is_some() {
                return Err(Error::schema(format!("basis[{i}]"), format!("duplicate basis name {:?}", b.name)));
            }
        }
        let shifted = basis.iter().map(|b| ShiftConvention::shifted(b.degree)).collect();
        Ok(GradedSpace { basis, shifted, index })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    /// Classical degree of basis element `i`.
    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    /// Degree of basis element `i` in the suspension.
    pub fn shifted_degree(&self, i: usize) -> i64 {
        self.shifted[i]
    }

    pub fn shifted_degrees(&self) -> &[i64] {
        &self.shifted
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.shifted[i] & 1 != 0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Smallest and largest classical degree.
    pub fn degree_range(&self) -> (i64, i64) {
        let min = self.basis.iter().map(|b| b.degree).min().unwrap();
        let max = self.basis.iter().map(|b| b.degree).max().unwrap();
        (min, max)
    }

    /// Same elements, listed in the order given by `perm` (new position k holds old `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        GradedSpace::new(perm.iter().map(|&i| (self.basis[i].name.clone(), self.basis[i].degree)))
    }

    pub fn format_tuple(&self, key: &[usize]) -> String {
        let names: Vec<&str> = key.iter().map(|&i| self.name(i)).collect();
        format!("({})", names.join(", "))
    }
}
