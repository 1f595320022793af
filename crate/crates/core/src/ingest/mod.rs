//! The input/output boundary: JSON schemas in classical conventions, the
//! décalage to the shifted form used internally, homotopy transfer of dg
//! associative algebras, and reports.

mod decalage;
mod report;
mod schema;
mod transfer;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub use decalage::decalage_parity;
pub use report::{crosscheck, EulerSummary, KaledinSummary, Report, Verdict, WitnessSummary};
pub use schema::{
    BasisEntry, DgAlgebraSpec, Operad, OperationRecord, ProblemSpec, ProductRecord, SCHEMA_VERSION,
};
pub use transfer::{transfer, transfer_spec, Contraction, DgAlgebra};

use crate::algcore::{GradedSpace, MultilinearOp};
use crate::coder::{Coderivation, PInfStructure};
use crate::error::{Error, Result};
use crate::exactla::Rational;

pub(crate) fn check_schema_version(found: &str) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::schema("schema", format!("expected {SCHEMA_VERSION:?}, found {found:?}")));
    }
    Ok(())
}

pub(crate) fn space_of(basis: &[BasisEntry]) -> Result<Arc<GradedSpace>> {
    Ok(Arc::new(GradedSpace::new(basis.iter().map(|b| (b.name.clone(), b.degree)))?))
}

pub(crate) fn lookup(space: &GradedSpace, name: &str, location: impl FnOnce() -> String) -> Result<usize> {
    space
        .index_of(name)
        .ok_or_else(|| Error::schema(location(), format!("unknown basis element {name:?}")))
}

/// Validates a problem and converts it to shifted conventions, then runs the
/// Maurer-Cartan check.
pub fn parse(spec: &ProblemSpec) -> Result<PInfStructure> {
    check_schema_version(&spec.schema)?;
    if spec.max_weight == 0 {
        return Err(Error::schema("max_weight", "must be at least 1"));
    }
    let space = space_of(&spec.basis)?;
    let sym = spec.operad.symmetry();
    let mut ops: BTreeMap<usize, MultilinearOp> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for (r, rec) in spec.operations.iter().enumerate() {
        let loc = format!("operations[{r}]");
        if rec.weight == 0 {
            return Err(Error::schema(format!("{loc}.weight"), "weights start at 1"));
        }
        if rec.weight > spec.max_weight {
            return Err(Error::schema(
                format!("{loc}.weight"),
                format!("weight {} exceeds max_weight {}", rec.weight, spec.max_weight),
            ));
        }
        if rec.inputs.len() != rec.weight + 1 {
            return Err(Error::schema(
                format!("{loc}.inputs"),
                format!("a weight-{} record needs {} inputs, got {}", rec.weight, rec.weight + 1, rec.inputs.len()),
            ));
        }
        let inputs = rec
            .inputs
            .iter()
            .enumerate()
            .map(|(k, name)| lookup(&space, name, || format!("{loc}.inputs[{k}]")))
            .collect::<Result<Vec<usize>>>()?;
        let mut key = inputs.clone();
        if spec.operad == Operad::Lie {
            key.sort_unstable();
        }
        if !seen.insert((rec.weight, key)) {
            return Err(Error::schema(loc, "duplicate record for the same inputs"));
        }
        let in_degree: i64 = inputs.iter().map(|&i| space.degree(i)).sum();
        let expected = in_degree + 1 - rec.weight as i64;
        let sign = Rational::sign(decalage_parity(&space, &inputs));
        let op = ops
            .entry(rec.weight)
            .or_insert_with(|| MultilinearOp::zero(space.clone(), rec.weight + 1, 1, sym));
        for (name, c) in &rec.output {
            let out = lookup(&space, name, || format!("{loc}.output"))?;
            if space.degree(out) != expected {
                return Err(Error::Degree {
                    location: format!("{loc}.output.{name}"),
                    message: format!(
                        "a weight-{} operation has degree {} so the output must have degree {expected}, but {name:?} has degree {}",
                        rec.weight,
                        1 - rec.weight as i64,
                        space.degree(out)
                    ),
                });
            }
            op.add_term(&inputs, out, &sign * c).map_err(|e| match e {
                Error::Contract(msg) => Error::schema(loc.clone(), msg),
                other => other,
            })?;
        }
    }
    let q = Coderivation::from_components(space, sym, 1, spec.max_weight, ops)?;
    PInfStructure::new(q)
}

pub fn parse_str(text: &str) -> Result<PInfStructure> {
    parse(&serde_json::from_str(text)?)
}

/// The classical presentation of `q`; `parse(&emit(q)) == q`.
pub fn emit(q: &PInfStructure) -> ProblemSpec {
    let space = q.space();
    let mut operations = Vec::new();
    for (w, op) in q.q().components() {
        for (key, v) in op.entries() {
            let sign = Rational::sign(decalage_parity(space, key));
            operations.push(OperationRecord {
                weight: w,
                inputs: key.iter().map(|&i| space.name(i).to_string()).collect(),
                output: v.iter().map(|(o, c)| (space.name(o).to_string(), &sign * c)).collect(),
            });
        }
    }
    ProblemSpec {
        schema: SCHEMA_VERSION.to_string(),
        operad: Operad::from_symmetry(q.symmetry()),
        basis: space.basis().iter().map(|b| BasisEntry { name: b.name.clone(), degree: b.degree }).collect(),
        operations,
        max_weight: q.cutoff(),
        options: BTreeMap::new(),
    }
}

pub fn emit_string(q: &PInfStructure) -> String {
    serde_json::to_string_pretty(&emit(q)).expect("problem specs always serialize")
}

/// Classical value `m_{w+1}(inputs)` of a shifted structure, as `(name, coefficient)` pairs.
pub fn classical_value(q: &PInfStructure, weight: usize, inputs: &[usize]) -> Result<Vec<(String, Rational)>> {
    let v = q.q_w(weight).evaluate(inputs)?;
    let sign = Rational::sign(decalage_parity(q.space(), inputs));
    Ok(v.iter().map(|(o, c)| (q.space().name(o).to_string(), &sign * c)).collect())
}
