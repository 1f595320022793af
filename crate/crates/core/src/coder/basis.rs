use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use super::Coderivation;
use crate::algcore::{compose_into, GradedSpace, Key, MultilinearOp, PreparedOp, SymmetryType};
use crate::error::{Error, Result};
use crate::exactla::{RatMatrix, Rational, SparseVec};

/// The monomial basis of coderivation components of one weight and codegree:
/// operations sending a single (canonical) input tuple to a single basis vector.
#[derive(Clone, Debug)]
pub struct ComponentBasis {
    space: Arc<GradedSpace>,
    symmetry: SymmetryType,
    weight: usize,
    codegree: i64,
    elements: Vec<(Key, usize)>,
    index: HashMap<(Key, usize), usize>,
}

fn tuples(space: &GradedSpace, len: usize, symmetry: SymmetryType) -> Vec<Key> {
    let dim = space.dim();
    let mut out: Vec<Key> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for t in &out {
            let start = match symmetry {
                SymmetryType::Planar => 0,
                SymmetryType::Symmetric => t.last().copied().unwrap_or(0),
            };
            for i in start..dim {
                if symmetry == SymmetryType::Symmetric && t.last() == Some(&i) && space.is_odd(i) {
                    continue;
                }
                let mut k = t.clone();
                k.push(i);
                next.push(k);
            }
        }
        out = next;
    }
    out
}

impl ComponentBasis {
    pub fn new(space: Arc<GradedSpace>, symmetry: SymmetryType, weight: usize, codegree: i64) -> Self {
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for o in 0..space.dim() {
            by_degree.entry(space.shifted_degree(o)).or_default().push(o);
        }
        let mut elements = Vec::new();
        for key in tuples(&space, weight + 1, symmetry) {
            let target: i64 = key.iter().map(|&i| space.shifted_degree(i)).sum::<i64>() + codegree;
            if let Some(outs) = by_degree.get(&target) {
                for &o in outs {
                    elements.push((key.clone(), o));
                }
            }
        }
        let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        ComponentBasis { space, symmetry, weight, codegree, elements, index }
    }

    /// All nonempty component bases of weight `weight`, keyed by codegree.
    pub fn all_codegrees(space: Arc<GradedSpace>, symmetry: SymmetryType, weight: usize) -> BTreeMap<i64, Self> {
        let mut buckets: BTreeMap<i64, Vec<(Key, usize)>> = BTreeMap::new();
        for key in tuples(&space, weight + 1, symmetry) {
            let s: i64 = key.iter().map(|&i| space.shifted_degree(i)).sum();
            for o in 0..space.dim() {
                buckets.entry(space.shifted_degree(o) - s).or_default().push((key.clone(), o));
            }
        }
        buckets
            .into_iter()
            .map(|(codegree, elements)| {
                let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
                (codegree, ComponentBasis { space: space.clone(), symmetry, weight, codegree, elements, index })
            })
            .collect()
    }

    /// The empty basis, for codegrees with no components.
    pub fn empty(space: Arc<GradedSpace>, symmetry: SymmetryType, weight: usize, codegree: i64) -> Self {
        ComponentBasis { space, symmetry, weight, codegree, elements: Vec::new(), index: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn codegree(&self) -> i64 {
        self.codegree
    }

    pub fn element(&self, i: usize) -> (&[usize], usize) {
        let (k, o) = &self.elements[i];
        (k, *o)
    }

    pub fn position(&self, key: &[usize], output: usize) -> Option<usize> {
        self.index.get(&(key.to_vec(), output)).copied()
    }

    /// The `i`-th basis operation.
    pub fn element_op(&self, i: usize) -> MultilinearOp {
        let (k, o) = &self.elements[i];
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k.clone(), SparseVec::unit(*o));
        MultilinearOp::from_canonical(self.space.clone(), self.weight + 1, self.codegree, self.symmetry, coeffs)
    }

    fn coords_of_raw<'a, I>(&self, entries: I) -> Result<SparseVec>
    where
        I: IntoIterator<Item = (&'a Key, &'a SparseVec)>,
    {
        let mut pairs = Vec::new();
        for (k, v) in entries {
            for (o, c) in v.iter() {
                let Some(&i) = self.index.get(&(k.clone(), o)) else {
                    return Err(Error::internal(format!(
                        "entry {} -> {} is not in the weight-{} codegree-{} basis",
                        self.space.format_tuple(k),
                        self.space.name(o),
                        self.weight,
                        self.codegree
                    )));
                };
                pairs.push((i, c.clone()));
            }
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    /// Coordinates of an operation of this weight and codegree.
    pub fn coordinates(&self, op: &MultilinearOp) -> Result<SparseVec> {
        if op.arity() != self.weight + 1 || op.degree() != self.codegree || op.symmetry() != self.symmetry {
            return Err(Error::contract("operation does not match the component basis"));
        }
        let entries: Vec<(Key, SparseVec)> = op.entries().map(|(k, v)| (k.to_vec(), v.clone())).collect();
        self.coords_of_raw(entries.iter().map(|(k, v)| (k, v)))
    }

    pub fn to_op(&self, coords: &SparseVec) -> MultilinearOp {
        let mut coeffs: BTreeMap<Key, SparseVec> = BTreeMap::new();
        for (i, c) in coords.iter() {
            let (k, o) = &self.elements[i];
            coeffs.entry(k.clone()).or_default().axpy(c, &SparseVec::unit(*o));
        }
        MultilinearOp::from_canonical(self.space.clone(), self.weight + 1, self.codegree, self.symmetry, coeffs)
    }

    /// Coordinates as a coderivation concentrated in this weight.
    pub fn to_coderivation(&self, coords: &SparseVec, cutoff: usize) -> Result<Coderivation> {
        let mut x = Coderivation::zero(self.space.clone(), self.symmetry, self.codegree, cutoff);
        x.set_component(self.weight, self.to_op(coords))?;
        Ok(x)
    }
}

/// Matrix of `x ↦ [q, x]` from the `src` component basis to the `dst` basis,
/// where `q` is a single component of weight `dst.weight − src.weight`.
pub fn ad_matrix(q: &MultilinearOp, src: &ComponentBasis, dst: &ComponentBasis) -> Result<RatMatrix> {
    if dst.weight != src.weight + q.arity() - 1 || dst.codegree != src.codegree + q.degree() {
        return Err(Error::contract("component bases do not match the bracket with q"));
    }
    if q.symmetry() != src.symmetry || src.symmetry != dst.symmetry {
        return Err(Error::contract("symmetry mismatch in ad_matrix"));
    }
    let sign = if q.degree() & 1 != 0 && src.codegree & 1 != 0 { Rational::ONE } else { -Rational::ONE };
    let prepared = PreparedOp::new(q);
    let columns: Result<Vec<SparseVec>> = (0..src.len())
        .into_par_iter()
        .map(|c| {
            let x = src.element_op(c);
            let mut acc: BTreeMap<Key, SparseVec> = BTreeMap::new();
            compose_into(&mut acc, &prepared, &x, &Rational::ONE);
            compose_into(&mut acc, &PreparedOp::new(&x), q, &sign);
            dst.coords_of_raw(acc.iter().filter(|(_, v)| !v.is_empty()))
        })
        .collect();
    let triplets = columns?
        .into_iter()
        .enumerate()
        .flat_map(|(c, col)| col.into_pairs().into_iter().map(move |(r, v)| (r, c, v)))
        .collect::<Vec<_>>();
    RatMatrix::from_triplets(dst.len(), src.len(), triplets)
}
