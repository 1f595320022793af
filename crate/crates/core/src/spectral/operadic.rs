//! The weight-filtered coderivation complex `(Coder(C(A)), d_Q)` and its
//! spectral sequence, the Euler derivation and the Euler class.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rayon::prelude::*;

use super::engine::{ClassHandle, FilteredComplex, Role, SSPage, SpectralSequence};
use crate::algcore::{GradedSpace, MultilinearOp, SymmetryType};
use crate::coder::{ad_matrix, Coderivation, ComponentBasis, PInfStructure};
use crate::error::{Error, Result};
use crate::exactla::{RatMatrix, Rational, SparseVec};

/// `e(a) = (|sa| + 1)·a` on each basis vector, as a weight-0, codegree-0 coderivation.
pub fn euler_derivation(space: &Arc<GradedSpace>, symmetry: SymmetryType, cutoff: usize) -> Coderivation {
    let mut op = MultilinearOp::zero(space.clone(), 1, 0, symmetry);
    for i in 0..space.dim() {
        op.add_term(&[i], i, Rational::from_int(space.shifted_degree(i) + 1)).expect("degree-0 diagonal map");
    }
    let mut e = Coderivation::zero(space.clone(), symmetry, 0, cutoff);
    e.set_component(0, op).expect("weight-0 component");
    e
}

/// The coderivation complex truncated at the cutoff, over a window of codegrees.
#[derive(Clone, Debug)]
pub struct CoderComplex {
    q: PInfStructure,
    /// Codegree → component bases for weights `0..=W` (possibly empty).
    bases: BTreeMap<i64, Vec<ComponentBasis>>,
    offsets: BTreeMap<i64, Vec<usize>>,
    complex: FilteredComplex,
}

impl CoderComplex {
    /// Every codegree in which some component is nonzero.
    pub fn full_window(q: &PInfStructure) -> RangeInclusive<i64> {
        let s = q.space().shifted_degrees();
        let (lo, hi) = (*s.iter().min().unwrap(), *s.iter().max().unwrap());
        let w = q.cutoff() as i64;
        (lo - (w + 1) * hi).min(lo - hi)..=(hi - (w + 1) * lo).max(hi - lo)
    }

    pub fn build(q: &PInfStructure, window: RangeInclusive<i64>) -> Result<Self> {
        let space = q.space().clone();
        let sym = q.symmetry();
        let cutoff = q.cutoff();
        let per_weight: Vec<BTreeMap<i64, ComponentBasis>> =
            (0..=cutoff).into_par_iter().map(|p| ComponentBasis::all_codegrees(space.clone(), sym, p)).collect();
        let mut bases = BTreeMap::new();
        let mut offsets = BTreeMap::new();
        let mut complex = FilteredComplex::new();
        for d in window.clone() {
            let row: Vec<ComponentBasis> = (0..=cutoff)
                .map(|p| {
                    per_weight[p].get(&d).cloned().unwrap_or_else(|| ComponentBasis::empty(space.clone(), sym, p, d))
                })
                .collect();
            let mut off = Vec::with_capacity(cutoff + 2);
            let mut levels = Vec::new();
            off.push(0);
            for (p, b) in row.iter().enumerate() {
                levels.extend(std::iter::repeat_n(p, b.len()));
                off.push(off[p] + b.len());
            }
            complex.add_degree(d, levels);
            bases.insert(d, row);
            offsets.insert(d, off);
        }
        let degrees: Vec<i64> = window.clone().filter(|d| window.contains(&(d + 1))).collect();
        let diffs: Result<Vec<(i64, RatMatrix)>> = degrees
            .par_iter()
            .map(|&d| {
                let src = &bases[&d];
                let dst = &bases[&(d + 1)];
                let (so, dof) = (&offsets[&d], &offsets[&(d + 1)]);
                let mut triplets = Vec::new();
                for (j, qj) in q.q().components() {
                    for p in 0..=cutoff.saturating_sub(j) {
                        if src[p].is_empty() || dst[p + j].is_empty() {
                            continue;
                        }
                        let m = ad_matrix(qj, &src[p], &dst[p + j])?;
                        for r in 0..m.rows() {
                            for (c, v) in m.row(r).iter() {
                                triplets.push((dof[p + j] + r, so[p] + c, v.clone()));
                            }
                        }
                    }
                }
                Ok((d, RatMatrix::from_triplets(*dof.last().unwrap(), *so.last().unwrap(), triplets)?))
            })
            .collect();
        for (d, m) in diffs? {
            complex.set_differential(d, m)?;
        }
        Ok(CoderComplex { q: q.clone(), bases, offsets, complex })
    }

    pub fn complex(&self) -> &FilteredComplex {
        &self.complex
    }

    pub fn structure(&self) -> &PInfStructure {
        &self.q
    }

    /// Flattens a coderivation into a cochain of its codegree.
    pub fn to_vector(&self, x: &Coderivation) -> Result<SparseVec> {
        let d = x.codegree();
        let Some(row) = self.bases.get(&d) else {
            return Err(Error::contract(format!("codegree {d} is outside the complex window")));
        };
        let off = &self.offsets[&d];
        let mut pairs = Vec::new();
        for (w, op) in x.components() {
            let local = row[w].coordinates(op)?;
            pairs.extend(local.iter().map(|(i, c)| (off[w] + i, c.clone())));
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    /// Reassembles a cochain of codegree `d` as a coderivation.
    pub fn to_coderivation(&self, d: i64, v: &SparseVec) -> Result<Coderivation> {
        let row = &self.bases[&d];
        let off = &self.offsets[&d];
        let mut x = Coderivation::zero(self.q.space().clone(), self.q.symmetry(), d, self.q.cutoff());
        for (p, basis) in row.iter().enumerate() {
            let local = SparseVec::from_pairs(
                v.iter().filter(|(i, _)| (off[p]..off[p + 1]).contains(i)).map(|(i, c)| (i - off[p], c.clone())),
            );
            if !local.is_empty() {
                x.set_component(p, basis.to_op(&local))?;
            }
        }
        Ok(x)
    }
}

/// A class on a page together with its representative as a coderivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadicClass {
    pub handle: ClassHandle,
    pub representative: Coderivation,
}

/// The spectral sequence of the weight filtration on `(Coder(C(A)), d_Q)`.
#[derive(Clone, Debug)]
pub struct OperadicSS {
    complex: CoderComplex,
    ss: SpectralSequence,
}

impl OperadicSS {
    pub fn new(q: &PInfStructure) -> Result<Self> {
        Self::with_window(q, CoderComplex::full_window(q))
    }

    /// Restricts to a window of codegrees. Only degrees strictly inside the
    /// window have trustworthy pages.
    pub fn with_window(q: &PInfStructure, window: RangeInclusive<i64>) -> Result<Self> {
        let complex = CoderComplex::build(q, window)?;
        let ss = SpectralSequence::compute(complex.complex.clone())?;
        Ok(OperadicSS { complex, ss })
    }

    pub fn coder_complex(&self) -> &CoderComplex {
        &self.complex
    }

    pub fn sequence(&self) -> &SpectralSequence {
        &self.ss
    }

    pub fn page(&self, r: usize) -> SSPage {
        self.ss.page(r)
    }

    fn class(&self, handle: ClassHandle) -> Result<OperadicClass> {
        let n = handle.p as i64 + handle.q;
        let representative = self.complex.to_coderivation(n, &handle.representative)?;
        Ok(OperadicClass { handle, representative })
    }
}

/// Pages `E_1 … E_{r_max}`.
pub fn build_pages(q: &PInfStructure, r_max: usize) -> Result<Vec<SSPage>> {
    if r_max == 0 || r_max > q.cutoff() {
        return Err(Error::contract(format!("page bound {r_max} must lie in 1..={}", q.cutoff())));
    }
    let ss = OperadicSS::new(q)?;
    Ok((1..=r_max).map(|r| ss.page(r)).collect())
}

fn euler_ss(q: &PInfStructure) -> Result<OperadicSS> {
    OperadicSS::with_window(q, -1..=1)
}

/// The Euler class in `E_2^{0,0}`.
pub fn euler_class(q: &PInfStructure) -> Result<OperadicClass> {
    let ss = euler_ss(q)?;
    euler_class_in(&ss, q)
}

fn euler_class_in(ss: &OperadicSS, q: &PInfStructure) -> Result<OperadicClass> {
    let e = euler_derivation(q.space(), q.symmetry(), q.cutoff());
    let v = ss.complex.to_vector(&e)?;
    let handle = ss
        .ss
        .class_of(2, 0, 0, &v)
        .ok_or_else(|| Error::internal("d_1 of the Euler derivation is nonzero"))?;
    ss.class(handle)
}

/// Result of pushing the Euler class through the pages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerPush {
    /// Largest `n` with `d_r[e_A] = 0` for all `2 ≤ r ≤ n` (1 when `d_2` already fails).
    pub survives_to: usize,
    /// The first nonzero differential, as a class in `E_r^{r, 1−r}`.
    pub first_nonzero: Option<(usize, OperadicClass)>,
}

pub fn push_euler(q: &PInfStructure) -> Result<EulerPush> {
    let ss = euler_ss(q)?;
    euler_class_in(&ss, q)?;
    let e = euler_derivation(q.space(), q.symmetry(), q.cutoff());
    let coords = ss.ss.coordinates(0, &ss.complex.to_vector(&e)?);
    let roles = ss.ss.roles(0);
    let levels = ss.ss.complex().levels(0);
    for r in 2..=q.cutoff() {
        let mut image = SparseVec::new();
        for (j, c) in coords.iter() {
            if levels[j] != 0 {
                continue;
            }
            if let Role::Source { target, length } = roles[j] {
                if length == r {
                    image.axpy(c, ss.ss.basis_vector(1, target));
                }
            }
        }
        if !image.is_empty() {
            let handle = ss
                .ss
                .class_of(r, r, 1, &image)
                .ok_or_else(|| Error::internal("image of d_r is not an r-almost cocycle"))?;
            return Ok(EulerPush { survives_to: r - 1, first_nonzero: Some((r, ss.class(handle)?)) });
        }
    }
    Ok(EulerPush { survives_to: q.cutoff(), first_nonzero: None })
}

/// True when every `d_r`, `r ≥ 2`, vanishes on the truncated complex.
pub fn degenerates_at_e2(q: &PInfStructure) -> Result<bool> {
    Ok(OperadicSS::new(q)?.sequence().degenerates_at(2))
}
