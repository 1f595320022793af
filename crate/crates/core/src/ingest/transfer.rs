//! Homotopy transfer of a strict dg associative algebra onto its cohomology.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::schema::DgAlgebraSpec;
use super::{check_schema_version, lookup, space_of};
use crate::algcore::{GradedSpace, MultilinearOp, SymmetryType};
use crate::coder::{Coderivation, PInfStructure};
use crate::error::{Error, Result};
use crate::exactla::{find_solution, kernel, RatMatrix, Rational, Solvability, SparseVec};

/// A validated dg associative algebra on a finite basis.
#[derive(Clone, Debug)]
pub struct DgAlgebra {
    space: Arc<GradedSpace>,
    /// `d(e_i)` for each basis element.
    differential: Vec<SparseVec>,
    product: BTreeMap<(usize, usize), SparseVec>,
}

impl DgAlgebra {
    pub fn new(
        space: Arc<GradedSpace>,
        differential: Vec<SparseVec>,
        product: BTreeMap<(usize, usize), SparseVec>,
    ) -> Result<Self> {
        if differential.len() != space.dim() {
            return Err(Error::contract("one differential value per basis element is required"));
        }
        let alg = DgAlgebra { space, differential, product };
        alg.validate()?;
        Ok(alg)
    }

    pub fn from_spec(spec: &DgAlgebraSpec) -> Result<Self> {
        check_schema_version(&spec.schema)?;
        let space = space_of(&spec.basis)?;
        let mut differential = vec![SparseVec::new(); space.dim()];
        for (name, value) in &spec.differential {
            let i = lookup(&space, name, || "differential".to_string())?;
            differential[i] = vector(&space, value, &format!("differential.{name}"))?;
        }
        let mut product = BTreeMap::new();
        for (r, rec) in spec.product.iter().enumerate() {
            let loc = format!("product[{r}]");
            let a = lookup(&space, &rec.inputs[0], || format!("{loc}.inputs[0]"))?;
            let b = lookup(&space, &rec.inputs[1], || format!("{loc}.inputs[1]"))?;
            let v = vector(&space, &rec.output, &format!("{loc}.output"))?;
            if product.insert((a, b), v).is_some() {
                return Err(Error::schema(loc, "duplicate product record"));
            }
        }
        DgAlgebra::new(space, differential, product)
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn d(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, c) in x.iter() {
            out.axpy(c, &self.differential[i]);
        }
        out
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                if let Some(v) = self.product.get(&(a, b)) {
                    out.axpy(&(ca * cb), v);
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let s = &self.space;
        let n = s.dim();
        let name = |i: usize| s.name(i).to_string();
        for i in 0..n {
            if let Some((o, _)) = self.differential[i].iter().find(|(o, _)| s.degree(*o) != s.degree(i) + 1) {
                return Err(Error::DgAlgebra(format!("d({}) has a term {} of the wrong degree", name(i), name(o))));
            }
        }
        for (&(a, b), v) in &self.product {
            if let Some((o, _)) = v.iter().find(|(o, _)| s.degree(*o) != s.degree(a) + s.degree(b)) {
                return Err(Error::DgAlgebra(format!(
                    "{}·{} has a term {} of the wrong degree",
                    name(a),
                    name(b),
                    name(o)
                )));
            }
        }
        for i in 0..n {
            if !self.d(&self.differential[i]).is_empty() {
                return Err(Error::DgAlgebra(format!("d²({}) ≠ 0", name(i))));
            }
        }
        for a in 0..n {
            let ea = SparseVec::unit(a);
            for b in 0..n {
                let eb = SparseVec::unit(b);
                let ab = self.mul(&ea, &eb);
                let sign = Rational::sign(s.degree(a) & 1 != 0);
                let mut rhs = self.mul(&self.differential[a], &eb);
                rhs.axpy(&sign, &self.mul(&ea, &self.differential[b]));
                if self.d(&ab) != rhs {
                    return Err(Error::DgAlgebra(format!("Leibniz rule fails on ({}, {})", name(a), name(b))));
                }
                for c in 0..n {
                    let ec = SparseVec::unit(c);
                    if self.mul(&ab, &ec) != self.mul(&ea, &self.mul(&eb, &ec)) {
                        return Err(Error::DgAlgebra(format!(
                            "associativity fails on ({}, {}, {})",
                            name(a),
                            name(b),
                            name(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn vector(space: &GradedSpace, value: &BTreeMap<String, Rational>, loc: &str) -> Result<SparseVec> {
    let pairs = value
        .iter()
        .map(|(name, c)| Ok((lookup(space, name, || loc.to_string())?, c.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseVec::from_pairs(pairs))
}

/// A deterministic contraction of `A` onto `H(A)`: inclusion `i`, projection `p`
/// and homotopy `h` with `dh + hd = id − ip` and `hi = 0`, `ph = 0`, `hh = 0`.
#[derive(Clone, Debug)]
pub struct Contraction {
    cohomology: Arc<GradedSpace>,
    /// `i(e_k)` for each cohomology basis element.
    inclusion: Vec<SparseVec>,
    /// `p(e_j)` in cohomology coordinates.
    projection: Vec<SparseVec>,
    /// `h(e_j)`.
    homotopy: Vec<SparseVec>,
}

impl Contraction {
    /// Splits each degree as `B ⊕ H ⊕ C`: boundaries, echelon-chosen cocycle
    /// representatives and the unit vectors off the pivots of the cocycle space.
    pub fn new(alg: &DgAlgebra) -> Result<Self> {
        let s = alg.space();
        let n = s.dim();
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            by_degree.entry(s.degree(i)).or_default().push(i);
        }
        // C^k as global unit indices, per degree.
        let mut complement: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let mut cocycles: BTreeMap<i64, Vec<SparseVec>> = BTreeMap::new();
        for (&k, idx) in &by_degree {
            let cols: Vec<SparseVec> = idx.iter().map(|&i| alg.differential[i].clone()).collect();
            let dk = RatMatrix::from_sparse_rows(idx.len(), n, cols)?.transpose();
            let z = kernel(&dk);
            let pivots: Vec<usize> = z.pivots().to_vec();
            complement.insert(k, (0..idx.len()).filter(|j| !pivots.contains(j)).map(|j| idx[j]).collect());
            cocycles.insert(k, z.basis().iter().map(|v| v.remap(|j| Some(idx[j]))).collect());
        }
        let mut names = Vec::new();
        let mut inclusion = Vec::new();
        let mut projection = vec![SparseVec::new(); n];
        let mut homotopy = vec![SparseVec::new(); n];
        for (&k, idx) in &by_degree {
            let sources: &[usize] = complement.get(&(k - 1)).map_or(&[], |v| v.as_slice());
            let boundaries: Vec<SparseVec> = sources.iter().map(|&c| alg.differential[c].clone()).collect();
            let mut columns = boundaries.clone();
            let mut reps = Vec::new();
            for z in &cocycles[&k] {
                let m = matrix_of(n, &columns)?;
                if !find_solution(&m, z)?.is_solvable() {
                    columns.push(z.clone());
                    reps.push(z.clone());
                }
            }
            let first_rep = inclusion.len();
            for z in &reps {
                let (lead, _) = z.leading().expect("nonzero cocycle");
                names.push((format!("[{}]", s.name(lead)), k));
                inclusion.push(z.clone());
            }
            columns.extend(complement[&k].iter().map(|&c| SparseVec::unit(c)));
            if columns.len() != idx.len() {
                return Err(Error::internal(format!("degree-{k} splitting has the wrong dimension")));
            }
            let m = matrix_of(n, &columns)?;
            for &j in idx {
                let Solvability::Solution(y) = find_solution(&m, &SparseVec::unit(j))? else {
                    return Err(Error::internal(format!("degree-{k} splitting is not a basis")));
                };
                for (col, c) in y.iter() {
                    if col < boundaries.len() {
                        homotopy[j].axpy(c, &SparseVec::unit(sources[col]));
                    } else if col < boundaries.len() + reps.len() {
                        projection[j].axpy(c, &SparseVec::unit(first_rep + col - boundaries.len()));
                    }
                }
            }
        }
        if names.is_empty() {
            return Err(Error::DgAlgebra("the cohomology is zero-dimensional".into()));
        }
        let cohomology = Arc::new(GradedSpace::new(names)?);
        let out = Contraction { cohomology, inclusion, projection, homotopy };
        out.verify(alg)?;
        Ok(out)
    }

    pub fn cohomology(&self) -> &Arc<GradedSpace> {
        &self.cohomology
    }

    pub fn i(&self, x: &SparseVec) -> SparseVec {
        apply(&self.inclusion, x)
    }

    pub fn p(&self, x: &SparseVec) -> SparseVec {
        apply(&self.projection, x)
    }

    pub fn h(&self, x: &SparseVec) -> SparseVec {
        apply(&self.homotopy, x)
    }

    fn verify(&self, alg: &DgAlgebra) -> Result<()> {
        let n = alg.space().dim();
        for j in 0..n {
            let e = SparseVec::unit(j);
            let lhs = alg.d(&self.h(&e)).add(&self.h(&alg.d(&e)));
            if lhs != e.sub(&self.i(&self.p(&e))) {
                return Err(Error::internal("dh + hd ≠ id − ip"));
            }
            if !self.h(&self.h(&e)).is_empty() || !self.p(&self.h(&e)).is_empty() {
                return Err(Error::internal("homotopy side conditions fail"));
            }
        }
        for k in 0..self.cohomology.dim() {
            let e = SparseVec::unit(k);
            if !self.h(&self.i(&e)).is_empty() || self.p(&self.i(&e)) != e || !alg.d(&self.i(&e)).is_empty() {
                return Err(Error::internal("inclusion is not a section of cocycles"));
            }
        }
        Ok(())
    }
}

fn matrix_of(rows: usize, columns: &[SparseVec]) -> Result<RatMatrix> {
    Ok(RatMatrix::from_sparse_rows(columns.len(), rows, columns.to_vec())?.transpose())
}

fn apply(images: &[SparseVec], x: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (j, c) in x.iter() {
        out.axpy(c, &images[j]);
    }
    out
}

struct TreeSum<'a> {
    alg: &'a DgAlgebra,
    contraction: &'a Contraction,
    /// `λ_n` on tuples of cohomology basis elements, with values in `sA`.
    memo: HashMap<Vec<usize>, SparseVec>,
}

impl TreeSum<'_> {
    /// `b_2(sx, sy) = (−1)^{|x|−1} s(xy)`.
    fn b2(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let s = self.alg.space();
        let mut out = SparseVec::new();
        for (a, ca) in x.iter() {
            let signed = ca * &Rational::sign(s.shifted_degree(a) & 1 != 0);
            out.axpy(&signed, &self.alg.mul(&SparseVec::unit(a), y));
        }
        out
    }

    /// The leaf `i` for single inputs, `−h λ_k` otherwise.
    fn branch(&mut self, t: &[usize]) -> SparseVec {
        if t.len() == 1 {
            return self.contraction.inclusion[t[0]].clone();
        }
        let l = self.lambda(t);
        self.contraction.h(&l).negated()
    }

    fn lambda(&mut self, t: &[usize]) -> SparseVec {
        if let Some(v) = self.memo.get(t) {
            return v.clone();
        }
        let mut out = SparseVec::new();
        for k in 1..t.len() {
            let x = self.branch(&t[..k]);
            if x.is_empty() {
                continue;
            }
            let y = self.branch(&t[k..]);
            out.axpy(&Rational::ONE, &self.b2(&x, &y));
        }
        self.memo.insert(t.to_vec(), out.clone());
        out
    }
}

/// The transferred minimal A∞ structure on `H(A)` up to weight `max_weight`.
pub fn transfer(alg: &DgAlgebra, max_weight: usize) -> Result<PInfStructure> {
    if max_weight == 0 {
        return Err(Error::contract("max_weight must be at least 1"));
    }
    let contraction = Contraction::new(alg)?;
    let h = contraction.cohomology().clone();
    let mut sum = TreeSum { alg, contraction: &contraction, memo: HashMap::new() };
    let mut q = Coderivation::zero(h.clone(), SymmetryType::Planar, 1, max_weight);
    for w in 1..=max_weight {
        let mut op = MultilinearOp::zero(h.clone(), w + 1, 1, SymmetryType::Planar);
        for t in tuples(h.dim(), w + 1) {
            let value = contraction.p(&sum.lambda(&t));
            for (o, c) in value.iter() {
                op.add_term(&t, o, c.clone()).map_err(|e| Error::internal(format!("transferred operation: {e}")))?;
            }
        }
        q.set_component(w, op)?;
    }
    PInfStructure::new(q).map_err(|e| Error::internal(format!("transferred structure: {e}")))
}

pub fn transfer_spec(spec: &DgAlgebraSpec, max_weight: usize) -> Result<PInfStructure> {
    transfer(&DgAlgebra::from_spec(spec)?, max_weight)
}

fn tuples(dim: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = code % dim;
            code /= dim;
        }
        t
    })
}
