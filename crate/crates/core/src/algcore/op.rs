use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use super::sign::{degree_parity, sort_with_parity};
use super::space::{GradedSpace, SymmetryType};
use crate::error::{Error, Result};
use crate::exactla::{Rational, SparseVec};

/// A tuple of basis indices, one per input slot.
pub type Key = Vec<usize>;

/// A homogeneous multilinear map `(sA)^{⊗arity} → sA`.
///
/// Symmetric operations are stored only on sorted keys; every other ordering is
/// recovered through the Koszul sign of the sorting permutation.
#[derive(Clone)]
pub struct MultilinearOp {
    space: Arc<GradedSpace>,
    arity: usize,
    degree: i64,
    symmetry: SymmetryType,
    coeffs: BTreeMap<Key, SparseVec>,
}

impl MultilinearOp {
    pub fn zero(space: Arc<GradedSpace>, arity: usize, degree: i64, symmetry: SymmetryType) -> Self {
        assert!(arity >= 1, "operations have arity at least 1");
        MultilinearOp { space, arity, degree, symmetry, coeffs: BTreeMap::new() }
    }

    pub fn identity(space: Arc<GradedSpace>, symmetry: SymmetryType) -> Self {
        let mut op = Self::zero(space.clone(), 1, 0, symmetry);
        for i in 0..space.dim() {
            op.coeffs.insert(vec![i], SparseVec::unit(i));
        }
        op
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn symmetry(&self) -> SymmetryType {
        self.symmetry
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored (key, output) coefficients.
    pub fn nnz(&self) -> usize {
        self.coeffs.values().map(SparseVec::nnz).sum()
    }

    /// Stored entries; for symmetric operations the keys are sorted.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], &SparseVec)> + '_ {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn stored(&self, key: &[usize]) -> Option<&SparseVec> {
        self.coeffs.get(key)
    }

    fn shifted_sum(&self, key: &[usize]) -> i64 {
        key.iter().map(|&i| self.space.shifted_degree(i)).sum()
    }

    /// Brings `key` to storage form. Returns `None` when the tuple vanishes by symmetry.
    fn canonical(&self, key: &[usize]) -> Option<(Key, bool)> {
        match self.symmetry {
            SymmetryType::Planar => Some((key.to_vec(), false)),
            SymmetryType::Symmetric => {
                let mut k = key.to_vec();
                let parity = sort_with_parity(&mut k, |i| self.space.is_odd(i))?;
                Some((k, parity))
            }
        }
    }

    fn check_key(&self, key: &[usize]) -> Result<()> {
        if key.len() != self.arity {
            return Err(Error::contract(format!(
                "tuple of length {} given to an operation of arity {}",
                key.len(),
                self.arity
            )));
        }
        if let Some(&bad) = key.iter().find(|&&i| i >= self.space.dim()) {
            return Err(Error::contract(format!("basis index {bad} out of range")));
        }
        Ok(())
    }

    /// Adds `coeff · output` to the value on `inputs` (in any order).
    pub fn add_term(&mut self, inputs: &[usize], output: usize, coeff: Rational) -> Result<()> {
        self.check_key(inputs)?;
        if output >= self.space.dim() {
            return Err(Error::contract(format!("basis index {output} out of range")));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let expected = self.shifted_sum(inputs) + self.degree;
        if self.space.shifted_degree(output) != expected {
            return Err(Error::Degree {
                location: format!("{} -> {}", self.space.format_tuple(inputs), self.space.name(output)),
                message: format!(
                    "output has suspended degree {} but the operation requires {}",
                    self.space.shifted_degree(output),
                    expected
                ),
            });
        }
        let Some((key, parity)) = self.canonical(inputs) else {
            return Err(Error::contract(format!(
                "graded-symmetric operation cannot be nonzero on {} (repeated odd element)",
                self.space.format_tuple(inputs)
            )));
        };
        let c = if parity { -coeff } else { coeff };
        self.accumulate(key, &SparseVec::from_pairs([(output, c)]), &Rational::ONE);
        Ok(())
    }

    /// `coeffs[key] += c · v` on an already canonical key.
    fn accumulate(&mut self, key: Key, v: &SparseVec, c: &Rational) {
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(key) {
            Entry::Occupied(mut e) => {
                e.get_mut().axpy(c, v);
                if e.get().is_empty() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                let v = v.scaled(c);
                if !v.is_empty() {
                    e.insert(v);
                }
            }
        }
    }

    /// Value on the basis tuple `inputs`.
    pub fn evaluate(&self, inputs: &[usize]) -> Result<SparseVec> {
        self.check_key(inputs)?;
        Ok(self.evaluate_unchecked(inputs))
    }

    pub(crate) fn evaluate_unchecked(&self, inputs: &[usize]) -> SparseVec {
        match self.canonical(inputs) {
            None => SparseVec::new(),
            Some((key, parity)) => match self.coeffs.get(&key) {
                None => SparseVec::new(),
                Some(v) if parity => v.negated(),
                Some(v) => v.clone(),
            },
        }
    }

    fn check_compatible(&self, other: &MultilinearOp) -> Result<()> {
        if self.symmetry != other.symmetry {
            return Err(Error::contract("operations have different symmetry types"));
        }
        if !Arc::ptr_eq(&self.space, &other.space) && self.space != other.space {
            return Err(Error::contract("operations live on different graded spaces"));
        }
        Ok(())
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &MultilinearOp) -> Result<()> {
        self.check_compatible(other)?;
        if self.arity != other.arity || self.degree != other.degree {
            return Err(Error::contract(format!(
                "cannot add an arity-{} degree-{} operation to an arity-{} degree-{} one",
                other.arity, other.degree, self.arity, self.degree
            )));
        }
        if c.is_zero() {
            return Ok(());
        }
        for (k, v) in &other.coeffs {
            let slot = self.coeffs.entry(k.clone()).or_default();
            slot.axpy(c, v);
        }
        self.coeffs.retain(|_, v| !v.is_empty());
        Ok(())
    }

    pub fn scaled(&self, c: &Rational) -> MultilinearOp {
        let mut out = MultilinearOp::zero(self.space.clone(), self.arity, self.degree, self.symmetry);
        if !c.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), v.scaled(c))).collect();
        }
        out
    }

    pub fn negated(&self) -> MultilinearOp {
        self.scaled(&-Rational::ONE)
    }

    /// Verifies that every stored entry has the right degree.
    pub fn check_homogeneity(&self) -> Result<()> {
        for (k, v) in &self.coeffs {
            let expected = self.shifted_sum(k) + self.degree;
            if let Some((o, _)) = v.iter().find(|(o, _)| self.space.shifted_degree(*o) != expected) {
                return Err(Error::internal(format!(
                    "inhomogeneous entry {} -> {}",
                    self.space.format_tuple(k),
                    self.space.name(o)
                )));
            }
        }
        Ok(())
    }

    /// Builds an operation from canonical entries without checks.
    pub(crate) fn from_canonical(
        space: Arc<GradedSpace>,
        arity: usize,
        degree: i64,
        symmetry: SymmetryType,
        coeffs: BTreeMap<Key, SparseVec>,
    ) -> Self {
        let mut op = MultilinearOp { space, arity, degree, symmetry, coeffs };
        op.coeffs.retain(|_, v| !v.is_empty());
        op
    }

    /// Human-readable listing, one `name(a, b) = c` line per nonzero entry.
    pub fn dump(&self, label: &str) -> String {
        let mut lines = Vec::new();
        for (k, v) in &self.coeffs {
            let terms: Vec<String> = v.iter().map(|(o, c)| format!("{c}·{}", self.space.name(o))).collect();
            lines.push(format!("{label}{} = {}", self.space.format_tuple(k), terms.join(" + ")));
        }
        lines.join("\n")
    }
}

impl PartialEq for MultilinearOp {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity
            && self.degree == other.degree
            && self.symmetry == other.symmetry
            && (Arc::ptr_eq(&self.space, &other.space) || self.space == other.space)
            && self.coeffs == other.coeffs
    }
}

impl Eq for MultilinearOp {}

impl fmt::Debug for MultilinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MultilinearOp[{} arity {} degree {}] {{", self.symmetry, self.arity, self.degree)?;
        if !self.coeffs.is_empty() {
            writeln!(f, "{}", self.dump("  "))?;
        }
        write!(f, "}}")
    }
}

/// Left operand of a composition, indexed by the basis element each entry
/// consumes. Building the index once pays off when the same operation is
/// composed with many others.
pub struct PreparedOp<'a> {
    op: &'a MultilinearOp,
    /// Planar: one map per slot. Symmetric: a single map keyed by every
    /// distinct element of the key.
    index: Vec<HashMap<usize, Vec<(&'a Key, &'a SparseVec)>>>,
}

impl<'a> PreparedOp<'a> {
    pub fn new(op: &'a MultilinearOp) -> Self {
        let index = match op.symmetry {
            SymmetryType::Planar => (0..op.arity)
                .map(|slot| {
                    let mut m: HashMap<usize, Vec<(&Key, &SparseVec)>> = HashMap::new();
                    for (k, v) in &op.coeffs {
                        m.entry(k[slot]).or_default().push((k, v));
                    }
                    m
                })
                .collect(),
            SymmetryType::Symmetric => {
                let mut m: HashMap<usize, Vec<(&Key, &SparseVec)>> = HashMap::new();
                for (k, v) in &op.coeffs {
                    for (pos, &x) in k.iter().enumerate() {
                        if pos == 0 || k[pos - 1] != x {
                            m.entry(x).or_default().push((k, v));
                        }
                    }
                }
                vec![m]
            }
        };
        PreparedOp { op, index }
    }

    pub fn op(&self) -> &MultilinearOp {
        self.op
    }
}

/// `f ∘_i g`: `g` inserted into slot `i` of `f` (slots numbered from 1).
pub fn insert_planar(f: &MultilinearOp, g: &MultilinearOp, i: usize) -> Result<MultilinearOp> {
    f.check_compatible(g)?;
    if f.symmetry != SymmetryType::Planar {
        return Err(Error::contract("insert_planar needs planar operations"));
    }
    if i == 0 || i > f.arity {
        return Err(Error::contract(format!("slot {i} out of range for arity {}", f.arity)));
    }
    let mut acc = BTreeMap::new();
    insert_slot_into(&mut acc, &PreparedOp::new(f), g, i - 1, &Rational::ONE);
    Ok(MultilinearOp::from_canonical(
        f.space.clone(),
        f.arity + g.arity - 1,
        f.degree + g.degree,
        SymmetryType::Planar,
        acc,
    ))
}

/// Adds `c · (f ∘_{slot+1} g)` to `acc`.
fn insert_slot_into(acc: &mut BTreeMap<Key, SparseVec>, f: &PreparedOp, g: &MultilinearOp, slot: usize, c: &Rational) {
    let space = &f.op.space;
    let g_odd = g.degree & 1 != 0;
    for (gk, gv) in &g.coeffs {
        for (o, gc) in gv.iter() {
            let Some(targets) = f.index[slot].get(&o) else { continue };
            let gc = gc * c;
            for (fk, fv) in targets {
                let odd = g_odd && degree_parity(fk[..slot].iter().map(|&x| space.shifted_degree(x)));
                let mut key = Vec::with_capacity(fk.len() + gk.len() - 1);
                key.extend_from_slice(&fk[..slot]);
                key.extend_from_slice(gk);
                key.extend_from_slice(&fk[slot + 1..]);
                let coef = if odd { -&gc } else { gc.clone() };
                acc.entry(key).or_default().axpy(&coef, fv);
            }
        }
    }
}

/// `Σ_i f ∘_i g` over all slots of `f`.
pub fn compose_planar(f: &MultilinearOp, g: &MultilinearOp) -> Result<MultilinearOp> {
    if f.symmetry != SymmetryType::Planar {
        return Err(Error::contract("compose_planar needs planar operations"));
    }
    compose(f, g)
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

/// Symmetric convolution `(f • g)(x) = Σ_σ ε(σ) f(g(x_{σ(1)},…,x_{σ(n)}), x_{σ(n+1)},…)`
/// summed over unshuffles.
pub fn convolve_symmetric(f: &MultilinearOp, g: &MultilinearOp) -> Result<MultilinearOp> {
    if f.symmetry != SymmetryType::Symmetric {
        return Err(Error::contract("convolve_symmetric needs symmetric operations"));
    }
    compose(f, g)
}

fn convolve_into(acc: &mut BTreeMap<Key, SparseVec>, f: &PreparedOp, g: &MultilinearOp, c: &Rational) {
    let space = &f.op.space;
    let odd = |i: usize| space.is_odd(i);
    for (gk, gv) in &g.coeffs {
        for (o, gc) in gv.iter() {
            let Some(targets) = f.index[0].get(&o) else { continue };
            let gc = gc * c;
            for (fk, fv) in targets {
                let pos = fk.iter().position(|&x| x == o).unwrap();
                // f(o, rest) = ± f(fk): o moves past the smaller elements of fk.
                let mut parity = odd(o) && degree_parity(fk[..pos].iter().map(|&x| space.shifted_degree(x)));
                let mut key: Key = Vec::with_capacity(gk.len() + fk.len() - 1);
                key.extend_from_slice(gk);
                key.extend(fk[..pos].iter().chain(&fk[pos + 1..]).copied());
                let Some(p) = sort_with_parity(&mut key, odd) else { continue };
                parity ^= p;
                // Number of position subsets of the sorted key that carry gk.
                let mut mult = 1i64;
                let mut idx = 0;
                while idx < gk.len() {
                    let x = gk[idx];
                    let in_g = gk[idx..].iter().take_while(|&&y| y == x).count();
                    let in_key = key.iter().filter(|&&y| y == x).count();
                    mult *= binomial(in_key, in_g);
                    idx += in_g;
                }
                let mut coef = &gc * Rational::from_int(mult);
                if parity {
                    coef = -coef;
                }
                acc.entry(key).or_default().axpy(&coef, fv);
            }
        }
    }
}

/// The pre-Lie product underlying the bracket: slot-summed insertion for planar
/// operations, unshuffle convolution for symmetric ones.
pub fn compose(f: &MultilinearOp, g: &MultilinearOp) -> Result<MultilinearOp> {
    f.check_compatible(g)?;
    let mut acc = BTreeMap::new();
    compose_into(&mut acc, &PreparedOp::new(f), g, &Rational::ONE);
    Ok(MultilinearOp::from_canonical(f.space.clone(), f.arity + g.arity - 1, f.degree + g.degree, f.symmetry, acc))
}

/// Adds `c · (f • g)` into raw storage. Callers guarantee compatibility.
pub(crate) fn compose_into(acc: &mut BTreeMap<Key, SparseVec>, f: &PreparedOp, g: &MultilinearOp, c: &Rational) {
    match f.op.symmetry {
        SymmetryType::Planar => {
            for slot in 0..f.op.arity {
                insert_slot_into(acc, f, g, slot, c);
            }
        }
        SymmetryType::Symmetric => convolve_into(acc, f, g, c),
    }
}
