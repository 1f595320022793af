//! Spectral sequences of finite filtered cochain complexes.
//!
//! Each cochain group `C^n` comes with a basis in which every vector carries a
//! filtration level; `F^p C^n` is spanned by the vectors of level `≥ p`. A
//! column reduction in the spirit of persistent cohomology produces a new
//! basis, still adapted to the filtration, in which `d` is a partial matching
//! `b_j ↦ b_i`. Every page is then read off from the level gap of each pair.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::{RatMatrix, Rational, SparseVec};

/// A finite cochain complex with a decreasing filtration split by its basis.
#[derive(Clone, Debug, Default)]
pub struct FilteredComplex {
    levels: BTreeMap<i64, Vec<usize>>,
    /// `d^n : C^n → C^{n+1}`; missing entries are zero maps.
    diffs: BTreeMap<i64, RatMatrix>,
}

impl FilteredComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `C^n` with one filtration level per basis vector.
    pub fn add_degree(&mut self, n: i64, levels: Vec<usize>) {
        self.levels.insert(n, levels);
    }

    pub fn set_differential(&mut self, n: i64, d: RatMatrix) -> Result<()> {
        let src = self.dim(n);
        let dst = self.dim(n + 1);
        if d.cols() != src || d.rows() != dst {
            return Err(Error::contract(format!(
                "differential out of degree {n} must be {dst}x{src}, got {}x{}",
                d.rows(),
                d.cols()
            )));
        }
        self.diffs.insert(n, d);
        Ok(())
    }

    pub fn dim(&self, n: i64) -> usize {
        self.levels.get(&n).map_or(0, Vec::len)
    }

    pub fn levels(&self, n: i64) -> &[usize] {
        self.levels.get(&n).map_or(&[], Vec::as_slice)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.levels.keys().copied()
    }

    pub fn differential(&self, n: i64) -> Option<&RatMatrix> {
        self.diffs.get(&n)
    }

    /// Applies `d^n` to a cochain of degree `n`.
    pub fn apply_d(&self, n: i64, x: &SparseVec) -> SparseVec {
        self.diffs.get(&n).map_or_else(SparseVec::new, |d| d.mul_vec(x))
    }

    /// Checks that `d` preserves the filtration and squares to zero.
    pub fn validate(&self) -> Result<()> {
        for (&n, d) in &self.diffs {
            let src = self.levels(n);
            let dst = self.levels(n + 1);
            for (r, row) in d.row_vecs().iter().enumerate() {
                if let Some((c, _)) = row.iter().find(|(c, _)| dst[r] < src[*c]) {
                    return Err(Error::contract(format!(
                        "d^{n} lowers the filtration: column {c} (level {}) hits row {r} (level {})",
                        src[c], dst[r]
                    )));
                }
            }
            if let Some(next) = self.diffs.get(&(n + 1)) {
                if !next.mul(d)?.is_zero() {
                    return Err(Error::contract(format!("d^{} ∘ d^{n} ≠ 0", n + 1)));
                }
            }
        }
        Ok(())
    }
}

/// How a basis vector of `C^n` is paired after reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Role {
    /// `b_j = d b_k` for a source `k` in degree `n − 1`.
    Target { source: usize, length: usize },
    /// `d b_j = b_i` with `i` in degree `n + 1`.
    Source { target: usize, length: usize },
    /// `b_j` is a cocycle that is never a coboundary.
    Essential,
}

impl Role {
    /// Whether `b_j` still contributes to page `r`.
    pub fn alive_on(&self, r: usize) -> bool {
        match self {
            Role::Essential => true,
            Role::Target { length, .. } | Role::Source { length, .. } => *length >= r,
        }
    }
}

/// Reduced data for one degree.
#[derive(Clone, Debug)]
struct DegreeData {
    levels: Vec<usize>,
    /// `order[t]` is the basis index at position `t` of the order
    /// (level descending, index ascending); `rank` is its inverse.
    order: Vec<usize>,
    rank: Vec<usize>,
    roles: Vec<Role>,
    /// `basis[j]` in original coordinates; its entry at `j` is its
    /// last nonzero entry in the order above.
    basis: Vec<SparseVec>,
}

impl DegreeData {
    fn new(levels: Vec<usize>) -> Self {
        let mut order: Vec<usize> = (0..levels.len()).collect();
        order.sort_by_key(|&j| (std::cmp::Reverse(levels[j]), j));
        let mut rank = vec![0; levels.len()];
        for (t, &j) in order.iter().enumerate() {
            rank[j] = t;
        }
        DegreeData { roles: vec![Role::Essential; levels.len()], basis: Vec::new(), levels, order, rank }
    }

    /// Coordinates of `x` in the adapted basis.
    fn coordinates(&self, x: &SparseVec) -> SparseVec {
        let mut rest = x.remap(|j| Some(self.rank[j]));
        let mut out = Vec::new();
        while let Some((t, v)) = rest.trailing() {
            let j = self.order[t];
            let b = &self.basis[j];
            let lead = b.get(j);
            let c = v / &lead;
            rest.axpy(&-&c, &b.remap(|i| Some(self.rank[i])));
            out.push((j, c));
        }
        SparseVec::from_pairs(out)
    }
}

/// The complex together with its reduced normal form.
#[derive(Clone, Debug)]
pub struct SpectralSequence {
    complex: FilteredComplex,
    data: BTreeMap<i64, DegreeData>,
}

/// One cell `E_r^{p,q}` of a page.
#[derive(Clone, Debug)]
pub struct PageCell {
    pub p: usize,
    pub q: i64,
    /// Basis indices in `C^{p+q}` whose adapted vectors generate the cell.
    pub generators: Vec<usize>,
    /// Cochain representatives of the generators, in the same order.
    pub representatives: Vec<SparseVec>,
}

impl PageCell {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn total_degree(&self) -> i64 {
        self.p as i64 + self.q
    }

    /// Cochain representing the given cell coordinates.
    pub fn lift(&self, coords: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (k, c) in coords.iter() {
            out.axpy(c, &self.representatives[k]);
        }
        out
    }
}

/// Page `E_r` with its differential `d_r : E_r^{p,q} → E_r^{p+r,q−r+1}`.
#[derive(Clone, Debug)]
pub struct SSPage {
    pub r: usize,
    pub cells: BTreeMap<(usize, i64), PageCell>,
    /// Keyed by the source cell; absent entries are zero maps.
    pub differentials: BTreeMap<(usize, i64), RatMatrix>,
}

impl SSPage {
    pub fn dim(&self, p: usize, q: i64) -> usize {
        self.cells.get(&(p, q)).map_or(0, PageCell::dim)
    }

    /// True when every `d_r` on this page vanishes.
    pub fn differential_is_zero(&self) -> bool {
        self.differentials.values().all(RatMatrix::is_zero)
    }
}

/// A class on some page, with a chosen cochain representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassHandle {
    pub r: usize,
    pub p: usize,
    pub q: i64,
    pub coords: SparseVec,
    pub representative: SparseVec,
}

impl ClassHandle {
    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Column reduction of `d : C^n → C^{n+1}` with clearing of columns already
/// known to be targets.
fn reduce(
    d: &RatMatrix,
    src: &mut DegreeData,
    dst: &DegreeData,
    cleared: &[bool],
) -> Vec<(usize, SparseVec, SparseVec)> {
    // Columns in the order of `src`, rows renumbered by the order of `dst`.
    let cols: Vec<SparseVec> = {
        let t = d.transpose();
        (0..src.levels.len()).into_par_iter().map(|j| t.row(j).remap(|i| Some(dst.rank[i]))).collect()
    };
    let mut pivot_of: BTreeMap<usize, (SparseVec, SparseVec)> = BTreeMap::new();
    let mut pairs = Vec::new();
    for t in 0..src.order.len() {
        let j = src.order[t];
        if cleared[j] {
            continue;
        }
        let mut col = cols[j].clone();
        let mut v = SparseVec::unit(t);
        while let Some((low, c)) = col.trailing() {
            let Some((pcol, pv)) = pivot_of.get(&low) else { break };
            let f = c / &pcol.get(low);
            col.axpy(&-&f, pcol);
            v.axpy(&-&f, pv);
        }
        let v_orig = v.remap(|s| Some(src.order[s]));
        match col.trailing() {
            Some((low, _)) => {
                pivot_of.insert(low, (col.clone(), v.clone()));
                let i = dst.order[low];
                pairs.push((j, v_orig, col.remap(|s| Some(dst.order[s]))));
                let length = dst.levels[i] - src.levels[j];
                src.roles[j] = Role::Source { target: i, length };
            }
            None => {
                src.roles[j] = Role::Essential;
                src.basis[j] = v_orig;
            }
        }
    }
    pairs
}

impl SpectralSequence {
    pub fn compute(complex: FilteredComplex) -> Result<Self> {
        complex.validate()?;
        let degrees: Vec<i64> = complex.degrees().collect();
        let mut data: BTreeMap<i64, DegreeData> =
            degrees.iter().map(|&n| (n, DegreeData::new(complex.levels(n).to_vec()))).collect();
        for d in data.values_mut() {
            d.basis = (0..d.levels.len()).map(SparseVec::unit).collect();
        }
        for &n in &degrees {
            let cleared: Vec<bool> =
                data[&n].roles.iter().map(|r| matches!(r, Role::Target { .. })).collect();
            let Some(d) = complex.differential(n) else { continue };
            if !data.contains_key(&(n + 1)) {
                continue;
            }
            let mut src = data.remove(&n).unwrap();
            let pairs = {
                let dst = &data[&(n + 1)];
                reduce(d, &mut src, dst, &cleared)
            };
            let dst = data.get_mut(&(n + 1)).unwrap();
            for (j, v, r) in pairs {
                let Role::Source { target, length } = src.roles[j] else { unreachable!() };
                src.basis[j] = v;
                dst.roles[target] = Role::Target { source: j, length };
                dst.basis[target] = r;
            }
            data.insert(n, src);
        }
        let ss = SpectralSequence { complex, data };
        ss.verify_normal_form()?;
        Ok(ss)
    }

    /// `d b_j = b_i` on sources and `d b_j = 0` otherwise.
    fn verify_normal_form(&self) -> Result<()> {
        for (&n, dd) in &self.data {
            for j in 0..dd.levels.len() {
                let image = self.complex.apply_d(n, &dd.basis[j]);
                let expected = match dd.roles[j] {
                    Role::Source { target, .. } => self.data[&(n + 1)].basis[target].clone(),
                    _ => SparseVec::new(),
                };
                if image != expected {
                    return Err(Error::internal(format!("reduced basis vector {j} in degree {n} is not normal")));
                }
            }
        }
        Ok(())
    }

    pub fn complex(&self) -> &FilteredComplex {
        &self.complex
    }

    pub fn roles(&self, n: i64) -> &[Role] {
        self.data.get(&n).map_or(&[], |d| d.roles.as_slice())
    }

    /// Adapted basis vector `b_j` of `C^n`.
    pub fn basis_vector(&self, n: i64, j: usize) -> &SparseVec {
        &self.data[&n].basis[j]
    }

    /// Coordinates of a cochain in the adapted basis of `C^n`.
    pub fn coordinates(&self, n: i64, x: &SparseVec) -> SparseVec {
        self.data.get(&n).map_or_else(SparseVec::new, |d| d.coordinates(x))
    }

    /// Largest level gap of any pair; the sequence degenerates at `E_{k+1}` iff this is `≤ k`.
    pub fn max_pair_length(&self) -> usize {
        self.data
            .values()
            .flat_map(|d| d.roles.iter())
            .filter_map(|r| match r {
                Role::Source { length, .. } => Some(*length),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// True when `d_r = 0` for every `r ≥ k`.
    pub fn degenerates_at(&self, k: usize) -> bool {
        self.max_pair_length() < k
    }

    /// Page `E_r`, including its differential.
    pub fn page(&self, r: usize) -> SSPage {
        let mut cells: BTreeMap<(usize, i64), PageCell> = BTreeMap::new();
        for (&n, dd) in &self.data {
            for j in 0..dd.levels.len() {
                if !dd.roles[j].alive_on(r) {
                    continue;
                }
                let p = dd.levels[j];
                let cell = cells.entry((p, n - p as i64)).or_insert_with(|| PageCell {
                    p,
                    q: n - p as i64,
                    generators: Vec::new(),
                    representatives: Vec::new(),
                });
                cell.generators.push(j);
                cell.representatives.push(dd.basis[j].clone());
            }
        }
        let mut triplets: BTreeMap<(usize, i64), Vec<_>> = BTreeMap::new();
        for (&(p, q), cell) in &cells {
            let n = p as i64 + q;
            for (col, &j) in cell.generators.iter().enumerate() {
                if let Role::Source { target, length } = self.data[&n].roles[j] {
                    if length == r {
                        let tcell = (p + r, q - r as i64 + 1);
                        let row = cells[&tcell].generators.iter().position(|&i| i == target).unwrap();
                        triplets.entry((p, q)).or_default().push((row, col, Rational::ONE));
                    }
                }
            }
        }
        let mut differentials = BTreeMap::new();
        for (&(p, q), cell) in &cells {
            let tcell = (p + r, q - r as i64 + 1);
            let rows = cells.get(&tcell).map_or(0, PageCell::dim);
            let entries = triplets.remove(&(p, q)).unwrap_or_default();
            differentials
                .insert((p, q), RatMatrix::from_triplets(rows, cell.dim(), entries).expect("indices in range"));
        }
        SSPage { r, cells, differentials }
    }

    /// Class of the cochain `x ∈ C^n` in `E_r^{p, n−p}`, or `None` when `x` is
    /// not an `r`-almost cocycle of filtration `p`.
    pub fn class_of(&self, r: usize, p: usize, n: i64, x: &SparseVec) -> Option<ClassHandle> {
        let dd = self.data.get(&n)?;
        if x.iter().any(|(j, _)| dd.levels[j] < p) {
            return None;
        }
        let coords = dd.coordinates(x);
        let mut cell_coords = Vec::new();
        // Cells list their generators in basis-index order.
        let generators: Vec<usize> =
            (0..dd.levels.len()).filter(|&j| dd.levels[j] == p && dd.roles[j].alive_on(r)).collect();
        let cell_index = |j: usize| generators.binary_search(&j).unwrap();
        for (j, c) in coords.iter() {
            if let Role::Source { length, .. } = dd.roles[j] {
                if dd.levels[j] + length < p + r {
                    return None;
                }
            }
            if dd.levels[j] == p && dd.roles[j].alive_on(r) {
                cell_coords.push((cell_index(j), c.clone()));
            }
        }
        Some(ClassHandle { r, p, q: n - p as i64, coords: SparseVec::from_pairs(cell_coords), representative: x.clone() })
    }
}
