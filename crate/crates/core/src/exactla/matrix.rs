use std::collections::BTreeMap;
use std::fmt;

use super::{Rational, SparseVec};
use crate::error::{Error, Result};

/// Matrices with fewer entries than this are stored densely.
const DENSE_LIMIT: usize = 64;

#[derive(Clone)]
enum Storage {
    /// Row-major.
    Dense(Vec<Rational>),
    Sparse(Vec<SparseVec>),
}

/// An exact matrix over ℚ.
#[derive(Clone)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    store: Storage,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_sparse_rows(rows, cols, vec![SparseVec::new(); rows])
            .expect("zero matrix is in bounds")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_sparse_rows(n, n, (0..n).map(SparseVec::unit).collect()).expect("in bounds")
    }

    pub fn from_sparse_rows(rows: usize, cols: usize, data: Vec<SparseVec>) -> Result<Self> {
        if data.len() != rows {
            return Err(Error::contract(format!("expected {rows} rows, got {}", data.len())));
        }
        if let Some(bad) = data.iter().filter_map(|r| r.max_index()).find(|&c| c >= cols) {
            return Err(Error::contract(format!("column index {bad} out of bounds ({cols} columns)")));
        }
        let store = if rows * cols < DENSE_LIMIT {
            let mut dense = vec![Rational::ZERO; rows * cols];
            for (r, row) in data.iter().enumerate() {
                for (c, v) in row.iter() {
                    dense[r * cols + c] = v.clone();
                }
            }
            Storage::Dense(dense)
        } else {
            Storage::Sparse(data)
        };
        Ok(RatMatrix { rows, cols, store })
    }

    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut per_row: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::contract(format!("entry ({r},{c}) outside {rows}x{cols}")));
            }
            per_row[r].push((c, v));
        }
        Self::from_sparse_rows(rows, cols, per_row.into_iter().map(SparseVec::from_pairs).collect())
    }

    /// Convenience constructor from small integer rows.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                SparseVec::from_pairs(r.iter().enumerate().map(|(i, &x)| (i, Rational::from_int(x))))
            })
            .collect();
        Self::from_sparse_rows(rows.len(), cols, data).expect("in bounds")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.store, Storage::Dense(_))
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        match &self.store {
            Storage::Dense(d) => d[r * self.cols + c].clone(),
            Storage::Sparse(rows) => rows[r].get(c),
        }
    }

    pub fn row(&self, r: usize) -> SparseVec {
        match &self.store {
            Storage::Dense(d) => SparseVec::from_dense(&d[r * self.cols..(r + 1) * self.cols]),
            Storage::Sparse(rows) => rows[r].clone(),
        }
    }

    pub fn row_vecs(&self) -> Vec<SparseVec> {
        match &self.store {
            Storage::Dense(_) => (0..self.rows).map(|r| self.row(r)).collect(),
            Storage::Sparse(rows) => rows.clone(),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.store {
            Storage::Dense(d) => d.iter().filter(|v| !v.is_zero()).count(),
            Storage::Sparse(rows) => rows.iter().map(SparseVec::nnz).sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn transpose(&self) -> RatMatrix {
        let triplets = self
            .row_vecs()
            .into_iter()
            .enumerate()
            .flat_map(|(r, row)| row.into_pairs().into_iter().map(move |(c, v)| (c, r, v)));
        RatMatrix::from_triplets(self.cols, self.rows, triplets).expect("in bounds")
    }

    pub fn column(&self, c: usize) -> SparseVec {
        SparseVec::from_pairs((0..self.rows).map(|r| (r, self.get(r, c))))
    }

    /// `self · x`.
    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let pairs = (0..self.rows).filter_map(|r| {
            let v = match &self.store {
                Storage::Dense(d) => x.iter().map(|(c, xv)| &d[r * self.cols + c] * xv).sum(),
                Storage::Sparse(rows) => rows[r].dot(x),
            };
            (!v.is_zero()).then_some((r, v))
        });
        SparseVec::from_sorted(pairs.collect())
    }

    /// `yᵀ · self`.
    pub fn vec_mul(&self, y: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::new();
        for (r, yv) in y.iter() {
            acc.axpy(yv, &self.row(r));
        }
        acc
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let rows = self.row_vecs().iter().map(|row| other.vec_mul(row)).collect();
        RatMatrix::from_sparse_rows(self.rows, other.cols, rows)
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::default();
        self.row_vecs().into_iter().filter(|r| ech.insert(r.clone()).is_some()).count()
    }
}

impl PartialEq for RatMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.row_vecs() == other.row_vecs()
    }
}

impl Eq for RatMatrix {}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if self.rows * self.cols <= 400 {
                let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            } else {
                writeln!(f, "  {:?}", self.row(r))?;
            }
        }
        write!(f, "]")
    }
}

/// Incremental row-echelon basis: each stored row has leading coefficient 1
/// at its pivot column, and pivot columns are distinct.
#[derive(Clone, Debug, Default)]
pub(crate) struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    /// Reduces `v` against the stored rows. Returns the residual (zero at every
    /// pivot column) and the coefficients used, keyed by pivot column.
    pub fn reduce_tracked(&self, mut v: SparseVec) -> (SparseVec, Vec<(usize, Rational)>) {
        let mut used = Vec::new();
        let mut cursor = 0;
        loop {
            let next = v
                .iter()
                .find(|(i, _)| *i >= cursor && self.rows.contains_key(i))
                .map(|(i, c)| (i, c.clone()));
            let Some((col, coef)) = next else { break };
            v.axpy(&-&coef, &self.rows[&col]);
            used.push((col, coef));
            cursor = col + 1;
        }
        (v, used)
    }

    pub fn reduce(&self, v: SparseVec) -> SparseVec {
        self.reduce_tracked(v).0
    }

    /// Adds `v` if it is independent of the stored rows; returns its pivot.
    pub fn insert(&mut self, v: SparseVec) -> Option<usize> {
        let r = self.reduce(v);
        let (col, lead) = r.leading()?;
        let r = r.scaled(&lead.recip());
        self.rows.insert(col, r);
        Some(col)
    }

    /// Inserts an already-reduced row (zero at every pivot, nonzero).
    fn insert_reduced(&mut self, r: SparseVec) -> usize {
        let (col, lead) = r.leading().expect("nonzero row");
        let r = r.scaled(&lead.recip());
        self.rows.insert(col, r);
        col
    }

    /// Fully reduced rows in pivot order (the RREF of the span).
    pub fn into_rref(mut self) -> Vec<(usize, SparseVec)> {
        let cols: Vec<usize> = self.rows.keys().rev().copied().collect();
        let mut done: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for c in cols {
            let mut row = self.rows.remove(&c).unwrap();
            // Entries at later pivots are cleared with already-reduced rows.
            let mut cursor = c + 1;
            loop {
                let next = row
                    .iter()
                    .find(|(i, _)| *i >= cursor && done.contains_key(i))
                    .map(|(i, v)| (i, v.clone()));
                let Some((col, coef)) = next else { break };
                row.axpy(&-&coef, &done[&col]);
                cursor = col + 1;
            }
            done.insert(c, row);
        }
        done.into_iter().collect()
    }
}

/// Reduced row-echelon form and its pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut ech = Echelon::default();
    for row in m.row_vecs() {
        ech.insert(row);
    }
    let reduced = ech.into_rref();
    let pivots: Vec<usize> = reduced.iter().map(|(c, _)| *c).collect();
    let mut rows: Vec<SparseVec> = reduced.into_iter().map(|(_, r)| r).collect();
    rows.resize(m.rows(), SparseVec::new());
    (RatMatrix::from_sparse_rows(m.rows(), m.cols(), rows).expect("in bounds"), pivots)
}

/// Outcome of a linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solvability {
    /// `a · x = b`.
    Solution(SparseVec),
    /// `yᵀ · a = 0` and `yᵀ · b ≠ 0`.
    Certificate(SparseVec),
}

impl Solvability {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Solvability::Solution(_))
    }
}

/// Full solve result: a particular solution together with the kernel.
#[derive(Clone, Debug)]
pub enum Solve {
    Solvable { particular: SparseVec, kernel: Subspace },
    Unsolvable { certificate: SparseVec },
}

fn augmented_rows(a: &RatMatrix, b: &SparseVec) -> Vec<SparseVec> {
    let n = a.cols();
    a.row_vecs()
        .into_iter()
        .enumerate()
        .map(|(r, mut row)| {
            let br = b.get(r);
            if !br.is_zero() {
                row.axpy(&Rational::ONE, &SparseVec::from_pairs([(n, br)]));
            }
            row
        })
        .collect()
}

/// Decides `a · x = b`, returning a solution or an unsolvability certificate.
pub fn find_solution(a: &RatMatrix, b: &SparseVec) -> Result<Solvability> {
    if b.max_index().is_some_and(|i| i >= a.rows()) {
        return Err(Error::contract(format!(
            "right-hand side has an entry beyond the {} rows of the matrix",
            a.rows()
        )));
    }
    let n = a.cols();
    let mut ech = Echelon::default();
    let rows = augmented_rows(a, b);
    for row in &rows {
        if ech.insert(row.clone()) == Some(n) {
            return Ok(Solvability::Certificate(certificate(&rows, n)));
        }
    }
    let mut x = Vec::new();
    for (col, row) in ech.into_rref() {
        let v = row.get(n);
        if !v.is_zero() {
            x.push((col, v));
        }
    }
    Ok(Solvability::Solution(SparseVec::from_pairs(x)))
}

/// Tracks row combinations to find `y` with `yᵀ[a|b] = (0,…,0,1)`.
fn certificate(rows: &[SparseVec], n: usize) -> SparseVec {
    let mut pivots: BTreeMap<usize, (SparseVec, SparseVec)> = BTreeMap::new();
    for (r, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        let mut combo = SparseVec::unit(r);
        let mut cursor = 0;
        loop {
            let next = v
                .iter()
                .find(|(i, _)| *i >= cursor && pivots.contains_key(i))
                .map(|(i, c)| (i, c.clone()));
            let Some((col, coef)) = next else { break };
            let (prow, pcombo) = &pivots[&col];
            v.axpy(&-&coef, prow);
            combo.axpy(&-&coef, pcombo);
            cursor = col + 1;
        }
        if let Some((col, lead)) = v.leading() {
            let inv = lead.recip();
            if col == n {
                return combo.scaled(&inv);
            }
            pivots.insert(col, (v.scaled(&inv), combo.scaled(&inv)));
        }
    }
    unreachable!("certificate requested for a consistent system")
}

/// Solves `a · x = b`, with the kernel of `a` when solvable.
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Result<Solve> {
    if b.len() != a.rows() {
        return Err(Error::contract(format!(
            "right-hand side has length {} but the matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    match find_solution(a, &SparseVec::from_dense(b))? {
        Solvability::Certificate(y) => Ok(Solve::Unsolvable { certificate: y }),
        Solvability::Solution(x) => Ok(Solve::Solvable { particular: x, kernel: kernel(a) }),
    }
}

/// Kernel of `a` as a subspace of ℚ^cols.
pub fn kernel(a: &RatMatrix) -> Subspace {
    let (r, pivots) = rref(a);
    let n = a.cols();
    let pivot_rows: Vec<(usize, SparseVec)> =
        pivots.iter().enumerate().map(|(i, &c)| (c, r.row(i))).collect();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        pivots.iter().for_each(|&c| v[c] = true);
        v
    };
    let vectors = (0..n).filter(|&f| !is_pivot[f]).map(|f| {
        let mut pairs = vec![(f, Rational::ONE)];
        for (c, row) in &pivot_rows {
            let v = row.get(f);
            if !v.is_zero() {
                pairs.push((*c, -v));
            }
        }
        SparseVec::from_pairs(pairs)
    });
    Subspace::span(n, vectors)
}

/// A linear subspace of ℚ^n, stored as the RREF of a spanning set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<SparseVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient_dim: n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace { ambient_dim: n, basis: (0..n).map(SparseVec::unit).collect(), pivots: (0..n).collect() }
    }

    pub fn span<I: IntoIterator<Item = SparseVec>>(n: usize, vectors: I) -> Self {
        let mut ech = Echelon::default();
        for v in vectors {
            debug_assert!(v.max_index().is_none_or(|i| i < n));
            ech.insert(v);
        }
        let reduced = ech.into_rref();
        Subspace {
            ambient_dim: n,
            pivots: reduced.iter().map(|(c, _)| *c).collect(),
            basis: reduced.into_iter().map(|(_, r)| r).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_matrix(&self) -> RatMatrix {
        RatMatrix::from_sparse_rows(self.dim(), self.ambient_dim, self.basis.clone()).expect("in bounds")
    }

    fn echelon(&self) -> Echelon {
        let mut ech = Echelon::default();
        for v in &self.basis {
            ech.insert_reduced(v.clone());
        }
        ech
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.echelon().reduce(v.clone()).is_empty()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        let ech = self.echelon();
        other.basis.iter().all(|v| ech.reduce(v.clone()).is_empty())
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        Subspace::span(self.ambient_dim, self.basis.iter().chain(other.basis.iter()).cloned())
    }
}

/// A quotient `v / u` with explicit projection and section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub dim: usize,
    /// `dim × ambient`: sends a vector of `v` to its quotient coordinates.
    pub projection: RatMatrix,
    /// `ambient × dim`: sends quotient coordinates to a representative in `v`.
    pub section: RatMatrix,
}

impl Quotient {
    pub fn project(&self, x: &SparseVec) -> SparseVec {
        self.projection.mul_vec(x)
    }

    pub fn lift(&self, coords: &SparseVec) -> SparseVec {
        self.section.mul_vec(coords)
    }
}

/// Computes `v / u`; requires `u ⊆ v`.
pub fn quotient(v: &Subspace, u: &Subspace) -> Result<Quotient> {
    if v.ambient_dim != u.ambient_dim {
        return Err(Error::contract("quotient of subspaces in different ambient spaces"));
    }
    if !v.contains_subspace(u) {
        return Err(Error::contract("quotient requires u ⊆ v"));
    }
    let n = v.ambient_dim;
    let mut ech = u.echelon();
    // Complement representatives, keyed by their pivot column.
    let mut complement: Vec<(usize, SparseVec)> = Vec::new();
    for row in &v.basis {
        let r = ech.reduce(row.clone());
        if !r.is_empty() {
            let col = ech.insert_reduced(r);
            complement.push((col, ech.rows[&col].clone()));
        }
    }
    let dim = complement.len();
    let slot: BTreeMap<usize, usize> = complement.iter().enumerate().map(|(k, (c, _))| (*c, k)).collect();
    let mut proj = Vec::new();
    for j in 0..n {
        let (_, used) = ech.reduce_tracked(SparseVec::unit(j));
        for (col, coef) in used {
            if let Some(&k) = slot.get(&col) {
                proj.push((k, j, coef));
            }
        }
    }
    let projection = RatMatrix::from_triplets(dim, n, proj)?;
    let section = RatMatrix::from_triplets(
        n,
        dim,
        complement
            .iter()
            .enumerate()
            .flat_map(|(k, (_, vec))| vec.iter().map(move |(i, x)| (i, k, x.clone())).collect::<Vec<_>>()),
    )?;
    Ok(Quotient { dim, projection, section })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(&v.iter().map(|&x| q(x)).collect::<Vec<_>>())
    }

    #[test]
    fn rref_identity() {
        let (r, p) = rref(&RatMatrix::identity(2));
        assert_eq!(r, RatMatrix::identity(2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn rref_rank_one() {
        let (r, p) = rref(&RatMatrix::from_int_rows(&[vec![2, 4], vec![1, 2]]));
        assert_eq!(r, RatMatrix::from_int_rows(&[vec![1, 2], vec![0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_zero() {
        let z = RatMatrix::zeros(3, 2);
        let (r, p) = rref(&z);
        assert_eq!(r, z);
        assert!(p.is_empty());
    }

    #[test]
    fn rref_is_fully_reduced() {
        let m = RatMatrix::from_int_rows(&[vec![1, 2, 3], vec![2, 5, 7], vec![1, 1, 2]]);
        let (r, p) = rref(&m);
        assert_eq!(p, vec![0, 1]);
        assert_eq!(r, RatMatrix::from_int_rows(&[vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 0]]));
    }

    #[test]
    fn solve_identity() {
        let b = vec![q(3), q(-2)];
        match solve(&RatMatrix::identity(2), &b).unwrap() {
            Solve::Solvable { particular, kernel } => {
                assert_eq!(particular, sv(&[3, -2]));
                assert_eq!(kernel.dim(), 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solve_underdetermined() {
        match solve(&RatMatrix::from_int_rows(&[vec![1, 1]]), &[q(2)]).unwrap() {
            Solve::Solvable { particular, kernel } => {
                assert_eq!(particular, sv(&[2, 0]));
                assert_eq!(kernel, Subspace::span(2, [sv(&[1, -1])]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solve_zero_map_gives_certificate() {
        match solve(&RatMatrix::from_int_rows(&[vec![0]]), &[q(1)]).unwrap() {
            Solve::Unsolvable { certificate } => assert_eq!(certificate, sv(&[1])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solve_dimension_mismatch() {
        assert!(matches!(solve(&RatMatrix::identity(2), &[q(1)]), Err(Error::Contract(_))));
    }

    #[test]
    fn quotient_examples() {
        let full = Subspace::full(2);
        assert_eq!(quotient(&full, &Subspace::zero(2)).unwrap().dim, 2);
        assert_eq!(quotient(&full, &full).unwrap().dim, 0);

        let u = Subspace::span(2, [sv(&[1, 1])]);
        let quo = quotient(&full, &u).unwrap();
        assert_eq!(quo.dim, 1);
        assert!(quo.project(&sv(&[1, 1])).is_empty());
        assert!(!quo.project(&sv(&[1, 0])).is_empty());
        let back = quo.lift(&quo.project(&sv(&[1, 0])));
        assert_eq!(quo.project(&back), quo.project(&sv(&[1, 0])));
    }

    #[test]
    fn quotient_requires_containment() {
        let v = Subspace::span(2, [sv(&[1, 0])]);
        let u = Subspace::span(2, [sv(&[0, 1])]);
        assert!(matches!(quotient(&v, &u), Err(Error::Contract(_))));
    }

    #[test]
    fn dense_and_sparse_storage_agree() {
        let small = RatMatrix::from_int_rows(&[vec![1, 0], vec![0, 3]]);
        assert!(small.is_dense());
        let big = RatMatrix::identity(9);
        assert!(!big.is_dense());
        assert_eq!(big.get(4, 4), Rational::ONE);
        assert_eq!(small.transpose().get(1, 1), q(3));
    }
}
