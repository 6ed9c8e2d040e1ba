//! Dense bit-packed linear algebra over GF(2).
//!
//! Matrices are stored row-major with one `u64` word per 64 columns. Every
//! elimination routine selects the leftmost available pivot, so ranks,
//! kernel bases, row-space bases and kernel complements are deterministic
//! functions of their input.

use std::fmt;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("row space is not contained in the kernel (M * M^T != 0)")]
    NotSelfOrthogonal,
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters; panics on anything else.
    pub fn from_01_str(s: &str) -> Self {
        Self::from_bools(
            &s.chars()
                .map(|c| match c {
                    '0' => false,
                    '1' => true,
                    other => panic!("invalid bit character {other:?}"),
                })
                .collect::<Vec<_>>(),
        )
    }

    pub fn unit(len: usize, position: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(position, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    /// Inner product over GF(2): parity of the intersection weight.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let parity = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
        parity & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_set_bit(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (i, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(i * WORD_BITS + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// Dense bit-packed matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        for row in &rows {
            assert_eq!(row.len(), cols, "ragged row in matrix constructor");
        }
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Builds a matrix from `0`/`1` strings of equal length.
    pub fn from_01_strings(rows: &[&str]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| BitVec::from_01_str(r)).collect())
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row].get(col)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row].set(col, value);
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVec> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    /// Number of nonzero entries.
    pub fn count_ones(&self) -> usize {
        self.data.iter().map(BitVec::weight).sum()
    }

    pub fn transposed(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.support() {
                out.set(j, i, true);
            }
        }
        out
    }

    /// Stacks `top` above `bottom`; both must have the same column count.
    pub fn stacked(top: &BitMatrix, bottom: &BitMatrix) -> Self {
        assert_eq!(top.cols, bottom.cols, "column mismatch in stack");
        let mut rows = top.data.clone();
        rows.extend(bottom.data.iter().cloned());
        Self::from_rows(top.cols, rows)
    }

    /// Matrix product over GF(2); `self.cols` must equal `rhs.rows`.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for (i, row) in self.data.iter().enumerate() {
            for k in row.support() {
                out.data[i].xor_assign(&rhs.data[k]);
            }
        }
        out
    }

    /// `self * rhs^T` computed as pairwise row inner products.
    pub fn mul_transpose(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.cols, "shape mismatch in mul_transpose");
        let mut out = BitMatrix::zeros(self.rows, rhs.rows);
        for i in 0..self.rows {
            for j in 0..rhs.rows {
                if self.data[i].dot(&rhs.data[j]) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }

    /// Matrix-vector product; `v.len()` must equal the column count.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        let mut out = BitVec::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    fn rref(&self) -> Rref {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut next = 0usize;
        for col in 0..self.cols {
            let Some(found) = (next..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(next, found);
            let pivot_row = rows[next].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        rows.truncate(next);
        Rref {
            cols: self.cols,
            rows,
            pivots,
        }
    }

    /// Rank over GF(2) by Gaussian elimination with leftmost pivots.
    pub fn rank(&self) -> usize {
        self.rref().rows.len()
    }

    /// Basis of `{x : Mx = 0}`; dimension is `cols - rank`.
    pub fn kernel_basis(&self) -> SubspaceBasis {
        let rref = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        let mut vectors = Vec::with_capacity(self.cols - rref.pivots.len());
        for (free, _) in is_pivot.iter().enumerate().filter(|(_, &pivot)| !pivot) {
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (row, &pivot) in rref.rows.iter().zip(&rref.pivots) {
                if row.get(free) {
                    v.set(pivot, true);
                }
            }
            vectors.push(v);
        }
        SubspaceBasis::new_unchecked(self.cols, vectors)
    }

    /// Basis of the span of the rows (the reduced echelon rows).
    pub fn row_space_basis(&self) -> SubspaceBasis {
        let rref = self.rref();
        SubspaceBasis::new_unchecked(self.cols, rref.rows)
    }

    /// True iff `M * M^T = 0`, equivalently `row(M) ⊆ ker(M)`.
    pub fn is_self_orthogonal(&self) -> bool {
        for i in 0..self.rows {
            for j in i..self.rows {
                if self.data[i].dot(&self.data[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Deterministic complement `U` with `U ⊕ row(M) = ker(M)`.
    ///
    /// Kernel basis vectors are adjoined greedily in index order, so the
    /// result is reproducible. `dim U = cols - 2 rank(M)`.
    pub fn complement_in_kernel(&self) -> Result<SubspaceBasis, Gf2Error> {
        if !self.is_self_orthogonal() {
            return Err(Gf2Error::NotSelfOrthogonal);
        }
        let kernel = self.kernel_basis();
        let row_space = self.row_space_basis();
        let mut span = Reducer::new(self.cols);
        for v in row_space.vectors() {
            span.insert(v.clone());
        }
        let mut complement = Vec::new();
        for v in kernel.vectors() {
            if span.insert(v.clone()) {
                complement.push(v.clone());
            }
        }
        debug_assert_eq!(complement.len(), self.cols - 2 * row_space.dim());
        Ok(SubspaceBasis::new_unchecked(self.cols, complement))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

/// Reduced row echelon form: nonzero rows plus their pivot columns.
struct Rref {
    #[allow(dead_code)]
    cols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

/// Incremental echelon span used for membership and greedy extension.
struct Reducer {
    cols: usize,
    rows: Vec<(usize, BitVec)>, // (pivot, row), pivots strictly increasing
}

impl Reducer {
    fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
            }
        }
        v
    }

    /// Adds `v` to the span; returns false when it was already contained.
    fn insert(&mut self, v: BitVec) -> bool {
        assert_eq!(v.len(), self.cols);
        let reduced = self.reduce(&v);
        let Some(pivot) = reduced.first_set_bit() else {
            return false;
        };
        let at = self.rows.partition_point(|(p, _)| *p < pivot);
        self.rows.insert(at, (pivot, reduced));
        true
    }

    fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Kronecker product of GF(2) vectors: entry `i*|v| + j = u_i * v_j`.
pub fn tensor_vector(u: &BitVec, v: &BitVec) -> BitVec {
    let mut out = BitVec::zeros(u.len() * v.len());
    for i in u.support() {
        for j in v.support() {
            out.set(i * v.len() + j, true);
        }
    }
    out
}

/// A list of linearly independent GF(2) vectors spanning a subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<BitVec>,
}

impl SubspaceBasis {
    /// Validates independence (rank of the stacked vectors equals the count).
    pub fn new(ambient_dim: usize, vectors: Vec<BitVec>) -> Self {
        let basis = Self::new_unchecked(ambient_dim, vectors);
        assert_eq!(
            basis.to_matrix().rank(),
            basis.vectors.len(),
            "basis vectors are not linearly independent"
        );
        basis
    }

    fn new_unchecked(ambient_dim: usize, vectors: Vec<BitVec>) -> Self {
        for v in &vectors {
            assert_eq!(v.len(), ambient_dim, "basis vector has wrong length");
        }
        Self {
            ambient_dim,
            vectors,
        }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self::new_unchecked(ambient_dim, Vec::new())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[BitVec] {
        &self.vectors
    }

    pub fn to_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.ambient_dim, self.vectors.clone())
    }

    /// Membership test by reduction against the span.
    pub fn contains(&self, v: &BitVec) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let mut reducer = Reducer::new(self.ambient_dim);
        for b in &self.vectors {
            reducer.insert(b.clone());
        }
        reducer.contains(v)
    }

    /// `dim(span A ∩ span B) = dim A + dim B - rank(A stacked on B)`.
    pub fn intersection_dim(&self, other: &SubspaceBasis) -> Result<usize, Gf2Error> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Gf2Error::DimensionMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        let stacked = BitMatrix::stacked(&self.to_matrix(), &other.to_matrix());
        Ok(self.dim() + other.dim() - stacked.rank())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn hamming() -> BitMatrix {
        BitMatrix::from_01_strings(&[
            "1111000", "1100011", "1010101", "1001110", "0110110", "0101101", "0011011",
        ])
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.next_u64() & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Independent rank oracle on unpacked booleans.
    fn naive_rank(m: &BitMatrix) -> usize {
        let mut a: Vec<Vec<bool>> = (0..m.row_count())
            .map(|i| (0..m.col_count()).map(|j| m.get(i, j)).collect())
            .collect();
        let mut rank = 0;
        for col in 0..m.col_count() {
            if let Some(pivot) = (rank..a.len()).find(|&i| a[i][col]) {
                a.swap(rank, pivot);
                let row = a[rank].clone();
                for (i, other) in a.iter_mut().enumerate() {
                    if i != rank && other[col] {
                        for (x, y) in other.iter_mut().zip(&row) {
                            *x ^= y;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn hamming_rank_is_three() {
        assert_eq!(hamming().rank(), 3);
    }

    #[test]
    fn zero_matrix_rank_is_zero() {
        assert_eq!(BitMatrix::zeros(5, 9).rank(), 0);
        assert_eq!(BitMatrix::zeros(0, 4).rank(), 0);
    }

    #[test]
    fn rank_matches_naive_oracle_and_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rows = 1 + (rng.next_u64() % 9) as usize;
            let cols = 1 + (rng.next_u64() % 9) as usize;
            let m = random_matrix(&mut rng, rows, cols);
            let r = m.rank();
            assert_eq!(r, naive_rank(&m));
            assert_eq!(r, m.transposed().rank());
            assert_eq!(r, m.row_space_basis().dim());
        }
    }

    #[test]
    fn hamming_kernel_has_dimension_four() {
        let h = hamming();
        let kernel = h.kernel_basis();
        assert_eq!(kernel.dim(), 4);
        for v in kernel.vectors() {
            assert!(h.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn identity_kernel_is_trivial() {
        assert_eq!(BitMatrix::identity(6).kernel_basis().dim(), 0);
    }

    #[test]
    fn kernel_vectors_annihilated_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let m = random_matrix(&mut rng, 6, 8);
            let kernel = m.kernel_basis();
            assert_eq!(kernel.dim(), 8 - m.rank());
            for v in kernel.vectors() {
                assert!(m.mul_vec(v).is_zero());
            }
        }
    }

    #[test]
    fn row_space_of_zero_matrix_is_empty() {
        assert_eq!(BitMatrix::zeros(3, 7).row_space_basis().dim(), 0);
    }

    #[test]
    fn hamming_is_self_orthogonal() {
        assert!(hamming().is_self_orthogonal());
    }

    #[test]
    fn single_one_is_not_self_orthogonal() {
        assert!(!BitMatrix::from_01_strings(&["1"]).is_self_orthogonal());
    }

    #[test]
    fn self_orthogonal_rows_have_even_weights_and_overlaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut seen = 0;
        while seen < 20 {
            let m = random_matrix(&mut rng, 4, 8);
            if !m.is_self_orthogonal() {
                continue;
            }
            seen += 1;
            for i in 0..m.row_count() {
                assert_eq!(m.row(i).weight() % 2, 0);
                for j in i + 1..m.row_count() {
                    let overlap = m.row(i).support().iter().filter(|&&c| m.get(j, c)).count();
                    assert_eq!(overlap % 2, 0);
                }
            }
        }
    }

    #[test]
    fn hamming_complement_is_one_dimensional() {
        let h = hamming();
        let u = h.complement_in_kernel().unwrap();
        // dim = 7 - 2*3 = 1
        assert_eq!(u.dim(), 1);
        let stacked = BitMatrix::stacked(&u.to_matrix(), &h.row_space_basis().to_matrix());
        assert_eq!(stacked.rank(), h.kernel_basis().dim());
    }

    #[test]
    fn complement_of_zero_matrix_is_full_space() {
        let z = BitMatrix::zeros(4, 4);
        let u = z.complement_in_kernel().unwrap();
        assert_eq!(u.dim(), 4);
    }

    #[test]
    fn complement_rejects_non_self_orthogonal() {
        let m = BitMatrix::from_01_strings(&["10", "01"]);
        assert_eq!(m.complement_in_kernel(), Err(Gf2Error::NotSelfOrthogonal));
    }

    #[test]
    fn complement_direct_sum_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut seen = 0;
        while seen < 20 {
            let m = random_matrix(&mut rng, 3, 8);
            if !m.is_self_orthogonal() {
                continue;
            }
            seen += 1;
            let u = m.complement_in_kernel().unwrap();
            assert_eq!(u.dim() + 2 * m.rank(), m.col_count());
            let stacked = BitMatrix::stacked(&u.to_matrix(), &m);
            assert_eq!(stacked.rank(), m.kernel_basis().dim());
        }
    }

    #[test]
    fn tensor_of_unit_vectors() {
        let u = BitVec::unit(2, 0);
        let v = BitVec::unit(2, 1);
        let t = tensor_vector(&u, &v);
        assert_eq!(t.support(), vec![1]);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn tensor_with_zero_is_zero() {
        let u = BitVec::from_01_str("101");
        let z = BitVec::zeros(4);
        assert!(tensor_vector(&u, &z).is_zero());
    }

    #[test]
    fn tensor_weight_is_product_of_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let u =
                BitVec::from_bools(&(0..5).map(|_| rng.next_u64() & 1 == 1).collect::<Vec<_>>());
            let v =
                BitVec::from_bools(&(0..6).map(|_| rng.next_u64() & 1 == 1).collect::<Vec<_>>());
            assert_eq!(tensor_vector(&u, &v).weight(), u.weight() * v.weight());
        }
    }

    #[test]
    fn self_intersection_is_identity() {
        let h = hamming();
        let basis = h.row_space_basis();
        assert_eq!(basis.intersection_dim(&basis).unwrap(), basis.dim());
    }

    #[test]
    fn disjoint_spans_intersect_trivially() {
        let a = SubspaceBasis::new(4, vec![BitVec::unit(4, 0), BitVec::unit(4, 1)]);
        let b = SubspaceBasis::new(4, vec![BitVec::unit(4, 2), BitVec::unit(4, 3)]);
        assert_eq!(a.intersection_dim(&b).unwrap(), 0);
    }

    #[test]
    fn intersection_dim_rejects_mismatched_ambient() {
        let a = SubspaceBasis::new(3, vec![BitVec::unit(3, 0)]);
        let b = SubspaceBasis::new(4, vec![BitVec::unit(4, 0)]);
        assert!(matches!(
            a.intersection_dim(&b),
            Err(Gf2Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dimension_formula_on_random_subspace_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..100 {
            let a = random_matrix(&mut rng, 3, 8).row_space_basis();
            let b = random_matrix(&mut rng, 3, 8).row_space_basis();
            let stacked = BitMatrix::stacked(&a.to_matrix(), &b.to_matrix());
            let inter = a.intersection_dim(&b).unwrap();
            assert_eq!(inter + stacked.rank(), a.dim() + b.dim());
        }
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<BitVec>();
        assert_send_sync::<BitMatrix>();
        assert_send_sync::<SubspaceBasis>();
    }

    #[test]
    fn kernel_and_row_space_round_trip_membership() {
        let h = hamming();
        let kernel = h.kernel_basis();
        let rows = h.row_space_basis();
        // row(H) ⊆ ker(H) for the self-orthogonal Hamming matrix
        for v in rows.vectors() {
            assert!(kernel.contains(v));
        }
        for v in kernel.vectors() {
            assert!(kernel.contains(v));
        }
    }
}
