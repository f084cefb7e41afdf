//! Exact sparse matrices and the elimination kernels behind every rank,
//! kernel, solve and cohomology computation in the crate.
//!
//! Storage is a sparse triplet map; elimination densifies, which is the right
//! trade at desk scale where blocks are small but not sparse internally.
//! All stored entries are nonzero; absent means zero.

use crate::scalar::{Field, Scalar};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("span(small) is not contained in span(big)")]
    NotASubspace,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
}

/// A rows x cols matrix over the session field, sparse triplet storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    field: Field,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize, field: Field) -> ExactMatrix {
        ExactMatrix {
            rows,
            cols,
            field,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, field: Field) -> ExactMatrix {
        let mut m = ExactMatrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, Scalar::one(field));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>, field: Field) -> ExactMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = ExactMatrix::zero(r, c, field);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Build from integer rows, mostly for tests.
    pub fn from_int_rows(rows: &[&[i64]], field: Field) -> ExactMatrix {
        ExactMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| Scalar::from_int(field, n)).collect())
                .collect(),
            field,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            assert_eq!(v.field(), self.field, "field mismatch");
            self.entries.insert((i, j), v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Scalar) {
        let cur = self.get(i, j);
        self.set(i, j, &cur + v);
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn scale(&self, c: &Scalar) -> ExactMatrix {
        let mut out = ExactMatrix::zero(self.rows, self.cols, self.field);
        for (i, j, v) in self.iter_entries() {
            out.set(i, j, v * c);
        }
        out
    }

    pub fn neg(&self) -> ExactMatrix {
        self.scale(&-Scalar::one(self.field))
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (i, j, v) in other.iter_entries() {
            out.add_to(i, j, v);
        }
        out
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        self.add(&other.neg())
    }

    /// Matrix product self * other.
    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = ExactMatrix::zero(self.rows, other.cols, self.field);
        // row index of other -> its nonzero entries
        let mut other_rows: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (i, j, v) in other.iter_entries() {
            other_rows.entry(i).or_default().push((j, v));
        }
        for (i, k, a) in self.iter_entries() {
            if let Some(row) = other_rows.get(&k) {
                for (j, b) in row {
                    out.add_to(i, *j, &(a * *b));
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.cols, "apply: length mismatch");
        let mut out = vec![Scalar::zero(self.field); self.rows];
        for (i, j, v) in self.iter_entries() {
            out[i] = &out[i] + &(v * &x[j]);
        }
        out
    }

    fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![Scalar::zero(self.field); self.cols]; self.rows];
        for (i, j, v) in self.iter_entries() {
            d[i][j] = v.clone();
        }
        d
    }

    /// Reduced row echelon form; returns (rref rows, pivot columns).
    fn rref(&self) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut m = self.to_dense();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].inv().expect("pivot nonzero");
            for j in c..self.cols {
                m[r][j] = &m[r][j] * &inv;
            }
            for i in 0..self.rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in c..self.cols {
                        let t = &m[r][j] * &f;
                        m[i][j] = &m[i][j] - &t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Rank over the session field.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of ker(self); size = cols - rank.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (m, pivots) = self.rref();
        let piv_of_col: BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if piv_of_col.contains_key(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(self.field); self.cols];
            v[free] = Scalar::one(self.field);
            for (&pc, &pr) in &piv_of_col {
                v[pc] = -&m[pr][free];
            }
            basis.push(v);
        }
        basis
    }

    /// Any x with self*x = b, or None when b is outside the image.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "solve: rhs length mismatch");
        // eliminate the augmented system
        let mut m = self.to_dense();
        for (i, row) in m.iter_mut().enumerate() {
            row.push(b[i].clone());
        }
        let aug = ExactMatrix::from_rows(m, self.field);
        let (red, pivots) = aug.rref();
        // inconsistent iff a pivot lands in the augmented column
        if pivots.iter().any(|&c| c == self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(self.field); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = red[r][self.cols].clone();
        }
        Some(x)
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = ExactMatrix::zero(self.rows, self.cols + other.cols, self.field);
        for (i, j, v) in self.iter_entries() {
            out.set(i, j, v.clone());
        }
        for (i, j, v) in other.iter_entries() {
            out.set(i, j + self.cols, v.clone());
        }
        out
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut out = ExactMatrix::zero(self.cols, self.rows, self.field);
        for (i, j, v) in self.iter_entries() {
            out.set(j, i, v.clone());
        }
        out
    }
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(cols: &[Vec<Scalar>], dim: usize, field: Field) -> ExactMatrix {
    let mut m = ExactMatrix::zero(dim, cols.len(), field);
    for (j, col) in cols.iter().enumerate() {
        assert_eq!(col.len(), dim, "column length mismatch");
        for (i, v) in col.iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v.clone());
            }
        }
    }
    m
}

/// dim span(big) - dim span(small), after verifying span(small) is contained
/// in span(big).  Vectors are ambient coordinates of equal length.
pub fn quotient_dim(
    big: &[Vec<Scalar>],
    small: &[Vec<Scalar>],
    ambient_dim: usize,
    field: Field,
) -> Result<usize, LinAlgError> {
    for v in big.iter().chain(small.iter()) {
        if v.len() != ambient_dim {
            return Err(LinAlgError::DimMismatch(format!(
                "vector length {} vs ambient {}",
                v.len(),
                ambient_dim
            )));
        }
    }
    let big_m = from_columns(big, ambient_dim, field);
    let rank_big = big_m.rank();
    let mut all = big.to_vec();
    all.extend_from_slice(small);
    let stacked = from_columns(&all, ambient_dim, field);
    if stacked.rank() != rank_big {
        return Err(LinAlgError::NotASubspace);
    }
    let rank_small = from_columns(small, ambient_dim, field).rank();
    Ok(rank_big - rank_small)
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    #[test]
    fn rank_examples() {
        assert_eq!(ExactMatrix::zero(3, 3, Q).rank(), 0);
        assert_eq!(ExactMatrix::identity(4, Q).rank(), 4);
        // rows (1,2,3),(2,4,6) over Q: second row is twice the first
        let m = ExactMatrix::from_int_rows(&[&[1, 2, 3], &[2, 4, 6]], Q);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(ExactMatrix::identity(5, Q).kernel_basis().is_empty());
        let z = ExactMatrix::zero(2, 2, Q);
        let k = z.kernel_basis();
        assert_eq!(k.len(), 2);
        assert_eq!(k[0], vec![Scalar::one(Q), Scalar::zero(Q)]);
        assert_eq!(k[1], vec![Scalar::zero(Q), Scalar::one(Q)]);
        // rows (1,1) over F2: kernel {(1,1)}, checked against enumerating all
        // four vectors of F2^2
        let f2 = Field::Prime(2);
        let m = ExactMatrix::from_int_rows(&[&[1, 1]], f2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        let mut solutions = Vec::new();
        for a in 0..2i64 {
            for b in 0..2i64 {
                let v = vec![Scalar::from_int(f2, a), Scalar::from_int(f2, b)];
                if m.apply(&v).iter().all(|x| x.is_zero()) && (a, b) != (0, 0) {
                    solutions.push(v);
                }
            }
        }
        assert_eq!(solutions.len(), 1);
        assert_eq!(k[0], solutions[0]);
    }

    #[test]
    fn solve_examples() {
        let id = ExactMatrix::identity(3, Q);
        let b = vec![
            Scalar::from_int(Q, 5),
            Scalar::from_int(Q, -1),
            Scalar::from_int(Q, 7),
        ];
        assert_eq!(id.solve(&b).unwrap(), b);

        let z = ExactMatrix::zero(2, 2, Q);
        let b = vec![Scalar::one(Q), Scalar::zero(Q)];
        assert_eq!(z.solve(&b), None);

        // rows (1,0),(1,0), b=(1,1) -> x=(1,0)
        let m = ExactMatrix::from_int_rows(&[&[1, 0], &[1, 0]], Q);
        let b = vec![Scalar::one(Q), Scalar::one(Q)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        assert_eq!(x, vec![Scalar::one(Q), Scalar::zero(Q)]);
    }

    fn e(i: usize, n: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(Q); n];
        v[i] = Scalar::one(Q);
        v
    }

    #[test]
    fn quotient_dim_examples() {
        let big = vec![e(0, 3), e(1, 3)];
        assert_eq!(quotient_dim(&big, &[], 3, Q).unwrap(), 2);
        // small = {e1 + e2}
        let mut s = e(0, 3);
        s[1] = Scalar::one(Q);
        assert_eq!(quotient_dim(&big, &[s], 3, Q).unwrap(), 1);
        // not a subspace
        assert_eq!(
            quotient_dim(&[e(0, 3)], &[e(1, 3)], 3, Q),
            Err(LinAlgError::NotASubspace)
        );
    }

    #[test]
    fn solve_returns_exact_preimages() {
        let f = Field::default_prime();
        let m = ExactMatrix::from_int_rows(&[&[2, 3, 5], &[7, 11, 13], &[9, 14, 18]], f);
        let b = vec![
            Scalar::from_int(f, 1),
            Scalar::from_int(f, 2),
            Scalar::from_int(f, 3),
        ];
        let x = m.solve(&b).expect("consistent");
        assert_eq!(m.apply(&x), b);
    }
}
