//! Dense matrices over F_p with exact rank, solving and inversion.
//!
//! Everything is immutable: each operation returns a fresh matrix, so callers
//! can reuse the same query matrices across many predicates without copies
//! being invalidated under them. Pivoting is first-nonzero; over a prime
//! field there is no magnitude to prefer.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::field::{FieldElement, FieldSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operands live in different fields (mod {left} vs mod {right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("entry at row {row}, column {col} is {value}, outside [0, {modulus})")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        modulus: u32,
    },
    #[error("matrix is singular")]
    Singular,
    #[error("no solution: row {row} lies outside the row space")]
    NoSolution { row: usize },
    #[error("column block {block} is out of range")]
    BlockOutOfRange { block: usize },
}

/// One message's span of columns inside a query matrix.
///
/// A query matrix over M messages with `width` sub-symbols each has M·width
/// columns; block `message` (1-based) covers columns
/// `(message-1)·width .. message·width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnBlock {
    pub message: usize,
    pub width: usize,
}

impl ColumnBlock {
    pub fn new(message: usize, width: usize) -> Self {
        ColumnBlock { message, width }
    }

    fn columns(&self) -> std::ops::Range<usize> {
        (self.message - 1) * self.width..self.message * self.width
    }
}

/// Builds the set of column blocks for the given 1-based message indices.
pub fn block_set(messages: impl IntoIterator<Item = usize>, width: usize) -> BTreeSet<ColumnBlock> {
    messages
        .into_iter()
        .map(|m| ColumnBlock::new(m, width))
        .collect()
}

/// A rows × cols matrix over one prime field, entries stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl FpMatrix {
    /// Builds a matrix from explicit rows. Entries must already be reduced
    /// into [0, p); anything else is rejected rather than silently wrapped.
    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<u32>>) -> Result<Self, MatrixError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(height * width);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(MatrixError::ShapeMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    width
                )));
            }
            for (j, &value) in row.iter().enumerate() {
                if value >= field.modulus() {
                    return Err(MatrixError::EntryOutOfRange {
                        row: i + 1,
                        col: j + 1,
                        value,
                        modulus: field.modulus(),
                    });
                }
                entries.push(value);
            }
        }
        Ok(FpMatrix {
            field,
            rows: height,
            cols: width,
            entries,
        })
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1 % field.modulus();
        }
        m
    }

    /// Column vector from a flat list of residues.
    pub fn column(field: FieldSpec, values: &[u32]) -> Result<Self, MatrixError> {
        Self::from_rows(field, values.iter().map(|&v| vec![v]).collect())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries[row * self.cols + col]
    }

    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        self.field.element(u64::from(self.entry(row, col)))
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    fn set(&mut self, row: usize, col: usize, value: u32) {
        self.entries[row * self.cols + col] = value;
    }

    /// The sub-matrix made of rows `range`.
    pub fn row_slice(&self, range: std::ops::Range<usize>) -> FpMatrix {
        assert!(range.end <= self.rows, "row range out of bounds");
        FpMatrix {
            field: self.field,
            rows: range.len(),
            cols: self.cols,
            entries: self.entries[range.start * self.cols..range.end * self.cols].to_vec(),
        }
    }

    /// Stacks matrices vertically. They must agree on field and width.
    pub fn vstack(parts: &[&FpMatrix]) -> Result<FpMatrix, MatrixError> {
        let first = parts.first().expect("vstack of nothing");
        let mut entries = Vec::new();
        let mut rows = 0;
        for part in parts {
            if part.field != first.field {
                return Err(MatrixError::FieldMismatch {
                    left: first.field.modulus(),
                    right: part.field.modulus(),
                });
            }
            if part.cols != first.cols {
                return Err(MatrixError::ShapeMismatch(format!(
                    "cannot stack widths {} and {}",
                    first.cols, part.cols
                )));
            }
            entries.extend_from_slice(&part.entries);
            rows += part.rows;
        }
        Ok(FpMatrix {
            field: first.field,
            rows,
            cols: first.cols,
            entries,
        })
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.entry(i, j));
            }
        }
        out
    }

    pub fn mul(&self, rhs: &FpMatrix) -> Result<FpMatrix, MatrixError> {
        if self.field != rhs.field {
            return Err(MatrixError::FieldMismatch {
                left: self.field.modulus(),
                right: rhs.field.modulus(),
            });
        }
        if self.cols != rhs.rows {
            return Err(MatrixError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = FpMatrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u32;
                for k in 0..self.cols {
                    acc = self
                        .field
                        .add(acc, self.field.mul(self.entry(i, k), rhs.entry(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form with pivots restricted to the first
    /// `pivot_cols` columns. Returns the reduced matrix and the pivot column
    /// indices in row order.
    fn reduce(&self, pivot_cols: usize) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..pivot_cols.min(self.cols) {
            let Some(src) = (pivot_row..m.rows).find(|&r| m.entry(r, col) != 0) else {
                continue;
            };
            if src != pivot_row {
                for j in 0..m.cols {
                    let a = m.entry(src, j);
                    let b = m.entry(pivot_row, j);
                    m.set(src, j, b);
                    m.set(pivot_row, j, a);
                }
            }
            let inv = m
                .field
                .inv(m.entry(pivot_row, col))
                .expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(pivot_row, j, m.field.mul(m.entry(pivot_row, j), inv));
            }
            for r in 0..m.rows {
                if r != pivot_row && m.entry(r, col) != 0 {
                    let factor = m.entry(r, col);
                    for j in 0..m.cols {
                        let sub = m.field.mul(factor, m.entry(pivot_row, j));
                        m.set(r, j, m.field.sub(m.entry(r, j), sub));
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
            if pivot_row == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn reduced_row_echelon(&self) -> (FpMatrix, Vec<usize>) {
        self.reduce(self.cols)
    }

    /// Rank by Gaussian elimination. The input is left untouched.
    pub fn rank(&self) -> usize {
        self.reduce(self.cols).1.len()
    }

    /// Inverse of a square matrix, or `Singular`.
    pub fn invert(&self) -> Result<FpMatrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::ShapeMismatch(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = FpMatrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.entry(i, j));
            }
            aug.set(i, n + i, 1 % self.field.modulus());
        }
        let (reduced, pivots) = aug.reduce(n);
        if pivots.len() < n {
            return Err(MatrixError::Singular);
        }
        let mut out = FpMatrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, reduced.entry(i, n + j));
            }
        }
        Ok(out)
    }

    /// Vandermonde matrix: row i is (1, z_i, z_i^2, ..., z_i^(width-1)).
    pub fn vandermonde(nodes: &[FieldElement], width: usize) -> Result<FpMatrix, MatrixError> {
        let Some(first) = nodes.first() else {
            return Err(MatrixError::ShapeMismatch(
                "vandermonde needs at least one node".into(),
            ));
        };
        let field = first.field();
        let mut out = FpMatrix::zeros(field, nodes.len(), width);
        for (i, node) in nodes.iter().enumerate() {
            if node.field() != field {
                return Err(MatrixError::FieldMismatch {
                    left: field.modulus(),
                    right: node.field().modulus(),
                });
            }
            let mut power = 1 % field.modulus();
            for j in 0..width {
                out.set(i, j, power);
                power = field.mul(power, node.value());
            }
        }
        Ok(out)
    }

    /// Keeps only the columns of the given message blocks, concatenated in
    /// ascending block order.
    pub fn select_columns(&self, blocks: &BTreeSet<ColumnBlock>) -> Result<FpMatrix, MatrixError> {
        let mut keep = Vec::new();
        for block in blocks {
            if block.message == 0 || block.message * block.width > self.cols {
                return Err(MatrixError::BlockOutOfRange {
                    block: block.message,
                });
            }
            keep.extend(block.columns());
        }
        let mut out = FpMatrix::zeros(self.field, self.rows, keep.len());
        for i in 0..self.rows {
            for (jj, &j) in keep.iter().enumerate() {
                out.set(i, jj, self.entry(i, j));
            }
        }
        Ok(out)
    }

    /// Solves D · self = target for D, row by row.
    ///
    /// Each row of `target` must lie in the row space of `self`; the first
    /// row that does not is reported in the error. Among the many valid
    /// factors the canonical one is returned: free variables are zero, pivot
    /// variables come from the reduced echelon form of the transpose.
    pub fn solve_left_factor(&self, target: &FpMatrix) -> Result<FpMatrix, MatrixError> {
        if self.field != target.field {
            return Err(MatrixError::FieldMismatch {
                left: self.field.modulus(),
                right: target.field.modulus(),
            });
        }
        if self.cols != target.cols {
            return Err(MatrixError::ShapeMismatch(format!(
                "row width {} vs target width {}",
                self.cols, target.cols
            )));
        }
        // Augment self^T with target^T and reduce with pivots confined to the
        // left part; the right part then holds coordinates or inconsistency.
        let left = self.transpose();
        let right = target.transpose();
        let mut aug = FpMatrix::zeros(self.field, self.cols, self.rows + target.rows);
        for i in 0..self.cols {
            for j in 0..self.rows {
                aug.set(i, j, left.entry(i, j));
            }
            for j in 0..target.rows {
                aug.set(i, self.rows + j, right.entry(i, j));
            }
        }
        let (reduced, pivots) = aug.reduce(self.rows);
        // Any row below the pivot rows with a nonzero target coordinate
        // witnesses that this target row is not a combination of our rows.
        for t in 0..target.rows {
            for r in pivots.len()..self.cols {
                if reduced.entry(r, self.rows + t) != 0 {
                    return Err(MatrixError::NoSolution { row: t });
                }
            }
        }
        let mut factor = FpMatrix::zeros(self.field, target.rows, self.rows);
        for t in 0..target.rows {
            for (row, &col) in pivots.iter().enumerate() {
                factor.set(t, col, reduced.entry(row, self.rows + t));
            }
        }
        Ok(factor)
    }
}

impl std::fmt::Display for FpMatrix {
    /// Compact one-line form: `[0 1; 1 1]`, rows separated by `;`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn mat(p: u64, rows: Vec<Vec<u32>>) -> FpMatrix {
        FpMatrix::from_rows(field(p), rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mat(5, vec![vec![1, 2], vec![2, 4]]).rank(), 1);
        assert_eq!(FpMatrix::zeros(field(3), 3, 4).rank(), 0);
        assert_eq!(FpMatrix::identity(field(3), 3).rank(), 3);
    }

    #[test]
    fn rank_transpose_invariant() {
        let m = mat(
            3,
            vec![vec![1, 2, 0, 1], vec![2, 1, 1, 0], vec![0, 0, 1, 1]],
        );
        assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_left_factor_examples() {
        let a = FpMatrix::identity(field(2), 2);
        let b = mat(2, vec![vec![1, 0]]);
        assert_eq!(a.solve_left_factor(&b).unwrap(), mat(2, vec![vec![1, 0]]));

        let a = mat(2, vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(
            a.solve_left_factor(&b),
            Err(MatrixError::NoSolution { row: 0 })
        );

        let a = mat(2, vec![vec![0, 1], vec![1, 1]]);
        let d = a.solve_left_factor(&b).unwrap();
        assert_eq!(d, mat(2, vec![vec![1, 1]]));
        assert_eq!(d.mul(&a).unwrap(), b);
    }

    #[test]
    fn solve_reports_first_offending_row() {
        let a = mat(2, vec![vec![1, 1], vec![1, 1]]);
        let b = mat(2, vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(
            a.solve_left_factor(&b),
            Err(MatrixError::NoSolution { row: 1 })
        );
    }

    #[test]
    fn invert_examples() {
        let id = FpMatrix::identity(field(7), 4);
        assert_eq!(id.invert().unwrap(), id);

        let m = mat(2, vec![vec![1, 1], vec![1, 0]]);
        let inv = m.invert().unwrap();
        assert_eq!(inv, mat(2, vec![vec![0, 1], vec![1, 1]]));
        assert_eq!(m.mul(&inv).unwrap(), FpMatrix::identity(field(2), 2));

        let m = mat(2, vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(m.invert(), Err(MatrixError::Singular));
    }

    #[test]
    fn vandermonde_examples() {
        let f3 = field(3);
        let nodes: Vec<_> = f3.elements().collect();
        let v = FpMatrix::vandermonde(&nodes, 3).unwrap();
        assert_eq!(v, mat(3, vec![vec![1, 0, 0], vec![1, 1, 1], vec![1, 2, 1]]));

        let single = FpMatrix::vandermonde(&[f3.element(2)], 1).unwrap();
        assert_eq!(single, mat(3, vec![vec![1]]));
    }

    #[test]
    fn vandermonde_invertible_for_distinct_nodes() {
        // Every n-subset of F_p gives an invertible square Vandermonde.
        for p in [2u64, 3, 5, 7] {
            let f = field(p);
            let all: Vec<_> = f.elements().collect();
            for mask in 1u32..(1 << p) {
                let nodes: Vec<_> = all
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, e)| *e)
                    .collect();
                let v = FpMatrix::vandermonde(&nodes, nodes.len()).unwrap();
                let inv = v.invert().unwrap();
                assert_eq!(
                    v.mul(&inv).unwrap(),
                    FpMatrix::identity(f, nodes.len()),
                    "p={p} mask={mask:b}"
                );
            }
        }
    }

    #[test]
    fn select_columns_examples() {
        let m = mat(5, vec![vec![1, 2, 3, 4]]);
        // Two blocks of width 2: keeping both leaves the matrix unchanged.
        let all = block_set([1, 2], 2);
        assert_eq!(m.select_columns(&all).unwrap(), m);
        // The empty set gives a rows x 0 matrix of rank 0.
        let none = m.select_columns(&BTreeSet::new()).unwrap();
        assert_eq!((none.rows(), none.cols()), (1, 0));
        assert_eq!(none.rank(), 0);
        // Block 2 alone keeps the last two columns.
        let tail = m.select_columns(&block_set([2], 2)).unwrap();
        assert_eq!(tail, mat(5, vec![vec![3, 4]]));
        // Block 3 does not exist.
        assert_eq!(
            m.select_columns(&block_set([3], 2)),
            Err(MatrixError::BlockOutOfRange { block: 3 })
        );
    }

    #[test]
    fn rejects_out_of_range_entries() {
        assert_eq!(
            FpMatrix::from_rows(field(3), vec![vec![0, 3]]),
            Err(MatrixError::EntryOutOfRange {
                row: 1,
                col: 2,
                value: 3,
                modulus: 3
            })
        );
    }

    /// Independent rank oracle: the size of the row span, counted by
    /// enumerating every linear combination of the rows.
    fn span_rank(m: &FpMatrix) -> usize {
        let p = u64::from(m.field().modulus());
        let mut span = std::collections::HashSet::new();
        let combos = p.pow(m.rows() as u32);
        for mut idx in 0..combos {
            let mut vec = vec![0u32; m.cols()];
            for r in 0..m.rows() {
                let coeff = (idx % p) as u32;
                idx /= p;
                for (c, slot) in vec.iter_mut().enumerate() {
                    *slot = m.field().add(*slot, m.field().mul(coeff, m.entry(r, c)));
                }
            }
            span.insert(vec);
        }
        let mut size = span.len() as u64;
        let mut rank = 0;
        while size > 1 {
            assert_eq!(size % p, 0, "span size must be a power of p");
            size /= p;
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_matches_span_enumeration_oracle() {
        // Exhaustive over every matrix with entries in F_2 and F_3 up to 3x4.
        for p in [2u64, 3] {
            let f = field(p);
            for rows in 1..=3usize {
                for cols in 1..=4usize {
                    let cells = rows * cols;
                    let total = p.pow(cells as u32);
                    for mut code in 0..total {
                        let mut m = FpMatrix::zeros(f, rows, cols);
                        for cell in 0..cells {
                            let v = (code % p) as u32;
                            code /= p;
                            m.set(cell / cols, cell % cols, v);
                        }
                        assert_eq!(m.rank(), span_rank(&m), "p={p} m={m}");
                    }
                }
            }
        }
    }
}
