//! Exact arithmetic over a prime field GF(L) and the dense linear
//! algebra built on it: rank, span membership, and left-system solving.
//!
//! All elimination is exact modular arithmetic with first-nonzero
//! pivoting; there is no numerical tolerance anywhere. Every value is
//! immutable after construction, so everything here is safe to share
//! across threads.

use crate::error::{Error, Result};
use std::fmt::Write as _;

/// A prime modulus defining GF(L).
///
/// The default of `L = 257` supports up to 256 distinct nonzero
/// evaluation points for the MDS constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldConfig {
    modulus: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { modulus: 257 }
    }
}

impl FieldConfig {
    /// Builds a field configuration, checking primality by trial
    /// division.
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidParameter(format!(
                "field modulus must be at least 2, got {modulus}"
            )));
        }
        let mut d = 2u64;
        while d * d <= modulus {
            if modulus.is_multiple_of(d) {
                return Err(Error::InvalidParameter(format!(
                    "field modulus {modulus} is not prime ({d} divides it)"
                )));
            }
            d += 1;
        }
        Ok(FieldConfig { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        (a + self.modulus - b) % self.modulus
    }

    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.modulus);
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        a * b % self.modulus
    }

    /// `a^e mod L` by square-and-multiply.
    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        debug_assert!(a < self.modulus);
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat: `a^(L-2)`.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::ZeroInverse {
                modulus: self.modulus,
            });
        }
        Ok(self.pow(a, self.modulus - 2))
    }
}

/// A dense `rows x cols` matrix over GF(L), stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
    field: FieldConfig,
}

impl FieldMatrix {
    /// Builds a matrix from row-major entries, checking that every
    /// entry lies in `[0, L)` and that the shape matches.
    pub fn new(rows: usize, cols: usize, entries: Vec<u64>, field: FieldConfig) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|&&e| e >= field.modulus()) {
            return Err(Error::InvalidParameter(format!(
                "entry {e} is outside GF({})",
                field.modulus()
            )));
        }
        Ok(FieldMatrix {
            rows,
            cols,
            entries,
            field,
        })
    }

    pub fn zeros(rows: usize, cols: usize, field: FieldConfig) -> Self {
        FieldMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(n: usize, field: FieldConfig) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], field: FieldConfig) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat(), field)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(v < self.field.modulus());
        self.entries[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Submatrix keeping only the given columns, in the given order.
    pub fn column_submatrix(&self, cols: &[usize]) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(self.rows, cols.len(), self.field);
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..self.rows {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(self.cols, self.rows, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c));
            }
        }
        m
    }

    /// Rank over GF(L) by exact Gaussian elimination. Zero and empty
    /// matrices have rank 0.
    pub fn rank(&self) -> usize {
        let mut work = self.entries.clone();
        gauss_rank(&mut work, self.rows, self.cols, self.field)
    }

    /// `A * b` for a column vector `b` of length `cols`.
    pub fn mul_vector(&self, b: &[u64]) -> Result<Vec<u64>> {
        if b.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} does not match {} columns",
                b.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                (0..self.cols).fold(0u64, |acc, c| {
                    self.field.add(acc, self.field.mul(self.get(r, c), b[c]))
                })
            })
            .collect())
    }

    /// `lambda * A` for a row vector `lambda` of length `rows`.
    pub fn left_mul(&self, lambda: &[u64]) -> Result<Vec<u64>> {
        if lambda.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} does not match {} rows",
                lambda.len(),
                self.rows
            )));
        }
        Ok((0..self.cols)
            .map(|c| {
                (0..self.rows).fold(0u64, |acc, r| {
                    self.field
                        .add(acc, self.field.mul(lambda[r], self.get(r, c)))
                })
            })
            .collect())
    }

    /// Serializes to the matrix text format: first line `T m L`, then
    /// `T` lines of `m` space-separated entries.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.rows, self.cols, self.field.modulus());
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parses the matrix text format produced by [`Self::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::Parse(format!(
                "matrix header must be `T m L`, got `{header}`"
            )));
        }
        let parse = |s: &str| -> Result<u64> {
            s.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad integer `{s}`")))
        };
        let rows = parse(head[0])? as usize;
        let cols = parse(head[1])? as usize;
        let field = FieldConfig::new(parse(head[2])?)?;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing matrix row".into()))?;
            let row: Result<Vec<u64>> = line.split_whitespace().map(parse).collect();
            let row = row?;
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "row has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Self::new(rows, cols, entries, field)
    }
}

/// Row-echelon elimination over the work buffer; returns the rank.
fn gauss_rank(work: &mut [u64], rows: usize, cols: usize, field: FieldConfig) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows).find(|&r| work[r * cols + col] != 0);
        let Some(pivot) = pivot else { continue };
        if pivot != rank {
            for c in 0..cols {
                work.swap(pivot * cols + c, rank * cols + c);
            }
        }
        let inv = field
            .inv(work[rank * cols + col])
            .expect("pivot is nonzero");
        for c in col..cols {
            work[rank * cols + c] = field.mul(work[rank * cols + c], inv);
        }
        for r in 0..rows {
            if r != rank && work[r * cols + col] != 0 {
                let f = work[r * cols + col];
                for c in col..cols {
                    let sub = field.mul(f, work[rank * cols + c]);
                    work[r * cols + c] = field.sub(work[r * cols + c], sub);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// True iff `v` lies in the column span of `m`; implemented as
/// `rank([M | v]) == rank(M)`. A matrix with zero columns spans `{0}`.
pub fn in_span(v: &[u64], m: &FieldMatrix) -> Result<bool> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} does not match {} rows",
            v.len(),
            m.rows()
        )));
    }
    let base = m.rank();
    let mut aug = FieldMatrix::zeros(m.rows(), m.cols() + 1, m.field());
    for (r, &entry) in v.iter().enumerate() {
        for c in 0..m.cols() {
            aug.set(r, c, m.get(r, c));
        }
        aug.set(r, m.cols(), entry % m.field().modulus());
    }
    Ok(aug.rank() == base)
}

/// Finds a row vector `lambda` with `lambda * M = target`, if one
/// exists. Free variables are set to zero, so the answer is
/// deterministic.
pub fn solve_left(m: &FieldMatrix, target: &[u64]) -> Result<Option<Vec<u64>>> {
    if target.len() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "target length {} does not match {} columns",
            target.len(),
            m.cols()
        )));
    }
    Ok(solve_system(&m.transpose(), target))
}

/// Solves `A x = b`, returning the solution with free variables zero,
/// or `None` if the system is inconsistent.
fn solve_system(a: &FieldMatrix, b: &[u64]) -> Option<Vec<u64>> {
    debug_assert_eq!(b.len(), a.rows());
    let field = a.field();
    let rows = a.rows();
    let cols = a.cols();
    // Augmented matrix [A | b], reduced in place.
    let width = cols + 1;
    let mut work = vec![0u64; rows * width];
    for r in 0..rows {
        for c in 0..cols {
            work[r * width + c] = a.get(r, c);
        }
        work[r * width + cols] = b[r] % field.modulus();
    }
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| work[r * width + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for c in 0..width {
                work.swap(pivot * width + c, rank * width + c);
            }
        }
        let inv = field.inv(work[rank * width + col]).expect("nonzero pivot");
        for c in col..width {
            work[rank * width + c] = field.mul(work[rank * width + c], inv);
        }
        for r in 0..rows {
            if r != rank && work[r * width + col] != 0 {
                let f = work[r * width + col];
                for c in col..width {
                    let sub = field.mul(f, work[rank * width + c]);
                    work[r * width + c] = field.sub(work[r * width + c], sub);
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    // Inconsistent if a zero row has a nonzero right-hand side.
    for r in rank..rows {
        if work[r * width + cols] != 0 {
            return None;
        }
    }
    let mut x = vec![0u64; cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = work[r * width + cols];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(l: u64) -> FieldConfig {
        FieldConfig::new(l).unwrap()
    }

    #[test]
    fn default_field_is_257() {
        assert_eq!(FieldConfig::default().modulus(), 257);
    }

    #[test]
    fn rejects_composite_and_tiny_moduli() {
        assert!(FieldConfig::new(1).is_err());
        assert!(FieldConfig::new(0).is_err());
        assert!(FieldConfig::new(256).is_err());
        assert!(FieldConfig::new(91).is_err()); // 7 * 13
        assert!(FieldConfig::new(2).is_ok());
        assert!(FieldConfig::new(257).is_ok());
    }

    #[test]
    fn arithmetic_examples() {
        let f7 = gf(7);
        assert_eq!(f7.add(3, 5), 1);
        let f257 = gf(257);
        assert_eq!(f257.mul(0, 123), 0);
        // 40000 mod 257
        assert_eq!(f257.mul(200, 200), 165);
    }

    #[test]
    fn inverse_examples() {
        let f7 = gf(7);
        assert_eq!(f7.inv(1).unwrap(), 1);
        assert_eq!(f7.inv(2).unwrap(), 4);
        assert!(matches!(f7.inv(0), Err(Error::ZeroInverse { .. })));
    }

    #[test]
    fn inverse_exhaustive_small_fields() {
        for l in [2u64, 3, 5, 7, 11, 101, 257] {
            let f = gf(l);
            for a in 1..l {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, inv), 1, "a={a} L={l}");
            }
        }
    }

    #[test]
    fn rank_examples() {
        let f = gf(257);
        assert_eq!(FieldMatrix::zeros(2, 5, f).rank(), 0);
        assert_eq!(FieldMatrix::identity(2, gf(7)).rank(), 2);
        let m = FieldMatrix::from_rows(&[vec![1, 1, 0, 0, 0], vec![0, 0, 1, 1, 0]], f).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_of_empty_shapes() {
        let f = gf(257);
        assert_eq!(FieldMatrix::zeros(3, 0, f).rank(), 0);
        assert_eq!(FieldMatrix::zeros(0, 3, f).rank(), 0);
    }

    #[test]
    fn span_examples() {
        let f = gf(257);
        // Zero vector is in every span, including the empty one.
        let empty = FieldMatrix::zeros(2, 0, f);
        assert!(in_span(&[0, 0], &empty).unwrap());
        assert!(!in_span(&[1, 0], &empty).unwrap());

        let m = FieldMatrix::from_rows(&[vec![0, 0], vec![1, 0]], f).unwrap();
        assert!(!in_span(&[1, 0], &m).unwrap());

        let id = FieldMatrix::identity(2, f);
        assert!(in_span(&[1, 0], &id).unwrap());

        assert!(matches!(
            in_span(&[1, 0, 0], &id),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn solve_left_examples() {
        let f = gf(7);
        let id = FieldMatrix::identity(2, f);
        assert_eq!(solve_left(&id, &[5, 3]).unwrap(), Some(vec![5, 3]));

        let m = FieldMatrix::from_rows(&[vec![1, 1], vec![0, 0]], f).unwrap();
        assert_eq!(solve_left(&m, &[0, 1]).unwrap(), None);
        let lambda = solve_left(&m, &[2, 2]).unwrap().unwrap();
        assert_eq!(m.left_mul(&lambda).unwrap(), vec![2, 2]);
        assert_eq!(lambda[0], 2);
    }

    #[test]
    fn mul_vector_works() {
        let f = gf(257);
        let m = FieldMatrix::from_rows(&[vec![1, 1, 0], vec![0, 2, 1]], f).unwrap();
        assert_eq!(m.mul_vector(&[10, 20, 30]).unwrap(), vec![30, 70]);
        assert!(m.mul_vector(&[1, 2]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = gf(257);
        let m = FieldMatrix::from_rows(&[vec![1, 1, 0, 0, 0], vec![0, 0, 1, 1, 0]], f).unwrap();
        let text = m.to_text();
        assert!(text.starts_with("2 5 257\n"));
        let back = FieldMatrix::from_text(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn text_rejects_bad_input() {
        assert!(FieldMatrix::from_text("").is_err());
        assert!(FieldMatrix::from_text("2 2\n1 0\n0 1\n").is_err());
        assert!(FieldMatrix::from_text("2 2 256\n1 0\n0 1\n").is_err());
        assert!(FieldMatrix::from_text("2 2 257\n1 0\n").is_err());
        assert!(FieldMatrix::from_text("2 2 257\n1 0 3\n0 1 4\n").is_err());
        assert!(FieldMatrix::from_text("1 2 7\n9 0\n").is_err());
    }
}
