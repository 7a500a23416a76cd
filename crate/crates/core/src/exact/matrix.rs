//! Dense matrices over Q(ζ_n) and exact linear solving.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CycloScalar, ExactError};

/// Row-major matrix whose entries all live in the same cyclotomic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    conductor: u32,
    data: Vec<CycloScalar>,
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq)]
pub enum SolutionSet {
    Inconsistent {
        rank: usize,
    },
    Solutions {
        /// One solution column per right-hand-side column; free variables set to zero.
        particular: ExactMatrix,
        kernel: Vec<Vec<CycloScalar>>,
        rank: usize,
    },
}

impl SolutionSet {
    pub fn rank(&self) -> usize {
        match self {
            SolutionSet::Inconsistent { rank } | SolutionSet::Solutions { rank, .. } => *rank,
        }
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: ExactMatrix,
    pub pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        conductor: u32,
        data: Vec<CycloScalar>,
    ) -> Result<Self, ExactError> {
        if data.len() != rows * cols {
            return Err(ExactError::Shape(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if let Some(bad) = data.iter().find(|e| e.conductor() != conductor) {
            return Err(ExactError::ConductorMismatch(conductor, bad.conductor()));
        }
        Ok(Self {
            rows,
            cols,
            conductor,
            data,
        })
    }

    pub fn from_rows(rows: Vec<Vec<CycloScalar>>, conductor: u32) -> Result<Self, ExactError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(ExactError::Shape(format!(
                    "row {} has length {}, expected {}",
                    i,
                    r.len(),
                    ncols
                )));
            }
        }
        Self::new(nrows, ncols, conductor, rows.into_iter().flatten().collect())
    }

    pub fn from_column(v: &[CycloScalar], conductor: u32) -> Result<Self, ExactError> {
        Self::new(v.len(), 1, conductor, v.to_vec())
    }

    pub fn zeros(rows: usize, cols: usize, conductor: u32) -> Self {
        Self {
            rows,
            cols,
            conductor,
            data: vec![CycloScalar::zero(conductor); rows * cols],
        }
    }

    pub fn identity(n: usize, conductor: u32) -> Self {
        let mut m = Self::zeros(n, n, conductor);
        for i in 0..n {
            m.data[i * n + i] = CycloScalar::one(conductor);
        }
        m
    }

    pub fn diagonal(entries: &[CycloScalar], conductor: u32) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n, conductor);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloScalar) {
        assert_eq!(v.conductor(), self.conductor, "cyclotomic conductor mismatch");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[CycloScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<CycloScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[CycloScalar] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<CycloScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            conductor: self.conductor,
            data,
        }
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(CycloScalar::conj).collect(),
            ..self.clone()
        }
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(CycloScalar::is_real)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn with_conductor(&self, m: u32) -> Result<Self, ExactError> {
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            conductor: m,
            data: self
                .data
                .iter()
                .map(|e| e.with_conductor(m))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        if self.cols != other.rows {
            return Err(ExactError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.conductor != other.conductor {
            return Err(ExactError::ConductorMismatch(self.conductor, other.conductor));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = CycloScalar::zero(self.conductor);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                data.push(acc);
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            conductor: self.conductor,
            data,
        })
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&CycloScalar, &CycloScalar) -> CycloScalar,
    ) -> Result<Self, ExactError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(ExactError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.conductor != other.conductor {
            return Err(ExactError::ConductorMismatch(self.conductor, other.conductor));
        }
        Ok(Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
            ..self.clone()
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &CycloScalar) -> Self {
        Self {
            data: self.data.iter().map(|e| e * s).collect(),
            ..self.clone()
        }
    }

    pub fn mul_vec(&self, v: &[CycloScalar]) -> Result<Vec<CycloScalar>, ExactError> {
        if v.len() != self.cols {
            return Err(ExactError::Shape(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = CycloScalar::zero(self.conductor);
                for (a, b) in self.row(i).iter().zip(v) {
                    acc = acc.checked_add(&a.checked_mul(b)?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows, self.conductor);
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("square matrix power");
        }
        acc
    }

    /// Stacks matrices with the same column count vertically.
    pub fn vstack(blocks: &[ExactMatrix]) -> Result<Self, ExactError> {
        let first = blocks
            .first()
            .ok_or_else(|| ExactError::Shape("empty vstack".into()))?;
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != first.cols || b.conductor != first.conductor {
                return Err(ExactError::Shape("vstack blocks disagree".into()));
            }
            rows += b.rows;
            data.extend_from_slice(&b.data);
        }
        Ok(Self {
            rows,
            cols: first.cols,
            conductor: first.conductor,
            data,
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(Self::vstack(&[self.transpose(), other.transpose()])?.transpose())
    }

    /// Gauss–Jordan elimination to reduced row echelon form.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).invert().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let prod = &f * m.get(r, j);
                    if !prod.is_zero() {
                        let v = m.get(i, j) - &prod;
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<CycloScalar>> {
        let Rref { matrix, pivots } = self.rref();
        kernel_from_rref(&matrix, &pivots, self.cols)
    }

    pub fn determinant(&self) -> Result<CycloScalar, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Shape("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = CycloScalar::one(self.conductor);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(CycloScalar::zero(self.conductor));
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.invert()?;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) * &inv;
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Shape("inverse of a non-square matrix".into()));
        }
        match solve_linear(self, &Self::identity(self.rows, self.conductor))? {
            SolutionSet::Solutions {
                particular, rank, ..
            } if rank == self.rows => Ok(particular),
            _ => Err(ExactError::Singular),
        }
    }

    pub fn embed_numeric(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).embed_numeric())
    }
}

fn kernel_from_rref(m: &ExactMatrix, pivots: &[usize], ncols: usize) -> Vec<Vec<CycloScalar>> {
    let n = m.conductor;
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![CycloScalar::zero(n); ncols];
        v[free] = CycloScalar::one(n);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m.get(r, free);
        }
        basis.push(v);
    }
    basis
}

/// Solves A·X = B exactly: a particular solution plus a kernel basis, or
/// "inconsistent".
pub fn solve_linear(a: &ExactMatrix, b: &ExactMatrix) -> Result<SolutionSet, ExactError> {
    if a.rows != b.rows {
        return Err(ExactError::Shape(format!(
            "A has {} rows but B has {}",
            a.rows, b.rows
        )));
    }
    if a.conductor != b.conductor {
        return Err(ExactError::ConductorMismatch(a.conductor, b.conductor));
    }
    let aug = a.hstack(b)?;
    let Rref { matrix, pivots } = aug.rref();
    let rank = pivots.iter().filter(|&&p| p < a.cols).count();
    if pivots.iter().any(|&p| p >= a.cols) {
        return Ok(SolutionSet::Inconsistent { rank });
    }
    let mut particular = ExactMatrix::zeros(a.cols, b.cols, a.conductor);
    for (r, &pc) in pivots.iter().enumerate() {
        for k in 0..b.cols {
            particular.set(pc, k, matrix.get(r, a.cols + k).clone());
        }
    }
    let kernel = kernel_from_rref(&matrix, &pivots, a.cols);
    Ok(SolutionSet::Solutions {
        particular,
        kernel,
        rank,
    })
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
