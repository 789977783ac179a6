//! Exact dense matrix algebra over finite fields: reduced row-echelon form,
//! rank, kernels, solving, and random matrix generation.
//!
//! Everything is generic over [`FieldOps`] so the same elimination code
//! serves GF(q) matrices (flats, liftings) and GF(q^m) matrices (syndrome
//! systems in the rank-metric decoder).

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::gf::{ExtElem, ExtField, Fe, Field, GfError};

/// Errors from matrix operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinalgError {
    DimensionMismatch,
    ColumnMismatch,
    FieldMismatch,
    Singular,
    Inconsistent,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch => write!(f, "matrix dimensions do not match"),
            LinalgError::ColumnMismatch => write!(f, "column counts do not match"),
            LinalgError::FieldMismatch => write!(f, "matrices belong to different fields"),
            LinalgError::Singular => write!(f, "matrix is singular"),
            LinalgError::Inconsistent => write!(f, "linear system is inconsistent"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// The field-context interface elimination code needs.
pub trait FieldOps: PartialEq {
    type Elem: Clone + PartialEq + core::hash::Hash + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, GfError>;
    fn sample_elem<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::Elem;
}

impl FieldOps for Field {
    type Elem = Fe;

    fn zero(&self) -> Fe {
        Fe::ZERO
    }
    fn one(&self) -> Fe {
        Fe::ONE
    }
    fn is_zero(&self, a: &Fe) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        Field::add(self, *a, *b)
    }
    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        Field::sub(self, *a, *b)
    }
    fn neg(&self, a: &Fe) -> Fe {
        Field::neg(self, *a)
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        Field::mul(self, *a, *b)
    }
    fn inv(&self, a: &Fe) -> Result<Fe, GfError> {
        Field::inv(self, *a)
    }
    fn sample_elem<R: RngCore + ?Sized>(&self, rng: &mut R) -> Fe {
        Field::sample(self, rng)
    }
}

impl FieldOps for ExtField {
    type Elem = ExtElem;

    fn zero(&self) -> ExtElem {
        ExtField::zero(self)
    }
    fn one(&self) -> ExtElem {
        ExtField::one(self)
    }
    fn is_zero(&self, a: &ExtElem) -> bool {
        ExtField::is_zero(self, a)
    }
    fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtField::add(self, a, b)
    }
    fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtField::sub(self, a, b)
    }
    fn neg(&self, a: &ExtElem) -> ExtElem {
        ExtField::neg(self, a)
    }
    fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtField::mul(self, a, b)
    }
    fn inv(&self, a: &ExtElem) -> Result<ExtElem, GfError> {
        ExtField::inv(self, a)
    }
    fn sample_elem<R: RngCore + ?Sized>(&self, rng: &mut R) -> ExtElem {
        ExtField::sample(self, rng)
    }
}

/// A dense row-major matrix over a shared field context.
pub struct Matrix<F: FieldOps = Field> {
    field: Arc<F>,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: FieldOps> Clone for Matrix<F> {
    fn clone(&self) -> Self {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }
}

impl<F: FieldOps> PartialEq for Matrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.field == other.field
            && self.data == other.data
    }
}

impl<F: FieldOps> Eq for Matrix<F> {}

impl<F: FieldOps> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<F: FieldOps> core::hash::Hash for Matrix<F> {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

/// Result of reduction to reduced row-echelon form.
pub struct Rref<F: FieldOps = Field> {
    pub mat: Matrix<F>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl<F: FieldOps> Matrix<F> {
    pub fn zeros(field: Arc<F>, rows: usize, cols: usize) -> Self {
        let data = vec![field.zero(); rows * cols];
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(field: Arc<F>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            let one = m.field.one();
            m.set(i, i, one);
        }
        m
    }

    pub fn from_rows(field: Arc<F>, cols: usize, rows_data: Vec<Vec<F::Elem>>) -> Self {
        let rows = rows_data.len();
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_data {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend(r);
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn from_fn(
        field: Arc<F>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> F::Elem,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Uniformly random entries.
    pub fn random<R: RngCore + ?Sized>(
        field: Arc<F>,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let data = (0..rows * cols).map(|_| field.sample_elem(rng)).collect();
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Uniformly random matrix of full rank k, by rejection (expected fewer
    /// than two draws for any q ≥ 2).
    pub fn random_full_rank<R: RngCore + ?Sized>(
        field: Arc<F>,
        k: usize,
        n: usize,
        rng: &mut R,
    ) -> Self {
        assert!(k <= n, "full rank requires k <= n");
        loop {
            let m = Self::random(field.clone(), k, n, rng);
            if m.rank() == k {
                return m;
            }
        }
    }

    pub fn field(&self) -> &Arc<F> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<F::Elem> {
        self.row(i).to_vec()
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[F::Elem]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.field.is_zero(e))
    }

    fn check_field(&self, other: &Self) -> Result<(), LinalgError> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(LinalgError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch);
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch);
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.field.sub(a, b))
            .collect();
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch);
        }
        let f = &*self.field;
        let mut out = Self::zeros(self.field.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), &f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &F::Elem) -> Self {
        let data = self.data.iter().map(|a| self.field.mul(a, c)).collect();
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field.clone(), self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch);
        }
        let cols = self.cols + other.cols;
        Ok(Self::from_fn(self.field.clone(), self.rows, cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(LinalgError::ColumnMismatch);
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(self.field.clone(), r1 - r0, c1 - c0, |i, j| {
            self.get(r0 + i, c0 + j).clone()
        })
    }

    /// The unique reduced row-echelon form, with rank and pivot columns.
    /// Zero rows are kept, trailing.
    pub fn rref(&self) -> Rref<F> {
        let mut ech = Echelon::new(self.field.clone(), self.cols);
        for i in 0..self.rows {
            ech.absorb(self.row_vec(i));
        }
        let rank = ech.rank();
        let pivots = ech.pivots().to_vec();
        let mut rows_data = ech.into_rows();
        while rows_data.len() < self.rows {
            rows_data.push(vec![self.field.zero(); self.cols]);
        }
        Rref {
            mat: Matrix::from_rows(self.field.clone(), self.cols, rows_data),
            rank,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.field.clone(), self.cols);
        for i in 0..self.rows {
            ech.absorb(self.row_vec(i));
        }
        ech.rank()
    }

    /// Rank of the vertical stack of `self` and `other`.
    pub fn stack_rank(&self, other: &Self) -> Result<usize, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(LinalgError::ColumnMismatch);
        }
        let mut ech = Echelon::new(self.field.clone(), self.cols);
        for i in 0..self.rows {
            ech.absorb(self.row_vec(i));
        }
        for i in 0..other.rows {
            ech.absorb(other.row_vec(i));
        }
        Ok(ech.rank())
    }

    /// Canonical row-space representative: rref with zero rows dropped.
    pub fn row_space(&self) -> Matrix<F> {
        let mut ech = Echelon::new(self.field.clone(), self.cols);
        for i in 0..self.rows {
            ech.absorb(self.row_vec(i));
        }
        ech.to_matrix()
    }

    /// Basis of the right kernel {v : M v = 0}, returned as rows.
    pub fn kernel(&self) -> Matrix<F> {
        let f = &*self.field;
        let r = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|j| !r.pivots.contains(j)).collect();
        let mut rows_data = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![f.zero(); self.cols];
            v[fc] = f.one();
            for (ri, &pc) in r.pivots.iter().enumerate() {
                v[pc] = f.neg(r.mat.get(ri, fc));
            }
            rows_data.push(v);
        }
        Matrix::from_rows(self.field.clone(), self.cols, rows_data)
    }

    /// Solves x·M = rhs for a row vector x, if consistent.
    pub fn solve_left(&self, rhs: &[F::Elem]) -> Result<Vec<F::Elem>, LinalgError> {
        if rhs.len() != self.cols {
            return Err(LinalgError::DimensionMismatch);
        }
        // Row-reduce [M | I] and reduce rhs alongside.
        let f = &*self.field;
        let mut ech: Vec<(Vec<F::Elem>, Vec<F::Elem>)> = Vec::new(); // (row, combo)
        let mut pivots: Vec<usize> = Vec::new();
        for i in 0..self.rows {
            let mut row = self.row_vec(i);
            let mut combo = vec![f.zero(); self.rows];
            combo[i] = f.one();
            for (p, (erow, ecombo)) in pivots.iter().zip(ech.iter()) {
                let c = row[*p].clone();
                if f.is_zero(&c) {
                    continue;
                }
                for (a, b) in row.iter_mut().zip(erow.iter()) {
                    *a = f.sub(a, &f.mul(&c, b));
                }
                for (a, b) in combo.iter_mut().zip(ecombo.iter()) {
                    *a = f.sub(a, &f.mul(&c, b));
                }
            }
            if let Some(p) = row.iter().position(|e| !f.is_zero(e)) {
                let inv = f.inv(&row[p]).expect("pivot is nonzero");
                for a in row.iter_mut() {
                    *a = f.mul(a, &inv);
                }
                for a in combo.iter_mut() {
                    *a = f.mul(a, &inv);
                }
                // Keep sorted by pivot.
                let at = pivots.iter().position(|&x| x > p).unwrap_or(pivots.len());
                pivots.insert(at, p);
                ech.insert(at, (row, combo));
            }
        }
        let mut target = rhs.to_vec();
        let mut x = vec![f.zero(); self.rows];
        for (p, (erow, ecombo)) in pivots.iter().zip(ech.iter()) {
            let c = target[*p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (a, b) in target.iter_mut().zip(erow.iter()) {
                *a = f.sub(a, &f.mul(&c, b));
            }
            for (a, b) in x.iter_mut().zip(ecombo.iter()) {
                *a = f.add(a, &f.mul(&c, b));
            }
        }
        if target.iter().all(|e| f.is_zero(e)) {
            Ok(x)
        } else {
            Err(LinalgError::Inconsistent)
        }
    }

    /// Solves M·x = rhs for a column vector x, if consistent.
    pub fn solve_right(&self, rhs: &[F::Elem]) -> Result<Vec<F::Elem>, LinalgError> {
        self.transpose().solve_left(rhs)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch);
        }
        let id = Self::identity(self.field.clone(), self.rows);
        let aug = self.hstack(&id)?;
        let r = aug.rref();
        if r.rank != self.rows {
            return Err(LinalgError::Singular);
        }
        Ok(r.mat.submatrix(0, self.rows, self.cols, 2 * self.cols))
    }
}

/// Incrementally maintained reduced row-echelon form.
///
/// Rows are kept fully reduced and sorted by pivot column, so the content is
/// at all times the canonical rref of everything absorbed.
pub struct Echelon<F: FieldOps = Field> {
    field: Arc<F>,
    width: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: FieldOps> Echelon<F> {
    pub fn new(field: Arc<F>, width: usize) -> Self {
        Echelon {
            field,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }

    /// Reduces `row` against the current basis; returns the residue.
    pub fn reduce(&self, mut row: Vec<F::Elem>) -> Vec<F::Elem> {
        let f = &*self.field;
        for (p, erow) in self.pivots.iter().zip(self.rows.iter()) {
            let c = row[*p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (a, b) in row.iter_mut().zip(erow.iter()) {
                *a = f.sub(a, &f.mul(&c, b));
            }
        }
        row
    }

    /// True iff `row` lies in the current row space.
    pub fn contains(&self, row: &[F::Elem]) -> bool {
        let f = &*self.field;
        self.reduce(row.to_vec()).iter().all(|e| f.is_zero(e))
    }

    /// Absorbs a row; returns true when the rank grew.
    pub fn absorb(&mut self, row: Vec<F::Elem>) -> bool {
        assert_eq!(row.len(), self.width);
        let f = self.field.clone();
        let mut row = self.reduce(row);
        let p = match row.iter().position(|e| !f.is_zero(e)) {
            Some(p) => p,
            None => return false,
        };
        let inv = f.inv(&row[p]).expect("pivot is nonzero");
        for a in row.iter_mut() {
            *a = f.mul(a, &inv);
        }
        // Clear this column from the existing rows to stay fully reduced.
        for erow in self.rows.iter_mut() {
            let c = erow[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (a, b) in erow.iter_mut().zip(row.iter()) {
                *a = f.sub(a, &f.mul(&c, b));
            }
        }
        let at = self
            .pivots
            .iter()
            .position(|&x| x > p)
            .unwrap_or(self.pivots.len());
        self.pivots.insert(at, p);
        self.rows.insert(at, row);
        true
    }

    /// The rref with zero rows dropped.
    pub fn to_matrix(&self) -> Matrix<F> {
        Matrix::from_rows(self.field.clone(), self.width, self.rows.clone())
    }

    pub fn into_rows(self) -> Vec<Vec<F::Elem>> {
        self.rows
    }
}
