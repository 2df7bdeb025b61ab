//! Exact arithmetic and linear algebra over prime fields GF(p).
//!
//! Vectors are plain `Vec<u16>` slices whose entries are always reduced
//! mod p; [`Matrix`] carries its [`Field`] so mixed-field operations are
//! caught at the call site.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Largest modulus accepted by [`Field::new`].
pub const MAX_PRIME: u32 = 257;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} outside supported range 2..={MAX_PRIME}")]
    ModulusOutOfRange(u32),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("operands live in different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u32, u32),
    #[error("matrix lacks full column rank")]
    RankDeficient,
}

/// The prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    p: u16,
}

impl Field {
    pub fn new(p: u32) -> Result<Self, GaloisError> {
        if !(2..=MAX_PRIME).contains(&p) {
            return Err(GaloisError::ModulusOutOfRange(p));
        }
        if (2..p)
            .take_while(|d| d * d <= p)
            .any(|d| p.is_multiple_of(d))
        {
            return Err(GaloisError::NotPrime(p));
        }
        Ok(Field { p: p as u16 })
    }

    #[inline]
    pub fn order(self) -> u32 {
        u32::from(self.p)
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn reduce(self, v: i64) -> u16 {
        v.rem_euclid(i64::from(self.p)) as u16
    }

    pub fn element(self, v: i64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            field: self,
        }
    }

    /// Iterates over all field elements in the order 0, 1, ..., p-1.
    pub fn elements(self) -> impl Iterator<Item = u16> {
        0..self.p
    }

    #[inline]
    pub fn add(self, a: u16, b: u16) -> u16 {
        ((u32::from(a) + u32::from(b)) % self.order()) as u16
    }

    #[inline]
    pub fn sub(self, a: u16, b: u16) -> u16 {
        ((u32::from(a) + self.order() - u32::from(b)) % self.order()) as u16
    }

    #[inline]
    pub fn mul(self, a: u16, b: u16) -> u16 {
        ((u32::from(a) * u32::from(b)) % self.order()) as u16
    }

    #[inline]
    pub fn neg(self, a: u16) -> u16 {
        self.sub(0, a)
    }

    pub fn pow(self, base: u16, mut exp: u32) -> u16 {
        let mut acc = 1u16 % self.p;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u16) -> u16 {
        assert!(
            !a.is_multiple_of(self.p),
            "inverse of zero in GF({})",
            self.p
        );
        self.pow(a, self.order() - 2)
    }

    pub fn dot(self, a: &[u16], b: &[u16]) -> u16 {
        debug_assert_eq!(a.len(), b.len());
        let acc = a
            .iter()
            .zip(b)
            .fold(0u64, |acc, (&x, &y)| acc + u64::from(x) * u64::from(y));
        (acc % u64::from(self.p)) as u16
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// A single element of a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u16,
    field: Field,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u16 {
        self.value
    }

    #[inline]
    pub fn field(self) -> Field {
        self.field
    }

    pub fn inv(self) -> Option<FieldElement> {
        (self.value != 0).then(|| FieldElement {
            value: self.field.inv(self.value),
            field: self.field,
        })
    }

    fn same_field(self, other: FieldElement) -> Field {
        assert_eq!(self.field, other.field, "mixed-field arithmetic");
        self.field
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        let k = self.same_field(rhs);
        FieldElement {
            value: k.add(self.value, rhs.value),
            field: k,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        let k = self.same_field(rhs);
        FieldElement {
            value: k.sub(self.value, rhs.value),
            field: k,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        let k = self.same_field(rhs);
        FieldElement {
            value: k.mul(self.value, rhs.value),
            field: k,
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// Dense row-major matrix over GF(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(field: Field, rows: &[R]) -> Result<Self, GaloisError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(GaloisError::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend(r.iter().map(|&v| field.reduce(v)));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from already-reduced row-major data.
    pub fn from_data(
        field: Field,
        rows: usize,
        cols: usize,
        data: Vec<u16>,
    ) -> Result<Self, GaloisError> {
        if data.len() != rows * cols {
            return Err(GaloisError::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        let data = data
            .into_iter()
            .map(|v| field.reduce(i64::from(v)))
            .collect();
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Column vector with the given entries.
    pub fn column(field: Field, entries: &[u16]) -> Self {
        Matrix {
            field,
            rows: entries.len(),
            cols: 1,
            data: entries
                .iter()
                .map(|&v| field.reduce(i64::from(v)))
                .collect(),
        }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u16 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = self.field.reduce(v);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u16]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn column_values(&self, c: usize) -> Vec<u16> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Submatrix made of the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Matrix-vector product `self · x`.
    pub fn mul_vec(&self, x: &[u16]) -> Result<Vec<u16>, GaloisError> {
        if x.len() != self.cols {
            return Err(GaloisError::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok(self.row_iter().map(|r| self.field.dot(r, x)).collect())
    }

    /// Row-vector product `u^T · self`.
    pub fn left_mul_vec(&self, u: &[u16]) -> Result<Vec<u16>, GaloisError> {
        if u.len() != self.rows {
            return Err(GaloisError::DimensionMismatch {
                expected: self.rows,
                actual: u.len(),
            });
        }
        let k = self.field;
        let mut out = vec![0u16; self.cols];
        for (r, &ur) in u.iter().enumerate() {
            if ur == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o = k.add(*o, k.mul(ur, m));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, GaloisError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(GaloisError::DimensionMismatch {
                expected: self.cols,
                actual: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for r in 0..self.rows {
            let row = rhs.left_mul_vec(self.row(r))?;
            out.data[r * rhs.cols..(r + 1) * rhs.cols].copy_from_slice(&row);
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix, GaloisError> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(GaloisError::DimensionMismatch {
                expected: self.rows,
                actual: rhs.rows,
            });
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(rhs.row(r));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    fn check_field(&self, other: &Matrix) -> Result<(), GaloisError> {
        if self.field != other.field {
            return Err(GaloisError::FieldMismatch(
                self.field.order(),
                other.field.order(),
            ));
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.field, self.cols);
        for r in self.row_iter() {
            ech.insert(r, 0);
        }
        ech.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Reduced row echelon form with zero rows dropped.
    pub fn rref(&self) -> Matrix {
        let mut ech = Echelon::new(self.field, self.cols);
        for r in self.row_iter() {
            ech.insert(r, 0);
        }
        let rows = ech.sorted_rows();
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for (coeffs, _) in &rows {
            data.extend_from_slice(coeffs);
        }
        Matrix {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Canonical basis of the right kernel `{x : self · x = 0}`: the RREF of
    /// any spanning set, so every vector's leading nonzero entry is 1.
    pub fn kernel_basis(&self) -> Vec<Vec<u16>> {
        let k = self.field;
        let reduced = self.rref();
        let pivots: Vec<usize> = reduced
            .row_iter()
            .map(|r| {
                r.iter()
                    .position(|&v| v != 0)
                    .expect("rref rows are nonzero")
            })
            .collect();
        let mut raw = Matrix::zeros(k, 0, self.cols);
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u16; self.cols];
            v[free] = 1;
            for (row, &pc) in reduced.row_iter().zip(&pivots) {
                v[pc] = k.neg(row[free]);
            }
            raw.data.extend_from_slice(&v);
            raw.rows += 1;
        }
        raw.rref().row_iter().map(<[u16]>::to_vec).collect()
    }

    /// Finds `u` with `u^T · self = target^T`, lexicographically smallest
    /// under 0 < 1 < ... < p-1, or `None` when `target` is outside the row
    /// space.
    pub fn solve_left(&self, target: &[u16]) -> Result<Option<Vec<u16>>, GaloisError> {
        if target.len() != self.cols {
            return Err(GaloisError::DimensionMismatch {
                expected: self.cols,
                actual: target.len(),
            });
        }
        Ok(lex_min_solution(&self.transpose(), target))
    }

    /// Finds `v` with `self · v = 0` and `eps^T · v = 1`, lexicographically
    /// smallest; `None` when every kernel vector is orthogonal to `eps`.
    ///
    /// A zero-row matrix is accepted (empty constraint set).
    pub fn kernel_witness(&self, eps: &[u16]) -> Result<Option<Vec<u16>>, GaloisError> {
        if eps.len() != self.cols {
            return Err(GaloisError::DimensionMismatch {
                expected: self.cols,
                actual: eps.len(),
            });
        }
        let mut system = self.clone();
        system
            .data
            .extend(eps.iter().map(|&v| self.field.reduce(i64::from(v))));
        system.rows += 1;
        let mut rhs = vec![0u16; self.rows];
        rhs.push(1);
        Ok(lex_min_solution(&system, &rhs))
    }

    /// Extends a full-column-rank `d × e` matrix to an invertible `d × d`
    /// one whose first `e` columns are `self`.
    ///
    /// Rows are scanned top-down to pick `e` independent pivot rows; the
    /// completion columns are the standard basis vectors of the remaining
    /// rows, in index order.
    pub fn extend_to_invertible(&self) -> Result<Matrix, GaloisError> {
        if self.cols > self.rows || self.rank() != self.cols {
            return Err(GaloisError::RankDeficient);
        }
        let mut ech = Echelon::new(self.field, self.cols);
        let mut completion = Vec::new();
        for (i, r) in self.row_iter().enumerate() {
            if !ech.insert(r, 0).increased_rank() {
                completion.push(i);
            }
        }
        let mut ext = Matrix::zeros(self.field, self.rows, completion.len());
        for (j, &i) in completion.iter().enumerate() {
            ext.data[i * completion.len() + j] = 1;
        }
        let out = self.hstack(&ext)?;
        debug_assert!(out.is_invertible());
        Ok(out)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.row_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r:?}")?;
        }
        write!(f, "]")
    }
}

/// Outcome of inserting one equation into an [`Echelon`] system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Insert {
    /// New pivot created.
    Pivot,
    /// Equation was implied by the system.
    Redundant,
    /// Equation contradicts the system (reduced to `0 = c`, `c != 0`).
    Inconsistent,
}

impl Insert {
    fn increased_rank(self) -> bool {
        self == Insert::Pivot
    }
}

/// Incrementally maintained fully-reduced echelon form of a linear system
/// `coeffs · x = rhs`.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    field: Field,
    width: usize,
    // (pivot column, normalized coefficients, rhs)
    rows: Vec<(usize, Vec<u16>, u16)>,
}

impl Echelon {
    pub(crate) fn new(field: Field, width: usize) -> Self {
        Echelon {
            field,
            width,
            rows: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `(coeffs, rhs)` against the current pivots.
    fn reduce(&self, coeffs: &[u16], rhs: u16) -> (Vec<u16>, u16) {
        let k = self.field;
        let mut c = coeffs.to_vec();
        let mut r = rhs;
        for (pc, prow, prhs) in &self.rows {
            let factor = c[*pc];
            if factor == 0 {
                continue;
            }
            for (x, &y) in c.iter_mut().zip(prow) {
                *x = k.sub(*x, k.mul(factor, y));
            }
            r = k.sub(r, k.mul(factor, *prhs));
        }
        (c, r)
    }

    pub(crate) fn insert(&mut self, coeffs: &[u16], rhs: u16) -> Insert {
        debug_assert_eq!(coeffs.len(), self.width);
        let k = self.field;
        let (mut c, mut r) = self.reduce(coeffs, rhs);
        let Some(pc) = c.iter().position(|&v| v != 0) else {
            return if r == 0 {
                Insert::Redundant
            } else {
                Insert::Inconsistent
            };
        };
        let scale = k.inv(c[pc]);
        for x in c.iter_mut() {
            *x = k.mul(*x, scale);
        }
        r = k.mul(r, scale);
        for (_, prow, prhs) in self.rows.iter_mut() {
            let factor = prow[pc];
            if factor == 0 {
                continue;
            }
            for (x, &y) in prow.iter_mut().zip(&c) {
                *x = k.sub(*x, k.mul(factor, y));
            }
            *prhs = k.sub(*prhs, k.mul(factor, r));
        }
        self.rows.push((pc, c, r));
        Insert::Pivot
    }

    /// Value of coordinate `i` if the system pins it down.
    fn determined_value(&self, i: usize) -> Option<u16> {
        let mut e = vec![0u16; self.width];
        e[i] = 1;
        let (c, r) = self.reduce(&e, 0);
        c.iter().all(|&v| v == 0).then(|| self.field.neg(r))
    }

    fn sorted_rows(&self) -> Vec<(Vec<u16>, u16)> {
        let mut rows: Vec<_> = self.rows.clone();
        rows.sort_by_key(|(pc, _, _)| *pc);
        rows.into_iter().map(|(_, c, r)| (c, r)).collect()
    }
}

/// Lexicographically smallest `x` with `a · x = b`, or `None`.
///
/// Coordinates are fixed greedily in index order: a coordinate that the
/// system (plus earlier choices) leaves free takes 0, a determined one takes
/// its forced value.
pub(crate) fn lex_min_solution(a: &Matrix, b: &[u16]) -> Option<Vec<u16>> {
    debug_assert_eq!(a.rows(), b.len());
    let mut ech = Echelon::new(a.field(), a.cols());
    for (row, &rhs) in a.row_iter().zip(b) {
        if ech.insert(row, rhs) == Insert::Inconsistent {
            return None;
        }
    }
    let mut x = vec![0u16; a.cols()];
    for (i, xi) in x.iter_mut().enumerate() {
        match ech.determined_value(i) {
            Some(v) => *xi = v,
            None => {
                let mut e = vec![0u16; a.cols()];
                e[i] = 1;
                let outcome = ech.insert(&e, 0);
                debug_assert_eq!(outcome, Insert::Pivot);
            }
        }
    }
    Some(x)
}
