//! Exact linear algebra over a prime field.
//!
//! Every value carries its modulus at runtime. Operations that combine
//! values over different primes are rejected with [`FieldError::ModulusMismatch`]
//! (or panic, for the operator overloads).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is singular")]
    Singular,
}

/// A prime modulus, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b) % self.0
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a % self.0 == 0 {
            None
        } else {
            Some(self.pow(a, self.0 as u64 - 2))
        }
    }

    /// Representative in the symmetric range, used for printing `p - 1` as `-1`.
    pub fn signed(self, a: u32) -> i64 {
        let a = a as i64;
        if 2 * a > self.0 as i64 {
            a - self.0 as i64
        } else {
            a
        }
    }
}

impl TryFrom<u32> for Prime {
    type Error = FieldError;
    fn try_from(p: u32) -> Result<Self, FieldError> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A residue mod p together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    p: Prime,
}

impl Fp {
    pub fn new(value: i64, p: Prime) -> Self {
        Fp {
            value: p.reduce(value),
            p,
        }
    }

    pub fn zero(p: Prime) -> Self {
        Fp { value: 0, p }
    }

    pub fn one(p: Prime) -> Self {
        Fp {
            value: 1 % p.get(),
            p,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Prime {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: Fp) -> Result<Prime, FieldError> {
        if self.p == other.p {
            Ok(self.p)
        } else {
            Err(FieldError::ModulusMismatch(self.p.get(), other.p.get()))
        }
    }

    pub fn try_add(self, other: Fp) -> Result<Fp, FieldError> {
        let p = self.check(other)?;
        Ok(Fp {
            value: p.add(self.value, other.value),
            p,
        })
    }

    pub fn try_mul(self, other: Fp) -> Result<Fp, FieldError> {
        let p = self.check(other)?;
        Ok(Fp {
            value: p.mul(self.value, other.value),
            p,
        })
    }

    pub fn inv(self) -> Option<Fp> {
        self.p.inv(self.value).map(|value| Fp { value, p: self.p })
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.try_add(rhs).expect("mixed-modulus addition")
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: self.p.neg(self.value),
            p: self.p,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.try_mul(rhs).expect("mixed-modulus multiplication")
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A column vector over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpVector {
    p: Prime,
    coords: Vec<u32>,
}

impl FpVector {
    pub fn new(p: Prime, coords: Vec<u32>) -> Self {
        let coords = coords.into_iter().map(|c| c % p.get()).collect();
        FpVector { p, coords }
    }

    pub fn from_signed(p: Prime, coords: &[i64]) -> Self {
        FpVector {
            p,
            coords: coords.iter().map(|&c| p.reduce(c)).collect(),
        }
    }

    pub fn zero(p: Prime, len: usize) -> Self {
        FpVector {
            p,
            coords: vec![0; len],
        }
    }

    pub fn unit(p: Prime, len: usize, i: usize) -> Self {
        let mut v = Self::zero(p, len);
        v.coords[i] = 1;
        v
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> Fp {
        Fp {
            value: self.coords[i],
            p: self.p,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &FpVector) -> FpVector {
        assert_eq!(self.p, other.p, "mixed-modulus vector addition");
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| self.p.add(a, b))
            .collect();
        FpVector { p: self.p, coords }
    }

    pub fn sub(&self, other: &FpVector) -> FpVector {
        self.add(&other.scale(self.p.neg(1)))
    }

    pub fn scale(&self, c: u32) -> FpVector {
        let coords = self.coords.iter().map(|&a| self.p.mul(a, c)).collect();
        FpVector { p: self.p, coords }
    }

    pub fn dot(&self, other: &FpVector) -> u32 {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(0, |acc, (&a, &b)| self.p.add(acc, self.p.mul(a, b)))
    }

    /// All p^len vectors, in lexicographic order of coordinates.
    pub fn all(p: Prime, len: usize) -> impl Iterator<Item = FpVector> {
        let total = (p.get() as u64).pow(len as u32);
        (0..total).map(move |mut k| {
            let mut coords = vec![0u32; len];
            for c in coords.iter_mut().rev() {
                *c = (k % p.get() as u64) as u32;
                k /= p.get() as u64;
            }
            FpVector { p, coords }
        })
    }
}

/// Dense row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zero(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(p: Prime, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| p.reduce(x)))
            .collect();
        FpMatrix {
            p,
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_columns(p: Prime, rows: usize, columns: &[FpVector]) -> Self {
        let mut m = Self::zero(p, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for i in 0..rows {
                m.data[i * m.cols + j] = col.coords[i];
            }
        }
        m
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p.get();
    }

    pub fn row(&self, i: usize) -> FpVector {
        FpVector {
            p: self.p,
            coords: self.data[i * self.cols..(i + 1) * self.cols].to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> FpVector {
        FpVector {
            p: self.p,
            coords: (0..self.rows).map(|i| self.get(i, j)).collect(),
        }
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = Self::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn try_mul(&self, other: &FpMatrix) -> Result<FpMatrix, FieldError> {
        if self.p != other.p {
            return Err(FieldError::ModulusMismatch(self.p.get(), other.p.get()));
        }
        if self.cols != other.rows {
            return Err(FieldError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let p = self.p.get() as u64;
        let mut out = Self::zero(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u64 * other.get(k, j) as u64;
                }
                out.data[i * other.cols + j] = (acc % p) as u32;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        self.try_mul(other).expect("matrix product")
    }

    pub fn mul_vec(&self, v: &FpVector) -> FpVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        let coords = (0..self.rows).map(|i| self.row(i).dot(v)).collect();
        FpVector { p: self.p, coords }
    }

    /// Row echelon reduction in place. Pivots on the lowest-index nonzero entry
    /// of each column; returns the pivot columns.
    fn reduce_rows(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, row * self.cols + j);
                }
            }
            let inv = p.inv(self.get(row, col)).expect("nonzero pivot");
            for j in 0..self.cols {
                let v = p.mul(self.get(row, j), inv);
                self.data[row * self.cols + j] = v;
            }
            for r in 0..self.rows {
                if r != row {
                    let factor = self.get(r, col);
                    if factor != 0 {
                        for j in 0..self.cols {
                            let v = p.sub(self.get(r, j), p.mul(factor, self.get(row, j)));
                            self.data[r * self.cols + j] = v;
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce_rows().len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<FpMatrix, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Self::zero(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1;
        }
        let pivots = aug.reduce_rows();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(FieldError::Singular);
        }
        let mut inv = Self::zero(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.data[i * n + j] = aug.get(i, n + j);
            }
        }
        Ok(inv)
    }

    /// Basis of the right null space {x : A x = 0}, one vector per free column,
    /// with that free variable set to 1 and the other free variables 0.
    pub fn nullspace(&self) -> Vec<FpVector> {
        let mut m = self.clone();
        let pivots = m.reduce_rows();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut x = FpVector::zero(self.p, self.cols);
                x.coords[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    x.coords[pc] = self.p.neg(m.get(r, fc));
                }
                x
            })
            .collect()
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Solve `A x = b`. Free variables are set to zero; the returned solution is
/// checked against the system before it is handed back.
pub fn solve_linear(a: &FpMatrix, b: &FpVector) -> Result<FpVector, FieldError> {
    if a.p != b.p {
        return Err(FieldError::ModulusMismatch(a.p.get(), b.p.get()));
    }
    if a.rows != b.len() {
        return Err(FieldError::DimensionMismatch {
            expected: a.rows,
            got: b.len(),
        });
    }
    let p = a.p;
    let mut aug = FpMatrix::zero(p, a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug.data[i * (a.cols + 1) + j] = a.get(i, j);
        }
        aug.data[i * (a.cols + 1) + a.cols] = b.coords[i];
    }
    let pivots = aug.reduce_rows();
    if pivots.last() == Some(&a.cols) {
        return Err(FieldError::NoSolution);
    }
    let mut x = FpVector::zero(p, a.cols);
    for (r, &pc) in pivots.iter().enumerate() {
        x.coords[pc] = aug.get(r, a.cols);
    }
    if &a.mul_vec(&x) != b {
        return Err(FieldError::NoSolution);
    }
    Ok(x)
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[FpVector], v: &FpVector) -> bool {
    if basis.is_empty() {
        return v.is_zero();
    }
    let a = FpMatrix::from_columns(v.p, v.len(), basis);
    solve_linear(&a, v).is_ok()
}

/// Greedy basis extraction: indices of the vectors that are independent of
/// the ones before them.
pub fn independent_subset(vectors: &[FpVector]) -> Vec<usize> {
    let mut chosen: Vec<FpVector> = Vec::new();
    let mut idx = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if !in_span(&chosen, v) {
            chosen.push(v.clone());
            idx.push(i);
        }
    }
    idx
}
