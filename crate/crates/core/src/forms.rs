//! Alternate, quadratic and linear forms on V = F_p^{2n}.
//!
//! Coordinates on V are ordered `(s_1..s_n, r_1..r_n)`, dual to
//! `(ψB_1..ψB_n, ψA_1..ψA_n)`. With this ordering the form coming from the
//! group satisfies `f(ψA_i, ψB_j) = δ_ij`, so the standard Gram matrix is
//! `[[0, -I], [I, 0]]`.

use thiserror::Error;

use crate::field::{FieldError, FpMatrix, FpVector, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("form is degenerate")]
    Degenerate,
    #[error("gram matrix is not alternating")]
    NotAlternating,
    #[error("quadratic forms are only supported for p = 2, got p = {0}")]
    NotCharacteristicTwo(u32),
    #[error("linear forms attached to the group require odd p, got p = 2")]
    NotOddCharacteristic,
    #[error("zero count {zeros} matches neither Arf type for 2n = {dim}")]
    MalformedQuadratic { zeros: u64, dim: usize },
}

/// An alternating bilinear form given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticForm {
    gram: FpMatrix,
}

impl SymplecticForm {
    pub fn new(gram: FpMatrix) -> Result<Self, FormError> {
        let n = gram.rows();
        if gram.cols() != n {
            return Err(FieldError::DimensionMismatch {
                expected: n,
                got: gram.cols(),
            }
            .into());
        }
        let p = gram.prime();
        for i in 0..n {
            if gram.get(i, i) != 0 {
                return Err(FormError::NotAlternating);
            }
            for j in 0..i {
                if gram.get(i, j) != p.neg(gram.get(j, i)) {
                    return Err(FormError::NotAlternating);
                }
            }
        }
        Ok(SymplecticForm { gram })
    }

    /// The standard form of rank 2n, `f(e_{n+i}, e_j) = δ_ij`.
    pub fn standard(p: Prime, n: usize) -> Self {
        let mut gram = FpMatrix::zero(p, 2 * n, 2 * n);
        for i in 0..n {
            gram.set(i, n + i, p.neg(1));
            gram.set(n + i, i, 1);
        }
        SymplecticForm { gram }
    }

    pub fn gram(&self) -> &FpMatrix {
        &self.gram
    }

    pub fn prime(&self) -> Prime {
        self.gram.prime()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// `vᵀ · gram · w`.
    pub fn eval(&self, v: &FpVector, w: &FpVector) -> Result<u32, FormError> {
        let d = self.dim();
        for x in [v, w] {
            if x.len() != d {
                return Err(FieldError::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                }
                .into());
            }
            if x.prime() != self.prime() {
                return Err(
                    FieldError::ModulusMismatch(self.prime().get(), x.prime().get()).into(),
                );
            }
        }
        Ok(v.dot(&self.gram.mul_vec(w)))
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.is_invertible()
    }

    /// Gram matrix of the restriction to the span of `basis` (columns).
    pub fn restrict(&self, basis: &[FpVector]) -> Result<SymplecticForm, FormError> {
        let b = FpMatrix::from_columns(self.prime(), self.dim(), basis);
        SymplecticForm::new(b.transpose().mul(&self.gram).mul(&b))
    }

    /// Change-of-basis matrix `M` with `Mᵀ · gram · M` equal to the standard
    /// form. Columns `0..n` are the "B" vectors and `n..2n` the "A" vectors,
    /// paired by `f(a_i, b_i) = 1`.
    pub fn symplectic_basis(&self) -> Result<FpMatrix, FormError> {
        if !self.is_nondegenerate() {
            return Err(FormError::Degenerate);
        }
        let p = self.prime();
        let d = self.dim();
        let f = |v: &FpVector, w: &FpVector| v.dot(&self.gram.mul_vec(w));
        let mut remaining: Vec<FpVector> = (0..d).map(|i| FpVector::unit(p, d, i)).collect();
        let mut bs = Vec::new();
        let mut as_ = Vec::new();
        while let Some(pos) = remaining.iter().position(|v| !v.is_zero()) {
            let b = remaining.remove(pos);
            let partner = remaining
                .iter()
                .position(|y| f(y, &b) != 0)
                .ok_or(FormError::Degenerate)?;
            let y = remaining.remove(partner);
            let a = y.scale(p.inv(f(&y, &b)).expect("nonzero pairing"));
            // project the rest onto the orthogonal complement of span(a, b)
            for w in remaining.iter_mut() {
                let c_a = f(w, &b);
                let c_b = p.neg(f(w, &a));
                *w = w.sub(&a.scale(c_a)).sub(&b.scale(c_b));
            }
            bs.push(b);
            as_.push(a);
        }
        let cols: Vec<FpVector> = bs.into_iter().chain(as_).collect();
        if cols.len() != d {
            return Err(FormError::Degenerate);
        }
        Ok(FpMatrix::from_columns(p, d, &cols))
    }

    /// Whether `m` preserves the form: `mᵀ · gram · m = gram`.
    pub fn is_preserved_by(&self, m: &FpMatrix) -> bool {
        m.transpose().mul(&self.gram).mul(m) == self.gram
    }
}

/// Quadratic form over F_2, `Q(v) = Σ_{i≤j} c_ij v_i v_j`, stored upper-triangular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    coeffs: FpMatrix,
}

impl QuadraticForm {
    pub fn new(coeffs: FpMatrix) -> Result<Self, FormError> {
        let p = coeffs.prime().get();
        if p != 2 {
            return Err(FormError::NotCharacteristicTwo(p));
        }
        if coeffs.rows() != coeffs.cols() {
            return Err(FieldError::DimensionMismatch {
                expected: coeffs.rows(),
                got: coeffs.cols(),
            }
            .into());
        }
        let mut upper = coeffs.clone();
        for i in 0..coeffs.rows() {
            for j in 0..i {
                // fold lower-triangular entries into the upper triangle
                let v = (upper.get(j, i) + coeffs.get(i, j)) % 2;
                upper.set(j, i, v);
                upper.set(i, j, 0);
            }
        }
        Ok(QuadraticForm { coeffs: upper })
    }

    pub fn coeffs(&self) -> &FpMatrix {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn eval(&self, v: &FpVector) -> Result<u32, FormError> {
        if v.prime().get() != 2 {
            return Err(FormError::NotCharacteristicTwo(v.prime().get()));
        }
        if v.len() != self.dim() {
            return Err(FieldError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            }
            .into());
        }
        let c = v.coords();
        let mut acc = 0;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                acc ^= self.coeffs.get(i, j) & c[i] & c[j];
            }
        }
        Ok(acc)
    }

    /// The associated alternating form `f(v,w) = Q(v+w) + Q(v) + Q(w)`.
    pub fn polar_form(&self) -> SymplecticForm {
        let d = self.dim();
        let mut gram = FpMatrix::zero(self.coeffs.prime(), d, d);
        for i in 0..d {
            for j in (i + 1)..d {
                gram.set(i, j, self.coeffs.get(i, j));
                gram.set(j, i, self.coeffs.get(i, j));
            }
        }
        SymplecticForm { gram }
    }

    /// `Q ∘ m` as a quadratic form.
    pub fn compose(&self, m: &FpMatrix) -> QuadraticForm {
        let d = self.dim();
        let p = self.coeffs.prime();
        let mut out = FpMatrix::zero(p, d, d);
        for i in 0..d {
            out.set(i, i, self.eval(&m.column(i)).expect("matching dimension"));
        }
        let polar = self.polar_form();
        for i in 0..d {
            for j in (i + 1)..d {
                out.set(
                    i,
                    j,
                    polar
                        .eval(&m.column(i), &m.column(j))
                        .expect("matching dimension"),
                );
            }
        }
        QuadraticForm { coeffs: out }
    }

    pub fn zero_count(&self) -> u64 {
        FpVector::all(self.coeffs.prime(), self.dim())
            .filter(|v| self.eval(v).expect("matching dimension") == 0)
            .count() as u64
    }

    pub fn is_preserved_by(&self, m: &FpMatrix) -> bool {
        &self.compose(m) == self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArfType {
    Plus,
    Minus,
}

/// Arf type by exhaustive zero count: `2^{2n-1} ± 2^{n-1}` zeros.
pub fn arf_type(q: &QuadraticForm) -> Result<(ArfType, u64), FormError> {
    if !q.polar_form().is_nondegenerate() {
        return Err(FormError::Degenerate);
    }
    let dim = q.dim();
    let n = (dim / 2) as u32;
    let zeros = q.zero_count();
    let big = 1u64 << (2 * n - 1);
    let small = 1u64 << (n - 1);
    if zeros == big + small {
        Ok((ArfType::Plus, zeros))
    } else if zeros == big - small {
        Ok((ArfType::Minus, zeros))
    } else {
        Err(FormError::MalformedQuadratic { zeros, dim })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: FpVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaClass {
    Zero,
    Nonzero,
}

impl LinearForm {
    pub fn new(coeffs: FpVector) -> Result<Self, FormError> {
        if coeffs.prime().get() == 2 {
            return Err(FormError::NotOddCharacteristic);
        }
        Ok(LinearForm { coeffs })
    }

    pub fn coeffs(&self) -> &FpVector {
        &self.coeffs
    }

    pub fn eval(&self, v: &FpVector) -> u32 {
        self.coeffs.dot(v)
    }

    pub fn classify(&self) -> LambdaClass {
        if self.coeffs.is_zero() {
            LambdaClass::Zero
        } else {
            LambdaClass::Nonzero
        }
    }

    /// `λ ∘ m`.
    pub fn compose(&self, m: &FpMatrix) -> LinearForm {
        LinearForm {
            coeffs: m.transpose().mul_vec(&self.coeffs),
        }
    }

    pub fn kernel(&self) -> Vec<FpVector> {
        let row = FpMatrix::from_columns(
            self.coeffs.prime(),
            self.coeffs.len(),
            std::slice::from_ref(&self.coeffs),
        )
        .transpose();
        row.nullspace()
    }
}

/// Every form attached to an extraspecial group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormData {
    pub f: SymplecticForm,
    pub q: Option<QuadraticForm>,
    pub lambda: Option<LinearForm>,
}
