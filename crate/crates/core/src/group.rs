//! Arithmetic in the four families of extraspecial p-groups.
//!
//! Each group is generated by `A_1..A_n, B_1..B_n, C` with `C` central of
//! order p, `[A_i, A_j] = [B_i, B_j] = 1` and `[A_i, B_j] = C^{δ_ij}` where
//! `[g, h] = g⁻¹h⁻¹gh`. Elements are kept in the canonical form
//! `B_1^{s_1}···B_n^{s_n} · A_1^{r_1}···A_n^{r_n} · C^t`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, FpMatrix, FpVector, Prime};
use crate::forms::{FormData, FormError, LinearForm, QuadraticForm, SymplecticForm};
use crate::subgroup::Subgroup;

/// Largest group order enumerated by default.
pub const DEFAULT_CAP: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("family {family} requires {requirement}, got p = {p}")]
    FamilyPrimeMismatch {
        family: Family,
        p: u32,
        requirement: &'static str,
    },
    #[error("n must be positive")]
    ZeroRank,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("element {0} does not belong to this group")]
    ForeignElement(String),
    #[error("group order {order} exceeds enumeration cap {cap}")]
    CapExceeded { order: u64, cap: u64 },
    #[error("cannot parse element: {0}")]
    Parse(String),
    #[error("unknown family {0:?}; expected one of 2+, 2-, p+, p-")]
    UnknownFamily(String),
    #[error("form derivation inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// `2^{1+2n}_+ = D_8 * ··· * D_8`
    TwoPlus,
    /// `2^{1+2n}_- = Q_8 * D_8 * ··· * D_8`
    TwoMinus,
    /// `p^{1+2n}_+`, exponent p
    PPlus,
    /// `p^{1+2n}_-`, exponent p²
    PMinus,
}

impl Family {
    /// `A_1^p = C` in this family.
    fn a1_carry(self) -> bool {
        matches!(self, Family::TwoMinus | Family::PMinus)
    }

    /// `B_1^p = C` in this family.
    fn b1_carry(self) -> bool {
        matches!(self, Family::TwoMinus)
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::TwoPlus => "2+",
            Family::TwoMinus => "2-",
            Family::PPlus => "p+",
            Family::PMinus => "p-",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, GroupError> {
        match s {
            "2+" => Ok(Family::TwoPlus),
            "2-" => Ok(Family::TwoMinus),
            "p+" => Ok(Family::PPlus),
            "p-" => Ok(Family::PMinus),
            other => Err(GroupError::UnknownFamily(other.to_string())),
        }
    }
}

/// An element in canonical form `B^s A^r C^t`.
///
/// The derived ordering is lexicographic on `(s, r, t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Element {
    pub s: Vec<u32>,
    pub r: Vec<u32>,
    pub t: u32,
}

impl Element {
    pub fn identity(n: usize) -> Self {
        Element {
            s: vec![0; n],
            r: vec![0; n],
            t: 0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.t == 0 && self.s.iter().chain(&self.r).all(|&x| x == 0)
    }

    pub fn is_central(&self) -> bool {
        self.s.iter().chain(&self.r).all(|&x| x == 0)
    }
}

/// Textual notation: `B^(s_1,..,s_n) A^(r_1,..,r_n) C^t`, e.g. `B^(1,0) A^(0,0) C^2`.
impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(
            f,
            "B^({}) A^({}) C^{}",
            join(&self.s),
            join(&self.r),
            self.t
        )
    }
}

impl FromStr for Element {
    type Err = GroupError;
    fn from_str(text: &str) -> Result<Self, GroupError> {
        let err = || GroupError::Parse(text.to_string());
        let mut parts = text.split_whitespace();
        let block = |part: Option<&str>, prefix: &str| -> Result<Vec<u32>, GroupError> {
            let inner = part
                .and_then(|x| x.strip_prefix(prefix))
                .and_then(|x| x.strip_prefix("^("))
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(err)?;
            inner
                .split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| err()))
                .collect()
        };
        let s = block(parts.next(), "B")?;
        let r = block(parts.next(), "A")?;
        let t = parts
            .next()
            .and_then(|x| x.strip_prefix("C^"))
            .and_then(|x| x.parse::<u32>().ok())
            .ok_or_else(err)?;
        if parts.next().is_some() || s.len() != r.len() {
            return Err(err());
        }
        Ok(Element { s, r, t })
    }
}

/// One of the groups `2^{1+2n}_±` or `p^{1+2n}_±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupSpec {
    pub p: Prime,
    pub n: usize,
    pub family: Family,
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.family {
            Family::TwoPlus | Family::PPlus => '+',
            Family::TwoMinus | Family::PMinus => '-',
        };
        write!(f, "{}^(1+{}){}", self.p, 2 * self.n, sign)
    }
}

impl GroupSpec {
    pub fn new(p: u32, n: usize, family: Family) -> Result<Self, GroupError> {
        let prime = Prime::new(p)?;
        if n == 0 {
            return Err(GroupError::ZeroRank);
        }
        match (family, p == 2) {
            (Family::TwoPlus | Family::TwoMinus, false) => Err(GroupError::FamilyPrimeMismatch {
                family,
                p,
                requirement: "p = 2",
            }),
            (Family::PPlus | Family::PMinus, true) => Err(GroupError::FamilyPrimeMismatch {
                family,
                p,
                requirement: "odd p",
            }),
            _ => Ok(GroupSpec {
                p: prime,
                n,
                family,
            }),
        }
    }

    pub fn prime(&self) -> u32 {
        self.p.get()
    }

    pub fn order(&self) -> u64 {
        (self.prime() as u64).pow(1 + 2 * self.n as u32)
    }

    pub fn check_cap(&self, cap: u64) -> Result<(), GroupError> {
        if self.order() > cap {
            Err(GroupError::CapExceeded {
                order: self.order(),
                cap,
            })
        } else {
            Ok(())
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        let p = self.prime();
        g.s.len() == self.n
            && g.r.len() == self.n
            && g.t < p
            && g.s.iter().chain(&g.r).all(|&x| x < p)
    }

    fn ensure(&self, g: &Element) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::ForeignElement(g.to_string()))
        }
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.n)
    }

    /// `A_i` for `1 ≤ i ≤ n`.
    pub fn a(&self, i: usize) -> Element {
        let mut g = self.identity();
        g.r[i - 1] = 1;
        g
    }

    /// `B_i` for `1 ≤ i ≤ n`.
    pub fn b(&self, i: usize) -> Element {
        let mut g = self.identity();
        g.s[i - 1] = 1;
        g
    }

    pub fn c(&self) -> Element {
        self.c_pow(1)
    }

    pub fn c_pow(&self, t: u32) -> Element {
        let mut g = self.identity();
        g.t = t % self.prime();
        g
    }

    /// Generators in the order `A_1..A_n, B_1..B_n`.
    pub fn generators(&self) -> Vec<Element> {
        (1..=self.n)
            .map(|i| self.a(i))
            .chain((1..=self.n).map(|i| self.b(i)))
            .collect()
    }

    /// Product in canonical form.
    ///
    /// `B^s A^r C^t · B^{s'} A^{r'} C^{t'} = B^{s+s'} A^{r+r'} C^{t+t'+r·s'+carries}`,
    /// where a carry is raised each time an exponent of `A_1` (families `2-`, `p-`)
    /// or `B_1` (family `2-`) wraps past p.
    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        self.try_mul(g, h).expect("operands belong to the group")
    }

    pub fn try_mul(&self, g: &Element, h: &Element) -> Result<Element, GroupError> {
        self.ensure(g)?;
        self.ensure(h)?;
        let p = self.prime() as u64;
        let mut t = g.t as u64 + h.t as u64;
        for i in 0..self.n {
            t += g.r[i] as u64 * h.s[i] as u64;
        }
        if self.family.a1_carry() && g.r[0] + h.r[0] >= self.prime() {
            t += 1;
        }
        if self.family.b1_carry() && g.s[0] + h.s[0] >= self.prime() {
            t += 1;
        }
        let add = |a: &[u32], b: &[u32]| {
            a.iter()
                .zip(b)
                .map(|(&x, &y)| (x + y) % self.prime())
                .collect()
        };
        Ok(Element {
            s: add(&g.s, &h.s),
            r: add(&g.r, &h.r),
            t: (t % p) as u32,
        })
    }

    pub fn inv(&self, g: &Element) -> Element {
        let p = self.p;
        let mut x = Element {
            s: g.s.iter().map(|&v| p.neg(v)).collect(),
            r: g.r.iter().map(|&v| p.neg(v)).collect(),
            t: 0,
        };
        let prod = self.mul(g, &x);
        x.t = p.neg(prod.t);
        x
    }

    pub fn power(&self, g: &Element, k: u64) -> Element {
        let mut acc = self.identity();
        let mut base = g.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `[g, h] = g⁻¹h⁻¹gh`.
    pub fn commutator(&self, g: &Element, h: &Element) -> Element {
        let gh = self.mul(g, h);
        let hg = self.mul(h, g);
        self.mul(&self.inv(&hg), &gh)
    }

    /// `g⁻¹ x g`.
    pub fn conjugate(&self, x: &Element, g: &Element) -> Element {
        self.mul(&self.mul(&self.inv(g), x), g)
    }

    pub fn element_order(&self, g: &Element) -> u64 {
        let mut k = 1;
        let mut x = g.clone();
        while !x.is_identity() {
            x = self.mul(&x, g);
            k += 1;
        }
        k
    }

    /// The image `ψ(g) = (s, r)` in V.
    pub fn psi(&self, g: &Element) -> FpVector {
        FpVector::new(self.p, g.s.iter().chain(&g.r).copied().collect())
    }

    /// The element `B^s A^r` lying over `v`, with C-exponent 0.
    pub fn lift(&self, v: &FpVector) -> Element {
        let c = v.coords();
        Element {
            s: c[..self.n].to_vec(),
            r: c[self.n..].to_vec(),
            t: 0,
        }
    }

    /// All elements in lexicographic order of `(s, r, t)`.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        let n = self.n;
        let p = self.p;
        FpVector::all(p, 2 * n).flat_map(move |v| {
            let base = self.lift(&v);
            (0..p.get()).map(move |t| Element { t, ..base.clone() })
        })
    }

    /// Forms evaluated from group operations on the standard basis of V.
    pub fn derive_forms(&self) -> Result<FormData, GroupError> {
        let d = 2 * self.n;
        let basis: Vec<Element> = (0..d)
            .map(|i| self.lift(&FpVector::unit(self.p, d, i)))
            .collect();
        let central_exponent = |g: &Element| -> Result<u32, GroupError> {
            if g.is_central() {
                Ok(g.t)
            } else {
                Err(GroupError::Inconsistent(format!("{g} is not central")))
            }
        };
        let mut gram = FpMatrix::zero(self.p, d, d);
        for i in 0..d {
            for j in 0..d {
                gram.set(
                    i,
                    j,
                    central_exponent(&self.commutator(&basis[i], &basis[j]))?,
                );
            }
        }
        let f = SymplecticForm::new(gram)?;
        if !f.is_nondegenerate() {
            return Err(GroupError::Inconsistent(
                "commutator form is degenerate".into(),
            ));
        }
        let mut q = None;
        let mut lambda = None;
        if self.prime() == 2 {
            let mut coeffs = FpMatrix::zero(self.p, d, d);
            for i in 0..d {
                let sq_i = central_exponent(&self.power(&basis[i], 2))?;
                coeffs.set(i, i, sq_i);
                for j in (i + 1)..d {
                    let sum = self.mul(&basis[i], &basis[j]);
                    let sq_ij = central_exponent(&self.power(&sum, 2))?;
                    let sq_j = central_exponent(&self.power(&basis[j], 2))?;
                    coeffs.set(i, j, sq_ij ^ sq_i ^ sq_j);
                }
            }
            let qf = QuadraticForm::new(coeffs)?;
            if qf.polar_form() != f {
                return Err(GroupError::Inconsistent(
                    "polar form of Q differs from commutator form".into(),
                ));
            }
            q = Some(qf);
        } else {
            let coeffs: Vec<u32> = basis
                .iter()
                .map(|g| central_exponent(&self.power(g, self.prime() as u64)))
                .collect::<Result<_, _>>()?;
            let lf = LinearForm::new(FpVector::new(self.p, coeffs))?;
            if self.family == Family::PMinus && lf.eval(&self.psi(&self.a(1))) != 1 {
                return Err(GroupError::Inconsistent("λ(ψA_1) ≠ 1".into()));
            }
            lambda = Some(lf);
        }
        Ok(FormData { f, q, lambda })
    }

    /// Exhaustive check that `Z(P) = P' = Φ(P) = ⟨C⟩` has order p.
    pub fn verify_extraspecial(&self, cap: u64) -> Result<ExtraspecialReport, GroupError> {
        self.check_cap(cap)?;
        let whole = Subgroup::whole(*self);
        let z = Subgroup::closure(*self, &[self.c()]);
        let center = whole.center();
        let derived = whole.derived_subgroup();
        let frattini = whole.frattini();
        Ok(ExtraspecialReport {
            order: whole.order() as u64,
            center_order: center.order() as u64,
            center_is_c: center == z,
            derived_is_c: derived == z,
            frattini_is_c: frattini == z,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtraspecialReport {
    pub order: u64,
    pub center_order: u64,
    pub center_is_c: bool,
    pub derived_is_c: bool,
    pub frattini_is_c: bool,
}

impl ExtraspecialReport {
    pub fn passed(&self) -> bool {
        self.center_is_c && self.derived_is_c && self.frattini_is_c
    }
}
