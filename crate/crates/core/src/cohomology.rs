//! Polynomial classes in the mod-p cohomology of an elementary abelian group.
//!
//! Only the symmetric algebra `S(F*) ⊆ H*(F)` is modelled: every variable is a
//! first Chern class of a linear character and sits in cohomological degree 2.
//! A linear map on F induces a linear substitution of the variables.

use std::collections::BTreeMap;
use std::fmt;

use crate::field::{FpMatrix, FpVector, Prime};
use crate::group::{Element, GroupSpec};

/// A polynomial over F_p in named degree-2 generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPoly {
    p: Prime,
    names: Vec<String>,
    terms: BTreeMap<Vec<u32>, u32>,
}

/// A linear combination `Σ c_i x_i` of the generators; a class in H².
pub type DualVector = FpVector;

impl GradedPoly {
    pub fn zero(p: Prime, names: &[&str]) -> Self {
        GradedPoly {
            p,
            names: names.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: Prime, names: &[&str], c: i64) -> Self {
        let mut z = Self::zero(p, names);
        z.add_term(vec![0; names.len()], p.reduce(c));
        z
    }

    pub fn one(p: Prime, names: &[&str]) -> Self {
        Self::constant(p, names, 1)
    }

    pub fn variable(p: Prime, names: &[&str], i: usize) -> Self {
        let mut exps = vec![0; names.len()];
        exps[i] = 1;
        let mut z = Self::zero(p, names);
        z.add_term(exps, 1);
        z
    }

    pub fn linear(p: Prime, names: &[&str], form: &DualVector) -> Self {
        let mut z = Self::zero(p, names);
        for (i, &c) in form.coords().iter().enumerate() {
            let mut exps = vec![0; names.len()];
            exps[i] = 1;
            z.add_term(exps, c);
        }
        z
    }

    /// Build from explicit `(exponents, coefficient)` pairs.
    pub fn from_terms(p: Prime, names: &[&str], terms: &[(Vec<u32>, i64)]) -> Self {
        let mut z = Self::zero(p, names);
        for (e, c) in terms {
            assert_eq!(e.len(), names.len(), "exponent vector length");
            z.add_term(e.clone(), p.reduce(*c));
        }
        z
    }

    fn add_term(&mut self, exps: Vec<u32>, c: u32) {
        if c == 0 {
            return;
        }
        let p = self.p;
        let entry = self.terms.entry(exps.clone()).or_insert(0);
        *entry = p.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&exps);
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, u32> {
        &self.terms
    }

    pub fn coefficient(&self, exps: &[u32]) -> u32 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn compatible(&self, other: &GradedPoly) {
        assert_eq!(self.p, other.p, "mixed-modulus polynomials");
        assert_eq!(
            self.names, other.names,
            "polynomials over different variables"
        );
    }

    pub fn add(&self, other: &GradedPoly) -> GradedPoly {
        self.compatible(other);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> GradedPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.p.neg(*c);
        }
        out
    }

    pub fn sub(&self, other: &GradedPoly) -> GradedPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> GradedPoly {
        let mut out = Self {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), self.p.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &GradedPoly) -> GradedPoly {
        self.compatible(other);
        let p = self.p;
        let mut acc: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = acc.entry(e).or_insert(0);
                *slot = p.add(*slot, p.mul(c1, c2));
            }
        }
        acc.retain(|_, v| *v != 0);
        GradedPoly {
            p,
            names: self.names.clone(),
            terms: acc,
        }
    }

    pub fn pow(&self, mut k: u64) -> GradedPoly {
        let mut acc = GradedPoly {
            terms: BTreeMap::from([(vec![0; self.nvars()], 1 % self.p.get())]),
            ..self.clone()
        };
        acc.terms.retain(|_, v| *v != 0);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Polynomial degree if homogeneous (`None` for zero or mixed degrees).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Cohomological degree `2 · (polynomial degree)` for a homogeneous class.
    pub fn cohomological_degree(&self) -> Option<u32> {
        self.homogeneous_degree().map(|d| 2 * d)
    }

    pub fn homogeneous_component(&self, degree: u32) -> GradedPoly {
        let mut out = self.clone();
        out.terms.retain(|e, _| e.iter().sum::<u32>() == degree);
        out
    }

    /// Substitute `x_i ↦ substitution[i]` and expand.
    pub fn pullback(&self, substitution: &[DualVector]) -> GradedPoly {
        assert_eq!(substitution.len(), self.nvars(), "one image per variable");
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        let images: Vec<GradedPoly> = substitution
            .iter()
            .map(|v| GradedPoly::linear(self.p, &names, v))
            .collect();
        let mut out = GradedPoly::zero(self.p, &names);
        for (e, &c) in &self.terms {
            let mut term = GradedPoly::constant(self.p, &names, c as i64);
            for (img, &k) in images.iter().zip(e) {
                if k > 0 {
                    term = term.mul(&img.pow(k as u64));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Set the variables in `killed` to zero.
    pub fn restrict(&self, killed: &[usize]) -> GradedPoly {
        let mut out = self.clone();
        out.terms.retain(|e, _| killed.iter().all(|&i| e[i] == 0));
        out
    }

    /// Re-express over a larger variable list; every current name must occur in `names`.
    pub fn embed(&self, names: &[&str]) -> GradedPoly {
        let positions: Vec<usize> = self
            .names
            .iter()
            .map(|n| {
                names
                    .iter()
                    .position(|m| m == n)
                    .expect("variable present in target ring")
            })
            .collect();
        let mut out = GradedPoly::zero(self.p, names);
        for (e, &c) in &self.terms {
            let mut exps = vec![0; names.len()];
            for (&pos, &k) in positions.iter().zip(e) {
                exps[pos] = k;
            }
            out.add_term(exps, c);
        }
        out
    }
}

impl fmt::Display for GradedPoly {
    /// Terms by ascending degree; within a degree, larger powers of later
    /// variables first. Coefficients use the symmetric residue, so `p - 1`
    /// prints as a minus sign.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<(&Vec<u32>, &u32)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.iter().rev().cmp(a.iter().rev()))
        });
        for (k, (e, &c)) in terms.into_iter().enumerate() {
            let signed = self.p.signed(c);
            let (neg, mag) = (signed < 0, signed.unsigned_abs());
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.names[i].clone()
                    } else {
                        format!("{}^{}", self.names[i], k)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                f.write_str(&vars.join("·"))?;
            } else {
                write!(f, "{mag}·{}", vars.join("·"))?;
            }
        }
        Ok(())
    }
}

/// `∏_{μ ∈ F_p} (1 + μβ)^p`, the restriction to ⟨B_1, C⟩ of the total Chern
/// class of the sum of all linear characters of a group of order p³.
pub fn chern_total_regular(p: Prime) -> GradedPoly {
    let names = ["β"];
    let one = GradedPoly::one(p, &names);
    let beta = GradedPoly::variable(p, &names, 0);
    (0..p.get()).fold(one.clone(), |acc, mu| {
        acc.mul(&one.add(&beta.scale(mu)).pow(p.get() as u64))
    })
}

/// `1 - β^{p(p-1)}`.
pub fn chern_expected(p: Prime) -> GradedPoly {
    let q = p.get();
    GradedPoly::from_terms(p, &["β"], &[(vec![0], 1), (vec![q * (q - 1)], -1)])
}

pub fn verify_chern_identity(p: Prime) -> bool {
    chern_total_regular(p) == chern_expected(p)
}

/// Variable names `β1..βn, γ`.
pub fn evens_names(n: usize) -> Vec<String> {
    (1..=n)
        .map(|i| format!("β{i}"))
        .chain(std::iter::once("γ".to_string()))
        .collect()
}

/// `∏_{u ∈ U} (γ + u)` with `U = span(β_2..β_n)`, over the variables `β1..βn, γ`.
pub fn evens_norm_restriction(p: Prime, n: usize) -> GradedPoly {
    let owned = evens_names(n);
    let names: Vec<&str> = owned.iter().map(String::as_str).collect();
    let vars = n + 1;
    let mut acc = GradedPoly::one(p, &names);
    for coeffs in FpVector::all(p, n.saturating_sub(1)) {
        let mut form = vec![0; vars];
        form[1..n].copy_from_slice(coeffs.coords());
        form[n] = 1;
        acc = acc.mul(&GradedPoly::linear(p, &names, &FpVector::new(p, form)));
    }
    acc
}

/// The substitution `γ ↦ γ + β_1`, other variables fixed.
pub fn gamma_shift(p: Prime, n: usize) -> Vec<DualVector> {
    let vars = n + 1;
    let mut sub: Vec<DualVector> = (0..vars).map(|i| FpVector::unit(p, vars, i)).collect();
    sub[n] = sub[n].add(&FpVector::unit(p, vars, 0));
    sub
}

/// Substitution induced on the dual basis by a linear map of F whose matrix
/// `t` has row i equal to the coordinates of the image of basis element i.
/// The dual coordinate `x_j` pulls back to `Σ_i t[i][j] x_i`.
pub fn dual_substitution(t: &FpMatrix) -> Vec<DualVector> {
    (0..t.cols()).map(|j| t.column(j)).collect()
}

/// Matrix of `x ↦ g x g⁻¹` on the elementary abelian subgroup ⟨B_1..B_n, C⟩,
/// rows indexed by the basis `B_1..B_n, C`.
pub fn conjugation_matrix(spec: GroupSpec, g: &Element) -> FpMatrix {
    let n = spec.n;
    let basis: Vec<Element> = (1..=n)
        .map(|i| spec.b(i))
        .chain(std::iter::once(spec.c()))
        .collect();
    let rows: Vec<Vec<i64>> = basis
        .iter()
        .map(|x| {
            let y = spec.mul(&spec.mul(g, x), &spec.inv(g));
            assert!(y.r.iter().all(|&c| c == 0), "conjugate left ⟨B, C⟩");
            y.s.iter()
                .chain(std::iter::once(&y.t))
                .map(|&c| c as i64)
                .collect()
        })
        .collect();
    FpMatrix::from_rows(spec.p, &rows)
}

/// Restrictions of the p² linear characters of a group of order p³ to
/// ⟨B_1, C⟩, as a multiset of `(value on B_1, value on C)` written additively.
pub fn linear_character_restrictions(spec: GroupSpec) -> BTreeMap<(u32, u32), usize> {
    let p = spec.p;
    let mut counts = BTreeMap::new();
    let b1 = spec.psi(&spec.b(1));
    let c = spec.psi(&spec.c());
    for chi in FpVector::all(p, 2 * spec.n) {
        *counts.entry((chi.dot(&b1), chi.dot(&c))).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvensNormReport {
    pub eta: GradedPoly,
    pub pulled_back: GradedPoly,
    pub restricted: GradedPoly,
    pub restricted_pulled_back: GradedPoly,
    pub expected_restricted: GradedPoly,
    pub expected_restricted_pulled_back: GradedPoly,
}

impl EvensNormReport {
    pub fn distinct(&self) -> bool {
        self.restricted != self.restricted_pulled_back
    }

    pub fn matches_expected(&self) -> bool {
        self.restricted == self.expected_restricted
            && self.restricted_pulled_back == self.expected_restricted_pulled_back
    }
}

/// Restrict `η = ∏(γ+u)` and its pullback under `γ ↦ γ + β_1` to ⟨B_1, C⟩ by
/// killing `β_2..β_n`.
pub fn verify_evens_norm_action(
    p: Prime,
    n: usize,
    substitution: &[DualVector],
) -> EvensNormReport {
    let owned = evens_names(n);
    let names: Vec<&str> = owned.iter().map(String::as_str).collect();
    let eta = evens_norm_restriction(p, n);
    let pulled_back = eta.pullback(substitution);
    let killed: Vec<usize> = (1..n).collect();
    let degree = (p.get() as u64).pow(n as u32 - 1);
    let gamma = GradedPoly::variable(p, &names, n);
    let beta1 = GradedPoly::variable(p, &names, 0);
    EvensNormReport {
        restricted: eta.restrict(&killed),
        restricted_pulled_back: pulled_back.restrict(&killed),
        expected_restricted: gamma.pow(degree),
        expected_restricted_pulled_back: gamma.add(&beta1).pow(degree),
        eta,
        pulled_back,
    }
}
