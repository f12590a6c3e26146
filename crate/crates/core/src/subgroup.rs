//! Subgroups of an extraspecial group, stored as explicit sorted element sets.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::field::{FpMatrix, FpVector};
use crate::group::{Element, Family, GroupSpec};

#[derive(Debug, Clone)]
pub struct Subgroup {
    spec: GroupSpec,
    generators: Vec<Element>,
    elements: Vec<Element>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// Smallest subgroup containing `generators`, by breadth-first saturation.
    pub fn closure(spec: GroupSpec, generators: &[Element]) -> Self {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let id = spec.identity();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = spec.mul(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        Subgroup {
            spec,
            generators: generators.to_vec(),
            elements: seen.into_iter().collect(),
        }
    }

    pub fn whole(spec: GroupSpec) -> Self {
        Subgroup {
            spec,
            generators: spec.generators(),
            elements: spec.elements().collect(),
        }
    }

    pub fn trivial(spec: GroupSpec) -> Self {
        Self::closure(spec, &[])
    }

    /// `Z = ⟨C⟩`.
    pub fn center_of_p(spec: GroupSpec) -> Self {
        Self::closure(spec, &[spec.c()])
    }

    /// The full preimage under ψ of the subspace spanned by `basis`.
    pub fn preimage(spec: GroupSpec, basis: &[FpVector]) -> Self {
        let mut gens: Vec<Element> = basis.iter().map(|v| spec.lift(v)).collect();
        gens.push(spec.c());
        Self::closure(spec, &gens)
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let elements: Vec<Element> = self
            .elements
            .iter()
            .filter(|g| other.contains(g))
            .cloned()
            .collect();
        Subgroup {
            spec: self.spec,
            generators: elements.clone(),
            elements,
        }
    }

    /// `⟨self, other⟩`.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let gens: Vec<Element> = self
            .generators
            .iter()
            .chain(&other.generators)
            .cloned()
            .collect();
        Self::closure(self.spec, &gens)
    }

    pub fn center(&self) -> Subgroup {
        let s = &self.spec;
        let elements: Vec<Element> = self
            .elements
            .iter()
            .filter(|x| self.elements.iter().all(|y| s.mul(x, y) == s.mul(y, x)))
            .cloned()
            .collect();
        Self::closure(self.spec, &elements)
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let s = &self.spec;
        let mut comms = BTreeSet::new();
        for x in &self.elements {
            for y in &self.elements {
                comms.insert(s.commutator(x, y));
            }
        }
        Self::closure(self.spec, &comms.into_iter().collect::<Vec<_>>())
    }

    /// `Φ(S) = S'·S^p`, valid for p-groups.
    pub fn frattini(&self) -> Subgroup {
        let s = &self.spec;
        let p = s.prime() as u64;
        let mut gens = BTreeSet::new();
        for x in &self.elements {
            gens.insert(s.power(x, p));
            for y in &self.elements {
                gens.insert(s.commutator(x, y));
            }
        }
        Self::closure(self.spec, &gens.into_iter().collect::<Vec<_>>())
    }

    pub fn is_abelian(&self) -> bool {
        let s = &self.spec;
        self.generators
            .iter()
            .all(|x| self.generators.iter().all(|y| s.mul(x, y) == s.mul(y, x)))
    }

    pub fn exponent_divides_p(&self) -> bool {
        let s = &self.spec;
        self.elements
            .iter()
            .all(|x| s.power(x, s.prime() as u64).is_identity())
    }

    pub fn is_elementary_abelian(&self) -> bool {
        self.is_abelian() && self.exponent_divides_p()
    }

    /// Index p in `whole`.
    pub fn is_maximal_in(&self, whole: &Subgroup) -> bool {
        self.is_subset_of(whole) && whole.order() == self.order() * self.spec.prime() as usize
    }

    /// ψ-images of the elements, reduced to a basis.
    pub fn psi_basis(&self) -> Vec<FpVector> {
        let mut basis: Vec<FpVector> = Vec::new();
        for g in &self.generators {
            let v = self.spec.psi(g);
            if !crate::field::in_span(&basis, &v) {
                basis.push(v);
            }
        }
        basis
    }
}

/// Ω₁(P): generated by the elements of order p.
pub fn omega1(spec: GroupSpec) -> Subgroup {
    let gens: Vec<Element> = spec
        .elements()
        .filter(|g| spec.element_order(g) == spec.prime() as u64)
        .collect();
    Subgroup::closure(spec, &gens)
}

/// `Y = Z(Ω₁(P))`.
pub fn y_subgroup(spec: GroupSpec) -> Subgroup {
    omega1(spec).center()
}

/// `C_P(g)`, by exhaustive commutation.
pub fn centralizer_in_p(spec: GroupSpec, g: &Element) -> Subgroup {
    let elements: Vec<Element> = spec
        .elements()
        .filter(|h| spec.mul(g, h) == spec.mul(h, g))
        .collect();
    Subgroup::closure(spec, &elements)
}

/// `C_P(g)` as the ψ-preimage of the f-orthogonal complement of ψ(g).
pub fn centralizer_via_form(spec: GroupSpec, g: &Element) -> Subgroup {
    let forms = spec.derive_forms().expect("forms of a valid spec");
    let w = forms.f.gram().mul_vec(&spec.psi(g));
    let row = FpMatrix::from_columns(spec.p, 2 * spec.n, &[w]).transpose();
    Subgroup::preimage(spec, &row.nullspace())
}

/// All maximal subgroups of P: preimages of the hyperplanes of V.
pub fn maximal_subgroups(spec: GroupSpec) -> Vec<Subgroup> {
    let d = 2 * spec.n;
    FpVector::all(spec.p, d)
        .filter(|v| !v.is_zero() && v.coords().iter().find(|&&c| c != 0) == Some(&1))
        .map(|functional| {
            let row = FpMatrix::from_columns(spec.p, d, &[functional]).transpose();
            Subgroup::preimage(spec, &row.nullspace())
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralizerFrattiniReport {
    /// One of D_8, E, M(p³); excluded from the centralizer statement.
    pub exceptional: bool,
    pub order_p_elements: usize,
    /// Order-p elements whose centralizer has Frattini subgroup different from Z.
    pub failures: Vec<Element>,
    /// B_1 if it fails, otherwise the first failure.
    pub witness: Option<Element>,
}

impl CentralizerFrattiniReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn is_small_exception(spec: GroupSpec) -> bool {
    spec.n == 1 && spec.family != Family::TwoMinus
}

/// For every order-p element g, compare Φ(C_P(g)) with Z.
pub fn verify_centralizer_frattini(spec: GroupSpec) -> CentralizerFrattiniReport {
    let z = Subgroup::center_of_p(spec);
    let p = spec.prime() as u64;
    let order_p: Vec<Element> = spec
        .elements()
        .filter(|g| spec.element_order(g) == p)
        .collect();
    let failures: Vec<Element> = order_p
        .iter()
        .filter(|g| centralizer_in_p(spec, g).frattini() != z)
        .cloned()
        .collect();
    let b1 = spec.b(1);
    let witness = if failures.contains(&b1) {
        Some(b1)
    } else {
        failures.first().cloned()
    };
    CentralizerFrattiniReport {
        exceptional: is_small_exception(spec),
        order_p_elements: order_p.len(),
        failures,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u32, n: usize, family: Family) -> GroupSpec {
        GroupSpec::new(p, n, family).unwrap()
    }

    #[test]
    fn closures() {
        let d8 = spec(2, 1, Family::TwoPlus);
        assert_eq!(Subgroup::closure(d8, &[d8.c()]).order(), 2);
        assert_eq!(Subgroup::trivial(d8).order(), 1);
        assert_eq!(
            Subgroup::closure(d8, &[d8.a(1), d8.b(1)]),
            Subgroup::whole(d8)
        );
    }

    #[test]
    fn closure_idempotent_and_lagrange() {
        let s = spec(3, 2, Family::PMinus);
        let h = Subgroup::closure(s, &[s.a(1), s.b(2)]);
        let again = Subgroup::closure(s, h.elements());
        assert_eq!(h, again);
        assert_eq!(s.order() as usize % h.order(), 0);
    }

    #[test]
    fn characteristic_subgroups() {
        let d8 = spec(2, 1, Family::TwoPlus);
        let whole = Subgroup::whole(d8);
        let z = Subgroup::center_of_p(d8);
        assert_eq!(whole.center(), z);
        assert_eq!(whole.derived_subgroup(), z);
        let ea = Subgroup::closure(d8, &[d8.b(1), d8.c()]);
        assert_eq!(ea.frattini().order(), 1);
    }

    #[test]
    fn omega_and_y() {
        for (p, n) in [(3, 1), (5, 1), (3, 2)] {
            let s = spec(p, n, Family::PMinus);
            let y = y_subgroup(s);
            assert_eq!(y, Subgroup::closure(s, &[s.b(1), s.c()]));
            let om = omega1(s);
            assert_eq!(om.order() * p as usize, s.order() as usize);
            assert!(om.exponent_divides_p());
        }
        let d8 = spec(2, 1, Family::TwoPlus);
        assert_eq!(y_subgroup(d8), Subgroup::center_of_p(d8));
        let e = spec(3, 1, Family::PPlus);
        assert_eq!(omega1(e), Subgroup::whole(e));
    }

    #[test]
    fn centralizers() {
        let d8 = spec(2, 1, Family::TwoPlus);
        assert_eq!(centralizer_in_p(d8, &d8.c()), Subgroup::whole(d8));
        assert_eq!(
            centralizer_in_p(d8, &d8.a(1)),
            Subgroup::closure(d8, &[d8.a(1), d8.c()])
        );
        let s = spec(3, 2, Family::PPlus);
        for g in s.elements().filter(|g| !g.is_central()).step_by(11) {
            let c = centralizer_in_p(s, &g);
            assert_eq!(c.order(), 81);
            assert_eq!(c, centralizer_via_form(s, &g));
        }
    }

    #[test]
    fn elementary_abelian_and_maximal() {
        let m27 = spec(3, 1, Family::PMinus);
        let whole = Subgroup::whole(m27);
        let y = Subgroup::closure(m27, &[m27.b(1), m27.c()]);
        assert!(y.is_elementary_abelian() && y.is_maximal_in(&whole));
        let d8 = spec(2, 1, Family::TwoPlus);
        let z = Subgroup::center_of_p(d8);
        assert!(z.is_elementary_abelian() && !z.is_maximal_in(&Subgroup::whole(d8)));
        let pp = spec(3, 2, Family::PPlus);
        let f = Subgroup::closure(pp, &[pp.b(1), pp.b(2), pp.c()]);
        assert!(f.is_elementary_abelian());
        assert_eq!(maximal_subgroups(pp).len(), 40);
    }

    #[test]
    fn small_groups_fail_at_b1() {
        let r = verify_centralizer_frattini(spec(2, 2, Family::TwoPlus));
        assert!(r.holds());
        let d8 = spec(2, 1, Family::TwoPlus);
        let r = verify_centralizer_frattini(d8);
        assert!(!r.holds());
        assert_eq!(r.witness, Some(d8.b(1)));
        let q8 = verify_centralizer_frattini(spec(2, 1, Family::TwoMinus));
        assert!(q8.holds());
        assert_eq!(q8.order_p_elements, 1);
    }
}
