//! Fully enumerated finite groups: matrix groups over F_p and semidirect
//! products `P ⋊ ⟨α⟩`, with Sylow subgroups, normalizers, centralizers and
//! double cosets computed by exhaustive scans.
//!
//! Conjugates follow `P^g = g⁻¹ P g` throughout.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::{dual_substitution, GradedPoly};
use crate::field::{FieldError, FpMatrix, Prime};
use crate::group::{Element, Family, GroupSpec};
use crate::subgroup::{maximal_subgroups, omega1, verify_centralizer_frattini, Subgroup};
use crate::witt::Automorphism;

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Groups up to this order get a full multiplication table.
const TABLE_LIMIT: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("group order exceeds enumeration cap {cap}")]
    CapExceeded { cap: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("generator {0} is not invertible")]
    NotInvertible(usize),
    #[error("bad group input: {0}")]
    BadInput(String),
    #[error("embedding is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("embedding is not injective")]
    NotInjective,
    #[error("automorphism order {q} is not coprime to p = {p}")]
    OrderNotCoprime { q: u64, p: u32 },
    #[error("automorphism has order {actual}, not {claimed}")]
    OrderMismatch { claimed: u64, actual: u64 },
    #[error("Y subgroup checks need family p-, got {0}")]
    WrongFamily(Family),
}

/// How elements of an enumerated group are represented and multiplied.
pub trait Representation {
    type Elem: Clone + Eq + Hash + Ord + Debug;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn identity(&self) -> Self::Elem;
    fn describe(&self, e: &Self::Elem) -> String;
}

/// Square matrices over F_p, encoded row-major as bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixRep {
    pub p: Prime,
    pub dim: usize,
}

impl Representation for MatrixRep {
    type Elem = Vec<u8>;

    fn mul(&self, a: &Vec<u8>, b: &Vec<u8>) -> Vec<u8> {
        let d = self.dim;
        let p = self.p.get();
        let mut out = vec![0u8; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u32;
                for k in 0..d {
                    acc += a[i * d + k] as u32 * b[k * d + j] as u32;
                }
                out[i * d + j] = (acc % p) as u8;
            }
        }
        out
    }

    fn identity(&self) -> Vec<u8> {
        let d = self.dim;
        (0..d * d).map(|k| u8::from(k / d == k % d)).collect()
    }

    fn describe(&self, e: &Vec<u8>) -> String {
        let rows: Vec<String> = e
            .chunks(self.dim)
            .map(|r| r.iter().map(u8::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        format!("[{}]", rows.join("; "))
    }
}

impl MatrixRep {
    pub fn encode(&self, m: &FpMatrix) -> Vec<u8> {
        (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| m.get(i, j) as u8))
            .collect()
    }

    pub fn from_rows(&self, rows: &[Vec<i64>]) -> Vec<u8> {
        self.encode(&FpMatrix::from_rows(self.p, rows))
    }

    /// `I + E_ij` (0-based indices).
    pub fn transvection(&self, i: usize, j: usize) -> Vec<u8> {
        let mut m = self.identity();
        m[i * self.dim + j] = 1;
        m
    }
}

/// `P ⋊ ⟨α⟩` with `(g, i)(h, j) = (g·α^i(h), i + j)`.
#[derive(Debug, Clone)]
pub struct SemidirectRep {
    pub spec: GroupSpec,
    powers: Vec<Automorphism>,
}

impl Representation for SemidirectRep {
    type Elem = (Element, u32);

    fn mul(&self, a: &(Element, u32), b: &(Element, u32)) -> (Element, u32) {
        let twisted = self.powers[a.1 as usize].apply(&b.0);
        (
            self.spec.mul(&a.0, &twisted),
            (a.1 + b.1) % self.powers.len() as u32,
        )
    }

    fn identity(&self) -> (Element, u32) {
        (self.spec.identity(), 0)
    }

    fn describe(&self, e: &(Element, u32)) -> String {
        format!("({}, α^{})", e.0, e.1)
    }
}

/// A subset of an enumerated group given by element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSubgroup {
    indices: Vec<usize>,
    mask: Vec<bool>,
}

impl IndexSubgroup {
    fn from_mask(mask: Vec<bool>) -> Self {
        let indices = mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i)
            .collect();
        IndexSubgroup { indices, mask }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn is_subset_of(&self, other: &IndexSubgroup) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn intersection(&self, other: &IndexSubgroup) -> IndexSubgroup {
        Self::from_mask(
            self.mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| *a && *b)
                .collect(),
        )
    }
}

pub struct EnumeratedGroup<R: Representation> {
    rep: R,
    elements: Vec<R::Elem>,
    index: HashMap<R::Elem, usize>,
    inverses: Vec<usize>,
    table: Option<Vec<u32>>,
}

impl<R: Representation> EnumeratedGroup<R> {
    /// Breadth-first closure of `generators`. The identity gets index 0; the
    /// remaining elements are indexed in increasing order of their encoding, so
    /// the indexing does not depend on the order of the generators.
    pub fn enumerate(rep: R, generators: &[R::Elem], cap: usize) -> Result<Self, EngineError> {
        let id = rep.identity();
        let mut seen: HashMap<R::Elem, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone(), ());
        queue.push_back(id.clone());
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = rep.mul(&x, g);
                if !seen.contains_key(&y) {
                    if seen.len() >= cap {
                        return Err(EngineError::CapExceeded { cap });
                    }
                    seen.insert(y.clone(), ());
                    queue.push_back(y);
                }
            }
        }
        let mut rest: Vec<R::Elem> = seen.into_keys().filter(|e| e != &id).collect();
        rest.sort();
        let mut elements = vec![id];
        elements.extend(rest);
        let index: HashMap<R::Elem, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut group = EnumeratedGroup {
            rep,
            elements,
            index,
            inverses: Vec::new(),
            table: None,
        };
        let n = group.order();
        if n <= TABLE_LIMIT {
            let mut table = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    table[i * n + j] =
                        group.lookup(&group.rep.mul(&group.elements[i], &group.elements[j])) as u32;
                }
            }
            group.table = Some(table);
        }
        group.inverses = (0..n)
            .map(|i| {
                let mut prev = 0;
                let mut x = i;
                while x != 0 {
                    prev = x;
                    x = group.mul(x, i);
                }
                if i == 0 {
                    0
                } else {
                    prev
                }
            })
            .collect();
        Ok(group)
    }

    fn lookup(&self, e: &R::Elem) -> usize {
        *self.index.get(e).expect("product stays in the group")
    }

    pub fn rep(&self) -> &R {
        &self.rep
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &R::Elem {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &R::Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn describe(&self, i: usize) -> String {
        self.rep.describe(&self.elements[i])
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.order() + j] as usize,
            None => self.lookup(&self.rep.mul(&self.elements[i], &self.elements[j])),
        }
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inverses[i]
    }

    /// `x^g = g⁻¹ x g`.
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn power(&self, x: usize, k: u64) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, x))
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn whole(&self) -> IndexSubgroup {
        IndexSubgroup::from_mask(vec![true; self.order()])
    }

    pub fn closure(&self, generators: &[usize]) -> IndexSubgroup {
        let mut mask = vec![false; self.order()];
        mask[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in generators {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    queue.push_back(y);
                }
            }
        }
        IndexSubgroup::from_mask(mask)
    }

    /// `S^g = g⁻¹ S g`.
    pub fn conjugate_subgroup(&self, s: &IndexSubgroup, g: usize) -> IndexSubgroup {
        let mut mask = vec![false; self.order()];
        for &x in s.indices() {
            mask[self.conj(x, g)] = true;
        }
        IndexSubgroup::from_mask(mask)
    }

    pub fn normalizer(&self, s: &IndexSubgroup) -> IndexSubgroup {
        let mask = (0..self.order())
            .map(|g| s.indices().iter().all(|&x| s.contains(self.conj(x, g))))
            .collect();
        IndexSubgroup::from_mask(mask)
    }

    pub fn centralizer(&self, s: &IndexSubgroup) -> IndexSubgroup {
        let mask = (0..self.order())
            .map(|g| {
                s.indices()
                    .iter()
                    .all(|&x| self.mul(g, x) == self.mul(x, g))
            })
            .collect();
        IndexSubgroup::from_mask(mask)
    }

    pub fn centralizer_of_element(&self, x: usize) -> IndexSubgroup {
        let mask = (0..self.order())
            .map(|g| self.mul(g, x) == self.mul(x, g))
            .collect();
        IndexSubgroup::from_mask(mask)
    }

    /// `{x g y : x, y ∈ s}` masks as a product set `a · b`.
    pub fn product_set(&self, a: &IndexSubgroup, b: &IndexSubgroup) -> IndexSubgroup {
        let mut mask = vec![false; self.order()];
        for &x in a.indices() {
            for &y in b.indices() {
                mask[self.mul(x, y)] = true;
            }
        }
        IndexSubgroup::from_mask(mask)
    }

    /// A Sylow p-subgroup. Starting from `hint` (or a cyclic group of order p)
    /// the current p-subgroup Q is enlarged by an element of order p in
    /// `N_G(Q)/Q` until its order is the p-part of |G|.
    pub fn sylow_p(&self, p: u32, hint: Option<&IndexSubgroup>) -> IndexSubgroup {
        let p = p as u64;
        let mut target = 1u64;
        let mut rest = self.order() as u64;
        while rest % p == 0 {
            rest /= p;
            target *= p;
        }
        let mut q = match hint {
            Some(h) => h.clone(),
            None => match (1..self.order()).find(|&x| self.element_order(x) == p) {
                Some(x) => self.closure(&[x]),
                None => return self.closure(&[]),
            },
        };
        while (q.order() as u64) < target {
            let n = self.normalizer(&q);
            let x = n
                .indices()
                .iter()
                .copied()
                .find(|&x| !q.contains(x) && q.contains(self.power(x, p)))
                .expect("N_G(Q)/Q has an element of order p while Q is not Sylow");
            let mut gens = q.indices().to_vec();
            gens.push(x);
            q = self.closure(&gens);
        }
        q
    }

    /// Representatives and sizes of the double cosets `P g P`, identity first.
    pub fn double_cosets(&self, p: &IndexSubgroup) -> Vec<DoubleCoset> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for g in 0..self.order() {
            if seen[g] {
                continue;
            }
            let mut size = 0;
            for &x in p.indices() {
                let xg = self.mul(x, g);
                for &y in p.indices() {
                    let z = self.mul(xg, y);
                    if !seen[z] {
                        seen[z] = true;
                        size += 1;
                    }
                }
            }
            out.push(DoubleCoset {
                representative: g,
                size,
            });
        }
        out
    }

    /// `P ∩ P^g = {x ∈ P : g x g⁻¹ ∈ P}`.
    pub fn intersect_conjugate(&self, p: &IndexSubgroup, g: usize) -> IndexSubgroup {
        p.intersection(&self.conjugate_subgroup(p, g))
    }

    pub fn is_subgroup(&self, s: &IndexSubgroup) -> bool {
        s.contains(0)
            && s.indices()
                .iter()
                .all(|&x| s.indices().iter().all(|&y| s.contains(self.mul(x, y))))
    }

    pub fn is_normal(&self, s: &IndexSubgroup) -> bool {
        self.normalizer(s).order() == self.order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DoubleCoset {
    pub representative: usize,
    pub size: usize,
}

// ---------------------------------------------------------------------------
// Input and standard groups

/// `{"p": int, "dim": int, "generators": [[row-major ints]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixGroupInput {
    pub p: u32,
    pub dim: usize,
    pub generators: Vec<Vec<i64>>,
}

impl MatrixGroupInput {
    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        serde_json::from_str(text).map_err(|e| EngineError::BadInput(e.to_string()))
    }

    /// Generators reduced mod p and checked for invertibility.
    pub fn prepare(&self) -> Result<(MatrixRep, Vec<Vec<u8>>), EngineError> {
        let p = Prime::new(self.p)?;
        if p.get() > 255 {
            return Err(EngineError::BadInput("p must fit in a byte".into()));
        }
        let rep = MatrixRep { p, dim: self.dim };
        let mut gens = Vec::new();
        for (k, g) in self.generators.iter().enumerate() {
            if g.len() != self.dim * self.dim {
                return Err(EngineError::BadInput(format!(
                    "generator {k} has {} entries",
                    g.len()
                )));
            }
            let rows: Vec<Vec<i64>> = g.chunks(self.dim).map(<[i64]>::to_vec).collect();
            let m = FpMatrix::from_rows(p, &rows);
            if !m.is_invertible() {
                return Err(EngineError::NotInvertible(k));
            }
            gens.push(rep.encode(&m));
        }
        Ok((rep, gens))
    }

    pub fn enumerate(&self, cap: usize) -> Result<EnumeratedGroup<MatrixRep>, EngineError> {
        let (rep, gens) = self.prepare()?;
        EnumeratedGroup::enumerate(rep, &gens, cap)
    }
}

fn primitive_root(p: Prime) -> u32 {
    let q = p.get();
    (1..q)
        .find(|&g| (1..q - 1).all(|k| p.pow(g, k as u64) != 1))
        .unwrap_or(1)
}

/// Generators of `GL_dim(F_p)`: all elementary transvections and `diag(ζ, 1, ..)`.
pub fn gl_generators(p: Prime, dim: usize) -> (MatrixRep, Vec<Vec<u8>>) {
    let rep = MatrixRep { p, dim };
    let mut gens = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                gens.push(rep.transvection(i, j));
            }
        }
    }
    let zeta = primitive_root(p);
    if zeta != 1 {
        let mut d = rep.identity();
        d[0] = zeta as u8;
        gens.push(d);
    }
    (rep, gens)
}

pub fn enumerate_gl(
    p: Prime,
    dim: usize,
    cap: usize,
) -> Result<EnumeratedGroup<MatrixRep>, EngineError> {
    let (rep, gens) = gl_generators(p, dim);
    EnumeratedGroup::enumerate(rep, &gens, cap)
}

/// `|GL_n(F_p)| = ∏ (p^n - p^i)`.
pub fn gl_order(p: u64, n: u32) -> u64 {
    (0..n).map(|i| p.pow(n) - p.pow(i)).product()
}

// ---------------------------------------------------------------------------
// Embedded extraspecial groups

/// An injective homomorphism from an extraspecial group into an enumerated group.
#[derive(Debug, Clone)]
pub struct EmbeddedP {
    pub spec: GroupSpec,
    image: BTreeMap<Element, usize>,
    subgroup: IndexSubgroup,
}

impl EmbeddedP {
    /// Build from the images of `A_1..A_n, B_1..B_n` and of `C`, checking the
    /// homomorphism property on every pair of elements.
    pub fn new<R: Representation>(
        group: &EnumeratedGroup<R>,
        spec: GroupSpec,
        generator_images: &[usize],
        c_image: usize,
    ) -> Result<Self, EngineError> {
        let n = spec.n;
        if generator_images.len() != 2 * n {
            return Err(EngineError::BadInput(
                "need images of A_1..A_n, B_1..B_n".into(),
            ));
        }
        let image_of = |g: &Element| -> usize {
            let mut acc = 0;
            for i in 0..n {
                acc = group.mul(acc, group.power(generator_images[n + i], g.s[i] as u64));
            }
            for i in 0..n {
                acc = group.mul(acc, group.power(generator_images[i], g.r[i] as u64));
            }
            group.mul(acc, group.power(c_image, g.t as u64))
        };
        let elements: Vec<Element> = spec.elements().collect();
        let image: BTreeMap<Element, usize> =
            elements.iter().map(|g| (g.clone(), image_of(g))).collect();
        for g in &elements {
            for h in &elements {
                if group.mul(image[g], image[h]) != image[&spec.mul(g, h)] {
                    return Err(EngineError::NotHomomorphism(format!("at ({g}, {h})")));
                }
            }
        }
        let mut mask = vec![false; group.order()];
        for &i in image.values() {
            mask[i] = true;
        }
        let subgroup = IndexSubgroup::from_mask(mask);
        if subgroup.order() != elements.len() {
            return Err(EngineError::NotInjective);
        }
        Ok(EmbeddedP {
            spec,
            image,
            subgroup,
        })
    }

    pub fn image(&self, g: &Element) -> usize {
        self.image[g]
    }

    pub fn subgroup(&self) -> &IndexSubgroup {
        &self.subgroup
    }

    /// Image of a subgroup of the abstract group.
    pub fn image_of_subgroup(&self, s: &Subgroup) -> IndexSubgroup {
        let mut mask = vec![false; self.subgroup.mask.len()];
        for g in s.elements() {
            mask[self.image[g]] = true;
        }
        IndexSubgroup::from_mask(mask)
    }

    /// Preimage of an index, if it lies in the image.
    pub fn preimage(&self, i: usize) -> Option<&Element> {
        self.image.iter().find(|(_, &j)| j == i).map(|(g, _)| g)
    }
}

/// The unitriangular group of `GL_3(F_p)` as an extraspecial group of order p³:
/// `A_1 = I + E_12`, `B_1 = I + E_23`, `C = I + E_13`.
pub fn embed_extraspecial_gl3(
    group: &EnumeratedGroup<MatrixRep>,
    p: Prime,
) -> Result<EmbeddedP, EngineError> {
    let family = if p.get() == 2 {
        Family::TwoPlus
    } else {
        Family::PPlus
    };
    let spec =
        GroupSpec::new(p.get(), 1, family).map_err(|e| EngineError::BadInput(e.to_string()))?;
    let rep = group.rep();
    let find = |m: Vec<u8>| {
        group
            .index_of(&m)
            .ok_or_else(|| EngineError::BadInput("matrix not in group".into()))
    };
    let a1 = find(rep.transvection(0, 1))?;
    let b1 = find(rep.transvection(1, 2))?;
    let c = find(rep.transvection(0, 2))?;
    EmbeddedP::new(group, spec, &[a1, b1], c)
}

/// The permutation matrix exchanging the first two coordinates.
pub fn swap_first_two_coordinates(rep: &MatrixRep) -> Vec<u8> {
    rep.from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]])
}

/// `P ⋊ ⟨α⟩` for a C-fixing automorphism α of order q coprime to p, with the
/// embedding `g ↦ (g, 1)`.
pub fn semidirect_with_automorphism(
    spec: GroupSpec,
    alpha: &Automorphism,
    q: u64,
) -> Result<(EnumeratedGroup<SemidirectRep>, EmbeddedP), EngineError> {
    let actual = alpha.order();
    if actual != q {
        return Err(EngineError::OrderMismatch { claimed: q, actual });
    }
    if q % spec.prime() as u64 == 0 {
        return Err(EngineError::OrderNotCoprime { q, p: spec.prime() });
    }
    let powers: Vec<Automorphism> = (0..q).map(|k| alpha.pow(k)).collect();
    let rep = SemidirectRep { spec, powers };
    let mut gens: Vec<(Element, u32)> = spec.generators().into_iter().map(|g| (g, 0)).collect();
    if q > 1 {
        gens.push((spec.identity(), 1));
    }
    let group = EnumeratedGroup::enumerate(rep, &gens, DEFAULT_ENUMERATION_CAP)?;
    let images: Vec<usize> = spec
        .generators()
        .into_iter()
        .map(|g| group.index_of(&(g, 0)).expect("generator present"))
        .collect();
    let c = group.index_of(&(spec.c(), 0)).expect("C present");
    let emb = EmbeddedP::new(&group, spec, &images, c)?;
    Ok((group, emb))
}

// ---------------------------------------------------------------------------
// Local-subgroup checks

#[derive(Debug, Clone, Serialize)]
pub struct ZFactorizationReport {
    /// Every order-p element of P has a centralizer with Frattini subgroup Z.
    pub hypothesis_holds: bool,
    pub group_order: usize,
    pub double_cosets: usize,
    pub qualifying: usize,
    /// Qualifying representatives with `Z^g ≠ Z`.
    pub z_not_normalized: Vec<usize>,
    /// Qualifying representatives outside `N_G(P)·C_G(Z)`.
    pub not_factorized: Vec<usize>,
}

impl ZFactorizationReport {
    pub fn violations(&self) -> usize {
        self.z_not_normalized.len() + self.not_factorized.len()
    }
}

/// For every double coset `PgP` with `Z ≤ P ∩ P^g`: `Z^g = Z` and
/// `g ∈ N_G(P)·C_G(Z)`. Runs whether or not the hypothesis holds.
pub fn verify_z_factorization<R: Representation>(
    group: &EnumeratedGroup<R>,
    emb: &EmbeddedP,
) -> ZFactorizationReport {
    let spec = emb.spec;
    let hypothesis_holds = verify_centralizer_frattini(spec).holds();
    let p = emb.subgroup();
    let z = emb.image_of_subgroup(&Subgroup::center_of_p(spec));
    let normalizer = group.normalizer(p);
    let cz = group.centralizer(&z);
    let nc = group.product_set(&normalizer, &cz);
    let cosets = group.double_cosets(p);
    let mut report = ZFactorizationReport {
        hypothesis_holds,
        group_order: group.order(),
        double_cosets: cosets.len(),
        qualifying: 0,
        z_not_normalized: Vec::new(),
        not_factorized: Vec::new(),
    };
    for dc in &cosets {
        let g = dc.representative;
        if !z.is_subset_of(&group.intersect_conjugate(p, g)) {
            continue;
        }
        report.qualifying += 1;
        if group.conjugate_subgroup(&z, g) != z {
            report.z_not_normalized.push(g);
        }
        if !nc.contains(g) {
            report.not_factorized.push(g);
        }
    }
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct YFactorizationReport {
    pub group_order: usize,
    /// The only exponent-p maximal subgroup of P is Ω₁(P).
    pub omega1_unique_exponent_p_maximal: bool,
    /// P is a Sylow p-subgroup of D₂.
    pub p_sylow_in_d2: bool,
    pub qualifying: usize,
    pub y_not_normalized: Vec<usize>,
    pub not_factorized: Vec<usize>,
}

impl YFactorizationReport {
    pub fn violations(&self) -> usize {
        self.y_not_normalized.len() + self.not_factorized.len()
    }
}

/// For every `g ∈ C_G(Z)` with `Y ≤ P ∩ P^g`: `Y^g = Y` and
/// `g ∈ (C_G(Z) ∩ N_G(P))·D₂`, where D₂ consists of the elements of
/// `C_G(Z) ∩ N_G(Y)` acting trivially on Y/Z.
pub fn verify_y_factorization<R: Representation>(
    group: &EnumeratedGroup<R>,
    emb: &EmbeddedP,
) -> Result<YFactorizationReport, EngineError> {
    let spec = emb.spec;
    if spec.family != Family::PMinus {
        return Err(EngineError::WrongFamily(spec.family));
    }
    let om = omega1(spec);
    let exp_p_maximal: Vec<Subgroup> = maximal_subgroups(spec)
        .into_iter()
        .filter(|m| m.exponent_divides_p())
        .collect();
    let omega1_unique = exp_p_maximal.len() == 1 && exp_p_maximal[0] == om;

    let p = emb.subgroup();
    let z = emb.image_of_subgroup(&Subgroup::center_of_p(spec));
    let y = emb.image_of_subgroup(&Subgroup::closure(spec, &[spec.b(1), spec.c()]));
    let b1 = emb.image(&spec.b(1));
    let cz = group.centralizer(&z);
    let ny = group.normalizer(&y);
    let np = group.normalizer(p);
    let d2_mask: Vec<bool> = (0..group.order())
        .map(|h| {
            cz.contains(h) && ny.contains(h) && {
                let moved = group.conj(b1, h);
                z.contains(group.mul(group.inv(b1), moved))
            }
        })
        .collect();
    let d2 = IndexSubgroup::from_mask(d2_mask);
    let mut d2_ppart = 1usize;
    let mut rest = d2.order();
    while rest % spec.prime() as usize == 0 {
        rest /= spec.prime() as usize;
        d2_ppart *= spec.prime() as usize;
    }
    let p_sylow_in_d2 = p.is_subset_of(&d2) && d2_ppart == p.order();
    let product = group.product_set(&cz.intersection(&np), &d2);

    let mut report = YFactorizationReport {
        group_order: group.order(),
        omega1_unique_exponent_p_maximal: omega1_unique,
        p_sylow_in_d2,
        qualifying: 0,
        y_not_normalized: Vec::new(),
        not_factorized: Vec::new(),
    };
    for &g in cz.indices() {
        if !y.is_subset_of(&group.intersect_conjugate(p, g)) {
            continue;
        }
        report.qualifying += 1;
        if group.conjugate_subgroup(&y, g) != y {
            report.y_not_normalized.push(g);
        }
        if !product.contains(g) {
            report.not_factorized.push(g);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct FusionReport {
    /// Elements g with `F^g = F`.
    pub normalizing: usize,
    /// Elements g with `F^g ≤ P` but `F^g ≠ F`; recorded, not compared.
    pub other_fusions: usize,
    /// Normalizing elements whose pullback changes the class.
    pub non_invariant: Vec<usize>,
}

impl FusionReport {
    pub fn certifies_non_stability(&self) -> bool {
        !self.non_invariant.is_empty()
    }
}

/// Compare `class` (a polynomial in the duals of `f_basis`) with its pullback
/// under conjugation `x ↦ g x g⁻¹` for every g normalizing F = ⟨f_basis⟩.
pub fn fusion_invariance_check<R: Representation>(
    group: &EnumeratedGroup<R>,
    p_sub: &IndexSubgroup,
    prime: Prime,
    f_basis: &[usize],
    class: &GradedPoly,
) -> FusionReport {
    let k = f_basis.len();
    assert_eq!(class.nvars(), k, "one variable per basis element");
    // coordinates of every element of F
    let mut coords: HashMap<usize, Vec<u32>> = HashMap::new();
    for v in crate::field::FpVector::all(prime, k) {
        let x = f_basis
            .iter()
            .zip(v.coords())
            .fold(0, |acc, (&b, &c)| group.mul(acc, group.power(b, c as u64)));
        coords.insert(x, v.coords().to_vec());
    }
    let mut f_mask = vec![false; group.order()];
    for &x in coords.keys() {
        f_mask[x] = true;
    }
    let f_sub = IndexSubgroup::from_mask(f_mask);
    let mut report = FusionReport {
        normalizing: 0,
        other_fusions: 0,
        non_invariant: Vec::new(),
    };
    for g in 0..group.order() {
        let fg = group.conjugate_subgroup(&f_sub, g);
        if fg == f_sub {
            report.normalizing += 1;
            let ginv = group.inv(g);
            let rows: Vec<Vec<i64>> = f_basis
                .iter()
                .map(|&b| {
                    coords[&group.mul(group.mul(g, b), ginv)]
                        .iter()
                        .map(|&c| c as i64)
                        .collect()
                })
                .collect();
            let t = FpMatrix::from_rows(prime, &rows);
            if class.pullback(&dual_substitution(&t)) != *class {
                report.non_invariant.push(g);
            }
        } else if fg.is_subset_of(p_sub) {
            report.other_fusions += 1;
        }
    }
    report
}
