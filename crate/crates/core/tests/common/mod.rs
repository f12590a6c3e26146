//! Test-only oracles that share no code paths with the library's fast routines.
#![allow(dead_code)]

use extraspecial::group::{Element, Family, GroupSpec};
use extraspecial::subgroup::Subgroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    A(usize),
    B(usize),
    C,
}

fn rank(l: Letter, n: usize) -> usize {
    match l {
        Letter::B(i) => i,
        Letter::A(i) => n + i,
        Letter::C => 2 * n,
    }
}

fn spell(g: &Element) -> Vec<Letter> {
    let mut w = Vec::new();
    for (i, &k) in g.s.iter().enumerate() {
        w.extend(std::iter::repeat_n(Letter::B(i), k as usize));
    }
    for (i, &k) in g.r.iter().enumerate() {
        w.extend(std::iter::repeat_n(Letter::A(i), k as usize));
    }
    w.extend(std::iter::repeat_n(Letter::C, g.t as usize));
    w
}

/// Reduce a word in the generators to canonical form using only the defining
/// relations: adjacent letters are swapped into the order B.. A.. C, each swap
/// of `A_i B_i` emitting a C, and then each run `X^k` is cut down with the
/// power relation `X^p ∈ {1, C}` of the family.
pub fn rewrite(spec: GroupSpec, word: &[Letter]) -> Element {
    let n = spec.n;
    let p = spec.prime();
    let mut w: Vec<Letter> = word.iter().copied().filter(|l| *l != Letter::C).collect();
    let mut c = word.iter().filter(|l| **l == Letter::C).count() as u64;
    // bubble sort: every inversion removed strictly decreases the inversion count
    let mut swapped = true;
    while swapped {
        swapped = false;
        for k in 0..w.len().saturating_sub(1) {
            if rank(w[k], n) > rank(w[k + 1], n) {
                if let (Letter::A(i), Letter::B(j)) = (w[k], w[k + 1]) {
                    // A_i B_j = B_j A_i C^{δ_ij}
                    if i == j {
                        c += 1;
                    }
                }
                w.swap(k, k + 1);
                swapped = true;
            }
        }
    }
    let power_is_c = |l: Letter| {
        matches!(
            (spec.family, l),
            (Family::TwoMinus, Letter::A(0) | Letter::B(0)) | (Family::PMinus, Letter::A(0))
        )
    };
    let mut s = vec![0u32; n];
    let mut r = vec![0u32; n];
    for l in (0..n).map(Letter::B).chain((0..n).map(Letter::A)) {
        let k = w.iter().filter(|x| **x == l).count() as u64;
        if power_is_c(l) {
            c += k / p as u64;
        }
        let rest = (k % p as u64) as u32;
        match l {
            Letter::B(i) => s[i] = rest,
            Letter::A(i) => r[i] = rest,
            Letter::C => unreachable!(),
        }
    }
    Element {
        s,
        r,
        t: (c % p as u64) as u32,
    }
}

/// Product computed by concatenating canonical words and rewriting.
pub fn oracle_mul(spec: GroupSpec, g: &Element, h: &Element) -> Element {
    let mut w = spell(g);
    w.extend(spell(h));
    rewrite(spec, &w)
}

/// Φ(P) as the intersection of the kernels of all homomorphisms P → Z/p,
/// found by brute force over values on A_1..A_n, B_1..B_n, C and checked on
/// every (generator, element) pair.
pub fn frattini_by_characters(spec: GroupSpec) -> Subgroup {
    let p = spec.prime();
    let n = spec.n;
    let elements: Vec<Element> = spec.elements().collect();
    let gens: Vec<Element> = spec
        .generators()
        .into_iter()
        .chain(std::iter::once(spec.c()))
        .collect();
    let eval = |vals: &[u32], g: &Element| -> u32 {
        let mut acc = 0u64;
        for i in 0..n {
            acc += (g.s[i] * vals[n + i]) as u64 + (g.r[i] * vals[i]) as u64;
        }
        acc += (g.t * vals[2 * n]) as u64;
        (acc % p as u64) as u32
    };
    let mut kernel_all: Vec<bool> = vec![true; elements.len()];
    let mut vals = vec![0u32; 2 * n + 1];
    let mut found = 0;
    loop {
        let is_hom = gens.iter().all(|g| {
            let vg = eval(&vals, g);
            elements
                .iter()
                .all(|h| eval(&vals, &spec.mul(g, h)) == (vg + eval(&vals, h)) % p)
        });
        if is_hom && vals.iter().any(|&v| v != 0) {
            found += 1;
            for (k, g) in elements.iter().enumerate() {
                if eval(&vals, g) != 0 {
                    kernel_all[k] = false;
                }
            }
        }
        // next value tuple
        let mut k = 0;
        loop {
            if k == vals.len() {
                assert!(found > 0, "an extraspecial group has nontrivial characters");
                let members: Vec<Element> = elements
                    .iter()
                    .zip(&kernel_all)
                    .filter(|(_, &m)| m)
                    .map(|(g, _)| g.clone())
                    .collect();
                return Subgroup::closure(spec, &members);
            }
            vals[k] += 1;
            if vals[k] < p {
                break;
            }
            vals[k] = 0;
            k += 1;
        }
    }
}

/// Coefficients of `∏_{μ} (1 + μβ)^p` over F_p by repeated multiplication of
/// dense coefficient vectors, one linear factor at a time.
pub fn naive_chern(p: u32) -> Vec<u32> {
    let mut coeffs = vec![1u32];
    for mu in 0..p {
        for _ in 0..p {
            let mut next = vec![0u32; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i] = (next[i] + a) % p;
                next[i + 1] = (next[i + 1] + a * mu) % p;
            }
            coeffs = next;
        }
    }
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
        coeffs.pop();
    }
    coeffs
}

/// The specs named in the acceptance criteria: both families for
/// (p, n) ∈ {2, 3} × {1, 2} and for (5, 1).
pub fn desk_specs() -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)] {
        let families = if p == 2 {
            [Family::TwoPlus, Family::TwoMinus]
        } else {
            [Family::PPlus, Family::PMinus]
        };
        for f in families {
            out.push(GroupSpec::new(p, n, f).unwrap());
        }
    }
    out
}

pub fn spec(p: u32, n: usize, family: Family) -> GroupSpec {
    GroupSpec::new(p, n, family).unwrap()
}
