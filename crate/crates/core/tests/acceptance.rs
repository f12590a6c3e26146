//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{desk_specs, frattini_by_characters, naive_chern, oracle_mul, spec};
use extraspecial::cli::run;
use extraspecial::cohomology::{
    chern_expected, chern_total_regular, conjugation_matrix, dual_substitution,
    verify_evens_norm_action, GradedPoly,
};
use extraspecial::field::{FpVector, Prime};
use extraspecial::forms::{arf_type, ArfType};
use extraspecial::group::{Element, Family, GroupSpec, DEFAULT_CAP};
use extraspecial::matgroup::{
    embed_extraspecial_gl3, enumerate_gl, fusion_invariance_check, semidirect_with_automorphism,
    swap_first_two_coordinates, verify_y_factorization, verify_z_factorization,
    DEFAULT_ENUMERATION_CAP,
};
use extraspecial::subgroup::{is_small_exception, verify_centralizer_frattini, Subgroup};
use extraspecial::witt::{
    cross_check_rank_one, extend_isomorphism, is_automorphism, random_automorphism,
    random_automorphism_with, random_subgroup_containing_z, Automorphism, PartialIso,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Groups up to this order are checked on all pairs / triples.
const EXHAUSTIVE_ORDER: u64 = 128;
/// Form identities are checked on all pairs up to this order.
const FORM_EXHAUSTIVE_ORDER: u64 = 243;
const RANDOM_SAMPLES: usize = 10_000;
const WITT_TRIALS: u64 = 100;
const WITT_MAX_ORDER: u64 = 243;
const CENTRALIZER_MAX_ORDER: u64 = 243;
const MIN_SEMIDIRECT_INSTANCES: usize = 3;
const SEED: u64 = 2024;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_element(s: GroupSpec, rng: &mut ChaCha8Rng) -> Element {
    let p = s.prime();
    Element {
        s: (0..s.n).map(|_| rng.gen_range(0..p)).collect(),
        r: (0..s.n).map(|_| rng.gen_range(0..p)).collect(),
        t: rng.gen_range(0..p),
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pairs = 0usize;
    for s in desk_specs() {
        let all: Vec<Element> = s.elements().collect();
        if s.order() <= EXHAUSTIVE_ORDER {
            for g in &all {
                for h in &all {
                    let gh = s.mul(g, h);
                    ensure(gh == oracle_mul(s, g, h), || {
                        format!("{s}: mul({g}, {h}) disagrees with rewriting")
                    })?;
                    pairs += 1;
                    for k in &all {
                        ensure(s.mul(&gh, k) == s.mul(g, &s.mul(h, k)), || {
                            format!("{s}: ({g})({h})({k}) not associative")
                        })?;
                    }
                }
            }
        } else {
            for _ in 0..RANDOM_SAMPLES {
                let (g, h, k) = (
                    random_element(s, &mut rng),
                    random_element(s, &mut rng),
                    random_element(s, &mut rng),
                );
                ensure(s.mul(&g, &h) == oracle_mul(s, &g, &h), || {
                    format!("{s}: mul({g}, {h}) disagrees with rewriting")
                })?;
                ensure(
                    s.mul(&s.mul(&g, &h), &k) == s.mul(&g, &s.mul(&h, &k)),
                    || format!("{s}: not associative"),
                )?;
                pairs += 1;
            }
        }
        let rep = s
            .verify_extraspecial(DEFAULT_CAP)
            .map_err(|e| e.to_string())?;
        ensure(rep.passed() && rep.center_order == s.prime() as u64, || {
            format!("{s}: {rep:?}")
        })?;
        ensure(
            frattini_by_characters(s) == Subgroup::center_of_p(s),
            || format!("{s}: Φ(P) from characters ≠ ⟨C⟩"),
        )?;
    }
    Ok(format!(
        "{} specs; closed formula = rewriting on {pairs} pairs; Z = P' = Φ = ⟨C⟩",
        desk_specs().len()
    ))
}

fn criterion_2() -> Outcome {
    let mut checked = 0usize;
    for s in desk_specs() {
        ensure(s.order() <= FORM_EXHAUSTIVE_ORDER, || {
            format!("{s} too large for exhaustive form check")
        })?;
        let forms = s.derive_forms().map_err(|e| e.to_string())?;
        let all: Vec<Element> = s.elements().collect();
        let p = s.prime();
        for g in &all {
            let v = s.psi(g);
            let expected = match (&forms.q, &forms.lambda) {
                (Some(q), _) => q.eval(&v).unwrap(),
                (_, Some(l)) => l.eval(&v),
                _ => return Err(format!("{s}: no Q or λ")),
            };
            ensure(s.power(g, p as u64) == s.c_pow(expected), || {
                format!("{s}: power form fails at {g}")
            })?;
            for h in &all {
                let f = forms.f.eval(&v, &s.psi(h)).unwrap();
                ensure(s.commutator(g, h) == s.c_pow(f), || {
                    format!("{s}: [{g}, {h}] ≠ C^f")
                })?;
                checked += 1;
            }
        }
        if s.family == Family::PMinus {
            let lambda = forms.lambda.unwrap();
            let b1 = s.psi(&s.b(1));
            for v in FpVector::all(s.p, 2 * s.n) {
                ensure(lambda.eval(&v) == forms.f.eval(&v, &b1).unwrap(), || {
                    format!("{s}: λ ≠ f(·, ψB1) at {:?}", v.coords())
                })?;
            }
        }
    }
    Ok(format!(
        "commutator and power forms exact on {checked} pairs; λ(v) = f(v, ψB1) in every p- spec"
    ))
}

fn criterion_3() -> Outcome {
    let mut lines = Vec::new();
    for n in 1..=3usize {
        for family in [Family::TwoPlus, Family::TwoMinus] {
            let s = spec(2, n, family);
            let q = s.derive_forms().map_err(|e| e.to_string())?.q.unwrap();
            let (ty, zeros) = arf_type(&q).map_err(|e| e.to_string())?;
            // independent count: elements with g² = 1, two per vector
            let involutive = s.elements().filter(|g| s.mul(g, g).is_identity()).count() as u64 / 2;
            let half = 1u64 << (2 * n - 1);
            let shift = 1u64 << (n - 1);
            let (expected_ty, expected_zeros) = if family == Family::TwoPlus {
                (ArfType::Plus, half + shift)
            } else {
                (ArfType::Minus, half - shift)
            };
            ensure(
                ty == expected_ty && zeros == expected_zeros && involutive == zeros,
                || {
                    format!("{s}: {ty:?} with {zeros} zeros ({involutive} by squaring), expected {expected_zeros}")
                },
            )?;
            lines.push(format!("{s}:{zeros}"));
        }
    }
    Ok(format!("zero counts {}", lines.join(" ")))
}

fn witt_specs() -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for (p, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)] {
        let families = if p == 2 {
            [Family::TwoPlus, Family::TwoMinus]
        } else {
            [Family::PPlus, Family::PMinus]
        };
        for f in families {
            let s = spec(p, n, f);
            if s.order() <= WITT_MAX_ORDER {
                out.push(s);
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let mut total = 0u64;
    for s in witt_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ s.order());
        for trial in 0..WITT_TRIALS {
            let alpha = random_automorphism_with(s, &mut rng);
            let h = random_subgroup_containing_z(s, &mut rng);
            let phi = PartialIso::restriction(&alpha, &h)
                .map_err(|e| format!("{s} trial {trial}: {e}"))?;
            phi.check_y_hypotheses()
                .map_err(|e| format!("{s} trial {trial}: hypotheses fail: {e}"))?;
            let beta = extend_isomorphism(&phi).map_err(|e| format!("{s} trial {trial}: {e}"))?;
            ensure(is_automorphism(s, beta.images()), || {
                format!("{s} trial {trial}: not an automorphism")
            })?;
            ensure(
                h.elements()
                    .iter()
                    .all(|x| &beta.apply(x) == phi.apply(x).unwrap()),
                || format!("{s} trial {trial}: disagrees on H"),
            )?;
            total += 1;
        }
    }
    let mut cross = Vec::new();
    for s in [
        spec(2, 1, Family::TwoPlus),
        spec(2, 1, Family::TwoMinus),
        spec(3, 1, Family::PPlus),
        spec(3, 1, Family::PMinus),
    ] {
        let x = cross_check_rank_one(s).map_err(|e| e.to_string())?;
        ensure(x.passed(), || format!("{s}: {x:?}"))?;
        cross.push(format!("{s}:{}", x.satisfying_hypotheses));
    }
    Ok(format!(
        "{total}/{total} round trips over {} specs; rank-one isomorphisms all extend ({})",
        witt_specs().len(),
        cross.join(" ")
    ))
}

fn criterion_5() -> Outcome {
    let mut failing = BTreeSet::new();
    let mut specs = 0;
    for p in [2u32, 3, 5, 7] {
        for n in 1..=3usize {
            let families = if p == 2 {
                [Family::TwoPlus, Family::TwoMinus]
            } else {
                [Family::PPlus, Family::PMinus]
            };
            for f in families {
                let s = spec(p, n, f);
                if s.order() > CENTRALIZER_MAX_ORDER {
                    continue;
                }
                specs += 1;
                let rep = verify_centralizer_frattini(s);
                if !rep.holds() {
                    ensure(rep.witness == Some(s.b(1)), || {
                        format!("{s}: witness {:?} is not B1", rep.witness)
                    })?;
                    failing.insert(s.to_string());
                }
                ensure(rep.holds() != is_small_exception(s), || {
                    format!("{s}: holds = {}", rep.holds())
                })?;
            }
        }
    }
    let small: BTreeSet<String> = failing
        .iter()
        .filter(|x| x.starts_with('2') || x.starts_with('3'))
        .cloned()
        .collect();
    let named: BTreeSet<String> = ["2^(1+2)+", "3^(1+2)+", "3^(1+2)-"]
        .into_iter()
        .map(String::from)
        .collect();
    ensure(small == named, || format!("failures for p ≤ 3: {small:?}"))?;
    Ok(format!(
        "{specs} specs; fails with witness B1 exactly for D8, E, M(p³): {}",
        failing.into_iter().collect::<Vec<_>>().join(", ")
    ))
}

fn criterion_6() -> Outcome {
    for q in [2u32, 3, 5, 7] {
        let p = Prime::new(q).unwrap();
        let total = chern_total_regular(p);
        ensure(total == chern_expected(p), || format!("p = {q}: {total}"))?;
        let naive = naive_chern(q);
        let mut expected = vec![0u32; (q * (q - 1) + 1) as usize];
        expected[0] = 1;
        expected[(q * (q - 1)) as usize] = q - 1;
        ensure(naive == expected, || {
            format!("p = {q}: naive expansion {naive:?}")
        })?;
    }
    Ok("∏(1 + μβ)^p = 1 - β^{p(p-1)} for p = 2, 3, 5, 7".into())
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    for q in [2u32, 3] {
        let p = Prime::new(q).unwrap();
        let g = enumerate_gl(p, 3, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
        let expected_order = (q.pow(3) - 1) * (q.pow(3) - q) * (q.pow(3) - q * q);
        ensure(g.order() == expected_order as usize, || {
            format!("|GL_3(F_{q})| = {}", g.order())
        })?;
        let emb = embed_extraspecial_gl3(&g, p).map_err(|e| e.to_string())?;
        let s = emb.spec;
        let swap = g.index_of(&swap_first_two_coordinates(g.rep())).unwrap();
        let f = g.intersect_conjugate(emb.subgroup(), swap);
        let b1c = emb.image_of_subgroup(&Subgroup::closure(s, &[s.b(1), s.c()]));
        ensure(f == b1c, || {
            format!("p = {q}: P ∩ P^g has order {}", f.order())
        })?;
        let names = ["β", "γ"];
        let e = q * (q - 1);
        let res = GradedPoly::from_terms(p, &names, &[(vec![e, 0], -1)]);
        let moved = GradedPoly::from_terms(p, &names, &[(vec![0, e], -1)]);
        let (b1, c) = (emb.image(&s.b(1)), emb.image(&s.c()));
        // x ↦ g x g⁻¹ exchanges B1 and C, so the dual variables are exchanged
        ensure(
            g.conj(b1, g.inv(swap)) == c && g.conj(c, g.inv(swap)) == b1,
            || "g does not swap B1 and C".into(),
        )?;
        let fusion = fusion_invariance_check(&g, emb.subgroup(), p, &[b1, c], &res);
        ensure(fusion.non_invariant.contains(&swap), || {
            format!("p = {q}: g fixes {res}")
        })?;
        let swap_sub = vec![FpVector::unit(p, 2, 1), FpVector::unit(p, 2, 0)];
        ensure(res.pullback(&swap_sub) == moved && res != moved, || {
            format!("p = {q}: pullback {}", res.pullback(&swap_sub))
        })?;
        parts.push(format!("|GL_3(F_{q})| = {}, {res} ≠ {moved}", g.order()));
    }
    Ok(format!("P ∩ P^g = ⟨B1, C⟩; {}", parts.join("; ")))
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    for (q, n) in [(2u32, 2usize), (2, 3), (3, 2)] {
        let family = if q == 2 {
            Family::TwoPlus
        } else {
            Family::PPlus
        };
        let s = spec(q, n, family);
        let sub = dual_substitution(&conjugation_matrix(s, &s.a(1)));
        let rep = verify_evens_norm_action(s.p, n, &sub);
        ensure(rep.matches_expected() && rep.distinct(), || {
            format!("{s}: {} vs {}", rep.restricted, rep.restricted_pulled_back)
        })?;
        parts.push(format!(
            "{s}: {} ≠ {}",
            rep.restricted, rep.restricted_pulled_back
        ));
    }
    Ok(parts.join("; "))
}

fn criterion_9() -> Outcome {
    let q8 = spec(2, 1, Family::TwoMinus);
    let rotation = Automorphism::new(q8, vec![q8.b(1), q8.mul(&q8.a(1), &q8.b(1))])
        .map_err(|e| e.to_string())?;
    let two_minus = spec(2, 2, Family::TwoMinus);
    let (odd_part, odd_q) = (0..64u64)
        .map(|seed| random_automorphism(two_minus, seed).p_prime_part())
        .find(|(_, q)| *q > 1)
        .ok_or("no automorphism of odd order found")?;
    let e = spec(3, 2, Family::PPlus);
    let inversion = Automorphism::new(e, e.generators().iter().map(|g| e.inv(g)).collect())
        .map_err(|x| x.to_string())?;
    let m = spec(3, 2, Family::PMinus);
    let second_pair = Automorphism::new(m, vec![m.a(1), m.inv(&m.a(2)), m.b(1), m.inv(&m.b(2))])
        .map_err(|x| x.to_string())?;
    let m27 = spec(3, 1, Family::PMinus);
    let instances: Vec<(GroupSpec, Automorphism, u64)> = vec![
        (q8, rotation, 3),
        (two_minus, odd_part, odd_q),
        (e, inversion, 2),
        (m, second_pair, 2),
        (m27, Automorphism::identity(m27), 1),
    ];
    let mut nontrivial = 0;
    let mut parts = Vec::new();
    for (s, alpha, q) in instances {
        let (g, emb) =
            semidirect_with_automorphism(s, &alpha, q).map_err(|x| format!("{s}: {x}"))?;
        let z = verify_z_factorization(&g, &emb);
        // M(p³) fails the centralizer hypothesis; only the Y factorization is claimed there
        ensure(z.hypothesis_holds == !is_small_exception(s), || {
            format!("{s}: unexpected Z hypothesis status")
        })?;
        let mut line = if z.hypothesis_holds {
            ensure(z.violations() == 0, || {
                let bad = z
                    .z_not_normalized
                    .first()
                    .or(z.not_factorized.first())
                    .copied()
                    .unwrap();
                format!(
                    "{s} ⋊ C{q}: Z factorization violated at {}",
                    g.describe(bad)
                )
            })?;
            format!("{s}⋊C{q}: Z {}/{}", z.qualifying, z.qualifying)
        } else {
            format!("{s}⋊C{q}: Z hypothesis-violated")
        };
        if s.family == Family::PMinus {
            let y = verify_y_factorization(&g, &emb).map_err(|x| x.to_string())?;
            ensure(
                y.omega1_unique_exponent_p_maximal && y.p_sylow_in_d2,
                || format!("{s}: {y:?}"),
            )?;
            ensure(y.violations() == 0, || {
                format!("{s} ⋊ C{q}: Y factorization violated")
            })?;
            line.push_str(&format!(", Y {}/{}", y.qualifying, y.qualifying));
        }
        if q > 1 {
            nontrivial += 1;
        }
        parts.push(line);
    }
    ensure(nontrivial >= MIN_SEMIDIRECT_INSTANCES, || {
        format!("only {nontrivial} nontrivial instances")
    })?;
    Ok(format!("zero violations; {}", parts.join("; ")))
}

fn strip_elapsed(json: &str) -> String {
    json.lines()
        .filter(|l| !l.trim_start().starts_with("\"elapsed_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "verify",
            "lemma",
            "prop-witt",
            "--p",
            "3",
            "--n",
            "2",
            "--family",
            "p-",
            "--seed",
            "7",
        ],
        vec![
            "verify", "lemma", "wittprep", "--p", "3", "--n", "2", "--family", "p-", "--seed", "7",
        ],
        vec![
            "verify",
            "semidirect",
            "--p",
            "3",
            "--n",
            "2",
            "--family",
            "p-",
            "--seed",
            "1",
        ],
        vec![
            "verify", "group", "--p", "3", "--n", "2", "--family", "p+", "--seed", "7",
        ],
        vec!["verify", "gl3", "--p", "2"],
    ];
    for args in &commands {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("report{k}.json"));
            let mut a: Vec<&str> = vec!["xspecial"];
            a.extend(args.iter().copied());
            a.extend(["--out", path.to_str().unwrap()]);
            let code = run(a).code;
            ensure(code == 0, || format!("{args:?} exited {code}"))?;
            outputs.push(strip_elapsed(
                &std::fs::read_to_string(&path).map_err(|e| e.to_string())?,
            ));
        }
        ensure(outputs[0] == outputs[1], || {
            format!("{args:?} produced different reports")
        })?;
    }
    Ok(format!(
        "{} commands, byte-identical JSON apart from elapsed_ms",
        commands.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("group axioms and structure", criterion_1),
        ("form correspondence", criterion_2),
        ("Arf classification", criterion_3),
        ("automorphism extension round trip", criterion_4),
        ("centralizer Frattini subgroups", criterion_5),
        ("Chern identity", criterion_6),
        ("GL_3 non-stability", criterion_7),
        ("Evens norm not invariant", criterion_8),
        ("Z and Y factorizations", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let ms = start.elapsed().as_millis();
        match result {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail} ({ms} ms)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {detail} ({ms} ms)", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
