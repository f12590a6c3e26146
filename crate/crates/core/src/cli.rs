//! The `xspecial` command line: each subcommand runs one verification and
//! produces a [`Report`].
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage errors.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::cohomology::{
    chern_expected, chern_total_regular, conjugation_matrix, dual_substitution, gamma_shift,
    linear_character_restrictions, verify_evens_norm_action, GradedPoly,
};
use crate::field::{FpMatrix, FpVector, Prime};
use crate::forms::{arf_type, ArfType, LambdaClass};
use crate::group::{Element, Family, GroupSpec, DEFAULT_CAP};
use crate::matgroup::{
    embed_extraspecial_gl3, enumerate_gl, fusion_invariance_check, gl_order,
    semidirect_with_automorphism, swap_first_two_coordinates, verify_y_factorization,
    verify_z_factorization, EmbeddedP, EnumeratedGroup, MatrixGroupInput, Representation,
    SemidirectRep, DEFAULT_ENUMERATION_CAP,
};
use crate::report::{Check, Report};
use crate::subgroup::{verify_centralizer_frattini, Subgroup};
use crate::witt::{
    cross_check_rank_one, extend_isomorphism, fix_b1_prestep, is_automorphism, random_automorphism,
    random_automorphism_with, random_subgroup_containing_z, Automorphism, PartialIso,
};

/// Largest group order for which pairwise checks run exhaustively by default.
const EXHAUSTIVE_LIMIT: u64 = 243;
/// Largest group order for which associativity is checked on all triples by default.
const EXHAUSTIVE_TRIPLES_LIMIT: u64 = 128;
const RANDOM_TRIPLES: usize = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "xspecial",
    about = "Exact checks on extraspecial p-groups",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Top,
}

#[derive(Debug, Subcommand)]
enum Top {
    /// Run a verification.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Group axioms, Z = P' = Φ(P) = ⟨C⟩, and the forms derived from commutators and powers.
    Group(Common),
    /// One lemma: centralizer-frattini, lambda, wittprep, prop-witt, lemma-z, lemma-y, chern, remark8.
    Lemma {
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// The GL_3(F_p) non-stability example.
    Gl3(Common),
    /// Build P ⋊ ⟨α⟩ and check the Z and Y factorizations in it.
    Semidirect(Common),
    /// Enumerate a matrix group given as JSON and report its order and Sylow subgroups.
    Enumerate {
        #[arg(long)]
        group: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args, Clone)]
struct Common {
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// One of 2+, 2-, p+, p-.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// JSON file `{"images": [...]}` with the images of A_1..A_n, B_1..B_n.
    #[arg(long)]
    auto: Option<PathBuf>,
    /// Order of the automorphism given by --auto.
    #[arg(long)]
    q: Option<u64>,
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Run = Result<Report, UsageError>;

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
}

/// Parse arguments (including the program name), run, and write `--out` if given.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                    report: None,
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                    report: None,
                }
            };
        }
    };
    let Top::Verify(cmd) = cli.command;
    let out = match &cmd {
        Verify::Group(c) | Verify::Gl3(c) | Verify::Semidirect(c) => c.out.clone(),
        Verify::Lemma { common, .. } | Verify::Enumerate { common, .. } => common.out.clone(),
    };
    let start = Instant::now();
    let result = match cmd {
        Verify::Group(c) => verify_group(&c),
        Verify::Lemma { id, common } => verify_lemma(&id, &common),
        Verify::Gl3(c) => verify_gl3(&c),
        Verify::Semidirect(c) => verify_semidirect(&c),
        Verify::Enumerate { group, common } => verify_enumerate(&group, &common),
    };
    let mut report = match result {
        Ok(r) => r,
        Err(UsageError(msg)) => {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
                report: None,
            }
        }
    };
    report.finish(start.elapsed().as_millis() as u64);
    if let Some(path) = out {
        if let Err(e) = std::fs::write(&path, report.to_json()) {
            return Outcome {
                code: 2,
                stdout: report.summary(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
                report: Some(report),
            };
        }
    }
    let code = if report.passed() { 0 } else { 1 };
    Outcome {
        code,
        stdout: report.summary(),
        stderr: String::new(),
        report: Some(report),
    }
}

fn prime_arg(c: &Common) -> Result<Prime, UsageError> {
    let p = c.p.ok_or_else(|| UsageError("--p is required".into()))?;
    Ok(Prime::new(p)?)
}

fn spec_arg(c: &Common) -> Result<GroupSpec, UsageError> {
    let p = prime_arg(c)?;
    let family = match &c.family {
        Some(f) => f.parse::<Family>()?,
        None if p.get() == 2 => Family::TwoPlus,
        None => Family::PPlus,
    };
    let spec = GroupSpec::new(p.get(), c.n, family)?;
    spec.check_cap(c.cap.unwrap_or(DEFAULT_CAP))?;
    Ok(spec)
}

fn new_report(command: &str, c: &Common, spec: Option<GroupSpec>) -> Report {
    let mut r = Report::new(command, c.seed);
    if let Some(s) = spec {
        r.param("group", s);
        r.param("p", s.p.get());
        r.param("n", s.n);
        r.param("family", s.family.label());
    }
    r
}

fn random_element(spec: GroupSpec, rng: &mut ChaCha8Rng) -> Element {
    let p = spec.prime();
    Element {
        s: (0..spec.n).map(|_| rng.gen_range(0..p)).collect(),
        r: (0..spec.n).map(|_| rng.gen_range(0..p)).collect(),
        t: rng.gen_range(0..p),
    }
}

/// All pairs when the group is small enough, otherwise `trials` random pairs.
fn pairs(
    spec: GroupSpec,
    exhaustive: bool,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(Element, Element)> {
    if exhaustive || spec.order() <= EXHAUSTIVE_LIMIT {
        let all: Vec<Element> = spec.elements().collect();
        all.iter()
            .flat_map(|g| all.iter().map(move |h| (g.clone(), h.clone())))
            .collect()
    } else {
        (0..trials)
            .map(|_| (random_element(spec, rng), random_element(spec, rng)))
            .collect()
    }
}

fn verify_group(c: &Common) -> Run {
    let spec = spec_arg(c)?;
    let mut r = new_report("verify group", c, Some(spec));
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);

    let structure = spec.verify_extraspecial(c.cap.unwrap_or(DEFAULT_CAP))?;
    r.push(Check::expect(
        "center-derived-frattini",
        structure.passed(),
        format!(
            "|P| = {}, |Z(P)| = {}",
            structure.order, structure.center_order
        ),
        || format!("{structure:?}"),
    ));

    let all_triples = spec.order() <= EXHAUSTIVE_TRIPLES_LIMIT
        || (c.exhaustive && spec.order() <= EXHAUSTIVE_LIMIT);
    let mut bad = None;
    let mut tested = 0usize;
    if all_triples {
        let all: Vec<Element> = spec.elements().collect();
        'outer: for g in &all {
            for h in &all {
                let gh = spec.mul(g, h);
                for k in &all {
                    tested += 1;
                    if spec.mul(&gh, k) != spec.mul(g, &spec.mul(h, k)) {
                        bad = Some(format!("({g}, {h}, {k})"));
                        break 'outer;
                    }
                }
            }
        }
    } else {
        for _ in 0..RANDOM_TRIPLES {
            let (g, h, k) = (
                random_element(spec, &mut rng),
                random_element(spec, &mut rng),
                random_element(spec, &mut rng),
            );
            tested += 1;
            if spec.mul(&spec.mul(&g, &h), &k) != spec.mul(&g, &spec.mul(&h, &k)) {
                bad = Some(format!("({g}, {h}, {k})"));
                break;
            }
        }
    }
    let scope = if all_triples { "all" } else { "random" };
    r.push(Check::expect(
        "associativity",
        bad.is_none(),
        format!("{tested} {scope} triples"),
        || bad.clone().unwrap_or_default(),
    ));

    let forms = match spec.derive_forms() {
        Ok(f) => {
            r.push(Check::pass(
                "forms-derived",
                "f nondegenerate; forms consistent with powers and commutators",
            ));
            f
        }
        Err(e) => {
            r.push(Check::fail(
                "forms-derived",
                "form derivation failed",
                e.to_string(),
            ));
            return Ok(r);
        }
    };

    let tested_pairs = pairs(spec, c.exhaustive, c.trials, &mut rng);
    let bad = tested_pairs.iter().find(|(g, h)| {
        let f = forms
            .f
            .eval(&spec.psi(g), &spec.psi(h))
            .expect("dimensions match");
        spec.commutator(g, h) != spec.c_pow(f)
    });
    r.push(Check::expect(
        "commutator-form",
        bad.is_none(),
        format!("[g,h] = C^f(ψg,ψh) on {} pairs", tested_pairs.len()),
        || {
            bad.map(|(g, h)| format!("g = {g}, h = {h}"))
                .unwrap_or_default()
        },
    ));

    let p = spec.prime();
    let bad = spec.elements().find(|g| {
        let v = spec.psi(g);
        let expected = match (&forms.q, &forms.lambda) {
            (Some(q), _) => q.eval(&v).expect("dimensions match"),
            (_, Some(l)) => l.eval(&v),
            _ => unreachable!("every family carries Q or λ"),
        };
        spec.power(g, p as u64) != spec.c_pow(expected)
    });
    let power_name = if p == 2 {
        "g^2 = C^Q(ψg)"
    } else {
        "g^p = C^λ(ψg)"
    };
    r.push(Check::expect(
        "power-form",
        bad.is_none(),
        format!("{power_name} on all {} elements", spec.order()),
        || bad.map(|g| g.to_string()).unwrap_or_default(),
    ));

    if let Some(q) = &forms.q {
        let (ty, zeros) = arf_type(q)?;
        let expected = if spec.family == Family::TwoPlus {
            ArfType::Plus
        } else {
            ArfType::Minus
        };
        r.push(Check::expect(
            "arf-type",
            ty == expected,
            format!("{ty:?}, {zeros} zeros of Q"),
            || format!("{ty:?}"),
        ));
    }
    if let Some(l) = &forms.lambda {
        let class = l.classify();
        let expected = if spec.family == Family::PPlus {
            LambdaClass::Zero
        } else {
            LambdaClass::Nonzero
        };
        r.push(Check::expect(
            "lambda-class",
            class == expected,
            format!("λ is {class:?}"),
            || format!("{:?}", l.coeffs()),
        ));
    }
    Ok(r)
}

fn verify_lemma(id: &str, c: &Common) -> Run {
    match id {
        "centralizer-frattini" => lemma_centralizer_frattini(c),
        "lambda" => lemma_lambda(c),
        "wittprep" => lemma_wittprep(c),
        "prop-witt" => lemma_prop_witt(c),
        "lemma-z" => {
            let spec = spec_arg(c)?;
            let (g, emb, q) = build_semidirect(spec, c)?;
            let mut r = new_report("verify lemma lemma-z", c, Some(spec));
            r.param("q", q);
            push_z_factorization(&mut r, &g, &emb);
            Ok(r)
        }
        "lemma-y" => {
            let spec = spec_arg(c)?;
            if spec.family != Family::PMinus {
                return Err(UsageError("lemma-y needs --family p-".into()));
            }
            let (g, emb, q) = build_semidirect(spec, c)?;
            let mut r = new_report("verify lemma lemma-y", c, Some(spec));
            r.param("q", q);
            push_y_factorization(&mut r, &g, &emb)?;
            Ok(r)
        }
        "chern" => lemma_chern(c),
        "remark8" => lemma_evens_norm(c),
        other => Err(UsageError(format!(
            "unknown lemma {other:?}; expected centralizer-frattini, lambda, wittprep, prop-witt, lemma-z, lemma-y, chern or remark8"
        ))),
    }
}

fn lemma_centralizer_frattini(c: &Common) -> Run {
    let spec = spec_arg(c)?;
    let mut r = new_report("verify lemma centralizer-frattini", c, Some(spec));
    let rep = verify_centralizer_frattini(spec);
    let witness = rep.witness.as_ref().map(ToString::to_string);
    let detail = format!(
        "{} of {} order-p elements have Φ(C_P(g)) ≠ Z; exceptional group: {}",
        rep.failures.len(),
        rep.order_p_elements,
        rep.exceptional
    );
    let matches = if rep.exceptional {
        rep.witness == Some(spec.b(1))
    } else {
        rep.holds()
    };
    let mut check = Check::expect("centralizer-frattini", matches, detail, || {
        witness.clone().unwrap_or_else(|| "none".into())
    });
    if let (true, Some(w)) = (matches, witness) {
        check = check.with_witness(w);
    }
    r.push(check);
    Ok(r)
}

fn lemma_lambda(c: &Common) -> Run {
    let spec = spec_arg(c)?;
    if spec.prime() == 2 {
        return Err(UsageError("lemma lambda needs odd p".into()));
    }
    let mut r = new_report("verify lemma lambda", c, Some(spec));
    let forms = spec.derive_forms()?;
    let lambda = forms.lambda.expect("odd p carries λ");
    let b1 = spec.psi(&spec.b(1));
    let vectors: Vec<FpVector> = FpVector::all(spec.p, 2 * spec.n).collect();
    if spec.family == Family::PMinus {
        r.push(Check::expect(
            "normalized",
            lambda.eval(&spec.psi(&spec.a(1))) == 1,
            "λ(ψA_1) = 1",
            || format!("{:?}", lambda.coeffs()),
        ));
        let bad = vectors
            .iter()
            .find(|v| lambda.eval(v) != forms.f.eval(v, &b1).expect("dimensions match"));
        r.push(Check::expect(
            "lambda-is-pairing-with-b1",
            bad.is_none(),
            format!("λ(v) = f(v, ψB_1) for all {} vectors", vectors.len()),
            || bad.map(|v| format!("{:?}", v.coords())).unwrap_or_default(),
        ));
    } else {
        let bad = vectors.iter().find(|v| lambda.eval(v) != 0);
        r.push(Check::expect(
            "lambda-zero",
            bad.is_none(),
            "λ vanishes in exponent p",
            || bad.map(|v| format!("{:?}", v.coords())).unwrap_or_default(),
        ));
    }
    Ok(r)
}

fn lemma_wittprep(c: &Common) -> Run {
    let spec = spec_arg(c)?;
    if spec.family != Family::PMinus {
        return Err(UsageError("wittprep needs --family p-".into()));
    }
    let mut r = new_report("verify lemma wittprep", c, Some(spec));
    r.param("trials", c.trials);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let b1 = spec.b(1);
    let (mut applied, mut skipped) = (0usize, 0usize);
    let mut failure = None;
    for trial in 0..c.trials {
        let alpha = random_automorphism_with(spec, &mut rng);
        let h = random_subgroup_containing_z(spec, &mut rng);
        if h.contains(&b1) {
            skipped += 1;
            continue;
        }
        let phi = PartialIso::restriction(&alpha, &h)?;
        if phi.check_y_hypotheses().is_err() || phi.codomain().contains(&b1) {
            skipped += 1;
            continue;
        }
        applied += 1;
        let ok = fix_b1_prestep(&phi).and_then(|ext| {
            ext.check_y_hypotheses()?;
            let agrees = ext.apply(&b1) == Some(&b1)
                && phi
                    .domain()
                    .elements()
                    .iter()
                    .all(|x| ext.apply(x) == phi.apply(x));
            Ok(agrees && ext.domain().order() == phi.domain().order() * spec.prime() as usize)
        });
        match ok {
            Ok(true) => {}
            Ok(false) => {
                failure = Some(format!(
                    "trial {trial}: extension does not fix B1 or disagrees on H"
                ));
                break;
            }
            Err(e) => {
                failure = Some(format!("trial {trial}: {e}"));
                break;
            }
        }
    }
    let detail = format!(
        "{applied} subgroups with H ∩ Y = Z extended by B1 ↦ B1 ({skipped} trials had B1 ∈ H)"
    );
    let ok = failure.is_none() && applied > 0;
    r.push(Check::expect("fix-b1", ok, detail, || {
        failure
            .clone()
            .unwrap_or_else(|| "no trial qualified".into())
    }));
    Ok(r)
}

fn lemma_prop_witt(c: &Common) -> Run {
    let spec = spec_arg(c)?;
    let mut r = new_report("verify lemma prop-witt", c, Some(spec));
    r.param("trials", c.trials);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut succeeded = 0usize;
    let mut failure = None;
    for trial in 0..c.trials {
        let alpha = random_automorphism_with(spec, &mut rng);
        let h = random_subgroup_containing_z(spec, &mut rng);
        let phi = PartialIso::restriction(&alpha, &h)?;
        match extend_isomorphism(&phi) {
            Ok(beta) if phi.agrees_with(&beta) && is_automorphism(spec, beta.images()) => {
                succeeded += 1
            }
            Ok(beta) => {
                failure = Some(format!(
                    "trial {trial}: images {:?} disagree on H",
                    beta.images()
                ));
                break;
            }
            Err(e) => {
                failure = Some(format!("trial {trial}, |H| = {}: {e}", h.order()));
                break;
            }
        }
    }
    r.push(Check::expect(
        "round-trip",
        failure.is_none(),
        format!(
            "{succeeded}/{} restrictions re-extended and agree on H",
            c.trials
        ),
        || failure.clone().unwrap_or_default(),
    ));
    if spec.n == 1 && spec.order() <= EXHAUSTIVE_LIMIT {
        let x = cross_check_rank_one(spec)?;
        r.push(Check::expect(
            "rank-one-cross-check",
            x.passed(),
            format!(
                "{} isomorphisms, {} satisfy the hypotheses, {} extended, {} extendable by brute force, {} unextendable outside the hypotheses",
                x.isomorphisms, x.satisfying_hypotheses, x.extended, x.brute_force_extendable, x.unextendable_outside_hypotheses
            ),
            || x.mismatches.first().cloned().unwrap_or_else(|| "count mismatch".into()),
        ));
    }
    Ok(r)
}

#[derive(Debug, Deserialize)]
struct AutomorphismFile {
    images: Vec<String>,
}

fn load_automorphism(spec: GroupSpec, path: &PathBuf) -> Result<Automorphism, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let file: AutomorphismFile = serde_json::from_str(&text)?;
    let images = file
        .images
        .iter()
        .map(|s| s.parse::<Element>())
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = images.iter().find(|g| !spec.contains(g)) {
        return Err(UsageError(format!("{bad} is not an element of {spec}")));
    }
    Ok(Automorphism::new(spec, images)?)
}

/// `P ⋊ ⟨α⟩` with α from `--auto`, or the p'-part of a seeded random automorphism.
fn build_semidirect(
    spec: GroupSpec,
    c: &Common,
) -> Result<(EnumeratedGroup<SemidirectRep>, EmbeddedP, u64), UsageError> {
    let (alpha, q) = match &c.auto {
        Some(path) => {
            let alpha = load_automorphism(spec, path)?;
            let q = c.q.unwrap_or_else(|| alpha.order());
            (alpha, q)
        }
        None => random_automorphism(spec, c.seed).p_prime_part(),
    };
    let (g, emb) = semidirect_with_automorphism(spec, &alpha, q)?;
    Ok((g, emb, q))
}

fn push_semidirect_shape(
    r: &mut Report,
    g: &EnumeratedGroup<SemidirectRep>,
    emb: &EmbeddedP,
    q: u64,
) {
    let expected = q as usize * emb.subgroup().order();
    r.push(Check::expect(
        "semidirect-order",
        g.order() == expected && g.is_normal(emb.subgroup()),
        format!("|G| = {} = {q}·|P|, P normal", g.order()),
        || format!("|G| = {}", g.order()),
    ));
}

fn push_z_factorization<R: Representation>(
    r: &mut Report,
    g: &EnumeratedGroup<R>,
    emb: &EmbeddedP,
) {
    let rep = verify_z_factorization(g, emb);
    r.push(if rep.hypothesis_holds {
        Check::pass("z-hypothesis", "every order-p element has Φ(C_P(g)) = Z")
    } else {
        Check::hypothesis_violated(
            "z-hypothesis",
            format!("{} is one of the exceptional groups", emb.spec),
        )
    });
    let conclusion = |name: &str, bad: &[usize], what: &str| -> Check {
        let detail = format!(
            "{} of {} qualifying double cosets {what}",
            rep.qualifying - bad.len(),
            rep.qualifying
        );
        match bad.first() {
            None => Check::pass(name, detail),
            Some(&x) if !rep.hypothesis_holds => {
                Check::hypothesis_violated(name, detail).with_witness(g.describe(x))
            }
            Some(&x) => Check::fail(name, detail, g.describe(x)),
        }
    };
    r.push(conclusion(
        "z-normalizes",
        &rep.z_not_normalized,
        "satisfy Z^g = Z",
    ));
    r.push(conclusion(
        "z-factorizes",
        &rep.not_factorized,
        "lie in N_G(P)·C_G(Z)",
    ));
}

fn push_y_factorization<R: Representation>(
    r: &mut Report,
    g: &EnumeratedGroup<R>,
    emb: &EmbeddedP,
) -> Result<(), UsageError> {
    let rep = verify_y_factorization(g, emb)?;
    r.push(Check::expect(
        "y-omega1",
        rep.omega1_unique_exponent_p_maximal,
        "Ω₁(P) is the only maximal subgroup of exponent p",
        || "another exponent-p maximal subgroup".into(),
    ));
    r.push(Check::expect(
        "y-sylow-in-d2",
        rep.p_sylow_in_d2,
        "P is a Sylow p-subgroup of D₂",
        || "P ⊄ D₂ or not Sylow".into(),
    ));
    let detail = |bad: &[usize], what: &str| {
        format!(
            "{} of {} qualifying g ∈ C_G(Z) {what}",
            rep.qualifying - bad.len(),
            rep.qualifying
        )
    };
    r.push(Check::expect(
        "y-normalizes",
        rep.y_not_normalized.is_empty(),
        detail(&rep.y_not_normalized, "satisfy Y^g = Y"),
        || g.describe(rep.y_not_normalized[0]),
    ));
    r.push(Check::expect(
        "y-factorizes",
        rep.not_factorized.is_empty(),
        detail(&rep.not_factorized, "lie in (C_G(Z) ∩ N_G(P))·D₂"),
        || g.describe(rep.not_factorized[0]),
    ));
    Ok(())
}

fn plus_family(p: Prime) -> Family {
    if p.get() == 2 {
        Family::TwoPlus
    } else {
        Family::PPlus
    }
}

/// The restrictions of all linear characters of the order-p³ group to ⟨B_1, C⟩
/// hit each character of ⟨B_1, C⟩/⟨C⟩ exactly p times.
fn character_check(p: Prime) -> Check {
    let spec = GroupSpec::new(p.get(), 1, plus_family(p)).expect("valid plus-type spec");
    let counts = linear_character_restrictions(spec);
    let q = p.get() as usize;
    let ok = counts.len() == q && (0..p.get()).all(|mu| counts.get(&(mu, 0)) == Some(&q));
    Check::expect(
        "character-restrictions",
        ok,
        format!("each μβ occurs {q} times among the restricted characters"),
        || format!("{counts:?}"),
    )
}

fn lemma_chern(c: &Common) -> Run {
    let p = prime_arg(c)?;
    let mut r = new_report("verify lemma chern", c, None);
    r.param("p", p.get());
    r.push(character_check(p));
    let names = ["β"];
    let one = GradedPoly::one(p, &names);
    let beta = GradedPoly::variable(p, &names, 0);
    let linear = (0..p.get()).fold(one.clone(), |acc, mu| acc.mul(&one.add(&beta.scale(mu))));
    let expected_linear = one.sub(&beta.pow(p.get() as u64 - 1));
    r.push(Check::expect(
        "linear-factors",
        linear == expected_linear,
        format!("∏(1 + μβ) = {linear}"),
        || linear.to_string(),
    ));
    let total = chern_total_regular(p);
    r.push(Check::expect(
        "chern-identity",
        total == chern_expected(p),
        format!("∏(1 + μβ)^p = {total}"),
        || total.to_string(),
    ));
    Ok(r)
}

fn lemma_evens_norm(c: &Common) -> Run {
    let p = prime_arg(c)?;
    let spec = match &c.family {
        Some(_) => spec_arg(c)?,
        None => GroupSpec::new(p.get(), c.n, plus_family(p))?,
    };
    if spec.n < 2 {
        return Err(UsageError("remark8 needs --n at least 2".into()));
    }
    let mut r = new_report("verify lemma remark8", c, Some(spec));
    let sub = dual_substitution(&conjugation_matrix(spec, &spec.a(1)));
    r.push(Check::expect(
        "conjugation-by-a1",
        sub == gamma_shift(spec.p, spec.n),
        "A_1 acts on ⟨B_1..B_n, C⟩* by γ ↦ γ + β1",
        || format!("{sub:?}"),
    ));
    let rep = verify_evens_norm_action(spec.p, spec.n, &sub);
    r.push(Check::expect(
        "restrictions",
        rep.matches_expected(),
        format!(
            "Res η = {}, Res g*η = {}",
            rep.restricted, rep.restricted_pulled_back
        ),
        || format!("{} / {}", rep.restricted, rep.restricted_pulled_back),
    ));
    r.push(Check::expect(
        "not-invariant",
        rep.distinct(),
        "Res η ≠ Res g*η",
        || rep.restricted.to_string(),
    ));
    let both_killed: Vec<usize> = (0..spec.n).collect();
    r.push(Check::expect(
        "agree-on-c",
        rep.eta.restrict(&both_killed) == rep.pulled_back.restrict(&both_killed),
        "the two classes agree on ⟨C⟩",
        || rep.eta.restrict(&both_killed).to_string(),
    ));
    Ok(r)
}

fn verify_gl3(c: &Common) -> Run {
    let p = prime_arg(c)?;
    let mut r = new_report("verify gl3", c, None);
    r.param("p", p.get());
    let cap = c.cap.map(|x| x as usize).unwrap_or(DEFAULT_ENUMERATION_CAP);
    let g = enumerate_gl(p, 3, cap)?;
    let q = p.get() as u64;
    r.push(Check::expect(
        "gl3-order",
        g.order() as u64 == gl_order(q, 3),
        format!("|GL_3(F_{q})| = {}", g.order()),
        || g.order().to_string(),
    ));
    let emb = embed_extraspecial_gl3(&g, p)?;
    let spec = emb.spec;
    r.param("group", spec);
    let sylow = g.sylow_p(p.get(), Some(emb.subgroup()));
    r.push(Check::expect(
        "unitriangular-sylow",
        sylow == *emb.subgroup(),
        format!(
            "unitriangular P of order {} is Sylow",
            emb.subgroup().order()
        ),
        || format!("Sylow order {}", sylow.order()),
    ));
    let swap = g
        .index_of(&swap_first_two_coordinates(g.rep()))
        .expect("permutation matrix is invertible");
    r.push(Check::expect(
        "g-outside-normalizer",
        !g.normalizer(emb.subgroup()).contains(swap),
        "g ∉ N_G(P)",
        || g.describe(swap),
    ));
    let f = g.intersect_conjugate(emb.subgroup(), swap);
    let b1c = emb.image_of_subgroup(&Subgroup::closure(spec, &[spec.b(1), spec.c()]));
    r.push(Check::expect(
        "intersection",
        f == b1c,
        format!("P ∩ P^g = ⟨B_1, C⟩ of order {}", f.order()),
        || format!("order {}", f.order()),
    ));
    let (b1, cc) = (emb.image(&spec.b(1)), emb.image(&spec.c()));
    let exchanges = g.conj(b1, swap) == cc && g.conj(cc, swap) == b1;
    r.push(Check::expect(
        "g-exchanges-b1-c",
        exchanges,
        "conjugation by g swaps B_1 and C",
        || g.describe(g.conj(b1, swap)),
    ));
    r.push(character_check(p));
    r.push(Check::expect(
        "chern-identity",
        chern_total_regular(p) == chern_expected(p),
        format!("∏(1 + μβ)^p = {}", chern_expected(p)),
        || chern_total_regular(p).to_string(),
    ));

    let names = ["β", "γ"];
    let exp = q as u32 * (q as u32 - 1);
    let res_eta = GradedPoly::from_terms(p, &names, &[(vec![exp, 0], -1)]);
    let fusion = fusion_invariance_check(&g, emb.subgroup(), p, &[b1, cc], &res_eta);
    let detail = format!(
        "Res η = {res_eta}; {} of {} elements normalizing F move it ({} other fusions recorded)",
        fusion.non_invariant.len(),
        fusion.normalizing,
        fusion.other_fusions
    );
    let mut check = Check::expect(
        "eta-not-stable",
        fusion.certifies_non_stability(),
        detail,
        || "every normalizing g fixes Res η".into(),
    );
    if let Some(&x) = fusion.non_invariant.first() {
        check = check.with_witness(g.describe(x));
    }
    r.push(check);
    // coordinates in F of x ↦ g x g⁻¹ applied to B_1 and C
    let coords = |y: usize| -> Vec<i64> {
        let (a, b) = (0..q)
            .flat_map(|a| (0..q).map(move |b| (a, b)))
            .find(|&(a, b)| g.mul(g.power(b1, a), g.power(cc, b)) == y)
            .expect("F is normalized by g");
        vec![a as i64, b as i64]
    };
    let ginv = g.inv(swap);
    let t = FpMatrix::from_rows(p, &[coords(g.conj(b1, ginv)), coords(g.conj(cc, ginv))]);
    let swap_pullback = fusion
        .non_invariant
        .contains(&swap)
        .then(|| res_eta.pullback(&dual_substitution(&t)));
    let expected = GradedPoly::from_terms(p, &names, &[(vec![0, exp], -1)]);
    r.push(Check::expect(
        "swap-pullback",
        swap_pullback.as_ref() == Some(&expected),
        format!("g* Res η = {expected}"),
        || {
            swap_pullback
                .map(|x| x.to_string())
                .unwrap_or_else(|| "g fixes Res η".into())
        },
    ));
    let constant = fusion_invariance_check(
        &g,
        emb.subgroup(),
        p,
        &[b1, cc],
        &GradedPoly::one(p, &names),
    );
    r.push(Check::expect(
        "constant-class-stable",
        !constant.certifies_non_stability(),
        "the class 1 is invariant",
        || g.describe(constant.non_invariant[0]),
    ));
    push_z_factorization(&mut r, &g, &emb);
    Ok(r)
}

fn verify_semidirect(c: &Common) -> Run {
    let spec = spec_arg(c)?;
    let (g, emb, q) = build_semidirect(spec, c)?;
    let mut r = new_report("verify semidirect", c, Some(spec));
    r.param("q", q);
    push_semidirect_shape(&mut r, &g, &emb, q);
    push_z_factorization(&mut r, &g, &emb);
    if spec.family == Family::PMinus {
        push_y_factorization(&mut r, &g, &emb)?;
    }
    Ok(r)
}

fn verify_enumerate(path: &PathBuf, c: &Common) -> Run {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let input = MatrixGroupInput::from_json(&text)?;
    let cap = c.cap.map(|x| x as usize).unwrap_or(DEFAULT_ENUMERATION_CAP);
    let g = input.enumerate(cap)?;
    let mut r = new_report("verify enumerate", c, None);
    r.param("p", input.p);
    r.param("dim", input.dim);
    r.param("order", g.order());
    let mut rest = g.order();
    let mut primes = Vec::new();
    let mut d = 2;
    while rest > 1 {
        if rest % d == 0 {
            primes.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    for ell in primes {
        let s = g.sylow_p(ell as u32, None);
        let mut part = 1;
        let mut m = g.order();
        while m % ell == 0 {
            m /= ell;
            part *= ell;
        }
        r.push(Check::expect(
            &format!("sylow-{ell}"),
            s.order() == part && g.is_subgroup(&s),
            format!("order {}", s.order()),
            || format!("order {} instead of {part}", s.order()),
        ));
    }
    Ok(r)
}
