//! Acceptance run: one line per criterion, exit status 1 if any criterion fails.
//!
//! All arithmetic is exact, so every value comparison uses zero tolerance. The time limits
//! below are the only tolerances.

use csw_core::derivation::script::{replay_within, thm31_script, thm33_script, thm41_script, ReplayReport, StepStatus};
use csw_core::derivation::Engine;
use csw_core::free_algebra::FreeStarElement;
use csw_core::graph::{enumerate_paths, graph_from_shortcut, loop_graph, path_graph, Graph};
use csw_core::hom_verifier::{
    verify_action, verify_coproduct_compat, verify_filtration_preservation, verify_hom, verify_mutual_inverse, verify_state_preservation,
    verify_two_way, ActionSpec, Convention, VerificationReport,
};
use csw_core::linalg::{is_positive_definite, Matrix};
use csw_core::maps::{block_join, block_split, rename, wreath_coefficients, wreath_phi, wreath_psi};
use csw_core::path_algebra::{adjoint, equals, matrix_oracle, AlgebraElement};
use csw_core::presentations::{extract_graph_relations, free_product, h_inf, sh_inf, u_plus, wreath_s_plus, Functional, Presentation};
use csw_core::rep_finder::{check_representation, rotation, separate, soundness_probe, Representation, SearchBudget};
use csw_core::scalar::{C, Q};
use csw_core::states::{build_filtration, critical_kms, direct_sum_kms, f_gamma_matrix, gram_matrix, level_basis, tau};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Value comparisons are exact.
const VALUE_TOLERANCE: &str = "exact, zero tolerance";
const LIMIT_1: Duration = Duration::from_secs(5);
const LIMIT_2: Duration = Duration::from_secs(1);
const LIMIT_3: Duration = Duration::from_secs(600);
const LIMIT_4: Duration = Duration::from_secs(600);
const LIMIT_5: Duration = Duration::from_secs(900);
const LIMIT_6: Duration = Duration::from_secs(300);
const LIMIT_7: Duration = Duration::from_secs(300);
const LIMIT_8: Duration = Duration::from_secs(1200);

type Outcome = Result<String, String>;

fn arc(g: Graph) -> Arc<Graph> {
    Arc::new(g)
}

fn shortcut(s: &str) -> Result<Arc<Graph>, String> {
    graph_from_shortcut(s).map(arc).map_err(|e| e.to_string())
}

fn need(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn passed(r: &VerificationReport, what: &str) -> Result<usize, String> {
    match r.failures().next() {
        None => Ok(r.checks.len()),
        Some(c) => Err(format!("{what}: {} is {:?} ({})", c.name, c.status, c.witness.clone().unwrap_or_default())),
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let g = shortcut("L2+L2")?;
    let s = critical_kms(&g).map_err(err)?;
    let mut checked = 0;
    for la in 0..=3 {
        for lb in 0..=3 {
            for gamma in enumerate_paths(&g, la) {
                for mu in enumerate_paths(&g, lb).into_iter().filter(|mu| mu.range(&g) == gamma.range(&g)) {
                    let v = s.evaluate(&AlgebraElement::path_term(&g, &gamma, &mu)).map_err(err)?;
                    let expected = if gamma == mu { Q::new(1, 2i64.pow(la as u32) * 2) } else { Q::zero() };
                    need(v == C::real(expected.clone()), format!("value at ({}, {}) is {v}, expected {expected}", gamma.label(&g), mu.label(&g)))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} pairs of paths up to length 3"))
}

fn criterion_2() -> Outcome {
    for (n, k) in [(2usize, 2usize), (3, 2), (2, 3)] {
        let g = shortcut(&vec![format!("L{n}"); k].join("+"))?;
        let f = f_gamma_matrix(&g).map_err(err)?;
        need(f == vec![Q::int(n as i64); n * k], format!("F for N={n}, K={k} is {f:?}"))?;
    }
    Ok("N·I for (2,2), (3,2), (2,3)".into())
}

fn cross_zeros(ns: &[usize]) -> Vec<FreeStarElement> {
    let mut offs = vec![0];
    for n in ns {
        offs.push(offs.last().unwrap() + n);
    }
    let block = |i: usize| (0..ns.len()).find(|&t| i > offs[t] && i <= offs[t + 1]).unwrap();
    let total = offs[ns.len()];
    let mut out = vec![];
    for i in 1..=total {
        for j in 1..=total {
            if block(i) != block(j) {
                out.push(FreeStarElement::gen("q", i as u32, j as u32));
            }
        }
    }
    out
}

fn cross_zero_theorem(r: &ReplayReport, ext: &Presentation) -> Outcome {
    need(r.passed(), format!("replay stopped at step {:?}", r.failing_step))?;
    let zeros = cross_zeros(&[3, 2]);
    need(zeros.len() == 12, "expected 12 cross entries")?;
    let mut engine = Engine::new(ext, 4).map_err(err)?;
    for z in &zeros {
        need(r.concluded(z), format!("{z} was not concluded"))?;
        let v = engine.check(z).map_err(err)?;
        need(v.derivable(), format!("{z} not derivable from the replayed relations"))?;
        let cert = v.certificate.unwrap_or_default();
        need(engine.expand_certificate(&cert).map_err(err)? == *z, format!("certificate for {z} does not re-expand"))?;
    }
    let fp = free_product(&[u_plus(3), u_plus(2)]);
    let two_way = verify_two_way(ext, &fp, &block_split(&[3, 2]), &block_join(&[3, 2]), 4).map_err(err)?;
    let checks = passed(&two_way, "two-way")?;
    Ok(format!("12 cross zeros at degree {} (bound {}), two-way against U_3^+ * U_2^+ at D=4 ({checks} checks)", r.degree, r.bound))
}

fn criterion_3() -> Outcome {
    let s = thm31_script(&[3, 2]).map_err(err)?;
    let p = s.presentation().map_err(err)?;
    let r = replay_within(&s, &p, 6).map_err(err)?;
    cross_zero_theorem(&r, &r.extended(&p))
}

fn criterion_4() -> Outcome {
    let s = thm33_script(&[3, 2]).map_err(err)?;
    let p = s.presentation().map_err(err)?;
    need(p.relations.iter().any(|r| r.label.contains("Ut* F Ut")), "direct-sum KMS unitarity family missing")?;
    let r = replay_within(&s, &p, 6).map_err(err)?;
    cross_zero_theorem(&r, &r.extended(&p))
}

fn criterion_5() -> Outcome {
    let s = thm41_script(2, 2).map_err(err)?;
    let p = s.presentation().map_err(err)?;
    let r = replay_within(&s, &p, 8).map_err(err)?;
    need(r.passed(), format!("replay stopped at step {:?}", r.failing_step))?;
    for family in ["(qs3)", "(qs3')", "(qs4)", "(qs4')", "(qs5)", "(qs5')", "(proj)", "column sum of c", "row sum of c", "(ortho)", "is a projection"] {
        let n = r.steps.iter().filter(|x| x.label.contains(family) && x.status == StepStatus::Verified).count();
        need(n > 0, format!("no verified step for {family}"))?;
    }
    let ext = r.extended(&p);
    let w = wreath_s_plus(&u_plus(2), 2).map_err(err)?;
    let (phi, psi) = (wreath_phi(2, 2), wreath_psi(2, 2));
    let a = passed(&verify_hom(&ext, &w, &phi, 8).map_err(err)?, "φ")?;
    let b = passed(&verify_hom(&w, &ext, &psi, 4).map_err(err)?, "ψ")?;
    let c = passed(&verify_mutual_inverse(&ext, &w, &phi, &psi, 4).map_err(err)?, "mutual inverse")?;
    let d = passed(&verify_coproduct_compat(&ext, &w, &phi, 8, None).map_err(err)?, "coproduct")?;
    Ok(format!("replay at degree {}, φ {a} checks at D=8, ψ {b} at D=4, inverses {c} at D=4, coproduct {d} at D=8", r.degree))
}

fn criterion_6() -> Outcome {
    let g = shortcut("L2+L2")?;
    let w = wreath_s_plus(&u_plus(2), 2).map_err(err)?;
    let spec = ActionSpec::new(g.clone(), wreath_coefficients(2, 2), Convention::Column).map_err(err)?;
    let a = passed(&verify_action(&spec, &w, 8, 2).map_err(err)?, "action")?;
    let t = passed(&verify_state_preservation(&spec, &tau(&g).map_err(err)?, &w, 2, 8).map_err(err)?, "τ")?;
    let k = passed(&verify_state_preservation(&spec, &direct_sum_kms(&g).map_err(err)?, &w, 2, 8).map_err(err)?, "⊕KMS")?;
    let f = build_filtration(&direct_sum_kms(&g).map_err(err)?, 2).map_err(err)?;
    let fr = verify_filtration_preservation(&spec, &f, &w, 8).map_err(err)?;
    for k in 0..=2 {
        need(fr.checks.iter().any(|c| c.name == format!("preserve W_{k}")), format!("W_{k} not checked"))?;
    }
    let fc = passed(&fr, "filtration")?;
    Ok(format!("action {a} checks, τ {t}, ⊕KMS {k} at level 2, filtration {fc} subspaces incl. W_0..W_2"))
}

fn criterion_7() -> Outcome {
    for (graph, n) in [("P1+P1", 2u32), ("P1+So2", 3)] {
        let p = extract_graph_relations(&shortcut(graph)?, Functional::Tau, 1).map_err(err)?;
        let sh = sh_inf(n);
        passed(&verify_two_way(&p, &sh, &rename("q", "u", n, false), &rename("u", "q", n, false), 4).map_err(err)?, graph)?;
    }
    let (a, b) = (sh_inf(2), h_inf(2));
    let map = csw_core::hom_verifier::GeneratorMap::identity(&b);
    let w = separate(&a, &b, &map, SearchBudget { max_dim: 2, ..Default::default() }).ok_or("no separating representation within dimension 2")?;
    need(w.representation.dim <= 2, "witness too large")?;
    need(check_representation(&a, &w.representation).map_err(err)?.passed, "witness does not satisfy sh_inf(2)")?;
    need(!w.residual.is_zero(), "witness residual is zero")?;
    Ok(format!("both two-way at D=4; witness in dimension {} violates {}", w.representation.dim, w.violated))
}

// ---- criterion 8 ----

fn word(g: &Arc<Graph>, picks: &[(u8, usize)], coef: i64) -> AlgebraElement {
    let mut acc = AlgebraElement::one(g).scale(&C::int(coef));
    for &(kind, idx) in picks {
        let f = match kind {
            0 => AlgebraElement::s(g, idx % g.num_edges()),
            1 => AlgebraElement::s_star(g, idx % g.num_edges()),
            _ => AlgebraElement::p(g, idx % g.num_vertices()),
        };
        acc = acc.mul(&f);
    }
    acc
}

fn elements() -> impl Strategy<Value = Vec<(Vec<(u8, usize)>, i64)>> {
    prop::collection::vec((prop::collection::vec((0u8..3, 0usize..6), 0..4), -3i64..4), 1..3)
}

fn element(g: &Arc<Graph>, ws: &[(Vec<(u8, usize)>, i64)]) -> AlgebraElement {
    ws.iter().fold(AlgebraElement::zero(g), |acc, (w, c)| acc.add(&word(g, w, *c)))
}

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() })
}

fn path_algebra_suites() -> Result<usize, String> {
    let graphs = [loop_graph(2), loop_graph(3), path_graph(2), graph_from_shortcut("P1+So2")];
    let mut cases = 0;
    for g in graphs {
        let g = arc(g.map_err(err)?);
        runner()
            .run(&(elements(), elements(), elements()), |(a, b, c)| {
                let (a, b, c) = (element(&g, &a), element(&g, &b), element(&g, &c));
                prop_assert!(equals(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
                prop_assert_eq!(adjoint(&adjoint(&a)), a.clone());
                prop_assert!(equals(&adjoint(&a.mul(&b)), &adjoint(&b).mul(&adjoint(&a))));
                Ok(())
            })
            .map_err(|e| format!("path algebra on {}: {e}", g.to_text().replace('\n', "; ")))?;
        cases += 200;
    }
    runner()
        .run(&(1usize..5, elements(), elements()), |(n, a, b)| {
            let g = arc(path_graph(n).unwrap());
            let (a, b) = (element(&g, &a), element(&g, &b));
            let (ma, mb) = (matrix_oracle(&a).unwrap(), matrix_oracle(&b).unwrap());
            prop_assert_eq!(equals(&a, &b), ma == mb);
            prop_assert_eq!(matrix_oracle(&a.mul(&b)).unwrap(), ma.mul(&mb));
            prop_assert_eq!(matrix_oracle(&adjoint(&a)).unwrap(), ma.adjoint());
            Ok(())
        })
        .map_err(|e| format!("matrix oracle: {e}"))?;
    Ok(cases + 200)
}

fn gram_suite() -> Result<usize, String> {
    let mut n = 0;
    for s in ["L2", "L3", "L2+L2", "L2+L3", "L3+L3", "L2+L2+L2"] {
        let g = shortcut(s)?;
        let st = critical_kms(&g).map_err(err)?;
        for k in 1..=2 {
            let gm = gram_matrix(&st, &level_basis(&g, k)).map_err(err)?;
            need(is_positive_definite(&gm) == st.faithful, format!("Gram definiteness disagrees with the flag on {s}, level {k}"))?;
            n += 1;
        }
    }
    Ok(n)
}

fn scalar_pattern(rows: &[&[i64]]) -> Matrix {
    Matrix::from_fn(rows.len(), rows.len(), |i, j| C::int(rows[i][j]))
}

fn pauli_x() -> Matrix {
    scalar_pattern(&[&[0, 1], &[1, 0]])
}

fn pauli_z() -> Matrix {
    scalar_pattern(&[&[1, 0], &[0, -1]])
}

/// `U_3^+ * U_2^+` represented by a permutation times `X` and a rotation times `Z`, pulled back to the union of loops.
fn loops_rep() -> Result<Representation, String> {
    let perm = scalar_pattern(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
    let first = Representation::tensor_pattern("P x X", "q1", &perm, &pauli_x());
    let second = Representation::tensor_pattern("R x Z", "q2", &rotation(3, 4, 5), &pauli_z());
    let free = first.merge(&second, "free product").map_err(err)?;
    free.pullback(&block_split(&[3, 2]), "block pullback").map_err(err)
}

/// The wreath product represented by a rotation and a permutation in the copies and the swap in `t`.
fn wreath_rep() -> Result<Representation, String> {
    let u1 = Representation::tensor_pattern("R x X", "u1", &rotation(5, 12, 13), &pauli_x());
    let u2 = Representation::tensor_pattern("P x Z", "u2", &scalar_pattern(&[&[0, 1], &[1, 0]]), &pauli_z());
    let t = Representation::tensor_pattern("swap", "t", &scalar_pattern(&[&[0, 1], &[1, 0]]), &Matrix::identity(2));
    let w = u1.merge(&u2, "copies").and_then(|x| x.merge(&t, "wreath")).map_err(err)?;
    w.pullback(&wreath_phi(2, 2), "wreath pullback").map_err(err)
}

fn probe(name: &str, r: &ReplayReport, p: &Presentation, rep: &Representation, degree: usize) -> Result<usize, String> {
    need(check_representation(p, rep).map_err(err)?.passed, format!("{name}: representation fails the presentation"))?;
    let mut elements: Vec<FreeStarElement> = r.facts.iter().map(|f| f.element.clone()).collect();
    let engine = csw_core::derivation::ideal_basis(&r.extended(p), degree).map_err(err)?;
    elements.extend(engine.basis());
    let report = soundness_probe(&elements, rep).map_err(err)?;
    if let Some(first) = report.violations.first() {
        return Err(format!("{name}: {} derivable elements are nonzero, first {first}", report.violations.len()));
    }
    Ok(report.checked)
}

fn criterion_8() -> Outcome {
    let pa = path_algebra_suites()?;
    let gram = gram_suite()?;
    let mut probed = 0;
    for s in [thm31_script(&[3, 2]), thm33_script(&[3, 2]), thm41_script(2, 2)] {
        let s = s.map_err(err)?;
        let p = s.presentation().map_err(err)?;
        let r = replay_within(&s, &p, s.degree).map_err(err)?;
        need(r.passed(), format!("{} did not replay", s.name))?;
        let rep = if s.name.starts_with("thm41") { wreath_rep()? } else { loops_rep()? };
        probed += probe(&s.name, &r, &p, &rep, 4)?;
    }
    let s = thm31_script(&[2, 2]).map_err(err)?;
    let r = replay_within(&s, &s.presentation().map_err(err)?, 6).map_err(err)?;
    let failing = r.failing_step.ok_or("equal-parameter replay passed")?;
    let step = &r.steps[failing];
    need(step.status == StepStatus::Rejected && step.label.contains("weighted cross squares"), format!("negative control failed at {}", step.label))?;
    Ok(format!(
        "{pa} path-algebra cases, {gram} Gram checks, {probed} derivable elements probed, (2,2) rejected at step {failing}: {}",
        step.message.clone().unwrap_or_default()
    ))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 8] = [
        (1, "critical KMS values on two copies of L_2", LIMIT_1, criterion_1),
        (2, "F matrix equals N·I", LIMIT_2, criterion_2),
        (3, "cross zeros for L_3 ⊔ L_2 from τ", LIMIT_3, criterion_3),
        (4, "cross zeros for L_3 ⊔ L_2 from direct-sum KMS", LIMIT_4, criterion_4),
        (5, "wreath product closed form at N=2, K=2", LIMIT_5, criterion_5),
        (6, "wreath action, states and filtration", LIMIT_6, criterion_6),
        (7, "counterexamples and separation", LIMIT_7, criterion_7),
        (8, "property suites, soundness audit, negative control", LIMIT_8, criterion_8),
    ];
    println!("acceptance ({VALUE_TOLERANCE})");
    let mut failures = 0;
    for (n, title, limit, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(e) => (false, e),
        };
        failures += usize::from(!ok);
        println!(
            "criterion {n}: {} {title} [{:.2}s of {}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
