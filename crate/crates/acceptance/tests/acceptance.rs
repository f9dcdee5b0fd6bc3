//! Acceptance criteria 1–12, one line each. Runs without the libtest harness
//! so the lines always reach stdout; exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cyclic_mub::entanglement::{annotate, class_partitions, finest_partition};
use cyclic_mub::fixtures::{self, GeneratorSpec};
use cyclic_mub::gf2::{fibonacci_index, Gf2Poly};
use cyclic_mub::mub::{
    build_c, build_classes, c_power, c_power_closed_form, classify_set_type, generator_matrix,
    random_symplectic, validate_set, validate_triple, CyclicMubSet,
};
use cyclic_mub::search::{find_triples, SearchKind, SearchQuery};
use cyclic_mub::sim::{
    class_schmidt_partition, conjugation_mismatch, verify_cyclic, verify_unbiased, SetUnitaries,
};
use cyclic_mub::synth::{circuit_symplectic, synth_field_based, synthesis_gate_bound, synthesize};
use cyclic_mub::{Error, Gf2Matrix, SetType};

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// One-line error text; validation errors name their failing checks.
fn brief(e: &Error) -> String {
    match e {
        Error::InvalidTriple(r) | Error::InvalidGenerator(r) => {
            let names: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
            format!("invalid triple ({} fails)", names.join(", "))
        }
        other => other.to_string(),
    }
}

fn valid_set(spec: &GeneratorSpec) -> Result<CyclicMubSet, String> {
    let g = spec.generator().map_err(err)?;
    let mut set = build_classes(&g).map_err(err)?;
    let report = validate_set(&set);
    ensure!(report.is_valid(), "{}: set invalid\n{report}", spec.name);
    annotate(&mut set).map_err(err)?;
    Ok(set)
}

fn counts(set: &CyclicMubSet) -> Vec<usize> {
    set.structure
        .as_ref()
        .map(|s| s.counts.clone())
        .unwrap_or_default()
}

fn block_form(b: &Gf2Matrix) -> Gf2Matrix {
    let n = b.rows();
    let i = Gf2Matrix::identity(n).unwrap();
    Gf2Matrix::from_blocks(b, &i, &i, &Gf2Matrix::zeros(n, n).unwrap()).unwrap()
}

/// Partition route vs Schmidt-rank route for every class.
fn schmidt_disagreements(set: &CyclicMubSet) -> Result<Vec<String>, String> {
    let parts = class_partitions(set).map_err(err)?;
    let mut bad = Vec::new();
    for (class, p) in set.classes.iter().zip(&parts) {
        let s = class_schmidt_partition(class).map_err(err)?;
        if &s != p {
            bad.push(format!(
                "class {}: partition {p} vs Schmidt {s}",
                class.index
            ));
        }
    }
    Ok(bad)
}

fn criterion_1() -> Outcome {
    let spec = fixtures::field3();
    let t = spec.triple().ok_or("field3 has no triple")?;
    ensure!(
        validate_triple(t).is_valid(),
        "triple invalid:\n{}",
        validate_triple(t)
    );
    let g = build_c(t).map_err(err)?;
    ensure!(g.c() == &block_form(&t.b), "C != [[B, I], [I, 0]]");
    let set = valid_set(&spec)?;
    ensure!(set.classes.len() == 9, "{} classes", set.classes.len());
    let total: usize = set.classes.iter().map(|c| c.elements.len()).sum();
    ensure!(total == 63, "classes hold {total} vectors");
    ensure!(counts(&set) == [3, 0, 6], "structure {:?}", counts(&set));
    Ok("C = [[B,I],[I,0]], 9 classes partition 63 vectors, structure (3,0,6)".into())
}

fn criterion_2() -> Outcome {
    let spec = fixtures::group3();
    let t = spec.triple().ok_or("group3 has no triple")?;
    let reference = spec.reference_c.as_ref().ok_or("no reference C")?;
    ensure!(
        &build_c(t).map_err(err)?.c().clone() == reference,
        "build_C differs from the published C"
    );
    let set = valid_set(&spec)?;
    ensure!(
        set.set_type == SetType::Group,
        "classified as {}",
        set.set_type
    );
    ensure!(counts(&set) == [2, 3, 4], "structure {:?}", counts(&set));
    Ok("build_C bit-exact against the published matrix, structure (2,3,4)".into())
}

/// Runs the semigroup chain on `spec`, collecting every sub-check so a
/// failure reports all of them.
fn semigroup_chain(spec: &GeneratorSpec) -> (Vec<String>, Vec<String>) {
    let (mut ok, mut bad) = (Vec::new(), Vec::new());
    let t = spec.triple().expect("semigroup fixtures carry a triple");
    let reference = fixtures::semigroup3_printed()
        .reference_c
        .expect("published C");

    match generator_matrix(t) {
        Ok(c) if c == reference => ok.push("C equals the published matrix".to_string()),
        Ok(c) => {
            let diff = (&c + &reference).count_ones();
            bad.push(format!(
                "C differs from the published matrix in {diff} bits"
            ))
        }
        Err(e) => bad.push(format!("C not built: {e}")),
    }
    match classify_set_type(t) {
        Ok(SetType::Semigroup) => ok.push("classified semigroup".into()),
        Ok(k) => bad.push(format!("classified {k}")),
        Err(e) => bad.push(format!("classify_set_type: {}", brief(&e))),
    }
    match spec
        .generator()
        .map_err(|e| brief(&e))
        .and_then(|_| valid_set(spec))
    {
        Ok(set) => {
            let c = counts(&set);
            if c == [1, 6, 2] {
                ok.push("structure (1,6,2)".into());
            } else {
                bad.push(format!("structure {c:?}, expected (1,6,2)"));
            }
            match schmidt_disagreements(&set) {
                Ok(d) if d.is_empty() => ok.push("Schmidt oracle agrees".into()),
                Ok(d) => bad.push(d.join("; ")),
                Err(e) => bad.push(e),
            }
        }
        Err(e) => bad.push(format!(
            "no set, so no structure vector or Schmidt check: {e}"
        )),
    }
    (ok, bad)
}

fn criterion_3() -> Outcome {
    // the triple exactly as published
    let (ok, bad) = semigroup_chain(&fixtures::semigroup3_printed());
    if bad.is_empty() {
        Ok(ok.join(", "))
    } else {
        Err(format!(
            "published triple: passed [{}]; failed [{}]",
            ok.join(", "),
            bad.join("; ")
        ))
    }
}

fn criterion_3_corrected() -> Outcome {
    let (ok, bad) = semigroup_chain(&fixtures::semigroup3());
    // the corrected triple cannot reproduce the published (non-symplectic) C
    let bad: Vec<_> = bad
        .into_iter()
        .filter(|b| !b.starts_with("C differs"))
        .collect();
    ensure!(bad.is_empty(), "{}", bad.join("; "));
    Ok(format!("A[1][0] = 0 variant: {}", ok.join(", ")))
}

fn criterion_4() -> Outcome {
    let spec = fixtures::offset3();
    let set = valid_set(&spec)?;
    ensure!(
        !set.generator.has_standard_seed(),
        "seed X-part was dropped"
    );
    ensure!(counts(&set) == [0, 9, 0], "structure {:?}", counts(&set));
    Ok("explicit C with offset seed gives a complete set, structure (0,9,0)".into())
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for name in fixtures::THREE_QUBIT_SETS {
        let g = fixtures::by_name(name).unwrap().generator().map_err(err)?;
        let su = SetUnitaries::new(&g).map_err(err)?;
        let r = verify_unbiased(&su.u, &su.w, TOL);
        ensure!(
            r.passed,
            "{name}: deviation {:.3e} ({})",
            r.worst_deviation,
            r.witness.unwrap_or_default()
        );
        worst = worst.max(r.worst_deviation);
    }
    Ok(format!(
        "all 4 fixtures flat for m = 1..8, worst deviation {worst:.2e}"
    ))
}

fn criterion_6() -> Outcome {
    for name in fixtures::THREE_QUBIT_SETS {
        let g = fixtures::by_name(name).unwrap().generator().map_err(err)?;
        ensure!(g.c().pow(9).map_err(err)?.is_identity(), "{name}: C^9 != I");
        let su = SetUnitaries::new(&g).map_err(err)?;
        let r = verify_cyclic(&su.u, TOL);
        ensure!(r.passed, "{name}: U^9 not ∝ I ({:.3e})", r.worst_deviation);
    }
    let g2 = fixtures::field2().generator().map_err(err)?;
    ensure!(
        g2.c().pow(5).map_err(err)?.is_identity(),
        "field2: C^5 != I"
    );
    ensure!(!g2.c().is_identity(), "field2: C = I");
    Ok("C^9 = I and U^9 ∝ I for 4 fixtures; C^5 = I for n = 2".into())
}

fn criterion_7() -> Outcome {
    let p = Gf2Poly::from_exponents(&[3, 1, 0]);
    let j = fibonacci_index(&p, None).map_err(err)?;
    ensure!(j == 9, "index of x^3+x+1 is {j}");
    let hits: Vec<String> = (0u64..8)
        .map(|low| Gf2Poly::from_mask(low | 8))
        .filter(|q| fibonacci_index(q, None).ok() == Some(9))
        .map(|q| q.to_string())
        .collect();
    ensure!(hits == ["x^3 + x + 1"], "index-9 cubics: {hits:?}");
    Ok("index(x^3+x+1) = 9; it is the only monic cubic with index 9".into())
}

fn criterion_8() -> Outcome {
    let mut compared = 0;
    for name in ["field2", "field3", "group3", "semigroup3"] {
        let spec = fixtures::by_name(name).unwrap();
        let t = spec.triple().unwrap();
        let g = build_c(t).map_err(err)?;
        for j in 0..=g.d() + 1 {
            let closed = c_power_closed_form(t, j).map_err(err)?;
            ensure!(closed == c_power(&g, j), "{name}: j = {j} differs");
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} powers (n = 2, 3; j = 0..d+1) agree bit-exactly"
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut inputs: Vec<(String, Gf2Matrix)> = Vec::new();
    for name in fixtures::THREE_QUBIT_SETS {
        let g = fixtures::by_name(name).unwrap().generator().map_err(err)?;
        inputs.push((name.to_string(), g.c().clone()));
    }
    for n in [3, 4] {
        for k in 0..20 {
            inputs.push((
                format!("random n={n} #{k}"),
                random_symplectic(n, &mut rng).map_err(err)?,
            ));
        }
    }
    let mut conj = 0;
    for (label, c) in &inputs {
        let circ = synthesize(c).map_err(err)?;
        ensure!(
            &circuit_symplectic(&circ).map_err(err)? == c,
            "{label}: round trip differs"
        );
        let n = c.rows() / 2;
        ensure!(
            circ.len() <= synthesis_gate_bound(n),
            "{label}: {} gates",
            circ.len()
        );
        if n == 3 {
            if let Some(a) = conjugation_mismatch(&circ, c, TOL).map_err(err)? {
                return Err(format!("{label}: conjugation fails at {a}"));
            }
            conj += 1;
        }
    }
    Ok(format!(
        "{} matrices round-trip; conjugation exhaustive over 63 vectors for {conj} n = 3 circuits",
        inputs.len()
    ))
}

fn criterion_10() -> Outcome {
    let mut report = Vec::new();
    let b_field = fixtures::field3().triple().unwrap().b.clone();
    let mut bs = vec![(3usize, b_field)];
    for n in 2..=6 {
        let out = find_triples(&SearchQuery::new(n, SearchKind::Field, 1)).map_err(err)?;
        let t = out
            .triples
            .first()
            .ok_or(format!("no field triple for n = {n}"))?;
        bs.push((n, t.b.clone()));
    }
    for (k, (n, b)) in bs.iter().enumerate() {
        let circ = synth_field_based(b).map_err(err)?;
        let upper = (0..*n)
            .flat_map(|i| (i..*n).map(move |j| (i, j)))
            .filter(|&(i, j)| b.get(i, j))
            .count();
        ensure!(
            circ.len() == n + upper,
            "n = {n}: {} gates, expected {}",
            circ.len(),
            n + upper
        );
        ensure!(
            circuit_symplectic(&circ).map_err(err)? == block_form(b),
            "n = {n}: wrong action"
        );
        if k == 0 {
            ensure!(circ.len() == 7, "B_field: {} gates", circ.len());
            report.push("B_field 7".to_string());
        } else {
            report.push(format!("n={n} {}", circ.len()));
        }
    }
    Ok(format!(
        "gate counts = n + nnz_upper(B): {}",
        report.join(", ")
    ))
}

fn search_sets(n: usize) -> Result<Vec<(String, CyclicMubSet)>, String> {
    let mut out = Vec::new();
    for kind in SearchKind::ALL {
        let found = find_triples(&SearchQuery::new(n, kind, 1)).map_err(err)?;
        if let Some(t) = found.triples.first() {
            out.push((
                format!("{kind}{n}"),
                valid_set(&GeneratorSpec::from_triple(format!("{kind}{n}"), t.clone()))?,
            ));
        }
    }
    Ok(out)
}

fn criterion_11() -> Outcome {
    let sets = search_sets(4)?;
    let kinds: Vec<&str> = sets.iter().map(|(k, _)| k.as_str()).collect();
    ensure!(sets.len() == 3, "kinds found: {kinds:?}");
    let mut summary = Vec::new();
    for (label, set) in &sets {
        ensure!(
            set.classes.len() == 17,
            "{label}: {} classes",
            set.classes.len()
        );
        let total: usize = set.classes.iter().map(|c| c.elements.len()).sum();
        ensure!(total == 255, "{label}: {total} vectors");
        let su = SetUnitaries::new(&set.generator).map_err(err)?;
        let r = verify_unbiased(&su.u, &su.w, TOL);
        ensure!(r.passed, "{label}: deviation {:.3e}", r.worst_deviation);
        let sv = set.structure.as_ref().ok_or("no structure")?;
        ensure!(
            sv.total() == 17,
            "{label}: structure sums to {}",
            sv.total()
        );
        summary.push(format!("{label} {sv}"));
    }
    Ok(format!(
        "n = 4 sets valid and unbiased: {}",
        summary.join(", ")
    ))
}

fn criterion_12() -> Outcome {
    let mut sets: Vec<(String, CyclicMubSet)> = Vec::new();
    for name in ["field2", "field3", "group3", "semigroup3", "offset3"] {
        sets.push((
            name.to_string(),
            valid_set(&fixtures::by_name(name).unwrap())?,
        ));
    }
    for n in 2..=4 {
        sets.extend(search_sets(n)?);
    }
    let mut classes = 0;
    for (label, set) in &sets {
        let bad = schmidt_disagreements(set)?;
        ensure!(bad.is_empty(), "{label}: {}", bad.join("; "));
        for class in &set.classes {
            // shapes come out of the same partitions, but check the public route too
            let p = finest_partition(class).map_err(err)?;
            ensure!(
                p.shape() == class_schmidt_partition(class).map_err(err)?.shape(),
                "{label}: shape"
            );
        }
        classes += set.classes.len();
    }
    Ok(format!(
        "{classes} classes across {} sets agree with the Schmidt-rank oracle",
        sets.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("3*", criterion_3_corrected),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
        ("11", criterion_11),
        ("12", criterion_12),
    ];
    // failures are reported as lines, not backtraces
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (id, f) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        match outcome {
            Ok(detail) => println!("criterion {id:>2}: PASS  {detail}"),
            Err(detail) => {
                println!("criterion {id:>2}: FAIL  {detail}");
                failed.push(id);
            }
        }
    }
    println!(
        "(3* reruns criterion 3 on the one-bit corrected semigroup triple; it is informational)"
    );
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {}", failed.join(", "));
        ExitCode::FAILURE
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into())
}
