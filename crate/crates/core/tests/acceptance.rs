//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use schmidt_herm::dense::{kron_complex, pauli, BipartiteDims, ComplexMatrix, RealMatrix};
use schmidt_herm::herm_decomp::{decompose_herm, lemma2_check, transform_blocks_herm, HermTerm};
use schmidt_herm::multipartite::{decompose_multi, MultiDims};
use schmidt_herm::separability::{
    analyze, bounds, gauge_transform, normalize_decomposition, search_indicator, SearchConfig, Verdict,
};
use schmidt_herm::states::{horodecki_2x4, partial_transpose_min_eig, random_density, random_separable_mixture, werner};
use schmidt_herm::sym_decomp::{decompose_sym, transform_blocks_sym, DecomposeOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(actual: f64, expected: f64, tol: f64, what: &str) -> Result<(), String> {
    check((actual - expected).abs() <= tol, || {
        format!("{what}: got {actual:.17e}, expected {expected:.17e} (tol {tol:e})")
    })
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    check(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn opts() -> DecomposeOptions {
    DecomposeOptions::default()
}

fn criterion_1() -> Outcome {
    let eye = ComplexMatrix::identity(2);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for f in [0.0, 0.3, 0.7, 1.0] {
        let a = werner(f);
        let d = decompose_sym(a.re(), dims(2, 2), &opts()).map_err(|e| e.to_string())?;
        let g = (1.0 - 4.0 * f).abs() / 6.0;
        for (k, expected) in [0.5, g, g].iter().enumerate() {
            close(d.singular_values[k], *expected, 1e-12, &format!("F={f} singular value {k}"))?;
        }
        let target = kron_complex(&eye, &eye)
            .scale(0.25)
            .add(
                &kron_complex(&pauli(1), &pauli(1))
                    .add(&kron_complex(&pauli(3), &pauli(3)))
                    .unwrap()
                    .scale((1.0 - 4.0 * f) / 12.0),
            )
            .unwrap();
        let err = d.reconstruct().sub(target.re()).unwrap().max_abs();
        worst = worst.max(err);
        check(err <= 1e-12, || format!("F={f} approximation error {err:e}"))?;
        close(d.residual, (4.0 * f - 1.0).abs() / 6.0, 1e-12, &format!("F={f} residual"))?;
        let blocks = transform_blocks_sym(a.re(), dims(2, 2)).map_err(|e| e.to_string())?;
        check(blocks.a11.shape() == (1, 1), || "Â₁₁ shape".into())?;
        close(blocks.a11[(0, 0)], (4.0 * f - 1.0) / 6.0, 1e-12, &format!("F={f} Â₁₁"))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_millis(100), "werner symmetric suite")?;
    Ok(format!("max approximation error {worst:.1e}, {elapsed:.1?}"))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for f in [0.0, 0.1, 0.25, 0.3, 0.5, 0.7, 1.0] {
        let a = werner(f);
        let d = decompose_herm(&a, dims(2, 2), &opts()).map_err(|e| e.to_string())?;
        let rel = d.residual / a.frobenius();
        worst = worst.max(rel);
        check(rel <= 1e-12, || format!("F={f} relative reconstruction {rel:e}"))?;
        let expected_terms = if f == 0.25 { 1 } else { 4 };
        check(d.terms.len() == expected_terms, || format!("F={f}: {} terms", d.terms.len()))?;
        let g = (1.0 - 4.0 * f).abs() / 6.0;
        let oracle = oracle_singular_values_complex(&oracle_realign(&a, 2, 2));
        for (k, expected) in [0.5, g, g, g].iter().enumerate() {
            close(d.singular_values[k], *expected, 1e-12, &format!("F={f} singular value {k}"))?;
            close(oracle[k], *expected, 1e-12, &format!("F={f} oracle singular value {k}"))?;
        }
    }
    Ok(format!("max relative reconstruction {worst:.1e}"))
}

fn lambda_pm(b: f64) -> (f64, f64) {
    let root = (1.0 + 2.0 * b + b * b + 20.0 * b.powi(3) + 40.0 * b.powi(4)).sqrt();
    let base = 1.0 + b + 6.0 * b * b;
    ((base + root) / 2.0, (base - root) / 2.0)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for b in [0.2, 0.5, 0.8] {
        let rho = horodecki_2x4(b).map_err(|e| e.to_string())?;
        let d = decompose_herm(&rho, dims(2, 4), &opts()).map_err(|e| e.to_string())?;
        check(d.lemma2_residuals.iter().all(|r| *r < 1e-12), || {
            format!("b={b} lemma residuals {:?}", d.lemma2_residuals)
        })?;
        check(d.terms.len() == 4, || format!("b={b}: {} terms", d.terms.len()))?;
        // ρ_b carries the trace normalization 1/(1+7b); √λ± are the singular
        // values of (1+7b)·ρ_b
        let norm = 1.0 + 7.0 * b;
        let (lp, lm) = lambda_pm(b);
        let degenerate = 3f64.sqrt() * b;
        let mut expected = [lp.sqrt(), lm.sqrt(), degenerate, degenerate];
        expected.sort_by(|x, y| y.total_cmp(x));
        for (k, e) in expected.iter().enumerate() {
            close(norm * d.singular_values[k], *e, 1e-10, &format!("b={b} (1+7b)·s{k}"))?;
            close(d.singular_values[k], e / norm, 1e-10, &format!("b={b} s{k}"))?;
        }
        check(d.residual <= 1e-10, || format!("b={b} reconstruction {:e}", d.residual))?;
        let pt = partial_transpose_min_eig(&rho, dims(2, 4)).map_err(|e| e.to_string())?;
        check(pt >= -1e-12, || format!("b={b} partial transpose min eigenvalue {pt:e}"))?;
        notes.push(format!("b={b}: √λ+={:.6} √λ-={:.6}", lp.sqrt(), lm.sqrt()));
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_millis(500), "horodecki suite")?;
    Ok(format!("{}, {elapsed:.1?}", notes.join("; ")))
}

fn criterion_4() -> Outcome {
    let dims_list = [(2, 2), (2, 3), (3, 3), (2, 4)];
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let (m, n) = dims_list[k % 4];
        let a = random_hermitian(m * n, &mut r);
        let res = lemma2_check(&transform_blocks_herm(&a, dims(m, n)).unwrap(), dims(m, n)).unwrap();
        let scaled = res.iter().cloned().fold(0.0, f64::max) / a.frobenius();
        worst = worst.max(scaled);
        check(scaled < 1e-11, || format!("hermitian sample {k} ({m},{n}): {res:?}"))?;
    }
    let mut weakest = f64::INFINITY;
    for k in 0..50 {
        let (m, n) = dims_list[k % 4];
        let a = random_non_hermitian(m * n, &mut r);
        let res = lemma2_check(&transform_blocks_herm(&a, dims(m, n)).unwrap(), dims(m, n)).unwrap();
        let scaled = res.iter().cloned().fold(0.0, f64::max) / a.frobenius();
        weakest = weakest.min(scaled);
        check(scaled > 1e-6, || format!("non-hermitian sample {k} ({m},{n}): {res:?}"))?;
    }
    Ok(format!("hermitian max {worst:.1e}, non-hermitian min {weakest:.2}"))
}

fn chain(a: &ComplexMatrix, terms: &[HermTerm], d: BipartiteDims, label: &str) -> Result<(), String> {
    let nd = normalize_decomposition(a, terms, d).map_err(|e| format!("{label}: {e}"))?;
    let b = bounds(a, terms, &nd).map_err(|e| format!("{label}: {e}"))?;
    check(b.lower_b <= nd.q, || format!("{label}: lower_b {} > q {}", b.lower_b, nd.q))?;
    check(nd.q <= b.upper + 1e-9, || format!("{label}: q {} > m(A) {}", nd.q, b.upper))?;
    check(nd.q >= b.lower_c - 1e-9, || format!("{label}: q {} < lower_c {}", nd.q, b.lower_c))?;
    let err = nd.reconstruct().sub(a).unwrap().frobenius();
    check(err <= 1e-9, || format!("{label}: normalized re-sum error {err:e}"))
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    let mut run = |a: &ComplexMatrix, terms: &[HermTerm], d: BipartiteDims, label: String| {
        count += 1;
        chain(a, terms, d, &label)
    };
    for f in [0.0, 0.1, 0.25, 0.3, 0.6, 0.8, 1.0] {
        let a = werner(f);
        let d = decompose_herm(&a, dims(2, 2), &opts()).unwrap();
        run(&a, &d.terms, dims(2, 2), format!("werner F={f}"))?;
    }
    for b in [0.2, 0.5, 0.7, 0.8] {
        let a = horodecki_2x4(b).unwrap();
        let d = decompose_herm(&a, dims(2, 4), &opts()).unwrap();
        run(&a, &d.terms, dims(2, 4), format!("horodecki b={b}"))?;
    }
    let mut r = rng(5);
    for (k, (m, n)) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)].into_iter().cycle().take(60).enumerate() {
        let dm = dims(m, n);
        let a = if k % 2 == 0 {
            random_density(m * n, 1 + k % (m * n), k as u64).unwrap()
        } else {
            random_hermitian(m * n, &mut r)
        };
        let d = decompose_herm(&a, dm, &opts()).unwrap();
        run(&a, &d.terms, dm, format!("random #{k} ({m},{n})"))?;
        let t = d.terms.len();
        let e = RealMatrix::identity(t).add(&gaussian_real(t, t, &mut r).scale(0.4)).unwrap();
        if let Ok(mixed) = gauge_transform(&d.terms, &e) {
            run(&a, &mixed, dm, format!("gauge-mixed #{k} ({m},{n})"))?;
        }
        if k % 6 == 0 {
            let cfg = SearchConfig { restarts: 4, iters: 30, seed: k as u64, ..SearchConfig::default() };
            let s = search_indicator(&d.terms, &cfg).unwrap();
            run(&a, &s.best_terms, dm, format!("searched #{k} ({m},{n})"))?;
        }
    }
    for seed in 0..10 {
        let mix = random_separable_mixture(2, 3, 6, seed).unwrap();
        run(&mix.state, &mix.terms, dims(2, 3), format!("mixture seed {seed}"))?;
    }
    Ok(format!("{count} decompositions"))
}

fn pure_product(m: usize, n: usize, r: &mut rand_chacha::ChaCha8Rng) -> ComplexMatrix {
    let projector = |d: usize, r: &mut rand_chacha::ChaCha8Rng| {
        let v = gaussian_complex(d, 1, r);
        let v = v.scale(1.0 / v.frobenius());
        v.matmul(&v.conj_transpose()).unwrap().hermitian_part()
    };
    kron_complex(&projector(m, r), &projector(n, r))
}

fn separable_with_witness(a: &ComplexMatrix, terms: &[HermTerm], d: BipartiteDims, label: &str) -> Result<(), String> {
    let cfg = SearchConfig { restarts: 16, iters: 100, seed: 1, ..SearchConfig::default() };
    let report = analyze(a, terms, d, &cfg, None).map_err(|e| format!("{label}: {e}"))?;
    check(report.verdict == Verdict::Separable, || {
        format!("{label}: verdict {:?}, q_best {}", report.verdict, report.q_best)
    })?;
    let w = report.witness.as_ref().ok_or_else(|| format!("{label}: no witness"))?;
    let err = w.reconstruct().sub(a).unwrap().frobenius();
    check(err <= 1e-9, || format!("{label}: witness re-sum error {err:e}"))?;
    let lo = w.min_part_eigenvalue().map_err(|e| e.to_string())?;
    check(lo >= -1e-9 && w.q >= -report.tol, || format!("{label}: witness not PSD ({lo:e}, q {})", w.q))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    for (k, (m, n)) in [(2, 2), (2, 3), (3, 3), (2, 4)].into_iter().cycle().take(12).enumerate() {
        let a = pure_product(m, n, &mut r);
        let d = decompose_herm(&a, dims(m, n), &opts()).unwrap();
        separable_with_witness(&a, &d.terms, dims(m, n), &format!("product #{k}"))?;
    }
    let mut generic_found = 0;
    for seed in 0..20 {
        let mix = random_separable_mixture(2, 2, 8, seed).unwrap();
        separable_with_witness(&mix.state, &mix.terms, dims(2, 2), &format!("mixture seed {seed}"))?;
        let d = decompose_herm(&mix.state, dims(2, 2), &opts()).unwrap();
        let cfg = SearchConfig { seed: 42, ..SearchConfig::default() };
        if analyze(&mix.state, &d.terms, dims(2, 2), &cfg, None).unwrap().verdict == Verdict::Separable {
            generic_found += 1;
        }
    }
    for f in [0.6, 0.8, 1.0] {
        let a = werner(f);
        let d = decompose_herm(&a, dims(2, 2), &opts()).unwrap();
        let cfg = SearchConfig { restarts: 64, seed: 42, ..SearchConfig::default() };
        let report = analyze(&a, &d.terms, dims(2, 2), &cfg, None).map_err(|e| e.to_string())?;
        check(report.verdict != Verdict::Separable, || {
            format!("werner F={f} classified separable (q_best {})", report.q_best)
        })?;
    }
    Ok(format!(
        "search from the Hermitian decomposition certified {generic_found}/20 mixtures (reported only)"
    ))
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut notes = Vec::new();
    for shape in [vec![2, 2, 2], vec![2, 2, 3]] {
        let md = MultiDims::new(shape.clone()).unwrap();
        let total = md.total();
        let a = random_hermitian(total, &mut r);
        let start = Instant::now();
        let d = decompose_multi(&a, &md, &opts()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        within(elapsed, Duration::from_secs(1), &format!("{shape:?} decomposition"))?;
        let rel = d.reconstruct().sub(&a).unwrap().frobenius() / a.frobenius();
        check(rel <= 1e-9, || format!("{shape:?} relative reconstruction {rel:e}"))?;
        let cap: usize = d.level_ranks.iter().product();
        check(d.terms.len() <= cap, || {
            format!("{shape:?}: {} terms exceed rank product {cap}", d.terms.len())
        })?;

        let factors: Vec<ComplexMatrix> = shape.iter().map(|&k| random_hermitian(k, &mut r)).collect();
        let product = factors.iter().skip(1).fold(factors[0].clone(), |acc, f| kron_complex(&acc, f));
        let p = decompose_multi(&product, &md, &opts()).map_err(|e| e.to_string())?;
        check(p.terms.len() == 1, || format!("{shape:?} product input gave {} terms", p.terms.len()))?;
        notes.push(format!("{shape:?}: {} terms, rel {rel:.1e}, {elapsed:.1?}", d.terms.len()));
    }
    Ok(notes.join("; "))
}

fn criterion_8() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_schmidt-herm");
    let run = |args: &[&str]| Command::new(bin).args(args).output().map_err(|e| e.to_string());
    let bip = dir.join("bip.json");
    let multi = dir.join("multi.json");
    let decomposition = dir.join("decomposition.json");
    let bip_s = bip.to_str().unwrap();
    let multi_s = multi.to_str().unwrap();
    let dec_s = decomposition.to_str().unwrap();
    for args in [
        vec!["gen", "--family", "random_separable", "--dims", "2,2", "--param", "k=4", "--seed", "8", "--output", bip_s],
        vec!["gen", "--family", "random_density", "--dims", "2,2,2", "--param", "rank=3", "--seed", "8", "--output", multi_s],
        vec!["decompose", "--input", bip_s, "--output", dec_s],
    ] {
        check(run(&args)?.status.success(), || format!("setup {args:?} failed"))?;
    }
    let invocations: Vec<Vec<&str>> = vec![
        vec!["gen", "--family", "werner", "--param", "F=0.3"],
        vec!["gen", "--family", "horodecki2x4", "--param", "b=0.5"],
        vec!["gen", "--family", "random_separable", "--dims", "2,3", "--param", "k=5", "--seed", "11"],
        vec!["gen", "--family", "random_density", "--dims", "3,2", "--seed", "11"],
        vec!["decompose", "--input", bip_s, "--mode", "hermitian"],
        vec!["decompose", "--input", bip_s, "--mode", "symmetric"],
        vec!["analyze", "--input", bip_s, "--restarts", "16", "--iters", "50", "--seed", "3"],
        vec!["analyze", "--input", bip_s, "--decomposition", dec_s, "--restarts", "16", "--iters", "50", "--seed", "3"],
        vec!["multi", "--input", multi_s],
    ];
    let mut compared = 0;
    for args in &invocations {
        let (a, b) = (run(args)?, run(args)?);
        check(a.status.code() == b.status.code(), || format!("{args:?}: exit codes differ"))?;
        check(a.stdout == b.stdout && a.stderr == b.stderr, || format!("{args:?}: output differs"))?;
        compared += 1;
    }
    Ok(format!("{compared} invocations byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("werner symmetric mode", criterion_1),
        ("werner hermitian mode", criterion_2),
        ("bound entangled 2x4 state", criterion_3),
        ("block identity property suite", criterion_4),
        ("q inequality chain", criterion_5),
        ("separability soundness", criterion_6),
        ("multipartite round trip", criterion_7),
        ("cli determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("acceptance {}: PASS {name} ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {}: FAIL {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

