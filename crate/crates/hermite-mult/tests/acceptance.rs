//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hermite_mult::formats::{expansion_from_json, to_json_string};
use hermite_mult::verify::{
    verify_generating_function, verify_inner_product, verify_kron_identity, verify_recurrence,
    verify_selector_orthonormality, verify_univariate_closed_forms, Suite, TrialConfig, VerifyReport, LAMBDA_GRID,
};
use hermite_mult_core::coeffs::{coeff_general, evaluate_expansion, expand_general, CoeffVariant};
use hermite_mult_core::multiindex::enumerate_up_to_degree;
use hermite_mult_core::polyoracle::oracle_compare;
use hermite_mult_core::{BigInt, BigRational, DenseMatrix, HermiteFamily, MPoly, MultiIndex, SpdMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_hermite-mult");

type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn report_line(r: &VerifyReport) -> String {
    format!(
        "{}: {} checks, {} failures, max err {:.3e} (tol {:.0e})",
        r.suite, r.checks_run, r.failures, r.max_rel_err, r.tol
    )
}

fn r(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn rat(rng: &mut ChaCha8Rng) -> BigRational {
    r(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

fn rat_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix<BigRational> {
    DenseMatrix::from_row_major(rows, cols, (0..rows * cols).map(|_| rat(rng)).collect()).unwrap()
}

fn spd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<BigRational> {
    let q = rat_matrix(rng, n, n);
    let g = q.transpose().matmul(&q).unwrap();
    let id = DenseMatrix::<BigRational>::identity(n);
    let mut out = g.clone();
    for i in 0..n {
        out[(i, i)] = g[(i, i)].clone() + id[(i, i)].clone();
    }
    out
}

fn criterion_1() -> Outcome {
    let mut jobs = Vec::new();
    for n in 1..=3usize {
        for m in 1..=3usize {
            for k in enumerate_up_to_degree(n, 4).unwrap() {
                for s in 0..20u64 {
                    jobs.push((n, m, k.clone(), s));
                }
            }
        }
    }
    let failures: Vec<String> = jobs
        .par_iter()
        .enumerate()
        .filter_map(|(idx, (n, m, k, _))| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            rng.set_stream(idx as u64);
            let lambda = rat_matrix(&mut rng, *m, *n);
            let sigma = spd(&mut rng, *n);
            let upsilon = spd(&mut rng, *m);
            match oracle_compare(k, &lambda, &sigma, &upsilon, CoeffVariant::Symmetrized) {
                Ok(c) if c.equal => None,
                Ok(c) => Some(format!("n={n} m={m} k={k}: diff {}", c.diff)),
                Err(e) => Some(format!("n={n} m={m} k={k}: {e}")),
            }
        })
        .collect();
    Outcome {
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{} exact oracle comparisons equal", jobs.len()),
            Some(f) => format!("{} of {} unequal, first {f}", failures.len(), jobs.len()),
        },
    }
}

fn from_report(r: VerifyReport) -> Outcome {
    Outcome {
        passed: r.passed(),
        detail: report_line(&r),
    }
}

fn criterion_2() -> Outcome {
    from_report(verify_univariate_closed_forms(&TrialConfig {
        seed: 2,
        ..TrialConfig::for_suite(Suite::Univariate)
    }))
}

fn criterion_3() -> Outcome {
    from_report(verify_inner_product(&TrialConfig {
        seed: 3,
        ..TrialConfig::for_suite(Suite::Inner)
    }))
}

fn criterion_4() -> Outcome {
    let cfg = TrialConfig {
        seed: 4,
        ..TrialConfig::for_suite(Suite::Gf)
    };
    assert_eq!((cfg.n_max, cfg.k_max, cfg.trials, cfg.tol_rel), (3, 10, 100, 1e-10));
    from_report(verify_generating_function(&cfg))
}

fn criterion_5() -> Outcome {
    let cfg = TrialConfig {
        seed: 5,
        ..TrialConfig::for_suite(Suite::Kron)
    };
    assert_eq!((cfg.n_max, cfg.m_max, cfg.k_max, cfg.tol_rel), (3, 3, 4, 1e-12));
    let kron = verify_kron_identity(&cfg);
    let mut sel_checks = 0;
    let mut sel_failures = 0;
    for n in 1..=3 {
        for big_k in 0..=4 {
            let rep = verify_selector_orthonormality(n, big_k).expect("within caps");
            sel_checks += rep.checks_run;
            sel_failures += rep.failures;
        }
    }
    Outcome {
        passed: kron.passed() && sel_failures == 0,
        detail: format!(
            "{}; selector: {sel_checks} inner products, {sel_failures} failures",
            report_line(&kron)
        ),
    }
}

fn criterion_6() -> Outcome {
    let cfg = TrialConfig {
        seed: 6,
        ..TrialConfig::for_suite(Suite::Recurrence)
    };
    assert_eq!((cfg.n_max, cfg.k_max), (3, 5));
    from_report(verify_recurrence(&cfg))
}

fn criterion_7() -> Outcome {
    let k = MultiIndex::new(vec![1, 1]).unwrap();
    let lambda = DenseMatrix::from_rows(vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]]).unwrap();
    let id = DenseMatrix::<BigRational>::identity(2);
    let literal = oracle_compare(&k, &lambda, &id, &id, CoeffVariant::SingleSelector).unwrap();
    let symmetrized = oracle_compare(&k, &lambda, &id, &id, CoeffVariant::Symmetrized).unwrap();
    let x1x2 = MPoly::from_terms(2, [(k.clone(), r(1, 1))]).unwrap();
    let counterexample = literal.rhs.is_zero() && literal.lhs == x1x2 && !literal.diff.is_zero() && !literal.equal;

    let one = SpdMatrix::factorize(DenseMatrix::<BigRational>::identity(1)).unwrap();
    let mut n1_checks = 0;
    let mut n1_mismatch = 0;
    for &(p, q) in &LAMBDA_GRID {
        let col = DenseMatrix::column(&[r(p, q)]);
        for kk in 0..=12u32 {
            let km = MultiIndex::new(vec![kk]).unwrap();
            for qq in (kk % 2..=kk).step_by(2) {
                let qm = MultiIndex::new(vec![qq]).unwrap();
                let a = coeff_general(&km, &qm, &col, &one, &one, CoeffVariant::Symmetrized).unwrap();
                let b = coeff_general(&km, &qm, &col, &one, &one, CoeffVariant::SingleSelector).unwrap();
                n1_checks += 1;
                n1_mismatch += usize::from(a != b);
            }
        }
    }
    Outcome {
        passed: counterexample && symmetrized.equal && n1_mismatch == 0,
        detail: format!(
            "single-selector rhs zero: {}, lhs = x1*x2: {}, diff = {}; symmetrized equal: {}; n=1 agreement {}/{}",
            literal.rhs.is_zero(),
            literal.lhs == x1x2,
            literal.diff,
            symmetrized.equal,
            n1_checks - n1_mismatch,
            n1_checks
        ),
    }
}

fn run_bin(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_8(dir: &Path) -> Outcome {
    let spec = json!({
        "k": [2, 1],
        "Lambda": [[0.5, -1.25], [0.75, 0.3], [-0.2, 1.1]],
        "Sigma": [[1.5, 0.2], [0.2, 0.8]],
        "Upsilon": [[1.2, 0.1, 0.0], [0.1, 0.9, -0.3], [0.0, -0.3, 2.0]]
    });
    let spec_path = dir.join("spec.json");
    std::fs::write(&spec_path, to_json_string(&spec)).unwrap();
    let spec_arg = spec_path.to_str().unwrap();

    let (c1, expansion) = run_bin(&["expand", "--spec", spec_arg]);
    let (c2, expansion_again) = run_bin(&["expand", "--spec", spec_arg]);
    let exp_path = dir.join("expansion.json");
    std::fs::write(&exp_path, &expansion).unwrap();

    let point = [0.37, -1.2, 0.81];
    let at = "0.37,-1.2,0.81";
    let (c3, evaluated) = run_bin(&["eval", "--expansion", exp_path.to_str().unwrap(), "--spec", spec_arg, "--at", at]);
    let line: Value = serde_json::from_slice(&evaluated).unwrap_or(Value::Null);
    let cli_rhs = line["rhs"].as_f64();

    let k = MultiIndex::new(vec![2, 1]).unwrap();
    let lambda = DenseMatrix::from_rows(vec![vec![0.5, -1.25], vec![0.75, 0.3], vec![-0.2, 1.1]]).unwrap();
    let sigma = SpdMatrix::factorize(DenseMatrix::from_rows(vec![vec![1.5, 0.2], vec![0.2, 0.8]]).unwrap()).unwrap();
    let upsilon = SpdMatrix::factorize(
        DenseMatrix::from_rows(vec![vec![1.2, 0.1, 0.0], vec![0.1, 0.9, -0.3], vec![0.0, -0.3, 2.0]]).unwrap(),
    )
    .unwrap();
    let terms = expand_general(&k, &lambda, &sigma, &upsilon, CoeffVariant::Symmetrized).unwrap();
    let (lib_rhs, _) = evaluate_expansion(&terms, &point, &HermiteFamily::General(upsilon)).unwrap();
    let parsed_back = serde_json::from_slice::<Value>(&expansion)
        .ok()
        .and_then(|doc| expansion_from_json::<f64>(&doc).ok())
        .is_some_and(|(_, t)| t.iter().zip(&terms).all(|(a, b)| a.coeff.to_bits() == b.coeff.to_bits()));
    let round_trip = cli_rhs.map(f64::to_bits) == Some(lib_rhs.to_bits());

    let verify_args = ["verify", "--suite", "all", "--seed", "7"];
    let (c4, v1) = run_bin(&verify_args);
    let (c5, v2) = run_bin(&verify_args);
    let deterministic = expansion == expansion_again && v1 == v2 && !v1.is_empty();
    let codes_ok = [c1, c2, c3, c4, c5].iter().all(|&c| c == 0);
    Outcome {
        passed: round_trip && parsed_back && deterministic && codes_ok,
        detail: format!(
            "rhs cli {:?} vs library {lib_rhs:?} (bit-identical: {round_trip}), coefficients re-read exactly: {parsed_back}, byte-identical reruns: {deterministic}, exit codes {:?}",
            cli_rhs,
            [c1, c2, c3, c4, c5]
        ),
    }
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("1 exact oracle equivalence", Duration::from_secs(60), Box::new(criterion_1)),
        ("2 univariate closed forms", Duration::from_secs(5), Box::new(criterion_2)),
        ("3 inner-product identity", Duration::from_secs(10), Box::new(criterion_3)),
        ("4 generating function", Duration::from_secs(5), Box::new(criterion_4)),
        ("5 kronecker identity and selectors", Duration::from_secs(5), Box::new(criterion_5)),
        ("6 recurrence vs symbolic", Duration::from_secs(30), Box::new(criterion_6)),
        ("7 single-selector counterexample", Duration::from_secs(1), Box::new(criterion_7)),
        ("8 cli round-trip and determinism", Duration::from_secs(5), Box::new(|| criterion_8(dir.path()))),
    ];
    let mut all = true;
    for (name, budget, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= *budget;
        let passed = outcome.passed && in_budget;
        all &= passed;
        println!(
            "{} criterion {name}: {} [{:.2}s of {}s]",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
