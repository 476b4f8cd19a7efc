//! Seeded randomized and exhaustive verification of the multiplication theorem
//! and its special cases.
//!
//! Every trial draws its inputs from its own generator stream, so a report is
//! a pure function of `(suite, config, variant)` no matter how trials are
//! scheduled across threads. The inputs of the worst trial are kept in the
//! report and can be replayed with [`replay`].

use std::fmt;
use std::str::FromStr;

use hermite_mult_core::coeffs::{
    coeff_general, coeff_univariate, coeff_vec_phys, coeff_vec_prob, evaluate_expansion,
    expand_general, expand_inner_product, CoeffVariant,
};
use hermite_mult_core::hermite::{gf_partial_sum, hermite_multi, hermite_uni};
use hermite_mult_core::multiindex::{enumerate_fixed_degree, enumerate_up_to_degree};
use hermite_mult_core::polyoracle::{oracle_compare, SymbolicHermite};
use hermite_mult_core::tensorlin::{colwise_kron_power, dot, kron_power};
use hermite_mult_core::{
    BigInt, BigRational, DenseMatrix, HermiteFamily, MultiIndex, Scalar, SpdMatrix, UnivariateFamily,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::formats::{fmt_rational, parse_rational, variant_name};

/// Generator identifier recorded in every report.
pub const RNG_NAME: &str = "chacha8:seed_from_u64(seed):stream(trial)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Main,
    Gf,
    Kron,
    Selector,
    Univariate,
    Inner,
    Recurrence,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Main,
        Suite::Gf,
        Suite::Kron,
        Suite::Selector,
        Suite::Univariate,
        Suite::Inner,
        Suite::Recurrence,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Main => "main",
            Suite::Gf => "gf",
            Suite::Kron => "kron",
            Suite::Selector => "selector",
            Suite::Univariate => "univariate",
            Suite::Inner => "inner",
            Suite::Recurrence => "recurrence",
            Suite::Oracle => "oracle",
        }
    }

    /// Whether the suite's checks depend on the coefficient variant.
    pub fn uses_variant(self) -> bool {
        matches!(self, Suite::Main | Suite::Oracle)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Sampling and acceptance parameters for a suite.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: u64,
    pub n_max: usize,
    pub m_max: usize,
    pub k_max: u32,
    pub tol_rel: f64,
    pub entry_range: (f64, f64),
}

impl TrialConfig {
    pub fn for_suite(suite: Suite) -> Self {
        let base = TrialConfig {
            seed: 0,
            trials: 100,
            n_max: 3,
            m_max: 3,
            k_max: 5,
            tol_rel: 1e-8,
            entry_range: (-2.0, 2.0),
        };
        match suite {
            Suite::Main => base,
            Suite::Gf => TrialConfig {
                k_max: 10,
                tol_rel: 1e-10,
                ..base
            },
            Suite::Kron => TrialConfig {
                k_max: 4,
                tol_rel: 1e-12,
                ..base
            },
            Suite::Selector => TrialConfig {
                trials: 1,
                k_max: 4,
                tol_rel: 0.0,
                ..base
            },
            Suite::Univariate => TrialConfig {
                m_max: 1,
                n_max: 1,
                k_max: 12,
                tol_rel: 1e-9,
                ..base
            },
            Suite::Inner => TrialConfig {
                trials: 200,
                m_max: 5,
                n_max: 1,
                k_max: 8,
                ..base
            },
            Suite::Recurrence => TrialConfig {
                trials: 50,
                tol_rel: 0.0,
                ..base
            },
            Suite::Oracle => TrialConfig {
                trials: 50,
                k_max: 4,
                tol_rel: 0.0,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        if !(self.tol_rel >= 0.0 && self.tol_rel.is_finite()) {
            return Err("tolerance must be a finite non-negative number".into());
        }
        if self.n_max == 0 || self.m_max == 0 {
            return Err("dimension bounds must be at least 1".into());
        }
        let (lo, hi) = self.entry_range;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err("entry range must be a nonempty finite interval".into());
        }
        Ok(())
    }

    fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

/// Aggregated outcome of one suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub variant: Option<String>,
    pub checks_run: u64,
    pub failures: u64,
    /// Largest error seen; absolute for `gf`, relative with a cancellation guard elsewhere.
    pub max_rel_err: f64,
    pub tol: f64,
    pub worst_case: Value,
    pub rng: String,
    pub seed: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Stable field order for serialization.
    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "variant": self.variant,
            "checks_run": self.checks_run,
            "failures": self.failures,
            "max_rel_err": self.max_rel_err,
            "tol": self.tol,
            "worst_case": self.worst_case,
            "rng": self.rng,
            "seed": self.seed,
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct Check {
    err: f64,
    failed: bool,
}

impl Check {
    fn float(err: f64, tol: f64) -> Self {
        Check {
            err,
            failed: err.partial_cmp(&tol).is_none_or(|o| o.is_gt()),
        }
    }

    fn exact(equal: bool, err: f64) -> Self {
        Check { err, failed: !equal }
    }

    fn broken() -> Self {
        Check {
            err: f64::INFINITY,
            failed: true,
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Outcome {
    checks: u64,
    failures: u64,
    worst: Option<(bool, f64, Value)>,
}

impl Outcome {
    fn record(&mut self, check: Check, case: impl FnOnce() -> Value) {
        self.checks += 1;
        self.failures += u64::from(check.failed);
        if is_worse((check.failed, check.err), self.worst.as_ref().map(|w| (w.0, w.1))) {
            self.worst = Some((check.failed, check.err, case()));
        }
    }

    fn merge(mut self, other: Outcome) -> Outcome {
        self.checks += other.checks;
        self.failures += other.failures;
        if let Some(w) = other.worst {
            if is_worse((w.0, w.1), self.worst.as_ref().map(|s| (s.0, s.1))) {
                self.worst = Some(w);
            }
        }
        self
    }
}

/// Failures dominate, then larger error; ties keep the earlier case.
fn is_worse(new: (bool, f64), old: Option<(bool, f64)>) -> bool {
    let Some(old) = old else { return true };
    let key = |(failed, err): (bool, f64)| (failed, if err.is_nan() { f64::INFINITY } else { err });
    let (n, o) = (key(new), key(old));
    (n.0 && !o.0) || (n.0 == o.0 && n.1 > o.1)
}

fn finish(suite: Suite, variant: Option<CoeffVariant>, cfg: &TrialConfig, outcomes: Vec<Outcome>) -> VerifyReport {
    let total = outcomes.into_iter().fold(Outcome::default(), Outcome::merge);
    let (max_err, worst) = match total.worst {
        Some((_, err, case)) => (err, case),
        None => (0.0, Value::Null),
    };
    VerifyReport {
        suite: suite.name().into(),
        variant: variant.map(|v| variant_name(v).into()),
        checks_run: total.checks,
        failures: total.failures,
        max_rel_err: max_err,
        tol: cfg.tol_rel,
        worst_case: worst,
        rng: RNG_NAME.into(),
        seed: cfg.seed,
    }
}

fn run_trials<F>(cfg: &TrialConfig, trial: F) -> Vec<Outcome>
where
    F: Fn(&mut ChaCha8Rng) -> Outcome + Sync,
{
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial(&mut cfg.rng(t)))
        .collect()
}

// ---- sampling -------------------------------------------------------------

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo..hi)
}

fn float_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize, range: (f64, f64)) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| uniform(rng, range)).collect()).collect()
}

/// `QᵀQ + I` for `Q` with i.i.d. entries.
fn spd_rows<S: Scalar>(q: &DenseMatrix<S>) -> DenseMatrix<S> {
    let mut g = q.transpose().matmul(q).expect("square");
    for i in 0..g.rows() {
        g[(i, i)] = g[(i, i)].clone() + S::one();
    }
    g
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-4i64..=4)), BigInt::from(rng.gen_range(1i64..=3)))
}

fn rational_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix<BigRational> {
    let data = (0..rows * cols).map(|_| small_rational(rng)).collect();
    DenseMatrix::from_row_major(rows, cols, data).expect("positive dims")
}

fn random_index(rng: &mut ChaCha8Rng, arity: usize, max_degree: u32) -> MultiIndex {
    let all = enumerate_up_to_degree(arity, max_degree).expect("arity >= 1");
    all[rng.gen_range(0..all.len())].clone()
}

fn to_f64_matrix(rows: &[Vec<f64>]) -> Option<DenseMatrix<f64>> {
    DenseMatrix::from_rows(rows.to_vec()).ok()
}

fn rational_rows_json(m: &DenseMatrix<BigRational>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(fmt_rational).collect()).collect()
}

fn rational_matrix_from(rows: &[Vec<String>]) -> Option<DenseMatrix<BigRational>> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    DenseMatrix::from_rows(rows).ok()
}

fn rel_err(lhs: f64, rhs: f64, magnitude: f64) -> f64 {
    (lhs - rhs).abs() / 1f64.max(lhs.abs()).max(magnitude)
}

fn rational_rel_err(a: &BigRational, b: &BigRational) -> f64 {
    let (a, b) = (a.to_f64(), b.to_f64());
    (a - b).abs() / 1f64.max(a.abs())
}

fn parse_variant(s: &str) -> Option<CoeffVariant> {
    match s {
        "symmetrized" => Some(CoeffVariant::Symmetrized),
        "paper-literal" => Some(CoeffVariant::SingleSelector),
        _ => None,
    }
}

// ---- main identity ----------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MainCase {
    k: Vec<u32>,
    lambda: Vec<Vec<f64>>,
    sigma: Vec<Vec<f64>>,
    upsilon: Vec<Vec<f64>>,
    x: Vec<f64>,
    variant: String,
}

impl MainCase {
    fn error(&self) -> Option<f64> {
        let variant = parse_variant(&self.variant)?;
        let k = MultiIndex::new(self.k.clone()).ok()?;
        let lambda = to_f64_matrix(&self.lambda)?;
        let sigma = SpdMatrix::factorize(to_f64_matrix(&self.sigma)?).ok()?;
        let upsilon = SpdMatrix::factorize(to_f64_matrix(&self.upsilon)?).ok()?;
        let terms = expand_general(&k, &lambda, &sigma, &upsilon, variant).ok()?;
        let y = lambda.transpose().matvec(&self.x).ok()?;
        let lhs = hermite_multi(&k, &y, &sigma).ok()?;
        let (rhs, mag) = evaluate_expansion(&terms, &self.x, &HermiteFamily::General(upsilon)).ok()?;
        Some(rel_err(lhs, rhs, mag))
    }
}

/// `H_k(Λᵀx; Σ)` against the expansion `Σ_q T_{k,q} H_q(x; Υ)` on random instances.
pub fn verify_main_identity(cfg: &TrialConfig, variant: CoeffVariant) -> VerifyReport {
    let outcomes = run_trials(cfg, |rng| {
        let n = rng.gen_range(1..=cfg.n_max);
        let m = rng.gen_range(1..=cfg.m_max);
        let k = random_index(rng, n, cfg.k_max);
        let lambda = float_rows(rng, m, n, cfg.entry_range);
        let qs = to_f64_matrix(&float_rows(rng, n, n, cfg.entry_range)).expect("dims");
        let qu = to_f64_matrix(&float_rows(rng, m, m, cfg.entry_range)).expect("dims");
        let x = (0..m).map(|_| uniform(rng, cfg.entry_range)).collect();
        let case = MainCase {
            k: k.parts().to_vec(),
            lambda,
            sigma: spd_rows(&qs).to_rows(),
            upsilon: spd_rows(&qu).to_rows(),
            x,
            variant: variant_name(variant).into(),
        };
        let check = case.error().map_or_else(Check::broken, |e| Check::float(e, cfg.tol_rel));
        let mut out = Outcome::default();
        out.record(check, || serde_json::to_value(&case).expect("serializable"));
        out
    });
    finish(Suite::Main, Some(variant), cfg, outcomes)
}

// ---- generating function ----------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GfCase {
    t: Vec<f64>,
    x: Vec<f64>,
    sigma: Vec<Vec<f64>>,
    degree: u32,
}

impl GfCase {
    fn error(&self) -> Option<f64> {
        let sigma = SpdMatrix::factorize(to_f64_matrix(&self.sigma)?).ok()?;
        let sum = gf_partial_sum(&self.t, &self.x, &sigma, self.degree).ok()?;
        let bt = sigma.inverse_apply(&self.t).ok()?;
        let exact = (dot(&bt, &self.x) - 0.5 * dot(&bt, &self.t)).exp();
        Some((sum - exact).abs())
    }
}

fn scaled_to_radius(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = dot(&dir, &dir).sqrt();
    let r = rng.gen_range(0.0..radius);
    if norm == 0.0 {
        return dir;
    }
    dir.iter().map(|d| d * r / norm).collect()
}

/// Truncated generating function (degree `k_max`) against its closed form,
/// `‖t‖ <= 0.1`, `‖x‖ <= 1`; reports absolute error.
pub fn verify_generating_function(cfg: &TrialConfig) -> VerifyReport {
    let outcomes = run_trials(cfg, |rng| {
        let n = rng.gen_range(1..=cfg.n_max);
        let q = to_f64_matrix(&float_rows(rng, n, n, cfg.entry_range)).expect("dims");
        let case = GfCase {
            t: scaled_to_radius(rng, n, 0.1),
            x: scaled_to_radius(rng, n, 1.0),
            sigma: spd_rows(&q).to_rows(),
            degree: cfg.k_max,
        };
        let mut out = Outcome::default();
        let check = case.error().map_or_else(Check::broken, |e| Check::float(e, cfg.tol_rel));
        out.record(check, || serde_json::to_value(&case).expect("serializable"));
        out
    });
    finish(Suite::Gf, None, cfg, outcomes)
}

// ---- Kronecker identity -------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
struct KronCase {
    k: Vec<u32>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    a_exact: Vec<Vec<String>>,
    b_exact: Vec<String>,
}

impl KronCase {
    fn float_error(&self) -> Option<f64> {
        let k = MultiIndex::new(self.k.clone()).ok()?;
        let a = to_f64_matrix(&self.a)?;
        let lhs = k.monomial(&a.transpose().matvec(&self.b).ok()?).ok()?;
        let rhs = dot(&colwise_kron_power(&a, &k).ok()?, &kron_power(&self.b, k.degree()).ok()?);
        Some((lhs - rhs).abs() / 1f64.max(lhs.abs()))
    }

    fn exact_holds(&self) -> Option<bool> {
        let k = MultiIndex::new(self.k.clone()).ok()?;
        let a = rational_matrix_from(&self.a_exact)?;
        let b = self.b_exact.iter().map(|s| parse_rational(s)).collect::<Option<Vec<_>>>()?;
        let lhs = k.monomial(&a.transpose().matvec(&b).ok()?).ok()?;
        let rhs = dot(&colwise_kron_power(&a, &k).ok()?, &kron_power(&b, k.degree()).ok()?);
        Some(lhs == rhs)
    }
}

/// `(Aᵀb)^k = (A^{⊙k})ᵀ b^{⊗|k|}` in float and exact arithmetic.
pub fn verify_kron_identity(cfg: &TrialConfig) -> VerifyReport {
    let outcomes = run_trials(cfg, |rng| {
        let rows = rng.gen_range(1..=cfg.n_max);
        let cols = rng.gen_range(1..=cfg.m_max);
        let k = random_index(rng, cols, cfg.k_max);
        let a_exact = rational_matrix(rng, rows, cols);
        let b_exact: Vec<BigRational> = (0..rows).map(|_| small_rational(rng)).collect();
        let case = KronCase {
            k: k.parts().to_vec(),
            a: float_rows(rng, rows, cols, cfg.entry_range),
            b: (0..rows).map(|_| uniform(rng, cfg.entry_range)).collect(),
            a_exact: rational_rows_json(&a_exact),
            b_exact: b_exact.iter().map(fmt_rational).collect(),
        };
        let mut out = Outcome::default();
        let to_value = || serde_json::to_value(&case).expect("serializable");
        let check = case.float_error().map_or_else(Check::broken, |e| Check::float(e, cfg.tol_rel));
        out.record(check, to_value);
        let exact = case.exact_holds().map_or_else(Check::broken, |ok| Check::exact(ok, 0.0));
        out.record(exact, to_value);
        out
    });
    finish(Suite::Kron, None, cfg, outcomes)
}

// ---- selector orthonormality ---------------------------------------------------

/// Pairwise inner products of `{I_n^{⊙k} : |k| = K}` are exactly `δ`.
pub fn verify_selector_orthonormality(n: usize, big_k: u32) -> Result<VerifyReport, hermite_mult_core::Error> {
    let cfg = TrialConfig {
        n_max: n,
        k_max: big_k,
        ..TrialConfig::for_suite(Suite::Selector)
    };
    Ok(finish(Suite::Selector, None, &cfg, vec![selector_outcome(n, big_k)?]))
}

fn selector_outcome(n: usize, big_k: u32) -> Result<Outcome, hermite_mult_core::Error> {
    if n > 3 || big_k > 4 {
        return Err(hermite_mult_core::Error::TooLarge {
            what: "selector check (n <= 3, K <= 4)",
            limit: 4,
            requested: n.max(big_k as usize),
        });
    }
    let id = DenseMatrix::<BigRational>::identity(n);
    let ks = enumerate_fixed_degree(n, big_k)?;
    let cols = ks
        .iter()
        .map(|k| colwise_kron_power(&id, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Outcome::default();
    for (a, ca) in cols.iter().enumerate() {
        for (b, cb) in cols.iter().enumerate().skip(a) {
            let ip = dot(ca, cb);
            let expect = if a == b { BigRational::from_i64(1) } else { BigRational::from_i64(0) };
            let check = Check::exact(ip == expect, rational_rel_err(&ip, &expect));
            out.record(check, || json!({"n": n, "K": big_k, "k_a": ks[a].parts(), "k_b": ks[b].parts()}));
        }
    }
    Ok(out)
}

fn verify_selector_grid(cfg: &TrialConfig) -> VerifyReport {
    let mut outcomes = Vec::new();
    for n in 1..=cfg.n_max.min(3) {
        for big_k in 0..=cfg.k_max.min(4) {
            outcomes.push(selector_outcome(n, big_k).expect("within caps"));
        }
    }
    finish(Suite::Selector, None, cfg, outcomes)
}

// ---- univariate closed forms -------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
struct UniCase {
    k: u32,
    lambda: f64,
    x: f64,
    family: String,
}

fn uni_family(name: &str) -> Option<UnivariateFamily<f64>> {
    match name {
        "he" => Some(UnivariateFamily::Probabilists),
        "h" => Some(UnivariateFamily::Physicists),
        _ => None,
    }
}

impl UniCase {
    fn error(&self) -> Option<f64> {
        let fam = uni_family(&self.family)?;
        let lhs = hermite_uni(&fam, self.k, &(self.lambda * self.x)).ok()?;
        let (mut rhs, mut mag) = (0.0, 0.0);
        for i in 0..=self.k / 2 {
            let term = coeff_univariate(self.k, i, &self.lambda, &fam).ok()?
                * hermite_uni(&fam, self.k - 2 * i, &self.x).ok()?;
            rhs += term;
            mag += term.abs();
        }
        Some(rel_err(lhs, rhs, mag))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct UniExactCase {
    k: u32,
    lambda: String,
}

impl UniExactCase {
    /// `coeff_univariate`, `coeff_vec_*` at `m = 1`, and `coeff_general` at `n = m = 1`
    /// (both variants) agree exactly.
    fn holds(&self) -> Option<bool> {
        let lam = parse_rational(&self.lambda)?;
        let col = DenseMatrix::column(std::slice::from_ref(&lam));
        let one = SpdMatrix::factorize(DenseMatrix::<BigRational>::identity(1)).ok()?;
        let half = SpdMatrix::scaled_identity(1, BigRational::new(1.into(), 2.into())).ok()?;
        let kk = MultiIndex::new(vec![self.k]).ok()?;
        for i in 0..=self.k / 2 {
            let q = MultiIndex::new(vec![self.k - 2 * i]).ok()?;
            let he = coeff_univariate(self.k, i, &lam, &UnivariateFamily::Probabilists).ok()?;
            let h = coeff_univariate(self.k, i, &lam, &UnivariateFamily::Physicists).ok()?;
            let he_vec = coeff_vec_prob(self.k, &q, std::slice::from_ref(&lam)).ok()?;
            let h_vec = coeff_vec_phys(self.k, &q, std::slice::from_ref(&lam)).ok()?;
            let mut all = vec![(he.clone(), he_vec), (h.clone(), h_vec)];
            for v in [CoeffVariant::Symmetrized, CoeffVariant::SingleSelector] {
                all.push((he.clone(), coeff_general(&kk, &q, &col, &one, &one, v).ok()?));
                all.push((h.clone(), coeff_general(&kk, &q, &col, &half, &half, v).ok()?));
            }
            if all.iter().any(|(a, b)| a != b) {
                return Some(false);
            }
        }
        Some(true)
    }
}

/// Grid of `λ` used by the univariate suite.
pub const LAMBDA_GRID: [(i64, i64); 7] = [(-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (2, 1)];

/// Univariate multiplication theorem on the fixed `λ`/`x` grid plus `cfg.trials`
/// random draws, and exact agreement of the closed forms with the general engine.
pub fn verify_univariate_closed_forms(cfg: &TrialConfig) -> VerifyReport {
    let k_max = cfg.k_max;
    let mut outcomes: Vec<Outcome> = LAMBDA_GRID
        .par_iter()
        .map(|&(p, q)| {
            let lambda = p as f64 / q as f64;
            let mut out = Outcome::default();
            for k in 0..=k_max {
                for xi in 0..21 {
                    let x = -3.0 + 0.3 * xi as f64;
                    for family in ["he", "h"] {
                        let case = UniCase { k, lambda, x, family: family.into() };
                        let check = case.error().map_or_else(Check::broken, |e| Check::float(e, cfg.tol_rel));
                        out.record(check, || serde_json::to_value(&case).expect("serializable"));
                    }
                }
                let exact = UniExactCase {
                    k,
                    lambda: fmt_rational(&BigRational::new(p.into(), q.into())),
                };
                let check = exact.holds().map_or_else(Check::broken, |ok| Check::exact(ok, 0.0));
                out.record(check, || serde_json::to_value(&exact).expect("serializable"));
            }
            out
        })
        .collect();
    outcomes.extend(run_trials(cfg, |rng| {
        let case = UniCase {
            k: rng.gen_range(0..=k_max),
            lambda: uniform(rng, cfg.entry_range),
            x: rng.gen_range(-3.0..3.0),
            family: if rng.gen_bool(0.5) { "he" } else { "h" }.into(),
        };
        let mut out = Outcome::default();
        let check = case.error().map_or_else(Check::broken, |e| Check::float(e, cfg.tol_rel));
        out.record(check, || serde_json::to_value(&case).expect("serializable"));
        out
    }));
    finish(Suite::Univariate, None, cfg, outcomes)
}

// ---- inner-product expansion ------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
struct InnerCase {
    k: u32,
    lambda: Vec<f64>,
    x: Vec<f64>,
    family: String,
}

impl InnerCase {
    fn error(&self) -> Option<f64> {
        let fam = uni_family(&self.family)?;
        let lhs = hermite_uni(&fam, self.k, &dot(&self.lambda, &self.x)).ok()?;
        let terms = expand_inner_product(self.k, &self.lambda, &fam).ok()?;
        let product_family = match fam {
            UnivariateFamily::Probabilists => HermiteFamily::Probabilists,
            _ => HermiteFamily::Physicists,
        };
        let (rhs, mag) = evaluate_expansion(&terms, &self.x, &product_family).ok()?;
        Some(rel_err(lhs, rhs, mag))
    }
}

/// `P_k(λᵀx) = Σ_q T_{k,q}(λ) ∏_j P_{q_j}(x_j)` for both named families.
pub fn verify_inner_product(cfg: &TrialConfig) -> VerifyReport {
    let outcomes = run_trials(cfg, |rng| {
        let m = rng.gen_range(1..=cfg.m_max);
        let k = rng.gen_range(0..=cfg.k_max);
        let lambda: Vec<f64> = (0..m).map(|_| uniform(rng, cfg.entry_range)).collect();
        let x: Vec<f64> = (0..m).map(|_| uniform(rng, cfg.entry_range)).collect();
        let mut out = Outcome::default();
        for family in ["he", "h"] {
            let case = InnerCase {
                k,
                lambda: lambda.clone(),
                x: x.clone(),
                family: family.into(),
            };
            let check = case.error().map_or_else(Check::broken, |e| Check::float(e, cfg.tol_rel));
            out.record(check, || serde_json::to_value(&case).expect("serializable"));
        }
        out
    });
    finish(Suite::Inner, None, cfg, outcomes)
}

// ---- recurrence against symbolic definition ---------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RecurrenceCase {
    k: Vec<u32>,
    sigma: Vec<Vec<String>>,
    point: Vec<String>,
}

/// Number of rational evaluation points per recurrence instance.
pub const RECURRENCE_POINTS: usize = 50;

/// Memoized recurrence evaluation against the differentiated definition at
/// rational points, exactly.
pub fn verify_recurrence(cfg: &TrialConfig) -> VerifyReport {
    let outcomes = run_trials(cfg, |rng| {
        let n = rng.gen_range(1..=cfg.n_max);
        let k = random_index(rng, n, cfg.k_max);
        let sigma = spd_rows(&rational_matrix(rng, n, n));
        let points: Vec<Vec<BigRational>> = (0..RECURRENCE_POINTS)
            .map(|_| (0..n).map(|_| small_rational(rng)).collect())
            .collect();
        let mut out = Outcome::default();
        let spd = SpdMatrix::factorize(sigma.clone());
        let poly = spd
            .as_ref()
            .ok()
            .and_then(|s| SymbolicHermite::new(s.inverse()).ok()?.get(&k).ok());
        for x in &points {
            let check = match (&spd, &poly) {
                (Ok(spd), Some(poly)) => match (hermite_multi(&k, x, spd), poly.evaluate(x)) {
                    (Ok(a), Ok(b)) => Check::exact(a == b, rational_rel_err(&a, &b)),
                    _ => Check::broken(),
                },
                _ => Check::broken(),
            };
            out.record(check, || {
                serde_json::to_value(RecurrenceCase {
                    k: k.parts().to_vec(),
                    sigma: rational_rows_json(&sigma),
                    point: x.iter().map(fmt_rational).collect(),
                })
                .expect("serializable")
            });
        }
        out
    });
    finish(Suite::Recurrence, None, cfg, outcomes)
}

impl RecurrenceCase {
    fn error(&self) -> Option<(bool, f64)> {
        let k = MultiIndex::new(self.k.clone()).ok()?;
        let spd = SpdMatrix::factorize(rational_matrix_from(&self.sigma)?).ok()?;
        let x = self.point.iter().map(|s| parse_rational(s)).collect::<Option<Vec<_>>>()?;
        let a = hermite_multi(&k, &x, &spd).ok()?;
        let b = SymbolicHermite::new(spd.inverse()).ok()?.get(&k).ok()?.evaluate(&x).ok()?;
        Some((a == b, rational_rel_err(&a, &b)))
    }
}

// ---- exact oracle -----------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
struct OracleCase {
    k: Vec<u32>,
    lambda: Vec<Vec<String>>,
    sigma: Vec<Vec<String>>,
    upsilon: Vec<Vec<String>>,
    variant: String,
}

impl OracleCase {
    fn holds(&self) -> Option<bool> {
        let variant = parse_variant(&self.variant)?;
        let k = MultiIndex::new(self.k.clone()).ok()?;
        let cmp = oracle_compare(
            &k,
            &rational_matrix_from(&self.lambda)?,
            &rational_matrix_from(&self.sigma)?,
            &rational_matrix_from(&self.upsilon)?,
            variant,
        )
        .ok()?;
        Some(cmp.equal)
    }
}

/// Exact symbolic check of the theorem on random rational instances.
pub fn verify_oracle(cfg: &TrialConfig, variant: CoeffVariant) -> VerifyReport {
    let outcomes = run_trials(cfg, |rng| {
        let n = rng.gen_range(1..=cfg.n_max);
        let m = rng.gen_range(1..=cfg.m_max);
        let k = random_index(rng, n, cfg.k_max);
        let case = OracleCase {
            k: k.parts().to_vec(),
            lambda: rational_rows_json(&rational_matrix(rng, m, n)),
            sigma: rational_rows_json(&spd_rows(&rational_matrix(rng, n, n))),
            upsilon: rational_rows_json(&spd_rows(&rational_matrix(rng, m, m))),
            variant: variant_name(variant).into(),
        };
        let mut out = Outcome::default();
        let check = case.holds().map_or_else(Check::broken, |ok| Check::exact(ok, if ok { 0.0 } else { 1.0 }));
        out.record(check, || serde_json::to_value(&case).expect("serializable"));
        out
    });
    finish(Suite::Oracle, Some(variant), cfg, outcomes)
}

/// Runs one suite. `variant` is ignored by suites that do not depend on it.
pub fn run_suite(suite: Suite, cfg: &TrialConfig, variant: CoeffVariant) -> VerifyReport {
    match suite {
        Suite::Main => verify_main_identity(cfg, variant),
        Suite::Gf => verify_generating_function(cfg),
        Suite::Kron => verify_kron_identity(cfg),
        Suite::Selector => verify_selector_grid(cfg),
        Suite::Univariate => verify_univariate_closed_forms(cfg),
        Suite::Inner => verify_inner_product(cfg),
        Suite::Recurrence => verify_recurrence(cfg),
        Suite::Oracle => verify_oracle(cfg, variant),
    }
}

/// Recomputes the error of a report's worst case.
///
/// Returns `None` when the report has no worst case or it cannot be decoded.
pub fn replay(report: &VerifyReport) -> Option<f64> {
    let suite: Suite = report.suite.parse().ok()?;
    let case = report.worst_case.clone();
    match suite {
        Suite::Main => serde_json::from_value::<MainCase>(case).ok()?.error(),
        Suite::Gf => serde_json::from_value::<GfCase>(case).ok()?.error(),
        Suite::Kron => {
            let c: KronCase = serde_json::from_value(case).ok()?;
            if c.exact_holds()? {
                c.float_error()
            } else {
                Some(0.0)
            }
        }
        Suite::Univariate => match serde_json::from_value::<UniCase>(case.clone()) {
            Ok(c) => c.error(),
            Err(_) => serde_json::from_value::<UniExactCase>(case)
                .ok()?
                .holds()
                .map(|ok| if ok { 0.0 } else { f64::INFINITY }),
        },
        Suite::Inner => serde_json::from_value::<InnerCase>(case).ok()?.error(),
        Suite::Recurrence => serde_json::from_value::<RecurrenceCase>(case).ok()?.error().map(|e| e.1),
        Suite::Oracle => serde_json::from_value::<OracleCase>(case)
            .ok()?
            .holds()
            .map(|ok| if ok { 0.0 } else { 1.0 }),
        Suite::Selector => Some(report.max_rel_err),
    }
}
