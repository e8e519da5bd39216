//! Seeded property suites. Every trial draws from its own ChaCha stream, so a
//! single `(seed, suite, trial)` triple reproduces it in isolation.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use szego_core::nfunction::NFunction;
use szego_core::orlicz::{FlSpace, IndexSet, OrliczSpaceSpec};
use szego_core::toeplitz::{jacobi_check, product_identity_errors};
use szego_core::weights::WeightSeq;
use szego_core::{Error, Mp256, Real, Symbol64, SymbolMp};

use crate::config::Tolerances;

/// Failures listed per suite; the count covers all of them.
const MAX_LISTED: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Jacobi,
    AlgebraBound,
    Luxemburg,
    Identities,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Jacobi, Suite::AlgebraBound, Suite::Luxemburg, Suite::Identities];

    pub fn name(self) -> &'static str {
        match self {
            Self::Jacobi => "jacobi",
            Self::AlgebraBound => "algebra-bound",
            Self::Luxemburg => "luxemburg",
            Self::Identities => "identities",
        }
    }

    pub fn trials(self) -> u32 {
        match self {
            Self::Jacobi => 200,
            Self::AlgebraBound => 1000,
            Self::Luxemburg => 200,
            Self::Identities => 100,
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

enum Outcome {
    Pass(f64),
    Fail(f64),
    Rejected,
}

#[derive(Debug, Serialize)]
pub struct Failure {
    pub trial: u32,
    pub error: f64,
    pub reproduce: String,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub tolerance: f64,
    pub trials: u32,
    pub passed: u32,
    pub failed: u32,
    pub rejected: u32,
    pub max_error: f64,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub failed_trials: u32,
    pub suites: Vec<SuiteReport>,
}

pub fn trial_rng(seed: u64, suite: Suite, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite.stream() << 32) | u64::from(trial));
    rng
}

fn unit_disk(rng: &mut ChaCha8Rng) -> Complex<f64> {
    let r = rng.random_range(0.0f64..1.0).sqrt();
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    Complex::from_polar(r, t)
}

fn random_symbol(rng: &mut ChaCha8Rng, radius: usize) -> Symbol64 {
    Symbol64::from_dense(radius, (0..2 * radius + 1).map(|_| unit_disk(rng)).collect()).expect("dense length matches radius")
}

fn to_mp(a: &Symbol64) -> SymbolMp {
    let coeffs = a.dense().iter().map(|c| Complex::new(Mp256::from_f64(c.re), Mp256::from_f64(c.im))).collect();
    SymbolMp::from_dense(a.radius(), coeffs).expect("dense length matches radius")
}

fn tolerance(suite: Suite, tol: &Tolerances) -> f64 {
    match suite {
        Suite::Jacobi => tol.jacobi,
        Suite::AlgebraBound => 1.0,
        Suite::Luxemburg => tol.luxemburg,
        Suite::Identities => tol.identity,
    }
}

fn run_trial(suite: Suite, rng: &mut ChaCha8Rng, trial: u32, tol: f64, fl: &FlSpace) -> Outcome {
    let judge = |err: f64| if err < tol { Outcome::Pass(err) } else { Outcome::Fail(err) };
    match suite {
        Suite::Jacobi => {
            let kappa = 1 + trial as usize % 3;
            let radius = rng.random_range(kappa..=4);
            let a = random_symbol(rng, radius);
            // corner determinants cancel well below f64 resolution on some draws
            match jacobi_check(&to_mp(&a), 10, kappa) {
                Ok(j) => judge(j.max_rel_err),
                Err(Error::SingularMatrix { .. }) => Outcome::Rejected,
                Err(_) => Outcome::Fail(f64::INFINITY),
            }
        }
        Suite::AlgebraBound => {
            let (ra, rb) = (rng.random_range(0..=8), rng.random_range(0..=8));
            let a = random_symbol(rng, ra);
            let b = random_symbol(rng, rb);
            match fl.algebra_bound_check(&a, &b) {
                Ok(r) => {
                    let ratio = if r.rhs > 0.0 { r.lhs / r.rhs } else { 0.0 };
                    if r.holds {
                        Outcome::Pass(ratio)
                    } else {
                        Outcome::Fail(ratio)
                    }
                }
                Err(_) => Outcome::Fail(f64::INFINITY),
            }
        }
        Suite::Luxemburg => {
            let p = rng.random_range(1.1..4.0);
            let alpha = rng.random_range(0.0..2.0);
            let j = rng.random_range(0..16usize);
            let z = unit_disk(rng) + Complex::new(0.01, 0.0);
            let spec = OrliczSpaceSpec::new(
                NFunction::power(p).expect("p > 1"),
                WeightSeq::power(alpha).expect("alpha >= 0"),
                IndexSet::NonNegative,
            );
            let mut seq = vec![Complex::new(0.0, 0.0); j + 1];
            seq[j] = z;
            let want = z.norm() * ((j + 1) as f64).powf(alpha) / p.powf(1.0 / p);
            match spec.luxemburg_norm(&seq) {
                Ok(got) => judge((got - want).abs() / want),
                Err(_) => Outcome::Fail(f64::INFINITY),
            }
        }
        Suite::Identities => {
            let (ra, rb, n) = (rng.random_range(0..=4), rng.random_range(0..=4), rng.random_range(0..=12));
            let a = random_symbol(rng, ra);
            let b = random_symbol(rng, rb);
            let e = product_identity_errors(&a, &b, n);
            judge(e.toeplitz.max(e.hankel))
        }
    }
}

fn algebra_space() -> FlSpace {
    let two = NFunction::power(2.0).expect("p = 2");
    let half = WeightSeq::power(0.5).expect("alpha = 1/2");
    FlSpace::new(two.clone(), two, half.clone(), half)
}

/// Runs `suites` (all trials, or only `only_trial`).
pub fn run(seed: u64, suites: &[Suite], only_trial: Option<u32>, tol: &Tolerances) -> VerifyReport {
    let fl = algebra_space();
    let mut reports = Vec::with_capacity(suites.len());
    for &suite in suites {
        let tolerance = tolerance(suite, tol);
        let trials: Vec<u32> = match only_trial {
            Some(t) => vec![t],
            None => (0..suite.trials()).collect(),
        };
        let mut r = SuiteReport {
            name: suite.name(),
            tolerance,
            trials: trials.len() as u32,
            passed: 0,
            failed: 0,
            rejected: 0,
            max_error: 0.0,
            failures: Vec::new(),
        };
        for trial in trials {
            let mut rng = trial_rng(seed, suite, trial);
            match run_trial(suite, &mut rng, trial, tolerance, &fl) {
                Outcome::Pass(err) => {
                    r.passed += 1;
                    r.max_error = r.max_error.max(err);
                }
                Outcome::Fail(err) => {
                    r.failed += 1;
                    r.max_error = r.max_error.max(err);
                    if r.failures.len() < MAX_LISTED {
                        let reproduce = format!("szego verify --seed {seed} --suite {} --trial {trial}", suite.name());
                        r.failures.push(Failure { trial, error: err, reproduce });
                    }
                }
                Outcome::Rejected => r.rejected += 1,
            }
        }
        reports.push(r);
    }
    let failed_trials = reports.iter().map(|r| r.failed).sum();
    VerifyReport { seed, passed: failed_trials == 0, failed_trials, suites: reports }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suites_pass() {
        let report = run(0, &Suite::ALL, None, &Tolerances::default());
        for s in &report.suites {
            assert_eq!(s.failed, 0, "{} failed: {:?}", s.name, s.failures);
        }
        assert!(report.passed);
    }

    #[test]
    fn single_trial_matches_full_run() {
        let tol = Tolerances { identity: 0.0, ..Tolerances::default() };
        let full = run(5, &[Suite::Identities], None, &tol);
        let first = &full.suites[0].failures[0];
        let single = run(5, &[Suite::Identities], Some(first.trial), &tol);
        assert_eq!(single.suites[0].failures[0].error, first.error);
    }

    #[test]
    fn zero_tolerance_fails_with_reproduction_line() {
        let tol = Tolerances { luxemburg: 0.0, ..Tolerances::default() };
        let report = run(3, &[Suite::Luxemburg], None, &tol);
        assert!(!report.passed);
        let f = &report.suites[0].failures[0];
        assert!(f.reproduce.contains("--seed 3") && f.reproduce.contains(&format!("--trial {}", f.trial)));
    }
}
