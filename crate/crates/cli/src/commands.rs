//! The `factor`, `szego`, `sweep` and `orlicz-check` subcommands.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::Serialize;
use szego_core::asymptotics::{fit_log_log, remainder_table};
use szego_core::factorization::{default_out_radius, g_of_b_and_c, wiener_hopf, TailWarning};
use szego_core::nfunction::NFunction;
use szego_core::orlicz::FlSpace;
use szego_core::toeplitz::log_det;
use szego_core::weights::{pairing_constant, reciprocal_sum, WeightSeq, DEFAULT_HORIZON};
use szego_core::{ComplexExt, FourierSymbol, Mp256, Real, WienerHopfFactors};

use crate::config::{BuiltSpaces, ExperimentConfig, Format, Laurent, Precision};
use crate::CliError;

pub const CSV_HEADER: [&str; 8] =
    ["n", "exact_logabs", "exact_phase", "predicted_logabs", "predicted_phase", "delta", "normalized_delta", "below_floor"];

const DELTA2_DEPTH: usize = 40;

/// Writes `text` to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn pair<T: Real>(z: &Complex<T>) -> [f64; 2] {
    [z.re.to_f64(), z.im.to_f64()]
}

fn coefficients<T: Real>(a: &FourierSymbol<T>, range: std::ops::RangeInclusive<i64>) -> Laurent {
    range.map(|k| (k, pair(&a.coeff(k)))).collect()
}

fn factors<T: Real>(a: &FourierSymbol<T>, cfg: &ExperimentConfig) -> Result<WienerHopfFactors<T>, CliError> {
    let radius = cfg.factor_radius.unwrap_or_else(|| default_out_radius(a));
    Ok(wiener_hopf(a, radius, cfg.tolerances.factor_tol)?)
}

#[derive(Debug, Serialize)]
pub struct FactorReport {
    pub precision: Precision,
    pub symbol_radius: usize,
    pub factor_radius: usize,
    #[serde(rename = "G")]
    pub g: [f64; 2],
    #[serde(rename = "E")]
    pub e: [f64; 2],
    pub residual: f64,
    pub e_tail: Option<TailReport>,
    #[serde(rename = "G_b")]
    pub g_b: [f64; 2],
    #[serde(rename = "G_c")]
    pub g_c: [f64; 2],
    pub route_gap: f64,
    pub a_minus: Laurent,
    pub a_plus: Laurent,
}

#[derive(Debug, Serialize)]
pub struct TailReport {
    pub last_term: f64,
    pub sum: f64,
}

impl From<&TailWarning> for TailReport {
    fn from(t: &TailWarning) -> Self {
        Self { last_term: t.last_term, sum: t.sum }
    }
}

pub fn factor(cfg: &ExperimentConfig, show_radius: usize, out: Option<&Path>) -> Result<(), CliError> {
    let report = match cfg.precision {
        Precision::F64 => factor_report::<f64>(cfg, show_radius)?,
        Precision::Mp => factor_report::<Mp256>(cfg, show_radius)?,
    };
    emit(out, &to_json(&report))
}

pub fn factor_report<T: Real>(cfg: &ExperimentConfig, show_radius: usize) -> Result<FactorReport, CliError> {
    let a = cfg.symbol.build::<T>();
    let f = factors(&a, cfg)?;
    let routes = g_of_b_and_c(&f)?;
    Ok(FactorReport {
        precision: cfg.precision,
        symbol_radius: a.radius(),
        factor_radius: f.out_radius,
        g: pair(&f.g_const),
        e: pair(&f.e_const),
        residual: f.residual,
        e_tail: f.e_tail.as_ref().map(TailReport::from),
        g_b: pair(&routes.g_b),
        g_c: pair(&routes.g_c),
        route_gap: routes.gap,
        a_minus: coefficients(&f.a_minus, -(show_radius as i64)..=0),
        a_plus: coefficients(&f.a_plus, 0..=show_radius as i64),
    })
}

#[derive(Debug, Serialize)]
pub struct SzegoRow {
    pub n: usize,
    pub exact_logabs: f64,
    pub exact_phase: f64,
    pub predicted_logabs: f64,
    pub predicted_phase: f64,
    /// `|D_n / (G^{n+1} E) - 1|`.
    pub rel_error: f64,
    /// `D_n / D_{n-1}`, which tends to `G`.
    pub ratio_to_previous: Option<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct SzegoReport {
    pub precision: Precision,
    #[serde(rename = "G")]
    pub g: [f64; 2],
    #[serde(rename = "E")]
    pub e: [f64; 2],
    pub rows: Vec<SzegoRow>,
}

pub fn szego(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    if cfg.kappa != 0 {
        return Err(CliError::Config("szego tabulates the index-zero limit; use sweep for kappa != 0".into()));
    }
    let report = match cfg.precision {
        Precision::F64 => szego_report::<f64>(cfg)?,
        Precision::Mp => szego_report::<Mp256>(cfg)?,
    };
    emit(out, &to_json(&report))
}

pub fn szego_report<T: Real>(cfg: &ExperimentConfig) -> Result<SzegoReport, CliError> {
    let a = cfg.symbol.build::<T>();
    let f = factors(&a, cfg)?;
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let d = log_det(&a, n);
        let scale = f.log_szego_scale(n);
        let q = d.divide_by_exp(&scale);
        let ratio_to_previous = (n > 0 && !d.is_singular()).then(|| pair(&d.ratio(&log_det(&a, n - 1))));
        rows.push(SzegoRow {
            n,
            exact_logabs: d.log_abs.to_f64(),
            exact_phase: d.phase.to_f64(),
            predicted_logabs: scale.re.to_f64(),
            predicted_phase: scale.im.wrap_angle().to_f64(),
            rel_error: (q - Complex::new(T::one(), T::zero())).modulus().to_f64(),
            ratio_to_previous,
        });
    }
    Ok(SzegoReport { precision: cfg.precision, g: pair(&f.g_const), e: pair(&f.e_const), rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub exact_logabs: f64,
    pub exact_phase: f64,
    pub predicted_logabs: f64,
    pub predicted_phase: f64,
    pub delta: f64,
    pub normalized_delta: f64,
    pub below_floor: bool,
}

impl SweepRow {
    fn record(&self) -> [String; 8] {
        let r = |x: f64| format!("{x:.16e}");
        [
            self.n.to_string(),
            r(self.exact_logabs),
            r(self.exact_phase),
            r(self.predicted_logabs),
            r(self.predicted_phase),
            r(self.delta),
            r(self.normalized_delta),
            self.below_floor.to_string(),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub precision: Precision,
    pub kappa: i64,
    pub rows: usize,
    pub fitted_exponent: Option<f64>,
    pub correction_exponent: Option<f64>,
    pub noise_floor: f64,
    pub fit_floor: f64,
    pub below_floor: usize,
    /// `phi_m psi_m^2 delta(n)` at `m = n + |kappa| + 1`.
    pub alt_normalized: Vec<f64>,
    pub warning: Option<String>,
    #[serde(rename = "G")]
    pub g: [f64; 2],
    #[serde(rename = "E")]
    pub e: [f64; 2],
    pub factor_residual: f64,
    pub hypotheses: Hypotheses,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.record()).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }
}

/// Summary path next to a CSV output: `table.csv` -> `table.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

pub fn sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    let report = match cfg.precision {
        Precision::F64 => sweep_report::<f64>(cfg)?,
        Precision::Mp => sweep_report::<Mp256>(cfg)?,
    };
    if let Some(w) = &report.summary.warning {
        eprintln!("warning: {w}");
    }
    match (cfg.output.format, out) {
        (Format::Json, out) => emit(out, &to_json(&report)),
        (Format::Csv, Some(p)) => {
            emit(Some(p), &report.csv()?)?;
            emit(Some(&summary_path(p)), &to_json(&report.summary))
        }
        (Format::Csv, None) => {
            emit(None, &report.csv()?)?;
            eprint!("{}", to_json(&report.summary));
            Ok(())
        }
    }
}

pub fn sweep_report<T: Real>(cfg: &ExperimentConfig) -> Result<SweepReport, CliError> {
    let (base, shift) = cfg.symbol.split();
    let kappa = cfg.kappa + shift;
    if kappa.unsigned_abs() as usize > cfg.n_list[0] {
        return Err(CliError::Config(format!("total kappa {kappa} exceeds min(n_list) = {}", cfg.n_list[0])));
    }
    let spaces = cfg.spaces.build()?;
    let a = base.build::<T>();
    let f = factors(&a, cfg)?;
    let series = remainder_table(&f, kappa, &cfg.n_list, &spaces.phi, &spaces.psi)?;
    let floor = series.floor.max(cfg.tolerances.fit_floor);
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for (i, &n) in series.n_values.iter().enumerate() {
        let exact = &series.exact[i];
        let (p_abs, p_phase) = match &series.predicted[i] {
            Some(p) => {
                let (l, ph) = p.log_leading();
                (l.to_f64(), ph.to_f64())
            }
            None => {
                let s = f.log_szego_scale(n);
                (s.re.to_f64(), s.im.wrap_angle().to_f64())
            }
        };
        let delta = series.delta[i];
        rows.push(SweepRow {
            n,
            exact_logabs: exact.log_abs.to_f64(),
            exact_phase: exact.phase.to_f64(),
            predicted_logabs: p_abs,
            predicted_phase: p_phase,
            delta,
            normalized_delta: series.normalized[i],
            below_floor: series.below_floor[i] || delta <= floor,
        });
    }
    let fit: Vec<(f64, f64)> = rows.iter().filter(|r| !r.below_floor).map(|r| (r.n as f64, r.delta)).collect();
    let below = rows.iter().filter(|r| r.below_floor).count();
    let warning = (below == rows.len() && rows.iter().any(|r| r.delta > 0.0))
        .then(|| format!("all {below} remainders are at or below the floor {floor:e}; no exponent fitted"));
    let summary = SweepSummary {
        precision: cfg.precision,
        kappa,
        rows: rows.len(),
        fitted_exponent: fit_log_log(&fit),
        correction_exponent: series.correction_exponent,
        noise_floor: series.floor,
        fit_floor: cfg.tolerances.fit_floor,
        below_floor: below,
        alt_normalized: series.alt_normalized.clone(),
        warning,
        g: pair(&f.g_const),
        e: pair(&f.e_const),
        factor_residual: f.residual,
        hypotheses: hypotheses(&spaces),
    };
    Ok(SweepReport { rows, summary })
}

/// A diagnostic value or the reason it could not be computed.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Diagnostic<V> {
    Value(V),
    Error { error: String },
}

impl<V> From<szego_core::Result<V>> for Diagnostic<V> {
    fn from(r: szego_core::Result<V>) -> Self {
        match r {
            Ok(v) => Self::Value(v),
            Err(e) => Self::Error { error: e.to_string() },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassW {
    pub member: bool,
    pub c_nu: f64,
    pub c_nu_exact: Option<f64>,
    pub first_violation: Option<usize>,
    pub horizon: usize,
}

#[derive(Debug, Serialize)]
pub struct Pairing {
    /// `max k / (phi_k psi_k)`.
    #[serde(rename = "M")]
    pub m: f64,
    pub argmax: usize,
    pub bounded: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct ReciprocalSum {
    pub partial: f64,
    pub convergent: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct Hypotheses {
    pub pairing_constant: Diagnostic<Pairing>,
    pub reciprocal_sum: Diagnostic<ReciprocalSum>,
    #[serde(rename = "delta2_zero_Phi")]
    pub delta2_big_phi: Diagnostic<f64>,
    #[serde(rename = "delta2_zero_Psi")]
    pub delta2_big_psi: Diagnostic<f64>,
    pub class_w_phi: Diagnostic<ClassW>,
    pub class_w_psi: Diagnostic<ClassW>,
}

fn class_w(w: &WeightSeq) -> Diagnostic<ClassW> {
    w.class_w_check(DEFAULT_HORIZON)
        .map(|r| ClassW {
            member: r.member,
            c_nu: r.c_nu,
            c_nu_exact: r.c_nu_exact,
            first_violation: r.first_violation,
            horizon: r.horizon,
        })
        .into()
}

pub fn hypotheses(s: &BuiltSpaces) -> Hypotheses {
    Hypotheses {
        pairing_constant: pairing_constant(&s.phi, &s.psi, DEFAULT_HORIZON)
            .map(|p| Pairing { m: p.max_ratio, argmax: p.argmax, bounded: p.bounded })
            .into(),
        reciprocal_sum: reciprocal_sum(&s.phi, &s.psi, DEFAULT_HORIZON)
            .map(|r| ReciprocalSum { partial: r.partial, convergent: r.convergent })
            .into(),
        delta2_big_phi: s.big_phi.delta2_zero_estimate(DELTA2_DEPTH).into(),
        delta2_big_psi: s.big_psi.delta2_zero_estimate(DELTA2_DEPTH).into(),
        class_w_phi: class_w(&s.phi),
        class_w_psi: class_w(&s.psi),
    }
}

#[derive(Debug, Serialize)]
pub struct FlNorm {
    pub wiener: f64,
    pub minus_part: f64,
    pub plus_part: f64,
    pub total: f64,
}

#[derive(Debug, Serialize)]
pub struct Membership {
    pub modular_sum: f64,
    pub member: bool,
}

#[derive(Debug, Serialize)]
pub struct OrliczReport {
    pub fl_norm: Diagnostic<FlNorm>,
    pub class_membership: Diagnostic<Membership>,
    /// `n -> ||a - a^(n)||` in the same norm.
    pub tail_norms: Diagnostic<BTreeMap<usize, f64>>,
    /// `max |Psi(x) - Phi*(x)|` on a grid, `Phi*` built from the inverse density.
    pub complement_gap: Diagnostic<f64>,
    pub hypotheses: Hypotheses,
}

pub fn orlicz_check(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    emit(out, &to_json(&orlicz_report(cfg)?))
}

pub fn orlicz_report(cfg: &ExperimentConfig) -> Result<OrliczReport, CliError> {
    let s = cfg.spaces.build()?;
    let a = cfg.symbol.build::<f64>();
    let space = FlSpace::new(s.big_phi.clone(), s.big_psi.clone(), s.phi.clone(), s.psi.clone());
    let tails = space.tail_norm_series(&a, &cfg.n_list).map(|v| cfg.n_list.iter().copied().zip(v).collect());
    Ok(OrliczReport {
        fl_norm: space
            .fl_norm(&a)
            .map(|r| FlNorm { wiener: r.wiener, minus_part: r.minus_part, plus_part: r.plus_part, total: r.total })
            .into(),
        class_membership: space.class_membership(&a).map(|m| Membership { modular_sum: m.modular_sum, member: m.member }).into(),
        tail_norms: tails.into(),
        complement_gap: complement_gap(&s.big_phi, &s.big_psi).into(),
        hypotheses: hypotheses(&s),
    })
}

fn complement_gap(big_phi: &NFunction, big_psi: &NFunction) -> szego_core::Result<f64> {
    let star = big_phi.complementary()?;
    let top = star.t_max().min(big_psi.t_max()).min(4.0);
    (1..=64).try_fold(0.0f64, |gap, i| {
        let x = top * i as f64 / 64.0;
        Ok(gap.max((star.phi_value(x)? - big_psi.phi_value(x)?).abs()))
    })
}
