//! Experiment configuration: JSON in, validated and round-trippable.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use szego_core::nfunction::NFunction;
use szego_core::weights::WeightSeq;
use szego_core::{FourierSymbol, Real};

use crate::CliError;

/// Coefficient map `k -> [re, im]`; keys are written as JSON strings.
pub type Laurent = BTreeMap<i64, [f64; 2]>;

pub const DEFAULT_EXP_RADIUS: usize = 64;

/// A symbol literal: a Laurent polynomial, the exponential of one, or a
/// symbol multiplied by `t^kappa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "RawSymbol")]
pub enum SymbolSpec {
    Laurent {
        laurent: Laurent,
    },
    Exp {
        exp_of: Laurent,
        /// Coefficients of `exp(g)` are kept on `[-radius, radius]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<usize>,
    },
    TimesTk {
        times_tk: TimesTk,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimesTk {
    pub kappa: i64,
    pub base: Box<SymbolSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSymbol {
    laurent: Option<Laurent>,
    exp_of: Option<Laurent>,
    radius: Option<usize>,
    times_tk: Option<TimesTk>,
}

impl TryFrom<RawSymbol> for SymbolSpec {
    type Error = String;

    fn try_from(raw: RawSymbol) -> Result<Self, String> {
        match (raw.laurent, raw.exp_of, raw.times_tk) {
            (Some(laurent), None, None) if raw.radius.is_none() => Ok(Self::Laurent { laurent }),
            (None, Some(exp_of), None) => Ok(Self::Exp { exp_of, radius: raw.radius }),
            (None, None, Some(times_tk)) if raw.radius.is_none() => Ok(Self::TimesTk { times_tk }),
            _ => Err("a symbol needs exactly one of `laurent`, `exp_of` or `times_tk` (`radius` only with `exp_of`)".into()),
        }
    }
}

impl SymbolSpec {
    /// Peels `times_tk` wrappers: the innermost base and the total shift.
    pub fn split(&self) -> (&SymbolSpec, i64) {
        match self {
            Self::TimesTk { times_tk } => {
                let (base, k) = times_tk.base.split();
                (base, k + times_tk.kappa)
            }
            other => (other, 0),
        }
    }

    pub fn build<T: Real>(&self) -> FourierSymbol<T> {
        match self {
            Self::Laurent { laurent } => laurent_symbol(laurent),
            Self::Exp { exp_of, radius } => laurent_symbol::<T>(exp_of).exp_symbol(radius.unwrap_or(DEFAULT_EXP_RADIUS)).symbol,
            Self::TimesTk { times_tk } => times_tk.base.build::<T>().shift(times_tk.kappa),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let check = |l: &Laurent| {
            if l.values().flatten().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(CliError::Config("symbol coefficients must be finite".into()))
            }
        };
        match self {
            Self::Laurent { laurent } => check(laurent),
            Self::Exp { exp_of, radius } => {
                if *radius == Some(0) {
                    return Err(CliError::Config("exp_of radius must be positive".into()));
                }
                check(exp_of)
            }
            Self::TimesTk { times_tk } => times_tk.base.validate(),
        }
    }
}

fn laurent_symbol<T: Real>(l: &Laurent) -> FourierSymbol<T> {
    FourierSymbol::from_terms(l.iter().map(|(&k, [re, im])| (k, Complex::new(T::from_f64(*re), T::from_f64(*im)))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NFunctionSpec {
    Power { p: f64 },
    Table { t: Vec<f64>, p: Vec<f64> },
}

impl NFunctionSpec {
    pub fn build(&self) -> szego_core::Result<NFunction> {
        match self {
            Self::Power { p } => NFunction::power(*p),
            Self::Table { t, p } => NFunction::table(t.clone(), p.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    Power { alpha: f64 },
    Explicit { values: Vec<f64> },
}

impl WeightSpec {
    pub fn build(&self) -> szego_core::Result<WeightSeq> {
        match self {
            Self::Power { alpha } => WeightSeq::power(*alpha),
            Self::Explicit { values } => WeightSeq::explicit(values.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spaces {
    #[serde(rename = "Phi")]
    pub big_phi: NFunctionSpec,
    #[serde(rename = "Psi")]
    pub big_psi: NFunctionSpec,
    pub phi: WeightSpec,
    pub psi: WeightSpec,
}

impl Default for Spaces {
    fn default() -> Self {
        Self {
            big_phi: NFunctionSpec::Power { p: 2.0 },
            big_psi: NFunctionSpec::Power { p: 2.0 },
            phi: WeightSpec::Power { alpha: 1.0 },
            psi: WeightSpec::Power { alpha: 1.0 },
        }
    }
}

/// The built spaces, ready for the core routines.
pub struct BuiltSpaces {
    pub big_phi: NFunction,
    pub big_psi: NFunction,
    pub phi: WeightSeq,
    pub psi: WeightSeq,
}

impl Spaces {
    pub fn build(&self) -> Result<BuiltSpaces, CliError> {
        let cfg = |e: szego_core::Error| CliError::Config(format!("spaces: {e}"));
        Ok(BuiltSpaces {
            big_phi: self.big_phi.build().map_err(cfg)?,
            big_psi: self.big_psi.build().map_err(cfg)?,
            phi: self.phi.build().map_err(cfg)?,
            psi: self.psi.build().map_err(cfg)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Factorization residual bound.
    pub factor_tol: f64,
    /// Remainders at or below this (or the precision's noise floor) are
    /// flagged and left out of the fit.
    pub fit_floor: f64,
    /// Relative tolerance of the Jacobi suite in `verify`.
    pub jacobi: f64,
    /// Entrywise tolerance of the operator identity suite.
    pub identity: f64,
    /// Relative tolerance of the Luxemburg closed-form suite.
    pub luxemburg: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { factor_tol: 1e-12, fit_floor: 0.0, jacobi: 1e-9, identity: 1e-10, luxemburg: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F64,
    Mp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Csv
}

impl Default for Output {
    fn default() -> Self {
        Self { path: None, format: Format::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub symbol: SymbolSpec,
    #[serde(default)]
    pub kappa: i64,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub spaces: Spaces,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Output,
    #[serde(default = "default_precision")]
    pub precision: Precision,
    /// Radius of the computed factors; derived from the symbol when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_radius: Option<usize>,
}

fn default_n_list() -> Vec<usize> {
    vec![8, 16, 32, 64]
}

fn default_precision() -> Precision {
    Precision::F64
}

impl ExperimentConfig {
    /// A config with defaults everywhere except the symbol.
    pub fn for_symbol(symbol: SymbolSpec) -> Self {
        Self {
            symbol,
            kappa: 0,
            n_list: default_n_list(),
            spaces: Spaces::default(),
            tolerances: Tolerances::default(),
            seed: 0,
            output: Output::default(),
            precision: Precision::F64,
            factor_radius: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.symbol.validate()?;
        if self.n_list.is_empty() {
            return Err(CliError::Config("n_list must not be empty".into()));
        }
        if let Some(w) = self.n_list.windows(2).find(|w| w[0] >= w[1]) {
            return Err(CliError::Config(format!("n_list must be strictly increasing, found {} then {}", w[0], w[1])));
        }
        let min_n = self.n_list[0];
        if self.kappa.unsigned_abs() as usize > min_n {
            return Err(CliError::Config(format!("|kappa| = {} exceeds min(n_list) = {min_n}", self.kappa.abs())));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("factor_tol", t.factor_tol),
            ("fit_floor", t.fit_floor),
            ("jacobi", t.jacobi),
            ("identity", t.identity),
            ("luxemburg", t.luxemburg),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerance {name} must be finite and >= 0, got {v}")));
            }
        }
        if t.factor_tol == 0.0 {
            return Err(CliError::Config("factor_tol must be positive".into()));
        }
        if self.factor_radius == Some(0) {
            return Err(CliError::Config("factor_radius must be positive".into()));
        }
        self.spaces.build().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "symbol": {"times_tk": {"kappa": 1, "base": {"exp_of": {"-1": [0.3, 0.0], "1": [0.2, 0.0]}, "radius": 32}}},
        "kappa": -1,
        "n_list": [4, 8],
        "spaces": {"Phi": {"kind": "power", "p": 3.0}, "Psi": {"kind": "table", "t": [0, 1, 2], "p": [0, 1, 3]},
                   "phi": {"kind": "power", "alpha": 0.5}, "psi": {"kind": "explicit", "values": [1, 2, 3]}},
        "tolerances": {"factor_tol": 1e-10},
        "seed": 7,
        "output": {"path": "out.csv", "format": "json"},
        "precision": "mp"
    }"#;

    #[test]
    fn parses_every_fragment_kind() {
        let c = ExperimentConfig::from_json(SAMPLE).unwrap();
        let (base, shift) = c.symbol.split();
        assert_eq!(shift, 1);
        assert!(matches!(base, SymbolSpec::Exp { radius: Some(32), .. }));
        assert_eq!(c.tolerances.jacobi, 1e-9);
        assert_eq!(c.precision, Precision::Mp);
        assert_eq!(c.output.format, Format::Json);
        let a = c.symbol.build::<f64>();
        assert_eq!(a.support(), Some((-31, 33)));
    }

    #[test]
    fn rejects_bad_n_list_and_kappa() {
        let base = r#"{"symbol": {"laurent": {"0": [1, 0]}}, "n_list": NL, "kappa": K}"#;
        let bad = |nl: &str, k: &str| ExperimentConfig::from_json(&base.replace("NL", nl).replace("K", k)).unwrap_err();
        assert!(bad("[4, 4]", "0").to_string().contains("strictly increasing"));
        assert!(bad("[]", "0").to_string().contains("empty"));
        assert!(bad("[2, 5]", "3").to_string().contains("kappa"));
        assert!(ExperimentConfig::from_json(&base.replace("NL", "[2, 5]").replace("K", "-2")).is_ok());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_fragments() {
        assert!(ExperimentConfig::from_json(r#"{"symbol": {"laurent": {}}, "kapa": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"symbol": {"laurent": {"x": [1, 0]}}}"#).is_err());
        let bad_weight = r#"{"symbol": {"laurent": {}}, "spaces": {"Phi": {"kind": "power", "p": 2},
            "Psi": {"kind": "power", "p": 2}, "phi": {"kind": "power", "alpha": -1}, "psi": {"kind": "power", "alpha": 1}}}"#;
        assert!(matches!(ExperimentConfig::from_json(bad_weight), Err(CliError::Config(_))));
    }
}
