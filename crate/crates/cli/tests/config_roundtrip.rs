use proptest::prelude::*;
use szego_cli::config::{
    ExperimentConfig, Format, Laurent, NFunctionSpec, Output, Precision, Spaces, SymbolSpec, TimesTk, Tolerances, WeightSpec,
};

fn laurent() -> impl Strategy<Value = Laurent> {
    prop::collection::btree_map(-6i64..=6, prop::array::uniform2(-2.0f64..2.0), 0..5)
}

fn symbol() -> impl Strategy<Value = SymbolSpec> {
    let leaf = prop_oneof![
        laurent().prop_map(|laurent| SymbolSpec::Laurent { laurent }),
        (laurent(), prop::option::of(1usize..128)).prop_map(|(exp_of, radius)| SymbolSpec::Exp { exp_of, radius }),
    ];
    leaf.prop_recursive(2, 4, 1, |inner| {
        (-3i64..=3, inner).prop_map(|(kappa, base)| SymbolSpec::TimesTk { times_tk: TimesTk { kappa, base: Box::new(base) } })
    })
}

fn nfunction() -> impl Strategy<Value = NFunctionSpec> {
    prop_oneof![
        (1.1f64..5.0).prop_map(|p| NFunctionSpec::Power { p }),
        (1usize..5).prop_map(|m| {
            let t: Vec<f64> = (0..=m).map(|i| i as f64).collect();
            let p = t.iter().map(|x| x * x).collect();
            NFunctionSpec::Table { t, p }
        }),
    ]
}

fn weight() -> impl Strategy<Value = WeightSpec> {
    prop_oneof![
        (0.0f64..3.0).prop_map(|alpha| WeightSpec::Power { alpha }),
        prop::collection::vec(0.0f64..1.0, 1..6).prop_map(|steps| {
            let values = steps.iter().scan(1.0, |acc, s| {
                let v = *acc;
                *acc += s;
                Some(v)
            });
            WeightSpec::Explicit { values: values.collect() }
        }),
    ]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    (
        symbol(),
        prop::collection::btree_set(2usize..200, 1..6),
        (nfunction(), nfunction(), weight(), weight()),
        (1e-15f64..1e-6, 0.0f64..1e-3, any::<u64>(), any::<bool>(), prop::option::of("[a-z]{1,8}\\.csv")),
        prop::option::of(1usize..512),
    )
        .prop_map(|(symbol, ns, (big_phi, big_psi, phi, psi), (factor_tol, fit_floor, seed, mp, path), factor_radius)| {
            let n_list: Vec<usize> = ns.into_iter().collect();
            let kappa = (seed % 3) as i64 - 1;
            ExperimentConfig {
                symbol,
                kappa,
                n_list,
                spaces: Spaces { big_phi, big_psi, phi, psi },
                tolerances: Tolerances { factor_tol, fit_floor, ..Tolerances::default() },
                seed,
                output: Output { path, format: if mp { Format::Json } else { Format::Csv } },
                precision: if mp { Precision::Mp } else { Precision::F64 },
                factor_radius,
            }
        })
}

proptest! {
    #[test]
    fn parse_serialize_parse_is_identity(cfg in config()) {
        let once = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(&once, &cfg);
        let twice = ExperimentConfig::from_json(&once.to_json()).unwrap();
        prop_assert_eq!(twice, once);
    }
}

#[test]
fn defaults_fill_a_minimal_config() {
    let cfg = ExperimentConfig::from_json(r#"{"symbol": {"laurent": {"0": [1, 0]}}}"#).unwrap();
    assert_eq!(cfg, ExperimentConfig::for_symbol(cfg.symbol.clone()));
    assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
}
