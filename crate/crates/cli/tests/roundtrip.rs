use gcs_cli::scenario::{ChartSpec, PureSpinorSpec, StructureSource};
use gcs_cli::{Scenario, Suite};
use proptest::prelude::*;

fn suite() -> impl Strategy<Value = Suite> {
    prop::sample::select(Suite::CONCRETE.into_iter().chain([Suite::All]).collect::<Vec<_>>())
}

fn expr() -> impl Strategy<Value = String> {
    "[a-z0-9 ^*+\\[\\]-]{0,16}"
}

fn structure() -> impl Strategy<Value = Option<StructureSource>> {
    prop_oneof![
        Just(None),
        "[a-z0-9-]{1,12}".prop_map(|b| Some(StructureSource::Builtin(b))),
        prop::collection::vec(prop::collection::vec(expr(), 4), 4).prop_map(|m| Some(StructureSource::JMatrix(m))),
        (expr(), prop::option::of(expr()))
            .prop_map(|(form, exp)| Some(StructureSource::PureSpinor(PureSpinorSpec { form, exp }))),
    ]
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (
        prop::option::of("[ -~]{0,20}"),
        prop::option::of((1usize..7, prop::option::of(prop::collection::vec("[a-z][a-z0-9]{0,3}", 1..7)))),
        structure(),
        prop::option::of(expr()),
        prop::collection::vec(suite(), 0..9),
        0u32..5,
    )
        .prop_map(|(name, chart, structure, h, suites, max_degree)| Scenario {
            version: 1,
            name,
            chart: chart.map(|(dim, coordinates)| ChartSpec { dim, coordinates }),
            structure,
            h,
            suites,
            max_degree,
        })
}

proptest! {
    #[test]
    fn canonical_form_survives_serialization(s in scenario()) {
        let c = s.canonical();
        prop_assert_eq!(Scenario::from_json(&c.to_json()).unwrap(), c.clone());
        prop_assert_eq!(c.canonical(), c);
    }

    #[test]
    fn serialization_is_lossless(s in scenario()) {
        prop_assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }
}
