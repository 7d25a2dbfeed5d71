//! Fixtures for the criterion benchmarks in `benches/`.

use shiftscope_core::synth::{generate, DriftKind, DriftScenario, DriftSpec, Synthesized};
use shiftscope_core::{learn_reference, ProfileParams, ReferenceProfile};

/// The desk-scale workload: 20 features, 60 + 60 days, one shifted feature.
pub fn desk_scale(rows_per_day: usize) -> Synthesized {
    let scenario = DriftScenario {
        rows_per_day,
        drifts: vec![DriftSpec {
            feature: "num_05".into(),
            onset_day: 30,
            kind: DriftKind::SuddenShift,
            magnitude: 4.0,
        }],
        ..DriftScenario::default()
    };
    generate(&scenario).expect("default scenario is valid")
}

pub fn profile(data: &Synthesized, window_count: usize) -> ReferenceProfile {
    let params = ProfileParams {
        window_count,
        ..ProfileParams::default()
    };
    learn_reference(&data.reference, &data.schema, params).expect("reference is long enough")
}
