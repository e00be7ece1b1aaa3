//! `r0`: per-patch reproduction numbers by both routes, plus the aggregated
//! reproduction number when the scenario admits the reduced model.

use episcale_core::reduction::{r0_reduced, ReducedParams};
use episcale_core::seirs::{r0_closed_form, r0_next_generation};
use episcale_core::Error;
use serde::Serialize;

use crate::failure::Failure;
use crate::output::OutputSink;
use crate::scenario::Scenario;

#[derive(Serialize)]
struct PatchR0 {
    patch: String,
    closed_form: f64,
    next_generation: f64,
}

#[derive(Serialize)]
struct R0Document {
    patches: Vec<PatchR0>,
    /// Aggregated reproduction number; absent when the scenario does not
    /// support aggregation (non-standard incidence or density-dependent
    /// recruitment).
    aggregated: Option<f64>,
}

pub fn run(scenario: &Scenario, sink: &OutputSink) -> Result<(), Failure> {
    let patches = scenario
        .model
        .params()
        .iter()
        .zip(&scenario.patch_names)
        .map(|(params, name)| PatchR0 {
            patch: name.clone(),
            closed_form: r0_closed_form(params),
            next_generation: r0_next_generation(params),
        })
        .collect();
    let aggregated = match ReducedParams::from_model(&scenario.model) {
        Ok(reduced) => Some(r0_reduced(&reduced)),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(Failure::in_context("aggregation", e)),
    };
    sink.write_json(
        "r0.json",
        &R0Document {
            patches,
            aggregated,
        },
    )
}
