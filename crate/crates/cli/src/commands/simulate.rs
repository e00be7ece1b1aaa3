//! `simulate`: run the coupled two-time-scale system and emit the trajectory.

use episcale_core::metapop::Compartment;

use crate::failure::Failure;
use crate::output::{csv, fmt_float, OutputSink};
use crate::scenario::Scenario;

pub fn run(scenario: &Scenario, sink: &OutputSink) -> Result<(), Failure> {
    let trajectory = scenario
        .model
        .simulate(&scenario.initial, scenario.horizon)?;
    let n = scenario.model.patches();

    let mut header = vec!["step".to_string()];
    for compartment in ["s", "e", "i", "r"] {
        for j in 1..=n {
            header.push(format!("{compartment}{j}"));
        }
    }
    header.push("total".to_string());
    header.push("infected".to_string());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();

    let rows = trajectory.iter().enumerate().map(|(t, state)| {
        let mut row = Vec::with_capacity(header_refs.len());
        row.push(t.to_string());
        for compartment in Compartment::ALL {
            for j in 0..n {
                row.push(fmt_float(state.component(compartment, j)));
            }
        }
        row.push(fmt_float(state.total()));
        row.push(fmt_float(state.infected()));
        row
    });
    sink.write("trajectory.csv", &csv(&header_refs, rows))
}
