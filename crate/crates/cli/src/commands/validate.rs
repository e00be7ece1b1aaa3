//! `validate`: parse, validate, and summarize a scenario file.

use episcale_core::reduction::ReducedParams;
use episcale_core::seirs::r0_closed_form;
use episcale_core::Error;

use crate::failure::Failure;
use crate::output::{fmt_float, OutputSink};
use crate::scenario::Scenario;

pub fn run(scenario: &Scenario, sink: &OutputSink) -> Result<(), Failure> {
    let mut lines = vec![
        "scenario OK".to_string(),
        format!("patches: {}", scenario.model.patches()),
        format!("fast steps per slow step: {}", scenario.model.fast_steps()),
        format!("simulation horizon: {}", scenario.horizon),
    ];
    for (params, name) in scenario.model.params().iter().zip(&scenario.patch_names) {
        lines.push(format!(
            "{name}: R0 = {}",
            fmt_float(r0_closed_form(params))
        ));
    }
    match ReducedParams::from_model(&scenario.model) {
        Ok(_) => lines.push("aggregation: available".to_string()),
        Err(Error::Unsupported(reason)) => {
            lines.push(format!("aggregation: not available ({reason})"));
        }
        Err(e) => return Err(Failure::in_context("aggregation", e)),
    }
    lines.push(String::new());
    sink.write("validate.txt", &lines.join("\n"))
}
