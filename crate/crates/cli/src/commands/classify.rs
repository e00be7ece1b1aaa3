//! `classify`: long-run verdicts for the coupled system and for every patch
//! in isolation.

use episcale_core::analysis::{classify_asymptotics, Classification, Verdict};
use episcale_core::metapop::MetapopState;
use episcale_core::seirs::seirs_step;
use episcale_core::LocalState;
use serde::Serialize;

use crate::failure::Failure;
use crate::output::OutputSink;
use crate::scenario::Scenario;

#[derive(Serialize)]
struct ClassificationDocument {
    verdict: &'static str,
    final_infected: f64,
    tail_min: f64,
    horizon: usize,
}

#[derive(Serialize)]
struct IsolatedDocument {
    patch: String,
    #[serde(flatten)]
    classification: ClassificationDocument,
}

#[derive(Serialize)]
struct ClassifyOutput {
    coupled: ClassificationDocument,
    isolated: Vec<IsolatedDocument>,
}

fn verdict_name(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::Eradication => "eradication",
        Verdict::Persistence => "persistence",
        Verdict::Undetermined => "undetermined",
    }
}

fn document(classification: &Classification) -> ClassificationDocument {
    ClassificationDocument {
        verdict: verdict_name(classification.verdict),
        final_infected: classification.final_infected,
        tail_min: classification.tail_min,
        horizon: classification.horizon,
    }
}

pub fn run(scenario: &Scenario, sink: &OutputSink) -> Result<(), Failure> {
    let options = scenario.classify;
    let model = &scenario.model;
    let coupled = classify_asymptotics(
        |state: &MetapopState| {
            model
                .full_step(state)
                .expect("the initial state was validated against the model")
        },
        MetapopState::infected,
        scenario.initial.clone(),
        &options,
    )?;

    let isolated = model
        .params()
        .iter()
        .enumerate()
        .map(|(j, params)| {
            let classification = classify_asymptotics(
                |state: &LocalState| seirs_step(params, state),
                LocalState::infected,
                scenario.initial.local(j),
                &options,
            )?;
            Ok(IsolatedDocument {
                patch: scenario.patch_names[j].clone(),
                classification: document(&classification),
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    sink.write_json(
        "classify.json",
        &ClassifyOutput {
            coupled: document(&coupled),
            isolated,
        },
    )
}
