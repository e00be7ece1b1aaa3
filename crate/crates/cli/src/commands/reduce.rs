//! `reduce`: aggregated-model coefficients, reproduction number, and
//! disease-free state of the scenario.

use episcale_core::metapop::Compartment;
use episcale_core::reduction::{dfe_reduced, r0_reduced, ReducedParams};
use serde::Serialize;

use crate::failure::Failure;
use crate::output::OutputSink;
use crate::scenario::Scenario;

#[derive(Serialize)]
struct GlobalDocument {
    s: f64,
    e: f64,
    i: f64,
    r: f64,
}

#[derive(Serialize)]
struct ProfilesDocument {
    s: Vec<f64>,
    e: Vec<f64>,
    i: Vec<f64>,
    r: Vec<f64>,
}

#[derive(Serialize)]
struct ReduceDocument {
    b_bar: f64,
    delta_ss: f64,
    delta_rs: f64,
    delta_ee: f64,
    delta_ei: f64,
    delta_ii: f64,
    delta_ir: f64,
    delta_rr: f64,
    beta_i: f64,
    r0: f64,
    disease_free: GlobalDocument,
    stationary_profiles: ProfilesDocument,
}

pub fn run(scenario: &Scenario, sink: &OutputSink) -> Result<(), Failure> {
    let reduced = ReducedParams::from_model(&scenario.model)
        .map_err(|e| Failure::in_context("aggregation", e))?;
    let dfe = dfe_reduced(&reduced);
    let weights = |compartment: Compartment| {
        reduced
            .profiles()
            .profile(compartment)
            .weights()
            .iter()
            .copied()
            .collect()
    };
    let document = ReduceDocument {
        b_bar: reduced.b_bar(),
        delta_ss: reduced.delta_ss(),
        delta_rs: reduced.delta_rs(),
        delta_ee: reduced.delta_ee(),
        delta_ei: reduced.delta_ei(),
        delta_ii: reduced.delta_ii(),
        delta_ir: reduced.delta_ir(),
        delta_rr: reduced.delta_rr(),
        beta_i: reduced.beta_i(),
        r0: r0_reduced(&reduced),
        disease_free: GlobalDocument {
            s: dfe.s,
            e: dfe.e,
            i: dfe.i,
            r: dfe.r,
        },
        stationary_profiles: ProfilesDocument {
            s: weights(Compartment::S),
            e: weights(Compartment::E),
            i: weights(Compartment::I),
            r: weights(Compartment::R),
        },
    };
    sink.write_json("reduced.json", &document)
}
