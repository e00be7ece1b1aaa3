//! `verify-k`: measure how fast the full-system fixed point approaches the
//! lifted aggregated fixed point as the movement time scale separates.

use episcale_core::metapop::Compartment;
use episcale_core::reduction::{timescale_convergence, KDistance, TimescaleReport};
use serde::Serialize;

use crate::failure::Failure;
use crate::output::{csv, fmt_float, OutputSink};
use crate::scenario::Scenario;

#[derive(Serialize)]
struct GlobalDocument {
    s: f64,
    e: f64,
    i: f64,
    r: f64,
}

#[derive(Serialize)]
struct StateDocument {
    s: Vec<f64>,
    e: Vec<f64>,
    i: Vec<f64>,
    r: Vec<f64>,
}

#[derive(Serialize)]
struct VerifyKDocument {
    reduced_fixed_point: GlobalDocument,
    reduced_residual: f64,
    attracting: bool,
    lifted: StateDocument,
    passes: bool,
}

pub fn run(
    scenario: &Scenario,
    ks: &[u32],
    workers: usize,
    sink: &OutputSink,
) -> Result<(), Failure> {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return Err(Failure::input(
            "verify-k needs at least one fast-step count",
        ));
    }

    // Each worker solves an independent slice of the ladder; the reduced-model
    // work is repeated per slice but is negligible next to the per-k solves.
    // The merged result is identical for every worker count.
    let workers = workers.clamp(1, ks.len());
    let chunk_size = ks.len().div_ceil(workers);
    let model = &scenario.model;
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = ks
            .chunks(chunk_size)
            .map(|chunk| scope.spawn(move || timescale_convergence(model, chunk)))
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("a solver thread panicked"))
            .collect()
    });

    let mut merged: Option<TimescaleReport> = None;
    let mut distances: Vec<KDistance> = Vec::with_capacity(ks.len());
    for result in results {
        match result {
            Ok(report) => {
                distances.extend(report.distances.iter().copied());
                merged.get_or_insert(report);
            }
            Err(e) => {
                return Err(Failure::with_class_of(&e.error, format!("verify-k: {e}")));
            }
        }
    }
    let mut report = merged.expect("at least one worker ran");
    distances.sort_by_key(|d| d.fast_steps);
    report.distances = distances;

    let table = csv(
        &["fast_steps", "distance", "residual", "iterations"],
        report.distances.iter().map(|d| {
            vec![
                d.fast_steps.to_string(),
                fmt_float(d.distance),
                fmt_float(d.residual),
                d.iterations.to_string(),
            ]
        }),
    );
    sink.write("verify_k.csv", &table)?;

    let component = |compartment: Compartment| {
        report
            .lifted
            .compartment(compartment)
            .iter()
            .copied()
            .collect()
    };
    let summary = VerifyKDocument {
        reduced_fixed_point: GlobalDocument {
            s: report.reduced_fixed_point.s,
            e: report.reduced_fixed_point.e,
            i: report.reduced_fixed_point.i,
            r: report.reduced_fixed_point.r,
        },
        reduced_residual: report.reduced_residual,
        attracting: report.attracting,
        lifted: StateDocument {
            s: component(Compartment::S),
            e: component(Compartment::E),
            i: component(Compartment::I),
            r: component(Compartment::R),
        },
        passes: report.passes(),
    };
    sink.write_json("verify_k.json", &summary)
}
