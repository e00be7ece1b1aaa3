//! `region`: sweep the stationary-profile square of a two-patch scenario for
//! the movement-driven eradication region.

use episcale_core::analysis::{region_sweep, Feasibility, RegionOptions};
use serde::Serialize;

use crate::failure::Failure;
use crate::output::{csv, fmt_float, OutputSink};
use crate::scenario::Scenario;

#[derive(Serialize)]
struct FeasibilityDocument {
    verdict: &'static str,
    relabeled: bool,
    r0_patch1: f64,
    r0_patch2: f64,
    factor_a: f64,
    threshold: f64,
    corner_under: f64,
    corner_over: f64,
}

#[derive(Serialize)]
struct RegionSummary {
    resolution: usize,
    samples: usize,
    eradication_count: usize,
    boundary_vertices: usize,
    feasibility: FeasibilityDocument,
}

fn verdict_name(verdict: Feasibility) -> &'static str {
    match verdict {
        Feasibility::None => "none",
        Feasibility::UnderLine => "under-line",
        Feasibility::OverLine => "over-line",
    }
}

pub fn run(scenario: &Scenario, resolution: usize, sink: &OutputSink) -> Result<(), Failure> {
    let (shared, patch1, patch2) = scenario.two_patch_stages()?;
    let report = region_sweep(&shared, &patch1, &patch2, &RegionOptions { resolution })?;

    let grid = csv(
        &["x", "y", "reproduction_number", "eradication"],
        report.samples.iter().map(|sample| {
            vec![
                fmt_float(sample.x),
                fmt_float(sample.y),
                fmt_float(sample.reproduction_number),
                if sample.eradication { "1" } else { "0" }.to_string(),
            ]
        }),
    );
    sink.write("region.csv", &grid)?;

    let boundary = csv(
        &["x", "y"],
        report
            .boundary
            .iter()
            .map(|&(x, y)| vec![fmt_float(x), fmt_float(y)]),
    );
    sink.write("region_boundary.csv", &boundary)?;

    let summary = RegionSummary {
        resolution: report.resolution,
        samples: report.samples.len(),
        eradication_count: report.eradication_count,
        boundary_vertices: report.boundary.len(),
        feasibility: FeasibilityDocument {
            verdict: verdict_name(report.feasibility.verdict),
            relabeled: report.feasibility.relabeled,
            r0_patch1: report.feasibility.r0.0,
            r0_patch2: report.feasibility.r0.1,
            factor_a: report.feasibility.factor_a,
            threshold: report.feasibility.threshold,
            corner_under: report.feasibility.corner_under,
            corner_over: report.feasibility.corner_over,
        },
    };
    sink.write_json("region_summary.json", &summary)
}
