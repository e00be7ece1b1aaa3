//! Scenario files: a TOML description of an n-patch model, its movement
//! matrices, the simulation horizon, and the initial state.
//!
//! Movement matrices are written row-major. The mandatory marker
//! `movement.convention = "column-stochastic"` documents (and pins) the
//! orientation: entry `(i, j)` is the fraction of patch `j`'s compartment that
//! moves to patch `i`, so every column sums to one.

use std::fs;
use std::path::Path;

use episcale_core::analysis::{ClassifyOptions, InfectiousStageParams, SharedStageParams};
use episcale_core::metapop::{MetapopModel, MetapopState, MovementModel};
use episcale_core::{
    EpidemicParams, LocalState, RecruitmentSpec, SurvivalFractions, TransitionFractions,
    TransmissionSpec,
};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::failure::Failure;

/// The movement-matrix orientation every scenario must declare.
pub const MOVEMENT_CONVENTION: &str = "column-stochastic";

/// Raw scenario file, mirroring the TOML layout.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Number of slow steps the `simulate` command runs.
    pub horizon: usize,
    /// Per-patch epidemic parameters.
    pub patches: Vec<PatchSpec>,
    /// Movement matrices and the fast/slow time-scale separation.
    pub movement: MovementSpec,
    /// Initial abundances, one entry per patch in each compartment array.
    pub initial_state: InitialStateSpec,
    /// Optional overrides for the `classify` command.
    #[serde(default)]
    pub classify: Option<ClassifySpec>,
}

/// One patch's parameters.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    /// Optional label used in reports; defaults to `patch-<index>`.
    #[serde(default)]
    pub name: Option<String>,
    /// Survival fractions per compartment.
    pub survival: QuadSpec,
    /// Transition fractions out of E, I, and R.
    pub transition: TrioSpec,
    /// Incidence response.
    pub transmission: TransmissionToml,
    /// Recruitment function.
    pub recruitment: RecruitmentToml,
}

/// Four compartment-indexed fractions.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    pub s: f64,
    pub e: f64,
    pub i: f64,
    pub r: f64,
}

/// Three stage-exit fractions.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrioSpec {
    pub e: f64,
    pub i: f64,
    pub r: f64,
}

/// Incidence response selector.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TransmissionToml {
    Standard { beta: f64 },
    Poisson { beta: f64 },
}

/// Recruitment function selector.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RecruitmentToml {
    Constant { b: f64 },
    BevertonHolt { r: f64, k: f64 },
    Ricker { r: f64, k: f64 },
    Geometric { r: f64 },
}

/// Movement block: convention marker, time-scale separation, four matrices.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovementSpec {
    /// Must be `"column-stochastic"`.
    pub convention: String,
    /// Fast movement sub-steps per slow disease step.
    pub fast_steps: u32,
    pub s: Vec<Vec<f64>>,
    pub e: Vec<Vec<f64>>,
    pub i: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
}

/// Initial abundances, one array per compartment.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateSpec {
    pub s: Vec<f64>,
    pub e: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
}

/// Optional overrides for trajectory classification.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySpec {
    pub horizon: Option<usize>,
    pub tail_fraction: Option<f64>,
    pub eradication_threshold: Option<f64>,
    pub persistence_floor: Option<f64>,
}

/// A fully validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// The coupled model.
    pub model: MetapopModel,
    /// Validated initial state.
    pub initial: MetapopState,
    /// Slow steps for the `simulate` command.
    pub horizon: usize,
    /// Classification options (defaults plus any file overrides).
    pub classify: ClassifyOptions,
    /// Display labels, one per patch.
    pub patch_names: Vec<String>,
}

impl Scenario {
    /// Reads and validates a scenario file.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read scenario {}: {e}", path.display())))?;
        let file: ScenarioFile = toml::from_str(&text)
            .map_err(|e| Failure::input(format!("scenario {}: {e}", path.display())))?;
        Self::build(file)
    }

    /// Validates a parsed scenario file.
    pub fn build(file: ScenarioFile) -> Result<Self, Failure> {
        if file.horizon == 0 {
            return Err(Failure::input("horizon must be at least 1"));
        }
        if file.patches.is_empty() {
            return Err(Failure::input(
                "a scenario needs at least one [[patches]] entry",
            ));
        }
        let n = file.patches.len();

        let mut params = Vec::with_capacity(n);
        let mut patch_names = Vec::with_capacity(n);
        for (index, patch) in file.patches.iter().enumerate() {
            let name = patch
                .name
                .clone()
                .unwrap_or_else(|| format!("patch-{}", index + 1));
            let transmission = match patch.transmission {
                TransmissionToml::Standard { beta } => TransmissionSpec::standard(beta),
                TransmissionToml::Poisson { beta } => TransmissionSpec::poisson(beta),
            }
            .map_err(|e| Failure::in_context(&format!("patches[{index}].transmission"), e))?;
            let recruitment = match patch.recruitment {
                RecruitmentToml::Constant { b } => RecruitmentSpec::constant(b),
                RecruitmentToml::BevertonHolt { r, k } => RecruitmentSpec::beverton_holt(r, k),
                RecruitmentToml::Ricker { r, k } => RecruitmentSpec::ricker(r, k),
                RecruitmentToml::Geometric { r } => RecruitmentSpec::geometric(r),
            }
            .map_err(|e| Failure::in_context(&format!("patches[{index}].recruitment"), e))?;
            let p = EpidemicParams::new(
                SurvivalFractions {
                    s: patch.survival.s,
                    e: patch.survival.e,
                    i: patch.survival.i,
                    r: patch.survival.r,
                },
                TransitionFractions {
                    e: patch.transition.e,
                    i: patch.transition.i,
                    r: patch.transition.r,
                },
                transmission,
                recruitment,
            )
            .map_err(|e| Failure::in_context(&format!("patches[{index}]"), e))?;
            params.push(p);
            patch_names.push(name);
        }

        if file.movement.convention != MOVEMENT_CONVENTION {
            return Err(Failure::input(format!(
                "movement.convention must be \"{MOVEMENT_CONVENTION}\" (entry (i, j) is the \
                 fraction moving from patch j to patch i); found \"{}\"",
                file.movement.convention
            )));
        }
        let movement = MovementModel::new(
            matrix_from_rows("movement.s", &file.movement.s, n)?,
            matrix_from_rows("movement.e", &file.movement.e, n)?,
            matrix_from_rows("movement.i", &file.movement.i, n)?,
            matrix_from_rows("movement.r", &file.movement.r, n)?,
        )
        .map_err(|e| Failure::in_context("movement", e))?;

        let model = MetapopModel::new(params, movement, file.movement.fast_steps)
            .map_err(|e| Failure::in_context("scenario", e))?;

        let initial = initial_state(&file.initial_state, n)?;

        let mut classify = ClassifyOptions::default();
        if let Some(spec) = &file.classify {
            if let Some(horizon) = spec.horizon {
                classify.horizon = horizon;
            }
            if let Some(tail_fraction) = spec.tail_fraction {
                classify.tail_fraction = tail_fraction;
            }
            if let Some(threshold) = spec.eradication_threshold {
                classify.eradication_threshold = threshold;
            }
            if let Some(floor) = spec.persistence_floor {
                classify.persistence_floor = floor;
            }
        }

        Ok(Self {
            model,
            initial,
            horizon: file.horizon,
            classify,
            patch_names,
        })
    }

    /// Extracts the two-patch structure required by the eradication-region
    /// analysis: exactly two patches with standard incidence sharing the
    /// exposed-stage parameters and the contact rate.
    pub fn two_patch_stages(
        &self,
    ) -> Result<
        (
            SharedStageParams,
            InfectiousStageParams,
            InfectiousStageParams,
        ),
        Failure,
    > {
        let params = self.model.params();
        if params.len() != 2 {
            return Err(Failure::input(format!(
                "the region analysis needs exactly 2 patches; the scenario has {}",
                params.len()
            )));
        }
        let betas: Vec<f64> = params
            .iter()
            .enumerate()
            .map(|(index, p)| match p.transmission() {
                TransmissionSpec::Standard { beta } => Ok(beta),
                TransmissionSpec::Poisson { .. } => Err(Failure::input(format!(
                    "patches[{index}].transmission: the region analysis needs standard \
                     incidence"
                ))),
            })
            .collect::<Result<_, _>>()?;
        let same = |a: f64, b: f64| a == b;
        if !same(betas[0], betas[1])
            || !same(params[0].sigma().e, params[1].sigma().e)
            || !same(params[0].gamma().e, params[1].gamma().e)
        {
            return Err(Failure::input(
                "the region analysis needs both patches to share sigma_e, gamma_e, and beta",
            ));
        }
        let shared = SharedStageParams {
            sigma_e: params[0].sigma().e,
            gamma_e: params[0].gamma().e,
            beta: betas[0],
        };
        let stage = |p: &EpidemicParams| InfectiousStageParams {
            sigma_i: p.sigma().i,
            gamma_i: p.gamma().i,
        };
        Ok((shared, stage(&params[0]), stage(&params[1])))
    }
}

fn matrix_from_rows(field: &str, rows: &[Vec<f64>], n: usize) -> Result<DMatrix<f64>, Failure> {
    if rows.len() != n {
        return Err(Failure::input(format!(
            "{field} has {} rows; the scenario has {n} patches",
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Failure::input(format!(
                "{field} row {i} has {} entries; the scenario has {n} patches",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn initial_state(spec: &InitialStateSpec, n: usize) -> Result<MetapopState, Failure> {
    for (field, values) in [
        ("initial_state.s", &spec.s),
        ("initial_state.e", &spec.e),
        ("initial_state.i", &spec.i),
        ("initial_state.r", &spec.r),
    ] {
        if values.len() != n {
            return Err(Failure::input(format!(
                "{field} has {} entries; the scenario has {n} patches",
                values.len()
            )));
        }
    }
    let locals: Vec<LocalState> = (0..n)
        .map(|j| {
            LocalState::new(spec.s[j], spec.e[j], spec.i[j], spec.r[j])
                .map_err(|e| Failure::in_context(&format!("initial_state patch {}", j + 1), e))
        })
        .collect::<Result<_, _>>()?;
    MetapopState::from_locals(&locals).map_err(|e| Failure::in_context("initial_state", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        horizon = 10

        [[patches]]
        survival = { s = 0.95, e = 0.99, i = 0.9, r = 0.95 }
        transition = { e = 0.9, i = 0.5, r = 0.1 }
        transmission = { kind = "standard", beta = 0.95 }
        recruitment = { kind = "constant", b = 10.0 }

        [[patches]]
        survival = { s = 0.95, e = 0.99, i = 0.95, r = 0.95 }
        transition = { e = 0.9, i = 0.86, r = 0.1 }
        transmission = { kind = "standard", beta = 0.95 }
        recruitment = { kind = "constant", b = 10.0 }

        [movement]
        convention = "column-stochastic"
        fast_steps = 64
        s = [[0.9, 0.2], [0.1, 0.8]]
        e = [[0.999, 0.099], [0.001, 0.901]]
        i = [[0.901, 0.001], [0.099, 0.999]]
        r = [[0.9, 0.2], [0.1, 0.8]]

        [initial_state]
        s = [100.0, 100.0]
        e = [4.0, 1.0]
        i = [2.0, 1.0]
        r = [0.0, 0.0]
    "#;

    #[test]
    fn parses_and_builds_a_two_patch_scenario() {
        let file: ScenarioFile = toml::from_str(MINIMAL).unwrap();
        let scenario = Scenario::build(file).unwrap();
        assert_eq!(scenario.model.patches(), 2);
        assert_eq!(scenario.model.fast_steps(), 64);
        assert_eq!(scenario.horizon, 10);
        assert_eq!(scenario.patch_names, vec!["patch-1", "patch-2"]);
        assert_eq!(
            scenario
                .initial
                .component(episcale_core::metapop::Compartment::E, 0),
            4.0
        );
        let (shared, p1, p2) = scenario.two_patch_stages().unwrap();
        assert_eq!(shared.beta, 0.95);
        assert_eq!(p1.gamma_i, 0.5);
        assert_eq!(p2.sigma_i, 0.95);
    }

    #[test]
    fn rejects_a_wrong_convention_marker() {
        let text = MINIMAL.replace("column-stochastic", "row-stochastic");
        let file: ScenarioFile = toml::from_str(&text).unwrap();
        let failure = Scenario::build(file).unwrap_err();
        assert_eq!(failure.code(), 1);
        assert!(failure.to_string().contains("column-stochastic"));
    }

    #[test]
    fn rejects_unknown_fields_with_a_field_name() {
        let text = format!("{MINIMAL}\ntyped_wrong = 3\n");
        let error = toml::from_str::<ScenarioFile>(&text).unwrap_err();
        assert!(error.to_string().contains("typed_wrong"));
    }

    #[test]
    fn rejects_a_column_that_does_not_sum_to_one() {
        let text = MINIMAL.replace("[[0.9, 0.2], [0.1, 0.8]]", "[[0.9, 0.2], [0.2, 0.8]]");
        let file: ScenarioFile = toml::from_str(&text).unwrap();
        let failure = Scenario::build(file).unwrap_err();
        assert_eq!(failure.code(), 1);
        let message = failure.to_string();
        assert!(message.starts_with("movement: "), "{message}");
        assert!(message.contains("column 0 sums to"), "{message}");
    }

    #[test]
    fn rejects_mismatched_initial_state_lengths() {
        let text = MINIMAL.replace("e = [4.0, 1.0]", "e = [4.0, 1.0, 7.0]");
        let file: ScenarioFile = toml::from_str(&text).unwrap();
        let failure = Scenario::build(file).unwrap_err();
        assert_eq!(failure.code(), 1);
        assert!(failure.to_string().contains("initial_state.e"));
    }

    #[test]
    fn region_extraction_requires_a_shared_exposed_stage() {
        let text = MINIMAL.replace(
            r#"transmission = { kind = "standard", beta = 0.95 }
        recruitment = { kind = "constant", b = 10.0 }

        [movement]"#,
            r#"transmission = { kind = "standard", beta = 0.9 }
        recruitment = { kind = "constant", b = 10.0 }

        [movement]"#,
        );
        let file: ScenarioFile = toml::from_str(&text).unwrap();
        let scenario = Scenario::build(file).unwrap();
        let failure = scenario.two_patch_stages().unwrap_err();
        assert!(failure
            .to_string()
            .contains("share sigma_e, gamma_e, and beta"));
    }
}
