//! Spectral utilities, long-run trajectory classification, and the two-patch
//! eradication-region geometry.
//!
//! The two-patch analysis works in profile coordinates `(x, y)`: `x` is the
//! share of the exposed stationary profile in patch 1, `y` the share of the
//! infectious profile in patch 1. With the exposed-stage parameters shared
//! across patches, the aggregated reproduction number factors as
//! `A * g(x, y)` with [`exposed_stage_factor`] `A` independent of the profiles
//! and [`infectious_stage_ratio`] `g` a ratio of linear terms. Its sub-level
//! set `{A g < 1}` is the eradication region swept by [`region_sweep`].

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerances;

/// Spectral radius of an entrywise-nonnegative square matrix.
///
/// Sizes one and two use closed forms; larger matrices are handled by power
/// iteration from the all-ones vector, which converges for the nonnegative
/// matrices this crate works with (movement operators, next-generation
/// operators) whenever the dominant eigenvalue is unique in modulus.
///
/// # Errors
///
/// - Empty or non-square input, or a negative/non-finite entry.
/// - [`Error::NumericalFailure`] when the iteration does not settle (for
///   example on periodic structures with several eigenvalues of maximal
///   modulus).
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "spectral radius",
            expected: n.max(1),
            found: m.ncols(),
        });
    }
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidStructure(format!(
                    "entry ({i}, {j}) = {v}: the spectral radius is computed for \
                     entrywise-nonnegative matrices"
                )));
            }
        }
    }
    match n {
        1 => Ok(m[(0, 0)]),
        2 => Ok(linalg::spectral_radius_2x2(m)),
        _ => linalg::power_iteration_radius(m, tolerances::SPECTRAL_RESIDUAL, 100_000),
    }
}

/// Long-run verdict for a trajectory's infected load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The infected load has collapsed below the eradication threshold.
    Eradication,
    /// The infected load stays above the persistence floor over the whole
    /// tail window.
    Persistence,
    /// Neither decision criterion is met at this horizon.
    Undetermined,
}

/// Controls for [`classify_asymptotics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Number of steps to iterate.
    pub horizon: usize,
    /// Fraction of the horizon (from the end) used as the tail window.
    pub tail_fraction: f64,
    /// Final infected load below this is eradication.
    pub eradication_threshold: f64,
    /// Tail-minimum infected load above this is persistence.
    pub persistence_floor: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            horizon: 10_000,
            tail_fraction: 0.5,
            eradication_threshold: 1e-8,
            persistence_floor: 1e-4,
        }
    }
}

/// Outcome of a trajectory classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    /// The verdict.
    pub verdict: Verdict,
    /// Infected load at the final step.
    pub final_infected: f64,
    /// Minimum infected load over the tail window.
    pub tail_min: f64,
    /// Steps iterated.
    pub horizon: usize,
}

/// Iterates `step` from `initial` and classifies the long-run infected load.
///
/// The tail window is the inclusive step range
/// `[ceil(horizon * (1 - tail_fraction)), horizon]`. Eradication is decided on
/// the final value, persistence on the tail minimum — a persistent epidemic
/// must stay up throughout the tail, not merely end up high.
///
/// # Errors
///
/// - Invalid options (zero horizon, tail fraction outside `(0, 1]`, thresholds
///   not ordered `0 < eradication < persistence`).
/// - [`Error::NumericalFailure`] when the infected load leaves the finite
///   range.
pub fn classify_asymptotics<S, F, I>(
    step: F,
    infected: I,
    initial: S,
    options: &ClassifyOptions,
) -> Result<Classification>
where
    F: Fn(&S) -> S,
    I: Fn(&S) -> f64,
{
    if options.horizon == 0 {
        return Err(Error::InvalidParameter {
            name: "horizon".into(),
            value: 0.0,
            requirement: "at least one step",
        });
    }
    if !(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_fraction".into(),
            value: options.tail_fraction,
            requirement: "inside (0, 1]",
        });
    }
    if !(options.eradication_threshold > 0.0
        && options.persistence_floor > options.eradication_threshold)
    {
        return Err(Error::InvalidParameter {
            name: "persistence_floor".into(),
            value: options.persistence_floor,
            requirement: "0 < eradication_threshold < persistence_floor",
        });
    }
    let tail_start = (options.horizon as f64 * (1.0 - options.tail_fraction)).ceil() as usize;
    let mut state = initial;
    let mut tail_min = f64::INFINITY;
    let mut load = infected(&state);
    for t in 1..=options.horizon {
        state = step(&state);
        load = infected(&state);
        if !load.is_finite() {
            return Err(Error::NumericalFailure {
                context: "trajectory classification",
                detail: format!("infected load became non-finite at step {t}"),
            });
        }
        if t >= tail_start {
            tail_min = tail_min.min(load);
        }
    }
    let verdict = if load < options.eradication_threshold {
        Verdict::Eradication
    } else if tail_min > options.persistence_floor {
        Verdict::Persistence
    } else {
        Verdict::Undetermined
    };
    Ok(Classification {
        verdict,
        final_infected: load,
        tail_min,
        horizon: options.horizon,
    })
}

/// Exposed-stage parameters shared by both patches of the two-patch analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedStageParams {
    /// Exposed survival.
    pub sigma_e: f64,
    /// E -> I transition fraction.
    pub gamma_e: f64,
    /// Standard-incidence contact rate.
    pub beta: f64,
}

/// Patch-specific infectious-stage parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfectiousStageParams {
    /// Infectious survival.
    pub sigma_i: f64,
    /// I -> R transition fraction.
    pub gamma_i: f64,
}

fn check_fraction(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: name.into(),
            value,
            requirement: "strictly inside (0, 1)",
        })
    }
}

impl SharedStageParams {
    fn validate(&self) -> Result<()> {
        check_fraction("sigma_e", self.sigma_e)?;
        check_fraction("gamma_e", self.gamma_e)?;
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta".into(),
                value: self.beta,
                requirement: "0 < beta <= 1 for standard incidence",
            });
        }
        Ok(())
    }
}

impl InfectiousStageParams {
    fn validate(&self) -> Result<()> {
        check_fraction("sigma_i", self.sigma_i)?;
        check_fraction("gamma_i", self.gamma_i)
    }

    /// Infectious-stage removal denominator `1 - sigma_i (1 - gamma_i)`.
    #[must_use]
    pub fn removal(&self) -> f64 {
        1.0 - self.sigma_i * (1.0 - self.gamma_i)
    }
}

/// Exposed-stage factor `A = sigma_e gamma_e beta / (1 - sigma_e (1 - gamma_e))`
/// of the two-patch reproduction number.
///
/// # Errors
///
/// Invalid shared parameters.
pub fn exposed_stage_factor(shared: &SharedStageParams) -> Result<f64> {
    shared.validate()?;
    Ok(shared.sigma_e * shared.gamma_e * shared.beta
        / (1.0 - shared.sigma_e * (1.0 - shared.gamma_e)))
}

/// Infectious-stage ratio
/// `g(x, y) = (sigma_1 x + sigma_2 (1 - x)) / (D_1 y + D_2 (1 - y))` where
/// `D_j = 1 - sigma_j (1 - gamma_j)`, `x` is the exposed-profile share of
/// patch 1 and `y` the infectious-profile share.
///
/// The aggregated reproduction number of the two-patch system is
/// `A * g(x, y)`.
///
/// # Errors
///
/// Invalid patch parameters, or shares outside `[0, 1]`.
pub fn infectious_stage_ratio(
    patch1: &InfectiousStageParams,
    patch2: &InfectiousStageParams,
    x: f64,
    y: f64,
) -> Result<f64> {
    patch1.validate()?;
    patch2.validate()?;
    for (name, value) in [("x", x), ("y", y)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfDomain {
                name,
                value,
                domain: "[0, 1] (stationary profile share)",
            });
        }
    }
    Ok(ratio_raw(patch1, patch2, x, y))
}

fn ratio_raw(
    patch1: &InfectiousStageParams,
    patch2: &InfectiousStageParams,
    x: f64,
    y: f64,
) -> f64 {
    (patch1.sigma_i * x + patch2.sigma_i * (1.0 - x))
        / (patch1.removal() * y + patch2.removal() * (1.0 - y))
}

/// Where the eradication region sits relative to the critical line, when both
/// isolated reproduction numbers exceed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    /// No profile pair achieves eradication.
    None,
    /// Eradication is reachable in the corner with the exposed profile
    /// concentrated in patch 1 and the infectious profile in patch 2.
    UnderLine,
    /// Eradication is reachable in the opposite corner.
    OverLine,
}

/// Feasibility analysis of movement-driven eradication for two patches that
/// each sustain the epidemic in isolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// Which corner of the profile square (if any) achieves eradication, in
    /// the caller's patch labelling.
    pub verdict: Feasibility,
    /// Whether the analysis internally swapped the patches so that the first
    /// one has the larger isolated reproduction number.
    pub relabeled: bool,
    /// Isolated reproduction numbers `(patch 1, patch 2)` in the caller's
    /// labelling.
    pub r0: (f64, f64),
    /// Exposed-stage factor `A`.
    pub factor_a: f64,
    /// Critical value `1 / A` that `g` must undercut.
    pub threshold: f64,
    /// `g(1, 0)` in the caller's labelling.
    pub corner_under: f64,
    /// `g(0, 1)` in the caller's labelling.
    pub corner_over: f64,
}

/// Decides whether concentrating the exposed and infectious profiles in
/// opposite patches can push the aggregated reproduction number below one.
///
/// At most one of the two opposite corners can work: if both undercut the
/// threshold their product forces `R0_1 R0_2 < 1`, contradicting the
/// precondition that both exceed one.
///
/// # Errors
///
/// - Invalid parameters.
/// - [`Error::Precondition`] unless both isolated reproduction numbers exceed
///   one — otherwise local eradication needs no movement at all.
pub fn eradication_feasibility(
    shared: &SharedStageParams,
    patch1: &InfectiousStageParams,
    patch2: &InfectiousStageParams,
) -> Result<FeasibilityReport> {
    let a = exposed_stage_factor(shared)?;
    patch1.validate()?;
    patch2.validate()?;
    let r0_1 = a * patch1.sigma_i / patch1.removal();
    let r0_2 = a * patch2.sigma_i / patch2.removal();
    if r0_1.min(r0_2) <= 1.0 {
        return Err(Error::Precondition(format!(
            "both isolated reproduction numbers must exceed one (got {r0_1} and {r0_2}); \
             otherwise eradication needs no movement"
        )));
    }
    // Work with the stronger patch first; swapping labels reflects the profile
    // square through (1/2, 1/2) and exchanges the two corners.
    let relabeled = r0_2 > r0_1;
    let (hi, lo) = if relabeled {
        (patch2, patch1)
    } else {
        (patch1, patch2)
    };
    let corner_under_internal = ratio_raw(hi, lo, 1.0, 0.0);
    let corner_over_internal = ratio_raw(hi, lo, 0.0, 1.0);
    let threshold = 1.0 / a;
    let verdict_internal = if corner_under_internal < threshold {
        Feasibility::UnderLine
    } else if corner_over_internal < threshold {
        Feasibility::OverLine
    } else {
        Feasibility::None
    };
    let verdict = match (verdict_internal, relabeled) {
        (Feasibility::UnderLine, true) => Feasibility::OverLine,
        (Feasibility::OverLine, true) => Feasibility::UnderLine,
        (v, _) => v,
    };
    let (corner_under, corner_over) = if relabeled {
        (corner_over_internal, corner_under_internal)
    } else {
        (corner_under_internal, corner_over_internal)
    };
    Ok(FeasibilityReport {
        verdict,
        relabeled,
        r0: (r0_1, r0_2),
        factor_a: a,
        threshold,
        corner_under,
        corner_over,
    })
}

/// Controls for [`region_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionOptions {
    /// Grid points per axis.
    pub resolution: usize,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self { resolution: 201 }
    }
}

/// One grid node of a region sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    /// Exposed-profile share of patch 1.
    pub x: f64,
    /// Infectious-profile share of patch 1.
    pub y: f64,
    /// Aggregated reproduction number `A g(x, y)`.
    pub reproduction_number: f64,
    /// Whether this node lies in the eradication region.
    pub eradication: bool,
}

/// Result of sweeping the profile square.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    /// Grid points per axis.
    pub resolution: usize,
    /// All grid nodes, `x` outer and `y` inner, both ascending.
    pub samples: Vec<GridSample>,
    /// Number of nodes in the eradication region.
    pub eradication_count: usize,
    /// Points on the critical curve `A g = 1`, refined by bisection along
    /// sign-changing grid edges and sorted lexicographically.
    pub boundary: Vec<(f64, f64)>,
    /// Corner feasibility analysis of the same configuration.
    pub feasibility: FeasibilityReport,
}

/// Sweeps the profile square on a uniform grid, marking the eradication
/// region and tracing its boundary.
///
/// Boundary points are refined along every grid edge whose endpoints straddle
/// the critical value; eighty bisection halvings pin each crossing to machine
/// precision, far inside [`tolerances::REGION_BOUNDARY`].
///
/// # Errors
///
/// - Invalid parameters or a resolution below two.
/// - Propagates the [`eradication_feasibility`] precondition: the sweep is
///   meaningful only when both patches sustain the epidemic alone.
pub fn region_sweep(
    shared: &SharedStageParams,
    patch1: &InfectiousStageParams,
    patch2: &InfectiousStageParams,
    options: &RegionOptions,
) -> Result<RegionReport> {
    if options.resolution < 2 {
        return Err(Error::InvalidParameter {
            name: "resolution".into(),
            value: options.resolution as f64,
            requirement: "at least two grid points per axis",
        });
    }
    let feasibility = eradication_feasibility(shared, patch1, patch2)?;
    let a = feasibility.factor_a;
    let res = options.resolution;
    let coord = |i: usize| i as f64 / (res - 1) as f64;
    let rbar = |x: f64, y: f64| a * ratio_raw(patch1, patch2, x, y);

    let mut samples = Vec::with_capacity(res * res);
    let mut eradication_count = 0;
    for i in 0..res {
        let x = coord(i);
        for j in 0..res {
            let y = coord(j);
            let reproduction_number = rbar(x, y);
            let eradication = reproduction_number < 1.0;
            eradication_count += usize::from(eradication);
            samples.push(GridSample {
                x,
                y,
                reproduction_number,
                eradication,
            });
        }
    }

    let excess = |i: usize, j: usize| samples[i * res + j].reproduction_number - 1.0;
    let mut boundary = Vec::new();
    for i in 0..res {
        for j in 0..res {
            let f0 = excess(i, j);
            if i + 1 < res && ((f0 > 0.0) != (excess(i + 1, j) > 0.0)) {
                boundary.push(bisect_edge(
                    &rbar,
                    (coord(i), coord(j)),
                    (coord(i + 1), coord(j)),
                ));
            }
            if j + 1 < res && ((f0 > 0.0) != (excess(i, j + 1) > 0.0)) {
                boundary.push(bisect_edge(
                    &rbar,
                    (coord(i), coord(j)),
                    (coord(i), coord(j + 1)),
                ));
            }
        }
    }
    boundary.sort_by(|a, b| a.partial_cmp(b).expect("boundary points are finite"));

    Ok(RegionReport {
        resolution: res,
        samples,
        eradication_count,
        boundary,
        feasibility,
    })
}

/// Bisects the crossing of `rbar = 1` along a grid edge to machine precision.
fn bisect_edge(
    rbar: &impl Fn(f64, f64) -> f64,
    mut p: (f64, f64),
    mut q: (f64, f64),
) -> (f64, f64) {
    let mut fp = rbar(p.0, p.1) - 1.0;
    for _ in 0..80 {
        let mid = (0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1));
        let fm = rbar(mid.0, mid.1) - 1.0;
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fp > 0.0) {
            p = mid;
            fp = fm;
        } else {
            q = mid;
        }
    }
    (0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1))
}
