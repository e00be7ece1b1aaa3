//! Single-patch discrete-time SEIRS building blocks.
//!
//! One unit of time advances in two stages: a mass-preserving disease stage
//! ([`disease_map`]) that moves individuals through S -> E -> I -> R -> S, and a
//! demography stage ([`demography_map`]) that applies per-compartment survival
//! and recruits new susceptibles. [`seirs_step`] composes the two, demography
//! after disease.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerances;

/// Incidence response: the fraction of susceptibles that becomes exposed in one
/// step, as a function of the infectious fraction `x = I/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransmissionSpec {
    /// Frequency-dependent response `beta * x`, `beta` in `(0, 1]`.
    Standard {
        /// Effective contact rate per step.
        beta: f64,
    },
    /// Poisson-contact response `1 - exp(-beta * x)`, `beta > 0`.
    Poisson {
        /// Contact intensity per step.
        beta: f64,
    },
}

impl TransmissionSpec {
    /// Standard (frequency-dependent) incidence with contact rate `beta`.
    ///
    /// # Errors
    ///
    /// Rejects `beta` outside `(0, 1]`: the response must stay a fraction.
    pub fn standard(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta".into(),
                value: beta,
                requirement: "0 < beta <= 1 for standard incidence",
            });
        }
        Ok(Self::Standard { beta })
    }

    /// Poisson-contact incidence with intensity `beta`.
    ///
    /// # Errors
    ///
    /// Rejects `beta` that is not a positive finite number.
    pub fn poisson(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beta".into(),
                value: beta,
                requirement: "beta > 0 for Poisson incidence",
            });
        }
        Ok(Self::Poisson { beta })
    }

    /// Infection probability at infectious fraction `x`.
    ///
    /// # Errors
    ///
    /// `x` must lie in `[0, 1]`; fractions outside that interval (or NaN) are a
    /// domain error.
    pub fn infection_probability(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain {
                name: "x",
                value: x,
                domain: "[0, 1] (infectious fraction)",
            });
        }
        Ok(self.infection_probability_raw(x))
    }

    /// Unchecked evaluation used by the step maps, whose inputs are fractions by
    /// construction.
    #[must_use]
    pub(crate) fn infection_probability_raw(&self, x: f64) -> f64 {
        match *self {
            Self::Standard { beta } => beta * x,
            Self::Poisson { beta } => 1.0 - (-beta * x).exp(),
        }
    }

    /// Slope of the response at the origin; equals `beta` for both families.
    #[must_use]
    pub fn slope_at_zero(&self) -> f64 {
        match *self {
            Self::Standard { beta } | Self::Poisson { beta } => beta,
        }
    }

    /// Both supported families are concave on `[0, 1]`.
    #[must_use]
    pub fn is_concave(&self) -> bool {
        true
    }
}

/// Recruitment of new susceptibles per step, as a function of current density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecruitmentSpec {
    /// Density-independent inflow `b`.
    Constant {
        /// Recruits per step.
        b: f64,
    },
    /// Beverton-Holt saturating recruitment `r n / (1 + n / k)`.
    BevertonHolt {
        /// Per-capita recruitment at low density.
        r: f64,
        /// Half-saturation density.
        k: f64,
    },
    /// Ricker overcompensating recruitment `r n exp(-n / k)`.
    Ricker {
        /// Per-capita recruitment at low density.
        r: f64,
        /// Density-scale parameter.
        k: f64,
    },
    /// Unbounded geometric recruitment `r n`.
    Geometric {
        /// Per-capita recruitment.
        r: f64,
    },
}

impl RecruitmentSpec {
    /// Constant recruitment of `b > 0` susceptibles per step.
    ///
    /// # Errors
    ///
    /// Rejects non-positive or non-finite `b`.
    pub fn constant(b: f64) -> Result<Self> {
        Self::check_positive("b", b)?;
        Ok(Self::Constant { b })
    }

    /// Beverton-Holt recruitment with parameters `r, k > 0`.
    ///
    /// # Errors
    ///
    /// Rejects non-positive or non-finite parameters.
    pub fn beverton_holt(r: f64, k: f64) -> Result<Self> {
        Self::check_positive("r", r)?;
        Self::check_positive("k", k)?;
        Ok(Self::BevertonHolt { r, k })
    }

    /// Ricker recruitment with parameters `r, k > 0`.
    ///
    /// # Errors
    ///
    /// Rejects non-positive or non-finite parameters.
    pub fn ricker(r: f64, k: f64) -> Result<Self> {
        Self::check_positive("r", r)?;
        Self::check_positive("k", k)?;
        Ok(Self::Ricker { r, k })
    }

    /// Geometric recruitment with per-capita rate `r > 0`.
    ///
    /// # Errors
    ///
    /// Rejects non-positive or non-finite `r`.
    pub fn geometric(r: f64) -> Result<Self> {
        Self::check_positive("r", r)?;
        Ok(Self::Geometric { r })
    }

    fn check_positive(name: &str, value: f64) -> Result<()> {
        if value > 0.0 && value.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: name.into(),
                value,
                requirement: "a positive finite number",
            })
        }
    }

    /// Number of recruits at total density `n`.
    ///
    /// # Errors
    ///
    /// Negative (or NaN) densities are a domain error.
    pub fn recruits(&self, n: f64) -> Result<f64> {
        if n.is_nan() || n < 0.0 {
            return Err(Error::OutOfDomain {
                name: "n",
                value: n,
                domain: "[0, inf) (total density)",
            });
        }
        Ok(self.recruits_raw(n))
    }

    /// Unchecked evaluation used by the step maps, whose inputs are nonnegative
    /// by construction.
    #[must_use]
    pub(crate) fn recruits_raw(&self, n: f64) -> f64 {
        match *self {
            Self::Constant { b } => b,
            Self::BevertonHolt { r, k } => r * n / (1.0 + n / k),
            Self::Ricker { r, k } => r * n * (-n / k).exp(),
            Self::Geometric { r } => r * n,
        }
    }

    /// Derivative of the recruitment function at density `n` (used for the
    /// stability multiplier of the disease-free equilibrium).
    #[must_use]
    pub(crate) fn derivative(&self, n: f64) -> f64 {
        match *self {
            Self::Constant { .. } => 0.0,
            Self::BevertonHolt { r, k } => {
                let d = 1.0 + n / k;
                r / (d * d)
            }
            Self::Ricker { r, k } => r * (-n / k).exp() * (1.0 - n / k),
            Self::Geometric { r } => r,
        }
    }

    /// Whether recruitment is bounded above over all densities.
    #[must_use]
    pub fn is_bounded(&self) -> bool {
        !matches!(self, Self::Geometric { .. })
    }

    /// Supremum of recruitment over all densities; `None` for the unbounded
    /// geometric family.
    #[must_use]
    pub fn upper_bound(&self) -> Option<f64> {
        match *self {
            Self::Constant { b } => Some(b),
            Self::BevertonHolt { r, k } => Some(r * k),
            Self::Ricker { r, k } => Some(r * k / std::f64::consts::E),
            Self::Geometric { .. } => None,
        }
    }
}

/// Per-compartment one-step survival fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalFractions {
    /// Susceptible survival.
    pub s: f64,
    /// Exposed survival.
    pub e: f64,
    /// Infectious survival.
    pub i: f64,
    /// Recovered survival.
    pub r: f64,
}

/// One-step transition fractions between consecutive compartments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionFractions {
    /// Fraction of exposed becoming infectious (E -> I).
    pub e: f64,
    /// Fraction of infectious recovering (I -> R).
    pub i: f64,
    /// Fraction of recovered losing immunity (R -> S).
    pub r: f64,
}

/// Complete parameter set for one patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicParams {
    sigma: SurvivalFractions,
    gamma: TransitionFractions,
    transmission: TransmissionSpec,
    recruitment: RecruitmentSpec,
}

impl EpidemicParams {
    /// Validates and assembles a parameter set. All survival and transition
    /// fractions must lie strictly inside `(0, 1)`.
    ///
    /// # Errors
    ///
    /// Returns the first fraction found on or outside the open unit interval.
    pub fn new(
        sigma: SurvivalFractions,
        gamma: TransitionFractions,
        transmission: TransmissionSpec,
        recruitment: RecruitmentSpec,
    ) -> Result<Self> {
        for (name, value) in [
            ("sigma_s", sigma.s),
            ("sigma_e", sigma.e),
            ("sigma_i", sigma.i),
            ("sigma_r", sigma.r),
            ("gamma_e", gamma.e),
            ("gamma_i", gamma.i),
            ("gamma_r", gamma.r),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    value,
                    requirement: "strictly inside (0, 1)",
                });
            }
        }
        Ok(Self {
            sigma,
            gamma,
            transmission,
            recruitment,
        })
    }

    /// Survival fractions.
    #[must_use]
    pub fn sigma(&self) -> SurvivalFractions {
        self.sigma
    }

    /// Transition fractions.
    #[must_use]
    pub fn gamma(&self) -> TransitionFractions {
        self.gamma
    }

    /// Incidence response.
    #[must_use]
    pub fn transmission(&self) -> TransmissionSpec {
        self.transmission
    }

    /// Recruitment function.
    #[must_use]
    pub fn recruitment(&self) -> RecruitmentSpec {
        self.recruitment
    }
}

/// Nonnegative S/E/I/R abundances of one patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalState {
    s: f64,
    e: f64,
    i: f64,
    r: f64,
}

impl LocalState {
    /// Validates a state: every component finite and nonnegative.
    ///
    /// # Errors
    ///
    /// Returns the first offending component.
    pub fn new(s: f64, e: f64, i: f64, r: f64) -> Result<Self> {
        for (name, value) in [("s", s), ("e", e), ("i", i), ("r", r)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    value,
                    requirement: "a nonnegative finite abundance",
                });
            }
        }
        Ok(Self { s, e, i, r })
    }

    /// Constructor for internally computed states. Dynamics keep these
    /// nonnegative; numerical probes (finite-difference derivatives) may pass
    /// points slightly outside the cone, which the step maps tolerate.
    #[must_use]
    pub(crate) fn new_unchecked(s: f64, e: f64, i: f64, r: f64) -> Self {
        Self { s, e, i, r }
    }

    /// Susceptible abundance.
    #[must_use]
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Exposed abundance.
    #[must_use]
    pub fn e(&self) -> f64 {
        self.e
    }

    /// Infectious abundance.
    #[must_use]
    pub fn i(&self) -> f64 {
        self.i
    }

    /// Recovered abundance.
    #[must_use]
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Total density `N = S + E + I + R`.
    #[must_use]
    pub fn total(&self) -> f64 {
        self.s + self.e + self.i + self.r
    }

    /// Infected mass `E + I`.
    #[must_use]
    pub fn infected(&self) -> f64 {
        self.e + self.i
    }

    /// Components in S, E, I, R order.
    #[must_use]
    pub fn as_array(&self) -> [f64; 4] {
        [self.s, self.e, self.i, self.r]
    }
}

/// Mass-preserving disease transitions for one step.
///
/// New exposures are `phi(I/N) * S`; fractions `gamma` of E, I, R advance to
/// I, R, S respectively. An empty patch produces no incidence.
#[must_use]
pub fn disease_map(params: &EpidemicParams, x: &LocalState) -> LocalState {
    let n = x.total();
    let incidence = if n > 0.0 {
        params.transmission.infection_probability_raw(x.i / n) * x.s
    } else {
        0.0
    };
    let gamma = params.gamma;
    let to_i = gamma.e * x.e;
    let to_r = gamma.i * x.i;
    let to_s = gamma.r * x.r;
    LocalState::new_unchecked(
        x.s - incidence + to_s,
        x.e + incidence - to_i,
        x.i + to_i - to_r,
        x.r + to_r - to_s,
    )
}

/// Demography for one step: per-compartment survival plus recruitment of new
/// susceptibles at the current total density.
#[must_use]
pub fn demography_map(params: &EpidemicParams, x: &LocalState) -> LocalState {
    let recruits = params.recruitment.recruits_raw(x.total());
    let sigma = params.sigma;
    LocalState::new_unchecked(
        recruits + sigma.s * x.s,
        sigma.e * x.e,
        sigma.i * x.i,
        sigma.r * x.r,
    )
}

/// One full local step: demography applied to the disease-stage output.
#[must_use]
pub fn seirs_step(params: &EpidemicParams, x: &LocalState) -> LocalState {
    demography_map(params, &disease_map(params, x))
}

/// Disease-free equilibrium of the susceptible recursion `S' = B(S) + sigma_S S`,
/// together with its one-step stability multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemographicEquilibrium {
    /// The equilibrium state (susceptibles only).
    pub state: LocalState,
    /// Multiplier `sigma_S + B'(S*)` of the linearised recursion.
    pub multiplier: f64,
    /// Whether the equilibrium attracts (`|multiplier| < 1`).
    pub attracting: bool,
}

/// Locates the positive disease-free equilibrium and checks its stability.
///
/// Constant recruitment has the closed form `S* = B / (1 - sigma_S)`; the
/// bounded density-dependent families are solved by bisection on
/// `(1 - sigma_S) S - B(S)` over `(0, 2 B_max / (1 - sigma_S)]`. Stability is
/// checked, not assumed: the multiplier is reported, and a multiplier within
/// [`tolerances::NONHYPERBOLIC_BAND`] of the unit circle is an error because no
/// stability conclusion can be drawn there.
///
/// # Errors
///
/// - Unbounded (geometric) recruitment is unsupported: no positive equilibrium
///   exists.
/// - No sign change over the bracket means no positive equilibrium.
/// - A non-hyperbolic root (multiplier on the unit circle within tolerance).
pub fn disease_free_equilibrium(params: &EpidemicParams) -> Result<DemographicEquilibrium> {
    let sigma_s = params.sigma.s;
    let recruitment = params.recruitment;
    let s_star = match recruitment {
        RecruitmentSpec::Constant { b } => b / (1.0 - sigma_s),
        RecruitmentSpec::Geometric { .. } => {
            return Err(Error::Unsupported(
                "disease-free equilibrium requires bounded or constant recruitment; \
                 geometric recruitment admits no positive equilibrium"
                    .into(),
            ))
        }
        _ => {
            let b_max = recruitment
                .upper_bound()
                .expect("bounded recruitment has an upper bound");
            let hi = 2.0 * b_max / (1.0 - sigma_s);
            let f = |s: f64| (1.0 - sigma_s) * s - recruitment.recruits_raw(s);
            let lo = hi * 1e-9;
            if f(lo) >= 0.0 {
                return Err(Error::HypothesisViolation(format!(
                    "no positive disease-free equilibrium: recruitment cannot balance \
                     mortality near the origin (sigma_s = {sigma_s})"
                )));
            }
            bisect_root(f, lo, hi)
        }
    };
    let multiplier = sigma_s + recruitment.derivative(s_star);
    if (multiplier.abs() - 1.0).abs() < tolerances::NONHYPERBOLIC_BAND {
        return Err(Error::HypothesisViolation(format!(
            "disease-free equilibrium at S* = {s_star} is non-hyperbolic \
             (multiplier {multiplier}); stability cannot be decided"
        )));
    }
    Ok(DemographicEquilibrium {
        state: LocalState::new_unchecked(s_star, 0.0, 0.0, 0.0),
        multiplier,
        attracting: multiplier.abs() < 1.0,
    })
}

/// Bisection for a root of `f` on `[lo, hi]` with `f(lo) < 0 < f(hi)`, refined
/// to relative width [`tolerances::DFE_ROOT`].
fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > tolerances::DFE_ROOT * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Basic reproduction number from the closed-form expression
/// `sigma_E sigma_I gamma_E phi'(0) / ((1 - sigma_E (1 - gamma_E)) (1 - sigma_I (1 - gamma_I)))`.
#[must_use]
pub fn r0_closed_form(params: &EpidemicParams) -> f64 {
    let sigma = params.sigma;
    let gamma = params.gamma;
    let slope = params.transmission.slope_at_zero();
    sigma.e * sigma.i * gamma.e * slope
        / ((1.0 - sigma.e * (1.0 - gamma.e)) * (1.0 - sigma.i * (1.0 - gamma.i)))
}

/// Basic reproduction number as the spectral radius of the next-generation
/// matrix `F (Id - T)^{-1}`, built from the linearisation of the infected
/// subsystem at the disease-free equilibrium.
///
/// Serves as an independent cross-check of [`r0_closed_form`]; the two agree to
/// [`tolerances::R0_CROSS_CHECK`].
#[must_use]
pub fn r0_next_generation(params: &EpidemicParams) -> f64 {
    let sigma = params.sigma;
    let gamma = params.gamma;
    let slope = params.transmission.slope_at_zero();
    // F: new exposures created per infected state; T: transfers among E, I.
    let f = DMatrix::from_row_slice(2, 2, &[0.0, sigma.e * slope, 0.0, 0.0]);
    let t = DMatrix::from_row_slice(
        2,
        2,
        &[
            sigma.e * (1.0 - gamma.e),
            0.0,
            sigma.i * gamma.e,
            sigma.i * (1.0 - gamma.i),
        ],
    );
    let resolvent = (DMatrix::identity(2, 2) - t)
        .try_inverse()
        .expect("Id - T is invertible: T is triangular with diagonal strictly below 1");
    linalg::spectral_radius_2x2(&(f * resolvent))
}

/// Closed-form solution `x(t) = (x0 - b/(1-a)) a^t + b/(1-a)` of the scalar
/// recurrence `x(t+1) = a x(t) + b`.
///
/// Serves as the envelope oracle for population bounds: total density obeys
/// this recurrence as an inequality with `a` the largest survival fraction and
/// `b` the recruitment bound.
///
/// # Errors
///
/// Requires `0 < a < 1` (contracting regime with a finite limit `b/(1-a)`).
pub fn linear_recurrence_solution(a: f64, b: f64, x0: f64, t: u32) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::OutOfDomain {
            name: "a",
            value: a,
            domain: "(0, 1)",
        });
    }
    let limit = b / (1.0 - a);
    Ok((x0 - limit) * a.powi(t as i32) + limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Parameter set used by the worked examples.
    fn example_params() -> EpidemicParams {
        EpidemicParams::new(
            SurvivalFractions {
                s: 0.9,
                e: 0.9,
                i: 0.8,
                r: 0.95,
            },
            TransitionFractions {
                e: 0.5,
                i: 0.25,
                r: 0.1,
            },
            TransmissionSpec::standard(0.5).unwrap(),
            RecruitmentSpec::constant(10.0).unwrap(),
        )
        .unwrap()
    }

    fn assert_state_eq(x: &LocalState, expected: [f64; 4], tol: f64) {
        for (got, want) in x.as_array().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = tol);
        }
    }

    #[test]
    fn standard_transmission_evaluates_linearly() {
        let phi = TransmissionSpec::standard(0.5).unwrap();
        assert_abs_diff_eq!(
            phi.infection_probability(0.03).unwrap(),
            0.015,
            epsilon = 1e-15
        );
        assert_eq!(phi.infection_probability(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(phi.slope_at_zero(), 0.5);
        assert!(phi.is_concave());
    }

    #[test]
    fn poisson_transmission_matches_series_expansion() {
        let phi = TransmissionSpec::poisson(1.0).unwrap();
        // Independent oracle: exp(-1) summed as a series until terms vanish.
        let mut term = 1.0_f64;
        let mut exp_neg_one = 1.0_f64;
        for k in 1..40 {
            term *= -1.0 / f64::from(k);
            exp_neg_one += term;
        }
        assert_abs_diff_eq!(
            phi.infection_probability(1.0).unwrap(),
            1.0 - exp_neg_one,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(phi.slope_at_zero(), 1.0);
    }

    #[test]
    fn transmission_maps_unit_interval_into_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let phi = if rng.gen_bool(0.5) {
                TransmissionSpec::standard(rng.gen_range(0.01..=1.0)).unwrap()
            } else {
                TransmissionSpec::poisson(rng.gen_range(0.01..10.0)).unwrap()
            };
            let x = rng.gen_range(0.0..=1.0);
            let p = phi.infection_probability(x).unwrap();
            assert!((0.0..=1.0).contains(&p), "phi({x}) = {p} escaped [0,1]");
        }
    }

    #[test]
    fn transmission_rejects_out_of_range_arguments() {
        let phi = TransmissionSpec::standard(0.5).unwrap();
        assert!(phi.infection_probability(-0.1).is_err());
        assert!(phi.infection_probability(1.1).is_err());
        assert!(phi.infection_probability(f64::NAN).is_err());
    }

    #[test]
    fn transmission_rejects_bad_rates() {
        assert!(TransmissionSpec::standard(0.0).is_err());
        assert!(TransmissionSpec::standard(1.0).is_ok());
        assert!(TransmissionSpec::standard(1.0 + 1e-12).is_err());
        assert!(TransmissionSpec::standard(f64::NAN).is_err());
        assert!(TransmissionSpec::poisson(0.0).is_err());
        assert!(TransmissionSpec::poisson(3.0).is_ok());
        assert!(TransmissionSpec::poisson(f64::INFINITY).is_err());
    }

    #[test]
    fn recruitment_families_evaluate_and_bound() {
        let c = RecruitmentSpec::constant(10.0).unwrap();
        assert_eq!(c.recruits(123.0).unwrap(), 10.0);
        assert_eq!(c.upper_bound(), Some(10.0));

        let bh = RecruitmentSpec::beverton_holt(2.0, 100.0).unwrap();
        assert_abs_diff_eq!(bh.recruits(100.0).unwrap(), 100.0, epsilon = 1e-12);
        assert_eq!(bh.upper_bound(), Some(200.0));

        let ricker = RecruitmentSpec::ricker(2.0, 100.0).unwrap();
        assert_abs_diff_eq!(
            ricker.recruits(100.0).unwrap(),
            200.0 / std::f64::consts::E,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            ricker.upper_bound().unwrap(),
            200.0 / std::f64::consts::E,
            epsilon = 1e-12
        );

        let geo = RecruitmentSpec::geometric(1.5).unwrap();
        assert_eq!(geo.recruits(10.0).unwrap(), 15.0);
        assert!(!geo.is_bounded());
        assert_eq!(geo.upper_bound(), None);
    }

    #[test]
    fn recruitment_rejects_bad_inputs() {
        assert!(RecruitmentSpec::constant(0.0).is_err());
        assert!(RecruitmentSpec::constant(-1.0).is_err());
        assert!(RecruitmentSpec::beverton_holt(2.0, 0.0).is_err());
        assert!(RecruitmentSpec::ricker(f64::NAN, 1.0).is_err());
        let c = RecruitmentSpec::constant(10.0).unwrap();
        assert!(c.recruits(-1.0).is_err());
        assert!(c.recruits(f64::NAN).is_err());
    }

    #[test]
    fn params_reject_boundary_fractions() {
        let sigma = SurvivalFractions {
            s: 0.9,
            e: 0.9,
            i: 0.8,
            r: 0.95,
        };
        let gamma = TransitionFractions {
            e: 0.5,
            i: 0.25,
            r: 0.1,
        };
        let phi = TransmissionSpec::standard(0.5).unwrap();
        let rec = RecruitmentSpec::constant(10.0).unwrap();
        assert!(EpidemicParams::new(sigma, gamma, phi, rec).is_ok());
        let mut bad = sigma;
        bad.s = 1.0;
        assert!(EpidemicParams::new(bad, gamma, phi, rec).is_err());
        let mut bad_gamma = gamma;
        bad_gamma.e = 0.0;
        assert!(EpidemicParams::new(sigma, bad_gamma, phi, rec).is_err());
    }

    #[test]
    fn local_state_rejects_negative_or_non_finite_components() {
        assert!(LocalState::new(1.0, 0.0, 0.0, 0.0).is_ok());
        assert!(LocalState::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(LocalState::new(1.0, f64::NAN, 0.0, 0.0).is_err());
        assert!(LocalState::new(1.0, 0.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn disease_map_matches_worked_example() {
        let x = LocalState::new(90.0, 5.0, 3.0, 2.0).unwrap();
        let next = disease_map(&example_params(), &x);
        assert_state_eq(&next, [88.85, 3.85, 4.75, 2.55], 1e-12);
    }

    #[test]
    fn disease_map_preserves_mass() {
        let params = example_params();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let x = LocalState::new(
                rng.gen_range(0.0..500.0),
                rng.gen_range(0.0..100.0),
                rng.gen_range(0.0..100.0),
                rng.gen_range(0.0..100.0),
            )
            .unwrap();
            let next = disease_map(&params, &x);
            let rel = (next.total() - x.total()).abs() / x.total().max(1.0);
            assert!(rel < 1e-12, "mass drifted by relative {rel}");
        }
    }

    #[test]
    fn disease_map_leaves_empty_patch_empty() {
        let zero = LocalState::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let next = disease_map(&example_params(), &zero);
        assert_eq!(next.as_array(), [0.0; 4]);
    }

    #[test]
    fn demography_map_matches_worked_example() {
        let x = LocalState::new(90.0, 5.0, 3.0, 2.0).unwrap();
        let next = demography_map(&example_params(), &x);
        assert_state_eq(&next, [91.0, 4.5, 2.4, 1.9], 1e-12);
    }

    #[test]
    fn seirs_step_matches_worked_example() {
        let x = LocalState::new(90.0, 5.0, 3.0, 2.0).unwrap();
        let next = seirs_step(&example_params(), &x);
        assert_state_eq(&next, [89.965, 3.465, 3.8, 2.4225], 1e-12);
    }

    #[test]
    fn seirs_step_keeps_states_nonnegative() {
        let params = example_params();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let mut x = LocalState::new(
                rng.gen_range(0.0..200.0),
                rng.gen_range(0.0..50.0),
                rng.gen_range(0.0..50.0),
                rng.gen_range(0.0..50.0),
            )
            .unwrap();
            for _ in 0..50 {
                x = seirs_step(&params, &x);
                assert!(x.as_array().iter().all(|&v| v >= 0.0 && v.is_finite()));
            }
        }
        // Degenerate starts: everything in a single compartment.
        for x in [
            LocalState::new(100.0, 0.0, 0.0, 0.0).unwrap(),
            LocalState::new(0.0, 100.0, 0.0, 0.0).unwrap(),
            LocalState::new(0.0, 0.0, 100.0, 0.0).unwrap(),
            LocalState::new(0.0, 0.0, 0.0, 100.0).unwrap(),
        ] {
            let next = seirs_step(&params, &x);
            assert!(next.as_array().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn disease_free_equilibrium_constant_uses_closed_form() {
        let eq = disease_free_equilibrium(&example_params()).unwrap();
        assert_abs_diff_eq!(eq.state.s(), 100.0, epsilon = 1e-12);
        assert_eq!(eq.state.infected(), 0.0);
        assert_abs_diff_eq!(eq.multiplier, 0.9, epsilon = 1e-15);
        assert!(eq.attracting);

        let params = EpidemicParams::new(
            SurvivalFractions {
                s: 0.8,
                e: 0.9,
                i: 0.8,
                r: 0.95,
            },
            TransitionFractions {
                e: 0.5,
                i: 0.25,
                r: 0.1,
            },
            TransmissionSpec::standard(0.5).unwrap(),
            RecruitmentSpec::constant(15.0).unwrap(),
        )
        .unwrap();
        let eq = disease_free_equilibrium(&params).unwrap();
        assert_abs_diff_eq!(eq.state.s(), 75.0, epsilon = 1e-12);
    }

    fn params_with_recruitment(sigma_s: f64, recruitment: RecruitmentSpec) -> EpidemicParams {
        EpidemicParams::new(
            SurvivalFractions {
                s: sigma_s,
                e: 0.9,
                i: 0.8,
                r: 0.95,
            },
            TransitionFractions {
                e: 0.5,
                i: 0.25,
                r: 0.1,
            },
            TransmissionSpec::standard(0.5).unwrap(),
            recruitment,
        )
        .unwrap()
    }

    #[test]
    fn disease_free_equilibrium_beverton_holt_is_bracketed() {
        let params =
            params_with_recruitment(0.5, RecruitmentSpec::beverton_holt(2.0, 100.0).unwrap());
        let eq = disease_free_equilibrium(&params).unwrap();
        // Independent algebra: 0.5 = 2 / (1 + S/100) gives S = 300.
        assert_abs_diff_eq!(eq.state.s(), 300.0, epsilon = 1e-8);
        assert_abs_diff_eq!(eq.multiplier, 0.625, epsilon = 1e-9);
        assert!(eq.attracting);
    }

    #[test]
    fn disease_free_equilibrium_ricker_is_bracketed() {
        let params = params_with_recruitment(0.5, RecruitmentSpec::ricker(2.0, 100.0).unwrap());
        let eq = disease_free_equilibrium(&params).unwrap();
        // Independent algebra: S* = K ln(r / (1 - sigma_s)) = 100 ln 4.
        assert_abs_diff_eq!(eq.state.s(), 138.62943611198907, epsilon = 1e-8);
        assert_abs_diff_eq!(eq.multiplier, 0.3068528194400547, epsilon = 1e-9);
        assert!(eq.attracting);
    }

    #[test]
    fn disease_free_equilibrium_reports_repelling_roots() {
        // Strong Ricker overcompensation flips the equilibrium: multiplier < -1.
        let params = params_with_recruitment(0.5, RecruitmentSpec::ricker(40.0, 100.0).unwrap());
        let eq = disease_free_equilibrium(&params).unwrap();
        assert!(eq.multiplier < -1.0);
        assert!(!eq.attracting);
    }

    #[test]
    fn disease_free_equilibrium_rejects_non_hyperbolic_roots() {
        // At r = (1 - s) exp(2 / (1 - s)) the Ricker multiplier sits exactly at -1.
        let params = params_with_recruitment(
            0.5,
            RecruitmentSpec::ricker(27.299075016572118, 100.0).unwrap(),
        );
        let err = disease_free_equilibrium(&params).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolation(_)), "got {err}");
    }

    #[test]
    fn disease_free_equilibrium_rejects_unbounded_recruitment() {
        let params = params_with_recruitment(0.5, RecruitmentSpec::geometric(1.5).unwrap());
        assert!(matches!(
            disease_free_equilibrium(&params).unwrap_err(),
            Error::Unsupported(_)
        ));
    }

    #[test]
    fn disease_free_equilibrium_requires_recruitment_to_beat_mortality() {
        // Beverton-Holt with r < 1 - sigma_s: population dies out, no positive root.
        let params =
            params_with_recruitment(0.5, RecruitmentSpec::beverton_holt(0.4, 100.0).unwrap());
        assert!(matches!(
            disease_free_equilibrium(&params).unwrap_err(),
            Error::HypothesisViolation(_)
        ));
    }

    #[test]
    fn r0_closed_form_matches_worked_example() {
        let params = EpidemicParams::new(
            SurvivalFractions {
                s: 0.9,
                e: 0.9,
                i: 0.8,
                r: 0.95,
            },
            TransitionFractions {
                e: 0.5,
                i: 0.25,
                r: 0.1,
            },
            TransmissionSpec::standard(0.6).unwrap(),
            RecruitmentSpec::constant(10.0).unwrap(),
        )
        .unwrap();
        // 0.9 * 0.8 * 0.5 * 0.6 / (0.55 * 0.4)
        assert_abs_diff_eq!(r0_closed_form(&params), 0.216 / 0.22, epsilon = 1e-15);
        assert_abs_diff_eq!(r0_closed_form(&params), 0.981818181818182, epsilon = 1e-12);
    }

    #[test]
    fn r0_routes_agree_on_random_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let params = EpidemicParams::new(
                SurvivalFractions {
                    s: rng.gen_range(0.05..0.99),
                    e: rng.gen_range(0.05..0.99),
                    i: rng.gen_range(0.05..0.99),
                    r: rng.gen_range(0.05..0.99),
                },
                TransitionFractions {
                    e: rng.gen_range(0.01..0.99),
                    i: rng.gen_range(0.01..0.99),
                    r: rng.gen_range(0.01..0.99),
                },
                if rng.gen_bool(0.5) {
                    TransmissionSpec::standard(rng.gen_range(0.01..=1.0)).unwrap()
                } else {
                    TransmissionSpec::poisson(rng.gen_range(0.01..5.0)).unwrap()
                },
                RecruitmentSpec::constant(10.0).unwrap(),
            )
            .unwrap();
            let closed = r0_closed_form(&params);
            let spectral = r0_next_generation(&params);
            assert!(
                (closed - spectral).abs() < 1e-10,
                "routes disagree: {closed} vs {spectral}"
            );
        }
    }

    #[test]
    fn linear_recurrence_matches_iteration() {
        // Worked example: a = 0.5, b = 1, x0 = 0, t = 3 -> 1.75.
        assert_abs_diff_eq!(
            linear_recurrence_solution(0.5, 1.0, 0.0, 3).unwrap(),
            1.75,
            epsilon = 1e-15
        );
        // Oracle: direct iteration of the recurrence.
        let (a, b, x0) = (0.73, 2.5, 40.0);
        let mut x = x0;
        for t in 0..60 {
            let closed = linear_recurrence_solution(a, b, x0, t).unwrap();
            assert_abs_diff_eq!(closed, x, epsilon = 1e-9);
            x = a * x + b;
        }
        assert!(linear_recurrence_solution(1.0, 1.0, 0.0, 1).is_err());
        assert!(linear_recurrence_solution(0.0, 1.0, 0.0, 1).is_err());
        assert!(linear_recurrence_solution(1.2, 1.0, 0.0, 1).is_err());
    }
}
