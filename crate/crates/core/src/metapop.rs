//! Metapopulation layer: `n` patches coupled by per-compartment movement.
//!
//! Movement acts on a faster time scale than the disease: each unit of disease
//! time contains `k` movement sub-steps. [`MetapopModel::full_step`] composes
//! the slow local map with `k` applications of the movement matrices, and
//! [`MetapopModel::simulate`] iterates that composition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::seirs::{demography_map, disease_map, EpidemicParams, LocalState};
use crate::tolerances;

/// Epidemiological compartment label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Compartment {
    /// Susceptible.
    S,
    /// Exposed (latent).
    E,
    /// Infectious.
    I,
    /// Recovered (immune).
    R,
}

impl Compartment {
    /// All compartments in state-vector order.
    pub const ALL: [Self; 4] = [Self::S, Self::E, Self::I, Self::R];

    fn index(self) -> usize {
        match self {
            Self::S => 0,
            Self::E => 1,
            Self::I => 2,
            Self::R => 3,
        }
    }
}

/// Full state of an `n`-patch system, stored compartment-major: all patch
/// susceptibles first, then exposed, infectious, recovered.
#[derive(Debug, Clone, PartialEq)]
pub struct MetapopState {
    data: DVector<f64>,
    patches: usize,
}

impl MetapopState {
    /// Builds a state from per-patch local states.
    ///
    /// # Errors
    ///
    /// Requires at least one patch.
    pub fn from_locals(locals: &[LocalState]) -> Result<Self> {
        if locals.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "metapopulation state",
                expected: 1,
                found: 0,
            });
        }
        let n = locals.len();
        let mut data = DVector::zeros(4 * n);
        for (j, x) in locals.iter().enumerate() {
            let [s, e, i, r] = x.as_array();
            data[j] = s;
            data[n + j] = e;
            data[2 * n + j] = i;
            data[3 * n + j] = r;
        }
        Ok(Self { data, patches: n })
    }

    /// Builds a state from a compartment-major vector `(S_1..S_n, E_1..E_n, ...)`.
    ///
    /// # Errors
    ///
    /// The length must be a positive multiple of four and every component a
    /// nonnegative finite number.
    pub fn from_vector(data: DVector<f64>) -> Result<Self> {
        if data.is_empty() || !data.len().is_multiple_of(4) {
            return Err(Error::DimensionMismatch {
                context: "metapopulation state vector",
                expected: 4,
                found: data.len(),
            });
        }
        for &v in data.iter() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "state component".into(),
                    value: v,
                    requirement: "a nonnegative finite abundance",
                });
            }
        }
        let patches = data.len() / 4;
        Ok(Self { data, patches })
    }

    pub(crate) fn from_vector_unchecked(data: DVector<f64>, patches: usize) -> Self {
        debug_assert_eq!(data.len(), 4 * patches);
        Self { data, patches }
    }

    /// Number of patches.
    #[must_use]
    pub fn patches(&self) -> usize {
        self.patches
    }

    /// Compartment-major state vector.
    #[must_use]
    pub fn as_vector(&self) -> &DVector<f64> {
        &self.data
    }

    /// Abundance of `compartment` in patch `j` (zero-based).
    #[must_use]
    pub fn component(&self, compartment: Compartment, j: usize) -> f64 {
        self.data[compartment.index() * self.patches + j]
    }

    /// Local state of patch `j`.
    #[must_use]
    pub fn local(&self, j: usize) -> LocalState {
        LocalState::new_unchecked(
            self.component(Compartment::S, j),
            self.component(Compartment::E, j),
            self.component(Compartment::I, j),
            self.component(Compartment::R, j),
        )
    }

    /// Per-compartment slice as a vector (length `n`).
    #[must_use]
    pub fn compartment(&self, compartment: Compartment) -> DVector<f64> {
        let n = self.patches;
        self.data.rows(compartment.index() * n, n).into_owned()
    }

    /// Total population over all patches and compartments.
    #[must_use]
    pub fn total(&self) -> f64 {
        self.data.sum()
    }

    /// Total infected mass `sum_j (E_j + I_j)`.
    #[must_use]
    pub fn infected(&self) -> f64 {
        let n = self.patches;
        self.data.rows(n, 2 * n).sum()
    }
}

/// Sums a metapopulation state into one aggregated four-compartment state.
#[must_use]
pub fn aggregate(state: &MetapopState) -> GlobalState {
    GlobalState {
        s: state.compartment(Compartment::S).sum(),
        e: state.compartment(Compartment::E).sum(),
        i: state.compartment(Compartment::I).sum(),
        r: state.compartment(Compartment::R).sum(),
    }
}

/// Aggregated (whole-system) compartment totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalState {
    /// Total susceptibles.
    pub s: f64,
    /// Total exposed.
    pub e: f64,
    /// Total infectious.
    pub i: f64,
    /// Total recovered.
    pub r: f64,
}

impl GlobalState {
    /// Total population.
    #[must_use]
    pub fn total(&self) -> f64 {
        self.s + self.e + self.i + self.r
    }

    /// Components in S, E, I, R order.
    #[must_use]
    pub fn as_array(&self) -> [f64; 4] {
        [self.s, self.e, self.i, self.r]
    }
}

/// Per-compartment movement matrices, column-stochastic with destinations in
/// rows: entry `(i, j)` is the fraction of compartment mass in patch `j` that
/// moves to patch `i` in one fast sub-step.
#[derive(Debug, Clone, PartialEq)]
pub struct MovementModel {
    matrices: [DMatrix<f64>; 4],
    patches: usize,
}

impl MovementModel {
    /// Validates movement matrices for S, E, I, R in that order.
    ///
    /// Each matrix must be square of the same size, entrywise nonnegative with
    /// columns summing to one (mass conservation), and primitive so that the
    /// fast dynamics mix every pair of patches and converge to a unique
    /// stationary profile.
    ///
    /// # Errors
    ///
    /// Reports the first matrix that has the wrong shape, a negative entry, a
    /// column sum off one by more than [`tolerances::COLUMN_SUM`], or a
    /// reducible/periodic sparsity pattern.
    pub fn new(s: DMatrix<f64>, e: DMatrix<f64>, i: DMatrix<f64>, r: DMatrix<f64>) -> Result<Self> {
        let n = s.nrows();
        if n == 0 {
            return Err(Error::DimensionMismatch {
                context: "movement matrix",
                expected: 1,
                found: 0,
            });
        }
        let matrices = [s, e, i, r];
        for (m, name) in matrices.iter().zip(["S", "E", "I", "R"]) {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    context: "movement matrix",
                    expected: n,
                    found: if m.nrows() != n { m.nrows() } else { m.ncols() },
                });
            }
            for j in 0..n {
                let mut sum = 0.0;
                for i in 0..n {
                    let v = m[(i, j)];
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(Error::InvalidStructure(format!(
                            "movement matrix {name} entry ({i}, {j}) = {v} must be \
                             a nonnegative finite fraction"
                        )));
                    }
                    sum += v;
                }
                if (sum - 1.0).abs() > tolerances::COLUMN_SUM {
                    return Err(Error::InvalidStructure(format!(
                        "movement matrix {name} column {j} sums to {sum}; columns must \
                         sum to 1 (column-stochastic, destinations in rows)"
                    )));
                }
            }
            if !linalg::is_primitive(m) {
                return Err(Error::InvalidStructure(format!(
                    "movement matrix {name} is not primitive: some power with positive \
                     entries everywhere is required for the fast dynamics to mix"
                )));
            }
        }
        Ok(Self {
            matrices,
            patches: n,
        })
    }

    /// Number of patches.
    #[must_use]
    pub fn patches(&self) -> usize {
        self.patches
    }

    /// Movement matrix of one compartment.
    #[must_use]
    pub fn matrix(&self, compartment: Compartment) -> &DMatrix<f64> {
        &self.matrices[compartment.index()]
    }
}

/// An `n`-patch model: per-patch epidemic parameters, movement matrices, and
/// the number `k` of fast movement sub-steps per slow disease step.
#[derive(Debug, Clone)]
pub struct MetapopModel {
    params: Vec<EpidemicParams>,
    movement: MovementModel,
    fast_steps: u32,
}

/// Above this `k`, movement over one slow step is applied through precomputed
/// matrix powers instead of `k` explicit sub-steps. Powers are computed by
/// binary exponentiation on the same floating-point path either way, so the
/// two regimes agree bitwise for `k` up to this bound.
const FAST_ITERATION_CUTOFF: u32 = 8;

impl MetapopModel {
    /// Assembles a model from per-patch parameters and a movement model.
    ///
    /// # Errors
    ///
    /// The number of parameter sets must match the movement dimension, and `k`
    /// must be at least one.
    pub fn new(
        params: Vec<EpidemicParams>,
        movement: MovementModel,
        fast_steps: u32,
    ) -> Result<Self> {
        if params.len() != movement.patches() {
            return Err(Error::DimensionMismatch {
                context: "per-patch parameters",
                expected: movement.patches(),
                found: params.len(),
            });
        }
        if fast_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "fast_steps".into(),
                value: 0.0,
                requirement: "at least one movement sub-step per disease step",
            });
        }
        Ok(Self {
            params,
            movement,
            fast_steps,
        })
    }

    /// The same model with a different movement sub-step count.
    ///
    /// # Errors
    ///
    /// `k` must be at least one.
    pub fn with_fast_steps(&self, fast_steps: u32) -> Result<Self> {
        Self::new(self.params.clone(), self.movement.clone(), fast_steps)
    }

    /// Number of patches.
    #[must_use]
    pub fn patches(&self) -> usize {
        self.movement.patches()
    }

    /// Movement sub-steps per disease step.
    #[must_use]
    pub fn fast_steps(&self) -> u32 {
        self.fast_steps
    }

    /// Per-patch parameters.
    #[must_use]
    pub fn params(&self) -> &[EpidemicParams] {
        &self.params
    }

    /// Movement model.
    #[must_use]
    pub fn movement(&self) -> &MovementModel {
        &self.movement
    }

    fn check_state(&self, state: &MetapopState) -> Result<()> {
        if state.patches() != self.patches() {
            return Err(Error::DimensionMismatch {
                context: "metapopulation state",
                expected: self.patches(),
                found: state.patches(),
            });
        }
        Ok(())
    }

    fn apply_movement(&self, powers: &[DMatrix<f64>; 4], state: &MetapopState) -> MetapopState {
        let n = state.patches();
        let mut data = DVector::zeros(4 * n);
        for c in Compartment::ALL {
            let moved = &powers[c.index()] * state.compartment(c);
            data.rows_mut(c.index() * n, n).copy_from(&moved);
        }
        MetapopState::from_vector_unchecked(data, n)
    }

    /// One fast movement sub-step: each compartment redistributed by its own
    /// matrix, disease frozen.
    ///
    /// # Errors
    ///
    /// The state dimension must match the model.
    pub fn fast_step(&self, state: &MetapopState) -> Result<MetapopState> {
        self.check_state(state)?;
        Ok(self.apply_movement(&self.movement.matrices, state))
    }

    /// `k` consecutive fast sub-steps.
    ///
    /// Small `k` (up to 8) is iterated literally; larger `k` applies the
    /// `k`-th matrix powers, computed by binary exponentiation.
    ///
    /// # Errors
    ///
    /// The state dimension must match the model.
    pub fn fast_iterate(&self, state: &MetapopState, k: u32) -> Result<MetapopState> {
        self.check_state(state)?;
        if k <= FAST_ITERATION_CUTOFF {
            let mut current = state.clone();
            for _ in 0..k {
                current = self.apply_movement(&self.movement.matrices, &current);
            }
            Ok(current)
        } else {
            Ok(self.apply_movement(&self.movement_powers(k), state))
        }
    }

    fn movement_powers(&self, k: u32) -> [DMatrix<f64>; 4] {
        Compartment::ALL.map(|c| linalg::matrix_power(self.movement.matrix(c), k))
    }

    /// The slow disease-and-demography map applied patch by patch, with no
    /// movement.
    ///
    /// # Errors
    ///
    /// The state dimension must match the model.
    pub fn slow_map(&self, state: &MetapopState) -> Result<MetapopState> {
        self.check_state(state)?;
        let locals: Vec<LocalState> = (0..self.patches())
            .map(|j| {
                let x = state.local(j);
                demography_map(&self.params[j], &disease_map(&self.params[j], &x))
            })
            .collect();
        MetapopState::from_locals(&locals)
    }

    /// One unit of slow time: `k` fast movement sub-steps followed by the slow
    /// disease map.
    ///
    /// # Errors
    ///
    /// The state dimension must match the model.
    pub fn full_step(&self, state: &MetapopState) -> Result<MetapopState> {
        let moved = self.fast_iterate(state, self.fast_steps)?;
        self.slow_map(&moved)
    }

    /// Trajectory of `horizon` full steps, returning `horizon + 1` states
    /// starting with the initial one.
    ///
    /// The result is bitwise identical to calling [`Self::full_step`] in a
    /// loop: movement powers are precomputed once (when `k` is large enough to
    /// use them) via the same binary-exponentiation path.
    ///
    /// # Errors
    ///
    /// The state dimension must match the model.
    pub fn simulate(&self, initial: &MetapopState, horizon: usize) -> Result<Vec<MetapopState>> {
        self.check_state(initial)?;
        let powers = (self.fast_steps > FAST_ITERATION_CUTOFF)
            .then(|| self.movement_powers(self.fast_steps));
        let mut trajectory = Vec::with_capacity(horizon + 1);
        trajectory.push(initial.clone());
        let mut current = initial.clone();
        for _ in 0..horizon {
            let moved = match &powers {
                Some(p) => self.apply_movement(p, &current),
                None => self.fast_iterate(&current, self.fast_steps)?,
            };
            current = self.slow_map(&moved)?;
            trajectory.push(current.clone());
        }
        Ok(trajectory)
    }

    /// Asymptotic bound on total population when every recruitment function is
    /// bounded: with `sigma_max` the largest survival fraction and `b_total`
    /// the sum of per-patch recruitment suprema, total density eventually
    /// enters `[0, b_total / (1 - sigma_max)]`.
    ///
    /// # Errors
    ///
    /// Unsupported when any patch has unbounded (geometric) recruitment.
    pub fn dissipativity_bound(&self) -> Result<DissipativityBound> {
        let mut sigma_max: f64 = 0.0;
        let mut b_total = 0.0;
        for p in &self.params {
            let sigma = p.sigma();
            sigma_max = sigma_max
                .max(sigma.s)
                .max(sigma.e)
                .max(sigma.i)
                .max(sigma.r);
            b_total += p.recruitment().upper_bound().ok_or_else(|| {
                Error::Unsupported(
                    "dissipativity bound requires bounded recruitment in every patch".into(),
                )
            })?;
        }
        Ok(DissipativityBound {
            survival_max: sigma_max,
            recruitment_total: b_total,
            radius: b_total / (1.0 - sigma_max),
        })
    }
}

/// Absorbing-ball description of the total population: see
/// [`MetapopModel::dissipativity_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipativityBound {
    /// Largest survival fraction over patches and compartments.
    pub survival_max: f64,
    /// Sum over patches of the recruitment suprema.
    pub recruitment_total: f64,
    /// Radius `recruitment_total / (1 - survival_max)` of the absorbing ball.
    pub radius: f64,
}
