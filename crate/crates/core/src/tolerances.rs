//! Numeric tolerances used throughout the crate.
//!
//! Every tolerance that shapes an observable behaviour (validation, convergence,
//! cross-checks) lives here with its rationale, so the values are pinned in one
//! place instead of being scattered as magic numbers.

/// Movement-matrix column sums must equal 1 within this bound.
///
/// Column sums of honest transfer fractions are exact up to a handful of ulps;
/// anything worse indicates a mis-specified matrix rather than rounding.
pub const COLUMN_SUM: f64 = 1e-12;

/// Matrix entries with absolute value below this are treated as structural zeros
/// when checking movement regularity (reachability is a combinatorial property;
/// denormal-scale residue must not fake an edge).
pub const STRUCTURAL_ZERO: f64 = 1e-15;

/// Movement steps conserve each compartment's total mass to this relative bound.
pub const MASS_CONSERVATION: f64 = 1e-12;

/// Agreement required between the closed-form reproduction number and the
/// next-generation spectral route. Both are short exact formulas, so they agree
/// to rounding error; 1e-10 leaves two orders of headroom.
pub const R0_CROSS_CHECK: f64 = 1e-10;

/// Relative width at which the bracketing search for the disease-free
/// susceptible level stops.
pub const DFE_ROOT: f64 = 1e-12;

/// Half-width of the band around |multiplier| = 1 inside which the disease-free
/// equilibrium is reported non-hyperbolic and stability conclusions are withheld.
pub const NONHYPERBOLIC_BAND: f64 = 1e-8;

/// A stationary distribution must satisfy ||M m - m||_inf below this bound
/// (direct solve and power-iteration cross-check both).
pub const STATIONARY_RESIDUAL: f64 = 1e-10;

/// Power iteration for the stationary cross-check refines to this residual.
pub const STATIONARY_POWER: f64 = 1e-12;

/// Agreement required between the stationary linear solve and its
/// power-iteration cross-check. Both residuals are at most [`STATIONARY_POWER`];
/// the gap between the two vectors is that residual amplified by the spectral
/// gap, so 1e-8 accommodates subdominant moduli up to ~0.999.
pub const STATIONARY_AGREEMENT: f64 = 1e-8;

/// Residual below which a state is accepted as a fixed point when used as an
/// input to equilibrium lifting and time-scale comparisons.
pub const FIXED_POINT_RESIDUAL: f64 = 1e-10;

/// Default convergence tolerance for the fixed-point solver itself (tighter
/// than [`FIXED_POINT_RESIDUAL`] so solved points pass downstream checks).
pub const FIXED_POINT_SOLVE: f64 = 1e-12;

/// Eigenvalues of an equilibrium Jacobian must be at least this far from the
/// unit circle for the equilibrium to count as hyperbolic.
pub const UNIT_CIRCLE_GAP: f64 = 1e-6;

/// The distance d(k) between the full-model fixed point at the largest k and the
/// lifted reduced equilibrium must fall below this for the time-scale
/// separation to be declared verified.
pub const TIMESCALE_DISTANCE: f64 = 1e-6;

/// Acceptance residual for the general power-iteration spectral radius.
pub const SPECTRAL_RESIDUAL: f64 = 1e-12;

/// Default |reproduction number - 1| tolerance for level-set vertices emitted
/// by the region sweep.
pub const REGION_BOUNDARY: f64 = 1e-9;

// Solver tolerances must be strictly tighter than the acceptance checks that
// consume their outputs; enforced at compile time.
const _: () = {
    assert!(FIXED_POINT_SOLVE < FIXED_POINT_RESIDUAL);
    assert!(STATIONARY_POWER < STATIONARY_RESIDUAL);
    assert!(STATIONARY_RESIDUAL < STATIONARY_AGREEMENT);
    assert!(STRUCTURAL_ZERO < COLUMN_SUM);
    assert!(REGION_BOUNDARY < TIMESCALE_DISTANCE);
};
