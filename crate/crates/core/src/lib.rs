//! Discrete-time SEIRS metapopulation models with separated movement and
//! disease time scales.
//!
//! The crate is organised around three layers:
//!
//! - [`seirs`]: the single-patch model — incidence and recruitment families,
//!   the disease/demography step maps, local reproduction numbers and the
//!   disease-free equilibrium.
//! - [`metapop`]: `n` patches coupled by per-compartment movement matrices,
//!   with `k` fast movement sub-steps composed before each slow disease step.
//! - [`reduction`]: the aggregated single-population model obtained in the
//!   fast-movement limit, its reproduction number, and the machinery to
//!   compare fixed points of the full and reduced systems as `k` grows.
//!
//! [`analysis`] adds spectral utilities, long-run trajectory classification,
//! and the two-patch eradication-region geometry. All numerical tolerances are
//! centralised in [`tolerances`].

pub mod analysis;
pub mod error;
pub(crate) mod linalg;
pub mod metapop;
pub mod reduction;
pub mod seirs;
pub mod tolerances;

pub use error::{Error, Result};
pub use seirs::{
    EpidemicParams, LocalState, RecruitmentSpec, SurvivalFractions, TransitionFractions,
    TransmissionSpec,
};
