//! One module per subcommand; each exposes a `run` that turns a validated
//! scenario into named output documents.

pub mod classify;
pub mod r0;
pub mod reduce;
pub mod region;
pub mod simulate;
pub mod validate;
pub mod verify_k;
