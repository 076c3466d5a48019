//! Escape rates, topological pressure, and survivor-set dimension for open
//! dynamical systems: subshifts of finite type with cylinder holes, and the
//! Markov interval maps that induce them.
//!
//! The crate is organised around a pipeline:
//!
//! * [`symbolic`] - subshifts, admissible words, symbolic points;
//! * [`thermo`] - transfer matrices, leading eigendata, Gibbs weights;
//! * [`holes`] - cylinder hole families, perturbed eigenvalues, escape-rate
//!   sweeps and their small-hole asymptotics;
//! * [`geometry`] - Markov interval maps, cylinder intervals, metric balls
//!   sandwiched between cylinder unions;
//! * [`dimension`] - roots of the pressure equation and dimension sweeps for
//!   survivor sets;
//! * [`oracle`] - independent survival-probability checks (exhaustive
//!   enumeration, Monte Carlo, return-time accounting);
//! * [`cli`] / [`config`] - the JSON-configured command layer used by the
//!   `escapes` binary.
//!
//! Each major capability has a runnable example under `examples/`; start with
//! `cargo run --example escape_cantor --release`.

pub mod cli;
pub mod config;
pub mod dimension;
pub mod error;
pub mod geometry;
pub mod holes;
pub mod oracle;
pub(crate) mod spectral;
pub mod symbolic;
pub mod thermo;

pub use error::{Error, Result};

/// Hard caps and tolerances used throughout the crate.
///
/// These are deliberately global constants rather than per-call options: every
/// reported number is comparable across commands because it was produced under
/// the same budgets.
pub mod params {
    /// Cylinder count cap for transfer-matrix work.
    pub const STATE_CAP: usize = 1 << 20;

    /// Node cap for exhaustive word enumeration in the oracle module.
    pub const ENUM_CAP: usize = 1 << 24;

    /// Relative l1 residual at which power iteration stops.
    pub const POWER_TOL: f64 = 1e-12;

    /// Iteration budget for power iteration.
    pub const POWER_MAX_ITERS: usize = 100_000;

    /// Bracket width at which bisection hands over to Newton in the
    /// pressure-equation root finder.
    pub const BISECT_WIDTH: f64 = 1e-4;

    /// Newton step budget for the pressure-equation root finder.
    pub const NEWTON_MAX_STEPS: usize = 50;

    /// Residual |log lambda_t| accepted as a root of the pressure equation.
    pub const BOWEN_TOL: f64 = 1e-10;

    /// Endpoint tolerance for branch-inverse iteration on nonlinear branches.
    pub const INVERSE_TOL: f64 = 1e-14;

    /// Cylinder count cap for one level of a ball cover refinement.
    pub const BALL_WORD_CAP: usize = 1 << 14;

    /// Depth cap for ball cover refinement.
    pub const BALL_DEPTH_CAP: usize = 64;

    /// Grid points per branch when sampling derivatives (monotonicity,
    /// expansion, oscillation diagnostics).
    pub const DERIV_SAMPLES: usize = 129;

    /// Fixed batch size for Monte Carlo survival sampling.  Each batch owns
    /// one RNG stream, so merged estimates do not depend on how batches are
    /// scheduled across threads.
    pub const MC_BATCH: u64 = 8192;
}
