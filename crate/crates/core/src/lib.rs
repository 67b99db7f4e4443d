//! Bit-true stochastic computing (SC) simulation of a Sparse Kaczmarz
//! estimation architecture.
//!
//! The crate is organised bottom-up:
//!
//! * [`bitstream`]: stochastic number formats, LFSR number generation and
//!   a packed binary file format for streams.
//! * [`circuits`]: cycle-accurate models of the SC blocks (cancellation,
//!   stochastic maximum, shrink, multiplier, carry adders, scalar product,
//!   delay line).
//! * [`estimators`]: Sparse Kaczmarz in double precision, fixed point and
//!   on the stochastic datapath.
//! * [`analysis`]: closed-form and Monte Carlo error characterisation of
//!   the SC shrink function.
//! * [`harness`]: problem generation, RMSE sweeps and data-file emission.

pub mod analysis;
pub mod bitstream;
pub mod circuits;
pub mod error;
pub mod estimators;
pub mod harness;

pub use bitstream::{BitStream, LfsrGenerator, SignMagStream, SngConfig, StreamFactory, TlbStream};
pub use circuits::{CarryAdderState, DelayLine, MaxCircuitState};
pub use error::{Error, Result};
pub use estimators::{
    Backend, EstimatorOutput, FixedPointFormat, LinearProblem, ScParams, SolverConfig,
};
