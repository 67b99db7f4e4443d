//! Cycle-accurate models of the stochastic computing building blocks.
//!
//! Every block is a deterministic function of its input streams and its
//! initial state. State objects are single-owner and advanced one cycle at
//! a time.

pub mod adder;
pub mod cancel;
pub mod delay;
pub mod max;
pub mod trace;

pub use adder::{
    nonscaled_add, nonscaled_add_traced, scalar_product, tlb_multiply, CarryAdderState,
    CarryStats, DEFAULT_CARRY_DEPTH,
};
pub use cancel::{cancel_step, cancel_streams};
pub use delay::{delay_stream, DelayLine};
pub use max::{max_stream, max_stream_traced, shrink_stream, MaxCircuitState};
pub use trace::TraceWriter;

/// Shrink register length used by the reference architecture.
pub const DEFAULT_MAX_CAPACITY: u32 = 10;
/// Decorrelation delay applied to the reused row streams.
pub const DEFAULT_DELAY: usize = 10;
