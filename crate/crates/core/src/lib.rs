//! Network-calculus delay bounds for 802.1Qbv gates aligned with restricted
//! Target Wake Time sessions.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! - [`pwl`]: general piecewise-linear curves and grid-sampled reference
//!   implementations of the min-plus operations. These are slow and general,
//!   and serve as the oracle for the exact algebra.
//! - [`algebra`]: exact min-plus operations on token buckets, rate-latency
//!   curves and delay elements, plus the stochastic scaling curve.
//! - [`gates`]: the TDMA staircase of a time-aware-shaper gate, its affine
//!   envelope and the high/low priority service curves of two concurrently
//!   opened gates.
//! - [`rtx`]: the re-entrant retransmission system over a Bernoulli loss
//!   channel, solved by fixed-point iteration, and the resulting delay bound.
//! - [`scenario`]: whole experiments and loss-probability sweeps.
//! - [`sim`]: a slotted Monte Carlo simulator of the gated, lossy,
//!   priority-served station, used to check the analytic bounds.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod error;
pub mod gates;
pub mod pwl;
pub mod rtx;
pub mod scenario;
pub mod sim;

pub use algebra::{DelayElement, RateLatency, ScalingCurve, TokenBucket};
pub use error::{Error, Result};
pub use gates::{GateConfig, QueueRole};
pub use pwl::{GridSpec, PwlCurve, Sampled};
pub use rtx::{ChannelConfig, DelayBoundResult, RtxSolution, SolverOptions};
pub use scenario::{InterferenceMode, Priority, QueueSpec, Scenario, SweepResult, SweepRow};
pub use sim::{ArrivalPattern, SimConfig, SimStats};
