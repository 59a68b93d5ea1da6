//! Discrete-time simulator for a UAV collecting buffered data from ground
//! sensors.
//!
//! A mission is a sequence of fixed-length slots. In every slot the UAV
//! evaluates the link to each sensor (free-space model or a replayed SNR
//! trace), associates with at most one sensor, downloads up to the slot
//! capacity or the sensor's remaining quota, and moves under a speed limit
//! inside a convex geofence. Two association policies are provided:
//!
//! * **Greedy**: the highest-SNR sensor that still holds data.
//! * **HGAD** (hover-based greedy adaptive download): the highest-rate
//!   sensor, hovering in place once the rate reaches a per-sensor trigger,
//!   for at most a bounded time.
//!
//! [`oracle`] solves small instances exactly for comparison, and [`batch`]
//! runs many missions at once (on the rayon pool with the default
//! `parallel` feature).

pub mod audit;
pub mod batch;
pub mod channel;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod policy;
pub mod random;
pub mod trajectory;
pub mod types;

pub use channel::{ChannelSource, SnrTrace};
pub use engine::{run_mission, MissionResult};
pub use error::{MuleError, Result};
pub use geometry::{ConvexPolygon, Vec2};
pub use types::{
    validate_config, BufferState, HgadParams, HgadSettings, LinkBudget, MissionConfig, MissionMode,
    Policy, RateEntry, RateTable, SensorNode, SlotRecord,
};
