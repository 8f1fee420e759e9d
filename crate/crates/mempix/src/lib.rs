//! Compact analog circuit simulator for wide-dynamic-range CMOS pixel
//! circuits built around memristors.
//!
//! The crate covers the whole pipeline from netlist to figures of merit:
//!
//! - [`netlist`] — SPICE-subset parser/serializer, circuit validation, and
//!   four built-in pixel circuits (`pixel_3t_log`, `pixel_2tm`,
//!   `pixel_4t_linlog`, `pixel_3tm`).
//! - [`devices`] — compact device models: an EKV-style MOSFET continuous
//!   across weak and strong inversion, the HP linear-ion-drift memristor
//!   with Joglekar/Biolek windows, capacitors, resistors, independent
//!   sources, and a photodiode composite.
//! - [`engine`] — MNA assembly, damped Newton with gmin stepping, DC
//!   photocurrent sweeps, exposure-sampled sweeps, and adaptive-timestep
//!   transient analysis with memristor state co-integration.
//! - [`analysis`] — output swing, log-slope fits, lin-log knee detection,
//!   dynamic range, average power, and area reporting.
//! - [`numeric`] — the small dense LU kernel underneath Newton.

pub mod analysis;
pub mod devices;
pub mod engine;
pub mod netlist;
pub mod numeric;
pub mod units;

pub use engine::{MnaSystem, SimOptions, Solution, SweepResult, TransientResult};
pub use netlist::{Builtin, Circuit, DeviceInstance, DeviceKind};
