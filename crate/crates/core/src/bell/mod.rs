//! Bell functionals, local measurements, boxes, seesaw lower bounds and the
//! partial-transposition distinguishability bounds.

mod bounds;
mod functional;
mod measurement;
mod seesaw;

pub use bounds::{cor1_bound, d_eps_membership, pbit_observation_bound, thm1_bound, BoundReport};
pub use functional::{chsh, classical_value, nonnegativize, BellFunctional, ENUMERATION_LIMIT};
pub use measurement::{bell_operator, box_from, BellBox, MeasurementFamily, MeasurementJson};
pub use seesaw::{seesaw, SeesawConfig, SeesawResult};

pub(crate) use functional::next_assignment;
