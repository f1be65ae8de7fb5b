//! Receding-horizon tracking controller: steady-state target selection,
//! online relinearization and discretization of the reduced model, a
//! condensed quadratic program over input moves and constraint slacks, and
//! the stateful update loop that integrates the motor torque.

mod condense;
mod target;
mod types;
mod update;

pub use condense::{build_qp, discretize_model, CondensedQp, DiscreteModel, QpInputs};
pub use target::{compute_target, compute_target_raw, TargetPoint};
pub use types::{ConstraintSet, ControlRecord, ControlSolution, MpcTuning};
pub use update::Controller;
