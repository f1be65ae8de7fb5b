//! Scenario-driven simulation harness: scenario files, the full truth
//! plant, steady-state initialization, the closed-loop run driver, data
//! generation utilities, and plot-ready output extraction.

pub mod gen;
pub mod init;
pub mod plant;
pub mod plots;
pub mod run;
pub mod scenario;

pub use gen::{generate_property_table, generate_synthetic_maps};
pub use init::{init_steady_state, write_profile_csv, InitReport};
pub use plant::{PlantConfig, PlantDiagnostics, PlantOutputs, TruthPlant};
pub use plots::emit_plots;
pub use run::{run_closed_loop, EstimatorRecord, PlantRecord, RunLog};
pub use scenario::{
    BoundarySection, ConstraintsSection, EstimatorSection, FluidSection, GeometrySection,
    InitialSection, MapsSection, Scenario, ScheduleEntry, TuningSection,
};
