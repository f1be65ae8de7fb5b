//! Turbomachine performance-map models: turbine flow/efficiency maps,
//! compressor maps in non-ideal-gas corrected variables with surge/max-flow
//! lookup curves, shaft rotor dynamics, synthetic map families, and a
//! versioned map file format.

pub mod compressor;
pub mod file;
pub mod rotor;
pub mod synthetic;
pub mod turbine;

pub use compressor::{
    build_surge_tables, compressor_eval_forward, compressor_eval_from_pr,
    corrected_vars_compressor, CompressorEval, CompressorMap, CorrectedVars,
};
pub use file::MapFile;
pub use rotor::rotor_step;
pub use synthetic::{
    synthetic_compressor_map, synthetic_turbine_map, CompressorDesign, TurbineDesign,
};
pub use turbine::{turbine_eval, TurbineEval, TurbineMap};

use crate::error::{MapError, NumericsError};

/// Translates an interpolation range error into a map-domain error with the
/// physical variable names for the grid's two axes.
fn grid_err(e: NumericsError, vx: &'static str, vy: &'static str) -> MapError {
    match e {
        NumericsError::OutOfRange {
            coord,
            value,
            min,
            max,
        } => MapError::OutOfMap {
            var: if coord == "x" { vx } else { vy },
            value,
            min,
            max,
        },
        other => MapError::Numerics(other),
    }
}
