//! Data generation: synthetic performance maps and property tables written
//! to their on-disk formats.

use std::path::{Path, PathBuf};

use crate::error::SimError;
use crate::maps::{
    synthetic_compressor_map, synthetic_turbine_map, CompressorDesign, TurbineDesign,
};
use crate::props::{build_table, save_table, AxisSpec, Co2PengRobinson, TableBasis};

/// Writes the stock synthetic compressor and turbine maps into `dir` and
/// returns their paths.
pub fn generate_synthetic_maps(dir: &Path) -> Result<(PathBuf, PathBuf), SimError> {
    std::fs::create_dir_all(dir)?;
    let co2 = Co2PengRobinson::default();
    let comp = synthetic_compressor_map(&CompressorDesign::default(), &co2)?;
    let turb = synthetic_turbine_map(&TurbineDesign::default())?;
    let comp_path = dir.join("compressor.map");
    let turb_path = dir.join("turbine.map");
    comp.save(&comp_path)?;
    turb.save(&turb_path)?;
    Ok((comp_path, turb_path))
}

/// Samples the equation of state on a (p, T) grid covering the cycle's
/// operating envelope and writes the table to `path`.
pub fn generate_property_table(
    path: &Path,
    n_p: usize,
    n_t: usize,
    p_range: (f64, f64),
    t_range: (f64, f64),
) -> Result<(), SimError> {
    let co2 = Co2PengRobinson::default();
    let table = build_table(
        &co2,
        TableBasis::PT,
        AxisSpec::new(n_p, p_range.0, p_range.1),
        AxisSpec::new(n_t, t_range.0, t_range.1),
    )?;
    save_table(&table, path)?;
    Ok(())
}
