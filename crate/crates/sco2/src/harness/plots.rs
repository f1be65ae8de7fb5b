//! Plot-ready extraction: one tidy CSV per figure panel, derived from a run
//! log so plotting scripts never parse the full telemetry files.

use std::io::Write;
use std::path::Path;

use crate::error::SimError;

use super::run::RunLog;

fn create(dir: &Path, name: &str) -> Result<std::io::BufWriter<std::fs::File>, SimError> {
    Ok(std::io::BufWriter::new(std::fs::File::create(
        dir.join(name),
    )?))
}

/// Writes the per-panel CSVs: power tracking, temperature tracking, applied
/// inputs, shaft speed against its surge floor, and the disturbance
/// estimates.
pub fn emit_plots(log: &RunLog, dir: &Path) -> Result<(), SimError> {
    std::fs::create_dir_all(dir)?;

    let mut f = create(dir, "power_tracking.csv")?;
    writeln!(f, "time,w_net,w_ref")?;
    for r in &log.plant {
        writeln!(f, "{:.4},{:.6e},{:.6e}", r.time, r.w_net, r.w_ref)?;
    }

    let mut f = create(dir, "temperature_tracking.csv")?;
    writeln!(f, "time,t_in_t,t_ref")?;
    for r in &log.plant {
        writeln!(f, "{:.4},{:.6},{:.6}", r.time, r.t_in_t, r.t_ref)?;
    }

    let mut f = create(dir, "inputs.csv")?;
    writeln!(f, "time,torque,torque_rate,mdot_oil_ref,mdot_oil")?;
    for r in &log.plant {
        writeln!(
            f,
            "{:.4},{:.6},{:.6},{:.6},{:.6}",
            r.time, r.torque, r.torque_rate, r.mdot_oil_ref, r.mdot_oil
        )?;
    }

    let mut f = create(dir, "speed_margin.csv")?;
    writeln!(f, "time,n_c,n_c_min")?;
    for r in &log.plant {
        writeln!(f, "{:.4},{:.6},{:.6}", r.time, r.n_c, r.n_c_min)?;
    }

    let mut f = create(dir, "disturbances.csv")?;
    writeln!(f, "time,d0,d1,d2,d3")?;
    for r in &log.estimator {
        writeln!(
            f,
            "{:.4},{:.4e},{:.4e},{:.4e},{:.4e}",
            r.time, r.d_hat[0], r.d_hat[1], r.d_hat[2], r.d_hat[3]
        )?;
    }

    Ok(())
}
