//! Steady-state initialization: integrate the truth plant with frozen
//! inputs until every state's relative drift per simulated second falls
//! below the scenario tolerance.

use std::io::Write;
use std::path::Path;

use crate::error::SimError;

use super::plant::{PlantOutputs, TruthPlant};

/// Convergence summary of a successful initialization.
#[derive(Debug, Clone)]
pub struct InitReport {
    /// Simulated seconds integrated.
    pub seconds: f64,
    /// Final max per-state relative change per simulated second.
    pub residual: f64,
    pub outputs: PlantOutputs,
    pub inner_steps: usize,
}

/// Relative drift rate between two snapshots `chunk` seconds apart. States
/// are compared against their own magnitude with a floor of 1 so momenta
/// near zero don't dominate.
fn drift_rate(before: &[f64], after: &[f64], chunk: f64) -> f64 {
    before
        .iter()
        .zip(after)
        .map(|(&a, &b)| (b - a).abs() / b.abs().max(1.0))
        .fold(0.0f64, f64::max)
        / chunk
}

/// Integrates the plant with its inputs frozen until the per-second
/// relative state change drops below `tolerance`, checking once per
/// simulated second. Exceeding `max_seconds` fails with the last residual.
pub fn init_steady_state(
    plant: &mut TruthPlant,
    tolerance: f64,
    max_seconds: f64,
) -> Result<InitReport, SimError> {
    const CHUNK: f64 = 1.0;
    let mut before = plant.snapshot();
    let mut seconds = 0.0;
    let mut inner_steps = 0;
    let mut residual = f64::INFINITY;
    while seconds < max_seconds {
        let diag = plant.step(CHUNK)?;
        inner_steps += diag.inner_steps;
        seconds += CHUNK;
        let after = plant.snapshot();
        residual = drift_rate(&before, &after, CHUNK);
        before = after;
        if residual < tolerance {
            let outputs = plant.outputs()?;
            return Ok(InitReport {
                seconds,
                residual,
                outputs,
                inner_steps,
            });
        }
    }
    Err(SimError::InitNotConverged { residual, seconds })
}

/// Writes the converged axial profiles (one row per high-side cell; oil and
/// wall columns are empty outside the exchanger window).
pub fn write_profile_csv(plant: &mut TruthPlant, path: &Path) -> Result<(), SimError> {
    let cells = plant.hot.decode(plant.co2)?;
    let n_pipe = plant.cfg.n_pipe;
    let n_hx = plant.cfg.pche.n_cells;
    let dx = plant.hot.dx;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "x,t_co2,p_co2,rho_co2,v_co2,t_wall,t_oil")?;
    for (i, (st, v)) in cells.iter().enumerate() {
        let x = (i as f64 + 0.5) * dx;
        let (t_wall, t_oil) = if i >= n_pipe && i < n_pipe + n_hx {
            let w = i - n_pipe;
            (
                format!("{:.6}", plant.wall.t_w[w]),
                format!("{:.6}", plant.oil.t[n_hx - 1 - w]),
            )
        } else {
            (String::new(), String::new())
        };
        writeln!(
            f,
            "{:.6},{:.6},{:.6e},{:.6},{:.6},{},{}",
            x, st.t, st.p, st.rho, v, t_wall, t_oil
        )?;
    }
    Ok(())
}
