//! Printed-circuit heat exchanger: two representative 1D channels (hot
//! compressible, cold incompressible, counter-flow) coupled through a
//! conductive wall. Heat rates are evaluated once per step from the states
//! at the step start and held frozen while the three sub-models advance
//! (bulk-synchronous exchange), so the energy handed off is exactly
//! symmetric.

use std::f64::consts::PI;

use crate::error::SimError;
use crate::props::FluidProps;

use super::oil::{step_incompressible, IncompressibleStream, OilBoundary, OilStepReport};
use super::stream::{step_compressible, CompressibleStream, StepReport, StreamBc};
use super::wall::{
    heat_transfer_coefficient, nusselt_hot, step_wall, wall_heat_rate, WallGrid, NU_OIL,
};

/// Semicircular-channel PCHE core geometry; both sides share the channel
/// diameter and count.
#[derive(Debug, Clone)]
pub struct PcheGeometry {
    /// Channel diameter, m.
    pub channel_d: f64,
    pub n_chans: f64,
    pub length: f64,
    pub n_cells: usize,
    /// Wall thickness between hot and cold plates, m.
    pub wall_thickness: f64,
    pub rho_w: f64,
    pub cp_w: f64,
    pub roughness: f64,
}

impl Default for PcheGeometry {
    fn default() -> Self {
        PcheGeometry {
            channel_d: 1.0e-3,
            n_chans: 4000.0,
            length: 1.0,
            n_cells: 15,
            wall_thickness: 1.3e-3,
            rho_w: 7990.0,
            cp_w: 500.0,
            roughness: 0.0,
        }
    }
}

impl PcheGeometry {
    /// Flow area of one semicircular channel, πd²/8.
    pub fn channel_area(&self) -> f64 {
        PI * self.channel_d * self.channel_d / 8.0
    }

    /// Wetted perimeter of one semicircular channel, d(π/2 + 1).
    pub fn channel_perimeter(&self) -> f64 {
        self.channel_d * (PI / 2.0 + 1.0)
    }

    pub fn hydraulic_diameter(&self) -> f64 {
        4.0 * self.channel_area() / self.channel_perimeter()
    }

    /// Total flow area across all channels of one side.
    pub fn flow_area(&self) -> f64 {
        self.n_chans * self.channel_area()
    }

    /// Total wall cross-section: one diameter-wide strip of plate per
    /// channel pair.
    pub fn wall_area(&self) -> f64 {
        self.n_chans * self.channel_d * self.wall_thickness
    }

    pub fn wall_grid(&self, t: f64) -> WallGrid {
        WallGrid::uniform(
            self.n_cells,
            self.length,
            self.wall_area(),
            self.rho_w,
            self.cp_w,
            t,
        )
    }
}

/// Per-step PCHE diagnostics; heat rates are positive into the wall.
#[derive(Debug, Clone, Copy, Default)]
pub struct PcheReport {
    pub hot: StepReport,
    pub cold: OilStepReport,
    /// Heat leaving the hot stream, W.
    pub q_hot: f64,
    /// Heat entering the cold stream, W.
    pub q_cold: f64,
}

/// Heat rates per unit length into the wall from each side, indexed along
/// the wall (= hot-stream direction). The cold stream flows counter to the
/// hot stream, so its cell j faces wall cell n-1-j.
pub fn pche_heat_rates(
    geom: &PcheGeometry,
    hot: &mut CompressibleStream,
    hot_fluid: &dyn FluidProps,
    cold: &IncompressibleStream,
    cold_fluid: &dyn FluidProps,
    wall: &WallGrid,
) -> Result<(Vec<f64>, Vec<f64>), SimError> {
    let n = wall.n_cells;
    assert!(hot.n_cells == n && cold.n_cells == n, "grid mismatch");
    let d_h_hot = hot.d_h;
    let d_h_cold = cold.d_h;
    let perim = geom.channel_perimeter();

    let hot_cells = hot.decode(hot_fluid)?;
    let mut q_h = vec![0.0; n];
    let mut q_c = vec![0.0; n];
    for i in 0..n {
        let (st, v) = &hot_cells[i];
        let re = st.rho * v.abs() * d_h_hot / st.mu;
        let pr = st.cp * st.mu / st.k;
        let u_h = heat_transfer_coefficient(nusselt_hot(re, pr), st.k, d_h_hot);
        q_h[i] = wall_heat_rate(hot.n_chans, u_h, perim, st.t, wall.t_w[i]);

        let j = n - 1 - i;
        let stc = cold_fluid.state_from_pt(cold.p[j].max(1e5), cold.t[j])?;
        let u_c = heat_transfer_coefficient(NU_OIL, stc.k, d_h_cold);
        q_c[i] = wall_heat_rate(cold.n_chans, u_c, perim, stc.t, wall.t_w[i]);
    }
    Ok((q_h, q_c))
}

/// Advances the coupled hot/cold/wall triple by `dt`.
#[allow(clippy::too_many_arguments)]
pub fn pche_step(
    geom: &PcheGeometry,
    hot: &mut CompressibleStream,
    hot_fluid: &dyn FluidProps,
    hot_bc_in: &StreamBc,
    hot_bc_out: &StreamBc,
    cold: &mut IncompressibleStream,
    cold_fluid: &dyn FluidProps,
    cold_bc: &OilBoundary,
    wall: &mut WallGrid,
    dt: f64,
) -> Result<PcheReport, SimError> {
    let n = wall.n_cells;
    let (q_h, q_c) = pche_heat_rates(geom, hot, hot_fluid, cold, cold_fluid, wall)?;

    // fluids see the negated wall-side rates, reindexed for the cold stream
    let q_hot_fluid: Vec<f64> = q_h.iter().map(|q| -q).collect();
    let q_cold_fluid: Vec<f64> = (0..n).map(|j| -q_c[n - 1 - j]).collect();

    let hot_report = step_compressible(
        hot,
        hot_fluid,
        hot_bc_in,
        hot_bc_out,
        Some(&q_hot_fluid),
        dt,
    )?;
    let cold_report = step_incompressible(cold, cold_fluid, cold_bc, Some(&q_cold_fluid), dt)?;
    step_wall(wall, &q_h, &q_c, dt);

    Ok(PcheReport {
        hot: hot_report,
        cold: cold_report,
        q_hot: q_h.iter().sum::<f64>() * wall.dx,
        q_cold: -q_c.iter().sum::<f64>() * wall.dx,
    })
}
