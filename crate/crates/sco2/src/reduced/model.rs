//! Reduced-order plant model on the slow timescale.
//!
//! The fast gas dynamics are collapsed: high-side pressure is uniform, the
//! low-side pressures are pinned to the reservoirs, and mass flow adjusts
//! through the turbomachine map characteristics. What remains is a set of
//! ODEs over wall temperatures, stream internal energies, high-side
//! pressure, the two CO2 mass flows, compressor speed, and the oil pump.

use std::f64::consts::PI;

use crate::error::SimError;
use crate::gasdyn::PcheGeometry;
use crate::maps::{
    compressor_eval_forward, turbine_eval, CompressorEval, CompressorMap, TurbineMap,
};
use crate::numerics::find_root_bounded;
use crate::props::{FluidProps, PePartials, ThermoState};

use super::state::{ReducedInput, ReducedLayout, ReducedState};

/// Relative finite-difference step applied to each variable's
/// characteristic scale when differentiating the performance maps.
pub const FD_REL_STEP: f64 = 1.0e-4;

/// Characteristic scales used for finite-difference steps and residual
/// normalization: temperature, internal energy, pressure, mass flow.
pub const SCALE_T: f64 = 500.0;
pub const SCALE_E: f64 = 5.0e5;
pub const SCALE_P: f64 = 1.0e7;
pub const SCALE_MDOT: f64 = 10.0;

/// Geometry and boundary conditions of the reduced plant.
#[derive(Debug, Clone)]
pub struct ReducedConfig {
    pub pche: PcheGeometry,
    /// Cells per connecting pipe.
    pub n_pipe: usize,
    /// Flow area of each connecting pipe, m^2.
    pub pipe_area: f64,
    /// Length of each connecting pipe, m.
    pub pipe_length: f64,
    /// Compressor suction reservoir stagnation pressure, Pa.
    pub p_in_stag: f64,
    /// Compressor suction reservoir temperature, K.
    pub t_in_stag: f64,
    /// Turbine exhaust reservoir pressure, Pa.
    pub p_out_stag: f64,
    /// Oil loop pressure, Pa.
    pub p_oil: f64,
    /// Oil temperature at the pump exit / HX cold inlet, K.
    pub t_oil_in: f64,
    /// Oil pump closed-loop natural frequency, rad/s.
    pub pump_natural_freq: f64,
    /// Oil pump closed-loop damping ratio.
    pub pump_damping: f64,
    /// Use the circular-perimeter product pi*Nu*k for the convective
    /// exchange instead of the conductance form U*P of the semicircular
    /// channel. Off by default; the alternative exists for comparison with
    /// sources that quote the circular form.
    pub circular_perimeter_heat: bool,
}

impl Default for ReducedConfig {
    fn default() -> Self {
        ReducedConfig {
            pche: PcheGeometry::default(),
            n_pipe: 5,
            pipe_area: 0.01,
            pipe_length: 2.0,
            p_in_stag: 8.629e6,
            t_in_stag: 320.0,
            p_out_stag: 8.33e6,
            p_oil: 4.0e6,
            t_oil_in: 573.15,
            pump_natural_freq: 2.0 * 2.0 * PI,
            pump_damping: 1.3,
            circular_perimeter_heat: false,
        }
    }
}

/// Map-derived local sensitivities used by the mass-flow/pressure dynamics.
#[derive(Debug, Clone, Copy)]
pub struct MapPartials {
    /// d(p_out,c - p_in,c)/d mdot_c at fixed speed, Pa s/kg.
    pub dpc_dmdot: f64,
    /// d(p_out,c - p_in,c)/d N_c at fixed flow, Pa s/rad.
    pub dpc_dn: f64,
    /// d(p_out,t - p_in,t)/d mdot_t at fixed inlet temperature, Pa s/kg
    /// (negative: more flow demands a higher turbine inlet pressure).
    pub dpt_dmdot: f64,
    /// True when any stencil had to fall back to one-sided differences
    /// because the map rejected a probe point.
    pub one_sided: bool,
}

/// Reduced model bound to its maps and property providers.
pub struct ReducedModel<'a> {
    pub cfg: ReducedConfig,
    pub layout: ReducedLayout,
    pub comp: &'a CompressorMap,
    pub turb: &'a TurbineMap,
    pub co2: &'a dyn FluidProps,
    pub oil: &'a dyn FluidProps,
}

impl<'a> ReducedModel<'a> {
    pub fn new(
        cfg: ReducedConfig,
        comp: &'a CompressorMap,
        turb: &'a TurbineMap,
        co2: &'a dyn FluidProps,
        oil: &'a dyn FluidProps,
    ) -> Self {
        let layout = ReducedLayout {
            n_pipe: cfg.n_pipe,
            n_hx: cfg.pche.n_cells,
        };
        ReducedModel {
            cfg,
            layout,
            comp,
            turb,
            co2,
            oil,
        }
    }

    /// Flow area, cell length, and wall index (for HX cells) of high-side
    /// CO2 cell `i`.
    pub fn cell_geometry(&self, i: usize) -> (f64, f64, Option<usize>) {
        let lay = &self.layout;
        let g = &self.cfg.pche;
        if i < lay.n_pipe || i >= lay.n_pipe + lay.n_hx {
            (
                self.cfg.pipe_area,
                self.cfg.pipe_length / lay.n_pipe as f64,
                None,
            )
        } else {
            (
                g.flow_area(),
                g.length / g.n_cells as f64,
                Some(i - lay.n_pipe),
            )
        }
    }

    pub fn cell_volume(&self, i: usize) -> f64 {
        let (a, dx, _) = self.cell_geometry(i);
        a * dx
    }

    /// Hot-side exchange conductance per unit length, W/(m K), already
    /// summed over all channels.
    pub fn hot_exchange_coeff(&self, st: &ThermoState, mdot: f64) -> f64 {
        let g = &self.cfg.pche;
        let d_h = g.hydraulic_diameter();
        let re = (mdot.abs() / g.flow_area()) * d_h / st.mu;
        let pr = st.cp * st.mu / st.k;
        let nu = crate::gasdyn::nusselt_hot(re, pr);
        self.exchange_coeff(nu, st.k)
    }

    /// Cold-side (laminar oil) exchange conductance per unit length.
    pub fn cold_exchange_coeff(&self, st: &ThermoState) -> f64 {
        self.exchange_coeff(crate::gasdyn::NU_OIL, st.k)
    }

    fn exchange_coeff(&self, nu: f64, k: f64) -> f64 {
        let g = &self.cfg.pche;
        if self.cfg.circular_perimeter_heat {
            g.n_chans * PI * nu * k
        } else {
            let u = crate::gasdyn::heat_transfer_coefficient(nu, k, g.hydraulic_diameter());
            g.n_chans * u * g.channel_perimeter()
        }
    }

    pub fn decode_co2(&self, x: &ReducedState) -> Result<Vec<ThermoState>, SimError> {
        x.e_co2
            .iter()
            .map(|&e| Ok(self.co2.state_from_pe(x.p_high, e, None)?))
            .collect()
    }

    pub fn decode_oil(&self, x: &ReducedState) -> Result<Vec<ThermoState>, SimError> {
        x.e_oil
            .iter()
            .map(|&e| Ok(self.oil.state_from_pe(self.cfg.p_oil, e, None)?))
            .collect()
    }

    pub fn compressor_point(&self, mdot_c: f64, n_c: f64) -> Result<CompressorEval, SimError> {
        Ok(compressor_eval_forward(
            self.comp,
            self.co2,
            self.cfg.p_in_stag,
            self.cfg.t_in_stag,
            mdot_c,
            n_c,
        )?)
    }

    /// Turbine inlet pressure that passes `mdot_t` at inlet temperature
    /// `t_in_t` against the fixed exhaust reservoir, from the flow map.
    pub fn turbine_inlet_pressure(&self, mdot_t: f64, t_in_t: f64) -> Result<f64, SimError> {
        let p_out = self.cfg.p_out_stag;
        let n_cor = self.turb.corrected_speed(self.turb.sync_speed, t_in_t);
        let (pr_lo, pr_hi) = self.turb.m_t1.x_range();
        let f = |p_in: f64| {
            let mfp = self.turb.mfp_of(mdot_t, t_in_t, p_in);
            match self.turb.pr_from_mfp(mfp, n_cor) {
                Ok(pr) => p_in - p_out * pr,
                Err(_) => f64::NAN,
            }
        };
        let lo = p_out * (pr_lo + 1.0e-6);
        let hi = p_out * pr_hi;
        let p = find_root_bounded(f, lo, hi, 1.0e-7 * p_out).map_err(|e| {
            SimError::Diverged {
                t: 0.0,
                context: format!(
                    "turbine inlet pressure for mdot={mdot_t:.4} kg/s, T={t_in_t:.2} K: {e}"
                ),
            }
        })?;
        Ok(p)
    }

    /// Local map sensitivities at the operating point, by central finite
    /// differences with steps of `FD_REL_STEP` times each variable's scale.
    pub fn map_partials(&self, x: &ReducedState, t_in_t: f64) -> Result<MapPartials, SimError> {
        let dm = FD_REL_STEP * SCALE_MDOT;
        let dn = FD_REL_STEP * self.comp.design_speed;
        let mut one_sided = false;

        // Delta_p across the compressor; suction pressure is fixed, so only
        // p_out varies.
        let p_c = |m: f64, n: f64| self.compressor_point(m, n).map(|ev| ev.p_out);
        let (dpc_dmdot, os1) = central_diff(|s| p_c(x.mdot_c + s, x.n_c), dm)?;
        let (dpc_dn, os2) = central_diff(|s| p_c(x.mdot_c, x.n_c + s), dn)?;

        // Delta_p_t = p_out,t - p_in,t with the exhaust reservoir fixed.
        let (dpin_dmdot, os3) =
            central_diff(|s| self.turbine_inlet_pressure(x.mdot_t + s, t_in_t), dm)?;
        one_sided |= os1 || os2 || os3;

        Ok(MapPartials {
            dpc_dmdot,
            dpc_dn,
            dpt_dmdot: -dpin_dmdot,
            one_sided,
        })
    }

    /// Heat rates into the wall per unit length from the hot and cold
    /// sides, W/m, indexed along the wall (hot-flow direction).
    pub fn wall_heat_rates(
        &self,
        x: &ReducedState,
        co2: &[ThermoState],
        oil: &[ThermoState],
    ) -> (Vec<f64>, Vec<f64>) {
        let lay = &self.layout;
        let mut q_hot = vec![0.0; lay.n_hx];
        let mut q_cold = vec![0.0; lay.n_hx];
        for w in 0..lay.n_hx {
            let hot = &co2[lay.n_pipe + w];
            let cold = &oil[lay.wall_of_oil(w)];
            q_hot[w] = self.hot_exchange_coeff(hot, x.mdot_c) * (hot.t - x.t_wall[w]);
            q_cold[w] = self.cold_exchange_coeff(cold) * (cold.t - x.t_wall[w]);
        }
        (q_hot, q_cold)
    }

    /// Full derivative vector dx/dt in packed layout.
    pub fn eval_dynamics(
        &self,
        x: &ReducedState,
        u: &ReducedInput,
    ) -> Result<Vec<f64>, SimError> {
        let lay = self.layout;
        let cfg = &self.cfg;
        let mut dx = vec![0.0; lay.n_states()];

        let co2 = self.decode_co2(x)?;
        let oil = self.decode_oil(x)?;
        let comp_ev = self.compressor_point(x.mdot_c, x.n_c)?;

        // walls
        let (q_hot, q_cold) = self.wall_heat_rates(x, &co2, &oil);
        let c_wall = cfg.pche.wall_area() * cfg.pche.rho_w * cfg.pche.cp_w;
        for w in 0..lay.n_hx {
            dx[lay.i_t_wall(w)] = (q_hot[w] + q_cold[w]) / c_wall;
        }

        // high-side CO2 internal energy: upwind transport at the compressor
        // mass flow, plus the wall exchange in HX cells
        let mut de_co2 = vec![0.0; lay.n_high()];
        for i in 0..lay.n_high() {
            let (area, dxl, wall) = self.cell_geometry(i);
            let h_up = if i == 0 {
                comp_ev.state_out.h
            } else {
                co2[i - 1].h
            };
            let q = wall.map(|w| q_hot[w]).unwrap_or(0.0);
            de_co2[i] = (x.mdot_c * (h_up - co2[i].h) / dxl - q) / (co2[i].rho * area);
            dx[lay.i_e_co2(i)] = de_co2[i];
        }

        // oil internal energy, counter-flow
        let h_oil_in = self.oil.state_from_pt(cfg.p_oil, cfg.t_oil_in)?.h;
        let oil_area = cfg.pche.flow_area();
        let oil_dx = cfg.pche.length / lay.n_hx as f64;
        for j in 0..lay.n_hx {
            let h_up = if j == 0 { h_oil_in } else { oil[j - 1].h };
            let q = q_cold[lay.wall_of_oil(j)];
            dx[lay.i_e_oil(j)] =
                (x.mdot_oil * (h_up - oil[j].h) / oil_dx - q) / (oil[j].rho * oil_area);
        }

        // compressor shaft
        let t_load = comp_ev.wdot / x.n_c;
        let dn_c = (u.torque - t_load) / self.comp.inertia;
        dx[lay.i_n_c()] = dn_c;

        // mass flows and high-side pressure through the map characteristics
        let t_in_t = co2.last().expect("high side has cells").t;
        let mp = self.map_partials(x, t_in_t)?;
        let mut s_rho_p = 0.0;
        let mut s_rho_e_de = 0.0;
        for (i, &de) in de_co2.iter().enumerate() {
            let pp = self.co2.partials_pe(x.p_high, x.e_co2[i])?;
            let v = self.cell_volume(i);
            s_rho_p += v * pp.drho_dp;
            s_rho_e_de += v * pp.drho_de * de;
        }
        let dmdot_t = (x.mdot_t - x.mdot_c + s_rho_e_de) / (mp.dpt_dmdot * s_rho_p);
        dx[lay.i_mdot_t()] = dmdot_t;
        dx[lay.i_p_high()] = -mp.dpt_dmdot * dmdot_t;
        dx[lay.i_mdot_c()] =
            -(mp.dpc_dn * dn_c + mp.dpt_dmdot * dmdot_t) / mp.dpc_dmdot;

        // oil pump closed loop, second order
        let w_n = cfg.pump_natural_freq;
        dx[lay.i_mdot_oil()] = x.mdot_oil_rate;
        dx[lay.i_mdot_oil_rate()] = w_n * w_n * (u.mdot_oil_ref - x.mdot_oil)
            - 2.0 * cfg.pump_damping * w_n * x.mdot_oil_rate;

        Ok(dx)
    }

    /// Turbine shaft power as a function of (mdot_t, T_in,t), with the
    /// inlet pressure implied by the flow map against the fixed exhaust.
    pub fn turbine_power(&self, mdot_t: f64, t_in_t: f64) -> Result<f64, SimError> {
        let p_in = self.turbine_inlet_pressure(mdot_t, t_in_t)?;
        let ev = turbine_eval(
            self.turb,
            self.co2,
            p_in,
            self.cfg.p_out_stag,
            t_in_t,
            self.turb.sync_speed,
        )?;
        Ok(ev.wdot)
    }

    /// Turbine inlet temperature from the last high-side cell.
    pub fn turbine_inlet_temperature(&self, x: &ReducedState) -> Result<f64, SimError> {
        let e = *x.e_co2.last().expect("high side has cells");
        Ok(self.co2.state_from_pe(x.p_high, e, None)?.t)
    }

    /// Tracked outputs z = (net shaft power W, turbine inlet temperature K).
    pub fn eval_outputs(&self, x: &ReducedState) -> Result<(f64, f64), SimError> {
        let t_in_t = self.turbine_inlet_temperature(x)?;
        let wdot_t = self.turbine_power(x.mdot_t, t_in_t)?;
        let wdot_c = self.compressor_point(x.mdot_c, x.n_c)?.wdot;
        Ok((wdot_t - wdot_c, t_in_t))
    }

    /// Measured outputs: CO2 temperature entering and leaving the HX hot
    /// side, oil temperature entering and leaving the cold side.
    pub fn eval_measurements(&self, x: &ReducedState) -> Result<[f64; 4], SimError> {
        let lay = &self.layout;
        let t_at = |e: f64| -> Result<f64, SimError> {
            Ok(self.co2.state_from_pe(x.p_high, e, None)?.t)
        };
        let t_oil_at = |e: f64| -> Result<f64, SimError> {
            Ok(self.oil.state_from_pe(self.cfg.p_oil, e, None)?.t)
        };
        Ok([
            t_at(x.e_co2[lay.n_pipe])?,
            t_at(x.e_co2[lay.n_pipe + lay.n_hx - 1])?,
            t_oil_at(x.e_oil[0])?,
            t_oil_at(x.e_oil[lay.n_hx - 1])?,
        ])
    }

    pub(super) fn co2_partials(&self, x: &ReducedState) -> Result<Vec<PePartials>, SimError> {
        x.e_co2
            .iter()
            .map(|&e| Ok(self.co2.partials_pe(x.p_high, e)?))
            .collect()
    }

    pub(super) fn oil_partials(&self, x: &ReducedState) -> Result<Vec<PePartials>, SimError> {
        x.e_oil
            .iter()
            .map(|&e| Ok(self.oil.partials_pe(self.cfg.p_oil, e)?))
            .collect()
    }
}

/// Central difference of a fallible scalar map; falls back to one-sided when
/// one probe is rejected and reports that in the flag.
pub(super) fn central_diff<F>(mut f: F, step: f64) -> Result<(f64, bool), SimError>
where
    F: FnMut(f64) -> Result<f64, SimError>,
{
    match (f(step), f(-step)) {
        (Ok(hi), Ok(lo)) => Ok(((hi - lo) / (2.0 * step), false)),
        (Ok(hi), Err(_)) => {
            let mid = f(0.0)?;
            Ok(((hi - mid) / step, true))
        }
        (Err(_), Ok(lo)) => {
            let mid = f(0.0)?;
            Ok(((mid - lo) / step, true))
        }
        (Err(e), Err(_)) => Err(e),
    }
}
