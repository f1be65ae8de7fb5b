//! Continuous-time linearization of the reduced model.
//!
//! The wall and energy rows are assembled analytically, keeping only the
//! dominant couplings: each wall cell to itself and its two fluid
//! neighbors; each energy cell to its upstream neighbor, itself, its wall
//! cell, and the stream mass flow. Exchange conductances and upstream
//! boundary enthalpies are frozen at the linearization point. The
//! mass-flow, pressure, and rotor rows chain the same map sensitivities the
//! nonlinear dynamics use, obtained by central finite differences.

use crate::error::SimError;
use crate::numerics::Matrix;

use super::model::{central_diff, ReducedModel, FD_REL_STEP, SCALE_MDOT, SCALE_T};
use super::state::{ReducedInput, ReducedState};

/// Linear model dx/dt = A(x - x0) + B(u - u0) + b_torque*(T_m - T_m,0) + f0,
/// z = C_z(x - x0) + g0, y = C_y(x - x0) + g0_y.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub a: Matrix,
    /// Input columns: [torque_rate, mdot_oil_ref]. The torque rate acts
    /// only through the integrated torque, whose sensitivity is
    /// `b_torque`; the column is kept so input dimensions match the
    /// controller's input vector.
    pub b: Matrix,
    /// Sensitivity of dx/dt to the integrated motor torque T_m.
    pub b_torque: Vec<f64>,
    /// Tracked outputs: net power, turbine inlet temperature.
    pub c_z: Matrix,
    /// Measured outputs: CO2 in/out and oil in/out temperatures.
    pub c_y: Matrix,
    pub f0: Vec<f64>,
    pub g0: [f64; 2],
    pub g0_y: [f64; 4],
    pub x0: ReducedState,
    pub u0: ReducedInput,
    /// Some map sensitivity needed a one-sided stencil (operating point at
    /// a map boundary).
    pub one_sided: bool,
}

impl ReducedModel<'_> {
    pub fn linearize(
        &self,
        x0: &ReducedState,
        u0: &ReducedInput,
    ) -> Result<LinearModel, SimError> {
        let lay = self.layout;
        let cfg = &self.cfg;
        let n = lay.n_states();

        let f0 = self.eval_dynamics(x0, u0)?;
        let co2 = self.decode_co2(x0)?;
        let oil = self.decode_oil(x0)?;
        let pp_co2 = self.co2_partials(x0)?;
        let pp_oil = self.oil_partials(x0)?;
        let comp_ev = self.compressor_point(x0.mdot_c, x0.n_c)?;
        let t_in_t = co2.last().expect("high side has cells").t;
        let mp = self.map_partials(x0, t_in_t)?;
        let mut one_sided = mp.one_sided;

        let ch: Vec<f64> = (0..lay.n_hx)
            .map(|w| self.hot_exchange_coeff(&co2[lay.n_pipe + w], x0.mdot_c))
            .collect();
        let cc: Vec<f64> = (0..lay.n_hx)
            .map(|w| self.cold_exchange_coeff(&oil[lay.wall_of_oil(w)]))
            .collect();

        let mut a = Matrix::zeros(n, n);
        let mut b = Matrix::zeros(n, 2);
        let mut b_torque = vec![0.0; n];

        // wall rows: own temperature plus the two adjacent fluid cells
        let c_wall = cfg.pche.wall_area() * cfg.pche.rho_w * cfg.pche.cp_w;
        for w in 0..lay.n_hx {
            let j = lay.wall_of_oil(w);
            let row = a.row_mut(lay.i_t_wall(w));
            row[lay.i_t_wall(w)] = -(ch[w] + cc[w]) / c_wall;
            row[lay.i_e_co2(lay.n_pipe + w)] = ch[w] * pp_co2[lay.n_pipe + w].dt_de / c_wall;
            row[lay.i_e_oil(j)] = cc[w] * pp_oil[j].dt_de / c_wall;
        }

        // CO2 energy rows
        for i in 0..lay.n_high() {
            let (area, dxl, wall) = self.cell_geometry(i);
            let inv_cap = 1.0 / (co2[i].rho * area);
            let h_up = if i == 0 {
                comp_ev.state_out.h
            } else {
                co2[i - 1].h
            };
            let ri = lay.i_e_co2(i);
            let row = a.row_mut(ri);
            if i > 0 {
                row[lay.i_e_co2(i - 1)] =
                    x0.mdot_c * pp_co2[i - 1].dh_de / dxl * inv_cap;
            }
            let mut d_own = -x0.mdot_c * pp_co2[i].dh_de / dxl * inv_cap;
            if let Some(w) = wall {
                d_own -= ch[w] * pp_co2[i].dt_de * inv_cap;
                row[lay.i_t_wall(w)] = ch[w] * inv_cap;
            }
            // density falling with energy rescales the whole balance
            d_own -= pp_co2[i].drho_de / co2[i].rho * f0[ri];
            row[ri] = d_own;
            row[lay.i_mdot_c()] = (h_up - co2[i].h) / dxl * inv_cap;
        }

        // oil energy rows
        let h_oil_in = self.oil.state_from_pt(cfg.p_oil, cfg.t_oil_in)?.h;
        let oil_area = cfg.pche.flow_area();
        let oil_dx = cfg.pche.length / lay.n_hx as f64;
        for j in 0..lay.n_hx {
            let w = lay.wall_of_oil(j);
            let inv_cap = 1.0 / (oil[j].rho * oil_area);
            let h_up = if j == 0 { h_oil_in } else { oil[j - 1].h };
            let rj = lay.i_e_oil(j);
            let row = a.row_mut(rj);
            if j > 0 {
                row[lay.i_e_oil(j - 1)] =
                    x0.mdot_oil * pp_oil[j - 1].dh_de / oil_dx * inv_cap;
            }
            row[rj] = -x0.mdot_oil * pp_oil[j].dh_de / oil_dx * inv_cap
                - cc[w] * pp_oil[j].dt_de * inv_cap
                - pp_oil[j].drho_de / oil[j].rho * f0[rj];
            row[lay.i_t_wall(w)] = cc[w] * inv_cap;
            row[lay.i_mdot_oil()] = (h_up - oil[j].h) / oil_dx * inv_cap;
        }

        // rotor row: load torque sensitivities from the compressor map
        let dm = FD_REL_STEP * SCALE_MDOT;
        let dn = FD_REL_STEP * self.comp.design_speed;
        let t_load = |m: f64, nc: f64| self.compressor_point(m, nc).map(|ev| ev.wdot / nc);
        let (dtl_dm, os1) = central_diff(|s| t_load(x0.mdot_c + s, x0.n_c), dm)?;
        let (dtl_dn, os2) = central_diff(|s| t_load(x0.mdot_c, x0.n_c + s), dn)?;
        one_sided |= os1 || os2;
        let j_c = self.comp.inertia;
        {
            let row = a.row_mut(lay.i_n_c());
            row[lay.i_mdot_c()] = -dtl_dm / j_c;
            row[lay.i_n_c()] = -dtl_dn / j_c;
            b_torque[lay.i_n_c()] = 1.0 / j_c;
        }

        // turbine mass flow row: chains the energy rows through the
        // high-side storage terms (coefficients frozen at the point)
        let mut s_rho_p = 0.0;
        let mut row_mt = vec![0.0; n];
        row_mt[lay.i_mdot_t()] += 1.0;
        row_mt[lay.i_mdot_c()] -= 1.0;
        for (i, pp) in pp_co2.iter().enumerate() {
            let v = self.cell_volume(i);
            s_rho_p += v * pp.drho_dp;
            let w = v * pp.drho_de;
            let erow = a.row(lay.i_e_co2(i)).to_vec();
            for (dst, src) in row_mt.iter_mut().zip(erow.iter()) {
                *dst += w * src;
            }
        }
        let denom = mp.dpt_dmdot * s_rho_p;
        for v in row_mt.iter_mut() {
            *v /= denom;
        }

        // high-side pressure and compressor flow rows follow from the
        // turbine-flow and rotor rows
        let row_nc = a.row(lay.i_n_c()).to_vec();
        {
            let row = a.row_mut(lay.i_p_high());
            for (dst, &src) in row.iter_mut().zip(row_mt.iter()) {
                *dst = -mp.dpt_dmdot * src;
            }
        }
        {
            let row = a.row_mut(lay.i_mdot_c());
            for ((dst, &mt), &nc) in row.iter_mut().zip(row_mt.iter()).zip(row_nc.iter()) {
                *dst = -(mp.dpc_dn * nc + mp.dpt_dmdot * mt) / mp.dpc_dmdot;
            }
            b_torque[lay.i_mdot_c()] =
                -mp.dpc_dn * b_torque[lay.i_n_c()] / mp.dpc_dmdot;
        }
        a.row_mut(lay.i_mdot_t()).copy_from_slice(&row_mt);

        // oil pump rows
        let w_n = cfg.pump_natural_freq;
        a.row_mut(lay.i_mdot_oil())[lay.i_mdot_oil_rate()] = 1.0;
        {
            let row = a.row_mut(lay.i_mdot_oil_rate());
            row[lay.i_mdot_oil()] = -w_n * w_n;
            row[lay.i_mdot_oil_rate()] = -2.0 * cfg.pump_damping * w_n;
        }
        b.row_mut(lay.i_mdot_oil_rate())[1] = w_n * w_n;

        // tracked outputs
        let dt_step = FD_REL_STEP * SCALE_T;
        let (dwt_dm, os3) =
            central_diff(|s| self.turbine_power(x0.mdot_t + s, t_in_t), dm)?;
        let (dwt_dt, os4) =
            central_diff(|s| self.turbine_power(x0.mdot_t, t_in_t + s), dt_step)?;
        let wdot_c = |m: f64, nc: f64| self.compressor_point(m, nc).map(|ev| ev.wdot);
        let (dwc_dm, os5) = central_diff(|s| wdot_c(x0.mdot_c + s, x0.n_c), dm)?;
        let (dwc_dn, os6) = central_diff(|s| wdot_c(x0.mdot_c, x0.n_c + s), dn)?;
        one_sided |= os3 || os4 || os5 || os6;

        let i_last = lay.i_e_co2(lay.n_high() - 1);
        let pp_last = &pp_co2[lay.n_high() - 1];
        let mut c_z = Matrix::zeros(2, n);
        {
            let row = c_z.row_mut(0);
            row[i_last] += dwt_dt * pp_last.dt_de;
            row[lay.i_p_high()] += dwt_dt * pp_last.dt_dp;
            row[lay.i_mdot_t()] = dwt_dm;
            row[lay.i_mdot_c()] = -dwc_dm;
            row[lay.i_n_c()] = -dwc_dn;
        }
        {
            let row = c_z.row_mut(1);
            row[i_last] = pp_last.dt_de;
            row[lay.i_p_high()] = pp_last.dt_dp;
        }

        // measured outputs
        let mut c_y = Matrix::zeros(4, n);
        let hx_in = lay.n_pipe;
        let hx_out = lay.n_pipe + lay.n_hx - 1;
        c_y.row_mut(0)[lay.i_e_co2(hx_in)] = pp_co2[hx_in].dt_de;
        c_y.row_mut(0)[lay.i_p_high()] = pp_co2[hx_in].dt_dp;
        c_y.row_mut(1)[lay.i_e_co2(hx_out)] = pp_co2[hx_out].dt_de;
        c_y.row_mut(1)[lay.i_p_high()] = pp_co2[hx_out].dt_dp;
        c_y.row_mut(2)[lay.i_e_oil(0)] = pp_oil[0].dt_de;
        c_y.row_mut(3)[lay.i_e_oil(lay.n_hx - 1)] = pp_oil[lay.n_hx - 1].dt_de;

        let (wnet, tin) = self.eval_outputs(x0)?;
        let g0_y = self.eval_measurements(x0)?;

        Ok(LinearModel {
            a,
            b,
            b_torque,
            c_z,
            c_y,
            f0,
            g0: [wnet, tin],
            g0_y,
            x0: x0.clone(),
            u0: *u0,
            one_sided,
        })
    }
}
