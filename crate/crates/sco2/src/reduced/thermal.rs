//! Thermal submodel for state estimation: wall temperatures and stream
//! internal energies, with the flow-path quantities (high-side pressure,
//! mass flows, compressor speed) supplied as known inputs from direct
//! measurements. The rows reproduce the wall and energy rows of the full
//! model exactly; the flow columns simply become input channels.

use crate::error::SimError;
use crate::numerics::Matrix;

use super::model::ReducedModel;
use super::state::ReducedState;

/// Directly measured quantities the thermal submodel takes as inputs.
#[derive(Debug, Clone, Copy)]
pub struct ThermalInputs {
    pub p_high: f64,
    pub mdot_c: f64,
    pub n_c: f64,
    pub mdot_oil: f64,
}

/// Affine model of the thermal states around a point:
/// dx/dt = A(x − x0) + f0, y = C_y(x − x0) + y0, with the state ordered
/// as [T_wall, e_CO2, e_oil].
#[derive(Debug, Clone)]
pub struct ThermalLinearization {
    pub a: Matrix,
    pub f0: Vec<f64>,
    pub c_y: Matrix,
    pub y0: [f64; 4],
    pub x0: Vec<f64>,
}

impl ReducedModel<'_> {
    /// Thermal coordinates [T_wall, e_CO2, e_oil] of a full state.
    pub fn thermal_state(&self, x: &ReducedState) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.layout.n_thermal());
        v.extend_from_slice(&x.t_wall);
        v.extend_from_slice(&x.e_co2);
        v.extend_from_slice(&x.e_oil);
        v
    }

    /// Full state with thermal coordinates from `x_t` and measured
    /// quantities from `u`. The turbine flow is set to the compressor flow
    /// and the pump rate to zero; neither enters the thermal rows.
    pub fn assemble_thermal(&self, x_t: &[f64], u: &ThermalInputs) -> ReducedState {
        let lay = self.layout;
        debug_assert_eq!(x_t.len(), lay.n_thermal());
        ReducedState {
            t_wall: x_t[..lay.n_hx].to_vec(),
            e_co2: x_t[lay.n_hx..lay.n_hx + lay.n_high()].to_vec(),
            p_high: u.p_high,
            mdot_c: u.mdot_c,
            mdot_t: u.mdot_c,
            n_c: u.n_c,
            e_oil: x_t[lay.n_hx + lay.n_high()..].to_vec(),
            mdot_oil: u.mdot_oil,
            mdot_oil_rate: 0.0,
        }
    }

    /// Wall and energy rows linearized in thermal coordinates. Exchange
    /// conductances and upstream boundary enthalpies are frozen at the
    /// point, as in the full linearization.
    pub fn linearize_thermal(
        &self,
        x: &ReducedState,
    ) -> Result<ThermalLinearization, SimError> {
        let lay = self.layout;
        let cfg = &self.cfg;
        let n_hx = lay.n_hx;
        let n_high = lay.n_high();
        let nt = lay.n_thermal();

        let co2 = self.decode_co2(x)?;
        let oil = self.decode_oil(x)?;
        let pp_co2 = self.co2_partials(x)?;
        let pp_oil = self.oil_partials(x)?;
        let comp_ev = self.compressor_point(x.mdot_c, x.n_c)?;
        let (q_hot, q_cold) = self.wall_heat_rates(x, &co2, &oil);

        let ch: Vec<f64> = (0..n_hx)
            .map(|w| self.hot_exchange_coeff(&co2[lay.n_pipe + w], x.mdot_c))
            .collect();
        let cc: Vec<f64> = (0..n_hx)
            .map(|w| self.cold_exchange_coeff(&oil[lay.wall_of_oil(w)]))
            .collect();

        let mut a = Matrix::zeros(nt, nt);
        let mut f0 = vec![0.0; nt];

        // wall rows
        let c_wall = cfg.pche.wall_area() * cfg.pche.rho_w * cfg.pche.cp_w;
        for w in 0..n_hx {
            f0[w] = (q_hot[w] + q_cold[w]) / c_wall;
            let j = lay.wall_of_oil(w);
            let row = a.row_mut(w);
            row[w] = -(ch[w] + cc[w]) / c_wall;
            row[n_hx + lay.n_pipe + w] = ch[w] * pp_co2[lay.n_pipe + w].dt_de / c_wall;
            row[n_hx + n_high + j] = cc[w] * pp_oil[j].dt_de / c_wall;
        }

        // CO2 energy rows
        for i in 0..n_high {
            let (area, dxl, wall) = self.cell_geometry(i);
            let inv_cap = 1.0 / (co2[i].rho * area);
            let h_up = if i == 0 {
                comp_ev.state_out.h
            } else {
                co2[i - 1].h
            };
            let q = wall.map(|w| q_hot[w]).unwrap_or(0.0);
            let ri = n_hx + i;
            f0[ri] =
                (x.mdot_c * (h_up - co2[i].h) / dxl - q) / (co2[i].rho * area);
            if i > 0 {
                a.row_mut(ri)[ri - 1] =
                    x.mdot_c * pp_co2[i - 1].dh_de / dxl * inv_cap;
            }
            let mut d_own = -x.mdot_c * pp_co2[i].dh_de / dxl * inv_cap;
            if let Some(w) = wall {
                d_own -= ch[w] * pp_co2[i].dt_de * inv_cap;
                a.row_mut(ri)[w] = ch[w] * inv_cap;
            }
            d_own -= pp_co2[i].drho_de / co2[i].rho * f0[ri];
            a.row_mut(ri)[ri] = d_own;
        }

        // oil energy rows, counter-flow
        let h_oil_in = self.oil.state_from_pt(cfg.p_oil, cfg.t_oil_in)?.h;
        let oil_area = cfg.pche.flow_area();
        let oil_dx = cfg.pche.length / n_hx as f64;
        for j in 0..n_hx {
            let w = lay.wall_of_oil(j);
            let inv_cap = 1.0 / (oil[j].rho * oil_area);
            let h_up = if j == 0 { h_oil_in } else { oil[j - 1].h };
            let rj = n_hx + n_high + j;
            f0[rj] = (x.mdot_oil * (h_up - oil[j].h) / oil_dx - q_cold[w])
                / (oil[j].rho * oil_area);
            if j > 0 {
                a.row_mut(rj)[rj - 1] =
                    x.mdot_oil * pp_oil[j - 1].dh_de / oil_dx * inv_cap;
            }
            a.row_mut(rj)[rj] = -x.mdot_oil * pp_oil[j].dh_de / oil_dx * inv_cap
                - cc[w] * pp_oil[j].dt_de * inv_cap
                - pp_oil[j].drho_de / oil[j].rho * f0[rj];
            a.row_mut(rj)[w] = cc[w] * inv_cap;
        }

        // measured temperatures: stream inlet/outlet cells of the HX
        let mut c_y = Matrix::zeros(4, nt);
        c_y.row_mut(0)[n_hx + lay.n_pipe] = pp_co2[lay.n_pipe].dt_de;
        c_y.row_mut(1)[n_hx + lay.n_pipe + n_hx - 1] =
            pp_co2[lay.n_pipe + n_hx - 1].dt_de;
        c_y.row_mut(2)[n_hx + n_high] = pp_oil[0].dt_de;
        c_y.row_mut(3)[n_hx + n_high + n_hx - 1] = pp_oil[n_hx - 1].dt_de;
        let y0 = self.eval_measurements(x)?;

        Ok(ThermalLinearization {
            a,
            f0,
            c_y,
            y0,
            x0: self.thermal_state(x),
        })
    }
}
