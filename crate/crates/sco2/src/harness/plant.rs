//! Truth plant: the full compressible high-side stream (suction reservoir →
//! compressor → inlet pipe → exchanger hot side → outlet pipe → turbine →
//! exhaust reservoir) coupled to the conductive wall, the incompressible
//! oil loop, the compressor rotor, and the oil pump's closed-loop dynamics.
//!
//! The high side is one uniform-grid stream; the pipe sections are the
//! first and last `n_pipe` cells (no wall exchange), the middle `n_hx`
//! cells exchange heat with the wall. The motor torque ramps linearly at
//! the commanded rate between control updates; the oil reference is held.

use crate::error::SimError;
use crate::gasdyn::{
    compressor_interface_flux, heat_transfer_coefficient, nusselt_hot, step_compressible,
    step_incompressible, step_wall, turbine_interface_flux, wall_heat_rate, CompressibleStream,
    IncompressibleStream, OilBoundary, PcheGeometry, StreamBc, WallGrid, NU_OIL,
};
use crate::maps::{rotor_step, CompressorMap, TurbineMap};
use crate::props::{FluidProps, ThermoState};
use crate::reduced::ReducedState;

/// Plant geometry and boundary conditions.
#[derive(Debug, Clone)]
pub struct PlantConfig {
    pub pche: PcheGeometry,
    pub n_pipe: usize,
    pub p_in_stag: f64,
    pub t_in_stag: f64,
    pub p_out_stag: f64,
    pub p_oil: f64,
    pub t_oil_in: f64,
    pub pump_natural_freq: f64,
    pub pump_damping: f64,
    /// Fraction of the admissible CFL step taken by the inner integrator.
    pub cfl_target: f64,
}

impl PlantConfig {
    pub fn n_high(&self) -> usize {
        2 * self.n_pipe + self.pche.n_cells
    }
}

/// Diagnostics aggregated over the substeps of one outer interval.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlantDiagnostics {
    pub max_mach: f64,
    pub max_cfl: f64,
    pub inner_steps: usize,
    /// Smallest inner step taken, s.
    pub min_dt: f64,
}

/// Tracked and measured quantities at the current plant state.
#[derive(Debug, Clone, Copy)]
pub struct PlantOutputs {
    /// Net shaft power, W.
    pub w_net: f64,
    /// Turbine inlet temperature, K.
    pub t_in_t: f64,
    /// Exchanger CO2 in/out and oil in/out temperatures, K.
    pub y: [f64; 4],
    pub mdot_c: f64,
    pub mdot_t: f64,
    pub p_high: f64,
    pub wdot_turbine: f64,
    pub wdot_compressor: f64,
}

pub struct TruthPlant<'a> {
    pub cfg: PlantConfig,
    pub comp: &'a CompressorMap,
    pub turb: &'a TurbineMap,
    pub co2: &'a dyn FluidProps,
    pub oil_props: &'a dyn FluidProps,
    pub hot: CompressibleStream,
    pub oil: IncompressibleStream,
    pub wall: WallGrid,
    pub n_c: f64,
    pub torque: f64,
    /// Torque slew applied between updates (first-order hold).
    pub torque_rate: f64,
    pub mdot_oil_ref: f64,
    pub mdot_oil: f64,
    pub mdot_oil_rate: f64,
    pub time: f64,
    suction: ThermoState,
}

impl<'a> TruthPlant<'a> {
    /// Plant initialized with uniform profiles at the compressor discharge
    /// state for the given speed, matched flows, and the wall and oil at
    /// the oil inlet temperature.
    pub fn new(
        cfg: PlantConfig,
        comp: &'a CompressorMap,
        turb: &'a TurbineMap,
        co2: &'a dyn FluidProps,
        oil_props: &'a dyn FluidProps,
        n_c0: f64,
        mdot0: f64,
        mdot_oil0: f64,
        torque0: f64,
    ) -> Result<Self, SimError> {
        let suction = co2.state_from_pt(cfg.p_in_stag, cfg.t_in_stag)?;
        let ev = crate::maps::compressor_eval_forward(
            comp,
            co2,
            cfg.p_in_stag,
            cfg.t_in_stag,
            mdot0,
            n_c0,
        )?;
        let area = cfg.pche.flow_area();
        let n_high = cfg.n_high();
        let length = n_high as f64 * cfg.pche.length / cfg.pche.n_cells as f64;
        let d_h = cfg.pche.hydraulic_diameter();
        let v0 = mdot0 / (ev.state_out.rho * area);
        let mut hot = CompressibleStream::uniform(
            n_high,
            length,
            area,
            d_h,
            cfg.pche.n_chans,
            cfg.pche.roughness,
            &ev.state_out,
            v0,
        );
        // friction-consistent initial pressure profile: a uniform pressure
        // would launch a compression wave into the compressor and trip the
        // surge limit within a few steps
        {
            let dx = hot.dx;
            let mut p = ev.p_out;
            for i in 0..n_high {
                let st = co2.state_from_pt(p, ev.state_out.t)?;
                let v = mdot0 / (st.rho * area);
                let re = st.rho * v * d_h / st.mu;
                let fr = crate::gasdyn::friction_factor(re, cfg.pche.roughness / d_h);
                hot.rho[i] = st.rho;
                hot.mom[i] = st.rho * v;
                hot.et[i] = st.rho * (st.e + 0.5 * v * v);
                hot.hint_p[i] = st.p;
                hot.hint_t[i] = st.t;
                p -= fr * st.rho * v * v / (2.0 * d_h) * dx;
                if p <= cfg.p_out_stag {
                    return Err(SimError::InvalidState {
                        cell: i,
                        context: format!(
                            "initial flow {mdot0} kg/s cannot be carried: \
                             friction drives the pressure below the exhaust"
                        ),
                    });
                }
            }
        }
        let oil_rho = oil_props.state_from_pt(cfg.p_oil, cfg.t_oil_in)?.rho;
        let oil = IncompressibleStream::uniform(
            cfg.pche.n_cells,
            cfg.pche.length,
            area,
            cfg.pche.hydraulic_diameter(),
            cfg.pche.n_chans,
            cfg.pche.roughness,
            cfg.t_oil_in,
            mdot_oil0 / (oil_rho * area),
            cfg.p_oil,
        );
        let wall = cfg.pche.wall_grid(cfg.t_oil_in);
        let torque = if torque0 < 0.0 { ev.wdot / n_c0 } else { torque0 };
        Ok(TruthPlant {
            cfg,
            comp,
            turb,
            co2,
            oil_props,
            hot,
            oil,
            wall,
            n_c: n_c0,
            torque,
            torque_rate: 0.0,
            mdot_oil_ref: mdot_oil0,
            mdot_oil: mdot_oil0,
            mdot_oil_rate: 0.0,
            time: 0.0,
            suction,
        })
    }

    /// Wall heat rates per unit length over the full high-side grid (zero
    /// in the pipe sections) and the matching oil-side rates.
    fn heat_rates(
        &mut self,
        hot_cells: &[(ThermoState, f64)],
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>), SimError> {
        let n_hx = self.cfg.pche.n_cells;
        let n_pipe = self.cfg.n_pipe;
        let perim = self.cfg.pche.channel_perimeter();
        let d_h = self.cfg.pche.hydraulic_diameter();

        let mut q_wall_hot = vec![0.0; n_hx]; // into wall
        let mut q_wall_cold = vec![0.0; n_hx];
        let mut q_hot_fluid = vec![0.0; self.cfg.n_high()];
        let mut q_cold_fluid = vec![0.0; n_hx];
        for w in 0..n_hx {
            let (st, v) = &hot_cells[n_pipe + w];
            let re = st.rho * v.abs() * d_h / st.mu;
            let pr = st.cp * st.mu / st.k;
            let u_h = heat_transfer_coefficient(nusselt_hot(re, pr), st.k, d_h);
            q_wall_hot[w] =
                wall_heat_rate(self.cfg.pche.n_chans, u_h, perim, st.t, self.wall.t_w[w]);
            q_hot_fluid[n_pipe + w] = -q_wall_hot[w];

            let j = n_hx - 1 - w;
            let stc = self
                .oil_props
                .state_from_pt(self.oil.p[j].max(1.0e5), self.oil.t[j])?;
            let u_c = heat_transfer_coefficient(NU_OIL, stc.k, d_h);
            q_wall_cold[w] =
                wall_heat_rate(self.cfg.pche.n_chans, u_c, perim, stc.t, self.wall.t_w[w]);
            q_cold_fluid[j] = -q_wall_cold[w];
        }
        Ok((q_wall_hot, q_wall_cold, q_hot_fluid, q_cold_fluid))
    }

    fn diverged(&self, context: String) -> SimError {
        SimError::Diverged {
            t: self.time,
            context,
        }
    }

    /// One inner step of at most `dt_cap`, returning the step actually
    /// taken and its report data.
    fn inner_step(&mut self, dt_cap: f64) -> Result<(f64, f64, f64), SimError> {
        let hot_cells = self.hot.decode(self.co2)?;
        let max_speed = hot_cells
            .iter()
            .map(|(st, v)| v.abs() + st.a)
            .fold(0.0f64, f64::max);
        let dt = dt_cap.min(self.cfg.cfl_target * self.hot.dx / max_speed);

        let (q_wall_hot, q_wall_cold, q_hot_fluid, q_cold_fluid) =
            self.heat_rates(&hot_cells)?;

        let area = self.hot.area;
        let comp_flux = compressor_interface_flux(
            self.comp,
            self.co2,
            &self.suction,
            &hot_cells[0].0,
            self.n_c,
            area,
            area,
        )
        .map_err(|e| self.diverged(format!("compressor interface: {e}")))?;
        let last = &hot_cells[hot_cells.len() - 1].0;
        let exhaust = self.co2.state_from_pt(self.cfg.p_out_stag, last.t)?;
        let turb_flux = turbine_interface_flux(
            self.turb,
            self.co2,
            last,
            &exhaust,
            self.turb.sync_speed,
            area,
            area,
        )
        .map_err(|e| self.diverged(format!("turbine interface: {e}")))?;

        let report = step_compressible(
            &mut self.hot,
            self.co2,
            &StreamBc::PrescribedFlux(comp_flux.f_r),
            &StreamBc::PrescribedFlux(turb_flux.f_l),
            Some(&q_hot_fluid),
            dt,
        )?;
        step_incompressible(
            &mut self.oil,
            self.oil_props,
            &OilBoundary {
                mdot_in: self.mdot_oil,
                t_in: self.cfg.t_oil_in,
                p_out: self.cfg.p_oil,
            },
            Some(&q_cold_fluid),
            dt,
        )?;
        step_wall(&mut self.wall, &q_wall_hot, &q_wall_cold, dt);

        // rotor: map wdot is extraction (negative for the compressor)
        let wdot_c = -comp_flux.wdot;
        self.n_c = rotor_step(self.comp.inertia, self.n_c, self.torque, wdot_c, dt)
            .map_err(|e| self.diverged(format!("rotor: {e}")))?;

        // oil pump closed loop, second order (midpoint step)
        let w_n = self.cfg.pump_natural_freq;
        let zeta = self.cfg.pump_damping;
        let acc = |m: f64, r: f64| w_n * w_n * (self.mdot_oil_ref - m) - 2.0 * zeta * w_n * r;
        let a1 = acc(self.mdot_oil, self.mdot_oil_rate);
        let m_half = self.mdot_oil + 0.5 * dt * self.mdot_oil_rate;
        let r_half = self.mdot_oil_rate + 0.5 * dt * a1;
        let a2 = acc(m_half, r_half);
        self.mdot_oil += dt * r_half;
        self.mdot_oil_rate += dt * a2;

        self.torque += self.torque_rate * dt;
        self.time += dt;
        Ok((dt, report.max_mach, report.max_cfl))
    }

    /// Advances the plant by exactly `dt_outer` with CFL-limited substeps.
    pub fn step(&mut self, dt_outer: f64) -> Result<PlantDiagnostics, SimError> {
        let t_end = self.time + dt_outer;
        let mut diag = PlantDiagnostics {
            min_dt: f64::INFINITY,
            ..PlantDiagnostics::default()
        };
        while self.time < t_end - 1e-12 {
            let (dt, mach, cfl) = self.inner_step(t_end - self.time)?;
            diag.max_mach = diag.max_mach.max(mach);
            diag.max_cfl = diag.max_cfl.max(cfl);
            diag.min_dt = diag.min_dt.min(dt);
            diag.inner_steps += 1;
        }
        self.time = t_end;
        Ok(diag)
    }

    /// Tracked and measured outputs at the current state.
    pub fn outputs(&mut self) -> Result<PlantOutputs, SimError> {
        let hot_cells = self.hot.decode(self.co2)?;
        let n_pipe = self.cfg.n_pipe;
        let n_hx = self.cfg.pche.n_cells;

        let comp_flux = compressor_interface_flux(
            self.comp,
            self.co2,
            &self.suction,
            &hot_cells[0].0,
            self.n_c,
            self.hot.area,
            self.hot.area,
        )
        .map_err(|e| self.diverged(format!("compressor interface: {e}")))?;
        let last = &hot_cells[hot_cells.len() - 1].0;
        let exhaust = self.co2.state_from_pt(self.cfg.p_out_stag, last.t)?;
        let turb_flux = turbine_interface_flux(
            self.turb,
            self.co2,
            last,
            &exhaust,
            self.turb.sync_speed,
            self.hot.area,
            self.hot.area,
        )
        .map_err(|e| self.diverged(format!("turbine interface: {e}")))?;

        let wdot_c = -comp_flux.wdot;
        Ok(PlantOutputs {
            w_net: turb_flux.wdot - wdot_c,
            t_in_t: last.t,
            y: [
                hot_cells[n_pipe].0.t,
                hot_cells[n_pipe + n_hx - 1].0.t,
                self.oil.t[0],
                self.oil.t[n_hx - 1],
            ],
            mdot_c: comp_flux.mdot,
            mdot_t: turb_flux.mdot,
            p_high: hot_cells[0].0.p,
            wdot_turbine: turb_flux.wdot,
            wdot_compressor: wdot_c,
        })
    }

    /// Projection onto the reduced model's state (measured flows/speeds
    /// plus per-cell energies from the truth profiles).
    pub fn reduced_projection(&mut self) -> Result<ReducedState, SimError> {
        let hot_cells = self.hot.decode(self.co2)?;
        let out = self.outputs()?;
        let e_co2: Vec<f64> = hot_cells.iter().map(|(st, _)| st.e).collect();
        let e_oil: Vec<f64> = self
            .oil
            .t
            .iter()
            .map(|&t| Ok(self.oil_props.state_from_pt(self.cfg.p_oil, t)?.e))
            .collect::<Result<_, SimError>>()?;
        Ok(ReducedState {
            t_wall: self.wall.t_w.clone(),
            e_co2,
            p_high: out.p_high,
            mdot_c: out.mdot_c,
            mdot_t: out.mdot_t,
            n_c: self.n_c,
            e_oil,
            mdot_oil: self.mdot_oil,
            mdot_oil_rate: self.mdot_oil_rate,
        })
    }

    /// Conserved-state snapshot used for convergence and fixed-point
    /// checks: all hot conserved variables, oil temperatures, wall
    /// temperatures, shaft speed, pump states.
    pub fn snapshot(&self) -> Vec<f64> {
        let mut v = Vec::new();
        v.extend_from_slice(&self.hot.rho);
        v.extend_from_slice(&self.hot.mom);
        v.extend_from_slice(&self.hot.et);
        v.extend_from_slice(&self.oil.t);
        v.extend_from_slice(&self.wall.t_w);
        v.push(self.n_c);
        v.push(self.mdot_oil);
        v.push(self.mdot_oil_rate);
        v
    }
}
