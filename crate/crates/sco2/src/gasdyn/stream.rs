//! Quasi-1D compressible finite-volume stream: conserved state, reservoir
//! boundary conditions, and the Cash-Karp time step.
//!
//! Conserved variables per cell are volumetric (ρ, ρv, ρE); the flow area is
//! constant along a stream, so it cancels from the divergence terms and
//! reappears only in the source-term bookkeeping.

use crate::error::SimError;
use crate::props::{FluidProps, ThermoState};

use super::flux::{ausmdv_flux, FaceState};
use super::friction::friction_factor;

/// A compressible quasi-1D stream. `n_chans` parallel identical channels are
/// represented by one; `area` is the *total* flow area of all channels, while
/// friction and heat transfer use the per-channel hydraulic diameter `d_h`.
#[derive(Debug, Clone)]
pub struct CompressibleStream {
    pub n_cells: usize,
    pub dx: f64,
    /// Total flow area, m².
    pub area: f64,
    /// Per-channel hydraulic diameter, m. `f64::INFINITY` disables friction.
    pub d_h: f64,
    pub n_chans: f64,
    /// Absolute wall roughness, m.
    pub roughness: f64,
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
    /// ρE with E = e + v²/2.
    pub et: Vec<f64>,
    /// Per-cell (p, T) warm-start hints for the EOS inversion.
    pub hint_p: Vec<f64>,
    pub hint_t: Vec<f64>,
}

impl CompressibleStream {
    /// Uniform stream initialized from a single state and velocity.
    pub fn uniform(
        n_cells: usize,
        length: f64,
        area: f64,
        d_h: f64,
        n_chans: f64,
        roughness: f64,
        st: &ThermoState,
        v: f64,
    ) -> Self {
        assert!(n_cells >= 2 && length > 0.0 && area > 0.0 && d_h > 0.0 && n_chans >= 1.0);
        CompressibleStream {
            n_cells,
            dx: length / n_cells as f64,
            area,
            d_h,
            n_chans,
            roughness,
            rho: vec![st.rho; n_cells],
            mom: vec![st.rho * v; n_cells],
            et: vec![st.rho * (st.e + 0.5 * v * v); n_cells],
            hint_p: vec![st.p; n_cells],
            hint_t: vec![st.t; n_cells],
        }
    }

    /// Per-cell thermodynamic states and velocities from the conserved
    /// variables, refreshing the warm-start hints.
    pub fn decode(
        &mut self,
        fluid: &dyn FluidProps,
    ) -> Result<Vec<(ThermoState, f64)>, SimError> {
        decode_conserved(
            fluid,
            &self.rho,
            &self.mom,
            &self.et,
            &mut self.hint_p,
            &mut self.hint_t,
        )
    }

    pub fn total_mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.area * self.dx
    }

    pub fn total_energy(&self) -> f64 {
        self.et.iter().sum::<f64>() * self.area * self.dx
    }
}

fn decode_conserved(
    fluid: &dyn FluidProps,
    rho: &[f64],
    mom: &[f64],
    et: &[f64],
    hint_p: &mut [f64],
    hint_t: &mut [f64],
) -> Result<Vec<(ThermoState, f64)>, SimError> {
    let mut out = Vec::with_capacity(rho.len());
    for i in 0..rho.len() {
        if !(rho[i] > 0.0 && rho[i].is_finite() && et[i].is_finite() && mom[i].is_finite()) {
            return Err(SimError::InvalidState {
                cell: i,
                context: format!("rho = {:.4e}, rho*E = {:.4e}", rho[i], et[i]),
            });
        }
        let v = mom[i] / rho[i];
        let e = et[i] / rho[i] - 0.5 * v * v;
        let st = fluid
            .state_from_rho_e(rho[i], e, Some((hint_p[i], hint_t[i])))
            .map_err(|err| SimError::InvalidState {
                cell: i,
                context: err.to_string(),
            })?;
        hint_p[i] = st.p;
        hint_t[i] = st.t;
        out.push((st, v));
    }
    Ok(out)
}

/// Boundary treatment at one end of a stream.
#[derive(Debug, Clone)]
pub enum StreamBc {
    /// Gas accelerates isentropically out of a stagnation reservoir.
    InflowReservoir { p_stag: f64, t_stag: f64 },
    /// Discharge into a reservoir at fixed pressure; kinetic energy is lost.
    OutflowReservoir { p_stag: f64 },
    /// Solid wall: mirrored ghost, zero mass/energy flux by construction.
    Reflective,
    /// Ghost copies the adjacent interior cell.
    ZeroGradient,
    /// Face flux (mass, momentum, energy per unit area) imposed directly;
    /// used at turbomachinery interfaces.
    PrescribedFlux([f64; 3]),
}

/// Ghost state for a reservoir inflow: velocity continues from the first
/// interior cell and the state sits on the reservoir isentrope with
/// h = h_stag − v²/2.
pub fn apply_inflow_bc(
    fluid: &dyn FluidProps,
    p_stag: f64,
    t_stag: f64,
    interior: &ThermoState,
    v0: f64,
) -> Result<(ThermoState, f64), SimError> {
    let stag = fluid.state_from_pt(p_stag, t_stag)?;
    let ghost = if 0.5 * v0 * v0 <= 1e-9 * stag.h.abs() {
        // kinetic defect below solver noise: the reservoir state itself
        stag
    } else {
        let h_target = stag.h - 0.5 * v0 * v0;
        // Newton on p along the isentrope (dh/dp|s = 1/ρ), seeded at the
        // reservoir pressure; h is monotone in p so the iteration walks
        // straight down to the target
        let p_min = fluid.region().p_min;
        let mut st = stag;
        let mut p = p_stag;
        let mut converged = false;
        for _ in 0..60 {
            let resid = st.h - h_target;
            if resid.abs() <= 1e-9 * h_target.abs().max(1.0) {
                converged = true;
                break;
            }
            p = (p - resid * st.rho).clamp(p_min, p_stag);
            st = fluid.isentropic_outlet(stag.s, p)?;
        }
        if !converged {
            return Err(SimError::Diverged {
                t: f64::NAN,
                context: format!(
                    "inflow ghost state not on reservoir isentrope: residual {:.3e} J/kg",
                    st.h - h_target
                ),
            });
        }
        st
    };
    let mach = v0.abs() / ghost.a;
    if mach >= 1.0 {
        return Err(SimError::SupersonicBoundary {
            side: "inflow",
            mach,
        });
    }
    let _ = interior; // interior state reserved for future non-isentropic models
    Ok((ghost, v0))
}

/// Ghost state for a reservoir outflow: reservoir pressure, outgoing fluid
/// temperature, zero-gradient velocity.
pub fn apply_outflow_bc(
    fluid: &dyn FluidProps,
    p_stag: f64,
    interior: &ThermoState,
    v_n: f64,
) -> Result<(ThermoState, f64), SimError> {
    let mach = v_n.abs() / interior.a;
    if mach >= 1.0 {
        return Err(SimError::SupersonicBoundary {
            side: "outflow",
            mach,
        });
    }
    let ghost = fluid.state_from_pt(p_stag, interior.t)?;
    Ok((ghost, v_n))
}

/// Diagnostics for one completed step. Boundary fluxes are the Runge-Kutta
/// weighted averages over the step (per unit area), so conservation
/// accounting closes to rounding error.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepReport {
    pub max_cfl: f64,
    /// Embedded 4th/5th-order error estimate, max over cells (volumetric
    /// conserved units). Logged only; the step size is fixed.
    pub embedded_error: f64,
    /// Flux through the inlet face (mass, momentum, energy), per unit area.
    pub flux_in: [f64; 3],
    /// Flux through the outlet face, per unit area.
    pub flux_out: [f64; 3],
    /// Total friction dissipation, W (energy-equation sink term).
    pub friction_heat: f64,
    /// Total wall heat added to the fluid, W.
    pub wall_heat: f64,
    pub max_mach: f64,
}

struct RhsEval {
    deriv: Vec<f64>,
    flux_in: [f64; 3],
    flux_out: [f64; 3],
    friction_heat: f64,
    max_speed: f64,
}

#[allow(clippy::too_many_arguments)]
fn eval_rhs(
    stream: &CompressibleStream,
    fluid: &dyn FluidProps,
    bc_in: &StreamBc,
    bc_out: &StreamBc,
    q_wall: Option<&[f64]>,
    rho: &[f64],
    mom: &[f64],
    et: &[f64],
    hint_p: &mut [f64],
    hint_t: &mut [f64],
) -> Result<RhsEval, SimError> {
    let n = stream.n_cells;
    let cells = decode_conserved(fluid, rho, mom, et, hint_p, hint_t)?;
    let face = |st: &ThermoState, v: f64| FaceState {
        rho: st.rho,
        v,
        p: st.p,
        h: st.h,
        a: st.a,
    };

    let mut max_speed = 0.0f64;
    for (st, v) in &cells {
        max_speed = max_speed.max(v.abs() + st.a);
    }

    // n+1 face fluxes
    let mut fluxes = vec![[0.0; 3]; n + 1];
    for i in 1..n {
        let (sl, vl) = &cells[i - 1];
        let (sr, vr) = &cells[i];
        fluxes[i] = ausmdv_flux(&face(sl, *vl), &face(sr, *vr));
    }
    let boundary_flux = |bc: &StreamBc,
                         interior: &(ThermoState, f64),
                         ghost_is_left: bool|
     -> Result<[f64; 3], SimError> {
        let (st, v) = interior;
        let ghost = match bc {
            StreamBc::InflowReservoir { p_stag, t_stag } => {
                apply_inflow_bc(fluid, *p_stag, *t_stag, st, *v)?
            }
            StreamBc::OutflowReservoir { p_stag } => apply_outflow_bc(fluid, *p_stag, st, *v)?,
            StreamBc::Reflective => (*st, -*v),
            StreamBc::ZeroGradient => (*st, *v),
            StreamBc::PrescribedFlux(f) => return Ok(*f),
        };
        let gf = face(&ghost.0, ghost.1);
        let inf = face(st, *v);
        Ok(if ghost_is_left {
            ausmdv_flux(&gf, &inf)
        } else {
            ausmdv_flux(&inf, &gf)
        })
    };
    fluxes[0] = boundary_flux(bc_in, &cells[0], true)?;
    fluxes[n] = boundary_flux(bc_out, &cells[n - 1], false)?;

    let mut deriv = vec![0.0; 3 * n];
    let mut friction_heat = 0.0;
    for i in 0..n {
        let (st, v) = &cells[i];
        let d_rho = -(fluxes[i + 1][0] - fluxes[i][0]) / stream.dx;
        let mut d_mom = -(fluxes[i + 1][1] - fluxes[i][1]) / stream.dx;
        let mut d_et = -(fluxes[i + 1][2] - fluxes[i][2]) / stream.dx;
        if stream.d_h.is_finite() {
            let re = st.rho * v.abs() * stream.d_h / st.mu;
            let fr = friction_factor(re, stream.roughness / stream.d_h);
            let coef = fr * st.rho / (2.0 * stream.d_h);
            d_mom -= coef * v * v.abs();
            // v²|v| keeps the dissipation a sink for either flow direction
            let diss = coef * v * v * v.abs();
            d_et -= diss;
            friction_heat += diss * stream.area * stream.dx;
        }
        if let Some(q) = q_wall {
            d_et += q[i] / stream.area;
        }
        deriv[3 * i] = d_rho;
        deriv[3 * i + 1] = d_mom;
        deriv[3 * i + 2] = d_et;
    }

    Ok(RhsEval {
        deriv,
        flux_in: fluxes[0],
        flux_out: fluxes[n],
        friction_heat,
        max_speed,
    })
}

// Cash-Karp embedded RK4(5) tableau
const CK_A: [[f64; 5]; 5] = [
    [0.2, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [0.3, -0.9, 1.2, 0.0, 0.0],
    [-11.0 / 54.0, 2.5, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];
const CK_B5: [f64; 6] = [
    37.0 / 378.0,
    0.0,
    250.0 / 621.0,
    125.0 / 594.0,
    0.0,
    512.0 / 1771.0,
];
const CK_B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    0.25,
];

/// Advances the stream by one fixed step of embedded Cash-Karp RK4(5).
///
/// `q_wall` is the wall heat input per cell in W/m (positive heats the
/// fluid), held constant over the step. The step is rejected with a CFL
/// error if `dt` exceeds dx / max(|v| + a) at the initial state.
pub fn step_compressible(
    stream: &mut CompressibleStream,
    fluid: &dyn FluidProps,
    bc_in: &StreamBc,
    bc_out: &StreamBc,
    q_wall: Option<&[f64]>,
    dt: f64,
) -> Result<StepReport, SimError> {
    let n = stream.n_cells;
    if let Some(q) = q_wall {
        assert_eq!(q.len(), n, "wall heat array length mismatch");
    }

    let pack = |rho: &[f64], mom: &[f64], et: &[f64]| {
        let mut u = vec![0.0; 3 * n];
        for i in 0..n {
            u[3 * i] = rho[i];
            u[3 * i + 1] = mom[i];
            u[3 * i + 2] = et[i];
        }
        u
    };
    let u0 = pack(&stream.rho, &stream.mom, &stream.et);
    let mut hp = stream.hint_p.clone();
    let mut ht = stream.hint_t.clone();

    let stage = |u: &[f64], hp: &mut [f64], ht: &mut [f64]| -> Result<RhsEval, SimError> {
        let rho: Vec<f64> = (0..n).map(|i| u[3 * i]).collect();
        let mom: Vec<f64> = (0..n).map(|i| u[3 * i + 1]).collect();
        let et: Vec<f64> = (0..n).map(|i| u[3 * i + 2]).collect();
        eval_rhs(stream, fluid, bc_in, bc_out, q_wall, &rho, &mom, &et, hp, ht)
    };

    let k1 = stage(&u0, &mut hp, &mut ht)?;
    let admissible = stream.dx / k1.max_speed;
    if dt > admissible {
        return Err(SimError::CflViolation { dt, admissible });
    }

    let mut ks: Vec<Vec<f64>> = vec![k1.deriv.clone()];
    let mut stage_bounds = vec![(k1.flux_in, k1.flux_out, k1.friction_heat)];
    for s in 0..5 {
        let mut u = u0.clone();
        for (j, k) in ks.iter().enumerate() {
            let a = CK_A[s][j];
            if a != 0.0 {
                for i in 0..3 * n {
                    u[i] += dt * a * k[i];
                }
            }
        }
        let ev = stage(&u, &mut hp, &mut ht)?;
        stage_bounds.push((ev.flux_in, ev.flux_out, ev.friction_heat));
        ks.push(ev.deriv);
    }

    let mut embedded_error = 0.0f64;
    let mut u5 = u0.clone();
    for (j, k) in ks.iter().enumerate() {
        for i in 0..3 * n {
            u5[i] += dt * CK_B5[j] * k[i];
            embedded_error = embedded_error.max((dt * (CK_B5[j] - CK_B4[j]) * k[i]).abs());
        }
    }

    let mut flux_in = [0.0; 3];
    let mut flux_out = [0.0; 3];
    let mut friction_heat = 0.0;
    for (j, (fi, fo, fh)) in stage_bounds.iter().enumerate() {
        for c in 0..3 {
            flux_in[c] += CK_B5[j] * fi[c];
            flux_out[c] += CK_B5[j] * fo[c];
        }
        friction_heat += CK_B5[j] * fh;
    }
    let wall_heat = q_wall
        .map(|q| q.iter().sum::<f64>() * stream.dx)
        .unwrap_or(0.0);

    for i in 0..n {
        stream.rho[i] = u5[3 * i];
        stream.mom[i] = u5[3 * i + 1];
        stream.et[i] = u5[3 * i + 2];
    }
    stream.hint_p = hp;
    stream.hint_t = ht;
    // refresh hints against the accepted state and validate it
    let cells = stream.decode(fluid)?;
    let max_mach = cells
        .iter()
        .map(|(st, v)| v.abs() / st.a)
        .fold(0.0f64, f64::max);

    Ok(StepReport {
        max_cfl: dt / admissible,
        embedded_error,
        flux_in,
        flux_out,
        friction_heat,
        wall_heat,
        max_mach,
    })
}
