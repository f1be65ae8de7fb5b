//! Turbomachinery coupling: a machine sits between two compressible flow
//! cells and replaces the interface flux on both sides. The map model
//! resolves mass flow and outlet state from (p_in, T_in, p_out, N_s); the
//! pair of fluxes then carries the momentum and energy discontinuities the
//! machine imposes. Both fluxes are normalized by the adjacent stream flow
//! areas, so the coupled cells see exactly the same mass flow.

use crate::error::MapError;
use crate::maps::{
    compressor_eval_from_pr, turbine_eval, CompressorMap, TurbineMap,
};
use crate::props::{FluidProps, ThermoState};

/// Interface fluxes for the two coupled cells, per unit area of the
/// respective stream.
#[derive(Debug, Clone, Copy)]
pub struct TurboFlux {
    /// Flux leaving the left (inlet-side) cell.
    pub f_l: [f64; 3],
    /// Flux entering the right (outlet-side) cell.
    pub f_r: [f64; 3],
    pub mdot: f64,
    /// Shaft power extracted from the gas, W (negative for a compressor).
    pub wdot: f64,
    pub t_out: f64,
    pub state_out: ThermoState,
}

fn assemble_flux(
    state_in: &ThermoState,
    state_out: &ThermoState,
    mdot: f64,
    wdot_extracted: f64,
    port_area_in: f64,
    port_area_out: f64,
    stream_area_l: f64,
    stream_area_r: f64,
) -> TurboFlux {
    let v_in = mdot / (state_in.rho * port_area_in);
    let v_out = mdot / (state_out.rho * port_area_out);
    let h_total_in = state_in.h + 0.5 * v_in * v_in;
    // mdot·H_in − Ẇ = mdot·H_out when Ẇ includes the kinetic terms, so the
    // right-side energy flux carries the machine outlet total enthalpy
    let f_l = [
        mdot / stream_area_l,
        mdot * v_in / stream_area_l + state_in.p,
        mdot * h_total_in / stream_area_l,
    ];
    let f_r = [
        mdot / stream_area_r,
        mdot * v_out / stream_area_r + state_out.p,
        (mdot * h_total_in - wdot_extracted) / stream_area_r,
    ];
    TurboFlux {
        f_l,
        f_r,
        mdot,
        wdot: wdot_extracted,
        t_out: state_out.t,
        state_out: *state_out,
    }
}

/// Interface flux pair for a turbine between `left` (inlet) and `right`
/// (outlet) cells. `stream_area_l/r` are the flow areas of the adjacent
/// streams.
pub fn turbine_interface_flux(
    map: &TurbineMap,
    fluid: &dyn FluidProps,
    left: &ThermoState,
    right: &ThermoState,
    n_s: f64,
    stream_area_l: f64,
    stream_area_r: f64,
) -> Result<TurboFlux, MapError> {
    let ev = turbine_eval(map, fluid, left.p, right.p, left.t, n_s)?;
    let state_in = fluid.state_from_pt(left.p, left.t)?;
    Ok(assemble_flux(
        &state_in,
        &ev.state_out,
        ev.mdot,
        ev.wdot,
        map.area_in,
        map.area_out,
        stream_area_l,
        stream_area_r,
    ))
}

/// Interface flux pair for a compressor between `left` (suction) and
/// `right` (discharge) cells; the map is inverted for the mass flow that
/// meets the discharge pressure at the current shaft speed.
pub fn compressor_interface_flux(
    map: &CompressorMap,
    fluid: &dyn FluidProps,
    left: &ThermoState,
    right: &ThermoState,
    n_s: f64,
    stream_area_l: f64,
    stream_area_r: f64,
) -> Result<TurboFlux, MapError> {
    let ev = compressor_eval_from_pr(map, fluid, left.p, right.p, left.t, n_s)?;
    let state_in = fluid.state_from_pt(left.p, left.t)?;
    // map wdot is power absorbed; the gas sees it as negative extraction
    Ok(assemble_flux(
        &state_in,
        &ev.state_out,
        ev.mdot,
        -ev.wdot,
        map.area_in,
        map.area_out,
        stream_area_l,
        stream_area_r,
    ))
}
