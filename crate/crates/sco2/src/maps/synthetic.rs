//! Synthetic map families bundled with the crate.
//!
//! The turbine flow grid follows an ellipse law normalized to the design
//! mass flow parameter; its efficiency curve is a parabola peaking at the
//! design velocity ratio. The compressor enthalpy-rise grid is a concave
//! quadratic per speedline (surge ridge at half the normalized speed), with
//! elliptic efficiency contours centered on the design point. The grids use
//! the same file schema as ingested experimental maps, so either can back a
//! simulation.

use crate::error::MapError;
use crate::numerics::{Bicubic, Cubic1};
use crate::props::FluidProps;

use super::compressor::{build_surge_tables, CompressorMap};
use super::turbine::TurbineMap;

#[derive(Debug, Clone)]
pub struct TurbineDesign {
    pub pr: f64,
    pub mfp: f64,
    pub t_in: f64,
    pub p_in: f64,
    pub mdot: f64,
    /// Synchronous shaft speed, rad/s.
    pub sync_speed: f64,
    pub vr_des: f64,
    pub eta_max: f64,
    pub area_in: f64,
    pub area_out: f64,
}

impl Default for TurbineDesign {
    fn default() -> Self {
        TurbineDesign {
            pr: 1.5,
            mfp: 3.2,
            t_in: 600.0,
            p_in: 12.0e6,
            mdot: 10.0,
            sync_speed: 40.0 * std::f64::consts::PI, // 1200 RPM
            vr_des: 0.7,
            eta_max: 0.89,
            area_in: 0.02,
            area_out: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompressorDesign {
    pub mdot: f64,
    pub dh: f64,
    pub eta_max: f64,
    /// Physical design shaft speed, rad/s.
    pub speed: f64,
    pub inertia: f64,
    pub p_std: f64,
    pub t_std: f64,
    /// Inlet used to build the surge lookup curves (typical operating inlet).
    pub ref_p_in: f64,
    pub ref_t_in: f64,
    pub area_in: f64,
    pub area_out: f64,
    /// Curvature of the efficiency contours; 0 gives a uniform-efficiency
    /// map (useful as an analytic test oracle).
    pub eta_contour: f64,
}

impl Default for CompressorDesign {
    fn default() -> Self {
        CompressorDesign {
            mdot: 10.0,
            dh: 25.41e3,
            eta_max: 0.67,
            speed: 2000.0,
            inertia: 0.7,
            p_std: 7.366e6,
            t_std: 304.1,
            ref_p_in: 8.629e6,
            ref_t_in: 320.0,
            area_in: 0.03,
            area_out: 0.02,
            eta_contour: 0.15,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Ellipse-law turbine map. The grid places the design point on a node, so
/// the interpolant reproduces (PR_des, N_des) -> MFP_des exactly.
pub fn synthetic_turbine_map(d: &TurbineDesign) -> Result<TurbineMap, MapError> {
    let pr_axis = linspace(1.0, 2.8, 37); // step 0.05, node at 1.5
    let n_axis = linspace(0.6, 1.4, 9); // step 0.1, node at 1.0
    let norm = (1.0 - d.pr.powi(-2)).sqrt();
    let mfp = |pr: f64, n: f64| {
        // mild speed droop; flow rises monotonically with PR
        d.mfp * (1.0 - pr.powi(-2)).max(0.0).sqrt() / norm * (1.0 - 0.05 * (n - 1.0))
    };
    let vals: Vec<f64> = pr_axis
        .iter()
        .flat_map(|&pr| n_axis.iter().map(move |&n| mfp(pr, n)))
        .collect();

    let vr_axis = linspace(0.15, 1.25, 23); // step 0.05, node at 0.7
    let eta: Vec<f64> = vr_axis
        .iter()
        .map(|&vr| d.eta_max * (1.0 - ((vr - d.vr_des) / d.vr_des).powi(2)))
        .collect();

    Ok(TurbineMap {
        m_t1: Bicubic::new(pr_axis, n_axis, vals)?,
        m_t2: Cubic1::new(vr_axis, eta)?,
        design_pr: d.pr,
        design_mfp: d.mfp,
        design_t_in: d.t_in,
        sync_speed: d.sync_speed,
        vr_des: d.vr_des,
        mfp_pressure_scale: d.mfp * d.p_in / (d.mdot * d.t_in.sqrt()),
        area_in: d.area_in,
        area_out: d.area_out,
    })
}

/// Quadratic-speedline compressor map with surge curves built against the
/// supplied fluid at the design reference inlet.
pub fn synthetic_compressor_map(
    d: &CompressorDesign,
    fluid: &dyn FluidProps,
) -> Result<CompressorMap, MapError> {
    let gamma_std = {
        let st = fluid.state_from_pt(d.p_std, d.t_std)?;
        st.cp / st.cv
    };
    let m_axis = linspace(0.05 * d.mdot, 1.8 * d.mdot, 36); // node at design flow
    let n_axis = linspace(0.3, 1.9, 33); // step 0.05, node at 1.0
    let dh_grid = |m_cor: f64, n: f64| {
        let m = m_cor / d.mdot;
        d.dh * (n * n + 0.8 * n * m - 0.8 * m * m)
    };
    let dh_vals: Vec<f64> = m_axis
        .iter()
        .flat_map(|&m| n_axis.iter().map(move |&n| dh_grid(m, n)))
        .collect();

    let dh_axis = linspace(0.0, 4.6 * d.dh, 24);
    let eta_grid = |m_cor: f64, dh_cor: f64| {
        let dm = m_cor / d.mdot - 1.0;
        let dd = (dh_cor / d.dh - 1.0) / 2.5;
        d.eta_max * (1.0 - d.eta_contour * (dm * dm + dd * dd))
    };
    let eta_vals: Vec<f64> = m_axis
        .iter()
        .flat_map(|&m| dh_axis.iter().map(move |&dh| eta_grid(m, dh)))
        .collect();

    let placeholder = Cubic1::new(vec![0.0, 1.0], vec![0.0, 0.0])?;
    let mut map = CompressorMap {
        m_c1: Bicubic::new(m_axis.clone(), n_axis, dh_vals)?,
        m_c2: Bicubic::new(m_axis, dh_axis, eta_vals)?,
        f_c1: placeholder.clone(),
        f_c2: placeholder.clone(),
        f_c3: placeholder,
        p_std: d.p_std,
        t_std: d.t_std,
        gamma_std,
        design_mdot: d.mdot,
        design_dh: d.dh,
        design_eta: d.eta_max,
        design_speed: d.speed,
        inertia: d.inertia,
        ref_p_in: d.ref_p_in,
        ref_t_in: d.ref_t_in,
        area_in: d.area_in,
        area_out: d.area_out,
    };
    let (f1, f2, f3) = build_surge_tables(&map, fluid)?;
    map.f_c1 = f1;
    map.f_c2 = f2;
    map.f_c3 = f3;
    Ok(map)
}
