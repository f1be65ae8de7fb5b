//! Radial-inflow turbine performance-map model.
//!
//! Flow capacity comes from a mass-flow-parameter grid over (pressure ratio,
//! corrected speed); efficiency from a curve over the tip-to-spouting
//! velocity ratio. Corrected speed is stored normalized by its design value,
//! so the synchronous machine sits at 1.0 when T_in is at design.

use std::path::Path;

use crate::error::MapError;
use crate::numerics::{Bicubic, Cubic1};
use crate::props::{FluidProps, ThermoState};

use super::file::MapFile;
use super::grid_err;

#[derive(Debug, Clone)]
pub struct TurbineMap {
    /// MFP over (PR, N_cor); MFP = mdot * sqrt(T_in) * mfp_pressure_scale / p_in.
    pub m_t1: Bicubic,
    /// Efficiency over velocity ratio v_tip / v_is.
    pub m_t2: Cubic1,
    pub design_pr: f64,
    pub design_mfp: f64,
    pub design_t_in: f64,
    /// Synchronous shaft speed, rad/s (grid generator design speed).
    pub sync_speed: f64,
    /// Design velocity ratio (v_tip / v_is at peak efficiency).
    pub vr_des: f64,
    /// Converts mdot*sqrt(T)/p to the dimensionless grid units.
    pub mfp_pressure_scale: f64,
    pub area_in: f64,
    pub area_out: f64,
}

/// One turbine operating point resolved from inlet/outlet pressures.
#[derive(Debug, Clone)]
pub struct TurbineEval {
    pub t_out: f64,
    pub mdot: f64,
    pub eta: f64,
    /// Shaft power extracted from the gas, W (positive when expanding).
    pub wdot: f64,
    pub n_cor: f64,
    pub velocity_ratio: f64,
    pub state_out: ThermoState,
}

impl TurbineMap {
    /// Normalized corrected speed for shaft speed `n_s` (rad/s) and inlet
    /// temperature `t_in`.
    pub fn corrected_speed(&self, n_s: f64, t_in: f64) -> f64 {
        (n_s / self.sync_speed) * (t_in / self.design_t_in).sqrt()
    }

    /// Mass flow parameter in grid units.
    pub fn mfp_of(&self, mdot: f64, t_in: f64, p_in: f64) -> f64 {
        mdot * t_in.sqrt() * self.mfp_pressure_scale / p_in
    }

    /// Mass flow recovered from a grid-units MFP.
    pub fn mdot_of(&self, mfp: f64, t_in: f64, p_in: f64) -> f64 {
        mfp * p_in / (t_in.sqrt() * self.mfp_pressure_scale)
    }

    /// Inverts the flow grid: pressure ratio producing `mfp` at `n_cor`.
    pub fn pr_from_mfp(&self, mfp: f64, n_cor: f64) -> Result<f64, MapError> {
        let (lo, hi) = self.m_t1.x_range();
        let f = |pr: f64| self.m_t1.eval_value(pr, n_cor).unwrap_or(f64::NAN) - mfp;
        // MFP is monotone in PR, so a sign change over the axis is exact
        crate::numerics::find_root_bounded(f, lo, hi, 1e-10)
            .map_err(|e| grid_err(e, "pressure ratio", "corrected speed"))
    }

    pub fn save(&self, path: &Path) -> Result<(), MapError> {
        self.to_map_file().save(path)
    }

    pub fn load(path: &Path) -> Result<Self, MapError> {
        Self::from_map_file(&MapFile::load(path)?)
    }

    pub fn to_map_file(&self) -> MapFile {
        let mut f = MapFile {
            machine: "turbine".to_string(),
            ..Default::default()
        };
        for (k, v) in [
            ("design_pr", self.design_pr),
            ("design_mfp", self.design_mfp),
            ("design_t_in", self.design_t_in),
            ("sync_speed", self.sync_speed),
            ("vr_des", self.vr_des),
            ("mfp_pressure_scale", self.mfp_pressure_scale),
            ("area_in", self.area_in),
            ("area_out", self.area_out),
        ] {
            f.scalars.insert(k.to_string(), v);
        }
        f.axes.insert("pr".into(), self.m_t1.xs().to_vec());
        f.axes.insert("n_cor".into(), self.m_t1.ys().to_vec());
        f.axes.insert("vr".into(), self.m_t2.xs().to_vec());
        f.grids.insert(
            "mfp".into(),
            ("pr".into(), "n_cor".into(), self.m_t1.values().to_vec()),
        );
        f.curves
            .insert("eta".into(), ("vr".into(), self.m_t2.values().to_vec()));
        f
    }

    pub fn from_map_file(f: &MapFile) -> Result<Self, MapError> {
        if f.machine != "turbine" {
            return Err(MapError::File(format!(
                "expected a turbine map, got machine '{}'",
                f.machine
            )));
        }
        let (pr, n_cor, mfp) = f.grid("mfp")?;
        let (vr, eta) = f.curve("eta")?;
        Ok(TurbineMap {
            m_t1: Bicubic::new(pr.to_vec(), n_cor.to_vec(), mfp.to_vec())?,
            m_t2: Cubic1::new(vr.to_vec(), eta.to_vec())?,
            design_pr: f.scalar("design_pr")?,
            design_mfp: f.scalar("design_mfp")?,
            design_t_in: f.scalar("design_t_in")?,
            sync_speed: f.scalar("sync_speed")?,
            vr_des: f.scalar("vr_des")?,
            mfp_pressure_scale: f.scalar("mfp_pressure_scale")?,
            area_in: f.scalar("area_in")?,
            area_out: f.scalar("area_out")?,
        })
    }
}

/// Spouting velocity of an isentropic expansion through pressure ratio `pr`
/// from inlet temperature `t_in`, with ideal-gas-like inlet cp and gamma.
pub fn spouting_velocity(cp_in: f64, gamma_in: f64, t_in: f64, pr: f64) -> f64 {
    let x = 1.0 - pr.powf(-(gamma_in - 1.0) / gamma_in);
    (2.0 * cp_in * t_in * x.max(0.0)).sqrt()
}

/// Resolves the turbine operating point from inlet/outlet pressures, inlet
/// temperature, and shaft speed.
pub fn turbine_eval(
    map: &TurbineMap,
    fluid: &dyn FluidProps,
    p_in: f64,
    p_out: f64,
    t_in: f64,
    n_s: f64,
) -> Result<TurbineEval, MapError> {
    let pr = p_in / p_out;
    if pr < 1.0 {
        return Err(MapError::ReverseFlow { pr });
    }
    let n_cor = map.corrected_speed(n_s, t_in);
    let mfp = map
        .m_t1
        .eval_value(pr, n_cor)
        .map_err(|e| grid_err(e, "pressure ratio", "corrected speed"))?;
    let mdot = map.mdot_of(mfp, t_in, p_in);

    let st_in = fluid.state_from_pt(p_in, t_in)?;
    let gamma = st_in.cp / st_in.cv;
    let v_is = spouting_velocity(st_in.cp, gamma, t_in, pr);
    let v_is_des = spouting_velocity(st_in.cp, gamma, map.design_t_in, map.design_pr);
    // corrected speed scales tip speed; spouting velocity rescales the ratio.
    // Clamped to the curve span: efficiency saturates at the endpoints, which
    // keeps near-unity pressure ratios evaluable during transients.
    let (vr_lo, vr_hi) = map.m_t2.x_range();
    let vr = (map.vr_des * n_cor * (v_is_des / v_is.max(1e-9))).clamp(vr_lo, vr_hi);
    let eta = map
        .m_t2
        .eval_value(vr)
        .map_err(|e| grid_err(e, "velocity ratio", "velocity ratio"))?
        .clamp(1e-3, 1.0);

    let h_out_is = fluid.isentropic_outlet(st_in.s, p_out)?.h;
    let h_out = st_in.h - eta * (st_in.h - h_out_is);
    let state_out = fluid.state_from_ph(p_out, h_out, Some(t_in))?;

    let v_in = mdot / (st_in.rho * map.area_in);
    let v_out = mdot / (state_out.rho * map.area_out);
    let wdot = mdot * (st_in.h - h_out + 0.5 * (v_in * v_in - v_out * v_out));

    Ok(TurbineEval {
        t_out: state_out.t,
        mdot,
        eta,
        wdot,
        n_cor,
        velocity_ratio: vr,
        state_out,
    })
}
