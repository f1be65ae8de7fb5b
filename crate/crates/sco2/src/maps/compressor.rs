//! Centrifugal compressor performance-map model with non-ideal-gas
//! corrected variables.
//!
//! Enthalpy rise comes from a grid over (corrected flow, corrected speed),
//! efficiency from a grid over (corrected flow, corrected enthalpy rise).
//! Corrected speed is stored normalized by the physical design speed.
//! Surge/max-flow lookup curves bound every evaluation; the inverse
//! (pressure-ratio) evaluation stays on the right-hand branch between them.

use std::path::Path;

use crate::error::MapError;
use crate::numerics::{find_root_bounded, Bicubic, Cubic1};
use crate::props::{FluidProps, ThermoState};

use super::file::MapFile;
use super::grid_err;

#[derive(Debug, Clone)]
pub struct CompressorMap {
    /// Corrected enthalpy rise over (mdot_cor, N_cor).
    pub m_c1: Bicubic,
    /// Isentropic efficiency over (mdot_cor, dh_cor).
    pub m_c2: Bicubic,
    /// Maximum outlet pressure vs N_cor (built at the reference inlet), Pa.
    pub f_c1: Cubic1,
    /// Corrected flow at that maximum (surge limit).
    pub f_c2: Cubic1,
    /// Largest usable corrected flow.
    pub f_c3: Cubic1,
    pub p_std: f64,
    pub t_std: f64,
    /// cp/cv at standard conditions, frozen at map-generation time so table
    /// providers whose region excludes (p_std, t_std) can still evaluate.
    pub gamma_std: f64,
    pub design_mdot: f64,
    pub design_dh: f64,
    pub design_eta: f64,
    /// Physical design shaft speed, rad/s (normalizes N_cor).
    pub design_speed: f64,
    /// Rotor moment of inertia, kg m^2.
    pub inertia: f64,
    /// Inlet conditions used to construct the surge lookup curves.
    pub ref_p_in: f64,
    pub ref_t_in: f64,
    pub area_in: f64,
    pub area_out: f64,
}

/// Corrected operating variables plus the scaling factors behind them.
#[derive(Debug, Clone, Copy)]
pub struct CorrectedVars {
    pub mdot_cor: f64,
    /// Normalized by design speed.
    pub n_cor: f64,
    pub dh_cor: f64,
    pub v_cr: f64,
    pub epsilon: f64,
}

/// One compressor operating point.
#[derive(Debug, Clone)]
pub struct CompressorEval {
    pub p_out: f64,
    pub t_out: f64,
    pub eta: f64,
    /// Shaft power absorbed, W.
    pub wdot: f64,
    /// Actual enthalpy rise, J/kg.
    pub dh: f64,
    pub mdot: f64,
    pub mdot_cor: f64,
    pub n_cor: f64,
    pub state_out: ThermoState,
}

/// Critical flow function used by the epsilon correction.
fn crit_flow(gamma: f64) -> f64 {
    (2.0 * gamma / (gamma + 1.0)).powf(1.0 / (1.0 - 1.0 / gamma))
}

impl CompressorMap {
    /// Corrected variables for the given inlet state, flow, shaft speed
    /// (rad/s), and enthalpy rise.
    pub fn corrected_vars(
        &self,
        state_in: &ThermoState,
        mdot: f64,
        n_s: f64,
        dh: f64,
    ) -> CorrectedVars {
        let gamma_in = state_in.cp / state_in.cv;
        let v_cr = (self.gamma_std * (gamma_in + 1.0) * self.t_std)
            / (gamma_in * (self.gamma_std + 1.0) * state_in.t);
        let epsilon = crit_flow(self.gamma_std) / crit_flow(gamma_in);
        CorrectedVars {
            mdot_cor: mdot * (1.0 / v_cr).sqrt() * (self.p_std / state_in.p) * epsilon,
            n_cor: (n_s / self.design_speed) * v_cr,
            dh_cor: dh * v_cr,
            v_cr,
            epsilon,
        }
    }

    /// Raw mass flow corresponding to a corrected flow at the given inlet.
    pub fn raw_flow(&self, cv: &CorrectedVars, p_in: f64, mdot_cor: f64) -> f64 {
        mdot_cor * cv.v_cr.sqrt() * p_in / (self.p_std * cv.epsilon)
    }

    /// Raw shaft speed (rad/s) for a normalized corrected speed.
    pub fn raw_speed(&self, cv: &CorrectedVars, n_cor: f64) -> f64 {
        n_cor * self.design_speed / cv.v_cr
    }

    /// Surge-limit corrected flow at a corrected speed, clamped into the
    /// flow grid (the cubic lookup can overshoot the grid edge between
    /// nodes).
    pub fn surge_flow(&self, n_cor: f64) -> Result<f64, MapError> {
        let (lo, hi) = self.m_c1.x_range();
        Ok(self
            .f_c2
            .eval_value(n_cor)
            .map_err(|e| grid_err(e, "corrected speed", "corrected speed"))?
            .clamp(lo, hi))
    }

    /// Largest usable corrected flow at a corrected speed, clamped into the
    /// flow grid.
    pub fn max_flow(&self, n_cor: f64) -> Result<f64, MapError> {
        let (lo, hi) = self.m_c1.x_range();
        Ok(self
            .f_c3
            .eval_value(n_cor)
            .map_err(|e| grid_err(e, "corrected speed", "corrected speed"))?
            .clamp(lo, hi))
    }

    pub fn save(&self, path: &Path) -> Result<(), MapError> {
        self.to_map_file().save(path)
    }

    pub fn load(path: &Path) -> Result<Self, MapError> {
        Self::from_map_file(&MapFile::load(path)?)
    }

    pub fn to_map_file(&self) -> MapFile {
        let mut f = MapFile {
            machine: "compressor".to_string(),
            ..Default::default()
        };
        for (k, v) in [
            ("p_std", self.p_std),
            ("t_std", self.t_std),
            ("gamma_std", self.gamma_std),
            ("design_mdot", self.design_mdot),
            ("design_dh", self.design_dh),
            ("design_eta", self.design_eta),
            ("design_speed", self.design_speed),
            ("inertia", self.inertia),
            ("ref_p_in", self.ref_p_in),
            ("ref_t_in", self.ref_t_in),
            ("area_in", self.area_in),
            ("area_out", self.area_out),
        ] {
            f.scalars.insert(k.to_string(), v);
        }
        f.axes.insert("mdot_cor".into(), self.m_c1.xs().to_vec());
        f.axes.insert("n_cor".into(), self.m_c1.ys().to_vec());
        f.axes.insert("dh_cor".into(), self.m_c2.ys().to_vec());
        f.axes.insert("n_surge".into(), self.f_c1.xs().to_vec());
        f.grids.insert(
            "dh".into(),
            ("mdot_cor".into(), "n_cor".into(), self.m_c1.values().to_vec()),
        );
        f.grids.insert(
            "eta".into(),
            ("mdot_cor".into(), "dh_cor".into(), self.m_c2.values().to_vec()),
        );
        for (name, c) in [("p_max", &self.f_c1), ("mdot_surge", &self.f_c2), ("mdot_max", &self.f_c3)] {
            f.curves
                .insert(name.into(), ("n_surge".into(), c.values().to_vec()));
        }
        f
    }

    pub fn from_map_file(f: &MapFile) -> Result<Self, MapError> {
        if f.machine != "compressor" {
            return Err(MapError::File(format!(
                "expected a compressor map, got machine '{}'",
                f.machine
            )));
        }
        let (m_ax, n_ax, dh_vals) = f.grid("dh")?;
        let (m_ax2, dh_ax, eta_vals) = f.grid("eta")?;
        let (ns_ax, p_max) = f.curve("p_max")?;
        let (_, m_surge) = f.curve("mdot_surge")?;
        let (_, m_max) = f.curve("mdot_max")?;
        if m_ax != m_ax2 {
            return Err(MapError::File(
                "flow axes of the two compressor grids differ".into(),
            ));
        }
        Ok(CompressorMap {
            m_c1: Bicubic::new(m_ax.to_vec(), n_ax.to_vec(), dh_vals.to_vec())?,
            m_c2: Bicubic::new(m_ax.to_vec(), dh_ax.to_vec(), eta_vals.to_vec())?,
            f_c1: Cubic1::new(ns_ax.to_vec(), p_max.to_vec())?,
            f_c2: Cubic1::new(ns_ax.to_vec(), m_surge.to_vec())?,
            f_c3: Cubic1::new(ns_ax.to_vec(), m_max.to_vec())?,
            p_std: f.scalar("p_std")?,
            t_std: f.scalar("t_std")?,
            gamma_std: f.scalar("gamma_std")?,
            design_mdot: f.scalar("design_mdot")?,
            design_dh: f.scalar("design_dh")?,
            design_eta: f.scalar("design_eta")?,
            design_speed: f.scalar("design_speed")?,
            inertia: f.scalar("inertia")?,
            ref_p_in: f.scalar("ref_p_in")?,
            ref_t_in: f.scalar("ref_t_in")?,
            area_in: f.scalar("area_in")?,
            area_out: f.scalar("area_out")?,
        })
    }
}

/// Free-function form of [`CompressorMap::corrected_vars`].
pub fn corrected_vars_compressor(
    map: &CompressorMap,
    state_in: &ThermoState,
    mdot: f64,
    n_s: f64,
    dh: f64,
) -> CorrectedVars {
    map.corrected_vars(state_in, mdot, n_s, dh)
}

/// Pressure on the isentrope through (s_in) where enthalpy reaches
/// `h_target`. Newton with dh/dp|s = 1/rho, bisection fallback.
fn pressure_on_isentrope(
    fluid: &dyn FluidProps,
    s_in: f64,
    h_target: f64,
    p_lo: f64,
) -> Result<f64, MapError> {
    let reg = fluid.region();
    let scale = h_target.abs().max(1e3);
    let mut p = p_lo;
    for _ in 0..50 {
        let st = fluid.isentropic_outlet(s_in, p)?;
        let r = st.h - h_target;
        if r.abs() <= 1e-10 * scale {
            return Ok(p);
        }
        let pn = (p - r * st.rho).clamp(p_lo, reg.p_max);
        if (pn - p).abs() <= 1e-12 * p {
            break;
        }
        p = pn;
    }
    let g = |pp: f64| {
        fluid
            .isentropic_outlet(s_in, pp)
            .map(|st| (st.h - h_target) / scale)
            .unwrap_or(f64::NAN)
    };
    Ok(find_root_bounded(g, p_lo, reg.p_max, 1e-11)?)
}

/// Map evaluation core shared by the forward/inverse drivers and the surge
/// table builder; takes corrected flow/speed directly and skips the surge
/// bound checks.
fn eval_at_corrected(
    map: &CompressorMap,
    fluid: &dyn FluidProps,
    state_in: &ThermoState,
    cv: &CorrectedVars,
    mdot: f64,
) -> Result<CompressorEval, MapError> {
    let dh_cor = map
        .m_c1
        .eval_value(cv.mdot_cor, cv.n_cor)
        .map_err(|e| grid_err(e, "corrected flow", "corrected speed"))?;
    let eta = map
        .m_c2
        .eval_value(cv.mdot_cor, dh_cor)
        .map_err(|e| grid_err(e, "corrected flow", "corrected enthalpy rise"))?
        .clamp(1e-3, 1.0);
    let dh = dh_cor / cv.v_cr;
    let h_out_is = state_in.h + eta * dh;
    let p_out = pressure_on_isentrope(fluid, state_in.s, h_out_is, state_in.p)?;
    let state_out = fluid.state_from_ph(
        p_out,
        state_in.h + dh,
        Some(state_in.t + dh / state_in.cp.max(1e2)),
    )?;
    let v_in = mdot / (state_in.rho * map.area_in);
    let v_out = mdot / (state_out.rho * map.area_out);
    let wdot = mdot * (dh + 0.5 * (v_out * v_out - v_in * v_in));
    Ok(CompressorEval {
        p_out,
        t_out: state_out.t,
        eta,
        wdot,
        dh,
        mdot,
        mdot_cor: cv.mdot_cor,
        n_cor: cv.n_cor,
        state_out,
    })
}

/// Forward evaluation: outlet state from inlet conditions, mass flow, and
/// shaft speed (rad/s).
pub fn compressor_eval_forward(
    map: &CompressorMap,
    fluid: &dyn FluidProps,
    p_in: f64,
    t_in: f64,
    mdot: f64,
    n_s: f64,
) -> Result<CompressorEval, MapError> {
    let state_in = fluid.state_from_pt(p_in, t_in)?;
    let cv = map.corrected_vars(&state_in, mdot, n_s, 0.0);
    let surge = map.surge_flow(cv.n_cor)?;
    let choke = map.max_flow(cv.n_cor)?;
    if cv.mdot_cor < surge {
        return Err(MapError::SurgeRegion {
            mdot_cor: cv.mdot_cor,
            surge,
            n_cor: cv.n_cor,
        });
    }
    if cv.mdot_cor > choke {
        return Err(MapError::ChokeRegion {
            mdot_cor: cv.mdot_cor,
            choke,
            n_cor: cv.n_cor,
        });
    }
    eval_at_corrected(map, fluid, &state_in, &cv, mdot)
}

/// Inverse evaluation: mass flow and outlet state matching a target outlet
/// pressure, on the right-hand (stable) branch of the speedline.
pub fn compressor_eval_from_pr(
    map: &CompressorMap,
    fluid: &dyn FluidProps,
    p_in: f64,
    p_out: f64,
    t_in: f64,
    n_s: f64,
) -> Result<CompressorEval, MapError> {
    let state_in = fluid.state_from_pt(p_in, t_in)?;
    let cv = map.corrected_vars(&state_in, 1.0, n_s, 0.0);
    let surge = map.surge_flow(cv.n_cor)?;
    let choke = map.max_flow(cv.n_cor)?;
    // bracket in raw flow, nudged inside the surge/choke bounds
    let m_lo = map.raw_flow(&cv, p_in, surge) * (1.0 + 1e-9);
    let m_hi = map.raw_flow(&cv, p_in, choke) * (1.0 - 1e-9);

    let eval = |m: f64| -> Result<CompressorEval, MapError> {
        let cvm = map.corrected_vars(&state_in, m, n_s, 0.0);
        eval_at_corrected(map, fluid, &state_in, &cvm, m)
    };
    let p_at_surge = eval(m_lo)?.p_out;
    if p_out > p_at_surge {
        return Err(MapError::SurgeInfeasible {
            p_target: p_out,
            p_max: p_at_surge,
            n_cor: cv.n_cor,
        });
    }
    let p_at_max = eval(m_hi)?.p_out;
    if p_out < p_at_max {
        return Err(MapError::OutOfMap {
            var: "target outlet pressure",
            value: p_out,
            min: p_at_max,
            max: p_at_surge,
        });
    }
    let f = |m: f64| {
        eval(m)
            .map(|ev| (ev.p_out - p_out) / p_out)
            .unwrap_or(f64::NAN)
    };
    let m = find_root_bounded(f, m_lo, m_hi, 1e-11)?;
    eval(m)
}

/// Rebuilds the surge lookup curves by scanning each corrected-speed
/// gridline of the flow map for the outlet-pressure maximum (with quadratic
/// refinement between samples) at the map's reference inlet conditions.
/// Returns (max pressure, surge flow, max flow) curves over N_cor.
pub fn build_surge_tables(
    map: &CompressorMap,
    fluid: &dyn FluidProps,
) -> Result<(Cubic1, Cubic1, Cubic1), MapError> {
    let state_in = fluid.state_from_pt(map.ref_p_in, map.ref_t_in)?;
    let cv0 = map.corrected_vars(&state_in, 1.0, map.design_speed, 0.0);
    // smallest enthalpy rise treated as a usable operating point
    let dh_min = 0.02 * map.design_dh;

    let m_axis = map.m_c1.xs();
    let n_axis = map.m_c1.ys().to_vec();
    let sub = 3; // samples per grid cell
    let samples: Vec<f64> = m_axis
        .windows(2)
        .flat_map(|w| (0..sub).map(move |k| w[0] + (w[1] - w[0]) * k as f64 / sub as f64))
        .chain(std::iter::once(*m_axis.last().unwrap()))
        .collect();

    // speedlines whose outlet states leave the fluid's validity region are
    // dropped; the curves then span only the feasible speed range
    let mut n_kept = Vec::with_capacity(n_axis.len());
    let mut p_max = Vec::with_capacity(n_axis.len());
    let mut m_surge = Vec::with_capacity(n_axis.len());
    let mut m_max = Vec::with_capacity(n_axis.len());
    for &n in &n_axis {
        let p_of = |m_cor: f64| -> Option<(f64, f64)> {
            let dh_cor = map.m_c1.eval_value(m_cor, n).ok()?;
            if dh_cor <= dh_min {
                return None;
            }
            let cvm = CorrectedVars {
                mdot_cor: m_cor,
                n_cor: n,
                dh_cor,
                ..cv0
            };
            let mdot = map.raw_flow(&cv0, map.ref_p_in, m_cor);
            eval_at_corrected(map, fluid, &state_in, &cvm, mdot)
                .ok()
                .map(|ev| (ev.p_out, dh_cor))
        };
        let pts: Vec<(f64, Option<(f64, f64)>)> =
            samples.iter().map(|&m| (m, p_of(m))).collect();
        let valid: Vec<(f64, f64, f64)> = pts
            .iter()
            .filter_map(|(m, r)| r.map(|(p, dh)| (*m, p, dh)))
            .collect();
        if valid.len() < 3 {
            continue;
        }
        // pressure maximum with quadratic refinement between samples
        let k = valid
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .unwrap();
        let (mut m_star, mut p_star) = (valid[k].0, valid[k].1);
        if k > 0 && k + 1 < valid.len() {
            let (x0, y0) = (valid[k - 1].0, valid[k - 1].1);
            let (x1, y1) = (valid[k].0, valid[k].1);
            let (x2, y2) = (valid[k + 1].0, valid[k + 1].1);
            let d0 = (y1 - y0) / (x1 - x0);
            let d1 = (y2 - y1) / (x2 - x1);
            let curv = (d1 - d0) / (0.5 * (x2 - x0));
            if curv < 0.0 {
                let xv = 0.5 * (x0 + x1) - d0 / curv;
                if xv > x0 && xv < x2 {
                    if let Some((pv, _)) = p_of(xv) {
                        if pv >= p_star {
                            m_star = xv;
                            p_star = pv;
                        }
                    }
                }
            }
        }
        // largest usable flow: refine the dh threshold crossing past the
        // last valid sample
        let (last_m, _, last_dh) = *valid.last().unwrap();
        let mut m_top = last_m;
        if let Some((next_m, _)) = pts
            .iter()
            .find(|(m, r)| *m > last_m && r.is_none())
            .map(|(m, _)| (*m, ()))
        {
            // linear interpolation of dh_cor to the threshold
            let dh_next = map.m_c1.eval_value(next_m, n).unwrap_or(dh_min);
            let w = (last_dh - dh_min) / (last_dh - dh_next).max(1e-12);
            m_top = last_m + w.clamp(0.0, 1.0) * (next_m - last_m) * (1.0 - 1e-6);
        }
        n_kept.push(n);
        p_max.push(p_star);
        m_surge.push(m_star);
        m_max.push(m_top.max(m_star * (1.0 + 1e-6)));
    }
    if n_kept.len() < 4 {
        return Err(MapError::File(format!(
            "fewer than 4 feasible speedlines ({} of {}) at reference inlet ({:.4e} Pa, {:.1} K)",
            n_kept.len(),
            n_axis.len(),
            map.ref_p_in,
            map.ref_t_in
        )));
    }
    Ok((
        Cubic1::new(n_kept.clone(), p_max)?,
        Cubic1::new(n_kept.clone(), m_surge)?,
        Cubic1::new(n_kept, m_max)?,
    ))
}
