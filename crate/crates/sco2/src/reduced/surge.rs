//! Minimum compressor speed before surge.
//!
//! At the minimum feasible speed, the compressor's peak deliverable outlet
//! pressure just equals the inlet pressure the turbine requires to pass the
//! flow at that peak. The peak-pressure and peak-flow lookup curves over
//! corrected speed come from the compressor map; the turbine side follows
//! from its flow map at the current exhaust pressure and inlet temperature.

use crate::error::MapError;
use crate::maps::{CompressorMap, TurbineMap};
use crate::numerics::find_root_bounded;
use crate::props::FluidProps;

/// Subdivision of each corrected-speed interval when scanning for a sign
/// change of the matching condition.
const SCAN_SUB: usize = 6;

/// Minimum compressor shaft speed (rad/s) below which the compressor
/// cannot reach the high-side pressure demanded by the turbine.
///
/// `p_out_t` is the turbine exhaust pressure, `delta_mdot` the current
/// turbine-minus-compressor mass-flow difference (assumed to persist), and
/// `t_in_t` the turbine inlet temperature. The corrected-to-raw speed
/// conversion uses the compressor map's reference inlet, which matches the
/// fixed suction reservoir.
pub fn compute_min_compressor_speed(
    comp: &CompressorMap,
    turb: &TurbineMap,
    fluid: &dyn FluidProps,
    p_out_t: f64,
    delta_mdot: f64,
    t_in_t: f64,
) -> Result<f64, MapError> {
    let state_in = fluid.state_from_pt(comp.ref_p_in, comp.ref_t_in)?;
    let cv0 = comp.corrected_vars(&state_in, 1.0, comp.design_speed, 0.0);
    let n_cor_t = turb.corrected_speed(turb.sync_speed, t_in_t);

    // mismatch between the compressor's peak pressure and the pressure the
    // turbine needs to swallow the corresponding flow
    let g = |n_cor: f64| -> Result<f64, MapError> {
        let p_star = comp.f_c1.eval_value(n_cor)?;
        let m_cor_star = comp.f_c2.eval_value(n_cor)?;
        let mdot_star = comp.raw_flow(&cv0, comp.ref_p_in, m_cor_star);
        let mfp = turb.mfp_of(mdot_star + delta_mdot, t_in_t, p_star);
        let pr = turb.pr_from_mfp(mfp, n_cor_t)?;
        Ok(p_star - p_out_t * pr)
    };

    let (lo, hi) = comp.f_c1.x_range();
    let n_scan = (comp.f_c1.xs().len() - 1) * SCAN_SUB;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n_scan {
        let n_cor = lo + (hi - lo) * k as f64 / n_scan as f64;
        let val = match g(n_cor) {
            Ok(v) if v.is_finite() => v,
            _ => {
                prev = None;
                continue;
            }
        };
        if let Some((n_prev, v_prev)) = prev {
            if v_prev == 0.0 {
                return Ok(comp.raw_speed(&cv0, n_prev));
            }
            if v_prev.signum() != val.signum() {
                let f = |n: f64| g(n).unwrap_or(f64::NAN);
                let root = find_root_bounded(f, n_prev, n_cor, 1.0e-10)
                    .map_err(MapError::Numerics)?;
                return Ok(comp.raw_speed(&cv0, root));
            }
        }
        prev = Some((n_cor, val));
    }
    if let Some((n_last, v_last)) = prev {
        if v_last == 0.0 {
            return Ok(comp.raw_speed(&cv0, n_last));
        }
    }
    Err(MapError::ConstraintUnresolvable { lo, hi })
}
