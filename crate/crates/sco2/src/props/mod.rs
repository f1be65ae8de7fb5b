//! Thermodynamic and transport property providers.
//!
//! Providers expose a complete state from (p, T); everything else — the
//! (ρ, e) and (p, e) inversions, isentropic outlet states, and partial
//! derivatives — has generic Newton/finite-difference defaults that a
//! provider may override with something faster (the table provider does).

pub mod co2;
pub mod ideal;
pub mod oil;
pub mod table;

pub use co2::Co2PengRobinson;
pub use ideal::IdealGas;
pub use oil::ThermalOil;
pub use table::{
    build_table, load_table, save_table, AxisSpec, PropertyTable, TableBasis, TableProvider,
};

use crate::error::PropertyError;

/// A complete single-phase fluid state. `h = e + p/rho` holds to 1e-6
/// relative; `a` is the speed of sound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub p: f64,
    pub t: f64,
    pub rho: f64,
    pub e: f64,
    pub h: f64,
    pub s: f64,
    pub cp: f64,
    pub cv: f64,
    pub k: f64,
    pub mu: f64,
    pub a: f64,
}

/// Rectangular validity region in (p, T).
#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub p_min: f64,
    pub p_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Region {
    pub fn contains(&self, p: f64, t: f64) -> bool {
        p >= self.p_min && p <= self.p_max && t >= self.t_min && t <= self.t_max
    }

    pub fn describe(&self) -> String {
        format!(
            "p in [{:.3e}, {:.3e}] Pa, T in [{:.1}, {:.1}] K",
            self.p_min, self.p_max, self.t_min, self.t_max
        )
    }

    fn clamp(&self, p: f64, t: f64) -> (f64, f64) {
        (
            p.clamp(self.p_min, self.p_max),
            t.clamp(self.t_min, self.t_max),
        )
    }
}

/// Partial derivatives at fixed (p, e): how ρ, T, h move with e (at constant
/// p) and with p (at constant e). `one_sided` flags a reduced stencil near
/// the region boundary.
#[derive(Debug, Clone, Copy)]
pub struct PePartials {
    pub drho_de: f64,
    pub drho_dp: f64,
    pub dt_de: f64,
    pub dt_dp: f64,
    pub dh_de: f64,
    pub one_sided: bool,
}

pub trait FluidProps: Send + Sync {
    fn name(&self) -> &str;
    fn region(&self) -> Region;
    fn state_from_pt(&self, p: f64, t: f64) -> Result<ThermoState, PropertyError>;

    /// True for the oil model: p decoupled, e alone determines T.
    fn is_incompressible(&self) -> bool {
        false
    }

    fn state_from_rho_e(
        &self,
        rho: f64,
        e: f64,
        hint: Option<(f64, f64)>,
    ) -> Result<ThermoState, PropertyError> {
        invert_rho_e(self, rho, e, hint)
    }

    fn state_from_pe(
        &self,
        p: f64,
        e: f64,
        hint_t: Option<f64>,
    ) -> Result<ThermoState, PropertyError> {
        invert_pe(self, p, e, hint_t)
    }

    fn isentropic_outlet(&self, s_in: f64, p_out: f64) -> Result<ThermoState, PropertyError> {
        isentropic_outlet_generic(self, s_in, p_out)
    }

    fn state_from_ph(
        &self,
        p: f64,
        h: f64,
        hint_t: Option<f64>,
    ) -> Result<ThermoState, PropertyError> {
        invert_ph(self, p, h, hint_t)
    }

    fn partials_pe(&self, p: f64, e: f64) -> Result<PePartials, PropertyError> {
        fd_partials_pe(self, p, e, 1e-5)
    }
}

fn out_of_region<F: FluidProps + ?Sized>(
    f: &F,
    var1: &'static str,
    var2: &'static str,
    v1: f64,
    v2: f64,
) -> PropertyError {
    PropertyError::OutOfRegion {
        fluid: f.name().to_string(),
        var1,
        var2,
        v1,
        v2,
        bounds: f.region().describe(),
    }
}

/// 2D damped Newton in (p, T) matching a target (ρ, e). A coarse scan seeds
/// the iteration when no hint is given.
pub fn invert_rho_e<F: FluidProps + ?Sized>(
    f: &F,
    rho: f64,
    e: f64,
    hint: Option<(f64, f64)>,
) -> Result<ThermoState, PropertyError> {
    let reg = f.region();
    let resid = |st: &ThermoState| {
        let r1 = (st.rho - rho) / rho.abs().max(1e-12);
        let r2 = (st.e - e) / e.abs().max(1e3);
        (r1, r2)
    };
    let (mut p, mut t) = match hint {
        Some(ht) => reg.clamp(ht.0, ht.1),
        None => seed_scan(f, &reg, |st| {
            let (r1, r2) = resid(st);
            r1.hypot(r2)
        })?,
    };
    let tol = 1e-9;
    let mut last = (p, t, f64::INFINITY);
    for iter in 0..60 {
        let st = f.state_from_pt(p, t)?;
        let (r1, r2) = resid(&st);
        let norm = r1.hypot(r2);
        last = (p, t, norm);
        if r1.abs() <= tol && r2.abs() <= tol {
            return Ok(st);
        }
        // finite-difference Jacobian of (r1, r2) wrt (p, t)
        let dp = (p.abs() * 1e-6).max(1.0);
        let dt = (t.abs() * 1e-6).max(1e-6);
        let sp = f.state_from_pt((p + dp).min(reg.p_max), t)?;
        let stt = f.state_from_pt(p, (t + dt).min(reg.t_max))?;
        let dpe = (p + dp).min(reg.p_max) - p;
        let dte = (t + dt).min(reg.t_max) - t;
        let (r1p, r2p) = resid(&sp);
        let (r1t, r2t) = resid(&stt);
        let j11 = (r1p - r1) / dpe;
        let j12 = (r1t - r1) / dte;
        let j21 = (r2p - r2) / dpe;
        let j22 = (r2t - r2) / dte;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(PropertyError::InversionFailed {
                fluid: f.name().to_string(),
                iters: iter,
                p,
                t,
                residual: norm,
            });
        }
        let step_p = (r1 * j22 - r2 * j12) / det;
        let step_t = (j11 * r2 - j21 * r1) / det;
        // damped update with region clamping
        let mut lambda = 1.0;
        loop {
            let (pn, tn) = reg.clamp(p - lambda * step_p, t - lambda * step_t);
            let stn = f.state_from_pt(pn, tn)?;
            let (n1, n2) = resid(&stn);
            if n1.hypot(n2) < norm || lambda < 1.0 / 64.0 {
                p = pn;
                t = tn;
                break;
            }
            lambda *= 0.5;
        }
    }
    Err(PropertyError::InversionFailed {
        fluid: f.name().to_string(),
        iters: 60,
        p: last.0,
        t: last.1,
        residual: last.2,
    })
}

/// 1D damped Newton on T matching e at fixed p.
pub fn invert_pe<F: FluidProps + ?Sized>(
    f: &F,
    p: f64,
    e: f64,
    hint_t: Option<f64>,
) -> Result<ThermoState, PropertyError> {
    let reg = f.region();
    if p < reg.p_min || p > reg.p_max {
        return Err(out_of_region(f, "p", "e", p, e));
    }
    let scale = e.abs().max(1e3);
    let mut t = hint_t
        .map(|h| h.clamp(reg.t_min, reg.t_max))
        .unwrap_or(0.5 * (reg.t_min + reg.t_max));
    // tight tolerance: finite-difference partials divide out steps of
    // ~1e-5·e, so solver noise must sit well below that
    for _ in 0..80 {
        let st = f.state_from_pt(p, t)?;
        let r = (st.e - e) / scale;
        if r.abs() <= 1e-12 {
            return Ok(st);
        }
        // de/dT at constant p is close to cv; use it as the Newton slope
        let slope = st.cv.max(1e-3) / scale;
        let mut lambda = 1.0;
        loop {
            let tn = (t - lambda * r / slope).clamp(reg.t_min, reg.t_max);
            let stn = f.state_from_pt(p, tn)?;
            if ((stn.e - e) / scale).abs() < r.abs() || lambda < 1.0 / 64.0 {
                t = tn;
                break;
            }
            lambda *= 0.5;
        }
    }
    // Newton stalled (flat cv near region edge): fall back to bisection
    let g = |tt: f64| f.state_from_pt(p, tt).map(|st| st.e - e).unwrap_or(f64::NAN);
    crate::numerics::find_root_bounded(g, reg.t_min, reg.t_max, 1e-9 * scale)
        .map_err(|_| PropertyError::InversionFailed {
            fluid: f.name().to_string(),
            iters: 60,
            p,
            t,
            residual: (f.state_from_pt(p, t).map(|s| s.e).unwrap_or(f64::NAN) - e) / scale,
        })
        .and_then(|tt| f.state_from_pt(p, tt))
}

/// 1D damped Newton on T matching h at fixed p (dh/dT|p = cp > 0).
pub fn invert_ph<F: FluidProps + ?Sized>(
    f: &F,
    p: f64,
    h: f64,
    hint_t: Option<f64>,
) -> Result<ThermoState, PropertyError> {
    let reg = f.region();
    if p < reg.p_min || p > reg.p_max {
        return Err(out_of_region(f, "p", "h", p, h));
    }
    let scale = h.abs().max(1e3);
    let mut t = hint_t
        .map(|ht| ht.clamp(reg.t_min, reg.t_max))
        .unwrap_or(0.5 * (reg.t_min + reg.t_max));
    for _ in 0..80 {
        let st = f.state_from_pt(p, t)?;
        let r = (st.h - h) / scale;
        if r.abs() <= 1e-12 {
            return Ok(st);
        }
        let slope = st.cp.max(1e-3) / scale;
        let mut lambda = 1.0;
        loop {
            let tn = (t - lambda * r / slope).clamp(reg.t_min, reg.t_max);
            let stn = f.state_from_pt(p, tn)?;
            if ((stn.h - h) / scale).abs() < r.abs() || lambda < 1.0 / 64.0 {
                t = tn;
                break;
            }
            lambda *= 0.5;
        }
    }
    let g = |tt: f64| f.state_from_pt(p, tt).map(|st| st.h - h).unwrap_or(f64::NAN);
    crate::numerics::find_root_bounded(g, reg.t_min, reg.t_max, 1e-9 * scale)
        .map_err(|_| PropertyError::InversionFailed {
            fluid: f.name().to_string(),
            iters: 80,
            p,
            t,
            residual: (f.state_from_pt(p, t).map(|s| s.h).unwrap_or(f64::NAN) - h) / scale,
        })
        .and_then(|tt| f.state_from_pt(p, tt))
}

/// State at pressure p_out on the isentrope s = s_in. ds/dT = cp/T > 0, so
/// Newton on T converges monotonically; bisection backs it up.
pub fn isentropic_outlet_generic<F: FluidProps + ?Sized>(
    f: &F,
    s_in: f64,
    p_out: f64,
) -> Result<ThermoState, PropertyError> {
    let reg = f.region();
    if p_out < reg.p_min || p_out > reg.p_max {
        return Err(out_of_region(f, "p", "s", p_out, s_in));
    }
    let scale = s_in.abs().max(1e2);
    let mut t = 0.5 * (reg.t_min + reg.t_max);
    for _ in 0..60 {
        let st = f.state_from_pt(p_out, t)?;
        let r = (st.s - s_in) / scale;
        if r.abs() <= 1e-10 {
            return Ok(st);
        }
        let slope = (st.cp / st.t) / scale;
        t = (t - r / slope).clamp(reg.t_min, reg.t_max);
    }
    let g = |tt: f64| f.state_from_pt(p_out, tt).map(|st| st.s - s_in).unwrap_or(f64::NAN);
    let tt = crate::numerics::find_root_bounded(g, reg.t_min, reg.t_max, 1e-10 * scale).map_err(
        |_| PropertyError::InversionFailed {
            fluid: f.name().to_string(),
            iters: 60,
            p: p_out,
            t,
            residual: f64::NAN,
        },
    )?;
    f.state_from_pt(p_out, tt)
}

/// Central finite differences of (ρ, T, h) wrt (e, p); falls back to a
/// one-sided stencil (and says so) against the region boundary.
pub fn fd_partials_pe<F: FluidProps + ?Sized>(
    f: &F,
    p: f64,
    e: f64,
    rel_step: f64,
) -> Result<PePartials, PropertyError> {
    let reg = f.region();
    let base = f.state_from_pe(p, e, None)?;
    let dp = p.abs().max(1e5) * rel_step;
    let de = e.abs().max(1e4) * rel_step;
    let mut one_sided = false;

    let (p_hi, p_lo) = if p + dp > reg.p_max {
        one_sided = true;
        (p, p - dp)
    } else if p - dp < reg.p_min {
        one_sided = true;
        (p + dp, p)
    } else {
        (p + dp, p - dp)
    };
    let hint = Some(base.t);
    let sp_hi = f.state_from_pe(p_hi, e, hint)?;
    let sp_lo = f.state_from_pe(p_lo, e, hint)?;
    let dpe = p_hi - p_lo;

    let se_hi = f.state_from_pe(p, e + de, hint)?;
    let se_lo = f.state_from_pe(p, e - de, hint)?;
    let dee = 2.0 * de;

    Ok(PePartials {
        drho_de: (se_hi.rho - se_lo.rho) / dee,
        drho_dp: (sp_hi.rho - sp_lo.rho) / dpe,
        dt_de: (se_hi.t - se_lo.t) / dee,
        dt_dp: (sp_hi.t - sp_lo.t) / dpe,
        dh_de: (se_hi.h - se_lo.h) / dee,
        one_sided,
    })
}

/// Coarse deterministic scan used to seed (ρ, e) inversion without a hint.
fn seed_scan<F: FluidProps + ?Sized>(
    f: &F,
    reg: &Region,
    score: impl Fn(&ThermoState) -> f64,
) -> Result<(f64, f64), PropertyError> {
    let mut best = (reg.p_min, reg.t_min, f64::INFINITY);
    for i in 0..7 {
        // log-spaced in p: pressure spans decades
        let p = reg.p_min * (reg.p_max / reg.p_min).powf(i as f64 / 6.0);
        for j in 0..7 {
            let t = reg.t_min + (reg.t_max - reg.t_min) * j as f64 / 6.0;
            if let Ok(st) = f.state_from_pt(p, t) {
                let sc = score(&st);
                if sc < best.2 {
                    best = (p, t, sc);
                }
            }
        }
    }
    Ok((best.0, best.1))
}
