//! CO2 properties from a Peng–Robinson cubic equation of state with a
//! temperature-dependent ideal-gas heat capacity, plus power-law transport
//! correlations with a density correction. Single-phase only: when the cubic
//! has multiple real roots the one with the lower fugacity is kept.

use crate::error::PropertyError;
use crate::props::{FluidProps, Region, ThermoState};

const R_UNIV: f64 = 8.314_462_618; // J/(mol K)

#[derive(Debug, Clone)]
pub struct CubicEosParams {
    pub p_crit: f64,
    pub t_crit: f64,
    pub acentric: f64,
    pub molar_mass: f64,
    /// Ideal-gas molar heat capacity cp0(T) = Σ c_i T^i, J/(mol K).
    pub cp0_poly: [f64; 4],
    /// Added to h and s so both stay positive over the region (the zero of
    /// enthalpy is arbitrary; positive values make relative tolerances safe).
    pub h_offset: f64,
    pub s_offset: f64,
    /// Integration reference temperature for h_ig and s_ig.
    pub t_ref: f64,
    pub p_ref: f64,
}

impl CubicEosParams {
    pub fn co2() -> Self {
        CubicEosParams {
            p_crit: 7.3773e6,
            t_crit: 304.1282,
            acentric: 0.22394,
            molar_mass: 44.0095e-3,
            cp0_poly: [22.26, 5.981e-2, -3.501e-5, 7.469e-9],
            h_offset: 5.0e5,
            s_offset: 3.0e3,
            t_ref: 200.0,
            p_ref: 101_325.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Co2PengRobinson {
    params: CubicEosParams,
    region: Region,
    a: f64,
    b: f64,
    kappa: f64,
}

impl Default for Co2PengRobinson {
    fn default() -> Self {
        Co2PengRobinson::new(CubicEosParams::co2())
    }
}

impl Co2PengRobinson {
    pub fn new(params: CubicEosParams) -> Self {
        assert!(params.p_crit > 0.0 && params.t_crit > 0.0);
        let w = params.acentric;
        let a = 0.45724 * R_UNIV * R_UNIV * params.t_crit * params.t_crit / params.p_crit;
        let b = 0.07780 * R_UNIV * params.t_crit / params.p_crit;
        let kappa = 0.37464 + 1.54226 * w - 0.26992 * w * w;
        Co2PengRobinson {
            params,
            region: Region {
                p_min: 5e3,
                p_max: 4e7,
                t_min: 260.0,
                t_max: 1300.0,
            },
            a,
            b,
            kappa,
        }
    }

    pub fn params(&self) -> &CubicEosParams {
        &self.params
    }

    fn alpha(&self, t: f64) -> (f64, f64, f64) {
        // (α, dα/dT, d²α/dT²)
        let tc = self.params.t_crit;
        let k = self.kappa;
        let sqrt_tr = (t / tc).sqrt();
        let u = 1.0 + k * (1.0 - sqrt_tr);
        let alpha = u * u;
        let d1 = -k * u / (t * tc).sqrt();
        let d2 = k * (1.0 + k) * (tc / t).sqrt() / (2.0 * t * tc);
        (alpha, d1, d2)
    }

    /// Molar volumes of the real cubic roots at (p, T), largest first.
    fn volume_roots(&self, p: f64, t: f64) -> Vec<f64> {
        let (alpha, _, _) = self.alpha(t);
        let aa = self.a * alpha * p / (R_UNIV * R_UNIV * t * t);
        let bb = self.b * p / (R_UNIV * t);
        // Z³ + c2 Z² + c1 Z + c0 = 0
        let c2 = bb - 1.0;
        let c1 = aa - 3.0 * bb * bb - 2.0 * bb;
        let c0 = bb * bb * bb + bb * bb - aa * bb;
        let zs = solve_cubic(c2, c1, c0);
        let mut vs: Vec<f64> = zs
            .into_iter()
            .filter(|&z| z > bb)
            .map(|z| z * R_UNIV * t / p)
            .collect();
        vs.sort_by(|x, y| y.partial_cmp(x).unwrap());
        vs
    }

    /// ln φ used to pick the stable root when the cubic has three.
    fn ln_fugacity(&self, p: f64, t: f64, v: f64) -> f64 {
        let (alpha, _, _) = self.alpha(t);
        let z = p * v / (R_UNIV * t);
        let bb = self.b * p / (R_UNIV * t);
        let aa = self.a * alpha * p / (R_UNIV * R_UNIV * t * t);
        let sqrt2 = std::f64::consts::SQRT_2;
        z - 1.0
            - (z - bb).ln()
            - aa / (2.0 * sqrt2 * bb)
                * ((z + (1.0 + sqrt2) * bb) / (z + (1.0 - sqrt2) * bb)).ln()
    }

    fn cp0(&self, t: f64) -> f64 {
        let c = &self.params.cp0_poly;
        c[0] + t * (c[1] + t * (c[2] + t * c[3]))
    }

    fn h_ig(&self, t: f64) -> f64 {
        let c = &self.params.cp0_poly;
        let t0 = self.params.t_ref;
        let int = |x: f64| x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
        int(t) - int(t0)
    }

    fn s_ig_t(&self, t: f64) -> f64 {
        let c = &self.params.cp0_poly;
        let t0 = self.params.t_ref;
        let int = |x: f64| c[0] * x.ln() + x * (c[1] + x * (c[2] / 2.0 + x * c[3] / 3.0));
        int(t) - int(t0)
    }
}

impl FluidProps for Co2PengRobinson {
    fn name(&self) -> &str {
        "co2"
    }

    fn region(&self) -> Region {
        self.region
    }

    fn state_from_pt(&self, p: f64, t: f64) -> Result<ThermoState, PropertyError> {
        if !self.region.contains(p, t) {
            return Err(PropertyError::OutOfRegion {
                fluid: self.name().into(),
                var1: "p",
                var2: "T",
                v1: p,
                v2: t,
                bounds: self.region.describe(),
            });
        }
        let vs = self.volume_roots(p, t);
        let v = match vs.len() {
            0 => {
                return Err(PropertyError::InversionFailed {
                    fluid: self.name().into(),
                    iters: 0,
                    p,
                    t,
                    residual: f64::NAN,
                })
            }
            1 => vs[0],
            _ => {
                let first = vs[0];
                let last = *vs.last().unwrap();
                if self.ln_fugacity(p, t, first) <= self.ln_fugacity(p, t, last) {
                    first
                } else {
                    last
                }
            }
        };
        let m = self.params.molar_mass;
        let (alpha, dalpha, d2alpha) = self.alpha(t);
        let aal = self.a * alpha;
        let da = self.a * dalpha;
        let d2a = self.a * d2alpha;
        let sqrt2 = std::f64::consts::SQRT_2;
        let z = p * v / (R_UNIV * t);
        let bb = self.b * p / (R_UNIV * t);
        let log_term = ((z + (1.0 + sqrt2) * bb) / (z + (1.0 - sqrt2) * bb)).ln();

        let h_dep = R_UNIV * t * (z - 1.0) + (t * da - aal) / (2.0 * sqrt2 * self.b) * log_term;
        let s_dep = R_UNIV * (z - bb).ln() + da / (2.0 * sqrt2 * self.b) * log_term;
        let cv_dep = t * d2a / (2.0 * sqrt2 * self.b) * log_term;

        let denom = v * v + 2.0 * self.b * v - self.b * self.b;
        let dp_dt = R_UNIV / (v - self.b) - da / denom;
        let dp_dv = -R_UNIV * t / ((v - self.b) * (v - self.b))
            + 2.0 * aal * (v + self.b) / (denom * denom);

        let cv_mol = (self.cp0(t) - R_UNIV) + cv_dep;
        let cp_mol = cv_mol - t * dp_dt * dp_dt / dp_dv;
        let h = (self.h_ig(t) + h_dep) / m + self.params.h_offset;
        let s = (self.s_ig_t(t) - R_UNIV * (p / self.params.p_ref).ln() + s_dep) / m
            + self.params.s_offset;
        let rho = m / v;
        let e = h - p / rho;
        let cp = cp_mol / m;
        let cv = cv_mol / m;
        // a² = (cp/cv)·(∂p/∂ρ)_T with (∂p/∂ρ)_T = -(v²/M)(∂p/∂v)_T
        let dp_drho = -v * v / m * dp_dv;
        let a2 = (cp / cv) * dp_drho;
        if !(rho > 0.0 && a2 > 0.0 && cp > 0.0 && cv > 0.0) {
            return Err(PropertyError::InversionFailed {
                fluid: self.name().into(),
                iters: 0,
                p,
                t,
                residual: f64::NAN,
            });
        }
        let mu = 1.49e-5 * (t / 300.0).powf(0.79) * (1.0 + 1.8e-3 * rho);
        let k = 0.0166 * (t / 300.0) * (1.0 + 2.2e-3 * rho);
        Ok(ThermoState {
            p,
            t,
            rho,
            e,
            h,
            s,
            cp,
            cv,
            k,
            mu,
            a: a2.sqrt(),
        })
    }
}

/// Real roots of z³ + c2 z² + c1 z + c0 (trigonometric/Cardano form).
fn solve_cubic(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let shift = -c2 / 3.0;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    if disc > 0.0 {
        let sq = disc.sqrt();
        let u = cbrt(-q / 2.0 + sq);
        let w = cbrt(-q / 2.0 - sq);
        vec![u + w + shift]
    } else if p.abs() < 1e-300 {
        vec![shift]
    } else {
        let r = (-p * p * p / 27.0).sqrt();
        let phi = (-q / (2.0 * r)).clamp(-1.0, 1.0).acos();
        let mag = 2.0 * (-p / 3.0).sqrt();
        (0..3)
            .map(|k| mag * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() + shift)
            .collect()
    }
}

fn cbrt(x: f64) -> f64 {
    x.signum() * x.abs().powf(1.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const R_SPEC: f64 = R_UNIV / 44.0095e-3;

    #[test]
    fn ideal_gas_limit_at_low_pressure() {
        let f = Co2PengRobinson::default();
        let st = f.state_from_pt(1e4, 400.0).unwrap();
        let z = st.p / (st.rho * R_SPEC * st.t);
        assert_relative_eq!(z, 1.0, max_relative = 5e-3);
    }

    #[test]
    fn enthalpy_identity_holds() {
        let f = Co2PengRobinson::default();
        for &(p, t) in &[(8.629e6, 320.0), (1.2e7, 520.0), (7.5e6, 305.0), (2e5, 900.0)] {
            let st = f.state_from_pt(p, t).unwrap();
            assert_relative_eq!(st.h, st.e + st.p / st.rho, max_relative = 1e-9);
            assert!(st.cp >= st.cv && st.cv > 0.0);
            assert!(st.a > 0.0 && st.k > 0.0 && st.mu > 0.0);
        }
    }

    #[test]
    fn cp_peaks_along_isobar_near_critical_point() {
        // slightly above the critical pressure, cp along the isobar spikes
        // near the pseudo-critical temperature
        let f = Co2PengRobinson::default();
        let p = 7.6e6;
        let mut best = (0.0f64, 0.0f64);
        for i in 0..200 {
            let t = 290.0 + 40.0 * i as f64 / 199.0;
            let cp = f.state_from_pt(p, t).unwrap().cp;
            if cp > best.1 {
                best = (t, cp);
            }
        }
        let far = f.state_from_pt(p, 500.0).unwrap().cp;
        assert!(best.1 > 3.0 * far, "no cp peak: max {} vs far-field {}", best.1, far);
        assert!(best.0 > 295.0 && best.0 < 325.0, "peak at {} K", best.0);
    }

    #[test]
    fn rho_e_roundtrip() {
        let f = Co2PengRobinson::default();
        let st = f.state_from_pt(1.2e7, 520.0).unwrap();
        let back = f.state_from_rho_e(st.rho, st.e, None).unwrap();
        assert_relative_eq!(back.p, 1.2e7, max_relative = 1e-6);
        assert_relative_eq!(back.t, 520.0, max_relative = 1e-6);
    }

    #[test]
    fn rho_e_roundtrip_with_hint_near_critical() {
        let f = Co2PengRobinson::default();
        let st = f.state_from_pt(8.0e6, 310.0).unwrap();
        let back = f.state_from_rho_e(st.rho, st.e, Some((8.2e6, 315.0))).unwrap();
        assert_relative_eq!(back.p, 8.0e6, max_relative = 1e-6);
        assert_relative_eq!(back.t, 310.0, max_relative = 1e-6);
    }

    #[test]
    fn isentrope_matches_ideal_gas_exponent_at_low_density() {
        let f = Co2PengRobinson::default();
        let inlet = f.state_from_pt(2e4, 500.0).unwrap();
        let gamma = inlet.cp / inlet.cv;
        let outlet = f.isentropic_outlet(inlet.s, 1e4).unwrap();
        let expect = 500.0 * (1e4f64 / 2e4).powf((gamma - 1.0) / gamma);
        assert_relative_eq!(outlet.t, expect, max_relative = 5e-3);
        assert_relative_eq!(outlet.s, inlet.s, max_relative = 1e-8);
    }

    #[test]
    fn isentropic_outlet_at_same_pressure_is_identity() {
        let f = Co2PengRobinson::default();
        let st = f.state_from_pt(8.629e6, 320.0).unwrap();
        let out = f.isentropic_outlet(st.s, 8.629e6).unwrap();
        assert_relative_eq!(out.t, st.t, max_relative = 1e-7);
        assert_relative_eq!(out.rho, st.rho, max_relative = 1e-6);
    }

    #[test]
    fn pe_partials_ideal_gas_check() {
        // ∂ρ/∂p|e ≈ 1/(R T) in the dilute limit
        let f = Co2PengRobinson::default();
        let st = f.state_from_pt(2e4, 400.0).unwrap();
        let pp = f.partials_pe(st.p, st.e).unwrap();
        assert_relative_eq!(pp.drho_dp, 1.0 / (R_SPEC * st.t), max_relative = 1e-2);
        assert!(!pp.one_sided);
    }

    #[test]
    fn pe_partials_richardson_consistency() {
        let f = Co2PengRobinson::default();
        for &(p, e) in &[(1.2e7, 9.0e5), (8.629e6, 7.0e5)] {
            let coarse = crate::props::fd_partials_pe(&f, p, e, 1e-5).unwrap();
            let fine = crate::props::fd_partials_pe(&f, p, e, 5e-6).unwrap();
            assert_relative_eq!(coarse.drho_de, fine.drho_de, max_relative = 1e-4);
            assert_relative_eq!(coarse.drho_dp, fine.drho_dp, max_relative = 1e-4);
            assert_relative_eq!(coarse.dt_de, fine.dt_de, max_relative = 1e-4);
            assert_relative_eq!(coarse.dh_de, fine.dh_de, max_relative = 1e-4);
        }
    }

    #[test]
    fn maxwell_style_consistency() {
        // (∂h/∂p)|T = v − T(∂v/∂T)|p, checked by finite differences
        let f = Co2PengRobinson::default();
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let p = 8.0e6 + 7.0e6 * next();
            let t = 320.0 + 380.0 * next();
            let dp = p * 1e-5;
            let dt = t * 1e-5;
            let hp = f.state_from_pt(p + dp, t).unwrap().h;
            let hm = f.state_from_pt(p - dp, t).unwrap().h;
            let dh_dp = (hp - hm) / (2.0 * dp);
            let vp = 1.0 / f.state_from_pt(p, t + dt).unwrap().rho;
            let vm = 1.0 / f.state_from_pt(p, t - dt).unwrap().rho;
            let st = f.state_from_pt(p, t).unwrap();
            let rhs = 1.0 / st.rho - t * (vp - vm) / (2.0 * dt);
            assert_relative_eq!(dh_dp, rhs, max_relative = 1e-2);
        }
    }

    #[test]
    fn out_of_region_is_reported() {
        let f = Co2PengRobinson::default();
        assert!(f.state_from_pt(1e3, 300.0).is_err());
        assert!(f.state_from_pt(1e7, 100.0).is_err());
    }
}
