//! Incompressible thermal-oil model: ρ, Cp, k, μ are polynomials in T,
//! e = ∫Cp dT, and pressure is decoupled from the thermal state.

use crate::error::PropertyError;
use crate::props::{FluidProps, PePartials, Region, ThermoState};

#[derive(Debug, Clone)]
pub struct ThermalOil {
    region: Region,
    /// ρ(T) = rho[0] + rho[1] T
    rho_poly: [f64; 2],
    /// Cp(T) = cp[0] + cp[1] T
    cp_poly: [f64; 2],
    /// k(T) = k[0] + k[1] T
    k_poly: [f64; 2],
    /// μ(T) = mu[0] + mu[1] T + mu[2] T²
    mu_poly: [f64; 3],
    t_ref: f64,
    /// Pressure assumed when only the thermal state is known.
    pub p_default: f64,
}

impl Default for ThermalOil {
    fn default() -> Self {
        // representative of a high-temperature synthetic heat-transfer oil
        ThermalOil {
            region: Region {
                p_min: 1e4,
                p_max: 2e7,
                t_min: 280.0,
                t_max: 650.0,
            },
            rho_poly: [1256.7, -0.72],
            cp_poly: [686.4, 3.0],
            k_poly: [0.1588, -8.0e-5],
            mu_poly: [3.51e-2, -1.186e-4, 1.02e-7],
            t_ref: 273.15,
            p_default: 4.0e6,
        }
    }
}

impl ThermalOil {
    fn t_from_e(&self, e: f64) -> f64 {
        // invert the quadratic e(T) = c0 (T - T0) + c1/2 (T² - T0²)
        let (c0, c1) = (self.cp_poly[0], self.cp_poly[1]);
        let t0 = self.t_ref;
        if c1.abs() < 1e-12 {
            return t0 + e / c0;
        }
        let disc = (c0 + c1 * t0) * (c0 + c1 * t0) + 2.0 * c1 * e;
        (-c0 + disc.max(0.0).sqrt()) / c1
    }

    fn e_from_t(&self, t: f64) -> f64 {
        let (c0, c1) = (self.cp_poly[0], self.cp_poly[1]);
        let t0 = self.t_ref;
        c0 * (t - t0) + 0.5 * c1 * (t * t - t0 * t0)
    }
}

impl FluidProps for ThermalOil {
    fn name(&self) -> &str {
        "oil"
    }

    fn region(&self) -> Region {
        self.region
    }

    fn is_incompressible(&self) -> bool {
        true
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
        let rho = self.rho_poly[0] + self.rho_poly[1] * t;
        let cp = self.cp_poly[0] + self.cp_poly[1] * t;
        let k = self.k_poly[0] + self.k_poly[1] * t;
        let mu = self.mu_poly[0] + t * (self.mu_poly[1] + t * self.mu_poly[2]);
        let e = self.e_from_t(t);
        let (c0, c1) = (self.cp_poly[0], self.cp_poly[1]);
        let t0 = self.t_ref;
        let s = c0 * (t / t0).ln() + c1 * (t - t0);
        Ok(ThermoState {
            p,
            t,
            rho,
            e,
            h: e + p / rho,
            s,
            cp,
            cv: cp,
            k,
            mu,
            // incompressible: an effectively stiff (large, finite) sound speed
            a: 1.0e3,
        })
    }

    fn state_from_rho_e(
        &self,
        _rho: f64,
        e: f64,
        hint: Option<(f64, f64)>,
    ) -> Result<ThermoState, PropertyError> {
        // e alone determines T; density input is redundant for the
        // incompressible model, pressure comes from the hint or the default
        let p = hint.map(|(p, _)| p).unwrap_or(self.p_default);
        self.state_from_pt(p, self.t_from_e(e))
    }

    fn state_from_pe(
        &self,
        p: f64,
        e: f64,
        _hint_t: Option<f64>,
    ) -> Result<ThermoState, PropertyError> {
        self.state_from_pt(p, self.t_from_e(e))
    }

    fn partials_pe(&self, p: f64, e: f64) -> Result<PePartials, PropertyError> {
        let st = self.state_from_pe(p, e, None)?;
        let dt_de = 1.0 / st.cp;
        Ok(PePartials {
            drho_de: self.rho_poly[1] * dt_de,
            drho_dp: 0.0,
            dt_de,
            dt_dp: 0.0,
            dh_de: 1.0 - p / (st.rho * st.rho) * self.rho_poly[1] * dt_de,
            one_sided: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn energy_is_pressure_independent() {
        let f = ThermalOil::default();
        let a = f.state_from_pt(4.0e6, 573.15).unwrap();
        let b = f.state_from_pt(1.0e5, 573.15).unwrap();
        assert_eq!(a.e, b.e);
        assert!(a.h > b.h); // h carries the p/rho term
    }

    #[test]
    fn energy_determines_temperature() {
        let f = ThermalOil::default();
        let st = f.state_from_pt(4.0e6, 500.0).unwrap();
        let back = f.state_from_rho_e(0.0, st.e, Some((4.0e6, 0.0))).unwrap();
        assert_relative_eq!(back.t, 500.0, max_relative = 1e-12);
    }

    #[test]
    fn incompressible_partials() {
        let f = ThermalOil::default();
        let st = f.state_from_pt(4.0e6, 570.0).unwrap();
        let pp = f.partials_pe(st.p, st.e).unwrap();
        assert_eq!(pp.drho_dp, 0.0);
        assert_relative_eq!(pp.dt_de, 1.0 / st.cp, max_relative = 1e-12);
        // against finite differences of the generic path
        let fd = crate::props::fd_partials_pe(&f, st.p, st.e, 1e-5).unwrap();
        assert_relative_eq!(pp.drho_de, fd.drho_de, max_relative = 1e-4);
        assert_relative_eq!(pp.dt_de, fd.dt_de, max_relative = 1e-4);
    }

    #[test]
    fn properties_positive_over_region() {
        let f = ThermalOil::default();
        for i in 0..=40 {
            let t = 280.0 + 370.0 * i as f64 / 40.0;
            let st = f.state_from_pt(4.0e6, t).unwrap();
            assert!(st.rho > 600.0 && st.cp > 500.0 && st.k > 0.05 && st.mu > 1e-4);
        }
    }
}
