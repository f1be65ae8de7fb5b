//! Calorically perfect ideal gas; the analytic baseline for solver
//! verification (shock-tube cases have exact solutions against it).

use crate::error::PropertyError;
use crate::props::{FluidProps, Region, ThermoState};

#[derive(Debug, Clone)]
pub struct IdealGas {
    pub name: String,
    pub r_specific: f64,
    pub gamma: f64,
    pub k: f64,
    pub mu: f64,
    region: Region,
}

impl IdealGas {
    pub fn new(name: &str, r_specific: f64, gamma: f64) -> Self {
        IdealGas {
            name: name.to_string(),
            r_specific,
            gamma,
            k: 0.026,
            mu: 1.8e-5,
            // floor well below 1 so nondimensional test problems fit
            region: Region {
                p_min: 1e-6,
                p_max: 1e9,
                t_min: 1e-3,
                t_max: 1e5,
            },
        }
    }

    pub fn air() -> Self {
        IdealGas::new("air", 287.05, 1.4)
    }
}

impl FluidProps for IdealGas {
    fn name(&self) -> &str {
        &self.name
    }

    fn region(&self) -> Region {
        self.region
    }

    fn state_from_pt(&self, p: f64, t: f64) -> Result<ThermoState, PropertyError> {
        if !self.region.contains(p, t) {
            return Err(PropertyError::OutOfRegion {
                fluid: self.name.clone(),
                var1: "p",
                var2: "T",
                v1: p,
                v2: t,
                bounds: self.region.describe(),
            });
        }
        let r = self.r_specific;
        let g = self.gamma;
        let cv = r / (g - 1.0);
        let cp = cv + r;
        let rho = p / (r * t);
        let e = cv * t;
        Ok(ThermoState {
            p,
            t,
            rho,
            e,
            h: cp * t,
            s: cp * t.ln() - r * p.ln(),
            cp,
            cv,
            k: self.k,
            mu: self.mu,
            a: (g * r * t).sqrt(),
        })
    }

    fn state_from_rho_e(
        &self,
        rho: f64,
        e: f64,
        _hint: Option<(f64, f64)>,
    ) -> Result<ThermoState, PropertyError> {
        let t = e * (self.gamma - 1.0) / self.r_specific;
        self.state_from_pt(rho * self.r_specific * t, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closures_are_exact() {
        let f = IdealGas::air();
        let st = f.state_from_pt(101_325.0, 300.0).unwrap();
        assert_relative_eq!(st.rho, 101_325.0 / (287.05 * 300.0), max_relative = 1e-14);
        assert_relative_eq!(st.a, (1.4 * 287.05 * 300.0f64).sqrt(), max_relative = 1e-14);
        let back = f.state_from_rho_e(st.rho, st.e, None).unwrap();
        assert_relative_eq!(back.p, st.p, max_relative = 1e-12);
        assert_relative_eq!(back.t, st.t, max_relative = 1e-12);
    }

    #[test]
    fn isentrope_follows_gamma_exponent() {
        let f = IdealGas::air();
        let st = f.state_from_pt(2e5, 400.0).unwrap();
        let out = f.isentropic_outlet(st.s, 1e5).unwrap();
        let expect = 400.0 * (0.5f64).powf(0.4 / 1.4);
        assert_relative_eq!(out.t, expect, max_relative = 1e-7);
    }
}
