//! AUSMDV interface flux (Wada & Liou): velocity/pressure splittings with a
//! pressure-gradient-sensing blend of the AUSMV and AUSMD momentum fluxes.

/// Primitive interface state on one side of a face.
#[derive(Debug, Clone, Copy)]
pub struct FaceState {
    pub rho: f64,
    pub v: f64,
    pub p: f64,
    /// Specific static enthalpy.
    pub h: f64,
    /// Speed of sound.
    pub a: f64,
}

impl FaceState {
    /// Total specific enthalpy h + v²/2.
    pub fn h_total(&self) -> f64 {
        self.h + 0.5 * self.v * self.v
    }
}

/// Pressure-gradient sensitivity of the AUSMV/AUSMD blend.
const K_BLEND: f64 = 10.0;

/// Interface flux per unit area: (mass, momentum, energy).
pub fn ausmdv_flux(left: &FaceState, right: &FaceState) -> [f64; 3] {
    let c_m = left.a.max(right.a);
    let pr_l = left.p / left.rho;
    let pr_r = right.p / right.rho;
    let alpha_l = 2.0 * pr_l / (pr_l + pr_r);
    let alpha_r = 2.0 * pr_r / (pr_l + pr_r);

    let (u_l, u_r) = (left.v, right.v);
    // split velocities and pressures; outside |u| <= c_m they reduce to
    // plain upwinding
    let u_l_plus = if u_l.abs() <= c_m {
        let base = 0.5 * (u_l + u_l.abs());
        alpha_l * ((u_l + c_m) * (u_l + c_m) / (4.0 * c_m) - base) + base
    } else {
        0.5 * (u_l + u_l.abs())
    };
    let u_r_minus = if u_r.abs() <= c_m {
        let base = 0.5 * (u_r - u_r.abs());
        alpha_r * (-(u_r - c_m) * (u_r - c_m) / (4.0 * c_m) - base) + base
    } else {
        0.5 * (u_r - u_r.abs())
    };
    let p_l_plus = if u_l.abs() <= c_m {
        let m = u_l / c_m;
        left.p * (m + 1.0) * (m + 1.0) * (2.0 - m) / 4.0
    } else {
        left.p * 0.5 * (u_l + u_l.abs()) / u_l
    };
    let p_r_minus = if u_r.abs() <= c_m {
        let m = u_r / c_m;
        right.p * (m - 1.0) * (m - 1.0) * (2.0 + m) / 4.0
    } else {
        right.p * 0.5 * (u_r - u_r.abs()) / u_r
    };

    let mass = u_l_plus * left.rho + u_r_minus * right.rho;
    let p_half = p_l_plus + p_r_minus;

    // AUSMV carries each side's own momentum; AUSMD upwinds the shared mass
    // flux. Blend weight rises with the interface pressure jump.
    let mom_v = u_l_plus * left.rho * u_l + u_r_minus * right.rho * u_r;
    let mom_d = 0.5 * (mass * (u_l + u_r) - mass.abs() * (u_r - u_l));
    let s = 0.5 * (K_BLEND * (right.p - left.p).abs() / left.p.min(right.p)).min(1.0);
    let momentum = (0.5 + s) * mom_v + (0.5 - s) * mom_d + p_half;

    let (h_l, h_r) = (left.h_total(), right.h_total());
    let energy = 0.5 * (mass * (h_l + h_r) - mass.abs() * (h_r - h_l));

    [mass, momentum, energy]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state(rho: f64, v: f64, p: f64, gamma: f64) -> FaceState {
        FaceState {
            rho,
            v,
            p,
            h: gamma / (gamma - 1.0) * p / rho,
            a: (gamma * p / rho).sqrt(),
        }
    }

    #[test]
    fn stagnant_uniform_carries_only_pressure() {
        let s = state(1.2, 0.0, 1.0e5, 1.4);
        let f = ausmdv_flux(&s, &s);
        assert_relative_eq!(f[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(f[1], 1.0e5, max_relative = 1e-12);
        assert_relative_eq!(f[2], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn supersonic_flow_is_fully_upwinded() {
        let gamma = 1.4;
        let l = state(1.0, 3.0 * (gamma * 1.0e5 / 1.0f64).sqrt(), 1.0e5, gamma);
        let r = state(0.7, 3.0 * (gamma * 1.0e5 / 1.0f64).sqrt(), 0.8e5, gamma);
        let f = ausmdv_flux(&l, &r);
        assert_relative_eq!(f[0], l.rho * l.v, max_relative = 1e-12);
        assert_relative_eq!(f[1], l.rho * l.v * l.v + l.p, max_relative = 1e-12);
        assert_relative_eq!(f[2], l.rho * l.v * l.h_total(), max_relative = 1e-12);
    }

    #[test]
    fn mirror_face_has_zero_mass_and_energy_flux() {
        // reflective-wall ghost: same state, opposite velocity
        let l = state(1.0, 12.5, 1.0e5, 1.4);
        let r = FaceState { v: -l.v, ..l };
        let f = ausmdv_flux(&l, &r);
        assert!(f[0].abs() < 1e-13, "mass flux {}", f[0]);
        assert!(f[2].abs() < 1e-7, "energy flux {}", f[2]);
    }

    #[test]
    fn subsonic_uniform_stream_is_exact() {
        let s = state(2.0, 40.0, 2.0e5, 1.4);
        let f = ausmdv_flux(&s, &s);
        assert_relative_eq!(f[0], s.rho * s.v, max_relative = 1e-12);
        assert_relative_eq!(f[1], s.rho * s.v * s.v + s.p, max_relative = 1e-12);
        assert_relative_eq!(f[2], s.rho * s.v * s.h_total(), max_relative = 1e-12);
    }
}
