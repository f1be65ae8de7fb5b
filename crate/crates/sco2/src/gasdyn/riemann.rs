//! Exact Riemann solver for a calorically perfect gas (Toro's two-shock /
//! two-rarefaction pressure iteration). Serves as the analytic oracle for
//! shock-tube verification of the finite-volume solver.

/// One side of the discontinuity.
#[derive(Debug, Clone, Copy)]
pub struct RiemannSide {
    pub rho: f64,
    pub v: f64,
    pub p: f64,
}

/// Self-similar solution of the Riemann problem; sample by ξ = x/t.
#[derive(Debug, Clone)]
pub struct RiemannFan {
    gamma: f64,
    left: RiemannSide,
    right: RiemannSide,
    p_star: f64,
    v_star: f64,
}

fn sound_speed(gamma: f64, s: &RiemannSide) -> f64 {
    (gamma * s.p / s.rho).sqrt()
}

/// f_K(p) of Toro: velocity change across the left/right wave, plus its
/// derivative in p.
fn wave_fn(gamma: f64, s: &RiemannSide, p: f64) -> (f64, f64) {
    let a = sound_speed(gamma, s);
    if p > s.p {
        // shock
        let ak = 2.0 / ((gamma + 1.0) * s.rho);
        let bk = (gamma - 1.0) / (gamma + 1.0) * s.p;
        let q = (ak / (p + bk)).sqrt();
        let f = (p - s.p) * q;
        let df = q * (1.0 - 0.5 * (p - s.p) / (p + bk));
        (f, df)
    } else {
        // rarefaction
        let pr = p / s.p;
        let ex = (gamma - 1.0) / (2.0 * gamma);
        let f = 2.0 * a / (gamma - 1.0) * (pr.powf(ex) - 1.0);
        let df = pr.powf(-(gamma + 1.0) / (2.0 * gamma)) / (s.rho * a);
        (f, df)
    }
}

/// Solves for the star-region pressure/velocity. Panics only on vacuum
/// generation, which the verification cases never approach.
pub fn solve_riemann(gamma: f64, left: RiemannSide, right: RiemannSide) -> RiemannFan {
    let dv = right.v - left.v;
    // two-rarefaction estimate as the starting guess
    let (al, ar) = (sound_speed(gamma, &left), sound_speed(gamma, &right));
    let z = (gamma - 1.0) / (2.0 * gamma);
    let guess = ((al + ar - 0.5 * (gamma - 1.0) * dv)
        / (al / left.p.powf(z) + ar / right.p.powf(z)))
    .powf(1.0 / z);
    let mut p = guess.max(1e-12 * left.p.min(right.p));
    for _ in 0..100 {
        let (fl, dfl) = wave_fn(gamma, &left, p);
        let (fr, dfr) = wave_fn(gamma, &right, p);
        let g = fl + fr + dv;
        let step = g / (dfl + dfr);
        let p_new = (p - step).max(1e-14 * left.p.min(right.p));
        if (p_new - p).abs() <= 1e-14 * p {
            p = p_new;
            break;
        }
        p = p_new;
    }
    let (fl, _) = wave_fn(gamma, &left, p);
    let (fr, _) = wave_fn(gamma, &right, p);
    let v_star = 0.5 * (left.v + right.v) + 0.5 * (fr - fl);
    RiemannFan {
        gamma,
        left,
        right,
        p_star: p,
        v_star,
    }
}

impl RiemannFan {
    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    pub fn v_star(&self) -> f64 {
        self.v_star
    }

    /// State (ρ, v, p) at similarity coordinate ξ = x/t.
    pub fn sample(&self, xi: f64) -> (f64, f64, f64) {
        let g = self.gamma;
        let gm = g - 1.0;
        let gp = g + 1.0;
        if xi <= self.v_star {
            // left of the contact
            let s = &self.left;
            let a = sound_speed(g, s);
            if self.p_star > s.p {
                // left shock
                let pr = self.p_star / s.p;
                let speed = s.v - a * (gp / (2.0 * g) * pr + gm / (2.0 * g)).sqrt();
                if xi < speed {
                    (s.rho, s.v, s.p)
                } else {
                    let rho = s.rho * (pr + gm / gp) / (gm / gp * pr + 1.0);
                    (rho, self.v_star, self.p_star)
                }
            } else {
                // left rarefaction
                let a_star = a * (self.p_star / s.p).powf(gm / (2.0 * g));
                let head = s.v - a;
                let tail = self.v_star - a_star;
                if xi < head {
                    (s.rho, s.v, s.p)
                } else if xi > tail {
                    let rho = s.rho * (self.p_star / s.p).powf(1.0 / g);
                    (rho, self.v_star, self.p_star)
                } else {
                    let v = 2.0 / gp * (a + gm / 2.0 * s.v + xi);
                    let a_loc = 2.0 / gp * (a + gm / 2.0 * (s.v - xi));
                    let rho = s.rho * (a_loc / a).powf(2.0 / gm);
                    (rho, v, s.p * (a_loc / a).powf(2.0 * g / gm))
                }
            }
        } else {
            // right of the contact (mirror)
            let s = &self.right;
            let a = sound_speed(g, s);
            if self.p_star > s.p {
                let pr = self.p_star / s.p;
                let speed = s.v + a * (gp / (2.0 * g) * pr + gm / (2.0 * g)).sqrt();
                if xi > speed {
                    (s.rho, s.v, s.p)
                } else {
                    let rho = s.rho * (pr + gm / gp) / (gm / gp * pr + 1.0);
                    (rho, self.v_star, self.p_star)
                }
            } else {
                let a_star = a * (self.p_star / s.p).powf(gm / (2.0 * g));
                let head = s.v + a;
                let tail = self.v_star + a_star;
                if xi > head {
                    (s.rho, s.v, s.p)
                } else if xi < tail {
                    let rho = s.rho * (self.p_star / s.p).powf(1.0 / g);
                    (rho, self.v_star, self.p_star)
                } else {
                    let v = 2.0 / gp * (-a + gm / 2.0 * s.v + xi);
                    let a_loc = 2.0 / gp * (a - gm / 2.0 * (s.v - xi));
                    let rho = s.rho * (a_loc / a).powf(2.0 / gm);
                    (rho, v, s.p * (a_loc / a).powf(2.0 * g / gm))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SOD_L: RiemannSide = RiemannSide {
        rho: 1.0,
        v: 0.0,
        p: 1.0,
    };
    const SOD_R: RiemannSide = RiemannSide {
        rho: 0.125,
        v: 0.0,
        p: 0.1,
    };

    #[test]
    fn sod_star_state_matches_published_values() {
        let fan = solve_riemann(1.4, SOD_L, SOD_R);
        // Toro, Table 4.2 (test 1)
        assert_relative_eq!(fan.p_star(), 0.30313, max_relative = 5e-5);
        assert_relative_eq!(fan.v_star(), 0.92745, max_relative = 5e-5);
    }

    #[test]
    fn sod_sampled_regions_are_consistent() {
        let fan = solve_riemann(1.4, SOD_L, SOD_R);
        // undisturbed far field
        assert_eq!(fan.sample(-2.0), (1.0, 0.0, 1.0));
        assert_eq!(fan.sample(2.0), (0.125, 0.0, 0.1));
        // left of contact: density on the left isentrope
        let (rho, v, p) = fan.sample(0.5);
        assert_relative_eq!(v, fan.v_star(), max_relative = 1e-10);
        assert_relative_eq!(rho, (p / 1.0f64).powf(1.0 / 1.4), max_relative = 1e-10);
        // shocked right state satisfies Rankine-Hugoniot density ratio
        let (rho_s, _, p_s) = fan.sample(1.5);
        let pr = p_s / 0.1;
        let expect = 0.125 * (pr + 1.0 / 6.0) / (pr / 6.0 + 1.0);
        assert_relative_eq!(rho_s, expect, max_relative = 1e-10);
    }

    #[test]
    fn symmetric_collision_has_zero_contact_velocity() {
        let l = RiemannSide {
            rho: 1.0,
            v: 1.0,
            p: 1.0,
        };
        let r = RiemannSide {
            rho: 1.0,
            v: -1.0,
            p: 1.0,
        };
        let fan = solve_riemann(1.4, l, r);
        assert!(fan.v_star().abs() < 1e-12);
        assert!(fan.p_star() > 1.0);
    }
}
