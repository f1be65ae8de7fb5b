//! Shaft rotational dynamics: J dN/dt = T_ext - Wdot_load / N.

use crate::error::MapError;

/// Speed below which the load-torque term Wdot/N is considered meaningless.
const N_MIN: f64 = 1.0;

/// Advances the shaft speed over one substep with a classical RK4 stage.
/// `t_ext` (N m) and `wdot_load` (W) are held constant over the step.
pub fn rotor_step(
    j: f64,
    n_s: f64,
    t_ext: f64,
    wdot_load: f64,
    dt: f64,
) -> Result<f64, MapError> {
    let f = |n: f64| -> Result<f64, MapError> {
        if n <= N_MIN {
            return Err(MapError::RotorStall { n_s: n });
        }
        Ok((t_ext - wdot_load / n) / j)
    };
    let k1 = f(n_s)?;
    let k2 = f(n_s + 0.5 * dt * k1)?;
    let k3 = f(n_s + 0.5 * dt * k2)?;
    let k4 = f(n_s + dt * k3)?;
    let n_new = n_s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if n_new <= N_MIN {
        return Err(MapError::RotorStall { n_s: n_new });
    }
    Ok(n_new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn torque_balance_holds_speed_constant() {
        let n = 2000.0;
        let wdot = 254.0e3;
        let t_ext = wdot / n;
        let n2 = rotor_step(0.7, n, t_ext, wdot, 0.01).unwrap();
        assert_abs_diff_eq!(n2, n, epsilon = 1e-9);
    }

    #[test]
    fn free_rotor_accelerates_linearly() {
        let mut n = 100.0;
        for _ in 0..100 {
            n = rotor_step(0.5, n, 2.0, 0.0, 0.01).unwrap();
        }
        // dN/dt = T/J = 4 rad/s^2 over 1 s
        assert_abs_diff_eq!(n, 104.0, epsilon = 1e-9);
    }

    #[test]
    fn stated_inertia_gives_stated_acceleration() {
        // net torque 7 N m on J = 0.7 gives 10 rad/s^2
        let n = 1500.0;
        let wdot = 21.0e3; // load torque 14 N m
        let n2 = rotor_step(0.7, n, 21.0, wdot, 1e-4).unwrap();
        assert_abs_diff_eq!((n2 - n) / 1e-4, 10.0, epsilon = 1e-3);
    }

    #[test]
    fn speed_underflow_is_a_stall_error() {
        match rotor_step(0.7, 1.5, -100.0, 50.0, 0.1) {
            Err(MapError::RotorStall { .. }) => {}
            other => panic!("expected rotor stall, got {other:?}"),
        }
    }
}
