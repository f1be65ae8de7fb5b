//! One controller step: relinearize, rebuild the condensed QP, solve, and
//! apply the first move.

use std::time::Instant;

use crate::error::SimError;
use crate::numerics::{kkt_residuals, solve_qp, QpStatus};
use crate::reduced::{compute_min_compressor_speed, ReducedInput, ReducedModel, ReducedState};

use super::condense::{build_qp, discretize_model, QpInputs};
use super::target::compute_target;
use super::types::{ConstraintSet, ControlSolution, MpcTuning};

/// Receding-horizon tracking controller. Owns the motor-torque integrator
/// and the last applied inputs between updates.
pub struct Controller<'a> {
    pub model: &'a ReducedModel<'a>,
    pub tuning: MpcTuning,
    pub constraints: ConstraintSet,
    /// Applied motor torque, N m.
    pub torque: f64,
    /// Last applied torque rate, N m/s.
    pub torque_rate: f64,
    /// Last applied oil-flow reference, kg/s.
    pub mdot_oil_ref: f64,
    /// Last successfully resolved surge speed bound, rad/s.
    pub last_n_c_min: f64,
}

impl<'a> Controller<'a> {
    pub fn new(
        model: &'a ReducedModel<'a>,
        tuning: MpcTuning,
        constraints: ConstraintSet,
        torque0: f64,
        mdot_oil_ref0: f64,
    ) -> Self {
        tuning.validate();
        constraints.validate();
        assert!(
            (constraints.torque_min..=constraints.torque_max).contains(&torque0),
            "initial torque outside its bounds"
        );
        Controller {
            model,
            tuning,
            constraints,
            torque: torque0,
            torque_rate: 0.0,
            mdot_oil_ref: mdot_oil_ref0,
            last_n_c_min: 0.0,
        }
    }

    /// Clamp a torque rate to the slew bounds and, when both can be met,
    /// to the rates that keep the integrated torque inside its bounds.
    fn clamp_torque_rate(&self, rate: f64) -> f64 {
        let cons = &self.constraints;
        let dt = self.tuning.dt;
        let lo = cons
            .torque_rate_min
            .max((cons.torque_min - self.torque) / dt);
        let hi = cons
            .torque_rate_max
            .min((cons.torque_max - self.torque) / dt);
        if lo <= hi {
            rate.clamp(lo, hi)
        } else {
            rate.clamp(cons.torque_rate_min, cons.torque_rate_max)
        }
    }

    /// Clamp an oil reference to its range and to the move the pump's
    /// acceleration limit allows from the previous reference.
    fn clamp_oil_ref(&self, oil_ref: f64) -> f64 {
        let cons = &self.constraints;
        let dt = self.tuning.dt;
        let lo = cons
            .mdot_oil_min
            .max(self.mdot_oil_ref + dt * cons.mdot_oil_accel_min);
        let hi = cons
            .mdot_oil_max
            .min(self.mdot_oil_ref + dt * cons.mdot_oil_accel_max);
        oil_ref.clamp(lo.min(hi), hi.max(lo))
    }

    /// Apply a first move, integrating the torque and storing the applied
    /// inputs for the next update's move penalty.
    fn apply(&mut self, rate: f64, oil_ref: f64) -> (f64, f64, f64) {
        let cons = &self.constraints;
        let rate = self.clamp_torque_rate(rate);
        let oil_ref = self.clamp_oil_ref(oil_ref);
        let torque_next = (self.torque + rate * self.tuning.dt)
            .clamp(cons.torque_min, cons.torque_max);
        self.torque = torque_next;
        self.torque_rate = rate;
        self.mdot_oil_ref = oil_ref;
        assert!(
            (cons.torque_min..=cons.torque_max).contains(&self.torque),
            "integrated torque left its bounds"
        );
        (rate, oil_ref, torque_next)
    }

    /// Surge-limited minimum speed at the given exhaust pressure, flow
    /// mismatch, and turbine inlet temperature. An unresolvable bound keeps
    /// the last valid one and reports the fallback.
    pub fn surge_bound(
        &mut self,
        p_out_t: f64,
        delta_mdot: f64,
        t_in_t: f64,
    ) -> (f64, bool) {
        match compute_min_compressor_speed(
            self.model.comp,
            self.model.turb,
            self.model.co2,
            p_out_t,
            delta_mdot,
            t_in_t,
        ) {
            Ok(n) => {
                self.last_n_c_min = n;
                (n, false)
            }
            Err(_) => (self.last_n_c_min, true),
        }
    }

    /// Held-input fallback used when the QP cannot be solved.
    #[allow(clippy::too_many_arguments)]
    fn degraded_solution(
        &mut self,
        started: Instant,
        n_c_min: f64,
        surge_fallback: bool,
        target_least_squares: bool,
        lyapunov_fallback: bool,
        qp_status: QpStatus,
        qp_iterations: usize,
    ) -> ControlSolution {
        let (rate, oil_ref, torque_next) = self.apply(self.torque_rate, self.mdot_oil_ref);
        ControlSolution {
            u_sequence: vec![[rate, oil_ref]; self.tuning.horizon],
            u_star: [rate, oil_ref],
            torque_next,
            predicted_z: vec![],
            slack_temp: vec![],
            slack_speed: vec![],
            qp_status,
            qp_iterations,
            kkt_residual: f64::INFINITY,
            solve_time: started.elapsed().as_secs_f64(),
            n_c_min,
            surge_fallback,
            target_least_squares,
            lyapunov_fallback,
            degraded: true,
        }
    }

    /// One receding-horizon update at the state estimate `x_hat` with
    /// output-disturbance estimate `d_hat`, tracking the reference
    /// r = [net power W, turbine inlet temperature K].
    pub fn control_update(
        &mut self,
        x_hat: &ReducedState,
        d_hat: &[f64; 4],
        r: [f64; 2],
    ) -> Result<ControlSolution, SimError> {
        let started = Instant::now();
        let model = self.model;
        let u0 = ReducedInput {
            torque: self.torque,
            torque_rate: 0.0,
            mdot_oil_ref: self.mdot_oil_ref,
        };

        let lin = model.linearize(x_hat, &u0)?;

        let t_in_t = model.turbine_inlet_temperature(x_hat)?;
        let (n_c_min, surge_fallback) = self.surge_bound(
            model.cfg.p_out_stag,
            x_hat.mdot_t - x_hat.mdot_c,
            t_in_t,
        );

        let target = compute_target(&lin, r, d_hat)?;
        let dm = discretize_model(&lin, &self.tuning)?;

        let n = lin.a.rows();
        let x0_rel = vec![0.0; n + 1];
        let mut x_r = target.x_rel.clone();
        x_r.push(target.u_rel[0]);
        let u0_abs = [u0.torque_rate, u0.mdot_oil_ref];
        let u_prev_rel = [
            self.torque_rate - u0_abs[0],
            self.mdot_oil_ref - u0_abs[1],
        ];

        let qp = build_qp(
            &dm,
            &self.tuning,
            &self.constraints,
            &QpInputs {
                x0_rel: &x0_rel,
                x_r: &x_r,
                u_prev_rel,
                u0_abs,
                d_hat: *d_hat,
                torque_now: self.torque,
                n_c0: x_hat.n_c,
                n_c_min,
                i_n_c: model.layout.i_n_c(),
                n_scale: model.comp.design_speed,
            },
        );

        let sol = match solve_qp(&qp.problem, &vec![0.0; qp.problem.g.len()]) {
            Ok(sol) if sol.status == QpStatus::Optimal => sol,
            Ok(sol) => {
                return Ok(self.degraded_solution(
                    started,
                    n_c_min,
                    surge_fallback,
                    target.least_squares,
                    dm.lyapunov_fallback,
                    sol.status,
                    sol.iterations,
                ));
            }
            Err(_) => {
                return Ok(self.degraded_solution(
                    started,
                    n_c_min,
                    surge_fallback,
                    target.least_squares,
                    dm.lyapunov_fallback,
                    QpStatus::Infeasible,
                    0,
                ));
            }
        };
        let kkt = kkt_residuals(&qp.problem, &sol).max();

        let hp = self.tuning.horizon;
        let u_sequence: Vec<[f64; 2]> = (0..hp)
            .map(|i| {
                [
                    u0_abs[0] + sol.x[2 * i],
                    u0_abs[1] + sol.x[2 * i + 1],
                ]
            })
            .collect();
        let predicted_z: Vec<[f64; 2]> = (1..=hp)
            .map(|i| {
                let mut x_i = qp.free[i - 1].clone();
                for (r_x, row) in x_i.iter_mut().zip(0..) {
                    for a in 0..qp.n_u {
                        *r_x += qp.su[i - 1][(row, a)] * sol.x[a];
                    }
                }
                let z = dm.c_z.matvec(&x_i);
                [z[0] + dm.g0[0], z[1] + dm.g0[1] + d_hat[1]]
            })
            .collect();
        let slack_temp: Vec<f64> =
            (1..=hp).map(|i| sol.x[qp.i_slack_temp(i)]).collect();
        let slack_speed: Vec<f64> =
            (1..=hp).map(|i| sol.x[qp.i_slack_speed(i)]).collect();

        let (rate, oil_ref, torque_next) =
            self.apply(u_sequence[0][0], u_sequence[0][1]);

        Ok(ControlSolution {
            u_sequence,
            u_star: [rate, oil_ref],
            torque_next,
            predicted_z,
            slack_temp,
            slack_speed,
            qp_status: sol.status,
            qp_iterations: sol.iterations,
            kkt_residual: kkt,
            solve_time: started.elapsed().as_secs_f64(),
            n_c_min,
            surge_fallback,
            target_least_squares: target.least_squares,
            lyapunov_fallback: dm.lyapunov_fallback,
            degraded: false,
        })
    }
}
