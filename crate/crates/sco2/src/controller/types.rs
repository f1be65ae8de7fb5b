//! Tuning, constraint, and result types for the tracking MPC.

use crate::numerics::QpStatus;

/// Controller tuning. The input-move weights are stated over
/// [torque rate, oil-flow acceleration]; with `scale_oil_move_rate` the
/// oil-reference moves are divided by the sampling time so the second
/// weight applies to an acceleration-like quantity.
#[derive(Debug, Clone)]
pub struct MpcTuning {
    /// Controller sampling time, s.
    pub dt: f64,
    /// Prediction horizon in steps.
    pub horizon: usize,
    /// Tracked-output weights: net power W, turbine inlet temperature K.
    pub q_z: [f64; 2],
    /// Input-move weights: torque rate, oil acceleration.
    pub r_du: [f64; 2],
    /// Linear penalty multiplier on the normalized speed-constraint slack.
    pub w_speed: f64,
    /// Linear penalty multiplier on the normalized temperature slack.
    pub w_temp: f64,
    /// Margin applied inside both compressor speed bounds.
    pub speed_margin: f64,
    /// Divide oil-reference moves by dt in the R penalty.
    pub scale_oil_move_rate: bool,
    /// Small quadratic slack term keeping the QP strictly convex.
    pub slack_reg: f64,
    /// Ridge added to the stage cost before the terminal Lyapunov solve.
    pub lyapunov_reg: f64,
    /// Discount applied to the dynamics in the terminal-cost equation so
    /// that marginally stable modes (the model carries exact unit modes
    /// from its algebraically slaved pressure and flow states) stay
    /// summable.
    pub terminal_discount: f64,
}

impl Default for MpcTuning {
    fn default() -> Self {
        Self {
            dt: 0.3,
            horizon: 30,
            q_z: [1.0e-3, 2.0e1],
            r_du: [2.0e2, 1.0e5],
            w_speed: 1.0e6,
            w_temp: 2.0e3,
            speed_margin: 0.05,
            scale_oil_move_rate: true,
            slack_reg: 1.0,
            lyapunov_reg: 1.0e-9,
            terminal_discount: 0.98,
        }
    }
}

impl MpcTuning {
    pub fn validate(&self) {
        assert!(self.horizon >= 1);
        assert!(self.dt > 0.0);
        assert!(self.q_z.iter().all(|&w| w > 0.0));
        assert!(self.r_du.iter().all(|&w| w > 0.0));
        assert!(self.w_speed > 0.0 && self.w_temp > 0.0);
        assert!(self.slack_reg > 0.0);
        assert!(self.terminal_discount > 0.0 && self.terminal_discount <= 1.0);
    }
}

/// Hard input bounds and the bounds of the softened state/output
/// constraints. Speed bounds are absolute shaft speeds in rad/s.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub t_in_t_max: f64,
    pub n_c_max: f64,
    pub torque_min: f64,
    pub torque_max: f64,
    pub torque_rate_min: f64,
    pub torque_rate_max: f64,
    pub mdot_oil_min: f64,
    pub mdot_oil_max: f64,
    pub mdot_oil_accel_min: f64,
    pub mdot_oil_accel_max: f64,
}

impl ConstraintSet {
    /// Stock bounds; the speed ceiling is 126% of the design speed.
    pub fn for_design_speed(n_design: f64) -> Self {
        Self {
            t_in_t_max: 570.0,
            n_c_max: 1.26 * n_design,
            torque_min: 0.0,
            torque_max: 200.0,
            torque_rate_min: -15.0,
            torque_rate_max: 15.0,
            mdot_oil_min: 3.0,
            mdot_oil_max: 25.0,
            mdot_oil_accel_min: -1.2,
            mdot_oil_accel_max: 1.2,
        }
    }

    pub fn validate(&self) {
        assert!(self.torque_min < self.torque_max);
        assert!(self.torque_rate_min < self.torque_rate_max);
        assert!(self.mdot_oil_min < self.mdot_oil_max);
        assert!(self.mdot_oil_accel_min < self.mdot_oil_accel_max);
        assert!(self.n_c_max > 0.0 && self.t_in_t_max > 0.0);
    }
}

/// Result of one control update.
#[derive(Debug, Clone)]
pub struct ControlSolution {
    /// Absolute input sequence over the horizon: [torque rate, oil ref].
    pub u_sequence: Vec<[f64; 2]>,
    /// First move, absolute, within the hard input bounds exactly.
    pub u_star: [f64; 2],
    /// Motor torque after integrating the first move over one interval.
    pub torque_next: f64,
    /// Predicted tracked outputs over the horizon (disturbance included).
    pub predicted_z: Vec<[f64; 2]>,
    /// Temperature-constraint slack per step, K.
    pub slack_temp: Vec<f64>,
    /// Speed-constraint slack per step, rad/s.
    pub slack_speed: Vec<f64>,
    pub qp_status: QpStatus,
    pub qp_iterations: usize,
    pub kkt_residual: f64,
    /// Wall-clock time of the whole update, s.
    pub solve_time: f64,
    /// Minimum-speed bound used this update, rad/s.
    pub n_c_min: f64,
    /// The surge bound could not be resolved; the last valid one was used.
    pub surge_fallback: bool,
    /// Target system was singular; a least-squares target was used.
    pub target_least_squares: bool,
    /// Terminal cost fell back to the stage cost (unstable discretization).
    pub lyapunov_fallback: bool,
    /// QP failed; the previous input was held.
    pub degraded: bool,
}

/// One CSV row of the controller log.
#[derive(Debug, Clone)]
pub struct ControlRecord {
    pub time: f64,
    pub r: [f64; 2],
    pub z: [f64; 2],
    pub u_star: [f64; 2],
    pub torque: f64,
    pub n_c_min: f64,
    pub slack_temp_max: f64,
    pub slack_speed_max: f64,
    pub qp_iterations: usize,
    pub kkt_residual: f64,
    pub solve_time: f64,
    pub degraded: bool,
}

impl ControlRecord {
    pub fn csv_header() -> &'static str {
        "time,w_ref,t_ref,w_net,t_in_t,torque_rate,mdot_oil_ref,torque,\
         n_c_min,slack_temp_max,slack_speed_max,qp_iterations,kkt_residual,\
         solve_time,degraded"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{:.4},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{},{:.3e},{:.6e},{}",
            self.time,
            self.r[0],
            self.r[1],
            self.z[0],
            self.z[1],
            self.u_star[0],
            self.u_star[1],
            self.torque,
            self.n_c_min,
            self.slack_temp_max,
            self.slack_speed_max,
            self.qp_iterations,
            self.kkt_residual,
            self.solve_time,
            self.degraded,
        )
    }
}
