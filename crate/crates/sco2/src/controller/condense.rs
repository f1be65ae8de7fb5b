//! Discretization of the control model and condensed QP assembly.
//!
//! The continuous model is augmented with the integrated motor torque as an
//! extra state (the decision input is the torque rate), discretized by
//! matrix exponential, and condensed: the predicted states are eliminated,
//! leaving the input moves and the per-step constraint slacks as decision
//! variables.

use crate::error::SimError;
use crate::numerics::{
    discretize_lti, solve_discrete_lyapunov, Matrix, QpProblem,
};
use crate::reduced::{
    LinearModel, ReducedLayout, ReducedState, SCALE_E, SCALE_MDOT, SCALE_P, SCALE_T,
};

use super::types::{ConstraintSet, MpcTuning};

/// Discrete-time model over the torque-augmented state [x; T_m].
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    pub a_d: Matrix,
    pub b_d: Matrix,
    pub f0_d: Vec<f64>,
    /// Tracked outputs over the augmented state (zero torque column).
    pub c_z: Matrix,
    pub g0: [f64; 2],
    /// Terminal cost over the augmented state (zero torque row/column).
    pub p_term: Matrix,
    /// The Lyapunov solve failed; the stage cost was used as terminal cost.
    pub lyapunov_fallback: bool,
    /// Augmented state dimension (model states + torque).
    pub n_aug: usize,
    /// Index of the torque state (last).
    pub i_torque: usize,
}

/// Characteristic magnitude of each model state, used to balance the
/// dynamics before the terminal-cost solve (the raw matrix mixes Pa, J/kg,
/// and rad/s entries whose norms drown the spectral-radius bound). Falls
/// back to unit scales when the state does not follow the reduced layout.
fn state_scales(x0: &ReducedState, n: usize) -> Vec<f64> {
    let n_hx = x0.t_wall.len();
    let n_high = x0.e_co2.len();
    if n_high < n_hx || !(n_high - n_hx).is_multiple_of(2) {
        return vec![1.0; n];
    }
    let lay = ReducedLayout {
        n_pipe: (n_high - n_hx) / 2,
        n_hx,
    };
    if lay.n_states() != n {
        return vec![1.0; n];
    }
    let mut s = vec![SCALE_T; n];
    for i in 0..lay.n_high() {
        s[lay.i_e_co2(i)] = SCALE_E;
    }
    for j in 0..lay.n_hx {
        s[lay.i_e_oil(j)] = SCALE_E;
    }
    s[lay.i_p_high()] = SCALE_P;
    s[lay.i_mdot_c()] = SCALE_MDOT;
    s[lay.i_mdot_t()] = SCALE_MDOT;
    s[lay.i_mdot_oil()] = SCALE_MDOT;
    s[lay.i_mdot_oil_rate()] = SCALE_MDOT;
    s[lay.i_n_c()] = x0.n_c.abs().max(1.0);
    s
}

/// Augment with the torque integrator and discretize at the controller
/// sampling time. The terminal cost solves A_dᵀPA_d − P + Q = 0 on the
/// physical-state block (the torque integrator sits on the unit circle and
/// must stay out of the Lyapunov solve).
pub fn discretize_model(
    lin: &LinearModel,
    tuning: &MpcTuning,
) -> Result<DiscreteModel, SimError> {
    let n = lin.a.rows();
    let n_aug = n + 1;

    let mut a_c = Matrix::zeros(n_aug, n_aug);
    for i in 0..n {
        a_c.row_mut(i)[..n].copy_from_slice(lin.a.row(i));
        a_c.row_mut(i)[n] = lin.b_torque[i];
    }
    let mut b_c = Matrix::zeros(n_aug, 2);
    b_c[(n, 0)] = 1.0;
    for i in 0..n {
        b_c[(i, 1)] = lin.b.row(i)[1];
    }
    let mut f0_c = lin.f0.clone();
    f0_c.push(lin.u0.torque_rate);

    let (a_d, b_d, f0_d) = discretize_lti(&a_c, &b_c, &f0_c, tuning.dt)?;

    let mut c_z = Matrix::zeros(2, n_aug);
    for k in 0..2 {
        c_z.row_mut(k)[..n].copy_from_slice(lin.c_z.row(k));
    }

    // stage cost on the physical block, ridge-regularized for the solve
    let mut q_nn = Matrix::zeros(n, n);
    for k in 0..2 {
        let row = lin.c_z.row(k);
        let w = tuning.q_z[k];
        for i in 0..n {
            if row[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                q_nn[(i, j)] += w * row[i] * row[j];
            }
        }
    }
    for i in 0..n {
        q_nn[(i, i)] += tuning.lyapunov_reg;
    }
    // solve in balanced, discounted coordinates: Ã = γ S⁻¹ A_d S,
    // Q̃ = S Q S, then P = S⁻¹ P̃ S⁻¹ (S diagonal)
    let a_d_nn = a_d.block(0, 0, n, n);
    let s = state_scales(&lin.x0, n);
    let gamma = tuning.terminal_discount;
    let mut a_bal = Matrix::zeros(n, n);
    let mut q_bal = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a_bal[(i, j)] = gamma * a_d_nn[(i, j)] * s[j] / s[i];
            q_bal[(i, j)] = q_nn[(i, j)] * s[i] * s[j];
        }
    }
    let (p_nn, lyapunov_fallback) = match solve_discrete_lyapunov(&a_bal, &q_bal) {
        Ok(p_bal) => {
            let mut p = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] = p_bal[(i, j)] / (s[i] * s[j]);
                }
            }
            (p, false)
        }
        Err(_) => (q_nn.clone(), true),
    };
    let mut p_term = Matrix::zeros(n_aug, n_aug);
    p_term.set_block(0, 0, &p_nn);

    Ok(DiscreteModel {
        a_d,
        b_d,
        f0_d,
        c_z,
        g0: lin.g0,
        p_term,
        lyapunov_fallback,
        n_aug,
        i_torque: n,
    })
}

/// Runtime quantities the QP needs besides the model.
#[derive(Debug, Clone)]
pub struct QpInputs<'a> {
    /// Current state relative to the linearization point (len n_aug).
    pub x0_rel: &'a [f64],
    /// Target state relative to the point (len n_aug).
    pub x_r: &'a [f64],
    /// Previous applied input relative to the linearization input.
    pub u_prev_rel: [f64; 2],
    /// Linearization input, absolute: [torque rate, oil reference].
    pub u0_abs: [f64; 2],
    /// Current disturbance estimate.
    pub d_hat: [f64; 4],
    /// Motor torque at the start of the horizon, absolute.
    pub torque_now: f64,
    /// Compressor speed at the linearization point, absolute.
    pub n_c0: f64,
    /// Surge-limited minimum speed, absolute (before margin).
    pub n_c_min: f64,
    /// Full-state index of the compressor speed.
    pub i_n_c: usize,
    /// Normalization scale for the speed slack (design speed).
    pub n_scale: f64,
}

/// Condensed QP plus the prediction operators needed to decode solutions.
#[derive(Debug)]
pub struct CondensedQp {
    pub problem: QpProblem,
    /// Cost constant so that 0.5 UᵀHU + gᵀU + constant equals J.
    pub constant: f64,
    pub horizon: usize,
    pub n_u: usize,
    /// Per-step input sensitivity of the state, i = 1..=horizon.
    pub su: Vec<Matrix>,
    /// Per-step free response (drift included), i = 1..=horizon.
    pub free: Vec<Vec<f64>>,
}

impl CondensedQp {
    pub fn i_slack_temp(&self, i: usize) -> usize {
        debug_assert!((1..=self.horizon).contains(&i));
        self.n_u + (i - 1)
    }

    pub fn i_slack_speed(&self, i: usize) -> usize {
        debug_assert!((1..=self.horizon).contains(&i));
        self.n_u + self.horizon + (i - 1)
    }

    /// Cost functional value at a decision vector.
    pub fn cost_at(&self, x: &[f64]) -> f64 {
        let hx = self.problem.h.matvec(x);
        let mut j = self.constant;
        for i in 0..x.len() {
            j += 0.5 * x[i] * hx[i] + self.problem.g[i] * x[i];
        }
        j
    }
}

pub fn build_qp(
    dm: &DiscreteModel,
    tuning: &MpcTuning,
    cons: &ConstraintSet,
    inp: &QpInputs<'_>,
) -> CondensedQp {
    let hp = tuning.horizon;
    let n = dm.n_aug;
    let n_u = 2 * hp;
    let nv = n_u + 2 * hp;
    assert_eq!(inp.x0_rel.len(), n);
    assert_eq!(inp.x_r.len(), n);

    // prediction: x'_i = free_i + G_i U
    let mut su: Vec<Matrix> = Vec::with_capacity(hp);
    let mut free: Vec<Vec<f64>> = Vec::with_capacity(hp);
    {
        let mut g_prev = Matrix::zeros(n, n_u);
        let mut f_prev = inp.x0_rel.to_vec();
        for i in 1..=hp {
            let mut g_i = &dm.a_d * &g_prev;
            for r in 0..n {
                let row = g_i.row_mut(r);
                row[2 * (i - 1)] += dm.b_d[(r, 0)];
                row[2 * (i - 1) + 1] += dm.b_d[(r, 1)];
            }
            let mut f_i = dm.a_d.matvec(&f_prev);
            for (f, d) in f_i.iter_mut().zip(&dm.f0_d) {
                *f += d;
            }
            g_prev = g_i.clone();
            f_prev = f_i.clone();
            su.push(g_i);
            free.push(f_i);
        }
    }

    // cost: J = Uᵀ Ĥ U + 2 ĝᵀ U + c0, then H = 2Ĥ, g = 2ĝ
    let mut h_hat = Matrix::zeros(nv, nv);
    let mut g_hat = vec![0.0; nv];
    let mut c0 = 0.0;

    // stage terms i = 0..hp-1 through the rank-two output cost, terminal
    // term through P
    {
        // i = 0 is constant
        let e0 = dm.c_z.matvec(inp.x0_rel);
        let er = dm.c_z.matvec(inp.x_r);
        for k in 0..2 {
            let d = e0[k] - er[k];
            c0 += tuning.q_z[k] * d * d;
        }
    }
    for i in 1..=hp {
        let g_i = &su[i - 1];
        let mut dev = free[i - 1].clone();
        for (v, r) in dev.iter_mut().zip(inp.x_r) {
            *v -= r;
        }
        if i < hp {
            let cg = &dm.c_z * g_i; // 2 x n_u
            let cd = dm.c_z.matvec(&dev);
            for (k, &cdk) in cd.iter().enumerate() {
                let w = tuning.q_z[k];
                let row = cg.row(k);
                for a in 0..n_u {
                    if row[a] == 0.0 {
                        continue;
                    }
                    let wra = w * row[a];
                    for b in 0..n_u {
                        h_hat[(a, b)] += wra * row[b];
                    }
                    g_hat[a] += wra * cdk;
                }
                c0 += w * cdk * cdk;
            }
        } else {
            let pg = &dm.p_term * g_i; // n x n_u
            let pd = dm.p_term.matvec(&dev);
            for a in 0..n_u {
                for r in 0..n {
                    let gra = g_i[(r, a)];
                    if gra == 0.0 {
                        continue;
                    }
                    let prow = pg.row(r);
                    let hrow = h_hat.row_mut(a);
                    for (hb, pb) in hrow[..n_u].iter_mut().zip(prow) {
                        *hb += gra * pb;
                    }
                    g_hat[a] += gra * pd[r];
                }
            }
            for (d, p) in dev.iter().zip(&pd) {
                c0 += d * p;
            }
        }
    }

    // input-move penalty with u'_{-1} = u_prev_rel
    let w_du = [
        tuning.r_du[0],
        if tuning.scale_oil_move_rate {
            tuning.r_du[1] / (tuning.dt * tuning.dt)
        } else {
            tuning.r_du[1]
        },
    ];
    for i in 0..hp {
        for (k, &w) in w_du.iter().enumerate() {
            let a = 2 * i + k;
            h_hat[(a, a)] += w;
            if i == 0 {
                g_hat[a] -= w * inp.u_prev_rel[k];
                c0 += w * inp.u_prev_rel[k] * inp.u_prev_rel[k];
            } else {
                let b = 2 * (i - 1) + k;
                h_hat[(b, b)] += w;
                h_hat[(a, b)] -= w;
                h_hat[(b, a)] -= w;
            }
        }
    }

    // slack penalties: linear exact-penalty on normalized slacks plus a
    // small quadratic term for strict convexity
    let lin_temp = tuning.w_temp / cons.t_in_t_max;
    let lin_speed = tuning.w_speed / inp.n_scale;
    for i in 0..hp {
        let st = n_u + i;
        let sn = n_u + hp + i;
        h_hat[(st, st)] += tuning.slack_reg;
        h_hat[(sn, sn)] += tuning.slack_reg;
        g_hat[st] += 0.5 * lin_temp;
        g_hat[sn] += 0.5 * lin_speed;
    }

    let h = h_hat.scale(2.0);
    let g: Vec<f64> = g_hat.iter().map(|v| 2.0 * v).collect();

    // inequality rows
    let n_rows = 13 * hp;
    let mut a_ineq = Matrix::zeros(n_rows, nv);
    let mut b_ineq = vec![0.0; n_rows];
    let mut row = 0;

    // torque-rate bounds on each move
    for i in 0..hp {
        a_ineq[(row, 2 * i)] = 1.0;
        b_ineq[row] = cons.torque_rate_max - inp.u0_abs[0];
        row += 1;
        a_ineq[(row, 2 * i)] = -1.0;
        b_ineq[row] = inp.u0_abs[0] - cons.torque_rate_min;
        row += 1;
    }
    // integrated torque bounds: T_m,0 + Δt Σ_{j<=i} (u'_j + u0) in bounds
    for i in 0..hp {
        let base = inp.torque_now + (i + 1) as f64 * tuning.dt * inp.u0_abs[0];
        for j in 0..=i {
            a_ineq[(row, 2 * j)] = tuning.dt;
            a_ineq[(row + 1, 2 * j)] = -tuning.dt;
        }
        b_ineq[row] = cons.torque_max - base;
        b_ineq[row + 1] = base - cons.torque_min;
        row += 2;
    }
    // oil reference bounds
    for i in 0..hp {
        a_ineq[(row, 2 * i + 1)] = 1.0;
        b_ineq[row] = cons.mdot_oil_max - inp.u0_abs[1];
        row += 1;
        a_ineq[(row, 2 * i + 1)] = -1.0;
        b_ineq[row] = inp.u0_abs[1] - cons.mdot_oil_min;
        row += 1;
    }
    // oil reference move (acceleration) bounds
    for i in 0..hp {
        let prev = if i == 0 {
            inp.u_prev_rel[1]
        } else {
            0.0
        };
        a_ineq[(row, 2 * i + 1)] = 1.0;
        a_ineq[(row + 1, 2 * i + 1)] = -1.0;
        if i > 0 {
            a_ineq[(row, 2 * (i - 1) + 1)] = -1.0;
            a_ineq[(row + 1, 2 * (i - 1) + 1)] = 1.0;
        }
        b_ineq[row] = tuning.dt * cons.mdot_oil_accel_max + prev;
        b_ineq[row + 1] = -tuning.dt * cons.mdot_oil_accel_min - prev;
        row += 2;
    }
    // soft turbine inlet temperature: C_z,1 x'_i - s_T,i <= bound
    let t_bound = cons.t_in_t_max - dm.g0[1] - inp.d_hat[1];
    for i in 1..=hp {
        let g_i = &su[i - 1];
        let crow = dm.c_z.row(1).to_vec();
        for a in 0..n_u {
            let mut v = 0.0;
            for (r, c) in crow.iter().enumerate() {
                if *c != 0.0 {
                    v += c * g_i[(r, a)];
                }
            }
            a_ineq[(row, a)] = v;
        }
        let mut fr = 0.0;
        for (r, c) in crow.iter().enumerate() {
            fr += c * free[i - 1][r];
        }
        a_ineq[(row, n_u + (i - 1))] = -1.0;
        b_ineq[row] = t_bound - fr;
        row += 1;
    }
    // soft compressor speed bounds, sharing one slack per step
    let n_lo = (1.0 + tuning.speed_margin) * inp.n_c_min;
    let n_hi = (1.0 - tuning.speed_margin) * cons.n_c_max;
    for i in 1..=hp {
        let g_i = &su[i - 1];
        let sn = n_u + hp + (i - 1);
        let fr = free[i - 1][inp.i_n_c];
        for a in 0..n_u {
            let v = g_i[(inp.i_n_c, a)];
            a_ineq[(row, a)] = v;
            a_ineq[(row + 1, a)] = -v;
        }
        a_ineq[(row, sn)] = -1.0;
        a_ineq[(row + 1, sn)] = -1.0;
        b_ineq[row] = n_hi - inp.n_c0 - fr;
        b_ineq[row + 1] = inp.n_c0 + fr - n_lo;
        row += 2;
    }
    // slack nonnegativity
    for s in n_u..nv {
        a_ineq[(row, s)] = -1.0;
        b_ineq[row] = 0.0;
        row += 1;
    }
    assert_eq!(row, n_rows);

    let problem = QpProblem {
        h,
        g,
        a_ineq,
        b_ineq,
        a_eq: Matrix::zeros(0, nv),
        b_eq: vec![],
    };
    CondensedQp {
        problem,
        constant: c0,
        horizon: hp,
        n_u,
        su,
        free,
    }
}
