//! Steady-state target computation from the reference vector.
//!
//! Solves the continuous-time bordered system
//!
//! ```text
//!     [ A    B  ] [x_r]   [ -f0            ]
//!     [ C_z  0  ] [u_r] = [ r - C_d d - g0 ]
//! ```
//!
//! in perturbation coordinates, with the effective inputs being the
//! absolute motor torque and the oil reference. The disturbance map C_d
//! puts the second disturbance entry on the turbine inlet temperature and
//! nothing on net power.

use crate::error::SimError;
use crate::numerics::Matrix;
use crate::reduced::LinearModel;

/// Steady target in perturbation coordinates.
#[derive(Debug, Clone)]
pub struct TargetPoint {
    /// State target relative to the linearization point (model states).
    pub x_rel: Vec<f64>,
    /// Input target relative to the point: [motor torque, oil reference].
    pub u_rel: [f64; 2],
    /// The bordered system was singular; least-squares target returned.
    pub least_squares: bool,
}

/// Matrix-level solve; `b_eff` columns are the sensitivities of dx/dt to
/// the absolute torque and to the oil reference.
pub fn compute_target_raw(
    a: &Matrix,
    b_eff: &Matrix,
    c_z: &Matrix,
    f0: &[f64],
    g0: [f64; 2],
    r: [f64; 2],
    d_hat: &[f64; 4],
) -> Result<TargetPoint, SimError> {
    let n = a.rows();
    assert_eq!(b_eff.rows(), n);
    assert_eq!(b_eff.cols(), 2);
    assert_eq!((c_z.rows(), c_z.cols()), (2, n));
    assert_eq!(f0.len(), n);

    let m = n + 2;
    let mut sys = Matrix::zeros(m, m);
    for i in 0..n {
        sys.row_mut(i)[..n].copy_from_slice(a.row(i));
        sys.row_mut(i)[n] = b_eff.row(i)[0];
        sys.row_mut(i)[n + 1] = b_eff.row(i)[1];
    }
    for k in 0..2 {
        sys.row_mut(n + k)[..n].copy_from_slice(c_z.row(k));
    }

    // C_d rows: (0 0 0 0) on net power, (0 1 0 0) on T_in,t
    let mut rhs = vec![0.0; m];
    for i in 0..n {
        rhs[i] = -f0[i];
    }
    rhs[n] = r[0] - g0[0];
    rhs[n + 1] = r[1] - d_hat[1] - g0[1];

    let (sol, least_squares) = match sys.solve_vec(&rhs) {
        Ok(sol) => (sol, false),
        Err(_) => (sys.solve_least_squares(&rhs)?, true),
    };
    Ok(TargetPoint {
        x_rel: sol[..n].to_vec(),
        u_rel: [sol[n], sol[n + 1]],
        least_squares,
    })
}

/// Target from a reduced-model linearization: the torque column is the
/// model's torque sensitivity, the oil column its second input column.
pub fn compute_target(
    lin: &LinearModel,
    r: [f64; 2],
    d_hat: &[f64; 4],
) -> Result<TargetPoint, SimError> {
    let n = lin.a.rows();
    let mut b_eff = Matrix::zeros(n, 2);
    for i in 0..n {
        b_eff.row_mut(i)[0] = lin.b_torque[i];
        b_eff.row_mut(i)[1] = lin.b.row(i)[1];
    }
    compute_target_raw(&lin.a, &b_eff, &lin.c_z, &lin.f0, lin.g0, r, d_hat)
}
