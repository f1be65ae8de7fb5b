//! Matrix exponential, exact zero-order-hold discretization, and the
//! discrete Lyapunov equation.

use crate::error::NumericsError;
use crate::numerics::matrix::Matrix;

/// exp(M) by scaling and squaring around a Taylor series.
pub fn matrix_exponential(m: &Matrix) -> Result<Matrix, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::Dimension {
            context: "matrix_exponential requires a square matrix".into(),
        });
    }
    let n = m.rows();
    let norm = m.norm_inf();
    // scale into ||M/2^s|| <= 0.25 where the series converges fast
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let a = m.scale(0.5f64.powi(s as i32));
    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=40 {
        term = &term * &a;
        term = term.scale(1.0 / k as f64);
        result = &result + &term;
        if term.norm_inf() <= 1e-18 * result.norm_inf() {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result)
}

/// Exact zero-order-hold discretization of ẋ = A x + B u + f0 over dt:
/// A_d = exp(A dt), Γ = ∫₀^dt exp(A(dt−τ)) dτ, B_d = Γ B, f0_d = Γ f0.
/// Computed from the exponential of the augmented matrix [[A, I],[0, 0]]·dt.
pub fn discretize_lti(
    a: &Matrix,
    b: &Matrix,
    f0: &[f64],
    dt: f64,
) -> Result<(Matrix, Matrix, Vec<f64>), NumericsError> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n || f0.len() != n {
        return Err(NumericsError::Dimension {
            context: format!(
                "discretize_lti: A {}x{}, B {}x{}, f0 len {}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                f0.len()
            ),
        });
    }
    if !(dt > 0.0) {
        return Err(NumericsError::Dimension {
            context: format!("discretize_lti: dt = {dt} must be positive"),
        });
    }
    let mut aug = Matrix::zeros(2 * n, 2 * n);
    aug.set_block(0, 0, &a.scale(dt));
    aug.set_block(0, n, &Matrix::identity(n).scale(dt));
    let e = matrix_exponential(&aug)?;
    let a_d = e.block(0, 0, n, n);
    let gamma = e.block(0, n, n, n);
    let b_d = &gamma * b;
    let f0_d = gamma.matvec(f0);
    Ok((a_d, b_d, f0_d))
}

/// Solves A_dᵀ P A_d − P + Q = 0 by the doubling iteration
/// P ← P + MᵀPM, M ← M². Requires ρ(A_d) < 1.
pub fn solve_discrete_lyapunov(a_d: &Matrix, q: &Matrix) -> Result<Matrix, NumericsError> {
    let n = a_d.rows();
    if !a_d.is_square() || q.rows() != n || q.cols() != n {
        return Err(NumericsError::Dimension {
            context: "solve_discrete_lyapunov: A and Q must be square of equal size".into(),
        });
    }
    let rho = a_d.spectral_radius_upper_bound();
    if rho >= 1.0 {
        return Err(NumericsError::Unstable { rho });
    }
    let mut p = q.clone();
    let mut m = a_d.clone();
    let q_norm = q.norm_frobenius().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let mt = m.transpose();
        let inc = &(&mt * &p) * &m;
        p = &p + &inc;
        p.symmetrize();
        if inc.norm_frobenius() <= 1e-14 * q_norm.max(p.norm_frobenius()) {
            break;
        }
        m = &m * &m;
        if m.norm_frobenius() < 1e-200 {
            break;
        }
    }
    // residual check guards against slow convergence near rho = 1
    let at = a_d.transpose();
    let res = &(&(&at * &p) * a_d) - &p;
    let res = &res + q;
    if res.norm_frobenius() > 1e-8 * q_norm {
        return Err(NumericsError::Unstable { rho });
    }
    Ok(p)
}
