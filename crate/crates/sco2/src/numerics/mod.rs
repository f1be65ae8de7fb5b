//! Dense linear algebra and optimization kernels shared by every module:
//! matrices, matrix exponential and exact discretization, the discrete
//! Lyapunov equation, a convex QP solver, bracketing root finding, and
//! bicubic interpolation.

pub mod expm;
pub mod interp;
pub mod matrix;
pub mod qp;
pub mod roots;

pub use expm::{discretize_lti, matrix_exponential, solve_discrete_lyapunov};
pub use interp::{Bicubic, CellBasis, Cubic1};
pub use matrix::Matrix;
pub use qp::{kkt_residuals, solve_qp, KktResiduals, QpProblem, QpSolution, QpStatus};
pub use roots::{find_root_bounded, DEFAULT_ROOT_TOL};
