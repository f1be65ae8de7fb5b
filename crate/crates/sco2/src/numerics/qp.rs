//! Dense strictly convex quadratic programming by the Goldfarb–Idnani dual
//! active-set method.
//!
//! Solves
//! ```text
//!     minimize    1/2 xᵀ H x + gᵀ x
//!     subject to  A_eq x = b_eq
//!                 A_ineq x <= b_ineq
//! ```
//! The dual method starts from the unconstrained minimizer and adds violated
//! constraints one at a time, so no feasible starting point is needed and the
//! iteration count is bounded by the number of constraint additions.

use crate::error::NumericsError;
use crate::numerics::matrix::Matrix;

#[derive(Debug, Clone)]
pub struct QpProblem {
    pub h: Matrix,
    pub g: Vec<f64>,
    /// Inequalities A_ineq x <= b_ineq; zero-row matrix if unconstrained.
    pub a_ineq: Matrix,
    pub b_ineq: Vec<f64>,
    /// Equalities A_eq x = b_eq; zero-row matrix if absent.
    pub a_eq: Matrix,
    pub b_eq: Vec<f64>,
}

impl QpProblem {
    pub fn unconstrained(h: Matrix, g: Vec<f64>) -> Self {
        let n = g.len();
        QpProblem {
            h,
            g,
            a_ineq: Matrix::zeros(0, n),
            b_ineq: vec![],
            a_eq: Matrix::zeros(0, n),
            b_eq: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    /// Constraints admit no solution (detected when neither a primal nor a
    /// dual step exists).
    Infeasible,
    /// Iteration cap hit; best iterate returned.
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers for equality rows (sign free).
    pub duals_eq: Vec<f64>,
    /// Multipliers for inequality rows (nonnegative; nonzero only on the
    /// active set).
    pub duals_ineq: Vec<f64>,
    pub status: QpStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.primal)
            .max(self.dual)
            .max(self.complementarity)
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// In-place Cholesky H = LᵀL into packed upper-triangular column storage
/// (column j lives at mat[j*n .. j*n+j+1]).
fn cholesky(mat: &mut [f64], n: usize) -> Result<(), NumericsError> {
    for j in 0..n {
        for k in 0..j {
            mat[k + j * n] = (mat[k + j * n] - dot(&mat[k * n..k * n + k], &mat[j * n..j * n + k]))
                / mat[k + k * n];
        }
        let s = mat[j + j * n] - dot(&mat[j * n..j * n + j], &mat[j * n..j * n + j]);
        if s <= 0.0 {
            return Err(NumericsError::NotPositiveDefinite);
        }
        mat[j + j * n] = s.sqrt();
    }
    Ok(())
}

/// Solve Lᵀ x = b in place (packed upper-triangular storage).
fn triangular_solve_transpose(mat: &[f64], vec: &mut [f64]) {
    let n = vec.len();
    for k in 0..n {
        vec[k] -= dot(&mat[k * n..k * n + k], &vec[..k]);
        vec[k] /= mat[k + k * n];
    }
}

/// Solve L x = b in place.
fn triangular_solve(mat: &[f64], vec: &mut [f64]) {
    let n = vec.len();
    for k in (0..n).rev() {
        vec[k] /= mat[k + k * n];
        axpy(-vec[k], &mat[k * n..k * n + k], &mut vec[..k]);
    }
}

/// Invert the packed upper-triangular factor in place.
fn triangular_invert(mat: &mut [f64], n: usize) {
    for k in 0..n {
        mat[k + k * n] = 1.0 / mat[k + k * n];
        let d = -mat[k + k * n];
        for v in &mut mat[k * n..k * n + k] {
            *v *= d;
        }
        let (left, right) = mat.split_at_mut(n + k * n);
        for j in 0..n - k - 1 {
            axpy(
                right[k + j * n],
                &left[k * n..k * n + k],
                &mut right[j * n..j * n + k],
            );
            right[k + j * n] *= left[k + k * n];
        }
    }
}

fn left_right_slices<T>(slice: &mut [T], split: usize, len: usize) -> (&mut [T], &mut [T]) {
    let (left, right) = slice.split_at_mut(split);
    (&mut left[split - len..], &mut right[..len])
}

/// Givens rotations zeroing vec[r..] against vec[r-1..], applied to the
/// columns of mat (the J operator).
fn qr_insert(r: usize, vec: &mut [f64], mat: &mut [f64]) {
    let n = vec.len();
    for i in (r..n).rev() {
        if vec[i] == 0.0 {
            continue;
        }
        let (left, right) = left_right_slices(mat, i * n, n);
        if vec[i - 1] == 0.0 {
            vec[i - 1] = vec[i];
            left.swap_with_slice(right);
        } else {
            let h = f64::hypot(vec[i - 1], vec[i]).copysign(vec[i - 1]);
            let gc = vec[i - 1] / h;
            let gs = vec[i] / h;
            let nu = vec[i] / (vec[i - 1] + h);
            vec[i - 1] = h;
            for (li, ri) in left.iter_mut().zip(right.iter_mut()) {
                let temp = gc * *li + gs * *ri;
                *ri = nu * (*li + temp) - *ri;
                *li = temp;
            }
        }
    }
}

/// Drop column `col` (1-based) from the packed triangular R and restore
/// triangularity, mirroring the rotations into qmat.
fn qr_delete(col: usize, qmat: &mut [f64], rmat: &mut [f64], r: usize) {
    let n = (qmat.len() as f64).sqrt() as usize;
    for i in col..r {
        let di = i * (i + 1) / 2;
        let l = di + i;
        if rmat[l] == 0.0 {
            continue;
        }
        let (left, right) = left_right_slices(qmat, i * n, n);
        if rmat[l - 1] == 0.0 {
            let mut ind = l;
            for j in i + 1..=r {
                rmat.swap(ind - 1, ind);
                ind += j;
            }
            left.swap_with_slice(right);
        } else {
            let h = f64::hypot(rmat[l - 1], rmat[l]).copysign(rmat[l - 1]);
            let gc = rmat[l - 1] / h;
            let gs = rmat[l] / h;
            let nu = rmat[l] / (rmat[l - 1] + h);
            let mut ind = l;
            for j in i + 1..=r {
                let temp = gc * rmat[ind - 1] + gs * rmat[ind];
                rmat[ind] = nu * (rmat[ind - 1] + temp) - rmat[ind];
                rmat[ind - 1] = temp;
                ind += j;
            }
            for (li, ri) in left.iter_mut().zip(right.iter_mut()) {
                let temp = gc * *li + gs * *ri;
                *ri = nu * (*li + temp) - *ri;
                *li = temp;
            }
        }
        let (left, right) = left_right_slices(rmat, di, i);
        left.swap_with_slice(right);
    }
}

/// Solves the QP. `x0` is only used as the reported iterate when the
/// iteration cap is hit before any step is taken (the dual method does not
/// warm-start).
pub fn solve_qp(prob: &QpProblem, x0: &[f64]) -> Result<QpSolution, NumericsError> {
    let n = prob.g.len();
    let meq = prob.b_eq.len();
    let mineq = prob.b_ineq.len();
    let q = meq + mineq;
    if prob.h.rows() != n
        || prob.h.cols() != n
        || prob.a_eq.rows() != meq
        || prob.a_ineq.rows() != mineq
        || (meq > 0 && prob.a_eq.cols() != n)
        || (mineq > 0 && prob.a_ineq.cols() != n)
        || (!x0.is_empty() && x0.len() != n)
    {
        return Err(NumericsError::Dimension {
            context: "solve_qp: inconsistent problem dimensions".into(),
        });
    }
    let hnorm = prob.h.norm_inf().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (prob.h[(i, j)] - prob.h[(j, i)]).abs() > 1e-8 * hnorm {
                return Err(NumericsError::Dimension {
                    context: "solve_qp: H is not symmetric".into(),
                });
            }
        }
    }

    // constraint rows: equalities first, then inequalities, all as a·x <= b
    let mut amat = vec![0.0; q * n];
    let mut bvec = vec![0.0; q];
    for i in 0..meq {
        amat[i * n..(i + 1) * n].copy_from_slice(prob.a_eq.row(i));
        bvec[i] = prob.b_eq[i];
    }
    for i in 0..mineq {
        amat[(meq + i) * n..(meq + i + 1) * n].copy_from_slice(prob.a_ineq.row(i));
        bvec[meq + i] = prob.b_ineq[i];
    }
    // all-zero rows have no direction to move along; settle them up front
    for i in 0..q {
        let row = &amat[i * n..(i + 1) * n];
        if row.iter().all(|&v| v == 0.0) {
            let violated = if i < meq {
                bvec[i].abs() > 1e-12
            } else {
                bvec[i] < -1e-12
            };
            if violated {
                return Ok(QpSolution {
                    x: x0.to_vec(),
                    objective: f64::INFINITY,
                    duals_eq: vec![0.0; meq],
                    duals_ineq: vec![0.0; mineq],
                    status: QpStatus::Infeasible,
                    iterations: 0,
                });
            }
        }
    }

    // factor H, averaging asymmetry and adding a deterministic ridge only if
    // the strict factorization fails (H is PSD by contract, PD in practice)
    let mut jmat = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            jmat[i + j * n] = 0.5 * (prob.h[(i, j)] + prob.h[(j, i)]);
        }
    }
    if cholesky(&mut jmat, n).is_err() {
        for i in 0..n {
            for j in 0..n {
                jmat[i + j * n] = 0.5 * (prob.h[(i, j)] + prob.h[(j, i)]);
            }
            jmat[i + i * n] += 1e-10 * hnorm;
        }
        cholesky(&mut jmat, n)?;
    }

    // unconstrained minimizer x = -H⁻¹ g
    let mut sol: Vec<f64> = prob.g.iter().map(|v| -v).collect();
    triangular_solve_transpose(&jmat, &mut sol);
    triangular_solve(&jmat, &mut sol);
    triangular_invert(&mut jmat, n);
    // J = L⁻ᵀ; zero the unused lower triangle of the packed storage
    for j in 0..n {
        for i in j + 1..n {
            jmat[i + j * n] = 0.0;
        }
    }

    let mut obj = dot(&prob.g, &sol) / 2.0;
    let r = n.min(q);
    let mut dv = vec![0.0; n];
    let mut zv = vec![0.0; n];
    let mut rv_mem = vec![0.0; r];
    let mut rmat = vec![0.0; r * (r + 1) / 2];
    let mut sv = vec![0.0; q];
    let nbv: Vec<f64> = (0..q)
        .map(|i| dot(&amat[i * n..(i + 1) * n], &amat[i * n..(i + 1) * n]).sqrt().max(1e-300))
        .collect();
    let mut iact: Vec<usize> = Vec::with_capacity(r);
    let mut uv: Vec<f64> = Vec::with_capacity(r);
    // direction each active constraint was violated in; fixes the sign of
    // the reported multiplier (equalities can be pushed from either side)
    let mut dirs: Vec<f64> = Vec::with_capacity(r);
    let mut iter = 0usize;
    let max_iter = 50 * (n + q).max(10);

    loop {
        // slacks b - a·x; active rows pinned at zero against roundoff
        for i in 0..q {
            sv[i] = bvec[i] - dot(&sol, &amat[i * n..(i + 1) * n]);
        }
        for &ind in &iact {
            sv[ind] = 0.0;
        }
        // most violated constraint (equalities violated in either direction)
        let mut iadd = q;
        let mut max_violation = 0.0;
        for i in 0..q {
            if sv[i] < -max_violation * nbv[i] - f64::EPSILON {
                iadd = i;
                max_violation = -sv[i] / nbv[i];
            } else if i < meq && sv[i] > max_violation * nbv[i] + f64::EPSILON {
                iadd = i;
                max_violation = sv[i] / nbv[i];
            }
        }
        if iadd == q {
            break;
        }
        iter += 1;
        if iter > max_iter {
            let (duals_eq, duals_ineq) = split_duals(meq, mineq, &iact, &uv, &dirs);
            return Ok(QpSolution {
                x: sol,
                objective: obj,
                duals_eq,
                duals_ineq,
                status: QpStatus::MaxIterations,
                iterations: iter,
            });
        }

        let aadd = amat[iadd * n..(iadd + 1) * n].to_vec();
        let mut slack = sv[iadd];
        let mut u = 0.0;
        let direc = slack.signum();

        loop {
            // dv = Jᵀ a; zv = J₂ d₂ is the primal step direction
            for (i, dvi) in dv.iter_mut().enumerate() {
                *dvi = direc * dot(&jmat[i * n..(i + 1) * n], &aadd);
            }
            zv.fill(0.0);
            for i in iact.len()..n {
                axpy(dv[i], &jmat[i * n..(i + 1) * n], &mut zv);
            }
            // rv = R⁻¹ d₁ is minus the dual step direction
            let rv = &mut rv_mem[..iact.len()];
            rv.clone_from_slice(&dv[..iact.len()]);
            for i in (0..iact.len()).rev() {
                let start = i * (i + 1) / 2;
                rv[i] /= rmat[start + i];
                let (head, tail) = rv.split_at_mut(i);
                axpy(-tail[0], &rmat[start..start + i], head);
            }
            // longest dual-feasible step; idel marks the blocking constraint
            let mut idel = r;
            let mut t1 = f64::INFINITY;
            for (i, ((uvi, rvi), act)) in uv.iter().zip(rv.iter()).zip(iact.iter()).enumerate() {
                if *act >= meq && *rvi > 0.0 {
                    let temp = uvi / rvi;
                    if temp < t1 {
                        t1 = temp;
                        idel = i;
                    }
                }
            }
            // step to close the new constraint's slack
            let (ztn, t2) = if dot(&zv, &zv).abs() <= f64::EPSILON {
                (0.0, f64::INFINITY)
            } else {
                let temp = dot(&zv, &aadd);
                (temp.abs(), slack / temp)
            };
            if t1 == f64::INFINITY && t2 == f64::INFINITY {
                let (duals_eq, duals_ineq) = split_duals(meq, mineq, &iact, &uv, &dirs);
                return Ok(QpSolution {
                    x: sol,
                    objective: obj,
                    duals_eq,
                    duals_ineq,
                    status: QpStatus::Infeasible,
                    iterations: iter,
                });
            }
            let partial_step = t2 > t1;
            let step = if partial_step { t1 } else { t2 };
            axpy(step, &zv, &mut sol);
            obj += step * ztn * (step / 2.0 + u);
            axpy(-step, rv, &mut uv);
            u += step;
            if !partial_step {
                break;
            }
            // drop the blocking constraint and keep pushing on iadd
            qr_delete(idel + 1, &mut jmat, &mut rmat, iact.len());
            uv.remove(idel);
            iact.remove(idel);
            dirs.remove(idel);
            slack = bvec[iadd] - dot(&sol, &aadd);
        }

        uv.push(u);
        iact.push(iadd);
        dirs.push(direc);
        qr_insert(iact.len(), &mut dv, &mut jmat);
        let start = iact.len() * (iact.len() - 1) / 2;
        rmat[start..start + iact.len()].clone_from_slice(&dv[..iact.len()]);
    }

    let (duals_eq, duals_ineq) = split_duals(meq, mineq, &iact, &uv, &dirs);
    Ok(QpSolution {
        x: sol,
        objective: obj,
        duals_eq,
        duals_ineq,
        status: QpStatus::Optimal,
        iterations: iter,
    })
}

fn split_duals(
    meq: usize,
    mineq: usize,
    iact: &[usize],
    uv: &[f64],
    dirs: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    // convention: H x + g + A_eqᵀ λ_eq + A_ineqᵀ λ_ineq = 0, λ_ineq >= 0.
    // internally u accumulates along the violation direction, so a
    // constraint pushed from the sv > 0 side carries λ = -u.
    let mut duals_eq = vec![0.0; meq];
    let mut duals_ineq = vec![0.0; mineq];
    for ((&act, &u), &d) in iact.iter().zip(uv).zip(dirs) {
        if act < meq {
            duals_eq[act] = -d * u;
        } else {
            duals_ineq[act - meq] = -d * u;
        }
    }
    (duals_eq, duals_ineq)
}

/// Infinity-norm KKT residuals of a candidate primal/dual pair.
pub fn kkt_residuals(prob: &QpProblem, sol: &QpSolution) -> KktResiduals {
    let n = prob.g.len();
    // stationarity: H x + g + A_eqᵀ λ_eq + A_ineqᵀ λ_ineq
    let mut grad = prob.h.matvec(&sol.x);
    for (gi, g) in grad.iter_mut().zip(&prob.g) {
        *gi += g;
    }
    for i in 0..prob.b_eq.len() {
        axpy(sol.duals_eq[i], prob.a_eq.row(i), &mut grad);
    }
    for i in 0..prob.b_ineq.len() {
        axpy(sol.duals_ineq[i], prob.a_ineq.row(i), &mut grad);
    }
    let scale = prob.h.norm_inf().max(inf_norm(&prob.g)).max(1.0);
    let stationarity = inf_norm(&grad) / scale;
    let mut primal = 0.0f64;
    let mut complementarity = 0.0f64;
    for i in 0..prob.b_eq.len() {
        let res = dot(prob.a_eq.row(i), &sol.x) - prob.b_eq[i];
        primal = primal.max(res.abs() / row_scale(prob.a_eq.row(i), prob.b_eq[i]));
    }
    let mut dual = 0.0f64;
    for i in 0..prob.b_ineq.len() {
        let s = dot(prob.a_ineq.row(i), &sol.x) - prob.b_ineq[i];
        let rs = row_scale(prob.a_ineq.row(i), prob.b_ineq[i]);
        primal = primal.max(s.max(0.0) / rs);
        dual = dual.max((-sol.duals_ineq[i]).max(0.0));
        complementarity = complementarity.max((sol.duals_ineq[i] * s).abs() / rs);
    }
    let _ = n;
    KktResiduals {
        stationarity,
        primal,
        dual,
        complementarity,
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn row_scale(row: &[f64], b: f64) -> f64 {
    inf_norm(row).max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ineq(prob_n: usize, rows: &[&[f64]], b: &[f64]) -> (Matrix, Vec<f64>) {
        if rows.is_empty() {
            (Matrix::zeros(0, prob_n), vec![])
        } else {
            (Matrix::from_rows(rows), b.to_vec())
        }
    }

    #[test]
    fn unconstrained_minimum() {
        let prob = QpProblem::unconstrained(Matrix::identity(2), vec![-1.0, -1.0]);
        let sol = solve_qp(&prob, &[]).unwrap();
        assert_eq!(sol.status, QpStatus::Optimal);
        assert_abs_diff_eq!(sol.x[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn active_bound_with_unit_dual() {
        // min 1/2 x^2 - 2x s.t. x <= 1: x* = 1, dual = 1
        let (a, b) = ineq(1, &[&[1.0]], &[1.0]);
        let prob = QpProblem {
            h: Matrix::identity(1),
            g: vec![-2.0],
            a_ineq: a,
            b_ineq: b,
            a_eq: Matrix::zeros(0, 1),
            b_eq: vec![],
        };
        let sol = solve_qp(&prob, &[]).unwrap();
        assert_eq!(sol.status, QpStatus::Optimal);
        assert_abs_diff_eq!(sol.x[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.duals_ineq[0], 1.0, epsilon = 1e-12);
        assert!(kkt_residuals(&prob, &sol).max() <= 1e-6);
    }

    #[test]
    fn projection_onto_hyperplane() {
        // min 1/2 |x|^2 s.t. x1 + x2 = 1 -> (0.5, 0.5)
        let prob = QpProblem {
            h: Matrix::identity(2),
            g: vec![0.0, 0.0],
            a_ineq: Matrix::zeros(0, 2),
            b_ineq: vec![],
            a_eq: Matrix::from_rows(&[&[1.0, 1.0]]),
            b_eq: vec![1.0],
        };
        let sol = solve_qp(&prob, &[]).unwrap();
        assert_eq!(sol.status, QpStatus::Optimal);
        assert_abs_diff_eq!(sol.x[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 0.5, epsilon = 1e-12);
        assert!(kkt_residuals(&prob, &sol).max() <= 1e-6);
    }

    #[test]
    fn inconsistent_equalities_reported_infeasible() {
        let prob = QpProblem {
            h: Matrix::identity(1),
            g: vec![0.0],
            a_ineq: Matrix::zeros(0, 1),
            b_ineq: vec![],
            a_eq: Matrix::from_rows(&[&[1.0], &[1.0]]),
            b_eq: vec![0.0, 1.0],
        };
        let sol = solve_qp(&prob, &[0.0]).unwrap();
        assert_eq!(sol.status, QpStatus::Infeasible);
    }

    #[test]
    fn contradictory_inequalities_reported_infeasible() {
        // x <= -1 and -x <= -1 (x >= 1) cannot both hold
        let prob = QpProblem {
            h: Matrix::identity(1),
            g: vec![0.0],
            a_ineq: Matrix::from_rows(&[&[1.0], &[-1.0]]),
            b_ineq: vec![-1.0, -1.0],
            a_eq: Matrix::zeros(0, 1),
            b_eq: vec![],
        };
        let sol = solve_qp(&prob, &[0.0]).unwrap();
        assert_eq!(sol.status, QpStatus::Infeasible);
    }

    #[test]
    fn multi_constraint_reference_case() {
        // known-solution 3-variable case with two active constraints
        let prob = QpProblem {
            h: Matrix::identity(3),
            g: vec![0.0, -5.0, 0.0],
            a_ineq: Matrix::from_rows(&[&[4.0, 3.0, 0.0], &[-2.0, -1.0, 0.0], &[0.0, 2.0, -1.0]]),
            b_ineq: vec![8.0, -2.0, 0.0],
            a_eq: Matrix::zeros(0, 3),
            b_eq: vec![],
        };
        let sol = solve_qp(&prob, &[]).unwrap();
        assert_eq!(sol.status, QpStatus::Optimal);
        assert_abs_diff_eq!(sol.x[0], 0.476190476190476, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.x[1], 1.04761904761905, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.x[2], 2.0952380952381, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.objective, -2.38095238095238, epsilon = 1e-9);
        assert!(kkt_residuals(&prob, &sol).max() <= 1e-8);
    }

    #[test]
    fn solution_invariant_under_row_scaling() {
        let base = QpProblem {
            h: Matrix::from_rows(&[&[2.0, 0.3], &[0.3, 1.5]]),
            g: vec![-1.0, -4.0],
            a_ineq: Matrix::from_rows(&[&[1.0, 1.0], &[-1.0, 0.5]]),
            b_ineq: vec![1.0, 0.2],
            a_eq: Matrix::zeros(0, 2),
            b_eq: vec![],
        };
        let scaled = QpProblem {
            a_ineq: Matrix::from_rows(&[&[1000.0, 1000.0], &[-0.003, 0.0015]]),
            b_ineq: vec![1000.0, 0.0006],
            ..base.clone()
        };
        let s1 = solve_qp(&base, &[]).unwrap();
        let s2 = solve_qp(&scaled, &[]).unwrap();
        assert_abs_diff_eq!(s1.x[0], s2.x[0], epsilon = 1e-8);
        assert_abs_diff_eq!(s1.x[1], s2.x[1], epsilon = 1e-8);
    }
}
