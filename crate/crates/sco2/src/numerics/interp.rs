//! C¹ bicubic Hermite interpolation on rectilinear grids.
//!
//! Node slopes come from 4-point Lagrange stencils, so the interpolant
//! reproduces bicubic polynomials exactly. Several tables sharing the same
//! axes can reuse one [`CellBasis`] per query point.

use crate::error::NumericsError;

#[derive(Debug, Clone)]
pub struct Bicubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Node values and slopes, row-major with x as the slow index.
    f: Vec<f64>,
    fx: Vec<f64>,
    fy: Vec<f64>,
    fxy: Vec<f64>,
}

/// Precomputed Hermite weights for one query point; valid for any table
/// built on the same axes.
#[derive(Debug, Clone)]
pub struct CellBasis {
    i: usize,
    j: usize,
    nx: usize,
    ny: usize,
    wx: [f64; 4],
    wy: [f64; 4],
    dwx: [f64; 4],
    dwy: [f64; 4],
}

/// Weights of d/dx of the Lagrange interpolant through `xs`, evaluated at
/// node `k`. Exact for polynomials of degree < xs.len().
fn lagrange_deriv_weights(xs: &[f64], k: usize) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    for j in 0..n {
        if j == k {
            w[j] = (0..n)
                .filter(|&m| m != k)
                .map(|m| 1.0 / (xs[k] - xs[m]))
                .sum();
        } else {
            let mut num = 1.0;
            let mut den = xs[j] - xs[k];
            for m in 0..n {
                if m != j && m != k {
                    num *= xs[k] - xs[m];
                    den *= xs[j] - xs[m];
                }
            }
            w[j] = num / den;
        }
    }
    w
}

/// Per-node derivative weights along one axis: (window start, weights).
fn axis_stencils(axis: &[f64]) -> Vec<(usize, Vec<f64>)> {
    let n = axis.len();
    let width = n.min(4);
    (0..n)
        .map(|k| {
            let s = k
                .saturating_sub((width - 1) / 2)
                .min(n - width);
            let w = lagrange_deriv_weights(&axis[s..s + width], k - s);
            (s, w)
        })
        .collect()
}

fn hermite(t: f64, h: f64) -> ([f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    // ordering: value at left, value at right, slope at left, slope at right
    let w = [
        2.0 * t3 - 3.0 * t2 + 1.0,
        -2.0 * t3 + 3.0 * t2,
        (t3 - 2.0 * t2 + t) * h,
        (t3 - t2) * h,
    ];
    let dw = [
        (6.0 * t2 - 6.0 * t) / h,
        (-6.0 * t2 + 6.0 * t) / h,
        3.0 * t2 - 4.0 * t + 1.0,
        3.0 * t2 - 2.0 * t,
    ];
    (w, dw)
}

fn locate(axis: &[f64], v: f64, coord: &'static str) -> Result<usize, NumericsError> {
    let n = axis.len();
    if !(v >= axis[0] && v <= axis[n - 1]) {
        return Err(NumericsError::OutOfRange {
            coord,
            value: v,
            min: axis[0],
            max: axis[n - 1],
        });
    }
    let i = axis.partition_point(|&a| a <= v);
    Ok(i.clamp(1, n - 1) - 1)
}

impl Bicubic {
    /// `values[i * ys.len() + j]` samples f(xs[i], ys[j]). Axes must be
    /// strictly increasing with at least two points each.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<f64>) -> Result<Self, NumericsError> {
        let (nx, ny) = (xs.len(), ys.len());
        if nx < 2 || ny < 2 || values.len() != nx * ny {
            return Err(NumericsError::Dimension {
                context: format!(
                    "bicubic table needs nx>=2, ny>=2, nx*ny values; got {nx}x{ny} with {} values",
                    values.len()
                ),
            });
        }
        for w in xs.windows(2).chain(ys.windows(2)) {
            if !(w[1] > w[0]) {
                return Err(NumericsError::Dimension {
                    context: "bicubic axes must be strictly increasing".into(),
                });
            }
        }
        let sx = axis_stencils(&xs);
        let sy = axis_stencils(&ys);
        let mut fx = vec![0.0; nx * ny];
        let mut fy = vec![0.0; nx * ny];
        let mut fxy = vec![0.0; nx * ny];
        for i in 0..nx {
            let (s, w) = &sx[i];
            for j in 0..ny {
                fx[i * ny + j] = w
                    .iter()
                    .enumerate()
                    .map(|(m, wm)| wm * values[(s + m) * ny + j])
                    .sum();
            }
        }
        for j in 0..ny {
            let (s, w) = &sy[j];
            for i in 0..nx {
                fy[i * ny + j] = w
                    .iter()
                    .enumerate()
                    .map(|(m, wm)| wm * values[i * ny + s + m])
                    .sum();
                fxy[i * ny + j] = w
                    .iter()
                    .enumerate()
                    .map(|(m, wm)| wm * fx[i * ny + s + m])
                    .sum();
            }
        }
        Ok(Bicubic {
            xs,
            ys,
            f: values,
            fx,
            fy,
            fxy,
        })
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.ys[0], *self.ys.last().unwrap())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    /// Hermite weights for (x, y); reusable across tables on the same axes.
    pub fn basis(&self, x: f64, y: f64) -> Result<CellBasis, NumericsError> {
        let i = locate(&self.xs, x, "x")?;
        let j = locate(&self.ys, y, "y")?;
        let hx = self.xs[i + 1] - self.xs[i];
        let hy = self.ys[j + 1] - self.ys[j];
        let (wx, dwx) = hermite((x - self.xs[i]) / hx, hx);
        let (wy, dwy) = hermite((y - self.ys[j]) / hy, hy);
        Ok(CellBasis {
            i,
            j,
            nx: self.xs.len(),
            ny: self.ys.len(),
            wx,
            wy,
            dwx,
            dwy,
        })
    }

    /// (value, ∂/∂x, ∂/∂y) using a precomputed basis.
    pub fn eval_with(&self, b: &CellBasis) -> (f64, f64, f64) {
        assert_eq!(
            (b.nx, b.ny),
            (self.xs.len(), self.ys.len()),
            "basis built on a different grid"
        );
        let ny = self.ys.len();
        // corner data in the same ordering as the Hermite weights:
        // rows select x-corner/x-slope, cols select y-corner/y-slope
        let idx = [b.i * ny + b.j, (b.i + 1) * ny + b.j];
        let mut m = [[0.0; 4]; 4];
        for (r, &base) in idx.iter().enumerate() {
            for c in 0..2 {
                m[r][c] = self.f[base + c];
                m[r][c + 2] = self.fy[base + c];
                m[r + 2][c] = self.fx[base + c];
                m[r + 2][c + 2] = self.fxy[base + c];
            }
        }
        let mut val = 0.0;
        let mut dx = 0.0;
        let mut dy = 0.0;
        for r in 0..4 {
            let mut sy = 0.0;
            let mut sdy = 0.0;
            for c in 0..4 {
                sy += m[r][c] * b.wy[c];
                sdy += m[r][c] * b.dwy[c];
            }
            val += b.wx[r] * sy;
            dx += b.dwx[r] * sy;
            dy += b.wx[r] * sdy;
        }
        (val, dx, dy)
    }

    /// (value, ∂/∂x, ∂/∂y) at (x, y).
    pub fn eval(&self, x: f64, y: f64) -> Result<(f64, f64, f64), NumericsError> {
        let b = self.basis(x, y)?;
        Ok(self.eval_with(&b))
    }

    pub fn eval_value(&self, x: f64, y: f64) -> Result<f64, NumericsError> {
        Ok(self.eval(x, y)?.0)
    }
}

/// C¹ cubic Hermite curve on a 1D grid; node slopes from the same 4-point
/// Lagrange stencils as [`Bicubic`], so cubics are reproduced exactly.
#[derive(Debug, Clone)]
pub struct Cubic1 {
    xs: Vec<f64>,
    f: Vec<f64>,
    fx: Vec<f64>,
}

impl Cubic1 {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self, NumericsError> {
        if xs.len() < 2 || values.len() != xs.len() {
            return Err(NumericsError::Dimension {
                context: format!(
                    "cubic curve needs n>=2 matching values; got {} nodes, {} values",
                    xs.len(),
                    values.len()
                ),
            });
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(NumericsError::Dimension {
                    context: "cubic curve axis must be strictly increasing".into(),
                });
            }
        }
        let fx = axis_stencils(&xs)
            .iter()
            .map(|(s, w)| w.iter().enumerate().map(|(m, wm)| wm * values[s + m]).sum())
            .collect();
        Ok(Cubic1 { xs, f: values, fx })
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    /// (value, d/dx) at x.
    pub fn eval(&self, x: f64) -> Result<(f64, f64), NumericsError> {
        let i = locate(&self.xs, x, "x")?;
        let h = self.xs[i + 1] - self.xs[i];
        let (w, dw) = hermite((x - self.xs[i]) / h, h);
        let d = [self.f[i], self.f[i + 1], self.fx[i], self.fx[i + 1]];
        let val = (0..4).map(|k| w[k] * d[k]).sum();
        let der = (0..4).map(|k| dw[k] * d[k]).sum();
        Ok((val, der))
    }

    pub fn eval_value(&self, x: f64) -> Result<f64, NumericsError> {
        Ok(self.eval(x)?.0)
    }
}
