//! Conductive separating wall between the hot and cold channels, and the
//! convective heat-transfer closures for each side.

/// Wall temperature field with lumped per-cell heat capacity.
#[derive(Debug, Clone)]
pub struct WallGrid {
    pub n_cells: usize,
    pub dx: f64,
    /// Total wall cross-sectional area (all channels), m².
    pub a_w: f64,
    pub rho_w: f64,
    pub cp_w: f64,
    pub t_w: Vec<f64>,
}

impl WallGrid {
    pub fn uniform(n_cells: usize, length: f64, a_w: f64, rho_w: f64, cp_w: f64, t: f64) -> Self {
        assert!(n_cells >= 1 && a_w > 0.0 && rho_w > 0.0 && cp_w > 0.0 && t > 0.0);
        WallGrid {
            n_cells,
            dx: length / n_cells as f64,
            a_w,
            rho_w,
            cp_w,
            t_w: vec![t; n_cells],
        }
    }

    pub fn total_energy(&self) -> f64 {
        self.a_w * self.rho_w * self.cp_w * self.dx * self.t_w.iter().sum::<f64>()
    }
}

/// Ngo-Ishizuka zigzag-channel correlation for the sCO2 side.
pub fn nusselt_hot(re: f64, pr: f64) -> f64 {
    0.1696 * re.powf(0.629) * pr.powf(0.317)
}

/// Constant laminar Nusselt number for a straight semicircular duct (oil
/// side).
pub const NU_OIL: f64 = 4.089;

/// Convective coefficient U = Nu·k/L_C with the hydraulic diameter as the
/// characteristic length.
pub fn heat_transfer_coefficient(nu: f64, k: f64, d_h: f64) -> f64 {
    nu * k / d_h
}

/// Heat rate per unit length from fluid to wall, W/m, over `n_chans`
/// channels of wetted perimeter `perim` each.
pub fn wall_heat_rate(n_chans: f64, u: f64, perim: f64, t_fluid: f64, t_w: f64) -> f64 {
    n_chans * u * perim * (t_fluid - t_w)
}

/// Advances the wall temperatures with the heat inputs `q_h`, `q_c`
/// (W/m into the wall) held constant over the step; the ODE is then linear
/// with a constant source, so forward Euler is exact.
pub fn step_wall(wall: &mut WallGrid, q_h: &[f64], q_c: &[f64], dt: f64) {
    assert_eq!(q_h.len(), wall.n_cells);
    assert_eq!(q_c.len(), wall.n_cells);
    let cap = wall.a_w * wall.rho_w * wall.cp_w;
    for i in 0..wall.n_cells {
        wall.t_w[i] += dt * (q_h[i] + q_c[i]) / cap;
    }
}
