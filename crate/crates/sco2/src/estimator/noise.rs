//! Noise covariances for the thermal-state observer, scaled from nominal
//! operating values.

use crate::error::SimError;
use crate::numerics::Matrix;
use crate::props::FluidProps;
use crate::reduced::ReducedLayout;

/// Nominal operating values the covariances scale from.
#[derive(Debug, Clone, Copy)]
pub struct Nominals {
    pub p_co2: f64,
    pub t_co2: f64,
    pub p_oil: f64,
    pub t_oil: f64,
    /// The wall sits between the two streams; its nominal is their mean.
    pub t_wall: f64,
}

impl Default for Nominals {
    fn default() -> Self {
        Self {
            p_co2: 12.0e6,
            t_co2: 520.0,
            p_oil: 4.0e6,
            t_oil: 570.0,
            t_wall: 545.0,
        }
    }
}

/// Measurement covariance and the diagonal of the continuous-time process
/// covariance over the augmented state [T_wall, e_CO2, e_oil, d].
#[derive(Debug, Clone)]
pub struct NoiseConfig {
    pub sigma_v: Matrix,
    pub sigma_wc: Vec<f64>,
}

/// Variances: 2% of nominal for each measured temperature, 10% of nominal
/// for each thermal state, 5% of the nominal measured temperature for each
/// output disturbance. Nominal energies come from the equations of state
/// at the nominal pressure and temperature.
pub fn build_noise_config(
    nom: &Nominals,
    lay: &ReducedLayout,
    co2: &dyn FluidProps,
    oil: &dyn FluidProps,
) -> Result<NoiseConfig, SimError> {
    let sigma_v = Matrix::diag(&[
        0.02 * nom.t_co2,
        0.02 * nom.t_co2,
        0.02 * nom.t_oil,
        0.02 * nom.t_oil,
    ]);
    let e_co2_nom = co2.state_from_pt(nom.p_co2, nom.t_co2)?.e;
    let e_oil_nom = oil.state_from_pt(nom.p_oil, nom.t_oil)?.e;

    let mut sigma_wc = Vec::with_capacity(lay.n_thermal() + 4);
    sigma_wc.resize(lay.n_hx, 0.1 * nom.t_wall);
    sigma_wc.resize(lay.n_hx + lay.n_high(), 0.1 * e_co2_nom);
    sigma_wc.resize(lay.n_thermal(), 0.1 * e_oil_nom);
    sigma_wc.extend_from_slice(&[
        0.05 * nom.t_co2,
        0.05 * nom.t_co2,
        0.05 * nom.t_oil,
        0.05 * nom.t_oil,
    ]);
    debug_assert!(sigma_wc.iter().all(|&q| q > 0.0));
    Ok(NoiseConfig { sigma_v, sigma_wc })
}
