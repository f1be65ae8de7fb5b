//! Observer over the thermal submodel augmented with output disturbances.
//!
//! Each step relinearizes the wall/energy rows at the current mean, so the
//! mean moves by the exactly-discretized drift while the covariance follows
//! the local transition matrix. The four disturbance states are a random
//! walk added to the measured temperatures; constant plant-model mismatch
//! accumulates there instead of biasing the state estimate.

use crate::error::SimError;
use crate::numerics::{discretize_lti, Matrix};
use crate::reduced::{ReducedModel, ReducedState, ThermalInputs};

use super::filter::{ekf_correct_step, ekf_predict_step, AugmentedEstimate};
use super::noise::NoiseConfig;

/// Observer sampling interval: five corrections per control update.
pub const ESTIMATOR_DT: f64 = 0.06;

pub struct Observer<'a> {
    pub model: &'a ReducedModel<'a>,
    pub noise: NoiseConfig,
    pub dt: f64,
}

impl<'a> Observer<'a> {
    pub fn new(model: &'a ReducedModel<'a>, noise: NoiseConfig) -> Self {
        assert_eq!(noise.sigma_wc.len(), model.layout.n_thermal() + 4);
        Self {
            model,
            noise,
            dt: ESTIMATOR_DT,
        }
    }

    pub fn n_thermal(&self) -> usize {
        self.model.layout.n_thermal()
    }

    pub fn n_aug(&self) -> usize {
        self.n_thermal() + 4
    }

    /// Estimate seeded from a full model state: zero disturbances and a
    /// diagonal covariance at the square of the process-noise scales.
    pub fn initial_estimate(&self, x: &ReducedState, time: f64) -> AugmentedEstimate {
        let mut mean = self.model.thermal_state(x);
        mean.extend_from_slice(&[0.0; 4]);
        let diag: Vec<f64> = self.noise.sigma_wc.iter().map(|q| q * q).collect();
        AugmentedEstimate::new(mean, Matrix::diag(&diag), time)
    }

    /// Prediction: relinearize the thermal rows at the mean, discretize
    /// exactly over the sampling interval, and push mean and covariance
    /// through the affine model. The disturbance block of the transition
    /// is the identity.
    pub fn ekf_predict(
        &self,
        est: &AugmentedEstimate,
        u: &ThermalInputs,
    ) -> Result<AugmentedEstimate, SimError> {
        let nt = self.n_thermal();
        let x_full = self.model.assemble_thermal(&est.mean[..nt], u);
        let lin = self.model.linearize_thermal(&x_full)?;
        let b = Matrix::zeros(nt, 1);
        let (a_d, _, f0_d) = discretize_lti(&lin.a, &b, &lin.f0, self.dt)?;

        // the linearization point is the mean itself, so the state part
        // advances by the discretized drift alone
        let mut mean_next = est.mean.clone();
        for (m, df) in mean_next.iter_mut().zip(&f0_d) {
            *m += df;
        }
        let mut a_a = Matrix::identity(self.n_aug());
        a_a.set_block(0, 0, &a_d);
        Ok(ekf_predict_step(
            est,
            mean_next,
            &a_a,
            &self.noise.sigma_wc,
            self.dt,
        ))
    }

    /// Predicted measurement (including the disturbance contribution) and
    /// the augmented output matrix at the estimate.
    pub fn measurement_model(
        &self,
        est: &AugmentedEstimate,
        u: &ThermalInputs,
    ) -> Result<(Vec<f64>, Matrix), SimError> {
        let nt = self.n_thermal();
        let x_full = self.model.assemble_thermal(&est.mean[..nt], u);
        let lin = self.model.linearize_thermal(&x_full)?;
        let d = &est.mean[nt..];
        let y_pred: Vec<f64> = lin.y0.iter().zip(d).map(|(y, dk)| y + dk).collect();
        let mut c_a = Matrix::zeros(4, self.n_aug());
        c_a.set_block(0, 0, &lin.c_y);
        for r in 0..4 {
            c_a[(r, nt + r)] = 1.0;
        }
        Ok((y_pred, c_a))
    }

    pub fn ekf_correct(
        &self,
        est: &AugmentedEstimate,
        u: &ThermalInputs,
        y: &[f64; 4],
    ) -> Result<AugmentedEstimate, SimError> {
        let (y_pred, c_a) = self.measurement_model(est, u)?;
        Ok(ekf_correct_step(est, y, &y_pred, &c_a, &self.noise.sigma_v))
    }
}
