//! Kalman filter steps over an explicit discrete-time linearization.
//!
//! The prediction and correction are written against plain matrices so the
//! same algebra runs on the plant observer and on small synthetic systems
//! used as oracles.

use crate::numerics::Matrix;

/// Ridge added to the innovation covariance when its solve fails.
const INNOVATION_RIDGE: f64 = 1.0e-9;

/// State estimate: mean, covariance, and bookkeeping from the most recent
/// correction.
#[derive(Debug, Clone)]
pub struct AugmentedEstimate {
    pub mean: Vec<f64>,
    pub cov: Matrix,
    pub time: f64,
    /// Innovation of the most recent correction, kept for logging.
    pub innovation: Vec<f64>,
    /// The innovation covariance was singular and needed a ridge.
    pub regularized: bool,
}

impl AugmentedEstimate {
    pub fn new(mean: Vec<f64>, cov: Matrix, time: f64) -> Self {
        assert!(cov.is_square());
        assert_eq!(cov.rows(), mean.len());
        Self {
            mean,
            cov,
            time,
            innovation: Vec::new(),
            regularized: false,
        }
    }

    pub fn n(&self) -> usize {
        self.mean.len()
    }
}

/// Covariance prediction Σ⁺ = A (Σ + Σ_wc Δt) Aᵀ: one congruence carries
/// both the prior covariance and the discretized process noise
/// A Σ_wc Aᵀ Δt. The caller supplies the already propagated mean.
pub fn ekf_predict_step(
    est: &AugmentedEstimate,
    mean_next: Vec<f64>,
    a: &Matrix,
    sigma_wc_diag: &[f64],
    dt: f64,
) -> AugmentedEstimate {
    let n = est.n();
    assert_eq!(mean_next.len(), n);
    assert_eq!(a.rows(), n);
    assert_eq!(sigma_wc_diag.len(), n);
    let mut inner = est.cov.clone();
    for (i, &q) in sigma_wc_diag.iter().enumerate() {
        inner[(i, i)] += q * dt;
    }
    let mut cov = &(a * &inner) * &a.transpose();
    cov.symmetrize();
    AugmentedEstimate {
        mean: mean_next,
        cov,
        time: est.time + dt,
        innovation: est.innovation.clone(),
        regularized: est.regularized,
    }
}

/// Measurement update: gain from the innovation-covariance solve and the
/// Joseph-form covariance recursion, which keeps the result symmetric
/// positive semidefinite for any gain.
pub fn ekf_correct_step(
    est: &AugmentedEstimate,
    y: &[f64],
    y_pred: &[f64],
    c: &Matrix,
    sigma_v: &Matrix,
) -> AugmentedEstimate {
    let n = est.n();
    let ly = y.len();
    assert_eq!(y_pred.len(), ly);
    assert_eq!((c.rows(), c.cols()), (ly, n));
    assert_eq!((sigma_v.rows(), sigma_v.cols()), (ly, ly));

    let innovation: Vec<f64> = y.iter().zip(y_pred).map(|(m, p)| m - p).collect();

    let p_ct = &est.cov * &c.transpose();
    let s = &(c * &p_ct) + sigma_v;
    // K = Σ Cᵀ S⁻¹, via S Kᵀ = (Σ Cᵀ)ᵀ with S symmetric
    let mut regularized = false;
    let k_t = match s.solve(&p_ct.transpose()) {
        Ok(sol) => sol,
        Err(_) => {
            regularized = true;
            eprintln!(
                "warning: singular innovation covariance, adding {INNOVATION_RIDGE:.0e} ridge"
            );
            let mut ridged = s.clone();
            for i in 0..ly {
                ridged[(i, i)] += INNOVATION_RIDGE;
            }
            ridged
                .solve(&p_ct.transpose())
                .expect("ridged innovation covariance must be solvable")
        }
    };
    let k = k_t.transpose();

    let mut mean = est.mean.clone();
    for (m, dm) in mean.iter_mut().zip(k.matvec(&innovation)) {
        *m += dm;
    }

    let mut i_kc = Matrix::identity(n);
    let kc = &k * c;
    for (o, v) in i_kc.as_mut_slice().iter_mut().zip(kc.as_slice()) {
        *o -= v;
    }
    let mut cov = &(&(&i_kc * &est.cov) * &i_kc.transpose())
        + &(&(&k * sigma_v) * &k.transpose());
    cov.symmetrize();

    AugmentedEstimate {
        mean,
        cov,
        time: est.time,
        innovation,
        regularized,
    }
}
