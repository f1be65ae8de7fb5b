//! Thermal-state observer: an extended Kalman filter over the wall and
//! stream-energy submodel, augmented with one output disturbance per
//! measured temperature so that steady model mismatch ends up in the
//! disturbance estimate instead of a tracking offset.

mod filter;
mod noise;
mod observer;

pub use filter::{ekf_correct_step, ekf_predict_step, AugmentedEstimate};
pub use noise::{build_noise_config, NoiseConfig, Nominals};
pub use observer::{Observer, ESTIMATOR_DT};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{
        compressor_eval_forward, synthetic_compressor_map, synthetic_turbine_map,
        CompressorDesign, CompressorMap, TurbineDesign, TurbineMap,
    };
    use crate::numerics::Matrix;
    use crate::props::{Co2PengRobinson, FluidProps, ThermalOil};
    use crate::reduced::{
        ReducedConfig, ReducedLayout, ReducedModel, ReducedState, ThermalInputs,
    };
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        comp: CompressorMap,
        turb: TurbineMap,
        co2: Co2PengRobinson,
        oil: ThermalOil,
        cfg: ReducedConfig,
        eq: ReducedState,
    }

    impl Fixture {
        fn model(&self) -> ReducedModel<'_> {
            ReducedModel::new(
                self.cfg.clone(),
                &self.comp,
                &self.turb,
                &self.co2,
                &self.oil,
            )
        }

        fn inputs(&self) -> ThermalInputs {
            ThermalInputs {
                p_high: self.eq.p_high,
                mdot_c: self.eq.mdot_c,
                n_c: self.eq.n_c,
                mdot_oil: self.eq.mdot_oil,
            }
        }

        fn noise(&self) -> NoiseConfig {
            let lay = ReducedLayout {
                n_pipe: self.cfg.n_pipe,
                n_hx: self.cfg.pche.n_cells,
            };
            build_noise_config(&Nominals::default(), &lay, &self.co2, &self.oil).unwrap()
        }
    }

    /// Flat-profile equilibrium: every cell at the compressor discharge
    /// temperature, matched flows. All thermal derivatives are near zero.
    fn fixture() -> Fixture {
        let co2 = Co2PengRobinson::default();
        let oil = ThermalOil::default();
        let comp = synthetic_compressor_map(&CompressorDesign::default(), &co2).unwrap();
        let turb = synthetic_turbine_map(&TurbineDesign::default()).unwrap();

        let mut cfg = ReducedConfig::default();
        let n_c = 0.916 * comp.design_speed;
        let mdot = comp.design_mdot;
        let ev = compressor_eval_forward(&comp, &co2, cfg.p_in_stag, cfg.t_in_stag, mdot, n_c)
            .unwrap();
        cfg.t_oil_in = ev.state_out.t;
        cfg.p_out_stag = ev.p_out / turb.design_pr;

        let lay = ReducedLayout {
            n_pipe: cfg.n_pipe,
            n_hx: cfg.pche.n_cells,
        };
        let e_oil = oil.state_from_pt(cfg.p_oil, ev.state_out.t).unwrap().e;
        let eq = ReducedState {
            t_wall: vec![ev.state_out.t; lay.n_hx],
            e_co2: vec![ev.state_out.e; lay.n_high()],
            p_high: ev.p_out,
            mdot_c: mdot,
            mdot_t: mdot,
            n_c,
            e_oil: vec![e_oil; lay.n_hx],
            mdot_oil: 10.0,
            mdot_oil_rate: 0.0,
        };
        Fixture {
            comp,
            turb,
            co2,
            oil,
            cfg,
            eq,
        }
    }

    /// Cholesky test of m + ridge·I; succeeds iff min eigenvalue ≥ −ridge.
    fn is_psd(m: &Matrix, ridge: f64) -> bool {
        let n = m.rows();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = m.row(i)[j] + if i == j { ridge } else { 0.0 };
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s < 0.0 {
                        return false;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = if l[j * n + j] != 0.0 {
                        s / l[j * n + j]
                    } else {
                        0.0
                    };
                }
            }
        }
        true
    }

    fn randn(rng: &mut ChaCha8Rng) -> f64 {
        let u1: f64 = rng.gen::<f64>().max(1.0e-12);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    #[test]
    fn noise_config_matches_the_stated_fractions() {
        let fx = fixture();
        let noise = fx.noise();
        let lay = ReducedLayout {
            n_pipe: fx.cfg.n_pipe,
            n_hx: fx.cfg.pche.n_cells,
        };

        assert_relative_eq!(noise.sigma_v[(0, 0)], 10.4, max_relative = 1e-12);
        assert_relative_eq!(noise.sigma_v[(1, 1)], 10.4, max_relative = 1e-12);
        assert_relative_eq!(noise.sigma_v[(2, 2)], 11.4, max_relative = 1e-12);
        assert_relative_eq!(noise.sigma_v[(3, 3)], 11.4, max_relative = 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(noise.sigma_v[(i, j)], 0.0);
                }
            }
        }

        assert_eq!(noise.sigma_wc.len(), lay.n_thermal() + 4);
        assert!(noise.sigma_wc.iter().all(|&q| q > 0.0));
        for w in 0..lay.n_hx {
            assert_relative_eq!(noise.sigma_wc[w], 54.5, max_relative = 1e-12);
        }
        let e_co2_nom = fx.co2.state_from_pt(12.0e6, 520.0).unwrap().e;
        let e_oil_nom = fx.oil.state_from_pt(4.0e6, 570.0).unwrap().e;
        for i in 0..lay.n_high() {
            assert_relative_eq!(
                noise.sigma_wc[lay.n_hx + i],
                0.1 * e_co2_nom,
                max_relative = 1e-12
            );
        }
        for j in 0..lay.n_hx {
            assert_relative_eq!(
                noise.sigma_wc[lay.n_hx + lay.n_high() + j],
                0.1 * e_oil_nom,
                max_relative = 1e-12
            );
        }
        let tail = &noise.sigma_wc[lay.n_thermal()..];
        assert_eq!(tail, &[26.0, 26.0, 28.5, 28.5]);
    }

    #[test]
    fn prediction_covariance_matches_a_hand_computation() {
        let est = AugmentedEstimate::new(vec![1.0, -2.0], Matrix::diag(&[1.0, 2.0]), 0.0);
        let a = Matrix::from_rows(&[&[1.0, 0.1], &[0.0, 1.0]]);

        // zero process noise: Σ⁺ = A Σ Aᵀ = [[1.02, 0.2], [0.2, 2.0]]
        let pred = ekf_predict_step(&est, a.matvec(&est.mean), &a, &[0.0, 0.0], 0.1);
        assert_eq!(pred.mean, vec![0.8, -2.0]);
        assert_abs_diff_eq!(pred.cov[(0, 0)], 1.02, epsilon = 1e-14);
        assert_abs_diff_eq!(pred.cov[(0, 1)], 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(pred.cov[(1, 0)], 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(pred.cov[(1, 1)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pred.time, 0.1, epsilon = 1e-15);

        // with noise the congruence covers Σ + Σ_wc·dt:
        // inner = diag(1 + 0.5*0.1, 2 + 1.0*0.1) = diag(1.05, 2.1)
        // Σ⁺ = [[1.05 + 0.021, 0.21], [0.21, 2.1]]
        let pred = ekf_predict_step(&est, a.matvec(&est.mean), &a, &[0.5, 1.0], 0.1);
        assert_abs_diff_eq!(pred.cov[(0, 0)], 1.071, epsilon = 1e-14);
        assert_abs_diff_eq!(pred.cov[(0, 1)], 0.21, epsilon = 1e-14);
        assert_abs_diff_eq!(pred.cov[(1, 1)], 2.1, epsilon = 1e-14);
    }

    #[test]
    fn disturbance_mean_is_a_random_walk_under_prediction() {
        let fx = fixture();
        let m = fx.model();
        let obs = Observer::new(&m, fx.noise());
        let nt = obs.n_thermal();

        let mut est = obs.initial_estimate(&fx.eq, 0.0);
        est.mean[nt..].copy_from_slice(&[1.0, -2.0, 3.0, -4.0]);
        let pred = obs.ekf_predict(&est, &fx.inputs()).unwrap();

        assert_eq!(&pred.mean[nt..], &[1.0, -2.0, 3.0, -4.0]);
        // at the constructed equilibrium the thermal mean barely moves
        for k in 0..nt {
            let scale = if k >= fx.cfg.pche.n_cells && k < nt - fx.cfg.pche.n_cells {
                5.0e5
            } else if k < fx.cfg.pche.n_cells {
                500.0
            } else {
                5.0e5
            };
            assert!(
                (pred.mean[k] - est.mean[k]).abs() < 1.0e-4 * scale,
                "thermal state {k} drifted by {}",
                pred.mean[k] - est.mean[k]
            );
        }
        assert_abs_diff_eq!(pred.time, obs.dt, epsilon = 1e-15);
    }

    #[test]
    fn covariance_stays_symmetric_over_many_predictions() {
        let a = Matrix::from_rows(&[
            &[0.9, 0.2, 0.0],
            &[-0.2, 0.9, 0.1],
            &[0.0, 0.0, 0.95],
        ]);
        let mut est =
            AugmentedEstimate::new(vec![1.0, 2.0, 3.0], Matrix::diag(&[1.0, 2.0, 3.0]), 0.0);
        for _ in 0..1000 {
            est = ekf_predict_step(&est, a.matvec(&est.mean), &a, &[0.1, 0.2, 0.3], 0.5);
        }
        assert!(est.cov.all_finite());
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (est.cov[(i, j)] - est.cov[(j, i)]).abs() <= 1.0e-12,
                    "asymmetry at ({i},{j})"
                );
            }
        }
        assert!(is_psd(&est.cov, 1.0e-10));
    }

    #[test]
    fn zero_innovation_leaves_the_mean_unchanged() {
        let fx = fixture();
        let m = fx.model();
        let obs = Observer::new(&m, fx.noise());
        let nt = obs.n_thermal();
        let u = fx.inputs();

        let mut est = obs.initial_estimate(&fx.eq, 0.0);
        est.mean[nt..].copy_from_slice(&[0.5, -0.5, 1.5, -1.5]);
        let (y_pred, _) = obs.measurement_model(&est, &u).unwrap();
        let y: [f64; 4] = y_pred.try_into().unwrap();
        let corr = obs.ekf_correct(&est, &u, &y).unwrap();

        assert_eq!(corr.mean, est.mean);
        assert_eq!(corr.innovation, vec![0.0; 4]);
        assert!(!corr.regularized);
        // the update still contracts the measured directions
        let tr_before: f64 = (0..est.n()).map(|i| est.cov[(i, i)]).sum();
        let tr_after: f64 = (0..est.n()).map(|i| corr.cov[(i, i)]).sum();
        assert!(tr_after < tr_before);
    }

    #[test]
    fn steady_gain_matches_the_riccati_solution() {
        let (a, c, q, r) = (0.9, 1.2, 0.5, 0.2);
        let a_m = Matrix::diag(&[a]);
        let c_m = Matrix::from_rows(&[&[c]]);
        let sv = Matrix::diag(&[r]);

        let mut est = AugmentedEstimate::new(vec![0.0], Matrix::diag(&[1.0]), 0.0);
        let mut gain = 0.0;
        for _ in 0..300 {
            let pred = ekf_predict_step(&est, vec![a * est.mean[0]], &a_m, &[q], 1.0);
            let p = pred.cov[(0, 0)];
            gain = p * c / (c * c * p + r);
            let y_pred = [c * pred.mean[0]];
            est = ekf_correct_step(&pred, &[0.3], &y_pred, &c_m, &sv);
        }

        // fixed point of the predicted covariance with Σ_w = a²q:
        // P = a²·P·r/(c²P + r) + a²q  ⇒  c²P² + (r − a²r − a²qc²)P − a²qr = 0
        let b_coef = r - a * a * r - a * a * q * c * c;
        let p_star =
            (-b_coef + (b_coef * b_coef + 4.0 * c * c * a * a * q * r).sqrt()) / (2.0 * c * c);
        let k_star = p_star * c / (c * c * p_star + r);
        assert_abs_diff_eq!(gain, k_star, epsilon = 1e-6);
    }

    #[test]
    fn a_constant_output_bias_lands_in_the_disturbance_states() {
        let fx = fixture();
        let m = fx.model();
        let obs = Observer::new(&m, fx.noise());
        let nt = obs.n_thermal();
        let u = fx.inputs();

        let y_true = m.eval_measurements(&fx.eq).unwrap();
        let bias = [5.0, -4.0, 3.0, -2.0];
        let mut y = y_true;
        for (m_k, b_k) in y.iter_mut().zip(bias) {
            *m_k += b_k;
        }

        let mut est = obs.initial_estimate(&fx.eq, 0.0);
        for _ in 0..200 {
            est = obs.ekf_predict(&est, &u).unwrap();
            est = obs.ekf_correct(&est, &u, &y).unwrap();
        }

        for (k, (&d_k, &b_k)) in est.mean[nt..].iter().zip(bias.iter()).enumerate() {
            assert!(
                (d_k - b_k).abs() <= 0.01 * b_k.abs(),
                "disturbance {k}: estimated {d_k:.4}, injected {b_k:.4}"
            );
        }
        assert!(!est.regularized);
        assert!(is_psd(&est.cov, 1.0e-10), "covariance lost semidefiniteness");
    }

    #[test]
    fn innovations_are_statistically_consistent() {
        // matching plant and filter on a 2-state LTI system: the normalized
        // innovation squared must average near the measurement count
        let a = Matrix::from_rows(&[&[0.95, 0.1], &[0.0, 0.9]]);
        let c = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let q: [f64; 2] = [0.01, 0.02];
        let r: [f64; 2] = [0.04, 0.05];
        let sv = Matrix::diag(&r);
        let dt = 1.0;

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut x_true = vec![0.0, 0.0];
        let mut est =
            AugmentedEstimate::new(vec![0.0, 0.0], Matrix::diag(&[0.1, 0.1]), 0.0);

        let steps = 1000;
        let mut nis_sum = 0.0;
        for _ in 0..steps {
            // plant noise matches the filter's Σ_w = A diag(q) Aᵀ dt
            let w = [
                (q[0] * dt).sqrt() * randn(&mut rng),
                (q[1] * dt).sqrt() * randn(&mut rng),
            ];
            x_true = a.matvec(&{
                let mut xw = x_true.clone();
                xw[0] += w[0];
                xw[1] += w[1];
                xw
            });
            let y = [
                x_true[0] + r[0].sqrt() * randn(&mut rng),
                x_true[1] + r[1].sqrt() * randn(&mut rng),
            ];

            let pred = ekf_predict_step(&est, a.matvec(&est.mean), &a, &q, dt);
            let y_pred = c.matvec(&pred.mean);
            let s = &(&(&c * &pred.cov) * &c.transpose()) + &sv;
            let innov = [y[0] - y_pred[0], y[1] - y_pred[1]];
            let sol = s.solve_vec(&innov).unwrap();
            nis_sum += innov[0] * sol[0] + innov[1] * sol[1];
            est = ekf_correct_step(&pred, &y, &y_pred, &c, &sv);
        }

        let mean_nis = nis_sum / steps as f64;
        let expected = 2.0;
        assert!(
            mean_nis > 0.5 * expected && mean_nis < 2.0 * expected,
            "mean NIS {mean_nis:.3} outside [0.5, 2] x {expected}"
        );
        assert!(is_psd(&est.cov, 1.0e-10));
    }

    #[test]
    fn singular_innovation_covariance_gets_a_ridge() {
        // zero prior covariance and zero measurement noise make the
        // innovation covariance exactly singular
        let est = AugmentedEstimate::new(vec![1.0], Matrix::diag(&[0.0]), 0.0);
        let c = Matrix::from_rows(&[&[1.0]]);
        let sv = Matrix::diag(&[0.0]);
        let corr = ekf_correct_step(&est, &[2.0], &[1.0], &c, &sv);
        assert!(corr.regularized);
        assert!(corr.mean[0].is_finite());
        assert!(corr.cov.all_finite());
    }
}
