//! Reduced-order control model: slow-timescale ODEs for wall temperatures,
//! stream internal energies, high-side pressure, the two CO2 mass flows,
//! compressor speed, and the oil pump, plus the output model, continuous
//! linearization, and the surge-limited minimum compressor speed.

mod linearize;
mod model;
mod state;
mod surge;
mod thermal;

pub use linearize::LinearModel;
pub use model::{
    MapPartials, ReducedConfig, ReducedModel, FD_REL_STEP, SCALE_E, SCALE_MDOT, SCALE_P,
    SCALE_T,
};
pub use state::{ReducedInput, ReducedLayout, ReducedState};
pub use surge::compute_min_compressor_speed;
pub use thermal::{ThermalInputs, ThermalLinearization};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{
        compressor_eval_forward, synthetic_compressor_map, synthetic_turbine_map,
        CompressorDesign, CompressorMap, TurbineDesign, TurbineMap,
    };
    use crate::props::{Co2PengRobinson, FluidProps, ThermalOil};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    struct Fixture {
        comp: CompressorMap,
        turb: TurbineMap,
        co2: Co2PengRobinson,
        oil: ThermalOil,
        cfg: ReducedConfig,
        eq: ReducedState,
        eq_u: ReducedInput,
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
    }

    /// Plant with flat temperature profiles: every stream cell, the wall,
    /// and the oil inlet sit at the compressor discharge temperature, flows
    /// are matched, and the motor torque balances the load. Every
    /// derivative is then zero up to property-inversion noise.
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
        let eq_u = ReducedInput {
            torque: ev.wdot / n_c,
            torque_rate: 0.0,
            mdot_oil_ref: 10.0,
        };
        Fixture {
            comp,
            turb,
            co2,
            oil,
            cfg,
            eq,
            eq_u,
        }
    }

    fn state_scales(lay: &ReducedLayout, n_design: f64) -> Vec<f64> {
        let mut s = vec![0.0; lay.n_states()];
        for w in 0..lay.n_hx {
            s[lay.i_t_wall(w)] = SCALE_T;
        }
        for i in 0..lay.n_high() {
            s[lay.i_e_co2(i)] = SCALE_E;
        }
        s[lay.i_p_high()] = SCALE_P;
        s[lay.i_mdot_c()] = SCALE_MDOT;
        s[lay.i_mdot_t()] = SCALE_MDOT;
        s[lay.i_n_c()] = n_design;
        for j in 0..lay.n_hx {
            s[lay.i_e_oil(j)] = SCALE_E;
        }
        s[lay.i_mdot_oil()] = SCALE_MDOT;
        s[lay.i_mdot_oil_rate()] = SCALE_MDOT;
        s
    }

    #[test]
    fn constructed_equilibrium_has_near_zero_derivatives() {
        let fx = fixture();
        let m = fx.model();
        let dx = m.eval_dynamics(&fx.eq, &fx.eq_u).unwrap();
        let scales = state_scales(&m.layout, fx.comp.design_speed);
        for (i, (&d, &s)) in dx.iter().zip(scales.iter()).enumerate() {
            assert!(
                d.abs() < 1.0e-4 * s,
                "state {i}: derivative {d:.3e} vs scale {s:.3e}"
            );
        }
    }

    #[test]
    fn matched_flows_and_flat_profiles_freeze_turbine_flow() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        // torque imbalance accelerates the shaft, but with matched flows and
        // zero energy derivatives the turbine flow stays frozen
        let mut u = fx.eq_u;
        u.torque += 20.0;
        let dx = m.eval_dynamics(&fx.eq, &u).unwrap();
        assert!(dx[lay.i_n_c()] > 1.0, "shaft should accelerate");
        assert!(
            dx[lay.i_mdot_t()].abs() < 1.0e-6,
            "turbine flow derivative {} should vanish",
            dx[lay.i_mdot_t()]
        );
        assert!(dx[lay.i_p_high()].abs() < 1.0);
        // compressor flow reacts immediately through the speedline slope
        assert!(dx[lay.i_mdot_c()] > 0.0);
    }

    #[test]
    fn pump_is_a_second_order_lag_at_the_stated_tuning() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        // at the setpoint with zero rate, both pump derivatives vanish
        let dx = m.eval_dynamics(&fx.eq, &fx.eq_u).unwrap();
        assert_abs_diff_eq!(dx[lay.i_mdot_oil()], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dx[lay.i_mdot_oil_rate()], 0.0, epsilon = 1e-9);

        // a setpoint offset drives the rate at omega_n^2 * error
        let mut u = fx.eq_u;
        u.mdot_oil_ref += 2.0;
        let dx = m.eval_dynamics(&fx.eq, &u).unwrap();
        let w_n = m.cfg.pump_natural_freq;
        assert_relative_eq!(dx[lay.i_mdot_oil_rate()], w_n * w_n * 2.0, max_relative = 1e-12);

        // a pure rate decays at 2*zeta*omega_n
        let mut x = fx.eq.clone();
        x.mdot_oil_rate = 0.5;
        let dx = m.eval_dynamics(&x, &fx.eq_u).unwrap();
        assert_relative_eq!(
            dx[lay.i_mdot_oil_rate()],
            -2.0 * m.cfg.pump_damping * w_n * 0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn turbine_flow_relaxes_toward_compressor_flow() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        let mut x = fx.eq.clone();
        x.mdot_t = x.mdot_c + 1.0;

        // thermal states and pressure frozen: the flow mismatch alone
        // drives a first-order relaxation toward the compressor flow
        let dt = 0.05;
        let mut gap = x.mdot_t - x.mdot_c;
        for _ in 0..40 {
            let dx = m.eval_dynamics(&x, &fx.eq_u).unwrap();
            assert!(
                dx[lay.i_mdot_t()] * gap < 0.0,
                "turbine flow must move toward the compressor flow"
            );
            // pressure follows the flow derivative with the opposite sign
            // of the turbine pressure-flow slope (negative), so excess flow
            // bleeds the high side down
            assert!(dx[lay.i_p_high()] * gap < 0.0);
            x.mdot_t += dt * dx[lay.i_mdot_t()];
            let new_gap = x.mdot_t - x.mdot_c;
            assert!(new_gap.abs() < gap.abs(), "gap must shrink monotonically");
            gap = new_gap;
        }
        assert!(
            gap.abs() < 0.05,
            "gap should have decayed substantially, still {gap:.3}"
        );
    }

    #[test]
    fn turbine_inlet_temperature_responds_at_the_property_partial() {
        let fx = fixture();
        let m = fx.model();
        let pp = fx
            .co2
            .partials_pe(fx.eq.p_high, *fx.eq.e_co2.last().unwrap())
            .unwrap();
        let (_, t0) = m.eval_outputs(&fx.eq).unwrap();

        // Richardson: halving the step must shrink the first-order defect
        let mut defects = Vec::new();
        for &delta in &[2.0e3, 1.0e3] {
            let mut x = fx.eq.clone();
            *x.e_co2.last_mut().unwrap() += delta;
            let (_, t) = m.eval_outputs(&x).unwrap();
            defects.push(((t - t0) / delta - pp.dt_de).abs());
        }
        assert!(
            defects[1] < 0.6 * defects[0] + 1.0e-12,
            "defect did not shrink: {defects:?}"
        );
        assert!(defects[0] < 0.05 * pp.dt_de.abs());
    }

    #[test]
    fn net_power_goes_negative_when_the_turbine_is_starved() {
        let fx = fixture();
        let m = fx.model();
        let (wnet_eq, _) = m.eval_outputs(&fx.eq).unwrap();
        let mut x = fx.eq.clone();
        x.mdot_t = 2.0;
        let (wnet, _) = m.eval_outputs(&x).unwrap();
        assert!(wnet < 0.0, "starved turbine must not cover compressor work");
        assert!(wnet < wnet_eq);
    }

    #[test]
    fn linearization_point_value_is_the_exact_dynamics() {
        let fx = fixture();
        let m = fx.model();
        let lin = m.linearize(&fx.eq, &fx.eq_u).unwrap();
        let f = m.eval_dynamics(&fx.eq, &fx.eq_u).unwrap();
        assert_eq!(lin.f0, f, "f0 must be the exact nonlinear evaluation");
        assert!(!lin.one_sided, "interior point should not clip any stencil");
    }

    #[test]
    fn wall_rows_couple_only_to_the_three_neighbors() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        let lin = m.linearize(&fx.eq, &fx.eq_u).unwrap();
        for w in 0..lay.n_hx {
            let row = lin.a.row(lay.i_t_wall(w));
            let nonzero: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(c, _)| c)
                .collect();
            assert_eq!(
                nonzero,
                vec![
                    lay.i_t_wall(w),
                    lay.i_e_co2(lay.n_pipe + w),
                    lay.i_e_oil(lay.wall_of_oil(w)),
                ],
                "wall row {w}"
            );
        }
    }

    #[test]
    fn energy_rows_have_the_upwind_stencil() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        // a sloped energy profile keeps the upstream enthalpy differences
        // (and with them the mass-flow coupling) away from zero
        let mut x = fx.eq.clone();
        for (i, e) in x.e_co2.iter_mut().enumerate() {
            *e += 2.0e3 * (i + 1) as f64;
        }
        let lin = m.linearize(&x, &fx.eq_u).unwrap();
        // a mid-HX cell: upstream energy, own energy, wall, and mass flow
        let i = lay.n_pipe + lay.n_hx / 2;
        let row = lin.a.row(lay.i_e_co2(i));
        let mut expected = vec![0usize; 0];
        expected.push(lay.i_t_wall(i - lay.n_pipe));
        expected.push(lay.i_e_co2(i - 1));
        expected.push(lay.i_e_co2(i));
        expected.push(lay.i_mdot_c());
        for (c, v) in row.iter().enumerate() {
            if expected.contains(&c) {
                assert!(*v != 0.0, "expected coupling at col {c} missing");
            } else {
                assert_eq!(*v, 0.0, "unexpected coupling at col {c}");
            }
        }
        // a pipe cell: no wall coupling
        let row = lin.a.row(lay.i_e_co2(1));
        for (c, v) in row.iter().enumerate() {
            let keep = c == lay.i_e_co2(0) || c == lay.i_e_co2(1) || c == lay.i_mdot_c();
            if !keep {
                assert_eq!(*v, 0.0, "pipe-cell coupling at col {c}");
            }
        }
    }

    #[test]
    fn wall_column_of_a_matches_a_directional_difference() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        let lin = m.linearize(&fx.eq, &fx.eq_u).unwrap();

        let w = lay.n_hx / 2;
        let col = lay.i_t_wall(w);
        let delta = 1.0e-3;
        let mut xp = fx.eq.clone();
        xp.t_wall[w] += delta;
        let mut xm = fx.eq.clone();
        xm.t_wall[w] -= delta;
        let fp = m.eval_dynamics(&xp, &fx.eq_u).unwrap();
        let fm = m.eval_dynamics(&xm, &fx.eq_u).unwrap();

        let scales = state_scales(&lay, fx.comp.design_speed);
        for r in 0..lay.n_states() {
            let fd = (fp[r] - fm[r]) / (2.0 * delta);
            let an = lin.a.row(r)[col];
            let tol = 1.0e-6 * (an.abs() + scales[r] / SCALE_T);
            assert!(
                (fd - an).abs() <= tol,
                "row {r}: fd {fd:.6e} vs analytic {an:.6e}"
            );
        }
    }

    #[test]
    fn torque_sensitivity_reaches_the_shaft_and_the_compressor_flow() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        let lin = m.linearize(&fx.eq, &fx.eq_u).unwrap();
        assert_relative_eq!(
            lin.b_torque[lay.i_n_c()],
            1.0 / fx.comp.inertia,
            max_relative = 1e-12
        );
        // the speedline rises with speed, so extra torque also pushes flow
        assert!(lin.b_torque[lay.i_mdot_c()] != 0.0);

        let delta = 0.05;
        let mut u = fx.eq_u;
        u.torque += delta;
        let f0 = m.eval_dynamics(&fx.eq, &fx.eq_u).unwrap();
        let f1 = m.eval_dynamics(&fx.eq, &u).unwrap();
        for r in [lay.i_n_c(), lay.i_mdot_c()] {
            let fd = (f1[r] - f0[r]) / delta;
            assert_relative_eq!(fd, lin.b_torque[r], max_relative = 1e-6);
        }
        // the oil setpoint only drives the pump rate row
        for r in 0..lay.n_states() {
            let expect = if r == lay.i_mdot_oil_rate() {
                m.cfg.pump_natural_freq.powi(2)
            } else {
                0.0
            };
            assert_abs_diff_eq!(lin.b.row(r)[1], expect, epsilon = 1e-12);
            assert_abs_diff_eq!(lin.b.row(r)[0], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tracked_output_rows_follow_the_map_slopes() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        let lin = m.linearize(&fx.eq, &fx.eq_u).unwrap();
        let (w0, _) = m.eval_outputs(&fx.eq).unwrap();

        // more turbine flow means more net power
        assert!(lin.c_z.row(0)[lay.i_mdot_t()] > 0.0);
        // more compressor flow costs power
        assert!(lin.c_z.row(0)[lay.i_mdot_c()] < 0.0);

        let delta = 0.02;
        let mut x = fx.eq.clone();
        x.mdot_t += delta;
        let (w1, _) = m.eval_outputs(&x).unwrap();
        assert_relative_eq!(
            (w1 - w0) / delta,
            lin.c_z.row(0)[lay.i_mdot_t()],
            max_relative = 2e-3
        );

        // measured-output rows carry the property partial of their own cell
        let pp = fx.co2.partials_pe(fx.eq.p_high, fx.eq.e_co2[lay.n_pipe]).unwrap();
        assert_relative_eq!(
            lin.c_y.row(0)[lay.i_e_co2(lay.n_pipe)],
            pp.dt_de,
            max_relative = 1e-12
        );
        let g_y = m.eval_measurements(&fx.eq).unwrap();
        assert_eq!(lin.g0_y, g_y);
    }

    #[test]
    fn thermal_submodel_matches_the_full_linearization() {
        let fx = fixture();
        let m = fx.model();
        let lay = m.layout;
        // sloped profiles keep every coefficient away from zero
        let mut x = fx.eq.clone();
        for (i, e) in x.e_co2.iter_mut().enumerate() {
            *e += 2.0e3 * (i + 1) as f64;
        }
        for (j, e) in x.e_oil.iter_mut().enumerate() {
            *e -= 1.5e3 * (j + 1) as f64;
        }
        for (w, t) in x.t_wall.iter_mut().enumerate() {
            *t += 0.5 * w as f64;
        }
        let full = m.linearize(&x, &fx.eq_u).unwrap();
        let th = m.linearize_thermal(&x).unwrap();
        let f_dyn = m.eval_dynamics(&x, &fx.eq_u).unwrap();
        let nt = lay.n_thermal();
        assert_eq!(th.a.rows(), nt);
        for k in 0..nt {
            let gk = lay.thermal_to_full(k);
            assert_eq!(th.f0[k], f_dyn[gk], "f0 entry {k}");
            assert_eq!(th.x0[k], x.pack()[gk], "x0 entry {k}");
            for l in 0..nt {
                let gl = lay.thermal_to_full(l);
                assert_eq!(th.a.row(k)[l], full.a.row(gk)[gl], "A[{k}][{l}]");
            }
            for r in 0..4 {
                assert_eq!(th.c_y.row(r)[k], full.c_y.row(r)[gk], "C_y[{r}][{k}]");
            }
        }
        assert_eq!(th.y0, full.g0_y);
    }

    #[test]
    fn thermal_state_roundtrips_through_assembly() {
        let fx = fixture();
        let m = fx.model();
        let u = ThermalInputs {
            p_high: fx.eq.p_high,
            mdot_c: fx.eq.mdot_c,
            n_c: fx.eq.n_c,
            mdot_oil: fx.eq.mdot_oil,
        };
        let x_t = m.thermal_state(&fx.eq);
        assert_eq!(x_t.len(), m.layout.n_thermal());
        let rebuilt = m.assemble_thermal(&x_t, &u);
        assert_eq!(rebuilt, fx.eq);
    }

    #[test]
    fn min_speed_reproduces_a_surge_table_point() {
        let fx = fixture();
        let t_in_t = 560.0;
        // pick an interior table node and construct the exhaust pressure
        // that makes the matching condition hold exactly there
        let nodes = fx.comp.f_c1.xs().to_vec();
        let n_cor = nodes[nodes.len() / 2];
        let p_star = fx.comp.f_c1.eval_value(n_cor).unwrap();
        let m_cor = fx.comp.f_c2.eval_value(n_cor).unwrap();
        let state_in = fx
            .co2
            .state_from_pt(fx.comp.ref_p_in, fx.comp.ref_t_in)
            .unwrap();
        let cv0 = fx
            .comp
            .corrected_vars(&state_in, 1.0, fx.comp.design_speed, 0.0);
        let mdot_star = fx.comp.raw_flow(&cv0, fx.comp.ref_p_in, m_cor);
        let mfp = fx.turb.mfp_of(mdot_star, t_in_t, p_star);
        let n_cor_t = fx.turb.corrected_speed(fx.turb.sync_speed, t_in_t);
        let pr = fx.turb.pr_from_mfp(mfp, n_cor_t).unwrap();
        let p_out_t = p_star / pr;

        let n_min =
            compute_min_compressor_speed(&fx.comp, &fx.turb, &fx.co2, p_out_t, 0.0, t_in_t)
                .unwrap();
        assert_relative_eq!(n_min, fx.comp.raw_speed(&cv0, n_cor), max_relative = 1e-4);
    }

    #[test]
    fn min_speed_rises_with_exhaust_pressure() {
        let fx = fixture();
        let mut prev = 0.0;
        // below ~8.8 MPa exhaust the synthetic turbine swallows the
        // surge-line flow at near-unity pressure ratio and no minimum
        // exists inside the mapped speed span, so probe above that
        for &p_out_t in &[9.2e6, 9.8e6, 10.8e6, 12.0e6] {
            let n_min = compute_min_compressor_speed(
                &fx.comp, &fx.turb, &fx.co2, p_out_t, 0.0, 560.0,
            )
            .unwrap();
            assert!(
                n_min > prev,
                "N_c_min must rise with exhaust pressure: {n_min} after {prev}"
            );
            prev = n_min;
        }
    }

    #[test]
    fn min_speed_agrees_with_a_brute_force_scan() {
        let fx = fixture();
        let p_out_t = 10.5e6;
        let t_in_t = 560.0;
        let delta_mdot = 0.3;
        let n_min = compute_min_compressor_speed(
            &fx.comp, &fx.turb, &fx.co2, p_out_t, delta_mdot, t_in_t,
        )
        .unwrap();

        let state_in = fx
            .co2
            .state_from_pt(fx.comp.ref_p_in, fx.comp.ref_t_in)
            .unwrap();
        let cv0 = fx
            .comp
            .corrected_vars(&state_in, 1.0, fx.comp.design_speed, 0.0);
        let n_cor_t = fx.turb.corrected_speed(fx.turb.sync_speed, t_in_t);
        let g = |n_cor: f64| -> Option<f64> {
            let p_star = fx.comp.f_c1.eval_value(n_cor).ok()?;
            let m_cor = fx.comp.f_c2.eval_value(n_cor).ok()?;
            let mdot = fx.comp.raw_flow(&cv0, fx.comp.ref_p_in, m_cor) + delta_mdot;
            let mfp = fx.turb.mfp_of(mdot, t_in_t, p_star);
            let pr = fx.turb.pr_from_mfp(mfp, n_cor_t).ok()?;
            Some(p_star - p_out_t * pr)
        };
        let (lo, hi) = fx.comp.f_c1.x_range();
        let grid_cell = (hi - lo) / (fx.comp.f_c1.xs().len() - 1) as f64;
        let mut crossing = None;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=4000 {
            let n = lo + (hi - lo) * k as f64 / 4000.0;
            if let Some(v) = g(n) {
                if let Some((np, vp)) = prev {
                    if vp.signum() != v.signum() {
                        crossing = Some(0.5 * (np + n));
                        break;
                    }
                }
                prev = Some((n, v));
            } else {
                prev = None;
            }
        }
        let n_cross = crossing.expect("brute-force scan must find a crossing");
        let n_scan = fx.comp.raw_speed(&cv0, n_cross);
        let n_cell = fx.comp.raw_speed(&cv0, grid_cell) - fx.comp.raw_speed(&cv0, 0.0);
        assert!(
            (n_min - n_scan).abs() <= n_cell.abs(),
            "root {n_min} vs scan {n_scan}, cell {n_cell}"
        );
    }

    #[test]
    fn infeasible_exhaust_pressure_is_reported() {
        let fx = fixture();
        // an exhaust pressure far above anything the compressor can reach
        let err = compute_min_compressor_speed(
            &fx.comp, &fx.turb, &fx.co2, 40.0e6, 0.0, 560.0,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("surge") || msg.to_lowercase().contains("speed"),
            "unexpected error: {msg}"
        );
    }
}

