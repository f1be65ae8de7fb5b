//! Quasi-1D gas-dynamics truth model: compressible streams with AUSMDV
//! fluxes and Cash-Karp time stepping, an incompressible oil stream, the
//! conductive PCHE wall, reservoir boundaries, and turbomachinery interface
//! fluxes.

pub mod flux;
pub mod friction;
pub mod oil;
pub mod pche;
pub mod riemann;
pub mod stream;
pub mod turbo;
pub mod wall;

pub use flux::{ausmdv_flux, FaceState};
pub use friction::friction_factor;
pub use oil::{step_incompressible, IncompressibleStream, OilBoundary, OilStepReport};
pub use pche::{pche_heat_rates, pche_step, PcheGeometry, PcheReport};
pub use riemann::{solve_riemann, RiemannFan, RiemannSide};
pub use stream::{
    apply_inflow_bc, apply_outflow_bc, step_compressible, CompressibleStream, StepReport,
    StreamBc,
};
pub use turbo::{compressor_interface_flux, turbine_interface_flux, TurboFlux};
pub use wall::{
    heat_transfer_coefficient, nusselt_hot, step_wall, wall_heat_rate, WallGrid, NU_OIL,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::SimError;
    use crate::props::{Co2PengRobinson, FluidProps, IdealGas, ThermalOil};
    use approx::assert_relative_eq;

    fn gas() -> IdealGas {
        IdealGas::new("gas", 1.0, 1.4)
    }

    fn sod_stream(n: usize) -> CompressibleStream {
        let f = gas();
        let left = f.state_from_pt(1.0, 1.0).unwrap(); // rho = 1 with R = 1
        let mut s = CompressibleStream::uniform(n, 1.0, 1.0, f64::INFINITY, 1.0, 0.0, &left, 0.0);
        let right = f.state_from_pt(0.1, 0.8).unwrap(); // rho=0.125
        for i in n / 2..n {
            s.rho[i] = right.rho;
            s.mom[i] = 0.0;
            s.et[i] = right.rho * right.e;
            s.hint_p[i] = right.p;
            s.hint_t[i] = right.t;
        }
        s
    }

    fn sod_l1_error_at(n: usize, cfl_dx: f64, sub: usize) -> f64 {
        let f = gas();
        let mut s = sod_stream(n);
        let t_end = 0.2;
        let dt = cfl_dx * s.dx; // fastest wave speed stays near 2.2
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            step_compressible(
                &mut s,
                &f,
                &StreamBc::ZeroGradient,
                &StreamBc::ZeroGradient,
                None,
                dt,
            )
            .unwrap();
        }
        let fan = solve_riemann(
            1.4,
            RiemannSide {
                rho: 1.0,
                v: 0.0,
                p: 1.0,
            },
            RiemannSide {
                rho: 0.125,
                v: 0.0,
                p: 0.1,
            },
        );
        let (mut err, mut norm) = (0.0, 0.0);
        for i in 0..n {
            // cell-averaged exact density
            let mut rho_ex = 0.0;
            for j in 0..sub {
                let x = (i as f64 + (j as f64 + 0.5) / sub as f64) * s.dx;
                rho_ex += fan.sample((x - 0.5) / t_end).0;
            }
            rho_ex /= sub as f64;
            err += (s.rho[i] - rho_ex).abs() * s.dx;
            norm += rho_ex.abs() * s.dx;
        }
        err / norm
    }

    fn sod_l1_error(n: usize) -> f64 {
        sod_l1_error_at(n, 0.2, 16)
    }

    #[test]
    fn sod_shock_tube_l1_error_and_convergence() {
        let e400 = sod_l1_error(400);
        assert!(e400 <= 0.02, "L1 density error {e400:.4} at 400 cells");
        let e800 = sod_l1_error(800);
        let ratio = e400 / e800;
        assert!(
            (1.6..=2.4).contains(&ratio),
            "refinement ratio {ratio:.3} (errors {e400:.5}, {e800:.5})"
        );
    }

    #[test]
    fn uniform_stream_is_an_exact_equilibrium() {
        let f = gas();
        let st = f.state_from_pt(2.0, 1.5).unwrap();
        let mut s =
            CompressibleStream::uniform(12, 1.0, 0.5, f64::INFINITY, 1.0, 0.0, &st, 0.3);
        let before = (s.rho.clone(), s.mom.clone(), s.et.clone());
        for _ in 0..10 {
            step_compressible(
                &mut s,
                &f,
                &StreamBc::ZeroGradient,
                &StreamBc::ZeroGradient,
                None,
                1e-3,
            )
            .unwrap();
        }
        for i in 0..12 {
            assert_relative_eq!(s.rho[i], before.0[i], max_relative = 1e-12);
            assert_relative_eq!(s.mom[i], before.1[i], max_relative = 1e-12);
            assert_relative_eq!(s.et[i], before.2[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn closed_adiabatic_box_conserves_mass_and_energy() {
        let f = IdealGas::air();
        let st = f.state_from_pt(1.0e5, 350.0).unwrap();
        let n = 30;
        let mut s = CompressibleStream::uniform(n, 1.0, 0.2, f64::INFINITY, 1.0, 0.0, &st, 0.0);
        // smooth temperature bump at uniform pressure
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64;
            let t = 350.0 * (1.0 + 0.1 * (std::f64::consts::PI * x).sin());
            let sti = f.state_from_pt(1.0e5, t).unwrap();
            s.rho[i] = sti.rho;
            s.et[i] = sti.rho * sti.e;
            s.hint_t[i] = t;
        }
        let mass0 = s.total_mass();
        let energy0 = s.total_energy();
        let dt = 0.4 * s.dx / 420.0;
        let mut max_cfl = 0.0f64;
        for _ in 0..1000 {
            let rep = step_compressible(
                &mut s,
                &f,
                &StreamBc::Reflective,
                &StreamBc::Reflective,
                None,
                dt,
            )
            .unwrap();
            max_cfl = max_cfl.max(rep.max_cfl);
            // reflective walls pass no mass or energy
            assert!(rep.flux_in[0].abs() < 1e-10 && rep.flux_out[0].abs() < 1e-10);
            assert!(rep.flux_in[2].abs() < 1e-6 && rep.flux_out[2].abs() < 1e-6);
        }
        assert!(max_cfl <= 0.9, "max CFL {max_cfl}");
        assert_relative_eq!(s.total_mass(), mass0, max_relative = 1e-10);
        assert_relative_eq!(s.total_energy(), energy0, max_relative = 1e-10);
    }

    #[test]
    fn friction_budget_closes_and_dissipates() {
        let f = IdealGas::air();
        let st = f.state_from_pt(1.0e5, 400.0).unwrap();
        let mut s = CompressibleStream::uniform(10, 0.5, 1e-3, 5e-3, 1.0, 1e-5, &st, 40.0);
        let dt = 0.3 * s.dx / 450.0;
        let e0 = s.total_energy();
        let mut boundary = 0.0;
        let mut dissipated = 0.0;
        for _ in 0..200 {
            let rep = step_compressible(
                &mut s,
                &f,
                &StreamBc::ZeroGradient,
                &StreamBc::ZeroGradient,
                None,
                dt,
            )
            .unwrap();
            boundary += (rep.flux_in[2] - rep.flux_out[2]) * s.area * dt;
            dissipated += rep.friction_heat * dt;
        }
        let e1 = s.total_energy();
        assert!(dissipated > 0.0);
        // energy change = boundary work/advection − friction sink, exactly
        assert_relative_eq!(e1 - e0, boundary - dissipated, max_relative = 1e-9);
    }

    #[test]
    fn cfl_violation_is_rejected_with_admissible_dt() {
        let f = IdealGas::air();
        let st = f.state_from_pt(1.0e5, 300.0).unwrap();
        let mut s = CompressibleStream::uniform(8, 1.0, 0.1, f64::INFINITY, 1.0, 0.0, &st, 0.0);
        let err = step_compressible(
            &mut s,
            &f,
            &StreamBc::Reflective,
            &StreamBc::Reflective,
            None,
            1.0,
        )
        .unwrap_err();
        match err {
            SimError::CflViolation { dt, admissible } => {
                assert_eq!(dt, 1.0);
                assert_relative_eq!(
                    admissible,
                    s.dx / st.a,
                    max_relative = 1e-12
                );
            }
            other => panic!("expected CFL violation, got {other}"),
        }
    }

    #[test]
    fn inflow_ghost_sits_on_the_reservoir_isentrope() {
        let f = Co2PengRobinson::default();
        let stag = f.state_from_pt(12.0e6, 600.0).unwrap();
        let interior = f.state_from_pt(11.8e6, 595.0).unwrap();
        for &v0 in &[0.0, 5.0, 30.0, 80.0, -20.0] {
            let (ghost, vg) = apply_inflow_bc(&f, 12.0e6, 600.0, &interior, v0).unwrap();
            assert_eq!(vg, v0);
            assert_relative_eq!(ghost.s, stag.s, max_relative = 1e-8);
            assert_relative_eq!(ghost.h + 0.5 * v0 * v0, stag.h, max_relative = 1e-8);
        }
        // stagnant limit reproduces the reservoir state
        let (ghost, _) = apply_inflow_bc(&f, 12.0e6, 600.0, &interior, 0.0).unwrap();
        assert_eq!(ghost.p, stag.p);
        assert_eq!(ghost.t, stag.t);
    }

    #[test]
    fn outflow_ghost_pins_reservoir_pressure() {
        let f = Co2PengRobinson::default();
        let interior = f.state_from_pt(8.0e6, 550.0).unwrap();
        let (ghost, vg) = apply_outflow_bc(&f, 8.0e6, &interior, 0.0).unwrap();
        assert_eq!(ghost.p, interior.p);
        assert_eq!(ghost.t, interior.t);
        assert_eq!(vg, 0.0);
        let (ghost, vg) = apply_outflow_bc(&f, 7.5e6, &interior, 12.0).unwrap();
        assert_eq!(ghost.p, 7.5e6);
        assert_eq!(ghost.t, interior.t);
        assert_eq!(vg, 12.0);
        let err = apply_outflow_bc(&f, 8.0e6, &interior, 2.0 * interior.a).unwrap_err();
        assert!(matches!(err, SimError::SupersonicBoundary { .. }));
    }

    #[test]
    fn stream_relaxes_to_uniform_reservoir_pressure() {
        let f = IdealGas::air();
        let p_out = 1.0e5;
        let p_in = p_out * (1.0 + 2e-7);
        let st = f.state_from_pt(p_out, 600.0).unwrap();
        let mut s = CompressibleStream::uniform(20, 1.0, 0.01, f64::INFINITY, 1.0, 0.0, &st, 0.0);
        let dt = 0.4 * s.dx / 520.0;
        let bc_in = StreamBc::InflowReservoir {
            p_stag: p_in,
            t_stag: 600.0,
        };
        let bc_out = StreamBc::OutflowReservoir { p_stag: p_out };
        for _ in 0..4000 {
            step_compressible(&mut s, &f, &bc_in, &bc_out, None, dt).unwrap();
        }
        let cells = s.decode(&f).unwrap();
        for (st, _) in &cells {
            assert_relative_eq!(st.p, p_out, max_relative = 1e-6);
        }
    }

    #[test]
    fn adiabatic_oil_stream_passes_temperature_through() {
        let oil = ThermalOil::default();
        let mut s = IncompressibleStream::uniform(
            12, 1.0, 1.5e-3, 6.0e-4, 4000.0, 0.0, 540.0, 0.1, 4.0e6,
        );
        let bc = OilBoundary {
            mdot_in: 0.2,
            t_in: 540.0,
            p_out: 4.0e6,
        };
        let rep = step_incompressible(&mut s, &oil, &bc, None, 0.01).unwrap();
        for &t in &s.t {
            assert_relative_eq!(t, 540.0, max_relative = 1e-10);
        }
        assert_relative_eq!(rep.enthalpy_out, rep.enthalpy_in, max_relative = 1e-10);
        // uniform density: identical mass flux everywhere
        let st = oil.state_from_pt(4.0e6, 540.0).unwrap();
        for &v in &s.v {
            assert_relative_eq!(v * st.rho * s.area, 0.2, max_relative = 1e-10);
        }
        assert!(rep.continuity_residual < 1e-8);
    }

    #[test]
    fn heated_oil_stream_energy_budget_closes_at_steady_state() {
        let oil = ThermalOil::default();
        let mut s = IncompressibleStream::uniform(
            10, 1.0, 1.5e-3, 6.0e-4, 4000.0, 0.0, 540.0, 0.1, 4.0e6,
        );
        let bc = OilBoundary {
            mdot_in: 0.3,
            t_in: 540.0,
            p_out: 4.0e6,
        };
        let q = vec![3.0e3; 10]; // 3 kW total
        let dt = 0.05;
        let mut rep = OilStepReport::default();
        // march far past the flow-through time (~4 s) so the storage term
        // decays below the budget tolerance
        for _ in 0..2000 {
            rep = step_incompressible(&mut s, &oil, &bc, Some(&q), dt).unwrap();
        }
        assert_relative_eq!(
            rep.enthalpy_out - rep.enthalpy_in,
            rep.wall_heat,
            max_relative = 1e-6
        );
        assert!(rep.continuity_residual < 1e-8);
        assert!(s.t[9] > s.t[0] && s.t[0] > 540.0);
    }

    #[test]
    fn pche_equilibrium_exchanges_nothing() {
        let geom = PcheGeometry {
            n_cells: 6,
            ..PcheGeometry::default()
        };
        let f = IdealGas::air();
        let oil = ThermalOil::default();
        let t0 = 500.0;
        let st = f.state_from_pt(1.0e5, t0).unwrap();
        let mut hot = CompressibleStream::uniform(
            6,
            geom.length,
            geom.flow_area(),
            geom.hydraulic_diameter(),
            geom.n_chans,
            0.0,
            &st,
            0.0,
        );
        let cold = IncompressibleStream::uniform(
            6,
            geom.length,
            geom.flow_area(),
            geom.hydraulic_diameter(),
            geom.n_chans,
            0.0,
            t0,
            0.0,
            4.0e6,
        );
        let wall = geom.wall_grid(t0);
        let (q_h, q_c) =
            pche_heat_rates(&geom, &mut hot, &f, &cold, &oil, &wall).unwrap();
        assert!(q_h.iter().all(|&q| q.abs() < 1e-9));
        assert!(q_c.iter().all(|&q| q.abs() < 1e-9));
    }

    /// Small fast PCHE used for the steady counter-flow verification: few
    /// channels, short core, light wall so the march to steady state is
    /// cheap. The hot side is a perfect gas so properties are constant.
    fn effectiveness_case() -> (f64, f64, f64) {
        let geom = PcheGeometry {
            n_chans: 40.0,
            length: 0.02,
            n_cells: 10,
            rho_w: 100.0,
            ..PcheGeometry::default()
        };
        let f = IdealGas::air();
        let oil = ThermalOil::default();
        let (t_hot_in, t_cold_in) = (600.0, 500.0);
        let p_out = 1.0e5;
        let p_in = p_out + 1.0e3;
        let st = f.state_from_pt(p_out, t_hot_in).unwrap();
        let mut hot = CompressibleStream::uniform(
            geom.n_cells,
            geom.length,
            geom.flow_area(),
            geom.hydraulic_diameter(),
            geom.n_chans,
            0.0,
            &st,
            0.0,
        );
        let mut cold = IncompressibleStream::uniform(
            geom.n_cells,
            geom.length,
            geom.flow_area(),
            geom.hydraulic_diameter(),
            geom.n_chans,
            0.0,
            t_cold_in,
            0.0,
            4.0e6,
        );
        let mut wall = geom.wall_grid(0.5 * (t_hot_in + t_cold_in));
        let rho_oil = oil.state_from_pt(4.0e6, t_cold_in).unwrap().rho;
        let cold_bc = OilBoundary {
            mdot_in: 0.5 * rho_oil * geom.flow_area(), // ~0.5 m/s
            t_in: t_cold_in,
            p_out: 4.0e6,
        };
        let bc_in = StreamBc::InflowReservoir {
            p_stag: p_in,
            t_stag: t_hot_in,
        };
        let bc_out = StreamBc::OutflowReservoir { p_stag: p_out };
        let dt = 0.4 * (geom.length / geom.n_cells as f64) / 540.0;
        let mut rep = PcheReport::default();
        let steps = (0.4 / dt) as usize;
        for _ in 0..steps {
            rep = pche_step(
                &geom, &mut hot, &f, &bc_in, &bc_out, &mut cold, &oil, &cold_bc, &mut wall, dt,
            )
            .unwrap();
        }

        // measured effectiveness
        let cells = hot.decode(&f).unwrap();
        let (st_out, _) = &cells[geom.n_cells - 1];
        let mdot_h = rep.hot.flux_out[0] * geom.flow_area();
        let c_h = mdot_h * st_out.cp;
        let c_c = cold_bc.mdot_in * oil.state_from_pt(4.0e6, t_cold_in).unwrap().cp;
        let c_min = c_h.min(c_c);
        let eps = rep.q_hot / (c_min * (t_hot_in - t_cold_in));

        // independent epsilon-NTU prediction from the steady local U values
        let (q_h, q_c) =
            pche_heat_rates(&geom, &mut hot, &f, &cold, &oil, &wall).unwrap();
        let mut ua = 0.0;
        for i in 0..geom.n_cells {
            let dth = cells[i].0.t - wall.t_w[i];
            let dtc = cold.t[geom.n_cells - 1 - i] - wall.t_w[i];
            let gh = q_h[i] / dth; // W/(m·K) conductance per length, hot side
            let gc = -q_c[i] / dtc.abs().max(1e-12) * dtc.signum();
            let g_series = 1.0 / (1.0 / gh + 1.0 / gc.abs());
            ua += g_series * wall.dx;
        }
        let cr = c_min / c_h.max(c_c);
        let ntu = ua / c_min;
        let eps_ntu = (1.0 - (-ntu * (1.0 - cr)).exp()) / (1.0 - cr * (-ntu * (1.0 - cr)).exp());

        let t_hot_out = st_out.t;
        assert!(
            t_hot_out > t_cold_in && t_hot_out < t_hot_in,
            "hot outlet {t_hot_out} outside inlet bracket"
        );
        (eps, eps_ntu, t_hot_out)
    }

    #[test]
    fn counterflow_effectiveness_matches_ntu_prediction() {
        let (eps, eps_ntu, _) = effectiveness_case();
        assert!(eps > 0.05 && eps < 1.0, "effectiveness {eps}");
        assert_relative_eq!(eps, eps_ntu, max_relative = 0.05);
    }

    #[test]
    fn turbine_interface_fluxes_are_consistent() {
        let map = crate::maps::synthetic_turbine_map(&crate::maps::TurbineDesign::default()).unwrap();
        let f = Co2PengRobinson::default();
        let left = f.state_from_pt(12.0e6, 600.0).unwrap();
        let right = f.state_from_pt(8.0e6, 520.0).unwrap();
        let (a_l, a_r) = (0.02, 0.05);
        let tf = turbine_interface_flux(
            &map,
            &f,
            &left,
            &right,
            40.0 * std::f64::consts::PI,
            a_l,
            a_r,
        )
        .unwrap();
        assert!(tf.mdot > 0.0 && tf.wdot > 0.0);
        // both cells see the same mass flow
        assert_relative_eq!(tf.f_l[0] * a_l, tf.mdot, max_relative = 1e-12);
        assert_relative_eq!(tf.f_r[0] * a_r, tf.mdot, max_relative = 1e-12);
        // the energy discontinuity is exactly the shaft power
        assert_relative_eq!(
            tf.f_l[2] * a_l - tf.f_r[2] * a_r,
            tf.wdot,
            max_relative = 1e-12
        );
        assert!(tf.t_out < 600.0);
    }

    #[test]
    fn near_unity_pressure_ratio_turbine_degenerates() {
        let map = crate::maps::synthetic_turbine_map(&crate::maps::TurbineDesign::default()).unwrap();
        let f = Co2PengRobinson::default();
        let left = f.state_from_pt(12.0e6, 600.0).unwrap();
        let right = f.state_from_pt(12.0e6 * (1.0 - 1e-10), 600.0).unwrap();
        let tf = turbine_interface_flux(
            &map,
            &f,
            &left,
            &right,
            40.0 * std::f64::consts::PI,
            0.02,
            0.05,
        )
        .unwrap();
        assert!(tf.mdot.abs() < 1e-3, "mdot {}", tf.mdot);
        assert!(tf.wdot.abs() < 1.0, "wdot {}", tf.wdot);
        assert_relative_eq!(tf.t_out, 600.0, max_relative = 1e-5);
    }

    #[test]
    fn compressor_interface_adds_shaft_power() {
        let f = Co2PengRobinson::default();
        let map =
            crate::maps::synthetic_compressor_map(&crate::maps::CompressorDesign::default(), &f)
                .unwrap();
        let left = f.state_from_pt(8.629e6, 320.0).unwrap();
        let right = f.state_from_pt(12.5e6, 480.0).unwrap();
        let (a_l, a_r) = (0.03, 0.02);
        let tf =
            compressor_interface_flux(&map, &f, &left, &right, 0.916 * 2000.0, a_l, a_r)
                .unwrap();
        assert!(tf.mdot > 0.0);
        assert!(tf.wdot < 0.0, "compressor must absorb power");
        assert_relative_eq!(tf.f_l[0] * a_l, tf.f_r[0] * a_r, max_relative = 1e-12);
        assert_relative_eq!(
            tf.f_r[2] * a_r - tf.f_l[2] * a_l,
            -tf.wdot,
            max_relative = 1e-12
        );
        assert!(tf.t_out > 320.0);
    }
}
