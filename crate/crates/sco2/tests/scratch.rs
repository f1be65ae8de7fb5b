use sco2::harness::{init_steady_state, Scenario, TruthPlant};
use sco2::maps::compressor_eval_forward;
use sco2::props::ThermalOil;

#[test]
#[ignore]
fn scratch_map_probe() {
    let sc = Scenario::default();
    let (comp, turb) = sc.load_maps().unwrap();
    let co2 = sc.load_fluid().unwrap();
    for frac in [0.85, 0.916, 1.0] {
        let n = frac * comp.design_speed;
        for mdot in [8.0, 9.0, 10.0, 11.0, 12.0, 13.0] {
            match compressor_eval_forward(&comp, co2.as_ref(), 8.629e6, 320.0, mdot, n) {
                Ok(ev) => println!(
                    "frac {frac} mdot {mdot}: p_out {:.4e} t_out {:.1} wdot {:.1} kW",
                    ev.p_out,
                    ev.state_out.t,
                    ev.wdot / 1e3
                ),
                Err(e) => println!("frac {frac} mdot {mdot}: {e}"),
            }
        }
        // turbine: flow it passes at that p_out, T ~ 560 K
        for pr in [1.3, 1.5, 1.7] {
            let p_in = pr * sc.boundary.p_out_stag;
            match sco2::maps::turbine_eval(
                &turb,
                co2.as_ref(),
                p_in,
                sc.boundary.p_out_stag,
                560.0,
                turb.sync_speed,
            ) {
                Ok(ev) => println!(
                    "  turb pr {pr}: p_in {:.3e} mdot {:.2} wdot {:.1} kW",
                    p_in,
                    ev.mdot,
                    ev.wdot / 1e3
                ),
                Err(e) => println!("  turb pr {pr}: {e}"),
            }
        }
    }
}

#[test]
#[ignore]
fn scratch_init() {
    let env = |k: &str, d: f64| -> f64 {
        std::env::var(k).ok().and_then(|s| s.parse().ok()).unwrap_or(d)
    };
    let mut sc = Scenario::default();
    sc.boundary.p_out_stag = env("POUT", sc.boundary.p_out_stag);
    sc.initial.speed_fraction = env("FRAC", sc.initial.speed_fraction);
    let (comp, turb) = sc.load_maps().unwrap();
    let co2 = sc.load_fluid().unwrap();
    let oil = ThermalOil::default();
    let pcfg = sc.plant_config();
    let n_c0 = sc.initial.speed_fraction * comp.design_speed;
    let mdot0: f64 = env("MDOT0", 12.0);
    let mut plant = TruthPlant::new(
        pcfg,
        &comp,
        &turb,
        co2.as_ref(),
        &oil,
        n_c0,
        mdot0,
        sc.initial.mdot_oil,
        sc.initial.torque,
    )
    .unwrap();
    let t0 = std::time::Instant::now();
    match init_steady_state(&mut plant, 1e-6, 120.0) {
        Ok(rep) => {
            println!(
                "converged in {:.0} s sim, residual {:.2e}, {} inner steps, wall {:.1} s",
                rep.seconds,
                rep.residual,
                rep.inner_steps,
                t0.elapsed().as_secs_f64()
            );
            println!("{:#?}", rep.outputs);
            println!("n_c = {:.1}, torque = {:.2}", plant.n_c, plant.torque);
        }
        Err(e) => {
            println!("failed after wall {:.1} s: {e}", t0.elapsed().as_secs_f64());
            if let Ok(o) = plant.outputs() {
                println!("{o:#?}");
                println!("n_c = {:.1}, torque = {:.2}", plant.n_c, plant.torque);
            }
        }
    }
}
