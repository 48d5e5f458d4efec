// Identification from recorded potentials only: record a plant run, then
// replay it through the filters with both input reconstructions.
//
// `cargo run --release --example from_data -- [t_end]`

use std::path::Path;

use fhn_ident::integrate::IntegratorConfig;
use fhn_ident::io::load_config;
use fhn_ident::model::original_from_theta;
use fhn_ident::simulate::{identify_from_signals, simulate_plant, InputHold};
use fhn_ident::Result;

pub fn run_example(t_end: f64) -> Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/experiment2.toml");
    let cfg = load_config(path)?.with_integration(None, Some(t_end))?;
    let setup = cfg.simulation_setup()?;
    // the replay needs every integration step, not the coarser record grid
    let every_step = IntegratorConfig::new(setup.integrator.dt, t_end, 1)?;
    let signals = simulate_plant(
        setup.theta_true,
        setup.coupling.clone(),
        setup.i_ext,
        &setup.y0,
        &setup.v0,
        &every_step,
    )?;
    println!("{} channels, {} samples, dt = {}", signals.n_channels(), signals.len(), signals.dt);

    for hold in [InputHold::Linear, InputHold::Zero] {
        let mut replay = cfg.replay_setup();
        replay.i_ext = setup.i_ext;
        replay.hold = hold;
        let record = identify_from_signals(&signals, &replay, Some(setup.theta_true))?;
        let err = record.theta_errors().and_then(|e| e.last().copied()).unwrap_or(f64::NAN);
        let p = original_from_theta(&record.final_theta().expect("non-empty run"), record.i_ext, record.n)?.params;
        println!(
            "{hold:?}: |theta-theta*| = {err:.4e}; a = {:.5}, b = {:.5}, c = {:.5}, eps = {:.5}",
            p.a, p.b, p.c, p.eps
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    let t_end = std::env::args().nth(1).map_or(Ok(300.0), |s| s.parse()).expect("t_end must be a number");
    run_example(t_end)
}
