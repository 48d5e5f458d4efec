// Rotational coupling on the reconstructed five-node graph: simulate the
// network with the filters and the adaptive law, then report the
// parameter error over time.
//
// `cargo run --release --example experiment1 -- [t_end]`

use std::path::Path;

use fhn_ident::analysis::error_norms;
use fhn_ident::io::load_config;
use fhn_ident::model::original_from_theta;
use fhn_ident::simulate::{simulate, SimulateOptions};
use fhn_ident::Result;

pub fn run_example(t_end: f64) -> Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/experiment1.toml");
    let cfg = load_config(path)?.with_integration(None, Some(t_end))?;
    let (record, _) = simulate(&cfg.simulation_setup()?, SimulateOptions::default())?;
    let truth = cfg.theta_true().expect("simulation config");
    let norms = error_norms(&record.theta, &truth, record.i_ext, record.n)?;

    println!("{:>10} {:>14} {:>14}", "t", "|theta-theta*|", "|(a,b,c,eps)|");
    let every = (record.len() / 10).max(1);
    for (i, e) in norms.iter().enumerate().filter(|(i, _)| i % every == 0 || *i + 1 == norms.len()) {
        let orig = e.original.map_or("-".to_string(), |x| format!("{x:.4e}"));
        println!("{:>10.1} {:>14.4e} {:>14}", record.times[i], e.theta, orig);
    }
    if let Some(last) = record.final_theta() {
        let p = original_from_theta(&last, record.i_ext, record.n)?.params;
        println!("recovered a = {:.5}, b = {:.5}, c = {:.5}, eps = {:.5}", p.a, p.b, p.c, p.eps);
    }
    Ok(())
}

fn main() -> Result<()> {
    let t_end = std::env::args().nth(1).map_or(Ok(600.0), |s| s.parse()).expect("t_end must be a number");
    run_example(t_end)
}
