// Direct u–u coupling with σ below the coupling bound. Prints the bound
// check, then the estimates at a few instants.
//
// `cargo run --release --example experiment2 -- [t_end]`

use std::path::Path;

use fhn_ident::cli::bounds_of;
use fhn_ident::io::load_config;
use fhn_ident::model::original_from_theta;
use fhn_ident::simulate::{simulate, SimulateOptions};
use fhn_ident::Result;

pub fn run_example(t_end: f64) -> Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/experiment2.toml");
    let cfg = load_config(path)?.with_integration(None, Some(t_end))?;
    let b = bounds_of(&cfg)?;
    println!("r = {:.5}, sigma = {} < {:.5}: {}", b.r, b.sigma, b.sigma_max, b.ok);

    let (record, _) = simulate(&cfg.simulation_setup()?, SimulateOptions::default())?;
    let p = cfg.fhn.expect("simulation config");
    println!("truth      a = {:.5}, b = {:.5}, c = {:.5}, eps = {:.5}", p.a, p.b, p.c, p.eps);
    let every = (record.len() / 5).max(1);
    let mut rows: Vec<usize> = (0..record.len()).step_by(every).collect();
    if rows.last() != Some(&(record.len() - 1)) {
        rows.push(record.len() - 1);
    }
    for i in rows {
        match original_from_theta(&record.theta[i], record.i_ext, record.n) {
            Ok(r) => println!(
                "t = {:>7.1}  a = {:.5}, b = {:.5}, c = {:.5}, eps = {:.5}",
                record.times[i], r.params.a, r.params.b, r.params.c, r.params.eps
            ),
            Err(e) => println!("t = {:>7.1}  {e}", record.times[i]),
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let t_end = std::env::args().nth(1).map_or(Ok(600.0), |s| s.parse()).expect("t_end must be a number");
    run_example(t_end)
}
