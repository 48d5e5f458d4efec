// Smallest eigenvalue of `∫ z zᵀ` over windows of growing length, from a
// fresh closed-loop run.
//
// `cargo run --release --example pe_check -- [l_max]`

use std::path::Path;

use fhn_ident::cli::pe_check;
use fhn_ident::io::load_config;
use fhn_ident::Result;

pub fn run_example(l_max: f64) -> Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/experiment1.toml");
    let cfg = load_config(path)?;
    let ls: Vec<f64> = (1..=8).map(|k| l_max * k as f64 / 8.0).collect();
    let sweep = pe_check(&cfg, &ls, 1.0, None)?;
    println!("{:>8} {:>14} {:>14}", "L", "min eig", "max eig");
    for i in 0..sweep.l_values.len() {
        println!("{:>8.3} {:>14.4e} {:>14.4e}", sweep.l_values[i], sweep.min_eigs[i], sweep.max_eigs[i]);
    }
    match sweep.smallest_passing_l() {
        Some(l) => println!("excited from L = {l}"),
        None => println!("not positive definite for any L"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let l_max = std::env::args().nth(1).map_or(Ok(10.0), |s| s.parse()).expect("l_max must be a number");
    run_example(l_max)
}
