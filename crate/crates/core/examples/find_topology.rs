// Five-node connected graphs whose coupling bound is close to 0.42 under
// rotational coupling, one per Laplacian spectrum.
//
// `cargo run --example find_topology`

use std::f64::consts::FRAC_PI_2;

use fhn_ident::analysis::{coupling_r_bound, laplacian_spectrum, match_topologies};
use fhn_ident::Result;

pub fn run_example() -> Result<()> {
    let k = (FRAC_PI_2 - 0.1).cos();
    for adj in match_topologies(5, k, k, 0.42, 0.005)? {
        let spectrum: Vec<String> = laplacian_spectrum(&adj).iter().map(|l| format!("{:.4}", l.abs())).collect();
        println!(
            "r = {:.5}  edges {:?}  spectrum [{}]",
            coupling_r_bound(&adj, k, k),
            adj.edges(),
            spectrum.join(", ")
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
