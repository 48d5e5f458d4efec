// Coupling bound `r` and the admissible σ for a few graphs and schemes.
//
// `cargo run --example bounds`

use std::f64::consts::FRAC_PI_2;

use fhn_ident::analysis::{coupling_r, coupling_r_bound, sigma_bound};
use fhn_ident::model::{Adjacency, CouplingConfig};
use fhn_ident::Result;

pub fn run_example() -> Result<()> {
    let (eps, b, c) = (0.08, 0.8, 1.0);
    let theta2 = -1.0 / (3.0 * c * c);
    let graphs = [
        ("reconstructed", Adjacency::reconstructed_five()),
        ("ring", Adjacency::ring(5)),
        ("path", Adjacency::path(5)),
        ("star", Adjacency::star(5)),
        ("complete", Adjacency::complete(5)),
    ];
    println!("eps = {eps}, b = {b}, c = {c}");
    println!("{:<14} {:>10} {:>10} {:>10} {:>10}", "graph", "scheme", "r bound", "r exact", "sigma max");
    for (name, adj) in graphs {
        for (scheme, cfg) in [
            ("rotational", CouplingConfig::rotational(adj.clone(), 0.05, FRAC_PI_2 - 0.1)),
            ("direct", CouplingConfig::direct_uu(adj.clone(), 0.05)),
        ] {
            let bound = coupling_r_bound(&adj, cfg.b_uu, cfg.b_vv);
            let r = coupling_r(&cfg, theta2)?;
            let s = sigma_bound(eps, b, r, cfg.sigma);
            println!("{name:<14} {scheme:>10} {bound:>10.5} {r:>10.5} {:>10.5}", s.sigma_max);
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
