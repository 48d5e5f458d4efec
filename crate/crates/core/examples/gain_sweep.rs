// Identification error for several scalar gains Γ = g·I, run in parallel.
//
// `cargo run --release --example gain_sweep -- [t_end]`

use std::path::Path;

use fhn_ident::cli::sweep_gain;
use fhn_ident::io::load_config;
use fhn_ident::Result;

pub fn run_example(t_end: f64) -> Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/experiment2.toml");
    let cfg = load_config(path)?.with_integration(None, Some(t_end))?;
    let out = std::env::temp_dir().join("fhn_gain_sweep");
    println!("{:>8} {:>12} {:>12} {:>12}", "g", "peak", "t(<=0.05)", "final");
    for (g, res) in sweep_gain(&cfg, &[0.1, 1.0, 10.0], 0.05, &out) {
        let e = res?;
        let t = e.time_to_tol.map_or("-".to_string(), |t| format!("{t:.1}"));
        println!("{g:>8} {:>12.4} {t:>12} {:>12.4e}", e.peak_error, e.final_error);
    }
    println!("artifacts in {}", out.display());
    Ok(())
}

fn main() -> Result<()> {
    let t_end = std::env::args().nth(1).map_or(Ok(100.0), |s| s.parse()).expect("t_end must be a number");
    run_example(t_end)
}
