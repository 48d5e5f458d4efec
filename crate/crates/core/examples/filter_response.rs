// How closely `p²W(p)` tracks a true second derivative: drive the filter
// with sin(ωt) and compare `y*` against −ω² sin(ωt).
//
// `cargo run --example filter_response`

use fhn_ident::filters::{filter_outputs, filter_rhs_into, FilterParams, FilterState, FILTER_DIM};
use fhn_ident::integrate::Rk4;
use fhn_ident::Result;

pub fn run_example() -> Result<()> {
    let fp = FilterParams::new(0.01, 0.01)?;
    let dt = 1e-4;
    println!("{:>8} {:>14}", "omega", "max |y* - y''|");
    for omega in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let mut x = vec![0.0; FILTER_DIM];
        let mut rk = Rk4::new(FILTER_DIM);
        let mut rhs = |t: f64, s: &[f64], ds: &mut [f64]| {
            let u = (omega * t).sin();
            filter_rhs_into(s, u, u * u * u, &fp, ds);
        };
        let mut worst: f64 = 0.0;
        let steps = (20.0 / dt) as usize;
        for i in 0..steps {
            let t = i as f64 * dt;
            rk.step(&mut rhs, &mut x, t, dt)?;
            let t1 = t + dt;
            if t1 > 10.0 {
                let (y_star, _) = filter_outputs(&FilterState::from_slice(&x), (omega * t1).sin(), &fp);
                worst = worst.max((y_star + omega * omega * (omega * t1).sin()).abs());
            }
        }
        println!("{omega:>8} {worst:>14.4e}");
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
