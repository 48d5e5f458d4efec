use fhn_ident::analysis::{coupling_form, coupling_r, coupling_r_bound, h_energy};
use fhn_ident::model::{
    coupling_terms, network_rhs, original_from_theta, theta_from_original, Adjacency, CouplingConfig, FhnParams,
    NetworkState,
};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = FhnParams> {
    (-2.0..2.0f64, 0.05..3.0f64, 0.005..0.5f64, 0.2..3.0f64, -2.0..2.0f64)
        .prop_map(|(a, b, eps, c, i)| FhnParams::new(a, b, eps, c, i).unwrap())
}

fn graph(max_n: usize) -> impl Strategy<Value = Adjacency> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut adj = Adjacency::empty(n);
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    adj.set(i, j, bits[k]);
                    k += 1;
                }
            }
            adj
        })
    })
}

fn coupling() -> impl Strategy<Value = CouplingConfig> {
    (graph(7), 0.0..2.0f64, proptest::array::uniform4(-1.0..1.0f64)).prop_map(|(adjacency, sigma, b)| {
        CouplingConfig {
            adjacency,
            sigma,
            b_uu: b[0],
            b_uv: b[1],
            b_vu: b[2],
            b_vv: b[3],
        }
    })
}

fn state(n: usize) -> impl Strategy<Value = NetworkState> {
    (
        proptest::collection::vec(-2.0..2.0f64, n),
        proptest::collection::vec(-2.0..2.0f64, n),
    )
        .prop_map(|(y, v)| NetworkState::new(y, v).unwrap())
}

/// Network equations in the original `(u, v)` coordinates, written out
/// directly.
fn original_rhs(p: &FhnParams, cfg: &CouplingConfig, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = u.len();
    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    for k in 0..n {
        let (mut cu, mut cv) = (0.0, 0.0);
        for j in 0..n {
            if cfg.adjacency.get(k, j) {
                cu += cfg.b_uu * (u[j] - u[k]) + cfg.b_uv * (v[j] - v[k]);
                cv += cfg.b_vu * (u[j] - u[k]) + cfg.b_vv * (v[j] - v[k]);
            }
        }
        du[k] = u[k] - u[k].powi(3) / 3.0 - v[k] + p.i_ext + cfg.sigma * cu;
        dv[k] = p.eps * (u[k] - p.a - p.b * v[k]) + cfg.sigma * cv;
    }
    (du, dv)
}

proptest! {
    #[test]
    fn parameter_map_round_trip(p in params(), n in 1usize..12) {
        let theta = theta_from_original(&p, n).unwrap();
        let back = original_from_theta(&theta, p.i_ext, n).unwrap();
        prop_assert!(back.physical);
        let (want, got) = (p.abce(), back.params.abce());
        let scale = want.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (g, w) in got.iter().zip(want) {
            prop_assert!((g - w).abs() <= 1e-12 * scale, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn scaled_network_matches_original_coordinates(
        p in params(),
        (cfg, st) in coupling().prop_flat_map(|c| { let n = c.n(); (Just(c), state(n)) }),
    ) {
        let theta = theta_from_original(&p, cfg.n()).unwrap();
        let d = network_rhs(&st, &theta, &cfg, p.i_ext).unwrap();
        let u: Vec<f64> = st.y.iter().map(|y| y / p.c).collect();
        let (du, dv) = original_rhs(&p, &cfg, &u, &st.v);
        for k in 0..cfg.n() {
            prop_assert!((d.y[k] - p.c * du[k]).abs() <= 1e-10 * (1.0 + d.y[k].abs()));
            prop_assert!((d.v[k] - dv[k]).abs() <= 1e-10 * (1.0 + d.v[k].abs()));
        }
    }

    #[test]
    fn coupling_sums_vanish(
        (cfg, st) in coupling().prop_flat_map(|c| { let n = c.n(); (Just(c), state(n)) }),
        c in 0.2..3.0f64,
    ) {
        let theta2 = -1.0 / (3.0 * c * c);
        let (mut sy, mut sv, mut scale) = (0.0, 0.0, 0.0f64);
        for k in 0..cfg.n() {
            let (y, v) = coupling_terms(k, &st, &cfg, theta2).unwrap();
            sy += y;
            sv += v;
            scale = scale.max(y.abs()).max(v.abs());
        }
        prop_assert!(sy.abs() <= 1e-12 * (1.0 + scale));
        prop_assert!(sv.abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn synchronous_state_feels_no_coupling(cfg in coupling(), y in -2.0..2.0f64, v in -2.0..2.0f64) {
        let n = cfg.n();
        let st = NetworkState::new(vec![y; n], vec![v; n]).unwrap();
        for k in 0..n {
            prop_assert_eq!(coupling_terms(k, &st, &cfg, -1.0 / 3.0).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn coupling_form_respects_bound(
        (cfg, st) in coupling().prop_flat_map(|c| { let n = c.n(); (Just(c), state(n)) }),
        c in 0.2..3.0f64,
    ) {
        let theta2 = -1.0 / (3.0 * c * c);
        let r = coupling_r(&cfg, theta2).unwrap();
        let form = coupling_form(&st, &cfg, theta2).unwrap();
        prop_assert!(form <= r * 2.0 * h_energy(&st) + 1e-9);
    }

    #[test]
    fn spectral_bound_is_nonnegative_and_scales(adj in graph(7), b_uu in -1.0..1.0f64, b_vv in -1.0..1.0f64, k in 0.1..5.0f64) {
        let r = coupling_r_bound(&adj, b_uu, b_vv);
        prop_assert!(r >= 0.0);
        let rk = coupling_r_bound(&adj, k * b_uu, k * b_vv);
        prop_assert!((rk - k * r).abs() <= 1e-9 * (1.0 + rk));
    }
}
