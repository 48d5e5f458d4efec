//! Network of diffusively coupled FitzHugh–Nagumo neurons.
//!
//! Each node obeys
//!
//! ```text
//! du/dt = u - u³/3 - v + I_ext + U_k
//! dv/dt = ε (u - a - b v)     + V_k
//! ```
//!
//! only the scaled potential `y = c·u` is observed. The plant is simulated in
//! `(y, v)` coordinates with every coefficient expressed through the
//! regression vector θ, so that the same θ drives both the plant and the
//! linear regression `y* = θᵀ z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physiological parameters shared by all nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FhnParams {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub c: f64,
    pub i_ext: f64,
}

impl FhnParams {
    pub fn new(a: f64, b: f64, eps: f64, c: f64, i_ext: f64) -> Result<Self> {
        let p = FhnParams { a, b, eps, c, i_ext };
        p.validate()?;
        Ok(p)
    }

    /// Checks `b > 0`, `ε > 0`, `c > 0` and finiteness.
    pub fn validate(&self) -> Result<()> {
        let fields = [self.a, self.b, self.eps, self.c, self.i_ext];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.b <= 0.0 {
            return Err(Error::InvalidParams("b > 0".into()));
        }
        if self.eps <= 0.0 {
            return Err(Error::InvalidParams("eps > 0".into()));
        }
        if self.c <= 0.0 {
            return Err(Error::InvalidParams("c > 0".into()));
        }
        Ok(())
    }

    /// `(a, b, c, ε)` in the order used for error norms and reports.
    pub fn abce(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.eps]
    }
}

/// The five regression parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta(pub [f64; 5]);

impl Theta {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn from_slice(s: &[f64]) -> Result<Self> {
        let arr: [f64; 5] = s.try_into().map_err(|_| Error::DimensionMismatch {
            expected: 5,
            got: s.len(),
        })?;
        Ok(Theta(arr))
    }

    /// `1 - θ₁ - θ₃`, which equals ε for a consistent θ.
    pub fn eps(&self) -> f64 {
        1.0 - self.0[0] - self.0[2]
    }

    /// Recoverable iff `θ₂ < 0` and `1 - θ₁ - θ₃ > 0`.
    pub fn is_recoverable(&self) -> bool {
        self.0[1] < 0.0 && self.eps() > 0.0
    }

    /// `√(−3θ₂) = 1/c`.
    fn inv_scale(&self) -> Result<f64> {
        if self.0[1] < 0.0 && self.0[1].is_finite() {
            Ok((-3.0 * self.0[1]).sqrt())
        } else {
            Err(Error::NonRecoverable(format!(
                "theta2 = {} must be negative",
                self.0[1]
            )))
        }
    }

    pub fn distance(&self, other: &Theta) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Maps physiological parameters onto the regression vector for a network
/// of `n` nodes.
///
/// Only `c > 0` and `n ≥ 1` are required here; the physical invariants are
/// enforced by [`FhnParams::validate`]. This keeps degenerate points such as
/// `ε = 0` evaluable.
pub fn theta_from_original(p: &FhnParams, n: usize) -> Result<Theta> {
    if n == 0 {
        return Err(Error::InvalidParams("n >= 1".into()));
    }
    if !(p.c > 0.0) || !p.c.is_finite() {
        return Err(Error::InvalidParams("c > 0".into()));
    }
    let inv_c2 = 1.0 / (p.c * p.c);
    Ok(Theta([
        1.0 - p.eps * p.b,
        -inv_c2 / 3.0,
        p.eps * (p.b - 1.0),
        -p.eps * p.b * inv_c2 / 3.0,
        n as f64 * p.c * p.eps * (p.a + p.b * p.i_ext),
    ]))
}

/// Physiological parameters recovered from a regression vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recovered {
    pub params: FhnParams,
    /// False when the recovered `b` or `ε` is not positive.
    pub physical: bool,
}

/// Inverts [`theta_from_original`]. θ₄ is redundant and ignored.
pub fn original_from_theta(t: &Theta, i_ext: f64, n: usize) -> Result<Recovered> {
    if n == 0 {
        return Err(Error::InvalidParams("n >= 1".into()));
    }
    let [t1, _, t3, _, t5] = t.0;
    let inv_c = t.inv_scale()?;
    let eps = 1.0 - t1 - t3;
    if eps == 0.0 || !eps.is_finite() {
        return Err(Error::NonRecoverable("1 - theta1 - theta3 = 0".into()));
    }
    let nf = n as f64;
    let a = (t5 * inv_c - nf * i_ext * (1.0 - t1)) / (nf * eps);
    let b = (1.0 - t1) / eps;
    let params = FhnParams {
        a,
        b,
        eps,
        c: 1.0 / inv_c,
        i_ext,
    };
    Ok(Recovered {
        params,
        physical: eps > 0.0 && b > 0.0,
    })
}

/// Simple undirected graph stored as a dense 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Adjacency {
    n: usize,
    cells: Vec<bool>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Adjacency {
            n,
            cells: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = Adjacency::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Validation(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::Validation(format!("self-loop at node {i}")));
            }
            adj.set(i, j, true);
        }
        Ok(adj)
    }

    /// Builds from a dense matrix, enforcing symmetry, zero diagonal and
    /// 0/1 entries.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut adj = Adjacency::empty(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                match x {
                    0 => {}
                    1 if i != j => adj.cells[i * n + j] = true,
                    1 => return Err(Error::Validation("adjacency diagonal must be zero".into())),
                    _ => return Err(Error::Validation("adjacency entries must be 0 or 1".into())),
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                if adj.get(i, j) != adj.get(j, i) {
                    return Err(Error::Validation("adjacency must be symmetric".into()));
                }
            }
        }
        Ok(adj)
    }

    pub fn ring(n: usize) -> Self {
        let mut adj = Adjacency::empty(n);
        if n == 2 {
            adj.set(0, 1, true);
        } else if n > 2 {
            for i in 0..n {
                adj.set(i, (i + 1) % n, true);
            }
        }
        adj
    }

    pub fn path(n: usize) -> Self {
        let mut adj = Adjacency::empty(n);
        for i in 1..n {
            adj.set(i - 1, i, true);
        }
        adj
    }

    pub fn star(n: usize) -> Self {
        let mut adj = Adjacency::empty(n);
        for i in 1..n {
            adj.set(0, i, true);
        }
        adj
    }

    pub fn complete(n: usize) -> Self {
        let mut adj = Adjacency::empty(n);
        for i in 0..n {
            for j in 0..i {
                adj.set(i, j, true);
            }
        }
        adj
    }

    /// Five-node graph used as the default network for the shipped
    /// experiments: a triangle (1, 2, 3) with the path 1–0–4 attached.
    /// Its Laplacian has λ_max ≈ 4.1701, which gives the coupling bound
    /// r ≈ 0.416 under the rotational scheme with φ = π/2 − 0.1.
    /// Chosen to match that bound; the graph itself is not otherwise known.
    pub fn reconstructed_five() -> Self {
        Adjacency::from_edges(5, &[(0, 1), (0, 4), (1, 2), (1, 3), (2, 3)])
            .expect("static edge list")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        self.cells[i * self.n + j] = on;
        self.cells[j * self.n + i] = on;
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.get(i, j)).count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.get(i, j))
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Topology plus the interaction scheme between `u` and `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub adjacency: Adjacency,
    pub sigma: f64,
    pub b_uu: f64,
    pub b_uv: f64,
    pub b_vu: f64,
    pub b_vv: f64,
}

impl CouplingConfig {
    /// Rotational scheme: `B_uu = B_vv = cos φ`, `B_uv = sin φ`, `B_vu = −sin φ`.
    pub fn rotational(adjacency: Adjacency, sigma: f64, phi: f64) -> Self {
        CouplingConfig {
            adjacency,
            sigma,
            b_uu: phi.cos(),
            b_uv: phi.sin(),
            b_vu: -phi.sin(),
            b_vv: phi.cos(),
        }
    }

    /// Only the direct `u–u` coupling is active.
    pub fn direct_uu(adjacency: Adjacency, sigma: f64) -> Self {
        CouplingConfig {
            adjacency,
            sigma,
            b_uu: 1.0,
            b_uv: 0.0,
            b_vu: 0.0,
            b_vv: 0.0,
        }
    }

    pub fn uncoupled(n: usize) -> Self {
        CouplingConfig {
            adjacency: Adjacency::empty(n),
            sigma: 0.0,
            b_uu: 0.0,
            b_uv: 0.0,
            b_vu: 0.0,
            b_vv: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Validation("sigma >= 0".into()));
        }
        let b = [self.b_uu, self.b_uv, self.b_vu, self.b_vv];
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("coupling coefficients must be finite".into()));
        }
        Ok(())
    }
}

/// Scaled membrane potentials and recovery variables of all nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub y: Vec<f64>,
    pub v: Vec<f64>,
}

impl NetworkState {
    pub fn new(y: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if y.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: y.len(),
                got: v.len(),
            });
        }
        Ok(NetworkState { y, v })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

/// Coupling inputs `(Y'_k, V'_k)` of node `k` in scaled coordinates.
pub fn coupling_terms(
    k: usize,
    st: &NetworkState,
    cfg: &CouplingConfig,
    theta2: f64,
) -> Result<(f64, f64)> {
    if !(theta2 < 0.0) {
        return Err(Error::NonRecoverable(format!(
            "theta2 = {theta2} must be negative"
        )));
    }
    let inv_c = (-3.0 * theta2).sqrt();
    Ok(coupling_at(k, &st.y, &st.v, cfg, inv_c))
}

#[inline]
fn coupling_at(k: usize, y: &[f64], v: &[f64], cfg: &CouplingConfig, inv_c: f64) -> (f64, f64) {
    if cfg.sigma == 0.0 {
        return (0.0, 0.0);
    }
    let (mut dy_sum, mut dv_sum) = (0.0, 0.0);
    for j in cfg.adjacency.neighbors(k) {
        dy_sum += y[j] - y[k];
        dv_sum += v[j] - v[k];
    }
    let yc = cfg.sigma * (cfg.b_uu * dy_sum + cfg.b_uv / inv_c * dv_sum);
    let vc = cfg.sigma * (inv_c * cfg.b_vu * dy_sum + cfg.b_vv * dv_sum);
    (yc, vc)
}

/// Plant right-hand side with θ-derived coefficients precomputed.
#[derive(Debug, Clone)]
pub struct Plant {
    theta: Theta,
    coupling: CouplingConfig,
    i_ext: f64,
    inv_c: f64,
}

impl Plant {
    pub fn new(theta: Theta, coupling: CouplingConfig, i_ext: f64) -> Result<Self> {
        if !theta.is_recoverable() {
            return Err(Error::NonRecoverable(format!("{:?}", theta.0)));
        }
        let inv_c = theta.inv_scale()?;
        Ok(Plant {
            theta,
            coupling,
            i_ext,
            inv_c,
        })
    }

    pub fn n(&self) -> usize {
        self.coupling.n()
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn coupling(&self) -> &CouplingConfig {
        &self.coupling
    }

    /// Writes `dy/dt` and `dv/dt` for every node.
    pub fn rhs_into(&self, y: &[f64], v: &[f64], dy: &mut [f64], dv: &mut [f64]) {
        let [t1, t2, _, _, t5] = self.theta.0;
        let n = y.len();
        let c = 1.0 / self.inv_c;
        let eps = self.theta.eps();
        // constant term of dv/dt: -εa = -θ₅√(−3θ₂)/N + (1 − θ₁) I_ext
        let v_const = -t5 * self.inv_c / n as f64 + (1.0 - t1) * self.i_ext;
        for k in 0..n {
            let (yc, vc) = coupling_at(k, y, v, &self.coupling, self.inv_c);
            let yk = y[k];
            dy[k] = yk + t2 * yk * yk * yk - c * v[k] + c * self.i_ext + yc;
            dv[k] = eps * self.inv_c * yk + v_const + (t1 - 1.0) * v[k] + vc;
        }
    }
}

/// Time derivative of the network state.
pub fn network_rhs(
    st: &NetworkState,
    theta: &Theta,
    cfg: &CouplingConfig,
    i_ext: f64,
) -> Result<NetworkState> {
    if st.n() != cfg.n() {
        return Err(Error::DimensionMismatch {
            expected: cfg.n(),
            got: st.n(),
        });
    }
    let plant = Plant::new(*theta, cfg.clone(), i_ext)?;
    let n = st.n();
    let mut out = NetworkState {
        y: vec![0.0; n],
        v: vec![0.0; n],
    };
    plant.rhs_into(&st.y, &st.v, &mut out.y, &mut out.v);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn theta_for_first_experiment() {
        let p = FhnParams::new(-0.7, 0.8, 0.08, 1.0, 1.0).unwrap();
        let t = theta_from_original(&p, 5).unwrap();
        let want = [0.936, -1.0 / 3.0, -0.016, -0.064 / 3.0, 0.04];
        for (x, w) in t.0.iter().zip(want) {
            assert_relative_eq!(*x, w, epsilon = 1e-14);
        }
    }

    #[test]
    fn theta_for_table_one_initial_guess() {
        let p = FhnParams::new(-0.3, 1.5, 0.01, 1.1, 1.0).unwrap();
        let t = theta_from_original(&p, 5).unwrap();
        let want = [0.985, -0.27548, 0.005, -0.0041322, 0.066];
        for (x, w) in t.0.iter().zip(want) {
            assert!((x - w).abs() < 1e-5, "{x} vs {w}");
        }
        // printed values are rounded
        let printed = [0.98, -0.275, 0.005, -0.004, 0.066];
        for (x, w) in t.0.iter().zip(printed) {
            assert!((x - w).abs() <= 5e-3 + 1e-12);
        }
    }

    #[test]
    fn theta_with_zero_eps() {
        let p = FhnParams {
            a: 3.7,
            b: 1.0,
            eps: 0.0,
            c: 1.0,
            i_ext: 0.0,
        };
        let t = theta_from_original(&p, 1).unwrap();
        assert_eq!(t.0, [1.0, -1.0 / 3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn recovery_of_first_experiment() {
        let t = Theta([0.936, -1.0 / 3.0, -0.016, -0.064 / 3.0, 0.04]);
        let r = original_from_theta(&t, 1.0, 5).unwrap();
        assert!(r.physical);
        assert_relative_eq!(r.params.a, -0.7, epsilon = 1e-12);
        assert_relative_eq!(r.params.b, 0.8, epsilon = 1e-12);
        assert_relative_eq!(r.params.c, 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.params.eps, 0.08, epsilon = 1e-12);
    }

    #[test]
    fn recovery_of_printed_table_two_guess() {
        let t = Theta([0.98, -0.353, -0.08, -0.007, -0.339]);
        let r = original_from_theta(&t, 1.0, 5).unwrap().params;
        assert!((r.a + 0.9).abs() < 1e-2);
        assert!((r.b - 0.2).abs() < 1e-2);
        assert!((r.c - 0.97).abs() < 1e-2);
        assert!((r.eps - 0.1).abs() < 1e-2);
    }

    #[test]
    fn positive_theta2_is_not_recoverable() {
        let t = Theta([0.9, 0.1, 0.0, 0.0, 0.0]);
        assert!(matches!(
            original_from_theta(&t, 1.0, 5),
            Err(Error::NonRecoverable(_))
        ));
        let t = Theta([0.5, -0.1, 0.5, 0.0, 0.0]);
        assert!(matches!(
            original_from_theta(&t, 1.0, 5),
            Err(Error::NonRecoverable(_))
        ));
    }

    #[test]
    fn negative_eps_is_flagged() {
        let t = Theta([1.1, -0.3, 0.0, 0.0, 0.0]);
        let r = original_from_theta(&t, 1.0, 5).unwrap();
        assert!(!r.physical);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(FhnParams::new(0.0, -1.0, 0.1, 1.0, 0.0).is_err());
        assert!(FhnParams::new(0.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(FhnParams::new(0.0, 1.0, 0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn coupling_vanishes_on_synchrony_and_zero_strength() {
        let cfg = CouplingConfig::rotational(Adjacency::complete(4), 0.3, 0.7);
        let st = NetworkState::new(vec![0.4; 4], vec![-1.2; 4]).unwrap();
        for k in 0..4 {
            assert_eq!(coupling_terms(k, &st, &cfg, -0.3).unwrap(), (0.0, 0.0));
        }
        let mut cfg0 = cfg.clone();
        cfg0.sigma = 0.0;
        let st = NetworkState::new(vec![0.1, 2.0, -1.0, 0.3], vec![1.0, 0.0, 3.0, 1.0]).unwrap();
        for k in 0..4 {
            assert_eq!(coupling_terms(k, &st, &cfg0, -0.3).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn coupling_on_two_node_line() {
        let cfg = CouplingConfig::direct_uu(Adjacency::path(2), 0.05);
        let st = NetworkState::new(vec![1.0, 3.0], vec![0.0, 0.0]).unwrap();
        let (yc, vc) = coupling_terms(0, &st, &cfg, -1.0 / 3.0).unwrap();
        assert_relative_eq!(yc, 0.1, epsilon = 1e-15);
        assert_eq!(vc, 0.0);
    }

    #[test]
    fn y_coupling_sums_to_zero_without_cross_terms() {
        let mut cfg = CouplingConfig::rotational(Adjacency::reconstructed_five(), 0.2, 0.4);
        cfg.b_uv = 0.0;
        let st = NetworkState::new(
            vec![0.7, 0.1, 0.9, -0.3, -0.6],
            vec![0.4, 0.75, -0.1, -0.5, 0.0],
        )
        .unwrap();
        let total: f64 = (0..5)
            .map(|k| coupling_terms(k, &st, &cfg, -0.2).unwrap().0)
            .sum();
        assert!(total.abs() < 1e-15);
    }

    #[test]
    fn single_node_rest_derivative() {
        let p = FhnParams::new(-0.7, 0.8, 0.08, 1.0, 1.0).unwrap();
        let theta = theta_from_original(&p, 1).unwrap();
        let cfg = CouplingConfig::uncoupled(1);
        let st = NetworkState::new(vec![0.0], vec![0.0]).unwrap();
        let d = network_rhs(&st, &theta, &cfg, 1.0).unwrap();
        assert_relative_eq!(d.y[0], 1.0, epsilon = 1e-14);
        // ε(u − a − b v) at u = v = 0
        assert_relative_eq!(d.v[0], 0.056, epsilon = 1e-14);
    }

    #[test]
    fn coupling_invisible_on_synchrony() {
        let p = FhnParams::new(-0.7, 0.8, 0.08, 1.3, 1.0).unwrap();
        let theta = theta_from_original(&p, 5).unwrap();
        let st = NetworkState::new(vec![0.3; 5], vec![-0.2; 5]).unwrap();
        let a = network_rhs(&st, &theta, &CouplingConfig::uncoupled(5), 1.0).unwrap();
        let b = network_rhs(
            &st,
            &theta,
            &CouplingConfig::rotational(Adjacency::complete(5), 0.5, 1.0),
            1.0,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generators() {
        assert_eq!(Adjacency::ring(5).edges().len(), 5);
        assert_eq!(Adjacency::path(5).edges().len(), 4);
        assert_eq!(Adjacency::star(5).degree(0), 4);
        assert_eq!(Adjacency::complete(5).edges().len(), 10);
        assert!(Adjacency::reconstructed_five().is_connected());
        assert!(!Adjacency::empty(3).is_connected());
        assert!(Adjacency::from_edges(3, &[(0, 0)]).is_err());
        assert!(Adjacency::from_matrix(&[vec![0, 1], vec![0, 0]]).is_err());
    }
}
