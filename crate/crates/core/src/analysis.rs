//! Numerical checks of the convergence hypotheses and run diagnostics.
//!
//! Covers persistent excitation of the regressor, the coupling bound `r`
//! with the strength condition `σ < εb/r`, the energy `H` used for
//! boundedness, and error norms along recorded runs.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{original_from_theta, Adjacency, CouplingConfig, NetworkState, Theta};

/// All eigenvalues of a symmetric matrix in ascending order, by cyclic
/// Jacobi rotations.
pub fn symmetric_eigenvalues(mat: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = mat.nrows();
    if mat.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mat.ncols(),
        });
    }
    let scale = mat.amax().max(f64::MIN_POSITIVE);
    let asym = (mat - mat.transpose()).amax();
    if asym > 1e-9 * scale.max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let mut a: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(0.5 * (mat[(i, j)] + mat[(j, i)]));
        }
    }
    jacobi_in_place(&mut a, n);
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(|x, y| x.total_cmp(y));
    Ok(eigs)
}

fn jacobi_in_place(a: &mut [f64], n: usize) {
    const MAX_SWEEPS: usize = 100;
    let idx = |i: usize, j: usize| i * n + j;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[idx(i, j)] * a[idx(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| a[idx(i, i)] * a[idx(i, i)]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
                a[idx(p, q)] = 0.0;
                a[idx(q, p)] = 0.0;
            }
        }
    }
}

/// Trapezoidal approximation of `∫_t^{t+l} z zᵀ ds` over samples spaced `dt`
/// apart starting at `t0`.
pub fn pe_matrix(z: &[Vec<f64>], t0: f64, dt: f64, t: f64, l: f64) -> Result<DMatrix<f64>> {
    let (i0, i1) = window(z.len(), t0, dt, t, l)?;
    let m = z[i0].len();
    let mut out = DMatrix::<f64>::zeros(m, m);
    for i in i0..=i1 {
        let w = if i == i0 || i == i1 { 0.5 * dt } else { dt };
        let zi = &z[i];
        for r in 0..m {
            for c in r..m {
                out[(r, c)] += w * zi[r] * zi[c];
            }
        }
    }
    for r in 0..m {
        for c in 0..r {
            out[(r, c)] = out[(c, r)];
        }
    }
    Ok(out)
}

fn window(len: usize, t0: f64, dt: f64, t: f64, l: f64) -> Result<(usize, usize)> {
    let last = t0 + dt * (len.saturating_sub(1)) as f64;
    let out_of_range = || Error::WindowOutOfRange {
        start: t,
        end: t + l,
        first: t0,
        last,
    };
    if len == 0 || l < 0.0 || !(dt > 0.0) {
        return Err(out_of_range());
    }
    let a = (t - t0) / dt;
    let b = (t + l - t0) / dt;
    let slack = 1e-6;
    if a < -slack || b > (len - 1) as f64 + slack {
        return Err(out_of_range());
    }
    Ok((a.round() as usize, b.round() as usize))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeSweepResult {
    pub t_start: f64,
    pub l_values: Vec<f64>,
    pub min_eigs: Vec<f64>,
    pub max_eigs: Vec<f64>,
}

impl PeSweepResult {
    /// Positive definiteness test used throughout: the smallest eigenvalue
    /// must exceed `1e-12` times the largest.
    pub fn is_positive(&self, i: usize) -> bool {
        self.min_eigs[i] > 1e-12 * self.max_eigs[i].abs().max(f64::MIN_POSITIVE)
    }

    /// Smallest window length in the sweep from which every longer window
    /// is positive definite.
    pub fn smallest_passing_l(&self) -> Option<f64> {
        let n = self.l_values.len();
        let mut first = None;
        for i in (0..n).rev() {
            if self.is_positive(i) {
                first = Some(self.l_values[i]);
            } else {
                break;
            }
        }
        first
    }

    /// True when the smallest eigenvalue never decreases with `L`, allowing
    /// roundoff relative to the largest eigenvalue.
    pub fn is_nondecreasing(&self) -> bool {
        self.min_eigs.windows(2).zip(self.max_eigs.windows(2)).all(|(w, m)| {
            w[1] >= w[0] - 1e-12 * m[1].abs().max(1.0)
        })
    }
}

/// Smallest eigenvalue of `M_L` for each window length, windows sharing the
/// start time `t`.
pub fn pe_sweep(z: &[Vec<f64>], t0: f64, dt: f64, t: f64, l_values: &[f64]) -> Result<PeSweepResult> {
    let eigs: Vec<(f64, f64)> = l_values
        .par_iter()
        .map(|&l| {
            let m = pe_matrix(z, t0, dt, t, l)?;
            let e = symmetric_eigenvalues(&m)?;
            Ok((e[0], *e.last().unwrap()))
        })
        .collect::<Result<_>>()?;
    Ok(PeSweepResult {
        t_start: t,
        l_values: l_values.to_vec(),
        min_eigs: eigs.iter().map(|e| e.0).collect(),
        max_eigs: eigs.iter().map(|e| e.1).collect(),
    })
}

/// `D − A`.
pub fn laplacian(adj: &Adjacency) -> DMatrix<f64> {
    let n = adj.n();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            adj.degree(i) as f64
        } else if adj.get(i, j) {
            -1.0
        } else {
            0.0
        }
    })
}

pub fn laplacian_spectrum(adj: &Adjacency) -> Vec<f64> {
    symmetric_eigenvalues(&laplacian(adj)).expect("laplacian is symmetric")
}

/// Spectral coupling bound: the largest element of
/// `{λᵢ B_uu} ∪ {λᵢ B_vv}` over the Laplacian spectrum, clamped at zero.
pub fn coupling_r_bound(adj: &Adjacency, b_uu: f64, b_vv: f64) -> f64 {
    let eigs = laplacian_spectrum(adj);
    eigs.iter()
        .flat_map(|&l| [l * b_uu, l * b_vv])
        .fold(0.0, f64::max)
}

/// `R(y, v) = Σ (y_k Y'_k + v_k V'_k) / σ`, evaluated from the coupling
/// sums with `σ` factored out.
pub fn coupling_form(st: &NetworkState, cfg: &CouplingConfig, theta2: f64) -> Result<f64> {
    let mut unit = cfg.clone();
    unit.sigma = 1.0;
    let mut acc = 0.0;
    for k in 0..st.n() {
        let (yc, vc) = crate::model::coupling_terms(k, st, &unit, theta2)?;
        acc += st.y[k] * yc + st.v[k] * vc;
    }
    Ok(acc)
}

/// Symmetric `2N × 2N` matrix `S` with `R(y, v) = xᵀ S x`, `x = (y, v)`.
pub fn coupling_form_matrix(cfg: &CouplingConfig, theta2: f64) -> Result<DMatrix<f64>> {
    if !(theta2 < 0.0) {
        return Err(Error::NonRecoverable(format!("theta2 = {theta2} must be negative")));
    }
    let c = 1.0 / (-3.0 * theta2).sqrt();
    let n = cfg.n();
    let lap = laplacian(&cfg.adjacency);
    let cross = -0.5 * (c * cfg.b_uv + cfg.b_vu / c);
    let mut s = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = -cfg.b_uu * lap[(i, j)];
            s[(n + i, n + j)] = -cfg.b_vv * lap[(i, j)];
            s[(i, n + j)] = cross * lap[(i, j)];
            s[(n + i, j)] = cross * lap[(i, j)];
        }
    }
    Ok(s)
}

/// Largest eigenvalue of [`coupling_form_matrix`], clamped at zero.
pub fn coupling_form_max_eigenvalue(cfg: &CouplingConfig, theta2: f64) -> Result<f64> {
    let eigs = symmetric_eigenvalues(&coupling_form_matrix(cfg, theta2)?)?;
    Ok(eigs.last().copied().unwrap_or(0.0).max(0.0))
}

/// Coupling constant `r` used for the strength condition: the spectral
/// bound, raised to the exact quadratic-form maximum whenever the scheme
/// makes the latter larger (cross couplings that do not cancel, negative
/// direct couplings). Both agree with the spectral bound for the
/// rotational and direct-`u` schemes at `c = 1`.
pub fn coupling_r(cfg: &CouplingConfig, theta2: f64) -> Result<f64> {
    let spectral = coupling_r_bound(&cfg.adjacency, cfg.b_uu, cfg.b_vv);
    Ok(spectral.max(coupling_form_max_eigenvalue(cfg, theta2)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub r: f64,
    pub sigma_max: f64,
    pub sigma: f64,
    pub ok: bool,
}

/// Strength condition `σ < εb/r`; vacuous when `r = 0`.
pub fn sigma_bound(eps: f64, b: f64, r: f64, sigma: f64) -> BoundsReport {
    if r <= 0.0 {
        return BoundsReport {
            r,
            sigma_max: f64::INFINITY,
            sigma,
            ok: true,
        };
    }
    let sigma_max = eps * b / r;
    BoundsReport {
        r,
        sigma_max,
        sigma,
        ok: sigma < sigma_max,
    }
}

/// `H = ½ Σ (y_k² + v_k²)`.
pub fn h_energy(st: &NetworkState) -> f64 {
    h_energy_of(&st.y, &st.v)
}

pub fn h_energy_of(y: &[f64], v: &[f64]) -> f64 {
    0.5 * (y.iter().map(|x| x * x).sum::<f64>() + v.iter().map(|x| x * x).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HReport {
    pub sup: f64,
    pub last_quartile_max: f64,
    pub third_quartile_max: f64,
    /// Finite and no growth of the last quartile over the previous one.
    pub bounded: bool,
}

/// Empirical boundedness monitor over a recorded `H(t)` series. Reports
/// only; callers decide what to do with a `false` verdict.
pub fn h_monitor(h: &[f64]) -> HReport {
    let n = h.len();
    let sup = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let q = n / 4;
    let max_of = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (third, last) = if q == 0 {
        (sup, sup)
    } else {
        (max_of(&h[n - 2 * q..n - q]), max_of(&h[n - q..]))
    };
    let finite = h.iter().all(|x| x.is_finite());
    HReport {
        sup,
        last_quartile_max: last,
        third_quartile_max: third,
        bounded: finite && last <= 1.1 * third + 1e-9,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorm {
    pub theta: f64,
    /// `None` when the sample cannot be mapped back to `(a, b, c, ε)`.
    pub original: Option<f64>,
    pub physical: bool,
}

/// `‖θ − θ*‖` and `‖(a, b, c, ε) − (a, b, c, ε)*‖` per sample.
pub fn error_norms(traj: &[Theta], theta_true: &Theta, i_ext: f64, n: usize) -> Result<Vec<ErrorNorm>> {
    let truth = original_from_theta(theta_true, i_ext, n)?.params.abce();
    Ok(traj
        .iter()
        .map(|t| {
            let rec = original_from_theta(t, i_ext, n).ok();
            let original = rec.map(|r| {
                r.params
                    .abce()
                    .iter()
                    .zip(truth)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            });
            ErrorNorm {
                theta: t.distance(theta_true),
                original,
                physical: rec.is_some_and(|r| r.physical),
            }
        })
        .collect())
}

/// Largest rate of increase `max (V_{i+1} − V_i)/(t_{i+1} − t_i)` over
/// consecutive samples; non-positive for a nonincreasing series.
pub fn max_increase_rate(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// First sample time after which `values` stays at or below `tol`.
pub fn settling_time(times: &[f64], values: &[f64], tol: f64) -> Option<f64> {
    let last_above = values.iter().rposition(|&v| !(v <= tol));
    match last_above {
        None => times.first().copied(),
        Some(i) if i + 1 < times.len() => Some(times[i + 1]),
        Some(_) => None,
    }
}

/// Connected `n`-node graphs whose spectral coupling bound lies within
/// `tol` of `r_target`, one representative per Laplacian spectrum.
///
/// Exhaustive over all `2^(n(n−1)/2)` edge sets; practical for `n ≤ 7`,
/// slow but feasible for `n = 8`.
pub fn match_topologies(n: usize, b_uu: f64, b_vv: f64, r_target: f64, tol: f64) -> Result<Vec<Adjacency>> {
    if n == 0 || n > 8 {
        return Err(Error::Validation("match_topologies supports 1 <= n <= 8".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let total: u64 = 1u64 << pairs.len();
    let bmax = b_uu.max(b_vv).max(0.0);
    let mut found: Vec<(Vec<f64>, Adjacency)> = (0..total)
        .into_par_iter()
        .filter_map(|mask| {
            let mut adj = Adjacency::empty(n);
            for (bit, &(i, j)) in pairs.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    adj.set(i, j, true);
                }
            }
            if !adj.is_connected() {
                return None;
            }
            // Δ + 1 ≤ λ_max ≤ max over edges of (d_i + d_j) when any edge exists
            if n > 1 && bmax > 0.0 {
                let deg: Vec<usize> = (0..n).map(|i| adj.degree(i)).collect();
                let lo = (*deg.iter().max().unwrap() + 1) as f64 * bmax;
                let hi = adj.edges().iter().map(|&(i, j)| deg[i] + deg[j]).max().unwrap() as f64 * bmax;
                if r_target + tol < lo - 1e-9 || r_target - tol > hi + 1e-9 {
                    return None;
                }
            }
            let eigs = laplacian_spectrum(&adj);
            let r = eigs.iter().flat_map(|&l| [l * b_uu, l * b_vv]).fold(0.0, f64::max);
            ((r - r_target).abs() <= tol).then_some((eigs, adj))
        })
        .collect();
    // spectra of isomorphic graphs agree only up to rounding; compare them
    // on a 1e-8 grid. The stable sort keeps the lowest edge mask per class.
    let key = |eigs: &[f64]| -> Vec<i64> { eigs.iter().map(|l| (l * 1e8).round() as i64).collect() };
    found.sort_by_cached_key(|(eigs, _)| key(eigs));
    found.dedup_by(|a, b| key(&a.0) == key(&b.0));
    Ok(found.into_iter().map(|(_, adj)| adj).collect())
}
