//! Speed-gradient identifier for any plant in linear-regression form
//! `y* = θ*ᵀ z`.
//!
//! The estimate follows `θ̇ = −Γ δ z` with residual `δ = θᵀz − y*`, which is
//! the speed gradient of the integral objective `Q_t = ∫ ½δ² ds`. `Q_t`
//! is carried as an extra state so that `V_t = Q_t + ½‖θ − θ*‖²_{Γ⁻¹}`
//! can be monitored when θ* is known.

use nalgebra::DMatrix;

use crate::analysis::symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::integrate::{integrate, IntegratorConfig};

/// Symmetric positive-definite adaptation gain.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    gamma: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl GainMatrix {
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        if !gamma.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gamma.nrows(),
                got: gamma.ncols(),
            });
        }
        let asym = (&gamma - gamma.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let eigs = symmetric_eigenvalues(&gamma)?;
        let min_eig = eigs.first().copied().unwrap_or(0.0);
        if !(min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eig });
        }
        let inverse = gamma
            .clone()
            .try_inverse()
            .ok_or(Error::NotPositiveDefinite { min_eig })?;
        Ok(GainMatrix { gamma, inverse })
    }

    /// `Γ = g·I`.
    pub fn scalar(m: usize, g: f64) -> Result<Self> {
        GainMatrix::new(DMatrix::identity(m, m) * g)
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        GainMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.gamma.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// Current estimates plus the accumulated objective `Q_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifierState {
    pub theta: Vec<f64>,
    pub q: f64,
}

impl IdentifierState {
    pub fn new(theta0: Vec<f64>) -> Self {
        IdentifierState { theta: theta0, q: 0.0 }
    }

    /// Packs as `(θ, q)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.theta.clone();
        v.push(self.q);
        v
    }

    pub fn from_slice(s: &[f64]) -> Self {
        let m = s.len() - 1;
        IdentifierState {
            theta: s[..m].to_vec(),
            q: s[m],
        }
    }
}

/// `δ = θᵀz − y*`.
#[inline]
pub fn residual(theta: &[f64], z: &[f64], y_star: f64) -> f64 {
    theta.iter().zip(z).map(|(t, z)| t * z).sum::<f64>() - y_star
}

/// Writes `θ̇ = −Γδz` into `dtheta` and returns `Q̇ = ½δ²`.
#[inline]
pub fn identifier_rhs_into(theta: &[f64], z: &[f64], y_star: f64, g: &GainMatrix, dtheta: &mut [f64]) -> f64 {
    let delta = residual(theta, z, y_star);
    let m = theta.len();
    for i in 0..m {
        let mut acc = 0.0;
        for j in 0..m {
            acc += g.gamma[(i, j)] * z[j];
        }
        dtheta[i] = -delta * acc;
    }
    0.5 * delta * delta
}

pub fn identifier_rhs(ist: &IdentifierState, z: &[f64], y_star: f64, g: &GainMatrix) -> Result<IdentifierState> {
    let m = g.dim();
    if ist.theta.len() != m || z.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: if ist.theta.len() != m { ist.theta.len() } else { z.len() },
        });
    }
    let mut dtheta = vec![0.0; m];
    let dq = identifier_rhs_into(&ist.theta, z, y_star, g, &mut dtheta);
    Ok(IdentifierState { theta: dtheta, q: dq })
}

/// `V = Q + ½ (θ − θ*)ᵀ Γ⁻¹ (θ − θ*)`.
pub fn lyapunov_value(ist: &IdentifierState, theta_true: &[f64], g: &GainMatrix) -> f64 {
    ist.q + 0.5 * weighted_sq_error(&ist.theta, theta_true, g)
}

/// `‖θ − θ*‖²_{Γ⁻¹}`.
pub fn weighted_sq_error(theta: &[f64], theta_true: &[f64], g: &GainMatrix) -> f64 {
    let m = theta.len();
    let mut acc = 0.0;
    for i in 0..m {
        let ei = theta[i] - theta_true[i];
        for j in 0..m {
            acc += ei * g.inverse[(i, j)] * (theta[j] - theta_true[j]);
        }
    }
    acc
}

/// Sample of an identifier driven by an externally supplied regression.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifierSample {
    pub t: f64,
    pub state: IdentifierState,
}

/// Runs the adaptive law alone against a regression source
/// `source(t) -> (z, y*)`.
pub fn run_identifier<S>(
    mut source: S,
    theta0: &[f64],
    g: &GainMatrix,
    cfg: &IntegratorConfig,
) -> Result<Vec<IdentifierSample>>
where
    S: FnMut(f64) -> (Vec<f64>, f64),
{
    let m = g.dim();
    if theta0.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: theta0.len(),
        });
    }
    let x0 = IdentifierState::new(theta0.to_vec()).to_vec();
    let mut samples = Vec::new();
    integrate(
        |t, x, dx: &mut [f64]| {
            let (z, y_star) = source(t);
            dx[m] = identifier_rhs_into(&x[..m], &z, y_star, g, &mut dx[..m]);
        },
        &x0,
        cfg,
        |t, x| {
            samples.push(IdentifierSample {
                t,
                state: IdentifierState::from_slice(x),
            })
        },
    )?;
    Ok(samples)
}
