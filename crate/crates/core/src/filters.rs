//! Second-order filter-differentiator `W(p) = 1 / ((τ₁p + 1)(τ₂p + 1))`.
//!
//! Six states realize `pW`, `W` applied to `Σy` and `Σy³`:
//!
//! ```text
//! ẇ₁ = −S/T w₁ + w₂ − S/T² Σy       x₁ = pW Σy,  ẋ₁ = w₁ + Σy/T
//! ẇ₂ = −w₁/T − Σy/T²                 x₃ = W Σy,   ẋ₃ = x₁
//! ẋ₂ = −S/T x₂ − x₄/T + Σy³/T        x₂ = pW Σy³
//! ẋ₄ = x₂                            x₄ = W Σy³
//! ```
//!
//! with `S = τ₁ + τ₂`, `T = τ₁τ₂`. The filtered second derivative
//! `y* = p²W Σy = ẋ₁` is read off algebraically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FILTER_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub tau1: f64,
    pub tau2: f64,
}

impl FilterParams {
    pub fn new(tau1: f64, tau2: f64) -> Result<Self> {
        let fp = FilterParams { tau1, tau2 };
        fp.validate()?;
        Ok(fp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau1 > 0.0 && self.tau2 > 0.0) || !(self.tau1.is_finite() && self.tau2.is_finite()) {
            return Err(Error::Validation("tau1 > 0 and tau2 > 0".into()));
        }
        Ok(())
    }

    pub fn max_tau(&self) -> f64 {
        self.tau1.max(self.tau2)
    }

    fn sum(&self) -> f64 {
        self.tau1 + self.tau2
    }

    fn prod(&self) -> f64 {
        self.tau1 * self.tau2
    }
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            tau1: 0.01,
            tau2: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterState {
    pub w1: f64,
    pub w2: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl FilterState {
    pub fn to_array(&self) -> [f64; FILTER_DIM] {
        [self.w1, self.w2, self.x1, self.x2, self.x3, self.x4]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        FilterState {
            w1: s[0],
            w2: s[1],
            x1: s[2],
            x2: s[3],
            x3: s[4],
            x4: s[5],
        }
    }
}

pub fn filter_rhs(fs: &FilterState, sum_y: f64, sum_y3: f64, fp: &FilterParams) -> FilterState {
    let (s, t) = (fp.sum(), fp.prod());
    FilterState {
        w1: -s / t * fs.w1 + fs.w2 - s / (t * t) * sum_y,
        w2: -fs.w1 / t - sum_y / (t * t),
        x1: fs.w1 + sum_y / t,
        x2: -s / t * fs.x2 - fs.x4 / t + sum_y3 / t,
        x3: fs.x1,
        x4: fs.x2,
    }
}

/// Slice form of [`filter_rhs`] for the monolithic state vector.
#[inline]
pub fn filter_rhs_into(fs: &[f64], sum_y: f64, sum_y3: f64, fp: &FilterParams, out: &mut [f64]) {
    let d = filter_rhs(&FilterState::from_slice(fs), sum_y, sum_y3, fp);
    out[..FILTER_DIM].copy_from_slice(&d.to_array());
}

/// Returns `(y*, z)` with `z = (x₁, x₂, x₃, x₄, 1)`.
pub fn filter_outputs(fs: &FilterState, sum_y: f64, fp: &FilterParams) -> (f64, [f64; 5]) {
    let y_star = fs.w1 + sum_y / fp.prod();
    (y_star, [fs.x1, fs.x2, fs.x3, fs.x4, 1.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};

    fn fp() -> FilterParams {
        FilterParams::new(0.01, 0.01).unwrap()
    }

    #[test]
    fn zero_equilibrium() {
        let d = filter_rhs(&FilterState::default(), 0.0, 0.0, &fp());
        assert_eq!(d, FilterState::default());
        let (ys, z) = filter_outputs(&FilterState::default(), 0.0, &fp());
        assert_eq!(ys, 0.0);
        assert_eq!(z, [0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn unit_input_coefficients() {
        let d = filter_rhs(&FilterState::default(), 1.0, 0.0, &fp());
        assert!((d.w1 + 2e6).abs() < 1e-6);
        assert!((d.w2 + 1e8).abs() < 1e-4);
        assert!((d.x1 - 1e4).abs() < 1e-8);
        assert_eq!((d.x2, d.x3, d.x4), (0.0, 0.0, 0.0));
    }

    #[test]
    fn algebraic_output() {
        let fs = FilterState {
            w1: -5.0,
            ..Default::default()
        };
        let (ys, _) = filter_outputs(&fs, 1.0, &fp());
        assert!((ys - 9995.0).abs() < 1e-9);
    }

    #[test]
    fn dc_gains() {
        let p = FilterParams::new(0.01, 0.03).unwrap();
        let s = 2.5;
        let cfg = IntegratorConfig::new(1e-4, 2.0, 1000).unwrap();
        let end = integrate(
            |_, x, dx: &mut [f64]| filter_rhs_into(x, s, s * s * s, &p, dx),
            &[0.0; FILTER_DIM],
            &cfg,
            |_, _| {},
        )
        .unwrap();
        let fs = FilterState::from_slice(&end);
        assert!((fs.x3 - s).abs() < 1e-9);
        assert!(fs.x1.abs() < 1e-9);
        assert!((fs.x4 - s.powi(3)).abs() < 1e-8);
        assert!(fs.x2.abs() < 1e-8);
    }

    #[test]
    fn rejects_nonpositive_tau() {
        assert!(FilterParams::new(0.0, 0.01).is_err());
        assert!(FilterParams::new(0.01, -1.0).is_err());
    }
}
