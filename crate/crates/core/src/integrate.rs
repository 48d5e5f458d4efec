//! Fixed-step classical Runge–Kutta integration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between recorded samples.
    pub record_stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, record_stride: usize) -> Result<Self> {
        let cfg = IntegratorConfig {
            dt,
            t_end,
            record_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `t_end = 0` is accepted and yields only the initial sample.
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Validation("dt > 0".into()));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Validation("t_end > 0".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::Validation("record_stride >= 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Reusable stage buffers for RK4 on a state of fixed dimension.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Rk4 {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances `state` in place by one step. `rhs(t, x, dx)` writes the
    /// derivative into `dx`.
    pub fn step<F>(&mut self, rhs: &mut F, state: &mut [f64], t: f64, dt: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = state.len();
        let half = 0.5 * dt;
        rhs(t, state, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = state[i] + half * self.k1[i];
        }
        rhs(t + half, &self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = state[i] + half * self.k2[i];
        }
        rhs(t + half, &self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = state[i] + dt * self.k3[i];
        }
        rhs(t + dt, &self.tmp, &mut self.k4);
        let sixth = dt / 6.0;
        let mut finite = true;
        for i in 0..n {
            state[i] += sixth * (self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]);
            finite &= state[i].is_finite();
        }
        if finite {
            Ok(())
        } else {
            Err(Error::NonFiniteState { t: t + dt })
        }
    }
}

/// One RK4 step returning a new vector.
pub fn rk4_step<F>(mut rhs: F, state: &[f64], t: f64, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut out = state.to_vec();
    Rk4::new(state.len()).step(&mut rhs, &mut out, t, dt)?;
    Ok(out)
}

/// Integrates from `t = 0` to `t_end`, calling `observer(t, x)` at step 0,
/// every `record_stride` steps and at the final step. Returns the final
/// state.
pub fn integrate<F, O>(mut rhs: F, x0: &[f64], cfg: &IntegratorConfig, mut observer: O) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]),
{
    cfg.validate()?;
    let steps = cfg.n_steps();
    let mut x = x0.to_vec();
    let mut rk = Rk4::new(x.len());
    observer(0.0, &x);
    for i in 0..steps {
        let t = i as f64 * cfg.dt;
        rk.step(&mut rhs, &mut x, t, cfg.dt)?;
        let done = i + 1;
        if done % cfg.record_stride == 0 || done == steps {
            observer(done as f64 * cfg.dt, &x);
        }
    }
    Ok(x)
}

/// Sampled trajectory: `times[i]` pairs with `states[i]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// [`integrate`] that stores every observed sample.
pub fn integrate_recorded<F>(rhs: F, x0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut traj = Trajectory::default();
    integrate(rhs, x0, cfg, |t, x| {
        traj.times.push(t);
        traj.states.push(x.to_vec());
    })?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rhs_is_identity() {
        let s = [1.5, -2.0, 3.25];
        let out = rk4_step(|_, _, dx: &mut [f64]| dx.fill(0.0), &s, 0.0, 0.1).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn exponential_single_step() {
        let out = rk4_step(|_, x, dx: &mut [f64]| dx[0] = x[0], &[1.0], 0.0, 0.1).unwrap();
        // 1 + h + h²/2 + h³/6 + h⁴/24
        assert!((out[0] - 1.105_170_833_333_333_3).abs() < 1e-15);
        // local truncation error of one step is h⁵/120 ≈ 8.3e-8
        assert!((out[0] - 0.1f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn oversized_step_stays_finite() {
        let out = rk4_step(|_, x, dx: &mut [f64]| dx[0] = -x[0], &[1.0], 0.0, 3.0).unwrap();
        assert!(out[0].is_finite());
        assert!((out[0] - (-3.0f64).exp()).abs() > 0.1);
    }

    #[test]
    fn blow_up_reports_time() {
        let cfg = IntegratorConfig::new(0.1, 10.0, 1).unwrap();
        let err = integrate(|_, x, dx: &mut [f64]| dx[0] = x[0] * x[0], &[1.0], &cfg, |_, _| {})
            .unwrap_err();
        match err {
            Error::NonFiniteState { t } => assert!(t > 0.0 && t <= 10.0),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn harmonic_oscillator_full_period() {
        let t_end = 2.0 * std::f64::consts::PI;
        let cfg = IntegratorConfig {
            dt: t_end / (t_end / 1e-3).round(),
            t_end,
            record_stride: 1000,
        };
        let x = integrate(
            |_, x, dx: &mut [f64]| {
                dx[0] = x[1];
                dx[1] = -x[0];
            },
            &[1.0, 0.0],
            &cfg,
            |_, _| {},
        )
        .unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9 && x[1].abs() < 1e-9, "{x:?}");
    }

    #[test]
    fn sample_counting() {
        let rhs = |_: f64, _: &[f64], dx: &mut [f64]| dx[0] = 1.0;
        let traj = integrate_recorded(rhs, &[0.0], &IntegratorConfig::new(0.1, 0.0, 1).unwrap()).unwrap();
        assert_eq!(traj.times, vec![0.0]);
        let traj = integrate_recorded(rhs, &[0.0], &IntegratorConfig::new(0.1, 1.0, 10).unwrap()).unwrap();
        assert_eq!(traj.times.len(), 2);
        assert_eq!(traj.times, vec![0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(IntegratorConfig::new(0.0, 1.0, 1).is_err());
        assert!(IntegratorConfig::new(0.1, -1.0, 1).is_err());
        assert!(IntegratorConfig::new(0.1, 1.0, 0).is_err());
    }
}
