//! Closed-loop system: plant, filter-differentiator and identifier
//! integrated as one state vector, plus the data-driven variant where
//! recorded potentials replace the plant.
//!
//! State layout (simulation): `[y (N) | v (N) | filter (6) | θ (5) | Q]`.
//! Data-driven runs drop the first `2N` entries.

use serde::{Deserialize, Serialize};

use crate::analysis::h_energy_of;
use crate::error::{Error, Result};
use crate::filters::{filter_outputs, filter_rhs_into, FilterParams, FilterState, FILTER_DIM};
use crate::identify::{identifier_rhs_into, residual, weighted_sq_error, GainMatrix};
use crate::integrate::{integrate, IntegratorConfig, Rk4};
use crate::model::{CouplingConfig, Plant, Theta};

pub const THETA_DIM: usize = 5;

/// Everything needed to simulate the plant and identify it.
#[derive(Debug, Clone)]
pub struct SimulationSetup {
    pub theta_true: Theta,
    pub coupling: CouplingConfig,
    pub i_ext: f64,
    pub filter: FilterParams,
    pub gain: GainMatrix,
    pub integrator: IntegratorConfig,
    pub theta0: Theta,
    pub y0: Vec<f64>,
    pub v0: Vec<f64>,
}

/// Data-driven identification: recorded potentials drive the filters.
#[derive(Debug, Clone)]
pub struct ReplaySetup {
    pub i_ext: f64,
    pub filter: FilterParams,
    pub gain: GainMatrix,
    pub dt: f64,
    pub record_stride: usize,
    pub theta0: Theta,
    pub hold: InputHold,
}

/// Reconstruction of the recorded input between samples.
///
/// The filter passes `Σy/(τ₁τ₂)` straight to `y*`, so the staircase left by
/// a zero-order hold reaches the law amplified by `1/(τ₁τ₂)` and biases the
/// estimates noticeably. Linear interpolation avoids that and is the default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputHold {
    /// Each sample is held until the next one.
    Zero,
    /// Per-channel linear interpolation, evaluated at every RK4 stage.
    #[default]
    Linear,
}

/// Time-sampled run output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunRecord {
    pub n: usize,
    pub i_ext: f64,
    pub times: Vec<f64>,
    pub theta: Vec<Theta>,
    pub q: Vec<f64>,
    pub residual: Vec<f64>,
    pub y_star: Vec<f64>,
    pub z: Vec<[f64; THETA_DIM]>,
    /// Plant potentials per sample; empty for data-driven runs.
    pub y: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    /// `H(t)`; empty for data-driven runs.
    pub h: Vec<f64>,
    /// `V(t)`, available when the true θ is known.
    pub lyapunov: Vec<f64>,
    pub theta_true: Option<Theta>,
    /// Time at which integration produced a non-finite state.
    pub diverged_at: Option<f64>,
}

impl RunRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_theta(&self) -> Option<Theta> {
        self.theta.last().copied()
    }

    pub fn theta_errors(&self) -> Option<Vec<f64>> {
        let truth = self.theta_true?;
        Some(self.theta.iter().map(|t| t.distance(&truth)).collect())
    }
}

/// Uniformly sampled potentials of all channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    pub t0: f64,
    pub dt: f64,
    /// `channels[k][i]` is `y_k` at `t0 + i·dt`.
    pub channels: Vec<Vec<f64>>,
}

impl SignalSet {
    pub fn new(t0: f64, dt: f64, channels: Vec<Vec<f64>>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Validation("signal dt > 0".into()));
        }
        if let Some(first) = channels.first() {
            if let Some(ch) = channels.iter().find(|c| c.len() != first.len()) {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    got: ch.len(),
                });
            }
        }
        if channels.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Validation("signal samples must be finite".into()));
        }
        Ok(SignalSet { t0, dt, channels })
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.len().saturating_sub(1) as f64
    }
}

/// Right-hand side of the monolithic simulated system.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    plant: Plant,
    filter: FilterParams,
    gain: GainMatrix,
    n: usize,
}

impl ClosedLoop {
    pub fn new(theta_true: Theta, coupling: CouplingConfig, i_ext: f64, filter: FilterParams, gain: GainMatrix) -> Result<Self> {
        coupling.validate()?;
        filter.validate()?;
        if gain.dim() != THETA_DIM {
            return Err(Error::DimensionMismatch {
                expected: THETA_DIM,
                got: gain.dim(),
            });
        }
        let n = coupling.n();
        Ok(ClosedLoop {
            plant: Plant::new(theta_true, coupling, i_ext)?,
            filter,
            gain,
            n,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n + FILTER_DIM + THETA_DIM + 1
    }

    pub fn initial_state(&self, y0: &[f64], v0: &[f64], theta0: &Theta) -> Result<Vec<f64>> {
        for s in [y0, v0] {
            if s.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: s.len(),
                });
            }
        }
        let mut x = Vec::with_capacity(self.dim());
        x.extend_from_slice(y0);
        x.extend_from_slice(v0);
        x.extend_from_slice(&FilterState::default().to_array());
        x.extend_from_slice(&theta0.0);
        x.push(0.0);
        Ok(x)
    }

    fn filter_offset(&self) -> usize {
        2 * self.n
    }

    fn theta_offset(&self) -> usize {
        2 * self.n + FILTER_DIM
    }

    pub fn rhs(&self, x: &[f64], dx: &mut [f64]) {
        let n = self.n;
        let (y, rest) = x.split_at(n);
        let v = &rest[..n];
        {
            let (dy, rest) = dx.split_at_mut(n);
            self.plant.rhs_into(y, v, dy, &mut rest[..n]);
        }
        let (sum_y, sum_y3) = sums(y);
        self.drive_filters_and_law(&x[self.filter_offset()..], sum_y, sum_y3, &mut dx[self.filter_offset()..]);
    }

    fn drive_filters_and_law(&self, tail: &[f64], sum_y: f64, sum_y3: f64, dtail: &mut [f64]) {
        filters_and_law(tail, sum_y, sum_y3, &self.filter, &self.gain, dtail);
    }

    /// `(y*, z)` at the given full state.
    pub fn regression(&self, x: &[f64]) -> (f64, [f64; THETA_DIM]) {
        let (sum_y, _) = sums(&x[..self.n]);
        filter_outputs(&FilterState::from_slice(&x[self.filter_offset()..]), sum_y, &self.filter)
    }
}

fn sums_at(signals: &SignalSet, value: impl Fn(&[f64]) -> f64) -> (f64, f64) {
    signals.channels.iter().fold((0.0, 0.0), |(s, s3), ch| {
        let y = value(ch);
        (s + y, s3 + y * y * y)
    })
}

#[inline]
fn sums(y: &[f64]) -> (f64, f64) {
    y.iter().fold((0.0, 0.0), |(s, s3), &yk| (s + yk, s3 + yk * yk * yk))
}

#[inline]
fn filters_and_law(tail: &[f64], sum_y: f64, sum_y3: f64, fp: &FilterParams, gain: &GainMatrix, dtail: &mut [f64]) {
    let fs = &tail[..FILTER_DIM];
    filter_rhs_into(fs, sum_y, sum_y3, fp, &mut dtail[..FILTER_DIM]);
    let (y_star, z) = filter_outputs(&FilterState::from_slice(fs), sum_y, fp);
    let theta = &tail[FILTER_DIM..FILTER_DIM + THETA_DIM];
    let (dtheta, dq) = dtail[FILTER_DIM..].split_at_mut(THETA_DIM);
    dq[0] = identifier_rhs_into(theta, &z, y_star, gain, dtheta);
}

/// Options for [`simulate`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SimulateOptions {
    /// Also return the potentials at every integration step.
    pub export_signals: bool,
}

/// Integrates the closed loop. Divergence is not an error: the record is
/// truncated and `diverged_at` is set.
pub fn simulate(setup: &SimulationSetup, opts: SimulateOptions) -> Result<(RunRecord, Option<SignalSet>)> {
    let system = ClosedLoop::new(
        setup.theta_true,
        setup.coupling.clone(),
        setup.i_ext,
        setup.filter,
        setup.gain.clone(),
    )?;
    let n = system.n;
    let x0 = system.initial_state(&setup.y0, &setup.v0, &setup.theta0)?;
    let mut record = RunRecord {
        n,
        i_ext: setup.i_ext,
        theta_true: Some(setup.theta_true),
        ..Default::default()
    };
    let mut signal_cols: Vec<Vec<f64>> = vec![Vec::new(); n];
    let th0 = system.theta_offset();
    let truth = setup.theta_true.0;

    let cfg = setup.integrator;
    cfg.validate()?;
    let steps = cfg.n_steps();
    let mut x = x0;
    let mut rk = Rk4::new(x.len());
    let mut rhs = |_t: f64, x: &[f64], dx: &mut [f64]| system.rhs(x, dx);

    let observe = |t: f64, x: &[f64], record: &mut RunRecord| {
        let (y_star, z) = system.regression(x);
        let theta = Theta::from_slice(&x[th0..th0 + THETA_DIM]).expect("theta slice");
        let q = x[th0 + THETA_DIM];
        record.times.push(t);
        record.residual.push(residual(&theta.0, &z, y_star));
        record.y_star.push(y_star);
        record.z.push(z);
        record.q.push(q);
        record.lyapunov.push(q + 0.5 * weighted_sq_error(&theta.0, &truth, &setup.gain));
        record.theta.push(theta);
        record.h.push(h_energy_of(&x[..n], &x[n..2 * n]));
        record.y.push(x[..n].to_vec());
        record.v.push(x[n..2 * n].to_vec());
    };

    observe(0.0, &x, &mut record);
    if opts.export_signals {
        for k in 0..n {
            signal_cols[k].push(x[k]);
        }
    }
    for i in 0..steps {
        let t = i as f64 * cfg.dt;
        if let Err(Error::NonFiniteState { t }) = rk.step(&mut rhs, &mut x, t, cfg.dt) {
            record.diverged_at = Some(t);
            break;
        }
        let done = i + 1;
        if opts.export_signals {
            for k in 0..n {
                signal_cols[k].push(x[k]);
            }
        }
        if done % cfg.record_stride == 0 || done == steps {
            observe(done as f64 * cfg.dt, &x, &mut record);
        }
    }
    let signals = if opts.export_signals {
        Some(SignalSet::new(0.0, cfg.dt, signal_cols)?)
    } else {
        None
    };
    Ok((record, signals))
}

/// Identifies θ from recorded potentials, reconstructing the input between
/// samples according to `setup.hold`. The integration step may be finer
/// than the sampling.
pub fn identify_from_signals(signals: &SignalSet, setup: &ReplaySetup, theta_true: Option<Theta>) -> Result<RunRecord> {
    setup.filter.validate()?;
    if setup.gain.dim() != THETA_DIM {
        return Err(Error::DimensionMismatch {
            expected: THETA_DIM,
            got: setup.gain.dim(),
        });
    }
    let cfg = IntegratorConfig::new(setup.dt, signals.duration(), setup.record_stride)?;
    let n = signals.n_channels();
    let mut record = RunRecord {
        n,
        i_ext: setup.i_ext,
        theta_true,
        ..Default::default()
    };
    if signals.is_empty() {
        return Ok(record);
    }
    let mut x: Vec<f64> = FilterState::default().to_array().to_vec();
    x.extend_from_slice(&setup.theta0.0);
    x.push(0.0);

    let len = signals.len();
    let sample_sums: Vec<(f64, f64)> = (0..len)
        .map(|i| sums_at(signals, |ch| ch[i]))
        .collect();
    let hold_index = |t: f64| ((t / signals.dt) + 1e-9).floor().min((len - 1) as f64) as usize;
    let input_at = |t: f64| -> (f64, f64) {
        let i = hold_index(t);
        match setup.hold {
            InputHold::Zero => sample_sums[i],
            InputHold::Linear if i + 1 < len => {
                let frac = (t / signals.dt - i as f64).clamp(0.0, 1.0);
                sums_at(signals, |ch| ch[i] + frac * (ch[i + 1] - ch[i]))
            }
            InputHold::Linear => sample_sums[i],
        }
    };

    let observe = |t: f64, x: &[f64], input: (f64, f64), record: &mut RunRecord| {
        let (y_star, z) = filter_outputs(&FilterState::from_slice(x), input.0, &setup.filter);
        let theta = Theta::from_slice(&x[FILTER_DIM..FILTER_DIM + THETA_DIM]).expect("theta slice");
        let q = x[FILTER_DIM + THETA_DIM];
        record.times.push(signals.t0 + t);
        record.residual.push(residual(&theta.0, &z, y_star));
        record.y_star.push(y_star);
        record.z.push(z);
        record.q.push(q);
        if let Some(truth) = theta_true {
            record.lyapunov.push(q + 0.5 * weighted_sq_error(&theta.0, &truth.0, &setup.gain));
        }
        record.theta.push(theta);
    };

    let steps = cfg.n_steps();
    let mut rk = Rk4::new(x.len());
    observe(0.0, &x, sample_sums[0], &mut record);
    let mut held = sample_sums[0];
    for i in 0..steps {
        let t = i as f64 * cfg.dt;
        if setup.hold == InputHold::Zero {
            held = sample_sums[hold_index(t)];
        }
        let mut rhs = |ts: f64, x: &[f64], dx: &mut [f64]| {
            let input = match setup.hold {
                InputHold::Zero => held,
                InputHold::Linear => input_at(ts),
            };
            filters_and_law(x, input.0, input.1, &setup.filter, &setup.gain, dx);
        };
        if let Err(Error::NonFiniteState { t }) = rk.step(&mut rhs, &mut x, t, cfg.dt) {
            record.diverged_at = Some(signals.t0 + t);
            break;
        }
        let done = i + 1;
        if done % cfg.record_stride == 0 || done == steps {
            let tt = done as f64 * cfg.dt;
            // outputs use the input the state was integrated with
            let input = match setup.hold {
                InputHold::Zero => held,
                InputHold::Linear => input_at(tt),
            };
            observe(tt, &x, input, &mut record);
        }
    }
    Ok(record)
}

/// Plant-only trajectory of `(y, v)` without identification, as recorded
/// signals.
pub fn simulate_plant(
    theta_true: Theta,
    coupling: CouplingConfig,
    i_ext: f64,
    y0: &[f64],
    v0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<SignalSet> {
    let n = coupling.n();
    let plant = Plant::new(theta_true, coupling, i_ext)?;
    let mut x = y0.to_vec();
    x.extend_from_slice(v0);
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); n];
    integrate(
        |_, x, dx: &mut [f64]| {
            let (dy, dv) = dx.split_at_mut(n);
            plant.rhs_into(&x[..n], &x[n..], dy, dv);
        },
        &x,
        cfg,
        |t, x| {
            // the integrator also reports the last step; keep the grid uniform
            let step = (t / cfg.dt).round() as usize;
            if step % cfg.record_stride == 0 {
                for k in 0..n {
                    cols[k].push(x[k]);
                }
            }
        },
    )?;
    SignalSet::new(0.0, cfg.dt * cfg.record_stride as f64, cols)
}
