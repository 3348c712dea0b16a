//! Time-domain integration of the full nonlinear circuit.
//!
//! Dirac kernel: method of steps with classical RK4 and cubic Hermite reads
//! of the stored history. Weak Gamma kernel: the chain trick turns the
//! convolution into four extra ODEs, `T dY/dt = X - Y`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_g9;
use crate::model::{KernelKind, NetworkSpec};

/// Abort threshold on any state component.
pub const OVERFLOW_LIMIT: f64 = 1e6;

/// Quadrature budget per step of [`convolution_oracle`].
pub const ORACLE_OPS_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub kernel: KernelKind,
    pub t_ms: f64,
    pub dt_ms: f64,
    pub initial: Vec<f64>,
    pub horizon_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<[f64; 4]>,
    /// Convolution variable, weak-Gamma runs only.
    pub y: Option<Vec<[f64; 4]>>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> [f64; 4] {
        *self.x.last().expect("nonempty trajectory")
    }

    /// One component over time.
    pub fn channel(&self, j: usize) -> Vec<f64> {
        self.x.iter().map(|v| v[j]).collect()
    }

    /// CSV with header `t_ms,E1,I1,E2,I2` and, if requested and present,
    /// `Y_E1,Y_I1,Y_E2,Y_I2`.
    pub fn write_csv<W: Write>(&self, mut out: W, include_y: bool) -> Result<()> {
        let y = if include_y { self.y.as_ref() } else { None };
        write!(out, "t_ms,E1,I1,E2,I2")?;
        if y.is_some() {
            write!(out, ",Y_E1,Y_I1,Y_E2,Y_I2")?;
        }
        writeln!(out)?;
        for i in 0..self.t.len() {
            write!(out, "{}", fmt_g9(self.t[i]))?;
            for v in &self.x[i] {
                write!(out, ",{}", fmt_g9(*v))?;
            }
            if let Some(y) = y {
                for v in &y[i] {
                    write!(out, ",{}", fmt_g9(*v))?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn export_csv(&self, path: &Path, include_y: bool) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_csv(&mut w, include_y)?;
        w.flush()?;
        Ok(())
    }
}

fn steps_for(horizon_ms: f64, dt_ms: f64) -> Result<usize> {
    if !(dt_ms > 0.0 && dt_ms.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive (got {dt_ms})")));
    }
    if !(horizon_ms > 0.0 && horizon_ms.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive (got {horizon_ms})"
        )));
    }
    Ok((horizon_ms / dt_ms).round() as usize)
}

fn check_delay(t_ms: f64) -> Result<()> {
    if t_ms > 0.0 && t_ms.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("delay T must be positive (got {t_ms})")))
    }
}

fn check_overflow(x: &[f64], t_ms: f64) -> Result<()> {
    if x.iter().any(|v| !(v.abs() <= OVERFLOW_LIMIT)) {
        return Err(Error::Overflow { t_ms });
    }
    Ok(())
}

/// `dX/dt` given the current state and the convolved (or delayed) state.
fn rhs(net: &NetworkSpec, x: &[f64; 4], xd: &[f64; 4]) -> [f64; 4] {
    let f = net.activation(&net.drive(xd));
    std::array::from_fn(|j| (f[j] - x[j]) / net.tau_bar_ms)
}

fn axpy(x: &[f64; 4], a: f64, k: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|j| x[j] + a * k[j])
}

/// Stored solution with derivatives for Hermite reads.
struct History {
    x0: [f64; 4],
    dt: f64,
    x: Vec<[f64; 4]>,
    d: Vec<[f64; 4]>,
}

impl History {
    /// State at time `s <= current time`.
    fn at(&self, s: f64) -> [f64; 4] {
        if s <= 0.0 {
            return self.x0;
        }
        let pos = s / self.dt;
        let last = self.x.len() - 1;
        let mut k = pos.floor() as usize;
        if k >= last {
            k = last.saturating_sub(1);
        }
        let th = (pos - k as f64).clamp(0.0, 1.0);
        if th == 0.0 {
            return self.x[k];
        }
        let (x0, x1, d0, d1) = (&self.x[k], &self.x[k + 1], &self.d[k], &self.d[k + 1]);
        let h = self.dt;
        let t2 = th * th;
        let t3 = t2 * th;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + th;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        std::array::from_fn(|j| h00 * x0[j] + h10 * h * d0[j] + h01 * x1[j] + h11 * h * d1[j])
    }
}

/// Discrete-delay run: `tau_bar dX/dt = -X + F(C X(t - T) + P)`, with
/// `X(s) = history` for `s <= 0`.
pub fn simulate_dirac(
    net: &NetworkSpec,
    t_ms: f64,
    history: [f64; 4],
    horizon_ms: f64,
    dt_ms: f64,
) -> Result<Trajectory> {
    net.validate()?;
    check_delay(t_ms)?;
    let n = steps_for(horizon_ms, dt_ms)?;
    if dt_ms > t_ms / 20.0 * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge {
            dt: dt_ms,
            limit: t_ms / 20.0,
        });
    }
    if horizon_ms < 10.0 * t_ms {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon_ms} ms is shorter than 10 T = {} ms",
            10.0 * t_ms
        )));
    }
    check_overflow(&history, 0.0)?;

    let h = dt_ms;
    let mut hist = History {
        x0: history,
        dt: h,
        x: Vec::with_capacity(n + 1),
        d: Vec::with_capacity(n + 1),
    };
    hist.x.push(history);
    hist.d.push(rhs(net, &history, &history));
    let mut t = Vec::with_capacity(n + 1);
    t.push(0.0);

    for i in 0..n {
        let ti = i as f64 * h;
        let x = hist.x[i];
        let k1 = hist.d[i];
        let dmid = hist.at(ti + 0.5 * h - t_ms);
        let k2 = rhs(net, &axpy(&x, 0.5 * h, &k1), &dmid);
        let k3 = rhs(net, &axpy(&x, 0.5 * h, &k2), &dmid);
        // the end-point delayed read may touch the interval being computed only
        // when T < dt, which the step check excludes
        let dend = hist.at(ti + h - t_ms);
        let k4 = rhs(net, &axpy(&x, h, &k3), &dend);
        let next: [f64; 4] =
            std::array::from_fn(|j| x[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        let t_next = (i + 1) as f64 * h;
        check_overflow(&next, t_next)?;
        let d_next = rhs(net, &next, &dend);
        hist.x.push(next);
        hist.d.push(d_next);
        t.push(t_next);
    }

    Ok(Trajectory {
        t,
        x: hist.x,
        y: None,
        meta: TrajectoryMeta {
            kernel: KernelKind::Dirac,
            t_ms,
            dt_ms,
            initial: history.to_vec(),
            horizon_ms,
        },
    })
}

/// Chain-trick run of the 8-dimensional system
/// `tau_bar dX/dt = -X + F(C Y + P)`, `T dY/dt = X - Y`.
pub fn simulate_weak_gamma(
    net: &NetworkSpec,
    t_ms: f64,
    init: [f64; 8],
    horizon_ms: f64,
    dt_ms: f64,
) -> Result<Trajectory> {
    net.validate()?;
    check_delay(t_ms)?;
    let n = steps_for(horizon_ms, dt_ms)?;
    let limit = net.tau_bar_ms.min(t_ms) / 20.0;
    if dt_ms > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt: dt_ms, limit });
    }
    check_overflow(&init, 0.0)?;

    let f = |s: &[f64; 8]| -> [f64; 8] {
        let x: [f64; 4] = std::array::from_fn(|j| s[j]);
        let y: [f64; 4] = std::array::from_fn(|j| s[4 + j]);
        let dx = rhs(net, &x, &y);
        std::array::from_fn(|j| if j < 4 { dx[j] } else { (x[j - 4] - y[j - 4]) / t_ms })
    };
    let add = |s: &[f64; 8], a: f64, k: &[f64; 8]| -> [f64; 8] { std::array::from_fn(|j| s[j] + a * k[j]) };

    let h = dt_ms;
    let mut s = init;
    let mut t = Vec::with_capacity(n + 1);
    let mut xs = Vec::with_capacity(n + 1);
    let mut ys = Vec::with_capacity(n + 1);
    let split = |s: &[f64; 8]| -> ([f64; 4], [f64; 4]) {
        (std::array::from_fn(|j| s[j]), std::array::from_fn(|j| s[4 + j]))
    };
    t.push(0.0);
    let (x0, y0) = split(&s);
    xs.push(x0);
    ys.push(y0);
    for i in 0..n {
        let k1 = f(&s);
        let k2 = f(&add(&s, 0.5 * h, &k1));
        let k3 = f(&add(&s, 0.5 * h, &k2));
        let k4 = f(&add(&s, h, &k3));
        s = std::array::from_fn(|j| s[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        let tn = (i + 1) as f64 * h;
        check_overflow(&s, tn)?;
        let (x, y) = split(&s);
        t.push(tn);
        xs.push(x);
        ys.push(y);
    }
    Ok(Trajectory {
        t,
        x: xs,
        y: Some(ys),
        meta: TrajectoryMeta {
            kernel: KernelKind::WeakGamma,
            t_ms,
            dt_ms,
            initial: init.to_vec(),
            horizon_ms,
        },
    })
}

/// Run with the circuit's own kernel. Weak-Gamma runs start with `Y = X`.
pub fn simulate(
    net: &NetworkSpec,
    t_ms: f64,
    init: [f64; 4],
    horizon_ms: f64,
    dt_ms: f64,
) -> Result<Trajectory> {
    match net.kernel.kind {
        KernelKind::Dirac => simulate_dirac(net, t_ms, init, horizon_ms, dt_ms),
        KernelKind::WeakGamma => {
            let mut s = [0.0; 8];
            s[..4].copy_from_slice(&init);
            s[4..].copy_from_slice(&init);
            simulate_weak_gamma(net, t_ms, s, horizon_ms, dt_ms)
        }
    }
}

/// Weak-Gamma reference solution that evaluates the convolution
/// `Y(t) = e^{-t/T} X0 + int_0^t e^{-(t-s)/T} X(s) ds / T` by direct
/// quadrature over the whole stored past at every RK stage.
///
/// The past is integrated with the trapezoid rule plus the first
/// Euler-Maclaurin end correction, which uses the stored derivatives; the
/// part of the current step up to a stage time uses the trapezoid rule.
/// Cost grows quadratically with the horizon.
pub fn convolution_oracle(
    net: &NetworkSpec,
    t_ms: f64,
    init: [f64; 4],
    horizon_ms: f64,
    dt_ms: f64,
) -> Result<Trajectory> {
    net.validate()?;
    check_delay(t_ms)?;
    let n = steps_for(horizon_ms, dt_ms)?;
    let ops = 4 * (n + 1);
    if ops > ORACLE_OPS_LIMIT {
        return Err(Error::HorizonTooLong { ops });
    }
    check_overflow(&init, 0.0)?;
    let h = dt_ms;
    let tt = t_ms;
    let mut xs: Vec<[f64; 4]> = vec![init];
    let mut ds: Vec<[f64; 4]> = Vec::with_capacity(n + 1);
    let mut ys: Vec<[f64; 4]> = vec![init];
    ds.push(rhs(net, &init, &init));

    // Y at time t_m + c h given the past up to index m and the value xc at
    // the stage time.
    let conv = |xs: &[[f64; 4]], ds: &[[f64; 4]], c: f64, xc: &[f64; 4]| -> [f64; 4] {
        let m = xs.len() - 1;
        let t = (m as f64 + c) * h;
        let k = |s: f64| (-(t - s) / tt).exp() / tt;
        let mut y: [f64; 4] = std::array::from_fn(|j| (-t / tt).exp() * init[j]);
        if m > 0 {
            // trapezoid over [0, t_m]
            for (i, xi) in xs.iter().enumerate() {
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                let ki = k(i as f64 * h);
                for j in 0..4 {
                    y[j] += h * w * ki * xi[j];
                }
            }
            // g = K X, g' = K X / T + K X'
            let (k0, km) = (k(0.0), k(m as f64 * h));
            for j in 0..4 {
                let g0 = k0 * (xs[0][j] / tt + ds[0][j]);
                let gm = km * (xs[m][j] / tt + ds[m][j]);
                y[j] -= h * h / 12.0 * (gm - g0);
            }
        }
        if c > 0.0 {
            let (km, kc) = (k(m as f64 * h), k(t));
            for j in 0..4 {
                y[j] += 0.5 * c * h * (km * xs[m][j] + kc * xc[j]);
            }
        }
        y
    };

    for i in 0..n {
        let x = xs[i];
        let k1 = ds[i];
        let x2 = axpy(&x, 0.5 * h, &k1);
        let k2 = rhs(net, &x2, &conv(&xs, &ds, 0.5, &x2));
        let x3 = axpy(&x, 0.5 * h, &k2);
        let k3 = rhs(net, &x3, &conv(&xs, &ds, 0.5, &x3));
        let x4 = axpy(&x, h, &k3);
        let k4 = rhs(net, &x4, &conv(&xs, &ds, 1.0, &x4));
        let next: [f64; 4] =
            std::array::from_fn(|j| x[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        check_overflow(&next, (i + 1) as f64 * h)?;
        let y_next = conv(&xs, &ds, 1.0, &next);
        xs.push(next);
        ds.push(rhs(net, &next, &y_next));
        ys.push(y_next);
    }
    let t = (0..=n).map(|i| i as f64 * h).collect();
    Ok(Trajectory {
        t,
        x: xs,
        y: Some(ys),
        meta: TrajectoryMeta {
            kernel: KernelKind::WeakGamma,
            t_ms,
            dt_ms,
            initial: init.to_vec(),
            horizon_ms,
        },
    })
}

/// Long-run behaviour of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LongTerm {
    ConvergesToEquilibrium { distance: f64 },
    LimitCycle { amplitude: f64, period_ms: f64 },
    Undetermined,
}

impl LongTerm {
    pub fn label(&self) -> &'static str {
        match self {
            LongTerm::ConvergesToEquilibrium { .. } => "Converges",
            LongTerm::LimitCycle { .. } => "LimitCycle",
            LongTerm::Undetermined => "Undetermined",
        }
    }
}

/// Distance below which a run counts as settled at the equilibrium.
pub const CONVERGED_DISTANCE: f64 = 1e-5;

/// Classify the last 40% of `traj` against the equilibrium `x_star`.
///
/// Settled: every sample within `1e-5` of `x_star`. Limit cycle: at least
/// four complete cycles of `E1`, successive peak-to-peak amplitudes within 2%
/// of each other and first-to-last drift under 2%; the period is the mean
/// peak spacing.
pub fn classify_longterm(traj: &Trajectory, x_star: &[f64; 4]) -> LongTerm {
    let n = traj.len();
    if n < 10 {
        return LongTerm::Undetermined;
    }
    let start = n - (n * 2) / 5;
    let dist = traj.x[start..]
        .iter()
        .map(|x| x.iter().zip(x_star).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
        .fold(0.0f64, f64::max);
    if dist < CONVERGED_DISTANCE {
        return LongTerm::ConvergesToEquilibrium { distance: dist };
    }
    let e1: Vec<f64> = traj.x[start..].iter().map(|x| x[0]).collect();
    let t = &traj.t[start..];
    let mut peaks = Vec::new();
    for i in 1..e1.len() - 1 {
        if e1[i] > e1[i - 1] && e1[i] >= e1[i + 1] {
            peaks.push(i);
        }
    }
    if peaks.len() < 5 {
        return LongTerm::Undetermined;
    }
    let amps: Vec<f64> = peaks
        .windows(2)
        .map(|w| {
            let lo = e1[w[0]..=w[1]].iter().copied().fold(f64::INFINITY, f64::min);
            e1[w[1]] - lo
        })
        .collect();
    let steady = amps.windows(2).all(|a| ((a[1] - a[0]) / a[0]).abs() < 0.02);
    let drift = ((amps[amps.len() - 1] - amps[0]) / amps[0]).abs();
    if steady && drift < 0.02 {
        let period =
            (t[*peaks.last().unwrap()] - t[peaks[0]]) / (peaks.len() - 1) as f64;
        let amplitude = amps.iter().sum::<f64>() / amps.len() as f64;
        return LongTerm::LimitCycle {
            amplitude,
            period_ms: period,
        };
    }
    LongTerm::Undetermined
}
