//! Dominant oscillation frequency and EEG band labels.

use std::f64::consts::PI;
use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Band {
    Delta,
    Theta,
    Alpha,
    Beta,
    Gamma,
}

impl Band {
    pub fn name(self) -> &'static str {
        match self {
            Band::Delta => "Delta",
            Band::Theta => "Theta",
            Band::Alpha => "Alpha",
            Band::Beta => "Beta",
            Band::Gamma => "Gamma",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Band of a frequency in Hz. Boundaries go to the higher band, except that
/// 30 Hz is still Beta.
pub fn band_classify(f_hz: f64) -> Band {
    if f_hz < 4.0 {
        Band::Delta
    } else if f_hz < 8.0 {
        Band::Theta
    } else if f_hz < 12.0 {
        Band::Alpha
    } else if f_hz <= 30.0 {
        Band::Beta
    } else {
        Band::Gamma
    }
}

/// `f = 1000 omega / (2 pi T)` for a scaled root `i omega` at delay `T` ms.
pub fn onset_frequency(omega: f64, t_ms: f64) -> f64 {
    1000.0 * omega / (2.0 * PI * t_ms)
}

/// Peak frequency in Hz of a uniformly sampled signal (`dt` in ms).
///
/// Mean removed, Hann window, zero padding to four times the length, then
/// parabolic interpolation of the log-magnitude around the largest bin.
pub fn peak_frequency(signal: &[f64], dt_ms: f64) -> Result<f64> {
    let n = signal.len();
    if n < 8 {
        return Err(Error::NoPeak);
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let scale = signal.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let var = signal.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    if var.sqrt() <= 1e-12 * scale.max(1.0) {
        return Err(Error::NoPeak);
    }
    let m = (4 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); m];
    for (i, v) in signal.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
        buf[i] = Complex::new((v - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let mag: Vec<f64> = buf[..m / 2 + 1].iter().map(|c| c.norm()).collect();
    let (k, &peak) = mag
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::NoPeak)?;
    if !(peak > 0.0) {
        return Err(Error::NoPeak);
    }
    let mut offset = 0.0;
    if k + 1 < mag.len() {
        let (a, b, c) = (mag[k - 1].max(1e-300).ln(), peak.ln(), mag[k + 1].max(1e-300).ln());
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    let fs = 1000.0 / dt_ms;
    Ok((k as f64 + offset) * fs / m as f64)
}

/// Dominant frequency of `E1` over the second half of a run.
pub fn dominant_frequency(traj: &Trajectory) -> Result<f64> {
    let n = traj.len();
    let e1: Vec<f64> = traj.x[n / 2..].iter().map(|x| x[0]).collect();
    peak_frequency(&e1, traj.meta.dt_ms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    Fft,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub f_hz: f64,
    pub band: Band,
    pub method: SpectrumMethod,
}

impl SpectrumReport {
    pub fn new(f_hz: f64, method: SpectrumMethod) -> Self {
        Self {
            f_hz,
            band: band_classify(f_hz),
            method,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
