//! Two-parameter grid sweeps over circuit weights or raw `(alpha, beta)`.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{equilibrium, solve_from, Equilibrium, SolverOpts};
use crate::error::{Error, Result};
use crate::format::fmt_g9;
use crate::model::{KernelKind, NetworkSpec};
use crate::spectrum::{band_classify, onset_frequency, Band};
use crate::stability::{
    classify, critical_delays, zone_label, CriticalDelaySet, DelayIndependent, RegionClass,
};

/// What the grid varies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SweepBase {
    /// Weights of a circuit; equilibrium re-solved per cell.
    Network { network: NetworkSpec },
    /// The `(alpha, beta)` plane directly. `tau_bar_ms` converts scaled delays
    /// to ms (use 1 to report scaled delays).
    Raw { tau_bar_ms: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, steps: usize) -> Self {
        Self {
            name: name.to_string(),
            min,
            max,
            steps,
        }
    }

    /// Parse `name:min:max:steps`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "axis `{spec}` must look like name:min:max:steps"
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{s}` in axis `{spec}`")))
        };
        let steps = parts[3]
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad step count in axis `{spec}`")))?;
        Ok(Self::new(parts[0], num(parts[1])?, num(parts[2])?, steps))
    }

    /// A single-valued axis is allowed only with `min == max` (a 1 x N path).
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config(format!("axis {} has non-finite bounds", self.name)));
        }
        match self.steps {
            0 => Err(Error::Config(format!("axis {} needs steps >= 1", self.name))),
            1 if self.min != self.max => Err(Error::Config(format!(
                "axis {} has one step but min != max",
                self.name
            ))),
            _ if self.steps >= 2 && self.max <= self.min => Err(Error::Config(format!(
                "axis {} needs max > min",
                self.name
            ))),
            _ => Ok(()),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    self.max
                } else {
                    self.min + span * (i as f64 / last)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: SweepBase,
    pub axis1: Axis,
    pub axis2: Axis,
    pub kernels: Vec<KernelKind>,
    /// When set, each cell also reports whether the equilibrium is unstable at
    /// this delay.
    #[serde(default)]
    pub fixed_delay_ms: Option<f64>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        self.axis2.validate()?;
        if self.axis1.name == self.axis2.name {
            return Err(Error::Config("sweep axes must be distinct".into()));
        }
        if self.kernels.is_empty() {
            return Err(Error::Config("at least one kernel is required".into()));
        }
        if let Some(t) = self.fixed_delay_ms {
            if !(t > 0.0) {
                return Err(Error::Config(format!("fixed delay must be positive (got {t})")));
            }
        }
        match &self.base {
            SweepBase::Raw { tau_bar_ms } => {
                if !(*tau_bar_ms > 0.0) {
                    return Err(Error::Config("tau_bar_ms must be positive".into()));
                }
                let mut names = [self.axis1.name.as_str(), self.axis2.name.as_str()];
                names.sort();
                if names != ["alpha", "beta"] {
                    return Err(Error::Config(
                        "raw sweeps take exactly the axes alpha and beta".into(),
                    ));
                }
            }
            SweepBase::Network { network } => {
                network.validate()?;
                for ax in [&self.axis1, &self.axis2] {
                    network.clone().set_weight(&ax.name, ax.min)?;
                }
            }
        }
        Ok(())
    }

    pub fn tau_bar_ms(&self) -> f64 {
        match &self.base {
            SweepBase::Raw { tau_bar_ms } => *tau_bar_ms,
            SweepBase::Network { network } => network.tau_bar_ms,
        }
    }
}

/// One `(cell, kernel)` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p1: f64,
    pub p2: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub region: String,
    pub zone: String,
    pub kernel: KernelKind,
    pub tstar_ms: Option<f64>,
    pub tminus_ms: Option<f64>,
    pub tplus_ms: Option<f64>,
    pub f_hz: Option<f64>,
    pub band: Option<Band>,
    /// Largest `|F(i omega)|` over the reported crossings.
    pub max_residual: Option<f64>,
    /// Unstable at the configured fixed delay.
    pub oscillating: Option<bool>,
    pub equilibrium_failed: bool,
    /// The row's warm start failed and multi-start picked the point.
    pub branch_jump: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub config: SweepConfig,
    /// Row-major over `(axis1, axis2)`, kernels innermost.
    pub cells: Vec<SweepCell>,
}

fn cell_records(
    cfg: &SweepConfig,
    p1: f64,
    p2: f64,
    ab: Option<(f64, f64)>,
    branch_jump: bool,
) -> Result<Vec<SweepCell>> {
    let tau_bar = cfg.tau_bar_ms();
    let Some((a, b)) = ab else {
        return Ok(cfg
            .kernels
            .iter()
            .map(|&k| SweepCell {
                p1,
                p2,
                alpha: None,
                beta: None,
                region: "EquilibriumFailed".into(),
                zone: String::new(),
                kernel: k,
                tstar_ms: None,
                tminus_ms: None,
                tplus_ms: None,
                f_hz: None,
                band: None,
                max_residual: None,
                oscillating: None,
                equilibrium_failed: true,
                branch_jump,
            })
            .collect());
    };
    let region: RegionClass = classify(a, b)?;
    let searchable = region.delay_independent != DelayIndependent::UnstableSaddle;
    let mut out = Vec::with_capacity(cfg.kernels.len());
    for &k in &cfg.kernels {
        let set: Option<CriticalDelaySet> = if searchable {
            Some(critical_delays(k, a, b)?)
        } else {
            None
        };
        let mut cell = SweepCell {
            p1,
            p2,
            alpha: Some(a),
            beta: Some(b),
            region: region.label().to_string(),
            zone: zone_label(region.gamma_zone).to_string(),
            kernel: k,
            tstar_ms: None,
            tminus_ms: None,
            tplus_ms: None,
            f_hz: None,
            band: None,
            max_residual: None,
            oscillating: None,
            equilibrium_failed: false,
            branch_jump,
        };
        if let Some(set) = &set {
            if region.no_delay_stable {
                if let Some(first) = set.first() {
                    let t = first.tau_tilde * tau_bar;
                    let f = onset_frequency(first.omega, t);
                    cell.tstar_ms = Some(t);
                    cell.f_hz = Some(f);
                    cell.band = Some(band_classify(f));
                    cell.max_residual = Some(set.max_residual());
                }
                if let Some((lo, hi)) = set.window {
                    cell.tminus_ms = Some(lo * tau_bar);
                    cell.tplus_ms = Some(hi * tau_bar);
                }
            }
        }
        if let Some(t) = cfg.fixed_delay_ms {
            cell.oscillating = Some(match (&set, region.no_delay_stable) {
                (Some(s), true) => s.is_unstable_at(t / tau_bar),
                _ => true,
            });
        }
        out.push(cell);
    }
    Ok(out)
}

fn sup_dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn run_row(cfg: &SweepConfig, p1: f64, p2s: &[f64]) -> Result<Vec<SweepCell>> {
    let mut out = Vec::with_capacity(p2s.len() * cfg.kernels.len());
    match &cfg.base {
        SweepBase::Raw { .. } => {
            for &p2 in p2s {
                let (a, b) = if cfg.axis1.name == "alpha" { (p1, p2) } else { (p2, p1) };
                out.extend(cell_records(cfg, p1, p2, Some((a, b)), false)?);
            }
        }
        SweepBase::Network { network } => {
            let opts = SolverOpts::default();
            let mut prev: Option<[f64; 4]> = None;
            for &p2 in p2s {
                let mut net = network.clone();
                net.set_weight(&cfg.axis1.name, p1)?;
                net.set_weight(&cfg.axis2.name, p2)?;
                let mut jump = false;
                let eq: Option<Equilibrium> = match prev {
                    Some(x) => match solve_from(&net, x, &opts) {
                        Ok(e) => Some(e),
                        Err(_) => {
                            let e = equilibrium(&net, &opts, 0).ok();
                            if let Some(e) = &e {
                                jump = sup_dist(&e.x_star, &x) > 1e-6;
                            }
                            e
                        }
                    },
                    None => equilibrium(&net, &opts, 0).ok(),
                };
                if let Some(e) = &eq {
                    prev = Some(e.x_star);
                }
                out.extend(cell_records(cfg, p1, p2, eq.map(|e| (e.alpha, e.beta)), jump)?);
            }
        }
    }
    Ok(out)
}

fn run(cfg: &SweepConfig, parallel: bool) -> Result<SweepGrid> {
    cfg.validate()?;
    let v1 = cfg.axis1.values();
    let v2 = cfg.axis2.values();
    let rows: Vec<Result<Vec<SweepCell>>> = if parallel {
        v1.par_iter().map(|&p1| run_row(cfg, p1, &v2)).collect()
    } else {
        v1.iter().map(|&p1| run_row(cfg, p1, &v2)).collect()
    };
    let mut cells = Vec::with_capacity(v1.len() * v2.len() * cfg.kernels.len());
    for r in rows {
        cells.extend(r?);
    }
    Ok(SweepGrid {
        config: cfg.clone(),
        cells,
    })
}

/// Evaluate every cell, rows in parallel.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepGrid> {
    run(cfg, true)
}

/// Same as [`run_sweep`] on the calling thread.
pub fn run_sweep_serial(cfg: &SweepConfig) -> Result<SweepGrid> {
    run(cfg, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridFormat {
    Csv,
    Json,
}

impl std::str::FromStr for GridFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(GridFormat::Csv),
            "json" => Ok(GridFormat::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

pub const CSV_HEADER: &str =
    "p1,p2,alpha,beta,region,zone,kernel,tstar_ms,tminus_ms,tplus_ms,f_hz,band";

fn opt(v: Option<f64>) -> String {
    v.map(fmt_g9).unwrap_or_default()
}

impl SweepGrid {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let with_state = self.config.fixed_delay_ms.is_some();
        write!(out, "{CSV_HEADER}")?;
        if with_state {
            write!(out, ",oscillating")?;
        }
        writeln!(out)?;
        for c in &self.cells {
            write!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_g9(c.p1),
                fmt_g9(c.p2),
                opt(c.alpha),
                opt(c.beta),
                c.region,
                c.zone,
                c.kernel,
                opt(c.tstar_ms),
                opt(c.tminus_ms),
                opt(c.tplus_ms),
                opt(c.f_hz),
                c.band.map(|b| b.name()).unwrap_or(""),
            )?;
            if with_state {
                write!(out, ",{}", c.oscillating.map(|b| b.to_string()).unwrap_or_default())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn export_grid(grid: &SweepGrid, format: GridFormat, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    match format {
        GridFormat::Csv => grid.write_csv(&mut w)?,
        GridFormat::Json => w.write_all(grid.to_json().as_bytes())?,
    }
    w.flush()?;
    Ok(())
}
