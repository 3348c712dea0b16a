use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use wcdelay::equilibrium::{equilibrium, find_equilibria, SolverOpts};
use wcdelay::format::fmt_g9;
use wcdelay::model::{preset, KernelKind, NetworkSpec};
use wcdelay::simulate::{classify_longterm, simulate, simulate_weak_gamma, Trajectory};
use wcdelay::spectrum::{dominant_frequency, SpectrumMethod, SpectrumReport};
use wcdelay::stability::{classify, physical_critical_delays_at, zone_label};
use wcdelay::sweep::{run_sweep, Axis, GridFormat, SweepBase, SweepConfig};
use wcdelay::{Error, Result};

#[derive(Parser)]
#[command(name = "wcdelay", version, about = "Delay-induced oscillations in coupled Wilson-Cowan pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the equilibria of a circuit.
    Equilibrium(Common),
    /// Reduced coefficients and region of the selected equilibrium.
    Coeffs(Common),
    /// Critical delays for the circuit's kernel.
    CriticalDelay(Common),
    /// Two-parameter grid of regions, critical delays and bands.
    Sweep(SweepArgs),
    /// Integrate the nonlinear circuit.
    Simulate(SimArgs),
    /// Dominant or onset frequency and its band.
    Spectrum(SpectrumArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Dirac,
    WeakGamma,
}

impl From<KernelArg> for KernelKind {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Dirac => KernelKind::Dirac,
            KernelArg::WeakGamma => KernelKind::WeakGamma,
        }
    }
}

#[derive(Args, Clone)]
struct Common {
    /// Circuit configuration file (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset: wang-baseline, pfc-bla-a, pfc-bla-b.
    #[arg(long)]
    preset: Option<String>,
    /// Override the delay kernel family.
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    /// Weight override NAME=VALUE, repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    /// Equilibrium index in order of increasing norm.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// First axis as name:min:max:steps.
    #[arg(long)]
    axis1: String,
    /// Second axis as name:min:max:steps.
    #[arg(long)]
    axis2: String,
    /// Sweep the (alpha, beta) plane directly; delays are reported scaled by tau_bar.
    #[arg(long)]
    raw: bool,
    /// Report whether each cell oscillates at this delay (ms).
    #[arg(long)]
    fixed_delay: Option<f64>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    common: Common,
    /// Mean delay T in ms; defaults to the circuit's kernel delay.
    #[arg(long = "T")]
    t_ms: Option<f64>,
    /// Horizon in ms; defaults to 20 tau_bar or 10 T, whichever is longer.
    #[arg(long)]
    horizon: Option<f64>,
    /// Step in ms; defaults to T/50 (Dirac) or min(tau_bar, T)/50 (weak Gamma).
    #[arg(long)]
    dt: Option<f64>,
    /// Initial state: 4 values, or 8 (X then Y) for the weak-Gamma kernel.
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    init: Vec<f64>,
    /// Include the convolution variables in CSV output.
    #[arg(long)]
    with_y: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// `analytic` uses the first critical crossing; `fft` simulates.
    #[arg(long, value_enum, default_value = "analytic")]
    method: MethodArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fft,
    Analytic,
}

fn load(c: &Common) -> Result<NetworkSpec> {
    let mut net = match (&c.config, &c.preset) {
        (Some(path), _) => NetworkSpec::from_json(&std::fs::read_to_string(path)?)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(Error::Config("one of --config or --preset is required".into())),
    };
    for s in &c.set {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects NAME=VALUE (got `{s}`)")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad value in --set `{s}`")))?;
        net.set_weight(name.trim(), value)?;
    }
    if let Some(k) = c.kernel {
        let tau = net.kernel.tau_ms;
        net = net.with_kernel(k.into(), tau);
    }
    net.validate()?;
    Ok(net)
}

fn emit(c: &Common, text: &str) -> Result<()> {
    match &c.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value") + "\n"
}

fn cmd_equilibrium(c: &Common) -> Result<String> {
    let net = load(c)?;
    let all = find_equilibria(&net, &SolverOpts::default())?;
    Ok(match c.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&serde_json::to_value(&all)?),
        Format::Csv => {
            let mut s = String::from("index,E1,I1,E2,I2,residual,alpha,beta\n");
            for (i, e) in all.iter().enumerate() {
                let x: Vec<String> = e.x_star.iter().map(|v| fmt_g9(*v)).collect();
                s += &format!(
                    "{i},{},{},{},{}\n",
                    x.join(","),
                    fmt_g9(e.residual),
                    fmt_g9(e.alpha),
                    fmt_g9(e.beta)
                );
            }
            s
        }
    })
}

fn cmd_coeffs(c: &Common) -> Result<String> {
    let net = load(c)?;
    let eq = equilibrium(&net, &SolverOpts::default(), c.index)?;
    let class = classify(eq.alpha, eq.beta)?;
    let zone = zone_label(class.gamma_zone);
    Ok(match c.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&json!({
            "alpha": eq.alpha,
            "beta": eq.beta,
            "phi": eq.phi,
            "x_star": eq.x_star,
            "region": class.label(),
            "zone": zone,
            "no_delay_stable": class.no_delay_stable,
            "dirac": class.dirac,
            "weak_gamma": class.weak_gamma,
        })),
        Format::Csv => format!(
            "alpha,beta,region,zone\n{},{},{},{}\n",
            fmt_g9(eq.alpha),
            fmt_g9(eq.beta),
            class.label(),
            zone
        ),
    })
}

fn cmd_critical(c: &Common) -> Result<String> {
    let net = load(c)?;
    let rep = physical_critical_delays_at(&net, c.index)?;
    Ok(match c.format.unwrap_or(Format::Json) {
        Format::Json => rep.to_json() + "\n",
        Format::Csv => {
            let mut s = String::from("omega,tau_tilde,T_ms,f_hz,transversality,case\n");
            for e in &rep.entries {
                s += &format!(
                    "{},{},{},{},{},{:?}\n",
                    fmt_g9(e.omega),
                    fmt_g9(e.tau_tilde),
                    fmt_g9(e.t_ms),
                    fmt_g9(e.f_hz),
                    e.transversality,
                    e.case
                );
            }
            s
        }
    })
}

fn cmd_sweep(a: &SweepArgs) -> Result<String> {
    let base = if a.raw {
        let tau_bar_ms = match (&a.common.config, &a.common.preset) {
            (None, None) => 1.0,
            _ => load(&a.common)?.tau_bar_ms,
        };
        SweepBase::Raw { tau_bar_ms }
    } else {
        SweepBase::Network {
            network: load(&a.common)?,
        }
    };
    let kernels = match a.common.kernel {
        Some(k) => vec![k.into()],
        None => vec![KernelKind::Dirac, KernelKind::WeakGamma],
    };
    let cfg = SweepConfig {
        base,
        axis1: Axis::parse(&a.axis1)?,
        axis2: Axis::parse(&a.axis2)?,
        kernels,
        fixed_delay_ms: a.fixed_delay,
    };
    let grid = run_sweep(&cfg)?;
    let format = match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => GridFormat::Csv,
        Format::Json => GridFormat::Json,
    };
    Ok(match format {
        GridFormat::Csv => grid.to_csv_string(),
        GridFormat::Json => grid.to_json() + "\n",
    })
}

fn run_sim(a: &SimArgs) -> Result<(NetworkSpec, Trajectory)> {
    let net = load(&a.common)?;
    let t = a.t_ms.unwrap_or(net.kernel.tau_ms);
    let dt = a.dt.unwrap_or(match net.kernel.kind {
        KernelKind::Dirac => t / 50.0,
        KernelKind::WeakGamma => net.tau_bar_ms.min(t) / 50.0,
    });
    let horizon = a.horizon.unwrap_or((20.0 * net.tau_bar_ms).max(10.0 * t));
    let traj = match a.init.len() {
        0 => simulate(&net, t, [0.0; 4], horizon, dt)?,
        4 => simulate(&net, t, std::array::from_fn(|j| a.init[j]), horizon, dt)?,
        8 if net.kernel.kind == KernelKind::WeakGamma => {
            simulate_weak_gamma(&net, t, std::array::from_fn(|j| a.init[j]), horizon, dt)?
        }
        n => {
            return Err(Error::Config(format!(
                "--init takes 4 values, or 8 for the weak-Gamma kernel (got {n})"
            )))
        }
    };
    Ok((net, traj))
}

fn cmd_simulate(a: &SimArgs) -> Result<String> {
    let (net, traj) = run_sim(a)?;
    Ok(match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf, a.with_y)?;
            String::from_utf8(buf).expect("utf-8 csv")
        }
        Format::Json => {
            let eq = equilibrium(&net, &SolverOpts::default(), a.common.index)?;
            let long = classify_longterm(&traj, &eq.x_star);
            pretty(&json!({
                "meta": traj.meta,
                "classification": long.label(),
                "detail": long,
                "t": traj.t,
                "x": traj.x,
                "y": if a.with_y { serde_json::to_value(&traj.y)? } else { serde_json::Value::Null },
            }))
        }
    })
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<String> {
    let report = match a.method {
        MethodArg::Analytic => {
            let net = load(&a.sim.common)?;
            let rep = physical_critical_delays_at(&net, a.sim.common.index)?;
            let first = rep.first().ok_or(Error::NoPeak)?;
            SpectrumReport::new(first.f_hz, SpectrumMethod::Analytic)
        }
        MethodArg::Fft => {
            let (_, traj) = run_sim(&a.sim)?;
            SpectrumReport::new(dominant_frequency(&traj)?, SpectrumMethod::Fft)
        }
    };
    Ok(match a.sim.common.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json() + "\n",
        Format::Csv => format!(
            "f_hz,band,method\n{},{},{}\n",
            fmt_g9(report.f_hz),
            report.band,
            match report.method {
                SpectrumMethod::Fft => "fft",
                SpectrumMethod::Analytic => "analytic",
            }
        ),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Equilibrium(c) => (c, cmd_equilibrium(c)),
        Command::Coeffs(c) => (c, cmd_coeffs(c)),
        Command::CriticalDelay(c) => (c, cmd_critical(c)),
        Command::Sweep(a) => (&a.common, cmd_sweep(a)),
        Command::Simulate(a) => (&a.common, cmd_simulate(a)),
        Command::Spectrum(a) => (&a.sim.common, cmd_spectrum(a)),
    };
    match result.and_then(|text| emit(common, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
