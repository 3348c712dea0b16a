//! Stability regions in the `(alpha, beta)` plane, critical delays and
//! crossing directions for the Dirac and weak-Gamma kernels.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chareq::{char_partials, char_residual, dz_dtau};
use crate::equilibrium::{equilibrium, Equilibrium, SolverOpts};
use crate::error::{Error, Result};
use crate::model::{KernelKind, NetworkSpec};

/// Largest `|F(i omega)|` accepted for a reported crossing.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Ladder depth used when none is given.
pub const DEFAULT_K_MAX: usize = 8;

const SIGN_EPS: f64 = 1e-10;

/// Stability without delay: `alpha < 2` and `alpha - 1 < beta < (alpha - 4)^2 / 4`.
pub fn no_delay_stable(alpha: f64, beta: f64) -> bool {
    alpha < 2.0 && alpha - 1.0 < beta && beta < (alpha - 4.0).powi(2) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DelayIndependent {
    /// `|alpha| - 1 < beta < 1`: stable for every kernel and delay.
    StableR,
    /// `beta < alpha - 1`: a positive real root exists for every delay.
    UnstableSaddle,
    Conditional,
}

pub fn delay_independent_class(alpha: f64, beta: f64) -> DelayIndependent {
    if beta < alpha - 1.0 {
        DelayIndependent::UnstableSaddle
    } else if alpha.abs() - 1.0 < beta && beta < 1.0 {
        DelayIndependent::StableR
    } else {
        DelayIndependent::Conditional
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SaddleNode {
    Bifurcates,
    Degenerate,
}

/// Whether crossing the line `beta = alpha - 1` at `alpha` is a saddle-node.
pub fn saddle_node_check(alpha: f64) -> SaddleNode {
    if (alpha - 2.0).abs() <= 1e-12 {
        SaddleNode::Degenerate
    } else {
        SaddleNode::Bifurcates
    }
}

/// `dz/dbeta` of the zero root on the saddle-node line.
pub fn saddle_node_slope(alpha: f64, tau_tilde: f64) -> f64 {
    tau_tilde / (2.0 * (tau_tilde + 1.0) * (alpha - 2.0))
}

/// A positive real root of `F` when `beta < alpha - 1`, found by bisection
/// on `(0, 10)`.
pub fn saddle_positive_root(alpha: f64, beta: f64, tau_tilde: f64, kind: KernelKind) -> Result<f64> {
    let f = |x: f64| -> Result<f64> {
        Ok(char_residual(alpha, beta, tau_tilde, Complex64::new(x, 0.0), kind)?.re)
    };
    let (mut lo, mut hi) = (0.0, 10.0);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::ZoneMismatch {
            alpha,
            beta,
            reason: "no sign change of F on (0, 10)".into(),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Case1` when `beta >= alpha^2 / 4` (complex `Q` roots), else `Case2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HopfCase {
    Case1,
    Case2,
}

pub fn hopf_case(alpha: f64, beta: f64) -> HopfCase {
    if beta >= alpha * alpha / 4.0 {
        HopfCase::Case1
    } else {
        HopfCase::Case2
    }
}

/// Real roots `(r1, r2)`, `r1 <= r2`, of `x^2 - alpha x + beta` (Case 2 only).
fn real_q_roots(alpha: f64, beta: f64) -> (f64, f64) {
    let d = (alpha * alpha - 4.0 * beta).max(0.0).sqrt();
    let r1 = 0.5 * (alpha - d);
    // r2 via the product to avoid cancellation
    let r2 = if r1 != 0.0 { beta / r1 } else { 0.5 * (alpha + d) };
    (r1.min(r2), r1.max(r2))
}

/// Weak-Gamma zones of the `(alpha, beta)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GammaZone {
    StableAllDelays,
    /// Above `beta = alpha^2/4`, one crossing pair.
    Gray,
    /// Above `beta = alpha^2/4`, two crossing pairs.
    Pink,
    /// Below `beta = alpha^2/4`, outside the stable band.
    Cyan,
    /// Unstable already at zero delay; not searched.
    UnstableWithoutDelay,
}

/// `2(8 - 8 beta^(1/4) + sqrt(beta))`, the value of the Case 1 curve at `u2`.
pub fn gamma_f_at_u2(beta: f64) -> f64 {
    2.0 * (8.0 - 8.0 * beta.powf(0.25) + beta.sqrt())
}

/// `u2 = sqrt(beta^(1/4) - 1)`.
pub fn gamma_u2(beta: f64) -> f64 {
    (beta.powf(0.25) - 1.0).sqrt()
}

/// Case 1 weak-Gamma crossing curve: `alpha = f(omega)` on
/// `0 <= omega <= sqrt(sqrt(beta) - 1)`.
pub fn gamma_case1_f(beta: f64, omega: f64) -> f64 {
    let sb = beta.sqrt();
    let w2 = omega * omega;
    let g = gamma_case1_g(beta, omega);
    -(sb * (-2.0 + 4.0 / (1.0 + w2)) + 4.0 * (-1.0 + w2 + 2.0 * omega * g))
}

/// `g = sqrt(sqrt(beta)/(1 + omega^2) - 1)`; Case 1 delay is `omega / g`.
pub fn gamma_case1_g(beta: f64, omega: f64) -> f64 {
    (beta.sqrt() / (1.0 + omega * omega) - 1.0).max(0.0).sqrt()
}

pub fn gamma_zone_classify(alpha: f64, beta: f64) -> Result<GammaZone> {
    if beta < alpha - 1.0 {
        return Err(Error::ZoneMismatch {
            alpha,
            beta,
            reason: "saddle-unstable (beta < alpha - 1)".into(),
        });
    }
    if !no_delay_stable(alpha, beta) {
        return Ok(GammaZone::UnstableWithoutDelay);
    }
    let zone = match hopf_case(alpha, beta) {
        HopfCase::Case2 => {
            let (r1, _) = real_q_roots(alpha, beta);
            if r1 < -4.0 {
                GammaZone::Cyan
            } else {
                GammaZone::StableAllDelays
            }
        }
        HopfCase::Case1 => {
            if beta <= 1.0 {
                GammaZone::StableAllDelays
            } else if alpha < gamma_f_at_u2(beta) {
                if beta > 16.0 {
                    GammaZone::Pink
                } else {
                    GammaZone::StableAllDelays
                }
            } else if alpha > gamma_f_at_u2(beta) {
                GammaZone::Gray
            } else {
                GammaZone::StableAllDelays
            }
        }
    };
    Ok(zone)
}

/// One purely imaginary crossing `z = i omega` at scaled delay `tau_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub omega: f64,
    pub tau_tilde: f64,
    /// Sign of `Re dz/dtt`: +1 when the pair moves into the right half plane.
    pub transversality: i8,
    pub case: HopfCase,
    /// `|F(i omega)|` after polishing.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalDelaySet {
    pub kernel: KernelKind,
    pub alpha: f64,
    pub beta: f64,
    /// Sorted by `tau_tilde`.
    pub entries: Vec<CriticalPoint>,
    /// `(tt-, tt+)` when stability is regained beyond the last crossing.
    pub window: Option<(f64, f64)>,
    /// True when the search proves there is no crossing.
    pub stable_all_delays: bool,
    /// True when `(alpha, beta)` sits on a zone threshold (`beta` = 16 or 81).
    pub on_boundary: bool,
}

impl CriticalDelaySet {
    fn empty(kernel: KernelKind, alpha: f64, beta: f64, stable: bool) -> Self {
        Self {
            kernel,
            alpha,
            beta,
            entries: Vec::new(),
            window: None,
            stable_all_delays: stable,
            on_boundary: false,
        }
    }

    /// First crossing, if any.
    pub fn first(&self) -> Option<&CriticalPoint> {
        self.entries.first()
    }

    /// Number of roots in the right half plane at scaled delay `tt`, for a
    /// point stable at zero delay.
    pub fn unstable_roots_at(&self, tau_tilde: f64) -> i32 {
        self.entries
            .iter()
            .filter(|e| e.tau_tilde < tau_tilde)
            .map(|e| 2 * e.transversality as i32)
            .sum()
    }

    pub fn is_unstable_at(&self, tau_tilde: f64) -> bool {
        self.unstable_roots_at(tau_tilde) > 0
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.residual))
    }
}

/// Newton on `F(i omega; tt) = 0` in the real unknowns `(omega, tt)`.
fn polish(alpha: f64, beta: f64, kind: KernelKind, omega: f64, tt: f64) -> (f64, f64, f64) {
    let res = |w: f64, t: f64| {
        char_residual(alpha, beta, t, Complex64::new(0.0, w), kind)
            .map(|c| c.norm())
            .unwrap_or(f64::INFINITY)
    };
    let (mut w, mut t) = (omega, tt);
    let mut r = res(w, t);
    for _ in 0..2 {
        let z = Complex64::new(0.0, w);
        let Ok(f) = char_residual(alpha, beta, t, z, kind) else { break };
        let Ok((fz, ft)) = char_partials(alpha, t, z, kind) else { break };
        let fw = Complex64::new(0.0, 1.0) * fz;
        let det = fw.re * ft.im - ft.re * fw.im;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dw = (-f.re * ft.im + ft.re * f.im) / det;
        let dt = (-fw.re * f.im + f.re * fw.im) / det;
        let (nw, nt) = (w + dw, t + dt);
        if nt <= 0.0 || nw <= 0.0 {
            break;
        }
        let nr = res(nw, nt);
        if nr < r {
            w = nw;
            t = nt;
            r = nr;
        } else {
            break;
        }
    }
    (w, t, r)
}

fn make_point(
    alpha: f64,
    beta: f64,
    kind: KernelKind,
    omega: f64,
    tt: f64,
    case: HopfCase,
) -> Result<CriticalPoint> {
    let (w, t, r) = polish(alpha, beta, kind, omega, tt);
    let transversality = transversality_sign(alpha, beta, kind, w, t)?;
    Ok(CriticalPoint {
        omega: w,
        tau_tilde: t,
        transversality,
        case,
        residual: r,
    })
}

fn sort_entries(v: &mut [CriticalPoint]) {
    v.sort_by(|a, b| a.tau_tilde.total_cmp(&b.tau_tilde));
}

/// Crossings of the Dirac kernel for ladder indices `0..=k_max`.
pub fn dirac_critical_delays(alpha: f64, beta: f64, k_max: usize) -> Result<CriticalDelaySet> {
    if beta < alpha - 1.0 {
        return Err(Error::ZoneMismatch {
            alpha,
            beta,
            reason: "saddle-unstable (beta < alpha - 1)".into(),
        });
    }
    let kind = KernelKind::Dirac;
    let mut raw: Vec<(f64, f64, HopfCase)> = Vec::new();
    match hopf_case(alpha, beta) {
        HopfCase::Case1 => {
            if beta > 1.0 {
                let m = (beta.sqrt() - 1.0).sqrt();
                let psi = (alpha / (2.0 * beta.sqrt())).clamp(-1.0, 1.0).acos();
                let shift = m.atan();
                for k in 0..=k_max {
                    let base = k as f64 * PI - shift;
                    for w in [base - 0.5 * psi, base + 0.5 * psi] {
                        if w > 0.0 {
                            raw.push((w, w / m, HopfCase::Case1));
                        }
                    }
                }
            }
        }
        HopfCase::Case2 => {
            let (r1, r2) = real_q_roots(alpha, beta);
            for r in [r1, r2] {
                if r < -1.0 {
                    let w0 = (-1.0 / r).sqrt().asin();
                    for k in 0..=k_max {
                        let w = w0 + k as f64 * PI;
                        raw.push((w, w * w.tan(), HopfCase::Case2));
                    }
                }
            }
        }
    }
    let mut entries = raw
        .into_iter()
        .map(|(w, t, c)| make_point(alpha, beta, kind, w, t, c))
        .collect::<Result<Vec<_>>>()?;
    sort_entries(&mut entries);
    let stable = entries.is_empty();
    Ok(CriticalDelaySet {
        entries,
        stable_all_delays: stable,
        ..CriticalDelaySet::empty(kind, alpha, beta, stable)
    })
}

fn complex_sqrt_real(x: f64) -> Option<f64> {
    if x >= 0.0 {
        Some(x.sqrt())
    } else if x > -1e-12 {
        Some(0.0)
    } else {
        None
    }
}

/// Case 1 crossing frequencies on the curve `alpha = f(omega)`.
///
/// Returns `(omega-, omega+)` and, when present, `(v-, v+)`.
fn gamma_case1_roots(alpha: f64, beta: f64) -> Result<(f64, f64, Option<(f64, f64)>)> {
    let sb = beta.sqrt();
    let q = (alpha + 2.0 * sb).max(0.0).sqrt();
    let mismatch = |reason: &str| Error::ZoneMismatch {
        alpha,
        beta,
        reason: reason.into(),
    };
    let pair = |sg: f64| -> Option<(f64, f64)> {
        let inner = (alpha - 2.0 * sb) * (16.0 + alpha + sg * 8.0 * q - 2.0 * sb);
        let root = complex_sqrt_real(inner)?;
        let base = -8.0 - alpha - sg * 4.0 * q + 2.0 * sb;
        let lo = complex_sqrt_real(base - root)?;
        let hi = complex_sqrt_real(base + root)?;
        Some((lo / 8f64.sqrt(), hi / 8f64.sqrt()))
    };
    let (wm, wp) = pair(-1.0).ok_or_else(|| mismatch("no real outer Case 1 roots"))?;
    Ok((wm, wp, pair(1.0)))
}

/// Crossings of the weak-Gamma kernel in the Gray, Pink or Cyan zones.
pub fn gamma_critical_window(alpha: f64, beta: f64) -> Result<CriticalDelaySet> {
    let zone = gamma_zone_classify(alpha, beta)?;
    let kind = KernelKind::WeakGamma;
    let mut raw: Vec<(f64, f64, HopfCase)> = Vec::new();
    match zone {
        GammaZone::StableAllDelays | GammaZone::UnstableWithoutDelay => {
            return Err(Error::ZoneMismatch {
                alpha,
                beta,
                reason: format!("weak-Gamma zone {zone:?} has no Hopf window"),
            });
        }
        GammaZone::Gray | GammaZone::Pink => {
            let (wm, wp, inner) = gamma_case1_roots(alpha, beta)?;
            let mut ws = vec![wm, wp];
            if zone == GammaZone::Pink {
                let (vm, vp) = inner.ok_or_else(|| Error::ZoneMismatch {
                    alpha,
                    beta,
                    reason: "no real inner Case 1 roots".into(),
                })?;
                ws.extend([vm, vp]);
            }
            for w in ws {
                raw.push((w, w / gamma_case1_g(beta, w), HopfCase::Case1));
            }
        }
        GammaZone::Cyan => {
            let (r1, r2) = real_q_roots(alpha, beta);
            for r in [r1, r2] {
                if r < -4.0 {
                    let s = (-1.0 / r).sqrt();
                    let d = (1.0 - 4.0 * s * s).sqrt();
                    // (1 - d)/(2s) written without cancellation
                    let wm = 2.0 * s / (1.0 + d);
                    let wp = (1.0 + d) / (2.0 * s);
                    raw.push((wm, wm * wm, HopfCase::Case2));
                    raw.push((wp, wp * wp, HopfCase::Case2));
                }
            }
        }
    }
    let mut entries = raw
        .into_iter()
        .map(|(w, t, c)| make_point(alpha, beta, kind, w, t, c))
        .collect::<Result<Vec<_>>>()?;
    sort_entries(&mut entries);
    let window = Some((entries[0].tau_tilde, entries[entries.len() - 1].tau_tilde));
    let on_boundary = (beta - 16.0).abs() < 1e-12 || (beta - 81.0).abs() < 1e-12;
    Ok(CriticalDelaySet {
        kernel: kind,
        alpha,
        beta,
        entries,
        window,
        stable_all_delays: false,
        on_boundary,
    })
}

/// Weak-Gamma crossings for any point: empty when no Hopf window exists.
pub fn gamma_critical_delays(alpha: f64, beta: f64) -> Result<CriticalDelaySet> {
    match gamma_zone_classify(alpha, beta)? {
        GammaZone::StableAllDelays => Ok(CriticalDelaySet::empty(
            KernelKind::WeakGamma,
            alpha,
            beta,
            true,
        )),
        GammaZone::UnstableWithoutDelay => Ok(CriticalDelaySet::empty(
            KernelKind::WeakGamma,
            alpha,
            beta,
            false,
        )),
        _ => gamma_critical_window(alpha, beta),
    }
}

/// Dispatch on kernel kind.
pub fn critical_delays(kind: KernelKind, alpha: f64, beta: f64) -> Result<CriticalDelaySet> {
    match kind {
        KernelKind::Dirac => dirac_critical_delays(alpha, beta, DEFAULT_K_MAX),
        KernelKind::WeakGamma => gamma_critical_delays(alpha, beta),
    }
}

/// Sign of `Re dz/dtt` at a crossing.
///
/// Dirac uses `omega^2 / (tt |1 + tt + i omega|^2)`; weak Gamma uses
/// `1 - omega^2` (Case 2) or `1 - omega / g(omega)` (Case 1).
pub fn transversality_sign(
    alpha: f64,
    beta: f64,
    kind: KernelKind,
    omega: f64,
    tau_tilde: f64,
) -> Result<i8> {
    let value = match kind {
        KernelKind::Dirac => dz_dtau(tau_tilde, Complex64::new(0.0, omega), kind)?.re,
        KernelKind::WeakGamma => match hopf_case(alpha, beta) {
            HopfCase::Case2 => 1.0 - omega * omega,
            HopfCase::Case1 => 1.0 - omega / gamma_case1_g(beta, omega),
        },
    };
    if !(value.abs() >= SIGN_EPS) {
        return Err(Error::OnSignBoundary {
            omega,
            value: value.abs(),
        });
    }
    Ok(if value > 0.0 { 1 } else { -1 })
}

/// Per-kernel qualitative outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelClass {
    StableAllDelays,
    /// Unstable only for delays inside a bounded window.
    HopfWindow,
    /// Unstable for all delays past the first crossing.
    HopfPersistent,
    UnstableWithoutDelay,
}

fn kernel_class(set: &CriticalDelaySet, no_delay: bool) -> KernelClass {
    if !no_delay {
        return KernelClass::UnstableWithoutDelay;
    }
    if set.entries.is_empty() {
        return KernelClass::StableAllDelays;
    }
    let last = set.entries.last().unwrap().tau_tilde;
    if set.unstable_roots_at(last * (1.0 + 1e-9) + 1e-12) > 0 {
        KernelClass::HopfPersistent
    } else {
        KernelClass::HopfWindow
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionClass {
    pub no_delay_stable: bool,
    pub delay_independent: DelayIndependent,
    pub dirac: KernelClass,
    pub weak_gamma: KernelClass,
    pub gamma_zone: Option<GammaZone>,
}

/// Full classification of a point.
pub fn classify(alpha: f64, beta: f64) -> Result<RegionClass> {
    let s = no_delay_stable(alpha, beta);
    let di = delay_independent_class(alpha, beta);
    if di == DelayIndependent::UnstableSaddle {
        return Ok(RegionClass {
            no_delay_stable: false,
            delay_independent: di,
            dirac: KernelClass::UnstableWithoutDelay,
            weak_gamma: KernelClass::UnstableWithoutDelay,
            gamma_zone: None,
        });
    }
    let dirac = dirac_critical_delays(alpha, beta, DEFAULT_K_MAX)?;
    let gamma = gamma_critical_delays(alpha, beta)?;
    Ok(RegionClass {
        no_delay_stable: s,
        delay_independent: di,
        dirac: kernel_class(&dirac, s),
        weak_gamma: kernel_class(&gamma, s),
        gamma_zone: Some(gamma_zone_classify(alpha, beta)?),
    })
}

impl RegionClass {
    pub fn kernel(&self, kind: KernelKind) -> KernelClass {
        match kind {
            KernelKind::Dirac => self.dirac,
            KernelKind::WeakGamma => self.weak_gamma,
        }
    }

    /// Short label for tabular output.
    pub fn label(&self) -> &'static str {
        match self.delay_independent {
            DelayIndependent::StableR => "StableR",
            DelayIndependent::UnstableSaddle => "UnstableSaddle",
            DelayIndependent::Conditional if !self.no_delay_stable => "UnstableNoDelay",
            DelayIndependent::Conditional => "Conditional",
        }
    }
}

pub fn zone_label(zone: Option<GammaZone>) -> &'static str {
    match zone {
        None => "",
        Some(GammaZone::StableAllDelays) => "StableAllDelays",
        Some(GammaZone::Gray) => "Gray",
        Some(GammaZone::Pink) => "Pink",
        Some(GammaZone::Cyan) => "Cyan",
        Some(GammaZone::UnstableWithoutDelay) => "UnstableNoDelay",
    }
}

/// Onset frequency in Hz of a scaled root `omega` at delay `t_ms`.
pub fn onset_hz(omega: f64, t_ms: f64) -> f64 {
    1000.0 * omega / (2.0 * PI * t_ms)
}

/// One crossing in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalCrossing {
    pub omega: f64,
    pub tau_tilde: f64,
    #[serde(rename = "T_ms")]
    pub t_ms: f64,
    pub f_hz: f64,
    pub transversality: i8,
    pub case: HopfCase,
}

/// Critical delays of a circuit at its equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalDelayReport {
    pub alpha: f64,
    pub beta: f64,
    pub kernel: KernelKind,
    pub zone: String,
    pub region: String,
    pub entries: Vec<PhysicalCrossing>,
    pub window_ms: Option<(f64, f64)>,
    pub equilibrium: Equilibrium,
}

impl CriticalDelayReport {
    pub fn first(&self) -> Option<&PhysicalCrossing> {
        self.entries.first()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scaled results converted to ms and Hz with `tau_bar`.
pub fn to_physical(
    set: &CriticalDelaySet,
    tau_bar_ms: f64,
) -> (Vec<PhysicalCrossing>, Option<(f64, f64)>) {
    let entries = set
        .entries
        .iter()
        .map(|e| {
            let t_ms = e.tau_tilde * tau_bar_ms;
            PhysicalCrossing {
                omega: e.omega,
                tau_tilde: e.tau_tilde,
                t_ms,
                f_hz: onset_hz(e.omega, t_ms),
                transversality: e.transversality,
                case: e.case,
            }
        })
        .collect();
    let window = set.window.map(|(a, b)| (a * tau_bar_ms, b * tau_bar_ms));
    (entries, window)
}

/// Equilibrium, coefficients and critical delays of `net` for its kernel.
pub fn physical_critical_delays(net: &NetworkSpec) -> Result<CriticalDelayReport> {
    physical_critical_delays_at(net, 0)
}

/// As [`physical_critical_delays`] for the equilibrium at `index`.
pub fn physical_critical_delays_at(net: &NetworkSpec, index: usize) -> Result<CriticalDelayReport> {
    let eq = equilibrium(net, &SolverOpts::default(), index)?;
    report_for(net, eq)
}

pub(crate) fn report_for(net: &NetworkSpec, eq: Equilibrium) -> Result<CriticalDelayReport> {
    let (a, b) = (eq.alpha, eq.beta);
    let kind = net.kernel.kind;
    let region = classify(a, b)?;
    let set = if region.delay_independent == DelayIndependent::UnstableSaddle {
        CriticalDelaySet::empty(kind, a, b, false)
    } else {
        critical_delays(kind, a, b)?
    };
    let (entries, window_ms) = to_physical(&set, net.tau_bar_ms);
    Ok(CriticalDelayReport {
        alpha: a,
        beta: b,
        kernel: kind,
        zone: zone_label(region.gamma_zone).to_string(),
        region: region.label().to_string(),
        entries,
        window_ms,
        equilibrium: eq,
    })
}
