//! Kernel transforms and the reduced characteristic function
//! `F(z) = Q(z)^2 - alpha Q(z) + beta`, `Q(z) = ((z + tt) / (tt H(z)))^2`.
//!
//! `z` is the eigenvalue scaled by the mean delay `T` and `tt = T / tau_bar`,
//! so a root `z = i omega` oscillates at `omega / T` rad per unit time.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{KernelKind, WeightMatrix};

/// `H(i omega) = rho exp(-i theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTransform {
    pub rho: f64,
    pub theta: f64,
}

pub fn kernel_transform(kind: KernelKind, omega: f64) -> KernelTransform {
    match kind {
        KernelKind::Dirac => KernelTransform {
            rho: 1.0,
            theta: omega,
        },
        KernelKind::WeakGamma => KernelTransform {
            rho: 1.0 / (1.0 + omega * omega).sqrt(),
            theta: omega.atan(),
        },
    }
}

/// `H(z)`.
pub fn kernel_hat(kind: KernelKind, z: Complex64) -> Result<Complex64> {
    match kind {
        KernelKind::Dirac => Ok((-z).exp()),
        KernelKind::WeakGamma => {
            check_pole(kind, z)?;
            Ok(Complex64::new(1.0, 0.0) / (1.0 + z))
        }
    }
}

/// `1 / H(z)`.
fn kernel_hat_inv(kind: KernelKind, z: Complex64) -> Complex64 {
    match kind {
        KernelKind::Dirac => z.exp(),
        KernelKind::WeakGamma => 1.0 + z,
    }
}

/// `H'(z) / H(z)`.
pub fn kernel_log_deriv(kind: KernelKind, z: Complex64) -> Result<Complex64> {
    match kind {
        KernelKind::Dirac => Ok(Complex64::new(-1.0, 0.0)),
        KernelKind::WeakGamma => {
            check_pole(kind, z)?;
            Ok(-1.0 / (1.0 + z))
        }
    }
}

fn check_pole(kind: KernelKind, z: Complex64) -> Result<()> {
    if kind == KernelKind::WeakGamma && z == Complex64::new(-1.0, 0.0) {
        return Err(Error::KernelSingularity { re: z.re, im: z.im });
    }
    Ok(())
}

fn check_tau(tau_tilde: f64) -> Result<()> {
    if tau_tilde > 0.0 && tau_tilde.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "scaled delay must be positive (got {tau_tilde})"
        )))
    }
}

/// `w = (z + tt) / (tt H(z))`, so that `Q = w^2`.
fn w_value(tau_tilde: f64, z: Complex64, kind: KernelKind) -> Complex64 {
    (z + tau_tilde) / tau_tilde * kernel_hat_inv(kind, z)
}

pub fn q_value(tau_tilde: f64, z: Complex64, kind: KernelKind) -> Result<Complex64> {
    check_tau(tau_tilde)?;
    check_pole(kind, z)?;
    let w = w_value(tau_tilde, z, kind);
    Ok(w * w)
}

pub fn char_residual(
    alpha: f64,
    beta: f64,
    tau_tilde: f64,
    z: Complex64,
    kind: KernelKind,
) -> Result<Complex64> {
    let q = q_value(tau_tilde, z, kind)?;
    Ok(q * q - alpha * q + beta)
}

/// Partial derivatives `(dF/dz, dF/dtt)` at `(z, tt)`.
pub fn char_partials(
    alpha: f64,
    tau_tilde: f64,
    z: Complex64,
    kind: KernelKind,
) -> Result<(Complex64, Complex64)> {
    check_tau(tau_tilde)?;
    let w = w_value(tau_tilde, z, kind);
    let q = w * w;
    let f_q = 2.0 * q - alpha;
    let w_z = w * (1.0 / (z + tau_tilde) - kernel_log_deriv(kind, z)?);
    let w_t = w * (-z / (tau_tilde * (z + tau_tilde)));
    Ok((f_q * 2.0 * w * w_z, f_q * 2.0 * w * w_t))
}

/// Root velocity `dz/dtt` along a branch with `Q` held at a fixed root of
/// `x^2 - alpha x + beta`.
pub fn dz_dtau(tau_tilde: f64, z: Complex64, kind: KernelKind) -> Result<Complex64> {
    check_tau(tau_tilde)?;
    let denom = 1.0 - (z + tau_tilde) * kernel_log_deriv(kind, z)?;
    Ok(z / (tau_tilde * denom))
}

/// `det( (z + tt)/tt I - H(z) diag(phi) C )`, the unreduced characteristic
/// function in the same scaled variable. Equals `H(z)^4 F(z)`.
pub fn characteristic_determinant(
    weights: &WeightMatrix,
    phi: &[f64; 4],
    tau_tilde: f64,
    z: Complex64,
    kind: KernelKind,
) -> Result<Complex64> {
    check_tau(tau_tilde)?;
    let h = kernel_hat(kind, z)?;
    let diag = (z + tau_tilde) / tau_tilde;
    let m = Matrix4::<Complex64>::from_fn(|i, j| {
        let off = h * (phi[i] * weights.0[i][j]);
        if i == j {
            diag - off
        } else {
            -off
        }
    });
    Ok(m.determinant())
}

/// Scaled delay `T / tau_bar`.
pub fn tau_tilde(t_ms: f64, tau_bar_ms: f64) -> f64 {
    t_ms / tau_bar_ms
}

/// Physical angular frequency in rad/ms of a scaled root `i omega` at delay
/// `T`.
pub fn physical_omega(omega: f64, t_ms: f64) -> f64 {
    omega / t_ms
}
