//! Fixed points of the undelayed map, linearization gains and the reduced
//! characteristic coefficients `(alpha, beta)`.

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ConnectivityScheme, NetworkSpec, Node, WeightMatrix, WeightSlot};

/// Newton solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOpts {
    /// Sup-norm bound on the fixed-point defect.
    pub tolerance: f64,
    /// Newton iterations per start.
    pub max_iterations: usize,
}

impl Default for SolverOpts {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100,
        }
    }
}

impl SolverOpts {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidParameter(format!(
                "solver needs tolerance > 0 and max_iterations > 0 (got {}, {})",
                self.tolerance, self.max_iterations
            )));
        }
        Ok(())
    }
}

/// A fixed point with its gains and reduced coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x_star: [f64; 4],
    pub phi: [f64; 4],
    pub residual: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Equilibrium {
    /// Rebuild gains and coefficients at `x` for `net`.
    pub fn at(net: &NetworkSpec, x: [f64; 4]) -> Result<Self> {
        let phi = net.gains(&x);
        let (alpha, beta) = alpha_beta_from_gains(net.scheme, &net.weights, &phi)?;
        Ok(Self {
            x_star: x,
            phi,
            residual: defect(net, &x),
            alpha,
            beta,
        })
    }

    /// Recompute the defect and check it against `tolerance`.
    pub fn verify(&self, net: &NetworkSpec, tolerance: f64) -> Result<()> {
        let r = defect(net, &self.x_star);
        if r <= tolerance {
            Ok(())
        } else {
            Err(Error::NoConvergence {
                starts: 0,
                best_residual: r,
            })
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("equilibrium serializes")
    }
}

fn residual_vec(net: &NetworkSpec, x: &[f64; 4]) -> [f64; 4] {
    let f = net.activation(&net.drive(x));
    std::array::from_fn(|j| f[j] - x[j])
}

/// Sup-norm of `-x + F(Cx + P)`.
pub fn defect(net: &NetworkSpec, x: &[f64; 4]) -> f64 {
    residual_vec(net, x).iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn sup_dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn norm(x: &[f64; 4]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Damped Newton from `start`. Returns the final point and its defect.
fn newton(net: &NetworkSpec, start: [f64; 4], opts: &SolverOpts) -> ([f64; 4], f64) {
    let mut x = start;
    let mut r = residual_vec(net, &x);
    let mut rn = sup(&r);
    let c = Matrix4::from_fn(|i, j| net.weights.0[i][j]);
    for _ in 0..opts.max_iterations {
        if !rn.is_finite() {
            break;
        }
        if rn <= opts.tolerance * 1e-3 {
            break;
        }
        let phi = net.gains(&x);
        let jac = Matrix4::from_fn(|i, j| phi[i] * c[(i, j)]) - Matrix4::identity();
        let rhs = -Vector4::from(r);
        let Some(step) = jac.lu().solve(&rhs) else {
            break;
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let trial: [f64; 4] = std::array::from_fn(|j| x[j] + lambda * step[j]);
            let tr = residual_vec(net, &trial);
            let tn = sup(&tr);
            if tn < rn || (tn == 0.0 && rn == 0.0) {
                x = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, rn)
}

fn sup(v: &[f64; 4]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped fixed-point iteration `x <- (1 - lambda) x + lambda F(Cx + P)`.
pub fn damped_fixed_point(
    net: &NetworkSpec,
    start: [f64; 4],
    lambda: f64,
    tolerance: f64,
    max_iterations: usize,
) -> ([f64; 4], f64) {
    let mut x = start;
    for _ in 0..max_iterations {
        let f = net.activation(&net.drive(&x));
        let next: [f64; 4] = std::array::from_fn(|j| (1.0 - lambda) * x[j] + lambda * f[j]);
        let step = sup_dist(&next, &x);
        x = next;
        if step <= tolerance {
            break;
        }
    }
    (x, defect(net, &x))
}

fn lattice_starts(net: &NetworkSpec) -> Vec<[f64; 4]> {
    let levels: [[f64; 3]; 4] = std::array::from_fn(|j| {
        let (lo, hi) = net.sigmoids[j].range();
        [0.1, 0.5, 0.9].map(|t| lo + t * (hi - lo))
    });
    let mut out = vec![[0.0; 4]];
    for idx in 0..81usize {
        let d = [idx / 27, (idx / 9) % 3, (idx / 3) % 3, idx % 3];
        out.push(std::array::from_fn(|j| levels[j][d[j]]));
    }
    out
}

/// Newton from a single start, with a fixed-point fallback.
pub fn solve_from(net: &NetworkSpec, start: [f64; 4], opts: &SolverOpts) -> Result<Equilibrium> {
    opts.validate()?;
    let (x, r) = newton(net, start, opts);
    if r <= opts.tolerance {
        return Equilibrium::at(net, x);
    }
    let (xf, _) = damped_fixed_point(net, start, 0.2, 1e-13, 100 * opts.max_iterations);
    let (x2, r2) = newton(net, xf, opts);
    if r2 <= opts.tolerance {
        return Equilibrium::at(net, x2);
    }
    Err(Error::NoConvergence {
        starts: 1,
        best_residual: r.min(r2),
    })
}

/// All equilibria reachable from the start lattice, deduplicated and sorted
/// by Euclidean norm.
pub fn find_equilibria(net: &NetworkSpec, opts: &SolverOpts) -> Result<Vec<Equilibrium>> {
    opts.validate()?;
    net.validate()?;
    let starts = lattice_starts(net);
    let results: Vec<([f64; 4], f64)> = starts
        .par_iter()
        .map(|&s| newton(net, s, opts))
        .collect();

    let mut found: Vec<[f64; 4]> = Vec::new();
    let mut best = f64::INFINITY;
    let mut push = |x: [f64; 4], r: f64, found: &mut Vec<[f64; 4]>| {
        best = best.min(r);
        if r <= opts.tolerance && !found.iter().any(|y| sup_dist(y, &x) <= 10.0 * opts.tolerance) {
            found.push(x);
        }
    };
    for (x, r) in results {
        push(x, r, &mut found);
    }
    if found.is_empty() {
        let (xf, _) = damped_fixed_point(net, [0.0; 4], 0.2, 1e-13, 100 * opts.max_iterations);
        let (x, r) = newton(net, xf, opts);
        push(x, r, &mut found);
    }
    if found.is_empty() {
        return Err(Error::NoConvergence {
            starts: starts.len() + 1,
            best_residual: best,
        });
    }
    found.sort_by(|a, b| {
        norm(a)
            .total_cmp(&norm(b))
            .then_with(|| a.iter().zip(b).fold(std::cmp::Ordering::Equal, |o, (x, y)| o.then(x.total_cmp(y))))
    });
    found.into_iter().map(|x| Equilibrium::at(net, x)).collect()
}

/// The equilibrium at position `index` of [`find_equilibria`] (0 is the
/// smallest norm).
pub fn equilibrium(net: &NetworkSpec, opts: &SolverOpts, index: usize) -> Result<Equilibrium> {
    let mut all = find_equilibria(net, opts)?;
    if index >= all.len() {
        return Err(Error::InvalidParameter(format!(
            "equilibrium index {index} out of range ({} found)",
            all.len()
        )));
    }
    Ok(all.swap_remove(index))
}

/// `(alpha, beta)` of `net` at the point `eq_point`.
pub fn alpha_beta(net: &NetworkSpec, eq_point: &[f64; 4]) -> Result<(f64, f64)> {
    let phi = net.gains(eq_point);
    alpha_beta_from_gains(net.scheme, &net.weights, &phi)
}

/// Reduced coefficients from explicit gains.
pub fn alpha_beta_from_gains(
    scheme: ConnectivityScheme,
    weights: &WeightMatrix,
    phi: &[f64; 4],
) -> Result<(f64, f64)> {
    use Node::{E1, E2, I1, I2};
    weights.check_scheme(scheme)?;
    let w = |t: Node, s: Node| weights.get(WeightSlot::new(t, s));
    let [p1, p2, p3, p4] = *phi;
    let loop1 = p1 * p2 * w(E1, I1) * w(I1, E1);
    let loop2 = p3 * p4 * w(E2, I2) * w(I2, E2);
    let all = p1 * p2 * p3 * p4;
    let (alpha, beta) = match scheme {
        ConnectivityScheme::EE => (
            loop1 + loop2 + p1 * p3 * w(E1, E2) * w(E2, E1),
            all * w(E1, I1) * w(I1, E1) * w(E2, I2) * w(I2, E2),
        ),
        ConnectivityScheme::II => (
            loop1 + loop2 + p2 * p4 * w(I1, I2) * w(I2, I1),
            all * w(E1, I1) * w(I1, E1) * w(E2, I2) * w(I2, E2),
        ),
        ConnectivityScheme::EtoI => (
            loop1 + loop2,
            all * w(E1, I1) * w(E2, I2) * (w(I1, E1) * w(I2, E2) - w(I1, E2) * w(I2, E1)),
        ),
        ConnectivityScheme::ItoE => (
            loop1 + loop2,
            all * w(I1, E1) * w(I2, E2) * (w(E1, I1) * w(E2, I2) - w(E1, I2) * w(E2, I1)),
        ),
    };
    Ok((alpha, beta))
}

/// Undelayed Jacobian `-I + diag(phi) C` (time in units of `tau_bar`).
pub fn no_delay_jacobian(weights: &WeightMatrix, phi: &[f64; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| phi[i] * weights.0[i][j]) - Matrix4::identity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_connectivity, preset, DelayKernel, KernelKind, SigmoidSpec};
    use crate::stability::no_delay_stable;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn zero_wc() -> NetworkSpec {
        let exc = SigmoidSpec::WilsonCowan { b: 1.2, theta: 4.0 };
        let inh = SigmoidSpec::WilsonCowan { b: 1.0, theta: 2.0 };
        NetworkSpec {
            scheme: ConnectivityScheme::EE,
            weights: WeightMatrix::zeros(),
            sigmoids: [exc, inh, exc, inh],
            inputs: [0.0; 4],
            tau_bar_ms: 10.0,
            kernel: DelayKernel::new(KernelKind::Dirac, 1.0),
        }
    }

    #[test]
    fn zero_circuit_has_origin_only() {
        let eqs = find_equilibria(&zero_wc(), &SolverOpts::default()).unwrap();
        assert_eq!(eqs.len(), 1);
        assert!(eqs[0].x_star.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn bad_opts_rejected() {
        let opts = SolverOpts {
            tolerance: 0.0,
            max_iterations: 10,
        };
        assert!(matches!(
            find_equilibria(&zero_wc(), &opts),
            Err(Error::InvalidParameter(_))
        ));
    }

    // Damped iteration run independently, frozen here.
    const WANG_X: [f64; 4] = [
        17.186_746_761_219_986,
        77.148_747_674_345_77,
        57.058_075_624_577_39,
        32.598_227_145_934_57,
    ];

    #[test]
    fn wang_equilibrium_matches_damped_iteration() {
        let net = preset("wang-baseline").unwrap();
        let (oracle, r) = damped_fixed_point(&net, [0.0; 4], 0.2, 1e-14, 1_000_000);
        assert!(r < 1e-10);
        let eqs = find_equilibria(&net, &SolverOpts::default()).unwrap();
        assert_eq!(eqs.len(), 1);
        let e = &eqs[0];
        assert!(e.residual <= 1e-10);
        for j in 0..4 {
            assert_relative_eq!(e.x_star[j], oracle[j], max_relative = 1e-9);
            assert_relative_eq!(e.x_star[j], WANG_X[j], max_relative = 1e-9);
            assert!(e.phi[j] > 0.0);
        }
        // each rate within its (B, M) band
        for (x, s) in e.x_star.iter().zip(&net.sigmoids) {
            if let SigmoidSpec::WangNaturalMax { max_rate, .. } = *s {
                assert!(*x > 0.0 && *x < max_rate);
            }
        }
        assert_relative_eq!(e.alpha, -4.733_073_830_066_004, max_relative = 1e-9);
        assert_relative_eq!(e.beta, 1.103_647_281_148_035_6, max_relative = 1e-9);
    }

    #[test]
    fn table_rows_by_substitution() {
        let ones = build_connectivity(
            ConnectivityScheme::EE,
            ["E1I1", "I1E1", "E1E2", "E2E1", "E2I2", "I2E2"].map(|n| (n, 1.0)),
        )
        .unwrap();
        let (a, b) = alpha_beta_from_gains(ConnectivityScheme::EE, &ones, &[1.0; 4]).unwrap();
        assert_eq!((a, b), (3.0, 1.0));

        let m = build_connectivity(
            ConnectivityScheme::EtoI,
            [
                ("E1I1", -16.0),
                ("I1E1", 2.0),
                ("E2I2", -16.0),
                ("I2E2", 3.0),
                ("I2E1", 1.5),
                ("I1E2", 4.0),
            ],
        )
        .unwrap();
        let (_, b) = alpha_beta_from_gains(ConnectivityScheme::EtoI, &m, &[0.3, 0.2, 0.5, 0.7]).unwrap();
        assert_eq!(b, 0.0);

        let mut bad = ones;
        bad.0[1][3] = 1.0;
        assert!(matches!(
            alpha_beta_from_gains(ConnectivityScheme::EE, &bad, &[1.0; 4]),
            Err(Error::SchemeMismatch { .. })
        ));
    }

    #[test]
    fn equilibrium_json_roundtrip_keeps_residual() {
        let net = preset("wang-baseline").unwrap();
        let e = equilibrium(&net, &SolverOpts::default(), 0).unwrap();
        let back: Equilibrium = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(back, e);
        back.verify(&net, 1e-10).unwrap();
    }

    #[test]
    fn warm_start_reaches_same_point() {
        let net = preset("wang-baseline").unwrap();
        let e = solve_from(&net, [10.0, 60.0, 50.0, 30.0], &SolverOpts::default()).unwrap();
        for j in 0..4 {
            assert_relative_eq!(e.x_star[j], WANG_X[j], max_relative = 1e-9);
        }
    }

    fn arb_scheme() -> impl Strategy<Value = ConnectivityScheme> {
        prop::sample::select(ConnectivityScheme::ALL.to_vec())
    }

    fn random_matrix(scheme: ConnectivityScheme, vals: [f64; 6]) -> WeightMatrix {
        let slots = scheme.slots();
        let mut m = WeightMatrix::zeros();
        for (s, v) in slots.iter().zip(vals) {
            m.set(*s, v);
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(800))]

        #[test]
        fn no_delay_eigenvalues_agree_with_region_s(
            scheme in arb_scheme(),
            vals in prop::array::uniform6(-6.0f64..6.0),
            phi in prop::array::uniform4(0.05f64..1.5),
        ) {
            let m = random_matrix(scheme, vals);
            let (a, b) = alpha_beta_from_gains(scheme, &m, &phi).unwrap();
            let margin = (b - (a - 1.0)).abs().min((b - (a - 4.0).powi(2) / 4.0).abs()).min((a - 2.0).abs());
            prop_assume!(margin > 1e-6);
            let schur = no_delay_jacobian(&m, &phi).try_schur(1e-14, 10_000);
            prop_assume!(schur.is_some());
            let eig = schur.unwrap().complex_eigenvalues();
            let max_re = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            prop_assume!(max_re.abs() > 1e-9);
            prop_assert_eq!(max_re < 0.0, no_delay_stable(a, b), "a={} b={} max_re={}", a, b, max_re);
        }

        #[test]
        fn ee_and_ii_share_beta(
            intra in prop::array::uniform4(-10.0f64..10.0),
            cross in prop::array::uniform2(-10.0f64..10.0),
            phi in prop::array::uniform4(0.01f64..2.0),
        ) {
            let ee = random_matrix(ConnectivityScheme::EE, [intra[0], intra[1], intra[2], intra[3], cross[0], cross[1]]);
            let ii = random_matrix(ConnectivityScheme::II, [intra[0], intra[1], intra[2], intra[3], cross[0], cross[1]]);
            let (_, b1) = alpha_beta_from_gains(ConnectivityScheme::EE, &ee, &phi).unwrap();
            let (_, b2) = alpha_beta_from_gains(ConnectivityScheme::II, &ii, &phi).unwrap();
            prop_assert_eq!(b1, b2);
        }

        #[test]
        fn etoi_sign_law(
            exc in prop::array::uniform2(0.01f64..10.0),
            inh in prop::array::uniform2(0.01f64..20.0),
            cross in prop::array::uniform2(0.0f64..10.0),
            phi in prop::array::uniform4(0.01f64..2.0),
        ) {
            let m = random_matrix(ConnectivityScheme::EtoI, [-inh[0], exc[0], -inh[1], exc[1], cross[0], cross[1]]);
            let (a, _) = alpha_beta_from_gains(ConnectivityScheme::EtoI, &m, &phi).unwrap();
            prop_assert!(a < 0.0);
        }

        #[test]
        fn pfc_equilibria_have_small_defect(w1 in 0.0f64..10.0, w2 in 0.0f64..10.0) {
            let net = crate::model::pfc_bla_model_a(w1, w2).unwrap();
            let eqs = find_equilibria(&net, &SolverOpts::default()).unwrap();
            for e in &eqs {
                prop_assert!(defect(&net, &e.x_star) <= 1e-10);
                prop_assert!(e.phi.iter().all(|p| *p > 0.0));
            }
        }
    }
}
