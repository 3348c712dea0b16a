//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wcdelay::chareq::char_residual;
use wcdelay::equilibrium::{equilibrium, SolverOpts};
use wcdelay::model::{
    build_connectivity, preset, ConnectivityScheme, DelayKernel, KernelKind, NetworkSpec,
    SigmoidSpec, WANG_REFERENCE_DELAY_MS,
};
use wcdelay::simulate::{
    classify_longterm, convolution_oracle, simulate, simulate_dirac, simulate_weak_gamma,
};
use wcdelay::spectrum::{band_classify, dominant_frequency, onset_frequency, Band};
use wcdelay::stability::{
    classify, critical_delays, dirac_critical_delays, gamma_critical_delays, gamma_f_at_u2,
    gamma_u2, gamma_zone_classify, hopf_case, physical_critical_delays, saddle_positive_root,
    CriticalDelaySet, GammaZone, HopfCase, KernelClass, DEFAULT_K_MAX, RESIDUAL_TOL,
};
use wcdelay::sweep::{run_sweep, Axis, SweepBase, SweepConfig, SweepGrid};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn within_time(start: Instant, limit: Duration, what: &str) -> std::result::Result<(), String> {
    let el = start.elapsed();
    if el > limit {
        Err(format!("{what} took {el:.2?} (limit {limit:?})"))
    } else {
        Ok(())
    }
}

/// Every reported crossing has to satisfy the characteristic equation.
fn certify(set: &CriticalDelaySet) -> std::result::Result<(), String> {
    for e in &set.entries {
        let f = char_residual(
            set.alpha,
            set.beta,
            e.tau_tilde,
            Complex64::new(0.0, e.omega),
            set.kernel,
        )
        .map_err(|err| err.to_string())?;
        if !(f.norm() < RESIDUAL_TOL) {
            return Err(format!(
                "|F| = {:e} at ({}, {}) omega {} tt {} ({:?})",
                f.norm(),
                set.alpha,
                set.beta,
                e.omega,
                e.tau_tilde,
                set.kernel
            ));
        }
    }
    Ok(())
}

fn wang_gamma(w_cs: f64) -> NetworkSpec {
    preset("wang-baseline")
        .unwrap()
        .with_weight("W_CS", w_cs)
        .unwrap()
        .with_kernel(KernelKind::WeakGamma, 10.0)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let net = preset("wang-baseline").map_err(|e| e.to_string())?;
    let rep = physical_critical_delays(&net).map_err(|e| e.to_string())?;
    let first = rep.first().ok_or("no crossing reported")?;
    within_time(start, Duration::from_secs(1), "Dirac critical delay")?;
    let eq = equilibrium(&net, &SolverOpts::default(), 0).map_err(|e| e.to_string())?;
    certify(&dirac_critical_delays(eq.alpha, eq.beta, DEFAULT_K_MAX).map_err(|e| e.to_string())?)?;
    ensure!(
        rel(first.t_ms, 3.94924) < 0.005,
        "T* = {} ms, expected 3.94924",
        first.t_ms
    );
    Ok(format!("T* = {:.6} ms in {:.1?}", first.t_ms, start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut msg = Vec::new();
    for (w_cs, lo, hi) in [(6.6, 7.56518, 29.7415), (6.3, 12.5687, 17.9016)] {
        let net = wang_gamma(w_cs);
        let rep = physical_critical_delays(&net).map_err(|e| e.to_string())?;
        let (a, b) = rep.window_ms.ok_or(format!("no window at W_CS = {w_cs}"))?;
        ensure!(
            rel(a, lo) < 0.005 && rel(b, hi) < 0.005,
            "W_CS = {w_cs}: window ({a}, {b}), expected ({lo}, {hi})"
        );
        certify(&gamma_critical_delays(rep.alpha, rep.beta).map_err(|e| e.to_string())?)?;
        msg.push(format!("W_CS={w_cs}: ({a:.5}, {b:.4})"));
    }
    within_time(start, Duration::from_secs(1), "weak-Gamma windows")?;
    Ok(msg.join("; "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Bucket {
    DiracCase1,
    DiracCase2,
    Gray,
    Pink,
    Cyan,
}

/// Random points with at least `per` samples in every bucket.
fn zone_samples(rng: &mut ChaCha8Rng, per: usize) -> Vec<(Bucket, f64, f64)> {
    use std::collections::BTreeMap;
    let mut count: BTreeMap<Bucket, usize> = BTreeMap::new();
    let mut out = Vec::new();
    let done = |c: &BTreeMap<Bucket, usize>| {
        [Bucket::DiracCase1, Bucket::DiracCase2, Bucket::Gray, Bucket::Pink, Bucket::Cyan]
            .iter()
            .all(|b| c.get(b).copied().unwrap_or(0) >= per)
    };
    while !done(&count) {
        let a: f64 = rng.gen_range(-60.0..10.0);
        let b: f64 = rng.gen_range(-10.0..400.0);
        if !wcdelay::stability::no_delay_stable(a, b) {
            continue;
        }
        let mut push = |k: Bucket| {
            let c = count.entry(k).or_insert(0);
            if *c < per {
                *c += 1;
                out.push((k, a, b));
            }
        };
        let set = dirac_critical_delays(a, b, DEFAULT_K_MAX).unwrap();
        if !set.entries.is_empty() {
            match hopf_case(a, b) {
                HopfCase::Case1 => push(Bucket::DiracCase1),
                HopfCase::Case2 => push(Bucket::DiracCase2),
            }
        }
        match gamma_zone_classify(a, b).unwrap() {
            GammaZone::Gray => push(Bucket::Gray),
            GammaZone::Pink => push(Bucket::Pink),
            GammaZone::Cyan => push(Bucket::Cyan),
            _ => {}
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples = zone_samples(&mut rng, 1000);
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for (bucket, a, b) in &samples {
        let kind = match bucket {
            Bucket::DiracCase1 | Bucket::DiracCase2 => KernelKind::Dirac,
            _ => KernelKind::WeakGamma,
        };
        let set = critical_delays(kind, *a, *b).map_err(|e| e.to_string())?;
        ensure!(!set.entries.is_empty(), "{bucket:?} ({a}, {b}) has no crossing");
        certify(&set)?;
        checked += set.entries.len();
        worst = worst.max(set.max_residual());
    }
    Ok(format!(
        "{} points, {checked} crossings, max |F| = {worst:.2e}",
        samples.len()
    ))
}

fn gamma_stable(a: f64, b: f64) -> bool {
    classify(a, b).unwrap().weak_gamma == KernelClass::StableAllDelays
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    // (a) region R
    let mut n = 0;
    while n < 10_000 {
        let a: f64 = rng.gen_range(-2.0..2.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        if !(a.abs() - 1.0 < b && b < 1.0) {
            continue;
        }
        n += 1;
        for kind in [KernelKind::Dirac, KernelKind::WeakGamma] {
            let set = critical_delays(kind, a, b).map_err(|e| e.to_string())?;
            ensure!(
                set.entries.is_empty() && set.stable_all_delays,
                "({a}, {b}) in R has {} crossings for {kind:?}",
                set.entries.len()
            );
        }
    }
    // (b) below the saddle-node line
    for i in 0..10_000 {
        let a: f64 = rng.gen_range(-50.0..50.0);
        let b = a - 1.0 - rng.gen_range(1e-6..50.0f64);
        let tt = rng.gen_range(0.05..20.0);
        let kind = if i % 2 == 0 { KernelKind::Dirac } else { KernelKind::WeakGamma };
        let x = saddle_positive_root(a, b, tt, kind).map_err(|e| e.to_string())?;
        let f = |s: f64| char_residual(a, b, tt, Complex64::new(s, 0.0), kind).unwrap().re;
        let h = 1e-9 * x.max(1e-3);
        ensure!(
            x > 0.0 && x < 10.0 && f(x - h) <= 0.0 && f(x + h) >= 0.0,
            "root {x} at ({a}, {b}), tt {tt} is not a sign change"
        );
    }
    // (c) straddling pairs across the weak-Gamma stable boundary
    let d = 5e-4;
    let mut pairs = 0;
    let mut check = |p: (f64, f64), nrm: (f64, f64)| -> std::result::Result<(), String> {
        let len = nrm.0.hypot(nrm.1);
        let (nx, ny) = (nrm.0 / len * d, nrm.1 / len * d);
        let inside = gamma_stable(p.0 + nx, p.1 + ny);
        let outside = gamma_stable(p.0 - nx, p.1 - ny);
        pairs += 1;
        ensure!(inside && !outside, "no separation at ({}, {})", p.0, p.1);
        Ok(())
    };
    for _ in 0..1000 {
        // normals point into the stable set
        // the first two curves touch tangentially at (-8, 16); stay clear
        let a = rng.gen_range(-7.5..-3.1);
        check((a, -4.0 * a - 16.0), (4.0, 1.0))?;
        let b: f64 = rng.gen_range(1.1..15.0);
        let fp = 2.0 * (-2.0 * b.powf(-0.75) + 0.5 / b.sqrt());
        check((gamma_f_at_u2(b), b), (-1.0, fp))?;
        let a = rng.gen_range(-2.9..1.9);
        check((a, a - 1.0), (-1.0, 1.0))?;
    }
    Ok(format!("10000 R points, 10000 saddle roots, {pairs} boundary pairs"))
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples = zone_samples(&mut rng, 1000);
    for (bucket, a, b) in &samples {
        let (a, b) = (*a, *b);
        match bucket {
            Bucket::DiracCase1 | Bucket::DiracCase2 => {
                let set = dirac_critical_delays(a, b, DEFAULT_K_MAX).unwrap();
                let tt: Vec<f64> = set.entries.iter().map(|e| e.tau_tilde).collect();
                ensure!(strictly_increasing(&tt), "Dirac ladder at ({a}, {b}): {tt:?}");
            }
            _ => {
                let set = gamma_critical_delays(a, b).unwrap();
                let mut w: Vec<f64> = set.entries.iter().map(|e| e.omega).collect();
                w.sort_by(f64::total_cmp);
                let u2 = gamma_u2(b);
                let ok = match (bucket, w.as_slice()) {
                    (Bucket::Gray, [wm, wp]) => *wm < u2 && u2 < *wp,
                    (Bucket::Pink, [wm, vm, vp, wp]) => {
                        wm < vm && *vm < u2 && u2 < *vp && vp < wp
                    }
                    (Bucket::Cyan, [wm, wp]) => *wm < 1.0 && 1.0 < *wp,
                    (Bucket::Cyan, [w1, w2, w3, w4]) => {
                        // both Q roots below -4: two nested pairs
                        *w1 < 1.0 && *w2 < 1.0 && 1.0 < *w3 && 1.0 < *w4
                    }
                    _ => false,
                };
                ensure!(ok, "{bucket:?} ordering at ({a}, {b}): {w:?}, u2 = {u2}");
            }
        }
    }
    Ok(format!("{} samples, zero violations", samples.len()))
}

fn perturbed(x: [f64; 4], eps: f64) -> [f64; 4] {
    std::array::from_fn(|j| x[j] + eps * (1.0 + 0.3 * j as f64))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let opts = SolverOpts::default();
    let mut msg = Vec::new();

    let net = preset("wang-baseline").unwrap();
    let eq = equilibrium(&net, &opts, 0).map_err(|e| e.to_string())?;
    let tstar = physical_critical_delays(&net).unwrap().first().unwrap().t_ms;
    let init = perturbed(eq.x_star, 0.5);
    let mut got = Vec::new();
    for f in [0.95, 1.05] {
        let t = tstar * f;
        let tr = simulate_dirac(&net, t, init, 15_000.0, t / 50.0).map_err(|e| e.to_string())?;
        got.push(classify_longterm(&tr, &eq.x_star).label());
    }
    ensure!(
        got == ["Converges", "LimitCycle"],
        "Dirac at T*(1-5%), T*(1+5%): {got:?}"
    );
    msg.push(format!("Dirac {got:?}"));

    let net = wang_gamma(6.6);
    let eq = equilibrium(&net, &opts, 0).map_err(|e| e.to_string())?;
    let init = perturbed(eq.x_star, 0.5);
    let mut got = Vec::new();
    for t in [6.5, 8.0, 25.0, 45.0] {
        let dt = net.tau_bar_ms.min(t) / 50.0;
        let tr = simulate(&net, t, init, 15_000.0, dt).map_err(|e| e.to_string())?;
        got.push(classify_longterm(&tr, &eq.x_star).label());
    }
    ensure!(
        got == ["Converges", "LimitCycle", "LimitCycle", "Converges"],
        "weak Gamma at 6.5/8/25/45 ms: {got:?}"
    );
    msg.push(format!("weak Gamma {got:?}"));
    within_time(start, Duration::from_secs(30), "simulations")?;
    Ok(format!("{} in {:.1?}", msg.join(", "), start.elapsed()))
}

fn random_circuit(rng: &mut ChaCha8Rng) -> NetworkSpec {
    let mut w = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    let weights = build_connectivity(
        ConnectivityScheme::EE,
        [
            ("E1I1", -w(2.0, 16.0)),
            ("I1E1", w(1.0, 12.0)),
            ("E2I2", -w(2.0, 16.0)),
            ("I2E2", w(1.0, 12.0)),
            ("E1E2", w(-4.0, 4.0)),
            ("E2E1", w(-4.0, 4.0)),
        ],
    )
    .unwrap();
    let mut sig = || SigmoidSpec::WilsonCowan {
        b: rng.gen_range(0.5..2.0),
        theta: rng.gen_range(1.0..5.0),
    };
    let sigmoids = [sig(), sig(), sig(), sig()];
    let inputs = [rng.gen_range(0.0..8.0), 0.0, rng.gen_range(0.0..8.0), 0.0];
    let tau_bar = rng.gen_range(5.0..20.0);
    let t = rng.gen_range(2.0..20.0);
    NetworkSpec {
        scheme: ConnectivityScheme::EE,
        weights,
        sigmoids,
        inputs,
        tau_bar_ms: tau_bar,
        kernel: DelayKernel::new(KernelKind::WeakGamma, t),
    }
}

fn sup_diff(a: &[[f64; 4]], b: &[[f64; 4]], stride_a: usize, stride_b: usize) -> f64 {
    let n = (a.len() - 1) / stride_a;
    (0..=n).fold(0.0, |m, i| {
        let (x, y) = (a[i * stride_a], b[i * stride_b]);
        (0..4).fold(m, |m, j| m.max((x[j] - y[j]).abs()))
    })
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let net = random_circuit(&mut rng);
        let t = net.kernel.tau_ms;
        let dt = net.tau_bar_ms.min(t) / 100.0;
        let init: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
        let mut s = [0.0; 8];
        s[..4].copy_from_slice(&init);
        s[4..].copy_from_slice(&init);
        let chain = simulate_weak_gamma(&net, t, s, 150.0, dt).map_err(|e| e.to_string())?;
        let direct = convolution_oracle(&net, t, init, 150.0, dt).map_err(|e| e.to_string())?;
        let d = sup_diff(&chain.x, &direct.x, 1, 1);
        ensure!(d < 1e-4, "circuit {k}: chain vs convolution sup-norm {d:e}");
        worst = worst.max(d);
    }

    // observed order from three step sizes on the Wang circuit
    let net = preset("wang-baseline").unwrap();
    let eq = equilibrium(&net, &SolverOpts::default(), 0).unwrap();
    let init = perturbed(eq.x_star, 2.0);
    let order = |run: &dyn Fn(f64) -> Vec<[f64; 4]>, h: f64| {
        let (a, b, c) = (run(h), run(h / 2.0), run(h / 4.0));
        let e1 = sup_diff(&a, &b, 1, 2);
        let e2 = sup_diff(&b, &c, 1, 2);
        (e1 / e2).log2()
    };
    let t = WANG_REFERENCE_DELAY_MS;
    let dirac = |h: f64| simulate_dirac(&net, t, init, 50.0 * t, h).unwrap().x;
    let gnet = net.clone().with_kernel(KernelKind::WeakGamma, 8.0);
    let gamma = |h: f64| simulate(&gnet, 8.0, init, 200.0, h).unwrap().x;
    let p_dirac = order(&dirac, t / 20.0);
    let p_gamma = order(&gamma, 0.4);
    ensure!(
        p_dirac >= 3.5 && p_gamma >= 3.5,
        "observed orders {p_dirac:.2} (Dirac), {p_gamma:.2} (weak Gamma)"
    );
    Ok(format!(
        "oracle sup-norm <= {worst:.1e}; RK4 order {p_dirac:.2} (Dirac), {p_gamma:.2} (weak Gamma)"
    ))
}

fn criterion_8() -> Outcome {
    let opts = SolverOpts::default();
    let mut msg = Vec::new();
    // boundary rule
    for (f, band) in [
        (3.99, Band::Delta),
        (4.0, Band::Theta),
        (8.0, Band::Alpha),
        (12.0, Band::Beta),
        (30.0, Band::Beta),
        (30.01, Band::Gamma),
    ] {
        ensure!(band_classify(f) == band, "{f} Hz classified as {}", band_classify(f));
    }
    for (net, label) in [
        (preset("wang-baseline").unwrap(), "Dirac"),
        (wang_gamma(6.6), "weak Gamma"),
    ] {
        let rep = physical_critical_delays(&net).unwrap();
        let first = rep.first().unwrap();
        let analytic = onset_frequency(first.omega, first.t_ms);
        ensure!(
            band_classify(analytic) == Band::Beta,
            "{label} onset {analytic} Hz is not Beta"
        );
        let eq = equilibrium(&net, &opts, 0).unwrap();
        let t = first.t_ms * 1.02;
        let dt = match net.kernel.kind {
            KernelKind::Dirac => t / 50.0,
            KernelKind::WeakGamma => net.tau_bar_ms.min(t) / 50.0,
        };
        let tr = simulate(&net, t, perturbed(eq.x_star, 0.5), 12_000.0, dt)
            .map_err(|e| e.to_string())?;
        let f = dominant_frequency(&tr).map_err(|e| e.to_string())?;
        ensure!(
            rel(f, analytic) < 0.05,
            "{label}: simulated {f} Hz vs analytic {analytic} Hz"
        );
        msg.push(format!("{label} {f:.2} Hz vs {analytic:.2} Hz"));
    }
    Ok(format!("{}; onset band Beta", msg.join(", ")))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cfg = SweepConfig {
        base: SweepBase::Network {
            network: preset("wang-baseline").unwrap(),
        },
        axis1: Axis::new("W_GS", 0.0, 8.0, 161),
        axis2: Axis::new("W_SC", 0.0, 20.0, 161),
        kernels: vec![KernelKind::Dirac, KernelKind::WeakGamma],
        fixed_delay_ms: None,
    };
    let grid: SweepGrid = run_sweep(&cfg).map_err(|e| e.to_string())?;
    within_time(start, Duration::from_secs(300), "161x161 sweep")?;
    let mut both = 0;
    let mut failed = 0;
    for pair in grid.cells.chunks(2) {
        let (d, g) = (&pair[0], &pair[1]);
        if d.equilibrium_failed {
            failed += 1;
        }
        for c in pair {
            if let Some(r) = c.max_residual {
                ensure!(r < RESIDUAL_TOL, "residual {r:e} at ({}, {})", c.p1, c.p2);
            }
        }
        if let (Some(td), Some(tg)) = (d.tstar_ms, g.tstar_ms) {
            both += 1;
            ensure!(
                tg >= td,
                "weak-Gamma onset {tg} < Dirac onset {td} at W_GS {}, W_SC {}",
                d.p1,
                d.p2
            );
        }
    }
    Ok(format!(
        "{} cells, {both} with both onsets, zero violations, {failed} unsolved, {:.1?}",
        grid.cells.len() / 2,
        start.elapsed()
    ))
}

fn oscillating(w_gs: f64, w_sc: f64) -> bool {
    let net = preset("wang-baseline")
        .unwrap()
        .with_weight("W_GS", w_gs)
        .unwrap()
        .with_weight("W_SC", w_sc)
        .unwrap();
    let eq = equilibrium(&net, &SolverOpts::default(), 0).unwrap();
    let class = classify(eq.alpha, eq.beta).unwrap();
    if !class.no_delay_stable {
        return true;
    }
    let set = critical_delays(KernelKind::Dirac, eq.alpha, eq.beta).unwrap();
    set.is_unstable_at(WANG_REFERENCE_DELAY_MS / net.tau_bar_ms)
}

/// Crossings of the oscillation indicator along a path, refined by bisection.
fn path_crossings(w_gs: f64, n: usize) -> (Vec<f64>, Vec<bool>) {
    let cfg = SweepConfig {
        base: SweepBase::Network {
            network: preset("wang-baseline").unwrap(),
        },
        axis1: Axis::new("W_GS", w_gs, w_gs, 1),
        axis2: Axis::new("W_SC", 0.0, 20.0, n),
        kernels: vec![KernelKind::Dirac],
        fixed_delay_ms: Some(WANG_REFERENCE_DELAY_MS),
    };
    let grid = run_sweep(&cfg).unwrap();
    let states: Vec<bool> = grid.cells.iter().map(|c| c.oscillating.unwrap()).collect();
    let xs: Vec<f64> = grid.cells.iter().map(|c| c.p2).collect();
    let mut out = Vec::new();
    for i in 1..n {
        if states[i] != states[i - 1] {
            let (mut lo, mut hi) = (xs[i - 1], xs[i]);
            let s_lo = states[i - 1];
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if oscillating(w_gs, mid) == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    (out, states)
}

fn criterion_10() -> Outcome {
    let mut msg = Vec::new();
    for (w_gs, expect) in [(1.33, 2usize), (4.87, 1)] {
        let (coarse, states) = path_crossings(w_gs, 41);
        let (dense, _) = path_crossings(w_gs, 2001);
        ensure!(
            !states[0],
            "W_GS = {w_gs}: oscillating already at W_SC = 0"
        );
        ensure!(
            coarse.len() == expect && dense.len() == expect,
            "W_GS = {w_gs}: crossings {coarse:?} (dense {dense:?}), expected {expect}"
        );
        for (c, d) in coarse.iter().zip(&dense) {
            ensure!((c - d).abs() < 0.1, "W_GS = {w_gs}: bisection {c} vs rescan {d}");
        }
        if expect == 1 {
            ensure!(
                (coarse[0] - 2.5).abs() < 0.5 && *states.last().unwrap(),
                "W_GS = {w_gs}: onset at {} or exits before 20",
                coarse[0]
            );
        }
        msg.push(format!(
            "W_GS={w_gs}: {}",
            coarse.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(msg.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Dirac first critical delay", criterion_1),
        ("weak-Gamma Hopf windows", criterion_2),
        ("residual certification", criterion_3),
        ("region properties", criterion_4),
        ("ordering invariants", criterion_5),
        ("simulation vs analysis", criterion_6),
        ("integrator oracles", criterion_7),
        ("onset frequency and band", criterion_8),
        ("kernel comparison map", criterion_9),
        ("oscillation paths", criterion_10),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| id.contains(p.as_str()) || name.contains(p.as_str())) {
            continue;
        }
        let out = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| {
                let text = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {text}"))
            });
        match out {
            Ok(detail) => println!("{id:>12} PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("{id:>12} FAIL  {name}: {detail}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
