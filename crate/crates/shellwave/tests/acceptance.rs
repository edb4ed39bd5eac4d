//! Acceptance run: one PASS/FAIL line per criterion. Tolerances and runtime
//! limits are fixed below.

mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shellwave::coupling_calculus::*;
use shellwave::dirac_algebra::{dirac_rep, CMat};
use shellwave::fiber_operators::*;
use shellwave::green_kernels::FiberContext;
use shellwave::parallel::Exec;
use shellwave::resolvent_engine::*;
use shellwave::special_functions::{a0, sinc, u0};
use shellwave::spectral_probe::*;
use shellwave::C64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn maxabs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dirac_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for theta in [2, 3] {
        for _ in 0..20 {
            let rep = dirac_rep(theta, Some(random_frame(theta, &mut rng))).unwrap();
            let id = rep.identity_n();
            for j in 1..=theta {
                let aj = rep.alpha_tilde(j);
                worst = worst.max(maxabs(&(&aj * &rep.beta + &rep.beta * &aj)));
                for k in 1..=theta {
                    let ak = rep.alpha_tilde(k);
                    let target = if j == k { &id * C64::new(2.0, 0.0) } else { CMat::zeros(rep.n, rep.n) };
                    worst = worst.max(maxabs(&(&aj * &ak + &ak * &aj - target)));
                }
            }
            worst = worst.max(maxabs(&(&rep.beta * &rep.beta - &id)));
        }
    }
    outcome(worst <= 1e-14, format!("max defect {worst:.1e} over 40 frames"))
}

fn volterra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = QuadratureGrid::new(400).unwrap();
    let bound = 2.0 / PI + 5e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let theta = if rng.random_bool(0.5) { 3 } else { 2 };
        let rep = dirac_rep(theta, None).unwrap();
        let rho = 10f64.powf(rng.random_range(-2.0..2.0));
        let q = random_profile(&g, &mut rng);
        let w = random_unit(theta - 1, &mut rng);
        worst = worst.max(volterra_radius(rho, &w, &q, &g, &rep));
    }
    outcome(worst <= bound, format!("max radius {worst:.6} vs {bound:.6}"))
}

fn c2_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rep = dirac_rep(2, None).unwrap();
    let g = QuadratureGrid::default();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let cpl = random_subcritical(&mut rng);
        let q = random_profile(&g, &mut rng);
        let w = random_unit(1, &mut rng);
        let b = bound_c2(cpl, q.sup_norm).unwrap();
        for rho in [0.1, 1.0, 10.0] {
            let h = op_frak_h(rho, &w, &g, &rep);
            match inverse_i_plus_norm(&h, &coupling_matrix(&rep, cpl), &q, &g) {
                Ok(n) => worst = worst.max(n - b),
                Err(e) => return outcome(false, format!("{cpl:?} rho {rho}: {e}")),
            }
        }
    }
    outcome(worst <= 5e-2, format!("max excess over C2 {worst:.3e} (allowed 5e-2)"))
}

fn fourier() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for theta in [2, 3] {
        for _ in 0..10 {
            worst = worst.max(random_fourier_gap(theta, &mut rng));
        }
    }
    outcome(worst <= 1e-6, format!("max relative gap {worst:.1e}"))
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst, mut branches, mut count) = (0.0f64, [0usize; 2], 0);
    while count < 1000 {
        let t = Coupling::new(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
        if (3.99..=4.01).contains(&t.d().abs()) {
            continue;
        }
        count += 1;
        let (pre, magnetic) = match inverse_design(t) {
            Ok(v) => v,
            Err(e) => return outcome(false, format!("{t:?}: {e}")),
        };
        let back = if magnetic { rescale_magnetic(pre) } else { rescale_squeezed(pre) };
        let back = match back {
            Ok(b) => b,
            Err(e) => return outcome(false, format!("{t:?}: {e}")),
        };
        let scale = t.eta.abs().max(t.tau.abs()).max(1.0);
        worst = worst.max((back.eta - t.eta).abs().max((back.tau - t.tau).abs()) / scale);
        branches[magnetic as usize] += 1;
    }
    let pass = worst <= 1e-10 && branches.iter().all(|&b| b > 0);
    outcome(pass, format!("max error {worst:.1e}, squeezed {} / magnetic {}", branches[0], branches[1]))
}

fn krein_vs_fd() -> Outcome {
    let points = [
        (Coupling::new(1.0, 0.0), 0.1, 0.0, false, false),
        (Coupling::new(0.8, 0.5), 0.05, 2.0, false, false),
        (Coupling::new(-0.6, 0.3), 0.2, 1.0, false, false),
        (Coupling::new(1.2, -0.4), 0.15, 3.0, false, false),
        (Coupling::new(1.0, 0.2), 0.1, 1.0, true, false),
        (Coupling::new(0.5, -0.4), 0.15, 0.5, true, false),
        (Coupling::new(1.0, 0.0), 0.0, 0.0, false, true),
        (Coupling::new(0.8, 0.5), 0.0, 2.0, false, true),
        (Coupling::new(1.0, 0.2), 0.0, 1.0, true, true),
        (Coupling::new(-0.6, 0.3), 0.0, 0.5, true, true),
    ];
    let (mut worst_gap, mut lo, mut hi) = (0.0f64, f64::INFINITY, 0.0f64);
    for (cpl, eps, xi, mag, shell) in points {
        let g = krein_fd_gaps(cpl, eps, xi, mag, shell, &[1e-3, 5e-4]);
        worst_gap = worst_gap.max(g[0]);
        lo = lo.min(g[0] / g[1]);
        hi = hi.max(g[0] / g[1]);
    }
    let pass = worst_gap <= 2e-2 && lo >= 1.5 && hi <= 2.5;
    outcome(pass, format!("max gap {worst_gap:.2e} at h=1e-3, halving ratios in [{lo:.3}, {hi:.3}]"))
}

fn ladder(magnetic: bool, c: Coupling) -> Result<Vec<f64>, shellwave::Error> {
    let g = QuadratureGrid::default();
    let q = ProfileQ::half_indicator(&g);
    let base = FiberContext::planar(dirac_rep(2, None)?, 1.0, C64::new(0.0, 1.0), 0.0)?;
    [0.2, 0.1, 0.05, 0.025, 0.0125]
        .iter()
        .map(|&eps| {
            let xi = default_xi_grid(default_xi_max(c, eps), 60);
            Ok(sup_over_fibers(&base, c, &q, eps, magnetic, &xi, &g, Exec::Parallel)?.value)
        })
        .collect()
}

fn rate() -> Outcome {
    let eps = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let norms = match ladder(false, Coupling::new(1.0, 0.0)) {
        Ok(n) => n,
        Err(e) => return outcome(false, e.to_string()),
    };
    match rate_fit(&eps, &norms) {
        Ok(f) => outcome(
            (0.45..=1.5).contains(&f.slope) && f.max_abs_residual <= 0.15,
            format!("slope {:.4}, max residual {:.4}", f.slope, f.max_abs_residual),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn magnetic() -> Outcome {
    match ladder(true, Coupling::new(1.0, 0.2)) {
        Ok(n) => outcome(
            n.windows(2).all(|w| w[1] < w[0]),
            format!("sups {}", n.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn counterexample() -> Outcome {
    let run = || -> Result<Outcome, shellwave::Error> {
        let c = Coupling::new(2.0, 0.0);
        let (m, eps) = (1.0, 0.01);
        let a = solve_a_eps(c.d(), c.tau, m, eps)?;
        let xi = xi_eps(c.d(), c.tau, m, eps, a)?;
        let cert = build_zero_mode(xi, eps, c, m)?;
        let smin = staggered_min_singular(xi, m, c.eta, c.tau, eps, 2.5e-4, 3.0);
        let excluded = shell_zero_excluded(m, limit_shell(c, false)?)?;
        let g = QuadratureGrid::default();
        let q = ProfileQ::half_indicator(&g);
        let mut witness = f64::INFINITY;
        for e in [0.02, 0.01, 0.005] {
            let ae = solve_a_eps(c.d(), c.tau, m, e)?;
            let ctx = FiberContext::planar(dirac_rep(2, None)?, m, C64::new(0.0, 1.0), xi_eps(c.d(), c.tau, m, e, ae)?)?;
            let xg = TransverseGrid::for_fiber(&ctx, e)?;
            let ratio = fiber_difference_norm(&ctx, c, &q, e, false, &g, &xg)? / shell_norm(&ctx, c, false, &xg)?;
            witness = witness.min(ratio);
        }
        let pass = cert.residual_condition <= 1e-10
            && smin <= 1e-3
            && (xi - 31.9).abs() <= 0.5
            && (a - 0.638).abs() <= 0.01
            && excluded
            && witness >= 0.1;
        Ok(outcome(
            pass,
            format!(
                "a_eps {a:.5}, xi_eps {xi:.4}, condition {:.1e}, oracle smin {smin:.2e}, shell excluded {excluded}, min diff/shell {witness:.3}",
                cert.residual_condition
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn unitary() -> Outcome {
    let g = QuadratureGrid::new(40).unwrap();
    let q = ProfileQ::half_indicator(&g);
    let mut worst: f64 = 0.0;
    for target in [Coupling::new(4.0, 0.0), Coupling::new(0.0, 3.0)] {
        for xi in [0.0, 1.0, 5.0] {
            let ctx = FiberContext::planar(dirac_rep(2, None).unwrap(), 1.0, C64::new(0.0, 1.0), xi).unwrap();
            let xg = TransverseGrid::for_fiber(&ctx, 0.0).unwrap();
            match unitary_equivalence_residual(&ctx, target, &q, &g, &xg) {
                Ok(r) => worst = worst.max(r),
                Err(e) => return outcome(false, e.to_string()),
            }
        }
    }
    outcome(worst <= 1e-8, format!("max residual {worst:.1e} for d~ in {{16, -9}}"))
}

fn u0_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let a = 10.0 * k as f64 / 99.0;
        let u = u0(a).unwrap();
        worst = worst.max((u.cos() + a * sinc(u)).abs());
        worst = worst.max((a0(u).unwrap() - a).abs() / a.max(1.0));
    }
    let start = (u0(0.0).unwrap() - FRAC_PI_2).abs();
    outcome(worst <= 1e-12 && start <= 1e-12, format!("max residual {worst:.1e}, |u0(0) - pi/2| = {start:.1e}"))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    // `cargo test <filter>` and `--list` reach every target; run only when unfiltered
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list" || !a.starts_with('-')) {
        return;
    }
    let criteria: [Criterion; 11] = [
        ("dirac algebra anticommutation", 1, dirac_algebra),
        ("volterra spectral radius", 60, volterra),
        ("C2 inverse bound", 120, c2_bound),
        ("fourier fiber kernel", 60, fourier),
        ("rescaling round trips", 1, round_trips),
        ("krein vs finite differences", 600, krein_vs_fd),
        ("convergence rate", 1800, rate),
        ("magnetic ladder", 1800, magnetic),
        ("counterexample", 600, counterexample),
        ("unitary equivalence", 120, unitary),
        ("u0/a0 suite", 1, u0_suite),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let dt = t.elapsed();
        let pass = o.pass && dt <= Duration::from_secs(*limit);
        failed += usize::from(!pass);
        println!(
            "criterion {:2} {name}: {} ({}; {:.2} s, limit {limit} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            dt.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
