//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hierarg::discrete_rg::{continuum_compare, make_activity, rg_step, rg_step_direct, theta_kernel, ActivityKind};
use hierarg::equilibria::{
    branch_point, chicone_check, period, reconstruct_orbit, w_hat, OrbitQuery, Sign,
};
use hierarg::rg_flow::{check_monitors, decay_rate, evolve, Trajectory, VStepper, DEFAULT_DT};
use hierarg::stability::{criterium_phi, identity_residuals, liapunov_v, liapunov_vdot, spectrum, Background, Verdict};
use hierarg::{GridFunction, NormKind, Parity};
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c1() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.4, 1.0, 2.0, 3.0] {
        let rep = spectrum(Background::Zero, alpha, 5).map_err(|e| e.to_string())?;
        for (i, lam) in rep.eigenvalues.iter().enumerate() {
            let n = (i + 1) as f64;
            worst = worst.max((lam - (alpha * n * n - 2.0)).abs());
        }
    }
    ensure(worst < 1e-3, format!("max |lambda_n - (alpha n^2 - 2)| = {worst:.2e}"))
}

fn c2() -> Outcome {
    let t = period(OrbitQuery { alpha: 2.0, w0: 1e-6 }).map_err(|e| e.to_string())?.period;
    let err = (t - 2.0 * PI).abs();
    ensure(err < 1e-5, format!("T(2, 1e-6) = {t:.12}, |T - 2pi| = {err:.2e}"))
}

fn c3() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let alpha = rng.gen_range(0.05..4.0);
        let w0 = rng.gen_range(-3.0..0.99) / alpha;
        let a = period(OrbitQuery { alpha, w0 }).map_err(|e| e.to_string())?.period;
        let b = period(OrbitQuery { alpha: 1.0, w0: alpha * w0 }).map_err(|e| e.to_string())?.period;
        worst = worst.max((a - alpha.sqrt() * b).abs());
    }
    ensure(worst < 1e-10, format!("max scaling defect over 20 pairs = {worst:.2e}"))
}

fn c4() -> Outcome {
    let energies: Vec<f64> = (0..20).map(|i| 1e-4 * 1e5f64.powf(i as f64 / 19.0)).collect();
    let rep = chicone_check(&energies).map_err(|e| e.to_string())?;
    let min_d = rep.derivatives.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    ensure(
        rep.g_min > 0.0 && rep.g_at_zero == 0.0 && min_d > 0.0,
        format!("min g = {:.3e} at q = {:.3}, g(0) = {}, min dT/dE = {min_d:.3e}", rep.g_min, rep.g_min_at, rep.g_at_zero),
    )
}

fn c5() -> Outcome {
    let w1 = w_hat(1.0, 1).map_err(|e| e.to_string())?;
    let anchor = (w1 - 1.0).abs();
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut min_gap = f64::INFINITY;
    for i in 0..50 {
        let alpha = 0.1 + (1.99 - 0.1) * (i as f64 + 0.5) / 50.0;
        let b = branch_point(alpha, 1).map_err(|e| e.to_string())?;
        monotone &= b.w_hat < prev;
        // at small alpha 1/alpha - w1 is below one ulp of 1/alpha, so the
        // strict inequality is read off the separately computed gap
        min_gap = min_gap.min(b.gap);
        prev = b.w_hat;
    }
    ensure(
        anchor < 1e-5 && monotone && min_gap > 0.0,
        format!("w1(1) = {w1:.10} (|w1(1) - 1| = {anchor:.2e}), decreasing: {monotone}, min 1/alpha - w1 = {min_gap:.3e}"),
    )
}

fn c6() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for j in 1..=3u32 {
        let a = 2.0 / (j * j) as f64;
        let refuses = w_hat(a, j).is_err() && w_hat(a + 1e-3, j).is_err();
        let near = w_hat(a - 1e-3, j).map_err(|e| e.to_string())?;
        ok &= refuses && near < 1e-2;
        parts.push(format!("j={j}: refuses above {refuses}, w(alpha_j - 1e-3) = {near:.6}"));
    }
    ensure(ok, parts.join("; "))
}

fn c7() -> Outcome {
    let mut cases = vec![];
    for j in 1..=3 {
        cases.push((0.15, j));
    }
    for a in [0.5, 1.0, 1.5] {
        cases.push((a, 1));
    }
    let (mut h2, mut drift, mut stat, mut trans): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for (alpha, j) in cases {
        let plus = reconstruct_orbit(alpha, j, Sign::Plus).map_err(|e| e.to_string())?;
        let minus = reconstruct_orbit(alpha, j, Sign::Minus).map_err(|e| e.to_string())?;
        for o in [&plus, &minus] {
            h2 = h2.max(o.h2_residual);
            drift = drift.max(o.energy_drift);
            stat = stat.max(o.stationary_residual());
        }
        if j % 2 == 1 {
            for k in 0..=400 {
                let x = PI * k as f64 / 400.0;
                trans = trans.max((minus.psi.eval(x) - plus.psi.eval(x + PI)).abs());
            }
        }
    }
    ensure(
        h2 < 1e-8 && drift < 1e-10 && stat < 1e-6 && trans < 1e-8,
        format!("h2 {h2:.1e}, drift {drift:.1e}, stationary {stat:.1e}, translation {trans:.1e}"),
    )
}

fn c8() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let cases = [(0.5, 1u32), (1.0, 1), (1.5, 1), (0.15, 1), (0.15, 2), (0.15, 3)];
    for (alpha, j) in cases {
        let o = reconstruct_orbit(alpha, j, Sign::Plus).map_err(|e| e.to_string())?;
        let neg = spectrum(Background::Orbit(&o), alpha, 4).map_err(|e| e.to_string())?.negative_count;
        let verdict = criterium_phi(Background::Orbit(&o), alpha).map_err(|e| e.to_string())?.verdict;
        let agree = (verdict == Verdict::Stable) == (neg == 0) && verdict != Verdict::Inconclusive;
        ok &= agree && neg == j as usize - 1;
        parts.push(format!("({alpha},{j}): {neg} neg, {verdict:?}"));
    }
    ensure(ok, parts.join("; "))
}

fn c9() -> Outcome {
    let (mut chi, mut pp, mut wr): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (alpha, j) in [(0.5, 1), (1.0, 1), (0.15, 1), (0.4, 2), (0.15, 2)] {
        let o = reconstruct_orbit(alpha, j, Sign::Plus).map_err(|e| e.to_string())?;
        let r = identity_residuals(&o).map_err(|e| e.to_string())?;
        chi = chi.max(r.chi_residual);
        pp = pp.max(r.psi_prime_residual);
        wr = wr.max(r.wronskian_deviation);
    }
    ensure(
        chi < 1e-6 && pp < 1e-6 && wr < 1e-6,
        format!("chi {chi:.1e}, L[psi]psi' {pp:.1e}, wronskian {wr:.1e}"),
    )
}

fn v0() -> GridFunction {
    GridFunction::from_fn(Parity::Odd, 256, |x| 0.1 * x.sin()).expect("grid")
}

fn run(alpha: f64) -> Result<Trajectory, String> {
    evolve(&v0(), alpha, 20.0, DEFAULT_DT, 100).map_err(|e| e.to_string())
}

fn c10(run1: &Trajectory) -> Outcome {
    let run3 = run(3.0)?;
    let l2 = run3.last().v.norm(NormKind::L2);
    let rate = decay_rate(&run3).map_err(|e| e.to_string())?;
    let psi = reconstruct_orbit(1.0, 1, Sign::Plus).map_err(|e| e.to_string())?.psi;
    let h1 = run1.last().v.sub(&psi).map_err(|e| e.to_string())?.norm(NormKind::H1);
    ensure(
        l2 < 1e-8 && (rate - 1.0).abs() < 0.02 && h1 < 1e-5,
        format!("alpha=3: |v(20)| = {l2:.2e}, rate {rate:.4}; alpha=1: H1 distance to psi1+ = {h1:.2e}"),
    )
}

fn c11(run1: &Trajectory) -> Outcome {
    let mut vals = Vec::new();
    for s in &run1.states {
        vals.push(liapunov_v(&s.v, 1.0).map_err(|e| e.to_string())?);
        if liapunov_vdot(s).map_err(|e| e.to_string())? > 0.0 {
            return Err(format!("Vdot > 0 at t = {}", s.t));
        }
    }
    let rise = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    // second-order one-sided difference from two extra steps at each probe
    let stepper = VStepper::new(1.0, 256, DEFAULT_DT).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let s = &run1.states[2 * k];
        let v1 = stepper.step(&s.v).map_err(|e| e.to_string())?;
        let v2 = stepper.step(&v1).map_err(|e| e.to_string())?;
        let f = |v: &GridFunction| liapunov_v(v, 1.0);
        let fd = (-3.0 * f(&s.v).unwrap() + 4.0 * f(&v1).unwrap() - f(&v2).unwrap()) / (2.0 * DEFAULT_DT);
        let exact = liapunov_vdot(s).map_err(|e| e.to_string())?;
        worst = worst.max(((fd - exact) / exact).abs());
    }
    ensure(
        rise <= 1e-9 && worst < 0.01,
        format!("largest V increase {rise:.2e}, worst relative dV/dt mismatch {worst:.2e}"),
    )
}

fn c12(run1: &Trajectory) -> Outcome {
    let run3 = run(3.0)?;
    let mut count = 0;
    let mut margin = f64::INFINITY;
    let mut slope = f64::NEG_INFINITY;
    for (traj, alpha) in [(run1, 1.0), (&run3, 3.0)] {
        for s in &traj.states {
            let m = check_monitors(&s.v, alpha, s.t).map_err(|e| e.to_string())?;
            if !m.ok() {
                return Err(format!("bounds fail at alpha = {alpha}, t = {}", s.t));
            }
            count += 1;
            margin = margin.min(m.strip_margin);
            slope = slope.max(m.max_alpha_vx);
        }
    }
    ensure(
        !run1.monitor_warning && !run3.monitor_warning,
        format!("{count} snapshots, min strip margin {margin:.3e}, max alpha v_x {slope:.4}"),
    )
}

fn c13() -> Outcome {
    let mut poisson: f64 = 0.0;
    for phi in [-3.0, -1.0, 0.0, 0.5, 1.0, 2.5, PI] {
        for beta in [4.0 * PI, 8.0 * PI, 12.0 * PI] {
            for l in [1.01, 1.2, 2.0, 4.0] {
                poisson = poisson.max(theta_kernel(phi, beta, l).map_err(|e| e.to_string())?.discrepancy);
            }
        }
    }
    let beta = 4.0 * PI;
    let h = make_activity(ActivityKind::Hardcore, 0.01, 64, beta).map_err(|e| e.to_string())?;
    let fourier = rg_step(&h.to_fourier(512), beta, 2.0).map_err(|e| e.to_string())?.to_charges(beta, 255);
    let direct = rg_step_direct(&h, 2).map_err(|e| e.to_string())?;
    let fd = (-255i64..=255).map(|q| (fourier.get(q) - direct.get(q)).abs()).fold(0.0, f64::max);
    let table = continuum_compare(12.0 * PI, 0.1, 1.0, &[8, 16, 32, 64, 128]).map_err(|e| e.to_string())?;
    let ratios = table.ratios();
    let ok_ratios = ratios.iter().all(|r| (0.4..=0.6).contains(r));
    ensure(
        poisson < 1e-10 && fd < 1e-12 && ok_ratios,
        format!("Poisson {poisson:.1e}, Fourier vs direct {fd:.1e}, gap ratios {ratios:.3?}"),
    )
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() -> ExitCode {
    let start = Instant::now();
    let run1 = run(1.0);
    let t_run1 = start.elapsed();
    let with_run = |f: fn(&Trajectory) -> Outcome| -> Outcome {
        match &run1 {
            Ok(r) => f(r),
            Err(e) => Err(format!("alpha = 1 flow failed: {e}")),
        }
    };
    let criteria: Vec<(u32, u64, Check)> = vec![
        (1, 5, Box::new(c1)),
        (2, 1, Box::new(c2)),
        (3, 2, Box::new(c3)),
        (4, 5, Box::new(c4)),
        (5, 30, Box::new(c5)),
        (6, 10, Box::new(c6)),
        (7, 20, Box::new(c7)),
        (8, 60, Box::new(c8)),
        (9, 10, Box::new(c9)),
        (10, 60, Box::new(move || with_run(c10))),
        (11, 30, Box::new(move || with_run(c11))),
        (12, 60, Box::new(move || with_run(c12))),
        (13, 120, Box::new(c13)),
    ];
    let mut failed = 0;
    for (id, budget, check) in criteria {
        let t0 = Instant::now();
        let outcome = check();
        let mut dt = t0.elapsed();
        if id == 10 {
            dt += t_run1;
        }
        let in_time = dt <= Duration::from_secs(budget);
        let (pass, msg) = match outcome {
            Ok(m) => (in_time, m),
            Err(m) => (false, m),
        };
        if !pass {
            failed += 1;
        }
        let label = if pass { "PASS" } else { "FAIL" };
        let late = if in_time { "" } else { " over budget" };
        println!("criterion {id:>2}: {label} [{:.2}s / {budget}s{late}] {msg}", dt.as_secs_f64());
    }
    println!("{} of 13 criteria passed", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
