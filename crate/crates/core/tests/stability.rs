use std::f64::consts::PI;

use hierarg::equilibria::{reconstruct_orbit, Sign};
use hierarg::rg_flow::{evolve, step_v, FlowState, DEFAULT_DT};
use hierarg::stability::*;
use hierarg::{Error, GridFunction, Parity};

const W2_AT_0_35: f64 = 2.747220710056969;

fn odd(f: impl Fn(f64) -> f64) -> GridFunction {
    GridFunction::from_fn(Parity::Odd, 256, f).unwrap()
}

#[test]
fn weight_examples() {
    let p0 = weight_p(&GridFunction::zero(Parity::Odd, 256).unwrap()).unwrap();
    assert!(p0.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));

    let o = reconstruct_orbit(1.0, 1, Sign::Plus).unwrap();
    let p = weight_p(&o.psi).unwrap();
    assert_eq!(p.parity(), Parity::Even);
    assert!((p.values()[0] - 1.0).abs() < 1e-14);
    let n = p.grid();
    let phi_pi = o.psi.integrate_from_zero().unwrap().values()[n];
    assert!(phi_pi > 0.0);
    assert!((p.values()[n] - (-2.0 * phi_pi).exp()).abs() < 1e-12);
    assert!(p.values()[n] < 1.0);
    assert!(p.values().iter().all(|&v| v > 0.0));
    assert!((p.eval(1.3) - p.eval(-1.3)).abs() < 1e-15);
}

#[test]
fn zero_background_lowest_eigenvalues() {
    let m = assemble_l(Background::Zero, 3.0, 512).unwrap();
    assert!((m.eigenvalues(1)[0] - 1.0).abs() < 1e-4);
    let m = assemble_l(Background::Zero, 2.0, 512).unwrap();
    assert!(m.eigenvalues(1)[0].abs() < 1e-4);
    assert!(matches!(assemble_l(Background::Zero, 2.0, 8), Err(Error::InvalidArgument(_))));
}

#[test]
fn zero_background_second_order_convergence() {
    let alpha = 1.0;
    let err = |n: usize| {
        let ev = assemble_l(Background::Zero, alpha, n).unwrap().eigenvalues(5);
        ev.iter()
            .enumerate()
            .map(|(i, l)| (l - (alpha * ((i + 1) * (i + 1)) as f64 - 2.0)).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(64), err(128));
    assert!(e1 / e2 > 3.9 && e1 / e2 < 4.1, "{e1} {e2}");
}

#[test]
fn psi1_lowest_eigenvalue_against_refinement() {
    let o = reconstruct_orbit(1.0, 1, Sign::Plus).unwrap();
    let rep = spectrum(Background::Orbit(&o), 1.0, 3).unwrap();
    assert!(rep.eigenvalues[0] > 0.0);
    assert_eq!(rep.negative_count, 0);
    // Richardson on the (1024, 2048) pair
    let l = |n| assemble_l(Background::Orbit(&o), 1.0, n).unwrap().eigenvalues(1)[0];
    let (b, c) = (l(1024), l(2048));
    let oracle = (4.0 * c - b) / 3.0;
    assert!((rep.eigenvalues[0] - oracle).abs() < 1e-5, "{} vs {oracle}", rep.eigenvalues[0]);
    assert_eq!(rep.grid_sizes, [512, 1024]);
}

#[test]
fn negative_counts() {
    let rep = spectrum(Background::Zero, 0.4, 3).unwrap();
    assert_eq!(rep.negative_count, 2);
    assert!((rep.eigenvalues[0] + 1.6).abs() < 1e-6);
    assert!((rep.eigenvalues[1] + 0.4).abs() < 1e-6);

    let o2 = reconstruct_orbit(0.4, 2, Sign::Plus).unwrap();
    assert_eq!(spectrum(Background::Orbit(&o2), 0.4, 3).unwrap().negative_count, 1);
    let o1 = reconstruct_orbit(0.4, 1, Sign::Plus).unwrap();
    assert_eq!(spectrum(Background::Orbit(&o1), 0.4, 3).unwrap().negative_count, 0);

    for j in 1..=3 {
        let o = reconstruct_orbit(0.15, j, Sign::Plus).unwrap();
        assert_eq!(spectrum(Background::Orbit(&o), 0.15, 4).unwrap().negative_count, j as usize - 1);
    }
    assert!(smallest_eigenvalues(&assemble_l(Background::Zero, 1.0, 64).unwrap(), 11).is_err());
}

#[test]
fn criterium_on_zero_background() {
    let alpha = 3.0;
    let r = criterium_phi(Background::Zero, alpha).unwrap();
    assert_eq!(r.verdict, Verdict::Stable);
    assert!(r.first_zero.is_none());
    let k = (2.0 / alpha).sqrt();
    for &(x, phi) in r.trace.iter().step_by(97) {
        assert!((phi - (x * k).sin() / k).abs() < 1e-10);
    }

    let r = criterium_phi(Background::Zero, 1.5).unwrap();
    assert_eq!(r.verdict, Verdict::Unstable);
    let z = r.first_zero.unwrap();
    assert!((z - PI * 0.75f64.sqrt()).abs() < 1e-8);
}

#[test]
fn criterium_on_psi2() {
    let o = reconstruct_orbit(0.4, 2, Sign::Plus).unwrap();
    let r = criterium_phi(Background::Orbit(&o), 0.4).unwrap();
    assert_eq!(r.verdict, Verdict::Unstable);
    let z = r.first_zero.unwrap();
    assert!(z > 0.0 && z < 0.75 * PI);
    // before the true minimum of ψ₂⁺
    assert!(z < 2.0885);
}

#[test]
fn criterium_agrees_with_spectrum() {
    let cases = [(0.15, 1u32), (0.15, 2), (0.15, 3), (0.4, 1), (0.4, 2), (0.5, 1), (1.0, 1), (1.5, 1)];
    for (alpha, j) in cases {
        let o = reconstruct_orbit(alpha, j, Sign::Plus).unwrap();
        let bg = Background::Orbit(&o);
        let stable = spectrum(bg, alpha, 1).unwrap().eigenvalues[0] > 0.0;
        let r = criterium_phi(bg, alpha).unwrap();
        assert_eq!(r.verdict == Verdict::Stable, stable, "alpha {alpha}, j {j}");
        assert!(r.wronskian_deviation < 1e-6);
    }
    for alpha in [0.4, 1.0, 1.5, 2.5, 3.0] {
        let stable = spectrum(Background::Zero, alpha, 1).unwrap().eigenvalues[0] > 0.0;
        assert_eq!(criterium_phi(Background::Zero, alpha).unwrap().verdict == Verdict::Stable, stable);
    }
}

#[test]
fn identities_on_orbits() {
    let o = reconstruct_orbit(1.0, 1, Sign::Plus).unwrap();
    let r = identity_checks(&o).unwrap();
    assert!(r.chi_residual < 1e-6 && r.psi_prime_residual < 1e-6 && r.wronskian_deviation < 1e-6);

    let o = reconstruct_orbit(0.35, 2, Sign::Plus).unwrap();
    let r = identity_checks(&o).unwrap();
    assert!((r.wronskian_constant - 0.35 * W2_AT_0_35).abs() < 1e-6);
}

#[test]
fn liapunov_values() {
    assert_eq!(liapunov_v(&GridFunction::zero(Parity::Odd, 256).unwrap(), 1.0).unwrap(), 0.0);
    let v = liapunov_v(&odd(|x| 0.01 * x.sin()), 3.0).unwrap();
    let expect = 0.5 * (3.0 - 2.0) * PI * 1e-4;
    assert!((v - expect).abs() < 1e-3 * expect);
    let psi = reconstruct_orbit(1.0, 1, Sign::Plus).unwrap().psi;
    assert!(liapunov_v(&psi, 1.0).unwrap() < 0.0);
    assert!(matches!(liapunov_v(&odd(|x| 2.0 * x.sin()), 1.0), Err(Error::OutOfDomain(_))));
}

#[test]
fn liapunov_derivative() {
    for (alpha, j) in [(1.0, 1), (0.4, 2), (0.15, 3)] {
        let o = reconstruct_orbit(alpha, j, Sign::Plus).unwrap();
        let d = liapunov_vdot(&FlowState { t: 0.0, alpha, v: o.psi.clone(), dt: DEFAULT_DT }).unwrap();
        assert!(d.abs() < 1e-10);
    }
    let s = FlowState { t: 0.0, alpha: 3.0, v: odd(|x| 0.1 * x.sin()), dt: 1e-5 };
    let d = liapunov_vdot(&s).unwrap();
    assert!(d < 0.0);
    let next = step_v(&s).unwrap();
    let fd = (liapunov_v(&next.v, 3.0).unwrap() - liapunov_v(&s.v, 3.0).unwrap()) / 1e-5;
    assert!((fd - d).abs() < 1e-3 * d.abs(), "{fd} vs {d}");
}

#[test]
fn liapunov_decreases_along_flow() {
    let traj = evolve(&odd(|x| 0.1 * x.sin() + 0.05 * (2.0 * x).sin()), 0.7, 8.0, DEFAULT_DT, 50).unwrap();
    let vals: Vec<f64> = traj.states.iter().map(|s| liapunov_v(&s.v, 0.7).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn exports() {
    let o = reconstruct_orbit(0.4, 2, Sign::Plus).unwrap();
    let bg = Background::Orbit(&o);
    let rep = spectrum(bg, 0.4, 3).unwrap();
    let json = serde_json::to_value(SpectrumExport::new(0.4, bg, &rep)).unwrap();
    assert_eq!(json["branch"]["j"], 2);
    assert_eq!(json["branch"]["sign"], "+");
    assert_eq!(json["negative_count"], 1);
    assert_eq!(json["grid_sizes"].as_array().unwrap().len(), 2);
    let zero = serde_json::to_value(SpectrumExport::new(1.0, Background::Zero, &rep)).unwrap();
    assert!(zero["branch"].is_null());

    let csv = criterium_phi(bg, 0.4).unwrap().to_csv();
    assert!(csv.starts_with("x,phi\n"));
    assert_eq!(csv.lines().count(), 1 + SHOOTING_STEPS + 1);
}
