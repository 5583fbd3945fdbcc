use std::f64::consts::PI;

use hierarg::equilibria::{reconstruct_orbit, Sign};
use hierarg::field_grid::{grid_points, inverse_transform, transform};
use hierarg::{Error, GridFunction, NormKind, Parity};

// direct O(N²) sine/cosine series on the grid
fn sine_sum(a: &[f64], x: f64) -> f64 {
    a.iter().enumerate().map(|(i, c)| c * ((i + 1) as f64 * x).sin()).sum()
}

fn cosine_sum(b: &[f64], x: f64) -> f64 {
    b.iter().enumerate().map(|(i, c)| c * (i as f64 * x).cos()).sum()
}

fn band_limited(modes: usize, seed: u64) -> Vec<f64> {
    let mut s = seed;
    (0..modes)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

#[test]
fn sine_samples_give_unit_first_coefficient() {
    let f = GridFunction::from_fn(Parity::Odd, 64, f64::sin).unwrap();
    assert!((f.coeffs()[0] - 1.0).abs() < 1e-14);
    assert!(f.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
}

#[test]
fn zero_function_has_zero_coefficients() {
    for parity in [Parity::Odd, Parity::Even] {
        let f = transform(&vec![0.0; 129], parity).unwrap();
        assert!(f.coeffs().iter().all(|&c| c == 0.0));
    }
}

#[test]
fn round_trip_matches_direct_sums() {
    for n in [16, 256, 1024] {
        let a = band_limited(n - 1, 7);
        let f = GridFunction::from_coeffs(Parity::Odd, n, a.clone()).unwrap();
        // the direct sum itself carries rounding of order eps·Σ|a|
        let tol = 1e-13 * a.iter().map(|c| c.abs()).sum::<f64>();
        for (k, x) in grid_points(n).iter().enumerate() {
            assert!((f.values()[k] - sine_sum(&a, *x)).abs() < tol);
        }
        let back = transform(f.values(), Parity::Odd).unwrap();
        let scale = a.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        for (c, d) in back.coeffs().iter().zip(&a) {
            assert!((c - d).abs() < 1e-12 * scale);
        }

        let b = band_limited(n + 1, 11);
        let g = GridFunction::from_coeffs(Parity::Even, n, b.clone()).unwrap();
        let tol = 1e-13 * b.iter().map(|c| c.abs()).sum::<f64>();
        for (k, x) in grid_points(n).iter().enumerate().step_by(7) {
            assert!((g.values()[k] - cosine_sum(&b, *x)).abs() < tol);
        }
        let again = inverse_transform(&transform(g.values(), Parity::Even).unwrap());
        for (u, v) in again.iter().zip(g.values()) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}

#[test]
fn non_power_of_two_is_rejected() {
    assert!(matches!(transform(&vec![0.0; 101], Parity::Odd), Err(Error::Sizing(_))));
    assert!(GridFunction::zero(Parity::Even, 96).is_err());
}

#[test]
fn odd_functions_vanish_at_ends() {
    let f = GridFunction::from_coeffs(Parity::Odd, 64, band_limited(63, 3)).unwrap();
    assert_eq!(f.values()[0], 0.0);
    assert!(f.values()[64].abs() < 1e-13);
}

#[test]
fn derivative_rules() {
    let f = GridFunction::from_fn(Parity::Odd, 64, f64::sin).unwrap().differentiate();
    assert_eq!(f.parity(), Parity::Even);
    for (x, v) in grid_points(64).iter().zip(f.values()) {
        assert!((v - x.cos()).abs() < 1e-13);
    }
    let c = GridFunction::from_fn(Parity::Even, 64, |_| 2.5).unwrap().differentiate();
    assert!(c.max_abs() < 1e-13);

    let s3 = GridFunction::from_coeffs(Parity::Odd, 64, vec![0.0, 0.0, 1.0]).unwrap().differentiate();
    assert_eq!(s3.coeffs()[3], 3.0);
    assert!(s3.coeffs().iter().enumerate().all(|(i, c)| i == 3 || *c == 0.0));
}

#[test]
fn antiderivative_of_sine() {
    let u = GridFunction::from_fn(Parity::Odd, 128, f64::sin).unwrap().integrate_from_zero().unwrap();
    for (x, v) in grid_points(128).iter().zip(u.values()) {
        assert!((v - (1.0 - x.cos())).abs() < 1e-14);
    }
    let z = GridFunction::zero(Parity::Odd, 128).unwrap().integrate_from_zero().unwrap();
    assert!(z.max_abs() == 0.0);
    assert!(GridFunction::zero(Parity::Even, 128).unwrap().integrate_from_zero().is_err());
}

#[test]
fn antiderivative_of_psi1_is_nonnegative() {
    let psi = reconstruct_orbit(1.0, 1, Sign::Plus).unwrap().psi;
    let phi = psi.integrate_from_zero().unwrap();
    assert!(phi.values()[0].abs() < 1e-14);
    assert!(phi.values().iter().all(|&v| v >= -1e-14));
    // ũ′ = ψ at off-grid points
    let d = phi.differentiate();
    for x in [0.3, 1.1, 2.9] {
        assert!((d.eval(x) - psi.eval(x)).abs() < 1e-12);
    }
}

#[test]
fn norm_examples() {
    let s = GridFunction::from_fn(Parity::Odd, 64, f64::sin).unwrap();
    assert!((s.norm(NormKind::L2) - PI.sqrt()).abs() < 1e-13);
    let s2 = GridFunction::from_fn(Parity::Odd, 64, |x| (2.0 * x).sin()).unwrap();
    assert!((s2.norm(NormKind::H1) - 2.0 * PI.sqrt()).abs() < 1e-13);
}

#[test]
fn parseval_matches_trapezoid() {
    let n = 256;
    for (parity, seed) in [(Parity::Odd, 1), (Parity::Even, 2)] {
        // band limit n/2 so f² is resolved by the trapezoid rule
        let f = GridFunction::from_coeffs(parity, n, band_limited(n / 2, seed)).unwrap();
        let h = PI / n as f64;
        let v = f.values();
        let trap: f64 = 2.0 * h * (v.iter().map(|x| x * x).sum::<f64>() - 0.5 * (v[0] * v[0] + v[n] * v[n]));
        let l2 = f.norm(NormKind::L2);
        assert!((l2 * l2 - trap).abs() < 1e-10 * trap);
    }
}

#[test]
fn dealiased_product_of_odd_functions_is_even() {
    let n = 64;
    let f = GridFunction::from_coeffs(Parity::Odd, n, band_limited(20, 5)).unwrap();
    let g = GridFunction::from_coeffs(Parity::Odd, n, band_limited(20, 9)).unwrap();
    let p = f.product(&g).unwrap();
    assert_eq!(p.parity(), Parity::Even);
    // band limits 20 + 20 < 64: the product is exact
    for x in [0.1, 0.7, 2.2, 3.0] {
        assert!((p.eval(x) - f.eval(x) * g.eval(x)).abs() < 1e-12);
        assert!((p.eval(-x) - p.eval(x)).abs() < 1e-12);
    }
}

#[test]
fn csv_and_json() {
    let f = GridFunction::from_fn(Parity::Odd, 16, |x| (3.0 * x).sin()).unwrap();
    let csv = f.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,f"));
    let row: Vec<f64> = lines.nth(5).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 5.0 * PI / 16.0);
    assert_eq!(csv.lines().count(), 18);

    let json: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
    assert_eq!(json["parity"], "odd");
    assert_eq!(json["n_modes"], 15);
    let back = GridFunction::from_json(&f.to_json()).unwrap();
    assert_eq!(back.coeffs(), f.coeffs());
    // values are resynthesized from the coefficients
    for (u, v) in back.values().iter().zip(f.values()) {
        assert!((u - v).abs() < 1e-15);
    }
}
