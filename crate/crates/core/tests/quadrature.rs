//! Normalization of the analytic densities checked by composite Simpson
//! quadrature against closed forms derived independently of the code.

use centroid_core::states::{default_noon_sigma, CatState, JointGaussianState, NoonState};

/// Composite Simpson integral of f over [-w, w]^2 with n intervals per axis
/// (n even).
fn simpson_2d<F: Fn(f64, f64) -> f64>(f: F, w: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = 2.0 * w / n as f64;
    let coeff = |i: usize| -> f64 {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut acc = 0.0;
    for i in 0..=n {
        let x = -w + h * i as f64;
        let ci = coeff(i);
        let mut inner = 0.0;
        for j in 0..=n {
            let y = -w + h * j as f64;
            inner += coeff(j) * f(x, y);
        }
        acc += ci * inner;
    }
    acc * h * h / 9.0
}

#[test]
fn noon_density_integrates_to_one() {
    // The symbolic prefactor 2 (dk/sqrt(pi))^N is the true normalization.
    let s = NoonState::new(2, default_noon_sigma()).unwrap();
    let integral = simpson_2d(|x, y| s.density(&[x, y]).unwrap(), 14.0, 2800);
    assert!(
        (integral - 1.0).abs() < 1e-6,
        "NOON N=2 normalization: {integral}"
    );
}

#[test]
fn jg_density_integral_matches_closed_form() {
    // exp(-2 N B^2 y0^2 - 2 beta^2 y1^2) integrates to
    // sqrt(pi / (2 N B^2)) * sqrt(pi / (2 beta^2)).
    let (b, beta) = (0.8f64, 1.3f64);
    let s = JointGaussianState::new(2, b, beta).unwrap();
    let integral = simpson_2d(|x, y| s.density(&[x, y]).unwrap(), 6.0, 2400);
    let pi = std::f64::consts::PI;
    let expected = (pi / (4.0 * b * b)).sqrt() * (pi / (2.0 * beta * beta)).sqrt();
    assert!(
        (integral - expected).abs() < 1e-6 * expected,
        "JG integral {integral}, closed form {expected}"
    );
}

#[test]
fn cat_density_integral_matches_closed_form() {
    // In the dimensionless position units used here the correctly normalized
    // two-mode density integrates to 1/(2 pi)^2; the constant was derived by
    // hand from the Gaussian and cosh moment integrals for general phase.
    let pi = std::f64::consts::PI;
    for (alpha, phi) in [(1.0, 0.7), (1.0, pi / 2.0), (0.6, 0.0), (2.0, 1.1)] {
        let s = CatState::new(alpha, phi).unwrap();
        let integral = simpson_2d(|x, y| s.density(x, y), 1.6, 2400);
        let expected = 1.0 / (4.0 * pi * pi);
        assert!(
            (integral - expected).abs() < 1e-6 * expected,
            "cat(|a|={alpha}, phi={phi}) integral {integral}, expected {expected}"
        );
    }
}
