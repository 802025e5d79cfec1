//! Distributional tests of the event sampler against independent oracles:
//! Kolmogorov-Smirnov on the centroid-direction marginal, moment checks
//! against quadrature, and a two-dimensional chi-square goodness of fit.

use centroid_core::sampler::sample_events;
use centroid_core::states::{default_noon_sigma, JointGaussianState, NoonState, StateModel};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn noon2() -> StateModel {
    StateModel::Noon(NoonState::new(2, default_noon_sigma()).unwrap())
}

/// Fine-grid trapezoid CDF of the centroid-mode density, independent of the
/// sampler's internal tabulation (different resolution and code path).
struct OracleCdf {
    lo: f64,
    step: f64,
    cdf: Vec<f64>,
}

impl OracleCdf {
    fn build(state: &StateModel, half_width: f64, points: usize) -> OracleCdf {
        let step = 2.0 * half_width / (points - 1) as f64;
        let mut cdf = Vec::with_capacity(points);
        let mut acc = 0.0;
        let mut prev = state.centroid_mode_density(-half_width);
        cdf.push(0.0);
        for i in 1..points {
            let x = -half_width + step * i as f64;
            let v = state.centroid_mode_density(x);
            acc += 0.5 * (prev + v) * step;
            prev = v;
            cdf.push(acc);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        OracleCdf {
            lo: -half_width,
            step,
            cdf,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (x - self.lo) / self.step;
        if t <= 0.0 {
            return 0.0;
        }
        let i = t.floor() as usize;
        if i + 1 >= self.cdf.len() {
            return 1.0;
        }
        let frac = t - i as f64;
        self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])
    }
}

#[test]
fn ks_statistic_of_centroid_mode_draws() {
    let state = noon2();
    let n = 1_000_000usize;
    let batch = sample_events(state.clone(), n, 2024).unwrap();
    let mut ys: Vec<f64> = batch
        .rows()
        .map(|r| (r[0] + r[1]) / std::f64::consts::SQRT_2)
        .collect();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let oracle = OracleCdf::build(&state, state.centroid_mode_half_width(), 400_001);
    let mut d = 0.0f64;
    for (i, &y) in ys.iter().enumerate() {
        let f = oracle.eval(y);
        let hi = (i + 1) as f64 / n as f64 - f;
        let lo = f - i as f64 / n as f64;
        d = d.max(hi).max(lo);
    }
    assert!(d < 0.002, "KS statistic D = {d}");
}

#[test]
fn noon_photon_variance_matches_quadrature() {
    let state = noon2();
    // Var(x_photon) = (Var(y0) + (N-1) Var(y_transverse)) / N with
    // Var(y0) from quadrature over the modulated centroid-mode density.
    let hw = state.centroid_mode_half_width();
    let m = 400_001usize;
    let step = 2.0 * hw / (m - 1) as f64;
    let (mut z0, mut z2) = (0.0f64, 0.0f64);
    for i in 0..m {
        let y = -hw + step * i as f64;
        let w = if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
        let v = state.centroid_mode_density(y) * w;
        z0 += v;
        z2 += v * y * y;
    }
    let var_y0 = z2 / z0;
    let sigma = default_noon_sigma();
    let var_t = sigma * sigma / (8.0 * std::f64::consts::PI * std::f64::consts::PI);
    let expected = (var_y0 + var_t) / 2.0;

    let batch = sample_events(state, 1_000_000, 7).unwrap();
    let xs = batch.positions();
    let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
    let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
    assert!(
        (var - expected).abs() < 0.01 * expected,
        "sample variance {var}, quadrature {expected}"
    );
}

#[test]
fn jg_centroid_rms_is_inverse_2nb() {
    // rms of X = (x1 + .. + xN)/N is 1/(2NB), independent of beta.
    for (n, b, beta) in [(2usize, 1.0, 1.0), (3, 0.5, 1.2)] {
        let state = StateModel::Jg(JointGaussianState::new(n, b, beta).unwrap());
        let batch = sample_events(state, 1_000_000, 99).unwrap();
        let nf = n as f64;
        let ms: f64 = batch
            .rows()
            .map(|r| {
                let x = r.iter().sum::<f64>() / nf;
                x * x
            })
            .sum::<f64>()
            / batch.n_events() as f64;
        let rms = ms.sqrt();
        let expected = 1.0 / (2.0 * nf * b);
        assert!(
            (rms - expected).abs() < 0.01 * expected,
            "N={n}: rms {rms}, expected {expected}"
        );
    }
}

#[test]
fn chi_square_2d_joint_density() {
    // 50x50 cells over [-7, 7]^2 against cell masses from 5-point
    // Gauss-Legendre quadrature of the normalized NOON density.
    let state = NoonState::new(2, default_noon_sigma()).unwrap();
    let n_events = 1_000_000usize;
    let batch = sample_events(noon2(), n_events, 31).unwrap();

    const CELLS: usize = 50;
    let lo = -7.0f64;
    let w = 14.0 / CELLS as f64;
    // 5-point Gauss-Legendre nodes/weights on [-1, 1]
    let gx = [
        -0.906179845938664,
        -0.5384693101056831,
        0.0,
        0.5384693101056831,
        0.906179845938664,
    ];
    let gw = [
        0.23692688505618908,
        0.47862867049936647,
        0.5688888888888889,
        0.47862867049936647,
        0.23692688505618908,
    ];
    let mut expected = vec![0.0f64; CELLS * CELLS];
    for i in 0..CELLS {
        for j in 0..CELLS {
            let cx = lo + (i as f64 + 0.5) * w;
            let cy = lo + (j as f64 + 0.5) * w;
            let mut mass = 0.0;
            for (a, wa) in gx.iter().zip(&gw) {
                for (b, wb) in gx.iter().zip(&gw) {
                    let x = cx + 0.5 * w * a;
                    let y = cy + 0.5 * w * b;
                    mass += wa * wb * state.density(&[x, y]).unwrap();
                }
            }
            expected[i * CELLS + j] = mass * 0.25 * w * w * n_events as f64;
        }
    }
    let inside: f64 = expected.iter().sum();
    let rest_expected = n_events as f64 - inside;

    let mut observed = vec![0u64; CELLS * CELLS];
    let mut rest_observed = 0u64;
    for row in batch.rows() {
        let i = ((row[0] - lo) / w).floor();
        let j = ((row[1] - lo) / w).floor();
        if (0.0..CELLS as f64).contains(&i) && (0.0..CELLS as f64).contains(&j) {
            observed[i as usize * CELLS + j as usize] += 1;
        } else {
            rest_observed += 1;
        }
    }

    // merge thin cells (and everything outside the square) into one pool
    let mut chi2 = 0.0f64;
    let mut cells = 0usize;
    let mut pool_exp = rest_expected;
    let mut pool_obs = rest_observed as f64;
    for (e, &o) in expected.iter().zip(&observed) {
        if *e >= 10.0 {
            let diff = o as f64 - e;
            chi2 += diff * diff / e;
            cells += 1;
        } else {
            pool_exp += e;
            pool_obs += o as f64;
        }
    }
    if pool_exp > 0.0 {
        let diff = pool_obs - pool_exp;
        chi2 += diff * diff / pool_exp;
        cells += 1;
    }
    let dof = (cells - 1) as f64;
    let critical = ChiSquared::new(dof).unwrap().inverse_cdf(0.999);
    assert!(
        chi2 < critical,
        "chi2 = {chi2:.1} over {cells} cells exceeds the 0.1% critical value {critical:.1}"
    );
}

#[test]
fn sampling_is_identical_across_thread_pools() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_events(noon2(), 100_000, 5).unwrap())
    };
    let single = run(1);
    let quad = run(4);
    assert_eq!(single.positions(), quad.positions());
}
