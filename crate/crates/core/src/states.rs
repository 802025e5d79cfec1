//! Analytic position-space probability densities for the three trial-state
//! families, their centroid-direction reference profiles, and derived scalar
//! quantities.
//!
//! All positions are dimensionless, in units of the transverse wavelength.
//! Densities are evaluated up to the overall normalization constant; every
//! downstream comparison is scale-fitted, so only the shape matters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

/// N-photon NOON state with Gaussian transverse momentum profile of
/// dimensionless width `sigma` (the ratio of the carrier wave vector to the
/// momentum spread).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoonState {
    #[serde(rename = "n")]
    pub n_photons: usize,
    pub sigma: f64,
}

/// The default width used throughout the numerical experiments,
/// sigma = 4*sqrt(2)*pi.
pub fn default_noon_sigma() -> f64 {
    4.0 * std::f64::consts::SQRT_2 * PI
}

impl NoonState {
    pub fn new(n_photons: usize, sigma: f64) -> Result<Self> {
        let state = NoonState { n_photons, sigma };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.n_photons) {
            return Err(Error::UnsupportedPhotonNumber(self.n_photons));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "NOON width sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Momentum spread in wavelength-inverse units, Delta_k = 2*pi / sigma.
    pub fn delta_k(&self) -> f64 {
        TWO_PI / self.sigma
    }

    /// 2 * (Delta_k / sqrt(pi))^N, the symbolic normalization prefactor.
    pub fn prefactor(&self) -> f64 {
        2.0 * (self.delta_k() / PI.sqrt()).powi(self.n_photons as i32)
    }

    /// Joint density 2 (Dk/sqrt(pi))^N exp(-(4 pi^2/sigma^2) sum x_i^2)
    /// cos^2(2 pi sum x_i).
    pub fn density(&self, xs: &[f64]) -> Result<f64> {
        if xs.len() != self.n_photons {
            return Err(Error::DimensionMismatch {
                expected: self.n_photons,
                got: xs.len(),
            });
        }
        let sq: f64 = xs.iter().map(|x| x * x).sum();
        let sum: f64 = xs.iter().sum();
        let gauss = (-4.0 * PI * PI / (self.sigma * self.sigma) * sq).exp();
        let c = (TWO_PI * sum).cos();
        Ok(self.prefactor() * gauss * c * c)
    }

    /// Density of the symmetric transformed coordinate y = sum x_i / sqrt(N),
    /// up to normalization: exp(-(4 pi^2/sigma^2) y^2) cos^2(2 pi sqrt(N) y).
    pub fn centroid_mode_density(&self, y: f64) -> f64 {
        let gauss = (-4.0 * PI * PI / (self.sigma * self.sigma) * y * y).exp();
        let c = (TWO_PI * (self.n_photons as f64).sqrt() * y).cos();
        gauss * c * c
    }

    /// Standard deviation of each of the N-1 non-centroid transformed
    /// coordinates: sigma / (2 sqrt(2) pi).
    pub fn transverse_sigma(&self) -> f64 {
        self.sigma / (2.0 * std::f64::consts::SQRT_2 * PI)
    }
}

/// Jointly Gaussian N-photon state, parameterized by the width `b_width` of
/// the average photon momentum and the width `beta_width` of the momenta
/// relative to the average, both in wavelength-inverse units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointGaussianState {
    #[serde(rename = "n")]
    pub n_photons: usize,
    #[serde(rename = "b")]
    pub b_width: f64,
    #[serde(rename = "beta")]
    pub beta_width: f64,
}

/// Scalar quantities derived from a jointly Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JgScalars {
    /// <k_n^2> = B^2 + (1 - 1/N) beta^2
    pub k_variance: f64,
    /// Spot-size reduction factor r = sqrt(N) B / sqrt(<k_n^2>), in (0, sqrt(N)].
    pub r: f64,
    /// Standard quantum limit width W_C = 1 / (2 sqrt(N <k_n^2>)).
    pub w_classical: f64,
    /// Heisenberg limit width W_min = 1 / (2 N sqrt(<k_n^2>)).
    pub w_min: f64,
}

impl JointGaussianState {
    pub fn new(n_photons: usize, b_width: f64, beta_width: f64) -> Result<Self> {
        let state = JointGaussianState {
            n_photons,
            b_width,
            beta_width,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.n_photons) {
            return Err(Error::UnsupportedPhotonNumber(self.n_photons));
        }
        // Positive definiteness via the two closed-form eigenvalues of the
        // inverse covariance: N B^2 along the symmetric direction, beta^2
        // along every orthogonal direction.
        let sym = self.n_photons as f64 * self.b_width * self.b_width;
        let orth = self.beta_width * self.beta_width;
        if !(self.b_width > 0.0) || !sym.is_finite() {
            return Err(Error::NotPositiveDefinite(sym));
        }
        if !(self.beta_width > 0.0) || !orth.is_finite() {
            return Err(Error::NotPositiveDefinite(orth));
        }
        Ok(())
    }

    /// True when beta/sqrt(N) <= B <= sqrt(<k_n^2>), the range between the
    /// classical (independent-photon) limit and the Heisenberg limit.
    pub fn in_quantum_range(&self) -> bool {
        let n = self.n_photons as f64;
        let k2 = self.scalars().k_variance;
        self.b_width >= self.beta_width / n.sqrt() && self.b_width <= k2.sqrt()
    }

    pub fn scalars(&self) -> JgScalars {
        let n = self.n_photons as f64;
        let k_variance = self.b_width * self.b_width + (1.0 - 1.0 / n) * self.beta_width * self.beta_width;
        JgScalars {
            k_variance,
            r: n.sqrt() * self.b_width / k_variance.sqrt(),
            w_classical: 1.0 / (2.0 * (n * k_variance).sqrt()),
            w_min: 1.0 / (2.0 * n * k_variance.sqrt()),
        }
    }

    /// Unnormalized density exp(-2 x^T B^-1 x), evaluated through the
    /// eigendecomposition of the inverse covariance.
    pub fn density(&self, xs: &[f64]) -> Result<f64> {
        if xs.len() != self.n_photons {
            return Err(Error::DimensionMismatch {
                expected: self.n_photons,
                got: xs.len(),
            });
        }
        let n = self.n_photons as f64;
        let sq: f64 = xs.iter().map(|x| x * x).sum();
        let sum: f64 = xs.iter().sum();
        // Projection onto the symmetric direction (1,..,1)/sqrt(N).
        let p = sum / n.sqrt();
        let orth_sq = (sq - p * p).max(0.0);
        let quad = n * self.b_width * self.b_width * p * p
            + self.beta_width * self.beta_width * orth_sq;
        Ok((-2.0 * quad).exp())
    }

    /// Density of the symmetric transformed coordinate, exp(-2 N B^2 y^2).
    pub fn centroid_mode_density(&self, y: f64) -> f64 {
        (-2.0 * self.n_photons as f64 * self.b_width * self.b_width * y * y).exp()
    }

    /// Standard deviation of the symmetric transformed coordinate,
    /// 1 / (2 sqrt(N) B).
    pub fn centroid_mode_sigma(&self) -> f64 {
        1.0 / (2.0 * (self.n_photons as f64).sqrt() * self.b_width)
    }

    /// Standard deviation of each of the N-1 relative coordinates, 1/(2 beta).
    pub fn relative_mode_sigma(&self) -> f64 {
        1.0 / (2.0 * self.beta_width)
    }
}

fn default_x0() -> f64 {
    1.0
}

/// Correlated coherent cat state |alpha>|alpha> + |-alpha>|-alpha> with
/// alpha = alpha_mag * exp(i alpha_phase). Detection events with one photon
/// per mode (two photons total) are the analyzed case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatState {
    pub alpha_mag: f64,
    pub alpha_phase: f64,
    /// Ground-state length scale; absorbed by the dimensionless scaling
    /// x = 2 pi x0 xbar and irrelevant to all shapes.
    #[serde(default = "default_x0")]
    pub x0: f64,
}

impl CatState {
    pub fn new(alpha_mag: f64, alpha_phase: f64) -> Result<Self> {
        let state = CatState {
            alpha_mag,
            alpha_phase,
            x0: 1.0,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_mag >= 0.0) || !self.alpha_mag.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cat |alpha| must be non-negative and finite, got {}",
                self.alpha_mag
            )));
        }
        if !self.alpha_phase.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cat phase must be finite, got {}",
                self.alpha_phase
            )));
        }
        if !(self.x0 > 0.0) || !self.x0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cat x0 must be positive and finite, got {}",
                self.x0
            )));
        }
        Ok(())
    }

    /// Normalization factor N = 1 / sqrt(2 (1 + exp(-4 |alpha|^2))), in (1/2, 1/sqrt(2)].
    pub fn normalization(&self) -> f64 {
        1.0 / (2.0 * (1.0 + (-4.0 * self.alpha_mag * self.alpha_mag).exp())).sqrt()
    }

    /// log of |cosh(z)|^2 with z = 2 sqrt(2) pi alpha (x1 + x2), evaluated in
    /// real arithmetic as (cosh(2 Re z) + cos(2 Im z)) / 2 with the large
    /// cosh argument factored out to avoid overflow.
    fn log_cosh_sq(&self, s: f64) -> f64 {
        let coef = 4.0 * std::f64::consts::SQRT_2 * PI * self.alpha_mag;
        let a = coef * self.alpha_phase.cos(); // coefficient of s in 2 Re z
        let b = coef * self.alpha_phase.sin(); // coefficient of s in 2 Im z
        let u = (a * s).abs();
        // (cosh(as) + cos(bs)) / 2 = e^u (1 + e^-2u + 2 e^-u cos(bs)) / 4
        let inner = 1.0 + (-2.0 * u).exp() + 2.0 * (-u).exp() * (b * s).cos();
        if inner <= 0.0 {
            f64::NEG_INFINITY
        } else {
            u + inner.ln() - 4f64.ln()
        }
    }

    /// |psi_ccc(x1, x2)|^2 for general phase, up to the 1/x0^2 dimensional
    /// factor: Gaussian envelope times the squared modulus of the cosh
    /// factor. For alpha_phase = pi/2 this reduces exactly to
    /// envelope * cos^2(2 pi sqrt(2) |alpha| (x1 + x2)).
    pub fn density(&self, x1: f64, x2: f64) -> f64 {
        let norm = self.normalization();
        let s = x1 + x2;
        let cos_phi = self.alpha_phase.cos();
        let log_rho = -4.0 * PI * PI * (x1 * x1 + x2 * x2)
            - 4.0 * self.alpha_mag * self.alpha_mag * cos_phi * cos_phi
            + self.log_cosh_sq(s)
            + (4.0 * norm * norm / PI).ln();
        log_rho.exp()
    }

    /// Density of the symmetric transformed coordinate y = (x1 + x2)/sqrt(2),
    /// up to normalization.
    pub fn centroid_mode_density(&self, y: f64) -> f64 {
        let s = std::f64::consts::SQRT_2 * y;
        let cos_phi = self.alpha_phase.cos();
        let log_g = -4.0 * PI * PI * y * y
            - 4.0 * self.alpha_mag * self.alpha_mag * cos_phi * cos_phi
            + self.log_cosh_sq(s);
        log_g.exp()
    }

    /// Standard deviation of the antisymmetric transformed coordinate,
    /// 1 / (2 sqrt(2) pi).
    pub fn transverse_sigma(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::SQRT_2 * PI)
    }

    /// Probability to detect n1 photons in mode 1 and n2 in mode 2:
    /// 2 N^2 e^(-2|a|^2) / (n1! n2!) |a|^(2(n1+n2)) [1 + (-1)^(n1+n2)].
    pub fn photon_number_probability(&self, n1: u32, n2: u32) -> f64 {
        if (n1 + n2) % 2 == 1 {
            return 0.0;
        }
        if self.alpha_mag == 0.0 {
            // Vacuum: all weight on (0, 0).
            return if n1 == 0 && n2 == 0 { 1.0 } else { 0.0 };
        }
        let norm = self.normalization();
        let a2 = self.alpha_mag * self.alpha_mag;
        let log_p = (4.0 * norm * norm).ln() - 2.0 * a2
            + f64::from(n1 + n2) * a2.ln()
            - ln_factorial(n1)
            - ln_factorial(n2);
        log_p.exp()
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// One of the three trial-state families. The JSON representation is tagged:
/// `{"type": "noon", "n": 2, "sigma": 17.77}`,
/// `{"type": "jg", "n": 2, "b": 1.0, "beta": 1.0}`,
/// `{"type": "cat", "alpha_mag": 1.0, "alpha_phase": 1.5708}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum StateModel {
    Noon(NoonState),
    Jg(JointGaussianState),
    Cat(CatState),
}

impl StateModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            StateModel::Noon(s) => s.validate(),
            StateModel::Jg(s) => s.validate(),
            StateModel::Cat(s) => s.validate(),
        }
    }

    pub fn n_photons(&self) -> usize {
        match self {
            StateModel::Noon(s) => s.n_photons,
            StateModel::Jg(s) => s.n_photons,
            StateModel::Cat(_) => 2,
        }
    }

    /// Joint position-space density at `xs` (length N), up to normalization
    /// where the family leaves the constant open.
    pub fn density(&self, xs: &[f64]) -> Result<f64> {
        match self {
            StateModel::Noon(s) => s.density(xs),
            StateModel::Jg(s) => s.density(xs),
            StateModel::Cat(s) => {
                if xs.len() != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        got: xs.len(),
                    });
                }
                Ok(s.density(xs[0], xs[1]))
            }
        }
    }

    /// The recovery target: the unnormalized density on the diagonal,
    /// density(X, X, ..., X).
    pub fn centroid_reference(&self, x: f64) -> f64 {
        let xs = vec![x; self.n_photons()];
        self.density(&xs).expect("diagonal evaluation cannot mismatch")
    }

    /// Density of the symmetric transformed coordinate y = sum x_i / sqrt(N),
    /// up to normalization. This is the one-dimensional profile sampled via
    /// the tabulated inverse CDF for NOON and cat states.
    pub fn centroid_mode_density(&self, y: f64) -> f64 {
        match self {
            StateModel::Noon(s) => s.centroid_mode_density(y),
            StateModel::Jg(s) => s.centroid_mode_density(y),
            StateModel::Cat(s) => s.centroid_mode_density(y),
        }
    }

    /// Half-width of the tabulation interval for the centroid-mode density,
    /// chosen so the Gaussian-envelope tail mass is far below the detector
    /// sizes of interest.
    pub fn centroid_mode_half_width(&self) -> f64 {
        // Envelope exp(-c y^2) decays below e^-30 at y = sqrt(30/c).
        const TAIL_EXPONENT: f64 = 30.0;
        match self {
            StateModel::Noon(s) => {
                let c = 4.0 * PI * PI / (s.sigma * s.sigma);
                1.1 * (TAIL_EXPONENT / c).sqrt()
            }
            StateModel::Jg(s) => {
                let c = 2.0 * s.n_photons as f64 * s.b_width * s.b_width;
                1.1 * (TAIL_EXPONENT / c).sqrt()
            }
            StateModel::Cat(s) => {
                // The cosh factor shifts the envelope peak to
                // |alpha cos(phi)| / pi along s = sqrt(2) y.
                let peak = s.alpha_mag * s.alpha_phase.cos().abs() / PI * std::f64::consts::SQRT_2;
                1.1 * (peak + (TAIL_EXPONENT).sqrt() / (2.0 * PI))
            }
        }
    }
}
