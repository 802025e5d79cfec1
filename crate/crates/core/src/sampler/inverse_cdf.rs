use crate::error::{Error, Result};

/// Number of tabulation nodes used by default.
pub const DEFAULT_GRID_POINTS: usize = 1 << 16;

/// Relative density level below which the tabulation endpoints must lie.
const ENDPOINT_RATIO: f64 = 1e-8;

/// Tabulated cumulative distribution of a one-dimensional density over a
/// symmetric interval, with monotone cubic inversion.
///
/// The cumulative integral is a composite trapezoid sum over a uniform grid,
/// normalized to one. Inversion interpolates the quantile as a function of
/// the CDF with Fritsch-Carlson monotone cubics, so it is the exact inverse
/// of the forward table at every grid node.
#[derive(Debug, Clone)]
pub struct TabulatedInverseCdf {
    grid_min: f64,
    step: f64,
    cdf: Vec<f64>,
    // Strictly increasing (u, x) nodes with Hermite slopes dx/du.
    inv_u: Vec<f64>,
    inv_x: Vec<f64>,
    inv_d: Vec<f64>,
}

impl TabulatedInverseCdf {
    /// Tabulate `density` over `[-half_width, half_width]` on `grid_points`
    /// nodes.
    pub fn build<F>(density: F, half_width: f64, grid_points: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if grid_points < 8 {
            return Err(Error::InvalidParameter(format!(
                "need at least 8 grid points, got {grid_points}"
            )));
        }
        let n = grid_points;
        let step = 2.0 * half_width / (n - 1) as f64;
        let grid_min = -half_width;
        let mut values = Vec::with_capacity(n);
        let mut max = 0.0f64;
        for i in 0..n {
            let x = grid_min + step * i as f64;
            let v = density(x);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadDensity(format!(
                    "density({x}) = {v} is not finite and non-negative"
                )));
            }
            max = max.max(v);
            values.push(v);
        }
        if max <= 0.0 {
            return Err(Error::BadDensity(
                "density is numerically zero on the whole grid".into(),
            ));
        }
        if values[0] > ENDPOINT_RATIO * max || values[n - 1] > ENDPOINT_RATIO * max {
            return Err(Error::BadDensity(format!(
                "tail mass at +-{half_width} is not negligible; enlarge the interval"
            )));
        }

        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 1..n {
            acc += 0.5 * (values[i - 1] + values[i]) * step;
            cdf.push(acc);
        }
        let total = acc;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        cdf[n - 1] = 1.0;

        // Keep only nodes where the CDF strictly increases; tail nodes with
        // underflowed density collapse onto the endpoints.
        let mut inv_u = Vec::with_capacity(n);
        let mut inv_x = Vec::with_capacity(n);
        for i in 0..n {
            let u = cdf[i];
            if inv_u.last().map_or(true, |&last| u > last) {
                inv_u.push(u);
                inv_x.push(grid_min + step * i as f64);
            }
        }
        if inv_u.len() < 4 {
            return Err(Error::BadDensity(
                "density support is too narrow for the grid".into(),
            ));
        }
        let inv_d = fritsch_carlson_slopes(&inv_u, &inv_x);

        Ok(TabulatedInverseCdf {
            grid_min,
            step,
            cdf,
            inv_u,
            inv_x,
            inv_d,
        })
    }

    pub fn half_width(&self) -> f64 {
        -self.grid_min
    }

    pub fn grid_points(&self) -> usize {
        self.cdf.len()
    }

    /// Forward CDF evaluation by linear interpolation between nodes.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.grid_min {
            return 0.0;
        }
        let t = (x - self.grid_min) / self.step;
        let i = t.floor() as usize;
        if i + 1 >= self.cdf.len() {
            return 1.0;
        }
        let frac = t - i as f64;
        self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Quantile (inverse CDF) by monotone cubic interpolation.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let nodes = &self.inv_u;
        if u <= nodes[0] {
            return self.inv_x[0];
        }
        let last = nodes.len() - 1;
        if u >= nodes[last] {
            return self.inv_x[last];
        }
        // binary search: largest i with nodes[i] <= u
        let i = match nodes.binary_search_by(|v| v.partial_cmp(&u).unwrap()) {
            Ok(i) => return self.inv_x[i],
            Err(i) => i - 1,
        };
        let h = nodes[i + 1] - nodes[i];
        let t = (u - nodes[i]) / h;
        hermite(
            t,
            h,
            self.inv_x[i],
            self.inv_x[i + 1],
            self.inv_d[i],
            self.inv_d[i + 1],
        )
    }
}

fn hermite(t: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Monotone slope selection after Fritsch and Carlson. The inputs are
/// strictly increasing in both coordinates.
fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut h = Vec::with_capacity(n - 1);
    let mut delta = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let dx = xs[i + 1] - xs[i];
        h.push(dx);
        delta.push((ys[i + 1] - ys[i]) / dx);
    }
    let mut d = vec![0.0; n];
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d
}
