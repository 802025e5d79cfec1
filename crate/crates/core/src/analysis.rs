//! Scoring of recovered centroid distributions: amplitude scale fits,
//! weighted rms deviation, slope estimation, Gaussian histogram fits, and
//! close-event (multiphoton absorption) statistics.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::detection::{CentroidHistogram, HistogramMeta};
use crate::error::{Error, Result};
use crate::sampler::EventBatch;
use crate::states::StateModel;

/// Least-squares amplitude: the c minimizing sum (ref_i - c z_i)^2, which is
/// sum(ref_i z_i) / sum(z_i^2).
pub fn fit_scale(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            got: estimate.len(),
        });
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("fit_scale needs at least one point".into()));
    }
    let zz: f64 = estimate.iter().map(|z| z * z).sum();
    if zz == 0.0 {
        return Err(Error::DegenerateFit(
            "estimate vector is identically zero".into(),
        ));
    }
    let rz: f64 = reference.iter().zip(estimate).map(|(r, z)| r * z).sum();
    Ok(rz / zz)
}

/// Weighted root mean square deviation (1/sqrt(b)) sqrt(sum (ref - z)^2).
pub fn rms_deviation(reference: &[f64], scaled_estimate: &[f64]) -> Result<f64> {
    if reference.len() != scaled_estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            got: scaled_estimate.len(),
        });
    }
    let b = reference.len();
    if b == 0 {
        return Err(Error::EmptyInput("rms needs at least one point".into()));
    }
    let ss: f64 = reference
        .iter()
        .zip(scaled_estimate)
        .map(|(r, z)| (r - z) * (r - z))
        .sum();
    Ok((ss / b as f64).sqrt())
}

/// One comparison point of a recovery.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RecoveryPoint {
    pub x: f64,
    pub reference: f64,
    pub raw_estimate: f64,
    pub scaled_estimate: f64,
}

/// Result of fitting a centroid histogram against the analytic reference.
///
/// Only bins with at least one count enter the comparison: depending on the
/// detector size and shift schedule the pooled centroid lattice may cover
/// only a sublattice of the histogram grid, and bins that cannot receive
/// outcomes carry no information. The reference profile is normalized to
/// unit mass over the compared bins before fitting; with that convention
/// the purely statistical rms floor is 1/sqrt(b N0) for every state, grid
/// and window, so values are comparable across photon numbers and state
/// families.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub scale: f64,
    pub rms: f64,
    pub b: usize,
    pub window: (f64, f64),
    pub points: Vec<RecoveryPoint>,
}

impl RecoveryReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn write_points_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "x_lambda,reference,raw_estimate,scaled_estimate")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                p.x, p.reference, p.raw_estimate, p.scaled_estimate
            )?;
        }
        Ok(())
    }
}

/// Scale-fit the histogram against the state's centroid reference over the
/// window and compute the weighted rms deviation.
pub fn recover(
    histogram: &CentroidHistogram,
    state: &StateModel,
    window: (f64, f64),
) -> Result<RecoveryReport> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "empty comparison window [{lo}, {hi}]"
        )));
    }
    let bins: Vec<(f64, u64)> = histogram
        .window(lo, hi)
        .into_iter()
        .filter(|&(_, c)| c > 0)
        .collect();
    if bins.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no occupied histogram bins inside [{lo}, {hi}]"
        )));
    }
    let reference: Vec<f64> = bins.iter().map(|&(x, _)| state.centroid_reference(x)).collect();
    let mass: f64 = reference.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::DegenerateFit(
            "reference vanishes over the whole window".into(),
        ));
    }
    let reference: Vec<f64> = reference.iter().map(|r| r / mass).collect();
    let raw: Vec<f64> = bins.iter().map(|&(_, c)| c as f64).collect();
    let scale = fit_scale(&reference, &raw)?;
    let scaled: Vec<f64> = raw.iter().map(|z| scale * z).collect();
    let rms = rms_deviation(&reference, &scaled)?;
    let points = bins
        .iter()
        .zip(reference.iter())
        .zip(scaled.iter())
        .map(|((&(x, c), &r), &s)| RecoveryPoint {
            x,
            reference: r,
            raw_estimate: c as f64,
            scaled_estimate: s,
        })
        .collect();
    Ok(RecoveryReport {
        scale,
        rms,
        b: bins.len(),
        window,
        points,
    })
}

/// Ordinary least-squares line through (xs, ys); returns (slope, intercept).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(
            "need at least two points for a line".into(),
        ));
    }
    let mx: f64 = xs.iter().sum::<f64>() / n as f64;
    let my: f64 = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissas coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// OLS slope of rms vs detector size, restricted to sizes in `[d_lo, d_hi]`.
pub fn slope_estimate(sizes: &[f64], rms_values: &[f64], range: (f64, f64)) -> Result<f64> {
    if sizes.len() != rms_values.len() {
        return Err(Error::DimensionMismatch {
            expected: sizes.len(),
            got: rms_values.len(),
        });
    }
    let (lo, hi) = range;
    let (xs, ys): (Vec<f64>, Vec<f64>) = sizes
        .iter()
        .zip(rms_values)
        .filter(|&(&d, _)| d >= lo && d <= hi)
        .map(|(&d, &r)| (d, r))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} points in [{lo}, {hi}], need 3",
            xs.len()
        )));
    }
    Ok(linear_fit(&xs, &ys)?.0)
}

/// Fit c * exp(-d x^2) to the histogram by count-weighted least squares of
/// the log-counts against x^2, over bins with positive counts.
pub fn gaussian_fit(histogram: &CentroidHistogram) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = histogram
        .iter()
        .filter(|&(_, c)| c > 0)
        .map(|(x, c)| (x, c as f64))
        .collect();
    if pts.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} positive bins, need 10 for a Gaussian fit",
            pts.len()
        )));
    }
    // weighted regression of ln(count) on t = x^2
    let wsum: f64 = pts.iter().map(|&(_, c)| c).sum();
    let mt: f64 = pts.iter().map(|&(x, c)| c * x * x).sum::<f64>() / wsum;
    let my: f64 = pts.iter().map(|&(_, c)| c * c.ln()).sum::<f64>() / wsum;
    let stt: f64 = pts
        .iter()
        .map(|&(x, c)| c * (x * x - mt) * (x * x - mt))
        .sum();
    if stt == 0.0 {
        return Err(Error::DegenerateFit("degenerate abscissas in Gaussian fit".into()));
    }
    let sty: f64 = pts
        .iter()
        .map(|&(x, c)| c * (x * x - mt) * (c.ln() - my))
        .sum();
    let neg_d = sty / stt;
    let d = -neg_d;
    if !(d > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "fitted exponent d = {d} is not positive; data is not Gaussian-peaked"
        )));
    }
    let ln_c = my - neg_d * mt;
    Ok((ln_c.exp(), d))
}

/// Width of the fitted Gaussian c e^(-d x^2): the rms width 1/sqrt(2 d).
pub fn gaussian_width(d: f64) -> f64 {
    1.0 / (2.0 * d).sqrt()
}

/// Close-event (multiphoton absorption proxy) statistics of a continuous
/// event batch.
#[derive(Debug, Clone, Serialize)]
pub struct CloseEventReport {
    pub d_mp: f64,
    pub n_close: u64,
    pub n_total: u64,
    /// Raw close-event rate n_close / n_total, before r=1 normalization.
    pub close_fraction: f64,
    /// Rms width of the Gaussian fitted to the close-event centroid
    /// histogram; absent when too few close events for a fit.
    pub width_w: Option<f64>,
    /// Spot-size reduction factor of the underlying state, when defined
    /// (jointly Gaussian states only).
    pub r_value: Option<f64>,
    /// Total rate normalized by a measured r=1 reference rate.
    pub r_tot: Option<f64>,
    /// r * r_tot, the normalized peak absorption rate.
    pub r_peak: Option<f64>,
}

impl CloseEventReport {
    /// Normalize against the measured close-event fraction of an r=1 run
    /// with the same event budget, making the classical point map to one.
    pub fn normalize(&mut self, reference_fraction: f64) -> Result<()> {
        if !(reference_fraction > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reference close fraction must be positive, got {reference_fraction}"
            )));
        }
        let r_tot = self.close_fraction / reference_fraction;
        self.r_tot = Some(r_tot);
        self.r_peak = self.r_value.map(|r| r * r_tot);
        Ok(())
    }
}

/// Classify close events (all photons within `d_mp` of each other), count
/// them, and fit a Gaussian to their centroid histogram when possible.
///
/// The histogram fit is attempted with bins of an eighth of the close-event
/// centroid standard deviation over +-4 standard deviations; if fewer than
/// ten bins end up occupied the width is reported as absent rather than
/// failing the whole analysis, since rate measurements remain meaningful
/// deep in the quantum regime where close events are rare.
pub fn close_event_analysis(batch: &EventBatch, d_mp: f64) -> Result<CloseEventReport> {
    if !(d_mp > 0.0) || !d_mp.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "close-event distance must be positive and finite, got {d_mp}"
        )));
    }
    let n = batch.n_photons() as f64;
    let mut centroids = Vec::new();
    for row in batch.rows() {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &x in row {
            min = min.min(x);
            max = max.max(x);
            sum += x;
        }
        if max - min <= d_mp {
            centroids.push(sum / n);
        }
    }
    let n_close = centroids.len() as u64;
    let n_total = batch.n_events() as u64;
    let close_fraction = n_close as f64 / n_total as f64;
    let r_value = match batch.state() {
        StateModel::Jg(s) => Some(s.scalars().r),
        _ => None,
    };

    let width_w = fit_close_width(&centroids);

    Ok(CloseEventReport {
        d_mp,
        n_close,
        n_total,
        close_fraction,
        width_w,
        r_value,
        r_tot: None,
        r_peak: None,
    })
}

fn fit_close_width(centroids: &[f64]) -> Option<f64> {
    if centroids.len() < 100 {
        return None;
    }
    let n = centroids.len() as f64;
    let mean = centroids.iter().sum::<f64>() / n;
    let var = centroids.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if !(var > 0.0) {
        return None;
    }
    let sd = var.sqrt();
    let bin = sd / 8.0;
    let k_max = 32i64; // +-4 standard deviations
    let mut counts = vec![0u64; (2 * k_max + 1) as usize];
    for &x in centroids {
        let k = (x / bin).round() as i64;
        if k.abs() <= k_max {
            counts[(k + k_max) as usize] += 1;
        }
    }
    let hist = CentroidHistogram {
        bin_width: bin,
        offset: 0.0,
        k_min: -k_max,
        counts,
        meta: HistogramMeta {
            d0: 0.0,
            method: None,
            shifts: Vec::new(),
            rho: 8.0 * sd,
            excluded: 0,
        },
    };
    gaussian_fit(&hist).ok().map(|(_, d)| gaussian_width(d))
}

/// Closed-form normalized rates: R_tot = ((N - r^2)/(N - 1))^((N-1)/2) and
/// R_peak = r * R_tot, valid for r in [1, sqrt(N)].
pub fn theoretical_rates(n: usize, r: f64) -> Result<(f64, f64)> {
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedPhotonNumber(n));
    }
    let nf = n as f64;
    if !(1.0 - 1e-12..=nf.sqrt() + 1e-12).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "reduction factor {r} outside [1, sqrt({n})]"
        )));
    }
    let base = ((nf - r * r) / (nf - 1.0)).max(0.0);
    let r_tot = base.powf((nf - 1.0) / 2.0);
    Ok((r_tot, r * r_tot))
}

/// Count local maxima of the piecewise profile given by sorted (x, value)
/// points: a point is a maximum when its moving-average value is strictly
/// larger than every neighbor within `window_radius` to its left and at
/// least as large as every neighbor to its right. Values are pre-smoothed by
/// a moving average of radius `smooth_radius` to suppress counting noise.
pub fn count_local_maxima(points: &[(f64, f64)], smooth_radius: f64, window_radius: f64) -> usize {
    let n = points.len();
    if n == 0 {
        return 0;
    }
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            let x = points[i].0;
            let mut acc = 0.0;
            let mut cnt = 0usize;
            for &(xj, vj) in points {
                if (xj - x).abs() <= smooth_radius {
                    acc += vj;
                    cnt += 1;
                }
            }
            acc / cnt as f64
        })
        .collect();
    (0..n)
        .filter(|&i| {
            let x = points[i].0;
            let v = smoothed[i];
            if v <= 0.0 {
                return false;
            }
            (0..n).all(|j| {
                if j == i || (points[j].0 - x).abs() > window_radius {
                    return true;
                }
                if points[j].0 < x {
                    v > smoothed[j]
                } else {
                    v >= smoothed[j]
                }
            })
        })
        .count()
}
