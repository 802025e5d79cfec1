//! Finite-size detector arrays: position discretization, discrete centroids,
//! shift plans combining several array offsets, and centroid histograms on a
//! common grid.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampler::{EventBatch, RowSampler};
use crate::states::StateModel;

/// Shift-combination strategy: reuse the full batch at every array shift (I)
/// or partition the batch into one disjoint chunk per shift (II).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    I,
    II,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::I => write!(f, "I"),
            Method::II => write!(f, "II"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s {
            "I" | "i" | "1" => Ok(Method::I),
            "II" | "ii" | "2" => Ok(Method::II),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?}, expected I or II"
            ))),
        }
    }
}

/// An array of abutting detectors of size `d0`, offset by `shift`, evaluated
/// over a total extent `rho`. Detector `i` covers
/// `[shift + (i-1/2) d0, shift + (i+1/2) d0)` and reports the outcome
/// `shift + i*d0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorArray {
    pub d0: f64,
    pub shift: f64,
    pub rho: f64,
}

impl DetectorArray {
    pub fn new(d0: f64, shift: f64, rho: f64) -> Result<DetectorArray> {
        if !(d0 > 0.0) || !d0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "detector size must be positive and finite, got {d0}"
            )));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "evaluation extent must be positive and finite, got {rho}"
            )));
        }
        if !shift.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "shift must be finite, got {shift}"
            )));
        }
        Ok(DetectorArray { d0, shift, rho })
    }

    /// Number of detection bins inside the evaluation extent, at least 1.
    pub fn bins(&self) -> usize {
        ((self.rho / self.d0).round() as usize).max(1)
    }

    /// Detector index registering a photon at `x`.
    pub fn bin_index(&self, x: f64) -> i64 {
        ((x - self.shift) / self.d0).round() as i64
    }

    /// Outcome reported for a photon at `x`: the center of its detector.
    pub fn discretize_position(&self, x: f64) -> f64 {
        self.shift + self.bin_index(x) as f64 * self.d0
    }
}

/// The paper-recommended evaluation extent: 7 wavelengths for two photons,
/// scaled down as 2/N for more.
pub fn default_rho(n_photons: usize) -> f64 {
    7.0 * 2.0 / n_photons as f64
}

/// Replace every photon position with the outcome of the detector that
/// registers it. Event count and ordering are unchanged.
pub fn discretize(batch: &EventBatch, array: &DetectorArray) -> EventBatch {
    let positions: Vec<f64> = batch
        .positions()
        .iter()
        .map(|&x| array.discretize_position(x))
        .collect();
    EventBatch::from_parts(
        batch.state().clone(),
        batch.n_photons(),
        positions,
        batch.seed(),
    )
}

/// Centroid outcome of one discretized event: shift + (d0/N) sum of detector
/// indices, which equals the arithmetic mean of the outcomes.
pub fn discrete_centroid(row: &[f64], array: &DetectorArray) -> Result<f64> {
    let n = row.len();
    if n == 0 {
        return Err(Error::EmptyInput("event row is empty".into()));
    }
    let mut index_sum = 0i64;
    for &x in row {
        let i = (x - array.shift) / array.d0;
        let rounded = i.round();
        if (i - rounded).abs() > 1e-9 {
            return Err(Error::OffLattice {
                position: x,
                d0: array.d0,
                shift: array.shift,
            });
        }
        index_sum += rounded as i64;
    }
    Ok(array.shift + array.d0 / n as f64 * index_sum as f64)
}

/// Evaluation of one detector size m*d0_min through m shifted arrays.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftPlan {
    /// The base (smallest) detector size; also the shift increment.
    pub base_size: f64,
    /// Detector size is `multiplier * base_size`; there are `multiplier` shifts.
    pub multiplier: usize,
    pub method: Method,
    pub rho: f64,
}

impl ShiftPlan {
    pub fn new(base_size: f64, multiplier: usize, method: Method, rho: f64) -> Result<ShiftPlan> {
        if !(base_size > 0.0) || !base_size.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "base size must be positive and finite, got {base_size}"
            )));
        }
        if multiplier == 0 {
            return Err(Error::InvalidParameter(
                "shift multiplier must be at least 1".into(),
            ));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "evaluation extent must be positive and finite, got {rho}"
            )));
        }
        Ok(ShiftPlan {
            base_size,
            multiplier,
            method,
            rho,
        })
    }

    pub fn detector_size(&self) -> f64 {
        self.base_size * self.multiplier as f64
    }

    pub fn shifts(&self) -> Vec<f64> {
        (0..self.multiplier)
            .map(|j| j as f64 * self.base_size)
            .collect()
    }
}

/// Provenance recorded alongside histogram counts.
#[derive(Debug, Clone, Serialize)]
pub struct HistogramMeta {
    pub d0: f64,
    pub method: Option<Method>,
    pub shifts: Vec<f64>,
    pub rho: f64,
    /// Events whose centroid outcome fell outside the [-rho/2, rho/2] grid.
    pub excluded: u64,
}

/// Centroid counts on a uniform grid of bin centers `offset + k * bin_width`
/// for `k` in `k_min ..= k_min + counts.len() - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct CentroidHistogram {
    pub bin_width: f64,
    pub offset: f64,
    pub k_min: i64,
    pub counts: Vec<u64>,
    pub meta: HistogramMeta,
}

impl CentroidHistogram {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.offset + (self.k_min + i as i64) as f64 * self.bin_width
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// (center, count) pairs in ascending position order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (self.center(i), c))
    }

    /// Bin centers restricted to `[lo, hi]`, with counts.
    pub fn window(&self, lo: f64, hi: f64) -> Vec<(f64, u64)> {
        self.iter().filter(|&(x, _)| x >= lo && x <= hi).collect()
    }

    /// Merge every `factor` adjacent bins into one analysis cell whose center
    /// is the mean of the merged bin centers. Coarsening trades position
    /// resolution for counts per cell; callers should keep the cell width a
    /// multiple of the outcome lattice spacing so cells hold equally many
    /// lattice points.
    pub fn coarsen(&self, factor: usize) -> Result<CentroidHistogram> {
        if factor == 0 {
            return Err(Error::InvalidParameter(
                "coarsening factor must be at least 1".into(),
            ));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let groups = self.counts.len() / factor;
        if groups == 0 {
            return Err(Error::InsufficientData(format!(
                "cannot merge {} bins in groups of {factor}",
                self.counts.len()
            )));
        }
        let counts: Vec<u64> = (0..groups)
            .map(|g| self.counts[g * factor..(g + 1) * factor].iter().sum())
            .collect();
        // Center of group g is the mean of its member centers; expressing it
        // on a grid of width `factor * bin_width` requires a fractional
        // offset when `factor` is even.
        let offset = self.offset
            + (self.k_min as f64 + (factor as f64 - 1.0) / 2.0) * self.bin_width;
        Ok(CentroidHistogram {
            bin_width: self.bin_width * factor as f64,
            offset,
            k_min: 0,
            counts,
            meta: self.meta.clone(),
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# d0={}", self.meta.d0)?;
        match self.meta.method {
            Some(m) => writeln!(w, "# method={m}")?,
            None => writeln!(w, "# method=none")?,
        }
        let shifts: Vec<String> = self.meta.shifts.iter().map(|s| format!("{s}")).collect();
        writeln!(w, "# shifts={}", shifts.join(";"))?;
        writeln!(w, "# rho={}", self.meta.rho)?;
        writeln!(w, "# excluded={}", self.meta.excluded)?;
        writeln!(w, "bin_center_lambda,count")?;
        for (x, c) in self.iter() {
            writeln!(w, "{x:.16e},{c}")?;
        }
        Ok(())
    }
}

struct GridAccumulator {
    bin_width: f64,
    offset: f64,
    k_min: i64,
    counts: Vec<u64>,
    excluded: u64,
}

impl GridAccumulator {
    fn new(bin_width: f64, offset: f64, rho: f64) -> GridAccumulator {
        let half = rho / 2.0;
        let k_max = ((half - offset) / bin_width).floor() as i64;
        let k_min = ((-half - offset) / bin_width).ceil() as i64;
        GridAccumulator {
            bin_width,
            offset,
            k_min,
            counts: vec![0; (k_max - k_min + 1).max(1) as usize],
            excluded: 0,
        }
    }

    fn record(&mut self, centroid: f64) {
        let k = ((centroid - self.offset) / self.bin_width).round() as i64;
        let i = k - self.k_min;
        if i >= 0 && (i as usize) < self.counts.len() {
            self.counts[i as usize] += 1;
        } else {
            self.excluded += 1;
        }
    }

    fn finish(self, meta_d0: f64, method: Option<Method>, shifts: Vec<f64>, rho: f64) -> CentroidHistogram {
        CentroidHistogram {
            bin_width: self.bin_width,
            offset: self.offset,
            k_min: self.k_min,
            counts: self.counts,
            meta: HistogramMeta {
                d0: meta_d0,
                method,
                shifts,
                rho,
                excluded: self.excluded,
            },
        }
    }
}

fn accumulate_shift(
    acc: &mut GridAccumulator,
    events: &EventBatch,
    array: &DetectorArray,
) {
    // The array registers every photon: `rho` bounds the analysis grid, not
    // the physical aperture. Rejecting events whose photons stray outside
    // `rho` would bias the accepted centroid distribution toward the center
    // and distort the recovered pattern.
    for row in events.rows() {
        let mut index_sum = 0i64;
        for &x in row {
            index_sum += array.bin_index(x);
        }
        let centroid = array.shift + array.d0 / row.len() as f64 * index_sum as f64;
        acc.record(centroid);
    }
}

/// Discretize and histogram the batch under a shift plan. All shifts share
/// one common grid of bin width `base_size / N` spanning `[-rho/2, rho/2]`,
/// so estimates at different detector sizes land on the same position set.
pub fn run_plan(batch: &EventBatch, plan: &ShiftPlan) -> Result<CentroidHistogram> {
    if batch.n_events() == 0 {
        return Err(Error::EmptyInput("event batch is empty".into()));
    }
    let n = batch.n_photons();
    let d0 = plan.detector_size();
    let grid_width = plan.base_size / n as f64;
    let mut acc = GridAccumulator::new(grid_width, 0.0, plan.rho);

    let chunks: Vec<EventBatch> = match plan.method {
        Method::I => Vec::new(),
        Method::II => {
            if plan.multiplier > batch.n_events() {
                return Err(Error::InsufficientData(format!(
                    "method II needs at least {} events for {} shifts, got {}",
                    plan.multiplier,
                    plan.multiplier,
                    batch.n_events()
                )));
            }
            batch.split(plan.multiplier)?
        }
    };

    for (j, shift) in plan.shifts().into_iter().enumerate() {
        let array = DetectorArray::new(d0, shift, plan.rho)?;
        let events = match plan.method {
            Method::I => batch,
            Method::II => &chunks[j],
        };
        accumulate_shift(&mut acc, events, &array);
    }
    Ok(acc.finish(d0, Some(plan.method), plan.shifts(), plan.rho))
}

/// Histogram of the discrete centroids of a single shifted array, binned on
/// the array's own centroid outcome lattice of spacing `d0 / N` anchored at
/// `shift`. Used for per-shift recovery fits.
pub fn outcome_histogram(batch: &EventBatch, array: &DetectorArray) -> Result<CentroidHistogram> {
    if batch.n_events() == 0 {
        return Err(Error::EmptyInput("event batch is empty".into()));
    }
    let n = batch.n_photons();
    let grid_width = array.d0 / n as f64;
    let mut acc = GridAccumulator::new(grid_width, array.shift, array.rho);
    accumulate_shift(&mut acc, batch, array);
    Ok(acc.finish(array.d0, None, vec![array.shift], array.rho))
}

/// Histogram of continuous (undiscretized) centroids on a grid of the given
/// bin width over `[-rho/2, rho/2]`.
pub fn continuous_histogram(
    batch: &EventBatch,
    bin_width: f64,
    rho: f64,
) -> Result<CentroidHistogram> {
    if batch.n_events() == 0 {
        return Err(Error::EmptyInput("event batch is empty".into()));
    }
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bin width must be positive and finite, got {bin_width}"
        )));
    }
    let n = batch.n_photons() as f64;
    let mut acc = GridAccumulator::new(bin_width, 0.0, rho);
    for row in batch.rows() {
        acc.record(row.iter().sum::<f64>() / n);
    }
    Ok(acc.finish(0.0, None, Vec::new(), rho))
}

/// Fraction of events whose photons all land in the same detector bin.
pub fn multiphoton_fraction(batch: &EventBatch, array: &DetectorArray) -> f64 {
    let same = batch
        .rows()
        .filter(|row| {
            let first = array.bin_index(row[0]);
            row[1..].iter().all(|&x| array.bin_index(x) == first)
        })
        .count();
    same as f64 / batch.n_events() as f64
}

/// Same-bin coincidence fractions for many detector sizes in one streamed
/// pass: events are regenerated from (state, seed) in fixed-size blocks and
/// never materialized as a whole batch, so arbitrarily large `n_events` fit
/// in constant memory.
pub fn multiphoton_fraction_sweep(
    state: &StateModel,
    sizes: &[f64],
    n_events: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if sizes.is_empty() {
        return Err(Error::EmptyInput("no detector sizes given".into()));
    }
    for &d0 in sizes {
        if !(d0 > 0.0) || !d0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "detector size must be positive and finite, got {d0}"
            )));
        }
    }
    if n_events == 0 {
        return Err(Error::EmptyInput("n_events must be at least 1".into()));
    }
    let sampler = RowSampler::prepare(state)?;
    let n = sampler.n_photons();
    const BLOCK: u64 = 1 << 14;
    let n_blocks = n_events.div_ceil(BLOCK);
    let counts = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n_events);
            let mut row = [0.0f64; 4];
            let mut local = vec![0u64; sizes.len()];
            for idx in lo..hi {
                sampler.fill_row(seed, idx, &mut row[..n]);
                for (c, &d0) in local.iter_mut().zip(sizes) {
                    let first = (row[0] / d0).round() as i64;
                    if row[1..n]
                        .iter()
                        .all(|&x| (x / d0).round() as i64 == first)
                    {
                        *c += 1;
                    }
                }
            }
            local
        })
        .reduce(
            || vec![0u64; sizes.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / n_events as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::sample_events;
    use crate::states::{default_noon_sigma, NoonState};

    fn noon2() -> StateModel {
        StateModel::Noon(NoonState::new(2, default_noon_sigma()).unwrap())
    }

    #[test]
    fn discretize_nearest_lattice_point() {
        let a = DetectorArray::new(0.1, 0.0, 7.0).unwrap();
        assert!((a.discretize_position(0.349) - 0.3).abs() < 1e-12);
        // already on the lattice: unchanged
        assert_eq!(a.discretize_position(0.3), a.discretize_position(a.discretize_position(0.349)));
        // shift moves the lattice
        let b = DetectorArray::new(0.1, 0.05, 7.0).unwrap();
        assert!((b.discretize_position(0.31) - 0.35).abs() < 1e-12);
    }

    #[test]
    fn bins_count() {
        let a = DetectorArray::new(1.0, 0.0, 7.0).unwrap();
        assert_eq!(a.bins(), 7);
        let b = DetectorArray::new(100.0, 0.0, 7.0).unwrap();
        assert_eq!(b.bins(), 1);
    }

    #[test]
    fn discrete_centroid_examples() {
        let a = DetectorArray::new(0.1, 0.0, 7.0).unwrap();
        // bins (3, 5) -> X = 0.4
        let x = discrete_centroid(&[0.3, 0.5], &a).unwrap();
        assert!((x - 0.4).abs() < 1e-12);
        // all photons in one bin -> that bin's outcome
        let x = discrete_centroid(&[0.3, 0.3, 0.3], &a).unwrap();
        assert!((x - 0.3).abs() < 1e-12);
        // adjacent bins -> half-lattice point
        let x = discrete_centroid(&[0.3, 0.4], &a).unwrap();
        assert!((x - 0.35).abs() < 1e-12);
        // mean equivalence
        let row = [0.2, -0.5, 0.7];
        let x = discrete_centroid(&row, &a).unwrap();
        let mean = row.iter().sum::<f64>() / 3.0;
        assert!((x - mean).abs() < 1e-12);
    }

    #[test]
    fn discrete_centroid_rejects_off_lattice() {
        let a = DetectorArray::new(0.1, 0.0, 7.0).unwrap();
        assert!(matches!(
            discrete_centroid(&[0.333, 0.3], &a),
            Err(Error::OffLattice { .. })
        ));
    }

    #[test]
    fn methods_agree_for_single_shift() {
        let batch = sample_events(noon2(), 4000, 5).unwrap();
        let p1 = ShiftPlan::new(0.05, 1, Method::I, 7.0).unwrap();
        let p2 = ShiftPlan::new(0.05, 1, Method::II, 7.0).unwrap();
        let h1 = run_plan(&batch, &p1).unwrap();
        let h2 = run_plan(&batch, &p2).unwrap();
        assert_eq!(h1.counts, h2.counts);
    }

    #[test]
    fn count_conservation() {
        let batch = sample_events(noon2(), 4001, 6).unwrap();
        let n0 = batch.n_events() as u64;

        let p = ShiftPlan::new(0.05, 2, Method::I, 7.0).unwrap();
        let h = run_plan(&batch, &p).unwrap();
        assert_eq!(h.total() + h.meta.excluded, 2 * n0);

        let p = ShiftPlan::new(0.05, 2, Method::II, 7.0).unwrap();
        let h = run_plan(&batch, &p).unwrap();
        assert_eq!(h.total() + h.meta.excluded, 2 * (n0 / 2));
    }

    #[test]
    fn coarsen_merges_bins() {
        let batch = sample_events(noon2(), 4000, 7).unwrap();
        let h = run_plan(&batch, &ShiftPlan::new(0.05, 1, Method::I, 7.0).unwrap()).unwrap();
        let c = h.coarsen(4).unwrap();
        assert_eq!(c.len(), h.len() / 4);
        assert_eq!(c.bin_width, 4.0 * h.bin_width);
        // dropped tail bins (len not divisible by 4) may lose counts
        let tail: u64 = h.counts[c.len() * 4..].iter().sum();
        assert_eq!(c.total() + tail, h.total());
        // cell center = mean of merged bin centers
        let expect = (h.center(0) + h.center(3)) / 2.0;
        assert!((c.center(0) - expect).abs() < 1e-12);
        let expect = (h.center(4) + h.center(7)) / 2.0;
        assert!((c.center(1) - expect).abs() < 1e-12);

        assert_eq!(h.coarsen(1).unwrap().counts, h.counts);
        assert!(matches!(h.coarsen(0), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            h.coarsen(h.len() + 1),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn pooled_bins_nest_in_base_run() {
        let batch = sample_events(noon2(), 50_000, 8).unwrap();
        let base = run_plan(&batch, &ShiftPlan::new(0.05, 1, Method::I, 7.0).unwrap()).unwrap();
        let pooled = run_plan(&batch, &ShiftPlan::new(0.05, 4, Method::I, 7.0).unwrap()).unwrap();
        assert_eq!(base.bin_width, pooled.bin_width);
        assert_eq!(base.k_min, pooled.k_min);
        // Away from the rho boundary (where exclusion differs between
        // detector sizes), the pooled run cannot populate bins beyond the
        // extent the base run reaches, up to the coarser rounding slack.
        // Bin-by-bin nesting does not hold: large detectors smear counts
        // across the base run's interference zeros.
        let occupied = |h: &CentroidHistogram| {
            let idx: Vec<usize> = (0..h.len())
                .filter(|&i| h.counts[i] > 0 && h.center(i).abs() <= 3.25)
                .collect();
            (*idx.first().unwrap(), *idx.last().unwrap())
        };
        let (b_lo, b_hi) = occupied(&base);
        let (p_lo, p_hi) = occupied(&pooled);
        // per-photon rounding differs by at most (0.2 + 0.05)/2, i.e. 5 bins
        let slack = 5usize;
        assert!(
            p_lo + slack >= b_lo && p_hi <= b_hi + slack,
            "base [{b_lo}, {b_hi}] pooled [{p_lo}, {p_hi}] of {}",
            base.len()
        );
    }

    #[test]
    fn method_two_needs_enough_events() {
        let batch = sample_events(noon2(), 3, 1).unwrap();
        let p = ShiftPlan::new(0.05, 4, Method::II, 7.0).unwrap();
        assert!(matches!(
            run_plan(&batch, &p),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn centroid_discretization_error_bound() {
        let batch = sample_events(noon2(), 2000, 12).unwrap();
        let d0 = 0.25;
        let array = DetectorArray::new(d0, 0.0, 7.0).unwrap();
        let disc = discretize(&batch, &array);
        for (row, drow) in batch.rows().zip(disc.rows()) {
            let c: f64 = row.iter().sum::<f64>() / 2.0;
            let dc = discrete_centroid(drow, &array).unwrap();
            assert!((c - dc).abs() <= d0 / 2.0 + 1e-12);
        }
    }

    #[test]
    fn fine_discretization_matches_continuous() {
        let batch = sample_events(noon2(), 50_000, 17).unwrap();
        let w = 7.0 / 200.0;
        let cont = continuous_histogram(&batch, w, 7.0).unwrap();
        // Discretize with a detector one millionth of a wavelength wide and
        // rebuild the same histogram from the discrete centroids.
        let array = DetectorArray::new(1e-6, 0.0, 7.0).unwrap();
        let disc = discretize(&batch, &array);
        let again = continuous_histogram(&disc, w, 7.0).unwrap();
        let diff: u64 = cont
            .counts
            .iter()
            .zip(&again.counts)
            .map(|(&a, &b)| a.abs_diff(b))
            .sum();
        // Only events sitting within 5e-7 of a bin boundary can move.
        assert!(diff < 20, "histograms differ by {diff} events");
    }

    #[test]
    fn multiphoton_fraction_limits() {
        let batch = sample_events(noon2(), 20_000, 3).unwrap();
        let huge = DetectorArray::new(1e6, 0.0, 7.0).unwrap();
        assert_eq!(multiphoton_fraction(&batch, &huge), 1.0);
        let tiny = DetectorArray::new(1e-7, 0.0, 7.0).unwrap();
        assert!(multiphoton_fraction(&batch, &tiny) < 1e-3);
    }

    #[test]
    fn fraction_sweep_matches_batch_counting() {
        let batch = sample_events(noon2(), 30_000, 21).unwrap();
        let sizes = [0.02, 0.1, 0.5];
        let swept =
            multiphoton_fraction_sweep(&noon2(), &sizes, 30_000, 21).unwrap();
        for (&d0, &f) in sizes.iter().zip(&swept) {
            let array = DetectorArray::new(d0, 0.0, 7.0).unwrap();
            let direct = multiphoton_fraction(&batch, &array);
            assert_eq!(f, direct, "d0={d0}");
        }
    }

    #[test]
    fn histogram_csv_layout() {
        let batch = sample_events(noon2(), 1000, 2).unwrap();
        let h = run_plan(&batch, &ShiftPlan::new(0.05, 2, Method::I, 7.0).unwrap()).unwrap();
        let dir = std::env::temp_dir().join("centroid-core-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("hist.csv");
        h.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# d0=0.1"));
        assert!(text.contains("# method=I"));
        assert!(text.contains("# shifts=0;0.05"));
        assert!(text.contains("# rho=7"));
        assert!(text.contains("bin_center_lambda,count"));
    }

    #[test]
    fn default_rho_values() {
        assert_eq!(default_rho(2), 7.0);
        assert!((default_rho(3) - 14.0 / 3.0).abs() < 1e-15);
        assert_eq!(default_rho(4), 3.5);
    }
}
