use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::states::StateModel;

use super::inverse_cdf::{TabulatedInverseCdf, DEFAULT_GRID_POINTS};
use super::transform::{transform_matrix, TransformMatrix};

/// A batch of correlated N-photon position events, row-major: event `i`
/// occupies `positions[i*N .. (i+1)*N]`, in units of the wavelength.
#[derive(Debug, Clone)]
pub struct EventBatch {
    state: StateModel,
    n_photons: usize,
    n_events: usize,
    positions: Vec<f64>,
    seed: u64,
}

impl EventBatch {
    pub fn state(&self) -> &StateModel {
        &self.state
    }

    pub fn n_photons(&self) -> usize {
        self.n_photons
    }

    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.positions[i * self.n_photons..(i + 1) * self.n_photons]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.positions.chunks_exact(self.n_photons)
    }

    pub fn par_rows(&self) -> rayon::slice::ChunksExact<'_, f64> {
        self.positions.par_chunks_exact(self.n_photons)
    }

    /// Construct a batch from already-known rows; used by discretization.
    pub(crate) fn from_parts(
        state: StateModel,
        n_photons: usize,
        positions: Vec<f64>,
        seed: u64,
    ) -> Self {
        let n_events = positions.len() / n_photons;
        EventBatch {
            state,
            n_photons,
            n_events,
            positions,
            seed,
        }
    }

    /// Partition the rows contiguously into `parts` chunks of
    /// `floor(n_events / parts)` events each; remainder rows are dropped.
    pub fn split(&self, parts: usize) -> Result<Vec<EventBatch>> {
        if parts == 0 || parts > self.n_events {
            return Err(Error::InvalidParameter(format!(
                "cannot split {} events into {parts} parts",
                self.n_events
            )));
        }
        let chunk = self.n_events / parts;
        Ok((0..parts)
            .map(|j| {
                let lo = j * chunk * self.n_photons;
                let hi = (j + 1) * chunk * self.n_photons;
                EventBatch {
                    state: self.state.clone(),
                    n_photons: self.n_photons,
                    n_events: chunk,
                    positions: self.positions[lo..hi].to_vec(),
                    seed: self.seed,
                }
            })
            .collect())
    }

    /// Number of rows dropped when splitting into `parts` chunks.
    pub fn split_remainder(&self, parts: usize) -> usize {
        self.n_events - parts * (self.n_events / parts)
    }

    /// Write the batch as CSV with provenance header comments.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# state={}", serde_json::to_string(&self.state)?)?;
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# n_photons={}", self.n_photons)?;
        let mut line = String::new();
        for row in self.rows() {
            line.clear();
            for (k, x) in row.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                // 17 significant digits round-trips f64 exactly
                line.push_str(&format!("{x:.16e}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Read a batch back from CSV. With `verify` the batch is regenerated
    /// from the recorded state and seed and compared bit-for-bit.
    pub fn read_csv(path: &Path, verify: bool) -> Result<EventBatch> {
        let file = File::open(path)?;
        let reader = BufReader::new(file);
        let mut state: Option<StateModel> = None;
        let mut seed: Option<u64> = None;
        let mut n_photons: Option<usize> = None;
        let mut positions = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if let Some(rest) = line.strip_prefix("# ") {
                if let Some(v) = rest.strip_prefix("state=") {
                    state = Some(serde_json::from_str(v)?);
                } else if let Some(v) = rest.strip_prefix("seed=") {
                    seed = Some(v.parse().map_err(|_| {
                        Error::MalformedFile(format!("bad seed value {v:?}"))
                    })?);
                } else if let Some(v) = rest.strip_prefix("n_photons=") {
                    n_photons = Some(v.parse().map_err(|_| {
                        Error::MalformedFile(format!("bad n_photons value {v:?}"))
                    })?);
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            for field in line.split(',') {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::MalformedFile(format!("bad position value {field:?}"))
                })?;
                positions.push(v);
            }
        }
        let state = state.ok_or_else(|| Error::MalformedFile("missing state header".into()))?;
        let seed = seed.ok_or_else(|| Error::MalformedFile("missing seed header".into()))?;
        let n_photons =
            n_photons.ok_or_else(|| Error::MalformedFile("missing n_photons header".into()))?;
        if n_photons == 0 || positions.len() % n_photons != 0 {
            return Err(Error::MalformedFile(format!(
                "{} values do not form rows of {n_photons}",
                positions.len()
            )));
        }
        if positions.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedFile("non-finite position".into()));
        }
        let batch = EventBatch::from_parts(state, n_photons, positions, seed);
        if verify {
            let regenerated = sample_events(batch.state.clone(), batch.n_events, seed)?;
            if regenerated.positions != batch.positions {
                return Err(Error::VerificationFailed(format!(
                    "file {path:?} does not match regeneration from (state, seed)",
                )));
            }
        }
        Ok(batch)
    }
}

/// Per-event sampler: prepared once per state, then able to produce any event
/// row from (seed, event index) alone. This is what makes parallel sampling
/// order-independent and bit-reproducible.
pub struct RowSampler {
    matrix: TransformMatrix,
    n: usize,
    centroid_mode: CentroidMode,
    transverse_sigma: f64,
}

enum CentroidMode {
    Gaussian(f64),
    InverseCdf(TabulatedInverseCdf),
}

impl RowSampler {
    pub fn prepare(state: &StateModel) -> Result<RowSampler> {
        state.validate()?;
        let n = state.n_photons();
        let matrix = transform_matrix(n)?;
        let (centroid_mode, transverse_sigma) = match state {
            StateModel::Noon(s) => {
                let icdf = TabulatedInverseCdf::build(
                    |y| state.centroid_mode_density(y),
                    state.centroid_mode_half_width(),
                    DEFAULT_GRID_POINTS,
                )?;
                (CentroidMode::InverseCdf(icdf), s.transverse_sigma())
            }
            StateModel::Jg(s) => (
                CentroidMode::Gaussian(s.centroid_mode_sigma()),
                s.relative_mode_sigma(),
            ),
            StateModel::Cat(s) => {
                let icdf = TabulatedInverseCdf::build(
                    |y| state.centroid_mode_density(y),
                    state.centroid_mode_half_width(),
                    DEFAULT_GRID_POINTS,
                )?;
                (CentroidMode::InverseCdf(icdf), s.transverse_sigma())
            }
        };
        Ok(RowSampler {
            matrix,
            n,
            centroid_mode,
            transverse_sigma,
        })
    }

    pub fn n_photons(&self) -> usize {
        self.n
    }

    /// Fill `out` (length N) with the photon positions of event `index`.
    pub fn fill_row(&self, seed: u64, index: u64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        let mut rng = event_rng(seed, index);
        let mut y = [0.0f64; 4];
        y[0] = match &self.centroid_mode {
            CentroidMode::Gaussian(sigma) => {
                let g: f64 = rng.sample(StandardNormal);
                g * sigma
            }
            CentroidMode::InverseCdf(icdf) => icdf.quantile(rng.gen::<f64>()),
        };
        for slot in y.iter_mut().take(self.n).skip(1) {
            let g: f64 = rng.sample(StandardNormal);
            *slot = g * self.transverse_sigma;
        }
        self.matrix.back(&y[..self.n], out);
    }
}

/// Counter-based per-event substream: the RNG key is a hash of the batch seed
/// and the event index, so event identity is stable under any parallel
/// schedule.
fn event_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    let mut s = seed ^ 0x6a09e667f3bcc908;
    let mut t = index.wrapping_mul(0x9e3779b97f4a7c15) ^ 0xbb67ae8584caa73b;
    for chunk in key.chunks_exact_mut(8) {
        s = splitmix64(s.wrapping_add(t));
        t = splitmix64(t ^ s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Draw `n_events` correlated events for `state`. Regeneration with the same
/// (state, n_events, seed) is bit-identical regardless of worker count.
pub fn sample_events(state: StateModel, n_events: usize, seed: u64) -> Result<EventBatch> {
    if n_events == 0 {
        return Err(Error::EmptyInput("n_events must be at least 1".into()));
    }
    let sampler = RowSampler::prepare(&state)?;
    let n = sampler.n_photons();
    let mut positions = vec![0.0f64; n_events * n];
    positions
        .par_chunks_exact_mut(n)
        .enumerate()
        .for_each(|(i, row)| sampler.fill_row(seed, i as u64, row));
    Ok(EventBatch {
        state,
        n_photons: n,
        n_events,
        positions,
        seed,
    })
}
