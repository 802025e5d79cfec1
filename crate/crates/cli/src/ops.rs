//! The experiment commands: thin orchestration over the core library.

use serde::Serialize;

use centroid_core::analysis::{close_event_analysis, recover, theoretical_rates};
use centroid_core::detection::{
    default_rho, outcome_histogram, run_plan, DetectorArray, Method, ShiftPlan,
};
use centroid_core::sampler::{sample_events, EventBatch};
use centroid_core::states::{CatState, JointGaussianState, StateModel};

use crate::config::ExperimentConfig;
use crate::output::{write_json, CsvWriter};

fn meta(config: &ExperimentConfig) -> Vec<(&'static str, String)> {
    vec![
        ("config_sha256", config.hash()),
        ("state", serde_json::to_string(&config.state).unwrap()),
        ("n_events", config.n_events.to_string()),
        ("seed", config.seed.to_string()),
    ]
}

pub fn cmd_sample(config: &ExperimentConfig) -> anyhow::Result<()> {
    let batch = sample_events(config.state.clone(), config.n_events, config.seed)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join("events.csv");
    batch.write_csv(&path)?;
    println!(
        "sampled N={} n_events={} seed={} -> {}",
        batch.n_photons(),
        batch.n_events(),
        batch.seed(),
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepPoint {
    detector_size: f64,
    n_shifts: usize,
    method: Method,
    rms: f64,
    scale: f64,
    b: usize,
}

fn size_sweep(
    batch: &EventBatch,
    state: &StateModel,
    d0_min: f64,
    multipliers: &[usize],
    method: Method,
    rho: f64,
    window: (f64, f64),
) -> anyhow::Result<Vec<SweepPoint>> {
    let mut points = Vec::with_capacity(multipliers.len());
    for &m in multipliers {
        let plan = ShiftPlan::new(d0_min, m, method, rho)?;
        let hist = run_plan(batch, &plan)?;
        let rep = recover(&hist, state, window)?;
        points.push(SweepPoint {
            detector_size: plan.detector_size(),
            n_shifts: m,
            method,
            rms: rep.rms,
            scale: rep.scale,
            b: rep.b,
        });
    }
    Ok(points)
}

pub fn cmd_sweep_size(config: &ExperimentConfig) -> anyhow::Result<()> {
    let method = config.parse_method()?;
    let batch = sample_events(config.state.clone(), config.n_events, config.seed)?;
    let points = size_sweep(
        &batch,
        &config.state,
        config.detector.d0_min,
        &config.detector.size_multipliers,
        method,
        config.rho(),
        config.window(),
    )?;
    let mut csv = CsvWriter::create(
        &config.output_dir,
        "sweep_size.csv",
        &meta(config),
        "detector_size_lambda,n_shifts,method,rms,scale,b",
    )?;
    for p in &points {
        csv.row(format_args!(
            "{:.16e},{},{},{:.16e},{:.16e},{}",
            p.detector_size, p.n_shifts, p.method, p.rms, p.scale, p.b
        ))?;
    }
    let path = csv.finish()?;
    write_json(&config.output_dir, "sweep_size.json", &points)?;
    println!(
        "sweep-size: {} sizes, method {} -> {}",
        points.len(),
        method,
        path.display()
    );
    Ok(())
}

pub fn cmd_sweep_shift(config: &ExperimentConfig, fixed_sizes: &[f64]) -> anyhow::Result<()> {
    if fixed_sizes.is_empty() {
        anyhow::bail!("sweep-shift needs at least one detector size");
    }
    let batch = sample_events(config.state.clone(), config.n_events, config.seed)?;
    let rho = config.rho();
    let window = config.window();
    let mut csv = CsvWriter::create(
        &config.output_dir,
        "sweep_shift.csv",
        &meta(config),
        "detector_size_lambda,shift_lambda,rms,scale,b",
    )?;
    const SHIFT_STEPS: usize = 16;
    for &size in fixed_sizes {
        for j in 0..=SHIFT_STEPS {
            let shift = size * j as f64 / SHIFT_STEPS as f64;
            let array = DetectorArray::new(size, shift, rho)?;
            let hist = outcome_histogram(&batch, &array)?;
            let rep = recover(&hist, &config.state, window)?;
            csv.row(format_args!(
                "{size:.16e},{shift:.16e},{:.16e},{:.16e},{}",
                rep.rms, rep.scale, rep.b
            ))?;
        }
    }
    let path = csv.finish()?;
    println!(
        "sweep-shift: {} sizes x {} shifts -> {}",
        fixed_sizes.len(),
        SHIFT_STEPS + 1,
        path.display()
    );
    Ok(())
}

pub fn cmd_subsets(config: &ExperimentConfig, subset_counts: &[usize]) -> anyhow::Result<()> {
    if subset_counts.is_empty() {
        anyhow::bail!("subsets needs at least one subset count");
    }
    let method = config.parse_method()?;
    let batch = sample_events(config.state.clone(), config.n_events, config.seed)?;
    let mut csv = CsvWriter::create(
        &config.output_dir,
        "subsets.csv",
        &meta(config),
        "subset_count,detector_size_lambda,mean_rms",
    )?;
    for &k in subset_counts {
        if k == 0 || k > batch.n_events() {
            anyhow::bail!(
                "subset count {k} not usable with {} events",
                batch.n_events()
            );
        }
        let parts = batch.split(k)?;
        let mut mean =
            vec![0.0f64; config.detector.size_multipliers.len()];
        for part in &parts {
            let points = size_sweep(
                part,
                &config.state,
                config.detector.d0_min,
                &config.detector.size_multipliers,
                method,
                config.rho(),
                config.window(),
            )?;
            for (acc, p) in mean.iter_mut().zip(&points) {
                *acc += p.rms / k as f64;
            }
        }
        for (&m, &rms) in config.detector.size_multipliers.iter().zip(&mean) {
            csv.row(format_args!(
                "{k},{:.16e},{rms:.16e}",
                m as f64 * config.detector.d0_min
            ))?;
        }
    }
    let path = csv.finish()?;
    println!("subsets: counts {subset_counts:?} -> {}", path.display());
    Ok(())
}

/// Solve beta from the fixed momentum variance: beta^2 = (k2 - B^2)/(1 - 1/N).
pub fn beta_from_k_variance(n: usize, k_variance: f64, b: f64) -> anyhow::Result<f64> {
    let nf = n as f64;
    let beta_sq = (k_variance - b * b) / (1.0 - 1.0 / nf);
    if !(beta_sq > 0.0) {
        anyhow::bail!(
            "B = {b} is inadmissible at <k^2> = {k_variance} (beta^2 = {beta_sq})"
        );
    }
    Ok(beta_sq.sqrt())
}

pub fn cmd_mpa(
    config: &ExperimentConfig,
    k_variance: f64,
    b_grid: &[f64],
    d_mp: f64,
) -> anyhow::Result<()> {
    if b_grid.is_empty() {
        anyhow::bail!("mpa needs a nonempty B grid");
    }
    let n = config.state.n_photons();
    // Reference rate at the classical point r = 1, i.e. B = sqrt(k2/N).
    let b_ref = (k_variance / n as f64).sqrt();
    let reference = mpa_cell(config, n, k_variance, b_ref, d_mp)?;
    let ref_fraction = reference.close_fraction;

    let mut csv = CsvWriter::create(
        &config.output_dir,
        "mpa.csv",
        &meta(config),
        "b,r,close_fraction,r_tot,width_w,r_peak,r_tot_theory,r_peak_theory",
    )?;
    for &b in b_grid {
        let mut rep = mpa_cell(config, n, k_variance, b, d_mp)?;
        rep.normalize(ref_fraction)?;
        let r = rep.r_value.expect("JG state always has r");
        let (t_tot, t_peak) = theoretical_rates(n, r.clamp(1.0, (n as f64).sqrt()))?;
        csv.row(format_args!(
            "{b:.16e},{r:.16e},{:.16e},{:.16e},{},{:.16e},{t_tot:.16e},{t_peak:.16e}",
            rep.close_fraction,
            rep.r_tot.unwrap(),
            rep.width_w.map_or("nan".into(), |w| format!("{w:.16e}")),
            rep.r_peak.unwrap(),
        ))?;
    }
    let path = csv.finish()?;
    println!(
        "mpa: {} B values at <k^2>={k_variance}, d_mp={d_mp} -> {}",
        b_grid.len(),
        path.display()
    );
    Ok(())
}

fn mpa_cell(
    config: &ExperimentConfig,
    n: usize,
    k_variance: f64,
    b: f64,
    d_mp: f64,
) -> anyhow::Result<centroid_core::analysis::CloseEventReport> {
    let beta = beta_from_k_variance(n, k_variance, b)?;
    let state = StateModel::Jg(JointGaussianState::new(n, b, beta)?);
    let batch = sample_events(state, config.n_events, config.seed)?;
    Ok(close_event_analysis(&batch, d_mp)?)
}

pub fn cmd_fixed_feature(config: &ExperimentConfig) -> anyhow::Result<()> {
    let method = config.parse_method()?;
    let mut csv = CsvWriter::create(
        &config.output_dir,
        "fixed_feature.csv",
        &meta(config),
        "n_photons,detector_size_lambda,rms",
    )?;
    for n in 2..=4usize {
        // B = 2/(N λ) keeps the centroid envelope exp(-8 (X/λ)^2) for all N;
        // beta = 1/λ for N = 2, 3 and 4/5 λ⁻¹ for N = 4.
        let b = 2.0 / n as f64;
        let beta = if n == 4 { 0.8 } else { 1.0 };
        let state = StateModel::Jg(JointGaussianState::new(n, b, beta)?);
        let batch = sample_events(state.clone(), config.n_events, config.seed)?;
        let rho = default_rho(n);
        let half = 3.5 * 2.0 / n as f64;
        let points = size_sweep(
            &batch,
            &state,
            config.detector.d0_min,
            &config.detector.size_multipliers,
            method,
            rho,
            (-half, half),
        )?;
        for p in &points {
            csv.row(format_args!(
                "{n},{:.16e},{:.16e}",
                p.detector_size, p.rms
            ))?;
        }
    }
    let path = csv.finish()?;
    println!("fixed-feature: N in 2..=4 -> {}", path.display());
    Ok(())
}

pub fn cmd_cat(
    config: &ExperimentConfig,
    alpha_grid: &[f64],
    phi_grid: &[f64],
) -> anyhow::Result<()> {
    let d0 = 1.0 / 100.0;
    let rho = default_rho(2);
    let window = config.window();
    let mut csv = CsvWriter::create(
        &config.output_dir,
        "cat_alpha.csv",
        &meta(config),
        "alpha_mag,phi,rms,scale,b",
    )?;
    let run_cell = |alpha: f64, phi: f64| -> anyhow::Result<(f64, f64, usize)> {
        let state = StateModel::Cat(CatState::new(alpha, phi)?);
        let batch = sample_events(state.clone(), config.n_events, config.seed)?;
        let plan = ShiftPlan::new(d0, 1, Method::I, rho)?;
        let hist = run_plan(&batch, &plan)?;
        let rep = recover(&hist, &state, window)?;
        Ok((rep.rms, rep.scale, rep.b))
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    for &alpha in alpha_grid {
        let (rms, scale, b) = run_cell(alpha, half_pi)?;
        csv.row(format_args!(
            "{alpha:.16e},{half_pi:.16e},{rms:.16e},{scale:.16e},{b}"
        ))?;
    }
    let alpha_path = csv.finish()?;

    let mut csv = CsvWriter::create(
        &config.output_dir,
        "cat_phi.csv",
        &meta(config),
        "alpha_mag,phi,rms,scale,b",
    )?;
    for &phi in phi_grid {
        let (rms, scale, b) = run_cell(1.0, phi)?;
        csv.row(format_args!(
            "{:.16e},{phi:.16e},{rms:.16e},{scale:.16e},{b}",
            1.0
        ))?;
    }
    let phi_path = csv.finish()?;

    // Analytic centroid profiles for the swept phases at |alpha| = 1.
    let mut csv = CsvWriter::create(
        &config.output_dir,
        "cat_profiles.csv",
        &meta(config),
        "phi,x_lambda,density",
    )?;
    for &phi in phi_grid {
        let state = StateModel::Cat(CatState::new(1.0, phi)?);
        for i in -400i64..=400 {
            let x = i as f64 / 400.0;
            csv.row(format_args!(
                "{phi:.16e},{x:.16e},{:.16e}",
                state.centroid_reference(x)
            ))?;
        }
    }
    let profile_path = csv.finish()?;
    println!(
        "cat: |alpha| sweep -> {}, phi sweep -> {}, profiles -> {}",
        alpha_path.display(),
        phi_path.display(),
        profile_path.display()
    );
    Ok(())
}
