//! Dataset producers for the `otoc`, `semiquantum`, `spectrum` and
//! `cue-baseline` commands.

use crate::analytics::{cue_f_samples, f_sq_approx, f_sq_exact, mean_and_standard_error, rmt_saturation};
use crate::cli::config::ExperimentConfig;
use crate::cli::dataset::{Cell, Dataset};
use crate::error::Result;
use crate::matrix_core::{
    complex_eigenvalues, frobenius_norm_sq, matmul, singular_values_squared, truncate,
    ComplexMatrix,
};
use crate::otoc::{otoc_series, OtocMode, ProjectorRange, TruncationStats};
use crate::quantum_baker::{build_baker, build_semiquantum};

fn provenance(config: &ExperimentConfig) -> Vec<String> {
    vec![format!(
        "baker-otoc {} {}",
        env!("CARGO_PKG_VERSION"),
        config.echo()
    )]
}

/// Closed forms are tied to the left-half projector `[0, N/2 - 1]`.
fn closed_form_applies(range: &ProjectorRange) -> bool {
    range.j_min() == 0 && 2 * range.len() == range.dimension()
}

fn saturation_for(range: &ProjectorRange) -> Option<f64> {
    rmt_saturation(range.dimension(), range.len()).ok()
}

/// `t, f2, f4, f, f_sq_exact, f_sq_approx, rmt_saturation`.
///
/// The closed-form columns are empty at `t = 0`, for ranges other than the
/// left half, and where the formulas are out of their domain.
pub fn run_otoc(config: &ExperimentConfig) -> Result<Dataset> {
    let series = otoc_series(config.n, config.t_max, &config.range, config.mode)?;
    let norm = if config.normalize { config.n as f64 } else { 1.0 };
    let scaled = |v: Option<f64>| v.map(|x| x / norm);
    let saturation = saturation_for(&config.range);
    let closed = closed_form_applies(&config.range);

    let mut data = Dataset::new(&["t", "f2", "f4", "f", "f_sq_exact", "f_sq_approx", "rmt_saturation"]);
    data.comments = provenance(config);
    if config.normalize {
        data.comments.push("f-columns divided by N".into());
    }
    for r in &series.records {
        let (exact, approx) = if closed && r.t > 0 {
            (
                f_sq_exact(config.n, r.t as u32).ok(),
                f_sq_approx(config.n, r.t as u32).ok(),
            )
        } else {
            (None, None)
        };
        data.push(vec![
            r.t.into(),
            (r.f2 / norm).into(),
            (r.f4 / norm).into(),
            (r.f / norm).into(),
            scaled(exact).into(),
            scaled(approx).into(),
            scaled(saturation).into(),
        ]);
    }
    Ok(data)
}

/// Quantum against semiquantum for `1 <= t <= t_max <= T`:
/// `t, deviation, f_quantum, f_semiquantum, f_sq_exact`, where
/// `deviation = ||B^t - B_t||_F / sqrt(N)`.
pub fn run_semiquantum(config: &ExperimentConfig) -> Result<Dataset> {
    let n = config.n;
    let norm = if config.normalize { n as f64 } else { 1.0 };
    let closed = closed_form_applies(&config.range);
    let mut data = Dataset::new(&["t", "deviation", "f_quantum", "f_semiquantum", "f_sq_exact"]);
    data.comments = provenance(config);
    let b = build_baker(n)?;
    let mut power = b.clone();
    for t in 1..=config.t_max {
        if t > 1 {
            power = matmul(&b, &power)?;
        }
        let bt = build_semiquantum(n, t as u32)?;
        let deviation = (frobenius_norm_sq(&power.sub(&bt)?) / n as f64).sqrt();
        let fq = TruncationStats::compute(&power, &config.range)?;
        let fsq = TruncationStats::compute(&bt, &config.range)?;
        let exact = if closed { f_sq_exact(n, t as u32).ok() } else { None };
        data.push(vec![
            t.into(),
            deviation.into(),
            (fq.f / norm).into(),
            (fsq.f / norm).into(),
            exact.map(|x| x / norm).into(),
        ]);
    }
    Ok(data)
}

fn spectrum_rows(data: &mut Dataset, t: usize, u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<()> {
    let trunc = truncate(u_t, range)?;
    for (i, mu) in singular_values_squared(&trunc)?.into_iter().enumerate() {
        data.push(vec![t.into(), "sv".into(), i.into(), mu.into(), Cell::Empty]);
    }
    for (i, z) in complex_eigenvalues(&trunc)?.into_iter().enumerate() {
        data.push(vec![t.into(), "eig".into(), i.into(), z.re.into(), z.im.into()]);
    }
    Ok(())
}

/// Long format `t, kind, index, value_re, value_im` with `kind` either `sv`
/// (squared singular values, descending, `value_im` empty) or `eig`
/// (eigenvalues of the truncation). `t = 0` is the identity control.
pub fn run_spectrum(config: &ExperimentConfig) -> Result<Dataset> {
    let n = config.n;
    let mut data = Dataset::new(&["t", "kind", "index", "value_re", "value_im"]);
    data.comments = provenance(config);
    spectrum_rows(&mut data, 0, &ComplexMatrix::identity(n), &config.range)?;
    match config.mode {
        OtocMode::Quantum => {
            if config.t_max > 0 {
                let b = build_baker(n)?;
                let mut power = b.clone();
                for t in 1..=config.t_max {
                    if t > 1 {
                        power = matmul(&b, &power)?;
                    }
                    spectrum_rows(&mut data, t, &power, &config.range)?;
                }
            }
        }
        OtocMode::Semiquantum => {
            for t in 1..=config.t_max {
                spectrum_rows(&mut data, t, &build_semiquantum(n, t as u32)?, &config.range)?;
            }
        }
    }
    Ok(data)
}

/// `kind, index, value`: one `sample` row per CUE draw followed by `mean`,
/// `standard_error` and `rmt_saturation` summary rows. The projector rank
/// is taken from the configured range.
pub fn run_cue_baseline(config: &ExperimentConfig) -> Result<Dataset> {
    let j = config.range.len();
    let samples = cue_f_samples(config.n, j, config.n_samples, config.seed)?;
    let (mean, se) = mean_and_standard_error(&samples);
    let norm = if config.normalize { config.n as f64 } else { 1.0 };
    let mut data = Dataset::new(&["kind", "index", "value"]);
    data.comments = provenance(config);
    for (i, f) in samples.iter().enumerate() {
        data.push(vec!["sample".into(), i.into(), (f / norm).into()]);
    }
    data.push(vec!["mean".into(), Cell::Empty, (mean / norm).into()]);
    data.push(vec!["standard_error".into(), Cell::Empty, (se / norm).into()]);
    let formula = if j == config.n { Some(0.0) } else { rmt_saturation(config.n, j).ok() };
    data.push(vec!["rmt_saturation".into(), Cell::Empty, formula.map(|v| v / norm).into()]);
    Ok(data)
}
