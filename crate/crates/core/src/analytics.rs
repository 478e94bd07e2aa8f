//! Closed-form reference values for the commutator growth.
//!
//! The semiquantum correlator at `J = N/2` reduces to a finite sum over
//! `M = N / 2^(t+1)` terms,
//! `f_SQ(t) = 2^t / (16 M^2) * sum_{k<M} (2k+1) / sin^2(pi (2k+1) / (4M))`,
//! plus a boundary term that only survives at `t = T`. Its large-`M`
//! asymptotic is a digamma function, and the long-time saturation level is
//! the circular-unitary-ensemble average `J^2 (N-J)^2 / (N (N^2 - 1))`.

use std::f64::consts::{LN_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix_core::ComplexMatrix;
use crate::otoc::{f_commutator, ProjectorRange};
use crate::quantum_baker::BakerConfig;
use crate::C64;

/// Euler–Mascheroni constant.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Lyapunov exponent of the classical baker's map.
pub const LYAPUNOV_EXPONENT: f64 = LN_2;

/// Smallest `M` for which [`f_sq_approx`] is offered.
pub const APPROX_MIN_M: usize = 8;

/// Parameters of the semiquantum sum at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiquantumParams {
    pub n: usize,
    /// Odd part `N0` of `N`.
    pub n0: usize,
    /// 2-adic valuation `T` of `N`.
    pub big_t: u32,
    pub t: u32,
    /// `floor(N / 2^(t+1))`.
    pub m: usize,
}

impl SemiquantumParams {
    pub fn new(n: usize, t: u32) -> Result<Self> {
        let config = BakerConfig::new(n)?;
        if t == 0 {
            return Err(Error::invalid("the semiquantum sum starts at t = 1"));
        }
        let m = if t + 1 >= usize::BITS { 0 } else { n >> (t + 1) };
        let big_t = config.max_semiquantum_time();
        if t > big_t && m < 1 {
            return Err(Error::invalid(format!(
                "N={n}, t={t}: floor(N/2^(t+1)) = 0, the sum is empty"
            )));
        }
        Ok(Self {
            n,
            n0: config.odd_part(),
            big_t,
            t,
            m,
        })
    }

    /// Whether `t` lies in the window `t <= T` where `B_t` exists.
    pub fn in_window(&self) -> bool {
        self.t <= self.big_t
    }
}

/// `sum_{k<K} (2k+1) / sin^2(pi (2k+1) / (4 m))` for real `m`.
fn sine_sum(m: f64, terms: usize) -> f64 {
    (0..terms)
        .map(|k| {
            let odd = (2 * k + 1) as f64;
            let s = (PI * odd / (4.0 * m)).sin();
            odd / (s * s)
        })
        .sum()
}

/// Exact semiquantum `f(t)` for `J = N/2`.
///
/// Inside the window `1 <= t <= T` the sum runs over the odd multiples
/// `l = (2k+1) 2^(t-1) < N/2` with `M = N / 2^(t+1)` possibly a half-integer,
/// and the `l = N/2` boundary term is always added (it vanishes unless
/// `t = T`). Beyond the window the integer `M = floor(N / 2^(t+1))` is used.
pub fn f_sq_exact(n: usize, t: u32) -> Result<f64> {
    let p = SemiquantumParams::new(n, t)?;
    let scale = (2.0f64).powi(t as i32);
    if p.in_window() {
        let m = n as f64 / (2.0 * scale);
        // number of odd l below N/2: 2k+1 < 2M
        let terms = (m - 0.5).ceil().max(0.0) as usize;
        let bulk = if terms == 0 {
            0.0
        } else {
            scale / (16.0 * m * m) * sine_sum(m, terms)
        };
        // sin^2(pi N0 2^(T-t-1)) is 0 for t < T and 1 at t = T (N0 odd)
        let boundary_sin_sq = if t == p.big_t { 1.0 } else { 0.0 };
        let nf = n as f64;
        let boundary = scale * scale / 4.0 / (nf * nf) * (nf / 2.0) * boundary_sin_sq;
        Ok(bulk + boundary)
    } else {
        let m = p.m as f64;
        Ok(scale / (16.0 * m * m) * sine_sum(m, p.m))
    }
}

/// Large-`M` form `2^t / (2 pi^2) * ln(4 e^(gamma+1) N / (pi 2^t))`.
pub fn f_sq_approx(n: usize, t: u32) -> Result<f64> {
    let p = SemiquantumParams::new(n, t)?;
    if p.m < APPROX_MIN_M {
        return Err(Error::invalid(format!(
            "approximation needs floor(N/2^(t+1)) >= {APPROX_MIN_M}, got {} for N={n}, t={t}",
            p.m
        )));
    }
    let scale = (2.0f64).powi(t as i32);
    let arg = 4.0 * (EULER_GAMMA + 1.0).exp() * n as f64 / (PI * scale);
    Ok(scale / (2.0 * PI * PI) * arg.ln())
}

/// Digamma function `psi_0(x)` for `x > 0`.
///
/// Shifts the argument above 10 with `psi(x) = psi(x+1) - 1/x` and then
/// uses the asymptotic series in `1/x^2`.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::invalid(format!("digamma needs a finite x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // B_{2k} / (2k) for k = 1..7
    const COEFFS: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut power = inv2;
    for c in COEFFS {
        series += c * power;
        power *= inv2;
    }
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// The finite sum `(1/M^2) sum_{k<M} (2k+1)/sin^2(pi(2k+1)/(4M))` and its
/// digamma form `(8/pi^2) [1 + ln(8/pi) + gamma + psi_0(M + 1/2)]`.
pub fn sum_asymptotic_check(m: usize) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::invalid("M must be at least 1"));
    }
    let mf = m as f64;
    let exact = sine_sum(mf, m) / (mf * mf);
    let asymptotic =
        8.0 / (PI * PI) * (1.0 + (8.0 / PI).ln() + EULER_GAMMA + digamma(mf + 0.5)?);
    Ok((exact, asymptotic))
}

/// CUE average of `f` for a rank-`J` projector in dimension `N`.
pub fn rmt_saturation(n: usize, j: usize) -> Result<f64> {
    if j == 0 || j >= n {
        return Err(Error::invalid(format!(
            "saturation value needs 1 <= J <= N-1, got J={j}, N={n}"
        )));
    }
    let (nf, jf) = (n as f64, j as f64);
    let rest = nf - jf;
    Ok(jf * jf * rest * rest / (nf * (nf * nf - 1.0)))
}

fn cue_from_rng(n: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut gauss = ComplexMatrix::zeros(n, n);
    // column-major fill keeps the stream layout independent of storage order
    for j in 0..n {
        for i in 0..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            gauss.set(i, j, C64::new(re * scale, im * scale));
        }
    }
    let qr = gauss.view().qr();
    let r = qr.R();
    let mut q = ComplexMatrix::from_faer(qr.compute_Q().as_ref());
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            let v = q.get(i, j) * phase;
            q.set(i, j, v);
        }
    }
    Ok(q)
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar-random unitary of dimension `n`, deterministic in `seed`.
///
/// QR of a complex Ginibre matrix with the phases of `diag(R)` moved into
/// `Q`, which makes the distribution exactly Haar.
pub fn sample_cue(n: usize, seed: u64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::invalid("CUE dimension must be positive"));
    }
    cue_from_rng(n, &mut sample_rng(seed, 0))
}

/// Sample `index` of the ensemble drawn from `seed`; identical to
/// `sample_cue(n, seed)` for index 0.
pub fn sample_cue_indexed(n: usize, seed: u64, index: u64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::invalid("CUE dimension must be positive"));
    }
    cue_from_rng(n, &mut sample_rng(seed, index))
}

/// Per-sample values of `f` for a projector on `[0, J-1]` and CUE draws.
pub fn cue_f_samples(n: usize, j: usize, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    if j == 0 || j > n {
        return Err(Error::invalid(format!("need 1 <= J <= N, got J={j}, N={n}")));
    }
    let range = ProjectorRange::new(n, 0, j - 1)?;
    (0..n_samples as u64)
        .into_par_iter()
        .map(|index| f_commutator(&sample_cue_indexed(n, seed, index)?, &range))
        .collect()
}

/// Mean and standard error of `f` over `n_samples` CUE draws.
pub fn cue_empirical_f(n: usize, j: usize, n_samples: usize, seed: u64) -> Result<(f64, f64)> {
    if n_samples < 2 {
        return Err(Error::invalid("need at least two samples for a standard error"));
    }
    Ok(mean_and_standard_error(&cue_f_samples(n, j, n_samples, seed)?))
}

/// Sample mean and standard error of the mean.
pub fn mean_and_standard_error(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn dyadic_special_values() {
        let v = |t| f_sq_exact(1024, t).unwrap();
        assert!(rel(v(8), (2.0 - 0.5f64.sqrt()) * 32.0) < 1e-12);
        assert!(rel(v(9), 64.0) < 1e-12);
        assert!(rel(v(10), 128.0) < 1e-12);
        for big_t in 4..=12u32 {
            let n = 1usize << big_t;
            assert!(rel(f_sq_exact(n, big_t - 1).unwrap(), (n / 16) as f64) < 1e-12);
            assert!(rel(f_sq_exact(n, big_t).unwrap(), (n / 8) as f64) < 1e-12);
        }
    }

    #[test]
    fn exact_rejects() {
        assert!(f_sq_exact(1024, 0).is_err());
        assert!(f_sq_exact(1023, 1).is_err());
        // outside the window with an empty floor sum
        assert!(f_sq_exact(6, 2).is_err());
        assert!(f_sq_exact(2446, 10).is_ok());
        assert!(f_sq_exact(2446, 11).is_err());
    }

    #[test]
    fn generic_n_boundary_at_t_equals_big_t() {
        // N = 2446 has T = 1; at t = 1 the half-integer M = 611.5 sum picks up
        // the boundary term, one step later the floor rule takes over
        let at_window = f_sq_exact(2446, 1).unwrap();
        let after = f_sq_exact(2446, 2).unwrap();
        assert!(at_window > 0.5 && at_window < 1.5, "{at_window}");
        assert!(after / at_window > 1.5 && after / at_window < 2.5);
    }

    #[test]
    fn approx_close_to_exact() {
        for t in 1..=6 {
            assert!(rel(f_sq_approx(1024, t).unwrap(), f_sq_exact(1024, t).unwrap()) < 0.01, "t={t}");
        }
        assert!(rel(f_sq_approx(1 << 20, 1).unwrap(), f_sq_exact(1 << 20, 1).unwrap()) < 1e-6);
        assert!(f_sq_approx(1024, 7).is_err());
    }

    #[test]
    fn approx_ratio_matches_log_correction() {
        // f(t+1)/f(t) = 2 (1 - ln2 / ln(C N / 2^t)) for the approximate form
        let n = 1 << 16;
        let c = 4.0 * (EULER_GAMMA + 1.0).exp() / PI;
        for t in 1..=8 {
            let ratio = f_sq_approx(n, t + 1).unwrap() / f_sq_approx(n, t).unwrap();
            let arg = c * n as f64 / 2f64.powi(t as i32);
            assert!((ratio - 2.0 * (1.0 - LN_2 / arg.ln())).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_band() {
        for t in 2..=7 {
            let r = (f_sq_exact(1024, t + 1).unwrap() / f_sq_exact(1024, t).unwrap()).ln() / LN_2;
            assert!(r > 0.7 && r < 0.9, "t={t} rate {r}");
        }
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        assert!((digamma(0.5).unwrap() + EULER_GAMMA + 2.0 * LN_2).abs() < 1e-12);
        for x in [0.5, 3.7, 10.0] {
            assert!((digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x).abs() < 1e-12);
        }
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
        for x in [0.01, 0.3, 1.7, 7.25, 42.0, 1e4] {
            let reference = statrs::function::gamma::digamma(x);
            assert!((digamma(x).unwrap() - reference).abs() < 1e-12 * reference.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn sum_asymptotics() {
        let (exact, _) = sum_asymptotic_check(1).unwrap();
        assert!((exact - 2.0).abs() < 1e-14);
        let diff = |m: usize| {
            let (e, a) = sum_asymptotic_check(m).unwrap();
            (e - a).abs()
        };
        let (e256, a256) = sum_asymptotic_check(256).unwrap();
        assert!(rel(a256, e256) < 1e-4);
        let ratio = diff(64) / diff(256);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
        for m in [16usize, 64, 256] {
            assert!(diff(m) * (m * m) as f64 <= 0.1, "M={m}");
        }
        assert!(sum_asymptotic_check(0).is_err());
    }

    #[test]
    fn saturation_values() {
        let v = rmt_saturation(1024, 512).unwrap();
        assert_eq!(v, 512f64.powi(4) / (1024.0 * (1024.0f64.powi(2) - 1.0)));
        assert!(rel(v, 64.0) < 1e-4);
        assert_eq!(rmt_saturation(2, 1).unwrap(), 1.0 / 6.0);
        assert_eq!(rmt_saturation(100, 30).unwrap(), rmt_saturation(100, 70).unwrap());
        assert!(rmt_saturation(8, 0).is_err());
        assert!(rmt_saturation(8, 8).is_err());
    }

    #[test]
    fn saturation_matches_semiquantum_at_t_minus_one() {
        for big_t in [8u32, 10, 12] {
            let n = 1usize << big_t;
            let sq = f_sq_exact(n, big_t - 1).unwrap();
            assert!(rel(rmt_saturation(n, n / 2).unwrap(), sq) < 2.0 / (n * n) as f64);
        }
    }

    #[test]
    fn cue_unitary_and_deterministic() {
        for n in [1usize, 2, 17, 64] {
            let u = sample_cue(n, 11).unwrap();
            assert!(u.unitarity_defect().unwrap() < 1e-12);
        }
        assert_eq!(sample_cue(12, 3).unwrap(), sample_cue(12, 3).unwrap());
        assert_ne!(sample_cue(12, 3).unwrap(), sample_cue(12, 4).unwrap());
        assert_eq!(sample_cue(12, 3).unwrap(), sample_cue_indexed(12, 3, 0).unwrap());
        assert!(sample_cue(0, 1).is_err());
    }

    #[test]
    fn cue_moments() {
        let n = 32;
        let samples: Vec<_> = (0..200).map(|s| sample_cue_indexed(n, 99, s).unwrap()).collect();
        let entry = |u: &ComplexMatrix| u.get(3, 7).norm_sqr();
        let second: Vec<f64> = samples.iter().map(entry).collect();
        let fourth: Vec<f64> = second.iter().map(|x| x * x).collect();
        let (m2, se2) = mean_and_standard_error(&second);
        let (m4, se4) = mean_and_standard_error(&fourth);
        let nf = n as f64;
        assert!((m2 - 1.0 / nf).abs() < 3.0 * se2, "{m2} vs {}", 1.0 / nf);
        assert!((m4 - 2.0 / (nf * (nf + 1.0))).abs() < 3.0 * se4);
    }

    #[test]
    fn cue_f_average() {
        let (mean, se) = cue_empirical_f(64, 16, 100, 5).unwrap();
        let expected = rmt_saturation(64, 16).unwrap();
        assert!((expected - 2.2506).abs() < 1e-3);
        assert!((mean - expected).abs() < 3.0 * se, "{mean} +- {se} vs {expected}");
        let (full, _) = cue_empirical_f(16, 16, 4, 5).unwrap();
        assert!(full.abs() < 1e-10);
        assert!(cue_empirical_f(16, 8, 1, 5).is_err());
    }

    #[test]
    fn cue_samples_independent_of_threads() {
        let a = cue_f_samples(20, 10, 8, 42).unwrap();
        let b: Vec<f64> = (0..8)
            .map(|i| {
                let r = ProjectorRange::new(20, 0, 9).unwrap();
                f_commutator(&sample_cue_indexed(20, 42, i).unwrap(), &r).unwrap()
            })
            .collect();
        assert_eq!(a, b);
    }
}
