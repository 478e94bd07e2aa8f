//! Quantum baker propagator and its semiquantum time-t counterpart.
//!
//! `B = G_N^dagger diag(G_{N/2}, G_{N/2})` and
//! `B_t = G_N^dagger (I_t (x) G_{N/2^t})`, where `I_t` is the bit-reversal
//! permutation with ones at `(nu, nu_bar)`. In the mixed
//! (momentum row, position column) representation block row `nu` holds
//! `G_{N/2^t}` in block column `nu_bar`.

use std::f64::consts::PI;

use crate::classical_baker::bit_reverse;
use crate::error::{Error, Result};
use crate::matrix_core::{dft_shifted, matmul, ComplexMatrix};
use crate::C64;

/// Largest `t` accepted by [`build_swap_structure`].
pub const MAX_SWAP_BITS: u32 = 20;

/// Hilbert-space dimension split as `N = N0 * 2^T` with `N0` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BakerConfig {
    n: usize,
    odd_part: usize,
    valuation: u32,
}

impl BakerConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "baker dimension must be even and at least 2, got {n}"
            )));
        }
        let valuation = n.trailing_zeros();
        Ok(Self {
            n,
            odd_part: n >> valuation,
            valuation,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// `N0`, the odd part of `N`.
    pub fn odd_part(&self) -> usize {
        self.odd_part
    }

    /// `T`, the last time at which the semiquantum propagator exists.
    pub fn max_semiquantum_time(&self) -> u32 {
        self.valuation
    }

    /// Effective Planck constant `h = 1/N`.
    pub fn planck(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Log-time `log2 N`.
    pub fn ehrenfest_time(&self) -> f64 {
        (self.n as f64).log2()
    }
}

/// Permutation `nu -> nu_bar` on `0..2^t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Matrix with ones at `(i, image(i))`.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &j) in self.0.iter().enumerate() {
            m.set(i, j, C64::new(1.0, 0.0));
        }
        m
    }
}

/// The period-t point structure `I_t` as the index map `nu -> nu_bar`.
pub fn build_swap_structure(t: u32) -> Result<Permutation> {
    if t == 0 || t > MAX_SWAP_BITS {
        return Err(Error::invalid(format!(
            "swap structure needs 1 <= t <= {MAX_SWAP_BITS}, got {t}"
        )));
    }
    (0..1u64 << t)
        .map(|nu| bit_reverse(nu, t).map(|r| r as usize))
        .collect::<Result<Vec<_>>>()
        .map(Permutation)
}

pub fn build_baker(n: usize) -> Result<ComplexMatrix> {
    BakerConfig::new(n)?;
    let half = n / 2;
    let g_half = small_dft(half)?;
    let mut block = ComplexMatrix::zeros(n, n);
    for i in 0..half {
        for j in 0..half {
            let z = g_half.get(i, j);
            block.set(i, j, z);
            block.set(half + i, half + j, z);
        }
    }
    matmul(&dft_shifted(n)?.adjoint(), &block)
}

fn check_semiquantum(n: usize, t: u32) -> Result<BakerConfig> {
    let config = BakerConfig::new(n)?;
    if t == 0 || t > config.max_semiquantum_time() {
        return Err(Error::invalid(format!(
            "semiquantum propagator for N={n} exists for 1 <= t <= {}, got t={t}",
            config.max_semiquantum_time()
        )));
    }
    Ok(config)
}

/// `G_M`, including the `M = 1` phase `exp(-i pi/2)`.
fn small_dft(m: usize) -> Result<ComplexMatrix> {
    if m == 1 {
        ComplexMatrix::new(1, 1, vec![C64::from_polar(1.0, -PI / 2.0)])
    } else {
        dft_shifted(m)
    }
}

/// The mixed-representation factor `I_t (x) G_{N/2^t}`.
pub fn mixed_factor(n: usize, t: u32) -> Result<ComplexMatrix> {
    check_semiquantum(n, t)?;
    let blocks = 1usize << t;
    let size = n / blocks;
    let g = small_dft(size)?;
    let swap = build_swap_structure(t)?;
    let mut out = ComplexMatrix::zeros(n, n);
    for nu in 0..blocks {
        let nu_bar = swap.image(nu);
        for i in 0..size {
            for j in 0..size {
                out.set(nu * size + i, nu_bar * size + j, g.get(i, j));
            }
        }
    }
    Ok(out)
}

/// Semiquantum propagator `B_t`, defined for `1 <= t <= T`.
///
/// Column block `nu_bar` of `B_t` is `G_N^dagger[:, block nu] * G_{N/2^t}`,
/// so the product costs `N^3 / 2^t` instead of a dense `N^3`.
pub fn build_semiquantum(n: usize, t: u32) -> Result<ComplexMatrix> {
    check_semiquantum(n, t)?;
    let blocks = 1usize << t;
    let size = n / blocks;
    let g = small_dft(size)?;
    let g_inv = dft_shifted(n)?.adjoint();
    let swap = build_swap_structure(t)?;
    let mut out = ComplexMatrix::zeros(n, n);
    for nu in 0..blocks {
        let nu_bar = swap.image(nu);
        let cols = g_inv.submatrix(0..n, nu * size..(nu + 1) * size)?;
        let block = matmul(&cols, &g)?;
        for k in 0..n {
            for j in 0..size {
                out.set(k, nu_bar * size + j, block.get(k, j));
            }
        }
    }
    Ok(out)
}

/// `exp(2 pi i num / den)` with `num` reduced modulo `den` first.
fn root_of_unity(num: i128, den: i128) -> C64 {
    let r = num.rem_euclid(den);
    C64::from_polar(1.0, 2.0 * PI * r as f64 / den as f64)
}

/// Contribution of position block `nu_bar` to `<k|B_t|n>` in the closed
/// position-basis form; zero unless `n` lies in block `nu_bar`.
pub fn semiquantum_position_term(n_dim: usize, t: u32, k: usize, n: usize, nu_bar: usize) -> Result<C64> {
    check_semiquantum(n_dim, t)?;
    if k >= n_dim || n >= n_dim {
        return Err(Error::invalid(format!(
            "indices ({k}, {n}) outside dimension {n_dim}"
        )));
    }
    let blocks = 1usize << t;
    if nu_bar >= blocks {
        return Err(Error::invalid(format!("block {nu_bar} outside 0..{blocks}")));
    }
    let size = n_dim / blocks;
    // Theta_{n nu_bar}
    if n < nu_bar * size || n >= (nu_bar + 1) * size {
        return Ok(C64::new(0.0, 0.0));
    }
    let nu = bit_reverse(nu_bar as u64, t)? as i128;
    let (n_dim_i, k_i, n_i) = (n_dim as i128, k as i128, n as i128);
    let two_t = 1i128 << t;

    let sign = if nu_bar.is_multiple_of(2) { 1.0 } else { -1.0 };
    // exp[2 pi i nu (k + 1/2) / 2^t] = exp[2 pi i nu (2k+1) / 2^(t+1)]
    let momentum_phase = root_of_unity(nu * (2 * k_i + 1), 2 * two_t);
    // sum_m exp[2 pi i (m+1/2)(k+1/2 - 2^t(n+1/2)) / N]
    //   = sum_m exp[2 pi i (2m+1)(2k+1 - 2^t(2n+1)) / 4N]
    let inner = 2 * k_i + 1 - two_t * (2 * n_i + 1);
    let sum: C64 = (0..size as i128)
        .map(|m| root_of_unity((2 * m + 1) * inner, 4 * n_dim_i))
        .sum();
    let prefactor = (two_t as f64).sqrt() / n_dim as f64;
    Ok(momentum_phase * sum * (prefactor * sign))
}

/// `<k|B_t|n>` from the closed position-basis form, summed over all
/// position blocks (only the block containing `n` contributes).
pub fn semiquantum_position_element(n_dim: usize, t: u32, k: usize, n: usize) -> Result<C64> {
    check_semiquantum(n_dim, t)?;
    (0..1usize << t)
        .map(|nu_bar| semiquantum_position_term(n_dim, t, k, n, nu_bar))
        .sum()
}

/// Full `B_t` assembled entry by entry from [`semiquantum_position_element`].
pub fn semiquantum_from_position_form(n_dim: usize, t: u32) -> Result<ComplexMatrix> {
    check_semiquantum(n_dim, t)?;
    let size = n_dim >> t;
    let mut out = ComplexMatrix::zeros(n_dim, n_dim);
    for n in 0..n_dim {
        let nu_bar = n / size;
        for k in 0..n_dim {
            out.set(k, n, semiquantum_position_term(n_dim, t, k, n, nu_bar)?);
        }
    }
    Ok(out)
}

/// `||B^t - B_t||_F / sqrt(N)` for `t = 1..=T`.
pub fn semiquantum_deviation(n: usize) -> Result<Vec<f64>> {
    let config = BakerConfig::new(n)?;
    let b = build_baker(n)?;
    let mut power = b.clone();
    let mut out = Vec::new();
    for t in 1..=config.max_semiquantum_time() {
        if t > 1 {
            power = matmul(&b, &power)?;
        }
        let diff = power.sub(&build_semiquantum(n, t)?)?;
        out.push((crate::matrix_core::frobenius_norm_sq(&diff) / n as f64).sqrt());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_core::{frobenius_norm_sq, truncate};
    use crate::otoc::ProjectorRange;

    fn flip(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i + j == n - 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn config_split() {
        let c = BakerConfig::new(2446).unwrap();
        assert_eq!((c.odd_part(), c.max_semiquantum_time()), (1223, 1));
        let c = BakerConfig::new(1024).unwrap();
        assert_eq!((c.odd_part(), c.max_semiquantum_time()), (1, 10));
        assert_eq!(c.ehrenfest_time(), 10.0);
        let c = BakerConfig::new(210).unwrap();
        assert_eq!((c.odd_part(), c.max_semiquantum_time()), (105, 1));
        assert!(BakerConfig::new(7).is_err());
        assert!(BakerConfig::new(0).is_err());
    }

    #[test]
    fn baker_unitary() {
        for n in [2, 4, 64, 210, 256, 1024] {
            let defect = build_baker(n).unwrap().unitarity_defect().unwrap();
            assert!(defect < 1e-12, "N={n}: {defect}");
        }
        assert!(build_baker(9).is_err());
    }

    #[test]
    fn baker_equals_first_semiquantum() {
        for n in [2, 6, 16, 64, 210] {
            let b = build_baker(n).unwrap();
            let b1 = build_semiquantum(n, 1).unwrap();
            assert!(b.max_abs_diff(&b1).unwrap() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn baker_parity() {
        let n = 64;
        let b = build_baker(n).unwrap();
        let r = flip(n);
        let rbr = matmul(&matmul(&r, &b).unwrap(), &r).unwrap();
        assert!(rbr.max_abs_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn swap_structures() {
        assert_eq!(build_swap_structure(1).unwrap().as_slice(), &[0, 1]);
        assert_eq!(build_swap_structure(2).unwrap().as_slice(), &[0, 2, 1, 3]);
        let s3 = build_swap_structure(3).unwrap();
        for nu in 0..8u64 {
            assert_eq!(s3.image(nu as usize) as u64, bit_reverse(nu, 3).unwrap());
        }
        assert_eq!((s3.image(1), s3.image(2), s3.image(3)), (4, 2, 6));
        assert!(build_swap_structure(0).is_err());
        assert!(build_swap_structure(21).is_err());
        assert_eq!(build_swap_structure(20).unwrap().len(), 1 << 20);
        let m = build_swap_structure(2).unwrap().to_matrix();
        assert_eq!(m.get(1, 2), C64::new(1.0, 0.0));
        assert_eq!(m.get(1, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn mixed_factor_block_layout() {
        let n = 16;
        let x = mixed_factor(n, 2).unwrap();
        let g = dft_shifted(4).unwrap();
        let expected_blocks = [(0, 0), (1, 2), (2, 1), (3, 3)];
        for bi in 0..4 {
            for bj in 0..4 {
                let block = x.submatrix(bi * 4..bi * 4 + 4, bj * 4..bj * 4 + 4).unwrap();
                if expected_blocks.contains(&(bi, bj)) {
                    assert_eq!(block, g);
                } else {
                    assert_eq!(frobenius_norm_sq(&block), 0.0);
                }
            }
        }
        // and B_t is G_N^dagger times it
        let bt = matmul(&dft_shifted(n).unwrap().adjoint(), &x).unwrap();
        assert!(bt.max_abs_diff(&build_semiquantum(n, 2).unwrap()).unwrap() < 1e-13);
    }

    #[test]
    fn semiquantum_unitary() {
        for n in [64, 210, 256, 1024] {
            let big_t = BakerConfig::new(n).unwrap().max_semiquantum_time();
            for t in 1..=big_t {
                let defect = build_semiquantum(n, t).unwrap().unitarity_defect().unwrap();
                assert!(defect < 1e-12, "N={n} t={t}: {defect}");
            }
        }
    }

    #[test]
    fn semiquantum_rejects_outside_window() {
        assert!(build_semiquantum(210, 2).is_err());
        assert!(build_semiquantum(64, 7).is_err());
        assert!(build_semiquantum(64, 0).is_err());
        assert!(build_semiquantum(64, 6).is_ok());
    }

    #[test]
    fn position_form_matches_products() {
        for n in [2, 16, 64, 256] {
            let big_t = BakerConfig::new(n).unwrap().max_semiquantum_time();
            for t in 1..=big_t {
                let direct = build_semiquantum(n, t).unwrap();
                let closed = semiquantum_from_position_form(n, t).unwrap();
                let diff = direct.max_abs_diff(&closed).unwrap();
                assert!(diff < 1e-12, "N={n} t={t}: {diff}");
            }
        }
    }

    #[test]
    fn position_form_support() {
        let (n, t) = (64, 2);
        let size = n >> t;
        for &(k, col) in &[(0usize, 0usize), (5, 17), (63, 40), (31, 63)] {
            let owner = col / size;
            for nu_bar in 0..4 {
                let term = semiquantum_position_term(n, t, k, col, nu_bar).unwrap();
                if nu_bar == owner {
                    assert!(term.norm() > 0.0);
                } else {
                    assert_eq!(term, C64::new(0.0, 0.0));
                }
            }
            let full = semiquantum_position_element(n, t, k, col).unwrap();
            let only = semiquantum_position_term(n, t, k, col, owner).unwrap();
            assert_eq!(full, only);
        }
        assert!(semiquantum_position_element(64, 2, 64, 0).is_err());
    }

    #[test]
    fn smallest_case() {
        let b = build_baker(2).unwrap();
        for k in 0..2 {
            for n in 0..2 {
                let z = semiquantum_position_element(2, 1, k, n).unwrap();
                assert!((z - b.get(k, n)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn two_point_value_is_quarter_dimension() {
        for n in [16, 64, 256] {
            let big_t = BakerConfig::new(n).unwrap().max_semiquantum_time();
            let half = ProjectorRange::new(n, 0, n / 2 - 1).unwrap();
            for t in 1..=big_t {
                let f2 = frobenius_norm_sq(&truncate(&build_semiquantum(n, t).unwrap(), &half).unwrap());
                let want = n as f64 / 4.0;
                assert!((f2 - want).abs() <= 1e-9 * want, "N={n} t={t}: {f2}");
            }
        }
    }

    #[test]
    fn deviation_recorded() {
        let dev = semiquantum_deviation(64).unwrap();
        assert_eq!(dev.len(), 6);
        assert!(dev[0] < 1e-12);
        assert!(dev[1..].iter().all(|&d| d > 1e-6 && d.is_finite()));
    }
}
