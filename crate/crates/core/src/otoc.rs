//! Commutator growth `f(t) = -1/2 Tr[A(t), A(0)]^2 = f2(t) - f4(t)`.
//!
//! For a position-space projector `P(0)` onto a contiguous range the
//! correlators only depend on the truncation `P U^t P`: with `mu_i` the
//! squared singular values of the truncation,
//! `f2 = sum mu_i`, `f4 = sum mu_i^2` and `f = sum mu_i (1 - mu_i)`.
//! The same `f` is also the weight of `P(t)` between the range and its
//! complement, which gives an independent cross-check.

use std::ops::Range;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix_core::{
    frobenius_norm_sq, matmul, matmul_adjoint_left, singular_values_squared, truncate,
    ComplexMatrix,
};
use crate::quantum_baker::{build_baker, build_semiquantum, BakerConfig};
use crate::C64;

/// Relative tolerance shared by the route-equality checks.
pub const ROUTE_TOL: f64 = 1e-9;
/// Slack allowed above 1 for squared singular values of a truncated unitary.
pub const SUBUNITARY_SLACK: f64 = 1e-10;
/// Largest dimension at which the cross-block sum is evaluated in full
/// during series computation; above it rows are sampled.
pub const FULL_CROSS_CHECK_MAX_N: usize = 256;
const SAMPLED_ROWS: usize = 32;
/// Longest quantum series accepted by [`otoc_series`].
pub const MAX_QUANTUM_STEPS: usize = 1000;

/// `|a - b| <= tol * max(|a|, |b|, 1)`: relative above one, absolute below.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Contiguous position-basis range `[j_min, j_max]` of a projector on an
/// `N`-dimensional space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectorRange {
    n: usize,
    j_min: usize,
    j_max: usize,
}

impl ProjectorRange {
    pub fn new(n: usize, j_min: usize, j_max: usize) -> Result<Self> {
        if j_min > j_max || j_max >= n {
            return Err(Error::invalid(format!(
                "projector range [{j_min}, {j_max}] invalid for dimension {n}"
            )));
        }
        Ok(Self { n, j_min, j_max })
    }

    /// `[0, N/2 - 1]`, the left half of the square.
    pub fn left_half(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("no left half in dimension {n}")));
        }
        Self::new(n, 0, n / 2 - 1)
    }

    /// Hilbert-space dimension `N`.
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn j_min(&self) -> usize {
        self.j_min
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// Rank `J` of the projector.
    pub fn len(&self) -> usize {
        self.j_max - self.j_min + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> Range<usize> {
        self.j_min..self.j_max + 1
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices().contains(&j)
    }

    /// Indices outside the range, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.j_min).chain(self.j_max + 1..self.n).collect()
    }

    /// `P(0)` as a dense diagonal matrix.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let diag: Vec<C64> = (0..self.n)
            .map(|j| C64::new(if self.contains(j) { 1.0 } else { 0.0 }, 0.0))
            .collect();
        ComplexMatrix::from_diagonal(&diag)
    }

    fn check_against(&self, u: &ComplexMatrix) -> Result<()> {
        if !u.is_square() || u.rows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "projector on dimension {} applied to {}x{} matrix",
                self.n,
                u.rows(),
                u.cols()
            )));
        }
        Ok(())
    }
}

pub fn f2_of_truncation(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<f64> {
    range.check_against(u_t)?;
    Ok(frobenius_norm_sq(&truncate(u_t, range)?))
}

/// `f4 = sum mu_i^2`.
pub fn f4_of_truncation(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<f64> {
    range.check_against(u_t)?;
    let mu = singular_values_squared(&truncate(u_t, range)?)?;
    Ok(mu.iter().map(|m| m * m).sum())
}

/// `f = sum mu_i (1 - mu_i)` from the singular values of the truncation.
pub fn f_commutator(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<f64> {
    range.check_against(u_t)?;
    let mu = singular_values_squared(&truncate(u_t, range)?)?;
    Ok(mu.iter().map(|m| m * (1.0 - m)).sum())
}

/// `sum_{j in J, j' not in J} |<j|P(t)|j'>|^2`, using
/// `<j|P(t)|j'> = sum_{i in J} conj(U_ij) U_ij'`.
pub fn cross_block_sum(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<f64> {
    range.check_against(u_t)?;
    let outside = range.complement();
    if outside.is_empty() {
        return Ok(0.0);
    }
    let rows = u_t.submatrix(range.indices(), 0..range.dimension())?;
    let inner = rows.submatrix(0..range.len(), range.indices())?;
    let outer = rows.select_columns(&outside)?;
    Ok(frobenius_norm_sq(&matmul_adjoint_left(&inner, &outer)?))
}

/// Everything the truncation determines at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationStats {
    pub f2: f64,
    /// `||U~^dagger U~||_F^2`, computed without the eigenvalues.
    pub f4: f64,
    /// `sum mu_i (1 - mu_i)`.
    pub f: f64,
    /// Squared singular values, descending.
    pub mu: Vec<f64>,
}

impl TruncationStats {
    pub fn compute(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<Self> {
        range.check_against(u_t)?;
        let trunc = truncate(u_t, range)?;
        let gram = matmul_adjoint_left(&trunc, &trunc)?;
        let mu = singular_values_squared(&trunc)?;
        Ok(Self {
            f2: frobenius_norm_sq(&trunc),
            f4: frobenius_norm_sq(&gram),
            f: mu.iter().map(|m| m * (1.0 - m)).sum(),
            mu,
        })
    }

    /// `sum mu_i^2`, the singular-value form of `f4`.
    pub fn f4_from_mu(&self) -> f64 {
        self.mu.iter().map(|m| m * m).sum()
    }

    /// The per-step invariants: `f = f2 - f4` (both `f4` forms),
    /// `sum mu = f2`, subunitarity and `0 <= f <= J/4`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let fail = |what: String| Err(Error::NumericalCheck(what));
        if let Some(m) = self.mu.iter().find(|&&m| !(0.0..=1.0 + SUBUNITARY_SLACK).contains(&m)) {
            return fail(format!("squared singular value {m} outside [0, 1]"));
        }
        let sum_mu: f64 = self.mu.iter().sum();
        if !close(sum_mu, self.f2, tol) {
            return fail(format!("sum mu = {sum_mu} but f2 = {}", self.f2));
        }
        if !close(self.f4_from_mu(), self.f4, tol) {
            return fail(format!("sum mu^2 = {} but f4 = {}", self.f4_from_mu(), self.f4));
        }
        if !close(self.f, self.f2 - self.f4, tol) {
            return fail(format!("f = {} but f2 - f4 = {}", self.f, self.f2 - self.f4));
        }
        let bound = self.mu.len() as f64 / 4.0;
        if self.f < -tol || self.f > bound + tol {
            return fail(format!("f = {} outside [0, J/4 = {bound}]", self.f));
        }
        Ok(())
    }
}

/// Per-row cross-block identity on sampled rows `j` of the range:
/// `sum_{j' not in J} |P(t)_jj'|^2 = P(t)_jj - sum_{j' in J} |P(t)_jj'|^2`,
/// and the row sums must add up to `f` when every row is taken.
fn sampled_cross_check(
    u_t: &ComplexMatrix,
    range: &ProjectorRange,
    f: f64,
    rows_to_check: usize,
    seed: u64,
    tol: f64,
) -> Result<()> {
    let j_len = range.len();
    if rows_to_check >= j_len {
        let cross = cross_block_sum(u_t, range)?;
        return if close(cross, f, tol) {
            Ok(())
        } else {
            Err(Error::NumericalCheck(format!(
                "cross-block sum {cross} differs from f = {f}"
            )))
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, j_len, rows_to_check);
    let rows = u_t.submatrix(range.indices(), 0..range.dimension())?;
    let picked: Vec<usize> = picks.iter().map(|p| range.j_min() + p).collect();
    // rows of P(t) restricted to the range, for the sampled columns j
    let cols = rows.select_columns(&picked)?;
    let p_rows = matmul_adjoint_left(&cols, &rows)?;
    for (r, &j) in picked.iter().enumerate() {
        let row = p_rows.row(r);
        let outside: f64 = (0..range.dimension())
            .filter(|c| !range.contains(*c))
            .map(|c| row[c].norm_sqr())
            .sum();
        let inside: f64 = range.indices().map(|c| row[c].norm_sqr()).sum();
        let diag = row[j].re;
        if !close(outside, diag - inside, tol) {
            return Err(Error::NumericalCheck(format!(
                "row {j}: cross-block weight {outside} vs {}",
                diag - inside
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OtocMode {
    /// Powers `B^t` of the quantum baker.
    Quantum,
    /// Semiquantum propagators `B_t`.
    Semiquantum,
}

impl std::fmt::Display for OtocMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OtocMode::Quantum => "quantum",
            OtocMode::Semiquantum => "semiquantum",
        })
    }
}

impl std::str::FromStr for OtocMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(OtocMode::Quantum),
            "semiquantum" => Ok(OtocMode::Semiquantum),
            other => Err(Error::invalid(format!(
                "mode must be quantum or semiquantum, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocRecord {
    pub t: usize,
    pub f2: f64,
    pub f4: f64,
    pub f: f64,
    pub mu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocSeries {
    pub n: usize,
    pub range: ProjectorRange,
    pub mode: OtocMode,
    pub records: Vec<OtocRecord>,
}

impl OtocSeries {
    pub fn f_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f).collect()
    }
}

/// Validates `(n, t_max, range, mode)` without computing anything.
pub fn validate_series(n: usize, t_max: usize, range: &ProjectorRange, mode: OtocMode) -> Result<()> {
    let config = BakerConfig::new(n)?;
    if range.dimension() != n {
        return Err(Error::DimensionMismatch(format!(
            "projector on dimension {} for N={n}",
            range.dimension()
        )));
    }
    match mode {
        OtocMode::Semiquantum if t_max > config.max_semiquantum_time() as usize => {
            Err(Error::invalid(format!(
                "semiquantum series for N={n} limited to t <= {}, got t_max={t_max}",
                config.max_semiquantum_time()
            )))
        }
        OtocMode::Quantum if t_max > MAX_QUANTUM_STEPS => Err(Error::invalid(format!(
            "quantum series limited to t_max <= {MAX_QUANTUM_STEPS}, got {t_max}"
        ))),
        _ => Ok(()),
    }
}

fn record_for(
    u_t: &ComplexMatrix,
    range: &ProjectorRange,
    t: usize,
) -> Result<OtocRecord> {
    let stats = TruncationStats::compute(u_t, range)?;
    stats
        .check(ROUTE_TOL)
        .map_err(|e| Error::NumericalCheck(format!("t={t}: {e}")))?;
    let rows = if range.dimension() <= FULL_CROSS_CHECK_MAX_N {
        usize::MAX
    } else {
        SAMPLED_ROWS
    };
    sampled_cross_check(u_t, range, stats.f, rows, t as u64, ROUTE_TOL)
        .map_err(|e| Error::NumericalCheck(format!("t={t}: {e}")))?;
    Ok(OtocRecord {
        t,
        f2: stats.f2,
        f4: stats.f4,
        f: stats.f,
        mu: stats.mu,
    })
}

/// `f2`, `f4`, `f` and the `mu_i` for `t = 0..=t_max`.
///
/// Quantum mode accumulates `B^(t+1) = B B^t`; semiquantum mode builds each
/// `B_t` directly. Every record is checked against the route identities and
/// a violation aborts with [`Error::NumericalCheck`].
pub fn otoc_series(n: usize, t_max: usize, range: &ProjectorRange, mode: OtocMode) -> Result<OtocSeries> {
    otoc_series_with(n, t_max, range, mode, |_| {})
}

/// As [`otoc_series`], reporting each finished record to `progress`.
pub fn otoc_series_with(
    n: usize,
    t_max: usize,
    range: &ProjectorRange,
    mode: OtocMode,
    mut progress: impl FnMut(&OtocRecord),
) -> Result<OtocSeries> {
    validate_series(n, t_max, range, mode)?;
    let mut records = Vec::with_capacity(t_max + 1);
    let identity = ComplexMatrix::identity(n);
    let first = record_for(&identity, range, 0)?;
    progress(&first);
    records.push(first);

    match mode {
        OtocMode::Quantum => {
            if t_max > 0 {
                let b = build_baker(n)?;
                let mut power = b.clone();
                for t in 1..=t_max {
                    if t > 1 {
                        power = matmul(&b, &power)?;
                    }
                    let rec = record_for(&power, range, t)?;
                    progress(&rec);
                    records.push(rec);
                }
            }
        }
        OtocMode::Semiquantum => {
            for t in 1..=t_max {
                let bt = build_semiquantum(n, t as u32)?;
                let rec = record_for(&bt, range, t)?;
                progress(&rec);
                records.push(rec);
            }
        }
    }
    Ok(OtocSeries {
        n,
        range: *range,
        mode,
        records,
    })
}

/// `-1/2 Tr([A(t), A]^2)` for `t = 0..=t_max` with `A(t) = U^-t A U^t`.
pub fn f_general_observable(u: &ComplexMatrix, a: &ComplexMatrix, t_max: usize) -> Result<Vec<f64>> {
    if !u.is_square() || !a.is_square() || u.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "propagator {}x{} and observable {}x{}",
            u.rows(),
            u.cols(),
            a.rows(),
            a.cols()
        )));
    }
    let defect = a.hermiticity_defect()?;
    if defect > 1e-12 {
        return Err(Error::invalid(format!(
            "observable is not Hermitian (defect {defect:e})"
        )));
    }
    let mut out = Vec::with_capacity(t_max + 1);
    let mut power = ComplexMatrix::identity(u.rows());
    for t in 0..=t_max {
        if t > 0 {
            power = matmul(u, &power)?;
        }
        let a_t = matmul_adjoint_left(&power, &matmul(a, &power)?)?;
        let x = matmul(&a_t, a)?;
        // [A(t), A] = X - X^dagger since both factors are Hermitian
        let comm = x.sub(&x.adjoint())?;
        let n = comm.rows();
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                tr += comm.get(i, j) * comm.get(j, i);
            }
        }
        out.push(-0.5 * tr.re);
    }
    Ok(out)
}

/// Full-operator evaluations used as independent references for the
/// truncation formulas.
pub mod oracle {
    use super::*;

    /// `P(t) = U^dagger P U` as an `N x N` matrix.
    pub fn evolved_projector(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<ComplexMatrix> {
        range.check_against(u_t)?;
        matmul_adjoint_left(u_t, &matmul(&range.to_matrix(), u_t)?)
    }

    fn real_trace(m: &ComplexMatrix) -> Result<f64> {
        Ok(m.trace()?.re)
    }

    /// `Tr(P(t) P(0))`.
    pub fn two_point_trace(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<f64> {
        let pt = evolved_projector(u_t, range)?;
        real_trace(&matmul(&pt, &range.to_matrix())?)
    }

    /// `Tr(P(t) P(0) P(t) P(0))`.
    pub fn four_point_trace(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<f64> {
        let pt = evolved_projector(u_t, range)?;
        let half = matmul(&pt, &range.to_matrix())?;
        real_trace(&matmul(&half, &half)?)
    }

    /// `sum_{j in J, j' not in J} |P(t)_jj'|^2` read off the full `P(t)`.
    pub fn cross_block_direct(u_t: &ComplexMatrix, range: &ProjectorRange) -> Result<f64> {
        let pt = evolved_projector(u_t, range)?;
        let mut total = 0.0;
        for j in range.indices() {
            for (c, z) in pt.row(j).iter().enumerate() {
                if !range.contains(c) {
                    total += z.norm_sqr();
                }
            }
        }
        Ok(total)
    }
}
