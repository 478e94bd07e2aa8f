//! Eigenvalues of general complex matrices: Householder reduction to upper
//! Hessenberg form followed by single-shift complex QR sweeps with Givens
//! rotations. Only eigenvalues are produced, so each sweep touches the
//! active (unreduced) window alone.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// A subdiagonal entry is treated as zero once it is below this fraction
    /// of its two diagonal neighbours.
    pub deflation_tol: f64,
    /// Total QR sweeps allowed, per unit of matrix dimension.
    pub iterations_per_dim: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            deflation_tol: 1e-10,
            iterations_per_dim: 100,
        }
    }
}

pub fn complex_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    complex_eigenvalues_with(m, EigenOptions::default())
}

/// Eigenvalues indexed by the diagonal position of the Hessenberg matrix at
/// which each one deflated; no sorting is applied.
pub fn complex_eigenvalues_with(m: &ComplexMatrix, opts: EigenOptions) -> Result<Vec<C64>> {
    m.require_square()?;
    Hessenberg::reduce(m).eigenvalues(opts)
}

struct Hessenberg {
    n: usize,
    a: Vec<C64>,
    norm: f64,
}

impl Hessenberg {
    fn reduce(m: &ComplexMatrix) -> Self {
        let n = m.rows();
        let mut a = m.as_slice().to_vec();
        let mut v = vec![C64::new(0.0, 0.0); n];
        let mut w = vec![C64::new(0.0, 0.0); n];

        for k in 0..n.saturating_sub(2) {
            let len = n - k - 1;
            let tail_norm_sq: f64 = (k + 2..n).map(|i| a[i * n + k].norm_sqr()).sum();
            if tail_norm_sq == 0.0 {
                continue;
            }
            let x0 = a[(k + 1) * n + k];
            let alpha = (x0.norm_sqr() + tail_norm_sq).sqrt();
            let phase = if x0.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let beta = -phase * alpha;

            let v = &mut v[..len];
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = a[(k + 1 + i) * n + k];
            }
            v[0] -= beta;
            let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let tau = 2.0 / vnorm_sq;

            // left: rows k+1.., columns k..
            let w = &mut w[..n];
            w[k..].iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for (i, vi) in v.iter().enumerate() {
                let row = &a[(k + 1 + i) * n..(k + 2 + i) * n];
                let cv = vi.conj();
                for j in k..n {
                    w[j] += cv * row[j];
                }
            }
            for (i, vi) in v.iter().enumerate() {
                let scale = tau * vi;
                let row = &mut a[(k + 1 + i) * n..(k + 2 + i) * n];
                for j in k..n {
                    row[j] -= scale * w[j];
                }
            }

            // right: all rows, columns k+1..
            for i in 0..n {
                let row = &mut a[i * n + k + 1..(i + 1) * n];
                let dot: C64 = row.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
                let scale = tau * dot;
                for (x, y) in row.iter_mut().zip(v.iter()) {
                    *x -= scale * y.conj();
                }
            }

            a[(k + 1) * n + k] = beta;
            for i in k + 2..n {
                a[i * n + k] = C64::new(0.0, 0.0);
            }
        }

        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Self { n, a, norm }
    }

    fn at(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.n + j]
    }

    fn negligible(&self, k: usize, tol: f64) -> bool {
        let sub = self.at(k, k - 1).norm();
        let diag = self.at(k, k).norm() + self.at(k - 1, k - 1).norm();
        sub <= tol * diag || sub <= f64::EPSILON * self.norm || sub < f64::MIN_POSITIVE
    }

    fn eigenvalues(&mut self, opts: EigenOptions) -> Result<Vec<C64>> {
        let n = self.n;
        let mut eig = vec![C64::new(0.0, 0.0); n];
        if n == 1 {
            eig[0] = self.a[0];
            return Ok(eig);
        }
        let cap = opts.iterations_per_dim * n;
        let mut total = 0usize;
        let mut since_deflation = 0usize;
        let mut hi = n - 1;
        let mut rotations: Vec<(f64, C64)> = Vec::with_capacity(n);

        loop {
            // locate the start of the unreduced block ending at `hi`
            let mut lo = hi;
            while lo > 0 && !self.negligible(lo, opts.deflation_tol) {
                lo -= 1;
            }
            if lo > 0 {
                self.a[lo * n + lo - 1] = C64::new(0.0, 0.0);
            }

            if lo == hi {
                eig[hi] = self.at(hi, hi);
                since_deflation = 0;
                if hi == 0 {
                    break;
                }
                hi -= 1;
                continue;
            }
            if lo + 1 == hi {
                let (l1, l2) = eig2x2(
                    self.at(lo, lo),
                    self.at(lo, hi),
                    self.at(hi, lo),
                    self.at(hi, hi),
                );
                eig[lo] = l1;
                eig[hi] = l2;
                since_deflation = 0;
                if lo == 0 {
                    break;
                }
                hi = lo - 1;
                continue;
            }

            total += 1;
            since_deflation += 1;
            if total > cap {
                return Err(Error::NotConverged {
                    iterations: total - 1,
                    remaining: hi + 1,
                });
            }

            let shift = if since_deflation.is_multiple_of(10) {
                // exceptional shift to break cycles
                self.at(hi, hi) + C64::new(0.75 * self.at(hi, hi - 1).norm(), 0.0)
            } else {
                wilkinson_shift(
                    self.at(hi - 1, hi - 1),
                    self.at(hi - 1, hi),
                    self.at(hi, hi - 1),
                    self.at(hi, hi),
                )
            };
            self.qr_sweep(lo, hi, shift, &mut rotations);
        }
        Ok(eig)
    }

    fn qr_sweep(&mut self, lo: usize, hi: usize, shift: C64, rotations: &mut Vec<(f64, C64)>) {
        let n = self.n;
        let a = &mut self.a;
        for i in lo..=hi {
            a[i * n + i] -= shift;
        }
        rotations.clear();
        for k in lo..hi {
            let (c, s) = givens(a[k * n + k], a[(k + 1) * n + k]);
            rotations.push((c, s));
            let (top, bottom) = a.split_at_mut((k + 1) * n);
            let row_k = &mut top[k * n..(k + 1) * n];
            let row_k1 = &mut bottom[..n];
            for j in k..=hi {
                let u = row_k[j];
                let w = row_k1[j];
                row_k[j] = c * u + s * w;
                row_k1[j] = -s.conj() * u + c * w;
            }
            row_k1[k] = C64::new(0.0, 0.0);
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + idx;
            let last = (k + 2).min(hi);
            for i in lo..=last {
                let u = a[i * n + k];
                let w = a[i * n + k + 1];
                a[i * n + k] = c * u + s.conj() * w;
                a[i * n + k + 1] = -s * u + c * w;
            }
        }
        for i in lo..=hi {
            a[i * n + i] += shift;
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let r1 = d + half + disc;
    let r2 = d + half - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

fn eig2x2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let mean = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    // larger root first, the other from the determinant
    let big = if (mean + disc).norm() >= (mean - disc).norm() {
        mean + disc
    } else {
        mean - disc
    };
    if big.norm() == 0.0 {
        return (big, big);
    }
    let det = a * d - b * c;
    (big, det / big)
}
