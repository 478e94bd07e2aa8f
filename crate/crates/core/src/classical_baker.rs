//! Classical baker's map on the unit torus and its period-t points.
//!
//! In binary the map is a two-sided shift: if `q = 0.a0 a1 a2 ...` and
//! `p = 0.a-1 a-2 ...` then one step gives `q' = 0.a1 a2 ...` and
//! `p' = 0.a0 a-1 a-2 ...`. Period-t points are labelled by a t-bit word
//! `nu` and its bit reversal `nu_bar`.

use crate::error::{Error, Result};

/// Largest period accepted by [`periodic_points`].
pub const MAX_PERIOD: u32 = 30;

/// Point of the unit square with both coordinates reduced into `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    q: f64,
    p: f64,
}

fn reduce_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid rounds tiny negative inputs up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl PhasePoint {
    /// Builds a point, reducing both coordinates modulo 1.
    pub fn new(q: f64, p: f64) -> Self {
        Self {
            q: reduce_unit(q),
            p: reduce_unit(p),
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Coordinate-wise distance on the torus (max norm).
    pub fn torus_distance(&self, other: &PhasePoint) -> f64 {
        let d = |a: f64, b: f64| {
            let x = (a - b).abs();
            x.min(1.0 - x)
        };
        d(self.q, other.q).max(d(self.p, other.p))
    }
}

/// One application of the baker's map, `(q, p) -> (2q mod 1, (p + floor(2q)) / 2)`.
///
/// `q = 1/2` belongs to the right half (`floor(2q) = 1`).
pub fn baker_step(x: PhasePoint) -> PhasePoint {
    let doubled = 2.0 * x.q;
    let bit = doubled.floor();
    PhasePoint::new(doubled - bit, (x.p + bit) / 2.0)
}

/// Inverse map, `(q', p') -> ((q' + floor(2p')) / 2, 2p' mod 1)`.
pub fn baker_step_inverse(x: PhasePoint) -> PhasePoint {
    let doubled = 2.0 * x.p;
    let bit = doubled.floor();
    PhasePoint::new((x.q + bit) / 2.0, doubled - bit)
}

/// Reverses the lowest `t` bits of `nu`.
pub fn bit_reverse(nu: u64, t: u32) -> Result<u64> {
    if t == 0 || t > 63 {
        return Err(Error::invalid(format!("bit width must be in 1..=63, got {t}")));
    }
    if nu >> t != 0 {
        return Err(Error::invalid(format!("{nu} does not fit in {t} bits")));
    }
    Ok(nu.reverse_bits() >> (64 - t))
}

/// One period-t point, kept as exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicPoint {
    pub nu: u64,
    pub nu_bar: u64,
    /// Common denominator `2^t - 1` of both coordinates.
    pub denominator: u64,
}

impl PeriodicPoint {
    pub fn q(&self) -> f64 {
        self.nu as f64 / self.denominator as f64
    }

    pub fn p(&self) -> f64 {
        self.nu_bar as f64 / self.denominator as f64
    }

    /// The point on the torus; `nu = 2^t - 1` lands on the origin.
    pub fn phase_point(&self) -> PhasePoint {
        PhasePoint::new(self.q(), self.p())
    }
}

/// The `2^t` period-t points `(nu/(2^t-1), nu_bar/(2^t-1))`.
///
/// Entries are generated on demand; at `t = 30` a materialized table would
/// not fit in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicOrbitTable {
    t: u32,
}

impl PeriodicOrbitTable {
    pub fn period(&self) -> u32 {
        self.t
    }

    pub fn len(&self) -> usize {
        1usize << self.t
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entry(&self, nu: u64) -> Result<PeriodicPoint> {
        let nu_bar = bit_reverse(nu, self.t)?;
        Ok(PeriodicPoint {
            nu,
            nu_bar,
            denominator: (1u64 << self.t) - 1,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = PeriodicPoint> + '_ {
        let denominator = (1u64 << self.t) - 1;
        (0..1u64 << self.t).map(move |nu| PeriodicPoint {
            nu,
            nu_bar: nu.reverse_bits() >> (64 - self.t),
            denominator,
        })
    }
}

pub fn periodic_points(t: u32) -> Result<PeriodicOrbitTable> {
    if t == 0 || t > MAX_PERIOD {
        return Err(Error::invalid(format!(
            "period must be in 1..={MAX_PERIOD}, got {t}"
        )));
    }
    Ok(PeriodicOrbitTable { t })
}

/// Iterates the map `steps` times.
pub fn iterate(mut x: PhasePoint, steps: usize) -> PhasePoint {
    for _ in 0..steps {
        x = baker_step(x);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn step_examples() {
        assert_eq!(baker_step(PhasePoint::new(0.0, 0.0)), PhasePoint::new(0.0, 0.0));
        let x = baker_step(PhasePoint::new(1.0 / 3.0, 2.0 / 3.0));
        assert!(x.torus_distance(&PhasePoint::new(2.0 / 3.0, 1.0 / 3.0)) < 1e-15);
        let x = baker_step(PhasePoint::new(0.7, 0.2));
        assert!((x.q() - 0.4).abs() < 1e-15 && (x.p() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn half_goes_right() {
        let x = baker_step(PhasePoint::new(0.5, 0.0));
        assert_eq!(x.q(), 0.0);
        assert_eq!(x.p(), 0.5);
    }

    #[test]
    fn coordinates_reduced() {
        let x = PhasePoint::new(1.25, -0.25);
        assert_eq!((x.q(), x.p()), (0.25, 0.75));
        assert_eq!(PhasePoint::new(-1e-18, 1.0).q(), 0.0);
        assert_eq!(PhasePoint::new(0.0, 1.0).p(), 0.0);
    }

    #[test]
    fn bit_reverse_examples() {
        assert_eq!(bit_reverse(1, 2).unwrap(), 2);
        assert_eq!(bit_reverse(3, 2).unwrap(), 3);
        assert_eq!(bit_reverse(2, 2).unwrap(), 1);
        for t in 1..=20 {
            assert_eq!(bit_reverse(0, t).unwrap(), 0);
        }
        assert_eq!(bit_reverse(1, 3).unwrap(), 4);
        assert_eq!(bit_reverse(3, 3).unwrap(), 6);
    }

    #[test]
    fn bit_reverse_rejects_out_of_range() {
        assert!(bit_reverse(4, 2).is_err());
        assert!(bit_reverse(0, 0).is_err());
    }

    #[test]
    fn involution_exhaustive() {
        for t in 1..=20u32 {
            let step = if t > 14 { 97 } else { 1 };
            for nu in (0..1u64 << t).step_by(step) {
                let r = bit_reverse(nu, t).unwrap();
                assert!(r < 1 << t);
                assert_eq!(bit_reverse(r, t).unwrap(), nu);
            }
        }
    }

    #[test]
    fn table_small_periods() {
        let t1: Vec<_> = periodic_points(1).unwrap().entries().collect();
        assert_eq!(t1.len(), 2);
        assert_eq!((t1[0].nu, t1[0].nu_bar, t1[0].q(), t1[0].p()), (0, 0, 0.0, 0.0));
        assert_eq!((t1[1].nu, t1[1].nu_bar, t1[1].q(), t1[1].p()), (1, 1, 1.0, 1.0));

        let pairs: Vec<_> = periodic_points(2)
            .unwrap()
            .entries()
            .map(|e| (e.nu, e.nu_bar))
            .collect();
        assert_eq!(pairs, vec![(0, 0), (1, 2), (2, 1), (3, 3)]);
    }

    #[test]
    fn period_three_point() {
        let e = periodic_points(3).unwrap().entry(1).unwrap();
        assert_eq!(e.nu_bar, 4);
        assert_eq!((e.q(), e.p()), (1.0 / 7.0, 4.0 / 7.0));
        let x = e.phase_point();
        let y = iterate(x, 3);
        assert!(x.torus_distance(&y) < 1e-14);
        // and not of lower period
        assert!(x.torus_distance(&baker_step(x)) > 0.1);
    }

    #[test]
    fn periodicity_up_to_twelve() {
        for t in 1..=12 {
            let table = periodic_points(t).unwrap();
            assert_eq!(table.len(), 1 << t);
            for e in table.entries() {
                let x = e.phase_point();
                let d = x.torus_distance(&iterate(x, t as usize));
                assert!(d < 1e-10, "t={t} nu={} drift {d}", e.nu);
            }
        }
    }

    #[test]
    fn table_bijection() {
        let table = periodic_points(10).unwrap();
        let mut seen = vec![false; table.len()];
        for e in table.entries() {
            assert!(!seen[e.nu_bar as usize]);
            seen[e.nu_bar as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn table_range_checked() {
        assert!(periodic_points(0).is_err());
        assert!(periodic_points(31).is_err());
        let big = periodic_points(30).unwrap();
        assert_eq!(big.len(), 1 << 30);
        assert!(big.entry(1 << 30).is_err());
    }

    fn dyadic(bits: &[u8]) -> f64 {
        bits.iter()
            .enumerate()
            .map(|(k, &b)| b as f64 * 0.5f64.powi(k as i32 + 1))
            .sum()
    }

    proptest! {
        #[test]
        fn involution_prop(t in 1u32..=40, raw in any::<u64>()) {
            let nu = raw & ((1u64 << t) - 1);
            prop_assert_eq!(bit_reverse(bit_reverse(nu, t).unwrap(), t).unwrap(), nu);
        }

        #[test]
        fn two_sided_shift(qbits in prop::collection::vec(0u8..2, 40), pbits in prop::collection::vec(0u8..2, 40)) {
            let x = PhasePoint::new(dyadic(&qbits), dyadic(&pbits));
            let y = baker_step(x);
            let mut new_p = vec![qbits[0]];
            new_p.extend_from_slice(&pbits);
            prop_assert_eq!(y.q(), dyadic(&qbits[1..]));
            prop_assert_eq!(y.p(), dyadic(&new_p));
        }

        #[test]
        fn inverse_recovers(q in 0.0f64..1.0, p in 0.0f64..1.0) {
            let x = PhasePoint::new(q, p);
            let back = baker_step_inverse(baker_step(x));
            prop_assert!(back.torus_distance(&x) < 1e-15);
        }
    }
}
