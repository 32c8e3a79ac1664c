//! Grid scan for approximate topological eigenvalues.

use num_traits::{Float, FromPrimitive};
use rayon::prelude::*;

use crate::{Error, Result};

use super::occurrences::ReturnVectorSet;

/// Grid points `λ` of a square box with `|exp(2πi λ·v) − 1| < tol` for every
/// return vector `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumScan<F> {
    pub lo: F,
    pub hi: F,
    pub step: F,
    pub tol: F,
    /// Grid points per axis; point `i` is `lo + i·step`.
    pub points_per_axis: usize,
    pub vectors_used: usize,
    /// Surviving `(i, j)` grid indices, sorted.
    pub survivors: Vec<(usize, usize)>,
}

impl<F: Float> SpectrumScan<F> {
    pub fn coordinate(&self, i: usize) -> F {
        self.lo + F::from(i).expect("grid index") * self.step
    }

    pub fn survivor_points(&self) -> impl Iterator<Item = (F, F)> + '_ {
        self.survivors.iter().map(|&(i, j)| (self.coordinate(i), self.coordinate(j)))
    }

    /// Largest distance from a survivor to the nearest point of `ℤ²`.
    pub fn max_distance_to_integers(&self) -> F {
        self.survivor_points()
            .map(|(x, y)| ((x - x.round()).powi(2) + (y - y.round()).powi(2)).sqrt())
            .fold(F::zero(), F::max)
    }
}

/// Scans the box `[lo, hi]²`.
///
/// `|exp(2πiθ) − 1| = 2|sin(πθ)|`, so a point survives a vector `v` iff
/// `λ·v` is within `asin(tol/2)/π` of an integer. Vectors are tried shortest
/// first, which rejects most points after a handful of them.
pub fn spectrum_scan<F>(vectors: &ReturnVectorSet, lo: F, hi: F, step: F, tol: F) -> Result<SpectrumScan<F>>
where
    F: Float + FromPrimitive + Send + Sync,
{
    let two = F::one() + F::one();
    // written so that NaN parameters are rejected too
    let valid = step > F::zero() && tol > F::zero() && tol < two && hi >= lo;
    if !valid {
        return Err(Error::Invalid("scan needs step > 0, 0 < tol < 2 and lo <= hi".into()));
    }
    let points = ((hi - lo) / step + F::from(1e-9).expect("float")).floor().to_usize().expect("grid size") + 1;
    let theta = (tol / two).asin() / F::from(std::f64::consts::PI).expect("float");
    let half: Vec<(F, F)> =
        vectors.half().map(|(x, y)| (F::from_i64(x).expect("float"), F::from_i64(y).expect("float"))).collect();
    let coord = |i: usize| lo + F::from(i).expect("grid index") * step;
    let survives = |lx: F, ly: F| {
        half.iter().all(|&(vx, vy)| {
            let t = lx * vx + ly * vy;
            (t - t.round()).abs() < theta
        })
    };
    let survivors: Vec<(usize, usize)> = (0..points)
        .into_par_iter()
        .flat_map_iter(|i| {
            let lx = coord(i);
            (0..points).filter(move |&j| survives(lx, coord(j))).map(move |j| (i, j))
        })
        .collect();
    Ok(SpectrumScan { lo, hi, step, tol, points_per_axis: points, vectors_used: half.len(), survivors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[(i64, i64)]) -> ReturnVectorSet {
        let mut vectors: Vec<_> = v.iter().flat_map(|&(x, y)| [(x, y), (-x, -y)]).collect();
        vectors.push((0, 0));
        vectors.sort_by_key(|&(x, y)| (x * x + y * y, x, y));
        vectors.dedup();
        ReturnVectorSet { rho: 0, vectors }
    }

    #[test]
    fn empty_constraint_keeps_everything() {
        let s = spectrum_scan(&set(&[]), -1.0f64, 1.0, 0.5, 0.5).unwrap();
        assert_eq!(s.points_per_axis, 5);
        assert_eq!(s.survivors.len(), 25);
    }

    #[test]
    fn unit_vectors_pin_integers() {
        let s = spectrum_scan(&set(&[(1, 0), (0, 1), (7, 0), (0, 7), (13, 5)]), -2.5f64, 2.5, 0.01, 0.5).unwrap();
        assert!(s.survivor_points().any(|(x, y)| (x - 1.0).abs() < 1e-9 && y.abs() < 1e-9));
        assert!(s.max_distance_to_integers() < 0.02 * 2f64.sqrt());
        let f = spectrum_scan(&set(&[(1, 0), (0, 1)]), -1.0f32, 1.0, 0.25, 0.5).unwrap();
        assert_eq!(f.survivors.len(), 9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(spectrum_scan(&set(&[]), 0.0f64, 1.0, 0.0, 0.5).is_err());
        assert!(spectrum_scan(&set(&[]), 0.0f64, 1.0, 0.1, 2.0).is_err());
    }
}
