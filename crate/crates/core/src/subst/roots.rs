//! Certified polynomial roots: exact rational roots first, then Aberth
//! iteration on each square-free factor with Weierstrass inclusion discs.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive, Zero};

use super::poly::IntPoly;
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 2000;

/// A root `value` of a polynomial, guaranteed to lie within `radius` of the
/// reported value (a disc containing exactly one root of its factor).
#[derive(Clone, Debug, PartialEq)]
pub struct Root<F> {
    pub value: Complex<F>,
    pub radius: F,
    pub multiplicity: usize,
    /// Set for rational roots, which are found exactly.
    pub exact: Option<BigRational>,
    /// The root is real (certified by conjugate symmetry or exactness).
    pub real: bool,
    /// The root is a root of unity (from an exact cyclotomic factor).
    pub unit: bool,
}

impl<F: Float> Root<F> {
    pub fn modulus(&self) -> F {
        self.value.norm()
    }

    /// `Some(true)` if certainly inside the unit disc, `Some(false)` if
    /// certainly not, `None` if the inclusion disc meets the unit circle.
    pub fn inside_unit_disc(&self) -> Option<bool> {
        if self.unit {
            return Some(false);
        }
        if let Some(r) = &self.exact {
            return Some(r.numer().magnitude() < r.denom().magnitude());
        }
        let m = self.modulus();
        if m + self.radius < F::one() {
            Some(true)
        } else if m - self.radius > F::one() {
            Some(false)
        } else {
            None
        }
    }
}

fn to_float<F: Float>(v: &num_bigint::BigInt) -> F {
    F::from(v.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan)
}

/// All roots of `poly` with multiplicity, each within `tol` of the truth.
/// Roots are sorted by decreasing real part, then decreasing imaginary part.
pub fn eigenvalues<F: Float>(poly: &IntPoly, tol: F) -> Result<Vec<Root<F>>> {
    assert!(tol > F::zero(), "tolerance must be positive");
    let mut roots = Vec::new();
    if poly.is_zero() {
        return Err(Error::Invalid("the zero polynomial has no finite root set".into()));
    }
    let (rational, rest) = poly.rational_roots();
    for (r, multiplicity) in rational {
        let value = F::from(r.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan);
        let unit = r.numer().magnitude() == r.denom().magnitude();
        roots.push(Root {
            value: Complex::new(value, F::zero()),
            radius: F::zero(),
            multiplicity,
            exact: Some(r),
            real: true,
            unit,
        });
    }
    for (factor, multiplicity) in rest.squarefree_factors() {
        let (cyc, other) = factor.split_cyclotomic();
        for (part, unit) in [(cyc, true), (other, false)] {
            if part.degree() == 0 {
                continue;
            }
            for mut root in simple_roots(&part, tol)? {
                root.multiplicity = multiplicity;
                root.unit = unit;
                roots.push(root);
            }
        }
    }
    roots.sort_by(|a, b| {
        b.value
            .re
            .partial_cmp(&a.value.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.value.im.partial_cmp(&a.value.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(roots)
}

/// Roots of a square-free integer polynomial of degree ≥ 1.
fn simple_roots<F: Float>(poly: &IntPoly, tol: F) -> Result<Vec<Root<F>>> {
    let coeffs: Vec<F> = poly.coeffs().iter().map(to_float).collect();
    let n = poly.degree();
    if n == 1 {
        let z = -coeffs[0] / coeffs[1];
        let radius = F::epsilon() * z.abs() * F::from(4.0).expect("small constant");
        if radius > tol {
            return Err(Error::NonConvergence(0));
        }
        return Ok(vec![Root {
            value: Complex::new(z, F::zero()),
            radius,
            multiplicity: 1,
            exact: None,
            real: true,
            unit: false,
        }]);
    }
    let lead = coeffs[n];
    let cauchy = F::one()
        + coeffs[..n].iter().map(|c| (*c / lead).abs()).fold(F::zero(), F::max);
    let two_pi = F::from(std::f64::consts::TAU).expect("constant");
    let mut z: Vec<Complex<F>> = (0..n)
        .map(|k| {
            let t = two_pi * F::from(k).expect("index") / F::from(n).expect("degree")
                + F::from(0.4).expect("constant");
            Complex::from_polar(cauchy * F::from(0.9).expect("constant"), t)
        })
        .collect();

    for iteration in 0..MAX_ITERATIONS {
        let mut largest = F::zero();
        for i in 0..n {
            let (p, dp) = horner(&coeffs, z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let sum = (0..n)
                .filter(|&j| j != i)
                .fold(Complex::zero(), |acc: Complex<F>, j| acc + (z[i] - z[j]).inv());
            let step = ratio / (Complex::new(F::one(), F::zero()) - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] = z[i] - step;
                largest = largest.max(step.norm());
            }
        }
        if largest <= F::epsilon() * cauchy * F::from(16.0).expect("constant") || iteration + 1 == MAX_ITERATIONS {
            if let Some(roots) = certify(&coeffs, &z, tol) {
                return Ok(roots);
            }
            if largest <= F::epsilon() * cauchy {
                break;
            }
        }
    }
    Err(Error::NonConvergence(MAX_ITERATIONS))
}

fn horner<F: Float>(coeffs: &[F], z: Complex<F>) -> (Complex<F>, Complex<F>) {
    let mut p = Complex::zero();
    let mut dp = Complex::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(c, F::zero());
    }
    (p, dp)
}

/// Weierstrass inclusion discs with a rounding allowance; `None` unless the
/// discs are pairwise disjoint and within tolerance.
fn certify<F: Float>(coeffs: &[F], z: &[Complex<F>], tol: F) -> Option<Vec<Root<F>>> {
    let n = z.len();
    let nf = F::from(n).expect("degree");
    let eps = F::epsilon();
    let lead = coeffs[n].abs();
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let (p, _) = horner(coeffs, z[i]);
        let zn = z[i].norm();
        let scale = coeffs.iter().rev().fold(F::zero(), |acc, c| acc * zn + c.abs());
        let err = F::from(4.0).expect("constant") * nf * eps * scale;
        let denom = (0..n)
            .filter(|&j| j != i)
            .fold(lead, |acc, j| acc * (z[i] - z[j]).norm())
            * (F::one() - F::from(4.0).expect("constant") * nf * eps);
        if denom <= F::zero() {
            return None;
        }
        radii.push(nf * (p.norm() + err) / denom);
    }
    if radii.iter().any(|r| !(r.is_finite() && *r <= tol)) {
        return None;
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= radii[i] + radii[j] {
                return None;
            }
        }
    }
    Some(
        (0..n)
            .map(|i| {
                // the conjugate of the root in disc i is a root; if the mirrored
                // disc meets no other disc, it is this root, which is then real
                let mirrored = z[i].conj();
                let real = z[i].im.abs() <= radii[i]
                    && (0..n)
                        .filter(|&j| j != i)
                        .all(|j| (mirrored - z[j]).norm() > radii[i] + radii[j]);
                let value = if real { Complex::new(z[i].re, F::zero()) } else { z[i] };
                Root {
                    value,
                    radius: radii[i] + if real { z[i].im.abs() } else { F::zero() },
                    multiplicity: 1,
                    exact: None,
                    real,
                    unit: false,
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dpv_spectrum() {
        let p = IntPoly::from_i64(&[0, -3, -4, 0, 1]);
        let roots = eigenvalues(&p, 1e-9).unwrap();
        let s13 = 13f64.sqrt();
        let expect = [(1.0 + s13) / 2.0, 0.0, -1.0, (1.0 - s13) / 2.0];
        assert_eq!(roots.len(), 4);
        for (r, e) in roots.iter().zip(expect) {
            assert!((r.value.re - e).abs() < 1e-9 && r.value.im == 0.0, "{r:?}");
            assert!(r.radius < 1e-9 && r.real);
        }
        assert!(roots[1].exact.is_some() && roots[2].exact.is_some());
        assert!(roots[2].unit);
    }

    #[test]
    fn unit_and_repeated_roots() {
        let roots = eigenvalues(&IntPoly::from_i64(&[-1, 0, 1]), 1e-9).unwrap();
        assert!(roots.iter().all(|r| r.exact.is_some() && r.unit));
        // (x^2 + 1)^2 (x^2 - 2)
        let p = IntPoly::from_i64(&[1, 0, 1]).mul(&IntPoly::from_i64(&[1, 0, 1])).mul(&IntPoly::from_i64(&[-2, 0, 1]));
        let roots = eigenvalues(&p, 1e-9).unwrap();
        assert_eq!(roots.iter().map(|r| r.multiplicity).sum::<usize>(), 6);
        assert_eq!(roots.iter().filter(|r| r.unit).count(), 2);
        assert!(roots.iter().filter(|r| r.unit).all(|r| r.inside_unit_disc() == Some(false)));
    }

    #[test]
    fn single_precision_needs_a_looser_tolerance() {
        let p = IntPoly::from_i64(&[-3, -1, 1]);
        let roots = eigenvalues::<f32>(&p, 1e-4).unwrap();
        assert!((roots[0].value.re - 2.302_775_6).abs() < 1e-4);
    }
}
