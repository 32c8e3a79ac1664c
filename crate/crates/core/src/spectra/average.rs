//! Spatial averages of cochains and integrality of their integrals between
//! repeated patches.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::fusion::Patch;
use crate::{Error, Result, Scalar};

use super::cochain::{CochainSpec, Edge};
use super::occurrences::window_classes;

/// Edge-density average over the safe interior.
#[derive(Clone, Debug, PartialEq)]
pub struct RsAverage<S> {
    pub x: S,
    pub y: S,
    pub horizontal_edges: u64,
    pub vertical_edges: u64,
    /// Boundary-effect bound `max|value| · 2(r+1)(w+h)/(w·h)`.
    pub error_bound: f64,
}

/// Averages the cochain over horizontal and vertical edges separately.
pub fn rs_average<S: Scalar>(cochain: &CochainSpec<S>, patch: &Patch) -> Result<RsAverage<S>> {
    let (x0, x1, y0, y1) = cochain.safe_region(patch);
    if x1 - x0 < 1 || y1 - y0 < 1 {
        return Err(Error::Invalid(format!(
            "patch {}x{} has no safe interior at radius {}",
            patch.width(),
            patch.height(),
            cochain.radius
        )));
    }
    let horizontal_edges = ((x1 - x0) * (y1 - y0 + 1)) as u64;
    let vertical_edges = ((x1 - x0 + 1) * (y1 - y0)) as u64;
    let (w, h) = (patch.width() as f64, patch.height() as f64);
    let margin = 2.0 * (cochain.radius as f64 + 1.0) * (w + h) / (w * h);
    if let Some((mu, nu)) = cochain.as_linear() {
        let bound = mu.approx().abs().max(nu.approx().abs()) * margin;
        return Ok(RsAverage { x: mu, y: nu, horizontal_edges, vertical_edges, error_bound: bound });
    }
    if matches!(cochain.kind, super::CochainKind::Table(_)) {
        // materialize for fast neighbourhood reads; the tree is the fallback
        let _ = patch.grid();
    }
    let mut sx = S::zero();
    let mut sy = S::zero();
    let mut peak = 0.0f64;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if x < x1 {
                let v = cochain.value(patch, Edge::horizontal(x, y))?;
                peak = peak.max(v.approx().abs());
                if !v.is_zero() {
                    sx = sx + v;
                }
            }
            if y < y1 {
                let v = cochain.value(patch, Edge::vertical(x, y))?;
                peak = peak.max(v.approx().abs());
                if !v.is_zero() {
                    sy = sy + v;
                }
            }
        }
    }
    let count = |n: u64| S::from_u64(n).expect("edge count fits the scalar");
    Ok(RsAverage {
        x: sx / count(horizontal_edges),
        y: sy / count(vertical_edges),
        horizontal_edges,
        vertical_edges,
        error_bound: peak * margin,
    })
}

/// A pair of occurrences of one template whose connecting integral is not an
/// integer.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralityViolation<S> {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub vector: (i64, i64),
    pub value: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralityReport<S> {
    pub rho: u32,
    /// Distinct templates with a corner in the safe interior.
    pub templates: usize,
    pub occurrences: usize,
    pub pairs_checked: u64,
    pub violation_count: u64,
    /// The first violations found, up to the report limit.
    pub violations: Vec<IntegralityViolation<S>>,
}

impl<S> IntegralityReport<S> {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

const REPORTED_VIOLATIONS: usize = 16;

/// Checks that the integral between any two occurrences of a radius-`rho`
/// template is an integer.
///
/// Each occurrence is compared with the first occurrence of its template. For
/// a closed cochain this is equivalent to checking all pairs, since the
/// integral from `p` to `q` is the difference of the integrals from the first
/// occurrence to each. Occurrences are located by their lower-left corner.
/// Non-linear cochains are integrated along the path that runs down to the
/// bottom of the safe interior, across, and back up.
pub fn integrality_check<S: Scalar>(cochain: &CochainSpec<S>, host: &Patch, rho: u32) -> Result<IntegralityReport<S>> {
    let size = 2 * rho as usize + 1;
    let classes = window_classes(host, size)?;
    let (x0, x1, y0, y1) = cochain.safe_region(host);
    let inside = |&(x, y): &(i64, i64)| x >= x0 && x <= x1 && y >= y0 && y <= y1;
    let potential = match cochain.as_linear() {
        Some(_) => None,
        None => Some(Potential::new(cochain, host)?),
    };
    let linear = cochain.as_linear();
    let integral = |p: (i64, i64), q: (i64, i64)| -> S {
        match (&linear, &potential) {
            (Some((mu, nu)), _) => {
                let dx = S::from_i64(q.0 - p.0).expect("integer scalar");
                let dy = S::from_i64(q.1 - p.1).expect("integer scalar");
                mu.clone() * dx + nu.clone() * dy
            }
            (None, Some(f)) => f.at(q) - f.at(p),
            (None, None) => unreachable!(),
        }
    };
    let mut report = IntegralityReport {
        rho,
        templates: 0,
        occurrences: 0,
        pairs_checked: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    for class in &classes {
        let members: Vec<(i64, i64)> = class.iter().copied().filter(inside).collect();
        let Some(&first) = members.first() else { continue };
        report.templates += 1;
        report.occurrences += members.len();
        for &q in &members[1..] {
            report.pairs_checked += 1;
            let value = integral(first, q);
            if !value.is_integral() {
                report.violation_count += 1;
                if report.violations.len() < REPORTED_VIOLATIONS {
                    let vector = (q.0 - first.0, q.1 - first.1);
                    report.violations.push(IntegralityViolation { from: first, to: q, vector, value });
                }
            }
        }
    }
    report.violations.sort_by_key(|v| (v.vector.0.abs() + v.vector.1.abs(), v.from, v.to));
    Ok(report)
}

/// Integral from the lower-left corner of the safe interior to every lattice
/// point of it: along the bottom row, then up.
struct Potential<S> {
    x0: i64,
    y0: i64,
    cols: usize,
    values: Vec<S>,
}

impl<S: Scalar> Potential<S> {
    fn new(cochain: &CochainSpec<S>, patch: &Patch) -> Result<Self> {
        let (x0, x1, y0, y1) = cochain.safe_region(patch);
        let cols = (x1 - x0 + 1) as usize;
        let rows = (y1 - y0 + 1) as usize;
        let mut values = Vec::with_capacity(cols * rows);
        let mut acc = S::zero();
        for x in x0..=x1 {
            if x > x0 {
                acc = acc + cochain.value(patch, Edge::horizontal(x - 1, y0))?;
            }
            values.push(acc.clone());
        }
        for y in y0 + 1..=y1 {
            for x in x0..=x1 {
                let below = values[values.len() - cols].clone();
                values.push(below + cochain.value(patch, Edge::vertical(x, y - 1))?);
            }
        }
        Ok(Self { x0, y0, cols, values })
    }

    fn at(&self, (x, y): (i64, i64)) -> S {
        self.values[(y - self.y0) as usize * self.cols + (x - self.x0) as usize].clone()
    }
}

/// `g` with `{μ ∈ ℚ : μ·w ∈ ℤ for all w} = (1/g)·ℤ`, i.e. the gcd of the widths.
pub fn integer_multiplier_lattice(widths: &[BigInt]) -> Result<BigInt> {
    if widths.is_empty() || widths.iter().any(|w| !w.is_positive()) {
        return Err(Error::Invalid("widths must be nonempty and positive".into()));
    }
    Ok(widths.iter().fold(BigInt::zero(), |g, w| g.gcd(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::fusion::build_supertile;
    use crate::Rational;

    #[test]
    fn linear_average_is_exact() {
        let p = build_supertile(&bundled::frank_dpv(), "a", 3).unwrap();
        let avg = rs_average(&CochainSpec::linear(Rational::ratio(3, 2), Rational::ratio(-1, 1)), &p).unwrap();
        assert_eq!((avg.x, avg.y), (Rational::ratio(3, 2), Rational::ratio(-1, 1)));
    }

    #[test]
    fn counter_average_on_example2() {
        let p = build_supertile(&bundled::example2(), "a", 6).unwrap();
        let avg = rs_average(&CochainSpec::<Rational>::bottom_row_counter(2), &p).unwrap();
        assert!(avg.x.is_zero());
        let err = (avg.y.approx() - 0.25).abs();
        assert!(err <= 4.0 / p.height() as f64, "{} vs 1/4", avg.y);
    }

    #[test]
    fn multiplier_lattice() {
        let g = |v: &[i64]| integer_multiplier_lattice(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()).unwrap();
        assert_eq!(g(&[7, 4]), BigInt::from(1));
        assert_eq!(g(&[4, 6]), BigInt::from(2));
        assert!(integer_multiplier_lattice(&[]).is_err());
    }

    #[test]
    fn integrality_of_dx_multiples() {
        let p = build_supertile(&bundled::frank_dpv(), "a", 4).unwrap();
        let ok = integrality_check(&CochainSpec::<Rational>::constant_dx(), &p, 1).unwrap();
        assert!(ok.passed() && ok.pairs_checked > 0);
        let half = integrality_check(&CochainSpec::linear(Rational::ratio(1, 2), Rational::zero()), &p, 1).unwrap();
        assert!(!half.passed());
        assert!(half.violations.iter().all(|v| v.vector.0 % 2 != 0));
    }

    #[test]
    fn potential_agrees_with_linear_shortcut() {
        let p = build_supertile(&bundled::example2(), "a", 5).unwrap();
        let counter = integrality_check(&CochainSpec::<Rational>::bottom_row_counter(1), &p, 1).unwrap();
        assert!(counter.passed());
    }
}
