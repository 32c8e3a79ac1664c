use crate::fusion::FusionRule;
use crate::subst::{Letter, Substitution};
use crate::{Error, Result};

use super::fault::FaultLine;

/// `D(x)` = wide starts above in `[0, x)` minus wide starts below in `[0, x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyProfile {
    pub span: i64,
    /// `(x, D(x))` at every boundary abscissa, if kept.
    pub samples: Vec<(i64, i64)>,
    pub max_abs: u64,
    /// First abscissa where `|D|` is maximal.
    pub argmax: i64,
}

/// Widths of every label at `level`.
pub fn letter_widths(rule: &FusionRule, level: u32) -> Result<Vec<i64>> {
    let table = rule.level_table(level)?;
    Ok((0..rule.labels.len()).map(|l| table.dims(l, level).0).collect())
}

/// Walks both words boundary by boundary. Inputs are `(wide, width)` runs.
fn profile(
    north: impl Iterator<Item = (bool, i64)>,
    south: impl Iterator<Item = (bool, i64)>,
    keep_samples: bool,
) -> Result<DiscrepancyProfile> {
    let mut north = north.peekable();
    let mut south = south.peekable();
    let (mut xn, mut xs) = (0i64, 0i64);
    let mut d = 0i64;
    let mut out = DiscrepancyProfile { span: 0, samples: Vec::new(), max_abs: 0, argmax: 0 };
    let record = |x: i64, d: i64, out: &mut DiscrepancyProfile| {
        if keep_samples {
            out.samples.push((x, d));
        }
        if d.unsigned_abs() > out.max_abs {
            out.max_abs = d.unsigned_abs();
            out.argmax = x;
        }
    };
    loop {
        let next_n = north.peek().map(|_| xn);
        let next_s = south.peek().map(|_| xs);
        let x = match (next_n, next_s) {
            (None, None) => break,
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        record(x, d, &mut out);
        if next_n == Some(x) {
            let (wide, w) = north.next().expect("peeked");
            d += i64::from(wide);
            xn += w;
        }
        if next_s == Some(x) {
            let (wide, w) = south.next().expect("peeked");
            d -= i64::from(wide);
            xs += w;
        }
    }
    if xn != xs {
        return Err(Error::SpanMismatch { north: xn, south: xs });
    }
    out.span = xn;
    record(xn, d, &mut out);
    Ok(out)
}

/// Profile along a fault line, counting wide supertiles of its level.
pub fn discrepancy(rule: &FusionRule, fault: &FaultLine, keep_samples: bool) -> Result<DiscrepancyProfile> {
    let wide = rule.wide_labels(fault.level);
    let runs = |word: &[(usize, i64)]| -> Vec<(bool, i64)> {
        word.iter()
            .enumerate()
            .map(|(i, &(l, x))| {
                let end = word.get(i + 1).map_or(fault.x1, |n| n.1);
                (wide[l], end - x)
            })
            .collect()
    };
    let mut p = profile(runs(&fault.north).into_iter(), runs(&fault.south).into_iter(), keep_samples)?;
    if p.span != fault.extent() {
        return Err(Error::SpanMismatch { north: p.span, south: fault.extent() });
    }
    p.argmax += fault.x0;
    for s in &mut p.samples {
        s.0 += fault.x0;
    }
    Ok(p)
}

/// Profile of the pair `(north^k(x), south^k(y))` laid out from 0 with the
/// given letter widths.
pub fn synthetic_discrepancy(
    north: &Substitution,
    south: &Substitution,
    widths: &[i64],
    wide: &[bool],
    (x, y): (Letter, Letter),
    k: u32,
    keep_samples: bool,
) -> Result<DiscrepancyProfile> {
    let wn = north.iterate(&[x], k)?;
    let ws = south.iterate(&[y], k)?;
    let run = |l: &Letter| (wide[*l as usize], widths[*l as usize]);
    profile(wn.iter().map(run), ws.iter().map(run), keep_samples)
}

/// `max_x max|D|` over the synthetic pairs `(north^k(x), south^k(x))`.
pub fn synthetic_max(
    north: &Substitution,
    south: &Substitution,
    widths: &[i64],
    wide: &[bool],
    k: u32,
) -> Result<u64> {
    let mut best = 0;
    for x in 0..north.len() as Letter {
        best = best.max(synthetic_discrepancy(north, south, widths, wide, (x, x), k, false)?.max_abs);
    }
    Ok(best)
}

/// Least-squares slope of `ln(value)` against `k`.
pub fn log_slope(points: &[(u32, u64)]) -> f64 {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|p| p.1 > 0).map(|&(k, v)| (k as f64, (v as f64).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
