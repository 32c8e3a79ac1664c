use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TileLabel(pub String);

impl fmt::Display for TileLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `constant + Σ coeffs[i] · symbol_i`, dense over the rule's length symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearExpr {
    pub constant: i64,
    pub coeffs: Vec<i64>,
}

impl LinearExpr {
    pub fn zero(symbols: usize) -> Self {
        Self { constant: 0, coeffs: vec![0; symbols] }
    }

    pub fn eval(&self, values: &[i64]) -> Option<i64> {
        self.coeffs
            .iter()
            .zip(values)
            .try_fold(self.constant, |acc, (&c, &v)| acc.checked_add(c.checked_mul(v)?))
    }

    pub fn eval_big(&self, values: &[BigInt]) -> BigInt {
        self.coeffs
            .iter()
            .zip(values)
            .fold(BigInt::from(self.constant), |acc, (&c, v)| acc + v * c)
    }

    pub fn display<'a>(&'a self, names: &'a [LengthSymbol]) -> impl fmt::Display + 'a {
        ExprDisplay { expr: self, names }
    }
}

struct ExprDisplay<'a> {
    expr: &'a LinearExpr,
    names: &'a [LengthSymbol],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, c: i64, name: &str| -> fmt::Result {
            let mag = c.unsigned_abs();
            match (first, c < 0) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            match (mag, name.is_empty()) {
                (_, true) => write!(f, "{mag}"),
                (1, false) => f.write_str(name),
                (_, false) => write!(f, "{mag}{name}"),
            }
        };
        for (c, sym) in self.expr.coeffs.iter().zip(self.names) {
            if *c != 0 {
                term(f, *c, &sym.name)?;
            }
        }
        if self.expr.constant != 0 || self.expr.coeffs.iter().all(|c| *c == 0) {
            term(f, self.expr.constant, "")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthSymbol {
    pub name: String,
    pub init: u64,
    /// Value at level n+1 in terms of the values at level n.
    pub recurrence: LinearExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub label: usize,
    pub x: LinearExpr,
    pub y: LinearExpr,
}

/// Label permutation, optionally combined with the transpose `(x, y) ↦ (y, x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub swap_axes: bool,
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionRule {
    pub labels: Vec<TileLabel>,
    pub lengths: Vec<LengthSymbol>,
    /// Per label: (width symbol, height symbol).
    pub sizes: Vec<(usize, usize)>,
    pub children: Vec<Vec<Placement>>,
    pub involution: Option<Involution>,
}

/// Exact dimensions of every label at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeRow {
    pub level: u32,
    pub dims: Vec<(BigInt, BigInt)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeTable {
    pub rows: Vec<SizeRow>,
}

impl FusionRule {
    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.0 == name)
    }

    pub fn label(&self, name: &str) -> Result<usize> {
        self.label_index(name).ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn label_name(&self, index: usize) -> &str {
        &self.labels[index].0
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.lengths.iter().position(|s| s.name == name)
    }

    /// Exact length-symbol values at level `n`.
    pub fn symbol_values(&self, n: u32) -> Vec<BigInt> {
        let mut values: Vec<BigInt> = self.lengths.iter().map(|s| BigInt::from(s.init)).collect();
        for _ in 0..n {
            values = self.lengths.iter().map(|s| s.recurrence.eval_big(&values)).collect();
        }
        values
    }

    pub fn level_sizes(&self, n: u32) -> SizeRow {
        let values = self.symbol_values(n);
        SizeRow {
            level: n,
            dims: self
                .sizes
                .iter()
                .map(|&(w, h)| (values[w].clone(), values[h].clone()))
                .collect(),
        }
    }

    pub fn size_table(&self, depth: u32) -> SizeTable {
        SizeTable { rows: (0..=depth).map(|n| self.level_sizes(n)).collect() }
    }

    /// Row-major recurrence matrix: `values(n+1) = R · values(n)`.
    pub fn recurrence_matrix(&self) -> Vec<Vec<i64>> {
        self.lengths.iter().map(|s| s.recurrence.coeffs.clone()).collect()
    }

    /// Machine-sized symbol values for levels `0..=depth`.
    pub fn level_table(&self, depth: u32) -> Result<LevelTable> {
        let mut values = vec![self.lengths.iter().map(|s| s.init as i64).collect::<Vec<_>>()];
        for n in 0..depth {
            let prev = &values[n as usize];
            let next = self
                .lengths
                .iter()
                .map(|s| s.recurrence.eval(prev))
                .collect::<Option<Vec<_>>>()
                .filter(|v| v.iter().all(|x| x.checked_mul(*x).is_some()))
                .ok_or(Error::Overflow(n + 1))?;
            values.push(next);
        }
        Ok(LevelTable { sizes: self.sizes.clone(), values })
    }

    /// Letters whose width is maximal at `level` (level 0 is read at level 1,
    /// where the unit tiles stop being indistinguishable).
    pub fn wide_labels(&self, level: u32) -> Vec<bool> {
        let row = self.level_sizes(level.max(1));
        let max = row.dims.iter().map(|d| &d.0).max().cloned().unwrap_or_else(BigInt::zero);
        row.dims.iter().map(|d| d.0 == max).collect()
    }
}

impl SizeRow {
    pub fn width(&self, label: usize) -> &BigInt {
        &self.dims[label].0
    }

    pub fn height(&self, label: usize) -> &BigInt {
        &self.dims[label].1
    }
}

/// Length-symbol values per level as `i64`, checked against overflow of areas.
#[derive(Clone, Debug)]
pub struct LevelTable {
    sizes: Vec<(usize, usize)>,
    values: Vec<Vec<i64>>,
}

impl LevelTable {
    pub fn depth(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn values(&self, level: u32) -> &[i64] {
        &self.values[level as usize]
    }

    pub fn dims(&self, label: usize, level: u32) -> (i64, i64) {
        let v = &self.values[level as usize];
        let (w, h) = self.sizes[label];
        (v[w], v[h])
    }

    pub fn eval(&self, expr: &LinearExpr, level: u32) -> i64 {
        expr.eval(&self.values[level as usize]).expect("placement overflow")
    }

    pub fn area(&self, label: usize, level: u32) -> u128 {
        let (w, h) = self.dims(label, level);
        w as u128 * h as u128
    }
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |it: &mut dyn Iterator<Item = &str>| it.collect::<Vec<_>>().join(" ");
        writeln!(f, "tiles: {}", names(&mut self.labels.iter().map(|l| l.0.as_str())))?;
        writeln!(f, "lengths: {}", names(&mut self.lengths.iter().map(|s| s.name.as_str())))?;
        let inits: Vec<String> =
            self.lengths.iter().map(|s| format!("{}={}", s.name, s.init)).collect();
        writeln!(f, "init: {}", inits.join(" "))?;
        let recs: Vec<String> = self
            .lengths
            .iter()
            .map(|s| format!("{} -> {}", s.name, s.recurrence.display(&self.lengths)))
            .collect();
        writeln!(f, "recurrence: {}", recs.join(" ; "))?;
        for (label, &(w, h)) in self.labels.iter().zip(&self.sizes) {
            writeln!(f, "size {label}: {} {}", self.lengths[w].name, self.lengths[h].name)?;
        }
        for (label, kids) in self.labels.iter().zip(&self.children) {
            writeln!(f, "rule {label}:")?;
            for p in kids {
                writeln!(
                    f,
                    "  {} at ({}, {})",
                    self.labels[p.label],
                    p.x.display(&self.lengths),
                    p.y.display(&self.lengths)
                )?;
            }
        }
        if let Some(inv) = &self.involution {
            let pairs: Vec<String> = inv
                .perm
                .iter()
                .enumerate()
                .filter(|(i, j)| i != *j)
                .map(|(i, &j)| format!("{}={}", self.labels[i], self.labels[j]))
                .collect();
            let swap = if inv.swap_axes { " swap-axes" } else { "" };
            let sep = if pairs.is_empty() { "" } else { " " };
            writeln!(f, "involution:{swap}{sep}{}", pairs.join(" "))?;
        }
        Ok(())
    }
}
