//! Pattern-equivariant edge cochains on unit-square tilings.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::fusion::Patch;
use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// Unit lattice edge from `(x, y)` to `(x+1, y)` or `(x, y+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub x: i64,
    pub y: i64,
    pub dir: Direction,
}

impl Edge {
    pub fn horizontal(x: i64, y: i64) -> Self {
        Self { x, y, dir: Direction::Horizontal }
    }

    pub fn vertical(x: i64, y: i64) -> Self {
        Self { x, y, dir: Direction::Vertical }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CochainKind<S> {
    ConstantDx,
    ConstantDy,
    /// `μ·dx + ν·dy`.
    Linear { mu: S, nu: S },
    /// 1 on vertical edges in the bottom row of each level-`level` supertile.
    BottomRowCounter { level: u32 },
    /// Value looked up by the hash of the labels around the edge.
    Table(HashMap<u64, S>),
}

/// An edge cochain whose value on an edge depends on the labels within
/// `radius` of it.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainSpec<S> {
    pub radius: u32,
    pub kind: CochainKind<S>,
}

impl<S: Scalar> CochainSpec<S> {
    pub fn constant_dx() -> Self {
        Self { radius: 0, kind: CochainKind::ConstantDx }
    }

    pub fn constant_dy() -> Self {
        Self { radius: 0, kind: CochainKind::ConstantDy }
    }

    pub fn linear(mu: S, nu: S) -> Self {
        Self { radius: 0, kind: CochainKind::Linear { mu, nu } }
    }

    pub fn bottom_row_counter(level: u32) -> Self {
        Self { radius: 0, kind: CochainKind::BottomRowCounter { level } }
    }

    pub fn table(radius: u32, values: HashMap<u64, S>) -> Self {
        Self { radius, kind: CochainKind::Table(values) }
    }

    /// `(μ, ν)` for the constant forms.
    pub fn as_linear(&self) -> Option<(S, S)> {
        match &self.kind {
            CochainKind::ConstantDx => Some((S::one(), S::zero())),
            CochainKind::ConstantDy => Some((S::zero(), S::one())),
            CochainKind::Linear { mu, nu } => Some((mu.clone(), nu.clone())),
            _ => None,
        }
    }

    /// Lattice points whose incident edges all have their neighbourhood inside
    /// the patch: `[x_lo, x_hi] × [y_lo, y_hi]`.
    pub fn safe_region(&self, patch: &Patch) -> (i64, i64, i64, i64) {
        let (w, h) = (patch.width(), patch.height());
        match self.kind {
            CochainKind::Table(_) => {
                let m = self.radius as i64 + 1;
                (m, w - m, m, h - m)
            }
            _ => (0, w, 0, h),
        }
    }

    pub fn is_safe(&self, patch: &Patch, edge: Edge) -> bool {
        let (x0, x1, y0, y1) = self.safe_region(patch);
        let (ex, ey) = match edge.dir {
            Direction::Horizontal => (edge.x + 1, edge.y),
            Direction::Vertical => (edge.x, edge.y + 1),
        };
        edge.x >= x0 && ex <= x1 && edge.y >= y0 && ey <= y1
    }

    /// Value on an edge oriented in the positive direction.
    pub fn value(&self, patch: &Patch, edge: Edge) -> Result<S> {
        if !self.is_safe(patch, edge) {
            return Err(Error::OutsideInterior { x: edge.x, y: edge.y });
        }
        Ok(match (&self.kind, edge.dir) {
            (CochainKind::ConstantDx, Direction::Horizontal) => S::one(),
            (CochainKind::ConstantDy, Direction::Vertical) => S::one(),
            (CochainKind::ConstantDx | CochainKind::ConstantDy, _) => S::zero(),
            (CochainKind::Linear { mu, .. }, Direction::Horizontal) => mu.clone(),
            (CochainKind::Linear { nu, .. }, Direction::Vertical) => nu.clone(),
            (CochainKind::BottomRowCounter { .. }, Direction::Horizontal) => S::zero(),
            (CochainKind::BottomRowCounter { level }, Direction::Vertical) => {
                let cx = if edge.x < patch.width() { edge.x } else { edge.x - 1 };
                let node = patch
                    .node_at(cx, edge.y, *level)
                    .ok_or(Error::Level { level: *level, reason: "deeper than the patch".into() })?;
                if node.y == edge.y {
                    S::one()
                } else {
                    S::zero()
                }
            }
            (CochainKind::Table(values), _) => {
                let labels = edge_pattern(patch, edge, self.radius)
                    .ok_or(Error::OutsideInterior { x: edge.x, y: edge.y })?;
                let key = pattern_hash(edge.dir, &labels);
                values.get(&key).cloned().ok_or(Error::MissingPattern(key))?
            }
        })
    }

    /// Parses a table: one `hash -> value` line per pattern (hash in hex),
    /// `#` comments allowed.
    pub fn parse_table(radius: u32, text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Invalid(format!("cochain table line {}: expected `hash -> value`", no + 1));
            let (h, v) = line.split_once("->").ok_or_else(bad)?;
            let h = u64::from_str_radix(h.trim().trim_start_matches("0x"), 16).map_err(|_| bad())?;
            let v = S::parse_scalar(v).ok_or_else(bad)?;
            if values.insert(h, v).is_some() {
                return Err(Error::Invalid(format!("cochain table line {}: duplicate pattern", no + 1)));
            }
        }
        Ok(Self::table(radius, values))
    }

    /// Serializes a table cochain in the format read by [`Self::parse_table`].
    pub fn table_text(&self) -> Option<String> {
        let CochainKind::Table(values) = &self.kind else { return None };
        let mut entries: Vec<_> = values.iter().collect();
        entries.sort_by_key(|e| *e.0);
        let mut out = String::new();
        for (h, v) in entries {
            writeln!(out, "{h:016x} -> {v}").expect("write to string");
        }
        Some(out)
    }
}

/// Labels of the cells around an edge: for a horizontal edge the
/// `(2r+1) × (2r+2)` block of cells with columns `x−r ..= x+r` and rows
/// `y−r−1 ..= y+r`; for a vertical edge the transposed block.
pub fn edge_pattern(patch: &Patch, edge: Edge, r: u32) -> Option<Vec<u8>> {
    let r = r as i64;
    let (xs, ys) = match edge.dir {
        Direction::Horizontal => ((edge.x - r, edge.x + r), (edge.y - r - 1, edge.y + r)),
        Direction::Vertical => ((edge.x - r - 1, edge.x + r), (edge.y - r, edge.y + r)),
    };
    let mut out = Vec::with_capacity(((xs.1 - xs.0 + 1) * (ys.1 - ys.0 + 1)) as usize);
    for y in ys.0..=ys.1 {
        for x in xs.0..=xs.1 {
            out.push(patch.label_at(x, y)? as u8);
        }
    }
    Some(out)
}

/// FNV-1a hash of an edge direction and its neighbourhood labels.
pub fn pattern_hash(dir: Direction, labels: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let tag = match dir {
        Direction::Horizontal => b'h',
        Direction::Vertical => b'v',
    };
    std::iter::once(&tag).chain(labels).fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

/// Sum of the cochain along a lattice polyline whose segments are axis
/// parallel. Every edge must lie in the safe interior.
pub fn integrate<S: Scalar>(cochain: &CochainSpec<S>, patch: &Patch, path: &[(i64, i64)]) -> Result<S> {
    let (x0, x1, y0, y1) = cochain.safe_region(patch);
    let inside = |&(x, y): &(i64, i64)| x >= x0 && x <= x1 && y >= y0 && y <= y1;
    for (i, p) in path.iter().enumerate() {
        if !inside(p) {
            return Err(Error::OutsideInterior { x: p.0, y: p.1 });
        }
        if let Some(q) = path.get(i + 1) {
            if p.0 != q.0 && p.1 != q.1 {
                return Err(Error::Invalid(format!("segment {p:?} -> {q:?} is not axis parallel")));
            }
        }
    }
    let (Some(first), Some(last)) = (path.first(), path.last()) else { return Ok(S::zero()) };
    if let Some((mu, nu)) = cochain.as_linear() {
        let dx = S::from_i64(last.0 - first.0).expect("integer scalar");
        let dy = S::from_i64(last.1 - first.1).expect("integer scalar");
        return Ok(mu * dx + nu * dy);
    }
    let mut total = S::zero();
    for seg in path.windows(2) {
        let ((mut x, mut y), (tx, ty)) = (seg[0], seg[1]);
        while (x, y) != (tx, ty) {
            if x < tx {
                total = total + cochain.value(patch, Edge::horizontal(x, y))?;
                x += 1;
            } else if x > tx {
                total = total - cochain.value(patch, Edge::horizontal(x - 1, y))?;
                x -= 1;
            } else if y < ty {
                total = total + cochain.value(patch, Edge::vertical(x, y))?;
                y += 1;
            } else {
                total = total - cochain.value(patch, Edge::vertical(x, y - 1))?;
                y -= 1;
            }
        }
    }
    Ok(total)
}
