//! Supertile patches: a lazily expanded decomposition tree plus an optional
//! materialized label grid.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use super::rule::{FusionRule, LevelTable};
use crate::{Error, Result};

/// Default cap on the number of unit tiles a patch may materialize.
pub const DEFAULT_TILE_BUDGET: u64 = 20_000_000;

/// Blocks up to this many tiles are rendered once and copied.
const BLOCK_CACHE_AREA: i64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Top,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Top, Side::Left, Side::Right];

    pub fn name(self) -> &'static str {
        match self {
            Side::Bottom => "bottom",
            Side::Top => "top",
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    fn transposed(self) -> Side {
        match self {
            Side::Bottom => Side::Left,
            Side::Left => Side::Bottom,
            Side::Top => Side::Right,
            Side::Right => Side::Top,
        }
    }
}

/// One supertile of the decomposition tree, in patch coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Node {
    pub label: usize,
    pub level: u32,
    pub x: i64,
    pub y: i64,
    pub width: i64,
    pub height: i64,
}

impl Node {
    pub fn right(&self) -> i64 {
        self.x + self.width
    }

    pub fn top(&self) -> i64 {
        self.y + self.height
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x && x < self.right() && y >= self.y && y < self.top()
    }

    pub fn intersects(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> bool {
        self.x < x1 && x0 < self.right() && self.y < y1 && y0 < self.top()
    }

    fn transpose(self) -> Node {
        Node { x: self.y, y: self.x, width: self.height, height: self.width, ..self }
    }
}

/// Orientation of a patch relative to the rule's own frame: an optional
/// transpose followed by a label permutation (base label -> shown label).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    pub transpose: bool,
    pub perm: Vec<usize>,
}

impl Transform {
    pub fn identity(labels: usize) -> Self {
        Self { transpose: false, perm: (0..labels).collect() }
    }

    pub fn is_identity(&self) -> bool {
        !self.transpose && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }
}

/// A finite supertile `P_n(t)` with its full decomposition tree.
///
/// The tree is expanded on demand; the unit-tile grid is materialized at most
/// once and only within the tile budget.
#[derive(Clone, Debug)]
pub struct Patch {
    rule: Arc<FusionRule>,
    table: Arc<LevelTable>,
    base_label: usize,
    level: u32,
    transform: Transform,
    inverse: Vec<usize>,
    budget: u64,
    grid: OnceLock<Vec<u8>>,
}

/// Builds `P_n(label)`, refusing patches larger than [`DEFAULT_TILE_BUDGET`].
pub fn build_supertile(rule: &FusionRule, label: &str, n: u32) -> Result<Patch> {
    Patch::build(Arc::new(rule.clone()), rule.label(label)?, n, DEFAULT_TILE_BUDGET)
}

impl Patch {
    /// Builds `P_n(label)` and checks its area against `budget`.
    pub fn build(rule: Arc<FusionRule>, label: usize, n: u32, budget: u64) -> Result<Patch> {
        let patch = Self::lazy(rule, label, n, budget)?;
        let tiles = patch.tile_count();
        if tiles > budget as u128 {
            return Err(Error::TileBudget {
                label: patch.rule.label_name(label).to_string(),
                level: n,
                tiles,
                budget,
            });
        }
        Ok(patch)
    }

    /// Tree-only patch: no area check until the grid is requested.
    pub fn lazy(rule: Arc<FusionRule>, label: usize, n: u32, budget: u64) -> Result<Patch> {
        if label >= rule.labels.len() {
            return Err(Error::UnknownLabel(format!("#{label}")));
        }
        if rule.labels.len() > u8::MAX as usize {
            return Err(Error::Invalid("at most 255 tile labels are supported".into()));
        }
        let table = Arc::new(rule.level_table(n)?);
        let transform = Transform::identity(rule.labels.len());
        let inverse = transform.perm.clone();
        Ok(Patch { rule, table, base_label: label, level: n, transform, inverse, budget, grid: OnceLock::new() })
    }

    pub fn rule(&self) -> &FusionRule {
        &self.rule
    }

    pub fn rule_arc(&self) -> &Arc<FusionRule> {
        &self.rule
    }

    pub fn levels(&self) -> &LevelTable {
        &self.table
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Label of the root supertile as displayed.
    pub fn label(&self) -> usize {
        self.transform.perm[self.base_label]
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn root(&self) -> Node {
        let (w, h) = self.table.dims(self.base_label, self.level);
        self.to_frame(Node { label: self.base_label, level: self.level, x: 0, y: 0, width: w, height: h })
    }

    pub fn width(&self) -> i64 {
        self.root().width
    }

    pub fn height(&self) -> i64 {
        self.root().height
    }

    pub fn tile_count(&self) -> u128 {
        self.table.area(self.base_label, self.level)
    }

    fn to_frame(&self, node: Node) -> Node {
        let node = if self.transform.transpose { node.transpose() } else { node };
        Node { label: self.transform.perm[node.label], ..node }
    }

    fn to_base(&self, node: Node) -> Node {
        let node = Node { label: self.inverse[node.label], ..node };
        if self.transform.transpose {
            node.transpose()
        } else {
            node
        }
    }

    fn base_rect(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> (i64, i64, i64, i64) {
        if self.transform.transpose {
            (y0, x0, y1, x1)
        } else {
            (x0, y0, x1, y1)
        }
    }

    fn base_children(&self, node: &Node) -> impl Iterator<Item = Node> + '_ {
        let level = node.level;
        let (nx, ny) = (node.x, node.y);
        let kids: &[_] = if level == 0 { &[] } else { &self.rule.children[node.label] };
        kids.iter().map(move |p| {
            let (w, h) = self.table.dims(p.label, level - 1);
            Node {
                label: p.label,
                level: level - 1,
                x: nx + self.table.eval(&p.x, level - 1),
                y: ny + self.table.eval(&p.y, level - 1),
                width: w,
                height: h,
            }
        })
    }

    fn base_root(&self) -> Node {
        self.to_base(self.root())
    }

    /// Children of a node of this patch, in rule order.
    pub fn children(&self, node: &Node) -> Vec<Node> {
        let base = self.to_base(*node);
        self.base_children(&base).map(|c| self.to_frame(c)).collect()
    }

    fn check_level(&self, m: u32) -> Result<()> {
        if m > self.level {
            return Err(Error::Level { level: m, reason: format!("patch has depth {}", self.level) });
        }
        Ok(())
    }

    /// All level-`m` supertiles, in depth-first tree order.
    pub fn nodes_at_level(&self, m: u32) -> Result<Vec<Node>> {
        self.nodes_in(m, i64::MIN, i64::MIN, i64::MAX, i64::MAX)
    }

    /// Level-`m` supertiles meeting the half-open box `[x0,x1) × [y0,y1)`.
    pub fn nodes_in(&self, m: u32, x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Vec<Node>> {
        self.check_level(m)?;
        let (bx0, by0, bx1, by1) = self.base_rect(x0, y0, x1, y1);
        let mut out = Vec::new();
        let mut stack = vec![self.base_root()];
        while let Some(node) = stack.pop() {
            if !node.intersects(bx0, by0, bx1, by1) {
                continue;
            }
            if node.level == m {
                out.push(self.to_frame(node));
            } else {
                let mark = stack.len();
                stack.extend(self.base_children(&node));
                stack[mark..].reverse();
            }
        }
        Ok(out)
    }

    /// Level-`m` supertile containing the unit square at `(x, y)`.
    pub fn node_at(&self, x: i64, y: i64, m: u32) -> Option<Node> {
        if m > self.level {
            return None;
        }
        let (bx, by, _, _) = self.base_rect(x, y, x, y);
        let mut node = self.base_root();
        if !node.contains(bx, by) {
            return None;
        }
        while node.level > m {
            node = self.base_children(&node).find(|c| c.contains(bx, by))?;
        }
        Some(self.to_frame(node))
    }

    /// Chain of supertiles containing `(x, y)`, from the root down to level 0.
    pub fn ancestry(&self, x: i64, y: i64) -> Vec<Node> {
        let (bx, by, _, _) = self.base_rect(x, y, x, y);
        let mut node = self.base_root();
        if !node.contains(bx, by) {
            return Vec::new();
        }
        let mut chain = vec![self.to_frame(node)];
        while node.level > 0 {
            match self.base_children(&node).find(|c| c.contains(bx, by)) {
                Some(c) => node = c,
                None => break,
            }
            chain.push(self.to_frame(node));
        }
        chain
    }

    pub fn label_at(&self, x: i64, y: i64) -> Option<usize> {
        if let Some(grid) = self.grid.get() {
            let (w, h) = (self.width(), self.height());
            return (x >= 0 && y >= 0 && x < w && y < h).then(|| grid[(y * w + x) as usize] as usize);
        }
        self.node_at(x, y, 0).map(|n| n.label)
    }

    /// Level-`m` supertiles touching `side`, ordered along it, as
    /// `(label, start coordinate)` pairs.
    pub fn boundary_word(&self, side: Side, m: u32) -> Result<Vec<(usize, i64)>> {
        self.check_level(m)?;
        let base_side = if self.transform.transpose { side.transposed() } else { side };
        let root = self.base_root();
        let touches = |n: &Node| match base_side {
            Side::Bottom => n.y == root.y,
            Side::Top => n.top() == root.top(),
            Side::Left => n.x == root.x,
            Side::Right => n.right() == root.right(),
        };
        let along = |n: &Node| match base_side {
            Side::Bottom | Side::Top => (n.x, n.width),
            Side::Left | Side::Right => (n.y, n.height),
        };
        let mut found = Vec::new();
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if node.level == m {
                found.push(node);
            } else {
                stack.extend(self.base_children(&node).filter(|c| touches(c)));
            }
        }
        found.sort_by_key(|n| along(n).0);
        let (start, length) = along(&root);
        let mut cursor = start;
        for n in &found {
            let (s, len) = along(n);
            if s != cursor {
                return Err(Error::Invalid(format!(
                    "{} side not covered by level-{m} supertiles at {cursor}",
                    side.name()
                )));
            }
            cursor = s + len;
        }
        if cursor != start + length {
            return Err(Error::Invalid(format!("{} side not covered to its end", side.name())));
        }
        Ok(found.into_iter().map(|n| (self.transform.perm[n.label], along(&n).0)).collect())
    }

    /// Number of level-`m` supertiles of each label.
    pub fn label_counts(&self, m: u32) -> Result<Vec<u128>> {
        self.check_level(m)?;
        let k = self.rule.labels.len();
        // counts[l] = level-m supertiles inside a level-`lev` supertile of label l
        let mut counts: Vec<Vec<u128>> =
            (0..k).map(|l| (0..k).map(|j| u128::from(l == j)).collect()).collect();
        for _ in m..self.level {
            counts = (0..k)
                .map(|l| {
                    let mut row = vec![0u128; k];
                    for p in &self.rule.children[l] {
                        for (r, c) in row.iter_mut().zip(&counts[p.label]) {
                            *r += c;
                        }
                    }
                    row
                })
                .collect();
        }
        let base = &counts[self.base_label];
        let mut shown = vec![0u128; k];
        for (l, c) in base.iter().enumerate() {
            shown[self.transform.perm[l]] += c;
        }
        Ok(shown)
    }

    /// Row-major label grid (`y = 0` is the bottom row), materialized once.
    pub fn grid(&self) -> Result<&[u8]> {
        if let Some(g) = self.grid.get() {
            return Ok(g);
        }
        let tiles = self.tile_count();
        if tiles > self.budget as u128 {
            return Err(Error::TileBudget {
                label: self.rule.label_name(self.base_label).to_string(),
                level: self.level,
                tiles,
                budget: self.budget,
            });
        }
        let grid = self.render_grid();
        Ok(self.grid.get_or_init(|| grid))
    }

    fn render_grid(&self) -> Vec<u8> {
        let root = self.base_root();
        let (bw, bh) = (root.width as usize, root.height as usize);
        let mut base = vec![0u8; bw * bh];
        let mut cache: HashMap<(usize, u32), Vec<u8>> = HashMap::new();
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if node.width * node.height <= BLOCK_CACHE_AREA {
                let block = cache
                    .entry((node.label, node.level))
                    .or_insert_with(|| self.render_block(&node));
                let w = node.width as usize;
                for (r, row) in block.chunks_exact(w).enumerate() {
                    let at = (node.y as usize + r) * bw + node.x as usize;
                    base[at..at + w].copy_from_slice(row);
                }
            } else {
                stack.extend(self.base_children(&node));
            }
        }
        let perm = &self.transform.perm;
        if self.transform.transpose {
            let mut out = vec![0u8; bw * bh];
            // shown grid has width bh and height bw
            for y in 0..bw {
                for x in 0..bh {
                    out[y * bh + x] = perm[base[x * bw + y] as usize] as u8;
                }
            }
            out
        } else {
            if !self.transform.is_identity() {
                for v in &mut base {
                    *v = perm[*v as usize] as u8;
                }
            }
            base
        }
    }

    /// Base-frame labels of a small node, relative to its own corner.
    fn render_block(&self, node: &Node) -> Vec<u8> {
        let (w, h) = (node.width as usize, node.height as usize);
        let mut block = vec![0u8; w * h];
        let mut stack = vec![*node];
        while let Some(n) = stack.pop() {
            if n.level == 0 {
                let (x, y) = ((n.x - node.x) as usize, (n.y - node.y) as usize);
                block[y * w + x] = n.label as u8;
            } else {
                stack.extend(self.base_children(&n));
            }
        }
        block
    }

    /// Unit tiles as `(label, x, y)`, row by row from the bottom.
    pub fn tiles(&self) -> Result<impl Iterator<Item = (usize, i64, i64)> + '_> {
        let w = self.width();
        Ok(self.grid()?.iter().enumerate().map(move |(i, &l)| (l as usize, i as i64 % w, i as i64 / w)))
    }

    /// The patch transposed and relabelled by the rule's involution.
    pub fn apply_involution(&self) -> Result<Patch> {
        let inv = self.rule.involution.as_ref().ok_or(Error::NoInvolution)?;
        let transform = Transform {
            transpose: self.transform.transpose ^ inv.swap_axes,
            perm: self.transform.perm.iter().map(|&p| inv.perm[p]).collect(),
        };
        let inverse = transform.inverse_perm();
        Ok(Patch {
            rule: Arc::clone(&self.rule),
            table: Arc::clone(&self.table),
            base_label: self.base_label,
            level: self.level,
            transform,
            inverse,
            budget: self.budget,
            grid: OnceLock::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn dpv() -> FusionRule {
        bundled::frank_dpv()
    }

    fn word(patch: &Patch, side: Side, m: u32) -> String {
        patch
            .boundary_word(side, m)
            .unwrap()
            .iter()
            .map(|&(l, _)| patch.rule().label_name(l))
            .collect()
    }

    #[test]
    fn small_supertiles() {
        let rule = dpv();
        let p = build_supertile(&rule, "a", 2).unwrap();
        assert_eq!((p.width(), p.height()), (7, 7));
        assert_eq!(p.grid().unwrap().len(), 49);
        let d1 = build_supertile(&rule, "d", 1).unwrap();
        assert_eq!(d1.grid().unwrap(), &[0u8]);
        for label in ["a", "b", "c", "d"] {
            let p0 = build_supertile(&rule, label, 0).unwrap();
            assert_eq!(p0.tile_count(), 1);
            assert_eq!(p0.label_at(0, 0), rule.label_index(label));
        }
    }

    #[test]
    fn boundary_words_of_a() {
        let rule = dpv();
        for n in 0..4 {
            let p = build_supertile(&rule, "a", n + 1).unwrap();
            assert_eq!(word(&p, Side::Bottom, n), "ddbc");
            assert_eq!(word(&p, Side::Top, n), "bddd");
            let c = build_supertile(&rule, "c", n + 1).unwrap();
            assert_eq!(word(&c, Side::Bottom, n), "a");
        }
    }

    #[test]
    fn grid_agrees_with_tree_queries() {
        let rule = dpv();
        let p = build_supertile(&rule, "a", 3).unwrap();
        let lazy = build_supertile(&rule, "a", 3).unwrap();
        for (l, x, y) in p.tiles().unwrap() {
            assert_eq!(lazy.node_at(x, y, 0).unwrap().label, l);
        }
    }

    #[test]
    fn involution_relabels_and_transposes() {
        let rule = dpv();
        for n in 0..5 {
            let b = build_supertile(&rule, "b", n).unwrap();
            let c = build_supertile(&rule, "c", n).unwrap();
            let ib = b.apply_involution().unwrap();
            assert_eq!(ib.grid().unwrap(), c.grid().unwrap());
            let a = build_supertile(&rule, "a", n).unwrap();
            let twice = a.apply_involution().unwrap().apply_involution().unwrap();
            assert!(twice.transform().is_identity());
            assert_eq!(twice.grid().unwrap(), a.grid().unwrap());
        }
    }

    #[test]
    fn transposed_queries_match_grid() {
        let rule = dpv();
        let b = build_supertile(&rule, "b", 3).unwrap().apply_involution().unwrap();
        let grid = b.grid().unwrap().to_vec();
        let w = b.width();
        for m in 0..3 {
            for node in b.nodes_at_level(m).unwrap() {
                for y in node.y..node.top() {
                    for x in node.x..node.right() {
                        assert_eq!(b.node_at(x, y, m).unwrap(), node);
                    }
                }
            }
        }
        for (i, &l) in grid.iter().enumerate() {
            let (x, y) = (i as i64 % w, i as i64 / w);
            assert_eq!(b.node_at(x, y, 0).unwrap().label, l as usize);
        }
    }

    #[test]
    fn label_counts_sum_to_node_count() {
        let rule = dpv();
        let p = build_supertile(&rule, "a", 4).unwrap();
        for m in 0..=4 {
            let counts = p.label_counts(m).unwrap();
            assert_eq!(counts.iter().sum::<u128>() as usize, p.nodes_at_level(m).unwrap().len());
        }
        assert_eq!(p.label_counts(4).unwrap(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn budget_is_enforced() {
        let rule = Arc::new(dpv());
        let err = Patch::build(rule.clone(), 0, 3, 48).unwrap_err();
        assert!(matches!(err, Error::TileBudget { tiles: 361, .. }));
        let lazy = Patch::lazy(rule, 0, 3, 48).unwrap();
        assert_eq!(lazy.boundary_word(Side::Bottom, 2).unwrap().len(), 4);
        assert!(lazy.grid().is_err());
    }
}
