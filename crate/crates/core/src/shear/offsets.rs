use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::fusion::{FusionRule, Patch, Side, DEFAULT_TILE_BUDGET};
use crate::{Error, Result};

use super::fault::FaultLine;

/// Offsets `x_above − x_below` between wide level-`m` supertiles that face
/// each other across fault lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffsetSet {
    pub level: u32,
    /// Offset → number of facing pairs realizing it.
    pub offsets: BTreeMap<i64, u64>,
    pub wide_width: i64,
    pub narrow_width: i64,
    pub residues_wide: BTreeSet<i64>,
    pub residues_narrow: BTreeSet<i64>,
}

impl OffsetSet {
    pub fn new(rule: &FusionRule, level: u32) -> Result<Self> {
        let table = rule.level_table(level)?;
        let widths = (0..rule.labels.len()).map(|l| table.dims(l, level).0);
        let (lo, hi) = widths.fold((i64::MAX, i64::MIN), |(lo, hi), w| (lo.min(w), hi.max(w)));
        Ok(Self {
            level,
            offsets: BTreeMap::new(),
            wide_width: hi,
            narrow_width: lo,
            residues_wide: BTreeSet::new(),
            residues_narrow: BTreeSet::new(),
        })
    }

    pub fn insert(&mut self, offset: i64, count: u64) {
        *self.offsets.entry(offset).or_insert(0) += count;
        self.residues_wide.insert(offset.rem_euclid(self.wide_width));
        self.residues_narrow.insert(offset.rem_euclid(self.narrow_width));
    }

    pub fn distinct(&self) -> BTreeSet<i64> {
        self.offsets.keys().copied().collect()
    }

    pub fn merge(&mut self, other: &OffsetSet) {
        for (&o, &c) in &other.offsets {
            self.insert(o, c);
        }
    }
}

/// A letter of a boundary word: `(label, start, width)`.
type Run = (usize, i64, i64);

/// Offsets of wide letters whose intervals overlap with positive length.
fn facing_offsets(north: &[Run], south: &[Run], wide: &[bool], mut f: impl FnMut(i64, &Run, &Run)) {
    let mut j = 0;
    for n in north {
        while j < south.len() && south[j].1 + south[j].2 <= n.1 {
            j += 1;
        }
        let mut k = j;
        while k < south.len() && south[k].1 < n.1 + n.2 {
            let s = &south[k];
            if wide[n.0] && wide[s.0] {
                f(n.1 - s.1, n, s);
            }
            k += 1;
        }
    }
}

/// Boundary words of whole supertiles `P_level(label)` at level `m`.
struct WordCache {
    rule: Arc<FusionRule>,
    m: u32,
    words: HashMap<(usize, u32, Side), Vec<Run>>,
}

impl WordCache {
    fn new(rule: Arc<FusionRule>, m: u32) -> Self {
        Self { rule, m, words: HashMap::new() }
    }

    fn get(&mut self, label: usize, level: u32, side: Side) -> Result<&[Run]> {
        let key = (label, level, side);
        if !self.words.contains_key(&key) {
            let patch = Patch::lazy(Arc::clone(&self.rule), label, level, DEFAULT_TILE_BUDGET)?;
            let table = patch.levels().clone();
            let word = patch
                .boundary_word(side, self.m)?
                .into_iter()
                .map(|(l, x)| (l, x, table.dims(l, self.m).0))
                .collect();
            self.words.insert(key, word);
        }
        Ok(&self.words[&key])
    }
}

/// Offsets across one fault line, at level `m ≤ fault.level`.
pub fn offsets(rule: &FusionRule, fault: &FaultLine, m: u32) -> Result<OffsetSet> {
    if m > fault.level {
        return Err(Error::Level { level: m, reason: format!("fault line has level {}", fault.level) });
    }
    let mut cache = WordCache::new(Arc::new(rule.clone()), m);
    let mut refine = |word: &[(usize, i64)], side: Side| -> Result<Vec<Run>> {
        let mut out = Vec::new();
        for &(l, x) in word {
            out.extend(cache.get(l, fault.level, side)?.iter().map(|&(c, cx, w)| (c, x + cx, w)));
        }
        Ok(out)
    };
    let north = refine(&fault.north, Side::Bottom)?;
    let south = refine(&fault.south, Side::Top)?;
    let wide = rule.wide_labels(m);
    let mut set = OffsetSet::new(rule, m)?;
    facing_offsets(&north, &south, &wide, |o, _, _| set.insert(o, 1));
    Ok(set)
}

/// Where an offset is realized: inside a supertile `P_level(label)`, between
/// two of its children, with coordinates relative to that supertile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Junction {
    pub label: usize,
    pub level: u32,
    pub y: i64,
    pub x_above: i64,
    pub x_below: i64,
    pub above: usize,
    pub below: usize,
}

impl Junction {
    pub fn offset(&self) -> i64 {
        self.x_above - self.x_below
    }
}

/// Every offset realized at level `m` inside supertiles of level up to
/// `max_level`, indexed by the supertile whose children meet at the junction.
///
/// Two level-`m` supertiles facing each other across a horizontal line lie in
/// distinct children of their lowest common ancestor, one in the bottom row of
/// the upper child and one in the top row of the lower child. So the offsets
/// of `P_M(t)` are the union of the children-pair offsets of all supertiles
/// occurring in `P_M(t)`.
#[derive(Clone, Debug)]
pub struct OffsetIndex {
    rule: Arc<FusionRule>,
    m: u32,
    max_level: u32,
    /// `local[level][label]`: first junction for each offset.
    local: Vec<Vec<BTreeMap<i64, Junction>>>,
}

impl OffsetIndex {
    pub fn build(rule: Arc<FusionRule>, m: u32, max_level: u32) -> Result<Self> {
        let table = rule.level_table(max_level)?;
        let wide = rule.wide_labels(m);
        let labels = rule.labels.len();
        let mut cache = WordCache::new(Arc::clone(&rule), m);
        // children pairs per (level, label): (upper child, lower child)
        let mut jobs = Vec::new();
        for level in m + 1..=max_level {
            for label in 0..labels {
                let kids: Vec<(usize, i64, i64, i64, i64)> = rule.children[label]
                    .iter()
                    .map(|p| {
                        let (w, h) = table.dims(p.label, level - 1);
                        (p.label, table.eval(&p.x, level - 1), table.eval(&p.y, level - 1), w, h)
                    })
                    .collect();
                for up in &kids {
                    for low in &kids {
                        let touching = up.2 == low.2 + low.4
                            && up.1 < low.1 + low.3
                            && low.1 < up.1 + up.3;
                        if touching {
                            cache.get(up.0, level - 1, Side::Bottom)?;
                            cache.get(low.0, level - 1, Side::Top)?;
                            jobs.push((level, label, *up, *low));
                        }
                    }
                }
            }
        }
        let words = &cache.words;
        let found: Vec<(u32, usize, Junction)> = jobs
            .par_iter()
            .flat_map_iter(|&(level, label, up, low)| {
                let shift = |w: &[Run], dx: i64| -> Vec<Run> { w.iter().map(|&(l, x, wd)| (l, x + dx, wd)).collect() };
                let north = shift(&words[&(up.0, level - 1, Side::Bottom)], up.1);
                let south = shift(&words[&(low.0, level - 1, Side::Top)], low.1);
                let mut seen: BTreeMap<i64, Junction> = BTreeMap::new();
                facing_offsets(&north, &south, &wide, |o, n, s| {
                    seen.entry(o).or_insert(Junction {
                        label,
                        level,
                        y: up.2,
                        x_above: n.1,
                        x_below: s.1,
                        above: n.0,
                        below: s.0,
                    });
                });
                seen.into_values().map(move |j| (level, label, j))
            })
            .collect();
        let mut local = vec![vec![BTreeMap::new(); labels]; max_level as usize + 1];
        for (level, label, j) in found {
            local[level as usize][label].entry(j.offset()).or_insert(j);
        }
        Ok(Self { rule, m, max_level, local })
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// Labels of the level-`(n − depth)` supertiles inside `P_n(label)`.
    fn reachable(&self, label: usize, depth: u32) -> Vec<bool> {
        let k = self.rule.labels.len();
        let mut cur = vec![false; k];
        cur[label] = true;
        for _ in 0..depth {
            let mut next = vec![false; k];
            for (l, _) in cur.iter().enumerate().filter(|(_, c)| **c) {
                for p in &self.rule.children[l] {
                    next[p.label] = true;
                }
            }
            cur = next;
        }
        cur
    }

    /// All offsets realized inside `P_n(label)` with `n ≤ max_level`.
    pub fn offsets_in(&self, label: usize, n: u32) -> Result<OffsetSet> {
        if n > self.max_level {
            return Err(Error::Level { level: n, reason: format!("index built to {}", self.max_level) });
        }
        let mut set = OffsetSet::new(&self.rule, self.m)?;
        for level in self.m + 1..=n {
            let present = self.reachable(label, n - level);
            for (l, _) in present.iter().enumerate().filter(|(_, p)| **p) {
                for &o in self.local[level as usize][l].keys() {
                    if !set.offsets.contains_key(&o) {
                        set.insert(o, 1);
                    }
                }
            }
        }
        Ok(set)
    }

    /// Junctions realizing `offset`, smallest supertiles first.
    pub fn junctions(&self, offset: i64) -> impl Iterator<Item = &Junction> + '_ {
        self.local.iter().flat_map(move |per_label| per_label.iter().filter_map(move |m| m.get(&offset)))
    }
}
