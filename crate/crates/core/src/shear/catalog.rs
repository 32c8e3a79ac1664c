use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::fusion::{FusionRule, Patch, DEFAULT_TILE_BUDGET};
use crate::Result;

use super::fault::find_fault_lines;
use super::offsets::{Junction, OffsetIndex};

/// Where a window was first seen: lattice point `(x, y)` of `P_level(label)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub label: usize,
    pub level: u32,
    pub x: i64,
    pub y: i64,
}

/// Label arrays `(2r+1) × 2r` centred on lattice points of fault lines.
#[derive(Clone, Debug)]
pub struct WindowCatalog {
    pub radius: u32,
    pub fault_level: u32,
    pub max_level: u32,
    windows: HashMap<Vec<u8>, Provenance>,
    pub warnings: Vec<String>,
}

impl WindowCatalog {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn lookup(&self, window: &[u8]) -> Option<&Provenance> {
        self.windows.get(window)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], &Provenance)> {
        self.windows.iter().map(|(w, p)| (w.as_slice(), p))
    }
}

/// Window of radius `r` around the lattice point `(x, y)`: columns
/// `x−r ..= x+r`, rows `y−r .. y+r`, row-major from the bottom. `None` if it
/// does not fit in the patch.
pub fn window(patch: &Patch, x: i64, y: i64, r: u32) -> Option<Vec<u8>> {
    let r = r as i64;
    if x - r < 0 || y - r < 0 || x + r >= patch.width() || y + r > patch.height() {
        return None;
    }
    let mut out = Vec::with_capacity(((2 * r + 1) * 2 * r) as usize);
    for yy in y - r..y + r {
        for xx in x - r..=x + r {
            out.push(patch.label_at(xx, yy)? as u8);
        }
    }
    Some(out)
}

/// Harvests every window centred on a level-`fault_level` fault line of
/// `P_M(t)`, for all labels `t` and `M ≤ max_level`.
pub fn build_window_catalog(
    rule: &Arc<FusionRule>,
    r: u32,
    max_level: u32,
    fault_level: u32,
) -> Result<WindowCatalog> {
    let jobs: Vec<(usize, u32)> = (0..=max_level)
        .flat_map(|lv| (0..rule.labels.len()).map(move |t| (t, lv)))
        .filter(|&(_, lv)| lv > fault_level)
        .collect();
    let harvested: Vec<Vec<(Vec<u8>, Provenance)>> = jobs
        .par_iter()
        .map(|&(t, lv)| -> Result<Vec<(Vec<u8>, Provenance)>> {
            let patch = Patch::build(Arc::clone(rule), t, lv, DEFAULT_TILE_BUDGET)?;
            patch.grid()?;
            let mut out = Vec::new();
            for line in find_fault_lines(&patch, fault_level, 0)? {
                for x in line.x0..=line.x1 {
                    if let Some(w) = window(&patch, x, line.y, r) {
                        out.push((w, Provenance { label: t, level: lv, x, y: line.y }));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut windows = HashMap::new();
    for batch in harvested {
        for (w, p) in batch {
            windows.entry(w).or_insert(p);
        }
    }
    let mut warnings = Vec::new();
    if windows.is_empty() {
        warnings.push(format!(
            "no window of radius {r} fits around a level-{fault_level} fault line up to level {max_level}"
        ));
    }
    Ok(WindowCatalog { radius: r, fault_level, max_level, windows, warnings })
}

/// A junction realizing the requested offset, with every window along it
/// found in the catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub offset: i64,
    pub junction: Junction,
    /// Supertile in which the windows were read, and the junction's position
    /// inside it (the junction's own supertile may be too small to hold them).
    pub host_label: usize,
    pub host_level: u32,
    pub host_dx: i64,
    pub host_dy: i64,
    pub windows: Vec<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessResult {
    Found(Witness),
    NotFound {
        offset: i64,
        /// Search bound: supertile levels up to this were searched exhaustively.
        max_level: u32,
        candidates: usize,
    },
}

impl WitnessResult {
    pub fn is_found(&self) -> bool {
        matches!(self, WitnessResult::Found(_))
    }
}

/// Places a level-`level` supertile of `label` inside successively larger
/// supertiles until the box `[x0, x1) × [y0, y1)` (relative to it) fits with
/// the largest margin available at each step.
fn embed(
    rule: &FusionRule,
    label: usize,
    level: u32,
    max_level: u32,
    bx: (i64, i64, i64, i64),
) -> Result<Option<(usize, u32, i64, i64)>> {
    let table = rule.level_table(max_level)?;
    let (mut lab, mut lev, mut dx, mut dy) = (label, level, 0i64, 0i64);
    loop {
        let (w, h) = table.dims(lab, lev);
        let (x0, y0, x1, y1) = (bx.0 + dx, bx.1 + dy, bx.2 + dx, bx.3 + dy);
        if x0 >= 0 && y0 >= 0 && x1 <= w && y1 <= h {
            return Ok(Some((lab, lev, dx, dy)));
        }
        if lev >= max_level {
            return Ok(None);
        }
        let mut best: Option<(i64, usize, i64, i64)> = None;
        for (parent, kids) in rule.children.iter().enumerate() {
            let (pw, ph) = table.dims(parent, lev + 1);
            for p in kids.iter().filter(|p| p.label == lab) {
                let (cx, cy) = (table.eval(&p.x, lev), table.eval(&p.y, lev));
                let margin = (x0 + cx).min(y0 + cy).min(pw - (x1 + cx)).min(ph - (y1 + cy));
                if best.is_none_or(|b| margin > b.0) {
                    best = Some((margin, parent, cx, cy));
                }
            }
        }
        let Some((_, parent, cx, cy)) = best else { return Ok(None) };
        lab = parent;
        lev += 1;
        dx += cx;
        dy += cy;
    }
}

/// Searches the junctions of `index` for offset `s` whose radius-`r` windows
/// (along the union of the two facing supertiles) are all in `catalog`.
/// The result certifies legality at radius `r` up to the index's level only.
pub fn shear_witness(index: &OffsetIndex, catalog: &WindowCatalog, rule: &Arc<FusionRule>, s: i64) -> Result<WitnessResult> {
    let r = catalog.radius as i64;
    let table = rule.level_table(index.max_level())?;
    let m = index.level();
    let mut candidates = 0;
    let mut patches: HashMap<(usize, u32), Patch> = HashMap::new();
    for j in index.junctions(s) {
        candidates += 1;
        let wa = table.dims(j.above, m).0;
        let wb = table.dims(j.below, m).0;
        let (lo, hi) = (j.x_above.min(j.x_below), (j.x_above + wa).max(j.x_below + wb));
        let bx = (lo - r, j.y - r, hi + r + 1, j.y + r);
        let Some((host, level, dx, dy)) = embed(rule, j.label, j.level, index.max_level(), bx)? else {
            continue;
        };
        let patch = match patches.entry((host, level)) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(Patch::lazy(Arc::clone(rule), host, level, DEFAULT_TILE_BUDGET)?)
            }
        };
        let mut provenance = Vec::new();
        for x in lo..=hi {
            let found = window(patch, x + dx, j.y + dy, catalog.radius)
                .and_then(|w| catalog.lookup(&w).copied());
            match found {
                Some(p) => provenance.push(p),
                None => break,
            }
        }
        if provenance.len() == (hi - lo + 1) as usize {
            return Ok(WitnessResult::Found(Witness {
                offset: s,
                junction: *j,
                host_label: host,
                host_level: level,
                host_dx: dx,
                host_dy: dy,
                windows: provenance,
            }));
        }
    }
    Ok(WitnessResult::NotFound { offset: s, max_level: index.max_level(), candidates })
}
