use std::collections::BTreeMap;

use crate::fusion::{Node, Patch};
use crate::Result;

/// A maximal horizontal segment `[x0, x1)` at height `y` along which level-`m`
/// supertiles abut from both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultLine {
    pub level: u32,
    pub y: i64,
    pub x0: i64,
    pub x1: i64,
    /// Supertiles just above the line: `(label, start x)`, left to right.
    pub north: Vec<(usize, i64)>,
    /// Supertiles just below the line.
    pub south: Vec<(usize, i64)>,
}

impl FaultLine {
    pub fn extent(&self) -> i64 {
        self.x1 - self.x0
    }
}

/// Fault lines of the level-`m` decomposition with extent at least
/// `min_extent`, sorted by `y` then `x0`.
///
/// On an interior line, the squares just above are covered by supertiles
/// starting at `y` exactly where the squares just below are covered by
/// supertiles ending at `y` (otherwise two supertiles would overlap), so the
/// maximal segments are the maximal runs of supertiles starting at `y`, and
/// the north and south words span them exactly.
pub fn find_fault_lines(patch: &Patch, m: u32, min_extent: i64) -> Result<Vec<FaultLine>> {
    let nodes = patch.nodes_at_level(m)?;
    let height = patch.height();
    let mut above: BTreeMap<i64, Vec<Node>> = BTreeMap::new();
    let mut below: BTreeMap<i64, Vec<Node>> = BTreeMap::new();
    for n in nodes {
        if n.y > 0 {
            above.entry(n.y).or_default().push(n);
        }
        if n.top() < height {
            below.entry(n.top()).or_default().push(n);
        }
    }
    let mut lines = Vec::new();
    for (y, mut north) in above {
        let mut south = below.remove(&y).unwrap_or_default();
        north.sort_by_key(|n| n.x);
        south.sort_by_key(|n| n.x);
        let mut si = 0;
        let mut start = 0;
        for i in 0..north.len() {
            let run_ends = i + 1 == north.len() || north[i + 1].x != north[i].right();
            if !run_ends {
                continue;
            }
            let (x0, x1) = (north[start].x, north[i].right());
            let words_north: Vec<(usize, i64)> =
                north[start..=i].iter().map(|n| (n.label, n.x)).collect();
            start = i + 1;
            while si < south.len() && south[si].x < x0 {
                si += 1;
            }
            let mut words_south = Vec::new();
            while si < south.len() && south[si].right() <= x1 {
                words_south.push((south[si].label, south[si].x));
                si += 1;
            }
            let spans = words_south.first().map(|s| s.1) == Some(x0)
                && south[..si].last().map(|s| s.right()) == Some(x1);
            debug_assert!(spans, "north and south coverage coincide on interior lines");
            if spans && x1 - x0 >= min_extent.max(1) {
                lines.push(FaultLine { level: m, y, x0, x1, north: words_north, south: words_south });
            }
        }
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::fusion::build_supertile;

    #[test]
    fn top_strip_line_of_p3a() {
        let rule = bundled::frank_dpv();
        let p = build_supertile(&rule, "a", 3).unwrap();
        let lines = find_fault_lines(&p, 1, 1).unwrap();
        let top = lines.iter().find(|l| l.y == 15 && l.x0 == 0).expect("line at y = 15");
        assert_eq!(top.x1, 19);
        let word = |w: &[(usize, i64)]| -> String { w.iter().map(|&(l, _)| rule.label_name(l)).collect() };
        assert_eq!(word(&top.north), "acccaaa");
        assert_eq!(word(&top.south), "bbbddda");
    }

    #[test]
    fn unit_level_lines_are_rows() {
        let rule = bundled::frank_dpv();
        let p = build_supertile(&rule, "a", 1).unwrap();
        let lines = find_fault_lines(&p, 0, 4).unwrap();
        assert_eq!(lines.len(), 3);
        for l in &lines {
            assert_eq!((l.x0, l.x1, l.north.len(), l.south.len()), (0, 4, 4, 4));
        }
    }
}
