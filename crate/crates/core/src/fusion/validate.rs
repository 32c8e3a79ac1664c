//! Exact-cover validation of fusion rules.

use std::fmt;

use serde::Serialize;

use super::rule::FusionRule;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub width: i64,
    pub height: i64,
}

impl Rect {
    fn right(&self) -> i64 {
        self.x + self.width
    }

    fn top(&self) -> i64 {
        self.y + self.height
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}) x [{}, {})", self.x, self.right(), self.y, self.top())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ViolationKind {
    /// Two children share the unit square at `at`.
    Overlap { first: usize, second: usize, at: (i64, i64) },
    /// The unit square at `at` is not covered by any child.
    Gap { at: (i64, i64) },
    /// A child sticks out of the parent rectangle.
    Overflow { child: usize, child_rect: Rect },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub label: String,
    pub level: u32,
    pub rect: Rect,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} `{}` {}: ", self.level, self.label, self.rect)?;
        match &self.kind {
            ViolationKind::Overlap { first, second, at } => {
                write!(f, "children {first} and {second} overlap at {at:?}")
            }
            ViolationKind::Gap { at } => write!(f, "gap at {at:?}"),
            ViolationKind::Overflow { child, child_rect } => {
                write!(f, "child {child} at {child_rect} leaves the rectangle")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub depth: u32,
    /// Number of (level, label) pairs checked.
    pub checked: usize,
    /// First violation per offending (level, label) pair.
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that for every level `1..=depth` the children of each label tile its
/// rectangle exactly. Arithmetic overflow of the sizes is an error.
pub fn validate_rule(rule: &FusionRule, depth: u32) -> Result<ValidationReport> {
    let table = rule.level_table(depth)?;
    let mut report = ValidationReport { depth, checked: 0, violations: Vec::new() };
    for level in 1..=depth {
        for (label, kids) in rule.children.iter().enumerate() {
            let (w, h) = table.dims(label, level);
            let rect = Rect { x: 0, y: 0, width: w, height: h };
            let children: Vec<Rect> = kids
                .iter()
                .map(|p| {
                    let (cw, ch) = table.dims(p.label, level - 1);
                    Rect { x: table.eval(&p.x, level - 1), y: table.eval(&p.y, level - 1), width: cw, height: ch }
                })
                .collect();
            report.checked += 1;
            if let Some(kind) = first_violation(rect, &children) {
                report.violations.push(Violation {
                    label: rule.label_name(label).to_string(),
                    level,
                    rect,
                    kind,
                });
            }
        }
    }
    Ok(report)
}

/// Exact cover test by coordinate compression: every cell of the grid spanned
/// by all child edges is covered exactly once.
fn first_violation(parent: Rect, children: &[Rect]) -> Option<ViolationKind> {
    for (i, c) in children.iter().enumerate() {
        if c.x < parent.x || c.y < parent.y || c.right() > parent.right() || c.top() > parent.top() {
            return Some(ViolationKind::Overflow { child: i, child_rect: *c });
        }
    }
    let mut xs: Vec<i64> = vec![parent.x, parent.right()];
    let mut ys: Vec<i64> = vec![parent.y, parent.top()];
    for c in children {
        xs.extend([c.x, c.right()]);
        ys.extend([c.y, c.top()]);
    }
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let mut owner: Vec<Option<usize>> = vec![None; nx * ny];
    let index = |v: &[i64], t: i64| v.binary_search(&t).expect("compressed coordinate");
    for (i, c) in children.iter().enumerate() {
        let (x0, x1) = (index(&xs, c.x), index(&xs, c.right()));
        let (y0, y1) = (index(&ys, c.y), index(&ys, c.top()));
        for cy in y0..y1 {
            for cx in x0..x1 {
                let cell = &mut owner[cy * nx + cx];
                if let Some(first) = *cell {
                    return Some(ViolationKind::Overlap { first, second: i, at: (xs[cx], ys[cy]) });
                }
                *cell = Some(i);
            }
        }
    }
    owner
        .iter()
        .position(Option::is_none)
        .map(|k| ViolationKind::Gap { at: (xs[k % nx], ys[k / nx]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::fusion::parse_rule;

    #[test]
    fn bundled_rules_pass() {
        assert!(validate_rule(&bundled::frank_dpv(), 6).unwrap().passed());
        assert!(validate_rule(&bundled::example2(), 8).unwrap().passed());
    }

    #[test]
    fn collision_is_an_overlap() {
        let rule = parse_rule(
            "tiles: a\nlengths: L\ninit: L=1\nrecurrence: L -> 2L\nsize a: L L\n\
             rule a:\n  a at (0, 0)\n  a at (0, 0)\n  a at (L, 0)\n  a at (L, L)\n",
        )
        .unwrap();
        let report = validate_rule(&rule, 1).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            report.violations[0].kind,
            ViolationKind::Overlap { first: 0, second: 1, at: (0, 0) }
        ));
    }

    #[test]
    fn gaps_and_overflow() {
        let gap = parse_rule(
            "tiles: a\nlengths: L\ninit: L=1\nrecurrence: L -> 2L\nsize a: L L\n\
             rule a:\n  a at (0, 0)\n  a at (L, 0)\n  a at (L, L)\n",
        )
        .unwrap();
        let v = &validate_rule(&gap, 2).unwrap().violations;
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].kind, ViolationKind::Gap { at: (0, 1) });
        let spill = parse_rule(
            "tiles: a\nlengths: L\ninit: L=1\nrecurrence: L -> L\nsize a: L L\nrule a:\n  a at (1, 0)\n",
        )
        .unwrap();
        let v = &validate_rule(&spill, 1).unwrap().violations;
        assert!(matches!(v[0].kind, ViolationKind::Overflow { child: 0, .. }));
        assert!(v[0].to_string().contains("leaves the rectangle"));
    }
}
