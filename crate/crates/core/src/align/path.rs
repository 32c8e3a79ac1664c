use serde::Serialize;

use crate::fusion::Patch;
use crate::spectra::{integrate, CochainSpec};
use crate::{Error, Result, Scalar};

use super::graph::{AlignmentGraph, Contact};

/// A shortest chain of aligned supertiles, with the lattice path it induces
/// between their lower-left corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlignedPath {
    pub nodes: Vec<usize>,
    pub contacts: Vec<Contact>,
    /// Axis-parallel polyline from the first corner to the last.
    pub lattice: Vec<(i64, i64)>,
}

impl AlignedPath {
    pub fn is_empty(&self) -> bool {
        self.contacts.is_empty()
    }

    /// Number of unit edges on the lattice path.
    pub fn length(&self) -> i64 {
        self.lattice.windows(2).map(|s| (s[1].0 - s[0].0).abs() + (s[1].1 - s[0].1).abs()).sum()
    }
}

/// Shortest aligned path by edge count, or `None` when the nodes lie in
/// different components. A node to itself gives an empty path.
pub fn aligned_path(graph: &AlignmentGraph, source: usize, target: usize) -> Result<Option<AlignedPath>> {
    let tree = PathTree::new(graph, source)?;
    if target >= graph.nodes.len() {
        return Err(Error::Invalid(format!("node index out of range ({} nodes)", graph.nodes.len())));
    }
    Ok(tree.path_to(target))
}

/// Breadth-first tree from one source, for extracting many paths.
pub struct PathTree<'g> {
    graph: &'g AlignmentGraph,
    source: usize,
    parent: Vec<Option<usize>>,
}

impl<'g> PathTree<'g> {
    pub fn new(graph: &'g AlignmentGraph, source: usize) -> Result<Self> {
        if source >= graph.nodes.len() {
            return Err(Error::Invalid(format!("node index out of range ({} nodes)", graph.nodes.len())));
        }
        Ok(Self { graph, source, parent: graph.bfs(source) })
    }

    pub fn reaches(&self, target: usize) -> bool {
        self.parent.get(target).is_some_and(Option::is_some)
    }

    pub fn path_to(&self, target: usize) -> Option<AlignedPath> {
        if !self.reaches(target) {
            return None;
        }
        let graph = self.graph;
        let mut nodes = vec![target];
        while let Some(&last) = nodes.last() {
            if last == self.source {
                break;
            }
            nodes.push(self.parent[last].expect("reached by bfs"));
        }
        nodes.reverse();
        let contacts: Vec<Contact> = nodes
            .windows(2)
            .map(|w| graph.edge_between(w[0], w[1]).expect("bfs follows edges").contact)
            .collect();
        let start = &graph.nodes[self.source];
        let mut lattice = vec![(start.x, start.y)];
        let mut push = |p: (i64, i64)| {
            if lattice.last() != Some(&p) {
                lattice.push(p);
            }
        };
        for (w, contact) in nodes.windows(2).zip(&contacts) {
            let (a, b) = (&graph.nodes[w[0]], &graph.nodes[w[1]]);
            // both bottoms (lefts) lie below both tops (rights), so the crossing
            // line at the larger one runs through the two supertiles
            if contact.is_horizontal() {
                let y = a.y.max(b.y);
                push((a.x, y));
                push((b.x, y));
            } else {
                let x = a.x.max(b.x);
                push((x, a.y));
                push((x, b.y));
            }
            push((b.x, b.y));
        }
        Some(AlignedPath { nodes, contacts, lattice })
    }
}

/// Outcome of comparing `∫α` along an aligned path with `μΔx + νΔy`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementReport<S> {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub expected: S,
    /// `None` if the integral could not be evaluated (see `error`).
    pub integral: Option<S>,
    pub error: Option<String>,
}

impl<S: PartialEq> DisplacementReport<S> {
    pub fn holds(&self) -> bool {
        self.integral.as_ref() == Some(&self.expected)
    }
}

/// Integrates `cochain` along `path`, whose ends must be the lower-left
/// corners of two level-`m` supertiles with the same label.
pub fn displacement_identity_check<S: Scalar>(
    cochain: &CochainSpec<S>,
    (mu, nu): (S, S),
    patch: &Patch,
    graph: &AlignmentGraph,
    path: &AlignedPath,
) -> Result<DisplacementReport<S>> {
    let (Some(&first), Some(&last)) = (path.nodes.first(), path.nodes.last()) else {
        return Err(Error::Invalid("path has no nodes".into()));
    };
    let (a, b) = (&graph.nodes[first], &graph.nodes[last]);
    if a.label != b.label {
        return Err(Error::Invalid(format!("endpoint labels differ ({} and {})", a.label, b.label)));
    }
    let (from, to) = ((a.x, a.y), (b.x, b.y));
    let dx = S::from_i64(to.0 - from.0).expect("integer scalar");
    let dy = S::from_i64(to.1 - from.1).expect("integer scalar");
    let expected = mu * dx + nu * dy;
    let (integral, error) = match integrate(cochain, patch, &path.lattice) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(DisplacementReport { from, to, expected, integral, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::alignment_graph;
    use crate::bundled;
    use crate::fusion::build_supertile;
    use crate::Rational;

    #[test]
    fn corner_to_corner_in_a() {
        let p = build_supertile(&bundled::frank_dpv(), "a", 3).unwrap();
        let g = alignment_graph(&p, 2).unwrap();
        let d = p.rule().label_index("d").unwrap();
        let ds: Vec<usize> = (0..g.nodes.len()).filter(|&i| g.nodes[i].label == d).collect();
        let lo = g.node_with_corner(0, 0).unwrap();
        let hi = *ds.iter().max_by_key(|&&i| g.nodes[i].right() + g.nodes[i].top()).unwrap();
        assert_eq!(g.nodes[lo].label, d);
        let path = aligned_path(&g, lo, hi).unwrap().unwrap();
        assert!(path.nodes.len() >= 4);
        assert_eq!(path.lattice.last(), Some(&(g.nodes[hi].x, g.nodes[hi].y)));
        for w in path.nodes.windows(2) {
            assert!(g.edge_between(w[0], w[1]).is_some());
        }
        let self_path = aligned_path(&g, lo, lo).unwrap().unwrap();
        assert!(self_path.is_empty());
        let dxy = CochainSpec::linear(Rational::ratio(2, 1), Rational::ratio(3, 1));
        let r = displacement_identity_check(&dxy, (Rational::ratio(2, 1), Rational::ratio(3, 1)), &p, &g, &path)
            .unwrap();
        assert!(r.holds());
    }
}
