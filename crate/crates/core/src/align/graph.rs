use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::fusion::{Node, Patch};
use crate::Result;

/// How two supertiles meet. Horizontal edges join `a` to the supertile `b`
/// on its right; vertical edges join `a` to the one above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Contact {
    Horizontal { bottoms: bool, tops: bool },
    Vertical { lefts: bool, rights: bool },
}

impl Contact {
    pub fn is_horizontal(&self) -> bool {
        matches!(self, Contact::Horizontal { .. })
    }

    pub fn is_flush(&self) -> bool {
        match *self {
            Contact::Horizontal { bottoms, tops } => bottoms || tops,
            Contact::Vertical { lefts, rights } => lefts || rights,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AlignEdge {
    pub a: usize,
    pub b: usize,
    pub contact: Contact,
}

/// Level-`m` supertiles of a patch, joined when they share a boundary
/// segment of positive length and are flush along it.
#[derive(Clone, Debug, Serialize)]
pub struct AlignmentGraph {
    pub level: u32,
    pub nodes: Vec<Node>,
    pub edges: Vec<AlignEdge>,
    #[serde(skip)]
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// Shared-segment neighbours of each node on one side: for every node `a`,
/// the nodes `b` whose near edge lies on `a`'s far edge. `key` gives the
/// (far, near) coordinate and `span` the interval along the contact line.
fn sweep(
    nodes: &[Node],
    far: impl Fn(&Node) -> i64,
    near: impl Fn(&Node) -> i64,
    span: impl Fn(&Node) -> (i64, i64),
    mut f: impl FnMut(usize, usize),
) {
    let mut by_near: HashMap<i64, Vec<usize>> = HashMap::new();
    for (i, n) in nodes.iter().enumerate() {
        by_near.entry(near(n)).or_default().push(i);
    }
    for list in by_near.values_mut() {
        list.sort_by_key(|&i| span(&nodes[i]).0);
    }
    for (a, n) in nodes.iter().enumerate() {
        let Some(list) = by_near.get(&far(n)) else { continue };
        let (lo, hi) = span(n);
        let start = list.partition_point(|&i| span(&nodes[i]).1 <= lo);
        for &b in list[start..].iter().take_while(|&&i| span(&nodes[i]).0 < hi) {
            f(a, b);
        }
    }
}

impl AlignmentGraph {
    pub fn build(patch: &Patch, m: u32) -> Result<Self> {
        let nodes = patch.nodes_at_level(m)?;
        Ok(Self::from_nodes(m, nodes))
    }

    /// Graph over arbitrary non-overlapping rectangles.
    pub fn from_nodes(level: u32, nodes: Vec<Node>) -> Self {
        let mut edges = Vec::new();
        sweep(&nodes, Node::right, |n| n.x, |n| (n.y, n.top()), |a, b| {
            let (p, q) = (&nodes[a], &nodes[b]);
            let contact = Contact::Horizontal { bottoms: p.y == q.y, tops: p.top() == q.top() };
            if contact.is_flush() {
                edges.push(AlignEdge { a, b, contact });
            }
        });
        sweep(&nodes, Node::top, |n| n.y, |n| (n.x, n.right()), |a, b| {
            let (p, q) = (&nodes[a], &nodes[b]);
            let contact = Contact::Vertical { lefts: p.x == q.x, rights: p.right() == q.right() };
            if contact.is_flush() {
                edges.push(AlignEdge { a, b, contact });
            }
        });
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (k, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, k));
            adjacency[e.b].push((e.a, k));
        }
        Self { level, nodes, edges, adjacency }
    }

    pub fn neighbours(&self, node: usize) -> impl Iterator<Item = (usize, &AlignEdge)> + '_ {
        self.adjacency[node].iter().map(|&(n, k)| (n, &self.edges[k]))
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&AlignEdge> {
        self.adjacency[a].iter().find(|p| p.0 == b).map(|p| &self.edges[p.1])
    }

    /// Index of the node with lower-left corner `(x, y)`.
    pub fn node_with_corner(&self, x: i64, y: i64) -> Option<usize> {
        self.nodes.iter().position(|n| n.x == x && n.y == y)
    }

    /// BFS predecessor tree from `source`.
    pub(crate) fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes.len()];
        parent[source] = Some(source);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if parent[v].is_none() {
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    /// Node sets of the connected components, each sorted, in order of their
    /// smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for s in 0..self.nodes.len() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                for &(v, _) in &self.adjacency[comp[i]] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub is_connected: bool,
    pub components: usize,
    pub sizes: Vec<usize>,
}

/// An empty graph is connected with no components.
pub fn connectivity(graph: &AlignmentGraph) -> Connectivity {
    let comps = graph.components();
    Connectivity { is_connected: comps.len() <= 1, components: comps.len(), sizes: comps.iter().map(Vec::len).collect() }
}

pub fn alignment_graph(patch: &Patch, m: u32) -> Result<AlignmentGraph> {
    AlignmentGraph::build(patch, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::fusion::build_supertile;

    #[test]
    fn children_of_a() {
        let rule = bundled::frank_dpv();
        for n in 1..=4 {
            let p = build_supertile(&rule, "a", n + 1).unwrap();
            let g = alignment_graph(&p, n).unwrap();
            assert_eq!(g.nodes.len(), 16);
            assert!(connectivity(&g).is_connected);
        }
        let d = alignment_graph(&build_supertile(&rule, "d", 3).unwrap(), 2).unwrap();
        assert_eq!((d.nodes.len(), d.edges.len()), (1, 0));
        let b = alignment_graph(&build_supertile(&rule, "b", 3).unwrap(), 2).unwrap();
        assert_eq!((b.nodes.len(), b.edges.len()), (4, 3));
        assert!(b.edges.iter().all(|e| e.contact == Contact::Horizontal { bottoms: true, tops: true }));
    }

    #[test]
    fn empty_and_unaligned() {
        let empty = AlignmentGraph::from_nodes(0, Vec::new());
        assert_eq!(connectivity(&empty), Connectivity { is_connected: true, components: 0, sizes: vec![] });
        let node = |x, y, width, height| Node { label: 0, level: 0, x, y, width, height };
        // staggered bricks touch along positive-length segments but are not flush
        let g = AlignmentGraph::from_nodes(0, vec![node(0, 0, 2, 3), node(2, 1, 2, 3)]);
        assert!(g.edges.is_empty());
        assert_eq!(connectivity(&g).components, 2);
        // corner contact only
        let g = AlignmentGraph::from_nodes(0, vec![node(0, 0, 1, 1), node(1, 1, 1, 1)]);
        assert!(g.edges.is_empty());
    }
}
