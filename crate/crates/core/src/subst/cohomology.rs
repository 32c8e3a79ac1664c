//! Barge–Diamond computation of `H^1` for one-dimensional substitution tilings.
//!
//! `0 → H̃⁰(X) → lim(ℤⁿ, Aᵀ) → H¹(Ω_σ) → H¹(X) → 0`, where `X` is the graph of
//! adjacencies between final and first letters of high-order supertiles.

use std::collections::HashMap;

use super::language::two_letter_words;
use super::matrix::IntMatrix;
use super::poly::IntPoly;
use super::roots::{eigenvalues, Root};
use super::substitution::{Letter, Substitution};
use crate::Result;

/// Tolerance used for the eigenvalues in cohomology reports.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

/// Bipartite graph of adjacencies `x.y` (final letter `x`, first letter `y`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BdGraph {
    pub order: u32,
    /// Sorted edges `(final, first)`.
    pub edges: Vec<(Letter, Letter)>,
    /// Index of the image of each edge under the induced map, if it is an edge.
    pub edge_map: Vec<Option<usize>>,
    pub left: Vec<Letter>,
    pub right: Vec<Letter>,
    pub components: usize,
    /// First Betti number: independent cycles.
    pub cycles: usize,
}

impl BdGraph {
    pub fn edge_names(&self, s: &Substitution) -> Vec<String> {
        self.edges
            .iter()
            .map(|&(x, y)| format!("{}.{}", s.alphabet()[x as usize], s.alphabet()[y as usize]))
            .collect()
    }

    fn vertex_count(&self) -> usize {
        self.left.len() + self.right.len()
    }

    fn vertex(&self, left: bool, l: Letter) -> usize {
        if left {
            self.left.binary_search(&l).expect("left vertex")
        } else {
            self.left.len() + self.right.binary_search(&l).expect("right vertex")
        }
    }
}

/// `l ↦ last(σ^n(l))` and `l ↦ first(σ^n(l))` as lookup tables.
fn end_maps(s: &Substitution, n: u32) -> (Vec<Letter>, Vec<Letter>) {
    let k = s.len();
    let mut last: Vec<Letter> = (0..k as Letter).collect();
    let mut first = last.clone();
    for _ in 0..n {
        last = last.iter().map(|&l| s.last(l)).collect();
        first = first.iter().map(|&l| s.first(l)).collect();
    }
    (last, first)
}

fn edge_set(s: &Substitution, seed: Letter, n: u32) -> Vec<(Letter, Letter)> {
    let (last, first) = end_maps(s, n);
    let mut edges: Vec<(Letter, Letter)> = two_letter_words(s, seed)
        .into_iter()
        .map(|(x, y)| (last[x as usize], first[y as usize]))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// The adjacency graph at order `n` with the edge map induced by `σ^step`.
fn graph_with_step(s: &Substitution, seed: Letter, n: u32, step: u32) -> BdGraph {
    let edges = edge_set(s, seed, n);
    let (last, first) = end_maps(s, step);
    let edge_map = edges
        .iter()
        .map(|&(x, y)| edges.binary_search(&(last[x as usize], first[y as usize])).ok())
        .collect();
    let mut left: Vec<Letter> = edges.iter().map(|e| e.0).collect();
    let mut right: Vec<Letter> = edges.iter().map(|e| e.1).collect();
    left.sort_unstable();
    left.dedup();
    right.sort_unstable();
    right.dedup();
    let mut g = BdGraph { order: n, edges, edge_map, left, right, components: 0, cycles: 0 };
    let mut uf = UnionFind::new(g.vertex_count());
    for &(x, y) in &g.edges {
        uf.union(g.vertex(true, x), g.vertex(false, y));
    }
    g.components = uf.count();
    g.cycles = g.edges.len() + g.components - g.vertex_count();
    g
}

/// Adjacency graph `{final(σⁿ(x)).first(σⁿ(y)) : xy legal}` with the edge map
/// `x.y ↦ final(σ(x)).first(σ(y))`.
pub fn bd_adjacencies(s: &Substitution, seed: Letter, n: u32) -> BdGraph {
    graph_with_step(s, seed, n, 1)
}

/// Smallest order `n0 ≥ 1` and period `p` such that the edge sets are
/// periodic with period `p` from `n0` on.
pub fn stabilization(s: &Substitution, seed: Letter) -> (u32, u32) {
    // the pair (last^n, first^n) is eventually periodic; so is the edge set
    let mut seen: HashMap<(Vec<Letter>, Vec<Letter>), u32> = HashMap::new();
    let mut n = 0;
    let (pre, period) = loop {
        let state = end_maps(s, n);
        if let Some(&m) = seen.get(&state) {
            break (m, n - m);
        }
        seen.insert(state, n);
        n += 1;
    };
    let sets: Vec<_> = (0..pre + 2 * period + 1).map(|k| edge_set(s, seed, k)).collect();
    let p = (1..=period)
        .filter(|p| period % p == 0)
        .find(|&p| (pre..pre + period).all(|k| sets[k as usize] == sets[(k + p) as usize]))
        .unwrap_or(period);
    // earliest start of the p-periodic tail
    let mut n0 = pre.max(1);
    while n0 > 1 && sets[(n0 - 1) as usize] == sets[(n0 - 1 + p) as usize] {
        n0 -= 1;
    }
    (n0, p)
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub matrix: IntMatrix,
    pub char_poly: IntPoly,
    pub eigenvalues: Vec<Root<f64>>,
    pub rank: usize,
    pub stable_rank: usize,
    /// Order at which the edge set is periodic, and its period.
    pub order: u32,
    pub period: u32,
    pub graph: BdGraph,
    pub reduced_components: usize,
    /// Induced map on the cycle space of `X` (under `σ^period`).
    pub cycle_map: IntMatrix,
    pub cycle_poly: IntPoly,
    pub cycle_eigenvalues: Vec<Root<f64>>,
    pub h1_rank: usize,
    pub an_dimension: usize,
    /// Some induced eigenvalue could not be separated from the unit circle.
    pub ambiguous: bool,
}

/// Rank of `H¹` and the dimension of its contracting (asymptotically
/// negligible) part.
pub fn h1_report(s: &Substitution, seed: Letter) -> Result<CohomologyReport> {
    let matrix = s.abelianization();
    let char_poly = matrix.char_poly();
    let eigen = eigenvalues(&char_poly, EIGEN_TOLERANCE)?;
    let (order, period) = stabilization(s, seed);
    let graph = graph_with_step(s, seed, order, period);
    let cycle_map = cycle_space_map(&graph);
    let cycle_poly = cycle_map.char_poly();
    let cycle_eigen = eigenvalues(&cycle_poly, EIGEN_TOLERANCE)?;
    let stable_rank = matrix.stable_rank();
    let reduced_components = graph.components.saturating_sub(1);
    let h1_rank = stable_rank + graph.cycles - reduced_components;

    let mut an_dimension = 0;
    let mut ambiguous = false;
    let induced = eigen.iter().chain(&cycle_eigen).filter(|r| !is_zero_root(r));
    for r in induced {
        match r.inside_unit_disc() {
            Some(true) => an_dimension += r.multiplicity,
            Some(false) => {}
            None => ambiguous = true,
        }
    }
    Ok(CohomologyReport {
        rank: matrix.rank(),
        matrix,
        char_poly,
        eigenvalues: eigen,
        stable_rank,
        order,
        period,
        graph,
        reduced_components,
        cycle_map,
        cycle_poly,
        cycle_eigenvalues: cycle_eigen,
        h1_rank,
        an_dimension,
        ambiguous,
    })
}

fn is_zero_root(r: &Root<f64>) -> bool {
    r.exact.as_ref().is_some_and(num_traits::Zero::is_zero)
}

/// Matrix of the induced chain map on a fundamental-cycle basis of `X`.
/// Edges are oriented from their final-letter vertex to their first-letter
/// vertex; the induced map preserves that orientation.
fn cycle_space_map(g: &BdGraph) -> IntMatrix {
    let v = g.vertex_count();
    let mut uf = UnionFind::new(v);
    let mut tree_adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); v];
    let mut non_tree = Vec::new();
    for (i, &(x, y)) in g.edges.iter().enumerate() {
        let (a, b) = (g.vertex(true, x), g.vertex(false, y));
        if uf.union(a, b) {
            tree_adj[a].push((b, i, 1));
            tree_adj[b].push((a, i, -1));
        } else {
            non_tree.push(i);
        }
    }
    let e = g.edges.len();
    let cycles: Vec<Vec<i64>> = non_tree
        .iter()
        .map(|&i| {
            let (x, y) = g.edges[i];
            let (a, b) = (g.vertex(true, x), g.vertex(false, y));
            let path = tree_path(&tree_adj, a, b);
            let mut z = vec![0i64; e];
            z[i] += 1;
            for (edge, sign) in path {
                z[edge] -= sign;
            }
            z
        })
        .collect();
    let c = non_tree.len();
    let mut m = IntMatrix::zeros(c);
    for (j, z) in cycles.iter().enumerate() {
        let mut image = vec![0i64; e];
        for (edge, &coef) in z.iter().enumerate() {
            if coef != 0 {
                let target = g.edge_map[edge].expect("edge map closed on a stabilized edge set");
                image[target] += coef;
            }
        }
        for (i, &nt) in non_tree.iter().enumerate() {
            m.set(i, j, image[nt].into());
        }
    }
    m
}

/// Signed edges of the tree path from `from` to `to`.
fn tree_path(adj: &[Vec<(usize, usize, i64)>], from: usize, to: usize) -> Vec<(usize, i64)> {
    let mut parent: Vec<Option<(usize, usize, i64)>> = vec![None; adj.len()];
    let mut visited = vec![false; adj.len()];
    let mut queue = std::collections::VecDeque::from([from]);
    visited[from] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &(w, edge, sign) in &adj[u] {
            if !visited[w] {
                visited[w] = true;
                parent[w] = Some((u, edge, sign));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while let Some((p, edge, sign)) = parent[cur] {
        path.push((edge, sign));
        cur = p;
    }
    path
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), sets: n }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` if the sets were distinct.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        self.sets -= 1;
        true
    }

    pub(crate) fn count(&self) -> usize {
        self.sets
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn north_graph_is_a_square() {
        let s = bundled::north();
        let a = s.letter('a').unwrap();
        for n in 3..=8 {
            let g = bd_adjacencies(&s, a, n);
            assert_eq!(g.edge_names(&s), ["a.a", "a.d", "c.a", "c.d"]);
            assert_eq!((g.components, g.cycles), (1, 1));
            assert!(g.edge_map.iter().all(Option::is_some));
        }
    }

    #[test]
    fn north_h1() {
        let s = bundled::north();
        let r = h1_report(&s, s.letter('a').unwrap()).unwrap();
        assert_eq!(r.char_poly.to_string(), "x^4 - 4x^2 - 3x");
        assert_eq!(r.rank, 3);
        assert_eq!(r.stable_rank, 3);
        assert_eq!(r.h1_rank, 4);
        assert_eq!(r.an_dimension, 0);
        assert!(!r.ambiguous);
        assert_eq!(r.cycle_map, IntMatrix::from_rows(&[vec![1]]));
    }

    #[test]
    fn doubling_is_a_loop() {
        let s = Substitution::parse("t -> tt\n").unwrap();
        let g = bd_adjacencies(&s, 0, 1);
        assert_eq!(g.edge_names(&s), ["t.t"]);
        let r = h1_report(&s, 0).unwrap();
        assert_eq!(r.h1_rank, 1);
        assert_eq!(r.an_dimension, 0);
    }

    #[test]
    fn example2_rows_have_no_contracting_part() {
        for name in ["example2-north", "example2-south"] {
            let s = bundled::substitution(name).unwrap();
            let r = h1_report(&s, 0).unwrap();
            assert_eq!(r.an_dimension, 0, "{name}");
        }
    }
}
