use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use proptest::prelude::*;

use tilescope_core::align::{aligned_path, alignment_graph, connectivity, displacement_identity_check, AlignmentGraph, Contact};
use tilescope_core::bundled;
use tilescope_core::fusion::{build_supertile, Node, Patch, DEFAULT_TILE_BUDGET};
use tilescope_core::spectra::{edge_pattern, pattern_hash, CochainSpec, Direction, Edge};
use tilescope_core::{Rational, Scalar};

/// Flush adjacencies by comparing every pair of nodes.
fn brute_edges(nodes: &[Node]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            let horizontal = a.right() == b.x
                && a.y.max(b.y) < a.top().min(b.top())
                && (a.y == b.y || a.top() == b.top());
            let vertical = a.top() == b.y
                && a.x.max(b.x) < a.right().min(b.right())
                && (a.x == b.x || a.right() == b.right());
            if horizontal || vertical {
                out.insert((i.min(j), i.max(j)));
            }
        }
    }
    out
}

fn union_find_components(n: usize, edges: &BTreeSet<(usize, usize)>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

#[test]
fn graph_matches_pairwise_oracle() {
    let rule = Arc::new(bundled::frank_dpv());
    for t in 0..4 {
        for n in 1..=5 {
            let p = Patch::build(Arc::clone(&rule), t, n, DEFAULT_TILE_BUDGET).unwrap();
            for m in 0..n.min(4) {
                let g = alignment_graph(&p, m).unwrap();
                let fast: BTreeSet<(usize, usize)> = g.edges.iter().map(|e| (e.a.min(e.b), e.a.max(e.b))).collect();
                let brute = brute_edges(&g.nodes);
                assert_eq!(fast, brute, "t={t} n={n} m={m}");
                let c = connectivity(&g);
                assert_eq!(c.components, union_find_components(g.nodes.len(), &brute));
                assert!(c.is_connected);
            }
        }
    }
}

#[test]
fn edges_are_sound() {
    let p = build_supertile(&bundled::frank_dpv(), "a", 6).unwrap();
    for m in 0..=4 {
        let g = alignment_graph(&p, m).unwrap();
        for e in &g.edges {
            let (a, b) = (&g.nodes[e.a], &g.nodes[e.b]);
            match e.contact {
                Contact::Horizontal { bottoms, tops } => {
                    assert_eq!(a.right(), b.x);
                    assert!(a.y.max(b.y) < a.top().min(b.top()));
                    assert_eq!((bottoms, tops), (a.y == b.y, a.top() == b.top()));
                }
                Contact::Vertical { lefts, rights } => {
                    assert_eq!(a.top(), b.y);
                    assert!(a.x.max(b.x) < a.right().min(b.right()));
                    assert_eq!((lefts, rights), (a.x == b.x, a.right() == b.right()));
                }
            }
            assert!(e.contact.is_flush());
        }
    }
}

#[test]
fn children_of_a_form_block_row_and_column() {
    let rule = bundled::frank_dpv();
    for n in 1..=5 {
        let p = build_supertile(&rule, "a", n + 1).unwrap();
        let g = alignment_graph(&p, n).unwrap();
        let table = rule.level_table(n + 1).unwrap();
        let (w, v) = (table.dims(0, n).0, table.dims(3, n).0);
        let block: Vec<usize> = (0..16).filter(|&i| g.nodes[i].right() <= w + 2 * v && g.nodes[i].top() <= w + 2 * v).collect();
        assert_eq!(block.len(), 9);
        let inside: Vec<_> = g.edges.iter().filter(|e| block.contains(&e.a) && block.contains(&e.b)).collect();
        assert_eq!(inside.len(), 12);
        assert!(inside.iter().all(|e| matches!(
            e.contact,
            Contact::Horizontal { bottoms: true, tops: true } | Contact::Vertical { lefts: true, rights: true }
        )));
        let top_row: Vec<usize> = (0..16).filter(|&i| g.nodes[i].y == w + 2 * v).collect();
        let right_col: Vec<usize> = (0..16).filter(|&i| g.nodes[i].x == w + 2 * v).collect();
        assert_eq!((top_row.len(), right_col.len()), (4, 4));
        let corner = g.node_with_corner(w + 2 * v, w + 2 * v).unwrap();
        assert!(top_row.contains(&corner) && right_col.contains(&corner));
        let upper_left = g.node_with_corner(0, 2 * v).unwrap();
        assert!(g.edge_between(upper_left, g.node_with_corner(0, w + 2 * v).unwrap()).is_some());
    }
}

#[test]
fn paths_stay_inside_and_are_short() {
    let p = build_supertile(&bundled::frank_dpv(), "a", 4).unwrap();
    let g = alignment_graph(&p, 1).unwrap();
    let max_perimeter = g.nodes.iter().map(|n| 2 * (n.width + n.height)).max().unwrap();
    for target in (0..g.nodes.len()).step_by(7) {
        let path = aligned_path(&g, 0, target).unwrap().unwrap();
        assert!(path.lattice.iter().all(|&(x, y)| x >= 0 && y >= 0 && x <= p.width() && y <= p.height()));
        assert!(path.length() <= path.nodes.len() as i64 * max_perimeter);
        assert_eq!(path.nodes.len(), path.contacts.len() + 1);
        let last = &g.nodes[target];
        assert_eq!(path.lattice.last(), Some(&(last.x, last.y)));
    }
}

#[test]
fn disconnected_graphs_report_no_path() {
    let node = |x, y| Node { label: 0, level: 0, x, y, width: 1, height: 1 };
    let g = AlignmentGraph::from_nodes(0, vec![node(0, 0), node(5, 5)]);
    assert_eq!(aligned_path(&g, 0, 1).unwrap(), None);
    assert!(aligned_path(&g, 0, 2).is_err());
}

fn d_pairs(g: &AlignmentGraph, d: usize) -> Vec<(usize, usize)> {
    let ds: Vec<usize> = (0..g.nodes.len()).filter(|&i| g.nodes[i].label == d).collect();
    ds.iter().flat_map(|&a| ds.iter().map(move |&b| (a, b))).filter(|(a, b)| a != b).collect()
}

#[test]
fn displacement_identity_for_linear_forms() {
    let p = build_supertile(&bundled::frank_dpv(), "a", 5).unwrap();
    let g = alignment_graph(&p, 2).unwrap();
    let d = p.rule().label_index("d").unwrap();
    let r = |n| Rational::ratio(n, 1);
    for (a, b) in d_pairs(&g, d) {
        let path = aligned_path(&g, a, b).unwrap().unwrap();
        for (mu, nu) in [(1, 0), (0, 1), (2, 3), (1, 1)] {
            let c = CochainSpec::linear(r(mu), r(nu));
            let report = displacement_identity_check(&c, (r(mu), r(nu)), &p, &g, &path).unwrap();
            assert!(report.holds(), "{report:?}");
        }
    }
}

#[test]
fn non_closed_table_breaks_the_identity() {
    // 1 on vertical edges whose right-hand cell is an `a`, 0 elsewhere
    let p = build_supertile(&bundled::frank_dpv(), "a", 5).unwrap();
    let a = p.rule().label_index("a").unwrap() as u8;
    let mut values = HashMap::new();
    for y in 0..p.height() {
        for x in 0..p.width() {
            for edge in [Edge::horizontal(x, y), Edge::vertical(x, y)] {
                if let Some(cells) = edge_pattern(&p, edge, 0) {
                    let v = i64::from(edge.dir == Direction::Vertical && cells[1] == a);
                    values.insert(pattern_hash(edge.dir, &cells), Rational::ratio(v, 1));
                }
            }
        }
    }
    let table = CochainSpec::table(0, values);
    let g = alignment_graph(&p, 2).unwrap();
    let d = p.rule().label_index("d").unwrap();
    let (mut evaluated, mut violations) = (0, 0);
    for (s, t) in d_pairs(&g, d) {
        let path = aligned_path(&g, s, t).unwrap().unwrap();
        let report = displacement_identity_check(&table, (Rational::ratio(0, 1), Rational::ratio(0, 1)), &p, &g, &path).unwrap();
        if report.integral.is_some() {
            evaluated += 1;
            violations += usize::from(!report.holds());
        } else {
            assert!(report.error.is_some());
        }
    }
    assert!(evaluated > 0);
    assert!(violations > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn all_small_graphs_are_connected(t in 0usize..4, n in 1u32..=6, m in 0u32..6) {
        let m = m % n;
        let p = Patch::build(Arc::new(bundled::frank_dpv()), t, n, DEFAULT_TILE_BUDGET).unwrap();
        let g = alignment_graph(&p, m).unwrap();
        let c = connectivity(&g);
        prop_assert!(c.is_connected);
        prop_assert_eq!(c.sizes.iter().sum::<usize>(), g.nodes.len());
    }
}
