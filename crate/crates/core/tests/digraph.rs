use proptest::prelude::*;
use spectralpath::digraph::{
    bidirected_path_endpoints, directed_distance, gamma, hessenberg_ordering, is_hessenberg,
    is_irreducible_tridiagonal, Digraph,
};
use spectralpath::theorems::{gen_instance, gen_permutation, InstanceKind};
use spectralpath::{Matrix, Tolerance};

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() }
}

/// All-pairs distances by Floyd-Warshall.
fn floyd(g: &Digraph) -> Vec<Vec<Option<usize>>> {
    let n = g.vertex_count();
    let mut dist = vec![vec![None; n]; n];
    for (v, row) in dist.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for (i, j) in g.arcs() {
        if i != j {
            dist[i][j] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (dist[i][k], dist[k][j]) {
                    if dist[i][j].is_none_or(|c| a + b < c) {
                        dist[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    dist
}

fn random_digraph() -> impl Strategy<Value = Digraph> {
    (1..9usize).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |arcs| Digraph::from_arcs(n, &arcs).unwrap())
    })
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn bfs_matches_floyd(g in random_digraph()) {
        let dist = floyd(&g);
        let n = g.vertex_count();
        for s in 0..n {
            for t in 0..n {
                prop_assert_eq!(directed_distance(&g, s, t).unwrap(), dist[s][t]);
            }
        }
    }

    #[test]
    fn hessenberg_ordering_iff_distance_d(g in random_digraph()) {
        let n = g.vertex_count();
        let dist = floyd(&g);
        for s in 0..n {
            for t in 0..n {
                let ord = hessenberg_ordering(&g, s, t).unwrap();
                prop_assert_eq!(ord.is_some(), dist[s][t] == Some(n - 1));
                if let Some(ord) = ord {
                    prop_assert_eq!(ord[0], t);
                    prop_assert_eq!(ord[n - 1], s);
                    let a = Matrix::from_fn(n, |i, j| if g.has_arc(i, j) { 1.0 } else { 0.0 });
                    prop_assert!(is_hessenberg(&a.permuted(&ord), &Tolerance::default()));
                }
            }
        }
    }

    #[test]
    fn tridiagonal_pattern_is_the_natural_path(d in 0..12usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Tridiagonal, d, seed, None);
        prop_assert!(is_irreducible_tridiagonal(&a, &tol));
        let path = bidirected_path_endpoints(&gamma(&a, &tol, false)).unwrap();
        prop_assert_eq!(path, (0..=d).collect::<Vec<_>>());
    }

    #[test]
    fn path_recognition_is_permutation_invariant(d in 0..12usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Tridiagonal, d, seed, None);
        let perm = gen_permutation(d + 1, seed.wrapping_add(1));
        let b = a.permuted(&perm);
        let path = bidirected_path_endpoints(&gamma(&b, &tol, false)).unwrap();
        prop_assert!(is_irreducible_tridiagonal(&b.permuted(&path), &tol));
        // the path is perm read forwards or backwards
        let image: Vec<usize> = (0..=d).map(|i| perm.iter().position(|&p| p == i).unwrap()).collect();
        let mut reversed = image.clone();
        reversed.reverse();
        prop_assert!(path == image || path == reversed);
    }

    #[test]
    fn extra_chord_breaks_the_path(d in 2..10usize, seed in any::<u64>(), i in 0..10usize, j in 0..10usize) {
        let tol = Tolerance::default();
        let (i, j) = (i % (d + 1), j % (d + 1));
        prop_assume!(i.abs_diff(j) > 1);
        let mut a = gen_instance(InstanceKind::Tridiagonal, d, seed, None);
        a[(i, j)] = 1.0;
        prop_assert!(!is_irreducible_tridiagonal(&a, &tol));
        prop_assert!(bidirected_path_endpoints(&gamma(&a, &tol, false)).is_none());
    }

    #[test]
    fn hessenberg_instances_have_distance_d(d in 0..10usize, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = gen_instance(InstanceKind::Hessenberg, d, seed, None);
        prop_assert!(is_hessenberg(&a, &tol));
        let g = gamma(&a, &tol, false);
        prop_assert_eq!(directed_distance(&g, d, 0).unwrap(), Some(d));
        prop_assert_eq!(hessenberg_ordering(&g, d, 0).unwrap(), Some((0..=d).collect::<Vec<_>>()));
    }
}

#[test]
fn loops_only_with_flag() {
    let a = Matrix::from_rows(&[[2.0, 1.0], [0.0, 0.0]]).unwrap();
    let tol = Tolerance::default();
    assert!(!gamma(&a, &tol, false).has_arc(0, 0));
    assert!(gamma(&a, &tol, true).has_arc(0, 0));
    assert_eq!(gamma(&a, &tol, true).arc_count(), 2);
    assert!(directed_distance(&gamma(&a, &tol, false), 0, 5).is_err());
}
