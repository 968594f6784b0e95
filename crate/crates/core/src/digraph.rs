//! Nonzero-pattern digraphs of square matrices.
//!
//! `gamma(A)` has an arc `i -> j` whenever `A[i][j]` is nonzero; loops are
//! kept only on request. Distances are BFS lengths with neighbours expanded
//! in ascending order so that every reconstructed path is deterministic.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{Matrix, Tolerance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DigraphError {
    #[error("vertex {vertex} out of range for a digraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("constructed ordering {ordering:?} violates the Hessenberg conditions")]
    OrderingContradiction { ordering: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Digraph {
    n: usize,
    out_adj: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds a digraph from an arc list, dropping duplicates.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, DigraphError> {
        let mut out_adj = vec![Vec::new(); n];
        for &(i, j) in arcs {
            for v in [i, j] {
                if v >= n {
                    return Err(DigraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            out_adj[i].push(j);
        }
        for list in &mut out_adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { n, out_adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.out_adj[i].binary_search(&j).is_ok()
    }

    pub fn arc_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj.iter().enumerate().flat_map(|(i, l)| l.iter().map(move |&j| (i, j)))
    }

    fn check_vertex(&self, v: usize) -> Result<(), DigraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(DigraphError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }
}

/// Pattern digraph of `a`: arc `i -> j` iff `|a[i][j]| > zero_tol`, and
/// `i != j` unless `with_loops` is set.
pub fn gamma(a: &Matrix, tol: &Tolerance, with_loops: bool) -> Digraph {
    let n = a.order();
    let out_adj =
        (0..n).map(|i| (0..n).filter(|&j| (with_loops || i != j) && tol.is_nonzero(a[(i, j)])).collect()).collect();
    Digraph { n, out_adj }
}

/// BFS parents from `s`; `None` marks unreached vertices.
fn bfs_parents(g: &Digraph, s: usize) -> Vec<Option<usize>> {
    let mut parent = vec![None; g.n];
    let mut seen = vec![false; g.n];
    seen[s] = true;
    parent[s] = Some(s);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &w in &g.out_adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    parent
}

/// A shortest directed path `s = p_0, ..., p_k = t`, if one exists.
pub fn shortest_path(g: &Digraph, s: usize, t: usize) -> Result<Option<Vec<usize>>, DigraphError> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    let parent = bfs_parents(g, s);
    if parent[t].is_none() {
        return Ok(None);
    }
    let mut path = vec![t];
    let mut v = t;
    while v != s {
        v = parent[v].expect("reached vertices have parents");
        path.push(v);
    }
    path.reverse();
    Ok(Some(path))
}

/// Directed distance; `None` when `t` is unreachable from `s`.
pub fn directed_distance(g: &Digraph, s: usize, t: usize) -> Result<Option<usize>, DigraphError> {
    Ok(shortest_path(g, s, t)?.map(|p| p.len() - 1))
}

/// Recognizes a bidirected path through all vertices.
///
/// Loops are ignored. Returns the vertex sequence starting at the
/// lower-numbered endpoint, or `None` when the graph is not such a path.
pub fn bidirected_path_endpoints(g: &Digraph) -> Option<Vec<usize>> {
    let n = g.n;
    if n == 1 {
        return Some(vec![0]);
    }
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in g.arcs() {
        if i == j {
            continue;
        }
        if !g.has_arc(j, i) {
            return None;
        }
        neighbors[i].push(j);
    }
    let mut endpoints = Vec::new();
    for (v, nb) in neighbors.iter().enumerate() {
        match nb.len() {
            1 => endpoints.push(v),
            2 => {}
            _ => return None,
        }
    }
    if endpoints.len() != 2 {
        return None;
    }
    let mut order = Vec::with_capacity(n);
    let mut prev = usize::MAX;
    let mut cur = endpoints[0];
    loop {
        order.push(cur);
        if order.len() > n {
            return None;
        }
        match neighbors[cur].iter().find(|&&w| w != prev) {
            Some(&next) => {
                prev = cur;
                cur = next;
            }
            None => break,
        }
    }
    // a degree-sequence match can still hide a path plus disjoint cycles
    (order.len() == n).then_some(order)
}

/// Checks `x_i -> x_j` when `i - j = 1` and no arc when `i - j > 1`.
pub fn is_hessenberg_ordering(g: &Digraph, ordering: &[usize]) -> bool {
    let n = ordering.len();
    for i in 0..n {
        for j in 0..i {
            let arc = g.has_arc(ordering[i], ordering[j]);
            if (i - j == 1) != arc {
                return false;
            }
        }
    }
    true
}

/// Hessenberg ordering with `x_0 = t` and `x_d = s`, present exactly when
/// the directed distance from `s` to `t` is `d = n - 1`.
pub fn hessenberg_ordering(g: &Digraph, s: usize, t: usize) -> Result<Option<Vec<usize>>, DigraphError> {
    let Some(path) = shortest_path(g, s, t)? else {
        return Ok(None);
    };
    if path.len() != g.n {
        return Ok(None);
    }
    let ordering: Vec<usize> = path.into_iter().rev().collect();
    if !is_hessenberg_ordering(g, &ordering) {
        return Err(DigraphError::OrderingContradiction { ordering });
    }
    Ok(Some(ordering))
}

/// Tridiagonal with every sub- and superdiagonal entry nonzero.
pub fn is_irreducible_tridiagonal(a: &Matrix, tol: &Tolerance) -> bool {
    let n = a.order();
    for i in 0..n {
        for j in 0..n {
            let nz = tol.is_nonzero(a[(i, j)]);
            match i.abs_diff(j) {
                0 => {}
                1 if !nz => return false,
                d if d > 1 && nz => return false,
                _ => {}
            }
        }
    }
    true
}

/// Zero below the subdiagonal, nonzero on it.
pub fn is_hessenberg(a: &Matrix, tol: &Tolerance) -> bool {
    let n = a.order();
    for i in 0..n {
        for j in 0..i {
            let nz = tol.is_nonzero(a[(i, j)]);
            if (i - j == 1) != nz {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn path3() -> Matrix {
        m(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]])
    }

    #[test]
    fn gamma_examples() {
        let tol = Tolerance::default();
        assert_eq!(gamma(&Matrix::zeros(3), &tol, true).arc_count(), 0);

        let g = gamma(&m(&[&[5.0, 1.0], &[0.0, 2.0]]), &tol, false);
        assert_eq!(g.arcs().collect::<Vec<_>>(), vec![(0, 1)]);
        let gl = gamma(&m(&[&[5.0, 1.0], &[0.0, 2.0]]), &tol, true);
        assert_eq!(gl.arcs().collect::<Vec<_>>(), vec![(0, 0), (0, 1), (1, 1)]);

        let g = gamma(&path3(), &tol, false);
        assert_eq!(g.arcs().collect::<Vec<_>>(), vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn gamma_honours_zero_tol() {
        let tol = Tolerance::default();
        let g = gamma(&m(&[&[0.0, 1e-12], &[1.0, 0.0]]), &tol, false);
        assert_eq!(g.arcs().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn distance_examples() {
        let tol = Tolerance::default();
        let g = gamma(&path3(), &tol, false);
        assert_eq!(directed_distance(&g, 1, 1).unwrap(), Some(0));
        assert_eq!(directed_distance(&g, 0, 2).unwrap(), Some(2));
        let g = Digraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(directed_distance(&g, 0, 2).unwrap(), Some(1));
        assert_eq!(directed_distance(&g, 2, 0).unwrap(), None);
        assert!(directed_distance(&g, 0, 3).is_err());
    }

    #[test]
    fn path_recognition_examples() {
        let g = Digraph::from_arcs(1, &[]).unwrap();
        assert_eq!(bidirected_path_endpoints(&g), Some(vec![0]));

        let g = Digraph::from_arcs(3, &[(0, 2), (2, 0), (2, 1), (1, 2)]).unwrap();
        assert_eq!(bidirected_path_endpoints(&g), Some(vec![0, 2, 1]));

        let g = Digraph::from_arcs(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(bidirected_path_endpoints(&g), None);
    }

    #[test]
    fn path_recognition_rejects_path_plus_cycle() {
        // 0-1 path together with a triangle 2-3-4: degree counts alone look fine
        let mut arcs = vec![(0, 1), (1, 0)];
        for (a, b) in [(2, 3), (3, 4), (4, 2)] {
            arcs.push((a, b));
            arcs.push((b, a));
        }
        let g = Digraph::from_arcs(5, &arcs).unwrap();
        assert_eq!(bidirected_path_endpoints(&g), None);
    }

    #[test]
    fn path_recognition_ignores_loops() {
        let g = Digraph::from_arcs(2, &[(0, 0), (0, 1), (1, 0)]).unwrap();
        assert_eq!(bidirected_path_endpoints(&g), Some(vec![0, 1]));
        let g = Digraph::from_arcs(2, &[]).unwrap();
        assert_eq!(bidirected_path_endpoints(&g), None);
    }

    #[test]
    fn hessenberg_ordering_examples() {
        let tol = Tolerance::default();
        let g = gamma(&path3(), &tol, false);
        assert_eq!(hessenberg_ordering(&g, 2, 0).unwrap(), Some(vec![0, 1, 2]));

        let g = Digraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(hessenberg_ordering(&g, 0, 2).unwrap(), None);

        let g = Digraph::from_arcs(1, &[]).unwrap();
        assert_eq!(hessenberg_ordering(&g, 0, 0).unwrap(), Some(vec![0]));
    }

    #[test]
    fn pattern_predicates() {
        let tol = Tolerance::default();
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(is_irreducible_tridiagonal(&a, &tol) && is_hessenberg(&a, &tol));
        let a = m(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(!is_irreducible_tridiagonal(&a, &tol) && is_hessenberg(&a, &tol));
        let a = m(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        assert!(!is_irreducible_tridiagonal(&a, &tol) && !is_hessenberg(&a, &tol));
        let one = m(&[&[7.0]]);
        assert!(is_irreducible_tridiagonal(&one, &tol) && is_hessenberg(&one, &tol));
    }
}
