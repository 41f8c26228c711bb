//! Generators for named polynomial families.
//!
//! Matrix variables are numbered row-major: `x_{i,j}` (0-based) is variable
//! `i·n + j`. Graph edge variables follow edge-list order.

use crate::error::{Error, Result};
use crate::poly::TropPoly;
use crate::semiring::{SemiringMode, TropValue};

/// A graph whose edges carry cost variables (variable index = position in
/// the edge list).
#[derive(Debug, Clone)]
pub struct CostGraph {
    pub vertices: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize)>,
}

impl CostGraph {
    pub fn new(vertices: usize, directed: bool) -> Self {
        CostGraph {
            vertices,
            directed,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<usize> {
        if u >= self.vertices || v >= self.vertices {
            return Err(Error::InvalidInput(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.vertices
            )));
        }
        if u == v || self.edges.contains(&(u, v)) || (!self.directed && self.edges.contains(&(v, u)))
        {
            return Err(Error::InvalidInput(format!("edge ({u}, {v}) not simple")));
        }
        self.edges.push((u, v));
        Ok(self.edges.len() - 1)
    }

    /// Complete graph on `n` vertices (undirected).
    pub fn complete(n: usize) -> Self {
        let mut g = CostGraph::new(n, false);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).expect("complete graph edges are simple");
            }
        }
        g
    }

    /// Complete bipartite graph with parts of sizes `a` and `b`
    /// (vertices `0..a` and `a..a+b`).
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = CostGraph::new(a + b, false);
        for u in 0..a {
            for v in 0..b {
                g.add_edge(u, a + v).expect("bipartite edges are simple");
            }
        }
        g
    }

    fn neighbors(&self, u: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (idx, &(a, b)) in self.edges.iter().enumerate() {
            if a == u {
                out.push((b, idx));
            } else if !self.directed && b == u {
                out.push((a, idx));
            }
        }
        out
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    fn heap(k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(current.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, current, out);
            if k % 2 == 0 {
                current.swap(i, k - 1);
            } else {
                current.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut current, &mut out);
    out.sort();
    out
}

fn perm_monomial(n: usize, sigma: &[usize]) -> Vec<u32> {
    let mut exps = vec![0u32; n * n];
    for (i, &j) in sigma.iter().enumerate() {
        exps[i * n + j] = 1;
    }
    exps
}

/// `perm_n = ⊕_{σ ∈ S_n} x_{1,σ(1)} ⊗ … ⊗ x_{n,σ(n)}` over `n²` variables,
/// all coefficients 0.
pub fn perm_poly(mode: SemiringMode, n: usize) -> Result<TropPoly> {
    if n == 0 || n > 6 {
        return Err(Error::BudgetExceeded(format!(
            "perm_poly supports 1 ≤ n ≤ 6, got {n}"
        )));
    }
    let mut p = TropPoly::empty(mode, n * n);
    for sigma in permutations(n) {
        p.insert_term(perm_monomial(n, &sigma), &TropValue::zero())?;
    }
    Ok(p)
}

fn is_cyclic(sigma: &[usize]) -> bool {
    let n = sigma.len();
    let mut seen = 1usize;
    let mut at = sigma[0];
    while at != 0 {
        seen += 1;
        at = sigma[at];
        if seen > n {
            return false;
        }
    }
    seen == n
}

/// The Hamiltonian-cycle polynomial: one monomial per cyclic permutation
/// of `[n]`, i.e. `(n−1)!` monomials.
pub fn hc_poly(mode: SemiringMode, n: usize) -> Result<TropPoly> {
    if n < 2 || n > 6 {
        return Err(Error::BudgetExceeded(format!(
            "hc_poly supports 2 ≤ n ≤ 6, got {n}"
        )));
    }
    let mut p = TropPoly::empty(mode, n * n);
    for sigma in permutations(n) {
        if is_cyclic(&sigma) {
            p.insert_term(perm_monomial(n, &sigma), &TropValue::zero())?;
        }
    }
    Ok(p)
}

/// One coefficient-0 monomial per simple `s`-to-`t` path of `g`.
pub fn shortest_path_poly(
    mode: SemiringMode,
    g: &CostGraph,
    s: usize,
    t: usize,
    max_paths: usize,
) -> Result<TropPoly> {
    if s >= g.vertices || t >= g.vertices {
        return Err(Error::InvalidInput("s or t out of range".into()));
    }
    let mut p = TropPoly::empty(mode, g.edges.len());
    let mut visited = vec![false; g.vertices];
    let mut path_edges: Vec<usize> = Vec::new();
    let mut count = 0usize;

    fn dfs(
        g: &CostGraph,
        at: usize,
        t: usize,
        visited: &mut Vec<bool>,
        path_edges: &mut Vec<usize>,
        p: &mut TropPoly,
        count: &mut usize,
        max_paths: usize,
    ) -> Result<()> {
        if at == t {
            *count += 1;
            if *count > max_paths {
                return Err(Error::BudgetExceeded(format!(
                    "more than {max_paths} s-t paths"
                )));
            }
            let mut exps = vec![0u32; g.edges.len()];
            for &e in path_edges.iter() {
                exps[e] += 1;
            }
            p.insert_term(exps, &TropValue::zero())?;
            return Ok(());
        }
        visited[at] = true;
        for (next, edge) in g.neighbors(at) {
            if !visited[next] {
                path_edges.push(edge);
                dfs(g, next, t, visited, path_edges, p, count, max_paths)?;
                path_edges.pop();
            }
        }
        visited[at] = false;
        Ok(())
    }

    dfs(g, s, t, &mut visited, &mut path_edges, &mut p, &mut count, max_paths)?;
    Ok(p)
}

/// One coefficient-0 monomial per `k`-edge matching of `g`.
pub fn k_matching_poly(
    mode: SemiringMode,
    g: &CostGraph,
    k: usize,
    max_matchings: usize,
) -> Result<TropPoly> {
    let mut p = TropPoly::empty(mode, g.edges.len());
    let mut chosen: Vec<usize> = Vec::new();
    let mut used = vec![false; g.vertices];
    let mut count = 0usize;

    fn dfs(
        g: &CostGraph,
        start: usize,
        k: usize,
        chosen: &mut Vec<usize>,
        used: &mut Vec<bool>,
        p: &mut TropPoly,
        count: &mut usize,
        max_matchings: usize,
    ) -> Result<()> {
        if chosen.len() == k {
            *count += 1;
            if *count > max_matchings {
                return Err(Error::BudgetExceeded(format!(
                    "more than {max_matchings} matchings"
                )));
            }
            let mut exps = vec![0u32; g.edges.len()];
            for &e in chosen.iter() {
                exps[e] = 1;
            }
            p.insert_term(exps, &TropValue::zero())?;
            return Ok(());
        }
        for e in start..g.edges.len() {
            let (u, v) = g.edges[e];
            if used[u] || used[v] {
                continue;
            }
            used[u] = true;
            used[v] = true;
            chosen.push(e);
            dfs(g, e + 1, k, chosen, used, p, count, max_matchings)?;
            chosen.pop();
            used[u] = false;
            used[v] = false;
        }
        Ok(())
    }

    dfs(g, 0, k, &mut chosen, &mut used, &mut p, &mut count, max_matchings)?;
    Ok(p)
}

/// `(x_1 ⊗ y_1) ⊕ … ⊕ (x_k ⊗ y_k)` over `2k` variables ordered
/// `x_1, …, x_k, y_1, …, y_k`.
pub fn inner_product_poly(mode: SemiringMode, k: usize) -> Result<TropPoly> {
    let mut p = TropPoly::empty(mode, 2 * k);
    for i in 0..k {
        let mut exps = vec![0u32; 2 * k];
        exps[i] = 1;
        exps[k + i] = 1;
        p.insert_term(exps, &TropValue::zero())?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_poly_counts() {
        assert_eq!(perm_poly(SemiringMode::R, 1).unwrap().term_count(), 1);
        assert_eq!(perm_poly(SemiringMode::R, 2).unwrap().term_count(), 2);
        assert_eq!(perm_poly(SemiringMode::R, 3).unwrap().term_count(), 6);
        assert!(perm_poly(SemiringMode::R, 7).is_err());
    }

    #[test]
    fn perm_poly_layout() {
        // n = 2: (x00·x11) ⊕ (x01·x10) in row-major numbering.
        let p = perm_poly(SemiringMode::R, 2).unwrap();
        let expected = TropPoly::from_ints(
            SemiringMode::R,
            4,
            &[(&[1, 0, 0, 1], 0), (&[0, 1, 1, 0], 0)],
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn perm_poly_evaluations() {
        let p = perm_poly(SemiringMode::R, 3).unwrap();
        let zeros = vec![TropValue::zero(); 9];
        assert_eq!(p.eval(&zeros).unwrap(), TropValue::zero());

        // Row 0 all ∞ kills every permutation.
        let mut blocked = vec![TropValue::zero(); 9];
        for j in 0..3 {
            blocked[j] = TropValue::Infinity;
        }
        assert_eq!(p.eval(&blocked).unwrap(), TropValue::Infinity);
    }

    #[test]
    fn hc_poly_counts() {
        assert_eq!(hc_poly(SemiringMode::R, 2).unwrap().term_count(), 1);
        assert_eq!(hc_poly(SemiringMode::R, 3).unwrap().term_count(), 2);
        assert_eq!(hc_poly(SemiringMode::R, 4).unwrap().term_count(), 6);

        let p2 = hc_poly(SemiringMode::R, 2).unwrap();
        let expected =
            TropPoly::from_ints(SemiringMode::R, 4, &[(&[0, 1, 1, 0], 0)]);
        assert_eq!(p2, expected);
    }

    #[test]
    fn shortest_path_k23() {
        // K_{2,3} with s, t the two vertices of the 2-side.
        let g = CostGraph::complete_bipartite(2, 3);
        let p = shortest_path_poly(SemiringMode::R, &g, 0, 1, 100).unwrap();
        assert_eq!(p.term_count(), 3);
        for (exps, _) in p.terms() {
            assert_eq!(exps.iter().sum::<u32>(), 2, "paths have two edges");
        }
    }

    #[test]
    fn two_matchings_of_k4() {
        let g = CostGraph::complete(4);
        let p = k_matching_poly(SemiringMode::R, &g, 2, 100).unwrap();
        assert_eq!(p.term_count(), 3);
    }

    #[test]
    fn k4_matchings_match_inner_product_after_renaming() {
        let g = CostGraph::complete(4);
        let matchings = k_matching_poly(SemiringMode::R, &g, 2, 100).unwrap();
        let target = inner_product_poly(SemiringMode::R, 3).unwrap();

        // Each 2-matching pairs an edge with its complement; renaming
        // edge variables to (x_i, y_i) pairs must reproduce the target.
        let mut rename = vec![usize::MAX; 6];
        for (i, (exps, _)) in matchings.terms().enumerate() {
            let pair: Vec<usize> = exps
                .iter()
                .enumerate()
                .filter(|(_, e)| **e == 1)
                .map(|(v, _)| v)
                .collect();
            rename[pair[0]] = i;
            rename[pair[1]] = 3 + i;
        }
        let mut renamed = TropPoly::empty(SemiringMode::R, 6);
        for (exps, _) in matchings.terms() {
            let mut new_exps = vec![0u32; 6];
            for (v, e) in exps.iter().enumerate() {
                if *e > 0 {
                    new_exps[rename[v]] = *e;
                }
            }
            renamed.insert_term(new_exps, &TropValue::zero()).unwrap();
        }
        assert!(renamed.func_equal(&target).unwrap());
    }

    #[test]
    fn inner_product_shape() {
        let p = inner_product_poly(SemiringMode::R, 3).unwrap();
        assert_eq!(p.term_count(), 3);
        assert_eq!(p.arity(), 6);
    }
}
