//! Bitset-backed clique enumeration and maximum-clique search.
//!
//! Graphs here are small (at most a few hundred vertices: flats filtered
//! against an information set), so adjacency rows are flat `u64` slices.
//! Cliques are enumerated by ordered extension - each clique is visited
//! exactly once with its vertices ascending - with a greedy-colouring
//! bound to prune subtrees that cannot reach the requested size.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone)]
pub(crate) struct BitGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl BitGraph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitGraph {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        debug_assert_ne!(i, j);
        self.adj[i * self.words + (j >> 6)] |= 1 << (j & 63);
        self.adj[j * self.words + (i >> 6)] |= 1 << (i & 63);
    }

    #[cfg(test)]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words + (j >> 6)] >> (j & 63) & 1 == 1
    }

    pub fn neighbors(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    pub fn full_mask(&self) -> Vec<u64> {
        let mut mask = vec![0u64; self.words];
        for v in 0..self.n {
            mask[v >> 6] |= 1 << (v & 63);
        }
        mask
    }
}

#[inline]
pub(crate) fn popcount(mask: &[u64]) -> usize {
    mask.iter().map(|w| w.count_ones() as usize).sum()
}

/// Iterates set bits ascending.
pub(crate) fn for_each_bit(mask: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in mask.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            f((wi << 6) | w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

const MAX_COLORS: usize = 96;

/// Greedy-colouring upper bound on the largest clique inside `mask`,
/// clamped at `cap`. `colors` is a reusable buffer of `MAX_COLORS` classes.
fn color_bound(g: &BitGraph, colors: &mut [u64], mask: &[u64], cap: usize) -> usize {
    let words = g.words;
    let mut used = 0usize;
    let mut bound = 0usize;
    let mut done = false;
    for_each_bit(mask, |v| {
        if done {
            return;
        }
        let nv = g.neighbors(v);
        let mut placed = false;
        for c in 0..used {
            let class = &mut colors[c * words..(c + 1) * words];
            if class.iter().zip(nv).all(|(&cl, &n)| cl & n == 0) {
                class[v >> 6] |= 1 << (v & 63);
                placed = true;
                break;
            }
        }
        if !placed {
            if used == MAX_COLORS {
                bound = cap;
                done = true;
                return;
            }
            let class = &mut colors[used * words..(used + 1) * words];
            class.fill(0);
            class[v >> 6] |= 1 << (v & 63);
            used += 1;
            bound += 1;
            if bound >= cap {
                done = true;
            }
        }
    });
    bound
}

/// Depth-first clique search over one graph with preallocated scratch.
pub(crate) struct CliqueSearch<'g> {
    g: &'g BitGraph,
    levels: Vec<u64>,       // one candidate mask per recursion depth
    colors: Vec<u64>,       // MAX_COLORS colour classes
    stack: Vec<usize>,
    pub nodes: u64,
}

impl<'g> CliqueSearch<'g> {
    pub fn new(g: &'g BitGraph) -> Self {
        CliqueSearch {
            g,
            levels: vec![0; g.words * (g.n + 2)],
            colors: vec![0; g.words * MAX_COLORS],
            stack: Vec::with_capacity(g.n),
            nodes: 0,
        }
    }

    /// Visits every clique of size at least `min_size` exactly once
    /// (vertex stack ascending).
    pub fn visit_cliques(&mut self, min_size: usize, mut f: impl FnMut(&[usize])) {
        let full = self.g.full_mask();
        let words = self.g.words;
        self.levels[..words].copy_from_slice(&full);
        self.stack.clear();
        self.recurse(0, min_size, &mut f);
    }

    fn recurse(&mut self, depth: usize, min_size: usize, f: &mut impl FnMut(&[usize])) {
        let words = self.g.words;
        let lo = depth * words;
        for wi in 0..words {
            let mut w = self.levels[lo + wi];
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                let v = (wi << 6) | bit;
                self.nodes += 1;
                self.stack.push(v);
                if self.stack.len() >= min_size {
                    f(&self.stack);
                }
                // Candidates after v: neighbours of v among the current
                // candidates, restricted to indices above v.
                let nv_lo = v * words;
                let next_lo = (depth + 1) * words;
                let mut avail = 0usize;
                for k in 0..words {
                    let mut x = self.levels[lo + k] & self.g.adj[nv_lo + k];
                    if k < wi {
                        x = 0;
                    } else if k == wi {
                        x &= !((1u64 << bit) | ((1u64 << bit) - 1));
                    }
                    self.levels[next_lo + k] = x;
                    avail += x.count_ones() as usize;
                }
                if avail > 0 {
                    let needed = min_size.saturating_sub(self.stack.len());
                    let go = if needed <= 2 {
                        true
                    } else if avail < needed {
                        false
                    } else {
                        color_bound(
                            self.g,
                            &mut self.colors,
                            &self.levels[next_lo..next_lo + words],
                            needed,
                        ) >= needed
                    };
                    if go {
                        self.recurse(depth + 1, min_size, f);
                    }
                }
                self.stack.pop();
            }
        }
    }

    /// True if the subgraph induced by `mask` contains a clique of size
    /// `target`; stops at the first witness.
    pub fn has_clique(&mut self, mask: &[u64], target: usize) -> bool {
        if target == 0 {
            return true;
        }
        let words = self.g.words;
        self.levels[..words].copy_from_slice(mask);
        self.stack.clear();
        self.seek(0, target)
    }

    fn seek(&mut self, depth: usize, needed: usize) -> bool {
        if needed == 0 {
            return true;
        }
        let words = self.g.words;
        let lo = depth * words;
        if popcount(&self.levels[lo..lo + words]) < needed {
            return false;
        }
        if needed >= 3
            && color_bound(
                self.g,
                &mut self.colors,
                &self.levels[lo..lo + words],
                needed,
            ) < needed
        {
            return false;
        }
        for wi in 0..words {
            let mut w = self.levels[lo + wi];
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                let v = (wi << 6) | bit;
                self.nodes += 1;
                let nv_lo = v * words;
                let next_lo = (depth + 1) * words;
                for k in 0..words {
                    let mut x = self.levels[lo + k] & self.g.adj[nv_lo + k];
                    if k < wi {
                        x = 0;
                    } else if k == wi {
                        x &= !((1u64 << bit) | ((1u64 << bit) - 1));
                    }
                    self.levels[next_lo + k] = x;
                }
                if self.seek(depth + 1, needed - 1) {
                    return true;
                }
            }
        }
        false
    }

    /// Size of the largest clique in the whole graph.
    pub fn max_clique_size(&mut self) -> usize {
        let full = self.g.full_mask();
        let mut best = 0;
        while best < self.g.len() && self.has_clique(&full, best + 1) {
            best += 1;
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    fn complete(n: usize) -> BitGraph {
        let mut g = BitGraph::new(n);
        for i in 0..n {
            for j in 0..i {
                g.add_edge(i, j);
            }
        }
        g
    }

    #[test]
    fn complete_graph_census() {
        // K_6 has C(6, s) cliques of size s.
        let g = complete(6);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        CliqueSearch::new(&g).visit_cliques(1, |c| *counts.entry(c.len()).or_default() += 1);
        for s in 1..=6 {
            assert_eq!(counts[&s], crate::code::binomial(6, s as u32));
        }
        assert_eq!(CliqueSearch::new(&g).max_clique_size(), 6);
    }

    #[test]
    fn cycle_graph() {
        // C_5: 5 edges, no triangle.
        let mut g = BitGraph::new(5);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5);
        }
        let mut edges = 0;
        CliqueSearch::new(&g).visit_cliques(2, |c| {
            assert_eq!(c.len(), 2);
            edges += 1;
        });
        assert_eq!(edges, 5);
        let mut s = CliqueSearch::new(&g);
        assert_eq!(s.max_clique_size(), 2);
        let full = g.full_mask();
        assert!(!s.has_clique(&full, 3));
        assert!(s.has_clique(&full, 2));
    }

    #[test]
    fn min_size_pruning_matches_unpruned() {
        // Deterministic pseudo-random graph on 20 vertices; a census with
        // min_size pruning must agree with the post-filtered full census.
        let mut g = BitGraph::new(20);
        let mut state = 0x9e3779b97f4a7c15u64;
        for i in 0..20 {
            for j in 0..i {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                if state >> 40 & 1 == 1 {
                    g.add_edge(i, j);
                }
            }
        }
        let mut full: BTreeMap<usize, u64> = BTreeMap::new();
        CliqueSearch::new(&g).visit_cliques(1, |c| *full.entry(c.len()).or_default() += 1);
        let mut filtered: BTreeMap<usize, u64> = BTreeMap::new();
        CliqueSearch::new(&g).visit_cliques(4, |c| *filtered.entry(c.len()).or_default() += 1);
        for (s, count) in &filtered {
            assert!(*s >= 4);
            assert_eq!(full[s], *count);
        }
        for (s, count) in &full {
            if *s >= 4 {
                assert_eq!(filtered[s], *count);
            }
        }
        let max_from_census = full.keys().max().copied().unwrap_or(0);
        assert_eq!(CliqueSearch::new(&g).max_clique_size(), max_from_census);
    }

    #[test]
    fn vertex_count_above_64_uses_two_words() {
        // K_70 minus one edge: exercises the multi-limb path.
        let mut g = BitGraph::new(70);
        for i in 0..70 {
            for j in 0..i {
                if !(i == 69 && j == 68) {
                    g.add_edge(i, j);
                }
            }
        }
        assert_eq!(g.words(), 2);
        assert!(g.has_edge(0, 69));
        assert!(!g.has_edge(68, 69));
        assert_eq!(CliqueSearch::new(&g).max_clique_size(), 69);
    }
}
