//! Canonical ordering of colored molecular graphs via
//! individualization–refinement, plus a brute-force isomorphism oracle and
//! the alternative ordering strategies used for ablations.
//!
//! [`canonical_order`] produces a certificate that is equal for two graphs
//! exactly when they are isomorphic (colors, edges, and bond orders
//! preserved). [`geometric_canonical_order`] additionally pins automorphic
//! ties with SE(3)-invariant geometric signatures so that the resulting atom
//! order is a pure function of the unlabeled 3D structure.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::molgraph::ColoredGraph;
use crate::vec3::Vec3;

/// A canonical ordering: `perm[i]` is the original index of the vertex
/// labeled `i`, and `certificate` identifies the isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalOrder {
    pub perm: Vec<usize>,
    pub certificate: Vec<u8>,
}

/// An ordered partition of the vertices into disjoint, nonempty cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<Vec<usize>>,
}

impl Partition {
    /// Single cell holding every vertex.
    pub fn unit(n: usize) -> Self {
        Partition {
            cells: if n == 0 {
                vec![]
            } else {
                vec![(0..n).collect()]
            },
        }
    }

    /// Cells grouped by color, ordered by ascending color value.
    pub fn from_colors(colors: &[u32]) -> Self {
        let mut by_color: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            by_color.entry(c).or_default().push(v);
        }
        Partition {
            cells: by_color.into_values().collect(),
        }
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 1)
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// For a discrete partition, the labeling it defines.
    fn to_perm(&self) -> Vec<usize> {
        debug_assert!(self.is_discrete());
        self.cells.iter().map(|c| c[0]).collect()
    }

    /// Splits cell `cell_idx` so `{v}` precedes the remaining vertices.
    fn individualize(&self, cell_idx: usize, v: usize) -> Partition {
        let mut cells = Vec::with_capacity(self.cells.len() + 1);
        for (i, cell) in self.cells.iter().enumerate() {
            if i == cell_idx {
                cells.push(vec![v]);
                cells.push(cell.iter().copied().filter(|&u| u != v).collect());
            } else {
                cells.push(cell.clone());
            }
        }
        Partition { cells }
    }
}

/// Per-vertex signature inside a cell: own color plus the multiset of
/// (neighbor cell, bond order) counts.
type Signature = (u32, Vec<(usize, u8, u32)>);

fn signature(v: usize, colors: &[u32], adj: &[Vec<(usize, u8)>], cell_of: &[usize]) -> Signature {
    let mut counts: BTreeMap<(usize, u8), u32> = BTreeMap::new();
    for &(u, order) in &adj[v] {
        *counts.entry((cell_of[u], order)).or_insert(0) += 1;
    }
    (
        colors[v],
        counts.into_iter().map(|((c, o), k)| (c, o, k)).collect(),
    )
}

/// Coarsest equitable refinement of `p`: vertices sharing a cell have equal
/// color and equal multisets of (cell, bond-order) neighbor counts. Cells only
/// split (never merge), sub-cells are ordered by ascending signature, and the
/// operation is idempotent.
pub fn refine(g: &ColoredGraph, p: &Partition) -> Partition {
    refine_with_adj(g, &g.adjacency(), p)
}

fn refine_with_adj(g: &ColoredGraph, adj: &[Vec<(usize, u8)>], p: &Partition) -> Partition {
    let n = g.vertex_count();
    let colors = g.colors();
    let mut cells = p.cells.clone();
    loop {
        let mut cell_of = vec![0usize; n];
        for (ci, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v] = ci;
            }
        }
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
        let mut changed = false;
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Signature, usize)> = cell
                .iter()
                .map(|&v| (signature(v, colors, adj, &cell_of), v))
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                    if i - start != cell.len() {
                        changed = true;
                    }
                    start = i;
                }
            }
        }
        cells = next;
        if !changed {
            return Partition { cells };
        }
    }
}

/// Canonical form of `g` under a labeling: vertex count, colors by label, and
/// the upper-triangle bond orders by label. Big-endian fields keep byte-wise
/// and numeric comparison consistent.
fn form_bytes(g: &ColoredGraph, perm: &[usize]) -> Vec<u8> {
    let n = g.vertex_count();
    let mut out = Vec::with_capacity(4 + 4 * n + n * (n - 1) / 2);
    out.extend_from_slice(&(n as u32).to_be_bytes());
    for &v in perm {
        out.extend_from_slice(&g.colors()[v].to_be_bytes());
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(g.order_between(perm[i], perm[j]));
        }
    }
    out
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, v: usize) -> usize {
        if self.parent[v] != v {
            let root = self.find(self.parent[v]);
            self.parent[v] = root;
        }
        self.parent[v]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Discovered automorphisms kept for branch pruning; beyond this the search
/// falls back to exploring (correct either way, only slower).
const MAX_STORED_AUTOMORPHISMS: usize = 64;

struct Search<'a> {
    g: &'a ColoredGraph,
    adj: Vec<Vec<(usize, u8)>>,
    best_form: Option<Vec<u8>>,
    best_perm: Vec<usize>,
    /// Vertices individualized along the current search path.
    path: Vec<usize>,
    /// Orbits under all discovered automorphisms; prunes the root cell.
    orbits: DisjointSet,
    /// Individual automorphisms (vertex maps); prune deeper cells when they
    /// fix the current path pointwise.
    autos: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(g: &'a ColoredGraph) -> Self {
        Search {
            g,
            adj: g.adjacency(),
            best_form: None,
            best_perm: Vec::new(),
            path: Vec::new(),
            orbits: DisjointSet::new(g.vertex_count()),
            autos: Vec::new(),
        }
    }

    fn visit_leaf(&mut self, p: &Partition) {
        let perm = p.to_perm();
        let form = form_bytes(self.g, &perm);
        match &self.best_form {
            None => {
                self.best_form = Some(form);
                self.best_perm = perm;
            }
            Some(best) => {
                if form < *best {
                    self.best_form = Some(form);
                    self.best_perm = perm;
                } else if form == *best {
                    // Equal forms under two labelings compose to an
                    // automorphism of the graph.
                    let mut sigma = vec![0usize; perm.len()];
                    for (i, &v) in self.best_perm.iter().enumerate() {
                        sigma[v] = perm[i];
                        self.orbits.union(v, perm[i]);
                    }
                    if self.autos.len() < MAX_STORED_AUTOMORPHISMS {
                        self.autos.push(sigma);
                    }
                }
            }
        }
    }

    /// Whether trying `candidate` is redundant given the already-tried cell
    /// members: some discovered automorphism that fixes every path vertex
    /// maps a tried vertex onto it, so its subtree repeats a explored one.
    fn pruned_by_automorphism(&mut self, candidate: usize, tried: &[usize]) -> bool {
        if self.path.is_empty() {
            let rc = self.orbits.find(candidate);
            return tried.iter().any(|&u| self.orbits.find(u) == rc);
        }
        self.autos.iter().any(|sigma| {
            self.path.iter().all(|&p| sigma[p] == p) && tried.iter().any(|&v| sigma[v] == candidate)
        })
    }

    fn descend(&mut self, p: Partition) {
        let p = refine_with_adj(self.g, &self.adj, &p);
        if p.is_discrete() {
            self.visit_leaf(&p);
            return;
        }
        let target = p
            .cells
            .iter()
            .position(|c| c.len() > 1)
            .expect("non-discrete partition");
        let candidates = p.cells[target].clone();
        let mut tried: Vec<usize> = Vec::new();
        for v in candidates {
            if self.pruned_by_automorphism(v, &tried) {
                continue;
            }
            tried.push(v);
            self.path.push(v);
            self.descend(p.individualize(target, v));
            self.path.pop();
        }
    }
}

/// Canonically orders a colored graph. Two graphs receive equal certificates
/// exactly when they are isomorphic; among automorphic labelings the
/// lexicographically smallest adjacency form found first is kept.
pub fn canonical_order(g: &ColoredGraph) -> CanonicalOrder {
    let mut search = Search::new(g);
    search.descend(Partition::from_colors(g.colors()));
    match search.best_form {
        Some(certificate) => CanonicalOrder {
            perm: search.best_perm,
            certificate,
        },
        None => CanonicalOrder {
            perm: Vec::new(),
            certificate: form_bytes(g, &[]),
        },
    }
}

/// SE(3)-invariant vertex keys: own color plus the sorted multiset of
/// (neighbor color, exact distance) pairs. Vertices tie only when these agree
/// bit-for-bit.
fn geometric_ranks(g: &ColoredGraph, coords: &[Vec3]) -> Vec<u32> {
    let n = g.vertex_count();
    let colors = g.colors();
    let mut keys: Vec<(u32, Vec<(u32, f64)>)> = Vec::with_capacity(n);
    for v in 0..n {
        let mut profile: Vec<(u32, f64)> = (0..n)
            .filter(|&u| u != v)
            .map(|u| (colors[u], coords[v].distance(coords[u])))
            .collect();
        profile.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        keys.push((colors[v], profile));
    }
    let cmp = |a: &(u32, Vec<(u32, f64)>), b: &(u32, Vec<(u32, f64)>)| {
        a.0.cmp(&b.0).then_with(|| {
            for (x, y) in a.1.iter().zip(&b.1) {
                let c = x.0.cmp(&y.0).then(x.1.total_cmp(&y.1));
                if c != core::cmp::Ordering::Equal {
                    return c;
                }
            }
            a.1.len().cmp(&b.1.len())
        })
    };
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| cmp(&keys[a], &keys[b]));
    let mut ranks = vec![0u32; n];
    let mut rank = 0u32;
    for (i, &v) in idx.iter().enumerate() {
        if i > 0 && cmp(&keys[idx[i - 1]], &keys[v]) != core::cmp::Ordering::Equal {
            rank += 1;
        }
        ranks[v] = rank;
    }
    ranks
}

/// Canonical order of the 3D graph: vertex colors are refined with invariant
/// geometric signatures before individualization–refinement, so automorphic
/// ties of the plain bond graph resolve identically for every relabeling or
/// rigid motion of the input. This is the ordering the sequence encoder uses.
pub fn geometric_canonical_order(g: &ColoredGraph, coords: &[Vec3]) -> Vec<usize> {
    debug_assert_eq!(g.vertex_count(), coords.len());
    let ranks = geometric_ranks(g, coords);
    let edges = g.edges().iter().copied();
    let augmented = ColoredGraph::new(g.vertex_count(), ranks, edges)
        .expect("augmentation preserves graph validity");
    canonical_order(&augmented).perm
}

/// Atom ordering strategies compared in the ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderStrategy {
    /// Canonical order, re-traversed so each vertex follows a neighbor of the
    /// already-ordered prefix whenever one exists.
    CanonicalLocality,
    /// Raw canonical label order.
    CanonicalNonlocality,
    Bfs,
    Dfs,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown order strategy `{0}` (expected canonical-locality, canonical-nonlocality, bfs, dfs, or random)")]
pub struct UnknownStrategy(pub String);

impl core::str::FromStr for OrderStrategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical-locality" => Ok(Self::CanonicalLocality),
            "canonical-nonlocality" => Ok(Self::CanonicalNonlocality),
            "bfs" => Ok(Self::Bfs),
            "dfs" => Ok(Self::Dfs),
            "random" => Ok(Self::Random),
            other => Err(UnknownStrategy(String::from(other))),
        }
    }
}

impl core::fmt::Display for OrderStrategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Self::CanonicalLocality => "canonical-locality",
            Self::CanonicalNonlocality => "canonical-nonlocality",
            Self::Bfs => "bfs",
            Self::Dfs => "dfs",
            Self::Random => "random",
        })
    }
}

/// Orders the vertices with the chosen strategy. The canonical strategies and
/// the roots/priorities of BFS and DFS derive from
/// [`geometric_canonical_order`]; `Random` is a seeded shuffle.
pub fn order_strategy(
    g: &ColoredGraph,
    coords: &[Vec3],
    strategy: OrderStrategy,
    seed: u64,
) -> Vec<usize> {
    let n = g.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    if strategy == OrderStrategy::Random {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        return perm;
    }
    let canonical = geometric_canonical_order(g, coords);
    match strategy {
        OrderStrategy::CanonicalNonlocality => canonical,
        OrderStrategy::CanonicalLocality => locality_traversal(g, &canonical),
        OrderStrategy::Bfs => bfs_order(g, &canonical),
        OrderStrategy::Dfs => dfs_order(g, &canonical),
        OrderStrategy::Random => unreachable!(),
    }
}

fn label_of(canonical: &[usize]) -> Vec<usize> {
    let mut label = vec![0usize; canonical.len()];
    for (pos, &v) in canonical.iter().enumerate() {
        label[v] = pos;
    }
    label
}

/// Greedy re-traversal by canonical priority: always continue with the
/// smallest-label vertex adjacent to the prefix, jumping to the smallest
/// unvisited label when no neighbor remains (disconnected inputs).
fn locality_traversal(g: &ColoredGraph, canonical: &[usize]) -> Vec<usize> {
    let n = canonical.len();
    let label = label_of(canonical);
    let adj = g.adjacency();
    let mut visited = vec![false; n];
    let mut frontier = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let next = (0..n)
            .filter(|&v| !visited[v] && frontier[v])
            .min_by_key(|&v| label[v])
            .or_else(|| (0..n).filter(|&v| !visited[v]).min_by_key(|&v| label[v]))
            .expect("unvisited vertex exists");
        visited[next] = true;
        out.push(next);
        for &(u, _) in &adj[next] {
            frontier[u] = true;
        }
    }
    out
}

fn bfs_order(g: &ColoredGraph, canonical: &[usize]) -> Vec<usize> {
    let n = canonical.len();
    let label = label_of(canonical);
    let adj = g.adjacency();
    let mut visited = vec![false; n];
    let mut out = Vec::with_capacity(n);
    let mut queue: alloc::collections::VecDeque<usize> = alloc::collections::VecDeque::new();
    for &root in canonical {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            out.push(v);
            let mut nbrs: Vec<usize> = adj[v]
                .iter()
                .map(|&(u, _)| u)
                .filter(|&u| !visited[u])
                .collect();
            nbrs.sort_by_key(|&u| label[u]);
            for u in nbrs {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    out
}

fn dfs_order(g: &ColoredGraph, canonical: &[usize]) -> Vec<usize> {
    let n = canonical.len();
    let label = label_of(canonical);
    let adj = g.adjacency();
    let mut visited = vec![false; n];
    let mut out = Vec::with_capacity(n);
    let mut stack: Vec<usize> = Vec::new();
    for &root in canonical {
        if visited[root] {
            continue;
        }
        stack.push(root);
        while let Some(v) = stack.pop() {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            out.push(v);
            let mut nbrs: Vec<usize> = adj[v]
                .iter()
                .map(|&(u, _)| u)
                .filter(|&u| !visited[u])
                .collect();
            // Reverse label order so the smallest label is explored first.
            nbrs.sort_by_key(|&u| core::cmp::Reverse(label[u]));
            stack.extend(nbrs);
        }
    }
    out
}

/// Brute-force isomorphism oracle: searches for a color- and bond-order-
/// preserving bijection by backtracking. Independent of the
/// individualization–refinement path; intended for small graphs.
pub fn brute_force_isomorphic(g1: &ColoredGraph, g2: &ColoredGraph) -> bool {
    let n = g1.vertex_count();
    if n != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return false;
    }
    // Cheap invariant screen: per-vertex (color, sorted incident orders).
    let profile = |g: &ColoredGraph| {
        let adj = g.adjacency();
        let mut p: Vec<(u32, Vec<u8>)> = (0..g.vertex_count())
            .map(|v| {
                let mut orders: Vec<u8> = adj[v].iter().map(|&(_, o)| o).collect();
                orders.sort_unstable();
                (g.colors()[v], orders)
            })
            .collect();
        p.sort();
        p
    };
    if profile(g1) != profile(g2) {
        return false;
    }

    fn extend(
        g1: &ColoredGraph,
        g2: &ColoredGraph,
        mapping: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        v: usize,
    ) -> bool {
        let n = g1.vertex_count();
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w] || g1.colors()[v] != g2.colors()[w] {
                continue;
            }
            let consistent = (0..v).all(|u| {
                let img = mapping[u].expect("prefix is mapped");
                g1.order_between(u, v) == g2.order_between(img, w)
            });
            if consistent {
                mapping[v] = Some(w);
                used[w] = true;
                if extend(g1, g2, mapping, used, v + 1) {
                    return true;
                }
                mapping[v] = None;
                used[w] = false;
            }
        }
        false
    }

    let mut mapping = vec![None; n];
    let mut used = vec![false; n];
    extend(g1, g2, &mut mapping, &mut used, 0)
}
