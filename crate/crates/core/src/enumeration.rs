//! Exhaustive generation of stranded maps.
//!
//! Uncoloured connected maps ("skeletons") are produced once per
//! isomorphism class by a rooted breadth-first generator: darts are labelled
//! in order of discovery from the root, following `sigma` then `epsilon`, and
//! every choice extends that labelling. With a cilium the root is cilium 1,
//! so every class comes out exactly once with a trivial automorphism group.
//! Vacuum maps are rooted at every half-edge and kept only when the root
//! gives the smallest code; the number of roots reaching that code is the
//! automorphism count. Edge colourings are applied afterwards and weighted
//! by `1/|Aut|` of the skeleton.

use std::collections::HashSet;

use num::{BigInt, BigRational, One, Zero};

use crate::colour_kernel::{BoundaryGraph, ColourSet, ModelSpec, UnionFind};
use crate::error::{budget, Error, Result};
use crate::series::factorial;
use crate::stranded_maps::StrandedMap;

pub const DEFAULT_MAX_EDGES: usize = 7;

#[derive(Clone, Debug)]
pub struct EnumSpec {
    pub model: ModelSpec,
    pub edges: usize,
    pub cilia: usize,
    pub connected_only: bool,
    pub vacuum: bool,
    pub max_edges: usize,
}

impl EnumSpec {
    pub fn connected(model: ModelSpec, edges: usize, cilia: usize) -> Self {
        EnumSpec {
            model,
            edges,
            cilia,
            connected_only: true,
            vacuum: cilia == 0,
            max_edges: DEFAULT_MAX_EDGES,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.vacuum && self.cilia != 0 {
            return Err(Error::Invalid("a vacuum enumeration has no cilia".into()));
        }
        budget("enumeration edges", self.max_edges, self.edges)?;
        if !self.connected_only {
            budget("labelled darts", 10, 2 * self.edges + self.cilia)?;
        }
        Ok(())
    }
}

/// An uncoloured connected map. Edge colours and covariant labels are
/// supplied separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub edges: usize,
    pub k: usize,
    pub sigma: Vec<usize>,
    pub bare_vertices: usize,
    pub aut: usize,
}

impl Skeleton {
    pub fn map(&self, rank: usize, colours: Vec<ColourSet>, cov: Vec<usize>) -> Result<StrandedMap> {
        StrandedMap::new(rank, colours, self.sigma.clone(), cov, self.bare_vertices)
    }

    /// The skeleton with every edge coloured `{1}` at rank 2.
    pub fn plain(&self) -> StrandedMap {
        let c = ColourSet::from_colours(&[1], 2).unwrap();
        StrandedMap::new(2, vec![c; self.edges], self.sigma.clone(), (0..self.k).collect(), self.bare_vertices)
            .expect("skeleton is a valid map")
    }

    pub fn n_vertices(&self) -> usize {
        crate::stranded_maps::cycles(&self.sigma).len() + self.bare_vertices
    }

    pub fn is_tree(&self) -> bool {
        self.edges + 1 == self.n_vertices()
    }

    pub fn tables(&self) -> SkeletonTables {
        SkeletonTables::new(self)
    }
}

struct Gen {
    n: usize,
    e2: usize,
    k: usize,
    tree_only: bool,
    sigma: Vec<usize>,
    image: Vec<bool>,
    /// First dart discovered on the vertex of each dart.
    head: Vec<usize>,
    partner: Vec<usize>,
    kind: Vec<u8>,
    cilium_label: Vec<usize>,
    used_labels: u32,
    labelled: usize,
    halves: usize,
    cilia: usize,
    out: Vec<Skeleton>,
}

const UNKNOWN: u8 = 0;
const HALF: u8 = 1;
const CILIUM: u8 = 2;

impl Gen {
    fn step(&mut self, i: usize, type_phase: bool) {
        if i == self.labelled {
            if self.labelled == self.n && self.halves == self.e2 && self.cilia == self.k {
                self.emit();
            }
            return;
        }
        if !type_phase {
            for j in 0..self.labelled {
                if !self.image[j] && (!self.tree_only || j == self.head[i]) {
                    self.sigma[i] = j;
                    self.image[j] = true;
                    self.step(i, true);
                    self.image[j] = false;
                }
            }
            if self.labelled < self.n {
                let j = self.labelled;
                self.labelled += 1;
                self.head[j] = self.head[i];
                self.sigma[i] = j;
                self.image[j] = true;
                self.step(i, true);
                self.image[j] = false;
                self.labelled -= 1;
            }
            self.sigma[i] = usize::MAX;
            return;
        }
        if self.kind[i] == HALF {
            self.step(i + 1, false);
            return;
        }
        if self.cilia < self.k {
            let labels: Vec<usize> = if i == 0 {
                vec![0]
            } else {
                (1..self.k).filter(|l| self.used_labels >> l & 1 == 0).collect()
            };
            for l in labels {
                self.kind[i] = CILIUM;
                self.cilium_label[i] = l;
                self.used_labels |= 1 << l;
                self.cilia += 1;
                self.step(i + 1, false);
                self.cilia -= 1;
                self.used_labels &= !(1 << l);
                self.kind[i] = UNKNOWN;
            }
        }
        if (self.k > 0 && i == 0) || self.halves + 2 > self.e2 {
            return;
        }
        if self.labelled < self.n {
            let p = self.labelled;
            self.labelled += 1;
            self.head[p] = p;
            self.pair(i, p);
            self.step(i + 1, false);
            self.unpair(i, p);
            self.labelled -= 1;
        }
        if !self.tree_only {
            for p in i + 1..self.labelled {
                if self.kind[p] == UNKNOWN {
                    self.pair(i, p);
                    self.step(i + 1, false);
                    self.unpair(i, p);
                }
            }
        }
    }

    fn pair(&mut self, a: usize, b: usize) {
        self.kind[a] = HALF;
        self.kind[b] = HALF;
        self.partner[a] = b;
        self.partner[b] = a;
        self.halves += 2;
    }

    fn unpair(&mut self, a: usize, b: usize) {
        self.kind[a] = UNKNOWN;
        self.kind[b] = UNKNOWN;
        self.partner[a] = usize::MAX;
        self.partner[b] = usize::MAX;
        self.halves -= 2;
    }

    fn emit(&mut self) {
        let mut id = vec![usize::MAX; self.n];
        let mut next_edge = 0;
        for x in 0..self.n {
            match self.kind[x] {
                HALF if self.partner[x] > x => {
                    id[x] = 2 * next_edge;
                    id[self.partner[x]] = 2 * next_edge + 1;
                    next_edge += 1;
                }
                CILIUM => id[x] = self.e2 + self.cilium_label[x],
                _ => {}
            }
        }
        let mut sigma = vec![0; self.n];
        for x in 0..self.n {
            sigma[id[x]] = id[self.sigma[x]];
        }
        let mut skel = Skeleton {
            edges: self.e2 / 2,
            k: self.k,
            sigma,
            bare_vertices: 0,
            aut: 1,
        };
        let plain = match StrandedMap::new(2, vec![ColourSet::from_colours(&[1], 2).unwrap(); skel.edges], skel.sigma.clone(), (0..self.k).collect(), 0) {
            Ok(m) => m,
            Err(_) => return,
        };
        if self.tree_only && !skel.is_tree() {
            return;
        }
        if self.k == 0 {
            let root = plain.code_from(id[0], false);
            let mut aut = 0;
            for r in 0..self.n {
                let c = plain.code_from(r, false);
                if c < root {
                    return;
                }
                if c == root {
                    aut += 1;
                }
            }
            skel.aut = aut;
        }
        self.out.push(skel);
    }
}

/// All connected uncoloured maps with `edges` edges and `k` cilia (cilium
/// `i` has covariant label `i`). `edges = k = 0` gives the bare vertex.
pub fn skeletons(edges: usize, k: usize, tree_only: bool) -> Result<Vec<Skeleton>> {
    budget("enumeration edges", DEFAULT_MAX_EDGES + 2, edges)?;
    budget("cilia", 8, k)?;
    if edges == 0 && k == 0 {
        return Ok(vec![Skeleton {
            edges: 0,
            k: 0,
            sigma: vec![],
            bare_vertices: 1,
            aut: 1,
        }]);
    }
    let n = 2 * edges + k;
    let mut g = Gen {
        n,
        e2: 2 * edges,
        k,
        tree_only,
        sigma: vec![usize::MAX; n],
        image: vec![false; n],
        head: vec![0; n],
        partner: vec![usize::MAX; n],
        kind: vec![UNKNOWN; n],
        cilium_label: vec![usize::MAX; n],
        used_labels: 0,
        labelled: 1,
        halves: 0,
        cilia: 0,
        out: Vec::new(),
    };
    g.step(0, false);
    Ok(g.out)
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..k).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Calls `f` on every assignment of `q` to `len` slots, in odometer order.
pub fn for_each_colouring(q: &[ColourSet], len: usize, mut f: impl FnMut(&[ColourSet])) {
    if q.is_empty() && len > 0 {
        return;
    }
    let mut idx = vec![0usize; len];
    let mut cur: Vec<ColourSet> = vec![q.first().copied().unwrap_or_else(|| ColourSet::from_colours(&[1], 2).unwrap()); len];
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            idx[i] += 1;
            if idx[i] < q.len() {
                cur[i] = q[idx[i]];
                break;
            }
            idx[i] = 0;
            cur[i] = q[0];
            i += 1;
        }
    }
}

/// A map together with its weight in the expansion.
#[derive(Clone, Debug)]
pub struct WeightedMap {
    pub map: StrandedMap,
    pub weight: BigRational,
}

/// Streams maps to `f`. Connected enumerations yield one map per
/// isomorphism class with weight `1/|Aut|`; otherwise every labelled map
/// (all rotations of the darts, edge `i` made of darts `2i, 2i+1`) is
/// produced with weight `1/(E! 2^E)`. The two agree class by class.
pub fn for_each_map(s: &EnumSpec, mut f: impl FnMut(StrandedMap, &BigRational)) -> Result<()> {
    s.validate()?;
    let rank = s.model.rank;
    let q = &s.model.interactions;
    let covs = permutations(s.cilia);
    if s.connected_only {
        if s.edges == 0 && s.cilia == 0 {
            return Ok(());
        }
        for sk in skeletons(s.edges, s.cilia, false)? {
            let w = BigRational::new(BigInt::one(), BigInt::from(sk.aut));
            for cov in &covs {
                for_each_colouring(q, sk.edges, |cols| {
                    let m = sk.map(rank, cols.to_vec(), cov.clone()).expect("valid colouring");
                    f(m, &w);
                });
            }
        }
        return Ok(());
    }
    let n = 2 * s.edges + s.cilia;
    let norm = BigInt::from(2u32).pow(s.edges as u32) * factorial(s.edges);
    let w = BigRational::new(BigInt::one(), norm);
    let mut sigma: Vec<usize> = (0..n).collect();
    loop {
        for cov in &covs {
            if s.vacuum && s.cilia > 0 {
                continue;
            }
            // rejects permutations with two cilia on one vertex
            let probe = Skeleton { edges: s.edges, k: s.cilia, sigma: sigma.clone(), bare_vertices: 0, aut: 1 };
            if probe.map(2, vec![ColourSet::from_colours(&[1], 2).unwrap(); s.edges], cov.clone()).is_err() {
                continue;
            }
            for_each_colouring(q, s.edges, |cols| {
                let m = StrandedMap::new(rank, cols.to_vec(), sigma.clone(), cov.clone(), 0).expect("valid colouring");
                f(m, &w);
            });
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    Ok(())
}

pub fn enumerate_maps(s: &EnumSpec) -> Result<Vec<WeightedMap>> {
    let mut out = Vec::new();
    for_each_map(s, |map, w| out.push(WeightedMap { map, weight: w.clone() }))?;
    Ok(out)
}

/// Plane trees with `v` vertices, `k` labelled cilia on distinct vertices and
/// edges coloured from `q`, one per isomorphism class.
pub fn enumerate_plane_trees(v: usize, k: usize, q: &[ColourSet]) -> Result<Vec<StrandedMap>> {
    if v == 0 || k > v {
        return Err(Error::Invalid(format!("need 1 <= v and k <= v (got v={v}, k={k})")));
    }
    let rank = q.first().map_or(2, |c| c.rank());
    let mut out = Vec::new();
    for sk in skeletons(v - 1, k, true)? {
        let mut seen = HashSet::new();
        for_each_colouring(q, sk.edges, |cols| {
            let m = sk.map(rank, cols.to_vec(), (0..k).collect()).expect("valid colouring");
            if sk.aut == 1 || seen.insert(m.canonical_code(true).0) {
                out.push(m);
            }
        });
    }
    Ok(out)
}

/// Number of plane trees on `v` labelled vertices with `k` unlabelled cilia
/// on distinct vertices and `q` edge colours:
/// `q^(v-1) v! (2v+k-3)! / (k! (v-k)! (v+k-1)!)`, and 1 for the bare vertex.
pub fn count_trees_closed_form(v: usize, k: usize, q: usize) -> BigInt {
    if v == 0 || k > v {
        return BigInt::zero();
    }
    if v == 1 {
        return BigInt::one();
    }
    let num = BigInt::from(q).pow((v - 1) as u32) * factorial(v) * factorial(2 * v + k - 3);
    let den = factorial(k) * factorial(v - k) * factorial(v + k - 1);
    num / den
}

/// The same count obtained from the generator: each tree class contributes
/// `v!/(k! |Aut|)`, colourings being counted by orbit weights.
pub fn count_trees_enumerated(v: usize, k: usize, q: usize) -> Result<BigInt> {
    if v == 0 || k > v {
        return Ok(BigInt::zero());
    }
    let mut total = BigRational::zero();
    let colourings = BigInt::from(q).pow((v - 1) as u32);
    for sk in skeletons(v - 1, k, true)? {
        total += BigRational::new(colourings.clone() * factorial(v), factorial(k) * BigInt::from(sk.aut));
    }
    if !total.is_integer() {
        return Err(Error::Invalid("tree count is not an integer".into()));
    }
    Ok(total.to_integer())
}

/// Number of unlabelled plane trees with `n` edges, one cilium and edges
/// coloured from `q` colours, counted by generation.
pub fn count_monociliated_trees(n: usize, q: usize) -> Result<BigInt> {
    Ok(BigInt::from(skeletons(n, 1, true)?.len()) * BigInt::from(q).pow(n as u32))
}

/// Per-subset lookup tables of a skeleton. For a subset `S` of edges
/// (bitmask), the faces of a colour carried exactly by the edges of `S` are
/// fixed, so every colouring reduces to `D` table lookups.
#[derive(Clone, Debug)]
pub struct SkeletonTables {
    pub edges: usize,
    pub k: usize,
    pub bare_vertices: usize,
    pub vertices: usize,
    sigma_inv: Vec<usize>,
    int_faces: Vec<u8>,
    int_mask: Vec<u32>,
    next_cilium: Vec<Vec<u8>>,
    genus: Vec<u8>,
    forest: Vec<u8>,
    bridges: u32,
    vertex_of: Vec<usize>,
}

impl SkeletonTables {
    fn new(sk: &Skeleton) -> Self {
        let plain = sk.plain();
        let e = sk.edges;
        let n = sk.sigma.len();
        let e2 = 2 * e;
        let mut sigma_inv = vec![0; n];
        for (x, &y) in sk.sigma.iter().enumerate() {
            sigma_inv[y] = x;
        }
        let subsets = 1usize << e;
        let mut int_faces = vec![0u8; subsets];
        let mut int_mask = vec![0u32; subsets];
        let mut next_cilium = vec![vec![0u8; sk.k]; subsets];
        let mut genus = vec![0u8; subsets];
        let mut forest = vec![0u8; subsets];
        let vertex_of = plain.vertex_of();
        let vertices = crate::stranded_maps::cycles(&sk.sigma).len();
        for s in 0..subsets {
            let tau = |x: usize| if x < e2 && s >> (x / 2) & 1 == 1 { x ^ 1 } else { x };
            let phi: Vec<usize> = (0..n).map(|x| tau(sk.sigma[x])).collect();
            for cyc in crate::stranded_maps::cycles(&phi) {
                if cyc.iter().all(|&x| x < e2) {
                    int_faces[s] += 1;
                    for x in cyc {
                        int_mask[s] |= 1 << x;
                    }
                }
            }
            for i in 0..sk.k {
                let mut y = phi[e2 + i];
                while y < e2 {
                    y = phi[y];
                }
                next_cilium[s][i] = (y - e2) as u8;
            }
            let keep: Vec<bool> = (0..e).map(|i| s >> i & 1 == 1).collect();
            genus[s] = plain.sub_map_genus(&keep) as u8;
            let mut uf = UnionFind::new(vertices.max(1));
            forest[s] = (0..e)
                .filter(|&i| keep[i] && uf.union(vertex_of[2 * i], vertex_of[2 * i + 1]))
                .count() as u8;
        }
        let full = forest[subsets - 1];
        let bridges = (0..e)
            .filter(|&i| forest[(subsets - 1) & !(1 << i)] < full)
            .fold(0u32, |acc, i| acc | 1 << i);
        SkeletonTables {
            edges: e,
            k: sk.k,
            bare_vertices: sk.bare_vertices,
            vertices: vertices + sk.bare_vertices,
            sigma_inv,
            int_faces,
            int_mask,
            next_cilium,
            genus,
            forest,
            bridges,
            vertex_of,
        }
    }

    /// Bitmask of the edges carrying colour `c`, for `c` in `1..=rank`.
    pub fn colour_masks(&self, colours: &[ColourSet], rank: usize) -> Vec<u32> {
        (1..=rank)
            .map(|c| {
                colours
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.contains(c))
                    .fold(0u32, |acc, (i, _)| acc | 1 << i)
            })
            .collect()
    }

    pub fn internal_faces(&self, masks: &[u32]) -> usize {
        masks.iter().map(|&m| self.int_faces[m as usize] as usize).sum::<usize>() + self.bare_vertices * masks.len()
    }

    /// Whether the face of the colour with edge mask `mask` through the
    /// corner leaving dart `x` is internal.
    pub fn is_internal(&self, mask: u32, x: usize) -> bool {
        self.int_mask[mask as usize] >> x & 1 == 1
    }

    pub fn sigma_inv(&self, x: usize) -> usize {
        self.sigma_inv[x]
    }

    pub fn boundary(&self, masks: &[u32], cov: &[usize]) -> Result<BoundaryGraph> {
        let mut tau = vec![vec![0; self.k]; masks.len()];
        for (c, &m) in masks.iter().enumerate() {
            for i in 0..self.k {
                tau[c][self.next_cilium[m as usize][i] as usize] = cov[i];
            }
        }
        BoundaryGraph::new(self.k, tau)
    }

    pub fn is_plane_tree(&self) -> bool {
        self.edges + 1 == self.vertices
    }

    pub fn map_genus(&self) -> usize {
        self.genus[(1usize << self.edges) - 1] as usize
    }

    pub fn is_bridge(&self, e: usize) -> bool {
        self.bridges >> e & 1 == 1
    }

    pub fn vertex_of(&self, x: usize) -> usize {
        self.vertex_of[x]
    }

    /// Edges of a spanning forest of the sub-map on the edge subset `s`.
    pub fn forest_size(&self, s: u32) -> usize {
        self.forest[s as usize] as usize
    }

    /// Edge subsets forming a spanning tree of the whole map.
    pub fn spanning_trees(&self) -> Vec<u32> {
        let need = self.vertices - self.bare_vertices - 1;
        (0..1u32 << self.edges)
            .filter(|&s| s.count_ones() as usize == need && self.forest[s as usize] as usize == need)
            .collect()
    }

    /// The predicates of the enhanced leading order: non-maximal edges are
    /// bridges, maximal sectors are planar, the sector tree is a tree and
    /// the whole map is planar.
    pub fn cactus(&self, colours: &[ColourSet]) -> FastPredicates {
        let mut nonmax_bridges = true;
        let mut sectors_planar = true;
        let mut t_edges = 0;
        let mut seen: Vec<ColourSet> = Vec::new();
        for (i, &c) in colours.iter().enumerate() {
            if !c.is_maximal() {
                nonmax_bridges &= self.is_bridge(i);
                t_edges += 1;
            } else if !seen.contains(&c) {
                seen.push(c);
                let s = colours
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x == c)
                    .fold(0usize, |acc, (j, _)| acc | 1 << j);
                sectors_planar &= self.genus[s] == 0;
                t_edges += self.forest[s] as usize;
            }
        }
        FastPredicates {
            plane_tree: self.is_plane_tree(),
            monocoloured: colours.iter().all(|c| c.len() == 1),
            nonmax_bridges,
            sectors_planar,
            t_tree: t_edges + 1 == self.vertices,
            map_planar: self.map_genus() == 0,
        }
    }

    /// Every strand of every multicoloured edge lies on an external face.
    pub fn multicoloured_strands_external(&self, colours: &[ColourSet], masks: &[u32]) -> bool {
        colours.iter().enumerate().filter(|(_, c)| c.len() > 1).all(|(e, c)| {
            c.colours().iter().all(|&col| {
                let m = masks[col - 1];
                !self.is_internal(m, self.sigma_inv[2 * e]) && !self.is_internal(m, self.sigma_inv[2 * e + 1])
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FastPredicates {
    pub plane_tree: bool,
    pub monocoloured: bool,
    pub nonmax_bridges: bool,
    pub sectors_planar: bool,
    pub t_tree: bool,
    pub map_planar: bool,
}

impl FastPredicates {
    pub fn is_cactus(&self) -> bool {
        self.nonmax_bridges && self.sectors_planar && self.t_tree && self.map_planar
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour_kernel::Scaling;
    use std::collections::HashMap;

    #[test]
    fn small_skeleton_counts() {
        // one-edge vacuum maps: the tree and the loop
        let s = skeletons(1, 0, false).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|x| x.aut == 2));
        assert_eq!(skeletons(0, 1, false).unwrap().len(), 1);
        assert_eq!(skeletons(0, 2, false).unwrap().len(), 0);
        // rooted maps with n edges: 1, 2, 10, 74, 706
        for (e, rooted) in [(1, 2), (2, 10), (3, 74), (4, 706)] {
            let total: usize = skeletons(e, 0, false).unwrap().iter().map(|s| 2 * e / s.aut).sum();
            assert_eq!(total, rooted, "E={e}");
        }
    }

    #[test]
    fn ciliated_maps_match_rooted_counts() {
        // a cilium on a vertex of a vacuum map: same as rooting at a corner
        for e in 1..=3 {
            let vac: usize = skeletons(e, 0, false)
                .unwrap()
                .iter()
                .map(|s| (2 * e) / s.aut)
                .sum();
            let cil = skeletons(e, 1, false).unwrap().len();
            assert_eq!(cil, vac, "E={e}");
        }
    }

    #[test]
    fn labelled_and_unlabelled_weights_agree() {
        let model = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        for (e, k) in [(1, 0), (2, 0), (1, 1), (2, 1), (1, 2)] {
            let mut a: HashMap<Vec<u32>, BigRational> = HashMap::new();
            let mut spec = EnumSpec::connected(model.clone(), e, k);
            for_each_map(&spec, |m, w| {
                *a.entry(m.canonical_code(true).0).or_insert_with(BigRational::zero) += w;
            })
            .unwrap();
            spec.connected_only = false;
            let mut b: HashMap<Vec<u32>, BigRational> = HashMap::new();
            for_each_map(&spec, |m, w| {
                if m.is_connected() {
                    *b.entry(m.canonical_code(true).0).or_insert_with(BigRational::zero) += w;
                }
            })
            .unwrap();
            assert_eq!(a, b, "E={e} k={k}");
        }
    }

    #[test]
    fn no_duplicates() {
        let model = ModelSpec::full_quartic(4, Scaling::Enhanced).unwrap();
        for (e, k) in [(2, 0), (3, 0), (2, 1), (2, 2)] {
            let mut seen = HashSet::new();
            let mut total = BigRational::zero();
            for_each_map(&EnumSpec::connected(model.clone(), e, k), |m, w| {
                seen.insert(m.canonical_code(true).0);
                total += w;
            })
            .unwrap();
            if k > 0 {
                let count = enumerate_maps(&EnumSpec::connected(model.clone(), e, k)).unwrap().len();
                assert_eq!(seen.len(), count);
            }
            assert!(total > BigRational::zero());
        }
    }

    #[test]
    fn one_edge_stream() {
        let model = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let maps = enumerate_maps(&EnumSpec::connected(model.clone(), 1, 0)).unwrap();
        assert_eq!(maps.len(), 6);
        let bare = enumerate_maps(&EnumSpec::connected(model, 0, 1)).unwrap();
        assert_eq!(bare.len(), 1);
    }

    #[test]
    fn d2_genus_one_at_two_edges() {
        let model = ModelSpec::melonic(2, Scaling::Invariant).unwrap();
        let maps = enumerate_maps(&EnumSpec::connected(model, 2, 0)).unwrap();
        assert_eq!(maps.iter().filter(|m| m.map.genus() == 1).count(), 1);
    }

    #[test]
    fn tree_counts() {
        assert_eq!(count_trees_closed_form(2, 1, 3), BigInt::from(6));
        assert_eq!(count_trees_closed_form(1, 1, 5), BigInt::from(1));
        assert_eq!(count_trees_closed_form(3, 1, 1), BigInt::from(12));
        assert_eq!(count_trees_closed_form(1, 0, 3), BigInt::from(1));
        for v in 1..=5 {
            for k in 0..=v.min(3) {
                for q in 1..=3 {
                    assert_eq!(count_trees_enumerated(v, k, q).unwrap(), count_trees_closed_form(v, k, q), "v={v} k={k} q={q}");
                }
            }
        }
        assert_eq!(count_monociliated_trees(3, 3).unwrap(), BigInt::from(135));
        let q = ModelSpec::melonic(3, Scaling::Invariant).unwrap().interactions;
        assert_eq!(enumerate_plane_trees(4, 1, &q).unwrap().len(), 135);
        assert_eq!(enumerate_plane_trees(1, 0, &q).unwrap().len(), 1);
        // vacuum path on 3 vertices with 3 colours: 6 classes up to reversal
        assert_eq!(enumerate_plane_trees(3, 0, &q).unwrap().len(), 6);
    }

    #[test]
    fn tables_agree_with_maps() {
        let model = ModelSpec::full_quartic(4, Scaling::Enhanced).unwrap();
        for (e, k) in [(3, 0), (2, 1), (2, 2)] {
            for sk in skeletons(e, k, false).unwrap() {
                let t = sk.tables();
                for cov in permutations(k) {
                    for_each_colouring(&model.interactions, e, |cols| {
                        let m = sk.map(4, cols.to_vec(), cov.clone()).unwrap();
                        let masks = t.colour_masks(cols, 4);
                        assert_eq!(t.internal_faces(&masks), m.internal_faces());
                        if k > 0 {
                            assert_eq!(t.boundary(&masks, &cov).unwrap(), m.map_boundary().unwrap());
                        }
                        let p = m.structural_predicates().unwrap();
                        let f = t.cactus(cols);
                        assert_eq!(f.is_cactus(), p.is_cactus());
                        assert_eq!(f.t_tree, p.t_map_is_tree);
                        assert_eq!(t.multicoloured_strands_external(cols, &masks), m.multicoloured_strands_external());
                    });
                }
            }
        }
    }
}
