//! Ciliated multicoloured maps.
//!
//! A map with `E` edges and `k` cilia lives on the darts `0..2E+k`. Edge `i`
//! owns the half-edges `2i` and `2i+1` (so `epsilon(h) = h ^ 1`), and cilium
//! `j` is the dart `2E+j`. `sigma` is the vertex rotation. A corner
//! `(x, sigma(x))` is a former colour-0 edge.
//!
//! Strands: the face of colour `c` through a corner continues with
//! `tau_c(sigma(x))`, where `tau_c` crosses an edge that carries `c` and
//! stays on the same half-edge otherwise. A face that meets a cilium is
//! external; it runs from the covariant leg of that cilium to the dual leg of
//! the next cilium along the same cycle.

use std::collections::BTreeMap;

use num::rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::colour_kernel::{is_permutation, BoundaryGraph, ColourSet, ModelSpec, Propagator, UnionFind};
use crate::error::{Error, Result};
use crate::series::SeriesTerm;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct StrandedMap {
    rank: usize,
    edge_colours: Vec<ColourSet>,
    sigma: Vec<usize>,
    /// Covariant label of each cilium; the dual label is the cilium index.
    cov_labels: Vec<usize>,
    /// Isolated vertices with neither edges nor cilium.
    bare_vertices: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FaceCounts {
    pub internal: Vec<usize>,
    pub external: Vec<usize>,
}

impl FaceCounts {
    pub fn total_internal(&self) -> usize {
        self.internal.iter().sum()
    }

    pub fn total_external(&self) -> usize {
        self.external.iter().sum()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct StructuralPredicates {
    pub is_plane_tree: bool,
    pub all_edges_monocoloured: bool,
    pub nonmax_edges_all_bridges: bool,
    pub sector_planarity: BTreeMap<String, bool>,
    pub sector_genus: BTreeMap<String, usize>,
    pub t_map_is_tree: bool,
    /// Genus of the whole map with colours forgotten.
    pub map_genus: usize,
}

impl StructuralPredicates {
    /// The cactus shape of leading-order maps of the enhanced model.
    pub fn is_cactus(&self) -> bool {
        self.nonmax_edges_all_bridges
            && self.sector_planarity.values().all(|&p| p)
            && self.t_map_is_tree
            && self.map_genus == 0
    }
}

#[derive(Serialize, Deserialize)]
struct HalfEdgeJson {
    id: usize,
    colours: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    #[serde(rename = "D")]
    rank: usize,
    half_edges: Vec<HalfEdgeJson>,
    cilia: Vec<usize>,
    sigma: Vec<Vec<usize>>,
    epsilon: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cov_labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    bare_vertices: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

impl TryFrom<MapJson> for StrandedMap {
    type Error = Error;
    fn try_from(j: MapJson) -> Result<Self> {
        let mut colours_of = BTreeMap::new();
        for h in &j.half_edges {
            let c = ColourSet::canonical_from(&h.colours, j.rank)?;
            if colours_of.insert(h.id, c).is_some() {
                return Err(Error::MalformedMap(format!("half-edge {} listed twice", h.id)));
            }
        }
        let mut pairs: Vec<[usize; 2]> = j
            .epsilon
            .iter()
            .map(|&[a, b]| if a < b { [a, b] } else { [b, a] })
            .collect();
        pairs.sort();
        let mut new_id = BTreeMap::new();
        let mut edge_colours = Vec::new();
        for (i, &[a, b]) in pairs.iter().enumerate() {
            let (ca, cb) = match (colours_of.get(&a), colours_of.get(&b)) {
                (Some(x), Some(y)) => (*x, *y),
                _ => return Err(Error::MalformedMap(format!("epsilon pair ({a},{b}) is not two half-edges"))),
            };
            if a == b || ca != cb {
                return Err(Error::MalformedMap(format!("epsilon pair ({a},{b}) is invalid")));
            }
            if new_id.insert(a, 2 * i).is_some() || new_id.insert(b, 2 * i + 1).is_some() {
                return Err(Error::MalformedMap("epsilon is not an involution".into()));
            }
            edge_colours.push(ca);
        }
        if new_id.len() != colours_of.len() {
            return Err(Error::MalformedMap("epsilon has a fixed point".into()));
        }
        let e2 = 2 * pairs.len();
        for (j_idx, &c) in j.cilia.iter().enumerate() {
            if new_id.insert(c, e2 + j_idx).is_some() {
                return Err(Error::MalformedMap(format!("cilium {c} clashes with another id")));
            }
        }
        let n = new_id.len();
        let mut sigma = vec![usize::MAX; n];
        for cyc in &j.sigma {
            for (i, x) in cyc.iter().enumerate() {
                let y = cyc[(i + 1) % cyc.len()];
                let (nx, ny) = match (new_id.get(x), new_id.get(&y)) {
                    (Some(a), Some(b)) => (*a, *b),
                    _ => return Err(Error::MalformedMap(format!("sigma mentions unknown id {x}"))),
                };
                if sigma[nx] != usize::MAX {
                    return Err(Error::MalformedMap(format!("id {x} appears twice in sigma")));
                }
                sigma[nx] = ny;
            }
        }
        let cov = match j.cov_labels {
            Some(v) => v
                .iter()
                .map(|&x| x.checked_sub(1).ok_or_else(|| Error::MalformedMap("cov labels start at 1".into())))
                .collect::<Result<Vec<_>>>()?,
            None => (0..j.cilia.len()).collect(),
        };
        StrandedMap::new(j.rank, edge_colours, sigma, cov, j.bare_vertices)
    }
}

impl From<StrandedMap> for MapJson {
    fn from(m: StrandedMap) -> Self {
        let e = m.edge_colours.len();
        let identity = m.cov_labels.iter().enumerate().all(|(i, &x)| i == x);
        MapJson {
            rank: m.rank,
            half_edges: (0..2 * e)
                .map(|h| HalfEdgeJson {
                    id: h,
                    colours: m.edge_colours[h / 2].colours(),
                })
                .collect(),
            cilia: (2 * e..m.sigma.len()).collect(),
            sigma: m.vertices(),
            epsilon: (0..e).map(|i| [2 * i, 2 * i + 1]).collect(),
            cov_labels: if identity {
                None
            } else {
                Some(m.cov_labels.iter().map(|x| x + 1).collect())
            },
            bare_vertices: m.bare_vertices,
        }
    }
}

impl StrandedMap {
    pub fn new(
        rank: usize,
        edge_colours: Vec<ColourSet>,
        sigma: Vec<usize>,
        cov_labels: Vec<usize>,
        bare_vertices: usize,
    ) -> Result<Self> {
        if !(2..=crate::colour_kernel::MAX_RANK).contains(&rank) {
            return Err(Error::MalformedMap(format!("rank {rank} out of range")));
        }
        for c in &edge_colours {
            if c.rank() != rank || !c.is_canonical() {
                return Err(Error::MalformedMap(format!("edge colours {c} not canonical at rank {rank}")));
            }
        }
        let n = sigma.len();
        let e2 = 2 * edge_colours.len();
        if n < e2 || !is_permutation(&sigma, n) {
            return Err(Error::MalformedMap("sigma is not a permutation of the darts".into()));
        }
        let k = n - e2;
        if !is_permutation(&cov_labels, k) {
            return Err(Error::MalformedMap("cov labels are not a permutation of the cilia".into()));
        }
        let m = StrandedMap {
            rank,
            edge_colours,
            sigma,
            cov_labels,
            bare_vertices,
        };
        for v in m.vertices() {
            if v.iter().filter(|&&x| m.is_cilium(x)).count() > 1 {
                return Err(Error::MalformedMap(format!("vertex {v:?} carries two cilia")));
            }
        }
        Ok(m)
    }

    /// A single vertex with no edges and no cilium.
    pub fn bare_vertex(rank: usize) -> Self {
        StrandedMap {
            rank,
            edge_colours: vec![],
            sigma: vec![],
            cov_labels: vec![],
            bare_vertices: 1,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_edges(&self) -> usize {
        self.edge_colours.len()
    }

    pub fn k(&self) -> usize {
        self.sigma.len() - 2 * self.edge_colours.len()
    }

    pub fn n_darts(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn edge_colours(&self) -> &[ColourSet] {
        &self.edge_colours
    }

    pub fn cov_labels(&self) -> &[usize] {
        &self.cov_labels
    }

    pub fn bare_vertices(&self) -> usize {
        self.bare_vertices
    }

    pub fn is_cilium(&self, x: usize) -> bool {
        x >= 2 * self.edge_colours.len()
    }

    pub fn epsilon(&self, x: usize) -> Option<usize> {
        (!self.is_cilium(x)).then_some(x ^ 1)
    }

    pub fn colours_of(&self, x: usize) -> Option<ColourSet> {
        (!self.is_cilium(x)).then(|| self.edge_colours[x / 2])
    }

    pub fn with_colours(&self, colours: Vec<ColourSet>) -> Result<Self> {
        if colours.len() != self.edge_colours.len() {
            return Err(Error::MalformedMap("wrong number of edge colours".into()));
        }
        StrandedMap::new(self.rank, colours, self.sigma.clone(), self.cov_labels.clone(), self.bare_vertices)
    }

    /// Sigma cycles, each starting at its smallest dart, ordered by that dart.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        cycles(&self.sigma)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices().len() + self.bare_vertices
    }

    /// Vertex index of every dart.
    pub fn vertex_of(&self) -> Vec<usize> {
        let mut v = vec![0; self.sigma.len()];
        for (i, cyc) in self.vertices().iter().enumerate() {
            for &x in cyc {
                v[x] = i;
            }
        }
        v
    }

    fn tau(&self, c: usize, x: usize) -> usize {
        if !self.is_cilium(x) && self.edge_colours[x / 2].contains(c) {
            x ^ 1
        } else {
            x
        }
    }

    /// Cycles of `tau_c . sigma`, the faces of colour `c` (bare vertices excluded).
    pub fn face_cycles(&self, c: usize) -> Vec<Vec<usize>> {
        let phi: Vec<usize> = (0..self.sigma.len()).map(|x| self.tau(c, self.sigma[x])).collect();
        cycles(&phi)
    }

    pub fn trace_faces(&self) -> FaceCounts {
        let mut internal = vec![self.bare_vertices; self.rank];
        let mut external = vec![0; self.rank];
        for c in 1..=self.rank {
            for f in self.face_cycles(c) {
                let cilia = f.iter().filter(|&&x| self.is_cilium(x)).count();
                if cilia == 0 {
                    internal[c - 1] += 1;
                } else {
                    external[c - 1] += cilia;
                }
            }
        }
        FaceCounts { internal, external }
    }

    pub fn internal_faces(&self) -> usize {
        self.trace_faces().total_internal()
    }

    /// Colour-0 edges between two bubbles: corners with no cilium.
    pub fn internal_corners(&self) -> usize {
        (0..self.sigma.len())
            .filter(|&x| !self.is_cilium(x) && !self.is_cilium(self.sigma[x]))
            .count()
    }

    pub fn components(&self) -> usize {
        let n = self.sigma.len();
        let mut uf = UnionFind::new(n);
        for x in 0..n {
            uf.union(x, self.sigma[x]);
            if let Some(y) = self.epsilon(x) {
                uf.union(x, y);
            }
        }
        uf.sets() + self.bare_vertices
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }

    /// Exponent of 1/N: `sum_e (-alpha_C(e)) - F_int`.
    pub fn omega(&self, spec: &ModelSpec) -> Result<Rational64> {
        if spec.propagator != Propagator::Identity {
            return Err(Error::UnsupportedModel(
                "the 1/N exponent is defined for the identity covariance; use divergence_degree".into(),
            ));
        }
        let e: i64 = self.edge_colours.iter().map(|&c| -spec.alpha(c)).sum();
        Ok(Rational64::from_integer(e - self.internal_faces() as i64))
    }

    /// Amplitude `(-1)^E N^(-Omega)` with coupling degrees per family.
    pub fn amplitude(&self, spec: &ModelSpec) -> Result<SeriesTerm> {
        let omega = self.omega(spec)?;
        let mut degrees = vec![0u32; spec.couplings.len()];
        for &c in &self.edge_colours {
            let f = spec
                .family_of(c)
                .ok_or_else(|| Error::UnsupportedBubble(format!("{c} is not an interaction of the model")))?;
            degrees[f] += 1;
        }
        let sign: i64 = if self.n_edges() % 2 == 0 { 1 } else { -1 };
        Ok(SeriesTerm {
            coupling_degrees: degrees,
            n_exponent: -omega,
            coefficient: num::BigRational::from_integer(sign.into()),
        })
    }

    /// The boundary graph read from the external faces.
    pub fn map_boundary(&self) -> Result<BoundaryGraph> {
        let k = self.k();
        if k == 0 {
            return Err(Error::NoBoundary);
        }
        let e2 = 2 * self.n_edges();
        let mut tau = vec![vec![usize::MAX; k]; self.rank];
        for c in 1..=self.rank {
            for i in 0..k {
                let mut y = self.tau(c, self.sigma[e2 + i]);
                while !self.is_cilium(y) {
                    y = self.tau(c, self.sigma[y]);
                }
                tau[c - 1][y - e2] = self.cov_labels[i];
            }
        }
        BoundaryGraph::new(k, tau)
    }

    /// Boundary graph, or the empty one for vacuum maps.
    pub fn boundary_or_empty(&self) -> BoundaryGraph {
        self.map_boundary()
            .unwrap_or_else(|_| BoundaryGraph::identity(0, self.rank))
    }

    /// Sum of the genera of the components of the ordinary map made of the
    /// edges selected by `keep`; cilia are ignored.
    pub fn sub_map_genus(&self, keep: &[bool]) -> usize {
        let darts: Vec<usize> = (0..2 * self.n_edges()).filter(|&h| keep[h / 2]).collect();
        if darts.is_empty() {
            return 0;
        }
        let n = self.sigma.len();
        let mut next = vec![usize::MAX; n];
        for &h in &darts {
            let mut y = self.sigma[h];
            while !(y < 2 * self.n_edges() && keep[y / 2]) {
                y = self.sigma[y];
            }
            next[h] = y;
        }
        let mut idx = vec![usize::MAX; n];
        for (i, &h) in darts.iter().enumerate() {
            idx[h] = i;
        }
        let s: Vec<usize> = darts.iter().map(|&h| idx[next[h]]).collect();
        let face_perm: Vec<usize> = darts.iter().map(|&h| idx[next[h ^ 1]]).collect();
        let v = cycles(&s).len();
        let f = cycles(&face_perm).len();
        let e = darts.len() / 2;
        let mut uf = UnionFind::new(darts.len());
        for (i, &h) in darts.iter().enumerate() {
            uf.union(i, s[i]);
            uf.union(i, idx[h ^ 1]);
        }
        let comps = uf.sets();
        (2 * comps + e - v - f) / 2
    }

    pub fn genus(&self) -> usize {
        self.sub_map_genus(&vec![true; self.n_edges()])
    }

    fn edge_endpoints(&self) -> Vec<(usize, usize)> {
        let vof = self.vertex_of();
        (0..self.n_edges()).map(|i| (vof[2 * i], vof[2 * i + 1])).collect()
    }

    /// Number of edges in a spanning forest of the sub-map `keep`.
    fn forest_rank(&self, keep: &[bool]) -> usize {
        let ends = self.edge_endpoints();
        let mut uf = UnionFind::new(self.vertices().len());
        ends.iter()
            .enumerate()
            .filter(|(i, _)| keep[*i])
            .filter(|(_, &(a, b))| uf.union(a, b))
            .count()
    }

    pub fn is_bridge(&self, e: usize) -> bool {
        let mut keep = vec![true; self.n_edges()];
        let full = self.forest_rank(&keep);
        keep[e] = false;
        self.forest_rank(&keep) < full
    }

    pub fn structural_predicates(&self) -> Result<StructuralPredicates> {
        if !self.is_connected() {
            return Err(Error::RequiresConnected);
        }
        let e = self.n_edges();
        let v = self.n_vertices();
        let mut sector_planarity = BTreeMap::new();
        let mut sector_genus = BTreeMap::new();
        let mut t_edges = 0;
        let mut maximal: Vec<ColourSet> = self.edge_colours.iter().copied().filter(|c| c.is_maximal()).collect();
        maximal.sort();
        maximal.dedup();
        for c in maximal {
            let keep: Vec<bool> = self.edge_colours.iter().map(|&x| x == c).collect();
            let g = self.sub_map_genus(&keep);
            sector_genus.insert(c.to_string(), g);
            sector_planarity.insert(c.to_string(), g == 0);
            t_edges += self.forest_rank(&keep);
        }
        let nonmax: Vec<usize> = (0..e).filter(|&i| !self.edge_colours[i].is_maximal()).collect();
        t_edges += nonmax.len();
        Ok(StructuralPredicates {
            is_plane_tree: e + 1 == v,
            all_edges_monocoloured: self.edge_colours.iter().all(|c| c.len() == 1),
            nonmax_edges_all_bridges: nonmax.iter().all(|&i| self.is_bridge(i)),
            sector_planarity,
            sector_genus,
            t_map_is_tree: t_edges + 1 == v,
            map_genus: self.genus(),
        })
    }

    /// Every strand of every multicoloured edge lies on an external face.
    pub fn multicoloured_strands_external(&self) -> bool {
        let mut sigma_inv = vec![0; self.sigma.len()];
        for (x, &y) in self.sigma.iter().enumerate() {
            sigma_inv[y] = x;
        }
        for c in 1..=self.rank {
            let mut external = vec![false; self.sigma.len()];
            for f in self.face_cycles(c) {
                let ext = f.iter().any(|&x| self.is_cilium(x));
                for x in f {
                    external[x] = ext;
                }
            }
            for (i, col) in self.edge_colours.iter().enumerate() {
                if col.len() > 1 && col.contains(c) && !(external[sigma_inv[2 * i]] && external[sigma_inv[2 * i + 1]]) {
                    return false;
                }
            }
        }
        true
    }

    /// Removes edge `e`, splicing its half-edges out of their rotations.
    pub fn delete_edge(&self, e: usize) -> Result<StrandedMap> {
        if e >= self.n_edges() {
            return Err(Error::Invalid(format!("no edge {e}")));
        }
        let gone = |x: usize| x == 2 * e || x == 2 * e + 1;
        let n = self.sigma.len();
        let relabel = |x: usize| if x > 2 * e + 1 { x - 2 } else { x };
        let mut sigma = vec![0; n - 2];
        for x in (0..n).filter(|&x| !gone(x)) {
            let mut y = self.sigma[x];
            while gone(y) {
                y = self.sigma[y];
            }
            sigma[relabel(x)] = relabel(y);
        }
        let emptied = self
            .vertices()
            .iter()
            .filter(|cyc| cyc.iter().all(|&x| gone(x)))
            .count();
        let mut colours = self.edge_colours.clone();
        colours.remove(e);
        StrandedMap::new(self.rank, colours, sigma, self.cov_labels.clone(), self.bare_vertices + emptied)
    }

    /// BFS code of the map seen from dart `root`. Equal codes from two roots
    /// mean an isomorphism taking one root to the other.
    pub fn code_from(&self, root: usize, with_colours: bool) -> Vec<u32> {
        let n = self.sigma.len();
        let mut label = vec![u32::MAX; n];
        let mut order = Vec::with_capacity(n);
        label[root] = 0;
        order.push(root);
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            let mut nbrs = [Some(self.sigma[x]), self.epsilon(x)];
            for y in nbrs.iter_mut().flatten() {
                if label[*y] == u32::MAX {
                    label[*y] = order.len() as u32;
                    order.push(*y);
                }
            }
            i += 1;
        }
        let e2 = 2 * self.n_edges();
        let mut code = Vec::with_capacity(3 * order.len());
        for &x in &order {
            code.push(label[self.sigma[x]]);
            if self.is_cilium(x) {
                code.push(u32::MAX - (x - e2) as u32);
                code.push(self.cov_labels[x - e2] as u32);
            } else {
                code.push(label[x ^ 1]);
                code.push(if with_colours { self.edge_colours[x / 2].bits() as u32 } else { 0 });
            }
        }
        if order.len() < n {
            code.push(u32::MAX);
        }
        code
    }

    /// Smallest code over all roots, and the number of roots reaching it
    /// (the order of the automorphism group for connected maps).
    pub fn canonical_code(&self, with_colours: bool) -> (Vec<u32>, usize) {
        if self.sigma.is_empty() {
            return (vec![self.bare_vertices as u32], 1);
        }
        let mut best: Option<Vec<u32>> = None;
        let mut count = 0;
        for r in 0..self.sigma.len() {
            let c = self.code_from(r, with_colours);
            match &best {
                Some(b) if c > *b => {}
                Some(b) if c == *b => count += 1,
                _ => {
                    best = Some(c);
                    count = 1;
                }
            }
        }
        (best.unwrap(), count)
    }

    /// The map traversed with the opposite rotation at every vertex.
    pub fn mirror(&self) -> StrandedMap {
        let mut inv = vec![0; self.sigma.len()];
        for (x, &y) in self.sigma.iter().enumerate() {
            inv[y] = x;
        }
        StrandedMap {
            rank: self.rank,
            edge_colours: self.edge_colours.clone(),
            sigma: inv,
            cov_labels: self.cov_labels.clone(),
            bare_vertices: self.bare_vertices,
        }
    }
}

pub(crate) fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = p[x];
        }
        out.push(c);
    }
    out
}

/// Lower bound on the 1/N exponent of a connected map with boundary `b`.
pub fn omega_min(b: &BoundaryGraph, spec: &ModelSpec) -> Result<i64> {
    if spec.propagator != Propagator::Identity {
        return Err(Error::UnsupportedModel("omega_min needs the identity covariance".into()));
    }
    let d = spec.rank as i64;
    let k = b.k() as i64;
    if k == 0 {
        return Ok(-d);
    }
    let per_cilium = match spec.scaling {
        crate::colour_kernel::Scaling::Invariant => d - 1,
        crate::colour_kernel::Scaling::Enhanced => (d + 1) / 2,
    };
    Ok(-d + per_cilium * k + b.components() as i64)
}

/// Right-hand side of the internal face bound for a connected map.
pub fn face_bound(m: &StrandedMap) -> i64 {
    let d = m.rank() as i64;
    let k = m.k() as i64;
    let c = if k == 0 { 0 } else { m.boundary_or_empty().components() as i64 };
    let v = m.n_vertices() as i64;
    let e = m.n_edges() as i64;
    1 - (d - 1) * k - c + (d - 1) * v + (d / 2) * (e - v + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour_kernel::Scaling;

    fn cs(c: &[usize], d: usize) -> ColourSet {
        ColourSet::canonicalise(c, d).unwrap()
    }

    fn tree(d: usize, c: ColourSet) -> StrandedMap {
        StrandedMap::new(d, vec![c], vec![0, 1], vec![], 0).unwrap()
    }

    fn self_loop(d: usize, c: ColourSet) -> StrandedMap {
        StrandedMap::new(d, vec![c], vec![1, 0], vec![], 0).unwrap()
    }

    #[test]
    fn face_examples() {
        assert_eq!(StrandedMap::bare_vertex(3).internal_faces(), 3);
        assert_eq!(tree(3, cs(&[1], 3)).internal_faces(), 5);
        assert_eq!(self_loop(3, cs(&[1], 3)).internal_faces(), 4);
        let cil = StrandedMap::new(3, vec![], vec![0], vec![0], 0).unwrap();
        let f = cil.trace_faces();
        assert_eq!(f.total_internal(), 0);
        assert_eq!(f.external, vec![1, 1, 1]);
    }

    #[test]
    fn omega_examples() {
        let std3 = ModelSpec::full_quartic(3, Scaling::Invariant).unwrap();
        assert_eq!(tree(3, cs(&[1], 3)).omega(&std3).unwrap(), Rational64::from_integer(-3));
        assert_eq!(self_loop(3, cs(&[1], 3)).omega(&std3).unwrap(), Rational64::from_integer(-2));
        let enh4 = ModelSpec::full_quartic(4, Scaling::Enhanced).unwrap();
        let t = tree(4, cs(&[1, 2], 4));
        assert_eq!(t.internal_faces(), 6);
        assert_eq!(t.omega(&enh4).unwrap(), Rational64::from_integer(-4));
        let tft = ModelSpec::tft(3, Rational64::from_integer(1)).unwrap();
        assert!(t.omega(&tft).is_err());
    }

    #[test]
    fn omega_min_examples() {
        let std3 = ModelSpec::full_quartic(3, Scaling::Invariant).unwrap();
        assert_eq!(omega_min(&BoundaryGraph::identity(0, 3), &std3).unwrap(), -3);
        assert_eq!(omega_min(&BoundaryGraph::identity(1, 3), &std3).unwrap(), 0);
        let b = BoundaryGraph::new(2, vec![vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(omega_min(&b, &std3).unwrap(), 2);
    }

    #[test]
    fn boundary_examples() {
        let cil = StrandedMap::new(3, vec![], vec![0], vec![0], 0).unwrap();
        assert!(cil.map_boundary().unwrap().is_identity());
        // vertex A = (c0 h0), vertex B = (c1 h1)
        let two = StrandedMap::new(3, vec![cs(&[1], 3)], vec![2, 3, 0, 1], vec![0, 1], 0).unwrap();
        let b = two.map_boundary().unwrap();
        assert_eq!(b.tau(1), &[1, 0]);
        assert_eq!(b.tau(2), &[0, 1]);
        assert_eq!(b.tau(3), &[0, 1]);
        let neck = StrandedMap::new(4, vec![cs(&[1, 2], 4)], vec![2, 3, 0, 1], vec![0, 1], 0).unwrap();
        let b = neck.map_boundary().unwrap();
        assert_eq!(b.tau(1), &[1, 0]);
        assert_eq!(b.tau(2), &[1, 0]);
        assert_eq!(b.tau(3), &[0, 1]);
        assert_eq!(b.tau(4), &[0, 1]);
        assert_eq!(tree(3, cs(&[1], 3)).map_boundary(), Err(Error::NoBoundary));
    }

    #[test]
    fn predicate_examples() {
        let t = tree(3, cs(&[2], 3));
        let p = t.structural_predicates().unwrap();
        assert!(p.is_plane_tree && p.all_edges_monocoloured && p.nonmax_edges_all_bridges && p.t_map_is_tree);
        let planar = self_loop(4, cs(&[1, 2], 4));
        let p = planar.structural_predicates().unwrap();
        assert_eq!(p.sector_genus["{1,2}"], 0);
        assert!(p.t_map_is_tree);
        // one vertex, rotation (0 2 1 3): two crossing loops
        let crossing = StrandedMap::new(4, vec![cs(&[1, 2], 4); 2], vec![2, 3, 1, 0], vec![], 0).unwrap();
        assert_eq!(crossing.vertices().len(), 1);
        let p = crossing.structural_predicates().unwrap();
        assert_eq!(p.sector_genus["{1,2}"], 1);
        assert!(!p.sector_planarity["{1,2}"]);
        let two = StrandedMap::new(3, vec![], vec![0, 1], vec![0, 1], 0).unwrap();
        assert_eq!(two.structural_predicates(), Err(Error::RequiresConnected));
    }

    #[test]
    fn deleting_a_loop_edge() {
        let m = self_loop(3, cs(&[1], 3));
        let d = m.delete_edge(0).unwrap();
        assert_eq!(d.n_vertices(), 1);
        assert_eq!(d.internal_faces(), 3);
        let t = tree(3, cs(&[1], 3)).delete_edge(0).unwrap();
        assert_eq!(t.n_vertices(), 2);
        assert_eq!(t.components(), 2);
    }

    #[test]
    fn json_round_trip_and_relabelling() {
        let src = r#"{"D":3,"half_edges":[{"id":7,"colours":[2]},{"id":3,"colours":[2]}],
            "cilia":[5],"sigma":[[5,7,3]],"epsilon":[[7,3]]}"#;
        let m: StrandedMap = serde_json::from_str(src).unwrap();
        assert_eq!(m.n_edges(), 1);
        assert_eq!(m.k(), 1);
        assert_eq!(m.sigma(), &[2, 0, 1]);
        let again: StrandedMap = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(again, m);
        let bad = r#"{"D":3,"half_edges":[{"id":0,"colours":[2,3]},{"id":1,"colours":[2,3]}],
            "cilia":[],"sigma":[[0,1]],"epsilon":[[0,1]]}"#;
        assert!(serde_json::from_str::<StrandedMap>(bad).is_err());
    }

    #[test]
    fn d2_genus_exponent() {
        // crossing self-loops at D=2: genus 1, exponent 2 - 2g = 0
        let spec = ModelSpec::melonic(2, Scaling::Invariant).unwrap();
        let m = StrandedMap::new(2, vec![cs(&[1], 2); 2], vec![2, 3, 1, 0], vec![], 0).unwrap();
        assert_eq!(m.genus(), 1);
        assert_eq!(-m.omega(&spec).unwrap(), Rational64::from_integer(0));
    }
}
