//! Bipartite (D+1)-coloured Feynman graphs of quartic models.
//!
//! Hollow vertices stand for `T`, solid ones for `T̄`. Colour 0 carries the
//! Wick contractions and always runs hollow to solid. External legs are
//! monovalent vertices whose only edge has colour 0: a covariant leg (`"T"`)
//! is hollow and a dual leg (`"Tbar"`) is solid.

use std::collections::BTreeMap;

use num::rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::colour_kernel::{BoundaryGraph, ColourSet, ModelSpec, Propagator, UnionFind};
use crate::error::{Error, Result};
use crate::series::SeriesTerm;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Hollow,
    Solid,
    Ext,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "T")]
    Covariant,
    #[serde(rename = "Tbar")]
    Dual,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Edge {
    #[serde(rename = "c")]
    pub colour: usize,
    #[serde(rename = "h")]
    pub hollow: usize,
    #[serde(rename = "s")]
    pub solid: usize,
}

/// `at` is the id of the monovalent leg vertex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Leg {
    pub label: usize,
    pub pol: Polarity,
    pub at: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct VertexJson {
    id: usize,
    kind: VertexKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GraphJson {
    #[serde(rename = "D")]
    rank: usize,
    vertices: Vec<VertexJson>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

/// A quartic bubble recovered from the colour 1..D structure. `pairs[i]` is a
/// hollow vertex and the solid vertex it meets through the colours outside
/// `colours`; the two pairs are ordered by hollow id.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Bubble {
    pub colours: ColourSet,
    pub pairs: [(usize, usize); 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct ColouredGraph {
    rank: usize,
    kinds: Vec<VertexKind>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
    /// `adj[v][c]`: the neighbour of `v` along colour `c`.
    adj: Vec<Vec<Option<usize>>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceKind {
    Internal,
    External,
}

/// A (0,c)-bicoloured component. `walk` lists hollow/solid vertices in
/// order along colour 0 from hollow to solid. External faces run from a
/// covariant leg to a dual leg; `endpoints` holds their labels.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Face {
    pub colour: usize,
    pub walk: Vec<usize>,
    pub kind: FaceKind,
    pub endpoints: Option<(usize, usize)>,
}

impl TryFrom<GraphJson> for ColouredGraph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        let n = j.vertices.len();
        let mut kinds = vec![None; n];
        for v in &j.vertices {
            if v.id >= n || kinds[v.id].is_some() {
                return Err(Error::MalformedGraph(format!(
                    "vertex ids must be 0..{n} without repeats (got {})",
                    v.id
                )));
            }
            kinds[v.id] = Some(v.kind);
        }
        let kinds = kinds.into_iter().map(|k| k.unwrap()).collect();
        ColouredGraph::new(j.rank, kinds, j.edges, j.legs)
    }
}

impl From<ColouredGraph> for GraphJson {
    fn from(g: ColouredGraph) -> Self {
        GraphJson {
            rank: g.rank,
            vertices: g
                .kinds
                .iter()
                .enumerate()
                .map(|(id, &kind)| VertexJson { id, kind })
                .collect(),
            edges: g.edges,
            legs: g.legs,
        }
    }
}

impl ColouredGraph {
    /// Validates vertex valences and colours. Colour-0 slots of internal
    /// vertices may be left open; `faces` rejects such graphs.
    pub fn new(rank: usize, kinds: Vec<VertexKind>, edges: Vec<Edge>, legs: Vec<Leg>) -> Result<Self> {
        if !(2..=crate::colour_kernel::MAX_RANK).contains(&rank) {
            return Err(Error::MalformedGraph(format!("rank {rank} out of range")));
        }
        let n = kinds.len();
        let mut adj = vec![vec![None; rank + 1]; n];
        for e in &edges {
            if e.colour > rank {
                return Err(Error::MalformedGraph(format!("colour {} > D", e.colour)));
            }
            if e.hollow >= n || e.solid >= n {
                return Err(Error::MalformedGraph("edge endpoint out of range".into()));
            }
            let (kh, ks) = (kinds[e.hollow], kinds[e.solid]);
            let ok = match (kh, ks) {
                (VertexKind::Hollow, VertexKind::Solid) => true,
                (VertexKind::Ext, VertexKind::Solid)
                | (VertexKind::Hollow, VertexKind::Ext)
                | (VertexKind::Ext, VertexKind::Ext) => e.colour == 0,
                _ => false,
            };
            if !ok {
                return Err(Error::MalformedGraph(format!(
                    "edge {e:?} does not join a hollow side to a solid side"
                )));
            }
            for (v, w) in [(e.hollow, e.solid), (e.solid, e.hollow)] {
                if adj[v][e.colour].replace(w).is_some() {
                    return Err(Error::MalformedGraph(format!(
                        "vertex {v} has two edges of colour {}",
                        e.colour
                    )));
                }
            }
        }
        for (v, k) in kinds.iter().enumerate() {
            match k {
                VertexKind::Ext => {
                    if adj[v][1..].iter().any(Option::is_some) {
                        return Err(Error::MalformedGraph(format!(
                            "external leg {v} carries a coloured edge"
                        )));
                    }
                }
                _ => {
                    if adj[v][1..].iter().any(Option::is_none) {
                        return Err(Error::MalformedGraph(format!(
                            "vertex {v} is missing a colour in 1..=D"
                        )));
                    }
                }
            }
        }
        let mut leg_at = vec![None; n];
        for l in &legs {
            if l.at >= n || kinds[l.at] != VertexKind::Ext {
                return Err(Error::MalformedGraph(format!("leg {l:?} is not on an ext vertex")));
            }
            if leg_at[l.at].replace(l.pol).is_some() {
                return Err(Error::MalformedGraph(format!("two legs on vertex {}", l.at)));
            }
        }
        for (v, k) in kinds.iter().enumerate() {
            if *k == VertexKind::Ext {
                let pol = leg_at[v].ok_or_else(|| {
                    Error::MalformedGraph(format!("ext vertex {v} has no leg record"))
                })?;
                if let Some(w) = adj[v][0] {
                    let expected = match pol {
                        Polarity::Covariant => edges.iter().any(|e| e.colour == 0 && e.hollow == v && e.solid == w),
                        Polarity::Dual => edges.iter().any(|e| e.colour == 0 && e.solid == v && e.hollow == w),
                    };
                    if !expected {
                        return Err(Error::MalformedGraph(format!(
                            "leg on {v} has the wrong polarity for its edge"
                        )));
                    }
                }
            }
        }
        let g = ColouredGraph {
            rank,
            kinds,
            edges,
            legs,
            adj,
        };
        if g.count(VertexKind::Hollow) != g.count(VertexKind::Solid) {
            return Err(Error::MalformedGraph("|hollow| != |solid|".into()));
        }
        g.bubbles()?;
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn neighbour(&self, v: usize, c: usize) -> Option<usize> {
        self.adj[v][c]
    }

    fn count(&self, k: VertexKind) -> usize {
        self.kinds.iter().filter(|&&x| x == k).count()
    }

    /// Number of covariant (equivalently dual) legs.
    pub fn k(&self) -> usize {
        self.legs
            .iter()
            .filter(|l| l.pol == Polarity::Covariant)
            .count()
    }

    /// Colour-0 edges joining two internal vertices.
    pub fn internal_colour0(&self) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                e.colour == 0
                    && self.kinds[e.hollow] == VertexKind::Hollow
                    && self.kinds[e.solid] == VertexKind::Solid
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// The connected D-coloured components, ordered by smallest vertex id.
    /// Every component must be a quartic invariant.
    pub fn bubbles(&self) -> Result<Vec<Bubble>> {
        let n = self.kinds.len();
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            if e.colour > 0 {
                uf.union(e.hollow, e.solid);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            if self.kinds[v] != VertexKind::Ext {
                groups.entry(uf.find(v)).or_default().push(v);
            }
        }
        let mut out: Vec<Bubble> = Vec::new();
        for (_, vs) in groups {
            out.push(self.quartic_bubble(&vs)?);
        }
        out.sort_by_key(|b| b.pairs[0].0.min(b.pairs[0].1).min(b.pairs[1].1));
        Ok(out)
    }

    fn quartic_bubble(&self, vs: &[usize]) -> Result<Bubble> {
        let hollow: Vec<usize> = vs
            .iter()
            .copied()
            .filter(|&v| self.kinds[v] == VertexKind::Hollow)
            .collect();
        if vs.len() != 4 || hollow.len() != 2 {
            return Err(Error::UnsupportedBubble(format!(
                "bubble on vertices {vs:?} is not quartic"
            )));
        }
        let d = self.rank;
        let (h1, h2) = (hollow[0], hollow[1]);
        let s_a = self.adj[h1][1].unwrap();
        let mut bits_to_a = 0u16;
        for c in 1..=d {
            if self.adj[h1][c] == Some(s_a) {
                bits_to_a |= 1 << (c - 1);
            }
        }
        let to_a = ColourSet::from_bits(bits_to_a, d).ok();
        let s_b = (1..=d)
            .filter_map(|c| self.adj[h1][c])
            .find(|&s| s != s_a);
        let (to_a, s_b) = match (to_a, s_b) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::UnsupportedBubble(format!(
                    "bubble on vertices {vs:?} is not connected as a quartic invariant"
                )))
            }
        };
        for c in 1..=d {
            let (x, y) = if to_a.contains(c) { (s_a, s_b) } else { (s_b, s_a) };
            if self.adj[h1][c] != Some(x) || self.adj[h2][c] != Some(y) {
                return Err(Error::UnsupportedBubble(format!(
                    "bubble on vertices {vs:?} is not a quartic invariant"
                )));
            }
        }
        let colours = to_a.canonical();
        // The partner of h1 within its pair is the solid vertex reached through D\C.
        let partner1 = if to_a == colours { s_b } else { s_a };
        let partner2 = if partner1 == s_a { s_b } else { s_a };
        Ok(Bubble {
            colours,
            pairs: [(h1, partner1), (h2, partner2)],
        })
    }

    /// Faces of every colour. Fails if an internal vertex has an open colour-0 slot.
    pub fn faces(&self) -> Result<Vec<Face>> {
        for (v, k) in self.kinds.iter().enumerate() {
            if self.adj[v][0].is_none() {
                return Err(Error::MalformedGraph(format!(
                    "vertex {v} ({k:?}) has a dangling colour-0 slot"
                )));
            }
        }
        let label_of = |v: usize| self.legs.iter().find(|l| l.at == v).map(|l| l.label);
        let mut out = Vec::new();
        for c in 1..=self.rank {
            let mut seen = vec![false; self.kinds.len()];
            // Open faces start on covariant legs.
            for l in self.legs.iter().filter(|l| l.pol == Polarity::Covariant) {
                let mut walk = Vec::new();
                let mut x = l.at;
                let end = loop {
                    let y = self.adj[x][0].unwrap();
                    if self.kinds[x] != VertexKind::Ext {
                        walk.push(x);
                        seen[x] = true;
                    }
                    if self.kinds[y] == VertexKind::Ext {
                        break y;
                    }
                    walk.push(y);
                    x = self.adj[y][c].unwrap();
                };
                out.push(Face {
                    colour: c,
                    walk,
                    kind: FaceKind::External,
                    endpoints: Some((l.label, label_of(end).unwrap())),
                });
            }
            for start in 0..self.kinds.len() {
                if self.kinds[start] != VertexKind::Hollow || seen[start] {
                    continue;
                }
                let mut walk = Vec::new();
                let mut x = start;
                loop {
                    seen[x] = true;
                    let y = self.adj[x][0].unwrap();
                    walk.push(x);
                    walk.push(y);
                    x = self.adj[y][c].unwrap();
                    if x == start {
                        break;
                    }
                }
                out.push(Face {
                    colour: c,
                    walk: rotate_to_min_hollow(walk),
                    kind: FaceKind::Internal,
                    endpoints: None,
                });
            }
        }
        Ok(out)
    }

    /// Internal and external face counts per colour (index `c-1`).
    pub fn face_counts(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut int = vec![0; self.rank];
        let mut ext = vec![0; self.rank];
        for f in self.faces()? {
            match f.kind {
                FaceKind::Internal => int[f.colour - 1] += 1,
                FaceKind::External => ext[f.colour - 1] += 1,
            }
        }
        Ok((int, ext))
    }

    pub fn internal_faces(&self) -> Result<usize> {
        Ok(self.face_counts()?.0.iter().sum())
    }

    /// Reads `tau[c](d)` off the external face of colour `c` ending on dual leg `d`.
    pub fn boundary_graph(&self) -> Result<BoundaryGraph> {
        let k = self.k();
        let mut cov = vec![false; k];
        let mut dual = vec![false; k];
        for l in &self.legs {
            let slot = match l.pol {
                Polarity::Covariant => &mut cov,
                Polarity::Dual => &mut dual,
            };
            if l.label == 0 || l.label > k || slot[l.label - 1] {
                return Err(Error::MalformedGraph(format!(
                    "legs must be labelled 1..={k} once per polarity"
                )));
            }
            slot[l.label - 1] = true;
        }
        if !dual.iter().all(|&x| x) {
            return Err(Error::MalformedGraph("unbalanced legs".into()));
        }
        let mut tau = vec![vec![usize::MAX; k]; self.rank];
        for f in self.faces()? {
            if let Some((a, d)) = f.endpoints {
                tau[f.colour - 1][d - 1] = a - 1;
            }
        }
        BoundaryGraph::new(k, tau)
    }

    /// Exact amplitude `(-1)^|B| N^(F_int + sum alpha_C)` with one coupling
    /// degree per bubble of each family.
    pub fn invariant_amplitude(&self, m: &ModelSpec) -> Result<SeriesTerm> {
        if m.propagator != Propagator::Identity {
            return Err(Error::UnsupportedModel(
                "amplitudes are evaluated only for the identity covariance".into(),
            ));
        }
        if m.rank != self.rank {
            return Err(Error::UnsupportedModel("rank mismatch".into()));
        }
        let mut degrees = vec![0u32; m.couplings.len()];
        let mut exponent = self.internal_faces()? as i64;
        let bubbles = self.bubbles()?;
        for b in &bubbles {
            let f = m.family_of(b.colours).ok_or_else(|| {
                Error::UnsupportedBubble(format!("{} is not an interaction of the model", b.colours))
            })?;
            degrees[f] += 1;
            exponent += m.alpha(b.colours);
        }
        let sign = if bubbles.len() % 2 == 0 { 1 } else { -1 };
        Ok(SeriesTerm {
            coupling_degrees: degrees,
            n_exponent: Rational64::from_integer(exponent),
            coefficient: num::BigRational::from_integer(sign.into()),
        })
    }

    /// Canonical key for isomorphism preserving bubble labels and leg labels.
    /// The two pairs of each bubble may be exchanged.
    pub fn labelled_key(&self) -> Result<Vec<i64>> {
        let bubbles = self.bubbles()?;
        let b = bubbles.len();
        if b > 20 {
            return Err(Error::Invalid("too many bubbles for a key".into()));
        }
        let leg_code = |v: usize| -> i64 {
            let l = self.legs.iter().find(|l| l.at == v).unwrap();
            -(l.label as i64) - 1
        };
        let mut best: Option<Vec<i64>> = None;
        for flips in 0..(1u32 << b) {
            let mut slot_of = BTreeMap::new();
            for (i, bb) in bubbles.iter().enumerate() {
                let swap = flips >> i & 1 == 1;
                for (p, &(h, s)) in bb.pairs.iter().enumerate() {
                    let code = (2 * i + (p ^ usize::from(swap))) as i64;
                    slot_of.insert(h, code);
                    slot_of.insert(s, code);
                }
            }
            let code_of = |v: usize| -> i64 {
                if self.kinds[v] == VertexKind::Ext {
                    leg_code(v)
                } else {
                    slot_of[&v]
                }
            };
            let mut key: Vec<i64> = bubbles
                .iter()
                .map(|bb| bb.colours.bits() as i64)
                .collect();
            let mut zero: Vec<(i64, i64)> = self
                .edges
                .iter()
                .filter(|e| e.colour == 0)
                .map(|e| (code_of(e.hollow), code_of(e.solid)))
                .collect();
            zero.sort();
            key.push(-1000);
            for (a, s) in zero {
                key.push(a);
                key.push(s);
            }
            if best.as_ref().map_or(true, |bk| key < *bk) {
                best = Some(key);
            }
        }
        Ok(best.unwrap_or_default())
    }

    /// True when the graph is connected through all colours.
    pub fn is_connected(&self) -> bool {
        let n = self.kinds.len();
        if n == 0 {
            return true;
        }
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            uf.union(e.hollow, e.solid);
        }
        uf.sets() == 1
    }
}

fn rotate_to_min_hollow(walk: Vec<usize>) -> Vec<usize> {
    let (pos, _) = walk
        .iter()
        .enumerate()
        .step_by(2)
        .min_by_key(|(_, &v)| v)
        .unwrap();
    let mut w = walk[pos..].to_vec();
    w.extend_from_slice(&walk[..pos]);
    w
}

/// Vertex layout of bubble `i`: hollow `4i`, solid `4i+1` (first pair),
/// hollow `4i+2`, solid `4i+3` (second pair).
fn bubble_edges(i: usize, c: ColourSet) -> Vec<Edge> {
    let d = c.rank();
    let (ha, sa, hb, sb) = (4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3);
    let mut edges = Vec::new();
    for col in 1..=d {
        if c.contains(col) {
            edges.push(Edge { colour: col, hollow: ha, solid: sb });
            edges.push(Edge { colour: col, hollow: hb, solid: sa });
        } else {
            edges.push(Edge { colour: col, hollow: ha, solid: sa });
            edges.push(Edge { colour: col, hollow: hb, solid: sb });
        }
    }
    edges
}

/// The four-vertex graph of `V_C` with its colour-0 slots open.
pub fn build_bubble(c: ColourSet, rank: usize) -> Result<ColouredGraph> {
    if c.rank() != rank || !c.is_canonical() {
        return Err(Error::InvalidColourSet(format!("{c} is not canonical at rank {rank}")));
    }
    ColouredGraph::new(
        rank,
        vec![VertexKind::Hollow, VertexKind::Solid, VertexKind::Hollow, VertexKind::Solid],
        bubble_edges(0, c),
        vec![],
    )
}

/// Graph with bubbles `bubbles` (in the standard layout) and `k` leg pairs,
/// closed by the colour-0 matching `wick`: slot `x` of the hollow side is
/// joined to slot `wick[x]` of the solid side. Hollow slots are the bubble
/// hollows in order then the covariant legs; solid slots likewise with
/// dual legs.
pub fn wick_graph(rank: usize, bubbles: &[ColourSet], k: usize, wick: &[usize]) -> Result<ColouredGraph> {
    let b = bubbles.len();
    let slots = 2 * b + k;
    if wick.len() != slots || !crate::colour_kernel::is_permutation(wick, slots) {
        return Err(Error::Invalid("wick matching is not a permutation of the slots".into()));
    }
    let mut kinds = Vec::with_capacity(4 * b + 2 * k);
    let mut edges = Vec::new();
    for (i, &c) in bubbles.iter().enumerate() {
        kinds.extend([VertexKind::Hollow, VertexKind::Solid, VertexKind::Hollow, VertexKind::Solid]);
        edges.extend(bubble_edges(i, c));
    }
    let mut legs = Vec::new();
    for j in 0..k {
        kinds.extend([VertexKind::Ext, VertexKind::Ext]);
        legs.push(Leg { label: j + 1, pol: Polarity::Covariant, at: 4 * b + 2 * j });
        legs.push(Leg { label: j + 1, pol: Polarity::Dual, at: 4 * b + 2 * j + 1 });
    }
    let hollow = |x: usize| if x < 2 * b { 4 * (x / 2) + 2 * (x % 2) } else { 4 * b + 2 * (x - 2 * b) };
    let solid = |x: usize| if x < 2 * b { 4 * (x / 2) + 2 * (x % 2) + 1 } else { 4 * b + 2 * (x - 2 * b) + 1 };
    for (x, &y) in wick.iter().enumerate() {
        edges.push(Edge { colour: 0, hollow: hollow(x), solid: solid(y) });
    }
    ColouredGraph::new(rank, kinds, edges, legs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour_kernel::Scaling;

    fn cs(c: &[usize], d: usize) -> ColourSet {
        ColourSet::canonicalise(c, d).unwrap()
    }

    #[test]
    fn bubble_shapes() {
        let g = build_bubble(cs(&[1], 3), 3).unwrap();
        let b = g.bubbles().unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].colours, cs(&[1], 3));
        // colour 1 crosses pairs, colours 2 and 3 stay inside
        assert_eq!(g.neighbour(0, 1), Some(3));
        assert_eq!(g.neighbour(0, 2), Some(1));
        assert_eq!(g.neighbour(0, 3), Some(1));
        assert!(g.faces().is_err());

        let n = build_bubble(cs(&[1, 2], 4), 4).unwrap();
        // necklace: each hollow meets each solid through two colours
        for h in [0, 2] {
            let mut nb: Vec<usize> = (1..=4).map(|c| n.neighbour(h, c).unwrap()).collect();
            nb.sort();
            assert_eq!(nb, vec![1, 1, 3, 3]);
        }
        let m = build_bubble(cs(&[1], 2), 2).unwrap();
        assert_eq!(m.edges().len(), 4);
        assert!(build_bubble(ColourSet::from_colours(&[2, 3], 3).unwrap(), 3).is_err());
    }

    #[test]
    fn one_bubble_vacuum_faces() {
        let v1 = cs(&[1], 3);
        // hollow a -> solid a, hollow b -> solid b: the melonic closure
        let melon = wick_graph(3, &[v1], 0, &[0, 1]).unwrap();
        assert_eq!(melon.internal_faces().unwrap(), 5);
        let other = wick_graph(3, &[v1], 0, &[1, 0]).unwrap();
        assert_eq!(other.internal_faces().unwrap(), 4);
        let m = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let a = melon.invariant_amplitude(&m).unwrap();
        assert_eq!(a.n_exponent, Rational64::from_integer(3));
        assert_eq!(a.coefficient, num::BigRational::from_integer((-1).into()));
        let a = other.invariant_amplitude(&m).unwrap();
        assert_eq!(a.n_exponent, Rational64::from_integer(2));
    }

    #[test]
    fn propagator_and_empty_graph() {
        let g = wick_graph(3, &[], 1, &[0]).unwrap();
        let (int, ext) = g.face_counts().unwrap();
        assert_eq!(int.iter().sum::<usize>(), 0);
        assert_eq!(ext, vec![1, 1, 1]);
        assert!(g.boundary_graph().unwrap().is_identity());
        let e = wick_graph(3, &[], 0, &[]).unwrap();
        let m = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let a = e.invariant_amplitude(&m).unwrap();
        assert_eq!(a.n_exponent, Rational64::from_integer(0));
        assert_eq!(a.coefficient, num::BigRational::from_integer(1.into()));
    }

    #[test]
    fn two_propagators_boundary() {
        let straight = wick_graph(3, &[], 2, &[0, 1]).unwrap();
        assert!(straight.boundary_graph().unwrap().is_identity());
        let crossed = wick_graph(3, &[], 2, &[1, 0]).unwrap();
        let b = crossed.boundary_graph().unwrap();
        for c in 1..=3 {
            assert_eq!(b.tau(c), &[1, 0]);
        }
    }

    #[test]
    fn one_bubble_four_legs() {
        // every slot of V_{1} goes to its own leg: no internal colour-0 edge
        let g = wick_graph(3, &[cs(&[1], 3)], 2, &[2, 3, 0, 1]).unwrap();
        assert!(g.internal_colour0().is_empty());
        let b = g.boundary_graph().unwrap();
        assert_eq!(b.tau(1), &[1, 0]);
        assert_eq!(b.tau(2), &[0, 1]);
        assert_eq!(b.tau(3), &[0, 1]);
    }

    #[test]
    fn tft_amplitude_is_rejected() {
        let g = wick_graph(3, &[cs(&[1], 3)], 0, &[0, 1]).unwrap();
        let m = ModelSpec::tft(3, Rational64::from_integer(1)).unwrap();
        assert!(matches!(g.invariant_amplitude(&m), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn json_round_trip() {
        let g = wick_graph(3, &[cs(&[2], 3)], 1, &[1, 2, 0]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains(r#""pol":"Tbar""#));
        let back: ColouredGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back.labelled_key().unwrap(), g.labelled_key().unwrap());
    }

    #[test]
    fn faces_cover_every_strand_slot() {
        let q = [cs(&[1], 3), cs(&[3], 3)];
        for wick in [[0, 1, 2, 3, 4], [4, 3, 2, 1, 0], [1, 2, 3, 4, 0]] {
            let g = wick_graph(3, &q, 1, &wick).unwrap();
            let faces = g.faces().unwrap();
            for c in 1..=3 {
                let mut hollow: Vec<usize> = faces
                    .iter()
                    .filter(|f| f.colour == c)
                    .flat_map(|f| f.walk.iter().copied())
                    .filter(|&v| g.kinds()[v] == VertexKind::Hollow)
                    .collect();
                hollow.sort();
                assert_eq!(hollow, vec![0, 2, 4, 6]);
            }
            let ext = faces.iter().filter(|f| f.kind == FaceKind::External).count();
            assert_eq!(ext, 3 * g.k());
        }
    }
}
