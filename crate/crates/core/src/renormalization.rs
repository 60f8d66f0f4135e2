//! Multiscale power counting for tensor field theories.
//!
//! Graph-level tools (scale attributions, high subgraphs) work on
//! [`ColouredGraph`]. Divergence degrees, surveys and the enhanced rank-4
//! checks work on maps, where an internal colour-0 edge is a corner with no
//! cilium. A derivative insertion on a necklace is a [`Mark`]: a side of the
//! edge and a colour, sitting on the face of that colour through that dart.

use std::collections::BTreeMap;
use std::fmt;

use num::rational::Rational64;
use num::{BigRational, One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::colour_kernel::{BoundaryGraph, ColourSet, ModelSpec, Propagator, UnionFind};
use crate::coloured_graphs::{ColouredGraph, FaceKind, VertexKind};
use crate::enumeration::{for_each_colouring, permutations, skeletons, SkeletonTables};
use crate::error::{budget, Error, Result};
use crate::stranded_maps::StrandedMap;

/// One scale per internal colour-0 edge, in the order of
/// [`ColouredGraph::internal_colour0`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaleAttribution {
    pub scales: Vec<u32>,
    pub j_max: u32,
}

impl ScaleAttribution {
    pub fn new(scales: Vec<u32>, j_max: u32) -> Result<Self> {
        if scales.iter().any(|&j| j == 0 || j > j_max) {
            return Err(Error::Invalid(format!("scales must lie in 1..={j_max}")));
        }
        Ok(ScaleAttribution { scales, j_max })
    }

    pub fn uniform(edges: usize, j: u32) -> Self {
        ScaleAttribution { scales: vec![j; edges], j_max: j }
    }
}

/// A connected component `G_i^k`: bubble indices (as in
/// [`ColouredGraph::bubbles`]) and positions in the internal edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HighSubgraph {
    pub scale: u32,
    pub bubbles: Vec<usize>,
    pub propagators: Vec<usize>,
}

fn bubble_of(g: &ColouredGraph) -> Result<Vec<usize>> {
    let mut of = vec![usize::MAX; g.kinds().len()];
    for (i, b) in g.bubbles()?.iter().enumerate() {
        for &(h, s) in &b.pairs {
            of[h] = i;
            of[s] = i;
        }
    }
    Ok(of)
}

/// For every scale `i` in `1..=j_max`, the components left after deleting
/// propagators of scale below `i`; bubbles without a kept propagator are dropped.
pub fn high_subgraphs(g: &ColouredGraph, mu: &ScaleAttribution) -> Result<Vec<HighSubgraph>> {
    let internal = g.internal_colour0();
    if internal.len() != mu.scales.len() {
        return Err(Error::Invalid(format!(
            "attribution has {} scales for {} internal propagators",
            mu.scales.len(),
            internal.len()
        )));
    }
    let of = bubble_of(g)?;
    let nb = g.bubbles()?.len();
    let mut out = Vec::new();
    for i in 1..=mu.j_max {
        let kept: Vec<usize> = (0..internal.len()).filter(|&p| mu.scales[p] >= i).collect();
        if kept.is_empty() {
            continue;
        }
        let mut uf = UnionFind::new(nb);
        let mut touched = vec![false; nb];
        for &p in &kept {
            let e = g.edges()[internal[p]];
            let (a, b) = (of[e.hollow], of[e.solid]);
            uf.union(a, b);
            touched[a] = true;
            touched[b] = true;
        }
        let mut comps: BTreeMap<usize, HighSubgraph> = BTreeMap::new();
        for b in (0..nb).filter(|&b| touched[b]) {
            comps
                .entry(uf.find(b))
                .or_insert_with(|| HighSubgraph { scale: i, bubbles: Vec::new(), propagators: Vec::new() })
                .bubbles
                .push(b);
        }
        for &p in &kept {
            let e = g.edges()[internal[p]];
            comps.get_mut(&uf.find(of[e.hollow])).unwrap().propagators.push(p);
        }
        let mut v: Vec<HighSubgraph> = comps.into_values().collect();
        v.sort_by(|a, b| a.bubbles.cmp(&b.bubbles));
        out.extend(v);
    }
    Ok(out)
}

/// Every component at scale `i + 1` lies inside one component at scale `i`.
pub fn is_nested(subs: &[HighSubgraph]) -> bool {
    subs.iter().filter(|s| s.scale > 1).all(|s| {
        subs.iter().any(|p| {
            p.scale + 1 == s.scale
                && s.bubbles.iter().all(|b| p.bubbles.contains(b))
                && s.propagators.iter().all(|e| p.propagators.contains(e))
        })
    })
}

/// Internal faces of the subgraph made of the kept propagators and the
/// bubbles they touch.
pub fn subgraph_internal_faces(g: &ColouredGraph, kept: &[usize]) -> Result<usize> {
    let internal = g.internal_colour0();
    let n = g.kinds().len();
    let mut has0 = vec![false; n];
    let mut inside = vec![false; n];
    let of = bubble_of(g)?;
    let mut bubble_in = vec![false; g.bubbles()?.len()];
    for &p in kept {
        let e = g.edges()[internal[p]];
        has0[e.hollow] = true;
        has0[e.solid] = true;
        bubble_in[of[e.hollow]] = true;
        bubble_in[of[e.solid]] = true;
    }
    for v in 0..n {
        inside[v] = g.kinds()[v] != VertexKind::Ext && bubble_in[of[v]];
    }
    let mut total = 0;
    for c in 1..=g.rank() {
        let mut uf = UnionFind::new(n);
        for &p in kept {
            let e = g.edges()[internal[p]];
            uf.union(e.hollow, e.solid);
        }
        for v in (0..n).filter(|&v| inside[v]) {
            if let Some(w) = g.neighbour(v, c) {
                uf.union(v, w);
            }
        }
        let mut open: BTreeMap<usize, bool> = BTreeMap::new();
        for v in (0..n).filter(|&v| inside[v]) {
            *open.entry(uf.find(v)).or_insert(false) |= !has0[v];
        }
        total += open.values().filter(|&&o| !o).count();
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerCountCheck {
    /// `sum_e j_e` and `sum_{i,k} |E^0(G_i^k)|`.
    pub edge_exponents: (i64, i64),
    /// `sum_f j_min(f)` over internal faces and `sum_{i,k} F_int(G_i^k)`.
    pub face_exponents: (i64, i64),
    pub holds: bool,
}

/// The exponent bookkeeping behind the multiscale bound: propagator and face
/// powers of `M` regroup exactly over the high subgraphs.
pub fn powercount_bound_check(g: &ColouredGraph, mu: &ScaleAttribution) -> Result<PowerCountCheck> {
    let subs = high_subgraphs(g, mu)?;
    let internal = g.internal_colour0();
    let edge_lhs: i64 = mu.scales.iter().map(|&j| j as i64).sum();
    let edge_rhs: i64 = subs.iter().map(|s| s.propagators.len() as i64).sum();
    let mut scale_at = vec![0u32; g.kinds().len()];
    for (p, &e) in internal.iter().enumerate() {
        scale_at[g.edges()[e].hollow] = mu.scales[p];
    }
    let mut face_lhs = 0i64;
    for f in g.faces()? {
        if f.kind == FaceKind::Internal {
            let j = f
                .walk
                .iter()
                .filter(|&&v| g.kinds()[v] == VertexKind::Hollow)
                .map(|&v| scale_at[v])
                .min()
                .unwrap_or(0);
            face_lhs += j as i64;
        }
    }
    let mut face_rhs = 0i64;
    for s in &subs {
        face_rhs += subgraph_internal_faces(g, &s.propagators)? as i64;
    }
    Ok(PowerCountCheck {
        edge_exponents: (edge_lhs, edge_rhs),
        face_exponents: (face_lhs, face_rhs),
        holds: edge_lhs == edge_rhs && face_lhs == face_rhs,
    })
}

fn eta_of(spec: &ModelSpec) -> Result<Rational64> {
    match spec.propagator {
        Propagator::PowerLaplacian { eta } => Ok(eta),
        Propagator::Identity => Err(Error::UnsupportedModel(
            "divergence degrees need a power-law covariance; use omega for the 1/N exponent".into(),
        )),
    }
}

/// `omega = -2 eta |E^0| + F_int` of a graph without derivative insertions.
pub fn graph_divergence_degree(g: &ColouredGraph, spec: &ModelSpec) -> Result<Rational64> {
    let eta = eta_of(spec)?;
    if spec.marked_necklaces && g.bubbles()?.iter().any(|b| b.colours.len() == 2) {
        return Err(Error::UnsupportedModel("derivative necklaces need a marked map".into()));
    }
    let e0 = g.internal_colour0().len() as i64;
    Ok(Rational64::from_integer(g.internal_faces()? as i64) - eta * 2 * e0)
}

/// A derivative insertion on side `side` (0 or 1) of an edge, acting on colour `colour`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Mark {
    pub side: u8,
    pub colour: u8,
}

pub fn all_marks(rank: usize) -> Vec<Mark> {
    (0..2)
        .flat_map(|side| (1..=rank as u8).map(move |colour| Mark { side, colour }))
        .collect()
}

pub fn needs_mark(c: ColourSet, spec: &ModelSpec) -> bool {
    spec.marked_necklaces && c.len() == 2
}

/// Face data a degree formula needs: internal face count and whether a
/// mark lies on an internal face.
pub trait FaceData {
    fn internal_faces(&self) -> usize;
    fn mark_internal(&self, edge: usize, m: Mark) -> bool;
    /// Internal colour-0 edges; may be `-1` for the amputated bare propagator.
    fn internal_corners(&self) -> i64;
}

/// Face data traced directly on a map.
pub struct MapFaces {
    internal: usize,
    corners: usize,
    /// `on_internal[c-1][x]`: dart `x` lies on an internal face of colour `c`.
    on_internal: Vec<Vec<bool>>,
}

impl MapFaces {
    pub fn new(m: &StrandedMap) -> Self {
        let mut on_internal = vec![vec![false; m.n_darts()]; m.rank()];
        for c in 1..=m.rank() {
            for f in m.face_cycles(c) {
                if f.iter().all(|&x| !m.is_cilium(x)) {
                    for x in f {
                        on_internal[c - 1][x] = true;
                    }
                }
            }
        }
        MapFaces {
            internal: m.internal_faces(),
            corners: m.internal_corners(),
            on_internal,
        }
    }
}

impl FaceData for MapFaces {
    fn internal_faces(&self) -> usize {
        self.internal
    }
    fn mark_internal(&self, edge: usize, m: Mark) -> bool {
        self.on_internal[m.colour as usize - 1][2 * edge + m.side as usize]
    }
    fn internal_corners(&self) -> i64 {
        self.corners as i64
    }
}

/// Face data read from skeleton tables, optionally on the sub-map keeping
/// only the edges in `keep`. Corners are counted as `2E - k`, so a lone
/// cilium is the amputated propagator with degree `2 eta`.
pub struct TableFaces<'a> {
    pub tables: &'a SkeletonTables,
    pub masks: Vec<u32>,
    pub edges: usize,
    pub k: usize,
}

impl<'a> TableFaces<'a> {
    pub fn new(tables: &'a SkeletonTables, masks: &[u32], keep: u32, edges: usize, k: usize) -> Self {
        TableFaces {
            tables,
            masks: masks.iter().map(|m| m & keep).collect(),
            edges,
            k,
        }
    }
}

impl FaceData for TableFaces<'_> {
    fn internal_faces(&self) -> usize {
        self.tables.internal_faces(&self.masks)
    }
    fn mark_internal(&self, edge: usize, m: Mark) -> bool {
        self.tables.is_internal(self.masks[m.colour as usize - 1], 2 * edge + m.side as usize)
    }
    fn internal_corners(&self) -> i64 {
        2 * self.edges as i64 - self.k as i64
    }
}

fn check_marks(colours: &[ColourSet], spec: &ModelSpec, marks: &[Option<Mark>]) -> Result<()> {
    if marks.len() != colours.len() {
        return Err(Error::Invalid("one mark slot per edge".into()));
    }
    for (c, m) in colours.iter().zip(marks) {
        match m {
            Some(x) if needs_mark(*c, spec) && x.side < 2 && (1..=spec.rank as u8).contains(&x.colour) => {}
            None if !needs_mark(*c, spec) => {}
            _ => return Err(Error::Invalid(format!("bad mark on an edge of colours {c}"))),
        }
    }
    Ok(())
}

/// `-2 eta |E^0| + sum over internal faces of (1 + marks on the face)`.
pub fn face_wise_degree(eta: Rational64, faces: &impl FaceData, marks: &[Option<Mark>]) -> Rational64 {
    let on_internal = marks
        .iter()
        .enumerate()
        .filter(|(e, m)| m.map_or(false, |m| faces.mark_internal(*e, m)))
        .count();
    Rational64::from_integer((faces.internal_faces() + on_internal) as i64) - eta * 2 * faces.internal_corners()
}

/// `-4 eta (|B_M| + |B_N^ext|) + (1 - 4 eta)|B_N^int| + F_int + 2 eta P`.
pub fn bubble_wise_degree(
    eta: Rational64,
    colours: &[ColourSet],
    k: usize,
    faces: &impl FaceData,
    marks: &[Option<Mark>],
) -> Rational64 {
    let four = eta * 4;
    let mut w = Rational64::from_integer(faces.internal_faces() as i64) + eta * 2 * k as i64;
    for (e, _) in colours.iter().enumerate() {
        w += match marks[e] {
            Some(m) if faces.mark_internal(e, m) => Rational64::one() - four,
            _ => -four,
        };
    }
    w
}

/// Degree of a connected map under a power-law covariance.
pub fn map_divergence_degree(m: &StrandedMap, spec: &ModelSpec, marks: &[Option<Mark>]) -> Result<Rational64> {
    let eta = eta_of(spec)?;
    check_marks(m.edge_colours(), spec, marks)?;
    Ok(face_wise_degree(eta, &MapFaces::new(m), marks))
}

/// The same degree from the bubble-wise formula.
pub fn map_divergence_degree_bubblewise(m: &StrandedMap, spec: &ModelSpec, marks: &[Option<Mark>]) -> Result<Rational64> {
    let eta = eta_of(spec)?;
    check_marks(m.edge_colours(), spec, marks)?;
    Ok(bubble_wise_degree(eta, m.edge_colours(), m.k(), &MapFaces::new(m), marks))
}

/// Reference marks (side 0, colour 1 on every necklace) and every variant
/// differing on a single edge. The degree is a sum of per-edge terms, so
/// checking these covers every assignment.
pub fn mark_sweep(colours: &[ColourSet], spec: &ModelSpec) -> Vec<Vec<Option<Mark>>> {
    let base: Vec<Option<Mark>> = colours
        .iter()
        .map(|&c| needs_mark(c, spec).then_some(Mark { side: 0, colour: 1 }))
        .collect();
    let mut out = vec![base.clone()];
    for (e, m) in base.iter().enumerate() {
        if m.is_some() {
            for x in all_marks(spec.rank).into_iter().skip(1) {
                let mut v = base.clone();
                v[e] = Some(x);
                out.push(v);
            }
        }
    }
    out
}

/// Largest degree over all mark assignments.
pub fn max_degree_over_marks(eta: Rational64, colours: &[ColourSet], spec: &ModelSpec, faces: &impl FaceData) -> Rational64 {
    let none: Vec<Option<Mark>> = vec![None; colours.len()];
    let mut w = face_wise_degree(eta, faces, &none);
    for (e, &c) in colours.iter().enumerate() {
        if needs_mark(c, spec) && all_marks(spec.rank).into_iter().any(|m| faces.mark_internal(e, m)) {
            w += 1;
        }
    }
    w
}

/// Largest excess of `max ω(G) − max ω(T) − (3 − 4η)(|B(G)| − |B(T)|)` over the
/// spanning trees `T` of a coloured skeleton, each side maximised over its own marks.
/// Positive means the spanning-tree bound fails for that map.
pub fn loop_bound_excess(
    eta: Rational64,
    spec: &ModelSpec,
    tables: &SkeletonTables,
    masks: &[u32],
    colours: &[ColourSet],
) -> Option<Rational64> {
    let (e, k) = (tables.edges, tables.k);
    let slope = Rational64::from_integer(3) - eta * 4;
    let full = TableFaces::new(tables, masks, u32::MAX, e, k);
    let w_g = max_degree_over_marks(eta, colours, spec, &full);
    tables
        .spanning_trees()
        .into_iter()
        .map(|tree| {
            let bt = tree.count_ones() as usize;
            let sub = TableFaces::new(tables, masks, tree, bt, k);
            let mut w_t = Rational64::from_integer(sub.internal_faces() as i64) - eta * 2 * sub.internal_corners();
            for (i, &c) in colours.iter().enumerate() {
                if tree >> i & 1 == 1
                    && needs_mark(c, spec)
                    && all_marks(spec.rank).into_iter().any(|m| sub.mark_internal(i, m))
                {
                    w_t += 1;
                }
            }
            w_g - w_t - slope * (e - bt) as i64
        })
        .max()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Renormalisability {
    Super,
    Just,
    Non,
}

impl fmt::Display for Renormalisability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Renormalisability::Super => "super-renormalisable",
            Renormalisability::Just => "just-renormalisable",
            Renormalisability::Non => "non-renormalisable",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub class: Renormalisability,
    /// Coefficient of `|B|` in the degree bound.
    pub slope: String,
    pub bound: String,
}

/// Right-hand side of the degree bound of the melonic field theory:
/// `(D-1-4 eta)|B| + D + (1+2 eta-D)k - C`.
pub fn tft_degree_bound(spec: &ModelSpec, b: usize, k: usize, components: usize) -> Result<Rational64> {
    let eta = eta_of(spec)?;
    let d = spec.rank as i64;
    let (b, k, c) = (b as i64, k as i64, components as i64);
    Ok(Rational64::from_integer(d - 1) * b - eta * 4 * b + d + (Rational64::one() + eta * 2 - d) * k - c)
}

/// Sign of the growth of the degree with the number of bubbles.
pub fn classify_renormalisability(spec: &ModelSpec) -> Result<Classification> {
    let eta = eta_of(spec)?;
    let d = spec.rank as i64;
    let (slope, bound) = if spec.marked_necklaces {
        if spec.rank != 4 {
            return Err(Error::UnsupportedModel("derivative necklaces are defined at rank 4".into()));
        }
        let s = Rational64::from_integer(3) - eta * 4;
        (
            s,
            format!("omega(T0) = 4 + ({s})|B|; omega(G) <= omega(T) + ({s})(|B(G)| - |B(T)|)"),
        )
    } else {
        let s = Rational64::from_integer(d - 1) - eta * 4;
        let kc = Rational64::one() + eta * 2 - d;
        (s, format!("omega <= ({s})|B| + {d} + ({kc})k - C"))
    };
    let class = if s_neg(slope) {
        Renormalisability::Super
    } else if slope.is_zero() {
        Renormalisability::Just
    } else {
        Renormalisability::Non
    };
    Ok(Classification { class, slope: slope.to_string(), bound })
}

fn s_neg(r: Rational64) -> bool {
    r < Rational64::zero()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Divergence {
    Convergent,
    Log,
    Power,
}

impl Divergence {
    pub fn of(omega: Rational64) -> Self {
        if omega < Rational64::zero() {
            Divergence::Convergent
        } else if omega.is_zero() {
            Divergence::Log
        } else {
            Divergence::Power
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceReport {
    pub id: String,
    pub edges: usize,
    pub legs: usize,
    pub colours: Vec<String>,
    pub omega: String,
    pub class: Divergence,
    pub boundary: Option<BoundaryGraph>,
    /// Necklace marks on internal and on external faces.
    pub marks_internal: usize,
    pub marks_external: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurveyGroup {
    pub legs: usize,
    pub boundary: Option<BoundaryGraph>,
    pub marks_internal: usize,
    pub marks_external: usize,
    pub count: usize,
    pub max_omega: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Survey {
    pub reports: Vec<DivergenceReport>,
    pub groups: Vec<SurveyGroup>,
}

pub const MAX_SURVEY_EDGES: usize = 6;
pub const MAX_SURVEY_CILIA: usize = 3;

/// All connected maps with `1..=edges` edges and `0..=cilia` cilia and at
/// least one internal propagator whose degree is non-negative for some
/// placement of the necklace marks.
pub fn divergence_survey(spec: &ModelSpec, edges: usize, cilia: usize) -> Result<Survey> {
    let eta = eta_of(spec)?;
    spec.validate()?;
    budget("survey edges", MAX_SURVEY_EDGES, edges)?;
    budget("survey cilia", MAX_SURVEY_CILIA, cilia)?;
    let q = &spec.interactions;
    let mut reports = Vec::new();
    for k in 0..=cilia {
        let covs = permutations(k);
        for e in 1..=edges {
            if 2 * e <= k {
                continue;
            }
            let sks = skeletons(e, k, false)?;
            let found: Vec<Vec<DivergenceReport>> = sks
                .par_iter()
                .enumerate()
                .map(|(si, sk)| {
                    let t = sk.tables();
                    let mut out = Vec::new();
                    let mut ci = 0usize;
                    for_each_colouring(q, e, |cols| {
                        ci += 1;
                        let masks = t.colour_masks(cols, spec.rank);
                        let faces = TableFaces::new(&t, &masks, u32::MAX, e, k);
                        let none = vec![None; e];
                        let base = face_wise_degree(eta, &faces, &none);
                        let (mut forced, mut free, mut necklaces) = (0usize, 0usize, 0usize);
                        for (i, &c) in cols.iter().enumerate() {
                            if needs_mark(c, spec) {
                                necklaces += 1;
                                let marks = all_marks(spec.rank);
                                let int = marks.iter().filter(|&&m| faces.mark_internal(i, m)).count();
                                if int == marks.len() {
                                    forced += 1;
                                } else if int > 0 {
                                    free += 1;
                                }
                            }
                        }
                        for n_int in forced..=forced + free {
                            let w = base + n_int as i64;
                            if w < Rational64::zero() {
                                continue;
                            }
                            for (pi, cov) in covs.iter().enumerate() {
                                let boundary = if k == 0 { None } else { t.boundary(&masks, cov).ok() };
                                out.push(DivergenceReport {
                                    id: format!("E{e}-k{k}-s{si}-c{}-p{pi}-m{n_int}", ci - 1),
                                    edges: e,
                                    legs: 2 * k,
                                    colours: cols.iter().map(|c| c.to_string()).collect(),
                                    omega: w.to_string(),
                                    class: Divergence::of(w),
                                    boundary,
                                    marks_internal: n_int,
                                    marks_external: necklaces - n_int,
                                });
                            }
                        }
                    });
                    out
                })
                .collect();
            reports.extend(found.into_iter().flatten());
        }
    }
    let mut groups: BTreeMap<(usize, Option<BoundaryGraph>, usize, usize), (usize, Rational64)> = BTreeMap::new();
    for r in &reports {
        let w: Rational64 = r.omega.parse().unwrap_or_else(|_| Rational64::zero());
        let g = groups
            .entry((r.legs, r.boundary.clone(), r.marks_internal, r.marks_external))
            .or_insert((0, w));
        g.0 += 1;
        if w > g.1 {
            g.1 = w;
        }
    }
    let groups = groups
        .into_iter()
        .map(|((legs, boundary, mi, me), (count, w))| SurveyGroup {
            legs,
            boundary,
            marks_internal: mi,
            marks_external: me,
            count,
            max_omega: w.to_string(),
        })
        .collect();
    Ok(Survey { reports, groups })
}

// ---- T^4_3 counterterm numerics ----

/// `sum over p in [-n,n]^2 of 1/(p^2+1)`, summed row by row in a fixed order.
pub fn delta_m(n: i64) -> f64 {
    let rows: Vec<f64> = (-n..=n)
        .into_par_iter()
        .map(|x| (-n..=n).map(|y| 1.0 / ((x * x + y * y + 1) as f64)).sum())
        .collect();
    rows.iter().sum()
}

pub fn delta_m_exact(n: i64) -> BigRational {
    let mut s = BigRational::zero();
    for x in -n..=n {
        for y in -n..=n {
            s += BigRational::new(1.into(), (x * x + y * y + 1).into());
        }
    }
    s
}

/// Renormalised `A(n_c)` at cutoff `n`.
pub fn a_cutoff(nc: i64, n: i64) -> f64 {
    let c2 = (nc * nc) as f64;
    let mut s = 0.0;
    for x in -n..=n {
        for y in -n..=n {
            let p = (x * x + y * y) as f64;
            s += c2 / ((c2 + p + 1.0) * (p + 1.0));
        }
    }
    s
}

fn row_sum(a: f64) -> f64 {
    // sum over y of 1/(y^2 + a^2)
    std::f64::consts::PI / (a * (std::f64::consts::PI * a).tanh())
}

/// `A(n_c)` without cutoff: the inner sum in closed form, the outer sum
/// explicit up to `|x| <= 10 n_c` plus the integral of the tail.
pub fn a_infinite(nc: i64) -> f64 {
    if nc == 0 {
        return 0.0;
    }
    let c2 = (nc * nc) as f64;
    let big = 10 * nc.abs();
    let mut s = 0.0;
    for x in -big..=big {
        let a2 = (x * x) as f64 + 1.0;
        s += row_sum(a2.sqrt()) - row_sum((a2 + c2).sqrt());
    }
    let xf = big as f64 + 0.5;
    let n = nc.abs() as f64;
    let tail = 0.5f64.ln() - (xf / (xf + (xf * xf + n * n).sqrt())).ln();
    s + 2.0 * std::f64::consts::PI * tail
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub samples: Vec<(i64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// `slope + max(intercept, 0)/ln 2`, an upper envelope for `A/log(1+n)`.
    pub envelope: f64,
    pub max_ratio: f64,
    pub bounded: bool,
}

/// Least-squares fit of `A(n) = a log(1+n) + b` on a logarithmic grid up to `n_max`.
pub fn a_growth_fit(n_max: i64, points: usize) -> GrowthFit {
    let mut ns: Vec<i64> = (0..points)
        .map(|i| (n_max as f64).powf(i as f64 / (points - 1) as f64).round() as i64)
        .collect();
    ns.dedup();
    let samples: Vec<(i64, f64)> = ns.par_iter().map(|&n| (n, a_infinite(n))).collect();
    let xs: Vec<f64> = samples.iter().map(|&(n, _)| (1.0 + n as f64).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, a)| a).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let envelope = slope + intercept.max(0.0) / 2f64.ln();
    let max_ratio = xs.iter().zip(&ys).map(|(x, y)| y / x).fold(0.0, f64::max);
    GrowthFit {
        samples,
        slope,
        intercept,
        envelope,
        max_ratio,
        bounded: max_ratio <= envelope,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LogDivergence {
    pub n: i64,
    pub difference: f64,
    pub relative_error: f64,
}

/// `delta_m(2N) - delta_m(N)` against `2 pi ln 2`.
pub fn log_divergence(ns: &[i64]) -> Vec<LogDivergence> {
    let target = 2.0 * std::f64::consts::PI * 2f64.ln();
    ns.iter()
        .map(|&n| {
            let d = delta_m(2 * n) - delta_m(n);
            LogDivergence { n, difference: d, relative_error: (d - target).abs() / target }
        })
        .collect()
}

/// Counterterms at cubic cutoff `n`, all as coefficients of `lambda`.
#[derive(Clone, Debug, Serialize)]
pub struct T43Record {
    pub cutoff: i64,
    pub delta_m: f64,
    pub trace_c: f64,
    pub delta_v1: f64,
    pub delta_v2: f64,
    pub delta_v3: f64,
    pub delta_v_mass: f64,
    /// `sum_{n1} A(n1)^2 - 2(dV1 + dV3 + dV_mass)`, zero up to rounding.
    pub identity_residual: f64,
    pub a_table: Vec<(i64, f64)>,
}

pub fn t43_counterterms(n: i64) -> Result<T43Record> {
    if n < 1 {
        return Err(Error::Invalid("cutoff must be at least 1".into()));
    }
    let dm = delta_m(n);
    // S(a) = sum_{x,y} 1/(a^2 + x^2 + y^2 + 1)
    let s: Vec<f64> = (-n..=n)
        .map(|a| {
            let mut t = 0.0;
            for x in -n..=n {
                for y in -n..=n {
                    t += 1.0 / ((a * a + x * x + y * y + 1) as f64);
                }
            }
            t
        })
        .collect();
    let trace_c: f64 = s.iter().sum();
    let delta_v1 = 0.5 * s.iter().map(|v| v * v).sum::<f64>();
    let r = |q: i64| -> f64 { (-n..=n).map(|a| 1.0 / ((a * a + q + 1) as f64)).sum() };
    let mut delta_v2 = 0.0;
    for x in -n..=n {
        for y in -n..=n {
            let v = r(x * x + y * y);
            delta_v2 += 0.5 * v * v;
        }
    }
    let delta_v3 = 0.5 * (2 * n + 1) as f64 * dm * dm;
    let delta_v_mass = -dm * trace_c;
    let sum_a2: f64 = s.iter().map(|v| (dm - v) * (dm - v)).sum();
    let identity_residual = sum_a2 - 2.0 * (delta_v1 + delta_v3 + delta_v_mass);
    let a_table = (0..=n.min(16)).map(|c| (c, a_cutoff(c, n))).collect();
    Ok(T43Record {
        cutoff: n,
        delta_m: dm,
        trace_c,
        delta_v1,
        delta_v2,
        delta_v3,
        delta_v_mass,
        identity_residual,
        a_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloured_graphs::wick_graph;
    use crate::enumeration::for_each_map;
    use crate::enumeration::EnumSpec;
    use crate::if_transform::map_to_graph;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn cs(c: &[usize], d: usize) -> ColourSet {
        ColourSet::canonicalise(c, d).unwrap()
    }

    fn t43() -> ModelSpec {
        ModelSpec::tft(3, r(1, 1)).unwrap()
    }

    #[test]
    fn t43_one_bubble_degrees() {
        let spec = t43();
        let v1 = cs(&[1], 3);
        let melon = wick_graph(3, &[v1], 0, &[0, 1]).unwrap();
        assert_eq!(graph_divergence_degree(&melon, &spec).unwrap(), r(1, 1));
        let other = wick_graph(3, &[v1], 0, &[1, 0]).unwrap();
        assert_eq!(graph_divergence_degree(&other, &spec).unwrap(), r(0, 1));
        // the tadpole with the loop on the crossing side
        let mut seen = Vec::new();
        for w in permutations(3) {
            let g = wick_graph(3, &[v1], 1, &w).unwrap();
            if g.internal_colour0().len() == 1 {
                seen.push(graph_divergence_degree(&g, &spec).unwrap());
            }
        }
        seen.sort();
        assert_eq!(seen, vec![r(-1, 1), r(-1, 1), r(0, 1), r(0, 1)]);
    }

    #[test]
    fn uniform_scales() {
        let v1 = cs(&[1], 3);
        let g = wick_graph(3, &[v1, v1], 0, &[2, 3, 0, 1]).unwrap();
        let mu = ScaleAttribution::uniform(4, 3);
        let subs = high_subgraphs(&g, &mu).unwrap();
        assert_eq!(subs.len(), 3);
        assert!(subs.iter().all(|s| s.bubbles == vec![0, 1] && s.propagators.len() == 4));
        assert!(powercount_bound_check(&g, &mu).unwrap().holds);
        let empty = wick_graph(3, &[], 0, &[]).unwrap();
        assert!(high_subgraphs(&empty, &ScaleAttribution::uniform(0, 2)).unwrap().is_empty());
    }

    #[test]
    fn chain_with_two_scales() {
        // bubble 0 closes on itself, one propagator goes to bubble 1 which closes on itself
        let v1 = cs(&[1], 3);
        let g = wick_graph(3, &[v1, v1], 0, &[0, 2, 1, 3]).unwrap();
        let internal = g.internal_colour0();
        let edges: Vec<(usize, usize)> = internal
            .iter()
            .map(|&e| (g.edges()[e].hollow / 4, g.edges()[e].solid / 4))
            .collect();
        let scales: Vec<u32> = edges.iter().map(|&(a, b)| if a == 1 && b == 1 { 5 } else { 1 }).collect();
        let mu = ScaleAttribution::new(scales, 5).unwrap();
        let subs = high_subgraphs(&g, &mu).unwrap();
        for s in subs.iter().filter(|s| s.scale >= 2) {
            assert_eq!(s.bubbles, vec![1]);
            assert_eq!(s.propagators.len(), 1);
        }
        assert_eq!(subs.iter().filter(|s| s.scale >= 2).count(), 4);
        assert!(is_nested(&subs));
        let pc = powercount_bound_check(&g, &mu).unwrap();
        assert!(pc.holds, "{pc:?}");
        assert_eq!(pc.edge_exponents.0, 8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn random_attributions(seed in 0u64..u64::MAX) {
            use rand::{Rng, SeedableRng, seq::SliceRandom};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let d = rng.gen_range(3..=4);
            let q = ColourSet::all_canonical(d);
            let b = rng.gen_range(1..=3);
            let k = rng.gen_range(0..=2);
            let bubbles: Vec<ColourSet> = (0..b).map(|_| *q.choose(&mut rng).unwrap()).collect();
            let mut wick: Vec<usize> = (0..2 * b + k).collect();
            wick.shuffle(&mut rng);
            let g = wick_graph(d, &bubbles, k, &wick).unwrap();
            let n = g.internal_colour0().len();
            let j_max = 6;
            let mu = ScaleAttribution::new((0..n).map(|_| rng.gen_range(1..=j_max)).collect(), j_max).unwrap();
            let subs = high_subgraphs(&g, &mu).unwrap();
            prop_assert!(is_nested(&subs));
            prop_assert!(powercount_bound_check(&g, &mu).unwrap().holds);
        }
    }

    #[test]
    fn graph_and_map_degrees_agree() {
        let spec = ModelSpec::tft(4, r(1, 1)).unwrap();
        let id = ModelSpec::melonic(4, crate::colour_kernel::Scaling::Invariant).unwrap();
        for e in 1..=3 {
            for k in 0..=2 {
                let es = EnumSpec::connected(id.clone(), e, k);
                for_each_map(&es, |m, _| {
                    let g = map_to_graph(&m).unwrap();
                    let none = vec![None; e];
                    assert_eq!(
                        map_divergence_degree(&m, &spec, &none).unwrap(),
                        graph_divergence_degree(&g, &spec).unwrap()
                    );
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn classifier_table() {
        let one = r(1, 1);
        let expect = [(3, Renormalisability::Super), (4, Renormalisability::Super), (5, Renormalisability::Just), (6, Renormalisability::Non)];
        for (d, c) in expect {
            assert_eq!(classify_renormalisability(&ModelSpec::tft(d, one).unwrap()).unwrap().class, c);
        }
        let c = classify_renormalisability(&ModelSpec::enhanced_tft(r(3, 4)).unwrap()).unwrap();
        assert_eq!(c.class, Renormalisability::Just);
        // the tree degree 4 + (3 - 4 eta)|B| grows for small eta
        let c = classify_renormalisability(&ModelSpec::enhanced_tft(r(1, 2)).unwrap()).unwrap();
        assert_eq!(c.class, Renormalisability::Non);
        let c = classify_renormalisability(&ModelSpec::enhanced_tft(r(1, 1)).unwrap()).unwrap();
        assert_eq!(c.class, Renormalisability::Super);
        assert!(classify_renormalisability(&ModelSpec::melonic(3, crate::colour_kernel::Scaling::Invariant).unwrap()).is_err());
    }

    #[test]
    fn tft_bound_holds() {
        for d in [3, 4, 5] {
            let spec = ModelSpec::tft(d, r(1, 1)).unwrap();
            let id = ModelSpec::melonic(d, crate::colour_kernel::Scaling::Invariant).unwrap();
            for e in 1..=3 {
                for k in 0..=2 {
                    for_each_map(&EnumSpec::connected(id.clone(), e, k), |m, _| {
                        let w = map_divergence_degree(&m, &spec, &vec![None; e]).unwrap();
                        let c = if k == 0 { 0 } else { m.map_boundary().unwrap().components() };
                        assert!(w <= tft_degree_bound(&spec, e, k, c).unwrap());
                    })
                    .unwrap();
                }
            }
        }
    }

    #[test]
    fn t43_survey_one_bubble() {
        let s = divergence_survey(&t43(), 1, 2).unwrap();
        let mut w: Vec<(usize, String)> = s.reports.iter().map(|r| (r.legs, r.omega.clone())).collect();
        w.sort();
        // per colour: two vacuum graphs (degrees 1 and 0) and the 2-point self-loop
        let mut expect = Vec::new();
        for _ in 0..3 {
            expect.extend([(0, "0".to_string()), (0, "1".to_string()), (2, "0".to_string())]);
        }
        expect.sort();
        assert_eq!(w, expect);
    }

    #[test]
    fn enhanced_degrees() {
        let spec = ModelSpec::enhanced_tft(r(3, 4)).unwrap();
        let id = ModelSpec::full_quartic(4, crate::colour_kernel::Scaling::Enhanced).unwrap();
        for e in 1..=2 {
            for k in 0..=2 {
                for_each_map(&EnumSpec::connected(id.clone(), e, k), |m, _| {
                    for marks in mark_sweep(m.edge_colours(), &spec) {
                        let a = map_divergence_degree(&m, &spec, &marks).unwrap();
                        let b = map_divergence_degree_bubblewise(&m, &spec, &marks).unwrap();
                        assert_eq!(a, b);
                        if k == 0 {
                            assert!(a <= r(4, 1));
                        } else {
                            assert!(a <= r(2, 1) - r(k as i64, 2));
                        }
                    }
                })
                .unwrap();
            }
        }
        let m = StrandedMap::new(4, vec![cs(&[1, 2], 4)], vec![0, 1], vec![], 0).unwrap();
        assert!(map_divergence_degree(&m, &spec, &[None]).is_err());
    }

    #[test]
    fn t43_numbers() {
        assert_eq!(delta_m_exact(1), BigRational::new(13.into(), 3.into()));
        assert!((delta_m(1) - 13.0 / 3.0).abs() < 1e-14);
        assert_eq!(a_cutoff(0, 5), 0.0);
        let rec = t43_counterterms(6).unwrap();
        assert!(rec.identity_residual.abs() < 1e-9 * rec.delta_v1.abs());
        // the cutoff-free A is the limit of the cut-off sums
        assert!((a_cutoff(3, 400) - a_infinite(3)).abs() < 0.05);
        for l in log_divergence(&[64]) {
            assert!(l.relative_error < 0.05);
        }
    }
}
