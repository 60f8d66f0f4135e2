//! Graph to map and back.
//!
//! Bubble `i` (bubbles ordered by smallest vertex id) becomes edge `i`. The
//! pair of the bubble holding the smaller hollow vertex becomes half-edge
//! `2i`, the other pair `2i+1`. A half-edge stands for the hollow vertex of
//! its pair; `sigma(h)` is the half-edge whose solid vertex receives the
//! colour-0 edge leaving `h`. Dual leg `d` becomes cilium `d`, and the
//! covariant leg at the start of its colour-0 path is recorded as the
//! cilium's covariant label.

use crate::coloured_graphs::{wick_graph, ColouredGraph, Polarity, VertexKind};
use crate::error::{Error, Result};
use crate::stranded_maps::StrandedMap;

enum Slot {
    Half(usize),
    Cilium(usize),
}

pub fn graph_to_map(g: &ColouredGraph) -> Result<StrandedMap> {
    let bubbles = g.bubbles()?;
    let e = bubbles.len();
    let k = g.k();
    let n = g.kinds().len();
    let mut hollow_half = vec![usize::MAX; n];
    let mut solid_half = vec![usize::MAX; n];
    for (i, b) in bubbles.iter().enumerate() {
        let mut pairs = b.pairs;
        if pairs[1].0 < pairs[0].0 {
            pairs.swap(0, 1);
        }
        for (p, &(h, s)) in pairs.iter().enumerate() {
            hollow_half[h] = 2 * i + p;
            solid_half[s] = 2 * i + p;
        }
    }
    let mut cov_at = vec![usize::MAX; n];
    let mut dual_at = vec![usize::MAX; n];
    for l in g.legs() {
        if l.label == 0 || l.label > k {
            return Err(Error::MalformedGraph(format!("leg label {} outside 1..={k}", l.label)));
        }
        match l.pol {
            Polarity::Covariant => cov_at[l.at] = l.label - 1,
            Polarity::Dual => dual_at[l.at] = l.label - 1,
        }
    }
    let target = |v: usize| -> Result<Slot> {
        let s = g
            .neighbour(v, 0)
            .ok_or_else(|| Error::MalformedGraph(format!("vertex {v} has no colour-0 edge")))?;
        match g.kinds()[s] {
            VertexKind::Solid => Ok(Slot::Half(solid_half[s])),
            VertexKind::Ext if dual_at[s] != usize::MAX => Ok(Slot::Cilium(dual_at[s])),
            _ => Err(Error::MalformedGraph(format!("colour-0 edge from {v} ends on {s}"))),
        }
    };
    let darts = 2 * e + k;
    let mut sigma = vec![usize::MAX; darts];
    for v in 0..n {
        if g.kinds()[v] == VertexKind::Hollow {
            sigma[hollow_half[v]] = match target(v)? {
                Slot::Half(h) => h,
                Slot::Cilium(d) => 2 * e + d,
            };
        }
    }
    let mut cov_labels = vec![usize::MAX; k];
    for v in 0..n {
        if cov_at[v] == usize::MAX {
            continue;
        }
        let a = cov_at[v];
        match target(v)? {
            Slot::Cilium(d) => {
                sigma[2 * e + d] = 2 * e + d;
                cov_labels[d] = a;
            }
            Slot::Half(first) => {
                let mut cur = first;
                let mut steps = 0;
                while sigma[cur] < 2 * e {
                    cur = sigma[cur];
                    steps += 1;
                    if steps > darts {
                        return Err(Error::MalformedGraph("colour-0 path from a leg does not end".into()));
                    }
                }
                let d = sigma[cur] - 2 * e;
                sigma[2 * e + d] = first;
                cov_labels[d] = a;
            }
        }
    }
    let colours = bubbles.iter().map(|b| b.colours).collect();
    StrandedMap::new(g.rank(), colours, sigma, cov_labels, 0)
}

pub fn map_to_graph(m: &StrandedMap) -> Result<ColouredGraph> {
    if m.bare_vertices() > 0 {
        return Err(Error::MalformedMap("a bare vertex has no graph counterpart".into()));
    }
    let e2 = 2 * m.n_edges();
    let sigma = m.sigma();
    // solid slots: half-edges, then dual legs by label
    let solid_slot = |x: usize| x;
    let mut wick = vec![usize::MAX; sigma.len()];
    for h in 0..e2 {
        wick[h] = solid_slot(sigma[h]);
    }
    for (j, &a) in m.cov_labels().iter().enumerate() {
        wick[e2 + a] = solid_slot(sigma[e2 + j]);
    }
    wick_graph(m.rank(), m.edge_colours(), m.k(), &wick)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour_kernel::{ColourSet, ModelSpec, Scaling};

    fn cs(c: &[usize], d: usize) -> ColourSet {
        ColourSet::canonicalise(c, d).unwrap()
    }

    #[test]
    fn one_bubble_closures() {
        let v1 = cs(&[1], 3);
        let melon = graph_to_map(&wick_graph(3, &[v1], 0, &[0, 1]).unwrap()).unwrap();
        assert_eq!(melon.n_vertices(), 2);
        assert!(melon.structural_predicates().unwrap().is_plane_tree);
        let other = graph_to_map(&wick_graph(3, &[v1], 0, &[1, 0]).unwrap()).unwrap();
        assert_eq!(other.n_vertices(), 1);
        assert_eq!(other.internal_faces(), 4);
    }

    #[test]
    fn propagator_is_a_bare_cilium() {
        let m = graph_to_map(&wick_graph(3, &[], 1, &[0]).unwrap()).unwrap();
        assert_eq!(m.n_edges(), 0);
        assert_eq!(m.sigma(), &[0]);
        let g = map_to_graph(&m).unwrap();
        assert_eq!(g.legs().len(), 2);
        assert!(map_to_graph(&StrandedMap::bare_vertex(3)).is_err());
    }

    #[test]
    fn two_point_chain() {
        // leg T1 -> bubble pair a, bubble pair b -> leg Tbar1, pair a hollow -> pair b solid
        let v1 = cs(&[1], 3);
        let g = wick_graph(3, &[v1], 1, &[1, 2, 0]).unwrap();
        let m = graph_to_map(&g).unwrap();
        assert_eq!(m.k(), 1);
        assert_eq!(m.n_vertices(), 1);
        assert_eq!(map_to_graph(&m).unwrap().labelled_key(), g.labelled_key());
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        assert_eq!(m.amplitude(&spec).unwrap(), g.invariant_amplitude(&spec).unwrap());
        assert_eq!(m.map_boundary().unwrap(), g.boundary_graph().unwrap());
    }
}
