use num::{BigInt, Signed};
use proptest::prelude::*;
use quartic::colour_kernel::{ColourSet, ModelSpec, Scaling};
use quartic::enumeration::{count_trees_closed_form, count_trees_enumerated, for_each_map, EnumSpec};
use quartic::if_transform::{graph_to_map, map_to_graph};
use quartic::series::catalan;
use quartic::series_engine::cumulants_by_boundary;
use quartic::{BoundaryGraph, StrandedMap};

fn each_map(d: usize, edges: std::ops::RangeInclusive<usize>, cilia: usize, mut f: impl FnMut(&ModelSpec, StrandedMap)) {
    let spec = ModelSpec::full_quartic(d, Scaling::Invariant).unwrap();
    for e in edges {
        for k in 0..=cilia {
            for_each_map(&EnumSpec::connected(spec.clone(), e, k), |m, _| f(&spec, m)).unwrap();
        }
    }
}

#[test]
fn tree_counts_up_to_seven_vertices() {
    for v in 1..=7 {
        for k in 0..=v.min(3) {
            for q in 1..=3 {
                assert_eq!(count_trees_enumerated(v, k, q).unwrap(), count_trees_closed_form(v, k, q), "v={v} k={k} q={q}");
            }
        }
    }
}

#[test]
fn deleting_a_loop_edge_moves_faces_by_at_most_its_colours() {
    let mut deletions = 0;
    for d in [3, 4] {
        each_map(d, 1..=3, 2, |_, m| {
            for e in 0..m.n_edges() {
                if m.is_bridge(e) {
                    continue;
                }
                let after = m.delete_edge(e).unwrap();
                let change = (m.internal_faces() as i64 - after.internal_faces() as i64).abs();
                assert!(change <= m.edge_colours()[e].len() as i64, "{m:?} edge {e}");
                deletions += 1;
            }
        });
    }
    assert!(deletions > 0);
}

#[test]
fn maps_survive_the_round_trip() {
    for d in [3, 4] {
        each_map(d, 0..=3, 2, |spec, m| {
            let g = map_to_graph(&m).unwrap();
            let back = graph_to_map(&g).unwrap();
            assert_eq!(back.canonical_code(true), m.canonical_code(true));
            assert_eq!(back.trace_faces(), m.trace_faces());
            assert_eq!(g.invariant_amplitude(spec).unwrap(), m.amplitude(spec).unwrap());
            if m.n_edges() > 0 {
                let bubbles = g.bubbles().unwrap().len();
                assert_eq!(g.internal_colour0().len(), 2 * bubbles - m.k());
            }
        });
    }
}

#[test]
fn mirror_keeps_faces_and_amplitude() {
    each_map(4, 1..=3, 2, |spec, m| {
        let r = m.mirror();
        assert_eq!(r.internal_faces(), m.internal_faces());
        assert_eq!(r.amplitude(spec).unwrap(), m.amplitude(spec).unwrap());
        assert_eq!(r.mirror(), m);
    });
}

#[test]
fn two_point_leading_coefficients_are_catalan() {
    let d = 3usize;
    let spec = ModelSpec::melonic(d, Scaling::Invariant).unwrap();
    let order = 4;
    let all = cumulants_by_boundary(&spec, 1, order).unwrap();
    let identity = BoundaryGraph::identity(1, d);
    let (_, series) = all.values().find(|(b, _)| *b == identity).unwrap();
    for n in 0..=order {
        let terms = series.at_degree(n);
        let (_, lead) = terms.iter().next_back().unwrap();
        let want = BigInt::from(-(d as i64)).pow(n) * catalan(n as usize);
        assert_eq!(*lead.numer(), want, "n={n}");
        assert!(lead.is_integer() && (lead.is_negative() == (n % 2 == 1)));
    }
}

fn arb_map() -> impl Strategy<Value = StrandedMap> {
    (1usize..=5, 0usize..=2, 3usize..=5).prop_flat_map(|(e, k, d)| {
        let n = 2 * e + k;
        let q = ColourSet::all_canonical(d);
        (
            Just(d),
            Just(k),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(proptest::sample::select(q), e),
        )
    })
    .prop_filter_map("connected", |(d, k, sigma, cols)| {
        let m = StrandedMap::new(d, cols, sigma, (0..k).collect(), 0).ok()?;
        m.is_connected().then_some(m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_maps_round_trip(m in arb_map()) {
        let spec = ModelSpec::full_quartic(m.rank(), Scaling::Enhanced).unwrap();
        let back = graph_to_map(&map_to_graph(&m).unwrap()).unwrap();
        prop_assert_eq!(back.canonical_code(true), m.canonical_code(true));
        prop_assert_eq!(back.amplitude(&spec).unwrap(), m.amplitude(&spec).unwrap());
    }

    #[test]
    fn random_maps_mirror(m in arb_map()) {
        let spec = ModelSpec::full_quartic(m.rank(), Scaling::Invariant).unwrap();
        prop_assert_eq!(m.mirror().amplitude(&spec).unwrap(), m.amplitude(&spec).unwrap());
    }

    #[test]
    fn random_loop_deletions(m in arb_map()) {
        for e in (0..m.n_edges()).filter(|&e| !m.is_bridge(e)) {
            let after = m.delete_edge(e).unwrap();
            let change = (m.internal_faces() as i64 - after.internal_faces() as i64).abs();
            prop_assert!(change <= m.edge_colours()[e].len() as i64);
        }
    }
}
