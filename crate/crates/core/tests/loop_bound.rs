use num::rational::Rational64;
use quartic::colour_kernel::{ModelSpec, Scaling};
use quartic::enumeration::{for_each_colouring, skeletons};
use quartic::renormalization::loop_bound_excess;

fn violations(edges: usize, cilia: usize) -> Vec<usize> {
    let q = ModelSpec::full_quartic(4, Scaling::Enhanced).unwrap().interactions;
    [Rational64::new(1, 2), Rational64::new(3, 4), Rational64::new(1, 1)]
        .into_iter()
        .map(|eta| {
            let spec = ModelSpec::enhanced_tft(eta).unwrap();
            let mut bad = 0;
            for sk in skeletons(edges, cilia, false).unwrap() {
                let t = sk.tables();
                for_each_colouring(&q, edges, |cols| {
                    let masks = t.colour_masks(cols, 4);
                    if loop_bound_excess(eta, &spec, &t, &masks, cols).map_or(false, |x| x > Rational64::from_integer(0)) {
                        bad += 1;
                    }
                });
            }
            bad
        })
        .collect()
}

#[test]
fn spanning_tree_bound_vacuum_and_two_point() {
    for e in 1..=4 {
        for k in 0..=1 {
            assert_eq!(violations(e, k), vec![0, 0, 0], "E={e} k={k}");
        }
    }
}

// Two ciliated vertices joined by a double necklace edge: deleting the loop edge
// also pushes the bridge's mark onto an external face, so the excess is 1 for every eta.
#[test]
fn spanning_tree_bound_fails_with_two_cilia() {
    let v = violations(2, 2);
    assert!(v.iter().all(|&n| n == v[0] && n > 0), "{v:?}");
}
