//! The acceptance criteria as runnable checks. Each returns a report with
//! the measured quantities; nothing here panics on a failed criterion.

use std::ops::RangeInclusive;
use std::time::Instant;

use num::complex::Complex64;
use num::rational::Rational64;
use num::{BigInt, BigRational, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::colour_kernel::{BoundaryGraph, ColourSet, ModelSpec, Scaling};
use crate::coloured_graphs::wick_graph;
use crate::enumeration::{
    count_monociliated_trees, for_each_colouring, for_each_map, permutations, skeletons, EnumSpec, Skeleton, SkeletonTables,
};
use crate::error::Result;
use crate::if_transform::{graph_to_map, map_to_graph};
use crate::renormalization::{
    bubble_wise_degree, classify_renormalisability, delta_m, delta_m_exact, face_wise_degree, log_divergence,
    a_growth_fit, mark_sweep, max_degree_over_marks, FaceData, Renormalisability, TableFaces,
};
use crate::series::{catalan, connected_relation_check};
use crate::series_engine::{assemble_series, melonic_two_point, vacuum_solutions, CutSide, Observable};
use crate::stranded_maps::omega_min;
use crate::wick_oracle::{forest_suite, oracle_connected_vacuum, oracle_cumulants};

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const NAMES: [&str; 13] = [
    "Catalan leading order",
    "Melonic resummation",
    "Oracle equivalence",
    "1/N bounds",
    "Face lemma",
    "Bijection",
    "Matrix genus",
    "Renormalisability table",
    "Enhanced degrees",
    "Enhanced leading order",
    "T43 numerics",
    "Forest formula",
    "Connected/log relation",
];

pub fn run_check(id: u8) -> Result<CheckReport> {
    let t = Instant::now();
    let (passed, detail) = match id {
        1 => catalan_check()?,
        2 => melonic_check()?,
        3 => oracle_check()?,
        4 => bounds_check()?,
        5 => face_lemma_check()?,
        6 => bijection_check()?,
        7 => matrix_genus_check()?,
        8 => classifier_check()?,
        9 => enhanced_degree_check()?,
        10 => enhanced_leading_check()?,
        11 => t43_check()?,
        12 => forest_check()?,
        13 => log_relation_check()?,
        _ => return Err(crate::Error::Invalid(format!("no check {id}"))),
    };
    Ok(CheckReport {
        id,
        name: NAMES[id as usize - 1],
        passed,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    })
}

pub fn run_all() -> Result<Vec<CheckReport>> {
    (1..=13).map(run_check).collect()
}

/// Visits every coloured, labelled connected map of the given sizes through
/// skeleton tables. `f` returns the number of violations for one map.
fn sweep<F>(q: &[ColourSet], edges: RangeInclusive<usize>, cilia: RangeInclusive<usize>, with_cov: bool, f: F) -> Result<(u64, u64)>
where
    F: Fn(&Skeleton, &SkeletonTables, &[ColourSet], &[u32], &[usize]) -> u64 + Sync,
{
    let rank = q[0].rank();
    let mut maps = 0;
    let mut bad = 0;
    for k in cilia {
        let covs = if with_cov { permutations(k) } else { vec![(0..k).collect()] };
        for e in edges.clone() {
            if e == 0 && k == 0 {
                continue;
            }
            let sks = skeletons(e, k, false)?;
            let (m, b) = sks
                .par_iter()
                .map(|sk| {
                    let t = sk.tables();
                    let (mut m, mut b) = (0u64, 0u64);
                    for_each_colouring(q, e, |cols| {
                        let masks = t.colour_masks(cols, rank);
                        for cov in &covs {
                            m += 1;
                            b += f(sk, &t, cols, &masks, cov);
                        }
                    });
                    (m, b)
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            maps += m;
            bad += b;
        }
    }
    Ok((maps, bad))
}

fn omega_of(spec: &ModelSpec, t: &SkeletonTables, cols: &[ColourSet], masks: &[u32]) -> i64 {
    let alpha: i64 = cols.iter().map(|&c| spec.alpha(c)).sum();
    -alpha - t.internal_faces(masks) as i64
}

fn catalan_check() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for d in 2..=5usize {
        for n in 0..=8 {
            let got = count_monociliated_trees(n, d)?;
            let want = BigInt::from(d).pow(n as u32) * catalan(n);
            if got != want {
                bad.push(format!("D={d} n={n}: {got} vs {want}"));
            }
        }
    }
    // the leading coefficients of the assembled two-point function
    let spec = ModelSpec::melonic(3, Scaling::Invariant)?;
    let k = assemble_series(&Observable::Cumulant(BoundaryGraph::identity(1, 3)), &spec, 4)?;
    for n in 0..=4u32 {
        let want = BigInt::from(-3).pow(n) * catalan(n as usize);
        if k.coefficient(&[n], Rational64::zero()) != BigRational::from_integer(want) {
            bad.push(format!("series coefficient at order {n}"));
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "36 tree counts and 5 series coefficients exact".into() } else { bad.join("; ") }))
}

fn melonic_check() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, l) in [(3, 0.01), (4, 0.005)] {
        let r = melonic_two_point(l, d, 30);
        ok &= r.deviations[30] < 1e-10;
        parts.push(format!("D={d} lambda={l}: |S_30 - G| = {:.2e}", r.deviations[30]));
    }
    let mut worst: f64 = 0.0;
    for d in [3, 4, 5] {
        for l in [Complex64::new(0.01, 0.0), Complex64::new(0.3, 0.2), Complex64::new(-0.01, 0.0), Complex64::new(2.0, -1.0)] {
            for side in [CutSide::Upper, CutSide::Lower] {
                let (a0, ai) = vacuum_solutions(l, d, side)?;
                worst = worst.max((a0 * ai - 1.0 / d as f64).norm());
            }
        }
    }
    ok &= worst < 1e-12;
    parts.push(format!("max |a0 a_inst - 1/D| = {worst:.2e}"));
    Ok((ok, parts.join("; ")))
}

fn oracle_check() -> Result<(bool, String)> {
    let spec = ModelSpec::melonic(3, Scaling::Invariant)?;
    let vac_o = oracle_connected_vacuum(&spec, 2)?;
    let vac_m = assemble_series(&Observable::FreeEnergy, &spec, 2)?;
    let one = BoundaryGraph::identity(1, 3);
    let k_o = oracle_cumulants(&spec, 1, 1)?;
    let k_m = assemble_series(&Observable::Cumulant(one.clone()), &spec, 1)?;
    let k_ok = k_o.len() == 1 && k_o.get(&one) == Some(&k_m);
    let ok = vac_o == vac_m && k_ok;
    Ok((ok, format!("vacuum {} terms equal: {}; K(1) order 1 equal: {k_ok}", vac_m.len(), vac_o == vac_m)))
}

fn standard_equality_ok(t: &SkeletonTables, cols: &[ColourSet], masks: &[u32], b: Option<&BoundaryGraph>, at_min: bool) -> bool {
    let tree = t.is_plane_tree();
    let mono = cols.iter().all(|c| c.len() == 1);
    let strands = t.multicoloured_strands_external(cols, masks);
    if at_min && !(tree && (mono || strands)) {
        return false;
    }
    let identity = b.map_or(true, |b| b.is_identity());
    if identity {
        return at_min == (tree && mono);
    }
    true
}

fn bounds_check() -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [3usize, 4] {
        for scaling in [Scaling::Invariant, Scaling::Enhanced] {
            let spec = ModelSpec::full_quartic(d, scaling)?;
            let (maps, bad) = sweep(&spec.interactions, 0..=4, 0..=2, true, |_, t, cols, masks, cov| {
                let b = if cov.is_empty() { None } else { t.boundary(masks, cov).ok() };
                let bg = b.clone().unwrap_or_else(|| BoundaryGraph::identity(0, d));
                let w = omega_of(&spec, t, cols, masks);
                let min = omega_min(&bg, &spec).expect("identity covariance");
                let mut v = u64::from(w < min);
                if scaling == Scaling::Invariant && !standard_equality_ok(t, cols, masks, b.as_ref(), w == min) {
                    v += 1;
                }
                v
            })?;
            ok &= bad == 0;
            parts.push(format!("D={d} {scaling:?}: {maps} maps, {bad} violations"));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn face_lemma_check() -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [3usize, 4] {
        let spec = ModelSpec::full_quartic(d, Scaling::Invariant)?;
        let (maps, bad) = sweep(&spec.interactions, 0..=4, 0..=2, true, |sk, t, _, masks, cov| {
            let k = cov.len() as i64;
            let c = if cov.is_empty() { 0 } else { t.boundary(masks, cov).map(|b| b.components()).unwrap_or(0) as i64 };
            let v = t.vertices as i64;
            let e = sk.edges as i64;
            let di = d as i64;
            let bound = 1 - (di - 1) * k - c + (di - 1) * v + (di / 2) * (e - v + 1);
            u64::from(t.internal_faces(masks) as i64 > bound)
        })?;
        ok &= bad == 0;
        parts.push(format!("D={d}: {maps} maps, {bad} violations"));
    }
    Ok((ok, parts.join("; ")))
}

fn bijection_check() -> Result<(bool, String)> {
    let mut graphs = 0u64;
    let mut bad = 0u64;
    for d in [3usize, 4] {
        let spec = ModelSpec::full_quartic(d, Scaling::Invariant)?;
        let q = &spec.interactions;
        for b in 0..=3usize {
            let max_k = if b == 3 { 1 } else { 2 };
            for k in 0..=max_k {
                if b == 0 && k == 0 {
                    continue;
                }
                let wicks = permutations(2 * b + k);
                let (g_count, g_bad) = wicks
                    .par_iter()
                    .map(|w| {
                        let (mut n, mut x) = (0u64, 0u64);
                        for_each_colouring(q, b, |cols| {
                            n += 1;
                            x += u64::from(!round_trip_ok(&spec, cols, k, w));
                        });
                        (n, x)
                    })
                    .reduce(|| (0, 0), |a, c| (a.0 + c.0, a.1 + c.1));
                graphs += g_count;
                bad += g_bad;
            }
        }
    }
    Ok((bad == 0, format!("{graphs} graphs (|B| <= 3; up to 2 leg pairs, 1 at |B| = 3), {bad} mismatches")))
}

fn round_trip_ok(spec: &ModelSpec, cols: &[ColourSet], k: usize, wick: &[usize]) -> bool {
    let Ok(g) = wick_graph(spec.rank, cols, k, wick) else { return false };
    let Ok(m) = graph_to_map(&g) else { return false };
    let Ok(back) = map_to_graph(&m) else { return false };
    let mut e1 = g.edges().to_vec();
    let mut e2 = back.edges().to_vec();
    e1.sort_by_key(|e| (e.colour, e.hollow, e.solid));
    e2.sort_by_key(|e| (e.colour, e.hollow, e.solid));
    if e1 != e2 {
        return false;
    }
    let Ok(again) = graph_to_map(&back) else { return false };
    if again != m {
        return false;
    }
    let faces = g.face_counts().map(|f| f.0);
    if faces.ok() != Some(m.trace_faces().internal) {
        return false;
    }
    if g.invariant_amplitude(spec).ok() != m.amplitude(spec).ok() {
        return false;
    }
    k == 0 || g.boundary_graph().ok() == m.map_boundary().ok()
}

fn matrix_genus_check() -> Result<(bool, String)> {
    let spec = ModelSpec::melonic(2, Scaling::Invariant)?;
    let mut maps = 0;
    let mut bad = 0;
    for e in 1..=4 {
        for_each_map(&EnumSpec::connected(spec.clone(), e, 0), |m, _| {
            maps += 1;
            let n_exp = -m.omega(&spec).expect("identity covariance");
            if n_exp != Rational64::from_integer(2 - 2 * m.genus() as i64) {
                bad += 1;
            }
        })?;
    }
    Ok((bad == 0, format!("{maps} maps, {bad} mismatches")))
}

fn classifier_check() -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut std_ok = true;
    for (d, want) in [(3, Renormalisability::Super), (4, Renormalisability::Super), (5, Renormalisability::Just), (6, Renormalisability::Non)] {
        let got = classify_renormalisability(&ModelSpec::tft(d, Rational64::from_integer(1))?)?.class;
        std_ok &= got == want;
        parts.push(format!("D={d}: {got}"));
    }
    // stated table for the derivative rank-4 theory
    let mut enh_ok = true;
    for (eta, want) in [
        (Rational64::new(1, 2), Renormalisability::Super),
        (Rational64::new(3, 4), Renormalisability::Just),
        (Rational64::new(1, 1), Renormalisability::Non),
    ] {
        let got = classify_renormalisability(&ModelSpec::enhanced_tft(eta)?)?.class;
        enh_ok &= got == want;
        parts.push(format!("eta={eta}: {got} (stated: {want})"));
    }
    if !enh_ok {
        parts.push("the derived tree degree 4 + (3 - 4 eta)|B| grows for eta < 3/4 and decreases for eta > 3/4".into());
    }
    Ok((std_ok && enh_ok, parts.join("; ")))
}

fn enhanced_degree_check() -> Result<(bool, String)> {
    let q = ModelSpec::full_quartic(4, Scaling::Enhanced)?.interactions;
    let etas = [Rational64::new(1, 2), Rational64::new(3, 4), Rational64::new(1, 1)];
    let specs: Vec<ModelSpec> = etas.iter().map(|&e| ModelSpec::enhanced_tft(e)).collect::<Result<_>>()?;
    let just = &specs[1];
    let eta34 = Rational64::new(3, 4);
    let mut parts = Vec::new();

    // face-wise against bubble-wise, and the P-bound at eta = 3/4
    let run = |edges: RangeInclusive<usize>, cilia: RangeInclusive<usize>| -> Result<(u64, u64, u64)> {
        let p_bad = std::sync::atomic::AtomicU64::new(0);
        let (maps, bad) = sweep(&q, edges, cilia, false, |sk, t, cols, masks, cov| {
            let faces = TableFaces::new(t, masks, u32::MAX, sk.edges, cov.len());
            let mut v = 0;
            for marks in mark_sweep(cols, just) {
                let a = face_wise_degree(eta34, &faces, &marks);
                let b = bubble_wise_degree(eta34, cols, cov.len(), &faces, &marks);
                v += u64::from(a != b);
            }
            let w = max_degree_over_marks(eta34, cols, just, &faces);
            let bound = if cov.is_empty() {
                Rational64::from_integer(4)
            } else {
                Rational64::from_integer(2) - Rational64::new(cov.len() as i64, 2)
            };
            if w > bound {
                p_bad.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
            v
        })?;
        Ok((maps, bad, p_bad.into_inner()))
    };
    let (m1, b1, p1) = run(1..=4, 0..=2)?;
    let (m2, b2, p2) = run(5..=5, 0..=0)?;
    parts.push(format!(
        "face-wise vs bubble-wise: {} maps (E<=4 with k<=2, E=5 vacuum), {} mismatches; P-bound violations: {}",
        m1 + m2,
        b1 + b2,
        p1 + p2
    ));

    // tree degrees
    let mut tree_bad = 0u64;
    let mut trees = 0u64;
    for (eta, spec) in etas.iter().zip(&specs) {
        for k in 0..=1usize {
            for e in 1..=5usize {
                for sk in skeletons(e, k, true)? {
                    let t = sk.tables();
                    for_each_colouring(&q, e, |cols| {
                        trees += 1;
                        let masks = t.colour_masks(cols, 4);
                        let faces = TableFaces::new(&t, &masks, u32::MAX, e, k);
                        for marks in mark_sweep(cols, spec) {
                            let w = face_wise_degree(*eta, &faces, &marks);
                            let slope = Rational64::from_integer(3) - eta * 4;
                            let want = if k == 0 {
                                slope * e as i64 + 4
                            } else {
                                let ext = marks
                                    .iter()
                                    .enumerate()
                                    .filter(|(i, m)| m.map_or(false, |m| !faces.mark_internal(*i, m)))
                                    .count() as i64;
                                eta * 2 + slope * e as i64 - ext
                            };
                            tree_bad += u64::from(w != want);
                        }
                    });
                }
            }
        }
    }
    parts.push(format!("tree degrees: {trees} coloured trees x 3 eta, {tree_bad} mismatches"));

    let ok = b1 + b2 + p1 + p2 + tree_bad == 0;
    Ok((ok, parts.join("; ")))
}

fn enhanced_leading_check() -> Result<(bool, String)> {
    let spec = ModelSpec::full_quartic(4, Scaling::Enhanced)?;
    let leading = std::sync::atomic::AtomicU64::new(0);
    let (maps, bad) = sweep(&spec.interactions, 1..=5, 0..=0, false, |_, t, cols, masks, _| {
        let at_min = omega_of(&spec, t, cols, masks) == -4;
        if at_min {
            leading.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        u64::from(at_min != t.cactus(cols).is_cactus())
    })?;
    Ok((bad == 0, format!("{maps} vacuum maps, {} at Omega = -D, {bad} counterexamples", leading.into_inner())))
}

fn t43_check() -> Result<(bool, String)> {
    let exact = delta_m_exact(1) == BigRational::new(13.into(), 3.into());
    let float = (delta_m(1) - 13.0 / 3.0).abs() < 1e-14;
    let logs = log_divergence(&[256, 512, 1024]);
    let log_ok = logs.iter().all(|l| l.relative_error < 0.05);
    let fit = a_growth_fit(10_000, 41);
    let last = fit.samples.iter().rev().take(5).map(|&(n, a)| a / (1.0 + n as f64).ln()).collect::<Vec<_>>();
    let spread = last.iter().cloned().fold(f64::MIN, f64::max) - last.iter().cloned().fold(f64::MAX, f64::min);
    let ok = exact && float && log_ok && fit.bounded;
    Ok((
        ok,
        format!(
            "delta_m(1) = 13/3: {exact}; relative errors of delta_m(2N)-delta_m(N) vs 2 pi ln 2: {}; A fit slope {:.4} intercept {:.4}, max A/log(1+n) {:.4} <= {:.4}, spread over the last decade {:.4}",
            logs.iter().map(|l| format!("N={} {:.4}", l.n, l.relative_error)).collect::<Vec<_>>().join(", "),
            fit.slope,
            fit.intercept,
            fit.max_ratio,
            fit.envelope,
            spread
        ),
    ))
}

fn forest_check() -> Result<(bool, String)> {
    let r = forest_suite(2024, 20, 100)?;
    Ok((
        r.nonzero_residuals == 0 && r.psd_violations == 0,
        format!(
            "{} polynomials, {} nonzero residuals; {} PSD samples, {} violations (smallest minor {:.3e})",
            r.polynomials, r.nonzero_residuals, r.psd_samples, r.psd_violations, r.worst_minor
        ),
    ))
}

fn log_relation_check() -> Result<(bool, String)> {
    let spec = ModelSpec::melonic(3, Scaling::Invariant)?;
    let conn = assemble_series(&Observable::FreeEnergy, &spec, 2)?;
    let full = assemble_series(&Observable::Partition, &spec, 2)?;
    let ok = connected_relation_check(&full, &conn, 2)?;
    Ok((ok, format!("exp of {} connected terms against {} full terms: {ok}", conn.len(), full.len())))
}
