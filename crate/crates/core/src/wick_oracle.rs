//! Brute-force Gaussian moments by explicit Wick pairing, and an exact
//! verifier for the forest interpolation formula.
//!
//! Nothing here goes through maps. Tensor slots are numbered directly:
//! bubble `i` owns covariant slots `2i, 2i+1` and dual slots `2i, 2i+1`,
//! external covariant and dual legs follow. A pairing sends every covariant
//! slot to a dual slot; each colour's index lines are then traced with a
//! union-find.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, BigRational, One, Signed, Zero};
use num::rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::colour_kernel::{BoundaryGraph, ColourSet, ModelSpec, Propagator, UnionFind};
use crate::enumeration::permutations;
use crate::error::{budget, Error, Result};
use crate::series::{factorial, FormalSeries};

pub const MAX_ORDER: usize = 3;
pub const MAX_LEGS: usize = 2;
pub const MAX_RANK: usize = 4;

/// Per colour, the sorted `(dual label, covariant label)` pairs joined by an
/// index line.
pub type Structure = Vec<Vec<(usize, usize)>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingExpansion {
    pub order: usize,
    pub bubbles: Vec<ColourSet>,
    pub pairing: Vec<usize>,
    /// `loops + sum of alpha` over the bubbles.
    pub n_exponent: i64,
    pub structure: Structure,
}

/// Index lines of one colour. `crossed[i]` says whether the colour is in the
/// set of bubble `i`, which decides how its two pairs are joined.
fn trace_colour(pairing: &[usize], crossed: &[bool], cov: &[usize], dual: &[usize]) -> (i64, Vec<(usize, usize)>) {
    let b = crossed.len();
    let n = pairing.len();
    let mut uf = UnionFind::new(2 * n);
    for (x, &y) in pairing.iter().enumerate() {
        uf.union(x, n + y);
    }
    for (i, &c) in crossed.iter().enumerate() {
        let (p, q) = (2 * i, 2 * i + 1);
        if c {
            uf.union(p, n + q);
            uf.union(q, n + p);
        } else {
            uf.union(p, n + p);
            uf.union(q, n + q);
        }
    }
    let p = cov.len();
    let loops = (uf.sets() - p) as i64;
    let mut lines = Vec::with_capacity(p);
    for (j, &d) in dual.iter().enumerate() {
        let r = uf.find(n + 2 * b + j);
        let i = (0..p).find(|&i| uf.find(2 * b + i) == r).expect("every dual leg ends on a covariant leg");
        lines.push((d, cov[i]));
    }
    lines.sort_unstable();
    (loops, lines)
}

fn check_spec(spec: &ModelSpec, order: usize, legs: usize) -> Result<()> {
    spec.validate()?;
    if spec.propagator != Propagator::Identity {
        return Err(Error::UnsupportedModel("the oracle uses the identity covariance".into()));
    }
    budget("oracle order", MAX_ORDER, order)?;
    budget("oracle legs", MAX_LEGS, legs)?;
    budget("oracle rank", MAX_RANK, spec.rank)
}

/// Evaluates a single pairing term.
pub fn expand_pairing(spec: &ModelSpec, bubbles: &[ColourSet], pairing: &[usize], k: usize) -> Result<PairingExpansion> {
    let b = bubbles.len();
    if pairing.len() != 2 * b + k || !crate::colour_kernel::is_permutation(pairing, 2 * b + k) {
        return Err(Error::Invalid("pairing is not a bijection of the slots".into()));
    }
    let labels: Vec<usize> = (0..k).collect();
    let mut exp: i64 = bubbles.iter().map(|&c| spec.alpha(c)).sum();
    let mut structure = Vec::with_capacity(spec.rank);
    for c in 1..=spec.rank {
        let crossed: Vec<bool> = bubbles.iter().map(|s| s.contains(c)).collect();
        let (l, lines) = trace_colour(pairing, &crossed, &labels, &labels);
        exp += l;
        structure.push(lines);
    }
    Ok(PairingExpansion {
        order: b,
        bubbles: bubbles.to_vec(),
        pairing: pairing.to_vec(),
        n_exponent: exp,
        structure,
    })
}

/// Every bijection of `p` slots.
pub fn pairings(p: usize) -> Vec<Vec<usize>> {
    permutations(p)
}

type CountKey = (Structure, Vec<u32>, i64);

/// Unnormalised moment `E_0[prod T prod Tbar e^{-S_int}]` through coupling
/// degree `order`, with external covariant legs labelled `cov` and dual legs
/// labelled `dual`, split by index structure.
pub fn raw_moment(spec: &ModelSpec, order: usize, cov: &[usize], dual: &[usize]) -> Result<BTreeMap<Structure, FormalSeries>> {
    check_spec(spec, order, cov.len())?;
    if cov.len() != dual.len() {
        return Ok(BTreeMap::new());
    }
    let q = &spec.interactions;
    let d = spec.rank;
    let p = cov.len();
    let mut out: BTreeMap<Structure, FormalSeries> = BTreeMap::new();
    for b in 0..=order {
        let patterns = 1usize << b;
        let counts = pairings(2 * b + p)
            .par_iter()
            .fold(HashMap::<CountKey, i64>::new, |mut acc, pairing| {
                // loops and lines for every membership pattern of a colour
                let table: Vec<(i64, Vec<(usize, usize)>)> = (0..patterns)
                    .map(|m| {
                        let crossed: Vec<bool> = (0..b).map(|i| m >> i & 1 == 1).collect();
                        trace_colour(pairing, &crossed, cov, dual)
                    })
                    .collect();
                let mut assign = vec![0usize; b];
                loop {
                    let mut exp = 0i64;
                    let mut degrees = vec![0u32; spec.couplings.len()];
                    for &a in &assign {
                        exp += spec.alpha(q[a]);
                        degrees[spec.families[a]] += 1;
                    }
                    let mut structure = Vec::with_capacity(d);
                    for c in 1..=d {
                        let m = (0..b).fold(0, |m, i| m | (q[assign[i]].contains(c) as usize) << i);
                        exp += table[m].0;
                        structure.push(table[m].1.clone());
                    }
                    *acc.entry((structure, degrees, exp)).or_insert(0) += 1;
                    let mut i = 0;
                    while i < b {
                        assign[i] += 1;
                        if assign[i] < q.len() {
                            break;
                        }
                        assign[i] = 0;
                        i += 1;
                    }
                    if i == b {
                        break;
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, h| {
                for (k, v) in h {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            });
        // (-1/2)^b / b!
        let sign = if b % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let pref = BigRational::new(sign, BigInt::from(2u32).pow(b as u32) * factorial(b));
        let mut sorted: Vec<_> = counts.into_iter().collect();
        sorted.sort();
        for ((s, degrees, exp), n) in sorted {
            out.entry(s)
                .or_insert_with(|| FormalSeries::zero(spec.couplings.len()).with_order(order as u32))
                .add_term(degrees, Rational64::from_integer(exp), &pref * BigInt::from(n));
        }
    }
    Ok(out)
}

/// Partition function `Z/Z_0` through `order`.
pub fn oracle_partition(spec: &ModelSpec, order: usize) -> Result<FormalSeries> {
    let m = raw_moment(spec, order, &[], &[])?;
    Ok(m.into_values().next().unwrap_or_else(|| FormalSeries::zero(spec.couplings.len())))
}

/// Connected vacuum series, `log(Z/Z_0)`.
pub fn oracle_connected_vacuum(spec: &ModelSpec, order: usize) -> Result<FormalSeries> {
    Ok(oracle_partition(spec, order)?.log_trunc(order as u32)?.with_order(order as u32))
}

fn product(a: &Structure, b: &Structure) -> Structure {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut v: Vec<(usize, usize)> = x.iter().chain(y).copied().collect();
            v.sort_unstable();
            v
        })
        .collect()
}

/// Cumulants with `k` labelled legs of each polarity, keyed by boundary graph.
pub fn oracle_cumulants(spec: &ModelSpec, order: usize, k: usize) -> Result<BTreeMap<BoundaryGraph, FormalSeries>> {
    check_spec(spec, order, k)?;
    if k == 0 {
        return Err(Error::NoBoundary);
    }
    let o = order as u32;
    let zinv = oracle_partition(spec, order)?.inverse_trunc(o)?;
    // fields: covariant legs are bits 0..k, dual legs bits k..2k
    let full = (1usize << (2 * k)) - 1;
    let split = |mask: usize| -> (Vec<usize>, Vec<usize>) {
        let cov = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let dual = (0..k).filter(|j| mask >> (k + j) & 1 == 1).collect();
        (cov, dual)
    };
    let mut moments: Vec<BTreeMap<Structure, FormalSeries>> = vec![BTreeMap::new(); full + 1];
    for (mask, slot) in moments.iter_mut().enumerate().skip(1) {
        let (cov, dual) = split(mask);
        if cov.len() != dual.len() {
            continue;
        }
        for (s, v) in raw_moment(spec, order, &cov, &dual)? {
            slot.insert(s, v.mul_trunc(&zinv, o));
        }
    }
    let mut kappa: Vec<BTreeMap<Structure, FormalSeries>> = vec![BTreeMap::new(); full + 1];
    for mask in 1..=full {
        let mut acc = moments[mask].clone();
        let first = mask & mask.wrapping_neg();
        let rest = mask ^ first;
        // proper subsets A of mask containing the first field
        let mut sub = rest;
        loop {
            let a = sub | first;
            if a != mask {
                for (sa, ka) in &kappa[a] {
                    for (sb, mb) in &moments[mask ^ a] {
                        let term = ka.mul_trunc(mb, o).scale(&-BigRational::one());
                        let e = acc
                            .entry(product(sa, sb))
                            .or_insert_with(|| FormalSeries::zero(spec.couplings.len()));
                        *e = e.add(&term);
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        acc.retain(|_, v| !v.is_empty());
        kappa[mask] = acc;
    }
    let mut out = BTreeMap::new();
    for (s, v) in std::mem::take(&mut kappa[full]) {
        let tau = s
            .iter()
            .map(|lines| {
                let mut t = vec![0; k];
                for &(d, a) in lines {
                    t[d] = a;
                }
                t
            })
            .collect();
        out.insert(BoundaryGraph::new(k, tau)?, v.with_order(o));
    }
    Ok(out)
}

/// Explicit external indices: `cov[a][c]` and `dual[d][c]`.
#[derive(Clone, Debug)]
pub struct IndexAssignment {
    pub cov: Vec<Vec<u32>>,
    pub dual: Vec<Vec<u32>>,
}

/// Cumulant evaluated at explicit indices.
pub fn oracle_cumulant_at(spec: &ModelSpec, order: usize, idx: &IndexAssignment) -> Result<FormalSeries> {
    let k = idx.cov.len();
    if idx.dual.len() != k || idx.cov.iter().chain(&idx.dual).any(|v| v.len() != spec.rank) {
        return Err(Error::Invalid("index assignment does not match the rank and leg count".into()));
    }
    let mut out = FormalSeries::zero(spec.couplings.len());
    for (b, v) in oracle_cumulants(spec, order, k)? {
        let hit = (1..=spec.rank).all(|c| (0..k).all(|d| idx.dual[d][c - 1] == idx.cov[b.tau(c)[d]][c - 1]));
        if hit {
            out = out.add(&v);
        }
    }
    Ok(out.with_order(order as u32))
}

/// True iff the cumulant at these indices is exactly zero.
pub fn oracle_vanishing_check(spec: &ModelSpec, order: usize, idx: &IndexAssignment) -> Result<bool> {
    Ok(oracle_cumulant_at(spec, order, idx)?.is_empty())
}

/// Exact polynomial in the edge variables of the complete graph `K_n`.
/// Edges are ordered `(0,1), (0,2), ..., (n-2,n-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgePolynomial {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, BigRational>,
}

pub const MAX_FOREST_VERTICES: usize = 4;
pub const MAX_FOREST_DEGREE: usize = 4;

pub fn edge_list(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

impl EdgePolynomial {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Result<Self> {
        let m = n * n.saturating_sub(1) / 2;
        let mut p = EdgePolynomial { n, terms: BTreeMap::new() };
        for (e, c) in terms {
            if e.len() != m {
                return Err(Error::Invalid(format!("monomial needs {m} exponents")));
            }
            let entry = p.terms.entry(e).or_insert_with(BigRational::zero);
            *entry += c;
        }
        p.terms.retain(|_, c| !c.is_zero());
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    pub fn at_one(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c)
    }

    fn derivative(&self, edge: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[edge] > 0 {
                let mut f = e.clone();
                f[edge] -= 1;
                *terms.entry(f).or_insert_with(BigRational::zero) += c * BigInt::from(e[edge]);
            }
        }
        EdgePolynomial { n: self.n, terms }
    }

    /// Random polynomial with integer coefficients and total degree at most `deg`.
    pub fn random(n: usize, deg: u32, n_terms: usize, rng: &mut impl Rng) -> Self {
        let m = n * (n - 1) / 2;
        let mut terms = Vec::new();
        for _ in 0..n_terms {
            let mut e = vec![0u32; m];
            let total = rng.gen_range(0..=deg);
            for _ in 0..total {
                e[rng.gen_range(0..m)] += 1;
            }
            let c: i64 = rng.gen_range(-9..=9);
            terms.push((e, BigRational::from_integer(c.into())));
        }
        EdgePolynomial::new(n, terms).expect("exponent vectors have the right length")
    }
}

/// Forests of `K_n` as edge-index lists, the empty one first.
pub fn forests(n: usize) -> Vec<Vec<usize>> {
    let edges = edge_list(n);
    let mut out = Vec::new();
    for mask in 0u32..1 << edges.len() {
        let mut uf = UnionFind::new(n);
        let ids: Vec<usize> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).collect();
        if ids.iter().all(|&i| uf.union(edges[i].0, edges[i].1)) {
            out.push(ids);
        }
    }
    out
}

/// For each edge of `K_n`, the forest edges on the path between its ends,
/// or `None` when the ends lie in different trees.
pub fn forest_paths(n: usize, forest: &[usize]) -> Vec<Option<Vec<usize>>> {
    let edges = edge_list(n);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &f in forest {
        let (a, b) = edges[f];
        adj[a].push((b, f));
        adj[b].push((a, f));
    }
    let path = |s: usize, t: usize| -> Option<Vec<usize>> {
        // depth-first search recording the edge used to reach each vertex
        let mut via: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &(w, f) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    via[w] = Some((v, f));
                    stack.push(w);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = t;
        while cur != s {
            let (p, f) = via[cur].unwrap();
            out.push(f);
            cur = p;
        }
        Some(out)
    };
    edges.iter().map(|&(a, b)| path(a, b)).collect()
}

/// `sum_F int du (prod_{e in F} d/dx_e) f (w^F(u))`, integrated exactly.
/// Each ordering of the forest parameters is a simplex on which every
/// weakening factor is a single coordinate.
pub fn forest_formula_sum(f: &EdgePolynomial) -> Result<BigRational> {
    budget("forest vertices", MAX_FOREST_VERTICES, f.n)?;
    budget("forest degree", MAX_FOREST_DEGREE, f.degree())?;
    let mut total = BigRational::zero();
    for forest in forests(f.n) {
        let mut g = f.clone();
        for &e in &forest {
            g = g.derivative(e);
        }
        if g.terms.is_empty() {
            continue;
        }
        let paths = forest_paths(f.n, &forest);
        let r = forest.len();
        for order in permutations(r) {
            // order[i] = position of forest edge i in increasing u
            let mut pos = vec![usize::MAX; f.n * (f.n - 1) / 2];
            for (i, &e) in forest.iter().enumerate() {
                pos[e] = order[i];
            }
            for (e, c) in &g.terms {
                let mut powers = vec![0u32; r];
                let mut zero = false;
                for (l, &k) in e.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    match &paths[l] {
                        None => zero = true,
                        Some(p) => {
                            let m = p.iter().map(|&x| pos[x]).min().unwrap();
                            powers[m] += k;
                        }
                    }
                }
                if zero {
                    continue;
                }
                // int over 0<t_1<...<t_r<1 of prod t_i^{a_i}
                let mut v = c.clone();
                let mut s = 0u64;
                for &a in &powers {
                    s += a as u64 + 1;
                    v /= BigRational::from_integer(BigInt::from(s));
                }
                total += v;
            }
        }
    }
    Ok(total)
}

/// `|forest sum - f(1,...,1)|`, exact.
pub fn forest_formula_check(f: &EdgePolynomial) -> Result<BigRational> {
    Ok((forest_formula_sum(f)? - f.at_one()).abs())
}

/// Matrix `w^F(u)` with unit diagonal.
pub fn weakening_matrix(n: usize, forest: &[usize], u: &[f64]) -> Vec<Vec<f64>> {
    let edges = edge_list(n);
    let paths = forest_paths(n, forest);
    let mut w = vec![vec![0.0; n]; n];
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for (l, &(a, b)) in edges.iter().enumerate() {
        let v = match &paths[l] {
            None => 0.0,
            Some(p) => p.iter().map(|&x| u[x]).fold(f64::INFINITY, f64::min),
        };
        w[a][b] = v;
        w[b][a] = v;
    }
    w
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = 1.0;
    for i in 0..n {
        let p = (i..n).max_by(|&x, &y| a[x][i].abs().total_cmp(&a[y][i].abs())).unwrap();
        if a[p][i] == 0.0 {
            return 0.0;
        }
        if p != i {
            a.swap(p, i);
            d = -d;
        }
        d *= a[i][i];
        for r in i + 1..n {
            let f = a[r][i] / a[i][i];
            for c in i..n {
                a[r][c] -= f * a[i][c];
            }
        }
    }
    d
}

/// Smallest principal minor of a symmetric matrix.
pub fn min_principal_minor(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..1 << n {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j]).collect()).collect();
        best = best.min(det(&sub));
    }
    best
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ForestSuiteReport {
    pub polynomials: usize,
    pub nonzero_residuals: usize,
    pub psd_samples: usize,
    pub psd_violations: usize,
    pub worst_minor: f64,
}

/// Randomised suite: `n_polys` polynomials cycling through `n = 2, 3, 4`,
/// and `samples` random points per forest for the positivity check.
pub fn forest_suite(seed: u64, n_polys: usize, samples: usize) -> Result<ForestSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for i in 0..n_polys {
        let n = 2 + i % 3;
        let f = EdgePolynomial::random(n, MAX_FOREST_DEGREE as u32, 6, &mut rng);
        if !forest_formula_check(&f)?.is_zero() {
            bad += 1;
        }
    }
    let mut total = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for n in 2..=MAX_FOREST_VERTICES {
        let m = n * (n - 1) / 2;
        for forest in forests(n) {
            for _ in 0..samples {
                let u: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
                let v = min_principal_minor(&weakening_matrix(n, &forest, &u));
                worst = worst.min(v);
                total += 1;
                if v < -1e-12 {
                    violations += 1;
                }
            }
        }
    }
    Ok(ForestSuiteReport {
        polynomials: n_polys,
        nonzero_residuals: bad,
        psd_samples: total,
        psd_violations: violations,
        worst_minor: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour_kernel::Scaling;
    use crate::series_engine::{assemble_series, cumulants_by_boundary, Observable};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pairing_counts() {
        assert_eq!(pairings(3).len(), 6);
        assert_eq!(pairings(5).len(), 120);
    }

    #[test]
    fn gaussian_two_point() {
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let m = raw_moment(&spec, 0, &[0], &[0]).unwrap();
        assert_eq!(m.len(), 1);
        let (s, v) = m.into_iter().next().unwrap();
        assert_eq!(s, vec![vec![(0, 0)]; 3]);
        assert_eq!(v, FormalSeries::one(1));
    }

    #[test]
    fn first_order_vacuum() {
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let f = oracle_connected_vacuum(&spec, 1).unwrap();
        assert_eq!(f.coefficient(&[1], Rational64::from_integer(3)), q(-3, 2));
        assert_eq!(f.coefficient(&[1], Rational64::from_integer(2)), q(-3, 2));
    }

    #[test]
    fn agrees_with_maps() {
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let o = oracle_connected_vacuum(&spec, 2).unwrap();
        let m = assemble_series(&Observable::FreeEnergy, &spec, 2).unwrap();
        assert_eq!(o, m);
        let k1 = oracle_cumulants(&spec, 1, 1).unwrap();
        let one = BoundaryGraph::identity(1, 3);
        assert_eq!(k1.len(), 1);
        assert_eq!(k1[&one], assemble_series(&Observable::Cumulant(one.clone()), &spec, 1).unwrap());
        let toy = ModelSpec::full_quartic(3, Scaling::Enhanced).unwrap();
        let k2 = oracle_cumulants(&toy, 1, 2).unwrap();
        let maps = cumulants_by_boundary(&toy, 2, 1).unwrap();
        assert_eq!(k2.len(), maps.len());
        for (b, s) in maps.values() {
            assert_eq!(&k2[b], s, "boundary {b:?}");
        }
    }

    #[test]
    fn scaling_shift() {
        let inv = ModelSpec::full_quartic(4, Scaling::Invariant).unwrap();
        let enh = ModelSpec::full_quartic(4, Scaling::Enhanced).unwrap();
        let q = inv.interactions.clone();
        for pairing in pairings(5) {
            let bubbles = [q[0], q[5]];
            let a = expand_pairing(&inv, &bubbles, &pairing, 1).unwrap();
            let b = expand_pairing(&enh, &bubbles, &pairing, 1).unwrap();
            let shift: i64 = bubbles.iter().map(|&c| enh.alpha(c) - inv.alpha(c)).sum();
            assert_eq!(b.n_exponent - a.n_exponent, shift);
            assert_eq!(a.structure, b.structure);
        }
    }

    #[test]
    fn non_invariant_indices_vanish() {
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        let swapped = IndexAssignment { cov: vec![vec![1, 2, 3]], dual: vec![vec![2, 1, 3]] };
        assert!(oracle_vanishing_check(&spec, 1, &swapped).unwrap());
        let same = IndexAssignment { cov: vec![vec![1, 2, 3]], dual: vec![vec![1, 2, 3]] };
        assert!(!oracle_vanishing_check(&spec, 1, &same).unwrap());
        let odd = IndexAssignment {
            cov: vec![vec![1, 1, 1], vec![2, 2, 2]],
            dual: vec![vec![1, 2, 1], vec![2, 1, 1]],
        };
        assert!(oracle_vanishing_check(&spec, 1, &odd).unwrap());
        let melon = IndexAssignment {
            cov: vec![vec![1, 1, 1], vec![2, 2, 2]],
            dual: vec![vec![2, 1, 1], vec![1, 2, 2]],
        };
        assert!(!oracle_vanishing_check(&spec, 1, &melon).unwrap());
    }

    #[test]
    fn guards() {
        let spec = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        assert!(matches!(raw_moment(&spec, 4, &[], &[]), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(oracle_cumulants(&spec, 1, 3), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn forest_examples() {
        let x2 = EdgePolynomial::new(2, [(vec![2], q(1, 1))]).unwrap();
        assert!(forest_formula_check(&x2).unwrap().is_zero());
        assert_eq!(forests(3).len(), 7);
        assert_eq!(forests(4).len(), 38);
        let f = EdgePolynomial::new(3, [(vec![1, 0, 1], q(1, 1))]).unwrap();
        assert!(forest_formula_check(&f).unwrap().is_zero());
        let bad = EdgePolynomial::new(2, [(vec![5], q(1, 1))]).unwrap();
        assert!(forest_formula_check(&bad).is_err());
    }

    #[test]
    fn forest_suite_is_exact() {
        let r = forest_suite(7, 20, 100).unwrap();
        assert_eq!(r.nonzero_residuals, 0);
        assert_eq!(r.psd_violations, 0);
    }
}
