//! Colour sets, boundary graphs and model descriptions.
//!
//! Colours are numbered `1..=D`. A quartic interaction is labelled by a colour
//! set `C` and its complement labels the same invariant, so every set is stored
//! in canonical form: at most `D/2` colours, and at exactly `D/2` the
//! representative containing colour 1.

use std::fmt;

use num::rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ColourSet {
    bits: u16,
    rank: u8,
}

impl ColourSet {
    /// Builds a colour set without canonicalising it.
    pub fn from_colours(colours: &[usize], rank: usize) -> Result<Self> {
        check_rank(rank)?;
        let mut bits = 0u16;
        for &c in colours {
            if c == 0 || c > rank {
                return Err(Error::InvalidColourSet(format!(
                    "colour {c} outside 1..={rank}"
                )));
            }
            bits |= 1 << (c - 1);
        }
        Self::from_bits(bits, rank)
    }

    pub fn from_bits(bits: u16, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        let full = full_mask(rank);
        if bits == 0 {
            return Err(Error::InvalidColourSet("empty colour set".into()));
        }
        if bits & !full != 0 {
            return Err(Error::InvalidColourSet(format!(
                "bits {bits:#b} outside rank {rank}"
            )));
        }
        if bits == full {
            return Err(Error::InvalidColourSet("full colour set".into()));
        }
        Ok(ColourSet {
            bits,
            rank: rank as u8,
        })
    }

    pub fn canonicalise(colours: &[usize], rank: usize) -> Result<Self> {
        Ok(Self::from_colours(colours, rank)?.canonical())
    }

    /// Parses a set that must already be canonical.
    pub fn canonical_from(colours: &[usize], rank: usize) -> Result<Self> {
        let c = Self::from_colours(colours, rank)?;
        if !c.is_canonical() {
            return Err(Error::InvalidColourSet(format!(
                "{c} is not canonical at rank {rank}"
            )));
        }
        Ok(c)
    }

    pub fn canonical(self) -> Self {
        let d = self.rank as usize;
        let n = self.len();
        if 2 * n < d || (2 * n == d && self.bits & 1 == 1) {
            self
        } else {
            self.complement()
        }
    }

    pub fn is_canonical(self) -> bool {
        self.canonical() == self
    }

    pub fn complement(self) -> Self {
        ColourSet {
            bits: full_mask(self.rank as usize) & !self.bits,
            rank: self.rank,
        }
    }

    pub fn contains(self, c: usize) -> bool {
        c >= 1 && c <= self.rank as usize && self.bits >> (c - 1) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn bits(self) -> u16 {
        self.bits
    }

    pub fn rank(self) -> usize {
        self.rank as usize
    }

    pub fn colours(self) -> Vec<usize> {
        (1..=self.rank as usize).filter(|&c| self.contains(c)).collect()
    }

    /// `|C| = D/2`: the edge carries as many colours as an edge can.
    pub fn is_maximal(self) -> bool {
        2 * self.len() == self.rank as usize
    }

    /// Every canonical colour set at the given rank, ordered by size then bits.
    pub fn all_canonical(rank: usize) -> Vec<ColourSet> {
        let mut out: Vec<ColourSet> = (1..full_mask(rank))
            .filter_map(|b| ColourSet::from_bits(b, rank).ok())
            .filter(|c| c.is_canonical())
            .collect();
        out.sort_by_key(|c| (c.len(), c.colours()));
        out
    }
}

impl fmt::Display for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.colours().iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", cs.join(","))
    }
}

impl Serialize for ColourSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.colours().serialize(s)
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if !(2..=MAX_RANK).contains(&rank) {
        return Err(Error::InvalidColourSet(format!(
            "rank {rank} outside 2..={MAX_RANK}"
        )));
    }
    Ok(())
}

fn full_mask(rank: usize) -> u16 {
    if rank >= 16 {
        u16::MAX
    } else {
        (1u16 << rank) - 1
    }
}

/// Disjoint-set forest with union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn sets(&self) -> usize {
        self.sets
    }
}

/// The D-uple of permutations carried by the external legs of a cumulant.
/// `tau[c-1][d] = w` means the black vertex `d` is joined by colour `c` to
/// the white vertex `w`. Indices are 0-based here and 1-based in JSON.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "BoundaryJson", into = "BoundaryJson")]
pub struct BoundaryGraph {
    k: usize,
    tau: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct BoundaryJson {
    k: usize,
    tau: Vec<Vec<usize>>,
}

impl TryFrom<BoundaryJson> for BoundaryGraph {
    type Error = Error;
    fn try_from(j: BoundaryJson) -> Result<Self> {
        let tau = j
            .tau
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&x| {
                        x.checked_sub(1)
                            .ok_or_else(|| Error::Invalid("boundary labels start at 1".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BoundaryGraph::new(j.k, tau)
    }
}

impl From<BoundaryGraph> for BoundaryJson {
    fn from(b: BoundaryGraph) -> Self {
        BoundaryJson {
            k: b.k,
            tau: b
                .tau
                .iter()
                .map(|p| p.iter().map(|x| x + 1).collect())
                .collect(),
        }
    }
}

impl BoundaryGraph {
    pub fn new(k: usize, tau: Vec<Vec<usize>>) -> Result<Self> {
        if tau.len() < 2 || tau.len() > MAX_RANK {
            return Err(Error::Invalid(format!(
                "boundary graph needs 2..={MAX_RANK} permutations, got {}",
                tau.len()
            )));
        }
        for p in &tau {
            if !is_permutation(p, k) {
                return Err(Error::Invalid(format!("{p:?} is not a permutation of {k}")));
            }
        }
        Ok(BoundaryGraph { k, tau })
    }

    pub fn identity(k: usize, rank: usize) -> Self {
        BoundaryGraph {
            k,
            tau: vec![(0..k).collect(); rank],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.tau.len()
    }

    /// Permutation of colour `c` (1-based colour).
    pub fn tau(&self, c: usize) -> &[usize] {
        &self.tau[c - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.tau
            .iter()
            .all(|p| p.iter().enumerate().all(|(i, &x)| i == x))
    }

    /// Connected components of the bipartite D-coloured graph on the `k`
    /// black and `k` white vertices. Zero for the empty boundary.
    pub fn components(&self) -> usize {
        let k = self.k;
        let mut uf = UnionFind::new(2 * k);
        for p in &self.tau {
            for (d, &w) in p.iter().enumerate() {
                uf.union(d, k + w);
            }
        }
        uf.sets()
    }
}

pub fn boundary_components(b: &BoundaryGraph) -> usize {
    b.components()
}

pub(crate) fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    /// `alpha_C = 1 - D`.
    Invariant,
    /// `alpha_C = |C| - D`.
    Enhanced,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Propagator {
    Identity,
    /// Covariance `1/(p^(2 eta) + m^(2 eta))` of a field theory over U(1)^D.
    PowerLaplacian { eta: Rational64 },
}

/// A quartic model: rank, interaction set, scaling of the couplings in N,
/// and covariance. Interactions are grouped into named coupling families.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModelSpec {
    pub rank: usize,
    pub interactions: Vec<ColourSet>,
    pub families: Vec<usize>,
    pub couplings: Vec<String>,
    pub scaling: Scaling,
    pub propagator: Propagator,
    /// Necklace interactions carry one derivative insertion (enhanced field theory).
    pub marked_necklaces: bool,
}

impl ModelSpec {
    pub fn new(
        rank: usize,
        interactions: Vec<ColourSet>,
        scaling: Scaling,
        propagator: Propagator,
    ) -> Result<Self> {
        let n = interactions.len();
        let spec = ModelSpec {
            rank,
            interactions,
            families: vec![0; n],
            couplings: vec!["lambda".into()],
            scaling,
            propagator,
            marked_necklaces: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// One melonic interaction `V_{c}` per colour.
    pub fn melonic(rank: usize, scaling: Scaling) -> Result<Self> {
        let mut q: Vec<ColourSet> = (1..=rank)
            .map(|c| ColourSet::canonicalise(&[c], rank))
            .collect::<Result<_>>()?;
        q.sort();
        q.dedup();
        Self::new(rank, q, scaling, Propagator::Identity)
    }

    /// Every connected quartic invariant of the given rank.
    pub fn full_quartic(rank: usize, scaling: Scaling) -> Result<Self> {
        check_rank(rank)?;
        Self::new(
            rank,
            ColourSet::all_canonical(rank),
            scaling,
            Propagator::Identity,
        )
    }

    /// Tensor field theory with melonic interactions and covariance exponent `eta`.
    pub fn tft(rank: usize, eta: Rational64) -> Result<Self> {
        let mut m = Self::melonic(rank, Scaling::Invariant)?;
        m.propagator = Propagator::PowerLaplacian { eta };
        Ok(m)
    }

    /// Rank-4 field theory with melonic couplings `lambda1` and derivative
    /// necklace couplings `lambda2`.
    pub fn enhanced_tft(eta: Rational64) -> Result<Self> {
        let q = ColourSet::all_canonical(4);
        let families = q.iter().map(|c| usize::from(c.len() == 2)).collect();
        let spec = ModelSpec {
            rank: 4,
            interactions: q,
            families,
            couplings: vec!["lambda1".into(), "lambda2".into()],
            scaling: Scaling::Enhanced,
            propagator: Propagator::PowerLaplacian { eta },
            marked_necklaces: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_rank(self.rank)?;
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.interactions {
            if c.rank() != self.rank || !c.is_canonical() {
                return Err(Error::InvalidColourSet(format!(
                    "{c} is not a canonical rank-{} set",
                    self.rank
                )));
            }
            if !seen.insert(*c) {
                return Err(Error::InvalidColourSet(format!("duplicate interaction {c}")));
            }
        }
        if self.families.len() != self.interactions.len()
            || self.families.iter().any(|&f| f >= self.couplings.len())
        {
            return Err(Error::Invalid("coupling families out of range".into()));
        }
        if let Propagator::PowerLaplacian { eta } = self.propagator {
            if eta <= Rational64::from_integer(0) {
                return Err(Error::Invalid("eta must be positive".into()));
            }
        }
        Ok(())
    }

    /// Exponent of N attached to one interaction of colours `c`.
    pub fn alpha(&self, c: ColourSet) -> i64 {
        let d = self.rank as i64;
        match self.scaling {
            Scaling::Invariant => 1 - d,
            Scaling::Enhanced => c.len() as i64 - d,
        }
    }

    pub fn family_of(&self, c: ColourSet) -> Option<usize> {
        self.interactions
            .iter()
            .position(|&x| x == c)
            .map(|i| self.families[i])
    }

    pub fn eta(&self) -> Option<Rational64> {
        match self.propagator {
            Propagator::PowerLaplacian { eta } => Some(eta),
            Propagator::Identity => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(c: &[usize], d: usize) -> ColourSet {
        ColourSet::canonicalise(c, d).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(cs(&[2, 3], 3).colours(), vec![1]);
        assert_eq!(cs(&[1, 2], 4).colours(), vec![1, 2]);
        assert_eq!(cs(&[3, 4], 4).colours(), vec![1, 2]);
        assert!(ColourSet::canonicalise(&[], 3).is_err());
        assert!(ColourSet::canonicalise(&[1, 2, 3], 3).is_err());
    }

    #[test]
    fn canonical_exhaustive_small_ranks() {
        for d in 2..=6 {
            let full = (1u16 << d) - 1;
            for b in 1..full {
                let c = ColourSet::from_bits(b, d).unwrap();
                let k = c.canonical();
                assert_eq!(k.canonical(), k);
                assert_eq!(c.complement().canonical(), k);
                assert!(2 * k.len() <= d);
                if 2 * k.len() == d {
                    assert!(k.contains(1));
                }
            }
        }
    }

    #[test]
    fn canonical_counts() {
        assert_eq!(ColourSet::all_canonical(3).len(), 3);
        assert_eq!(ColourSet::all_canonical(4).len(), 7);
        assert_eq!(ColourSet::all_canonical(2).len(), 1);
    }

    #[test]
    fn boundary_component_examples() {
        assert_eq!(BoundaryGraph::identity(1, 3).components(), 1);
        assert_eq!(BoundaryGraph::identity(2, 3).components(), 2);
        let b = BoundaryGraph::new(2, vec![vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(b.components(), 1);
        assert_eq!(BoundaryGraph::identity(0, 3).components(), 0);
    }

    #[test]
    fn boundary_json_is_one_based() {
        let b = BoundaryGraph::new(2, vec![vec![1, 0], vec![0, 1], vec![0, 1]]).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"k":2,"tau":[[2,1],[1,2],[1,2]]}"#);
        let back: BoundaryGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<BoundaryGraph>(r#"{"k":2,"tau":[[1,1],[1,2]]}"#).is_err());
    }

    #[test]
    fn model_alphas() {
        let m = ModelSpec::full_quartic(4, Scaling::Enhanced).unwrap();
        assert_eq!(m.alpha(cs(&[1], 4)), -3);
        assert_eq!(m.alpha(cs(&[1, 2], 4)), -2);
        let m = ModelSpec::melonic(3, Scaling::Invariant).unwrap();
        assert_eq!(m.interactions.len(), 3);
        assert_eq!(m.alpha(cs(&[2], 3)), -2);
        assert_eq!(ModelSpec::melonic(2, Scaling::Invariant).unwrap().interactions.len(), 1);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_boundary() -> impl Strategy<Value = BoundaryGraph> {
        (1usize..6, 2usize..6).prop_flat_map(|(k, d)| {
            proptest::collection::vec(Just((0..k).collect::<Vec<_>>()).prop_shuffle(), d)
                .prop_map(move |tau| BoundaryGraph::new(k, tau).unwrap())
        })
    }

    proptest! {
        #[test]
        fn components_between_one_and_k(b in arb_boundary()) {
            let c = b.components();
            prop_assert!(c >= 1 && c <= b.k());
        }

        #[test]
        fn canonical_is_projection(d in 2usize..=16, raw in 1u16..u16::MAX) {
            let full = if d == 16 { u16::MAX } else { (1u16 << d) - 1 };
            let bits = raw & full;
            prop_assume!(bits != 0 && bits != full);
            let c = ColourSet::from_bits(bits, d).unwrap();
            prop_assert_eq!(c.canonical().canonical(), c.canonical());
            prop_assert_eq!(c.complement().canonical(), c.canonical());
        }
    }
}
