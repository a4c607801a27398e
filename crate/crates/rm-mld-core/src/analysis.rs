//! Invariants of the 16-point information sets of `RM(2, 5)`.
//!
//! The automorphism group of the code acts on information sets; the seven
//! shipped representatives lie in distinct orbits, which is certified by
//! comparing an invariant (the count of affinely independent 6-subsets)
//! rather than by enumerating the orbits themselves. Clique language: two
//! 2-flats are *compatible* when they share at most one point; censuses
//! count cliques of compatible 2-flats whose points all carry information
//! positions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::cliques::{BitGraph, CliqueSearch};
use crate::code::{CodeSpec, InformationSet};
use crate::geometry::enumerate_flats;
use crate::gf2::{point_rank, Point};
use crate::{Error, Result};

/// Orbit representatives: the lexicographically first 16-position
/// information set in each orbit, under the default power ordering of
/// `RM(2, 5)`.
pub const REPRESENTATIVE_INFO_SETS: [[u16; 16]; 7] = [
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 16],
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15, 26],
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 16, 20],
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19],
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 19, 20],
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 13, 15, 19, 27, 31],
];

/// The lexicographically first member of the seventh orbit that avoids the
/// last position (the position of the zero vector), used for puncturing.
pub const REPRESENTATIVE_7_AVOIDING_LAST: [u16; 16] =
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 13, 17, 19, 20, 27];

/// Orbit lengths as recorded with the representatives. These are shipped
/// annotations: verifying them would require full orbit enumeration, which
/// this crate does not attempt.
pub const ORBIT_LENGTHS_UNVERIFIED: [u64; 7] = [
    31_997_952, 79_994_880, 53_329_920, 5_332_992, 19_998_720, 6_666_240, 444_416,
];

pub fn representative_info_sets() -> [[u16; 16]; 7] {
    REPRESENTATIVE_INFO_SETS
}

/// The fingerprint of a 16-point information set of `RM(2, 5)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoSetInvariants {
    /// Number of affinely independent 6-subsets of the information points.
    pub affine_independent_6subsets: u64,
    /// `meeting[i]` = number of 2-flats meeting the information points in
    /// exactly `i` points; the entries sum to 1240.
    pub meeting: [u64; 5],
    /// Largest set of pairwise-compatible 2-flats fully inside the
    /// information points.
    pub max_clique: usize,
    /// Number of cliques of that maximum size.
    pub max_clique_count: u64,
}

/// Exact counts of cliques of each size at least `min_size` among the
/// 2-flats fully inside the information points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCensus {
    pub min_size: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl CliqueCensus {
    pub fn count(&self, size: usize) -> u64 {
        self.counts.get(&size).copied().unwrap_or(0)
    }
}

fn rm25_guard(spec: &CodeSpec) -> Result<()> {
    if spec.r() != 2 || spec.m() != 5 {
        return Err(Error::ParameterOutOfRange(format!(
            "this analysis is specific to r = 2, m = 5; got r = {}, m = {}",
            spec.r(),
            spec.m()
        )));
    }
    Ok(())
}

/// The 2-flats of `Z_2^5` as position masks, and the indices of those
/// lying fully inside / meeting exactly three of the given positions.
pub(crate) struct FlatTable {
    pub masks: Vec<u32>,
    pub set_mask: u32,
    pub inside: Vec<usize>,
    pub three: Vec<usize>,
}

pub(crate) fn flat_table(spec: &CodeSpec, positions: &[u16]) -> Result<FlatTable> {
    rm25_guard(spec)?;
    let flats = enumerate_flats(5, 2)?;
    let masks: Vec<u32> = flats
        .iter()
        .map(|f| {
            f.positions(spec.ordering())
                .iter()
                .fold(0u32, |acc, &p| acc | 1 << p)
        })
        .collect();
    let set_mask = positions.iter().fold(0u32, |acc, &p| acc | 1 << p);
    let mut inside = Vec::new();
    let mut three = Vec::new();
    for (i, &mask) in masks.iter().enumerate() {
        match (mask & set_mask).count_ones() {
            4 => inside.push(i),
            3 => three.push(i),
            _ => {}
        }
    }
    Ok(FlatTable {
        masks,
        set_mask,
        inside,
        three,
    })
}

/// Builds the compatibility graph (pairwise intersection at most one
/// point) over the listed flat indices.
pub(crate) fn compatibility_graph(masks: &[u32], indices: &[usize]) -> BitGraph {
    let mut g = BitGraph::new(indices.len());
    for (a, &i) in indices.iter().enumerate() {
        for (b, &j) in indices.iter().enumerate().take(a) {
            if (masks[i] & masks[j]).count_ones() <= 1 {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// The distribution of 2-flats over intersection sizes with an arbitrary
/// 16-position subset (no information-set requirement). The five counts
/// always sum to 1240, the number of 2-flats of `Z_2^5`.
pub fn meeting_profile(spec: &CodeSpec, positions: &[u16]) -> Result<[u64; 5]> {
    let table = flat_table(spec, positions)?;
    let mut meeting = [0u64; 5];
    for &mask in &table.masks {
        meeting[(mask & table.set_mask).count_ones() as usize] += 1;
    }
    Ok(meeting)
}

/// Computes the invariant fingerprint of an information set.
pub fn invariants(spec: &CodeSpec, info_set: &InformationSet) -> Result<InfoSetInvariants> {
    rm25_guard(spec)?;
    if info_set.len() != 16 {
        return Err(Error::LengthMismatch {
            expected: 16,
            found: info_set.len(),
        });
    }
    let points = info_set.points(spec.ordering());

    // Affinely independent 6-subsets: the five differences to the first
    // point must have full rank.
    let mut independent = 0u64;
    for a in 0..16 {
        for b in a + 1..16 {
            for c in b + 1..16 {
                for d in c + 1..16 {
                    for e in d + 1..16 {
                        for f in e + 1..16 {
                            let p0 = points[a];
                            let diffs = [
                                points[b] ^ p0,
                                points[c] ^ p0,
                                points[d] ^ p0,
                                points[e] ^ p0,
                                points[f] ^ p0,
                            ];
                            if point_rank(&diffs) == 5 {
                                independent += 1;
                            }
                        }
                    }
                }
            }
        }
    }

    let table = flat_table(spec, info_set.positions())?;
    let mut meeting = [0u64; 5];
    for &mask in &table.masks {
        meeting[(mask & table.set_mask).count_ones() as usize] += 1;
    }

    let graph = compatibility_graph(&table.masks, &table.inside);
    let mut search = CliqueSearch::new(&graph);
    let max_clique = search.max_clique_size();
    let mut max_clique_count = 0u64;
    if max_clique > 0 {
        search.visit_cliques(max_clique, |c| {
            debug_assert_eq!(c.len(), max_clique);
            max_clique_count += 1;
        });
    }

    Ok(InfoSetInvariants {
        affine_independent_6subsets: independent,
        meeting,
        max_clique,
        max_clique_count,
    })
}

/// Counts all cliques of size at least `min_size` among the 2-flats fully
/// inside the information points (cliques need not be maximal).
pub fn clique_census(
    spec: &CodeSpec,
    info_set: &InformationSet,
    min_size: usize,
) -> Result<CliqueCensus> {
    rm25_guard(spec)?;
    let table = flat_table(spec, info_set.positions())?;
    let graph = compatibility_graph(&table.masks, &table.inside);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    CliqueSearch::new(&graph).visit_cliques(min_size, |c| {
        *counts.entry(c.len()).or_default() += 1;
    });
    Ok(CliqueCensus { min_size, counts })
}

/// True when all given sets are information sets with pairwise distinct
/// counts of affinely independent 6-subsets. Distinct counts certify
/// distinct orbits (affine maps preserve affine independence); equal
/// counts certify nothing, so the completeness of a representative list is
/// *not* established by this check.
pub fn pairwise_distinct_independence(spec: &CodeSpec, sets: &[InformationSet]) -> Result<bool> {
    let mut seen: Vec<u64> = Vec::with_capacity(sets.len());
    for s in sets {
        let a = invariants(spec, s)?.affine_independent_6subsets;
        if seen.contains(&a) {
            return Ok(false);
        }
        seen.push(a);
    }
    Ok(true)
}

/// Verifies the shipped orbit representatives: each is an information set
/// and their independence counts are pairwise distinct.
pub fn distinct_orbits(spec: &CodeSpec) -> Result<bool> {
    let mut sets = Vec::with_capacity(7);
    for rep in REPRESENTATIVE_INFO_SETS.iter() {
        sets.push(spec.information_set(rep)?);
    }
    pairwise_distinct_independence(spec, &sets)
}

/// An affine bijection `x -> L(x) + t` of `Z_2^m`, with `L` given by the
/// images of the unit vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub linear: Vec<Point>,
    pub translation: Point,
}

impl AffineMap {
    pub fn identity(m: u32) -> AffineMap {
        AffineMap {
            linear: (0..m).map(|i| 1 << i).collect(),
            translation: 0,
        }
    }

    pub fn translation(m: u32, t: Point) -> AffineMap {
        let mut map = AffineMap::identity(m);
        map.translation = t;
        map
    }

    pub fn is_invertible(&self) -> bool {
        point_rank(&self.linear) == self.linear.len()
    }

    pub fn apply(&self, p: Point) -> Point {
        let mut out = self.translation;
        for (i, &col) in self.linear.iter().enumerate() {
            if p >> i & 1 == 1 {
                out ^= col;
            }
        }
        out
    }

    /// A seeded random invertible affine map, by rejection sampling of the
    /// linear part.
    pub fn random(m: u32, rng: &mut impl RngCore) -> AffineMap {
        let mask = ((1u32 << m) - 1) as u16;
        loop {
            let linear: Vec<Point> = (0..m).map(|_| rng.next_u32() as u16 & mask).collect();
            if point_rank(&linear) == m as usize {
                return AffineMap {
                    linear,
                    translation: rng.next_u32() as u16 & mask,
                };
            }
        }
    }
}

/// Applies an invertible affine map to an information set and checks that
/// the invariant fingerprint is unchanged. The image is re-validated as an
/// information set rather than assumed.
pub fn affine_invariance_check(
    spec: &CodeSpec,
    info_set: &InformationSet,
    map: &AffineMap,
) -> Result<bool> {
    if !map.is_invertible() {
        return Err(Error::DependentBasis);
    }
    let image_positions: Vec<u16> = info_set
        .points(spec.ordering())
        .iter()
        .map(|&p| spec.ordering().position(map.apply(p)) as u16)
        .collect();
    let image = spec.information_set(&image_positions)?;
    Ok(invariants(spec, info_set)? == invariants(spec, &image)?)
}
