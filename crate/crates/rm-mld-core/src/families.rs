//! Admissible families of `r`-flats.
//!
//! A family is admissible for a set of positions when every position `j`
//! in scope has exactly `2^{m-r} - 2` designated ("used") flats, all
//! containing the point of `j` and pairwise intersecting exactly in it.
//! The number of used flats equals the number of first-step majority gates
//! of the decoder, so the constructions here are gate-count upper bounds
//! made concrete.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::code::{binomial, CodeSpec, InformationSet};
use crate::geometry::{block_aligned_spread, enumerate_flats, partial_spread, Flat};
use crate::gf2::{express_in_basis, Point, PointBasis, Word};
use crate::{Error, Result};

/// Which positions a family serves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scope {
    /// Every position of the code.
    AllPositions,
    /// Information positions only.
    Info(InformationSet),
}

impl Scope {
    pub fn positions(&self, n: usize) -> Vec<u16> {
        match self {
            Scope::AllPositions => (0..n as u16).collect(),
            Scope::Info(j) => j.positions().to_vec(),
        }
    }

    pub fn info_set(&self) -> Option<&InformationSet> {
        match self {
            Scope::AllPositions => None,
            Scope::Info(j) => Some(j),
        }
    }
}

/// A family of `r`-flats with its usage map.
#[derive(Clone, Debug)]
pub struct AdmissibleFamily {
    spec: CodeSpec,
    scope: Scope,
    flats: Vec<Flat>,
    /// position -> indices of the flats used there (ascending).
    usage: BTreeMap<u16, Vec<usize>>,
}

/// Distribution of flats over usage counts: `x(i)` flats are used at
/// exactly `i` positions, `1 <= i <= 2^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageProfile {
    x: Vec<u64>,
}

impl UsageProfile {
    pub fn x(&self, used_at: usize) -> u64 {
        if used_at == 0 || used_at > self.x.len() {
            0
        } else {
            self.x[used_at - 1]
        }
    }

    pub fn family_size(&self) -> u64 {
        self.x.iter().sum()
    }

    pub fn max_usage(&self) -> usize {
        self.x.len()
    }

    /// `(x(4), x(3), x(2), x(1))`, the shape quoted for 2-flat families.
    pub fn quad(&self) -> (u64, u64, u64, u64) {
        (self.x(4), self.x(3), self.x(2), self.x(1))
    }
}

impl AdmissibleFamily {
    pub fn from_parts(
        spec: CodeSpec,
        scope: Scope,
        flats: Vec<Flat>,
        usage: BTreeMap<u16, Vec<usize>>,
    ) -> AdmissibleFamily {
        AdmissibleFamily {
            spec,
            scope,
            flats,
            usage,
        }
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn usage(&self) -> &BTreeMap<u16, Vec<usize>> {
        &self.usage
    }

    pub fn used_at(&self, j: u16) -> &[usize] {
        self.usage.get(&j).map_or(&[], Vec::as_slice)
    }

    /// Checks every admissibility condition and returns the usage profile.
    ///
    /// Verified per scoped position `j`: exactly `2^{m-r} - 2` distinct
    /// used flats, each containing the point of `j`, pairwise intersecting
    /// in exactly that point. Then on the profile: every flat used
    /// somewhere, the total usage identity, and the pair bound
    /// `sum C(i,2) x_i <= C(|scope|, 2)`.
    pub fn validate(&self) -> Result<UsageProfile> {
        let spec = &self.spec;
        let fan_in = spec.gate_fan_in();
        let r = spec.r();
        for flat in &self.flats {
            if flat.dim() != r as usize || flat.m() != spec.m() {
                return Err(Error::ParameterOutOfRange(format!(
                    "family contains a dim-{} flat in an r = {r} family",
                    flat.dim()
                )));
            }
        }
        let masks: Vec<Word> = self
            .flats
            .iter()
            .map(|f| f.incidence(spec.ordering()))
            .collect();
        let positions = self.scope.positions(spec.n());
        let mut used_counts = vec![0u64; self.flats.len()];
        for &j in &positions {
            let used = self.usage.get(&j).ok_or(Error::FamilyViolation {
                position: j,
                flats: (0, 0),
                reason: "no used flats recorded for a scoped position",
            })?;
            if used.len() != fan_in {
                return Err(Error::FamilyViolation {
                    position: j,
                    flats: (used.len(), fan_in),
                    reason: "wrong number of used flats",
                });
            }
            for (a, &fa) in used.iter().enumerate() {
                if fa >= self.flats.len() {
                    return Err(Error::FamilyViolation {
                        position: j,
                        flats: (fa, fa),
                        reason: "used index out of range",
                    });
                }
                used_counts[fa] += 1;
                if !masks[fa].get(j as usize) {
                    return Err(Error::FamilyViolation {
                        position: j,
                        flats: (fa, fa),
                        reason: "used flat does not contain the position",
                    });
                }
                for &fb in used.iter().take(a) {
                    if fa == fb {
                        return Err(Error::FamilyViolation {
                            position: j,
                            flats: (fb, fa),
                            reason: "flat used twice at one position",
                        });
                    }
                    // Both contain the point of j, so a single common
                    // position forces the intersection to be exactly it.
                    if masks[fa].and_weight(&masks[fb]) != 1 {
                        return Err(Error::FamilyViolation {
                            position: j,
                            flats: (fb, fa),
                            reason: "used flats share more than the position point",
                        });
                    }
                }
            }
        }
        let mut x = vec![0u64; 1 << r];
        for (idx, &count) in used_counts.iter().enumerate() {
            if count == 0 {
                return Err(Error::FamilyViolation {
                    position: 0,
                    flats: (idx, idx),
                    reason: "flat never used",
                });
            }
            if count > 1 << r {
                return Err(Error::FamilyViolation {
                    position: 0,
                    flats: (idx, idx),
                    reason: "flat used at more positions than it has points",
                });
            }
            x[count as usize - 1] += 1;
        }
        let profile = UsageProfile { x };
        // Structural identities; failures here would be bugs, not inputs.
        let total_usage: u64 = profile
            .x
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1) * c)
            .sum();
        debug_assert_eq!(total_usage, (positions.len() * fan_in) as u64);
        let pair_spend: u64 = profile
            .x
            .iter()
            .enumerate()
            .map(|(i, &c)| binomial(i as u32 + 1, 2) * c)
            .sum();
        let pair_budget = binomial(positions.len() as u32, 2);
        if pair_spend > pair_budget {
            return Err(Error::FamilyViolation {
                position: 0,
                flats: (0, 0),
                reason: "pair budget exceeded despite per-position checks",
            });
        }
        Ok(profile)
    }
}

/// Builds the usage map "every flat is used at every scoped position it
/// contains" and drops flats that would end up unused.
fn usage_by_containment(
    spec: &CodeSpec,
    scope: &Scope,
    flats: Vec<Flat>,
) -> (Vec<Flat>, BTreeMap<u16, Vec<usize>>) {
    let positions = scope.positions(spec.n());
    let pos_set: BTreeSet<u16> = positions.iter().copied().collect();
    let mut kept = Vec::new();
    let mut usage: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
    for flat in flats {
        let touched: Vec<u16> = flat
            .positions(spec.ordering())
            .into_iter()
            .filter(|p| pos_set.contains(p))
            .collect();
        if touched.is_empty() {
            continue;
        }
        let idx = kept.len();
        kept.push(flat);
        for p in touched {
            usage.entry(p).or_default().push(idx);
        }
    }
    (kept, usage)
}

/// The full-coverage family behind the all-positions decoder:
/// `2^{m-r} (2^{m-r} - 2)` flats (all cosets of `2^{m-r} - 2`
/// pairwise-trivial subspaces); every position of the code is active in
/// exactly `2^{m-r} - 2` of them and any two flats meet in at most one
/// point.
pub fn construct_full_cover(spec: &CodeSpec) -> Result<AdmissibleFamily> {
    let (m, r) = (spec.m(), spec.r());
    let fan_in = spec.gate_fan_in();
    let spread = partial_spread(m, r)?;
    let mut flats = Vec::with_capacity(fan_in << (m - r));
    for subspace in &spread[..fan_in] {
        let mut seen = BTreeSet::new();
        for p in 0..1u32 << m {
            let coset = subspace.translate(p as Point);
            if seen.insert(coset.clone()) {
                flats.push(coset);
            }
        }
        debug_assert_eq!(seen.len(), 1 << (m - r));
    }
    let (flats, usage) = usage_by_containment(spec, &Scope::AllPositions, flats);
    Ok(AdmissibleFamily {
        spec: spec.clone(),
        scope: Scope::AllPositions,
        flats,
        usage,
    })
}

/// One independent per-position system for every information position:
/// `k (2^{m-r} - 2)` flats, each used at exactly one position.
///
/// Plain spread translates collide across nearby positions (`v + U` equals
/// `v' + U` whenever `v + v'` lies in `U`), so each position may rotate
/// its spread by a power of the field multiplication map, the smallest
/// power whose system is disjoint from everything already placed. Sharing
/// only happens if every rotation is exhausted.
pub fn construct_naive(spec: &CodeSpec, info_set: &InformationSet) -> Result<AdmissibleFamily> {
    let (m, r) = (spec.m(), spec.r());
    let fan_in = spec.gate_fan_in();
    let spread = partial_spread(m, r)?;
    let modulus = crate::gf2::default_modulus(m)?;
    let mul_alpha = |p: Point| -> Point {
        let shifted = (p as u32) << 1;
        if shifted >> m & 1 == 1 {
            ((shifted ^ modulus) & ((1 << m) - 1)) as Point
        } else {
            shifted as Point
        }
    };
    let mut index: BTreeMap<Flat, usize> = BTreeMap::new();
    let mut flats = Vec::new();
    let mut usage: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
    for &j in info_set.positions() {
        let v = spec.ordering().point(j as usize);
        let mut bases: Vec<Vec<Point>> = spread.iter().map(|s| s.basis().to_vec()).collect();
        let mut system: Option<Vec<Flat>> = None;
        for _rotation in 0..1u32 << m {
            let candidates: Vec<Flat> = bases.iter().map(|b| Flat::new(m, v, b)).collect();
            let fresh: Vec<&Flat> = candidates
                .iter()
                .filter(|f| !index.contains_key(*f))
                .collect();
            if fresh.len() >= fan_in {
                system = Some(fresh.into_iter().take(fan_in).cloned().collect());
                break;
            }
            for basis in &mut bases {
                for d in basis.iter_mut() {
                    *d = mul_alpha(*d);
                }
            }
        }
        // All rotations exhausted: share the plain translates.
        let system =
            system.unwrap_or_else(|| spread.iter().take(fan_in).map(|s| s.translate(v)).collect());
        let mut chosen: Vec<usize> = Vec::with_capacity(fan_in);
        for flat in system {
            let idx = *index.entry(flat.clone()).or_insert_with(|| {
                flats.push(flat);
                flats.len() - 1
            });
            if !chosen.contains(&idx) {
                chosen.push(idx);
            }
        }
        chosen.sort_unstable();
        usage.insert(j, chosen);
    }
    Ok(AdmissibleFamily {
        spec: spec.clone(),
        scope: Scope::Info(info_set.clone()),
        flats,
        usage,
    })
}

/// A family of `r`-flats covering every point of weight at least `m - r`
/// in the standard basis: coordinate-subspace translates through the
/// all-ones point (those containing the first `i` unit directions), plus
/// batched flats over the points those miss.
fn weight_cover_family(m: u32, r: u32, i: u32) -> Vec<Flat> {
    let e_all: Point = ((1u32 << m) - 1) as Point;
    let mut family = Vec::new();
    let tail: Vec<u32> = (i..m).collect();
    let mut picks = combinations(&tail, (r - i) as usize);
    picks.sort();
    for pick in picks {
        let mut basis: Vec<Point> = (0..i).map(|b| 1 << b).collect();
        basis.extend(pick.iter().map(|&b| 1 << b));
        family.push(Flat::new(m, e_all, &basis));
    }
    // Points of weight >= m - r not covered yet, batched r + 1 at a time.
    let mut uncovered: Vec<Point> = (0..1u32 << m)
        .map(|p| p as Point)
        .filter(|&p| (p.count_ones() + r) >= m && !family.iter().any(|f| f.contains(p)))
        .collect();
    uncovered.sort_unstable();
    for group in uncovered.chunks((r + 1) as usize) {
        let base = group[0];
        let mut dirs: Vec<Point> = group[1..].iter().map(|&p| p ^ base).collect();
        // Pad the affine span up to dimension exactly r.
        let mut pb = PointBasis::from_points(&dirs);
        let mut filler = 1 as Point;
        while pb.dim() < r as usize {
            if pb.insert(filler) {
                dirs.push(filler);
            }
            filler += 1;
        }
        family.push(Flat::new(m, base, &dirs));
    }
    family
}

fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Extends `partial` (independent) to a full basis of `Z_2^m` by unit
/// vectors, deterministically.
fn complete_basis(m: u32, partial: &[Point]) -> Vec<Point> {
    let mut basis = partial.to_vec();
    let mut pb = PointBasis::from_points(partial);
    for b in 0..m {
        if pb.insert(1 << b) {
            basis.push(1 << b);
        }
    }
    debug_assert_eq!(basis.len(), m as usize);
    basis
}

/// A linear bijection of `Z_2^m` taking `span(from)` onto `span(to)`,
/// returned as the images of the unit vectors.
fn aligning_linear_map(m: u32, from: &[Point], to: &[Point]) -> Vec<Point> {
    let from_full = complete_basis(m, from);
    let to_full = complete_basis(m, to);
    (0..m)
        .map(|j| {
            let coeffs = express_in_basis(1 << j, &from_full).expect("completed basis");
            let mut img: Point = 0;
            for (i, &t) in to_full.iter().enumerate() {
                if coeffs >> i & 1 == 1 {
                    img ^= t;
                }
            }
            img
        })
        .collect()
}

fn apply_linear(map: &[Point], p: Point) -> Point {
    let mut out = 0;
    for (i, &col) in map.iter().enumerate() {
        if p >> i & 1 == 1 {
            out ^= col;
        }
    }
    out
}

/// Per-position systems sharing one flat from a fixed weight-cover family:
/// for each canonical information position, one used flat comes from the
/// cover and the remaining `2^{m-r} - 3` are a translated spread system
/// mapped onto it by an affine bijection fixing the position's point.
pub fn construct_upper_a(spec: &CodeSpec) -> Result<AdmissibleFamily> {
    let (m, r) = (spec.m(), spec.r());
    let fan_in = spec.gate_fan_in();
    let basis: Vec<Point> = (0..m).map(|b| 1 << b).collect();
    let info_set = spec.canonical_information_set(&basis)?;
    let b = (r + 1).next_power_of_two().trailing_zeros();
    let cover = weight_cover_family(m, r, b);
    let spread = partial_spread(m, r)?;

    let mut index: BTreeMap<Flat, usize> = BTreeMap::new();
    let mut flats: Vec<Flat> = Vec::new();
    let mut usage: BTreeMap<u16, Vec<usize>> = BTreeMap::new();

    for &j in info_set.positions() {
        let v = spec.ordering().point(j as usize);
        let anchor = cover
            .iter()
            .find(|f| f.contains(v))
            .expect("the cover contains every high-weight point")
            .clone();
        // Map the first spread subspace onto the anchor's direction space.
        let lin = aligning_linear_map(m, spread[0].basis(), anchor.basis());
        let mut system = vec![anchor];
        for subspace in spread.iter().take(fan_in).skip(1) {
            let dirs: Vec<Point> = subspace
                .basis()
                .iter()
                .map(|&d| apply_linear(&lin, d))
                .collect();
            system.push(Flat::new(m, v, &dirs));
        }
        let mut chosen = Vec::with_capacity(fan_in);
        for flat in system {
            let idx = *index.entry(flat.clone()).or_insert_with(|| {
                flats.push(flat);
                flats.len() - 1
            });
            if !chosen.contains(&idx) {
                chosen.push(idx);
            }
        }
        chosen.sort_unstable();
        usage.insert(j, chosen);
    }
    Ok(AdmissibleFamily {
        spec: spec.clone(),
        scope: Scope::Info(info_set),
        flats,
        usage,
    })
}

/// Size bound met by [`construct_upper_a`]: `k (2^{m-r} - 3)` plus the
/// cover size `C(m-b, r-b) + ceil(sum_{s<b} 2^s C(m-1-s, r-s) / (r+1))`
/// with `b = ceil(log2(r+1))`.
pub fn upper_a_construction_bound(r: u32, m: u32) -> u64 {
    let k: u64 = (0..=r).map(|i| binomial(m, i)).sum();
    let b = (r + 1).next_power_of_two().trailing_zeros();
    let uncovered: u64 = (0..b)
        .map(|s| (1u64 << s) * binomial(m - 1 - s, r - s))
        .sum();
    let cover = binomial(m - b, r - b) + uncovered.div_ceil(r as u64 + 1);
    k * ((1 << (m - r)) - 3) + cover
}

/// The full cover aligned to coordinate blocks, restricted to the
/// canonical information set: cosets containing no information point are
/// dropped, which removes at least `floor(m/r) sum_{s<m-2r} C(m-r, s)` of
/// them.
pub fn construct_upper_b(spec: &CodeSpec) -> Result<AdmissibleFamily> {
    let (m, r) = (spec.m(), spec.r());
    let fan_in = spec.gate_fan_in();
    let basis: Vec<Point> = (0..m).map(|b| 1 << b).collect();
    let info_set = spec.canonical_information_set(&basis)?;
    let spread = block_aligned_spread(m, r, fan_in)?;
    let mut flats = Vec::new();
    for subspace in &spread {
        let mut seen = BTreeSet::new();
        for p in 0..1u32 << m {
            let coset = subspace.translate(p as Point);
            if seen.insert(coset.clone()) {
                flats.push(coset);
            }
        }
    }
    let scope = Scope::Info(info_set);
    let (flats, usage) = usage_by_containment(spec, &scope, flats);
    Ok(AdmissibleFamily {
        spec: spec.clone(),
        scope,
        flats,
        usage,
    })
}

/// Upper-bound family for first-order codes: for `m >= 4`, all pairs
/// `{u_a, u_b}` with `a` an information index, `a < b < 2^{m-1} - 1`,
/// over a point sequence starting with an affine basis; exactly
/// `(m+1)(2^m - m - 4) / 2` pairs. For `m = 3` the special four-pair
/// family.
pub fn construct_rm1(m: u32) -> Result<AdmissibleFamily> {
    let spec = CodeSpec::with_default_ordering(1, m)?;
    // Point sequence: the affine basis {0, e_1, .., e_m} first, then the
    // smallest unused points; only the first 2^{m-1} - 1 entries matter.
    let mut points: Vec<Point> = core::iter::once(0).chain((0..m).map(|b| 1 << b)).collect();
    let mut rest: Vec<Point> = (0..1u32 << m)
        .map(|p| p as Point)
        .filter(|p| !points.contains(p))
        .collect();
    rest.sort_unstable();
    points.extend(rest);

    let info_positions: Vec<u16> = points[..=m as usize]
        .iter()
        .map(|&p| spec.ordering().position(p) as u16)
        .collect();
    let info_set = spec.information_set(&info_positions)?;

    let mut flats = Vec::new();
    let mut usage: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
    {
        let mut push_pair = |a: usize, b: usize| {
            let idx = flats.len();
            flats.push(Flat::new(m, points[a], &[points[a] ^ points[b]]));
            for &end in &[a, b] {
                if end <= m as usize {
                    let pos = spec.ordering().position(points[end]) as u16;
                    usage.entry(pos).or_default().push(idx);
                }
            }
        };
        if m == 3 {
            for (a, b) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
                push_pair(a, b);
            }
        } else {
            let last = (1usize << (m - 1)) - 2;
            for a in 0..=m as usize {
                for b in a + 1..=last {
                    push_pair(a, b);
                }
            }
        }
    }
    for used in usage.values_mut() {
        used.sort_unstable();
    }
    Ok(AdmissibleFamily {
        spec,
        scope: Scope::Info(info_set),
        flats,
        usage,
    })
}

/// Exact size of the first-order family: 4 for `m = 3`, else
/// `(m+1)(2^m - m - 4) / 2`.
pub fn rm1_family_size(m: u32) -> u64 {
    if m == 3 {
        4
    } else {
        (m as u64 + 1) * ((1u64 << m) - m as u64 - 4) / 2
    }
}

/// Outcome of the heuristic family search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub family: AdmissibleFamily,
    /// False when the budget ran out before any search attempt succeeded
    /// and the constructive fallback is returned instead.
    pub found_by_search: bool,
    pub iterations_used: u64,
}

/// Seeded greedy search for a small admissible family over `info_set`.
///
/// Strategy: greedy cover (each added flat is used at as many still-needy
/// positions as possible, ties broken by the seeded generator) with
/// restarts until the budget of flat placements is spent. The result
/// never exceeds the constructive fallback: the better closed-form
/// construction when `info_set` is the canonical one, the per-position
/// family otherwise.
pub fn search_family(
    spec: &CodeSpec,
    info_set: &InformationSet,
    budget: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    let fallback = {
        let mut best: Option<AdmissibleFamily> = None;
        for cand in [construct_upper_a(spec)?, construct_upper_b(spec)?] {
            if cand.scope.info_set() == Some(info_set)
                && best.as_ref().map_or(true, |b| cand.len() < b.len())
            {
                best = Some(cand);
            }
        }
        match best {
            Some(fam) => fam,
            None => construct_naive(spec, info_set)?,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<AdmissibleFamily> = None;
    let mut iterations = 0u64;
    while iterations < budget {
        if let Some(found) = greedy_attempt(spec, info_set, &mut rng, budget, &mut iterations)? {
            if best.as_ref().map_or(true, |b| found.len() < b.len()) {
                best = Some(found);
            }
        }
    }
    match best {
        Some(found) if found.len() <= fallback.len() => Ok(SearchOutcome {
            family: found,
            found_by_search: true,
            iterations_used: iterations,
        }),
        _ => Ok(SearchOutcome {
            family: fallback,
            found_by_search: false,
            iterations_used: iterations,
        }),
    }
}

fn greedy_attempt(
    spec: &CodeSpec,
    info_set: &InformationSet,
    rng: &mut ChaCha8Rng,
    budget: u64,
    iterations: &mut u64,
) -> Result<Option<AdmissibleFamily>> {
    let fan_in = spec.gate_fan_in();
    let ordering = spec.ordering();
    // Candidate pool: every r-flat touching at least one information point.
    let info_mask = {
        let mut w = Word::zero(spec.n());
        for &j in info_set.positions() {
            w.set(j as usize, true);
        }
        w
    };
    let candidates: Vec<(Flat, Word)> = enumerate_flats(spec.m(), spec.r())?
        .into_iter()
        .map(|f| {
            let mask = f.incidence(ordering);
            (f, mask)
        })
        .filter(|(_, mask)| mask.and_weight(&info_mask) >= 1)
        .collect();

    let mut demand: BTreeMap<u16, usize> =
        info_set.positions().iter().map(|&j| (j, fan_in)).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut usage: BTreeMap<u16, Vec<usize>> = BTreeMap::new();

    while demand.values().any(|&d| d > 0) {
        *iterations += 1;
        if *iterations >= budget {
            return Ok(None);
        }
        let mut best_score = 0usize;
        let mut best_at: Vec<(usize, Vec<u16>)> = Vec::new();
        for (ci, (_, mask)) in candidates.iter().enumerate() {
            if chosen.contains(&ci) {
                continue;
            }
            let mut serves: Vec<u16> = Vec::new();
            for (&j, &d) in demand.iter() {
                if d == 0 || !mask.get(j as usize) {
                    continue;
                }
                let compatible = usage.get(&j).map_or(true, |used| {
                    used.iter()
                        .all(|&u| mask.and_weight(&candidates[chosen[u]].1) == 1)
                });
                if compatible {
                    serves.push(j);
                }
            }
            if serves.len() > best_score {
                best_score = serves.len();
                best_at = vec![(ci, serves)];
            } else if serves.len() == best_score && best_score > 0 {
                best_at.push((ci, serves));
            }
        }
        if best_score == 0 {
            return Ok(None); // dead end; the caller restarts
        }
        let pick = rng.next_u64() as usize % best_at.len();
        let (ci, serves) = best_at.swap_remove(pick);
        let order_index = chosen.len();
        chosen.push(ci);
        for j in serves {
            let d = demand.get_mut(&j).unwrap();
            if *d > 0 {
                *d -= 1;
                usage.entry(j).or_default().push(order_index);
            }
        }
    }

    let flats: Vec<Flat> = chosen.iter().map(|&ci| candidates[ci].0.clone()).collect();
    for used in usage.values_mut() {
        used.sort_unstable();
    }
    let fam = AdmissibleFamily {
        spec: spec.clone(),
        scope: Scope::Info(info_set.clone()),
        flats,
        usage,
    };
    fam.validate()?;
    Ok(Some(fam))
}

/// Shipped witness names.
pub const WITNESS_RM25_TYPE1_30: &str = "rm25-type1-30";
pub const WITNESS_RM24_7: &str = "rm24-7";
pub const WITNESS_RM24_6: &str = "rm24-6";

/// The 30-flat family for the first orbit representative of `RM(2, 5)`,
/// in position indices under the power ordering. Rows are grouped by
/// usage count: nine flats with all four positions active, then eighteen
/// with three, then three with two.
const RM25_WITNESS_QUADS: [[u16; 4]; 30] = [
    [0, 1, 8, 12],
    [0, 4, 5, 7],
    [1, 6, 7, 13],
    [1, 9, 11, 15],
    [2, 4, 9, 12],
    [2, 6, 10, 15],
    [2, 7, 8, 14],
    [3, 5, 10, 13],
    [4, 6, 11, 14],
    [0, 2, 13, 25],
    [0, 3, 9, 17],
    [0, 10, 11, 26],
    [0, 14, 15, 18],
    [1, 3, 14, 26],
    [1, 4, 10, 18],
    [2, 5, 11, 19],
    [3, 4, 8, 22],
    [3, 6, 12, 20],
    [3, 7, 11, 16],
    [4, 13, 15, 17],
    [5, 6, 9, 22],
    [5, 8, 15, 26],
    [5, 12, 14, 28],
    [7, 10, 12, 27],
    [8, 9, 10, 19],
    [9, 13, 14, 16],
    [11, 12, 13, 22],
    [1, 2, 17, 22],
    [6, 8, 24, 25],
    [7, 15, 25, 30],
];
const RM25_WITNESS_CHECKSUM: u64 = 0x32b6c043918d0b92;

/// The 7-flat family for `RM(2, 4)` under the lexicographic ordering, as
/// point values (equal to position indices). The information set is the
/// complement of the four unit vectors and the all-ones vector.
const RM24_WITNESS_QUADS: [[u16; 4]; 7] = [
    [0, 6, 11, 13],
    [0, 7, 9, 14],
    [1, 3, 5, 7],
    [2, 5, 11, 12],
    [2, 6, 10, 14],
    [8, 10, 13, 15],
    [3, 6, 9, 12],
];
const RM24_WITNESS_CHECKSUM: u64 = 0x19dded00247bf375;

/// The 6-flat family for `RM(2, 4)` over the canonical information set
/// (all positions of weight at least two), found by the exhaustive search
/// in the bounds module. Six meets the usage-profile program lower bound,
/// so this family is minimal; four flats lie fully inside the information
/// points and two pass through the zero point.
const RM24_SIX_QUADS: [[u16; 4]; 6] = [
    [0, 6, 9, 15],
    [0, 7, 10, 13],
    [3, 7, 11, 15],
    [3, 5, 10, 12],
    [5, 6, 13, 14],
    [9, 11, 12, 14],
];
const RM24_SIX_CHECKSUM: u64 = 0x8410e8c5f7058d1d;

fn fnv1a64(data: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn quads_checksum(quads: &[[u16; 4]]) -> u64 {
    let mut bytes = Vec::with_capacity(quads.len() * 8);
    for q in quads {
        for &v in q {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    fnv1a64(&bytes)
}

fn check_fixture(name: &'static str, quads: &[[u16; 4]], expected: u64) -> Result<()> {
    let found = quads_checksum(quads);
    if found != expected {
        return Err(Error::FixtureCorrupt {
            name,
            expected,
            found,
        });
    }
    Ok(())
}

/// Builds a family from shipped position quadruples. With `limit_usage`,
/// usage at each position is trimmed to the first fan-in many pairwise
/// compatible flats; otherwise every flat is used wherever it meets the
/// information set.
fn family_from_quads(
    spec: &CodeSpec,
    info_set: &InformationSet,
    quads: &[[u16; 4]],
    limit_usage: bool,
) -> Result<AdmissibleFamily> {
    let ordering = spec.ordering();
    let mut flats = Vec::with_capacity(quads.len());
    for q in quads {
        let points: Vec<Point> = q.iter().map(|&j| ordering.point(j as usize)).collect();
        flats.push(Flat::from_points(spec.m(), &points)?);
    }
    let scope = Scope::Info(info_set.clone());
    let (flats, mut usage) = usage_by_containment(spec, &scope, flats);
    if limit_usage {
        let masks: Vec<Word> = flats.iter().map(|f| f.incidence(ordering)).collect();
        let fan_in = spec.gate_fan_in();
        for used in usage.values_mut() {
            let mut picked: Vec<usize> = Vec::with_capacity(fan_in);
            for &cand in used.iter() {
                if picked.len() == fan_in {
                    break;
                }
                if picked
                    .iter()
                    .all(|&p| masks[p].and_weight(&masks[cand]) == 1)
                {
                    picked.push(cand);
                }
            }
            *used = picked;
        }
        // Trimming can orphan a flat in principle; none of the shipped
        // fixtures does, which validate() re-checks.
    }
    Ok(AdmissibleFamily {
        spec: spec.clone(),
        scope,
        flats,
        usage,
    })
}

/// Loads the shipped witness families, keyed by name. Fixture integrity
/// is checked before construction.
pub fn load_witnesses() -> Result<BTreeMap<&'static str, AdmissibleFamily>> {
    check_fixture(
        WITNESS_RM25_TYPE1_30,
        &RM25_WITNESS_QUADS,
        RM25_WITNESS_CHECKSUM,
    )?;
    check_fixture(WITNESS_RM24_7, &RM24_WITNESS_QUADS, RM24_WITNESS_CHECKSUM)?;
    check_fixture(WITNESS_RM24_6, &RM24_SIX_QUADS, RM24_SIX_CHECKSUM)?;
    let mut out = BTreeMap::new();

    let spec25 = CodeSpec::with_default_ordering(2, 5)?;
    let type1 = spec25.information_set(&crate::analysis::REPRESENTATIVE_INFO_SETS[0])?;
    out.insert(
        WITNESS_RM25_TYPE1_30,
        family_from_quads(&spec25, &type1, &RM25_WITNESS_QUADS, false)?,
    );

    let spec24 = CodeSpec::with_default_ordering(2, 4)?;
    let excluded: [u16; 5] = [0b0001, 0b0010, 0b0100, 0b1000, 0b1111];
    let info24: Vec<u16> = (0..16u16).filter(|p| !excluded.contains(p)).collect();
    let j24 = spec24.information_set(&info24)?;
    out.insert(
        WITNESS_RM24_7,
        family_from_quads(&spec24, &j24, &RM24_WITNESS_QUADS, true)?,
    );

    let basis4: Vec<Point> = (0..4).map(|b| 1 << b).collect();
    let canonical24 = spec24.canonical_information_set(&basis4)?;
    out.insert(
        WITNESS_RM24_6,
        family_from_quads(&spec24, &canonical24, &RM24_SIX_QUADS, true)?,
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rm25() -> CodeSpec {
        CodeSpec::with_default_ordering(2, 5).unwrap()
    }

    fn type1(spec: &CodeSpec) -> InformationSet {
        spec.information_set(&crate::analysis::REPRESENTATIVE_INFO_SETS[0])
            .unwrap()
    }

    #[test]
    fn witness_rm25_validates_with_expected_profile() {
        let witnesses = load_witnesses().unwrap();
        let fam = &witnesses[WITNESS_RM25_TYPE1_30];
        assert_eq!(fam.len(), 30);
        let profile = fam.validate().unwrap();
        assert_eq!(profile.quad(), (9, 18, 3, 0));
        // None of the flats touches the positions avoided for puncturing.
        for flat in fam.flats() {
            for p in flat.positions(fam.spec().ordering()) {
                assert!(![21, 23, 29, 31].contains(&p));
            }
        }
    }

    #[test]
    fn witness_rm24_validates() {
        let witnesses = load_witnesses().unwrap();
        let fam = &witnesses[WITNESS_RM24_7];
        assert_eq!(fam.len(), 7);
        fam.validate().unwrap();
    }

    #[test]
    fn witness_rm24_six_validates() {
        let witnesses = load_witnesses().unwrap();
        let fam = &witnesses[WITNESS_RM24_6];
        assert_eq!(fam.len(), 6);
        let profile = fam.validate().unwrap();
        assert_eq!(profile.quad(), (4, 2, 0, 0));
    }

    #[test]
    fn corrupted_fixture_is_rejected() {
        let mut quads = RM25_WITNESS_QUADS;
        quads[4][2] ^= 1;
        let err = check_fixture("tampered", &quads, RM25_WITNESS_CHECKSUM).unwrap_err();
        assert!(matches!(err, Error::FixtureCorrupt { .. }));
    }

    #[test]
    fn duplicated_usage_is_invalid() {
        let witnesses = load_witnesses().unwrap();
        let fam = &witnesses[WITNESS_RM24_7];
        let mut usage = fam.usage().clone();
        let (&j, _) = usage.iter().next().unwrap();
        let first = usage[&j][0];
        usage.insert(j, vec![first, first]);
        let broken = AdmissibleFamily::from_parts(
            fam.spec().clone(),
            fam.scope().clone(),
            fam.flats().to_vec(),
            usage,
        );
        let err = broken.validate().unwrap_err();
        assert!(matches!(
            err,
            Error::FamilyViolation {
                reason: "flat used twice at one position",
                ..
            }
        ));
    }

    #[test]
    fn full_cover_sizes() {
        for (r, m, want) in [(2, 5, 48), (2, 4, 8), (3, 6, 48)] {
            let spec = CodeSpec::with_default_ordering(r, m).unwrap();
            let fam = construct_full_cover(&spec).unwrap();
            assert_eq!(fam.len(), want, "r={r} m={m}");
            let profile = fam.validate().unwrap();
            assert_eq!(profile.family_size(), want as u64);
            // Every flat covers all of its positions.
            assert_eq!(profile.x(1 << r), want as u64);
        }
    }

    #[test]
    fn full_cover_pairwise_intersections_small() {
        for (r, m) in [(1, 4), (2, 4), (2, 5), (2, 6), (3, 6)] {
            let spec = CodeSpec::with_default_ordering(r, m).unwrap();
            let fam = construct_full_cover(&spec).unwrap();
            let masks: Vec<Word> = fam
                .flats()
                .iter()
                .map(|f| f.incidence(spec.ordering()))
                .collect();
            for (i, a) in masks.iter().enumerate() {
                for b in masks.iter().take(i) {
                    assert!(a.and_weight(b) <= 1);
                }
            }
        }
    }

    #[test]
    fn naive_sizes() {
        let spec = rm25();
        let fam = construct_naive(&spec, &type1(&spec)).unwrap();
        assert_eq!(fam.len(), 96);
        let profile = fam.validate().unwrap();
        assert_eq!(profile.x(1), 96);

        let spec14 = CodeSpec::with_default_ordering(1, 4).unwrap();
        let basis: Vec<Point> = (0..4).map(|b| 1 << b).collect();
        let j14 = spec14.canonical_information_set(&basis).unwrap();
        let fam14 = construct_naive(&spec14, &j14).unwrap();
        assert_eq!(fam14.len(), 30);
        fam14.validate().unwrap();

        let spec24 = CodeSpec::with_default_ordering(2, 4).unwrap();
        let j24 = spec24.canonical_information_set(&basis).unwrap();
        construct_naive(&spec24, &j24).unwrap().validate().unwrap();
    }

    #[test]
    fn upper_a_construction() {
        // First-order: the bound collapses to ceil((m+1)(2^m - 5)/2).
        let fam14 = construct_upper_a(&CodeSpec::with_default_ordering(1, 4).unwrap()).unwrap();
        assert!(fam14.len() as u64 <= 28);
        fam14.validate().unwrap();

        let fam25 = construct_upper_a(&rm25()).unwrap();
        fam25.validate().unwrap();
        assert!(fam25.len() as u64 <= upper_a_construction_bound(2, 5));

        let fam36 = construct_upper_a(&CodeSpec::with_default_ordering(3, 6).unwrap()).unwrap();
        fam36.validate().unwrap();
        assert!(fam36.len() as u64 <= upper_a_construction_bound(3, 6));
    }

    #[test]
    fn upper_a_bound_values() {
        assert_eq!(upper_a_construction_bound(1, 4), 28);
        assert_eq!(upper_a_construction_bound(1, 5), 81);
        // For r >= 2 the batched-cover term carries doubling factors; at
        // (2, 7) this lands two above the streamlined closed form.
        assert_eq!(upper_a_construction_bound(2, 7), 851);
    }

    #[test]
    fn upper_b_construction() {
        for (r, m, bound) in [(2u32, 5u32, 46u64), (2, 6, 209), (3, 7, 222)] {
            let spec = CodeSpec::with_default_ordering(r, m).unwrap();
            let fam = construct_upper_b(&spec).unwrap();
            assert!(
                fam.len() as u64 <= bound,
                "r={r} m={m}: {} > {bound}",
                fam.len()
            );
            fam.validate().unwrap();
        }
    }

    #[test]
    fn rm1_sizes_match_closed_form() {
        for m in 3..=8u32 {
            let fam = construct_rm1(m).unwrap();
            assert_eq!(fam.len() as u64, rm1_family_size(m), "m={m}");
            fam.validate().unwrap();
        }
        assert_eq!(rm1_family_size(4), 20);
        assert_eq!(rm1_family_size(5), 69);
    }

    #[test]
    fn search_respects_fallback_and_is_deterministic() {
        let spec24 = CodeSpec::with_default_ordering(2, 4).unwrap();
        let basis: Vec<Point> = (0..4).map(|b| 1 << b).collect();
        let j = spec24.canonical_information_set(&basis).unwrap();
        let out1 = search_family(&spec24, &j, 3000, 42).unwrap();
        let out2 = search_family(&spec24, &j, 3000, 42).unwrap();
        assert!(out1.family.len() <= 8);
        out1.family.validate().unwrap();
        assert_eq!(out1.family.flats(), out2.family.flats());
        assert_eq!(out1.found_by_search, out2.found_by_search);

        let out3 = search_family(&spec24, &j, 3000, 43).unwrap();
        out3.family.validate().unwrap();
    }

    #[test]
    fn search_on_rm25_type1_validates_and_beats_reduced_cover() {
        let spec = rm25();
        let j = type1(&spec);
        let out = search_family(&spec, &j, 2000, 7).unwrap();
        out.family.validate().unwrap();
        assert!(out.family.len() <= 46);
    }

    #[test]
    fn zero_budget_returns_fallback_flagged() {
        let spec24 = CodeSpec::with_default_ordering(2, 4).unwrap();
        let basis: Vec<Point> = (0..4).map(|b| 1 << b).collect();
        let j = spec24.canonical_information_set(&basis).unwrap();
        let out = search_family(&spec24, &j, 0, 1).unwrap();
        assert!(!out.found_by_search);
        out.family.validate().unwrap();
    }
}
