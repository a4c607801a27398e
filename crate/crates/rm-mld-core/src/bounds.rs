//! Lower and upper bounds on the minimal admissible-family size.
//!
//! Closed forms are exact formula evaluations; the integer program gives
//! the sharpest general lower bound; the two exclusion searches settle the
//! smallest open cases by exhausting all candidate 28-flat completions and
//! (budget permitting) all candidate 29-flat families of `RM(2, 5)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::{compatibility_graph, flat_table};
use crate::cliques::CliqueSearch;
use crate::code::{binomial, CodeSpec, InformationSet};
use crate::families::AdmissibleFamily;
use crate::{Error, Result};

fn check_params(r: u32, m: u32) -> Result<()> {
    if m < 3 || r < 1 || 2 * r > m {
        return Err(Error::ParameterOutOfRange(format!(
            "need m >= 3 and 1 <= r <= m/2, got r = {r}, m = {m}"
        )));
    }
    Ok(())
}

fn dimension_k(r: u32, m: u32) -> u64 {
    (0..=r).map(|i| binomial(m, i)).sum()
}

/// The closed-form bounds on the minimal family size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormBounds {
    pub r: u32,
    pub m: u32,
    /// `ceil(k (2^{m-r} - 2) / 2^r)`.
    pub lower_trivial: u64,
    /// Full-coverage family: `2^{m-r} (2^{m-r} - 2)`.
    pub upper_cover: u64,
    /// Independent per-position systems: `k (2^{m-r} - 2)`.
    pub upper_per_position: u64,
    /// Shared-anchor systems: `k (2^{m-r} - 3)` plus a streamlined size of
    /// the high-weight cover, `C(m-b, r-b) + ceil(sum_{s<b} C(m-1-s, r-s)
    /// / (r+1))` with `b = ceil(log2(r+1))`.
    pub upper_shared: u64,
    /// Full cover minus the low-weight cosets of the coordinate blocks:
    /// `2^{m-r}(2^{m-r}-2) - floor(m/r) sum_{s<=m-2r-1} C(m-r, s)`.
    pub upper_pruned: u64,
}

impl ClosedFormBounds {
    pub fn best_upper(&self) -> u64 {
        self.upper_cover
            .min(self.upper_per_position)
            .min(self.upper_shared)
            .min(self.upper_pruned)
    }
}

/// Evaluates every closed-form bound exactly.
pub fn bound_closed_forms(r: u32, m: u32) -> Result<ClosedFormBounds> {
    check_params(r, m)?;
    let k = dimension_k(r, m);
    let fan_in = (1u64 << (m - r)) - 2;
    let lower_trivial = (k * fan_in).div_ceil(1 << r);
    let upper_cover = (1u64 << (m - r)) * fan_in;
    let upper_per_position = k * fan_in;
    let b = (r + 1).next_power_of_two().trailing_zeros();
    let stragglers: u64 = (0..b).map(|s| binomial(m - 1 - s, r - s)).sum();
    let upper_shared =
        k * (fan_in - 1) + binomial(m - b, r - b) + stragglers.div_ceil(r as u64 + 1);
    let removable: u64 = if m >= 2 * r + 1 {
        (0..=(m - 2 * r - 1)).map(|s| binomial(m - r, s)).sum()
    } else {
        0
    };
    let upper_pruned = upper_cover - (m / r) as u64 * removable;
    Ok(ClosedFormBounds {
        r,
        m,
        lower_trivial,
        upper_cover,
        upper_per_position,
        upper_shared,
        upper_pruned,
    })
}

/// A feasible point of the usage-profile integer program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpSolution {
    /// `x[i-1]` flats are used at exactly `i` positions.
    pub x: Vec<u64>,
    pub objective: u64,
}

struct IlpInstance {
    levels: usize,    // 2^r
    coverage: u64,    // k (2^{m-r} - 2), to be reached by sum i x_i
    pair_budget: u64, // C(k, 2), bounding sum C(i,2) x_i
}

impl IlpInstance {
    fn new(r: u32, m: u32) -> Result<IlpInstance> {
        check_params(r, m)?;
        if 1u64 << r > 32 {
            return Err(Error::CostGuard(format!(
                "2^r = {} variables exceed the solver guard of 32",
                1u64 << r
            )));
        }
        let k = dimension_k(r, m);
        Ok(IlpInstance {
            levels: 1 << r,
            coverage: k * ((1u64 << (m - r)) - 2),
            pair_budget: binomial(k as u32, 2),
        })
    }

    /// Greatest coverage achievable with `f` flats under the pair budget:
    /// raise all flats level by level. The upgrade from level `l` costs
    /// `l` pairs, so cheapest-first is optimal by convexity.
    fn max_coverage(&self, f: u64) -> u64 {
        let mut coverage = f;
        let mut budget = self.pair_budget;
        for cost in 1..self.levels as u64 {
            let take = (budget / cost).min(f);
            coverage += take;
            budget -= take * cost;
            if take < f {
                break;
            }
        }
        coverage
    }

    /// The level distribution realising `max_coverage(f)`.
    fn greedy_levels(&self, f: u64) -> Vec<u64> {
        let mut x = vec![0u64; self.levels];
        let mut budget = self.pair_budget;
        let mut at_top = f;
        let mut top = 1usize;
        for cost in 1..self.levels as u64 {
            let take = (budget / cost).min(at_top);
            if take == 0 {
                break;
            }
            budget -= take * cost;
            if take < at_top {
                x[top - 1] = at_top - take;
            }
            at_top = take;
            top += 1;
            if take < f {
                break;
            }
        }
        x[top - 1] += at_top;
        x
    }
}

/// Solves the usage-profile program exactly: the smallest flat count `F`
/// admitting integer `x >= 0` with `sum x_i = F`,
/// `sum i x_i >= k (2^{m-r} - 2)` and `sum C(i,2) x_i <= C(k, 2)`.
/// Feasibility is monotone in `F` (extra flats at level 1 cost nothing)
/// and the greedy level assignment maximises coverage for fixed `F`, so a
/// binary search over `F` is exact. Optimality is cross-checked against
/// [`enumerate_ilp`] in the tests.
pub fn solve_ilp(r: u32, m: u32) -> Result<IlpSolution> {
    let inst = IlpInstance::new(r, m)?;
    let mut lo = inst.coverage.div_ceil(inst.levels as u64);
    let mut hi = inst.coverage; // all flats at level 1, zero pair spend
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if inst.max_coverage(mid) >= inst.coverage {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let x = inst.greedy_levels(lo);
    debug_assert_eq!(x.iter().sum::<u64>(), lo);
    Ok(IlpSolution { x, objective: lo })
}

/// Enumerates all solutions with `sum x_i = target` under the profile
/// constraints; with `equality`, coverage is pinned to `k (2^{m-r} - 2)`
/// exactly instead of at-least.
pub fn enumerate_ilp(r: u32, m: u32, target: u64, equality: bool) -> Result<Vec<IlpSolution>> {
    let inst = IlpInstance::new(r, m)?;
    if inst.levels > 8 || target > 200 {
        return Err(Error::CostGuard(format!(
            "enumeration over {} levels at target {target} is too large",
            inst.levels
        )));
    }
    fn rec(
        inst: &IlpInstance,
        level: usize,
        remaining: u64,
        coverage: u64,
        pairs: u64,
        equality: bool,
        x: &mut Vec<u64>,
        out: &mut Vec<IlpSolution>,
    ) {
        if coverage + remaining * (level as u64) < inst.coverage {
            return;
        }
        if level == 0 {
            if remaining == 0 && (!equality || coverage == inst.coverage) {
                out.push(IlpSolution {
                    x: x.clone(),
                    objective: x.iter().sum(),
                });
            }
            return;
        }
        for count in 0..=remaining {
            let new_cov = coverage + count * level as u64;
            let new_pairs = pairs + count * binomial(level as u32, 2);
            if new_pairs > inst.pair_budget {
                break;
            }
            if equality && new_cov > inst.coverage {
                break;
            }
            x[level - 1] = count;
            rec(
                inst,
                level - 1,
                remaining - count,
                new_cov,
                new_pairs,
                equality,
                x,
                out,
            );
            x[level - 1] = 0;
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0u64; inst.levels];
    rec(
        &inst,
        inst.levels,
        target,
        0,
        0,
        equality,
        &mut x,
        &mut out,
    );
    out.sort_by(|a, b| b.x.cmp(&a.x));
    Ok(out)
}

/// A usage profile refined by containment: `x(i, s)` flats contain exactly
/// `s` information points of which `i` are active, `1 <= i <= s <= 4`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RefinedProfile {
    x: [[u64; 4]; 4],
}

impl RefinedProfile {
    pub fn new() -> RefinedProfile {
        RefinedProfile::default()
    }

    pub fn get(&self, active: usize, contained: usize) -> u64 {
        assert!((1..=contained).contains(&active) && contained <= 4);
        self.x[active - 1][contained - 1]
    }

    pub fn set(&mut self, active: usize, contained: usize, v: u64) {
        assert!((1..=contained).contains(&active) && contained <= 4);
        self.x[active - 1][contained - 1] = v;
    }

    pub fn total(&self) -> u64 {
        self.x.iter().flatten().sum()
    }

    pub fn coverage(&self) -> u64 {
        (1..=4)
            .map(|i| i as u64 * self.marginal(i))
            .sum()
    }

    /// Marginal usage count `x_i = sum_s x(i, s)`.
    pub fn marginal(&self, active: usize) -> u64 {
        (active..=4).map(|s| self.get(active, s)).sum()
    }

    /// `sum i (s-1) x(i, s)`: for each flat, active positions times other
    /// contained information points; bounded by the ordered position pairs.
    pub fn junction_load(&self) -> u64 {
        let mut acc = 0;
        for s in 1..=4 {
            for i in 1..=s {
                acc += (i * (s - 1)) as u64 * self.get(i, s);
            }
        }
        acc
    }

    /// Strengthened pair spend `sum C(i,2) x(i,s) + 2 x(3,4)`.
    pub fn strengthened_pairs(&self) -> u64 {
        let mut acc = 2 * self.get(3, 4);
        for s in 2..=4 {
            for i in 2..=s {
                acc += binomial(i as u32, 2) * self.get(i, s);
            }
        }
        acc
    }
}

const REFINED_TOTAL: u64 = 29;
const REFINED_COVERAGE: u64 = 96; // 16 positions, 6 used flats each
const POSITION_PAIRS: u64 = 120; // C(16, 2)
const ORDERED_PAIRS: u64 = 240;

/// Filters refined profiles by the 29-flat `RM(2, 5)` conditions:
/// total 29, coverage equality at 96, the plain pair budget, the junction
/// bound, and the strengthened pair bound. Survivors provably satisfy
/// `x(3,4) <= 2` and `8 <= x(3,3) <= 20`, which callers assert.
pub fn refined_feasible(profiles: &[RefinedProfile]) -> Vec<RefinedProfile> {
    profiles
        .iter()
        .filter(|p| p.total() == REFINED_TOTAL)
        .filter(|p| p.coverage() == REFINED_COVERAGE)
        .filter(|p| {
            (2..=4)
                .map(|i| binomial(i as u32, 2) * p.marginal(i))
                .sum::<u64>()
                <= POSITION_PAIRS
        })
        .filter(|p| p.junction_load() <= ORDERED_PAIRS)
        .filter(|p| {
            let cap = if p.get(3, 4) == 0 {
                POSITION_PAIRS
            } else {
                POSITION_PAIRS - 1
            };
            p.strengthened_pairs() <= cap
        })
        .cloned()
        .collect()
}

/// Enumerates every refined profile surviving [`refined_feasible`].
pub fn enumerate_refined_profiles() -> Vec<RefinedProfile> {
    // Cells in non-increasing activity order, so the coverage prune below
    // is valid.
    const CELLS: [(usize, usize); 10] = [
        (4, 4),
        (3, 4),
        (3, 3),
        (2, 4),
        (2, 3),
        (2, 2),
        (1, 4),
        (1, 3),
        (1, 2),
        (1, 1),
    ];
    fn rec(
        cell: usize,
        remaining: u64,
        coverage_left: u64,
        profile: &mut RefinedProfile,
        out: &mut Vec<RefinedProfile>,
    ) {
        if cell == CELLS.len() {
            if remaining == 0 && coverage_left == 0 {
                out.extend(refined_feasible(&[profile.clone()]));
            }
            return;
        }
        let (i, s) = CELLS[cell];
        if remaining * (i as u64) < coverage_left {
            return; // even maximal activity cannot cover what is left
        }
        for count in 0..=remaining {
            let cov = count * i as u64;
            if cov > coverage_left {
                break;
            }
            profile.set(i, s, count);
            rec(
                cell + 1,
                remaining - count,
                coverage_left - cov,
                profile,
                out,
            );
            profile.set(i, s, 0);
        }
    }
    let mut out = Vec::new();
    let mut profile = RefinedProfile::new();
    rec(0, REFINED_TOTAL, REFINED_COVERAGE, &mut profile, &mut out);
    out.sort_by(|a, b| b.x.cmp(&a.x));
    out
}

/// Report of the 28-flat completion search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exclude28Report {
    /// True when no candidate completes: no admissible 28-flat family
    /// exists for this information set.
    pub excluded: bool,
    pub cliques_checked: u64,
    /// Completions found (0 when the case is excluded).
    pub completions_found: u64,
}

/// Rules out 28-flat families for one information set of `RM(2, 5)`.
///
/// The unique optimal profile at 28 flats forces 12 flats used at four
/// positions and 16 used at three, all pairwise sharing at most one point;
/// the flats with four information points then form a compatible clique of
/// size 12..=15 and the rest carry exactly three information points. Every
/// clique of those sizes is tested for completion to 28 pairwise
/// compatible flats by three-point flats.
pub fn exclude_28(spec: &CodeSpec, info_set: &InformationSet) -> Result<Exclude28Report> {
    let table = flat_table(spec, info_set.positions())?;
    let inside_graph = compatibility_graph(&table.masks, &table.inside);
    let three_graph = compatibility_graph(&table.masks, &table.three);
    // Cross-compatibility: per inside flat, the three-point flats it can
    // coexist with.
    let words3 = three_graph.words();
    let mut cross: Vec<Vec<u64>> = Vec::with_capacity(table.inside.len());
    for &fi in &table.inside {
        let mut mask = vec![0u64; words3];
        for (tj, &ft) in table.three.iter().enumerate() {
            if (table.masks[fi] & table.masks[ft]).count_ones() <= 1 {
                mask[tj >> 6] |= 1 << (tj & 63);
            }
        }
        cross.push(mask);
    }

    let mut cliques_checked = 0u64;
    let mut completions_found = 0u64;
    let mut inside_search = CliqueSearch::new(&inside_graph);
    let mut completion = CliqueSearch::new(&three_graph);
    let full3 = three_graph.full_mask();
    inside_search.visit_cliques(12, |clique| {
        if clique.len() > 15 {
            return;
        }
        cliques_checked += 1;
        let mut cands = full3.clone();
        for &v in clique {
            for (w, c) in cands.iter_mut().zip(&cross[v]) {
                *w &= c;
            }
        }
        if completion.has_clique(&cands, 28 - clique.len()) {
            completions_found += 1;
        }
    });
    Ok(Exclude28Report {
        excluded: completions_found == 0,
        cliques_checked,
        completions_found,
    })
}

/// Outcome of the exhaustive six-flat search for `RM(2, 4)`.
#[derive(Clone, Debug)]
pub struct SixFlatSearch {
    /// The first admissible six-flat family in canonical enumeration
    /// order, or `None` when the space is exhausted without a find.
    pub family: Option<AdmissibleFamily>,
    pub nodes: u64,
}

/// Exhaustive search for an admissible six-flat family of `RM(2, 4)` over
/// one information set.
///
/// Any admissible family needs every information point inside at least two
/// of its flats, so six flats must carry at least 22 information-point
/// incidences; flats with fewer than two information points can never
/// participate. The search runs over ascending candidate indices with an
/// incidence-deficit prune and tests full admissibility - some pair of
/// flats through every point meeting exactly in it - at the leaves.
///
/// For the canonical information set this search *finds* such a family
/// (shipped as the `rm24-6` witness), which together with the program
/// lower bound of 6 settles the minimal first-step gate count of
/// `RM(2, 4)` at 6.
pub fn search_rm24_six(spec: &CodeSpec, info_set: &InformationSet) -> Result<SixFlatSearch> {
    if spec.r() != 2 || spec.m() != 4 {
        return Err(Error::ParameterOutOfRange(format!(
            "the six-flat search is specific to r = 2, m = 4; got r = {}, m = {}",
            spec.r(),
            spec.m()
        )));
    }
    let flats = crate::geometry::enumerate_flats(4, 2)?;
    let pairs: Vec<(crate::geometry::Flat, u32)> = flats
        .into_iter()
        .map(|f| {
            let mask = f
                .positions(spec.ordering())
                .iter()
                .fold(0u32, |acc, &p| acc | 1 << p);
            (f, mask)
        })
        .collect();
    let set_mask = info_set
        .positions()
        .iter()
        .fold(0u32, |acc, &p| acc | 1 << p);
    let candidates: Vec<&(crate::geometry::Flat, u32)> = pairs
        .iter()
        .filter(|(_, mask)| (mask & set_mask).count_ones() >= 2)
        .collect();
    let points: Vec<u32> = (0..16).filter(|&p| set_mask >> p & 1 == 1).collect();

    struct Dfs<'a> {
        candidates: &'a [&'a (crate::geometry::Flat, u32)],
        points: &'a [u32],
        chosen: Vec<usize>,
        nodes: u64,
        found: Option<Vec<usize>>,
    }
    impl Dfs<'_> {
        fn deficit(&self) -> u64 {
            self.points
                .iter()
                .map(|&p| {
                    let cnt = self
                        .chosen
                        .iter()
                        .filter(|&&i| self.candidates[i].1 >> p & 1 == 1)
                        .count();
                    2u64.saturating_sub(cnt as u64)
                })
                .sum()
        }

        /// Every point must be the exact single intersection of some pair.
        fn admissible(&self) -> bool {
            self.points.iter().all(|&p| {
                let through: Vec<u32> = self
                    .chosen
                    .iter()
                    .map(|&i| self.candidates[i].1)
                    .filter(|&mask| mask >> p & 1 == 1)
                    .collect();
                through
                    .iter()
                    .enumerate()
                    .any(|(i, &a)| through[..i].iter().any(|&b| (a & b).count_ones() == 1))
            })
        }

        fn run(&mut self, start: usize) {
            if self.found.is_some() {
                return;
            }
            self.nodes += 1;
            if self.chosen.len() == 6 {
                if self.admissible() {
                    self.found = Some(self.chosen.clone());
                }
                return;
            }
            let remaining = 6 - self.chosen.len() as u64;
            if self.deficit() > 4 * remaining {
                return;
            }
            for i in start..self.candidates.len() {
                self.chosen.push(i);
                self.run(i + 1);
                self.chosen.pop();
                if self.found.is_some() {
                    return;
                }
            }
        }
    }

    let mut dfs = Dfs {
        candidates: &candidates,
        points: &points,
        chosen: Vec::new(),
        nodes: 0,
        found: None,
    };
    dfs.run(0);
    let family = match dfs.found {
        None => None,
        Some(sel) => {
            // Usage: for each point, the first pair meeting exactly in it.
            let flats: Vec<crate::geometry::Flat> =
                sel.iter().map(|&i| candidates[i].0.clone()).collect();
            let masks: Vec<u32> = sel.iter().map(|&i| candidates[i].1).collect();
            let mut usage: alloc::collections::BTreeMap<u16, Vec<usize>> =
                alloc::collections::BTreeMap::new();
            for &p in &points {
                let pair = (0..6)
                    .flat_map(|a| (0..a).map(move |b| (b, a)))
                    .find(|&(b, a)| {
                        masks[a] >> p & 1 == 1
                            && masks[b] >> p & 1 == 1
                            && (masks[a] & masks[b]).count_ones() == 1
                    })
                    .expect("admissible leaf");
                usage.insert(p as u16, vec![pair.0, pair.1]);
            }
            Some(AdmissibleFamily::from_parts(
                spec.clone(),
                crate::families::Scope::Info(info_set.clone()),
                flats,
                usage,
            ))
        }
    };
    Ok(SixFlatSearch {
        family,
        nodes: dfs.nodes,
    })
}

/// Verdict of the 29-flat exclusion search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict29 {
    /// The search space was exhausted: no 29-flat family exists for this
    /// information set.
    Excluded,
    /// The node budget ran out first; nothing is claimed.
    Inconclusive,
    /// A valid family of at most 29 flats was found (would disprove the
    /// established minimum; never expected).
    FamilyFound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exclude29Report {
    pub verdict: Verdict29,
    pub nodes: u64,
}

/// Backtracking search for a 29-flat admissible family over `info_set`,
/// run in the exclusion direction: exhausting the space without a find
/// rules 29 out. All prunes are conservative (claimed position pairs, the
/// junction bound, coverage feasibility), so `Excluded` is never returned
/// while a valid family exists; budget exhaustion reports `Inconclusive`.
pub fn exclude_29(
    spec: &CodeSpec,
    info_set: &InformationSet,
    node_budget: u64,
) -> Result<Exclude29Report> {
    let mut engine = Engine29::new(spec, info_set, 29)?;
    let verdict = engine.run(node_budget);
    Ok(Exclude29Report {
        verdict,
        nodes: engine.nodes,
    })
}

/// Replays a known family through the exclusion engine's constraints at
/// the family's own size: true when every single usage assignment passes.
/// This is the soundness inversion - the engine's prunes must accept
/// genuinely valid families, otherwise an `Excluded` verdict would be
/// worthless.
pub fn replay_family_through_engine(fam: &AdmissibleFamily) -> Result<bool> {
    let info_set = match fam.scope().info_set() {
        Some(j) => j.clone(),
        None => {
            return Err(Error::ParameterOutOfRange(
                "engine replay needs an information-position family".into(),
            ))
        }
    };
    let mut engine = Engine29::new(fam.spec(), &info_set, fam.len() as u64)?;
    engine.replay(fam)
}

/// Search state for the fixed-size family search over `RM(2, 5)`.
struct Engine29 {
    flat_masks: Vec<u32>,          // candidate flats as position masks
    flat_info: Vec<u32>,           // information points per flat
    per_position: Vec<Vec<usize>>, // position index -> candidate ids
    positions: Vec<u16>,
    target: u64,
    nodes: u64,
    demand: Vec<usize>,
    used: Vec<Vec<usize>>, // per position index, chosen candidate ids
    usage_count: Vec<u32>,
    usage_sets: Vec<u32>, // per candidate, bitmask over position indices
    placed: Vec<usize>,
    claimed_pairs: Vec<bool>, // triangular, indexed lo * 16 + hi
    junction_load: u64,
}

enum SearchStep {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Engine29 {
    fn new(spec: &CodeSpec, info_set: &InformationSet, target: u64) -> Result<Engine29> {
        let table = flat_table(spec, info_set.positions())?;
        let set_mask = table.set_mask;
        let positions: Vec<u16> = info_set.positions().to_vec();
        let pos_index: alloc::collections::BTreeMap<u16, usize> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        let mut flat_masks = Vec::new();
        let mut flat_info = Vec::new();
        let mut per_position = vec![Vec::new(); positions.len()];
        for mask in table.masks.iter().copied() {
            let info = mask & set_mask;
            if info == 0 {
                continue;
            }
            let id = flat_masks.len();
            flat_masks.push(mask);
            flat_info.push(info.count_ones());
            for p in 0..32u16 {
                if info >> p & 1 == 1 {
                    per_position[pos_index[&p]].push(id);
                }
            }
        }
        let n = flat_masks.len();
        Ok(Engine29 {
            flat_masks,
            flat_info,
            per_position,
            demand: vec![6; positions.len()],
            positions,
            target,
            nodes: 0,
            used: vec![Vec::new(); 16],
            usage_count: vec![0; n],
            usage_sets: vec![0; n],
            placed: Vec::new(),
            claimed_pairs: vec![false; 256],
            junction_load: 0,
        })
    }

    fn run(&mut self, budget: u64) -> Verdict29 {
        match self.search(budget) {
            SearchStep::Found => Verdict29::FamilyFound,
            SearchStep::Exhausted => Verdict29::Excluded,
            SearchStep::OutOfBudget => Verdict29::Inconclusive,
        }
    }

    /// Can `cand` take one more usage at position index `pi`?
    fn admissible(&self, cand: usize, pi: usize) -> bool {
        let mask = self.flat_masks[cand];
        for &other in &self.used[pi] {
            if other == cand || (mask & self.flat_masks[other]).count_ones() > 1 {
                return false;
            }
        }
        if self.usage_count[cand] == 0 && self.placed.len() as u64 >= self.target {
            return false;
        }
        // Two flats sharing two used positions would intersect in two
        // points; every used pair of positions belongs to one flat only.
        let set = self.usage_sets[cand];
        for q in 0..16 {
            if set >> q & 1 == 1 {
                let (lo, hi) = (q.min(pi), q.max(pi));
                if self.claimed_pairs[lo * 16 + hi] {
                    return false;
                }
            }
        }
        // Junction bound; the final load only grows from here.
        let extra = (self.flat_info[cand] - 1) as u64;
        self.junction_load + extra <= ORDERED_PAIRS
    }

    fn apply(&mut self, cand: usize, pi: usize) {
        let set = self.usage_sets[cand];
        for q in 0..16 {
            if set >> q & 1 == 1 {
                let (lo, hi) = (q.min(pi), q.max(pi));
                self.claimed_pairs[lo * 16 + hi] = true;
            }
        }
        if self.usage_count[cand] == 0 {
            self.placed.push(cand);
        }
        self.usage_count[cand] += 1;
        self.usage_sets[cand] |= 1 << pi;
        self.used[pi].push(cand);
        self.demand[pi] -= 1;
        self.junction_load += (self.flat_info[cand] - 1) as u64;
    }

    fn undo(&mut self, cand: usize, pi: usize) {
        self.junction_load -= (self.flat_info[cand] - 1) as u64;
        self.demand[pi] += 1;
        self.used[pi].pop();
        self.usage_sets[cand] &= !(1 << pi);
        self.usage_count[cand] -= 1;
        if self.usage_count[cand] == 0 {
            self.placed.pop();
        }
        let set = self.usage_sets[cand];
        for q in 0..16 {
            if set >> q & 1 == 1 {
                let (lo, hi) = (q.min(pi), q.max(pi));
                self.claimed_pairs[lo * 16 + hi] = false;
            }
        }
    }

    fn search(&mut self, budget: u64) -> SearchStep {
        self.nodes += 1;
        if self.nodes > budget {
            return SearchStep::OutOfBudget;
        }
        let remaining: usize = self.demand.iter().sum();
        if remaining == 0 {
            return SearchStep::Found;
        }
        // Coverage feasibility: what the placed flats can still absorb
        // plus fresh flats at maximal activity.
        let mut absorbable: u64 = self
            .placed
            .iter()
            .map(|&c| (self.flat_info[c] - self.usage_count[c]) as u64)
            .sum();
        absorbable += (self.target - self.placed.len() as u64) * 4;
        if remaining as u64 > absorbable {
            return SearchStep::Exhausted;
        }
        // Most constrained position first; candidates above the last one
        // used there, so each position's used set is built ascending.
        let mut best_pi = usize::MAX;
        let mut best_cands: Vec<usize> = Vec::new();
        for pi in 0..self.positions.len() {
            if self.demand[pi] == 0 {
                continue;
            }
            let last = self.used[pi].last().copied();
            let cands: Vec<usize> = self.per_position[pi]
                .iter()
                .copied()
                .filter(|&c| last.is_none_or(|l| c > l))
                .filter(|&c| self.admissible(c, pi))
                .collect();
            if cands.len() < self.demand[pi] {
                return SearchStep::Exhausted;
            }
            if best_pi == usize::MAX || cands.len() < best_cands.len() {
                best_pi = pi;
                best_cands = cands;
            }
        }
        for cand in best_cands {
            self.apply(cand, best_pi);
            match self.search(budget) {
                SearchStep::Found => {
                    self.undo(cand, best_pi);
                    return SearchStep::Found;
                }
                SearchStep::OutOfBudget => {
                    self.undo(cand, best_pi);
                    return SearchStep::OutOfBudget;
                }
                SearchStep::Exhausted => self.undo(cand, best_pi),
            }
        }
        SearchStep::Exhausted
    }

    /// Replays a complete family through `admissible`/`apply`.
    fn replay(&mut self, fam: &AdmissibleFamily) -> Result<bool> {
        let ordering = fam.spec().ordering();
        let mut ids = Vec::with_capacity(fam.len());
        for flat in fam.flats() {
            let mask = flat
                .positions(ordering)
                .iter()
                .fold(0u32, |acc, &p| acc | 1 << p);
            let id = self
                .flat_masks
                .iter()
                .position(|&m| m == mask)
                .ok_or_else(|| {
                    Error::ParameterOutOfRange("family flat not among engine candidates".into())
                })?;
            ids.push(id);
        }
        let pos_index: alloc::collections::BTreeMap<u16, usize> = self
            .positions
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        for (&j, used) in fam.usage() {
            let pi = *pos_index
                .get(&j)
                .ok_or_else(|| Error::ParameterOutOfRange("position outside scope".into()))?;
            for &f in used {
                let cand = ids[f];
                if !self.admissible(cand, pi) {
                    return Ok(false);
                }
                self.apply(cand, pi);
            }
        }
        Ok(self.demand.iter().all(|&d| d == 0))
    }
}
