//! Affine flats of `Z_2^m` in canonical form.
//!
//! A `d`-flat is a coset of a `d`-dimensional linear subspace. The canonical
//! form stores the minimum point of the flat (under the integer order on
//! packed points) together with a reduced-echelon basis of the direction
//! space, so flats can be compared, hashed and used as map keys directly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::gf2::{check_m, Ordering, Point, PointBasis, Word};
use crate::{Error, Result};

/// An affine `d`-flat of `Z_2^m` in canonical form.
///
/// Invariants: `basis` is in reduced row-echelon form (distinct leading
/// bits, each leading bit absent from all other rows and from `base`),
/// sorted by leading bit descending. `base` is then the minimum point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Flat {
    m: u32,
    base: Point,
    basis: Vec<Point>,
}

impl Flat {
    /// Canonicalises the flat through `base` with direction space spanned
    /// by `gens` (which may be dependent or unreduced).
    pub fn new(m: u32, base: Point, gens: &[Point]) -> Flat {
        debug_assert!(m <= 16);
        let pb = PointBasis::from_points(gens);
        let base = pb.reduce(base);
        Flat {
            m,
            base,
            basis: pb.rows().to_vec(),
        }
    }

    /// The single point `p` as a 0-flat.
    pub fn point(m: u32, p: Point) -> Flat {
        Flat {
            m,
            base: p,
            basis: Vec::new(),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of points, `2^d`.
    pub fn len(&self) -> usize {
        1 << self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    fn reduce(&self, mut v: Point) -> Point {
        for &row in &self.basis {
            let lead = 15 - row.leading_zeros() as usize;
            if v >> lead & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    pub fn contains(&self, p: Point) -> bool {
        self.reduce(p ^ self.base) == 0
    }

    /// All `2^d` points, ascending.
    pub fn points(&self) -> Vec<Point> {
        let d = self.basis.len();
        let mut pts = Vec::with_capacity(1 << d);
        for mask in 0..1u32 << d {
            let mut p = self.base;
            for (i, &b) in self.basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p ^= b;
                }
            }
            pts.push(p);
        }
        pts.sort_unstable();
        pts
    }

    /// The translate of this flat by `v`.
    pub fn translate(&self, v: Point) -> Flat {
        Flat::new(self.m, self.base ^ v, &self.basis)
    }

    /// The characteristic word of this flat under `ordering`: bit `j` is 1
    /// exactly when the point at position `j` lies in the flat.
    pub fn incidence(&self, ordering: &Ordering) -> Word {
        let mut w = Word::zero(ordering.len());
        for p in self.points() {
            w.set(ordering.position(p), true);
        }
        w
    }

    /// The set of positions occupied by the flat under `ordering`,
    /// ascending.
    pub fn positions(&self, ordering: &Ordering) -> Vec<u16> {
        let mut ps: Vec<u16> = self
            .points()
            .iter()
            .map(|&p| ordering.position(p) as u16)
            .collect();
        ps.sort_unstable();
        ps
    }

    /// Rebuilds a flat from an explicit point set. Errors unless the set is
    /// exactly an affine subspace.
    pub fn from_points(m: u32, pts: &[Point]) -> Result<Flat> {
        if pts.is_empty() || !pts.len().is_power_of_two() {
            return Err(Error::ParameterOutOfRange(format!(
                "a flat has a power-of-two point count, got {}",
                pts.len()
            )));
        }
        let base = *pts.iter().min().unwrap();
        let gens: Vec<Point> = pts.iter().map(|&p| p ^ base).collect();
        let flat = Flat::new(m, base, &gens);
        if flat.len() == pts.len() && pts.iter().all(|&p| flat.contains(p)) {
            Ok(flat)
        } else {
            Err(Error::ParameterOutOfRange(format!(
                "{} points do not form an affine flat",
                pts.len()
            )))
        }
    }

    /// All `(d+1)`-flats of `Z_2^m` containing this `d`-flat; there are
    /// exactly `2^{m-d} - 1` of them.
    pub fn superflats(&self) -> Vec<Flat> {
        let mut out = Vec::new();
        for w in 1..(1u32 << self.m) as Point {
            // One representative direction per superflat: the reduced
            // vectors w.r.t. the current basis.
            if self.reduce(w) != w {
                continue;
            }
            let mut gens = self.basis.clone();
            gens.push(w);
            out.push(Flat::new(self.m, self.base, &gens));
        }
        out.sort_unstable();
        out
    }

    /// The intersection with `other` as a flat, or `None` if disjoint.
    /// Both flats must share the same ambient space.
    pub fn intersect(&self, other: &Flat) -> Option<Flat> {
        assert_eq!(self.m, other.m, "flats from different ambient spaces");
        let mut sys = AffineSystem::new();
        for (h, rhs) in self.dual_checks() {
            sys.add(h, rhs);
        }
        for (h, rhs) in other.dual_checks() {
            sys.add(h, rhs);
        }
        let (x0, dirs) = sys.solve(self.m)?;
        Some(Flat::new(self.m, x0, &dirs))
    }

    /// Parity checks cutting out this flat: pairs `(h, h . base)` where `h`
    /// ranges over a basis of the dual of the direction space.
    fn dual_checks(&self) -> Vec<(Point, bool)> {
        let pivots: Vec<usize> = self
            .basis
            .iter()
            .map(|&r| 15 - r.leading_zeros() as usize)
            .collect();
        let mut checks = Vec::with_capacity(self.m as usize - self.basis.len());
        for f in 0..self.m as usize {
            if pivots.contains(&f) {
                continue;
            }
            // h has bit f, plus bit p_i for every basis row with bit f set.
            let mut h: Point = 1 << f;
            for (row, &p) in self.basis.iter().zip(&pivots) {
                if row >> f & 1 == 1 {
                    h |= 1 << p;
                }
            }
            let rhs = (h & self.base).count_ones() & 1 == 1;
            checks.push((h, rhs));
        }
        checks
    }
}

/// A linear system `h . x = rhs` over GF(2), kept in reduced echelon form.
struct AffineSystem {
    rows: Vec<(Point, bool)>, // (mask with unique leading bit, rhs)
    inconsistent: bool,
}

impl AffineSystem {
    fn new() -> Self {
        AffineSystem {
            rows: Vec::new(),
            inconsistent: false,
        }
    }

    fn add(&mut self, mut h: Point, mut rhs: bool) {
        if self.inconsistent {
            return;
        }
        for &(row, r) in &self.rows {
            let lead = 15 - row.leading_zeros() as usize;
            if h >> lead & 1 == 1 {
                h ^= row;
                rhs ^= r;
            }
        }
        if h == 0 {
            if rhs {
                self.inconsistent = true;
            }
            return;
        }
        let lead = 15 - h.leading_zeros() as usize;
        for (row, r) in self.rows.iter_mut() {
            if *row >> lead & 1 == 1 {
                *row ^= h;
                *r ^= rhs;
            }
        }
        let at = self
            .rows
            .partition_point(|&(row, _)| (15 - row.leading_zeros() as usize) > lead);
        self.rows.insert(at, (h, rhs));
    }

    /// A particular solution plus a basis of the homogeneous solutions.
    fn solve(&self, m: u32) -> Option<(Point, Vec<Point>)> {
        if self.inconsistent {
            return None;
        }
        let pivots: Vec<usize> = self
            .rows
            .iter()
            .map(|&(row, _)| 15 - row.leading_zeros() as usize)
            .collect();
        let mut x0: Point = 0;
        for (&(_, rhs), &p) in self.rows.iter().zip(&pivots) {
            if rhs {
                x0 |= 1 << p;
            }
        }
        let mut dirs = Vec::new();
        for f in 0..m as usize {
            if pivots.contains(&f) {
                continue;
            }
            let mut v: Point = 1 << f;
            for (&(row, _), &p) in self.rows.iter().zip(&pivots) {
                if row >> f & 1 == 1 {
                    v |= 1 << p;
                }
            }
            dirs.push(v);
        }
        Some((x0, dirs))
    }
}

/// Gaussian binomial `[m choose d]_2`: the number of `d`-dimensional
/// subspaces of `Z_2^m`.
pub fn gaussian_binomial(m: u32, d: u32) -> u128 {
    if d > m {
        return 0;
    }
    // [m d] = [m-1 d-1] + 2^d [m-1 d]
    let mut table = vec![vec![0u128; (d + 1) as usize]; (m + 1) as usize];
    for i in 0..=m as usize {
        table[i][0] = 1;
        for j in 1..=d.min(i as u32) as usize {
            table[i][j] = table[i - 1][j - 1] + (table[i - 1][j] << j);
        }
    }
    table[m as usize][d as usize]
}

/// Number of `d`-flats of `Z_2^m`: `2^{m-d} [m choose d]_2`.
pub fn flat_count(m: u32, d: u32) -> u128 {
    gaussian_binomial(m, d) << (m - d)
}

const ENUMERATION_CAP: u128 = 100_000_000;

/// All `d`-flats of `Z_2^m`, canonical and sorted, without duplicates.
pub fn enumerate_flats(m: u32, d: u32) -> Result<Vec<Flat>> {
    check_m(m)?;
    if m > 10 {
        return Err(Error::ParameterOutOfRange(format!(
            "full flat enumeration supported for m <= 10, got m = {m}"
        )));
    }
    if d > m {
        return Err(Error::ParameterOutOfRange(format!("d = {d} > m = {m}")));
    }
    let total = flat_count(m, d);
    if total > ENUMERATION_CAP {
        return Err(Error::CostGuard(format!(
            "{total} {d}-flats of Z_2^{m} exceed the enumeration cap; restrict the dimension"
        )));
    }
    let mut out = Vec::with_capacity(total as usize);
    let positions: Vec<usize> = (0..m as usize).collect();
    // Enumerate subspaces by their reduced-echelon basis: a descending
    // pivot set, then free entries below each pivot at non-pivot columns.
    for pivot_mask in 0..1u32 << m {
        if pivot_mask.count_ones() != d {
            continue;
        }
        let pivots: Vec<usize> = positions
            .iter()
            .copied()
            .filter(|&i| pivot_mask >> i & 1 == 1)
            .rev()
            .collect();
        // Free slots: (row, column) pairs with column below the row pivot
        // and not itself a pivot.
        let mut slots: Vec<(usize, usize)> = Vec::new();
        for (row, &p) in pivots.iter().enumerate() {
            for col in 0..p {
                if pivot_mask >> col & 1 == 0 {
                    slots.push((row, col));
                }
            }
        }
        let coset_bits: Vec<usize> = positions
            .iter()
            .copied()
            .filter(|&i| pivot_mask >> i & 1 == 0)
            .collect();
        for fill in 0..1u64 << slots.len() {
            let mut basis: Vec<Point> = pivots.iter().map(|&p| 1 << p).collect();
            for (bit, &(row, col)) in slots.iter().enumerate() {
                if fill >> bit & 1 == 1 {
                    basis[row] |= 1 << col;
                }
            }
            for rep in 0..1u32 << coset_bits.len() {
                let mut base: Point = 0;
                for (bit, &col) in coset_bits.iter().enumerate() {
                    if rep >> bit & 1 == 1 {
                        base |= 1 << col;
                    }
                }
                out.push(Flat {
                    m,
                    base,
                    basis: basis.clone(),
                });
            }
        }
    }
    debug_assert_eq!(out.len() as u128, total);
    out.sort_unstable();
    Ok(out)
}

fn check_spread_params(m: u32, r: u32) -> Result<()> {
    check_m(m)?;
    if r < 1 || 2 * r > m {
        return Err(Error::ParameterOutOfRange(format!(
            "need 1 <= r <= m/2, got r = {r}, m = {m}"
        )));
    }
    Ok(())
}

/// Carry-less multiplication modulo the default primitive polynomial of
/// degree `deg`.
fn gf_mul(mut a: u32, mut b: u32, deg: u32) -> u32 {
    let modulus = crate::gf2::DEFAULT_PRIMITIVE[(deg - 1) as usize];
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> deg & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}

/// A partial spread: `2^{m-r}` linear `r`-subspaces of `Z_2^m` that
/// pairwise intersect exactly in `{0}`.
///
/// Construction: split `Z_2^m = K + F` with `F` the low `r` coordinates and
/// `K` the high `m - r` ones, identify `K` with `GF(2^{m-r})`, embed `F`
/// into `K` by zero-extension, and take `U_a = {(a * y, y) : y in F}` for
/// every field element `a`. Distinct `a` share no nonzero point because
/// `(a + a') y = 0` forces `y = 0`.
pub fn partial_spread(m: u32, r: u32) -> Result<Vec<Flat>> {
    check_spread_params(m, r)?;
    let deg = m - r;
    let mut out = Vec::with_capacity(1 << deg);
    for a in 0..1u32 << deg {
        let basis: Vec<Point> = (0..r)
            .map(|i| ((gf_mul(a, 1 << i, deg) << r) | (1 << i)) as Point)
            .collect();
        out.push(Flat::new(m, 0, &basis));
    }
    Ok(out)
}

/// `2^{m-r} - 2` `r`-flats containing `v` whose pairwise intersections are
/// exactly `{v}`: the first spread members, translated by `v`.
pub fn flats_through_point(m: u32, r: u32, v: Point) -> Result<Vec<Flat>> {
    let spread = partial_spread(m, r)?;
    let want = (1usize << (m - r)) - 2;
    Ok(spread[..want].iter().map(|s| s.translate(v)).collect())
}

/// The spread used by the reduced cover construction: the `l = floor(m/r)`
/// coordinate-block subspaces first, completed to `count` members by
/// spread subspaces that meet every block trivially.
pub(crate) fn block_aligned_spread(m: u32, r: u32, count: usize) -> Result<Vec<Flat>> {
    check_spread_params(m, r)?;
    let blocks = ((m / r) as usize).min(count);
    let mut out: Vec<Flat> = (0..blocks)
        .map(|p| {
            let basis: Vec<Point> = (0..r).map(|i| 1 << (p as u32 * r + i)).collect();
            Flat::new(m, 0, &basis)
        })
        .collect();
    // The first block is the F-part of the field spread (a = 0); the other
    // blocks live inside K, which every U_a with a != 0 meets trivially.
    for s in partial_spread(m, r)? {
        if out.len() == count {
            break;
        }
        if s.basis().iter().all(|&b| (b as u32) >> r == 0) {
            continue; // the a = 0 member, already present as block 0
        }
        out.push(s);
    }
    if out.len() < count {
        return Err(Error::ParameterOutOfRange(format!(
            "cannot assemble {count} pairwise-trivial subspaces for m = {m}, r = {r}"
        )));
    }
    Ok(out)
}

/// Checks that all points are distinct and exhaust the flat structure of a
/// spread: every pair of subspaces meets exactly in `{0}`.
pub fn is_partial_spread(subspaces: &[Flat]) -> bool {
    for (i, u) in subspaces.iter().enumerate() {
        if !u.contains(0) {
            return false;
        }
        for v in &subspaces[..i] {
            match u.intersect(v) {
                Some(w) => {
                    if w.dim() != 0 || w.base() != 0 {
                        return false;
                    }
                }
                None => return false,
            }
        }
    }
    true
}

pub use crate::gf2::MAX_M;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::point_rank;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    /// Oracle: point-set intersection by expanding both flats.
    fn intersect_oracle(a: &Flat, b: &Flat) -> Vec<Point> {
        let pa: BTreeSet<Point> = a.points().into_iter().collect();
        b.points().into_iter().filter(|p| pa.contains(p)).collect()
    }

    /// Oracle: is the point set an affine subspace? (Closure of the
    /// difference set under addition.)
    fn is_flat_oracle(pts: &[Point]) -> bool {
        if pts.is_empty() || !pts.len().is_power_of_two() {
            return false;
        }
        let base = pts[0];
        let diffs: BTreeSet<Point> = pts.iter().map(|&p| p ^ base).collect();
        if diffs.len() != pts.len() {
            return false;
        }
        diffs
            .iter()
            .all(|&x| diffs.iter().all(|&y| diffs.contains(&(x ^ y))))
    }

    #[test]
    fn counts_match_closed_form() {
        // 2^{m-d} [m d]_2, cross-checked for every m <= 6.
        for m in 1..=6u32 {
            for d in 0..=m {
                let flats = enumerate_flats(m, d).unwrap();
                assert_eq!(flats.len() as u128, flat_count(m, d), "m={m} d={d}");
                let set: BTreeSet<&Flat> = flats.iter().collect();
                assert_eq!(set.len(), flats.len(), "duplicates at m={m} d={d}");
            }
        }
    }

    #[test]
    fn two_flat_counts() {
        assert_eq!(enumerate_flats(5, 2).unwrap().len(), 1240);
        assert_eq!(enumerate_flats(4, 2).unwrap().len(), 140);
        assert_eq!(enumerate_flats(4, 4).unwrap().len(), 1);
    }

    #[test]
    fn enumerated_flats_are_canonical_and_valid() {
        for flat in enumerate_flats(4, 2).unwrap() {
            let pts = flat.points();
            assert!(is_flat_oracle(&pts));
            // Canonicalisation idempotence.
            let rebuilt = Flat::new(4, pts[2], &[pts[0] ^ pts[2], pts[1] ^ pts[2]]);
            assert_eq!(rebuilt, flat);
            assert_eq!(flat.base(), *pts.iter().min().unwrap());
        }
    }

    #[test]
    fn superflat_counts() {
        // 2^{m-d} - 1 superflats for every enumerated flat, small m.
        for m in 2..=5u32 {
            for d in 1..m {
                for flat in enumerate_flats(m, d).unwrap() {
                    let sup = flat.superflats();
                    assert_eq!(sup.len(), (1 << (m - d)) - 1);
                    for s in &sup {
                        assert_eq!(s.dim(), d as usize + 1);
                        assert!(flat.points().iter().all(|&p| s.contains(p)));
                    }
                    let set: BTreeSet<&Flat> = sup.iter().collect();
                    assert_eq!(set.len(), sup.len());
                }
            }
        }
    }

    #[test]
    fn superflats_of_2flat_in_z4_brute_force() {
        // {0, e1, e2, e1+e2} in Z_2^4 has three 3-flat superflats, found
        // independently by scanning all 8-point subsets that form flats.
        let u = Flat::from_points(4, &[0b0000, 0b0001, 0b0010, 0b0011]).unwrap();
        let upts: BTreeSet<Point> = u.points().into_iter().collect();
        let mut brute = Vec::new();
        // All 3-flats = all subsets of size 8 that are flats; enumerate via
        // (base, three independent directions) and dedup canonically.
        let mut seen = BTreeSet::new();
        for b in 0..16u16 {
            for d1 in 1..16u16 {
                for d2 in 1..16u16 {
                    for d3 in 1..16u16 {
                        if point_rank(&[d1, d2, d3]) != 3 {
                            continue;
                        }
                        let f = Flat::new(4, b, &[d1, d2, d3]);
                        if seen.insert(f.clone()) && upts.iter().all(|&p| f.contains(p)) {
                            brute.push(f);
                        }
                    }
                }
            }
        }
        brute.sort_unstable();
        assert_eq!(brute.len(), 3);
        assert_eq!(u.superflats(), brute);
    }

    #[test]
    fn intersect_examples() {
        let u = Flat::from_points(4, &[0b0000, 0b0001, 0b0010, 0b0011]).unwrap();
        // U cap U = U
        assert_eq!(u.intersect(&u), Some(u.clone()));
        // Parallel distinct cosets are disjoint.
        let shifted = u.translate(0b0100);
        assert_eq!(u.intersect(&shifted), None);
        // {0,e1,e2,e1+e2} cap {0,e1,e3,e1+e3} = {0,e1}
        let v = Flat::from_points(4, &[0b0000, 0b0001, 0b0100, 0b0101]).unwrap();
        let w = u.intersect(&v).unwrap();
        assert_eq!(w.points(), vec![0b0000, 0b0001]);
    }

    #[test]
    fn intersect_matches_pointwise_oracle() {
        // Exhaustive over all pairs of 2-flats of Z_2^4 (140 x 140).
        let flats = enumerate_flats(4, 2).unwrap();
        for a in &flats {
            for b in &flats {
                let oracle = intersect_oracle(a, b);
                match a.intersect(b) {
                    None => assert!(oracle.is_empty()),
                    Some(w) => assert_eq!(w.points(), oracle),
                }
            }
        }
    }

    #[test]
    fn spread_sizes_and_pairwise_intersections() {
        for (m, r, want) in [(5, 2, 6), (4, 2, 2), (6, 3, 6)] {
            let spread = partial_spread(m, r).unwrap();
            assert!(spread.len() >= want);
            assert!(is_partial_spread(&spread));
            for s in &spread {
                assert_eq!(s.dim(), r as usize);
            }
        }
    }

    #[test]
    fn spread_rejects_bad_parameters() {
        assert!(partial_spread(5, 3).is_err());
        assert!(partial_spread(4, 0).is_err());
    }

    #[test]
    fn flats_through_point_properties() {
        // m=5, r=2, v=0: six flats, pairwise intersection {0}.
        let through0 = flats_through_point(5, 2, 0).unwrap();
        assert_eq!(through0.len(), 6);
        for (i, a) in through0.iter().enumerate() {
            assert!(a.contains(0));
            for b in &through0[..i] {
                let w = a.intersect(b).unwrap();
                assert_eq!((w.dim(), w.base()), (0, 0));
            }
        }
        // Translation property.
        let v: Point = 0b10110;
        let through_v = flats_through_point(5, 2, v).unwrap();
        let translated: Vec<Flat> = through0.iter().map(|f| f.translate(v)).collect();
        assert_eq!(through_v, translated);
    }

    #[test]
    fn flats_through_point_rm14() {
        let through = flats_through_point(4, 1, 0b0001).unwrap();
        assert_eq!(through.len(), 6);
        for (i, a) in through.iter().enumerate() {
            assert_eq!(a.len(), 2);
            assert!(a.contains(0b0001));
            for b in &through[..i] {
                let w = a.intersect(b).unwrap();
                assert_eq!(w.points(), vec![0b0001]);
            }
        }
    }

    #[test]
    fn block_aligned_spread_is_a_spread() {
        for (m, r) in [(5, 2), (6, 3), (6, 2), (4, 1), (4, 2), (7, 3)] {
            let count = (1usize << (m - r)) - 2;
            let spread = block_aligned_spread(m, r, count).unwrap();
            assert_eq!(spread.len(), count);
            assert!(is_partial_spread(&spread));
            // The first floor(m/r) members are the coordinate blocks.
            for p in 0..(m / r) as usize {
                let basis: Vec<Point> = (0..r).map(|i| 1 << (p as u32 * r + i)).collect();
                assert_eq!(spread[p], Flat::new(m, 0, &basis));
            }
        }
    }

    proptest! {
        /// Canonical flats compare equal iff their point sets are equal.
        #[test]
        fn canonical_identity(
            b1 in 0u16..32, b2 in 0u16..32,
            g1 in proptest::collection::vec(0u16..32, 2),
            g2 in proptest::collection::vec(0u16..32, 2),
        ) {
            let f1 = Flat::new(5, b1, &g1);
            let f2 = Flat::new(5, b2, &g2);
            prop_assert_eq!(f1 == f2, f1.points() == f2.points());
        }

        /// intersect agrees with the pointwise oracle on random flats.
        #[test]
        fn intersect_random_oracle(
            b1 in 0u16..64, b2 in 0u16..64,
            g1 in proptest::collection::vec(0u16..64, 1..4),
            g2 in proptest::collection::vec(0u16..64, 1..4),
        ) {
            let f1 = Flat::new(6, b1, &g1);
            let f2 = Flat::new(6, b2, &g2);
            let oracle = intersect_oracle(&f1, &f2);
            match f1.intersect(&f2) {
                None => prop_assert!(oracle.is_empty()),
                Some(w) => prop_assert_eq!(w.points(), oracle),
            }
        }
    }
}
