//! Construction of the binary Reed-Muller code `RM(r, m)` under a chosen
//! position ordering, information-set testing and systematic encoding.
//!
//! `RM(r, m)` is generated by the characteristic words of all `d`-flats
//! with `d >= m - r`; a spanning set of such words indexed by coordinate
//! subspaces forms the generator matrix used throughout.

use alloc::format;
use alloc::vec::Vec;

use crate::geometry::Flat;
use crate::gf2::{lex_ordering, power_ordering, weight_wrt_basis, BitMatrix, Ordering, Point, Word};
use crate::{Error, Result};

/// Binomial coefficient as `u64`; parameters stay tiny here.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k as u64 {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc
}

/// Code parameters `(r, m)` with the governing position ordering.
///
/// Derived quantities: length `n = 2^m`, dimension
/// `k = sum_{i<=r} C(m, i)`, correctable errors `t = 2^{m-r-1} - 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct CodeSpec {
    r: u32,
    m: u32,
    ordering: Ordering,
}

impl core::fmt::Debug for CodeSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "CodeSpec(r={}, m={}, {:?})",
            self.r,
            self.m,
            self.ordering.kind()
        )
    }
}

impl CodeSpec {
    pub fn new(r: u32, m: u32, ordering: Ordering) -> Result<CodeSpec> {
        if m < 3 || r < 1 || 2 * r > m {
            return Err(Error::ParameterOutOfRange(format!(
                "need m >= 3 and 1 <= r <= m/2, got r = {r}, m = {m}"
            )));
        }
        if ordering.m() != m {
            return Err(Error::LengthMismatch {
                expected: 1 << m,
                found: ordering.len(),
            });
        }
        Ok(CodeSpec { r, m, ordering })
    }

    /// The default ordering: the power ordering of `GF(2^5)` for `m = 5`
    /// (under which all shipped `RM(2, 5)` data is expressed),
    /// lexicographic otherwise.
    pub fn with_default_ordering(r: u32, m: u32) -> Result<CodeSpec> {
        let ordering = if m == 5 {
            power_ordering(5, crate::gf2::default_modulus(5)?)?
        } else {
            lex_ordering(m)?
        };
        CodeSpec::new(r, m, ordering)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        1 << self.m
    }

    pub fn k(&self) -> usize {
        (0..=self.r).map(|i| binomial(self.m, i) as usize).sum()
    }

    pub fn t(&self) -> usize {
        (1 << (self.m - self.r - 1)) - 1
    }

    /// Inputs per majority gate, `2^{m-r} - 2`.
    pub fn gate_fan_in(&self) -> usize {
        (1 << (self.m - self.r)) - 2
    }

    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }
}

/// A set of `k` positions whose generator columns are independent.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct InformationSet {
    positions: Vec<u16>,
}

impl InformationSet {
    pub fn positions(&self) -> &[u16] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, j: u16) -> bool {
        self.positions.binary_search(&j).is_ok()
    }

    /// The points carried by the information positions, in position order.
    pub fn points(&self, ordering: &Ordering) -> Vec<Point> {
        self.positions
            .iter()
            .map(|&j| ordering.point(j as usize))
            .collect()
    }
}

/// Generator matrix of `RM(order, m)` under `ordering`: one row per subset
/// `I` of the coordinate directions with `|I| >= m - order`, namely the
/// characteristic word of the coordinate subspace spanned by `I`. Rows are
/// ordered by decreasing `|I|`, lexicographic within a size. `order` may
/// exceed `m/2` here (needed for dual codes).
pub fn generator_of_order(order: u32, m: u32, ordering: &Ordering) -> BitMatrix {
    let mut subsets: Vec<Vec<u32>> = (0..1u32 << m)
        .filter(|i| i.count_ones() + order >= m)
        .map(|mask| (0..m).filter(|&b| mask >> b & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut gen = BitMatrix::new(1 << m);
    for indices in subsets {
        let basis: Vec<Point> = indices.iter().map(|&b| 1 << b).collect();
        gen.push_row(Flat::new(m, 0, &basis).incidence(ordering));
    }
    gen
}

impl CodeSpec {
    /// The `k x 2^m` generator matrix of this code; full rank.
    pub fn build_generator(&self) -> BitMatrix {
        generator_of_order(self.r, self.m, &self.ordering)
    }

    /// Whether the `k` columns at `positions` are linearly independent.
    pub fn is_information_set(&self, positions: &[u16]) -> Result<bool> {
        let k = self.k();
        if positions.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                found: positions.len(),
            });
        }
        let cols: Vec<usize> = positions.iter().map(|&p| p as usize).collect();
        let sub = self.build_generator().column_submatrix(&cols);
        Ok(sub.rank() == k)
    }

    /// Validates `positions` into an [`InformationSet`].
    pub fn information_set(&self, positions: &[u16]) -> Result<InformationSet> {
        let mut positions = positions.to_vec();
        positions.sort_unstable();
        positions.dedup();
        if !self.is_information_set(&positions)? {
            return Err(Error::NotInformationSet);
        }
        Ok(InformationSet { positions })
    }

    /// The information set of all positions whose points have weight at
    /// least `m - r` with respect to `basis`.
    pub fn canonical_information_set(&self, basis: &[Point]) -> Result<InformationSet> {
        if basis.len() != self.m as usize {
            return Err(Error::LengthMismatch {
                expected: self.m as usize,
                found: basis.len(),
            });
        }
        let threshold = self.m - self.r;
        let mut positions = Vec::with_capacity(self.k());
        for j in 0..self.n() {
            let w = weight_wrt_basis(self.ordering.point(j), basis)?;
            if w >= threshold {
                positions.push(j as u16);
            }
        }
        // Guaranteed by construction; asserted rather than trusted.
        self.information_set(&positions)
    }

    /// The generator in systematic form for `J`: unit columns at the
    /// information positions, obtained by Gauss-Jordan pivoting on the `J`
    /// columns in ascending order. Unique given the code and `J`.
    pub fn systematic_form(&self, info_set: &InformationSet) -> Result<BitMatrix> {
        let k = self.k();
        let gen = self.build_generator();
        let mut rows: Vec<Word> = gen.rows().to_vec();
        for (target, &jpos) in info_set.positions().iter().enumerate() {
            let col = jpos as usize;
            let Some(pivot) = (target..rows.len()).find(|&i| rows[i].get(col)) else {
                return Err(Error::NotInformationSet);
            };
            rows.swap(target, pivot);
            let pivot_row = rows[target].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != target && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
        }
        rows.truncate(k);
        BitMatrix::from_rows(rows)
    }

    /// Exhaustive minimum distance; guarded to `k <= 20`.
    pub fn min_distance_exhaustive(&self) -> Result<usize> {
        let k = self.k();
        if k > 20 {
            return Err(Error::CostGuard(format!(
                "k = {k} > 20: enumerating 2^k codewords is too costly, sample instead"
            )));
        }
        let gen = self.build_generator();
        let mut word = Word::zero(self.n());
        let mut best = usize::MAX;
        // Gray-code walk over all nonzero information vectors.
        for i in 1u32..1 << k {
            let bit = i.trailing_zeros() as usize;
            word.xor_assign(gen.row(bit));
            best = best.min(word.weight());
        }
        Ok(best)
    }
}

/// Systematic encoding: `info * gen`, where `gen` is in systematic form
/// for some information set. The information bits reappear at those
/// positions of the output.
pub fn encode(gen: &BitMatrix, info: &Word) -> Result<Word> {
    if info.len() != gen.row_count() {
        return Err(Error::LengthMismatch {
            expected: gen.row_count(),
            found: info.len(),
        });
    }
    let mut out = Word::zero(gen.col_count());
    for i in 0..info.len() {
        if info.get(i) {
            out.xor_assign(gen.row(i));
        }
    }
    Ok(out)
}

/// Restriction of a word to the information positions, in ascending
/// position order.
pub fn restrict(word: &Word, info_set: &InformationSet) -> Word {
    let mut out = Word::zero(info_set.len());
    for (i, &j) in info_set.positions().iter().enumerate() {
        if word.get(j as usize) {
            out.set(i, true);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::representative_info_sets;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn rm25() -> CodeSpec {
        CodeSpec::with_default_ordering(2, 5).unwrap()
    }

    #[test]
    fn parameters() {
        let spec = rm25();
        assert_eq!((spec.n(), spec.k(), spec.t()), (32, 16, 3));
        let spec = CodeSpec::with_default_ordering(2, 4).unwrap();
        assert_eq!((spec.n(), spec.k(), spec.t()), (16, 11, 1));
        assert!(CodeSpec::with_default_ordering(3, 5).is_err());
        assert!(CodeSpec::with_default_ordering(1, 2).is_err());
    }

    #[test]
    fn generator_ranks_are_full() {
        for m in 3..=8u32 {
            for r in 1..=m / 2 {
                let spec = CodeSpec::with_default_ordering(r, m).unwrap();
                let gen = spec.build_generator();
                assert_eq!(gen.row_count(), spec.k(), "rows r={r} m={m}");
                assert_eq!(gen.rank(), spec.k(), "rank r={r} m={m}");
            }
        }
    }

    #[test]
    fn rm13_row_weights() {
        // Rows are characteristic words of 2- and 3-dimensional coordinate
        // subspaces of Z_2^3, so weights 4 and 8 only.
        let spec = CodeSpec::with_default_ordering(1, 3).unwrap();
        let gen = spec.build_generator();
        assert_eq!(gen.rank(), 4);
        let weights: Vec<usize> = gen.rows().iter().map(Word::weight).collect();
        assert_eq!(weights, [8, 4, 4, 4]);
    }

    #[test]
    fn dual_orthogonality() {
        // Every generator row of RM(r, m) is orthogonal to every row of
        // RM(m - r - 1, m) under the same ordering.
        for m in 3..=7u32 {
            for r in 1..=m / 2 {
                let spec = CodeSpec::with_default_ordering(r, m).unwrap();
                let gen = spec.build_generator();
                let dual = generator_of_order(m - r - 1, m, spec.ordering());
                for a in gen.rows() {
                    for b in dual.rows() {
                        assert!(!a.dot(b), "r={r} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn representative_sets_are_information_sets() {
        let spec = rm25();
        for rep in representative_info_sets() {
            assert!(spec.is_information_set(&rep).unwrap());
        }
        assert!(spec
            .is_information_set(&crate::analysis::REPRESENTATIVE_7_AVOIDING_LAST)
            .unwrap());
    }

    #[test]
    fn dual_support_criterion_agrees() {
        // J is an information set iff no nonzero dual codeword has support
        // inside J; checked on seeded random 16-subsets of RM(2, 5).
        let spec = rm25();
        let dual = generator_of_order(2, 5, spec.ordering());
        let k = dual.row_count();
        let mut dual_words = Vec::with_capacity(1 << k);
        let mut w = Word::zero(32);
        dual_words.push(w.clone());
        for i in 1u32..1 << k {
            w.xor_assign(dual.row(i.trailing_zeros() as usize));
            dual_words.push(w.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let mut subset = Vec::new();
            while subset.len() < 16 {
                let cand = (rng.next_u32() % 32) as u16;
                if !subset.contains(&cand) {
                    subset.push(cand);
                }
            }
            subset.sort_unstable();
            let mut mask = Word::zero(32);
            for &j in &subset {
                mask.set(j as usize, true);
            }
            let rank_route = spec.is_information_set(&subset).unwrap();
            let dual_route = !dual_words
                .iter()
                .any(|c| !c.is_zero() && c.and_weight(&mask) == c.weight());
            assert_eq!(rank_route, dual_route);
        }
    }

    #[test]
    fn canonical_information_set_sizes() {
        let basis5: Vec<Point> = (0..5).map(|i| 1 << i).collect();
        let j = rm25().canonical_information_set(&basis5).unwrap();
        assert_eq!(j.len(), 16);

        let spec13 = CodeSpec::with_default_ordering(1, 3).unwrap();
        let basis3: Vec<Point> = (0..3).map(|i| 1 << i).collect();
        assert_eq!(spec13.canonical_information_set(&basis3).unwrap().len(), 4);

        let spec24 = CodeSpec::with_default_ordering(2, 4).unwrap();
        let basis4: Vec<Point> = (0..4).map(|i| 1 << i).collect();
        let j24 = spec24.canonical_information_set(&basis4).unwrap();
        assert_eq!(j24.len(), 11);
        assert!(spec24.is_information_set(j24.positions()).unwrap());
    }

    #[test]
    fn canonical_set_in_skew_basis_still_validates() {
        let spec = rm25();
        let basis = [0b00011, 0b00010, 0b01100, 0b01000, 0b10000];
        let j = spec.canonical_information_set(&basis).unwrap();
        assert_eq!(j.len(), 16);
    }

    #[test]
    fn systematic_form_is_identity_at_info_positions() {
        let spec = rm25();
        let j = spec
            .information_set(&(0..16).collect::<Vec<u16>>())
            .unwrap();
        let gen = spec.systematic_form(&j).unwrap();
        for (row, &jpos) in j.positions().iter().enumerate() {
            for other in 0..spec.k() {
                assert_eq!(gen.get(other, jpos as usize), other == row);
            }
        }
        // Row space check: stacking any systematic row onto the plain
        // generator must not increase the rank.
        let plain = spec.build_generator();
        for row in gen.rows() {
            let mut stacked = plain.clone();
            stacked.push_row(row.clone());
            assert_eq!(stacked.rank(), spec.k());
        }
    }

    #[test]
    fn encode_properties() {
        let spec = rm25();
        let j = spec
            .information_set(&(0..16).collect::<Vec<u16>>())
            .unwrap();
        let gen = spec.systematic_form(&j).unwrap();

        // Zero encodes to zero; unit vectors encode to rows.
        let zero = encode(&gen, &Word::zero(16)).unwrap();
        assert!(zero.is_zero());
        for i in 0..16 {
            let mut info = Word::zero(16);
            info.set(i, true);
            assert_eq!(&encode(&gen, &info).unwrap(), gen.row(i));
        }

        // All-ones encodes to the fold of all rows.
        let mut ones = Word::zero(16);
        let mut expected = Word::zero(32);
        for i in 0..16 {
            ones.set(i, true);
            expected.xor_assign(gen.row(i));
        }
        assert_eq!(encode(&gen, &ones).unwrap(), expected);

        // Systematic property on seeded random vectors.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut info = Word::zero(16);
            for i in 0..16 {
                info.set(i, rng.next_u32() & 1 == 1);
            }
            let cw = encode(&gen, &info).unwrap();
            assert_eq!(restrict(&cw, &j), info);
        }

        let short = Word::zero(11);
        assert!(encode(&gen, &short).is_err());
    }

    #[test]
    fn min_distances() {
        assert_eq!(rm25().min_distance_exhaustive().unwrap(), 8);
        let spec13 = CodeSpec::with_default_ordering(1, 3).unwrap();
        assert_eq!(spec13.min_distance_exhaustive().unwrap(), 4);
        let spec24 = CodeSpec::with_default_ordering(2, 4).unwrap();
        assert_eq!(spec24.min_distance_exhaustive().unwrap(), 4);
        let spec27 = CodeSpec::with_default_ordering(2, 7).unwrap();
        assert!(spec27.min_distance_exhaustive().is_err());
    }

    #[test]
    fn non_information_set_detected() {
        // An 11-subset of RM(2, 4) positions whose complement contains the
        // support of the 2-flat {0,1,2,3} cannot be an information set.
        let spec = CodeSpec::with_default_ordering(2, 4).unwrap();
        let j: Vec<u16> = (0..16u16).filter(|&p| p > 4).collect();
        assert_eq!(j.len(), 11);
        assert!(!spec.is_information_set(&j).unwrap());
        assert!(spec.information_set(&j).is_err());
    }
}
