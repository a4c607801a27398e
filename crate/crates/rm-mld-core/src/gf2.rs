//! Bit-packed linear algebra over GF(2) and the position orderings of
//! `Z_2^m`.
//!
//! Points of `Z_2^m` are packed into a `u16` (bit `i` is the coefficient of
//! the basis vector `e_{i+1}`), words of `Z_2^{2^m}` into `u64` limbs.
//! `m <= 16` is an explicit guard: a word then has at most 65536 bits.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_M: u32 = 16;

/// A point of `Z_2^m`, packed into the low `m` bits.
pub type Point = u16;

/// Ensures `m` is within the supported range.
pub fn check_m(m: u32) -> Result<()> {
    if (1..=MAX_M).contains(&m) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!(
            "m = {m} not in 1..={MAX_M}"
        )))
    }
}

/// A bit vector of fixed length, one bit per code position.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    limbs: Vec<u64>,
    len: usize,
}

impl Word {
    pub fn zero(len: usize) -> Self {
        Word {
            limbs: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if v {
            self.limbs[i >> 6] |= mask;
        } else {
            self.limbs[i >> 6] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.limbs[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &Word) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Word) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.limbs.iter().zip(&other.limbs) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Number of positions where both words are 1.
    pub fn and_weight(&self, other: &Word) -> usize {
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Hamming distance.
    pub fn distance(&self, other: &Word) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Positions of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (li, &limb) in self.limbs.iter().enumerate() {
            let mut l = limb;
            while l != 0 {
                let b = l.trailing_zeros() as usize;
                out.push((li << 6) | b);
                l &= l - 1;
            }
        }
        out
    }

    /// Index of the highest set bit, if any.
    pub fn leading_bit(&self) -> Option<usize> {
        for (li, &limb) in self.limbs.iter().enumerate().rev() {
            if limb != 0 {
                return Some((li << 6) + 63 - limb.leading_zeros() as usize);
            }
        }
        None
    }

    /// Parses a `0`/`1` string, position 0 first.
    pub fn parse_bits(s: &str) -> Result<Self> {
        let mut w = Word::zero(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => w.set(i, true),
                _ => {
                    return Err(Error::ParameterOutOfRange(format!(
                        "invalid bit character {c:?}"
                    )))
                }
            }
        }
        Ok(w)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A matrix over GF(2) with `Word` rows of equal length.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<Word>,
    cols: usize,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        BitMatrix {
            rows: Vec::new(),
            cols,
        }
    }

    pub fn from_rows(rows: Vec<Word>) -> Result<Self> {
        let cols = rows.first().map_or(0, Word::len);
        for r in &rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
        }
        Ok(BitMatrix { rows, cols })
    }

    pub fn push_row(&mut self, row: Word) {
        debug_assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &Word {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    /// GF(2) row rank. The matrix is not modified.
    pub fn rank(&self) -> usize {
        let mut work: Vec<Word> = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..work.len()).find(|&i| work[i].get(col)) else {
                continue;
            };
            work.swap(rank, pivot);
            let pivot_row = work[rank].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }

    /// The submatrix formed by the given columns, in the given order.
    pub fn column_submatrix(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::new(cols.len());
        for row in &self.rows {
            let mut w = Word::zero(cols.len());
            for (k, &c) in cols.iter().enumerate() {
                if row.get(c) {
                    w.set(k, true);
                }
            }
            out.push_row(w);
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

/// How the `2^m` positions of a word are identified with the points of
/// `Z_2^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderingKind {
    /// Position `j` is the point with binary value `j`.
    Lexicographic,
    /// Position `j` is `alpha^j` for `j < 2^m - 1` and position `2^m - 1`
    /// is `0`, where `alpha` is a root of the given primitive modulus
    /// (bit `i` of the modulus is the coefficient of `x^i`).
    Power { modulus: u32 },
}

/// A bijection between positions `0..2^m` and the points of `Z_2^m`.
#[derive(Clone, PartialEq, Eq)]
pub struct Ordering {
    m: u32,
    kind: OrderingKind,
    points: Vec<Point>,
    position_of: Vec<u32>,
}

impl Ordering {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn kind(&self) -> OrderingKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The point at position `j`.
    pub fn point(&self, j: usize) -> Point {
        self.points[j]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The position of a point.
    pub fn position(&self, p: Point) -> usize {
        self.position_of[p as usize] as usize
    }

    fn from_points(m: u32, kind: OrderingKind, points: Vec<Point>) -> Self {
        let mut position_of = vec![u32::MAX; points.len()];
        for (j, &p) in points.iter().enumerate() {
            debug_assert_eq!(position_of[p as usize], u32::MAX, "duplicate point");
            position_of[p as usize] = j as u32;
        }
        debug_assert!(position_of.iter().all(|&x| x != u32::MAX));
        Ordering {
            m,
            kind,
            points,
            position_of,
        }
    }
}

impl fmt::Debug for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordering(m={}, {:?})", self.m, self.kind)
    }
}

/// The lexicographic ordering: position `j` holds the point `j`.
pub fn lex_ordering(m: u32) -> Result<Ordering> {
    check_m(m)?;
    let n = 1usize << m;
    let points = (0..n).map(|j| j as Point).collect();
    Ok(Ordering::from_points(m, OrderingKind::Lexicographic, points))
}

/// Multiplies by `x` modulo the degree-`m` polynomial `modulus`.
fn mul_x_mod(a: u32, modulus: u32, m: u32) -> u32 {
    let shifted = a << 1;
    if shifted & (1 << m) != 0 {
        (shifted ^ modulus) & ((1 << m) - 1)
    } else {
        shifted
    }
}

/// Multiplicative order of `x` in `Z_2[x] / (modulus)`, or 0 if `x` is not
/// invertible (constant term 0) or the iteration returns to an earlier
/// non-unit state.
fn order_of_x(modulus: u32, m: u32) -> u32 {
    if modulus & 1 == 0 || modulus >> m != 1 {
        return 0;
    }
    let mut a = 2u32 % (1 << m); // the class of x; for m = 1 this is the class of 1
    if m == 1 {
        // Z_2[x]/(x+1) has x = 1, of order 1.
        return if modulus == 0b11 { 1 } else { 0 };
    }
    let mut order = 1u32;
    while a != 1 {
        a = mul_x_mod(a, modulus, m);
        order += 1;
        if order > (1u32 << m) {
            return 0; // cycle without passing through 1
        }
    }
    order
}

/// Builds the power ordering of `Z_2^m` for a primitive modulus:
/// position `j` carries the coordinates of `alpha^j` in the basis
/// `1, x, ..., x^{m-1}`, and the last position carries `0`.
pub fn power_ordering(m: u32, modulus: u32) -> Result<Ordering> {
    check_m(m)?;
    let full = (1u32 << m) - 1;
    let order = order_of_x(modulus, m);
    if order != full {
        return Err(Error::NotPrimitive { modulus, order });
    }
    let n = 1usize << m;
    let mut points = Vec::with_capacity(n);
    let mut a = 1u32;
    for _ in 0..full {
        points.push(a as Point);
        a = mul_x_mod(a, modulus, m);
    }
    points.push(0);
    Ok(Ordering::from_points(
        m,
        OrderingKind::Power { modulus },
        points,
    ))
}

/// Primitive polynomials of degree 1..=16, bit `i` = coefficient of `x^i`.
/// Each is the lexicographically smallest primitive polynomial of its
/// degree; primitivity is re-checked on use.
pub const DEFAULT_PRIMITIVE: [u32; 16] = [
    0b11,                // x + 1
    0b111,               // x^2 + x + 1
    0b1011,              // x^3 + x + 1
    0b10011,             // x^4 + x + 1
    0b100101,            // x^5 + x^2 + 1
    0b1000011,           // x^6 + x + 1
    0b10000011,          // x^7 + x + 1
    0b100011101,         // x^8 + x^4 + x^3 + x^2 + 1
    0b1000010001,        // x^9 + x^4 + 1
    0b10000001001,       // x^10 + x^3 + 1
    0b100000000101,      // x^11 + x^2 + 1
    0b1000001010011,     // x^12 + x^6 + x^4 + x + 1
    0b10000000011011,    // x^13 + x^4 + x^3 + x + 1
    0b100000000101011,   // x^14 + x^5 + x^3 + x + 1
    0b1000000000000011,  // x^15 + x + 1
    0b10000000000101101, // x^16 + x^5 + x^3 + x^2 + 1
];

/// The default primitive modulus for `GF(2^m)`.
pub fn default_modulus(m: u32) -> Result<u32> {
    check_m(m)?;
    Ok(DEFAULT_PRIMITIVE[(m - 1) as usize])
}

/// Rank of a set of points viewed as vectors of `Z_2^m`.
pub fn point_rank(points: &[Point]) -> usize {
    PointBasis::from_points(points).dim()
}

/// Index of the highest set bit. `v` must be nonzero.
#[inline]
fn lead_bit(v: Point) -> usize {
    debug_assert!(v != 0);
    15 - v.leading_zeros() as usize
}

/// An elimination basis over packed points: rows with distinct leading
/// bits, kept fully reduced.
#[derive(Clone, Debug, Default)]
pub struct PointBasis {
    rows: Vec<Point>, // sorted by leading bit, descending
}

impl PointBasis {
    pub fn new() -> Self {
        PointBasis { rows: Vec::new() }
    }

    pub fn from_points(points: &[Point]) -> Self {
        let mut b = PointBasis::new();
        for &p in points {
            b.insert(p);
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Point] {
        &self.rows
    }

    /// Reduces `v` by the basis (zeroing every leading bit present).
    pub fn reduce(&self, mut v: Point) -> Point {
        for &row in &self.rows {
            if v >> lead_bit(row) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Inserts `v`; returns true if it enlarged the span.
    pub fn insert(&mut self, v: Point) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let lead = lead_bit(r);
        // Reduce existing rows by the new one to stay in reduced form.
        for row in &mut self.rows {
            if *row >> lead & 1 == 1 {
                *row ^= r;
            }
        }
        let at = self.rows.partition_point(|&row| lead_bit(row) > lead);
        self.rows.insert(at, r);
        true
    }

    pub fn contains(&self, v: Point) -> bool {
        self.reduce(v) == 0
    }
}

/// Expresses `v` in the given basis and returns the number of nonzero
/// coefficients. Errors if the basis is dependent.
pub fn weight_wrt_basis(v: Point, basis: &[Point]) -> Result<u32> {
    express_in_basis(v, basis).map(u16::count_ones)
}

/// Solves `v = sum c_i basis[i]` and returns the coefficient mask `c`.
/// Errors if the basis is dependent or `v` lies outside its span.
pub fn express_in_basis(v: Point, basis: &[Point]) -> Result<u16> {
    // Eliminate on augmented rows (basis vector, coefficient indicator).
    let n = basis.len();
    if n > 16 {
        return Err(Error::ParameterOutOfRange(format!(
            "basis of {n} vectors exceeds the packed-point width"
        )));
    }
    let mut rows: Vec<(Point, u16)> = basis
        .iter()
        .enumerate()
        .map(|(i, &b)| (b, 1u16 << i))
        .collect();
    // Forward eliminate to echelon form on the point part.
    let mut reduced: Vec<(Point, u16)> = Vec::with_capacity(n);
    for &(mut p, mut c) in rows.iter() {
        for &(rp, rc) in &reduced {
            let lead = 15 - rp.leading_zeros();
            if p >> lead & 1 == 1 {
                p ^= rp;
                c ^= rc;
            }
        }
        if p == 0 {
            return Err(Error::DependentBasis);
        }
        reduced.push((p, c));
        reduced.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    }
    rows = reduced;
    // Reduce v, tracking which basis vectors were used.
    let mut rem = v;
    let mut coeffs = 0u16;
    for &(rp, rc) in &rows {
        let lead = 15 - rp.leading_zeros();
        if rem >> lead & 1 == 1 {
            rem ^= rp;
            coeffs ^= rc;
        }
    }
    if rem != 0 {
        return Err(Error::ParameterOutOfRange(format!(
            "vector {v:#x} is outside the span of the given {n} basis vectors"
        )));
    }
    Ok(coeffs)
}
