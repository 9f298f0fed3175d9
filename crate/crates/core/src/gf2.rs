//! Bit-packed linear algebra over GF(2).
//!
//! Vectors are packed into 64-bit words; every kernel here reduces to XOR,
//! AND and popcount. Subspaces are stored in reduced row echelon form with
//! leftmost pivots, so two spans of the same subspace compare equal.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid bit string {0:?}")]
    Parse(String),
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(WORD)], len }
    }

    /// The `i`-th standard basis vector of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        BitVector {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            len: self.len,
        }
    }

    pub fn or(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "or of vectors with different lengths");
        BitVector {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
            len: self.len,
        }
    }

    /// Parity of the bitwise AND.
    #[inline]
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Number of positions where both vectors are set.
    pub fn and_count(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let t = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len);
        let mut out = BitVector::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// The bits at the listed positions, in order.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Gf2Error::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BitVector::from_bools(&bits))
    }
}

fn check_lengths<'a>(
    len: usize,
    rows: impl IntoIterator<Item = &'a BitVector>,
) -> Result<(), Gf2Error> {
    for r in rows {
        if r.len() != len {
            return Err(Gf2Error::LengthMismatch { expected: len, found: r.len() });
        }
    }
    Ok(())
}

/// Gaussian elimination that also records, for every output row, which input
/// rows were summed to produce it.
struct Elimination {
    /// Reduced rows, pivot rows first in increasing pivot order, then zero rows.
    rows: Vec<BitVector>,
    /// `combos[i]` is the combination of input rows equal to `rows[i]`.
    combos: Vec<BitVector>,
    /// Pivot column of each of the first `pivots.len()` rows.
    pivots: Vec<usize>,
}

impl Elimination {
    fn run(rows: &[BitVector], width: usize) -> Self {
        let count = rows.len();
        let mut rows: Vec<BitVector> = rows.to_vec();
        let mut combos: Vec<BitVector> = (0..count).map(|i| BitVector::unit(count, i)).collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..width {
            if next == count {
                break;
            }
            let Some(found) = (next..count).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, found);
            combos.swap(next, found);
            let pivot_row = rows[next].clone();
            let pivot_combo = combos[next].clone();
            for (r, (row, c)) in rows.iter_mut().zip(combos.iter_mut()).enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                    c.xor_assign(&pivot_combo);
                }
            }
            pivots.push(col);
            next += 1;
        }
        Self { rows, combos, pivots }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Reduced row echelon form of `rows`, zero rows dropped.
fn rref(rows: Vec<BitVector>, width: usize) -> Vec<BitVector> {
    let mut rows = rows;
    let mut next = 0;
    for col in 0..width {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        next += 1;
    }
    rows.truncate(next);
    rows
}

/// Dimension of the span of `rows`.
pub fn rank(rows: &[BitVector]) -> Result<usize, Gf2Error> {
    let Some(first) = rows.first() else { return Ok(0) };
    check_lengths(first.len(), rows)?;
    Ok(Elimination::run(rows, first.len()).rank())
}

/// All coefficient vectors `x` with `Σ x_i rows_i = 0`.
pub fn kernel(rows: &[BitVector]) -> Result<BinarySubspace, Gf2Error> {
    let count = rows.len();
    let Some(first) = rows.first() else {
        return Ok(BinarySubspace::zero(0));
    };
    check_lengths(first.len(), rows)?;
    let elim = Elimination::run(rows, first.len());
    let null = elim.combos[elim.rank()..].to_vec();
    BinarySubspace::span(count, &null)
}

/// Some `x` with `Σ x_i rows_i = target`, or `None` when `target` is not in
/// the span. The solution uses only pivot rows of the elimination, which makes
/// it deterministic in the row order.
pub fn solve(rows: &[BitVector], target: &BitVector) -> Result<Option<BitVector>, Gf2Error> {
    check_lengths(target.len(), rows)?;
    let elim = Elimination::run(rows, target.len());
    let mut residual = target.clone();
    let mut x = BitVector::zeros(rows.len());
    for (i, &col) in elim.pivots.iter().enumerate() {
        if residual.get(col) {
            residual.xor_assign(&elim.rows[i]);
            x.xor_assign(&elim.combos[i]);
        }
    }
    Ok(residual.is_zero().then_some(x))
}

pub fn membership(space: &BinarySubspace, v: &BitVector) -> Result<bool, Gf2Error> {
    if v.len() != space.ambient_len() {
        return Err(Gf2Error::LengthMismatch { expected: space.ambient_len(), found: v.len() });
    }
    Ok(space.contains(v))
}

pub fn subspace_sum(a: &BinarySubspace, b: &BinarySubspace) -> Result<BinarySubspace, Gf2Error> {
    a.sum(b)
}

pub fn subspace_intersection(
    a: &BinarySubspace,
    b: &BinarySubspace,
) -> Result<BinarySubspace, Gf2Error> {
    a.intersection(b)
}

/// A subspace of GF(2)^ambient, held as a reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinarySubspace {
    basis: Vec<BitVector>,
    pivots: Vec<usize>,
    ambient: usize,
}

impl fmt::Debug for BinarySubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BinarySubspace")
            .field("ambient", &self.ambient)
            .field("basis", &self.basis)
            .finish()
    }
}

impl BinarySubspace {
    pub fn zero(ambient: usize) -> Self {
        Self { basis: Vec::new(), pivots: Vec::new(), ambient }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            basis: (0..ambient).map(|i| BitVector::unit(ambient, i)).collect(),
            pivots: (0..ambient).collect(),
            ambient,
        }
    }

    pub fn span<'a>(
        ambient: usize,
        vectors: impl IntoIterator<Item = &'a BitVector>,
    ) -> Result<Self, Gf2Error> {
        let rows: Vec<BitVector> = vectors.into_iter().cloned().collect();
        check_lengths(ambient, &rows)?;
        Ok(Self::from_rref(ambient, rref(rows, ambient)))
    }

    fn from_rref(ambient: usize, basis: Vec<BitVector>) -> Self {
        let pivots = basis
            .iter()
            .map(|r| r.first_one().expect("rref rows are nonzero"))
            .collect();
        Self { basis, pivots, ambient }
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_len(&self) -> usize {
        self.ambient
    }

    /// Reduce `v` against the basis; the result is zero iff `v` is a member.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut r = v.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        v.len() == self.ambient && self.reduce(v).is_zero()
    }

    /// Coefficients of `v` in the echelon basis.
    pub fn coordinates(&self, v: &BitVector) -> Option<BitVector> {
        let mut r = v.clone();
        let mut x = BitVector::zeros(self.dim());
        for (i, (row, &p)) in self.basis.iter().zip(&self.pivots).enumerate() {
            if r.get(p) {
                r.xor_assign(row);
                x.set(i, true);
            }
        }
        r.is_zero().then_some(x)
    }

    pub fn is_subspace_of(&self, other: &BinarySubspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &BinarySubspace) -> Result<BinarySubspace, Gf2Error> {
        if self.ambient != other.ambient {
            return Err(Gf2Error::LengthMismatch { expected: self.ambient, found: other.ambient });
        }
        BinarySubspace::span(self.ambient, self.basis.iter().chain(&other.basis))
    }

    pub fn intersection(&self, other: &BinarySubspace) -> Result<BinarySubspace, Gf2Error> {
        if self.ambient != other.ambient {
            return Err(Gf2Error::LengthMismatch { expected: self.ambient, found: other.ambient });
        }
        let stacked: Vec<BitVector> = self.basis.iter().chain(&other.basis).cloned().collect();
        if stacked.is_empty() {
            return Ok(BinarySubspace::zero(self.ambient));
        }
        let null = kernel(&stacked)?;
        let elements: Vec<BitVector> = null
            .basis()
            .iter()
            .map(|x| {
                let mut v = BitVector::zeros(self.ambient);
                for i in x.iter_ones().filter(|&i| i < self.dim()) {
                    v.xor_assign(&self.basis[i]);
                }
                v
            })
            .collect();
        BinarySubspace::span(self.ambient, &elements)
    }

    /// `{v : v·b = 0 for every b in the subspace}` under the standard dot product.
    pub fn orthogonal_complement(&self) -> BinarySubspace {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let vectors: Vec<BitVector> = (0..self.ambient)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::unit(self.ambient, free);
                for (row, &p) in self.basis.iter().zip(&self.pivots) {
                    if row.get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        BinarySubspace::span(self.ambient, &vectors).expect("lengths agree")
    }

    /// Vectors completing `self` to a basis of `sup`, taken greedily from the
    /// echelon basis of `sup` in order.
    pub fn completion_within(&self, sup: &BinarySubspace) -> Vec<BitVector> {
        let mut acc = self.clone();
        let mut added = Vec::new();
        for v in sup.basis() {
            if !acc.contains(v) {
                added.push(v.clone());
                acc = acc.sum(&BinarySubspace::span(self.ambient, [v]).expect("lengths agree"))
                    .expect("lengths agree");
            }
        }
        added
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn span(vs: &[&str]) -> BinarySubspace {
        let rows: Vec<BitVector> = vs.iter().map(|s| bv(s)).collect();
        BinarySubspace::span(rows[0].len(), &rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[bv("100"), bv("010"), bv("001")]).unwrap(), 3);
        assert_eq!(rank(&[bv("000"), bv("000")]).unwrap(), 0);
        assert_eq!(rank(&[bv("11"), bv("11")]).unwrap(), 1);
        assert_eq!(rank(&[]).unwrap(), 0);
    }

    #[test]
    fn rank_rejects_ragged_rows() {
        assert_eq!(
            rank(&[bv("10"), bv("101")]),
            Err(Gf2Error::LengthMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn kernel_solve_membership_examples() {
        assert_eq!(kernel(&[bv("10"), bv("01")]).unwrap().dim(), 0);
        assert_eq!(solve(&[bv("10"), bv("01")], &bv("11")).unwrap(), Some(bv("11")));
        assert!(!membership(&span(&["10"]), &bv("01")).unwrap());
        assert_eq!(solve(&[bv("10"), bv("10")], &bv("01")).unwrap(), None);
        assert!(solve(&[bv("10")], &bv("101")).is_err());
        assert!(membership(&span(&["10"]), &bv("101")).is_err());
    }

    #[test]
    fn kernel_of_dependent_rows() {
        let k = kernel(&[bv("110"), bv("011"), bv("101")]).unwrap();
        assert_eq!(k.basis(), &[bv("111")]);
    }

    #[test]
    fn sum_and_intersection_examples() {
        let a = span(&["10"]);
        let b = span(&["01"]);
        assert_eq!(a.sum(&b).unwrap().dim(), 2);
        assert_eq!(a.intersection(&b).unwrap().dim(), 0);
        assert!(a.sum(&BinarySubspace::zero(3)).is_err());
    }

    #[test]
    fn complement_and_completion() {
        let s = span(&["1100", "0011"]);
        let c = s.orthogonal_complement();
        assert_eq!(c, s);
        let z = BinarySubspace::zero(4);
        assert_eq!(z.orthogonal_complement(), BinarySubspace::full(4));
        let added = span(&["1100"]).completion_within(&s);
        assert_eq!(added, vec![bv("0011")]);
    }

    #[test]
    fn slicing_and_concat() {
        let v = bv("1011001");
        assert_eq!(v.slice(2, 3), bv("110"));
        assert_eq!(v.select(&[6, 0, 1]), bv("110"));
        assert_eq!(bv("10").concat(&bv("011")), bv("10011"));
        let long = BitVector::from_indices(130, [0, 64, 129]);
        assert_eq!(long.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(long.concat(&long).count_ones(), 6);
        assert_eq!(long.first_one(), Some(0));
    }

    fn arb_rows(len: usize, max_rows: usize) -> impl Strategy<Value = Vec<BitVector>> {
        prop::collection::vec(prop::collection::vec(any::<bool>(), len), 0..=max_rows)
            .prop_map(|rows| rows.iter().map(|r| BitVector::from_bools(r)).collect())
    }

    proptest! {
        #[test]
        fn modular_law(a in arb_rows(70, 8), b in arb_rows(70, 8)) {
            let a = BinarySubspace::span(70, &a).unwrap();
            let b = BinarySubspace::span(70, &b).unwrap();
            let s = a.sum(&b).unwrap();
            let i = a.intersection(&b).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
            prop_assert!(i.is_subspace_of(&a) && i.is_subspace_of(&b));
            prop_assert_eq!(a.sum(&a).unwrap(), a.clone());
        }

        #[test]
        fn canonical_form_is_unique(rows in arb_rows(20, 6), mix in any::<u64>()) {
            let a = BinarySubspace::span(20, &rows).unwrap();
            // Re-span using shuffled sums of the original rows.
            let mut other: Vec<BitVector> = rows.iter().rev().cloned().collect();
            for i in 1..other.len() {
                if (mix >> i) & 1 == 1 {
                    let prev = other[i - 1].clone();
                    other[i].xor_assign(&prev);
                }
            }
            let b = BinarySubspace::span(20, &other).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn solve_satisfies_system(rows in arb_rows(12, 8), target in prop::collection::vec(any::<bool>(), 12)) {
            let target = BitVector::from_bools(&target);
            let space = BinarySubspace::span(12, &rows).unwrap();
            match solve(&rows, &target).unwrap() {
                Some(x) => {
                    let mut acc = BitVector::zeros(12);
                    for i in x.iter_ones() {
                        acc.xor_assign(&rows[i]);
                    }
                    prop_assert_eq!(acc, target);
                }
                None => prop_assert!(!space.contains(&target)),
            }
        }

        #[test]
        fn kernel_is_exact(rows in arb_rows(10, 9)) {
            let k = kernel(&rows).unwrap();
            prop_assert_eq!(k.dim() + rank(&rows).unwrap(), rows.len());
            for x in k.basis() {
                let mut acc = BitVector::zeros(10);
                for i in x.iter_ones() {
                    acc.xor_assign(&rows[i]);
                }
                prop_assert!(acc.is_zero());
            }
        }

        #[test]
        fn orthogonal_complement_dimension(rows in arb_rows(15, 7)) {
            let a = BinarySubspace::span(15, &rows).unwrap();
            let c = a.orthogonal_complement();
            prop_assert_eq!(a.dim() + c.dim(), 15);
            for u in a.basis() {
                for v in c.basis() {
                    prop_assert!(!u.dot(v));
                }
            }
            prop_assert_eq!(c.orthogonal_complement(), a);
        }
    }
}
